//! MGF bounds and tail bounds for sums of independent zero-mean
//! sub-exponential random variables.
//!
//! A sum Sₙ = X₁ + ⋯ + Xₙ is summarized by the aggregates
//! B² = ε Σᵢ ‖Xᵢ‖²_{f;ε} and M = maxᵢ ‖Xᵢ‖_{f;ε} of a [`SumProfile`]. The
//! tail bounds are:
//!
//! * piecewise: exp(−x²/4B²) for x ≤ 2B²/M, else exp(−(x/M − B²/M²));
//! * min-form: exp(−min(x²/4B², x/2M)) — never below the piecewise one;
//! * the comparison bound with inflation constants c₁ = 2e−1 and
//!   c₂ = (2e−1)/(2e−2), defined for ψ₁ norms at ε = e−1;
//! * the classical Chernoff curve from the MGF bound
//!   exp(2K₄²h²/(1−K₄|h|)), for ψ₁ norms at ε = 1.
//!
//! All tail bounds are computed in log space (the exponent ≤ 0) so that the
//! deep large-deviation region does not underflow; the probability form
//! exponentiates on demand.

use crate::dist::Distribution;
use crate::orlicz::{orlicz_norm_value, OrliczFunction};
use crate::special;
use crate::{Error, Result};

/// Which Orlicz function produced the norms aggregated in a profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormFamily {
    Psi11Based,
    Psi1Based,
}

/// The (B², M, ε) aggregates of a list of summand norms.
#[derive(Debug, Clone, Copy)]
pub struct SumProfile {
    pub b_squared: f64,
    pub m: f64,
    pub epsilon: f64,
    pub norm_family: NormFamily,
}

impl SumProfile {
    /// Aggregate precomputed summand norms: B² = ε Σ norms², M = max norms.
    ///
    /// Zero norms are allowed alongside positive ones and enter the sum and
    /// max naturally; an empty or all-zero list is degenerate.
    pub fn from_norms(norms: &[f64], epsilon: f64, norm_family: NormFamily) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::Domain(format!(
                "threshold level must be positive and finite, got {epsilon}"
            )));
        }
        if norms.is_empty() {
            return Err(Error::DegenerateProfile("no summands".into()));
        }
        let mut sum_sq = 0.0;
        let mut max = 0.0f64;
        for &n in norms {
            if !(n >= 0.0) || !n.is_finite() {
                return Err(Error::Domain(format!(
                    "norms must be finite and nonnegative, got {n}"
                )));
            }
            sum_sq += n * n;
            max = max.max(n);
        }
        if max == 0.0 {
            return Err(Error::DegenerateProfile(
                "all summand norms are zero".into(),
            ));
        }
        Ok(SumProfile {
            b_squared: epsilon * sum_sq,
            m: max,
            epsilon,
            norm_family,
        })
    }

    /// Profile of n i.i.d. copies of `dist`, solving the single norm once.
    pub fn iid(dist: &Distribution, f: OrliczFunction, epsilon: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::DegenerateProfile("no summands".into()));
        }
        let norm = orlicz_norm_value(dist, f, epsilon)?;
        if !norm.is_finite() {
            return Err(Error::Domain("summand norm diverged".into()));
        }
        if norm == 0.0 {
            return Err(Error::DegenerateProfile(
                "all summand norms are zero".into(),
            ));
        }
        let family = match f {
            OrliczFunction::Psi1 => NormFamily::Psi1Based,
            OrliczFunction::Psi11 => NormFamily::Psi11Based,
        };
        Ok(SumProfile {
            b_squared: epsilon * n as f64 * norm * norm,
            m: norm,
            epsilon,
            norm_family: family,
        })
    }

    /// The knee 2B²/M where the piecewise bound switches branches.
    pub fn knee(&self) -> f64 {
        2.0 * self.b_squared / self.m
    }

    /// Log of the piecewise bound: −x²/4B² up to the knee, then the
    /// tangent line −(x/M − B²/M²).
    pub fn log_tail_piecewise(&self, x: f64) -> f64 {
        assert!(x >= 0.0, "tail bounds are defined for x ≥ 0");
        if x <= self.knee() {
            -x * x / (4.0 * self.b_squared)
        } else {
            -(x / self.m - self.b_squared / (self.m * self.m))
        }
    }

    /// Log of the min-form bound −min(x²/4B², x/2M).
    pub fn log_tail_minform(&self, x: f64) -> f64 {
        assert!(x >= 0.0, "tail bounds are defined for x ≥ 0");
        -(x * x / (4.0 * self.b_squared)).min(x / (2.0 * self.m))
    }

    pub fn tail_piecewise(&self, x: f64) -> f64 {
        self.log_tail_piecewise(x).exp()
    }

    pub fn tail_minform(&self, x: f64) -> f64 {
        self.log_tail_minform(x).exp()
    }

    /// Log of the comparison bound −min(x²/(4c₂B²), x/(2c₁M)); only defined
    /// for ψ₁-based profiles at threshold ε = e − 1.
    pub fn log_tail_chafai(&self, x: f64) -> Result<f64> {
        assert!(x >= 0.0, "tail bounds are defined for x ≥ 0");
        if self.norm_family != NormFamily::Psi1Based {
            return Err(Error::ProfileMismatch(
                "comparison bound requires psi1-based norms".into(),
            ));
        }
        let e1 = std::f64::consts::E - 1.0;
        if (self.epsilon - e1).abs() > 1e-9 * e1 {
            return Err(Error::ProfileMismatch(format!(
                "comparison bound requires epsilon = e-1, got {}",
                self.epsilon
            )));
        }
        let c1 = special::chafai_c1();
        let c2 = special::chafai_c2();
        Ok(-(x * x / (4.0 * c2 * self.b_squared)).min(x / (2.0 * c1 * self.m)))
    }

    pub fn tail_chafai(&self, x: f64) -> Result<f64> {
        Ok(self.log_tail_chafai(x)?.exp())
    }

    /// Log of the Chernoff bound built on the classical MGF bound
    /// exp(2K₄²h²/(1−K₄h)): inf over h ∈ [0, 1/M) of −hx + 2h²B²/(1−Mh).
    /// Only defined for ψ₁-based profiles at threshold 1 (K₄ = ‖X‖_{ψ₁}).
    pub fn log_tail_classical_chernoff(&self, x: f64) -> Result<f64> {
        assert!(x >= 0.0, "tail bounds are defined for x ≥ 0");
        if self.norm_family != NormFamily::Psi1Based || (self.epsilon - 1.0).abs() > 1e-9 {
            return Err(Error::ProfileMismatch(
                "classical chernoff curve requires psi1-based norms at epsilon = 1".into(),
            ));
        }
        if x == 0.0 {
            return Ok(0.0);
        }
        // φ(h) = −hx + 2h²B²/(1−Mh) is convex with φ'(0) = −x < 0 and
        // φ' → +∞ at h → 1/M, so bisect φ' for the interior minimum.
        let b2 = self.b_squared;
        let m = self.m;
        let dphi = |h: f64| {
            let d = 1.0 - m * h;
            -x + 2.0 * b2 * h * (2.0 - m * h) / (d * d)
        };
        let (mut lo, mut hi) = (0.0, (1.0 - 1e-12) / m);
        if dphi(hi) <= 0.0 {
            // Minimum pinned at the right edge (x beyond the admissible slope).
            let d = 1.0 - m * hi;
            return Ok(-hi * x + 2.0 * hi * hi * b2 / d);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if dphi(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let h = 0.5 * (lo + hi);
        Ok(-h * x + 2.0 * h * h * b2 / (1.0 - m * h))
    }
}

/// MGF bound 1 + h²·ε·‖X‖²_{ψ₁₁;ε}, valid for |h|·‖X‖_{ψ₁₁;ε} ≤ 1.
pub fn mgf_bound(h: f64, norm: f64, epsilon: f64) -> Result<f64> {
    check_mgf_args(h, norm, epsilon)?;
    Ok(1.0 + h * h * epsilon * norm * norm)
}

/// Exponential form exp(h²·ε·‖X‖²_{ψ₁₁;ε}) of [`mgf_bound`].
pub fn mgf_bound_exp(h: f64, norm: f64, epsilon: f64) -> Result<f64> {
    check_mgf_args(h, norm, epsilon)?;
    Ok((h * h * epsilon * norm * norm).exp())
}

fn check_mgf_args(h: f64, norm: f64, epsilon: f64) -> Result<()> {
    if !(norm >= 0.0) || !(epsilon > 0.0) {
        return Err(Error::Domain(format!(
            "mgf bound requires norm ≥ 0 and epsilon > 0, got ({norm}, {epsilon})"
        )));
    }
    // A few ulps of slack so that h = 1/norm passes the boundary exactly.
    if h.abs() * norm > 1.0 + 1e-12 {
        return Err(Error::Domain(format!(
            "mgf bound requires |h|·norm ≤ 1, got {}",
            h.abs() * norm
        )));
    }
    Ok(())
}

/// Classical streamlined MGF bound exp(2K₄²h²/(1 − K₄|h|)) for |h| < 1/K₄.
pub fn classical_mgf_bound(h: f64, k4: f64) -> Result<f64> {
    if !(k4 > 0.0) {
        return Err(Error::Domain(format!("k4 must be positive, got {k4}")));
    }
    if h.abs() >= 1.0 / k4 {
        return Err(Error::Domain(format!(
            "classical mgf bound requires |h| < 1/k4, got |h| = {}",
            h.abs()
        )));
    }
    Ok((2.0 * k4 * k4 * h * h / (1.0 - k4 * h.abs())).exp())
}

/// Double a one-tail bound into a two-tail bound, capped at 1.
pub fn two_sided(bound: f64) -> f64 {
    (2.0 * bound).min(1.0)
}

/// Effective denominator constant and context for the i.i.d. Gaussian-branch
/// bound exp(−x²/(c_eff·n·E X₁²)).
#[derive(Debug, Clone, Copy)]
pub struct EffectiveConstant {
    pub epsilon: f64,
    pub norm: f64,
    pub c_eff: f64,
    pub knee: f64,
}

/// c_eff for n i.i.d. copies of `dist` with the given Orlicz function and
/// threshold: the Gaussian branch exp(−x²/4B²) rewritten over n·E X₁².
///
/// Errors with [`Error::KneeViolated`] when x lies past the knee, where the
/// Gaussian branch no longer applies.
pub fn effective_constant(
    dist: &Distribution,
    f: OrliczFunction,
    epsilon: f64,
    n: usize,
    x: f64,
) -> Result<EffectiveConstant> {
    if n == 0 || !(x >= 0.0) {
        return Err(Error::Domain(format!(
            "effective constant requires n ≥ 1 and x ≥ 0, got ({n}, {x})"
        )));
    }
    let second = dist.second_moment();
    if !(second > 0.0) {
        return Err(Error::Domain("E X² must be positive".into()));
    }
    let norm = orlicz_norm_value(dist, f, epsilon)?;
    if !norm.is_finite() {
        return Err(Error::Domain("summand norm diverged".into()));
    }
    // B² = n·ε·norm², M = norm.
    let knee = 2.0 * n as f64 * epsilon * norm;
    if x > knee {
        return Err(Error::KneeViolated { x, knee });
    }
    Ok(EffectiveConstant {
        epsilon,
        norm,
        c_eff: 4.0 * epsilon * norm * norm / second,
        knee,
    })
}

/// [`effective_constant`] with the threshold matched to the deviation scale,
/// ε = (x/n)²/E X₁², under ψ₁₁ norms; c_eff → 2 as x/n → 0.
pub fn deviation_matched_constant(
    dist: &Distribution,
    n: usize,
    x: f64,
) -> Result<EffectiveConstant> {
    if n == 0 || !(x >= 0.0) {
        return Err(Error::Domain(format!(
            "deviation-matched constant requires n ≥ 1 and x ≥ 0, got ({n}, {x})"
        )));
    }
    let second = dist.second_moment();
    if !(second > 0.0) {
        return Err(Error::Domain("E X² must be positive".into()));
    }
    let ratio = x / n as f64;
    let epsilon = ratio * ratio / second;
    effective_constant(dist, OrliczFunction::Psi11, epsilon, n, x)
}

/// Named bound families; one tabulated curve per family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundFamily {
    Piecewise,
    MinForm,
    Chafai,
    ClassicalMgfChernoff,
}

/// One tabulated point of a bound curve.
#[derive(Debug, Clone, Copy)]
pub struct CurvePoint {
    pub x: f64,
    pub bound: f64,
    pub log_bound: f64,
}

/// Tabulated x ↦ upper bound on P(Sₙ ≥ x) for one family.
#[derive(Debug, Clone)]
pub struct BoundCurve {
    pub family: BoundFamily,
    pub points: Vec<CurvePoint>,
}

impl BoundCurve {
    pub fn evaluate(family: BoundFamily, profile: &SumProfile, x_grid: &[f64]) -> Result<Self> {
        let points = x_grid
            .iter()
            .map(|&x| {
                let log_bound = match family {
                    BoundFamily::Piecewise => Ok(profile.log_tail_piecewise(x)),
                    BoundFamily::MinForm => Ok(profile.log_tail_minform(x)),
                    BoundFamily::Chafai => profile.log_tail_chafai(x),
                    BoundFamily::ClassicalMgfChernoff => profile.log_tail_classical_chernoff(x),
                }?;
                Ok(CurvePoint {
                    x,
                    bound: log_bound.exp(),
                    log_bound,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BoundCurve { family, points })
    }
}
