//! The Orlicz functions ψ₁(u) = eᵘ − 1 and ψ₁₁(u) = eᵘ − 1 − u, and the
//! solver for the generalized Orlicz norm
//!
//! ```text
//! ‖X‖_{f;ε} = min{ x > 0 : E f(|X|/x) ≤ ε }.
//! ```
//!
//! The map x ↦ E f(|X|/x) is nonincreasing (strictly decreasing and
//! continuous wherever P(X ≠ 0) > 0), so the norm is found by geometric
//! bracket expansion followed by bisection. ψ₁₁ is quadratic near 0, which is
//! exactly the regime the bounds exploit, so its evaluation switches to a
//! truncated Maclaurin series below a crossover to avoid the cancellation in
//! expm1(u) − u.

use crate::dist::{Distribution, ExpectationRequest};
use crate::{Error, Result};

/// Below this point ψ₁₁ uses the series; above it, expm1(u) − u is already
/// accurate to ~2⁻⁵²/u relative, i.e. better than 4e−15 at the crossover.
const PSI11_SERIES_CROSSOVER: f64 = 0.125;

/// Default relative tolerance on the norm value.
pub const DEFAULT_NORM_TOLERANCE: f64 = 1e-10;

/// Bracket expansion cap: give up after scaling the initial guess by 2⁶⁰.
const EXPANSION_CAP: i32 = 60;

/// An Orlicz function: convex, increasing, f(0) = 0, f(u) → ∞.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrliczFunction {
    /// ψ₁(u) = eᵘ − 1; finite norm ⟺ sub-exponential.
    Psi1,
    /// ψ₁₁(u) = eᵘ − 1 − u; same norm-finiteness class, quadratic near 0.
    Psi11,
}

impl OrliczFunction {
    /// Evaluate at u ≥ 0 with relative error ≤ 1e−14 across [0, 700],
    /// including subnormal-small u.
    pub fn eval(self, u: f64) -> Result<f64> {
        if u.is_nan() || u < 0.0 {
            return Err(Error::Domain(format!(
                "orlicz functions are defined on [0, ∞), got u = {u}"
            )));
        }
        Ok(self.eval_unchecked(u))
    }

    #[inline]
    fn eval_unchecked(self, u: f64) -> f64 {
        match self {
            OrliczFunction::Psi1 => u.exp_m1(),
            OrliczFunction::Psi11 => {
                if u < PSI11_SERIES_CROSSOVER {
                    psi11_series(u)
                } else {
                    u.exp_m1() - u
                }
            }
        }
    }

    fn name(self) -> &'static str {
        match self {
            OrliczFunction::Psi1 => "psi1",
            OrliczFunction::Psi11 => "psi11",
        }
    }
}

impl std::fmt::Display for OrliczFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for OrliczFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "psi1" => Ok(OrliczFunction::Psi1),
            "psi11" => Ok(OrliczFunction::Psi11),
            other => Err(Error::Domain(format!(
                "unknown orlicz function `{other}` (expected psi1 or psi11)"
            ))),
        }
    }
}

/// ψ₁₁ Maclaurin tail Σ_{k≥2} uᵏ/k!, truncated at k = 12; at the crossover
/// the first dropped term is below 3e−16 relative.
#[inline]
fn psi11_series(u: f64) -> f64 {
    const INV_FACT: [f64; 11] = [
        1.0 / 2.0,
        1.0 / 6.0,
        1.0 / 24.0,
        1.0 / 120.0,
        1.0 / 720.0,
        1.0 / 5040.0,
        1.0 / 40320.0,
        1.0 / 362880.0,
        1.0 / 3628800.0,
        1.0 / 39916800.0,
        1.0 / 479001600.0,
    ];
    let mut acc = 0.0;
    for &c in INV_FACT.iter().rev() {
        acc = c + u * acc;
    }
    acc * u * u
}

/// Evaluate `f` at `u`; free-function form of [`OrliczFunction::eval`].
pub fn eval_orlicz(f: OrliczFunction, u: f64) -> Result<f64> {
    f.eval(u)
}

/// A norm query: distribution, Orlicz function, threshold level ε and the
/// relative tolerance on the returned value.
#[derive(Clone)]
pub struct NormQuery<'a> {
    pub dist: &'a Distribution,
    pub f: OrliczFunction,
    pub epsilon: f64,
    pub tolerance: f64,
}

impl<'a> NormQuery<'a> {
    pub fn new(dist: &'a Distribution, f: OrliczFunction, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::Domain(format!(
                "threshold level must be positive and finite, got {epsilon}"
            )));
        }
        Ok(NormQuery {
            dist,
            f,
            epsilon,
            tolerance: DEFAULT_NORM_TOLERANCE,
        })
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self> {
        if !(tolerance > 0.0) {
            return Err(Error::Domain(format!(
                "tolerance must be positive, got {tolerance}"
            )));
        }
        self.tolerance = tolerance;
        Ok(self)
    }
}

/// Solver output: the norm (or +∞ on divergence), the final bisection
/// bracket and the number of expectation evaluations spent.
#[derive(Debug, Clone, Copy)]
pub struct NormResult {
    pub value: f64,
    pub bracket: (f64, f64),
    pub evaluations: u64,
}

impl NormResult {
    pub fn is_divergent(&self) -> bool {
        self.value.is_infinite()
    }
}

/// Solve ‖X‖_{f;ε} by bracket expansion and bisection.
///
/// If |X| = 0 a.s. the norm is 0. If E f(|X|/x) stays above ε all the way to
/// 2⁶⁰ times the initial guess, the query is reported divergent with
/// value +∞ rather than guessing.
pub fn orlicz_norm(q: &NormQuery) -> Result<NormResult> {
    if q.dist.is_almost_surely_zero() {
        return Ok(NormResult {
            value: 0.0,
            bracket: (0.0, 0.0),
            evaluations: 0,
        });
    }

    let mut evaluations = 0u64;
    // Criterion g(x) = E f(|X|/x) − ε, nonincreasing in x; +∞ counts as > 0.
    let mut criterion_exceeds = |x: f64| -> Result<bool> {
        evaluations += 1;
        let integrand = |t: f64| q.f.eval_unchecked(t.abs() / x);
        let req = ExpectationRequest::new(&integrand).with_tolerances(q.epsilon * 1e-12, 1e-11);
        let e = q.dist.expect(&req)?;
        Ok(!(e.value <= q.epsilon))
    };

    let x0 = q.dist.mean_abs().max(f64::MIN_POSITIVE);
    let mut lo;
    let mut hi;
    if criterion_exceeds(x0)? {
        // Norm is above x0: expand upward until the criterion drops to ε.
        lo = x0;
        hi = x0;
        let mut k = 0;
        loop {
            hi *= 2.0;
            k += 1;
            if !criterion_exceeds(hi)? {
                break;
            }
            lo = hi;
            if k >= EXPANSION_CAP {
                return Ok(NormResult {
                    value: f64::INFINITY,
                    bracket: (lo, f64::INFINITY),
                    evaluations,
                });
            }
        }
    } else {
        // Norm is at or below x0: expand downward until the criterion exceeds ε.
        hi = x0;
        lo = x0;
        let mut k = 0;
        loop {
            lo /= 2.0;
            k += 1;
            if criterion_exceeds(lo)? {
                break;
            }
            hi = lo;
            if k >= EXPANSION_CAP {
                // Criterion never rose above ε: the infimum sits below any
                // resolvable scale; report 0 with the unresolved bracket.
                return Ok(NormResult {
                    value: 0.0,
                    bracket: (0.0, hi),
                    evaluations,
                });
            }
        }
    }

    // Invariant: criterion(lo) > ε ≥ criterion(hi).
    while hi - lo > q.tolerance * hi {
        let mid = 0.5 * (lo + hi);
        if criterion_exceeds(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    Ok(NormResult {
        value: 0.5 * (lo + hi),
        bracket: (lo, hi),
        evaluations,
    })
}

/// Convenience wrapper: the norm value at the default tolerance.
pub fn orlicz_norm_value(dist: &Distribution, f: OrliczFunction, epsilon: f64) -> Result<f64> {
    Ok(orlicz_norm(&NormQuery::new(dist, f, epsilon)?)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special;

    #[test]
    fn eval_trivials() {
        assert_eq!(OrliczFunction::Psi1.eval(0.0).unwrap(), 0.0);
        assert_eq!(OrliczFunction::Psi11.eval(0.0).unwrap(), 0.0);
        let v = OrliczFunction::Psi1.eval(std::f64::consts::LN_2).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        assert!(OrliczFunction::Psi1.eval(-1e-9).is_err());
        assert!(OrliczFunction::Psi11.eval(f64::NAN).is_err());
    }

    /// Extended-precision series oracle: at u = 1e−9 three terms already
    /// carry the value to far below f64 resolution.
    #[test]
    fn psi11_tiny_argument_matches_series_oracle() {
        let u = 1e-9;
        let oracle = u * u / 2.0 + u * u * u / 6.0 + u * u * u * u / 24.0;
        let got = OrliczFunction::Psi11.eval(u).unwrap();
        assert!(((got - oracle) / oracle).abs() < 1e-14, "{got} vs {oracle}");
        // Reference value at the f64-representable u (series at 60 digits).
        assert!(((got - 5.000000001666667e-19) / got).abs() < 1e-14);
    }

    #[test]
    fn psi11_continuous_at_the_crossover() {
        for u in [0.1249999, 0.125, 0.1250001, 0.0625, 0.25] {
            let series = psi11_series(u);
            let direct = u.exp_m1() - u;
            assert!(
                ((series - direct) / direct).abs() < 5e-15,
                "u = {u}: {series} vs {direct}"
            );
        }
    }

    /// 60-digit references across both evaluation paths and the full range.
    #[test]
    fn psi11_matches_high_precision_references() {
        let cases = [
            (0.0625, 0.0019944589178594297),
            (0.125, 0.008148453066826317),
            (0.5, 0.14872127070012814),
            (1.0, 0.7182818284590452),
            (5.0, 142.4131591025766),
            (20.0, 485165174.4097903),
            (100.0, 2.6881171418161356e43),
            (700.0, 1.0142320547350045e304),
        ];
        for (u, want) in cases {
            let got = OrliczFunction::Psi11.eval(u).unwrap();
            assert!(
                ((got - want) / want).abs() < 1e-14,
                "u = {u}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn psi11_below_psi1_everywhere() {
        for k in -30..=7 {
            let u = 2f64.powi(k);
            let p1 = OrliczFunction::Psi1.eval(u).unwrap();
            let p11 = OrliczFunction::Psi11.eval(u).unwrap();
            assert!(p11 <= p1, "u = {u}");
            assert!(p11 > 0.0);
        }
    }

    #[test]
    fn rademacher_psi1_norm_matches_closed_form() {
        // ‖X‖_{ψ₁;ε} = 1/ln(1+ε) for a Rademacher variable.
        let r = Distribution::rademacher();
        for eps in [0.1, 0.3, 1.0, std::f64::consts::E - 1.0, 2.5] {
            let got = orlicz_norm_value(&r, OrliczFunction::Psi1, eps).unwrap();
            let want = 1.0 / eps.ln_1p();
            assert!(
                ((got - want) / want).abs() < 1e-9,
                "eps = {eps}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn rademacher_psi11_norm_at_one() {
        let r = Distribution::rademacher();
        let got = orlicz_norm_value(&r, OrliczFunction::Psi11, 1.0).unwrap();
        assert!((got - 0.8724532496000724).abs() < 1e-9, "{got}");
        // Defining identity: psi11(1/norm) = 1.
        let back = OrliczFunction::Psi11.eval(1.0 / got).unwrap();
        assert!((back - 1.0).abs() < 1e-8);
    }

    #[test]
    fn point_mass_at_zero_has_zero_norm() {
        let d = Distribution::point_mass(0.0);
        let r = orlicz_norm(&NormQuery::new(&d, OrliczFunction::Psi11, 1.0).unwrap()).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.evaluations, 0);
    }

    #[test]
    fn uniform_norms_match_frozen_references() {
        // Roots of x(e^{1/x}−1) = 2 and x(e^{1/x}−1) − 1/(2x) = 2.
        let u = Distribution::uniform(-1.0, 1.0).unwrap();
        let p1 = orlicz_norm_value(&u, OrliczFunction::Psi1, 1.0).unwrap();
        let p11 = orlicz_norm_value(&u, OrliczFunction::Psi11, 1.0).unwrap();
        assert!((p1 - 0.7959050946318331).abs() < 1e-8, "{p1}");
        assert!((p11 - 0.5347425837384328).abs() < 1e-8, "{p11}");
        let ratio_sq = (p1 / p11) * (p1 / p11);
        assert!((ratio_sq - 2.2153024564100217).abs() < 1e-6, "{ratio_sq}");
    }

    #[test]
    fn laplace_norms_match_closed_forms() {
        // E psi1(|X|/x) = 1/(x−1) ⇒ norm 2; E psi11 = 1/(x(x−1)) ⇒ golden ratio.
        let l = Distribution::laplace(1.0).unwrap();
        let p1 = orlicz_norm_value(&l, OrliczFunction::Psi1, 1.0).unwrap();
        assert!((p1 - 2.0).abs() < 1e-8, "{p1}");
        let p11 = orlicz_norm_value(&l, OrliczFunction::Psi11, 1.0).unwrap();
        assert!((p11 - 1.618033988749895).abs() < 1e-8, "{p11}");
    }

    #[test]
    fn centered_exponential_norms_match_frozen_references() {
        let c = Distribution::centered_exponential(1.0).unwrap();
        let p1 = orlicz_norm_value(&c, OrliczFunction::Psi1, 1.0).unwrap();
        let p11 = orlicz_norm_value(&c, OrliczFunction::Psi11, 1.0).unwrap();
        assert!((p1 - 1.5313468378543573).abs() < 1e-8, "{p1}");
        assert!((p11 - 1.3102678534821288).abs() < 1e-8, "{p11}");
    }

    #[test]
    fn sandwich_invariant_and_threshold_identity() {
        // At the solved norm, E f(|X|/(value(1+tol))) ≤ ε ≤ E f(|X|/(value(1−tol))),
        // and E f(|X|/value)/ε = 1, which is the f/ε-at-threshold-1 identity.
        let cases = [
            (Distribution::rademacher(), OrliczFunction::Psi1, 0.3),
            (
                Distribution::uniform(-1.0, 1.0).unwrap(),
                OrliczFunction::Psi11,
                1.0,
            ),
            (
                Distribution::laplace(1.0).unwrap(),
                OrliczFunction::Psi11,
                0.1,
            ),
        ];
        for (d, f, eps) in cases {
            let q = NormQuery::new(&d, f, eps).unwrap();
            let r = orlicz_norm(&q).unwrap();
            let criterion = |x: f64| {
                let integrand = |t: f64| f.eval(t.abs() / x).unwrap();
                d.expect(&ExpectationRequest::new(&integrand))
                    .unwrap()
                    .value
            };
            assert!(criterion(r.value * (1.0 + q.tolerance)) <= eps);
            assert!(criterion(r.value * (1.0 - q.tolerance)) >= eps);
            let at_value = criterion(r.value) / eps;
            assert!((at_value - 1.0).abs() < 1e-7, "{f} eps={eps}: {at_value}");
            assert!(r.evaluations > 0);
        }
    }

    #[test]
    fn expansion_cap_reports_divergence() {
        // 1/ln(1+1e−300) ≈ 1e300 lies beyond the 2⁶⁰ expansion cap.
        let r = Distribution::rademacher();
        let res = orlicz_norm(&NormQuery::new(&r, OrliczFunction::Psi1, 1e-300).unwrap()).unwrap();
        assert!(res.is_divergent());
        assert!(res.bracket.1.is_infinite());
    }

    #[test]
    fn invalid_queries_are_domain_errors() {
        let r = Distribution::rademacher();
        assert!(NormQuery::new(&r, OrliczFunction::Psi1, 0.0).is_err());
        assert!(NormQuery::new(&r, OrliczFunction::Psi1, -1.0).is_err());
        assert!(NormQuery::new(&r, OrliczFunction::Psi1, f64::INFINITY).is_err());
        assert!(NormQuery::new(&r, OrliczFunction::Psi1, 1.0)
            .unwrap()
            .with_tolerance(0.0)
            .is_err());
    }

    #[test]
    fn monotone_in_epsilon_and_function_order() {
        let dists = [
            Distribution::rademacher(),
            Distribution::uniform(-1.0, 1.0).unwrap(),
            Distribution::discrete(vec![(-2.0, 0.25), (0.5, 0.5), (1.0, 0.25)]).unwrap(),
        ];
        let eps_grid = [0.05, 0.1, 0.3, 1.0, 2.0];
        for d in &dists {
            let mut last_p1 = f64::INFINITY;
            let mut last_p11 = f64::INFINITY;
            for &eps in &eps_grid {
                let p1 = orlicz_norm_value(d, OrliczFunction::Psi1, eps).unwrap();
                let p11 = orlicz_norm_value(d, OrliczFunction::Psi11, eps).unwrap();
                assert!(p11 <= p1 * (1.0 + 1e-9), "psi11 ≤ psi1 at eps = {eps}");
                assert!(p1 <= last_p1 * (1.0 + 1e-9), "psi1 monotone at eps = {eps}");
                assert!(
                    p11 <= last_p11 * (1.0 + 1e-9),
                    "psi11 monotone at eps = {eps}"
                );
                last_p1 = p1;
                last_p11 = p11;
            }
        }
    }

    #[test]
    fn norm_comparison_gap_with_equality_for_rademacher() {
        let c = special::constant_c();
        let cases = [
            Distribution::rademacher(),
            Distribution::uniform(-1.0, 1.0).unwrap(),
            Distribution::laplace(1.0).unwrap(),
            Distribution::centered_exponential(1.0).unwrap(),
        ];
        for d in &cases {
            let p1 = orlicz_norm_value(d, OrliczFunction::Psi1, 1.0).unwrap();
            let p11 = orlicz_norm_value(d, OrliczFunction::Psi11, 1.0).unwrap();
            assert!(p1 <= c * p11 * (1.0 + 1e-8), "{d:?}");
        }
        let r = Distribution::rademacher();
        let p1 = orlicz_norm_value(&r, OrliczFunction::Psi1, 1.0).unwrap();
        let p11 = orlicz_norm_value(&r, OrliczFunction::Psi11, 1.0).unwrap();
        assert!((p1 - c * p11).abs() < 1e-8, "equality for constant |X|");
    }

    #[test]
    fn triangle_inequality_spot_checks() {
        // X, Y independent discrete; X+Y is the convolution product law.
        let x = Distribution::discrete(vec![(-1.0, 0.5), (1.0, 0.5)]).unwrap();
        let y = Distribution::discrete(vec![(-0.5, 0.25), (0.0, 0.5), (0.5, 0.25)]).unwrap();
        let (Distribution::Discrete { points: px }, Distribution::Discrete { points: py }) =
            (&x, &y)
        else {
            unreachable!()
        };
        let mut conv = std::collections::BTreeMap::new();
        for &(vx, qx) in px {
            for &(vy, qy) in py {
                *conv.entry((vx + vy).to_bits()).or_insert(0.0) += qx * qy;
            }
        }
        let sum = Distribution::discrete(
            conv.into_iter()
                .map(|(v, p)| (f64::from_bits(v), p))
                .collect(),
        )
        .unwrap();
        for f in [OrliczFunction::Psi1, OrliczFunction::Psi11] {
            for eps in [0.3, 1.0] {
                let nx = orlicz_norm_value(&x, f, eps).unwrap();
                let ny = orlicz_norm_value(&y, f, eps).unwrap();
                let ns = orlicz_norm_value(&sum, f, eps).unwrap();
                assert!(ns <= (nx + ny) * (1.0 + 1e-9), "{f} eps={eps}");
            }
        }
    }
}
