//! Real branches of the Lambert W function and the closed-form constants
//! built on them.
//!
//! `W` inverts w ↦ w·eʷ. The principal branch maps (−e⁻¹, ∞) → (−1, ∞) and
//! the (−1)th branch maps (−e⁻¹, 0) → (−∞, −1); the shared branch point
//! −e⁻¹ maps to exactly −1. Evaluation is Halley's iteration from a
//! branch-appropriate initial guess, converged to |w·eʷ − z| ≤ 1e−14·max(|z|, 1).
//!
//! Every derived constant is also cross-checked in the tests by an
//! independent root-finding or minimization oracle, so a W regression cannot
//! silently corrupt downstream numbers.

use crate::{Error, Result};

/// Residual target for the defining identity w·eʷ = z.
const RESIDUAL_TOL: f64 = 1e-14;

const MAX_ITERATIONS: usize = 60;

/// Real branch selector for [`lambert_w`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambertBranch {
    /// W₀: domain [−e⁻¹, ∞), range [−1, ∞).
    Principal,
    /// W₋₁: domain [−e⁻¹, 0), range (−∞, −1].
    MinusOne,
}

fn neg_inv_e() -> f64 {
    -(-1.0f64).exp()
}

/// Lambert W on the requested real branch.
///
/// Returns a domain error when `z` lies outside the branch's domain. The
/// branch point −e⁻¹ is mapped to exactly −1.
pub fn lambert_w(branch: LambertBranch, z: f64) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::Domain(format!("lambert_w: z = {z} is not finite")));
    }
    let br = neg_inv_e();
    if z < br {
        return Err(Error::Domain(format!(
            "lambert_w: z = {z} below the branch point -1/e = {br}"
        )));
    }
    if z == br {
        return Ok(-1.0);
    }
    match branch {
        LambertBranch::Principal => {
            if z == 0.0 {
                return Ok(0.0);
            }
            Ok(halley(z, principal_guess(z), branch))
        }
        LambertBranch::MinusOne => {
            if z >= 0.0 {
                return Err(Error::Domain(format!(
                    "lambert_w: branch -1 requires z in (-1/e, 0), got {z}"
                )));
            }
            Ok(halley(z, minus_one_guess(z), branch))
        }
    }
}

fn principal_guess(z: f64) -> f64 {
    if z < -0.3 {
        // Branch-point expansion: w = -1 + p - p²/3 + O(p³), p = √(2(ez+1)).
        let p = (2.0 * (std::f64::consts::E * z + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0
    } else if z < 3.0 {
        // Series around 0: w = z(1 - z + 3z²/2 - ...); crude but inside the
        // Halley basin everywhere on (-0.3, 3).
        z * (1.0 - z).clamp(0.05, 1.0)
    } else {
        let l1 = z.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    }
}

fn minus_one_guess(z: f64) -> f64 {
    if z < -0.27 {
        let p = (2.0 * (std::f64::consts::E * z + 1.0)).max(0.0).sqrt();
        -1.0 - p - p * p / 3.0
    } else {
        // Asymptotic for z → 0⁻: w = L1 - L2 + L2/L1, L1 = ln(-z), L2 = ln(-L1).
        let l1 = (-z).ln();
        let l2 = (-l1).ln();
        l1 - l2 + l2 / l1
    }
}

fn halley(z: f64, guess: f64, branch: LambertBranch) -> f64 {
    let mut w = guess;
    // Keep iterates on the correct side of the branch cut.
    let clamp = |w: f64| match branch {
        LambertBranch::Principal => w.max(-1.0 + 1e-300),
        LambertBranch::MinusOne => w.min(-1.0 - 1e-300),
    };
    w = clamp(w);
    let tol = RESIDUAL_TOL * z.abs().max(1e-300);
    for _ in 0..MAX_ITERATIONS {
        let ew = w.exp();
        let f = w * ew - z;
        if f.abs() <= tol {
            break;
        }
        // Halley step for f(w) = w eʷ - z.
        let denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * (w + 1.0));
        let step = f / denom;
        let next = clamp(w - step);
        if next == w {
            break;
        }
        w = next;
    }
    w
}

/// The sharp constant C = −(W₋₁(−e⁻²) + 2)/ln 2 relating the two norms:
/// ‖X‖_{ψ₁} ≤ C·‖X‖_{ψ₁₁}, with equality when |X| is constant.
pub fn constant_c() -> f64 {
    u_star() / std::f64::consts::LN_2
}

/// u_* = ψ₁₁⁻¹(1) = −(W₋₁(−e⁻²) + 2); the reciprocal of the Rademacher
/// ψ₁₁-norm at threshold 1.
pub fn u_star() -> f64 {
    let w = lambert_w(LambertBranch::MinusOne, -(-2.0f64).exp())
        .expect("-e^-2 is interior to the W_{-1} domain");
    -(w + 2.0)
}

/// Minimizer ε_* of ε·g(ε)² with g(ε) = 1/ln(1+ε), together with the
/// objective value 4·ε_*·g(ε_*)².
///
/// ε_* = e^{W(−2e⁻²)+2} − 1; the objective is the best denominator constant
/// achievable from ψ₁ norms in the Gaussian branch of the tail bound.
pub fn eps_star() -> (f64, f64) {
    let w = lambert_w(LambertBranch::Principal, -2.0 * (-2.0f64).exp())
        .expect("-2e^-2 is interior to the principal domain");
    let eps = (w + 2.0).exp_m1();
    let g = 1.0 / eps.ln_1p();
    (eps, 4.0 * eps * g * g)
}

/// c₁ = 2e − 1, the max-norm inflation factor of the comparison bound.
pub fn chafai_c1() -> f64 {
    2.0 * std::f64::consts::E - 1.0
}

/// c₂ = (2e − 1)/(2e − 2), the variance-proxy inflation factor of the
/// comparison bound.
pub fn chafai_c2() -> f64 {
    (2.0 * std::f64::consts::E - 1.0) / (2.0 * std::f64::consts::E - 2.0)
}
