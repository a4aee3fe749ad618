//! Numerical limit checks for the small-threshold asymptotics and
//! bound-domination campaigns against exact or Monte Carlo reference tails.

use rayon::prelude::*;

use crate::bounds::{BoundFamily, NormFamily, SumProfile};
use crate::dist::{exact_tail_rademacher_sum, Distribution};
use crate::orlicz::{orlicz_norm_value, OrliczFunction};
use crate::{Error, Result};

/// Which scaled norm is driven to its limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AsymptoticQuantity {
    /// ε·‖X‖_{ψ₁;ε} → E|X| as ε ↓ 0.
    Psi1NormTimesEps,
    /// √ε·‖X‖_{ψ₁₁;ε} → √(E X²/2) as ε ↓ 0.
    Psi11NormTimesSqrtEps,
}

/// Observed values of a scaled norm along a decreasing ε grid, against the
/// claimed limit.
#[derive(Debug, Clone)]
pub struct AsymptoticCheck {
    pub quantity: AsymptoticQuantity,
    pub eps_grid: Vec<f64>,
    pub limit: f64,
    pub observed: Vec<f64>,
}

impl AsymptoticCheck {
    pub fn relative_errors(&self) -> Vec<f64> {
        self.observed
            .iter()
            .map(|o| (o - self.limit).abs() / self.limit.abs().max(1e-300))
            .collect()
    }

    /// |observed − limit| nonincreasing over the last three grid points.
    pub fn trend_is_monotone(&self) -> bool {
        let errs = self.relative_errors();
        let tail = if errs.len() >= 3 {
            &errs[errs.len() - 3..]
        } else {
            &errs[..]
        };
        tail.windows(2).all(|w| w[1] <= w[0])
    }
}

fn validate_eps_grid(eps_grid: &[f64]) -> Result<()> {
    if eps_grid.is_empty() || eps_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Domain(
            "eps grid must be nonempty and strictly decreasing".into(),
        ));
    }
    Ok(())
}

/// ε·‖X‖_{ψ₁;ε} along the grid; the limit is E|X|.
pub fn check_psi1_asymptotic(d: &Distribution, eps_grid: &[f64]) -> Result<AsymptoticCheck> {
    validate_eps_grid(eps_grid)?;
    if !(d.mean_abs() > 0.0) {
        return Err(Error::Domain("E|X| must be positive".into()));
    }
    let observed = eps_grid
        .iter()
        .map(|&eps| Ok(eps * orlicz_norm_value(d, OrliczFunction::Psi1, eps)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(AsymptoticCheck {
        quantity: AsymptoticQuantity::Psi1NormTimesEps,
        eps_grid: eps_grid.to_vec(),
        limit: d.mean_abs(),
        observed,
    })
}

/// √ε·‖X‖_{ψ₁₁;ε} along the grid; the limit is √(E X²/2).
pub fn check_psi11_asymptotic(d: &Distribution, eps_grid: &[f64]) -> Result<AsymptoticCheck> {
    validate_eps_grid(eps_grid)?;
    if !(d.second_moment() > 0.0) {
        return Err(Error::Domain("E X² must be positive".into()));
    }
    let observed = eps_grid
        .iter()
        .map(|&eps| Ok(eps.sqrt() * orlicz_norm_value(d, OrliczFunction::Psi11, eps)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(AsymptoticCheck {
        quantity: AsymptoticQuantity::Psi11NormTimesSqrtEps,
        eps_grid: eps_grid.to_vec(),
        limit: (d.second_moment() / 2.0).sqrt(),
        observed,
    })
}

/// How the campaign obtained its reference tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailOracle {
    /// Exact binomial tail (Rademacher summands only).
    ExactBinomial,
    /// Empirical tail over `reps` independent sums.
    MonteCarlo { reps: u64, seed: u64 },
}

/// Campaign parameters. `mc_reps`/`seed` are ignored when the summand is
/// Rademacher, where the exact binomial oracle applies.
#[derive(Debug, Clone)]
pub struct CampaignConfig {
    pub n: usize,
    pub eps_list: Vec<f64>,
    pub x_grid: Vec<f64>,
    pub mc_reps: u64,
    pub seed: u64,
}

/// One evaluated (ε, family, x) cell.
#[derive(Debug, Clone)]
pub struct CampaignCell {
    pub epsilon: f64,
    pub family: BoundFamily,
    pub norm_family: NormFamily,
    pub x: f64,
    pub reference: f64,
    /// Statistical margin subtracted from the reference (4 standard errors
    /// for Monte Carlo, 0 for the exact oracle).
    pub margin: f64,
    pub bound: f64,
    pub violation: bool,
}

/// Full campaign output.
#[derive(Debug, Clone)]
pub struct CampaignReport {
    pub oracle: TailOracle,
    pub cells: Vec<CampaignCell>,
    pub violations: usize,
}

impl CampaignReport {
    pub fn is_clean(&self) -> bool {
        self.violations == 0
    }
}

/// Evaluate every bound family over the (ε, x) grid for sums of n i.i.d.
/// copies of `d`, compare against the reference tail, and flag violations of
/// reference − margin ≤ bound.
///
/// Families per ε: piecewise and min-form on ψ₁₁ norms, piecewise and
/// min-form on ψ₁ norms, plus the comparison bound when ε = e−1.
pub fn domination_campaign(d: &Distribution, cfg: &CampaignConfig) -> Result<CampaignReport> {
    if cfg.n == 0 {
        return Err(Error::Domain("campaign requires n ≥ 1".into()));
    }
    if d.mean().abs() > 1e-12 {
        return Err(Error::Domain(format!(
            "campaign requires a zero-mean summand, got mean {}",
            d.mean()
        )));
    }

    let exact = d.is_rademacher();
    let oracle = if exact {
        TailOracle::ExactBinomial
    } else {
        TailOracle::MonteCarlo {
            reps: cfg.mc_reps,
            seed: cfg.seed,
        }
    };

    // Empirical sums are threshold-independent: sample once, reuse per cell.
    let sorted_sums = if exact {
        Vec::new()
    } else {
        sorted_mc_sums(d, cfg.n, cfg.mc_reps, cfg.seed)
    };
    let reference = |x: f64| -> (f64, f64) {
        if exact {
            (exact_tail_rademacher_sum(cfg.n, x), 0.0)
        } else {
            let reps = sorted_sums.len() as f64;
            let idx = sorted_sums.partition_point(|&s| s < x);
            let p = (sorted_sums.len() - idx) as f64 / reps;
            (p, 4.0 * (p * (1.0 - p) / reps).sqrt())
        }
    };

    let e1 = std::f64::consts::E - 1.0;
    let mut cells = Vec::new();
    for &eps in &cfg.eps_list {
        let p11 = SumProfile::iid(d, OrliczFunction::Psi11, eps, cfg.n)?;
        let p1 = SumProfile::iid(d, OrliczFunction::Psi1, eps, cfg.n)?;
        let mut curves: Vec<(BoundFamily, NormFamily, &SumProfile)> = vec![
            (BoundFamily::Piecewise, NormFamily::Psi11Based, &p11),
            (BoundFamily::MinForm, NormFamily::Psi11Based, &p11),
            (BoundFamily::Piecewise, NormFamily::Psi1Based, &p1),
            (BoundFamily::MinForm, NormFamily::Psi1Based, &p1),
        ];
        if (eps - e1).abs() <= 1e-9 * e1 {
            curves.push((BoundFamily::Chafai, NormFamily::Psi1Based, &p1));
        }
        for (family, norm_family, profile) in curves {
            for &x in &cfg.x_grid {
                let log_bound = match family {
                    BoundFamily::Piecewise => profile.log_tail_piecewise(x),
                    BoundFamily::MinForm => profile.log_tail_minform(x),
                    BoundFamily::Chafai => profile.log_tail_chafai(x)?,
                    BoundFamily::ClassicalMgfChernoff => profile.log_tail_classical_chernoff(x)?,
                };
                let bound = log_bound.exp();
                let (reference, margin) = reference(x);
                let violation = reference - margin > bound * (1.0 + 1e-12);
                cells.push(CampaignCell {
                    epsilon: eps,
                    family,
                    norm_family,
                    x,
                    reference,
                    margin,
                    bound,
                    violation,
                });
            }
        }
    }

    let violations = cells.iter().filter(|c| c.violation).count();
    Ok(CampaignReport {
        oracle,
        cells,
        violations,
    })
}

/// `reps` independent sums of n draws, sorted ascending. Work is batched so
/// each batch owns a dedicated ChaCha stream; the result is independent of
/// thread scheduling.
pub fn sorted_mc_sums(d: &Distribution, n: usize, reps: u64, seed: u64) -> Vec<f64> {
    const BATCH: u64 = 4096;
    let batches = reps.div_ceil(BATCH);
    let mut sums: Vec<f64> = (0..batches)
        .into_par_iter()
        .flat_map_iter(|b| {
            let count = BATCH.min(reps - b * BATCH) as usize;
            let draws = d.sample_stream(count * n, seed, b);
            (0..count)
                .map(|i| draws[i * n..(i + 1) * n].iter().sum::<f64>())
                .collect::<Vec<_>>()
        })
        .collect();
    sums.par_sort_unstable_by(f64::total_cmp);
    sums
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rademacher_psi1_asymptotic_is_analytic() {
        // ε·g(ε) = ε/ln(1+ε) → 1 = E|X|.
        let r = Distribution::rademacher();
        let grid = [1e-1, 1e-2, 1e-3];
        let check = check_psi1_asymptotic(&r, &grid).unwrap();
        assert_eq!(check.limit, 1.0);
        for (&eps, &obs) in grid.iter().zip(&check.observed) {
            let want = eps / eps.ln_1p();
            assert!((obs - want).abs() < 1e-8 * want, "eps = {eps}");
        }
        assert!(check.trend_is_monotone());
    }

    #[test]
    fn psi11_asymptotic_limits() {
        let grid = [1e-1, 1e-2];
        let cases = [
            (Distribution::rademacher(), (0.5f64).sqrt()),
            (
                Distribution::uniform(-1.0, 1.0).unwrap(),
                (1.0f64 / 6.0).sqrt(),
            ),
        ];
        for (d, want) in cases {
            let check = check_psi11_asymptotic(&d, &grid).unwrap();
            assert!((check.limit - want).abs() < 1e-15);
            let last = *check.observed.last().unwrap();
            assert!((last - want).abs() / want < 0.1, "{d:?}: {last} vs {want}");
        }
    }

    #[test]
    fn eps_grid_must_decrease() {
        let r = Distribution::rademacher();
        assert!(check_psi1_asymptotic(&r, &[]).is_err());
        assert!(check_psi1_asymptotic(&r, &[0.1, 0.1]).is_err());
        assert!(check_psi1_asymptotic(&r, &[0.1, 0.5]).is_err());
    }

    #[test]
    fn exact_campaign_is_clean() {
        let r = Distribution::rademacher();
        let n = 10;
        let x_grid: Vec<f64> = (0..=30)
            .map(|j| j as f64 / 30.0 * 3.0 * (n as f64).sqrt())
            .collect();
        let cfg = CampaignConfig {
            n,
            eps_list: vec![0.1, 0.3, 1.0, std::f64::consts::E - 1.0],
            x_grid,
            mc_reps: 0,
            seed: 0,
        };
        let report = domination_campaign(&r, &cfg).unwrap();
        assert_eq!(report.oracle, TailOracle::ExactBinomial);
        assert!(report.is_clean(), "{} violations", report.violations);
        // e−1 in the list means the comparison bound joined the families.
        assert!(report.cells.iter().any(|c| c.family == BoundFamily::Chafai));
    }

    #[test]
    fn monte_carlo_campaign_is_clean_and_reproducible() {
        let u = Distribution::uniform(-1.0, 1.0).unwrap();
        let n = 10;
        let x_grid: Vec<f64> = (0..=20)
            .map(|j| j as f64 / 20.0 * 3.0 * (n as f64).sqrt())
            .collect();
        let cfg = CampaignConfig {
            n,
            eps_list: vec![1.0],
            x_grid,
            mc_reps: 100_000,
            seed: 42,
        };
        let r1 = domination_campaign(&u, &cfg).unwrap();
        let r2 = domination_campaign(&u, &cfg).unwrap();
        assert!(r1.is_clean(), "{} violations", r1.violations);
        for (a, b) in r1.cells.iter().zip(&r2.cells) {
            assert_eq!(a.reference, b.reference);
        }
    }

    #[test]
    fn campaign_rejects_non_centered_and_degenerate() {
        let cfg = CampaignConfig {
            n: 5,
            eps_list: vec![1.0],
            x_grid: vec![0.0, 1.0],
            mc_reps: 100,
            seed: 1,
        };
        let shifted = Distribution::discrete(vec![(0.0, 0.5), (1.0, 0.5)]).unwrap();
        assert!(domination_campaign(&shifted, &cfg).is_err());
        // A point mass at zero has zero norms: degenerate profile.
        let zero = Distribution::point_mass(0.0);
        assert!(matches!(
            domination_campaign(&zero, &cfg),
            Err(Error::DegenerateProfile(_))
        ));
    }

    #[test]
    fn mc_sums_are_deterministic_across_batch_counts() {
        let l = Distribution::laplace(1.0).unwrap();
        let s1 = sorted_mc_sums(&l, 3, 10_000, 7);
        let s2 = sorted_mc_sums(&l, 3, 10_000, 7);
        assert_eq!(s1, s2);
        assert_eq!(s1.len(), 10_000);
        let s3 = sorted_mc_sums(&l, 3, 10_000, 8);
        assert_ne!(s1, s3);
    }

    #[test]
    fn norm_ratio_vanishes_with_epsilon() {
        // ‖X‖_{ψ₁₁;ε} = o(‖X‖_{ψ₁;ε}): at ε = 1e-4 the ratio is below 0.05
        // and below its value at ε = 1e-2, for every built-in law.
        let dists = [
            Distribution::rademacher(),
            Distribution::uniform(-1.0, 1.0).unwrap(),
            Distribution::laplace(1.0).unwrap(),
            Distribution::centered_exponential(1.0).unwrap(),
        ];
        for d in &dists {
            let ratio = |eps: f64| {
                let p11 = orlicz_norm_value(d, OrliczFunction::Psi11, eps).unwrap();
                let p1 = orlicz_norm_value(d, OrliczFunction::Psi1, eps).unwrap();
                p11 / p1
            };
            let coarse = ratio(1e-2);
            let fine = ratio(1e-4);
            assert!(fine < coarse && fine < 0.05, "{d:?}: {coarse} -> {fine}");
        }
    }
}
