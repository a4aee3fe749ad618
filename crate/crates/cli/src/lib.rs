//! Command-line front end: norms, bounds, constants, verification campaigns
//! and CSV sweeps over the bound curves.

// `!(x > 0.0)` rejects NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod sweep;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use subexp_core::bounds::{BoundFamily, NormFamily, SumProfile};
use subexp_core::dist::Distribution;
use subexp_core::orlicz::{orlicz_norm, NormQuery, OrliczFunction};
use subexp_core::verify::{
    check_psi11_asymptotic, check_psi1_asymptotic, domination_campaign, CampaignConfig, TailOracle,
};
use subexp_core::{special, Error as CoreError};

pub use sweep::{sweep_csv, write_sweep, CurveSpec, SweepConfig};

/// CLI failure with its process exit code: 2 parse, 3 divergence, 4 output,
/// 1 anything else.
#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Divergence(String),
    Output(String),
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Other(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Divergence(_) => 3,
            CliError::Output(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Parse(m)
            | CliError::Divergence(m)
            | CliError::Output(m)
            | CliError::Other(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::ParseDistribution(_)
            | CoreError::InvalidDistribution(_)
            | CoreError::Domain(_) => CliError::Parse(e.to_string()),
            other => CliError::Other(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "subexp",
    version,
    about = "Orlicz norms and Bernstein-type tail bounds for sums of independent \
             zero-mean sub-exponential random variables"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Solve the generalized Orlicz norm of a distribution.
    Norm {
        /// Distribution spec: rademacher | uniform:A:B | laplace:S | cexp:R |
        /// discrete:(V,P),(V,P),...
        dist: String,
        /// Orlicz function: psi1 | psi11.
        function: String,
        /// Threshold level (positive; `e-1` is accepted literally).
        epsilon: String,
    },
    /// Evaluate bound curves at chosen x values.
    Bound {
        dist: String,
        /// Number of i.i.d. summands.
        #[arg(long)]
        n: usize,
        /// Threshold level.
        #[arg(long, default_value = "1")]
        eps: String,
        /// Comma-separated families.
        #[arg(long, default_value = "piecewise-psi11")]
        families: String,
        /// Comma-separated x values; defaults to a grid when omitted.
        #[arg(long)]
        x: Option<String>,
        #[arg(long, default_value_t = 3.0)]
        x_max_mult: f64,
        #[arg(long, default_value_t = 11)]
        x_points: usize,
    },
    /// Print the closed-form constants with 10 significant digits.
    Constants,
    /// Regenerate the bound curves as CSV.
    Sweep {
        #[arg(long)]
        dist: Option<String>,
        /// Comma-separated summand counts.
        #[arg(long)]
        n: Option<String>,
        /// Comma-separated threshold levels.
        #[arg(long)]
        eps: Option<String>,
        /// Comma-separated families.
        #[arg(long)]
        families: Option<String>,
        #[arg(long)]
        x_max_mult: Option<f64>,
        #[arg(long)]
        x_points: Option<usize>,
        /// Output CSV path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Flat key=value config file; explicit flags override it.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run the bound-domination campaign against exact or Monte Carlo tails.
    Verify {
        dist: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "0.1,0.3,1")]
        eps: String,
        /// Monte Carlo replications (ignored for rademacher).
        #[arg(long, default_value_t = 100_000)]
        reps: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 3.0)]
        x_max_mult: f64,
        #[arg(long, default_value_t = 101)]
        x_points: usize,
    },
    /// Check the small-threshold norm asymptotics.
    Asymptotics {
        dist: String,
        /// Decreasing comma-separated eps grid.
        #[arg(long, default_value = "1e-2,1e-3,1e-4")]
        eps: String,
    },
}

/// Uniform grid of `points` samples over [0, mult·√n].
pub fn x_grid(n: usize, mult: f64, points: usize) -> Vec<f64> {
    let x_max = mult * (n as f64).sqrt();
    let steps = (points.max(2) - 1) as f64;
    (0..points.max(2))
        .map(|j| x_max * j as f64 / steps)
        .collect()
}

/// Parse a threshold level; accepts the literal `e-1`.
pub fn parse_eps(s: &str) -> Result<f64, CliError> {
    if s == "e-1" {
        return Ok(std::f64::consts::E - 1.0);
    }
    s.trim()
        .parse()
        .map_err(|_| CliError::Parse(format!("bad threshold level `{s}`")))
}

pub fn parse_eps_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',').map(parse_eps).collect()
}

pub fn parse_usize_list(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| CliError::Parse(format!("bad count `{t}`")))
        })
        .collect()
}

pub fn parse_families(s: &str) -> Result<Vec<CurveSpec>, CliError> {
    s.split(',').map(|t| t.trim().parse()).collect()
}

fn parse_dist(s: &str) -> Result<Distribution, CliError> {
    s.parse()
        .map_err(|e: CoreError| CliError::Parse(e.to_string()))
}

/// 10 significant digits for console tables.
fn sig10(v: f64) -> String {
    format!("{v:.9e}")
}

/// Run a parsed command; returns the process exit code.
pub fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Norm {
            dist,
            function,
            epsilon,
        } => cmd_norm(&dist, &function, &epsilon),
        Command::Bound {
            dist,
            n,
            eps,
            families,
            x,
            x_max_mult,
            x_points,
        } => cmd_bound(
            &dist,
            n,
            &eps,
            &families,
            x.as_deref(),
            x_max_mult,
            x_points,
        ),
        Command::Constants => cmd_constants(),
        Command::Sweep {
            dist,
            n,
            eps,
            families,
            x_max_mult,
            x_points,
            out,
            config,
        } => cmd_sweep(dist, n, eps, families, x_max_mult, x_points, out, config),
        Command::Verify {
            dist,
            n,
            eps,
            reps,
            seed,
            x_max_mult,
            x_points,
        } => cmd_verify(&dist, n, &eps, reps, seed, x_max_mult, x_points),
        Command::Asymptotics { dist, eps } => cmd_asymptotics(&dist, &eps),
    }
}

fn cmd_norm(dist: &str, function: &str, epsilon: &str) -> Result<i32, CliError> {
    let d = parse_dist(dist)?;
    let f: OrliczFunction = function.parse().map_err(CliError::from)?;
    let eps = parse_eps(epsilon)?;
    let query = NormQuery::new(&d, f, eps).map_err(CliError::from)?;
    let result = orlicz_norm(&query).map_err(CliError::from)?;
    if result.is_divergent() {
        println!("norm         inf");
        println!("bracket      [{}, inf)", result.bracket.0);
        println!("evaluations  {}", result.evaluations);
        return Err(CliError::Divergence(format!(
            "E {f}(|X|/x) stays above {eps:e} beyond the expansion cap"
        )));
    }
    println!("norm         {}", sig10(result.value));
    println!("bracket      [{}, {}]", result.bracket.0, result.bracket.1);
    println!("evaluations  {}", result.evaluations);
    Ok(0)
}

fn cmd_constants() -> Result<i32, CliError> {
    let c = special::constant_c();
    let u = special::u_star();
    let (eps, objective) = special::eps_star();
    let rows = [
        ("C", c),
        ("C^2", c * c),
        ("u*", u),
        ("4/u*^2", 4.0 / (u * u)),
        ("eps*", eps),
        ("4 eps* g(eps*)^2", objective),
        ("c1 = 2e-1", special::chafai_c1()),
        ("c2 = (2e-1)/(2e-2)", special::chafai_c2()),
    ];
    for (name, value) in rows {
        println!("{name:<20} {}", sig10(value));
    }
    Ok(0)
}

fn cmd_bound(
    dist: &str,
    n: usize,
    eps: &str,
    families: &str,
    x: Option<&str>,
    x_max_mult: f64,
    x_points: usize,
) -> Result<i32, CliError> {
    let d = parse_dist(dist)?;
    let eps = parse_eps(eps)?;
    let families = parse_families(families)?;
    let e1 = std::f64::consts::E - 1.0;
    if families.iter().any(|f| f.family == BoundFamily::Chafai) && (eps - e1).abs() > 1e-9 * e1 {
        return Err(CliError::Parse(
            "family chafai is defined only at eps = e-1".into(),
        ));
    }
    let xs: Vec<f64> = match x {
        Some(list) => list
            .split(',')
            .map(|t| {
                t.trim()
                    .parse()
                    .map_err(|_| CliError::Parse(format!("bad x value `{t}`")))
            })
            .collect::<Result<_, _>>()?,
        None => x_grid(n, x_max_mult, x_points),
    };
    if xs.iter().any(|&x| !(x >= 0.0)) {
        return Err(CliError::Parse("x values must be nonnegative".into()));
    }

    println!(
        "{:<20} {:>14} {:>16} {:>16}",
        "family", "x", "bound", "log_bound"
    );
    for fam in &families {
        let profile = profile_for(&d, fam, eps, n)?;
        for &x in &xs {
            let log_bound = log_bound_of(fam.family, &profile, x)?;
            println!(
                "{:<20} {:>14} {:>16} {:>16}",
                fam.to_string(),
                format!("{x:.6}"),
                sig10(log_bound.exp()),
                sig10(log_bound)
            );
        }
    }
    Ok(0)
}

fn profile_for(
    d: &Distribution,
    fam: &CurveSpec,
    eps: f64,
    n: usize,
) -> Result<SumProfile, CliError> {
    let (f, eps) = match fam.family {
        BoundFamily::ClassicalMgfChernoff => (OrliczFunction::Psi1, 1.0),
        _ => (
            match fam.norms {
                NormFamily::Psi11Based => OrliczFunction::Psi11,
                NormFamily::Psi1Based => OrliczFunction::Psi1,
            },
            eps,
        ),
    };
    SumProfile::iid(d, f, eps, n).map_err(CliError::from)
}

fn log_bound_of(family: BoundFamily, profile: &SumProfile, x: f64) -> Result<f64, CliError> {
    let v = match family {
        BoundFamily::Piecewise => profile.log_tail_piecewise(x),
        BoundFamily::MinForm => profile.log_tail_minform(x),
        BoundFamily::Chafai => profile.log_tail_chafai(x).map_err(CliError::from)?,
        BoundFamily::ClassicalMgfChernoff => profile
            .log_tail_classical_chernoff(x)
            .map_err(CliError::from)?,
    };
    Ok(v)
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    dist: Option<String>,
    n: Option<String>,
    eps: Option<String>,
    families: Option<String>,
    x_max_mult: Option<f64>,
    x_points: Option<usize>,
    out: Option<PathBuf>,
    config: Option<PathBuf>,
) -> Result<i32, CliError> {
    let mut cfg = SweepConfig::default();
    if let Some(path) = config {
        let contents = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Parse(format!("cannot read config {}: {e}", path.display())))?;
        cfg.apply_config_file(&contents)?;
    }
    if let Some(d) = dist {
        cfg.dist_spec = d;
    }
    if let Some(n) = n {
        cfg.n_list = parse_usize_list(&n)?;
    }
    if let Some(e) = eps {
        cfg.eps_list = parse_eps_list(&e)?;
    }
    if let Some(f) = families {
        cfg.families = parse_families(&f)?;
    }
    if let Some(m) = x_max_mult {
        cfg.x_max_multiplier = m;
    }
    if let Some(p) = x_points {
        cfg.x_points = p;
    }
    if let Some(o) = out {
        cfg.output_path = o;
    }
    write_sweep(&cfg)?;
    let rows = cfg.n_list.len() * cfg.eps_list.len() * cfg.families.len() * cfg.x_points;
    println!("wrote {} ({} rows)", cfg.output_path.display(), rows);
    Ok(0)
}

fn cmd_verify(
    dist: &str,
    n: usize,
    eps: &str,
    reps: u64,
    seed: u64,
    x_max_mult: f64,
    x_points: usize,
) -> Result<i32, CliError> {
    let d = parse_dist(dist)?;
    let cfg = CampaignConfig {
        n,
        eps_list: parse_eps_list(eps)?,
        x_grid: x_grid(n, x_max_mult, x_points),
        mc_reps: reps,
        seed,
    };
    let report = domination_campaign(&d, &cfg).map_err(CliError::from)?;

    match report.oracle {
        TailOracle::ExactBinomial => println!("oracle: exact binomial tail"),
        TailOracle::MonteCarlo { reps, seed } => {
            println!("oracle: monte carlo (reps={reps}, seed={seed})")
        }
    }
    println!(
        "{:<10} {:<18} {:>6} {:>11} {:>14}",
        "eps", "family", "cells", "violations", "min gap"
    );
    for &eps in &cfg.eps_list {
        for family in [
            BoundFamily::Piecewise,
            BoundFamily::MinForm,
            BoundFamily::Chafai,
        ] {
            for norms in [NormFamily::Psi11Based, NormFamily::Psi1Based] {
                let cells: Vec<_> = report
                    .cells
                    .iter()
                    .filter(|c| c.epsilon == eps && c.family == family && c.norm_family == norms)
                    .collect();
                if cells.is_empty() {
                    continue;
                }
                let violations = cells.iter().filter(|c| c.violation).count();
                let min_gap = cells
                    .iter()
                    .map(|c| c.bound - (c.reference - c.margin))
                    .fold(f64::INFINITY, f64::min);
                let name = CurveSpec { family, norms };
                println!(
                    "{:<10} {:<18} {:>6} {:>11} {:>14.6e}",
                    eps,
                    name.to_string(),
                    cells.len(),
                    violations,
                    min_gap
                );
            }
        }
    }
    for cell in report.cells.iter().filter(|c| c.violation) {
        println!(
            "VIOLATION eps={} family={} x={} reference={} margin={} bound={}",
            cell.epsilon,
            CurveSpec {
                family: cell.family,
                norms: cell.norm_family
            },
            cell.x,
            cell.reference,
            cell.margin,
            cell.bound
        );
    }
    if report.is_clean() {
        println!("verdict: no violations");
        Ok(0)
    } else {
        println!("verdict: {} violations", report.violations);
        Ok(1)
    }
}

fn cmd_asymptotics(dist: &str, eps: &str) -> Result<i32, CliError> {
    let d = parse_dist(dist)?;
    let grid = parse_eps_list(eps)?;
    let checks = [
        check_psi1_asymptotic(&d, &grid).map_err(CliError::from)?,
        check_psi11_asymptotic(&d, &grid).map_err(CliError::from)?,
    ];
    for check in checks {
        let label = match check.quantity {
            subexp_core::verify::AsymptoticQuantity::Psi1NormTimesEps => {
                "eps * norm(psi1; eps)  ->  E|X|"
            }
            subexp_core::verify::AsymptoticQuantity::Psi11NormTimesSqrtEps => {
                "sqrt(eps) * norm(psi11; eps)  ->  sqrt(E X^2 / 2)"
            }
        };
        println!("{label}");
        println!("  limit = {}", sig10(check.limit));
        for ((&eps, &obs), err) in check
            .eps_grid
            .iter()
            .zip(&check.observed)
            .zip(check.relative_errors())
        {
            println!(
                "  eps = {eps:<8} observed = {} rel err = {err:.3e}",
                sig10(obs)
            );
        }
        println!(
            "  trend: {}",
            if check.trend_is_monotone() {
                "monotone"
            } else {
                "NOT monotone"
            }
        );
    }
    Ok(0)
}
