//! CSV sweep: tabulate bound curves over (n, ε, family, x) grids.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use subexp_core::bounds::{BoundFamily, NormFamily, SumProfile};
use subexp_core::dist::Distribution;
use subexp_core::orlicz::{orlicz_norm_value, OrliczFunction};

use crate::{x_grid, CliError};

/// A named bound curve: which bound formula over which norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CurveSpec {
    pub family: BoundFamily,
    pub norms: NormFamily,
}

impl CurveSpec {
    pub const PIECEWISE_PSI11: CurveSpec = CurveSpec {
        family: BoundFamily::Piecewise,
        norms: NormFamily::Psi11Based,
    };
    pub const PIECEWISE_PSI1: CurveSpec = CurveSpec {
        family: BoundFamily::Piecewise,
        norms: NormFamily::Psi1Based,
    };
}

impl std::fmt::Display for CurveSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match (self.family, self.norms) {
            (BoundFamily::Piecewise, NormFamily::Psi11Based) => "piecewise-psi11",
            (BoundFamily::Piecewise, NormFamily::Psi1Based) => "piecewise-psi1",
            (BoundFamily::MinForm, NormFamily::Psi11Based) => "minform-psi11",
            (BoundFamily::MinForm, NormFamily::Psi1Based) => "minform-psi1",
            (BoundFamily::Chafai, _) => "chafai",
            (BoundFamily::ClassicalMgfChernoff, _) => "classical-chernoff",
        };
        f.write_str(name)
    }
}

impl std::str::FromStr for CurveSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let spec = match s {
            "piecewise-psi11" => CurveSpec::PIECEWISE_PSI11,
            "piecewise-psi1" => CurveSpec::PIECEWISE_PSI1,
            "minform-psi11" => CurveSpec {
                family: BoundFamily::MinForm,
                norms: NormFamily::Psi11Based,
            },
            "minform-psi1" => CurveSpec {
                family: BoundFamily::MinForm,
                norms: NormFamily::Psi1Based,
            },
            "chafai" => CurveSpec {
                family: BoundFamily::Chafai,
                norms: NormFamily::Psi1Based,
            },
            "classical-chernoff" => CurveSpec {
                family: BoundFamily::ClassicalMgfChernoff,
                norms: NormFamily::Psi1Based,
            },
            other => {
                return Err(CliError::Parse(format!(
                    "unknown bound family `{other}` (expected piecewise-psi11, piecewise-psi1, \
                     minform-psi11, minform-psi1, chafai or classical-chernoff)"
                )))
            }
        };
        Ok(spec)
    }
}

/// Sweep parameters. The x grid is uniform over [0, x_max_multiplier·√n]
/// with x_points samples, per n.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub dist_spec: String,
    pub n_list: Vec<usize>,
    pub eps_list: Vec<f64>,
    pub x_max_multiplier: f64,
    pub x_points: usize,
    pub families: Vec<CurveSpec>,
    pub output_path: PathBuf,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            dist_spec: "rademacher".into(),
            n_list: vec![10, 100],
            eps_list: vec![0.1, 0.3, 1.0],
            x_max_multiplier: 3.0,
            x_points: 301,
            families: vec![CurveSpec::PIECEWISE_PSI11, CurveSpec::PIECEWISE_PSI1],
            output_path: PathBuf::from("sweep.csv"),
        }
    }
}

impl SweepConfig {
    /// Apply a flat key=value file on top of this config. Lines that are
    /// empty or start with `#` are ignored. Keys: dist, n, eps, families,
    /// x_max_mult, x_points, out.
    pub fn apply_config_file(&mut self, contents: &str) -> Result<(), CliError> {
        for raw in contents.lines() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Parse(format!("config line `{line}` is not key=value")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "dist" => self.dist_spec = value.to_string(),
                "n" => self.n_list = crate::parse_usize_list(value)?,
                "eps" => self.eps_list = crate::parse_eps_list(value)?,
                "families" => self.families = crate::parse_families(value)?,
                "x_max_mult" => {
                    self.x_max_multiplier = value
                        .parse()
                        .map_err(|_| CliError::Parse(format!("bad x_max_mult `{value}`")))?
                }
                "x_points" => {
                    self.x_points = value
                        .parse()
                        .map_err(|_| CliError::Parse(format!("bad x_points `{value}`")))?
                }
                "out" => self.output_path = PathBuf::from(value),
                other => {
                    return Err(CliError::Parse(format!("unknown config key `{other}`")));
                }
            }
        }
        Ok(())
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.n_list.is_empty() || self.eps_list.is_empty() || self.families.is_empty() {
            return Err(CliError::Parse(
                "sweep needs at least one n, one eps and one family".into(),
            ));
        }
        if self.x_points < 2 {
            return Err(CliError::Parse("x_points must be at least 2".into()));
        }
        if !(self.x_max_multiplier > 0.0) {
            return Err(CliError::Parse("x_max_mult must be positive".into()));
        }
        let e1 = std::f64::consts::E - 1.0;
        let wants_chafai = self
            .families
            .iter()
            .any(|f| f.family == BoundFamily::Chafai);
        if wants_chafai && self.eps_list.iter().any(|&e| (e - e1).abs() > 1e-9 * e1) {
            return Err(CliError::Parse(
                "family chafai is defined only at eps = e-1".into(),
            ));
        }
        Ok(())
    }
}

/// Render the sweep as CSV, header `n,eps,family,x,bound,log_bound`, one row
/// per (n, ε, family, x), LF line endings and shortest round-trip decimals.
/// Deterministic for a fixed config.
pub fn sweep_csv(cfg: &SweepConfig) -> Result<String, CliError> {
    cfg.validate()?;
    let dist: Distribution = cfg
        .dist_spec
        .parse()
        .map_err(|e| CliError::Parse(format!("{e}")))?;

    // Norm cache: (psi11?, eps bits) → summand norm. Norms do not depend on n.
    let mut norms: HashMap<(bool, u64), f64> = HashMap::new();
    let mut norm_for = |f: OrliczFunction, eps: f64| -> Result<f64, CliError> {
        let key = (f == OrliczFunction::Psi11, eps.to_bits());
        if let Some(&v) = norms.get(&key) {
            return Ok(v);
        }
        let v = orlicz_norm_value(&dist, f, eps).map_err(CliError::from)?;
        if !v.is_finite() {
            return Err(CliError::Divergence(format!(
                "norm of {} under {f} at eps = {eps} diverged",
                cfg.dist_spec
            )));
        }
        norms.insert(key, v);
        Ok(v)
    };

    let mut csv = String::from("n,eps,family,x,bound,log_bound\n");
    for &n in &cfg.n_list {
        let grid = x_grid(n, cfg.x_max_multiplier, cfg.x_points);
        for &eps in &cfg.eps_list {
            for fam in &cfg.families {
                let profile = match fam.family {
                    // The classical curve has no threshold: K₄ = ψ₁ norm at 1.
                    BoundFamily::ClassicalMgfChernoff => {
                        let norm = norm_for(OrliczFunction::Psi1, 1.0)?;
                        SumProfile::from_norms(&vec![norm; n], 1.0, NormFamily::Psi1Based)
                    }
                    _ => {
                        let f = match fam.norms {
                            NormFamily::Psi11Based => OrliczFunction::Psi11,
                            NormFamily::Psi1Based => OrliczFunction::Psi1,
                        };
                        let norm = norm_for(f, eps)?;
                        SumProfile::from_norms(&vec![norm; n], eps, fam.norms)
                    }
                }
                .map_err(CliError::from)?;
                for &x in &grid {
                    let log_bound = match fam.family {
                        BoundFamily::Piecewise => profile.log_tail_piecewise(x),
                        BoundFamily::MinForm => profile.log_tail_minform(x),
                        BoundFamily::Chafai => {
                            profile.log_tail_chafai(x).map_err(CliError::from)?
                        }
                        BoundFamily::ClassicalMgfChernoff => profile
                            .log_tail_classical_chernoff(x)
                            .map_err(CliError::from)?,
                    } + 0.0; // fold -0.0 at x = 0 into 0.0
                    writeln!(csv, "{n},{eps},{fam},{x},{},{log_bound}", log_bound.exp())
                        .expect("writing to String cannot fail");
                }
            }
        }
    }
    Ok(csv)
}

/// Generate and write the CSV; unwritable paths map to the output error.
pub fn write_sweep(cfg: &SweepConfig) -> Result<(), CliError> {
    let csv = sweep_csv(cfg)?;
    std::fs::write(&cfg.output_path, csv)
        .map_err(|e| CliError::Output(format!("cannot write {}: {e}", cfg.output_path.display())))
}
