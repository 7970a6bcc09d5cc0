//! Scan configuration: defaults, a flat TOML file, then command-line flags.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::Overrides;

/// Which sweep a subcommand runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scan {
    Cat,
    Mirror,
    Distance,
    Lambda,
    Bound,
    Validate,
}

/// Keys accepted in a config file. All optional; unknown keys are rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub g: Option<f64>,
    pub lambda: Option<f64>,
    pub omega_m: Option<f64>,
    pub rprime: Option<[f64; 4]>,
    pub alpha_min: Option<f64>,
    pub alpha_max: Option<f64>,
    pub alpha_steps: Option<usize>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub t_steps: Option<usize>,
    pub lambda_min: Option<f64>,
    pub lambda_max: Option<f64>,
    pub lambda_steps: Option<usize>,
    pub t_fixed: Option<f64>,
    #[serde(alias = "tol")]
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
    #[serde(alias = "out")]
    pub output_path: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Range {
    pub fn linear(&self) -> Vec<f64> {
        let span = self.max - self.min;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.max
                } else {
                    self.min + span * i as f64 / (self.steps - 1) as f64
                }
            })
            .collect()
    }

    pub fn logarithmic(&self) -> Vec<f64> {
        let (a, b) = (self.min.ln(), self.max.ln());
        (0..self.steps)
            .map(|i| {
                if i == 0 {
                    self.min
                } else if i + 1 == self.steps {
                    self.max
                } else {
                    (a + (b - a) * i as f64 / (self.steps - 1) as f64).exp()
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub g: f64,
    pub lambda: f64,
    pub omega_m: f64,
    pub rprime: [f64; 4],
    pub alpha: Range,
    pub time: Range,
    pub lambdas: Range,
    /// `Ω_m t` of the Λ sweep.
    pub t_fixed: f64,
    pub tolerance: f64,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            g: 1e-3,
            lambda: 1.0,
            omega_m: 1.0,
            rprime: [0.0; 4],
            alpha: Range {
                min: 0.05,
                max: 3.0,
                steps: 60,
            },
            time: Range {
                min: 0.0,
                max: 4.0 * PI,
                steps: 400,
            },
            lambdas: Range {
                min: 1.0,
                max: 10.0,
                steps: 20,
            },
            t_fixed: 10.0,
            tolerance: 1e-10,
            seed: 0,
            output_path: None,
        }
    }
}

impl ScanConfig {
    /// Defaults, overlaid by the file, overlaid by flags.
    pub fn resolve(scan: Scan, file: FileConfig, flags: &Overrides) -> Result<Self, String> {
        let mut c = Self::default();
        macro_rules! set {
            ($dst:expr, $($src:expr),+) => {
                $( if let Some(v) = $src { $dst = v; } )+
            };
        }
        set!(c.g, file.g, flags.g);
        set!(c.lambda, file.lambda, flags.lambda);
        set!(c.omega_m, file.omega_m);
        set!(c.rprime, file.rprime);
        set!(c.alpha.min, file.alpha_min, flags.alpha_min);
        set!(c.alpha.max, file.alpha_max, flags.alpha_max);
        set!(c.alpha.steps, file.alpha_steps);
        set!(c.time.min, file.t_min, flags.t_min);
        set!(c.time.max, file.t_max, flags.t_max);
        set!(c.time.steps, file.t_steps);
        set!(c.lambdas.min, file.lambda_min, flags.lambda_min);
        set!(c.lambdas.max, file.lambda_max, flags.lambda_max);
        set!(c.lambdas.steps, file.lambda_steps);
        set!(c.t_fixed, file.t_fixed, flags.t_fixed);
        set!(c.tolerance, file.tolerance, flags.tol);
        set!(c.seed, file.seed, flags.seed);
        if let Some(p) = file.output_path {
            c.output_path = Some(p);
        }
        if let Some(p) = &flags.out {
            c.output_path = Some(p.clone());
        }
        if let Some(n) = flags.steps {
            match scan {
                Scan::Cat => c.alpha.steps = n,
                Scan::Lambda => c.lambdas.steps = n,
                Scan::Mirror | Scan::Distance | Scan::Bound | Scan::Validate => c.time.steps = n,
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), String> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(format!("{name} must be finite, got {v}"))
            }
        };
        for (name, v) in [
            ("g", self.g),
            ("lambda", self.lambda),
            ("omega_m", self.omega_m),
            ("t_fixed", self.t_fixed),
            ("tolerance", self.tolerance),
        ] {
            finite(name, v)?;
        }
        for (k, v) in self.rprime.iter().enumerate() {
            finite(&format!("rprime[{k}]"), *v)?;
        }
        if self.g < 0.0 {
            return Err(format!("g must be >= 0, got {}", self.g));
        }
        if self.lambda < 0.0 {
            return Err(format!("lambda must be >= 0, got {}", self.lambda));
        }
        if self.omega_m <= 0.0 {
            return Err(format!("omega_m must be > 0, got {}", self.omega_m));
        }
        if self.t_fixed < 0.0 {
            return Err(format!("t_fixed must be >= 0, got {}", self.t_fixed));
        }
        if !(self.tolerance > 0.0) {
            return Err(format!("tolerance must be > 0, got {}", self.tolerance));
        }
        for (name, r) in [
            ("alpha", &self.alpha),
            ("t", &self.time),
            ("lambda", &self.lambdas),
        ] {
            finite(&format!("{name}_min"), r.min)?;
            finite(&format!("{name}_max"), r.max)?;
            if r.steps < 2 {
                return Err(format!(
                    "{name} grid needs at least 2 steps, got {}",
                    r.steps
                ));
            }
            if !(r.min < r.max) {
                return Err(format!(
                    "{name}_min ({}) must be below {name}_max ({})",
                    r.min, r.max
                ));
            }
        }
        if self.time.min < 0.0 {
            return Err(format!("t_min must be >= 0, got {}", self.time.min));
        }
        if self.lambdas.min <= 0.0 {
            return Err(format!(
                "lambda_min must be > 0 for a log grid, got {}",
                self.lambdas.min
            ));
        }
        Ok(())
    }
}
