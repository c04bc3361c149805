//! Experiment configuration: TOML files (one file can hold a whole suite)
//! plus built-in presets for every named experiment.

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::heat::AtomFamily;
use crate::symbols::b_p;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

fn default_band_threshold() -> f64 {
    10.0
}

/// One experiment's parameters. Unset fields fall back to the experiment's
/// preset; `b` and `p` are never both free — `b` defaults to b_p(n, p).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: String,
    /// dimension (2 or 3)
    pub n: usize,
    /// lattice points per axis (N)
    pub points: usize,
    /// box side length (L)
    pub length: f64,
    /// Lebesgue exponent; may be `inf`
    #[serde(default)]
    pub p: Option<f64>,
    /// symbol order override; defaults to b_p(n, p)
    #[serde(default)]
    pub b: Option<f64>,
    /// atom dimension parameter; defaults to n
    #[serde(default)]
    pub beta: Option<f64>,
    /// kernel-norm exponent for lp-kernel-scan
    #[serde(default)]
    pub q: Option<f64>,
    /// derivative multi-index for lp-kernel-scan
    #[serde(default)]
    pub alpha: Option<[u32; 3]>,
    #[serde(default)]
    pub family: Option<AtomFamily>,
    #[serde(default)]
    pub ell_sweep: Vec<f64>,
    #[serde(default)]
    pub t_sweep: Vec<f64>,
    #[serde(default)]
    pub j_min: Option<i32>,
    #[serde(default)]
    pub j_max: Option<i32>,
    /// acceptance knob: max allowed max/min ratio across a sweep
    #[serde(default = "default_band_threshold")]
    pub band_threshold: f64,
    #[serde(default)]
    pub seed: u64,
    /// directory for CSV/JSON reports; no files written when unset
    #[serde(default)]
    pub out: Option<PathBuf>,
}

/// A suite: `[[experiment]]` tables in one TOML file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Suite {
    #[serde(default, rename = "experiment")]
    pub experiments: Vec<ExperimentConfig>,
}

impl Suite {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let suite: Suite =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        for cfg in &suite.experiments {
            cfg.validate()?;
        }
        Ok(suite)
    }
}

pub const EXPERIMENT_NAMES: &[&str] = &[
    "partition-check",
    "decomposition-check",
    "lp-kernel-scan",
    "kernel-profile",
    "atom-validate",
    "heat-norm-scan",
    "riesz-scan",
    "wave-decay",
    "dilated-scan",
    "region-norms",
    "dyadic-split",
    "uniform-bound",
    "bmo-probe",
    "sharp-maximal-convergence",
];

impl ExperimentConfig {
    /// The tuned desk-scale defaults for a named experiment.
    pub fn preset(experiment: &str) -> Result<Self> {
        let base = |n: usize, points: usize, length: f64| ExperimentConfig {
            experiment: experiment.to_string(),
            n,
            points,
            length,
            p: None,
            b: None,
            beta: None,
            q: None,
            alpha: None,
            family: None,
            ell_sweep: Vec::new(),
            t_sweep: Vec::new(),
            j_min: None,
            j_max: None,
            band_threshold: 10.0,
            seed: 0,
            out: None,
        };
        let log_sweep = |lo: f64, hi: f64, count: usize| crate::heat::log_spaced(lo, hi, count);
        let cfg = match experiment {
            "partition-check" => base(2, 512, 16.0),
            "decomposition-check" => base(2, 512, 16.0),
            "lp-kernel-scan" => {
                let mut c = base(2, 2048, 3.2);
                c.j_min = Some(2);
                c.j_max = Some(7);
                c
            }
            "kernel-profile" => {
                let mut c = base(2, 1024, 12.0);
                c.b = Some(1.0);
                c
            }
            "atom-validate" => {
                let mut c = base(2, 256, 16.0);
                c.family = Some(AtomFamily::Dipole);
                c.ell_sweep = vec![0.5, 1.0, 2.0];
                c
            }
            "heat-norm-scan" => {
                let mut c = base(2, 256, 32.0);
                c.family = Some(AtomFamily::Dipole);
                c.ell_sweep = vec![1.0];
                c.t_sweep = log_sweep(0.05, 16.0, 25);
                c
            }
            "riesz-scan" => {
                let mut c = base(3, 96, 0.0); // length unused: self-similar grids
                c.length = 8.0;
                c.p = Some(1.0);
                c.beta = Some(3.0);
                c.family = Some(AtomFamily::Dipole);
                c.ell_sweep = vec![0.03125, 0.0625, 0.125, 0.25];
                c
            }
            "wave-decay" => {
                let mut c = base(3, 96, 24.0);
                c.p = Some(1.0);
                c.ell_sweep = vec![2.0];
                c.t_sweep = log_sweep(1.0, 8.0, 7);
                c.family = Some(AtomFamily::Dipole);
                c
            }
            "dilated-scan" => {
                let mut c = base(2, 256, 32.0);
                c.p = Some(2.0);
                c.family = Some(AtomFamily::Dipole);
                c.ell_sweep = vec![1.0];
                c.t_sweep = log_sweep(1.0, 10.0, 7);
                c
            }
            "region-norms" => {
                let mut c = base(3, 256, 7.0);
                c.p = Some(1.0);
                c.beta = Some(3.0);
                c.family = Some(AtomFamily::Dipole);
                c.ell_sweep = vec![0.11, 0.135, 0.16, 0.19];
                c
            }
            "dyadic-split" => {
                let mut c = base(3, 128, 12.0);
                c.p = Some(2.0);
                c.beta = Some(3.0);
                c.family = Some(AtomFamily::Shell);
                // the total norm tracks c * ell^(-1) only across the knee
                // between the flat small-ell regime and the spectral-cutoff
                // collapse above ell ~ 1.4, so the sweep must span both sides
                c.ell_sweep = vec![0.5, 0.707, 1.0, 1.414, 2.0];
                c
            }
            "uniform-bound" => {
                let mut c = base(3, 128, 16.0);
                c.p = Some(1.0);
                c.beta = Some(3.0);
                c.family = Some(AtomFamily::Dipole);
                c.ell_sweep = log_sweep(0.6, 3.4, 6);
                c
            }
            "bmo-probe" => {
                let mut c = base(2, 128, 8.0);
                c.family = Some(AtomFamily::Dipole);
                c.ell_sweep = vec![0.3, 0.6, 1.2, 2.0];
                c
            }
            "sharp-maximal-convergence" => {
                let mut c = base(2, 32, 8.0);
                c.seed = 7;
                c
            }
            other => {
                return Err(Error::Config(format!("unknown experiment '{other}'")));
            }
        };
        Ok(cfg)
    }

    /// The default full suite: one preset per experiment, plus the extra
    /// parameter points the acceptance criteria call for.
    pub fn default_suite() -> Vec<ExperimentConfig> {
        let mut suite = Vec::new();
        for name in EXPERIMENT_NAMES {
            suite.push(Self::preset(name).expect("preset exists"));
        }
        // second Riesz point (p = 2) and the planar variant
        let mut riesz_p2 = Self::preset("riesz-scan").unwrap();
        riesz_p2.p = Some(2.0);
        suite.push(riesz_p2);
        let mut riesz_2d = Self::preset("riesz-scan").unwrap();
        riesz_2d.n = 2;
        riesz_2d.points = 128;
        riesz_2d.p = Some(1.5);
        riesz_2d.beta = Some(2.0);
        suite.push(riesz_2d);
        // 3-D dilated decay
        let mut dilated_3d = Self::preset("dilated-scan").unwrap();
        dilated_3d.n = 3;
        dilated_3d.points = 96;
        dilated_3d.length = 24.0;
        dilated_3d.ell_sweep = vec![2.0];
        dilated_3d.t_sweep = crate::heat::log_spaced(1.0, 8.0, 7);
        suite.push(dilated_3d);
        // remaining uniform-bound triples
        for (n, points, length, p, beta, sweep) in [
            (3usize, 128usize, 16.0, 2.0, 3.0, crate::heat::log_spaced(0.6, 3.4, 6)),
            (2, 1024, 16.0, 1.5, 2.0, crate::heat::log_spaced(0.1, 0.57, 6)),
            (2, 1024, 16.0, 2.0, 2.0, crate::heat::log_spaced(0.1, 0.57, 6)),
        ] {
            let mut c = Self::preset("uniform-bound").unwrap();
            c.n = n;
            c.points = points;
            c.length = length;
            c.p = Some(p);
            c.beta = Some(beta);
            c.ell_sweep = sweep;
            suite.push(c);
        }
        // band-bounded dyadic split at p = 1
        let mut dyadic_p1 = Self::preset("dyadic-split").unwrap();
        dyadic_p1.p = Some(1.0);
        suite.push(dyadic_p1);
        suite
    }

    pub fn grid(&self) -> Result<GridSpec<f64>> {
        GridSpec::new(self.n, self.points, self.length)
    }

    /// Order of the multiplier: the override when given, else b_p(n, p).
    pub fn effective_b(&self) -> Result<f64> {
        if let Some(b) = self.b {
            return Ok(b);
        }
        match self.p {
            Some(p) => Ok(b_p(self.n, p)),
            None => Err(Error::Config(format!(
                "experiment '{}' needs p or an explicit b",
                self.experiment
            ))),
        }
    }

    pub fn effective_beta(&self) -> f64 {
        self.beta.unwrap_or(self.n as f64)
    }

    pub fn effective_family(&self) -> AtomFamily {
        self.family.unwrap_or(AtomFamily::Dipole)
    }

    pub fn require_p(&self) -> Result<f64> {
        self.p
            .ok_or_else(|| Error::Config(format!("experiment '{}' needs p", self.experiment)))
    }

    pub fn validate(&self) -> Result<()> {
        if !EXPERIMENT_NAMES.contains(&self.experiment.as_str()) {
            return Err(Error::Config(format!("unknown experiment '{}'", self.experiment)));
        }
        self.grid()?;
        if let Some(p) = self.p {
            if !(p >= 1.0) {
                return Err(Error::Config("p must be >= 1 (inf allowed)".into()));
            }
        }
        if self.ell_sweep.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::Config("ell sweep values must be positive".into()));
        }
        if self.t_sweep.iter().any(|&t| !(t > 0.0)) {
            return Err(Error::Config("t sweep values must be positive".into()));
        }
        if !(self.band_threshold > 1.0) {
            return Err(Error::Config("band threshold must exceed 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for name in EXPERIMENT_NAMES {
            let cfg = ExperimentConfig::preset(name).unwrap();
            cfg.validate().unwrap();
        }
        assert!(ExperimentConfig::preset("no-such-thing").is_err());
    }

    #[test]
    fn default_suite_validates() {
        let suite = ExperimentConfig::default_suite();
        assert!(suite.len() >= EXPERIMENT_NAMES.len());
        for cfg in &suite {
            cfg.validate().unwrap();
        }
    }

    #[test]
    fn effective_b_prefers_override() {
        let mut cfg = ExperimentConfig::preset("uniform-bound").unwrap();
        assert!((cfg.effective_b().unwrap() - b_p(3, 1.0f64)).abs() < 1e-15);
        cfg.b = Some(0.7);
        assert!((cfg.effective_b().unwrap() - 0.7).abs() < 1e-15);
        cfg.p = None;
        cfg.b = None;
        assert!(cfg.effective_b().is_err());
    }

    #[test]
    fn toml_suite_roundtrip() {
        let text = r#"
[[experiment]]
experiment = "partition-check"
n = 2
points = 128
length = 8.0

[[experiment]]
experiment = "riesz-scan"
n = 2
points = 64
length = 8.0
p = 1.5
beta = 2.0
family = "dipole"
ell_sweep = [0.25, 0.5, 1.0, 2.0]
"#;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("suite.toml");
        std::fs::write(&path, text).unwrap();
        let suite = Suite::load(&path).unwrap();
        assert_eq!(suite.experiments.len(), 2);
        assert_eq!(suite.experiments[1].p, Some(1.5));
        assert_eq!(suite.experiments[1].ell_sweep.len(), 4);
    }

    #[test]
    fn bad_configs_rejected() {
        let mut cfg = ExperimentConfig::preset("riesz-scan").unwrap();
        cfg.p = Some(0.5);
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::preset("bmo-probe").unwrap();
        cfg.ell_sweep = vec![1.0, -2.0];
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::preset("partition-check").unwrap();
        cfg.points = 13;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn infinite_p_parses() {
        let text = r#"
[[experiment]]
experiment = "lp-kernel-scan"
n = 2
points = 64
length = 3.2
q = inf
b = 1.0
"#;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.toml");
        std::fs::write(&path, text).unwrap();
        let suite = Suite::load(&path).unwrap();
        assert!(suite.experiments[0].q.unwrap().is_infinite());
    }
}
