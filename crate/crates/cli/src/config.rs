//! TOML run configuration.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use snhopf::cluster::AlphaPolynomials;
use snhopf::{Complex, NormalFormCoefficients, SystemParams};

use crate::error::{CliError, Result};

/// A complex number written either as `[re, im]` or as `{ modulus, phase }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexInput {
    Cartesian([f64; 2]),
    Polar { modulus: f64, phase: f64 },
}

impl ComplexInput {
    pub fn value(&self) -> Complex {
        match *self {
            ComplexInput::Cartesian([re, im]) => Complex::new(re, im),
            ComplexInput::Polar { modulus, phase } => Complex::from_polar(modulus, phase),
        }
    }

    pub fn normalized(&self) -> Self {
        let z = self.value();
        ComplexInput::Cartesian([z.re, z.im])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub lambda: f64,
    pub omega: f64,
    pub epsilon: f64,
    pub n_osc: usize,
    #[serde(default)]
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub seed: Option<u64>,
    /// Record every `stride`-th step.
    pub stride: Option<usize>,
    pub output: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    Explicit {
        phases: Vec<f64>,
    },
    #[default]
    RandomPhases,
    Splay {
        #[serde(default)]
        offset: f64,
    },
    TwoCluster {
        q: usize,
        p: usize,
        psi0: f64,
    },
    PerturbedSync {
        amplitude: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticPolynomials {
    #[serde(default)]
    pub a1: [f64; 4],
    #[serde(default)]
    pub b1: [f64; 4],
    #[serde(default)]
    pub a2: [f64; 4],
    #[serde(default)]
    pub b2: [f64; 4],
}

impl From<SyntheticPolynomials> for AlphaPolynomials {
    fn from(s: SyntheticPolynomials) -> Self {
        AlphaPolynomials {
            a1: s.a1,
            b1: s.b1,
            a2: s.a2,
            b2: s.b2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterScanSection {
    #[serde(default = "default_grid")]
    pub alpha_grid: usize,
    #[serde(default = "default_psi_grid")]
    pub psi_grid: usize,
    /// Also tabulate the `alpha` roots over a `psi` grid.
    #[serde(default)]
    pub alpha_roots: bool,
    /// Cluster polynomials given directly instead of derived from the system.
    pub synthetic: Option<SyntheticPolynomials>,
}

fn default_grid() -> usize {
    64
}

fn default_psi_grid() -> usize {
    360
}

impl Default for ClusterScanSection {
    fn default() -> Self {
        Self {
            alpha_grid: default_grid(),
            psi_grid: default_psi_grid(),
            alpha_roots: false,
            synthetic: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemSection,
    /// Keys `a_m1`, `a1`, ..., `a11`; missing entries are zero.
    pub coefficients: BTreeMap<String, ComplexInput>,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub initial: InitialSpec,
    pub cluster_scan: Option<ClusterScanSection>,
}

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_T_END: f64 = 1000.0;

fn coefficient_index(key: &str) -> Option<i32> {
    match key {
        "a_m1" => Some(-1),
        _ => key
            .strip_prefix('a')?
            .parse()
            .ok()
            .filter(|k| (1..=11).contains(k)),
    }
}

fn field_error(field: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {reason}"))
}

fn require_finite(field: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(field_error(field, format!("must be finite, got {x}")))
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(path.display().to_string(), e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Canonical text: complex values as `[re, im]`, sections in fixed order.
    pub fn to_toml(&self) -> String {
        let mut norm = self.clone();
        for v in norm.coefficients.values_mut() {
            *v = v.normalized();
        }
        toml::to_string(&norm).expect("config is always representable")
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.system;
        for (f, x) in [
            ("system.lambda", s.lambda),
            ("system.omega", s.omega),
            ("system.epsilon", s.epsilon),
            ("system.delta", s.delta),
        ] {
            require_finite(f, x)?;
        }
        if s.lambda <= 0.0 {
            return Err(field_error(
                "system.lambda",
                format!("must be positive, got {}", s.lambda),
            ));
        }
        if s.n_osc < 2 {
            return Err(field_error(
                "system.n_osc",
                format!("must be at least 2, got {}", s.n_osc),
            ));
        }
        for (key, v) in &self.coefficients {
            let field = format!("coefficients.{key}");
            if coefficient_index(key).is_none() {
                return Err(field_error(
                    &field,
                    "unknown coefficient (expected a_m1 or a1..a11)",
                ));
            }
            let z = v.value();
            require_finite(&field, z.re)?;
            require_finite(&field, z.im)?;
        }
        if self.coeffs().a1.re >= 0.0 {
            return Err(field_error(
                "coefficients.a1",
                "real part must be negative (supercritical Hopf bifurcation)",
            ));
        }
        if let Some(dt) = self.run.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(field_error("run.dt", format!("must be positive, got {dt}")));
            }
        }
        if let Some(t) = self.run.t_end {
            if !(t > 0.0 && t.is_finite()) {
                return Err(field_error(
                    "run.t_end",
                    format!("must be positive, got {t}"),
                ));
            }
        }
        match &self.initial {
            InitialSpec::Explicit { phases } => {
                if phases.len() != s.n_osc {
                    return Err(field_error(
                        "initial.phases",
                        format!("expected {} entries, got {}", s.n_osc, phases.len()),
                    ));
                }
                for x in phases {
                    require_finite("initial.phases", *x)?;
                }
            }
            InitialSpec::Splay { offset } => require_finite("initial.offset", *offset)?,
            InitialSpec::TwoCluster { q, p, psi0 } => {
                if q + p != s.n_osc || *q == 0 || *p == 0 {
                    return Err(field_error(
                        "initial.q",
                        format!("q + p must equal n_osc = {} with both positive", s.n_osc),
                    ));
                }
                require_finite("initial.psi0", *psi0)?;
            }
            InitialSpec::PerturbedSync { amplitude } => {
                require_finite("initial.amplitude", *amplitude)?
            }
            InitialSpec::RandomPhases => {}
        }
        if let Some(scan) = &self.cluster_scan {
            if scan.alpha_grid < 64 {
                return Err(field_error(
                    "cluster_scan.alpha_grid",
                    "must be at least 64",
                ));
            }
            if scan.psi_grid < snhopf::cluster::MIN_PSI_GRID {
                return Err(field_error(
                    "cluster_scan.psi_grid",
                    format!("must be at least {}", snhopf::cluster::MIN_PSI_GRID),
                ));
            }
        }
        Ok(())
    }

    pub fn coeffs(&self) -> NormalFormCoefficients {
        let mut c = NormalFormCoefficients::default();
        for (key, v) in &self.coefficients {
            if let Some(k) = coefficient_index(key) {
                if let Ok(slot) = c.get_mut(k) {
                    *slot = v.value();
                }
            }
        }
        c
    }

    pub fn params(&self) -> SystemParams {
        SystemParams {
            lambda: self.system.lambda,
            omega: self.system.omega,
            epsilon: self.system.epsilon,
            n_osc: self.system.n_osc,
            coeffs: self.coeffs(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.run.seed.unwrap_or(DEFAULT_SEED)
    }

    /// Initial phases; random draws are uniform on `[0, 2 pi)`.
    pub fn initial_phases(&self) -> Vec<f64> {
        let n = self.system.n_osc;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed());
        match &self.initial {
            InitialSpec::Explicit { phases } => phases.clone(),
            InitialSpec::RandomPhases => (0..n).map(|_| rng.gen_range(0.0..TAU)).collect(),
            InitialSpec::Splay { offset } => {
                (0..n).map(|j| offset + TAU * j as f64 / n as f64).collect()
            }
            InitialSpec::TwoCluster { q, psi0, .. } => {
                (0..n).map(|j| if j < *q { *psi0 } else { 0.0 }).collect()
            }
            InitialSpec::PerturbedSync { amplitude } => (0..n)
                .map(|_| amplitude * rng.gen_range(-1.0..1.0))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[system]
lambda = 0.1
omega = 1.0
epsilon = 0.5
n_osc = 3

[coefficients]
a1 = [-1.0, 0.0]
a2 = { modulus = 0.3, phase = 3.141592653589793 }
"#;

    #[test]
    fn parses_both_complex_forms() {
        let cfg = RunConfig::parse(MINIMAL).unwrap();
        let c = cfg.coeffs();
        assert_eq!(c.a1, Complex::new(-1.0, 0.0));
        assert!((c.a2 - Complex::new(-0.3, 0.0)).norm() < 1e-15);
        assert_eq!(cfg.initial, InitialSpec::RandomPhases);
        assert_eq!(cfg.seed(), DEFAULT_SEED);
    }

    #[test]
    fn rejects_bad_lambda_by_name() {
        let text = MINIMAL.replace("lambda = 0.1", "lambda = -0.1");
        let err = RunConfig::parse(&text).unwrap_err();
        assert!(err.to_string().contains("system.lambda"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn rejects_unknown_coefficient() {
        let text = format!("{MINIMAL}a12 = [1.0, 0.0]\n");
        assert!(RunConfig::parse(&text)
            .unwrap_err()
            .to_string()
            .contains("coefficients.a12"));
    }

    #[test]
    fn rejects_subcritical() {
        let text = MINIMAL.replace("a1 = [-1.0, 0.0]", "a1 = [1.0, 0.0]");
        assert!(RunConfig::parse(&text)
            .unwrap_err()
            .to_string()
            .contains("coefficients.a1"));
    }

    #[test]
    fn initial_conditions() {
        let mut cfg = RunConfig::parse(MINIMAL).unwrap();
        cfg.initial = InitialSpec::TwoCluster {
            q: 2,
            p: 1,
            psi0: 1.5,
        };
        assert_eq!(cfg.initial_phases(), vec![1.5, 1.5, 0.0]);
        cfg.initial = InitialSpec::Splay { offset: 0.0 };
        let s = cfg.initial_phases();
        assert!((s[1] - TAU / 3.0).abs() < 1e-15);
        cfg.initial = InitialSpec::RandomPhases;
        let a = cfg.initial_phases();
        assert_eq!(a, cfg.initial_phases());
        assert!(a.iter().all(|x| (0.0..TAU).contains(x)));
        cfg.run.seed = Some(9);
        assert_ne!(a, cfg.initial_phases());
    }

    #[test]
    fn round_trip_is_canonical() {
        let cfg = RunConfig::parse(MINIMAL).unwrap();
        let text = cfg.to_toml();
        let again = RunConfig::parse(&text).unwrap();
        assert_eq!(again.to_toml(), text);
        assert_eq!(again.coeffs(), cfg.coeffs());
    }
}
