//! Experiment configuration, read from and written to TOML.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ensemble::{EntryLaw, KernelSpec, Regime, RegimeConfig};
use crate::error::{Result, RmtError};
use crate::laws::DEFAULT_V_SCHEDULE;

pub const DEFAULT_BINS: usize = 60;
pub const DEFAULT_GRID_POINTS: usize = 400;
pub const DEFAULT_MC_SAMPLES: usize = 200_000;
pub const DEFAULT_ZETA_ATOMS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    Constant,
    Indicator,
    Gaussian,
}

/// Kernel section. An indicator takes exactly one of `radius`, `beta`
/// (r² = (2 + β)σ²p) or `z_alpha` (r² = (2p + 2√(2p) z_α)σ²); a gaussian
/// kernel takes `tau`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub variant: KernelKind,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "ext_float")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "ext_float")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "ext_float")]
    pub z_alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "ext_float")]
    pub tau: Option<f64>,
}

impl KernelConfig {
    pub fn constant() -> Self {
        Self { variant: KernelKind::Constant, radius: None, beta: None, z_alpha: None, tau: None }
    }

    pub fn indicator_beta(beta: f64) -> Self {
        Self { variant: KernelKind::Indicator, beta: Some(beta), ..Self::constant() }
    }

    pub fn indicator_z_alpha(z_alpha: f64) -> Self {
        Self { variant: KernelKind::Indicator, z_alpha: Some(z_alpha), ..Self::constant() }
    }

    pub fn indicator_radius(radius: f64) -> Self {
        Self { variant: KernelKind::Indicator, radius: Some(radius), ..Self::constant() }
    }

    pub fn gaussian(tau: f64) -> Self {
        Self { variant: KernelKind::Gaussian, tau: Some(tau), ..Self::constant() }
    }

    pub fn validate(&self) -> Result<()> {
        let given = [self.radius, self.beta, self.z_alpha].iter().filter(|v| v.is_some()).count();
        match self.variant {
            KernelKind::Constant if given > 0 || self.tau.is_some() => {
                config_err("constant kernel takes no parameters")
            }
            KernelKind::Indicator if given != 1 || self.tau.is_some() => {
                config_err("indicator kernel needs exactly one of radius, beta, z_alpha")
            }
            KernelKind::Gaussian if given > 0 || self.tau.is_none() => config_err("gaussian kernel needs tau only"),
            _ => Ok(()),
        }
    }

    /// The kernel on ℝᵖ for entries of scale σ.
    pub fn build(&self, p: usize, sigma: f64) -> Result<KernelSpec> {
        self.validate()?;
        match self.variant {
            KernelKind::Constant => KernelSpec::constant(p),
            KernelKind::Gaussian => KernelSpec::gaussian(p, self.tau.unwrap()),
            KernelKind::Indicator => match (self.radius, self.beta, self.z_alpha) {
                (Some(r), _, _) => KernelSpec::indicator(p, r),
                (_, Some(b), _) => KernelSpec::indicator_from_beta(p, b, sigma),
                (_, _, Some(z)) => KernelSpec::indicator_from_z_alpha(p, z, sigma),
                _ => unreachable!("validated above"),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HistogramConfig {
    #[serde(default = "default_bins")]
    pub bins: usize,
}

impl Default for HistogramConfig {
    fn default() -> Self {
        Self { bins: DEFAULT_BINS }
    }
}

/// Grid on which the predicted law is tabulated. Missing bounds are taken
/// from the law's support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StieltjesConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_lo: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_hi: Option<f64>,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_v_schedule")]
    pub v_schedule: Vec<f64>,
    /// Gauss–Hermite atoms for the closed-form ζ law.
    #[serde(default = "default_zeta_atoms")]
    pub zeta_atoms: usize,
}

impl Default for StieltjesConfig {
    fn default() -> Self {
        Self {
            x_lo: None,
            x_hi: None,
            points: DEFAULT_GRID_POINTS,
            v_schedule: DEFAULT_V_SCHEDULE.to_vec(),
            zeta_atoms: DEFAULT_ZETA_ATOMS,
        }
    }
}

/// Scale used for smooth kernels: MP(c, ασ²) matches simulation, MP(c, α²σ²)
/// is kept for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothScale {
    #[default]
    Alpha,
    AlphaSquared,
}

/// Which law to compare against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type", deny_unknown_fields)]
pub enum LawConfig {
    Auto {
        #[serde(default)]
        smooth_scale: SmoothScale,
    },
    Mp {
        c: f64,
        scale: f64,
    },
    Sc {
        variance: f64,
    },
    /// Generalized MP with the indicator ζ law.
    Genmp {
        c: f64,
        sigma: f64,
        z_alpha: f64,
    },
    None,
}

impl Default for LawConfig {
    fn default() -> Self {
        LawConfig::Auto { smooth_scale: SmoothScale::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub regime: Regime,
    pub p: usize,
    pub n: usize,
    /// Target aspect ratio in the proportional regime; p/n when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default)]
    pub entry_law: EntryLaw,
    #[serde(default = "one")]
    pub sigma: f64,
    #[serde(default = "one_usize")]
    pub trials: usize,
    #[serde(default)]
    pub master_seed: u64,
    /// Monte-Carlo pairs for α_p, β_p² when no closed form applies.
    #[serde(default = "default_mc")]
    pub mc_samples: usize,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    pub kernel: KernelConfig,
    #[serde(default)]
    pub histogram: HistogramConfig,
    #[serde(default)]
    pub stieltjes: StieltjesConfig,
    #[serde(default)]
    pub law: LawConfig,
}

impl ExperimentConfig {
    /// A proportional-regime config with defaults for everything else.
    pub fn new(p: usize, n: usize, kernel: KernelConfig) -> Self {
        Self {
            regime: Regime::Proportional,
            p,
            n,
            c: None,
            entry_law: EntryLaw::Gaussian,
            sigma: 1.0,
            trials: 1,
            master_seed: 0,
            mc_samples: DEFAULT_MC_SAMPLES,
            output_dir: default_output(),
            kernel,
            histogram: HistogramConfig::default(),
            stieltjes: StieltjesConfig::default(),
            law: LawConfig::default(),
        }
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| RmtError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RmtError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| RmtError::Config(e.to_string()))
    }

    pub fn regime_config(&self) -> Result<RegimeConfig> {
        let rc = RegimeConfig { regime: self.regime, p: self.p, n: self.n, c: self.c };
        rc.validate().map_err(|e| RmtError::Config(e.to_string()))?;
        Ok(rc)
    }

    /// The aspect ratio used by the predicted law.
    pub fn aspect_ratio(&self) -> f64 {
        self.c.unwrap_or(self.p as f64 / self.n as f64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 2 || self.n < 2 {
            return config_err(format!("p and n must be at least 2 (got p={}, n={})", self.p, self.n));
        }
        if self.trials < 1 {
            return config_err("trials must be at least 1");
        }
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return config_err(format!("sigma must be positive, got {}", self.sigma));
        }
        if self.mc_samples < 1 {
            return config_err("mc_samples must be at least 1");
        }
        if self.histogram.bins < 1 {
            return config_err("histogram.bins must be at least 1");
        }
        let st = &self.stieltjes;
        if st.points < 2 {
            return config_err("stieltjes.points must be at least 2");
        }
        if st.v_schedule.is_empty() || st.v_schedule.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return config_err("stieltjes.v_schedule must be a nonempty list of positive offsets");
        }
        if let (Some(lo), Some(hi)) = (st.x_lo, st.x_hi) {
            if !(hi > lo) {
                return config_err("stieltjes.x_hi must exceed stieltjes.x_lo");
            }
        }
        if st.zeta_atoms < 16 {
            return config_err("stieltjes.zeta_atoms must be at least 16");
        }
        self.kernel.validate().map_err(|e| RmtError::Config(e.to_string()))?;
        self.kernel.build(self.p, self.sigma).map_err(|e| RmtError::Config(e.to_string()))?;
        self.regime_config()?;
        Ok(())
    }
}

fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(RmtError::Config(msg.into()))
}

fn default_bins() -> usize {
    DEFAULT_BINS
}
fn default_points() -> usize {
    DEFAULT_GRID_POINTS
}
fn default_v_schedule() -> Vec<f64> {
    DEFAULT_V_SCHEDULE.to_vec()
}
fn default_zeta_atoms() -> usize {
    DEFAULT_ZETA_ATOMS
}
fn default_mc() -> usize {
    DEFAULT_MC_SAMPLES
}
fn default_output() -> PathBuf {
    PathBuf::from("out")
}
fn one() -> f64 {
    1.0
}
fn one_usize() -> usize {
    1
}

/// Optional floats that may be infinite: finite values are plain numbers,
/// the rest are the strings "inf", "-inf" and "nan". Keeps configs and JSON
/// reports lossless.
pub(crate) mod ext_float {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            None => s.serialize_none(),
            Some(x) if x.is_finite() => s.serialize_f64(*x),
            Some(x) if x.is_nan() => s.serialize_str("nan"),
            Some(x) if *x > 0.0 => s.serialize_str("inf"),
            Some(_) => s.serialize_str("-inf"),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Int(i64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        match Option::<Repr>::deserialize(d)? {
            None => Ok(None),
            Some(Repr::Num(x)) => Ok(Some(x)),
            Some(Repr::Int(i)) => Ok(Some(i as f64)),
            Some(Repr::Text(t)) => match t.as_str() {
                "inf" | "+inf" | "infinity" => Ok(Some(f64::INFINITY)),
                "-inf" | "-infinity" => Ok(Some(f64::NEG_INFINITY)),
                "nan" => Ok(Some(f64::NAN)),
                other => Err(de::Error::custom(format!("not a number: {other}"))),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
regime = "proportional"
p = 200
n = 500
entry_law = "gaussian"
sigma = 1.0
trials = 5
master_seed = 7
output_dir = "out/fig1"

[kernel]
variant = "indicator"
beta = 0.3

[histogram]
bins = 50

[stieltjes]
x_lo = -0.1
x_hi = 3.0
points = 300
v_schedule = [0.1, 0.01, 0.001]
"#;

    #[test]
    fn parses_and_round_trips() {
        let cfg = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        assert_eq!(cfg.kernel.beta, Some(0.3));
        assert_eq!(cfg.histogram.bins, 50);
        assert_eq!(cfg.law, LawConfig::default());
        let again = ExperimentConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn infinite_beta_round_trips() {
        let mut cfg = ExperimentConfig::new(20, 50, KernelConfig::indicator_beta(f64::INFINITY));
        cfg.law = LawConfig::Mp { c: 0.4, scale: 1.0 };
        let text = cfg.to_toml_string().unwrap();
        let back = ExperimentConfig::from_toml_str(&text).unwrap();
        assert_eq!(back.kernel.beta, Some(f64::INFINITY));
        let json = serde_json::to_string(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = SAMPLE.replace("trials = 5", "trials = 0");
        assert!(matches!(ExperimentConfig::from_toml_str(&bad), Err(RmtError::Config(_))));
        let bad = SAMPLE.replace("beta = 0.3", "beta = 0.3\ntau = 1.0");
        assert!(ExperimentConfig::from_toml_str(&bad).is_err());
        let bad = SAMPLE.replace("p = 200", "p = 1");
        assert!(ExperimentConfig::from_toml_str(&bad).is_err());
        let bad = SAMPLE.replace("bins = 50", "bins = 50\nwidth = 2");
        assert!(ExperimentConfig::from_toml_str(&bad).is_err());
        let bad = SAMPLE.replace("regime = \"proportional\"", "regime = \"semi_high_dim\"").replace("n = 500", "n = 50000");
        assert!(ExperimentConfig::from_toml_str(&bad).is_err());
    }

    #[test]
    fn explicit_law_table() {
        let text = format!("{SAMPLE}\n[law]\ntype = \"mp\"\nc = 0.4\nscale = 1.0\n");
        let cfg = ExperimentConfig::from_toml_str(&text).unwrap();
        assert_eq!(cfg.law, LawConfig::Mp { c: 0.4, scale: 1.0 });
    }
}
