//! Choosing the limiting law an experiment is compared against.

use serde::{Deserialize, Serialize};

use super::config::{ext_float, ExperimentConfig, LawConfig, SmoothScale};
use crate::ensemble::{alpha_p, beta_p_sq, EntryLaw, Estimate, KernelSpec, KernelVariant, Regime};
use crate::error::Result;
use crate::laws::{
    d_moments, zeta_general, zeta_indicator, DFunction, GeneralizedMpLaw, LawSpec, MPLaw, SCLaw, ZetaDistribution,
};
use crate::rng::{stream_seed, Stream};

/// Which limit result the prediction rests on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictionBasis {
    /// Lipschitz (or constant) kernel, proportional regime: an MP law.
    SmoothKernel,
    /// Indicator kernel, proportional regime: the generalized MP law.
    NonsmoothKernel,
    /// p/n → 0 with p² > n: a semicircle law for E.
    Semicircle,
    /// Law given explicitly in the config.
    Explicit,
    /// Custom kernel without metadata.
    NoPrediction,
}

/// Parameters that went into the prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawParams {
    pub basis: PredictionBasis,
    pub law: Option<String>,
    pub c: f64,
    pub sigma: f64,
    pub alpha_p: Estimate,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub beta_p_sq: Option<Estimate>,
    /// MP scale, when the law is MP.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub scale: Option<f64>,
    /// SC variance ϖ², when the law is a semicircle.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub variance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default, with = "ext_float")]
    pub z_alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default, with = "ext_float")]
    pub radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub zeta_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub zeta_second_moment: Option<f64>,
    /// Mean of the predicted law, comparable with the pooled mean eigenvalue.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub predicted_mean: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Prediction {
    pub law: Option<LawSpec>,
    pub params: LawParams,
}

/// Selects the law for `cfg` with kernel `kernel`. Every kernel maps to
/// exactly one basis.
pub fn select_prediction(cfg: &ExperimentConfig, kernel: &KernelSpec) -> Result<Prediction> {
    let c = cfg.aspect_ratio();
    let sigma = cfg.sigma;
    let s2 = sigma * sigma;
    let seed = cfg.master_seed;
    let alpha = alpha_p(kernel, cfg.entry_law, sigma, cfg.mc_samples, stream_seed(seed, Stream::MonteCarlo, 0))?;
    let (radius, tau) = match kernel.variant {
        KernelVariant::Indicator { radius } => (Some(radius), None),
        KernelVariant::Gaussian { tau } => (None, Some(tau)),
        _ => (None, None),
    };
    let mut params = LawParams {
        basis: PredictionBasis::NoPrediction,
        law: None,
        c,
        sigma,
        alpha_p: alpha,
        beta_p_sq: None,
        scale: None,
        variance: None,
        z_alpha: kernel.z_alpha(sigma),
        radius,
        tau,
        zeta_mean: None,
        zeta_second_moment: None,
        predicted_mean: None,
    };

    let law = match &cfg.law {
        LawConfig::None => None,
        LawConfig::Mp { c, scale } => {
            params.basis = PredictionBasis::Explicit;
            Some(LawSpec::Mp(MPLaw::new(*c, *scale)?))
        }
        LawConfig::Sc { variance } => {
            params.basis = PredictionBasis::Explicit;
            Some(LawSpec::Sc(SCLaw::new(*variance)?))
        }
        LawConfig::Genmp { c, sigma, z_alpha } => {
            params.basis = PredictionBasis::Explicit;
            let zeta = zeta_indicator(*z_alpha, cfg.stieltjes.zeta_atoms)?;
            Some(LawSpec::GeneralizedMp(GeneralizedMpLaw::new(*c, *sigma, zeta)?))
        }
        LawConfig::Auto { smooth_scale } => match cfg.regime {
            Regime::SemiHighDim => {
                let beta_sq =
                    beta_p_sq(kernel, cfg.entry_law, sigma, cfg.mc_samples, stream_seed(seed, Stream::MonteCarlo, 1))?;
                params.beta_p_sq = Some(beta_sq);
                params.basis = PredictionBasis::Semicircle;
                Some(LawSpec::Sc(SCLaw::new(beta_sq.value * s2 * s2)?))
            }
            Regime::Proportional => match &kernel.variant {
                KernelVariant::Constant => smooth(&mut params, c, s2, 1.0, *smooth_scale)?,
                KernelVariant::Indicator { radius } if radius.is_infinite() => {
                    smooth(&mut params, c, s2, 1.0, *smooth_scale)?
                }
                KernelVariant::Indicator { radius } => {
                    params.basis = PredictionBasis::NonsmoothKernel;
                    let zeta = indicator_zeta(cfg, *radius)?;
                    Some(LawSpec::GeneralizedMp(GeneralizedMpLaw::new(c, sigma, zeta)?))
                }
                KernelVariant::Gaussian { .. } => smooth(&mut params, c, s2, alpha.value, *smooth_scale)?,
                KernelVariant::Custom(_) if kernel.lipschitz.is_some() => {
                    smooth(&mut params, c, s2, alpha.value, *smooth_scale)?
                }
                KernelVariant::Custom(_) => None,
            },
        },
    };

    match &law {
        Some(LawSpec::Mp(m)) => {
            params.scale = Some(m.scale);
            params.predicted_mean = Some(m.scale);
        }
        Some(LawSpec::Sc(s)) => {
            params.variance = Some(s.variance);
            params.predicted_mean = Some(0.0);
        }
        Some(LawSpec::GeneralizedMp(g)) => {
            params.zeta_mean = Some(g.zeta.mean());
            params.zeta_second_moment = Some(g.zeta.moment(2));
            params.predicted_mean = Some(g.sigma * g.sigma * g.zeta.mean());
        }
        None => {}
    }
    params.law = law.as_ref().map(|l| l.name().to_string());
    Ok(Prediction { law, params })
}

fn smooth(params: &mut LawParams, c: f64, s2: f64, alpha: f64, scale: SmoothScale) -> Result<Option<LawSpec>> {
    params.basis = PredictionBasis::SmoothKernel;
    let factor = match scale {
        SmoothScale::Alpha => alpha,
        SmoothScale::AlphaSquared => alpha * alpha,
    };
    Ok(Some(LawSpec::Mp(MPLaw::new(c, factor * s2)?)))
}

/// ζ for the indicator kernel. With Gaussian entries the closed form is used;
/// otherwise the threshold is standardized with the moments of (x − y)² and
/// ζ is integrated numerically.
fn indicator_zeta(cfg: &ExperimentConfig, radius: f64) -> Result<ZetaDistribution> {
    let p = cfg.p as f64;
    let s2 = cfg.sigma * cfg.sigma;
    if cfg.entry_law == EntryLaw::Gaussian {
        let z_alpha = (radius * radius / s2 - 2.0 * p) / (2.0 * (2.0 * p).sqrt());
        return zeta_indicator(z_alpha, cfg.stieltjes.zeta_atoms);
    }
    let m = d_moments(
        DFunction::SquaredDifference,
        cfg.entry_law,
        cfg.sigma,
        cfg.mc_samples,
        stream_seed(cfg.master_seed, Stream::MonteCarlo, 2),
    )?
    .moments;
    let threshold = (radius * radius - p * m.m1) / (p * m.m2).sqrt();
    let atoms = cfg.stieltjes.zeta_atoms;
    zeta_general(|t| if t <= threshold { 1.0 } else { 0.0 }, &m, atoms, atoms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::CustomKernel;
    use crate::harness::config::KernelConfig;

    fn cfg(kernel: KernelConfig) -> ExperimentConfig {
        ExperimentConfig::new(200, 500, kernel)
    }

    #[test]
    fn selector_is_total() {
        let c = cfg(KernelConfig::constant());
        let p = select_prediction(&c, &c.kernel.build(200, 1.0).unwrap()).unwrap();
        assert_eq!(p.params.basis, PredictionBasis::SmoothKernel);
        assert_eq!(p.law, Some(LawSpec::Mp(MPLaw::new(0.4, 1.0).unwrap())));

        let c = cfg(KernelConfig::gaussian(1.0));
        let p = select_prediction(&c, &c.kernel.build(200, 1.0).unwrap()).unwrap();
        let scale = p.params.scale.unwrap();
        assert!((scale - 0.630_288_8).abs() < 1e-6);

        let c = cfg(KernelConfig::indicator_beta(0.3));
        let p = select_prediction(&c, &c.kernel.build(200, 1.0).unwrap()).unwrap();
        assert_eq!(p.params.basis, PredictionBasis::NonsmoothKernel);
        assert!((p.params.z_alpha.unwrap() - 1.5).abs() < 1e-12);

        let c = cfg(KernelConfig::indicator_beta(f64::INFINITY));
        let p = select_prediction(&c, &c.kernel.build(200, 1.0).unwrap()).unwrap();
        assert_eq!(p.params.basis, PredictionBasis::SmoothKernel);

        let mut c = cfg(KernelConfig::indicator_z_alpha(0.0));
        c.regime = Regime::SemiHighDim;
        c.n = 20_000;
        c.p = 400;
        let p = select_prediction(&c, &c.kernel.build(400, 1.0).unwrap()).unwrap();
        assert_eq!(p.params.basis, PredictionBasis::Semicircle);
        let a = p.params.alpha_p.value;
        assert!((p.params.variance.unwrap() - a).abs() < 1e-15);

        let c = cfg(KernelConfig::constant());
        let custom = KernelSpec::custom(200, CustomKernel::new("half", |_, _| 0.5)).unwrap();
        let p = select_prediction(&c, &custom).unwrap();
        assert_eq!(p.params.basis, PredictionBasis::NoPrediction);
        assert!(p.law.is_none());
    }

    #[test]
    fn squared_scale_option() {
        let mut c = cfg(KernelConfig::gaussian(1.0));
        c.law = LawConfig::Auto { smooth_scale: SmoothScale::AlphaSquared };
        let p = select_prediction(&c, &c.kernel.build(200, 1.0).unwrap()).unwrap();
        let a = p.params.alpha_p.value;
        assert!((p.params.scale.unwrap() - a * a).abs() < 1e-15);
    }

    #[test]
    fn non_gaussian_indicator_uses_general_zeta() {
        // For symmetric-threshold radius r² = p·m₁, ζ has mean near 1/2.
        let mut c = cfg(KernelConfig::indicator_radius((2.0f64 * 200.0).sqrt()));
        c.entry_law = EntryLaw::Rademacher;
        c.mc_samples = 40_000;
        c.stieltjes.zeta_atoms = 24;
        let p = select_prediction(&c, &c.kernel.build(200, 1.0).unwrap()).unwrap();
        let m = p.params.zeta_mean.unwrap();
        assert!((m - 0.5).abs() < 0.05, "{m}");
    }
}
