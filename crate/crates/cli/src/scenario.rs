//! TOML scenario files.
//!
//! Every quantity carries its unit in the key name (`_nm`, `_au`, `_w`,
//! `_db`, `_urad`, `_ns`, `_phe_per_ns`) and is converted to SI on load.
//! Unknown keys are rejected.

use std::path::{Path, PathBuf};

use pointloss_core::budget::{optimal_design, AntennaSpec, LinkScenario};
use pointloss_core::gain_opt::GainApproach;
use pointloss_core::outage::PointingApproach;
use pointloss_core::pointing::{AngularErrorModel, PointingLossModel};
use pointloss_core::signaling::{CodeRate, ScppmConfig, DEFAULT_GUARD_FRACTION};
use pointloss_core::units::{au_to_m, db_to_linear, MICRORADIAN, NANOMETRE, NANOSECOND};
use serde::Deserialize;

use crate::{CliError, Format};
use pointloss_core::Precision;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub link: LinkSection,
    pub tx: EndSection,
    pub rx: EndSection,
    #[serde(default)]
    pub pointing: PointingSection,
    pub signaling: SignalingSection,
    #[serde(default)]
    pub registry: RegistrySection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSection {
    pub wavelength_nm: f64,
    pub range_au: f64,
    pub average_power_w: f64,
    #[serde(default)]
    pub other_losses_db: f64,
    #[serde(default)]
    pub required_margin_db: f64,
    pub noise_flux_phe_per_ns: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum LossModelName {
    #[default]
    Gaussian,
    Circular,
    Exp,
}

impl LossModelName {
    pub fn model(self, alpha: Option<f64>) -> Result<PointingLossModel, CliError> {
        let m = match (self, alpha) {
            (LossModelName::Gaussian, None) => PointingLossModel::GaussianBeam,
            (LossModelName::Circular, None) => PointingLossModel::CircularAperture,
            (LossModelName::Exp, None) => PointingLossModel::exp_approx_circular(),
            (LossModelName::Exp, Some(alpha)) => PointingLossModel::ExpApprox { alpha },
            (_, Some(_)) => {
                return Err(CliError::Usage(
                    "`alpha` only applies to the `exp` loss model".into(),
                ))
            }
        };
        m.validate()?;
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndSection {
    /// Omitted: both ends get the gain that maximizes the effective gain.
    pub gain_db: Option<f64>,
    #[serde(default)]
    pub efficiency_db: f64,
    #[serde(default)]
    pub loss_model: LossModelName,
    pub alpha: Option<f64>,
    pub theta_max_urad: Option<f64>,
    pub sigma_urad: Option<f64>,
    pub bias_urad: Option<f64>,
}

impl EndSection {
    fn error_model(&self, side: &str) -> Result<AngularErrorModel, CliError> {
        let m = match (self.theta_max_urad, self.sigma_urad, self.bias_urad) {
            (Some(t), None, None) => AngularErrorModel::worst_case(t * MICRORADIAN)?,
            (None, Some(s), None) => AngularErrorModel::rayleigh(s * MICRORADIAN)?,
            (None, Some(s), Some(b)) => AngularErrorModel::rician(s * MICRORADIAN, b * MICRORADIAN)?,
            _ => {
                return Err(CliError::Usage(format!(
                    "[{side}] needs exactly one of `theta_max_urad` or `sigma_urad` (optionally with `bias_urad`)"
                )))
            }
        };
        Ok(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ApproachName {
    #[default]
    Deterministic,
    Outage,
    Neglected,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct PointingSection {
    #[serde(default)]
    pub approach: ApproachName,
    pub p_out: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalingSection {
    pub ppm_order: u32,
    pub code_rate: String,
    pub slot_time_ns: f64,
    pub guard_fraction: Option<f64>,
    pub fer_target: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RegistrySection {
    /// Relative paths resolve against the scenario file's directory.
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub format: Option<Format>,
    pub precision: Option<PrecisionName>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PrecisionName {
    Rounded,
    Full,
}

impl From<PrecisionName> for Precision {
    fn from(p: PrecisionName) -> Self {
        match p {
            PrecisionName::Rounded => Precision::Rounded,
            PrecisionName::Full => Precision::Full,
        }
    }
}

/// A parsed scenario together with the directory it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedScenario {
    pub file: ScenarioFile,
    pub base_dir: PathBuf,
}

impl LoadedScenario {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        let file = ScenarioFile::parse(&text)?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(Self { file, base_dir })
    }

    pub fn registry_path(&self) -> Option<PathBuf> {
        self.file.registry.path.as_ref().map(|p| {
            if p.is_absolute() {
                p.clone()
            } else {
                self.base_dir.join(p)
            }
        })
    }
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        Ok(toml::from_str(text)?)
    }

    pub fn approach(&self) -> Result<PointingApproach, CliError> {
        match (self.pointing.approach, self.pointing.p_out) {
            (ApproachName::Deterministic, None) => Ok(PointingApproach::Deterministic),
            (ApproachName::Neglected, None) => Ok(PointingApproach::Neglected),
            (ApproachName::Outage, Some(p_out)) => Ok(PointingApproach::Outage { p_out }),
            (ApproachName::Outage, None) => Err(CliError::Usage(
                "[pointing] approach = \"outage\" needs `p_out`".into(),
            )),
            (_, Some(_)) => Err(CliError::Usage(
                "[pointing] `p_out` only applies to approach = \"outage\"".into(),
            )),
        }
    }

    pub fn signaling(&self) -> Result<ScppmConfig, CliError> {
        let s = &self.signaling;
        let rate: CodeRate = s.code_rate.parse()?;
        Ok(ScppmConfig::new(
            s.ppm_order,
            rate,
            s.slot_time_ns * NANOSECOND,
            s.guard_fraction.unwrap_or(DEFAULT_GUARD_FRACTION),
        )?)
    }

    fn end(&self, section: &EndSection, side: &str) -> Result<AntennaSpec, CliError> {
        Ok(AntennaSpec {
            gain: section.gain_db.map(db_to_linear).unwrap_or(f64::NAN),
            efficiency: db_to_linear(section.efficiency_db),
            loss_model: section.loss_model.model(section.alpha)?,
            error_model: section.error_model(side)?,
        })
    }

    /// The scenario in SI units. Missing gains are replaced by the symmetric
    /// optimum for the pointing approach in use.
    pub fn to_scenario(&self) -> Result<LinkScenario, CliError> {
        let link = &self.link;
        let approach = self.approach()?;
        let scenario = LinkScenario {
            wavelength: link.wavelength_nm * NANOMETRE,
            range: au_to_m(link.range_au),
            average_power: link.average_power_w,
            tx: self.end(&self.tx, "tx")?,
            rx: self.end(&self.rx, "rx")?,
            other_losses: db_to_linear(link.other_losses_db),
            approach,
            signaling: self.signaling()?,
            noise_flux: link.noise_flux_phe_per_ns,
            required_margin_db: link.required_margin_db,
            fer_target: self.signaling.fer_target,
        };
        match (self.tx.gain_db, self.rx.gain_db) {
            (Some(_), Some(_)) => {
                scenario.validate()?;
                Ok(scenario)
            }
            (None, None) => self.with_optimal_gains(scenario),
            _ => Err(CliError::Usage(
                "set `gain_db` on both ends or on neither".into(),
            )),
        }
    }

    fn with_optimal_gains(&self, scenario: LinkScenario) -> Result<LinkScenario, CliError> {
        if scenario.tx.loss_model != scenario.rx.loss_model
            || scenario.tx.error_model != scenario.rx.error_model
        {
            return Err(CliError::Usage(
                "optimal gains need identical loss model and pointing accuracy on both ends; set `gain_db` explicitly".into(),
            ));
        }
        let gain_approach = match scenario.approach {
            PointingApproach::Deterministic => GainApproach::Deterministic,
            PointingApproach::Outage { p_out } => GainApproach::Outage { p_out },
            PointingApproach::Neglected => {
                return Err(CliError::Usage(
                    "optimal gains are unbounded when pointing is neglected; set `gain_db`".into(),
                ))
            }
        };
        let accuracy = match scenario.tx.error_model {
            AngularErrorModel::Rician { .. } => {
                return Err(CliError::Usage(
                    "optimal gains support Rayleigh or worst-case errors only; set `gain_db`"
                        .into(),
                ))
            }
            m => m.scale(),
        };
        let (design, _) =
            optimal_design(&scenario, gain_approach, scenario.tx.loss_model, accuracy)?;
        Ok(LinkScenario {
            approach: scenario.approach,
            ..design
        })
    }
}
