//! Run configuration: TOML schema, validation and the built-in cases.
//!
//! A configuration file names a `case`; its keys are laid over that case's
//! defaults, so a file only needs the settings it changes. `custom` starts
//! from the free-stream defaults.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blending::BlendMode;
use crate::flow::FlowSpec;
use crate::fv::FvOrder;
use crate::mesh::{MeshTopology, MotionSpec};
use crate::physics::{GasModel, NumericalFlux};
use crate::sbp::MAX_DEGREE;
use crate::time::StepController;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("cannot parse configuration: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    FreeStream,
    Convergence,
    Tgv,
    Piston,
    Custom,
}

impl CaseTag {
    pub const ALL: [CaseTag; 5] = [
        CaseTag::FreeStream,
        CaseTag::Convergence,
        CaseTag::Tgv,
        CaseTag::Piston,
        CaseTag::Custom,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseTag::FreeStream => "free_stream",
            CaseTag::Convergence => "convergence",
            CaseTag::Tgv => "tgv",
            CaseTag::Piston => "piston",
            CaseTag::Custom => "custom",
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CaseTag {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        CaseTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| ConfigError::Invalid(format!("unknown case `{s}`")))
    }
}

/// Volume two-point flux. Only the Chandrashekar flux is provided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TwoPointFlux {
    #[default]
    Ch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluxConfig {
    /// Element faces.
    pub surface: NumericalFlux,
    /// Subcell interfaces and the subcell face states.
    pub subcell: NumericalFlux,
    #[serde(default)]
    pub two_point: TwoPointFlux,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: String,
    /// Simulation time between output events; `0` writes every step.
    pub interval: f64,
    /// Write a `profile_<t>.csv` line extraction at each output event.
    pub profiles: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseConfig {
    pub case: CaseTag,
    pub seed: u64,
    pub degree: usize,
    pub fv_order: FvOrder,
    pub gas: GasModel,
    pub mesh: MeshTopology,
    pub motion: MotionSpec,
    pub flow: FlowSpec,
    pub fluxes: FluxConfig,
    pub blending: BlendMode,
    pub time: StepController,
    pub output: OutputConfig,
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

/// Built-in configuration for each case tag.
pub fn case_library(tag: CaseTag) -> CaseConfig {
    let unit = MeshTopology::periodic_box([4; 3], [-1.0; 3], [1.0; 3], 4);
    let output = |interval: f64, profiles: bool| OutputConfig {
        directory: format!("output/{tag}"),
        interval,
        profiles,
    };
    let rusanov = FluxConfig {
        surface: NumericalFlux::Rusanov,
        subcell: NumericalFlux::Rusanov,
        two_point: TwoPointFlux::Ch,
    };
    let mut cfg = match tag {
        CaseTag::FreeStream | CaseTag::Custom => CaseConfig {
            case: tag,
            seed: 0,
            degree: 4,
            fv_order: FvOrder::First,
            gas: GasModel::default(),
            motion: MotionSpec::corner_sinusoid_default(&unit.domain(), unit.cells),
            mesh: unit,
            flow: FlowSpec::Constant {
                density: 1.0,
                velocity: [0.3; 3],
                pressure: 17.857,
            },
            fluxes: rusanov,
            blending: BlendMode::Random {
                low: 0.0,
                high: 1.0,
                seed: 0,
            },
            time: StepController {
                cfl: 0.9,
                end_time: 1.0,
                fixed_dt: None,
            },
            output: output(0.25, false),
        },
        CaseTag::Convergence => CaseConfig {
            case: tag,
            seed: 0,
            degree: 4,
            fv_order: FvOrder::First,
            gas: GasModel::default(),
            mesh: unit,
            // Absolute amplitude, so every refinement level sees the same mapping;
            // it matches the free-stream deformation on the 4^3 p-refinement mesh.
            motion: MotionSpec::CornerSinusoid {
                amplitude: [0.025; 3],
                angular_frequency: 2.0 * PI,
            },
            flow: FlowSpec::DensityWave {
                density: 1.0,
                amplitude: 0.3,
                velocity: [0.3; 3],
                pressure: 1.0,
            },
            fluxes: rusanov,
            blending: BlendMode::Fixed { value: 0.0 },
            time: StepController {
                cfl: 0.1,
                // Shorter runs stay pre-asymptotic on the coarse levels.
                end_time: 1.0,
                fixed_dt: None,
            },
            output: output(0.25, false),
        },
        CaseTag::Tgv => CaseConfig {
            case: tag,
            seed: 0,
            degree: 3,
            fv_order: FvOrder::First,
            gas: GasModel::default(),
            mesh: MeshTopology::periodic_box([16; 3], [0.0; 3], [2.0 * PI; 3], 2),
            motion: MotionSpec::StandingWave {
                amplitude: 0.2,
                wavenumbers: [1.0; 3],
                angular_frequency: 2.0 * PI,
            },
            flow: FlowSpec::TaylorGreen { mach: 0.1 },
            fluxes: FluxConfig {
                surface: NumericalFlux::Central,
                subcell: NumericalFlux::Central,
                two_point: TwoPointFlux::Ch,
            },
            blending: BlendMode::Fixed { value: 0.3 },
            time: StepController {
                cfl: 0.25,
                end_time: 1.0,
                fixed_dt: None,
            },
            output: output(0.05, false),
        },
        CaseTag::Piston => CaseConfig {
            case: tag,
            seed: 0,
            degree: 3,
            fv_order: FvOrder::Second,
            gas: GasModel::default(),
            mesh: MeshTopology {
                cells: [280, 1, 1],
                lower: [-20.0, 0.0, 0.0],
                upper: [50.0, 10.0, 10.0],
                periodic: [false, true, true],
                geometry_degree: 1,
            },
            motion: MotionSpec::PistonChannel {
                piston_speed: 2.0,
                piston_start: 0.0,
            },
            flow: FlowSpec::Constant {
                density: 1.0,
                velocity: [0.0; 3],
                pressure: 1.0 / 1.4,
            },
            fluxes: rusanov,
            blending: BlendMode::Indicator(Default::default()),
            time: StepController {
                cfl: 0.9,
                end_time: 11.0,
                fixed_dt: None,
            },
            output: output(1.0, true),
        },
    };
    cfg.apply_seed(cfg.seed);
    cfg
}

/// Recursive table merge; a sub-table naming a different `kind` or `mode`
/// than the base replaces it instead of merging.
fn overlay(base: &mut toml::Table, top: toml::Table) {
    for (key, value) in top {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(t)) => {
                let switches = ["kind", "mode"]
                    .iter()
                    .any(|tag| t.get(*tag).is_some_and(|v| b.get(*tag) != Some(v)));
                if switches {
                    *b = t;
                } else {
                    overlay(b, t);
                }
            }
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

impl CaseConfig {
    /// Parses a configuration file, lays it over the defaults of its case
    /// (or of `case_override`) and validates the result.
    pub fn from_toml(text: &str, case_override: Option<CaseTag>) -> Result<Self, ConfigError> {
        let top: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        let tag = match case_override {
            Some(t) => t,
            None => match top.get("case") {
                Some(toml::Value::String(s)) => s.parse()?,
                Some(_) => return Err(invalid("`case` must be a string")),
                None => return Err(invalid("missing `case`")),
            },
        };
        let mut base = toml::Table::try_from(case_library(tag)).map_err(|e| ConfigError::Parse(e.to_string()))?;
        overlay(&mut base, top);
        base.insert("case".into(), toml::Value::String(tag.as_str().into()));
        let mut cfg: CaseConfig = base.try_into().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        cfg.apply_seed(cfg.seed);
        cfg.validate()?;
        Ok(cfg)
    }

    /// Normalised TOML, which parses back to the same configuration.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is always representable")
    }

    /// Sets the run seed and every seed derived from it.
    pub fn apply_seed(&mut self, seed: u64) {
        self.seed = seed;
        if let BlendMode::Random { seed: s, .. } = &mut self.blending {
            *s = seed;
        }
        if let FlowSpec::RandomPerturbation { seed: s, .. } = &mut self.flow {
            *s = seed;
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        // TOML integers are signed 64-bit; larger seeds could not be echoed.
        if i64::try_from(self.seed).is_err() {
            return Err(invalid(format!("seed must be at most {}, got {}", i64::MAX, self.seed)));
        }
        if self.degree == 0 || self.degree > MAX_DEGREE {
            return Err(invalid(format!("degree must be in 1..={MAX_DEGREE}, got {}", self.degree)));
        }
        if self.mesh.geometry_degree > self.degree {
            return Err(invalid(format!(
                "geometry_degree {} exceeds degree {}",
                self.mesh.geometry_degree, self.degree
            )));
        }
        if GasModel::new(self.gas.gamma).is_none() {
            return Err(invalid(format!("gamma must exceed 1, got {}", self.gas.gamma)));
        }
        self.mesh.validate().map_err(|e| invalid(e.to_string()))?;
        self.flow.validate(&self.gas).map_err(invalid)?;
        self.blending.validate().map_err(|e| invalid(e.to_string()))?;
        self.time.validate().map_err(invalid)?;
        if !(self.output.interval >= 0.0 && self.output.interval.is_finite()) {
            return Err(invalid(format!("output interval must be >= 0, got {}", self.output.interval)));
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        let ok = match self.motion {
            MotionSpec::Static => true,
            MotionSpec::CornerSinusoid {
                amplitude,
                angular_frequency,
            } => finite(&amplitude) && angular_frequency.is_finite(),
            MotionSpec::StandingWave {
                amplitude,
                wavenumbers,
                angular_frequency,
            } => amplitude.is_finite() && finite(&wavenumbers) && angular_frequency.is_finite(),
            MotionSpec::PistonChannel {
                piston_speed,
                piston_start,
            } => {
                let x_end = piston_start + piston_speed * self.time.end_time;
                piston_speed.is_finite() && x_end > self.mesh.lower[0] && x_end < self.mesh.upper[0]
            }
        };
        if !ok {
            return Err(invalid(format!("motion parameters unusable for this run: {:?}", self.motion)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn library_cases_validate_and_round_trip() {
        for tag in CaseTag::ALL {
            let cfg = case_library(tag);
            cfg.validate().unwrap();
            let text = cfg.to_toml();
            let back = CaseConfig::from_toml(&text, None).unwrap();
            assert_eq!(back, cfg, "{tag}");
            assert_eq!(back.to_toml(), text);
        }
    }

    #[test]
    fn library_values() {
        let fs = case_library(CaseTag::FreeStream);
        assert_eq!(fs.mesh.cells, [4; 3]);
        assert!(matches!(fs.flow, FlowSpec::Constant { pressure, .. } if pressure == 17.857));
        let tgv = case_library(CaseTag::Tgv);
        assert_eq!((tgv.mesh.cells, tgv.degree, tgv.mesh.geometry_degree), ([16; 3], 3, 2));
        assert_eq!(tgv.blending, BlendMode::Fixed { value: 0.3 });
        let p = case_library(CaseTag::Piston);
        assert_eq!(p.mesh.cells, [280, 1, 1]);
        assert_eq!(p.fv_order, FvOrder::Second);
        assert!((p.mesh.spacing(0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn partial_file_overlays_defaults() {
        let cfg = CaseConfig::from_toml(
            "case = \"tgv\"\n[mesh]\ncells = [8, 8, 8]\n[time]\nend_time = 0.5\n",
            None,
        )
        .unwrap();
        assert_eq!(cfg.mesh.cells, [8; 3]);
        assert_eq!(cfg.time.end_time, 0.5);
        assert_eq!(cfg.time.cfl, 0.25);
        assert_eq!(cfg.degree, 3);
        let over = CaseConfig::from_toml("case = \"tgv\"\ndegree = 5\n", Some(CaseTag::Convergence)).unwrap();
        assert_eq!(over.case, CaseTag::Convergence);
        assert_eq!(over.degree, 5);
    }

    #[test]
    fn switching_variant_replaces_table() {
        let cfg = CaseConfig::from_toml("case = \"free_stream\"\n[blending]\nmode = \"fixed\"\nvalue = 0.5\n", None).unwrap();
        assert_eq!(cfg.blending, BlendMode::Fixed { value: 0.5 });
    }

    #[test]
    fn seed_propagates() {
        let cfg = CaseConfig::from_toml("case = \"free_stream\"\nseed = 42\n", None).unwrap();
        assert!(matches!(cfg.blending, BlendMode::Random { seed: 42, .. }));
    }

    #[test]
    fn rejects_bad_input() {
        let bad = [
            "degree = 2",
            "case = \"nope\"",
            "case = \"tgv\"\ndegree = 0",
            "case = \"tgv\"\ndegree = 1",
            "case = \"tgv\"\n[gas]\ngamma = 1.0",
            "case = \"tgv\"\n[time]\ncfl = -1.0",
            "case = \"tgv\"\nfv_order = 3",
            "case = \"tgv\"\n[blending]\nmode = \"fixed\"\nvalue = 2.0",
            "case = \"tgv\"\nunknown_key = 1",
            "case = \"piston\"\n[time]\nend_time = 100.0",
            "case = \"tgv\"\n[mesh]\ncells = [0, 1, 1]",
            "case = [",
        ];
        for text in bad {
            assert!(CaseConfig::from_toml(text, None).is_err(), "{text}");
        }
    }
}
