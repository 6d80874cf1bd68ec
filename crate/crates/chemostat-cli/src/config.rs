//! Run configuration: JSON file mirroring the library types, with the
//! reference parameter set as the default.

use std::path::{Path, PathBuf};

use chemostat::dynamics::IntegratorConfig;
use chemostat::growth::BioParams;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Svg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Parameters {
    pub m1: f64,
    pub m2: f64,
    pub k1: f64,
    pub k2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub a1: f64,
    pub a2: f64,
    pub y1: f64,
    pub y2: f64,
}

impl Default for Parameters {
    fn default() -> Self {
        let p = BioParams::<f64>::default();
        Parameters {
            m1: p.m1,
            m2: p.m2,
            k1: p.k1,
            k2: p.k2,
            beta1: p.beta1,
            beta2: p.beta2,
            alpha1: p.alpha1,
            alpha2: p.alpha2,
            a1: p.a1,
            a2: p.a2,
            y1: p.y1,
            y2: p.y2,
        }
    }
}

impl Parameters {
    pub fn to_bio(&self) -> BioParams<f64> {
        BioParams {
            m1: self.m1,
            m2: self.m2,
            k1: self.k1,
            k2: self.k2,
            beta1: self.beta1,
            beta2: self.beta2,
            alpha1: self.alpha1,
            alpha2: self.alpha2,
            a1: self.a1,
            a2: self.a2,
            y1: self.y1,
            y2: self.y2,
        }
    }
}

/// Exactly one operating mode: a single point, a vertical line (fixed
/// `S_in`, a dilution range), or a rectangular window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
pub enum Operating {
    Point {
        s_in: f64,
        d: f64,
    },
    Line {
        s_in: f64,
        d_min: f64,
        d_max: f64,
        #[serde(default = "default_line_samples")]
        samples: usize,
    },
    Grid {
        s_in_min: f64,
        s_in_max: f64,
        d_min: f64,
        d_max: f64,
        #[serde(default = "default_grid_res")]
        resolution: [usize; 2],
    },
}

fn default_line_samples() -> usize {
    200
}

fn default_grid_res() -> [usize; 2] {
    [200, 200]
}

impl Default for Operating {
    fn default() -> Self {
        Operating::Point { s_in: 1.0, d: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Integrator {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_max: f64,
    pub t_end: f64,
    pub convergence_radius: f64,
}

impl Default for Integrator {
    fn default() -> Self {
        let c = IntegratorConfig::<f64>::default();
        Integrator {
            rtol: c.rtol,
            atol: c.atol,
            h_init: c.h_init,
            h_max: c.h_max,
            t_end: c.t_end,
            convergence_radius: c.convergence_radius,
        }
    }
}

impl Integrator {
    pub fn to_config(&self) -> IntegratorConfig<f64> {
        IntegratorConfig {
            rtol: self.rtol,
            atol: self.atol,
            h_init: self.h_init,
            h_max: self.h_max,
            t_end: self.t_end,
            convergence_radius: self.convergence_radius,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Output {
    pub dir: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for Output {
    fn default() -> Self {
        Output {
            dir: PathBuf::from("out"),
            formats: vec![Format::Csv],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub parameters: Parameters,
    pub operating: Operating,
    pub integrator: Integrator,
    pub output: Output,
    /// Initial conditions for `simulate`.
    pub initial_conditions: Vec<[f64; 3]>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| format!("invalid config {}: {e}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.output.formats.is_empty() {
            return Err("output.formats must not be empty".into());
        }
        self.parameters
            .to_bio()
            .validate()
            .map_err(|e| e.to_string())?;
        self.integrator
            .to_config()
            .validate()
            .map_err(|e| e.to_string())?;
        match self.operating {
            Operating::Point { s_in, d } => {
                if !(s_in > 0.0 && d > 0.0) {
                    return Err(format!("operating point ({s_in}, {d}) must be positive"));
                }
            }
            Operating::Line {
                s_in,
                d_min,
                d_max,
                samples,
            } => {
                if !(s_in > 0.0 && d_min > 0.0 && d_max > d_min) {
                    return Err("line mode needs s_in > 0 and 0 < d_min < d_max".into());
                }
                if samples < 2 {
                    return Err("line mode needs at least 2 samples".into());
                }
            }
            Operating::Grid {
                s_in_min,
                s_in_max,
                d_min,
                d_max,
                resolution,
            } => {
                if !(s_in_min >= 0.0 && s_in_max > s_in_min && d_min >= 0.0 && d_max > d_min) {
                    return Err("grid mode needs increasing nonnegative ranges".into());
                }
                if resolution[0] < 2 || resolution[1] < 2 {
                    return Err("grid resolution must be at least 2 per axis".into());
                }
            }
        }
        for ic in &self.initial_conditions {
            if ic.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(format!("initial condition {ic:?} must be nonnegative"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let cfg = RunConfig::default();
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn modes_round_trip() {
        for operating in [
            Operating::Point { s_in: 1.0, d: 0.7 },
            Operating::Line {
                s_in: 1.0,
                d_min: 0.05,
                d_max: 5.0,
                samples: 400,
            },
            Operating::Grid {
                s_in_min: 0.0,
                s_in_max: 1.0,
                d_min: 0.0,
                d_max: 2.0,
                resolution: [100, 150],
            },
        ] {
            let cfg = RunConfig {
                operating,
                ..Default::default()
            };
            let text = serde_json::to_string(&cfg).unwrap();
            let back: RunConfig = serde_json::from_str(&text).unwrap();
            assert_eq!(cfg, back);
        }
    }

    #[test]
    fn rejects_empty_formats() {
        let cfg = RunConfig {
            output: Output {
                formats: vec![],
                ..Default::default()
            },
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn rejects_zero_feed_point() {
        let cfg = RunConfig {
            operating: Operating::Point { s_in: 0.0, d: 0.5 },
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn default_parameters_are_the_reference_set() {
        let p = Parameters::default();
        assert_eq!(p.m1, 4.0);
        assert_eq!(p.beta1, 1.2);
        assert_eq!(p.alpha2, 0.5);
        assert_eq!(p.a1, 0.8);
    }
}
