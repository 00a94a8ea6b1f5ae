//! JSON run configuration.
//!
//! ```json
//! {
//!   "params": { "nu": 6.283e7, "omega0": ..., "omega_c": ..., "omega_L": ...,
//!               "Omega": ..., "g": ..., "eta_L": 0.05, "eta_c": 0.05 },
//!   "layout": { "vib_cutoff": 5, "cav_cutoff": 5 },
//!   "model": "effective",
//!   "noise": { "kappa": 5.0, "gamma": 0.0, "heating_rate": 0.0 },
//!   "grid_policy": 20,
//!   "output_path": "report.json"
//! }
//! ```
//!
//! `model`, `noise`, `grid_policy` and `output_path` are optional.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::gates::Model;
use crate::hamiltonian::PhysParams;
use crate::noise::NoiseParams;
use crate::propagate::GridPolicy;
use crate::space::ModeLayout;

pub const DEFAULT_GRID_POLICY: u32 = 20;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    params: PhysParams,
    layout: ModeLayout,
    #[serde(default)]
    model: Model,
    #[serde(default)]
    noise: Option<NoiseParams>,
    #[serde(default)]
    grid_policy: Option<i64>,
    #[serde(default)]
    output_path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: PhysParams,
    pub layout: ModeLayout,
    pub model: Model,
    /// `None` means a closed system.
    pub noise: Option<NoiseParams>,
    pub grid_policy: GridPolicy,
    pub output_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        parse_config(&text)
    }
}

/// Parse and validate a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| {
        use serde_json::error::Category;
        match e.classify() {
            Category::Syntax | Category::Eof | Category::Io => Error::Parse {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            },
            Category::Data => Error::Validation(e.to_string()),
        }
    })?;
    raw.params.validate()?;
    if let Some(n) = &raw.noise {
        n.validate()?;
    }
    let steps = raw.grid_policy.unwrap_or(DEFAULT_GRID_POLICY as i64);
    if !(1..=u32::MAX as i64).contains(&steps) {
        return Err(Error::Validation(format!(
            "grid_policy must be a positive integer, got {steps}"
        )));
    }
    Ok(RunConfig {
        params: raw.params,
        layout: raw.layout,
        model: raw.model,
        noise: raw.noise,
        grid_policy: GridPolicy::new(steps as u32)?,
        output_path: raw.output_path,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> serde_json::Value {
        serde_json::json!({
            "params": serde_json::to_value(PhysParams::desk_default()).unwrap(),
            "layout": {"vib_cutoff": 5, "cav_cutoff": 5},
        })
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(&minimal().to_string()).unwrap();
        assert_eq!(c.model, Model::Effective);
        assert_eq!(c.noise, None);
        assert_eq!(c.grid_policy, GridPolicy::default());
        assert_eq!(c.output_path, None);
        assert_eq!(c.params, PhysParams::desk_default());
    }

    #[test]
    fn eta_out_of_range_names_the_field() {
        let mut v = minimal();
        v["params"]["eta_c"] = serde_json::json!(1.5);
        let e = parse_config(&v.to_string()).unwrap_err();
        assert!(matches!(e, Error::Validation(_)));
        assert!(e.to_string().contains("eta_c must lie in (0,1)"), "{e}");
    }

    #[test]
    fn unknown_keys_rejected() {
        let mut v = minimal();
        v["params"]["omega_x"] = serde_json::json!(1.0);
        let e = parse_config(&v.to_string()).unwrap_err();
        assert!(e.to_string().contains("omega_x"), "{e}");

        let mut v = minimal();
        v["extra"] = serde_json::json!(1);
        assert!(parse_config(&v.to_string()).unwrap_err().to_string().contains("extra"));
    }

    #[test]
    fn syntax_error_has_position() {
        let e = parse_config("{\n  \"params\": ,\n}").unwrap_err();
        match e {
            Error::Parse { line, column, .. } => {
                assert_eq!(line, 2);
                assert!(column > 0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn other_constraints() {
        let mut v = minimal();
        v["grid_policy"] = serde_json::json!(0);
        assert!(parse_config(&v.to_string()).unwrap_err().to_string().contains("grid_policy"));
        let mut v = minimal();
        v["layout"]["cav_cutoff"] = serde_json::json!(1);
        assert!(parse_config(&v.to_string()).is_err());
        let mut v = minimal();
        v["noise"] = serde_json::json!({"kappa": -1.0});
        assert!(parse_config(&v.to_string()).unwrap_err().to_string().contains("kappa"));
        let mut v = minimal();
        v["model"] = serde_json::json!("lab");
        v["noise"] = serde_json::json!({"kappa": 5.0});
        let c = parse_config(&v.to_string()).unwrap();
        assert_eq!(c.model, Model::Lab);
        assert_eq!(c.noise, Some(NoiseParams::microwave()));
    }
}
