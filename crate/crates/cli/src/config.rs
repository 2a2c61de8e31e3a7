use std::fs;
use std::path::Path;

use caplaw::{Error, FamilySpec, Result};
use clap::{Args, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Both,
}

impl Format {
    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }

    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }
}

pub fn config_error(msg: impl std::fmt::Display) -> Error {
    Error::Domain(msg.to_string())
}

/// A config file split into the shared keys and the command parameters.
pub struct Loaded<T> {
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub params: T,
}

/// Reads `path` (if any) as a JSON object. Keys `command`, `seed` and
/// `format` are shared; the rest must match the fields of `T`.
pub fn load<T: DeserializeOwned + Default>(
    path: Option<&Path>,
    command: &str,
) -> Result<Loaded<T>> {
    let Some(path) = path else {
        return Ok(Loaded {
            seed: None,
            format: None,
            params: T::default(),
        });
    };
    let text = fs::read_to_string(path)
        .map_err(|e| config_error(format!("cannot read config {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| config_error(format!("config {} is not valid JSON: {e}", path.display())))?;
    let Value::Object(mut map) = value else {
        return Err(config_error("config must be a JSON object"));
    };
    if let Some(found) = map.remove("command") {
        if found.as_str() != Some(command) {
            return Err(config_error(format!(
                "config is for command {found}, not {command:?}"
            )));
        }
    }
    let seed = take::<u64>(&mut map, "seed")?;
    let format = take::<Format>(&mut map, "format")?;
    let params = serde_json::from_value(Value::Object(map))
        .map_err(|e| config_error(format!("invalid {command} config: {e}")))?;
    Ok(Loaded {
        seed,
        format,
        params,
    })
}

fn take<T: DeserializeOwned>(map: &mut Map<String, Value>, key: &str) -> Result<Option<T>> {
    map.remove(key)
        .map(|v| serde_json::from_value(v).map_err(|e| config_error(format!("invalid {key}: {e}"))))
        .transpose()
}

/// Fully resolved configuration written next to every output.
#[derive(Serialize)]
pub struct Echo<'a, T: Serialize> {
    pub command: &'a str,
    pub seed: u64,
    pub format: Format,
    #[serde(flatten)]
    pub params: &'a T,
}

/// Family overrides shared by several subcommands.
#[derive(Debug, Args)]
pub struct FamilyArgs {
    /// JSON file holding a family, e.g. {"gaussian": {"means": [0], "sigma": 1}}
    #[arg(long, value_name = "PATH")]
    pub family: Option<std::path::PathBuf>,
    /// Comma-separated means of a Gaussian family
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub means: Option<Vec<f64>>,
    /// Common standard deviation of a Gaussian family
    #[arg(long)]
    pub sigma: Option<f64>,
}

impl FamilyArgs {
    pub fn apply(&self, spec: &mut FamilySpec) -> Result<()> {
        if let Some(path) = &self.family {
            let text = fs::read_to_string(path)
                .map_err(|e| config_error(format!("cannot read family {}: {e}", path.display())))?;
            *spec = serde_json::from_str(&text)
                .map_err(|e| config_error(format!("invalid family {}: {e}", path.display())))?;
        }
        if self.means.is_some() || self.sigma.is_some() {
            let (means, sigma) = match spec {
                FamilySpec::Gaussian { means, sigma } => (means.clone(), *sigma),
                FamilySpec::Discrete { .. } => (vec![0.0], 1.0),
            };
            *spec = FamilySpec::Gaussian {
                means: self.means.clone().unwrap_or(means),
                sigma: self.sigma.unwrap_or(sigma),
            };
        }
        Ok(())
    }
}

pub fn desk_family() -> FamilySpec {
    FamilySpec::Gaussian {
        means: vec![-0.3, 0.0, 0.3],
        sigma: 1.0,
    }
}
