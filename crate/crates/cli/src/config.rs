//! Run configuration files: TOML, or JSON when the extension says so.

use std::path::{Path, PathBuf};

use thiserror::Error;

use hydro_core::stepper::RunConfig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config not found: {0}")]
    NotFound(PathBuf),
    #[error("{path}: {msg}")]
    Unreadable { path: PathBuf, msg: String },
    #[error("{path}: {msg}")]
    Parse { path: PathBuf, msg: String },
}

pub fn parse_config(text: &str, json: bool) -> Result<RunConfig, String> {
    if json {
        serde_json::from_str(text).map_err(|e| e.to_string())
    } else {
        toml::from_str(text).map_err(|e| e.message().to_string())
    }
}

/// Relative file references in the config are resolved against the config's directory.
pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    if !path.is_file() {
        return Err(ConfigError::NotFound(path.to_path_buf()));
    }
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Unreadable { path: path.to_path_buf(), msg: e.to_string() })?;
    let json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let mut cfg = parse_config(&text, json).map_err(|msg| ConfigError::Parse { path: path.to_path_buf(), msg })?;
    let base = path.parent().unwrap_or(Path::new(""));
    let resolve = |s: &str| base.join(s).to_string_lossy().into_owned();
    cfg.initial_file = cfg.initial_file.as_deref().map(resolve);
    cfg.forcing_files = cfg.forcing_files.iter().map(|s| resolve(s)).collect();
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_and_json_agree() {
        let t = parse_config("nx = 8\nny = 8\nnz = 8\nbc = \"both\"\ndt = 0.01\nt_end = 0.1\nnorms = [\"lp:4\"]\n", false).unwrap();
        let j = parse_config(r#"{"nx": 8, "ny": 8, "nz": 8, "bc": "both", "dt": 0.01, "t_end": 0.1, "norms": ["lp:4"]}"#, true).unwrap();
        assert_eq!(t, j);
        assert_eq!(t.bc, hydro_core::BcVariant::Both);
    }

    #[test]
    fn unknown_keys_and_missing_dt_are_rejected() {
        assert!(parse_config("dt = 0.1\nt_end = 1\nsteps = 3\n", false).is_err());
        assert!(parse_config("t_end = 1\n", false).is_err());
    }
}
