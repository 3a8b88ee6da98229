//! JSON run configuration. Field names mirror the long flags with
//! underscores; any flag given on the command line wins over the file.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer};
use tirpmine::abstraction::Method;
use tirpmine::detect::Representation;
use tirpmine::{MinSupport, RelationMode, SacMode};

use crate::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub raw: Option<PathBuf>,
    pub points: Option<PathBuf>,
    pub intervals: Option<PathBuf>,
    pub tirps: Option<PathBuf>,
    pub kb: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub contexts: Option<PathBuf>,
    pub cutoffs: Option<PathBuf>,
    pub folds: Option<PathBuf>,
    pub output: Option<PathBuf>,
    #[serde(deserialize_with = "parsed")]
    pub method: Option<Method>,
    pub bins: Option<usize>,
    pub paa_window: Option<usize>,
    pub percentile_step: Option<u32>,
    pub window: Option<i64>,
    #[serde(deserialize_with = "parsed")]
    pub relations: Option<RelationMode>,
    pub epsilon: Option<i64>,
    pub max_gap: Option<i64>,
    #[serde(deserialize_with = "parsed")]
    pub sac: Option<SacMode>,
    #[serde(deserialize_with = "parsed")]
    pub min_vs: Option<MinSupport>,
    pub max_size: Option<usize>,
    #[serde(deserialize_with = "parsed")]
    pub rep: Option<Representation>,
    pub mining_folds: Option<usize>,
    pub cv_folds: Option<usize>,
    pub holdout: Option<usize>,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
}

/// Accepts either a string or a bare number and parses it with `FromStr`,
/// so `"min_vs": 0.5` and `"min_vs": "1/2"` both work.
fn parsed<'de, D, T>(d: D) -> Result<Option<T>, D::Error>
where
    D: Deserializer<'de>,
    T: FromStr,
    T::Err: Display,
{
    let v = Option::<serde_json::Value>::deserialize(d)?;
    let text = match v {
        None | Some(serde_json::Value::Null) => return Ok(None),
        Some(serde_json::Value::String(s)) => s,
        Some(serde_json::Value::Number(n)) => n.to_string(),
        Some(other) => {
            return Err(serde::de::Error::custom(format!(
                "unexpected value {other}"
            )))
        }
    };
    text.parse().map(Some).map_err(serde::de::Error::custom)
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }
}

/// Flag value, else config value.
pub fn pick<T>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

/// Like [`pick`] for paths that the command cannot do without.
pub fn need(flag: Option<PathBuf>, file: Option<PathBuf>, what: &str) -> Result<PathBuf, CliError> {
    pick(flag, file).ok_or_else(|| CliError::Usage(format!("missing --{what}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_and_strings_parse() {
        let c: RunConfig = serde_json::from_str(
            r#"{"min_vs": 0.5, "sac": "csac", "relations": "abstract3", "bins": 4}"#,
        )
        .unwrap();
        assert_eq!(c.min_vs, Some(MinSupport::new(1, 2).unwrap()));
        assert_eq!(c.sac, Some(SacMode::Csac));
        assert_eq!(c.relations, Some(RelationMode::Abstract3));
        assert_eq!(c.bins, Some(4));
        let c: RunConfig =
            serde_json::from_str(r#"{"min_vs": "7/10", "method": "td4c-kl"}"#).unwrap();
        assert_eq!(c.min_vs, Some(MinSupport::new(7, 10).unwrap()));
        assert_eq!(c.method, Some(Method::Td4cKl));
    }

    #[test]
    fn unknown_fields_and_bad_values_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"min_support": 0.5}"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"sac": "strict"}"#).is_err());
    }

    #[test]
    fn flags_win() {
        assert_eq!(pick(Some(1), Some(2)), Some(1));
        assert_eq!(pick(None, Some(2)), Some(2));
    }
}
