//! Analysis settings and their flat `key = value` file form.
//!
//! ```text
//! # lines starting with '#' are comments
//! enabled_issues = NASE, NARV, DS
//! duplicated_setup_min_lines = 3
//! external_exception_types = HeadlessException, SQLException
//! side_effect_depth = 2
//! output_format = csv
//! fail_on_findings = true
//! ```

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::detect::IssueKind;
use crate::error::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(format!("unknown output format `{other}` (expected json or csv)")),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub enabled_issues: BTreeSet<IssueKind>,
    /// Setup lines two tests must share to count as duplicated.
    pub duplicated_setup_min_lines: usize,
    /// Exception types blamed on the environment rather than the code.
    pub external_exception_types: BTreeSet<String>,
    /// Call depth followed when computing a method's write and read sets.
    pub side_effect_depth: usize,
    pub output_format: OutputFormat,
    pub fail_on_findings: bool,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            enabled_issues: IssueKind::ALL.into_iter().collect(),
            duplicated_setup_min_lines: 2,
            external_exception_types: ["HeadlessException", "SQLException", "NotYetConnectedException"]
                .into_iter()
                .map(String::from)
                .collect(),
            side_effect_depth: crate::cut::DEFAULT_DEPTH,
            output_format: OutputFormat::Json,
            fail_on_findings: false,
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.duplicated_setup_min_lines < 2 {
            return Err(ConfigError::Invalid(format!(
                "duplicated_setup_min_lines must be at least 2, got {}",
                self.duplicated_setup_min_lines
            )));
        }
        if self.side_effect_depth < 1 {
            return Err(ConfigError::Invalid("side_effect_depth must be at least 1".into()));
        }
        if self.enabled_issues.contains(&IssueKind::Eded) && self.external_exception_types.is_empty() {
            return Err(ConfigError::Invalid("external_exception_types is empty but EDED is enabled".into()));
        }
        Ok(())
    }

    /// Reads a config file over the defaults. Keys not present keep their
    /// default value.
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text, &path.display().to_string())
    }

    /// `origin` only labels errors.
    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let mut config = AnalysisConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| ConfigError::Parse { path: origin.to_string(), line: i + 1, message };
            let (key, value) = line.split_once('=').ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            config.set(key.trim(), value.trim()).map_err(err)?;
        }
        config.validate()?;
        Ok(config)
    }

    /// Sets one field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn list(value: &str) -> impl Iterator<Item = &str> {
            value.split(',').map(str::trim).filter(|s| !s.is_empty())
        }
        fn number(key: &str, value: &str) -> Result<usize, String> {
            value.parse().map_err(|_| format!("{key} must be a non-negative integer, got `{value}`"))
        }
        match key {
            "enabled_issues" => {
                self.enabled_issues = list(value).map(|s| s.parse().map_err(|e| format!("{e}"))).collect::<Result<_, _>>()?;
            }
            "duplicated_setup_min_lines" => self.duplicated_setup_min_lines = number(key, value)?,
            "external_exception_types" => self.external_exception_types = list(value).map(String::from).collect(),
            "side_effect_depth" => self.side_effect_depth = number(key, value)?,
            "output_format" => self.output_format = value.parse()?,
            "fail_on_findings" => {
                self.fail_on_findings = value.parse().map_err(|_| format!("fail_on_findings must be true or false, got `{value}`"))?;
            }
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    /// Settings that affect findings, one `key=value` per line in a fixed
    /// order. The output format and exit policy are left out.
    pub fn canonical(&self) -> String {
        let issues: Vec<&str> = self.enabled_issues.iter().map(|k| k.as_str()).collect();
        let external: Vec<&str> = self.external_exception_types.iter().map(String::as_str).collect();
        format!(
            "duplicated_setup_min_lines={}\nenabled_issues={}\nexternal_exception_types={}\nside_effect_depth={}\n",
            self.duplicated_setup_min_lines,
            issues.join(","),
            external.join(","),
            self.side_effect_depth,
        )
    }

    /// Hex SHA-256 of [`AnalysisConfig::canonical`].
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }
}
