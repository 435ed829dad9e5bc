//! Declarative run configuration, read from TOML.
//!
//! Every input that is not fixed by the geometry itself (action tables,
//! matrices, metric data, seeds) lives here.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use taugeo_core::sphere::XActionTable;

use crate::error::{CliError, CliResult};

/// Environment variable naming the directory searched for relative config paths.
pub const CONFIG_DIR_ENV: &str = "TAUGEO_CONFIG_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Qplane,
    Shiftline,
    Matrix,
    Sphere,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ScalarMode {
    Exact,
    Float,
}

/// Families of checks that can be selected independently.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Structure,
    Curvature,
    Torsion,
    Metric,
    Uniqueness,
    LeviCivita,
    Sphere,
}

fn default_seed() -> u64 {
    42
}

fn default_samples() -> usize {
    200
}

fn default_tables() -> usize {
    5
}

fn default_tolerance() -> f64 {
    1e-9
}

fn default_scalar() -> ScalarMode {
    ScalarMode::Exact
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub preset: Preset,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Random samples per randomized check.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Random Christoffel tables per constructor/checker closure suite.
    #[serde(default = "default_tables")]
    pub tables: usize,
    #[serde(default = "default_scalar")]
    pub scalar: ScalarMode,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Selected suites; all when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suites: Option<Vec<Suite>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Perturb constructed Christoffel symbols before checking them.
    #[serde(default)]
    pub inject_corrupt_gamma: bool,
    #[serde(default)]
    pub qplane: QplaneParams,
    #[serde(default)]
    pub shiftline: ShiftlineParams,
    #[serde(default)]
    pub matrix: MatrixParams,
    #[serde(default)]
    pub sphere: SphereParams,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QplaneParams {
    /// Exponent of `x` in the example connection.
    pub n: u32,
    /// Exponent of `y` in the example connection.
    pub m: u32,
}

impl Default for QplaneParams {
    fn default() -> Self {
        Self { n: 1, m: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShiftlineParams {
    /// Step of the difference operator, a rational literal.
    pub hbar: String,
}

impl Default for ShiftlineParams {
    fn default() -> Self {
        Self { hbar: "1/2".into() }
    }
}

/// Matrix data as rows of scalar literals such as `"1/2 - i"`.
pub type MatrixRows = Vec<Vec<String>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MatrixParams {
    /// Matrix size when `us` is generated.
    pub size: usize,
    /// Number of generated matrices when `us` is absent.
    pub count: usize,
    /// Commuting invertible matrices; seeded random commuting unitaries when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub us: Option<Vec<MatrixRows>>,
    /// Common eigenvector used for the rank-one projector.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v0: Option<Vec<String>>,
    /// Anchor matrices of the full Levi-Civita construction; defaults to `us`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub es: Option<Vec<MatrixRows>>,
    /// Metric matrix; defaults to the identity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h0: Option<MatrixRows>,
    /// Real metric scale on the rank-one module.
    pub h0_hat: String,
    /// Anchor scalars of the vector-mode construction; default all ones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<String>>,
}

impl Default for MatrixParams {
    fn default() -> Self {
        Self { size: 3, count: 2, us: None, v0: None, es: None, h0: None, h0_hat: "2".into(), lambdas: None }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SphereParams {
    /// Solve for the action table instead of reading it.
    #[serde(default)]
    pub solve: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<XActionTable>,
}

impl RunConfig {
    pub fn new(preset: Preset) -> Self {
        Self {
            preset,
            seed: default_seed(),
            samples: default_samples(),
            tables: default_tables(),
            scalar: default_scalar(),
            tolerance: default_tolerance(),
            suites: None,
            output: None,
            inject_corrupt_gamma: false,
            qplane: QplaneParams::default(),
            shiftline: ShiftlineParams::default(),
            matrix: MatrixParams::default(),
            sphere: SphereParams::default(),
        }
    }

    /// Parse TOML text; `path` only labels diagnostics.
    pub fn parse(text: &str, path: &Path) -> CliResult<Self> {
        let config: Self = toml::from_str(text).map_err(|source| CliError::ConfigParse { path: path.to_path_buf(), source })?;
        config.validate(path)?;
        Ok(config)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let resolved = resolve_config_path(path);
        let text = std::fs::read_to_string(&resolved).map_err(|source| CliError::Io { path: resolved.clone(), source })?;
        Self::parse(&text, &resolved)
    }

    pub fn validate(&self, path: &Path) -> CliResult<()> {
        let invalid = |message: &str| Err(CliError::InvalidConfig { path: path.to_path_buf(), message: message.into() });
        if self.seed == 0 {
            return invalid("seed must be positive");
        }
        if self.samples == 0 {
            return invalid("samples must be positive");
        }
        if self.tables == 0 {
            return invalid("tables must be positive");
        }
        if !(self.tolerance.is_finite() && self.tolerance >= 0.0) {
            return invalid("tolerance must be a finite non-negative number");
        }
        if self.scalar == ScalarMode::Float && self.preset != Preset::Matrix {
            return invalid("float scalars are only available for the matrix preset");
        }
        if self.qplane.n == 0 || self.qplane.m == 0 {
            return invalid("qplane.n and qplane.m must be positive");
        }
        if self.matrix.size == 0 || self.matrix.count == 0 {
            return invalid("matrix.size and matrix.count must be positive");
        }
        Ok(())
    }

    pub fn runs(&self, suite: Suite) -> bool {
        self.suites.as_ref().is_none_or(|s| s.contains(&suite))
    }

    /// Tolerance passed to the core: zero for exact arithmetic.
    pub fn effective_tolerance(&self) -> f64 {
        match self.scalar {
            ScalarMode::Exact => 0.0,
            ScalarMode::Float => self.tolerance,
        }
    }
}

/// Relative paths that do not exist are looked up in [`CONFIG_DIR_ENV`].
pub fn resolve_config_path(path: &Path) -> PathBuf {
    if path.is_relative() && !path.exists() {
        if let Some(dir) = std::env::var_os(CONFIG_DIR_ENV) {
            return Path::new(&dir).join(path);
        }
    }
    path.to_path_buf()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let config = RunConfig::parse("preset = \"qplane\"", Path::new("x.toml")).unwrap();
        assert_eq!(config, RunConfig::new(Preset::Qplane));
    }

    #[test]
    fn unknown_keys_are_rejected_with_location() {
        let err = RunConfig::parse("preset = \"qplane\"\n[qplane]\nn = 1\nm = 2\nk = 3\n", Path::new("x.toml")).unwrap_err();
        let text = err.to_string();
        assert!(text.contains("unknown field `k`"), "{text}");
        assert!(text.contains("line 5"), "{text}");
    }

    #[test]
    fn empty_config_is_an_error() {
        let err = RunConfig::parse("", Path::new("empty.toml")).unwrap_err();
        assert!(err.to_string().contains("missing field `preset`"), "{err}");
    }

    #[test]
    fn positivity_is_enforced() {
        assert!(RunConfig::parse("preset = \"qplane\"\nseed = 0", Path::new("x.toml")).is_err());
        assert!(RunConfig::parse("preset = \"qplane\"\nsamples = 0", Path::new("x.toml")).is_err());
        assert!(RunConfig::parse("preset = \"qplane\"\nscalar = \"float\"", Path::new("x.toml")).is_err());
    }

    #[test]
    fn partial_sections_keep_defaults() {
        let config = RunConfig::parse("preset = \"matrix\"\n[matrix]\nsize = 4", Path::new("x.toml")).unwrap();
        assert_eq!(config.matrix.size, 4);
        assert_eq!(config.matrix.h0_hat, "2");
    }

    #[test]
    fn suites_parse_in_snake_case() {
        let config = RunConfig::parse("preset = \"matrix\"\nsuites = [\"levi_civita\", \"curvature\"]", Path::new("x.toml")).unwrap();
        assert!(config.runs(Suite::LeviCivita));
        assert!(!config.runs(Suite::Structure));
    }
}
