//! Run configuration: a TOML file optionally overridden by flags.
//!
//! The effective configuration is validated before any work starts,
//! echoed verbatim to `<output_dir>/config_used.toml`, and hashed; the
//! hash is embedded as a `# config_digest=…` comment in every output
//! file so any table can be traced back to the exact run settings.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use esgvine::panel::{ClassificationMode, Period, PeriodSpec};
use esgvine::risk::LambdaPolicy;
use esgvine::store::bytes_digest;
use esgvine::vine::{ModelKind, DEFAULT_PSI0};

use crate::errors::CliError;

/// Which pair-copula catalogs `fit` should run.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum,
)]
#[serde(rename_all = "lowercase")]
pub enum CatalogChoice {
    /// Single-parameter families fitted by τ-inversion.
    Itau,
    /// Full catalog (incl. two-parameter families) under MLE.
    Parametric,
    /// Gaussian-only baseline.
    Gaussian,
    /// All three of the above.
    All,
}

impl CatalogChoice {
    pub fn kinds(self) -> Vec<ModelKind> {
        match self {
            CatalogChoice::Itau => vec![ModelKind::Itau],
            CatalogChoice::Parametric => vec![ModelKind::Parametric],
            CatalogChoice::Gaussian => vec![ModelKind::Gaussian],
            CatalogChoice::All => {
                vec![ModelKind::Itau, ModelKind::Parametric, ModelKind::Gaussian]
            }
        }
    }
}

/// Clap-friendly mirror of [`LambdaPolicy`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum LambdaPolicyArg {
    IncludeAll,
    DropZerosAndOnes,
}

impl From<LambdaPolicyArg> for LambdaPolicy {
    fn from(a: LambdaPolicyArg) -> LambdaPolicy {
        match a {
            LambdaPolicyArg::IncludeAll => LambdaPolicy::IncludeAll,
            LambdaPolicyArg::DropZerosAndOnes => LambdaPolicy::DropZerosAndOnes,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inputs {
    pub returns: PathBuf,
    pub esg: PathBuf,
    pub meta: PathBuf,
    pub market: PathBuf,
}

impl Inputs {
    /// Input files in digest order.
    pub fn paths(&self) -> [&Path; 4] {
        [&self.returns, &self.esg, &self.meta, &self.market]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PeriodsConfig {
    pub classification_mode: ClassificationMode,
    pub thresholds: [f64; 3],
    /// Study periods; empty means the built-in default split.
    pub period: Vec<Period>,
}

impl Default for PeriodsConfig {
    fn default() -> PeriodsConfig {
        let d = PeriodSpec::default();
        PeriodsConfig {
            classification_mode: d.classification_mode,
            thresholds: d.thresholds,
            period: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub catalog: CatalogChoice,
    /// Sparsity prior of the mBIC penalty, in (0, 1).
    pub psi0: f64,
    /// Confidence levels for the VaR/ES table, each in (0, 1).
    pub var_levels: Vec<f64>,
}

impl Default for ModelConfig {
    fn default() -> ModelConfig {
        ModelConfig {
            catalog: CatalogChoice::Itau,
            psi0: DEFAULT_PSI0,
            var_levels: vec![0.90, 0.95, 0.99],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RiskConfig {
    pub lambda_policy: LambdaPolicy,
}

impl Default for RiskConfig {
    fn default() -> RiskConfig {
        RiskConfig { lambda_policy: LambdaPolicy::DropZerosAndOnes }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub seed: u64,
    pub output_dir: PathBuf,
    /// Worker-thread cap for parallel fitting; 0 = library default.
    pub workers: usize,
}

impl Default for RunSection {
    fn default() -> RunSection {
        RunSection { seed: 42, output_dir: PathBuf::from("out"), workers: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub inputs: Inputs,
    #[serde(default)]
    pub periods: PeriodsConfig,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub risk: RiskConfig,
    #[serde(default)]
    pub run: RunSection,
}

/// Flag-level overrides applied on top of the config file.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// Override the output directory.
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// Override the RNG seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the catalog selection.
    #[arg(long, value_enum)]
    pub catalog: Option<CatalogChoice>,
    /// Override the mBIC sparsity prior.
    #[arg(long)]
    pub psi0: Option<f64>,
    /// Override the worker-thread cap (0 = library default).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Override the λ aggregation policy.
    #[arg(long, value_enum)]
    pub lambda_policy: Option<LambdaPolicyArg>,
}

impl RunConfig {
    pub fn from_file(path: &Path, overrides: &Overrides) -> Result<RunConfig, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut config: RunConfig = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if let Some(dir) = &overrides.output_dir {
            config.run.output_dir = dir.clone();
        }
        if let Some(seed) = overrides.seed {
            config.run.seed = seed;
        }
        if let Some(catalog) = overrides.catalog {
            config.model.catalog = catalog;
        }
        if let Some(psi0) = overrides.psi0 {
            config.model.psi0 = psi0;
        }
        if let Some(workers) = overrides.workers {
            config.run.workers = workers;
        }
        if let Some(policy) = overrides.lambda_policy {
            config.risk.lambda_policy = policy.into();
        }
        config.validate()?;
        Ok(config)
    }

    /// The effective period specification.
    pub fn period_spec(&self) -> PeriodSpec {
        let mut spec = PeriodSpec::default();
        spec.classification_mode = self.periods.classification_mode;
        spec.thresholds = self.periods.thresholds;
        if !self.periods.period.is_empty() {
            spec.periods = self.periods.period.clone();
        }
        spec
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.period_spec().validate().map_err(|e| CliError::Config(e.to_string()))?;
        for p in &self.period_spec().periods {
            let label = &p.label;
            let clean = !label.is_empty()
                && label.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_');
            if !clean {
                return Err(CliError::Config(format!(
                    "period label {label:?} may only contain letters, digits, '-' and '_'"
                )));
            }
        }
        if !(self.model.psi0 > 0.0 && self.model.psi0 < 1.0) {
            return Err(CliError::Config(format!(
                "psi0 must lie in (0, 1), got {}",
                self.model.psi0
            )));
        }
        if self.model.var_levels.is_empty() {
            return Err(CliError::Config("var_levels must not be empty".into()));
        }
        for &level in &self.model.var_levels {
            if !(level > 0.0 && level < 1.0) {
                return Err(CliError::Config(format!(
                    "VaR level must lie in (0, 1), got {level}"
                )));
            }
        }
        for path in self.inputs.paths() {
            if path.as_os_str().is_empty() {
                return Err(CliError::Config("input paths must not be empty".into()));
            }
        }
        if self.run.output_dir.as_os_str().is_empty() {
            return Err(CliError::Config("output_dir must not be empty".into()));
        }
        Ok(())
    }

    /// Canonical serialization; its hash is the run's config digest.
    pub fn canonical_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}

/// Everything a subcommand needs: validated config, derived period
/// spec, config digest, and the created output directory.
pub struct Ctx {
    pub config: RunConfig,
    pub spec: PeriodSpec,
    pub digest: String,
    pub out: PathBuf,
}

impl Ctx {
    pub fn new(config: RunConfig) -> Result<Ctx, CliError> {
        let spec = config.period_spec();
        let out = config.run.output_dir.clone();
        fs::create_dir_all(&out).map_err(|e| CliError::io(&out, e))?;
        let canonical = config.canonical_toml();
        let digest = bytes_digest(canonical.as_bytes());
        let echo = out.join("config_used.toml");
        fs::write(&echo, &canonical).map_err(|e| CliError::io(&echo, e))?;
        Ok(Ctx { config, spec, digest, out })
    }
}
