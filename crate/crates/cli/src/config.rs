//! Experiment configuration: TOML with the blocks `grid`, `weights`,
//! `spaces`, `wavelet`, `harness` and `output`.
//!
//! Space parameters named `weight`, `v` or `w` may be a string naming an entry
//! of the `weights` block; those references are resolved before the spaces are
//! parsed. Every `battery` table without a `seed` gets the harness seed.

use ballspace::grid::GridSpec;
use ballspace::harness::{
    Battery, ConvergenceOptions, EquivalenceOptions, ExtrapolationOptions, PairFamily, ProbeSpec, ProofChainOptions,
    RieszOptions, VectorOptions,
};
use ballspace::operators::Normalization;
use ballspace::spaces::SpaceSpec;
use ballspace::wavelets::{Family, WaveletSpec};
use ballspace::weights::WeightSpec;
use ballspace::Grid;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub grid: GridSpec,
    #[serde(default)]
    pub weights: BTreeMap<String, WeightSpec>,
    #[serde(default)]
    pub spaces: BTreeMap<String, SpaceSpec>,
    #[serde(default)]
    pub wavelet: WaveletBlock,
    pub harness: HarnessBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveletBlock {
    pub family: Family,
    #[serde(default)]
    pub base_level: i32,
    #[serde(default = "default_cascade")]
    pub cascade_level: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j_max: Option<i32>,
}

fn default_cascade() -> u32 {
    12
}

impl Default for WaveletBlock {
    fn default() -> Self {
        WaveletBlock { family: Family::Haar, base_level: 0, cascade_level: default_cascade(), j_max: None }
    }
}

impl WaveletBlock {
    pub fn spec(&self) -> WaveletSpec {
        WaveletSpec { family: self.family, base_level: self.base_level, cascade_level: self.cascade_level }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarnessBlock {
    /// Root of all randomness (ChaCha8 streams).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses one per core.
    #[serde(default)]
    pub workers: usize,
    /// Applied to every centered maximal operator in the checks.
    #[serde(default)]
    pub normalization: Normalization,
    #[serde(default)]
    pub checks: Vec<CheckEntry>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    /// Report directory; falls back to `$BALLSPACE_OUT_DIR`, then `ballspace-out`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    /// Any of `json`, `table`, `csv`; all three when empty.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub formats: Vec<String>,
}

fn default_ps() -> Vec<f64> {
    vec![2.0]
}

fn default_triples() -> usize {
    10
}

fn default_sizes() -> Vec<usize> {
    vec![4, 8, 16]
}

fn default_width() -> f64 {
    0.25
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckEntry {
    Axioms {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        space: String,
    },
    Extrapolation {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        space: String,
        family: PairFamily,
        #[serde(default)]
        options: ExtrapolationOptions,
    },
    ProofChain {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        space: String,
        #[serde(default = "default_ps")]
        p: Vec<f64>,
        #[serde(default = "default_triples")]
        triples: usize,
        #[serde(default)]
        options: ProofChainOptions,
    },
    WaveletEquivalence {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        space: String,
        battery: Battery,
        #[serde(default)]
        options: EquivalenceOptions,
    },
    Convergence {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        space: String,
        /// Expression in `x1`, `x2`, `r`; a seeded random probe when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        probe: Option<String>,
        #[serde(default)]
        options: ConvergenceOptions,
    },
    VectorValued {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        space: String,
        #[serde(default = "default_sizes")]
        sizes: Vec<usize>,
        #[serde(default = "default_width")]
        width: f64,
        #[serde(default)]
        options: VectorOptions,
    },
    RieszBoundedness {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        space: String,
        battery: Battery,
        #[serde(default)]
        options: RieszOptions,
    },
}

impl CheckEntry {
    pub fn tag(&self) -> &'static str {
        match self {
            CheckEntry::Axioms { .. } => "axioms",
            CheckEntry::Extrapolation { .. } => "extrapolation",
            CheckEntry::ProofChain { .. } => "proof_chain",
            CheckEntry::WaveletEquivalence { .. } => "wavelet_equivalence",
            CheckEntry::Convergence { .. } => "convergence",
            CheckEntry::VectorValued { .. } => "vector_valued",
            CheckEntry::RieszBoundedness { .. } => "riesz_boundedness",
        }
    }

    pub fn space(&self) -> &str {
        match self {
            CheckEntry::Axioms { space, .. }
            | CheckEntry::Extrapolation { space, .. }
            | CheckEntry::ProofChain { space, .. }
            | CheckEntry::WaveletEquivalence { space, .. }
            | CheckEntry::Convergence { space, .. }
            | CheckEntry::VectorValued { space, .. }
            | CheckEntry::RieszBoundedness { space, .. } => space,
        }
    }

    fn explicit_name(&self) -> Option<&String> {
        match self {
            CheckEntry::Axioms { name, .. }
            | CheckEntry::Extrapolation { name, .. }
            | CheckEntry::ProofChain { name, .. }
            | CheckEntry::WaveletEquivalence { name, .. }
            | CheckEntry::Convergence { name, .. }
            | CheckEntry::VectorValued { name, .. }
            | CheckEntry::RieszBoundedness { name, .. } => name.as_ref(),
        }
    }

    /// Report file stem: the explicit name or `<index>_<check>_<space>`.
    pub fn name(&self, index: usize) -> String {
        self.explicit_name().cloned().unwrap_or_else(|| format!("{index:02}_{}_{}", self.tag(), self.space()))
    }
}

const WEIGHT_KEYS: [&str; 3] = ["weight", "v", "w"];

fn resolve_weights(space: &mut toml::Value, weights: &toml::Table, path: &str) -> Result<(), ConfigError> {
    let Some(table) = space.as_table_mut() else { return Ok(()) };
    for (key, value) in table.iter_mut() {
        if WEIGHT_KEYS.contains(&key.as_str()) {
            if let Some(name) = value.as_str() {
                let w = weights
                    .get(name)
                    .ok_or_else(|| ConfigError::Validation(format!("{path}.{key} references undefined weight '{name}'")))?;
                *value = w.clone();
            }
        } else if value.is_table() {
            resolve_weights(value, weights, &format!("{path}.{key}"))?;
        }
    }
    Ok(())
}

fn ensure_batteries(harness: &mut toml::Value) {
    let Some(checks) = harness.get_mut("checks").and_then(toml::Value::as_array_mut) else { return };
    for c in checks.iter_mut().filter_map(toml::Value::as_table_mut) {
        let tag = c.get("check").and_then(toml::Value::as_str).unwrap_or_default();
        if matches!(tag, "wavelet_equivalence" | "riesz_boundedness") {
            c.entry("battery").or_insert_with(|| toml::Value::Table(toml::Table::new()));
        }
        if let Some(family) = c.get_mut("family").and_then(toml::Value::as_table_mut) {
            family.entry("battery").or_insert_with(|| toml::Value::Table(toml::Table::new()));
        }
    }
}

fn seed_batteries(value: &mut toml::Value, seed: i64) {
    match value {
        toml::Value::Table(t) => {
            for (key, v) in t.iter_mut() {
                if key == "battery" {
                    if let Some(bt) = v.as_table_mut() {
                        bt.entry("seed").or_insert(toml::Value::Integer(seed));
                        bt.entry("probes").or_insert_with(|| {
                            toml::Value::try_from(Battery::default().probes).expect("probes serialize")
                        });
                    }
                }
                seed_batteries(v, seed);
            }
        }
        toml::Value::Array(a) => a.iter_mut().for_each(|v| seed_batteries(v, seed)),
        _ => {}
    }
}

impl ExperimentConfig {
    /// Parses and validates. Syntax and type errors are [`ConfigError::Parse`];
    /// unresolved names and invalid parameters are [`ConfigError::Validation`].
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let mut doc: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        let weights = match doc.get("weights") {
            Some(toml::Value::Table(t)) => t.clone(),
            Some(_) => return Err(ConfigError::Parse("'weights' must be a table".into())),
            None => toml::Table::new(),
        };
        if let Some(toml::Value::Table(spaces)) = doc.get_mut("spaces") {
            for (name, space) in spaces.iter_mut() {
                resolve_weights(space, &weights, &format!("spaces.{name}"))?;
            }
        }
        let seed = doc
            .get("harness")
            .and_then(|h| h.get("seed"))
            .and_then(toml::Value::as_integer)
            .ok_or_else(|| ConfigError::Validation("harness.seed is required".into()))?;
        if let Some(h) = doc.get_mut("harness") {
            ensure_batteries(h);
            seed_batteries(h, seed);
        }
        let cfg: ExperimentConfig =
            toml::Value::Table(doc).try_into().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn seed(&self) -> u64 {
        self.harness.seed.unwrap_or_default()
    }

    pub fn build_grid(&self) -> Result<Grid, ConfigError> {
        Grid::try_from(self.grid.clone()).map_err(|e| ConfigError::Validation(format!("grid: {e}")))
    }

    pub fn space(&self, name: &str) -> Result<&SpaceSpec, ConfigError> {
        self.spaces.get(name).ok_or_else(|| ConfigError::Validation(format!("undefined space '{name}'")))
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let v = |msg: String| ConfigError::Validation(msg);
        if self.harness.seed.is_none() {
            return Err(v("harness.seed is required".into()));
        }
        let grid = self.build_grid()?;
        for (name, w) in &self.weights {
            w.build(&grid).map_err(|e| v(format!("weights.{name}: {e}")))?;
        }
        for (name, s) in &self.spaces {
            s.validate().map_err(|e| v(format!("spaces.{name}: {e}")))?;
        }
        self.wavelet.spec().build(grid.dim()).map_err(|e| v(format!("wavelet: {e}")))?;
        for fmt in &self.output.formats {
            if !["json", "table", "csv"].contains(&fmt.as_str()) {
                return Err(v(format!("output.formats: unknown format '{fmt}'")));
            }
        }
        let mut names = std::collections::BTreeSet::new();
        for (i, c) in self.harness.checks.iter().enumerate() {
            let at = format!("harness.checks[{i}] ({})", c.tag());
            self.space(c.space()).map_err(|e| v(format!("{at}: {e}")))?;
            if !names.insert(c.name(i)) {
                return Err(v(format!("{at}: duplicate check name '{}'", c.name(i))));
            }
            let positive = |what: &str, x: f64| {
                if x > 0.0 {
                    Ok(())
                } else {
                    Err(v(format!("{at}: {what} must be positive, got {x}")))
                }
            };
            match c {
                CheckEntry::Extrapolation { options, .. } => positive("growth_budget", options.growth_budget)?,
                CheckEntry::ProofChain { options, p, triples, .. } => {
                    positive("tol", options.tol)?;
                    positive("epsilon", options.epsilon)?;
                    if p.is_empty() || *triples == 0 {
                        return Err(v(format!("{at}: needs at least one p and one triple")));
                    }
                }
                CheckEntry::WaveletEquivalence { options, .. } => positive("budget", options.budget)?,
                CheckEntry::Convergence { options, .. } => positive("tol", options.tol)?,
                CheckEntry::VectorValued { options, sizes, width, .. } => {
                    positive("drift_budget", options.drift_budget)?;
                    positive("width", *width)?;
                    if sizes.is_empty() || sizes.contains(&0) {
                        return Err(v(format!("{at}: sizes must be nonempty and positive")));
                    }
                }
                CheckEntry::RieszBoundedness { options, .. } => positive("agreement", options.agreement)?,
                CheckEntry::Axioms { .. } => {}
            }
        }
        Ok(())
    }
}

/// Battery used when a convergence check has no explicit probe.
pub fn random_probe_battery(seed: u64) -> Battery {
    Battery::new(seed, vec![ProbeSpec::Random { count: 1 }])
}
