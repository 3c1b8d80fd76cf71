//! Scenario configuration: one TOML document per scenario, with dotted-key
//! overrides applied before deserialization.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::report::ReportFormat;
use crate::catalog::{BodyRecipe, NormRecipe};
use crate::error::{LabError, Result};
use crate::metrics::DistanceMode;
use crate::oracle::{SampleBudget, SampleMethod};
use crate::rotundity::ChordSearch;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Theorem1,
    Theorem2,
    Semicontinuity,
    LemmaBounds,
    ExtraneousLemma,
    MlurScan,
    Theorem4Link,
}

/// Ladders and counts shared by the scenarios.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SequenceParams {
    pub m_ladder: Vec<usize>,
    pub delta_ladder: Vec<f64>,
    /// Distances `‖y − x‖` probed by the continuity scenario.
    pub radii: Vec<f64>,
    /// Sequence length for the semicontinuity and linkage scenarios.
    pub count: usize,
    /// Random trials (directions, bases) per scenario.
    pub trials: usize,
    pub epsilon: f64,
    /// Largest dimension of random bases.
    pub max_dim: usize,
    pub max_vertices: usize,
}

impl Default for SequenceParams {
    fn default() -> Self {
        SequenceParams {
            m_ladder: vec![64, 256, 1024],
            delta_ladder: vec![0.2, 0.1, 0.05, 0.02, 0.01],
            radii: vec![1e-1, 1e-2, 1e-3],
            count: 5,
            trials: 50,
            epsilon: 0.1,
            max_dim: 4,
            max_vertices: 10,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BudgetParams {
    pub count: usize,
    pub method: SampleMethod,
}

impl Default for BudgetParams {
    fn default() -> Self {
        BudgetParams { count: 2000, method: SampleMethod::HitAndRun }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    /// Base body; each scenario has its own default.
    #[serde(default)]
    pub body: Option<BodyRecipe>,
    #[serde(default)]
    pub norm: NormRecipe,
    #[serde(default)]
    pub mode: DistanceMode,
    /// The studied point x; each scenario has its own default.
    #[serde(default)]
    pub point: Option<Vec<f64>>,
    #[serde(default)]
    pub sequence: SequenceParams,
    #[serde(default)]
    pub budget: BudgetParams,
    #[serde(default)]
    pub chord: ChordSearch,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: ReportFormat,
}

impl ScenarioConfig {
    pub fn new(scenario: ScenarioKind) -> Self {
        ScenarioConfig {
            scenario,
            body: None,
            norm: NormRecipe::default(),
            mode: DistanceMode::default(),
            point: None,
            sequence: SequenceParams::default(),
            budget: BudgetParams::default(),
            chord: ChordSearch::default(),
            seed: 0,
            output: None,
            format: ReportFormat::default(),
        }
    }

    /// Parse a TOML document after applying `key.path=value` overrides.
    pub fn from_toml(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| LabError::Config(e.message().to_string()))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let cfg: ScenarioConfig =
            toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| LabError::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.sequence;
        if s.delta_ladder.iter().chain(&s.radii).any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(LabError::Config("ladders must hold finite non-negative values".into()));
        }
        if !(s.epsilon > 0.0 && s.epsilon.is_finite()) {
            return Err(LabError::Config("epsilon must be positive".into()));
        }
        if s.max_dim == 0 || self.budget.count == 0 {
            return Err(LabError::Config("max_dim and budget.count must be positive".into()));
        }
        if let Some(p) = &self.point {
            if p.iter().any(|v| !v.is_finite()) {
                return Err(LabError::Config("point must be finite".into()));
            }
        }
        Ok(())
    }

    pub fn sample_budget(&self) -> SampleBudget {
        SampleBudget::new(self.budget.count, self.seed).with_method(self.budget.method)
    }
}

/// A body document: a recipe with `kind`, or bare `hrep` rows
/// (`[a₁, …, aₙ, b]`) or `vrep` vertices.
pub fn parse_body(text: &str) -> Result<BodyRecipe> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| LabError::Config(e.message().to_string()))?;
    let rows = |key: &str| -> Result<Vec<Vec<f64>>> {
        table[key].clone().try_into().map_err(|e: toml::de::Error| LabError::Config(format!("{key}: {}", e.message())))
    };
    if table.contains_key("kind") {
        toml::Value::Table(table.clone()).try_into().map_err(|e: toml::de::Error| LabError::Config(e.message().to_string()))
    } else if table.contains_key("hrep") {
        Ok(BodyRecipe::HrepBody { rows: rows("hrep")? })
    } else if table.contains_key("vrep") {
        Ok(BodyRecipe::HullOfPoints { points: rows("vrep")? })
    } else {
        Err(LabError::Config("body document needs `kind`, `hrep` or `vrep`".into()))
    }
}

/// `a.b.c=value`, the value read as a TOML literal and falling back to a
/// bare string.
fn apply_override(table: &mut toml::Table, spec: &str) -> Result<()> {
    let (key, raw) = spec.split_once('=').ok_or_else(|| LabError::Config(format!("override `{spec}` lacks `=`")))?;
    let value = match format!("v = {}", raw.trim()).parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("key present"),
        Err(_) => toml::Value::String(raw.trim().to_string()),
    };
    let parts: Vec<&str> = key.trim().split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(LabError::Config(format!("bad override key `{key}`")));
    }
    let mut cur = table;
    for p in &parts[..parts.len() - 1] {
        let entry = cur.entry(p.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry.as_table_mut().ok_or_else(|| LabError::Config(format!("`{p}` is not a table")))?;
    }
    cur.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}
