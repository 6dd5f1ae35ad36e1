//! TOML scenario files: one `[model]` table plus optional `[steady]`,
//! `[sweep]` and `[dynamics]` sections driving the corresponding operations.

use serde::{Deserialize, Serialize};

use crate::analysis::SweepGrid;
use crate::dynamics::Policy;
use crate::error::{Error, Result};
use crate::model::{CostFamily, DemandFamily, MarketParams, ModelSpec, RnDTech};
use crate::steadystate::{Mode, Regime};

/// The `[model]` table: market parameters inline, families as subtables.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelTable {
    pub n: usize,
    pub rho: f64,
    pub delta: f64,
    pub demand: DemandFamily,
    pub cost: CostFamily,
    pub tech: RnDTech,
}

impl ModelTable {
    pub fn to_spec(&self) -> Result<ModelSpec> {
        ModelSpec::new(
            MarketParams::new(self.n, self.rho, self.delta)?,
            self.demand,
            self.cost,
            self.tech,
        )
    }

    pub fn from_spec(spec: &ModelSpec) -> Self {
        Self {
            n: spec.params.n,
            rho: spec.params.rho,
            delta: spec.params.delta,
            demand: spec.demand,
            cost: spec.cost,
            tech: spec.tech,
        }
    }
}

/// The `[steady]` table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteadySection {
    pub regime: Regime,
    pub mode: Mode,
}

/// The `[sweep]` table. Omitted axes default to the singleton value taken
/// from the `[model]` table; the cost-level axis is always required.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub m: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<Vec<f64>>,
    /// Include the open- vs closed-loop columns.
    #[serde(default)]
    pub loops: bool,
}

impl SweepSection {
    pub fn to_grid(&self, model: &ModelTable) -> SweepGrid {
        SweepGrid {
            n: self.n.clone().unwrap_or_else(|| vec![model.n]),
            s: self.s.clone().unwrap_or_else(|| vec![model.demand.s()]),
            m: self.m.clone(),
            beta: self.beta.clone().unwrap_or_else(|| vec![model.tech.beta]),
            delta: self.delta.clone().unwrap_or_else(|| vec![model.delta]),
            rho: self.rho.clone().unwrap_or_else(|| vec![model.rho]),
        }
    }
}

/// The `[dynamics]` table: a policy (tagged inline via the `policy` key),
/// initial cost levels and the time grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DynamicsSection {
    #[serde(flatten)]
    pub policy: Policy,
    pub m0: Vec<f64>,
    pub horizon: f64,
    pub step: f64,
}

/// A full scenario file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub model: ModelTable,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steady: Option<SteadySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsSection>,
}

impl Scenario {
    /// Parses and validates; unknown keys and invalid parameters are errors.
    pub fn from_toml(text: &str) -> Result<Self> {
        let scenario: Scenario =
            toml::from_str(text).map_err(|e| Error::Parameter(format!("scenario parse: {e}")))?;
        scenario.model.to_spec()?;
        Ok(scenario)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Parameter(format!("scenario write: {e}")))
    }

    pub fn model_spec(&self) -> Result<ModelSpec> {
        self.model.to_spec()
    }
}
