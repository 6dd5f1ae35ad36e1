//! Python bindings: a `Model` class wrapping the solver library, plus the
//! scenario-file entry points. Numeric results come back as plain floats,
//! dicts and lists.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use oligo_rd_core::model::{validate_model, CheckStatus, ProbeRegion};
use oligo_rd_core::scenario::Scenario;
use oligo_rd_core::steadystate::{Mode, Regime, SteadyState};
use oligo_rd_core::{
    dynamics, equilibrium, reactions, steadystate, CostFamily, DemandFamily, MarketParams,
    ModelSpec, RnDTech,
};

fn err(e: oligo_rd_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_regime(s: &str) -> PyResult<Regime> {
    match s {
        "bertrand" => Ok(Regime::Bertrand),
        "cournot" => Ok(Regime::Cournot),
        other => Err(PyValueError::new_err(format!(
            "unknown regime '{other}' (expected 'bertrand' or 'cournot')"
        ))),
    }
}

fn parse_mode(s: &str) -> PyResult<Mode> {
    match s {
        "open" => Ok(Mode::OpenLoop),
        "closed" => Ok(Mode::ClosedLoop),
        "feedback" => Ok(Mode::Feedback),
        other => Err(PyValueError::new_err(format!(
            "unknown mode '{other}' (expected 'open', 'closed' or 'feedback')"
        ))),
    }
}

fn steady_dict<'py>(py: Python<'py>, st: &SteadyState) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("regime", format!("{:?}", st.regime).to_lowercase())?;
    d.set_item("m_star", st.m_star)?;
    d.set_item("k_star", st.k_star)?;
    d.set_item("q_star", st.q_star)?;
    d.set_item("p_star", st.p_star)?;
    d.set_item("lambda_own", st.lambda_own)?;
    d.set_item("lambda_other", st.lambda_other)?;
    let residuals = PyDict::new(py);
    for (name, value) in &st.residuals {
        residuals.set_item(name, *value)?;
    }
    d.set_item("residuals", residuals)?;
    d.set_item("choice_soc", st.choice_soc.value)?;
    d.set_item("investment_soc", st.investment_soc.value)?;
    d.set_item("soc_satisfied", st.choice_soc.satisfied && st.investment_soc.satisfied)?;
    d.set_item("k_locally_decreasing", st.k_locally_decreasing)?;
    Ok(d)
}

/// A fully specified model: market parameters, demand and cost families and
/// the R&D technology.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct Model {
    spec: ModelSpec,
}

#[pymethods]
impl Model {
    /// Builds a model from scalar parameters. `demand` selects the family:
    /// "linear" ignores `eta`, "power" uses it as the curvature. `cost_c`
    /// above 1 switches to the convex cost family.
    #[new]
    #[pyo3(signature = (n, rho, delta, a, s, *, eta=1.0, demand="linear", cost_c=1.0,
                        alpha=1.0, beta=0.0, b=1.0, g=2.0))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        n: usize,
        rho: f64,
        delta: f64,
        a: f64,
        s: f64,
        eta: f64,
        demand: &str,
        cost_c: f64,
        alpha: f64,
        beta: f64,
        b: f64,
        g: f64,
    ) -> PyResult<Self> {
        let demand = match demand {
            "linear" => DemandFamily::LinearSubstitutes { a, s },
            "power" => DemandFamily::PowerInverse { a, s, eta },
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown demand family '{other}' (expected 'linear' or 'power')"
                )))
            }
        };
        let cost = if cost_c == 1.0 { CostFamily::Linear } else { CostFamily::Power { c: cost_c } };
        let spec = ModelSpec::new(
            MarketParams::new(n, rho, delta).map_err(err)?,
            demand,
            cost,
            RnDTech::new(alpha, beta, b, g).map_err(err)?,
        )
        .map_err(err)?;
        Ok(Model { spec })
    }

    /// Builds a model from the `[model]` table of a scenario file.
    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        let scenario = Scenario::from_toml(text).map_err(err)?;
        Ok(Model { spec: scenario.model_spec().map_err(err)? })
    }

    /// Checks every sign assumption over the default probe region; returns
    /// `(name, status)` pairs where status is "pass", "degenerate at ..." or
    /// "violation at ...".
    fn validate(&self) -> Vec<(String, String)> {
        let report = validate_model(&self.spec, &ProbeRegion::default_for(&self.spec));
        report
            .checks
            .iter()
            .map(|c| {
                let status = match &c.status {
                    CheckStatus::Pass => "pass".to_string(),
                    CheckStatus::Degenerate { at } => format!("degenerate at {at}"),
                    CheckStatus::Violation { at, value } => {
                        format!("violation at {at} (value {value})")
                    }
                };
                (c.name.to_string(), status)
            })
            .collect()
    }

    /// Symmetric static equilibrium `(p, q)` at cost level m.
    fn static_equilibrium(&self, regime: &str, m: f64) -> PyResult<(f64, f64)> {
        let eq = match parse_regime(regime)? {
            Regime::Bertrand => equilibrium::bertrand_static(&self.spec, m),
            Regime::Cournot => equilibrium::cournot_static(&self.spec, m),
        }
        .map_err(err)?;
        Ok((eq.point.p, eq.point.q))
    }

    /// Equilibrium reaction of own and rival choice to a rise in firm 1's
    /// cost: `(d own/d m1, d rival/d m1, classification)`.
    fn reaction(&self, regime: &str, m: f64) -> PyResult<(f64, f64, String)> {
        let regime = parse_regime(regime)?;
        let eq = match regime {
            Regime::Bertrand => equilibrium::bertrand_static(&self.spec, m),
            Regime::Cournot => equilibrium::cournot_static(&self.spec, m),
        }
        .map_err(err)?;
        let r = match regime {
            Regime::Bertrand => reactions::price_reaction(&self.spec, &eq.point),
            Regime::Cournot => reactions::quantity_reaction(&self.spec, &eq.point),
        }
        .map_err(err)?;
        Ok((
            r.own_reaction,
            r.cross_reaction,
            format!("{:?}", r.strategic_class).to_lowercase(),
        ))
    }

    /// The common investment level pinned by the state equation.
    fn k_star(&self) -> PyResult<f64> {
        steadystate::solve_k_star(&self.spec.params, &self.spec.tech).map_err(err)
    }

    /// `(k_star, dk/dn, d(n k)/dn)` in the (continuous) number of firms.
    fn comparative_statics(&self) -> PyResult<(f64, f64, f64)> {
        let cs =
            steadystate::comparative_statics_n(&self.spec.params, &self.spec.tech).map_err(err)?;
        Ok((cs.k_star, cs.dk_dn, cs.dnk_dn))
    }

    /// Investment solving the stationarity condition at a given cost level.
    fn k_given_m(&self, regime: &str, mode: &str, m: f64) -> PyResult<f64> {
        let sol = steadystate::k_given_m(&self.spec, parse_regime(regime)?, parse_mode(mode)?, m)
            .map_err(err)?;
        Ok(sol.k)
    }

    /// The stationarity residual assembled along the closed-loop adjoint and
    /// along the HJB envelope; the two coincide.
    fn feedback_residual(&self, regime: &str, m: f64, k: f64) -> PyResult<(f64, f64)> {
        steadystate::feedback_residual(&self.spec, parse_regime(regime)?, m, k).map_err(err)
    }

    /// All joint steady states for a regime and mode, as dicts sorted by the
    /// steady-state cost level.
    fn steady_states<'py>(
        &self,
        py: Python<'py>,
        regime: &str,
        mode: &str,
    ) -> PyResult<Bound<'py, PyList>> {
        let states =
            steadystate::joint_steady_state(&self.spec, parse_regime(regime)?, parse_mode(mode)?)
                .map_err(err)?;
        let out = PyList::empty(py);
        for st in &states {
            out.append(steady_dict(py, st)?)?;
        }
        Ok(out)
    }

    /// Bertrand-vs-Cournot comparison at a cost level, as a dict.
    fn compare<'py>(&self, py: Python<'py>, m: f64) -> PyResult<Bound<'py, PyDict>> {
        let row = oligo_rd_core::compare_bertrand_cournot(&self.spec, m).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("q_bertrand", row.q_bertrand)?;
        d.set_item("q_cournot", row.q_cournot)?;
        d.set_item("k_bertrand", row.k_bertrand)?;
        d.set_item("k_cournot", row.k_cournot)?;
        d.set_item("cournot_foc_at_bertrand", row.cournot_foc_at_bertrand)?;
        d.set_item("slope_gap", row.slope_gap)?;
        d.set_item("prop2", row.prop2.map(|v| format!("{v:?}").to_lowercase()))?;
        Ok(d)
    }

    /// Integrates the cost-state dynamics under a constant common investment;
    /// returns a dict of time and per-firm cost-state lists.
    #[pyo3(signature = (k, m0, horizon, step))]
    fn simulate<'py>(
        &self,
        py: Python<'py>,
        k: f64,
        m0: Vec<f64>,
        horizon: f64,
        step: f64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let traj = dynamics::integrate(
            &self.spec,
            &dynamics::Policy::Constant { k },
            &m0,
            horizon,
            step,
        )
        .map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("t", &traj.times)?;
        d.set_item("m", &traj.m)?;
        d.set_item("terminal_residual", traj.terminal_residual)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!(
            "Model(n={}, rho={}, delta={}, demand={:?}, cost={:?}, tech={:?})",
            self.spec.params.n,
            self.spec.params.rho,
            self.spec.params.delta,
            self.spec.demand,
            self.spec.cost,
            self.spec.tech
        )
    }
}

#[pymodule]
fn oligo_rd_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Model>()?;
    Ok(())
}
