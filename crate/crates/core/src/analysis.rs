//! Proposition-level comparisons and parameter sweeps: Bertrand vs Cournot
//! at a fixed cost level, open-loop vs closed-loop orderings, and the
//! number-of-firms statics, evaluated cell by cell over a grid.

use serde::Serialize;

use crate::equilibrium;
use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::reactions::StrategicClass;
use crate::steadystate::{self, Mode, Regime};

/// Strict-inequality verdicts use this tolerance; smaller gaps are reported
/// as indistinguishable rather than pass/fail.
pub const VERDICT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Holds,
    Fails,
    /// The gap is below [`VERDICT_TOL`], e.g. in the s -> 0 limit.
    Indistinguishable,
}

/// One evaluated cell. Verdicts are computed from the numbers in the row,
/// never assumed from theory.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ComparisonRow {
    pub n: usize,
    pub s: f64,
    pub m: f64,
    pub beta: f64,
    pub delta: f64,
    pub rho: f64,
    pub q_bertrand: Option<f64>,
    pub q_cournot: Option<f64>,
    /// Open-loop investment given the cost level, per regime.
    pub k_bertrand: Option<f64>,
    pub k_cournot: Option<f64>,
    /// Cournot first-order condition evaluated at the Bertrand point.
    pub cournot_foc_at_bertrand: Option<f64>,
    /// `1 - q_p_own * p_q_own` at the Bertrand point.
    pub slope_gap: Option<f64>,
    pub dk_dn: Option<f64>,
    pub dnk_dn: Option<f64>,
    pub k_open_bertrand: Option<f64>,
    pub k_closed_bertrand: Option<f64>,
    pub class_bertrand: Option<StrategicClass>,
    pub k_open_cournot: Option<f64>,
    pub k_closed_cournot: Option<f64>,
    pub class_cournot: Option<StrategicClass>,
    pub prop2: Option<Verdict>,
    pub prop3_bertrand: Option<Verdict>,
    pub prop3_cournot: Option<Verdict>,
    pub error: Option<String>,
}

impl ComparisonRow {
    fn from_spec(spec: &ModelSpec, m: f64) -> Self {
        ComparisonRow {
            n: spec.n(),
            s: spec.demand.s(),
            m,
            beta: spec.tech.beta,
            delta: spec.params.delta,
            rho: spec.params.rho,
            ..Default::default()
        }
    }
}

fn verdict_greater(lhs: f64, rhs: f64) -> Verdict {
    let gap = lhs - rhs;
    if gap > VERDICT_TOL {
        Verdict::Holds
    } else if gap < -VERDICT_TOL {
        Verdict::Fails
    } else {
        Verdict::Indistinguishable
    }
}

/// Bertrand vs Cournot at a common cost level: static outputs, open-loop
/// investments and the sign mechanism behind the ordering.
pub fn compare_bertrand_cournot(spec: &ModelSpec, m: f64) -> Result<ComparisonRow> {
    let mut row = ComparisonRow::from_spec(spec, m);
    let bertrand = equilibrium::bertrand_static(spec, m)?;
    let cournot = equilibrium::cournot_static(spec, m)?;
    row.q_bertrand = Some(bertrand.point.q);
    row.q_cournot = Some(cournot.point.q);

    // Cournot FOC at the Bertrand point; negative whenever goods interact,
    // which is what pushes the Cournot output below the Bertrand one.
    let d = spec.demand_partials(&bertrand.point)?;
    let c = spec.cost_partials(m, bertrand.point.q)?;
    row.cournot_foc_at_bertrand = Some(bertrand.point.p + d.p_q_own * bertrand.point.q - c.dq);
    row.slope_gap = Some(crate::reactions::slope_product_gap(&d, spec.n()));

    let k_b = steadystate::k_given_m(spec, Regime::Bertrand, Mode::OpenLoop, m)?;
    let k_c = steadystate::k_given_m(spec, Regime::Cournot, Mode::OpenLoop, m)?;
    row.k_bertrand = Some(k_b.k);
    row.k_cournot = Some(k_c.k);
    row.prop2 = Some(verdict_greater(k_b.k, k_c.k));
    Ok(row)
}

/// Open-loop vs memoryless closed-loop investment at a common cost level,
/// with the strategic classification that determines the ordering.
pub fn compare_loops(spec: &ModelSpec, regime: Regime, m: f64) -> Result<ComparisonRow> {
    if spec.tech.beta != 0.0 {
        return Err(Error::Precondition(
            "loop comparison requires zero spillover (beta = 0)".into(),
        ));
    }
    let mut row = ComparisonRow::from_spec(spec, m);
    let open = steadystate::k_given_m(spec, regime, Mode::OpenLoop, m)?;
    let closed = steadystate::k_given_m(spec, regime, Mode::ClosedLoop, m)?;
    let eq = match regime {
        Regime::Bertrand => equilibrium::bertrand_static(spec, m)?,
        Regime::Cournot => equilibrium::cournot_static(spec, m)?,
    };
    let class = match regime {
        Regime::Bertrand => crate::reactions::price_reaction(spec, &eq.point)?.strategic_class,
        Regime::Cournot => crate::reactions::quantity_reaction(spec, &eq.point)?.strategic_class,
    };
    let verdict = match class {
        StrategicClass::Substitutes => verdict_greater(closed.k, open.k),
        StrategicClass::Complements => verdict_greater(open.k, closed.k),
        StrategicClass::Degenerate => {
            if (closed.k - open.k).abs() <= VERDICT_TOL {
                Verdict::Holds
            } else {
                Verdict::Fails
            }
        }
    };
    match regime {
        Regime::Bertrand => {
            row.k_open_bertrand = Some(open.k);
            row.k_closed_bertrand = Some(closed.k);
            row.class_bertrand = Some(class);
            row.prop3_bertrand = Some(verdict);
        }
        Regime::Cournot => {
            row.k_open_cournot = Some(open.k);
            row.k_closed_cournot = Some(closed.k);
            row.class_cournot = Some(class);
            row.prop3_cournot = Some(verdict);
        }
    }
    Ok(row)
}

/// Grid of parameter overrides applied to a template spec, in lexicographic
/// order over (n, s, m, beta, delta, rho).
#[derive(Clone, Debug)]
pub struct SweepGrid {
    pub n: Vec<usize>,
    pub s: Vec<f64>,
    pub m: Vec<f64>,
    pub beta: Vec<f64>,
    pub delta: Vec<f64>,
    pub rho: Vec<f64>,
}

impl SweepGrid {
    pub fn len(&self) -> usize {
        self.n.len() * self.s.len() * self.m.len() * self.beta.len() * self.delta.len() * self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepTable {
    pub rows: Vec<ComparisonRow>,
}

fn apply_cell(template: &ModelSpec, n: usize, s: f64, beta: f64, delta: f64, rho: f64) -> Result<ModelSpec> {
    use crate::model::DemandFamily;
    let mut spec = *template;
    spec.params.n = n;
    spec.params.delta = delta;
    spec.params.rho = rho;
    spec.demand = match spec.demand {
        DemandFamily::LinearSubstitutes { a, .. } => DemandFamily::LinearSubstitutes { a, s },
        DemandFamily::PowerInverse { a, eta, .. } => DemandFamily::PowerInverse { a, s, eta },
    };
    spec.tech.beta = beta;
    spec.validate()?;
    Ok(spec)
}

fn sweep_cell(template: &ModelSpec, n: usize, s: f64, m: f64, beta: f64, delta: f64, rho: f64, loops: bool) -> ComparisonRow {
    let spec = match apply_cell(template, n, s, beta, delta, rho) {
        Ok(spec) => spec,
        Err(e) => {
            let mut row = ComparisonRow::from_spec(template, m);
            row.n = n;
            row.s = s;
            row.beta = beta;
            row.delta = delta;
            row.rho = rho;
            row.error = Some(e.to_string());
            return row;
        }
    };
    let mut row = match compare_bertrand_cournot(&spec, m) {
        Ok(row) => row,
        Err(e) => {
            let mut row = ComparisonRow::from_spec(&spec, m);
            row.error = Some(e.to_string());
            return row;
        }
    };
    match steadystate::comparative_statics_n(&spec.params, &spec.tech) {
        Ok(cs) => {
            row.dk_dn = Some(cs.dk_dn);
            row.dnk_dn = Some(cs.dnk_dn);
        }
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    }
    if loops {
        for regime in [Regime::Bertrand, Regime::Cournot] {
            match compare_loops(&spec, regime, m) {
                Ok(part) => match regime {
                    Regime::Bertrand => {
                        row.k_open_bertrand = part.k_open_bertrand;
                        row.k_closed_bertrand = part.k_closed_bertrand;
                        row.class_bertrand = part.class_bertrand;
                        row.prop3_bertrand = part.prop3_bertrand;
                    }
                    Regime::Cournot => {
                        row.k_open_cournot = part.k_open_cournot;
                        row.k_closed_cournot = part.k_closed_cournot;
                        row.class_cournot = part.class_cournot;
                        row.prop3_cournot = part.prop3_cournot;
                    }
                },
                Err(e) => {
                    row.error = Some(e.to_string());
                    return row;
                }
            }
        }
    }
    row
}

/// Evaluates every grid cell. Row order is lexicographic over the grid and
/// independent of the worker count; failed cells carry an error tag and never
/// abort the sweep.
pub fn sweep(template: &ModelSpec, grid: &SweepGrid, include_loops: bool, threads: usize) -> Result<SweepTable> {
    if grid.is_empty() {
        return Err(Error::Parameter("empty grid".into()));
    }
    let mut cells = Vec::with_capacity(grid.len());
    for &n in &grid.n {
        for &s in &grid.s {
            for &m in &grid.m {
                for &beta in &grid.beta {
                    for &delta in &grid.delta {
                        for &rho in &grid.rho {
                            cells.push((n, s, m, beta, delta, rho));
                        }
                    }
                }
            }
        }
    }
    let threads = threads.max(1).min(cells.len());
    let mut rows: Vec<Option<ComparisonRow>> = vec![None; cells.len()];
    if threads == 1 {
        for (slot, &(n, s, m, beta, delta, rho)) in rows.iter_mut().zip(&cells) {
            *slot = Some(sweep_cell(template, n, s, m, beta, delta, rho, include_loops));
        }
    } else {
        let chunk = cells.len().div_ceil(threads);
        std::thread::scope(|scope| {
            for (cell_chunk, slot_chunk) in cells.chunks(chunk).zip(rows.chunks_mut(chunk)) {
                scope.spawn(move || {
                    for (slot, &(n, s, m, beta, delta, rho)) in slot_chunk.iter_mut().zip(cell_chunk) {
                        *slot = Some(sweep_cell(template, n, s, m, beta, delta, rho, include_loops));
                    }
                });
            }
        });
    }
    Ok(SweepTable { rows: rows.into_iter().map(|r| r.unwrap()).collect() })
}

impl SweepTable {
    /// CSV with a fixed header; `sig` formats every number.
    pub fn to_csv(&self, sig: impl Fn(f64) -> String) -> String {
        let mut out = String::from(
            "n,s,m,beta,delta,rho,q_bertrand,q_cournot,k_bertrand,k_cournot,\
             cournot_foc_at_bertrand,slope_gap,dk_dn,dnk_dn,\
             k_open_bertrand,k_closed_bertrand,class_bertrand,\
             k_open_cournot,k_closed_cournot,class_cournot,\
             prop2,prop3_bertrand,prop3_cournot,error\n",
        );
        let opt = |x: Option<f64>| x.map(&sig).unwrap_or_default();
        let cls = |x: Option<StrategicClass>| x.map(|c| format!("{c:?}")).unwrap_or_default();
        let ver = |x: Option<Verdict>| x.map(|v| format!("{v:?}")).unwrap_or_default();
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                r.n,
                sig(r.s),
                sig(r.m),
                sig(r.beta),
                sig(r.delta),
                sig(r.rho),
                opt(r.q_bertrand),
                opt(r.q_cournot),
                opt(r.k_bertrand),
                opt(r.k_cournot),
                opt(r.cournot_foc_at_bertrand),
                opt(r.slope_gap),
                opt(r.dk_dn),
                opt(r.dnk_dn),
                opt(r.k_open_bertrand),
                opt(r.k_closed_bertrand),
                cls(r.class_bertrand),
                opt(r.k_open_cournot),
                opt(r.k_closed_cournot),
                cls(r.class_cournot),
                ver(r.prop2),
                ver(r.prop3_bertrand),
                ver(r.prop3_cournot),
                r.error.clone().unwrap_or_default(),
            ));
        }
        out
    }
}
