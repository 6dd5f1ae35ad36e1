//! Symmetric static equilibria: the price first-order condition under
//! Bertrand and the output first-order condition under Cournot, solved by
//! bracket scanning plus Brent refinement, with second-order checks.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ModelSpec, SymmetricPoint};
use crate::root;

/// One second-order-condition entry; `satisfied` iff `value < 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SocEntry {
    pub value: f64,
    pub satisfied: bool,
}

impl SocEntry {
    pub fn new(value: f64) -> Self {
        Self { value, satisfied: value < 0.0 }
    }
}

/// A solved symmetric static equilibrium.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StaticEquilibrium {
    pub point: SymmetricPoint,
    /// Price SOC (Bertrand) or output SOC (Cournot) at the solution.
    pub soc: SocEntry,
    pub foc_residual: f64,
    /// Number of FOC roots found in the admissible bracket. The returned
    /// point is the root with the largest markup that satisfies the SOC.
    pub roots_found: usize,
}

const SCAN_CELLS: usize = 400;
const FOC_RESIDUAL_TOL: f64 = 1e-12;

/// Solves the symmetric Bertrand price condition
/// `q_i + (p - C_q) dq_i/dp_i = 0` at common cost level `m`.
pub fn bertrand_static(spec: &ModelSpec, m: f64) -> Result<StaticEquilibrium> {
    let choke = spec.choke_price();
    check_cost_level(m, choke)?;
    let foc = |p: f64| -> Option<f64> {
        let q = spec.symmetric_quantity_at_price(p).ok()?;
        if q <= 0.0 {
            return None;
        }
        let point = SymmetricPoint { m, p, q };
        let d = spec.demand_partials(&point).ok()?;
        let c = spec.cost_partials(m, q).ok()?;
        Some(q + (p - c.dq) * d.q_p_own)
    };
    let eps = 1e-9 * choke.max(1.0);
    let roots = find_roots(&foc, eps, choke - eps)?;
    let mut best: Option<StaticEquilibrium> = None;
    let count = roots.len();
    for p in &roots {
        let q = spec.symmetric_quantity_at_price(*p)?;
        let point = SymmetricPoint { m, p: *p, q };
        let d = spec.demand_partials(&point)?;
        let c = spec.cost_partials(m, q)?;
        let markup = *p - c.dq;
        let soc = SocEntry::new(2.0 * d.q_p_own + markup * d.q_pp_own - c.dqq * d.q_p_own * d.q_p_own);
        let residual = q + markup * d.q_p_own;
        if !soc.satisfied || residual.abs() > FOC_RESIDUAL_TOL {
            continue;
        }
        let candidate = StaticEquilibrium { point, soc, foc_residual: residual, roots_found: count };
        let better = match &best {
            Some(b) => markup > b.point.p - spec.cost_partials(m, b.point.q)?.dq,
            None => true,
        };
        if better {
            best = Some(candidate);
        }
    }
    best.ok_or_else(|| {
        Error::NoRoot(format!(
            "no Bertrand equilibrium with a satisfied second-order condition at m={m}"
        ))
    })
}

/// Solves the symmetric Cournot output condition
/// `p_i + (dp_i/dq_i) q - C_q = 0` at common cost level `m`.
pub fn cournot_static(spec: &ModelSpec, m: f64) -> Result<StaticEquilibrium> {
    let choke = spec.choke_price();
    check_cost_level(m, choke)?;
    let q_choke = spec.choke_quantity();
    let foc = |q: f64| -> Option<f64> {
        if q <= 0.0 {
            return None;
        }
        let p = spec.symmetric_price_at_quantity(q);
        let point = SymmetricPoint { m, p, q };
        let d = spec.demand_partials(&point).ok()?;
        let c = spec.cost_partials(m, q).ok()?;
        Some(p + d.p_q_own * q - c.dq)
    };
    let eps = 1e-9 * q_choke.max(1.0);
    let roots = find_roots(&foc, eps, q_choke - eps)?;
    let mut best: Option<StaticEquilibrium> = None;
    let count = roots.len();
    for q in &roots {
        let p = spec.symmetric_price_at_quantity(*q);
        let point = SymmetricPoint { m, p, q: *q };
        let d = spec.demand_partials(&point)?;
        let c = spec.cost_partials(m, *q)?;
        let soc = SocEntry::new(2.0 * d.p_q_own + d.p_qq_own * q - c.dqq);
        let residual = p + d.p_q_own * q - c.dq;
        if !soc.satisfied || residual.abs() > FOC_RESIDUAL_TOL {
            continue;
        }
        let markup = p - c.dq;
        let candidate = StaticEquilibrium { point, soc, foc_residual: residual, roots_found: count };
        let better = match &best {
            Some(b) => markup > b.point.p - spec.cost_partials(m, b.point.q)?.dq,
            None => true,
        };
        if better {
            best = Some(candidate);
        }
    }
    best.ok_or_else(|| {
        Error::NoRoot(format!(
            "no Cournot equilibrium with a satisfied second-order condition at m={m}"
        ))
    })
}

/// Second-order condition for the investment choice:
/// `-gamma''(k) - lambda_own * Gamma_kk * m - (n-1) * lambda_other * Gamma_KK * m`.
pub fn soc_k(spec: &ModelSpec, k: f64, m: f64, lambda_own: f64, lambda_other: f64) -> Result<SocEntry> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!("soc_k needs k > 0, got {k}")));
    }
    let t = spec.tech_partials(k, (spec.n() - 1) as f64 * k)?;
    let value = -t.rd_cost_dd - lambda_own * t.gamma_big_kk * m
        - (spec.n() - 1) as f64 * lambda_other * t.gamma_big_bigkk * m;
    Ok(SocEntry::new(value))
}

fn check_cost_level(m: f64, choke: f64) -> Result<()> {
    if !(m > 0.0 && m < choke) {
        return Err(Error::Domain(format!(
            "cost level m must lie in (0, {choke}), got {m}"
        )));
    }
    Ok(())
}

fn find_roots<F: Fn(f64) -> Option<f64>>(foc: &F, lo: f64, hi: f64) -> Result<Vec<f64>> {
    if !(hi > lo) {
        return Err(Error::NoRoot("empty search bracket".into()));
    }
    let brackets = root::scan_brackets(|x| foc(x), lo, hi, SCAN_CELLS);
    if brackets.is_empty() {
        return Err(Error::NoRoot(
            "first-order condition has no sign change on the admissible bracket".into(),
        ));
    }
    let mut roots = Vec::new();
    for (a, b) in brackets {
        let r = root::brent(|x| foc(x).unwrap_or(f64::NAN), a, b, 1e-15, 300)?;
        if roots.iter().all(|&x: &f64| (x - r).abs() > 1e-10) {
            roots.push(r);
        }
    }
    Ok(roots)
}
