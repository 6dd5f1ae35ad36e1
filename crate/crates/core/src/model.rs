//! Model primitives: demand, production cost and R&D technology families,
//! with analytic partial derivatives and sign-assumption validation.
//!
//! Two concrete families per primitive are provided. The linear/quadratic
//! members reproduce the standard differentiated-goods example
//! (`p_i = a - q_i - s*sum_{j!=i} q_j`, `C = m*q`, `gamma = b*k^2`); the power
//! members extend each primitive beyond the linear case while keeping every
//! sign assumption satisfiable on an open admissible region.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reactions::{invert_symmetric_slopes, DemandPartials};
use crate::root;

/// Market-level parameters shared by every game instance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketParams {
    /// Number of firms, at least 2.
    pub n: usize,
    /// Discount rate, positive.
    pub rho: f64,
    /// Depreciation rate of the cost state, in (0, 1).
    pub delta: f64,
}

impl MarketParams {
    pub fn new(n: usize, rho: f64, delta: f64) -> Result<Self> {
        let p = Self { n, rho, delta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Parameter(format!("n must be >= 2, got {}", self.n)));
        }
        if !(self.rho > 0.0) {
            return Err(Error::Parameter(format!("rho must be > 0, got {}", self.rho)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Parameter(format!(
                "delta must lie in (0,1), got {}",
                self.delta
            )));
        }
        Ok(())
    }
}

/// Demand function family.
///
/// `LinearSubstitutes` is `p_i = a - q_i - s*sum_{j!=i} q_j`; `PowerInverse`
/// is `p_i = a - q_i^eta - s*sum_{j!=i} q_j`. The two coincide at `eta = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", deny_unknown_fields)]
pub enum DemandFamily {
    #[serde(rename = "linear")]
    LinearSubstitutes { a: f64, s: f64 },
    #[serde(rename = "power")]
    PowerInverse { a: f64, s: f64, eta: f64 },
}

impl DemandFamily {
    pub fn a(&self) -> f64 {
        match *self {
            DemandFamily::LinearSubstitutes { a, .. } | DemandFamily::PowerInverse { a, .. } => a,
        }
    }

    pub fn s(&self) -> f64 {
        match *self {
            DemandFamily::LinearSubstitutes { s, .. } | DemandFamily::PowerInverse { s, .. } => s,
        }
    }

    pub fn eta(&self) -> f64 {
        match *self {
            DemandFamily::LinearSubstitutes { .. } => 1.0,
            DemandFamily::PowerInverse { eta, .. } => eta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (a, s) = (self.a(), self.s());
        if !(a > 0.0) {
            return Err(Error::Parameter(format!("demand intercept a must be > 0, got {a}")));
        }
        // s = 0 is admitted as the degenerate independent-goods boundary;
        // validate_model reports cross-slope checks as degenerate there.
        if !(s >= 0.0 && s < 1.0) {
            return Err(Error::Parameter(format!(
                "substitutability s must lie in [0,1), got {s}"
            )));
        }
        if let DemandFamily::PowerInverse { eta, .. } = *self {
            if !(eta > 0.0) {
                return Err(Error::Parameter(format!("eta must be > 0, got {eta}")));
            }
        }
        Ok(())
    }
}

/// Production cost family: `Linear` is `C(m,q) = m*q`, `Power` is `C(m,q) = m*q^c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", deny_unknown_fields)]
pub enum CostFamily {
    #[serde(rename = "linear")]
    Linear,
    #[serde(rename = "power")]
    Power { c: f64 },
}

impl CostFamily {
    pub fn validate(&self) -> Result<()> {
        if let CostFamily::Power { c } = *self {
            if !(c >= 1.0) {
                return Err(Error::Parameter(format!("cost exponent c must be >= 1, got {c}")));
            }
        }
        Ok(())
    }
}

/// R&D technology: cost-reduction rate `Gamma(k, K) = k^alpha + beta*K` and
/// investment cost `gamma(k) = b*k^g`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RnDTech {
    /// Own-investment exponent, in (0, 1].
    pub alpha: f64,
    /// Spillover weight on rivals' total investment, in [0, 1).
    pub beta: f64,
    /// R&D cost scale, positive.
    pub b: f64,
    /// R&D cost exponent, greater than 1.
    pub g: f64,
}

impl RnDTech {
    pub fn new(alpha: f64, beta: f64, b: f64, g: f64) -> Result<Self> {
        let t = Self { alpha, beta, b, g };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Parameter(format!(
                "alpha must lie in (0,1], got {}",
                self.alpha
            )));
        }
        if !(self.beta >= 0.0 && self.beta < 1.0) {
            return Err(Error::Parameter(format!("beta must lie in [0,1), got {}", self.beta)));
        }
        if !(self.b > 0.0) {
            return Err(Error::Parameter(format!("b must be > 0, got {}", self.b)));
        }
        if !(self.g > 1.0) {
            return Err(Error::Parameter(format!("g must be > 1, got {}", self.g)));
        }
        Ok(())
    }

    /// `Gamma(k, K)`.
    pub fn gamma_big(&self, k: f64, big_k: f64) -> f64 {
        k.powf(self.alpha) + self.beta * big_k
    }

    /// `d Gamma / d k`.
    pub fn gamma_big_k(&self, k: f64) -> f64 {
        self.alpha * k.powf(self.alpha - 1.0)
    }

    /// `gamma(k)`.
    pub fn rd_cost(&self, k: f64) -> f64 {
        self.b * k.powf(self.g)
    }

    /// `gamma'(k)`.
    pub fn rd_cost_d(&self, k: f64) -> f64 {
        self.b * self.g * k.powf(self.g - 1.0)
    }

    /// `gamma''(k)`.
    pub fn rd_cost_dd(&self, k: f64) -> f64 {
        self.b * self.g * (self.g - 1.0) * k.powf(self.g - 2.0)
    }
}

/// One full game instance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub params: MarketParams,
    pub demand: DemandFamily,
    pub cost: CostFamily,
    pub tech: RnDTech,
}

/// A symmetric market state: common cost level, price and quantity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetricPoint {
    pub m: f64,
    pub p: f64,
    pub q: f64,
}

/// Production cost and its partials at `(m, q)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostPartials {
    pub value: f64,
    pub dq: f64,
    pub dm: f64,
    pub dqq: f64,
    pub dqm: f64,
}

/// R&D technology values and partials at `(k, K)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TechPartials {
    pub gamma_big: f64,
    pub gamma_big_k: f64,
    pub gamma_big_kk: f64,
    pub gamma_big_bigk: f64,
    pub gamma_big_bigkk: f64,
    pub gamma_big_k_bigk: f64,
    pub rd_cost: f64,
    pub rd_cost_d: f64,
    pub rd_cost_dd: f64,
}

impl ModelSpec {
    pub fn new(
        params: MarketParams,
        demand: DemandFamily,
        cost: CostFamily,
        tech: RnDTech,
    ) -> Result<Self> {
        let spec = Self { params, demand, cost, tech };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.demand.validate()?;
        self.cost.validate()?;
        self.tech.validate()
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    /// Price at zero output; bounds the admissible price and cost ranges.
    pub fn choke_price(&self) -> f64 {
        self.demand.a()
    }

    /// Symmetric quantity at which the symmetric price hits zero.
    pub fn choke_quantity(&self) -> f64 {
        // a - q^eta - (n-1)*s*q = 0 has a unique positive root.
        let a = self.demand.a();
        let eta = self.demand.eta();
        let s = self.demand.s();
        let nm1 = (self.n() - 1) as f64;
        let f = |q: f64| a - q.powf(eta) - s * nm1 * q;
        let mut hi = 1.0;
        while f(hi) > 0.0 {
            hi *= 2.0;
        }
        root::brent(f, 0.0, hi, 1e-14, 200).expect("choke bracket is monotone")
    }

    /// Inverse demand `p_i(q_1, ..., q_n)`.
    pub fn inverse_demand(&self, q: &[f64]) -> Result<Vec<f64>> {
        self.check_firms(q.len())?;
        if let Some(bad) = q.iter().find(|&&x| x < 0.0 || !x.is_finite()) {
            return Err(Error::Domain(format!("quantity {bad} is negative")));
        }
        let a = self.demand.a();
        let s = self.demand.s();
        let eta = self.demand.eta();
        let total: f64 = q.iter().sum();
        let p: Vec<f64> = q
            .iter()
            .map(|&qi| a - qi.powf(eta) - s * (total - qi))
            .collect();
        if let Some(bad) = p.iter().find(|&&x| x <= 0.0) {
            return Err(Error::Domain(format!(
                "quantities leave the admissible region (price {bad} <= 0)"
            )));
        }
        Ok(p)
    }

    /// Direct demand `q_i(p_1, ..., p_n)`.
    ///
    /// Linear demand uses the closed form; the power family inverts the
    /// inverse-demand system by damped Newton iteration.
    pub fn direct_demand(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.check_firms(p.len())?;
        let a = self.demand.a();
        let s = self.demand.s();
        match self.demand {
            DemandFamily::LinearSubstitutes { .. } => {
                let n = self.n() as f64;
                let phi = 1.0 + (n - 1.0) * s;
                let total: f64 = p.iter().sum();
                let q: Vec<f64> = p
                    .iter()
                    .map(|&pi| {
                        a / phi - (phi - s) * pi / ((1.0 - s) * phi)
                            + s * (total - pi) / ((1.0 - s) * phi)
                    })
                    .collect();
                if let Some(bad) = q.iter().find(|&&x| x < -1e-12) {
                    return Err(Error::Domain(format!(
                        "prices leave the admissible region (quantity {bad} < 0)"
                    )));
                }
                Ok(q.into_iter().map(|x| x.max(0.0)).collect())
            }
            DemandFamily::PowerInverse { .. } => self.invert_demand_newton(p),
        }
    }

    /// Inverts `P(q) = p` by continuation from the symmetric price vector
    /// (whose solution is known) towards the target, with a damped Newton
    /// solve at each continuation step and adaptive step halving.
    fn invert_demand_newton(&self, p: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        let mean_p = p.iter().sum::<f64>() / n as f64;
        let mut q = vec![self.symmetric_quantity_at_price(mean_p)?.max(1e-10); n];
        let mut lambda: f64 = 0.0;
        let mut step: f64 = 1.0;
        let target = |lambda: f64| -> Vec<f64> {
            p.iter().map(|&pi| (1.0 - lambda) * mean_p + lambda * pi).collect()
        };
        while lambda < 1.0 {
            let next = (lambda + step).min(1.0);
            match self.newton_at(&target(next), &q) {
                Some(sol) => {
                    q = sol;
                    lambda = next;
                    step = (step * 2.0).min(1.0);
                }
                None => {
                    step *= 0.5;
                    if step < 1e-6 {
                        return Err(Error::Domain(
                            "demand inversion did not converge".into(),
                        ));
                    }
                }
            }
        }
        if let Some(bad) = q.iter().find(|&&x| x < -1e-12) {
            return Err(Error::Domain(format!(
                "prices leave the admissible region (quantity {bad} < 0)"
            )));
        }
        Ok(q.iter().map(|&x| x.max(0.0)).collect())
    }

    /// One damped Newton solve of `P(q) = p` from `start`; `None` on stall.
    fn newton_at(&self, p: &[f64], start: &[f64]) -> Option<Vec<f64>> {
        let n = self.n();
        let eta = self.demand.eta();
        let s = self.demand.s();
        let a = self.demand.a();
        let residual = |q: &[f64]| -> Vec<f64> {
            let total: f64 = q.iter().sum();
            q.iter()
                .zip(p)
                .map(|(&qi, &pi)| a - qi.powf(eta) - s * (total - qi) - pi)
                .collect()
        };
        let mut q = start.to_vec();
        let mut r = residual(&q);
        for _ in 0..60 {
            let norm = r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if norm < 1e-12 {
                return Some(q);
            }
            let mut jac = vec![vec![-s; n]; n];
            for i in 0..n {
                jac[i][i] = -eta * q[i].max(1e-14).powf(eta - 1.0);
            }
            let step = solve_linear(jac, r.clone())?;
            let mut t = 1.0;
            loop {
                let trial: Vec<f64> = q
                    .iter()
                    .zip(&step)
                    .map(|(&qi, &di)| (qi - t * di).max(1e-14))
                    .collect();
                let rt = residual(&trial);
                let tn = rt.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                if tn < norm {
                    q = trial;
                    r = rt;
                    break;
                }
                t *= 0.5;
                if t < 1e-8 {
                    return None;
                }
            }
        }
        None
    }

    /// Symmetric quantity solving `a - q^eta - (n-1)*s*q = p`.
    pub fn symmetric_quantity_at_price(&self, p: f64) -> Result<f64> {
        let a = self.demand.a();
        if p > a {
            return Err(Error::Domain(format!("price {p} exceeds the choke price {a}")));
        }
        let s = self.demand.s();
        let eta = self.demand.eta();
        if (eta - 1.0).abs() < 1e-14 {
            let nm1 = (self.n() - 1) as f64;
            return Ok((a - p) / (1.0 + nm1 * s));
        }
        let nm1 = (self.n() - 1) as f64;
        let f = |q: f64| a - q.powf(eta) - s * nm1 * q - p;
        let mut hi = 1.0;
        while f(hi) > 0.0 {
            hi *= 2.0;
        }
        root::brent(f, 0.0, hi, 1e-15, 200)
    }

    /// Symmetric price at common quantity `q`.
    pub fn symmetric_price_at_quantity(&self, q: f64) -> f64 {
        let nm1 = (self.n() - 1) as f64;
        self.demand.a() - q.powf(self.demand.eta()) - self.demand.s() * nm1 * q
    }

    /// Analytic own/cross first and second partials of inverse and direct
    /// demand at a symmetric point.
    pub fn demand_partials(&self, point: &SymmetricPoint) -> Result<DemandPartials> {
        let q = point.q;
        if q < 0.0 || !q.is_finite() {
            return Err(Error::Domain(format!("symmetric quantity {q} is not admissible")));
        }
        let eta = self.demand.eta();
        let s = self.demand.s();
        let n = self.n();
        let p_q_own = -eta * q.powf(eta - 1.0);
        let p_q_cross = -s;
        let p_qq_own = if (eta - 1.0).abs() < 1e-14 {
            0.0
        } else {
            -eta * (eta - 1.0) * q.powf(eta - 2.0)
        };
        let p_qq_cross = 0.0;
        let (q_p_own, q_p_cross) = invert_symmetric_slopes(p_q_own, p_q_cross, n)?;
        // Second partials of the inverse mapping: with D the direct-demand
        // Jacobian and w the only nonzero second derivative of the inverse
        // system, d2q_i/dp_a dp_b = -w * sum_k D_ik D_ka D_kb.
        let w = p_qq_own;
        let d_o = q_p_own;
        let d_c = q_p_cross;
        let nm2 = (n - 2) as f64;
        let q_pp_own = -w * (d_o.powi(3) + (n - 1) as f64 * d_c.powi(3));
        let q_pp_cross = -w * (d_o * d_o * d_c + d_o * d_c * d_c + nm2 * d_c.powi(3));
        Ok(DemandPartials {
            p_q_own,
            p_q_cross,
            p_qq_own,
            p_qq_cross,
            q_p_own,
            q_p_cross,
            q_pp_own,
            q_pp_cross,
        })
    }

    /// Production cost and partials at `(m, q)`.
    pub fn cost_partials(&self, m: f64, q: f64) -> Result<CostPartials> {
        if !(m > 0.0) || !(q > 0.0) {
            return Err(Error::Domain(format!(
                "cost partials need m > 0 and q > 0, got m={m}, q={q}"
            )));
        }
        Ok(match self.cost {
            CostFamily::Linear => CostPartials {
                value: m * q,
                dq: m,
                dm: q,
                dqq: 0.0,
                dqm: 1.0,
            },
            CostFamily::Power { c } => CostPartials {
                value: m * q.powf(c),
                dq: c * m * q.powf(c - 1.0),
                dm: q.powf(c),
                dqq: c * (c - 1.0) * m * q.powf(c - 2.0),
                dqm: c * q.powf(c - 1.0),
            },
        })
    }

    /// R&D technology values and partials at `(k, K)`.
    pub fn tech_partials(&self, k: f64, big_k: f64) -> Result<TechPartials> {
        if !(k > 0.0) || big_k < 0.0 {
            return Err(Error::Domain(format!(
                "tech partials need k > 0 and K >= 0, got k={k}, K={big_k}"
            )));
        }
        let t = &self.tech;
        let g_k = t.gamma_big_k(k);
        if g_k.abs() <= t.beta.abs() {
            return Err(Error::Domain(format!(
                "spillover dominance |Gamma_k| > |Gamma_K| fails at k={k} (Gamma_k={g_k}, beta={})",
                t.beta
            )));
        }
        let g_kk = if (t.alpha - 1.0).abs() < 1e-14 {
            0.0
        } else {
            t.alpha * (t.alpha - 1.0) * k.powf(t.alpha - 2.0)
        };
        Ok(TechPartials {
            gamma_big: t.gamma_big(k, big_k),
            gamma_big_k: g_k,
            gamma_big_kk: g_kk,
            gamma_big_bigk: t.beta,
            gamma_big_bigkk: 0.0,
            gamma_big_k_bigk: 0.0,
            rd_cost: t.rd_cost(k),
            rd_cost_d: t.rd_cost_d(k),
            rd_cost_dd: t.rd_cost_dd(k),
        })
    }

    fn check_firms(&self, len: usize) -> Result<()> {
        if len != self.n() {
            return Err(Error::Parameter(format!(
                "expected {} firm entries, got {len}",
                self.n()
            )));
        }
        Ok(())
    }
}

/// Region probed by [`validate_model`].
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ProbeRegion {
    pub q_lo: f64,
    pub q_hi: f64,
    pub m_lo: f64,
    pub m_hi: f64,
    pub k_lo: f64,
    pub k_hi: f64,
    /// Grid points per axis.
    pub grid: usize,
}

impl ProbeRegion {
    /// Default probe box: quantities in `[0.01, 0.99*choke]`, cost levels in
    /// `[0.01, 0.99*a]`, investments in `[0.01, 1]`.
    pub fn default_for(spec: &ModelSpec) -> Self {
        let qc = spec.choke_quantity();
        Self {
            q_lo: 0.01,
            q_hi: 0.99 * qc,
            m_lo: 0.01,
            m_hi: 0.99 * spec.choke_price(),
            k_lo: 0.01,
            k_hi: 1.0,
            grid: 16,
        }
    }
}

/// Outcome of one sign check over the probe region.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum CheckStatus {
    Pass,
    /// The quantity is exactly zero where a strict sign was assumed.
    Degenerate { at: String },
    Violation { at: String, value: f64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationCheck {
    pub name: &'static str,
    pub status: CheckStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<ValidationCheck>,
}

impl ValidationReport {
    /// True when no check reports a violation (degenerate boundaries allowed).
    pub fn no_violations(&self) -> bool {
        !self
            .checks
            .iter()
            .any(|c| matches!(c.status, CheckStatus::Violation { .. }))
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status == CheckStatus::Pass)
    }
}

/// Checks every model sign assumption on a grid over `probe`. Violations are
/// report entries, not errors; each check records the first point at which it
/// fails.
pub fn validate_model(spec: &ModelSpec, probe: &ProbeRegion) -> ValidationReport {
    let mut checks: Vec<ValidationCheck> = Vec::new();
    let grid = probe.grid.max(2);
    let axis = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / (grid - 1) as f64;

    // Demand slope signs over the symmetric quantity axis.
    let mut demand = [
        ("dp_i/dq_i < 0", CheckStatus::Pass),
        ("dp_i/dq_j < 0", CheckStatus::Pass),
        ("dq_i/dp_i < 0", CheckStatus::Pass),
        ("dq_i/dp_j > 0", CheckStatus::Pass),
    ];
    for i in 0..grid {
        let q = axis(probe.q_lo, probe.q_hi, i);
        let p = spec.symmetric_price_at_quantity(q);
        if p <= 0.0 {
            continue;
        }
        let point = SymmetricPoint { m: 1.0, p, q };
        let d = match spec.demand_partials(&point) {
            Ok(d) => d,
            Err(e) => {
                record(&mut demand[0].1, &format!("q={q}: {e}"), f64::NAN);
                continue;
            }
        };
        record_sign(&mut demand[0].1, d.p_q_own, Sign::Negative, q);
        record_sign(&mut demand[1].1, d.p_q_cross, Sign::Negative, q);
        record_sign(&mut demand[2].1, d.q_p_own, Sign::Negative, q);
        record_sign(&mut demand[3].1, d.q_p_cross, Sign::Positive, q);
    }
    for (name, status) in demand {
        checks.push(ValidationCheck { name, status });
    }

    // Cost partial signs over (m, q).
    let mut cost = [
        ("dC/dq > 0", CheckStatus::Pass),
        ("dC/dm > 0", CheckStatus::Pass),
        ("d2C/dqdm > 0", CheckStatus::Pass),
    ];
    for i in 0..grid {
        for j in 0..grid {
            let m = axis(probe.m_lo, probe.m_hi, i);
            let q = axis(probe.q_lo, probe.q_hi, j);
            if m <= 0.0 || q <= 0.0 {
                continue;
            }
            if let Ok(c) = spec.cost_partials(m, q) {
                let at = m; // first axis coordinate is enough to locate
                record_sign(&mut cost[0].1, c.dq, Sign::Positive, at);
                record_sign(&mut cost[1].1, c.dm, Sign::Positive, at);
                record_sign(&mut cost[2].1, c.dqm, Sign::Positive, at);
            }
        }
    }
    for (name, status) in cost {
        checks.push(ValidationCheck { name, status });
    }

    // Technology signs over the investment axis, including spillover dominance.
    let mut tech = [
        ("Gamma_k > 0", CheckStatus::Pass),
        ("Gamma_K >= 0", CheckStatus::Pass),
        ("|Gamma_k| > |Gamma_K|", CheckStatus::Pass),
        ("gamma' > 0", CheckStatus::Pass),
        ("gamma'' > 0", CheckStatus::Pass),
    ];
    for i in 0..grid {
        let k = axis(probe.k_lo, probe.k_hi, i);
        if k <= 0.0 {
            continue;
        }
        let g_k = spec.tech.gamma_big_k(k);
        record_sign(&mut tech[0].1, g_k, Sign::Positive, k);
        if spec.tech.beta < 0.0 {
            record(&mut tech[1].1, &format!("k={k}"), spec.tech.beta);
        }
        record_sign(&mut tech[2].1, g_k.abs() - spec.tech.beta.abs(), Sign::Positive, k);
        record_sign(&mut tech[3].1, spec.tech.rd_cost_d(k), Sign::Positive, k);
        record_sign(&mut tech[4].1, spec.tech.rd_cost_dd(k), Sign::Positive, k);
    }
    for (name, status) in tech {
        checks.push(ValidationCheck { name, status });
    }

    ValidationReport { checks }
}

enum Sign {
    Positive,
    Negative,
}

fn record_sign(status: &mut CheckStatus, value: f64, want: Sign, at: f64) {
    if !matches!(status, CheckStatus::Pass) {
        return;
    }
    let ok = match want {
        Sign::Positive => value > 0.0,
        Sign::Negative => value < 0.0,
    };
    if ok {
        return;
    }
    *status = if value == 0.0 {
        CheckStatus::Degenerate { at: format!("{at}") }
    } else {
        CheckStatus::Violation { at: format!("{at}"), value }
    };
}

fn record(status: &mut CheckStatus, at: &str, value: f64) {
    if matches!(status, CheckStatus::Pass) {
        *status = CheckStatus::Violation { at: at.to_string(), value };
    }
}

/// Gaussian elimination with partial pivoting; returns `None` on a singular
/// system. Dimensions here are the firm count, so no factorization reuse.
pub(crate) fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap()
        })?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut sum = b[col];
        for k in col + 1..n {
            sum -= a[col][k] * x[k];
        }
        x[col] = sum / a[col][col];
    }
    Some(x)
}
