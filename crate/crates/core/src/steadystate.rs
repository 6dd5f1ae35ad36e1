//! Steady-state conditions of the dynamic game: the common R&D level pinned
//! by the state equation, its comparative statics in the number of firms,
//! the investment stationarity conditions for the open-loop, memoryless
//! closed-loop and feedback solutions, costates, and joint (k*, m*) roots.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::equilibrium::{self, SocEntry, StaticEquilibrium};
use crate::error::{Error, Result};
use crate::model::{MarketParams, ModelSpec, RnDTech};
use crate::reactions::{self, ReactionDerivatives};
use crate::root;

/// Solution concept. Closed-loop and feedback require zero spillover.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[serde(rename = "open")]
    OpenLoop,
    #[serde(rename = "closed")]
    ClosedLoop,
    Feedback,
}

/// Competition regime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Bertrand,
    Cournot,
}

/// One solved steady state of the game.
#[derive(Clone, Debug, Serialize)]
pub struct SteadyState {
    pub regime: Regime,
    pub mode: Mode,
    pub k_star: f64,
    pub m_star: f64,
    pub q_star: f64,
    pub p_star: f64,
    pub lambda_own: f64,
    pub lambda_other: f64,
    /// Condition name -> residual at the solution.
    pub residuals: BTreeMap<String, f64>,
    /// Price/output second-order condition at the static equilibrium.
    pub choice_soc: SocEntry,
    /// Investment second-order condition.
    pub investment_soc: SocEntry,
    /// Heuristic stability tag: the investment level implied by the cost
    /// level decreases through k* as m passes m*.
    pub k_locally_decreasing: bool,
}

/// Derivatives of the steady-state investment in the (continuous) number of
/// firms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComparativeStatics {
    pub k_star: f64,
    /// d k* / d n, weakly negative.
    pub dk_dn: f64,
    /// d (n k*) / d n, strictly positive.
    pub dnk_dn: f64,
}

/// Investment level implied by a given cost level, with the stationarity
/// residual at the returned point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImpliedInvestment {
    pub k: f64,
    pub residual: f64,
}

/// Solves `Gamma(k, (n-1)k) = delta` for the common steady-state investment.
/// The left side is strictly increasing in k, so the root is unique.
pub fn solve_k_star(params: &MarketParams, tech: &RnDTech) -> Result<f64> {
    solve_k_star_continuous(tech, params.n as f64, params.delta)
}

/// Continuous-n variant used for differentiation in n.
pub fn solve_k_star_continuous(tech: &RnDTech, n: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Parameter(format!("delta must lie in (0,1), got {delta}")));
    }
    // n > 1 (not >= 2) so the continuous variant can be finite-differenced
    // at the integer boundary n = 2.
    if !(n > 1.0) {
        return Err(Error::Parameter(format!("n must be > 1, got {n}")));
    }
    let f = |k: f64| tech.gamma_big(k, (n - 1.0) * k) - delta;
    let mut hi = 1.0;
    while f(hi) < 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::NoRoot(format!(
                "Gamma(k,(n-1)k) stays below delta={delta} on the search bracket"
            )));
        }
    }
    let k = root::brent(f, 0.0, hi, 1e-16, 300)?;
    if !(k > 0.0) {
        return Err(Error::NoRoot("steady-state investment is not positive".into()));
    }
    Ok(k)
}

/// Analytic derivatives of k* and n*k* in n:
///
/// ```text
/// dk*/dn    = -Gamma_K k* / (Gamma_k + (n-1) Gamma_K)
/// d(nk*)/dn = (Gamma_k - Gamma_K) k* / (Gamma_k + (n-1) Gamma_K)
/// ```
pub fn comparative_statics_n(params: &MarketParams, tech: &RnDTech) -> Result<ComparativeStatics> {
    let n = params.n as f64;
    let k_star = solve_k_star(params, tech)?;
    let g_k = tech.gamma_big_k(k_star);
    let g_bigk = tech.beta;
    let denom = g_k + (n - 1.0) * g_bigk;
    Ok(ComparativeStatics {
        k_star,
        dk_dn: -g_bigk * k_star / denom,
        dnk_dn: (g_k - g_bigk) * k_star / denom,
    })
}

/// Costate pair at a steady state: `lambda_other = 0` exactly and
/// `lambda_own = -gamma'(k) / (Gamma_k m)`.
pub fn costate(spec: &ModelSpec, m: f64, k: f64) -> Result<(f64, f64)> {
    if !(m > 0.0) || !(k > 0.0) {
        return Err(Error::Domain(format!("costate needs m > 0 and k > 0, got m={m}, k={k}")));
    }
    let g_k = spec.tech.gamma_big_k(k);
    Ok((-spec.tech.rd_cost_d(k) / (g_k * m), 0.0))
}

fn require_no_spillover(spec: &ModelSpec, mode: Mode) -> Result<()> {
    if mode != Mode::OpenLoop && spec.tech.beta != 0.0 {
        return Err(Error::Precondition(
            "closed-loop and feedback solutions require zero spillover (beta = 0)".into(),
        ));
    }
    Ok(())
}

/// Static equilibrium, reaction derivatives (for closed-loop/feedback modes)
/// and the bracket multiplying `Gamma_k` in the stationarity condition.
fn stationarity_bracket(
    spec: &ModelSpec,
    regime: Regime,
    mode: Mode,
    m: f64,
) -> Result<(f64, StaticEquilibrium, Option<ReactionDerivatives>)> {
    let eq = match regime {
        Regime::Bertrand => equilibrium::bertrand_static(spec, m)?,
        Regime::Cournot => equilibrium::cournot_static(spec, m)?,
    };
    let c_m = spec.cost_partials(m, eq.point.q)?.dm;
    let nm1 = (spec.n() - 1) as f64;
    match mode {
        Mode::OpenLoop => Ok((c_m, eq, None)),
        Mode::ClosedLoop | Mode::Feedback => {
            let d = spec.demand_partials(&eq.point)?;
            match regime {
                Regime::Bertrand => {
                    let r = reactions::price_reaction(spec, &eq.point)?;
                    let b = c_m - nm1 * d.q_p_cross * eq.point.p * r.cross_reaction;
                    Ok((b, eq, Some(r)))
                }
                Regime::Cournot => {
                    let r = reactions::quantity_reaction(spec, &eq.point)?;
                    let b = c_m - nm1 * d.p_q_cross * eq.point.q * r.cross_reaction;
                    Ok((b, eq, Some(r)))
                }
            }
        }
    }
}

/// Solves the investment stationarity condition
/// `B(m) * Gamma_k(k, (n-1)k) = (rho/m) * gamma'(k)` for k at a given cost
/// level, where `B` depends on regime and mode.
///
/// Damped fixed-point iteration with `Gamma_k` frozen per step; falls back to
/// a bracketed root-find on the full residual if the iteration stalls.
pub fn k_given_m(spec: &ModelSpec, regime: Regime, mode: Mode, m: f64) -> Result<ImpliedInvestment> {
    require_no_spillover(spec, mode)?;
    let (bracket, _, _) = stationarity_bracket(spec, regime, mode, m)?;
    solve_stationarity(spec, bracket, m)
}

fn solve_stationarity(spec: &ModelSpec, bracket: f64, m: f64) -> Result<ImpliedInvestment> {
    if !(bracket > 0.0) {
        return Err(Error::NoRoot(format!(
            "stationarity bracket is nonpositive ({bracket}); no positive investment solves it"
        )));
    }
    let t = &spec.tech;
    let rho = spec.params.rho;
    let residual = |k: f64| bracket * t.gamma_big_k(k) - (rho / m) * t.rd_cost_d(k);
    // gamma'(k) = b g k^(g-1) inverts in closed form, so each step solves the
    // condition with Gamma_k frozen at the previous iterate.
    let step = |k: f64| (bracket * m * t.gamma_big_k(k) / (rho * t.b * t.g)).powf(1.0 / (t.g - 1.0));
    let mut k = (bracket * m / (rho * t.b * t.g)).powf(1.0 / (t.g - 1.0)).max(1e-8);
    let mut converged = false;
    for _ in 0..200 {
        let next = 0.5 * k + 0.5 * step(k);
        if !next.is_finite() || next <= 0.0 {
            break;
        }
        if (next - k).abs() < 1e-12 * k.max(1.0) {
            k = next;
            converged = true;
            break;
        }
        k = next;
    }
    if !converged || residual(k).abs() > 1e-10 {
        // The residual is strictly decreasing in k: Gamma_k is nonincreasing
        // and gamma' strictly increasing.
        let mut hi = k.max(1.0);
        while residual(hi) > 0.0 {
            hi *= 2.0;
            if hi > 1e12 {
                return Err(Error::NoRoot("stationarity residual has no sign change".into()));
            }
        }
        let mut lo = hi;
        while residual(lo) < 0.0 {
            lo *= 0.5;
            if lo < 1e-300 {
                return Err(Error::NoRoot("stationarity residual has no sign change".into()));
            }
        }
        k = root::brent(residual, lo, hi, 1e-16, 300)?;
    }
    Ok(ImpliedInvestment { k, residual: residual(k) })
}

/// Evaluates the investment stationarity residual at `(m, k)` twice: once
/// assembled along the memoryless closed-loop adjoint reduction and once
/// along the Hamilton-Jacobi-Bellman envelope. The two values coincide for
/// every admissible `(m, k)`, which is the closed-loop/feedback equivalence
/// as a testable identity.
pub fn feedback_residual(spec: &ModelSpec, regime: Regime, m: f64, k: f64) -> Result<(f64, f64)> {
    if spec.tech.beta != 0.0 {
        return Err(Error::Precondition(
            "feedback residual requires zero spillover (beta = 0)".into(),
        ));
    }
    if !(k > 0.0) {
        return Err(Error::Domain(format!("feedback residual needs k > 0, got {k}")));
    }
    let (bracket, _, _) = stationarity_bracket(spec, regime, Mode::ClosedLoop, m)?;
    let t = &spec.tech;
    let rho = spec.params.rho;
    let g_k = t.gamma_big_k(k);
    let gp = t.rd_cost_d(k);

    // Closed-loop assembly: the adjoint reduction yields the condition
    // B * Gamma_k = (rho/m) gamma'.
    let closed = bracket * g_k - (rho / m) * gp;

    // HJB assembly: the envelope gives rho V_m = -B, the investment condition
    // -gamma' - V_m m Gamma_k = 0; rescaled to the same units.
    let v_m = -bracket / rho;
    let hjb = (-gp - v_m * m * g_k) * (rho / m);

    Ok((closed, hjb))
}

/// All joint steady states `(k*, m*)` for a regime and mode: `k*` from the
/// state stationarity, then every cost level at which the investment
/// condition returns exactly `k*`, located by sign scanning over 1000 grid
/// cells and bisection refinement. An empty list means no steady state lies
/// in the admissible range; solver failures propagate as errors.
pub fn joint_steady_state(spec: &ModelSpec, regime: Regime, mode: Mode) -> Result<Vec<SteadyState>> {
    require_no_spillover(spec, mode)?;
    let k_star = solve_k_star(&spec.params, &spec.tech)?;
    let choke = spec.choke_price();
    let eps = 1e-6 * choke;
    let gap = |m: f64| -> Option<f64> {
        match k_given_m(spec, regime, mode, m) {
            Ok(sol) => Some(sol.k - k_star),
            Err(_) => None,
        }
    };
    let brackets = root::scan_brackets(gap, eps, choke - eps, 1000);
    let mut out = Vec::new();
    for (mut lo, mut hi) in brackets {
        // bisection: 80 halvings take the bracket far below the 1e-12 target
        let mut f_lo = match gap(lo) {
            Some(v) => v,
            None => continue,
        };
        for _ in 0..80 {
            if hi - lo < 1e-13 * hi.max(1.0) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let f_mid = match gap(mid) {
                Some(v) => v,
                None => break,
            };
            if f_lo * f_mid <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
                f_lo = f_mid;
            }
        }
        let m_star = 0.5 * (lo + hi);
        out.push(build_steady_state(spec, regime, mode, k_star, m_star, &gap)?);
    }
    out.sort_by(|a, b| a.m_star.partial_cmp(&b.m_star).unwrap());
    Ok(out)
}

fn build_steady_state(
    spec: &ModelSpec,
    regime: Regime,
    mode: Mode,
    k_star: f64,
    m_star: f64,
    gap: &dyn Fn(f64) -> Option<f64>,
) -> Result<SteadyState> {
    let (bracket, eq, _) = stationarity_bracket(spec, regime, mode, m_star)?;
    let t = &spec.tech;
    let nm1 = (spec.n() - 1) as f64;
    let (lambda_own, lambda_other) = costate(spec, m_star, k_star)?;
    let investment_soc = equilibrium::soc_k(spec, k_star, m_star, lambda_own, lambda_other)?;

    let mut residuals = BTreeMap::new();
    residuals.insert(
        "state_stationarity".to_string(),
        t.gamma_big(k_star, nm1 * k_star) - spec.params.delta,
    );
    residuals.insert("static_foc".to_string(), eq.foc_residual);
    residuals.insert(
        "investment_foc".to_string(),
        bracket * t.gamma_big_k(k_star) - (spec.params.rho / m_star) * t.rd_cost_d(k_star),
    );

    let h = 1e-6 * m_star.max(1.0);
    let k_locally_decreasing = match (gap(m_star - h), gap(m_star + h)) {
        (Some(a), Some(b)) => a > b,
        _ => false,
    };

    Ok(SteadyState {
        regime,
        mode,
        k_star,
        m_star,
        q_star: eq.point.q,
        p_star: eq.point.p,
        lambda_own,
        lambda_other,
        residuals,
        choice_soc: eq.soc,
        investment_soc,
        k_locally_decreasing,
    })
}
