//! Symmetric slope inversion between direct and inverse demand, and the
//! reaction of equilibrium prices/quantities to one firm's cost level.
//!
//! The n-equation systems collapse to 2x2 closed forms under symmetry; the
//! brute-force n x n solves live in the test suite as independent oracles.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ModelSpec, SymmetricPoint};

/// Own/cross first and second partials of inverse and direct demand at a
/// symmetric point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DemandPartials {
    pub p_q_own: f64,
    pub p_q_cross: f64,
    /// `d2 p_i / d q_i^2`
    pub p_qq_own: f64,
    /// `d2 p_i / d q_i d q_j`
    pub p_qq_cross: f64,
    pub q_p_own: f64,
    pub q_p_cross: f64,
    /// `d2 q_i / d p_i^2`
    pub q_pp_own: f64,
    /// `d2 q_i / d p_i d p_j`
    pub q_pp_cross: f64,
}

/// Classification of the strategic interaction at a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StrategicClass {
    Substitutes,
    Complements,
    Degenerate,
}

/// How the symmetric equilibrium strategic variable reacts to a marginal
/// increase in one firm's cost level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReactionDerivatives {
    /// `d x_i / d m_i` where x is price (Bertrand) or quantity (Cournot).
    pub own_reaction: f64,
    /// `d x_j / d m_i`, j != i.
    pub cross_reaction: f64,
    pub strategic_class: StrategicClass,
}

/// Exact zeros of the classifying quantity occur only at s = 0.
const DEGENERATE_TOL: f64 = 1e-12;

/// Residual above which a supplied point is rejected as off-equilibrium.
const FOC_TOL: f64 = 1e-8;

/// Inverts the symmetric inverse-demand slope pair into the direct-demand
/// slope pair:
///
/// ```text
/// q_p_own   = [p_q_own + (n-2) p_q_cross] / D
/// q_p_cross = -p_q_cross / D
/// D = (p_q_own - p_q_cross) [p_q_own + (n-1) p_q_cross]
/// ```
pub fn invert_symmetric_slopes(p_q_own: f64, p_q_cross: f64, n: usize) -> Result<(f64, f64)> {
    if !(p_q_own < 0.0) {
        return Err(Error::Domain(format!("own inverse slope must be negative, got {p_q_own}")));
    }
    let diff = p_q_own - p_q_cross;
    let row_sum = p_q_own + (n - 1) as f64 * p_q_cross;
    if diff == 0.0 || row_sum == 0.0 {
        return Err(Error::Singular(format!(
            "slope inversion denominator vanishes (diff={diff}, row_sum={row_sum})"
        )));
    }
    let denom = diff * row_sum;
    Ok((
        (p_q_own + (n - 2) as f64 * p_q_cross) / denom,
        -p_q_cross / denom,
    ))
}

/// `1 - q_p_own * p_q_own`, which equals
/// `-(n-1) p_q_cross^2 / ((p_q_own - p_q_cross)(p_q_own + (n-1) p_q_cross))`
/// and is strictly negative whenever the goods actually interact.
pub fn slope_product_gap(partials: &DemandPartials, n: usize) -> f64 {
    let diff = partials.p_q_own - partials.p_q_cross;
    let row_sum = partials.p_q_own + (n - 1) as f64 * partials.p_q_cross;
    -((n - 1) as f64) * partials.p_q_cross * partials.p_q_cross / (diff * row_sum)
}

/// Reaction of symmetric Bertrand equilibrium prices to a rise in firm i's
/// cost level, from the 2x2 system obtained by differentiating the price
/// first-order conditions in m_i.
pub fn price_reaction(spec: &ModelSpec, point: &SymmetricPoint) -> Result<ReactionDerivatives> {
    let n = spec.n() as f64;
    let d = spec.demand_partials(point)?;
    let c = spec.cost_partials(point.m, point.q)?;
    let markup = point.p - c.dq;

    let foc = point.q + markup * d.q_p_own;
    if foc.abs() > FOC_TOL {
        return Err(Error::Precondition(format!(
            "point is not a Bertrand equilibrium (FOC residual {foc:e})"
        )));
    }

    // The cross entry carries the same marginal-cost curvature correction as
    // the own entry: differentiating C_q(q_j(p)) in a rival's price leaves a
    // -C_qq q_p_own q_p_cross term. It vanishes for linear cost.
    let cross_term = d.q_p_cross + markup * d.q_pp_cross - c.dqq * d.q_p_own * d.q_p_cross;
    let phi_i = 2.0 * d.q_p_own + markup * d.q_pp_own - c.dqq * d.q_p_own * d.q_p_own;
    let psi_i = (n - 1.0) * cross_term;
    let psi_j = cross_term;
    let phi_j = phi_i + (n - 2.0) * cross_term;
    if !(phi_i < 0.0) {
        return Err(Error::Soc(format!("price second-order condition fails (phi_i={phi_i})")));
    }
    let det = phi_i * phi_j - psi_i * psi_j;
    if !(det > 0.0) {
        return Err(Error::Stability(format!(
            "Bertrand reaction system is unstable (phi_i*phi_j - psi_i*psi_j = {det})"
        )));
    }
    Ok(ReactionDerivatives {
        own_reaction: phi_j * c.dqm * d.q_p_own / det,
        cross_reaction: -psi_j * c.dqm * d.q_p_own / det,
        strategic_class: classify(psi_j),
    })
}

/// Reaction of symmetric Cournot equilibrium outputs to a rise in firm i's
/// cost level.
pub fn quantity_reaction(spec: &ModelSpec, point: &SymmetricPoint) -> Result<ReactionDerivatives> {
    let n = spec.n() as f64;
    let d = spec.demand_partials(point)?;
    let c = spec.cost_partials(point.m, point.q)?;

    let foc = point.p + d.p_q_own * point.q - c.dq;
    if foc.abs() > FOC_TOL {
        return Err(Error::Precondition(format!(
            "point is not a Cournot equilibrium (FOC residual {foc:e})"
        )));
    }

    let cross_term = d.p_q_cross + d.p_qq_cross * point.q;
    let own_block = 2.0 * d.p_q_own + d.p_qq_own * point.q - c.dqq;
    // Rival diagonal: a non-deviating firm reacts to the deviator through one
    // cross slope and to the other n-2 rivals through n-2 more, mirroring the
    // phi_j = phi_i + (n-2) psi_j structure of the price system. At n = 2 the
    // two diagonals coincide.
    let rival_block = own_block + (n - 2.0) * cross_term;
    let det = own_block * rival_block - (n - 1.0) * cross_term * cross_term;
    if !(det > 0.0) {
        return Err(Error::Stability(format!(
            "Cournot reaction system is unstable (Delta = {det})"
        )));
    }
    Ok(ReactionDerivatives {
        own_reaction: rival_block * c.dqm / det,
        // Substitutes means cross_term < 0, so the rival's output rises.
        cross_reaction: -cross_term * c.dqm / det,
        strategic_class: classify(cross_term),
    })
}

fn classify(x: f64) -> StrategicClass {
    if x.abs() < DEGENERATE_TOL {
        StrategicClass::Degenerate
    } else if x > 0.0 {
        StrategicClass::Complements
    } else {
        StrategicClass::Substitutes
    }
}
