//! Fixed-step integration of the cost-state dynamics
//! `dm_i/dt = m_i [ -Gamma(k_i, K_{-i}) + delta ]` under a supplied
//! investment policy, plus convergence reporting against a solved steady
//! state. The dynamics leave every m stationary once Gamma = delta, so
//! convergence is always judged against a given target, never inferred from
//! the state equation alone.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::steadystate::{solve_k_star, SteadyState};

/// Common investment policy applied by every firm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "lowercase", deny_unknown_fields)]
pub enum Policy {
    /// Constant investment level.
    Constant { k: f64 },
    /// The level solving the state stationarity condition.
    #[serde(rename = "steady")]
    SteadyStateK,
    /// Piecewise-constant schedule: `(start_time, level)` pairs, applied in
    /// order; the first entry must start at t = 0.
    Table { entries: Vec<(f64, f64)> },
}

impl Policy {
    fn validate(&self) -> Result<()> {
        match self {
            Policy::Constant { k } => {
                if !(*k > 0.0) {
                    return Err(Error::Parameter(format!("policy k must be > 0, got {k}")));
                }
            }
            Policy::SteadyStateK => {}
            Policy::Table { entries } => {
                if entries.is_empty() {
                    return Err(Error::Parameter("table policy needs at least one entry".into()));
                }
                if entries[0].0 != 0.0 {
                    return Err(Error::Parameter("table policy must start at t = 0".into()));
                }
                for w in entries.windows(2) {
                    if w[1].0 <= w[0].0 {
                        return Err(Error::Parameter("table policy times must increase".into()));
                    }
                }
                if let Some((t, k)) = entries.iter().find(|(_, k)| !(*k > 0.0)) {
                    return Err(Error::Parameter(format!(
                        "table policy level must be > 0, got {k} at t={t}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn level_at(&self, t: f64, k_star: f64) -> f64 {
        match self {
            Policy::Constant { k } => *k,
            Policy::SteadyStateK => k_star,
            Policy::Table { entries } => entries
                .iter()
                .rev()
                .find(|(start, _)| t >= *start)
                .map(|(_, k)| *k)
                .unwrap_or(entries[0].1),
        }
    }
}

/// Time series of the per-firm cost states under a policy.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// `m[t][i]`: cost state of firm i at grid point t.
    pub m: Vec<Vec<f64>>,
    /// `k[t][i]`: investment applied at grid point t.
    pub k: Vec<Vec<f64>>,
    /// `|Gamma(k, (n-1)k) - delta|` at the horizon.
    pub terminal_residual: f64,
}

/// Classic fourth-order one-step integration on a fixed grid.
pub fn integrate(
    spec: &ModelSpec,
    policy: &Policy,
    m0: &[f64],
    horizon: f64,
    step: f64,
) -> Result<Trajectory> {
    policy.validate()?;
    if m0.len() != spec.n() {
        return Err(Error::Parameter(format!(
            "expected {} initial cost levels, got {}",
            spec.n(),
            m0.len()
        )));
    }
    if let Some(bad) = m0.iter().find(|&&x| !(x > 0.0)) {
        return Err(Error::Parameter(format!("initial cost levels must be > 0, got {bad}")));
    }
    if !(step > 0.0) {
        return Err(Error::Parameter(format!("step must be > 0, got {step}")));
    }
    if horizon < step {
        return Err(Error::Parameter(format!(
            "horizon {horizon} must be at least one step {step}"
        )));
    }
    let k_star = match policy {
        Policy::SteadyStateK => solve_k_star(&spec.params, &spec.tech)?,
        _ => 0.0,
    };
    let n = spec.n();
    let nm1 = (n - 1) as f64;
    let delta = spec.params.delta;
    let rate = |k: f64| -spec.tech.gamma_big(k, nm1 * k) + delta;

    let steps = (horizon / step).round() as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut m_path = Vec::with_capacity(steps + 1);
    let mut k_path = Vec::with_capacity(steps + 1);
    let mut m = m0.to_vec();
    for idx in 0..=steps {
        let t = idx as f64 * step;
        let k_now = policy.level_at(t, k_star);
        times.push(t);
        m_path.push(m.clone());
        k_path.push(vec![k_now; n]);
        if idx == steps {
            break;
        }
        // With a common k the per-firm equations decouple; RK4 on each.
        let r0 = rate(k_now);
        let r_mid = rate(policy.level_at(t + 0.5 * step, k_star));
        let r1 = rate(policy.level_at(t + step, k_star));
        m = m
            .iter()
            .map(|&mi| {
                let k1 = mi * r0;
                let k2 = (mi + 0.5 * step * k1) * r_mid;
                let k3 = (mi + 0.5 * step * k2) * r_mid;
                let k4 = (mi + step * k3) * r1;
                mi + step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            })
            .collect();
        if let Some(bad) = m.iter().find(|&&x| !(x > 0.0) || !x.is_finite()) {
            return Err(Error::Domain(format!(
                "cost state left the positive region ({bad}) at t={t}; reduce the step"
            )));
        }
    }
    let k_end = policy.level_at(horizon, k_star);
    let terminal_residual = (spec.tech.gamma_big(k_end, nm1 * k_end) - delta).abs();
    Ok(Trajectory { times, m: m_path, k: k_path, terminal_residual })
}

/// Convergence summary of a trajectory against a target steady state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub converged: bool,
    /// `|m(horizon) - m*| / m*`, maximised over firms.
    pub final_gap: f64,
    /// Half-life of the gap from a log-linear fit; infinite when the gap does
    /// not shrink.
    pub half_life: f64,
}

pub fn convergence_report(trajectory: &Trajectory, target: &SteadyState) -> ConvergenceReport {
    let m_star = target.m_star;
    let last = trajectory.m.last().expect("trajectory has at least one point");
    let final_gap = last
        .iter()
        .map(|&mi| ((mi - m_star) / m_star).abs())
        .fold(0.0f64, f64::max);

    // Least-squares slope of ln(gap) over time, using the worst firm's gap.
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for (t, row) in trajectory.times.iter().zip(&trajectory.m) {
        let gap = row
            .iter()
            .map(|&mi| ((mi - m_star) / m_star).abs())
            .fold(0.0f64, f64::max);
        if gap > 1e-300 {
            pts.push((*t, gap.ln()));
        }
    }
    let half_life = if pts.len() < 2 {
        0.0
    } else {
        let n = pts.len() as f64;
        let (st, sy): (f64, f64) = pts.iter().fold((0.0, 0.0), |(a, b), (t, y)| (a + t, b + y));
        let (stt, sty): (f64, f64) = pts
            .iter()
            .fold((0.0, 0.0), |(a, b), (t, y)| (a + t * t, b + t * y));
        let slope = (n * sty - st * sy) / (n * stt - st * st);
        if slope < 0.0 {
            std::f64::consts::LN_2 / (-slope)
        } else {
            f64::INFINITY
        }
    };

    ConvergenceReport { converged: final_gap < 1e-6, final_gap, half_life }
}

/// Writes a trajectory as CSV with columns `t, m_1..m_n, k_1..k_n`.
pub fn trajectory_csv(trajectory: &Trajectory, sig: impl Fn(f64) -> String) -> String {
    let n = trajectory.m.first().map_or(0, |row| row.len());
    let mut out = String::from("t");
    for i in 1..=n {
        out.push_str(&format!(",m_{i}"));
    }
    for i in 1..=n {
        out.push_str(&format!(",k_{i}"));
    }
    out.push('\n');
    for ((t, m_row), k_row) in trajectory.times.iter().zip(&trajectory.m).zip(&trajectory.k) {
        out.push_str(&sig(*t));
        for v in m_row.iter().chain(k_row) {
            out.push(',');
            out.push_str(&sig(*v));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CostFamily, DemandFamily, MarketParams, RnDTech};

    fn spec() -> ModelSpec {
        ModelSpec::new(
            MarketParams::new(2, 0.1, 0.2).unwrap(),
            DemandFamily::LinearSubstitutes { a: 2.0, s: 0.5 },
            CostFamily::Linear,
            RnDTech::new(1.0, 0.0, 1.0, 2.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn stationary_when_gamma_equals_delta() {
        let s = spec();
        let traj = integrate(&s, &Policy::Constant { k: 0.2 }, &[1.0, 1.0], 5.0, 0.01).unwrap();
        for row in &traj.m {
            assert!((row[0] - 1.0).abs() < 1e-13 && (row[1] - 1.0).abs() < 1e-13);
        }
        assert!(traj.terminal_residual < 1e-15);
    }

    #[test]
    fn matches_exponential_decay() {
        let s = spec();
        let traj = integrate(&s, &Policy::Constant { k: 0.3 }, &[1.0, 1.0], 1.0, 0.01).unwrap();
        let exact = (-0.1f64).exp();
        let last = traj.m.last().unwrap()[0];
        assert!(((last - exact) / exact).abs() < 1e-10, "last={last}");
    }

    #[test]
    fn grows_when_investment_below_k_star() {
        let s = spec();
        let traj = integrate(&s, &Policy::Constant { k: 0.1 }, &[1.0, 1.0], 2.0, 0.01).unwrap();
        let exact = (0.2f64).exp();
        let last = traj.m.last().unwrap()[0];
        assert!(((last - exact) / exact).abs() < 1e-10);
        // monotone increasing path
        for w in traj.m.windows(2) {
            assert!(w[1][0] > w[0][0]);
        }
    }

    #[test]
    fn symmetric_inputs_stay_symmetric() {
        let s = spec();
        let traj = integrate(&s, &Policy::Constant { k: 0.35 }, &[0.7, 0.7], 3.0, 0.01).unwrap();
        for row in &traj.m {
            assert!((row[0] - row[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn table_policy_switches_levels() {
        let s = spec();
        let policy = Policy::Table { entries: vec![(0.0, 0.2), (1.0, 0.3)] };
        let traj = integrate(&s, &policy, &[1.0, 1.0], 2.0, 0.01).unwrap();
        // flat strictly before the switch; the step straddling t = 1 samples
        // the new level at its right endpoint, so allow O(step) slack there
        assert!((traj.m[99][0] - 1.0).abs() < 1e-13);
        let at_one = traj.m[100][0];
        assert!((at_one - 1.0).abs() < 1e-3);
        let last = traj.m.last().unwrap()[0];
        assert!(((last - (-0.1f64).exp()) / last).abs() < 1e-3);
        assert!(last < at_one);
    }

    #[test]
    fn validates_inputs() {
        let s = spec();
        assert!(integrate(&s, &Policy::Constant { k: 0.2 }, &[1.0], 1.0, 0.01).is_err());
        assert!(integrate(&s, &Policy::Constant { k: 0.2 }, &[1.0, -1.0], 1.0, 0.01).is_err());
        assert!(integrate(&s, &Policy::Constant { k: 0.2 }, &[1.0, 1.0], 0.001, 0.01).is_err());
        assert!(integrate(&s, &Policy::Constant { k: -0.2 }, &[1.0, 1.0], 1.0, 0.01).is_err());
    }

    #[test]
    fn convergence_against_target() {
        let s = spec();
        use crate::steadystate::{joint_steady_state, Mode, Regime};
        let roots = joint_steady_state(&s, Regime::Bertrand, Mode::OpenLoop).unwrap();
        let target = &roots[1];
        // sitting exactly at the steady state
        let traj = integrate(
            &s,
            &Policy::SteadyStateK,
            &[target.m_star, target.m_star],
            1.0,
            0.01,
        )
        .unwrap();
        let rep = convergence_report(&traj, target);
        assert!(rep.converged);
        assert!(rep.final_gap < 1e-12);

        // at 2 m*: every m is stationary when Gamma = delta, so the gap stays
        let traj2 = integrate(
            &s,
            &Policy::SteadyStateK,
            &[2.0 * target.m_star, 2.0 * target.m_star],
            1.0,
            0.01,
        )
        .unwrap();
        let rep2 = convergence_report(&traj2, target);
        assert!(!rep2.converged);
        assert!(rep2.half_life.is_infinite());
    }

    #[test]
    fn csv_layout() {
        let s = spec();
        let traj = integrate(&s, &Policy::Constant { k: 0.2 }, &[1.0, 1.0], 0.02, 0.01).unwrap();
        let csv = trajectory_csv(&traj, |x| format!("{x:.11e}"));
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t,m_1,m_2,k_1,k_2");
        assert_eq!(csv.lines().count(), 4);
    }
}
