//! Acceptance gate: one test per release criterion, each printing a single
//! pass line. The criteria cover closed-form regression, the three ordering
//! propositions, the reaction-derivative oracles, the closed-loop/feedback
//! equivalence (including byte-identical command output), integrator accuracy
//! and the joint steady-state roots.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use oligo_rd_core::{
    bertrand_static, compare_bertrand_cournot, compare_loops, comparative_statics_n,
    cournot_static, dynamics, feedback_residual, joint_steady_state, k_given_m, price_reaction,
    quantity_reaction, reactions, solve_k_star, CostFamily, DemandFamily, MarketParams, Mode,
    ModelSpec, Regime, RnDTech, StrategicClass, Verdict,
};
use oligo_rd_core::steadystate::solve_k_star_continuous;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn linear_spec(n: usize, a: f64, s: f64, b: f64, rho: f64, delta: f64) -> ModelSpec {
    ModelSpec::new(
        MarketParams::new(n, rho, delta).unwrap(),
        DemandFamily::LinearSubstitutes { a, s },
        CostFamily::Linear,
        RnDTech::new(1.0, 0.0, b, 2.0).unwrap(),
    )
    .unwrap()
}

fn reference_spec() -> ModelSpec {
    linear_spec(2, 2.0, 0.5, 1.0, 0.1, 0.2)
}

fn rel_close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * x.abs().max(y.abs()).max(1e-300)
}

/// Criterion 1: static equilibria and open-loop investment at a given cost
/// level match the linear-model closed forms to 1e-10 relative error across
/// 200 random parameter draws.
#[test]
fn criterion_1_closed_form_regression() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..200 {
        let n = rng.gen_range(2..=6usize);
        let nf = n as f64;
        let a = rng.gen_range(1.0..3.0);
        let s = rng.gen_range(0.0..0.95);
        let m = rng.gen_range(0.05..0.9) * a;
        let b = rng.gen_range(0.5..2.0);
        let rho = rng.gen_range(0.05..0.5);
        let spec = linear_spec(n, a, s, b, rho, 0.2);

        let p_b = (a * (1.0 - s) + m * (1.0 + (nf - 2.0) * s)) / (2.0 + (nf - 3.0) * s);
        let q_b = (p_b - m) * (1.0 + (nf - 2.0) * s) / ((1.0 - s) * (1.0 + (nf - 1.0) * s));
        let q_c = (a - m) / (2.0 + (nf - 1.0) * s);
        let p_c = m + q_c;

        let eq_b = bertrand_static(&spec, m).unwrap();
        let eq_c = cournot_static(&spec, m).unwrap();
        assert!(rel_close(eq_b.point.p, p_b, 1e-10), "p_B {} vs {p_b}", eq_b.point.p);
        assert!(rel_close(eq_b.point.q, q_b, 1e-10), "q_B {} vs {q_b}", eq_b.point.q);
        assert!(rel_close(eq_c.point.q, q_c, 1e-10), "q_C {} vs {q_c}", eq_c.point.q);
        assert!(rel_close(eq_c.point.p, p_c, 1e-10));

        let k_b = k_given_m(&spec, Regime::Bertrand, Mode::OpenLoop, m).unwrap().k;
        let k_c = k_given_m(&spec, Regime::Cournot, Mode::OpenLoop, m).unwrap().k;
        assert!(rel_close(k_b, q_b * m / (2.0 * b * rho), 1e-10), "k_B {k_b}");
        assert!(rel_close(k_c, q_c * m / (2.0 * b * rho), 1e-10), "k_C {k_c}");
    }
    println!("criterion 1: pass - closed-form regression (200 draws, 1e-10)");
}

/// Criterion 2: number-of-firms statics. Analytic derivatives match finite
/// differences to 1e-6 relative, carry the predicted signs in every grid
/// cell, and reduce to the exact linear-technology ratios at alpha = 1.
#[test]
fn criterion_2_firm_count_statics() {
    let mut cells = 0;
    for &beta in &[0.0, 0.25, 0.5, 0.9] {
        for &alpha in &[0.5, 1.0] {
            for &delta in &[0.1, 0.2, 0.5] {
                for &n in &[2usize, 3, 5] {
                    let tech = RnDTech::new(alpha, beta, 1.0, 2.0).unwrap();
                    let params = MarketParams::new(n, 0.1, delta).unwrap();
                    let cs = comparative_statics_n(&params, &tech).unwrap();
                    assert!(cs.dk_dn <= 0.0);
                    assert!(cs.dnk_dn > 0.0);

                    let h = 1e-5;
                    let nf = n as f64;
                    let k = |x: f64| solve_k_star_continuous(&tech, x, delta).unwrap();
                    let fd_k = (k(nf + h) - k(nf - h)) / (2.0 * h);
                    let fd_nk = ((nf + h) * k(nf + h) - (nf - h) * k(nf - h)) / (2.0 * h);
                    assert!((cs.dk_dn - fd_k).abs() <= 1e-6 * cs.dk_dn.abs().max(1.0));
                    assert!((cs.dnk_dn - fd_nk).abs() <= 1e-6 * cs.dnk_dn.abs().max(1.0));

                    if alpha == 1.0 {
                        let denom = 1.0 + (nf - 1.0) * beta;
                        assert!((cs.dk_dn + beta * cs.k_star / denom).abs() < 1e-12);
                        assert!((cs.dnk_dn - (1.0 - beta) * cs.k_star / denom).abs() < 1e-12);
                    }
                    cells += 1;
                }
            }
        }
    }
    println!("criterion 2: pass - firm-count statics ({cells} cells, signs + 1e-6 FD)");
}

/// Criterion 3: the price regime invests more at equal cost in every cell of
/// a 200-cell grid over both demand families, and both sign mechanisms
/// behind the ordering (the quantity-regime first-order condition evaluated
/// at the price-regime point, and the slope-product gap) are negative.
#[test]
fn criterion_3_price_regime_invests_more() {
    let tech = RnDTech::new(1.0, 0.0, 1.0, 2.0).unwrap();
    let mut cells = Vec::new();
    for &s in &[0.1, 0.3, 0.5, 0.7, 0.9] {
        for n in 2..=5usize {
            for &m in &[0.3, 0.6, 0.9, 1.2, 1.5] {
                cells.push((DemandFamily::LinearSubstitutes { a: 2.0, s }, n, m));
            }
        }
    }
    // The power family needs the own slope to dominate the cross slope at
    // the equilibrium, which caps the admissible s range.
    for &s in &[0.06, 0.1, 0.15, 0.2, 0.25] {
        for n in 2..=5usize {
            for &m in &[0.3, 0.5, 0.7, 0.9, 1.1] {
                cells.push((DemandFamily::PowerInverse { a: 2.0, s, eta: 2.0 }, n, m));
            }
        }
    }
    assert_eq!(cells.len(), 200);
    for (demand, n, m) in cells {
        let spec = ModelSpec::new(
            MarketParams::new(n, 0.1, 0.2).unwrap(),
            demand,
            CostFamily::Linear,
            tech,
        )
        .unwrap();
        let row = compare_bertrand_cournot(&spec, m)
            .unwrap_or_else(|e| panic!("cell {demand:?} n={n} m={m}: {e}"));
        assert!(
            row.k_bertrand.unwrap() > row.k_cournot.unwrap(),
            "cell {demand:?} n={n} m={m}"
        );
        assert!(row.cournot_foc_at_bertrand.unwrap() < 0.0, "cell {demand:?} n={n} m={m}");
        assert!(row.slope_gap.unwrap() < 0.0, "cell {demand:?} n={n} m={m}");
    }
    println!("criterion 3: pass - price regime invests more (200 cells, both families)");
}

/// Criterion 4: the symmetric slope inversion matches brute-force n-by-n
/// matrix inversion to 1e-10, and both reaction derivatives match
/// finite-difference equilibrium re-solves to 1e-4 relative over 100 random
/// admissible cells.
#[test]
fn criterion_4_reaction_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for n in 2..=6usize {
        for _ in 0..40 {
            let own: f64 = -rng.gen_range(0.5..3.0);
            let cross = -rng.gen_range(0.01..0.9) * own.abs() / n as f64;
            // dense inverse, column by column
            let jac: Vec<Vec<f64>> = (0..n)
                .map(|i| (0..n).map(|j| if i == j { own } else { cross }).collect())
                .collect();
            let mut e0 = vec![0.0; n];
            e0[0] = 1.0;
            let col = common::gauss_solve(jac, e0);
            let (q_own, q_cross) = reactions::invert_symmetric_slopes(own, cross, n).unwrap();
            assert!((q_own - col[0]).abs() < 1e-10, "n={n}: {q_own} vs {}", col[0]);
            assert!((q_cross - col[1]).abs() < 1e-10);
        }
    }

    let mut checked = 0;
    while checked < 100 {
        let n = rng.gen_range(2..=4usize);
        let a = rng.gen_range(1.5..3.0);
        let s = rng.gen_range(0.1..0.8);
        let demand = if rng.gen_bool(0.5) {
            DemandFamily::LinearSubstitutes { a, s }
        } else {
            DemandFamily::PowerInverse { a, s, eta: rng.gen_range(1.3..2.2) }
        };
        let cost = if rng.gen_bool(0.5) {
            CostFamily::Linear
        } else {
            CostFamily::Power { c: rng.gen_range(1.1..1.8) }
        };
        let spec = ModelSpec::new(
            MarketParams::new(n, 0.1, 0.2).unwrap(),
            demand,
            cost,
            RnDTech::new(1.0, 0.0, 1.0, 2.0).unwrap(),
        )
        .unwrap();
        let m = rng.gen_range(0.3..0.7) * a;

        let bertrand = match bertrand_static(&spec, m) {
            Ok(eq) => eq,
            Err(_) => continue,
        };
        if let DemandFamily::PowerInverse { eta, .. } = demand {
            if eta * bertrand.point.q.powf(eta - 1.0) <= 1.5 * (n - 1) as f64 * s {
                continue;
            }
        }
        let (r_b, cournot) = match (price_reaction(&spec, &bertrand.point), cournot_static(&spec, m))
        {
            (Ok(r), Ok(eq)) => (r, eq),
            _ => continue,
        };
        let r_c = match quantity_reaction(&spec, &cournot.point) {
            Ok(r) => r,
            Err(_) => continue,
        };
        let tol = 1e-4;
        let (fd_own, fd_cross) = common::fd_reaction(&spec, m, true);
        assert!((r_b.own_reaction - fd_own).abs() <= tol * r_b.own_reaction.abs().max(1.0));
        assert!((r_b.cross_reaction - fd_cross).abs() <= tol * r_b.cross_reaction.abs().max(1.0));
        let (fd_own, fd_cross) = common::fd_reaction(&spec, m, false);
        assert!((r_c.own_reaction - fd_own).abs() <= tol * r_c.own_reaction.abs().max(1.0));
        assert!((r_c.cross_reaction - fd_cross).abs() <= tol * r_c.cross_reaction.abs().max(1.0));
        checked += 1;
    }
    println!("criterion 4: pass - slope inversion 1e-10, reactions vs FD 1e-4 (100 cells)");
}

/// Criterion 5: loop ordering under zero spillover with linear families.
/// Closed-loop investment falls short of open-loop under price competition
/// and exceeds it under quantity competition in every grid cell, and the
/// reference cell reproduces the hand-checked values to 1e-4.
#[test]
fn criterion_5_loop_ordering() {
    for &s in &[0.1, 0.3, 0.5, 0.7, 0.9] {
        for n in 2..=5usize {
            // Cost levels low enough that the closed-loop stationarity
            // bracket stays positive across the whole grid.
            for &m in &[0.15, 0.25] {
                let spec = linear_spec(n, 2.0, s, 1.0, 0.1, 0.2);
                let b = compare_loops(&spec, Regime::Bertrand, m).unwrap();
                assert_eq!(b.class_bertrand, Some(StrategicClass::Complements));
                assert_eq!(b.prop3_bertrand, Some(Verdict::Holds), "s={s} n={n} m={m}");
                assert!(b.k_closed_bertrand.unwrap() < b.k_open_bertrand.unwrap());

                let c = compare_loops(&spec, Regime::Cournot, m).unwrap();
                assert_eq!(c.class_cournot, Some(StrategicClass::Substitutes));
                assert_eq!(c.prop3_cournot, Some(Verdict::Holds), "s={s} n={n} m={m}");
                assert!(c.k_closed_cournot.unwrap() > c.k_open_cournot.unwrap());
            }
        }
    }
    let spec = reference_spec();
    let b = compare_loops(&spec, Regime::Bertrand, 1.0).unwrap();
    assert!((b.k_open_bertrand.unwrap() - 2.2222).abs() < 1e-4);
    assert!((b.k_closed_bertrand.unwrap() - 1.6296).abs() < 1e-4);
    let c = compare_loops(&spec, Regime::Cournot, 1.0).unwrap();
    assert!((c.k_open_cournot.unwrap() - 2.0).abs() < 1e-4);
    assert!((c.k_closed_cournot.unwrap() - 2.1333).abs() < 1e-4);
    println!("criterion 5: pass - loop ordering (80 cells) and reference values at 1e-4");
}

/// Criterion 6: the memoryless closed-loop and feedback assemblies of the
/// stationarity residual coincide to 1e-12 at 1000 random points per regime,
/// and the steady-state command prints byte-identical reports for the two
/// modes.
#[test]
fn criterion_6_closed_loop_feedback_equivalence() {
    let spec = reference_spec();
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    for regime in [Regime::Bertrand, Regime::Cournot] {
        let mut checked = 0;
        while checked < 1000 {
            let m = rng.gen_range(0.05..1.9);
            let k = rng.gen_range(0.05..3.0);
            let (closed, hjb) = match feedback_residual(&spec, regime, m, k) {
                Ok(pair) => pair,
                Err(_) => continue,
            };
            assert!(
                (closed - hjb).abs() <= 1e-12 * closed.abs().max(1.0),
                "{regime:?} m={m} k={k}"
            );
            checked += 1;
        }
    }

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scenario.toml");
    std::fs::write(
        &path,
        "[model]\nn = 2\nrho = 0.1\ndelta = 0.2\n\
         [model.demand]\nfamily = \"linear\"\na = 2.0\ns = 0.5\n\
         [model.cost]\nfamily = \"linear\"\n\
         [model.tech]\nalpha = 1.0\nbeta = 0.0\nb = 1.0\ng = 2.0\n\
         [steady]\nregime = \"bertrand\"\nmode = \"closed\"\n",
    )
    .unwrap();
    let run = |mode: &str| {
        std::process::Command::new(env!("CARGO_BIN_EXE_oligo-rd"))
            .args(["steady", path.to_str().unwrap(), "--mode", mode])
            .output()
            .unwrap()
    };
    let closed = run("closed");
    let feedback = run("feedback");
    assert_eq!(closed.status.code(), Some(0));
    assert!(!closed.stdout.is_empty());
    assert_eq!(closed.stdout, feedback.stdout, "steady output differs between modes");
    println!("criterion 6: pass - residual pairs equal at 1e-12; mode output byte-identical");
}

/// Criterion 7: the integrator reproduces the exact exponential cost path to
/// 1e-8 relative at step 1e-2 and shows fourth-order convergence under step
/// halving.
#[test]
fn criterion_7_integrator_accuracy() {
    let spec = reference_spec();
    // constant k: dm/dt = m (delta - k), exactly exponential
    let k = 1.8;
    let rate = spec.params.delta - k;
    let horizon = 5.0;
    let exact = (rate * horizon).exp();
    let policy = dynamics::Policy::Constant { k };
    let err_at = |step: f64| {
        let traj = dynamics::integrate(&spec, &policy, &[1.0, 1.0], horizon, step).unwrap();
        (traj.m.last().unwrap()[0] - exact).abs() / exact
    };
    let coarse = err_at(1e-2);
    let fine = err_at(5e-3);
    assert!(coarse <= 1e-8, "relative error {coarse} at step 1e-2");
    let ratio = coarse / fine;
    assert!((8.0..=32.0).contains(&ratio), "convergence ratio {ratio}");
    println!("criterion 7: pass - 1e-8 accuracy at step 1e-2, halving ratio {ratio:.2}");
}

/// Criterion 8: the two joint steady-state cost levels per regime in the
/// linear reference scenario match the quadratic-formula oracle to 1e-9.
#[test]
fn criterion_8_joint_steady_state_roots() {
    let spec = reference_spec();
    let (a, s) = (2.0, 0.5);
    let (b, rho) = (1.0, 0.1);
    let k_star = solve_k_star(&spec.params, &spec.tech).unwrap();
    // k(m) = q(m) m / (2 b rho) = k* with q linear in m gives a quadratic
    // m^2 - a m + c = 0; c collects the demand-side constants per regime.
    let oracle = |c: f64| {
        let root = (a * a - 4.0 * c).sqrt();
        ((a - root) / 2.0, (a + root) / 2.0)
    };
    let c_bertrand = k_star * 2.0 * b * rho * (2.0 - s) * (1.0 + s);
    let c_cournot = k_star * 2.0 * b * rho * (2.0 + s);

    for (regime, c) in [(Regime::Bertrand, c_bertrand), (Regime::Cournot, c_cournot)] {
        let (lo, hi) = oracle(c);
        let roots = joint_steady_state(&spec, regime, Mode::OpenLoop).unwrap();
        assert_eq!(roots.len(), 2, "{regime:?}");
        assert!((roots[0].m_star - lo).abs() < 1e-9, "{regime:?}: {} vs {lo}", roots[0].m_star);
        assert!((roots[1].m_star - hi).abs() < 1e-9, "{regime:?}: {} vs {hi}", roots[1].m_star);
    }
    println!("criterion 8: pass - joint roots match the quadratic oracle at 1e-9");
}
