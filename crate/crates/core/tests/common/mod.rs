//! Shared helpers: an asymmetric equilibrium re-solver built only on the
//! demand maps and finite differences, used as an independent oracle for the
//! analytic reaction derivatives.

use oligo_rd_core::ModelSpec;

/// Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
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
    x
}

fn newton<F: Fn(&[f64]) -> Vec<f64>>(f: F, mut x: Vec<f64>) -> Vec<f64> {
    let n = x.len();
    let h = 1e-7;
    let norm_of = |r: &[f64]| r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut r = f(&x);
    for _ in 0..120 {
        let norm = norm_of(&r);
        if norm < 1e-10 {
            return x;
        }
        let mut jac = vec![vec![0.0; n]; n];
        for j in 0..n {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += h;
            xm[j] -= h;
            let rp = f(&xp);
            let rm = f(&xm);
            for i in 0..n {
                jac[i][j] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        let step = gauss_solve(jac, r.clone());
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = x.iter().zip(&step).map(|(&xi, &di)| xi - t * di).collect();
            let rt = f(&trial);
            if norm_of(&rt) < norm {
                x = trial;
                r = rt;
                break;
            }
            t *= 0.5;
            if t < 1e-10 {
                // inner finite-difference noise floors the residual around
                // 1e-11; accept the point if it is already that small
                assert!(norm < 1e-9, "oracle Newton stalled at norm {norm}");
                return x;
            }
        }
    }
    panic!("oracle Newton did not converge");
}

/// Inverse-demand Jacobian entries straight from the defining formula
/// `p_i = a - q_i^eta - s * sum_{j != i} q_j`.
fn inverse_jacobian(spec: &ModelSpec, q: &[f64]) -> Vec<Vec<f64>> {
    let n = q.len();
    let eta = spec.demand.eta();
    let s = spec.demand.s();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { -eta * q[i].max(1e-14).powf(eta - 1.0) } else { -s })
                .collect()
        })
        .collect()
}

/// `d q_i / d p_i` at a possibly asymmetric quantity vector, by inverting the
/// analytic inverse-demand Jacobian column by column with the local solver.
/// Independent of the closed-form symmetric slope inversion under test.
fn own_direct_slope(spec: &ModelSpec, q: &[f64], i: usize) -> f64 {
    let n = q.len();
    let jac = inverse_jacobian(spec, q);
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    gauss_solve(jac, e)[i]
}

/// Asymmetric Bertrand equilibrium prices at per-firm cost levels `m`.
pub fn asymmetric_bertrand(spec: &ModelSpec, m: &[f64]) -> Vec<f64> {
    let n = m.len();
    let foc = |p: &[f64]| -> Vec<f64> {
        let q = spec.direct_demand(p).unwrap();
        (0..n)
            .map(|i| {
                let slope = own_direct_slope(spec, &q, i);
                let c_q = spec.cost_partials(m[i], q[i].max(1e-12)).unwrap().dq;
                q[i] + (p[i] - c_q) * slope
            })
            .collect()
    };
    let mean = m.iter().sum::<f64>() / n as f64;
    let start = oligo_rd_core::bertrand_static(spec, mean).unwrap().point.p;
    newton(foc, vec![start; n])
}

/// Asymmetric Cournot equilibrium quantities at per-firm cost levels `m`.
pub fn asymmetric_cournot(spec: &ModelSpec, m: &[f64]) -> Vec<f64> {
    let n = m.len();
    let eta = spec.demand.eta();
    let foc = |q: &[f64]| -> Vec<f64> {
        let p = spec.inverse_demand(q).unwrap();
        (0..n)
            .map(|i| {
                let slope = -eta * q[i].max(1e-14).powf(eta - 1.0);
                let c_q = spec.cost_partials(m[i], q[i].max(1e-12)).unwrap().dq;
                p[i] + slope * q[i] - c_q
            })
            .collect()
    };
    let mean = m.iter().sum::<f64>() / n as f64;
    let start = oligo_rd_core::cournot_static(spec, mean).unwrap().point.q;
    newton(foc, vec![start; n])
}

/// Finite-difference reaction derivatives `(d x_1/d m_1, d x_2/d m_1)` from
/// re-solving the asymmetric equilibrium at perturbed cost levels.
pub fn fd_reaction(
    spec: &ModelSpec,
    m: f64,
    bertrand: bool,
) -> (f64, f64) {
    let n = spec.params.n;
    let h = 1e-5 * m.max(1.0);
    let solve = |m1: f64| -> Vec<f64> {
        let mut levels = vec![m; n];
        levels[0] = m1;
        if bertrand {
            asymmetric_bertrand(spec, &levels)
        } else {
            asymmetric_cournot(spec, &levels)
        }
    };
    let up = solve(m + h);
    let down = solve(m - h);
    (
        (up[0] - down[0]) / (2.0 * h),
        (up[1] - down[1]) / (2.0 * h),
    )
}
