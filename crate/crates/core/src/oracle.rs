//! Reference machinery kept independent of the Newton screening code path.
//!
//! * [`fista_solve`]: accelerated proximal gradient with adaptive restart,
//!   stopped on the fixed-point KKT residual.
//! * [`generalized_newton_step`]: one semismooth Newton step on the KKT map
//!   `F(beta, d) = (beta - soft(beta + d), n d - X^T (y - X beta))`, solved as
//!   a dense `2p x 2p` system. Test scale only.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_lambda, check_len, Error, Result};
use crate::prox::{kkt_residual, shrink};
use crate::types::{norm_inf, xty_over_n, DesignMatrix, PrimalDualState};

/// Largest `p` accepted by the dense Newton oracle.
pub const NEWTON_ORACLE_MAX_P: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct FistaOutcome {
    pub beta: Vec<f64>,
    pub iterations: usize,
    /// Fixed-point KKT residual of `beta`.
    pub kkt_residual: f64,
    pub converged: bool,
}

/// Largest eigenvalue of `X^T X / n` by power iteration.
pub fn lipschitz_constant(x: &DesignMatrix, rel_tol: f64) -> f64 {
    let p = x.p();
    let mut v: Vec<f64> = (0..p).map(|j| 1.0 + 0.01 * (j % 7) as f64).collect();
    let mut estimate = 0.0;
    for _ in 0..10_000 {
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        v.iter_mut().for_each(|a| *a /= norm);
        let xv = x.apply(&v).expect("p-length vector");
        let next = xty_over_n(x, &xv).expect("n-length vector");
        let rayleigh: f64 = next.iter().zip(&v).map(|(a, b)| a * b).sum();
        let done = (rayleigh - estimate).abs() <= rel_tol * rayleigh;
        estimate = rayleigh;
        v = next;
        if done {
            break;
        }
    }
    estimate
}

pub fn fista_solve(
    x: &DesignMatrix,
    y: &[f64],
    lambda: f64,
    tol: f64,
    max_iter: usize,
) -> Result<FistaOutcome> {
    fista_solve_from(x, y, lambda, tol, max_iter, &vec![0.0; x.p()])
}

/// FISTA started from `init`.
pub fn fista_solve_from(
    x: &DesignMatrix,
    y: &[f64],
    lambda: f64,
    tol: f64,
    max_iter: usize,
    init: &[f64],
) -> Result<FistaOutcome> {
    check_lambda(lambda)?;
    check_len("y", x.n(), y.len())?;
    check_len("init", x.p(), init.len())?;
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig("tolerance must be positive".into()));
    }
    // slight inflation keeps 1/L a valid step despite the power-iteration error
    let lip = lipschitz_constant(x, 1e-6) * (1.0 + 1e-6);
    let step = 1.0 / lip;
    let xty = xty_over_n(x, y)?;

    let gradient = |b: &[f64]| -> Vec<f64> {
        // X^T (X b - y) / n = X^T X b / n - X^T y / n
        let xb = x.apply(b).expect("p-length vector");
        let xtxb = xty_over_n(x, &xb).expect("n-length vector");
        xtxb.iter().zip(&xty).map(|(a, c)| a - c).collect()
    };

    let mut beta = init.to_vec();
    let mut momentum = beta.clone();
    let mut theta = 1.0f64;
    let mut kkt = kkt_residual(x, y, &beta, lambda)?.residual_inf;
    if kkt <= tol {
        return Ok(FistaOutcome {
            beta,
            iterations: 0,
            kkt_residual: kkt,
            converged: true,
        });
    }
    for it in 1..=max_iter {
        let grad = gradient(&momentum);
        let next: Vec<f64> = momentum
            .iter()
            .zip(&grad)
            .map(|(m, g)| shrink(m - step * g, lambda * step))
            .collect();
        let theta_next = 0.5 * (1.0 + (1.0 + 4.0 * theta * theta).sqrt());
        let coef = (theta - 1.0) / theta_next;

        // gradient-mapping restart test
        let restart: f64 = momentum
            .iter()
            .zip(&next)
            .zip(&beta)
            .map(|((m, nx), b)| (m - nx) * (nx - b))
            .sum();
        if restart > 0.0 {
            theta = 1.0;
            momentum = next.clone();
        } else {
            theta = theta_next;
            momentum = next
                .iter()
                .zip(&beta)
                .map(|(nx, b)| nx + coef * (nx - b))
                .collect();
        }
        beta = next;

        if it % 5 == 0 || it == max_iter {
            kkt = kkt_residual(x, y, &beta, lambda)?.residual_inf;
            if kkt <= tol {
                return Ok(FistaOutcome {
                    beta,
                    iterations: it,
                    kkt_residual: kkt,
                    converged: true,
                });
            }
        }
    }
    Ok(FistaOutcome {
        beta,
        iterations: max_iter,
        kkt_residual: kkt,
        converged: false,
    })
}

/// Diagonal of the chosen Newton derivative of soft-thresholding:
/// `1` where `|v_i| > lambda`, else `0`.
pub fn newton_derivative_gamma(v: &[f64], lambda: f64) -> Vec<f64> {
    v.iter()
        .map(|x| if x.abs() > lambda { 1.0 } else { 0.0 })
        .collect()
}

/// `(F_1; F_2)` in natural order, with `F_1 = beta - soft(beta + d, lambda)`
/// and `F_2 = n d - X^T (y - X beta)`.
pub fn evaluate_f(state: &PrimalDualState, x: &DesignMatrix, y: &[f64]) -> Result<Vec<f64>> {
    check_len("y", x.n(), y.len())?;
    check_len("beta", x.p(), state.beta.len())?;
    check_len("d", x.p(), state.d.len())?;
    let n = x.n() as f64;
    let fitted = x.apply(&state.beta)?;
    let r: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    let xtr = xty_over_n(x, &r)?;
    let mut out = Vec::with_capacity(2 * x.p());
    out.extend(
        state
            .beta
            .iter()
            .zip(&state.d)
            .map(|(b, d)| b - shrink(b + d, state.lambda)),
    );
    out.extend(state.d.iter().zip(&xtr).map(|(d, g)| n * d - n * g));
    Ok(out)
}

/// Newton system in the block order `(d_A, beta_I, beta_A, d_I)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonSystem {
    pub h: DMatrix<f64>,
    pub rhs: DVector<f64>,
    /// `permutation[k]` is the natural coordinate (`beta_i -> i`,
    /// `d_i -> p + i`) placed at block position `k`.
    pub permutation: Vec<usize>,
    /// Sizes of the active and inactive blocks.
    pub active: usize,
    pub inactive: usize,
}

/// Assembles `H_k D = -F(z_k)` from the chain rule in natural order, then
/// permutes to the block layout.
pub fn assemble_newton_system(state: &PrimalDualState, x: &DesignMatrix, y: &[f64]) -> Result<NewtonSystem> {
    let p = x.p();
    let n = x.n() as f64;
    let f = evaluate_f(state, x, y)?;
    let sum: Vec<f64> = state.beta.iter().zip(&state.d).map(|(b, d)| b + d).collect();
    let jac = newton_derivative_gamma(&sum, state.lambda);

    // natural order: rows/cols [beta; d]
    let gram = x.values().transpose() * x.values();
    let mut h = DMatrix::zeros(2 * p, 2 * p);
    for i in 0..p {
        h[(i, i)] = 1.0 - jac[i];
        h[(i, p + i)] = -jac[i];
        h[(p + i, p + i)] = n;
    }
    h.view_mut((p, 0), (p, p)).copy_from(&gram);

    let active: Vec<usize> = (0..p).filter(|&i| jac[i] == 1.0).collect();
    let inactive: Vec<usize> = (0..p).filter(|&i| jac[i] == 0.0).collect();
    let mut permutation = Vec::with_capacity(2 * p);
    permutation.extend(active.iter().map(|&i| p + i));
    permutation.extend(inactive.iter().copied());
    permutation.extend(active.iter().copied());
    permutation.extend(inactive.iter().map(|&i| p + i));

    // row order follows F: (F1_A, F1_I, F2_A, F2_I)
    let mut row_order = Vec::with_capacity(2 * p);
    row_order.extend(active.iter().copied());
    row_order.extend(inactive.iter().copied());
    row_order.extend(active.iter().map(|&i| p + i));
    row_order.extend(inactive.iter().map(|&i| p + i));

    let h = DMatrix::from_fn(2 * p, 2 * p, |r, c| h[(row_order[r], permutation[c])]);
    let rhs = DVector::from_fn(2 * p, |r, _| -f[row_order[r]]);
    Ok(NewtonSystem {
        h,
        rhs,
        permutation,
        active: active.len(),
        inactive: inactive.len(),
    })
}

/// One generalized Newton step `z + D` with `H_k D = -F(z)`.
pub fn generalized_newton_step(
    state: &PrimalDualState,
    x: &DesignMatrix,
    y: &[f64],
) -> Result<PrimalDualState> {
    let p = x.p();
    if p > NEWTON_ORACLE_MAX_P {
        return Err(Error::InvalidDimensions(format!(
            "dense Newton oracle limited to p <= {NEWTON_ORACLE_MAX_P}, got {p}"
        )));
    }
    let system = assemble_newton_system(state, x, y)?;
    let lu = system.h.clone().lu();
    if !lu.is_invertible() {
        return Err(Error::SingularNewtonSystem);
    }
    let step = lu.solve(&system.rhs).ok_or(Error::SingularNewtonSystem)?;
    if step.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularNewtonSystem);
    }
    let mut beta = state.beta.clone();
    let mut d = state.d.clone();
    for (k, &coord) in system.permutation.iter().enumerate() {
        if coord < p {
            beta[coord] += step[k];
        } else {
            d[coord - p] += step[k];
        }
    }
    Ok(PrimalDualState {
        beta,
        d,
        lambda: state.lambda,
        lambda_bar: state.lambda_bar,
    })
}

/// Convenience: `||F(z)||_inf`.
pub fn f_norm_inf(state: &PrimalDualState, x: &DesignMatrix, y: &[f64]) -> Result<f64> {
    Ok(norm_inf(&evaluate_f(state, x, y)?))
}
