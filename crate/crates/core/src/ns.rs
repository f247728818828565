//! Newton screening for a single regularization level.
//!
//! Each iteration picks the working set `A = {j : |beta_j + d_j| > lambda}`,
//! pins the dual on `A` to `(lambda - lambda_bar) * sign(beta_A + d_A)`,
//! solves the restricted least-squares system for `beta_A`, zeroes
//! `beta` off `A`, and refreshes the dual off `A` from the new residual.
//! The loop stops as soon as the working set reproduces itself.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{check_lambda, check_len, Error, Result};
use crate::prox::{kkt_from_dual, KktReport};
use crate::types::{
    axpy, dot, norm2, restricted_gram_apply, xty_over_n, DesignMatrix, PrimalDualState, WorkingSet,
};

/// Smallest acceptable squared Cholesky pivot, relative to the unit
/// diagonal of a normalized Gram matrix.
const MIN_PIVOT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LsMethod {
    Direct,
    ConjugateGradient,
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NsConfig {
    pub max_iter: usize,
    pub lambda: f64,
    pub lambda_bar: f64,
    pub ls_method: LsMethod,
    pub cg_tol: f64,
    /// `None` picks `max(10 |A|, ceil(p / (2 n |A|)))`.
    pub cg_max_iter: Option<usize>,
    /// Largest working set solved by dense factorization under `Auto`.
    pub direct_threshold: usize,
    /// Optional `eps * I` added to the restricted Gram matrix.
    pub ridge_epsilon: f64,
}

impl NsConfig {
    pub fn new(lambda: f64) -> Self {
        NsConfig {
            max_iter: 50,
            lambda,
            lambda_bar: 0.0,
            ls_method: LsMethod::Auto,
            cg_tol: 1e-10,
            cg_max_iter: None,
            direct_threshold: 512,
            ridge_epsilon: 0.0,
        }
    }

    pub fn with_lambda_bar(mut self, lambda_bar: f64) -> Self {
        self.lambda_bar = lambda_bar;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_lambda(self.lambda)?;
        if !(0.0..self.lambda).contains(&self.lambda_bar) {
            return Err(Error::InvalidConfig(format!(
                "lambda_bar must lie in [0, lambda), got {} with lambda {}",
                self.lambda_bar, self.lambda
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        if !(self.cg_tol > 0.0) {
            return Err(Error::InvalidConfig("cg_tol must be positive".into()));
        }
        if self.cg_max_iter == Some(0) {
            return Err(Error::InvalidConfig("cg_max_iter must be at least 1".into()));
        }
        if self.direct_threshold == 0 {
            return Err(Error::InvalidConfig("direct_threshold must be at least 1".into()));
        }
        if !(self.ridge_epsilon >= 0.0) {
            return Err(Error::InvalidConfig("ridge_epsilon must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    WorkingSetFixedPoint,
    IterationCap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NsResult {
    pub state: PrimalDualState,
    /// Working set used for the final update; contains the support of `state.beta`.
    pub working_set: WorkingSet,
    pub iterations: usize,
    pub converged_by: StopReason,
    /// Evaluated at `lambda` against the true dual `X^T (y - X beta) / n`.
    pub kkt: KktReport,
    /// Number of restricted solves where CG hit its iteration cap.
    pub cg_stalls: usize,
}

/// Outcome of a restricted least-squares solve.
#[derive(Debug, Clone, PartialEq)]
pub struct LsSolution {
    pub values: Vec<f64>,
    /// `Direct` or `ConjugateGradient`; never `Auto`.
    pub method: LsMethod,
    pub cg_iterations: usize,
    /// CG exceeded its iteration cap before meeting `cg_tol`.
    pub stalled: bool,
}

/// `{j : |beta_j + d_j| > lambda}`; ties are excluded.
pub fn working_set(beta: &[f64], d: &[f64], lambda: f64) -> Result<WorkingSet> {
    check_len("d", beta.len(), d.len())?;
    check_lambda(lambda)?;
    Ok(WorkingSet::from_predicate(beta.len(), |j| {
        (beta[j] + d[j]).abs() > lambda
    }))
}

/// Solves `(X_A^T X_A / n + eps I) u = rhs`.
///
/// Under `Auto`, working sets up to `direct_threshold` use a Cholesky
/// factorization of the explicit Gram submatrix and larger ones use
/// conjugate gradients started from `warm`. Without a ridge, a working set
/// larger than `n` has a Gram matrix of rank at most `n` and is rejected as
/// singular before any work is done.
pub fn restricted_ls_solve(
    x: &DesignMatrix,
    set: &WorkingSet,
    rhs: &[f64],
    cfg: &NsConfig,
    warm: Option<&[f64]>,
) -> Result<LsSolution> {
    check_len("rhs", set.len(), rhs.len())?;
    if let Some(w) = warm {
        check_len("warm start", set.len(), w.len())?;
    }
    if set.is_empty() {
        return Ok(LsSolution {
            values: Vec::new(),
            method: LsMethod::Direct,
            cg_iterations: 0,
            stalled: false,
        });
    }
    if set.len() > x.n() && !(cfg.ridge_epsilon > 0.0) {
        return Err(Error::SingularSystem { size: set.len() });
    }
    let method = match cfg.ls_method {
        LsMethod::Auto if set.len() <= cfg.direct_threshold => LsMethod::Direct,
        LsMethod::Auto => LsMethod::ConjugateGradient,
        m => m,
    };
    match method {
        LsMethod::Direct => direct_solve(x, set, rhs, cfg.ridge_epsilon),
        _ => {
            let cap = cfg.cg_max_iter.unwrap_or_else(|| {
                let k = set.len();
                let budget = (x.p() as f64 / (2.0 * x.n() as f64 * k as f64)).ceil() as usize;
                (10 * k).max(budget)
            });
            Ok(conjugate_gradient(x, set, rhs, cfg, warm, cap))
        }
    }
}

fn direct_solve(x: &DesignMatrix, set: &WorkingSet, rhs: &[f64], eps: f64) -> Result<LsSolution> {
    let mut gram = x.gram_submatrix(set);
    if eps > 0.0 {
        for i in 0..set.len() {
            gram[(i, i)] += eps;
        }
    }
    let singular = Error::SingularSystem { size: set.len() };
    let chol = Cholesky::new(gram).ok_or_else(|| singular.clone())?;
    let l: &DMatrix<f64> = chol.l_dirty();
    if (0..set.len()).any(|i| l[(i, i)] * l[(i, i)] < MIN_PIVOT) {
        return Err(singular);
    }
    let u = chol.solve(&DVector::from_column_slice(rhs));
    if u.iter().any(|v| !v.is_finite()) {
        return Err(singular);
    }
    Ok(LsSolution {
        values: u.as_slice().to_vec(),
        method: LsMethod::Direct,
        cg_iterations: 0,
        stalled: false,
    })
}

fn conjugate_gradient(
    x: &DesignMatrix,
    set: &WorkingSet,
    rhs: &[f64],
    cfg: &NsConfig,
    warm: Option<&[f64]>,
    cap: usize,
) -> LsSolution {
    let eps = cfg.ridge_epsilon;
    let apply = |v: &[f64]| -> Vec<f64> {
        let mut out = restricted_gram_apply(x, set, v).expect("dimensions checked");
        if eps > 0.0 {
            axpy(eps, v, &mut out);
        }
        out
    };
    let target = cfg.cg_tol * norm2(rhs).max(1.0);

    let mut u = warm.map_or_else(|| vec![0.0; rhs.len()], <[f64]>::to_vec);
    let mut r: Vec<f64> = if u.iter().all(|v| *v == 0.0) {
        rhs.to_vec()
    } else {
        let gu = apply(&u);
        rhs.iter().zip(&gu).map(|(b, g)| b - g).collect()
    };
    let mut rr = dot(&r, &r);
    let mut dir = r.clone();
    let mut it = 0;
    while rr.sqrt() > target {
        if it == cap {
            return LsSolution {
                values: u,
                method: LsMethod::ConjugateGradient,
                cg_iterations: it,
                stalled: true,
            };
        }
        let q = apply(&dir);
        let curv = dot(&dir, &q);
        if !(curv > 0.0) {
            break;
        }
        let step = rr / curv;
        axpy(step, &dir, &mut u);
        axpy(-step, &q, &mut r);
        let rr_next = dot(&r, &r);
        let beta = rr_next / rr;
        for (di, ri) in dir.iter_mut().zip(&r) {
            *di = ri + beta * *di;
        }
        rr = rr_next;
        it += 1;
    }
    LsSolution {
        values: u,
        method: LsMethod::ConjugateGradient,
        cg_iterations: it,
        stalled: rr.sqrt() > target,
    }
}

/// Result of one update, with the full dual `X^T (y - X beta) / n`
/// retained for the KKT report.
struct Step {
    state: PrimalDualState,
    set: WorkingSet,
    true_dual: Vec<f64>,
    stalled: bool,
}

fn step(state: &PrimalDualState, x: &DesignMatrix, y: &[f64], xty: &[f64], cfg: &NsConfig) -> Result<Step> {
    let (lambda, lambda_bar) = (cfg.lambda, cfg.lambda_bar);
    let set = working_set(&state.beta, &state.d, lambda)?;
    let p = x.p();

    if set.is_empty() {
        return Ok(Step {
            state: PrimalDualState {
                beta: vec![0.0; p],
                d: xty.to_vec(),
                lambda,
                lambda_bar,
            },
            set,
            true_dual: xty.to_vec(),
            stalled: false,
        });
    }

    let shift = lambda - lambda_bar;
    let d_active: Vec<f64> = set
        .indices()
        .iter()
        .map(|&i| shift * sign(state.beta[i] + state.d[i]))
        .collect();
    let rhs: Vec<f64> = set
        .indices()
        .iter()
        .zip(&d_active)
        .map(|(&i, di)| xty[i] - di)
        .collect();
    let warm = set.gather(&state.beta);
    let sol = restricted_ls_solve(x, &set, &rhs, cfg, Some(&warm))?;

    let fitted = x.apply_restricted(&set, &sol.values)?;
    let r: Vec<f64> = y.iter().zip(&fitted).map(|(yi, fi)| yi - fi).collect();
    let true_dual = xty_over_n(x, &r)?;

    let mut beta = vec![0.0; p];
    let mut d = true_dual.clone();
    for ((&i, &b), &di) in set.indices().iter().zip(&sol.values).zip(&d_active) {
        beta[i] = b;
        d[i] = di;
    }
    Ok(Step {
        state: PrimalDualState {
            beta,
            d,
            lambda,
            lambda_bar,
        },
        set,
        true_dual,
        stalled: sol.stalled,
    })
}

#[inline]
fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn check_problem(x: &DesignMatrix, y: &[f64], state: &PrimalDualState) -> Result<()> {
    check_len("y", x.n(), y.len())?;
    check_len("beta", x.p(), state.beta.len())?;
    check_len("d", x.p(), state.d.len())
}

/// One Newton screening update at `cfg.lambda`, `cfg.lambda_bar`.
///
/// Returns the new state and the working set the update was computed on.
pub fn ns_iterate(
    state: &PrimalDualState,
    x: &DesignMatrix,
    y: &[f64],
    cfg: &NsConfig,
) -> Result<(PrimalDualState, WorkingSet)> {
    cfg.validate()?;
    check_problem(x, y, state)?;
    let xty = xty_over_n(x, y)?;
    let s = step(state, x, y, &xty, cfg)?;
    Ok((s.state, s.set))
}

/// Runs Newton screening until the working set repeats or `max_iter`
/// updates have been made.
pub fn ns_solve(x: &DesignMatrix, y: &[f64], cfg: &NsConfig, init: &PrimalDualState) -> Result<NsResult> {
    let xty = xty_over_n(x, y)?;
    ns_solve_with_xty(x, y, &xty, cfg, init)
}

/// [`ns_solve`] with `X^T y / n` supplied by the caller.
pub(crate) fn ns_solve_with_xty(
    x: &DesignMatrix,
    y: &[f64],
    xty: &[f64],
    cfg: &NsConfig,
    init: &PrimalDualState,
) -> Result<NsResult> {
    cfg.validate()?;
    check_problem(x, y, init)?;
    check_len("X^T y", x.p(), xty.len())?;

    let mut current = step(init, x, y, xty, cfg)?;
    let mut iterations = 1;
    let mut cg_stalls = usize::from(current.stalled);
    let converged_by = loop {
        let next_set = working_set(&current.state.beta, &current.state.d, cfg.lambda)?;
        if next_set == current.set {
            break StopReason::WorkingSetFixedPoint;
        }
        if iterations >= cfg.max_iter {
            break StopReason::IterationCap;
        }
        current = step(&current.state, x, y, xty, cfg)?;
        iterations += 1;
        cg_stalls += usize::from(current.stalled);
    };

    let kkt = kkt_from_dual(x, y, &current.state.beta, &current.true_dual, cfg.lambda)?;
    Ok(NsResult {
        state: current.state,
        working_set: current.set,
        iterations,
        converged_by,
        kkt,
        cg_stalls,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prox::soft_threshold;
    use crate::types::normalize_columns;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn gaussian_design(n: usize, p: usize, rng: &mut ChaCha8Rng) -> DesignMatrix {
        normalize_columns(DMatrix::from_fn(n, p, |_, _| rng.sample(StandardNormal))).unwrap()
    }

    fn orthogonal(n: usize) -> DesignMatrix {
        normalize_columns(DMatrix::identity(n, n)).unwrap()
    }

    #[test]
    fn working_set_examples() {
        let l = 0.7;
        let set = working_set(&[0.0; 3], &[2.0 * l, l / 2.0, -3.0 * l], l).unwrap();
        assert_eq!(set.indices(), &[0, 2]);

        let set = working_set(&[0.25, -0.5, 0.0], &[0.45, 1.2, 0.7], l).unwrap();
        assert!(set.is_empty());

        assert!(working_set(&[0.0; 2], &[0.0; 3], l).is_err());
        assert!(working_set(&[0.0; 2], &[0.0; 2], 0.0).is_err());
    }

    #[test]
    fn ls_solve_identity_system() {
        let x = orthogonal(5);
        let set = WorkingSet::new(vec![0, 2, 4], 5).unwrap();
        let rhs = [1.5, -0.25, 3.0];
        for method in [LsMethod::Direct, LsMethod::ConjugateGradient, LsMethod::Auto] {
            let cfg = NsConfig {
                ls_method: method,
                ..NsConfig::new(1.0)
            };
            let sol = restricted_ls_solve(&x, &set, &rhs, &cfg, None).unwrap();
            for (a, b) in sol.values.iter().zip(&rhs) {
                assert!((a - b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn ls_solve_single_column() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let x = gaussian_design(12, 6, &mut rng);
        let set = WorkingSet::new(vec![4], 6).unwrap();
        let sol = restricted_ls_solve(&x, &set, &[-2.5], &NsConfig::new(1.0), None).unwrap();
        assert!((sol.values[0] + 2.5).abs() < 1e-14);
    }

    #[test]
    fn ls_solve_matches_dense_lu() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..10 {
            let x = gaussian_design(60, 30, &mut rng);
            let mut idx: Vec<usize> = (0..30).collect();
            rand::seq::SliceRandom::shuffle(idx.as_mut_slice(), &mut rng);
            idx.truncate(15);
            idx.sort_unstable();
            let set = WorkingSet::new(idx.clone(), 30).unwrap();
            let rhs: Vec<f64> = (0..15).map(|_| rng.sample(StandardNormal)).collect();

            let xa = x.values().select_columns(&idx);
            let gram = xa.transpose() * &xa / 60.0;
            let oracle = gram.lu().solve(&DVector::from_column_slice(&rhs)).unwrap();

            for method in [LsMethod::Direct, LsMethod::ConjugateGradient] {
                let cfg = NsConfig {
                    ls_method: method,
                    ..NsConfig::new(1.0)
                };
                let sol = restricted_ls_solve(&x, &set, &rhs, &cfg, None).unwrap();
                assert!(!sol.stalled);
                for (a, b) in sol.values.iter().zip(oracle.iter()) {
                    assert!((a - b).abs() < 1e-9, "{method:?}: {a} vs {b}");
                }
                if method == LsMethod::Direct {
                    for (a, b) in sol.values.iter().zip(oracle.iter()) {
                        assert!((a - b).abs() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn auto_switches_on_threshold() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let x = gaussian_design(40, 10, &mut rng);
        let set = WorkingSet::new(vec![1, 2, 3, 7], 10).unwrap();
        let rhs = [1.0, 2.0, 3.0, 4.0];
        let mut cfg = NsConfig::new(1.0);
        cfg.direct_threshold = 4;
        assert_eq!(
            restricted_ls_solve(&x, &set, &rhs, &cfg, None).unwrap().method,
            LsMethod::Direct
        );
        cfg.direct_threshold = 3;
        let sol = restricted_ls_solve(&x, &set, &rhs, &cfg, None).unwrap();
        assert_eq!(sol.method, LsMethod::ConjugateGradient);
        assert!(sol.cg_iterations >= 1);
    }

    #[test]
    fn cg_warm_start_at_solution_takes_no_iterations() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let x = gaussian_design(40, 10, &mut rng);
        let set = WorkingSet::new(vec![0, 5, 9], 10).unwrap();
        let rhs = [0.5, -1.0, 2.0];
        let mut cfg = NsConfig::new(1.0);
        cfg.ls_method = LsMethod::Direct;
        let exact = restricted_ls_solve(&x, &set, &rhs, &cfg, None).unwrap().values;
        cfg.ls_method = LsMethod::ConjugateGradient;
        let sol = restricted_ls_solve(&x, &set, &rhs, &cfg, Some(&exact)).unwrap();
        assert_eq!(sol.cg_iterations, 0);
    }

    #[test]
    fn cg_cap_flags_stall() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let x = gaussian_design(30, 20, &mut rng);
        let set = WorkingSet::full(20);
        let rhs: Vec<f64> = (0..20).map(|_| rng.sample(StandardNormal)).collect();
        let cfg = NsConfig {
            ls_method: LsMethod::ConjugateGradient,
            cg_max_iter: Some(1),
            ..NsConfig::new(1.0)
        };
        let sol = restricted_ls_solve(&x, &set, &rhs, &cfg, None).unwrap();
        assert!(sol.stalled);
        assert_eq!(sol.cg_iterations, 1);
    }

    #[test]
    fn oversized_working_set_is_rejected_for_every_method() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let x = gaussian_design(6, 9, &mut rng);
        let set = WorkingSet::full(9);
        let rhs = vec![1.0; 9];
        for ls_method in [LsMethod::Direct, LsMethod::ConjugateGradient, LsMethod::Auto] {
            let cfg = NsConfig {
                ls_method,
                ..NsConfig::new(1.0)
            };
            assert_eq!(
                restricted_ls_solve(&x, &set, &rhs, &cfg, None),
                Err(Error::SingularSystem { size: 9 })
            );
        }
    }

    #[test]
    fn rank_deficient_direct_is_singular() {
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        let x = gaussian_design(5, 10, &mut rng);
        let set = WorkingSet::full(10);
        let rhs = vec![1.0; 10];
        let cfg = NsConfig {
            ls_method: LsMethod::Direct,
            ..NsConfig::new(1.0)
        };
        assert_eq!(
            restricted_ls_solve(&x, &set, &rhs, &cfg, None),
            Err(Error::SingularSystem { size: 10 })
        );
        let ridged = NsConfig {
            ridge_epsilon: 1e-3,
            ..cfg
        };
        assert!(restricted_ls_solve(&x, &set, &rhs, &ridged, None).is_ok());
    }

    #[test]
    fn duplicate_columns_are_singular() {
        let raw = DMatrix::from_row_slice(3, 2, &[1.0, 1.0, 2.0, 2.0, -1.0, -1.0]);
        let x = normalize_columns(raw).unwrap();
        let set = WorkingSet::full(2);
        let cfg = NsConfig {
            ls_method: LsMethod::Direct,
            ..NsConfig::new(1.0)
        };
        assert!(matches!(
            restricted_ls_solve(&x, &set, &[1.0, 1.0], &cfg, None),
            Err(Error::SingularSystem { .. })
        ));
    }

    #[test]
    fn orthogonal_design_one_step_is_soft_threshold() {
        let n = 6;
        let x = orthogonal(n);
        let y = [3.0, -0.2, 1.1, -4.0, 0.4, 2.2];
        let lambda = 0.5;
        let xty = xty_over_n(&x, &y).unwrap();
        let init = PrimalDualState::new(vec![0.0; n], xty.clone(), lambda, 0.0).unwrap();
        let (next, set) = ns_iterate(&init, &x, &y, &NsConfig::new(lambda)).unwrap();
        let expected = soft_threshold(&xty, lambda).unwrap();
        for (a, b) in next.beta.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-14);
        }
        assert_eq!(set.len(), expected.iter().filter(|b| **b != 0.0).count());

        let res = ns_solve(&x, &y, &NsConfig::new(lambda), &init).unwrap();
        assert!(res.iterations <= 2);
        assert_eq!(res.converged_by, StopReason::WorkingSetFixedPoint);
        for (a, b) in res.state.beta.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn above_lambda_zero_is_a_fixed_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        let x = gaussian_design(15, 30, &mut rng);
        let y: Vec<f64> = (0..15).map(|_| rng.sample(StandardNormal)).collect();
        let xty = xty_over_n(&x, &y).unwrap();
        let lambda0 = crate::types::norm_inf(&xty);
        for lambda in [lambda0, 1.5 * lambda0] {
            let init = PrimalDualState::new(vec![0.0; 30], xty.clone(), lambda, 0.0).unwrap();
            let (next, set) = ns_iterate(&init, &x, &y, &NsConfig::new(lambda)).unwrap();
            assert!(set.is_empty());
            assert_eq!(next.beta, vec![0.0; 30]);
            assert_eq!(next.d, xty);
            let res = ns_solve(&x, &y, &NsConfig::new(lambda), &init).unwrap();
            assert_eq!(res.iterations, 1);
            assert_eq!(res.state.beta, vec![0.0; 30]);
            assert_eq!(res.kkt.residual_inf, 0.0);
        }
    }

    #[test]
    fn update_invariants_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(28);
        for _ in 0..50 {
            let (n, p) = (30, 45);
            let x = gaussian_design(n, p, &mut rng);
            let y: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let beta: Vec<f64> = (0..p)
                .map(|_| {
                    if rng.random_bool(0.2) {
                        rng.sample(StandardNormal)
                    } else {
                        0.0
                    }
                })
                .collect();
            let d: Vec<f64> = (0..p)
                .map(|_| 0.3 * rng.sample::<f64, _>(StandardNormal))
                .collect();
            let lambda = 0.4;
            let lambda_bar = rng.random_range(0.0..0.3);
            let state = PrimalDualState::new(beta, d, lambda, lambda_bar).unwrap();
            let cfg = NsConfig::new(lambda).with_lambda_bar(lambda_bar);
            let (next, set) = match ns_iterate(&state, &x, &y, &cfg) {
                Ok(v) => v,
                Err(Error::SingularSystem { .. }) => continue,
                Err(e) => panic!("{e}"),
            };
            for i in 0..p {
                if set.contains(i) {
                    assert_eq!(next.d[i].abs(), lambda - lambda_bar);
                } else {
                    assert_eq!(next.beta[i], 0.0);
                }
            }
        }
    }

    #[test]
    fn cap_is_honored() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let x = gaussian_design(20, 40, &mut rng);
        let y: Vec<f64> = (0..20).map(|_| rng.sample(StandardNormal)).collect();
        let xty = xty_over_n(&x, &y).unwrap();
        let lambda = 0.6 * crate::types::norm_inf(&xty);
        let cfg = NsConfig {
            max_iter: 1,
            ..NsConfig::new(lambda)
        };
        let init = PrimalDualState::new(vec![0.0; 40], xty, lambda, 0.0).unwrap();
        let res = ns_solve(&x, &y, &cfg, &init).unwrap();
        assert_eq!(res.iterations, 1);
        for (i, b) in res.state.beta.iter().enumerate() {
            if *b != 0.0 {
                assert!(res.working_set.contains(i));
            }
        }
    }

    #[test]
    fn config_validation() {
        assert!(NsConfig::new(1.0).validate().is_ok());
        assert!(NsConfig::new(0.0).validate().is_err());
        assert!(NsConfig::new(1.0).with_lambda_bar(1.0).validate().is_err());
        assert!(NsConfig {
            max_iter: 0,
            ..NsConfig::new(1.0)
        }
        .validate()
        .is_err());
        assert!(NsConfig {
            cg_tol: 0.0,
            ..NsConfig::new(1.0)
        }
        .validate()
        .is_err());
    }
}
