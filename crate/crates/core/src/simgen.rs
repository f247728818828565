//! Seeded synthetic regression problems.
//!
//! Randomness comes from `ChaCha8Rng::seed_from_u64(seed)` with a fixed
//! stream per purpose: design on stream 0, coefficients on stream 1, noise
//! on stream 2. Draws are taken row by row. The same seed therefore feeds
//! all three generators without correlating them, and the mapping from
//! seed to data is stable for a given [`GENERATOR_VERSION`].

use nalgebra::DMatrix;
use rand::{seq::index, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::types::WorkingSet;

pub const GENERATOR_NAME: &str = "chacha8-seed_from_u64-streams";
pub const GENERATOR_VERSION: u32 = 1;

const DESIGN_STREAM: u64 = 0;
const COEFFICIENT_STREAM: u64 = 1;
const NOISE_STREAM: u64 = 2;

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Design {
    /// Rows `N(0, Sigma)` with `Sigma_ij = rho^|i-j|`.
    Ar1,
    /// `x_j = z_j + rho (z_{j-1} + z_{j+1})` on interior columns.
    #[serde(rename = "ma")]
    MovingAverage,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimScenario {
    pub n: usize,
    pub p: usize,
    pub t: usize,
    pub r: f64,
    pub rho: f64,
    pub sigma: f64,
    pub design: Design,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub beta_star: Vec<f64>,
    pub support: WorkingSet,
    /// Signs of `beta_star` on `support`, in index order.
    pub signs: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GeneratorInfo {
    pub name: &'static str,
    pub version: u32,
    /// Generated columns are rescaled to norm `sqrt(n)` before solving.
    pub columns_normalized_before_solve: bool,
}

impl GroundTruth {
    /// Reads the support and signs off a coefficient vector (exact zeros are inactive).
    pub fn from_beta(beta_star: Vec<f64>) -> Result<Self> {
        if beta_star.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidConfig("beta_star has a non-finite entry".into()));
        }
        let p = beta_star.len();
        let support = WorkingSet::from_predicate(p, |i| beta_star[i] != 0.0);
        let signs = support.indices().iter().map(|&i| beta_star[i].signum()).collect();
        Ok(GroundTruth {
            beta_star,
            support,
            signs,
        })
    }
}

pub const GENERATOR_INFO: GeneratorInfo = GeneratorInfo {
    name: GENERATOR_NAME,
    version: GENERATOR_VERSION,
    columns_normalized_before_solve: true,
};

/// Raw design, response and truth for one scenario draw.
#[derive(Debug, Clone, PartialEq)]
pub struct SimData {
    pub x: DMatrix<f64>,
    pub y: Vec<f64>,
    pub truth: GroundTruth,
}

impl SimScenario {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.p == 0 {
            return Err(Error::InvalidDimensions(format!(
                "n and p must be positive, got n = {}, p = {}",
                self.n, self.p
            )));
        }
        if self.t == 0 || self.t > self.p || self.t >= self.n {
            return Err(Error::InvalidT { t: self.t, p: self.p });
        }
        if !(self.r > 1.0 && self.r.is_finite()) {
            return Err(Error::InvalidConfig(format!("R must exceed 1, got {}", self.r)));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return Err(Error::InvalidRho(self.rho));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "sigma must be nonnegative, got {}",
                self.sigma
            )));
        }
        if self.design == Design::MovingAverage && self.p < 3 {
            return Err(Error::InvalidDimensions(
                "moving-average design needs p >= 3".into(),
            ));
        }
        Ok(())
    }

    /// Same scenario with a different seed.
    pub fn with_seed(self, seed: u64) -> Self {
        SimScenario { seed, ..self }
    }

    pub fn generate(&self) -> Result<SimData> {
        self.validate()?;
        let x = match self.design {
            Design::Ar1 => gen_design_ar1(self.n, self.p, self.rho, self.seed)?,
            Design::MovingAverage => gen_design_ma(self.n, self.p, self.rho, self.seed)?,
        };
        let truth = gen_coefficients(self.p, self.t, self.r, self.seed)?;
        let y = gen_response(&x, &truth.beta_star, self.sigma, self.seed)?;
        Ok(SimData { x, y, truth })
    }
}

pub fn gen_design_ar1(n: usize, p: usize, rho: f64, seed: u64) -> Result<DMatrix<f64>> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::InvalidRho(rho));
    }
    let mut rng = rng_for(seed, DESIGN_STREAM);
    let innovation = (1.0 - rho * rho).sqrt();
    let mut x = DMatrix::zeros(n, p);
    for i in 0..n {
        let mut prev = 0.0;
        for j in 0..p {
            let z: f64 = rng.sample(StandardNormal);
            prev = if j == 0 { z } else { rho * prev + innovation * z };
            x[(i, j)] = prev;
        }
    }
    Ok(x)
}

pub fn gen_design_ma(n: usize, p: usize, rho: f64, seed: u64) -> Result<DMatrix<f64>> {
    if p < 3 {
        return Err(Error::InvalidDimensions(
            "moving-average design needs p >= 3".into(),
        ));
    }
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::InvalidRho(rho));
    }
    let mut rng = rng_for(seed, DESIGN_STREAM);
    let mut base = DMatrix::zeros(n, p);
    for i in 0..n {
        for j in 0..p {
            base[(i, j)] = rng.sample(StandardNormal);
        }
    }
    let mut x = base.clone();
    for j in 1..p - 1 {
        for i in 0..n {
            x[(i, j)] += rho * (base[(i, j + 1)] + base[(i, j - 1)]);
        }
    }
    Ok(x)
}

/// `t` coefficients `theta_i R^kappa_i` on a uniformly random support, with
/// Rademacher `theta_i` and `kappa_i ~ U[0, 1)`.
pub fn gen_coefficients(p: usize, t: usize, r: f64, seed: u64) -> Result<GroundTruth> {
    if t == 0 || t > p {
        return Err(Error::InvalidT { t, p });
    }
    if !(r > 1.0 && r.is_finite()) {
        return Err(Error::InvalidConfig(format!("R must exceed 1, got {r}")));
    }
    let mut rng = rng_for(seed, COEFFICIENT_STREAM);
    let mut support = index::sample(&mut rng, p, t).into_vec();
    support.sort_unstable();
    let mut beta_star = vec![0.0; p];
    let mut signs = Vec::with_capacity(t);
    for &i in &support {
        let theta = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let kappa: f64 = rng.random();
        beta_star[i] = theta * r.powf(kappa);
        signs.push(theta);
    }
    Ok(GroundTruth {
        beta_star,
        support: WorkingSet::new(support, p)?,
        signs,
    })
}

/// `X beta_star + sigma z`.
pub fn gen_response(x: &DMatrix<f64>, beta_star: &[f64], sigma: f64, seed: u64) -> Result<Vec<f64>> {
    check_len("beta_star", x.ncols(), beta_star.len())?;
    if !(sigma >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "sigma must be nonnegative, got {sigma}"
        )));
    }
    let mut y = vec![0.0; x.nrows()];
    for (j, &b) in beta_star.iter().enumerate() {
        if b != 0.0 {
            for (yi, xij) in y.iter_mut().zip(x.column(j).iter()) {
                *yi += b * xij;
            }
        }
    }
    if sigma > 0.0 {
        let mut rng = rng_for(seed, NOISE_STREAM);
        for yi in y.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *yi += sigma * z;
        }
    }
    Ok(y)
}

/// Expands `start:step:stop` (inclusive) or a comma list into values.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidConfig(format!("cannot parse grid '{text}'"));
    let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [single] => single.split(',').map(parse).collect(),
        [start, step, stop] => {
            let (start, step, stop) = (parse(start)?, parse(step)?, parse(stop)?);
            if !(step > 0.0) || stop < start {
                return Err(bad());
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize;
            Ok((0..=count).map(|k| start + step * k as f64).collect())
        }
        _ => Err(bad()),
    }
}
