//! Posterior sampling for Bayesian logistic regression with independent
//! Gaussian priors.
//!
//! The reference sampler finds the posterior mode by Newton's method, uses the
//! inverse Hessian there as the proposal covariance, and runs several
//! random-walk Metropolis chains in parallel. The proposal scale is tuned
//! toward a 0.234 acceptance rate during warmup. Chains are extended until
//! the effective sample size and split R-hat targets are met.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::diagnostics::{effective_sample_size, split_rhat};
use crate::error::PreferenceError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub chains: usize,
    pub warmup: usize,
    /// Initial kept draws per chain.
    pub draws: usize,
    /// Chains are doubled in length up to this many kept draws each.
    pub max_draws: usize,
    pub min_ess: f64,
    pub max_rhat: f64,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            chains: 4,
            warmup: 1000,
            draws: 4000,
            max_draws: 64_000,
            min_ess: 1000.0,
            max_rhat: 1.01,
            seed: 0,
        }
    }
}

/// Row-major design with a response in {0, 1}.
pub(crate) struct Problem<'a> {
    pub rows: &'a [Vec<f64>],
    pub response: &'a [f64],
    pub prior_sd: f64,
}

fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Problem<'_> {
    fn dim(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn log_posterior(&self, beta: &[f64]) -> f64 {
        let ll: f64 = self
            .rows
            .iter()
            .zip(self.response)
            .map(|(x, &y)| {
                let eta = dot(x, beta);
                y * eta - softplus(eta)
            })
            .sum();
        let prior: f64 = beta.iter().map(|b| b * b).sum::<f64>() / (2.0 * self.prior_sd.powi(2));
        ll - prior
    }

    fn gradient_hessian(&self, beta: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let p = self.dim();
        let inv_var = 1.0 / self.prior_sd.powi(2);
        let mut g = DVector::from_iterator(p, beta.iter().map(|b| -b * inv_var));
        let mut h = DMatrix::identity(p, p) * inv_var;
        for (x, &y) in self.rows.iter().zip(self.response) {
            let mu = sigmoid(dot(x, beta));
            let w = mu * (1.0 - mu);
            for i in 0..p {
                g[i] += (y - mu) * x[i];
                for j in 0..=i {
                    h[(i, j)] += w * x[i] * x[j];
                }
            }
        }
        for i in 0..p {
            for j in 0..i {
                h[(j, i)] = h[(i, j)];
            }
        }
        (g, h)
    }

    /// Posterior mode and the negative Hessian there.
    pub fn mode(&self) -> Result<(Vec<f64>, DMatrix<f64>), PreferenceError> {
        let mut beta = vec![0.0; self.dim()];
        let mut lp = self.log_posterior(&beta);
        for _ in 0..200 {
            let (g, h) = self.gradient_hessian(&beta);
            let step = h
                .clone()
                .cholesky()
                .ok_or_else(|| PreferenceError::NonConvergence("singular Hessian".into()))?
                .solve(&g);
            let mut scale = 1.0;
            loop {
                let cand: Vec<f64> = beta.iter().zip(step.iter()).map(|(b, s)| b + scale * s).collect();
                let cand_lp = self.log_posterior(&cand);
                if cand_lp >= lp - 1e-12 || scale < 1e-8 {
                    beta = cand;
                    lp = cand_lp;
                    break;
                }
                scale *= 0.5;
            }
            if step.norm() * scale < 1e-10 {
                let (_, h) = self.gradient_hessian(&beta);
                return Ok((beta, h));
            }
        }
        Err(PreferenceError::NonConvergence(
            "Newton iterations for the posterior mode did not settle".into(),
        ))
    }

    /// True when the mode's linear predictor classifies every row correctly.
    pub fn separable(&self, beta: &[f64]) -> bool {
        self.rows
            .iter()
            .zip(self.response)
            .all(|(x, &y)| (2.0 * y - 1.0) * dot(x, beta) > 0.0)
    }
}

/// Per-coefficient chains plus diagnostics.
pub struct Samples {
    /// `chains[c][k]` is the draw sequence of coefficient `k` in chain `c`.
    pub chains: Vec<Vec<Vec<f64>>>,
    pub ess: Vec<f64>,
    pub rhat: Vec<f64>,
    pub acceptance: f64,
}

impl Samples {
    pub fn pooled(&self, k: usize) -> Vec<f64> {
        self.chains.iter().flat_map(|c| c[k].iter().copied()).collect()
    }

    pub fn draws_per_chain(&self) -> usize {
        self.chains.first().map_or(0, |c| c[0].len())
    }

    fn per_coefficient(&self, k: usize) -> Vec<Vec<f64>> {
        self.chains.iter().map(|c| c[k].clone()).collect()
    }
}

struct Chain {
    rng: ChaCha8Rng,
    state: Vec<f64>,
    lp: f64,
    scale: f64,
    accepted: u64,
    proposed: u64,
    draws: Vec<Vec<f64>>,
}

impl Chain {
    fn propose(&mut self, problem: &Problem<'_>, chol: &DMatrix<f64>) -> bool {
        let p = self.state.len();
        let z = DVector::from_iterator(p, (0..p).map(|_| StandardNormal.sample(&mut self.rng)));
        let step = chol * z;
        let cand: Vec<f64> = self
            .state
            .iter()
            .zip(step.iter())
            .map(|(s, d)| s + self.scale * d)
            .collect();
        let cand_lp = problem.log_posterior(&cand);
        let u: f64 = Uniform::new(0.0, 1.0).expect("valid range").sample(&mut self.rng);
        self.proposed += 1;
        if u.ln() < cand_lp - self.lp {
            self.state = cand;
            self.lp = cand_lp;
            self.accepted += 1;
            true
        } else {
            false
        }
    }

    fn warmup(&mut self, problem: &Problem<'_>, chol: &DMatrix<f64>, iters: usize) {
        for i in 0..iters {
            let acc = if self.propose(problem, chol) { 1.0 } else { 0.0 };
            let rate = ((i + 1) as f64).powf(-0.6);
            self.scale *= (rate * (acc - 0.234)).exp();
        }
        self.accepted = 0;
        self.proposed = 0;
    }

    fn extend(&mut self, problem: &Problem<'_>, chol: &DMatrix<f64>, count: usize) {
        for _ in 0..count {
            self.propose(problem, chol);
            for (k, v) in self.state.iter().enumerate() {
                self.draws[k].push(*v);
            }
        }
    }
}

pub(crate) fn sample(problem: &Problem<'_>, config: &SamplerConfig) -> Result<(Samples, Vec<f64>), PreferenceError> {
    let p = problem.dim();
    let (mode, neg_hessian) = problem.mode()?;
    let cov = neg_hessian
        .try_inverse()
        .ok_or_else(|| PreferenceError::NonConvergence("singular Hessian".into()))?;
    let chol = cov
        .cholesky()
        .ok_or_else(|| PreferenceError::NonConvergence("proposal covariance not positive definite".into()))?
        .l();

    let mut chains: Vec<Chain> = (0..config.chains)
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(c as u64 + 1);
            // Overdispersed start around the mode.
            let z = DVector::from_iterator(p, (0..p).map(|_| StandardNormal.sample(&mut rng)));
            let offset = &chol * z * 2.0;
            let state: Vec<f64> = mode.iter().zip(offset.iter()).map(|(m, o)| m + o).collect();
            let lp = problem.log_posterior(&state);
            Chain {
                rng,
                state,
                lp,
                scale: 2.38 / (p as f64).sqrt(),
                accepted: 0,
                proposed: 0,
                draws: vec![Vec::new(); p],
            }
        })
        .collect();

    chains
        .par_iter_mut()
        .for_each(|c| c.warmup(problem, &chol, config.warmup));

    let mut target = config.draws.max(4);
    let mut have = 0;
    loop {
        let add = target - have;
        chains.par_iter_mut().for_each(|c| c.extend(problem, &chol, add));
        have = target;

        let samples = Samples {
            chains: chains.iter().map(|c| c.draws.clone()).collect(),
            ess: Vec::new(),
            rhat: Vec::new(),
            acceptance: chains.iter().map(|c| c.accepted).sum::<u64>() as f64
                / chains.iter().map(|c| c.proposed).sum::<u64>().max(1) as f64,
        };
        let ess: Vec<f64> = (0..p).map(|k| effective_sample_size(&samples.per_coefficient(k))).collect();
        let rhat: Vec<f64> = (0..p).map(|k| split_rhat(&samples.per_coefficient(k))).collect();
        let ok = ess.iter().all(|&e| e >= config.min_ess) && rhat.iter().all(|&r| r < config.max_rhat);
        if ok {
            return Ok((Samples { ess, rhat, ..samples }, mode));
        }
        if target >= config.max_draws {
            let worst_ess = ess.iter().copied().fold(f64::INFINITY, f64::min);
            let worst_rhat = rhat.iter().copied().fold(0.0, f64::max);
            return Err(PreferenceError::NonConvergence(format!(
                "after {target} draws per chain: min ess {worst_ess:.0}, max rhat {worst_rhat:.4}"
            )));
        }
        target = (target * 2).min(config.max_draws);
    }
}
