//! Pairwise preference model over agent rounds.
//!
//! A participant who played with agents X and Y picks one. The log-odds of
//! picking X are `b0 + sum_i b_i (x_i - y_i)`: a logistic (Bradley-Terry)
//! model over feature differences, where `b0` absorbs any preference for the
//! first-presented agent. Coefficients get independent Gaussian priors and
//! are estimated by MCMC; see [`fit`].

mod diagnostics;
mod sampler;

pub use self::diagnostics::{effective_sample_size, kde_at, quantile, split_rhat};
pub use self::sampler::SamplerConfig;

use std::fmt;
use std::io;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Bernoulli, Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::beta::ln_beta;

use self::sampler::Problem;
use crate::agents::AgentKind;
use crate::error::PreferenceError;

pub const INTERCEPT: &str = "intercept";

pub const OBJECTIVE_FEATURES: [&str; 5] = [
    "human_score",
    "ai_score",
    "score_inequality",
    "ai_steals",
    "intersections",
];

pub const SUBJECTIVE_FEATURES: [&str; 8] = ["q1", "q2", "q3", "q4", "q5", "q6", "q7", "q8"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSet {
    Objective,
    Subjective,
}

impl FeatureSet {
    pub fn names(self) -> &'static [&'static str] {
        match self {
            FeatureSet::Objective => &OBJECTIVE_FEATURES,
            FeatureSet::Subjective => &SUBJECTIVE_FEATURES,
        }
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeatureSet::Objective => "objective",
            FeatureSet::Subjective => "subjective",
        })
    }
}

impl FromStr for FeatureSet {
    type Err = PreferenceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "objective" => Ok(FeatureSet::Objective),
            "subjective" => Ok(FeatureSet::Subjective),
            other => Err(PreferenceError::MissingFeature(other.to_string())),
        }
    }
}

/// One forced choice between two agents. `x` was presented first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChoiceRecord {
    pub participant_id: String,
    pub density: usize,
    pub agent_x: AgentKind,
    pub agent_y: AgentKind,
    pub chose_x: bool,
    pub features_x: Vec<(String, f64)>,
    pub features_y: Vec<(String, f64)>,
}

impl ChoiceRecord {
    fn lookup(features: &[(String, f64)], name: &str) -> Result<f64, PreferenceError> {
        features
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
            .ok_or_else(|| PreferenceError::MissingFeature(name.to_string()))
    }

    /// `x_name - y_name`.
    pub fn difference(&self, name: &str) -> Result<f64, PreferenceError> {
        Ok(Self::lookup(&self.features_x, name)? - Self::lookup(&self.features_y, name)?)
    }

    pub fn feature_names(&self) -> Vec<&str> {
        self.features_x.iter().map(|(n, _)| n.as_str()).collect()
    }

    fn check_names(&self) -> Result<(), PreferenceError> {
        let xs: Vec<&str> = self.features_x.iter().map(|(n, _)| n.as_str()).collect();
        let ys: Vec<&str> = self.features_y.iter().map(|(n, _)| n.as_str()).collect();
        if xs != ys {
            return Err(PreferenceError::FeatureMismatch(format!(
                "participant {}: x has {xs:?}, y has {ys:?}",
                self.participant_id
            )));
        }
        Ok(())
    }

    /// The same choice with the presentation order reversed.
    pub fn swapped(&self) -> Self {
        Self {
            agent_x: self.agent_y,
            agent_y: self.agent_x,
            chose_x: !self.chose_x,
            features_x: self.features_y.clone(),
            features_y: self.features_x.clone(),
            ..self.clone()
        }
    }
}

/// Column centring and scaling applied to raw differences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub means: Vec<f64>,
    /// 1.0 for columns that were passed through unscaled.
    pub sds: Vec<f64>,
}

impl Scaler {
    fn identity(p: usize) -> Self {
        Self {
            means: vec![0.0; p],
            sds: vec![1.0; p],
        }
    }

    pub fn apply(&self, raw: &[f64]) -> Vec<f64> {
        raw.iter()
            .zip(self.means.iter().zip(&self.sds))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub features: Vec<String>,
    /// Leading column of ones when `intercept` is set, then one column per feature.
    pub rows: Vec<Vec<f64>>,
    pub response: Vec<f64>,
    pub scaler: Scaler,
    pub intercept: bool,
}

impl Design {
    pub fn coefficient_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.intercept {
            out.push(INTERCEPT.to_string());
        }
        out.extend(self.features.iter().cloned());
        out
    }
}

pub fn build_design(
    records: &[ChoiceRecord],
    set: FeatureSet,
    standardize: bool,
) -> Result<Design, PreferenceError> {
    let names: Vec<String> = set.names().iter().map(|s| s.to_string()).collect();
    if set == FeatureSet::Subjective {
        for r in records {
            for name in &names {
                for side in [&r.features_x, &r.features_y] {
                    let v = ChoiceRecord::lookup(side, name)?;
                    if v.fract() != 0.0 || !(1.0..=7.0).contains(&v) {
                        return Err(PreferenceError::InvalidData(format!(
                            "participant {}: {name} = {v} is not a Likert score 1-7",
                            r.participant_id
                        )));
                    }
                }
            }
        }
    }
    build_design_with(records, &names, standardize, true)
}

/// [`build_design`] over an explicit feature list, optionally without the
/// intercept column.
pub fn build_design_with(
    records: &[ChoiceRecord],
    features: &[String],
    standardize: bool,
    intercept: bool,
) -> Result<Design, PreferenceError> {
    if records.len() < 2 {
        return Err(PreferenceError::TooFewRecords {
            needed: 2,
            got: records.len(),
        });
    }
    let first = records[0].feature_names();
    for r in records {
        r.check_names()?;
        if r.feature_names() != first {
            return Err(PreferenceError::FeatureMismatch(format!(
                "participant {} has features {:?}, expected {first:?}",
                r.participant_id,
                r.feature_names()
            )));
        }
    }
    let raw: Vec<Vec<f64>> = records
        .iter()
        .map(|r| features.iter().map(|f| r.difference(f)).collect())
        .collect::<Result<_, _>>()?;

    let p = features.len();
    let scaler = if standardize {
        let n = raw.len() as f64;
        let mut scaler = Scaler::identity(p);
        for j in 0..p {
            let mean = raw.iter().map(|r| r[j]).sum::<f64>() / n;
            let var = raw.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / (n - 1.0);
            if var > 0.0 {
                scaler.means[j] = mean;
                scaler.sds[j] = var.sqrt();
            } else {
                log::warn!("feature `{}` has zero variance; left unscaled", features[j]);
            }
        }
        scaler
    } else {
        Scaler::identity(p)
    };

    let rows = raw
        .iter()
        .map(|r| {
            let mut row = Vec::with_capacity(p + 1);
            if intercept {
                row.push(1.0);
            }
            row.extend(scaler.apply(r));
            row
        })
        .collect();
    Ok(Design {
        features: features.to_vec(),
        rows,
        response: records.iter().map(|r| if r.chose_x { 1.0 } else { 0.0 }).collect(),
        scaler,
        intercept,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictionMode {
    /// Plug in posterior means.
    #[default]
    PlugIn,
    /// Average the predicted probability over posterior draws.
    PosteriorAverage,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub prior_sd: f64,
    pub sampler: SamplerConfig,
    pub prediction: PredictionMode,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            prior_sd: 1.0,
            sampler: SamplerConfig::default(),
            prediction: PredictionMode::PlugIn,
        }
    }
}

impl FitConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.sampler.seed = seed;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSummary {
    pub coefficient: String,
    /// Savage-Dickey approximation under the Gaussian prior.
    pub bf_inclusion: f64,
    pub mean: f64,
    pub sd: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub ess: f64,
    pub rhat: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSummary {
    pub coefficients: Vec<CoefficientSummary>,
    pub chains: usize,
    pub draws_per_chain: usize,
    pub acceptance_rate: f64,
    /// The data were perfectly separable at the posterior mode.
    pub separable: bool,
}

impl PosteriorSummary {
    pub fn get(&self, name: &str) -> Option<&CoefficientSummary> {
        self.coefficients.iter().find(|c| c.coefficient == name)
    }

    pub fn means(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.mean).collect()
    }
}

/// Fitted model: summary, pooled draws and the design's scaling.
#[derive(Debug, Clone)]
pub struct Posterior {
    pub summary: PosteriorSummary,
    /// `draws[k]` holds all pooled draws of coefficient `k`.
    pub draws: Vec<Vec<f64>>,
    pub features: Vec<String>,
    pub scaler: Scaler,
    pub intercept: bool,
    pub prediction: PredictionMode,
}

/// Linear predictor on raw (unstandardized) feature differences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub features: Vec<String>,
    pub intercept: f64,
    pub slopes: Vec<f64>,
}

impl Coefficients {
    pub fn linear_predictor(&self, record: &ChoiceRecord) -> Result<f64, PreferenceError> {
        let mut eta = self.intercept;
        for (name, b) in self.features.iter().zip(&self.slopes) {
            eta += b * record.difference(name)?;
        }
        Ok(eta)
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Probability that the first-presented agent is chosen.
pub fn predict(coefficients: &Coefficients, record: &ChoiceRecord) -> Result<f64, PreferenceError> {
    Ok(sigmoid(coefficients.linear_predictor(record)?))
}

impl Posterior {
    /// Maps standardized-scale coefficients back to raw differences.
    pub fn to_raw(&self, standardized: &[f64]) -> Coefficients {
        let (b0, slopes) = if self.intercept {
            (standardized[0], &standardized[1..])
        } else {
            (0.0, standardized)
        };
        let raw: Vec<f64> = slopes.iter().zip(&self.scaler.sds).map(|(b, s)| b / s).collect();
        let shift: f64 = raw.iter().zip(&self.scaler.means).map(|(b, m)| b * m).sum();
        Coefficients {
            features: self.features.clone(),
            intercept: b0 - shift,
            slopes: raw,
        }
    }

    /// Posterior-mean coefficients on the raw difference scale.
    pub fn plug_in(&self) -> Coefficients {
        self.to_raw(&self.summary.means())
    }

    pub fn predict(&self, record: &ChoiceRecord) -> Result<f64, PreferenceError> {
        match self.prediction {
            PredictionMode::PlugIn => predict(&self.plug_in(), record),
            PredictionMode::PosteriorAverage => {
                let diffs: Vec<f64> = self
                    .features
                    .iter()
                    .map(|f| record.difference(f))
                    .collect::<Result<_, _>>()?;
                let mut x = Vec::new();
                if self.intercept {
                    x.push(1.0);
                }
                x.extend(self.scaler.apply(&diffs));
                let n = self.draws[0].len();
                let total: f64 = (0..n)
                    .map(|i| sigmoid(x.iter().enumerate().map(|(k, v)| v * self.draws[k][i]).sum()))
                    .sum();
                Ok(total / n as f64)
            }
        }
    }
}

fn normal_pdf(x: f64, mean: f64, sd: f64) -> f64 {
    let z = (x - mean) / sd;
    (-0.5 * z * z).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt())
}

/// Savage-Dickey ratio `prior(0) / posterior(0)`. The posterior density at
/// zero is a kernel estimate unless zero lies far in the tail, where a
/// normal approximation is used instead.
fn savage_dickey(draws: &[f64], mean: f64, sd: f64, prior_sd: f64) -> f64 {
    let prior = normal_pdf(0.0, 0.0, prior_sd);
    let post = if (mean / sd).abs() < 3.5 {
        kde_at(draws, 0.0)
    } else {
        0.0
    };
    if post > 0.0 {
        prior / post
    } else {
        let log_post = -0.5 * (mean / sd).powi(2) - (sd * (2.0 * std::f64::consts::PI).sqrt()).ln();
        (prior.ln() - log_post).exp()
    }
}

pub fn fit(design: &Design, config: &FitConfig) -> Result<Posterior, PreferenceError> {
    let names = design.coefficient_names();
    let problem = Problem {
        rows: &design.rows,
        response: &design.response,
        prior_sd: config.prior_sd,
    };
    let (samples, mode) = sampler::sample(&problem, &config.sampler)?;
    let separable = problem.separable(&mode);
    if separable {
        log::warn!("choice data are perfectly separable; posterior is driven by the prior");
    }
    let mut coefficients = Vec::with_capacity(names.len());
    let mut draws = Vec::with_capacity(names.len());
    for (k, name) in names.iter().enumerate() {
        let pooled = samples.pooled(k);
        let n = pooled.len() as f64;
        let mean = pooled.iter().sum::<f64>() / n;
        let sd = (pooled.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        let mut sorted = pooled.clone();
        sorted.sort_by(f64::total_cmp);
        coefficients.push(CoefficientSummary {
            coefficient: name.clone(),
            bf_inclusion: savage_dickey(&pooled, mean, sd, config.prior_sd),
            mean,
            sd,
            ci_lower: quantile(&sorted, 0.025),
            ci_upper: quantile(&sorted, 0.975),
            ess: samples.ess[k],
            rhat: samples.rhat[k],
        });
        draws.push(pooled);
    }
    Ok(Posterior {
        summary: PosteriorSummary {
            coefficients,
            chains: config.sampler.chains,
            draws_per_chain: samples.draws_per_chain(),
            acceptance_rate: samples.acceptance,
            separable,
        },
        draws,
        features: design.features.clone(),
        scaler: design.scaler.clone(),
        intercept: design.intercept,
        prediction: config.prediction,
    })
}

/// Area under the ROC curve via the Mann-Whitney statistic, with midranks
/// for tied scores.
pub fn auc(scores: &[f64], labels: &[bool]) -> f64 {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut ranks = vec![0.0; scores.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && scores[idx[j + 1]] == scores[idx[i]] {
            j += 1;
        }
        let mid = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = mid;
        }
        i = j + 1;
    }
    let pos = labels.iter().filter(|&&l| l).count() as f64;
    let neg = labels.len() as f64 - pos;
    if pos == 0.0 || neg == 0.0 {
        return f64::NAN;
    }
    let rank_sum: f64 = ranks.iter().zip(labels).filter(|(_, &l)| l).map(|(r, _)| r).sum();
    (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub accuracy: f64,
    pub auc: f64,
    pub fold_sizes: Vec<usize>,
    /// Held-out probability for every record, in input order.
    pub predictions: Vec<f64>,
}

/// Seeded record-level partition into near-equal folds.
pub fn assign_folds(n: usize, folds: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut fold = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        fold[i] = pos % folds;
    }
    fold
}

pub fn cross_validate(
    records: &[ChoiceRecord],
    set: FeatureSet,
    folds: usize,
    seed: u64,
    config: &FitConfig,
) -> Result<CvResult, PreferenceError> {
    if folds < 2 || folds > records.len() {
        return Err(PreferenceError::TooManyFolds {
            folds,
            records: records.len(),
        });
    }
    let fold = assign_folds(records.len(), folds, seed);
    let per_fold: Vec<Vec<(usize, f64)>> = (0..folds)
        .into_par_iter()
        .map(|f| {
            let train: Vec<ChoiceRecord> = records
                .iter()
                .zip(&fold)
                .filter(|(_, &k)| k != f)
                .map(|(r, _)| r.clone())
                .collect();
            let design = build_design(&train, set, true)?;
            let cfg = config.with_seed(config.sampler.seed.wrapping_add(f as u64 + 1));
            let post = fit(&design, &cfg)?;
            records
                .iter()
                .enumerate()
                .filter(|(i, _)| fold[*i] == f)
                .map(|(i, r)| post.predict(r).map(|p| (i, p)))
                .collect()
        })
        .collect::<Result<_, PreferenceError>>()?;

    let mut predictions = vec![0.0; records.len()];
    let mut fold_sizes = Vec::with_capacity(folds);
    for held in per_fold {
        fold_sizes.push(held.len());
        for (i, p) in held {
            predictions[i] = p;
        }
    }
    let labels: Vec<bool> = records.iter().map(|r| r.chose_x).collect();
    let correct = predictions
        .iter()
        .zip(&labels)
        .filter(|(&p, &l)| (p > 0.5) == l)
        .count();
    Ok(CvResult {
        accuracy: correct as f64 / records.len() as f64,
        auc: auc(&predictions, &labels),
        fold_sizes,
        predictions,
    })
}

fn choose_u128(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    acc
}

/// Bayes factor for a binomial proportion: uniform prior on the rate versus
/// the point null 0.5. Equals `B(k+1, n-k+1) / 0.5^n`.
pub fn binomial_bf(k: u64, n: u64) -> Result<f64, PreferenceError> {
    if k > n {
        return Err(PreferenceError::InvalidCounts { k, n });
    }
    if n == 0 {
        return Ok(1.0);
    }
    // B(k+1, n-k+1) = 1 / ((n+1) C(n,k)); exact while the integers fit.
    if n <= 120 {
        let denom = u128::from(n + 1) * choose_u128(n, k);
        let num = 1u128 << n;
        let g = gcd(num, denom);
        return Ok((num / g) as f64 / (denom / g) as f64);
    }
    let log_bf = ln_beta((k + 1) as f64, (n - k + 1) as f64) + n as f64 * std::f64::consts::LN_2;
    Ok(log_bf.exp())
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Conventional evidence labels for a Bayes factor.
pub fn evidence_label(bf: f64) -> &'static str {
    match bf {
        b if b > 100.0 => "extreme",
        b if b > 30.0 => "very strong",
        b if b > 10.0 => "strong",
        b if b > 3.0 => "moderate",
        b if b > 1.0 => "anecdotal",
        _ => "none",
    }
}

/// Generates choices from a known coefficient vector. Each side's features
/// are independent N(0, 1/2) draws, so differences are standard normal.
pub fn synthetic_records(
    n: usize,
    intercept: f64,
    slopes: &[f64],
    features: &[&str],
    seed: u64,
) -> Vec<ChoiceRecord> {
    assert_eq!(slopes.len(), features.len(), "one slope per feature");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("valid sd");
    (0..n)
        .map(|i| {
            let xs: Vec<f64> = features.iter().map(|_| half.sample(&mut rng)).collect();
            let ys: Vec<f64> = features.iter().map(|_| half.sample(&mut rng)).collect();
            let eta = intercept
                + slopes
                    .iter()
                    .zip(xs.iter().zip(&ys))
                    .map(|(b, (x, y))| b * (x - y))
                    .sum::<f64>();
            let chose_x = Bernoulli::new(sigmoid(eta)).expect("probability").sample(&mut rng);
            let named = |vals: Vec<f64>| {
                features.iter().map(|f| f.to_string()).zip(vals).collect()
            };
            ChoiceRecord {
                participant_id: format!("s{i:05}"),
                density: if i % 2 == 0 { 5 } else { 15 },
                agent_x: AgentKind::Omit,
                agent_y: AgentKind::Ignorant,
                chose_x,
                features_x: named(xs),
                features_y: named(ys),
            }
        })
        .collect()
}

const FIXED_COLUMNS: [&str; 5] = ["participant_id", "density", "agent_x", "agent_y", "chose_x"];

fn csv_err(msg: impl Into<String>) -> PreferenceError {
    PreferenceError::InvalidData(msg.into())
}

pub fn write_choices_csv<W: io::Write>(records: &[ChoiceRecord], out: W) -> Result<(), PreferenceError> {
    let mut w = csv::Writer::from_writer(out);
    let names: Vec<String> = records
        .first()
        .map(|r| r.feature_names().iter().map(|s| s.to_string()).collect())
        .unwrap_or_default();
    let mut header: Vec<String> = FIXED_COLUMNS.iter().map(|s| s.to_string()).collect();
    for n in &names {
        header.push(format!("x_{n}"));
        header.push(format!("y_{n}"));
    }
    w.write_record(&header)?;
    for r in records {
        r.check_names()?;
        let mut row = vec![
            r.participant_id.clone(),
            r.density.to_string(),
            r.agent_x.to_string(),
            r.agent_y.to_string(),
            u8::from(r.chose_x).to_string(),
        ];
        for n in &names {
            row.push(ChoiceRecord::lookup(&r.features_x, n)?.to_string());
            row.push(ChoiceRecord::lookup(&r.features_y, n)?.to_string());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_choices_csv<R: io::Read>(input: R) -> Result<Vec<ChoiceRecord>, PreferenceError> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    let cols: Vec<&str> = header.iter().collect();
    if cols.len() < FIXED_COLUMNS.len() || cols[..FIXED_COLUMNS.len()] != FIXED_COLUMNS {
        return Err(csv_err(format!("expected leading columns {FIXED_COLUMNS:?}")));
    }
    let mut features = Vec::new();
    for pair in cols[FIXED_COLUMNS.len()..].chunks(2) {
        match pair {
            [x, y] if x.strip_prefix("x_").is_some() && x.strip_prefix("x_") == y.strip_prefix("y_") => {
                features.push(x["x_".len()..].to_string());
            }
            _ => return Err(csv_err(format!("unpaired feature columns {pair:?}"))),
        }
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let num = |i: usize| -> Result<f64, PreferenceError> {
            rec[i].trim().parse().map_err(|_| csv_err(format!("`{}` is not a number", &rec[i])))
        };
        let agent = |i: usize| -> Result<AgentKind, PreferenceError> {
            rec[i].parse().map_err(|_| csv_err(format!("unknown agent `{}`", &rec[i])))
        };
        let chose_x = match rec[4].trim() {
            "1" | "true" => true,
            "0" | "false" => false,
            other => return Err(csv_err(format!("chose_x must be 0/1, got `{other}`"))),
        };
        let mut fx = Vec::with_capacity(features.len());
        let mut fy = Vec::with_capacity(features.len());
        for (j, name) in features.iter().enumerate() {
            fx.push((name.clone(), num(5 + 2 * j)?));
            fy.push((name.clone(), num(6 + 2 * j)?));
        }
        out.push(ChoiceRecord {
            participant_id: rec[0].to_string(),
            density: rec[1]
                .trim()
                .parse()
                .map_err(|_| csv_err(format!("bad density `{}`", &rec[1])))?,
            agent_x: agent(2)?,
            agent_y: agent(3)?,
            chose_x,
            features_x: fx,
            features_y: fy,
        });
    }
    Ok(out)
}

pub fn write_summary_csv<W: io::Write>(summary: &PosteriorSummary, out: W) -> Result<(), PreferenceError> {
    let mut w = csv::Writer::from_writer(out);
    for c in &summary.coefficients {
        w.serialize(c)?;
    }
    w.flush()?;
    Ok(())
}
