//! Convergence diagnostics and summaries for sets of MCMC chains.

/// Splits every chain in half, giving `2 * chains.len()` equal-length pieces.
fn split(chains: &[Vec<f64>]) -> Vec<&[f64]> {
    let n = chains.iter().map(Vec::len).min().unwrap_or(0) / 2;
    chains
        .iter()
        .flat_map(|c| [&c[..n], &c[n..2 * n]])
        .collect()
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sample_var(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Within-chain variance `W` and pooled estimate `var+`.
fn variance_components(pieces: &[&[f64]]) -> (f64, f64) {
    let n = pieces[0].len() as f64;
    let means: Vec<f64> = pieces.iter().map(|c| mean(c)).collect();
    let w = mean(&pieces.iter().map(|c| sample_var(c)).collect::<Vec<_>>());
    let b_over_n = sample_var(&means);
    (w, (n - 1.0) / n * w + b_over_n)
}

/// Split-chain potential scale reduction factor.
pub fn split_rhat(chains: &[Vec<f64>]) -> f64 {
    let pieces = split(chains);
    if pieces.len() < 2 || pieces[0].len() < 4 {
        return f64::NAN;
    }
    let (w, var_plus) = variance_components(&pieces);
    if w <= 0.0 {
        return 1.0;
    }
    (var_plus / w).sqrt()
}

fn autocovariance(xs: &[f64], lag: usize) -> f64 {
    let m = mean(xs);
    let n = xs.len();
    xs[..n - lag]
        .iter()
        .zip(&xs[lag..])
        .map(|(a, b)| (a - m) * (b - m))
        .sum::<f64>()
        / n as f64
}

/// Multi-chain effective sample size with Geyer's initial positive
/// sequence truncation, computed on split chains.
pub fn effective_sample_size(chains: &[Vec<f64>]) -> f64 {
    let pieces = split(chains);
    if pieces.len() < 2 || pieces[0].len() < 4 {
        return f64::NAN;
    }
    let n = pieces[0].len();
    let total = (n * pieces.len()) as f64;
    let (w, var_plus) = variance_components(&pieces);
    if var_plus <= 0.0 {
        return total;
    }
    let rho = |lag: usize| {
        let acov = mean(&pieces.iter().map(|c| autocovariance(c, lag)).collect::<Vec<_>>());
        1.0 - (w - acov) / var_plus
    };
    let mut tau = -1.0;
    let mut prev_pair = f64::INFINITY;
    let mut lag = 0;
    while lag + 1 < n {
        let pair = rho(lag) + rho(lag + 1);
        if pair <= 0.0 {
            break;
        }
        let pair = pair.min(prev_pair);
        tau += 2.0 * pair;
        prev_pair = pair;
        lag += 2;
    }
    total / tau.max(1.0 / total.log10().max(1.0))
}

/// Linear-interpolated quantile of already sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Gaussian kernel density estimate at `x` with Silverman's bandwidth.
pub fn kde_at(samples: &[f64], x: f64) -> f64 {
    let n = samples.len() as f64;
    let sd = sample_var(samples).sqrt();
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    let h = 0.9 * spread * n.powf(-0.2);
    if !(h > 0.0) {
        return 0.0;
    }
    let norm = 1.0 / (h * (2.0 * std::f64::consts::PI).sqrt() * n);
    samples
        .iter()
        .map(|s| (-0.5 * ((x - s) / h).powi(2)).exp())
        .sum::<f64>()
        * norm
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn iid(chains: usize, n: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..chains)
            .map(|_| (0..n).map(|_| StandardNormal.sample(&mut rng)).collect())
            .collect()
    }

    #[test]
    fn iid_draws_have_full_ess_and_unit_rhat() {
        let c = iid(4, 2000, 1);
        let ess = effective_sample_size(&c);
        assert!((ess / 8000.0 - 1.0).abs() < 0.15, "ess {ess}");
        assert!((split_rhat(&c) - 1.0).abs() < 0.01);
    }

    #[test]
    fn ar1_ess_matches_theory() {
        // AR(1) with coefficient phi has integrated time (1 + phi) / (1 - phi).
        let phi: f64 = 0.8;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let chains: Vec<Vec<f64>> = (0..4)
            .map(|_| {
                let mut x = 0.0;
                (0..20_000)
                    .map(|_| {
                        let e: f64 = StandardNormal.sample(&mut rng);
                        x = phi * x + (1.0 - phi * phi).sqrt() * e;
                        x
                    })
                    .collect()
            })
            .collect();
        let expected = 80_000.0 * (1.0 - phi) / (1.0 + phi);
        let ess = effective_sample_size(&chains);
        assert!((ess / expected - 1.0).abs() < 0.2, "ess {ess} vs {expected}");
    }

    #[test]
    fn shifted_chains_fail_rhat() {
        let mut c = iid(4, 1000, 3);
        for x in &mut c[0] {
            *x += 3.0;
        }
        assert!(split_rhat(&c) > 1.1);
    }

    #[test]
    fn kde_of_standard_normal_at_zero() {
        let c = iid(1, 20_000, 4).remove(0);
        let d = kde_at(&c, 0.0);
        let exact = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        assert!((d - exact).abs() < 0.02, "{d}");
    }

    #[test]
    fn quantile_interpolates() {
        let s = [0.0, 1.0, 2.0, 3.0];
        assert_eq!(quantile(&s, 0.5), 1.5);
        assert_eq!(quantile(&s, 1.0), 3.0);
    }
}
