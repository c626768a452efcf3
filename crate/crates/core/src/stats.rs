//! Plug-in estimators, standard errors and bootstrap helpers.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::rng::{Seed, StreamRng};

/// Default number of bootstrap resamples.
pub const BOOTSTRAP_RESAMPLES: usize = 1000;

/// Sample mean with its plug-in standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub count: usize,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let count = xs.len();
        if count == 0 {
            return Estimate { mean: f64::NAN, stderr: f64::NAN, count };
        }
        let n = count as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = if count > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Estimate { mean, stderr: (var / n).sqrt(), count }
    }

    pub fn exact(value: f64) -> Self {
        Estimate { mean: value, stderr: 0.0, count: 0 }
    }

    /// Is `target` within `z` standard errors of the mean?
    pub fn agrees_with(&self, target: f64, z: f64) -> bool {
        (self.mean - target).abs() <= z * self.stderr
    }

    /// Do two independent estimates agree within `z` combined standard errors?
    pub fn agrees_with_estimate(&self, other: &Estimate, z: f64) -> bool {
        (self.mean - other.mean).abs() <= z * combined_stderr(self, other)
    }
}

pub fn combined_stderr(a: &Estimate, b: &Estimate) -> f64 {
    (a.stderr.powi(2) + b.stderr.powi(2)).sqrt()
}

/// Mean and sample standard deviation.
pub fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let e = Estimate::from_samples(xs);
    (e.mean, e.stderr * (xs.len() as f64).sqrt())
}

/// Empirical histogram over outcome codes `0..num_outcomes`, normalized.
pub fn histogram(codes: impl IntoIterator<Item = usize>, num_outcomes: usize) -> Vec<f64> {
    let mut h = vec![0.0; num_outcomes];
    let mut total = 0usize;
    for c in codes {
        h[c] += 1.0;
        total += 1;
    }
    if total > 0 {
        for v in &mut h {
            *v /= total as f64;
        }
    }
    h
}

/// Total variation distance between two distributions on the same outcome set.
pub fn tv_distance(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Plug-in TV distance between two samples of outcome codes.
pub fn sample_tv(a: &[usize], b: &[usize], num_outcomes: usize) -> f64 {
    tv_distance(
        &histogram(a.iter().copied(), num_outcomes),
        &histogram(b.iter().copied(), num_outcomes),
    )
}

/// Bootstrap summary of a two-sample statistic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapSummary {
    /// Standard deviation of the statistic over resamples of each arm.
    pub stderr: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Mean of the statistic when both arms are resampled from the pooled sample.
    pub null_floor: f64,
    /// Standard deviation of the statistic under pooled resampling.
    pub null_sd: f64,
}

impl BootstrapSummary {
    /// The statistic is consistent with no difference: it lies within `z` null
    /// standard deviations of the plug-in noise floor.
    pub fn within_noise(&self, statistic: f64, z: f64) -> bool {
        statistic <= self.null_floor + z * self.null_sd
    }
}

fn resample<T: Copy>(src: &[T], len: usize, rng: &mut StreamRng, out: &mut Vec<T>) {
    out.clear();
    out.extend((0..len).map(|_| src[rng.random_range(0..src.len())]));
}

/// Nonparametric bootstrap of a statistic `stat(a, b)` of two samples.
///
/// Resample batches run in parallel on derived streams of `seed`; the result is
/// independent of the thread count.
pub fn bootstrap_two_sample<T, F>(
    a: &[T],
    b: &[T],
    resamples: usize,
    seed: Seed,
    stat: F,
) -> BootstrapSummary
where
    T: Copy + Send + Sync,
    F: Fn(&[T], &[T]) -> f64 + Sync,
{
    let pooled: Vec<T> = a.iter().chain(b).copied().collect();
    let run = |tag: &str, null: bool| -> Vec<f64> {
        let s = seed.derive(tag);
        (0..resamples)
            .into_par_iter()
            .map(|i| {
                let mut rng = s.shard_rng(i as u64);
                let (mut ra, mut rb) = (Vec::new(), Vec::new());
                if null {
                    resample(&pooled, a.len(), &mut rng, &mut ra);
                    resample(&pooled, b.len(), &mut rng, &mut rb);
                } else {
                    resample(a, a.len(), &mut rng, &mut ra);
                    resample(b, b.len(), &mut rng, &mut rb);
                }
                stat(&ra, &rb)
            })
            .collect()
    };
    let mut boot = run("bootstrap", false);
    let null = run("bootstrap-null", true);
    let (_, stderr) = mean_sd(&boot);
    let (null_floor, null_sd) = mean_sd(&null);
    boot.sort_by(f64::total_cmp);
    let q = |p: f64| boot[((p * (boot.len() - 1) as f64).round() as usize).min(boot.len() - 1)];
    BootstrapSummary { stderr, ci_low: q(0.025), ci_high: q(0.975), null_floor, null_sd }
}

/// Two-sample Kolmogorov–Smirnov statistic and its asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = (na * nb / (na + nb)).sqrt();
    let lambda = (ne + 0.12 + 0.11 / ne) * d;
    if lambda < 0.3 {
        return (d, 1.0);
    }
    let mut p = 0.0;
    for k in 1..=100 {
        let term = 2.0 * (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        p += if k % 2 == 1 { term } else { -term };
        if term < 1e-12 {
            break;
        }
    }
    (d, p.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimate_of_constant_has_zero_stderr() {
        let e = Estimate::from_samples(&[2.0; 10]);
        assert_eq!(e.mean, 2.0);
        assert_eq!(e.stderr, 0.0);
    }

    #[test]
    fn ks_separates_shifted_samples() {
        let a: Vec<f64> = (0..500).map(|i| i as f64 / 500.0).collect();
        let b: Vec<f64> = a.iter().map(|x| x + 0.002).collect();
        assert!(ks_two_sample(&a, &b).1 > 0.5);
        let c: Vec<f64> = a.iter().map(|x| x + 0.3).collect();
        let (d, p) = ks_two_sample(&a, &c);
        assert!((d - 0.3).abs() < 0.01 && p < 1e-10);
    }

    #[test]
    fn tv_of_disjoint_supports_is_one() {
        assert_eq!(sample_tv(&[0, 0, 0], &[1, 1], 2), 1.0);
        assert_eq!(sample_tv(&[0, 1], &[1, 0], 2), 0.0);
    }

    #[test]
    fn bootstrap_null_floor_covers_identical_arms() {
        let a: Vec<usize> = (0..2000).map(|i| i % 4).collect();
        let b: Vec<usize> = (0..2000).map(|i| (i * 7 + 1) % 4).collect();
        let tv = sample_tv(&a, &b, 4);
        let s = bootstrap_two_sample(&a, &b, 200, Seed(3), |x, y| sample_tv(x, y, 4));
        assert!(s.within_noise(tv, 3.0));
        assert!(s.null_floor > 0.0);
    }
}
