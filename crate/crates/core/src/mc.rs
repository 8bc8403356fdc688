//! Parallel sample driver with a thread-count independent reduction.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::{substream, SampleRng};

/// Pairwise summation in a fixed order. The split points depend only on the
/// slice length, so the result is bit-identical for a given input.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 16;
    if values.len() <= LEAF {
        return values.iter().fold(0.0, |acc, v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Sample mean and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleStats {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl SampleStats {
    pub fn from_values(values: &[f64]) -> SampleStats {
        let n = values.len();
        if n == 0 {
            return SampleStats { mean: 0.0, stderr: 0.0, samples: 0 };
        }
        let mean = pairwise_sum(values) / n as f64;
        if n < 2 {
            return SampleStats { mean, stderr: 0.0, samples: n };
        }
        let dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
        let var = pairwise_sum(&dev) / (n - 1) as f64;
        SampleStats { mean, stderr: (var / n as f64).sqrt(), samples: n }
    }
}

/// Evaluate `f` once per sample index on its own substream and collect the
/// values in index order.
pub fn sample_values<F>(samples: usize, seed: u64, f: F) -> Result<Vec<f64>>
where
    F: Fn(u64, &mut SampleRng) -> Result<f64> + Sync,
{
    (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i);
            f(i, &mut rng)
        })
        .collect()
}

/// Like [`sample_values`] but each sample yields a fixed-length vector
/// (several estimands sharing the same random draws).
pub fn sample_vectors<F>(samples: usize, seed: u64, width: usize, f: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(u64, &mut SampleRng) -> Result<Vec<f64>> + Sync,
{
    let rows: Vec<Vec<f64>> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i);
            f(i, &mut rng)
        })
        .collect::<Result<_>>()?;
    // transpose to one column per estimand
    let mut cols = vec![Vec::with_capacity(samples); width];
    for row in rows {
        if row.len() != width {
            return Err(Error::InvalidSamples(format!(
                "sample produced {} values, expected {width}",
                row.len()
            )));
        }
        for (c, v) in cols.iter_mut().zip(row) {
            c.push(v);
        }
    }
    Ok(cols)
}

/// Retry budget for draws rejected as non-generic.
pub const MAX_RESAMPLES: usize = 64;

/// Run `draw` until it stops reporting a degenerate flat.
pub fn with_resampling<T, F>(index: u64, rng: &mut SampleRng, mut draw: F) -> Result<T>
where
    F: FnMut(&mut SampleRng) -> Result<T>,
{
    for _ in 0..MAX_RESAMPLES {
        match draw(rng) {
            Err(Error::DegenerateFlat { .. }) => continue,
            other => return other,
        }
    }
    Err(Error::ResampleExhausted { index })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn pairwise_sum_matches_naive_on_integers() {
        let v: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 500500.0);
    }

    #[test]
    fn stats_of_constant_have_zero_stderr() {
        let s = SampleStats::from_values(&[2.0; 10]);
        assert_eq!(s.mean, 2.0);
        assert_eq!(s.stderr, 0.0);
    }

    #[test]
    fn sampling_is_independent_of_thread_count() {
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| sample_values(1000, 11, |_, rng| Ok(rng.random::<f64>())).unwrap())
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a, b);
        assert_eq!(pairwise_sum(&a).to_bits(), pairwise_sum(&b).to_bits());
    }
}
