//! Small running-statistics helpers shared by the simulator and its tests.

use statrs::distribution::{ContinuousCDF, StudentsT};

/// Welford running mean/variance accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Welford {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn new() -> Self {
        Welford::default()
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            f64::NAN
        } else {
            self.mean
        }
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            f64::NAN
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }
}

/// Mean, standard error and a two-sided Student-t confidence interval over a set of
/// replication-level values.
#[derive(Debug, Clone, Copy)]
pub struct ReplicationStats {
    pub mean: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

pub fn replication_stats(values: &[f64], confidence: f64) -> ReplicationStats {
    let r = values.len();
    let mean = values.iter().sum::<f64>() / r as f64;
    if r < 2 {
        return ReplicationStats {
            mean,
            std_error: f64::NAN,
            ci_low: f64::NAN,
            ci_high: f64::NAN,
        };
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (r - 1) as f64;
    let std_error = (var / r as f64).sqrt();
    let t = StudentsT::new(0.0, 1.0, (r - 1) as f64)
        .map(|d| d.inverse_cdf(0.5 + confidence / 2.0))
        .unwrap_or(f64::NAN);
    ReplicationStats {
        mean,
        std_error,
        ci_low: mean - t * std_error,
        ci_high: mean + t * std_error,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn welford_matches_direct_formulas() {
        let xs = [2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0];
        let mut w = Welford::new();
        for x in xs {
            w.push(x);
        }
        assert_eq!(w.mean(), 5.0);
        let direct = xs.iter().map(|x| (x - 5.0) * (x - 5.0)).sum::<f64>() / 7.0;
        assert!((w.variance() - direct).abs() < 1e-12);
    }

    #[test]
    fn replication_interval_brackets_the_mean() {
        let vs = [1.0, 2.0, 3.0, 4.0, 5.0];
        let s = replication_stats(&vs, 0.95);
        assert_eq!(s.mean, 3.0);
        assert!(s.ci_low < 3.0 && s.ci_high > 3.0);
        // t(0.975, 4) = 2.776..., se = sqrt(2.5/5)
        let expected_half = 2.7764451 * (2.5f64 / 5.0).sqrt();
        assert!((s.ci_high - 3.0 - expected_half).abs() < 1e-5);
    }
}
