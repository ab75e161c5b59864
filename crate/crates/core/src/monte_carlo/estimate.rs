/// Monte Carlo point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub point: f64,
    /// Sample standard deviation over `sqrt(n_samples)`; zero for a single
    /// sample.
    pub stderr: f64,
    pub n_samples: usize,
}

impl McEstimate {
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        if n == 0 {
            return Self { point: f64::NAN, stderr: f64::NAN, n_samples: 0 };
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        if n == 1 {
            return Self { point: mean, stderr: 0.0, n_samples: 1 };
        }
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        Self { point: mean, stderr: (var / n as f64).sqrt(), n_samples: n }
    }

    /// Estimate of a probability from `hits` successes out of `n` trials.
    pub fn from_counts(hits: usize, n: usize) -> Self {
        if n == 0 {
            return Self { point: f64::NAN, stderr: f64::NAN, n_samples: 0 };
        }
        let mean = hits as f64 / n as f64;
        if n == 1 {
            return Self { point: mean, stderr: 0.0, n_samples: 1 };
        }
        // Bernoulli sample variance with the n − 1 denominator.
        let var = mean * (1.0 - mean) * n as f64 / (n - 1) as f64;
        Self { point: mean, stderr: (var / n as f64).sqrt(), n_samples: n }
    }

    /// `|point − value| ≤ k · stderr`.
    pub fn agrees_with(&self, value: f64, k: f64) -> bool {
        (self.point - value).abs() <= k * self.stderr
    }
}
