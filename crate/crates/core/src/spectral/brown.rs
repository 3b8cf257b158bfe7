use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{orbit_offsets, pairwise_sum};
use crate::error::{Error, Result};
use crate::theta::Theta;

/// Factors multiplied before taking a logarithm; `(1+λ)^{2·CHUNK}` stays finite for λ ≤ 1e8.
const CHUNK: usize = 16;

/// Samples of `g_n(x) = ∏_{k<n}(1 + λ² + 2λ cos 2π(x+kθ))^{1/n}` for uniform `x`.
///
/// `samples` is sorted ascending, so it is also the empirical quantile function of `ν_n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BrownSample {
    pub lambda: f64,
    pub theta: Theta,
    pub n: usize,
    pub seed: u64,
    pub samples: Vec<f64>,
}

impl BrownSample {
    /// Empirical `ν_n([0, r])`.
    pub fn cdf(&self, r: f64) -> f64 {
        self.samples.partition_point(|&v| v <= r) as f64 / self.samples.len() as f64
    }

    /// Empirical `ν_n([lo, hi])`.
    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        let a = self.samples.partition_point(|&v| v < lo);
        let b = self.samples.partition_point(|&v| v <= hi);
        b.saturating_sub(a) as f64 / self.samples.len() as f64
    }

    /// Fraction of samples with `|g_n − c| < δ`.
    pub fn mass_near(&self, c: f64, delta: f64) -> f64 {
        self.samples.iter().filter(|&&v| (v - c).abs() < delta).count() as f64 / self.samples.len() as f64
    }

    pub fn median(&self) -> f64 {
        let m = self.samples.len();
        if m % 2 == 1 {
            self.samples[m / 2]
        } else {
            0.5 * (self.samples[m / 2 - 1] + self.samples[m / 2])
        }
    }

    /// `(radius², cumulative mass)` at each sample.
    pub fn cdf_points(&self) -> Vec<(f64, f64)> {
        let m = self.samples.len() as f64;
        self.samples.iter().enumerate().map(|(i, &v)| (v, (i + 1) as f64 / m)).collect()
    }
}

fn log_product(lambda: f64, x: f64, rot: &[(f64, f64)]) -> f64 {
    let (c, s) = ((2.0 * PI * x).cos(), (2.0 * PI * x).sin());
    let mut logs = Vec::with_capacity(rot.len() / CHUNK + 1);
    for chunk in rot.chunks(CHUNK) {
        let mut p = 1.0;
        for &(rc, rs) in chunk {
            let re = c * rc - s * rs;
            let im = c * rs + s * rc;
            let a = 1.0 + lambda * re;
            let b = lambda * im;
            p *= a * a + b * b;
        }
        if p.is_normal() {
            logs.push(p.ln());
        } else {
            for &(rc, rs) in chunk {
                let re = c * rc - s * rs;
                let im = c * rs + s * rc;
                let a = 1.0 + lambda * re;
                let b = lambda * im;
                logs.push((a * a + b * b).ln());
            }
        }
    }
    pairwise_sum(&logs)
}

pub fn brown_sample(lambda: f64, theta: &Theta, n: usize, m_samples: usize, seed: u64) -> Result<BrownSample> {
    if n == 0 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    if m_samples < 100 {
        return Err(Error::Parameter(format!("m_samples = {m_samples} must be at least 100")));
    }
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::Parameter(format!("λ = {lambda} must be a finite number ≥ 0")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<f64> = (0..m_samples).map(|_| rng.random::<f64>()).collect();
    let rot: Vec<(f64, f64)> = orbit_offsets(theta, n)
        .into_iter()
        .map(|o| ((2.0 * PI * o).cos(), (2.0 * PI * o).sin()))
        .collect();
    let mut samples: Vec<f64> = xs
        .par_iter()
        .map(|&x| if lambda == 0.0 { 1.0 } else { (log_product(lambda, x, &rot) / n as f64).exp() })
        .collect();
    samples.sort_by(f64::total_cmp);
    Ok(BrownSample { lambda, theta: theta.clone(), n, seed, samples })
}

/// Brown measure of `u + λv`: Haar measure on the circle of radius `max(1, λ)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BrownVerdict {
    pub lambda: f64,
    pub measure: &'static str,
    pub radius: f64,
    /// `ν_n` concentrates at `radius²`.
    pub concentration_target: f64,
    pub evidence_n: usize,
    pub evidence_samples: usize,
    pub seed: u64,
    pub delta: f64,
    /// Empirical `ν_n` mass of `[(1−δ)²r², (1+δ)²r²]`.
    pub mass_near_target: f64,
}

pub const VERDICT_EVIDENCE_N: usize = 1000;
pub const VERDICT_EVIDENCE_SAMPLES: usize = 2000;

pub fn brown_measure_verdict(lambda: f64, theta: &Theta, seed: u64) -> Result<BrownVerdict> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::Parameter(format!("λ = {lambda} must be positive")));
    }
    let radius = lambda.max(1.0);
    let target = radius * radius;
    let delta = 0.1;
    let s = brown_sample(lambda, theta, VERDICT_EVIDENCE_N, VERDICT_EVIDENCE_SAMPLES, seed)?;
    let mass = s.mass_between((1.0 - delta) * (1.0 - delta) * target, (1.0 + delta) * (1.0 + delta) * target);
    Ok(BrownVerdict {
        lambda,
        measure: "haar_on_circle",
        radius,
        concentration_target: target,
        evidence_n: VERDICT_EVIDENCE_N,
        evidence_samples: VERDICT_EVIDENCE_SAMPLES,
        seed,
        delta,
        mass_near_target: mass,
    })
}
