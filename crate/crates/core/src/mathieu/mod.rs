//! Almost Mathieu operator
//! `(Hψ)(n) = ψ(n+1) + ψ(n−1) + 2λ cos(2π(nθ + β)) ψ(n)`:
//! Dirichlet truncations, rational Bloch bands and the butterfly.

mod bloch;
pub mod sturm;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::theta::Theta;

pub use bloch::{band_measure, bloch_bands, butterfly_dataset, default_phase_samples, ButterflyRow};

/// Absolute eigenvalue accuracy of the bisection.
pub const EIGEN_TOL: f64 = 1e-10;

/// Frequency of the potential.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AmoAngle {
    Irrational(Theta),
    Rational { p: i64, q: i64 },
}

impl AmoAngle {
    /// `frac(nθ)`.
    pub fn frac_mul(&self, n: i64) -> f64 {
        match self {
            AmoAngle::Irrational(t) => t.frac_mul(n),
            AmoAngle::Rational { p, q } => (n as i128 * *p as i128).rem_euclid(*q as i128) as f64 / *q as f64,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, AmoAngle::Rational { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AmoSpec {
    pub lambda: f64,
    pub angle: AmoAngle,
    pub beta: f64,
    /// Sites `−n..=n`.
    pub n: usize,
}

impl AmoSpec {
    pub fn new(lambda: f64, angle: AmoAngle, beta: f64, n: usize) -> Result<Self> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::Parameter(format!("λ = {lambda} must be a finite number ≥ 0")));
        }
        if let AmoAngle::Rational { p, q } = angle {
            if q < 1 || num_integer::gcd(p, q) != 1 {
                return Err(Error::Parameter(format!("{p}/{q} is not a reduced fraction")));
            }
        }
        if !beta.is_finite() {
            return Err(Error::Parameter("β must be finite".into()));
        }
        Ok(Self { lambda, angle, beta: beta.rem_euclid(1.0), n })
    }

    /// Diagonal `2λ cos 2π(nθ+β)` over `−n..=n`.
    pub fn diagonal(&self) -> Vec<f64> {
        let n = self.n as i64;
        (-n..=n)
            .map(|j| 2.0 * self.lambda * (2.0 * std::f64::consts::PI * (self.angle.frac_mul(j) + self.beta)).cos())
            .collect()
    }
}

/// Sorted eigenvalues plus their merged hull intervals.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumEstimate {
    pub mode: String,
    /// Truncation half-width or Bloch period.
    pub size: usize,
    pub betas: Vec<f64>,
    pub eigenvalues: Vec<f64>,
    pub bands: Vec<(f64, f64)>,
}

impl SpectrumEstimate {
    pub fn total_measure(&self) -> f64 {
        self.bands.iter().map(|(a, b)| b - a).sum()
    }
}

/// Union of closed intervals, sorted and merged.
pub fn merge_intervals(mut v: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(v.len());
    for (a, b) in v {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

pub fn truncated_spectrum(spec: &AmoSpec) -> SpectrumEstimate {
    let diag = spec.diagonal();
    let off = vec![1.0; diag.len() - 1];
    let eigenvalues = sturm::tridiagonal_eigenvalues(&diag, &off, EIGEN_TOL);
    let bands = eigenvalues.iter().map(|&e| (e, e)).collect();
    SpectrumEstimate {
        mode: "truncated".into(),
        size: spec.n,
        betas: vec![spec.beta],
        eigenvalues,
        bands: merge_intervals(bands),
    }
}

/// Share of eigenvector weight on the outer tenth at one end above which a state counts as an edge state.
pub const EDGE_WEIGHT: f64 = 0.5;
pub const EDGE_FRACTION: f64 = 0.1;

/// Those of `evs` (the truncated spectrum of `spec`) whose eigenvectors are not
/// localized at either truncation edge.
pub fn bulk_eigenvalues(spec: &AmoSpec, evs: &[f64]) -> Vec<f64> {
    let diag = spec.diagonal();
    let off = vec![1.0; diag.len() - 1];
    let len = diag.len();
    let edge = ((len as f64 * EDGE_FRACTION).ceil() as usize).max(1);
    evs.iter()
        .copied()
        .filter(|&e| {
            let v = sturm::eigenvector(&diag, &off, e);
            let left: f64 = v[..edge].iter().map(|x| x * x).sum();
            let right: f64 = v[len - edge..].iter().map(|x| x * x).sum();
            left < EDGE_WEIGHT && right < EDGE_WEIGHT
        })
        .collect()
}

/// Hausdorff distance between two sorted point sets.
pub fn hausdorff(a: &[f64], b: &[f64]) -> f64 {
    fn one_sided(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .map(|&x| {
                let i = b.partition_point(|&y| y < x);
                let mut d = f64::INFINITY;
                if i < b.len() {
                    d = d.min(b[i] - x);
                }
                if i > 0 {
                    d = d.min(x - b[i - 1]);
                }
                d
            })
            .fold(0.0, f64::max)
    }
    if a.is_empty() || b.is_empty() {
        return if a.is_empty() && b.is_empty() { 0.0 } else { f64::INFINITY };
    }
    one_sided(a, b).max(one_sided(b, a))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BetaPair {
    pub beta1: f64,
    pub beta2: f64,
    /// Distance between full truncated spectra.
    pub raw: f64,
    /// Distance after removing edge-localized states.
    pub bulk: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BetaIndependence {
    pub lambda: f64,
    pub n: usize,
    pub pairs: Vec<BetaPair>,
    /// Rational frequency: distances are not expected to shrink.
    pub flagged: bool,
}

pub fn beta_independence(lambda: f64, angle: &AmoAngle, n: usize, betas: &[f64]) -> Result<BetaIndependence> {
    if betas.len() < 2 {
        return Err(Error::Parameter("at least two β values are required".into()));
    }
    let specs = betas
        .iter()
        .map(|&b| AmoSpec::new(lambda, angle.clone(), b, n))
        .collect::<Result<Vec<_>>>()?;
    let raw: Vec<Vec<f64>> = specs.iter().map(|s| truncated_spectrum(s).eigenvalues).collect();
    let bulk: Vec<Vec<f64>> = specs.iter().zip(&raw).map(|(s, e)| bulk_eigenvalues(s, e)).collect();
    let mut pairs = Vec::new();
    for i in 0..betas.len() {
        for j in i + 1..betas.len() {
            pairs.push(BetaPair {
                beta1: betas[i],
                beta2: betas[j],
                raw: hausdorff(&raw[i], &raw[j]),
                bulk: hausdorff(&bulk[i], &bulk[j]),
            });
        }
    }
    Ok(BetaIndependence { lambda, n, pairs, flagged: angle.is_rational() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn golden() -> AmoAngle {
        AmoAngle::Irrational(Theta::golden())
    }

    #[test]
    fn free_laplacian() {
        let n = 7;
        let s = truncated_spectrum(&AmoSpec::new(0.0, golden(), 0.3, n).unwrap());
        assert_eq!(s.eigenvalues.len(), 2 * n + 1);
        for (k, e) in s.eigenvalues.iter().enumerate() {
            let want = 2.0 * ((2 * n + 1 - k) as f64 * PI / (2 * n + 2) as f64).cos();
            assert!((e - want).abs() < 1e-9);
        }
    }

    #[test]
    fn single_site() {
        let s = truncated_spectrum(&AmoSpec::new(1.3, golden(), 0.2, 0).unwrap());
        assert!((s.eigenvalues[0] - 2.6 * (2.0 * PI * 0.2).cos()).abs() < 1e-10);
    }

    #[test]
    fn norm_bound() {
        let s = truncated_spectrum(&AmoSpec::new(1.0, golden(), 0.0, 500).unwrap());
        assert_eq!(s.eigenvalues.len(), 1001);
        assert!(s.eigenvalues.iter().all(|e| e.abs() <= 4.0));
        assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn interlacing() {
        // sites −n..n+1 contain −n..n as a principal block
        let a = AmoSpec::new(1.0, golden(), 0.1, 30).unwrap();
        let small = truncated_spectrum(&a).eigenvalues;
        let mut d = a.diagonal();
        d.push(2.0 * (2.0 * PI * (golden().frac_mul(31) + 0.1)).cos());
        let big = sturm::tridiagonal_eigenvalues(&d, &vec![1.0; d.len() - 1], 1e-12);
        for i in 0..small.len() {
            assert!(big[i] <= small[i] + 1e-9 && small[i] <= big[i + 1] + 1e-9);
        }
    }

    #[test]
    fn equal_betas_distance_zero() {
        let r = beta_independence(1.0, &golden(), 40, &[0.25, 0.25]).unwrap();
        assert_eq!(r.pairs[0].raw, 0.0);
        assert_eq!(r.pairs[0].bulk, 0.0);
        assert!(beta_independence(1.0, &golden(), 40, &[0.25]).is_err());
    }

    #[test]
    fn rational_flagged() {
        let r = beta_independence(1.0, &AmoAngle::Rational { p: 1, q: 3 }, 40, &[0.0, 0.37]).unwrap();
        assert!(r.flagged);
    }

    #[test]
    fn bulk_distance_shrinks() {
        let d: Vec<f64> = [100, 200, 400]
            .iter()
            .map(|&n| beta_independence(1.0, &golden(), n, &[0.0, 0.37]).unwrap().pairs[0].bulk)
            .collect();
        assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
    }

    #[test]
    fn hausdorff_basic() {
        assert_eq!(hausdorff(&[0.0, 1.0], &[0.0, 1.5]), 0.5);
        assert_eq!(hausdorff(&[0.0], &[0.0, 2.0]), 2.0);
    }
}
