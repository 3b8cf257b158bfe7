use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{merge_intervals, SpectrumEstimate};
use crate::error::{Error, Result};

/// Phase grid side: 16 for `q ≤ 64`, else 8.
pub fn default_phase_samples(q: i64) -> usize {
    if q <= 64 {
        16
    } else {
        8
    }
}

/// `q×q` Harper matrix: diagonal `2λ cos 2π(jp/q + β)`, unit hopping `j → j+1 mod q`,
/// boundary hop carrying `e^{ik}`.
fn harper(lambda: f64, p: i64, q: i64, k: f64, beta: f64) -> DMatrix<Complex64> {
    let n = q as usize;
    let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for j in 0..n {
        let t = ((j as i64 * p).rem_euclid(q)) as f64 / q as f64 + beta;
        m[(j, j)] += Complex64::new(2.0 * lambda * (2.0 * PI * t).cos(), 0.0);
        let hop = if j + 1 == n { Complex64::from_polar(1.0, k) } else { Complex64::new(1.0, 0.0) };
        let i = (j + 1) % n;
        m[(i, j)] += hop;
        m[(j, i)] += hop.conj();
    }
    m
}

/// Bands of the period-`q` operator: band `j` spans the `j`-th eigenvalue over
/// `k ∈ [0, π]`, `β ∈ [0, 1/(2q)]` (endpoints included, which carry the band edges).
pub fn bloch_bands(lambda: f64, p: i64, q: i64, phase_samples: usize) -> Result<SpectrumEstimate> {
    if q < 1 || num_integer::gcd(p, q) != 1 {
        return Err(Error::Parameter(format!("{p}/{q} is not a reduced fraction")));
    }
    if phase_samples < 2 {
        return Err(Error::Parameter("phase_samples must be at least 2".into()));
    }
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::Parameter(format!("λ = {lambda} must be a finite number ≥ 0")));
    }
    let s = phase_samples;
    let betas: Vec<f64> = (0..s).map(|i| i as f64 / (s - 1) as f64 / (2 * q) as f64).collect();
    let points: Vec<(f64, f64)> = (0..s)
        .flat_map(|i| betas.iter().map(move |&b| (PI * i as f64 / (s - 1) as f64, b)))
        .collect();
    let spectra: Vec<Vec<f64>> = points
        .par_iter()
        .map(|&(k, b)| {
            let mut e: Vec<f64> = harper(lambda, p, q, k, b).symmetric_eigenvalues().iter().cloned().collect();
            e.sort_by(f64::total_cmp);
            e
        })
        .collect();
    let n = q as usize;
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for e in &spectra {
        for j in 0..n {
            lo[j] = lo[j].min(e[j]);
            hi[j] = hi[j].max(e[j]);
        }
    }
    let per_band: Vec<(f64, f64)> = lo.into_iter().zip(hi).collect();
    Ok(SpectrumEstimate {
        mode: "bloch".into(),
        size: n,
        betas,
        eigenvalues: per_band.iter().flat_map(|&(a, b)| [a, b]).collect(),
        bands: per_band,
    })
}

/// Lebesgue measure of the union of the bands.
pub fn band_measure(est: &SpectrumEstimate) -> f64 {
    merge_intervals(est.bands.clone()).iter().map(|(a, b)| b - a).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ButterflyRow {
    pub p: i64,
    pub q: i64,
    pub band_index: usize,
    pub e_lo: f64,
    pub e_hi: f64,
}

/// Bands for every reduced `p/q ∈ [0, 1)` with `q ≤ q_max`, ordered by `(q, p, band)`.
pub fn butterfly_dataset(lambda: f64, q_max: i64) -> Result<Vec<ButterflyRow>> {
    if q_max < 2 {
        return Err(Error::Parameter(format!("q_max = {q_max} must be at least 2")));
    }
    let fractions: Vec<(i64, i64)> = (1..=q_max)
        .flat_map(|q| (0..q).filter(move |&p| num_integer::gcd(p, q) == 1).map(move |p| (p, q)))
        .collect();
    let bands = fractions
        .par_iter()
        .map(|&(p, q)| bloch_bands(lambda, p, q, default_phase_samples(q)).map(|b| (p, q, b.bands)))
        .collect::<Result<Vec<_>>>()?;
    Ok(bands
        .into_iter()
        .flat_map(|(p, q, b)| {
            b.into_iter()
                .enumerate()
                .map(move |(i, (lo, hi))| ButterflyRow { p, q, band_index: i, e_lo: lo, e_hi: hi })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q1_band() {
        let b = bloch_bands(0.0, 0, 1, 16).unwrap();
        assert!((b.bands[0].0 + 2.0).abs() < 1e-12 && (b.bands[0].1 - 2.0).abs() < 1e-12);
        let b = bloch_bands(0.7, 0, 1, 16).unwrap();
        assert!((b.bands[0].0 + 3.4).abs() < 1e-12 && (b.bands[0].1 - 3.4).abs() < 1e-12);
    }

    #[test]
    fn q2_touching_symmetric() {
        let b = bloch_bands(1.0, 1, 2, 16).unwrap();
        assert_eq!(b.bands.len(), 2);
        // closed form ±√(4cos²(k/2) + 4cos²(2πβ)) over the phase grid
        let want = 8f64.sqrt();
        assert!((b.bands[0].0 + want).abs() < 1e-10 && (b.bands[1].1 - want).abs() < 1e-10);
        assert!(b.bands[0].1.abs() < 1e-10 && b.bands[1].0.abs() < 1e-10);
    }

    #[test]
    fn q3_symmetric() {
        let b = bloch_bands(1.0, 1, 3, 16).unwrap();
        assert_eq!(b.bands.len(), 3);
        for j in 0..3 {
            let (lo, hi) = b.bands[j];
            let (mlo, mhi) = b.bands[2 - j];
            assert!((lo + mhi).abs() < 1e-8 && (hi + mlo).abs() < 1e-8);
        }
    }

    #[test]
    fn symmetric_at_lambda_one() {
        for (p, q) in [(3, 5), (8, 13), (2, 7), (3, 8)] {
            let b = bloch_bands(1.0, p, q, 16).unwrap();
            let n = b.bands.len();
            for j in 0..n {
                assert!((b.bands[j].0 + b.bands[n - 1 - j].1).abs() < 1e-8, "{p}/{q}");
            }
        }
    }

    #[test]
    fn measure_decreases_along_convergents() {
        let m: Vec<f64> =
            [(3, 5), (8, 13), (21, 34)].iter().map(|&(p, q)| band_measure(&bloch_bands(1.0, p, q, 16).unwrap())).collect();
        assert!(m.windows(2).all(|w| w[1] < w[0]), "{m:?}");
    }

    #[test]
    fn butterfly_counts() {
        let rows = butterfly_dataset(1.0, 2).unwrap();
        assert_eq!(rows.len(), 1 + 2);
        assert_eq!((rows[1].p, rows[1].q), (1, 2));
        let rows = butterfly_dataset(0.5, 6).unwrap();
        let want: usize = [1usize, 1, 2, 2, 4, 2].iter().enumerate().map(|(i, phi)| phi * (i + 1)).sum();
        assert_eq!(rows.len(), want);
        let keys: Vec<(i64, i64, usize)> = rows.iter().map(|r| (r.q, r.p, r.band_index)).collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        for r in butterfly_dataset(0.0, 5).unwrap() {
            assert!(r.e_lo >= -2.0 - 1e-9 && r.e_hi <= 2.0 + 1e-9);
        }
        assert!(butterfly_dataset(1.0, 1).is_err());
    }
}
