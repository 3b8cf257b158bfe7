//! Symmetric tridiagonal eigenvalues by Sturm-sequence bisection.

use rayon::prelude::*;

/// Number of eigenvalues strictly below `x`.
///
/// `off2[i] = e_i²` couples sites `i` and `i+1`; `pivmin` replaces vanishing pivots.
pub fn sturm_count(diag: &[f64], off2: &[f64], x: f64, pivmin: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q.abs() < pivmin {
        q = -pivmin;
    }
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        q = diag[i] - x - off2[i - 1] / q;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Gershgorin enclosure of the spectrum.
pub fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    (lo, hi)
}

/// All eigenvalues, ascending, each to absolute accuracy `tol`.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64], tol: f64) -> Vec<f64> {
    let n = diag.len();
    if n == 0 {
        return Vec::new();
    }
    assert_eq!(off.len() + 1, n, "off-diagonal length must be n − 1");
    let off2: Vec<f64> = off.iter().map(|e| e * e).collect();
    let (lo, hi) = gershgorin(diag, off);
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    let pivmin = f64::MIN_POSITIVE.max(off2.iter().cloned().fold(0.0, f64::max) * f64::MIN_POSITIVE) * 1e2;
    let pad = 2.0 * f64::EPSILON * scale + tol;
    let (lo, hi) = (lo - pad, hi + pad);
    (0..n)
        .into_par_iter()
        .map(|k| {
            let (mut a, mut b) = (lo, hi);
            while b - a > tol && b - a > 4.0 * f64::EPSILON * scale {
                let mid = 0.5 * (a + b);
                if sturm_count(diag, &off2, mid, pivmin) > k {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}

/// Normalized eigenvector for an isolated eigenvalue by inverse iteration.
pub fn eigenvector(diag: &[f64], off: &[f64], lambda: f64) -> Vec<f64> {
    let n = diag.len();
    if n == 1 {
        return vec![1.0];
    }
    let (lo, hi) = gershgorin(diag, off);
    let shift = lambda + 1e-13 * lo.abs().max(hi.abs()).max(1.0);
    let lu = TridiagonalLu::new(diag, off, shift);
    // deterministic, non-symmetric start vector
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 7919) % 104729) as f64 / 104729.0).collect();
    for _ in 0..3 {
        x = lu.solve(&x);
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= norm);
    }
    x
}

/// LU factorization of `T − σI` with partial pivoting; `U` has two superdiagonals.
struct TridiagonalLu {
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    l: Vec<f64>,
    swap: Vec<bool>,
}

impl TridiagonalLu {
    fn new(diag: &[f64], off: &[f64], sigma: f64) -> Self {
        let n = diag.len();
        let tiny = f64::EPSILON * diag.iter().chain(off).fold(1.0f64, |m, v| m.max(v.abs()));
        let mut u0 = vec![0.0; n];
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        let mut l = vec![0.0; n];
        let mut swap = vec![false; n];
        // current row i holds (d, e) in columns i, i+1 after elimination
        let mut d = diag[0] - sigma;
        let mut e = off[0];
        for i in 0..n - 1 {
            // next row holds (b, c, g) in columns i, i+1, i+2
            let b = off[i];
            let c = diag[i + 1] - sigma;
            let g = if i + 2 < n { off[i + 1] } else { 0.0 };
            if b.abs() > d.abs() {
                swap[i] = true;
                u0[i] = b;
                u1[i] = c;
                u2[i] = g;
                let m = d / b;
                l[i] = m;
                d = e - m * c;
                e = -m * g;
            } else {
                if d.abs() < tiny {
                    d = tiny;
                }
                u0[i] = d;
                u1[i] = e;
                let m = b / d;
                l[i] = m;
                d = c - m * e;
                e = g;
            }
        }
        if d.abs() < tiny {
            d = tiny;
        }
        u0[n - 1] = d;
        Self { u0, u1, u2, l, swap }
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = rhs.len();
        let mut y = rhs.to_vec();
        for i in 0..n - 1 {
            if self.swap[i] {
                y.swap(i, i + 1);
            }
            y[i + 1] -= self.l[i] * y[i];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = y[i];
            if i + 1 < n {
                s -= self.u1[i] * x[i + 1];
            }
            if i + 2 < n {
                s -= self.u2[i] * x[i + 2];
            }
            x[i] = s / self.u0[i];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dense(diag: &[f64], off: &[f64]) -> DMatrix<f64> {
        let n = diag.len();
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                diag[i]
            } else if i + 1 == j {
                off[i]
            } else if j + 1 == i {
                off[j]
            } else {
                0.0
            }
        })
    }

    #[test]
    fn random_tridiagonals_match_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let diag: Vec<f64> = (0..10).map(|_| rng.random_range(-3.0..3.0)).collect();
            let off: Vec<f64> = (0..9).map(|_| rng.random_range(-2.0..2.0)).collect();
            let mut want: Vec<f64> = dense(&diag, &off).symmetric_eigenvalues().iter().cloned().collect();
            want.sort_by(f64::total_cmp);
            let got = tridiagonal_eigenvalues(&diag, &off, 1e-12);
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-8, "{g} vs {w}");
            }
            let off2: Vec<f64> = off.iter().map(|e| e * e).collect();
            for x in [-2.0, -0.3, 0.0, 1.7] {
                let c = want.iter().filter(|&&w| w < x).count();
                assert_eq!(sturm_count(&diag, &off2, x, 1e-300), c);
            }
        }
    }

    #[test]
    fn zero_couplings() {
        let got = tridiagonal_eigenvalues(&[3.0, 1.0, 2.0], &[0.0, 0.0], 1e-12);
        assert!((got[0] - 1.0).abs() < 1e-11 && (got[1] - 2.0).abs() < 1e-11 && (got[2] - 3.0).abs() < 1e-11);
    }

    #[test]
    fn inverse_iteration_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let diag: Vec<f64> = (0..60).map(|_| rng.random_range(-3.0..3.0)).collect();
        let off = vec![1.0; 59];
        let m = dense(&diag, &off);
        for ev in tridiagonal_eigenvalues(&diag, &off, 1e-13) {
            let v = nalgebra::DVector::from_vec(eigenvector(&diag, &off, ev));
            let r = (&m * &v - &v * ev).norm();
            assert!(r < 1e-8, "{ev}: {r}");
        }
    }
}
