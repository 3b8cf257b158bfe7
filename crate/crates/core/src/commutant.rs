//! Coefficient identities for the commutant of `u + v` (and `u + v^k`).
//!
//! For `x = Σ α_{m,n} uᵐvⁿ`, `x` commutes with `u + v` iff
//! `α_{m−1,n}(1 − e(nθ)) = α_{m,n−1}(1 − e(mθ))` for all `m, n`, and with `u + v^k` iff
//! `α_{m−1,n}(1 − e(nθ)) = α_{m,n−k}(1 − e(kmθ))`, where `e(t) = e^{2πit}`.
//! All "for all" statements are checked on a finite rectangular window.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ncpoly::{cis, NCPolynomial};
use crate::theta::Theta;

/// Index rectangle `[m_min, m_max] × [n_min, n_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Window {
    pub m_min: i64,
    pub m_max: i64,
    pub n_min: i64,
    pub n_max: i64,
}

impl Window {
    pub fn square(m: i64) -> Self {
        Self { m_min: -m, m_max: m, n_min: -m, n_max: m }
    }

    pub fn contains(&self, m: i64, n: i64) -> bool {
        (self.m_min..=self.m_max).contains(&m) && (self.n_min..=self.n_max).contains(&n)
    }
}

/// Coefficients `α_{m,n}` supported in a window; absent entries are zero.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoefficientGrid {
    pub theta: Theta,
    pub window: Window,
    #[serde(skip)]
    pub alpha: BTreeMap<(i64, i64), Complex64>,
    pub l2_bound: f64,
}

impl CoefficientGrid {
    /// Rejects entries outside the window and `Σ|α|² > l2_bound²`.
    pub fn new(theta: &Theta, window: Window, alpha: BTreeMap<(i64, i64), Complex64>, l2_bound: f64) -> Result<Self> {
        if let Some(&(m, n)) = alpha.keys().find(|&&(m, n)| !window.contains(m, n)) {
            return Err(Error::Parameter(format!("coefficient ({m},{n}) lies outside the window")));
        }
        let g = Self { theta: theta.clone(), window, alpha, l2_bound };
        if g.l2_norm() > l2_bound * (1.0 + 1e-12) {
            return Err(Error::Parameter(format!("ℓ² norm {} exceeds the bound {l2_bound}", g.l2_norm())));
        }
        Ok(g)
    }

    /// Grid whose ℓ² bound is its own norm.
    pub fn tight(theta: &Theta, window: Window, alpha: BTreeMap<(i64, i64), Complex64>) -> Result<Self> {
        let norm = alpha.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        Self::new(theta, window, alpha, norm)
    }

    /// Coefficients of `p` evaluated at its angle, restricted to the window.
    pub fn from_poly(p: &NCPolynomial, window: Window) -> Result<Self> {
        let alpha = p
            .terms()
            .filter(|((m, n), _)| window.contains(*m, *n))
            .map(|(&(m, n), c)| ((m, n), c.eval(p.theta())))
            .collect();
        Self::tight(p.theta(), window, alpha)
    }

    pub fn get(&self, m: i64, n: i64) -> Complex64 {
        self.alpha.get(&(m, n)).copied().unwrap_or_default()
    }

    pub fn l2_norm(&self) -> f64 {
        self.alpha.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }
}

fn one_minus_e(theta: &Theta, k: i64) -> Complex64 {
    Complex64::new(1.0, 0.0) - cis(theta.frac_mul(k))
}

/// Max over `(m, n)` with both `(m−1, n)` and `(m, n−k)` in the window of
/// `|α_{m−1,n}(1 − e(nθ)) − α_{m,n−k}(1 − e(kmθ))|`.
pub fn uvk_recurrence_residual(grid: &CoefficientGrid, k: i64) -> Result<f64> {
    if k < 1 {
        return Err(Error::Parameter(format!("k = {k} must be at least 1")));
    }
    let w = grid.window;
    let th = &grid.theta;
    let mut worst = 0.0f64;
    for m in w.m_min + 1..=w.m_max {
        for n in w.n_min + k..=w.n_max {
            let lhs = grid.get(m - 1, n) * one_minus_e(th, n);
            let rhs = grid.get(m, n - k) * one_minus_e(th, k * m);
            worst = worst.max((lhs - rhs).norm());
        }
    }
    Ok(worst)
}

/// Residual of the `u + v` commutation recurrence over the window.
pub fn recurrence_residual(grid: &CoefficientGrid) -> f64 {
    uvk_recurrence_residual(grid, 1).unwrap_or(f64::NAN)
}

/// Grid on the antidiagonal `m + n = −k`, `m ≥ 0`, determined by `α_{0,−k}` through
/// `α_{m,−k−m} = α_{m−1,−k−m+1}(1 − e(−(k+m−1)θ)) / (1 − e(mθ))`.
pub fn propagate_antidiagonal(theta: &Theta, k: i64, alpha0: Complex64, window_m: i64) -> Result<CoefficientGrid> {
    if k < 1 || window_m < k {
        return Err(Error::Parameter(format!("need 1 ≤ k ≤ M, got k = {k}, M = {window_m}")));
    }
    let window = Window::square(window_m);
    let mut alpha = BTreeMap::new();
    let mut a = alpha0;
    let mut m = 0;
    while window.contains(m, -k - m) {
        alpha.insert((m, -k - m), a);
        m += 1;
        a = a * one_minus_e(theta, -(k + m - 1)) / one_minus_e(theta, m);
    }
    CoefficientGrid::tight(theta, window, alpha)
}

/// Quadrant grid `α_{m,k−m}` (`0 ≤ m ≤ k ≤ K`) from the top row `α_{0,k} = λ_k` through
/// `α_{m,k−m} = α_{m−1,k−m+1}(1 − e((k−m+1)θ)) / (1 − e(mθ))`.
pub fn propagate_quadrant(theta: &Theta, lambdas: &[Complex64]) -> Result<CoefficientGrid> {
    let kmax = lambdas.len() as i64 - 1;
    let window = Window { m_min: 0, m_max: kmax.max(0), n_min: 0, n_max: kmax.max(0) };
    let mut alpha = BTreeMap::new();
    for (k, &l) in lambdas.iter().enumerate() {
        let k = k as i64;
        let mut a = l;
        alpha.insert((0, k), a);
        for m in 1..=k {
            a = a * one_minus_e(theta, k - m + 1) / one_minus_e(theta, m);
            alpha.insert((m, k - m), a);
        }
    }
    CoefficientGrid::tight(theta, window, alpha)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Reconstruction {
    /// `λ_k = α_{0,k}`.
    pub lambdas: Vec<Complex64>,
    /// Max deviation between the grid and the coefficients of `Σ λ_k (u+v)^k`.
    pub max_deviation: f64,
}

/// Reads `λ` off the top row of a quadrant grid and compares the grid with `Σ λ_k (u+v)^k`.
pub fn reconstruct(grid: &CoefficientGrid) -> Result<Reconstruction> {
    let w = grid.window;
    if w.m_min != 0 || w.n_min != 0 || w.m_max != w.n_max {
        return Err(Error::Precondition("reconstruction needs a square quadrant window".into()));
    }
    let kmax = w.n_max;
    let th = &grid.theta;
    let lambdas: Vec<Complex64> = (0..=kmax).map(|k| grid.get(0, k)).collect();
    let base = NCPolynomial::u(th).add(&NCPolynomial::v(th))?;
    let mut power = NCPolynomial::one(th);
    let mut sum = NCPolynomial::zero(th);
    for l in &lambdas {
        sum = sum.add(&power.scale(*l))?;
        power = power.mul(&base)?;
    }
    let mut worst = 0.0f64;
    for m in 0..=kmax {
        for n in 0..=kmax {
            worst = worst.max((grid.get(m, n) - sum.coefficient(m, n)).norm());
        }
    }
    Ok(Reconstruction { lambdas, max_deviation: worst })
}

/// Moduli `∏_{j=1}^{k−1} |1 − e(−(m+j)θ)| / |1 − e(jθ)|` and their values along continued-fraction denominators.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CollapseWitness {
    pub k: i64,
    pub ratios: Vec<f64>,
    /// `(q_n, ratio at m = q_n)` for denominators `q_n`, computed beyond `M` when needed.
    pub along_denominators: Vec<(i64, f64)>,
}

pub fn collapse_ratio(theta: &Theta, k: i64, m: i64) -> f64 {
    (1..k).map(|j| one_minus_e(theta, -(m + j)).norm() / one_minus_e(theta, j).norm()).product()
}

/// Continued-fraction terms used to list denominators.
pub const COLLAPSE_CF_TERMS: usize = 40;

pub fn l2_collapse_witness(theta: &Theta, k: i64, m_max: i64) -> Result<CollapseWitness> {
    if k < 1 {
        return Err(Error::Parameter(format!("k = {k} must be at least 1")));
    }
    if m_max < 10 {
        return Err(Error::Parameter(format!("M = {m_max} must be at least 10")));
    }
    let ratios = (0..=m_max).map(|m| collapse_ratio(theta, k, m)).collect();
    let mut dens: Vec<i64> = match theta.convergents(COLLAPSE_CF_TERMS) {
        Ok(c) => c.iter().map(|r| *r.denom() as i64).collect(),
        Err(Error::PrecisionExhausted { available, .. }) if available > 0 => {
            theta.convergents(available)?.iter().map(|r| *r.denom() as i64).collect()
        }
        Err(e) => return Err(e),
    };
    dens.dedup();
    let along_denominators = dens.into_iter().map(|q| (q, collapse_ratio(theta, k, q))).collect();
    Ok(CollapseWitness { k, ratios, along_denominators })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum IdempotentVerdict {
    Zero,
    Identity,
    NotIdempotent { first_failure: usize },
}

/// `σ_k = Σ_{j≤k} λ_j λ_{k−j}`.
pub fn convolution_square(lambdas: &[Complex64]) -> Vec<Complex64> {
    (0..lambdas.len()).map(|k| (0..=k).map(|j| lambdas[j] * lambdas[k - j]).sum()).collect()
}

/// Exact check of `λ_k = σ_k` for all `k ≤ K`; the only solutions are `0` and `1`.
pub fn idempotent_induction(lambdas: &[Complex64]) -> IdempotentVerdict {
    let sigma = convolution_square(lambdas);
    if let Some(k) = (0..lambdas.len()).find(|&k| lambdas[k] != sigma[k]) {
        return IdempotentVerdict::NotIdempotent { first_failure: k };
    }
    match lambdas.first() {
        Some(l) if *l == Complex64::new(1.0, 0.0) => IdempotentVerdict::Identity,
        _ => IdempotentVerdict::Zero,
    }
}

/// All solutions of `λ_k = σ_k`, `k ≤ K`: `λ₀` solves `λ₀² = λ₀`, and each later
/// `λ_k` solves the linear equation `(1 − 2λ₀)λ_k = Σ_{0<j<k} λ_j λ_{k−j}`.
pub fn enumerate_idempotent_solutions(k_max: usize) -> Vec<Vec<Complex64>> {
    let mut out = Vec::new();
    for l0 in [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)] {
        let mut l = vec![l0];
        let lead = Complex64::new(1.0, 0.0) - l0 * 2.0;
        for k in 1..=k_max {
            let mid: Complex64 = (1..k).map(|j| l[j] * l[k - j]).sum();
            l.push(mid / lead);
        }
        out.push(l);
    }
    out
}

/// `f_{s,r,k}(z) = ∏_{t=1}^{s} (1 − z^{kt+r}) / (1 − z^{kt})` in log-modulus and argument form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FsrkValue {
    pub s: i64,
    pub log_modulus: f64,
    /// Accumulated argument in radians, not reduced.
    pub winding: f64,
    pub value: Complex64,
}

/// Closest approach `|1 − z^{kt}|` treated as a pole.
pub const POLE_TOL: f64 = 1e-12;

pub fn fsrk_eval(z: Complex64, s: i64, r: i64, k: i64) -> Result<FsrkValue> {
    if k < 2 {
        return Err(Error::Parameter(format!("k = {k} must be at least 2")));
    }
    if r.rem_euclid(k) == 0 {
        return Err(Error::Parameter(format!("r = {r} must not be divisible by k = {k}")));
    }
    if s < 0 {
        return Err(Error::Parameter("s must be ≥ 0".into()));
    }
    if (z.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::Parameter(format!("|z| = {} is not 1", z.norm())));
    }
    let turn = z.arg() / std::f64::consts::TAU;
    let e = |n: i64| cis((n as f64 * turn).rem_euclid(1.0));
    let one = Complex64::new(1.0, 0.0);
    let (mut lm, mut wind) = (0.0, 0.0);
    for t in 1..=s {
        let den = one - e(k * t);
        if den.norm() < POLE_TOL {
            return Err(Error::Pole { t: t as u64 });
        }
        let num = one - e(k * t + r);
        lm += num.norm().ln() - den.norm().ln();
        wind += num.arg() - den.arg();
    }
    Ok(FsrkValue { s, log_modulus: lm, winding: wind, value: Complex64::from_polar(lm.exp(), wind) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn powers_of_u_plus_v_commute() {
        let th = Theta::golden();
        let p = NCPolynomial::u(&th).add(&NCPolynomial::v(&th)).unwrap().pow(3).unwrap();
        let g = CoefficientGrid::from_poly(&p, Window::square(6)).unwrap();
        assert!(recurrence_residual(&g) <= 1e-12);
    }

    #[test]
    fn antidiagonal_constant_modulus() {
        let th = Theta::golden();
        let g = propagate_antidiagonal(&th, 1, c(1.0), 60).unwrap();
        assert!(recurrence_residual(&g) <= 1e-12);
        for m in 0..=50 {
            assert!((g.get(m, -1 - m).norm() - 1.0).abs() <= 1e-12, "m={m}");
        }
    }

    #[test]
    fn random_grid_fails() {
        let th = Theta::golden();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let alpha = (-3..=3)
            .flat_map(|m| (-3..=3).map(move |n| (m, n)))
            .map(|i| (i, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))))
            .collect();
        let g = CoefficientGrid::tight(&th, Window::square(3), alpha).unwrap();
        assert!(recurrence_residual(&g) > 0.1);
    }

    #[test]
    fn grid_validation() {
        let th = Theta::golden();
        let alpha: BTreeMap<_, _> = [((5, 0), c(1.0))].into_iter().collect();
        assert!(CoefficientGrid::tight(&th, Window::square(3), alpha).is_err());
        let alpha: BTreeMap<_, _> = [((1, 0), c(2.0))].into_iter().collect();
        assert!(CoefficientGrid::new(&th, Window::square(3), alpha, 1.0).is_err());
    }

    #[test]
    fn uvk_variants() {
        let th = Theta::golden();
        let p = NCPolynomial::u(&th).add(&NCPolynomial::v(&th)).unwrap().pow(2).unwrap();
        let g = CoefficientGrid::from_poly(&p, Window::square(5)).unwrap();
        assert_eq!(uvk_recurrence_residual(&g, 1).unwrap(), recurrence_residual(&g));
        let v2 = NCPolynomial::v(&th).pow(2).unwrap();
        let q = NCPolynomial::u(&th).add(&v2).unwrap().pow(2).unwrap();
        let g2 = CoefficientGrid::from_poly(&q, Window::square(6)).unwrap();
        assert!(uvk_recurrence_residual(&g2, 2).unwrap() <= 1e-12);
        assert!(uvk_recurrence_residual(&g2, 1).unwrap() > 0.1);
        assert!(uvk_recurrence_residual(&g2, 0).is_err());
    }

    #[test]
    fn quadrant_reconstruction() {
        let th = Theta::golden();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let l: Vec<Complex64> = (0..=10).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let g = propagate_quadrant(&th, &l).unwrap();
        assert!(recurrence_residual(&g) <= 1e-12);
        let r = reconstruct(&g).unwrap();
        assert!(r.max_deviation <= 1e-10, "{}", r.max_deviation);
        assert_eq!(r.lambdas, l);
    }

    #[test]
    fn collapse_examples() {
        let th = Theta::golden();
        let w = l2_collapse_witness(&th, 1, 100).unwrap();
        assert!(w.ratios.iter().all(|&r| r == 1.0));
        let w = l2_collapse_witness(&th, 3, 100).unwrap();
        let (q, r) = *w.along_denominators.iter().find(|(q, _)| *q == 6765).unwrap();
        assert_eq!(q, 6765);
        assert!((r - 1.0).abs() <= 1e-3, "{r}");
        let bound = 2.0 / one_minus_e(&th, 1).norm();
        let w = l2_collapse_witness(&th, 2, 200).unwrap();
        for (m, &r) in w.ratios.iter().enumerate() {
            let want = one_minus_e(&th, -(m as i64 + 1)).norm() / one_minus_e(&th, 1).norm();
            assert!((r - want).abs() < 1e-15 && r > 0.0 && r <= bound);
        }
        assert!(l2_collapse_witness(&th, 3, 9).is_err());
    }

    #[test]
    fn idempotent_examples() {
        assert_eq!(idempotent_induction(&vec![c(0.0); 51]), IdempotentVerdict::Zero);
        let mut id = vec![c(0.0); 51];
        id[0] = c(1.0);
        assert_eq!(idempotent_induction(&id), IdempotentVerdict::Identity);
        let mut half = vec![c(0.0); 51];
        half[1] = c(0.5);
        assert_eq!(idempotent_induction(&half), IdempotentVerdict::NotIdempotent { first_failure: 1 });
        let sols = enumerate_idempotent_solutions(50);
        assert_eq!(sols.len(), 2);
        assert_eq!(idempotent_induction(&sols[0]), IdempotentVerdict::Zero);
        assert_eq!(idempotent_induction(&sols[1]), IdempotentVerdict::Identity);
    }

    #[test]
    fn fsrk_examples() {
        let z = cis(Theta::golden().value());
        assert_eq!(fsrk_eval(z, 0, 1, 2).unwrap().value, c(1.0));
        let v = fsrk_eval(z, 50, 1, 2).unwrap();
        // direct product oracle
        let mut prod = c(1.0);
        for t in 1..=50 {
            prod *= (c(1.0) - z.powi(2 * t + 1)) / (c(1.0) - z.powi(2 * t));
        }
        assert!((v.value - prod).norm() <= 1e-9 * prod.norm());
        assert!(v.log_modulus.is_finite() && v.value.norm() > 0.0);
        assert!(matches!(fsrk_eval(cis(0.25), 5, 1, 2), Err(Error::Pole { t: 2 })));
        assert!(fsrk_eval(z, 5, 2, 2).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn convolution_matches_squaring(l in proptest::collection::vec(-3i32..=3, 6)) {
            let th = Theta::golden();
            let l: Vec<Complex64> = l.into_iter().map(|x| c(x as f64)).collect();
            let base = NCPolynomial::u(&th).add(&NCPolynomial::v(&th)).unwrap();
            let mut x = NCPolynomial::zero(&th);
            let mut p = NCPolynomial::one(&th);
            for lk in &l {
                x = x.add(&p.scale(*lk)).unwrap();
                p = p.mul(&base).unwrap();
            }
            let sq = x.mul(&x).unwrap();
            let sigma = convolution_square(&l);
            for (k, s) in sigma.iter().enumerate() {
                prop_assert_eq!(sq.coefficient(0, k as i64), *s);
            }
        }
    }
}
