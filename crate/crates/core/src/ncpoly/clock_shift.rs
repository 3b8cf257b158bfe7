use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_integer::Integer;

use super::{cis_rational, NCPolynomial};
use crate::error::{Error, Result};
use crate::theta::{Rational, Theta};

/// `q×q` clock/shift pair at `θ' = p/q`: `U e_j = e_{j+1}`, `V e_j = ω^{pj} e_j`
/// with `ω = e^{2πi/q}`. The diagonal of `V` is stored as integer exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClockShiftRep {
    p: i64,
    q: i64,
    v_exp: Vec<i64>,
}

impl ClockShiftRep {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if q < 1 {
            return Err(Error::Parameter(format!("dimension q = {q} must be positive")));
        }
        if p.gcd(&q) != 1 {
            return Err(Error::Parameter(format!("gcd({p}, {q}) ≠ 1")));
        }
        let p = p.rem_euclid(q);
        Ok(Self { p, q, v_exp: (0..q).map(|j| (p * j).rem_euclid(q)).collect() })
    }

    /// Representation at the `index`-th convergent of θ.
    pub fn from_convergent(theta: &Theta, index: usize) -> Result<Self> {
        let c = theta.convergents(index + 1)?;
        let r = c[index];
        let p = i64::try_from(*r.numer()).map_err(|_| Error::Parameter("convergent too large".into()))?;
        let q = i64::try_from(*r.denom()).map_err(|_| Error::Parameter("convergent too large".into()))?;
        Self::new(p, q)
    }

    /// Representation whose denominator is the convergent denominator `q` of θ.
    pub fn at_denominator(theta: &Theta, q: i64) -> Result<Self> {
        for r in theta.convergents(60)? {
            if *r.denom() == q as i128 {
                return Self::new(*r.numer() as i64, q);
            }
            if *r.denom() > q as i128 {
                break;
            }
        }
        Err(Error::Parameter(format!("{q} is not a convergent denominator of θ = {theta}")))
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn theta_rational(&self) -> Rational {
        Rational::new(self.p, self.q)
    }

    /// Integer exponents `k_j` with `V e_j = ω^{k_j} e_j`.
    pub fn v_exponents(&self) -> &[i64] {
        &self.v_exp
    }

    /// `VU = ω^p UV`, checked on exponents: `k_{j+1} ≡ k_j + p (mod q)`.
    pub fn relation_holds_exactly(&self) -> bool {
        let q = self.q as usize;
        (0..q).all(|j| self.v_exp[(j + 1) % q] == (self.v_exp[j] + self.p).rem_euclid(self.q))
    }

    pub fn u_matrix(&self) -> DMatrix<Complex64> {
        let q = self.q as usize;
        let mut m = DMatrix::zeros(q, q);
        for j in 0..q {
            m[((j + 1) % q, j)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn v_matrix(&self) -> DMatrix<Complex64> {
        let d: Vec<Complex64> = self.v_exp.iter().map(|&k| cis_rational(Rational::new(k, self.q))).collect();
        DMatrix::from_diagonal(&DVector::from_vec(d))
    }

    /// Image of a polynomial with θ replaced by `p/q`. Phases are merged as
    /// exact rationals before any complex exponential is taken.
    pub fn evaluate(&self, poly: &NCPolynomial) -> DMatrix<Complex64> {
        let th = poly.theta().value();
        let q = self.q as usize;
        let pq = self.p as f64 / self.q as f64;
        if (th - pq).abs() * (self.q as f64).powi(2) >= 1.0 {
            log::warn!("{}/{} is not a convergent-quality approximant of θ = {th}", self.p, self.q);
        }
        let mut out = DMatrix::zeros(q, q);
        for (&(m, n), co) in poly.terms() {
            for (ph, c) in co.eval_rational(self.p, self.q) {
                for j in 0..q {
                    let row = (j as i64 + m).rem_euclid(self.q) as usize;
                    let e = ph + Rational::new((self.p * n).rem_euclid(self.q) * j as i64, self.q);
                    out[(row, j)] += c * cis_rational(e);
                }
            }
        }
        out
    }
}

/// Largest entry modulus.
pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Normalized trace `tr(M)/q`.
pub fn normalized_trace(m: &DMatrix<Complex64>) -> Complex64 {
    m.trace() / m.nrows() as f64
}

fn start_vector(n: usize, seed: usize) -> DVector<Complex64> {
    let s = seed as f64 + 1.0;
    let v = DVector::from_fn(n, |j, _| {
        let x = j as f64 + 1.0;
        Complex64::new(1.0 + (0.7548776662 * x * s).fract(), (0.5698402910 * x * s).fract() - 0.5)
    });
    let nv = v.norm();
    v / Complex64::new(nv, 0.0)
}

const MAX_ITERATIONS: usize = 200_000;
const RESTARTS: usize = 2;

/// Operator norm `‖M‖ = √λ_max(M*M)` by power iteration, to relative error `tol`.
///
/// Convergence is declared once the extrapolated remaining change of the
/// Rayleigh quotient falls below `tol`; every run is repeated from a second
/// fixed start vector and the larger estimate is kept.
pub fn op_norm(m: &DMatrix<Complex64>, tol: f64) -> Result<f64> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Parameter(format!("tolerance must be positive, got {tol}")));
    }
    let n = m.ncols();
    if n == 0 || m.nrows() == 0 {
        return Ok(0.0);
    }
    let a = m.adjoint() * m;
    let mut best = 0.0f64;
    for seed in 0..RESTARTS {
        let mut x = start_vector(n, seed);
        let mut rho = 0.0f64;
        let mut prev_delta = f64::INFINITY;
        let mut converged = false;
        for _ in 0..MAX_ITERATIONS {
            let y = &a * &x;
            let new_rho = x.dotc(&y).re;
            let ny = y.norm();
            if ny == 0.0 {
                rho = 0.0;
                converged = true;
                break;
            }
            x = y / Complex64::new(ny, 0.0);
            let delta = (new_rho - rho).abs();
            rho = new_rho;
            // geometric tail: remaining change ≈ δ·r/(1−r), r = δ_k/δ_{k−1}
            let r = if prev_delta.is_finite() && prev_delta > 0.0 { (delta / prev_delta).min(0.999_999) } else { 1.0 };
            prev_delta = delta;
            let tail = if r < 1.0 { delta * r / (1.0 - r) } else { f64::INFINITY };
            if (delta <= tol * rho * 1e-3 && tail <= tol * rho * 0.5) || delta == 0.0 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergence { iterations: MAX_ITERATIONS, last: rho.max(0.0).sqrt() });
        }
        best = best.max(rho.max(0.0).sqrt());
    }
    Ok(best)
}
