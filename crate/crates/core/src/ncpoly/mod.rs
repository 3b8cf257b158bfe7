//! Laurent polynomials in `u, v` with `vu = e^{2πiθ} uv`, kept in the normal
//! form `Σ c_{m,n} u^m v^n`.
//!
//! Each coefficient is a formal sum `Σ c_φ e^{2πiφ}` over exact phases
//! `φ = a + bθ`, so identities such as `τ(PQ) = τ(QP)` hold term by term
//! rather than up to rounding.

mod clock_shift;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_traits::Zero;

pub use clock_shift::{max_abs, normalized_trace, op_norm, ClockShiftRep};

use crate::error::{Error, Result};
use crate::theta::{parse_rational, Rational, Theta};

/// Stored-term ceiling for products.
pub const MAX_TERMS: usize = 1_000_000;

/// Exact phase `turns + theta·θ` (mod 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Phase {
    turns: Rational,
    theta: i64,
}

impl Phase {
    pub const ZERO: Phase = Phase { turns: Rational::new_raw(0, 1), theta: 0 };

    pub fn new(turns: Rational, theta: i64) -> Self {
        Self { turns: turns - turns.floor(), theta }
    }

    pub fn turns(&self) -> Rational {
        self.turns
    }

    pub fn theta_coeff(&self) -> i64 {
        self.theta
    }

    pub fn add(&self, o: &Phase) -> Phase {
        Phase::new(self.turns + o.turns, self.theta + o.theta)
    }

    pub fn neg(&self) -> Phase {
        Phase::new(-self.turns, -self.theta)
    }

    /// `e^{2πiφ}` at the given θ.
    pub fn eval(&self, theta: &Theta) -> Complex64 {
        cis(theta.frac_affine(self.turns, self.theta))
    }

    /// Value in turns when θ is replaced by the rational `p/q`.
    pub fn at_rational(&self, p: i64, q: i64) -> Rational {
        let r = self.turns + Rational::new(self.theta * p, q);
        r - r.floor()
    }
}

/// `e^{2πit}`.
pub fn cis(t: f64) -> Complex64 {
    let (s, c) = (2.0 * std::f64::consts::PI * t).sin_cos();
    Complex64::new(c, s)
}

/// `e^{2πi r}` for rational `r`, exact at multiples of 1/4.
pub fn cis_rational(r: Rational) -> Complex64 {
    let r = r - r.floor();
    let (n, d) = (*r.numer(), *r.denom());
    match (4 * n).checked_rem(d) {
        Some(0) => match 4 * n / d {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        },
        _ => cis(n as f64 / d as f64),
    }
}

/// Formal coefficient `Σ c_φ e^{2πiφ}`; never stores a zero `c_φ`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Coeff(BTreeMap<Phase, Complex64>);

impl Coeff {
    pub fn scalar(c: Complex64) -> Self {
        let mut out = Coeff::default();
        out.add_term(Phase::ZERO, c);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Phase, &Complex64)> {
        self.0.iter()
    }

    pub fn add_term(&mut self, ph: Phase, c: Complex64) {
        if c.is_zero() {
            return;
        }
        let e = self.0.entry(ph).or_insert_with(Complex64::zero);
        *e += c;
        if e.is_zero() {
            self.0.remove(&ph);
        }
    }

    pub fn add_assign(&mut self, o: &Coeff) {
        for (ph, c) in &o.0 {
            self.add_term(*ph, *c);
        }
    }

    /// Numeric value at θ.
    pub fn eval(&self, theta: &Theta) -> Complex64 {
        self.0.iter().map(|(ph, c)| c * ph.eval(theta)).sum()
    }

    /// Value with θ replaced by `p/q`, buckets merged exactly by rational phase first.
    pub fn eval_rational(&self, p: i64, q: i64) -> BTreeMap<Rational, Complex64> {
        let mut out: BTreeMap<Rational, Complex64> = BTreeMap::new();
        for (ph, c) in &self.0 {
            *out.entry(ph.at_rational(p, q)).or_insert_with(Complex64::zero) += c;
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    fn mul(&self, o: &Coeff, extra: Phase) -> Coeff {
        let mut out = Coeff::default();
        for (pa, ca) in &self.0 {
            for (pb, cb) in &o.0 {
                out.add_term(pa.add(pb).add(&extra), ca * cb);
            }
        }
        out
    }

    fn conj_shift(&self, extra: Phase) -> Coeff {
        Coeff(self.0.iter().map(|(ph, c)| (ph.neg().add(&extra), c.conj())).collect())
    }

    fn scale(&self, c: Complex64, ph: Phase) -> Coeff {
        let mut out = Coeff::default();
        for (p0, c0) in &self.0 {
            out.add_term(p0.add(&ph), c0 * c);
        }
        out
    }
}

/// `Σ c_{m,n} u^m v^n` in canonical form (no zero coefficients).
#[derive(Clone, Debug, PartialEq)]
pub struct NCPolynomial {
    theta: Theta,
    terms: BTreeMap<(i64, i64), Coeff>,
}

impl NCPolynomial {
    pub fn zero(theta: &Theta) -> Self {
        Self { theta: theta.clone(), terms: BTreeMap::new() }
    }

    pub fn one(theta: &Theta) -> Self {
        Self::monomial(theta, 0, 0, Complex64::new(1.0, 0.0))
    }

    /// `c·u^m v^n`.
    pub fn monomial(theta: &Theta, m: i64, n: i64, c: Complex64) -> Self {
        let mut p = Self::zero(theta);
        p.add_term(m, n, Phase::ZERO, c);
        p
    }

    /// `c·e^{2πiφ}·u^m v^n`.
    pub fn monomial_phase(theta: &Theta, m: i64, n: i64, ph: Phase, c: Complex64) -> Self {
        let mut p = Self::zero(theta);
        p.add_term(m, n, ph, c);
        p
    }

    pub fn u(theta: &Theta) -> Self {
        Self::monomial(theta, 1, 0, Complex64::new(1.0, 0.0))
    }

    pub fn v(theta: &Theta) -> Self {
        Self::monomial(theta, 0, 1, Complex64::new(1.0, 0.0))
    }

    /// Builds `Σ c·u^m v^n` from plain complex coefficients.
    pub fn from_terms(theta: &Theta, terms: impl IntoIterator<Item = ((i64, i64), Complex64)>) -> Self {
        let mut p = Self::zero(theta);
        for ((m, n), c) in terms {
            p.add_term(m, n, Phase::ZERO, c);
        }
        p
    }

    pub fn theta(&self) -> &Theta {
        &self.theta
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of distinct monomials.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of stored (monomial, phase) pairs.
    pub fn stored_terms(&self) -> usize {
        self.terms.values().map(Coeff::len).sum()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i64, i64), &Coeff)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, m: i64, n: i64, ph: Phase, c: Complex64) {
        let e = self.terms.entry((m, n)).or_default();
        e.add_term(ph, c);
        if e.is_zero() {
            self.terms.remove(&(m, n));
        }
    }

    fn add_coeff(&mut self, key: (i64, i64), c: &Coeff) {
        let e = self.terms.entry(key).or_default();
        e.add_assign(c);
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    /// Formal coefficient of `u^m v^n`.
    pub fn coeff(&self, m: i64, n: i64) -> Option<&Coeff> {
        self.terms.get(&(m, n))
    }

    /// Numeric coefficient of `u^m v^n` at θ.
    pub fn coefficient(&self, m: i64, n: i64) -> Complex64 {
        self.coeff(m, n).map_or(Complex64::zero(), |c| c.eval(&self.theta))
    }

    fn check_theta(&self, o: &Self) -> Result<()> {
        if self.theta != o.theta {
            return Err(Error::Parameter(format!(
                "polynomials over different θ ({} vs {})",
                self.theta, o.theta
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_theta(o)?;
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_coeff(*k, c);
        }
        Ok(out)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.scale_phase(c, Phase::ZERO)
    }

    /// Multiplies by `c·e^{2πiφ}`.
    pub fn scale_phase(&self, c: Complex64, ph: Phase) -> Self {
        let mut out = Self::zero(&self.theta);
        for (k, co) in &self.terms {
            let s = co.scale(c, ph);
            if !s.is_zero() {
                out.terms.insert(*k, s);
            }
        }
        out
    }

    /// Product in normal form: `(u^m v^n)(u^{m'} v^{n'}) = e^{2πiθ n m'} u^{m+m'} v^{n+n'}`.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check_theta(o)?;
        let mut out = Self::zero(&self.theta);
        let mut stored = 0usize;
        for (&(m, n), ca) in &self.terms {
            for (&(m2, n2), cb) in &o.terms {
                let extra = Phase::new(Rational::zero(), n * m2);
                let prod = ca.mul(cb, extra);
                let key = (m + m2, n + n2);
                let before = out.terms.get(&key).map_or(0, Coeff::len);
                out.add_coeff(key, &prod);
                let after = out.terms.get(&key).map_or(0, Coeff::len);
                stored = stored + after - before;
                if stored > MAX_TERMS {
                    return Err(Error::TooManyTerms(stored));
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut out = Self::one(&self.theta);
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// `(c u^m v^n)* = c̄ e^{2πiθ mn} u^{-m} v^{-n}`.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(&self.theta);
        for (&(m, n), c) in &self.terms {
            out.terms.insert((-m, -n), c.conj_shift(Phase::new(Rational::zero(), m * n)));
        }
        out
    }

    /// Canonical trace: the coefficient of `1`.
    pub fn trace(&self) -> Complex64 {
        self.coefficient(0, 0)
    }

    /// Trace as a formal phase sum.
    pub fn trace_formal(&self) -> Coeff {
        self.coeff(0, 0).cloned().unwrap_or_default()
    }

    /// Conditional expectation onto `C*(v)`: keeps the `u`-degree-0 part.
    pub fn gauge_expectation(&self) -> Self {
        Self {
            theta: self.theta.clone(),
            terms: self.terms.iter().filter(|((m, _), _)| *m == 0).map(|(k, c)| (*k, c.clone())).collect(),
        }
    }

    /// Terms of `u`-degree `k`.
    pub fn layer(&self, k: i64) -> Self {
        Self {
            theta: self.theta.clone(),
            terms: self.terms.iter().filter(|((m, _), _)| *m == k).map(|(k, c)| (*k, c.clone())).collect(),
        }
    }

    /// Matrix image under a clock/shift representation, with θ replaced by `p/q`.
    pub fn evaluate(&self, rep: &ClockShiftRep) -> nalgebra::DMatrix<Complex64> {
        rep.evaluate(self)
    }
}

fn fmt_complex(c: Complex64) -> String {
    let sign = if c.im.is_sign_negative() { '-' } else { '+' };
    format!("{:?}{}{:?}i", c.re, sign, c.im.abs())
}

fn parse_complex(s: &str) -> Result<Complex64> {
    let bad = || Error::Parse(format!("bad complex number {s:?}"));
    let body = s.trim().strip_suffix('i').ok_or_else(bad)?;
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'))
        .ok_or_else(bad)?;
    let re: f64 = body[..split].parse().map_err(|_| bad())?;
    let im: f64 = body[split..].trim_start_matches('+').parse().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

impl fmt::Display for NCPolynomial {
    /// `re±im i [e(rat,kθ)] (m,n); …`, or `0` for the zero polynomial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(m, n), co) in &self.terms {
            for (ph, c) in co.iter() {
                if !first {
                    write!(f, "; ")?;
                }
                first = false;
                write!(f, "{}", fmt_complex(*c))?;
                if *ph != Phase::ZERO {
                    write!(f, " e({},{}θ)", ph.turns, ph.theta)?;
                }
                write!(f, " ({m},{n})")?;
            }
        }
        Ok(())
    }
}

impl NCPolynomial {
    /// Inverse of the `Display` form.
    pub fn parse(theta: &Theta, s: &str) -> Result<Self> {
        let mut p = Self::zero(theta);
        let s = s.trim();
        if s == "0" || s.is_empty() {
            return Ok(p);
        }
        for term in s.split(';') {
            let term = term.trim();
            let bad = || Error::Parse(format!("bad polynomial term {term:?}"));
            let open = term.rfind('(').ok_or_else(bad)?;
            let idx = term[open..].trim().strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
            let (m, n) = idx.split_once(',').ok_or_else(bad)?;
            let m: i64 = m.trim().parse().map_err(|_| bad())?;
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let head = term[..open].trim();
            let (cs, ph) = match head.find(" e(") {
                Some(pos) => {
                    let inner = head[pos + 3..].strip_suffix("θ)").ok_or_else(bad)?;
                    let (r, k) = inner.split_once(',').ok_or_else(bad)?;
                    let k: i64 = k.trim().parse().map_err(|_| bad())?;
                    (&head[..pos], Phase::new(parse_rational(r)?, k))
                }
                None => (head, Phase::ZERO),
            };
            p.add_term(m, n, ph, parse_complex(cs)?);
        }
        Ok(p)
    }
}

impl FromStr for Phase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("bad phase {s:?}")))?;
        let (r, k) = inner.split_once(',').ok_or_else(|| Error::Parse(format!("bad phase {s:?}")))?;
        let k = k.trim().trim_end_matches('θ');
        Ok(Phase::new(parse_rational(r)?, k.parse().map_err(|_| Error::Parse(format!("bad phase {s:?}")))?))
    }
}
