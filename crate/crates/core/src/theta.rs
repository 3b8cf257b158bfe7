//! The rotation parameter θ: exact quadratic irrationals or capped-precision
//! decimals, their continued fractions, convergents and fractional parts of
//! integer multiples.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Rationals used for exact angles (turns).
pub type Rational = Ratio<i64>;

/// `(p + q√d) / r` with `d > 1` square-free, `q ≠ 0`, `r > 0` and `gcd(p, q, r) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticSurd {
    p: i64,
    q: i64,
    d: i64,
    r: i64,
}

fn isqrt(n: i128) -> i128 {
    debug_assert!(n >= 0);
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as i128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Sign of `x + y√d` for non-square `d > 0`.
fn sign_xy(x: i128, y: i128, d: i128) -> Ordering {
    match (x.cmp(&0), y.cmp(&0)) {
        (Ordering::Equal, s) => s,
        (s, Ordering::Equal) => s,
        (Ordering::Greater, Ordering::Greater) => Ordering::Greater,
        (Ordering::Less, Ordering::Less) => Ordering::Less,
        (Ordering::Greater, Ordering::Less) => (x * x).cmp(&(y * y * d)),
        (Ordering::Less, Ordering::Greater) => (y * y * d).cmp(&(x * x)),
    }
}

/// `floor((p + √d) / q)` exactly, `d` not a perfect square, `q ≠ 0`.
fn floor_surd(p: i128, d: i128, q: i128) -> i128 {
    let s = isqrt(d);
    let mut a = Integer::div_floor(&(p + s), &q);
    // a <= (p + √d)/q  <=>  a q - p <= √d (q > 0), reversed for q < 0
    let le = |a: i128| {
        let x = a * q - p;
        let c = sign_xy(-x, 1, d); // sign of √d - x
        if q > 0 {
            c != Ordering::Less
        } else {
            c != Ordering::Greater
        }
    };
    while !le(a) {
        a -= 1;
    }
    while le(a + 1) {
        a += 1;
    }
    a
}

impl QuadraticSurd {
    pub fn new(p: i64, q: i64, d: i64, r: i64) -> Result<Self> {
        if r == 0 {
            return Err(Error::Parameter("zero denominator".into()));
        }
        if d < 0 {
            return Err(Error::Parameter("negative radicand".into()));
        }
        // pull square factors out of d
        let (mut q, mut d) = (q as i128, d as i128);
        let mut f: i128 = 2;
        while f * f <= d {
            while d % (f * f) == 0 {
                d /= f * f;
                q *= f;
            }
            f += 1;
        }
        if q == 0 || d <= 1 {
            return Err(Error::Parameter(
                "value is rational (q = 0 or d is a perfect square)".into(),
            ));
        }
        Self::normalized(p as i128, q, d, r as i128)
    }

    fn normalized(p: i128, q: i128, d: i128, r: i128) -> Result<Self> {
        let (mut p, mut q, mut r) = (p, q, r);
        if r < 0 {
            p = -p;
            q = -q;
            r = -r;
        }
        let g = p.gcd(&q).gcd(&r);
        p /= g;
        q /= g;
        r /= g;
        let fit = |v: i128| i64::try_from(v).map_err(|_| Error::Parameter("coefficient overflow".into()));
        Ok(Self {
            p: fit(p)?,
            q: fit(q)?,
            d: fit(d)?,
            r: fit(r)?,
        })
    }

    pub fn parts(&self) -> (i64, i64, i64, i64) {
        (self.p, self.q, self.d, self.r)
    }

    pub fn to_f64(&self) -> f64 {
        (self.p as f64 + self.q as f64 * (self.d as f64).sqrt()) / self.r as f64
    }

    /// Exact sign of `a + b·self`.
    pub fn sign_of_affine(&self, a: i64, b: i64) -> Ordering {
        let x = a as i128 * self.r as i128 + b as i128 * self.p as i128;
        let y = b as i128 * self.q as i128;
        sign_xy(x, y, self.d as i128)
    }

    pub fn floor(&self) -> i64 {
        // (p + q√d)/r with q > 0: (p + √(q²d))/r; else flip sign of the whole
        let (p, q, d, r) = (self.p as i128, self.q as i128, self.d as i128, self.r as i128);
        if q > 0 {
            floor_surd(p, q * q * d, r) as i64
        } else {
            floor_surd(-p, q * q * d, -r) as i64
        }
    }

    /// `self - floor(self)`.
    pub fn frac(&self) -> Self {
        let f = self.floor() as i128;
        Self::normalized(self.p as i128 - f * self.r as i128, self.q as i128, self.d as i128, self.r as i128)
            .expect("fractional part stays in range")
    }

    pub fn neg(&self) -> Self {
        Self { p: -self.p, q: -self.q, ..*self }
    }

    /// `(a·x + b) / (c·x + e)` for an integer matrix.
    pub fn mobius(&self, a: i64, b: i64, c: i64, e: i64) -> Result<Self> {
        let (p, q, d, r) = (self.p as i128, self.q as i128, self.d as i128, self.r as i128);
        let (a, b, c, e) = (a as i128, b as i128, c as i128, e as i128);
        let n0 = a * p + b * r;
        let n1 = a * q;
        let m0 = c * p + e * r;
        let m1 = c * q;
        let den = m0 * m0 - m1 * m1 * d;
        if den == 0 {
            return Err(Error::Parameter("degenerate Möbius image".into()));
        }
        let pp = n0 * m0 - n1 * m1 * d;
        let qq = n1 * m0 - n0 * m1;
        if qq == 0 {
            return Err(Error::Parameter("Möbius image is rational".into()));
        }
        Self::normalized(pp, qq, d, den)
    }

    /// Continued fraction: returns (preperiod, period).
    fn continued_fraction(&self) -> (Vec<i64>, Vec<i64>) {
        // rewrite as (P + √D)/Q with Q | D - P²
        let (mut p, q, d, mut r) = (self.p as i128, self.q as i128, self.d as i128, self.r as i128);
        let (mut big_p, mut big_d) = (p, q * q * d);
        if q < 0 {
            p = -p;
            r = -r;
            big_p = p;
        }
        let mut big_q = r;
        if (big_d - big_p * big_p) % big_q != 0 {
            let aq = big_q.abs();
            big_p *= aq;
            big_d *= aq * aq;
            big_q *= aq;
        }
        let mut seen: std::collections::HashMap<(i128, i128), usize> = Default::default();
        let mut terms = Vec::new();
        loop {
            if let Some(&start) = seen.get(&(big_p, big_q)) {
                let period = terms[start..].to_vec();
                terms.truncate(start);
                return (terms, period);
            }
            seen.insert((big_p, big_q), terms.len());
            let a = floor_surd(big_p, big_d, big_q);
            terms.push(a as i64);
            big_p = a * big_q - big_p;
            big_q = (big_d - big_p * big_p) / big_q;
        }
    }
}

impl fmt::Display for QuadraticSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "quad:({},{},{},{})", self.p, self.q, self.d, self.r)
    }
}

/// A decimal approximation of an irrational θ with a declared continued-fraction horizon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecimalTheta {
    text: String,
    value: BigRational,
    digits: u32,
    depth_cap: usize,
}

impl DecimalTheta {
    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn depth_cap(&self) -> usize {
        self.depth_cap
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    /// Half-width of the interval of reals consistent with the printed digits.
    fn half_ulp(&self) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(2) * BigInt::from(10).pow(self.digits))
    }
}

fn rational_cf(x: &BigRational, max_terms: usize) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut num = x.numer().clone();
    let mut den = x.denom().clone();
    while !den.is_zero() && out.len() < max_terms {
        let (a, rem) = num.div_mod_floor(&den);
        out.push(a);
        num = den;
        den = rem;
    }
    out
}

/// Kind of θ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ThetaKind {
    Quadratic(QuadraticSurd),
    Decimal(DecimalTheta),
}

#[derive(Debug)]
struct Inner {
    kind: ThetaKind,
    hi: f64,
    lo: f64,
    preperiod: Vec<i64>,
    period: Vec<i64>,
}

/// Irrational rotation parameter in (0, 1). Cheap to clone.
#[derive(Clone, Debug)]
pub struct Theta(Arc<Inner>);

impl PartialEq for Theta {
    fn eq(&self, other: &Self) -> bool {
        self.0.kind == other.0.kind
    }
}

/// Continued-fraction expansion `[a0; a1, a2, ...]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CfExpansion {
    /// The first `depth` partial quotients (a0 included).
    pub terms: Vec<i64>,
    /// For quadratic θ: the non-repeating head (a0 included) and the minimal period.
    pub preperiod: Option<Vec<i64>>,
    pub period: Option<Vec<i64>>,
}

fn double_double(x: &BigRational) -> (f64, f64) {
    let hi = x.to_f64().unwrap_or(f64::NAN);
    let rest = x - BigRational::from_float(hi).expect("finite");
    (hi, rest.to_f64().unwrap_or(0.0))
}

/// Exact two-product: `a*b = p + e`.
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

fn wrap01(x: f64) -> f64 {
    let y = x - x.floor();
    if y >= 1.0 {
        0.0
    } else {
        y
    }
}

impl Theta {
    fn from_kind(kind: ThetaKind) -> Result<Self> {
        let (hi, lo, preperiod, period) = match &kind {
            ThetaKind::Quadratic(s) => {
                let (pre, per) = s.continued_fraction();
                if pre.first() != Some(&0) && !(pre.is_empty() && per.first() == Some(&0)) {
                    return Err(Error::Parameter(format!("θ = {} is not in (0,1)", s.to_f64())));
                }
                // high convergent gives ~1e-34 accuracy
                let mut h = (BigInt::zero(), BigInt::one());
                let mut h_prev = (BigInt::one(), BigInt::zero());
                let mut i = 0usize;
                while h.1 < BigInt::from(1u128 << 120) {
                    let a = if i < pre.len() { pre[i] } else { per[(i - pre.len()) % per.len()] };
                    let next = (
                        BigInt::from(a) * &h.0 + &h_prev.0,
                        BigInt::from(a) * &h.1 + &h_prev.1,
                    );
                    if i == 0 {
                        h_prev = (BigInt::one(), BigInt::zero());
                        h = (BigInt::from(a), BigInt::one());
                    } else {
                        h_prev = std::mem::replace(&mut h, next);
                    }
                    i += 1;
                }
                let (hi, lo) = double_double(&BigRational::new(h.0, h.1));
                (hi, lo, pre, per)
            }
            ThetaKind::Decimal(dt) => {
                let (hi, lo) = double_double(&dt.value);
                (hi, lo, Vec::new(), Vec::new())
            }
        };
        if hi.is_nan() || hi <= 0.0 || hi >= 1.0 {
            return Err(Error::Parameter(format!("θ = {hi} is not in (0,1)")));
        }
        Ok(Theta(Arc::new(Inner { kind, hi, lo, preperiod, period })))
    }

    /// `(p + q√d) / r`.
    pub fn quadratic(p: i64, q: i64, d: i64, r: i64) -> Result<Self> {
        Self::from_kind(ThetaKind::Quadratic(QuadraticSurd::new(p, q, d, r)?))
    }

    pub fn from_surd(s: QuadraticSurd) -> Result<Self> {
        Self::from_kind(ThetaKind::Quadratic(s))
    }

    /// Golden mean `(√5 − 1)/2`, the default parameter.
    pub fn golden() -> Self {
        Self::quadratic(-1, 1, 5, 2).expect("golden mean")
    }

    /// `√2 − 1`.
    pub fn silver() -> Self {
        Self::quadratic(-1, 1, 2, 1).expect("silver mean")
    }

    /// Decimal θ given as text like `0.6180339887`. At least eight significant
    /// fractional digits are required so the value can stand in for an irrational.
    pub fn decimal(text: &str, depth_cap: usize) -> Result<Self> {
        let t = text.trim();
        let frac = t
            .strip_prefix("0.")
            .ok_or_else(|| Error::Parse(format!("decimal θ must look like 0.xxxx, got {t:?}")))?;
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse(format!("bad decimal digits in {t:?}")));
        }
        let trimmed = frac.trim_end_matches('0');
        if trimmed.len() < 8 {
            return Err(Error::Parameter(format!(
                "decimal θ {t} has fewer than 8 significant digits; it is indistinguishable from a rational"
            )));
        }
        if depth_cap == 0 {
            return Err(Error::Parameter("depth cap must be positive".into()));
        }
        let digits = frac.len() as u32;
        let num: BigInt = frac.parse().map_err(|_| Error::Parse(t.to_string()))?;
        let value = BigRational::new(num, BigInt::from(10).pow(digits));
        Self::from_kind(ThetaKind::Decimal(DecimalTheta {
            text: t.to_string(),
            value,
            digits,
            depth_cap,
        }))
    }

    pub fn kind(&self) -> &ThetaKind {
        &self.0.kind
    }

    pub fn surd(&self) -> Option<&QuadraticSurd> {
        match &self.0.kind {
            ThetaKind::Quadratic(s) => Some(s),
            ThetaKind::Decimal(_) => None,
        }
    }

    /// True when decisions made from this θ are exact rather than "within horizon".
    pub fn is_exact(&self) -> bool {
        matches!(self.0.kind, ThetaKind::Quadratic(_))
    }

    pub fn value(&self) -> f64 {
        self.0.hi
    }

    /// Approximate number of reliable decimal digits.
    pub fn precision_digits(&self) -> u32 {
        match &self.0.kind {
            ThetaKind::Quadratic(_) => 32,
            ThetaKind::Decimal(d) => d.digits,
        }
    }

    /// Fractional part of `k·θ`, accurate to a few ulps for `|k| < 2^53`.
    pub fn frac_mul(&self, k: i64) -> f64 {
        let kf = k as f64;
        let (p, e) = two_prod(kf, self.0.hi);
        let fl = p.floor();
        wrap01((p - fl) + (e + kf * self.0.lo))
    }

    /// Fractional part of `a + b·θ`.
    pub fn frac_affine(&self, a: Rational, b: i64) -> f64 {
        let af = *a.numer() as f64 / *a.denom() as f64;
        wrap01(af - af.floor() + self.frac_mul(b))
    }

    /// Continued fraction to the given depth.
    pub fn cf_expand(&self, depth: usize) -> Result<CfExpansion> {
        if depth == 0 {
            return Err(Error::Parameter("depth must be at least 1".into()));
        }
        match &self.0.kind {
            ThetaKind::Quadratic(_) => {
                let pre = &self.0.preperiod;
                let per = &self.0.period;
                let terms = (0..depth)
                    .map(|i| if i < pre.len() { pre[i] } else { per[(i - pre.len()) % per.len()] })
                    .collect();
                Ok(CfExpansion { terms, preperiod: Some(pre.clone()), period: Some(per.clone()) })
            }
            ThetaKind::Decimal(dt) => {
                if depth > dt.depth_cap {
                    return Err(Error::PrecisionExhausted { requested: depth, available: dt.depth_cap });
                }
                let h = dt.half_ulp();
                let lo = rational_cf(&(&dt.value - &h), depth + 2);
                let hi = rational_cf(&(&dt.value + &h), depth + 2);
                // the last term of a finite expansion is not determined by the interval
                let n = lo.len().min(hi.len()).saturating_sub(1);
                let common = lo.iter().zip(&hi).take(n).take_while(|(a, b)| a == b).count();
                if common < depth {
                    return Err(Error::PrecisionExhausted { requested: depth, available: common });
                }
                let terms = lo[..depth].iter().map(|a| a.to_i64().unwrap_or(i64::MAX)).collect();
                Ok(CfExpansion { terms, preperiod: None, period: None })
            }
        }
    }

    /// First `n` convergents `p_k / q_k`.
    pub fn convergents(&self, n: usize) -> Result<Vec<Ratio<i128>>> {
        if n == 0 {
            return Err(Error::Parameter("n must be at least 1".into()));
        }
        let cf = self.cf_expand(n)?;
        // (p0, q0) = (p_{k-2}, q_{k-2}), (p1, q1) = (p_{k-1}, q_{k-1})
        let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
        let mut out = Vec::with_capacity(n);
        for (i, &a) in cf.terms.iter().enumerate() {
            let a = a as i128;
            let p = a.checked_mul(p1).and_then(|x| x.checked_add(p0));
            let q = a.checked_mul(q1).and_then(|x| x.checked_add(q0));
            let (p, q) = match (p, q) {
                (Some(p), Some(q)) => (p, q),
                _ => return Err(Error::Parameter(format!("convergent {i} overflows i128"))),
            };
            p0 = p1;
            q0 = q1;
            p1 = p;
            q1 = q;
            out.push(Ratio::new_raw(p, q));
        }
        Ok(out)
    }

    /// Exact sign of `a + b·θ` (quadratic θ) or a decided sign within the
    /// decimal's precision.
    pub fn sign_of_affine(&self, a: i64, b: i64) -> Result<Ordering> {
        match &self.0.kind {
            ThetaKind::Quadratic(s) => Ok(s.sign_of_affine(a, b)),
            ThetaKind::Decimal(dt) => {
                let v = BigRational::from_integer(BigInt::from(a))
                    + BigRational::from_integer(BigInt::from(b)) * &dt.value;
                let slack = dt.half_ulp() * BigRational::from_integer(BigInt::from(b).abs());
                if v.abs() <= slack {
                    if b == 0 && a == 0 {
                        return Ok(Ordering::Equal);
                    }
                    return Err(Error::Undecidable(format!(
                        "sign of {a} + {b}θ below decimal precision"
                    )));
                }
                Ok(if v.is_positive() { Ordering::Greater } else { Ordering::Less })
            }
        }
    }

    /// Decides `self ≡ sign·other (mod 1)`. The boolean is `true` when the
    /// answer is exact.
    pub fn congruent_mod_one(&self, other: &Theta, sign: i64) -> (bool, bool) {
        if let (Some(a), Some(b)) = (self.surd(), other.surd()) {
            let b = if sign < 0 { b.neg() } else { *b };
            return (a.frac() == b.frac(), true);
        }
        let digits = self.precision_digits().min(other.precision_digits()) as i32;
        let tol = 10f64.powi(-(digits - 4).max(1)).max(4.0 * f64::EPSILON);
        let d = wrap01(self.value() - sign as f64 * other.value());
        (d.min(1.0 - d) < tol, false)
    }

    /// GL(2,ℤ) image `(aθ + b)/(cθ + d)` reduced into (0,1). Quadratic θ only.
    pub fn gl2_image(&self, a: i64, b: i64, c: i64, d: i64) -> Result<Theta> {
        if (a * d - b * c).abs() != 1 {
            return Err(Error::Parameter("matrix is not in GL(2,Z)".into()));
        }
        let s = self
            .surd()
            .ok_or_else(|| Error::Parameter("GL(2,Z) images need a quadratic θ".into()))?;
        Theta::from_surd(s.mobius(a, b, c, d)?.frac())
    }

    /// Minimal period of the continued fraction (quadratic θ).
    pub fn cf_period(&self) -> Option<&[i64]> {
        if self.is_exact() {
            Some(&self.0.period)
        } else {
            None
        }
    }
}

impl fmt::Display for Theta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.kind {
            ThetaKind::Quadratic(s) => write!(f, "{s}"),
            ThetaKind::Decimal(d) => write!(f, "dec:{}:depth={}", d.text, d.depth_cap),
        }
    }
}

impl Serialize for Theta {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Default continued-fraction horizon for decimal θ without an explicit `depth=`.
pub const DEFAULT_DECIMAL_DEPTH: usize = 30;

impl FromStr for Theta {
    type Err = Error;

    /// Grammar: `golden`, `silver`, `quad:(p,q,d,r)`, `dec:0.6180339887[:depth=40]`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "golden" => return Ok(Theta::golden()),
            "silver" => return Ok(Theta::silver()),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("quad:") {
            let inner = rest
                .trim()
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| Error::Parse(format!("expected quad:(p,q,d,r), got {s:?}")))?;
            let nums: Vec<i64> = inner
                .split(',')
                .map(|x| x.trim().parse::<i64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
            if nums.len() != 4 {
                return Err(Error::Parse(format!("expected four integers in {s:?}")));
            }
            return Theta::quadratic(nums[0], nums[1], nums[2], nums[3]);
        }
        if let Some(rest) = s.strip_prefix("dec:") {
            let mut parts = rest.split(':');
            let value = parts.next().unwrap_or("");
            let mut depth = DEFAULT_DECIMAL_DEPTH;
            for opt in parts {
                let d = opt
                    .strip_prefix("depth=")
                    .ok_or_else(|| Error::Parse(format!("unknown decimal option {opt:?}")))?;
                depth = d.parse().map_err(|_| Error::Parse(format!("bad depth {d:?}")))?;
            }
            return Theta::decimal(value, depth);
        }
        Err(Error::Parse(format!("unrecognised θ spec {s:?}")))
    }
}

/// Parses `a/b`, `a`, or a negative variant into a rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: expand a real given as (P + √D)/Q by floating
    /// refinement with exact integer checks, used only for small cases.
    fn cf_by_float(x: f64, n: usize) -> Vec<i64> {
        let mut out = Vec::new();
        let mut x = x;
        for _ in 0..n {
            let a = x.floor();
            out.push(a as i64);
            x = 1.0 / (x - a);
        }
        out
    }

    #[test]
    fn golden_cf() {
        let t = Theta::golden();
        let cf = t.cf_expand(8).unwrap();
        assert_eq!(cf.terms, vec![0, 1, 1, 1, 1, 1, 1, 1]);
        assert_eq!(cf.preperiod.as_deref(), Some(&[0][..]));
        assert_eq!(cf.period.as_deref(), Some(&[1][..]));
    }

    #[test]
    fn silver_cf() {
        let cf = Theta::silver().cf_expand(6).unwrap();
        assert_eq!(cf.terms, vec![0, 2, 2, 2, 2, 2]);
        assert_eq!(cf.period.as_deref(), Some(&[2][..]));
    }

    #[test]
    fn cf_matches_float_oracle_for_short_prefixes() {
        for (p, q, d, r) in [(-1, 1, 5, 2), (-1, 1, 2, 1), (1, 1, 7, 5), (-2, 1, 11, 3), (3, -1, 3, 2)] {
            let t = Theta::quadratic(p, q, d, r).unwrap();
            let exact = t.cf_expand(10).unwrap().terms;
            assert_eq!(exact, cf_by_float(t.value(), 10), "θ = {t}");
        }
    }

    #[test]
    fn rational_input_rejected() {
        assert!(Theta::quadratic(1, 0, 5, 2).is_err());
        assert!(Theta::quadratic(1, 1, 4, 2).is_err());
        assert!("dec:0.5".parse::<Theta>().is_err());
    }

    #[test]
    fn out_of_range_rejected() {
        // (1 + √5)/2 > 1
        assert!(Theta::quadratic(1, 1, 5, 2).is_err());
    }

    #[test]
    fn convergents_golden() {
        let c = Theta::golden().convergents(6).unwrap();
        let want = [(0, 1), (1, 1), (1, 2), (2, 3), (3, 5), (5, 8)];
        for (r, (p, q)) in c.iter().zip(want) {
            assert_eq!((*r.numer(), *r.denom()), (p, q));
        }
        let th = Theta::golden().value();
        assert!((th - 3.0 / 5.0).abs() < 1.0 / 25.0);
    }

    #[test]
    fn convergent_determinants_and_bounds() {
        for t in [Theta::golden(), Theta::silver(), Theta::quadratic(1, 1, 7, 5).unwrap()] {
            let c = t.convergents(20).unwrap();
            for k in 1..c.len() {
                let det = c[k].numer() * c[k - 1].denom() - c[k - 1].numer() * c[k].denom();
                assert_eq!(det.abs(), 1);
                if k >= 2 {
                    assert!(c[k].denom() > c[k - 1].denom());
                }
                let q = *c[k].denom() as f64;
                let err = (t.value() - *c[k].numer() as f64 / q).abs();
                assert!(err < 1.0 / (q * q) || q > 1e7);
            }
        }
    }

    #[test]
    fn cf_reconstructs_quadratic_value() {
        // reconstruct from preperiod + period: x = [pre; (per)] solves a quadratic;
        // compare against the double-double value
        for t in [Theta::golden(), Theta::silver(), Theta::quadratic(-2, 1, 11, 3).unwrap()] {
            let c = t.convergents(40).unwrap();
            let last = c.last().unwrap();
            let approx = *last.numer() as f64 / *last.denom() as f64;
            assert!((approx - t.value()).abs() < 1e-15);
        }
    }

    #[test]
    fn decimal_cf_and_cap() {
        let t: Theta = "dec:0.6180339887:depth=40".parse().unwrap();
        let cf = t.cf_expand(10).unwrap();
        assert_eq!(cf.terms, vec![0, 1, 1, 1, 1, 1, 1, 1, 1, 1]);
        assert!(matches!(t.cf_expand(41), Err(Error::PrecisionExhausted { .. })));
        // ten digits cannot pin down forty quotients
        assert!(matches!(t.cf_expand(40), Err(Error::PrecisionExhausted { .. })));
    }

    #[test]
    fn frac_mul_is_accurate() {
        let t = Theta::golden();
        // k θ for Fibonacci k is close to an integer
        let f = t.frac_mul(832040);
        let d = f.min(1.0 - f);
        assert!((d - 1.0 / (5f64.sqrt() * 832040.0)).abs() < 1e-12);
        assert_eq!(t.frac_mul(0), 0.0);
    }

    #[test]
    fn sign_exact() {
        let t = Theta::golden();
        assert_eq!(t.sign_of_affine(-1, 2).unwrap(), Ordering::Greater);
        assert_eq!(t.sign_of_affine(0, -1).unwrap(), Ordering::Less);
        assert_eq!(t.sign_of_affine(-5, 8).unwrap(), Ordering::Less); // 8θ ≈ 4.944
        assert_eq!(t.sign_of_affine(0, 0).unwrap(), Ordering::Equal);
    }

    #[test]
    fn gl2_images() {
        let g = Theta::golden();
        let img = g.gl2_image(1, 0, 1, 1).unwrap(); // θ/(1+θ) = 1 - θ
        assert!((img.value() - (1.0 - g.value())).abs() < 1e-15);
        let (eq, exact) = img.congruent_mod_one(&g, -1);
        assert!(eq && exact);
        assert!(g.gl2_image(2, 0, 0, 1).is_err());
    }

    #[test]
    fn parse_roundtrip() {
        for s in ["golden", "quad:(-1,1,2,1)", "dec:0.6180339887:depth=40"] {
            let t: Theta = s.parse().unwrap();
            let back: Theta = t.to_string().parse().unwrap();
            assert_eq!(t, back);
        }
        assert!("quad:(1,2)".parse::<Theta>().is_err());
        assert!("pi".parse::<Theta>().is_err());
    }
}
