//! Points of the circle, in turns.

use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::theta::{parse_rational, Rational, Theta};

/// The circle point `a + bθ (mod 1)`; `a` is kept reduced into `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AngleZT {
    a: Rational,
    b: i64,
}

fn reduce_unit(a: Rational) -> Rational {
    let r = a - a.floor();
    debug_assert!(r >= Rational::zero() && r < Rational::one());
    r
}

impl AngleZT {
    pub fn new(a: Rational, b: i64) -> Self {
        Self { a: reduce_unit(a), b }
    }

    pub fn zero() -> Self {
        Self::new(Rational::zero(), 0)
    }

    pub fn a(&self) -> Rational {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    /// `φⁿ(x)`: adds `n` to the θ-coefficient.
    pub fn rotate(&self, n: i64) -> Self {
        Self { a: self.a, b: self.b + n }
    }

    /// Shifts by a rational number of turns.
    pub fn shift(&self, c: Rational) -> Self {
        Self::new(self.a + c, self.b)
    }

    /// Position in `[0, 1)`.
    pub fn turns(&self, theta: &Theta) -> f64 {
        theta.frac_affine(self.a, self.b)
    }

    /// `Some(n)` iff `other = φⁿ(self)`.
    pub fn orbit_offset(&self, other: &AngleZT) -> Option<i64> {
        (self.a == other.a).then(|| other.b - self.b)
    }
}

impl fmt::Display for AngleZT {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

impl Serialize for AngleZT {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl std::str::FromStr for AngleZT {
    type Err = Error;

    /// `(a,b)` with `a` a rational like `1/2`.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("expected (a,b), got {s:?}")))?;
        let (a, b) = inner
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("expected (a,b), got {s:?}")))?;
        let b = b.trim().parse().map_err(|_| Error::Parse(format!("bad θ coefficient in {s:?}")))?;
        Ok(Self::new(parse_rational(a)?, b))
    }
}

/// A circle point known only numerically, with the tolerance used for orbit tests.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GenericAngle {
    t: f64,
    tol: f64,
}

impl GenericAngle {
    pub fn new(t: f64, tol: f64) -> Result<Self> {
        if !t.is_finite() || tol.is_nan() || tol <= 0.0 {
            return Err(Error::Parameter(format!("bad generic angle t={t}, tol={tol}")));
        }
        let t = t - t.floor();
        Ok(Self { t: if t >= 1.0 { 0.0 } else { t }, tol })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }
}

/// Distance on `ℝ/ℤ`.
pub fn circle_dist(x: f64, y: f64) -> f64 {
    let d = (x - y).rem_euclid(1.0);
    d.min(1.0 - d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rotate_examples() {
        let x = AngleZT::new(Rational::new(1, 2), 0);
        assert_eq!(x.rotate(3), AngleZT::new(Rational::new(1, 2), 3));
        assert_eq!(x.rotate(0), x);
        let z = AngleZT::zero();
        assert_eq!(z.rotate(1).rotate(-1), z);
    }

    #[test]
    fn reduction_mod_one() {
        assert_eq!(AngleZT::new(Rational::new(3, 2), 1), AngleZT::new(Rational::new(-1, 2), 1));
        let x: AngleZT = "(1/3,2)".parse().unwrap();
        assert_eq!(x.a(), Rational::new(1, 3));
        assert_eq!(x.b(), 2);
    }

    #[test]
    fn turns_evaluation() {
        let th = Theta::golden();
        let x = AngleZT::new(Rational::new(1, 2), 1);
        let want = (0.5 + th.value()).fract();
        assert!((x.turns(&th) - want).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn action_is_free(num in -50i64..50, den in 1i64..20, b in -100i64..100, n in -100i64..100) {
            let x = AngleZT::new(Rational::new(num, den), b);
            prop_assert_eq!(x.rotate(n) == x, n == 0);
            prop_assert_eq!(x.rotate(n).rotate(-n), x);
            prop_assert_eq!(x.orbit_offset(&x.rotate(n)), Some(n));
        }
    }
}
