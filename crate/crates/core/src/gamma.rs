//! The function γ ≥ 0 on the circle and the algebra specification `(θ, γ)`.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::angle::{AngleZT, GenericAngle};
use crate::error::{Error, Result};
use crate::orbit::{Arc, ZeroSet};
use crate::theta::Theta;

/// Closed-form families for γ.
#[derive(Clone, Debug, PartialEq)]
pub enum GammaKind {
    /// γ ≡ 1.
    One,
    /// `|1 + z|²`, zero at `z = −1`.
    OnePlusZSq,
    /// `|1 + e^{2πic} z|²` for an exact angle `c`, zero at `1/2 − c`.
    Shifted(AngleZT),
    /// `Π_y |z − y|² · Π_arcs dist(z, arc)²` over the declared zero set.
    Zeros,
    /// `a_0 + Σ_k (a_k cos 2πkt + b_k sin 2πkt)` with declared zeros.
    TrigPoly { cos: Vec<f64>, sin: Vec<f64> },
}

/// γ with its zero set `Y`; validated on a grid at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaSpec {
    kind: GammaKind,
    zeros: ZeroSet,
    text: String,
}

/// Grid used to validate γ.
pub const VALIDATION_GRID: usize = 10_000;

fn parse_zero_items(s: &str, theta: &Theta) -> Result<ZeroSet> {
    let (mut exact, mut generic, mut arcs) = (Vec::new(), Vec::new(), Vec::new());
    for item in s.split(';').map(str::trim).filter(|i| !i.is_empty()) {
        if let Some(rest) = item.strip_prefix("t=") {
            let (t, tol) = match rest.split_once('~') {
                Some((t, tol)) => (t, tol.parse().map_err(|_| Error::Parse(format!("bad tolerance in {item:?}")))?),
                None => (rest, 1e-9),
            };
            let t: f64 = t.parse().map_err(|_| Error::Parse(format!("bad numeric zero {item:?}")))?;
            generic.push(GenericAngle::new(t, tol)?);
        } else if let Some(rest) = item.strip_prefix("arc=") {
            let (a, l) = rest
                .split_once('+')
                .ok_or_else(|| Error::Parse(format!("expected arc=start+len, got {item:?}")))?;
            let a: f64 = a.parse().map_err(|_| Error::Parse(format!("bad arc {item:?}")))?;
            let l: f64 = l.parse().map_err(|_| Error::Parse(format!("bad arc {item:?}")))?;
            arcs.push(Arc::new(a, l)?);
        } else {
            exact.push(item.parse::<AngleZT>()?);
        }
    }
    ZeroSet::new(exact, generic, arcs, theta)
}

impl GammaSpec {
    /// Grammar: `one`, `one_plus_z_sq`, `shifted:(a,b)`, `zeros:<items>`,
    /// `trig:a0,a1,b1,a2,b2,…|<items>`; items are `(a,b)`, `t=0.123[~tol]` or
    /// `arc=start+len`, separated by `;`.
    pub fn parse(s: &str, theta: &Theta) -> Result<Self> {
        let s = s.trim();
        let (kind, zeros) = if s == "one" {
            (GammaKind::One, ZeroSet::empty())
        } else if s == "one_plus_z_sq" {
            let half = AngleZT::new(crate::Rational::new(1, 2), 0);
            (GammaKind::OnePlusZSq, ZeroSet::new(vec![half], vec![], vec![], theta)?)
        } else if let Some(rest) = s.strip_prefix("shifted:") {
            let c: AngleZT = rest.parse()?;
            let z = AngleZT::new(crate::Rational::new(1, 2) - c.a(), -c.b());
            (GammaKind::Shifted(c), ZeroSet::new(vec![z], vec![], vec![], theta)?)
        } else if let Some(rest) = s.strip_prefix("zeros:") {
            (GammaKind::Zeros, parse_zero_items(rest, theta)?)
        } else if let Some(rest) = s.strip_prefix("trig:") {
            let (coef, items) = rest.split_once('|').unwrap_or((rest, ""));
            let vals: Vec<f64> = coef
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Parse(format!("bad trig coefficients in {s:?}")))?;
            if vals.is_empty() || vals.len().is_multiple_of(2) {
                return Err(Error::Parse("trig coefficients are a0 followed by (a_k, b_k) pairs".into()));
            }
            let cos = std::iter::once(vals[0]).chain(vals[1..].iter().step_by(2).copied()).collect();
            let sin = std::iter::once(0.0).chain(vals[2..].iter().step_by(2).copied()).collect();
            (GammaKind::TrigPoly { cos, sin }, parse_zero_items(items, theta)?)
        } else {
            return Err(Error::Parse(format!("unrecognised γ spec {s:?}")));
        };
        let g = Self { kind, zeros, text: s.to_string() };
        g.validate(theta)?;
        Ok(g)
    }

    pub fn one_plus_z_sq(theta: &Theta) -> Self {
        Self::parse("one_plus_z_sq", theta).expect("preset")
    }

    /// γ with the given exact zeros: `Π_y |z − y|²`.
    pub fn from_exact_zeros(points: &[AngleZT], theta: &Theta) -> Result<Self> {
        let items: Vec<String> = points.iter().map(|p| p.to_string()).collect();
        Self::parse(&format!("zeros:{}", items.join(";")), theta)
    }

    pub fn kind(&self) -> &GammaKind {
        &self.kind
    }

    pub fn zero_set(&self) -> &ZeroSet {
        &self.zeros
    }

    /// `γ(e^{2πit})`.
    pub fn eval(&self, t: f64, theta: &Theta) -> f64 {
        match &self.kind {
            GammaKind::One => 1.0,
            GammaKind::OnePlusZSq => {
                let c = (PI * t).cos();
                4.0 * c * c
            }
            GammaKind::Shifted(c) => {
                let x = (PI * (t + c.turns(theta))).cos();
                4.0 * x * x
            }
            GammaKind::Zeros => {
                let pts: f64 = self
                    .zeros
                    .points()
                    .iter()
                    .map(|p| {
                        let s = (PI * (t - p.turns(theta))).sin();
                        4.0 * s * s
                    })
                    .product();
                let arcs: f64 = self.zeros.arcs().iter().map(|a| a.dist(t).powi(2)).product();
                pts * arcs
            }
            GammaKind::TrigPoly { cos, sin } => {
                let mut v = cos[0];
                for k in 1..cos.len() {
                    let (s, c) = (2.0 * PI * k as f64 * t).sin_cos();
                    v += cos[k] * c + sin[k] * s;
                }
                v
            }
        }
    }

    /// `β(t) = γ(e^{2πit})^{1/2}`.
    pub fn beta(&self, t: f64, theta: &Theta) -> f64 {
        self.eval(t, theta).max(0.0).sqrt()
    }

    /// γ ≥ 0 on the validation grid and γ = 0 on the declared zeros.
    pub fn validate(&self, theta: &Theta) -> Result<()> {
        for i in 0..VALIDATION_GRID {
            let t = i as f64 / VALIDATION_GRID as f64;
            let v = self.eval(t, theta);
            if v.is_nan() || v < -1e-12 {
                return Err(Error::Parameter(format!("γ({t}) = {v} is negative")));
            }
        }
        for p in self.zeros.points() {
            let t = p.turns(theta);
            let v = self.eval(t, theta);
            if v.abs() > 1e-10 {
                return Err(Error::Parameter(format!("γ does not vanish at declared zero t = {t} (value {v})")));
            }
        }
        for a in self.zeros.arcs() {
            for j in 0..=16 {
                let t = a.start + a.len * j as f64 / 16.0;
                if self.eval(t, theta).abs() > 1e-10 {
                    return Err(Error::Parameter(format!("γ does not vanish on the arc at t = {t}")));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for GammaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl Serialize for GammaSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.text)
    }
}

/// The pair `(θ, γ)` determining `A_{θ,γ}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlgebraSpec {
    pub theta: Theta,
    pub gamma: GammaSpec,
}

impl AlgebraSpec {
    pub fn new(theta: Theta, gamma: GammaSpec) -> Self {
        Self { theta, gamma }
    }

    /// `<θ spec>@<γ spec>`, e.g. `golden@one_plus_z_sq`.
    pub fn parse(s: &str) -> Result<Self> {
        let (t, g) = s
            .split_once('@')
            .ok_or_else(|| Error::Parse(format!("expected <theta>@<gamma>, got {s:?}")))?;
        let theta: Theta = t.parse()?;
        let gamma = GammaSpec::parse(g, &theta)?;
        Ok(Self { theta, gamma })
    }

    pub fn zero_set(&self) -> &ZeroSet {
        self.gamma.zero_set()
    }
}

impl fmt::Display for AlgebraSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.theta, self.gamma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    #[test]
    fn presets_and_zeros() {
        let th = Theta::golden();
        let g = GammaSpec::one_plus_z_sq(&th);
        assert_eq!(g.zero_set().exact(), &[AngleZT::new(Rational::new(1, 2), 0)]);
        assert!((g.eval(0.0, &th) - 4.0).abs() < 1e-15);
        assert!((g.beta(0.25, &th) - 2f64.sqrt()).abs() < 1e-15);
        let s = GammaSpec::parse("shifted:(1/4,1)", &th).unwrap();
        let z = s.zero_set().exact()[0];
        assert_eq!(z, AngleZT::new(Rational::new(1, 4), -1));
        assert!(s.eval(z.turns(&th), &th) < 1e-20);
    }

    #[test]
    fn zeros_product() {
        let th = Theta::golden();
        let g = GammaSpec::parse("zeros:(1/2,0);(1/2,3);t=0.1;arc=0.7+0.05", &th).unwrap();
        assert_eq!(g.zero_set().exact().len(), 2);
        assert_eq!(g.zero_set().generic().len(), 1);
        assert_eq!(g.zero_set().arcs().len(), 1);
        assert_eq!(g.eval(0.72, &th), 0.0);
        assert!(g.eval(0.3, &th) > 0.0);
    }

    #[test]
    fn trig_validation() {
        let th = Theta::golden();
        // 1 − cos 2πt vanishes at t = 0
        assert!(GammaSpec::parse("trig:1,-1,0|(0,0)", &th).is_ok());
        // declared zero where γ ≠ 0
        assert!(GammaSpec::parse("trig:1,-1,0|(1/2,0)", &th).is_err());
        // negative somewhere
        assert!(GammaSpec::parse("trig:0,1,0", &th).is_err());
        assert!(GammaSpec::parse("trig:1,2", &th).is_err());
    }

    #[test]
    fn algebra_spec_roundtrip() {
        let a = AlgebraSpec::parse("golden@one_plus_z_sq").unwrap();
        assert_eq!(AlgebraSpec::parse(&a.to_string()).unwrap(), a);
        assert!(AlgebraSpec::parse("golden").is_err());
        assert!(AlgebraSpec::parse("golden@nope").is_err());
        assert!(GammaSpec::parse("zeros:(1/2,0);(1/2,0)", &Theta::golden()).is_err());
    }
}
