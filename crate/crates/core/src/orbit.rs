//! Zero sets of γ, their decomposition into rotation orbits, and the trace
//! space of `A_{θ,γ}`: simplicity, dimension, extreme traces and an
//! invariance check for candidate trace measures.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::angle::{circle_dist, AngleZT, GenericAngle};
use crate::error::{Error, Result};
use crate::ncpoly::cis;
use crate::quad::PanelRule;
use crate::theta::Theta;

/// Default search horizon `|n| ≤ H` for orbit tests on generic points.
pub const DEFAULT_HORIZON: usize = 1000;

/// A point of the circle, exact or numeric.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ZeroPoint {
    Exact(AngleZT),
    Generic(GenericAngle),
}

impl ZeroPoint {
    pub fn turns(&self, theta: &Theta) -> f64 {
        match self {
            ZeroPoint::Exact(a) => a.turns(theta),
            ZeroPoint::Generic(g) => g.t(),
        }
    }
}

impl Serialize for ZeroPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ZeroPoint::Exact(a) => a.serialize(s),
            ZeroPoint::Generic(g) => s.serialize_str(&format!("t={}", g.t())),
        }
    }
}

/// Closed arc `[start, start + len]` (turns), `0 < len < 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Arc {
    pub start: f64,
    pub len: f64,
}

impl Arc {
    pub fn new(start: f64, len: f64) -> Result<Self> {
        if len.is_nan() || len <= 0.0 || len >= 1.0 || !start.is_finite() {
            return Err(Error::Parameter(format!("arc length {len} must lie in (0,1)")));
        }
        Ok(Self { start: start.rem_euclid(1.0), len })
    }

    pub fn contains(&self, t: f64) -> bool {
        (t - self.start).rem_euclid(1.0) <= self.len
    }

    /// Distance from `t` to the arc (0 inside).
    pub fn dist(&self, t: f64) -> f64 {
        if self.contains(t) {
            0.0
        } else {
            circle_dist(t, self.start).min(circle_dist(t, self.start + self.len))
        }
    }
}

/// `Y = {z ∈ 𝕋 : γ(z) = 0}` as exact points, numeric points and arcs.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ZeroSet {
    exact: Vec<AngleZT>,
    generic: Vec<GenericAngle>,
    arcs: Vec<Arc>,
}

impl ZeroSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Exact points must be pairwise distinct; numeric points must be
    /// separated by more than their tolerance from every other point.
    pub fn new(exact: Vec<AngleZT>, generic: Vec<GenericAngle>, arcs: Vec<Arc>, theta: &Theta) -> Result<Self> {
        for (i, a) in exact.iter().enumerate() {
            if exact[..i].contains(a) {
                return Err(Error::Parameter(format!("duplicate zero {a}")));
            }
        }
        for (i, g) in generic.iter().enumerate() {
            let clash = exact.iter().map(|a| a.turns(theta)).chain(generic[..i].iter().map(|h| h.t()));
            for t in clash {
                if circle_dist(t, g.t()) <= g.tol() {
                    return Err(Error::Parameter(format!("numeric zero t={} duplicates another zero", g.t())));
                }
            }
        }
        Ok(Self { exact, generic, arcs })
    }

    pub fn from_exact(points: Vec<AngleZT>) -> Result<Self> {
        Self::new(points, Vec::new(), Vec::new(), &Theta::golden())
    }

    pub fn exact(&self) -> &[AngleZT] {
        &self.exact
    }

    pub fn generic(&self) -> &[GenericAngle] {
        &self.generic
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn is_empty(&self) -> bool {
        self.exact.is_empty() && self.generic.is_empty() && self.arcs.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.arcs.is_empty()
    }

    /// Number of points (finite sets only).
    pub fn len(&self) -> Option<usize> {
        self.is_finite().then(|| self.exact.len() + self.generic.len())
    }

    pub fn points(&self) -> Vec<ZeroPoint> {
        self.exact
            .iter()
            .map(|a| ZeroPoint::Exact(*a))
            .chain(self.generic.iter().map(|g| ZeroPoint::Generic(*g)))
            .collect()
    }

    /// `min_{y ∈ Y} dist(t, y)`; `+∞` for the empty set.
    pub fn dist(&self, t: f64, theta: &Theta) -> f64 {
        let pts = self.points().into_iter().map(|p| circle_dist(t, p.turns(theta)));
        pts.chain(self.arcs.iter().map(|a| a.dist(t))).fold(f64::INFINITY, f64::min)
    }
}

/// Zeros in one orbit: `rep` and the offsets `n` with `φⁿ(rep) ∈ Y`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitClass {
    pub rep: AngleZT,
    pub exponents: Vec<i64>,
}

/// Numeric zeros linked by rotations found within the horizon.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenericClass {
    pub members: Vec<GenericAngle>,
    pub offsets: Vec<i64>,
    /// Index of an exact class this group was found to join, if any.
    pub linked_exact: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitPartition {
    pub classes: Vec<OrbitClass>,
    pub generic_classes: Vec<GenericClass>,
    /// `Some(H)` when numeric points were tested up to `|n| ≤ H`.
    pub horizon: Option<usize>,
}

impl OrbitPartition {
    /// `Σ_j (|Y_j| − 1)` over all classes.
    fn excess(&self) -> u64 {
        let exact: u64 = self.classes.iter().map(|c| c.exponents.len() as u64 - 1).sum();
        let generic: u64 = self
            .generic_classes
            .iter()
            .map(|g| g.members.len() as u64 - u64::from(g.linked_exact.is_none()))
            .sum();
        exact + generic
    }

    fn has_generic_links(&self) -> bool {
        self.generic_classes.iter().any(|g| g.members.len() > 1 || g.linked_exact.is_some())
    }
}

fn orbit_step(t: f64, t2: f64, tol: f64, theta: &Theta, horizon: usize) -> Option<i64> {
    (1..=horizon as i64)
        .flat_map(|n| [n, -n])
        .find(|&n| circle_dist(t2, t + theta.frac_mul(n)) < tol)
}

/// Splits `Y` into rotation orbits. Exact points share an orbit iff their
/// rational parts agree; numeric points are compared for `0 < |n| ≤ horizon`.
pub fn partition_orbits(y: &ZeroSet, theta: &Theta, horizon: usize) -> Result<OrbitPartition> {
    if horizon == 0 {
        return Err(Error::Parameter("horizon must be at least 1".into()));
    }
    let mut by_a: BTreeMap<_, Vec<i64>> = BTreeMap::new();
    for p in &y.exact {
        by_a.entry(p.a()).or_default().push(p.b());
    }
    let classes: Vec<OrbitClass> = by_a
        .into_iter()
        .map(|(a, mut bs)| {
            bs.sort_unstable();
            let b0 = bs[0];
            OrbitClass { rep: AngleZT::new(a, b0), exponents: bs.iter().map(|b| b - b0).collect() }
        })
        .collect();

    // union-find over numeric points with offsets relative to the root
    let g = &y.generic;
    let mut parent: Vec<usize> = (0..g.len()).collect();
    let mut offset = vec![0i64; g.len()];
    fn find(parent: &mut [usize], offset: &mut [i64], i: usize) -> (usize, i64) {
        if parent[i] == i {
            return (i, 0);
        }
        let (r, o) = find(parent, offset, parent[i]);
        parent[i] = r;
        offset[i] += o;
        (r, offset[i])
    }
    for i in 0..g.len() {
        for j in 0..i {
            let tol = g[i].tol().max(g[j].tol());
            if let Some(n) = orbit_step(g[j].t(), g[i].t(), tol, theta, horizon) {
                // g[i] = φⁿ g[j]
                let (ri, oi) = find(&mut parent, &mut offset, i);
                let (rj, oj) = find(&mut parent, &mut offset, j);
                if ri != rj {
                    parent[ri] = rj;
                    offset[ri] = oj + n - oi;
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..g.len() {
        let (r, _) = find(&mut parent, &mut offset, i);
        groups.entry(r).or_default().push(i);
    }
    let mut generic_classes = Vec::new();
    for (_, idx) in groups {
        let mut members: Vec<(i64, GenericAngle)> = idx
            .iter()
            .map(|&i| (find(&mut parent, &mut offset, i).1, g[i]))
            .collect();
        members.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.t().total_cmp(&b.1.t())));
        let base = members[0].0;
        let linked_exact = classes.iter().position(|c| {
            let t = c.rep.turns(theta);
            members.iter().any(|(_, m)| orbit_step(t, m.t(), m.tol(), theta, horizon).is_some())
        });
        generic_classes.push(GenericClass {
            offsets: members.iter().map(|(o, _)| o - base).collect(),
            members: members.into_iter().map(|(_, m)| m).collect(),
            linked_exact,
        });
    }
    generic_classes.sort_by(|a, b| a.members[0].t().total_cmp(&b.members[0].t()));
    Ok(OrbitPartition {
        classes,
        generic_classes,
        horizon: (!y.generic.is_empty()).then_some(horizon),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SimplicityVerdict {
    Simple,
    NotSimple,
    SimpleWithinHorizon(usize),
}

/// Simplicity (equivalently, uniqueness of the trace): every orbit meets `Y`
/// at most once and `Y` has no interior.
pub fn is_simple(y: &ZeroSet, theta: &Theta, horizon: usize) -> Result<SimplicityVerdict> {
    if !y.arcs.is_empty() {
        return Ok(SimplicityVerdict::NotSimple);
    }
    let part = partition_orbits(y, theta, horizon)?;
    if part.classes.iter().any(|c| c.exponents.len() > 1) || part.has_generic_links() {
        return Ok(SimplicityVerdict::NotSimple);
    }
    Ok(match part.horizon {
        Some(h) => SimplicityVerdict::SimpleWithinHorizon(h),
        None => SimplicityVerdict::Simple,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceDimension {
    Finite(u64),
    /// `Y` contains an arc; `witness` is the least `n ≥ 1` whose rotation moves
    /// the arc onto itself in part.
    Infinite { witness: i64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceDimensionReport {
    pub dimension: TraceDimension,
    /// False when numeric zeros were involved.
    pub exact: bool,
    pub note: Option<String>,
}

/// `1 + Σ_j (|Y_j| − 1)` over orbit classes.
pub fn trace_dimension(y: &ZeroSet, theta: &Theta) -> Result<TraceDimensionReport> {
    if let Some(arc) = y.arcs.iter().max_by(|a, b| a.len.total_cmp(&b.len)) {
        let witness = (1..).find(|&n| {
            let f = theta.frac_mul(n);
            f.min(1.0 - f) < arc.len
        });
        return Ok(TraceDimensionReport {
            dimension: TraceDimension::Infinite { witness: witness.expect("θ irrational") },
            exact: theta.is_exact(),
            note: Some("zero set has positive measure".into()),
        });
    }
    if y.is_empty() {
        return Ok(TraceDimensionReport {
            dimension: TraceDimension::Finite(1),
            exact: true,
            note: Some("γ invertible: the algebra is the rotation algebra A_θ".into()),
        });
    }
    let part = partition_orbits(y, theta, DEFAULT_HORIZON)?;
    Ok(TraceDimensionReport {
        dimension: TraceDimension::Finite(1 + part.excess()),
        exact: part.horizon.is_none(),
        note: None,
    })
}

/// `haar_weight·Haar + Σ w_i δ_{x_i}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasureCombo {
    pub haar_weight: f64,
    pub atoms: Vec<(ZeroPoint, f64)>,
}

impl MeasureCombo {
    pub fn haar() -> Self {
        Self { haar_weight: 1.0, atoms: Vec::new() }
    }

    pub fn total_mass(&self) -> f64 {
        self.haar_weight + self.atoms.iter().map(|a| a.1).sum::<f64>()
    }
}

/// Haar measure plus, for each pair of consecutive zeros `φ^{m_{i−1}} z, φ^{m_i} z`
/// of an orbit class, the uniform measure on `φ^{m_{i−1}+1} z, …, φ^{m_i} z`.
pub fn extreme_traces(y: &ZeroSet, theta: &Theta) -> Result<Vec<MeasureCombo>> {
    if !y.arcs.is_empty() || !y.generic.is_empty() {
        return Err(Error::Precondition("extreme traces need a finite set of exact zeros".into()));
    }
    let part = partition_orbits(y, theta, 1)?;
    let mut out = vec![MeasureCombo::haar()];
    for c in &part.classes {
        for w in c.exponents.windows(2) {
            let len = w[1] - w[0];
            let weight = 1.0 / len as f64;
            let atoms = (w[0] + 1..=w[1]).map(|j| (ZeroPoint::Exact(c.rep.rotate(j)), weight)).collect();
            out.push(MeasureCombo { haar_weight: 0.0, atoms });
        }
    }
    Ok(out)
}

/// Test functions `c_Y(t)·e^{2πikt}` (`|k| ≤ degree`) plus `1`, where
/// `c_Y = Π(1 − hat_y)` vanishes on `Y` and equals 1 away from it.
struct Cutoff {
    pts: Vec<f64>,
    arcs: Vec<Arc>,
    delta: f64,
}

impl Cutoff {
    fn new(y: &ZeroSet, theta: &Theta) -> Self {
        let pts: Vec<f64> = y.points().iter().map(|p| p.turns(theta)).collect();
        let mut gap: f64 = 0.5;
        let ends: Vec<f64> = pts
            .iter()
            .copied()
            .chain(y.arcs.iter().flat_map(|a| [a.start, a.start + a.len]))
            .collect();
        for i in 0..ends.len() {
            for j in 0..i {
                let d = circle_dist(ends[i], ends[j]);
                if d > 0.0 {
                    gap = gap.min(d);
                }
            }
        }
        Self { pts, arcs: y.arcs.clone(), delta: 0.25 * gap }
    }

    fn eval(&self, t: f64) -> f64 {
        let hat = |d: f64| (1.0 - d / self.delta).max(0.0);
        let a: f64 = self.pts.iter().map(|&y| 1.0 - hat(circle_dist(t, y))).product();
        let b: f64 = self.arcs.iter().map(|arc| 1.0 - hat(arc.dist(t))).product();
        a * b
    }

    fn breakpoints(&self, shift: f64) -> Vec<f64> {
        let d = self.delta;
        let mut b: Vec<f64> = self
            .pts
            .iter()
            .flat_map(|&y| [y - d, y, y + d])
            .chain(self.arcs.iter().flat_map(|a| [a.start - d, a.start, a.start + a.len, a.start + a.len + d]))
            .map(|x| (x + shift).rem_euclid(1.0))
            .collect();
        b.extend([0.0, 1.0]);
        b
    }
}

/// `max_f |∫ f∘φ^{-1} dμ − ∫ f dμ|` over the cutoff test family.
pub fn verify_trace_invariance(mu: &MeasureCombo, y: &ZeroSet, theta: &Theta, test_degree: usize) -> Result<f64> {
    if test_degree == 0 {
        return Err(Error::Parameter("test degree must be at least 1".into()));
    }
    let cut = Cutoff::new(y, theta);
    let th = theta.value();
    let mut breaks = cut.breakpoints(0.0);
    breaks.extend(cut.breakpoints(th));
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let rule = PanelRule::new(20);
    let atoms: Vec<(f64, f64)> = mu.atoms.iter().map(|(p, w)| (p.turns(theta), *w)).collect();

    let residual = |k: Option<i64>| -> f64 {
        let f = |t: f64| -> Complex64 {
            match k {
                None => Complex64::new(1.0, 0.0),
                Some(k) => cis(k as f64 * t) * cut.eval(t),
            }
        };
        let mut diff = Complex64::new(0.0, 0.0);
        if mu.haar_weight != 0.0 {
            let shifted: Complex64 = rule.integrate_breaks(&breaks, 4, |t| f(t - th));
            let plain: Complex64 = rule.integrate_breaks(&breaks, 4, f);
            diff += (shifted - plain) * mu.haar_weight;
        }
        for &(x, w) in &atoms {
            diff += (f(x - th) - f(x)) * w;
        }
        diff.norm()
    };
    let d = test_degree as i64;
    let worst = std::iter::once(None)
        .chain((-d..=d).map(Some))
        .map(residual)
        .fold(0.0, f64::max);
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theta::Rational;
    use proptest::prelude::*;

    fn pt(n: i64, d: i64, b: i64) -> AngleZT {
        AngleZT::new(Rational::new(n, d), b)
    }

    fn ys(points: &[AngleZT]) -> ZeroSet {
        ZeroSet::from_exact(points.to_vec()).unwrap()
    }

    #[test]
    fn partition_examples() {
        let th = Theta::golden();
        let p = partition_orbits(&ys(&[pt(1, 2, 0), pt(1, 2, 3)]), &th, 10).unwrap();
        assert_eq!(p.classes, vec![OrbitClass { rep: pt(1, 2, 0), exponents: vec![0, 3] }]);
        let p = partition_orbits(&ys(&[pt(1, 2, 0), pt(1, 3, 0)]), &th, 10).unwrap();
        assert_eq!(p.classes.len(), 2);
        let p = partition_orbits(&ys(&[pt(1, 2, 0)]), &th, 10).unwrap();
        assert_eq!(p.classes[0].exponents, vec![0]);
        assert!(p.horizon.is_none());
    }

    #[test]
    fn simplicity_examples() {
        let th = Theta::golden();
        assert_eq!(is_simple(&ys(&[pt(1, 2, 0)]), &th, 10).unwrap(), SimplicityVerdict::Simple);
        assert_eq!(is_simple(&ys(&[pt(1, 5, 0), pt(1, 5, 5)]), &th, 10).unwrap(), SimplicityVerdict::NotSimple);
        assert_eq!(is_simple(&ys(&[pt(1, 2, 0), pt(1, 3, 0)]), &th, 10).unwrap(), SimplicityVerdict::Simple);
    }

    #[test]
    fn dimension_examples() {
        let th = Theta::golden();
        let dim = |p: &[AngleZT]| trace_dimension(&ys(p), &th).unwrap().dimension;
        assert_eq!(dim(&[pt(1, 2, 0)]), TraceDimension::Finite(1));
        assert_eq!(dim(&[pt(1, 2, 0), pt(1, 2, 3)]), TraceDimension::Finite(2));
        assert_eq!(dim(&[pt(1, 2, 0), pt(1, 2, 2), pt(1, 2, 7), pt(1, 3, 0)]), TraceDimension::Finite(3));
        let empty = trace_dimension(&ZeroSet::empty(), &th).unwrap();
        assert_eq!(empty.dimension, TraceDimension::Finite(1));
        assert!(empty.note.is_some());
    }

    #[test]
    fn arcs_are_infinite_and_not_simple() {
        let th = Theta::golden();
        let y = ZeroSet::new(vec![], vec![], vec![Arc::new(0.1, 0.05).unwrap()], &th).unwrap();
        assert_eq!(is_simple(&y, &th, 10).unwrap(), SimplicityVerdict::NotSimple);
        match trace_dimension(&y, &th).unwrap().dimension {
            TraceDimension::Infinite { witness } => {
                let f = th.frac_mul(witness);
                assert!(f.min(1.0 - f) < 0.05);
            }
            other => panic!("{other:?}"),
        }
        assert!(extreme_traces(&y, &th).is_err());
    }

    #[test]
    fn generic_points_within_horizon() {
        let th = Theta::golden();
        let t0 = 0.123456789;
        let g0 = GenericAngle::new(t0, 1e-9).unwrap();
        let g1 = GenericAngle::new(t0 + th.frac_mul(7), 1e-9).unwrap();
        let y = ZeroSet::new(vec![], vec![g0], vec![], &th).unwrap();
        assert_eq!(is_simple(&y, &th, 50).unwrap(), SimplicityVerdict::SimpleWithinHorizon(50));
        let y2 = ZeroSet::new(vec![], vec![g0, g1], vec![], &th).unwrap();
        assert_eq!(is_simple(&y2, &th, 50).unwrap(), SimplicityVerdict::NotSimple);
        let p = partition_orbits(&y2, &th, 50).unwrap();
        assert_eq!(p.generic_classes.len(), 1);
        assert_eq!(p.generic_classes[0].offsets, vec![0, 7]);
        let dim = trace_dimension(&y2, &th).unwrap();
        assert_eq!(dim.dimension, TraceDimension::Finite(2));
        assert!(!dim.exact);
        // beyond the horizon the link is not found
        assert_eq!(is_simple(&y2, &th, 5).unwrap(), SimplicityVerdict::SimpleWithinHorizon(5));
    }

    #[test]
    fn extreme_trace_examples() {
        let th = Theta::golden();
        let z = pt(1, 2, 0);
        let tr = extreme_traces(&ys(&[z, z.rotate(3)]), &th).unwrap();
        assert_eq!(tr.len(), 2);
        assert_eq!(tr[0], MeasureCombo::haar());
        let atoms: Vec<_> = tr[1].atoms.iter().map(|(p, w)| (*p, *w)).collect();
        assert_eq!(
            atoms,
            (1..=3).map(|j| (ZeroPoint::Exact(z.rotate(j)), 1.0 / 3.0)).collect::<Vec<_>>()
        );
        assert_eq!(extreme_traces(&ys(&[z]), &th).unwrap(), vec![MeasureCombo::haar()]);
        let tr = extreme_traces(&ys(&[z, z.rotate(2)]), &th).unwrap();
        assert_eq!(tr[1].atoms.len(), 2);
        assert!(tr[1].atoms.iter().all(|a| a.1 == 0.5));
    }

    #[test]
    fn invariance_residuals() {
        let th = Theta::golden();
        let z = pt(1, 2, 0);
        let y = ys(&[z, z.rotate(3)]);
        for mu in extreme_traces(&y, &th).unwrap() {
            assert!(verify_trace_invariance(&mu, &y, &th, 6).unwrap() <= 1e-10);
        }
        // atom off the zero orbit
        let y1 = ys(&[z]);
        let bad = MeasureCombo { haar_weight: 0.0, atoms: vec![(ZeroPoint::Exact(pt(1, 7, 0)), 1.0)] };
        assert!(verify_trace_invariance(&bad, &y1, &th, 4).unwrap() > 0.1);
        assert!(verify_trace_invariance(&MeasureCombo::haar(), &y1, &th, 0).is_err());
    }

    fn fixture() -> impl Strategy<Value = Vec<AngleZT>> {
        prop::collection::btree_set((0i64..4, 0i64..12), 1..6).prop_map(|s| {
            s.into_iter().map(|(a, b)| AngleZT::new(Rational::new(a, 4), b)).collect()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn simple_iff_dimension_one(points in fixture()) {
            let th = Theta::golden();
            let y = ys(&points);
            let simple = is_simple(&y, &th, 10).unwrap() == SimplicityVerdict::Simple;
            let dim = trace_dimension(&y, &th).unwrap().dimension;
            prop_assert_eq!(simple, dim == TraceDimension::Finite(1));
            let traces = extreme_traces(&y, &th).unwrap();
            prop_assert_eq!(TraceDimension::Finite(traces.len() as u64), dim);
        }

        #[test]
        fn extreme_traces_are_invariant(points in fixture()) {
            let th = Theta::golden();
            let y = ys(&points);
            for mu in extreme_traces(&y, &th).unwrap() {
                prop_assert!((mu.total_mass() - 1.0).abs() < 1e-12);
                prop_assert!(verify_trace_invariance(&mu, &y, &th, 3).unwrap() <= 1e-10);
            }
        }

        #[test]
        fn partition_ignores_order(points in fixture(), seed in any::<u64>()) {
            let th = Theta::golden();
            let mut shuffled = points.clone();
            let n = shuffled.len();
            for i in 0..n {
                shuffled.swap(i, (seed as usize).wrapping_add(i * 7) % n);
            }
            prop_assert_eq!(
                partition_orbits(&ys(&points), &th, 5).unwrap(),
                partition_orbits(&ys(&shuffled), &th, 5).unwrap()
            );
        }
    }
}
