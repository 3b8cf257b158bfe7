//! K-groups of `A_{θ,γ}`, the order on `K₀`, and the isomorphism and Morita
//! classification predicates for simple algebras.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gamma::AlgebraSpec;
use crate::orbit::{is_simple, SimplicityVerdict, ZeroSet, DEFAULT_HORIZON};
use crate::theta::Theta;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rank {
    Finite(u64),
    /// Rank of `C(Y, ℤ)`-type groups for infinite `Y`, given via the number of
    /// connected components of `Y`.
    Components { components: u64, descriptor: String },
}

/// `K₀`, `K₁` and the trace pairing `ρ: K₀ → ℝ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KGroups {
    pub k0_rank: Rank,
    pub k1_rank: u64,
    /// Rank of `ker ρ = C(Y, ℤ)/ℤ`.
    pub kernel_rank: Rank,
    pub image_lattice: String,
    pub positivity: String,
    pub note: Option<String>,
}

fn components(y: &ZeroSet, theta: &Theta) -> u64 {
    // merge overlapping arcs, then drop points lying on an arc
    let mut arcs: Vec<(f64, f64)> = y.arcs().iter().map(|a| (a.start, a.start + a.len)).collect();
    arcs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (s, e) in arcs {
        match merged.last_mut() {
            Some(last) if s <= last.1 => last.1 = last.1.max(e),
            _ => merged.push((s, e)),
        }
    }
    if merged.len() > 1 {
        let (first, last) = (merged[0], *merged.last().unwrap());
        if last.1 >= first.0 + 1.0 {
            merged[0].0 = last.0 - 1.0;
            merged[0].1 = merged[0].1.max(last.1 - 1.0);
            merged.pop();
        }
    }
    let on_arc = |t: f64| merged.iter().any(|&(s, e)| (t - s).rem_euclid(1.0) <= e - s);
    let points = y.points().iter().filter(|p| !on_arc(p.turns(theta))).count();
    merged.len() as u64 + points as u64
}

/// `K₁ = ℤ`, `K₀ = ℤ^{n+1}` for `n` zeros, and the rotation-algebra values for empty `Y`.
pub fn compute_kgroups(y: &ZeroSet, theta: &Theta) -> Result<KGroups> {
    let positivity = "x > 0 iff x = 0 or ρ(x) > 0".to_string();
    let image = "Z+Zθ".to_string();
    if y.is_empty() {
        return Ok(KGroups {
            k0_rank: Rank::Finite(2),
            k1_rank: 2,
            kernel_rank: Rank::Finite(0),
            image_lattice: image,
            positivity,
            note: Some("γ invertible: the algebra is the rotation algebra A_θ".into()),
        });
    }
    if let Some(n) = y.len() {
        let n = n as u64;
        return Ok(KGroups {
            k0_rank: Rank::Finite(n + 1),
            k1_rank: 1,
            kernel_rank: Rank::Finite(n - 1),
            image_lattice: image,
            positivity,
            note: None,
        });
    }
    let c = components(y, theta);
    Ok(KGroups {
        k0_rank: Rank::Components { components: c + 1, descriptor: "rank of C(Y,Z) ⊕ Z".into() },
        k1_rank: 1,
        kernel_rank: Rank::Components { components: c - 1, descriptor: "rank of C(Y,Z)/Z".into() },
        image_lattice: image,
        positivity,
        note: Some("Y has positive measure; ranks count connected components".into()),
    })
}

/// Element of `K₀ = C(Y, ℤ)/ℤ ⊕ (ℤ + ℤθ)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct K0Element {
    /// Values on the points of `Y`, modulo constant vectors.
    pub kernel: Vec<i64>,
    /// `ρ(x) = a + bθ`.
    pub a: i64,
    pub b: i64,
}

impl K0Element {
    /// Class of the unit: `ρ = 1`.
    pub fn unit(n_zeros: usize) -> Self {
        Self { kernel: vec![0; n_zeros], a: 1, b: 0 }
    }

    pub fn kernel_is_zero(&self) -> bool {
        self.kernel.windows(2).all(|w| w[0] == w[1])
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0 && self.kernel_is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            kernel: self.kernel.iter().zip(&o.kernel).map(|(x, y)| x + y).collect(),
            a: self.a + o.a,
            b: self.b + o.b,
        }
    }

    pub fn scale(&self, n: i64) -> Self {
        Self { kernel: self.kernel.iter().map(|x| x * n).collect(), a: self.a * n, b: self.b * n }
    }
}

/// `x ∈ K₀₊` iff `x = 0` or `ρ(x) = a + bθ > 0`.
pub fn is_positive(x: &K0Element, theta: &Theta) -> Result<bool> {
    if x.is_zero() {
        return Ok(true);
    }
    Ok(theta.sign_of_affine(x.a, x.b)? == Ordering::Greater)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Iso,
    Morita,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Answer {
    Yes,
    No,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// `θ₁ ≡ sign·θ₂ (mod 1)`, or no such sign.
    ThetaRelation { sign: Option<i64> },
    /// Canonical continued-fraction tails.
    CfTails { tail1: Vec<i64>, tail2: Vec<i64> },
    RankMismatch { kernel1: String, kernel2: String },
    PrecisionExhausted { depth: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassVerdict {
    pub relation: Relation,
    pub result: Answer,
    /// False when decided only within decimal precision or continued-fraction depth.
    pub exact: bool,
    pub witness: Vec<Witness>,
}

fn require_simple(spec: &AlgebraSpec) -> Result<bool> {
    match is_simple(spec.zero_set(), &spec.theta, DEFAULT_HORIZON)? {
        SimplicityVerdict::Simple => Ok(true),
        SimplicityVerdict::SimpleWithinHorizon(_) => Ok(false),
        SimplicityVerdict::NotSimple => Err(Error::Precondition(format!("{spec} is not simple"))),
    }
}

/// Compares `C(Y₁,ℤ)/ℤ` with `C(Y₂,ℤ)/ℤ`: equal ranks for finite zero sets.
fn kernel_comparison(s1: &AlgebraSpec, s2: &AlgebraSpec) -> (Answer, Option<Witness>) {
    match (s1.zero_set().len(), s2.zero_set().len()) {
        (Some(n1), Some(n2)) => {
            let k = |n: usize| format!("Z^{}", n.saturating_sub(1));
            // empty Y gives the rotation algebra, whose K₀ has no kernel either
            let (r1, r2) = (n1.max(1), n2.max(1));
            if r1 == r2 && (n1 == 0) == (n2 == 0) {
                (Answer::Yes, None)
            } else {
                (Answer::No, Some(Witness::RankMismatch { kernel1: k(n1), kernel2: k(n2) }))
            }
        }
        _ => (Answer::Unknown, None),
    }
}

/// `A_{θ₁,γ₁} ≅ A_{θ₂,γ₂}` iff `θ₁ ≡ ±θ₂ (mod ℤ)` and the zero sets have equal size.
pub fn classify_isomorphic(s1: &AlgebraSpec, s2: &AlgebraSpec) -> Result<ClassVerdict> {
    let e1 = require_simple(s1)?;
    let e2 = require_simple(s2)?;
    let (plus, ex_p) = s1.theta.congruent_mod_one(&s2.theta, 1);
    let (minus, ex_m) = s1.theta.congruent_mod_one(&s2.theta, -1);
    let sign = if plus { Some(1) } else if minus { Some(-1) } else { None };
    let (kernel, kw) = kernel_comparison(s1, s2);
    let mut witness = vec![Witness::ThetaRelation { sign }];
    witness.extend(kw);
    let result = match (sign.is_some(), kernel) {
        (false, _) | (_, Answer::No) => Answer::No,
        (true, Answer::Yes) => Answer::Yes,
        _ => Answer::Unknown,
    };
    Ok(ClassVerdict { relation: Relation::Iso, result, exact: e1 && e2 && ex_p && ex_m, witness })
}

fn minimal_rotation(p: &[i64]) -> Vec<i64> {
    (0..p.len())
        .map(|i| p[i..].iter().chain(&p[..i]).copied().collect::<Vec<_>>())
        .min()
        .unwrap_or_default()
}

/// Longest run of the tail of `a` that also occurs as a tail of `b`, found
/// by trying every start offset up to half the depth.
fn decimal_tail_match(a: &[i64], b: &[i64]) -> bool {
    let need = a.len().min(b.len()) / 2;
    (1..=a.len() / 2).any(|i| {
        (1..=b.len() / 2).any(|j| {
            let n = (a.len() - i).min(b.len() - j);
            n >= need && a[i..i + n] == b[j..j + n]
        })
    })
}

/// GL(2,ℤ)-equivalence of θ via continued-fraction tails, combined with the
/// kernel-group comparison.
pub fn classify_morita(s1: &AlgebraSpec, s2: &AlgebraSpec, cf_depth: usize) -> Result<ClassVerdict> {
    let e1 = require_simple(s1)?;
    let e2 = require_simple(s2)?;
    let (kernel, kw) = kernel_comparison(s1, s2);
    let mut witness = Vec::new();
    let (theta_eq, exact) = match (s1.theta.cf_period(), s2.theta.cf_period()) {
        (Some(p1), Some(p2)) => {
            let (t1, t2) = (minimal_rotation(p1), minimal_rotation(p2));
            let eq = t1 == t2;
            witness.push(Witness::CfTails { tail1: t1, tail2: t2 });
            (Some(eq), true)
        }
        _ => {
            let c1 = s1.theta.cf_expand(cf_depth);
            let c2 = s2.theta.cf_expand(cf_depth);
            match (c1, c2) {
                (Ok(c1), Ok(c2)) => {
                    let eq = decimal_tail_match(&c1.terms, &c2.terms);
                    let h = cf_depth / 2;
                    witness.push(Witness::CfTails { tail1: c1.terms[h..].to_vec(), tail2: c2.terms[h..].to_vec() });
                    (Some(eq), false)
                }
                _ => {
                    witness.push(Witness::PrecisionExhausted { depth: cf_depth });
                    (None, false)
                }
            }
        }
    };
    witness.extend(kw);
    let result = match (theta_eq, kernel) {
        (Some(false), _) | (_, Answer::No) => Answer::No,
        (Some(true), Answer::Yes) => Answer::Yes,
        _ => Answer::Unknown,
    };
    Ok(ClassVerdict { relation: Relation::Morita, result, exact: exact && e1 && e2, witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::AngleZT;
    use crate::gamma::GammaSpec;
    use crate::orbit::Arc;
    use crate::Rational;
    use proptest::prelude::*;

    fn spec(s: &str) -> AlgebraSpec {
        AlgebraSpec::parse(s).unwrap()
    }

    #[test]
    fn ranks() {
        let th = Theta::golden();
        let g = GammaSpec::one_plus_z_sq(&th);
        let k = compute_kgroups(g.zero_set(), &th).unwrap();
        assert_eq!((k.k0_rank.clone(), k.k1_rank, k.kernel_rank.clone()), (Rank::Finite(2), 1, Rank::Finite(0)));
        let y3 = GammaSpec::parse("zeros:(1/2,0);(1/3,0);(1/5,0)", &th).unwrap();
        assert_eq!(compute_kgroups(y3.zero_set(), &th).unwrap().k0_rank, Rank::Finite(4));
        let e = compute_kgroups(&ZeroSet::empty(), &th).unwrap();
        assert_eq!((e.k0_rank, e.k1_rank), (Rank::Finite(2), 2));
    }

    #[test]
    fn arc_components() {
        let th = Theta::golden();
        let y = ZeroSet::new(
            vec![AngleZT::new(Rational::new(1, 2), 0)],
            vec![],
            vec![Arc::new(0.95, 0.1).unwrap(), Arc::new(0.02, 0.1).unwrap(), Arc::new(0.3, 0.05).unwrap()],
            &th,
        )
        .unwrap();
        let k = compute_kgroups(&y, &th).unwrap();
        assert!(matches!(k.k0_rank, Rank::Components { components: 4, .. }));
    }

    #[test]
    fn positivity_examples() {
        let th = Theta::golden();
        assert!(is_positive(&K0Element { kernel: vec![], a: 0, b: 0 }, &th).unwrap());
        assert!(is_positive(&K0Element { kernel: vec![], a: -1, b: 2 }, &th).unwrap());
        assert!(!is_positive(&K0Element { kernel: vec![], a: 0, b: -1 }, &th).unwrap());
        assert!(is_positive(&K0Element::unit(3), &th).unwrap());
        // ρ = 0 with a nonzero kernel part is not positive
        assert!(!is_positive(&K0Element { kernel: vec![1, 0], a: 0, b: 0 }, &th).unwrap());
        let dec: Theta = "dec:0.6180339887".parse().unwrap();
        assert!(matches!(
            is_positive(&K0Element { kernel: vec![], a: -6180339887, b: 10000000000 }, &dec),
            Err(Error::Undecidable(_))
        ));
    }

    #[test]
    fn isomorphism_examples() {
        let a = spec("golden@one_plus_z_sq");
        let b = spec("quad:(3,-1,5,2)@zeros:(1/4,0)");
        assert_eq!(classify_isomorphic(&a, &b).unwrap().result, Answer::Yes);
        let two = spec("golden@zeros:(1/2,0);(1/3,0)");
        let three = spec("golden@zeros:(1/2,0);(1/3,0);(1/5,0)");
        assert_eq!(classify_isomorphic(&two, &three).unwrap().result, Answer::No);
        let rotated = spec("golden@zeros:(1/2,1);(1/3,4)");
        let v = classify_isomorphic(&two, &rotated).unwrap();
        assert_eq!(v.result, Answer::Yes);
        assert!(v.exact);
        let non_simple = spec("golden@zeros:(1/2,0);(1/2,3)");
        assert!(matches!(classify_isomorphic(&a, &non_simple), Err(Error::Precondition(_))));
    }

    #[test]
    fn morita_examples() {
        let g = spec("golden@one_plus_z_sq");
        let th = Theta::golden();
        let img = th.gl2_image(1, 0, 1, 1).unwrap();
        let gi = AlgebraSpec::new(img, GammaSpec::one_plus_z_sq(&th));
        let v = classify_morita(&g, &gi, 40).unwrap();
        assert_eq!((v.result, v.exact), (Answer::Yes, true));
        let s = spec("silver@one_plus_z_sq");
        assert_eq!(classify_morita(&g, &s, 40).unwrap().result, Answer::No);
        assert_eq!(classify_morita(&g, &g, 40).unwrap().result, Answer::Yes);
        let g7 = spec("quad:(-2,1,7,3)@one_plus_z_sq");
        let img = g7.theta.gl2_image(2, 1, 1, 1).unwrap();
        let g7i = AlgebraSpec::new(img, g7.gamma.clone());
        assert_eq!(classify_morita(&g7, &g7i, 40).unwrap().result, Answer::Yes);
    }

    #[test]
    fn morita_decimal_within_depth() {
        let g = spec("golden@one_plus_z_sq");
        let d = spec("dec:0.61803398874989484820:depth=30@one_plus_z_sq");
        let v = classify_morita(&g, &d, 20).unwrap();
        assert_eq!((v.result, v.exact), (Answer::Yes, false));
        let short = spec("dec:0.6180339887@one_plus_z_sq");
        let v = classify_morita(&g, &short, 30).unwrap();
        assert_eq!(v.result, Answer::Unknown);
    }

    fn fixtures() -> Vec<AlgebraSpec> {
        [
            "golden@one_plus_z_sq",
            "quad:(3,-1,5,2)@zeros:(1/4,0)",
            "silver@one_plus_z_sq",
            "golden@zeros:(1/2,0);(1/3,0)",
            "silver@zeros:(1/2,0);(1/3,1)",
            "quad:(1,1,5,4)@one_plus_z_sq",
            "quad:(-1,1,3,2)@zeros:(0,0);(1/2,0)",
        ]
        .iter()
        .map(|s| spec(s))
        .collect()
    }

    #[test]
    fn predicates_are_equivalence_relations() {
        let f = fixtures();
        for rel in [0, 1] {
            let r = |a: &AlgebraSpec, b: &AlgebraSpec| {
                let v = if rel == 0 { classify_isomorphic(a, b) } else { classify_morita(a, b, 40) };
                v.unwrap().result == Answer::Yes
            };
            for a in &f {
                assert!(r(a, a));
                for b in &f {
                    assert_eq!(r(a, b), r(b, a));
                    for c in &f {
                        if r(a, b) && r(b, c) {
                            assert!(r(a, c));
                        }
                    }
                }
            }
        }
        for a in &f {
            for b in &f {
                if classify_isomorphic(a, b).unwrap().result == Answer::Yes {
                    assert_eq!(classify_morita(a, b, 40).unwrap().result, Answer::Yes);
                }
            }
        }
    }

    #[test]
    fn kernel_rank_matches_orbits() {
        let th = Theta::golden();
        for s in ["zeros:(1/2,0)", "zeros:(1/2,0);(1/3,0)", "zeros:(1/2,0);(1/3,0);(1/7,2)"] {
            let g = GammaSpec::parse(s, &th).unwrap();
            let y = g.zero_set();
            let part = crate::orbit::partition_orbits(y, &th, 10).unwrap();
            let sum: u64 = part.classes.iter().map(|c| c.exponents.len() as u64).sum();
            assert_eq!(compute_kgroups(y, &th).unwrap().kernel_rank, Rank::Finite(sum - 1));
        }
    }

    proptest! {
        #[test]
        fn positive_cone_closed(a1 in -50i64..50, b1 in -50i64..50, a2 in -50i64..50, b2 in -50i64..50, n in 1i64..20) {
            let th = Theta::golden();
            let x = K0Element { kernel: vec![], a: a1, b: b1 };
            let y = K0Element { kernel: vec![], a: a2, b: b2 };
            if is_positive(&x, &th).unwrap() && is_positive(&y, &th).unwrap() {
                prop_assert!(is_positive(&x.add(&y), &th).unwrap());
            }
            prop_assert_eq!(is_positive(&x.scale(n), &th).unwrap(), is_positive(&x, &th).unwrap());
        }
    }
}
