use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::orbit_offsets;
use crate::error::{Error, Result};
use crate::theta::Theta;

/// Number of random starting points.
pub const AUDIT_STARTS: usize = 32;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquidistributionAudit {
    pub n: usize,
    pub arcs: usize,
    pub seed: u64,
    /// `max |count/n − 1/N|` over arcs and starting points.
    pub max_deviation: f64,
    /// Set when the deviation exceeds `1/(2N)`.
    pub flagged: bool,
}

pub fn equidistribution_audit(theta: &Theta, n: usize, arcs: usize, seed: u64) -> Result<EquidistributionAudit> {
    if arcs < 2 {
        return Err(Error::Parameter(format!("N_arcs = {arcs} must be at least 2")));
    }
    if n == 0 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    let offs = orbit_offsets(theta, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let expected = 1.0 / arcs as f64;
    let mut worst = 0.0f64;
    let mut counts = vec![0usize; arcs];
    for _ in 0..AUDIT_STARTS {
        let x: f64 = rng.random();
        counts.iter_mut().for_each(|c| *c = 0);
        for &o in &offs {
            let t = (x + o).fract();
            counts[((t * arcs as f64) as usize).min(arcs - 1)] += 1;
        }
        for &c in &counts {
            worst = worst.max((c as f64 / n as f64 - expected).abs());
        }
    }
    Ok(EquidistributionAudit { n, arcs, seed, max_deviation: worst, flagged: worst > 0.5 * expected })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_is_equidistributed() {
        let a = equidistribution_audit(&Theta::golden(), 100_000, 16, 0).unwrap();
        assert!(a.max_deviation <= 5e-4, "{}", a.max_deviation);
        assert!(!a.flagged);
    }

    #[test]
    fn tiny_n_bounded() {
        let a = equidistribution_audit(&Theta::golden(), 16, 16, 0).unwrap();
        assert!(a.max_deviation <= 1.0);
    }

    #[test]
    fn third_is_flagged() {
        let th = Theta::decimal("0.3333333333", crate::theta::DEFAULT_DECIMAL_DEPTH).unwrap();
        let a = equidistribution_audit(&th, 100_000, 16, 0).unwrap();
        assert!(a.flagged && a.max_deviation > 0.2, "{}", a.max_deviation);
        assert!(equidistribution_audit(&th, 10, 1, 0).is_err());
    }
}
