use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use rotalg::commutant::{self, IdempotentVerdict};
use rotalg::gamma::{AlgebraSpec, GammaSpec};
use rotalg::ktheory::{self, KGroups, Rank};
use rotalg::mathieu::{self, AmoAngle, AmoSpec};
use rotalg::ncpoly::ClockShiftRep;
use rotalg::orbit::{self, SimplicityVerdict, TraceDimension, DEFAULT_HORIZON};
use rotalg::rieffel;
use rotalg::spectral::{self, Direction};
use rotalg::Theta;

use crate::report::{CliError, Output};
use crate::{Cli, Verb};

fn theta(s: &str) -> Result<Theta, CliError> {
    Ok(s.parse::<Theta>()?)
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

fn lambda_ok(l: f64) -> Result<f64, CliError> {
    if l.is_finite() && l >= 0.0 {
        Ok(l)
    } else {
        Err(CliError::Config(format!("--lambda {l} must be a finite number ≥ 0")))
    }
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.verb {
        Verb::Analyze(a) => analyze(&a.theta, &a.gamma),
        Verb::Classify(a) => {
            let s1 = AlgebraSpec::parse(&a.first)?;
            let s2 = AlgebraSpec::parse(&a.second)?;
            let v = match a.relation {
                crate::RelationArg::Iso => ktheory::classify_isomorphic(&s1, &s2)?,
                crate::RelationArg::Morita => ktheory::classify_morita(&s1, &s2, a.cf_depth)?,
            };
            Output::new(json!({"first": s1, "second": s2, "verdict": v}))
        }
        Verb::Rieffel(a) => rieffel_verb(a),
        Verb::Norms(a) => {
            let th = theta(&a.base.theta)?;
            let dir = match a.direction {
                crate::DirectionArg::Forward => Direction::Forward,
                crate::DirectionArg::Inverse => Direction::Inverse,
            };
            let s = spectral::PowerNormSeries::compute(lambda_ok(a.base.lambda)?, &th, &a.n, dir)?;
            let rows = s.entries.iter().map(|e| vec![e.n.to_string(), num(e.value), num(e.argmax)]).collect();
            Ok(Output::new(&s)?.with_table(vec!["n", "value", "argmax"], rows))
        }
        Verb::Radius(a) => {
            let th = theta(&a.base.theta)?;
            let r = spectral::spectral_radius(lambda_ok(a.base.lambda)?, &th, &a.schedule)?;
            let rows = r.series.entries.iter().map(|e| vec![e.n.to_string(), num(e.value), num(e.argmax)]).collect();
            Ok(Output::new(&r)?.with_table(vec!["n", "value", "argmax"], rows))
        }
        Verb::Spectrum(a) => {
            let th = theta(&a.theta)?;
            Output::new(spectral::spectrum_descriptor(a.lambda, &th)?)
        }
        Verb::Brown(a) => {
            let th = theta(&a.base.theta)?;
            let l = lambda_ok(a.base.lambda)?;
            let s = spectral::brown_sample(l, &th, a.n, a.samples, cli.seed)?;
            let verdict = if l > 0.0 { Some(spectral::brown_measure_verdict(l, &th, cli.seed)?) } else { None };
            let target = l.max(1.0).powi(2);
            let quantiles: Vec<(f64, f64)> =
                [0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99].iter().map(|&p| (p, quantile(&s.samples, p))).collect();
            let result = json!({
                "lambda": l, "theta": th, "n": a.n, "samples": a.samples, "seed": cli.seed,
                "median": s.median(),
                "quantiles": quantiles,
                "mass_near_one": s.mass_near(1.0, 0.1),
                "mass_near_target": s.mass_between(0.81 * target, 1.21 * target),
                "verdict": verdict,
            });
            let rows = s.cdf_points().into_iter().map(|(r, c)| vec![num(r), num(c)]).collect();
            Ok(Output::new(result)?.with_table(vec!["radius_sq", "cumulative_mass"], rows))
        }
        Verb::Butterfly(a) => {
            let rows = mathieu::butterfly_dataset(lambda_ok(a.lambda)?, a.qmax)?;
            let table = rows
                .iter()
                .map(|r| vec![r.p.to_string(), r.q.to_string(), r.band_index.to_string(), num(r.e_lo), num(r.e_hi)])
                .collect();
            Ok(Output::new(json!({"lambda": a.lambda, "qmax": a.qmax, "rows": rows}))?
                .with_table(vec!["p", "q", "band_index", "E_lo", "E_hi"], table))
        }
        Verb::Amo(a) => amo(a),
        Verb::Commutant(a) => commutant_verb(a),
    }
}

fn quantile(sorted: &[f64], p: f64) -> f64 {
    let i = ((sorted.len() as f64 - 1.0) * p).round() as usize;
    sorted[i.min(sorted.len() - 1)]
}

fn k0_string(k: &KGroups) -> String {
    match &k.kernel_rank {
        Rank::Finite(0) => k.image_lattice.clone(),
        Rank::Finite(r) => format!("{} ⊕ Z^{r}", k.image_lattice),
        Rank::Components { descriptor, .. } => format!("{} ⊕ {descriptor}", k.image_lattice),
    }
}

fn analyze(theta_s: &str, gamma_s: &str) -> Result<Output, CliError> {
    let th = theta(theta_s)?;
    let gamma = GammaSpec::parse(gamma_s, &th)?;
    let y = gamma.zero_set();
    let simplicity = orbit::is_simple(y, &th, DEFAULT_HORIZON)?;
    let dim = orbit::trace_dimension(y, &th)?;
    let k = ktheory::compute_kgroups(y, &th)?;
    let partition = if y.arcs().is_empty() { Some(orbit::partition_orbits(y, &th, DEFAULT_HORIZON)?) } else { None };
    let trace_dim = match dim.dimension {
        TraceDimension::Finite(n) => json!(n),
        TraceDimension::Infinite { .. } => json!("infinite"),
    };
    let k1 = if k.k1_rank == 1 { "Z".to_string() } else { format!("Z^{}", k.k1_rank) };
    Output::new(json!({
        "algebra": AlgebraSpec::new(th.clone(), gamma.clone()),
        "zero_set": y,
        "simple": simplicity != SimplicityVerdict::NotSimple,
        "simplicity": simplicity,
        "trace_dim": trace_dim,
        "trace_dimension": dim,
        "orbits": partition,
        "K0": k0_string(&k),
        "K1": k1,
        "kgroups": k,
    }))
}

fn rieffel_verb(a: &crate::RieffelArgs) -> Result<Output, CliError> {
    let th = theta(&a.algebra.theta)?;
    let gamma = GammaSpec::parse(&a.algebra.gamma, &th)?;
    let cand = rieffel::build_projection(&gamma, &th, a.k, a.epsilon)?;
    let residuals = rieffel::verify_projection(&cand, a.grid)?;
    let checks = a
        .q
        .iter()
        .map(|&q| rieffel::matrix_check(&cand, &ClockShiftRep::at_denominator(&th, q)?))
        .collect::<rotalg::Result<Vec<_>>>()?;
    let rows = cand
        .samples(a.samples)
        .into_iter()
        .map(|s| s.iter().map(|&x| num(x)).collect())
        .collect();
    Ok(Output::new(json!({
        "theta": th, "gamma": gamma,
        "candidate": cand.summary(),
        "residuals": residuals,
        "matrix_checks": checks,
    }))?
    .with_table(vec!["t", "f", "g", "h"], rows))
}

fn amo(a: &crate::AmoArgs) -> Result<Output, CliError> {
    let angle = match a.theta.split_once('/') {
        Some((p, q)) => {
            let p = p.trim().parse().map_err(|_| CliError::Config(format!("bad fraction {}", a.theta)))?;
            let q = q.trim().parse().map_err(|_| CliError::Config(format!("bad fraction {}", a.theta)))?;
            AmoAngle::Rational { p, q }
        }
        None => AmoAngle::Irrational(theta(&a.theta)?),
    };
    let l = lambda_ok(a.lambda)?;
    #[derive(Serialize)]
    struct Spectrum {
        beta: f64,
        count: usize,
        min: f64,
        max: f64,
    }
    let mut spectra = Vec::new();
    let mut rows = Vec::new();
    for &b in &a.beta {
        let est = mathieu::truncated_spectrum(&AmoSpec::new(l, angle.clone(), b, a.n)?);
        let e = &est.eigenvalues;
        spectra.push(Spectrum { beta: b, count: e.len(), min: e[0], max: e[e.len() - 1] });
        rows.extend(e.iter().enumerate().map(|(i, &x)| vec![num(b), i.to_string(), num(x)]));
    }
    let independence = if a.beta.len() >= 2 { Some(mathieu::beta_independence(l, &angle, a.n, &a.beta)?) } else { None };
    Ok(Output::new(json!({
        "lambda": l, "angle": angle, "N": a.n,
        "spectra": spectra,
        "beta_independence": independence,
    }))?
    .with_table(vec!["beta", "index", "eigenvalue"], rows))
}

fn commutant_verb(a: &crate::CommutantArgs) -> Result<Output, CliError> {
    use crate::CheckArg::*;
    let th = theta(&a.theta)?;
    match a.check {
        Recurrence => {
            let g = commutant::propagate_antidiagonal(&th, a.k, Complex64::new(1.0, 0.0), a.window)?;
            let residual = commutant::recurrence_residual(&g);
            let moduli: Vec<(i64, f64)> =
                (0..a.window).filter_map(|m| g.alpha.get(&(m, -a.k - m)).map(|x| (m, x.norm()))).collect();
            let rows = moduli.iter().map(|(m, x)| vec![m.to_string(), num(*x)]).collect();
            Ok(Output::new(json!({
                "window": g.window, "k": a.k, "residual": residual,
                "l2_norm": g.l2_norm(), "antidiagonal_moduli": moduli,
            }))?
            .with_table(vec!["m", "modulus"], rows))
        }
        Reconstruction => {
            let n = a.window.clamp(0, 24) as usize;
            let lambdas: Vec<Complex64> = (0..=n).map(|k| Complex64::new(1.0 / (k as f64 + 1.0), 0.0)).collect();
            let g = commutant::propagate_quadrant(&th, &lambdas)?;
            let r = commutant::reconstruct(&g)?;
            Output::new(json!({
                "degree": n, "residual": commutant::recurrence_residual(&g),
                "max_deviation": r.max_deviation,
            }))
        }
        Collapse => {
            let w = commutant::l2_collapse_witness(&th, a.k, a.window)?;
            let rows = w.along_denominators.iter().map(|(q, r)| vec![q.to_string(), num(*r)]).collect();
            Ok(Output::new(&w)?.with_table(vec!["m", "ratio"], rows))
        }
        Idempotent => {
            let k = a.window.max(0) as usize;
            let sols = commutant::enumerate_idempotent_solutions(k);
            let verdicts: Vec<IdempotentVerdict> = sols.iter().map(|s| commutant::idempotent_induction(s)).collect();
            let mut half = vec![Complex64::new(0.0, 0.0); k + 1];
            if k >= 1 {
                half[1] = Complex64::new(0.5, 0.0);
            }
            Output::new(json!({
                "K": k, "solutions": sols.len(), "verdicts": verdicts,
                "non_idempotent_example": commutant::idempotent_induction(&half),
            }))
        }
        Fsrk => {
            let z = Complex64::from_polar(1.0, std::f64::consts::TAU * th.value());
            let traj = (0..=a.s)
                .map(|s| commutant::fsrk_eval(z, s, a.r, a.k))
                .collect::<rotalg::Result<Vec<_>>>()?;
            let rows = traj.iter().map(|v| vec![v.s.to_string(), num(v.log_modulus), num(v.winding)]).collect();
            Ok(Output::new(json!({"k": a.k, "r": a.r, "trajectory": traj}))?
                .with_table(vec!["s", "log_modulus", "winding"], rows))
        }
    }
}
