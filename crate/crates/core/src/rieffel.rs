//! Projections `p = g·y + f + h·y*` with `y = x^k` (or `(x*)^k`) and trace
//! `frac(kθ)`, their defining identities, and finite-dimensional shadows.
//!
//! With `x f(t) = f(t−θ) x`, `x*x = β²(t)` and `xx* = β²(t−θ)`, a step `y`
//! of shift `s` satisfies `y f(t) = f(t−s) y`, `y*y = A(t)`, `yy* = A(t−s)`.
//! Then `p = p* = p²` reduces to
//!
//! * `g(t) g(t−s) = 0`
//! * `g(t) (1 − f(t) − f(t−s)) = 0`
//! * `f − f² = |g(t)|² A(t−s) + |g(t+s)|² A(t)`
//!
//! with `h(t) = conj g(t+s)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::angle::circle_dist;
use crate::error::{Error, Result};
use crate::gamma::GammaSpec;
use crate::ncpoly::{op_norm, ClockShiftRep};
use crate::quad::PanelRule;
use crate::theta::{Rational, Theta};

/// Whether `y = x^k` or `y = (x*)^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Forward,
    /// Used when `frac(kθ) ≥ 1/2`; the emitted projection is `1 − p`.
    Reflected,
}

#[derive(Clone, Debug, PartialEq)]
enum Shape {
    Rieffel { eps: f64 },
    /// `f ≡ c`, `g ≡ h ≡ 0`.
    Constant(f64),
}

/// Piecewise description of `f, g, h`.
#[derive(Clone, Debug)]
pub struct ProjectionCandidate {
    theta: Theta,
    gamma: GammaSpec,
    k: u32,
    mode: Mode,
    /// Shift of `y`: `frac(kθ)` forward, `1 − frac(kθ)` reflected.
    s: f64,
    /// Target trace `frac(kθ)`.
    alpha: f64,
    /// Rotation `β_c(t) = β(t + c)` moving the zeros of γ off the orbit of 0.
    offset: Rational,
    shape: Shape,
    perturbation: Option<(f64, f64, f64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CandidateSummary {
    pub k: u32,
    pub mode: Mode,
    pub alpha: f64,
    pub shift: f64,
    pub epsilon: Option<f64>,
    pub offset: String,
    pub trace: f64,
}

fn frac(x: f64) -> f64 {
    let y = x - x.floor();
    if y >= 1.0 {
        0.0
    } else {
        y
    }
}

impl ProjectionCandidate {
    /// The projection `c·1` (`c ∈ {0, 1}`) in candidate form.
    pub fn constant(theta: &Theta, gamma: &GammaSpec, value: f64) -> Self {
        Self {
            theta: theta.clone(),
            gamma: gamma.clone(),
            k: 0,
            mode: Mode::Forward,
            s: 0.0,
            alpha: value,
            offset: Rational::from_integer(0),
            shape: Shape::Constant(value),
            perturbation: None,
        }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn shift(&self) -> f64 {
        self.s
    }

    pub fn offset(&self) -> Rational {
        self.offset
    }

    pub fn epsilon(&self) -> Option<f64> {
        match self.shape {
            Shape::Rieffel { eps } => Some(eps),
            Shape::Constant(_) => None,
        }
    }

    /// Adds `delta` to `f` on `[lo, hi]`.
    pub fn perturb_f(&self, lo: f64, hi: f64, delta: f64) -> Self {
        Self { perturbation: Some((lo, hi, delta)), ..self.clone() }
    }

    fn beta_c(&self, t: f64) -> f64 {
        let c = *self.offset.numer() as f64 / *self.offset.denom() as f64;
        self.gamma.beta(t + c, &self.theta)
    }

    /// `A(t) = y*y`.
    pub fn a_y(&self, t: f64) -> f64 {
        a_product(|t| self.beta_c(t), self.theta.value(), self.k, self.mode, t)
    }

    /// `f` of the inner projection `p₀` (before the reflection `1 − p₀`).
    pub fn f(&self, t: f64) -> f64 {
        let t = frac(t);
        let mut v = match self.shape {
            Shape::Constant(c) => c,
            Shape::Rieffel { eps } => ramp_f(t, self.s, eps),
        };
        if let Some((lo, hi, d)) = self.perturbation {
            if (lo..=hi).contains(&t) {
                v += d;
            }
        }
        v
    }

    /// `g` of `p₀`: `√(f − f²)/√A(t − s)` on `[s, s + ε]`, zero elsewhere.
    pub fn g(&self, t: f64) -> f64 {
        let t = frac(t);
        match self.shape {
            Shape::Constant(_) => 0.0,
            Shape::Rieffel { eps } => {
                if t <= self.s || t >= self.s + eps {
                    return 0.0;
                }
                let f = ramp_f(t, self.s, eps);
                let a = self.a_y(t - self.s);
                ((f - f * f).max(0.0) / a).sqrt()
            }
        }
    }

    /// `h(t) = conj g(t + s)` (g is real).
    pub fn h(&self, t: f64) -> f64 {
        self.g(t + self.s)
    }

    /// Trace of the emitted projection (closed form).
    pub fn trace(&self) -> f64 {
        match (self.shape.clone(), self.mode) {
            (Shape::Constant(c), _) => c,
            (Shape::Rieffel { .. }, Mode::Forward) => self.s,
            (Shape::Rieffel { .. }, Mode::Reflected) => 1.0 - self.s,
        }
    }

    /// `∫₀¹ f` by panel quadrature over the breakpoints of `f` (of `p₀`).
    pub fn integral_f(&self) -> f64 {
        let mut br = vec![0.0, 1.0];
        if let Shape::Rieffel { eps } = self.shape {
            br.extend([eps, self.s, self.s + eps]);
        }
        if let Some((lo, hi, _)) = self.perturbation {
            br.extend([lo, hi]);
        }
        br.sort_by(f64::total_cmp);
        PanelRule::new(8).integrate_breaks(&br, 1, |t| self.f(t))
    }

    pub fn summary(&self) -> CandidateSummary {
        CandidateSummary {
            k: self.k,
            mode: self.mode,
            alpha: self.alpha,
            shift: self.s,
            epsilon: self.epsilon(),
            offset: self.offset.to_string(),
            trace: self.trace(),
        }
    }

    /// `(t, f, g, h)` of the emitted projection on `n` equispaced points.
    pub fn samples(&self, n: usize) -> Vec<[f64; 4]> {
        let sign = if self.mode == Mode::Reflected { -1.0 } else { 1.0 };
        (0..n)
            .map(|i| {
                let t = i as f64 / n as f64;
                let f = self.f(t);
                let f = if self.mode == Mode::Reflected { 1.0 - f } else { f };
                [t, f, sign * self.g(t), sign * self.h(t)]
            })
            .collect()
    }
}

fn ramp_f(t: f64, s: f64, eps: f64) -> f64 {
    if t < eps {
        t / eps
    } else if t <= s {
        1.0
    } else if t < s + eps {
        1.0 - (t - s) / eps
    } else {
        0.0
    }
}

fn a_product(beta: impl Fn(f64) -> f64, theta: f64, k: u32, mode: Mode, t: f64) -> f64 {
    match mode {
        Mode::Forward => (0..k).map(|j| beta(t + j as f64 * theta).powi(2)).product(),
        Mode::Reflected => (1..=k).map(|j| beta(t - j as f64 * theta).powi(2)).product(),
    }
}

/// Offsets tried, in order, to move the zeros of γ off `{nθ}`.
fn offset_candidates() -> impl Iterator<Item = Rational> {
    (2i64..).flat_map(|d| (1..d).map(move |n| Rational::new(n, d))).filter(|r| *r.denom() >= 2)
}

fn choose_offset(gamma: &GammaSpec) -> Rational {
    let ys = gamma.zero_set().exact();
    let hits = |c: Rational| ys.iter().any(|z| z.a() == c - c.floor());
    if !hits(Rational::from_integer(0)) {
        return Rational::from_integer(0);
    }
    offset_candidates().find(|c| !hits(*c) && !ys.iter().any(|z| z.a() == *c)).expect("finitely many zeros")
}

const WINDOW_SAMPLES: usize = 256;

/// Builds the candidate for trace `frac(kθ)`. `epsilon = None` selects the
/// largest `ε ∈ {s/4, s/8, …}` for which `A` stays above half of `A(0)` on
/// `[0, ε]`, subject to `ε < s` and `s + ε < 1/2`.
pub fn build_projection(gamma: &GammaSpec, theta: &Theta, k: u32, epsilon: Option<f64>) -> Result<ProjectionCandidate> {
    if k == 0 {
        return Err(Error::Parameter("k must be positive".into()));
    }
    if !gamma.zero_set().is_finite() {
        return Err(Error::Precondition("γ must have finitely many zeros".into()));
    }
    let alpha = theta.frac_mul(k as i64);
    let (mode, s) = if alpha < 0.5 { (Mode::Forward, alpha) } else { (Mode::Reflected, 1.0 - alpha) };
    let offset = choose_offset(gamma);
    let mut cand = ProjectionCandidate {
        theta: theta.clone(),
        gamma: gamma.clone(),
        k,
        mode,
        s,
        alpha,
        offset,
        shape: Shape::Constant(0.0),
        perturbation: None,
    };
    let c = *offset.numer() as f64 / *offset.denom() as f64;
    // numeric zeros are only known approximately: keep them off the sampled orbit too
    for z in gamma.zero_set().generic() {
        let steps: Vec<i64> = match mode {
            Mode::Forward => (0..k as i64).collect(),
            Mode::Reflected => (1..=k as i64).map(|j| -j).collect(),
        };
        for j in steps {
            if circle_dist(z.t() - c, theta.frac_mul(j)) <= z.tol() {
                return Err(Error::Precondition(format!("numeric zero t={} lies on the orbit point {j}θ", z.t())));
            }
        }
    }
    let a0 = cand.a_y(0.0);
    if a0.is_nan() || a0 <= 0.0 {
        return Err(Error::Precondition(format!("β vanishes on the orbit of the base point (A(0) = {a0})")));
    }
    let admissible = |e: f64| e > 0.0 && e < s && s + e < 0.5;
    let window_ok = |e: f64| (0..=WINDOW_SAMPLES).all(|i| cand.a_y(e * i as f64 / WINDOW_SAMPLES as f64) > 0.5 * a0);
    let eps = match epsilon {
        Some(e) => {
            if !admissible(e) {
                return Err(Error::Parameter(format!("ε = {e} must satisfy 0 < ε < {s} and {s} + ε < 1/2")));
            }
            let min_a = (0..=WINDOW_SAMPLES)
                .map(|i| cand.a_y(e * i as f64 / WINDOW_SAMPLES as f64))
                .fold(f64::INFINITY, f64::min);
            if min_a.is_nan() || min_a <= 0.0 {
                return Err(Error::Precondition(format!("β vanishes inside the window [0, {e}]")));
            }
            e
        }
        None => {
            let mut e = s / 4.0;
            let mut found = None;
            for _ in 0..40 {
                if admissible(e) && window_ok(e) {
                    found = Some(e);
                    break;
                }
                e /= 2.0;
            }
            found.ok_or_else(|| Error::Precondition("no admissible ε: β nearly vanishes at the base point".into()))?
        }
    };
    cand.shape = Shape::Rieffel { eps };
    Ok(cand)
}

/// Max-abs residuals of the three identities on a grid, and the trace checks.
#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    pub grid: usize,
    pub r_gg: f64,
    pub r_g1f: f64,
    pub r_ff: f64,
    pub integral_f: f64,
    pub trace: f64,
    pub pass: bool,
}

/// Residual threshold for a pass.
pub const RESIDUAL_TOL: f64 = 1e-10;

pub fn verify_projection(cand: &ProjectionCandidate, grid: usize) -> Result<ResidualReport> {
    if grid < 1000 {
        return Err(Error::Parameter(format!("grid {grid} below 1000")));
    }
    let s = cand.s;
    let (mut r1, mut r2, mut r3) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..grid {
        let t = i as f64 / grid as f64;
        let (f, g) = (cand.f(t), cand.g(t));
        let (fm, gm, gp) = (cand.f(t - s), cand.g(t - s), cand.g(t + s));
        r1 = r1.max((g * gm).abs());
        r2 = r2.max((g * (1.0 - f - fm)).abs());
        let rhs = g * g * cand.a_y(t - s) + gp * gp * cand.a_y(t);
        r3 = r3.max((f - f * f - rhs).abs());
    }
    let integral = cand.integral_f();
    let trace = if cand.mode == Mode::Reflected && matches!(cand.shape, Shape::Rieffel { .. }) {
        1.0 - integral
    } else {
        integral
    };
    Ok(ResidualReport {
        grid,
        r_gg: r1,
        r_g1f: r2,
        r_ff: r3,
        integral_f: integral,
        trace,
        pass: r1 <= RESIDUAL_TOL && r2 <= RESIDUAL_TOL && r3 <= RESIDUAL_TOL,
    })
}

/// `‖P² − P‖`, `‖P − P*‖` and the normalized trace of the matrix image.
#[derive(Clone, Debug, Serialize)]
pub struct MatrixCheck {
    pub q: i64,
    pub idempotency_defect: f64,
    pub selfadjoint_defect: f64,
    pub trace: f64,
}

/// Materializes `P = g(V)Y + f(V) + h(V)Y*` with `X = U·β_c(V)` at `θ' = p/q`.
pub fn matrix_check(cand: &ProjectionCandidate, rep: &ClockShiftRep) -> Result<MatrixCheck> {
    let q = rep.q() as usize;
    let u = rep.u_matrix();
    let ts: Vec<f64> = rep
        .v_exponents()
        .iter()
        .map(|&e| e as f64 / rep.q() as f64)
        .collect();
    let diag = |f: &dyn Fn(f64) -> f64| {
        DMatrix::from_fn(q, q, |i, j| if i == j { Complex64::new(f(ts[i]), 0.0) } else { Complex64::new(0.0, 0.0) })
    };
    let x = &u * diag(&|t| cand.beta_c(t));
    let mut y = DMatrix::<Complex64>::identity(q, q);
    let step = if cand.mode == Mode::Forward { x.clone() } else { x.adjoint() };
    for _ in 0..cand.k {
        y = &y * &step;
    }
    let id = DMatrix::<Complex64>::identity(q, q);
    let mut p = diag(&|t| cand.g(t)) * &y + diag(&|t| cand.f(t)) + diag(&|t| cand.h(t)) * y.adjoint();
    if cand.mode == Mode::Reflected && matches!(cand.shape, Shape::Rieffel { .. }) {
        p = &id - p;
    }
    let idem = op_norm(&(&p * &p - &p), 1e-8)?;
    let sa = op_norm(&(&p - p.adjoint()), 1e-8)?;
    let trace = p.trace().re / q as f64;
    Ok(MatrixCheck { q: rep.q(), idempotency_defect: idem, selfadjoint_defect: sa, trace })
}
