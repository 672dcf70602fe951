//! Explicit coupling thresholds and the trial competitor `(x u₀, x θ v₀)`.
//!
//! For `θ > 0` the pair `(u₀, θ v₀)` is rescaled onto the Nehari manifold;
//! whenever its energy lies below `I(u₀, 0)` and `I(0, v₀)`, no
//! semitrivial pair can be the ground state.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::functionals::Energy;
use crate::grid::{RadialField, RadialGrid, StatePair};
use crate::operator::{lp_norm_pow, RadialOperator};
use crate::params::ProblemParams;
use crate::scalar::{omega_rescale, ScalarGroundState};

/// Search interval for `ε`.
pub const EPS_RANGE: (f64, f64) = (1e-3, 10.0);
const EPS_GRID: usize = 400;
const EPS_TOL: f64 = 1e-8;

/// `½[1 + (n/2)(1-1/q) + ω⁻²(1 - (n/2)(1-1/q))]^q ω^{2q-n(q-1)} - 1`.
pub fn constant_c(p: &ProblemParams) -> f64 {
    let ProblemParams { n, q, omega, .. } = *p;
    let a = 0.5 * n as f64 * (1.0 - 1.0 / q);
    let bracket = 1.0 + a + (1.0 - a) / (omega * omega);
    0.5 * bracket.powf(q) * omega.powf(2.0 * q - n as f64 * (q - 1.0)) - 1.0
}

/// `((2^q - 1)/2) ω^{1+q/2} - ½ ω^{-q/2}`, the one-dimensional threshold for
/// `q ≥ 2`.
pub fn constant_d(q: f64, omega: f64) -> Result<f64> {
    if !(q >= 2.0) || !(omega >= 1.0) || !q.is_finite() || !omega.is_finite() {
        return Err(Error::OutOfScope(format!(
            "D is defined for q >= 2 and omega >= 1 (got q = {q}, omega = {omega})"
        )));
    }
    Ok(0.5 * (2f64.powf(q) - 1.0) * omega.powf(1.0 + 0.5 * q) - 0.5 * omega.powf(-0.5 * q))
}

/// `((1+ε²)^q - 1)/(2ε^q)`.
pub fn prefactor(q: f64, eps: f64) -> f64 {
    // ln_1p/exp_m1 keep precision for small ε.
    let num = (q * (eps * eps).ln_1p()).exp_m1();
    num / (2.0 * eps.powf(q))
}

/// `((1+ε²)^q - 1)/(2ε^q) ω^{q-(n/2)(q-2)} - ½ ε^q ω^{(n/2-1)q}`: coupling
/// strengths at or above this value make the trial state beat `(u₀, 0)`.
pub fn sufficient_bound(q: f64, omega: f64, n: usize, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::NonPositiveEpsilon(eps));
    }
    let half_n = 0.5 * n as f64;
    Ok(prefactor(q, eps) * omega.powf(q - half_n * (q - 2.0))
        - 0.5 * eps.powf(q) * omega.powf((half_n - 1.0) * q))
}

/// `θ = ε ω^{(n - 2q/(q-1))/2}`.
pub fn theta_for(p: &ProblemParams, eps: f64) -> f64 {
    eps * omega_pow(p.omega, -0.5 * p.scaling_exponent())
}

fn omega_pow(omega: f64, e: f64) -> f64 {
    omega.powf(e)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalarMinimum {
    pub eps: f64,
    pub value: f64,
    /// The minimum over the search interval sits at one of its ends, so the
    /// infimum is not attained inside it.
    pub at_boundary: bool,
}

/// Minimizes `f` over `ε ∈ [lo, hi]`: log-spaced scan followed by golden
/// section (in `ln ε`) around the best grid point.
pub fn minimize_over_eps(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> ScalarMinimum {
    let (a, b) = (lo.ln(), hi.ln());
    let xs: Vec<f64> = (0..EPS_GRID)
        .map(|i| a + (b - a) * i as f64 / (EPS_GRID - 1) as f64)
        .collect();
    let vals: Vec<f64> = xs.iter().map(|&x| f(x.exp())).collect();
    let best = (0..EPS_GRID)
        .min_by(|&i, &j| vals[i].total_cmp(&vals[j]))
        .expect("nonempty grid");
    if best == 0 || best == EPS_GRID - 1 {
        return ScalarMinimum {
            eps: xs[best].exp(),
            value: vals[best],
            at_boundary: true,
        };
    }
    let (mut l, mut r) = (xs[best - 1], xs[best + 1]);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = r - g * (r - l);
    let mut d = l + g * (r - l);
    let (mut fc, mut fd) = (f(c.exp()), f(d.exp()));
    while (r.exp() - l.exp()) > EPS_TOL * 0.1 {
        if fc < fd {
            r = d;
            d = c;
            fd = fc;
            c = r - g * (r - l);
            fc = f(c.exp());
        } else {
            l = c;
            c = d;
            fc = fd;
            d = l + g * (r - l);
            fd = f(d.exp());
        }
        if r - l < 1e-15 {
            break;
        }
    }
    let x = 0.5 * (l + r);
    ScalarMinimum {
        eps: x.exp(),
        value: f(x.exp()),
        at_boundary: false,
    }
}

/// Minimizer of the prefactor `((1+ε²)^q - 1)/(2ε^q)` alone.
pub fn optimize_prefactor(q: f64) -> ScalarMinimum {
    minimize_over_eps(|e| prefactor(q, e), EPS_RANGE.0, EPS_RANGE.1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsilonOptimum {
    pub eps_opt: f64,
    /// The optimized sufficient bound; `0` for `1 < q < 2`, where every
    /// `b > 0` suffices.
    pub b_opt: f64,
    /// Minimum of the bound over the search interval (before the `q < 2` rule).
    pub bound_min: f64,
    pub at_boundary: bool,
    pub note: Option<String>,
}

pub fn optimize_epsilon(q: f64, omega: f64, n: usize) -> Result<EpsilonOptimum> {
    if !(q > 1.0) {
        return Err(Error::InvalidParams("q > 1 violated".into()));
    }
    let m = minimize_over_eps(
        |e| sufficient_bound(q, omega, n, e).expect("positive eps"),
        EPS_RANGE.0,
        EPS_RANGE.1,
    );
    let mut note = m
        .at_boundary
        .then(|| "infimum at boundary, not attained".to_string());
    let mut b_opt = m.value;
    if q < 2.0 {
        b_opt = 0.0;
        note = Some("any b > 0 suffices (1 < q < 2)".into());
    }
    Ok(EpsilonOptimum {
        eps_opt: m.eps,
        b_opt,
        bound_min: m.value,
        at_boundary: m.at_boundary,
        note,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub n: usize,
    pub q: f64,
    pub omega: f64,
    pub c_const: f64,
    /// Only for `n = 1`, `q ≥ 2`.
    pub d_const: Option<f64>,
    pub eps_opt: f64,
    pub b_opt: f64,
    pub at_boundary: bool,
    pub notes: Vec<String>,
}

pub fn threshold_report(q: f64, omega: f64, n: usize) -> Result<ThresholdReport> {
    let p = ProblemParams::new(n, q, 0.0, omega);
    let c_const = constant_c(&p);
    let d_const = if n == 1 { constant_d(q, omega).ok() } else { None };
    let opt = optimize_epsilon(q, omega, n)?;
    let mut notes: Vec<String> = opt.note.into_iter().collect();
    if let Some(d) = d_const {
        notes.push(if d < c_const { "D < C" } else { "D >= C" }.into());
    }
    Ok(ThresholdReport {
        n,
        q,
        omega,
        c_const,
        d_const,
        eps_opt: opt.eps_opt,
        b_opt: opt.b_opt,
        at_boundary: opt.at_boundary,
        notes,
    })
}

/// Quadrature values from which every trial state is assembled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialIngredients {
    /// `‖u₀‖²` (mass weight 1).
    pub norm_u: f64,
    /// `‖v₀‖²_ω` (mass weight ω²).
    pub norm_v: f64,
    pub pow_u: f64,
    pub pow_v: f64,
    /// `‖u₀ v₀‖_q^q`.
    pub coupling: f64,
}

impl TrialIngredients {
    pub fn new(energy: &Energy, u0: &RadialField, v0: &RadialField) -> Result<Self> {
        let q = energy.params().q;
        let grid = u0.grid().clone();
        let zero = RadialField::zeros(grid);
        let su = StatePair::new(u0.clone(), zero.clone())?;
        let sv = StatePair::new(zero, v0.clone())?;
        let both = StatePair::new(u0.clone(), v0.clone())?;
        Ok(Self {
            norm_u: energy.omega_norm_sq(&su),
            norm_v: energy.omega_norm_sq(&sv),
            pow_u: lp_norm_pow(u0, 2.0 * q),
            pow_v: lp_norm_pow(v0, 2.0 * q),
            coupling: energy.coupling_integral(&both),
        })
    }

    /// `x^{2q-2}` placing `(x u₀, x θ v₀)` on the Nehari manifold.
    pub fn x_pow(&self, p: &ProblemParams, theta: f64) -> f64 {
        let q = p.q;
        let num = self.norm_u + theta * theta * self.norm_v;
        let den = self.pow_u + theta.powf(2.0 * q) * self.pow_v + 2.0 * p.b * theta.powf(q) * self.coupling;
        num / den
    }

    /// Energy of the trial state with component ratio `θ`.
    pub fn energy(&self, p: &ProblemParams, theta: f64) -> f64 {
        let x2 = self.x_pow(p, theta).powf(1.0 / (p.q - 1.0));
        p.energy_factor() * x2 * (self.norm_u + theta * theta * self.norm_v)
    }

    /// Endpoints of the bracket obtained by replacing `‖u₀v₀‖_q^q` with
    /// `ω^{q/(q-1)}‖u₀‖_{2q}^{2q}` (lower) and `ω^{q/(q-1)-n}‖u₀‖_{2q}^{2q}`
    /// (upper), and the scaled norms by their exact scaling laws.
    pub fn x_bracket(&self, p: &ProblemParams, theta: f64) -> (f64, f64) {
        let q = p.q;
        let e = p.scaling_exponent();
        let we = p.omega.powf(e);
        let num = (1.0 + theta * theta * we) * self.norm_u;
        let base = (1.0 + theta.powf(2.0 * q) * we) * self.pow_u;
        let cross = |k: f64| 2.0 * p.b * theta.powf(q) * k * self.pow_u;
        let hi_c = p.omega.powf(q / (q - 1.0));
        let lo_c = p.omega.powf(q / (q - 1.0) - p.n as f64);
        (num / (base + cross(hi_c)), num / (base + cross(lo_c)))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialState {
    pub eps: f64,
    pub theta: f64,
    pub x: f64,
    /// `x^{2q-2}` from the exact quadrature values.
    pub x_pow: f64,
    pub x_lower: f64,
    pub x_upper: f64,
    pub energy: f64,
    #[serde(skip)]
    pub state: StatePair,
}

impl TrialState {
    /// Whether `x_lower ≤ x^{2q-2} ≤ x_upper` up to relative `tol`.
    pub fn bracket_holds(&self, tol: f64) -> bool {
        self.x_pow >= self.x_lower * (1.0 - tol) && self.x_pow <= self.x_upper * (1.0 + tol)
    }
}

/// Builds `(x u₀, x θ v₀)` on the grid of `u₀`.
pub fn build_trial_state(p: &ProblemParams, eps: f64, u0: &ScalarGroundState) -> Result<TrialState> {
    if !(eps > 0.0) {
        return Err(Error::NonPositiveEpsilon(eps));
    }
    let grid = u0.profile.grid().clone();
    let energy = Energy::new(RadialOperator::new(grid.clone()), *p);
    let v0 = omega_rescale(u0, p, grid)?;
    trial_from_parts(&energy, eps, &u0.profile, &v0)
}

pub(crate) fn trial_from_parts(energy: &Energy, eps: f64, u0: &RadialField, v0: &RadialField) -> Result<TrialState> {
    if !(eps > 0.0) {
        return Err(Error::NonPositiveEpsilon(eps));
    }
    let p = energy.params();
    let ing = TrialIngredients::new(energy, u0, v0)?;
    let theta = theta_for(p, eps);
    let x_pow = ing.x_pow(p, theta);
    let x = x_pow.powf(1.0 / (2.0 * p.q - 2.0));
    let (x_lower, x_upper) = ing.x_bracket(p, theta);
    let state = StatePair::new(u0.scaled(x), v0.scaled(x * theta))?;
    let energy_value = energy.on_manifold_energy(&state)?;
    Ok(TrialState {
        eps,
        theta,
        x,
        x_pow,
        x_lower,
        x_upper,
        energy: energy_value,
        state,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SufficiencyReport {
    pub trial: TrialState,
    /// `I(trial) / I(u₀, 0)`; below one means the trial wins.
    pub energy_ratio: f64,
    pub beats_semitrivial: bool,
    pub bound: f64,
    pub b_above_bound: bool,
}

impl SufficiencyReport {
    /// The sufficient condition must imply the trial wins. At the threshold
    /// itself the two energies coincide, so ties within `SUFFICIENCY_TOL`
    /// count as consistent.
    pub fn consistent(&self) -> bool {
        !self.b_above_bound || self.energy_ratio <= 1.0 + SUFFICIENCY_TOL
    }
}

/// Relative slack for ties between the trial energy and `I(u₀, 0)`.
pub const SUFFICIENCY_TOL: f64 = 1e-9;

pub fn check_sufficiency(p: &ProblemParams, eps: f64, u0: &ScalarGroundState) -> Result<SufficiencyReport> {
    let trial = build_trial_state(p, eps, u0)?;
    let grid = u0.profile.grid().clone();
    let energy = Energy::new(RadialOperator::new(grid.clone()), *p);
    let semi = energy.scale_invariant_quotient(&StatePair::new(u0.profile.clone(), RadialField::zeros(grid))?)?;
    let energy_ratio = trial.energy / semi;
    let bound = sufficient_bound(p.q, p.omega, p.n, eps)?;
    Ok(SufficiencyReport {
        energy_ratio,
        beats_semitrivial: energy_ratio < 1.0,
        b_above_bound: p.b >= bound,
        bound,
        trial,
    })
}

/// Lowest trial energy over `ε ∈ [1e-3, 10]`.
pub fn best_trial_energy(energy: &Energy, u0: &RadialField, v0: &RadialField) -> Result<ScalarMinimum> {
    let p = *energy.params();
    let ing = TrialIngredients::new(energy, u0, v0)?;
    Ok(minimize_over_eps(
        |e| ing.energy(&p, theta_for(&p, e)),
        EPS_RANGE.0,
        EPS_RANGE.1,
    ))
}

/// `(ω^{q/(q-1)-n}‖u₀‖_{2q}^{2q}, ‖u₀v₀‖_q^q, ω^{q/(q-1)}‖u₀‖_{2q}^{2q})`.
pub fn coupling_bracket(p: &ProblemParams, u0: &RadialField, v0: &RadialField) -> Result<(f64, f64, f64)> {
    let grid: Arc<RadialGrid> = u0.grid().clone();
    let energy = Energy::new(RadialOperator::new(grid), *p);
    let ing = TrialIngredients::new(&energy, u0, v0)?;
    let q = p.q;
    Ok((
        p.omega.powf(q / (q - 1.0) - p.n as f64) * ing.pow_u,
        ing.coupling,
        p.omega.powf(q / (q - 1.0)) * ing.pow_u,
    ))
}
