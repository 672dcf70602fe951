//! Ground states of the coupled system: minimization of `I` over the Nehari
//! manifold within the cone of nonnegative nonincreasing pairs.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::descent::{Descent, DescentOutcome, DescentSettings};
use crate::error::{Error, Result};
use crate::functionals::{Energy, ON_MANIFOLD_TOL};
use crate::grid::{RadialField, RadialGrid, StatePair};
use crate::operator::{lp_norm_p, RadialOperator};
use crate::params::ProblemParams;
use crate::scalar::{omega_rescale, solve_scalar_ground_state, ScalarGroundState};
use crate::thresholds::trial_from_parts;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MinimizerConfig {
    pub max_iter: usize,
    /// Initial (and maximal) step along the Sobolev gradient.
    pub step_size: f64,
    /// Relative change of `J` below which the descent switches to
    /// residual-driven steps.
    pub tol_energy: f64,
    /// Stop once the relative dual norm of `∇I` falls below this.
    pub tol_residual: f64,
    /// Relative L² size below which a component counts as trivial.
    pub component_floor: f64,
    pub restarts: usize,
    /// Size `ε` of the weak component in the biased restarts `(u₀, εv₀)`, `(εu₀, v₀)`.
    pub restart_bias: f64,
    /// Relative perturbation `(u(1+δ), v(1-δ))` used to leave saddle points.
    pub saddle_perturbation: f64,
}

impl Default for MinimizerConfig {
    fn default() -> Self {
        Self {
            max_iter: 20_000,
            step_size: 1.0,
            tol_energy: 1e-10,
            tol_residual: 1e-6,
            component_floor: 1e-6,
            restarts: 3,
            restart_bias: 0.5,
            saddle_perturbation: 1e-3,
        }
    }
}

impl MinimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("step_size", self.step_size),
            ("tol_energy", self.tol_energy),
            ("tol_residual", self.tol_residual),
            ("component_floor", self.component_floor),
            ("restart_bias", self.restart_bias),
            ("saddle_perturbation", self.saddle_perturbation),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be positive")));
            }
        }
        if self.component_floor >= 1.0 {
            return Err(Error::InvalidParams("component_floor must be below 1".into()));
        }
        if self.saddle_perturbation >= 1.0 {
            return Err(Error::InvalidParams("saddle_perturbation must be below 1".into()));
        }
        if self.max_iter == 0 || self.restarts == 0 {
            return Err(Error::InvalidParams("max_iter and restarts must be at least 1".into()));
        }
        Ok(())
    }

    fn settings(&self) -> DescentSettings {
        DescentSettings {
            max_iter: self.max_iter,
            step_size: self.step_size,
            tol_energy: self.tol_energy,
            tol_residual: self.tol_residual,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Nontrivial,
    TrivialU,
    TrivialV,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::Nontrivial => "nontrivial",
            Classification::TrivialU => "trivial_u",
            Classification::TrivialV => "trivial_v",
        }
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `trivial_v` if `‖v‖₂ < floor ‖u‖₂`, `trivial_u` if `‖u‖₂ < floor ‖v‖₂`.
pub fn classify_components(s: &StatePair, floor: f64) -> Result<Classification> {
    if s.is_zero() {
        return Err(Error::ZeroState);
    }
    let nu = lp_norm_p(&s.u, 2.0);
    let nv = lp_norm_p(&s.v, 2.0);
    Ok(if nv < floor * nu {
        Classification::TrivialV
    } else if nu < floor * nv {
        Classification::TrivialU
    } else {
        Classification::Nontrivial
    })
}

/// Result of one restart.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestartOutcome {
    pub label: String,
    pub m: f64,
    pub el_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub classification: Classification,
}

#[derive(Debug, Clone, Serialize)]
pub struct GroundStateReport {
    pub params: ProblemParams,
    #[serde(skip)]
    pub state: StatePair,
    pub m: f64,
    pub tau_residual: f64,
    pub el_residual: f64,
    pub classification: Classification,
    pub iterations: usize,
    pub restarts_used: usize,
    pub best_restart: usize,
    pub converged: bool,
    pub u_norm: f64,
    pub v_norm: f64,
    /// `I(u₀, 0)` and `I(0, v₀)`.
    pub semitrivial_u: f64,
    pub semitrivial_v: f64,
    pub restarts: Vec<RestartOutcome>,
}

impl GroundStateReport {
    /// Largest relative spread of `m` among converged restarts.
    pub fn restart_spread(&self) -> f64 {
        let ms: Vec<f64> = self.restarts.iter().filter(|r| r.converged).map(|r| r.m).collect();
        let lo = ms.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if ms.is_empty() {
            0.0
        } else {
            (hi - lo) / lo
        }
    }
}

/// Everything a minimization needs besides the configuration.
pub struct Problem {
    pub energy: Energy,
    pub u0: ScalarGroundState,
    pub v0: RadialField,
}

impl Problem {
    pub fn new(params: &ProblemParams, grid: Arc<RadialGrid>) -> Result<Self> {
        let params = params.validated()?;
        if grid.dim() != params.n {
            return Err(Error::InvalidParams(format!(
                "grid dimension {} does not match n = {}",
                grid.dim(),
                params.n
            )));
        }
        let energy = Energy::new(RadialOperator::new(grid.clone()), params);
        let u0 = solve_scalar_ground_state(&params, grid.clone())?;
        let v0 = omega_rescale(&u0, &params, grid)?;
        Ok(Self { energy, u0, v0 })
    }

    pub fn params(&self) -> &ProblemParams {
        self.energy.params()
    }

    fn pair(&self, a: f64, b: f64) -> StatePair {
        StatePair {
            u: self.u0.profile.scaled(a),
            v: self.v0.scaled(b),
        }
    }

    /// `J(u₀, 0)`, the energy of the projection of `(u₀, 0)`.
    pub fn semitrivial_u(&self) -> Result<f64> {
        self.energy.scale_invariant_quotient(&self.pair(1.0, 0.0))
    }

    /// `J(0, v₀)`.
    pub fn semitrivial_v(&self) -> Result<f64> {
        self.energy.scale_invariant_quotient(&self.pair(0.0, 1.0))
    }

    /// Labelled initial states: the two biased semitrivial pairs, the trial
    /// pair with `ε = 1`, then mixtures `(cos φ u₀, sin φ v₀)`.
    pub fn initial_states(&self, cfg: &MinimizerConfig) -> Result<Vec<(String, StatePair)>> {
        let eps = cfg.restart_bias;
        let mut out = vec![
            ("u_biased".to_string(), self.pair(1.0, eps)),
            ("v_biased".to_string(), self.pair(eps, 1.0)),
        ];
        let trial = trial_from_parts(&self.energy, 1.0, &self.u0.profile, &self.v0)?;
        out.push(("trial".to_string(), trial.state));
        let extra = cfg.restarts.saturating_sub(3);
        for k in 0..extra {
            let phi = std::f64::consts::FRAC_PI_2 * (k + 1) as f64 / (extra + 1) as f64;
            out.push((format!("mixed_{}", k + 1), self.pair(phi.cos(), phi.sin())));
        }
        out.truncate(cfg.restarts);
        Ok(out)
    }
}

/// Components smaller than this (relative L²) are tentatively set to zero
/// after convergence, and the semitrivial candidate competes with the
/// converged state.
pub const SNAP_RATIO: f64 = 1e-2;

/// Relative slack in favour of the semitrivial candidate: weak components
/// that merely decay slowly change `J` only at round-off level.
const SNAP_SLACK: f64 = 1e-13;

/// Relative energy difference below which two restarts are tied.
const TIE_SLACK: f64 = 1e-12;

fn run_with_escape(descent: &Descent<'_>, init: &StatePair, delta: f64) -> Result<DescentOutcome> {
    let mut best = descent.run(init)?;
    let mut iterations = best.iterations;
    for d in [delta, -delta] {
        let kicked = StatePair {
            u: best.state.u.scaled(1.0 + d),
            v: best.state.v.scaled(1.0 - d),
        };
        let out = descent.run(&kicked)?;
        iterations += out.iterations;
        if out.quotient < best.quotient * (1.0 - 1e-12) {
            best = out;
        }
    }
    let nu = lp_norm_p(&best.state.u, 2.0);
    let nv = lp_norm_p(&best.state.v, 2.0);
    let snapped = if nv > 0.0 && nv < SNAP_RATIO * nu {
        Some(StatePair {
            u: best.state.u.clone(),
            v: RadialField::zeros(best.state.grid().clone()),
        })
    } else if nu > 0.0 && nu < SNAP_RATIO * nv {
        Some(StatePair {
            u: RadialField::zeros(best.state.grid().clone()),
            v: best.state.v.clone(),
        })
    } else {
        None
    };
    if let Some(s) = snapped {
        let out = descent.run(&s)?;
        iterations += out.iterations;
        if out.quotient <= best.quotient * (1.0 + SNAP_SLACK) {
            best = out;
        }
    }
    best.iterations = iterations;
    Ok(best)
}

pub fn minimize_ground_state(params: &ProblemParams, grid: Arc<RadialGrid>, cfg: &MinimizerConfig) -> Result<GroundStateReport> {
    cfg.validate()?;
    let problem = Problem::new(params, grid)?;
    minimize_problem(&problem, cfg)
}

pub fn minimize_problem(problem: &Problem, cfg: &MinimizerConfig) -> Result<GroundStateReport> {
    cfg.validate()?;
    let energy = &problem.energy;
    let descent = Descent::new(energy, cfg.settings())?;
    let inits = problem.initial_states(cfg)?;
    let results: Vec<Result<DescentOutcome>> = inits
        .par_iter()
        .map(|(_, s)| run_with_escape(&descent, s, cfg.saddle_perturbation))
        .collect();

    let mut outcomes = Vec::with_capacity(results.len());
    let mut restarts = Vec::with_capacity(results.len());
    for ((label, _), r) in inits.iter().zip(results) {
        let out = r?;
        let m = energy.params().energy_factor() * energy.omega_norm_sq(&out.state);
        restarts.push(RestartOutcome {
            label: label.clone(),
            m,
            el_residual: out.residual,
            iterations: out.iterations,
            converged: out.converged,
            classification: classify_components(&out.state, cfg.component_floor)?,
        });
        outcomes.push(out);
    }
    // Lowest energy wins; restarts within round-off of it count as ties,
    // which go to the earlier restart so that exactly degenerate cases
    // (e.g. ω = 1, b = 0) are classified reproducibly.
    let m_min = restarts.iter().map(|r| r.m).fold(f64::INFINITY, f64::min);
    let best = restarts
        .iter()
        .position(|r| r.m <= m_min + TIE_SLACK * m_min.abs())
        .expect("at least one restart");
    let out = &outcomes[best];
    let state = energy.project_to_manifold(&out.state)?;
    let e = energy.energy_and_tau(&state)?;
    let (_, el_residual) = descent.direction(&state)?;

    Ok(GroundStateReport {
        params: *energy.params(),
        m: energy.params().energy_factor() * e.omega_norm_sq,
        tau_residual: e.tau.abs(),
        el_residual,
        classification: classify_components(&state, cfg.component_floor)?,
        iterations: restarts.iter().map(|r| r.iterations).sum(),
        restarts_used: restarts.len(),
        best_restart: best,
        converged: out.converged,
        u_norm: lp_norm_p(&state.u, 2.0),
        v_norm: lp_norm_p(&state.v, 2.0),
        semitrivial_u: problem.semitrivial_u()?,
        semitrivial_v: problem.semitrivial_v()?,
        restarts,
        state,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyTolerances {
    /// `|τ| ≤ tau · ‖s‖²_ω`.
    pub tau: f64,
    /// Tangential dual norm of `∇I`, relative to `‖s‖_ω`.
    pub residual: f64,
    /// Sup distance of `u` to `u₀` for semitrivial states.
    pub profile: f64,
    /// Relative agreement of the two on-manifold energy expressions.
    pub identity: f64,
}

impl Default for VerifyTolerances {
    fn default() -> Self {
        Self {
            tau: ON_MANIFOLD_TOL,
            residual: 1e-5,
            profile: 1e-3,
            identity: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub passed: bool,
    pub applicable: bool,
}

impl Check {
    fn new(name: &str, value: f64, tol: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            tol,
            passed: value <= tol,
            applicable: true,
        }
    }

    fn skipped(name: &str) -> Self {
        Self {
            name: name.to_string(),
            value: 0.0,
            tol: 0.0,
            passed: true,
            applicable: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Checks a computed state: (a) Nehari residual, (b) tangential residual of
/// `∇I` (a critical point of `I` restricted to the manifold has a vanishing
/// multiplier), (c) closeness to `u₀` for `trivial_v` states, (d) agreement
/// of `(½ - 1/(2q))‖s‖²_ω` with `(½ - 1/(2q))P(s)`.
pub fn verify_ground_state(
    energy: &Energy,
    report: &GroundStateReport,
    u0: Option<&ScalarGroundState>,
    tol: &VerifyTolerances,
) -> Result<VerificationReport> {
    let s = &report.state;
    let e = energy.energy_and_tau(s)?;
    let descent = Descent::new(
        energy,
        MinimizerConfig::default().settings(),
    )?;
    let mut checks = vec![
        Check::new("tau", e.tau.abs() / e.omega_norm_sq, tol.tau),
        Check::new("tangential_residual", descent.tangential_residual(s)?, tol.residual),
    ];
    checks.push(match (report.classification, u0) {
        (Classification::TrivialV, Some(u0)) => {
            Check::new("profile_vs_u0", s.u.sup_distance(&u0.profile), tol.profile)
        }
        _ => Check::skipped("profile_vs_u0"),
    });
    let f = energy.params().energy_factor();
    let (a, b) = (f * e.omega_norm_sq, f * e.p_term);
    checks.push(Check::new("energy_identity", (a - b).abs() / a.abs(), tol.identity));
    Ok(VerificationReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Arc<RadialGrid> {
        Arc::new(RadialGrid::default_for(n).unwrap())
    }

    #[test]
    fn config_validation() {
        assert!(MinimizerConfig::default().validate().is_ok());
        let bad = MinimizerConfig {
            component_floor: 1.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = MinimizerConfig {
            tol_residual: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn classification_cases() {
        let g = grid(1);
        let u = RadialField::from_fn(g.clone(), |r| 1.0 / r.cosh());
        let z = RadialField::zeros(g);
        let floor = 1e-3;
        let s = StatePair::new(u.clone(), z.clone()).unwrap();
        assert_eq!(classify_components(&s, floor).unwrap(), Classification::TrivialV);
        assert_eq!(classify_components(&s.swapped(), floor).unwrap(), Classification::TrivialU);
        let both = StatePair::new(u.clone(), u).unwrap();
        assert_eq!(classify_components(&both, floor).unwrap(), Classification::Nontrivial);
        let zero = StatePair::new(z.clone(), z).unwrap();
        assert_eq!(classify_components(&zero, floor), Err(Error::ZeroState));
    }

    #[test]
    fn decoupled_run_is_semitrivial() {
        let p = ProblemParams::new(1, 2.0, 0.0, 2.0);
        let problem = Problem::new(&p, grid(1)).unwrap();
        let r = minimize_problem(&problem, &MinimizerConfig::default()).unwrap();
        assert_eq!(r.classification, Classification::TrivialV);
        assert!((r.m / (4.0 / 3.0) - 1.0).abs() < 1e-4);
        assert!(r.converged);
        assert!(r.m >= 0.0);
        let v = verify_ground_state(&problem.energy, &r, Some(&problem.u0), &VerifyTolerances::default()).unwrap();
        assert!(v.all_passed(), "{:?}", v);
    }

    #[test]
    fn strong_coupling_is_nontrivial() {
        let p = ProblemParams::new(1, 2.0, 3.0, 1.0);
        let r = minimize_ground_state(&p, grid(1), &MinimizerConfig::default()).unwrap();
        assert_eq!(r.classification, Classification::Nontrivial);
        assert!(r.m < 4.0 / 3.0 - 1e-3);
        // With ω = 1 the pair (u₀, u₀)/2 solves the system exactly: m = (4/3)/2.
        assert!((r.m - 2.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn non_minimal_state_fails_residual_check() {
        let p = ProblemParams::new(1, 2.0, 1.0, 2.0);
        let problem = Problem::new(&p, grid(1)).unwrap();
        let mut r = minimize_problem(&problem, &MinimizerConfig { restarts: 1, ..Default::default() }).unwrap();
        r.state = problem
            .energy
            .project_to_manifold(&StatePair::new(problem.u0.profile.clone(), problem.u0.profile.clone()).unwrap())
            .unwrap();
        r.classification = Classification::Nontrivial;
        let v = verify_ground_state(&problem.energy, &r, None, &VerifyTolerances::default()).unwrap();
        assert!(!v.check("tangential_residual").unwrap().passed);
        assert!(v.check("tau").unwrap().passed);
        assert!(v.check("energy_identity").unwrap().passed);
    }
}
