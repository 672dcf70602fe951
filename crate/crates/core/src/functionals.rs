//! Energy `I`, the Nehari functional `τ`, the energy gradient and the
//! projection onto the Nehari manifold.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{RadialField, RadialGrid, StatePair};
use crate::operator::RadialOperator;
use crate::params::ProblemParams;

/// Relative tolerance on `|τ| / ‖s‖²_ω` for a state to count as on the manifold.
pub const ON_MANIFOLD_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    pub omega_norm_sq: f64,
    pub p_term: f64,
    pub energy: f64,
    pub tau: f64,
}

/// `sign(x) |x|^e`, with the removable singularity at `x = 0` set to zero.
#[inline]
pub fn signed_pow(x: f64, e: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.signum() * x.abs().powf(e)
    }
}

/// The functionals of the coupled system on one radial grid.
#[derive(Debug, Clone)]
pub struct Energy {
    op: RadialOperator,
    params: ProblemParams,
}

impl Energy {
    pub fn new(op: RadialOperator, params: ProblemParams) -> Self {
        Self { op, params }
    }

    pub fn params(&self) -> &ProblemParams {
        &self.params
    }

    pub fn operator(&self) -> &RadialOperator {
        &self.op
    }

    pub fn grid(&self) -> &RadialGrid {
        self.op.grid()
    }

    /// Same operator, different parameters.
    pub fn with_params(&self, params: ProblemParams) -> Self {
        Self {
            op: self.op.clone(),
            params,
        }
    }

    fn check(&self, s: &StatePair) -> Result<()> {
        if self.grid().same_shape(s.grid()) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    fn mass(&self, f: &RadialField) -> f64 {
        self.grid()
            .quad_weights()
            .iter()
            .zip(f.values())
            .map(|(w, x)| w * x * x)
            .sum()
    }

    /// `‖u‖² + ‖v‖²_ω = ‖u‖₂² + ‖∇u‖₂² + ω²‖v‖₂² + ‖∇v‖₂²`.
    pub fn omega_norm_sq(&self, s: &StatePair) -> f64 {
        let om2 = self.params.omega * self.params.omega;
        let (u, v) = (s.u.values(), s.v.values());
        self.op.dirichlet_form(u, u)
            + self.mass(&s.u)
            + self.op.dirichlet_form(v, v)
            + om2 * self.mass(&s.v)
    }

    /// `‖uv‖_q^q = Σ wᵢ |uᵢ vᵢ|^q`.
    pub fn coupling_integral(&self, s: &StatePair) -> f64 {
        let q = self.params.q;
        self.grid()
            .quad_weights()
            .iter()
            .zip(s.u.values().iter().zip(s.v.values()))
            .map(|(w, (a, b))| w * (a * b).abs().powf(q))
            .sum()
    }

    /// `P(u, v) = ‖u‖_{2q}^{2q} + ‖v‖_{2q}^{2q} + 2b ‖uv‖_q^q`.
    pub fn p_term(&self, s: &StatePair) -> f64 {
        let q = self.params.q;
        let two_q = 2.0 * q;
        let b = self.params.b;
        self.grid()
            .quad_weights()
            .iter()
            .zip(s.u.values().iter().zip(s.v.values()))
            .map(|(w, (a, c))| {
                let (a, c) = (a.abs(), c.abs());
                let mut t = a.powf(two_q) + c.powf(two_q);
                if b != 0.0 {
                    t += 2.0 * b * (a * c).powf(q);
                }
                w * t
            })
            .sum()
    }

    pub fn energy_and_tau(&self, s: &StatePair) -> Result<EnergyBreakdown> {
        self.check(s)?;
        let omega_norm_sq = self.omega_norm_sq(s);
        let p_term = self.p_term(s);
        Ok(EnergyBreakdown {
            omega_norm_sq,
            p_term,
            energy: 0.5 * omega_norm_sq - p_term / (2.0 * self.params.q),
            tau: omega_norm_sq - p_term,
        })
    }

    pub fn energy(&self, s: &StatePair) -> Result<f64> {
        Ok(self.energy_and_tau(s)?.energy)
    }

    /// `⟨∇τ(s), s⟩ = 2‖s‖²_ω - 2q P(s)`; on the manifold this is `2(1-q)‖s‖²_ω`.
    pub fn nehari_derivative(&self, s: &StatePair) -> Result<f64> {
        let e = self.energy_and_tau(s)?;
        Ok(2.0 * e.omega_norm_sq - 2.0 * self.params.q * e.p_term)
    }

    /// Euler–Lagrange residuals
    /// `(-Δu + u - |u|^{2q-2}u - b|v|^q|u|^{q-2}u, -Δv + ω²v - |v|^{2q-2}v - b|u|^q|v|^{q-2}v)`,
    /// the gradient of the discrete `I` in the quadrature inner product.
    pub fn energy_gradient(&self, s: &StatePair) -> Result<StatePair> {
        self.check(s)?;
        let om2 = self.params.omega * self.params.omega;
        let (u, v) = (s.u.values(), s.v.values());
        let gu = self.combine(u, 1.0, &self.nonlinear(u, v), -1.0);
        let gv = self.combine(v, om2, &self.nonlinear(v, u), -1.0);
        Ok(self.pair(gu, gv, s))
    }

    /// Gradient of `τ` in the quadrature inner product:
    /// `2(-Δu + u) - 2q(|u|^{2q-2}u + b|v|^q|u|^{q-2}u)` and likewise for `v`.
    pub fn nehari_gradient(&self, s: &StatePair) -> Result<StatePair> {
        self.check(s)?;
        let q = self.params.q;
        let om2 = self.params.omega * self.params.omega;
        let (u, v) = (s.u.values(), s.v.values());
        let scale = |x: Vec<f64>| x.into_iter().map(|y| 2.0 * y).collect::<Vec<_>>();
        let gu = scale(self.combine(u, 1.0, &self.nonlinear(u, v), -q));
        let gv = scale(self.combine(v, om2, &self.nonlinear(v, u), -q));
        Ok(self.pair(gu, gv, s))
    }

    /// `|f|^{2q-2}f + b|g|^q|f|^{q-2}f` at every node.
    fn nonlinear(&self, f: &[f64], g: &[f64]) -> Vec<f64> {
        let ProblemParams { q, b, .. } = self.params;
        f.iter()
            .zip(g)
            .map(|(&x, &y)| {
                let mut nl = signed_pow(x, 2.0 * q - 1.0);
                if b != 0.0 && y != 0.0 {
                    nl += b * y.abs().powf(q) * signed_pow(x, q - 1.0);
                }
                nl
            })
            .collect()
    }

    /// `(A f)/w + mass f + c · nl` at every node with positive weight; the
    /// weightless origin (n = 3) is extrapolated.
    fn combine(&self, f: &[f64], mass: f64, nl: &[f64], c: f64) -> Vec<f64> {
        let w = self.grid().quad_weights();
        let af = self.op.stiffness_apply(f);
        let mut out: Vec<f64> = (0..f.len())
            .map(|i| {
                if w[i] == 0.0 {
                    0.0
                } else {
                    af[i] / w[i] + mass * f[i] + c * nl[i]
                }
            })
            .collect();
        if self.grid().first_free() == 1 {
            out[0] = RadialGrid::extrapolate_origin(&out);
        }
        out
    }

    fn pair(&self, u: Vec<f64>, v: Vec<f64>, like: &StatePair) -> StatePair {
        let grid = like.grid().clone();
        StatePair {
            u: RadialField::from_parts(grid.clone(), u),
            v: RadialField::from_parts(grid, v),
        }
    }

    /// The factor `t` with `τ(t s) = 0`: `t = (‖s‖²_ω / P(s))^{1/(2q-2)}`.
    pub fn nehari_projection_t(&self, s: &StatePair) -> Result<f64> {
        if s.is_zero() {
            return Err(Error::ZeroState);
        }
        let e = self.energy_and_tau(s)?;
        if !(e.p_term > 0.0) {
            return Err(Error::DegenerateNonlinearity);
        }
        Ok((e.omega_norm_sq / e.p_term).powf(1.0 / (2.0 * self.params.q - 2.0)))
    }

    pub fn project_to_manifold(&self, s: &StatePair) -> Result<StatePair> {
        Ok(s.scaled(self.nehari_projection_t(s)?))
    }

    /// `(1/2 - 1/(2q)) ‖s‖²_ω` for a state on the manifold.
    pub fn on_manifold_energy(&self, s: &StatePair) -> Result<f64> {
        let e = self.energy_and_tau(s)?;
        let allowed = ON_MANIFOLD_TOL * e.omega_norm_sq;
        if s.is_zero() || e.tau.abs() > allowed {
            return Err(Error::OffManifold {
                tau: e.tau,
                allowed,
            });
        }
        Ok(self.params.energy_factor() * e.omega_norm_sq)
    }

    /// `J(s) = (1/2 - 1/(2q)) ‖s‖_ω^{2q/(q-1)} / P(s)^{1/(q-1)}`, equal to
    /// `I(t s)` for the projection factor `t`. Homogeneous of degree zero.
    pub fn scale_invariant_quotient(&self, s: &StatePair) -> Result<f64> {
        if s.is_zero() {
            return Err(Error::ZeroState);
        }
        let e = self.energy_and_tau(s)?;
        if !(e.p_term > 0.0) {
            return Err(Error::DegenerateNonlinearity);
        }
        Ok(quotient(e.omega_norm_sq, e.p_term, self.params.q))
    }
}

/// `J` from its two ingredients.
pub fn quotient(omega_norm_sq: f64, p_term: f64, q: f64) -> f64 {
    let k = 1.0 / (q - 1.0);
    (0.5 - 0.5 / q) * (omega_norm_sq.powf(q) / p_term).powf(k)
}
