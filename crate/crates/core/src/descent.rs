//! Normalized descent on the scale-invariant quotient `J` within the cone of
//! nonnegative nonincreasing pairs.
//!
//! Each step moves along the Sobolev gradient `-K⁻¹∇I` with
//! `K = diag(-Δ + 1, -Δ + ω²)`, maps both components into the cone (absolute
//! value, isotonic regression, Dirichlet node) and rescales onto the Nehari
//! manifold. Step lengths are halved until `J` does not increase. Once `J`
//! stagnates at round-off level, full steps are taken for as long as they
//! keep reducing the residual, which lets weakly coupled components settle.

use crate::error::{Error, Result};
use crate::functionals::Energy;
use crate::grid::{RadialField, RadialGrid, StatePair};
use crate::operator::{inner_w, ShiftedSolver};
use crate::symmetrization::pava_nonincreasing;

/// Smallest step tried by the backtracking line search.
pub const STEP_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct DescentSettings {
    pub max_iter: usize,
    pub step_size: f64,
    pub tol_energy: f64,
    pub tol_residual: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct DescentOutcome {
    pub state: StatePair,
    pub quotient: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub(crate) struct Descent<'a> {
    energy: &'a Energy,
    ku: ShiftedSolver,
    kv: ShiftedSolver,
    settings: DescentSettings,
}

impl<'a> Descent<'a> {
    pub fn new(energy: &'a Energy, settings: DescentSettings) -> Result<Self> {
        let omega = energy.params().omega;
        Ok(Self {
            energy,
            ku: energy.operator().shifted_solver(1.0)?,
            kv: energy.operator().shifted_solver(omega * omega)?,
            settings,
        })
    }

    fn grid(&self) -> &RadialGrid {
        self.energy.grid()
    }

    /// Nearest nonnegative nonincreasing profile vanishing at `r_max`.
    pub fn cone(&self, f: &RadialField) -> RadialField {
        let grid = self.grid();
        let mut x: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
        let last = grid.dirichlet_node();
        x[last] = 0.0;
        let mut x = pava_nonincreasing(&x, grid.quad_weights());
        if grid.first_free() == 1 {
            x[0] = RadialGrid::extrapolate_origin(&x).max(x[1]);
        }
        RadialField::from_parts(f.grid().clone(), x)
    }

    /// Cone projection of both components followed by the Nehari rescaling.
    pub fn prepare(&self, s: &StatePair) -> Result<StatePair> {
        let c = StatePair {
            u: self.cone(&s.u),
            v: self.cone(&s.v),
        };
        self.energy.project_to_manifold(&c)
    }

    /// Sobolev gradient `K⁻¹∇I` and the relative dual norm
    /// `sqrt(⟨∇I, K⁻¹∇I⟩) / ‖s‖_ω`.
    pub fn direction(&self, s: &StatePair) -> Result<(StatePair, f64)> {
        let g = self.energy.energy_gradient(s)?;
        let du = self.ku.solve(g.u.values());
        let dv = self.kv.solve(g.v.values());
        let grid = self.grid();
        let dual = inner_w(grid, &du, g.u.values()) + inner_w(grid, &dv, g.v.values());
        let norm = self.energy.omega_norm_sq(s);
        let residual = (dual.max(0.0) / norm).sqrt();
        let gr = s.grid().clone();
        Ok((
            StatePair {
                u: RadialField::from_parts(gr.clone(), du),
                v: RadialField::from_parts(gr, dv),
            },
            residual,
        ))
    }

    /// Dual norm of `∇I` after removing its component along `∇τ`, relative
    /// to `‖s‖_ω`.
    pub fn tangential_residual(&self, s: &StatePair) -> Result<f64> {
        let g = self.energy.energy_gradient(s)?;
        let t = self.energy.nehari_gradient(s)?;
        let grid = self.grid();
        let apply = |p: &StatePair| (self.ku.solve(p.u.values()), self.kv.solve(p.v.values()));
        let (gu, gv) = apply(&g);
        let (tu, tv) = apply(&t);
        let gg = inner_w(grid, &gu, g.u.values()) + inner_w(grid, &gv, g.v.values());
        let gt = inner_w(grid, &tu, g.u.values()) + inner_w(grid, &tv, g.v.values());
        let tt = inner_w(grid, &tu, t.u.values()) + inner_w(grid, &tv, t.v.values());
        let lambda = if tt > 0.0 { gt / tt } else { 0.0 };
        let dual = gg - 2.0 * lambda * gt + lambda * lambda * tt;
        Ok((dual.max(0.0) / self.energy.omega_norm_sq(s)).sqrt())
    }

    pub fn run(&self, init: &StatePair) -> Result<DescentOutcome> {
        let DescentSettings {
            max_iter,
            step_size,
            tol_energy,
            tol_residual,
        } = self.settings;
        let mut state = self.prepare(init)?;
        let mut quotient = self.energy.scale_invariant_quotient(&state)?;
        let mut alpha = step_size;
        let mut settling = false;
        let mut previous: Option<(StatePair, f64, f64)> = None;

        for it in 0..max_iter {
            let (dir, residual) = self.direction(&state)?;
            if settling {
                if let Some((prev, prev_q, prev_res)) = previous.take() {
                    if residual >= prev_res {
                        return Ok(DescentOutcome {
                            state: prev,
                            quotient: prev_q,
                            residual: prev_res,
                            iterations: it,
                            converged: prev_res < tol_residual,
                        });
                    }
                }
            }
            if residual < tol_residual {
                return Ok(DescentOutcome {
                    state,
                    quotient,
                    residual,
                    iterations: it,
                    converged: true,
                });
            }

            if settling {
                let next = self.prepare(&state.axpy(-step_size, &dir))?;
                let q = self.energy.scale_invariant_quotient(&next)?;
                previous = Some((std::mem::replace(&mut state, next), quotient, residual));
                quotient = q;
                continue;
            }

            let mut a = alpha;
            let accepted = loop {
                match self.prepare(&state.axpy(-a, &dir)) {
                    Ok(next) => {
                        let q = self.energy.scale_invariant_quotient(&next)?;
                        if q <= quotient {
                            break Some((next, q));
                        }
                    }
                    Err(Error::ZeroState) | Err(Error::DegenerateNonlinearity) => {}
                    Err(e) => return Err(e),
                }
                a *= 0.5;
                if a < STEP_FLOOR {
                    break None;
                }
            };
            match accepted {
                Some((next, q)) => {
                    let change = (quotient - q) / quotient;
                    state = next;
                    quotient = q;
                    alpha = (2.0 * a).min(step_size);
                    if change < tol_energy {
                        settling = true;
                    }
                }
                None => settling = true,
            }
        }
        let (_, residual) = self.direction(&state)?;
        Ok(DescentOutcome {
            state,
            quotient,
            residual,
            iterations: max_iter,
            converged: residual < tol_residual,
        })
    }
}
