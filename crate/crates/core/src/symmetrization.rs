//! Decreasing radial rearrangement and projection onto the cone of
//! nonnegative, radially nonincreasing profiles.

use std::sync::Arc;

use serde::Serialize;

use crate::error::Result;
use crate::grid::{RadialField, RadialGrid};
use crate::interp::{bracketed_root, MonotoneCubic, MonotonePiece};
use crate::operator::{lp_norm_p, RadialOperator};

/// Relative tolerance of the rearrangement inequality checks.
pub const INEQUALITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct RearrangedField {
    pub field: RadialField,
    pub is_monotone: bool,
}

impl RearrangedField {
    fn new(field: RadialField) -> Self {
        let is_monotone = field.values().iter().all(|&x| x >= 0.0) && field.is_nonincreasing();
        Self { field, is_monotone }
    }
}

/// Outcome of comparing `lhs ≤ rhs + tol`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub lhs: f64,
    pub rhs: f64,
    pub tol: f64,
    pub holds: bool,
}

impl ComparisonReport {
    fn le(lhs: f64, rhs: f64, tol: f64) -> Self {
        Self {
            lhs,
            rhs,
            tol,
            holds: lhs <= rhs + tol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HardyLittlewoodReport {
    /// `∫|fg|` against `∫f*g*`.
    pub integral: ComparisonReport,
    /// `‖fg‖_q` against `‖f*g*‖_q`.
    pub q_norm: ComparisonReport,
}

impl HardyLittlewoodReport {
    pub fn holds(&self) -> bool {
        self.integral.holds && self.q_norm.holds
    }
}

/// The decreasing radial rearrangement of `|f|`.
///
/// `|f|` is interpolated by a shape-preserving cubic, its distribution
/// function `μ(t) = |{x : |f|(x) > t}|` is evaluated exactly piece by piece,
/// and `f*(rⱼ)` is the level at which `μ` equals the volume of the ball of
/// radius `rⱼ`. The construction does not depend on the quadrature weights,
/// so it is equimeasurable for every dimension, and it returns a
/// nonnegative nonincreasing field unchanged.
pub fn decreasing_rearrangement(f: &RadialField) -> RearrangedField {
    let grid = f.grid().clone();
    let abs: Vec<f64> = f.values().iter().map(|x| x.abs()).collect();
    let interp = MonotoneCubic::new(grid.spacing(), &abs);
    let values = Distribution::new(&grid, &interp).rearranged(grid.nodes());
    RearrangedField::new(RadialField::from_parts(grid, values))
}

struct Distribution<'a> {
    grid: &'a RadialGrid,
    interp: &'a MonotoneCubic,
    pieces: Vec<MonotonePiece>,
}

impl<'a> Distribution<'a> {
    fn new(grid: &'a RadialGrid, interp: &'a MonotoneCubic) -> Self {
        Self {
            grid,
            interp,
            pieces: interp.monotone_pieces(),
        }
    }

    fn radius(&self, p: &MonotonePiece, s: f64) -> f64 {
        (p.k as f64 + s) * self.grid.spacing()
    }

    fn volume(&self, a: f64, b: f64) -> f64 {
        let n = self.grid.dim() as i32;
        self.grid.sigma() * (b.powi(n) - a.powi(n)) / n as f64
    }

    fn full_volume(&self, p: &MonotonePiece) -> f64 {
        self.volume(self.radius(p, p.s0), self.radius(p, p.s1))
    }

    /// Volume of `{p > t}` within a piece with `lo ≤ t ≤ hi`.
    fn partial_volume(&self, p: &MonotonePiece, t: f64) -> f64 {
        let s = self.interp.solve_in_piece(p, t);
        let cut = self.radius(p, s);
        if p.vb > p.va {
            self.volume(cut, self.radius(p, p.s1))
        } else {
            self.volume(self.radius(p, p.s0), cut)
        }
    }

    /// Values of the rearrangement at the radii `r` (ascending).
    fn rearranged(&self, r: &[f64]) -> Vec<f64> {
        let mut levels: Vec<f64> = self
            .pieces
            .iter()
            .flat_map(|p| [p.va, p.vb])
            .filter(|v| *v > 0.0)
            .collect();
        levels.sort_by(|a, b| b.total_cmp(a));
        levels.dedup();
        levels.push(0.0);

        let mut by_hi: Vec<usize> = (0..self.pieces.len()).collect();
        by_hi.sort_by(|&a, &b| self.pieces[b].hi().total_cmp(&self.pieces[a].hi()));
        let mut by_lo = by_hi.clone();
        by_lo.sort_by(|&a, &b| self.pieces[b].lo().total_cmp(&self.pieces[a].lo()));

        let mut out = vec![0.0; r.len()];
        let mut j = 0;
        let (mut enter, mut leave) = (0, 0);
        let mut active: Vec<usize> = Vec::new();
        let mut full = 0.0;
        let mut upper = levels[0];

        for &lower in &levels[1..] {
            // Pieces with lo ≥ upper are entirely above every t < upper.
            while leave < by_lo.len() && self.pieces[by_lo[leave]].lo() >= upper {
                full += self.full_volume(&self.pieces[by_lo[leave]]);
                leave += 1;
            }
            while enter < by_hi.len() && self.pieces[by_hi[enter]].hi() >= upper {
                enter += 1;
            }
            active.clear();
            active.extend(by_hi[..enter].iter().copied().filter(|&i| {
                let p = &self.pieces[i];
                p.lo() <= lower && p.hi() >= upper && p.hi() > p.lo()
            }));

            let mu = |t: f64| -> f64 {
                full + active
                    .iter()
                    .map(|&i| self.partial_volume(&self.pieces[i], t))
                    .sum::<f64>()
            };
            let mu_top = mu(upper);
            let mu_low = mu(lower);

            while j < r.len() {
                let mut target = self.volume(0.0, r[j]);
                // Absorb round-off between the summed piece volumes and the
                // ball volume at the outermost radius.
                if target > mu_low && target <= mu_low * (1.0 + 1e-12) {
                    target = mu_low;
                }
                if target <= mu_top {
                    out[j] = upper;
                } else if target <= mu_low {
                    // μ is nonincreasing in t on [lower, upper].
                    out[j] = bracketed_root(|t| mu(t) - target, lower, upper, mu_low - target, mu_top - target);
                } else {
                    break;
                }
                j += 1;
            }
            upper = lower;
        }
        // Remaining radii lie beyond the support of |f|.
        out
    }
}

/// Weighted isotonic regression of `|f|` onto nonincreasing sequences
/// (pool-adjacent-violators). Zero-weight nodes are pooled with their
/// neighbours and take the pooled value.
pub fn monotone_projection(f: &RadialField) -> RearrangedField {
    let grid = f.grid().clone();
    let abs: Vec<f64> = f.values().iter().map(|x| x.abs()).collect();
    let values = pava_nonincreasing(&abs, grid.quad_weights());
    RearrangedField::new(RadialField::from_parts(grid, values))
}

pub(crate) fn pava_nonincreasing(y: &[f64], w: &[f64]) -> Vec<f64> {
    // Each block: (mean, weight, count).
    let mut blocks: Vec<(f64, f64, usize)> = Vec::with_capacity(y.len());
    for (&yi, &wi) in y.iter().zip(w) {
        blocks.push((yi, wi, 1));
        while blocks.len() > 1 {
            let (v1, w1, c1) = blocks[blocks.len() - 1];
            let (v0, w0, c0) = blocks[blocks.len() - 2];
            if v0 >= v1 {
                break;
            }
            let wt = w0 + w1;
            let v = if wt > 0.0 {
                (v0 * w0 + v1 * w1) / wt
            } else {
                v0.max(v1)
            };
            blocks.pop();
            *blocks.last_mut().expect("two blocks present") = (v, wt, c0 + c1);
        }
    }
    blocks
        .into_iter()
        .flat_map(|(v, _, c)| std::iter::repeat(v).take(c))
        .collect()
}

/// `‖D f*‖₂ ≤ ‖D f‖₂` up to a relative tolerance.
pub fn check_polya_szego(op: &RadialOperator, f: &RadialField) -> Result<ComparisonReport> {
    let star = decreasing_rearrangement(f).field;
    let lhs = op.h1_seminorm_sq(&star)?.sqrt();
    let rhs = op.h1_seminorm_sq(f)?.sqrt();
    Ok(ComparisonReport::le(lhs, rhs, INEQUALITY_TOL * rhs))
}

/// `∫|fg| ≤ ∫f*g*` and `‖fg‖_q ≤ ‖f*g*‖_q`.
pub fn check_hardy_littlewood(f: &RadialField, g: &RadialField, q: f64) -> Result<HardyLittlewoodReport> {
    f.ensure_same_grid(g)?;
    let fs = decreasing_rearrangement(f).field;
    let gs = decreasing_rearrangement(g).field;
    let grid: &Arc<RadialGrid> = f.grid();
    let product = |a: &RadialField, b: &RadialField| -> RadialField {
        let v = a
            .values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| (x * y).abs())
            .collect();
        RadialField::from_parts(grid.clone(), v)
    };
    let fg = product(f, g);
    let fsgs = product(&fs, &gs);
    let lhs = grid.integrate(fg.values());
    let rhs = grid.integrate(fsgs.values());
    let lq = lp_norm_p(&fg, q);
    let rq = lp_norm_p(&fsgs, q);
    Ok(HardyLittlewoodReport {
        integral: ComparisonReport::le(lhs, rhs, INEQUALITY_TOL * rhs.abs()),
        q_norm: ComparisonReport::le(lq, rq, INEQUALITY_TOL * rq.abs()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    fn grid(n: usize, r_max: f64, len: usize) -> Arc<RadialGrid> {
        Arc::new(make_grid(n, r_max, len).unwrap())
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn pava_two_point_oracle() {
        assert_eq!(pava_nonincreasing(&[1.0, 3.0], &[1.0, 1.0]), vec![2.0, 2.0]);
        assert_eq!(pava_nonincreasing(&[1.0, 3.0], &[3.0, 1.0]), vec![1.5, 1.5]);
        assert_eq!(pava_nonincreasing(&[0.0, 3.0, 1.0], &[0.0, 1.0, 1.0]), vec![3.0, 3.0, 1.0]);
        assert_eq!(pava_nonincreasing(&[3.0, 2.0, 2.0], &[1.0, 1.0, 1.0]), vec![3.0, 2.0, 2.0]);
    }

    #[test]
    fn monotone_input_is_fixed() {
        for n in 1..=3 {
            let g = grid(n, 20.0, 1024);
            let f = RadialField::from_fn(g, |r| (-r).exp() / (1.0 + r));
            let star = decreasing_rearrangement(&f);
            assert!(star.is_monotone);
            assert!(star.field.sup_distance(&f) <= 1e-12, "n={n}");
            assert_eq!(monotone_projection(&f).field, f);
        }
    }

    #[test]
    fn shifted_bump_moves_to_origin() {
        let g = grid(1, 30.0, 4096);
        let f = RadialField::from_fn(g.clone(), |r| 1.0 / (r - 5.0).cosh());
        let star = decreasing_rearrangement(&f);
        assert!(star.is_monotone);
        // For t > sech(5), {f > t} has measure 4 arcsech(t) on the line, so
        // f*(r) = sech(r/2) up to r = 10; below that level the bump is cut
        // off at the origin and the measure is 2(5 + arcsech(t)).
        let exact = RadialField::from_fn(g.clone(), |r| {
            if r <= 10.0 {
                1.0 / (0.5 * r).cosh()
            } else {
                1.0 / (r - 5.0).cosh()
            }
        });
        // The even extension of f has a corner at the origin that the
        // interpolant (with f'(0) = 0) smooths over; it only affects levels
        // near f(0) = sech(5), i.e. radii near 10.
        let away = |a: &RadialField, b: &RadialField, lo: f64, hi: f64| {
            g.nodes()
                .iter()
                .zip(a.values().iter().zip(b.values()))
                .filter(|(r, _)| **r >= lo && **r <= hi)
                .map(|(_, (x, y))| (x - y).abs())
                .fold(0.0, f64::max)
        };
        assert!(away(&star.field, &exact, 0.0, 9.5) < 1e-8);
        assert!(star.field.sup_distance(&exact) < 1e-5);
        for p in [2.0, 3.0, 4.0] {
            assert!(rel(lp_norm_p(&star.field, p), lp_norm_p(&f, p)) < 1e-8, "p={p}");
        }
    }

    #[test]
    fn sign_is_ignored() {
        let g = grid(2, 10.0, 512);
        let f = RadialField::from_fn(g, |r| (r - 3.0) * (-(r - 3.0).powi(2)).exp());
        let a = decreasing_rearrangement(&f);
        let b = decreasing_rearrangement(&f.abs());
        assert_eq!(a, b);
    }

    #[test]
    fn norms_preserved_in_all_dimensions() {
        for n in 1..=3 {
            let g = grid(n, 20.0, 2048);
            let f = RadialField::from_fn(g, |r| (-(r - 4.0).powi(2)).exp());
            let star = decreasing_rearrangement(&f);
            assert!(star.is_monotone);
            for p in [2.0, 3.0, 6.0] {
                let e = rel(lp_norm_p(&star.field, p), lp_norm_p(&f, p));
                assert!(e < 1e-8, "n={n} p={p} err={e}");
            }
        }
    }

    #[test]
    fn secondary_peaks_limit_norm_agreement_to_second_order() {
        // A second bump puts a slope discontinuity into f* at the level of its
        // peak, so nodal quadrature agrees only to O(h²).
        let two_bumps = |r: f64| (-(r - 4.0).powi(2)).exp() + 0.5 * (-(r - 9.0).powi(2) / 2.0).exp();
        for n in 1..=3 {
            let g = grid(n, 20.0, 2048);
            let f = RadialField::from_fn(g, two_bumps);
            let star = decreasing_rearrangement(&f).field;
            let e = rel(lp_norm_p(&star, 2.0), lp_norm_p(&f, 2.0));
            assert!(e < 2e-6, "n={n} err={e}");
        }
    }

    #[test]
    fn rearrangement_is_idempotent_and_projection_fixes_it() {
        let g = grid(3, 15.0, 1024);
        let f = RadialField::from_fn(g, |r| (r * 1.3).sin().abs() * (-0.3 * r).exp());
        let once = decreasing_rearrangement(&f).field;
        let twice = decreasing_rearrangement(&once).field;
        assert!(once.sup_distance(&twice) < 1e-12);
        let proj = monotone_projection(&once).field;
        assert_eq!(proj, once);
    }

    #[test]
    fn polya_szego_strict_for_bump() {
        let g = grid(1, 30.0, 4096);
        let op = RadialOperator::new(g.clone());
        let f = RadialField::from_fn(g.clone(), |r| 1.0 / (r - 5.0).cosh());
        let rep = check_polya_szego(&op, &f).unwrap();
        assert!(rep.holds && rep.lhs < 0.9 * rep.rhs);
        let m = RadialField::from_fn(g, |r| 1.0 / r.cosh());
        let rep = check_polya_szego(&op, &m).unwrap();
        assert!(rep.holds && rel(rep.lhs, rep.rhs) < 1e-10);
    }

    #[test]
    fn hardy_littlewood_cases() {
        let g = grid(2, 20.0, 1024);
        let f = RadialField::from_fn(g.clone(), |r| (-r * r).exp());
        let h = RadialField::from_fn(g.clone(), |r| (-(r - 5.0).powi(2)).exp());
        let rep = check_hardy_littlewood(&f, &h, 2.0).unwrap();
        assert!(rep.holds());
        assert!(rep.integral.lhs < 0.01 * rep.integral.rhs);
        let m = RadialField::from_fn(g, |r| 1.0 / (1.0 + r * r));
        let rep = check_hardy_littlewood(&f, &m, 1.5).unwrap();
        assert!(rep.holds());
        assert!(rel(rep.integral.lhs, rep.integral.rhs) < 1e-10);
        let other = RadialField::zeros(grid(2, 20.0, 512));
        assert!(check_hardy_littlewood(&f, &other, 2.0).is_err());
    }
}
