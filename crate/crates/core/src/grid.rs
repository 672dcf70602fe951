//! Uniform radial mesh, nodal radial fields and pairs of fields.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 16;

/// Surface factor `σ_n` turning `∫_0^R f(r) r^{n-1} dr` into an integral over the
/// ball of radius `R` (for `n = 1` the whole symmetric interval).
pub fn sphere_factor(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => 2.0 * PI.powf(n as f64 / 2.0) / gamma_half_integer(n),
    }
}

// Γ(n/2) for positive integers n.
fn gamma_half_integer(n: usize) -> f64 {
    if n % 2 == 0 {
        (1..n / 2).map(|k| k as f64).product()
    } else {
        let mut g = PI.sqrt();
        let mut x = 0.5;
        while x < n as f64 / 2.0 - 0.25 {
            g *= x;
            x += 1.0;
        }
        g
    }
}

/// Measure of the ball of radius `r` in `R^n`.
pub fn ball_measure(n: usize, r: f64) -> f64 {
    sphere_factor(n) * r.powi(n as i32) / n as f64
}

/// Uniform mesh `r_i = i h` on `[0, r_max]` with quadrature weights for
/// `σ_n ∫ f(r) r^{n-1} dr`.
///
/// Weights are trapezoidal in `r^{n-1} f` with a Gregory end correction at
/// `r_max` and, for `n = 2`, the Euler–Maclaurin origin term `σ h²/12`. For
/// even profiles this is fourth-order accurate and it integrates the constant
/// function exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    n: usize,
    r_max: f64,
    h: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

pub fn make_grid(n: usize, r_max: f64, num_points: usize) -> Result<RadialGrid> {
    RadialGrid::new(n, r_max, num_points)
}

impl RadialGrid {
    pub fn new(n: usize, r_max: f64, num_points: usize) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::InvalidGrid(format!("dimension {n} is not supported")));
        }
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(Error::InvalidGrid(format!("r_max must be positive, got {r_max}")));
        }
        if num_points < MIN_POINTS {
            return Err(Error::InvalidGrid(format!(
                "need at least {MIN_POINTS} points, got {num_points}"
            )));
        }
        let last = num_points - 1;
        let h = r_max / last as f64;
        let mut nodes: Vec<f64> = (0..num_points).map(|i| i as f64 * h).collect();
        nodes[last] = r_max;

        let sigma = sphere_factor(n);
        let radial = |r: f64| r.powi(n as i32 - 1);
        let mut weights: Vec<f64> = nodes.iter().map(|&r| sigma * h * radial(r)).collect();
        weights[0] *= 0.5;
        weights[last] *= 0.5;
        // Gregory correction: -(h/12)∇y_N - (h/24)∇²y_N
        for (offset, c) in [(0, -1.0 / 8.0), (1, 1.0 / 6.0), (2, -1.0 / 24.0)] {
            let i = last - offset;
            weights[i] += c * sigma * h * radial(nodes[i]);
        }
        if n == 2 {
            weights[0] += sigma * h * h / 12.0;
        }
        Ok(Self {
            n,
            r_max,
            h,
            nodes,
            weights,
        })
    }

    /// Default truncation radius and resolution for dimension `n`.
    pub fn default_size(n: usize) -> (f64, usize) {
        if n == 1 {
            (30.0, 4096)
        } else {
            (20.0, 2048)
        }
    }

    pub fn default_for(n: usize) -> Result<Self> {
        let (r_max, num_points) = Self::default_size(n);
        Self::new(n, r_max, num_points)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn num_points(&self) -> usize {
        self.nodes.len()
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn quad_weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn sigma(&self) -> f64 {
        sphere_factor(self.n)
    }

    /// First node carried as an unknown. For `n = 3` the origin has zero
    /// quadrature weight and its value is reconstructed from its neighbours.
    pub fn first_free(&self) -> usize {
        usize::from(self.n == 3)
    }

    /// Index of the Dirichlet node at `r_max`.
    pub fn dirichlet_node(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Even extrapolation `a + b r² + c r⁴` through nodes 1..=3, evaluated at the origin.
    pub fn extrapolate_origin(values: &[f64]) -> f64 {
        (15.0 * values[1] - 6.0 * values[2] + values[3]) / 10.0
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, f)| w * f).sum()
    }

    pub fn integrate_fn(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.weights.iter().zip(&self.nodes).map(|(w, &r)| w * f(r)).sum()
    }

    pub fn measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn same_shape(&self, other: &RadialGrid) -> bool {
        self.n == other.n && self.r_max == other.r_max && self.nodes.len() == other.nodes.len()
    }
}

/// Nodal values of a radial function on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialField {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
}

impl RadialField {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.num_points() {
            return Err(Error::LengthMismatch {
                expected: grid.num_points(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_parts(grid: Arc<RadialGrid>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.num_points());
        Self { grid, values }
    }

    pub fn zeros(grid: Arc<RadialGrid>) -> Self {
        let n = grid.num_points();
        Self::from_parts(grid, vec![0.0; n])
    }

    pub fn from_fn(grid: Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self::from_parts(grid, values)
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn same_grid(&self, other: &RadialField) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || self.grid.same_shape(&other.grid)
    }

    pub fn ensure_same_grid(&self, other: &RadialField) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_parts(self.grid.clone(), self.values.iter().map(|&x| f(x)).collect())
    }

    pub fn scaled(&self, t: f64) -> Self {
        self.map(|x| t * x)
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    /// `self + t * other`
    pub fn axpy(&self, t: f64, other: &RadialField) -> Self {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + t * b)
            .collect();
        Self::from_parts(self.grid.clone(), values)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&x| x == 0.0)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn sup_distance(&self, other: &RadialField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0])
    }
}

/// A pair `(u, v)` of radial fields on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StatePair {
    pub u: RadialField,
    pub v: RadialField,
}

impl StatePair {
    pub fn new(u: RadialField, v: RadialField) -> Result<Self> {
        u.ensure_same_grid(&v)?;
        Ok(Self { u, v })
    }

    pub fn zeros(grid: Arc<RadialGrid>) -> Self {
        Self {
            u: RadialField::zeros(grid.clone()),
            v: RadialField::zeros(grid),
        }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        self.u.grid()
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            u: self.u.scaled(t),
            v: self.v.scaled(t),
        }
    }

    pub fn axpy(&self, t: f64, dir: &StatePair) -> Self {
        Self {
            u: self.u.axpy(t, &dir.u),
            v: self.v.axpy(t, &dir.v),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    pub fn swapped(&self) -> Self {
        Self {
            u: self.v.clone(),
            v: self.u.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_measure() {
        let g = make_grid(1, 30.0, 4096).unwrap();
        assert!((g.measure() - 60.0).abs() < 1e-10);
    }

    #[test]
    fn ball_volume_three_d() {
        let g = make_grid(3, 10.0, 1024).unwrap();
        let exact = 4.0 / 3.0 * PI * 1000.0;
        assert!(((g.measure() - exact) / exact).abs() < 1e-6);
    }

    #[test]
    fn measure_is_exact_for_every_dimension() {
        for n in 1..=3 {
            let g = make_grid(n, 20.0, 1024).unwrap();
            let exact = ball_measure(n, 20.0);
            assert!(((g.measure() - exact) / exact).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn degenerate_domain_rejected() {
        assert!(make_grid(2, 0.0, 64).is_err());
        assert!(make_grid(2, -1.0, 64).is_err());
        assert!(make_grid(2, 1.0, 15).is_err());
        assert!(make_grid(4, 1.0, 64).is_err());
    }

    #[test]
    fn nodes_and_weights() {
        for n in 1..=3 {
            let g = make_grid(n, 5.0, 64).unwrap();
            assert_eq!(g.nodes()[0], 0.0);
            assert_eq!(*g.nodes().last().unwrap(), 5.0);
            assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
            assert!(g.quad_weights().iter().all(|&w| w >= 0.0));
        }
        assert!(make_grid(1, 5.0, 64).unwrap().quad_weights()[0] > 0.0);
        assert!(make_grid(2, 5.0, 64).unwrap().quad_weights()[0] > 0.0);
        assert_eq!(make_grid(3, 5.0, 64).unwrap().quad_weights()[0], 0.0);
    }

    #[test]
    fn refinement_convergence_of_exponential() {
        // σ₃ ∫ e^{-2r} r² dr = 4π · 2/8 = π
        let err = |n_pts| {
            let g = make_grid(3, 30.0, n_pts).unwrap();
            (g.integrate_fn(|r| (-2.0 * r).exp()) - PI).abs()
        };
        let (e1, e2) = (err(512), err(1024));
        assert!(e2 < e1 / 3.5, "{e1} {e2}");
    }

    #[test]
    fn sphere_factor_generic() {
        assert!((sphere_factor(4) - 2.0 * PI * PI).abs() < 1e-12);
        assert!((sphere_factor(5) - 8.0 * PI * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn field_rejects_bad_input() {
        let g = Arc::new(make_grid(1, 1.0, 16).unwrap());
        assert!(RadialField::new(g.clone(), vec![0.0; 3]).is_err());
        let mut v = vec![0.0; 16];
        v[4] = f64::INFINITY;
        assert_eq!(RadialField::new(g, v).unwrap_err(), Error::NonFinite(4));
    }

    #[test]
    fn state_pair_requires_one_grid() {
        let a = Arc::new(make_grid(1, 1.0, 16).unwrap());
        let b = Arc::new(make_grid(1, 2.0, 16).unwrap());
        let u = RadialField::zeros(a);
        let v = RadialField::zeros(b);
        assert_eq!(StatePair::new(u, v).unwrap_err(), Error::GridMismatch);
    }
}
