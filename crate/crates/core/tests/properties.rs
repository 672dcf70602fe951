use std::sync::Arc;

use approx::assert_relative_eq;
use proptest::prelude::*;

use nehari_core::functionals::Energy;
use nehari_core::symmetrization::{decreasing_rearrangement, monotone_projection};
use nehari_core::thresholds::{constant_c, constant_d, sufficient_bound};
use nehari_core::{lp_norm_p, ProblemParams, RadialField, RadialGrid, RadialOperator, StatePair};

fn grid(n: usize, num_points: usize) -> Arc<RadialGrid> {
    Arc::new(RadialGrid::new(n, 20.0, num_points).unwrap())
}

fn field(g: &Arc<RadialGrid>, values: &[f64]) -> RadialField {
    let mut v = values.to_vec();
    v.resize(g.num_points(), 0.0);
    *v.last_mut().unwrap() = 0.0;
    RadialField::new(g.clone(), v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_lands_in_cone_and_is_idempotent(values in prop::collection::vec(-3.0f64..3.0, 64), n in 1usize..=3) {
        let g = grid(n, 64);
        let f = field(&g, &values);
        let p = monotone_projection(&f).field;
        prop_assert!(p.is_nonincreasing());
        prop_assert!(p.values().iter().all(|x| *x >= 0.0));
        let pp = monotone_projection(&p).field;
        prop_assert_eq!(p.values(), pp.values());
    }

    #[test]
    fn projection_preserves_weighted_mass(values in prop::collection::vec(0.0f64..3.0, 64)) {
        // Pooling replaces each block by its weighted mean.
        let g = grid(1, 64);
        let f = field(&g, &values);
        let p = monotone_projection(&f).field;
        let before = g.integrate(f.values());
        let after = g.integrate(p.values());
        prop_assert!((before - after).abs() <= 1e-12 * before.abs().max(1.0));
    }

    #[test]
    fn rearrangement_fixes_decreasing_gaussians(a in 0.05f64..2.0, amp in 0.1f64..5.0, n in 1usize..=3) {
        let g = grid(n, 512);
        let f = RadialField::from_fn(g.clone(), |r| amp * (-a * r * r).exp() * (1.0 - (r / 20.0).powi(2)).powi(2));
        let fs = decreasing_rearrangement(&f).field;
        prop_assert!(fs.sup_distance(&f) <= 1e-12 * amp);
    }

    #[test]
    fn rearrangement_is_idempotent(c in 0.0f64..12.0, w in 0.5f64..3.0, n in 1usize..=3) {
        let g = grid(n, 512);
        let f = RadialField::from_fn(g.clone(), |r| (-((r - c) / w).powi(2)).exp() * (1.0 - (r / 20.0).powi(2)).powi(2));
        let once = decreasing_rearrangement(&f).field;
        prop_assert!(once.is_nonincreasing());
        let twice = decreasing_rearrangement(&once).field;
        prop_assert!(twice.sup_distance(&once) <= 1e-12);
    }

    #[test]
    fn quotient_is_scale_invariant(lambda in 0.05f64..20.0, q in 1.2f64..2.9, b in 0.0f64..4.0) {
        let g = grid(3, 256);
        let e = Energy::new(RadialOperator::new(g.clone()), ProblemParams::new(3, q, b, 1.5));
        let s = StatePair::new(
            RadialField::from_fn(g.clone(), |r| (-r * r / 4.0).exp()),
            RadialField::from_fn(g.clone(), |r| 0.5 / (1.0 + r * r)),
        ).unwrap();
        let j = e.scale_invariant_quotient(&s).unwrap();
        let jl = e.scale_invariant_quotient(&s.scaled(lambda)).unwrap();
        prop_assert!((j - jl).abs() <= 1e-10 * j);
    }

    #[test]
    fn projected_states_satisfy_both_energy_expressions(amp in 0.01f64..10.0, q in 1.2f64..4.0, b in 0.0f64..4.0, omega in 1.0f64..4.0) {
        let g = grid(1, 256);
        let p = ProblemParams::new(1, q, b, omega);
        let e = Energy::new(RadialOperator::new(g.clone()), p);
        let s = StatePair::new(
            RadialField::from_fn(g.clone(), |r| amp / r.cosh()),
            RadialField::from_fn(g.clone(), |r| amp * (-r * r).exp()),
        ).unwrap();
        let on = e.project_to_manifold(&s).unwrap();
        let br = e.energy_and_tau(&on).unwrap();
        prop_assert!(br.tau.abs() <= 1e-12 * br.omega_norm_sq);
        let f = p.energy_factor();
        prop_assert!((br.energy - f * br.p_term).abs() <= 1e-10 * br.energy);
        prop_assert!(e.nehari_derivative(&on).unwrap() < 0.0);
    }

    #[test]
    fn quadratic_threshold_closed_forms(omega in 1.0f64..20.0) {
        // q = 2: D = (3/2) ω² - ω⁻¹/2 and, for n = 1, C = ½(5/4 + 3/(4ω²))² ω³ - 1.
        let d = constant_d(2.0, omega).unwrap();
        prop_assert!((d - (1.5 * omega * omega - 0.5 / omega)).abs() <= 1e-12 * d.abs().max(1.0));
        let c = constant_c(&ProblemParams::new(1, 2.0, 0.0, omega));
        let expect = 0.5 * (1.25 + 0.75 / (omega * omega)).powi(2) * omega.powi(3) - 1.0;
        prop_assert!((c - expect).abs() <= 1e-12 * expect.abs().max(1.0));
    }
}

#[test]
fn unit_epsilon_bound_reproduces_d_at_omega_one() {
    // ε = 1: ((2^q - 1)/2) - 1/2 = 2^{q-1} - 1 = D(q, 1).
    for q in [2.0, 2.5, 3.0] {
        let bound = sufficient_bound(q, 1.0, 1, 1.0).unwrap();
        assert_relative_eq!(bound, 2f64.powf(q - 1.0) - 1.0, max_relative = 1e-14);
        assert_relative_eq!(bound, constant_d(q, 1.0).unwrap(), max_relative = 1e-14);
    }
}

#[test]
fn rearranged_bump_keeps_its_norms() {
    // A single off-centre bump is unimodal along the radius, so every level
    // set is one interval and norms are preserved to quadrature accuracy.
    let g = Arc::new(RadialGrid::new(1, 30.0, 4096).unwrap());
    let f = RadialField::from_fn(g, |r| 1.0 / (r - 5.0).cosh());
    let fs = decreasing_rearrangement(&f).field;
    assert!(fs.is_nonincreasing());
    for p in [2.0, 3.0, 4.0] {
        assert_relative_eq!(lp_norm_p(&fs, p), lp_norm_p(&f, p), max_relative = 1e-8);
    }
    // The peak at r = 5 falls between nodes; the interpolant recovers it to O(h⁴).
    assert_relative_eq!(fs.values()[0], 1.0, max_relative = 1e-9);
}
