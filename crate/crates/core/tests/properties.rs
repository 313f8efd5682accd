mod common;

use std::sync::Arc;

use proptest::prelude::*;
use rand::Rng;

use lattice_harmonic::cylinder::{
    comparison_function, harmonic_measure, midsection_linear_bound, mid_layer_measure, ones_projection,
    CylinderSpec, Region,
};
use lattice_harmonic::dirichlet::{residual, DirichletSolver};
use lattice_harmonic::montecarlo::{estimate_exit_probability, WalkConfig};
use lattice_harmonic::spectral::{cube_spectrum_closed_form, dirichlet_spectrum, rayleigh_quotient};
use lattice_harmonic::strip::{coefficient_reproduction_error, SymbolGrid};
use lattice_harmonic::{GridDomain, LatticePoint, Mesh};

use common::*;

fn boundary_vec(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn solve_is_linear(b1 in boundary_vec(64), b2 in boundary_vec(64), a in -3.0f64..3.0, c in -3.0f64..3.0) {
        let dom = l_shape(4);
        let nb = dom.num_boundary();
        let (b1, b2) = (&b1[..nb], &b2[..nb]);
        let s = DirichletSolver::new(dom).unwrap();
        let combined: Vec<f64> = b1.iter().zip(b2).map(|(x, y)| a * x + c * y).collect();
        let lhs = s.solve(&combined).unwrap();
        let rhs = s.solve(b1).unwrap().combine(a, &s.solve(b2).unwrap(), c).unwrap();
        for (x, y) in lhs.values().iter().zip(rhs.values()) {
            prop_assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn comparison_principle(b in boundary_vec(16), bump in prop::collection::vec(0.0f64..1.0, 16)) {
        let dom = unit_square(5);
        let s = DirichletSolver::new(dom).unwrap();
        let upper: Vec<f64> = b.iter().zip(&bump).map(|(x, e)| x + e).collect();
        let lo = s.solve(&b).unwrap();
        let hi = s.solve(&upper).unwrap();
        prop_assert!(lo.check_max_principle() && hi.check_max_principle());
        for (x, y) in lo.interior_values().iter().zip(hi.interior_values()) {
            prop_assert!(*x <= y + 1e-13);
        }
    }

    #[test]
    fn rayleigh_quotient_at_least_lambda1(g in prop::collection::vec(-1.0f64..1.0, 9)) {
        prop_assume!(g.iter().any(|v| v.abs() > 1e-3));
        let dom = unit_square(4);
        let lam1 = dirichlet_spectrum(dom.clone()).unwrap().eigenvalues()[0];
        prop_assert!(rayleigh_quotient(&dom, &g) >= lam1 * (1.0 - 1e-12));
    }
}

#[test]
fn rayleigh_random_trials_and_minimiser() {
    let dom = l_shape(8);
    let spec = dirichlet_spectrum(dom.clone()).unwrap();
    let lam1 = spec.eigenvalues()[0];
    let mut r = rng(11, 0);
    for _ in 0..100 {
        let g: Vec<f64> = (0..dom.num_interior()).map(|_| r.random_range(-1.0..1.0)).collect();
        assert!(rayleigh_quotient(&dom, &g) >= lam1 * (1.0 - 1e-12));
    }
    let q = rayleigh_quotient(&dom, spec.eigenvector(0));
    assert!((q - lam1).abs() <= 1e-10 * lam1);
}

#[test]
fn degenerate_cluster_projectors_match_closed_form() {
    let mesh = Mesh::new(6, 2).unwrap();
    let closed = cube_spectrum_closed_form(1, mesh).unwrap();
    let numeric = dirichlet_spectrum(closed.domain().clone()).unwrap();
    let clusters = closed.clusters();
    assert!(clusters.iter().any(|c| c.len() > 1), "square has degenerate levels");
    for c in clusters {
        let d = numeric.projector(c.clone()) - closed.projector(c.clone());
        assert!(d.norm() <= 1e-8, "{c:?}: {}", d.norm());
        let p1 = ones_projection(&numeric, c.clone());
        let p2 = ones_projection(&closed, c);
        for (x, y) in p1.iter().zip(&p2) {
            assert!((x - y).abs() <= 1e-8);
        }
    }
}

#[test]
fn eigenvalues_decrease_when_domain_grows() {
    let small = l_shape(8);
    let big = unit_square(8);
    let ls = dirichlet_spectrum(small).unwrap();
    let lb = dirichlet_spectrum(big).unwrap();
    for (b, s) in lb.eigenvalues().iter().zip(ls.eigenvalues()) {
        assert!(*b <= s * (1.0 + 1e-10));
    }
}

fn cylinder(base: Arc<GridDomain>, half: u64) -> CylinderSpec {
    CylinderSpec::new(base, half).unwrap()
}

#[test]
fn measure_is_even_and_increasing_in_s() {
    for base in [interval(4), l_shape(4)] {
        let spec = cylinder(base, 6);
        let (_, g) = harmonic_measure(&spec);
        let n = spec.base().dimension();
        for i in 0..spec.domain().num_interior() {
            let p = spec.domain().point(i);
            let s = p.coords()[n];
            let mirror = LatticePoint::new([&p.coords()[..n], &[-s]].concat());
            let v = g.values()[i];
            assert!((v - g.value_at(&mirror).unwrap()).abs() <= 1e-14);
            if s >= 0 {
                let out = p.shifted(n, 1);
                assert!(g.value_at(&out).unwrap() >= v - 1e-15);
            }
        }
    }
}

#[test]
fn cap_perturbation_bounded_by_measure() {
    let spec = cylinder(unit_square(4), 4);
    let (exp, _) = harmonic_measure(&spec);
    let gmid = mid_layer_measure(&spec, &exp).into_iter().fold(0.0, f64::max);
    let solver = DirichletSolver::new(spec.domain().clone()).unwrap();
    let k = spec.domain().num_interior();
    let mut r = rng(12, 0);
    for eta in [1e-6, 1e-3, 1.0] {
        let b: Vec<f64> = (0..spec.domain().num_boundary()).map(|_| r.random_range(-1.0..1.0)).collect();
        let mut perturbed = b.clone();
        for (j, v) in perturbed.iter_mut().enumerate() {
            if matches!(spec.region(k + j), Region::Cap { .. }) {
                *v += r.random_range(-eta..=eta);
            }
        }
        let diff = solver.solve(&b).unwrap().combine(1.0, &solver.solve(&perturbed).unwrap(), -1.0).unwrap();
        for idx in spec.mid_layer_indices() {
            assert!(diff.values()[idx].abs() <= eta * gmid * (1.0 + 1e-9) + 1e-15);
        }
    }
}

#[test]
fn midsection_bound_random_weights() {
    let base = Arc::new(GridDomain::box_steps(Mesh::new(4, 1).unwrap(), &[4]).unwrap());
    assert_eq!(base.num_interior(), 3);
    let mut r = rng(13, 0);
    for half in [1u64, 2, 4, 8] {
        let spec = cylinder(base.clone(), half);
        for _ in 0..25 {
            let w: Vec<f64> = (0..3).map(|_| r.random_range(0.0..2.0)).collect();
            let m = midsection_linear_bound(&spec, &w).unwrap();
            assert!(m.holds(), "{m:?}");
        }
    }
}

#[test]
fn monte_carlo_agrees_with_direct_solve() {
    let mut r = rng(14, 0);
    let mut bases = vec![interval(4), unit_square(4), l_shape(4)];
    bases.push(interval(2));
    for i in 0..20u64 {
        let base = bases[i as usize % bases.len()].clone();
        let spec = cylinder(base, r.random_range(1..4));
        let (_, g) = harmonic_measure(&spec);
        let start_idx = r.random_range(0..spec.domain().num_interior());
        let start = spec.domain().point(start_idx).clone();
        let cfg = WalkConfig::new(i, 20_000);
        let caps = estimate_exit_probability(spec.domain(), &start, &spec.cap_positions(), &cfg).unwrap();
        let wall = estimate_exit_probability(spec.domain(), &start, &spec.wall_positions(), &cfg).unwrap();
        let exact = g.values()[start_idx];
        assert!(
            (caps.estimate - exact).abs() <= 4.0 * caps.stderr.max(1e-12),
            "instance {i}: {} vs {exact} (stderr {})",
            caps.estimate,
            caps.stderr
        );
        // same seed, same walks: every walk exits through exactly one part
        assert_eq!(caps.stopped, 0);
        assert_eq!(caps.hits + wall.hits, caps.samples);
    }
}

#[test]
fn strip_symbols_satisfy_recurrence_and_reproduce_data() {
    let mut r = rng(15, 0);
    for layers in [2u32, 3, 5, 8] {
        let data = random_strip(layers, 2, &mut r);
        assert!(SymbolGrid::shifted(&data, 256).recurrence_error() <= 1e-12);
        assert!(coefficient_reproduction_error(&data, 256) <= 1e-12);
    }
}

#[test]
fn strip_matches_truncated_direct_solve() {
    let mut r = rng(16, 0);
    let data = random_strip(4, 2, &mut r);
    let sol = lattice_harmonic::strip::solve_strip(&data, 64).unwrap();
    let w = sol.window_radius() as i64 + 60;
    assert!(strip_vs_direct(&data, &sol, w) <= 1e-8);
}

#[test]
fn comparison_function_is_harmonic() {
    for base in [interval(4), unit_square(4)] {
        let s = dirichlet_spectrum(base).unwrap();
        for k_axes in [1usize, 2] {
            let u = comparison_function(&s, 3, k_axes).unwrap();
            let scale = u.domain().mesh().inv_delta_sq() * u.max_abs();
            assert!(residual(&u) <= 1e-9 * scale);
            assert!(u.interior_values().iter().all(|&v| v > 0.0));
        }
    }
}
