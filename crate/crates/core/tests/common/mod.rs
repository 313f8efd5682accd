#![allow(dead_code)]

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lattice_harmonic::dirichlet::DirichletSolver;
use lattice_harmonic::strip::{StripBoundaryData, StripSolution};
use lattice_harmonic::{GridDomain, LatticePoint, Mesh};

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn interval(den: u32) -> Arc<GridDomain> {
    Arc::new(GridDomain::box_domain(Mesh::new(den, 1).unwrap(), &[1]).unwrap())
}

pub fn unit_square(den: u32) -> Arc<GridDomain> {
    Arc::new(GridDomain::box_domain(Mesh::new(den, 2).unwrap(), &[1, 1]).unwrap())
}

/// Unit square minus the closed quadrant `[1/2, 1]²`.
pub fn l_shape(den: u32) -> Arc<GridDomain> {
    let d = i64::from(den);
    let half = d / 2;
    let pts = (1..d)
        .flat_map(|x| (1..d).map(move |y| (x, y)))
        .filter(|&(x, y)| !(x >= half && y >= half))
        .map(|(x, y)| LatticePoint::new(vec![x, y]));
    Arc::new(GridDomain::from_interior(Mesh::new(den, 2).unwrap(), pts).unwrap())
}

/// The three test bases at one mesh, labelled.
pub fn bases(den: u32) -> Vec<(&'static str, Arc<GridDomain>)> {
    vec![
        ("interval", interval(den)),
        ("square", unit_square(den)),
        ("l-shape", l_shape(den)),
    ]
}

/// Random `n = 1` strip data on `|j| ≤ support` for both layers.
pub fn random_strip(layers: u32, support: i64, r: &mut ChaCha8Rng) -> StripBoundaryData {
    let mut layer = || -> Vec<(Vec<i64>, f64)> {
        (-support..=support)
            .map(|j| (vec![j], r.random_range(-1.0..1.0)))
            .collect()
    };
    let bottom = layer();
    let top = layer();
    StripBoundaryData::new(layers, 1, bottom, top).unwrap()
}

/// Largest deviation between the strip solution and a direct solve on the
/// truncated strip `{0..L} × {−w..w}` with zero side data, over the
/// solution's window and interior layers.
pub fn strip_vs_direct(data: &StripBoundaryData, sol: &StripSolution, w: i64) -> f64 {
    let l = i64::from(data.layers());
    let pts = (1..l)
        .flat_map(|k| (-w + 1..w).map(move |j| LatticePoint::new(vec![k, j])));
    let dom = Arc::new(GridDomain::from_interior(Mesh::new(data.layers(), 2).unwrap(), pts).unwrap());
    let u = DirichletSolver::new(dom)
        .unwrap()
        .solve_fn(|p| {
            let (k, j) = (p.coords()[0], p.coords()[1]);
            let layer = if k == 0 {
                data.bottom()
            } else if k == l {
                data.top()
            } else {
                return 0.0;
            };
            layer.get(&vec![j]).copied().unwrap_or(0.0)
        })
        .unwrap();
    let r = sol.window_radius() as i64;
    let mut worst = 0.0f64;
    for k in 1..l {
        for j in -r..=r {
            let a = sol.value(k as usize, &[j]).unwrap();
            let b = u.value_at(&LatticePoint::new(vec![k, j])).unwrap();
            worst = worst.max((a - b).abs());
        }
    }
    worst
}
