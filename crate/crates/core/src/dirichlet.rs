//! Direct solution of the discrete Dirichlet problem on finite domains.
//!
//! The system `δ²(−Δ_δ)u = (boundary contributions)` has `2m` on the diagonal
//! and `−1` for every interior neighbor. It is symmetric positive definite and
//! is factored once with a skyline (profile) Cholesky in canonical index
//! order; each solve adds iterative refinement.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lattice::{GridDomain, LatticePoint};
use crate::operators::{GridFunction, HARMONIC_REL_TOL};

const REFINEMENT_STEPS: usize = 3;

/// Profile-stored lower Cholesky factor.
#[derive(Clone, Debug)]
struct SkylineCholesky {
    first: Vec<usize>,
    start: Vec<usize>,
    data: Vec<f64>,
}

impl SkylineCholesky {
    fn row(&self, i: usize) -> &[f64] {
        let len = i - self.first[i] + 1;
        &self.data[self.start[i]..self.start[i] + len]
    }

    fn factor(domain: &GridDomain) -> Result<Self> {
        let n = domain.num_interior();
        let diag = 2.0 * domain.dimension() as f64;
        let mut first = Vec::with_capacity(n);
        let mut start = Vec::with_capacity(n + 1);
        let mut total = 0;
        for i in 0..n {
            let f = domain
                .neighbors(i)
                .iter()
                .copied()
                .filter(|&j| j < i)
                .min()
                .unwrap_or(i);
            first.push(f);
            start.push(total);
            total += i - f + 1;
        }
        start.push(total);
        let mut data = vec![0.0; total];
        // scatter A's lower triangle
        for i in 0..n {
            data[start[i] + (i - first[i])] = diag;
            for &j in domain.neighbors(i) {
                if j < i {
                    data[start[i] + (j - first[i])] = -1.0;
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            for j in fi..=i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let mut s = data[start[i] + (j - fi)];
                let ri = start[i] + (k0 - fi);
                let rj = start[j] + (k0 - fj);
                for k in 0..(j - k0) {
                    s -= data[ri + k] * data[rj + k];
                }
                if j < i {
                    let pivot = data[start[j] + (j - fj)];
                    data[start[i] + (j - fi)] = s / pivot;
                } else {
                    if s <= 0.0 || !s.is_finite() {
                        return Err(Error::Solver {
                            reason: format!("non-positive pivot at row {i}"),
                            residual: s,
                        });
                    }
                    data[start[i] + (i - fi)] = s.sqrt();
                }
            }
        }
        Ok(SkylineCholesky { first, start, data })
    }

    fn solve_in_place(&self, x: &mut [f64]) {
        let n = x.len();
        for i in 0..n {
            let row = self.row(i);
            let fi = self.first[i];
            let mut s = x[i];
            for (k, l) in row[..row.len() - 1].iter().enumerate() {
                s -= l * x[fi + k];
            }
            x[i] = s / row[row.len() - 1];
        }
        for i in (0..n).rev() {
            let row = self.row(i);
            let fi = self.first[i];
            x[i] /= row[row.len() - 1];
            let xi = x[i];
            for (k, l) in row[..row.len() - 1].iter().enumerate() {
                x[fi + k] -= l * xi;
            }
        }
    }
}

/// A factored Dirichlet problem; reusable for many boundary data sets.
#[derive(Clone, Debug)]
pub struct DirichletSolver {
    domain: Arc<GridDomain>,
    factor: SkylineCholesky,
}

impl DirichletSolver {
    pub fn new(domain: Arc<GridDomain>) -> Result<Self> {
        let factor = SkylineCholesky::factor(&domain)?;
        Ok(DirichletSolver { domain, factor })
    }

    pub fn domain(&self) -> &Arc<GridDomain> {
        &self.domain
    }

    // δ²(−Δ_δ) restricted to interior unknowns
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let k = self.domain.num_interior();
        let diag = 2.0 * self.domain.dimension() as f64;
        for i in 0..k {
            let mut s = diag * x[i];
            for &j in self.domain.neighbors(i) {
                if j < k {
                    s -= x[j];
                }
            }
            out[i] = s;
        }
    }

    /// Solves with `boundary_values` given in the domain's boundary order.
    pub fn solve(&self, boundary_values: &[f64]) -> Result<GridFunction> {
        let d = &self.domain;
        let k = d.num_interior();
        if boundary_values.len() != d.num_boundary() {
            return Err(Error::DimensionMismatch {
                expected: d.num_boundary(),
                found: boundary_values.len(),
            });
        }
        if let Some(i) = boundary_values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(k + i));
        }
        let mut rhs = vec![0.0; k];
        for (i, r) in rhs.iter_mut().enumerate() {
            for &j in d.neighbors(i) {
                if j >= k {
                    *r += boundary_values[j - k];
                }
            }
        }
        let mut x = rhs.clone();
        self.factor.solve_in_place(&mut x);
        let mut ax = vec![0.0; k];
        for _ in 0..REFINEMENT_STEPS {
            self.apply(&x, &mut ax);
            let mut r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
            if r.iter().all(|&v| v == 0.0) {
                break;
            }
            self.factor.solve_in_place(&mut r);
            for (xi, ri) in x.iter_mut().zip(&r) {
                *xi += ri;
            }
        }
        let mut values = x;
        values.extend_from_slice(boundary_values);
        let u = GridFunction::new(d.clone(), values)?;
        let res = residual(&u);
        let bound = HARMONIC_REL_TOL * d.mesh().inv_delta_sq() * u.max_abs();
        if res > bound {
            return Err(Error::Solver {
                reason: format!("residual above bound {bound:e}"),
                residual: res,
            });
        }
        Ok(u)
    }

    /// Solves with boundary data sampled from `f`.
    pub fn solve_fn<F>(&self, mut f: F) -> Result<GridFunction>
    where
        F: FnMut(&LatticePoint) -> f64,
    {
        let b: Vec<f64> = self.domain.boundary().iter().map(&mut f).collect();
        self.solve(&b)
    }
}

/// Discrete harmonic function on `domain` with the given boundary values.
pub fn solve(domain: Arc<GridDomain>, boundary_values: &[f64]) -> Result<GridFunction> {
    DirichletSolver::new(domain)?.solve(boundary_values)
}

/// Like [`solve`], with boundary data sampled from `f`.
pub fn solve_fn<F>(domain: Arc<GridDomain>, f: F) -> Result<GridFunction>
where
    F: FnMut(&LatticePoint) -> f64,
{
    DirichletSolver::new(domain)?.solve_fn(f)
}

/// `max |Δ_δ u|` over the interior.
pub fn residual(u: &GridFunction) -> f64 {
    (0..u.domain().num_interior())
        .map(|i| u.laplacian_at_index(i).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Mesh;

    fn cylinder_one_point() -> Arc<GridDomain> {
        let base = GridDomain::box_domain(Mesh::new(2, 1).unwrap(), &[1]).unwrap();
        Arc::new(GridDomain::cylinder(&base, 2).unwrap())
    }

    #[test]
    fn constant_data() {
        let d = Arc::new(GridDomain::box_domain(Mesh::new(5, 2).unwrap(), &[1, 1]).unwrap());
        let u = solve_fn(d, |_| 2.5).unwrap();
        for v in u.values() {
            assert!((v - 2.5).abs() < 1e-14);
        }
    }

    #[test]
    fn linear_interpolation_in_1d() {
        let d = Arc::new(GridDomain::box_domain(Mesh::new(2, 1).unwrap(), &[1]).unwrap());
        let u = solve_fn(d, |p| p.coords()[0] as f64 / 2.0).unwrap();
        assert_eq!(u.interior_values(), &[0.5]);
    }

    #[test]
    fn one_seventh() {
        let d = cylinder_one_point();
        let u = solve_fn(d, |p| if p.coords()[1].abs() == 2 { 1.0 } else { 0.0 }).unwrap();
        let c = u.value_at(&LatticePoint::new(vec![1, 0])).unwrap();
        assert!((c - 1.0 / 7.0).abs() < 1e-15);
        let side = u.value_at(&LatticePoint::new(vec![1, 1])).unwrap();
        assert!((side - 2.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn residual_of_bumped_solution() {
        let d = Arc::new(GridDomain::box_domain(Mesh::new(4, 2).unwrap(), &[1, 1]).unwrap());
        let u = solve_fn(d.clone(), |p| p.coords()[0] as f64 * 0.3).unwrap();
        assert!(residual(&u) <= u.default_tolerance());
        let mut v = u.values().to_vec();
        v[4] += 1.0;
        let bumped = GridFunction::new(d, v).unwrap();
        let m = 2.0;
        assert!(residual(&bumped) >= 16.0 / (2.0 * m));
    }

    #[test]
    fn wrong_boundary_length() {
        let d = cylinder_one_point();
        assert!(matches!(
            solve(d, &[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn deterministic() {
        let d = Arc::new(GridDomain::box_domain(Mesh::new(6, 2).unwrap(), &[1, 1]).unwrap());
        let f = |p: &LatticePoint| ((p.coords()[0] * 13 + p.coords()[1] * 7) % 11) as f64;
        let a = solve_fn(d.clone(), f).unwrap();
        let b = solve_fn(d, f).unwrap();
        assert_eq!(a.values(), b.values());
    }
}
