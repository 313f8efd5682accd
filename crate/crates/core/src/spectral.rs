//! Dirichlet spectra of lattice domains.
//!
//! Eigenfunctions are normalized in the counting measure,
//! `Σ_x f_j(x) f_k(x) = δ_jk`, and vanish on the lattice boundary. Within a
//! degenerate eigenvalue cluster the basis is not unique; comparisons should
//! go through [`Spectrum::projector`].

use std::ops::Range;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::lattice::{GridDomain, Mesh};
use crate::operators::GridFunction;

/// Relative residual bound `‖(−Δ_δ)f_k − λ_k f_k‖_∞ ≤ 1e-8·λ_K`.
pub const EIGEN_RESIDUAL_REL: f64 = 1e-8;

/// Relative gap below which neighboring eigenvalues belong to one cluster.
pub const DEGENERACY_REL_GAP: f64 = 1e-8;

/// Largest accepted entry of `|VᵀV − I|`.
pub const ORTHONORMALITY_TOL: f64 = 1e-10;

/// Ascending Dirichlet eigenvalues with an orthonormal eigenbasis.
#[derive(Clone, Debug)]
pub struct Spectrum {
    domain: Arc<GridDomain>,
    eigenvalues: Vec<f64>,
    // interior values, canonical order
    vectors: Vec<Vec<f64>>,
}

impl Spectrum {
    /// Assembles a spectrum from eigenpairs; sorts, fixes signs and orders
    /// ties deterministically.
    pub fn from_pairs(domain: Arc<GridDomain>, pairs: Vec<(f64, Vec<f64>)>) -> Result<Self> {
        let k = domain.num_interior();
        if pairs.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: pairs.len(),
            });
        }
        let mut pairs: Vec<(f64, Vec<f64>)> = pairs
            .into_iter()
            .map(|(l, mut v)| {
                fix_sign(&mut v);
                (l, v)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        // ties: order eigenvectors lexicographically, descending
        for r in clusters_of(&pairs.iter().map(|p| p.0).collect::<Vec<_>>()) {
            pairs[r].sort_by(|a, b| {
                b.1.iter()
                    .zip(&a.1)
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
        }
        if let Some((_, v1)) = pairs.first_mut() {
            if v1.iter().sum::<f64>() < 0.0 {
                v1.iter_mut().for_each(|x| *x = -*x);
            }
        }
        let (eigenvalues, vectors) = pairs.into_iter().unzip();
        Ok(Spectrum {
            domain,
            eigenvalues,
            vectors,
        })
    }

    pub fn domain(&self) -> &Arc<GridDomain> {
        &self.domain
    }

    /// `K`, the number of interior points.
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Interior values of the eigenfunction with 0-based index `k`.
    pub fn eigenvector(&self, k: usize) -> &[f64] {
        &self.vectors[k]
    }

    /// Eigenfunction `k` (0-based) on the closure, zero on the boundary.
    pub fn eigenfunction(&self, k: usize) -> GridFunction {
        let mut values = self.vectors[k].clone();
        values.resize(self.domain.len(), 0.0);
        GridFunction::new(self.domain.clone(), values).expect("finite eigenvector")
    }

    /// Largest `‖(−Δ_δ)f_k − λ_k f_k‖_∞`.
    pub fn max_residual(&self) -> f64 {
        self.vectors
            .iter()
            .zip(&self.eigenvalues)
            .map(|(v, &l)| {
                let lv = negative_laplacian(&self.domain, v);
                lv.iter()
                    .zip(v)
                    .map(|(a, b)| (a - l * b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (j, a) in self.vectors.iter().enumerate() {
            for (k, b) in self.vectors.iter().enumerate().skip(j) {
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let target = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// Index ranges of eigenvalue clusters (relative gap < 1e-8).
    pub fn clusters(&self) -> Vec<Range<usize>> {
        clusters_of(&self.eigenvalues)
    }

    /// Orthogonal projector onto `span{f_k : k ∈ range}` (interior coordinates).
    pub fn projector(&self, range: Range<usize>) -> DMatrix<f64> {
        let n = self.domain.num_interior();
        let mut p = DMatrix::zeros(n, n);
        for k in range {
            let v = nalgebra::DVector::from_column_slice(&self.vectors[k]);
            p += &v * v.transpose();
        }
        p
    }

    /// Checks the residual and orthonormality contracts.
    pub fn validate(&self) -> Result<()> {
        let bound = EIGEN_RESIDUAL_REL * self.eigenvalues.last().copied().unwrap_or(0.0);
        let r = self.max_residual();
        if r > bound {
            return Err(Error::Eigen {
                residual: r,
                bound,
            });
        }
        let o = self.orthonormality_error();
        if o > ORTHONORMALITY_TOL {
            return Err(Error::Eigen {
                residual: o,
                bound: ORTHONORMALITY_TOL,
            });
        }
        Ok(())
    }
}

fn fix_sign(v: &mut [f64]) {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-12 * scale) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

fn clusters_of(values: &[f64]) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        let split = i == values.len() || {
            let (a, b) = (values[i - 1], values[i]);
            (b - a) > DEGENERACY_REL_GAP * b.abs().max(a.abs())
        };
        if split {
            out.push(start..i);
            start = i;
        }
    }
    out
}

/// `(−Δ_δ)x` for `x` given on the interior and zero on the boundary.
pub fn negative_laplacian(domain: &GridDomain, x: &[f64]) -> Vec<f64> {
    let k = domain.num_interior();
    let diag = 2.0 * domain.dimension() as f64;
    let scale = domain.mesh().inv_delta_sq();
    (0..k)
        .map(|i| {
            let mut s = diag * x[i];
            for &j in domain.neighbors(i) {
                if j < k {
                    s -= x[j];
                }
            }
            s * scale
        })
        .collect()
}

/// `⟨g, −Δ_δ g⟩ / ⟨g, g⟩` for boundary-vanishing `g`.
pub fn rayleigh_quotient(domain: &GridDomain, g: &[f64]) -> f64 {
    let lg = negative_laplacian(domain, g);
    let num: f64 = g.iter().zip(&lg).map(|(a, b)| a * b).sum();
    let den: f64 = g.iter().map(|a| a * a).sum();
    num / den
}

/// Full numerical Dirichlet spectrum of `domain`.
pub fn dirichlet_spectrum(domain: Arc<GridDomain>) -> Result<Spectrum> {
    let k = domain.num_interior();
    let diag = 2.0 * domain.dimension() as f64;
    let scale = domain.mesh().inv_delta_sq();
    let mut a = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        a[(i, i)] = diag * scale;
        for &j in domain.neighbors(i) {
            if j < k {
                a[(i, j)] = -scale;
            }
        }
    }
    let eig = SymmetricEigen::new(a);
    let pairs = (0..k)
        .map(|c| (eig.eigenvalues[c], eig.eigenvectors.column(c).iter().copied().collect()))
        .collect();
    let spectrum = Spectrum::from_pairs(domain, pairs)?;
    spectrum.validate()?;
    Ok(spectrum)
}

/// One eigenpair label of the cube `(0, R)^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct CubeMode {
    pub k: Vec<u32>,
    pub lambda: f64,
}

/// Closed-form cube eigenvalues `2δ⁻²(n − Σ cos(k_j π δ / R))` over
/// `k ∈ {1, …, R/δ − 1}^n`, sorted ascending (ties in lexicographic `k`).
pub fn cube_modes(r: u32, denominator: u32, n: usize) -> Vec<CubeMode> {
    let s = r as u64 * denominator as u64;
    let inv_delta_sq = f64::from(denominator).powi(2);
    let mut tuples = vec![Vec::<u32>::new()];
    for _ in 0..n {
        tuples = tuples
            .into_iter()
            .flat_map(|p| {
                (1..s as u32).map(move |k| {
                    let mut t = p.clone();
                    t.push(k);
                    t
                })
            })
            .collect();
    }
    let mut modes: Vec<CubeMode> = tuples
        .into_iter()
        .map(|k| {
            let c: f64 = k
                .iter()
                .map(|&kj| (f64::from(kj) * std::f64::consts::PI / s as f64).cos())
                .sum();
            CubeMode {
                lambda: 2.0 * inv_delta_sq * (n as f64 - c),
                k,
            }
        })
        .collect();
    modes.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    modes
}

/// Closed-form spectrum of the cube `(0, R)^n`, eigenfunctions
/// `Π sin(k_j π x_j / R)` normalized to unit counting-measure norm.
pub fn cube_spectrum_closed_form(r: u32, mesh: Mesh) -> Result<Spectrum> {
    let n = mesh.dimension();
    let domain = Arc::new(GridDomain::box_domain(mesh, &vec![r; n])?);
    let s = (r as u64 * mesh.denominator() as u64) as f64;
    let norm = (2.0 / s).powf(n as f64 / 2.0);
    let pairs = cube_modes(r, mesh.denominator(), n)
        .into_iter()
        .map(|mode| {
            let v = domain
                .interior()
                .iter()
                .map(|p| {
                    p.coords()
                        .iter()
                        .zip(&mode.k)
                        .map(|(&c, &k)| (f64::from(k) * std::f64::consts::PI * c as f64 / s).sin())
                        .product::<f64>()
                        * norm
                })
                .collect();
            (mode.lambda, v)
        })
        .collect();
    Spectrum::from_pairs(domain, pairs)
}

/// `#{k : λ_k ≤ lam}` for an ascending list.
pub fn count_at_most(eigenvalues: &[f64], lam: f64) -> usize {
    eigenvalues.partition_point(|&l| l <= lam)
}

/// Counting function `N(lam)`.
pub fn counting_function(spectrum: &Spectrum, lam: f64) -> usize {
    count_at_most(spectrum.eigenvalues(), lam)
}

/// `arccosh(1 + x)` without cancellation for small `x ≥ 0`.
pub fn acosh1p(x: f64) -> f64 {
    (x + (x * (2.0 + x)).sqrt()).ln_1p()
}

/// An eigenvalue with its axial growth rate, `cosh(δa) = 1 + δ²λ/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatePair {
    pub lambda: f64,
    pub a: f64,
    pub delta: f64,
}

pub fn a_of_lambda(lam: f64, mesh: &Mesh) -> Result<RatePair> {
    if !(lam >= 0.0) || !lam.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "eigenvalue must be finite and non-negative, got {lam}"
        )));
    }
    let delta = mesh.delta();
    let a = acosh1p(delta * delta * lam / 2.0) / delta;
    Ok(RatePair {
        lambda: lam,
        a,
        delta,
    })
}

/// Positive root of `cosh(δb) = 1 + δ²λ₁/(2k)` for `k` axial directions.
pub fn b_of_lambda1(lam1: f64, mesh: &Mesh, k_axes: usize) -> Result<f64> {
    if !(lam1 > 0.0) || !lam1.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "first eigenvalue must be positive, got {lam1}"
        )));
    }
    if k_axes == 0 {
        return Err(Error::InvalidArgument("k_axes must be positive".into()));
    }
    let delta = mesh.delta();
    Ok(acosh1p(delta * delta * lam1 / (2.0 * k_axes as f64)) / delta)
}

/// Volume of the unit ball in `ℝ^n`.
fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(n - 2) * 2.0 * std::f64::consts::PI / n as f64,
    }
}

/// Counting-function bound for the cube.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeylCount {
    /// `N_{Q_R}(lam)` from the closed-form spectrum.
    pub count: usize,
    /// `count / (lam^{n/2} + 1)`.
    pub fitted_constant: f64,
    /// Mesh-independent `C_n(R) = ω_n 2^{-n} (R/2)^n`; the eigenvalue lower
    /// bound `λ ≥ 4R⁻²Σk_j²` gives `count ≤ C_n(R)·lam^{n/2}`.
    pub explicit_constant: f64,
}

pub fn weyl_bound(r: u32, denominator: u32, n: usize, lam: f64) -> WeylCount {
    let eigs: Vec<f64> = cube_modes(r, denominator, n).into_iter().map(|m| m.lambda).collect();
    let count = count_at_most(&eigs, lam);
    let lam_pow = lam.max(0.0).powf(n as f64 / 2.0);
    WeylCount {
        count,
        fitted_constant: count as f64 / (lam_pow + 1.0),
        explicit_constant: unit_ball_volume(n) / 2f64.powi(n as i32) * (f64::from(r) / 2.0).powi(n as i32),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn interval(den: u32) -> Arc<GridDomain> {
        Arc::new(GridDomain::box_domain(Mesh::new(den, 1).unwrap(), &[1]).unwrap())
    }

    #[test]
    fn half_mesh_interval() {
        let s = dirichlet_spectrum(interval(2)).unwrap();
        assert_eq!(s.len(), 1);
        assert_relative_eq!(s.eigenvalues()[0], 8.0, max_relative = 1e-14);
        assert_relative_eq!(s.eigenvector(0)[0], 1.0, max_relative = 1e-14);
    }

    #[test]
    fn third_mesh_interval() {
        let s = dirichlet_spectrum(interval(3)).unwrap();
        assert_relative_eq!(s.eigenvalues()[0], 9.0, max_relative = 1e-12);
        assert_relative_eq!(s.eigenvalues()[1], 27.0, max_relative = 1e-12);
    }

    #[test]
    fn third_mesh_square() {
        let d = Arc::new(GridDomain::box_domain(Mesh::new(3, 2).unwrap(), &[1, 1]).unwrap());
        let s = dirichlet_spectrum(d).unwrap();
        for (got, want) in s.eigenvalues().iter().zip([18.0, 36.0, 36.0, 54.0]) {
            assert_relative_eq!(*got, want, max_relative = 1e-12);
        }
        assert_eq!(s.clusters(), vec![0..1, 1..3, 3..4]);
    }

    #[test]
    fn quarter_mesh_closed_form() {
        let s = cube_spectrum_closed_form(1, Mesh::new(4, 1).unwrap()).unwrap();
        let r2 = std::f64::consts::SQRT_2;
        let want = [32.0 - 16.0 * r2, 32.0, 32.0 + 16.0 * r2];
        for (got, w) in s.eigenvalues().iter().zip(want) {
            assert_relative_eq!(*got, w, max_relative = 1e-13);
        }
        assert!(s.orthonormality_error() < 1e-13);
        s.validate().unwrap();
        assert_eq!(counting_function(&s, 32.0), 2);
        assert_eq!(counting_function(&s, 1.0), 0);
        assert_eq!(counting_function(&s, s.eigenvalues()[2]), 3);
    }

    #[test]
    fn single_mode_closed_form() {
        let s = cube_spectrum_closed_form(1, Mesh::new(2, 1).unwrap()).unwrap();
        assert_relative_eq!(s.eigenvalues()[0], 8.0, max_relative = 1e-15);
        assert_relative_eq!(s.eigenvector(0)[0], 1.0, max_relative = 1e-15);
    }

    #[test]
    fn first_eigenfunction_positive() {
        let pts: Vec<_> = [[0, 0], [1, 0], [2, 0], [0, 1], [0, 2], [1, 1]]
            .iter()
            .map(|c| crate::lattice::LatticePoint::new(c.to_vec()))
            .collect();
        let d = Arc::new(GridDomain::from_interior(Mesh::new(4, 2).unwrap(), pts).unwrap());
        let s = dirichlet_spectrum(d).unwrap();
        assert!(s.eigenvector(0).iter().all(|&v| v > 0.0));
        assert!(s.eigenvalues()[1] > s.eigenvalues()[0]);
    }

    #[test]
    fn rates() {
        let m = Mesh::new(2, 1).unwrap();
        assert_eq!(a_of_lambda(0.0, &m).unwrap().a, 0.0);
        let r = a_of_lambda(8.0, &m).unwrap();
        assert_relative_eq!(r.a, 2.0 * 2f64.acosh(), max_relative = 1e-14);
        assert_relative_eq!(r.a.cosh(), 7.0, max_relative = 1e-13);
        assert!(a_of_lambda(-1.0, &m).is_err());
        let b = b_of_lambda1(8.0, &m, 2).unwrap();
        assert_relative_eq!(b, 2.0 * 1.5f64.acosh(), max_relative = 1e-14);
        assert_relative_eq!(b, 1.92485, max_relative = 1e-5);
        assert_eq!(b_of_lambda1(8.0, &m, 1).unwrap(), r.a);
    }

    #[test]
    fn rate_invariant_small_lambda() {
        for den in [2u32, 8, 64, 1024] {
            let m = Mesh::new(den, 1).unwrap();
            for lam in [1e-6, 0.3, 9.0, 1e4] {
                let r = a_of_lambda(lam, &m).unwrap();
                let lhs = (r.delta * r.a).cosh() - 1.0;
                let rhs = r.delta * r.delta * lam / 2.0;
                assert_relative_eq!(lhs, rhs, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn cube_lower_bound() {
        for den in [2, 4, 8] {
            for n in [1, 2] {
                for mode in cube_modes(2, den, n) {
                    let s: u32 = mode.k.iter().map(|k| k * k).sum();
                    assert!(mode.lambda >= 4.0 / 4.0 * f64::from(s) * (1.0 - 1e-12));
                }
            }
        }
    }

    #[test]
    fn weyl_trivial_below_first() {
        let w = weyl_bound(1, 8, 1, 1.0);
        assert_eq!(w.count, 0);
        assert_relative_eq!(w.explicit_constant, 0.5);
        assert_relative_eq!(weyl_bound(1, 8, 2, 1.0).explicit_constant, std::f64::consts::PI / 16.0);
    }
}
