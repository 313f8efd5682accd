//! Truncated cylinders `closure(Ω^δ) × [−N, N]`.
//!
//! The separable functions `f_k(x')cosh(a_k s)` and `f_k(x')sinh(a_k s)` with
//! `cosh(δa_k) = 1 + δ²λ_k/2` are discrete harmonic and vanish on the lateral
//! wall. The harmonic measure of the two caps expands in the even ones:
//!
//! ```text
//! g_N(x', s) = Σ_k d_k f_k(x') cosh(a_k s) / cosh(a_k N),   d_k = Σ_{x'} f_k(x').
//! ```

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lattice::GridDomain;
use crate::operators::GridFunction;
use crate::spectral::{
    a_of_lambda, acosh1p, b_of_lambda1, count_at_most, cube_modes, dirichlet_spectrum,
    RatePair, Spectrum,
};

/// Above this `a·N` the cosh ratio is evaluated in log form.
const COSH_DIRECT_LIMIT: f64 = 30.0;

/// `cosh(a s) / cosh(a N)` for `|s| ≤ N`.
pub fn cosh_ratio(a: f64, s: f64, n: f64) -> f64 {
    if a * n <= COSH_DIRECT_LIMIT {
        (a * s).cosh() / (a * n).cosh()
    } else {
        let s = s.abs();
        (a * (s - n)).exp() * (1.0 + (-2.0 * a * s).exp()) / (1.0 + (-2.0 * a * n).exp())
    }
}

/// Base domain, its spectrum and the truncated cylinder over it.
#[derive(Clone, Debug)]
pub struct CylinderSpec {
    base: Arc<GridDomain>,
    spectrum: Spectrum,
    half_steps: u64,
    domain: Arc<GridDomain>,
    rates: Vec<RatePair>,
}

/// Position of a cylinder closure point relative to the base.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    /// Base interior point at an interior layer.
    Interior { base: usize, step: i64 },
    /// Base interior point on a cap `s = ±N`.
    Cap { base: usize, step: i64 },
    /// Base boundary point (lateral wall).
    Wall { step: i64 },
}

impl CylinderSpec {
    /// Computes the base spectrum numerically.
    pub fn new(base: Arc<GridDomain>, half_steps: u64) -> Result<Self> {
        let spectrum = dirichlet_spectrum(base.clone())?;
        CylinderSpec::with_spectrum(spectrum, half_steps)
    }

    pub fn with_spectrum(spectrum: Spectrum, half_steps: u64) -> Result<Self> {
        let base = spectrum.domain().clone();
        let domain = Arc::new(GridDomain::cylinder(&base, half_steps)?);
        let rates = spectrum
            .eigenvalues()
            .iter()
            .map(|&l| a_of_lambda(l, base.mesh()))
            .collect::<Result<Vec<_>>>()?;
        Ok(CylinderSpec {
            base,
            spectrum,
            half_steps,
            domain,
            rates,
        })
    }

    pub fn base(&self) -> &Arc<GridDomain> {
        &self.base
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    /// The truncated cylinder.
    pub fn domain(&self) -> &Arc<GridDomain> {
        &self.domain
    }

    pub fn half_steps(&self) -> u64 {
        self.half_steps
    }

    /// `N = half_steps·δ`.
    pub fn half_length(&self) -> f64 {
        self.half_steps as f64 * self.base.mesh().delta()
    }

    pub fn rates(&self) -> &[RatePair] {
        &self.rates
    }

    /// Number of base interior points, `K`.
    pub fn k(&self) -> usize {
        self.base.num_interior()
    }

    /// Classifies the cylinder closure point with canonical index `i`.
    pub fn region(&self, i: usize) -> Region {
        let p = self.domain.point(i);
        let n = self.base.dimension();
        let step = p.coords()[n];
        let x = crate::lattice::LatticePoint::new(p.coords()[..n].to_vec());
        let b = self.base.index_of(&x).expect("cylinder point projects onto base closure");
        if !self.base.is_interior_index(b) {
            Region::Wall { step }
        } else if step.unsigned_abs() == self.half_steps {
            Region::Cap { base: b, step }
        } else {
            Region::Interior { base: b, step }
        }
    }

    /// Cylinder indices of the mid layer `s = 0`, in base interior order.
    pub fn mid_layer_indices(&self) -> Vec<usize> {
        self.base
            .interior()
            .iter()
            .map(|x| self.domain.index_of(&x.extended(&[0])).expect("mid layer point"))
            .collect()
    }

    /// Boundary positions (offsets into the boundary slice) of wall points.
    pub fn wall_positions(&self) -> Vec<usize> {
        let k = self.domain.num_interior();
        (k..self.domain.len())
            .filter(|&i| matches!(self.region(i), Region::Wall { .. }))
            .map(|i| i - k)
            .collect()
    }

    /// Boundary positions of cap points.
    pub fn cap_positions(&self) -> Vec<usize> {
        let k = self.domain.num_interior();
        (k..self.domain.len())
            .filter(|&i| matches!(self.region(i), Region::Cap { .. }))
            .map(|i| i - k)
            .collect()
    }

    /// Boundary data `1` on the caps and `0` on the wall.
    pub fn cap_indicator(&self) -> Vec<f64> {
        let k = self.domain.num_interior();
        (k..self.domain.len())
            .map(|i| match self.region(i) {
                Region::Cap { .. } => 1.0,
                _ => 0.0,
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// `f_k(x')cosh(a_k s)` or `f_k(x')sinh(a_k s)`, `k` 1-based.
pub fn harmonic_basis(spec: &CylinderSpec, k: usize, parity: Parity) -> Result<GridFunction> {
    if k == 0 || k > spec.k() {
        return Err(Error::InvalidArgument(format!(
            "mode {k} outside 1..={}",
            spec.k()
        )));
    }
    let f = spec.spectrum.eigenvector(k - 1);
    let a = spec.rates[k - 1].a;
    let delta = spec.base.mesh().delta();
    let values = (0..spec.domain.len())
        .map(|i| match spec.region(i) {
            Region::Wall { .. } => 0.0,
            Region::Interior { base, step } | Region::Cap { base, step } => {
                let s = step as f64 * delta;
                f[base]
                    * match parity {
                        Parity::Even => (a * s).cosh(),
                        Parity::Odd => (a * s).sinh(),
                    }
            }
        })
        .collect();
    GridFunction::new(spec.domain.clone(), values)
}

/// Coefficients of the spectral harmonic-measure formula.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureExpansion {
    /// `d_k = Σ_{x'} f_k(x')`.
    pub d: Vec<f64>,
    /// Rates `a_k`.
    pub a: Vec<f64>,
    pub lambda: Vec<f64>,
    /// Half length `N`.
    pub half_length: f64,
}

impl MeasureExpansion {
    pub fn new(spec: &CylinderSpec) -> Self {
        let s = &spec.spectrum;
        MeasureExpansion {
            d: (0..s.len()).map(|k| s.eigenvector(k).iter().sum()).collect(),
            a: spec.rates.iter().map(|r| r.a).collect(),
            lambda: s.eigenvalues().to_vec(),
            half_length: spec.half_length(),
        }
    }

    /// `C_k = d_k / cosh(a_k N)`.
    pub fn coefficient(&self, k: usize) -> f64 {
        self.d[k] / (self.a[k] * self.half_length).cosh()
    }

    /// `g_N(x', s)` at base interior index `base`, axial position `s`.
    pub fn value(&self, spectrum: &Spectrum, base: usize, s: f64) -> f64 {
        let mut g = 0.0;
        for k in 0..self.d.len() {
            g += self.d[k] * spectrum.eigenvector(k)[base] * cosh_ratio(self.a[k], s, self.half_length);
        }
        g
    }

    /// Per-mode contribution to `Σ_{x'} g_N(x', 0)`, i.e. `d_k² / cosh(a_k N)`.
    pub fn mid_contribution(&self, k: usize) -> f64 {
        self.d[k] * self.d[k] * cosh_ratio(self.a[k], 0.0, self.half_length)
    }
}

/// The harmonic measure of the caps from the spectral formula.
///
/// The returned function takes exactly `1` on the caps and `0` on the wall;
/// the formula is used at interior points.
pub fn harmonic_measure(spec: &CylinderSpec) -> (MeasureExpansion, GridFunction) {
    let exp = MeasureExpansion::new(spec);
    let delta = spec.base.mesh().delta();
    let values = (0..spec.domain.len())
        .map(|i| match spec.region(i) {
            Region::Wall { .. } => 0.0,
            Region::Cap { .. } => 1.0,
            Region::Interior { base, step } => exp.value(&spec.spectrum, base, step as f64 * delta),
        })
        .collect();
    let g = GridFunction::new(spec.domain.clone(), values).expect("finite expansion");
    (exp, g)
}

/// `g_N(x', 0)` for every base interior point.
pub fn mid_layer_measure(spec: &CylinderSpec, exp: &MeasureExpansion) -> Vec<f64> {
    (0..spec.k()).map(|b| exp.value(&spec.spectrum, b, 0.0)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MidsectionBound {
    /// `Σ_{x'} w(x') g_N(x', 0)`.
    pub lhs: f64,
    /// `Σ_k |d_k| / cosh(a_k N) · ‖w‖₂`.
    pub bound: f64,
}

impl MidsectionBound {
    pub fn holds(&self) -> bool {
        self.lhs <= self.bound * (1.0 + 1e-12) + 1e-15
    }
}

pub fn midsection_linear_bound(spec: &CylinderSpec, w: &[f64]) -> Result<MidsectionBound> {
    if w.len() != spec.k() {
        return Err(Error::DimensionMismatch {
            expected: spec.k(),
            found: w.len(),
        });
    }
    let exp = MeasureExpansion::new(spec);
    let g0 = mid_layer_measure(spec, &exp);
    let lhs = w.iter().zip(&g0).map(|(a, b)| a * b).sum();
    let wn = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    let s: f64 = (0..exp.d.len())
        .map(|k| exp.d[k].abs() * cosh_ratio(exp.a[k], 0.0, exp.half_length))
        .sum();
    Ok(MidsectionBound { lhs, bound: s * wn })
}

/// Phragmén–Lindelöf lower bound for a given positivity level `A`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlBound {
    /// `(A/2)(Σ_k exp(−a_k N))⁻¹`.
    pub bound_exact: f64,
    /// `exp(a₁N) Σ_k exp(−a_k N) = Σ_k exp(−(a_k − a₁)N)`.
    pub growth_ratio: f64,
    /// `bound_exact / (A exp(a₁N)) = 1 / (2·growth_ratio)`.
    pub c_omega: f64,
    /// `a₁ N`.
    pub a1_n: f64,
}

pub fn pl_lower_bound(spec: &CylinderSpec, amplitude: f64) -> Result<PlBound> {
    if !(amplitude > 0.0) || !amplitude.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "amplitude must be positive, got {amplitude}"
        )));
    }
    let n = spec.half_length();
    let a1 = spec.rates[0].a;
    let growth_ratio: f64 = spec.rates.iter().map(|r| (-(r.a - a1) * n).exp()).sum();
    Ok(PlBound {
        bound_exact: amplitude / 2.0 * (a1 * n).exp() / growth_ratio,
        growth_ratio,
        c_omega: 0.5 / growth_ratio,
        a1_n: a1 * n,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlReport {
    /// `A` with `Σ u⁺(x', 0)² = A²K`.
    pub amplitude: f64,
    /// Max of `u` over `Ω^δ × [−N, N]` (interior and caps).
    pub max_u: f64,
    pub bound: f64,
    /// `max_u / bound`.
    pub ratio: f64,
    pub passed: bool,
}

/// Checks the Phragmén–Lindelöf lower bound for a subharmonic `u` that
/// vanishes on the lateral wall.
pub fn verify_pl(spec: &CylinderSpec, u: &GridFunction) -> Result<PlReport> {
    if **u.domain() != *spec.domain {
        return Err(Error::InvalidArgument("function is not defined on this cylinder".into()));
    }
    let scale = u.max_abs();
    let k_int = spec.domain.num_interior();
    let mut max_u = f64::NEG_INFINITY;
    for i in 0..spec.domain.len() {
        match spec.region(i) {
            Region::Wall { .. } => {
                if u.values()[i].abs() > 1e-12 * scale {
                    return Err(Error::InvalidArgument(format!(
                        "u does not vanish on the wall at {:?}",
                        spec.domain.point(i).coords()
                    )));
                }
            }
            _ => max_u = max_u.max(u.values()[i]),
        }
    }
    let tol = u.default_tolerance();
    if let Some(i) = (0..k_int).find(|&i| u.laplacian_at_index(i) < -tol) {
        return Err(Error::InvalidArgument(format!(
            "u is not subharmonic at {:?}",
            spec.domain.point(i).coords()
        )));
    }
    let mid = spec.mid_layer_indices();
    let sum_sq: f64 = mid.iter().map(|&i| u.values()[i].max(0.0).powi(2)).sum();
    if sum_sq <= 0.0 {
        return Err(Error::PositivityViolated);
    }
    let amplitude = (sum_sq / spec.k() as f64).sqrt();
    let bound = pl_lower_bound(spec, amplitude)?.bound_exact;
    let ratio = max_u / bound;
    Ok(PlReport {
        amplitude,
        max_u,
        bound,
        ratio,
        passed: max_u >= bound,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StabilityBound {
    pub bound: f64,
    /// `max |f|` over the wall data.
    pub max_wall: f64,
    /// `max_{x'} g_N(x', 0)`.
    pub max_mid_measure: f64,
}

/// `max|f| + (M_N + max|f|)·max_{x'} g_N(x', 0)`, an upper bound for
/// `max_{x'} |h(x', 0)|` over harmonic `h` with wall data `f` and
/// `|h| ≤ M_N` on the caps.
pub fn stability_bound(spec: &CylinderSpec, wall_data: &[f64], cap_bound: f64) -> Result<StabilityBound> {
    if !(cap_bound >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "cap bound must be non-negative, got {cap_bound}"
        )));
    }
    let max_wall = wall_data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let exp = MeasureExpansion::new(spec);
    let max_mid_measure = mid_layer_measure(spec, &exp)
        .into_iter()
        .fold(0.0f64, f64::max);
    Ok(StabilityBound {
        bound: max_wall + (cap_bound + max_wall) * max_mid_measure,
        max_wall,
        max_mid_measure,
    })
}

/// One shell `J_l` of the low part of the spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct Shell {
    pub l: usize,
    /// `|J_l|`, modes with `l ≤ √λ_k − √λ₁ < l + 1` inside `I₁`.
    pub count: usize,
    /// `N_Ω((√λ₁ + l + 1)²)`.
    pub base_count: usize,
    /// `N_Q((√λ₁ + l + 1)²)` for the enclosing cube.
    pub cube_count: usize,
}

/// Diagnostic split of `Σ_k exp(−a_k N)` into low and high eigenvalues.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionReport {
    pub c: f64,
    /// `arccosh(1 + c/2)`: every high mode has `δa_k ≥ c₀`.
    pub c0: f64,
    /// `2/√(4 + c)`, the minimum of `α′` on the low range.
    pub d: f64,
    pub i1_count: usize,
    pub i2_count: usize,
    pub i1_sum: f64,
    /// `Σ_l |J_l| exp(−(a₁ + l d)N)`.
    pub i1_bound: f64,
    pub i2_sum: f64,
    /// `|I₂| exp(−c₀N/δ)`.
    pub i2_bound: f64,
    /// Side `R` of the enclosing cube `(0, R)^n`.
    pub cube_side: u32,
    pub shells: Vec<Shell>,
    pub growth_ratio: f64,
    pub c_omega: f64,
}

pub fn pl_constant_partition_report(spec: &CylinderSpec, c: f64) -> Result<PartitionReport> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidArgument(format!("threshold must be positive, got {c}")));
    }
    let mesh = spec.base.mesh();
    let delta = mesh.delta();
    let inv_d2 = mesh.inv_delta_sq();
    let n_len = spec.half_length();
    let lams = spec.spectrum.eigenvalues();
    let a1 = spec.rates[0].a;
    let sqrt_l1 = lams[0].sqrt();
    let c0 = acosh1p(c / 2.0);
    let d = 2.0 / (4.0 + c).sqrt();

    let bb = spec.base.bounding_box();
    let span = bb.iter().map(|(lo, hi)| (hi - lo) as u64).max().unwrap_or(2);
    let den = u64::from(mesh.denominator());
    let cube_side = span.div_ceil(den).max(1) as u32;
    let cube_eigs: Vec<f64> = cube_modes(cube_side, mesh.denominator(), spec.base.dimension())
        .into_iter()
        .map(|m| m.lambda)
        .collect();

    let (mut i1_count, mut i2_count, mut i1_sum, mut i2_sum) = (0, 0, 0.0, 0.0);
    let mut shell_counts: Vec<usize> = Vec::new();
    for (lam, r) in lams.iter().zip(&spec.rates) {
        let e = (-r.a * n_len).exp();
        if *lam < c * inv_d2 {
            i1_count += 1;
            i1_sum += e;
            let l = (lam.sqrt() - sqrt_l1).max(0.0).floor() as usize;
            if shell_counts.len() <= l {
                shell_counts.resize(l + 1, 0);
            }
            shell_counts[l] += 1;
        } else {
            i2_count += 1;
            i2_sum += e;
        }
    }
    let shells: Vec<Shell> = shell_counts
        .iter()
        .enumerate()
        .map(|(l, &count)| {
            let edge = (sqrt_l1 + l as f64 + 1.0).powi(2);
            Shell {
                l,
                count,
                base_count: count_at_most(lams, edge),
                cube_count: count_at_most(&cube_eigs, edge),
            }
        })
        .collect();
    let i1_bound = shells
        .iter()
        .map(|s| s.count as f64 * (-(a1 + s.l as f64 * d) * n_len).exp())
        .sum();
    let pl = pl_lower_bound(spec, 1.0)?;
    Ok(PartitionReport {
        c,
        c0,
        d,
        i1_count,
        i2_count,
        i1_sum,
        i1_bound,
        i2_sum,
        i2_bound: i2_count as f64 * (-c0 * n_len / delta).exp(),
        cube_side,
        shells,
        growth_ratio: pl.growth_ratio,
        c_omega: pl.c_omega,
    })
}

/// `f₁(x) Π_i cosh(b_δ y_i)` on `closure(Ω^δ) × [−N, N]^k`, with
/// `cosh(δb_δ) = 1 + δ²λ₁/(2k)`.
pub fn comparison_function(base: &Spectrum, half_steps: u64, k_axes: usize) -> Result<GridFunction> {
    let base_dom = base.domain();
    let domain = Arc::new(GridDomain::prism(base_dom, half_steps, k_axes)?);
    let b = b_of_lambda1(base.eigenvalues()[0], base_dom.mesh(), k_axes)?;
    let delta = base_dom.mesh().delta();
    let n = base_dom.dimension();
    let f1 = base.eigenvector(0);
    GridFunction::from_fn(domain, |p| {
        let x = crate::lattice::LatticePoint::new(p.coords()[..n].to_vec());
        match base_dom.index_of(&x) {
            Some(i) if base_dom.is_interior_index(i) => {
                f1[i]
                    * p.coords()[n..]
                        .iter()
                        .map(|&y| (b * y as f64 * delta).cosh())
                        .product::<f64>()
            }
            _ => 0.0,
        }
    })
}

/// Largest `|h(x', 0)|` over the base interior.
pub fn mid_layer_max_abs(spec: &CylinderSpec, h: &GridFunction) -> f64 {
    spec.mid_layer_indices()
        .into_iter()
        .map(|i| h.values()[i].abs())
        .fold(0.0, f64::max)
}

/// Spectral projection of the all-ones base function onto the cluster
/// `range` (interior coordinates).
pub fn ones_projection(spectrum: &Spectrum, range: std::ops::Range<usize>) -> Vec<f64> {
    let p = spectrum.projector(range);
    let ones = nalgebra::DVector::from_element(p.ncols(), 1.0);
    (p * ones).iter().copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::DirichletSolver;
    use crate::lattice::{LatticePoint, Mesh};
    use approx::assert_relative_eq;

    fn one_point_spec() -> CylinderSpec {
        let base = Arc::new(GridDomain::box_domain(Mesh::new(2, 1).unwrap(), &[1]).unwrap());
        CylinderSpec::new(base, 2).unwrap()
    }

    #[test]
    fn one_seventh_from_expansion() {
        let spec = one_point_spec();
        let (exp, g) = harmonic_measure(&spec);
        assert_relative_eq!(exp.d[0], 1.0, max_relative = 1e-15);
        let c = g.value_at(&LatticePoint::new(vec![1, 0])).unwrap();
        assert!((c - 1.0 / 7.0).abs() < 1e-15);
        // the formula itself reproduces the caps
        assert!((exp.value(spec.spectrum(), 0, 1.0) - 1.0).abs() < 1e-14);
        assert!((exp.coefficient(0) * (exp.a[0]).cosh() - exp.d[0]).abs() < 1e-14);
    }

    #[test]
    fn basis_on_one_point() {
        let spec = one_point_spec();
        let u = harmonic_basis(&spec, 1, Parity::Even).unwrap();
        let a = 2.0 * 2f64.acosh();
        for s in -2..=2 {
            let v = u.value_at(&LatticePoint::new(vec![1, s])).unwrap();
            assert_relative_eq!(v, (a * s as f64 / 2.0).cosh(), max_relative = 1e-14);
        }
        assert!(u.is_harmonic(u.default_tolerance()));
        let v = harmonic_basis(&spec, 1, Parity::Odd).unwrap();
        assert_eq!(v.value_at(&LatticePoint::new(vec![1, 0])).unwrap(), 0.0);
        assert!(harmonic_basis(&spec, 2, Parity::Even).is_err());
    }

    #[test]
    fn regions() {
        let spec = one_point_spec();
        assert_eq!(spec.cap_positions().len(), 2);
        assert_eq!(spec.wall_positions().len(), 6);
        assert_eq!(spec.mid_layer_indices().len(), 1);
    }

    #[test]
    fn midsection_equality_for_single_mode() {
        let spec = one_point_spec();
        let b = midsection_linear_bound(&spec, &[1.0]).unwrap();
        assert!((b.lhs - 1.0 / 7.0).abs() < 1e-15);
        assert!((b.bound - 1.0 / 7.0).abs() < 1e-15);
        assert!(b.holds());
    }

    #[test]
    fn pl_bound_one_point() {
        let spec = one_point_spec();
        let b = pl_lower_bound(&spec, 2.0).unwrap();
        let a = 2.0 * 2f64.acosh();
        assert_relative_eq!(b.bound_exact, a.exp(), max_relative = 1e-14);
        assert_relative_eq!(b.bound_exact / 1.0, 13.928203230275509, max_relative = 1e-12);
        let b4 = pl_lower_bound(&spec, 4.0).unwrap();
        assert_relative_eq!(b4.bound_exact, 2.0 * b.bound_exact, max_relative = 1e-15);
        assert!(pl_lower_bound(&spec, 0.0).is_err());
    }

    #[test]
    fn pl_rejects_nonpositive_mid_layer() {
        let spec = one_point_spec();
        let u = harmonic_basis(&spec, 1, Parity::Even).unwrap();
        let neg = u.combine(-1.0, &u, 0.0).unwrap();
        assert!(matches!(verify_pl(&spec, &neg), Err(Error::PositivityViolated)));
        let r = verify_pl(&spec, &u).unwrap();
        assert!(r.passed && r.ratio >= 1.0);
    }

    #[test]
    fn stability_one_point() {
        let spec = one_point_spec();
        let wall = vec![0.0; spec.wall_positions().len()];
        let b = stability_bound(&spec, &wall, 3.5).unwrap();
        assert!((b.bound - 0.5).abs() < 1e-14);
        assert!(stability_bound(&spec, &wall, -1.0).is_err());
    }

    #[test]
    fn expansion_matches_direct_on_l_shape() {
        let mesh = Mesh::new(4, 2).unwrap();
        let pts = (1..4)
            .flat_map(|x| (1..4).map(move |y| vec![x, y]))
            .filter(|c| !(c[0] == 3 && c[1] == 3))
            .map(LatticePoint::new);
        let base = Arc::new(GridDomain::from_interior(mesh, pts).unwrap());
        let spec = CylinderSpec::new(base, 4).unwrap();
        let (_, g) = harmonic_measure(&spec);
        let direct = DirichletSolver::new(spec.domain().clone())
            .unwrap()
            .solve(&spec.cap_indicator())
            .unwrap();
        let diff = g
            .values()
            .iter()
            .zip(direct.values())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(diff < 1e-12, "{diff}");
    }

    #[test]
    fn partition_on_interval() {
        let base = Arc::new(GridDomain::box_domain(Mesh::new(8, 1).unwrap(), &[1]).unwrap());
        let spec = CylinderSpec::new(base, 8).unwrap();
        let r = pl_constant_partition_report(&spec, 1.0).unwrap();
        assert_eq!(r.i1_count + r.i2_count, 7);
        assert!(r.i2_sum <= r.i2_bound * (1.0 + 1e-12));
        assert!(r.i1_sum <= r.i1_bound * (1.0 + 1e-12));
        for s in &r.shells {
            assert!(s.count <= s.base_count && s.base_count <= s.cube_count);
        }
        // c = 8 covers the whole spectrum of a 1-D base (λ < 4δ⁻²)
        let all = pl_constant_partition_report(&spec, 8.0).unwrap();
        assert_eq!(all.i2_count, 0);
        assert_eq!(all.i2_sum, 0.0);
    }

    #[test]
    fn cosh_ratio_branches_agree() {
        for (a, s, n) in [(3.0, 0.5, 9.0), (10.0, -2.0, 3.0), (0.5, 1.0, 70.0)] {
            let direct = (a * s as f64).cosh() / (a * n as f64).cosh();
            assert_relative_eq!(cosh_ratio(a, s, n), direct, max_relative = 1e-12);
        }
        assert!(cosh_ratio(500.0, 0.0, 10.0) >= 0.0);
    }
}
