//! Browser bindings for the static demo page in `www/`.
//!
//! All results are flat `Float64Array`s; the page knows the shapes.

use std::sync::Arc;

use wasm_bindgen::prelude::*;

use lattice_harmonic::cylinder::{harmonic_measure, CylinderSpec};
use lattice_harmonic::spectral::{cube_spectrum_closed_form, dirichlet_spectrum};
use lattice_harmonic::strip::{solve_strip_with, StripBoundaryData, StripOptions};
use lattice_harmonic::{GridDomain, LatticePoint, Mesh};

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Harmonic measure of the caps of `[0,1] × [−N, N]` with `δ = 1/denominator`
/// and `N = half_steps·δ`, row-major over `s = −N..N` (rows) and
/// `x = 0..1` (columns): `(2·half_steps + 1) × (denominator + 1)` values.
#[wasm_bindgen]
pub fn measure_field(denominator: u32, half_steps: u32) -> Result<Vec<f64>, String> {
    let base = Arc::new(GridDomain::box_domain(Mesh::new(denominator, 1).map_err(err)?, &[1]).map_err(err)?);
    let spec = CylinderSpec::new(base, u64::from(half_steps)).map_err(err)?;
    let (_, g) = harmonic_measure(&spec);
    let h = i64::from(half_steps);
    let mut out = Vec::with_capacity(((2 * h + 1) * (i64::from(denominator) + 1)) as usize);
    for s in -h..=h {
        for x in 0..=i64::from(denominator) {
            // corners are not part of the closure; they carry 0 like the wall
            out.push(g.value_at(&LatticePoint::new(vec![x, s])).unwrap_or(0.0));
        }
    }
    Ok(out)
}

/// Strip layers for data given on `j = −r..r` (`r = (len − 1)/2`) of both
/// boundary layers, returned row-major as `(layers + 1) × (2·window + 1)`.
#[wasm_bindgen]
pub fn strip_layers(layers: u32, bottom: &[f64], top: &[f64], window: u32) -> Result<Vec<f64>, String> {
    let centered = |v: &[f64]| -> Vec<(Vec<i64>, f64)> {
        let r = (v.len() as i64 - 1) / 2;
        v.iter().enumerate().map(|(i, &x)| (vec![i as i64 - r], x)).collect()
    };
    let data = StripBoundaryData::new(layers, 1, centered(bottom), centered(top)).map_err(err)?;
    let opts = StripOptions::new(4 * data.support_width()).window(window as usize);
    let sol = solve_strip_with(&data, &opts).map_err(err)?;
    Ok((0..=layers as usize).flat_map(|k| sol.layer(k).to_vec()).collect())
}

/// Numerical and closed-form Dirichlet eigenvalues of the cube `(0, R)^n`,
/// interleaved as `[numeric₁, closed₁, numeric₂, closed₂, …]`.
#[wasm_bindgen]
pub fn cube_spectrum(denominator: u32, side: u32, dimension: usize) -> Result<Vec<f64>, String> {
    let mesh = Mesh::new(denominator, dimension).map_err(err)?;
    let domain = Arc::new(GridDomain::box_domain(mesh, &vec![side; dimension]).map_err(err)?);
    if domain.num_interior() > 1200 {
        return Err("too many interior points for the browser demo (max 1200)".into());
    }
    let numeric = dirichlet_spectrum(domain).map_err(err)?;
    let closed = cube_spectrum_closed_form(side, mesh).map_err(err)?;
    Ok(numeric
        .eigenvalues()
        .iter()
        .zip(closed.eigenvalues())
        .flat_map(|(a, b)| [*a, *b])
        .collect())
}
