//! Lattice functions, the δ-discrete Laplacian and forward-difference gradient.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lattice::{GridDomain, LatticePoint};

/// Relative factor of the default harmonicity tolerance.
pub const HARMONIC_REL_TOL: f64 = 1e-9;

/// Real values on the closure of a domain, indexed canonically.
#[derive(Clone, Debug)]
pub struct GridFunction {
    domain: Arc<GridDomain>,
    values: Vec<f64>,
}

impl PartialEq for GridFunction {
    fn eq(&self, other: &Self) -> bool {
        self.values == other.values && *self.domain == *other.domain
    }
}

impl GridFunction {
    pub fn new(domain: Arc<GridDomain>, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::DimensionMismatch {
                expected: domain.len(),
                found: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(GridFunction { domain, values })
    }

    pub fn zeros(domain: Arc<GridDomain>) -> Self {
        let n = domain.len();
        GridFunction {
            domain,
            values: vec![0.0; n],
        }
    }

    /// Samples `f` at every closure point.
    pub fn from_fn<F>(domain: Arc<GridDomain>, mut f: F) -> Result<Self>
    where
        F: FnMut(&LatticePoint) -> f64,
    {
        let values = domain.points().iter().map(&mut f).collect();
        GridFunction::new(domain, values)
    }

    pub fn domain(&self) -> &Arc<GridDomain> {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interior_values(&self) -> &[f64] {
        &self.values[..self.domain.num_interior()]
    }

    pub fn boundary_values(&self) -> &[f64] {
        &self.values[self.domain.num_interior()..]
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn value_at(&self, p: &LatticePoint) -> Option<f64> {
        self.domain.index_of(p).map(|i| self.values[i])
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `alpha·self + beta·other` on the same domain.
    pub fn combine(&self, alpha: f64, other: &GridFunction, beta: f64) -> Result<GridFunction> {
        if *self.domain != *other.domain {
            return Err(Error::InvalidArgument("functions live on different domains".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        GridFunction::new(self.domain.clone(), values)
    }

    /// Laplacian at the interior point with canonical index `i`.
    ///
    /// Summation runs over ascending axes, minus neighbor before plus.
    pub fn laplacian_at_index(&self, i: usize) -> f64 {
        let m = self.domain.dimension();
        let nb = self.domain.neighbors(i);
        let mut s = 0.0;
        for &j in nb {
            s += self.values[j];
        }
        (s - 2.0 * m as f64 * self.values[i]) * self.domain.mesh().inv_delta_sq()
    }

    /// `Δ_δ u(x)`; `x` must be an interior point.
    pub fn laplacian_at(&self, x: &LatticePoint) -> Result<f64> {
        match self.domain.index_of(x) {
            Some(i) if self.domain.is_interior_index(i) => Ok(self.laplacian_at_index(i)),
            Some(_) | None => {
                let missing = x
                    .neighbors()
                    .find(|q| self.domain.index_of(q).is_none())
                    .unwrap_or_else(|| x.clone());
                Err(Error::MissingNeighbor {
                    point: x.coords().to_vec(),
                    neighbor: missing.coords().to_vec(),
                })
            }
        }
    }

    /// Laplacian restricted to the axes in `axes` (second differences along
    /// those coordinates only).
    pub fn partial_laplacian_at_index(&self, i: usize, axes: std::ops::Range<usize>) -> f64 {
        let nb = self.domain.neighbors(i);
        let mut s = 0.0;
        let mut count = 0.0;
        for axis in axes {
            s += self.values[nb[2 * axis]];
            s += self.values[nb[2 * axis + 1]];
            count += 2.0;
        }
        (s - count * self.values[i]) * self.domain.mesh().inv_delta_sq()
    }

    /// Laplacian at every interior point, in canonical order.
    pub fn laplacian(&self) -> Vec<f64> {
        (0..self.domain.num_interior())
            .map(|i| self.laplacian_at_index(i))
            .collect()
    }

    /// `1e-9 · δ⁻² · max|u|`.
    pub fn default_tolerance(&self) -> f64 {
        HARMONIC_REL_TOL * self.domain.mesh().inv_delta_sq() * self.max_abs()
    }

    pub fn is_harmonic(&self, tol: f64) -> bool {
        (0..self.domain.num_interior()).all(|i| self.laplacian_at_index(i).abs() <= tol)
    }

    pub fn is_subharmonic(&self, tol: f64) -> bool {
        (0..self.domain.num_interior()).all(|i| self.laplacian_at_index(i) >= -tol)
    }

    pub fn is_superharmonic(&self, tol: f64) -> bool {
        (0..self.domain.num_interior()).all(|i| self.laplacian_at_index(i) <= tol)
    }

    /// Forward-difference gradient `δ⁻¹(u(x+δe_j) − u(x))`, one entry per axis.
    pub fn gradient_at(&self, x: &LatticePoint) -> Result<Vec<f64>> {
        let here = self.value_at(x).ok_or_else(|| Error::MissingNeighbor {
            point: x.coords().to_vec(),
            neighbor: x.coords().to_vec(),
        })?;
        let inv_delta = f64::from(self.domain.mesh().denominator());
        (0..x.dim())
            .map(|axis| {
                let q = x.shifted(axis, 1);
                self.value_at(&q)
                    .map(|v| (v - here) * inv_delta)
                    .ok_or_else(|| Error::MissingNeighbor {
                        point: x.coords().to_vec(),
                        neighbor: q.coords().to_vec(),
                    })
            })
            .collect()
    }

    /// Maximum principle: the maximum over the closure is attained on the
    /// boundary (exact comparison).
    pub fn check_max_principle(&self) -> bool {
        let k = self.domain.num_interior();
        let interior_max = self.values[..k].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let boundary_max = self.values[k..].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        interior_max.max(boundary_max) == boundary_max
    }

    /// CSV with columns `coord_1,…,coord_m,value`, closure points in
    /// canonical order.
    pub fn to_csv(&self) -> String {
        let m = self.domain.dimension();
        let mut out = String::new();
        let header: Vec<String> = (1..=m).map(|i| format!("coord_{i}")).collect();
        let _ = writeln!(out, "{},value", header.join(","));
        for (p, v) in self.domain.points().iter().zip(&self.values) {
            for c in p.coords() {
                let _ = write!(out, "{c},");
            }
            let _ = writeln!(out, "{v:?}");
        }
        out
    }

    /// Parses CSV written by [`GridFunction::to_csv`]. Every closure point of
    /// `domain` must appear exactly once.
    pub fn from_csv(domain: Arc<GridDomain>, text: &str, source_name: &str) -> Result<Self> {
        let rows = parse_point_csv(text, domain.dimension(), source_name)?;
        let mut values = vec![f64::NAN; domain.len()];
        for (line, p, v) in rows {
            let i = domain.index_of(&p).ok_or_else(|| Error::Parse {
                source_name: source_name.into(),
                line,
                message: format!("point {:?} is not in the domain closure", p.coords()),
            })?;
            if !values[i].is_nan() {
                return Err(Error::Parse {
                    source_name: source_name.into(),
                    line,
                    message: format!("duplicate point {:?}", p.coords()),
                });
            }
            values[i] = v;
        }
        if let Some(i) = values.iter().position(|v| v.is_nan()) {
            return Err(Error::Parse {
                source_name: source_name.into(),
                line: 0,
                message: format!("missing value for point {:?}", domain.point(i).coords()),
            });
        }
        GridFunction::new(domain, values)
    }
}

/// Parses `coord_1,…,coord_m,value` rows; a first line that does not parse
/// as numbers is treated as a header. Returns `(line, point, value)`.
pub fn parse_point_csv(
    text: &str,
    dim: usize,
    source_name: &str,
) -> Result<Vec<(usize, LatticePoint, f64)>> {
    let err = |line: usize, message: String| Error::Parse {
        source_name: source_name.into(),
        line,
        message,
    };
    let mut rows = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let raw = raw.trim();
        if raw.is_empty() || raw.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').map(str::trim).collect();
        if line == 1 && fields[0].parse::<i64>().is_err() {
            continue;
        }
        if fields.len() != dim + 1 {
            return Err(err(
                line,
                format!("expected {} fields, found {}", dim + 1, fields.len()),
            ));
        }
        let mut coords = Vec::with_capacity(dim);
        for (c, f) in fields[..dim].iter().enumerate() {
            coords.push(
                f.parse::<i64>()
                    .map_err(|_| err(line, format!("field coord_{}: not an integer: {f:?}", c + 1)))?,
            );
        }
        let v: f64 = fields[dim]
            .parse()
            .map_err(|_| err(line, format!("field value: not a number: {:?}", fields[dim])))?;
        if !v.is_finite() {
            return Err(err(line, "field value: not finite".into()));
        }
        rows.push((line, LatticePoint::new(coords), v));
    }
    Ok(rows)
}
