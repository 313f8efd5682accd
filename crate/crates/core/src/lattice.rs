//! Finite domains on the scaled lattice `(δℤ)^m`.
//!
//! All geometry is integer arithmetic on lattice coordinates; the mesh width
//! `δ = 1/denominator` is applied only when a physical coordinate is needed.
//! Points of a domain's closure carry a canonical index: interior points
//! first, in lexicographic order, followed by boundary points, also in
//! lexicographic order. Every matrix assembly in the crate uses this index.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform lattice `(δℤ)^m` with `δ = 1/denominator`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mesh {
    denominator: u32,
    dimension: usize,
}

impl Mesh {
    pub fn new(denominator: u32, dimension: usize) -> Result<Self> {
        if denominator < 2 {
            return Err(Error::InvalidMesh(format!(
                "denominator must be at least 2, got {denominator}"
            )));
        }
        if dimension == 0 {
            return Err(Error::InvalidMesh("dimension must be positive".into()));
        }
        Ok(Mesh {
            denominator,
            dimension,
        })
    }

    pub fn denominator(&self) -> u32 {
        self.denominator
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Mesh width `δ`.
    pub fn delta(&self) -> f64 {
        1.0 / f64::from(self.denominator)
    }

    /// `δ⁻²`, the stencil scale.
    pub fn inv_delta_sq(&self) -> f64 {
        let d = f64::from(self.denominator);
        d * d
    }

    /// Same width, different dimension.
    pub fn with_dimension(&self, dimension: usize) -> Result<Mesh> {
        Mesh::new(self.denominator, dimension)
    }
}

/// A point of `ℤ^m`; its physical location is `δ·coords`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticePoint(Vec<i64>);

impl LatticePoint {
    pub fn new(coords: Vec<i64>) -> Self {
        LatticePoint(coords)
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// The point shifted by `step` lattice units along `axis`.
    pub fn shifted(&self, axis: usize, step: i64) -> LatticePoint {
        let mut c = self.0.clone();
        c[axis] += step;
        LatticePoint(c)
    }

    /// Neighbors differ by ±1 in exactly one coordinate.
    pub fn is_neighbor(&self, other: &LatticePoint) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let mut diff = 0;
        for (a, b) in self.0.iter().zip(&other.0) {
            let d = (a - b).abs();
            if d > 1 {
                return false;
            }
            diff += d;
        }
        diff == 1
    }

    /// All `2m` neighbors, ordered by ascending axis, minus before plus.
    pub fn neighbors(&self) -> impl Iterator<Item = LatticePoint> + '_ {
        (0..self.dim()).flat_map(move |axis| [self.shifted(axis, -1), self.shifted(axis, 1)])
    }

    pub fn physical(&self, mesh: &Mesh) -> Vec<f64> {
        let d = mesh.delta();
        self.0.iter().map(|&c| c as f64 * d).collect()
    }

    /// Appends one coordinate (product constructions).
    pub fn extended(&self, tail: &[i64]) -> LatticePoint {
        let mut c = self.0.clone();
        c.extend_from_slice(tail);
        LatticePoint(c)
    }
}

impl From<Vec<i64>> for LatticePoint {
    fn from(v: Vec<i64>) -> Self {
        LatticePoint(v)
    }
}

/// Lattice points outside `interior` with at least one neighbor inside it.
pub fn boundary_of(interior: &BTreeSet<LatticePoint>) -> BTreeSet<LatticePoint> {
    let mut out = BTreeSet::new();
    for p in interior {
        for q in p.neighbors() {
            if !interior.contains(&q) {
                out.insert(q);
            }
        }
    }
    out
}

/// Number of lattice-connected components (breadth-first search started at
/// the lexicographically least unvisited point).
pub fn component_count(points: &BTreeSet<LatticePoint>) -> usize {
    let mut seen: BTreeSet<&LatticePoint> = BTreeSet::new();
    let mut components = 0;
    for start in points {
        if seen.contains(start) {
            continue;
        }
        components += 1;
        let mut queue = VecDeque::from([start.clone()]);
        seen.insert(start);
        while let Some(p) = queue.pop_front() {
            for q in p.neighbors() {
                if let Some(found) = points.get(&q) {
                    if seen.insert(found) {
                        queue.push_back(q);
                    }
                }
            }
        }
    }
    components
}

/// True iff every pair of points is joined by a neighbor path inside the set.
pub fn is_connected(points: &BTreeSet<LatticePoint>) -> Result<bool> {
    if points.is_empty() {
        return Err(Error::EmptyDomain);
    }
    Ok(component_count(points) == 1)
}

/// A connected finite lattice domain together with its lattice boundary.
///
/// Immutable after construction.
#[derive(Clone, Debug)]
pub struct GridDomain {
    mesh: Mesh,
    points: Vec<LatticePoint>,
    num_interior: usize,
    index: HashMap<LatticePoint, usize>,
    // 2m closure indices per interior point, ascending axis, minus before plus
    neighbors: Vec<usize>,
}

impl PartialEq for GridDomain {
    fn eq(&self, other: &Self) -> bool {
        self.mesh == other.mesh
            && self.num_interior == other.num_interior
            && self.points == other.points
    }
}

impl GridDomain {
    /// Builds a domain from an explicit interior point list.
    pub fn from_interior<I>(mesh: Mesh, interior: I) -> Result<Self>
    where
        I: IntoIterator<Item = LatticePoint>,
    {
        let m = mesh.dimension();
        let mut set = BTreeSet::new();
        for p in interior {
            if p.dim() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    found: p.dim(),
                });
            }
            set.insert(p);
        }
        if set.is_empty() {
            return Err(Error::EmptyDomain);
        }
        let components = component_count(&set);
        if components != 1 {
            return Err(Error::Disconnected { components });
        }
        let boundary = boundary_of(&set);
        let num_interior = set.len();
        let points: Vec<LatticePoint> = set.into_iter().chain(boundary).collect();
        let index: HashMap<LatticePoint, usize> = points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        let mut neighbors = Vec::with_capacity(num_interior * 2 * m);
        for p in &points[..num_interior] {
            for q in p.neighbors() {
                neighbors.push(index[&q]);
            }
        }
        Ok(GridDomain {
            mesh,
            points,
            num_interior,
            index,
            neighbors,
        })
    }

    /// Open box `(0, s_1) × … × (0, s_m)` with side lengths in lattice steps.
    pub fn box_steps(mesh: Mesh, steps: &[u64]) -> Result<Self> {
        if steps.len() != mesh.dimension() {
            return Err(Error::DimensionMismatch {
                expected: mesh.dimension(),
                found: steps.len(),
            });
        }
        for (axis, &s) in steps.iter().enumerate() {
            if s < 2 {
                return Err(Error::DegenerateSide { axis, side: s });
            }
        }
        let mut pts = vec![Vec::<i64>::new()];
        for &s in steps {
            pts = pts
                .into_iter()
                .flat_map(|prefix| {
                    (1..s as i64).map(move |c| {
                        let mut p = prefix.clone();
                        p.push(c);
                        p
                    })
                })
                .collect();
        }
        GridDomain::from_interior(mesh, pts.into_iter().map(LatticePoint))
    }

    /// Open box with integer side lengths in physical units (`R` units span
    /// `R·denominator` lattice steps).
    pub fn box_domain(mesh: Mesh, side_lengths: &[u32]) -> Result<Self> {
        let steps: Vec<u64> = side_lengths
            .iter()
            .map(|&r| u64::from(r) * u64::from(mesh.denominator()))
            .collect();
        GridDomain::box_steps(mesh, &steps)
    }

    /// `base × [−N, N]^axes` with `N = half_steps·δ`; the new axes are appended
    /// after the base coordinates.
    pub fn prism(base: &GridDomain, half_steps: u64, axes: usize) -> Result<Self> {
        if half_steps == 0 {
            return Err(Error::InvalidArgument("half length must be positive".into()));
        }
        if axes == 0 {
            return Err(Error::InvalidArgument("at least one axial direction".into()));
        }
        let mesh = base.mesh.with_dimension(base.mesh.dimension() + axes)?;
        let n = half_steps as i64;
        let mut tails = vec![Vec::<i64>::new()];
        for _ in 0..axes {
            tails = tails
                .into_iter()
                .flat_map(|prefix| {
                    (-n + 1..n).map(move |c| {
                        let mut p = prefix.clone();
                        p.push(c);
                        p
                    })
                })
                .collect();
        }
        let interior = base
            .interior()
            .iter()
            .flat_map(|p| tails.iter().map(move |t| p.extended(t)));
        GridDomain::from_interior(mesh, interior)
    }

    /// Truncated cylinder `closure(base) × [−N, N]`, axial coordinate last.
    pub fn cylinder(base: &GridDomain, half_steps: u64) -> Result<Self> {
        GridDomain::prism(base, half_steps, 1)
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn dimension(&self) -> usize {
        self.mesh.dimension()
    }

    pub fn num_interior(&self) -> usize {
        self.num_interior
    }

    pub fn num_boundary(&self) -> usize {
        self.points.len() - self.num_interior
    }

    /// Number of closure points.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn interior(&self) -> &[LatticePoint] {
        &self.points[..self.num_interior]
    }

    pub fn boundary(&self) -> &[LatticePoint] {
        &self.points[self.num_interior..]
    }

    /// Closure points in canonical order.
    pub fn points(&self) -> &[LatticePoint] {
        &self.points
    }

    pub fn point(&self, index: usize) -> &LatticePoint {
        &self.points[index]
    }

    pub fn index_of(&self, p: &LatticePoint) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn is_interior_index(&self, index: usize) -> bool {
        index < self.num_interior
    }

    /// Closure indices of the `2m` neighbors of interior point `i`.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        let w = 2 * self.dimension();
        &self.neighbors[i * w..(i + 1) * w]
    }

    /// Inclusive per-axis coordinate ranges of the closure.
    pub fn bounding_box(&self) -> Vec<(i64, i64)> {
        let m = self.dimension();
        let mut bb = vec![(i64::MAX, i64::MIN); m];
        for p in &self.points {
            for (r, &c) in bb.iter_mut().zip(p.coords()) {
                r.0 = r.0.min(c);
                r.1 = r.1.max(c);
            }
        }
        bb
    }

    /// The interior as a [`DomainSpec`] point list.
    pub fn to_spec(&self) -> DomainSpec {
        DomainSpec {
            mesh_denominator: self.mesh.denominator(),
            dimension: self.dimension(),
            shape: DomainShape::Points {
                points: self.interior().iter().map(|p| p.coords().to_vec()).collect(),
            },
        }
    }
}

/// JSON description of a domain.
///
/// ```json
/// { "mesh_denominator": 4, "dimension": 2, "kind": "box", "side_lengths": [1, 1] }
/// { "mesh_denominator": 2, "dimension": 1, "kind": "points", "points": [[1]] }
/// { "mesh_denominator": 2, "dimension": 2, "kind": "cylinder",
///   "base": { ... }, "half_length_steps": 2 }
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub mesh_denominator: u32,
    pub dimension: usize,
    #[serde(flatten)]
    pub shape: DomainShape,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DomainShape {
    /// Side lengths in physical units; `side_steps` overrides with lattice steps.
    Box {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        side_lengths: Option<Vec<u32>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        side_steps: Option<Vec<u64>>,
    },
    /// Explicit interior points in integer lattice coordinates.
    Points { points: Vec<Vec<i64>> },
    /// Truncated cylinder over `base`, half length in lattice steps.
    Cylinder {
        base: Box<DomainSpec>,
        half_length_steps: u64,
    },
}

impl DomainSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn build(&self) -> Result<GridDomain> {
        let mesh = Mesh::new(self.mesh_denominator, self.dimension)?;
        match &self.shape {
            DomainShape::Box {
                side_lengths,
                side_steps,
            } => match (side_steps, side_lengths) {
                (Some(steps), _) => GridDomain::box_steps(mesh, steps),
                (None, Some(sides)) => GridDomain::box_domain(mesh, sides),
                (None, None) => Err(Error::InvalidArgument(
                    "box needs side_lengths or side_steps".into(),
                )),
            },
            DomainShape::Points { points } => GridDomain::from_interior(
                mesh,
                points.iter().cloned().map(LatticePoint::new),
            ),
            DomainShape::Cylinder {
                base,
                half_length_steps,
            } => {
                if base.mesh_denominator != self.mesh_denominator
                    || base.dimension + 1 != self.dimension
                {
                    return Err(Error::InvalidArgument(
                        "cylinder base must share the denominator and have dimension one less"
                            .into(),
                    ));
                }
                let base = base.build()?;
                GridDomain::cylinder(&base, *half_length_steps)
            }
        }
    }
}
