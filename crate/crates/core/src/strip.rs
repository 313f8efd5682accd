//! Tempered discrete harmonic functions on the strip `[0, 1] × ℝⁿ`.
//!
//! With `δ = 1/L`, layer `k` of the solution has Fourier series
//! `φ_k(t) = Σ_j u(δk, δj) e^{2πi j·t}`. Along each frequency the layers obey
//! `φ_k = (φ_{k−1} + φ_{k+1}) / (2λ(t))`, so
//!
//! ```text
//! φ_k = (U_{k−1}(λ) φ_L + U_{L−k−1}(λ) φ_0) / U_{L−1}(λ)
//! ```
//!
//! with Chebyshev polynomials of the second kind. This equals the
//! `(q^k − q^{−k}) / (q^L − q^{−L})` form and stays analytic at `t = 0`,
//! where `q = 1` and the split coefficients `a₁, a₂` blow up. Layer values are
//! recovered with the periodic trapezoidal rule on a uniform `t` grid.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Successive-resolution change that stops grid doubling.
pub const QUAD_TOL: f64 = 1e-10;

const MAX_POINTS_1D: usize = 1 << 16;
const MAX_POINTS_2D: usize = 256;

/// `(λ(t), q(t))` with `λ = n + 1 − Σ cos 2πt_l` and `q = λ + √(λ² − 1) ≥ 1`.
pub fn q_symbol(t: &[f64]) -> (f64, f64) {
    let lambda = symbol_lambda(t.iter().map(|&x| (2.0 * PI * x).cos()), t.len());
    (lambda, q_of_lambda(lambda))
}

fn symbol_lambda(cosines: impl Iterator<Item = f64>, n: usize) -> f64 {
    let s: f64 = cosines.sum();
    n as f64 + 1.0 - s
}

fn q_of_lambda(lambda: f64) -> f64 {
    // λ − 1 = Σ(1 − cos) ≥ 0; form λ² − 1 as (λ−1)(λ+1) for accuracy near t = 0
    let lm1 = (lambda - 1.0).max(0.0);
    lambda + (lm1 * (lambda + 1.0)).sqrt()
}

/// Finitely supported data on the two boundary layers of the strip.
#[derive(Clone, Debug, PartialEq)]
pub struct StripBoundaryData {
    layers: u32,
    n: usize,
    bottom: BTreeMap<Vec<i64>, f64>,
    top: BTreeMap<Vec<i64>, f64>,
}

impl StripBoundaryData {
    /// `layers = L = δ⁻¹`; `n` transverse dimensions (1 or 2).
    pub fn new<B, T>(layers: u32, n: usize, bottom: B, top: T) -> Result<Self>
    where
        B: IntoIterator<Item = (Vec<i64>, f64)>,
        T: IntoIterator<Item = (Vec<i64>, f64)>,
    {
        if layers < 2 {
            return Err(Error::InvalidMesh(format!(
                "strip needs at least 2 layers, got {layers}"
            )));
        }
        if !(1..=2).contains(&n) {
            return Err(Error::InvalidArgument(format!(
                "transverse dimension must be 1 or 2, got {n}"
            )));
        }
        let collect = |it: &mut dyn Iterator<Item = (Vec<i64>, f64)>| -> Result<BTreeMap<Vec<i64>, f64>> {
            let mut map = BTreeMap::new();
            for (i, (j, v)) in it.enumerate() {
                if j.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: j.len(),
                    });
                }
                if !v.is_finite() {
                    return Err(Error::NonFinite(i));
                }
                if v != 0.0 {
                    *map.entry(j).or_insert(0.0) += v;
                }
            }
            Ok(map)
        };
        let bottom = collect(&mut bottom.into_iter())?;
        let top = collect(&mut top.into_iter())?;
        Ok(StripBoundaryData {
            layers,
            n,
            bottom,
            top,
        })
    }

    pub fn layers(&self) -> u32 {
        self.layers
    }

    pub fn transverse_dim(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> f64 {
        1.0 / f64::from(self.layers)
    }

    pub fn bottom(&self) -> &BTreeMap<Vec<i64>, f64> {
        &self.bottom
    }

    pub fn top(&self) -> &BTreeMap<Vec<i64>, f64> {
        &self.top
    }

    fn support(&self) -> impl Iterator<Item = &Vec<i64>> {
        self.bottom.keys().chain(self.top.keys())
    }

    /// Largest `|j|_∞` in either support (0 for zero data).
    pub fn support_radius(&self) -> i64 {
        self.support()
            .flat_map(|j| j.iter().map(|c| c.abs()))
            .max()
            .unwrap_or(0)
    }

    /// Largest per-axis extent of the joint support bounding box.
    pub fn support_width(&self) -> usize {
        (0..self.n)
            .map(|axis| {
                let (lo, hi) = self.support().fold((i64::MAX, i64::MIN), |(lo, hi), j| {
                    (lo.min(j[axis]), hi.max(j[axis]))
                });
                if lo > hi {
                    1
                } else {
                    (hi - lo + 1) as usize
                }
            })
            .max()
            .unwrap_or(1)
    }

    pub fn bottom_sq_norm(&self) -> f64 {
        self.bottom.values().map(|v| v * v).sum()
    }

    pub fn top_sq_norm(&self) -> f64 {
        self.top.values().map(|v| v * v).sum()
    }
}

/// Unit roots `e^{2πi m/P}` with exact conjugate symmetry.
struct Roots(Vec<Complex64>);

impl Roots {
    fn new(p: usize) -> Self {
        let mut r = vec![Complex64::new(1.0, 0.0); p];
        for m in 1..=p / 2 {
            let th = 2.0 * PI * m as f64 / p as f64;
            r[m] = Complex64::new(th.cos(), th.sin());
            r[p - m] = r[m].conj();
        }
        Roots(r)
    }

    /// `e^{2πi j p / P}` for integer `j`.
    fn at(&self, j: i64, p: usize) -> Complex64 {
        let n = self.0.len() as i64;
        self.0[((j * p as i64).rem_euclid(n)) as usize]
    }
}

/// Layer transforms `φ_k` on a uniform `t` grid (`P^n` points, row-major).
#[derive(Clone, Debug)]
pub struct SymbolGrid {
    pub points_per_axis: usize,
    pub n: usize,
    /// Whether the grid is shifted by half a cell (`t = (p + ½)/P`).
    pub shifted: bool,
    pub t: Vec<Vec<f64>>,
    pub lambda: Vec<f64>,
    /// `phi[k][g]` for `k = 0..=L`.
    pub phi: Vec<Vec<Complex64>>,
}

fn data_transform(map: &BTreeMap<Vec<i64>, f64>, t: &[f64]) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for (j, v) in map {
        let arg: f64 = j.iter().zip(t).map(|(&jj, &tt)| jj as f64 * tt).sum();
        s += Complex64::from_polar(*v, 2.0 * PI * arg);
    }
    s
}

impl SymbolGrid {
    /// Evaluates every `φ_k` on the unshifted grid `t = p/P`.
    pub fn new(data: &StripBoundaryData, points_per_axis: usize) -> Self {
        Self::build(data, points_per_axis, false)
    }

    /// Evaluates every `φ_k` on the half-cell shifted grid, which avoids `t = 0`.
    pub fn shifted(data: &StripBoundaryData, points_per_axis: usize) -> Self {
        Self::build(data, points_per_axis, true)
    }

    fn build(data: &StripBoundaryData, p: usize, shifted: bool) -> Self {
        let n = data.n;
        let l = data.layers as usize;
        let roots = Roots::new(p);
        let total = p.pow(n as u32);
        let mut t = Vec::with_capacity(total);
        let mut lambda = Vec::with_capacity(total);
        let mut phi = vec![Vec::with_capacity(total); l + 1];
        let mut u = vec![0.0; l + 1];
        for g in 0..total {
            let idx: Vec<usize> = if n == 1 { vec![g] } else { vec![g / p, g % p] };
            let tg: Vec<f64> = idx
                .iter()
                .map(|&i| (i as f64 + if shifted { 0.5 } else { 0.0 }) / p as f64)
                .collect();
            let (lam, phi0, phil) = if shifted {
                let lam = symbol_lambda(tg.iter().map(|&x| (2.0 * PI * x).cos()), n);
                (lam, data_transform(&data.bottom, &tg), data_transform(&data.top, &tg))
            } else {
                let lam = symbol_lambda(idx.iter().map(|&i| roots.0[i].re), n);
                let sum = |map: &BTreeMap<Vec<i64>, f64>| {
                    let mut s = Complex64::new(0.0, 0.0);
                    for (j, v) in map {
                        let mut w = Complex64::new(*v, 0.0);
                        for (&jj, &i) in j.iter().zip(&idx) {
                            w *= roots.at(jj, i);
                        }
                        s += w;
                    }
                    s
                };
                (lam, sum(&data.bottom), sum(&data.top))
            };
            // U_{-1} = 0, U_0 = 1, U_{m+1} = 2λU_m − U_{m−1}; u[m] holds U_{m−1}
            u[0] = 0.0;
            u[1] = 1.0;
            for m in 2..=l {
                u[m] = 2.0 * lam * u[m - 1] - u[m - 2];
            }
            let den = u[l];
            for (k, layer) in phi.iter_mut().enumerate() {
                let v = if k == 0 {
                    phi0
                } else if k == l {
                    phil
                } else {
                    (phil * u[k] + phi0 * u[l - k]) / den
                };
                layer.push(v);
            }
            t.push(tg);
            lambda.push(lam);
        }
        SymbolGrid {
            points_per_axis: p,
            n,
            shifted,
            t,
            lambda,
            phi,
        }
    }

    /// Max over interior layers and grid points of
    /// `|φ_k − (φ_{k−1} + φ_{k+1}) / (2λ)|`, relative to `max |φ|`.
    pub fn recurrence_error(&self) -> f64 {
        let l = self.phi.len() - 1;
        let scale = self.phi.iter().flatten().fold(0.0f64, |m, z| m.max(z.norm())).max(1e-300);
        let mut worst: f64 = 0.0;
        for k in 1..l {
            for g in 0..self.lambda.len() {
                let rhs = (self.phi[k - 1][g] + self.phi[k + 1][g]) / (2.0 * self.lambda[g]);
                worst = worst.max((self.phi[k][g] - rhs).norm() / scale);
            }
        }
        worst
    }
}

/// `a₁(t), a₂(t)` at one frequency from `φ_0, φ_L` and `q`.
pub fn split_coefficients(phi0: Complex64, phil: Complex64, q: f64, layers: u32) -> (Complex64, Complex64) {
    let ql = q.powi(layers as i32);
    let qml = 1.0 / ql;
    let den = ql - qml;
    ((phil - phi0 * qml) / den, (phi0 * ql - phil) / den)
}

/// Reconstruction error of `a₁ + a₂ = φ_0` and `a₁q^L + a₂q^{−L} = φ_L` on a
/// shifted grid, relative to `max |φ|`.
pub fn coefficient_reproduction_error(data: &StripBoundaryData, points_per_axis: usize) -> f64 {
    let grid = SymbolGrid::shifted(data, points_per_axis);
    let l = data.layers as usize;
    let scale = grid.phi.iter().flatten().fold(0.0f64, |m, z| m.max(z.norm())).max(1e-300);
    let mut worst: f64 = 0.0;
    for g in 0..grid.lambda.len() {
        let q = q_of_lambda(grid.lambda[g]);
        let (a1, a2) = split_coefficients(grid.phi[0][g], grid.phi[l][g], q, data.layers);
        let ql = q.powi(data.layers as i32);
        worst = worst
            .max((a1 + a2 - grid.phi[0][g]).norm() / scale)
            .max((a1 * ql + a2 / ql - grid.phi[l][g]).norm() / scale);
    }
    worst
}

/// Frequency-side gradient energy at layer `k` on a shifted grid.
///
/// Returns `(combined, separated)`: `combined` integrates
/// `|a₁q^k(q−1) + a₂q^{−k}(q^{−1}−1)|² + Σ_l |(a₁q^k + a₂q^{−k})(e^{−2πit_l} − 1)|²`;
/// `separated` drops the `a₁ā₂` cross terms, which cancel by
/// `(q−1)(q^{−1}−1) = −Σ_l |e^{−2πit_l} − 1|²`.
pub fn three_line_m_frequency(data: &StripBoundaryData, k: usize, points_per_axis: usize) -> (f64, f64) {
    let grid = SymbolGrid::shifted(data, points_per_axis);
    let l = data.layers as usize;
    let mut combined = 0.0;
    let mut separated = 0.0;
    for g in 0..grid.lambda.len() {
        let q = q_of_lambda(grid.lambda[g]);
        let (a1, a2) = split_coefficients(grid.phi[0][g], grid.phi[l][g], q, data.layers);
        let a = a1 * q.powi(k as i32);
        let b = a2 * q.powi(-(k as i32));
        let ex = a * (q - 1.0) + b * (1.0 / q - 1.0);
        combined += ex.norm_sqr();
        separated += a.norm_sqr() * (q - 1.0).powi(2) + b.norm_sqr() * (1.0 / q - 1.0).powi(2);
        for &tl in &grid.t[g] {
            let e = Complex64::from_polar(1.0, -2.0 * PI * tl) - 1.0;
            combined += ((a + b) * e).norm_sqr();
            separated += (a.norm_sqr() + b.norm_sqr()) * e.norm_sqr();
        }
    }
    let w = 1.0 / grid.lambda.len() as f64;
    (combined * w, separated * w)
}

/// Max over an `points_per_axis^n` grid of the deviation from
/// `(q−1)(q^{−1}−1) = 2Σcos 2πt_l − 2n = −Σ|e^{−2πit_l} − 1|²`, and of
/// `q + q^{−1} = 2λ`.
pub fn symbol_identity_error(n: usize, points_per_axis: usize) -> f64 {
    let total = points_per_axis.pow(n as u32);
    let mut worst: f64 = 0.0;
    for g in 0..total {
        let t: Vec<f64> = if n == 1 {
            vec![g as f64 / points_per_axis as f64]
        } else {
            vec![
                (g / points_per_axis) as f64 / points_per_axis as f64,
                (g % points_per_axis) as f64 / points_per_axis as f64,
            ]
        };
        let (lam, q) = q_symbol(&t);
        let lhs = (q - 1.0) * (1.0 / q - 1.0);
        let cos_form: f64 = 2.0 * t.iter().map(|x| (2.0 * PI * x).cos()).sum::<f64>() - 2.0 * n as f64;
        let exp_form: f64 = -t
            .iter()
            .map(|x| (Complex64::from_polar(1.0, -2.0 * PI * x) - 1.0).norm_sqr())
            .sum::<f64>();
        let scale = lam.max(1.0);
        worst = worst
            .max((lhs - cos_form).abs() / scale)
            .max((lhs - exp_form).abs() / scale)
            .max((q + 1.0 / q - 2.0 * lam).abs() / scale);
    }
    worst
}

/// Solver settings for [`solve_strip_with`].
#[derive(Clone, Debug)]
pub struct StripOptions {
    /// Starting quadrature resolution per axis; must be at least four times
    /// the support width.
    pub quad_points: usize,
    /// Output window `|j|_∞ ≤ radius`; default is support radius + 2L.
    pub window_radius: Option<usize>,
    pub tol: f64,
}

impl StripOptions {
    pub fn new(quad_points: usize) -> Self {
        StripOptions {
            quad_points,
            window_radius: None,
            tol: QUAD_TOL,
        }
    }

    pub fn window(mut self, radius: usize) -> Self {
        self.window_radius = Some(radius);
        self
    }
}

/// Layer values on a window of the transverse lattice.
#[derive(Clone, Debug)]
pub struct StripSolution {
    n: usize,
    layers: u32,
    window_radius: usize,
    quad_points: usize,
    converged: bool,
    last_change: f64,
    // values[k][w], window in lexicographic order
    values: Vec<Vec<f64>>,
    parseval: Vec<f64>,
    max_imag: f64,
}

impl StripSolution {
    pub fn layers(&self) -> u32 {
        self.layers
    }

    pub fn transverse_dim(&self) -> usize {
        self.n
    }

    pub fn window_radius(&self) -> usize {
        self.window_radius
    }

    /// Quadrature points per axis actually used.
    pub fn quad_points(&self) -> usize {
        self.quad_points
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    /// Largest change between the last two resolutions.
    pub fn last_change(&self) -> f64 {
        self.last_change
    }

    /// Largest discarded imaginary part relative to `max |u|`.
    pub fn max_imag_ratio(&self) -> f64 {
        self.max_imag
    }

    fn side(&self) -> usize {
        2 * self.window_radius + 1
    }

    /// Window position of `j`, if inside.
    pub fn window_index(&self, j: &[i64]) -> Option<usize> {
        let r = self.window_radius as i64;
        if j.len() != self.n || j.iter().any(|c| c.abs() > r) {
            return None;
        }
        Some(j.iter().fold(0usize, |acc, &c| acc * self.side() + (c + r) as usize))
    }

    /// Transverse coordinates of window position `w`.
    pub fn window_point(&self, w: usize) -> Vec<i64> {
        let r = self.window_radius as i64;
        let s = self.side();
        if self.n == 1 {
            vec![w as i64 - r]
        } else {
            vec![(w / s) as i64 - r, (w % s) as i64 - r]
        }
    }

    /// `u(δk, δj)`, `None` outside the window.
    pub fn value(&self, k: usize, j: &[i64]) -> Option<f64> {
        self.window_index(j).and_then(|w| self.values.get(k).map(|layer| layer[w]))
    }

    /// Layer `k` over the window.
    pub fn layer(&self, k: usize) -> &[f64] {
        &self.values[k]
    }

    /// `Σ_j |u(δk, δj)|²` from the quadrature grid (discrete Parseval).
    pub fn parseval_sq_norm(&self, k: usize) -> f64 {
        self.parseval[k]
    }
}

fn solve_at(data: &StripBoundaryData, p: usize, radius: usize) -> (Vec<Vec<f64>>, Vec<f64>, f64) {
    let grid = SymbolGrid::new(data, p);
    let roots = Roots::new(p);
    let n = data.n;
    let side = 2 * radius + 1;
    let r = radius as i64;
    let norm = 1.0 / grid.lambda.len() as f64;
    let mut values = Vec::with_capacity(grid.phi.len());
    let mut parseval = Vec::with_capacity(grid.phi.len());
    let mut max_imag: f64 = 0.0;
    let mut max_re: f64 = 0.0;
    for phi in &grid.phi {
        parseval.push(phi.iter().map(|z| z.norm_sqr()).sum::<f64>() * norm);
        let out: Vec<Complex64> = if n == 1 {
            (0..side)
                .map(|w| {
                    let j = w as i64 - r;
                    let mut s = Complex64::new(0.0, 0.0);
                    for (pi, z) in phi.iter().enumerate() {
                        s += z * roots.at(-j, pi);
                    }
                    s * norm
                })
                .collect()
        } else {
            // separable: transform the second axis, then the first
            let mut partial = vec![Complex64::new(0.0, 0.0); p * side];
            for p1 in 0..p {
                for w2 in 0..side {
                    let j2 = w2 as i64 - r;
                    let mut s = Complex64::new(0.0, 0.0);
                    for p2 in 0..p {
                        s += phi[p1 * p + p2] * roots.at(-j2, p2);
                    }
                    partial[p1 * side + w2] = s;
                }
            }
            let mut out = vec![Complex64::new(0.0, 0.0); side * side];
            for w1 in 0..side {
                let j1 = w1 as i64 - r;
                for w2 in 0..side {
                    let mut s = Complex64::new(0.0, 0.0);
                    for p1 in 0..p {
                        s += partial[p1 * side + w2] * roots.at(-j1, p1);
                    }
                    out[w1 * side + w2] = s * norm;
                }
            }
            out
        };
        for z in &out {
            max_imag = max_imag.max(z.im.abs());
            max_re = max_re.max(z.re.abs());
        }
        values.push(out.into_iter().map(|z| z.re).collect());
    }
    let ratio = if max_re > 0.0 { max_imag / max_re } else { max_imag };
    (values, parseval, ratio)
}

/// Solves the strip Dirichlet problem with default window and tolerance.
pub fn solve_strip(data: &StripBoundaryData, quad_points_per_axis: usize) -> Result<StripSolution> {
    solve_strip_with(data, &StripOptions::new(quad_points_per_axis))
}

/// Solves the strip Dirichlet problem, doubling the quadrature resolution
/// until successive window values change by less than `opts.tol`.
pub fn solve_strip_with(data: &StripBoundaryData, opts: &StripOptions) -> Result<StripSolution> {
    let width = data.support_width();
    if opts.quad_points < 4 * width {
        return Err(Error::InvalidArgument(format!(
            "quadrature resolution {} below 4x support width {}",
            opts.quad_points, width
        )));
    }
    let radius = opts
        .window_radius
        .unwrap_or(data.support_radius() as usize + 2 * data.layers as usize);
    let cap = if data.n == 1 { MAX_POINTS_1D } else { MAX_POINTS_2D };
    let mut p = opts.quad_points.max(2 * (2 * radius + 1)).next_power_of_two();
    if p > cap {
        return Err(Error::InvalidArgument(format!(
            "window radius {radius} needs more than {cap} quadrature points per axis"
        )));
    }
    let (mut values, mut parseval, mut imag) = solve_at(data, p, radius);
    let mut converged = false;
    let mut change = f64::INFINITY;
    while p * 2 <= cap {
        let (v2, par2, im2) = solve_at(data, p * 2, radius);
        let scale = v2.iter().flatten().fold(1.0f64, |m, x| m.max(x.abs()));
        change = values
            .iter()
            .flatten()
            .zip(v2.iter().flatten())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
            / scale;
        p *= 2;
        values = v2;
        parseval = par2;
        imag = im2;
        if change < opts.tol {
            converged = true;
            break;
        }
    }
    Ok(StripSolution {
        n: data.n,
        layers: data.layers,
        window_radius: radius,
        quad_points: p,
        converged,
        last_change: change,
        values,
        parseval,
        max_imag: imag,
    })
}

/// Squared layer norm over the window with the remainder outside it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LayerNorm {
    pub window: f64,
    /// Parseval total minus window sum (clamped at 0).
    pub remainder: f64,
}

pub fn layer_sq_norm(sol: &StripSolution, k: usize) -> Result<LayerNorm> {
    if k > sol.layers as usize {
        return Err(Error::InvalidArgument(format!(
            "layer {k} outside 0..={}",
            sol.layers
        )));
    }
    let window: f64 = sol.values[k].iter().map(|v| v * v).sum();
    Ok(LayerNorm {
        window,
        remainder: (sol.parseval[k] - window).max(0.0),
    })
}

/// Gradient energy
/// `m(k) = δ²‖u_x(δk, ·)‖² + δ² Σ_l ‖u_{y_l}(δk, ·)‖²` for `k = 0..=L−1`,
/// with forward differences. Transverse differences are summed over pairs
/// inside the window.
pub fn three_line_m(sol: &StripSolution, k: usize) -> Result<f64> {
    let m_max = sol.layers as usize - 1;
    if k > m_max {
        return Err(Error::InvalidArgument(format!("k = {k} outside 0..={m_max}")));
    }
    let here = &sol.values[k];
    let next = &sol.values[k + 1];
    // δ² · δ⁻² cancels
    let mut m: f64 = here.iter().zip(next).map(|(a, b)| (b - a).powi(2)).sum();
    for w in 0..here.len() {
        let j = sol.window_point(w);
        for axis in 0..sol.n {
            let mut jn = j.clone();
            jn[axis] += 1;
            if let Some(wn) = sol.window_index(&jn) {
                m += (here[wn] - here[w]).powi(2);
            }
        }
    }
    Ok(m)
}

/// `m(0)^{1−k/M} m(M)^{k/M}` with the limit convention for zero endpoints:
/// a zero endpoint forces the bound to zero except at the opposite end.
pub fn three_line_bound(m0: f64, mm: f64, k: usize, m_max: usize) -> f64 {
    if k == 0 {
        return m0;
    }
    if k == m_max {
        return mm;
    }
    if m0 == 0.0 || mm == 0.0 {
        return 0.0;
    }
    let alpha = k as f64 / m_max as f64;
    // log form avoids overflow for large energies
    ((1.0 - alpha) * m0.ln() + alpha * mm.ln()).exp()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThreeLineRow {
    pub k: usize,
    pub m: f64,
    pub bound: f64,
    /// `m / bound` (0 when both vanish).
    pub ratio: f64,
}

fn ratio(m: f64, bound: f64) -> f64 {
    if bound == 0.0 {
        if m == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        m / bound
    }
}

/// `m(k)` and its three-line bound for every `k = 0..=M`.
pub fn three_line_table(sol: &StripSolution) -> Result<Vec<ThreeLineRow>> {
    let m_max = sol.layers as usize - 1;
    let ms: Vec<f64> = (0..=m_max).map(|k| three_line_m(sol, k)).collect::<Result<_>>()?;
    Ok(bound_rows(&ms))
}

fn bound_rows(ms: &[f64]) -> Vec<ThreeLineRow> {
    let m_max = ms.len() - 1;
    ms.iter()
        .enumerate()
        .map(|(k, &m)| {
            let bound = three_line_bound(ms[0], ms[m_max], k, m_max);
            ThreeLineRow {
                k,
                m,
                bound,
                ratio: ratio(m, bound),
            }
        })
        .collect()
}

const LOGCONVEX_REL_TOL: f64 = 1e-12;

fn satisfies_three_line(seq: &[f64]) -> bool {
    bound_rows(seq)
        .iter()
        .all(|r| r.m <= r.bound * (1.0 + LOGCONVEX_REL_TOL))
}

/// Whether the sum of sequences on `0..=M`, each satisfying the three-line
/// inequality, satisfies it as well.
pub fn logconvex_sum_check(components: &[Vec<f64>]) -> Result<bool> {
    let len = components
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::InvalidArgument("no components".into()))?;
    if len < 2 {
        return Err(Error::InvalidArgument("sequences need at least two terms".into()));
    }
    for (i, c) in components.iter().enumerate() {
        if c.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                found: c.len(),
            });
        }
        if c.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("component {i} has negative or non-finite terms")));
        }
        if !satisfies_three_line(c) {
            return Err(Error::InvalidArgument(format!(
                "component {i} does not satisfy the three-line inequality"
            )));
        }
    }
    let sum: Vec<f64> = (0..len).map(|k| components.iter().map(|c| c[k]).sum()).collect();
    Ok(satisfies_three_line(&sum))
}
