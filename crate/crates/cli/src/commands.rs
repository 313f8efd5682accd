use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use lattice_harmonic::cylinder::{
    harmonic_basis, harmonic_measure, mid_layer_max_abs, mid_layer_measure,
    midsection_linear_bound, pl_constant_partition_report, stability_bound, verify_pl,
    CylinderSpec, Parity, Region,
};
use lattice_harmonic::dirichlet::{residual, DirichletSolver};
use lattice_harmonic::montecarlo::{estimate_exit_probability, WalkConfig};
use lattice_harmonic::operators::{parse_point_csv, HARMONIC_REL_TOL};
use lattice_harmonic::spectral::{
    a_of_lambda, cube_spectrum_closed_form, dirichlet_spectrum, EIGEN_RESIDUAL_REL,
    ORTHONORMALITY_TOL,
};
use lattice_harmonic::strip::{
    layer_sq_norm, solve_strip_with, three_line_table, StripBoundaryData, StripOptions, ThreeLineRow,
    QUAD_TOL,
};
use lattice_harmonic::{DomainShape, DomainSpec, GridDomain, LatticePoint};

use crate::cells;
use crate::io::{read_json, read_text, OutDir, Table};
use crate::verdict::{Report, Verdict};
use crate::GlobalOpts;

/// Tolerance for layer norms and inequality slack.
const SLACK: f64 = 1e-9;

pub fn finish(mut out: OutDir, report: Report) -> Result<bool> {
    out.write("verdicts.txt", &report.render())?;
    for p in out.written() {
        eprintln!("wrote {}", p.display());
    }
    Ok(report.all_pass())
}

pub fn load_domain(path: &Path) -> Result<Arc<GridDomain>> {
    let spec: DomainSpec = read_json(path)?;
    let d = spec
        .build()
        .with_context(|| format!("{}: invalid domain", path.display()))?;
    Ok(Arc::new(d))
}

/// Truncated cylinder over a base domain. Exactly one of `half_length_steps`
/// and `half_length` (with `half_length / δ` an integer) must be given.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CylinderConfig {
    pub base: DomainSpec,
    #[serde(default)]
    pub half_length_steps: Option<u64>,
    #[serde(default)]
    pub half_length: Option<f64>,
}

impl CylinderConfig {
    pub fn half_steps(&self) -> Result<u64> {
        let den = f64::from(self.base.mesh_denominator);
        match (self.half_length_steps, self.half_length) {
            (Some(s), None) => Ok(s),
            (None, Some(n)) => {
                let s = n * den;
                if !(s >= 1.0) || (s - s.round()).abs() > 1e-9 {
                    bail!("field half_length: {n} is not a positive multiple of the mesh width");
                }
                Ok(s.round() as u64)
            }
            _ => bail!("exactly one of half_length_steps and half_length is required"),
        }
    }

    pub fn build(&self) -> Result<CylinderSpec> {
        let base = Arc::new(self.base.build()?);
        Ok(CylinderSpec::new(base, self.half_steps()?)?)
    }
}

fn load_cylinder(path: &Path) -> Result<CylinderSpec> {
    let cfg: CylinderConfig = read_json(path)?;
    cfg.build()
        .with_context(|| format!("{}: invalid cylinder spec", path.display()))
}

fn point_table(dim: usize, prefix: &str) -> Table {
    let names: Vec<String> = (1..=dim).map(|i| format!("{prefix}_{i}")).collect();
    let mut header: Vec<&str> = names.iter().map(String::as_str).collect();
    header.push("value");
    Table::new(&header)
}

fn point_row(t: &mut Table, coords: &[i64], v: f64) {
    let mut row: Vec<crate::io::Cell> = coords.iter().map(|&c| c.into()).collect();
    row.push(v.into());
    t.row(&row);
}

#[derive(Args)]
pub struct SolveArgs {
    /// Domain JSON.
    #[arg(long)]
    domain: PathBuf,
    /// Boundary data CSV (coord_1..coord_m,value), one row per boundary point.
    #[arg(long)]
    boundary: PathBuf,
}

pub fn solve(g: &GlobalOpts, a: SolveArgs) -> Result<bool> {
    let mut out = OutDir::resolve(g.out.clone());
    let domain = load_domain(&a.domain)?;
    let name = a.boundary.display().to_string();
    let rows = parse_point_csv(&read_text(&a.boundary)?, domain.dimension(), &name)?;
    let k = domain.num_interior();
    let mut b = vec![f64::NAN; domain.num_boundary()];
    for (line, p, v) in rows {
        match domain.index_of(&p) {
            Some(i) if i >= k => b[i - k] = v,
            _ => bail!("{name}:{line}: point {:?} is not a boundary point", p.coords()),
        }
    }
    if let Some(i) = b.iter().position(|v| v.is_nan()) {
        bail!(
            "{name}: missing value for boundary point {:?}",
            domain.boundary()[i].coords()
        );
    }
    let u = DirichletSolver::new(domain.clone())?.solve(&b)?;
    out.write("solution.csv", &u.to_csv())?;

    let mut report = Report::default();
    let tol = g.tol.unwrap_or(HARMONIC_REL_TOL);
    report.push(Verdict::at_most(
        "residual",
        residual(&u),
        tol * domain.mesh().inv_delta_sq() * u.max_abs(),
    ));
    let fold_max = |s: &[f64]| s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let fold_min = |s: &[f64]| s.iter().copied().fold(f64::INFINITY, f64::min);
    if k > 0 {
        let slack = tol * u.max_abs();
        report.push(Verdict::at_most(
            "max-principle-upper",
            fold_max(u.interior_values()),
            fold_max(u.boundary_values()) + slack,
        ));
        report.push(Verdict::at_least(
            "max-principle-lower",
            fold_min(u.interior_values()),
            fold_min(u.boundary_values()) - slack,
        ));
    }
    finish(out, report)
}

#[derive(Args)]
pub struct EigArgs {
    /// Domain JSON.
    #[arg(long)]
    domain: PathBuf,
    /// Also write the first COUNT eigenfunctions as CSV.
    #[arg(long, value_name = "COUNT", default_value_t = 0)]
    functions: usize,
}

/// Side `R` if the spec is the cube `(0, R)^n`.
fn cube_side(spec: &DomainSpec) -> Option<u32> {
    let DomainShape::Box {
        side_lengths,
        side_steps,
    } = &spec.shape
    else {
        return None;
    };
    let den = u64::from(spec.mesh_denominator);
    let sides: Vec<u64> = match (side_steps, side_lengths) {
        (Some(s), _) => s.clone(),
        (None, Some(l)) => l.iter().map(|&r| u64::from(r) * den).collect(),
        _ => return None,
    };
    let first = *sides.first()?;
    (sides.iter().all(|&s| s == first) && first % den == 0).then(|| (first / den) as u32)
}

pub fn eig(g: &GlobalOpts, a: EigArgs) -> Result<bool> {
    let mut out = OutDir::resolve(g.out.clone());
    let spec: DomainSpec = read_json(&a.domain)?;
    let domain = Arc::new(
        spec.build()
            .with_context(|| format!("{}: invalid domain", a.domain.display()))?,
    );
    let s = dirichlet_spectrum(domain.clone())?;
    let closed = match cube_side(&spec) {
        Some(r) => Some(cube_spectrum_closed_form(r, *domain.mesh())?),
        None => None,
    };
    let mut t = Table::new(&["k", "lambda", "a", "closed_form"]);
    let mut rel = 0.0f64;
    for (k, &lam) in s.eigenvalues().iter().enumerate() {
        let rate = a_of_lambda(lam, domain.mesh())?.a;
        let cf = closed.as_ref().map(|c| c.eigenvalues()[k]);
        if let Some(c) = cf {
            rel = rel.max((lam - c).abs() / c);
        }
        t.row(cells![
            k + 1,
            lam,
            rate,
            cf.map(|c| format!("{c:?}")).unwrap_or_default().as_str()
        ]);
    }
    out.write("eigenvalues.csv", &t.into_string())?;
    for k in 0..a.functions.min(s.len()) {
        out.write(&format!("eigenfunction_{}.csv", k + 1), &s.eigenfunction(k).to_csv())?;
    }

    let mut report = Report::default();
    let lam_max = s.eigenvalues().last().copied().unwrap_or(0.0);
    report.push(Verdict::at_most(
        "eigen-residual",
        s.max_residual(),
        EIGEN_RESIDUAL_REL * lam_max,
    ));
    report.push(Verdict::at_most(
        "orthonormality",
        s.orthonormality_error(),
        ORTHONORMALITY_TOL,
    ));
    if closed.is_some() {
        report.push(Verdict::at_most(
            "closed-form-rel",
            rel,
            g.tol.unwrap_or(1e-9),
        ));
    }
    finish(out, report)
}

#[derive(Args)]
pub struct StripArgs {
    /// Number of layers L = 1/δ.
    #[arg(long)]
    layers: u32,
    /// Transverse dimension (1 or 2).
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// Bottom layer CSV (j_1..j_n,value), finitely supported.
    #[arg(long)]
    bottom: PathBuf,
    /// Top layer CSV.
    #[arg(long)]
    top: PathBuf,
    /// Output window radius |j|_∞ ≤ RADIUS.
    #[arg(long, value_name = "RADIUS")]
    window: Option<usize>,
}

fn read_layer(path: &Path, n: usize) -> Result<Vec<(Vec<i64>, f64)>> {
    let name = path.display().to_string();
    Ok(parse_point_csv(&read_text(path)?, n, &name)?
        .into_iter()
        .map(|(_, p, v)| (p.coords().to_vec(), v))
        .collect())
}

/// Window that makes the truncated gradient energy negligible for n = 1.
pub fn default_strip_window(data: &StripBoundaryData) -> Option<usize> {
    (data.transverse_dim() == 1)
        .then(|| data.support_radius() as usize + 40 * data.layers() as usize)
}

pub fn strip(g: &GlobalOpts, a: StripArgs) -> Result<bool> {
    let mut out = OutDir::resolve(g.out.clone());
    let data = StripBoundaryData::new(
        a.layers,
        a.dim,
        read_layer(&a.bottom, a.dim)?,
        read_layer(&a.top, a.dim)?,
    )?;
    let mut opts = StripOptions::new(g.quad.unwrap_or(4 * data.support_width()));
    opts.tol = g.tol.unwrap_or(QUAD_TOL);
    opts.window_radius = a.window.or_else(|| default_strip_window(&data));
    let sol = solve_strip_with(&data, &opts)?;

    let l = a.layers as usize;
    let s = data.bottom_sq_norm() + data.top_sq_norm();
    let mut worst_layer = 0.0f64;
    let mut norms = Table::new(&["k", "window_sq_norm", "remainder", "boundary_sq_sum"]);
    for k in 0..=l {
        let mut t = point_table(a.dim, "j");
        for w in 0..sol.layer(k).len() {
            point_row(&mut t, &sol.window_point(w), sol.layer(k)[w]);
        }
        out.write(&format!("layer_{k}.csv"), &t.into_string())?;
        let n = layer_sq_norm(&sol, k)?;
        if k > 0 && k < l {
            worst_layer = worst_layer.max(n.window + n.remainder);
        }
        norms.row(cells![k, n.window, n.remainder, s]);
    }
    out.write("layer_norms.csv", &norms.into_string())?;
    let rows = three_line_table(&sol)?;
    let mut t = Table::new(&["k", "m", "bound", "ratio"]);
    for r in &rows {
        t.row(cells![r.k, r.m, r.bound, r.ratio]);
    }
    out.write("three_line.csv", &t.into_string())?;

    let mut report = Report::default();
    report.push(Verdict::at_most("quadrature-change", sol.last_change(), opts.tol));
    report.push(Verdict::at_most("layer-sq-norm", worst_layer, s + SLACK));
    let worst = interior_three_line_ratio(&rows);
    report.push(Verdict::at_most("three-line-ratio", worst, 1.0 + SLACK));
    finish(out, report)
}

/// Largest `m(k)/bound` over `0 < k < M`; the endpoints are equalities.
pub fn interior_three_line_ratio(rows: &[ThreeLineRow]) -> f64 {
    let m = rows.len().saturating_sub(1);
    rows.iter()
        .filter(|r| r.k > 0 && r.k < m)
        .map(|r| r.ratio)
        .fold(0.0, f64::max)
}

#[derive(Args)]
pub struct CylinderArgs {
    /// Cylinder spec JSON: {"base": <domain>, "half_length_steps": N/δ}.
    #[arg(long)]
    spec: PathBuf,
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

pub fn measure(g: &GlobalOpts, a: CylinderArgs) -> Result<bool> {
    let mut out = OutDir::resolve(g.out.clone());
    let spec = load_cylinder(&a.spec)?;
    let tol = g.tol.unwrap_or(HARMONIC_REL_TOL);
    let (exp, gn) = harmonic_measure(&spec);
    let direct = DirichletSolver::new(spec.domain().clone())?.solve(&spec.cap_indicator())?;

    let mut t = Table::new(&["k", "lambda", "a", "d", "contribution"]);
    for k in 0..exp.d.len() {
        t.row(cells![k + 1, exp.lambda[k], exp.a[k], exp.d[k], exp.mid_contribution(k)]);
    }
    out.write("measure_modes.csv", &t.into_string())?;
    out.write("measure.csv", &gn.to_csv())?;
    let mid = mid_layer_measure(&spec, &exp);
    let mut t = point_table(spec.base().dimension(), "coord");
    for (p, v) in spec.base().interior().iter().zip(&mid) {
        point_row(&mut t, p.coords(), *v);
    }
    out.write("measure_mid.csv", &t.into_string())?;
    println!(
        "# K={} N={} max g(.,0)={}",
        spec.k(),
        spec.half_length(),
        mid.iter().copied().fold(0.0, f64::max)
    );

    let mut report = Report::default();
    report.push(Verdict::at_most(
        "spectral-vs-direct",
        max_abs_diff(gn.values(), direct.values()),
        tol,
    ));
    let overshoot = gn
        .values()
        .iter()
        .fold(0.0f64, |m, &v| m.max(-v).max(v - 1.0));
    report.push(Verdict::at_most("range-0-1", overshoot, tol));
    let mut asym = 0.0f64;
    for i in 0..spec.domain().len() {
        if let Region::Interior { .. } = spec.region(i) {
            let p = spec.domain().point(i);
            let mut c = p.coords().to_vec();
            let last = c.len() - 1;
            c[last] = -c[last];
            let j = spec.domain().index_of(&LatticePoint::new(c)).expect("mirror point");
            asym = asym.max((gn.values()[i] - gn.values()[j]).abs());
        }
    }
    report.push(Verdict::at_most("axial-evenness", asym, tol));
    let sqrt_k = (spec.k() as f64).sqrt();
    let dmax = exp.d.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    report.push(Verdict::at_most("d-cauchy-schwarz", dmax, sqrt_k * (1.0 + 1e-12)));
    let b = midsection_linear_bound(&spec, &vec![1.0; spec.k()])?;
    report.push(Verdict::at_most(
        "midsection-sum",
        b.lhs,
        b.bound * (1.0 + 1e-12),
    ));
    finish(out, report)
}

#[derive(Args)]
pub struct PlArgs {
    #[command(flatten)]
    cyl: CylinderArgs,
    /// Threshold c of the low/high eigenvalue split λ < c/δ².
    #[arg(long, default_value_t = 1.0)]
    threshold: f64,
}

pub fn pl(g: &GlobalOpts, a: PlArgs) -> Result<bool> {
    let mut out = OutDir::resolve(g.out.clone());
    let spec = load_cylinder(&a.cyl.spec)?;
    let mut report = Report::default();
    let mut t = Table::new(&["function", "amplitude", "max_u", "bound", "ratio"]);
    let first = harmonic_basis(&spec, 1, Parity::Even)?;
    let (_, gn) = harmonic_measure(&spec);
    for (name, u) in [("first-mode", &first), ("measure", &gn)] {
        let r = verify_pl(&spec, u)?;
        t.row(cells![name, r.amplitude, r.max_u, r.bound, r.ratio]);
        report.push(Verdict::at_least(format!("pl1-{name}"), r.max_u, r.bound));
    }
    out.write("pl.csv", &t.into_string())?;

    let p = pl_constant_partition_report(&spec, a.threshold)?;
    let mut t = Table::new(&[
        "c", "c0", "d", "i1_count", "i2_count", "i1_sum", "i1_bound", "i2_sum", "i2_bound",
        "cube_side", "growth_ratio", "c_omega",
    ]);
    t.row(cells![
        p.c, p.c0, p.d, p.i1_count, p.i2_count, p.i1_sum, p.i1_bound, p.i2_sum, p.i2_bound,
        p.cube_side, p.growth_ratio, p.c_omega
    ]);
    out.write("pl_partition.csv", &t.into_string())?;
    let mut t = Table::new(&["l", "count", "base_count", "cube_count"]);
    let mut shell_excess = 0.0f64;
    for s in &p.shells {
        t.row(cells![s.l, s.count, s.base_count, s.cube_count]);
        shell_excess = shell_excess.max(s.count as f64 / s.cube_count as f64);
        shell_excess = shell_excess.max(s.base_count as f64 / s.cube_count as f64);
    }
    out.write("pl_shells.csv", &t.into_string())?;
    println!("# growth_ratio={} c_omega={}", p.growth_ratio, p.c_omega);
    let rel = 1.0 + 1e-12;
    report.push(Verdict::at_most("partition-low", p.i1_sum, p.i1_bound * rel));
    report.push(Verdict::at_most("partition-high", p.i2_sum, p.i2_bound * rel));
    report.push(Verdict::at_most("shell-count-vs-cube", shell_excess, 1.0));
    finish(out, report)
}

#[derive(Args)]
pub struct StabilityArgs {
    #[command(flatten)]
    cyl: CylinderArgs,
    #[arg(long, default_value_t = 50)]
    instances: u64,
    /// Caps data drawn from [−M, M].
    #[arg(long, value_name = "M", default_value_t = 1.0)]
    cap_bound: f64,
    /// Wall data drawn from [−F, F].
    #[arg(long, value_name = "F", default_value_t = 0.1)]
    wall_bound: f64,
}

/// Random boundary data: wall values in `[−f, f]`, caps in `[−m, m]`.
pub fn random_cylinder_data(spec: &CylinderSpec, rng: &mut ChaCha8Rng, f: f64, m: f64) -> Vec<f64> {
    let k = spec.domain().num_interior();
    let draw = |rng: &mut ChaCha8Rng, r: f64| if r > 0.0 { rng.random_range(-r..=r) } else { 0.0 };
    (k..spec.domain().len())
        .map(|i| match spec.region(i) {
            Region::Cap { .. } => draw(rng, m),
            _ => draw(rng, f),
        })
        .collect()
}

pub fn stability(g: &GlobalOpts, a: StabilityArgs) -> Result<bool> {
    if !(a.cap_bound >= 0.0 && a.wall_bound >= 0.0) {
        bail!("--cap-bound and --wall-bound must be non-negative");
    }
    let mut out = OutDir::resolve(g.out.clone());
    let spec = load_cylinder(&a.cyl.spec)?;
    let solver = DirichletSolver::new(spec.domain().clone())?;
    let wall = spec.wall_positions();
    let mut t = Table::new(&["instance", "max_wall", "measured", "bound", "ratio"]);
    let (mut violations, mut worst) = (0u64, 0.0f64);
    for i in 0..a.instances {
        let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
        rng.set_stream(i);
        let b = random_cylinder_data(&spec, &mut rng, a.wall_bound, a.cap_bound);
        let h = solver.solve(&b)?;
        let wall_data: Vec<f64> = wall.iter().map(|&p| b[p]).collect();
        let sb = stability_bound(&spec, &wall_data, a.cap_bound)?;
        let measured = mid_layer_max_abs(&spec, &h);
        let ratio = if sb.bound > 0.0 { measured / sb.bound } else { 0.0 };
        if measured > sb.bound * (1.0 + 1e-12) {
            violations += 1;
        }
        worst = worst.max(ratio);
        t.row(cells![i, sb.max_wall, measured, sb.bound, ratio]);
    }
    out.write("stability.csv", &t.into_string())?;
    let mut report = Report::default();
    report.push(Verdict::at_most("stability-violations", violations as f64, 0.0));
    report.push(Verdict::at_most("stability-worst-ratio", worst, 1.0 + 1e-12));
    finish(out, report)
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Target {
    Caps,
    Wall,
    All,
}

#[derive(Args)]
pub struct McArgs {
    #[command(flatten)]
    cyl: CylinderArgs,
    /// Start point in lattice coordinates, comma separated (e.g. 1,0).
    #[arg(long)]
    start: String,
    #[arg(long, value_enum, default_value = "caps")]
    target: Target,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long)]
    max_steps: Option<u64>,
}

pub fn mc(g: &GlobalOpts, a: McArgs) -> Result<bool> {
    let mut out = OutDir::resolve(g.out.clone());
    let spec = load_cylinder(&a.cyl.spec)?;
    let start = LatticePoint::new(
        a.start
            .split(',')
            .map(|s| s.trim().parse::<i64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| anyhow!("--start: {e}"))?,
    );
    let d = spec.domain();
    let target: Vec<usize> = match a.target {
        Target::Caps => spec.cap_positions(),
        Target::Wall => spec.wall_positions(),
        Target::All => (0..d.num_boundary()).collect(),
    };
    let cfg = WalkConfig {
        seed: g.seed,
        samples: a.samples,
        max_steps: a.max_steps,
    };
    let e = estimate_exit_probability(d, &start, &target, &cfg)?;
    let mut indicator = vec![0.0; d.num_boundary()];
    for &t in &target {
        indicator[t] = 1.0;
    }
    let exact = DirichletSolver::new(d.clone())?
        .solve(&indicator)?
        .value_at(&start)
        .expect("start checked by the estimator");
    let mut t = Table::new(&[
        "estimate", "stderr", "samples", "hits", "stopped", "stop_fraction", "direct",
    ]);
    t.row(cells![e.estimate, e.stderr, e.samples, e.hits, e.stopped, e.stop_fraction(), exact]);
    out.write("mc.csv", &t.into_string())?;
    let mut report = Report::default();
    report.push(Verdict::at_most(
        "mc-vs-direct",
        (e.estimate - exact).abs(),
        4.0 * e.stderr + g.tol.unwrap_or(0.0),
    ));
    report.push(Verdict::at_most("mc-stop-fraction", e.stop_fraction(), 1e-4));
    finish(out, report)
}
