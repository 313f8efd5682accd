//! Parameter sweeps driven by a JSON config:
//!
//! ```json
//! {
//!   "measure":    { "base": <domain>, "denominators": [4, 8], "half_lengths": [1, 2, 3, 4] },
//!   "refinement": { "denominators": [8, 16, 32, 64] },
//!   "strip":      { "layers": [2, 4, 8], "instances": 5, "support": 3 }
//! }
//! ```
//!
//! Every section is optional. Rows come out in config order.

use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{bail, Result};
use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use lattice_harmonic::cylinder::{harmonic_measure, mid_layer_measure, pl_lower_bound, CylinderSpec};
use lattice_harmonic::dirichlet::DirichletSolver;
use lattice_harmonic::spectral::{a_of_lambda, dirichlet_spectrum};
use lattice_harmonic::strip::{
    layer_sq_norm, solve_strip_with, three_line_table, StripBoundaryData, StripOptions, QUAD_TOL,
};
use lattice_harmonic::{DomainShape, DomainSpec, GridDomain, Mesh};

use crate::cells;
use crate::commands::{default_strip_window, finish, interior_three_line_ratio};
use crate::io::{read_json, OutDir, Table};
use crate::verdict::{Report, Verdict};
use crate::GlobalOpts;

#[derive(Args)]
pub struct SweepArgs {
    /// Sweep config JSON.
    #[arg(long)]
    config: PathBuf,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub measure: Option<MeasureSweep>,
    #[serde(default)]
    pub refinement: Option<RefinementSweep>,
    #[serde(default)]
    pub strip: Option<StripSweep>,
}

/// Harmonic-measure decay over `δ × N`. The base must be a box given by
/// `side_lengths` so that it can be re-meshed.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSweep {
    pub base: DomainSpec,
    pub denominators: Vec<u32>,
    pub half_lengths: Vec<f64>,
}

/// First rate of the unit interval on refining meshes.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefinementSweep {
    pub denominators: Vec<u32>,
}

/// Random strip instances with data supported in `|j| ≤ support`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StripSweep {
    pub layers: Vec<u32>,
    pub instances: u64,
    #[serde(default = "default_support")]
    pub support: i64,
}

fn default_support() -> i64 {
    3
}

fn status(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn remesh(base: &DomainSpec, den: u32) -> Result<DomainSpec> {
    match &base.shape {
        DomainShape::Box {
            side_lengths: Some(_),
            side_steps: None,
        } => Ok(DomainSpec {
            mesh_denominator: den,
            ..base.clone()
        }),
        _ if base.mesh_denominator == den => Ok(base.clone()),
        _ => bail!("measure.base: only boxes given by side_lengths can be re-meshed"),
    }
}

fn measure_sweep(cfg: &MeasureSweep, tol: f64, out: &mut OutDir, report: &mut Report) -> Result<()> {
    let mut t = Table::new(&[
        "denominator", "delta", "N", "K", "lambda1", "a1", "max_g_mid", "scaled", "growth_ratio",
        "c_omega", "direct_diff", "status",
    ]);
    let mut scaled_all = Vec::new();
    let mut rows_pass = true;
    for &den in &cfg.denominators {
        let base = Arc::new(remesh(&cfg.base, den)?.build()?);
        let spectrum = dirichlet_spectrum(base)?;
        for &n in &cfg.half_lengths {
            let steps = n * f64::from(den);
            if !(steps >= 1.0) || (steps - steps.round()).abs() > 1e-9 {
                bail!("measure.half_lengths: {n} is not a positive multiple of 1/{den}");
            }
            let spec = CylinderSpec::with_spectrum(spectrum.clone(), steps.round() as u64)?;
            let (exp, g) = harmonic_measure(&spec);
            let direct = DirichletSolver::new(spec.domain().clone())?.solve(&spec.cap_indicator())?;
            let diff = g
                .values()
                .iter()
                .zip(direct.values())
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            let max_mid = mid_layer_measure(&spec, &exp).into_iter().fold(0.0, f64::max);
            let a1 = spec.rates()[0].a;
            let scaled = max_mid * (a1 * spec.half_length()).exp();
            let pl = pl_lower_bound(&spec, 1.0)?;
            let pass = diff <= tol;
            rows_pass &= pass;
            scaled_all.push(scaled);
            t.row(cells![
                den,
                1.0 / f64::from(den),
                spec.half_length(),
                spec.k(),
                spec.spectrum().eigenvalues()[0],
                a1,
                max_mid,
                scaled,
                pl.growth_ratio,
                pl.c_omega,
                diff,
                status(pass)
            ]);
        }
    }
    out.write("sweep_measure.csv", &t.into_string())?;
    if !scaled_all.is_empty() {
        let worst = scaled_all.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let least = scaled_all.iter().copied().fold(f64::INFINITY, f64::min);
        report.push(Verdict::at_most("measure-rows", (!rows_pass) as u8 as f64, 0.0));
        // exp(−a₁N) decay with an N- and δ-uniform constant: the scaled
        // values neither grow nor shrink by more than a factor of two.
        report.push(Verdict::at_most("pl2-uniform", worst, 2.0 * least));
    }
    Ok(())
}

fn refinement_sweep(cfg: &RefinementSweep, out: &mut OutDir, report: &mut Report) -> Result<()> {
    let mut t = Table::new(&["denominator", "delta", "a1", "error", "reduction", "status"]);
    let mut prev: Option<(f64, f64)> = None;
    let mut pass_all = true;
    for &den in &cfg.denominators {
        let mesh = Mesh::new(den, 1)?;
        let s = dirichlet_spectrum(Arc::new(GridDomain::box_domain(mesh, &[1])?))?;
        let a1 = a_of_lambda(s.eigenvalues()[0], &mesh)?.a;
        let err = (a1 - std::f64::consts::PI).abs();
        let (reduction, pass) = match prev {
            Some((pa, pe)) => (pe / err, a1 > pa && pe / err >= 3.0),
            None => (f64::NAN, true),
        };
        pass_all &= pass;
        t.row(cells![den, 1.0 / f64::from(den), a1, err, reduction, status(pass)]);
        prev = Some((a1, err));
    }
    out.write("sweep_refinement.csv", &t.into_string())?;
    if cfg.denominators.len() > 1 {
        report.push(Verdict::at_most("a1-refinement-rows", (!pass_all) as u8 as f64, 0.0));
    }
    Ok(())
}

/// Random data on `|j| ≤ support` for both layers, from stream `stream`.
pub fn random_strip(layers: u32, support: i64, seed: u64, stream: u64) -> Result<StripBoundaryData> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let layer = |rng: &mut ChaCha8Rng| -> Vec<(Vec<i64>, f64)> {
        (-support..=support)
            .map(|j| (vec![j], rng.random_range(-1.0..1.0)))
            .collect()
    };
    let bottom = layer(&mut rng);
    let top = layer(&mut rng);
    Ok(StripBoundaryData::new(layers, 1, bottom, top)?)
}

fn strip_sweep(
    cfg: &StripSweep,
    g: &GlobalOpts,
    out: &mut OutDir,
    report: &mut Report,
) -> Result<()> {
    if cfg.support < 0 {
        bail!("strip.support must be non-negative");
    }
    let mut t = Table::new(&[
        "layers", "instance", "three_line_ratio", "max_layer_sq_norm", "boundary_sq_sum", "status",
    ]);
    let mut worst_ratio = 0.0f64;
    let mut worst_norm_ratio = 0.0f64;
    let mut any = false;
    for &l in &cfg.layers {
        for i in 0..cfg.instances {
            let data = random_strip(l, cfg.support, g.seed, (u64::from(l) << 32) | i)?;
            let mut opts = StripOptions::new(g.quad.unwrap_or(4 * data.support_width()));
            opts.tol = QUAD_TOL;
            opts.window_radius = default_strip_window(&data);
            let sol = solve_strip_with(&data, &opts)?;
            let ratio = interior_three_line_ratio(&three_line_table(&sol)?);
            let mut norm = 0.0f64;
            for k in 1..l as usize {
                let n = layer_sq_norm(&sol, k)?;
                norm = norm.max(n.window + n.remainder);
            }
            let s = data.bottom_sq_norm() + data.top_sq_norm();
            let pass = ratio <= 1.0 + 1e-9 && norm <= s + 1e-9;
            worst_ratio = worst_ratio.max(ratio);
            worst_norm_ratio = worst_norm_ratio.max(norm / (s + 1e-9));
            any = true;
            t.row(cells![l, i, ratio, norm, s, status(pass)]);
        }
    }
    out.write("sweep_strip.csv", &t.into_string())?;
    if any {
        report.push(Verdict::at_most("three-line-ratio", worst_ratio, 1.0 + 1e-9));
        report.push(Verdict::at_most("layer-sq-norm-ratio", worst_norm_ratio, 1.0));
    }
    Ok(())
}

pub fn run(g: &GlobalOpts, a: SweepArgs) -> Result<bool> {
    let cfg: SweepConfig = read_json(&a.config)?;
    let mut out = OutDir::resolve(g.out.clone());
    let mut report = Report::default();
    if let Some(m) = &cfg.measure {
        measure_sweep(m, g.tol.unwrap_or(1e-9), &mut out, &mut report)?;
    }
    if let Some(r) = &cfg.refinement {
        refinement_sweep(r, &mut out, &mut report)?;
    }
    if let Some(s) = &cfg.strip {
        strip_sweep(s, g, &mut out, &mut report)?;
    }
    finish(out, report)
}
