use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde_json::{json, Value};

use liouville::criticality::{self, BinderEvaluator, BinderOptions};
use liouville::dynamics::{self, EvolveOptions, FourierOptions, UnravelOptions};
use liouville::linalg::trace_distance;
use liouville::mcm::{self, Checkpoint, McmInit, McmOptions};
use liouville::meanfield::{self, Axis, Beta, SolveOptions};
use liouville::spectral::{self, check_symmetries};
use liouville::superket::devectorize;
use liouville::{thermal, verify, Error, Frame, LiouvilleParams};

use crate::output::RunContext;
use crate::{DEFAULT_MEM_LIMIT_MB, MEM_LIMIT_ENV};

pub struct Outcome {
    pub convergence: Value,
    /// `false` turns into exit code 1 after the outputs are written.
    pub passed: bool,
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParams(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

type Run = Result<Outcome, Failure>;

fn ok(convergence: Value) -> Run {
    Ok(Outcome { convergence, passed: true })
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FrameArg {
    Original,
    Transformed,
}

impl From<FrameArg> for Frame {
    fn from(f: FrameArg) -> Self {
        match f {
            FrameArg::Original => Frame::Original,
            FrameArg::Transformed => Frame::Transformed,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum InitArg {
    Symmetric,
    Ferro,
}

/// `min,max,count`.
fn parse_axis(s: &str) -> Result<Axis, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected min,max,count, got {s:?}"));
    }
    let min: f64 = parts[0].parse().map_err(|_| format!("bad min {:?}", parts[0]))?;
    let max: f64 = parts[1].parse().map_err(|_| format!("bad max {:?}", parts[1]))?;
    let count: usize = parts[2].parse().map_err(|_| format!("bad count {:?}", parts[2]))?;
    Axis::new(min, max, count).map_err(|e| e.to_string())
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected lo,hi, got {s:?}"))?;
    let lo: f64 = a.trim().parse().map_err(|_| format!("bad number {a:?}"))?;
    let hi: f64 = b.trim().parse().map_err(|_| format!("bad number {b:?}"))?;
    if !(lo < hi) {
        return Err(format!("need lo < hi, got {s:?}"));
    }
    Ok((lo, hi))
}

/// Comma-separated chain sizes.
#[derive(Clone, Debug)]
pub struct Sizes(pub Vec<usize>);

fn parse_sizes(s: &str) -> Result<Sizes, String> {
    s.split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|_| format!("bad size {x:?}")))
        .collect::<Result<_, _>>()
        .map(Sizes)
}

fn parse_beta(s: &str) -> Result<Beta<f64>, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Refuses runs whose estimated working set exceeds the memory guard.
fn memory_guard(what: &str, bytes: f64) -> Result<(), Failure> {
    let limit_mb = std::env::var(MEM_LIMIT_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<u64>().ok())
        .unwrap_or(DEFAULT_MEM_LIMIT_MB);
    let mb = bytes / (1024.0 * 1024.0);
    if mb > limit_mb as f64 {
        return Err(Failure::Numerical(format!(
            "{what} needs about {mb:.0} MiB, above the {limit_mb} MiB guard (set {MEM_LIMIT_ENV} to raise it)"
        )));
    }
    Ok(())
}

fn superket_bytes(n: usize) -> f64 {
    16.0 * 4f64.powi(n as i32)
}

fn dense_bytes(n: usize) -> f64 {
    // the matrix, both eigenvector sets and solver workspace
    5.0 * 16.0 * 16f64.powi(n as i32)
}

pub fn dispatch(cmd: &crate::Command, ctx: &mut RunContext) -> Run {
    use crate::Command::*;
    match cmd {
        Spectrum(a) => spectrum(a, ctx),
        Mcm(a) => mcm_cmd(a, ctx),
        Meanfield(a) => meanfield_cmd(a, ctx),
        Thermal(a) => thermal_cmd(a, ctx),
        Binder(a) => binder(a, ctx),
        Dynamics(a) => dynamics_cmd(a, ctx),
        Unravel(a) => unravel(a, ctx),
        Verify(a) => verify_cmd(a, ctx),
    }
}

/// Eigenvalues in the complex plane, with steady modes flagged; the
/// cluster structure around `-2JN - i gamma N` is the g = 0 ladder split
/// by the field.
#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct SpectrumArgs {
    #[arg(long = "N", default_value_t = 4)]
    pub n: usize,
    #[arg(long = "J", default_value_t = 1.0)]
    pub j: f64,
    #[arg(long, default_value_t = 0.3)]
    pub g: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long, value_enum, default_value = "original")]
    pub frame: FrameArg,
    /// Also write cat-state overlaps `|(rho_ini|R_a)|` (even N).
    #[arg(long)]
    pub overlaps: bool,
}

fn spectrum(a: &SpectrumArgs, ctx: &mut RunContext) -> Run {
    let p = LiouvilleParams::new(a.n, a.j, a.g, a.gamma, a.frame.into())?;
    memory_guard("dense spectrum", dense_bytes(a.n))?;
    let spec = spectral::full_spectrum(&p)?;
    ctx.write_file("spectrum.csv", |w| spec.write_csv(w))?;
    if a.overlaps {
        let cat = dynamics::cat_state(a.n)?;
        let ov = dynamics::overlap_spectrum(&cat, &spec)?;
        ctx.write_file("overlaps.csv", |w| dynamics::write_overlaps_csv(&ov, w))?;
    }
    let sym = check_symmetries(&spec, &p, 1e-8);
    let mcm = spec.eigenvalues[spec.most_coherent()];
    ok(json!({
        "dim": spec.eigenvalues.len(),
        "max_residual": spec.max_residual,
        "biorthonormality_residual": spec.biorthonormality_residual(),
        "condition": spec.condition,
        "clusters": spec.clusters.len(),
        "defective_clusters": spec.defective_clusters.len(),
        "steady_modes": spec.eigenvalues.iter().filter(|z| z.norm() < spec.zero_tol).count(),
        "most_coherent": [mcm.re, mcm.im],
        "symmetries_passed": sym.passed(),
        "conjugation_mismatch": sym.conjugation.max_mismatch,
        "pt_mismatch": sym.pt_dihedral.max_mismatch,
    }))
}

/// Most coherent eigenvalue and mode (transformed frame, even N).
#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct McmArgs {
    #[arg(long = "N", default_value_t = 4)]
    pub n: usize,
    #[arg(long = "J", default_value_t = 1.0)]
    pub j: f64,
    #[arg(long, default_value_t = 0.3)]
    pub g: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Step size; default `dt_factor / (2JN + 2 gamma N + gN)`.
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 0.9)]
    pub dt_factor: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 200_000)]
    pub max_steps: usize,
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "symmetric")]
    pub init: InitArg,
    /// Start from a checkpoint instead of `--init`.
    #[arg(long, value_name = "FILE")]
    pub resume: Option<PathBuf>,
    /// Write the final state as a checkpoint.
    #[arg(long, value_name = "FILE")]
    pub checkpoint: Option<PathBuf>,
    /// Log the eigenvalue estimate every this many steps (0 = off).
    #[arg(long, default_value_t = 0)]
    pub log_every: usize,
    /// Propagate with the adjoint to get the left mode.
    #[arg(long)]
    pub left: bool,
}

fn mcm_cmd(a: &McmArgs, ctx: &mut RunContext) -> Run {
    let p = LiouvilleParams::new(a.n, a.j, a.g, a.gamma, Frame::Transformed)?;
    p.require_even()?;
    memory_guard("most-coherent-mode propagation", 8.0 * superket_bytes(a.n))?;
    let init = match (&a.resume, a.init) {
        (Some(path), _) => {
            let ck = mcm::read_checkpoint(path)?;
            if ck.params.n_spins != a.n || ck.params.frame != Frame::Transformed {
                return Err(Failure::Usage(format!("checkpoint {} is for a different N or frame", path.display())));
            }
            McmInit::Custom(ck.state)
        }
        (None, InitArg::Ferro) => McmInit::Ferro,
        (None, InitArg::Symmetric) => McmInit::Symmetric {
            seed: a.seed,
            perturbation: 1e-3,
        },
    };
    let opts = McmOptions {
        dt: a.dt,
        dt_factor: a.dt_factor,
        tol: a.tol,
        max_steps: a.max_steps,
        init,
        log_every: a.log_every,
    };
    let r = mcm::propagate_mcm(&p, &opts, a.left)?;
    let binder = criticality::binder_cumulant(&r.mode).ok();
    ctx.write_file("mcm.csv", |w| {
        writeln!(w, "n,j,g,gamma,re_lambda,im_lambda,residual,iterations,converged,u4")?;
        writeln!(
            w,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{},{:.16e}",
            a.n,
            a.j,
            a.g,
            a.gamma,
            r.eigenvalue.re,
            r.eigenvalue.im,
            r.residual,
            r.iterations,
            r.converged as u8,
            binder.map_or(f64::NAN, |b| b.u4)
        )?;
        Ok(())
    })?;
    if a.log_every > 0 {
        ctx.write_file("mcm_log.csv", |w| mcm::write_log_csv(&r.log, w))?;
    }
    if let Some(path) = &a.checkpoint {
        mcm::write_checkpoint(
            path,
            &Checkpoint {
                params: p,
                iteration: r.iterations as u64,
                state: r.mode.clone(),
            },
        )?;
    }
    Ok(Outcome {
        convergence: json!({
            "eigenvalue": [r.eigenvalue.re, r.eigenvalue.im],
            "residual": r.residual,
            "iterations": r.iterations,
            "dt": r.dt,
            "converged": r.converged,
        }),
        passed: r.converged,
    })
}

/// Mean-field order parameter over `(gamma, g)`; at finite beta the
/// ordered region is bounded in gamma and periodic with period pi/beta.
#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct MeanfieldArgs {
    /// Coordination number times J.
    #[arg(long = "J", default_value_t = 1.0)]
    pub j: f64,
    /// Inverse temperature, or `inf`.
    #[arg(long, default_value = "inf", value_parser = parse_beta)]
    pub beta: Beta<f64>,
    /// gamma axis `min,max,count`.
    #[arg(long, default_value = "0,4,41", value_parser = parse_axis)]
    pub gamma_grid: Axis,
    /// g axis `min,max,count`.
    #[arg(long, default_value = "0,3,61", value_parser = parse_axis)]
    pub g_grid: Axis,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 2000)]
    pub max_steps: usize,
    #[arg(long, default_value_t = 0.5)]
    pub mixing: f64,
}

fn meanfield_cmd(a: &MeanfieldArgs, ctx: &mut RunContext) -> Run {
    let opts = SolveOptions {
        mixing: a.mixing,
        tol: a.tol,
        max_iter: a.max_steps,
        ..Default::default()
    };
    let d = meanfield::sweep_phase_diagram(a.gamma_grid, a.g_grid, a.j, a.beta, &opts)?;
    ctx.write_file("meanfield.csv", |w| d.write_csv(w))?;
    let solved: Vec<_> = d.cells.iter().filter_map(|c| c.state.as_ref()).collect();
    let converged = solved.iter().filter(|s| s.converged).count();
    let ordered = solved
        .iter()
        .filter(|s| s.converged && s.m().norm() > meanfield::ORDER_THRESHOLD)
        .count();
    let worst_conj = solved.iter().filter(|s| s.converged).map(|s| s.conjugation_error()).fold(0.0, f64::max);
    ok(json!({
        "cells": d.cells.len(),
        "solved": solved.len(),
        "converged": converged,
        "ordered": ordered,
        "max_conjugation_error": worst_conj,
    }))
}

/// Canonical-average magnetization `sqrt(Re <(M_+^z)^2>_beta)` heatmap.
#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct ThermalArgs {
    #[arg(long = "N", default_value_t = 4)]
    pub n: usize,
    #[arg(long = "J", default_value_t = 1.0)]
    pub j: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value = "0,4,21", value_parser = parse_axis)]
    pub gamma_grid: Axis,
    #[arg(long, default_value = "0,3,31", value_parser = parse_axis)]
    pub g_grid: Axis,
}

fn thermal_cmd(a: &ThermalArgs, ctx: &mut RunContext) -> Run {
    memory_guard("dense canonical average", dense_bytes(a.n) * ctx.workers as f64)?;
    let map = thermal::thermal_heatmap(a.n, a.j, a.beta, a.gamma_grid, a.g_grid)?;
    ctx.write_file("thermal.csv", |w| map.write_csv(w))?;
    let ok_cells: Vec<_> = map.cells.iter().filter_map(|c| c.result.as_ref()).collect();
    let clipped = ok_cells.iter().filter(|r| r.clipped).count();
    let failed = map.cells.len() - ok_cells.len();
    Ok(Outcome {
        convergence: json!({ "cells": map.cells.len(), "failed": failed, "clipped": clipped }),
        passed: failed == 0,
    })
}

/// Binder-cumulant crossings of consecutive sizes and the extrapolated
/// critical field.
#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct BinderArgs {
    #[arg(long = "J", default_value_t = 1.0)]
    pub j: f64,
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
    /// Even sizes stepping by 2.
    #[arg(long, default_value = "4,6,8", value_parser = parse_sizes)]
    pub sizes: Sizes,
    #[arg(long, default_value = "0.8,1.5", value_parser = parse_pair)]
    pub bracket: (f64, f64),
    /// Residual tolerance of each most-coherent-mode solve.
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    #[arg(long, default_value_t = 200_000)]
    pub max_steps: usize,
    /// Target width of each crossing bracket.
    #[arg(long, default_value_t = 1e-3)]
    pub g_tol: f64,
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
}

fn binder(a: &BinderArgs, ctx: &mut RunContext) -> Run {
    let n_max = a.sizes.0.iter().copied().max().unwrap_or(0);
    let base = BinderOptions::default();
    memory_guard(
        "Binder evaluation",
        (8.0 + base.cache_per_size as f64) * superket_bytes(n_max),
    )?;
    let opts = BinderOptions {
        mcm: McmOptions {
            tol: a.tol,
            max_steps: a.max_steps,
            init: McmInit::Symmetric {
                seed: a.seed,
                perturbation: 1e-3,
            },
            ..base.mcm.clone()
        },
        g_tol: a.g_tol,
        ..base
    };
    let mut ev = BinderEvaluator::new(a.j, a.gamma, opts)?;
    let res = criticality::critical_field(&mut ev, &a.sizes.0, a.bracket);
    ctx.write_file("binder_points.csv", |w| criticality::write_points_csv(&ev.history, w))?;
    let (crossings, curve) = res?;
    ctx.write_file("binder_crossings.csv", |w| {
        writeln!(w, "n_small,n_large,g_c,bracket_lo,bracket_hi,probes,skipped")?;
        for c in &crossings {
            writeln!(
                w,
                "{},{},{:.16e},{:.16e},{:.16e},{},{}",
                c.n - 2,
                c.n,
                c.g_c,
                c.bracket.0,
                c.bracket.1,
                c.probes.len(),
                c.skipped
            )?;
        }
        Ok(())
    })?;
    ctx.write_file("binder_summary.txt", |w| criticality::write_summary(&curve, &crossings, w))?;
    println!("g_c = {:.6}", curve.g_c);
    ok(json!({
        "g_c": curve.g_c,
        "fit": { "a": curve.a, "b": curve.b, "c": curve.c, "residual": curve.residual },
        "fallback": curve.fallback,
        "crossings": crossings.iter().map(|c| json!([c.n, c.g_c])).collect::<Vec<_>>(),
        "solves": ev.history.len(),
        "max_solve_residual": ev.history.iter().map(|p| p.residual).fold(0.0, f64::max),
    }))
}

/// Cat-state fidelity and its Fourier transform; the peak near
/// `omega = 2NJ` marks coherent ferro/Neel oscillation.
#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct DynamicsArgs {
    #[arg(long = "N", default_value_t = 6)]
    pub n: usize,
    #[arg(long = "J", default_value_t = 1.0)]
    pub j: f64,
    #[arg(long, default_value_t = 0.2)]
    pub g: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// End of the window in units of `tJN`.
    #[arg(long, default_value_t = 20.0)]
    pub t_max: f64,
    /// Output grid intervals.
    #[arg(long, default_value_t = 2000)]
    pub steps: usize,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 0.02)]
    pub dt_factor: f64,
    /// Also write the eigenmode overlaps of the cat state (dense).
    #[arg(long)]
    pub overlaps: bool,
}

fn dynamics_cmd(a: &DynamicsArgs, ctx: &mut RunContext) -> Run {
    let p = LiouvilleParams::new(a.n, a.j, a.g, a.gamma, Frame::Original)?;
    if a.steps < 2 || !(a.t_max > 0.0) {
        return Err(Failure::Usage("need --steps >= 2 and --t-max > 0".into()));
    }
    memory_guard("real-time evolution", 8.0 * superket_bytes(a.n))?;
    let cat = dynamics::cat_state(a.n)?;
    let grid = dynamics::uniform_grid(a.t_max / (a.j * a.n as f64), a.steps);
    let opts = EvolveOptions {
        dt: a.dt,
        dt_factor: a.dt_factor,
        ..Default::default()
    };
    let traj = dynamics::fidelity_trajectory(&cat, &p, &grid, &opts)?;
    ctx.write_file("fidelity.csv", |w| traj.write_csv(w))?;
    let spec = dynamics::fourier_fidelity(&traj, &FourierOptions::default())?;
    ctx.write_file("fourier.csv", |w| spec.write_csv(w))?;
    if a.overlaps {
        memory_guard("dense spectrum", dense_bytes(a.n))?;
        let full = spectral::full_spectrum(&p)?;
        let ov = dynamics::overlap_spectrum(&cat, &full)?;
        ctx.write_file("overlaps.csv", |w| dynamics::write_overlaps_csv(&ov, w))?;
    }
    let peak = spec.peak_in(1.5, 2.5).map(|(k, prom)| json!({ "omega_over_nj": spec.scaled_omega[k], "prominence": prom }));
    ok(json!({
        "dt": traj.stats.dt,
        "steps": traj.stats.steps,
        "max_trace_drift": traj.stats.max_trace_drift,
        "max_hermiticity_drift": traj.stats.max_hermiticity_drift,
        "f_final": traj.fidelity.last(),
        "plateau": spec.plateau,
        "noise_floor": spec.noise_floor,
        "peak_near_2": peak,
    }))
}

/// Trace distance between the trajectory average and the master equation.
#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct UnravelArgs {
    #[arg(long = "N", default_value_t = 2)]
    pub n: usize,
    #[arg(long = "J", default_value_t = 1.0)]
    pub j: f64,
    #[arg(long, default_value_t = 1.0)]
    pub g: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Final time in units of `1/J`.
    #[arg(long, default_value_t = 2.0)]
    pub t_max: f64,
    /// Output grid intervals.
    #[arg(long, default_value_t = 20)]
    pub steps: usize,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    #[arg(long, default_value_t = 1000)]
    pub n_traj: usize,
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
}

fn unravel(a: &UnravelArgs, ctx: &mut RunContext) -> Run {
    let p = LiouvilleParams::new(a.n, a.j, a.g, a.gamma, Frame::Original)?;
    if a.steps == 0 {
        return Err(Failure::Usage("need --steps >= 1".into()));
    }
    // snap the grid to multiples of dt
    let per = ((a.t_max / a.dt) / a.steps as f64).round().max(1.0) as usize;
    let grid: Vec<f64> = (0..=a.steps).map(|k| (k * per) as f64 * a.dt).collect();
    let cat = dynamics::cat_state(a.n)?;
    let opts = UnravelOptions {
        dt: a.dt,
        n_traj: a.n_traj,
        seed: a.seed,
        ..Default::default()
    };
    let un = dynamics::unravel_trajectories(&cat.psi, &p, &grid, &opts)?;
    let me = dynamics::evolve_real_time(&cat.rho, &p, &grid, &EvolveOptions::default())?;
    let dist = un
        .rho
        .iter()
        .zip(&me.states)
        .map(|(r, s)| trace_distance(r, &devectorize(s)))
        .collect::<liouville::Result<Vec<_>>>()?;
    ctx.write_file("unravel.csv", |w| {
        writeln!(w, "t,trace_distance")?;
        for (t, d) in grid.iter().zip(&dist) {
            writeln!(w, "{t:.16e},{d:.16e}")?;
        }
        Ok(())
    })?;
    ok(json!({
        "n_traj": un.n_traj,
        "final_trace_distance": dist.last(),
        "max_trace_distance": dist.iter().copied().fold(0.0, f64::max),
        "t_final": grid.last(),
    }))
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}

fn verify_cmd(a: &VerifyArgs, ctx: &mut RunContext) -> Run {
    let report = verify::run_full(a.seed);
    ctx.write_file("verify.txt", |w| report.write_text(w))?;
    report.write_text(std::io::stdout())?;
    let failures: Vec<_> = report.failures().iter().map(|c| format!("{} (N={})", c.name, c.n)).collect();
    Ok(Outcome {
        convergence: json!({ "checks": report.checks.len(), "failures": failures }),
        passed: report.passed(),
    })
}
