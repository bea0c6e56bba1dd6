//! Real-time evolution of the cat state, fidelity and its spectrum,
//! eigenmode overlaps, and a stochastic-field unraveling used as an
//! independent check of the master equation.

use std::io::Write;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::operator::{apply_frame_transform, bond_sum, FrameDirection, Liouvillian};
use crate::params::{Frame, LiouvilleParams};
use crate::spectral::Spectrum;
use crate::superket::{configs, devectorize, Superket};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `rho_ini = |psi><psi|` with `psi = (|F> + |Neel>) / sqrt 2`, in the
/// original frame.
#[derive(Clone, Debug)]
pub struct CatState {
    pub n: usize,
    pub psi: Vec<Complex64>,
    pub rho: Superket<f64>,
}

pub fn cat_state(n: usize) -> Result<CatState> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::InvalidParams(format!("cat state needs even N, got {n}")));
    }
    let mut psi = vec![ZERO; 1 << n];
    let h = std::f64::consts::FRAC_1_SQRT_2;
    psi[configs::all_up(n)] = Complex64::new(h, 0.0);
    psi[configs::neel(n)] = Complex64::new(h, 0.0);
    let rho = Superket::outer(&psi, &psi)?;
    Ok(CatState { n, psi, rho })
}

impl CatState {
    /// `tr[rho^2]`.
    pub fn purity(&self) -> f64 {
        self.rho.norm_sqr()
    }

    /// The density superket in `frame`.
    pub fn in_frame(&self, frame: Frame) -> Result<Superket<f64>> {
        match frame {
            Frame::Original => Ok(self.rho.clone()),
            Frame::Transformed => apply_frame_transform(&self.rho, FrameDirection::ToTransformed),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EvolveOptions {
    /// Step size; `None` picks `dt_factor / (2JN + 2 gamma N + gN)`.
    pub dt: Option<f64>,
    pub dt_factor: f64,
    /// Largest tolerated `|tr rho_t - tr rho_0|`.
    pub drift_tol: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            dt: None,
            dt_factor: 0.02,
            drift_tol: 1e-6,
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct EvolveStats {
    pub dt: f64,
    pub steps: usize,
    pub max_trace_drift: f64,
    pub max_hermiticity_drift: f64,
}

fn check_grid(t: &[f64]) -> Result<()> {
    if t.is_empty() {
        return Err(Error::InvalidParams("empty time grid".into()));
    }
    if t[0] < 0.0 || t.windows(2).any(|w| !(w[1] >= w[0])) || t.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParams("time grid must be finite, non-negative and non-decreasing".into()));
    }
    Ok(())
}

/// Integrates `d rho/dt = -i L rho` with classical RK4 and calls
/// `observe(k, t_k, rho)` at every grid time.
pub fn evolve_with(
    rho0: &Superket<f64>,
    params: &LiouvilleParams<f64>,
    t_grid: &[f64],
    opts: &EvolveOptions,
    mut observe: impl FnMut(usize, f64, &Superket<f64>) -> Result<()>,
) -> Result<EvolveStats> {
    if params.frame != Frame::Original {
        return Err(Error::InvalidParams("real-time evolution runs in the original frame".into()));
    }
    check_grid(t_grid)?;
    let kernel = Liouvillian::new(*params)?;
    if rho0.dim() != kernel.dim() {
        return Err(Error::DimensionMismatch {
            expected: kernel.dim(),
            got: rho0.dim(),
        });
    }
    let scale = params.spectral_scale().max(f64::MIN_POSITIVE);
    let dt_max = opts.dt.unwrap_or(opts.dt_factor / scale);
    if !(dt_max > 0.0) || dt_max * scale >= 1.0 {
        return Err(Error::InvalidParams(format!(
            "dt*(2JN+2gammaN+gN) = {:.3} must lie in (0, 1)",
            dt_max * scale
        )));
    }
    let n = rho0.n_spins();
    let tr0 = rho0.trace();
    let dim = rho0.dim();
    let mut v = rho0.amplitudes().to_vec();
    let (mut k, mut tmp, mut acc) = (vec![ZERO; dim], vec![ZERO; dim], vec![ZERO; dim]);
    let mut stats = EvolveStats {
        dt: dt_max,
        ..Default::default()
    };
    let minus_i = Complex64::new(0.0, -1.0);
    let mut t = 0.0;
    for (idx, &target) in t_grid.iter().enumerate() {
        let span = target - t;
        let steps = (span / dt_max - 1e-9).ceil().max(0.0) as usize;
        if steps > 0 {
            let h = span / steps as f64;
            let (c6, c3, c2, c1) = (minus_i * (h / 6.0), minus_i * (h / 3.0), minus_i * (h / 2.0), minus_i * h);
            for _ in 0..steps {
                kernel.apply_into(&v, &mut k, false)?;
                combine(&mut acc, &v, c6, &k);
                combine(&mut tmp, &v, c2, &k);
                kernel.apply_into(&tmp, &mut k, false)?;
                add_scaled(&mut acc, c3, &k);
                combine(&mut tmp, &v, c2, &k);
                kernel.apply_into(&tmp, &mut k, false)?;
                add_scaled(&mut acc, c3, &k);
                combine(&mut tmp, &v, c1, &k);
                kernel.apply_into(&tmp, &mut k, false)?;
                add_scaled(&mut acc, c6, &k);
                std::mem::swap(&mut v, &mut acc);
            }
            stats.steps += steps;
        }
        t = target;
        let rho = Superket::from_amplitudes(n, std::mem::take(&mut v))?;
        let drift = (rho.trace() - tr0).norm();
        if !drift.is_finite() || drift > opts.drift_tol {
            return Err(Error::Accuracy(format!(
                "trace drifted by {drift:.3e} at t = {t}; use a smaller dt (now {dt_max:.3e})"
            )));
        }
        stats.max_trace_drift = stats.max_trace_drift.max(drift);
        stats.max_hermiticity_drift = stats.max_hermiticity_drift.max(rho.hermiticity_residual());
        observe(idx, t, &rho)?;
        v = rho.into_amplitudes();
    }
    Ok(stats)
}

fn combine(out: &mut [Complex64], x: &[Complex64], c: Complex64, k: &[Complex64]) {
    out.par_iter_mut()
        .zip(x.par_iter().zip(k.par_iter()))
        .for_each(|(o, (a, b))| *o = a + c * b);
}

fn add_scaled(out: &mut [Complex64], c: Complex64, k: &[Complex64]) {
    out.par_iter_mut().zip(k.par_iter()).for_each(|(o, b)| *o += c * b);
}

#[derive(Clone, Debug)]
pub struct Evolution {
    pub times: Vec<f64>,
    pub states: Vec<Superket<f64>>,
    pub stats: EvolveStats,
}

/// Stores `rho_t` at every grid time; use [`evolve_with`] for large N.
pub fn evolve_real_time(
    rho0: &Superket<f64>,
    params: &LiouvilleParams<f64>,
    t_grid: &[f64],
    opts: &EvolveOptions,
) -> Result<Evolution> {
    let mut states = Vec::with_capacity(t_grid.len());
    let stats = evolve_with(rho0, params, t_grid, opts, |_, _, r| {
        states.push(r.clone());
        Ok(())
    })?;
    Ok(Evolution {
        times: t_grid.to_vec(),
        states,
        stats,
    })
}

/// `<psi|rho_t|psi>`, the fidelity to the pure cat state.
pub fn fidelity(rho_t: &Superket<f64>, cat: &CatState) -> Result<f64> {
    if rho_t.n_spins() != cat.n {
        return Err(Error::DimensionMismatch {
            expected: cat.rho.dim(),
            got: rho_t.dim(),
        });
    }
    let herm = rho_t.hermiticity_residual();
    if herm > 1e-8 {
        return Err(Error::Invariant(format!("rho_t is not Hermitian (residual {herm:.2e})")));
    }
    let nz: Vec<(usize, Complex64)> = cat.psi.iter().copied().enumerate().filter(|(_, z)| z.norm() > 0.0).collect();
    let mut f = ZERO;
    for &(a, pa) in &nz {
        for &(b, pb) in &nz {
            f += pa.conj() * rho_t.get(a, b) * pb;
        }
    }
    if f.re < -1e-9 {
        return Err(Error::Invariant(format!(
            "negative fidelity {:.3e}; integration is not accurate enough",
            f.re
        )));
    }
    Ok(f.re)
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub params: LiouvilleParams<f64>,
    /// In units of `1/J`.
    pub times: Vec<f64>,
    /// `t J N`.
    pub scaled_times: Vec<f64>,
    pub fidelity: Vec<f64>,
    pub stats: EvolveStats,
}

/// `F(t)` of the cat state on `t_grid`.
pub fn fidelity_trajectory(
    cat: &CatState,
    params: &LiouvilleParams<f64>,
    t_grid: &[f64],
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    if params.n_spins != cat.n {
        return Err(Error::InvalidParams("cat state and parameters disagree on N".into()));
    }
    let mut f = Vec::with_capacity(t_grid.len());
    let stats = evolve_with(&cat.rho, params, t_grid, opts, |_, _, r| {
        f.push(fidelity(r, cat)?);
        Ok(())
    })?;
    let jn = params.j * params.n_spins as f64;
    Ok(Trajectory {
        params: *params,
        times: t_grid.to_vec(),
        scaled_times: t_grid.iter().map(|t| t * jn).collect(),
        fidelity: f,
        stats,
    })
}

/// Uniform grid `t_k = k * t_max / steps`, `k = 0..=steps`.
pub fn uniform_grid(t_max: f64, steps: usize) -> Vec<f64> {
    (0..=steps).map(|k| t_max * k as f64 / steps as f64).collect()
}

impl Trajectory {
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,tJN,F")?;
        for ((t, s), f) in self.times.iter().zip(&self.scaled_times).zip(&self.fidelity) {
            writeln!(w, "{t:.16e},{s:.16e},{f:.16e}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Overlap {
    pub lambda: Complex64,
    /// `|(rho_ini | R_a)|` for the unit-norm right mode.
    pub r: f64,
}

/// Overlap of the cat state with every right eigenmode of `spec`.
pub fn overlap_spectrum(cat: &CatState, spec: &Spectrum) -> Result<Vec<Overlap>> {
    if spec.params.n_spins != cat.n {
        return Err(Error::InvalidParams("cat state and spectrum disagree on N".into()));
    }
    let rho = cat.in_frame(spec.params.frame)?;
    Ok(spec
        .eigenvalues
        .iter()
        .zip(&spec.right_modes)
        .map(|(lam, r)| Overlap {
            lambda: *lam,
            r: rho.inner(r).norm(),
        })
        .collect())
}

pub fn write_overlaps_csv<W: Write>(overlaps: &[Overlap], mut w: W) -> Result<()> {
    writeln!(w, "re_lambda,im_lambda,r")?;
    for o in overlaps {
        writeln!(w, "{:.16e},{:.16e},{:.16e}", o.lambda.re, o.lambda.im, o.r)?;
    }
    Ok(())
}

#[derive(Clone, Copy, Debug)]
pub struct FourierOptions {
    /// Largest `omega / (N J)`.
    pub max_scaled_omega: f64,
    /// Grid step in `omega / (N J)`.
    pub scaled_step: f64,
    /// Fraction of the window at its end whose mean is the plateau.
    pub plateau_fraction: f64,
}

impl Default for FourierOptions {
    fn default() -> Self {
        Self {
            max_scaled_omega: 4.0,
            scaled_step: 0.01,
            plateau_fraction: 0.2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FreqSpectrum {
    pub omega: Vec<f64>,
    pub scaled_omega: Vec<f64>,
    /// Transform at `omega >= 0`; `F~(-omega) = conj F~(omega)`.
    pub amplitude: Vec<Complex64>,
    /// Half-width `T` of the window `[-T, T]`.
    pub window: f64,
    pub plateau: f64,
    /// `2 * L * max |F - plateau|` over the plateau segment of length `L`:
    /// a bound on how much of `F~` hinges on the tail, below which
    /// structure is not significant.
    pub noise_floor: f64,
}

/// `F~(omega) = int_{-T}^{T} e^{-i omega t} (F(|t|) - plateau) dt` by the
/// trapezoid rule.
pub fn fourier_fidelity(traj: &Trajectory, opts: &FourierOptions) -> Result<FreqSpectrum> {
    let t = &traj.times;
    let f = &traj.fidelity;
    if t.len() < 3 || t[0] != 0.0 {
        return Err(Error::InvalidParams("need a grid starting at t = 0 with >= 3 points".into()));
    }
    let h = t[1] - t[0];
    if !(h > 0.0) || t.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(1.0)) {
        return Err(Error::InvalidParams("fidelity grid is not uniform".into()));
    }
    if !(opts.scaled_step > 0.0) || !(opts.max_scaled_omega >= 0.0) {
        return Err(Error::InvalidParams("bad frequency grid".into()));
    }
    let n = t.len();
    let tail = ((n as f64 * opts.plateau_fraction).ceil() as usize).clamp(1, n);
    let plateau = f[n - tail..].iter().sum::<f64>() / tail as f64;
    let dev = f[n - tail..].iter().map(|x| (x - plateau).abs()).fold(0.0, f64::max);
    let noise_floor = 2.0 * (t[n - 1] - t[n - tail]) * dev;
    let jn = traj.params.j * traj.params.n_spins as f64;
    let jn = if jn > 0.0 { jn } else { 1.0 };
    let count = (opts.max_scaled_omega / opts.scaled_step).round() as usize + 1;
    let scaled: Vec<f64> = (0..count).map(|k| k as f64 * opts.scaled_step).collect();
    let omega: Vec<f64> = scaled.iter().map(|s| s * jn).collect();
    // the even extension makes the transform real: 2 int_0^T cos(w t) f dt
    let amplitude = omega
        .par_iter()
        .map(|&w| {
            let mut s = 0.0;
            for k in 0..n {
                let wt = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
                s += wt * (w * t[k]).cos() * (f[k] - plateau);
            }
            Complex64::new(2.0 * h * s, 0.0)
        })
        .collect();
    Ok(FreqSpectrum {
        omega,
        scaled_omega: scaled,
        amplitude,
        window: t[n - 1],
        plateau,
        noise_floor,
    })
}

impl FreqSpectrum {
    pub fn magnitude(&self) -> Vec<f64> {
        self.amplitude.iter().map(|z| z.norm()).collect()
    }

    /// Index of the grid point nearest `scaled` (`omega / NJ`).
    pub fn index_of(&self, scaled: f64) -> usize {
        (0..self.scaled_omega.len())
            .min_by(|&a, &b| (self.scaled_omega[a] - scaled).abs().total_cmp(&(self.scaled_omega[b] - scaled).abs()))
            .unwrap_or(0)
    }

    /// Highest-prominence local maximum of `|F~|` with `omega / NJ` in
    /// `[lo, hi]`, as `(index, prominence)`.
    pub fn peak_in(&self, lo: f64, hi: f64) -> Option<(usize, f64)> {
        let m = self.magnitude();
        (0..m.len())
            .filter(|&k| self.scaled_omega[k] >= lo && self.scaled_omega[k] <= hi)
            .map(|k| (k, prominence(&m, k)))
            .filter(|&(_, p)| p > 0.0)
            .max_by(|a, b| a.1.total_cmp(&b.1))
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "omega,omega_over_nj,abs_f")?;
        for ((o, s), a) in self.omega.iter().zip(&self.scaled_omega).zip(&self.amplitude) {
            writeln!(w, "{o:.16e},{s:.16e},{:.16e}", a.norm())?;
        }
        Ok(())
    }
}

/// Topographic prominence of `y[k]`; zero unless `k` is a strict local
/// maximum. Edges count as infinitely low.
pub fn prominence(y: &[f64], k: usize) -> f64 {
    let v = y[k];
    let left_ok = k == 0 || y[k - 1] < v;
    let right_ok = k + 1 == y.len() || y[k + 1] < v;
    if !left_ok || !right_ok || y.len() < 3 || k == 0 || k + 1 == y.len() {
        return 0.0;
    }
    let mut lmin = v;
    for &x in y[..k].iter().rev() {
        if x > v {
            break;
        }
        lmin = lmin.min(x);
    }
    let mut rmin = v;
    for &x in &y[k + 1..] {
        if x > v {
            break;
        }
        rmin = rmin.min(x);
    }
    v - lmin.max(rmin)
}

/// `H0 = -J sum_bonds Z Z - g sum_j X` on the `2^N` Hilbert space.
pub fn hamiltonian(params: &LiouvilleParams<f64>) -> CMatrix<f64> {
    let n = params.n_spins;
    let d = 1usize << n;
    let mut h = CMatrix::zeros(d, d);
    for s in 0..d {
        h[(s, s)] = Complex64::new(-params.j * bond_sum(s, n) as f64, 0.0);
        for j in 0..n {
            h[(s ^ (1 << j), s)] += Complex64::new(-params.g, 0.0);
        }
    }
    h
}

#[derive(Clone, Copy, Debug)]
pub struct UnravelOptions {
    pub dt: f64,
    pub n_traj: usize,
    pub seed: u64,
    /// Trajectories summed sequentially per task; fixes the summation order.
    pub chunk: usize,
}

impl Default for UnravelOptions {
    fn default() -> Self {
        Self {
            dt: 0.01,
            n_traj: 1000,
            seed: 0x5eed,
            chunk: 64,
        }
    }
}

#[derive(Clone, Debug)]
pub struct UnravelResult {
    pub times: Vec<f64>,
    /// Trajectory-averaged `|psi_t><psi_t|` at each time.
    pub rho: Vec<CMatrix<f64>>,
    pub n_traj: usize,
}

/// Largest N accepted by [`unravel_trajectories`].
pub const MAX_UNRAVEL_SPINS: usize = 6;

/// Pure-state trajectories under `H0` and a white-noise longitudinal field:
/// per step a half kick `exp(-i sqrt(gamma dt / 2) xi_j Z_j)`, an RK4 step
/// of `H0`, and another independent half kick. The average of the
/// projectors reproduces the dephasing master equation as `dt -> 0`.
///
/// Trajectory `k` draws from ChaCha8 stream `k` of `seed`, and sums are
/// taken in fixed-size chunks in index order, so the result does not
/// depend on the thread count.
pub fn unravel_trajectories(
    psi0: &[Complex64],
    params: &LiouvilleParams<f64>,
    t_grid: &[f64],
    opts: &UnravelOptions,
) -> Result<UnravelResult> {
    params.validate()?;
    let n = params.n_spins;
    if n > MAX_UNRAVEL_SPINS {
        return Err(Error::InvalidParams(format!("unraveling supports N <= {MAX_UNRAVEL_SPINS}, got {n}")));
    }
    let d = 1usize << n;
    if psi0.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: psi0.len() });
    }
    if opts.n_traj < 10 {
        return Err(Error::Statistics(format!("need at least 10 trajectories, got {}", opts.n_traj)));
    }
    if !(opts.dt > 0.0) || opts.chunk == 0 {
        return Err(Error::InvalidParams("dt must be positive and chunk non-zero".into()));
    }
    check_grid(t_grid)?;
    let steps: Vec<usize> = t_grid
        .iter()
        .map(|&t| {
            let k = (t / opts.dt).round();
            if (k * opts.dt - t).abs() > 1e-9 * t.max(1.0) {
                Err(Error::InvalidParams(format!("t = {t} is not a multiple of dt = {}", opts.dt)))
            } else {
                Ok(k as usize)
            }
        })
        .collect::<Result<_>>()?;

    // RK4 map of i dpsi/dt = H0 psi as one dense matrix
    let a = hamiltonian(params).scale(Complex64::new(0.0, -opts.dt));
    let mut prop = CMatrix::identity(d);
    let mut term = CMatrix::identity(d);
    for k in 1..=4 {
        term = term.matmul(&a).scale(Complex64::new(1.0 / k as f64, 0.0));
        prop = prop.add(&term);
    }
    let spins: Vec<Vec<f64>> = (0..d).map(|s| (0..n).map(|j| configs::spin(s, j) as f64).collect()).collect();
    let kick = (params.gamma * opts.dt / 2.0).sqrt();

    let run = |traj: usize, acc: &mut [CMatrix<f64>]| {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(traj as u64);
        let mut psi = psi0.to_vec();
        let mut xi = vec![0.0; n];
        let mut half_kick = |psi: &mut [Complex64], rng: &mut ChaCha8Rng| {
            if kick == 0.0 {
                return;
            }
            for x in xi.iter_mut() {
                *x = StandardNormal.sample(rng);
            }
            for (s, z) in psi.iter_mut().enumerate() {
                let phase: f64 = spins[s].iter().zip(&xi).map(|(a, b)| a * b).sum();
                *z *= Complex64::from_polar(1.0, -kick * phase);
            }
        };
        let mut done = 0;
        for (idx, &target) in steps.iter().enumerate() {
            while done < target {
                half_kick(&mut psi, &mut rng);
                psi = prop.mul_vec(&psi);
                half_kick(&mut psi, &mut rng);
                done += 1;
            }
            let m = &mut acc[idx];
            for i in 0..d {
                for j in 0..d {
                    m[(i, j)] += psi[i] * psi[j].conj();
                }
            }
        }
    };

    let n_chunks = opts.n_traj.div_ceil(opts.chunk);
    let partial: Vec<Vec<CMatrix<f64>>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![CMatrix::zeros(d, d); t_grid.len()];
            for traj in c * opts.chunk..((c + 1) * opts.chunk).min(opts.n_traj) {
                run(traj, &mut acc);
            }
            acc
        })
        .collect();
    let mut rho = vec![CMatrix::zeros(d, d); t_grid.len()];
    for chunk in &partial {
        for (r, p) in rho.iter_mut().zip(chunk) {
            *r = r.add(p);
        }
    }
    let inv = Complex64::new(1.0 / opts.n_traj as f64, 0.0);
    for r in &mut rho {
        *r = r.scale(inv);
    }
    Ok(UnravelResult {
        times: t_grid.to_vec(),
        rho,
        n_traj: opts.n_traj,
    })
}

/// Master-equation density matrix at `t` from the pure state `psi0`.
pub fn master_equation_density(
    psi0: &[Complex64],
    params: &LiouvilleParams<f64>,
    t: f64,
    opts: &EvolveOptions,
) -> Result<CMatrix<f64>> {
    let rho0 = Superket::outer(psi0, psi0)?;
    let ev = evolve_real_time(&rho0, &params.with_frame(Frame::Original), &[t], opts)?;
    Ok(devectorize(&ev.states[0]))
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 || points.iter().any(|p| !(p.0 > 0.0) || !(p.1 > 0.0)) {
        return Err(Error::InvalidParams("need >= 2 positive points".into()));
    }
    let m = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}
