//! Most coherent mode by normalized imaginary-time propagation
//! `d|rho)/dt = -L~|rho)` in the sublattice frame.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::operator::{project_symmetric_sector, Liouvillian};
use crate::params::{Frame, LiouvilleParams};
use crate::scalar::{lit, to_f64, Real, C};
use crate::superket::{configs, Superket};

#[derive(Clone, Debug)]
pub enum McmInit<T> {
    /// `(|up> + |down>) (x) (|up> + |down>)` over both copies, plus a small
    /// seeded perturbation projected onto the symmetric sector.
    Symmetric { seed: u64, perturbation: f64 },
    /// The single g = 0 basis superket `|up...up> (x) |up...up>`.
    Ferro,
    Custom(Superket<T>),
}

impl<T> Default for McmInit<T> {
    fn default() -> Self {
        McmInit::Symmetric {
            seed: 0x5eed,
            perturbation: 1e-3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct McmOptions<T> {
    /// Step size; `None` picks `dt_factor / (2JN + 2 gamma N + gN)`.
    pub dt: Option<T>,
    pub dt_factor: f64,
    /// Residual `||L~ v - lambda v||` for unit `v`.
    pub tol: f64,
    pub max_steps: usize,
    pub init: McmInit<T>,
    /// Record a log entry every this many steps (0 disables).
    pub log_every: usize,
}

impl<T> Default for McmOptions<T> {
    fn default() -> Self {
        Self {
            dt: None,
            dt_factor: 0.9,
            tol: 1e-8,
            max_steps: 200_000,
            init: McmInit::default(),
            log_every: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogEntry {
    pub step: usize,
    pub eigenvalue: num_complex::Complex64,
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct McmResult<T> {
    /// Unit norm, in `frame`.
    pub mode: Superket<T>,
    pub eigenvalue: C<T>,
    pub residual: f64,
    pub iterations: usize,
    pub frame: Frame,
    pub converged: bool,
    pub dt: T,
    pub log: Vec<LogEntry>,
}

pub fn default_dt<T: Real>(params: &LiouvilleParams<T>, factor: f64) -> T {
    let scale = params.spectral_scale();
    lit::<T>(factor) / scale.max(T::one())
}

/// `(rho|L~ rho)/(rho|rho)` in the frame of `params`.
pub fn rayleigh_quotient<T: Real>(state: &Superket<T>, params: &LiouvilleParams<T>) -> Result<C<T>> {
    let nrm = state.norm_sqr();
    if nrm == T::zero() {
        return Err(Error::InvalidParams("Rayleigh quotient of a zero state".into()));
    }
    let l = Liouvillian::new(*params)?;
    let lv = l.apply(state)?;
    Ok(state.inner(&lv) / C::new(nrm, T::zero()))
}

fn initial_state<T: Real>(params: &LiouvilleParams<T>, init: &McmInit<T>) -> Result<Superket<T>> {
    let n = params.n_spins;
    let up = configs::all_up(n);
    let down = 0usize;
    let state = match init {
        McmInit::Ferro => Superket::basis(n, up, up),
        McmInit::Custom(v) => {
            if v.n_spins() != n {
                return Err(Error::DimensionMismatch {
                    expected: params.dim(),
                    got: v.dim(),
                });
            }
            v.clone()
        }
        McmInit::Symmetric { seed, perturbation } => {
            let mut v = Superket::zeros(n);
            let half = C::new(lit::<T>(0.5), T::zero());
            for (a, b) in [(up, up), (up, down), (down, up), (down, down)] {
                v.set(a, b, half);
            }
            if *perturbation > 0.0 {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let amps = (0..v.dim())
                    .map(|_| C::new(lit::<T>(rng.gen_range(-1.0..1.0)), lit::<T>(rng.gen_range(-1.0..1.0))))
                    .collect();
                let mut noise = project_symmetric_sector(&Superket::from_amplitudes(n, amps)?)?;
                let nn = noise.norm();
                if nn > T::zero() {
                    noise.scale_mut(C::new(lit::<T>(*perturbation) / nn, T::zero()));
                    v.axpy(C::new(T::one(), T::zero()), &noise);
                }
            }
            v
        }
    };
    state.normalized()
}

fn lincomb<T: Real>(out: &mut [C<T>], base: &[C<T>], c: C<T>, k: &[C<T>]) {
    out.par_iter_mut()
        .zip(base.par_iter())
        .zip(k.par_iter())
        .for_each(|((o, b), x)| *o = *b + c * *x);
}

fn accumulate<T: Real>(acc: &mut [C<T>], c: C<T>, k: &[C<T>]) {
    acc.par_iter_mut().zip(k.par_iter()).for_each(|(a, x)| *a = *a + c * *x);
}

/// Imaginary-time propagation that always returns its final state; the
/// `converged` flag tells whether `tol` was reached.
pub fn propagate_mcm<T: Real>(
    params: &LiouvilleParams<T>,
    opts: &McmOptions<T>,
    adjoint: bool,
) -> Result<McmResult<T>> {
    let params = params.with_frame(Frame::Transformed);
    params.validate()?;
    let dt = opts.dt.unwrap_or_else(|| default_dt(&params, opts.dt_factor));
    let stab = to_f64(dt * params.spectral_scale());
    if !(dt > T::zero()) || stab >= 1.0 {
        return Err(Error::InvalidParams(format!(
            "dt*(2JN+2gammaN+gN) = {stab:.3} must lie in (0, 1)"
        )));
    }
    let kernel = Liouvillian::new(params)?;
    let dim = params.dim();
    let n = params.n_spins;
    let mut v = initial_state(&params, &opts.init)?.into_amplitudes();
    let mut k = vec![C::<T>::default(); dim];
    let mut tmp = vec![C::<T>::default(); dim];
    let mut acc = vec![C::<T>::default(); dim];

    let r = |x: T| C::new(x, T::zero());
    let half = r(-dt / lit::<T>(2.0));
    let full = r(-dt);
    let sixth = r(-dt / lit::<T>(6.0));
    let third = r(-dt / lit::<T>(3.0));

    let mut log = Vec::new();
    let mut residual;
    let mut eigenvalue;
    let mut step = 0usize;
    loop {
        // k = L v; v has unit norm here
        kernel.apply_into(&v, &mut k, adjoint)?;
        let vk: C<T> = v.iter().zip(&k).map(|(a, b)| a.conj() * *b).sum();
        eigenvalue = vk;
        let res: T = v
            .iter()
            .zip(&k)
            .map(|(a, b)| (*b - vk * *a).norm_sqr())
            .sum::<T>()
            .sqrt();
        residual = to_f64(res);
        if !residual.is_finite() {
            return Err(Error::Unstable(format!(
                "non-finite residual at step {step}; reduce dt (now {:.3e})",
                to_f64(dt)
            )));
        }
        if opts.log_every > 0 && step % opts.log_every == 0 {
            log.push(LogEntry {
                step,
                eigenvalue: crate::scalar::c_to_f64(eigenvalue),
                residual,
            });
        }
        if residual < opts.tol || step >= opts.max_steps {
            break;
        }
        let x = &v;
        lincomb(&mut acc, x, sixth, &k);
        lincomb(&mut tmp, x, half, &k);
        kernel.apply_into(&tmp, &mut k, adjoint)?;
        accumulate(&mut acc, third, &k);
        lincomb(&mut tmp, x, half, &k);
        kernel.apply_into(&tmp, &mut k, adjoint)?;
        accumulate(&mut acc, third, &k);
        lincomb(&mut tmp, x, full, &k);
        kernel.apply_into(&tmp, &mut k, adjoint)?;
        accumulate(&mut acc, sixth, &k);
        std::mem::swap(&mut v, &mut acc);
        let nrm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if !nrm.is_finite() || nrm == T::zero() {
            return Err(Error::Unstable(format!(
                "norm {} at step {step}; reduce dt (now {:.3e})",
                to_f64(nrm),
                to_f64(dt)
            )));
        }
        let inv = T::one() / nrm;
        v.par_iter_mut().for_each(|z| *z = z.scale(inv));
        step += 1;
    }
    Ok(McmResult {
        mode: Superket::from_amplitudes(n, v)?,
        eigenvalue,
        residual,
        iterations: step,
        frame: Frame::Transformed,
        converged: residual < opts.tol,
        dt,
        log,
    })
}

/// Right most coherent mode of `L~`; non-convergence is an error.
pub fn find_mcm<T: Real>(params: &LiouvilleParams<T>, opts: &McmOptions<T>) -> Result<McmResult<T>> {
    require_converged(propagate_mcm(params, opts, false)?)
}

/// Left partner: the same scheme driven by `L~^dagger`; its eigenvalue is
/// the conjugate of the right one.
pub fn find_mcm_left<T: Real>(params: &LiouvilleParams<T>, opts: &McmOptions<T>) -> Result<McmResult<T>> {
    require_converged(propagate_mcm(params, opts, true)?)
}

fn require_converged<T: Real>(r: McmResult<T>) -> Result<McmResult<T>> {
    if r.converged {
        Ok(r)
    } else {
        Err(Error::NonConvergence {
            steps: r.iterations,
            residual: r.residual,
        })
    }
}

pub fn write_log_csv<W: Write>(log: &[LogEntry], mut w: W) -> Result<()> {
    writeln!(w, "step,re_lambda,im_lambda,residual")?;
    for e in log {
        writeln!(w, "{},{:.16e},{:.16e},{:.16e}", e.step, e.eigenvalue.re, e.eigenvalue.im, e.residual)?;
    }
    Ok(())
}

const MAGIC: &[u8; 8] = b"LVMCMCK1";

#[derive(Clone, Debug)]
pub struct Checkpoint {
    pub params: LiouvilleParams<f64>,
    pub iteration: u64,
    pub state: Superket<f64>,
}

/// Little-endian: magic, N (u32), frame (u8), J, g, gamma (f64),
/// iteration (u64), then interleaved re/im f64 amplitudes.
pub fn write_checkpoint(path: &Path, ck: &Checkpoint) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&(ck.params.n_spins as u32).to_le_bytes())?;
    w.write_all(&[ck.params.frame.tag()])?;
    for x in [ck.params.j, ck.params.g, ck.params.gamma] {
        w.write_all(&x.to_le_bytes())?;
    }
    w.write_all(&ck.iteration.to_le_bytes())?;
    for z in ck.state.amplitudes() {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_checkpoint(path: &Path) -> Result<Checkpoint> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("not a checkpoint file".into()));
    }
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    let mut b1 = [0u8; 1];
    r.read_exact(&mut b4)?;
    let n = u32::from_le_bytes(b4) as usize;
    r.read_exact(&mut b1)?;
    let frame = Frame::from_tag(b1[0]).ok_or_else(|| Error::Format(format!("bad frame tag {}", b1[0])))?;
    let mut f = || -> Result<f64> {
        r.read_exact(&mut b8)?;
        Ok(f64::from_le_bytes(b8))
    };
    let (j, g, gamma) = (f()?, f()?, f()?);
    let params = LiouvilleParams::new(n, j, g, gamma, frame)?;
    r.read_exact(&mut b8)?;
    let iteration = u64::from_le_bytes(b8);
    let dim = params.dim();
    let mut amps = Vec::with_capacity(dim);
    for _ in 0..dim {
        r.read_exact(&mut b8)?;
        let re = f64::from_le_bytes(b8);
        r.read_exact(&mut b8)?;
        amps.push(num_complex::Complex64::new(re, f64::from_le_bytes(b8)));
    }
    if r.read(&mut b1)? != 0 {
        return Err(Error::Format("trailing bytes after amplitudes".into()));
    }
    Ok(Checkpoint {
        params,
        iteration,
        state: Superket::from_amplitudes(n, amps)?,
    })
}
