//! Two-sublattice mean-field theory of the transformed Liouvillian on the
//! four-dimensional one-site space `{up up, up dn, dn up, dn dn}`.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{eig, expm, CMatrix};
use crate::scalar::{lit, to_f64, Real, C};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Beta<T> {
    Finite(T),
    Infinite,
}

impl<T: Real> std::str::FromStr for Beta<T> {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
            return Ok(Beta::Infinite);
        }
        let v: f64 = t
            .parse()
            .map_err(|_| Error::InvalidParams(format!("beta must be a number or 'inf', got {s:?}")))?;
        Ok(Beta::Finite(lit(v)))
    }
}

impl<T: Real> std::fmt::Display for Beta<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Beta::Finite(b) => write!(f, "{b}"),
            Beta::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MfParams<T> {
    pub zj: T,
    pub g: T,
    pub gamma: T,
    pub beta: Beta<T>,
}

impl<T: Real> MfParams<T> {
    pub fn new(zj: T, g: T, gamma: T, beta: Beta<T>) -> Result<Self> {
        let p = Self { zj, g, gamma, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.zj > T::zero()) || !self.zj.is_finite() {
            return Err(Error::InvalidParams(format!("zJ must be positive, got {}", self.zj)));
        }
        for (name, v) in [("g", self.g), ("gamma", self.gamma)] {
            if !v.is_finite() || v < T::zero() {
                return Err(Error::InvalidParams(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if let Beta::Finite(b) = self.beta {
            if !(b > T::zero()) || !b.is_finite() {
                return Err(Error::InvalidParams(format!("beta must be positive or inf, got {b}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sublattice {
    A,
    B,
}

const SZ_PLUS: [f64; 4] = [1.0, 1.0, -1.0, -1.0];
const SZ_MINUS: [f64; 4] = [1.0, -1.0, 1.0, -1.0];

/// `-zJ m (Z+ + Z-) - g (X+ + X-) +/- i gamma Z+ Z- - i gamma`.
pub fn mf_liouvillian<T: Real>(sub: Sublattice, m_other: C<T>, p: &MfParams<T>) -> CMatrix<T> {
    let sign = match sub {
        Sublattice::A => T::one(),
        Sublattice::B => -T::one(),
    };
    let mut l = CMatrix::zeros(4, 4);
    for k in 0..4 {
        let zp = lit::<T>(SZ_PLUS[k]);
        let zm = lit::<T>(SZ_MINUS[k]);
        let field = m_other * C::new(-p.zj * (zp + zm), T::zero());
        l[(k, k)] = field + C::new(T::zero(), sign * p.gamma * zp * zm - p.gamma);
    }
    let mg = C::new(-p.g, T::zero());
    // X+ flips the high bit (0<->2, 1<->3), X- the low bit (0<->1, 2<->3)
    for (a, b) in [(0, 2), (1, 3), (0, 1), (2, 3)] {
        l[(a, b)] = mg;
        l[(b, a)] = mg;
    }
    l
}

/// `Tr[Z+ exp(-beta L4)] / Tr[exp(-beta L4)]`, or the dominant-mode limit
/// for `beta = inf`.
pub fn mf_magnetization<T: Real>(l4: &CMatrix<T>, beta: Beta<T>) -> Result<C<T>> {
    let e = eig(l4)?;
    let v = &e.vectors;
    let vinv = v.inverse().ok();
    let cond = vinv
        .as_ref()
        .map(|w| to_f64(v.norm_one() * w.norm_one()))
        .unwrap_or(f64::INFINITY);
    let well_conditioned = cond < 1e8;
    // diagonal of V^{-1} Z+ V: (Phi^L|Z+|Phi^R) per mode
    let diag_elems = |w: &CMatrix<T>| -> Vec<C<T>> {
        (0..4)
            .map(|a| {
                (0..4)
                    .map(|k| w[(a, k)] * v[(k, a)] * C::new(lit::<T>(SZ_PLUS[k]), T::zero()))
                    .sum()
            })
            .collect()
    };
    match beta {
        Beta::Infinite => {
            if !well_conditioned {
                return Err(Error::Degenerate(format!(
                    "near-defective one-site Liouvillian (cond {cond:.2e}) at beta = inf"
                )));
            }
            let mut order: Vec<usize> = (0..4).collect();
            order.sort_by(|&a, &b| e.values[a].re.partial_cmp(&e.values[b].re).unwrap());
            let gap = e.values[order[1]].re - e.values[order[0]].re;
            if to_f64(gap) < 1e-10 {
                return Err(Error::Degenerate(format!(
                    "dominant eigenvalue not unique (gap {:.2e})",
                    to_f64(gap)
                )));
            }
            Ok(diag_elems(vinv.as_ref().unwrap())[order[0]])
        }
        Beta::Finite(b) => {
            let shift = e.values.iter().map(|z| z.re).fold(T::infinity(), T::min);
            if well_conditioned {
                let w = diag_elems(vinv.as_ref().unwrap());
                let mut num = C::new(T::zero(), T::zero());
                let mut den = C::new(T::zero(), T::zero());
                for (lam, o) in e.values.iter().zip(&w) {
                    let weight = ((*lam - C::new(shift, T::zero())) * C::new(-b, T::zero())).exp();
                    num = num + weight * *o;
                    den = den + weight;
                }
                Ok(num / den)
            } else {
                let mut shifted = l4.clone();
                shifted.add_diag(C::new(-shift, T::zero()));
                let ex = expm(&shifted.scale(C::new(-b, T::zero())))?;
                let num: C<T> = (0..4).map(|k| ex[(k, k)] * C::new(lit::<T>(SZ_PLUS[k]), T::zero())).sum();
                Ok(num / ex.trace())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MFState<T> {
    pub m_a: C<T>,
    pub m_b: C<T>,
    pub converged: bool,
    pub iterations: usize,
    pub residual: f64,
}

impl<T: Real> MFState<T> {
    /// `(m_A + m_B) / 2`, real for a constrained fixed point.
    pub fn m(&self) -> C<T> {
        (self.m_a + self.m_b) * C::new(lit::<T>(0.5), T::zero())
    }

    pub fn conjugation_error(&self) -> f64 {
        to_f64((self.m_a - self.m_b.conj()).norm())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions<T> {
    pub mixing: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub init: C<T>,
    /// Plain mixing steps before switching to a damped Newton polish.
    pub mixing_iters: usize,
}

impl<T: Real> Default for SolveOptions<T> {
    fn default() -> Self {
        Self {
            mixing: 0.5,
            tol: 1e-10,
            max_iter: 2000,
            init: C::new(lit(0.5), T::zero()),
            mixing_iters: 200,
        }
    }
}

/// One application of the constrained self-consistency map
/// `m_A -> m(L_A(m_B = conj m_A))`.
pub fn self_consistency_map<T: Real>(m_a: C<T>, p: &MfParams<T>) -> Result<C<T>> {
    let l = mf_liouvillian(Sublattice::A, m_a.conj(), p);
    match mf_magnetization(&l, p.beta) {
        // m = 0 is a symmetric fixed point; exactly there the dominant
        // pair may be degenerate and the limit is the symmetric value
        Err(Error::Degenerate(_)) if to_f64(m_a.norm()) < 1e-9 => Ok(C::new(T::zero(), T::zero())),
        other => other,
    }
}

fn to_pair<T: Real>(z: C<T>) -> [f64; 2] {
    [to_f64(z.re), to_f64(z.im)]
}

fn from_pair<T: Real>(x: [f64; 2]) -> C<T> {
    C::new(lit(x[0]), lit(x[1]))
}

/// Fixed point of the constrained map, `m_B = conj(m_A)` at every step.
pub fn solve_self_consistent<T: Real>(p: &MfParams<T>, opts: &SolveOptions<T>) -> Result<MFState<T>> {
    p.validate()?;
    let mut m = opts.init;
    let mut eta = opts.mixing;
    let mut last = f64::INFINITY;
    let mut rises = 0;
    let mut iterations = 0;
    let mut residual;
    while iterations < opts.max_iter.min(opts.mixing_iters) {
        let f = self_consistency_map(m, p)?;
        let step = f - m;
        residual = to_f64(step.norm());
        iterations += 1;
        if residual < opts.tol {
            m = f;
            break;
        }
        if residual > last {
            rises += 1;
            if rises >= 3 {
                eta *= 0.5;
                rises = 0;
            }
        } else {
            rises = 0;
        }
        last = residual;
        m = m + step * C::new(lit(eta), T::zero());
    }
    newton_polish(p, opts, m, eta, iterations)
}

/// Damped Newton on `F(m) = f(m) - m` with a finite-difference Jacobian;
/// stops when the Newton update is below `tol`, which also handles the
/// degenerate root at a continuous transition where `|F| ~ |m|^3`.
fn newton_polish<T: Real>(
    p: &MfParams<T>,
    opts: &SolveOptions<T>,
    m: C<T>,
    eta: f64,
    mut iterations: usize,
) -> Result<MFState<T>> {
    let eval = |x: [f64; 2]| -> Result<[f64; 2]> {
        let z = from_pair::<T>(x);
        let f = self_consistency_map(z, p)?;
        Ok(to_pair(f - z))
    };
    let mut x = to_pair(m);
    let mut fx = eval(x)?;
    let mut residual = fx[0].hypot(fx[1]);
    let budget = opts.max_iter.max(iterations + 1);
    while iterations < budget {
        let nf = fx[0].hypot(fx[1]);
        residual = nf;
        if nf == 0.0 {
            return Ok(finish(from_pair(x), true, iterations, 0.0));
        }
        let h = 1e-7 * (1.0 + x[0].hypot(x[1]));
        let f0 = eval([x[0] + h, x[1]])?;
        let f1 = eval([x[0], x[1] + h])?;
        let jac = [
            [(f0[0] - fx[0]) / h, (f1[0] - fx[0]) / h],
            [(f0[1] - fx[1]) / h, (f1[1] - fx[1]) / h],
        ];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let dx = if det.abs() > 1e-300 {
            [
                -(jac[1][1] * fx[0] - jac[0][1] * fx[1]) / det,
                -(-jac[1][0] * fx[0] + jac[0][0] * fx[1]) / det,
            ]
        } else {
            [fx[0] * eta, fx[1] * eta]
        };
        iterations += 1;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial = [x[0] + t * dx[0], x[1] + t * dx[1]];
            if let Ok(ft) = eval(trial) {
                if ft[0].hypot(ft[1]) <= nf {
                    x = trial;
                    fx = ft;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        let step = t * dx[0].hypot(dx[1]);
        if accepted && step < opts.tol {
            return Ok(finish(from_pair(x), true, iterations, fx[0].hypot(fx[1])));
        }
        if !accepted {
            if nf < opts.tol {
                return Ok(finish(from_pair(x), true, iterations, nf));
            }
            x = [x[0] + eta * fx[0], x[1] + eta * fx[1]];
            fx = eval(x)?;
        }
    }
    Ok(finish(from_pair(x), false, iterations, residual))
}

/// Default seed first, then larger real seeds when the iteration runs into
/// a degenerate dominant pair or fails to converge.
pub fn solve_with_restarts<T: Real>(p: &MfParams<T>, opts: &SolveOptions<T>) -> Result<MFState<T>> {
    // Newton may land on the unstable m = 0 root from a small seed, so a
    // converged disordered answer only wins if no seed finds an ordered one.
    let ordered = |r: &Result<MFState<T>>| matches!(r, Ok(s) if s.converged && s.m().norm() > lit(ORDER_THRESHOLD));
    let mut last = solve_self_consistent(p, opts);
    if ordered(&last) {
        return last;
    }
    for seed in [1.0, 1.5, 2.0, 3.0, 0.1] {
        let o = SolveOptions {
            init: C::new(lit(seed), T::zero()),
            ..*opts
        };
        let r = solve_self_consistent(p, &o);
        if ordered(&r) {
            return r;
        }
        let better = match (&r, &last) {
            (Ok(a), Ok(b)) => a.converged && !b.converged,
            (Ok(_), Err(_)) => true,
            _ => false,
        };
        if better {
            last = r;
        }
    }
    last
}

fn finish<T: Real>(mut m: C<T>, converged: bool, iterations: usize, residual: f64) -> MFState<T> {
    // m -> -m is a symmetry; report the branch with Re m >= 0
    if m.re < T::zero() {
        m = -m;
    }
    MFState {
        m_a: m,
        m_b: m.conj(),
        converged,
        iterations,
        residual,
    }
}

/// Unconstrained iteration of both sublattice equations
/// `m_A <- m(L_A(m_B))`, `m_B <- m(L_B(m_A))`.
pub fn solve_unconstrained<T: Real>(
    p: &MfParams<T>,
    init_a: C<T>,
    init_b: C<T>,
    opts: &SolveOptions<T>,
) -> Result<MFState<T>> {
    p.validate()?;
    let (mut a, mut b) = (init_a, init_b);
    let eta = C::new(lit::<T>(opts.mixing), T::zero());
    let mut residual = f64::INFINITY;
    for it in 1..=opts.max_iter {
        let fa = mf_magnetization(&mf_liouvillian(Sublattice::A, b, p), p.beta)?;
        let fb = mf_magnetization(&mf_liouvillian(Sublattice::B, a, p), p.beta)?;
        let (da, db) = (fa - a, fb - b);
        residual = to_f64(da.norm().max(db.norm()));
        a = a + da * eta;
        b = b + db * eta;
        if residual < opts.tol {
            return Ok(MFState {
                m_a: a,
                m_b: b,
                converged: true,
                iterations: it,
                residual,
            });
        }
    }
    Ok(MFState {
        m_a: a,
        m_b: b,
        converged: false,
        iterations: opts.max_iter,
        residual,
    })
}

/// Distinct converged fixed points reached from the default seed and three
/// alternatives; more than one entry signals multistability.
pub fn multistability<T: Real>(p: &MfParams<T>, opts: &SolveOptions<T>) -> Vec<MFState<T>> {
    let seeds = [opts.init, C::new(lit(0.1), T::zero()), C::new(lit(0.9), T::zero()), C::new(lit(1.5), lit(0.2))];
    let mut found: Vec<MFState<T>> = Vec::new();
    for s in seeds {
        let o = SolveOptions { init: s, ..*opts };
        if let Ok(st) = solve_self_consistent(p, &o) {
            if st.converged && found.iter().all(|f| to_f64((f.m_a - st.m_a).norm()) > 1e-6) {
                found.push(st);
            }
        }
    }
    found
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if count == 0 || !(min <= max) || !min.is_finite() || !max.is_finite() {
            return Err(Error::InvalidParams(format!("bad axis {min}..{max} x {count}")));
        }
        Ok(Self { min, max, count })
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.count == 1 {
            self.min
        } else {
            self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.value(i)).collect()
    }
}

#[derive(Clone, Debug)]
pub struct PhaseCell {
    pub gamma: f64,
    pub g: f64,
    pub state: Option<MFState<f64>>,
}

#[derive(Clone, Debug)]
pub struct PhaseDiagram {
    pub gamma: Axis,
    pub g: Axis,
    pub zj: f64,
    pub beta: Beta<f64>,
    /// Row-major: gamma outer, g inner.
    pub cells: Vec<PhaseCell>,
}

/// |m| above which a cell counts as ordered.
pub const ORDER_THRESHOLD: f64 = 1e-4;

/// Solves every cell; rows of fixed gamma run in parallel and sweep g
/// sequentially, warm-starting from the previous cell when it was ordered.
pub fn sweep_phase_diagram(
    gamma: Axis,
    g: Axis,
    zj: f64,
    beta: Beta<f64>,
    opts: &SolveOptions<f64>,
) -> Result<PhaseDiagram> {
    MfParams::new(zj, 0.0, 0.0, beta)?;
    let rows: Vec<Vec<PhaseCell>> = (0..gamma.count)
        .into_par_iter()
        .map(|gi| {
            let gm = gamma.value(gi);
            let mut prev: Option<C<f64>> = None;
            (0..g.count)
                .map(|k| {
                    let gv = g.value(k);
                    let p = MfParams { zj, g: gv, gamma: gm, beta };
                    let cold = *opts;
                    let warm = prev.map(|m| SolveOptions { init: m, ..*opts });
                    let mut state = warm.and_then(|o| {
                        solve_self_consistent(&p, &o)
                            .ok()
                            .filter(|s| s.converged && s.m().norm() > ORDER_THRESHOLD)
                    });
                    if state.is_none() {
                        state = solve_with_restarts(&p, &cold).ok();
                    }
                    prev = state
                        .filter(|s| s.converged && s.m().norm() > ORDER_THRESHOLD)
                        .map(|s| s.m_a);
                    PhaseCell { gamma: gm, g: gv, state }
                })
                .collect()
        })
        .collect();
    Ok(PhaseDiagram {
        gamma,
        g,
        zj,
        beta,
        cells: rows.into_iter().flatten().collect(),
    })
}

impl PhaseDiagram {
    pub fn get(&self, gamma_index: usize, g_index: usize) -> &PhaseCell {
        &self.cells[gamma_index * self.g.count + g_index]
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "gamma,g,re_m,im_m,converged,iterations")?;
        for c in &self.cells {
            match &c.state {
                Some(s) => {
                    let m = s.m();
                    writeln!(
                        w,
                        "{:.16e},{:.16e},{:.16e},{:.16e},{},{}",
                        c.gamma, c.g, m.re, m.im, s.converged as u8, s.iterations
                    )?
                }
                None => writeln!(w, "{:.16e},{:.16e},nan,nan,0,0", c.gamma, c.g)?,
            }
        }
        Ok(())
    }
}

/// Ordered intervals of g, as `(first ordered g, last ordered g)` pairs,
/// along a fine scan at fixed gamma.
pub fn ordered_intervals(gamma: f64, g: Axis, zj: f64, beta: Beta<f64>, opts: &SolveOptions<f64>) -> Result<Vec<(f64, f64)>> {
    let d = sweep_phase_diagram(Axis::new(gamma, gamma, 1)?, g, zj, beta, opts)?;
    let mut out = Vec::new();
    let mut start: Option<f64> = None;
    let mut last = 0.0;
    for c in &d.cells {
        let ordered = c.state.map_or(false, |s| s.converged && s.m().norm() > ORDER_THRESHOLD);
        match (ordered, start) {
            (true, None) => start = Some(c.g),
            (false, Some(s)) => {
                out.push((s, last));
                start = None;
            }
            _ => {}
        }
        last = c.g;
    }
    if let Some(s) = start {
        out.push((s, last));
    }
    Ok(out)
}
