//! Binder cumulant of the most coherent mode and finite-size extrapolation
//! of its crossing field.

use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mcm::{find_mcm, McmInit, McmOptions};
use crate::operator::{apply_frame_transform, FrameDirection};
use crate::params::{Frame, LiouvilleParams};
use crate::superket::{configs, flat_index, Superket};

/// Which matrix representation the traces are taken in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BinderFrame {
    /// The mode as produced by the solver (finite at g = 0).
    #[default]
    Transformed,
    /// The mode mapped back to the original representation first.
    Original,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BinderValue {
    pub u4: f64,
    /// Imaginary part left after gauge fixing; a consistency diagnostic.
    pub u4_imag: f64,
    /// Gauge-fixed `tr[(M^z)^2 Phi]` of the unit-trace mode.
    pub m2: f64,
}

/// `tr[(M^z)^k Phi]` for k = 0, 2, 4, with `M^z = (1/N) sum_j Z_j`.
fn moments(phi: &Superket<f64>) -> [Complex64; 3] {
    let n = phi.n_spins();
    let amps = phi.amplitudes();
    let mut t = [Complex64::new(0.0, 0.0); 3];
    for s in 0..(1usize << n) {
        let d = amps[flat_index(n, s, s)];
        let m = configs::magnetization(s, n) as f64 / n as f64;
        let m2 = m * m;
        t[0] += d;
        t[1] += d * m2;
        t[2] += d * m2 * m2;
    }
    t
}

/// `U4 = 1 - tr[M^4 Phi] / (3 tr[M^2 Phi]^2)` for `Phi` rescaled to unit
/// trace, which fixes both its norm and its phase.
pub fn binder_cumulant(mode: &Superket<f64>) -> Result<BinderValue> {
    let [t0, t2, t4] = moments(mode);
    let scale = mode.norm();
    if !(t0.norm() > 1e-12 * scale) {
        return Err(Error::Degenerate(format!(
            "mode is traceless (|tr Phi| = {:.2e}); wrong frame or deep paramagnet",
            t0.norm()
        )));
    }
    let (m2, m4) = (t2 / t0, t4 / t0);
    if !(m2.norm() > 1e-12) {
        return Err(Error::Degenerate(format!("|tr[M^2 Phi]| = {:.2e}", m2.norm())));
    }
    let u = Complex64::new(1.0, 0.0) - m4 / (m2 * m2 * 3.0);
    Ok(BinderValue {
        u4: u.re,
        u4_imag: u.im,
        m2: m2.re,
    })
}

/// [`binder_cumulant`] of a mode given in `frame`, evaluated in `target`.
pub fn binder_cumulant_in(mode: &Superket<f64>, frame: Frame, target: BinderFrame) -> Result<BinderValue> {
    match (frame, target) {
        (Frame::Transformed, BinderFrame::Transformed) | (Frame::Original, BinderFrame::Original) => {
            binder_cumulant(mode)
        }
        (Frame::Transformed, BinderFrame::Original) => {
            binder_cumulant(&apply_frame_transform(mode, FrameDirection::ToOriginal)?)
        }
        (Frame::Original, BinderFrame::Transformed) => {
            binder_cumulant(&apply_frame_transform(mode, FrameDirection::ToTransformed)?)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BinderPoint {
    pub n: usize,
    pub gamma: f64,
    pub g: f64,
    pub u4: f64,
    pub u4_imag: f64,
    pub eigenvalue: Complex64,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

#[derive(Clone, Debug)]
pub struct BinderOptions {
    pub mcm: McmOptions<f64>,
    pub frame: BinderFrame,
    /// Target width of the final crossing bracket.
    pub g_tol: f64,
    pub max_probes: usize,
    /// Converged modes kept per size for warm starts.
    pub cache_per_size: usize,
}

impl Default for BinderOptions {
    fn default() -> Self {
        Self {
            mcm: McmOptions {
                tol: 1e-7,
                ..Default::default()
            },
            frame: BinderFrame::Transformed,
            g_tol: 1e-3,
            max_probes: 40,
            cache_per_size: 3,
        }
    }
}

/// Evaluates `U4(N, g)` at fixed `J`, `gamma`, warm-starting each solve
/// from the cached mode of the same size at the nearest `g`.
pub struct BinderEvaluator {
    pub j: f64,
    pub gamma: f64,
    pub opts: BinderOptions,
    cache: Vec<(usize, f64, Superket<f64>)>,
    /// Every evaluation, in call order.
    pub history: Vec<BinderPoint>,
}

impl BinderEvaluator {
    pub fn new(j: f64, gamma: f64, opts: BinderOptions) -> Result<Self> {
        LiouvilleParams::new(2, j, 0.0, gamma, Frame::Transformed)?;
        Ok(Self {
            j,
            gamma,
            opts,
            cache: Vec::new(),
            history: Vec::new(),
        })
    }

    fn warm_start(&self, n: usize, g: f64) -> Option<Superket<f64>> {
        self.cache
            .iter()
            .filter(|(m, _, _)| *m == n)
            .min_by(|a, b| (a.1 - g).abs().total_cmp(&(b.1 - g).abs()))
            .map(|(_, _, s)| s.clone())
    }

    /// Non-converged solves are reported as `NonConvergence`.
    pub fn evaluate(&mut self, n: usize, g: f64) -> Result<BinderPoint> {
        let params = LiouvilleParams::new(n, self.j, g, self.gamma, Frame::Transformed)?;
        let mut mcm = self.opts.mcm.clone();
        if let Some(s) = self.warm_start(n, g) {
            mcm.init = McmInit::Custom(s);
        }
        let r = find_mcm(&params, &mcm)?;
        let b = binder_cumulant_in(&r.mode, r.frame, self.opts.frame)?;
        let point = BinderPoint {
            n,
            gamma: self.gamma,
            g,
            u4: b.u4,
            u4_imag: b.u4_imag,
            eigenvalue: r.eigenvalue,
            iterations: r.iterations,
            residual: r.residual,
            converged: r.converged,
        };
        let same: Vec<usize> = (0..self.cache.len()).filter(|&k| self.cache[k].0 == n).collect();
        if same.len() >= self.opts.cache_per_size.max(1) {
            // evict the cached mode farthest from this g
            let far = *same
                .iter()
                .max_by(|&&a, &&b| (self.cache[a].1 - g).abs().total_cmp(&(self.cache[b].1 - g).abs()))
                .unwrap();
            self.cache.swap_remove(far);
        }
        self.cache.push((n, g, r.mode));
        self.history.push(point.clone());
        Ok(point)
    }

    /// `U4(N, g) - U4(N - 2, g)`.
    pub fn difference(&mut self, n: usize, g: f64) -> Result<f64> {
        let a = self.evaluate(n, g)?;
        let b = self.evaluate(n - 2, g)?;
        Ok(a.u4 - b.u4)
    }

    /// `U4` for each size on a grid, in index order.
    pub fn sample(&mut self, sizes: &[usize], g: &[f64]) -> Vec<Result<BinderPoint>> {
        let mut out = Vec::new();
        for &n in sizes {
            for &gv in g {
                out.push(self.evaluate(n, gv));
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct Crossing {
    pub n: usize,
    pub g_c: f64,
    /// Final bracket `(lo, hi)` with a sign change of `U4(N) - U4(N-2)`.
    pub bracket: (f64, f64),
    /// `(g, U4(N) - U4(N-2))` for each successful probe.
    pub probes: Vec<(f64, f64)>,
    pub skipped: usize,
}

fn describe(probes: &[(f64, f64)]) -> String {
    probes
        .iter()
        .map(|(g, d)| format!("{g:.4}:{d:+.3e}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Crossing of `U4(N)` and `U4(N-2)` inside `bracket`, found by a
/// safeguarded regula falsi (Illinois) until the bracket is narrower than
/// `opts.g_tol`. A bracket without a sign change is widened once.
pub fn find_crossing(ev: &mut BinderEvaluator, n: usize, bracket: (f64, f64)) -> Result<Crossing> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::InvalidParams(format!("crossing needs even N >= 4, got {n}")));
    }
    let (mut lo, mut hi) = if bracket.0 <= bracket.1 { bracket } else { (bracket.1, bracket.0) };
    let tol = ev.opts.g_tol;
    let mut probes = Vec::new();
    let mut skipped = 0;
    let probe = |ev: &mut BinderEvaluator, g: f64, probes: &mut Vec<(f64, f64)>| -> Result<f64> {
        let d = ev.difference(n, g)?;
        probes.push((g, d));
        Ok(d)
    };

    let mut flo = probe(ev, lo, &mut probes)?;
    let mut fhi = if hi > lo { probe(ev, hi, &mut probes)? } else { flo };
    if flo.signum() == fhi.signum() && flo != 0.0 {
        let w = if hi - lo > 1e-12 { hi - lo } else { 0.1 };
        lo = (lo - 0.5 * w).max(1e-6);
        hi += 0.5 * w;
        flo = probe(ev, lo, &mut probes)?;
        fhi = probe(ev, hi, &mut probes)?;
        if flo.signum() == fhi.signum() {
            return Err(Error::Bracket(format!(
                "no sign change of U4({n}) - U4({}) on [{lo}, {hi}] after widening; samples {}",
                n - 2,
                describe(&probes)
            )));
        }
    }
    if flo == 0.0 {
        return Ok(Crossing { n, g_c: lo, bracket: (lo, lo), probes, skipped });
    }

    let mut side = 0i8;
    let mut guard = 0;
    while hi - lo > tol {
        guard += 1;
        if guard > ev.opts.max_probes {
            return Err(Error::NonConvergence {
                steps: guard,
                residual: hi - lo,
            });
        }
        let mut x = (lo * fhi - hi * flo) / (fhi - flo);
        // keep probes away from the ends so the bracket always shrinks
        let margin = 0.4 * tol;
        x = x.clamp(lo + margin, hi - margin);
        if !x.is_finite() {
            x = 0.5 * (lo + hi);
        }
        let fx = match probe(ev, x, &mut probes) {
            Ok(v) => v,
            Err(Error::NonConvergence { .. }) => {
                // skip the probe and fall back to plain bisection
                skipped += 1;
                let mid = 0.5 * (lo + hi);
                match probe(ev, mid, &mut probes) {
                    Ok(v) => {
                        x = mid;
                        v
                    }
                    Err(e) => return Err(e),
                }
            }
            Err(e) => return Err(e),
        };
        if fx == 0.0 {
            lo = x;
            hi = x;
            break;
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
            if side == -1 {
                fhi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            fhi = fx;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        }
    }
    // final estimate from the true end values
    let end = |g: f64| probes.iter().rev().find(|p| p.0 == g).map(|p| p.1);
    let g_c = match (end(lo), end(hi)) {
        (Some(a), Some(b)) if b != a && hi > lo => (lo * b - hi * a) / (b - a),
        _ => 0.5 * (lo + hi),
    };
    Ok(Crossing {
        n,
        g_c: g_c.clamp(lo, hi),
        bracket: (lo, hi),
        probes,
        skipped,
    })
}

#[derive(Clone, Debug)]
pub struct CriticalCurve {
    pub gamma: f64,
    /// `(N, g_c^(N))`.
    pub crossings: Vec<(usize, f64)>,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub g_c: f64,
    /// Root-mean-square fit residual.
    pub residual: f64,
    /// Parameter covariance of `(a, b, c)` when the fit is over-determined.
    pub covariance: Option<[[f64; 3]; 3]>,
    /// The fit failed and `g_c` is the largest-N crossing.
    pub fallback: bool,
}

const C_MIN: f64 = 1e-3;
const C_MAX: f64 = 20.0;

/// Linear least squares for `(a, b)` at fixed `c`; returns the sum of squares.
fn fit_ab(pts: &[(f64, f64)], c: f64) -> (f64, f64, f64) {
    let (mut s1, mut sx, mut sxx, mut sy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(n, y) in pts {
        let x = n.powf(-c);
        s1 += 1.0;
        sx += x;
        sxx += x * x;
        sy += y;
        sxy += x * y;
    }
    let det = s1 * sxx - sx * sx;
    if det.abs() < 1e-300 {
        return (f64::NAN, f64::NAN, f64::INFINITY);
    }
    let a = (sxx * sy - sx * sxy) / det;
    let b = (s1 * sxy - sx * sy) / det;
    let ssr = pts.iter().map(|&(n, y)| (y - a - b * n.powf(-c)).powi(2)).sum();
    (a, b, ssr)
}

/// Fits `g_c^(N) = a + b N^(-c)` with `c` restricted to `[1e-3, 20]`
/// (variable projection: golden-section search over `c`).
pub fn extrapolate_gc(gamma: f64, points: &[(usize, f64)]) -> Result<CriticalCurve> {
    if points.len() < 3 {
        return Err(Error::InvalidParams(format!(
            "need at least 3 sizes for a 3-parameter fit, got {}",
            points.len()
        )));
    }
    let pts: Vec<(f64, f64)> = points.iter().map(|&(n, g)| (n as f64, g)).collect();
    if pts.iter().any(|p| !p.1.is_finite()) {
        return Err(Error::InvalidParams("non-finite crossing".into()));
    }
    let ssr = |c: f64| fit_ab(&pts, c).2;

    // coarse log scan, then golden section around the best cell
    let k = 400;
    let grid: Vec<f64> = (0..=k)
        .map(|i| (C_MIN.ln() + (C_MAX.ln() - C_MIN.ln()) * i as f64 / k as f64).exp())
        .collect();
    let best = (0..=k).min_by(|&a, &b| ssr(grid[a]).total_cmp(&ssr(grid[b]))).unwrap();
    let (mut x0, mut x3) = (grid[best.saturating_sub(1)], grid[(best + 1).min(k)]);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = x3 - phi * (x3 - x0);
    let mut x2 = x0 + phi * (x3 - x0);
    for _ in 0..200 {
        if ssr(x1) < ssr(x2) {
            x3 = x2;
            x2 = x1;
            x1 = x3 - phi * (x3 - x0);
        } else {
            x0 = x1;
            x1 = x2;
            x2 = x0 + phi * (x3 - x0);
        }
        if x3 - x0 < 1e-12 * x3 {
            break;
        }
    }
    let c = 0.5 * (x0 + x3);
    let (a, b, s) = fit_ab(&pts, c);
    let m = pts.len();
    let residual = (s / m as f64).sqrt();
    let largest = points.iter().max_by_key(|p| p.0).unwrap().1;

    let spread = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max)
        - pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let at_bound = c < C_MIN * 1.01 || c > C_MAX * 0.99;
    let failed = !a.is_finite() || !b.is_finite() || at_bound || residual > 0.5 * spread.max(1e-12) && m == 3;
    if failed {
        return Ok(CriticalCurve {
            gamma,
            crossings: points.to_vec(),
            a,
            b,
            c,
            g_c: largest,
            residual,
            covariance: None,
            fallback: true,
        });
    }
    Ok(CriticalCurve {
        gamma,
        crossings: points.to_vec(),
        a,
        b,
        c,
        g_c: a,
        residual,
        covariance: if m > 3 { covariance(&pts, a, b, c, s) } else { None },
        fallback: false,
    })
}

/// Gauss-Newton covariance `s^2 (J^T J)^{-1}`.
fn covariance(pts: &[(f64, f64)], _a: f64, b: f64, c: f64, ssr: f64) -> Option<[[f64; 3]; 3]> {
    let mut jtj = [[0.0; 3]; 3];
    for &(n, _) in pts {
        let x = n.powf(-c);
        let row = [1.0, x, -b * x * n.ln()];
        for i in 0..3 {
            for k in 0..3 {
                jtj[i][k] += row[i] * row[k];
            }
        }
    }
    let inv = invert3(jtj)?;
    let s2 = ssr / (pts.len() - 3) as f64;
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for k in 0..3 {
            out[i][k] = s2 * inv[i][k];
        }
    }
    Some(out)
}

fn invert3(m: [[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let cof = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    let det = m[0][0] * cof(1, 2, 1, 2) - m[0][1] * cof(1, 2, 0, 2) + m[0][2] * cof(1, 2, 0, 1);
    if det.abs() < 1e-300 {
        return None;
    }
    let adj = [
        [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
        [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
        [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
    ];
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for k in 0..3 {
            out[i][k] = adj[i][k] / det;
        }
    }
    Some(out)
}

/// Crossings for consecutive size pairs and their extrapolation. With
/// fewer than three crossings there is nothing to fit and the curve falls
/// back to the largest-N crossing.
pub fn critical_field(ev: &mut BinderEvaluator, sizes: &[usize], bracket: (f64, f64)) -> Result<(Vec<Crossing>, CriticalCurve)> {
    let mut sorted = sizes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for w in sorted.windows(2) {
        if w[1] != w[0] + 2 {
            return Err(Error::InvalidParams(format!("sizes must step by 2, got {sorted:?}")));
        }
    }
    let mut crossings = Vec::new();
    let mut br = bracket;
    for &n in sorted.iter().skip(1) {
        let c = find_crossing(ev, n, br)?;
        // the next pair crosses nearby; start from a bracket around this one
        br = (bracket.0.max(c.g_c - 0.15), bracket.1.min(c.g_c + 0.15));
        crossings.push(c);
    }
    let pts: Vec<(usize, f64)> = crossings.iter().map(|c| (c.n, c.g_c)).collect();
    let curve = match pts.last() {
        Some(&(_, last)) if pts.len() < 3 => CriticalCurve {
            gamma: ev.gamma,
            crossings: pts.clone(),
            a: f64::NAN,
            b: f64::NAN,
            c: f64::NAN,
            g_c: last,
            residual: f64::NAN,
            covariance: None,
            fallback: true,
        },
        None => return Err(Error::InvalidParams("need at least two sizes".into())),
        _ => extrapolate_gc(ev.gamma, &pts)?,
    };
    Ok((crossings, curve))
}

pub fn write_points_csv<W: Write>(points: &[BinderPoint], mut w: W) -> Result<()> {
    writeln!(w, "n,g,u4,u4_imag,re_lambda,im_lambda,iterations,residual,converged")?;
    for p in points {
        writeln!(
            w,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{:.3e},{}",
            p.n, p.g, p.u4, p.u4_imag, p.eigenvalue.re, p.eigenvalue.im, p.iterations, p.residual, p.converged as u8
        )?;
    }
    Ok(())
}

/// Plain-text `key = value` summary.
pub fn write_summary<W: Write>(curve: &CriticalCurve, crossings: &[Crossing], mut w: W) -> Result<()> {
    writeln!(w, "gamma = {}", curve.gamma)?;
    for c in crossings {
        writeln!(
            w,
            "crossing.{}_{} = {:.6} (bracket {:.6}..{:.6}, {} probes)",
            c.n - 2,
            c.n,
            c.g_c,
            c.bracket.0,
            c.bracket.1,
            c.probes.len()
        )?;
    }
    writeln!(w, "fit.a = {:.6}", curve.a)?;
    writeln!(w, "fit.b = {:.6}", curve.b)?;
    writeln!(w, "fit.c = {:.6}", curve.c)?;
    writeln!(w, "fit.residual = {:.3e}", curve.residual)?;
    writeln!(w, "fallback = {}", curve.fallback)?;
    writeln!(w, "g_c = {:.6}", curve.g_c)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mcm::McmInit;
    use crate::spectral::full_spectrum;

    fn diagonal_mode(n: usize, weights: impl Fn(usize) -> f64) -> Superket<f64> {
        let mut s = Superket::zeros(n);
        for c in 0..(1usize << n) {
            s.set(c, c, Complex64::new(weights(c), 0.0));
        }
        s
    }

    #[test]
    fn ferromagnet_value() {
        let n = 4;
        let all = configs::all_up(n);
        let s = diagonal_mode(n, |c| if c == all || c == 0 { 0.5 } else { 0.0 });
        let b = binder_cumulant(&s).unwrap();
        assert!((b.u4 - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn product_paramagnet_value() {
        for n in [2, 4, 6] {
            let s = diagonal_mode(n, |_| 1.0);
            let b = binder_cumulant(&s).unwrap();
            assert!((b.u4 - 2.0 / (3.0 * n as f64)).abs() < 1e-13, "n={n}: {}", b.u4);
        }
    }

    #[test]
    fn invariant_under_rescaling() {
        let s = diagonal_mode(4, |c| 1.0 + (c as f64).sin());
        let a = binder_cumulant(&s).unwrap();
        for z in [Complex64::new(3.0, 0.0), Complex64::new(0.2, -1.7)] {
            let b = binder_cumulant(&s.scaled(z)).unwrap();
            assert!((a.u4 - b.u4).abs() < 1e-13);
        }
    }

    #[test]
    fn traceless_mode_is_degenerate() {
        let s = Superket::<f64>::basis(2, 1, 2);
        assert!(matches!(binder_cumulant(&s), Err(Error::Degenerate(_))));
    }

    #[test]
    fn zero_field_mode_from_solver() {
        let p = LiouvilleParams::new(4, 1.0, 0.0, 1.0, Frame::Transformed).unwrap();
        let opts = McmOptions {
            init: McmInit::Ferro,
            ..Default::default()
        };
        let r = find_mcm(&p, &opts).unwrap();
        let b = binder_cumulant_in(&r.mode, r.frame, BinderFrame::Transformed).unwrap();
        assert!((b.u4 - 2.0 / 3.0).abs() < 1e-10);
        // the original representation of the same mode has no diagonal
        assert!(binder_cumulant_in(&r.mode, r.frame, BinderFrame::Original).is_err());
    }

    #[test]
    fn solver_mode_matches_dense_mode() {
        let p = LiouvilleParams::new(4, 1.0, 1.1, 1.0, Frame::Transformed).unwrap();
        let spec = full_spectrum(&p).unwrap();
        let dense = binder_cumulant(&spec.right_modes[spec.most_coherent()]).unwrap();
        let mut ev = BinderEvaluator::new(1.0, 1.0, BinderOptions::default()).unwrap();
        let pt = ev.evaluate(4, 1.1).unwrap();
        assert!(pt.converged);
        assert!((pt.u4 - dense.u4).abs() < 1e-6, "{} vs {}", pt.u4, dense.u4);
        assert!(pt.u4_imag.abs() < 1e-8);
    }

    #[test]
    fn synthetic_extrapolation() {
        let noise = [1e-4, -0.7e-4, 0.4e-4, -1e-4, 0.2e-4, 0.9e-4];
        let pts: Vec<(usize, f64)> = [6, 8, 10, 12, 14, 16]
            .iter()
            .zip(noise)
            .map(|(&n, e)| (n, 1.11 + 0.5 * (n as f64).powf(-1.3) + e))
            .collect();
        let c = extrapolate_gc(1.0, &pts).unwrap();
        assert!(!c.fallback);
        assert!((c.a - 1.11).abs() < 5e-3, "{c:?}");
        assert!(c.c > 0.0);
        assert!(c.covariance.is_some());
    }

    #[test]
    fn exact_three_point_fit() {
        let pts: Vec<(usize, f64)> = [6, 8, 10].iter().map(|&n| (n, 1.0 + 0.8 * (n as f64).powf(-2.0))).collect();
        let c = extrapolate_gc(0.0, &pts).unwrap();
        assert!((c.a - 1.0).abs() < 1e-6 && (c.c - 2.0).abs() < 1e-4, "{c:?}");
    }

    #[test]
    fn underdetermined_fit_is_rejected() {
        assert!(extrapolate_gc(0.0, &[(6, 1.1), (8, 1.05)]).is_err());
    }

    #[test]
    fn non_monotone_data_falls_back() {
        let c = extrapolate_gc(0.0, &[(6, 1.0), (8, 1.2), (10, 0.9)]).unwrap();
        assert!(c.fallback);
        assert_eq!(c.g_c, 0.9);
    }

    #[test]
    fn small_size_crossing_is_bracketed() {
        let mut ev = BinderEvaluator::new(1.0, 0.0, BinderOptions::default()).unwrap();
        let c = find_crossing(&mut ev, 6, (0.6, 1.6)).unwrap();
        assert!(c.bracket.1 - c.bracket.0 <= 1e-3 + 1e-12);
        assert!(c.g_c >= c.bracket.0 && c.g_c <= c.bracket.1);
        assert!((0.8..1.3).contains(&c.g_c), "{c:?}");
    }

    #[test]
    fn missing_sign_change_is_a_bracket_error() {
        let mut ev = BinderEvaluator::new(1.0, 0.0, BinderOptions::default()).unwrap();
        let e = find_crossing(&mut ev, 6, (0.1, 0.15)).unwrap_err();
        assert!(matches!(e, Error::Bracket(_)), "{e}");
    }
}
