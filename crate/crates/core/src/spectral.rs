//! Dense eigendecomposition of the Liouvillian with biorthonormal left modes.

use std::io::Write;

use faer::linalg::solvers::DenseSolveCore;
use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{dense_liouvillian_with_cap, Liouvillian};
use crate::params::{dense_cap, LiouvilleParams};
use crate::superket::{configs, devectorize, Superket};

#[derive(Clone, Copy, Debug)]
pub struct SpectrumOptions {
    /// Eigenvalues closer than this are grouped into one cluster.
    pub degeneracy_tol: f64,
    /// Steady-state threshold relative to the spectral radius.
    pub zero_tol_rel: f64,
    /// Left-mode norm above which a cluster is reported as (near-)defective.
    pub defect_norm: f64,
    pub dense_cap: usize,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            degeneracy_tol: 1e-8,
            zero_tol_rel: 1e-9,
            defect_norm: 1e6,
            dense_cap: dense_cap(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Spectrum {
    pub params: LiouvilleParams<f64>,
    pub eigenvalues: Vec<Complex64>,
    /// Unit Hilbert-Schmidt norm.
    pub right_modes: Vec<Superket<f64>>,
    /// `(left_a | right_b) = delta_ab`.
    pub left_modes: Vec<Superket<f64>>,
    /// Groups of indices with nearly equal eigenvalues (size > 1 only).
    pub clusters: Vec<Vec<usize>>,
    /// Clusters whose right modes are numerically linearly dependent.
    pub defective_clusters: Vec<usize>,
    /// `||V||_F ||V^{-1}||_F / dim`, a cheap conditioning figure.
    pub condition: f64,
    /// max_k ||L right_k - lambda_k right_k||.
    pub max_residual: f64,
    pub zero_tol: f64,
}

fn sort_key(z: Complex64) -> (i64, f64) {
    ((z.im.abs() / 1e-9).round() as i64, z.re)
}

/// All `4^N` eigenpairs of the dense Liouvillian in `params.frame`.
pub fn full_spectrum(params: &LiouvilleParams<f64>) -> Result<Spectrum> {
    full_spectrum_with(params, &SpectrumOptions::default())
}

pub fn full_spectrum_with(params: &LiouvilleParams<f64>, opts: &SpectrumOptions) -> Result<Spectrum> {
    let dense = dense_liouvillian_with_cap(params, opts.dense_cap)?;
    let n = dense.matrix.rows();
    let a = Mat::<Complex64>::from_fn(n, n, |i, j| dense.matrix[(i, j)]);
    drop(dense);
    let evd = a
        .eigen()
        .map_err(|e| Error::Eigensolver(format!("{e:?} at {params}")))?;
    drop(a);

    let mut v = evd.U().to_owned();
    let values: Vec<Complex64> = (0..n).map(|k| evd.S()[k]).collect();
    drop(evd);
    for k in 0..n {
        let nrm = v.col(k).norm_l2();
        if nrm > 0.0 {
            for i in 0..n {
                v[(i, k)] /= nrm;
            }
        }
    }
    // Degenerate eigenspaces come back with an arbitrary, often badly
    // conditioned basis; orthonormalize each cluster before inverting.
    let raw_clusters = find_clusters(&values, opts.degeneracy_tol);
    let mut collapsed = vec![false; raw_clusters.len()];
    for (c, members) in raw_clusters.iter().enumerate() {
        collapsed[c] = orthonormalize_columns(&mut v, members);
    }
    let w = v.partial_piv_lu().inverse();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| {
        let (kx, rx) = sort_key(values[x]);
        let (ky, ry) = sort_key(values[y]);
        kx.cmp(&ky).then(rx.total_cmp(&ry))
    });

    let nspin = params.n_spins;
    let mut eigenvalues = Vec::with_capacity(n);
    let mut right_modes = Vec::with_capacity(n);
    let mut left_modes = Vec::with_capacity(n);
    for &k in &order {
        eigenvalues.push(values[k]);
        let r: Vec<Complex64> = (0..n).map(|i| v[(i, k)]).collect();
        let l: Vec<Complex64> = (0..n).map(|i| w[(k, i)].conj()).collect();
        right_modes.push(Superket::from_amplitudes(nspin, r)?);
        left_modes.push(Superket::from_amplitudes(nspin, l)?);
    }
    let condition = v.norm_l2() * w.norm_l2() / n as f64;
    drop(v);
    drop(w);

    let kernel = Liouvillian::new(*params)?;
    let mut max_residual: f64 = 0.0;
    for (lam, r) in eigenvalues.iter().zip(&right_modes) {
        let lr = kernel.apply(r)?;
        max_residual = max_residual.max(lr.sub(&r.scaled(*lam)).norm());
    }

    let mut position = vec![0usize; n];
    for (pos, &k) in order.iter().enumerate() {
        position[k] = pos;
    }
    let mut clusters: Vec<(Vec<usize>, bool)> = raw_clusters
        .iter()
        .zip(&collapsed)
        .map(|(members, &bad)| {
            let mut m: Vec<usize> = members.iter().map(|&k| position[k]).collect();
            m.sort_unstable();
            let bad = bad || m.iter().any(|&k| left_modes[k].norm() > opts.defect_norm);
            (m, bad)
        })
        .collect();
    // A Jordan block splits into eigenvalues ~sqrt(eps) apart with huge
    // left norms; group those so they are reported rather than trusted.
    let radius = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let suspicious: Vec<usize> = (0..n)
        .filter(|&k| left_modes[k].norm() > opts.defect_norm)
        .filter(|k| !clusters.iter().any(|(m, _)| m.contains(k)))
        .collect();
    let near = 1e-4 * radius.max(1.0);
    let suspicious_values: Vec<Complex64> = suspicious.iter().map(|&k| eigenvalues[k]).collect();
    for group in find_clusters(&suspicious_values, near) {
        clusters.push((group.iter().map(|&i| suspicious[i]).collect(), true));
    }
    clusters.sort();
    let defective_clusters = (0..clusters.len()).filter(|&c| clusters[c].1).collect();
    let clusters = clusters.into_iter().map(|(m, _)| m).collect();

    Ok(Spectrum {
        params: *params,
        eigenvalues,
        right_modes,
        left_modes,
        clusters,
        defective_clusters,
        condition,
        max_residual,
        zero_tol: opts.zero_tol_rel * radius.max(1.0),
    })
}

/// Modified Gram-Schmidt (two passes) on the given columns. Returns true if
/// a column became numerically dependent, i.e. the block looks defective.
fn orthonormalize_columns(v: &mut Mat<Complex64>, cols: &[usize]) -> bool {
    let n = v.nrows();
    let mut collapsed = false;
    for (a, &ca) in cols.iter().enumerate() {
        let before = v.col(ca).norm_l2();
        for _ in 0..2 {
            for &cb in &cols[..a] {
                let mut dot = Complex64::new(0.0, 0.0);
                for i in 0..n {
                    dot += v[(i, cb)].conj() * v[(i, ca)];
                }
                for i in 0..n {
                    let x = v[(i, cb)];
                    v[(i, ca)] -= dot * x;
                }
            }
        }
        let nrm = v.col(ca).norm_l2();
        if nrm < 1e-8 * before {
            collapsed = true;
            continue;
        }
        for i in 0..n {
            v[(i, ca)] /= nrm;
        }
    }
    collapsed
}

fn find_clusters(values: &[Complex64], tol: f64) -> Vec<Vec<usize>> {
    // union-find over pairs within tol; values are few enough for O(n^2)
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| values[a].re.total_cmp(&values[b].re));
    for a in 0..n {
        for b in (a + 1)..n {
            let (i, j) = (idx[a], idx[b]);
            if values[j].re - values[i].re > tol {
                break;
            }
            if (values[i] - values[j]).norm() < tol {
                let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = root(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().filter(|g| g.len() > 1).collect()
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Index of the eigenvalue with the most negative real part.
    pub fn most_coherent(&self) -> usize {
        (0..self.len())
            .min_by(|&a, &b| self.eigenvalues[a].re.total_cmp(&self.eigenvalues[b].re))
            .expect("non-empty spectrum")
    }

    /// `max |(L_a|R_b) - delta_ab|`, skipping pairs inside a cluster and
    /// anything touching a defective cluster.
    pub fn biorthonormality_residual(&self) -> f64 {
        let mut cluster_of = vec![usize::MAX; self.len()];
        let mut defective = vec![false; self.len()];
        for (c, members) in self.clusters.iter().enumerate() {
            for &k in members {
                cluster_of[k] = c;
                defective[k] = self.defective_clusters.contains(&c);
            }
        }
        let mut worst: f64 = 0.0;
        for a in 0..self.len() {
            for b in 0..self.len() {
                if a != b && cluster_of[a] != usize::MAX && cluster_of[a] == cluster_of[b] {
                    continue;
                }
                if defective[a] || defective[b] {
                    continue;
                }
                let target = if a == b { 1.0 } else { 0.0 };
                let d = self.left_modes[a].inner(&self.right_modes[b]) - target;
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    /// `sum_a lambda_a |R_a)(L_a|` as a dense matrix.
    pub fn reconstruct(&self) -> crate::linalg::CMatrix<f64> {
        let n = self.len();
        let mut m = crate::linalg::CMatrix::zeros(n, n);
        for a in 0..n {
            let r = self.right_modes[a].amplitudes();
            let l = self.left_modes[a].amplitudes();
            let lam = self.eigenvalues[a];
            for i in 0..n {
                let ri = lam * r[i];
                for j in 0..n {
                    m[(i, j)] += ri * l[j].conj();
                }
            }
        }
        m
    }

    /// Coefficients `c_a = (L_a|rho)`.
    pub fn expansion(&self, rho: &Superket<f64>) -> Vec<Complex64> {
        self.left_modes.iter().map(|l| l.inner(rho)).collect()
    }

    /// `sum_a c_a exp(-i lambda_a t) R_a` with `c_a = (L_a|rho0)`.
    pub fn propagate(&self, rho0: &Superket<f64>, t: f64) -> Superket<f64> {
        let mut out = Superket::zeros(rho0.n_spins());
        for ((c, lam), r) in self.expansion(rho0).iter().zip(&self.eigenvalues).zip(&self.right_modes) {
            let phase = (Complex64::new(0.0, -1.0) * lam * t).exp();
            out.axpy(c * phase, r);
        }
        out
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let steady = steady_set(self);
        writeln!(w, "index,re_lambda,im_lambda,abs_trace,steady")?;
        for (k, lam) in self.eigenvalues.iter().enumerate() {
            writeln!(
                w,
                "{k},{:.16e},{:.16e},{:.16e},{}",
                lam.re,
                lam.im,
                self.right_modes[k].trace().norm(),
                steady[k] as u8
            )?;
        }
        Ok(())
    }
}

fn steady_set(spec: &Spectrum) -> Vec<bool> {
    spec.eigenvalues.iter().map(|z| z.norm() < spec.zero_tol).collect()
}

/// Indices with `|lambda| < zero_tol`.
pub fn steady_states(spec: &Spectrum) -> Result<Vec<usize>> {
    let idx: Vec<usize> = steady_set(spec)
        .iter()
        .enumerate()
        .filter_map(|(k, &s)| s.then_some(k))
        .collect();
    if idx.is_empty() {
        return Err(Error::Invariant(format!(
            "no eigenvalue below {:.3e} for {}",
            spec.zero_tol, spec.params
        )));
    }
    Ok(idx)
}

/// Steady mode rescaled to a unit-trace density matrix (the phase is fixed
/// by the trace). Fails on a traceless combination.
pub fn steady_density(spec: &Spectrum, index: usize) -> Result<crate::linalg::CMatrix<f64>> {
    let mode = &spec.right_modes[index];
    let tr = mode.trace();
    if tr.norm() < 1e-12 {
        return Err(Error::Degenerate(format!("steady mode {index} is traceless")));
    }
    Ok(devectorize(&mode.scaled(tr.inv())))
}

#[derive(Clone, Debug)]
pub struct SymmetryCheck {
    pub name: &'static str,
    pub max_mismatch: f64,
    pub offending: Vec<Complex64>,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct SymmetryReport {
    /// `lambda -> -conj(lambda)`: Hermitian conjugation of modes.
    pub conjugation: SymmetryCheck,
    /// `lambda -> -lambda - 2 i gamma N`: the combined PT reflection.
    pub pt_dihedral: SymmetryCheck,
    /// `lambda -> conj(lambda) - 2 i gamma N`: reflection about `Im = -gamma N`.
    pub horizontal: SymmetryCheck,
    /// `|sum lambda / 4^N + i gamma N|`.
    pub centroid_error: f64,
    pub tol: f64,
}

impl SymmetryReport {
    pub fn passed(&self) -> bool {
        self.conjugation.passed && self.pt_dihedral.passed && self.horizontal.passed && self.centroid_error < self.tol
    }
}

fn check_map(values: &[Complex64], tol: f64, name: &'static str, map: impl Fn(Complex64) -> Complex64) -> SymmetryCheck {
    // greedy matching of the mapped multiset against the original, nearest first
    let mut sorted: Vec<Complex64> = values.to_vec();
    sorted.sort_by(|a, b| a.re.total_cmp(&b.re));
    let mut used = vec![false; sorted.len()];
    let mut max_mismatch: f64 = 0.0;
    let mut offending = Vec::new();
    for &z in values {
        let target = map(z);
        let start = sorted.partition_point(|w| w.re < target.re - tol.max(1e-6));
        let mut best: Option<(usize, f64)> = None;
        for (k, w) in sorted.iter().enumerate().skip(start) {
            if w.re > target.re + tol.max(1e-6) {
                break;
            }
            if used[k] {
                continue;
            }
            let d = (w - target).norm();
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((k, d));
            }
        }
        match best {
            Some((k, d)) => {
                used[k] = true;
                max_mismatch = max_mismatch.max(d);
                if d > tol {
                    offending.push(z);
                }
            }
            None => {
                max_mismatch = f64::INFINITY;
                offending.push(z);
            }
        }
    }
    SymmetryCheck {
        name,
        max_mismatch,
        passed: offending.is_empty(),
        offending,
    }
}

/// Checks the reflection symmetries of the spectrum within `tol`.
pub fn check_symmetries(spec: &Spectrum, params: &LiouvilleParams<f64>, tol: f64) -> SymmetryReport {
    let shift = Complex64::new(0.0, -2.0 * params.gamma * params.n_spins as f64);
    let v = &spec.eigenvalues;
    let sum: Complex64 = v.iter().sum();
    let centroid = sum / v.len() as f64;
    SymmetryReport {
        conjugation: check_map(v, tol, "conjugation", |z| -z.conj()),
        pt_dihedral: check_map(v, tol, "pt-dihedral", |z| -z + shift),
        horizontal: check_map(v, tol, "horizontal", |z| z.conj() + shift),
        centroid_error: (centroid - shift * 0.5).norm(),
        tol,
    }
}

/// Exact spectrum at g = 0 in the original frame: one eigenvalue per
/// basis superket `|s)(s'|`.
pub fn zero_field_eigenvalues(n: usize, j: f64, gamma: f64) -> Vec<Complex64> {
    let d = 1usize << n;
    let mut out = Vec::with_capacity(d * d);
    for s in 0..d {
        for sp in 0..d {
            let mut ising = 0;
            let mut deph = 0;
            for a in 0..n {
                let b = (a + 1) % n;
                ising += configs::spin(s, a) * configs::spin(s, b) - configs::spin(sp, a) * configs::spin(sp, b);
                deph += configs::spin(s, a) * configs::spin(sp, a);
            }
            out.push(Complex64::new(-j * ising as f64, gamma * (deph - n as i32) as f64));
        }
    }
    out
}

/// Largest distance in a nearest-first greedy pairing of two multisets;
/// infinite if their sizes differ.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for z in a {
        let mut best: Option<(usize, f64)> = None;
        for (k, w) in b.iter().enumerate() {
            if !used[k] {
                let d = (w - z).norm();
                if best.map_or(true, |(_, bd)| d < bd) {
                    best = Some((k, d));
                }
            }
        }
        let (k, d) = best.expect("equal lengths");
        used[k] = true;
        worst = worst.max(d);
    }
    worst
}
