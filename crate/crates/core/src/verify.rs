//! Property suite: structural identities of the Liouvillian and a few
//! cross-checks between independent code paths.

use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{cat_state, master_equation_density, unravel_trajectories, EvolveOptions, UnravelOptions};
use crate::error::Result;
use crate::linalg::{trace_distance, CMatrix};
use crate::meanfield::{solve_with_restarts, Beta, MfParams, SolveOptions};
use crate::operator::Liouvillian;
use crate::params::{Frame, LiouvilleParams};
use crate::spectral::{check_symmetries, full_spectrum, multiset_distance, steady_density, steady_states, zero_field_eigenvalues};
use crate::superket::Superket;

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub n: usize,
    /// The measured defect; the check passes when `value <= tol`.
    pub value: f64,
    pub tol: f64,
    pub passed: bool,
    pub note: String,
}

#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    fn push(&mut self, name: &str, n: usize, value: f64, tol: f64) {
        self.push_note(name, n, value, tol, String::new());
    }

    fn push_note(&mut self, name: &str, n: usize, value: f64, tol: f64, note: String) {
        self.checks.push(Check {
            name: name.to_string(),
            n,
            value,
            tol,
            passed: value <= tol,
            note,
        });
    }

    fn push_err(&mut self, name: &str, n: usize, e: impl std::fmt::Display) {
        self.push_note(name, n, f64::INFINITY, 0.0, format!("error: {e}"));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        for c in &self.checks {
            writeln!(
                w,
                "{} {:<22} N={:<2} value={:.3e} tol={:.1e} {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.n,
                c.value,
                c.tol,
                c.note
            )?;
        }
        Ok(())
    }
}

fn random_superket(n: usize, rng: &mut ChaCha8Rng) -> Superket<f64> {
    let d = 1usize << (2 * n);
    let amps = (0..d)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    Superket::from_amplitudes(n, amps).expect("length 4^N")
}

fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> Superket<f64> {
    let a = random_superket(n, rng);
    let mut h = a.clone();
    h.axpy(Complex64::new(1.0, 0.0), &a.dagger());
    h
}

/// Generic parameters used by the structural checks.
const G: f64 = 0.7;
const GAMMA: f64 = 0.9;
const J: f64 = 1.0;

fn structural_one(report: &mut VerifyReport, n: usize, rng: &mut ChaCha8Rng) -> Result<()> {
    let orig = LiouvilleParams::new(n, J, G, GAMMA, Frame::Original)?;
    let l = Liouvillian::new(orig)?;

    let rho = random_superket(n, rng);
    let tr = l.apply(&rho)?.trace().norm() / rho.norm();
    report.push("trace_preservation", n, tr, 1e-12);

    let h = random_hermitian(n, rng);
    let lh = l.apply(&h)?;
    let anti = lh.dagger();
    let mut sum = lh.clone();
    sum.axpy(Complex64::new(1.0, 0.0), &anti);
    report.push("hermiticity_structure", n, sum.max_abs_diff(&Superket::zeros(n)) / h.norm(), 1e-12);

    let mut worst: f64 = 0.0;
    for frame in [Frame::Original, Frame::Transformed] {
        if frame == Frame::Transformed && n % 2 != 0 {
            continue;
        }
        let k = Liouvillian::new(orig.with_frame(frame))?;
        let (s, r) = (random_superket(n, rng), random_superket(n, rng));
        let lhs = s.inner(&k.apply(&r)?);
        let rhs = k.apply_adjoint(&s)?.inner(&r);
        worst = worst.max((lhs - rhs).norm() / (s.norm() * r.norm()));
    }
    report.push("adjoint_duality", n, worst, 1e-12);

    let spec = full_spectrum(&orig)?;
    let sym = check_symmetries(&spec, &orig, 1e-8);
    report.push("spectrum_conjugation", n, sym.conjugation.max_mismatch, 1e-8);
    report.push("spectrum_pt_dihedral", n, sym.pt_dihedral.max_mismatch, 1e-8);

    if n % 2 == 0 {
        let tspec = full_spectrum(&orig.with_frame(Frame::Transformed))?;
        report.push(
            "frame_similarity",
            n,
            multiset_distance(&spec.eigenvalues, &tspec.eigenvalues),
            1e-8,
        );
    }

    match steady_states(&spec) {
        Ok(idx) => {
            let d = 1usize << n;
            let mixed = CMatrix::identity(d).scale(Complex64::new(1.0 / d as f64, 0.0));
            let dev = if idx.len() == 1 {
                steady_density(&spec, idx[0])?.max_abs_diff(&mixed)
            } else {
                f64::INFINITY
            };
            report.push_note("steady_state", n, dev, 1e-8, format!("{} steady mode(s)", idx.len()));
        }
        Err(e) => report.push_err("steady_state", n, e),
    }

    let zero = full_spectrum(&orig.with_g(0.0))?;
    report.push(
        "zero_field_spectrum",
        n,
        multiset_distance(&zero.eigenvalues, &zero_field_eigenvalues(n, J, GAMMA)),
        1e-9,
    );
    Ok(())
}

/// Structural identities at each size in `sizes`.
pub fn run_structural(sizes: &[usize], seed: u64) -> VerifyReport {
    let mut report = VerifyReport::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for &n in sizes {
        if let Err(e) = structural_one(&mut report, n, &mut rng) {
            report.push_err("structural", n, e);
        }
    }
    report
}

/// Structural suite at N = 2, 4 plus the mean-field closed form and a
/// small unraveling-versus-master-equation comparison.
pub fn run_full(seed: u64) -> VerifyReport {
    let mut report = run_structural(&[2, 4], seed);

    let mut worst: f64 = 0.0;
    let mut err = None;
    for g in [0.0f64, 0.3, 0.6, 0.9, 1.2, 2.0] {
        let want = if g < 1.0 { (1.0 - g * g).sqrt() } else { 0.0 };
        match MfParams::new(1.0, g, 0.0, Beta::Infinite).and_then(|p| solve_with_restarts(&p, &SolveOptions::default())) {
            Ok(s) => worst = worst.max((s.m().re - want).abs()),
            Err(e) => err = Some(e),
        }
    }
    match err {
        Some(e) => report.push_err("meanfield_closed_form", 0, e),
        None => report.push("meanfield_closed_form", 0, worst, 1e-6),
    }

    let unravel = || -> Result<f64> {
        let p = LiouvilleParams::new(2, 1.0, 1.0, 1.0, Frame::Original)?;
        let c = cat_state(2)?;
        let me = master_equation_density(&c.psi, &p, 1.0, &EvolveOptions::default())?;
        let opts = UnravelOptions {
            n_traj: 2000,
            seed,
            ..Default::default()
        };
        let un = unravel_trajectories(&c.psi, &p, &[1.0], &opts)?;
        trace_distance(&un.rho[0], &me)
    };
    match unravel() {
        Ok(d) => report.push("unraveling_agreement", 2, d, 0.05),
        Err(e) => report.push_err("unraveling_agreement", 2, e),
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structural_suite_passes() {
        let r = run_structural(&[2, 4], 7);
        let mut buf = Vec::new();
        r.write_text(&mut buf).unwrap();
        assert!(r.passed(), "{}", String::from_utf8(buf).unwrap());
        assert_eq!(r.checks.len(), 16);
    }

    #[test]
    fn odd_size_skips_frame_checks() {
        let r = run_structural(&[3], 1);
        assert!(r.checks.iter().all(|c| c.name != "frame_similarity"));
    }
}
