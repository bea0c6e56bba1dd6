//! Finite-temperature ("Liouvillian canonical") averages
//! `Tr[O exp(-beta L)] / Tr[exp(-beta L)]` over the doubled space.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{expm, CMatrix};
use crate::meanfield::Axis;
use crate::operator::{dense_liouvillian, plus_magnetization_sq_diag};
use crate::params::{Frame, LiouvilleParams};
use crate::spectral::{full_spectrum, Spectrum};
use crate::superket::Superket;

/// A superoperator observable on the doubled space.
#[derive(Clone, Debug)]
pub enum Observable {
    Identity,
    /// Diagonal in the flat `(plus, minus)` basis.
    Diagonal { tag: String, diag: Vec<Complex64> },
    Dense { tag: String, matrix: CMatrix<f64> },
}

impl Observable {
    /// `(M+^z)^2` with `M+^z = (1/N) sum_j Z_{j,+}`.
    pub fn plus_magnetization_sq(n: usize) -> Self {
        Observable::Diagonal {
            tag: "plus_magnetization_sq".into(),
            diag: plus_magnetization_sq_diag(n),
        }
    }

    pub fn tag(&self) -> &str {
        match self {
            Observable::Identity => "identity",
            Observable::Diagonal { tag, .. } | Observable::Dense { tag, .. } => tag,
        }
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        let got = match self {
            Observable::Identity => return Ok(()),
            Observable::Diagonal { diag, .. } => diag.len(),
            Observable::Dense { matrix, .. } => {
                if matrix.rows() != matrix.cols() {
                    return Err(Error::Shape("observable must be square".into()));
                }
                matrix.rows()
            }
        };
        if got != dim {
            return Err(Error::DimensionMismatch { expected: dim, got });
        }
        Ok(())
    }

    pub fn apply(&self, v: &Superket<f64>) -> Superket<f64> {
        match self {
            Observable::Identity => v.clone(),
            Observable::Diagonal { diag, .. } => {
                let amps = v.amplitudes().iter().zip(diag).map(|(a, d)| a * d).collect();
                Superket::from_amplitudes(v.n_spins(), amps).expect("dimension checked")
            }
            Observable::Dense { matrix, .. } => {
                Superket::from_amplitudes(v.n_spins(), matrix.mul_vec(v.amplitudes())).expect("dimension checked")
            }
        }
    }

    /// `Tr[O A]` for a dense `A`.
    fn trace_product(&self, a: &CMatrix<f64>) -> Complex64 {
        let n = a.rows();
        match self {
            Observable::Identity => a.trace(),
            Observable::Diagonal { diag, .. } => (0..n).map(|k| diag[k] * a[(k, k)]).sum(),
            Observable::Dense { matrix, .. } => {
                let mut s = Complex64::new(0.0, 0.0);
                for i in 0..n {
                    for k in 0..n {
                        s += matrix[(i, k)] * a[(k, i)];
                    }
                }
                s
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThermalMethod {
    Eigen,
    Expm,
}

#[derive(Clone, Debug)]
pub struct ThermalResult {
    pub value: Complex64,
    pub beta: f64,
    pub params: LiouvilleParams<f64>,
    pub observable: String,
    pub method: ThermalMethod,
}

fn check_beta(beta: f64) -> Result<()> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::InvalidParams(format!("beta must be finite and >= 0, got {beta}")));
    }
    Ok(())
}

fn ratio(num: Complex64, den: Complex64, scale: f64) -> Result<Complex64> {
    // den is a sum of unit-or-smaller weights; if they cancel the ratio is meaningless
    if !(den.norm() > 1e-13 * scale.max(1.0)) {
        return Err(Error::Degenerate(format!("partition sum cancels ({den:.3e})")));
    }
    Ok(num / den)
}

/// Canonical average from a precomputed spectrum. Defective spectra fall
/// back to the dense exponential.
pub fn canonical_average_spectrum(spec: &Spectrum, obs: &Observable, beta: f64) -> Result<ThermalResult> {
    check_beta(beta)?;
    obs.check_dim(spec.len())?;
    if !spec.defective_clusters.is_empty() {
        return canonical_average_expm(obs, beta, &spec.params);
    }
    let shift = spec.eigenvalues.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = Complex64::new(0.0, 0.0);
    let mut total = 0.0;
    for ((lam, l), r) in spec.eigenvalues.iter().zip(&spec.left_modes).zip(&spec.right_modes) {
        let w = (-(lam - shift) * beta).exp();
        let o = match obs {
            Observable::Identity => Complex64::new(1.0, 0.0),
            _ => l.inner(&obs.apply(r)),
        };
        num += w * o;
        den += w;
        total += w.norm();
    }
    Ok(ThermalResult {
        value: ratio(num, den, total)?,
        beta,
        params: spec.params,
        observable: obs.tag().to_string(),
        method: ThermalMethod::Eigen,
    })
}

/// Canonical average through the dense scaling-and-squaring exponential.
pub fn canonical_average_expm(obs: &Observable, beta: f64, params: &LiouvilleParams<f64>) -> Result<ThermalResult> {
    check_beta(beta)?;
    let mut l = dense_liouvillian(params)?.matrix;
    obs.check_dim(l.rows())?;
    // Gershgorin lower bound on Re(lambda) keeps every weight <= 1-ish
    let shift = (0..l.rows())
        .map(|i| {
            let off: f64 = (0..l.cols()).filter(|&j| j != i).map(|j| l[(i, j)].norm()).sum();
            l[(i, i)].re - off
        })
        .fold(f64::INFINITY, f64::min);
    l.add_diag(Complex64::new(-shift, 0.0));
    let e = expm(&l.scale(Complex64::new(-beta, 0.0)))?;
    let den = e.trace();
    let total = (0..e.rows()).map(|k| e[(k, k)].norm()).sum();
    Ok(ThermalResult {
        value: ratio(obs.trace_product(&e), den, total)?,
        beta,
        params: *params,
        observable: obs.tag().to_string(),
        method: ThermalMethod::Expm,
    })
}

/// Canonical average in `params.frame`.
pub fn canonical_average(obs: &Observable, beta: f64, params: &LiouvilleParams<f64>) -> Result<ThermalResult> {
    check_beta(beta)?;
    let spec = full_spectrum(params)?;
    canonical_average_spectrum(&spec, obs, beta)
}

#[derive(Clone, Copy, Debug)]
pub struct ThermalMagnetization {
    /// `sqrt(max(Re <(M+^z)^2>, 0))`.
    pub m: f64,
    pub raw: Complex64,
    /// The real part was negative and has been clipped to zero.
    pub clipped: bool,
}

impl ThermalMagnetization {
    fn from_raw(raw: Complex64) -> Self {
        Self {
            m: raw.re.max(0.0).sqrt(),
            raw,
            clipped: raw.re < 0.0,
        }
    }
}

/// `sqrt(Re <(M+^z)^2>_beta)` in the transformed frame.
pub fn squared_magnetization_thermal(beta: f64, params: &LiouvilleParams<f64>) -> Result<ThermalMagnetization> {
    let p = params.with_frame(Frame::Transformed);
    let r = canonical_average(&Observable::plus_magnetization_sq(p.n_spins), beta, &p)?;
    Ok(ThermalMagnetization::from_raw(r.value))
}

/// Same as [`squared_magnetization_thermal`] for several `beta` sharing one
/// eigendecomposition.
pub fn squared_magnetization_betas(betas: &[f64], params: &LiouvilleParams<f64>) -> Result<Vec<ThermalMagnetization>> {
    let p = params.with_frame(Frame::Transformed);
    let spec = full_spectrum(&p)?;
    let obs = Observable::plus_magnetization_sq(p.n_spins);
    betas
        .iter()
        .map(|&b| canonical_average_spectrum(&spec, &obs, b).map(|r| ThermalMagnetization::from_raw(r.value)))
        .collect()
}

#[derive(Clone, Debug)]
pub struct ThermalCell {
    pub gamma: f64,
    pub g: f64,
    pub result: Option<ThermalMagnetization>,
}

#[derive(Clone, Debug)]
pub struct ThermalMap {
    pub n_spins: usize,
    pub j: f64,
    pub beta: f64,
    pub gamma: Axis,
    pub g: Axis,
    /// Row-major: gamma outer, g inner.
    pub cells: Vec<ThermalCell>,
}

/// `m` on a `(gamma, g)` grid; cells run in parallel, failures become `None`.
pub fn thermal_heatmap(n_spins: usize, j: f64, beta: f64, gamma: Axis, g: Axis) -> Result<ThermalMap> {
    check_beta(beta)?;
    let base = LiouvilleParams::new(n_spins, j, 0.0, 0.0, Frame::Transformed)?;
    let idx: Vec<(usize, usize)> = (0..gamma.count).flat_map(|a| (0..g.count).map(move |b| (a, b))).collect();
    let cells = idx
        .par_iter()
        .map(|&(a, b)| {
            let (gm, gv) = (gamma.value(a), g.value(b));
            let p = base.with_gamma(gm).with_g(gv);
            ThermalCell {
                gamma: gm,
                g: gv,
                result: squared_magnetization_thermal(beta, &p).ok(),
            }
        })
        .collect();
    Ok(ThermalMap {
        n_spins,
        j,
        beta,
        gamma,
        g,
        cells,
    })
}

impl ThermalMap {
    pub fn get(&self, gamma_index: usize, g_index: usize) -> &ThermalCell {
        &self.cells[gamma_index * self.g.count + g_index]
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "gamma,g,m,re_m2,im_m2,clipped")?;
        for c in &self.cells {
            match &c.result {
                Some(r) => writeln!(
                    w,
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                    c.gamma, c.g, r.m, r.raw.re, r.raw.im, r.clipped as u8
                )?,
                None => writeln!(w, "{:.16e},{:.16e},nan,nan,nan,0", c.gamma, c.g)?,
            }
        }
        Ok(())
    }
}
