//! Physical parameters of the dephasing transverse-field Ising chain.

use crate::error::{Error, Result};
use crate::scalar::{to_f64, Real};

/// Which representation the Liouvillian acts in.
///
/// `Transformed` is the sublattice-rotated frame in which the most coherent
/// mode is ferromagnetic on both copies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Frame {
    Original,
    Transformed,
}

impl Frame {
    pub fn as_str(self) -> &'static str {
        match self {
            Frame::Original => "original",
            Frame::Transformed => "transformed",
        }
    }

    pub fn tag(self) -> u8 {
        match self {
            Frame::Original => 0,
            Frame::Transformed => 1,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(Frame::Original),
            1 => Some(Frame::Transformed),
            _ => None,
        }
    }
}

impl std::str::FromStr for Frame {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "original" | "orig" => Ok(Frame::Original),
            "transformed" | "rotated" => Ok(Frame::Transformed),
            other => Err(Error::InvalidParams(format!("unknown frame '{other}'"))),
        }
    }
}

/// Boundary condition of the chain. Only periodic chains are supported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Boundary {
    #[default]
    Periodic,
}

/// Largest N for which dense 4^N x 4^N matrices may be built.
pub const DEFAULT_DENSE_CAP: usize = 6;

/// Dense cap, overridable through the `LIOUVILLE_DENSE_CAP` environment variable.
pub fn dense_cap() -> usize {
    std::env::var("LIOUVILLE_DENSE_CAP")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_DENSE_CAP)
}

/// Largest N for which superkets are allocated at all (4^N amplitudes).
pub const MAX_SPINS: usize = 14;

/// Parameters of the transverse-field Ising chain under site-local dephasing
/// `L_j = sqrt(gamma) sigma^z_j`.
///
/// Bonds are `(j, j+1 mod N)` for `j = 0..N`, so a chain of N sites always
/// carries N bonds (for N = 2 the single pair is counted twice).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LiouvilleParams<T> {
    pub n_spins: usize,
    pub j: T,
    pub g: T,
    pub gamma: T,
    pub frame: Frame,
    pub boundary: Boundary,
}

impl<T: Real> LiouvilleParams<T> {
    pub fn new(n_spins: usize, j: T, g: T, gamma: T, frame: Frame) -> Result<Self> {
        let p = Self {
            n_spins,
            j,
            g,
            gamma,
            frame,
            boundary: Boundary::Periodic,
        };
        p.validate()?;
        Ok(p)
    }

    /// Checks the parameter invariants.
    ///
    /// Odd N is accepted in the original frame (single-spin checks); the
    /// transformed frame needs the A/B sublattice split and therefore even N.
    pub fn validate(&self) -> Result<()> {
        if self.n_spins == 0 {
            return Err(Error::InvalidParams("N must be positive".into()));
        }
        if self.n_spins > MAX_SPINS {
            return Err(Error::InvalidParams(format!(
                "N = {} exceeds the supported maximum {MAX_SPINS}",
                self.n_spins
            )));
        }
        if self.frame == Frame::Transformed && self.n_spins % 2 != 0 {
            return Err(Error::InvalidParams(format!(
                "the transformed frame requires even N, got {}",
                self.n_spins
            )));
        }
        for (name, v) in [("J", self.j), ("g", self.g), ("gamma", self.gamma)] {
            if !v.is_finite() || v < T::zero() {
                return Err(Error::InvalidParams(format!(
                    "{name} must be finite and non-negative, got {}",
                    to_f64(v)
                )));
            }
        }
        Ok(())
    }

    pub fn require_even(&self) -> Result<()> {
        if self.n_spins % 2 != 0 {
            return Err(Error::InvalidParams(format!(
                "N must be even, got {}",
                self.n_spins
            )));
        }
        Ok(())
    }

    pub fn with_frame(mut self, frame: Frame) -> Self {
        self.frame = frame;
        self
    }

    pub fn with_g(mut self, g: T) -> Self {
        self.g = g;
        self
    }

    pub fn with_gamma(mut self, gamma: T) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n_spins = n;
        self
    }

    /// Hilbert-space dimension 2^N.
    pub fn hilbert_dim(&self) -> usize {
        1usize << self.n_spins
    }

    /// Superket dimension 4^N.
    pub fn dim(&self) -> usize {
        1usize << (2 * self.n_spins)
    }

    /// Rough bound on the spectral radius, `2JN + 2 gamma N + gN`.
    pub fn spectral_scale(&self) -> T {
        let n = T::from_usize(self.n_spins).unwrap();
        let two = T::one() + T::one();
        two * self.j * n + two * self.gamma * n + self.g * n
    }

    pub fn check_dense(&self, cap: usize) -> Result<()> {
        if self.n_spins > cap {
            return Err(Error::Capacity {
                n: self.n_spins,
                cap,
            });
        }
        Ok(())
    }

    pub fn cast<U: Real>(&self) -> LiouvilleParams<U> {
        LiouvilleParams {
            n_spins: self.n_spins,
            j: U::from_f64(to_f64(self.j)).unwrap(),
            g: U::from_f64(to_f64(self.g)).unwrap(),
            gamma: U::from_f64(to_f64(self.gamma)).unwrap(),
            frame: self.frame,
            boundary: self.boundary,
        }
    }
}

impl<T: Real> std::fmt::Display for LiouvilleParams<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "N={} J={} g={} gamma={} frame={}",
            self.n_spins,
            self.j,
            self.g,
            self.gamma,
            self.frame.as_str()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(LiouvilleParams::new(0, 1.0, 0.0, 1.0, Frame::Original).is_err());
        assert!(LiouvilleParams::new(3, 1.0, 0.0, 1.0, Frame::Transformed).is_err());
        assert!(LiouvilleParams::new(4, 1.0, -0.1, 1.0, Frame::Original).is_err());
        assert!(LiouvilleParams::new(4, f64::NAN, 0.0, 1.0, Frame::Original).is_err());
        assert!(LiouvilleParams::new(4, 1.0, 0.0, f64::INFINITY, Frame::Original).is_err());
        assert!(LiouvilleParams::new(1, 0.0, 0.0, 1.0, Frame::Original).is_ok());
    }

    #[test]
    fn dimensions() {
        let p = LiouvilleParams::new(3, 1.0, 0.5, 1.0, Frame::Original).unwrap();
        assert_eq!(p.hilbert_dim(), 8);
        assert_eq!(p.dim(), 64);
        assert!(p.require_even().is_err());
    }
}
