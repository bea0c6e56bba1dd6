//! Vectorized operators on the doubled Hilbert space.
//!
//! An operator `A = sum_ij A_ij |i><j|` on N spins maps to the superket
//! `|A) = sum_ij A_ij |i> (x) |j>` with flat index `i * 2^N + j`. The row
//! index `i` is the configuration of the "+" copy, the column index `j` that
//! of the "-" copy. Bit `k` of a configuration is spin `k`; a set bit means
//! spin up (sigma^z = +1).

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{Real, C};

#[derive(Clone, Debug, PartialEq)]
pub struct Superket<T> {
    n_spins: usize,
    amps: Vec<C<T>>,
}

impl<T: Real> Superket<T> {
    pub fn zeros(n_spins: usize) -> Self {
        Self {
            n_spins,
            amps: vec![C::zero(); 1usize << (2 * n_spins)],
        }
    }

    pub fn from_amplitudes(n_spins: usize, amps: Vec<C<T>>) -> Result<Self> {
        let expected = 1usize << (2 * n_spins);
        if amps.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: amps.len(),
            });
        }
        Ok(Self { n_spins, amps })
    }

    /// The basis superket `|s><s'|`.
    pub fn basis(n_spins: usize, plus: usize, minus: usize) -> Self {
        let mut k = Self::zeros(n_spins);
        k.amps[flat_index(n_spins, plus, minus)] = C::new(T::one(), T::zero());
        k
    }

    /// The outer product `|psi><phi|` as a superket.
    pub fn outer(psi: &[C<T>], phi: &[C<T>]) -> Result<Self> {
        let d = psi.len();
        if phi.len() != d || !d.is_power_of_two() {
            return Err(Error::Shape(format!(
                "outer product needs equal power-of-two lengths, got {} and {}",
                d,
                phi.len()
            )));
        }
        let n = d.trailing_zeros() as usize;
        let mut amps = Vec::with_capacity(d * d);
        for a in psi {
            for b in phi {
                amps.push(*a * b.conj());
            }
        }
        Ok(Self { n_spins: n, amps })
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn hilbert_dim(&self) -> usize {
        1usize << self.n_spins
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C<T>] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C<T>> {
        self.amps
    }

    pub fn get(&self, plus: usize, minus: usize) -> C<T> {
        self.amps[flat_index(self.n_spins, plus, minus)]
    }

    pub fn set(&mut self, plus: usize, minus: usize, value: C<T>) {
        let k = flat_index(self.n_spins, plus, minus);
        self.amps[k] = value;
    }

    /// `(self|other) = Tr[self^dagger other]`.
    pub fn inner(&self, other: &Self) -> C<T> {
        debug_assert_eq!(self.dim(), other.dim());
        self.amps
            .iter()
            .zip(&other.amps)
            .fold(C::zero(), |acc, (a, b)| acc + a.conj() * *b)
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    /// Scales to unit Hilbert-Schmidt norm and returns the previous norm.
    pub fn normalize(&mut self) -> Result<T> {
        let n = self.norm();
        if !(n > T::zero()) || !n.is_finite() {
            return Err(Error::Degenerate(format!(
                "cannot normalize a superket of norm {n}"
            )));
        }
        let inv = C::new(T::one() / n, T::zero());
        self.scale_mut(inv);
        Ok(n)
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    pub fn scale_mut(&mut self, c: C<T>) {
        for z in &mut self.amps {
            *z = *z * c;
        }
    }

    pub fn scaled(&self, c: C<T>) -> Self {
        let mut out = self.clone();
        out.scale_mut(c);
        out
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: C<T>, other: &Self) {
        debug_assert_eq!(self.dim(), other.dim());
        for (a, b) in self.amps.iter_mut().zip(&other.amps) {
            *a = *a + c * *b;
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(C::new(-T::one(), T::zero()), other);
        out
    }

    /// `Tr[A] = sum_s A_ss`.
    pub fn trace(&self) -> C<T> {
        let d = self.hilbert_dim();
        (0..d).fold(C::zero(), |acc, s| acc + self.amps[s * d + s])
    }

    /// The superket of `A^dagger`.
    pub fn dagger(&self) -> Self {
        let d = self.hilbert_dim();
        let mut out = Self::zeros(self.n_spins);
        for i in 0..d {
            for j in 0..d {
                out.amps[j * d + i] = self.amps[i * d + j].conj();
            }
        }
        out
    }

    /// Largest entrywise deviation of the devectorized operator from Hermiticity.
    pub fn hermiticity_residual(&self) -> T {
        let d = self.hilbert_dim();
        let mut worst = T::zero();
        for i in 0..d {
            for j in i..d {
                let r = (self.amps[i * d + j] - self.amps[j * d + i].conj()).norm();
                if r > worst {
                    worst = r;
                }
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }

    pub fn cast<U: Real>(&self) -> Superket<U> {
        Superket {
            n_spins: self.n_spins,
            amps: self
                .amps
                .iter()
                .map(|z| C::new(U::from(z.re).unwrap(), U::from(z.im).unwrap()))
                .collect(),
        }
    }
}

#[inline]
pub fn flat_index(n_spins: usize, plus: usize, minus: usize) -> usize {
    (plus << n_spins) | minus
}

/// Maps a 2^N x 2^N operator to its superket.
pub fn vectorize<T: Real>(op: &CMatrix<T>) -> Result<Superket<T>> {
    if !op.is_square() {
        return Err(Error::Shape(format!(
            "vectorize needs a square matrix, got {}x{}",
            op.rows(),
            op.cols()
        )));
    }
    let d = op.rows();
    if !d.is_power_of_two() {
        return Err(Error::Shape(format!(
            "matrix dimension {d} is not a power of two"
        )));
    }
    Superket::from_amplitudes(d.trailing_zeros() as usize, op.data().to_vec())
}

/// Inverse of [`vectorize`].
pub fn devectorize<T: Real>(state: &Superket<T>) -> CMatrix<T> {
    let d = state.hilbert_dim();
    CMatrix::from_vec(d, d, state.amplitudes().to_vec()).expect("superket length is 4^N")
}

/// Kets used throughout: ferromagnetic and Neel configurations.
pub mod configs {
    /// All spins up.
    pub fn all_up(n: usize) -> usize {
        (1usize << n) - 1
    }

    /// Neel configuration with spin 0 up: up on even sites, down on odd sites.
    pub fn neel(n: usize) -> usize {
        (0..n).filter(|j| j % 2 == 0).fold(0, |acc, j| acc | (1 << j))
    }

    /// Mask of odd (B-sublattice) sites.
    pub fn odd_mask(n: usize) -> usize {
        (0..n).filter(|j| j % 2 == 1).fold(0, |acc, j| acc | (1 << j))
    }

    /// Mask of even (A-sublattice) sites.
    pub fn even_mask(n: usize) -> usize {
        (0..n).filter(|j| j % 2 == 0).fold(0, |acc, j| acc | (1 << j))
    }

    /// sigma^z eigenvalue of spin `j` in configuration `s`.
    #[inline]
    pub fn spin(s: usize, j: usize) -> i32 {
        if (s >> j) & 1 == 1 {
            1
        } else {
            -1
        }
    }

    /// Sum of sigma^z over all sites.
    #[inline]
    pub fn magnetization(s: usize, n: usize) -> i32 {
        2 * (s.count_ones() as i32) - n as i32
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(d: usize, seed: u64) -> CMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CMatrix::from_fn(d, d, |_, _| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn identity_vectorizes_to_unit_diagonal() {
        let k = vectorize(&CMatrix::<f64>::identity(2)).unwrap();
        let a: Vec<f64> = k.amplitudes().iter().map(|z| z.re).collect();
        assert_eq!(a, vec![1.0, 0.0, 0.0, 1.0]);
        assert_eq!(vectorize(&CMatrix::<f64>::identity(4)).unwrap().trace().re, 4.0);
    }

    #[test]
    fn inner_product_is_hilbert_schmidt() {
        let a = random_matrix(4, 1);
        let b = random_matrix(4, 2);
        let hs = a.adjoint().matmul(&b).trace();
        let ip = vectorize(&a).unwrap().inner(&vectorize(&b).unwrap());
        assert!((hs - ip).norm() < 1e-14);
    }

    #[test]
    fn round_trip_is_exact() {
        let a = random_matrix(8, 3);
        assert_eq!(devectorize(&vectorize(&a).unwrap()), a);
    }

    #[test]
    fn non_square_rejected() {
        let a = CMatrix::<f64>::zeros(2, 4);
        assert!(matches!(vectorize(&a), Err(Error::Shape(_))));
        assert!(Superket::<f64>::from_amplitudes(2, vec![C::zero(); 15]).is_err());
    }

    #[test]
    fn orthogonal_outer_product_is_traceless() {
        let n = 2;
        let f = Superket::<f64>::basis(n, configs::all_up(n), configs::neel(n));
        assert_eq!(f.trace(), C::zero());
    }

    #[test]
    fn outer_product_layout() {
        let psi = vec![C::new(1.0, 0.0), C::new(0.0, 1.0)];
        let k = Superket::outer(&psi, &psi).unwrap();
        let m = devectorize(&k);
        assert_eq!(m[(0, 1)], C::new(0.0, -1.0));
        assert_eq!(m[(1, 0)], C::new(0.0, 1.0));
        assert!(k.hermiticity_residual() < 1e-15);
    }

    #[test]
    fn neel_has_spin_zero_up() {
        assert_eq!(configs::neel(4), 0b0101);
        assert_eq!(configs::odd_mask(4), 0b1010);
        assert_eq!(configs::magnetization(configs::all_up(6), 6), 6);
    }
}
