//! Matrix-free and dense Liouvillian of the dephasing Ising chain.
//!
//! With `i d rho/dt = L(rho)` the vectorized generator reads
//!
//! ```text
//! L  = -J sum_<jk> (Z+_j Z+_k - Z-_j Z-_k) - g sum_j (X+_j - X-_j)
//!      + i gamma sum_j Z+_j Z-_j - i gamma N
//! L~ = -J sum_<jk> (Z+_j Z+_k + Z-_j Z-_k) - g sum_j (X+_j + X-_j)
//!      + i gamma sum_j sgn(j) Z+_j Z-_j - i gamma N
//! ```
//!
//! where `L~ = U^dagger L U` and `U` acts only on the "-" copy.

use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::params::{dense_cap, Frame, LiouvilleParams, MAX_SPINS};
use crate::scalar::{count, Real, C};
use crate::superket::{configs, Superket};

/// Sum over bonds `(j, j+1 mod N)` of `z_j z_{j+1}`.
pub(crate) fn bond_sum(s: usize, n: usize) -> i32 {
    let mask = (1usize << n) - 1;
    let rot = ((s >> 1) | (s << (n - 1))) & mask;
    n as i32 - 2 * (s ^ rot).count_ones() as i32
}

/// Precomputed action of `L` (or `L~`) for one parameter set.
#[derive(Clone, Debug)]
pub struct Liouvillian<T> {
    params: LiouvilleParams<T>,
    bonds: Vec<i32>,
    /// `-J * bond_sum(s)`.
    ising: Vec<T>,
    /// Imaginary part of the diagonal as a function of `s ^ s'`.
    dephase: Vec<T>,
    even_mask: usize,
    odd_mask: usize,
    plus_coef: T,
    minus_coef: T,
}

impl<T: Real> Liouvillian<T> {
    pub fn new(params: LiouvilleParams<T>) -> Result<Self> {
        params.validate()?;
        let n = params.n_spins;
        let bonds: Vec<i32> = (0..(1usize << n)).map(|s| bond_sum(s, n)).collect();
        let ising = bonds.iter().map(|&b| -params.j * T::from_i32(b).unwrap()).collect();
        let (even_mask, odd_mask) = (configs::even_mask(n), configs::odd_mask(n));
        let dephase = (0..(1usize << n))
            .map(|x: usize| {
                let k = match params.frame {
                    Frame::Original => -2 * x.count_ones() as i32,
                    Frame::Transformed => {
                        2 * ((x & odd_mask).count_ones() as i32 - (x & even_mask).count_ones() as i32)
                            - n as i32
                    }
                };
                params.gamma * T::from_i32(k).unwrap()
            })
            .collect();
        let (plus_coef, minus_coef) = match params.frame {
            Frame::Original => (-params.g, params.g),
            Frame::Transformed => (-params.g, -params.g),
        };
        Ok(Self {
            params,
            bonds,
            ising,
            dephase,
            even_mask: configs::even_mask(n),
            odd_mask: configs::odd_mask(n),
            plus_coef,
            minus_coef,
        })
    }

    pub fn params(&self) -> &LiouvilleParams<T> {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.params.dim()
    }

    /// Diagonal matrix element at basis superket `(s, s')`.
    #[inline]
    pub fn diagonal(&self, plus: usize, minus: usize) -> C<T> {
        let p = &self.params;
        let n = p.n_spins;
        let x = plus ^ minus;
        let (ising, dephase) = match p.frame {
            Frame::Original => (
                self.bonds[plus] - self.bonds[minus],
                n as i32 - 2 * x.count_ones() as i32,
            ),
            Frame::Transformed => (
                self.bonds[plus] + self.bonds[minus],
                2 * ((x & self.odd_mask).count_ones() as i32
                    - (x & self.even_mask).count_ones() as i32),
            ),
        };
        let re = -p.j * T::from_i32(ising).unwrap();
        let im = p.gamma * (T::from_i32(dephase).unwrap() - count::<T>(n));
        C::new(re, im)
    }

    fn check(&self, state: &[C<T>]) -> Result<()> {
        if state.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: state.len(),
            });
        }
        Ok(())
    }

    /// `out = L input` (or `L^dagger input` when `adjoint`).
    ///
    /// One fused pass per "+" row: each output element gathers its `N`
    /// row neighbours (flips on the "+" copy) and its `N` in-row neighbours
    /// (flips on the "-" copy).
    pub fn apply_into(&self, input: &[C<T>], out: &mut [C<T>], adjoint: bool) -> Result<()> {
        self.check(input)?;
        self.check(out)?;
        let n = self.params.n_spins;
        let d = 1usize << n;
        let cp = self.plus_coef;
        let cm = self.minus_coef;
        let has_field = self.params.g != T::zero();
        out.par_chunks_mut(d).enumerate().for_each(|(plus, row)| {
            let x = &input[plus * d..(plus + 1) * d];
            let re_plus = self.ising[plus];
            let sign = match self.params.frame {
                Frame::Original => -T::one(),
                Frame::Transformed => T::one(),
            };
            let conj = if adjoint { -T::one() } else { T::one() };
            let mut nbrs: [&[C<T>]; MAX_SPINS] = [&[]; MAX_SPINS];
            for (j, slot) in nbrs.iter_mut().enumerate().take(n) {
                let nb = plus ^ (1usize << j);
                *slot = &input[nb * d..(nb + 1) * d];
            }
            let nbrs = &nbrs[..n];
            debug_assert!(x.len() == d && nbrs.iter().all(|r| r.len() == d));
            for (m, o) in row.iter_mut().enumerate() {
                let dg = C::new(re_plus + sign * self.ising[m], conj * self.dephase[plus ^ m]);
                let mut acc = dg * x[m];
                if has_field {
                    let mut sp = C::new(T::zero(), T::zero());
                    let mut sm = C::new(T::zero(), T::zero());
                    for (j, r) in nbrs.iter().enumerate() {
                        // SAFETY: every neighbour row has length d, m < d and
                        // j < n, so m ^ 2^j < d as well.
                        unsafe {
                            sp = sp + *r.get_unchecked(m);
                            sm = sm + *x.get_unchecked(m ^ (1usize << j));
                        }
                    }
                    acc = acc + sp.scale(cp) + sm.scale(cm);
                }
                *o = acc;
            }
        });
        Ok(())
    }

    pub fn apply(&self, state: &Superket<T>) -> Result<Superket<T>> {
        self.check_n(state)?;
        let mut out = Superket::zeros(state.n_spins());
        self.apply_into(state.amplitudes(), out.amplitudes_mut(), false)?;
        Ok(out)
    }

    pub fn apply_adjoint(&self, state: &Superket<T>) -> Result<Superket<T>> {
        self.check_n(state)?;
        let mut out = Superket::zeros(state.n_spins());
        self.apply_into(state.amplitudes(), out.amplitudes_mut(), true)?;
        Ok(out)
    }

    fn check_n(&self, state: &Superket<T>) -> Result<()> {
        if state.n_spins() != self.params.n_spins {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: state.dim(),
            });
        }
        Ok(())
    }

    /// Dense 4^N x 4^N matrix, column `k` equal to `L e_k`.
    pub fn to_dense(&self) -> CMatrix<T> {
        let dim = self.dim();
        let n = self.params.n_spins;
        let minus_mask = (1usize << n) - 1;
        let mut m = CMatrix::zeros(dim, dim);
        let cp = C::new(self.plus_coef, T::zero());
        let cm = C::new(self.minus_coef, T::zero());
        for k in 0..dim {
            m[(k, k)] = self.diagonal(k >> n, k & minus_mask);
            if self.params.g != T::zero() {
                for j in 0..n {
                    m[(k ^ (1usize << (n + j)), k)] = cp;
                    m[(k ^ (1usize << j), k)] = cm;
                }
            }
        }
        m
    }
}

/// `L|state)` in the frame named by `params.frame`.
pub fn apply_liouvillian<T: Real>(
    state: &Superket<T>,
    params: &LiouvilleParams<T>,
) -> Result<Superket<T>> {
    Liouvillian::new(*params)?.apply(state)
}

/// `L^dagger|state)`, the generator of the Heisenberg-picture evolution.
pub fn apply_adjoint_liouvillian<T: Real>(
    state: &Superket<T>,
    params: &LiouvilleParams<T>,
) -> Result<Superket<T>> {
    Liouvillian::new(*params)?.apply_adjoint(state)
}

/// Dense superoperator, tagged with the parameters it was built from.
#[derive(Clone, Debug)]
pub struct DenseSuperoperator<T> {
    pub matrix: CMatrix<T>,
    pub params: LiouvilleParams<T>,
}

impl<T: Real> DenseSuperoperator<T> {
    pub fn frame(&self) -> Frame {
        self.params.frame
    }

    pub fn apply(&self, state: &Superket<T>) -> Result<Superket<T>> {
        if state.dim() != self.matrix.cols() {
            return Err(Error::DimensionMismatch {
                expected: self.matrix.cols(),
                got: state.dim(),
            });
        }
        Superket::from_amplitudes(state.n_spins(), self.matrix.mul_vec(state.amplitudes()))
    }
}

/// Dense Liouvillian, subject to the configured dense cap.
pub fn dense_liouvillian<T: Real>(params: &LiouvilleParams<T>) -> Result<DenseSuperoperator<T>> {
    dense_liouvillian_with_cap(params, dense_cap())
}

pub fn dense_liouvillian_with_cap<T: Real>(
    params: &LiouvilleParams<T>,
    cap: usize,
) -> Result<DenseSuperoperator<T>> {
    params.validate()?;
    params.check_dense(cap)?;
    let l = Liouvillian::new(*params)?;
    Ok(DenseSuperoperator {
        matrix: l.to_dense(),
        params: *params,
    })
}

/// Direction of the sublattice frame change.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameDirection {
    /// Applies `U^dagger`: original-frame superket to transformed frame.
    ToTransformed,
    /// Applies `U`: transformed-frame superket back to the original frame.
    ToOriginal,
}

/// Powers of `i`.
fn i_pow<T: Real>(k: i64) -> C<T> {
    match k.rem_euclid(4) {
        0 => C::new(T::one(), T::zero()),
        1 => C::new(T::zero(), T::one()),
        2 => C::new(-T::one(), T::zero()),
        _ => C::new(T::zero(), -T::one()),
    }
}

/// Applies `U = prod_j exp(i pi/2 Z-_j) prod_{j in B} exp(i pi/2 X-_j)` or
/// its inverse. Only the "-" copy is touched; the global phases `i` of the
/// exponentials are kept exactly.
pub fn apply_frame_transform<T: Real>(
    state: &Superket<T>,
    direction: FrameDirection,
) -> Result<Superket<T>> {
    let n = state.n_spins();
    if n % 2 != 0 {
        return Err(Error::InvalidParams(format!(
            "the sublattice transform requires even N, got {n}"
        )));
    }
    let d = 1usize << n;
    let odd = configs::odd_mask(n);
    let e = 3 * n as i64 / 2;
    let (phase, target_source): (C<T>, bool) = match direction {
        // (U v)[s, c] = i^{3N/2} (-1)^{#down(c)} v[s, c ^ odd]
        FrameDirection::ToOriginal => (i_pow(e), true),
        // (U^dag v)[s, s'] = (-i)^{3N/2} (-1)^{#down(s' ^ odd)} v[s, s' ^ odd]
        FrameDirection::ToTransformed => (i_pow(-e), false),
    };
    let src = state.amplitudes();
    let mut out = Superket::zeros(n);
    let dst = out.amplitudes_mut();
    for (plus, row) in dst.chunks_mut(d).enumerate() {
        let base = plus * d;
        for (c, o) in row.iter_mut().enumerate() {
            let flipped = c ^ odd;
            let sign_cfg = if target_source { c } else { flipped };
            let downs = n as u32 - sign_cfg.count_ones();
            let v = src[base + flipped] * phase;
            *o = if downs % 2 == 0 { v } else { -v };
        }
    }
    Ok(out)
}

/// Diagonal of the superoperator `(M+^z)^2` with `M+^z = (1/N) sum_j Z+_j`.
pub fn plus_magnetization_sq_diag<T: Real>(n: usize) -> Vec<C<T>> {
    let d = 1usize << n;
    let nf = count::<T>(n);
    let mut out = Vec::with_capacity(d * d);
    for plus in 0..d {
        let m = T::from_i32(configs::magnetization(plus, n)).unwrap() / nf;
        let v = C::new(m * m, T::zero());
        out.extend(std::iter::repeat(v).take(d));
    }
    out
}

/// Global spin flip `prod_j X+_j X-_j`.
pub fn global_flip<T: Real>(state: &Superket<T>) -> Superket<T> {
    let n = state.n_spins();
    let all = (1usize << (2 * n)) - 1;
    let src = state.amplitudes();
    let amps = (0..src.len()).map(|k| src[k ^ all]).collect();
    Superket::from_amplitudes(n, amps).expect("same dimension")
}

/// Spin flip on the "+" copy only, `prod_j X+_j`.
pub fn plus_flip<T: Real>(state: &Superket<T>) -> Superket<T> {
    let n = state.n_spins();
    let high = ((1usize << n) - 1) << n;
    let src = state.amplitudes();
    let amps = (0..src.len()).map(|k| src[k ^ high]).collect();
    Superket::from_amplitudes(n, amps).expect("same dimension")
}

/// Cyclic translation by `shift` sites on both copies.
pub fn translate<T: Real>(state: &Superket<T>, shift: usize) -> Superket<T> {
    let n = state.n_spins();
    let d = 1usize << n;
    let mask = d - 1;
    let shift = shift % n;
    let rot = |s: usize| {
        if shift == 0 {
            s
        } else {
            ((s << shift) | (s >> (n - shift))) & mask
        }
    };
    let src = state.amplitudes();
    let mut amps = vec![C::zero(); src.len()];
    for plus in 0..d {
        for minus in 0..d {
            amps[(rot(plus) << n) | rot(minus)] = src[(plus << n) | minus];
        }
    }
    Superket::from_amplitudes(n, amps).expect("same dimension")
}

/// Exchange of the two copies, `(s, s') -> (s', s)`.
pub fn swap_copies<T: Real>(state: &Superket<T>) -> Superket<T> {
    let n = state.n_spins();
    let d = 1usize << n;
    let src = state.amplitudes();
    let mut amps = vec![C::zero(); src.len()];
    for plus in 0..d {
        for minus in 0..d {
            amps[(minus << n) | plus] = src[(plus << n) | minus];
        }
    }
    Superket::from_amplitudes(n, amps).expect("same dimension")
}

/// Projector onto the fully symmetric sector of `L~` generated by the
/// global flip, the copy swap and `X+ T` (flip of the "+" copy combined
/// with a one-site translation). The most coherent mode lives here.
pub fn project_symmetric_sector<T: Real>(state: &Superket<T>) -> Result<Superket<T>> {
    let n = state.n_spins();
    if n % 2 != 0 {
        return Err(Error::InvalidParams(format!(
            "sector projection needs even N, got {n}"
        )));
    }
    let mut acc = Superket::zeros(n);
    let one = C::new(T::one(), T::zero());
    let mut g = state.clone();
    for _ in 0..n {
        let f = global_flip(&g);
        let s = swap_copies(&g);
        let fs = swap_copies(&f);
        for x in [&g, &f, &s, &fs] {
            acc.axpy(one, x);
        }
        g = plus_flip(&translate(&g, 1));
    }
    acc.scale_mut(C::new(T::one() / count::<T>(4 * n), T::zero()));
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eig, CMatrix};
    use crate::superket::{devectorize, vectorize};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(n: usize, j: f64, g: f64, gamma: f64, frame: Frame) -> LiouvilleParams<f64> {
        LiouvilleParams::new(n, j, g, gamma, frame).unwrap()
    }

    fn random_superket(n: usize, rng: &mut ChaCha8Rng) -> Superket<f64> {
        let d = 1usize << (2 * n);
        let amps = (0..d)
            .map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        Superket::from_amplitudes(n, amps).unwrap()
    }

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> CMatrix<f64> {
        let d = 1usize << n;
        let a = CMatrix::from_fn(d, d, |_, _| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        a.add(&a.adjoint())
    }

    /// Reference Liouvillian built from operator algebra on H:
    /// L(rho) = [H, rho] + i sum_j (L_j rho L_j^dag - 1/2 {L_j^dag L_j, rho}).
    fn reference_action(p: &LiouvilleParams<f64>, rho: &CMatrix<f64>) -> CMatrix<f64> {
        let n = p.n_spins;
        let d = 1usize << n;
        let z = |j: usize| {
            CMatrix::from_fn(d, d, |a, b| {
                if a == b {
                    C::new(configs::spin(a, j) as f64, 0.0)
                } else {
                    C::zero()
                }
            })
        };
        let x = |j: usize| {
            CMatrix::from_fn(d, d, |a, b| {
                if a ^ b == 1 << j {
                    C::new(1.0, 0.0)
                } else {
                    C::zero()
                }
            })
        };
        let mut h = CMatrix::zeros(d, d);
        for j in 0..n {
            let k = (j + 1) % n;
            h.axpy(C::new(-p.j, 0.0), &z(j).matmul(&z(k)));
            h.axpy(C::new(-p.g, 0.0), &x(j));
        }
        let mut out = h.matmul(rho).sub(&rho.matmul(&h));
        for j in 0..n {
            let lj = z(j);
            let lrl = lj.matmul(rho).matmul(&lj);
            out.axpy(C::new(0.0, p.gamma), &lrl.sub(rho));
        }
        out
    }

    #[test]
    fn single_spin_dephasing_diagonal() {
        let p = params(1, 0.0, 0.0, 1.0, Frame::Original);
        let dense = dense_liouvillian(&p).unwrap().matrix;
        let diag: Vec<C<f64>> = (0..4).map(|k| dense[(k, k)]).collect();
        assert_eq!(diag, vec![C::zero(), C::new(0.0, -2.0), C::new(0.0, -2.0), C::zero()]);
        assert!(dense.max_abs_diff(&CMatrix::from_diag(&diag)) == 0.0);
    }

    #[test]
    fn matches_operator_algebra_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [1usize, 2, 3] {
            let p = params(n, 0.7, 0.45, 0.3, Frame::Original);
            let rho = random_hermitian(n, &mut rng);
            let got = devectorize(&apply_liouvillian(&vectorize(&rho).unwrap(), &p).unwrap());
            let want = reference_action(&p, &rho);
            assert!(got.max_abs_diff(&want) < 1e-12, "N={n}");
        }
    }

    #[test]
    fn ferro_neel_is_eigenvector_at_zero_field() {
        let n = 4;
        let p = params(n, 1.0, 0.0, 1.0, Frame::Original);
        let v = Superket::basis(n, configs::all_up(n), configs::neel(n));
        let lv = apply_liouvillian(&v, &p).unwrap();
        let expected = v.scaled(C::new(-8.0, -4.0));
        assert!(lv.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn hermitian_input_gives_anti_hermitian_output() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = params(2, 1.0, 0.8, 0.6, Frame::Original);
        for _ in 0..10 {
            let rho = vectorize(&random_hermitian(2, &mut rng)).unwrap();
            let l = devectorize(&apply_liouvillian(&rho, &p).unwrap());
            assert!(l.add(&l.adjoint()).norm_max() < 1e-12);
        }
    }

    #[test]
    fn adjoint_duality_both_frames() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for frame in [Frame::Original, Frame::Transformed] {
            let p = params(2, 0.9, 0.6, 1.3, frame);
            for _ in 0..50 {
                let a = random_superket(2, &mut rng);
                let b = random_superket(2, &mut rng);
                let lhs = a.inner(&apply_liouvillian(&b, &p).unwrap());
                let rhs = apply_adjoint_liouvillian(&a, &p).unwrap().inner(&b);
                assert!((lhs - rhs).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn adjoint_annihilates_identity() {
        let p = params(2, 1.0, 0.7, 1.0, Frame::Original);
        let id = vectorize(&CMatrix::<f64>::identity(4)).unwrap();
        assert!(apply_adjoint_liouvillian(&id, &p).unwrap().norm() < 1e-14);
    }

    #[test]
    fn adjoint_of_diagonal_is_conjugate() {
        let p = params(2, 1.0, 0.0, 1.0, Frame::Original);
        let d = dense_liouvillian(&p).unwrap().matrix;
        let mut adj = CMatrix::zeros(16, 16);
        for k in 0..16 {
            let e = Superket::basis(2, k >> 2, k & 3);
            adj.set_column(k, apply_adjoint_liouvillian(&e, &p).unwrap().amplitudes());
        }
        assert_eq!(adj, d.conj());
    }

    #[test]
    fn dense_matches_matrix_free() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for frame in [Frame::Original, Frame::Transformed] {
            let p = params(2, rng.gen_range(0.1..2.0), rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0), frame);
            let dense = dense_liouvillian(&p).unwrap();
            for _ in 0..10 {
                let v = random_superket(2, &mut rng);
                let a = dense.apply(&v).unwrap();
                let b = apply_liouvillian(&v, &p).unwrap();
                assert!(a.max_abs_diff(&b) < 1e-12);
            }
        }
    }

    #[test]
    fn dense_is_trace_preserving() {
        // sum over k of L[(s,s),(k)] = 0 for every column k.
        let p = params(2, 1.0, 0.9, 0.7, Frame::Original);
        let m = dense_liouvillian(&p).unwrap().matrix;
        for col in 0..16 {
            let s: C<f64> = (0..4).map(|s| m[(s * 4 + s, col)]).sum();
            assert!(s.norm() < 1e-14);
        }
    }

    #[test]
    fn dense_cap_enforced() {
        let p = params(4, 1.0, 0.0, 1.0, Frame::Original);
        assert!(matches!(
            dense_liouvillian_with_cap(&p, 3),
            Err(Error::Capacity { n: 4, cap: 3 })
        ));
    }

    #[test]
    fn dimension_mismatch_reported() {
        let p = params(2, 1.0, 0.0, 1.0, Frame::Original);
        let v = Superket::<f64>::zeros(3);
        assert!(matches!(apply_liouvillian(&v, &p), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn odd_chain_rejected_in_transformed_frame() {
        assert!(LiouvilleParams::new(3, 1.0, 0.0, 1.0, Frame::Transformed).is_err());
        let v = Superket::<f64>::zeros(3);
        assert!(apply_frame_transform(&v, FrameDirection::ToOriginal).is_err());
    }

    fn dense_u(n: usize, direction: FrameDirection) -> CMatrix<f64> {
        let dim = 1usize << (2 * n);
        let mut u = CMatrix::zeros(dim, dim);
        for k in 0..dim {
            let e = Superket::basis(n, k >> n, k & ((1 << n) - 1));
            u.set_column(k, apply_frame_transform(&e, direction).unwrap().amplitudes());
        }
        u
    }

    /// U built directly from the single-site exponentials on the "-" copy.
    fn dense_u_from_definition(n: usize) -> CMatrix<f64> {
        let d = 1usize << n;
        let i = C::new(0.0, 1.0);
        let site_z = |j: usize| {
            CMatrix::from_fn(d, d, |a, b| {
                if a == b {
                    i * configs::spin(a, j) as f64
                } else {
                    C::zero()
                }
            })
        };
        let site_x = |j: usize| {
            CMatrix::from_fn(d, d, |a, b| if a ^ b == 1 << j { i } else { C::zero() })
        };
        let mut minus = CMatrix::identity(d);
        for j in 0..n {
            minus = minus.matmul(&site_z(j));
        }
        for j in (0..n).filter(|j| j % 2 == 1) {
            minus = minus.matmul(&site_x(j));
        }
        // acts on the second tensor factor: I (x) minus
        let dim = d * d;
        CMatrix::from_fn(dim, dim, |r, c| {
            if r >> n == c >> n {
                minus[(r & (d - 1), c & (d - 1))]
            } else {
                C::zero()
            }
        })
    }

    #[test]
    fn frame_transform_matches_definition() {
        for n in [2usize, 4] {
            let u = dense_u(n, FrameDirection::ToOriginal);
            assert!(u.max_abs_diff(&dense_u_from_definition(n)) < 1e-14);
            let udag = dense_u(n, FrameDirection::ToTransformed);
            assert!(udag.max_abs_diff(&u.adjoint()) < 1e-14);
        }
    }

    #[test]
    fn frame_conjugation_gives_transformed_liouvillian() {
        let n = 2;
        let p = params(n, 0.8, 0.55, 1.2, Frame::Original);
        let l = dense_liouvillian(&p).unwrap().matrix;
        let lt = dense_liouvillian(&p.with_frame(Frame::Transformed)).unwrap().matrix;
        let u = dense_u(n, FrameDirection::ToOriginal);
        let conj = u.adjoint().matmul(&l).matmul(&u);
        assert!(conj.max_abs_diff(&lt) < 1e-12);
    }

    #[test]
    fn frame_round_trip_and_unitarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in [2usize, 4] {
            let v = random_superket(n, &mut rng);
            let w = apply_frame_transform(&v, FrameDirection::ToTransformed).unwrap();
            assert!((w.norm() - v.norm()).abs() < 1e-12);
            let back = apply_frame_transform(&w, FrameDirection::ToOriginal).unwrap();
            assert!(back.max_abs_diff(&v) < 1e-14);
        }
    }

    #[test]
    fn frames_share_a_spectrum() {
        let p = params(2, 1.0, 0.7, 0.9, Frame::Original);
        let a = eig(&dense_liouvillian(&p).unwrap().matrix).unwrap().values;
        let b = eig(&dense_liouvillian(&p.with_frame(Frame::Transformed)).unwrap().matrix)
            .unwrap()
            .values;
        for x in &a {
            let best = b.iter().map(|y| (*x - *y).norm()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-9);
        }
    }

    #[test]
    fn zero_field_kernel_is_diagonal() {
        let n = 4;
        let p = params(n, 1.3, 0.0, 0.7, Frame::Original);
        let l = Liouvillian::new(p).unwrap();
        for &(s, sp) in &[(0usize, 0usize), (0b1011, 0b0110), (15, 5), (3, 12)] {
            let e = Superket::basis(n, s, sp);
            let out = l.apply(&e).unwrap();
            let mut ising = 0i32;
            let mut deph = 0i32;
            for j in 0..n {
                let k = (j + 1) % n;
                ising += configs::spin(s, j) * configs::spin(s, k) - configs::spin(sp, j) * configs::spin(sp, k);
                deph += configs::spin(s, j) * configs::spin(sp, j);
            }
            let want = C::new(-1.3 * ising as f64, 0.7 * deph as f64 - 0.7 * n as f64);
            assert!(out.max_abs_diff(&e.scaled(want)) < 1e-14);
        }
    }

    #[test]
    fn translation_and_flips_are_symmetries_of_transformed_frame() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let p = params(4, 1.0, 0.6, 0.8, Frame::Transformed);
        let l = Liouvillian::new(p).unwrap();
        let v = random_superket(4, &mut rng);
        let lv = l.apply(&v).unwrap();
        // [L~, P] = 0
        let a = l.apply(&global_flip(&v)).unwrap();
        assert!(a.max_abs_diff(&global_flip(&lv)) < 1e-12);
        // [L~, P+ T] = 0
        let pt = |x: &Superket<f64>| plus_flip(&translate(x, 1));
        let b = l.apply(&pt(&v)).unwrap();
        assert!(b.max_abs_diff(&pt(&lv)) < 1e-12);
        let c = l.apply(&swap_copies(&v)).unwrap();
        assert!(c.max_abs_diff(&swap_copies(&lv)) < 1e-12);
    }

    #[test]
    fn sector_projection_is_idempotent_and_commutes() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let p = params(4, 1.0, 0.6, 0.8, Frame::Transformed);
        let l = Liouvillian::new(p).unwrap();
        let v = random_superket(4, &mut rng);
        let pv = project_symmetric_sector(&v).unwrap();
        let ppv = project_symmetric_sector(&pv).unwrap();
        assert!(pv.max_abs_diff(&ppv) < 1e-13);
        let a = project_symmetric_sector(&l.apply(&v).unwrap()).unwrap();
        assert!(a.max_abs_diff(&l.apply(&pv).unwrap()) < 1e-12);
    }

    #[test]
    fn single_precision_kernel_tracks_double() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let p = params(3, 1.0, 0.4, 0.9, Frame::Original);
        let v = random_superket(3, &mut rng);
        let a = apply_liouvillian(&v, &p).unwrap();
        let b = apply_liouvillian(&v.cast::<f32>(), &p.cast::<f32>()).unwrap().cast::<f64>();
        assert!(a.max_abs_diff(&b) < 1e-5);
    }
}
