//! Small dense complex linear algebra, generic over the scalar type.
//!
//! This covers what the mean-field, thermal and dynamics code needs on
//! matrices up to a few hundred rows: products, LU solves, the matrix
//! exponential, and a Schur-based eigendecomposition. Large dense
//! eigenproblems go through faer in [`crate::spectral`].

use std::ops::{Index, IndexMut};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{count, lit, Real, C};

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_diag(diag: &[C<T>]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C<T>] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C<T>] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<C<T>> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[C<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[C<T>]) {
        for (i, v) in col.iter().enumerate() {
            self[(i, j)] = *v;
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, c: C<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| *z * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| *a + *b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| *a - *b).collect(),
        }
    }

    /// `self + c * other`, in place.
    pub fn axpy(&mut self, c: C<T>, other: &Self) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a = *a + c * *b;
        }
    }

    pub fn add_diag(&mut self, c: C<T>) {
        let n = self.rows.min(self.cols);
        for i in 0..n {
            self[(i, i)] = self[(i, i)] + c;
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                let brow = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o = *o + a * *b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(self.cols, v.len(), "mul_vec shape mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(C::zero(), |acc, (a, b)| acc + *a * *b)
            })
            .collect()
    }

    pub fn trace(&self) -> C<T> {
        (0..self.rows.min(self.cols)).fold(C::zero(), |acc, i| acc + self[(i, i)])
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> T {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    pub fn norm_max(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    pub fn norm_fro(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_residual(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Inverse through partial-pivot LU.
    pub fn inverse(&self) -> Result<Self> {
        Lu::factor(self)?.inverse()
    }

    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        Lu::factor(self)?.solve(rhs)
    }

    pub fn cast<U: Real>(&self) -> CMatrix<U> {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|z| C::new(U::from(z.re).unwrap(), U::from(z.im).unwrap()))
                .collect(),
        }
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = C<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.cols + j]
    }
}

/// LU factorization with partial pivoting, `P A = L U`.
pub struct Lu<T> {
    lu: CMatrix<T>,
    perm: Vec<usize>,
}

impl<T: Real> Lu<T> {
    pub fn factor(a: &CMatrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Shape(format!(
                "LU needs a square matrix, got {}x{}",
                a.rows, a.cols
            )));
        }
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.norm_max();
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax <= T::epsilon() * scale * count::<T>(n) || pmax == T::zero() {
                return Err(Error::Degenerate(format!(
                    "matrix is numerically singular (pivot {} at column {k})",
                    pmax
                )));
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[(k, k)];
            for i in (k + 1)..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f.is_zero() {
                    continue;
                }
                for j in (k + 1)..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] = lu[(i, j)] - f * u;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, rhs: &CMatrix<T>) -> Result<CMatrix<T>> {
        let n = self.lu.rows;
        if rhs.rows != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: rhs.rows,
            });
        }
        let m = rhs.cols;
        let mut x = CMatrix::from_fn(n, m, |i, j| rhs[(self.perm[i], j)]);
        for c in 0..m {
            for i in 0..n {
                let mut acc = x[(i, c)];
                for k in 0..i {
                    acc = acc - self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = acc;
            }
            for i in (0..n).rev() {
                let mut acc = x[(i, c)];
                for k in (i + 1)..n {
                    acc = acc - self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = acc / self.lu[(i, i)];
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<CMatrix<T>> {
        self.solve(&CMatrix::identity(self.lu.rows))
    }
}

/// Padé(13) numerator/denominator coefficients for the scaling-and-squaring
/// exponential.
const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

const THETA13: f64 = 5.371_920_351_148_152;

/// Matrix exponential by scaling and squaring with a degree-13 Padé
/// approximant. Works for non-normal input.
pub fn expm<T: Real>(a: &CMatrix<T>) -> Result<CMatrix<T>> {
    if !a.is_square() {
        return Err(Error::Shape("expm needs a square matrix".into()));
    }
    let n = a.rows;
    if n == 0 {
        return Ok(a.clone());
    }
    let norm = a.norm_one();
    if !norm.is_finite() {
        return Err(Error::Unstable("expm input is not finite".into()));
    }
    let ratio = norm / lit(THETA13);
    let s: i32 = if ratio > T::one() {
        ratio.log2().ceil().to_i32().unwrap_or(0).max(0)
    } else {
        0
    };
    let scale = lit::<T>(2.0).powi(-s);
    let a1 = a.scale(C::new(scale, T::zero()));
    let b = |k: usize| C::new(lit::<T>(PADE13[k]), T::zero());

    let a2 = a1.matmul(&a1);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);
    let id = CMatrix::<T>::identity(n);

    let mut inner_u = a6.scale(b(13));
    inner_u.axpy(b(11), &a4);
    inner_u.axpy(b(9), &a2);
    let mut u = a6.matmul(&inner_u);
    u.axpy(b(7), &a6);
    u.axpy(b(5), &a4);
    u.axpy(b(3), &a2);
    u.axpy(b(1), &id);
    let u = a1.matmul(&u);

    let mut inner_v = a6.scale(b(12));
    inner_v.axpy(b(10), &a4);
    inner_v.axpy(b(8), &a2);
    let mut v = a6.matmul(&inner_v);
    v.axpy(b(6), &a6);
    v.axpy(b(4), &a4);
    v.axpy(b(2), &a2);
    v.axpy(b(0), &id);

    let numer = v.add(&u);
    let denom = v.sub(&u);
    let mut r = denom.solve(&numer)?;
    for _ in 0..s {
        r = r.matmul(&r);
    }
    Ok(r)
}

/// Eigenvalues and right eigenvectors (columns, unit 2-norm).
#[derive(Clone, Debug)]
pub struct Eigen<T> {
    pub values: Vec<C<T>>,
    pub vectors: CMatrix<T>,
}

/// Complex Schur form `A = Z T Z^H` by Hessenberg reduction and shifted QR.
pub struct Schur<T> {
    pub t: CMatrix<T>,
    pub z: CMatrix<T>,
}

fn givens<T: Real>(a: C<T>, b: C<T>) -> (T, C<T>) {
    let an = a.norm();
    let bn = b.norm();
    if bn == T::zero() {
        return (T::one(), C::zero());
    }
    if an == T::zero() {
        return (T::zero(), b.conj() / C::new(bn, T::zero()));
    }
    let r = an.hypot(bn);
    let c = an / r;
    let s = (a / C::new(an, T::zero())) * b.conj() / C::new(r, T::zero());
    (c, s)
}

pub fn schur<T: Real>(a: &CMatrix<T>) -> Result<Schur<T>> {
    if !a.is_square() {
        return Err(Error::Shape("Schur needs a square matrix".into()));
    }
    let n = a.rows;
    let mut h = a.clone();
    let mut z = CMatrix::<T>::identity(n);

    // Householder reduction to upper Hessenberg form.
    for k in 0..n.saturating_sub(2) {
        let xnorm = ((k + 1)..n).map(|i| h[(i, k)].norm_sqr()).sum::<T>().sqrt();
        if xnorm == T::zero() {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == T::zero() {
            C::one()
        } else {
            x0 / C::new(x0.norm(), T::zero())
        };
        let alpha = -phase * C::new(xnorm, T::zero());
        let mut v: Vec<C<T>> = ((k + 1)..n).map(|i| h[(i, k)]).collect();
        v[0] = v[0] - alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if vnorm == T::zero() {
            continue;
        }
        for e in v.iter_mut() {
            *e = *e / C::new(vnorm, T::zero());
        }
        let two = C::new(lit::<T>(2.0), T::zero());
        // H <- (I - 2 v v^H) H
        for j in 0..n {
            let dot = v
                .iter()
                .enumerate()
                .fold(C::zero(), |acc, (r, vr)| acc + vr.conj() * h[(k + 1 + r, j)]);
            for (r, vr) in v.iter().enumerate() {
                h[(k + 1 + r, j)] = h[(k + 1 + r, j)] - two * *vr * dot;
            }
        }
        // H <- H (I - 2 v v^H), Z <- Z (I - 2 v v^H)
        for m in [&mut h, &mut z] {
            for i in 0..n {
                let dot = v
                    .iter()
                    .enumerate()
                    .fold(C::zero(), |acc, (r, vr)| acc + m[(i, k + 1 + r)] * *vr);
                for (r, vr) in v.iter().enumerate() {
                    m[(i, k + 1 + r)] = m[(i, k + 1 + r)] - two * dot * vr.conj();
                }
            }
        }
        for i in (k + 2)..n {
            h[(i, k)] = C::zero();
        }
    }

    let eps = T::epsilon();
    let anorm = h.norm_max().max(T::min_positive_value());
    let mut hi = n.saturating_sub(1);
    let mut iter = 0usize;
    let mut total = 0usize;
    let max_total = 100 * n.max(1);
    while hi > 0 {
        // Locate the start of the active unreduced block.
        let mut l = hi;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let diag = h[(l, l)].norm() + h[(l - 1, l - 1)].norm();
            if sub <= eps * diag || sub <= eps * anorm {
                h[(l, l - 1)] = C::zero();
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > max_total {
            return Err(Error::Eigensolver(format!(
                "QR iteration did not converge for a {n}x{n} matrix"
            )));
        }
        let mu = if iter % 11 == 0 {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + C::new(h[(hi, hi - 1)].norm() * lit(0.75), T::zero())
        } else {
            let a11 = h[(hi - 1, hi - 1)];
            let a12 = h[(hi - 1, hi)];
            let a21 = h[(hi, hi - 1)];
            let a22 = h[(hi, hi)];
            let half = C::new(lit::<T>(0.5), T::zero());
            let tr_half = (a11 + a22) * half;
            let diff_half = (a11 - a22) * half;
            let disc = (diff_half * diff_half + a12 * a21).sqrt();
            let e1 = tr_half + disc;
            let e2 = tr_half - disc;
            if (e1 - a22).norm() < (e2 - a22).norm() {
                e1
            } else {
                e2
            }
        };
        for k in l..=hi {
            h[(k, k)] = h[(k, k)] - mu;
        }
        let mut rots = Vec::with_capacity(hi - l);
        for k in l..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            let cc = C::new(c, T::zero());
            for j in k..n {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = cc * x + s * y;
                h[(k + 1, j)] = -s.conj() * x + cc * y;
            }
            h[(k + 1, k)] = C::zero();
            rots.push((k, cc, s));
        }
        for &(k, cc, s) in &rots {
            let top = (k + 2).min(hi);
            for i in 0..=top {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = cc * x + s.conj() * y;
                h[(i, k + 1)] = -s * x + cc * y;
            }
            for i in 0..n {
                let x = z[(i, k)];
                let y = z[(i, k + 1)];
                z[(i, k)] = cc * x + s.conj() * y;
                z[(i, k + 1)] = -s * x + cc * y;
            }
        }
        for k in l..=hi {
            h[(k, k)] = h[(k, k)] + mu;
        }
    }
    for i in 0..n {
        for j in 0..i {
            h[(i, j)] = C::zero();
        }
    }
    Ok(Schur { t: h, z })
}

/// Eigendecomposition of a general complex matrix.
///
/// Eigenvectors come from back substitution on the Schur factor; tiny
/// denominators in (near-)degenerate clusters are floored at `eps * |T|`.
pub fn eig<T: Real>(a: &CMatrix<T>) -> Result<Eigen<T>> {
    let Schur { t, z } = schur(a)?;
    let n = t.rows;
    let small = T::epsilon() * t.norm_max().max(T::min_positive_value());
    let mut y = CMatrix::<T>::zeros(n, n);
    for k in 0..n {
        let lam = t[(k, k)];
        y[(k, k)] = C::<T>::one();
        for i in (0..k).rev() {
            let mut acc = C::<T>::zero();
            for j in (i + 1)..=k {
                acc = acc + t[(i, j)] * y[(j, k)];
            }
            let mut d = t[(i, i)] - lam;
            if d.norm() < small {
                d = C::new(small, T::zero());
            }
            y[(i, k)] = -acc / d;
        }
    }
    let mut vectors = z.matmul(&y);
    for k in 0..n {
        let nrm = (0..n).map(|i| vectors[(i, k)].norm_sqr()).sum::<T>().sqrt();
        if nrm > T::zero() {
            for i in 0..n {
                vectors[(i, k)] = vectors[(i, k)] / C::new(nrm, T::zero());
            }
        }
    }
    let values = (0..n).map(|k| t[(k, k)]).collect();
    Ok(Eigen { values, vectors })
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues<T: Real>(a: &CMatrix<T>) -> Result<Vec<T>> {
    let mut h = a.clone();
    // Symmetrize to suppress round-off anti-Hermitian parts.
    for i in 0..h.rows {
        for j in 0..h.cols {
            let v = (a[(i, j)] + a[(j, i)].conj()) * C::new(lit::<T>(0.5), T::zero());
            h[(i, j)] = v;
        }
    }
    let Schur { t, .. } = schur(&h)?;
    let mut vals: Vec<T> = (0..t.rows).map(|i| t[(i, i)].re).collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(vals)
}

/// Trace distance `0.5 * ||a - b||_1` between two Hermitian matrices.
pub fn trace_distance<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<T> {
    let d = a.sub(b);
    let vals = hermitian_eigenvalues(&d)?;
    Ok(lit::<T>(0.5) * vals.iter().map(|v| v.abs()).sum::<T>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(n: usize, seed: u64) -> CMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CMatrix::from_fn(n, n, |_, _| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn inverse_round_trip() {
        let a = random(7, 1);
        let inv = a.inverse().unwrap();
        let prod = a.matmul(&inv);
        assert!(prod.max_abs_diff(&CMatrix::identity(7)) < 1e-12);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = CMatrix::<f64>::from_fn(3, 3, |i, _| C::new(i as f64, 0.0));
        assert!(matches!(a.inverse(), Err(Error::Degenerate(_))));
    }

    #[test]
    fn expm_of_diagonal() {
        let d = [C::new(0.3f64, -1.0), C::new(-2.0, 0.5), C::new(4.0, 3.0)];
        let e = expm(&CMatrix::from_diag(&d)).unwrap();
        for (i, z) in d.iter().enumerate() {
            assert!((e[(i, i)] - z.exp()).norm() < 1e-12 * z.exp().norm().max(1.0));
        }
    }

    #[test]
    fn expm_of_nilpotent_jordan_block() {
        // exp([[a, 1], [0, a]]) = e^a [[1, 1], [0, 1]]
        let a = C::new(-3.0, 7.0);
        let m = CMatrix::from_vec(2, 2, vec![a, C::new(1.0, 0.0), C::zero(), a]).unwrap();
        let e = expm(&m).unwrap();
        let ea = a.exp();
        assert!((e[(0, 0)] - ea).norm() < 1e-12);
        assert!((e[(0, 1)] - ea).norm() < 1e-12);
        assert!(e[(1, 0)].norm() < 1e-12);
    }

    #[test]
    fn expm_matches_taylor_series() {
        let a = random(5, 3).scale(C::new(0.8, 0.0));
        let e = expm(&a).unwrap();
        let mut term = CMatrix::identity(5);
        let mut sum = CMatrix::identity(5);
        for k in 1..60 {
            term = term.matmul(&a).scale(C::new(1.0 / k as f64, 0.0));
            sum = sum.add(&term);
        }
        assert!(e.max_abs_diff(&sum) < 1e-12);
    }

    #[test]
    fn eig_reconstructs_random_matrix() {
        for seed in 0..5 {
            let a = random(9, 10 + seed);
            let Eigen { values, vectors } = eig(&a).unwrap();
            for k in 0..9 {
                let v = vectors.column(k);
                let av = a.mul_vec(&v);
                let err = av
                    .iter()
                    .zip(&v)
                    .map(|(x, y)| (*x - values[k] * *y).norm())
                    .fold(0.0, f64::max);
                assert!(err < 1e-10, "seed {seed} k {k} err {err}");
            }
        }
    }

    #[test]
    fn eig_handles_diagonal_with_repeats() {
        let d = [C::new(1.0, 0.0), C::new(1.0, 0.0), C::new(-2.0, 1.0), C::new(1.0, 0.0)];
        let Eigen { values, vectors } = eig(&CMatrix::from_diag(&d)).unwrap();
        let mut vals: Vec<_> = values.iter().map(|z| (z.re, z.im)).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(vals[0], (-2.0, 1.0));
        assert!(vectors.inverse().is_ok());
    }

    #[test]
    fn hermitian_spectrum_and_trace_distance() {
        let a = random(6, 42);
        let h = a.add(&a.adjoint());
        let vals = hermitian_eigenvalues(&h).unwrap();
        let tr: f64 = vals.iter().sum();
        assert!((tr - h.trace().re).abs() < 1e-10);
        let p = CMatrix::from_diag(&[C::new(1.0f64, 0.0), C::zero()]);
        let q = CMatrix::from_diag(&[C::zero(), C::new(1.0, 0.0)]);
        assert!((trace_distance(&p, &q).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn works_in_single_precision() {
        let a = random(5, 7).cast::<f32>();
        let inv = a.inverse().unwrap();
        assert!(a.matmul(&inv).max_abs_diff(&CMatrix::identity(5)) < 1e-4);
        let e = eig(&a).unwrap();
        assert_eq!(e.values.len(), 5);
    }
}
