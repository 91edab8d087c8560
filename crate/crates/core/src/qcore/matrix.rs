use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use faer::linalg::matmul::matmul;
use faer::{Accum, MatMut, MatRef, Par};

use super::check_dim;
use crate::{Error, Result, C64};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Dense complex matrix stored in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "ComplexMatrix::from_vec",
                expected: rows * cols,
                found: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::contract("matrix entries must be finite"));
        }
        Ok(Self { rows, cols, data })
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = C64::new(d, 0.0);
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn dagger(&self) -> Self {
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

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "ComplexMatrix::add")?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self::from_raw(self.rows, self.cols, data))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "ComplexMatrix::sub")?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self::from_raw(self.rows, self.cols, data))
    }

    fn check_same_shape(&self, other: &Self, context: &'static str) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                context,
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(())
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Real parts of the diagonal.
    pub fn diagonal_real(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)].re)
            .collect()
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                context: "ComplexMatrix::matmul",
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        matmul(
            out.view_mut(),
            Accum::Replace,
            self.view(),
            other.view(),
            ONE,
            Par::Seq,
        );
        Ok(out)
    }

    /// `self · other†` without materializing the adjoint.
    pub fn matmul_adjoint(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                context: "ComplexMatrix::matmul_adjoint",
                expected: self.cols,
                found: other.cols,
            });
        }
        let mut out = Self::zeros(self.rows, other.rows);
        matmul(
            out.view_mut(),
            Accum::Replace,
            self.view(),
            other.view().adjoint(),
            ONE,
            Par::Seq,
        );
        Ok(out)
    }

    /// `U · self · U†`.
    pub fn conjugate_by(&self, u: &Self) -> Result<Self> {
        u.matmul(self)?.matmul_adjoint(u)
    }

    /// Real part of the diagonal of `U · self · U†`, i.e. computational-basis
    /// probabilities when `self` is a state and `U` a unitary.
    pub fn conjugated_diagonal(&self, u: &Self) -> Result<Vec<f64>> {
        let ux = u.matmul(self)?;
        Ok((0..u.rows)
            .map(|k| {
                ux.row(k)
                    .iter()
                    .zip(u.row(k))
                    .map(|(a, b)| (a * b.conj()).re)
                    .sum()
            })
            .collect())
    }

    /// `self · (A_1 ⊗ … ⊗ A_m)` without forming the Kronecker product.
    ///
    /// Each factor must be square; the product of their dimensions must equal
    /// `self.cols()`.
    pub fn mul_kron_right(&self, factors: &[Self]) -> Result<Self> {
        let dims = square_dims(factors)?;
        let total: usize = dims.iter().product();
        if total != self.cols {
            return Err(Error::DimensionMismatch {
                context: "ComplexMatrix::mul_kron_right",
                expected: self.cols,
                found: total,
            });
        }
        let mut cur = self.clone();
        let mut buf = vec![ZERO; self.cols];
        let mut outer = 1usize;
        for (factor, &d) in factors.iter().zip(&dims) {
            let inner = total / (outer * d);
            for r in 0..cur.rows {
                let row = &mut cur.data[r * total..(r + 1) * total];
                buf.fill(ZERO);
                for o in 0..outer {
                    let base = o * d * inner;
                    for c in 0..d {
                        let src = &row[base + c * inner..base + (c + 1) * inner];
                        for e in 0..d {
                            let a = factor.data[c * d + e];
                            if a == ZERO {
                                continue;
                            }
                            let dst = &mut buf[base + e * inner..base + (e + 1) * inner];
                            for (x, y) in dst.iter_mut().zip(src) {
                                *x += a * y;
                            }
                        }
                    }
                }
                row.copy_from_slice(&buf);
            }
            outer *= d;
        }
        Ok(cur)
    }

    /// `(A_1 ⊗ … ⊗ A_m) · self` without forming the Kronecker product.
    pub fn mul_kron_left(factors: &[Self], m: &Self) -> Result<Self> {
        let adjoints: Vec<Self> = factors.iter().map(Self::dagger).collect();
        Ok(m.dagger().mul_kron_right(&adjoints)?.dagger())
    }

    /// Largest entrywise modulus of `self - other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - self†`.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Frobenius inner product `Tr[self · other]`.
    pub fn trace_product(&self, other: &Self) -> Result<C64> {
        if self.cols != other.rows || self.rows != other.cols {
            return Err(Error::DimensionMismatch {
                context: "ComplexMatrix::trace_product",
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut acc = ZERO;
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += self.data[i * self.cols + j] * other.data[j * other.cols + i];
            }
        }
        Ok(acc)
    }

    pub(crate) fn view(&self) -> MatRef<'_, C64> {
        MatRef::from_row_major_slice(&self.data, self.rows, self.cols)
    }

    pub(crate) fn view_mut(&mut self) -> MatMut<'_, C64> {
        MatMut::from_row_major_slice_mut(&mut self.data, self.rows, self.cols)
    }

    pub(crate) fn from_faer(m: MatRef<'_, C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

fn square_dims(factors: &[ComplexMatrix]) -> Result<Vec<usize>> {
    factors
        .iter()
        .map(|f| {
            if f.is_square() {
                Ok(f.rows)
            } else {
                Err(Error::contract("Kronecker factors must be square"))
            }
        })
        .collect()
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = check_dim(a.rows as u128 * b.rows as u128)?;
    let cols = check_dim(a.cols as u128 * b.cols as u128)?;
    let mut data = Vec::with_capacity(rows * cols);
    for ia in 0..a.rows {
        for ib in 0..b.rows {
            for ja in 0..a.cols {
                let x = a.data[ia * a.cols + ja];
                data.extend(b.row(ib).iter().map(|y| x * y));
            }
        }
    }
    Ok(ComplexMatrix::from_raw(rows, cols, data))
}

/// Kronecker product of a non-empty list, leftmost factor most significant.
pub fn kron_all(factors: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| Error::contract("kron_all needs at least one factor"))?;
    rest.iter().try_fold(first.clone(), |acc, f| kron(&acc, f))
}

/// Partial trace of a square matrix over every subsystem not listed in `keep`.
///
/// `dims` lists subsystem dimensions, leftmost most significant. The kept
/// subsystems appear in the output in their original order.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if !m.is_square() || m.rows != total {
        return Err(Error::DimensionMismatch {
            context: "partial_trace",
            expected: total,
            found: m.rows,
        });
    }
    if keep.is_empty() {
        return Err(Error::contract(
            "partial_trace needs at least one kept subsystem",
        ));
    }
    let mut kept = vec![false; dims.len()];
    for &k in keep {
        if k >= dims.len() || kept[k] {
            return Err(Error::contract(
                "partial_trace: invalid or repeated subsystem index",
            ));
        }
        kept[k] = true;
    }

    // Stride of each subsystem within the full index.
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let offsets = |selected: bool| -> Vec<usize> {
        let mut acc = vec![0usize];
        for (i, &d) in dims.iter().enumerate() {
            if kept[i] != selected {
                continue;
            }
            let mut next = Vec::with_capacity(acc.len() * d);
            for &base in &acc {
                for v in 0..d {
                    next.push(base + v * strides[i]);
                }
            }
            acc = next;
        }
        acc
    };
    let keep_off = offsets(true);
    let trace_off = offsets(false);

    let dk = keep_off.len();
    let mut out = ComplexMatrix::zeros(dk, dk);
    for (a, &oa) in keep_off.iter().enumerate() {
        for (b, &ob) in keep_off.iter().enumerate() {
            let mut acc = ZERO;
            for &t in &trace_off {
                acc += m.data[(oa + t) * total + ob + t];
            }
            out.data[a * dk + b] = acc;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn real(rows: usize, cols: usize, v: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_vec(rows, cols, v.iter().map(|&x| c(x, 0.0)).collect()).unwrap()
    }

    #[test]
    fn kron_of_z_and_identity_is_diagonal() {
        let z = real(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let k = kron(&z, &ComplexMatrix::identity(2)).unwrap();
        assert_eq!(
            k,
            ComplexMatrix::from_real_diagonal(&[1.0, 1.0, -1.0, -1.0])
        );
    }

    #[test]
    fn kron_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2).unwrap(), ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_x_x_is_antidiagonal() {
        let x = real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let k = kron(&x, &x).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i + j == 3 { 1.0 } else { 0.0 };
                assert_eq!(k[(i, j)], c(expected, 0.0));
            }
        }
    }

    #[test]
    fn kron_respects_dimension_cap() {
        let big = ComplexMatrix::identity(1 << 9);
        let err = kron(&big, &big).unwrap_err();
        assert!(err.is_resource_limit());
    }

    #[test]
    fn from_vec_rejects_bad_input() {
        assert!(ComplexMatrix::from_vec(2, 2, vec![ZERO; 3]).is_err());
        assert!(ComplexMatrix::from_vec(1, 1, vec![c(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn matmul_shape_mismatch() {
        let a = ComplexMatrix::zeros(2, 3);
        assert!(a.matmul(&a).is_err());
    }

    #[test]
    fn kron_right_matches_explicit_product() {
        let a = ComplexMatrix::from_fn(2, 2, |i, j| c(i as f64 + 0.5, j as f64 - 0.25));
        let b = ComplexMatrix::from_fn(3, 3, |i, j| c((i * j) as f64, 1.0 - i as f64));
        let m = ComplexMatrix::from_fn(4, 6, |i, j| {
            c((i + 2 * j) as f64 * 0.1, (i as f64) - 0.3 * j as f64)
        });
        let direct = m.matmul(&kron(&a, &b).unwrap()).unwrap();
        let fast = m.mul_kron_right(&[a.clone(), b.clone()]).unwrap();
        assert!(direct.max_abs_diff(&fast) < 1e-12);

        let m2 = ComplexMatrix::from_fn(6, 5, |i, j| c(i as f64 - j as f64, 0.2 * (i + j) as f64));
        let direct = kron(&a, &b).unwrap().matmul(&m2).unwrap();
        let fast = ComplexMatrix::mul_kron_left(&[a, b], &m2).unwrap();
        assert!(direct.max_abs_diff(&fast) < 1e-12);
    }

    #[test]
    fn partial_trace_rejects_mismatch() {
        let m = ComplexMatrix::identity(4);
        assert!(partial_trace(&m, &[2, 3], &[0]).is_err());
        assert!(partial_trace(&m, &[2, 2], &[]).is_err());
        assert!(partial_trace(&m, &[2, 2], &[2]).is_err());
    }

    #[test]
    fn partial_trace_of_product() {
        let a = ComplexMatrix::from_fn(2, 2, |i, j| {
            c(if i == j { 0.5 + 0.2 * i as f64 } else { 0.1 }, 0.0)
        });
        let b = real(3, 3, &[0.2, 0.0, 0.0, 0.0, 0.3, 0.0, 0.0, 0.0, 0.5]);
        let ab = kron(&a, &b).unwrap();
        let back = partial_trace(&ab, &[2, 3], &[0]).unwrap();
        assert!(back.max_abs_diff(&a) < 1e-14);
        let back_b = partial_trace(&ab, &[2, 3], &[1]).unwrap();
        assert!(back_b.max_abs_diff(&b.scale(a.trace())) < 1e-14);
    }
}
