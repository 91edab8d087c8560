use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, MatRef, Par, Side};

use super::matrix::ComplexMatrix;
use super::state::HermitianObservable;
use crate::{Error, Result, C64};

/// Eigendecomposition `A = V · diag(values) · V†` of a Hermitian matrix.
/// Eigenvalues ascend; eigenvectors are the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// Hermitian eigendecomposition. Only the lower triangle is read.
pub fn eigh(m: &ComplexMatrix) -> Result<Eigh> {
    if !m.is_square() {
        return Err(Error::contract("eigh needs a square matrix"));
    }
    let n = m.rows();
    if m.as_slice().iter().all(|z| z.im == 0.0) {
        let a = Mat::<f64>::from_fn(n, n, |i, j| m[(i, j)].re);
        let evd = a
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Numeric(format!("eigendecomposition failed: {e:?}")))?;
        let values = (0..n).map(|i| evd.S().column_vector()[i]).collect();
        let u = evd.U();
        let vectors = ComplexMatrix::from_fn(n, n, |i, j| C64::new(u[(i, j)], 0.0));
        return Ok(Eigh { values, vectors });
    }
    let evd = m
        .view()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numeric(format!("eigendecomposition failed: {e:?}")))?;
    let values = (0..n).map(|i| evd.S().column_vector()[i].re).collect();
    Ok(Eigh {
        values,
        vectors: ComplexMatrix::from_faer(evd.U()),
    })
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub(crate) fn eigvalsh(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::contract("eigvalsh needs a square matrix"));
    }
    let values = m
        .view()
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Numeric(format!("eigenvalue computation failed: {e:?}")))?;
    Ok(values)
}

/// `U = exp(-i·h·t)` through the eigendecomposition of `h`.
///
/// The nonzero pattern of `h` is split into connected components first, so
/// block-diagonal generators (e.g. parity-conserving spin models) are
/// diagonalized block by block. Real blocks use a real symmetric solver.
pub fn expm_hermitian(h: &HermitianObservable, t: f64) -> Result<ComplexMatrix> {
    expm_hermitian_matrix(h.matrix(), t)
}

fn expm_hermitian_matrix(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if !t.is_finite() {
        return Err(Error::contract("evolution time must be finite"));
    }
    let n = h.rows();
    let mut u = ComplexMatrix::zeros(n, n);
    for block in connected_blocks(h) {
        let sub = ComplexMatrix::from_fn(block.len(), block.len(), |i, j| h[(block[i], block[j])]);
        let ub = expm_block(&sub, t)?;
        for (a, &i) in block.iter().enumerate() {
            for (b, &j) in block.iter().enumerate() {
                u[(i, j)] = ub[(a, b)];
            }
        }
    }
    if !u.is_finite() {
        return Err(Error::Numeric(
            "matrix exponential produced non-finite entries".into(),
        ));
    }
    Ok(u)
}

fn expm_block(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let n = h.rows();
    if n == 1 {
        let phase = -h[(0, 0)].re * t;
        return Ok(ComplexMatrix::from_raw(
            1,
            1,
            vec![C64::new(libm::cos(phase), libm::sin(phase))],
        ));
    }
    let real = h.as_slice().iter().all(|z| z.im == 0.0);
    if real {
        let a = Mat::<f64>::from_fn(n, n, |i, j| h[(i, j)].re);
        let (re, im) = real_symmetric_propagator(a.as_ref(), t)?;
        return Ok(ComplexMatrix::from_fn(n, n, |i, j| {
            C64::new(re[(i, j)], im[(i, j)])
        }));
    }
    let Eigh { values, vectors } = eigh(h)?;
    let scaled = ComplexMatrix::from_fn(n, n, |i, j| {
        let phase = -values[j] * t;
        vectors[(i, j)] * C64::new(libm::cos(phase), libm::sin(phase))
    });
    scaled.matmul_adjoint(&vectors)
}

/// Real and imaginary parts of `exp(-i·a·t)` for real symmetric `a`:
/// `V cos(λt) Vᵀ` and `-V sin(λt) Vᵀ`.
pub(crate) fn real_symmetric_propagator(
    a: MatRef<'_, f64>,
    t: f64,
) -> Result<(Mat<f64>, Mat<f64>)> {
    let n = a.nrows();
    let evd = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numeric(format!("eigendecomposition failed: {e:?}")))?;
    let v = evd.U();
    let s = evd.S().column_vector();
    let vc = Mat::<f64>::from_fn(n, n, |i, j| v[(i, j)] * libm::cos(s[j] * t));
    let vs = Mat::<f64>::from_fn(n, n, |i, j| v[(i, j)] * libm::sin(s[j] * t));
    let mut re = Mat::<f64>::zeros(n, n);
    let mut im = Mat::<f64>::zeros(n, n);
    matmul(
        re.as_mut(),
        Accum::Replace,
        vc.as_ref(),
        v.transpose(),
        1.0,
        Par::Seq,
    );
    matmul(
        im.as_mut(),
        Accum::Replace,
        vs.as_ref(),
        v.transpose(),
        -1.0,
        Par::Seq,
    );
    Ok((re, im))
}

/// Index sets of the connected components of the nonzero pattern, each sorted.
fn connected_blocks(h: &ComplexMatrix) -> Vec<Vec<usize>> {
    let n = h.rows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in 0..i {
            let z = h[(i, j)];
            if z.re != 0.0 || z.im != 0.0 || h[(j, i)] != C64::new(0.0, 0.0) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut slot = vec![usize::MAX; n];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[slot[r]].push(i);
    }
    blocks
}
