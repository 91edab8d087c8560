//! Effective POVMs on the (copied) input space.
//!
//! Outcome `k` of a readout unitary `R` acting on input copies and reservoirs
//! defines `A_k[s, r] = R[k, (s, r)]`. With reservoir state `η` the outcome
//! probability is `Tr[Ẽ_k ρ^{⊗m}]` where `Ẽ_k = (A_k η A_k†)ᵀ`.

use alloc::vec;
use alloc::vec::Vec;

use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, MatRef, Par};

use super::{ArchitectureKind, FeatureVector, PreparedArchitecture};
use crate::bounds::sym_dim;
use crate::qcore::{
    check_dim, kron_all, ComplexMatrix, DensityMatrix, HermitianObservable, RandomSource,
};
use crate::{Error, Result, C64};

/// Singular values below this fraction of the largest one do not count toward rank.
pub const RANK_CUTOFF: f64 = 1e-8;

/// Largest feature operator (entries) built eagerly: 256 MiB of `f64`.
const FEATURE_OPERATOR_BUDGET: usize = 1 << 25;

/// One readout with the reservoir state it sees and the layout of its columns.
struct Readout<'a> {
    unitary: &'a ComplexMatrix,
    eta: ComplexMatrix,
    /// `(input index, reservoir index)` of every column.
    columns: Vec<(usize, usize)>,
    input_dim: usize,
}

fn readouts(arch: &PreparedArchitecture) -> Result<Vec<Readout<'_>>> {
    let spec = arch.spec();
    let s = 1usize << spec.input_qubits;
    let r = 1usize << spec.reservoir_qubits;
    let copies = match spec.kind {
        ArchitectureKind::D => spec.n,
        _ => 1,
    };
    let input_dim = s.pow(copies as u32);
    // Column c is unit-major: digits (s_1 r_1 s_2 r_2 ...) in mixed radix.
    let columns: Vec<(usize, usize)> = (0..input_dim * r.pow(copies as u32))
        .map(|c| {
            let (mut si, mut ri, mut rest) = (0, 0, c);
            let mut s_place = 1;
            let mut r_place = 1;
            for _ in 0..copies {
                let unit = rest % (s * r);
                rest /= s * r;
                si += (unit / r) * s_place;
                ri += (unit % r) * r_place;
                s_place *= s;
                r_place *= r;
            }
            (si, ri)
        })
        .collect();
    if spec.kind == ArchitectureKind::D {
        let etas: Vec<ComplexMatrix> = arch
            .reservoir_states()
            .iter()
            .map(|e| e.matrix().clone())
            .collect();
        return Ok(vec![Readout {
            unitary: &arch.readouts[0],
            eta: kron_all(&etas)?,
            columns,
            input_dim,
        }]);
    }
    Ok(arch
        .readouts
        .iter()
        .zip(arch.reservoir_states())
        .map(|(u, eta)| Readout {
            unitary: u,
            eta: eta.matrix().clone(),
            columns: columns.clone(),
            input_dim,
        })
        .collect())
}

/// Calls `f(k, B_k)` with `B_k = A_k η A_k†` for every row of the readout.
fn for_each_element(ro: &Readout<'_>, mut f: impl FnMut(usize, &ComplexMatrix)) -> Result<()> {
    let res_dim = ro.eta.rows();
    let mut a = ComplexMatrix::zeros(ro.input_dim, res_dim);
    for k in 0..ro.unitary.rows() {
        for (&(si, ri), &z) in ro.columns.iter().zip(ro.unitary.row(k)) {
            a[(si, ri)] = z;
        }
        let b = a.matmul(&ro.eta)?.matmul_adjoint(&a)?;
        f(k, &b);
    }
    Ok(())
}

fn vec_len(dim: usize) -> usize {
    dim * dim
}

/// Row `[E_ii] ++ [Re E_ij, Im E_ij]_{i<j}` of `Ẽ = conj(B)`.
fn write_operator_row(g: &mut Mat<f64>, row: usize, b: &ComplexMatrix) {
    let d = b.rows();
    let mut col = 0;
    for i in 0..d {
        g[(row, col)] = b[(i, i)].re;
        col += 1;
    }
    for i in 0..d {
        for j in i + 1..d {
            g[(row, col)] = b[(i, j)].re;
            g[(row, col + 1)] = -b[(i, j)].im;
            col += 2;
        }
    }
}

/// `[X_ii] ++ [2 Re X_ij, 2 Im X_ij]_{i<j}`, so that `Tr[E X] = g·v` for Hermitian `E`, `X`.
fn write_state_column(v: &mut Mat<f64>, col: usize, x: &ComplexMatrix) {
    let d = x.rows();
    let mut row = 0;
    for i in 0..d {
        v[(row, col)] = x[(i, i)].re;
        row += 1;
    }
    for i in 0..d {
        for j in i + 1..d {
            v[(row, col)] = 2.0 * x[(i, j)].re;
            v[(row + 1, col)] = 2.0 * x[(i, j)].im;
            row += 2;
        }
    }
}

/// The real matrix `G` with `features = G · v(ρ^{⊗m})`, if it fits the budget.
/// Multiple-injection architectures with `n ≥ 2` always use the direct path.
pub(super) fn feature_operator(arch: &PreparedArchitecture) -> Result<Option<Mat<f64>>> {
    let spec = arch.spec();
    if spec.kind == ArchitectureKind::MI && spec.n > 1 {
        return Ok(None);
    }
    let copies = spec.input_copies();
    let input_dim = 1usize
        .checked_shl((spec.input_qubits * copies) as u32)
        .filter(|_| spec.input_qubits * copies < 32)
        .ok_or_else(|| Error::contract("input copy space too large"))?;
    let p = spec.feature_len();
    if vec_len(input_dim).saturating_mul(p) > FEATURE_OPERATOR_BUDGET {
        return Ok(None);
    }
    let mut g = Mat::<f64>::zeros(p, vec_len(input_dim));
    let mut offset = 0;
    for ro in readouts(arch)? {
        for_each_element(&ro, |k, b| write_operator_row(&mut g, offset + k, b))?;
        offset += ro.unitary.rows();
    }
    Ok(Some(g))
}

pub(super) fn apply_feature_operator(
    arch: &PreparedArchitecture,
    g: &Mat<f64>,
    inputs: &[DensityMatrix],
) -> Result<Vec<FeatureVector>> {
    let copies = arch.spec().input_copies();
    let mut v = Mat::<f64>::zeros(g.ncols(), inputs.len());
    for (col, rho) in inputs.iter().enumerate() {
        let power = if copies == 1 {
            rho.clone()
        } else {
            rho.tensor_power(copies)?
        };
        write_state_column(&mut v, col, power.matrix());
    }
    let mut f = Mat::<f64>::zeros(g.nrows(), inputs.len());
    matmul(
        f.as_mut(),
        Accum::Replace,
        g.as_ref(),
        v.as_ref(),
        1.0,
        Par::Seq,
    );
    let blocks = match arch.spec().kind {
        ArchitectureKind::SM => arch.spec().n,
        _ => 1,
    };
    Ok((0..inputs.len())
        .map(|col| FeatureVector {
            values: (0..g.nrows()).map(|row| f[(row, col)]).collect(),
            blocks,
        })
        .collect())
}

/// `Ẽ_k` for every outcome, acting on `H_S` (S3L, SM) or `H_S^{⊗n}` (MI, D).
/// SM returns the concatenation over units.
pub fn effective_povm(arch: &PreparedArchitecture) -> Result<Vec<HermitianObservable>> {
    let spec = arch.spec();
    let copies = spec.input_copies();
    let q = spec.input_qubits * copies;
    check_dim(if q >= 127 { u128::MAX } else { 1u128 << q })?;
    if spec.kind == ArchitectureKind::MI && spec.n > 1 {
        return injection_povm(arch);
    }
    let mut out = Vec::with_capacity(spec.feature_len());
    for ro in readouts(arch)? {
        for_each_element(&ro, |_, b| {
            out.push(HermitianObservable::from_trusted(b.conj()))
        })?;
    }
    Ok(out)
}

/// Heisenberg-picture recursion over injections, on `(S_1 … S_n, R)`.
fn injection_povm(arch: &PreparedArchitecture) -> Result<Vec<HermitianObservable>> {
    let spec = arch.spec();
    let s = 1usize << spec.input_qubits;
    let r = 1usize << spec.reservoir_qubits;
    let n = spec.n;
    check_dim((s as u128).pow(n as u32) * r as u128)?;
    let u = arch.unit_channels()[0].unitary();
    let readout = &arch.readouts[0];
    let eta = arch.reservoir_states()[0].matrix();

    // W[(a,b,c),(a',b',c')] = U[(a,c),(a',c')] δ_{bb'}: U on S_m and R, identity on the later copies.
    let embed = |later: usize| -> ComplexMatrix {
        let dim = s * later * r;
        let mut w = ComplexMatrix::zeros(dim, dim);
        for a in 0..s {
            for b in 0..later {
                for c in 0..r {
                    let row = (a * later + b) * r + c;
                    for a2 in 0..s {
                        for c2 in 0..r {
                            w[(row, (a2 * later + b) * r + c2)] = u[(a * r + c, a2 * r + c2)];
                        }
                    }
                }
            }
        }
        w
    };
    let embeddings: Vec<ComplexMatrix> = (1..n).map(|m| embed(s.pow(m as u32))).collect();

    let mut out = Vec::with_capacity(readout.rows());
    for k in 0..readout.rows() {
        let row = readout.row(k);
        let mut x = ComplexMatrix::from_fn(s * r, s * r, |a, b| row[a].conj() * row[b]);
        for w in &embeddings {
            let lifted = kron_identity_left(s, &x);
            x = w.dagger().matmul(&lifted)?.matmul(w)?;
        }
        let d = x.rows() / r;
        let e = ComplexMatrix::from_fn(d, d, |i, j| {
            let mut acc = C64::new(0.0, 0.0);
            for c in 0..r {
                for c2 in 0..r {
                    acc += x[(i * r + c, j * r + c2)] * eta[(c2, c)];
                }
            }
            acc
        });
        out.push(HermitianObservable::from_trusted(e));
    }
    Ok(out)
}

fn kron_identity_left(s: usize, x: &ComplexMatrix) -> ComplexMatrix {
    let d = x.rows();
    let mut out = ComplexMatrix::zeros(s * d, s * d);
    for a in 0..s {
        for i in 0..d {
            for j in 0..d {
                out[(a * d + i, a * d + j)] = x[(i, j)];
            }
        }
    }
    out
}

/// Numerical rank of a real matrix: singular values above `RANK_CUTOFF · σ_max`.
pub(crate) fn numerical_rank(m: MatRef<'_, f64>) -> Result<usize> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(0);
    }
    let sv = m.singular_values().map_err(|e| {
        Error::Numeric(alloc::format!("singular value decomposition failed: {e:?}"))
    })?;
    let max = sv.iter().copied().fold(0.0, f64::max);
    Ok(sv.iter().filter(|&&x| x > RANK_CUTOFF * max).count())
}

/// Number of independent directions the features span, identity included.
///
/// Linear architectures probe the full Hermitian operator space of the input.
/// MI and D probe the symmetric subspace with `d_sn + 8` random product powers
/// `ρ^{⊗n}` drawn from `rng`.
pub fn design_matrix_rank(arch: &PreparedArchitecture, rng: &mut RandomSource) -> Result<usize> {
    let spec = arch.spec();
    let s = 1usize << spec.input_qubits;
    if spec.input_copies() == 1 {
        if let Some(g) = &arch.feature_operator {
            return numerical_rank(g.as_ref());
        }
    }
    let probes = if spec.input_copies() == 1 {
        s * s + 8
    } else {
        let d = sym_dim(s, spec.n)?;
        usize::try_from(d)
            .ok()
            .and_then(|d| d.checked_add(8))
            .ok_or(Error::DimensionLimit {
                requested: u128::MAX,
                limit: usize::MAX,
            })?
    };
    check_dim(probes as u128 * spec.feature_len() as u128)?;
    let inputs: Vec<DensityMatrix> = (0..probes)
        .map(|_| crate::qcore::random_density_matrix(s, rng))
        .collect::<Result<_>>()?;
    let features = super::features_batch(arch, &inputs)?;
    let design = Mat::<f64>::from_fn(probes, spec.feature_len(), |i, j| features[i].values[j]);
    numerical_rank(design.as_ref())
}

#[cfg(test)]
mod tests {
    use super::super::{prepare, ArchitectureSpec};
    use super::*;
    use crate::dynamics::UnitaryChannel;
    use crate::qcore::{expectation, random_density_matrix};

    #[test]
    fn completeness_and_equivalence() {
        let mut rng = RandomSource::new(21, 0);
        for spec in [
            ArchitectureSpec::new(ArchitectureKind::S3L, 1, 1, 2),
            ArchitectureSpec::new(ArchitectureKind::D, 2, 1, 1),
            ArchitectureSpec::new(ArchitectureKind::MI, 2, 1, 1),
            ArchitectureSpec::new(ArchitectureKind::MI, 3, 1, 1),
        ] {
            let arch = prepare(&spec, &mut rng).unwrap();
            let povm = effective_povm(&arch).unwrap();
            let d = povm[0].dim();
            let mut sum = ComplexMatrix::zeros(d, d);
            for e in &povm {
                sum = sum.add(e.matrix()).unwrap();
            }
            assert!(
                sum.max_abs_diff(&ComplexMatrix::identity(d)) < 1e-12,
                "{:?}",
                spec.kind
            );
            let rho = random_density_matrix(2, &mut rng).unwrap();
            let power = rho.tensor_power(spec.input_copies()).unwrap();
            let f = arch.features(&rho).unwrap();
            for (e, p) in povm.iter().zip(&f.values) {
                assert!(
                    (expectation(e, &power).unwrap() - p).abs() < 1e-12,
                    "{:?}",
                    spec.kind
                );
            }
        }
    }

    #[test]
    fn identity_channel_gives_scaled_projectors() {
        let mut rng = RandomSource::new(2, 0);
        let spec = ArchitectureSpec::new(ArchitectureKind::S3L, 1, 1, 1);
        let eta = random_density_matrix(2, &mut rng).unwrap();
        let arch = PreparedArchitecture::from_parts(
            spec,
            vec![UnitaryChannel::identity(4)],
            None,
            vec![eta.clone()],
        )
        .unwrap();
        let povm = effective_povm(&arch).unwrap();
        for (k, e) in povm.iter().enumerate() {
            let (ks, kr) = (k / 2, k % 2);
            let mut expected = ComplexMatrix::zeros(2, 2);
            expected[(ks, ks)] = eta.matrix()[(kr, kr)];
            assert!(e.matrix().max_abs_diff(&expected) < 1e-15);
        }
    }

    #[test]
    fn ranks_of_small_architectures() {
        let mut rng = RandomSource::new(5, 0);
        let arch = prepare(
            &ArchitectureSpec::new(ArchitectureKind::S3L, 1, 1, 1),
            &mut rng,
        )
        .unwrap();
        assert_eq!(design_matrix_rank(&arch, &mut rng).unwrap(), 4);
        // Parity conservation puts the identity and the input parity in every unit's span.
        let arch = prepare(
            &ArchitectureSpec::new(ArchitectureKind::SM, 2, 2, 1),
            &mut rng,
        )
        .unwrap();
        assert_eq!(design_matrix_rank(&arch, &mut rng).unwrap(), 14);
        let arch = prepare(
            &ArchitectureSpec::new(ArchitectureKind::SM, 3, 2, 1),
            &mut rng,
        )
        .unwrap();
        assert_eq!(design_matrix_rank(&arch, &mut rng).unwrap(), 16);
        let arch = prepare(
            &ArchitectureSpec::new(ArchitectureKind::D, 2, 1, 1),
            &mut rng,
        )
        .unwrap();
        assert_eq!(design_matrix_rank(&arch, &mut rng).unwrap(), 10);
    }
}
