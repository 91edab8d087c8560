//! Independent reference implementations shared by the property suites.
//! Everything here is written with plain index loops.
#![allow(dead_code)]

use qelm_core::qcore::{ComplexMatrix, RandomSource};
use qelm_core::C64;

pub fn at(m: &ComplexMatrix, i: usize, j: usize) -> C64 {
    m.row(i)[j]
}

pub fn naive_matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    assert_eq!(a.cols(), b.rows());
    ComplexMatrix::from_fn(a.rows(), b.cols(), |i, j| {
        (0..a.cols()).map(|k| at(a, i, k) * at(b, k, j)).sum()
    })
}

pub fn naive_dagger(a: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.cols(), a.rows(), |i, j| at(a, j, i).conj())
}

pub fn naive_kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |i, j| {
        at(a, i / br, j / bc) * at(b, i % br, j % bc)
    })
}

pub fn max_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!((a.rows(), a.cols()), (b.rows(), b.cols()));
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn identity_defect(m: &ComplexMatrix) -> f64 {
    max_diff(m, &ComplexMatrix::identity(m.rows()))
}

/// Digits of `index` in the mixed radix `dims`, most significant first.
pub fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
    out
}

pub fn undigits(d: &[usize], dims: &[usize]) -> usize {
    d.iter().zip(dims).fold(0, |acc, (x, r)| acc * r + x)
}

/// Partial trace by summing over every traced-out digit assignment.
pub fn loop_partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> ComplexMatrix {
    let total: usize = dims.iter().product();
    let kept_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let out_dim: usize = kept_dims.iter().product();
    let mut out = vec![C64::new(0.0, 0.0); out_dim * out_dim];
    for i in 0..total {
        let di = digits(i, dims);
        for j in 0..total {
            let dj = digits(j, dims);
            let traced_equal = (0..dims.len())
                .filter(|k| !keep.contains(k))
                .all(|k| di[k] == dj[k]);
            if !traced_equal {
                continue;
            }
            let oi = undigits(&keep.iter().map(|&k| di[k]).collect::<Vec<_>>(), &kept_dims);
            let oj = undigits(&keep.iter().map(|&k| dj[k]).collect::<Vec<_>>(), &kept_dims);
            out[oi * out_dim + oj] += at(m, i, j);
        }
    }
    ComplexMatrix::from_vec(out_dim, out_dim, out).unwrap()
}

pub fn random_matrix(dim: usize, rng: &mut RandomSource) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, dim, |_, _| rng.complex_normal())
}

pub fn random_hermitian(dim: usize, rng: &mut RandomSource) -> ComplexMatrix {
    let g = random_matrix(dim, rng);
    let gd = naive_dagger(&g);
    ComplexMatrix::from_fn(dim, dim, |i, j| (at(&g, i, j) + at(&gd, i, j)) * 0.5)
}

/// Haar-like unitary by Gram–Schmidt on a Ginibre matrix.
pub fn random_unitary(dim: usize, rng: &mut RandomSource) -> ComplexMatrix {
    let g = random_matrix(dim, rng);
    let mut cols: Vec<Vec<C64>> = Vec::new();
    for j in 0..dim {
        let mut v: Vec<C64> = (0..dim).map(|i| at(&g, i, j)).collect();
        for c in &cols {
            let p: C64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(c) {
                *x -= p * y;
            }
        }
        let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|x| x / n).collect());
    }
    ComplexMatrix::from_fn(dim, dim, |i, j| cols[j][i])
}

/// Real eigenvalues of a Hermitian matrix by cyclic Jacobi on its real 2n×2n embedding.
/// Each eigenvalue appears twice in the embedding; one copy of each is returned, ascending.
pub fn jacobi_eigenvalues(h: &ComplexMatrix) -> Vec<f64> {
    let n = h.rows();
    let m = 2 * n;
    let mut a = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = at(h, i, j);
            a[i * m + j] = z.re;
            a[(i + n) * m + (j + n)] = z.re;
            a[i * m + (j + n)] = -z.im;
            a[(i + n) * m + j] = z.im;
        }
    }
    for _sweep in 0..100 {
        let off: f64 = (0..m)
            .flat_map(|i| (0..m).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| a[i * m + j].powi(2))
            .sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                let apq = a[p * m + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q * m + q] - a[p * m + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a[k * m + p];
                    let akq = a[k * m + q];
                    a[k * m + p] = c * akp - s * akq;
                    a[k * m + q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p * m + k];
                    let aqk = a[q * m + k];
                    a[p * m + k] = c * apk - s * aqk;
                    a[q * m + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut d: Vec<f64> = (0..m).map(|i| a[i * m + i]).collect();
    d.sort_by(|x, y| x.partial_cmp(y).unwrap());
    d.chunks(2).map(|c| 0.5 * (c[0] + c[1])).collect()
}

/// Square root of a positive definite matrix by Denman–Beavers iteration.
pub fn psd_sqrt(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.rows();
    let mut y = a.clone();
    let mut z = ComplexMatrix::identity(n);
    for _ in 0..100 {
        let yi = invert(&y);
        let zi = invert(&z);
        let y_next = ComplexMatrix::from_fn(n, n, |i, j| (at(&y, i, j) + at(&zi, i, j)) * 0.5);
        let z_next = ComplexMatrix::from_fn(n, n, |i, j| (at(&z, i, j) + at(&yi, i, j)) * 0.5);
        let delta = max_diff(&y_next, &y);
        y = y_next;
        z = z_next;
        if delta < 1e-15 {
            break;
        }
    }
    y
}

/// Gauss–Jordan inverse with partial pivoting.
pub fn invert(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.rows();
    let mut m: Vec<Vec<C64>> = (0..n)
        .map(|i| {
            let mut row: Vec<C64> = a.row(i).to_vec();
            row.extend((0..n).map(|j| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0)));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| m[x][col].norm().partial_cmp(&m[y][col].norm()).unwrap())
            .unwrap();
        m.swap(col, piv);
        let p = m[col][col];
        for v in m[col].iter_mut() {
            *v /= p;
        }
        for r in 0..n {
            if r != col {
                let f = m[r][col];
                let pivot_row = m[col].clone();
                for (x, y) in m[r].iter_mut().zip(pivot_row) {
                    *x -= f * y;
                }
            }
        }
    }
    ComplexMatrix::from_fn(n, n, |i, j| m[i][n + j])
}
