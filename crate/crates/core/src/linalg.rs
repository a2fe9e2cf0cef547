//! Dense complex linear algebra used throughout the crate.
//!
//! Operators on `C^d` are `d x d` matrices. Superoperators act on row-major
//! vectorizations: `vec(A)[i*d + j] = A[i, j]`, so that
//! `vec(X A Y) = (X ⊗ Yᵀ) vec(A)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{ChannelError, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type RealMatrix = DMatrix<f64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn dagger(a: &ComplexMatrix) -> ComplexMatrix {
    a.adjoint()
}

/// Row-major vectorization.
pub fn vectorize(a: &ComplexMatrix) -> DVector<C64> {
    let (r, c) = a.shape();
    DVector::from_fn(r * c, |k, _| a[(k / c, k % c)])
}

pub fn unvectorize(v: &DVector<C64>, d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |i, j| v[i * d + j])
}

/// The involution `⟨ij|X^Γ|kl⟩ = ⟨ik|X|jl⟩` on `d² x d²` matrices.
pub fn reshuffle(x: &ComplexMatrix, d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d * d, d * d, |row, col| {
        let (i, j) = (row / d, row % d);
        let (k, l) = (col / d, col % d);
        x[(i * d + k, j * d + l)]
    })
}

/// Trace over the first tensor factor of a `d² x d²` matrix.
pub fn partial_trace_first(x: &ComplexMatrix, d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |b, e| (0..d).map(|a| x[(a * d + b, a * d + e)]).sum())
}

/// Trace over the second tensor factor of a `d² x d²` matrix.
pub fn partial_trace_second(x: &ComplexMatrix, d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |a, c| (0..d).map(|b| x[(a * d + b, c * d + b)]).sum())
}

pub fn trace(x: &ComplexMatrix) -> C64 {
    x.trace()
}

pub fn max_abs(x: &ComplexMatrix) -> f64 {
    x.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn is_finite(x: &ComplexMatrix) -> bool {
    x.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn hermitian_part(x: &ComplexMatrix) -> ComplexMatrix {
    (x + x.adjoint()).scale(0.5)
}

pub fn hermiticity_residual(x: &ComplexMatrix) -> f64 {
    max_abs_diff(x, &x.adjoint())
}

pub fn frobenius(x: &ComplexMatrix) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn to_complex(x: &RealMatrix) -> ComplexMatrix {
    x.map(|v| C64::new(v, 0.0))
}

/// Real part, for matrices known to be real up to rounding.
pub fn real_part(x: &ComplexMatrix) -> RealMatrix {
    x.map(|z| z.re)
}

pub fn max_imag(x: &ComplexMatrix) -> f64 {
    x.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
}

/// Eigen-decomposition of the Hermitian part of `x`, eigenvalues ascending.
pub fn hermitian_eigen(x: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let h = hermitian_part(x);
    let n = h.nrows();
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

pub fn hermitian_eigenvalues(x: &ComplexMatrix) -> Vec<f64> {
    hermitian_eigen(x).0
}

/// Applies `f` to the spectrum of the Hermitian part of `x`.
pub fn hermitian_fn(x: &ComplexMatrix, f: impl Fn(f64) -> f64) -> ComplexMatrix {
    let (vals, vecs) = hermitian_eigen(x);
    let n = vals.len();
    let diag = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(f(vals[i]), 0.0)
        } else {
            ZERO
        }
    });
    &vecs * diag * vecs.adjoint()
}

pub fn psd_sqrt(x: &ComplexMatrix) -> ComplexMatrix {
    hermitian_fn(x, |v| v.max(0.0).sqrt())
}

/// Inverse square root of a positive definite matrix.
pub fn pd_inv_sqrt(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (vals, _) = hermitian_eigen(x);
    if vals[0] <= 0.0 {
        return Err(ChannelError::NotPsd {
            min_eigenvalue: vals[0],
        });
    }
    Ok(hermitian_fn(x, |v| 1.0 / v.sqrt()))
}

const JACOBI_SWEEPS: usize = 80;

/// One-sided Jacobi on the columns of `a` (`n ≥ m`); returns the rotated
/// columns `A V` and the accumulated unitary `V`.
fn jacobi_columns(mut a: ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let m = a.ncols();
    let mut v = identity(m);
    for _ in 0..JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..m {
            for q in p + 1..m {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dotc(&a.column(q));
                let g = gamma.norm();
                if g == 0.0 || g <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for mat in [&mut a, &mut v] {
                    for i in 0..mat.nrows() {
                        let xp = mat[(i, p)];
                        let xq = mat[(i, q)] * phase;
                        mat[(i, p)] = xp * cs - xq * sn;
                        mat[(i, q)] = xp * sn + xq * cs;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (a, v)
}

/// Extends orthonormal columns to a unitary, trying `candidates` first and
/// then the standard basis.
fn complete_unitary(cols: Vec<DVector<C64>>, candidates: &[DVector<C64>], n: usize) -> ComplexMatrix {
    let mut basis = cols;
    let standard = (0..n).map(|k| {
        let mut e = DVector::zeros(n);
        e[k] = ONE;
        e
    });
    for cand in candidates.iter().cloned().chain(standard) {
        if basis.len() == n {
            break;
        }
        let mut w = cand;
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dotc(&w);
                w -= b * proj;
            }
        }
        let nw = w.norm();
        if nw > 1e-8 {
            basis.push(w.unscale(nw));
        }
    }
    ComplexMatrix::from_columns(&basis)
}

/// `x = U diag(s) V_t` with `s` descending.
///
/// Left singular vectors of vanishing singular values are chosen as close to
/// the matching right singular vectors as the range of `x` permits, so that
/// `U V_t` acts as the identity on a common null space.
pub fn svd(x: &ComplexMatrix) -> (ComplexMatrix, Vec<f64>, ComplexMatrix) {
    let (n, m) = x.shape();
    if n < m {
        let (u, s, v_t) = svd(&x.adjoint());
        return (v_t.adjoint(), s, u.adjoint());
    }
    let (a, v) = jacobi_columns(x.clone());
    let mut order: Vec<usize> = (0..m).collect();
    let norms: Vec<f64> = (0..m).map(|j| a.column(j).norm()).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let top = norms.iter().copied().fold(0.0, f64::max);
    let mut u_cols = Vec::new();
    let mut null_v = Vec::new();
    let mut s = Vec::with_capacity(m);
    for &j in &order {
        s.push(norms[j]);
        if norms[j] > 0.0 && norms[j] > top * 1e-150 {
            u_cols.push(a.column(j).unscale(norms[j]));
        } else {
            null_v.push(v.column(j).into_owned());
        }
    }
    let u = complete_unitary(u_cols, &null_v, n);
    let v_sorted = ComplexMatrix::from_columns(&order.iter().map(|&j| v.column(j)).collect::<Vec<_>>());
    (u, s, v_sorted.adjoint())
}

pub fn singular_values(x: &ComplexMatrix) -> Vec<f64> {
    svd(x).1
}

/// Real SVD through the complex routine; rotations stay real for real input.
pub fn real_svd(x: &RealMatrix) -> (RealMatrix, Vec<f64>, RealMatrix) {
    let (u, s, v_t) = svd(&to_complex(x));
    (real_part(&u), s, real_part(&v_t))
}

/// Largest singular value.
pub fn op_norm(x: &ComplexMatrix) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    let gram = if x.nrows() <= x.ncols() { x * x.adjoint() } else { x.adjoint() * x };
    hermitian_eigenvalues(&gram).last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// Unitary factor `W` of the polar decomposition `x = W P`.
///
/// A vanishing input yields the identity.
pub fn polar_unitary(x: &ComplexMatrix) -> ComplexMatrix {
    if max_abs(x) == 0.0 {
        return identity(x.nrows());
    }
    let (u, _, v_t) = svd(x);
    u * v_t
}

pub fn inverse(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    x.clone()
        .try_inverse()
        .ok_or_else(|| ChannelError::NumericalFailure("matrix is singular".into()))
}

pub fn unitarity_residual(u: &ComplexMatrix) -> f64 {
    max_abs_diff(&(u.adjoint() * u), &identity(u.ncols()))
}

/// 1-norm (maximum absolute column sum).
pub fn norm1(x: &ComplexMatrix) -> f64 {
    (0..x.ncols())
        .map(|j| x.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

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

/// Matrix exponential by scaling and squaring with the degree-13 Padé approximant.
pub fn expm(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.nrows();
    if !is_finite(a) {
        return Err(ChannelError::NonFinite);
    }
    let norm = norm1(a);
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a.scale(0.5f64.powi(s));
    let eye = identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = |k: usize| C64::new(PADE13[k], 0.0);
    let u_inner = &a6 * (a6.map(|z| z * b(13)) + a4.map(|z| z * b(11)) + a2.map(|z| z * b(9)))
        + a6.map(|z| z * b(7))
        + a4.map(|z| z * b(5))
        + a2.map(|z| z * b(3))
        + eye.map(|z| z * b(1));
    let u = &a * u_inner;
    let v = &a6 * (a6.map(|z| z * b(12)) + a4.map(|z| z * b(10)) + a2.map(|z| z * b(8)))
        + a6.map(|z| z * b(6))
        + a4.map(|z| z * b(4))
        + a2.map(|z| z * b(2))
        + eye.map(|z| z * b(0));
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .ok_or_else(|| ChannelError::NumericalFailure("singular Padé denominator".into()))?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

pub fn pauli_i() -> ComplexMatrix {
    identity(2)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

/// `[1, σx, σy, σz]`.
pub fn paulis() -> [ComplexMatrix; 4] {
    [pauli_i(), pauli_x(), pauli_y(), pauli_z()]
}

pub fn ket(components: &[C64]) -> DVector<C64> {
    DVector::from_column_slice(components)
}

pub fn outer(a: &DVector<C64>, b: &DVector<C64>) -> ComplexMatrix {
    a * b.adjoint()
}

/// Diagonal matrix from real entries.
pub fn diag_real(values: &[f64]) -> ComplexMatrix {
    let n = values.len();
    ComplexMatrix::from_fn(n, n, |i, j| if i == j { C64::new(values[i], 0.0) } else { ZERO })
}
