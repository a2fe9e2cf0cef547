//! Orthonormal operator bases of `M_d` with respect to `⟨A, B⟩ = tr[A† B]`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::linalg::{c, vectorize, ComplexMatrix, C64, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// `|i⟩⟨j|` in row-major order.
    MatrixUnits,
    /// Normalized generalized Gell-Mann matrices, identity first.
    #[serde(rename = "gellmann")]
    GellMann,
    /// Clock-and-shift unitaries `U_{a,b}/√d`, identity first.
    UnitaryBasis,
}

pub fn matrix_unit(d: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    m[(i, j)] = ONE;
    m
}

/// `Σ_r e^{2πi r b/d} |a+r⟩⟨r|`, not normalized.
pub fn clock_shift(d: usize, a: usize, b: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    for r in 0..d {
        let phase = 2.0 * PI * (r * b) as f64 / d as f64;
        m[((a + r) % d, r)] = C64::from_polar(1.0, phase);
    }
    m
}

/// Basis elements in the fixed order used by transfer matrices.
///
/// Gell-Mann order: `𝟙/√d`; for each pair `j < k` the symmetric then the
/// antisymmetric element; then the diagonal elements with `l = 1..d-1`.
/// Unitary-basis order: index `a*d + b` holds `U_{a,b}/√d`.
pub fn elements(basis: Basis, d: usize) -> Vec<ComplexMatrix> {
    let s = 1.0 / (d as f64).sqrt();
    match basis {
        Basis::MatrixUnits => (0..d * d).map(|k| matrix_unit(d, k / d, k % d)).collect(),
        Basis::UnitaryBasis => (0..d * d)
            .map(|k| clock_shift(d, k / d, k % d).scale(s))
            .collect(),
        Basis::GellMann => {
            let r = std::f64::consts::FRAC_1_SQRT_2;
            let mut out = vec![ComplexMatrix::identity(d, d).scale(s)];
            for j in 0..d {
                for k in j + 1..d {
                    let mut sym = ComplexMatrix::zeros(d, d);
                    sym[(j, k)] = c(r, 0.0);
                    sym[(k, j)] = c(r, 0.0);
                    out.push(sym);
                    let mut anti = ComplexMatrix::zeros(d, d);
                    anti[(j, k)] = c(0.0, -r);
                    anti[(k, j)] = c(0.0, r);
                    out.push(anti);
                }
            }
            for l in 1..d {
                let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
                let mut m = ComplexMatrix::zeros(d, d);
                for mm in 0..l {
                    m[(mm, mm)] = c(norm, 0.0);
                }
                m[(l, l)] = c(-(l as f64) * norm, 0.0);
                out.push(m);
            }
            out
        }
    }
}

/// Columns are `vec(F_α)`; the transfer matrix in basis `F` is `B† T̂ B`.
pub fn change_matrix(basis: Basis, d: usize) -> ComplexMatrix {
    let elems = elements(basis, d);
    let mut b = ComplexMatrix::from_element(d * d, d * d, ZERO);
    for (k, f) in elems.iter().enumerate() {
        b.set_column(k, &vectorize(f));
    }
    b
}

/// Expresses a matrix-units transfer matrix in `basis`.
pub fn to_basis(mu: &ComplexMatrix, basis: Basis, d: usize) -> ComplexMatrix {
    if basis == Basis::MatrixUnits {
        return mu.clone();
    }
    let b = change_matrix(basis, d);
    b.adjoint() * mu * b
}

pub fn from_basis(t: &ComplexMatrix, basis: Basis, d: usize) -> ComplexMatrix {
    if basis == Basis::MatrixUnits {
        return t.clone();
    }
    let b = change_matrix(basis, d);
    &b * t * b.adjoint()
}

/// The `d² - 1` traceless elements of the unitary basis.
pub fn traceless_unitary_basis(d: usize) -> Vec<ComplexMatrix> {
    elements(Basis::UnitaryBasis, d).into_iter().skip(1).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, paulis};

    fn gram(elems: &[ComplexMatrix]) -> ComplexMatrix {
        let n = elems.len();
        ComplexMatrix::from_fn(n, n, |i, j| (elems[i].adjoint() * &elems[j]).trace())
    }

    #[test]
    fn bases_are_orthonormal() {
        for d in 2..=5 {
            for basis in [Basis::MatrixUnits, Basis::GellMann, Basis::UnitaryBasis] {
                let g = gram(&elements(basis, d));
                assert!(max_abs_diff(&g, &ComplexMatrix::identity(d * d, d * d)) < 1e-12);
            }
        }
    }

    #[test]
    fn traceless_elements() {
        for d in 2..=4 {
            for f in traceless_unitary_basis(d) {
                assert!(f.trace().norm() < 1e-12);
            }
            for f in elements(Basis::GellMann, d).iter().skip(1) {
                assert!(f.trace().norm() < 1e-12);
            }
        }
    }

    #[test]
    fn qubit_gellmann_is_pauli_over_sqrt2() {
        let g = elements(Basis::GellMann, 2);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for (gm, p) in g.iter().zip(paulis().iter()) {
            assert!(max_abs_diff(gm, &p.scale(s)) < 1e-15);
        }
    }

    #[test]
    fn basis_change_round_trip() {
        let t = ComplexMatrix::from_fn(9, 9, |i, j| c(i as f64 - j as f64, (i * j) as f64 * 0.1));
        let back = from_basis(&to_basis(&t, Basis::UnitaryBasis, 3), Basis::UnitaryBasis, 3);
        assert!(max_abs_diff(&t, &back) < 1e-12);
    }
}
