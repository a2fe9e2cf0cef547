//! Qubit-specific analysis built on the real 4×4 Pauli transfer matrix
//! `T̂_ij = tr[σ_i T(σ_j)]/2`.

mod classify;
mod normal_form;
mod product;
mod rank_two;

use nalgebra::{Matrix3, Matrix4, Vector3};

use crate::basis::Basis;
use crate::channel::Channel;
use crate::error::{ChannelError, Result};
use crate::linalg::{
    c, max_imag, paulis, real_part, to_complex, ComplexMatrix, C64, I,
};

pub use classify::{classify, ClassificationReport, Divisibility, Evidence, Infinitesimal};
pub use normal_form::{
    lorentz_normal_form, normal_form_channel, LorentzNormalForm, NormalForm, NormalFormDiagnostics,
};
pub use product::markov_product_factors;
pub use rank_two::{
    class1_channel, class1_generator, class2_channel, class2_generator, class3_channel,
    class3_generator, nondiagonal_decompose, rank_two_from_angles, rank_two_generator_schedule,
    rank_two_normal_form, RankTwoClass, RankTwoKind,
};

/// `T̂ = [[1, 0], [v, Δ]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliTransfer {
    pub v: Vector3<f64>,
    pub delta: Matrix3<f64>,
}

impl PauliTransfer {
    pub fn unital(lambda: [f64; 3]) -> Self {
        Self {
            v: Vector3::zeros(),
            delta: Matrix3::from_diagonal(&Vector3::from(lambda)),
        }
    }

    pub fn matrix(&self) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        m[(0, 0)] = 1.0;
        for i in 0..3 {
            m[(i + 1, 0)] = self.v[i];
            for j in 0..3 {
                m[(i + 1, j + 1)] = self.delta[(i, j)];
            }
        }
        m
    }

    pub fn from_matrix(m: &Matrix4<f64>) -> Self {
        Self {
            v: Vector3::new(m[(1, 0)], m[(2, 0)], m[(3, 0)]),
            delta: m.fixed_view::<3, 3>(1, 1).into_owned(),
        }
    }

    pub fn to_channel(&self) -> Result<Channel> {
        channel_from_pauli(&self.matrix())
    }
}

fn require_qubit(ch: &Channel) -> Result<()> {
    if ch.dim() == 2 {
        Ok(())
    } else {
        Err(ChannelError::WrongDimension(ch.dim()))
    }
}

/// Full 4×4 Pauli transfer matrix (real part; the imaginary residue of a
/// Hermiticity-preserving map is rounding).
pub fn pauli_matrix(ch: &Channel) -> Result<Matrix4<f64>> {
    require_qubit(ch)?;
    let t = ch.transfer_in(Basis::GellMann);
    if max_imag(&t) > 1e-8 {
        return Err(ChannelError::NumericalFailure(
            "Pauli transfer matrix is not real".into(),
        ));
    }
    let r = real_part(&t);
    Ok(Matrix4::from_fn(|i, j| r[(i, j)]))
}

pub fn pauli_transfer(ch: &Channel) -> Result<PauliTransfer> {
    Ok(PauliTransfer::from_matrix(&pauli_matrix(ch)?))
}

/// Channel (TP required) from a real Pauli transfer matrix.
pub fn channel_from_pauli(m: &Matrix4<f64>) -> Result<Channel> {
    let dm = ComplexMatrix::from_fn(4, 4, |i, j| c(m[(i, j)], 0.0));
    Channel::from_transfer_in(dm, Basis::GellMann)
}

/// Matrix-units transfer matrix of a real Pauli transfer matrix.
pub fn pauli_to_matrix_units(m: &Matrix4<f64>) -> ComplexMatrix {
    let dm = to_complex(&nalgebra::DMatrix::from_fn(4, 4, |i, j| m[(i, j)]));
    crate::basis::from_basis(&dm, Basis::GellMann, 2)
}

/// Rotation `R(U)_ij = ½ tr[σ_i U σ_j U†]`.
pub fn rotation_of(u: &ComplexMatrix) -> Matrix3<f64> {
    let p = paulis();
    Matrix3::from_fn(|i, j| 0.5 * (&p[i + 1] * u * &p[j + 1] * u.adjoint()).trace().re)
}

/// A unitary `U` with `R(U) = r` for `r ∈ SO(3)`.
pub fn su2_from_rotation(r: &Matrix3<f64>) -> ComplexMatrix {
    // Shepperd's method: take the largest of the four squared quaternion components.
    let tr = r.trace();
    let cands = [tr, r[(0, 0)], r[(1, 1)], r[(2, 2)]];
    let k = (0..4).max_by(|&a, &b| cands[a].total_cmp(&cands[b])).unwrap();
    let (w, x, y, z) = match k {
        0 => {
            let s = 2.0 * (1.0 + tr).sqrt();
            (s / 4.0, (r[(2, 1)] - r[(1, 2)]) / s, (r[(0, 2)] - r[(2, 0)]) / s, (r[(1, 0)] - r[(0, 1)]) / s)
        }
        1 => {
            let s = 2.0 * (1.0 + r[(0, 0)] - r[(1, 1)] - r[(2, 2)]).sqrt();
            ((r[(2, 1)] - r[(1, 2)]) / s, s / 4.0, (r[(0, 1)] + r[(1, 0)]) / s, (r[(0, 2)] + r[(2, 0)]) / s)
        }
        2 => {
            let s = 2.0 * (1.0 - r[(0, 0)] + r[(1, 1)] - r[(2, 2)]).sqrt();
            ((r[(0, 2)] - r[(2, 0)]) / s, (r[(0, 1)] + r[(1, 0)]) / s, s / 4.0, (r[(1, 2)] + r[(2, 1)]) / s)
        }
        _ => {
            let s = 2.0 * (1.0 - r[(0, 0)] - r[(1, 1)] + r[(2, 2)]).sqrt();
            ((r[(1, 0)] - r[(0, 1)]) / s, (r[(0, 2)] + r[(2, 0)]) / s, (r[(1, 2)] + r[(2, 1)]) / s, s / 4.0)
        }
    };
    let p = paulis();
    p[0].scale(w) - (p[1].scale(x) + p[2].scale(y) + p[3].scale(z)) * I
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaDiagonalization {
    pub o1: Matrix3<f64>,
    pub o2: Matrix3<f64>,
    /// `λ₁ ≥ λ₂ ≥ |λ₃|`, sign carried by `λ₃`.
    pub lambda: [f64; 3],
    pub u1: ComplexMatrix,
    pub u2: ComplexMatrix,
}

/// `O₁ Δ O₂ = diag(λ)` with `O₁, O₂ ∈ SO(3)` and unitaries realizing them.
pub fn diagonalize_delta(pt: &PauliTransfer) -> Result<DeltaDiagonalization> {
    let m = nalgebra::DMatrix::from_fn(3, 3, |i, j| pt.delta[(i, j)]);
    let (u, s, v_t) = crate::linalg::real_svd(&m);
    let mut p = Matrix3::from_fn(|i, j| u[(i, j)]);
    let mut q = Matrix3::from_fn(|i, j| v_t[(j, i)]);
    let mut lambda = [s[0], s[1], s[2]];
    if p.determinant() < 0.0 {
        p.column_mut(2).neg_mut();
        lambda[2] = -lambda[2];
    }
    if q.determinant() < 0.0 {
        q.column_mut(2).neg_mut();
        lambda[2] = -lambda[2];
    }
    let o1 = p.transpose();
    let o2 = q;
    let u1 = su2_from_rotation(&o1);
    let u2 = su2_from_rotation(&o2);
    let check = (rotation_of(&u1) - o1).abs().max() + (rotation_of(&u2) - o2).abs().max();
    if check > 1e-9 {
        return Err(ChannelError::NumericalFailure(format!(
            "SU(2) lift of rotation off by {check:.3e}"
        )));
    }
    Ok(DeltaDiagonalization {
        o1,
        o2,
        lambda,
        u1,
        u2,
    })
}

/// Kraus pair `diag(1, √(1-γ))`, `√γ |0⟩⟨1|`.
pub fn amplitude_damping(gamma: f64) -> Result<Channel> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(ChannelError::OutOfRange {
            name: "gamma",
            value: gamma,
        });
    }
    class1_channel((1.0 - gamma).sqrt())
}

/// Unital channel with `Δ = diag(λ)`.
pub fn unital_channel(lambda: [f64; 3]) -> Result<Channel> {
    PauliTransfer::unital(lambda).to_channel()
}

/// The four Choi eigenvalues `(1 ± λ₁ ± λ₂ ± λ₃)/4` (even number of minus signs)
/// of a unital qubit channel.
pub fn unital_choi_eigenvalues(lambda: [f64; 3]) -> [f64; 4] {
    let [a, b, c] = lambda;
    [
        (1.0 + a + b + c) / 4.0,
        (1.0 + a - b - c) / 4.0,
        (1.0 - a + b - c) / 4.0,
        (1.0 - a - b + c) / 4.0,
    ]
}

pub fn unital_is_cp(lambda: [f64; 3], tol: f64) -> bool {
    unital_choi_eigenvalues(lambda).iter().all(|&e| e >= -tol)
}

/// Choi eigenvalues of `Δ_t = diag(λ_i^t)`, accurate for small `t`.
pub fn unital_semigroup_eigenvalues(lambda: [f64; 3], t: f64) -> Result<[f64; 4]> {
    if lambda.iter().any(|&l| !(l > 0.0)) {
        return Err(ChannelError::NonPositiveLambda(lambda));
    }
    let e = lambda.map(|l| (t * l.ln()).exp_m1());
    Ok([
        (4.0 + e[0] + e[1] + e[2]) / 4.0,
        (e[0] - e[1] - e[2]) / 4.0,
        (-e[0] + e[1] - e[2]) / 4.0,
        (-e[0] - e[1] + e[2]) / 4.0,
    ])
}

/// Unital channel `Δ_t = exp(t ln Δ)`.
pub fn unital_semigroup_channel(lambda: [f64; 3], t: f64) -> Result<Channel> {
    unital_semigroup_eigenvalues(lambda, t)?;
    unital_channel(lambda.map(|l| l.powf(t)))
}

/// `X ↦ U X U†` for a qubit unitary.
pub fn conjugation(u: &ComplexMatrix) -> Result<Channel> {
    Channel::unitary(u)
}

pub(crate) fn qubit(a: C64, b: C64, c_: C64, d: C64) -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[a, b, c_, d])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{distance, minimal_determinant_channel};
    use crate::linalg::{unitarity_residual, identity};

    fn rot(axis: [f64; 3], angle: f64) -> Matrix3<f64> {
        *nalgebra::Rotation3::from_axis_angle(
            &nalgebra::Unit::new_normalize(Vector3::from(axis)),
            angle,
        )
        .matrix()
    }

    #[test]
    fn identity_pauli_transfer() {
        let pt = pauli_transfer(&Channel::identity(2).unwrap()).unwrap();
        assert_eq!(pt.v, Vector3::zeros());
        assert!((pt.delta - Matrix3::identity()).abs().max() < 1e-15);
    }

    #[test]
    fn amplitude_damping_pauli_transfer() {
        let g = 0.36;
        let pt = pauli_transfer(&amplitude_damping(g).unwrap()).unwrap();
        assert!((pt.v - Vector3::new(0.0, 0.0, g)).abs().max() < 1e-15);
        let s = (1.0 - g).sqrt();
        let expected = Matrix3::from_diagonal(&Vector3::new(s, s, 1.0 - g));
        assert!((pt.delta - expected).abs().max() < 1e-15);
    }

    #[test]
    fn transpose_depolarize_pauli_transfer() {
        let pt = pauli_transfer(&minimal_determinant_channel(2).unwrap()).unwrap();
        let expected = Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, 1.0)) / 3.0;
        assert!((pt.delta - expected).abs().max() < 1e-15);
        let dd = diagonalize_delta(&pt).unwrap();
        for (a, b) in dd.lambda.iter().zip([1.0 / 3.0, 1.0 / 3.0, -1.0 / 3.0]) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn su2_lift_matches_rotation() {
        for (axis, angle) in [([1.0, 0.0, 0.0], 0.3), ([0.2, -0.7, 0.4], 2.9), ([0.0, 0.0, 1.0], 3.14159)] {
            let r = rot(axis, angle);
            let u = su2_from_rotation(&r);
            assert!(unitarity_residual(&u) < 1e-12);
            assert!((rotation_of(&u) - r).abs().max() < 1e-12);
        }
    }

    #[test]
    fn diagonalize_recovers_spectrum() {
        let r1 = rot([0.3, 0.1, -0.8], 1.1);
        let r2 = rot([-0.5, 0.9, 0.2], 0.7);
        let delta = r1 * Matrix3::from_diagonal(&Vector3::new(0.9, 0.5, 0.2)) * r2;
        let pt = PauliTransfer { v: Vector3::zeros(), delta };
        let dd = diagonalize_delta(&pt).unwrap();
        for (a, b) in dd.lambda.iter().zip([0.9, 0.5, 0.2]) {
            assert!((a - b).abs() < 1e-12);
        }
        let diag = dd.o1 * delta * dd.o2;
        assert!((diag - Matrix3::from_diagonal(&Vector3::from(dd.lambda))).abs().max() < 1e-12);
        assert!((dd.o1.determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_delta_gives_identity_rotations() {
        let pt = PauliTransfer::unital([0.9, 0.6, 0.3]);
        let dd = diagonalize_delta(&pt).unwrap();
        assert!((dd.o1 - Matrix3::identity()).abs().max() < 1e-15);
        assert!((dd.o2 - Matrix3::identity()).abs().max() < 1e-15);
    }

    #[test]
    fn unitaries_realize_the_diagonalization() {
        let r1 = rot([1.0, 1.0, 0.0], 0.4);
        let delta = r1 * Matrix3::from_diagonal(&Vector3::new(0.8, 0.7, 0.5));
        let ch = PauliTransfer { v: Vector3::zeros(), delta }.to_channel().unwrap();
        let dd = diagonalize_delta(&pauli_transfer(&ch).unwrap()).unwrap();
        let left = conjugation(&dd.u1).unwrap();
        let right = conjugation(&dd.u2).unwrap();
        let n = left.compose(&ch).unwrap().compose(&right).unwrap();
        assert!(distance(&n, &unital_channel(dd.lambda).unwrap()).unwrap() < 1e-12);
        assert!(identity(2).nrows() == 2);
    }

    #[test]
    fn semigroup_endpoints() {
        let l = [0.9, 0.6, 0.6];
        let one = unital_semigroup_channel(l, 1.0).unwrap();
        assert!(distance(&one, &unital_channel(l).unwrap()).unwrap() < 1e-15);
        let zero = unital_semigroup_channel(l, 0.0).unwrap();
        assert!(distance(&zero, &Channel::identity(2).unwrap()).unwrap() < 1e-15);
        assert!(unital_semigroup_eigenvalues(l, 0.5).unwrap().iter().all(|&e| e >= 0.0));
        assert!(matches!(
            unital_semigroup_channel([0.5, 0.0, 0.2], 0.5),
            Err(ChannelError::NonPositiveLambda(_))
        ));
    }

    #[test]
    fn semigroup_detects_condid2_violation() {
        let ev = unital_semigroup_eigenvalues([0.8, 0.7, 0.5], 0.01).unwrap();
        assert!(ev.iter().any(|&e| e < 0.0));
    }
}
