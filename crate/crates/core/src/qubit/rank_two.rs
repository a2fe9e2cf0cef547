//! Kraus-rank-two qubit channels in the normal form
//! `A₁ = |0⟩⟨a|`, `A₂ = |0⟩⟨b| + x|1⟩⟨1|` with `|a⟩⟨a| + |b⟩⟨b| = 𝟙 − x²|1⟩⟨1|`.

use std::f64::consts::SQRT_2;
use std::sync::Arc;

use nalgebra::{Matrix4, Vector3};
use serde::Serialize;

use super::{channel_from_pauli, qubit, PauliTransfer};
use crate::channel::{distance, Channel};
use crate::error::{ChannelError, Result};
use crate::linalg::{c, hermitian_eigen, identity, pauli_z, svd, ComplexMatrix, C64, ONE, ZERO};
use crate::markov::{make_generator, Dissipator, GeneratorSchedule, LindbladGenerator};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "class")]
pub enum RankTwoKind {
    Class1 { x: f64 },
    Class2 { y: f64 },
    Class3 { c1: f64, x: f64, phi: f64 },
}

/// `T = U₁ C U₂` where `C` is the canonical channel of `kind`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankTwoClass {
    pub kind: RankTwoKind,
    pub u1: ComplexMatrix,
    pub u2: ComplexMatrix,
}

impl RankTwoKind {
    pub fn channel(&self) -> Result<Channel> {
        match *self {
            RankTwoKind::Class1 { x } => class1_channel(x),
            RankTwoKind::Class2 { y } => class2_channel(y),
            RankTwoKind::Class3 { c1, x, phi } => class3_channel(c1, x, phi),
        }
    }
}

fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(ChannelError::OutOfRange { name, value })
    }
}

/// `C_x`: amplitude damping with `|a⟩ = √(1−x²)|1⟩`, `|b⟩ = |0⟩`.
pub fn class1_channel(x: f64) -> Result<Channel> {
    check_unit("x", x)?;
    Channel::from_kraus(vec![
        qubit(ZERO, c((1.0 - x * x).sqrt(), 0.0), ZERO, ZERO),
        qubit(ONE, ZERO, ZERO, c(x, 0.0)),
    ])
}

/// `C_y`: phase damping with `|a⟩ = √(1−y²)|0⟩`, `|b⟩ = y|0⟩`.
pub fn class2_channel(y: f64) -> Result<Channel> {
    check_unit("y", y)?;
    Channel::from_kraus(vec![
        qubit(c((1.0 - y * y).sqrt(), 0.0), ZERO, ZERO, ZERO),
        qubit(c(y, 0.0), ZERO, ZERO, ONE),
    ])
}

/// The class-3 channel mapping `|c⟩ = c₀e^{iφ}|0⟩ + c₁|1⟩` to a pure state.
pub fn class3_channel(c1: f64, x: f64, phi: f64) -> Result<Channel> {
    for (name, v) in [("c1", c1), ("x", x)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(ChannelError::OutOfRange { name, value: v });
        }
    }
    if !phi.is_finite() {
        return Err(ChannelError::OutOfRange { name: "phi", value: phi });
    }
    let c0 = (1.0 - c1 * c1).sqrt();
    let a_norm2 = (1.0 - x * x) / (1.0 - x * x * c1 * c1);
    let a_dir = [c(c1, 0.0), -C64::from_polar(c0, -phi)];
    let a = a_dir.map(|z| z * a_norm2.sqrt());
    // |b⟩⟨b| = 𝟙 − x²|1⟩⟨1| − |a⟩⟨a| has rank one.
    let bb = qubit(
        c(1.0, 0.0) - a[0] * a[0].conj(),
        -a[0] * a[1].conj(),
        -a[1] * a[0].conj(),
        c(1.0 - x * x, 0.0) - a[1] * a[1].conj(),
    );
    let (vals, vecs) = hermitian_eigen(&bb);
    let top = vals[1].max(0.0).sqrt();
    let mut b = [vecs[(0, 1)] * top, vecs[(1, 1)] * top];
    if b[0].norm() > 0.0 {
        let ph = b[0].conj() / b[0].norm();
        b = b.map(|z| z * ph);
    }
    Channel::from_kraus(vec![
        qubit(a[0].conj(), a[1].conj(), ZERO, ZERO),
        qubit(b[0].conj(), b[1].conj(), ZERO, c(x, 0.0)),
    ])
}

/// Channel with Pauli transfer `Δ = diag(cos u, cos v, cos u cos v)`, `v = (0, 0, sin u sin v)`.
pub fn rank_two_from_angles(u: f64, v: f64) -> Result<Channel> {
    let (su, cu) = u.sin_cos();
    let (sv, cv) = v.sin_cos();
    let pt = PauliTransfer {
        v: Vector3::new(0.0, 0.0, su * sv),
        delta: nalgebra::Matrix3::from_diagonal(&Vector3::new(cu, cv, cu * cv)),
    };
    pt.to_channel()
}

/// The two rank-two factors `F₁ F₂` of the non-diagonal normal form with parameter `x`.
pub fn nondiagonal_decompose(x: f64) -> Result<(Channel, Channel)> {
    if !(0.0..1.0).contains(&x) {
        return Err(ChannelError::OutOfRange { name: "x", value: x });
    }
    let s = 1.0 / 3f64.sqrt();
    let mut f1 = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, s, s, 1.0 / 3.0));
    f1[(3, 0)] = 2.0 / 3.0;
    let f2 = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, x, x, 1.0));
    Ok((channel_from_pauli(&f1)?, channel_from_pauli(&f2)?))
}

const CLASS_TOL: f64 = 1e-9;

/// Brings a channel of Kraus rank at most two to `U₁ C U₂` form.
pub fn rank_two_normal_form(ch: &Channel) -> Result<(RankTwoClass, Channel)> {
    super::require_qubit(ch)?;
    let rank = ch.kraus_rank();
    if rank > 2 {
        return Err(ChannelError::WrongRank { rank, max: 2 });
    }
    let ops = &ch.kraus()?.operators;
    if rank == 1 {
        let scale = ops[0][(0, 0)].norm_sqr() + ops[0][(1, 0)].norm_sqr();
        let u1 = ops[0].unscale(scale.sqrt());
        let cls = RankTwoClass {
            kind: RankTwoKind::Class1 { x: 1.0 },
            u1,
            u2: identity(2),
        };
        return finish(ch, cls);
    }
    let (k1, k2) = (&ops[0], &ops[1]);
    let (al1, al2) = singular_combination(k1, k2);
    let m1 = k1 * al1 + k2 * al2;
    let m2 = k1 * (-al2.conj()) + k2 * al1.conj();

    let (u, _, _) = svd(&m1);
    let e0 = u.column(0).into_owned();
    let e1 = orthogonal_complement(&e0);
    let v1 = ComplexMatrix::from_fn(2, 2, |i, j| if i == 0 { e0[j].conj() } else { e1[j].conj() });

    let f3 = m2.adjoint() * &e1;
    let x = f3.norm();
    if x < CLASS_TOL {
        let cls = RankTwoClass {
            kind: RankTwoKind::Class1 { x: 0.0 },
            u1: v1.adjoint(),
            u2: identity(2),
        };
        return finish(ch, cls);
    }
    let g1 = f3.unscale(x);
    let g0 = orthogonal_complement(&g1);
    let v2 = ComplexMatrix::from_fn(2, 2, |i, j| if j == 0 { g0[i] } else { g1[i] });

    let a1 = &v1 * &m1 * &v2;
    let a2 = &v1 * &m2 * &v2;
    // rows of A₁, A₂ in the |0⟩ line are ⟨a|, ⟨b|
    let mut a = [a1[(0, 0)].conj(), a1[(0, 1)].conj()];
    let mut b = [a2[(0, 0)].conj(), a2[(0, 1)].conj()];
    let x = a2[(1, 1)].re;
    let mut w0 = ONE;
    if b[0].norm() > 1e-14 {
        w0 = b[0] / b[0].norm();
        b = b.map(|z| z * w0.conj());
        // ⟨b| picks up w0, so |a⟩ does as well before its own phase fix
    }
    a = a.map(|z| z * w0.conj());
    if a[0].norm() > 1e-14 {
        let ph = a[0].conj() / a[0].norm();
        a = a.map(|z| z * ph);
    }
    let w = qubit(w0, ZERO, ZERO, ONE);
    let mut u1 = v1.adjoint() * w.adjoint();
    let mut u2 = v2.adjoint();

    let a_norm = (a[0].norm_sqr() + a[1].norm_sqr()).sqrt();
    let kind = if a[0].norm() < CLASS_TOL && b[1].norm() < CLASS_TOL {
        RankTwoKind::Class1 { x }
    } else if (x - 1.0).abs() < CLASS_TOL {
        RankTwoKind::Class2 { y: b[0].norm().min(1.0) }
    } else {
        let c1 = (a[0].re / a_norm).clamp(0.0, 1.0);
        // class3(φ) = T_D ∘ class3(0) ∘ T_{D†} with D = diag(1, e^{−iφ})
        let phi = (-a[1].conj()).arg();
        let d = qubit(ONE, ZERO, ZERO, C64::from_polar(1.0, -phi));
        u1 = u1 * &d;
        u2 = d.adjoint() * u2;
        RankTwoKind::Class3 { c1, x, phi: 0.0 }
    };
    finish(ch, RankTwoClass { kind, u1, u2 })
}

fn finish(ch: &Channel, cls: RankTwoClass) -> Result<(RankTwoClass, Channel)> {
    let c = cls.kind.channel()?;
    let rebuilt = Channel::unitary(&cls.u1)?
        .compose(&c)?
        .compose(&Channel::unitary(&cls.u2)?)?;
    let err = distance(&rebuilt, ch)?;
    if err > 1e-8 {
        return Err(ChannelError::NumericalFailure(format!(
            "rank-two normal form reconstruction error {err:.3e}"
        )));
    }
    Ok((cls, c))
}

/// Unit `(α₁, α₂)` with `det(α₁K₁ + α₂K₂) = 0`.
fn singular_combination(k1: &ComplexMatrix, k2: &ComplexMatrix) -> (C64, C64) {
    let det = |m: &ComplexMatrix| m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let scale = (k1.norm_squared() + k2.norm_squared()).max(1e-300);
    let a = det(k1);
    let cc = det(k2);
    if a.norm() < 1e-14 * scale {
        return (ONE, ZERO);
    }
    if cc.norm() < 1e-14 * scale {
        return (ZERO, ONE);
    }
    let b = det(&(k1 + k2)) - a - cc;
    // α² a + α b + c = 0 with the pair (α, 1)
    let disc = (b * b - a * cc * 4.0).sqrt();
    let q = if (b.conj() * disc).re >= 0.0 {
        (b + disc) * -0.5
    } else {
        (b - disc) * -0.5
    };
    let alpha = if q.norm() > 0.0 { cc / q } else { ZERO };
    let n = (alpha.norm_sqr() + 1.0).sqrt();
    (alpha / n, ONE / n)
}

fn orthogonal_complement(v: &nalgebra::DVector<C64>) -> nalgebra::DVector<C64> {
    nalgebra::DVector::from_column_slice(&[-v[1].conj(), v[0].conj()])
}

/// `L(ρ) = 2|0⟩⟨1|ρ|1⟩⟨0| − {|1⟩⟨1|, ρ}`, with `C_x = exp(−ln(x) L)`.
pub fn class1_generator() -> LindbladGenerator {
    let op = qubit(ZERO, c(SQRT_2, 0.0), ZERO, ZERO);
    make_generator(ComplexMatrix::zeros(2, 2), Dissipator::LindbladOps(vec![op]))
        .expect("valid generator")
}

/// `L(ρ) = (σ_z ρ σ_z − ρ)/2`, with `C_y = exp(−ln(y) L)`.
pub fn class2_generator() -> LindbladGenerator {
    make_generator(
        ComplexMatrix::zeros(2, 2),
        Dissipator::LindbladOps(vec![pauli_z().scale(std::f64::consts::FRAC_1_SQRT_2)]),
    )
    .expect("valid generator")
}

/// Generator of `ε ↦ C_{c₁,e^{−ε},φ}` at `ε = 0`.
pub fn class3_generator(c1: f64, phi: f64) -> LindbladGenerator {
    let c0 = (1.0 - c1 * c1).sqrt();
    let e = C64::from_polar(1.0, phi);
    let h = qubit(ZERO, e * c(0.0, c1 / c0), e.conj() * c(0.0, -c1 / c0), ZERO);
    let a = qubit(c(SQRT_2 * c1 / c0, 0.0), -e * SQRT_2, ZERO, ZERO);
    make_generator(h, Dissipator::LindbladOps(vec![a])).expect("valid generator")
}

fn non_degenerate(name: &'static str, v: f64) -> Result<()> {
    if v <= CLASS_TOL || v >= 1.0 - CLASS_TOL {
        Err(ChannelError::DegenerateClass { name, value: v })
    } else {
        Ok(())
    }
}

/// Schedule whose time-ordered exponential is the canonical channel of `kind`.
pub fn rank_two_generator_schedule(kind: &RankTwoKind) -> Result<GeneratorSchedule> {
    match *kind {
        RankTwoKind::Class1 { x } => {
            non_degenerate("x", x)?;
            Ok(GeneratorSchedule::constant(class1_generator(), -x.ln()))
        }
        RankTwoKind::Class2 { y } => {
            non_degenerate("y", y)?;
            Ok(GeneratorSchedule::constant(class2_generator(), -y.ln()))
        }
        RankTwoKind::Class3 { c1, x, phi } => {
            non_degenerate("x", x)?;
            non_degenerate("c1", c1)?;
            Ok(GeneratorSchedule {
                dim: 2,
                duration: -x.ln(),
                sample: Arc::new(move |tau| class3_generator(c1 * (-tau).exp(), phi)),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{determinant, validate};
    use crate::linalg::{ket, outer};
    use crate::markov::{exp_generator, time_ordered_exp, validate_generator};
    use crate::qubit::pauli_transfer;

    #[test]
    fn class1_semigroup_law() {
        for x1 in [0.1, 0.4, 0.9] {
            for x2 in [0.2, 0.5, 0.8] {
                let p = class1_channel(x1).unwrap().compose(&class1_channel(x2).unwrap()).unwrap();
                assert!(distance(&p, &class1_channel(x1 * x2).unwrap()).unwrap() < 1e-14);
            }
        }
    }

    #[test]
    fn class2_from_generator() {
        let y: f64 = 0.7;
        let e = exp_generator(&class2_generator(), -y.ln()).unwrap();
        assert!(distance(&e, &class2_channel(y).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn class3_maps_c_to_pure_state() {
        let (c1, x, phi) = (0.6f64, 0.5, 1.0);
        let ch = class3_channel(c1, x, phi).unwrap();
        let c0 = (1.0 - c1 * c1).sqrt();
        let v = ket(&[C64::from_polar(c0, phi), c(c1, 0.0)]);
        let out = ch.apply(&outer(&v, &v)).unwrap();
        assert!(((&out * &out).trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn class3_composition_law() {
        let (c1, x, y, phi) = (0.6, 0.5, 0.7, 1.0);
        let lhs = class3_channel(x * c1, y, phi)
            .unwrap()
            .compose(&class3_channel(c1, x, phi).unwrap())
            .unwrap();
        let rhs = class3_channel(c1, x * y, phi).unwrap();
        assert!(distance(&lhs, &rhs).unwrap() < 1e-12);
    }

    #[test]
    fn class3_limit_is_identity() {
        let ch = class3_channel(0.6, 1.0 - 1e-7, 2.0).unwrap();
        assert!(distance(&ch, &Channel::identity(2).unwrap()).unwrap() < 1e-6);
    }

    #[test]
    fn class3_generator_is_the_derivative() {
        let (c1, phi) = (0.4, 2.3);
        let eps = 1e-5;
        let fd = (class3_channel(c1, (-eps as f64).exp(), phi).unwrap().transfer() - identity(4))
            .unscale(eps);
        let l = class3_generator(c1, phi);
        assert!(validate_generator(&l).is_valid());
        assert!(crate::linalg::max_abs_diff(&fd, &l.transfer()) < 1e-4);
    }

    #[test]
    fn midpoint_product_converges_quadratically() {
        let s = rank_two_generator_schedule(&RankTwoKind::Class3 { c1: 0.6, x: 0.5, phi: 1.0 }).unwrap();
        let reference = time_ordered_exp(&s, 4096).unwrap();
        let err = |n| distance(&time_ordered_exp(&s, n).unwrap(), &reference).unwrap();
        let (e128, e256) = (err(128), err(256));
        assert!(e256 < 1e-5);
        assert!((e128 / e256 - 4.0).abs() < 0.2, "ratio {}", e128 / e256);
        assert!(distance(&reference, &class3_channel(0.6, 0.5, 1.0).unwrap()).unwrap() < 1e-7);
    }

    #[test]
    fn class1_schedule_is_exact() {
        let s = rank_two_generator_schedule(&RankTwoKind::Class1 { x: 0.5 }).unwrap();
        let ch = time_ordered_exp(&s, 3).unwrap();
        assert!(distance(&ch, &class1_channel(0.5).unwrap()).unwrap() < 1e-10);
    }

    #[test]
    fn degenerate_schedule_rejected() {
        assert!(matches!(
            rank_two_generator_schedule(&RankTwoKind::Class2 { y: 1.0 }),
            Err(ChannelError::DegenerateClass { .. })
        ));
    }

    #[test]
    fn angles_family() {
        let id = rank_two_from_angles(0.0, 0.0).unwrap();
        assert!(distance(&id, &Channel::identity(2).unwrap()).unwrap() < 1e-15);
        let ch = rank_two_from_angles(std::f64::consts::FRAC_PI_3, std::f64::consts::FRAC_PI_3).unwrap();
        let r = validate(&ch).unwrap();
        assert!(r.is_completely_positive);
        assert_eq!(r.kraus_rank, 2);
        assert!((r.det - 1.0 / 16.0).abs() < 1e-14);
        let deph = pauli_transfer(&rank_two_from_angles(0.0, 0.8).unwrap()).unwrap();
        assert!((deph.delta[(2, 2)] - 0.8f64.cos()).abs() < 1e-15);
        assert!(deph.v.norm() < 1e-15);
    }

    #[test]
    fn decompose_half() {
        let (f1, f2) = nondiagonal_decompose(0.5).unwrap();
        let pt = pauli_transfer(&f1.compose(&f2).unwrap()).unwrap();
        let s = 1.0 / (2.0 * 3f64.sqrt());
        let expected = nalgebra::Matrix3::from_diagonal(&Vector3::new(s, s, 1.0 / 3.0));
        assert!((pt.delta - expected).abs().max() < 1e-15);
        assert!((pt.v - Vector3::new(0.0, 0.0, 2.0 / 3.0)).abs().max() < 1e-15);
        for x in 1..10 {
            let (f1, f2) = nondiagonal_decompose(x as f64 / 10.0).unwrap();
            for f in [f1, f2] {
                assert!(f.is_cp() && f.kraus_rank() <= 2);
            }
        }
        let (_, f2) = nondiagonal_decompose(0.0).unwrap();
        let pt = pauli_transfer(&f2).unwrap();
        assert!((pt.delta - nalgebra::Matrix3::from_diagonal(&Vector3::new(0.0, 0.0, 1.0))).abs().max() < 1e-15);
        assert!(determinant(&f2).unwrap().abs() < 1e-15);
    }

    #[test]
    fn normal_form_of_canonical_channels() {
        let (cls, _) = rank_two_normal_form(&class1_channel(0.5).unwrap()).unwrap();
        assert!(matches!(cls.kind, RankTwoKind::Class1 { x } if (x - 0.5).abs() < 1e-10));
        let (cls, _) = rank_two_normal_form(&class2_channel(0.7).unwrap()).unwrap();
        assert!(matches!(cls.kind, RankTwoKind::Class2 { y } if (y - 0.7).abs() < 1e-10));
        for phi in [0.0, 1.0, 2.0, 4.0] {
            let (cls, _) = rank_two_normal_form(&class3_channel(0.6, 0.5, phi).unwrap()).unwrap();
            match cls.kind {
                RankTwoKind::Class3 { c1, x, phi } => {
                    assert!((c1 - 0.6).abs() < 1e-9 && (x - 0.5).abs() < 1e-9 && phi == 0.0);
                }
                other => panic!("unexpected {other:?}"),
            }
        }
        let u = qubit(c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.8), c(0.6, 0.0));
        let (cls, _) = rank_two_normal_form(&Channel::unitary(&u).unwrap()).unwrap();
        assert_eq!(cls.kind, RankTwoKind::Class1 { x: 1.0 });
    }

    #[test]
    fn normal_form_rejects_rank_three() {
        let ch = crate::channel::minimal_determinant_channel(2).unwrap();
        assert!(matches!(rank_two_normal_form(&ch), Err(ChannelError::WrongRank { rank: 3, max: 2 })));
    }
}
