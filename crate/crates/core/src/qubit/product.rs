//! Factorization of infinitesimal-divisible qubit channels into products of
//! channels close to the identity.

use super::{
    classify, nondiagonal_decompose, rank_two_generator_schedule, rank_two_normal_form,
    unital_semigroup_channel, Infinitesimal, NormalForm, RankTwoKind,
};
use crate::channel::{Channel, LinearMap};
use crate::error::{ChannelError, Result};
use crate::linalg::{
    hermitian_part, identity, inverse, max_abs_diff, polar_unitary, psd_sqrt, ComplexMatrix,
};
use crate::markov::time_ordered_factors;

/// Factors of a rank-at-most-two channel, leftmost first.
fn rank_two_factors(ch: &Channel, n: usize) -> Result<Vec<Channel>> {
    let (cls, _) = rank_two_normal_form(ch)?;
    let trivial = match cls.kind {
        RankTwoKind::Class1 { x } => x >= 1.0 - 1e-12,
        RankTwoKind::Class2 { y } => y >= 1.0 - 1e-12,
        RankTwoKind::Class3 { .. } => false,
    };
    let mut out = vec![Channel::unitary(&cls.u1)?];
    if !trivial {
        let sched = rank_two_generator_schedule(&cls.kind).map_err(|e| match e {
            ChannelError::DegenerateClass { .. } => ChannelError::ClosureOnly,
            other => other,
        })?;
        let mut steps = time_ordered_factors(&sched, n)?;
        steps.reverse();
        out.extend(steps);
    }
    out.push(Channel::unitary(&cls.u2)?);
    Ok(out)
}

/// Channels whose product (leftmost applied last) reconstructs `ch`.
///
/// Unital normal forms are cut into `n` equal semigroup steps, rank-two pieces
/// into `n` time-ordered steps. Filters are redistributed so that every
/// factor is trace preserving.
pub fn markov_product_factors(ch: &Channel, n: usize) -> Result<Vec<Channel>> {
    super::require_qubit(ch)?;
    if n == 0 {
        return Err(ChannelError::OutOfRange { name: "n", value: 0.0 });
    }
    let report = classify(ch)?;
    match report.infinitesimal {
        Infinitesimal::NotInfinitesimalDivisible => return Err(ChannelError::NotInfinitesimalDivisible),
        Infinitesimal::BoundaryZeroDet => return Err(ChannelError::ClosureOnly),
        Infinitesimal::InfinitesimalDivisible => {}
    }
    if report.evidence.kraus_rank <= 2 {
        return rank_two_factors(ch, n);
    }
    let nf = &report.normal_form;
    let pieces: Vec<Channel> = match nf.form {
        NormalForm::Diagonal { lambda } => {
            if lambda.iter().any(|&l| l <= 1e-9) {
                return Err(ChannelError::ClosureOnly);
            }
            let step = unital_semigroup_channel(lambda, 1.0 / n as f64)?;
            vec![step; n]
        }
        NormalForm::NonDiagonal { x } => {
            if x <= 1e-9 {
                return Err(ChannelError::ClosureOnly);
            }
            if x >= 1.0 - 1e-9 {
                rank_two_factors(&super::normal_form_channel(&nf.form)?, n)?
            } else {
                let (f1, f2) = nondiagonal_decompose(x)?;
                let mut v = rank_two_factors(&f1, n)?;
                v.extend(rank_two_factors(&f2, n)?);
                v
            }
        }
        NormalForm::Singular => return Err(ChannelError::ClosureOnly),
    };
    rebalance_chain(&inverse(&nf.a)?, &pieces, &inverse(&nf.b)?)
}

/// Rewrites `T_L N₁ ⋯ N_m T_R` as a product of trace-preserving factors.
fn rebalance_chain(left: &ComplexMatrix, pieces: &[Channel], right: &ComplexMatrix) -> Result<Vec<Channel>> {
    let w = polar_unitary(left);
    let mut p = hermitian_part(&(w.adjoint() * left));
    let mut out = vec![Channel::unitary(&w)?];
    for piece in pieces {
        let q = piece.as_map().dual().apply(&(&p * &p))?;
        let p_next = psd_sqrt(&hermitian_part(&q));
        let factor = LinearMap::conjugation(&p)?
            .compose(&piece.as_map())?
            .compose(&LinearMap::conjugation(&inverse(&p_next)?)?)?
            .into_channel()?;
        if !factor.is_cp() {
            return Err(ChannelError::NumericalFailure("rebalanced factor is not CP".into()));
        }
        out.push(factor);
        p = p_next;
    }
    let last = &p * right;
    let err = max_abs_diff(&(last.adjoint() * &last), &identity(2));
    if err > 1e-6 {
        return Err(ChannelError::NumericalFailure(format!(
            "closing filter is not unitary (error {err:.3e})"
        )));
    }
    out.push(Channel::unitary(&polar_unitary(&last))?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use crate::markov::markov_product_approx;
    use crate::qubit::{amplitude_damping, unital_channel};
    use crate::channel::Channel;
    use crate::error::ChannelError;

    #[test]
    fn depolarizing_is_exact() {
        let ch = Channel::depolarizing(2, 0.5).unwrap();
        for n in [1, 4, 32] {
            let (_, err) = markov_product_approx(&ch, n).unwrap();
            assert!(err < 1e-9);
        }
    }

    #[test]
    fn unital_semigroup_product() {
        let (_, err) = markov_product_approx(&unital_channel([0.9, 0.6, 0.6]).unwrap(), 64).unwrap();
        assert!(err < 1e-6);
    }

    #[test]
    fn amplitude_damping_product() {
        let (_, err) = markov_product_approx(&amplitude_damping(0.75).unwrap(), 1024).unwrap();
        assert!(err < 1e-2);
    }

    #[test]
    fn indivisible_rejected() {
        let ch = unital_channel([0.8, 0.7, 0.5]).unwrap();
        assert_eq!(markov_product_approx(&ch, 8).unwrap_err(), ChannelError::NotInfinitesimalDivisible);
    }
}
