use serde::Serialize;

use super::{lorentz_normal_form, LorentzNormalForm, NormalForm};
use crate::channel::{determinant, Channel};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Divisibility {
    Unitary,
    Divisible,
    Indivisible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Infinitesimal {
    InfinitesimalDivisible,
    NotInfinitesimalDivisible,
    BoundaryZeroDet,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evidence {
    pub kraus_rank: usize,
    pub normal_form: &'static str,
    pub det: f64,
    /// Squared smallest singular value of the normal form's `Δ`; zero for
    /// non-diagonal forms.
    pub s_min_sq: f64,
    pub det_delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    pub divisibility: Divisibility,
    pub infinitesimal: Infinitesimal,
    pub positive_divisible: bool,
    pub evidence: Evidence,
    pub normal_form: LorentzNormalForm,
}

const ZERO_DET: f64 = 1e-10;
const RANK_DELTA: f64 = 1e-9;

pub fn classify(ch: &Channel) -> Result<ClassificationReport> {
    super::require_qubit(ch)?;
    let rank = ch.kraus_rank();
    let det = determinant(ch)?;
    let nf = lorentz_normal_form(ch)?;
    let (s_min_sq, det_delta) = match nf.form {
        NormalForm::Diagonal { lambda } => {
            let s_min = lambda.iter().fold(f64::INFINITY, |m, l| m.min(l.abs()));
            (s_min * s_min, lambda.iter().product())
        }
        _ => (0.0, 0.0),
    };
    let diagonal = matches!(nf.form, NormalForm::Diagonal { .. });
    let unitary = rank == 1;
    let divisibility = if unitary {
        Divisibility::Unitary
    } else if rank == 3 && diagonal {
        Divisibility::Indivisible
    } else {
        Divisibility::Divisible
    };
    let infinitesimal = match nf.form {
        NormalForm::NonDiagonal { .. } | NormalForm::Singular => Infinitesimal::InfinitesimalDivisible,
        NormalForm::Diagonal { lambda } => {
            if lambda[1].abs() < RANK_DELTA {
                Infinitesimal::InfinitesimalDivisible
            } else if det.abs() < ZERO_DET {
                Infinitesimal::BoundaryZeroDet
            } else if det_delta > 0.0 && s_min_sq >= det_delta - ZERO_DET {
                Infinitesimal::InfinitesimalDivisible
            } else {
                Infinitesimal::NotInfinitesimalDivisible
            }
        }
    };
    // Unitaries are trivially infinitesimal divisible, and an indivisible
    // channel cannot be a limit of near-identity products.
    let infinitesimal = match divisibility {
        Divisibility::Unitary => Infinitesimal::InfinitesimalDivisible,
        Divisibility::Indivisible if infinitesimal == Infinitesimal::InfinitesimalDivisible => {
            Infinitesimal::NotInfinitesimalDivisible
        }
        _ => infinitesimal,
    };
    Ok(ClassificationReport {
        divisibility,
        infinitesimal,
        positive_divisible: det >= -ZERO_DET,
        evidence: Evidence {
            kraus_rank: rank,
            normal_form: nf.form.tag(),
            det,
            s_min_sq,
            det_delta,
        },
        normal_form: nf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::minimal_determinant_channel;
    use crate::qubit::{amplitude_damping, unital_channel};

    #[test]
    fn transpose_depolarize_is_indivisible() {
        let r = classify(&minimal_determinant_channel(2).unwrap()).unwrap();
        assert_eq!(r.divisibility, Divisibility::Indivisible);
        assert_eq!(r.infinitesimal, Infinitesimal::NotInfinitesimalDivisible);
        assert!(!r.positive_divisible);
    }

    #[test]
    fn unital_truth_table() {
        let r = classify(&unital_channel([0.8, 0.7, 0.5]).unwrap()).unwrap();
        assert_eq!(r.divisibility, Divisibility::Indivisible);
        assert!((r.evidence.det - 0.28).abs() < 1e-12);
        assert!((r.evidence.s_min_sq - 0.25).abs() < 1e-12);
        assert_eq!(r.infinitesimal, Infinitesimal::NotInfinitesimalDivisible);

        let r = classify(&unital_channel([0.9, 0.6, 0.6]).unwrap()).unwrap();
        assert_eq!(r.divisibility, Divisibility::Divisible);
        assert_eq!(r.evidence.kraus_rank, 4);
        assert_eq!(r.infinitesimal, Infinitesimal::InfinitesimalDivisible);
    }

    #[test]
    fn amplitude_damping_is_divisible() {
        let r = classify(&amplitude_damping(0.5).unwrap()).unwrap();
        assert_eq!(r.divisibility, Divisibility::Divisible);
        assert_eq!(r.infinitesimal, Infinitesimal::InfinitesimalDivisible);
        assert!(r.positive_divisible);
    }
}
