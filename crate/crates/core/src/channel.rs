//! Linear maps on `M_d`, trace-preserving channels and their structural tests.
//!
//! A [`Channel`] stores its Choi state as the source of truth together with
//! the matrix-units transfer matrix `T̂ = d·τ^Γ`. Kraus operators are extracted
//! lazily from the spectrum of `d·τ`.

use std::sync::OnceLock;

use serde::Serialize;

use crate::basis::{self, Basis};
use crate::error::{ChannelError, Result};
use crate::linalg::{
    c, frobenius, hermitian_eigen, hermitian_eigenvalues, hermitian_part, hermiticity_residual,
    identity, inverse, is_finite, kron, max_abs, max_abs_diff, op_norm, partial_trace_first,
    partial_trace_second, psd_sqrt, reshuffle, unvectorize, vectorize, ComplexMatrix, C64, ONE,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub herm_tol: f64,
    pub trace_tol: f64,
    /// Relative to the largest Choi eigenvalue.
    pub psd_tol: f64,
    pub tp_tol: f64,
    pub norm_tol: f64,
    pub rank_rel_tol: f64,
    pub conv_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm_tol: 1e-9,
            trace_tol: 1e-9,
            psd_tol: 1e-9,
            tp_tol: 1e-9,
            norm_tol: 1e-9,
            rank_rel_tol: 1e-7,
            conv_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChoiState {
    pub dim: usize,
    pub tau: ComplexMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KrausRep {
    pub dim: usize,
    pub operators: Vec<ComplexMatrix>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    pub dim: usize,
    pub basis: Basis,
    pub mat: ComplexMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Representation {
    Kraus(KrausRep),
    Choi(ChoiState),
    Transfer(TransferMatrix),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepresentationKind {
    Kraus,
    Choi,
    Transfer(Basis),
}

impl KrausRep {
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = operators.first().map(|k| k.nrows()).unwrap_or(0);
        for k in &operators {
            if k.nrows() != dim || k.ncols() != dim {
                return Err(ChannelError::DimensionMismatch {
                    expected: dim,
                    got: if k.nrows() != dim { k.nrows() } else { k.ncols() },
                });
            }
        }
        Ok(Self { dim, operators })
    }

    /// `Σ K ⊗ K̄`.
    pub fn transfer(&self) -> ComplexMatrix {
        let n = self.dim * self.dim;
        self.operators
            .iter()
            .fold(ComplexMatrix::zeros(n, n), |acc, k| acc + kron(k, &k.conjugate()))
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        Err(ChannelError::DegenerateDimension(d))
    } else {
        Ok(())
    }
}

fn choi_from_transfer(t: &ComplexMatrix, d: usize) -> ComplexMatrix {
    reshuffle(t, d).unscale(d as f64)
}

fn transfer_from_choi(tau: &ComplexMatrix, d: usize) -> ComplexMatrix {
    reshuffle(tau, d).scale(d as f64)
}

/// Conjugation `X ↦ A X A†` as a matrix-units transfer matrix.
pub fn conjugation_transfer(a: &ComplexMatrix) -> ComplexMatrix {
    kron(a, &a.conjugate())
}

/// A linear map on `M_d` that need not be trace preserving or positive.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    pub dim: usize,
    /// Matrix-units transfer matrix.
    pub transfer: ComplexMatrix,
}

impl LinearMap {
    pub fn from_transfer(transfer: ComplexMatrix) -> Result<Self> {
        let n = transfer.nrows();
        let d = (n as f64).sqrt().round() as usize;
        if d * d != n || transfer.ncols() != n {
            return Err(ChannelError::DimensionMismatch {
                expected: d * d,
                got: transfer.ncols(),
            });
        }
        if !is_finite(&transfer) {
            return Err(ChannelError::NonFinite);
        }
        check_dim(d)?;
        Ok(Self { dim: d, transfer })
    }

    pub fn from_kraus(ops: &[ComplexMatrix]) -> Result<Self> {
        Self::from_transfer(KrausRep::new(ops.to_vec())?.transfer())
    }

    pub fn conjugation(a: &ComplexMatrix) -> Result<Self> {
        Self::from_transfer(conjugation_transfer(a))
    }

    pub fn choi(&self) -> ComplexMatrix {
        choi_from_transfer(&self.transfer, self.dim)
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.nrows() != self.dim || rho.ncols() != self.dim {
            return Err(ChannelError::DimensionMismatch {
                expected: self.dim,
                got: rho.nrows(),
            });
        }
        Ok(unvectorize(&(&self.transfer * vectorize(rho)), self.dim))
    }

    pub fn dual(&self) -> LinearMap {
        LinearMap {
            dim: self.dim,
            transfer: self.transfer.adjoint(),
        }
    }

    pub fn compose(&self, other: &LinearMap) -> Result<LinearMap> {
        same_dim(self.dim, other.dim)?;
        Ok(LinearMap {
            dim: self.dim,
            transfer: &self.transfer * &other.transfer,
        })
    }

    /// `T*(𝟙)`.
    pub fn dual_of_identity(&self) -> ComplexMatrix {
        unvectorize(&(self.transfer.adjoint() * vectorize(&identity(self.dim))), self.dim)
    }

    pub fn tp_residual(&self) -> f64 {
        max_abs_diff(&self.dual_of_identity(), &identity(self.dim))
    }

    pub fn unital_residual(&self) -> f64 {
        let out = unvectorize(&(&self.transfer * vectorize(&identity(self.dim))), self.dim);
        frobenius(&(out - identity(self.dim)))
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        self.tp_residual() <= tol
    }

    pub fn is_unital(&self, tol: f64) -> bool {
        self.unital_residual() <= tol * self.dim as f64
    }

    pub fn into_channel(self) -> Result<Channel> {
        build_channel(Representation::Transfer(TransferMatrix {
            dim: self.dim,
            basis: Basis::MatrixUnits,
            mat: self.transfer,
        }))
    }
}

fn same_dim(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(ChannelError::DimensionMismatch { expected: a, got: b })
    }
}

/// A trace-preserving, Hermiticity-preserving map. Complete positivity is
/// reported by [`validate`], not enforced, so that maps such as the
/// transposition can be analysed with the same machinery.
#[derive(Debug, Clone)]
pub struct Channel {
    dim: usize,
    choi: ChoiState,
    transfer: ComplexMatrix,
    kraus: OnceLock<KrausRep>,
    tolerances: Tolerances,
}

impl PartialEq for Channel {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.choi == other.choi
    }
}

pub fn build_channel(rep: Representation) -> Result<Channel> {
    build_channel_with(rep, Tolerances::default())
}

pub fn build_channel_with(rep: Representation, tolerances: Tolerances) -> Result<Channel> {
    let (dim, tau, kraus) = match rep {
        Representation::Kraus(k) => {
            if k.operators.is_empty() {
                return Err(ChannelError::DimensionMismatch { expected: 1, got: 0 });
            }
            let k = KrausRep::new(k.operators)?;
            check_dim(k.dim)?;
            if k.operators.iter().any(|m| !is_finite(m)) {
                return Err(ChannelError::NonFinite);
            }
            let tau = choi_from_transfer(&k.transfer(), k.dim);
            (k.dim, tau, Some(k))
        }
        Representation::Choi(ch) => {
            check_dim(ch.dim)?;
            if ch.tau.nrows() != ch.dim * ch.dim || ch.tau.ncols() != ch.dim * ch.dim {
                return Err(ChannelError::DimensionMismatch {
                    expected: ch.dim * ch.dim,
                    got: ch.tau.nrows(),
                });
            }
            (ch.dim, ch.tau, None)
        }
        Representation::Transfer(t) => {
            check_dim(t.dim)?;
            let n = t.dim * t.dim;
            if t.mat.nrows() != n || t.mat.ncols() != n {
                return Err(ChannelError::DimensionMismatch {
                    expected: n,
                    got: t.mat.nrows(),
                });
            }
            let mu = basis::from_basis(&t.mat, t.basis, t.dim);
            (t.dim, choi_from_transfer(&mu, t.dim), None)
        }
    };
    if !is_finite(&tau) {
        return Err(ChannelError::NonFinite);
    }
    let herm = hermiticity_residual(&tau);
    if herm > tolerances.herm_tol {
        return Err(ChannelError::NotHermitian { residual: herm });
    }
    let tau = hermitian_part(&tau);
    let marginal = partial_trace_first(&tau, dim).scale(dim as f64);
    let tp = max_abs_diff(&marginal, &identity(dim));
    if tp > tolerances.tp_tol {
        return Err(ChannelError::NotTracePreserving { residual: tp });
    }
    let transfer = transfer_from_choi(&tau, dim);
    let cache = OnceLock::new();
    if let Some(k) = kraus {
        let _ = cache.set(k);
    }
    Ok(Channel {
        dim,
        choi: ChoiState { dim, tau },
        transfer,
        kraus: cache,
        tolerances,
    })
}

impl Channel {
    pub fn from_kraus(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let k = KrausRep::new(ops)?;
        build_channel(Representation::Kraus(k))
    }

    pub fn from_choi(tau: ComplexMatrix) -> Result<Self> {
        let d = (tau.nrows() as f64).sqrt().round() as usize;
        build_channel(Representation::Choi(ChoiState { dim: d, tau }))
    }

    /// From a matrix-units transfer matrix.
    pub fn from_transfer(mat: ComplexMatrix) -> Result<Self> {
        LinearMap::from_transfer(mat)?.into_channel()
    }

    pub fn from_transfer_in(mat: ComplexMatrix, basis: Basis) -> Result<Self> {
        let d = (mat.nrows() as f64).sqrt().round() as usize;
        build_channel(Representation::Transfer(TransferMatrix { dim: d, basis, mat }))
    }

    pub fn identity(d: usize) -> Result<Self> {
        Self::from_kraus(vec![identity(d)])
    }

    /// `X ↦ U X U†`.
    pub fn unitary(u: &ComplexMatrix) -> Result<Self> {
        Self::from_kraus(vec![u.clone()])
    }

    /// `X ↦ 𝟙 tr[X] / d`.
    pub fn completely_depolarizing(d: usize) -> Result<Self> {
        let n = d * d;
        Self::from_choi(identity(n).unscale(n as f64))
    }

    /// `X ↦ p X + (1 - p) 𝟙 tr[X] / d`.
    pub fn depolarizing(d: usize, p: f64) -> Result<Self> {
        let id = vectorize(&identity(d));
        let t = identity(d * d).scale(p) + (&id * id.transpose()).scale((1.0 - p) / d as f64);
        Self::from_transfer(t)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tolerances
    }

    pub fn choi(&self) -> &ChoiState {
        &self.choi
    }

    pub fn tau(&self) -> &ComplexMatrix {
        &self.choi.tau
    }

    /// Matrix-units transfer matrix.
    pub fn transfer(&self) -> &ComplexMatrix {
        &self.transfer
    }

    pub fn transfer_in(&self, basis: Basis) -> ComplexMatrix {
        basis::to_basis(&self.transfer, basis, self.dim)
    }

    pub fn as_map(&self) -> LinearMap {
        LinearMap {
            dim: self.dim,
            transfer: self.transfer.clone(),
        }
    }

    pub fn kraus(&self) -> Result<&KrausRep> {
        if let Some(k) = self.kraus.get() {
            return Ok(k);
        }
        let k = extract_kraus(&self.choi.tau, self.dim, &self.tolerances)?;
        Ok(self.kraus.get_or_init(|| k))
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        apply(self, rho)
    }

    /// `self ∘ other`: `other` acts first.
    pub fn compose(&self, other: &Channel) -> Result<Channel> {
        compose(self, other)
    }

    pub fn determinant(&self) -> Result<f64> {
        determinant(self)
    }

    /// Eigenvalues of `τ`, ascending.
    pub fn choi_eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.choi.tau)
    }

    pub fn kraus_rank(&self) -> usize {
        kraus_rank_of(&self.choi_eigenvalues(), self.tolerances.rank_rel_tol)
    }

    pub fn is_cp(&self) -> bool {
        let ev = self.choi_eigenvalues();
        let max = ev.last().copied().unwrap_or(0.0).max(0.0);
        ev[0] >= -self.tolerances.psd_tol * max.max(f64::MIN_POSITIVE)
    }
}

fn kraus_rank_of(eigs: &[f64], rel: f64) -> usize {
    let max = eigs.iter().copied().fold(0.0, f64::max);
    eigs.iter().filter(|&&v| v > rel * max).count()
}

fn extract_kraus(tau: &ComplexMatrix, d: usize, tol: &Tolerances) -> Result<KrausRep> {
    let scaled = tau.scale(d as f64);
    let (vals, vecs) = hermitian_eigen(&scaled);
    let max = vals.last().copied().unwrap_or(0.0);
    if vals[0] < -tol.psd_tol * max.max(f64::MIN_POSITIVE) {
        return Err(ChannelError::NegativeChoi {
            min_eigenvalue: vals[0] / d as f64,
        });
    }
    let mut ops = Vec::new();
    for k in (0..vals.len()).rev() {
        if vals[k] <= tol.rank_rel_tol * max {
            break;
        }
        let s = vals[k].sqrt();
        let mut op = ComplexMatrix::from_fn(d, d, |a, i| vecs[(a * d + i, k)] * s);
        fix_phase(&mut op);
        ops.push(op);
    }
    KrausRep::new(ops)
}

/// Rotates the global phase so that the largest-magnitude entry is real positive.
pub fn fix_phase(op: &mut ComplexMatrix) {
    let mut best = ONE;
    let mut best_norm = -1.0;
    for z in op.iter() {
        // Small slack keeps the choice stable under rounding between equal entries.
        if z.norm() > best_norm * (1.0 + 1e-12) {
            best_norm = z.norm();
            best = *z;
        }
    }
    if best_norm > 0.0 {
        let phase = best.conj() / best.norm();
        *op *= phase;
    }
}

pub fn convert(ch: &Channel, target: RepresentationKind) -> Result<Representation> {
    Ok(match target {
        RepresentationKind::Kraus => Representation::Kraus(ch.kraus()?.clone()),
        RepresentationKind::Choi => Representation::Choi(ch.choi.clone()),
        RepresentationKind::Transfer(b) => Representation::Transfer(TransferMatrix {
            dim: ch.dim,
            basis: b,
            mat: ch.transfer_in(b),
        }),
    })
}

pub fn apply(ch: &Channel, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    if rho.nrows() != ch.dim || rho.ncols() != ch.dim {
        return Err(ChannelError::DimensionMismatch {
            expected: ch.dim,
            got: rho.nrows(),
        });
    }
    Ok(unvectorize(&(&ch.transfer * vectorize(rho)), ch.dim))
}

pub fn compose(t1: &Channel, t2: &Channel) -> Result<Channel> {
    same_dim(t1.dim, t2.dim)?;
    build_channel_with(
        Representation::Transfer(TransferMatrix {
            dim: t1.dim,
            basis: Basis::MatrixUnits,
            mat: &t1.transfer * &t2.transfer,
        }),
        t1.tolerances,
    )
}

pub fn dual(ch: &Channel) -> LinearMap {
    ch.as_map().dual()
}

/// Real determinant of a transfer matrix whose determinant is known to be real.
pub fn real_determinant(t: &ComplexMatrix) -> Result<f64> {
    let det = t.clone().lu().determinant();
    if !(det.re.is_finite() && det.im.is_finite()) {
        return Err(ChannelError::NonFinite);
    }
    if det.im.abs() >= 1e-8 * det.norm().max(1.0) {
        return Err(ChannelError::NumericalFailure(format!(
            "determinant has imaginary part {:.3e}",
            det.im
        )));
    }
    Ok(det.re)
}

pub fn determinant(ch: &Channel) -> Result<f64> {
    real_determinant(&ch.transfer)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureReport {
    pub dimension: usize,
    pub is_hermiticity_preserving: bool,
    pub is_trace_preserving: bool,
    pub is_unital: bool,
    pub is_completely_positive: bool,
    pub kraus_rank: usize,
    pub choi_eigenvalues: Vec<f64>,
    pub det: f64,
    pub purity: f64,
}

pub fn validate(ch: &Channel) -> Result<StructureReport> {
    let tol = &ch.tolerances;
    let eigs = ch.choi_eigenvalues();
    if eigs.iter().any(|v| !v.is_finite()) {
        return Err(ChannelError::NumericalFailure("Choi eigen-solve failed".into()));
    }
    let map = ch.as_map();
    Ok(StructureReport {
        dimension: ch.dim,
        is_hermiticity_preserving: hermiticity_residual(&ch.choi.tau) <= tol.herm_tol,
        is_trace_preserving: map.is_trace_preserving(tol.tp_tol),
        is_unital: map.is_unital(tol.tp_tol),
        is_completely_positive: ch.is_cp(),
        kraus_rank: kraus_rank_of(&eigs, tol.rank_rel_tol),
        det: determinant(ch)?,
        purity: purity(ch),
        choi_eigenvalues: eigs,
    })
}

/// `tr[τ²]`.
pub fn purity(ch: &Channel) -> f64 {
    (&ch.choi.tau * &ch.choi.tau).trace().re
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PurityBounds {
    pub purity: f64,
    /// Largest eigenvalue of the Choi state.
    pub mu: f64,
    /// `⟨Ω₀|τ₀|Ω₀⟩` for the Choi state of `T·U₀`.
    pub overlap: f64,
    pub det: f64,
    pub det_bound_ok: bool,
    pub mu3_bound_ok: bool,
}

pub fn purity_and_bounds(ch: &Channel) -> Result<PurityBounds> {
    let d = ch.dim as f64;
    let p = purity(ch);
    let det = determinant(ch)?;
    let mu = *ch.choi_eigenvalues().last().expect("nonempty spectrum");
    let (_, objective) = crate::markov::optimal_unitary(ch)?;
    let overlap = objective / (d * d);
    Ok(PurityBounds {
        purity: p,
        mu,
        overlap,
        det,
        det_bound_ok: det <= p.powf(d * d / 2.0) + 1e-10,
        mu3_bound_ok: overlap >= mu.powi(3) - 1e-10,
    })
}

/// Largest singular value of `T̂₁ − T̂₂`.
pub fn distance(t1: &Channel, t2: &Channel) -> Result<f64> {
    same_dim(t1.dim, t2.dim)?;
    Ok(op_norm(&(&t1.transfer - &t2.transfer)))
}

/// `ρ ↦ (ρ^{T_c} + 𝟙 tr ρ)/(1 + d)` where `T_c` swaps the corner entries
/// `(0, d-1)` and `(d-1, 0)`.
pub fn minimal_determinant_channel(d: usize) -> Result<Channel> {
    check_dim(d)?;
    let n = d * d;
    let mut t = identity(n);
    let p = d - 1;
    let q = (d - 1) * d;
    t[(p, p)] = c(0.0, 0.0);
    t[(q, q)] = c(0.0, 0.0);
    t[(p, q)] = ONE;
    t[(q, p)] = ONE;
    let id = vectorize(&identity(d));
    let t = (t + &id * id.transpose()).unscale((1 + d) as f64);
    Channel::from_transfer(t)
}

/// `ρ ↦ ρᵀ`: positive and trace preserving but not completely positive.
pub fn transposition_channel(d: usize) -> Result<Channel> {
    check_dim(d)?;
    let n = d * d;
    let t = ComplexMatrix::from_fn(n, n, |r, col| {
        let (i, j) = (r / d, r % d);
        if col == j * d + i {
            ONE
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Channel::from_transfer(t)
}

/// Splits a trace-preserving product `t1·t2` of CP maps into two
/// trace-preserving factors with the same Kraus ranks.
pub fn rebalance_to_tp(t1: &LinearMap, t2: &LinearMap) -> Result<(Channel, Channel)> {
    same_dim(t1.dim, t2.dim)?;
    let d = t1.dim;
    let tol = Tolerances::default();
    let product = t1.compose(t2)?;
    let residual = product.tp_residual();
    if residual > tol.tp_tol * 10.0 {
        return Err(ChannelError::NotTracePreserving { residual });
    }
    let q = hermitian_part(&t1.dual_of_identity());
    let det = q.clone().lu().determinant().re;
    let scale = max_abs(&q).max(f64::MIN_POSITIVE).powi(d as i32);
    if det.abs() <= tol.psd_tol * scale {
        return Err(ChannelError::SingularNormalization { det });
    }
    let p = psd_sqrt(&q);
    let p_inv = inverse(&p).map_err(|_| ChannelError::SingularNormalization { det })?;
    let first = &t1.transfer * conjugation_transfer(&p_inv);
    let second = conjugation_transfer(&p) * &t2.transfer;
    Ok((Channel::from_transfer(first)?, Channel::from_transfer(second)?))
}

/// Partial trace of `d·τ` over the output factor, equal to `T*(𝟙)ᵀ`.
pub fn input_marginal(ch: &Channel) -> ComplexMatrix {
    partial_trace_first(&ch.choi.tau, ch.dim).scale(ch.dim as f64)
}

/// Partial trace of `d·τ` over the input factor, equal to `T(𝟙)`.
pub fn output_marginal(ch: &Channel) -> ComplexMatrix {
    partial_trace_second(&ch.choi.tau, ch.dim).scale(ch.dim as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag_real, hermitian_eigenvalues, ket, outer, pauli_x, I, ZERO};

    fn example1_kraus() -> Vec<ComplexMatrix> {
        // Eigenvectors of the three Pauli matrices.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let xis = [
            ket(&[ONE, ZERO]),
            ket(&[ZERO, ONE]),
            ket(&[c(s, 0.0), c(s, 0.0)]),
            ket(&[c(s, 0.0), c(-s, 0.0)]),
            ket(&[c(s, 0.0), c(0.0, s)]),
            ket(&[c(s, 0.0), c(0.0, -s)]),
        ];
        xis.iter()
            .map(|xi| outer(&xi.conjugate(), xi).unscale(3f64.sqrt()))
            .collect()
    }

    #[test]
    fn identity_choi_is_maximally_entangled() {
        let ch = Channel::identity(2).unwrap();
        let omega = ComplexMatrix::from_fn(4, 4, |r, col| {
            if r % 3 == 0 && col % 3 == 0 {
                c(0.5, 0.0)
            } else {
                ZERO
            }
        });
        assert!(max_abs_diff(ch.tau(), &omega) < 1e-15);
    }

    #[test]
    fn example1_kraus_matches_transfer_form() {
        let from_kraus = Channel::from_kraus(example1_kraus()).unwrap();
        let reference = minimal_determinant_channel(2).unwrap();
        assert!(max_abs_diff(from_kraus.tau(), reference.tau()) < 1e-14);
    }

    #[test]
    fn example1_gellmann_transfer() {
        let ch = minimal_determinant_channel(2).unwrap();
        let t = ch.transfer_in(Basis::GellMann);
        let expected = diag_real(&[1.0, 1.0 / 3.0, -1.0 / 3.0, 1.0 / 3.0]);
        assert!(max_abs_diff(&t, &expected) < 1e-14);
    }

    #[test]
    fn completely_depolarizing_apply() {
        let ch = Channel::completely_depolarizing(2).unwrap();
        let rho = ComplexMatrix::from_row_slice(2, 2, &[c(0.3, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.7, 0.0)]);
        let out = ch.apply(&rho).unwrap();
        assert!(max_abs_diff(&out, &identity(2).scale(0.5)) < 1e-15);
    }

    #[test]
    fn example1_apply_on_ground_state() {
        let ch = minimal_determinant_channel(2).unwrap();
        let rho = diag_real(&[1.0, 0.0]);
        let out = ch.apply(&rho).unwrap();
        // (ρᵀ + 𝟙)/3 evaluated by hand
        assert!(max_abs_diff(&out, &diag_real(&[2.0 / 3.0, 1.0 / 3.0])) < 1e-15);
    }

    #[test]
    fn identity_validates() {
        let r = validate(&Channel::identity(2).unwrap()).unwrap();
        assert!(r.is_completely_positive && r.is_unital && r.is_trace_preserving);
        assert_eq!(r.kraus_rank, 1);
        assert!((r.det - 1.0).abs() < 1e-14);
        assert!((r.purity - 1.0).abs() < 1e-14);
    }

    #[test]
    fn minimal_determinant_values() {
        for d in 2..=4usize {
            let ch = minimal_determinant_channel(d).unwrap();
            let r = validate(&ch).unwrap();
            let expected = -((d + 1) as f64).powi(1 - (d * d) as i32);
            assert!(((r.det - expected) / expected).abs() < 1e-9);
            assert!(r.is_completely_positive);
            assert_eq!(r.kraus_rank, d * d - 1);
        }
    }

    #[test]
    fn minimal_determinant_qubit_choi_is_symmetric_projector() {
        let ch = minimal_determinant_channel(2).unwrap();
        let swap = ComplexMatrix::from_fn(4, 4, |r, col| {
            if col == (r % 2) * 2 + r / 2 {
                ONE
            } else {
                ZERO
            }
        });
        let sym = (identity(4) + swap).scale(0.5);
        assert!(max_abs_diff(ch.tau(), &sym.unscale(3.0)) < 1e-15);
    }

    #[test]
    fn transposition_parity_and_spectrum() {
        for (d, sign) in [(2, -1.0), (3, -1.0), (4, 1.0), (5, 1.0)] {
            let det = determinant(&transposition_channel(d).unwrap()).unwrap();
            assert!((det - sign).abs() < 1e-10);
        }
        let t = transposition_channel(2).unwrap();
        let ev: Vec<f64> = hermitian_eigenvalues(&t.tau().scale(2.0));
        let expected = [-1.0, 1.0, 1.0, 1.0];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a / 2.0 - b / 2.0).abs() < 1e-14);
        }
        assert!(!t.is_cp());
        assert!(matches!(t.kraus(), Err(ChannelError::NegativeChoi { .. })));
        let gm = t.transfer_in(Basis::GellMann);
        assert!(max_abs_diff(&gm, &diag_real(&[1.0, 1.0, -1.0, 1.0])) < 1e-15);
    }

    #[test]
    fn unital_qubit_choi_spectrum() {
        let ch = Channel::from_transfer_in(diag_real(&[1.0, 0.8, 0.7, 0.5]), Basis::GellMann).unwrap();
        let r = validate(&ch).unwrap();
        assert_eq!(r.kraus_rank, 3);
        let expected = [0.0, 0.1, 0.15, 0.75];
        for (a, b) in r.choi_eigenvalues.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn dual_of_unitary_is_inverse_conjugation() {
        let v = ComplexMatrix::from_row_slice(2, 2, &[c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.8), c(0.6, 0.0)]);
        let d = dual(&Channel::unitary(&v).unwrap());
        let expected = conjugation_transfer(&v.adjoint());
        assert!(max_abs_diff(&d.transfer, &expected) < 1e-15);
        assert!(d.is_unital(1e-12));
    }

    #[test]
    fn depolarizing_distance() {
        let a = Channel::identity(2).unwrap();
        let b = Channel::completely_depolarizing(2).unwrap();
        assert!((distance(&a, &b).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(distance(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn rebalance_filter_pair() {
        let a = diag_real(&[2.0, 1.0]).unscale(5f64.sqrt());
        let a_inv = inverse(&a).unwrap();
        let (t1, t2) = rebalance_to_tp(
            &LinearMap::conjugation(&a).unwrap(),
            &LinearMap::conjugation(&a_inv).unwrap(),
        )
        .unwrap();
        assert_eq!(t1.kraus_rank(), 1);
        assert_eq!(t2.kraus_rank(), 1);
        let prod = compose(&t1, &t2).unwrap();
        assert!(distance(&prod, &Channel::identity(2).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn rebalance_rejects_singular_normalization() {
        let proj = diag_real(&[1.0, 0.0]);
        let t1 = LinearMap::conjugation(&proj).unwrap();
        let t2 = LinearMap::from_kraus(&[identity(2)]).unwrap();
        assert!(rebalance_to_tp(&t1, &t2).is_err());
    }

    #[test]
    fn non_tp_input_rejected() {
        let k = vec![pauli_x().scale(0.5)];
        assert!(matches!(
            Channel::from_kraus(k),
            Err(ChannelError::NotTracePreserving { .. })
        ));
        let mut t = identity(4);
        t[(1, 2)] = I;
        assert!(Channel::from_transfer(t).is_err());
    }

    #[test]
    fn kraus_round_trip_phase_convention() {
        let ch = minimal_determinant_channel(2).unwrap();
        let k = ch.kraus().unwrap();
        assert_eq!(k.operators.len(), 3);
        for op in &k.operators {
            let best = op.iter().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap();
            assert!(best.im.abs() < 1e-12 && best.re > 0.0);
        }
        let rebuilt = Channel::from_kraus(k.operators.clone()).unwrap();
        assert!(max_abs_diff(rebuilt.tau(), ch.tau()) < 1e-12);
    }
}
