//! Lindblad generators, semigroup exponentials and Markovian approximations.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::basis;
use crate::channel::{compose, distance, Channel, LinearMap, Tolerances};
use crate::error::{ChannelError, Result};
use crate::linalg::{
    c, expm, hermitian_eigen, hermitian_eigenvalues, hermitian_part, hermiticity_residual,
    identity, kron, max_abs, max_abs_diff, op_norm, polar_unitary, reshuffle, vectorize,
    ComplexMatrix, C64, I, ZERO,
};

/// GKS matrix over a list of traceless orthonormal operators.
#[derive(Debug, Clone, PartialEq)]
pub struct GksForm {
    pub basis: Vec<ComplexMatrix>,
    pub g: ComplexMatrix,
}

impl GksForm {
    /// GKS matrix over the traceless part of the clock-and-shift basis.
    pub fn unitary(d: usize, g: ComplexMatrix) -> Result<Self> {
        let basis = basis::traceless_unitary_basis(d);
        if g.nrows() != basis.len() || g.ncols() != basis.len() {
            return Err(ChannelError::DimensionMismatch {
                expected: basis.len(),
                got: g.nrows(),
            });
        }
        Ok(Self { basis, g })
    }

    pub fn trace(&self) -> f64 {
        self.g.trace().re
    }

    pub fn zero(d: usize) -> Self {
        let n = d * d - 1;
        Self {
            basis: basis::traceless_unitary_basis(d),
            g: ComplexMatrix::zeros(n, n),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Dissipator {
    Gks(GksForm),
    LindbladOps(Vec<ComplexMatrix>),
}

/// `L(ρ) = i[ρ, H] + D(ρ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladGenerator {
    pub dim: usize,
    pub hamiltonian: ComplexMatrix,
    pub dissipator: Dissipator,
}

fn anticommutator_part(k: &ComplexMatrix, d: usize) -> ComplexMatrix {
    let id = identity(d);
    (kron(k, &id) + kron(&id, &k.transpose())).scale(0.5)
}

fn hamiltonian_transfer(h: &ComplexMatrix) -> ComplexMatrix {
    let id = identity(h.nrows());
    (kron(&id, &h.transpose()) - kron(h, &id)) * I
}

impl LindbladGenerator {
    pub fn zero(d: usize) -> Self {
        Self {
            dim: d,
            hamiltonian: ComplexMatrix::zeros(d, d),
            dissipator: Dissipator::LindbladOps(Vec::new()),
        }
    }

    /// Matrix-units transfer matrix `L̂`.
    pub fn transfer(&self) -> ComplexMatrix {
        let d = self.dim;
        let mut l = hamiltonian_transfer(&self.hamiltonian);
        match &self.dissipator {
            Dissipator::LindbladOps(ops) => {
                for a in ops {
                    let k = a.adjoint() * a;
                    l += kron(a, &a.conjugate()) - anticommutator_part(&k, d);
                }
            }
            Dissipator::Gks(form) => {
                for (al, fa) in form.basis.iter().enumerate() {
                    for (be, fb) in form.basis.iter().enumerate() {
                        let gab = form.g[(al, be)];
                        if gab == ZERO {
                            continue;
                        }
                        let k = fb.adjoint() * fa;
                        l += (kron(fa, &fb.conjugate()) - anticommutator_part(&k, d)) * gab;
                    }
                }
            }
        }
        l
    }

    /// Builds a generator from its transfer matrix via the GKS projection,
    /// without requiring the result to be valid.
    pub fn from_transfer(l: &ComplexMatrix) -> Result<Self> {
        let d = (l.nrows() as f64).sqrt().round() as usize;
        let (h, g) = project(l, d)?;
        Ok(Self {
            dim: d,
            hamiltonian: h,
            dissipator: Dissipator::Gks(g),
        })
    }

    pub fn scaled(&self, s: f64) -> Self {
        let dissipator = match &self.dissipator {
            Dissipator::LindbladOps(ops) => {
                Dissipator::LindbladOps(ops.iter().map(|a| a.scale(s.sqrt())).collect())
            }
            Dissipator::Gks(f) => Dissipator::Gks(GksForm {
                basis: f.basis.clone(),
                g: f.g.scale(s),
            }),
        };
        Self {
            dim: self.dim,
            hamiltonian: self.hamiltonian.scale(s),
            dissipator,
        }
    }
}

pub fn make_generator(h: ComplexMatrix, dissipator: Dissipator) -> Result<LindbladGenerator> {
    let tol = Tolerances::default();
    let d = h.nrows();
    if h.ncols() != d {
        return Err(ChannelError::DimensionMismatch {
            expected: d,
            got: h.ncols(),
        });
    }
    if d < 2 {
        return Err(ChannelError::DegenerateDimension(d));
    }
    let herm = hermiticity_residual(&h);
    if herm > tol.herm_tol {
        return Err(ChannelError::NotHermitian { residual: herm });
    }
    match &dissipator {
        Dissipator::LindbladOps(ops) => {
            for a in ops {
                if a.nrows() != d || a.ncols() != d {
                    return Err(ChannelError::DimensionMismatch {
                        expected: d,
                        got: a.nrows(),
                    });
                }
            }
        }
        Dissipator::Gks(form) => {
            let n = form.basis.len();
            if form.g.nrows() != n || form.g.ncols() != n {
                return Err(ChannelError::DimensionMismatch {
                    expected: n,
                    got: form.g.nrows(),
                });
            }
            for (i, f) in form.basis.iter().enumerate() {
                if f.trace().norm() > 1e-12 {
                    return Err(ChannelError::InvalidGenerator("basis element not traceless".into()));
                }
                for (j, e) in form.basis.iter().enumerate() {
                    let ip = (f.adjoint() * e).trace();
                    let expected = if i == j { 1.0 } else { 0.0 };
                    if (ip - c(expected, 0.0)).norm() > 1e-12 {
                        return Err(ChannelError::InvalidGenerator("basis not orthonormal".into()));
                    }
                }
            }
            let herm = hermiticity_residual(&form.g);
            if herm > tol.herm_tol {
                return Err(ChannelError::NotHermitian { residual: herm });
            }
            let eig = hermitian_eigenvalues(&form.g);
            let scale = eig.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            if eig.first().is_some_and(|&m| m < -tol.psd_tol * scale) {
                return Err(ChannelError::NotPsd {
                    min_eigenvalue: eig[0],
                });
            }
        }
    }
    Ok(LindbladGenerator {
        dim: d,
        hamiltonian: h,
        dissipator,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorReport {
    pub trace_preserving: bool,
    pub hermiticity_preserving: bool,
    pub conditionally_cp: bool,
    pub tp_residual: f64,
    pub hermiticity_residual: f64,
    /// Smallest eigenvalue of the projected generator Choi matrix.
    pub worst_eigenvalue: f64,
}

impl GeneratorReport {
    pub fn is_valid(&self) -> bool {
        self.trace_preserving && self.hermiticity_preserving && self.conditionally_cp
    }
}

/// Structural checks on a generator given by its transfer matrix.
pub fn validate_transfer(l: &ComplexMatrix, d: usize) -> GeneratorReport {
    let tol = Tolerances::default();
    let id = vectorize(&identity(d));
    let tp_residual = (l.adjoint() * &id).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let choi = reshuffle(l, d);
    let herm = hermiticity_residual(&choi);
    let omega = (&id * id.adjoint()).unscale(d as f64);
    let p = identity(d * d) - omega;
    let projected = &p * hermitian_part(&choi) * &p;
    let worst = hermitian_eigenvalues(&projected)[0];
    let scale = op_norm(l).max(1.0);
    GeneratorReport {
        trace_preserving: tp_residual <= tol.tp_tol * scale,
        hermiticity_preserving: herm <= tol.herm_tol * scale,
        conditionally_cp: worst >= -tol.psd_tol * scale,
        tp_residual,
        hermiticity_residual: herm,
        worst_eigenvalue: worst,
    }
}

pub fn validate_generator(l: &LindbladGenerator) -> GeneratorReport {
    validate_transfer(&l.transfer(), l.dim)
}

/// Channel with transfer matrix `exp(t·L̂)`.
pub fn exp_generator(l: &LindbladGenerator, t: f64) -> Result<Channel> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(ChannelError::OutOfRange { name: "t", value: t });
    }
    let lt = l.transfer();
    let report = validate_transfer(&lt, l.dim);
    if !report.is_valid() {
        return Err(ChannelError::InvalidGenerator(format!(
            "tp residual {:.3e}, worst projected eigenvalue {:.3e}",
            report.tp_residual, report.worst_eigenvalue
        )));
    }
    exp_transfer(&lt, t)
}

fn exp_transfer(l: &ComplexMatrix, t: f64) -> Result<Channel> {
    Channel::from_transfer(expm(&l.scale(t))?)
}

/// `(H, G)` with `H` traceless and `G` over the traceless unitary basis.
fn project(l: &ComplexMatrix, d: usize) -> Result<(ComplexMatrix, GksForm)> {
    let elems = basis::elements(basis::Basis::UnitaryBasis, d);
    let choi = reshuffle(l, d);
    let vecs: Vec<_> = elems.iter().map(vectorize).collect();
    let n = d * d;
    let coeff = ComplexMatrix::from_fn(n, n, |a, b| (vecs[a].adjoint() * &choi * &vecs[b])[(0, 0)]);
    let g = coeff.view((1, 1), (n - 1, n - 1)).into_owned();
    let sd = (d as f64).sqrt();
    let mut kappa = identity(d).scale(coeff[(0, 0)].re / (2.0 * d as f64));
    for a in 1..n {
        kappa += elems[a].scale(1.0 / sd) * coeff[(a, 0)];
    }
    let mut h = (&kappa - kappa.adjoint()) * c(0.0, 0.5);
    let tr = h.trace() / C64::new(d as f64, 0.0);
    for i in 0..d {
        h[(i, i)] -= tr;
    }
    let h = hermitian_part(&h);
    let form = GksForm {
        basis: elems.into_iter().skip(1).collect(),
        g,
    };
    Ok((h, form))
}

/// Unique Hamiltonian and GKS parts of a generator.
pub fn gks_projection(l: &LindbladGenerator) -> Result<(ComplexMatrix, GksForm)> {
    let lt = l.transfer();
    let (h, g) = project(&lt, l.dim)?;
    let rebuilt = LindbladGenerator {
        dim: l.dim,
        hamiltonian: h.clone(),
        dissipator: Dissipator::Gks(g.clone()),
    }
    .transfer();
    let err = max_abs_diff(&rebuilt, &lt);
    if err > 1e-9 * max_abs(&lt).max(1.0) {
        return Err(ChannelError::InvalidGenerator(format!(
            "standard form does not reproduce the generator (error {err:.3e})"
        )));
    }
    Ok((h, g))
}

/// `exp(-d·t·tr G)`.
pub fn det_from_gks(g: &GksForm, t: f64) -> f64 {
    let d = (g.basis.len() + 1) as f64;
    let d = d.sqrt().round();
    (-d * t * g.trace()).exp()
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalUnitary {
    /// `V` such that `T∘(V·V†)` has no Hamiltonian part.
    pub u0: ComplexMatrix,
    /// `Σ_α |tr K_α V|²`.
    pub objective: f64,
    pub iterations: usize,
    /// Objective after each iteration, starting with the initial point.
    pub history: Vec<f64>,
}

fn objective(kraus: &[ComplexMatrix], v: &ComplexMatrix) -> f64 {
    kraus.iter().map(|k| (k * v).trace().norm_sqr()).sum()
}

fn weighted_sum(kraus: &[ComplexMatrix], v: &ComplexMatrix) -> ComplexMatrix {
    let d = v.nrows();
    kraus
        .iter()
        .fold(ComplexMatrix::zeros(d, d), |acc, k| acc + k * (k * v).trace().conj())
}

const MAX_POLAR_ITERATIONS: usize = 200;

/// `V e^{iH}` for the Newton step of the objective in the Hermitian
/// coordinates `H = Σ x_k H_k` (traceless Gell-Mann `H_k`), or `None` when
/// the model has no concave direction.
fn newton_candidate(kraus: &[ComplexMatrix], v: &ComplexMatrix) -> Option<ComplexMatrix> {
    use nalgebra::{DMatrix, DVector, SymmetricEigen};
    let d = v.nrows();
    let hs: Vec<ComplexMatrix> = basis::elements(basis::Basis::GellMann, d).into_iter().skip(1).collect();
    let n = hs.len();
    let kv: Vec<ComplexMatrix> = kraus.iter().map(|k| k * v).collect();
    let t: Vec<C64> = kv.iter().map(|m| m.trace()).collect();
    let s: Vec<Vec<C64>> = hs
        .iter()
        .map(|h| kv.iter().map(|m| (m * h).trace()).collect())
        .collect();
    // tr(K V e^{iεH}) = t + iε s − ε²/2 tr(K V H²) + O(ε³)
    let mut g = DVector::<f64>::zeros(n);
    let mut hess = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        g[i] = (0..kv.len()).map(|a| -2.0 * (t[a].conj() * s[i][a]).im).sum();
        for j in i..n {
            let anti = &hs[i] * &hs[j] + &hs[j] * &hs[i];
            let val: f64 = (0..kv.len())
                .map(|a| {
                    let r = (&kv[a] * &anti).trace() * 0.5;
                    2.0 * (s[i][a].conj() * s[j][a]).re - 2.0 * (t[a].conj() * r).re
                })
                .sum();
            hess[(i, j)] = val;
            hess[(j, i)] = val;
        }
    }
    let eig = SymmetricEigen::new(hess);
    let scale = eig.eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if !(scale > 0.0) {
        return None;
    }
    let mut x = DVector::<f64>::zeros(n);
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        if l < -1e-10 * scale {
            let u = eig.eigenvectors.column(k);
            x -= u * (u.dot(&g) / l);
        }
    }
    let rotate = |x: &DVector<f64>| {
        let h = hs
            .iter()
            .zip(x.iter())
            .fold(ComplexMatrix::zeros(d, d), |acc, (hk, &xk)| acc + hk * c(xk, 0.0));
        let (vals, vecs) = hermitian_eigen(&h);
        let phases = ComplexMatrix::from_diagonal(&DVector::from_iterator(
            d,
            vals.iter().map(|&l| C64::from_polar(1.0, l)),
        ));
        v * (&vecs * phases * vecs.adjoint())
    };
    let mut best = rotate(&x);
    let top = eig.eigenvalues.imax();
    if eig.eigenvalues[top] > 1e-10 * scale {
        // Near a saddle: search along the ascent direction of positive curvature.
        let u = eig.eigenvectors.column(top).into_owned();
        let mut f_best = objective(kraus, &best);
        for t in [1e-3, 1e-2, 0.1, 0.5] {
            for sign in [1.0, -1.0] {
                let cand = rotate(&(&x + &u * (sign * t)));
                let f = objective(kraus, &cand);
                if f > f_best {
                    f_best = f;
                    best = cand;
                }
            }
        }
    }
    Some(best)
}

/// Maximizes `Σ_α |tr K_α V|²` over unitaries `V` by alternating polar steps,
/// each followed by a safeguarded Newton refinement.
pub fn optimal_unitary_detailed(ch: &Channel) -> Result<OptimalUnitary> {
    let tol = ch.tolerances().conv_tol;
    let kraus = &ch.kraus()?.operators;
    let d = ch.dim();
    let mut v = identity(d);
    if max_abs(&weighted_sum(kraus, &v)) < 1e-12 {
        // Every Kraus operator is traceless; start from the dominant one.
        v = polar_unitary(&kraus[0]).adjoint();
    }
    let mut f = objective(kraus, &v);
    let mut history = vec![f];
    for it in 1..=MAX_POLAR_ITERATIONS {
        let m = weighted_sum(kraus, &v);
        let mut v_new = polar_unitary(&m).adjoint();
        let mut f_new = objective(kraus, &v_new);
        // The alternation alone converges linearly; a Newton step from the
        // polar point is kept only when it improves on it.
        if let Some(cand) = newton_candidate(kraus, &v_new) {
            let f_cand = objective(kraus, &cand);
            if f_cand > f_new {
                v_new = cand;
                f_new = f_cand;
            }
        }
        if f_new < f - 1e-12 * f.max(1.0) {
            return Err(ChannelError::NumericalFailure(format!(
                "polar iteration decreased the objective from {f} to {f_new}"
            )));
        }
        let step = max_abs_diff(&v_new, &v);
        let change = (f_new - f).abs();
        v = v_new;
        f = f_new;
        history.push(f);
        if change < tol * f.max(1.0) && step < 1e-10 {
            return Ok(OptimalUnitary {
                u0: v,
                objective: f,
                iterations: it,
                history,
            });
        }
    }
    Err(ChannelError::NonConvergence {
        iterations: MAX_POLAR_ITERATIONS,
        last: f,
        residual: history[history.len() - 1] - history[history.len() - 2],
    })
}

pub fn optimal_unitary(ch: &Channel) -> Result<(ComplexMatrix, f64)> {
    optimal_unitary_detailed(ch).map(|r| (r.u0, r.objective))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarkovApproxResult {
    pub u0: ComplexMatrix,
    /// `T − id`.
    pub semigroup_generator: LindbladGenerator,
    /// `T·U₀ − id`, expressed in standard form.
    pub dissipative_generator: LindbladGenerator,
    pub iterations: usize,
    pub objective: f64,
}

impl MarkovApproxResult {
    pub fn hamiltonian_norm(&self) -> f64 {
        op_norm(&self.dissipative_generator.hamiltonian)
    }
}

pub fn markov_approx(ch: &Channel) -> Result<MarkovApproxResult> {
    let d = ch.dim();
    let id = identity(d * d);
    let semigroup = LindbladGenerator::from_transfer(&(ch.transfer() - &id))?;
    let opt = optimal_unitary_detailed(ch)?;
    let rotated = ch.as_map().compose(&LinearMap::conjugation(&opt.u0)?)?;
    let dissipative = LindbladGenerator::from_transfer(&(rotated.transfer - &id))?;
    Ok(MarkovApproxResult {
        u0: opt.u0,
        semigroup_generator: semigroup,
        dissipative_generator: dissipative,
        iterations: opt.iterations,
        objective: opt.objective,
    })
}

/// A time-dependent generator on `[0, duration]`.
#[derive(Clone)]
pub struct GeneratorSchedule {
    pub dim: usize,
    pub duration: f64,
    pub sample: Arc<dyn Fn(f64) -> LindbladGenerator + Send + Sync>,
}

impl fmt::Debug for GeneratorSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneratorSchedule")
            .field("dim", &self.dim)
            .field("duration", &self.duration)
            .finish_non_exhaustive()
    }
}

impl GeneratorSchedule {
    pub fn constant(l: LindbladGenerator, duration: f64) -> Self {
        Self {
            dim: l.dim,
            duration,
            sample: Arc::new(move |_| l.clone()),
        }
    }
}

/// Ordered product of `steps` midpoint factors, later times to the left.
pub fn time_ordered_exp(sched: &GeneratorSchedule, steps: usize) -> Result<Channel> {
    time_ordered_factors(sched, steps).and_then(|fs| {
        let n = sched.dim * sched.dim;
        let t = fs.iter().fold(identity(n), |acc, f| f.transfer() * acc);
        Channel::from_transfer(t)
    })
}

/// The individual factors of [`time_ordered_exp`], earliest first.
pub fn time_ordered_factors(sched: &GeneratorSchedule, steps: usize) -> Result<Vec<Channel>> {
    if steps == 0 {
        return Err(ChannelError::OutOfRange {
            name: "steps",
            value: 0.0,
        });
    }
    let dt = sched.duration / steps as f64;
    (1..=steps)
        .map(|k| {
            let tau = (k as f64 - 0.5) * dt;
            exp_generator(&(sched.sample)(tau), dt)
        })
        .collect()
}

/// Reconstructs an infinitesimal-divisible qubit channel as a product of
/// channels near the identity, returning it with its distance to `ch`.
pub fn markov_product_approx(ch: &Channel, n: usize) -> Result<(Channel, f64)> {
    // Leftmost factor first.
    let factors = crate::qubit::markov_product_factors(ch, n)?;
    let total = factors
        .iter()
        .try_fold(Channel::identity(ch.dim())?, |acc, f| compose(&acc, f))?;
    let err = distance(&total, ch)?;
    Ok((total, err))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::Basis;
    use crate::channel::determinant;
    use crate::linalg::{diag_real, pauli_x, pauli_z, unitarity_residual, ONE};

    fn class1_generator() -> LindbladGenerator {
        let lowering = ComplexMatrix::from_row_slice(2, 2, &[ZERO, c(2f64.sqrt(), 0.0), ZERO, ZERO]);
        make_generator(ComplexMatrix::zeros(2, 2), Dissipator::LindbladOps(vec![lowering])).unwrap()
    }

    fn amplitude_damping(x: f64) -> Channel {
        Channel::from_kraus(vec![
            diag_real(&[1.0, x]),
            ComplexMatrix::from_row_slice(2, 2, &[ZERO, c((1.0 - x * x).sqrt(), 0.0), ZERO, ZERO]),
        ])
        .unwrap()
    }

    #[test]
    fn dephasing_generator_gellmann_transfer() {
        let l = make_generator(ComplexMatrix::zeros(2, 2), Dissipator::LindbladOps(vec![pauli_z()])).unwrap();
        let gm = basis::to_basis(&l.transfer(), Basis::GellMann, 2);
        assert!(max_abs_diff(&gm, &diag_real(&[0.0, -2.0, -2.0, 0.0])) < 1e-14);
    }

    #[test]
    fn class1_semigroup_is_amplitude_damping() {
        let l = class1_generator();
        assert!(validate_generator(&l).is_valid());
        let x: f64 = 0.5;
        let ch = exp_generator(&l, -x.ln()).unwrap();
        assert!(distance(&ch, &amplitude_damping(x)).unwrap() < 1e-10);
        let (h, g) = gks_projection(&l).unwrap();
        assert!(max_abs(&h) < 1e-14);
        // |0⟩⟨1| has unit norm, and the operator carries weight 2
        assert!((g.trace() - 2.0).abs() < 1e-12);
        let det = determinant(&ch).unwrap();
        assert!((det - x.powi(4)).abs() < 1e-12);
        assert!((det_from_gks(&g, -x.ln()) - det).abs() < 1e-12);
    }

    #[test]
    fn zero_generator_exponentiates_to_identity() {
        let ch = exp_generator(&LindbladGenerator::zero(3), 2.0).unwrap();
        assert!(distance(&ch, &Channel::identity(3).unwrap()).unwrap() < 1e-15);
    }

    #[test]
    fn hamiltonian_generator_is_valid_and_projects_back() {
        let l = make_generator(pauli_x(), Dissipator::LindbladOps(vec![])).unwrap();
        assert!(validate_generator(&l).is_valid());
        let (h, g) = gks_projection(&l).unwrap();
        assert!(max_abs_diff(&h, &pauli_x()) < 1e-14);
        assert!(max_abs(&g.g) < 1e-14);
    }

    #[test]
    fn negated_depolarizing_generator_is_invalid() {
        let t = Channel::completely_depolarizing(2).unwrap();
        let l = identity(4) - t.transfer();
        let report = validate_transfer(&l, 2);
        assert!(report.trace_preserving);
        assert!(!report.conditionally_cp);
        let ok = validate_transfer(&(t.transfer() - identity(4)), 2);
        assert!(ok.is_valid());
    }

    #[test]
    fn depolarizing_semigroup_telescopes() {
        let t = Channel::completely_depolarizing(2).unwrap();
        let l = LindbladGenerator::from_transfer(&(t.transfer() - identity(4))).unwrap();
        let s: f64 = 0.7;
        let e = exp_generator(&l, s).unwrap();
        let expected = identity(4).scale((-s).exp()) + t.transfer().scale(1.0 - (-s).exp());
        assert!(max_abs_diff(e.transfer(), &expected) < 1e-14);
    }

    #[test]
    fn optimal_unitary_inverts_unitary_channel() {
        let w = ComplexMatrix::from_row_slice(2, 2, &[c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.8), c(0.6, 0.0)]);
        let r = optimal_unitary_detailed(&Channel::unitary(&w).unwrap()).unwrap();
        assert!((r.objective - 4.0).abs() < 1e-12);
        let prod = &w * &r.u0;
        assert!(max_abs_diff(&prod, &identity(2).scale(prod[(0, 0)].re)) < 1e-10);
        assert!(unitarity_residual(&r.u0) < 1e-12);
        assert!((prod[(0, 0)] - ONE).norm() < 1e-10);
    }

    #[test]
    fn optimal_unitary_of_depolarizing_is_identity() {
        let r = optimal_unitary_detailed(&Channel::depolarizing(2, 0.3).unwrap()).unwrap();
        assert!(max_abs_diff(&r.u0, &identity(2)) < 1e-12);
    }

    #[test]
    fn optimal_unitary_history_is_monotone() {
        let k = vec![
            ComplexMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.6, 0.0), c(0.0, 0.6), c(0.0, 0.0)]),
            ComplexMatrix::from_row_slice(2, 2, &[c(0.8, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.8)]),
        ];
        let ch = Channel::from_kraus(k).unwrap();
        let r = optimal_unitary_detailed(&ch).unwrap();
        assert!(r.history.windows(2).all(|w| w[1] >= w[0] - 1e-14));
    }

    #[test]
    fn constant_schedule_matches_exponential() {
        let l = class1_generator();
        let sched = GeneratorSchedule::constant(l.clone(), 0.8);
        let a = time_ordered_exp(&sched, 7).unwrap();
        let b = exp_generator(&l, 0.8).unwrap();
        assert!(distance(&a, &b).unwrap() < 1e-12);
    }
}
