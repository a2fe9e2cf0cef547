//! Normal form of qubit channels under invertible rank-one filters `X ↦ AXA†`.
//!
//! The generic case is found by alternately normalizing both Choi marginals.
//! When that iteration degenerates, the filter-invariant spectrum of
//! `η T̂ᵀ η T̂` decides between the non-diagonal and the singular forms and
//! the filters are assembled from its Jordan structure.

use nalgebra::{Matrix4, Rotation3, Vector3, Vector4};
use serde::Serialize;

use super::{channel_from_pauli, diagonalize_delta, pauli_matrix, pauli_to_matrix_units, su2_from_rotation, PauliTransfer};
use crate::channel::{Channel, LinearMap};
use crate::error::{ChannelError, Result};
use crate::linalg::{
    hermitian_eigen, hermitian_part, identity, kron, partial_trace_first, partial_trace_second,
    pd_inv_sqrt, real_svd, reshuffle, singular_values, ComplexMatrix,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "tag")]
pub enum NormalForm {
    Diagonal { lambda: [f64; 3] },
    NonDiagonal { x: f64 },
    Singular,
}

impl NormalForm {
    pub fn tag(&self) -> &'static str {
        match self {
            NormalForm::Diagonal { .. } => "Diagonal",
            NormalForm::NonDiagonal { .. } => "NonDiagonal",
            NormalForm::Singular => "Singular",
        }
    }

    pub fn pauli(&self) -> Matrix4<f64> {
        match *self {
            NormalForm::Diagonal { lambda } => PauliTransfer::unital(lambda).matrix(),
            NormalForm::NonDiagonal { x } => {
                let s = x / 3f64.sqrt();
                let mut m = Matrix4::from_diagonal(&Vector4::new(1.0, s, s, 1.0 / 3.0));
                m[(3, 0)] = 2.0 / 3.0;
                m
            }
            NormalForm::Singular => {
                let mut m = Matrix4::zeros();
                m[(0, 0)] = 1.0;
                m[(3, 0)] = 1.0;
                m
            }
        }
    }
}

pub fn normal_form_channel(form: &NormalForm) -> Result<Channel> {
    channel_from_pauli(&form.pauli())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalFormDiagnostics {
    /// Rounds of marginal normalization performed.
    pub iterations: usize,
    pub filtering_converged: bool,
    pub cond_a: f64,
    pub cond_b: f64,
    /// Distance between the filtered channel and the representative.
    pub residual: f64,
}

/// `T_A T T_B = normal form`, with `T_A(X) = A X A†`.
#[derive(Debug, Clone, PartialEq)]
pub struct LorentzNormalForm {
    pub form: NormalForm,
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    pub diagnostics: NormalFormDiagnostics,
}

const MAX_ROUNDS: usize = 500;
const MARGINAL_TOL: f64 = 1e-10;
const MAX_COND: f64 = 1e6;
const FORM_TOL: f64 = 1e-6;

fn cond(a: &ComplexMatrix) -> f64 {
    let s = singular_values(a);
    s[0] / s[s.len() - 1]
}

struct Filtering {
    a: ComplexMatrix,
    b: ComplexMatrix,
    choi: ComplexMatrix,
    rounds: usize,
    converged: bool,
}

fn filtering_iteration(ch: &Channel) -> Filtering {
    let id = identity(2);
    let mut choi = ch.tau().scale(2.0);
    let mut a = identity(2);
    let mut bt = identity(2);
    let mut rounds = 0;
    let mut converged = false;
    while rounds < MAX_ROUNDS {
        rounds += 1;
        let out = hermitian_part(&partial_trace_second(&choi, 2));
        let Ok(x) = pd_inv_sqrt(&out) else { break };
        let xk = kron(&x, &id);
        choi = hermitian_part(&(&xk * &choi * xk.adjoint()));
        a = &x * &a;
        let inp = hermitian_part(&partial_trace_first(&choi, 2));
        let Ok(y) = pd_inv_sqrt(&inp) else { break };
        let yk = kron(&id, &y);
        choi = hermitian_part(&(&yk * &choi * yk.adjoint()));
        bt = &y * &bt;
        if !(cond(&a) < MAX_COND && cond(&bt) < MAX_COND) {
            break;
        }
        let out = partial_trace_second(&choi, 2);
        if crate::linalg::max_abs_diff(&out, &id) < MARGINAL_TOL {
            converged = true;
            break;
        }
    }
    Filtering {
        a,
        b: bt.transpose(),
        choi,
        rounds,
        converged,
    }
}

fn filtered(ch: &Channel, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<LinearMap> {
    LinearMap::conjugation(a)?
        .compose(&ch.as_map())?
        .compose(&LinearMap::conjugation(b)?)
}

fn pauli_of_map(map: &LinearMap) -> Matrix4<f64> {
    let t = crate::basis::to_basis(&map.transfer, crate::basis::Basis::GellMann, 2);
    Matrix4::from_fn(|i, j| t[(i, j)].re)
}

/// Rescales `a` so that the filtered map is trace preserving, then checks the form.
fn finalize(
    ch: &Channel,
    form: NormalForm,
    mut a: ComplexMatrix,
    b: ComplexMatrix,
    iterations: usize,
    filtering_converged: bool,
) -> Result<LorentzNormalForm> {
    let scale = pauli_of_map(&filtered(ch, &a, &b)?)[(0, 0)];
    if !(scale > 0.0) {
        return Err(ChannelError::NumericalFailure("filtered map has vanishing trace".into()));
    }
    a = a.unscale(scale.sqrt());
    let f = filtered(ch, &a, &b)?;
    let target = normal_form_channel(&form)?;
    let residual = crate::linalg::op_norm(&(&f.transfer - target.transfer()));
    let diagnostics = NormalFormDiagnostics {
        iterations,
        filtering_converged,
        cond_a: cond(&a),
        cond_b: cond(&b),
        residual,
    };
    if residual > FORM_TOL {
        return Err(ChannelError::NonConvergence {
            iterations,
            last: residual,
            residual,
        });
    }
    Ok(LorentzNormalForm {
        form,
        a,
        b,
        diagnostics,
    })
}

pub fn lorentz_normal_form(ch: &Channel) -> Result<LorentzNormalForm> {
    super::require_qubit(ch)?;
    let it = filtering_iteration(ch);
    if it.converged {
        let n0 = Channel::from_choi(it.choi.unscale(2.0))?;
        let pt = super::pauli_transfer(&n0)?;
        if pt.v.norm() < FORM_TOL {
            let dd = diagonalize_delta(&pt)?;
            let a = &dd.u1 * &it.a;
            let b = &it.b * &dd.u2;
            return finalize(ch, NormalForm::Diagonal { lambda: dd.lambda }, a, b, it.rounds, true);
        }
    }
    // Slow filtering near the CP boundary; the diagonal form may still be
    // read off the invariant eigenvectors.
    if let Ok(nf) = eigen_diagonal_form(ch, it.rounds) {
        return Ok(nf);
    }
    invariant_spectrum_form(ch, it.rounds)
}

/// Diagonal form from `η T̂ᵀ η T̂ = Λ_B⁻¹ c² diag(1, λ²) Λ_B`: the timelike
/// eigenvector and the η-orthogonal eigenvectors in its complement give
/// `Λ_B⁻¹`, their images under `T̂` give `c Λ_A diag(1, λ)`.
fn eigen_diagonal_form(ch: &Channel, rounds: usize) -> Result<LorentzNormalForm> {
    let fail = |what: &str| Err(ChannelError::NumericalFailure(what.to_string()));
    let t = pauli_matrix(ch)?;
    let eta = eta();
    let s = t.transpose() * eta * t;
    let m = eta * s;
    let scale = t.norm_squared();
    let mut eig: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.re).collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    let mu0 = eig[0];
    if !(mu0 > 1e-8 * scale) {
        return fail("vanishing invariant spectrum");
    }
    let cluster = eig.iter().filter(|&&e| (e - mu0).abs() <= 1e-8 * mu0).count();
    let null = null_space(&(m - Matrix4::identity() * mu0), cluster);
    // most timelike direction within the top eigenspace
    let q = nalgebra::DMatrix::from_fn(cluster, cluster, |i, j| ip(&null[i], &null[j]));
    let qe = nalgebra::SymmetricEigen::new(q);
    let top = qe.eigenvalues.imax();
    if !(qe.eigenvalues[top] > 1e-6) {
        return fail("no timelike eigenvector");
    }
    let mut e0 = null
        .iter()
        .enumerate()
        .fold(Vector4::zeros(), |acc, (i, v)| acc + v * qe.eigenvectors[(i, top)]);
    e0 /= ip(&e0, &e0).sqrt();
    if e0[0] < 0.0 {
        e0 = -e0;
    }
    let mut comp: Vec<Vector4<f64>> = (0..4)
        .map(|k| {
            let ek = Vector4::ith(k, 1.0);
            ek - e0 * ip(&ek, &e0)
        })
        .collect();
    comp.sort_by(|a, b| (-ip(b, b)).total_cmp(&(-ip(a, a))));
    let frame = spacelike_frame(&comp[..3])?;
    let sub = nalgebra::Matrix3::from_fn(|i, j| -(frame[i].transpose() * s * frame[j])[(0, 0)]);
    let se = nalgebra::SymmetricEigen::new(sub);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| se.eigenvalues[b].total_cmp(&se.eigenvalues[a]));
    let xs: Vec<Vector4<f64>> = order
        .iter()
        .map(|&k| (0..3).fold(Vector4::zeros(), |acc, i| acc + frame[i] * se.eigenvectors[(i, k)]))
        .collect();
    let mut lb = Matrix4::from_columns(&[e0, xs[0], xs[1], xs[2]]);
    if lb.determinant() < 0.0 {
        lb.column_mut(3).neg_mut();
    }
    let c = mu0.sqrt();
    let g0 = t * e0 / c;
    let mut lambda = [0.0; 3];
    let mut cols = vec![g0];
    for k in 0..3 {
        let img = t * lb.column(k + 1);
        let n = (-ip(&img, &img)).max(0.0).sqrt();
        lambda[k] = n / c;
        if lambda[k] > 1e-9 {
            cols.push(img / n);
        }
    }
    if cols.len() < 4 {
        let mut cand: Vec<Vector4<f64>> = (0..4)
            .map(|k| {
                let ek = Vector4::ith(k, 1.0);
                cols.iter().fold(ek, |acc, u| {
                    let sign = if ip(u, u) > 0.0 { 1.0 } else { -1.0 };
                    acc - u * (sign * ip(&ek, u))
                })
            })
            .collect();
        cand.sort_by(|a, b| (-ip(b, b)).total_cmp(&(-ip(a, a))));
        let spacelike: Vec<Vector4<f64>> = cols[1..].iter().copied().chain(cand).collect();
        let frame = spacelike_frame(&spacelike[..3])?;
        cols.truncate(1);
        cols.extend(frame);
    }
    let mut g = Matrix4::from_columns(&[cols[0], cols[1], cols[2], cols[3]]);
    if g.determinant() < 0.0 {
        g.column_mut(3).neg_mut();
        lambda[2] = -lambda[2];
    }
    let la = g
        .try_inverse()
        .ok_or_else(|| ChannelError::NumericalFailure("singular output frame".into()))?;
    let a = filter_from_lorentz(&la)?;
    let b = filter_from_lorentz(&lb)?;
    finalize(ch, NormalForm::Diagonal { lambda }, a, b, rounds, false)
}

fn eta() -> Matrix4<f64> {
    Matrix4::from_diagonal(&Vector4::new(1.0, -1.0, -1.0, -1.0))
}

fn ip(u: &Vector4<f64>, v: &Vector4<f64>) -> f64 {
    u[0] * v[0] - u[1] * v[1] - u[2] * v[2] - u[3] * v[3]
}

fn svd4(m: &Matrix4<f64>) -> (nalgebra::DMatrix<f64>, nalgebra::DMatrix<f64>) {
    let (u, _, v_t) = real_svd(&nalgebra::DMatrix::from_fn(4, 4, |i, j| m[(i, j)]));
    (u, v_t)
}

/// Orthonormal basis (Euclidean) of the column space of a rank-`k` matrix.
fn column_space(m: &Matrix4<f64>, k: usize) -> Vec<Vector4<f64>> {
    let (u, _) = svd4(m);
    (0..k).map(|j| Vector4::from_fn(|i, _| u[(i, j)])).collect()
}

fn null_space(m: &Matrix4<f64>, k: usize) -> Vec<Vector4<f64>> {
    let (_, v_t) = svd4(m);
    (4 - k..4).map(|j| Vector4::from_fn(|i, _| v_t[(j, i)])).collect()
}

/// η-orthonormalizes spacelike vectors.
fn spacelike_frame(ws: &[Vector4<f64>]) -> Result<Vec<Vector4<f64>>> {
    let mut out: Vec<Vector4<f64>> = Vec::new();
    for w in ws {
        let mut v = *w;
        for u in &out {
            v += u * ip(&v, u);
        }
        let n = -ip(&v, &v);
        if !(n > 1e-14) {
            return Err(ChannelError::NumericalFailure("expected a spacelike direction".into()));
        }
        out.push(v / n.sqrt());
    }
    Ok(out)
}

/// Two-by-two filter whose Pauli transfer matrix is proportional to `lambda`.
fn filter_from_lorentz(lambda: &Matrix4<f64>) -> Result<ComplexMatrix> {
    let t = pauli_to_matrix_units(lambda);
    let choi = hermitian_part(&reshuffle(&t, 2));
    let (vals, vecs) = hermitian_eigen(&choi);
    let top = vals[3];
    if !(top > 0.0) || vals[0] < -1e-8 * top || vals[2] > 1e-8 * top {
        return Err(ChannelError::NumericalFailure(
            "Lorentz transformation does not lift to a filter".into(),
        ));
    }
    let s = top.sqrt();
    Ok(ComplexMatrix::from_fn(2, 2, |a, i| vecs[(a * 2 + i, 3)] * s))
}

fn invariant_spectrum_form(ch: &Channel, rounds: usize) -> Result<LorentzNormalForm> {
    let t = pauli_matrix(ch)?;
    let eta = eta();
    let m = eta * t.transpose() * eta * t;
    if m.norm() <= 1e-8 * t.norm_squared() {
        return singular_form(ch, &t, rounds);
    }
    let mut eig: Vec<_> = m.complex_eigenvalues().iter().copied().collect();
    eig.sort_by(|a, b| b.re.total_cmp(&a.re));
    let mu = 0.5 * (eig[0].re + eig[1].re);
    let nu = 0.5 * (eig[2].re + eig[3].re);
    if !(mu > 0.0) || (eig[0] - eig[1]).norm() > 1e-6 * mu.abs().max(eig[0].norm()) {
        return Err(ChannelError::NonConvergence {
            iterations: rounds,
            last: eig[0].re,
            residual: (eig[0] - eig[1]).norm(),
        });
    }
    let mut x = (nu.max(0.0) / mu).sqrt().min(1.0);
    let degenerate = x > 1.0 - 1e-6;
    let mut mu = mu;
    if degenerate {
        x = 1.0;
        // the Jordan pair splits by O(√ε); the trace is unaffected
        mu = m.trace() / 4.0;
    }
    let shifted = m - Matrix4::identity() * mu;

    let (m_null, m_dual, u1, u2) = if degenerate {
        let w = (0..4)
            .map(|k| Vector4::ith(k, 1.0))
            .max_by(|a, b| (shifted * a).norm().total_cmp(&(shifted * b).norm()))
            .unwrap();
        let m_null = null_direction(&shifted, &w, mu)?;
        let m_dual = Vector4::new(m_null[0], -m_null[1], -m_null[2], -m_null[3]) / (m_null[0] * m_null[0]);
        let spatial = Vector3::new(m_null[1], m_null[2], m_null[3]);
        let mut basis = Vec::new();
        for k in 0..3 {
            let e = Vector3::ith(k, 1.0);
            let v = e - spatial * (spatial.dot(&e) / spatial.norm_squared());
            basis.push(Vector4::new(0.0, v[0], v[1], v[2]));
        }
        basis.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
        let frame = spacelike_frame(&basis[..2])?;
        (m_null, m_dual, frame[0], frame[1])
    } else {
        let perp = null_space(&(m - Matrix4::identity() * nu), 2);
        let frame = spacelike_frame(&perp)?;
        let (u1, u2) = (frame[0], frame[1]);
        let proj = Matrix4::identity() + u1 * (eta * u1).transpose() + u2 * (eta * u2).transpose();
        let s = column_space(&proj, 2);
        let w = if (shifted * s[0]).norm() >= (shifted * s[1]).norm() { s[0] } else { s[1] };
        let m_null = null_direction(&shifted, &w, mu)?;
        let beta = 2.0 / ip(&m_null, &w);
        let alpha = -beta * ip(&w, &w) / (2.0 * ip(&m_null, &w));
        let m_dual = m_null * alpha + w * beta;
        (m_null, m_dual, u1, u2)
    };
    let u0 = (m_null + m_dual) / 2.0;
    let u3 = (m_null - m_dual) / 2.0;
    let mut lb = Matrix4::from_columns(&[u0, u1, u2, u3]);
    if lb.determinant() < 0.0 {
        lb.column_mut(2).neg_mut();
    }

    let g3_raw = t * lb.column(3) * 3.0;
    let g0_raw = t * (lb.column(0) - lb.column(3) * 2.0);
    let c2 = ip(&g0_raw, &g0_raw);
    if !(c2 > 0.0) {
        return Err(ChannelError::NumericalFailure("non-timelike image in filter construction".into()));
    }
    let c = c2.sqrt();
    let g0 = g0_raw / c;
    let g3 = g3_raw / c;
    let (g1, g2) = if x > 1e-6 {
        let f = 3f64.sqrt() / (c * x);
        (t * lb.column(1) * f, t * lb.column(2) * f)
    } else {
        let proj = Matrix4::identity() - g0 * (eta * g0).transpose() + g3 * (eta * g3).transpose();
        let frame = spacelike_frame(&column_space(&proj, 2))?;
        (frame[0], frame[1])
    };
    let mut g = Matrix4::from_columns(&[g0, g1, g2, g3]);
    if x <= 1e-6 && g.determinant() < 0.0 {
        g.column_mut(2).neg_mut();
    }
    let la = g
        .try_inverse()
        .ok_or_else(|| ChannelError::NumericalFailure("singular output filter".into()))?;
    let a = filter_from_lorentz(&la)?;
    let b = filter_from_lorentz(&lb)?;
    finalize(ch, NormalForm::NonDiagonal { x }, a, b, rounds, false)
}

/// Future-pointing null vector `m` spanning the range of `M − μ` with
/// `M − μ = (2/3)μ · m mᵀη`.
fn null_direction(shifted: &Matrix4<f64>, w: &Vector4<f64>, mu: f64) -> Result<Vector4<f64>> {
    let m = shifted * w;
    let k2 = (2.0 / 3.0) * mu * ip(&m, w);
    if !(k2 > 0.0) {
        return Err(ChannelError::NumericalFailure("degenerate Jordan structure".into()));
    }
    let mut m = m / k2.sqrt();
    if m[0] < 0.0 {
        m = -m;
    }
    Ok(m)
}

fn singular_form(ch: &Channel, t: &Matrix4<f64>, rounds: usize) -> Result<LorentzNormalForm> {
    let r = Vector3::new(t[(1, 0)], t[(2, 0)], t[(3, 0)]);
    let z = Vector3::z();
    let rot = Rotation3::rotation_between(&r, &z)
        .unwrap_or_else(|| Rotation3::from_axis_angle(&Vector3::x_axis(), std::f64::consts::PI));
    let a = su2_from_rotation(rot.matrix());
    finalize(ch, NormalForm::Singular, a, identity(2), rounds, false)
}
