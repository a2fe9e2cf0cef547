//! Seeded samplers for unitaries, channels and generators, plus the
//! property suites run over them.
//!
//! Every sample `i` of a batch with base seed `s` is drawn from its own
//! ChaCha8 stream seeded with `mix(s, i)`, so batches are reproducible
//! regardless of how rayon schedules them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{determinant, purity_and_bounds, Channel, LinearMap};
use crate::error::{ChannelError, Result};
use crate::linalg::{
    c, expm, hermitian_eigenvalues, hermitian_part, identity, inverse, op_norm, psd_sqrt,
    ComplexMatrix, C64,
};
use crate::markov::{
    det_from_gks, exp_generator, make_generator, markov_approx, optimal_unitary, validate_transfer,
    Dissipator, GksForm, LindbladGenerator,
};
use crate::qubit::{
    classify, rank_two_normal_form, unital_channel, unital_is_cp, unital_semigroup_eigenvalues,
    Divisibility, Infinitesimal,
};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer applied to `base + (index + 1)·φ`.
pub fn mix(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SampleSpec {
    pub dim: usize,
    pub kraus_rank: usize,
    pub seed: u64,
    pub count: usize,
}

impl SampleSpec {
    pub fn check(&self) -> Result<()> {
        if !(2..=5).contains(&self.dim) {
            return Err(ChannelError::WrongDimension(self.dim));
        }
        if self.kraus_rank == 0 || self.kraus_rank > self.dim * self.dim {
            return Err(ChannelError::WrongRank {
                rank: self.kraus_rank,
                max: self.dim * self.dim,
            });
        }
        if self.count == 0 {
            return Err(ChannelError::OutOfRange { name: "count", value: 0.0 });
        }
        Ok(())
    }
}

/// Complex Ginibre matrix with `E|z|² = 1`.
pub fn gaussian_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re * s, im * s)
    })
}

/// Haar isometry `ℂ^cols → ℂ^rows` (`rows ≥ cols`).
pub fn haar_isometry<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    let qr = gaussian_matrix(rows, cols, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..cols {
        let rjj = r[(j, j)];
        let ph = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..rows {
            q[(i, j)] *= ph;
        }
    }
    q
}

pub fn unitary_from_rng<R: Rng>(d: usize, rng: &mut R) -> ComplexMatrix {
    haar_isometry(d, d, rng)
}

pub fn random_unitary(d: usize, seed: u64) -> ComplexMatrix {
    unitary_from_rng(d, &mut rng_from_seed(seed))
}

/// Channel of Kraus rank `r` from a Haar isometry `ℂ^d → ℂ^d ⊗ ℂ^r`.
pub fn channel_from_rng<R: Rng>(d: usize, r: usize, rng: &mut R) -> Result<Channel> {
    let v = haar_isometry(d * r, d, rng);
    let ops = (0..r).map(|k| v.rows(k * d, d).into_owned()).collect();
    Channel::from_kraus(ops)
}

/// The channel for `spec.seed`; `spec.count` is ignored.
pub fn random_channel(spec: &SampleSpec) -> Result<Channel> {
    spec.check()?;
    channel_from_rng(spec.dim, spec.kraus_rank, &mut rng_from_seed(spec.seed))
}

/// `spec.count` channels, sample `i` seeded with `mix(spec.seed, i)`.
pub fn sample_channels(spec: &SampleSpec) -> Result<Vec<Channel>> {
    spec.check()?;
    (0..spec.count)
        .into_par_iter()
        .map(|i| {
            let s = SampleSpec { seed: mix(spec.seed, i as u64), ..*spec };
            random_channel(&s)
        })
        .collect()
}

pub fn generator_from_rng<R: Rng>(d: usize, rng: &mut R) -> Result<LindbladGenerator> {
    let h = gaussian_matrix(d, d, rng);
    let mut h = hermitian_part(&h);
    let shift = h.trace() / c(d as f64, 0.0);
    for i in 0..d {
        h[(i, i)] -= shift;
    }
    let h = h.unscale(d as f64);
    let n = d * d - 1;
    let w = gaussian_matrix(n, n, rng).unscale(n as f64);
    let g = hermitian_part(&(w.adjoint() * &w));
    make_generator(h, Dissipator::Gks(GksForm::unitary(d, g)?))
}

pub fn random_generator(d: usize, seed: u64) -> Result<LindbladGenerator> {
    if d < 2 {
        return Err(ChannelError::WrongDimension(d));
    }
    generator_from_rng(d, &mut rng_from_seed(seed))
}

/// Invertible filter with condition number below `max_cond`.
pub fn filter_from_rng<R: Rng>(d: usize, max_cond: f64, rng: &mut R) -> ComplexMatrix {
    loop {
        let a = gaussian_matrix(d, d, rng);
        let s = crate::linalg::singular_values(&a);
        if s[d - 1] > 0.0 && s[0] / s[d - 1] < max_cond {
            return a.unscale(s[0]);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub seed: u64,
    pub dim: usize,
    pub description: String,
    /// Amount by which the inequality is violated.
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub suite: String,
    pub samples: usize,
    pub violations: Vec<Violation>,
    /// Smallest slack over all checks; negative iff a check failed.
    pub worst_margin: f64,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteSpec {
    pub samples: usize,
    pub seed: u64,
    pub dims: Vec<usize>,
}

impl SuiteSpec {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self {
            samples,
            seed,
            dims: vec![2, 3],
        }
    }
}

pub const SUITES: [&str; 12] = [
    "det_range",
    "det_monotone",
    "det_multiplicative",
    "rank2_nonneg",
    "purity_bound",
    "mu3_bound",
    "lemma1_cp",
    "dissipative_u0",
    "thm5_det",
    "qubit_classifier_consistency",
    "rank2_reconstruction",
    "condid2_semigroup",
];

/// Named inequality with its slack; negative slack is a violation.
type Check = (&'static str, f64);

type SuiteFn = fn(&mut ChaCha8Rng, usize) -> Result<Vec<Check>>;

fn suite_fn(name: &str) -> Result<(SuiteFn, bool)> {
    let f: (SuiteFn, bool) = match name {
        "det_range" => (det_range, false),
        "det_monotone" => (det_monotone, false),
        "det_multiplicative" => (det_multiplicative, false),
        "rank2_nonneg" => (rank2_nonneg, false),
        "purity_bound" => (purity_bound, false),
        "mu3_bound" => (mu3_bound, false),
        "lemma1_cp" => (lemma1_cp, false),
        "dissipative_u0" => (dissipative_u0, false),
        "thm5_det" => (thm5_det, false),
        "qubit_classifier_consistency" => (qubit_classifier_consistency, true),
        "rank2_reconstruction" => (rank2_reconstruction, true),
        "condid2_semigroup" => (condid2_semigroup, true),
        _ => return Err(ChannelError::UnknownSuite(name.to_string())),
    };
    Ok(f)
}

/// Runs one sample of a suite; the seed is the per-sample seed recorded in
/// violation reports.
pub fn replay(name: &str, sample_seed: u64, dim: usize) -> Result<Vec<(String, f64)>> {
    let (f, _) = suite_fn(name)?;
    let checks = f(&mut rng_from_seed(sample_seed), dim)?;
    Ok(checks.into_iter().map(|(n, s)| (n.to_string(), s)).collect())
}

pub fn run_property_suite(name: &str, spec: &SuiteSpec) -> Result<PropertyReport> {
    let (f, qubit_only) = suite_fn(name)?;
    let dims: Vec<usize> = if qubit_only { vec![2] } else { spec.dims.clone() };
    if dims.is_empty() || dims.iter().any(|&d| !(2..=5).contains(&d)) {
        return Err(ChannelError::WrongDimension(dims.first().copied().unwrap_or(0)));
    }
    let mut results: Vec<(usize, u64, usize, Result<Vec<Check>>)> = (0..spec.samples)
        .into_par_iter()
        .map(|i| {
            let seed = mix(spec.seed, i as u64);
            let d = dims[i % dims.len()];
            (i, seed, d, f(&mut rng_from_seed(seed), d))
        })
        .collect();
    results.sort_by_key(|r| r.0);
    let mut violations = Vec::new();
    let mut worst = f64::INFINITY;
    for (_, seed, dim, res) in results {
        match res {
            Ok(checks) => {
                for (what, slack) in checks {
                    worst = worst.min(slack);
                    if !(slack >= 0.0) {
                        violations.push(Violation {
                            seed,
                            dim,
                            description: what.to_string(),
                            magnitude: if slack.is_finite() { -slack } else { f64::MAX },
                        });
                    }
                }
            }
            Err(e) => {
                worst = worst.min(-1.0);
                violations.push(Violation {
                    seed,
                    dim,
                    description: format!("error: {e}"),
                    magnitude: 1.0,
                });
            }
        }
    }
    Ok(PropertyReport {
        suite: name.to_string(),
        samples: spec.samples,
        violations,
        worst_margin: if worst.is_finite() { worst } else { 0.0 },
    })
}

fn any_rank<R: Rng>(d: usize, rng: &mut R) -> Result<Channel> {
    let r = rng.random_range(1..=d * d);
    channel_from_rng(d, r, rng)
}

fn det_range(rng: &mut ChaCha8Rng, d: usize) -> Result<Vec<Check>> {
    let ch = any_rank(d, rng)?;
    let det = determinant(&ch)?;
    Ok(vec![
        ("|det T| <= 1", 1.0 + 1e-10 - det.abs()),
        ("||T|| <= sqrt(d)", (d as f64).sqrt() + 1e-9 - op_norm(ch.transfer())),
    ])
}

fn pair<R: Rng>(d: usize, rng: &mut R) -> Result<(f64, f64, f64)> {
    let t1 = any_rank(d, rng)?;
    let t2 = any_rank(d, rng)?;
    let d12 = determinant(&t1.compose(&t2)?)?;
    Ok((determinant(&t1)?, determinant(&t2)?, d12))
}

fn det_monotone(rng: &mut ChaCha8Rng, d: usize) -> Result<Vec<Check>> {
    let (d1, d2, d12) = pair(d, rng)?;
    Ok(vec![("|det T1T2| <= min |det Ti|", d1.abs().min(d2.abs()) + 1e-10 - d12.abs())])
}

fn det_multiplicative(rng: &mut ChaCha8Rng, d: usize) -> Result<Vec<Check>> {
    let (d1, d2, d12) = pair(d, rng)?;
    let tol = 1e-8 * (d1 * d2).abs().max(1.0);
    Ok(vec![("det T1T2 = det T1 det T2", tol - (d12 - d1 * d2).abs())])
}

fn rank2_nonneg(rng: &mut ChaCha8Rng, d: usize) -> Result<Vec<Check>> {
    let ch = channel_from_rng(d, 2, rng)?;
    Ok(vec![("det >= 0 at Kraus rank 2", determinant(&ch)? + 1e-10)])
}

fn purity_bound(rng: &mut ChaCha8Rng, d: usize) -> Result<Vec<Check>> {
    let ch = any_rank(d, rng)?;
    let b = purity_and_bounds(&ch)?;
    let bound = b.purity.powf((d * d) as f64 / 2.0);
    Ok(vec![("det <= purity^(d^2/2)", bound + 1e-10 - b.det)])
}

fn mu3_bound(rng: &mut ChaCha8Rng, d: usize) -> Result<Vec<Check>> {
    let ch = any_rank(d, rng)?;
    let b = purity_and_bounds(&ch)?;
    Ok(vec![("overlap >= mu^3", b.overlap - b.mu.powi(3) + 1e-10)])
}

fn min_choi_eigenvalue(transfer: ComplexMatrix) -> Result<f64> {
    let map = LinearMap::from_transfer(transfer)?;
    Ok(hermitian_eigenvalues(&hermitian_part(&map.choi()))[0])
}

fn lemma1_cp(rng: &mut ChaCha8Rng, d: usize) -> Result<Vec<Check>> {
    let ch = any_rank(d, rng)?;
    let l = ch.transfer() - identity(d * d);
    let report = validate_transfer(&l, d);
    let mut checks = vec![("T - id is a valid generator", if report.is_valid() { 0.0 } else { -1.0 })];
    for (what, t) in [("exp(0.1 (T - id)) is CP", 0.1), ("exp(T - id) is CP", 1.0), ("exp(10 (T - id)) is CP", 10.0)] {
        checks.push((what, min_choi_eigenvalue(expm(&l.scale(t))?)? + 1e-9));
    }
    Ok(checks)
}

fn dissipative_u0(rng: &mut ChaCha8Rng, d: usize) -> Result<Vec<Check>> {
    let ch = any_rank(d, rng)?;
    let r = markov_approx(&ch)?;
    let (v, _) = optimal_unitary(&ch)?;
    let kraus = &ch.kraus()?.operators;
    let m = kraus
        .iter()
        .fold(ComplexMatrix::zeros(d, d), |acc, k| acc + (k * &v) * (k * &v).trace().conj());
    let min_eig = hermitian_eigenvalues(&hermitian_part(&m))[0];
    Ok(vec![
        ("||H|| of T U0 - id vanishes", 1e-7 - r.hamiltonian_norm()),
        ("M(U0) is positive", min_eig + 1e-7),
    ])
}

fn thm5_det(rng: &mut ChaCha8Rng, d: usize) -> Result<Vec<Check>> {
    let l = generator_from_rng(d, rng)?;
    let Dissipator::Gks(g) = &l.dissipator else {
        unreachable!("sampled generators use the GKS form")
    };
    let expected = det_from_gks(g, 1.0);
    let det = determinant(&exp_generator(&l, 1.0)?)?;
    let pure = make_generator(ComplexMatrix::zeros(d, d), l.dissipator.clone())?;
    Ok(vec![
        ("det exp L = exp(-d tr G)", 1e-8 - (det - expected).abs() / expected),
        ("||L|| <= 2 tr G", 2.0 * g.trace() + 1e-7 - op_norm(&pure.transfer())),
    ])
}

fn verdict(ok: bool) -> f64 {
    if ok {
        0.0
    } else {
        -1.0
    }
}

/// Filter-conjugate `T_A ∘ T ∘ T_B`, renormalized on the input to be trace preserving.
fn filter_conjugate(ch: &Channel, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Channel> {
    let m = LinearMap::conjugation(a)?
        .compose(&ch.as_map())?
        .compose(&LinearMap::conjugation(b)?)?;
    let p = psd_sqrt(&m.dual_of_identity());
    m.compose(&LinearMap::conjugation(&inverse(&p)?)?)?.into_channel()
}

fn qubit_classifier_consistency(rng: &mut ChaCha8Rng, _d: usize) -> Result<Vec<Check>> {
    let ch = any_rank(2, rng)?;
    let base = classify(&ch)?;
    let a = filter_from_rng(2, 10.0, rng);
    let b = filter_from_rng(2, 10.0, rng);
    let filtered = classify(&filter_conjugate(&ch, &a, &b)?)?;
    let (u, w) = (unitary_from_rng(2, rng), unitary_from_rng(2, rng));
    let rotated = classify(&Channel::unitary(&u)?.compose(&ch)?.compose(&Channel::unitary(&w)?)?)?;
    let markovian = classify(&exp_generator(&generator_from_rng(2, rng)?, 1.0)?)?;
    let ev = &base.evidence;
    Ok(vec![
        (
            "filter invariance",
            verdict(filtered.divisibility == base.divisibility && filtered.infinitesimal == base.infinitesimal),
        ),
        (
            "unitary invariance",
            verdict(
                rotated.divisibility == base.divisibility
                    && rotated.infinitesimal == base.infinitesimal
                    && rotated.evidence.normal_form == ev.normal_form,
            ),
        ),
        (
            "full Kraus rank is divisible",
            verdict(ev.kraus_rank != 4 || base.divisibility == Divisibility::Divisible),
        ),
        (
            "Markovian channels are infinitesimal divisible",
            verdict(
                markovian.divisibility != Divisibility::Indivisible
                    && markovian.infinitesimal != Infinitesimal::NotInfinitesimalDivisible,
            ),
        ),
        (
            "indivisible evidence",
            verdict(
                base.divisibility != Divisibility::Indivisible
                    || ev.s_min_sq < ev.det_delta
                    || ev.det <= 0.0,
            ),
        ),
        (
            "infinitesimal divisible implies det >= 0",
            verdict(base.infinitesimal != Infinitesimal::InfinitesimalDivisible || ev.det >= -1e-10),
        ),
    ])
}

fn rank2_reconstruction(rng: &mut ChaCha8Rng, _d: usize) -> Result<Vec<Check>> {
    let ch = channel_from_rng(2, 2, rng)?;
    let (cls, _) = rank_two_normal_form(&ch)?;
    let rebuilt = Channel::unitary(&cls.u1)?
        .compose(&cls.kind.channel()?)?
        .compose(&Channel::unitary(&cls.u2)?)?;
    let (_, err) = crate::markov::markov_product_approx(&ch, 1024)?;
    Ok(vec![
        ("U1 C U2 reconstructs T", 1e-8 - crate::channel::distance(&rebuilt, &ch)?),
        ("time-ordered product reconstructs T", 1e-2 - err),
    ])
}

/// Outcome of the semigroup test for one unital spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Condid2Cell {
    /// `s²_min ≥ det Δ > 0`; carries the smallest Choi eigenvalue of `Δ_t` over `t = k/16`.
    Satisfied { min_eigenvalue: f64 },
    /// `det Δ > s²_min + 1e-3`; carries the smallest Choi eigenvalue over `t = 2^{-k} ≤ 1/16`.
    Violated { min_eigenvalue: f64 },
    /// Within `1e-3` of the boundary, not CP, or with a non-positive entry.
    Skipped,
}

pub fn condid2_cell(lambda: [f64; 3]) -> Result<Condid2Cell> {
    if lambda.iter().any(|&l| l <= 0.0) || !unital_is_cp(lambda, 1e-12) {
        return Ok(Condid2Cell::Skipped);
    }
    let det: f64 = lambda.iter().product();
    let s_min = lambda.iter().fold(f64::INFINITY, |m, l| m.min(l.abs()));
    let s2 = s_min * s_min;
    let min_over = |ts: &mut dyn Iterator<Item = f64>| -> Result<f64> {
        let mut m = f64::INFINITY;
        for t in ts {
            let ev = unital_semigroup_eigenvalues(lambda, t)?;
            m = ev.iter().fold(m, |a, &b| a.min(b));
        }
        Ok(m)
    };
    if s2 >= det {
        let m = min_over(&mut (1..=16).map(|k| k as f64 / 16.0))?;
        Ok(Condid2Cell::Satisfied { min_eigenvalue: m })
    } else if det > s2 + 1e-3 {
        let m = min_over(&mut (4..=20).map(|k| 0.5f64.powi(k)))?;
        Ok(Condid2Cell::Violated { min_eigenvalue: m })
    } else {
        Ok(Condid2Cell::Skipped)
    }
}

fn condid2_semigroup(rng: &mut ChaCha8Rng, _d: usize) -> Result<Vec<Check>> {
    loop {
        let lambda: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.0..=1.0));
        match condid2_cell(lambda)? {
            Condid2Cell::Satisfied { min_eigenvalue } => {
                // sanity: the sampled spectrum is a valid channel
                unital_channel(lambda)?;
                return Ok(vec![("Δ_t CP when s_min² >= det", min_eigenvalue + 1e-12)]);
            }
            Condid2Cell::Violated { min_eigenvalue } => {
                return Ok(vec![("Δ_t not CP for small t when det > s_min²", -min_eigenvalue)]);
            }
            Condid2Cell::Skipped => continue,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, unitarity_residual};
    use crate::markov::validate_generator;

    #[test]
    fn mix_is_splitmix() {
        // reference values of SplitMix64 seeded at 0
        assert_eq!(mix(0, 0), 0xE220_A839_7B1D_CDAF);
        assert_eq!(mix(0, 1), 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn unitaries_are_deterministic_and_unitary() {
        for seed in 0..50 {
            let u = random_unitary(3, seed);
            assert!(unitarity_residual(&u) < 1e-12);
            assert_eq!(u, random_unitary(3, seed));
        }
    }

    #[test]
    fn haar_first_moment() {
        let mean: f64 = (0..1000)
            .map(|s| random_unitary(2, mix(5, s)).trace().norm_sqr())
            .sum::<f64>()
            / 1000.0;
        assert!((mean - 1.0).abs() < 0.1, "mean |tr U|² = {mean}");
    }

    #[test]
    fn channel_rank_is_exact() {
        for r in 1..=4 {
            let ch = random_channel(&SampleSpec { dim: 2, kraus_rank: r, seed: 7, count: 1 }).unwrap();
            assert_eq!(ch.kraus_rank(), r);
        }
        let ch = random_channel(&SampleSpec { dim: 2, kraus_rank: 3, seed: 7, count: 1 }).unwrap();
        assert_eq!(ch.kraus().unwrap().operators.len(), 3);
        let u = random_channel(&SampleSpec { dim: 3, kraus_rank: 1, seed: 2, count: 1 }).unwrap();
        assert!((determinant(&u).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn sampled_channels_are_trace_preserving() {
        let spec = SampleSpec { dim: 3, kraus_rank: 4, seed: 3, count: 20 };
        for ch in sample_channels(&spec).unwrap() {
            assert!(max_abs_diff(&ch.as_map().dual_of_identity(), &identity(3)) < 1e-10);
        }
    }

    #[test]
    fn spec_bounds() {
        let bad = SampleSpec { dim: 2, kraus_rank: 5, seed: 0, count: 1 };
        assert!(matches!(random_channel(&bad), Err(ChannelError::WrongRank { .. })));
        let bad = SampleSpec { dim: 6, kraus_rank: 1, seed: 0, count: 1 };
        assert!(matches!(random_channel(&bad), Err(ChannelError::WrongDimension(6))));
    }

    #[test]
    fn generators_validate() {
        for seed in 0..100 {
            let l = random_generator(2 + (seed as usize % 2), seed).unwrap();
            assert!(validate_generator(&l).is_valid());
        }
    }

    #[test]
    fn unknown_suite() {
        assert_eq!(
            run_property_suite("nope", &SuiteSpec::new(1, 0)).unwrap_err(),
            ChannelError::UnknownSuite("nope".into())
        );
    }

    #[test]
    fn suites_run_clean_on_small_batches() {
        for name in SUITES {
            let r = run_property_suite(name, &SuiteSpec::new(20, 11)).unwrap();
            assert!(r.passed(), "{name}: {:?}", r.violations);
            assert!(r.worst_margin >= 0.0);
        }
    }

    #[test]
    fn reports_are_schedule_independent() {
        let spec = SuiteSpec::new(40, 99);
        let a = run_property_suite("det_multiplicative", &spec).unwrap();
        let b = run_property_suite("det_multiplicative", &spec).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn condid2_cells() {
        assert!(matches!(condid2_cell([0.9, 0.6, 0.6]).unwrap(), Condid2Cell::Satisfied { min_eigenvalue } if min_eigenvalue >= 0.0));
        assert!(matches!(condid2_cell([0.8, 0.7, 0.5]).unwrap(), Condid2Cell::Violated { min_eigenvalue } if min_eigenvalue < 0.0));
    }
}
