use chandiv::channel::{determinant, distance, validate};
use chandiv::json::{channel_to_value, read_channel_json, to_pretty};
use chandiv::markov::{exp_generator, optimal_unitary};
use chandiv::qubit::{classify, unital_channel, unital_choi_eigenvalues, unital_is_cp, Divisibility};
use chandiv::sampling::{channel_from_rng, random_channel, random_generator, rng_from_seed, unitary_from_rng, SampleSpec};
use chandiv::{Basis, Channel, RepresentationKind};
use proptest::prelude::*;

fn channel(d: usize, r: usize, seed: u64) -> Channel {
    channel_from_rng(d, r, &mut rng_from_seed(seed)).unwrap()
}

fn dim_rank() -> impl Strategy<Value = (usize, usize)> {
    (2usize..=3).prop_flat_map(|d| (Just(d), 1..=d * d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn samples_are_valid_channels_of_requested_rank((d, r) in dim_rank(), seed in any::<u64>()) {
        let s = validate(&channel(d, r, seed)).unwrap();
        prop_assert!(s.is_completely_positive && s.is_trace_preserving && s.is_hermiticity_preserving);
        prop_assert_eq!(s.kraus_rank, r);
        prop_assert!(s.det.abs() <= 1.0 + 1e-10);
    }

    #[test]
    fn sampling_is_reproducible((d, r) in dim_rank(), seed in any::<u64>()) {
        let spec = SampleSpec { dim: d, kraus_rank: r, seed, count: 1 };
        let (a, b) = (random_channel(&spec).unwrap(), random_channel(&spec).unwrap());
        prop_assert_eq!(a.tau(), b.tau());
    }

    #[test]
    fn determinant_is_multiplicative((d, r1) in dim_rank(), r2 in 1usize..=4, s1 in any::<u64>(), s2 in any::<u64>()) {
        let (a, b) = (channel(d, r1, s1), channel(d, r2, s2));
        let (da, db) = (determinant(&a).unwrap(), determinant(&b).unwrap());
        let dab = determinant(&a.compose(&b).unwrap()).unwrap();
        prop_assert!((dab - da * db).abs() <= 1e-10);
        prop_assert!(dab.abs() <= da.abs().min(db.abs()) + 1e-12);
    }

    #[test]
    fn unitary_conjugation_preserves_determinant((d, r) in dim_rank(), seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let ch = channel_from_rng(d, r, &mut rng).unwrap();
        let u = Channel::unitary(&unitary_from_rng(d, &mut rng)).unwrap();
        let v = Channel::unitary(&unitary_from_rng(d, &mut rng)).unwrap();
        let conj = u.compose(&ch).unwrap().compose(&v).unwrap();
        prop_assert!((determinant(&conj).unwrap() - determinant(&ch).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn json_roundtrip_is_lossless((d, r) in dim_rank(), seed in any::<u64>(), which in 0usize..4) {
        let ch = channel(d, r, seed);
        let kind = [
            RepresentationKind::Kraus,
            RepresentationKind::Choi,
            RepresentationKind::Transfer(Basis::MatrixUnits),
            RepresentationKind::Transfer(Basis::GellMann),
        ][which];
        let text = to_pretty(&channel_to_value(&ch, kind).unwrap());
        let back = read_channel_json(text.as_bytes()).unwrap();
        prop_assert!(distance(&back, &ch).unwrap() < 1e-13);
    }

    #[test]
    fn unital_cp_closed_form_matches_eigen_solve(l in prop::array::uniform3(-1.0f64..=1.0)) {
        let closed = unital_choi_eigenvalues(l);
        let mut closed_sorted = closed;
        closed_sorted.sort_by(f64::total_cmp);
        let generic = unital_channel(l).unwrap().choi_eigenvalues();
        for (a, b) in closed_sorted.iter().zip(&generic) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        if generic[0].abs() > 1e-9 {
            prop_assert_eq!(unital_is_cp(l, 1e-12), generic[0] > 0.0);
        }
    }

    #[test]
    fn optimal_unitary_dominates_identity((d, r) in dim_rank(), seed in any::<u64>()) {
        let ch = channel(d, r, seed);
        let (_, best) = optimal_unitary(&ch).unwrap();
        let at_identity: f64 = ch.kraus().unwrap().operators.iter().map(|k| k.trace().norm_sqr()).sum();
        prop_assert!(best >= at_identity - 1e-12);
        prop_assert!(best <= (d * d) as f64 + 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn full_rank_qubit_channels_are_divisible(seed in any::<u64>()) {
        prop_assert_eq!(classify(&channel(2, 4, seed)).unwrap().divisibility, Divisibility::Divisible);
    }

    #[test]
    fn semigroup_elements_have_positive_determinant(seed in any::<u64>(), t in 0.05f64..4.0) {
        let ch = exp_generator(&random_generator(2, seed).unwrap(), t).unwrap();
        prop_assert!(determinant(&ch).unwrap() > 0.0);
        prop_assert_ne!(classify(&ch).unwrap().divisibility, Divisibility::Indivisible);
    }

    #[test]
    fn classification_is_unitarily_invariant(seed in any::<u64>(), r in 2usize..=4) {
        let mut rng = rng_from_seed(seed);
        let ch = channel_from_rng(2, r, &mut rng).unwrap();
        let u = Channel::unitary(&unitary_from_rng(2, &mut rng)).unwrap();
        let v = Channel::unitary(&unitary_from_rng(2, &mut rng)).unwrap();
        let a = classify(&ch).unwrap();
        let b = classify(&u.compose(&ch).unwrap().compose(&v).unwrap()).unwrap();
        prop_assert_eq!(a.divisibility, b.divisibility);
        prop_assert_eq!(a.infinitesimal, b.infinitesimal);
        prop_assert_eq!(a.normal_form.form.tag(), b.normal_form.form.tag());
    }
}
