use geoap::algebra::arith::{is_squarefree, primes_up_to};
use geoap::algebra::units::unit_exponent;
use geoap::algebra::{embed_unit_as_matrix, mat_pow_mod, norm_one_fundamental_unit, Mat, QuadInt, ResidueMat};
use geoap::ap::{build_ap_witness, constant_c, occurs_in_ap, verify_witness, ApWitness};
use geoap::geodesics::{analyze, trace_to_length, PRECISION_BITS};
use geoap::orders::{order_p, DEFAULT_BUDGET};
use geoap::progressions::{
    find_almost_ap, find_k_ap, float, growth_ratio, has_3term_ap, is_eps_almost_ap, AlmostApOutcome, RealMultiset,
};
use geoap::ramsey::{double_transfer, proof_base_values, transfer_ap, CoverSpec, Direction};
use proptest::prelude::*;
use rug::{Float, Integer, Rational};

fn squarefree_ds() -> Vec<i64> {
    (2..=200u64).filter(|&d| is_squarefree(d)).map(|d| d as i64).collect()
}

fn word(letters: &[u8]) -> Mat {
    let gens = [
        Mat::sl2(1, 1, 0, 1).unwrap(),
        Mat::sl2(1, -1, 0, 1).unwrap(),
        Mat::sl2(0, -1, 1, 0).unwrap(),
        Mat::sl2(1, 0, 1, 1).unwrap(),
    ];
    letters.iter().fold(Mat::identity(2), |acc, &l| acc.mul(&gens[l as usize % 4]).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn powers_keep_determinant(letters in prop::collection::vec(0u8..4, 1..=20), j in 0u64..12) {
        let g = word(&letters);
        prop_assert_eq!(g.pow(j).det(), 1);
    }

    #[test]
    fn modular_power_matches_exact(letters in prop::collection::vec(0u8..4, 1..=10), j in 0u64..=50, m in 1u64..=1000) {
        let g = word(&letters);
        // Mat keeps a sign-normalized representative of ±g^j
        let fast = mat_pow_mod(&g, &Integer::from(j), m).unwrap();
        let exact = ResidueMat::reduce(&g.pow(j), m).unwrap();
        let neg: Vec<u64> = exact.entries().iter().map(|&x| (m - x) % m).collect();
        prop_assert!(fast == exact || fast.entries() == neg, "{:?} vs {:?}", fast, exact);
    }

    #[test]
    fn order_is_inverse_invariant(a in 2i64..30, b in 1i64..30, m in 2u64..200) {
        // [[a, b], [c, d]] with ad - bc = 1 built from a Euclid-friendly pair
        prop_assume!(Integer::from(a).gcd(&Integer::from(b)) == 1);
        let (_, s, t) = Integer::from(a).extended_gcd(Integer::from(b), Integer::new());
        let (d, c) = (s.to_i64().unwrap(), -t.to_i64().unwrap());
        let g = Mat::sl2(a, b, c, d).unwrap();
        prop_assume!(g.trace().abs() > 2);
        let p = order_p(&g, m).unwrap();
        prop_assert_eq!(order_p(&g.inverse(), m).unwrap(), p);
        let neg = Mat::sl2(-a, -b, -c, -d).unwrap();
        prop_assert_eq!(order_p(&neg, m).unwrap(), p);
        prop_assert_eq!(g.pow(p).b().clone() % Integer::from(m), 0);
    }

    #[test]
    fn scale_invariance(coords in prop::collection::btree_set(1u64..300, 3..40), c in 0.01f64..100.0) {
        let coords: Vec<u64> = coords.into_iter().collect();
        let s = RealMultiset::multiples(&float(1.0), &coords).unwrap();
        let scaled = s.scaled(&float(c)).unwrap();
        prop_assert_eq!(has_3term_ap(&s, 0.0).unwrap().is_some(), has_3term_ap(&scaled, 0.0).unwrap().is_some());
    }

    #[test]
    fn almost_ap_monotone_in_eps(e_num in 5u64..40, extra in 1u64..40, k in 2u64..=6) {
        let s = log_set(20_000);
        let eps = Rational::from((e_num, 100));
        let wider = Rational::from((e_num + extra, 100));
        let t = Rational::from((1, 20));
        if let AlmostApOutcome::Found(r) = find_almost_ap(&s, &eps, k, &t).unwrap() {
            prop_assert!(is_eps_almost_ap(&r.exact_values, &eps).unwrap().ok);
            let found_wider = matches!(find_almost_ap(&s, &wider, k, &t).unwrap(), AlmostApOutcome::Found(_));
            prop_assert!(found_wider);
        }
    }

    #[test]
    fn transfer_outputs_are_exact(divs in prop::collection::vec(0usize..3, 27), start in 1i64..50, step in 1i64..20) {
        let choices = [1u64, 2, 4];
        let cover_divs: Vec<u64> = divs.iter().map(|&i| choices[i]).collect();
        let values: Vec<Rational> = (0..27).map(|n| Rational::from(start + step * n)).collect();
        for dir in [Direction::Lift, Direction::Project] {
            let cover = CoverSpec::new(4, cover_divs.clone(), dir).unwrap();
            let t = transfer_ap(&values, &cover, 3).unwrap();
            // integral coordinates over the common denominator 4
            let coords: Vec<u64> = t.exact.iter().map(|r| {
                let z = Rational::from(r * 4u32);
                prop_assert_eq!(z.denom().clone(), Integer::from(1));
                Ok(z.numer().to_u64().unwrap())
            }).collect::<Result<_, TestCaseError>>()?;
            let s = RealMultiset::multiples(&float(0.25), &coords).unwrap();
            let hit = find_k_ap(&s, 3, 0.0).unwrap();
            prop_assert!(hit.is_some());
        }
    }

    #[test]
    fn double_transfer_is_affine(seed_up in 0u64..1000, seed_down in 0u64..1000) {
        let up = CoverSpec::new(2, geoap::ramsey::random_divisors(2, 9, seed_up), Direction::Lift).unwrap();
        let down = CoverSpec::new(1, vec![1; 3], Direction::Project).unwrap();
        let values = proof_base_values(1, 1, 2, 9);
        let dt = double_transfer(&values, &up, &down, 3, 1, 1).unwrap();
        prop_assert!(dt.b >= 1);
        for (s, m) in dt.multipliers.iter().enumerate() {
            prop_assert_eq!(m.clone(), Integer::from(&dt.b * (s as u64 + 1)) + &dt.a);
            prop_assert!(*m >= 1);
        }
        let up2 = CoverSpec::new(1, vec![1; 9], Direction::Lift).unwrap();
        let down2 = CoverSpec::new(2, geoap::ramsey::random_divisors(2, 9, seed_down), Direction::Project).unwrap();
        let values = proof_base_values(1, 2, 1, 9);
        let dt = double_transfer(&values, &up2, &down2, 3, 1, 1).unwrap();
        prop_assert!(dt.b >= 1 && dt.multipliers.iter().all(|m| *m >= 1));
    }
}

fn log_set(n: u64) -> RealMultiset {
    RealMultiset::from_values((1..=n).map(|i| Float::with_val(PRECISION_BITS, i).ln()).collect()).unwrap()
}

#[test]
fn unit_exponent_round_trip() {
    for d in squarefree_ds() {
        let mu = norm_one_fundamental_unit(d).unwrap();
        for t in 1..=10 {
            let (e, sign) = unit_exponent(&mu.pow(t), d).unwrap();
            assert_eq!((e, sign), (t, 1), "d = {d}, t = {t}");
        }
    }
}

#[test]
fn embedded_units_have_unit_trace() {
    for d in squarefree_ds() {
        let mu = norm_one_fundamental_unit(d).unwrap();
        let g = embed_unit_as_matrix(d).unwrap();
        let inv = mu.value().unit_inverse().unwrap();
        let sum = mu.value().add(&inv).unwrap();
        assert_eq!(sum.y2(), &0);
        assert_eq!(Integer::from(sum.x2() / 2u32), g.trace(), "d = {d}");
        assert_eq!(g.det(), 1);
    }
}

#[test]
fn cosh_round_trip() {
    let tol = Float::with_val(PRECISION_BITS, 1e-20);
    for m in 3..=200u32 {
        let len = trace_to_length(&Integer::from(m)).unwrap();
        let back = Float::with_val(PRECISION_BITS, &len / 2u32).cosh();
        let err = (back - Float::with_val(PRECISION_BITS, m) / 2u32).abs();
        assert!(err < tol, "m = {m}");
    }
}

#[test]
fn eigenvalues_of_powers() {
    for d in [2i64, 3, 5, 6, 7, 13, 21] {
        let g = embed_unit_as_matrix(d).unwrap();
        let base = analyze(&g).unwrap();
        assert_eq!(base.unit_exp, 1);
        for k in 1..=6u64 {
            let c = analyze(&g.pow(k)).unwrap();
            assert_eq!(c.lambda.value(), base.lambda.pow(k).value(), "d = {d}, k = {k}");
            assert_eq!(c.unit_exp, k);
        }
    }
}

#[test]
fn trace_of_powers_matches_units() {
    for d in [2i64, 5, 11, 19] {
        let g = embed_unit_as_matrix(d).unwrap();
        let lambda = analyze(&g).unwrap().lambda;
        for j in 1..=20u64 {
            let l = lambda.pow(j);
            let sum: QuadInt = l.value().add(&l.value().unit_inverse().unwrap()).unwrap();
            assert_eq!(sum.y2(), &0);
            assert_eq!(Integer::from(sum.x2() / 2u32), g.pow(j).trace(), "d = {d}, j = {j}");
        }
    }
}

#[test]
fn fibonacci_witnesses() {
    let g = Mat::sl2(2, 1, 1, 1).unwrap();
    let disc = |t: &Integer| Integer::from(t.square_ref()) - 4u32;
    for k in 2..=6u64 {
        let w = build_ap_witness(&g, k, DEFAULT_BUDGET).unwrap();
        assert!(w.is_complete() && w.verified, "k = {k}");
        let mult = w.multipliers();
        assert_eq!(mult, (1..=k).map(|r| w.c * r).collect::<Vec<_>>());
        for item in &w.items {
            assert!(item.trace.clone().abs() > 2);
            // same squarefree part of Tr^2 - 4 without factoring
            assert!(Integer::from(disc(&item.trace) * disc(&g.trace())).is_perfect_square());
        }
        let back = ApWitness::from_json(&w.to_json().unwrap()).unwrap();
        assert_eq!(back, w);
        assert_eq!(verify_witness(&back), verify_witness(&w));
        assert!(verify_witness(&back).ok);
    }
}

#[test]
fn occurs_for_pseudorandom_traces() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..20 {
        let m = rng.gen_range(3u64..=40);
        let rec = occurs_in_ap(&Integer::from(m), 3, DEFAULT_BUDGET).unwrap();
        assert_eq!(rec.multipliers.len(), 3);
        let diff = rec.multipliers[1] - rec.multipliers[0];
        assert!(diff > 0 && rec.multipliers[2] - rec.multipliers[1] == diff, "m = {m}");
    }
}

#[test]
fn constant_bounded_by_index_product() {
    let gammas = [(2, 1, 1, 1), (3, 2, 1, 1), (1, 1, 1, 2), (5, 2, 2, 1), (2, 3, 1, 2), (4, 7, 1, 2)];
    for (a, b, c, d) in gammas {
        let g = Mat::sl2(a, b, c, d).unwrap();
        for k in 1..=20u64 {
            let bound: Integer = primes_up_to(k).iter().map(|p| Integer::from(p + 1)).product();
            assert!(Integer::from(constant_c(&g, k).unwrap()) <= bound, "{g}, k = {k}");
        }
    }
}

#[test]
fn almost_ap_grid_rechecks() {
    let traces: Vec<Integer> = (3..=20_000u32).map(Integer::from).collect();
    let s = RealMultiset::from_traces(&traces).unwrap();
    let mut found = 0;
    for eps in ["3/10", "1/10", "3/100"] {
        let eps: Rational = eps.parse().unwrap();
        for k in 2..=10 {
            for t in [Rational::from((1, 2)), Rational::from((1, 10)), Rational::from((1, 40))] {
                if let AlmostApOutcome::Found(r) = find_almost_ap(&s, &eps, k, &t).unwrap() {
                    assert!(is_eps_almost_ap(&r.exact_values, &eps).unwrap().ok);
                    assert_eq!(r.buckets.len() as u64, k);
                    found += 1;
                }
            }
        }
    }
    assert!(found > 0);
}

#[test]
fn growth_ratio_near_limit() {
    let s = log_set(1_000_000);
    let limit = (-1.0f64).exp();
    for x in [10.0, 12.0] {
        let r = growth_ratio(&s, &float(1.0), &float(x)).unwrap().to_f64();
        assert!((r - limit).abs() <= 0.01, "x = {x}: {r}");
    }
}

#[test]
fn double_transfer_with_two_nontrivial_covers() {
    // d_up = d_down = 2: stage 1 needs a monochromatic 9-term progression,
    // which random colorings of 1..2000 contain with overwhelming probability
    for seed in 0..20 {
        let up = CoverSpec::new(2, geoap::ramsey::random_divisors(2, 2000, seed), Direction::Lift).unwrap();
        let down = CoverSpec::new(2, geoap::ramsey::adversarial_divisors(2, 9, 3, seed), Direction::Project).unwrap();
        let values = proof_base_values(1, 2, 2, 2000);
        let dt = double_transfer(&values, &up, &down, 3, 1, 1).unwrap();
        assert!(dt.b >= 1 && dt.multipliers.iter().all(|m| *m >= 1));
    }
}
