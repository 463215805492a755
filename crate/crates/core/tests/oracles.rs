use geoap::algebra::arith::primes_up_to;
use geoap::algebra::{embed_unit_as_matrix, Mat};
use geoap::ap::build_ap_witness;
use geoap::geodesics::primitivity_certificate;
use geoap::orders::{order_p, DEFAULT_BUDGET};
use geoap::ramsey::{mono_ap, Coloring, MonoAp};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Integer;

/// `V_q(t) = Tr(h^q)` and `U_q(t)` with `h^q = U_q h − U_{q−1} I` when `Tr h = t`.
fn chebyshev(t: &Integer, q: u64) -> (Integer, Integer, Integer) {
    let (mut u_prev, mut u) = (Integer::from(0), Integer::from(1));
    for _ in 1..q {
        let next = Integer::from(t * &u) - &u_prev;
        u_prev = std::mem::replace(&mut u, next);
    }
    // V_q = U_{q+1} − U_{q−1} = t U_q − 2 U_{q−1}
    let v = Integer::from(t * &u) - Integer::from(&u_prev * 2u32);
    (v, u, u_prev)
}

/// Searches for an integral `h` with `h^q = ±θ` for some prime `q`.
fn has_integral_root(theta: &Mat) -> bool {
    let tr = theta.trace().abs();
    let e = theta.entries();
    for q in primes_up_to(64) {
        for sign in [1i32, -1] {
            let mut t = Integer::from(3 * sign);
            loop {
                let (v, u, u_prev) = chebyshev(&t, q);
                if v.clone().abs() > tr {
                    break;
                }
                if v.clone().abs() == tr {
                    // h = (±θ + U_{q−1} I) / U_q
                    let s = if v == theta.trace() { 1 } else { -1 };
                    let cand: Vec<Integer> = [0usize, 1, 2, 3]
                        .iter()
                        .map(|&i| {
                            let diag = if i == 0 || i == 3 { u_prev.clone() } else { Integer::new() };
                            Integer::from(&e[i] * s) + diag
                        })
                        .collect();
                    if cand.iter().all(|x| x.is_divisible(&u)) {
                        let h: Vec<Integer> = cand.iter().map(|x| Integer::from(x / &u)).collect();
                        let det = Integer::from(&h[0] * &h[3]) - Integer::from(&h[1] * &h[2]);
                        if det == 1 {
                            return true;
                        }
                    }
                }
                t += sign;
            }
        }
    }
    false
}

#[test]
fn root_search_recognizes_powers() {
    let g = Mat::sl2(2, 1, 1, 1).unwrap();
    assert!(!has_integral_root(&g));
    assert!(has_integral_root(&g.pow(2)));
    assert!(has_integral_root(&g.pow(3)));
    assert!(has_integral_root(&Mat::sl2(7, 4, 12, 7).unwrap().pow(5)));
    assert!(!has_integral_root(&Mat::sl2(3, 2, 4, 3).unwrap()));
}

#[test]
fn certificates_agree_with_root_search() {
    let bound = Integer::from(1_000_000);
    let mut checked = 0;
    for d in [2i64, 3, 5, 6, 7, 10, 11, 13, 14, 15, 21] {
        let g = embed_unit_as_matrix(d).unwrap();
        for k in 2..=3 {
            let w = build_ap_witness(&g, k, DEFAULT_BUDGET).unwrap();
            for item in w.items.iter().filter(|i| i.trace.clone().abs() <= bound) {
                let theta = Mat::new(2, item.theta.clone()).unwrap();
                assert!(primitivity_certificate(&g, &item.modulus, item.exponent).unwrap());
                assert!(!has_integral_root(&theta), "d = {d}, r = {}", item.r);
                checked += 1;
            }
        }
    }
    assert!(checked >= 10, "only {checked} witnesses below the bound");

    // non-minimal exponents: θ is a proper power
    for d in [2i64, 5, 13] {
        let g = embed_unit_as_matrix(d).unwrap();
        for m in [2u64, 3, 4, 5, 6] {
            let j = order_p(&g, m).unwrap();
            for mult in [2u64, 3] {
                let jj = j * mult;
                let theta = g.pow(jj).conjugate_by_diag(&Integer::from(m)).unwrap();
                if theta.trace().abs() > bound {
                    continue;
                }
                assert!(!primitivity_certificate(&g, &Integer::from(m), jj).unwrap());
                assert!(has_integral_root(&theta), "d = {d}, m = {m}, j = {jj}");
            }
        }
    }
}

fn triple_scan(colors: &[u32]) -> Option<MonoAp> {
    let n = colors.len();
    let mut best: Option<MonoAp> = None;
    for i in 0..n {
        for j in i + 1..n {
            for l in j + 1..n {
                if l - j == j - i && colors[i] == colors[j] && colors[j] == colors[l] {
                    let cand = MonoAp { start: i as u64 + 1, diff: (j - i) as u64, color: colors[i] };
                    if best.map_or(true, |b| (cand.start, cand.diff) < (b.start, b.diff)) {
                        best = Some(cand);
                    }
                }
            }
        }
    }
    best
}

#[test]
fn mono_ap_matches_triple_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let d = rng.gen_range(2..=4u32);
        let n = rng.gen_range(1..=40usize);
        let colors: Vec<u32> = (0..n).map(|_| rng.gen_range(0..d)).collect();
        let c = Coloring::new(colors.clone(), d).unwrap();
        assert_eq!(mono_ap(&c, 3), triple_scan(&colors), "{colors:?}");
    }
}

#[test]
fn every_two_coloring_of_nine_has_a_progression() {
    for mask in 0u32..(1 << 9) {
        let colors: Vec<u32> = (0..9).map(|i| (mask >> i) & 1).collect();
        assert!(triple_scan(&colors).is_some(), "{colors:?}");
    }
    let free = [0, 0, 1, 1, 0, 0, 1, 1];
    assert!(triple_scan(&free).is_none());
}
