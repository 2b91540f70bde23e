use kmcalc::adhm::{self, AdhmDatum, QMatrix};
use kmcalc::binf::{BInfinity, CrystalElt, Word};
use kmcalc::crystal::{Crystal, Ext};
use kmcalc::ic_stalks::{self, Partition, QChar};
use kmcalc::RootDatum;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn datum(which: u8) -> RootDatum {
    match which % 4 {
        0 => RootDatum::build_finite('A', 2).unwrap(),
        1 => RootDatum::build_finite('A', 1).unwrap().affinize().unwrap(),
        2 => RootDatum::build_finite('B', 2).unwrap(),
        _ => RootDatum::build_finite('A', 3).unwrap(),
    }
}

/// An element of B(∞) reached from zero by the given raising directions.
fn element(model: &BInfinity<'_>, path: &[usize]) -> CrystalElt {
    let rank = model.datum().rank();
    path.iter().fold(CrystalElt::zero(), |a, &i| model.raise(&a, i % rank))
}

fn path() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..4, 0..9)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn raise_and_lower_are_inverse(which in 0u8..4, p in path(), i in 0usize..4) {
        let d = datum(which);
        let model = BInfinity::standard(&d);
        let i = i % d.rank();
        let a = element(&model, &p);
        let up = model.raise(&a, i);
        prop_assert_eq!(model.lower(&up, i), Some(a.clone()));
        if let Some(down) = model.lower(&a, i) {
            prop_assert_eq!(model.raise(&down, i), a.clone());
        }
        // Weight moves by α_i; φ counts the available lowerings.
        let mut w = model.weight(&a);
        w[i] += 1;
        prop_assert_eq!(model.weight(&up), w);
        let phi = model.phi(&a, i);
        let mut steps = 0;
        let mut cur = a.clone();
        while let Some(next) = model.lower(&cur, i) {
            cur = next;
            steps += 1;
        }
        prop_assert_eq!(phi, Ext::Fin(steps));
    }

    #[test]
    fn weight_is_sum_of_string_letters(which in 0u8..4, p in path()) {
        let d = datum(which);
        let model = BInfinity::standard(&d);
        let a = element(&model, &p);
        let rank = d.rank();
        let mut expected = vec![0i64; rank];
        for &i in &p {
            expected[i % rank] += 1;
        }
        prop_assert_eq!(model.weight(&a), expected);
        prop_assert_eq!(a.height(), p.len() as u64);
    }

    #[test]
    fn restringing_round_trips(which in 0u8..4, p in path()) {
        let d = datum(which);
        let rank = d.rank();
        let model = BInfinity::standard(&d);
        let other = BInfinity::new(&d, Word::periodic((0..rank).rev().collect(), rank).unwrap());
        let a = element(&model, &p);
        let b = model.restring(&a, &other).unwrap();
        prop_assert_eq!(other.weight(&b), model.weight(&a));
        prop_assert_eq!(other.restring(&b, &model).unwrap(), a);
    }

    #[test]
    fn psi_round_trips(which in 0u8..4, p in path(), i in 0usize..4) {
        let d = datum(which);
        let model = BInfinity::standard(&d);
        let i = i % d.rank();
        let a = element(&model, &p);
        let (a_prime, n) = model.psi(&a, i).unwrap();
        prop_assert_eq!(model.star_lower(&a_prime, i).unwrap(), None);
        prop_assert_eq!(i64::from(n), model.phi_star(&a, i).unwrap());
        prop_assert_eq!(model.psi_inverse(&a_prime, n, i).unwrap(), a);
    }

    #[test]
    fn star_and_plain_operators_commute_off_diagonal(which in 0u8..4, p in path(), i in 0usize..4, j in 0usize..4) {
        let d = datum(which);
        let model = BInfinity::standard(&d);
        let (i, j) = (i % d.rank(), j % d.rank());
        prop_assume!(i != j);
        let a = element(&model, &p);
        let x = model.star_raise(&model.raise(&a, i), j).unwrap();
        let y = model.raise(&model.star_raise(&a, j).unwrap(), i);
        prop_assert_eq!(x, y);
    }

    #[test]
    fn kostant_partition_recursion(which in 0u8..4, coeffs in prop::collection::vec(0i64..4, 4)) {
        // P(λ) is the number of multisets of positive roots summing to λ;
        // removing the largest root in a fixed order gives a recursion.
        let d = datum(which);
        let lambda: Vec<i64> = coeffs[..d.rank()].to_vec();
        let h = lambda.iter().sum::<i64>().max(1) as u32;
        let roots: Vec<(Vec<i64>, u32)> =
            d.positive_roots(Some(h)).unwrap().roots.into_iter().map(|r| (r.coeffs, r.multiplicity)).collect();
        let mut parts = Vec::new();
        for (r, m) in &roots {
            for _ in 0..*m {
                parts.push(r.clone());
            }
        }
        fn count(parts: &[Vec<i64>], rest: &[i64]) -> u128 {
            if rest.iter().all(|&x| x == 0) {
                return 1;
            }
            let Some((first, tail)) = parts.split_first() else { return 0 };
            let mut total = count(tail, rest);
            let mut cur = rest.to_vec();
            loop {
                for (c, f) in cur.iter_mut().zip(first) {
                    *c -= f;
                }
                if cur.iter().any(|&x| x < 0) {
                    break;
                }
                total += count(tail, &cur);
            }
            total
        }
        prop_assert_eq!(d.kostant_partition_coeffs(&lambda).unwrap(), count(&parts, &lambda));
    }

    #[test]
    fn sl2_strings_reassemble(dims in prop::collection::vec(0u32..7, 1..6)) {
        let mut c = QChar::new();
        for &m in &dims {
            for (deg, k) in QChar::string(m).terms() {
                c.add_term(deg, k);
            }
        }
        prop_assert!(c.is_symmetric());
        let mut got = ic_stalks::sl2_string_decompose(&c).unwrap();
        let mut want = dims.clone();
        got.sort();
        want.sort();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn partitions_parse_and_measure(parts in prop::collection::btree_map(1u32..6, 1u32..4, 1..4)) {
        let text: Vec<String> = parts.iter().map(|(d, n)| format!("{d}:{n}")).collect();
        let p: Partition = text.join(",").parse().unwrap();
        prop_assert_eq!(p.total(), parts.iter().map(|(d, n)| d * n).sum::<u32>());
        prop_assert_eq!(p.length(), parts.values().sum::<u32>());
        prop_assert_eq!(p.max_part(), *parts.keys().max().unwrap());
    }

    #[test]
    fn stalk_is_product_of_levels(which in 0u8..2, parts in prop::collection::btree_map(1u32..4, 1u32..3, 1..3)) {
        let d = RootDatum::build_finite('A', 1 + which as usize).unwrap();
        let p = Partition::new(parts.iter().map(|(&a, &b)| (a, b)).collect()).unwrap();
        let z = ic_stalks::sym_vf_series(&d, p.max_part()).unwrap();
        let mut expected = QChar::monomial(0, 1);
        for (&dk, &nk) in &parts {
            expected = expected.mul(&z.at_level(dk).pow(nk));
        }
        prop_assert_eq!(ic_stalks::stalk_polynomial(&d, &p).unwrap(), expected);
    }

    #[test]
    fn vanishing_order_closed_form(n in 0u64..200_000) {
        let m = n as u128;
        prop_assert_eq!(ic_stalks::cartier_vanishing_order(n), m * (m + 1) * (m + 2) / 6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn monad_identity_on_random_data(seed in any::<u64>(), a in 1usize..4, n in 1usize..3) {
        let mut rng = StdRng::seed_from_u64(seed);
        let x = AdhmDatum::random(&mut rng, a, n, 4);
        let check = adhm::monad_identity_check(&x);
        prop_assert!(check.holds);
        prop_assert_eq!(check.composite.is_zero(), adhm::moment_residual(&x).is_zero());
    }

    #[test]
    fn moment_solutions_satisfy_trace_identity(seed in any::<u64>(), a1 in 1usize..3, a2 in 0usize..3) {
        let mut rng = StdRng::seed_from_u64(seed);
        let x = AdhmDatum::random_moment_solution(&mut rng, a1, a2, 3);
        prop_assert!(adhm::moment_residual(&x).is_zero());
        // tr([B1,B2]·X) = −tr(ıȷ·X) for X among the words of length ≤ 2.
        let comm = &(&x.b1 * &x.b2) - &(&x.b2 * &x.b1);
        let p = &x.i * &x.j;
        for w in [vec![], vec![0], vec![1], vec![0, 1], vec![1, 1]] {
            let xw = w.iter().fold(QMatrix::identity(x.a), |acc, &k| &acc * if k == 0 { &x.b1 } else { &x.b2 });
            prop_assert_eq!((&comm * &xw).trace(), -(&p * &xw).trace());
        }
    }

    #[test]
    fn conjugation_preserves_invariants(seed in any::<u64>(), a in 1usize..4, n in 1usize..3) {
        let mut rng = StdRng::seed_from_u64(seed);
        let x = AdhmDatum::random(&mut rng, a, n, 3);
        let g = adhm::random_invertible(&mut rng, a, 3);
        let y = x.conjugate(&g).unwrap();
        prop_assert_eq!(adhm::invariants(&x, 3), adhm::invariants(&y, 3));
        prop_assert_eq!(adhm::is_stable(&x), adhm::is_stable(&y));
        prop_assert_eq!(adhm::is_costable(&x), adhm::is_costable(&y));
    }

    #[test]
    fn charpoly_annihilates_and_inverse_inverts(seed in any::<u64>(), k in 1usize..5) {
        let mut rng = StdRng::seed_from_u64(seed);
        let m = QMatrix::random(&mut rng, k, k, 4);
        // Cayley–Hamilton with coefficients listed leading first.
        let coeffs = m.charpoly().unwrap();
        let mut acc = QMatrix::zeros(k, k);
        for c in &coeffs {
            acc = &(&acc * &m) + &QMatrix::identity(k).scale(c);
        }
        prop_assert!(acc.is_zero());
        if let Some(inv) = m.inverse() {
            prop_assert_eq!(&m * &inv, QMatrix::identity(k));
            prop_assert_eq!(m.rank(), k);
        } else {
            prop_assert!(m.rank() < k);
        }
    }
}
