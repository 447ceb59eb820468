use latheta::exact::{self, int, rat, rational_det, IntRows};
use latheta::gts::determinant_census;
use latheta::{
    builtin_lattice, dsp, generalized_theta, lambda_sequence, theta_spectrum, vectors_within, Limits, QuadraticLattice,
    Rational, RationalMatrix,
};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(p, q)| rat(p, q))
}

fn square(n: usize) -> impl Strategy<Value = RationalMatrix> {
    proptest::collection::vec(small_rational(), n * n).prop_map(move |e| RationalMatrix::new(n, n, e).unwrap())
}

fn basis(n: usize) -> impl Strategy<Value = IntRows> {
    proptest::collection::vec(proptest::collection::vec(-3i64..=3, n), n)
        .prop_filter("nonsingular", |rows| exact::integer_rank(rows) == rows.len())
}

fn lattice(n: usize) -> impl Strategy<Value = QuadraticLattice> {
    basis(n).prop_map(|rows| {
        QuadraticLattice::from_rational_basis(&RationalMatrix::from_int_rows(&rows).unwrap()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn det_is_multiplicative((a, b) in (1usize..=4).prop_flat_map(|n| (square(n), square(n)))) {
        let ab = a.mul(&b).unwrap();
        prop_assert_eq!(rational_det(&ab).unwrap(), rational_det(&a).unwrap() * rational_det(&b).unwrap());
    }

    #[test]
    fn saturation_is_idempotent_and_obeys_index_law(
        rows in proptest::collection::vec(proptest::collection::vec(-6i64..=6, 4), 1..=3),
        l in lattice(4),
    ) {
        prop_assume!(exact::integer_rank(&rows) == rows.len());
        let s = exact::saturate_rows(&rows).unwrap();
        prop_assert_eq!(exact::saturate_rows(&s).unwrap(), s.clone());
        prop_assert!(exact::saturation_index(&s).unwrap().is_one());
        let k = exact::saturation_index(&rows).unwrap();
        let lhs = l.subset_gram_det(&rows).unwrap();
        let rhs = l.subset_gram_det(&s).unwrap() * Rational::from_integer(&k * &k);
        prop_assert_eq!(lhs.clone(), rhs);
        prop_assert!(l.subset_gram_det(&s).unwrap() <= lhs);
    }

    #[test]
    fn dual_is_an_involution(l in lattice(3)) {
        let dd = l.dual().dual();
        prop_assert_eq!(dd.gram(), l.gram());
        prop_assert_eq!(l.dual().volume_sq() * l.volume_sq(), int(1));
    }

    #[test]
    fn subset_det_ignores_order_and_sign(
        l in lattice(3),
        rows in proptest::collection::vec(proptest::collection::vec(-4i64..=4, 3), 2),
        flip in any::<bool>(),
    ) {
        let base = l.subset_gram_det(&rows).unwrap();
        let mut other = vec![rows[1].clone(), rows[0].clone()];
        if flip {
            other[0].iter_mut().for_each(|c| *c = -*c);
        }
        prop_assert_eq!(l.subset_gram_det(&other).unwrap(), base);
    }

    #[test]
    fn scaling_multiplies_invariants(l in lattice(3), p in 1i64..=5, q in 1i64..=5) {
        let c = rat(p, q);
        let scaled = l.scale(&c).unwrap();
        prop_assert_eq!(scaled.volume_sq(), num_traits::pow(c.clone(), 3) * l.volume_sq());
        let a = lambda_sequence(&l, 2, 100_000).unwrap();
        let b = lambda_sequence(&scaled, 2, 100_000).unwrap();
        prop_assert_eq!(b, a.iter().map(|x| x * &c).collect::<Vec<_>>());
        let report = dsp::check_scaling_law(&l, &c, &Limits::default()).unwrap();
        prop_assert!(report.all_pass());
    }

    #[test]
    fn doubling_bound_extends_prefix(l in lattice(3), b in 1i64..=8) {
        let small = theta_spectrum(&l, &int(b), 1_000_000).unwrap();
        let big = theta_spectrum(&l, &int(2 * b), 1_000_000).unwrap();
        prop_assert_eq!(&big.terms[..small.terms.len()], &small.terms[..]);
        prop_assert!(big.terms[small.terms.len()..].iter().all(|t| t.mu > int(b)));
    }

    #[test]
    fn first_order_series_is_the_theta_series(l in lattice(2)) {
        let g = generalized_theta(&l, 1, 3, &Limits::default()).unwrap();
        let mus = lambda_sequence(&l, 3, 100_000).unwrap();
        let bound = mus[2].clone();
        let theta = theta_spectrum(&l, &bound, 100_000).unwrap();
        prop_assert_eq!(g.pairs(), theta.pairs());
    }

    #[test]
    fn duality_route_agrees(l in lattice(4)) {
        for row in dsp::duality_cross_check(&l, &Limits::default()).unwrap() {
            prop_assert_eq!(row.direct, row.via_dual);
        }
        let h = dsp::norm_hierarchy(&l, &Limits::default()).unwrap();
        for (r, w) in h.witnesses.iter().enumerate() {
            prop_assert_eq!(w.len(), r + 1);
            prop_assert_eq!(&l.subset_gram_det(w).unwrap(), &h.values[r]);
        }
    }

    #[test]
    fn witness_is_no_larger_than_lemma_ball_sets(l in lattice(3)) {
        // Every rank-2 set of vectors inside the 4 lambda_1^2 ball saturates
        // to a sublattice at least as large as the reported minimum.
        let limits = Limits::default();
        let lambda = lambda_sequence(&l, 1, 100_000).unwrap()[0].clone();
        let ball = vectors_within(&l, &(lambda * int(4)), 100_000).unwrap();
        let census = determinant_census(&l, 2, &ball, &limits).unwrap();
        let nu2 = dsp::min_sublattice_det(&l, 2, &limits).unwrap().value;
        if let Some(smallest) = census.keys().next() {
            prop_assert!(nu2 <= *smallest);
        }
    }
}

/// All unordered `r`-subsets of the vectors with norm `<= ball`, naively.
fn brute_force_counts(l: &QuadraticLattice, r: usize, ball: &Rational) -> std::collections::BTreeMap<Rational, u64> {
    let reach = 8i64;
    let mut vs: Vec<Vec<i64>> = Vec::new();
    for a in -reach..=reach {
        for b in -reach..=reach {
            let u = vec![a, b];
            if (a, b) != (0, 0) && l.norm_sq(&u) <= *ball {
                vs.push(u);
            }
        }
    }
    let mut out = std::collections::BTreeMap::new();
    let n = vs.len();
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        let rows: Vec<Vec<i64>> = idx.iter().map(|&i| vs[i].clone()).collect();
        let d = l.subset_gram_det(&rows).unwrap();
        if !d.is_zero() {
            *out.entry(d).or_insert(0) += 1;
        }
        let mut i = r;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < n - r + i {
                idx[i] += 1;
                for j in i + 1..r {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[test]
fn census_matches_brute_force_in_the_plane() {
    let limits = Limits::default();
    for name in ["a2", "zn:2"] {
        let l = builtin_lattice(name).unwrap();
        for ball in [int(4), int(7), rat(25, 2)] {
            let vs = vectors_within(&l, &ball, 10_000).unwrap();
            let fast = determinant_census(&l, 2, &vs, &limits).unwrap();
            assert_eq!(fast, brute_force_counts(&l, 2, &ball), "{name} ball {ball}");
        }
    }
    let skew = QuadraticLattice::from_gram(
        RationalMatrix::from_rows(vec![vec![int(2), rat(-1, 3)], vec![rat(-1, 3), rat(5, 2)]]).unwrap(),
    )
    .unwrap();
    let vs = vectors_within(&skew, &int(12), 10_000).unwrap();
    assert_eq!(
        determinant_census(&skew, 2, &vs, &limits).unwrap(),
        brute_force_counts(&skew, 2, &int(12))
    );
}

#[test]
fn census_ignores_input_order_and_duplicates() {
    let l = builtin_lattice("a2").unwrap();
    let limits = Limits::default();
    let vs = vectors_within(&l, &int(9), 10_000).unwrap();
    let want = determinant_census(&l, 2, &vs, &limits).unwrap();
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    for _ in 0..5 {
        let mut shuffled = vs.clone();
        shuffled.shuffle(&mut rng);
        shuffled.extend(vs.iter().take(5).cloned());
        assert_eq!(determinant_census(&l, 2, &shuffled, &limits).unwrap(), want);
    }
    // One sign per class: every set is counted once.
    let half: Vec<_> = vs.iter().filter(|v| v.coeffs.iter().find(|&&c| c != 0) > Some(&0)).cloned().collect();
    let halved = determinant_census(&l, 2, &half, &limits).unwrap();
    for (det, count) in &want {
        assert_eq!(halved[det] * 4, *count);
    }
}

#[test]
fn count_is_independent_of_thread_count() {
    let l = builtin_lattice("a4_c3").unwrap();
    let limits = Limits::default();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let single = pool.install(|| generalized_theta(&l, 2, 2, &limits).unwrap());
    let many = generalized_theta(&l, 2, 2, &limits).unwrap();
    assert_eq!(single, many);
}
