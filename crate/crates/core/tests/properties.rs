use proptest::prelude::*;
use qconn::bitopology::{join, specialization_bitop, subspace, AlexandrovTopology, BitopSpace};
use qconn::completion::{formal_ball_poset, forward_limits, is_left_k_cauchy, precompact_report, EventuallyPeriodicSeq};
use qconn::connectivity::generate::{bitop_of, random_bitop, random_monotone_map};
use qconn::connectivity::{
    antisym_components, antisym_decision, connected_subsets, is_connected_subset, refines, scale_connectivity,
    symmetric_components, CombinedDigraph,
};
use qconn::gauges::{
    all_finite, from_asym_norm, from_digraph, index_labels, qpm_violations, AsymNormSample, NumericMode, QuasiPseudoMetric,
    WeightedDigraph,
};
use qconn::modular::{
    entourages, homogeneous_from_qpm, luxemburg_gauge, modular_balls, symmetrization_gaps, QuasiModularFamily,
};
use qconn::morphisms::{
    check_specialization_preserving, halfspace_separation, is_nonexpansive, is_uniformly_continuous,
    LinearFunctionalSpec, PointMap,
};
use qconn::value::{frac, int, ExtNonNeg, Rational};
use qconn::PointSet;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn weight() -> impl Strategy<Value = Rational> {
    prop_oneof![Just(int(0)), (1i64..12, 1i64..4).prop_map(|(a, b)| frac(a, b))]
}

fn digraph(max_n: usize) -> impl Strategy<Value = (usize, Vec<(usize, usize, Rational)>)> {
    (1..=max_n).prop_flat_map(|n| (Just(n), proptest::collection::vec((0..n, 0..n, weight()), 0..3 * n)))
}

fn closure(n: usize, edges: &[(usize, usize, Rational)]) -> QuasiPseudoMetric {
    let g = WeightedDigraph::new(index_labels(n), edges.iter().map(|(a, b, w)| (*a, *b, ExtNonNeg::Finite(w.clone()))).collect())
        .unwrap();
    from_digraph(&g)
}

fn qpm(max_n: usize) -> impl Strategy<Value = QuasiPseudoMetric> {
    digraph(max_n).prop_map(|(n, e)| closure(n, &e))
}

fn bitop(max_n: usize) -> impl Strategy<Value = BitopSpace> {
    (any::<u64>(), 1..=max_n).prop_map(|(seed, n)| {
        let (f, b) = random_bitop(&mut ChaCha8Rng::seed_from_u64(seed), n);
        bitop_of(&f, &b)
    })
}

fn coherent(t: &AlexandrovTopology) -> bool {
    (0..t.len()).all(|x| t.nbhd(x).contains(x) && t.nbhd(x).iter().all(|y| t.nbhd(y).is_subset(t.nbhd(x))))
}

fn reach_all(n: usize, edges: &[(usize, usize, Rational)], reverse: bool) -> bool {
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut stack = vec![0];
    while let Some(x) = stack.pop() {
        for (a, b, _) in edges {
            let (s, t) = if reverse { (*b, *a) } else { (*a, *b) };
            if s == x && !seen[t] {
                seen[t] = true;
                stack.push(t);
            }
        }
    }
    seen.iter().all(|&s| s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn conjugate_and_symmetrize_laws(d in qpm(6)) {
        prop_assert_eq!(d.conjugate().conjugate(), d.clone());
        let s = d.symmetrize();
        prop_assert_eq!(s.symmetrize(), s.clone());
        let c = d.conjugate();
        for i in 0..d.len() {
            for j in 0..d.len() {
                prop_assert!(s.d(i, j) >= d.d(i, j) && s.d(i, j) >= c.d(i, j));
            }
        }
    }

    #[test]
    fn digraph_closure_laws((n, edges) in digraph(9)) {
        let d = closure(n, &edges);
        prop_assert!(qpm_violations(d.matrix(), None).is_empty());
        prop_assert_eq!(all_finite(&d), reach_all(n, &edges, false) && reach_all(n, &edges, true));
    }

    #[test]
    fn l1_sits_between_max_and_sum(
        pts in (1usize..4).prop_flat_map(|k| proptest::collection::vec(proptest::collection::vec(-5i64..6, k), 1..6))
    ) {
        let dim = pts[0].len();
        let pts: Vec<Vec<Rational>> = pts.iter().map(|v| v.iter().map(|&x| int(x)).collect()).collect();
        let d = from_asym_norm(&AsymNormSample::new(dim, int(1), pts.clone()).unwrap(), &NumericMode::Exact).unwrap();
        for i in 0..pts.len() {
            for j in 0..pts.len() {
                let l1: Rational = pts[i].iter().zip(&pts[j]).map(|(a, b)| if a > b { a - b } else { b - a }).sum();
                let l1 = ExtNonNeg::Finite(l1);
                prop_assert!(ExtNonNeg::max_of(d.d(i, j), d.d(j, i)) <= l1);
                prop_assert!(l1 <= d.d(i, j) + d.d(j, i));
            }
        }
    }

    #[test]
    fn homogeneous_luxemburg_and_zero_sets(d in qpm(6), lam in weight().prop_filter("positive", |l| *l > int(0))) {
        let f = homogeneous_from_qpm(&d);
        let lux = luxemburg_gauge(&f).unwrap();
        prop_assert!(qpm_violations(lux.matrix(), None).is_empty());
        prop_assert_eq!(&lux, &d);
        for x in 0..d.len() {
            for y in 0..d.len() {
                if f.gauge(x, y).is_identically_zero() {
                    prop_assert!(lux.is_zero(x, y));
                }
                prop_assert_eq!(f.w(&lam, x, y).is_zero(), d.is_zero(x, y));
            }
        }
        for g in symmetrization_gaps(&f, None).unwrap() {
            prop_assert!(g.of_symmetrized_family >= g.max_of_one_sided);
        }
    }

    #[test]
    fn section_identity(d in qpm(6), r in 1i64..8, l in 1i64..8) {
        let f: QuasiModularFamily = homogeneous_from_qpm(&d);
        let (r, l) = (frac(r, 2), frac(l, 3));
        let (fwd, bwd) = entourages(&f, &r, &l).unwrap();
        prop_assert!(fwd.contains_diagonal());
        for x in 0..d.len() {
            let (b_plus, b_minus) = modular_balls(&f, x, &l, &r).unwrap();
            prop_assert_eq!(fwd.section(x), &b_plus);
            prop_assert_eq!(bwd.section(x), &b_minus);
        }
    }

    #[test]
    fn coherence_after_every_transformer(b in bitop(7), d in qpm(6), mask in any::<u64>()) {
        let s = specialization_bitop(&d);
        let j = join(&b);
        for t in [b.forward(), b.backward(), &j, s.forward(), s.backward()] {
            prop_assert!(coherent(t));
        }
        prop_assert!(coherent(&b.forward().meet_nbhds(b.backward())));
        let sub = PointSet::from_mask(b.len(), mask | 1);
        let bs = subspace(&b, &sub).unwrap();
        prop_assert!(coherent(bs.forward()) && coherent(bs.backward()));
        let sw = b.swap();
        prop_assert_eq!(sw.forward(), b.backward());
    }

    #[test]
    fn open_sets_form_a_lattice(b in bitop(4)) {
        let t = b.forward();
        let opens = t.open_sets(16).unwrap();
        for u in &opens {
            prop_assert!(t.is_open(u));
            for v in &opens {
                prop_assert!(t.is_open(&u.union(v)) && t.is_open(&u.intersection(v)));
            }
        }
        let n = t.len();
        let count = (0..1u64 << n).filter(|&m| t.is_open(&PointSet::from_mask(n, m))).count();
        prop_assert_eq!(count, opens.len());
    }

    #[test]
    fn join_of_specialization_is_specialization_of_symmetrization(d in qpm(7)) {
        let lhs = specialization_bitop(&d.symmetrize());
        let rhs = join(&specialization_bitop(&d));
        prop_assert_eq!(lhs.forward().nbhds(), rhs.nbhds());
    }

    #[test]
    fn certificates_are_valid_and_partitions_nest(b in bitop(8)) {
        let dec = antisym_decision(&b);
        match &dec.certificate {
            Some(c) => {
                prop_assert!(!dec.connected);
                prop_assert!(c.is_valid_for(&b));
                prop_assert!(b.forward().is_open(&c.a) && b.backward().is_open(&c.b));
                prop_assert!(c.a.is_disjoint(&c.b) && c.a.union(&c.b).is_full() && !c.a.is_empty() && !c.b.is_empty());
            }
            None => prop_assert!(dec.connected),
        }
        prop_assert!(refines(&symmetric_components(&b), &antisym_components(&b)));
        let diag = BitopSpace::new(b.forward().clone(), b.forward().clone()).unwrap();
        prop_assert_eq!(symmetric_components(&diag), antisym_components(&diag));
    }

    #[test]
    fn union_law(b in bitop(6)) {
        let g = CombinedDigraph::new(&b);
        let subs = connected_subsets(&b, 4);
        for s in &subs {
            for t in &subs {
                if s.intersects(t) {
                    prop_assert!(is_connected_subset(&g, &s.union(t)));
                }
            }
        }
    }

    #[test]
    fn scale_partitions_coarsen(d in qpm(7), a in weight(), gap in weight()) {
        let e1 = a + int(1) / int(4);
        let e2 = &e1 + gap;
        let small = scale_connectivity(&d, &e1).unwrap();
        let large = scale_connectivity(&d, &e2).unwrap();
        prop_assert!(refines(&small.antisymmetric, &large.antisymmetric));
        prop_assert!(refines(&small.symmetric, &large.symmetric));
    }

    #[test]
    fn cauchy_sequences_have_limits(d in qpm(6), pre in proptest::collection::vec(0usize..6, 0..3), per in proptest::collection::vec(0usize..6, 1..4)) {
        let n = d.len();
        let s = EventuallyPeriodicSeq::new(pre.iter().map(|x| x % n).collect(), per.iter().map(|x| x % n).collect()).unwrap();
        if is_left_k_cauchy(&d, &s).unwrap() {
            prop_assert!(!forward_limits(&d, &s).unwrap().is_empty());
        }
    }

    #[test]
    fn formal_balls_and_covers(d in qpm(6), radii in proptest::collection::vec(weight(), 1..5)) {
        let p = formal_ball_poset(&d, &radii).unwrap();
        prop_assert!(p.reflexive && p.transitive);
        let mut thresholds: Vec<Rational> = radii.into_iter().map(|r| r + frac(1, 5)).collect();
        thresholds.extend(d.positive_spectrum());
        let r = precompact_report(&d, &thresholds).unwrap();
        prop_assert!(r.monotone);
        prop_assert!(r.entries.windows(2).all(|w| w[1].size <= w[0].size));
    }

    #[test]
    fn nonexpansive_maps_are_uniformly_continuous(d in qpm(6), assignment in proptest::collection::vec(0usize..6, 6)) {
        let n = d.len();
        let doubled: Vec<Vec<ExtNonNeg>> = d.matrix().iter().map(|row| row.iter().map(|v| v.clone() + v.clone()).collect()).collect();
        let dx = QuasiPseudoMetric::new(index_labels(n), doubled, NumericMode::Exact).unwrap();
        let id = PointMap::identity(n);
        prop_assert!(is_nonexpansive(&id, &dx, &d).unwrap());
        prop_assert!(is_uniformly_continuous(&id, &dx, &d).unwrap());
        let f = PointMap::new(assignment[..n].iter().map(|x| x % n).collect(), n).unwrap();
        if is_nonexpansive(&f, &d, &d).unwrap() {
            prop_assert!(is_uniformly_continuous(&f, &d, &d).unwrap());
        }
    }

    #[test]
    fn monotone_maps_keep_components_together(seed in any::<u64>(), n in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, b) = random_bitop(&mut rng, n);
        let (assignment, tf, tb) = random_monotone_map(&mut rng, &f, &b);
        let (src, tgt) = (bitop_of(&f, &b), bitop_of(&tf, &tb));
        let map = PointMap::new(assignment, tgt.len()).unwrap();
        prop_assert!(check_specialization_preserving(&map, &src, &tgt).is_ok());
        let target_comps = antisym_components(&tgt);
        for c in antisym_components(&src) {
            let img = map.image(&PointSet::from_indices(n, c));
            prop_assert!(target_comps.iter().any(|t| img.iter().all(|y| t.contains(&y))));
        }
    }

    #[test]
    fn halfspace_straddling_grows_with_epsilon(
        pts in proptest::collection::vec((-6i64..7, -6i64..7), 1..7),
        e in 1i64..6,
        gap in 0i64..6,
    ) {
        let pts: Vec<Vec<Rational>> = pts.iter().map(|&(a, b)| vec![int(a) + frac(1, 3), int(b)]).collect();
        let s = AsymNormSample::new(2, int(1), pts).unwrap();
        let l = LinearFunctionalSpec { coefficients: vec![int(1), int(0)], alpha: int(0) };
        let small = halfspace_separation(&s, &l, &frac(e, 2)).unwrap();
        let large = halfspace_separation(&s, &l, &frac(e + gap, 2)).unwrap();
        for c in &small.straddling {
            prop_assert!(large.straddling.iter().any(|big| c.iter().all(|x| big.contains(x))));
        }
    }
}
