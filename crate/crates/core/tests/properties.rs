mod common;

use std::collections::BTreeSet;

use blockforge::amalgam::{amalgamate, AmalgamOptions, CrossBlockade, Demotion, Placement};
use blockforge::catalog::catalog;
use blockforge::expr::{BoolExpr, BooleanFunction};
use blockforge::gsm::{enumerate_gsm, realizes_language};
use blockforge::io::{complex_from_json, complex_to_json, language_from_json, language_to_json};
use blockforge::language::{gamma_intersection, truth_table_language, GammaMap};
use blockforge::metrics::{normalize, robustness, spread};
use blockforge::model::{rational, BlockadeGraph, Complex, Language, Point, Port, Rational, Word};
use common::{brute_complex, brute_force, masks};
use proptest::prelude::*;

const XI_TOL: f64 = 1e-12;

const GATES: [&str; 10] = ["NOT", "LNK", "CPY", "NOR_ring", "NOR_triangle", "AND", "OR", "NAND", "XOR", "XNOR"];

prop_compose! {
    fn graph_instance(max_n: usize)(n in 1..=max_n)
        (edges in proptest::collection::vec(any::<bool>(), n * (n - 1) / 2),
         det in proptest::collection::vec((1i64..=6, 1i64..=3), n),
         n in Just(n))
        -> (usize, Vec<(usize, usize)>, Vec<Rational>) {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let e = pairs.into_iter().zip(edges).filter(|p| p.1).map(|p| p.0).collect();
        (n, e, det.into_iter().map(|(a, b)| Rational::new(a, b)).collect())
    }
}

prop_compose! {
    fn points(max_n: usize)(v in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 3..=max_n)) -> Vec<Point> {
        v.into_iter().map(|(x, y)| Point::new(x, y)).collect()
    }
}

fn graph_of(p: &[Point], r: f64) -> BlockadeGraph {
    blockforge::model::blockade_graph_of(p, r).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn gsm_matches_exhaustive_minimization((n, edges, det) in graph_instance(12)) {
        let c = Complex::abstract_graph(BlockadeGraph::from_edges(n, &edges).unwrap(), det.clone(), vec![]).unwrap();
        let gsm = enumerate_gsm(&c).unwrap();
        let b = brute_force(n, &edges, &det);
        prop_assert_eq!(masks(&gsm), b.ground);
        prop_assert_eq!(gsm.ground_energy, b.ground_energy);
        prop_assert_eq!(Some(gsm.gap), b.gap);
    }

    #[test]
    fn ground_configurations_are_independent((n, edges, det) in graph_instance(14)) {
        let g = BlockadeGraph::from_edges(n, &edges).unwrap();
        let c = Complex::abstract_graph(g.clone(), det.clone(), vec![]).unwrap();
        let gsm = enumerate_gsm(&c).unwrap();
        for k in &gsm.configurations {
            prop_assert!(k.is_admissible(&g));
            prop_assert_eq!(k.energy(&det), gsm.ground_energy);
        }
    }

    #[test]
    fn robustness_is_invariant_under_similarity(
        p in points(9),
        dx in -10.0f64..10.0, dy in -10.0f64..10.0, theta in 0.0f64..6.3, scale in 0.1f64..10.0,
        r in 0.8f64..2.5,
    ) {
        let g = graph_of(&p, r);
        let xi = robustness(&p, &g).xi;
        let place = Placement::new(dx, dy, theta);
        let q: Vec<Point> = p.iter().map(|v| { let w = place.apply(v); Point::new(scale * w.x, scale * w.y) }).collect();
        prop_assert!((robustness(&q, &g).xi - xi).abs() <= XI_TOL);
    }

    #[test]
    fn normalize_is_idempotent(p in points(9), r in 0.8f64..2.5) {
        let g = graph_of(&p, r);
        if let Ok(once) = normalize(&p, &g) {
            let twice = normalize(&once, &g).unwrap();
            for (a, b) in once.iter().zip(&twice) {
                prop_assert!(a.dist(b) <= XI_TOL);
            }
        }
    }

    #[test]
    fn spread_ignores_the_detuning_scale(d in proptest::collection::vec(1i64..20, 1..8), num in 1i64..50, den in 1i64..50) {
        let det: Vec<Rational> = d.iter().map(|&v| rational(v)).collect();
        let scaled: Vec<Rational> = det.iter().map(|v| v * Rational::new(num, den)).collect();
        let (s, t) = (spread(&det).unwrap(), spread(&scaled).unwrap());
        prop_assert!((s - t).abs() <= XI_TOL);
        prop_assert!((0.0..1.0).contains(&s));
    }

    #[test]
    fn complexes_round_trip_through_json((n, edges, det) in graph_instance(10), ports in 0usize..4) {
        let ports: Vec<Port> = (0..ports.min(n)).map(|i| Port::new(format!("p{i}"), i)).collect();
        let c = Complex::abstract_graph(BlockadeGraph::from_edges(n, &edges).unwrap(), det, ports).unwrap();
        let back = complex_from_json(&complex_to_json(&c)).unwrap();
        prop_assert_eq!(back.graph(), c.graph());
        prop_assert_eq!(back.detunings(), c.detunings());
        prop_assert_eq!(back.ports(), c.ports());
    }

    #[test]
    fn geometric_complexes_round_trip(p in points(8)) {
        let n = p.len();
        let c = Complex::geometric(p, vec![rational(1); n], vec![Port::new("A", 0)], 1.3).unwrap();
        let back = complex_from_json(&complex_to_json(&c)).unwrap();
        prop_assert_eq!(back.graph(), c.graph());
        prop_assert_eq!(back.positions(), c.positions());
    }

    #[test]
    fn languages_round_trip(len in 1usize..10, bits in proptest::collection::vec(any::<u64>(), 0..20)) {
        let words: Vec<Word> = bits.iter().map(|&b| Word::from_bits(b & ((1 << len) - 1), len)).collect();
        let l = Language::new(len, words).unwrap();
        prop_assert_eq!(language_from_json(&language_to_json(&l)).unwrap(), l);
    }

    #[test]
    fn amalgams_add_energies_and_intersect_languages(i in 0..GATES.len(), j in 0..GATES.len(), a in 0usize..4, b in 0usize..4) {
        let e1 = catalog(GATES[i]).unwrap();
        let e2 = catalog(GATES[j]).unwrap();
        let (c1, c2) = (e1.complex.without_geometry(), e2.complex.without_geometry());
        let (pa, pb) = (a % c1.n_ports(), b % c2.n_ports());
        let gamma = vec![(c1.ports()[pa].label.clone(), c2.ports()[pb].label.clone())];
        let want = gamma_intersection(&e1.language, &e2.language, &GammaMap::new(vec![(pa, pb)]).unwrap(), false).unwrap();
        prop_assume!(!want.is_empty());
        let opts = AmalgamOptions { placement: None, abstract_only: true, cross: CrossBlockade::Forbid, demotion: Demotion::Never };
        let am = amalgamate(&c1, &c2, &gamma, &opts).unwrap();
        let e0 = brute_complex(&am.complex).ground_energy;
        prop_assert_eq!(e0, brute_complex(&c1).ground_energy + brute_complex(&c2).ground_energy);
        prop_assert!(realizes_language(&am.complex, &want).unwrap().is_yes());
    }

    #[test]
    fn gamma_intersection_counts_agreeing_pairs(
        l1 in proptest::collection::btree_set(0u64..8, 1..8),
        l2 in proptest::collection::btree_set(0u64..8, 1..8),
        a in 0usize..3, b in 0usize..3,
    ) {
        let mk = |s: &BTreeSet<u64>| Language::new(3, s.iter().map(|&w| Word::from_bits(w, 3))).unwrap();
        let got = gamma_intersection(&mk(&l1), &mk(&l2), &GammaMap::new(vec![(a, b)]).unwrap(), false);
        let pairs = l1.iter().flat_map(|x| l2.iter().map(move |y| (x, y))).filter(|(x, y)| (*x >> a & 1) == (*y >> b & 1)).count();
        match got {
            Ok(l) => prop_assert_eq!(l.len(), pairs),
            Err(_) => prop_assert_eq!(pairs, 0),
        }
    }

    #[test]
    fn truth_tables_have_one_word_per_row(code in 0u32..256) {
        let table: Vec<bool> = (0..8).map(|r| code >> r & 1 == 1).collect();
        let f = BooleanFunction::from_table(3, table).unwrap();
        let l = truth_table_language(&f).unwrap();
        prop_assert_eq!(l.len(), 8);
        prop_assert_eq!(l.word_length(), 4);
    }
}

#[test]
fn expressions_agree_with_their_truth_tables() {
    let f = BooleanFunction::parse("(x1 nor x2) ^ !(x3 == x1)").unwrap();
    let e = BoolExpr::parse("(x1 nor x2) ^ !(x3 == x1)").unwrap();
    for r in 0..8usize {
        let x: Vec<bool> = (0..3).map(|i| r >> i & 1 == 1).collect();
        let direct = (!(x[0] || x[1])) ^ !(x[2] == x[0]);
        assert_eq!(f.eval(&x), direct);
        assert_eq!(e.eval(&x), direct);
    }
}
