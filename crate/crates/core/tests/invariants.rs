//! Structural invariants over random diagrams, trees and parameters.

use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use coxrep::analysis::{is_reflection, verify_good_morphism};
use coxrep::cartan::DEFAULT_MAX_ORDER;
use coxrep::construction::{build, cartan_matrix, geometric_parameters, ParameterSystem};
use coxrep::cyclotomic::field_context;
use coxrep::forms::{
    build_form, dual_representation, form_exists, form_space_dimension, tree_product, Automorphism,
};
use coxrep::graph::{validate, CoxeterMatrix, Diagram, SpanningTree};
use coxrep::io::{rep_from_json, rep_to_json};
use coxrep::ReflectionRep;

const LABELS: [i64; 5] = [2, 3, 4, 5, 6];

fn random_diagram(rng: &mut ChaCha8Rng) -> Arc<Diagram> {
    let n = rng.gen_range(2..=4);
    let mut m = vec![vec![2i64; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1;
    }
    for v in 1..n {
        let p = rng.gen_range(0..v);
        let l = LABELS[rng.gen_range(1..LABELS.len())];
        m[p][v] = l;
        m[v][p] = l;
    }
    for s in 0..n {
        for t in s + 1..n {
            if m[s][t] == 2 && rng.gen_bool(0.4) {
                let l = *LABELS.choose(rng).unwrap();
                m[s][t] = l;
                m[t][s] = l;
            }
        }
    }
    validate(&CoxeterMatrix::new(m)).unwrap()
}

fn random_tree(rng: &mut ChaCha8Rng, d: &Arc<Diagram>) -> SpanningTree {
    let n = d.rank();
    let mut edges = d.edges().to_vec();
    edges.shuffle(rng);
    let mut comp: Vec<usize> = (0..n).collect();
    let mut chosen = Vec::new();
    for (s, t) in edges {
        let (a, b) = (comp[s], comp[t]);
        if a != b {
            comp.iter_mut().filter(|c| **c == a).for_each(|c| *c = b);
            chosen.push((s, t));
        }
    }
    SpanningTree::from_edges(d, rng.gen_range(0..n), &chosen).unwrap()
}

fn random_params(rng: &mut ChaCha8Rng, tree: &SpanningTree, geometric: bool) -> ParameterSystem {
    let mut p = geometric_parameters(tree).unwrap();
    if geometric {
        return p;
    }
    let d = tree.diagram();
    let ctx = field_context(d.conductor());
    for (&(s, t), k) in p.alpha.iter_mut() {
        let m = d.order(s, t);
        let units: Vec<u64> = (1..=m / 2).filter(|k| k.gcd(&m) == 1).collect();
        *k = *units.choose(rng).unwrap();
    }
    for l in p.chords.values_mut() {
        *l = loop {
            let x = &ctx.from_i64(rng.gen_range(-3..=3)) + &(&ctx.from_i64(rng.gen_range(-2..=2)) * &ctx.generator());
            if !x.is_zero() {
                break x;
            }
        };
    }
    p
}

fn instance(seed: u64, geometric: bool) -> ReflectionRep {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = random_diagram(&mut rng);
    let t = random_tree(&mut rng, &d);
    let p = random_params(&mut rng, &t, geometric);
    build(&t, &p).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generators_are_reflections_with_the_right_pair_orders(seed in any::<u64>(), geometric in any::<bool>()) {
        let rep = instance(seed, geometric);
        prop_assert!(rep.generators().iter().all(|g| is_reflection(g).is_some()));
        let report = verify_good_morphism(rep.generators(), rep.diagram().matrix(), DEFAULT_MAX_ORDER).unwrap();
        prop_assert!(report.pass);
    }

    #[test]
    fn form_space_is_at_most_a_line_and_matches_the_criterion(seed in any::<u64>(), geometric in any::<bool>(), j in 1i64..120) {
        let rep = instance(seed, geometric);
        let n = rep.context().conductor() as i64;
        let theta = Automorphism::new(rep.context(), j % n.max(2)).unwrap_or_else(|_| Automorphism::identity(rep.context()));
        let dim = form_space_dimension(&rep, &theta).unwrap();
        prop_assert!(dim <= 1);
        prop_assert_eq!(dim == 1, form_exists(&rep, &theta).unwrap().exists());
    }

    #[test]
    fn geometric_parameters_admit_a_bilinear_form(seed in any::<u64>()) {
        let rep = instance(seed, true);
        prop_assert!(form_exists(&rep, &Automorphism::identity(rep.context())).unwrap().exists());
    }

    #[test]
    fn gram_determinant_factors_through_the_cartan_determinant(seed in any::<u64>(), geometric in any::<bool>()) {
        let rep = instance(seed, geometric);
        let id = Automorphism::identity(rep.context());
        if form_exists(&rep, &id).unwrap().exists() {
            let gram = build_form(&rep, &id).unwrap().entries;
            let mut expected = cartan_matrix(&rep).discriminant;
            for s in 0..rep.rank() {
                expected = &expected * &tree_product(&rep, s).unwrap();
            }
            prop_assert_eq!(gram.det(), expected);
        }
    }

    #[test]
    fn duals_keep_the_pair_orders(seed in any::<u64>(), geometric in any::<bool>()) {
        let rep = instance(seed, geometric);
        let dual = dual_representation(&rep).unwrap();
        prop_assert_eq!(dual.degenerate, cartan_matrix(&rep).discriminant.is_zero());
        let report = verify_good_morphism(&dual.generators, rep.diagram().matrix(), DEFAULT_MAX_ORDER).unwrap();
        prop_assert!(report.pass);
    }

    #[test]
    fn serialization_round_trips(seed in any::<u64>(), geometric in any::<bool>()) {
        let rep = instance(seed, geometric);
        let json = rep_to_json(&rep);
        let back = rep_from_json(&json).unwrap();
        prop_assert_eq!(back.generators(), rep.generators());
        prop_assert_eq!(rep_to_json(&back), json);
    }

    #[test]
    fn field_inverses(seed in any::<u64>(), conductor in prop::sample::select(vec![5u64, 24, 30, 60, 84, 120])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ctx = field_context(conductor);
        let c = ctx.generator();
        let mut x = ctx.zero();
        let mut power = ctx.one();
        for _ in 0..ctx.degree() {
            x = &x + &(&power * &ctx.from_i64(rng.gen_range(-9..=9)));
            power = &power * &c;
        }
        prop_assume!(!x.is_zero());
        let y = x.invert().unwrap();
        prop_assert!((&x * &y).is_one());
        prop_assert_eq!(y.invert().unwrap(), x);
    }
}
