use proptest::prelude::*;
use std::collections::BTreeSet;
use topos_measure::groupoid::{equivariant_maps, EquivariantMap, FiniteAction};
use topos_measure::random::{group_table, seeded_rng, GroupoidModel, GROUP_NAMES};

fn model_and_action(seed: u64) -> (GroupoidModel, FiniteAction) {
    let mut rng = seeded_rng(seed);
    let model = GroupoidModel::random(&mut rng, 8);
    let x = model.random_action(&mut rng, 12);
    (model, x)
}

#[test]
fn orbit_stabilizer_on_every_small_group() {
    for name in GROUP_NAMES {
        let t = group_table(name);
        let model = GroupoidModel::new(&[(t.clone(), 1)]);
        let n = t.order();
        assert!(n <= 24);
        let mut subgroups = BTreeSet::new();
        for a in 0..n {
            for b in 0..n {
                subgroups.insert(t.generated_subgroup(&[a, b]));
            }
        }
        for h in subgroups {
            let x = model.coset_action(&[(0, h.clone())]);
            assert_eq!(x.len(), n / h.len(), "{name}");
            for e in 0..x.len() {
                let orbit = x.orbits()[x.orbit_of(e)].len();
                assert_eq!(orbit * x.stabilizer_order(e), n, "{name}, subgroup of order {}", h.len());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transport_is_functorial(seed in any::<u64>()) {
        let (model, x) = model_and_action(seed);
        let g = &model.groupoid;
        for a in 0..g.num_morphisms() {
            for b in 0..g.num_morphisms() {
                if let Some(ab) = g.compose(a, b) {
                    for &e in x.fiber(g.morphism(b).src) {
                        prop_assert_eq!(x.act(ab, e), x.act(a, x.act(b, e)));
                    }
                }
            }
        }
        for s in 0..g.num_objects() {
            for &e in x.fiber(s) {
                prop_assert_eq!(x.act(g.identity(s), e), e);
            }
        }
    }

    #[test]
    fn orbits_partition_into_invariant_pieces(seed in any::<u64>()) {
        let (_, x) = model_and_action(seed);
        let mut seen = vec![0; x.len()];
        for o in 0..x.num_orbits() {
            for &e in &x.orbits()[o] {
                seen[e] += 1;
            }
            prop_assert!(x.is_invariant(&x.orbit_subobject(o)));
        }
        prop_assert!(seen.iter().all(|&c| c == 1));
        // listed by least element id
        let firsts: Vec<&str> = x
            .orbits()
            .iter()
            .map(|o| o.iter().map(|&e| x.element_name(e)).min().unwrap())
            .collect();
        let mut sorted = firsts.clone();
        sorted.sort();
        prop_assert_eq!(firsts, sorted);
    }

    #[test]
    fn stabilizer_times_orbit_fiber_is_the_endomorphism_count(seed in any::<u64>()) {
        let (model, x) = model_and_action(seed);
        let g = &model.groupoid;
        for e in 0..x.len() {
            let s = x.object_of(e);
            let in_fiber = x.orbits()[x.orbit_of(e)].iter().filter(|&&k| x.object_of(k) == s).count();
            prop_assert_eq!(x.stabilizer_order(e) * in_fiber, g.endomorphisms(s).count());
        }
    }

    #[test]
    fn internal_cardinal_is_constant_on_components(seed in any::<u64>()) {
        let (model, x) = model_and_action(seed);
        let g = &model.groupoid;
        let card = x.internal_cardinal();
        for s in 0..g.num_objects() {
            prop_assert_eq!(x.fiber(s).len(), card[g.component_of(s)]);
        }
    }

    #[test]
    fn n_to_1_epis_multiply_cardinals(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let model = GroupoidModel::random(&mut rng, 6);
        let y = model.random_action(&mut rng, 12);
        let x = model.random_action(&mut rng, 6);
        let maps = equivariant_maps(&y, &x, 64).unwrap();
        for f in maps.iter().filter(|f| f.is_epi()) {
            if let Some(n) = f.fiber_profile().n_to_1 {
                let (cy, cx) = (y.internal_cardinal(), x.internal_cardinal());
                for c in 0..cy.len() {
                    prop_assert_eq!(cy[c], n * cx[c]);
                }
            }
        }
        // projections X × A → X are epi and n-to-1 when A is internally constant
        let a = model.random_action(&mut rng, 4);
        let card_a = a.internal_cardinal();
        if !x.is_empty() && card_a.iter().all(|&k| k == card_a[0] && k > 0) {
            let p = EquivariantMap::first_projection(&x, &a).unwrap();
            prop_assert!(p.is_epi());
            prop_assert_eq!(p.fiber_profile().n_to_1, Some(card_a[0]));
            let (cp, cx) = (p.source().internal_cardinal(), x.internal_cardinal());
            for c in 0..cp.len() {
                prop_assert_eq!(cp[c], card_a[0] * cx[c]);
            }
        }
    }
}
