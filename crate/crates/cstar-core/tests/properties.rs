use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cstar_core::bmy::{check_bmy, enumerate_4_14, enumerate_4_14_bounded, BmyComponent, BmyInstance};
use cstar_core::graph::{
    blow_up, capacity, classify_contractible, contract, determinant, nc_minimalize,
    nc_minimalize_with, BlowupSite, Chain, ContractibilityClass, TrackedSurface, VertexId,
    WeightedTree,
};
use cstar_core::hn::{
    euclid_multiplicities, gamma_prime_a, gamma_prime_b, multiplicity_sequence, random_branch_pair,
    random_sequence, validate,
};
use cstar_core::identities::{bark_identity, laplace_det, random_tree};
use cstar_core::resolution::{build_resolution, minimalize, two_reduction};

fn neg_q(t: &WeightedTree, ids: &[VertexId]) -> Vec<Vec<i64>> {
    ids.iter()
        .map(|&a| {
            ids.iter()
                .map(|&b| if a == b { -t.weight(a) } else { -(t.edge_mult(a, b) as i64) })
                .collect()
        })
        .collect()
}

fn chain_det(w: &[i64]) -> BigInt {
    let t = WeightedTree::chain(w);
    let ids: Vec<VertexId> = t.ids().collect();
    determinant(&t, &ids).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn chain_determinant_recurrence(w in prop::collection::vec(-6i64..=3, 1..=12)) {
        let d = chain_det(&w);
        let t = WeightedTree::chain(&w);
        let ids: Vec<VertexId> = t.ids().collect();
        prop_assert_eq!(&d, &BigInt::from(laplace_det(&neg_q(&t, &ids))));
        let rest = chain_det(&w[1..]);
        let rest2 = if w.len() >= 2 { chain_det(&w[2..]) } else { BigInt::zero() };
        prop_assert_eq!(d, BigInt::from(-w[0]) * rest - rest2);
    }

    #[test]
    fn admissible_capacity_in_unit_interval(w in prop::collection::vec(-9i64..=-2, 1..=10)) {
        let t = WeightedTree::chain(&w);
        let c = Chain::new(&t, t.ids().collect()).unwrap();
        let e = capacity(&t, &c).unwrap();
        prop_assert!(e > BigRational::zero() && e < BigRational::one());
        prop_assert!(e >= BigRational::new(BigInt::one(), BigInt::from(-w[0])));
    }

    #[test]
    fn bark_is_minus_sum_of_capacities(seed in any::<u64>()) {
        let c = bark_identity(seed, 4);
        prop_assert!(c.pass(), "{:?}", c);
    }

    #[test]
    fn blowup_blowdown_roundtrip(seed in any::<u64>(), n in 1usize..10, k2 in -5i64..=9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tree = random_tree(&mut rng, n, -5..=3);
        let edges = tree.edges();
        let site = match rng.gen_range(0..3) {
            0 if !edges.is_empty() => {
                let (a, b, _) = edges[rng.gen_range(0..edges.len())];
                BlowupSite::Edge(a, b)
            }
            1 => BlowupSite::FreePoint,
            _ => BlowupSite::Vertex(rng.gen_range(0..n as VertexId)),
        };
        let mut s = TrackedSurface::new(tree.clone(), k2);
        let before = s.clone();
        let (_, f) = s.blow_up(site).unwrap();
        s.check().unwrap();
        s.blow_down(f).unwrap();
        prop_assert_eq!(s, before);
        prop_assert!(blow_up(&tree, site).is_ok());
    }

    #[test]
    fn contractible_implies_negative_definite(seed in any::<u64>(), n in 1usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_tree(&mut rng, n, -5..=-1);
        let ids: Vec<VertexId> = t.ids().collect();
        let class = classify_contractible(&t, &ids).unwrap();
        if class != ContractibilityClass::NotContractible {
            let m = neg_q(&t, &ids);
            for k in 1..=n {
                let minor: Vec<Vec<i64>> = m[..k].iter().map(|r| r[..k].to_vec()).collect();
                prop_assert!(laplace_det(&minor) > 0, "{:?} {:?}", class, t.to_json_value());
            }
        }
    }

    #[test]
    fn nc_minimalization_ends_minimal_for_any_order(seed in any::<u64>(), n in 2usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_tree(&mut rng, n, -3..=-1);
        for r in [nc_minimalize(&t), nc_minimalize_with(&t, |c| *c.choose(&mut rng).unwrap())] {
            prop_assert_eq!(r.tree.len() + r.contracted.len(), n);
            let minimal = r.tree.ids().all(|v| {
                r.tree.weight(v) != -1
                    || r.tree.degree(v) > 2
                    || r.tree.neighbors(v).any(|(_, m)| m > 1)
            });
            prop_assert!(minimal);
        }
    }

    #[test]
    fn euclid_list_closed_forms(seed in any::<u64>(), max_c1 in 1i64..=60) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_sequence(&mut rng, max_c1, true);
        let mu = multiplicity_sequence(&s);
        prop_assert_eq!(mu.iter().sum::<i64>(), s.c(1) + s.sum_p() - 1);
        prop_assert_eq!(mu.iter().map(|m| m * m).sum::<i64>(), s.sum_cp());
    }

    #[test]
    fn single_pair_c_1(c in 1i64..=200) {
        let s = validate(&[(c, 1)]).unwrap();
        let mu = multiplicity_sequence(&s);
        prop_assert_eq!(mu.iter().sum::<i64>(), c);
        prop_assert_eq!(mu.iter().map(|m| m * m).sum::<i64>(), c);
        prop_assert_eq!(euclid_multiplicities(c, 1), vec![1; c as usize]);
    }

    #[test]
    fn gamma_prime_symmetric(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bp = random_branch_pair(&mut rng, 30);
        let sw = bp.swapped();
        prop_assert_eq!(gamma_prime_a(&bp), gamma_prime_a(&sw));
        prop_assert_eq!(gamma_prime_b(&bp), gamma_prime_b(&sw));
    }

    #[test]
    fn scene_invariants(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bp = random_branch_pair(&mut rng, 24);
        let s = build_resolution(&bp, false).unwrap();
        let d = bp.d();
        let sq: i64 = s.multiplicities.iter().map(|m| m * m).sum();
        prop_assert_eq!(-s.gamma(), d * d - sq);
        prop_assert_eq!(s.k_dot_k_plus_d(), 6 - s.h_phi as i64);
        if s.virtual_points == 0 {
            prop_assert_eq!(s.gamma(), gamma_prime_b(&bp));
        }

        let nc = nc_minimalize(&s.tree);
        let mut t = s.tree.clone();
        for &v in &nc.contracted {
            prop_assert!(t.degree(v) <= 2, "contracted branching vertex {}", v);
            t = contract(&t, v).unwrap();
        }
        let m = minimalize(&s).unwrap();
        prop_assert_eq!(&m.tree, &t);

        let e = m.e().unwrap();
        let r = two_reduction(&m).unwrap();
        prop_assert!(!r.contracted.contains(&e));
        prop_assert_eq!(r.tree.e_vertex(), Some(e));
        prop_assert_eq!(r.lhs, r.rhs());
    }

    #[test]
    fn bmy_monotone(
        chi in -3i64..=3,
        ws in prop::collection::vec(prop::collection::vec(-6i64..=-2, 1..=4), 0..=4),
        p_num in -10i64..=20,
        p_den in 1i64..=6,
        bump in 0usize..5,
    ) {
        let comps: Vec<BmyComponent> =
            ws.iter().map(|w| BmyComponent::Chain { weights: w.clone() }).collect();
        let inst = BmyInstance {
            chi_open: chi,
            components: comps.clone(),
            p_squared: BigRational::new(p_num.into(), p_den.into()),
        };
        let base = check_bmy(&inst).unwrap();
        let more_chi = BmyInstance { chi_open: chi + 1, ..inst.clone() };
        prop_assert!(!base.holds || check_bmy(&more_chi).unwrap().holds);
        if !comps.is_empty() {
            // Raising a weight toward −2 lowers the determinant, so 1/|G| grows.
            let i = bump % comps.len();
            let mut w = ws[i].clone();
            if let Some(x) = w.iter_mut().find(|x| **x < -2) {
                *x += 1;
            }
            let mut c2 = comps.clone();
            c2[i] = BmyComponent::Chain { weights: w };
            let bigger = BmyInstance { components: c2, ..inst.clone() };
            let r = check_bmy(&bigger).unwrap();
            prop_assert!(r.slack_value >= base.slack_value);
            prop_assert!(!base.holds || r.holds);
        }
    }
}

#[test]
fn enumeration_stable_under_larger_bound() {
    for g in 6..=8 {
        assert_eq!(enumerate_4_14(g).unwrap(), enumerate_4_14_bounded(g, 60).unwrap());
    }
    let all: BTreeSet<(i64, i64, i64)> = (6..=8)
        .flat_map(|g| enumerate_4_14(g).unwrap().into_iter().map(move |(a, b)| (g, a, b)))
        .collect();
    let expected: BTreeSet<(i64, i64, i64)> =
        [(6, 2, 2), (6, 2, 3), (6, 3, 2), (7, 2, 2), (8, 2, 2)].into_iter().collect();
    assert_eq!(all, expected);
}
