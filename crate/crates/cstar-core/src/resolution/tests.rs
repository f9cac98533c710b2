use num_bigint::BigInt;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::hn::{
    gamma_prime_b, joint_multiplicities, random_branch_pair, validate, BranchPair,
};

fn bp(a: &[(i64, i64)], b: &[(i64, i64)], same: bool, s: usize) -> BranchPair {
    BranchPair::new(validate(a).unwrap(), validate(b).unwrap(), same, s).unwrap()
}

fn closed_sums(bp: &BranchPair) -> (i64, i64) {
    if bp.same_point {
        let j = joint_multiplicities(bp).unwrap();
        (j.sum, j.sum_squares)
    } else {
        let (l, t) = (&bp.lambda, &bp.lambda_t);
        (
            l.c(1) + l.sum_p() - 1 + t.c(1) + t.sum_p() - 1,
            l.sum_cp() + t.sum_cp(),
        )
    }
}

#[test]
fn hyperbola_needs_no_blowup() {
    let s = build_resolution(&bp(&[(1, 1)], &[(1, 1)], false, 0), true).unwrap();
    assert!(s.multiplicities.is_empty());
    let l = s.tree.find_tag(Tag::LineAtInfinity).unwrap();
    assert_eq!(s.tree.weight(l), 1);
    let e = s.e().unwrap();
    assert_eq!(s.tree.weight(e), 4);
    assert_eq!(s.tree.edge_mult(e, l), 2);
    assert_eq!(s.e_dot_d(), 2);
    assert_eq!(s.k_squared, 9);
    assert_eq!(s.h_phi, 0);
    assert_eq!(s.epsilon(), 2);
    assert_eq!(s.gamma(), -4);
    s.check_structure().unwrap();
}

#[test]
fn double_point_one_blowup() {
    let b = bp(&[(1, 1)], &[(1, 1)], true, 0);
    let s = build_resolution(&b, false).unwrap();
    assert_eq!(s.multiplicities, vec![2]);
    assert_eq!(s.tree.weight(s.e().unwrap()), 0);
    assert_eq!(-s.tree.weight(s.e().unwrap()), gamma_prime_b(&b));
}

#[test]
fn exceptional_weights_negative_and_tree_shape() {
    let b = bp(&[(9, 6), (3, 1)], &[(6, 4), (2, 1)], true, 1);
    let s = build_resolution(&b, false).unwrap();
    s.check_structure().unwrap();
    let l = s.tree.find_tag(Tag::LineAtInfinity).unwrap();
    for v in s.tree.d_ids() {
        if v != l {
            assert!(s.tree.weight(v) <= -1);
        }
    }
}

#[test]
fn simulation_matches_closed_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let b = random_branch_pair(&mut rng, 24);
        let s = build_resolution(&b, false).unwrap();
        let eff = s.branches.clone().unwrap();
        assert_eq!(s.multiplicity_sums(), closed_sums(&eff), "{b:?}");
        s.check_structure().unwrap();
        assert_eq!(s.k_dot_k_plus_d(), 6 - s.h_phi as i64);
        if s.virtual_points == 0 {
            assert_eq!(s.gamma(), gamma_prime_b(&eff), "{b:?}");
        }
    }
}

#[test]
fn minimalize_keeps_h_phi_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..500 {
        let b = random_branch_pair(&mut rng, 24);
        let s = build_resolution(&b, false).unwrap();
        let m = minimalize(&s).unwrap();
        assert_eq!(
            m.h_phi as i64,
            2 + m.epsilon() + m.gamma() + m.h_psi as i64
        );
        if !m.e_touched {
            assert_eq!(m.gamma(), s.gamma());
        }
    }
}

#[test]
fn minimalize_contracts_l_inf_tip() {
    // (2,1) from L∞ leaves L∞ a (−1)-tip
    let b = bp(&[(2, 1)], &[(2, 1)], true, 0);
    let s = build_resolution(&b, false).unwrap();
    let l = s.tree.find_tag(Tag::LineAtInfinity).unwrap();
    assert_eq!(s.tree.weight(l), -1);
    let m = minimalize(&s).unwrap();
    assert!(!m.tree.contains(l));
    assert!(m.h_psi >= 1);
}

#[test]
fn two_reduction_identity_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..300 {
        let b = random_branch_pair(&mut rng, 24);
        let s = minimalize(&build_resolution(&b, false).unwrap()).unwrap();
        let r = two_reduction(&s).unwrap();
        assert_eq!(r.lhs, r.rhs());
        assert_eq!(r.basic_slack(), r.lhs - 1);
    }
}

#[test]
fn no_eligible_curve_is_identity() {
    let mut t = WeightedTree::chain(&[-2, -3]);
    let e = t.add_vertex(-2, Some(Tag::E));
    t.add_edge(e, 0).unwrap();
    t.add_edge(e, 1).unwrap();
    let s = Scene::from_tree(t.clone(), 7, false).unwrap();
    let r = two_reduction(&s).unwrap();
    assert_eq!(r.t, 0);
    assert_eq!(r.tree, t);
}

#[test]
fn sprouting_contraction_with_minus_two_twig_counts() {
    // (−1)-curve non-branching in D, meeting E once, carrying a (−2)-twig
    let mut t = WeightedTree::chain(&[-2, -2, -1, -3]);
    let e = t.add_vertex(-3, Some(Tag::E));
    t.add_edge(e, 2).unwrap();
    t.add_edge(e, 3).unwrap();
    let s = Scene::from_tree(t, 5, false).unwrap();
    let r = two_reduction(&s).unwrap();
    assert!(r.t >= 1);
    assert_eq!(r.lhs, r.rhs());
}

#[test]
fn basic_inequality_arithmetic() {
    let red = |gamma, epsilon, t| TwoReduced {
        tree: WeightedTree::new(),
        k_squared: 0,
        t,
        contracted: vec![],
        gamma,
        epsilon,
        lhs: 0,
    };
    // γ = 9 leaves only ε = 0, t = 2
    for eps in 0..=3 {
        for t in 0..=2 {
            let ok = red(9, eps, t).basic_slack() >= 0;
            assert_eq!(ok, eps == 0 && t == 2);
        }
    }
    // γ = 7, ε = 1 needs t ≥ 2
    assert!(red(7, 1, 1).basic_slack() < 0);
    assert!(red(7, 1, 2).basic_slack() >= 0);
    assert!(check_basic_inequality(&red(9, 0, 1), true).is_err());
    assert!(!check_basic_inequality(&red(9, 0, 1), false).unwrap().holds);
}

fn scene_with_twigs(twigs: &[&[i64]]) -> Scene {
    // a (−1) hub in D joined to every twig, E meeting the hub twice
    let mut t = WeightedTree::new();
    let hub = t.add_vertex(-1, None);
    for tw in twigs {
        let mut prev = hub;
        for &w in tw.iter().rev() {
            let v = t.add_vertex(w, None);
            t.add_edge(prev, v).unwrap();
            prev = v;
        }
    }
    let e = t.add_vertex(-1, Some(Tag::E));
    t.add_edge(e, hub).unwrap();
    t.add_edge(e, hub).unwrap();
    Scene::from_tree(t, 0, false).unwrap()
}

#[test]
fn sum_ei_examples() {
    let mut eleven = vec![-2i64; 11];
    eleven[10] = -2;
    let s = scene_with_twigs(&[&[-3], &eleven]);
    assert_eq!(sum_ei(&s).unwrap(), BigRational::new(BigInt::from(5), BigInt::from(4)));
    let s = scene_with_twigs(&[&[-2, -2], &[-2, -2]]);
    assert_eq!(sum_ei(&s).unwrap(), BigRational::new(BigInt::from(4), BigInt::from(3)));
    let s = scene_with_twigs(&[]);
    assert_eq!(sum_ei(&s).unwrap(), BigRational::zero());
}

#[test]
fn elementary_cases() {
    // l = 1, second pair (c,c): centres on A off C
    let b = bp(&[(4, 2), (2, 2), (2, 1)], &[(4, 2), (2, 2), (2, 1)], true, 2);
    let s = build_resolution(&b, false).unwrap();
    let o = elementary_transformation(&s, 1).unwrap();
    assert_eq!(o.case, ElementaryCase::OffCSingle);
    assert!(o.d_dagger_components < o.d_prime_components);

    // l = 2
    let b = bp(&[(6, 4), (2, 2), (2, 1)], &[(6, 4), (2, 2), (2, 1)], true, 2);
    let s = build_resolution(&b, false).unwrap();
    let o = elementary_transformation(&s, 2).unwrap();
    assert_eq!(o.case, ElementaryCase::OffC);

    // c₂ > p₂: a centre on A ∩ C
    let b = bp(&[(9, 6), (3, 1)], &[(9, 6), (3, 1)], true, 1);
    let s = build_resolution(&b, false).unwrap();
    let o = elementary_transformation(&s, 2).unwrap();
    assert_eq!(o.case, ElementaryCase::OnC);
}

#[test]
fn elementary_rejects_wrong_pattern() {
    let b = bp(&[(3, 1)], &[(3, 1)], true, 1);
    let s = build_resolution(&b, false).unwrap();
    assert!(matches!(
        elementary_transformation(&s, 1),
        Err(ResolutionError::Pattern(_))
    ));
}
