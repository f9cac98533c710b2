use std::collections::BTreeSet;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::{determinant, is_negative_definite, maximal_twigs, GraphError, VertexId, WeightedTree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContractibilityClass {
    AdmissibleChain,
    Fork22n,
    Fork233,
    Fork234,
    Fork235,
    NotContractible,
}

/// Fujita's shapes of a boundary component Q₀ with P·Q₀ = 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FujitaShape {
    ChainType,
    TwoBranchFourTips,
    FiniteFork,
}

enum Shape {
    Chain,
    Fork {
        center: VertexId,
        branches: Vec<Vec<VertexId>>,
    },
    Other,
}

fn shape(tree: &WeightedTree, set: &BTreeSet<VertexId>) -> Result<Shape, GraphError> {
    for &v in set {
        tree.require(v).map_err(|_| GraphError::InvalidSubset(v))?;
    }
    if tree.components_within(set).len() != 1 {
        return Err(GraphError::Disconnected);
    }
    let sub = tree.induced(set)?;
    if sub.edges().iter().any(|e| e.2 > 1) || sub.edge_count() as usize + 1 != sub.len() {
        return Ok(Shape::Other);
    }
    let branching: Vec<VertexId> = sub.ids().filter(|&v| sub.degree(v) >= 3).collect();
    match branching.as_slice() {
        [] => Ok(Shape::Chain),
        [c] if sub.degree(*c) == 3 => {
            let branches = sub
                .neighbors(*c)
                .map(|(start, _)| {
                    let mut path = vec![start];
                    let (mut prev, mut cur) = (*c, start);
                    while let Some((n, _)) = sub.neighbors(cur).find(|&(n, _)| n != prev) {
                        path.push(n);
                        prev = cur;
                        cur = n;
                    }
                    path
                })
                .collect();
            Ok(Shape::Fork {
                center: *c,
                branches,
            })
        }
        _ => Ok(Shape::Other),
    }
}

fn branch_dets(
    tree: &WeightedTree,
    branches: &[Vec<VertexId>],
) -> Result<Vec<BigInt>, GraphError> {
    let mut d: Vec<BigInt> = branches
        .iter()
        .map(|b| determinant(tree, b))
        .collect::<Result<_, _>>()?;
    d.sort();
    Ok(d)
}

/// Quotient-singularity test: admissible chain, or a fork whose branch
/// determinants are {2,2,n}, {2,3,3}, {2,3,4} or {2,3,5}, with negative
/// definiteness confirmed by leading principal minors.
pub fn classify_contractible(
    tree: &WeightedTree,
    subset: &[VertexId],
) -> Result<ContractibilityClass, GraphError> {
    let set: BTreeSet<VertexId> = subset.iter().copied().collect();
    let ids: Vec<VertexId> = set.iter().copied().collect();
    let class = match shape(tree, &set)? {
        Shape::Chain => {
            if ids.iter().all(|&v| tree.weight(v) <= -2) {
                ContractibilityClass::AdmissibleChain
            } else {
                ContractibilityClass::NotContractible
            }
        }
        Shape::Fork { center, branches } => {
            let admissible = branches.iter().flatten().all(|&v| tree.weight(v) <= -2)
                && tree.weight(center) < 0;
            if !admissible {
                ContractibilityClass::NotContractible
            } else {
                let d = branch_dets(tree, &branches)?;
                let small: Vec<i64> = d
                    .iter()
                    .map(|x| i64::try_from(x.clone()).unwrap_or(i64::MAX))
                    .collect();
                let class = match small.as_slice() {
                    [2, 2, n] if *n >= 2 => ContractibilityClass::Fork22n,
                    [2, 3, 3] => ContractibilityClass::Fork233,
                    [2, 3, 4] => ContractibilityClass::Fork234,
                    [2, 3, 5] => ContractibilityClass::Fork235,
                    _ => ContractibilityClass::NotContractible,
                };
                if class != ContractibilityClass::NotContractible
                    && !is_negative_definite(tree, &ids)?
                {
                    ContractibilityClass::NotContractible
                } else {
                    class
                }
            }
        }
        Shape::Other => ContractibilityClass::NotContractible,
    };
    if class != ContractibilityClass::NotContractible {
        assert!(
            is_negative_definite(tree, &ids)?,
            "contractible class must be negative definite"
        );
    }
    Ok(class)
}

/// Matches a connected subset against Fujita's P·Q₀ = 0 list: a chain, a tree
/// with exactly two branching components whose four maximal twigs are (−2)-tips,
/// or a fork with branch determinants (3,3,3), (2,4,4) or (2,3,6).
pub fn classify_fujita_zero(
    tree: &WeightedTree,
    subset: &[VertexId],
) -> Result<Option<FujitaShape>, GraphError> {
    let set: BTreeSet<VertexId> = subset.iter().copied().collect();
    match shape(tree, &set)? {
        Shape::Chain => return Ok(Some(FujitaShape::ChainType)),
        Shape::Fork { branches, .. } => {
            let d = branch_dets(tree, &branches)?;
            let small: Vec<i64> = d
                .iter()
                .map(|x| i64::try_from(x.clone()).unwrap_or(i64::MAX))
                .collect();
            if matches!(small.as_slice(), [3, 3, 3] | [2, 4, 4] | [2, 3, 6]) {
                return Ok(Some(FujitaShape::FiniteFork));
            }
            return Ok(None);
        }
        Shape::Other => {}
    }
    let sub = tree.induced(&set)?;
    if sub.edge_count() as usize + 1 != sub.len() {
        return Ok(None);
    }
    let branching = sub.ids().filter(|&v| sub.degree(v) >= 3).count();
    let twigs = maximal_twigs(&sub);
    let four_tips = twigs.len() == 4
        && sub.ids().filter(|&v| sub.degree(v) == 1).count() == 4
        && twigs
            .iter()
            .all(|t| t.len() == 1 && sub.weight(t.tip()) == -2);
    if branching == 2 && four_tips {
        Ok(Some(FujitaShape::TwoBranchFourTips))
    } else {
        Ok(None)
    }
}
