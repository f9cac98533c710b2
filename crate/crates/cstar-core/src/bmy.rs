//! The logarithmic Bogomolov-Miyaoka-Yau inequality in Langer's form, for
//! boundaries whose contractible parts are chains.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{classify_contractible, determinant, ContractibilityClass, GraphError, VertexId, WeightedTree};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BmyError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("component is not contractible")]
    NotContractible,
    #[error("local group order of a {0:?} point is not supported (only cyclic quotients)")]
    Unsupported(ContractibilityClass),
    #[error("invalid determinant {0}: contractible components have d ≥ 2")]
    BadDeterminant(i64),
    #[error("γ = {0} outside [6, 8]")]
    GammaRange(i64),
    #[error("instance: {0}")]
    Parse(String),
}

/// Order of the local fundamental group at the point obtained by contracting
/// `subset`: d(subset) for an admissible chain.
pub fn local_group_order(tree: &WeightedTree, subset: &[VertexId]) -> Result<BigInt, BmyError> {
    match classify_contractible(tree, subset)? {
        ContractibilityClass::AdmissibleChain => Ok(determinant(tree, subset)?),
        ContractibilityClass::NotContractible => Err(BmyError::NotContractible),
        fork => Err(BmyError::Unsupported(fork)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BmyComponent {
    /// A chain given by its weights.
    Chain { weights: Vec<i64> },
    /// A component given by its determinant and class.
    Known {
        determinant: i64,
        class: ContractibilityClass,
    },
}

impl BmyComponent {
    pub fn group_order(&self) -> Result<BigInt, BmyError> {
        match self {
            BmyComponent::Chain { weights } => {
                let t = WeightedTree::chain(weights);
                let ids: Vec<VertexId> = t.ids().collect();
                local_group_order(&t, &ids)
            }
            BmyComponent::Known { determinant, class } => match class {
                ContractibilityClass::AdmissibleChain if *determinant >= 2 => {
                    Ok(BigInt::from(*determinant))
                }
                ContractibilityClass::AdmissibleChain => Err(BmyError::BadDeterminant(*determinant)),
                ContractibilityClass::NotContractible => Err(BmyError::NotContractible),
                fork => Err(BmyError::Unsupported(*fork)),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BmyInstance {
    pub chi_open: i64,
    #[serde(default)]
    pub components: Vec<BmyComponent>,
    /// ((K+D)⁺)², written as an integer or "a/b".
    #[serde(with = "rational_str")]
    pub p_squared: BigRational,
}

mod rational_str {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::Number(n) => n
                .as_i64()
                .map(|i| BigRational::from_integer(BigInt::from(i)))
                .ok_or_else(|| de::Error::custom("pSquared must be an integer or \"a/b\"")),
            serde_json::Value::String(s) => s.trim().parse().map_err(de::Error::custom),
            _ => Err(de::Error::custom("pSquared must be an integer or \"a/b\"")),
        }
    }
}

impl BmyInstance {
    pub fn from_json_str(s: &str) -> Result<Self, BmyError> {
        serde_json::from_str(s).map_err(|e| BmyError::Parse(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BmyReport {
    pub group_orders: Vec<String>,
    pub sum_inverse_orders: String,
    pub lhs: String,
    pub rhs: String,
    pub slack: String,
    pub holds: bool,
    #[serde(skip)]
    pub slack_value: BigRational,
}

/// ((K+D)⁺)² ≤ 3(χ + Σ 1/|Gᵢ|), evaluated exactly.
pub fn check_bmy(instance: &BmyInstance) -> Result<BmyReport, BmyError> {
    let orders: Vec<BigInt> = instance
        .components
        .iter()
        .map(BmyComponent::group_order)
        .collect::<Result<_, _>>()?;
    let inv: BigRational = orders
        .iter()
        .map(|g| BigRational::new(BigInt::one(), g.clone()))
        .fold(BigRational::zero(), |a, b| a + b);
    let rhs = BigRational::from_integer(BigInt::from(3))
        * (BigRational::from_integer(BigInt::from(instance.chi_open)) + &inv);
    let slack = &rhs - &instance.p_squared;
    Ok(BmyReport {
        group_orders: orders.iter().map(|g| g.to_string()).collect(),
        sum_inverse_orders: inv.to_string(),
        lhs: instance.p_squared.to_string(),
        rhs: rhs.to_string(),
        slack: slack.to_string(),
        holds: !slack.is_negative(),
        slack_value: slack,
    })
}

/// All (d₁, d₂) with 2 ≤ dᵢ ≤ `bound` and 1/d₁ + 1/d₂ + 1/γ ≥ 1.
pub fn enumerate_4_14_bounded(gamma: i64, bound: i64) -> Result<Vec<(i64, i64)>, BmyError> {
    if !(6..=8).contains(&gamma) {
        return Err(BmyError::GammaRange(gamma));
    }
    let mut out = Vec::new();
    for d1 in 2..=bound {
        for d2 in 2..=bound {
            // 1/d1 + 1/d2 + 1/γ ≥ 1  ⇔  d2·γ + d1·γ + d1·d2 ≥ d1·d2·γ
            if d2 * gamma + d1 * gamma + d1 * d2 >= d1 * d2 * gamma {
                out.push((d1, d2));
            }
        }
    }
    Ok(out)
}

/// As [`enumerate_4_14_bounded`] with dᵢ ≤ 12. Larger dᵢ cannot occur: with
/// the other term at most 1/2 and 1/γ ≤ 1/6, dᵢ ≤ 3 is forced.
pub fn enumerate_4_14(gamma: i64) -> Result<Vec<(i64, i64)>, BmyError> {
    enumerate_4_14_bounded(gamma, 12)
}

/// d of a fork with centre weight −b, two single (−2) branches and a third
/// branch of determinant n whose determinant without the vertex next to the
/// centre is ñ.
pub fn fork_22n_determinant(b: i64, n: i64, n_tilde: i64) -> i64 {
    4 * (n * (b - 1) - n_tilde)
}
