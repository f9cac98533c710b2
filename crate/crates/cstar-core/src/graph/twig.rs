use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{determinant, GraphError, VertexId, WeightedTree};

/// An ordered path inside a tree; `ids[0]` is the tip end R₁.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    ids: Vec<VertexId>,
}

impl Chain {
    pub fn new(tree: &WeightedTree, ids: Vec<VertexId>) -> Result<Self, GraphError> {
        if ids.is_empty() {
            return Err(GraphError::NotAChain("empty".into()));
        }
        for &v in &ids {
            tree.require(v).map_err(|_| GraphError::InvalidSubset(v))?;
        }
        for w in ids.windows(2) {
            if tree.edge_mult(w[0], w[1]) != 1 {
                return Err(GraphError::NotAChain(format!("{} and {} not adjacent", w[0], w[1])));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        if !ids.iter().all(|v| seen.insert(*v)) {
            return Err(GraphError::NotAChain("repeated vertex".into()));
        }
        for (i, &v) in ids.iter().enumerate() {
            for (j, &u) in ids.iter().enumerate() {
                if i + 1 < j && tree.edge_mult(v, u) > 0 {
                    return Err(GraphError::NotAChain(format!("chord {v}—{u}")));
                }
            }
        }
        Ok(Self { ids })
    }

    /// Whole-tree chain; the tree must be a path and `tip` one of its ends.
    pub fn of_path(tree: &WeightedTree, tip: VertexId) -> Result<Self, GraphError> {
        let mut ids = vec![tip];
        let mut prev = None;
        let mut cur = tip;
        loop {
            let next: Vec<VertexId> = tree
                .neighbors(cur)
                .map(|(n, _)| n)
                .filter(|&n| Some(n) != prev)
                .collect();
            match next.as_slice() {
                [] => break,
                [n] => {
                    prev = Some(cur);
                    cur = *n;
                    ids.push(cur);
                }
                _ => return Err(GraphError::NotAChain(format!("vertex {cur} branches"))),
            }
        }
        Self::new(tree, ids)
    }

    pub fn ids(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn tip(&self) -> VertexId {
        self.ids[0]
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn weights(&self, tree: &WeightedTree) -> Vec<i64> {
        self.ids.iter().map(|&v| tree.weight(v)).collect()
    }

    pub fn is_admissible(&self, tree: &WeightedTree) -> bool {
        self.ids.iter().all(|&v| tree.weight(v) <= -2)
    }
}

/// e(R) = d(R₂+…+R_s)/d(R) for an admissible chain with tip R₁.
pub fn capacity(tree: &WeightedTree, chain: &Chain) -> Result<BigRational, GraphError> {
    if let Some(&v) = chain.ids.iter().find(|&&v| tree.weight(v) > -2) {
        return Err(GraphError::NotAdmissible(v, tree.weight(v)));
    }
    let num = determinant(tree, &chain.ids[1..])?;
    let den = determinant(tree, &chain.ids)?;
    Ok(BigRational::new(num, den))
}

/// Rational divisor supported on a tree.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DivisorQ {
    pub coefficients: BTreeMap<VertexId, BigRational>,
}

impl DivisorQ {
    pub fn coefficient(&self, v: VertexId) -> BigRational {
        self.coefficients.get(&v).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn self_intersection(&self, tree: &WeightedTree) -> BigRational {
        let mut s = BigRational::zero();
        for (&a, qa) in &self.coefficients {
            for (&b, qb) in &self.coefficients {
                let ab = if a == b {
                    tree.weight(a)
                } else {
                    tree.edge_mult(a, b) as i64
                };
                s += qa * qb * BigRational::from_integer(BigInt::from(ab));
            }
        }
        s
    }

    /// Intersection number with the component `v`.
    pub fn dot_component(&self, tree: &WeightedTree, v: VertexId) -> BigRational {
        let mut s = BigRational::zero();
        for (&a, qa) in &self.coefficients {
            let av = if a == v {
                tree.weight(a)
            } else {
                tree.edge_mult(a, v) as i64
            };
            s += qa * BigRational::from_integer(BigInt::from(av));
        }
        s
    }
}

/// Maximal twigs: chains of non-branching components starting at a tip and
/// stopping before a branching component. A twig never contains E; a
/// component that is itself a chain has no twigs.
pub fn maximal_twigs(tree: &WeightedTree) -> Vec<Chain> {
    let mut out = Vec::new();
    for tip in tree.ids() {
        if tree.is_e(tip) || tree.degree(tip) != 1 {
            continue;
        }
        let mut ids = vec![tip];
        let mut prev = tip;
        let mut cur = tip;
        let keep = loop {
            let next = tree
                .neighbors(cur)
                .map(|(n, _)| n)
                .find(|&n| n != prev && n != cur)
                .or_else(|| {
                    if cur == tip {
                        tree.neighbors(cur).map(|(n, _)| n).next()
                    } else {
                        None
                    }
                });
            let Some(next) = next else { break false };
            if tree.is_e(next) || tree.degree(next) >= 3 {
                break true;
            }
            if tree.degree(next) == 1 {
                break false;
            }
            ids.push(next);
            prev = cur;
            cur = next;
        };
        if keep {
            out.push(Chain { ids });
        }
    }
    out
}

/// The bark of a tree together with its twig data.
#[derive(Clone, Debug)]
pub struct Bark {
    pub divisor: DivisorQ,
    pub twigs: Vec<Chain>,
    pub capacities: Vec<BigRational>,
    pub self_intersection: BigRational,
}

impl Bark {
    pub fn sum_capacities(&self) -> BigRational {
        self.capacities.iter().fold(BigRational::zero(), |a, b| a + b)
    }
}

/// Solves Bk·Tᵢ = (K+T)·Tᵢ on every maximal twig. For a rational component,
/// (K+T)·Tᵢ = deg(Tᵢ) − 2, so the right-hand side is −1 at a tip and 0 inside.
pub fn bark_divisor(tree: &WeightedTree) -> Result<Bark, GraphError> {
    let twigs = maximal_twigs(tree);
    let mut divisor = DivisorQ::default();
    let mut capacities = Vec::new();
    for tw in &twigs {
        let n = tw.len();
        let mut a: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); n]; n];
        let mut b = vec![BigRational::zero(); n];
        for (i, &v) in tw.ids.iter().enumerate() {
            for (j, &u) in tw.ids.iter().enumerate() {
                let x = if i == j {
                    tree.weight(v)
                } else {
                    tree.edge_mult(v, u) as i64
                };
                a[i][j] = BigRational::from_integer(BigInt::from(x));
            }
            b[i] = BigRational::from_integer(BigInt::from(tree.degree(v) as i64 - 2));
        }
        let q = solve(a, b).ok_or(GraphError::SingularTwig)?;
        for (i, &v) in tw.ids.iter().enumerate() {
            divisor.coefficients.insert(v, q[i].clone());
        }
        capacities.push(capacity(tree, tw)?);
    }
    let self_intersection = divisor.self_intersection(tree);
    Ok(Bark {
        divisor,
        twigs,
        capacities,
        self_intersection,
    })
}

fn solve(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).find(|&i| !a[i][k].is_zero())?;
        a.swap(k, p);
        b.swap(k, p);
        let piv = a[k][k].clone();
        for j in k..n {
            a[k][j] = &a[k][j] / &piv;
        }
        b[k] = &b[k] / &piv;
        for i in 0..n {
            if i != k && !a[i][k].is_zero() {
                let f = a[i][k].clone();
                for j in k..n {
                    let d = &f * &a[k][j];
                    a[i][j] -= d;
                }
                let d = &f * &b[k];
                b[i] -= d;
            }
        }
    }
    debug_assert!(a.iter().enumerate().all(|(i, r)| r[i].is_one()));
    Some(b)
}
