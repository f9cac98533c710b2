use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{GraphError, VertexId, WeightedTree};

/// Intersection matrix Q of the components listed in `subset`, in that order
/// (duplicates removed, first occurrence kept).
pub fn intersection_matrix(
    tree: &WeightedTree,
    subset: &[VertexId],
) -> Result<Vec<Vec<i64>>, GraphError> {
    let ids = dedup(tree, subset)?;
    Ok(ids
        .iter()
        .map(|&a| {
            ids.iter()
                .map(|&b| {
                    if a == b {
                        tree.weight(a)
                    } else {
                        tree.edge_mult(a, b) as i64
                    }
                })
                .collect()
        })
        .collect())
}

fn dedup(tree: &WeightedTree, subset: &[VertexId]) -> Result<Vec<VertexId>, GraphError> {
    let mut seen = BTreeSet::new();
    let mut ids = Vec::with_capacity(subset.len());
    for &v in subset {
        if !tree.contains(v) {
            return Err(GraphError::InvalidSubset(v));
        }
        if seen.insert(v) {
            ids.push(v);
        }
    }
    Ok(ids)
}

/// d(T) = det(−Q(T)); the empty divisor has d = 1.
pub fn determinant(tree: &WeightedTree, subset: &[VertexId]) -> Result<BigInt, GraphError> {
    let q = intersection_matrix(tree, subset)?;
    let neg: Vec<Vec<BigInt>> = q
        .iter()
        .map(|row| row.iter().map(|&x| BigInt::from(-x)).collect())
        .collect();
    Ok(bareiss_det(neg))
}

/// Fraction-free Gaussian elimination (Bareiss) with row pivoting.
pub fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

/// Sylvester's criterion on −Q: every leading principal minor is positive.
pub fn is_negative_definite(tree: &WeightedTree, subset: &[VertexId]) -> Result<bool, GraphError> {
    let ids = dedup(tree, subset)?;
    for k in 1..=ids.len() {
        if !determinant(tree, &ids[..k])?.is_positive() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all(t: &WeightedTree) -> Vec<VertexId> {
        t.ids().collect()
    }

    #[test]
    fn single_vertex_matrix() {
        let t = WeightedTree::chain(&[-2]);
        assert_eq!(intersection_matrix(&t, &[0]).unwrap(), vec![vec![-2]]);
    }

    #[test]
    fn path_matrix() {
        let t = WeightedTree::chain(&[-2, -3]);
        assert_eq!(
            intersection_matrix(&t, &[0, 1]).unwrap(),
            vec![vec![-2, 1], vec![1, -3]]
        );
    }

    #[test]
    fn unknown_id_is_invalid_subset() {
        let t = WeightedTree::chain(&[-2]);
        assert_eq!(
            intersection_matrix(&t, &[7]),
            Err(GraphError::InvalidSubset(7))
        );
    }

    #[test]
    fn empty_determinant_is_one() {
        let t = WeightedTree::chain(&[-2]);
        assert_eq!(determinant(&t, &[]).unwrap(), BigInt::one());
    }

    #[test]
    fn single_vertex_determinants() {
        for w in [-9i64, -5, -2] {
            let t = WeightedTree::chain(&[w]);
            assert_eq!(determinant(&t, &[0]).unwrap(), BigInt::from(-w));
        }
    }

    #[test]
    fn minus_three_then_twelve_minus_two() {
        let mut w = vec![-3];
        w.extend(std::iter::repeat_n(-2, 12));
        let t = WeightedTree::chain(&w);
        assert_eq!(determinant(&t, &all(&t)).unwrap(), BigInt::from(27));
    }

    #[test]
    fn a_n_chain_determinant() {
        for n in 1..10 {
            let t = WeightedTree::chain(&vec![-2; n]);
            assert_eq!(determinant(&t, &all(&t)).unwrap(), BigInt::from(n as i64 + 1));
        }
    }

    #[test]
    fn bareiss_handles_zero_pivot() {
        let m = vec![
            vec![BigInt::from(0), BigInt::from(1)],
            vec![BigInt::from(1), BigInt::from(0)],
        ];
        assert_eq!(bareiss_det(m), BigInt::from(-1));
    }

    #[test]
    fn negative_definite_a2() {
        let t = WeightedTree::chain(&[-2, -2]);
        assert!(is_negative_definite(&t, &[0, 1]).unwrap());
        let t = WeightedTree::chain(&[-1, -1]);
        assert!(!is_negative_definite(&t, &[0, 1]).unwrap());
    }
}
