use serde::{Deserialize, Serialize};

use super::{GraphError, Tag, VertexId, WeightedTree};

/// Where a blowup is centred.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlowupSite {
    /// A point on exactly one component.
    Vertex(VertexId),
    /// The intersection point of two adjacent components.
    Edge(VertexId, VertexId),
    /// A point off the divisor.
    FreePoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlowupKind {
    Sprouting,
    Subdivisional,
    Free,
}

/// Blows up `site`, returning the new tree, the kind and the new vertex id.
pub fn blow_up(
    tree: &WeightedTree,
    site: BlowupSite,
) -> Result<(WeightedTree, BlowupKind, VertexId), GraphError> {
    let mut t = tree.clone();
    let f = t.add_vertex(-1, Some(Tag::DComponent));
    let kind = match site {
        BlowupSite::Vertex(v) => {
            tree.require(v)
                .map_err(|_| GraphError::InvalidSite(format!("vertex {v}")))?;
            t.set_weight(v, tree.weight(v) - 1);
            t.add_edge(v, f)?;
            BlowupKind::Sprouting
        }
        BlowupSite::Edge(a, b) => {
            if tree.edge_mult(a, b) == 0 {
                return Err(GraphError::InvalidSite(format!("no edge {a}—{b}")));
            }
            t.remove_edge(a, b)?;
            t.set_weight(a, tree.weight(a) - 1);
            t.set_weight(b, tree.weight(b) - 1);
            t.add_edge(a, f)?;
            t.add_edge(f, b)?;
            BlowupKind::Subdivisional
        }
        BlowupSite::FreePoint => BlowupKind::Free,
    };
    Ok((t, kind, f))
}

/// Contracts a (−1)-curve meeting at most two other points of the divisor.
/// Subdivisional iff it had two intersection points, free iff none.
pub fn blow_down(
    tree: &WeightedTree,
    v: VertexId,
) -> Result<(WeightedTree, BlowupKind), GraphError> {
    tree.require(v)?;
    if tree.weight(v) != -1 {
        return Err(GraphError::NotContractible(
            v,
            format!("weight {} ≠ −1", tree.weight(v)),
        ));
    }
    let deg = tree.degree(v);
    if deg > 2 {
        return Err(GraphError::NotContractible(v, format!("degree {deg} > 2")));
    }
    if tree.neighbors(v).any(|(_, m)| m > 1) {
        return Err(GraphError::NotContractible(
            v,
            "meets one component twice".into(),
        ));
    }
    let t = contract(tree, v)?;
    let kind = match deg {
        2 => BlowupKind::Subdivisional,
        1 => BlowupKind::Sprouting,
        _ => BlowupKind::Free,
    };
    Ok((t, kind))
}

/// Contracts a (−1)-vertex of any degree: every neighbour X gains
/// (X·v)² in weight and any two neighbours X, Y gain (X·v)(Y·v) common points.
pub fn contract(tree: &WeightedTree, v: VertexId) -> Result<WeightedTree, GraphError> {
    tree.require(v)?;
    if tree.weight(v) != -1 {
        return Err(GraphError::NotContractible(
            v,
            format!("weight {} ≠ −1", tree.weight(v)),
        ));
    }
    let nbrs: Vec<(VertexId, u32)> = tree.neighbors(v).collect();
    let mut t = tree.clone();
    t.remove_vertex(v)?;
    for &(x, m) in &nbrs {
        t.set_weight(x, t.weight(x) + (m * m) as i64);
    }
    for (i, &(x, mx)) in nbrs.iter().enumerate() {
        for &(y, my) in &nbrs[i + 1..] {
            for _ in 0..mx * my {
                t.add_edge(x, y)?;
            }
        }
    }
    Ok(t)
}

/// K·(K+T) recomputed from scratch: K² + Σ_{v∈T} K·v with K·v = −2 − v².
pub fn kk_plus_t(tree: &WeightedTree, subset: &[VertexId], k_squared: i64) -> Result<i64, GraphError> {
    let mut s = k_squared;
    for &v in subset {
        tree.require(v).map_err(|_| GraphError::InvalidSubset(v))?;
        s += -2 - tree.weight(v);
    }
    Ok(s)
}

/// A boundary tree T together with K² and an incrementally maintained
/// K·(K+T) counter (T = all vertices).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrackedSurface {
    pub tree: WeightedTree,
    pub k_squared: i64,
    pub kk_counter: i64,
}

impl TrackedSurface {
    pub fn new(tree: WeightedTree, k_squared: i64) -> Self {
        let ids: Vec<VertexId> = tree.ids().collect();
        let kk_counter = kk_plus_t(&tree, &ids, k_squared).expect("own ids");
        Self {
            tree,
            k_squared,
            kk_counter,
        }
    }

    pub fn blow_up(&mut self, site: BlowupSite) -> Result<(BlowupKind, VertexId), GraphError> {
        let (t, kind, f) = blow_up(&self.tree, site)?;
        self.tree = t;
        self.k_squared -= 1;
        self.kk_counter += match kind {
            BlowupKind::Sprouting => -1,
            BlowupKind::Subdivisional => 0,
            BlowupKind::Free => -2,
        };
        Ok((kind, f))
    }

    pub fn blow_down(&mut self, v: VertexId) -> Result<BlowupKind, GraphError> {
        let (t, kind) = blow_down(&self.tree, v)?;
        self.tree = t;
        self.k_squared += 1;
        self.kk_counter += match kind {
            BlowupKind::Sprouting => 1,
            BlowupKind::Subdivisional => 0,
            BlowupKind::Free => 2,
        };
        Ok(kind)
    }

    pub fn recompute(&self) -> i64 {
        let ids: Vec<VertexId> = self.tree.ids().collect();
        kk_plus_t(&self.tree, &ids, self.k_squared).expect("own ids")
    }

    /// Hard error when the counter and the recomputation disagree.
    pub fn check(&self) -> Result<(), GraphError> {
        let recomputed = self.recompute();
        if recomputed != self.kk_counter {
            return Err(GraphError::CounterMismatch {
                counter: self.kk_counter,
                recomputed,
            });
        }
        Ok(())
    }
}

/// Outcome of NC-minimalization of D with respect to E.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NcResult {
    pub tree: WeightedTree,
    /// Contractions that were sprouting with respect to D.
    pub h_psi: u32,
    pub e_touched: bool,
    pub contracted: Vec<VertexId>,
}

/// (−1)-components of D that are non-branching in D+E and whose
/// contraction keeps D+E simple normal crossing.
fn nc_eligible(tree: &WeightedTree) -> Vec<VertexId> {
    tree.ids()
        .filter(|&v| {
            !tree.is_e(v)
                && tree.weight(v) == -1
                && tree.degree(v) <= 2
                && tree.neighbors(v).all(|(_, m)| m == 1)
        })
        .collect()
}

/// Contracts the lowest-id eligible vertex until none is left.
pub fn nc_minimalize(tree: &WeightedTree) -> NcResult {
    nc_minimalize_with(tree, |c| c[0])
}

/// As [`nc_minimalize`], with `pick` choosing among the eligible vertices.
pub fn nc_minimalize_with(
    tree: &WeightedTree,
    mut pick: impl FnMut(&[VertexId]) -> VertexId,
) -> NcResult {
    let mut t = tree.clone();
    let mut h_psi = 0;
    let mut e_touched = false;
    let mut contracted = Vec::new();
    loop {
        let cands = nc_eligible(&t);
        if cands.is_empty() {
            break;
        }
        let v = pick(&cands);
        if t.degree_in_d(v) <= 1 {
            h_psi += 1;
        }
        if t.neighbors(v).any(|(n, _)| t.is_e(n)) {
            e_touched = true;
        }
        t = contract(&t, v).expect("eligible vertex has weight −1");
        contracted.push(v);
    }
    NcResult {
        tree: t,
        h_psi,
        e_touched,
        contracted,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_blowup_lowers_both_ends() {
        let t = WeightedTree::chain(&[-2, -3]);
        let (u, kind, f) = blow_up(&t, BlowupSite::Edge(0, 1)).unwrap();
        assert_eq!(kind, BlowupKind::Subdivisional);
        assert_eq!((u.weight(0), u.weight(1), u.weight(f)), (-3, -4, -1));
        assert_eq!(u.edge_mult(0, 1), 0);
        assert_eq!(u.edge_mult(0, f) + u.edge_mult(f, 1), 2);
    }

    #[test]
    fn vertex_blowup_on_zero_curve() {
        let t = WeightedTree::chain(&[0]);
        let (u, kind, f) = blow_up(&t, BlowupSite::Vertex(0)).unwrap();
        assert_eq!(kind, BlowupKind::Sprouting);
        assert_eq!((u.weight(0), u.weight(f)), (-1, -1));
        assert_eq!(u.edge_mult(0, f), 1);
    }

    #[test]
    fn free_blowup_adds_isolated_vertex() {
        let t = WeightedTree::chain(&[1]);
        let (u, kind, f) = blow_up(&t, BlowupSite::FreePoint).unwrap();
        assert_eq!(kind, BlowupKind::Free);
        assert_eq!(u.degree(f), 0);
    }

    #[test]
    fn invalid_site() {
        let t = WeightedTree::chain(&[-2, -2, -2]);
        assert!(matches!(
            blow_up(&t, BlowupSite::Edge(0, 2)),
            Err(GraphError::InvalidSite(_))
        ));
        assert!(matches!(
            blow_up(&t, BlowupSite::Vertex(9)),
            Err(GraphError::InvalidSite(_))
        ));
    }

    #[test]
    fn blow_down_between_two() {
        let t = WeightedTree::chain(&[-3, -1, -4]);
        let (u, kind) = blow_down(&t, 1).unwrap();
        assert_eq!(kind, BlowupKind::Subdivisional);
        assert_eq!((u.weight(0), u.weight(2)), (-2, -3));
        assert_eq!(u.edge_mult(0, 2), 1);
    }

    #[test]
    fn blow_down_leaf() {
        let t = WeightedTree::chain(&[-5, -1]);
        let (u, kind) = blow_down(&t, 1).unwrap();
        assert_eq!(kind, BlowupKind::Sprouting);
        assert_eq!(u.weight(0), -4);
    }

    #[test]
    fn blow_down_errors() {
        let t = WeightedTree::chain(&[-2, -2]);
        assert!(matches!(
            blow_down(&t, 0),
            Err(GraphError::NotContractible(0, _))
        ));
        let mut t = WeightedTree::new();
        let c = t.add_vertex(-1, None);
        for _ in 0..3 {
            let v = t.add_vertex(-2, None);
            t.add_edge(c, v).unwrap();
        }
        assert!(matches!(
            blow_down(&t, c),
            Err(GraphError::NotContractible(_, _))
        ));
    }

    #[test]
    fn three_subdivisional_blowups_keep_counter() {
        let mut s = TrackedSurface::new(WeightedTree::chain(&[1, 0]), 8);
        let before = s.kk_counter;
        let (_, f) = s.blow_up(BlowupSite::Edge(0, 1)).unwrap();
        assert_eq!(s.kk_counter, before);
        let (_, g) = s.blow_up(BlowupSite::Edge(0, f)).unwrap();
        assert_eq!(s.kk_counter, before);
        s.blow_up(BlowupSite::Edge(g, f)).unwrap();
        assert_eq!(s.kk_counter, before);
        s.check().unwrap();
    }

    #[test]
    fn sprouting_blowdown_adds_one() {
        let mut s = TrackedSurface::new(WeightedTree::chain(&[-3, -1]), 5);
        let before = s.kk_counter;
        assert_eq!(s.blow_down(1).unwrap(), BlowupKind::Sprouting);
        assert_eq!(s.kk_counter, before + 1);
        s.check().unwrap();
    }

    #[test]
    fn blowup_then_blowdown_is_identity() {
        let t = WeightedTree::chain(&[-2, -3, 1]);
        for site in [BlowupSite::Edge(1, 2), BlowupSite::Vertex(0)] {
            let mut s = TrackedSurface::new(t.clone(), 3);
            let before = s.clone();
            let (_, f) = s.blow_up(site).unwrap();
            s.blow_down(f).unwrap();
            assert_eq!(s, before);
        }
    }

    #[test]
    fn free_blowup_then_blowdown_restores_counter() {
        let mut s = TrackedSurface::new(WeightedTree::chain(&[1]), 9);
        let before = s.kk_counter;
        let (kind, f) = s.blow_up(BlowupSite::FreePoint).unwrap();
        assert_eq!(kind, BlowupKind::Free);
        assert_eq!(s.blow_down(f).unwrap(), BlowupKind::Free);
        assert_eq!(s.kk_counter, before);
        s.check().unwrap();
    }

    #[test]
    fn nc_minimal_tree_unchanged() {
        let t = WeightedTree::chain(&[-2, -3, -2]);
        let r = nc_minimalize(&t);
        assert_eq!(r.tree, t);
        assert_eq!(r.h_psi, 0);
    }

    #[test]
    fn cascading_contraction() {
        // −1 tip on a −2 on a −2, all hanging off a −3 branching vertex with E.
        let t = WeightedTree::from_parts(
            &[
                (0, -1, None),
                (1, -2, None),
                (2, -2, None),
                (3, -3, None),
                (4, -5, None),
                (5, -7, Some(Tag::E)),
            ],
            &[(0, 1), (1, 2), (2, 3), (3, 4), (3, 5), (4, 5)],
        )
        .unwrap();
        let r = nc_minimalize(&t);
        assert_eq!(r.contracted, vec![0, 1, 2]);
        assert_eq!(r.h_psi, 3);
        assert!(!r.e_touched);
        assert_eq!(r.tree.weight(3), -2);
    }
}
