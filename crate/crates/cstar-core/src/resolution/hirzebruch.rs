use serde::{Deserialize, Serialize};

use crate::graph::{BlowupSite, Tag, TrackedSurface, VertexId, WeightedTree};

use super::{ResolutionError, Scene, Stage};

/// How the smooth rational curve E₀ sits against T₁ + T₂ on a Hirzebruch
/// surface, q = T₁ ∩ T₂.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HirzebruchConfig {
    /// E₀ meets T₁ only at p₁ (contact a) and T₂ only at p₂ (contact b).
    QNotInE0,
    /// E₀ tangent to T₁ at q (contact a), transversal to T₂ there, and meets
    /// T₂ again at p₂ with contact b − 1.
    QInE0MeetsT2Elsewhere,
    /// E₀ tangent to T₂ at q (contact b), transversal to T₁ there, and meets
    /// T₁ again at p₁ with contact a − 1.
    QInE0MeetsT1Elsewhere,
}

#[derive(Clone, Debug)]
pub struct HirzebruchScene {
    pub scene: Scene,
    pub t1: VertexId,
    pub t2: VertexId,
    /// Exceptional curves in creation order, grouped per point of E₀ ∩ T.
    pub exceptional: Vec<Vec<VertexId>>,
}

/// Rebuilds S̄ ⊃ D+E from T₁² = 0, T₂² = −n, a = T₁·E₀, b = T₂·E₀ by resolving
/// the tangencies of E₀ with T. Requires p_a(E₀) = 0, i.e.
/// (a−1)(an+2b−2) = 0.
pub fn hirzebruch_reconstruction(
    a: i64,
    b: i64,
    n: i64,
    config: HirzebruchConfig,
) -> Result<HirzebruchScene, ResolutionError> {
    if (a - 1) * (a * n + 2 * b - 2) != 0 {
        return Err(ResolutionError::Inconsistent(format!(
            "E₀ ~ (an+b)T₁ + aT₂ is not rational for a={a}, b={b}, n={n}"
        )));
    }
    let mut tree = WeightedTree::new();
    let t1 = tree.add_vertex(0, Some(Tag::DComponent));
    let t2 = tree.add_vertex(-n, Some(Tag::DComponent));
    tree.add_edge(t1, t2)?;
    let points: Vec<Vec<(VertexId, i64)>> = match config {
        HirzebruchConfig::QNotInE0 => vec![vec![(t1, a)], vec![(t2, b)]],
        HirzebruchConfig::QInE0MeetsT2Elsewhere => vec![vec![(t1, a), (t2, 1)], vec![(t2, b - 1)]],
        HirzebruchConfig::QInE0MeetsT1Elsewhere => vec![vec![(t1, 1), (t2, b)], vec![(t1, a - 1)]],
    };
    if points.iter().flatten().any(|&(_, c)| c < 1) {
        return Err(ResolutionError::Inconsistent(format!(
            "{config:?} needs positive local contacts, got a={a}, b={b}"
        )));
    }
    let mut surface = TrackedSurface::new(tree, 8);
    let mut blowups = 0;
    let mut ends = Vec::new();
    let mut exceptional = Vec::new();
    for mut contacts in points {
        let mut created = Vec::new();
        while !(contacts.len() == 1 && contacts[0].1 == 1) {
            let mut curves: Vec<VertexId> = contacts.iter().map(|x| x.0).collect();
            curves.sort();
            let site = match curves.as_slice() {
                [v] => BlowupSite::Vertex(*v),
                [x, y] => BlowupSite::Edge(*x, *y),
                _ => return Err(ResolutionError::Inconsistent("E₀ meets three curves".into())),
            };
            let (_, f) = surface.blow_up(site)?;
            blowups += 1;
            created.push(f);
            contacts = contacts
                .into_iter()
                .map(|(x, c)| (x, c - 1))
                .filter(|&(_, c)| c > 0)
                .collect();
            contacts.push((f, 1));
        }
        ends.push(contacts[0].0);
        exceptional.push(created);
    }
    surface.check()?;
    let mut tree = surface.tree;
    let e = tree.add_vertex(a * (a * n + 2 * b) - blowups, Some(Tag::E));
    for v in ends {
        tree.add_edge(e, v)?;
    }
    tree.validate()?;
    let scene = Scene {
        tree,
        k_squared: surface.k_squared,
        h_phi: 0,
        h_psi: 0,
        e_touched: false,
        no_asymptote: false,
        multiplicities: Vec::new(),
        virtual_points: 0,
        branches: None,
        stage: Stage::Minimal,
    };
    Ok(HirzebruchScene {
        scene,
        t1,
        t2,
        exceptional,
    })
}
