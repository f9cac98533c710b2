use std::collections::BTreeSet;

use serde::Serialize;

use crate::graph::{contract, BlowupSite, Tag, TrackedSurface, VertexId};

use super::{ResolutionError, Scene, Stage};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ElementaryCase {
    /// Centres on A off C and l = 1: D† = A♯.
    OffCSingle,
    /// Centres on A off C and l > 1: D† = B + A♯ + M.
    OffC,
    /// A centre on A ∩ C: D† = B + A♯ + M + C.
    OnC,
}

#[derive(Clone, Debug)]
pub struct ElementaryOutcome {
    pub case: ElementaryCase,
    pub scene: Scene,
    pub l_inf_dagger: VertexId,
    pub a: VertexId,
    pub c: VertexId,
    pub m: VertexId,
    pub b: Vec<VertexId>,
    pub d_prime_components: usize,
    pub d_dagger_components: usize,
}

/// Replaces L∞ by a new line at infinity when both branches leave q ∈ L∞
/// through the pair (l+1, l)·c₂ and share the next centre q′ on C.
///
/// On the resolved scene this blows up l−1 further points in a sprouting
/// chain B off the branches, then contracts every (−1)-curve of D′+B other
/// than the new line L∞† that is non-branching in D′+B+E′. The remaining
/// boundary D† is compared with the case list and with D′.
pub fn elementary_transformation(scene: &Scene, l: i64) -> Result<ElementaryOutcome, ResolutionError> {
    if scene.stage != Stage::Resolved {
        return Err(ResolutionError::Pattern("needs the scene before Ψ".into()));
    }
    let bp = scene
        .branches
        .as_ref()
        .ok_or_else(|| ResolutionError::Pattern("scene has no branch data".into()))?;
    if !bp.same_point || bp.s < 1 {
        return Err(ResolutionError::Pattern(
            "branches must share the first pair and its centre".into(),
        ));
    }
    if l < 1 {
        return Err(ResolutionError::Pattern(format!("l = {l} < 1")));
    }
    let (c1, p1) = (bp.lambda.c(1), bp.lambda.p(1));
    if c1 * l != p1 * (l + 1) {
        return Err(ResolutionError::Pattern(format!(
            "first pair ({c1},{p1}) is not a multiple of ({},{l})",
            l + 1
        )));
    }
    let tree = &scene.tree;
    let l_inf = tree
        .find_tag(Tag::LineAtInfinity)
        .ok_or_else(|| ResolutionError::Pattern("no L∞".into()))?;
    let lu = l as VertexId;
    let m = l_inf + 1;
    let c = l_inf + 1 + lu;
    let a = c + 1;
    let chain: Vec<VertexId> = std::iter::once(l_inf).chain(m + 1..=c).collect();
    let present = chain.iter().chain([&m, &a]).all(|&v| tree.contains(v) && !tree.is_e(v));
    let linked = present
        && chain.windows(2).all(|w| tree.edge_mult(w[0], w[1]) == 1)
        && tree.edge_mult(c, m) == 1
        && tree.degree(l_inf) == 1
        && tree.weight(l_inf) == -1
        && tree.weight(m) == -(l + 1)
        && chain[1..chain.len() - 1].iter().all(|&v| tree.weight(v) == -2);
    if !linked {
        return Err(ResolutionError::Pattern("chain L + C + M not found".into()));
    }
    let on_c = tree.edge_mult(a, c) == 0;
    let case = match (on_c, l) {
        (true, _) => ElementaryCase::OnC,
        (false, 1) => ElementaryCase::OffCSingle,
        (false, _) => ElementaryCase::OffC,
    };
    let d_prime: BTreeSet<VertexId> = tree.d_ids().into_iter().collect();
    let a_sharp: BTreeSet<VertexId> = d_prime.iter().copied().filter(|&v| v >= a).collect();

    let mut surface = TrackedSurface::new(tree.clone(), scene.k_squared);
    let mut b = Vec::new();
    let mut last = a;
    for _ in 1..l {
        let (_, f) = surface.blow_up(BlowupSite::Vertex(last))?;
        b.push(f);
        last = f;
    }
    surface.check()?;
    let l_dagger = last;
    let mut g = surface.tree;
    let mut k_squared = surface.k_squared;
    g.set_tag(l_inf, Some(Tag::DComponent));
    g.set_tag(l_dagger, Some(Tag::LineAtInfinity));
    loop {
        let next = g.ids().find(|&v| {
            v != l_dagger
                && !g.is_e(v)
                && g.weight(v) == -1
                && g.degree(v) <= 2
                && g.neighbors(v).all(|(_, k)| k == 1)
        });
        let Some(v) = next else { break };
        g = contract(&g, v)?;
        k_squared += 1;
    }
    let d_dagger: BTreeSet<VertexId> = g.d_ids().into_iter().collect();
    let mut expected: BTreeSet<VertexId> = a_sharp.clone();
    if case != ElementaryCase::OffCSingle {
        expected.extend(&b);
        expected.insert(m);
    }
    if case == ElementaryCase::OnC {
        expected.insert(c);
    }
    if d_dagger != expected {
        return Err(ResolutionError::Inconsistent(format!(
            "D† = {d_dagger:?}, expected {expected:?} for {case:?}"
        )));
    }
    if k_squared != 10 - d_dagger.len() as i64 || scene.k_squared != 10 - d_prime.len() as i64 {
        return Err(ResolutionError::Inconsistent(
            "K² disagrees with the Picard rank of a completion of C²".into(),
        ));
    }
    if d_dagger.len() >= d_prime.len() {
        return Err(ResolutionError::Inconsistent(format!(
            "D† has {} components, D′ has {}",
            d_dagger.len(),
            d_prime.len()
        )));
    }
    let d_dagger_components = d_dagger.len();
    let new_scene = Scene {
        tree: g,
        k_squared,
        h_phi: 0,
        h_psi: 0,
        e_touched: false,
        no_asymptote: scene.no_asymptote,
        multiplicities: Vec::new(),
        virtual_points: 0,
        branches: None,
        stage: Stage::Resolved,
    };
    let h_phi = u32::try_from(6 - new_scene.k_dot_k_plus_d()).map_err(|_| {
        ResolutionError::Inconsistent("K·(K+D†) exceeds 6".into())
    })?;
    Ok(ElementaryOutcome {
        case,
        scene: Scene {
            h_phi,
            ..new_scene
        },
        l_inf_dagger: l_dagger,
        a,
        c,
        m,
        b,
        d_prime_components: d_prime.len(),
        d_dagger_components,
    })
}
