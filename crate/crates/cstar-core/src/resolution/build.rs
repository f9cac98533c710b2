use crate::graph::{BlowupKind, BlowupSite, Tag, TrackedSurface, VertexId, WeightedTree};
use crate::hn::{validate, BranchPair, HnPair};

use super::{ResolutionError, Scene, Stage};

/// State of one branch at its current centre.
#[derive(Clone, Debug)]
struct Branch {
    pairs: Vec<HnPair>,
    /// 0-based index of the pair being resolved.
    idx: usize,
    /// Boundary curves through the centre with their local intersection number.
    contacts: Vec<(VertexId, i64)>,
    mult: i64,
    /// Set once the branch meets the boundary transversally at a free point.
    end: Option<VertexId>,
    virtual_points: u32,
}

impl Branch {
    fn start(pairs: Vec<HnPair>, l_inf: VertexId) -> Self {
        let HnPair { c, p } = pairs[0];
        Self {
            pairs,
            idx: 0,
            contacts: vec![(l_inf, c)],
            mult: p,
            end: None,
            virtual_points: 0,
        }
    }

    fn curves(&self) -> Vec<VertexId> {
        let mut v: Vec<VertexId> = self.contacts.iter().map(|x| x.0).collect();
        v.sort();
        v
    }

    /// Smooth, transverse to the single curve through a point no other branch
    /// passes: nothing left to resolve; remaining (1,1) pairs are virtual.
    fn is_resolved_alone(&self) -> bool {
        self.contacts.len() == 1 && self.contacts[0].1 == 1 && self.mult == 1
    }

    /// Strict transform after blowing up the centre, F being the new curve.
    /// Returns the 1-based index of a pair finished by this blowup.
    fn blown_up(&mut self, f: VertexId) -> Option<usize> {
        let m = self.mult;
        let mut next: Vec<(VertexId, i64)> = self
            .contacts
            .iter()
            .map(|&(x, c)| (x, c - m))
            .filter(|&(_, c)| c > 0)
            .collect();
        next.push((f, m));
        self.contacts = next;
        if self.contacts.len() == 2 {
            self.mult = self.contacts[0].1.min(self.contacts[1].1);
            None
        } else {
            let finished = self.idx + 1;
            self.idx += 1;
            if let Some(q) = self.pairs.get(self.idx) {
                debug_assert_eq!(q.c, m);
                self.contacts = vec![(f, q.c)];
                self.mult = q.p;
            } else {
                self.contacts = vec![(f, 1)];
                self.mult = 1;
            }
            Some(finished)
        }
    }

    fn exhausted(&self) -> bool {
        self.idx >= self.pairs.len()
    }
}

/// Simulates the minimal embedded resolution Φ of the two branches at
/// infinity over P² and returns D′+E′ with L′∞ and E′ tagged.
///
/// Where the branches separate is read off the HN data: during a common pair
/// they share every centre, and after the last common pair they leave the
/// last exceptional curve at different points. A branch that runs out of
/// pairs while still sharing its centre continues with (1,1) pairs; the
/// returned scene carries the extended sequences.
pub fn build_resolution(bp: &BranchPair, no_asymptote: bool) -> Result<Scene, ResolutionError> {
    let mut tree = WeightedTree::new();
    let l_inf = tree.add_vertex(1, Some(Tag::LineAtInfinity));
    let mut surface = TrackedSurface::new(tree, 9);
    let mut br = [
        Branch::start(bp.lambda.pairs().to_vec(), l_inf),
        Branch::start(bp.lambda_t.pairs().to_vec(), l_inf),
    ];
    let mut together = bp.same_point;
    let mut multiplicities = Vec::new();
    let mut h_phi = 0u32;

    loop {
        let groups: Vec<Vec<usize>> = if together {
            vec![vec![0, 1]]
        } else {
            vec![vec![0], vec![1]]
        };
        for g in groups {
            if br[g[0]].end.is_some() {
                continue;
            }
            if g.len() == 1 && br[g[0]].is_resolved_alone() {
                let b = &mut br[g[0]];
                b.virtual_points = (b.pairs.len() - b.idx) as u32;
                b.end = Some(b.contacts[0].0);
                continue;
            }
            let curves = br[g[0]].curves();
            if g.iter().any(|&i| br[i].curves() != curves) {
                return Err(ResolutionError::Inconsistent(
                    "branches sharing a centre disagree on the curves through it".into(),
                ));
            }
            let site = match curves.as_slice() {
                [v] => BlowupSite::Vertex(*v),
                [a, b] => BlowupSite::Edge(*a, *b),
                _ => {
                    return Err(ResolutionError::Inconsistent(format!(
                        "centre lies on {} boundary curves",
                        curves.len()
                    )))
                }
            };
            let (kind, f) = surface.blow_up(site)?;
            if kind == BlowupKind::Sprouting {
                h_phi += 1;
            }
            multiplicities.push(g.iter().map(|&i| br[i].mult).sum());
            let mut finished = Vec::new();
            for &i in &g {
                if let Some(k) = br[i].blown_up(f) {
                    finished.push(k);
                }
            }
            if g.len() == 2 {
                let same_curves = br[0].curves() == br[1].curves();
                let stays = same_curves
                    && (br[0].contacts.len() == 2 || finished.iter().all(|&k| k <= bp.s));
                together = stays;
            }
            for &i in &g {
                if br[i].exhausted() {
                    if together {
                        br[i].pairs.push(HnPair { c: 1, p: 1 });
                    } else {
                        br[i].end = Some(f);
                    }
                }
            }
        }
        if br.iter().all(|b| b.end.is_some()) {
            break;
        }
    }

    surface.check()?;
    let mut tree = surface.tree.clone();
    let d = bp.d();
    let sq: i64 = multiplicities.iter().map(|m| m * m).sum();
    let e = tree.add_vertex(d * d - sq, Some(Tag::E));
    for b in &br {
        tree.add_edge(e, b.end.expect("every branch ends"))?;
    }
    tree.validate()?;

    let ext = |b: &Branch| validate(&b.pairs.iter().map(|q| (q.c, q.p)).collect::<Vec<_>>());
    let effective = BranchPair::new(ext(&br[0])?, ext(&br[1])?, bp.same_point, bp.s)?;
    Ok(Scene {
        tree,
        k_squared: surface.k_squared,
        h_phi,
        h_psi: 0,
        e_touched: false,
        no_asymptote,
        multiplicities,
        virtual_points: br[0].virtual_points + br[1].virtual_points,
        branches: Some(effective),
        stage: Stage::Resolved,
    })
}
