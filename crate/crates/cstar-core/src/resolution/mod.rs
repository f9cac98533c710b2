//! Resolution scenes: the boundary D+E of a smooth completion of C*, built
//! from HN data, then NC-minimalized (Ψ) and 2-reduced (ψ).

mod build;
mod elementary;
mod hirzebruch;

pub use build::build_resolution;
pub use elementary::{elementary_transformation, ElementaryCase, ElementaryOutcome};
pub use hirzebruch::{hirzebruch_reconstruction, HirzebruchConfig, HirzebruchScene};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{
    bark_divisor, contract, nc_minimalize, GraphError, Tag, VertexId, WeightedTree,
};
use crate::hn::{BranchPair, HnError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ResolutionError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Hn(#[from] HnError),
    #[error("inconsistent configuration: {0}")]
    Inconsistent(String),
    #[error("{name}: expected {expected}, found {found}")]
    Counter {
        name: &'static str,
        expected: i64,
        found: i64,
    },
    #[error("pattern not present: {0}")]
    Pattern(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Stage {
    Resolved,
    Minimal,
}

/// D+E on a smooth completion together with the bookkeeping needed for the
/// counters. K² is carried along since it is not visible in the tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scene {
    pub tree: WeightedTree,
    pub k_squared: i64,
    /// Sprouting blowups in Φ.
    pub h_phi: u32,
    /// Contractions in Ψ sprouting with respect to D.
    pub h_psi: u32,
    pub e_touched: bool,
    pub no_asymptote: bool,
    /// Multiplicities of the centres blown up by Φ.
    pub multiplicities: Vec<i64>,
    /// Trailing (1,1) pairs of branches already transverse to the boundary;
    /// each stands for a centre of multiplicity 1 that Φ does not blow up.
    pub virtual_points: u32,
    pub branches: Option<BranchPair>,
    pub stage: Stage,
}

impl Scene {
    /// A scene given directly by its boundary graph and K².
    pub fn from_tree(
        tree: WeightedTree,
        k_squared: i64,
        no_asymptote: bool,
    ) -> Result<Self, ResolutionError> {
        tree.validate()?;
        let s = Self {
            tree,
            k_squared,
            h_phi: 0,
            h_psi: 0,
            e_touched: false,
            no_asymptote,
            multiplicities: Vec::new(),
            virtual_points: 0,
            branches: None,
            stage: Stage::Minimal,
        };
        s.e()?;
        Ok(s)
    }

    pub fn e(&self) -> Result<VertexId, ResolutionError> {
        self.tree
            .e_vertex()
            .ok_or_else(|| ResolutionError::Pattern("no E vertex".into()))
    }

    fn e_id(&self) -> VertexId {
        self.e().expect("scene has E")
    }

    /// E·D counted with multiplicity.
    pub fn e_dot_d(&self) -> i64 {
        self.tree.degree(self.e_id()) as i64
    }

    /// γ = −E².
    pub fn gamma(&self) -> i64 {
        -self.tree.weight(self.e_id())
    }

    /// K·(K+D) = K² + Σ_{C ⊂ D} (−2 − C²).
    pub fn k_dot_k_plus_d(&self) -> i64 {
        self.k_squared
            + self
                .tree
                .d_ids()
                .iter()
                .map(|&v| -2 - self.tree.weight(v))
                .sum::<i64>()
    }

    pub fn k_dot_e(&self) -> i64 {
        -2 + self.gamma()
    }

    /// (K+D+E)² expanded componentwise.
    pub fn k_d_e_squared(&self) -> i64 {
        let all: i64 = self
            .tree
            .ids()
            .map(|v| -2 - self.tree.weight(v))
            .sum();
        let self_sq: i64 = self.tree.ids().map(|v| self.tree.weight(v)).sum();
        self.k_squared + 2 * all + self_sq + 2 * self.tree.edge_count() as i64
    }

    /// ε with (K+D+E)² = 2 − ε.
    pub fn epsilon(&self) -> i64 {
        2 - self.k_d_e_squared()
    }

    /// ε through K·(K+D) + K·E; must agree with [`Scene::epsilon`].
    pub fn epsilon_via_k(&self) -> i64 {
        2 - self.k_dot_k_plus_d() - self.k_dot_e()
    }

    pub fn omega(&self) -> u32 {
        self.h_psi
    }

    /// Leading repeated pairs (c₂,c₂) after the first pair, for each branch.
    pub fn r_counts(&self) -> Option<(usize, usize)> {
        self.branches
            .as_ref()
            .map(|b| (b.lambda.repeated_from(2), b.lambda_t.repeated_from(2)))
    }

    /// D connected and E·D = 2, hence D+E is not a chain.
    pub fn check_structure(&self) -> Result<(), ResolutionError> {
        self.tree.validate()?;
        let d: std::collections::BTreeSet<VertexId> = self.tree.d_ids().into_iter().collect();
        if self.tree.components_within(&d).len() != 1 {
            return Err(ResolutionError::Graph(GraphError::Disconnected));
        }
        expect("E·D", 2, self.e_dot_d())?;
        expect("ε via K·(K+D)", self.epsilon(), self.epsilon_via_k())?;
        if self.stage == Stage::Resolved {
            expect("K·(K+D)", 6 - self.h_phi as i64, self.k_dot_k_plus_d())?;
        } else {
            expect(
                "h_Φ",
                self.h_phi as i64,
                2 + self.epsilon() + self.gamma() + self.h_psi as i64,
            )?;
        }
        if self.no_asymptote && self.stage == Stage::Minimal {
            if self.gamma() <= 0 {
                return Err(ResolutionError::Counter {
                    name: "γ > 0",
                    expected: 1,
                    found: self.gamma(),
                });
            }
            if self.epsilon() > 3 {
                return Err(ResolutionError::Counter {
                    name: "ε ≤ 3",
                    expected: 3,
                    found: self.epsilon(),
                });
            }
        }
        Ok(())
    }

    /// Σμ and Σμ² of Φ, virtual points included.
    pub fn multiplicity_sums(&self) -> (i64, i64) {
        let v = self.virtual_points as i64;
        (
            self.multiplicities.iter().sum::<i64>() + v,
            self.multiplicities.iter().map(|m| m * m).sum::<i64>() + v,
        )
    }

    pub fn counters(&self) -> Counters {
        Counters {
            gamma: self.gamma(),
            epsilon: self.epsilon(),
            k_squared: self.k_squared,
            k_dot_k_plus_d: self.k_dot_k_plus_d(),
            h_phi: self.h_phi,
            h_psi: self.h_psi,
            omega: self.omega(),
            r: self.r_counts().map(|x| x.0),
            r_t: self.r_counts().map(|x| x.1),
            components: self.tree.d_ids().len(),
            e_touched: self.e_touched,
        }
    }
}

fn expect(name: &'static str, expected: i64, found: i64) -> Result<(), ResolutionError> {
    if expected == found {
        Ok(())
    } else {
        Err(ResolutionError::Counter {
            name,
            expected,
            found,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Counters {
    pub gamma: i64,
    pub epsilon: i64,
    pub k_squared: i64,
    pub k_dot_k_plus_d: i64,
    pub h_phi: u32,
    pub h_psi: u32,
    pub omega: u32,
    pub r: Option<usize>,
    pub r_t: Option<usize>,
    pub components: usize,
    pub e_touched: bool,
}

/// Ψ: contract non-branching (−1)-curves of D until D+E is NC-minimal.
pub fn minimalize(scene: &Scene) -> Result<Scene, ResolutionError> {
    let nc = nc_minimalize(&scene.tree);
    let out = Scene {
        tree: nc.tree,
        k_squared: scene.k_squared + nc.contracted.len() as i64,
        h_psi: scene.h_psi + nc.h_psi,
        e_touched: scene.e_touched || nc.e_touched,
        stage: Stage::Minimal,
        ..scene.clone()
    };
    out.check_structure()?;
    Ok(out)
}

/// T + E₀ after ψ, with the quantities entering the basic inequality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoReduced {
    pub tree: WeightedTree,
    pub k_squared: i64,
    pub t: u32,
    pub contracted: Vec<VertexId>,
    pub gamma: i64,
    pub epsilon: i64,
    /// (E₀+2K)·(K+T) evaluated on T + E₀.
    pub lhs: i64,
}

impl TwoReduced {
    pub fn e0_squared(&self) -> i64 {
        self.tree.weight(self.tree.e_vertex().expect("E₀ present"))
    }
}

fn two_reduction_eligible(tree: &WeightedTree, e: VertexId) -> Option<VertexId> {
    tree.ids().rev().find(|&v| {
        v != e && tree.weight(v) == -1 && tree.edge_mult(v, e) == 1 && tree.degree_in_d(v) <= 2
    })
}

/// ψ: contract (−1)-curves of D meeting E once and non-branching in D, until
/// every (−1)-component of T meets E₀ at least twice or branches. The end
/// result depends on the order; the most recently created curve goes first,
/// so blowups are undone in reverse.
pub fn two_reduction(scene: &Scene) -> Result<TwoReduced, ResolutionError> {
    let e = scene.e()?;
    let mut tree = scene.tree.clone();
    let mut k_squared = scene.k_squared;
    let mut t = 0;
    let mut contracted = Vec::new();
    while let Some(v) = two_reduction_eligible(&tree, e) {
        if tree.degree_in_d(v) <= 1 {
            t += 1;
        }
        tree = contract(&tree, v)?;
        k_squared += 1;
        contracted.push(v);
    }
    let t_ids: Vec<VertexId> = tree.d_ids();
    let k_dot_t: i64 = t_ids.iter().map(|&v| -2 - tree.weight(v)).sum();
    let e0_sq = tree.weight(e);
    let e0_dot_k = -2 - e0_sq;
    let e0_dot_t = tree.degree(e) as i64;
    let lhs = e0_dot_k + e0_dot_t + 2 * k_squared + 2 * k_dot_t;
    let out = TwoReduced {
        tree,
        k_squared,
        t,
        contracted,
        gamma: scene.gamma(),
        epsilon: scene.epsilon(),
        lhs,
    };
    expect("(E₀+2K)·(K+T)", out.rhs(), lhs)?;
    let first = e0_dot_k + e0_dot_t + k_squared + k_dot_t;
    let before = scene.k_dot_k_plus_d() + scene.k_dot_e() + scene.e_dot_d();
    expect("(E₀+K)·(K+T)", before, first)?;
    Ok(out)
}

impl TwoReduced {
    /// 8 − 2ε − γ + t.
    pub fn rhs(&self) -> i64 {
        8 - 2 * self.epsilon - self.gamma + self.t as i64
    }

    /// 7 + t − 2ε − γ; nonnegative exactly when (E₀+2K)·(K+T) > 0.
    pub fn basic_slack(&self) -> i64 {
        7 + self.t as i64 - 2 * self.epsilon - self.gamma
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InequalityReport {
    pub basic_slack: i64,
    pub holds: bool,
    pub asserted: bool,
}

/// Evaluates 7 + t ≥ 2ε + γ. Under the no-asymptote flag a violation is an
/// error; otherwise it is only reported.
pub fn check_basic_inequality(r: &TwoReduced, no_asymptote: bool) -> Result<InequalityReport, ResolutionError> {
    let slack = r.basic_slack();
    if no_asymptote && slack < 0 {
        return Err(ResolutionError::Counter {
            name: "7+t−2ε−γ ≥ 0",
            expected: 0,
            found: slack,
        });
    }
    Ok(InequalityReport {
        basic_slack: slack,
        holds: slack >= 0,
        asserted: no_asymptote,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TwigReport {
    /// Weights of each maximal twig of D+E, tip first.
    pub twigs: Vec<Vec<i64>>,
    pub capacities: Vec<String>,
    pub sum: String,
    /// 1 + ε − Σeᵢ.
    pub slack: String,
    pub holds: bool,
}

/// Σeᵢ over the maximal twigs of D+E, equal to −Bk(D+E)².
pub fn sum_ei(scene: &Scene) -> Result<BigRational, ResolutionError> {
    let bark = bark_divisor(&scene.tree)?;
    let s = bark.sum_capacities();
    debug_assert_eq!(s, -bark.self_intersection.clone());
    Ok(s)
}

pub fn twig_report(scene: &Scene) -> Result<TwigReport, ResolutionError> {
    let bark = bark_divisor(&scene.tree)?;
    let sum = bark.sum_capacities();
    if sum != -bark.self_intersection.clone() {
        return Err(ResolutionError::Inconsistent(
            "Σeᵢ differs from −Bk²".into(),
        ));
    }
    let bound = BigRational::from_integer(BigInt::from(1 + scene.epsilon()));
    let slack = bound - &sum;
    Ok(TwigReport {
        twigs: bark.twigs.iter().map(|c| c.weights(&scene.tree)).collect(),
        capacities: bark.capacities.iter().map(|c| c.to_string()).collect(),
        sum: sum.to_string(),
        holds: slack >= BigRational::zero(),
        slack: slack.to_string(),
    })
}

/// The tag of the vertex, printed the way reports show it.
pub fn tag_label(tree: &WeightedTree, v: VertexId) -> &'static str {
    match tree.tag(v) {
        Some(Tag::E) => "E",
        Some(Tag::LineAtInfinity) => "L∞",
        _ => "D",
    }
}

#[cfg(test)]
mod tests;
