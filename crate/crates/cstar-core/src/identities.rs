//! Seeded randomized identity runs backing `check-identities`.
//!
//! Every check compares two independent computations of the same quantity and
//! counts disagreements; a fixed seed reproduces the same cases.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{
    bark_divisor, capacity, determinant, nc_minimalize, BlowupKind, BlowupSite, Chain, Tag,
    TrackedSurface, VertexId, WeightedTree,
};
use crate::hn::{multiplicity_sequence, random_sequence, BranchPair, HnSequence};
use crate::resolution::build_resolution;

pub const DEFAULT_SEED: u64 = 1729;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IdentityCheck {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

impl IdentityCheck {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            cases: 0,
            failures: 0,
            first_failure: None,
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(what());
            }
        }
    }

    pub fn pass(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IdentityReport {
    pub seed: u64,
    pub checks: Vec<IdentityCheck>,
    pub all_pass: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IdentityOptions {
    pub seed: u64,
    /// Vertex cap for random rewrite sequences.
    pub max_vertices: usize,
}

impl Default for IdentityOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            max_vertices: 20,
        }
    }
}

/// All four randomized runs with the case counts used by the acceptance suite.
pub fn check_identities(opts: IdentityOptions) -> IdentityReport {
    let seeds: Vec<u64> = {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        (0..4).map(|_| rng.gen()).collect()
    };
    let checks = vec![
        multiplicity_formulas(seeds[0], 1000, 50),
        rewrite_bookkeeping(seeds[1], 500, opts.max_vertices),
        bark_identity(seeds[2], 200),
        determinant_oracle(seeds[3], 500, 12),
    ];
    IdentityReport {
        seed: opts.seed,
        all_pass: checks.iter().all(IdentityCheck::pass),
        checks,
    }
}

fn pairs_str(s: &HnSequence) -> String {
    let v: Vec<(i64, i64)> = s.clone().into();
    format!("{v:?}")
}

/// For `cases` random pairs of branches at distinct points (c₁ ≤ `max_c1`):
/// each Euclidean list has Σμ = c₁+Σp−1 and Σμ² = Σcp, and the multiset of
/// centre multiplicities of the simulated resolution equals the union of the
/// two lists.
pub fn multiplicity_formulas(seed: u64, cases: usize, max_c1: i64) -> IdentityCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut check = IdentityCheck::new("multiplicity formulas");
    for _ in 0..cases {
        let trailing = rng.gen_bool(0.3);
        let a = random_sequence(&mut rng, max_c1, trailing);
        let b = random_sequence(&mut rng, max_c1, false);
        let mut expected = Vec::new();
        let mut closed_ok = true;
        for s in [&a, &b] {
            let mu = multiplicity_sequence(s);
            closed_ok &= mu.iter().sum::<i64>() == s.c(1) + s.sum_p() - 1
                && mu.iter().map(|m| m * m).sum::<i64>() == s.sum_cp();
            expected.extend(mu);
        }
        expected.sort_unstable();
        let found = BranchPair::new(a.clone(), b.clone(), false, 0)
            .map_err(|e| e.to_string())
            .and_then(|bp| build_resolution(&bp, false).map_err(|e| e.to_string()))
            .map(|scene| {
                let mut m = scene.multiplicities.clone();
                m.extend(std::iter::repeat_n(1, scene.virtual_points as usize));
                m.sort_unstable();
                m
            });
        let ok = closed_ok && found.as_ref() == Ok(&expected);
        check.record(ok, || {
            format!(
                "λ = {}, λ̃ = {}: expected {expected:?}, simulated {found:?}",
                pairs_str(&a),
                pairs_str(&b)
            )
        });
    }
    check
}

/// A random tree on `n` vertices (each new vertex hangs off an earlier one).
pub fn random_tree<R: Rng>(rng: &mut R, n: usize, weights: std::ops::RangeInclusive<i64>) -> WeightedTree {
    let mut t = WeightedTree::new();
    for i in 0..n {
        let v = t.add_vertex(rng.gen_range(weights.clone()), None);
        if i > 0 {
            let u = rng.gen_range(0..v);
            t.add_edge(u, v).expect("fresh vertex");
        }
    }
    t
}

fn contractible(tree: &WeightedTree) -> Vec<VertexId> {
    tree.ids()
        .filter(|&v| {
            tree.weight(v) == -1 && tree.degree(v) <= 2 && tree.neighbors(v).all(|(_, m)| m == 1)
        })
        .collect()
}

/// Random sequences of blowups and blowdowns on trees with at most
/// `max_vertices` vertices. After every step the incremental K·(K+T) counter
/// must equal the recomputation, and a blowdown must move it by +1 when
/// sprouting and by 0 when subdivisional.
pub fn rewrite_bookkeeping(seed: u64, cases: usize, max_vertices: usize) -> IdentityCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut check = IdentityCheck::new("blowdown bookkeeping");
    let max_vertices = max_vertices.max(2);
    for case in 0..cases {
        let n = rng.gen_range(1..=max_vertices.min(8));
        let tree = random_tree(&mut rng, n, -4..=2);
        let k2 = rng.gen_range(-10..=10);
        let mut s = TrackedSurface::new(tree, k2);
        let mut fault: Option<String> = None;
        for step in 0..rng.gen_range(5..=30) {
            let before = s.kk_counter;
            let down = contractible(&s.tree);
            let grow = s.tree.len() < max_vertices && (down.is_empty() || rng.gen_bool(0.6));
            let outcome = if grow {
                let ids: Vec<VertexId> = s.tree.ids().collect();
                let edges = s.tree.edges();
                let site = match rng.gen_range(0..10) {
                    _ if ids.is_empty() => BlowupSite::FreePoint,
                    0 => BlowupSite::FreePoint,
                    1..=4 if !edges.is_empty() => {
                        let (a, b, _) = *edges.choose(&mut rng).expect("nonempty");
                        BlowupSite::Edge(a, b)
                    }
                    _ => BlowupSite::Vertex(*ids.choose(&mut rng).expect("nonempty")),
                };
                s.blow_up(site).map(|(k, _)| (k, true))
            } else if let Some(&v) = down.choose(&mut rng) {
                s.blow_down(v).map(|k| (k, false))
            } else {
                break;
            };
            let delta = s.kk_counter - before;
            let problem = match outcome {
                Err(e) => Some(format!("rewrite failed: {e}")),
                Ok(_) if s.kk_counter != s.recompute() => Some(format!(
                    "counter {} vs recomputed {}",
                    s.kk_counter,
                    s.recompute()
                )),
                Ok((BlowupKind::Sprouting, false)) if delta != 1 => {
                    Some(format!("sprouting blowdown moved the counter by {delta}"))
                }
                Ok((BlowupKind::Subdivisional, false)) if delta != 0 => {
                    Some(format!("subdivisional blowdown moved the counter by {delta}"))
                }
                Ok(_) => None,
            };
            if let Some(p) = problem {
                fault = Some(format!("case {case}, step {step}: {p}"));
                break;
            }
        }
        check.record(fault.is_none(), || fault.clone().unwrap_or_default());
    }
    check
}

/// Bk² = −Σe(twigs) on random NC-minimal trees whose twigs are admissible.
/// Half of the trees carry an E vertex, which twigs never enter.
pub fn bark_identity(seed: u64, cases: usize) -> IdentityCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut check = IdentityCheck::new("bark = −Σe");
    let mut made = 0;
    while made < cases {
        let n = rng.gen_range(2..=14);
        let mut t = random_tree(&mut rng, n, -6..=-1);
        if rng.gen_bool(0.5) {
            let e = t.add_vertex(rng.gen_range(-3..=3), Some(Tag::E));
            let ids: Vec<VertexId> = t.ids().filter(|&v| v != e).collect();
            for _ in 0..2 {
                let u = *ids.choose(&mut rng).expect("nonempty");
                t.add_edge(u, e).expect("fresh vertex");
            }
        }
        let t = nc_minimalize(&t).tree;
        let bark = match bark_divisor(&t) {
            Ok(b) if b.twigs.iter().all(|c| c.is_admissible(&t)) => b,
            _ => continue,
        };
        made += 1;
        let sum = bark.sum_capacities();
        let ok = bark.self_intersection == -sum.clone();
        check.record(ok, || {
            format!(
                "Bk² = {} but Σe = {sum} on {}",
                bark.self_intersection,
                t.to_json_value()
            )
        });
    }
    check
}

/// det(−Q) by Laplace expansion along rows over column subsets, in i128.
pub fn laplace_det(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    assert!(n < 24, "subset expansion is exponential");
    // f[mask]: determinant of the rows 0..popcount(mask) restricted to the
    // columns in mask.
    let mut f = vec![0i128; 1 << n];
    f[0] = 1;
    for mask in 1usize..(1 << n) {
        let row = mask.count_ones() as usize - 1;
        let mut acc = 0i128;
        let mut pos = 0;
        for col in 0..n {
            if mask & (1 << col) != 0 {
                let sign = if (mask.count_ones() as usize - 1 - pos).is_multiple_of(2) { 1 } else { -1 };
                acc += sign * m[row][col] as i128 * f[mask ^ (1 << col)];
                pos += 1;
            }
        }
        f[mask] = acc;
    }
    f[(1 << n) - 1]
}

/// `determinant` against [`laplace_det`] on random trees with at most
/// `max_vertices` vertices and on a random subset of each.
pub fn determinant_oracle(seed: u64, cases: usize, max_vertices: usize) -> IdentityCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut check = IdentityCheck::new("determinant oracle");
    for _ in 0..cases {
        let n = rng.gen_range(1..=max_vertices);
        let t = random_tree(&mut rng, n, -6..=3);
        let mut ids: Vec<VertexId> = t.ids().collect();
        for subset in [ids.clone(), {
            ids.shuffle(&mut rng);
            ids[..rng.gen_range(0..=n)].to_vec()
        }] {
            let neg: Vec<Vec<i64>> = subset
                .iter()
                .map(|&a| {
                    subset
                        .iter()
                        .map(|&b| if a == b { -t.weight(a) } else { -(t.edge_mult(a, b) as i64) })
                        .collect()
                })
                .collect();
            let oracle = BigInt::from(laplace_det(&neg));
            let got = determinant(&t, &subset);
            check.record(got.as_ref() == Ok(&oracle), || {
                format!("subset {subset:?} of {}: {got:?} vs {oracle}", t.to_json_value())
            });
        }
    }
    check
}

/// 1/[k₁, …, k_s] with the Hirzebruch-Jung continued fraction
/// k₁ − 1/(k₂ − 1/(…)), evaluated from the far end.
pub fn hj_inverse(ks: &[i64]) -> BigRational {
    let mut x = BigRational::zero();
    for &k in ks.iter().rev() {
        x = BigRational::one() / (BigRational::from_integer(BigInt::from(k)) - x);
    }
    x
}

/// Every admissible chain with weights in [`min_weight`, −2] and length up to
/// `max_len`: the capacity equals the continued-fraction value and is at least
/// 1/k for tip weight −k.
pub fn capacity_tip_bound(max_len: usize, min_weight: i64) -> IdentityCheck {
    let mut check = IdentityCheck::new("capacity ≥ 1/k");
    let base = (-1 - min_weight) as usize;
    for len in 1..=max_len {
        let total = base.pow(len as u32);
        let mut weights = vec![-2i64; len];
        for code in 0..total {
            let mut c = code;
            for w in weights.iter_mut() {
                *w = -2 - (c % base) as i64;
                c /= base;
            }
            let t = WeightedTree::chain(&weights);
            let ids: Vec<VertexId> = t.ids().collect();
            let e = Chain::new(&t, ids).and_then(|ch| capacity(&t, &ch));
            let k = -weights[0];
            let ok = match &e {
                Ok(e) => {
                    *e == hj_inverse(&weights.iter().map(|w| -w).collect::<Vec<_>>())
                        && *e >= BigRational::new(BigInt::one(), BigInt::from(k))
                }
                Err(_) => false,
            };
            check.record(ok, || format!("chain {weights:?}: e = {e:?}"));
        }
    }
    check
}
