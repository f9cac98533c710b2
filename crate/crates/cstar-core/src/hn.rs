//! Hamburger-Noether pair sequences of branches at infinity.

use num_integer::Integer;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HnError {
    #[error("empty pair sequence")]
    Empty,
    #[error("pair {index}: need c ≥ p ≥ 1, got ({c},{p})")]
    BadPair { index: usize, c: i64, p: i64 },
    #[error("pair {index}: c = {got} but gcd of the previous pair is {expected}")]
    GcdChain { index: usize, expected: i64, got: i64 },
    #[error("sequence incomplete: gcd of the last pair is {0}")]
    Incomplete(i64),
    #[error("s = {s} exceeds the shorter sequence length {max}")]
    SOutOfRange { s: usize, max: usize },
    #[error("pair {0} is not common: ratios differ")]
    NotCommon(usize),
    #[error("operation needs both branches through one point")]
    NotSamePoint,
    #[error("branch input: {0}")]
    Parse(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HnPair {
    pub c: i64,
    pub p: i64,
}

/// A complete HN sequence: c_{i+1} = gcd(c_i, p_i) and the last gcd is 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(i64, i64)>", into = "Vec<(i64, i64)>")]
pub struct HnSequence {
    pairs: Vec<HnPair>,
}

impl TryFrom<Vec<(i64, i64)>> for HnSequence {
    type Error = HnError;
    fn try_from(v: Vec<(i64, i64)>) -> Result<Self, HnError> {
        validate(&v)
    }
}

impl From<HnSequence> for Vec<(i64, i64)> {
    fn from(s: HnSequence) -> Self {
        s.pairs.iter().map(|q| (q.c, q.p)).collect()
    }
}

pub fn validate(seq: &[(i64, i64)]) -> Result<HnSequence, HnError> {
    if seq.is_empty() {
        return Err(HnError::Empty);
    }
    for (i, &(c, p)) in seq.iter().enumerate() {
        if !(p >= 1 && c >= p) {
            return Err(HnError::BadPair { index: i + 1, c, p });
        }
        if i > 0 {
            let (pc, pp) = seq[i - 1];
            let g = pc.gcd(&pp);
            if g != c {
                return Err(HnError::GcdChain {
                    index: i + 1,
                    expected: g,
                    got: c,
                });
            }
        }
    }
    let (c, p) = *seq.last().unwrap();
    let g = c.gcd(&p);
    if g != 1 {
        return Err(HnError::Incomplete(g));
    }
    Ok(HnSequence {
        pairs: seq.iter().map(|&(c, p)| HnPair { c, p }).collect(),
    })
}

impl HnSequence {
    pub fn pairs(&self) -> &[HnPair] {
        &self.pairs
    }

    pub fn h(&self) -> usize {
        self.pairs.len()
    }

    /// c_i, 1-based; c_{h+1} = 1.
    pub fn c(&self, i: usize) -> i64 {
        self.pairs.get(i - 1).map_or(1, |q| q.c)
    }

    /// p_i, 1-based; 0 past the end.
    pub fn p(&self, i: usize) -> i64 {
        self.pairs.get(i - 1).map_or(0, |q| q.p)
    }

    pub fn sum_p(&self) -> i64 {
        self.pairs.iter().map(|q| q.p).sum()
    }

    pub fn sum_cp(&self) -> i64 {
        self.pairs.iter().map(|q| q.c * q.p).sum()
    }

    /// Number of consecutive pairs equal to (c,c) starting at pair `from`.
    pub fn repeated_from(&self, from: usize) -> usize {
        self.pairs
            .iter()
            .skip(from - 1)
            .take_while(|q| q.c == q.p)
            .count()
    }
}

/// Multiplicities of one pair: the Euclidean algorithm on (c,p) yields each
/// remainder as many times as its partial quotient.
pub fn euclid_multiplicities(c: i64, p: i64) -> Vec<i64> {
    let mut out = Vec::new();
    let (mut a, mut b) = (c, p);
    while b > 0 {
        let (q, r) = a.div_rem(&b);
        out.extend(std::iter::repeat_n(b, q as usize));
        a = b;
        b = r;
    }
    out
}

pub fn multiplicity_sequence(seq: &HnSequence) -> Vec<i64> {
    seq.pairs
        .iter()
        .flat_map(|q| euclid_multiplicities(q.c, q.p))
        .collect()
}

/// Two branches at infinity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchPair {
    pub lambda: HnSequence,
    pub lambda_t: HnSequence,
    pub same_point: bool,
    pub s: usize,
}

#[derive(Deserialize, Serialize)]
struct BranchJson {
    pairs: Vec<(i64, i64)>,
}

#[derive(Deserialize, Serialize)]
#[serde(rename_all = "camelCase")]
struct BranchPairJson {
    branches: Vec<BranchJson>,
    same_point: bool,
    #[serde(default)]
    s: usize,
}

impl BranchPair {
    pub fn new(
        lambda: HnSequence,
        lambda_t: HnSequence,
        same_point: bool,
        s: usize,
    ) -> Result<Self, HnError> {
        let s = if same_point { s } else { 0 };
        let max = lambda.h().min(lambda_t.h());
        if s > max {
            return Err(HnError::SOutOfRange { s, max });
        }
        for i in 1..=s {
            if lambda.c(i) * lambda_t.p(i) != lambda_t.c(i) * lambda.p(i) {
                return Err(HnError::NotCommon(i));
            }
        }
        Ok(Self {
            lambda,
            lambda_t,
            same_point,
            s,
        })
    }

    pub fn from_json_str(s: &str) -> Result<Self, HnError> {
        let j: BranchPairJson =
            serde_json::from_str(s).map_err(|e| HnError::Parse(e.to_string()))?;
        if j.branches.len() != 2 {
            return Err(HnError::Parse(format!(
                "expected 2 branches, got {}",
                j.branches.len()
            )));
        }
        let a = validate(&j.branches[0].pairs)?;
        let b = validate(&j.branches[1].pairs)?;
        Self::new(a, b, j.same_point, j.s)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(BranchPairJson {
            branches: vec![
                BranchJson {
                    pairs: self.lambda.clone().into(),
                },
                BranchJson {
                    pairs: self.lambda_t.clone().into(),
                },
            ],
            same_point: self.same_point,
            s: self.s,
        })
        .expect("serializable")
    }

    pub fn swapped(&self) -> Self {
        Self {
            lambda: self.lambda_t.clone(),
            lambda_t: self.lambda.clone(),
            same_point: self.same_point,
            s: self.s,
        }
    }

    pub fn d(&self) -> i64 {
        self.lambda.c(1) + self.lambda_t.c(1)
    }
}

/// Closed-form joint multiplicity sums for two branches through one point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JointSums {
    pub sum: i64,
    pub sum_squares: i64,
    /// 2·min(p̃_{s+1}c_{s+1}, p_{s+1}c̃_{s+1}); `None` when pair s+1 is
    /// missing from either sequence (the boundary convention is left open).
    pub cross_term: Option<i64>,
}

impl JointSums {
    pub fn boundary(&self) -> bool {
        self.cross_term.is_none()
    }
}

pub fn joint_multiplicities(bp: &BranchPair) -> Result<JointSums, HnError> {
    if !bp.same_point {
        return Err(HnError::NotSamePoint);
    }
    let (l, t, s) = (&bp.lambda, &bp.lambda_t, bp.s);
    let sum = l.c(1) + l.sum_p() - 1 + t.c(1) + t.sum_p() - 1;
    let mut sq = 0;
    for i in 1..=s {
        sq += (l.p(i) + t.p(i)) * (l.c(i) + t.c(i));
    }
    for i in s + 1..=l.h() {
        sq += l.p(i) * l.c(i);
    }
    for i in s + 1..=t.h() {
        sq += t.p(i) * t.c(i);
    }
    let cross_term = if s < l.h() && s < t.h() {
        let j = s + 1;
        Some(2 * (t.p(j) * l.c(j)).min(l.p(j) * t.c(j)))
    } else {
        None
    };
    Ok(JointSums {
        sum,
        sum_squares: sq + cross_term.unwrap_or(0),
        cross_term,
    })
}

/// γ′ from K·E′ (sign convention γ′ = −E′²): Σp + Σp̃ − 2d.
pub fn gamma_prime_a(bp: &BranchPair) -> i64 {
    bp.lambda.sum_p() + bp.lambda_t.sum_p() - 2 * bp.d()
}

/// γ′ from E′² = d² − Σm²: the right-hand side of the Σm² formula minus d².
/// For branches at distinct points there is no shared term.
pub fn gamma_prime_b(bp: &BranchPair) -> i64 {
    let sq = if bp.same_point {
        joint_multiplicities(bp)
            .expect("same point checked")
            .sum_squares
    } else {
        bp.lambda.sum_cp() + bp.lambda_t.sum_cp()
    };
    sq - bp.d() * bp.d()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DerivedParams {
    pub d: i64,
    pub alpha: i64,
    pub alpha_t: i64,
    pub alpha0: i64,
    pub beta: i64,
    pub big_p: i64,
    pub big_p_t: i64,
    pub k: i64,
    pub l: i64,
    pub k_t: i64,
    pub l_t: i64,
    /// α₀·d < P + P̃
    pub alpha0_bound: bool,
}

pub fn derived_params(bp: &BranchPair) -> DerivedParams {
    let (l, t) = (&bp.lambda, &bp.lambda_t);
    let split = |q: &HnSequence| {
        let c2 = q.c(2);
        let (c1, p1) = (q.c(1), q.p(1));
        assert!(
            (c1 - p1) % c2 == 0 && c1 % c2 == 0 && p1 % c2 == 0,
            "c₂ = gcd(c₁,p₁) divides c₁, p₁"
        );
        ((c1 - p1) / c2, c1 / c2, p1 / c2)
    };
    let (alpha, k, lq) = split(l);
    let (alpha_t, k_t, l_t) = split(t);
    let big_p = l.sum_p() - l.p(1);
    let big_p_t = t.sum_p() - t.p(1);
    let d = bp.d();
    let alpha0 = alpha.min(alpha_t);
    DerivedParams {
        d,
        alpha,
        alpha_t,
        alpha0,
        beta: l.c(1) - l.p(1) - t.c(1),
        big_p,
        big_p_t,
        k,
        l: lq,
        k_t,
        l_t,
        alpha0_bound: alpha0 * d < big_p + big_p_t,
    }
}

/// Random complete sequence with c₁ ≤ `max_c1`, optionally followed by a few
/// (1,1) pairs.
pub fn random_sequence<R: Rng>(rng: &mut R, max_c1: i64, trailing_ones: bool) -> HnSequence {
    let c1 = rng.gen_range(1..=max_c1);
    random_sequence_from(rng, c1, trailing_ones)
}

pub fn random_sequence_from<R: Rng>(rng: &mut R, c1: i64, trailing_ones: bool) -> HnSequence {
    let mut v = Vec::new();
    let mut c = c1;
    loop {
        let p = rng.gen_range(1..=c);
        v.push((c, p));
        c = c.gcd(&p);
        if c == 1 && (c, p) != (1, 1) || v.last() == Some(&(1, 1)) {
            break;
        }
    }
    if trailing_ones {
        for _ in 0..rng.gen_range(0..3) {
            v.push((1, 1));
        }
    }
    validate(&v).expect("generator keeps the gcd chain")
}

/// Random branch pair; when through one point, the first `s` pairs of the
/// second branch are a common multiple of the first's, so they are common.
pub fn random_branch_pair<R: Rng>(rng: &mut R, max_c1: i64) -> BranchPair {
    let same_point = rng.gen_bool(0.7);
    let a = random_sequence(rng, max_c1, same_point);
    if !same_point {
        let b = random_sequence(rng, max_c1, false);
        return BranchPair::new(a, b, false, 0).expect("distinct points");
    }
    let s = rng.gen_range(0..a.h());
    let (num, den) = if rng.gen_bool(0.5) {
        (rng.gen_range(1..=3), 1)
    } else {
        (1, 1)
    };
    let mut v: Vec<(i64, i64)> = a.pairs()[..s]
        .iter()
        .map(|q| (q.c * num / den, q.p * num / den))
        .collect();
    let c_next = if s == 0 {
        rng.gen_range(1..=max_c1)
    } else {
        let (c, p) = v[s - 1];
        c.gcd(&p)
    };
    let tail = random_sequence_from(rng, c_next, true);
    v.extend(tail.pairs().iter().map(|q| (q.c, q.p)));
    let b = validate(&v).expect("scaled prefix keeps the gcd chain");
    BranchPair::new(a, b, true, s).expect("prefix is common")
}
