//! Bounded exhaustive integer search over polynomial constraint systems and
//! the registry of case eliminations.

mod expr;
mod hirzebruch;
mod registry;

pub use expr::{Cmp, Constraint, Num, Parser, Term};
pub use hirzebruch::{hirzebruch_e0_squared, hirzebruch_genus_defect};
pub use registry::{load_registry, run_registry, run_scenario, RegistryReport, ScenarioOutcome, REGISTRY_FILES};

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicU64, Ordering};

use num_integer::Integer;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EliminatorError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("scenario {scenario}: search budget of {budget} nodes exceeded (largest range: {variable} in [{lower}, {upper}])")]
    Budget {
        scenario: String,
        budget: u64,
        variable: String,
        lower: i64,
        upper: i64,
    },
    #[error("division by zero")]
    DivisionByZero,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperLocation {
    pub section: String,
    pub quote: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub lower: i64,
    pub upper: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Expected {
    Empty,
    ExactSet(Vec<Vec<i64>>),
    Contains(Vec<Vec<i64>>),
}

/// Scenario as stored in the registry files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScenarioSpec {
    pub name: String,
    pub paper_location: PaperLocation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub variables: Vec<Variable>,
    pub constraints: Vec<Value>,
    /// Variables the solutions are projected onto; all when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub project: Option<Vec<String>>,
    pub expected: Expected,
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub spec: ScenarioSpec,
    pub constraints: Vec<Constraint>,
    pub project: Vec<usize>,
}

impl Scenario {
    pub fn compile(spec: ScenarioSpec) -> Result<Self, EliminatorError> {
        let mut vars = BTreeMap::new();
        for (i, v) in spec.variables.iter().enumerate() {
            if v.lower > v.upper {
                return Err(EliminatorError::Parse(format!(
                    "{}: empty range for {}",
                    spec.name, v.name
                )));
            }
            if vars.insert(v.name.clone(), i).is_some() {
                return Err(EliminatorError::Parse(format!(
                    "{}: duplicate variable {}",
                    spec.name, v.name
                )));
            }
        }
        let p = Parser { vars: &vars };
        let constraints = spec
            .constraints
            .iter()
            .map(|c| p.constraint(c))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| EliminatorError::Parse(format!("{}: {e}", spec.name)))?;
        let project = match &spec.project {
            None => (0..spec.variables.len()).collect(),
            Some(names) => names
                .iter()
                .map(|n| {
                    vars.get(n).copied().ok_or_else(|| {
                        EliminatorError::Parse(format!("{}: projection on unknown {n}", spec.name))
                    })
                })
                .collect::<Result<_, _>>()?,
        };
        Ok(Self {
            spec,
            constraints,
            project,
        })
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub budget: u64,
    pub bounds_scale: i64,
    pub parallel: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            budget: 1_000_000_000,
            bounds_scale: 1,
            parallel: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolutionSet {
    pub variables: Vec<String>,
    /// Projected tuples, sorted lexicographically.
    pub tuples: Vec<Vec<i64>>,
    pub nodes: u64,
}

struct Plan {
    bounds: Vec<(i128, i128)>,
    checks: Vec<Vec<usize>>,
    linear: Vec<Vec<(Cmp, Term)>>,
    constant: Vec<usize>,
}

fn scale_bounds(v: &Variable, k: i64) -> (i128, i128) {
    let lo = if v.lower < 0 { v.lower * k } else { v.lower };
    let hi = if v.upper > 0 { v.upper * k } else { v.upper };
    (lo as i128, hi as i128)
}

fn plan(sc: &Scenario, k: i64) -> Plan {
    let n = sc.spec.variables.len();
    let mut checks = vec![Vec::new(); n];
    let mut linear = vec![Vec::new(); n];
    let mut constant = Vec::new();
    for (ci, c) in sc.constraints.iter().enumerate() {
        match c.max_var() {
            None => constant.push(ci),
            Some(v) => {
                checks[v].push(ci);
                if let Some(l) = c.linear_in(v) {
                    linear[v].push(l);
                }
            }
        }
    }
    Plan {
        bounds: sc.spec.variables.iter().map(|v| scale_bounds(v, k)).collect(),
        checks,
        linear,
        constant,
    }
}

fn floor_div(r: Ratio<i128>) -> i128 {
    r.numer().div_floor(r.denom())
}

fn ceil_div(r: Ratio<i128>) -> i128 {
    r.numer().div_ceil(r.denom())
}

/// Narrows [lo, hi] for variable `i` using the constraints linear in it.
fn narrow(
    linear: &[(Cmp, Term)],
    env: &mut [i128],
    i: usize,
    mut lo: i128,
    mut hi: i128,
) -> Result<(i128, i128), EliminatorError> {
    for (op, f) in linear {
        env[i] = 0;
        let b = f.eval(env)?;
        env[i] = 1;
        let a = f.eval(env)?.sub(b);
        // a·x + b (op) 0, with op one of ==, <=, <
        let (op, a, b) = match op {
            Cmp::Ge => (Cmp::Le, a.neg(), b.neg()),
            Cmp::Gt => (Cmp::Lt, a.neg(), b.neg()),
            _ => (*op, a, b),
        };
        let (l, h) = match (a, b) {
            (Num::Int(a), Num::Int(b)) => int_range(op, a, b),
            (a, b) => rat_range(op, a.ratio(), b.ratio()),
        };
        lo = lo.max(l);
        hi = hi.min(h);
        if lo > hi {
            break;
        }
    }
    Ok((lo, hi))
}

const EMPTY: (i128, i128) = (1, 0);
const ALL: (i128, i128) = (i128::MIN, i128::MAX);

fn int_range(op: Cmp, a: i128, b: i128) -> (i128, i128) {
    // strict integer inequalities tighten by one
    let (op, b) = if op == Cmp::Lt { (Cmp::Le, b + 1) } else { (op, b) };
    if a == 0 {
        let ok = match op {
            Cmp::Eq => b == 0,
            Cmp::Le => b <= 0,
            _ => true,
        };
        return if ok { ALL } else { EMPTY };
    }
    match op {
        Cmp::Eq if b % a == 0 => (-b / a, -b / a),
        Cmp::Eq => EMPTY,
        Cmp::Le if a > 0 => (i128::MIN, Integer::div_floor(&-b, &a)),
        Cmp::Le => (Integer::div_ceil(&-b, &a), i128::MAX),
        _ => ALL,
    }
}

fn rat_range(op: Cmp, a: Ratio<i128>, b: Ratio<i128>) -> (i128, i128) {
    let zero = Ratio::from_integer(0);
    if a == zero {
        let ok = match op {
            Cmp::Eq => b == zero,
            Cmp::Le => b <= zero,
            Cmp::Lt => b < zero,
            _ => true,
        };
        return if ok { ALL } else { EMPTY };
    }
    let root = -b / a;
    let strict = op == Cmp::Lt;
    match op {
        Cmp::Eq if root.is_integer() => (root.to_integer(), root.to_integer()),
        Cmp::Eq => EMPTY,
        Cmp::Le | Cmp::Lt if a > zero => {
            let x = floor_div(root);
            (i128::MIN, if strict && root.is_integer() { x - 1 } else { x })
        }
        Cmp::Le | Cmp::Lt => {
            let x = ceil_div(root);
            (if strict && root.is_integer() { x + 1 } else { x }, i128::MAX)
        }
        _ => ALL,
    }
}

struct Search<'a> {
    sc: &'a Scenario,
    plan: &'a Plan,
    budget: u64,
    nodes: &'a AtomicU64,
}

impl Search<'_> {
    fn budget_error(&self) -> EliminatorError {
        let (idx, _) = self
            .plan
            .bounds
            .iter()
            .enumerate()
            .max_by_key(|(_, (lo, hi))| hi - lo)
            .expect("at least one variable");
        let (lo, hi) = self.plan.bounds[idx];
        EliminatorError::Budget {
            scenario: self.sc.spec.name.clone(),
            budget: self.budget,
            variable: self.sc.spec.variables[idx].name.clone(),
            lower: lo as i64,
            upper: hi as i64,
        }
    }

    fn candidates(&self, env: &mut [i128], i: usize) -> Result<(i128, i128), EliminatorError> {
        let (lo, hi) = self.plan.bounds[i];
        narrow(&self.plan.linear[i], env, i, lo, hi)
    }

    fn visit(&self, env: &mut [i128], i: usize, x: i128, out: &mut BTreeSet<Vec<i64>>) -> Result<(), EliminatorError> {
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.budget {
            return Err(self.budget_error());
        }
        env[i] = x;
        for &ci in &self.plan.checks[i] {
            if !self.sc.constraints[ci].holds(env)? {
                return Ok(());
            }
        }
        self.dfs(env, i + 1, out)
    }

    fn dfs(&self, env: &mut [i128], i: usize, out: &mut BTreeSet<Vec<i64>>) -> Result<(), EliminatorError> {
        if i == env.len() {
            out.insert(self.sc.project.iter().map(|&j| env[j] as i64).collect());
            return Ok(());
        }
        let (lo, hi) = self.candidates(env, i)?;
        let mut x = lo;
        while x <= hi {
            self.visit(env, i, x, out)?;
            x += 1;
        }
        Ok(())
    }
}

/// Every assignment within the (scaled) bounds satisfying all constraints,
/// projected and sorted.
pub fn solve(sc: &Scenario, opts: SolveOptions) -> Result<SolutionSet, EliminatorError> {
    let plan = plan(sc, opts.bounds_scale.max(1));
    let n = sc.spec.variables.len();
    let nodes = AtomicU64::new(0);
    let search = Search {
        sc,
        plan: &plan,
        budget: opts.budget,
        nodes: &nodes,
    };
    let mut env = vec![0i128; n];
    let mut tuples = BTreeSet::new();
    let constants_hold = plan
        .constant
        .iter()
        .map(|&ci| sc.constraints[ci].holds(&env))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .all(|b| b);
    if constants_hold {
        if n == 0 {
            tuples.insert(Vec::new());
        } else if opts.parallel {
            let (lo, hi) = search.candidates(&mut env, 0)?;
            let parts: Vec<Result<BTreeSet<Vec<i64>>, EliminatorError>> = (lo..=hi)
                .into_par_iter()
                .map(|x| {
                    let mut env = vec![0i128; n];
                    let mut out = BTreeSet::new();
                    search.visit(&mut env, 0, x, &mut out)?;
                    Ok(out)
                })
                .collect();
            for p in parts {
                tuples.extend(p?);
            }
        } else {
            search.dfs(&mut env, 0, &mut tuples)?;
        }
    }
    Ok(SolutionSet {
        variables: sc.project.iter().map(|&i| sc.spec.variables[i].name.clone()).collect(),
        tuples: tuples.into_iter().collect(),
        nodes: nodes.load(Ordering::Relaxed),
    })
}

/// Whether `found` meets `expected`.
pub fn matches_expected(expected: &Expected, found: &[Vec<i64>]) -> bool {
    match expected {
        Expected::Empty => found.is_empty(),
        Expected::ExactSet(s) => {
            let a: BTreeSet<&Vec<i64>> = s.iter().collect();
            let b: BTreeSet<&Vec<i64>> = found.iter().collect();
            a == b
        }
        Expected::Contains(s) => s.iter().all(|t| found.contains(t)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn scenario(v: Value) -> Scenario {
        Scenario::compile(serde_json::from_value(v).unwrap()).unwrap()
    }

    fn base(vars: Value, cons: Value) -> Value {
        json!({
            "name": "t",
            "paperLocation": {"section": "-", "quote": "-"},
            "variables": vars,
            "constraints": cons,
            "expected": "empty"
        })
    }

    #[test]
    fn linear_system_without_solutions() {
        let sc = scenario(base(
            json!([{"name":"s","lower":0,"upper":100},{"name":"b","lower":0,"upper":100}]),
            json!([
                ["==", ["+", ["*", 4, "s"], ["*", 3, "b"]], 28],
                ["==", ["+", ["*", 16, "s"], ["*", 9, "b"]], 108]
            ]),
        ));
        let r = solve(&sc, SolveOptions::default()).unwrap();
        assert!(r.tuples.is_empty());
        // propagation: b is pinned by the first equation once s is fixed
        assert!(r.nodes < 300);
    }

    #[test]
    fn two_solution_system() {
        let sc = scenario(base(
            json!([
                {"name":"g","lower":0,"upper":100},
                {"name":"s","lower":0,"upper":100},
                {"name":"b","lower":0,"upper":100},
                {"name":"p","lower":0,"upper":100}
            ]),
            json!([
                [">=", "g", 5], ["<=", "g", 6], [">=", "p", 1], ["<=", "p", 2],
                ["==", ["+", "g", 16], ["+", ["*", 3, "s"], ["*", 2, "b"]]],
                ["==", ["+", "g", 60], ["+", ["*", 9, "s"], ["*", 4, "b"], ["*", 2, "p"]]]
            ]),
        ));
        let r = solve(&sc, SolveOptions::default()).unwrap();
        assert_eq!(r.tuples, vec![vec![5, 7, 0, 1], vec![6, 6, 2, 2]]);
        let par = solve(&sc, SolveOptions { parallel: true, ..Default::default() }).unwrap();
        assert_eq!(par.tuples, r.tuples);
    }

    #[test]
    fn quadratic_strict_inequality() {
        let sc = scenario(base(
            json!([{"name":"c","lower":1,"upper":100}]),
            json!([["<", ["+", 6, ["^", "c", 2]], ["*", 5, "c"]]]),
        ));
        assert!(solve(&sc, SolveOptions::default()).unwrap().tuples.is_empty());
    }

    #[test]
    fn budget_names_largest_bound() {
        let sc = scenario(base(
            json!([{"name":"x","lower":0,"upper":1000},{"name":"y","lower":0,"upper":10}]),
            json!([["==", ["*", "x", "y", "y"], 7]]),
        ));
        let err = solve(&sc, SolveOptions { budget: 50, ..Default::default() }).unwrap_err();
        match err {
            EliminatorError::Budget { variable, .. } => assert_eq!(variable, "x"),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn propagation_agrees_with_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let c: Vec<i64> = (0..4).map(|_| rng.gen_range(-5..=5)).collect();
            let op = ["<=", "<", ">=", ">", "==", "!="][rng.gen_range(0..6)];
            let sc = scenario(base(
                json!([{"name":"x","lower":-10,"upper":10},{"name":"y","lower":-10,"upper":10}]),
                json!([[op, ["+", ["*", c[0], "x"], ["*", c[1], "y"], ["*", c[2], "x", "y"]], c[3]]]),
            ));
            let got = solve(&sc, SolveOptions::default()).unwrap().tuples;
            let mut want = Vec::new();
            for x in -10i64..=10 {
                for y in -10i64..=10 {
                    let l = c[0] * x + c[1] * y + c[2] * x * y;
                    let ok = match op {
                        "<=" => l <= c[3],
                        "<" => l < c[3],
                        ">=" => l >= c[3],
                        ">" => l > c[3],
                        "==" => l == c[3],
                        _ => l != c[3],
                    };
                    if ok {
                        want.push(vec![x, y]);
                    }
                }
            }
            assert_eq!(got, want, "{op} {c:?}");
        }
    }

    #[test]
    fn projection_dedups() {
        let mut v = base(
            json!([{"name":"x","lower":0,"upper":3},{"name":"y","lower":0,"upper":3}]),
            json!([["<=", "x", 1]]),
        );
        v["project"] = json!(["x"]);
        let sc = scenario(v);
        assert_eq!(solve(&sc, SolveOptions::default()).unwrap().tuples, vec![vec![0], vec![1]]);
    }

    #[test]
    fn expectations() {
        let f = vec![vec![1, 2], vec![3, 4]];
        assert!(matches_expected(&Expected::Contains(vec![vec![1, 2]]), &f));
        assert!(!matches_expected(&Expected::ExactSet(vec![vec![1, 2]]), &f));
        assert!(!matches_expected(&Expected::Empty, &f));
    }
}
