use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    matches_expected, solve, EliminatorError, Expected, Scenario, ScenarioSpec, SolveOptions,
};

/// Registry data files, compiled into the binary.
pub const REGISTRY_FILES: &[(&str, &str)] = &[
    ("basic_inequality.json", include_str!("../../registry/basic_inequality.json")),
    ("tangent_branches.json", include_str!("../../registry/tangent_branches.json")),
    ("separated_branches.json", include_str!("../../registry/separated_branches.json")),
];

pub fn load_registry() -> Result<Vec<Scenario>, EliminatorError> {
    let mut out = Vec::new();
    for (file, text) in REGISTRY_FILES {
        let specs: Vec<ScenarioSpec> = serde_json::from_str(text)
            .map_err(|e| EliminatorError::Parse(format!("{file}: {e}")))?;
        for s in specs {
            out.push(Scenario::compile(s)?);
        }
    }
    let mut names = std::collections::BTreeSet::new();
    for s in &out {
        if !names.insert(s.name().to_string()) {
            return Err(EliminatorError::Parse(format!("duplicate scenario {}", s.name())));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScenarioOutcome {
    pub name: String,
    pub section: String,
    pub quote: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub variables: Vec<String>,
    pub expected: Expected,
    pub found: Vec<Vec<i64>>,
    pub nodes: u64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RegistryReport {
    pub outcomes: Vec<ScenarioOutcome>,
    pub all_pass: bool,
}

pub fn run_scenario(sc: &Scenario, opts: SolveOptions) -> ScenarioOutcome {
    let (found, nodes, error) = match solve(sc, opts) {
        Ok(s) => (s.tuples, s.nodes, None),
        Err(e) => (Vec::new(), 0, Some(e.to_string())),
    };
    let pass = error.is_none() && matches_expected(&sc.spec.expected, &found);
    ScenarioOutcome {
        name: sc.spec.name.clone(),
        section: sc.spec.paper_location.section.clone(),
        quote: sc.spec.paper_location.quote.clone(),
        note: sc.spec.note.clone(),
        variables: sc.project.iter().map(|&i| sc.spec.variables[i].name.clone()).collect(),
        expected: sc.spec.expected.clone(),
        found,
        nodes,
        pass,
        error,
    }
}

/// Runs every scenario whose name contains `filter`, in registry order.
pub fn run_registry(
    scenarios: &[Scenario],
    filter: Option<&str>,
    opts: SolveOptions,
) -> RegistryReport {
    let selected: Vec<&Scenario> = scenarios
        .iter()
        .filter(|s| filter.is_none_or(|f| s.name().contains(f)))
        .collect();
    let outcomes: Vec<ScenarioOutcome> = if opts.parallel {
        selected.par_iter().map(|s| run_scenario(s, opts)).collect()
    } else {
        selected.iter().map(|s| run_scenario(s, opts)).collect()
    };
    let all_pass = outcomes.iter().all(|o| o.pass);
    RegistryReport { outcomes, all_pass }
}
