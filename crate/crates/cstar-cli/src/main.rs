//! `cstar`: resolve branch data, run the elimination registry, evaluate BMY
//! instances, dump dual graphs and run seeded identity checks.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cstar_cli::report;
use cstar_core::bmy::{check_bmy, BmyInstance};
use cstar_core::eliminator::{
    load_registry, run_registry, RegistryReport, Scenario, ScenarioSpec, SolveOptions,
};
use cstar_core::graph::WeightedTree;
use cstar_core::hn::BranchPair;
use cstar_core::identities::{check_identities, IdentityOptions, DEFAULT_SEED};
use cstar_core::resolution::build_resolution;
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "cstar", version, about = "Exact combinatorics of C* curves in the plane")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the resolution of two branches at infinity and report its invariants.
    Resolve {
        /// Branch JSON: {"branches":[{"pairs":[[c,p],…]},…],"samePoint":bool,"s":n}.
        #[arg(long)]
        input: PathBuf,
        /// Assert the inequalities that need the no-good-asymptote assumption.
        #[arg(long)]
        no_asymptote: bool,
    },
    /// Run the scenario registry (or a scenario file) and compare with the expected outcomes.
    Verify {
        /// Scenario file to run instead of the shipped registry.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Only scenarios whose name contains this substring.
        #[arg(long)]
        filter: Option<String>,
        /// Multiply every search bound by K (genuine bounds are constraints and stay put).
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(i64).range(1..))]
        bounds_scale: i64,
        /// Search node budget per scenario.
        #[arg(long, default_value_t = 1_000_000_000)]
        budget: u64,
    },
    /// Evaluate a BMY instance: {"chiOpen":n,"components":[…],"pSquared":"a/b"}.
    Bmy {
        #[arg(long)]
        input: PathBuf,
    },
    /// Dump a tree (tree JSON or branch JSON, the latter resolved first) as dot text.
    Graph {
        #[arg(long)]
        input: PathBuf,
    },
    /// Seeded randomized checks of the multiplicity, bookkeeping, bark and determinant identities.
    CheckIdentities {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Vertex cap for the random rewrite sequences.
        #[arg(long, default_value_t = 20)]
        max_vertices: usize,
    },
}

/// Exit 1 for a failed check, 2 for unusable input.
enum Failure {
    Check(String),
    Usage(String),
}

struct Output {
    text: String,
    pass: bool,
}

fn read_json(path: &PathBuf) -> Result<serde_json::Value, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn render<T: Serialize>(format: Format, value: &T, text: impl FnOnce() -> String) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value).expect("serializable");
            s.push('\n');
            s
        }
        Format::Text => text(),
    }
}

fn parse_branches(path: &PathBuf) -> Result<BranchPair, Failure> {
    let v = read_json(path)?;
    BranchPair::from_json_str(&v.to_string())
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn resolve(path: &PathBuf, no_asymptote: bool, format: Format) -> Result<Output, Failure> {
    let bp = parse_branches(path)?;
    let r = report::resolve(&bp, no_asymptote).map_err(Failure::Check)?;
    Ok(Output {
        pass: r.failed().is_empty(),
        text: render(format, &r, || report::resolve_text(&r)),
    })
}

fn load_scenarios(input: Option<&PathBuf>) -> Result<Vec<Scenario>, Failure> {
    let Some(path) = input else {
        return load_registry().map_err(|e| Failure::Usage(e.to_string()));
    };
    let specs: Vec<ScenarioSpec> = serde_json::from_value(read_json(path)?)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    specs
        .into_iter()
        .map(|s| Scenario::compile(s).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))))
        .collect()
}

fn verify_text(r: &RegistryReport) -> String {
    let mut s = String::new();
    for o in &r.outcomes {
        let mark = if o.pass { "PASS" } else { "FAIL" };
        let found = match &o.error {
            Some(e) => format!("error: {e}"),
            None => format!("found {:?} over ({})", o.found, o.variables.join(", ")),
        };
        s.push_str(&format!("{mark} {} [{}] {found}, {} nodes\n", o.name, o.section, o.nodes));
        s.push_str(&format!("     \"{}\"\n", o.quote));
    }
    let passed = r.outcomes.iter().filter(|o| o.pass).count();
    s.push_str(&format!("{passed}/{} scenarios pass\n", r.outcomes.len()));
    s
}

fn verify(
    input: Option<&PathBuf>,
    filter: Option<&str>,
    bounds_scale: i64,
    budget: u64,
    format: Format,
) -> Result<Output, Failure> {
    let scenarios = load_scenarios(input)?;
    let opts = SolveOptions {
        budget,
        bounds_scale,
        parallel: true,
    };
    let r = run_registry(&scenarios, filter, opts);
    if r.outcomes.is_empty() {
        return Err(Failure::Usage(format!(
            "no scenarios matched {:?}",
            filter.unwrap_or("")
        )));
    }
    for o in &r.outcomes {
        if let Some(e) = &o.error {
            eprintln!("error: scenario {}: {e}", o.name);
        }
    }
    Ok(Output {
        pass: r.all_pass,
        text: render(format, &r, || verify_text(&r)),
    })
}

fn bmy(path: &PathBuf, format: Format) -> Result<Output, Failure> {
    let inst = BmyInstance::from_json_str(&read_json(path)?.to_string())
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let r = check_bmy(&inst).map_err(|e| Failure::Usage(e.to_string()))?;
    let r = report::BmyWithQuote {
        quote: report::Q_BMY.into(),
        report: r,
    };
    let quote = &r.quote;
    Ok(Output {
        pass: r.report.holds,
        text: render(format, &r, || {
            let r = &r.report;
            format!(
                "group orders  {}\nΣ 1/|Gᵢ|      {}\nlhs ((K+D)⁺)²  {}\nrhs           {}\nslack         {}\n[{}] \"{quote}\"\n",
                r.group_orders.join(", "),
                r.sum_inverse_orders,
                r.lhs,
                r.rhs,
                r.slack,
                if r.holds { "holds" } else { "FAILS" },
            )
        }),
    })
}

fn graph(path: &PathBuf, format: Format) -> Result<Output, Failure> {
    let v = read_json(path)?;
    let tree = if v.get("branches").is_some() {
        let bp = BranchPair::from_json_str(&v.to_string())
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        build_resolution(&bp, false)
            .map_err(|e| Failure::Check(e.to_string()))?
            .tree
    } else {
        WeightedTree::from_json_value(v)
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
    };
    Ok(Output {
        pass: true,
        text: render(format, &tree, || tree.to_dot()),
    })
}

fn identities(seed: u64, max_vertices: usize, format: Format) -> Output {
    let r = check_identities(IdentityOptions { seed, max_vertices });
    Output {
        pass: r.all_pass,
        text: render(format, &r, || {
            let mut s = format!("seed {}\n", r.seed);
            for c in &r.checks {
                let mark = if c.pass() { "PASS" } else { "FAIL" };
                s.push_str(&format!("{mark} {}: {} cases, {} failures\n", c.name, c.cases, c.failures));
                if let Some(f) = &c.first_failure {
                    s.push_str(&format!("     first failure: {f}\n"));
                }
            }
            s
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let f = cli.format;
    let result = match &cli.command {
        Command::Resolve {
            input,
            no_asymptote,
        } => resolve(input, *no_asymptote, f),
        Command::Verify {
            input,
            filter,
            bounds_scale,
            budget,
        } => verify(input.as_ref(), filter.as_deref(), *bounds_scale, *budget, f),
        Command::Bmy { input } => bmy(input, f),
        Command::Graph { input } => graph(input, f),
        Command::CheckIdentities { seed, max_vertices } => Ok(identities(*seed, *max_vertices, f)),
    };
    match result {
        Ok(out) => {
            print!("{}", out.text);
            if out.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Check(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
