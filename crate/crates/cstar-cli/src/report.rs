use cstar_core::bmy::BmyReport;
use cstar_core::hn::{gamma_prime_a, gamma_prime_b, joint_multiplicities, BranchPair};
use cstar_core::resolution::{
    build_resolution, check_basic_inequality, minimalize, two_reduction, twig_report, Counters,
    TwigReport,
};
use serde::{Deserialize, Serialize};

/// One asserted or reported relation together with its source anchor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Relation {
    pub name: String,
    pub quote: String,
    pub holds: bool,
    /// When false the relation is only reported and cannot fail the run.
    pub asserted: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ResolveReport {
    pub input: serde_json::Value,
    pub no_asymptote: bool,
    pub d: i64,
    pub multiplicities: Vec<i64>,
    pub virtual_points: u32,
    pub e_squared: i64,
    pub e_dot_d: i64,
    pub gamma_prime: i64,
    pub gamma_prime_a: i64,
    pub gamma_prime_b: i64,
    pub k_squared: i64,
    pub k_dot_k_plus_d: i64,
    pub h_phi: u32,
    pub minimal: Counters,
    pub t: u32,
    pub basic_slack: i64,
    pub twigs: TwigReport,
    pub relations: Vec<Relation>,
}

impl ResolveReport {
    pub fn failed(&self) -> Vec<&Relation> {
        self.relations
            .iter()
            .filter(|r| r.asserted && !r.holds)
            .collect()
    }
}

const Q_SUM_M: &str = r"\sum m_i=c_1+\sum p_i-1+\tilde c_1+\sum \tilde p_i-1";
const Q_E_SQUARED: &str = r"\ov U^2-E'^2=d^2+\gamma'=\sum m_i^2";
const Q_H_PHI: &str = r"h_\Phi=6-\ks\cdot (\ks+D)=2+\varepsilon+\gamma+h_\Psi";
const Q_BASIC: &str = r"7+t\geq 2\varepsilon +\gamma";
const Q_SUM_E: &str = r"-(Bk(D+E))^2=\sum e_i\leq 1+\varepsilon";
pub const Q_BMY: &str =
    r"((K_{\ov X}+D)^+)^2\leq 3(\chi(X\setminus D)+\sum_{i=1}^k\frac{1}{|G_i|})";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BmyWithQuote {
    pub quote: String,
    #[serde(flatten)]
    pub report: BmyReport,
}

fn relation(name: &str, quote: &str, holds: bool, asserted: bool, detail: String) -> Relation {
    Relation {
        name: name.into(),
        quote: quote.into(),
        holds,
        asserted,
        detail,
    }
}

pub fn resolve(bp: &BranchPair, no_asymptote: bool) -> Result<ResolveReport, String> {
    let scene = build_resolution(bp, no_asymptote).map_err(|e| e.to_string())?;
    scene.check_structure().map_err(|e| e.to_string())?;
    let min = minimalize(&scene).map_err(|e| e.to_string())?;
    let red = two_reduction(&min).map_err(|e| e.to_string())?;
    let ineq = check_basic_inequality(&red, false).map_err(|e| e.to_string())?;
    let twigs = twig_report(&min).map_err(|e| e.to_string())?;

    let d = bp.d();
    let e_squared = -scene.gamma();
    let blown: i64 = scene.multiplicities.iter().map(|m| m * m).sum();
    let (sum_m, sum_m2) = scene.multiplicity_sums();
    let closed = if bp.same_point {
        joint_multiplicities(bp)
            .map(|j| (j.sum, j.sum_squares))
            .map_err(|e| e.to_string())?
    } else {
        let (l, t) = (&bp.lambda, &bp.lambda_t);
        (
            l.c(1) + l.sum_p() - 1 + t.c(1) + t.sum_p() - 1,
            l.sum_cp() + t.sum_cp(),
        )
    };
    let h_identity = 2 + min.epsilon() + min.gamma() + min.h_psi as i64;
    let relations = vec![
        relation(
            "Σm, Σm² match the closed forms",
            Q_SUM_M,
            (sum_m, sum_m2) == closed,
            true,
            format!("simulated ({sum_m}, {sum_m2}), closed form ({}, {})", closed.0, closed.1),
        ),
        relation(
            "E′² = d² − Σm²",
            Q_E_SQUARED,
            e_squared == d * d - blown,
            true,
            format!("E′² = {e_squared}, d² − Σm² = {}", d * d - blown),
        ),
        relation(
            "K·(K+D) = 6 − h_Φ = 4 − ε − γ − h_Ψ",
            Q_H_PHI,
            scene.k_dot_k_plus_d() == 6 - scene.h_phi as i64 && scene.h_phi as i64 == h_identity,
            true,
            format!(
                "K·(K+D) = {}, h_Φ = {}, 2+ε+γ+h_Ψ = {h_identity}",
                scene.k_dot_k_plus_d(),
                scene.h_phi
            ),
        ),
        relation(
            "7 + t ≥ 2ε + γ",
            Q_BASIC,
            ineq.holds,
            no_asymptote,
            format!("slack 7+t−2ε−γ = {}", ineq.basic_slack),
        ),
        relation(
            "Σeᵢ ≤ 1 + ε",
            Q_SUM_E,
            twigs.holds,
            no_asymptote,
            format!("Σeᵢ = {}, slack {}", twigs.sum, twigs.slack),
        ),
    ];
    Ok(ResolveReport {
        input: bp.to_json_value(),
        no_asymptote,
        d,
        multiplicities: scene.multiplicities.clone(),
        virtual_points: scene.virtual_points,
        e_squared,
        e_dot_d: scene.e_dot_d(),
        gamma_prime: scene.gamma(),
        gamma_prime_a: gamma_prime_a(bp),
        gamma_prime_b: gamma_prime_b(bp),
        k_squared: scene.k_squared,
        k_dot_k_plus_d: scene.k_dot_k_plus_d(),
        h_phi: scene.h_phi,
        minimal: min.counters(),
        t: red.t,
        basic_slack: ineq.basic_slack,
        twigs,
        relations,
    })
}

pub fn resolve_text(r: &ResolveReport) -> String {
    let mut s = String::new();
    let mut line = |k: &str, v: String| s.push_str(&format!("{k:<16}{v}\n"));
    line("input", r.input.to_string());
    line("no asymptote", r.no_asymptote.to_string());
    line("d", r.d.to_string());
    line("multiplicities", format!("{:?} (+{} virtual)", r.multiplicities, r.virtual_points));
    line("E′²", r.e_squared.to_string());
    line("E′·D′", r.e_dot_d.to_string());
    line("γ′", format!("{} (γ′_a = {}, γ′_b = {})", r.gamma_prime, r.gamma_prime_a, r.gamma_prime_b));
    line("K²", r.k_squared.to_string());
    line("K·(K+D)", r.k_dot_k_plus_d.to_string());
    line("h_Φ", r.h_phi.to_string());
    let m = &r.minimal;
    line("h_Ψ", m.h_psi.to_string());
    line("γ", m.gamma.to_string());
    line("ε", m.epsilon.to_string());
    line("t", r.t.to_string());
    line("components", m.components.to_string());
    for (w, e) in r.twigs.twigs.iter().zip(&r.twigs.capacities) {
        line("twig", format!("{w:?} e = {e}"));
    }
    line("Σeᵢ", r.twigs.sum.clone());
    for rel in &r.relations {
        let mark = match (rel.holds, rel.asserted) {
            (true, _) => "ok",
            (false, true) => "FAIL",
            (false, false) => "violated (not asserted)",
        };
        s.push_str(&format!("[{mark}] {}: {}\n    \"{}\"\n", rel.name, rel.detail, rel.quote));
    }
    s
}
