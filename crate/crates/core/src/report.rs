//! Report rendering: a stable JSON document and a short text digest.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::field::TensorState;
use crate::suite::{render_basis, LevelRecord, RelationReport, Status, SuiteConfig, SuiteOutcome, Summary};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format '{other}' (expected text or json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    pub energy: u32,
    pub charge: i64,
    pub word_depth: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigDoc {
    pub m: i64,
    pub n: i64,
    pub variant: String,
    pub mode_range: i64,
    pub caps: Caps,
    pub relations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDoc {
    pub coeff: String,
    pub basis: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultDoc {
    pub relation: String,
    pub i: usize,
    pub j: usize,
    pub modes: Vec<i64>,
    pub state: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lhs: Option<Vec<TermDoc>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rhs: Option<Vec<TermDoc>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryDoc {
    pub checked: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelDoc {
    pub relation: String,
    pub i: usize,
    pub j: usize,
    pub coefficient: String,
    pub expected: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub config: ConfigDoc,
    pub test_states: usize,
    pub results: Vec<ResultDoc>,
    pub summary: SummaryDoc,
    pub levels: Vec<LevelDoc>,
}

/// Terms in canonical basis order.
pub fn state_terms(s: &TensorState, rank: usize) -> Vec<TermDoc> {
    s.iter().map(|(b, c)| TermDoc { coeff: c.to_string(), basis: render_basis(b, rank) }).collect()
}

pub fn render_state(s: &TensorState, rank: usize) -> String {
    if s.is_zero() {
        return "0".into();
    }
    s.iter().map(|(b, c)| format!("({c}) [{}]", render_basis(b, rank))).collect::<Vec<_>>().join(" + ")
}

fn result_doc(r: &RelationReport, rank: usize) -> ResultDoc {
    ResultDoc {
        relation: r.instance.relation.label(),
        i: r.instance.i,
        j: r.instance.j,
        modes: r.instance.modes.clone(),
        state: r.state.clone(),
        status: match r.status {
            Status::Pass => "pass".into(),
            Status::Fail => "fail".into(),
        },
        lhs: r.lhs.as_ref().map(|s| state_terms(s, rank)),
        rhs: r.rhs.as_ref().map(|s| state_terms(s, rank)),
    }
}

fn level_doc(l: &LevelRecord) -> LevelDoc {
    LevelDoc {
        relation: l.relation.label(),
        i: l.i,
        j: l.j,
        coefficient: l.coefficient.to_string(),
        expected: l.expected.to_string(),
    }
}

pub fn config_doc(config: &SuiteConfig) -> ConfigDoc {
    ConfigDoc {
        m: config.m,
        n: config.n,
        variant: config.variant.to_string(),
        mode_range: config.mode_range,
        caps: Caps { energy: config.energy_cap, charge: config.charge_cap, word_depth: config.word_depth },
        relations: config.relations.clone(),
    }
}

fn summary_doc(s: &Summary) -> SummaryDoc {
    SummaryDoc { checked: s.checked, passed: s.passed, failed: s.failed }
}

pub fn report_doc(config: &SuiteConfig, outcome: &SuiteOutcome) -> ReportDoc {
    let rank = (config.m + config.n).max(0) as usize;
    ReportDoc {
        config: config_doc(config),
        test_states: outcome.states,
        results: outcome.reports.iter().map(|r| result_doc(r, rank)).collect(),
        summary: summary_doc(&outcome.summary),
        levels: outcome.levels.iter().map(level_doc).collect(),
    }
}

pub fn render_json(doc: &ReportDoc) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("report serializes");
    s.push('\n');
    s
}

pub fn render_text(doc: &ReportDoc) -> String {
    let c = &doc.config;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "D({},{}) variant={} modes=[-{},{}] energy<={} charge<={} word-depth={} test-states={}",
        c.m, c.n, c.variant, c.mode_range, c.mode_range, c.caps.energy, c.caps.charge, c.caps.word_depth, doc.test_states
    );
    let mut families: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for r in &doc.results {
        let e = families.entry(r.relation.as_str()).or_default();
        if r.status == "pass" {
            e.0 += 1;
        } else {
            e.1 += 1;
        }
    }
    for (rel, (pass, fail)) in &families {
        let _ = writeln!(out, "  relation {rel:<4} pass {pass:>6}  fail {fail:>6}");
    }
    for r in doc.results.iter().filter(|r| r.status == "fail") {
        let _ = writeln!(out, "FAIL {} i={} j={} modes={:?} on {}", r.relation, r.i, r.j, r.modes, r.state);
        for (side, terms) in [("lhs", &r.lhs), ("rhs", &r.rhs)] {
            let shown = match terms {
                Some(t) if !t.is_empty() => t.iter().map(|t| format!("({}) [{}]", t.coeff, t.basis)).collect::<Vec<_>>().join(" + "),
                _ => "0".into(),
            };
            let _ = writeln!(out, "     {side} = {shown}");
        }
    }
    for l in doc.levels.iter().filter(|l| l.coefficient != l.expected) {
        let _ = writeln!(out, "LEVEL {} i={} j={}: {} != {}", l.relation, l.i, l.j, l.coefficient, l.expected);
    }
    let s = &doc.summary;
    let _ = writeln!(out, "checked {} passed {} failed {}", s.checked, s.passed, s.failed);
    out
}

pub fn render_report(config: &SuiteConfig, outcome: &SuiteOutcome, format: Format) -> String {
    let doc = report_doc(config, outcome);
    match format {
        Format::Json => render_json(&doc),
        Format::Text => render_text(&doc),
    }
}
