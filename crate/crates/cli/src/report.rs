//! Reports: an ordered list of `key=value` lines with a fixed header.
//!
//! The machine form is versioned by [`SCHEMA`]. It carries no timing or
//! host information so that identical inputs give identical bytes.

use std::fmt::Write as _;

use shaomega_core::brauer::Verdict;
use shaomega_core::AbelianStructure;

pub const SCHEMA: &str = "shaomega-report/1";

/// Standing identifications behind every Brauer-group reading of a report.
/// Only the Galois-module side is computed; these are assumed, not checked.
pub const ASSUMPTIONS: &str = "H3(k,kbar*)=0 for number fields; Sha2_w(F/k,M)=Sha2_w(M) for lattices, computed at the finite level Gal(E/k)";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub command: String,
    /// Canonical rendering of the command arguments.
    pub args: String,
    pub scenario_id: Option<String>,
    pub scenario_hash: Option<String>,
    pub budget_entries: u128,
    entries: Vec<(String, String)>,
}

fn clean(v: &str) -> String {
    v.replace(['\n', '\r'], " ")
}

impl Report {
    pub fn new(command: &str, args: String, budget_entries: u128) -> Self {
        Report {
            command: command.to_string(),
            args,
            scenario_id: None,
            scenario_hash: None,
            budget_entries,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.push((key.into(), clean(&value.to_string())));
    }

    pub fn structure(&mut self, key: &str, s: &AbelianStructure) {
        self.push(key, s.to_machine());
    }

    pub fn verdict(&mut self, v: &Verdict) {
        self.push("verdict.claim", &v.claim);
        for (i, r) in v.reasons.iter().enumerate() {
            self.push(format!("verdict.reason.{i}.id"), &r.id);
            self.push(format!("verdict.reason.{i}.holds"), r.holds);
            self.push(format!("verdict.reason.{i}.citation"), r.citation);
        }
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn header(&self) -> Vec<(String, String)> {
        vec![
            ("schema".into(), SCHEMA.into()),
            ("engine".into(), shaomega_core::ENGINE_VERSION.into()),
            ("assumptions".into(), ASSUMPTIONS.into()),
            ("command".into(), self.command.clone()),
            ("args".into(), self.args.clone()),
            ("scenario.id".into(), self.scenario_id.clone().unwrap_or_else(|| "-".into())),
            ("scenario.sha256".into(), self.scenario_hash.clone().unwrap_or_else(|| "-".into())),
            ("budget.max_entries".into(), self.budget_entries.to_string()),
        ]
    }

    pub fn to_machine(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.header().iter().chain(&self.entries) {
            let _ = writeln!(out, "{k}={v}");
        }
        out.push_str("end\n");
        out
    }

    /// Parses the machine form back; used to validate cache entries.
    pub fn from_machine(text: &str) -> Option<Self> {
        let mut lines = text.lines();
        let mut field = |name: &str| -> Option<String> {
            let l = lines.next()?;
            l.strip_prefix(name)?.strip_prefix('=').map(str::to_string)
        };
        if field("schema")? != SCHEMA
            || field("engine")? != shaomega_core::ENGINE_VERSION
            || field("assumptions")? != ASSUMPTIONS
        {
            return None;
        }
        let command = field("command")?;
        let args = field("args")?;
        let id = field("scenario.id")?;
        let hash = field("scenario.sha256")?;
        let budget = field("budget.max_entries")?.parse().ok()?;
        let mut entries = Vec::new();
        let mut ended = false;
        for l in lines {
            if l == "end" {
                ended = true;
                break;
            }
            let (k, v) = l.split_once('=')?;
            entries.push((k.to_string(), v.to_string()));
        }
        if !ended {
            return None;
        }
        let opt = |s: String| if s == "-" { None } else { Some(s) };
        Some(Report {
            command,
            args,
            scenario_id: opt(id),
            scenario_hash: opt(hash),
            budget_entries: budget,
            entries,
        })
    }

    /// Aligned human-readable view.
    pub fn to_human(&self, cached: bool) -> String {
        let mut out = format!("shaomega {} {}\n", self.command, self.args);
        if let Some(id) = &self.scenario_id {
            let _ = writeln!(out, "scenario: {id}");
        }
        if cached {
            out.push_str("(cached)\n");
        }
        let width = self.entries.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in &self.entries {
            let _ = writeln!(out, "  {k:<width$}  {v}");
        }
        out
    }
}
