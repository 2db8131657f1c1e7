//! Scenario files: a TOML description of `(G, H_K, [(H_{L_i}, e_i)])`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use sha2::{Digest, Sha256};
use shaomega_core::brauer::Scenario;
use shaomega_core::gmodule::PData;
use shaomega_core::group::{build_group, FiniteGroup, GroupSpec, Subgroup};

use crate::error::{CliError, Result};

pub const SCENARIO_VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    version: u32,
    id: String,
    group: GroupDoc,
    subgroup_k: SubgroupDoc,
    factors: Vec<FactorDoc>,
    #[serde(default)]
    annotations: BTreeMap<String, String>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum GroupDoc {
    CyclicProduct { orders: Vec<u64> },
    Symmetric { degree: usize },
    Product { left: Box<GroupDoc>, right: Box<GroupDoc> },
    Table { table: Vec<Vec<usize>> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SubgroupDoc {
    generators: Vec<Vec<i64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FactorDoc {
    generators: Vec<Vec<i64>>,
    multiplicity: u32,
}

impl GroupDoc {
    fn spec(&self) -> GroupSpec {
        match self {
            GroupDoc::CyclicProduct { orders } => GroupSpec::CyclicProduct(orders.clone()),
            GroupDoc::Symmetric { degree } => GroupSpec::Symmetric(*degree),
            GroupDoc::Product { left, right } => GroupSpec::Product(Box::new(left.spec()), Box::new(right.spec())),
            GroupDoc::Table { table } => GroupSpec::Table(table.clone()),
        }
    }
}

/// A validated scenario together with its provenance.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub scenario: Scenario,
    pub spec: GroupSpec,
    /// SHA-256 of the file contents.
    pub hash: String,
    /// Informational messages such as subgroup closures.
    pub notices: Vec<String>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn subgroup(g: &FiniteGroup, spec: &GroupSpec, gens: &[Vec<i64>], what: &str, notices: &mut Vec<String>) -> Result<Subgroup> {
    let idx = gens
        .iter()
        .map(|c| {
            spec.element_index(c)
                .map_err(|e| CliError::Validation(format!("{what}: generator {c:?}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let h = g.subgroup_closure(&idx)?;
    let listed: std::collections::BTreeSet<usize> = idx.iter().copied().chain([g.identity()]).collect();
    if listed.len() < h.order() {
        notices.push(format!(
            "{what}: generator set is not closed; using its closure of order {}",
            h.order()
        ));
    }
    Ok(h)
}

/// Parses and validates scenario text.
pub fn parse_scenario(text: &str) -> Result<LoadedScenario> {
    let doc: Document = toml::from_str(text).map_err(|e| CliError::Parse {
        line: e.span().map_or(1, |s| line_of(text, s.start)),
        reason: e.message().to_string(),
    })?;
    if doc.version != SCENARIO_VERSION {
        return Err(CliError::Validation(format!(
            "unsupported scenario version {} (expected {SCENARIO_VERSION})",
            doc.version
        )));
    }
    if doc.id.trim().is_empty() {
        return Err(CliError::Validation("id must not be empty".into()));
    }
    if doc.factors.is_empty() {
        return Err(CliError::Validation("at least one [[factors]] entry is required".into()));
    }
    let spec = doc.group.spec();
    let g = build_group(&spec).map_err(|e| CliError::Validation(format!("group: {e}")))?;
    let mut notices = Vec::new();
    let hk = subgroup(&g, &spec, &doc.subgroup_k.generators, "subgroup_k", &mut notices)?;
    let mut factors = Vec::new();
    for (i, f) in doc.factors.iter().enumerate() {
        if f.multiplicity == 0 {
            return Err(CliError::Validation(format!("factors[{i}]: multiplicity must be at least 1")));
        }
        let h = subgroup(&g, &spec, &f.generators, &format!("factors[{i}]"), &mut notices)?;
        factors.push((h, f.multiplicity));
    }
    let mut scenario = Scenario::new(doc.id, g, hk, PData::new(factors)?)?;
    scenario.annotations = doc.annotations;
    Ok(LoadedScenario { scenario, spec, hash: hex::encode(Sha256::digest(text.as_bytes())), notices })
}

pub fn load_scenario(path: &Path) -> Result<LoadedScenario> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    parse_scenario(&text)
}
