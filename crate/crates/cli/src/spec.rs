//! Instance descriptions: a group, an expectation builder and its
//! parameters, the requested checks and the seed.

use std::path::Path;

use hypergroup_core::catalog::{self, NamedGroup};
use hypergroup_core::io::{parse_json, ExpectationDoc, GroupDoc};
use hypergroup_core::{ConditionalExpectation, GroupTable};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const BUILDERS: [&str; 4] = ["id", "double_coset", "conjugation", "automorphism_orbit"];

/// Largest order for which `"autos": "all"` enumerates automorphisms.
const MAX_AUTOMORPHISM_SEARCH: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupRef {
    Name(String),
    Inline(GroupDoc),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExpectationRef {
    Builder(String),
    Inline(ExpectationDoc),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementRef {
    Index(usize),
    Name(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AutosParam {
    /// `"all"`: every automorphism (small groups only).
    Keyword(String),
    /// Generators, each as the list of images of elements `0..n`.
    Generators(Vec<Vec<ElementRef>>),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuilderParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgroup: Option<Vec<ElementRef>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub autos: Option<AutosParam>,
}

fn default_seed() -> u64 {
    0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub group: GroupRef,
    pub expectation: ExpectationRef,
    #[serde(default)]
    pub params: BuilderParams,
    /// Empty means every check.
    #[serde(default)]
    pub checks: Vec<String>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl InstanceSpec {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(format!("instance spec: {e}")))
    }
}

/// Reads `value` as inline JSON when it starts with `{` or `[`, as a file
/// when it names an existing path, and otherwise returns it unchanged.
pub fn inline_or_file(value: &str) -> Result<Option<String>, CliError> {
    let t = value.trim();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(Some(t.to_string()));
    }
    if t.ends_with(".json") || Path::new(t).is_file() {
        return std::fs::read_to_string(t)
            .map(Some)
            .map_err(|e| CliError::Parse(format!("cannot read {t}: {e}")));
    }
    Ok(None)
}

pub fn group_ref_from_arg(value: &str) -> Result<GroupRef, CliError> {
    match inline_or_file(value)? {
        Some(text) => Ok(GroupRef::Inline(
            parse_json(&text).map_err(|e| CliError::Parse(format!("group: {e}")))?,
        )),
        None => Ok(GroupRef::Name(value.trim().to_string())),
    }
}

pub fn expectation_ref_from_arg(value: &str) -> Result<ExpectationRef, CliError> {
    match inline_or_file(value)? {
        Some(text) => Ok(ExpectationRef::Inline(
            parse_json(&text).map_err(|e| CliError::Parse(format!("expectation: {e}")))?,
        )),
        None => Ok(ExpectationRef::Builder(value.trim().to_string())),
    }
}

pub fn params_from_arg(value: &str) -> Result<BuilderParams, CliError> {
    let text = inline_or_file(value)?.unwrap_or_else(|| value.to_string());
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("params: {e}")))
}

impl GroupRef {
    pub fn label(&self) -> String {
        match self {
            GroupRef::Name(n) => n.clone(),
            GroupRef::Inline(doc) => format!("inline group of order {}", doc.order),
        }
    }

    /// Parses the reference; a table that is not a group is reported by the
    /// caller as a failed validation stage.
    pub fn resolve(&self) -> Result<Result<NamedGroup, hypergroup_core::Error>, CliError> {
        match self {
            GroupRef::Name(n) => catalog::group(n)
                .map(Ok)
                .map_err(|_| CliError::UnknownName(format!("group `{n}`"))),
            GroupRef::Inline(doc) => Ok(doc
                .to_table()
                .map(|t| NamedGroup::with_index_names("inline", t))),
        }
    }
}

impl ExpectationRef {
    pub fn label(&self) -> String {
        match self {
            ExpectationRef::Builder(b) => b.clone(),
            ExpectationRef::Inline(_) => "inline".into(),
        }
    }

    /// Rejects unknown builder names before any computation.
    pub fn check_name(&self) -> Result<(), CliError> {
        match self {
            ExpectationRef::Builder(b) if canonical_builder(b).is_none() => {
                Err(CliError::UnknownName(format!("expectation builder `{b}`")))
            }
            _ => Ok(()),
        }
    }
}

fn canonical_builder(name: &str) -> Option<&'static str> {
    match name.trim().to_ascii_lowercase().replace('-', "_").as_str() {
        "id" | "identity" => Some("id"),
        "double_coset" => Some("double_coset"),
        "conjugation" | "conj" => Some("conjugation"),
        "automorphism_orbit" => Some("automorphism_orbit"),
        _ => None,
    }
}

fn element(g: &NamedGroup, r: &ElementRef) -> Result<usize, CliError> {
    let found = match r {
        ElementRef::Index(i) => (*i < g.table.order()).then_some(*i),
        ElementRef::Name(n) => g.index_of(n),
    };
    found.ok_or_else(|| CliError::UnknownName(format!("element {r:?} of {}", g.name)))
}

/// All automorphisms of a small group by search over permutations fixing
/// the identity.
fn all_automorphisms(g: &GroupTable) -> Result<Vec<Vec<usize>>, CliError> {
    let n = g.order();
    if n > MAX_AUTOMORPHISM_SEARCH {
        return Err(CliError::Parse(format!(
            "\"autos\": \"all\" supports groups of order at most {MAX_AUTOMORPHISM_SEARCH}"
        )));
    }
    fn rec(g: &GroupTable, map: &mut Vec<Option<usize>>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        let Some(p) = map.iter().position(|m| m.is_none()) else {
            let m: Vec<usize> = map.iter().map(|x| x.expect("filled")).collect();
            let n = g.order();
            if (0..n).all(|a| (0..n).all(|b| m[g.mul(a, b)] == g.mul(m[a], m[b]))) {
                out.push(m);
            }
            return;
        };
        for q in 0..used.len() {
            if !used[q] {
                used[q] = true;
                map[p] = Some(q);
                rec(g, map, used, out);
                map[p] = None;
                used[q] = false;
            }
        }
    }
    let mut map = vec![None; n];
    let mut used = vec![false; n];
    map[g.identity()] = Some(g.identity());
    used[g.identity()] = true;
    let mut out = Vec::new();
    rec(g, &mut map, &mut used, &mut out);
    Ok(out)
}

fn check_automorphism(g: &GroupTable, index: usize, m: &[usize]) -> Result<(), hypergroup_core::Error> {
    let n = g.order();
    let mut seen = vec![false; n];
    for &x in m {
        if seen[x] {
            return Err(hypergroup_core::Error::NotAGroupOfAutomorphisms(format!(
                "generator {index} is not a permutation"
            )));
        }
        seen[x] = true;
    }
    for p in 0..n {
        for q in 0..n {
            if m[g.mul(p, q)] != g.mul(m[p], m[q]) {
                return Err(hypergroup_core::Error::NotAnAutomorphism { index, p, q });
            }
        }
    }
    Ok(())
}

/// Closes a list of maps under composition.
fn closure(n: usize, generators: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![(0..n).collect()];
    let mut frontier = out.clone();
    while let Some(a) = frontier.pop() {
        for b in &generators {
            let c: Vec<usize> = (0..n).map(|p| b[a[p]]).collect();
            if !out.contains(&c) {
                out.push(c.clone());
                frontier.push(c);
            }
        }
    }
    out
}

/// Builds the expectation. Parameter errors are [`CliError`]s; failures of
/// the builders' own validation are returned in the inner result.
pub fn build_expectation(
    spec: &InstanceSpec,
    g: &NamedGroup,
) -> Result<Result<ConditionalExpectation, hypergroup_core::Error>, CliError> {
    let table = &g.table;
    let builder = match &spec.expectation {
        ExpectationRef::Inline(doc) => return Ok(doc.to_expectation(table.order())),
        ExpectationRef::Builder(b) => canonical_builder(b)
            .ok_or_else(|| CliError::UnknownName(format!("expectation builder `{b}`")))?,
    };
    Ok(match builder {
        "id" => Ok(ConditionalExpectation::identity(table.order())),
        "conjugation" => Ok(ConditionalExpectation::conjugation(table)),
        "double_coset" => {
            let refs = spec
                .params
                .subgroup
                .as_ref()
                .ok_or_else(|| CliError::Parse("double_coset needs params.subgroup".into()))?;
            let h = refs.iter().map(|r| element(g, r)).collect::<Result<Vec<_>, _>>()?;
            ConditionalExpectation::double_coset(table, &h)
        }
        _ => {
            let autos = match spec
                .params
                .autos
                .as_ref()
                .ok_or_else(|| CliError::Parse("automorphism_orbit needs params.autos".into()))?
            {
                AutosParam::Keyword(k) if k == "all" => all_automorphisms(table)?,
                AutosParam::Keyword(k) => {
                    return Err(CliError::Parse(format!("unknown autos keyword `{k}`")))
                }
                AutosParam::Generators(gens) => {
                    let maps = gens
                        .iter()
                        .map(|m| m.iter().map(|r| element(g, r)).collect::<Result<Vec<_>, _>>())
                        .collect::<Result<Vec<_>, _>>()?;
                    if let Some(bad) = maps.iter().position(|m| m.len() != table.order()) {
                        return Err(CliError::Parse(format!(
                            "automorphism {bad} lists {} images for a group of order {}",
                            maps[bad].len(),
                            table.order()
                        )));
                    }
                    for (i, m) in maps.iter().enumerate() {
                        if let Err(e) = check_automorphism(table, i, m) {
                            return Ok(Err(e));
                        }
                    }
                    closure(table.order(), maps)
                }
            };
            ConditionalExpectation::automorphism_orbit(table, &autos)
        }
    })
}
