//! `hypiso-config v1` files: TOML descriptions of action systems.
//!
//! ```toml
//! format = "hypiso-config v1"
//! generators = ["f", "g"]
//!
//! [[action]]
//! name = "first"
//! model = "half-plane"
//! images = { f = [["2", "1"], ["1", "1"]], g = [["0", "-1"], ["1", "0"]] }
//!
//! [[action]]
//! name = "tree"
//! model = "bass-serre"
//! m = 2
//! n = 3
//! images = { f = "s t", g = "s" }
//! witness = "f"
//! ```

use std::collections::BTreeMap;

use hypiso_core::arith::{is_square, parse_rational};
use hypiso_core::{Action, ActionSystem, GroupWord, Isometry, Mat2, ModelKind, Rational, SpaceModel};
use num_traits::Signed;
use serde::Deserialize;
use thiserror::Error;

pub const FORMAT: &str = "hypiso-config v1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid {field}: {message}")]
    Validation { field: String, message: String },
}

impl ConfigError {
    fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Validation { field: field.into(), message: message.into() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub max_exponent: Option<u32>,
    pub witness_depth: Option<usize>,
    pub orbit_depth: Option<u32>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
enum Entry {
    Int(i64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
enum RawImage {
    Word(String),
    Matrix(Vec<Vec<Entry>>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAction {
    name: Option<String>,
    model: String,
    m: Option<u32>,
    n: Option<u32>,
    rank: Option<u32>,
    ball_radius: Option<u32>,
    images: BTreeMap<String, RawImage>,
    witness: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    format: Option<String>,
    generators: Vec<String>,
    #[serde(default)]
    words: Vec<String>,
    #[serde(default)]
    schedule: ScheduleConfig,
    #[serde(default)]
    action: Vec<RawAction>,
}

/// A validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub system: ActionSystem,
    /// Extra words to classify.
    pub words: Vec<GroupWord>,
    pub schedule: ScheduleConfig,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

fn rational(entry: &Entry, field: &str) -> Result<Rational, ConfigError> {
    match entry {
        Entry::Int(i) => Ok(Rational::from_integer((*i).into())),
        Entry::Text(t) => parse_rational(t).map_err(|e| ConfigError::invalid(field, e.to_string())),
    }
}

/// Matrix from rational entries, scaled to determinant one when the
/// determinant is a positive rational square.
fn matrix(rows: &[Vec<Entry>], field: &str) -> Result<Mat2, ConfigError> {
    if rows.len() != 2 || rows.iter().any(|r| r.len() != 2) {
        return Err(ConfigError::invalid(field, "expected a 2x2 matrix [[a, b], [c, d]]"));
    }
    let [a, b, c, d] = [&rows[0][0], &rows[0][1], &rows[1][0], &rows[1][1]].map(|e| rational(e, field));
    let (a, b, c, d) = (a?, b?, c?, d?);
    let det = &a * &d - &b * &c;
    let root = match is_square(&det) {
        Some(r) if det.is_positive() => r,
        _ => {
            return Err(ConfigError::invalid(
                field,
                format!("determinant {det} cannot be normalized to 1"),
            ))
        }
    };
    Mat2::new(a / &root, b / &root, c / &root, d / &root).map_err(|e| ConfigError::invalid(field, e.to_string()))
}

fn model_of(raw: &RawAction, field: &str, default_radius: u32) -> Result<SpaceModel, ConfigError> {
    let radius = raw.ball_radius.unwrap_or(default_radius);
    let need = |v: Option<u32>, name: &str| {
        v.ok_or_else(|| ConfigError::invalid(format!("{field}.{name}"), format!("required for model {:?}", raw.model)))
    };
    let kind = match raw.model.as_str() {
        "half-plane" => ModelKind::HalfPlane,
        "bass-serre" => ModelKind::BassSerre { m: need(raw.m, "m")?, n: need(raw.n, "n")? },
        "cayley-tree" => ModelKind::CayleyTree { rank: need(raw.rank, "rank")? },
        other => {
            return Err(ConfigError::invalid(
                format!("{field}.model"),
                format!("unknown model {other:?}; expected half-plane, bass-serre or cayley-tree"),
            ))
        }
    };
    let foreign: Vec<(&str, Option<u32>)> = match kind {
        ModelKind::HalfPlane => vec![("m", raw.m), ("n", raw.n), ("rank", raw.rank)],
        ModelKind::BassSerre { .. } => vec![("rank", raw.rank)],
        ModelKind::CayleyTree { .. } => vec![("m", raw.m), ("n", raw.n)],
    };
    let unused: Vec<&str> = foreign.iter().filter(|(_, v)| v.is_some()).map(|(k, _)| *k).collect();
    if let Some(k) = unused.first() {
        return Err(ConfigError::invalid(format!("{field}.{k}"), format!("not a parameter of model {:?}", raw.model)));
    }
    SpaceModel::new(kind, radius).map_err(|e| ConfigError::invalid(format!("{field}.model"), e.to_string()))
}

fn word(text: &str, field: &str, generators: &[String]) -> Result<GroupWord, ConfigError> {
    let w = GroupWord::parse(text).map_err(|e| ConfigError::invalid(field, e.to_string()))?;
    if let Some(g) = w.generators().find(|g| !generators.iter().any(|x| x == g)) {
        return Err(ConfigError::invalid(field, format!("unknown generator {g:?}")));
    }
    Ok(w)
}

/// Parses and validates a configuration. Tree actions without an explicit
/// `ball_radius` get `default_radius`.
pub fn parse_config(text: &str, default_radius: u32) -> Result<SystemConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_col(text, s.start));
        ConfigError::Parse { line, column, message: e.message().to_string() }
    })?;
    match raw.format.as_deref() {
        Some(FORMAT) => {}
        Some(other) => return Err(ConfigError::invalid("format", format!("unsupported format {other:?}, expected {FORMAT:?}"))),
        None => return Err(ConfigError::invalid("format", format!("missing; expected {FORMAT:?}"))),
    }
    if raw.action.is_empty() {
        return Err(ConfigError::invalid("action", "at least one [[action]] is required"));
    }
    let gens = raw.generators;
    let mut actions = Vec::new();
    let mut witnesses = Vec::new();
    for (i, ra) in raw.action.iter().enumerate() {
        let field = format!("action[{i}]");
        let model = model_of(ra, &field, default_radius)?;
        let mut images = BTreeMap::new();
        for (g, img) in &ra.images {
            let f = format!("{field}.images.{g}");
            if !gens.contains(g) {
                return Err(ConfigError::invalid(f, format!("unknown generator {g:?}")));
            }
            let iso = match (img, model.kind()) {
                (RawImage::Matrix(rows), ModelKind::HalfPlane) => Isometry::Mobius(matrix(rows, &f)?),
                (RawImage::Word(w), k) if k.is_tree() => {
                    model.parse_isometry(w).map_err(|e| ConfigError::invalid(&f, e.to_string()))?
                }
                (RawImage::Word(_), _) => return Err(ConfigError::invalid(f, "half-plane images are 2x2 matrices")),
                (RawImage::Matrix(_), _) => return Err(ConfigError::invalid(f, "tree images are words")),
            };
            images.insert(g.clone(), iso);
        }
        if let Some(g) = gens.iter().find(|g| !images.contains_key(*g)) {
            return Err(ConfigError::invalid(format!("{field}.images.{g}"), "missing image"));
        }
        let name = ra.name.clone().unwrap_or_else(|| format!("a{}", i + 1));
        let action = Action::new(name, model, images).map_err(|e| ConfigError::invalid(&field, e.to_string()))?;
        actions.push(action);
        witnesses.push(ra.witness.as_deref().map(|w| word(w, &format!("{field}.witness"), &gens)).transpose()?);
    }
    let words = raw
        .words
        .iter()
        .enumerate()
        .map(|(i, w)| word(w, &format!("words[{i}]"), &gens))
        .collect::<Result<_, _>>()?;
    let system = ActionSystem::new(gens, actions, witnesses).map_err(|e| ConfigError::invalid("generators", e.to_string()))?;
    Ok(SystemConfig { system, words, schedule: raw.schedule })
}

#[cfg(test)]
mod tests {
    use super::*;

    const WORKED: &str = r#"
format = "hypiso-config v1"
generators = ["f", "g"]

[[action]]
model = "half-plane"
images = { f = [["2", "1"], ["1", "1"]], g = [["0", "-1"], ["1", "0"]] }

[[action]]
model = "half-plane"
images = { f = [[0, -1], [1, 0]], g = [[2, 1], [1, 1]] }
"#;

    #[test]
    fn worked_example_parses() {
        let c = parse_config(WORKED, 8).unwrap();
        assert_eq!(c.system.actions().len(), 2);
        assert_eq!(c.system.generators(), ["f", "g"]);
        assert_eq!(c.system.actions()[1].name, "a2");
    }

    #[test]
    fn determinant_is_normalized_or_rejected() {
        let scaled = WORKED.replace(r#"[["2", "1"], ["1", "1"]]"#, r#"[["4", "2"], ["2", "2"]]"#);
        let c = parse_config(&scaled, 8).unwrap();
        assert_eq!(c.system.actions()[0].image("f"), Some(&Isometry::Mobius(Mat2::from_ints(2, 1, 1, 1).unwrap())));
        let bad = WORKED.replace(r#"[["2", "1"], ["1", "1"]]"#, r#"[["2", "0"], ["0", "1"]]"#);
        match parse_config(&bad, 8) {
            Err(ConfigError::Validation { field, .. }) => assert_eq!(field, "action[0].images.f"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_positions() {
        let text = "format = \"hypiso-config v1\"\ngenerators = [\"f\"\n";
        match parse_config(text, 8) {
            Err(ConfigError::Parse { line, .. }) => assert!(line >= 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_generators_are_named() {
        let text = r#"
format = "hypiso-config v1"
generators = ["f"]
words = ["f h"]
[[action]]
model = "cayley-tree"
rank = 2
images = { f = "a b" }
"#;
        match parse_config(text, 8) {
            Err(ConfigError::Validation { field, message }) => {
                assert_eq!(field, "words[0]");
                assert!(message.contains("\"h\""));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn line_col_counts_from_one() {
        assert_eq!(line_col("ab\ncd", 4), (2, 2));
        assert_eq!(line_col("ab", 0), (1, 1));
    }
}
