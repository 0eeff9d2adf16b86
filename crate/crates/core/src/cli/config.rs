//! Configuration files: raw JSON schema, validation, and JSON-pointer diagnostics.

use crate::groupoid::{validate_groupoid, ActionSpec, EquivariantMap, FiniteAction, FiniteGroupoid, GroupoidError, GroupoidSpec};
use crate::invariant::InvariantMeasure;
use crate::modular::{OperatorMatrix, OperatorSpec};
use crate::valuation::Valuation;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("cannot read `{path}`: {message}")]
    Io { path: String, message: String },
    #[error("parse error in `{path}`: {message}")]
    Parse { path: String, message: String },
    #[error("validation error at {pointer}: {message}")]
    Validation { pointer: String, message: String },
}

impl ConfigError {
    fn at(pointer: impl Into<String>, message: impl ToString) -> Self {
        ConfigError::Validation {
            pointer: pointer.into(),
            message: message.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub groupoid: GroupoidSpec,
    #[serde(default)]
    pub actions: BTreeMap<String, ActionSpec>,
    #[serde(default)]
    pub measures: BTreeMap<String, RawMeasure>,
    #[serde(default)]
    pub operators: BTreeMap<String, RawOperator>,
    /// Global invariant measures: `{component representative: weight}`.
    #[serde(default)]
    pub invariant_measures: BTreeMap<String, BTreeMap<String, f64>>,
    #[serde(default)]
    pub equivariant_maps: BTreeMap<String, RawMap>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMeasure {
    pub on: String,
    pub weights: BTreeMap<String, f64>,
}

/// A path (relative to the config file) or an inline operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawOperator {
    Path(String),
    Inline(OperatorSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMap {
    pub source: String,
    pub target: String,
    pub assign: BTreeMap<String, String>,
}

/// A validated configuration.
#[derive(Debug, Clone)]
pub struct Model {
    pub groupoid: FiniteGroupoid,
    pub actions: BTreeMap<String, FiniteAction>,
    pub measures: BTreeMap<String, NamedValuation>,
    pub operators: BTreeMap<String, OperatorMatrix>,
    pub invariant_measures: BTreeMap<String, InvariantMeasure>,
    pub maps: BTreeMap<String, NamedMap>,
}

#[derive(Debug, Clone)]
pub struct NamedValuation {
    pub on: String,
    pub valuation: Valuation,
}

#[derive(Debug, Clone)]
pub struct NamedMap {
    pub source: String,
    pub target: String,
    pub map: EquivariantMap,
}

/// RFC 6901 pointer from path segments.
pub fn pointer<S: AsRef<str>>(segments: &[S]) -> String {
    segments
        .iter()
        .map(|s| format!("/{}", s.as_ref().replace('~', "~0").replace('/', "~1")))
        .collect()
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    serde_json::from_str(&text).map_err(|e| ConfigError::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn parse_config(path: &Path) -> Result<Model, ConfigError> {
    let raw: RawConfig = read_json(path)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    validate_config(&raw, &base)
}

/// Validate a parsed config; operator paths resolve against `base`.
pub fn validate_config(raw: &RawConfig, base: &Path) -> Result<Model, ConfigError> {
    let groupoid = validate_groupoid(&raw.groupoid).map_err(|e| groupoid_error(&raw.groupoid, e))?;

    let mut actions = BTreeMap::new();
    for (name, spec) in &raw.actions {
        let x = FiniteAction::from_spec(&groupoid, spec).map_err(|e| action_error(name, spec, e))?;
        actions.insert(name.clone(), x);
    }
    let action = |name: &str, at: &[&str]| {
        actions
            .get(name)
            .cloned()
            .ok_or_else(|| ConfigError::at(pointer(at), format!("unknown action `{name}`")))
    };

    let mut measures = BTreeMap::new();
    for (name, m) in &raw.measures {
        let x = action(&m.on, &["measures", name, "on"])?;
        let valuation =
            Valuation::new(&x, &m.weights).map_err(|e| ConfigError::at(pointer(&["measures", name, "weights"]), e))?;
        measures.insert(
            name.clone(),
            NamedValuation {
                on: m.on.clone(),
                valuation,
            },
        );
    }

    let mut invariant_measures = BTreeMap::new();
    for (name, w) in &raw.invariant_measures {
        let mu = InvariantMeasure::from_map(&groupoid, w)
            .map_err(|e| ConfigError::at(pointer(&["invariant_measures", name]), e))?;
        invariant_measures.insert(name.clone(), mu);
    }

    let mut maps = BTreeMap::new();
    for (name, m) in &raw.equivariant_maps {
        let source = action(&m.source, &["equivariant_maps", name, "source"])?;
        let target = action(&m.target, &["equivariant_maps", name, "target"])?;
        let map = EquivariantMap::from_assignment(&source, &target, &m.assign)
            .map_err(|e| ConfigError::at(pointer(&["equivariant_maps", name, "assign"]), e))?;
        maps.insert(
            name.clone(),
            NamedMap {
                source: m.source.clone(),
                target: m.target.clone(),
                map,
            },
        );
    }

    let mut operators = BTreeMap::new();
    for (name, op) in &raw.operators {
        let at = pointer(&["operators", name]);
        let spec = match op {
            RawOperator::Inline(s) => s.clone(),
            RawOperator::Path(p) => read_json::<OperatorSpec>(&base.join(p)).map_err(|e| ConfigError::at(&at, e))?,
        };
        operators.insert(name.clone(), build_operator(&actions, &spec).map_err(|m| ConfigError::at(&at, m))?);
    }

    Ok(Model {
        groupoid,
        actions,
        measures,
        operators,
        invariant_measures,
        maps,
    })
}

pub fn build_operator(actions: &BTreeMap<String, FiniteAction>, spec: &OperatorSpec) -> Result<OperatorMatrix, String> {
    let x = actions
        .get(&spec.carrier)
        .ok_or_else(|| format!("unknown carrier action `{}`", spec.carrier))?;
    OperatorMatrix::from_entries(x, &spec.entries).map_err(|e| e.to_string())
}

/// Read an operator file given on the command line.
pub fn load_operator_file(model: &Model, path: &Path) -> Result<OperatorMatrix, ConfigError> {
    let spec: OperatorSpec = read_json(path)?;
    build_operator(&model.actions, &spec).map_err(|m| ConfigError::at("", m))
}

fn groupoid_error(spec: &GroupoidSpec, e: GroupoidError) -> ConfigError {
    let morphism_at = |name: &str| {
        spec.morphisms
            .iter()
            .position(|m| m.name == name)
            .map(|k| pointer(&["groupoid".to_string(), "morphisms".into(), k.to_string()]))
    };
    let compose_at = |g: &str, h: &str| {
        spec.compose
            .iter()
            .position(|[a, b, _]| a == g && b == h)
            .map(|k| pointer(&["groupoid".to_string(), "compose".into(), k.to_string()]))
    };
    let ptr = match &e {
        GroupoidError::DuplicateObject(o) => spec
            .objects
            .iter()
            .rposition(|x| x == o)
            .map(|k| pointer(&["groupoid".to_string(), "objects".into(), k.to_string()])),
        GroupoidError::DuplicateMorphism(m) => spec
            .morphisms
            .iter()
            .rposition(|x| &x.name == m)
            .map(|k| pointer(&["groupoid".to_string(), "morphisms".into(), k.to_string()])),
        GroupoidError::DanglingEndpoint { morphism, .. } => morphism_at(morphism),
        GroupoidError::UnknownMorphism(m) => spec
            .compose
            .iter()
            .position(|t| t.contains(m))
            .map(|k| pointer(&["groupoid".to_string(), "compose".into(), k.to_string()])),
        GroupoidError::NotComposable { g, h }
        | GroupoidError::BadComposite { g, h, .. }
        | GroupoidError::ConflictingComposite { g, h } => compose_at(g, h),
        GroupoidError::MissingComposite { .. } | GroupoidError::NonAssociative { .. } => Some("/groupoid/compose".into()),
        GroupoidError::MissingIdentity(o) => spec
            .objects
            .iter()
            .position(|x| x == o)
            .map(|k| pointer(&["groupoid".to_string(), "objects".into(), k.to_string()])),
        GroupoidError::MissingInverse(m) => morphism_at(m),
        _ => None,
    };
    ConfigError::at(ptr.unwrap_or_else(|| "/groupoid".into()), e)
}

fn action_error(name: &str, spec: &ActionSpec, e: GroupoidError) -> ConfigError {
    let ptr = match &e {
        GroupoidError::UnknownObject(o) => pointer(&["actions", name, "fibers", o]),
        GroupoidError::UnknownMorphism(m)
        | GroupoidError::MissingTransport(m)
        | GroupoidError::NotABijection(m)
        | GroupoidError::IdentityNotTrivial(m) => pointer(&["actions", name, "maps", m]),
        GroupoidError::NotFunctorial { g, .. } if spec.maps.contains_key(g) => pointer(&["actions", name, "maps", g]),
        GroupoidError::DuplicateElement(_) => pointer(&["actions", name, "fibers"]),
        _ => pointer(&["actions", name]),
    };
    ConfigError::at(ptr, e)
}

/// Where operator paths given relative to a config resolve.
pub fn config_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> serde_json::Value {
        serde_json::json!({
            "groupoid": {"objects": ["o"], "morphisms": [{"name": "e", "src": "o", "dst": "o"}], "compose": [["e", "e", "e"]]},
            "actions": {"pt": {"fibers": {"o": ["p"]}}}
        })
    }

    fn validate(v: serde_json::Value) -> Result<Model, ConfigError> {
        validate_config(&serde_json::from_value(v).unwrap(), Path::new("."))
    }

    #[test]
    fn minimal_config_is_valid() {
        let m = validate(minimal()).unwrap();
        assert_eq!(m.groupoid.num_components(), 1);
        assert_eq!(m.actions["pt"].len(), 1);
    }

    #[test]
    fn dangling_endpoint_points_at_the_morphism() {
        let mut v = minimal();
        v["groupoid"]["morphisms"]
            .as_array_mut()
            .unwrap()
            .push(serde_json::json!({"name": "f", "src": "nowhere", "dst": "o"}));
        let err = validate(v).unwrap_err();
        assert!(matches!(err, ConfigError::Validation { ref pointer, .. } if pointer == "/groupoid/morphisms/1"), "{err}");
    }

    #[test]
    fn cross_references_are_resolved() {
        let mut v = minimal();
        v["measures"] = serde_json::json!({"mu": {"on": "missing", "weights": {}}});
        let err = validate(v).unwrap_err();
        assert!(matches!(err, ConfigError::Validation { ref pointer, .. } if pointer == "/measures/mu/on"));
        let mut v = minimal();
        v["operators"] = serde_json::json!({"a": {"carrier": "pt", "entries": [["p", "q", 1.0, 0.0]]}});
        let err = validate(v).unwrap_err();
        assert!(matches!(err, ConfigError::Validation { ref pointer, .. } if pointer == "/operators/a"));
    }

    #[test]
    fn pointer_escaping() {
        assert_eq!(pointer(&["a/b", "c~d"]), "/a~1b/c~0d");
    }
}
