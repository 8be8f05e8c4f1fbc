//! Named-object registry shared across invocations.
//!
//! A session file is a JSON object `{"schema": "cinfty/1", "rings": {...},
//! "morphisms": {...}, "weils": {...}}` mapping names to definitions.  Rings
//! store their generator count and relation expressions, morphisms reference
//! source and target rings by name, and Weil algebras store generator count,
//! truncation order, and relations.  Loading re-parses and re-verifies every
//! definition, so a session file never smuggles in an unchecked object; the
//! stored morphism status and algebra basis are informational.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use cinfty::ring::RingError;
use cinfty::{PolyNormalForm, RingMorphism, RingPresentation, SmoothExpr, WeilAlgebra};
use serde_json::{json, Map, Value};

use crate::{parse_exprs, CliError};

/// Current session schema tag.
pub const SCHEMA: &str = "cinfty/1";

/// Built-in Weil algebras available without a session: `dual` is the dual
/// numbers, `jet2` and `jet3` the second and third jet algebras on the line.
pub fn builtin_weil(name: &str) -> Option<Arc<WeilAlgebra>> {
    let (num_gens, order) = match name {
        "dual" => (1, 2),
        "jet2" => (1, 3),
        "jet3" => (1, 4),
        _ => return None,
    };
    Some(WeilAlgebra::new(num_gens, order, &[]).expect("builtin parameters are valid"))
}

#[derive(Default)]
pub struct Session {
    rings: BTreeMap<String, Arc<RingPresentation>>,
    morphisms: BTreeMap<String, RingMorphism>,
    weils: BTreeMap<String, Arc<WeilAlgebra>>,
}

impl Session {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Loads `path` when given, otherwise starts an empty session.
    pub fn load_or_empty(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            Some(p) => Self::load(p),
            None => Ok(Self::empty()),
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError(format!("cannot read {}: {e}", path.display())))?;
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| CliError(format!("{} is not valid JSON: {e}", path.display())))?;
        let root = value
            .as_object()
            .ok_or_else(|| CliError(format!("{}: top level must be an object", path.display())))?;
        match root.get("schema").and_then(Value::as_str) {
            Some(SCHEMA) => {}
            other => {
                return Err(CliError(format!(
                    "{}: expected schema {SCHEMA:?}, found {other:?}",
                    path.display()
                )))
            }
        }

        let mut session = Self::empty();
        for (name, entry) in object_entries(root, "rings")? {
            let n = field_usize(entry, "n", name)?;
            let texts = field_strings(entry, "relations", name)?;
            let relations = parse_exprs(&texts, n, &format!("ring `{name}` relation"))?;
            let ring = RingPresentation::new(name.clone(), n, relations)
                .map_err(|e| CliError(format!("ring `{name}`: {e}")))?;
            session.insert_ring(name, ring)?;
        }
        for (name, entry) in object_entries(root, "morphisms")? {
            let source = field_str(entry, "source", name)?;
            let target = field_str(entry, "target", name)?;
            let source = session.ring(source)?.clone();
            let target = session.ring(target)?.clone();
            let texts = field_strings(entry, "images", name)?;
            let images = parse_exprs(&texts, target.num_gens(), &format!("morphism `{name}` image"))?;
            let morphism = RingMorphism::new(&source, &target, images).map_err(|e| match e {
                RingError::NotAMorphism { relation, .. } => CliError(format!(
                    "morphism `{name}` in the session file is not well defined (relation {relation})"
                )),
                other => CliError(format!("morphism `{name}`: {other}")),
            })?;
            session.insert_morphism(name, morphism)?;
        }
        for (name, entry) in object_entries(root, "weils")? {
            let m = field_usize(entry, "m", name)?;
            let order = field_usize(entry, "order", name)? as u32;
            let texts = field_strings(entry, "relations", name)?;
            let relations = parse_polys(&texts, m, name)?;
            let algebra = WeilAlgebra::new(m, order, &relations)
                .map_err(|e| CliError(format!("weil `{name}`: {e}")))?;
            session.insert_weil(name, algebra)?;
        }
        Ok(session)
    }

    /// The session as a JSON value, ready for [`crate::report::render`].
    pub fn to_value(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "rings": self
                .rings
                .iter()
                .map(|(k, r)| (k.clone(), r.json_value()))
                .collect::<Map<String, Value>>(),
            "morphisms": self
                .morphisms
                .iter()
                .map(|(k, m)| (k.clone(), m.json_value()))
                .collect::<Map<String, Value>>(),
            "weils": self
                .weils
                .iter()
                .map(|(k, w)| (k.clone(), w.json_value()))
                .collect::<Map<String, Value>>(),
        })
    }

    pub fn ring(&self, name: &str) -> Result<&Arc<RingPresentation>, CliError> {
        self.rings.get(name).ok_or_else(|| {
            CliError(format!(
                "unknown ring `{name}`; defined rings: {:?}",
                self.rings.keys().collect::<Vec<_>>()
            ))
        })
    }

    pub fn morphism(&self, name: &str) -> Result<&RingMorphism, CliError> {
        self.morphisms.get(name).ok_or_else(|| {
            CliError(format!(
                "unknown morphism `{name}`; defined morphisms: {:?}",
                self.morphisms.keys().collect::<Vec<_>>()
            ))
        })
    }

    /// Resolves a Weil algebra: session definitions first, then builtins.
    pub fn weil(&self, name: &str) -> Result<Arc<WeilAlgebra>, CliError> {
        if let Some(a) = self.weils.get(name) {
            return Ok(a.clone());
        }
        builtin_weil(name).ok_or_else(|| {
            CliError(format!(
                "unknown Weil algebra `{name}`; defined: {:?}, builtin: [\"dual\", \"jet2\", \"jet3\"]",
                self.weils.keys().collect::<Vec<_>>()
            ))
        })
    }

    pub fn insert_ring(
        &mut self,
        name: &str,
        ring: Arc<RingPresentation>,
    ) -> Result<(), CliError> {
        check_name(name)?;
        if self.rings.contains_key(name) {
            return Err(CliError(format!("name clash: ring `{name}` already defined")));
        }
        self.rings.insert(name.to_owned(), ring);
        Ok(())
    }

    pub fn insert_morphism(&mut self, name: &str, morphism: RingMorphism) -> Result<(), CliError> {
        check_name(name)?;
        if self.morphisms.contains_key(name) {
            return Err(CliError(format!(
                "name clash: morphism `{name}` already defined"
            )));
        }
        self.morphisms.insert(name.to_owned(), morphism);
        Ok(())
    }

    pub fn insert_weil(&mut self, name: &str, algebra: Arc<WeilAlgebra>) -> Result<(), CliError> {
        check_name(name)?;
        if builtin_weil(name).is_some() {
            return Err(CliError(format!(
                "name clash: `{name}` is a builtin Weil algebra"
            )));
        }
        if self.weils.contains_key(name) {
            return Err(CliError(format!(
                "name clash: Weil algebra `{name}` already defined"
            )));
        }
        self.weils.insert(name.to_owned(), algebra);
        Ok(())
    }
}

/// Names must look like identifiers; `.` is allowed so derived objects can be
/// filed under `parent.part`.
fn check_name(name: &str) -> Result<(), CliError> {
    let mut chars = name.chars();
    let head_ok = chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
    if head_ok
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
    {
        Ok(())
    } else {
        Err(CliError(format!(
            "invalid name `{name}`: use letters, digits, `_` and `.`, starting with a letter or `_`"
        )))
    }
}

fn parse_polys(texts: &[String], arity: usize, name: &str) -> Result<Vec<PolyNormalForm>, CliError> {
    texts
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let expr = SmoothExpr::parse(t, arity)
                .map_err(|e| CliError(format!("weil `{name}` relation {i}: {e}")))?;
            expr.poly_normal_form().ok_or_else(|| {
                CliError(format!(
                    "weil `{name}` relation {i}: relations must be polynomial, got `{t}`"
                ))
            })
        })
        .collect()
}

fn object_entries<'a>(
    root: &'a Map<String, Value>,
    key: &str,
) -> Result<Vec<(&'a String, &'a Map<String, Value>)>, CliError> {
    match root.get(key) {
        None => Ok(vec![]),
        Some(v) => v
            .as_object()
            .ok_or_else(|| CliError(format!("session field `{key}` must be an object")))?
            .iter()
            .map(|(name, entry)| {
                entry
                    .as_object()
                    .map(|obj| (name, obj))
                    .ok_or_else(|| CliError(format!("session entry `{name}` must be an object")))
            })
            .collect(),
    }
}

fn field_usize(entry: &Map<String, Value>, key: &str, name: &str) -> Result<usize, CliError> {
    entry
        .get(key)
        .and_then(Value::as_u64)
        .map(|v| v as usize)
        .ok_or_else(|| CliError(format!("entry `{name}`: missing or non-integer field `{key}`")))
}

fn field_str<'a>(
    entry: &'a Map<String, Value>,
    key: &str,
    name: &str,
) -> Result<&'a str, CliError> {
    entry
        .get(key)
        .and_then(Value::as_str)
        .ok_or_else(|| CliError(format!("entry `{name}`: missing or non-string field `{key}`")))
}

fn field_strings(entry: &Map<String, Value>, key: &str, name: &str) -> Result<Vec<String>, CliError> {
    match entry.get(key) {
        None => Ok(vec![]),
        Some(v) => v
            .as_array()
            .ok_or_else(|| CliError(format!("entry `{name}`: field `{key}` must be an array")))?
            .iter()
            .map(|item| {
                item.as_str().map(str::to_owned).ok_or_else(|| {
                    CliError(format!("entry `{name}`: field `{key}` must hold strings"))
                })
            })
            .collect(),
    }
}
