//! Typed experiment parameters and their validation.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
    IntList(Vec<i64>),
    FloatList(Vec<f64>),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join<T: fmt::Display>(xs: &[T]) -> String {
            xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
        }
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Float(x) => write!(f, "{x}"),
            Value::Str(s) => write!(f, "{s}"),
            Value::IntList(v) => write!(f, "{}", join(v)),
            Value::FloatList(v) => write!(f, "{}", join(v)),
        }
    }
}

/// Lower bound on a real parameter.
#[derive(Clone, Copy, Debug)]
pub enum Bound {
    None,
    /// `x >= b`.
    AtLeast(f64),
    /// `x > b`.
    Above(f64),
}

impl Bound {
    fn check(self, x: f64) -> Option<String> {
        match self {
            Bound::None => None,
            Bound::AtLeast(b) if !(x >= b) => Some(format!("must be >= {b}")),
            Bound::Above(b) if !(x > b) => Some(format!("must be > {b}")),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub enum Kind {
    Bool,
    Int { min: i64, max: i64 },
    Float { lower: Bound, max: f64 },
    Choice(&'static [&'static str]),
    IntList { min: i64, max: i64 },
    FloatList { lower: Bound, max: f64 },
}

impl Kind {
    pub fn describe(&self) -> String {
        match self {
            Kind::Bool => "bool".into(),
            Kind::Int { min, max } => format!("integer in [{min}, {max}]"),
            Kind::Float { .. } => "real".into(),
            Kind::Choice(c) => format!("one of {}", c.join("|")),
            Kind::IntList { .. } => "comma-separated integers".into(),
            Kind::FloatList { .. } => "comma-separated reals".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ParamSpec {
    pub key: &'static str,
    pub kind: Kind,
    pub default: Value,
    pub help: &'static str,
}

pub fn int(key: &'static str, default: i64, min: i64, max: i64, help: &'static str) -> ParamSpec {
    ParamSpec { key, kind: Kind::Int { min, max }, default: Value::Int(default), help }
}

pub fn real(key: &'static str, default: f64, lower: Bound, help: &'static str) -> ParamSpec {
    ParamSpec { key, kind: Kind::Float { lower, max: f64::INFINITY }, default: Value::Float(default), help }
}

pub fn real_in(key: &'static str, default: f64, lower: Bound, max: f64, help: &'static str) -> ParamSpec {
    ParamSpec { key, kind: Kind::Float { lower, max }, default: Value::Float(default), help }
}

pub fn flag(key: &'static str, default: bool, help: &'static str) -> ParamSpec {
    ParamSpec { key, kind: Kind::Bool, default: Value::Bool(default), help }
}

pub fn choice(key: &'static str, options: &'static [&'static str], help: &'static str) -> ParamSpec {
    ParamSpec { key, kind: Kind::Choice(options), default: Value::Str(options[0].into()), help }
}

pub fn ints(key: &'static str, default: &[i64], min: i64, max: i64, help: &'static str) -> ParamSpec {
    ParamSpec { key, kind: Kind::IntList { min, max }, default: Value::IntList(default.to_vec()), help }
}

pub fn reals(key: &'static str, default: &[f64], lower: Bound, max: f64, help: &'static str) -> ParamSpec {
    ParamSpec { key, kind: Kind::FloatList { lower, max }, default: Value::FloatList(default.to_vec()), help }
}

/// A constraint failure naming the offending key.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub key: String,
    pub message: String,
}

impl Violation {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self { key: key.into(), message: message.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

/// An unvalidated parameter value from the command line or a config file.
#[derive(Clone, Debug, PartialEq)]
pub enum Raw {
    Text(String),
    Json(serde_json::Value),
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.trim() {
        "true" | "yes" | "1" => Some(true),
        "false" | "no" | "0" => Some(false),
        _ => None,
    }
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Option<Vec<T>> {
    let s = s.trim().trim_start_matches('[').trim_end_matches(']');
    if s.trim().is_empty() {
        return Some(Vec::new());
    }
    s.split(',').map(|p| p.trim().parse().ok()).collect()
}

fn json_f64(v: &serde_json::Value) -> Option<f64> {
    v.as_f64()
}

fn json_i64(v: &serde_json::Value) -> Option<i64> {
    v.as_i64().or_else(|| v.as_f64().filter(|x| x.fract() == 0.0 && x.abs() < 9.0e15).map(|x| x as i64))
}

/// Converts `raw` to the parameter's type, then checks its bounds.
pub fn coerce(spec: &ParamSpec, raw: &Raw) -> Result<Value, String> {
    let bad = || format!("expected {}", spec.kind.describe());
    let value = match (spec.kind, raw) {
        (Kind::Bool, Raw::Text(s)) => Value::Bool(parse_bool(s).ok_or_else(bad)?),
        (Kind::Bool, Raw::Json(v)) => Value::Bool(v.as_bool().ok_or_else(bad)?),
        (Kind::Int { .. }, Raw::Text(s)) => Value::Int(s.trim().parse().map_err(|_| bad())?),
        (Kind::Int { .. }, Raw::Json(v)) => Value::Int(json_i64(v).ok_or_else(bad)?),
        (Kind::Float { .. }, Raw::Text(s)) => Value::Float(s.trim().parse().map_err(|_| bad())?),
        (Kind::Float { .. }, Raw::Json(v)) => Value::Float(json_f64(v).ok_or_else(bad)?),
        (Kind::Choice(_), Raw::Text(s)) => Value::Str(s.trim().to_string()),
        (Kind::Choice(_), Raw::Json(v)) => Value::Str(v.as_str().ok_or_else(bad)?.to_string()),
        (Kind::IntList { .. }, Raw::Text(s)) => Value::IntList(parse_list(s).ok_or_else(bad)?),
        (Kind::IntList { .. }, Raw::Json(v)) => {
            Value::IntList(v.as_array().ok_or_else(bad)?.iter().map(json_i64).collect::<Option<_>>().ok_or_else(bad)?)
        }
        (Kind::FloatList { .. }, Raw::Text(s)) => Value::FloatList(parse_list(s).ok_or_else(bad)?),
        (Kind::FloatList { .. }, Raw::Json(v)) => {
            Value::FloatList(v.as_array().ok_or_else(bad)?.iter().map(json_f64).collect::<Option<_>>().ok_or_else(bad)?)
        }
    };
    check(spec, &value)?;
    Ok(value)
}

fn check_real(x: f64, lower: Bound, max: f64) -> Result<(), String> {
    if !x.is_finite() {
        return Err("must be finite".into());
    }
    if let Some(m) = lower.check(x) {
        return Err(m);
    }
    if x > max {
        return Err(format!("must be <= {max}"));
    }
    Ok(())
}

fn check(spec: &ParamSpec, value: &Value) -> Result<(), String> {
    match (spec.kind, value) {
        (Kind::Int { min, max }, Value::Int(i)) if *i < min || *i > max => Err(format!("must lie in [{min}, {max}], got {i}")),
        (Kind::Float { lower, max }, Value::Float(x)) => check_real(*x, lower, max).map_err(|m| format!("{m}, got {x}")),
        (Kind::Choice(options), Value::Str(s)) if !options.contains(&s.as_str()) => {
            Err(format!("must be one of {}, got {s:?}", options.join("|")))
        }
        (Kind::IntList { .. } | Kind::FloatList { .. }, Value::IntList(v)) if v.is_empty() => Err("must not be empty".into()),
        (Kind::FloatList { .. }, Value::FloatList(v)) if v.is_empty() => Err("must not be empty".into()),
        (Kind::IntList { min, max }, Value::IntList(v)) => match v.iter().find(|&&i| i < min || i > max) {
            Some(i) => Err(format!("entries must lie in [{min}, {max}], got {i}")),
            None => Ok(()),
        },
        (Kind::FloatList { lower, max }, Value::FloatList(v)) => {
            v.iter().try_for_each(|&x| check_real(x, lower, max).map_err(|m| format!("entries {m}, got {x}")))
        }
        _ => Ok(()),
    }
}

/// Resolved parameters; every declared key is present.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Params(pub BTreeMap<String, Value>);

impl Params {
    fn get(&self, key: &str) -> &Value {
        self.0.get(key).unwrap_or_else(|| panic!("undeclared parameter {key}"))
    }

    pub fn int(&self, key: &str) -> i64 {
        match self.get(key) {
            Value::Int(i) => *i,
            v => panic!("{key} is not an integer: {v:?}"),
        }
    }

    pub fn usize(&self, key: &str) -> usize {
        self.int(key) as usize
    }

    pub fn real(&self, key: &str) -> f64 {
        match self.get(key) {
            Value::Float(x) => *x,
            Value::Int(i) => *i as f64,
            v => panic!("{key} is not real: {v:?}"),
        }
    }

    pub fn flag(&self, key: &str) -> bool {
        match self.get(key) {
            Value::Bool(b) => *b,
            v => panic!("{key} is not a bool: {v:?}"),
        }
    }

    pub fn text(&self, key: &str) -> &str {
        match self.get(key) {
            Value::Str(s) => s,
            v => panic!("{key} is not a string: {v:?}"),
        }
    }

    pub fn ints(&self, key: &str) -> Vec<i64> {
        match self.get(key) {
            Value::IntList(v) => v.clone(),
            v => panic!("{key} is not an integer list: {v:?}"),
        }
    }

    pub fn usizes(&self, key: &str) -> Vec<usize> {
        self.ints(key).into_iter().map(|i| i as usize).collect()
    }

    pub fn reals(&self, key: &str) -> Vec<f64> {
        match self.get(key) {
            Value::FloatList(v) => v.clone(),
            Value::IntList(v) => v.iter().map(|&i| i as f64).collect(),
            v => panic!("{key} is not a real list: {v:?}"),
        }
    }
}

/// Applies `overrides` (later entries win) on top of the defaults.
pub fn resolve(specs: &[ParamSpec], overrides: &[(String, Raw)]) -> (Params, Vec<Violation>) {
    let mut params = Params(specs.iter().map(|s| (s.key.to_string(), s.default.clone())).collect());
    let mut violations = Vec::new();
    for (key, raw) in overrides {
        match specs.iter().find(|s| s.key == key) {
            None => {
                let known: Vec<&str> = specs.iter().map(|s| s.key).collect();
                violations.push(Violation::new(key, format!("unknown key; expected one of {}", known.join(", "))));
            }
            Some(spec) => match coerce(spec, raw) {
                Ok(v) => {
                    params.0.insert(key.clone(), v);
                }
                Err(m) => violations.push(Violation::new(key, m)),
            },
        }
    }
    (params, violations)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn specs() -> Vec<ParamSpec> {
        vec![
            int("n", 10, 2, 100, ""),
            real("sigma", 1.0, Bound::Above(0.0), ""),
            choice("mode", &["a", "b"], ""),
            reals("ps", &[0.0, 0.5], Bound::AtLeast(0.0), 1.0, ""),
            flag("on", false, ""),
        ]
    }

    fn text(k: &str, v: &str) -> (String, Raw) {
        (k.into(), Raw::Text(v.into()))
    }

    #[test]
    fn defaults_resolve_cleanly() {
        let (p, v) = resolve(&specs(), &[]);
        assert!(v.is_empty());
        assert_eq!(p.int("n"), 10);
        assert_eq!(p.text("mode"), "a");
    }

    #[test]
    fn negative_sigma_names_the_key() {
        let (_, v) = resolve(&specs(), &[text("sigma", "-1")]);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].key, "sigma");
    }

    #[test]
    fn text_and_json_overrides() {
        let (p, v) = resolve(
            &specs(),
            &[
                text("n", "12"),
                text("ps", "0.1, 0.2"),
                text("on", "true"),
                ("mode".into(), Raw::Json(serde_json::json!("b"))),
                ("sigma".into(), Raw::Json(serde_json::json!(2))),
            ],
        );
        assert!(v.is_empty(), "{v:?}");
        assert_eq!(p.int("n"), 12);
        assert_eq!(p.reals("ps"), vec![0.1, 0.2]);
        assert!(p.flag("on"));
        assert_eq!(p.real("sigma"), 2.0);
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        let (_, v) = resolve(&specs(), &[text("bogus", "1"), text("n", "1"), text("mode", "c"), text("ps", "0.1,x"), text("ps", "2")]);
        let keys: Vec<&str> = v.iter().map(|v| v.key.as_str()).collect();
        assert_eq!(keys, ["bogus", "n", "mode", "ps", "ps"]);
    }

    #[test]
    fn value_round_trips_through_json() {
        let (p, _) = resolve(&specs(), &[]);
        let s = serde_json::to_string(&p).unwrap();
        let back: BTreeMap<String, serde_json::Value> = serde_json::from_str(&s).unwrap();
        let raws: Vec<(String, Raw)> = back.into_iter().map(|(k, v)| (k, Raw::Json(v))).collect();
        let (q, v) = resolve(&specs(), &raws);
        assert!(v.is_empty());
        assert_eq!(p, q);
    }
}
