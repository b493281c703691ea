//! JSON input formats.
//!
//! System:
//! ```json
//! {"group": {"kind": "cyclic", "n": 2},
//!  "points": [{"label": "a", "mass": "1/2"}, {"label": "b", "mass": "1/2"}],
//!  "actions": {"T1": {"1": [1, 0]}, "T2": "trivial"}}
//! ```
//! Each action lists permutations (point indices or labels) for some group
//! elements, typically generators; the rest is filled in by `T^{gh} = T^g T^h`.
//! Sets are label lists, observables are maps from label to `"p/q"`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::group::{GroupDescriptor, IntegerLattice};
use crate::rational::{self, Rational};
use crate::symbolic::CylinderFunction;
use crate::system::{Action, FiniteMPS, Observable};

fn parse_json(text: &str, what: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::parse(format!("{what}:{}:{}", e.line(), e.column()), e.to_string()))
}

fn field<'a>(obj: &'a Value, key: &str, at: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::parse(at, format!("missing field \"{key}\"")))
}

fn as_str<'a>(v: &'a Value, at: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| Error::parse(at, "expected a string"))
}

fn parse_q(v: &Value, at: &str) -> Result<Rational> {
    match v {
        Value::String(s) => rational::parse(s).map_err(|e| Error::parse(at, e.to_string())),
        Value::Number(n) if n.is_i64() => Ok(Rational::from_integer(n.as_i64().expect("i64").into())),
        _ => Err(Error::parse(at, "expected a rational string such as \"1/3\"")),
    }
}

/// Parses a system; `cap` bounds the exhaustive associativity check.
pub fn parse_system(text: &str, cap: usize) -> Result<FiniteMPS> {
    let root = parse_json(text, "system")?;
    let group_desc: GroupDescriptor = serde_json::from_value(field(&root, "group", "system")?.clone())
        .map_err(|e| Error::parse("system.group", e.to_string()))?;
    let group = Arc::new(group_desc.build_capped(cap)?);

    let points = field(&root, "points", "system")?
        .as_array()
        .ok_or_else(|| Error::parse("system.points", "expected an array"))?;
    let mut labels = Vec::with_capacity(points.len());
    let mut masses = Vec::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        let at = format!("system.points[{i}]");
        labels.push(as_str(field(p, "label", &at)?, &format!("{at}.label"))?.to_string());
        masses.push(parse_q(field(p, "mass", &at)?, &format!("{at}.mass"))?);
    }
    let index: HashMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();

    let actions_obj = field(&root, "actions", "system")?
        .as_object()
        .ok_or_else(|| Error::parse("system.actions", "expected an object"))?;
    let mut actions = Vec::new();
    for k in 1..=actions_obj.len() {
        let name = format!("T{k}");
        let at = format!("system.actions.{name}");
        let spec = actions_obj
            .get(&name)
            .ok_or_else(|| Error::parse("system.actions", format!("actions must be named T1..T{}; {name} missing", actions_obj.len())))?;
        let action = match spec {
            Value::String(s) if s == "trivial" => Action::trivial(&group, labels.len()),
            Value::Object(map) => {
                let mut given = BTreeMap::new();
                for (g, perm) in map {
                    let gat = format!("{at}.\"{g}\"");
                    let g: usize = g.parse().map_err(|_| Error::parse(&gat, "element keys are indices"))?;
                    let perm = perm
                        .as_array()
                        .ok_or_else(|| Error::parse(&gat, "expected an array"))?
                        .iter()
                        .enumerate()
                        .map(|(j, v)| match v {
                            Value::Number(n) => n
                                .as_u64()
                                .map(|n| n as usize)
                                .ok_or_else(|| Error::parse(format!("{gat}[{j}]"), "expected a point index")),
                            Value::String(l) => index
                                .get(l.as_str())
                                .copied()
                                .ok_or_else(|| Error::parse(format!("{gat}[{j}]"), format!("unknown label \"{l}\""))),
                            _ => Err(Error::parse(format!("{gat}[{j}]"), "expected an index or a label")),
                        })
                        .collect::<Result<Vec<_>>>()?;
                    given.insert(g, perm);
                }
                Action::generated(&group, labels.len(), &given).map_err(|e| Error::parse(&at, e.to_string()))?
            }
            _ => return Err(Error::parse(&at, "expected \"trivial\" or a map element -> permutation")),
        };
        actions.push(action);
    }
    FiniteMPS::new(group, labels, masses, actions)
}

/// A set as a JSON list of labels.
pub fn parse_set(text: &str, x: &FiniteMPS) -> Result<Vec<usize>> {
    let root = parse_json(text, "set")?;
    let items = root.as_array().ok_or_else(|| Error::parse("set", "expected a list of labels"))?;
    let mut out = Vec::with_capacity(items.len());
    for (i, v) in items.iter().enumerate() {
        let at = format!("set[{i}]");
        let l = as_str(v, &at)?;
        let p = x
            .label_index(l)
            .ok_or_else(|| Error::parse(&at, format!("unknown label \"{l}\"")))?;
        if out.contains(&p) {
            return Err(Error::parse(&at, format!("label \"{l}\" repeated")));
        }
        out.push(p);
    }
    out.sort_unstable();
    Ok(out)
}

/// An observable as a JSON map label -> rational; missing labels are 0.
pub fn parse_observable(text: &str, x: &FiniteMPS) -> Result<Observable> {
    let root = parse_json(text, "observable")?;
    let map = root
        .as_object()
        .ok_or_else(|| Error::parse("observable", "expected a map from label to rational"))?;
    let mut values = vec![Rational::from_integer(0.into()); x.len()];
    for (l, v) in map {
        let at = format!("observable.\"{l}\"");
        let p = x
            .label_index(l)
            .ok_or_else(|| Error::parse(&at, format!("unknown label \"{l}\"")))?;
        values[p] = parse_q(v, &at)?;
    }
    Ok(Observable::new(values))
}

/// `{"support": [[factor, [i, j]], ..], "table": {"<letters>": "p/q", ..}}` on `Z^d`.
pub fn parse_cylinder(text: &str, lattice: IntegerLattice, alphabet: usize) -> Result<CylinderFunction<Vec<i64>>> {
    let root = parse_json(text, "cylinder")?;
    let support = field(&root, "support", "cylinder")?
        .as_array()
        .ok_or_else(|| Error::parse("cylinder.support", "expected an array"))?
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let at = format!("cylinder.support[{i}]");
            let (factor, elem): (usize, Vec<i64>) =
                serde_json::from_value(c.clone()).map_err(|e| Error::parse(&at, e.to_string()))?;
            if elem.len() != lattice.dim {
                return Err(Error::parse(&at, format!("element is not in Z^{}", lattice.dim)));
            }
            Ok((factor, elem))
        })
        .collect::<Result<Vec<_>>>()?;
    let table = field(&root, "table", "cylinder")?
        .as_object()
        .ok_or_else(|| Error::parse("cylinder.table", "expected an object"))?
        .iter()
        .map(|(k, v)| Ok((k.clone(), parse_q(v, &format!("cylinder.table.\"{k}\""))?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    CylinderFunction::from_letter_table(support, alphabet, &table)
}
