//! JSON encodings of trees, fans, map types, and enumerative results.

use crate::error::{Error, Result};
use crate::invariants::{DescendantResult, HurwitzCycle, Insertion};
use crate::lattice::{Fan, QuotientLattice};
use crate::moduli::ModuliFan;
use crate::relmaps::{MapMode, MapType, RamificationData};
use crate::trees::MarkedTree;
use num::BigInt;
use serde_json::{json, Map, Value};

fn bigint_to_value(x: &BigInt) -> Result<Value> {
    let v = i64::try_from(x.clone())
        .map_err(|_| Error::Internal(format!("integer {x} exceeds the JSON range")))?;
    Ok(json!(v))
}

/// `{"n": int, "edges": [[vid,vid],...], "leaves": {"1": vid, ...}}`
pub fn tree_to_json(t: &MarkedTree) -> Value {
    let edges: Vec<Value> = t.edges().iter().map(|&(u, v)| json!([u, v])).collect();
    let mut leaves = Map::new();
    for l in 1..=t.n() {
        leaves.insert(l.to_string(), json!(t.leaf_vertex(l)));
    }
    json!({ "n": t.n(), "edges": edges, "leaves": leaves })
}

pub fn tree_from_json(v: &Value) -> Result<MarkedTree> {
    let n = v["n"]
        .as_u64()
        .ok_or_else(|| Error::InvalidInput("tree json: missing n".into()))? as usize;
    let edges: Vec<(usize, usize)> = v["edges"]
        .as_array()
        .ok_or_else(|| Error::InvalidInput("tree json: missing edges".into()))?
        .iter()
        .map(|e| {
            let pair = e.as_array().filter(|a| a.len() == 2);
            match pair {
                Some(a) => Ok((
                    a[0].as_u64().unwrap_or(u64::MAX) as usize,
                    a[1].as_u64().unwrap_or(u64::MAX) as usize,
                )),
                None => Err(Error::InvalidInput("tree json: bad edge".into())),
            }
        })
        .collect::<Result<_>>()?;
    let leaves_obj = v["leaves"]
        .as_object()
        .ok_or_else(|| Error::InvalidInput("tree json: missing leaves".into()))?;
    let mut leaf_at = vec![0usize; n];
    for l in 1..=n {
        let vid = leaves_obj
            .get(&l.to_string())
            .and_then(|x| x.as_u64())
            .ok_or_else(|| Error::InvalidInput(format!("tree json: missing leaf {l}")))?;
        leaf_at[l - 1] = vid as usize;
    }
    let num_vertices = edges
        .iter()
        .flat_map(|&(a, b)| [a, b])
        .chain(leaf_at.iter().copied())
        .max()
        .map_or(1, |m| m + 1);
    MarkedTree::new(n, num_vertices, edges, leaf_at)
}

/// `{"n": int, "rays": [[int,...],...], "cones": [[ray_idx,...],...],
/// "weights": [int,...]}`; rays serialized as ambient representatives.
pub fn fan_to_json(fan: &Fan) -> Result<Value> {
    let rays: Vec<Value> = fan
        .rays()
        .iter()
        .map(|r| {
            let coords: Result<Vec<Value>> =
                r.representative().coords.iter().map(bigint_to_value).collect();
            Ok(Value::Array(coords?))
        })
        .collect::<Result<_>>()?;
    let cones: Vec<Value> = fan
        .maximal_cones()
        .iter()
        .map(|c| json!(c))
        .collect();
    let mut out = Map::new();
    out.insert("n".into(), json!(fan.n()));
    out.insert("rays".into(), Value::Array(rays));
    out.insert("cones".into(), Value::Array(cones));
    if let Some(w) = fan.weights() {
        out.insert("weights".into(), json!(w));
    }
    Ok(Value::Object(out))
}

pub fn fan_from_json(ctx: &QuotientLattice, v: &Value) -> Result<Fan> {
    let n = v["n"]
        .as_u64()
        .ok_or_else(|| Error::InvalidInput("fan json: missing n".into()))? as usize;
    if n != ctx.n() {
        return Err(Error::InvalidInput(format!(
            "fan json: n = {n} does not match context n = {}",
            ctx.n()
        )));
    }
    let ray_vals = v["rays"]
        .as_array()
        .ok_or_else(|| Error::InvalidInput("fan json: missing rays".into()))?;
    let mut rays = Vec::new();
    let expected = n * (n - 1) / 2;
    for rv in ray_vals {
        let coords: Vec<i64> = rv
            .as_array()
            .ok_or_else(|| Error::InvalidInput("fan json: bad ray".into()))?
            .iter()
            .map(|x| x.as_i64().ok_or_else(|| Error::InvalidInput("fan json: bad ray entry".into())))
            .collect::<Result<_>>()?;
        if coords.len() != expected {
            return Err(Error::InvalidInput(format!(
                "fan json: ray has {} coordinates, expected {expected}",
                coords.len()
            )));
        }
        rays.push(ctx.class(&crate::lattice::AmbientVector::from_i64(n, coords)));
    }
    let cone_vals = v["cones"]
        .as_array()
        .ok_or_else(|| Error::InvalidInput("fan json: missing cones".into()))?;
    let weights: Option<Vec<u64>> = v.get("weights").and_then(|w| {
        w.as_array()
            .map(|a| a.iter().filter_map(|x| x.as_u64()).collect())
    });
    let mut fan = Fan::new(n);
    for (ci, cv) in cone_vals.iter().enumerate() {
        let idx: Vec<usize> = cv
            .as_array()
            .ok_or_else(|| Error::InvalidInput("fan json: bad cone".into()))?
            .iter()
            .map(|x| {
                x.as_u64()
                    .map(|u| u as usize)
                    .ok_or_else(|| Error::InvalidInput("fan json: bad cone index".into()))
            })
            .collect::<Result<_>>()?;
        let cone_rays: Vec<_> = idx
            .iter()
            .map(|&i| {
                rays.get(i)
                    .cloned()
                    .ok_or_else(|| Error::InvalidInput("fan json: cone index out of range".into()))
            })
            .collect::<Result<_>>()?;
        let w = weights.as_ref().map(|ws| ws.get(ci).copied().unwrap_or(1));
        fan.add_cone(ctx, &cone_rays, w)?;
    }
    Ok(fan)
}

/// Tree JSON extended with `{"order": [[vid,...],...], "weights":
/// {"e0": w, ...}, "mode": "rubber"|"parametrized"}`.
pub fn maptype_to_json(mt: &MapType) -> Value {
    let mut v = tree_to_json(mt.source());
    let obj = v.as_object_mut().expect("tree json is an object");
    obj.insert("order".into(), json!(mt.order()));
    let mut weights = Map::new();
    for (ei, w) in mt.weights().iter().enumerate() {
        weights.insert(format!("e{ei}"), json!(w));
    }
    obj.insert("weights".into(), Value::Object(weights));
    let mode = match mt.mode() {
        MapMode::Rubber => json!("rubber"),
        MapMode::Parametrized { zero } => json!({
            "parametrized": serde_json::to_value(zero).expect("zero position serializes"),
        }),
    };
    obj.insert("mode".into(), mode);
    v
}

/// Fan JSON extended with per-cone provenance
/// `{"cone": [...], "tree": ..., "order": [[...],...]}`.
pub fn moduli_to_json(m: &ModuliFan) -> Result<Value> {
    let mut v = fan_to_json(&m.fan)?;
    let obj = v.as_object_mut().expect("fan json is an object");
    if let Some(x) = &m.x {
        obj.insert("x".into(), json!(x.entries()));
    }
    let provenance: Vec<Value> = m
        .fan
        .maximal_cones()
        .iter()
        .zip(&m.provenance)
        .map(|(cone, p)| {
            json!({
                "cone": cone,
                "tree": tree_to_json(&p.tree),
                "order": p.order,
            })
        })
        .collect();
    obj.insert("provenance".into(), Value::Array(provenance));
    Ok(v)
}

fn rat_string(r: &num::BigRational) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `{"value": int, "types": [{"tree":..., "assignment":...,
/// "multiplicity": "p/q"}]}`
pub fn descendant_to_json(
    x: &RamificationData,
    insertions: &[Insertion],
    res: &DescendantResult,
) -> Result<Value> {
    let types: Vec<Value> = res
        .types
        .iter()
        .map(|t| {
            json!({
                "tree": { "edges": t.edges, "leaves": t.leaves },
                "assignment": t.insertions,
                "multiplicity": rat_string(&t.multiplicity),
            })
        })
        .collect();
    let ins: Vec<Value> = insertions
        .iter()
        .map(|i| match &i.condition {
            crate::invariants::Condition::Point(p) => json!({"k": i.k, "pt": rat_string(p)}),
            crate::invariants::Condition::One => json!({"k": i.k}),
        })
        .collect();
    Ok(json!({
        "x": x.entries(),
        "insertions": ins,
        "value": bigint_to_value(&res.value)?,
        "types": types,
    }))
}

/// Weighted cells plus the input points.
pub fn cycle_to_json(c: &HurwitzCycle) -> Result<Value> {
    let cells: Vec<Value> = c
        .cells
        .iter()
        .map(|cell| {
            let verts: Vec<Vec<String>> = cell
                .vertices
                .iter()
                .map(|v| v.iter().map(rat_string).collect())
                .collect();
            let rays: Vec<Vec<String>> = cell
                .rays
                .iter()
                .map(|r| r.iter().map(rat_string).collect())
                .collect();
            Ok(json!({
                "vertices": verts,
                "rays": rays,
                "weight": bigint_to_value(&cell.weight)?,
                "types": cell.provenance,
            }))
        })
        .collect::<Result<_>>()?;
    let points: Vec<String> = c.points.iter().map(rat_string).collect();
    Ok(json!({
        "n": c.n,
        "k": c.k,
        "points": points,
        "cells": cells,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::enumerate_trees;

    #[test]
    fn tree_roundtrip() {
        for t in enumerate_trees(5, false).unwrap() {
            let v = tree_to_json(&t);
            let back = tree_from_json(&v).unwrap();
            assert_eq!(back, t);
        }
    }

    #[test]
    fn fan_roundtrip() {
        let m = crate::moduli::build_delta_n(5).unwrap();
        let ctx = QuotientLattice::new(5).unwrap();
        let v = fan_to_json(&m.fan).unwrap();
        let back = fan_from_json(&ctx, &v).unwrap();
        assert_eq!(back.maximal_cones().len(), m.fan.maximal_cones().len());
        assert_eq!(back.rays().len(), m.fan.rays().len());
    }
}
