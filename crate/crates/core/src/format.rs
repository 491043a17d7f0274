//! JSON instance and result files.
//!
//! Costs and LP values are exact: integers may be written as JSON numbers,
//! everything else as `"p/q"` strings. Emission goes through
//! [`serde_json::Value`], whose maps are ordered, so the output has sorted
//! keys and is byte-identical for equal inputs.
//!
//! ```json
//! {
//!   "vertices": [0, 1, 2],
//!   "edges": [{"id": 0, "u": 0, "v": 1, "cost": 3}, {"id": 1, "u": 1, "v": 2, "cost": "3/7"}],
//!   "constraints": {
//!     "1": {"kind": "partition", "blocks": [{"edges": [0], "capacity": 1}, {"edges": [1], "capacity": 0}]}
//!   }
//! }
//! ```
//!
//! Constraint kinds are `free`, `uniform` (`rank`), `partition` (`blocks`),
//! `laminar` (`sets`) and `explicit` (`ranks`, indexed by subset masks over
//! the ascending incident edge ids). An optional `ground` must list exactly the
//! incident edges of the vertex. Vertices without a constraint are free.

use crate::error::{Error, Result};
use crate::instance::{Edge, Instance};
use crate::matroid::{GroundSet, Matroid, Primitive};
use crate::oracle::OracleReport;
use crate::rational::{self, Rational};
use crate::rounding::SolveResult;
use crate::{EdgeId, VertexId};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    vertices: Vec<VertexId>,
    edges: Vec<RawEdge>,
    #[serde(default)]
    constraints: BTreeMap<VertexId, RawMatroid>,
    #[serde(default)]
    metadata: Option<Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEdge {
    id: EdgeId,
    u: VertexId,
    v: VertexId,
    cost: RawCost,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawCost {
    Int(i64),
    Text(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSet {
    edges: Vec<EdgeId>,
    capacity: usize,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RawMatroid {
    Free {
        #[serde(default)]
        ground: Option<Vec<EdgeId>>,
    },
    Uniform {
        #[serde(default)]
        ground: Option<Vec<EdgeId>>,
        rank: usize,
    },
    Partition {
        #[serde(default)]
        ground: Option<Vec<EdgeId>>,
        blocks: Vec<RawSet>,
    },
    Laminar {
        #[serde(default)]
        ground: Option<Vec<EdgeId>>,
        sets: Vec<RawSet>,
    },
    Explicit {
        #[serde(default)]
        ground: Option<Vec<EdgeId>>,
        ranks: Vec<u32>,
    },
}

fn sets(raw: Vec<RawSet>) -> Vec<(Vec<EdgeId>, usize)> {
    raw.into_iter().map(|s| (s.edges, s.capacity)).collect()
}

impl RawMatroid {
    fn split(self) -> (Option<Vec<EdgeId>>, Primitive) {
        match self {
            RawMatroid::Free { ground } => (ground, Primitive::Free),
            RawMatroid::Uniform { ground, rank } => (ground, Primitive::Uniform { rank }),
            RawMatroid::Partition { ground, blocks } => (
                ground,
                Primitive::Partition {
                    blocks: sets(blocks),
                },
            ),
            RawMatroid::Laminar { ground, sets: s } => {
                (ground, Primitive::Laminar { sets: sets(s) })
            }
            RawMatroid::Explicit { ground, ranks } => (ground, Primitive::Explicit { ranks }),
        }
    }
}

/// A parsed instance file. `metadata` is carried through untouched.
#[derive(Debug, Clone)]
pub struct InstanceFile {
    pub instance: Instance,
    pub metadata: Option<Value>,
}

fn json_error(e: serde_json::Error) -> Error {
    Error::parse(
        format!("line {} column {}", e.line(), e.column()),
        e.to_string(),
    )
}

fn parse_cost(raw: RawCost, ctx: &str) -> Result<Rational> {
    match raw {
        RawCost::Int(c) => Ok(rational::int(c)),
        RawCost::Text(s) => {
            rational::parse(&s).ok_or_else(|| Error::parse(ctx, format!("`{s}` is not a rational")))
        }
    }
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawInstance = serde_json::from_str(text).map_err(json_error)?;
        let edges = raw
            .edges
            .into_iter()
            .enumerate()
            .map(|(i, e)| {
                Ok(Edge {
                    id: e.id,
                    u: e.u,
                    v: e.v,
                    cost: parse_cost(e.cost, &format!("edges[{i}].cost"))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;

        let mut delta: BTreeMap<VertexId, Vec<EdgeId>> = BTreeMap::new();
        for e in &edges {
            delta.entry(e.u).or_default().push(e.id);
            delta.entry(e.v).or_default().push(e.id);
        }
        let mut constraints = BTreeMap::new();
        for (v, m) in raw.constraints {
            let ctx = format!("constraints.{v}");
            let mut incident: Vec<EdgeId> = delta.get(&v).cloned().unwrap_or_default();
            incident.sort_unstable();
            incident.dedup();
            let (ground, primitive) = m.split();
            if let Some(listed) = ground {
                let listed: BTreeSet<EdgeId> = listed.into_iter().collect();
                let expected: BTreeSet<EdgeId> = incident.iter().copied().collect();
                if listed != expected {
                    let missing: Vec<_> = expected.difference(&listed).map(|e| e.0).collect();
                    let extra: Vec<_> = listed.difference(&expected).map(|e| e.0).collect();
                    return Err(Error::parse(
                        format!("{ctx}.ground"),
                        format!("missing incident edges {missing:?}, non-incident edges {extra:?}"),
                    ));
                }
            }
            let ground = GroundSet::new(incident).map_err(|e| Error::parse(&ctx, e.to_string()))?;
            let matroid = Matroid::from_primitive(ground, &primitive)
                .map_err(|e| Error::parse(&ctx, e.to_string()))?;
            constraints.insert(v, matroid);
        }
        Ok(InstanceFile {
            instance: Instance::new(raw.vertices, edges, constraints)?,
            metadata: raw.metadata,
        })
    }

    /// Canonical JSON. Fails if a constraint is not a primitive kind.
    pub fn to_json(&self) -> Result<String> {
        emit_instance(&self.instance, self.metadata.as_ref())
    }
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    InstanceFile::parse(text).map(|f| f.instance)
}

pub fn read_instance(path: &std::path::Path) -> Result<InstanceFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::parse(path.display().to_string(), e.to_string()))?;
    InstanceFile::parse(&text).map_err(|e| match e {
        Error::Parse { context, message } => {
            Error::parse(format!("{}: {context}", path.display()), message)
        }
        other => other,
    })
}

fn cost_value(q: &Rational) -> Value {
    if rational::is_integral(q) {
        if let Ok(i) = i64::try_from(q.numer()) {
            return Value::from(i);
        }
    }
    Value::from(rational::to_text(q))
}

fn set_values(sets: &[(Vec<EdgeId>, usize)]) -> Value {
    Value::from(
        sets.iter()
            .map(|(edges, cap)| serde_json::json!({"edges": edges, "capacity": cap}))
            .collect::<Vec<_>>(),
    )
}

fn matroid_value(m: &Matroid) -> Result<Value> {
    let p = m.primitive().ok_or_else(|| {
        Error::InvalidMatroid(format!(
            "{} is not a primitive kind and cannot be written",
            m.kind_name()
        ))
    })?;
    let mut obj = serde_json::Map::new();
    obj.insert(
        "ground".into(),
        serde_json::to_value(m.ground().elements()).expect("ids serialize"),
    );
    let kind = match p {
        Primitive::Free => "free",
        Primitive::Uniform { rank } => {
            obj.insert("rank".into(), Value::from(rank));
            "uniform"
        }
        Primitive::Partition { blocks } => {
            obj.insert("blocks".into(), set_values(&blocks));
            "partition"
        }
        Primitive::Laminar { sets } => {
            obj.insert("sets".into(), set_values(&sets));
            "laminar"
        }
        Primitive::Explicit { ranks } => {
            obj.insert("ranks".into(), Value::from(ranks));
            "explicit"
        }
    };
    obj.insert("kind".into(), Value::from(kind));
    Ok(Value::Object(obj))
}

pub fn emit_instance(inst: &Instance, metadata: Option<&Value>) -> Result<String> {
    let edges: Vec<Value> = inst
        .edges()
        .iter()
        .map(|e| serde_json::json!({"id": e.id, "u": e.u, "v": e.v, "cost": cost_value(&e.cost)}))
        .collect();
    let mut constraints = serde_json::Map::new();
    for (v, m) in inst.constraints() {
        constraints.insert(v.to_string(), matroid_value(m)?);
    }
    let mut obj = serde_json::Map::new();
    obj.insert(
        "vertices".into(),
        serde_json::to_value(inst.vertices()).expect("ids serialize"),
    );
    obj.insert("edges".into(), Value::from(edges));
    obj.insert("constraints".into(), Value::Object(constraints));
    if let Some(meta) = metadata {
        obj.insert("metadata".into(), meta.clone());
    }
    Ok(canonical(&Value::Object(obj)))
}

fn canonical(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("a Value always serializes");
    s.push('\n');
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Optimal,
    Infeasible,
    Error,
}

/// The result of one solve, as written by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub status: Status,
    pub tree: Vec<EdgeId>,
    pub cost: Option<String>,
    pub violations: BTreeMap<VertexId, usize>,
    pub lp_initial: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ResultFile {
    pub fn optimal(r: &SolveResult, with_trace: bool) -> Self {
        ResultFile {
            status: Status::Optimal,
            tree: r.tree.clone(),
            cost: Some(rational::to_text(&r.cost)),
            violations: r.violations.clone(),
            lp_initial: Some(rational::to_text(&r.lp_initial)),
            iterations: Some(r.iterations),
            trace: with_trace.then(|| {
                serde_json::json!({
                    "events": r.trace,
                    "adaptations": r.adaptations,
                    "checks": r.checks,
                })
            }),
            verification: None,
            error: None,
        }
    }

    pub fn infeasible(reason: impl Into<String>) -> Self {
        Self::empty(Status::Infeasible, reason.into())
    }

    pub fn error(message: impl Into<String>) -> Self {
        Self::empty(Status::Error, message.into())
    }

    fn empty(status: Status, message: String) -> Self {
        ResultFile {
            status,
            tree: Vec::new(),
            cost: None,
            violations: BTreeMap::new(),
            lp_initial: None,
            iterations: None,
            trace: None,
            verification: None,
            error: Some(message),
        }
    }

    pub fn with_verification(mut self, report: &OracleReport) -> Self {
        self.verification = Some(serde_json::to_value(report).expect("report serializes"));
        self
    }

    pub fn to_json(&self) -> String {
        canonical(&serde_json::to_value(self).expect("result serializes"))
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(json_error)
    }
}
