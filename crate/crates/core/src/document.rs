//! JSON documents for instances and matchings.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use serde_json::{Number, Value};

use crate::error::{Error, Result};
use crate::instance::{Cost, Instance, Matching, Member, Side};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub agents: Vec<MemberDocument>,
    pub jobs: Vec<MemberDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub costs: Option<Vec<CostDocument>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemberDocument {
    pub name: String,
    pub capacity: i64,
    pub preferences: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostDocument {
    pub agent: String,
    pub job: String,
    /// A JSON number or a decimal string.
    pub cost: Value,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchingDocument {
    pub edges: Vec<EdgeDocument>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDocument {
    pub agent: String,
    pub job: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color: Option<usize>,
}

/// Renders a cost as a JSON number with canonical decimal formatting.
pub fn cost_value(cost: Cost) -> Value {
    let number: Number = cost
        .to_string()
        .parse()
        .expect("canonical decimals are valid JSON numbers");
    Value::Number(number)
}

fn parse_cost(value: &Value) -> Result<Cost> {
    match value {
        Value::Number(n) => n.to_string().parse(),
        Value::String(s) => s.trim().parse(),
        other => Err(Error::InvalidCost(other.to_string())),
    }
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let doc: InstanceDocument = serde_json::from_str(text)?;
    instance_from_document(&doc)
}

pub fn instance_from_document(doc: &InstanceDocument) -> Result<Instance> {
    let mut names = HashMap::new();
    for (side, members) in [(Side::Agent, &doc.agents), (Side::Job, &doc.jobs)] {
        for (i, m) in members.iter().enumerate() {
            if names.insert(m.name.as_str(), (side, i)).is_some() {
                return Err(Error::DuplicateVertex(m.name.clone()));
            }
        }
    }
    let resolve = |name: &str, side: Side| -> Result<usize> {
        match names.get(name) {
            Some(&(s, i)) if s == side => Ok(i),
            _ => Err(Error::UnknownVertex(name.to_string())),
        }
    };
    let members = |list: &[MemberDocument], side: Side| -> Result<Vec<Member>> {
        list.iter()
            .map(|m| {
                // the upper bound is checked once symmetry is known to hold
                if m.capacity < 1 {
                    return Err(Error::CapacityOutOfRange {
                        name: m.name.clone(),
                        capacity: m.capacity,
                        degree: m.preferences.len(),
                    });
                }
                let preferences = m
                    .preferences
                    .iter()
                    .map(|p| resolve(p, side.opposite()))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Member {
                    name: m.name.clone(),
                    capacity: m.capacity as usize,
                    preferences,
                })
            })
            .collect()
    };
    let agents = members(&doc.agents, Side::Agent)?;
    let jobs = members(&doc.jobs, Side::Job)?;
    let costs = doc
        .costs
        .iter()
        .flatten()
        .map(|c| {
            Ok((
                resolve(&c.agent, Side::Agent)?,
                resolve(&c.job, Side::Job)?,
                parse_cost(&c.cost)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Instance::new(agents, jobs, &costs)
}

pub fn instance_document(inst: &Instance) -> InstanceDocument {
    let members = |side: Side| -> Vec<MemberDocument> {
        let others = inst.members(side.opposite());
        inst.members(side)
            .iter()
            .map(|m| MemberDocument {
                name: m.name.clone(),
                capacity: m.capacity as i64,
                preferences: m
                    .preferences
                    .iter()
                    .map(|&u| others[u].name.clone())
                    .collect(),
            })
            .collect()
    };
    let costs = inst
        .edges()
        .iter()
        .map(|e| CostDocument {
            agent: inst.agents()[e.agent].name.clone(),
            job: inst.jobs()[e.job].name.clone(),
            cost: cost_value(e.cost),
        })
        .collect();
    InstanceDocument {
        agents: members(Side::Agent),
        jobs: members(Side::Job),
        costs: Some(costs),
    }
}

pub fn instance_to_json(inst: &Instance) -> String {
    to_json(&instance_document(inst))
}

/// Parses an uncolored matching document against `inst`.
pub fn parse_matching(inst: &Instance, text: &str) -> Result<Matching> {
    let doc: MatchingDocument = serde_json::from_str(text)?;
    matching_from_document(inst, &doc)
}

pub fn matching_from_document(inst: &Instance, doc: &MatchingDocument) -> Result<Matching> {
    if doc.edges.iter().any(|e| e.color.is_some()) {
        return Err(Error::Syntax("expected an uncolored matching".into()));
    }
    let pairs: Vec<(&str, &str)> = doc
        .edges
        .iter()
        .map(|e| (e.agent.as_str(), e.job.as_str()))
        .collect();
    Matching::from_pairs(inst, &pairs)
}

pub fn matching_document(inst: &Instance, m: &Matching) -> MatchingDocument {
    MatchingDocument {
        edges: m
            .edges()
            .map(|id| {
                let (agent, job) = inst.edge_label(id);
                EdgeDocument {
                    agent,
                    job,
                    color: None,
                }
            })
            .collect(),
    }
}

pub fn matching_to_json(inst: &Instance, m: &Matching) -> String {
    to_json(&matching_document(inst, m))
}

/// Pretty JSON with a trailing newline. Field order follows the struct
/// definitions, so output is stable across runs.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("documents always serialize");
    text.push('\n');
    text
}
