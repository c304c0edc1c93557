//! Turning a solution node into a reportable composition: the path of
//! composition steps, a data-dependency execution order, a DOT rendering of
//! the whole tree, and a stable JSON answer document.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::registry::{ParamSet, Registry, ServiceId};
use crate::tree::{CompositionType, Cst, CstNode, NodeId, NodeKind};

/// One composition step along a root-to-solution path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub ctype: CompositionType,
    pub ws: BTreeSet<ServiceId>,
    pub d_out: ParamSet,
}

/// A complete composition answer extracted from a solution node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositionAnswer {
    pub services: BTreeSet<ServiceId>,
    pub steps: Vec<Step>,
    pub nws: usize,
    pub depth: usize,
    /// Empty until [`order_services`] fills it in.
    pub execution_order: Vec<ServiceId>,
}

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("node is not a solution node")]
    NotASolution,
    #[error("unorderable composition; stuck services: {}", .0.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", "))]
    Unorderable(Vec<ServiceId>),
}

/// Walk parent links from a solution node to the root, collecting steps in
/// root-to-leaf order.
pub fn extract_path(cst: &Cst, solution: NodeId) -> Result<CompositionAnswer, PlanError> {
    let node = cst.node(solution);
    if node.kind != NodeKind::Solution {
        return Err(PlanError::NotASolution);
    }
    let mut steps = Vec::new();
    let mut cursor = Some(solution);
    while let Some(c) = cursor {
        let n = cst.node(c);
        if n.parent.is_some() {
            steps.push(Step {
                ctype: n.ctype,
                ws: n.ws.clone(),
                d_out: n.d_out.clone(),
            });
        }
        cursor = n.parent;
    }
    steps.reverse();
    Ok(CompositionAnswer {
        services: cst.path_services(solution),
        steps,
        nws: node.nws,
        depth: node.depth,
        execution_order: Vec::new(),
    })
}

/// Greedy data-dependency schedule: starting from the query inputs,
/// repeatedly fire the smallest-id service whose inputs are available.
/// Fails loudly if some service can never fire.
pub fn order_services(
    mut answer: CompositionAnswer,
    q_in: &ParamSet,
    registry: &Registry,
) -> Result<CompositionAnswer, PlanError> {
    let mut available = q_in.clone();
    let mut pending: BTreeSet<ServiceId> = answer.services.clone();
    let mut order = Vec::with_capacity(pending.len());
    while !pending.is_empty() {
        let fireable = pending
            .iter()
            .find(|id| {
                let svc = registry.get(id).expect("composition uses known services");
                svc.inputs.is_subset(&available)
            })
            .cloned();
        match fireable {
            Some(id) => {
                let svc = registry.get(&id).unwrap();
                available.extend(svc.outputs.iter().cloned());
                pending.remove(&id);
                order.push(id);
            }
            None => return Err(PlanError::Unorderable(pending.into_iter().collect())),
        }
    }
    answer.execution_order = order;
    Ok(answer)
}

fn ctype_label(ctype: CompositionType) -> &'static str {
    match ctype {
        CompositionType::None => "root",
        CompositionType::Exact => "exact",
        CompositionType::Super => "super",
        CompositionType::Collaborative => "collab",
    }
}

fn node_label(node: &CstNode) -> String {
    let ws = node
        .ws
        .iter()
        .map(|s| s.as_str())
        .collect::<Vec<_>>()
        .join(",");
    let d_out = node
        .d_out
        .iter()
        .map(|p| p.canonical())
        .collect::<Vec<_>>()
        .join(",");
    if node.parent.is_none() {
        format!("root\\nneeds: {{{d_out}}}")
    } else {
        format!(
            "{} {{{ws}}}\\nnws={}\\nneeds: {{{d_out}}}",
            ctype_label(node.ctype),
            node.nws
        )
    }
}

/// Render the whole tree as a DOT digraph. Solution nodes are doubled,
/// unsolvable nodes dashed. Byte-stable for identical trees.
pub fn render_dot(cst: &Cst) -> String {
    let mut out = String::from("digraph cst {\n  rankdir=TB;\n  node [shape=box];\n");
    for node in cst.nodes() {
        let style = match node.kind {
            NodeKind::Solution => " peripheries=2 style=bold",
            NodeKind::Unsolvable => " style=dashed",
            _ => "",
        };
        writeln!(
            out,
            "  n{} [label=\"{}\"{}];",
            node.id.0,
            node_label(node),
            style
        )
        .unwrap();
    }
    for node in cst.nodes() {
        for (child, label) in [(node.left, "E"), (node.middle, "S"), (node.right, "C")] {
            if let Some(child) = child {
                writeln!(out, "  n{} -> n{} [label=\"{}\"];", node.id.0, child.0, label).unwrap();
            }
        }
    }
    out.push_str("}\n");
    out
}

/// Stable JSON schema for a composition answer. A not-found answer carries
/// only `found: false`.
#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct AnswerDoc {
    pub found: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub services: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<Vec<StepDoc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nws: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub execution_order: Option<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct StepDoc {
    pub composition_type: String,
    pub services: Vec<String>,
    pub remaining: Vec<String>,
}

impl AnswerDoc {
    pub fn not_found() -> AnswerDoc {
        AnswerDoc {
            found: false,
            services: None,
            steps: None,
            nws: None,
            depth: None,
            execution_order: None,
        }
    }

    pub fn from_answer(answer: &CompositionAnswer) -> AnswerDoc {
        AnswerDoc {
            found: true,
            services: Some(answer.services.iter().map(|s| s.to_string()).collect()),
            steps: Some(
                answer
                    .steps
                    .iter()
                    .map(|s| StepDoc {
                        composition_type: ctype_label(s.ctype).to_string(),
                        services: s.ws.iter().map(|w| w.to_string()).collect(),
                        remaining: s.d_out.iter().map(|p| p.canonical().to_string()).collect(),
                    })
                    .collect(),
            ),
            nws: Some(answer.nws),
            depth: Some(answer.depth),
            execution_order: Some(
                answer
                    .execution_order
                    .iter()
                    .map(|s| s.to_string())
                    .collect(),
            ),
        }
    }
}

/// Pretty-printed JSON with keys in schema order.
pub fn render_answer(answer: Option<&CompositionAnswer>) -> String {
    let doc = match answer {
        Some(a) => AnswerDoc::from_answer(a),
        None => AnswerDoc::not_found(),
    };
    serde_json::to_string_pretty(&doc).expect("answer document serializes")
}
