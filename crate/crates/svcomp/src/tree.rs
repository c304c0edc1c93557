//! Composition search tree construction.
//!
//! Each live node is expanded into at most three children: a left child for
//! an exact match, a middle child for a super match, and a right child for a
//! collaborative group of partial matches. A child whose remaining desired
//! set is empty is a solution; a child that repeats an ancestor's desired
//! set, or that trips a build limit, is unsolvable.

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

use crate::registry::{ParamSet, Query, Registry, ServiceDescriptor, ServiceId};

/// Which match type produced a node. `None` only on the root.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompositionType {
    None,
    Exact,
    Super,
    Collaborative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Root,
    Internal,
    Unsolvable,
    Solution,
}

/// Index of a node within its tree's arena.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CstNode {
    pub id: NodeId,
    pub kind: NodeKind,
    pub ctype: CompositionType,
    /// Services added at this node.
    pub ws: BTreeSet<ServiceId>,
    /// Cumulative service count along the path from the root.
    pub nws: usize,
    /// Parameters still required after this node's composition.
    pub d_out: ParamSet,
    pub parent: Option<NodeId>,
    pub left: Option<NodeId>,
    pub middle: Option<NodeId>,
    pub right: Option<NodeId>,
    pub depth: usize,
}

impl CstNode {
    pub fn children(&self) -> impl Iterator<Item = NodeId> + '_ {
        [self.left, self.middle, self.right].into_iter().flatten()
    }
}

/// Termination guards. Construction never aborts on a trip; it sets the
/// tree's `truncated` flag instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildLimits {
    pub max_depth: usize,
    pub max_nodes: usize,
}

impl Default for BuildLimits {
    fn default() -> Self {
        BuildLimits {
            max_depth: 32,
            max_nodes: 10_000,
        }
    }
}

/// A built composition search tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cst {
    nodes: Vec<CstNode>,
    solutions: Vec<NodeId>,
    unsolvable_count: usize,
    truncated: bool,
    query: Query,
}

impl Cst {
    pub fn root(&self) -> &CstNode {
        &self.nodes[0]
    }

    pub fn node(&self, id: NodeId) -> &CstNode {
        &self.nodes[id.0]
    }

    pub fn nodes(&self) -> &[CstNode] {
        &self.nodes
    }

    /// Solution nodes in creation (level) order.
    pub fn solutions(&self) -> &[NodeId] {
        &self.solutions
    }

    pub fn unsolvable_count(&self) -> usize {
        self.unsolvable_count
    }

    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn query(&self) -> &Query {
        &self.query
    }

    /// Union of `ws` along the path from the root to `id`, inclusive.
    pub fn path_services(&self, id: NodeId) -> BTreeSet<ServiceId> {
        let mut services = BTreeSet::new();
        let mut cursor = Some(id);
        while let Some(c) = cursor {
            let node = self.node(c);
            services.extend(node.ws.iter().cloned());
            cursor = node.parent;
        }
        services
    }
}

#[derive(Debug, Error)]
pub enum QueryError {
    #[error("query has an empty desired output set")]
    EmptyDesiredOutputs,
    #[error("unknown parameters in query: {}", .0.join(", "))]
    UnknownParameters(Vec<String>),
}

/// Additional inputs a single chosen service needs beyond the query inputs.
pub fn required_inputs_single(service: &ServiceDescriptor, q_in: &ParamSet) -> ParamSet {
    service.inputs.difference(q_in).cloned().collect()
}

/// Additional inputs a collaborative group needs beyond the query inputs.
/// Members whose inputs are fully supplied by `q_in` can fire directly, so
/// their outputs are subtracted as well.
pub fn required_inputs_collab(group: &[&ServiceDescriptor], q_in: &ParamSet) -> ParamSet {
    assert!(!group.is_empty(), "collaborative group must be non-empty");
    let mut combined_inputs = ParamSet::new();
    let mut free_outputs = ParamSet::new();
    for svc in group {
        combined_inputs.extend(svc.inputs.iter().cloned());
        if svc.inputs.is_subset(q_in) {
            free_outputs.extend(svc.outputs.iter().cloned());
        }
    }
    combined_inputs
        .difference(q_in)
        .filter(|p| !free_outputs.contains(p))
        .cloned()
        .collect()
}

/// Smallest id wins.
pub fn choose_exact(candidates: &[ServiceId]) -> Option<ServiceId> {
    candidates.first().cloned()
}

/// Fewest surplus outputs wins; ties go to the smallest id.
pub fn choose_super(
    candidates: &[ServiceId],
    desired: &ParamSet,
    registry: &Registry,
) -> Option<ServiceId> {
    candidates
        .iter()
        .min_by_key(|id| {
            let svc = registry.get(id).expect("candidate is a known service");
            (svc.outputs.difference(desired).count(), (*id).clone())
        })
        .cloned()
}

/// Greedy set cover over `desired`: repeatedly pick the partial candidate
/// covering the most still-uncovered parameters, breaking ties by fewer
/// inputs outside `q_in`, then by smallest id. Returns the group once the
/// cover is complete, or `None` if the candidates cannot cover `desired`.
pub fn choose_collaborative(
    partials: &[ServiceId],
    desired: &ParamSet,
    q_in: &ParamSet,
    registry: &Registry,
) -> Option<BTreeSet<ServiceId>> {
    let mut uncovered = desired.clone();
    let mut chosen: BTreeSet<ServiceId> = BTreeSet::new();
    while !uncovered.is_empty() {
        let best = partials
            .iter()
            .filter(|id| !chosen.contains(id))
            .filter_map(|id| {
                let svc = registry.get(id).expect("candidate is a known service");
                let gain = svc.outputs.intersection(&uncovered).count();
                if gain == 0 {
                    return None;
                }
                let foreign_inputs = svc.inputs.difference(q_in).count();
                Some((std::cmp::Reverse(gain), foreign_inputs, id.clone()))
            })
            .min()?;
        let svc = registry.get(&best.2).unwrap();
        uncovered = uncovered.difference(&svc.outputs).cloned().collect();
        chosen.insert(best.2);
    }
    // a single service covering all of desired would have classified as
    // exact or super, never partial
    if chosen.len() >= 2 {
        Some(chosen)
    } else {
        None
    }
}

struct Builder<'a> {
    registry: &'a Registry,
    query: &'a Query,
    limits: BuildLimits,
    nodes: Vec<CstNode>,
    solutions: Vec<NodeId>,
    unsolvable_count: usize,
    truncated: bool,
    live: VecDeque<NodeId>,
}

#[derive(Clone, Copy)]
enum ChildSlot {
    Left,
    Middle,
    Right,
}

impl Builder<'_> {
    fn path_context(&self, id: NodeId) -> (BTreeSet<ServiceId>, Vec<ParamSet>) {
        let mut used = BTreeSet::new();
        let mut ancestor_d_outs = Vec::new();
        let mut cursor = Some(id);
        while let Some(c) = cursor {
            let node = &self.nodes[c.0];
            used.extend(node.ws.iter().cloned());
            ancestor_d_outs.push(node.d_out.clone());
            cursor = node.parent;
        }
        (used, ancestor_d_outs)
    }

    fn attach_child(
        &mut self,
        parent: NodeId,
        slot: ChildSlot,
        ctype: CompositionType,
        ws: BTreeSet<ServiceId>,
        d_out: ParamSet,
        ancestor_d_outs: &[ParamSet],
    ) {
        let id = NodeId(self.nodes.len());
        let depth = self.nodes[parent.0].depth + 1;
        let nws = self.nodes[parent.0].nws + ws.len();
        let kind = if d_out.is_empty() {
            NodeKind::Solution
        } else if ancestor_d_outs.contains(&d_out) {
            // this desired set was already attempted on the path: a cycle
            NodeKind::Unsolvable
        } else if depth > self.limits.max_depth {
            self.truncated = true;
            NodeKind::Unsolvable
        } else {
            NodeKind::Internal
        };
        self.nodes.push(CstNode {
            id,
            kind,
            ctype,
            ws,
            nws,
            d_out,
            parent: Some(parent),
            left: None,
            middle: None,
            right: None,
            depth,
        });
        let parent_node = &mut self.nodes[parent.0];
        match slot {
            ChildSlot::Left => parent_node.left = Some(id),
            ChildSlot::Middle => parent_node.middle = Some(id),
            ChildSlot::Right => parent_node.right = Some(id),
        }
        match kind {
            NodeKind::Solution => self.solutions.push(id),
            NodeKind::Unsolvable => self.unsolvable_count += 1,
            _ => self.live.push_back(id),
        }
    }

    fn expand(&mut self, id: NodeId) {
        let d_out = self.nodes[id.0].d_out.clone();
        debug_assert!(!d_out.is_empty());
        let (used, ancestor_d_outs) = self.path_context(id);
        let q_in = &self.query.inputs;

        let mut lists = self.registry.find_matching_services(&d_out);
        lists.exact.retain(|s| !used.contains(s));
        lists.superset.retain(|s| !used.contains(s));
        lists.partial.retain(|s| !used.contains(s));

        let mut created = false;
        if let Some(chosen) = choose_exact(&lists.exact) {
            let svc = self.registry.get(&chosen).unwrap();
            let ri = required_inputs_single(svc, q_in);
            self.attach_child(
                id,
                ChildSlot::Left,
                CompositionType::Exact,
                BTreeSet::from([chosen]),
                ri,
                &ancestor_d_outs,
            );
            created = true;
        }
        if let Some(chosen) = choose_super(&lists.superset, &d_out, self.registry) {
            let svc = self.registry.get(&chosen).unwrap();
            let ri = required_inputs_single(svc, q_in);
            self.attach_child(
                id,
                ChildSlot::Middle,
                CompositionType::Super,
                BTreeSet::from([chosen]),
                ri,
                &ancestor_d_outs,
            );
            created = true;
        }
        if let Some(group) = choose_collaborative(&lists.partial, &d_out, q_in, self.registry) {
            let members: Vec<&ServiceDescriptor> = group
                .iter()
                .map(|s| self.registry.get(s).unwrap())
                .collect();
            let ri = required_inputs_collab(&members, q_in);
            self.attach_child(
                id,
                ChildSlot::Right,
                CompositionType::Collaborative,
                group,
                ri,
                &ancestor_d_outs,
            );
            created = true;
        }
        if !created {
            self.nodes[id.0].kind = NodeKind::Unsolvable;
            self.unsolvable_count += 1;
        }
    }
}

/// Build the composition search tree for `query` breadth-first over a FIFO
/// live-node queue. Deterministic for identical inputs.
pub fn build_cst(registry: &Registry, query: &Query, limits: BuildLimits) -> Result<Cst, QueryError> {
    if query.outputs.is_empty() {
        return Err(QueryError::EmptyDesiredOutputs);
    }
    let unknown: Vec<String> = query
        .inputs
        .iter()
        .chain(query.outputs.iter())
        .filter(|p| !registry.parameters().contains(p))
        .map(|p| p.canonical().to_string())
        .collect();
    if !unknown.is_empty() {
        return Err(QueryError::UnknownParameters(unknown));
    }

    let root = CstNode {
        id: NodeId(0),
        kind: NodeKind::Root,
        ctype: CompositionType::None,
        ws: BTreeSet::new(),
        nws: 0,
        d_out: query.outputs.clone(),
        parent: None,
        left: None,
        middle: None,
        right: None,
        depth: 0,
    };
    let mut builder = Builder {
        registry,
        query,
        limits,
        nodes: vec![root],
        solutions: Vec::new(),
        unsolvable_count: 0,
        truncated: false,
        live: VecDeque::from([NodeId(0)]),
    };
    while let Some(id) = builder.live.pop_front() {
        if builder.nodes.len() >= limits.max_nodes {
            builder.truncated = true;
            break;
        }
        builder.expand(id);
    }
    Ok(Cst {
        nodes: builder.nodes,
        solutions: builder.solutions,
        unsolvable_count: builder.unsolvable_count,
        truncated: builder.truncated,
        query: query.clone(),
    })
}
