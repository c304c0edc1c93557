//! Optimal-composition queries over a built tree, plus an independent
//! forward-chaining oracle used to validate solutions and lower-bound the
//! leanest answer.

use std::collections::BTreeSet;

use itertools::Itertools;

use crate::registry::{ParamSet, Query, Registry, ServiceId};
use crate::tree::{Cst, NodeId, NodeKind};

/// A solution node together with its cost figures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolutionHit {
    pub node: NodeId,
    pub nws: usize,
    pub depth: usize,
}

fn hit(cst: &Cst, id: NodeId) -> SolutionHit {
    let n = cst.node(id);
    SolutionHit {
        node: id,
        nws: n.nws,
        depth: n.depth,
    }
}

/// Level-order search returning the first solution node encountered. Its
/// depth is minimal over all solutions in the tree.
pub fn find_shortest_depth(cst: &Cst) -> Option<SolutionHit> {
    let mut level: Vec<NodeId> = cst.root().children().collect();
    while !level.is_empty() {
        let mut next = Vec::new();
        for id in level {
            let node = cst.node(id);
            match node.kind {
                NodeKind::Solution => return Some(hit(cst, id)),
                NodeKind::Unsolvable => {}
                _ => next.extend(node.children()),
            }
        }
        level = next;
    }
    None
}

/// Level-order search for the solution node with the lowest cumulative
/// service count. Because every edge adds at least one service, nws never
/// drops below the level; the search can return as soon as a solution's nws
/// equals its level, or once the level exceeds the best nws seen.
pub fn find_leanest(cst: &Cst) -> Option<SolutionHit> {
    let mut best: Option<NodeId> = None;
    let mut min_nws = usize::MAX;
    let mut level_no = 0usize;
    let mut level: Vec<NodeId> = cst.root().children().collect();
    while !level.is_empty() {
        level_no += 1;
        if level_no > min_nws {
            break;
        }
        let mut next = Vec::new();
        for id in level {
            let node = cst.node(id);
            match node.kind {
                NodeKind::Solution => {
                    if level_no == node.nws {
                        if node.nws < min_nws {
                            return Some(hit(cst, id));
                        } else if let Some(b) = best {
                            return Some(hit(cst, b));
                        }
                    } else if node.nws < min_nws {
                        min_nws = node.nws;
                        best = Some(id);
                    }
                }
                NodeKind::Unsolvable => {}
                _ => next.extend(node.children()),
            }
        }
        level = next;
    }
    best.map(|b| hit(cst, b))
}

/// Every solution node, in level (discovery) order. Brute-force referee for
/// the two optimal searches.
pub fn enumerate_solutions(cst: &Cst) -> Vec<SolutionHit> {
    let mut out = Vec::new();
    let mut level: Vec<NodeId> = vec![cst.root().id];
    while !level.is_empty() {
        let mut next = Vec::new();
        for id in level {
            let node = cst.node(id);
            if node.kind == NodeKind::Solution {
                out.push(hit(cst, id));
            }
            next.extend(node.children());
        }
        level = next;
    }
    out
}

/// Least fixed point of firing every allowed service whose inputs are
/// already available, starting from `start`. `None` for `allowed` means the
/// whole registry may fire.
pub fn forward_closure(
    registry: &Registry,
    start: &ParamSet,
    allowed: Option<&BTreeSet<ServiceId>>,
) -> ParamSet {
    let mut available = start.clone();
    loop {
        let mut changed = false;
        for svc in registry.services() {
            if let Some(allowed) = allowed {
                if !allowed.contains(&svc.id) {
                    continue;
                }
            }
            if svc.inputs.is_subset(&available) && !svc.outputs.is_subset(&available) {
                available.extend(svc.outputs.iter().cloned());
                changed = true;
            }
        }
        if !changed {
            return available;
        }
    }
}

/// Witness for the registry-wide minimum service count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleWitness {
    pub minimal_count: usize,
    pub witness: BTreeSet<ServiceId>,
}

/// Exhaustively search subsets of the registry, smallest first, for one
/// whose forward closure from the query inputs covers the query outputs.
/// Subsets are enumerated in lexicographic id order so the first witness is
/// deterministic. Exponential; intended for desk-scale registries.
pub fn oracle_leanest(registry: &Registry, query: &Query, max_k: usize) -> Option<OracleWitness> {
    assert!(max_k >= 1, "max_k must be at least 1");
    if query.outputs.is_subset(&forward_closure(registry, &query.inputs, Some(&BTreeSet::new()))) {
        // already satisfied by the inputs alone; no services needed, but the
        // contract starts at k = 1, so report the empty-equivalent smallest k
        return Some(OracleWitness {
            minimal_count: 0,
            witness: BTreeSet::new(),
        });
    }
    let ids: Vec<&ServiceId> = registry.services().iter().map(|s| &s.id).collect();
    for k in 1..=max_k.min(ids.len()) {
        for combo in ids.iter().combinations(k) {
            let subset: BTreeSet<ServiceId> = combo.iter().map(|s| (**s).clone()).collect();
            let closure = forward_closure(registry, &query.inputs, Some(&subset));
            if query.outputs.is_subset(&closure) {
                return Some(OracleWitness {
                    minimal_count: k,
                    witness: subset,
                });
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::{normalize_param, Registry};
    use crate::tree::{build_cst, BuildLimits};

    fn params(names: &[&str]) -> ParamSet {
        names.iter().map(|n| normalize_param(n).unwrap()).collect()
    }

    fn fixture() -> Registry {
        Registry::from_json(include_str!("../../../fixtures/travel.json")).unwrap()
    }

    fn travel_query() -> Query {
        Query::new(
            params(&["Date", "City"]),
            params(&["HotelName", "FlightInfo", "CarType", "TourCost"]),
        )
    }

    fn svc_ids(set: &BTreeSet<ServiceId>) -> Vec<&str> {
        set.iter().map(|s| s.as_str()).collect()
    }

    #[test]
    fn shortest_depth_on_fixture() {
        let reg = fixture();
        let cst = build_cst(&reg, &travel_query(), BuildLimits::default()).unwrap();
        let found = find_shortest_depth(&cst).unwrap();
        assert_eq!(found.depth, 2);
        assert_eq!(found.nws, 2);
        assert_eq!(svc_ids(&cst.path_services(found.node)), ["ws11", "ws9"]);
    }

    #[test]
    fn leanest_on_fixture() {
        let reg = fixture();
        let cst = build_cst(&reg, &travel_query(), BuildLimits::default()).unwrap();
        let found = find_leanest(&cst).unwrap();
        assert_eq!(found.nws, 2);
        assert_eq!(svc_ids(&cst.path_services(found.node)), ["ws11", "ws9"]);
    }

    #[test]
    fn searches_report_not_found() {
        let reg = fixture();
        let query = Query::new(params(&["Date", "City"]), params(&["Date"]));
        let cst = build_cst(&reg, &query, BuildLimits::default()).unwrap();
        assert_eq!(find_shortest_depth(&cst), None);
        assert_eq!(find_leanest(&cst), None);
        assert!(enumerate_solutions(&cst).is_empty());
    }

    #[test]
    fn enumeration_on_fixture_contains_known_paths() {
        let reg = fixture();
        let cst = build_cst(&reg, &travel_query(), BuildLimits::default()).unwrap();
        let all = enumerate_solutions(&cst);
        let summaries: Vec<(Vec<String>, usize, usize)> = all
            .iter()
            .map(|h| {
                (
                    cst.path_services(h.node)
                        .iter()
                        .map(|s| s.to_string())
                        .collect(),
                    h.nws,
                    h.depth,
                )
            })
            .collect();
        let strs = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        assert!(summaries.contains(&(strs(&["ws11", "ws9"]), 2, 2)));
        assert!(summaries.contains(&(strs(&["ws10", "ws8", "ws9"]), 3, 3)));
    }

    #[test]
    fn forward_closure_cases() {
        let reg = fixture();
        let start = params(&["Date", "City"]);

        let closed = forward_closure(&reg, &start, Some(&BTreeSet::new()));
        assert_eq!(closed, start);

        let allowed: BTreeSet<ServiceId> = ["ws9", "ws11"].map(ServiceId::from).into();
        let closed = forward_closure(&reg, &start, Some(&allowed));
        let expected = params(&[
            "Date", "City", "PackageID", "HotelName", "Hotelcost", "FlightInfo", "FlightCost",
            "CarType", "TaxiCost", "TourCost",
        ]);
        assert_eq!(closed, expected);

        let closed = forward_closure(&reg, &start, None);
        assert!(travel_query().outputs.is_subset(&closed));
    }

    #[test]
    fn oracle_finds_two_service_witness_on_fixture() {
        let reg = fixture();
        let report = oracle_leanest(&reg, &travel_query(), 3).unwrap();
        assert_eq!(report.minimal_count, 2);
        assert_eq!(svc_ids(&report.witness), ["ws11", "ws9"]);
    }

    #[test]
    fn oracle_single_service_and_unsatisfiable() {
        let doc = r#"{"parameters": ["a", "b", "ghost"], "services": [
            {"id": "one", "name": "one", "inputs": ["a"], "outputs": ["b"]}
        ]}"#;
        let reg = Registry::from_json(doc).unwrap();
        let q = Query::new(params(&["a"]), params(&["b"]));
        let report = oracle_leanest(&reg, &q, 2).unwrap();
        assert_eq!(report.minimal_count, 1);
        assert_eq!(svc_ids(&report.witness), ["one"]);

        let q = Query::new(params(&["a"]), params(&["ghost"]));
        assert_eq!(oracle_leanest(&reg, &q, 2), None);
    }
}
