//! Decoding at a sink: single-vertex sum-product plus traceback, the
//! multiple-vertex alternative, the all-vertex schedule, and target-function
//! computation.
//!
//! Traceback reuses the partial marginals stored during the single-vertex
//! run: once the root's support fixes part of the message vector, each
//! further node only needs a comparison scan of its `λ` slice at the known
//! values, never a reverse message. The multiple-vertex mode instead passes
//! messages back from the root until every node that contributes demanded
//! variables has all of its messages, then computes true marginals there.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::engine::{
    bfs_from, run_all_vertex, run_single_vertex, CountEvent, CountEventKind, EngineError,
    MessageStore,
};
use crate::graph::{
    acyclify, build_decoding_graph, build_function_graph, BuildError, FactorGraph, NodeId,
    TreeOverride,
};
use crate::model::{
    Assignment, Demand, ModelError, NetworkCodeInstance, ReceivedVector,
};
use crate::table::{
    config_count, encode_index, intersect_vars, product_at, BoolTable, OpCount, Symbol, VarIndex,
};

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("sink demands a function; use compute_function")]
    FunctionDemand,
    #[error("sink demands messages; use decode")]
    MessageDemand,
    #[error("not decodable: the code does not determine x{var} uniquely from this sink's maps")]
    NotDecodable { var: VarIndex },
    #[error("inconsistent received data: no message vector satisfies the maps at node {node}")]
    Inconsistent { node: NodeId },
    #[error("root override {0:?} names no node in the factor graph")]
    BadRoot(String),
}

/// Decoding schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeMode {
    SingleVertexTraceback,
    MultipleVertex,
    AllVertex,
}

impl DecodeMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            DecodeMode::SingleVertexTraceback => "traceback",
            DecodeMode::MultipleVertex => "multiple-vertex",
            DecodeMode::AllVertex => "all-vertex",
        }
    }
}

/// Optional knobs: a pinned spanning tree and a pinned root (by node label).
#[derive(Debug, Clone, Default)]
pub struct DecodeOptions {
    pub tree_override: Option<TreeOverride>,
    pub root_label: Option<String>,
}

/// Outcome of a decode or compute run.
#[derive(Debug)]
pub struct DecodeResult {
    pub sink_id: String,
    pub mode: DecodeMode,
    /// Demanded message values; `None` for function computation.
    pub assignment: Option<Assignment>,
    /// Computed function value; `None` for decoding.
    pub function_value: Option<Symbol>,
    pub ops: OpCount,
    /// Nodes whose supports were consulted.
    pub visited: Vec<NodeId>,
    /// Per-step operation log, in schedule order.
    pub events: Vec<CountEvent>,
    /// The stretched factor graph the run used.
    pub graph: FactorGraph,
}

/// Pick a root for a demand set: the node with the most demanded variables
/// in its domain, ties broken by larger domain, then by lower id.
pub fn choose_root(g: &FactorGraph, demand: &[VarIndex]) -> NodeId {
    let mut best = 0;
    let mut best_key = (0usize, 0usize);
    for node in &g.nodes {
        let overlap = node.domain.iter().filter(|v| demand.contains(v)).count();
        let key = (overlap, node.domain.len());
        if key > best_key {
            best_key = key;
            best = node.id;
        }
    }
    best
}

fn resolve_root(
    g: &FactorGraph,
    demand: &[VarIndex],
    component: &[NodeId],
    options: &DecodeOptions,
) -> Result<NodeId, DecodeError> {
    if let Some(label) = &options.root_label {
        let id = g.node_by_label(label).ok_or_else(|| DecodeError::BadRoot(label.clone()))?;
        if component.contains(&id) {
            return Ok(id);
        }
    }
    // component-restricted variant of choose_root
    let mut best = component[0];
    let mut best_key = (0usize, 0usize);
    for &id in component {
        let node = &g.nodes[id];
        let overlap = node.domain.iter().filter(|v| demand.contains(v)).count();
        let key = (overlap, node.domain.len());
        if key > best_key {
            best_key = key;
            best = id;
        }
    }
    Ok(best)
}

/// One traceback step at node `z`: scan the slice of `λ_z` at the already
/// known values and return an assignment of the remaining variables of
/// `S_z`. Scanning the slice costs `q^{|unknown|} − 1` comparisons.
pub fn traceback_step(
    g: &FactorGraph,
    z: NodeId,
    lambda: &BoolTable,
    known: &Assignment,
    ops: &mut OpCount,
) -> Result<Assignment, DecodeError> {
    let hits = traceback_slice(g, z, lambda, known, ops)?;
    let first = hits.first().ok_or(DecodeError::Inconsistent { node: z })?;
    Ok(first.clone())
}

/// All assignments of the unknown variables of `S_z` whose completion by
/// `known` lies in the support of `lambda`, in row-major order.
fn traceback_slice(
    g: &FactorGraph,
    z: NodeId,
    lambda: &BoolTable,
    known: &Assignment,
    ops: &mut OpCount,
) -> Result<Vec<Assignment>, DecodeError> {
    let domain = &g.nodes[z].domain;
    let unknown: Vec<VarIndex> =
        domain.iter().copied().filter(|&v| !known.contains(v)).collect();
    let slice_len = config_count(g.q, unknown.len());
    if slice_len > 1 {
        ops.cmp_ops += (slice_len - 1) as u64;
    }
    let mut hits = Vec::new();
    let mut tuple = vec![0; unknown.len()];
    let mut full = vec![0; domain.len()];
    for idx in 0..slice_len {
        crate::table::decode_index(g.q, idx, &mut tuple);
        for (pos, &v) in domain.iter().enumerate() {
            full[pos] = match known.get(v) {
                Some(s) => s,
                None => tuple[unknown.iter().position(|&u| u == v).unwrap()],
            };
        }
        if lambda.get(&full) {
            let mut a = Assignment::new();
            for (i, &v) in unknown.iter().enumerate() {
                a.set(v, tuple[i]);
            }
            hits.push(a);
        }
    }
    if hits.is_empty() {
        return Err(DecodeError::Inconsistent { node: z });
    }
    Ok(hits)
}

/// Fold a slice's hits into the running assignment: demanded coordinates
/// must agree across all hits; the first hit fixes everything else.
fn fix_from_hits(
    hits: &[Assignment],
    demand: &[VarIndex],
    known: &mut Assignment,
) -> Result<(), DecodeError> {
    let first = &hits[0];
    for (&v, &s) in &first.0 {
        if demand.contains(&v) {
            for other in hits {
                if other.get(v) != Some(s) {
                    return Err(DecodeError::NotDecodable { var: v });
                }
            }
        }
        known.set(v, s);
    }
    Ok(())
}

/// Support of the root marginal as assignments over `S_r`, full scan.
fn root_support(
    g: &FactorGraph,
    root: NodeId,
    marginal: &BoolTable,
    ops: &mut OpCount,
    store: &mut MessageStore,
) -> Result<Vec<Assignment>, DecodeError> {
    let mut scan = OpCount::default();
    let tuples = marginal.support(&mut scan);
    ops.add(scan);
    store.record(CountEventKind::Support { node: root }, scan);
    if tuples.is_empty() {
        return Err(DecodeError::Inconsistent { node: root });
    }
    let domain = &g.nodes[root].domain;
    Ok(tuples
        .into_iter()
        .map(|t| {
            let mut a = Assignment::new();
            for (i, &v) in domain.iter().enumerate() {
                a.set(v, t[i]);
            }
            a
        })
        .collect())
}

/// Nodes to visit after the root, breadth-first, keeping only those whose
/// domains add undetermined demanded variables.
fn traceback_frontier(
    g: &FactorGraph,
    root: NodeId,
    demand: &[VarIndex],
    determined: &Assignment,
) -> Vec<NodeId> {
    let (order, _) = bfs_from(g, root);
    let mut covered: Vec<VarIndex> =
        demand.iter().copied().filter(|&v| determined.contains(v)).collect();
    let mut out = Vec::new();
    for &z in order.iter().skip(1) {
        let adds: Vec<VarIndex> = g.nodes[z]
            .domain
            .iter()
            .copied()
            .filter(|v| demand.contains(v) && !covered.contains(v))
            .collect();
        if !adds.is_empty() {
            covered.extend(adds);
            out.push(z);
        }
    }
    out
}

/// Decode a message demand at a sink.
pub fn decode(
    inst: &NetworkCodeInstance,
    sink_id: &str,
    received: &ReceivedVector,
    mode: DecodeMode,
) -> Result<DecodeResult, DecodeError> {
    decode_with(inst, sink_id, received, mode, &DecodeOptions::default())
}

/// Decode with a pinned spanning tree and/or root.
pub fn decode_with(
    inst: &NetworkCodeInstance,
    sink_id: &str,
    received: &ReceivedVector,
    mode: DecodeMode,
    options: &DecodeOptions,
) -> Result<DecodeResult, DecodeError> {
    let sink = inst.sink(sink_id)?;
    let demand = match &sink.demand {
        Demand::Messages(d) => d.clone(),
        Demand::Function { .. } => return Err(DecodeError::FunctionDemand),
    };
    let g = build_decoding_graph(inst, sink_id, received)?;
    let g = acyclify(&g, options.tree_override.as_ref())?;

    let mut total = OpCount::default();
    let mut events = Vec::new();
    let mut determined = Assignment::new();
    let mut visited = Vec::new();

    match mode {
        DecodeMode::SingleVertexTraceback | DecodeMode::MultipleVertex => {
            for component in g.components() {
                let relevant = component
                    .iter()
                    .any(|&z| g.nodes[z].domain.iter().any(|v| demand.contains(v)));
                if !relevant {
                    continue;
                }
                let root = resolve_root(&g, &demand, &component, options)?;
                let run = run_single_vertex(&g, root)?;
                let mut store = run.store;
                total.add(run.ops);

                let hits = root_support(&g, root, &run.marginal.table, &mut total, &mut store)?;
                fix_from_hits(&hits, &demand, &mut determined)?;
                visited.push(root);

                let frontier = traceback_frontier(&g, root, &demand, &determined);
                match mode {
                    DecodeMode::SingleVertexTraceback => {
                        for z in frontier {
                            let lambda = store.lambda(z).expect("single-vertex run stores λ");
                            let mut ops = OpCount::default();
                            let hits =
                                traceback_slice(&g, z, lambda, &determined, &mut ops)?;
                            total.add(ops);
                            store.record(CountEventKind::Traceback { node: z }, ops);
                            fix_from_hits(&hits, &demand, &mut determined)?;
                            visited.push(z);
                        }
                    }
                    DecodeMode::MultipleVertex => {
                        reverse_messages(&g, root, &frontier, &mut store, &mut total)?;
                        for &z in &frontier {
                            let marginal = z_marginal(&g, z, root, &mut store, &mut total);
                            let mut scan = OpCount::default();
                            let tuples = marginal.support(&mut scan);
                            total.add(scan);
                            store.record(CountEventKind::Support { node: z }, scan);
                            if tuples.is_empty() {
                                return Err(DecodeError::Inconsistent { node: z });
                            }
                            let domain = &g.nodes[z].domain;
                            let hits: Vec<Assignment> = tuples
                                .into_iter()
                                .map(|t| {
                                    let mut a = Assignment::new();
                                    for (i, &v) in domain.iter().enumerate() {
                                        a.set(v, t[i]);
                                    }
                                    a
                                })
                                .collect();
                            fix_from_hits(&hits, &demand, &mut determined)?;
                            visited.push(z);
                        }
                    }
                    DecodeMode::AllVertex => unreachable!(),
                }
                events.extend(store.log.iter().copied());
            }
        }
        DecodeMode::AllVertex => {
            let run = run_all_vertex(&g)?;
            let mut store = run.store;
            total.add(run.ops);
            // supports consulted at every node, ascending, as the all-vertex
            // variant computes marginals everywhere
            for z in 0..g.node_count() {
                let constrains_demand =
                    g.nodes[z].domain.iter().any(|v| demand.contains(v));
                let marginal = &run.marginals[z].table;
                let mut scan = OpCount::default();
                let tuples = marginal.support(&mut scan);
                total.add(scan);
                store.record(CountEventKind::Support { node: z }, scan);
                if tuples.is_empty() {
                    return Err(DecodeError::Inconsistent { node: z });
                }
                if !constrains_demand || g.nodes[z].unconstrained {
                    continue;
                }
                let domain = &g.nodes[z].domain;
                let hits: Vec<Assignment> = tuples
                    .into_iter()
                    .map(|t| {
                        let mut a = Assignment::new();
                        for (i, &v) in domain.iter().enumerate() {
                            a.set(v, t[i]);
                        }
                        a
                    })
                    .collect();
                // keep only demanded coordinates here: non-demanded ones may
                // legitimately vary between nodes of different subtrees
                let projected: Vec<Assignment> =
                    hits.iter().map(|a| a.restrict(&demand)).collect();
                fix_from_hits(&projected, &demand, &mut determined)?;
                visited.push(z);
            }
            events.extend(store.log.iter().copied());
        }
    }

    for &v in &demand {
        if !determined.contains(v) {
            return Err(BuildError::DemandNotCovered { var: v }.into());
        }
    }
    Ok(DecodeResult {
        sink_id: sink_id.to_string(),
        mode,
        assignment: Some(determined.restrict(&demand)),
        function_value: None,
        ops: total,
        visited,
        events,
        graph: g,
    })
}

/// Send messages away from the root along the tree paths to every frontier
/// node, reusing already computed reverse messages on shared prefixes.
fn reverse_messages(
    g: &FactorGraph,
    root: NodeId,
    frontier: &[NodeId],
    store: &mut MessageStore,
    total: &mut OpCount,
) -> Result<(), DecodeError> {
    let (_, parent) = bfs_from(g, root);
    for &target in frontier {
        // path from root down to target
        let mut path = vec![target];
        let mut cur = target;
        while cur != root {
            cur = parent[&cur];
            path.push(cur);
        }
        path.reverse();
        for pair in path.windows(2) {
            let (p, c) = (pair[0], pair[1]);
            if store.has_message(p, c) {
                continue;
            }
            // product of p's kernel with all incoming except from c
            let domain = &g.nodes[p].domain;
            let mut ops = OpCount::default();
            let mut tables: Vec<&BoolTable> = Vec::new();
            if let Some(k) = &g.nodes[p].kernel {
                tables.push(k);
            }
            for &n in g.neighbors(p) {
                if n == c {
                    continue;
                }
                tables.push(
                    store
                        .message(n, p)
                        .ok_or(EngineError::MissingMessage { from: n, to: p })?,
                );
            }
            let product = product_at(g.q, domain, tables, &mut ops);
            let shared = intersect_vars(domain, &g.nodes[c].domain);
            let table = product.marginalize_onto(&shared, &mut ops);
            total.add(ops);
            store.insert_message(p, c, table, ops);
        }
    }
    Ok(())
}

/// True marginal at a non-root node from its stored partial marginal and the
/// reverse message from its root-side neighbor: one product over `S_z`.
fn z_marginal(
    g: &FactorGraph,
    z: NodeId,
    root: NodeId,
    store: &mut MessageStore,
    total: &mut OpCount,
) -> BoolTable {
    let (_, parent) = bfs_from(g, root);
    let p = parent[&z];
    let lambda = store.lambda(z).expect("λ stored by the single-vertex pass").clone();
    let reverse = store.message(p, z).expect("reverse message sent first").clone();
    let mut ops = OpCount::default();
    let marginal = if reverse.is_trivial() {
        lambda
    } else {
        let mut m = lambda;
        m.and_with(&reverse.extend(&g.nodes[z].domain), &mut ops);
        m
    };
    total.add(ops);
    store.record(CountEventKind::Marginal { node: z }, ops);
    marginal
}

/// Compute a target function at a sink: single-vertex run rooted at the
/// dummy factor node, then the first support hit names a message vector
/// whose function value is the answer. The scan may exit early because any
/// hit evaluates to the same value for a valid code.
pub fn compute_function(
    inst: &NetworkCodeInstance,
    sink_id: &str,
    received: &ReceivedVector,
) -> Result<DecodeResult, DecodeError> {
    compute_function_with(inst, sink_id, received, &DecodeOptions::default())
}

pub fn compute_function_with(
    inst: &NetworkCodeInstance,
    sink_id: &str,
    received: &ReceivedVector,
    options: &DecodeOptions,
) -> Result<DecodeResult, DecodeError> {
    let sink = inst.sink(sink_id)?;
    let (args, table) = match &sink.demand {
        Demand::Function { args, table } => (args.clone(), table.clone()),
        Demand::Messages(_) => return Err(DecodeError::MessageDemand),
    };
    let g = build_function_graph(inst, sink_id, received)?;
    let g = acyclify(&g, options.tree_override.as_ref())?;
    let root = g.node_by_label("g").expect("function graph has a dummy node");

    let run = run_single_vertex(&g, root)?;
    let mut store = run.store;
    let mut total = run.ops;

    // early-exit scan of the root marginal; the first hit, projected onto
    // the function arguments, names the message vector to evaluate
    let mut scan = OpCount::default();
    let hit = run.marginal.table.first_support(&mut scan);
    total.add(scan);
    store.record(CountEventKind::Support { node: root }, scan);
    let hit = hit.ok_or(DecodeError::Inconsistent { node: root })?;
    let domain = &g.nodes[root].domain;
    let projected: Vec<Symbol> = args
        .iter()
        .map(|v| hit[domain.iter().position(|d| d == v).unwrap()])
        .collect();
    let value = table[encode_index(g.q, &projected)];

    Ok(DecodeResult {
        sink_id: sink_id.to_string(),
        mode: DecodeMode::SingleVertexTraceback,
        assignment: None,
        function_value: Some(value),
        ops: total,
        visited: vec![root],
        events: store.log,
        graph: g,
    })
}

/// Full restricted support of the function-computation root marginal, scanned
/// without early exit. Test-oriented: every element must share one function
/// value for a valid code.
pub fn function_support(
    inst: &NetworkCodeInstance,
    sink_id: &str,
    received: &ReceivedVector,
) -> Result<Vec<Vec<Symbol>>, DecodeError> {
    let sink = inst.sink(sink_id)?;
    let args = match &sink.demand {
        Demand::Function { args, .. } => args.clone(),
        Demand::Messages(_) => return Err(DecodeError::MessageDemand),
    };
    let g = build_function_graph(inst, sink_id, received)?;
    let g = acyclify(&g, None)?;
    let root = g.node_by_label("g").expect("function graph has a dummy node");
    let run = run_single_vertex(&g, root)?;
    let mut ops = OpCount::default();
    Ok(run.marginal.table.support_restricted(&args, &mut ops))
}

/// Map decode results to a plain `x -> symbol` view for callers that do not
/// care about the newtype.
pub fn assignment_map(result: &DecodeResult) -> BTreeMap<VarIndex, Symbol> {
    result.assignment.as_ref().map(|a| a.0.clone()).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::model::{evaluate_received, parse_instance};
    use crate::oracle;

    fn butterfly() -> NetworkCodeInstance {
        parse_instance(&corpus::fixture("butterfly").unwrap().instance_text).unwrap()
    }

    fn n3() -> (NetworkCodeInstance, DecodeOptions) {
        let fixture = corpus::fixture("n3-sink43").unwrap();
        let inst = parse_instance(&fixture.instance_text).unwrap();
        let options = DecodeOptions {
            tree_override: fixture.tree_override.clone(),
            root_label: fixture.root_label.clone(),
        };
        (inst, options)
    }

    #[test]
    fn choose_root_butterfly() {
        let inst = butterfly();
        let rv = evaluate_received(&inst, "T1", &Assignment::from_total(&[1, 0])).unwrap();
        let g = build_decoding_graph(&inst, "T1", &rv).unwrap();
        let root = choose_root(&g, &[1, 2]);
        assert_eq!(g.nodes[root].label, "V4-T1");
    }

    #[test]
    fn choose_root_prefers_demand_overlap() {
        let (inst, options) = n3();
        let rv = evaluate_received(&inst, "43", &Assignment::from_total(&[0; 5])).unwrap();
        let g = build_decoding_graph(&inst, "43", &rv).unwrap();
        let g = acyclify(&g, options.tree_override.as_ref()).unwrap();
        // demand {5}: unique best domain {3,4,5}
        let root = choose_root(&g, &[5]);
        assert_eq!(g.nodes[root].label, "36-43");
        // demand contained in one domain: that node wins
        let root = choose_root(&g, &[4, 5]);
        assert_eq!(g.nodes[root].label, "36-43");
    }

    #[test]
    fn butterfly_decodes_all_received_vectors() {
        let inst = butterfly();
        for x in crate::model::total_assignments(2, 2) {
            for sink in ["T1", "T2"] {
                let rv = evaluate_received(&inst, sink, &x).unwrap();
                for mode in [
                    DecodeMode::SingleVertexTraceback,
                    DecodeMode::MultipleVertex,
                    DecodeMode::AllVertex,
                ] {
                    let result = decode(&inst, sink, &rv, mode).unwrap();
                    assert_eq!(result.assignment.as_ref().unwrap(), &x, "{sink} mode {mode:?}");
                }
            }
        }
    }

    #[test]
    fn butterfly_t1_expected_values() {
        let inst = butterfly();
        let rv = ReceivedVector {
            sink_id: "T1".into(),
            values: [("V1-T1".to_string(), 1), ("V4-T1".to_string(), 1)]
                .into_iter()
                .collect(),
        };
        let result = decode(&inst, "T1", &rv, DecodeMode::SingleVertexTraceback).unwrap();
        assert_eq!(result.assignment.unwrap(), Assignment::from_total(&[1, 0]));
        let rv0 = ReceivedVector {
            sink_id: "T1".into(),
            values: [("V1-T1".to_string(), 0), ("V4-T1".to_string(), 0)]
                .into_iter()
                .collect(),
        };
        let result = decode(&inst, "T1", &rv0, DecodeMode::SingleVertexTraceback).unwrap();
        assert_eq!(result.assignment.unwrap(), Assignment::from_total(&[0, 0]));
    }

    #[test]
    fn n3_traceback_total_353() {
        let (inst, options) = n3();
        let x = Assignment::from_total(&[2, 1, 3, 0, 2]);
        let rv = evaluate_received(&inst, "43", &x).unwrap();
        let result =
            decode_with(&inst, "43", &rv, DecodeMode::SingleVertexTraceback, &options).unwrap();
        assert_eq!(result.assignment.as_ref().unwrap(), &x);
        assert_eq!(result.ops.total(), 353);
        // trace visits the root, then the two nodes adding x1 and x2
        let labels: Vec<&str> =
            result.visited.iter().map(|&z| result.graph.nodes[z].label.as_str()).collect();
        assert_eq!(labels, vec!["36-43", "32-43", "31-43"]);
    }

    #[test]
    fn n3_multiple_vertex_total_661() {
        let (inst, options) = n3();
        let x = Assignment::from_total(&[2, 1, 3, 0, 2]);
        let rv = evaluate_received(&inst, "43", &x).unwrap();
        let result = decode_with(&inst, "43", &rv, DecodeMode::MultipleVertex, &options).unwrap();
        assert_eq!(result.assignment.as_ref().unwrap(), &x);
        assert_eq!(result.ops.total(), 661);
    }

    #[test]
    fn n3_modes_agree_everywhere() {
        let (inst, options) = n3();
        for idx in [0usize, 5, 100, 777, 1023] {
            let mut tuple = vec![0; 5];
            crate::table::decode_index(4, idx, &mut tuple);
            let x = Assignment::from_total(&tuple);
            let rv = evaluate_received(&inst, "43", &x).unwrap();
            for mode in [
                DecodeMode::SingleVertexTraceback,
                DecodeMode::MultipleVertex,
                DecodeMode::AllVertex,
            ] {
                let result = decode_with(&inst, "43", &rv, mode, &options).unwrap();
                assert_eq!(result.assignment.as_ref().unwrap(), &x, "mode {mode:?}");
            }
        }
    }

    #[test]
    fn traceback_step_costs() {
        let (inst, options) = n3();
        let x = Assignment::from_total(&[1, 3, 2, 0, 1]);
        let rv = evaluate_received(&inst, "43", &x).unwrap();
        let result =
            decode_with(&inst, "43", &rv, DecodeMode::SingleVertexTraceback, &options).unwrap();
        let traceback_events: Vec<&CountEvent> = result
            .events
            .iter()
            .filter(|e| matches!(e.kind, CountEventKind::Traceback { .. }))
            .collect();
        assert_eq!(traceback_events.len(), 2);
        for e in traceback_events {
            assert_eq!(e.ops.cmp_ops, 3); // q − 1 at q = 4
        }
    }

    #[test]
    fn traceback_step_nothing_new_is_free() {
        let inst = butterfly();
        let rv = evaluate_received(&inst, "T1", &Assignment::from_total(&[1, 1])).unwrap();
        let g = build_decoding_graph(&inst, "T1", &rv).unwrap();
        let g = acyclify(&g, None).unwrap();
        let root = g.node_by_label("V4-T1").unwrap();
        let run = run_single_vertex(&g, root).unwrap();
        let known = Assignment::from_total(&[1, 0]);
        let mut ops = OpCount::default();
        let x1 = g.node_by_label("x1").unwrap();
        let lambda = run.store.lambda(x1).unwrap();
        let extra = traceback_step(&g, x1, lambda, &known, &mut ops).unwrap();
        assert!(extra.0.is_empty());
        assert_eq!(ops.cmp_ops, 0);
    }

    #[test]
    fn inconsistent_received_reported() {
        let text = r#"{
            "alphabet": {"kind": "prime_field", "q": 2},
            "omega": 1,
            "sinks": [{
                "id": "T",
                "in_edges": [
                    {"id": "e1", "support": [1], "map": {"linear": ["1"]}},
                    {"id": "e2", "support": [1], "map": {"linear": ["1"]}}
                ],
                "demand": {"messages": [1]}
            }]
        }"#;
        let inst = parse_instance(text).unwrap();
        let rv = ReceivedVector {
            sink_id: "T".into(),
            values: [("e1".to_string(), 0), ("e2".to_string(), 1)].into_iter().collect(),
        };
        for mode in [DecodeMode::SingleVertexTraceback, DecodeMode::MultipleVertex] {
            assert!(matches!(
                decode(&inst, "T", &rv, mode),
                Err(DecodeError::Inconsistent { .. })
            ));
        }
    }

    #[test]
    fn underdetermined_code_not_decodable() {
        let text = r#"{
            "alphabet": {"kind": "prime_field", "q": 2},
            "omega": 2,
            "sinks": [{
                "id": "T",
                "in_edges": [{"id": "e", "support": [1, 2], "map": {"linear": ["1", "1"]}}],
                "demand": {"messages": [1]}
            }]
        }"#;
        let inst = parse_instance(text).unwrap();
        let rv = evaluate_received(&inst, "T", &Assignment::from_total(&[1, 0])).unwrap();
        assert!(matches!(
            decode(&inst, "T", &rv, DecodeMode::SingleVertexTraceback),
            Err(DecodeError::NotDecodable { .. })
        ));
    }

    #[test]
    fn example3_function_value() {
        let inst =
            parse_instance(&corpus::fixture("example3-majority").unwrap().instance_text).unwrap();
        let x = Assignment::from_total(&[1, 1, 1, 0]);
        let rv = evaluate_received(&inst, "T", &x).unwrap();
        let result = compute_function(&inst, "T", &rv).unwrap();
        assert_eq!(result.function_value, Some(0));
        let support = function_support(&inst, "T", &rv).unwrap();
        assert_eq!(support, vec![vec![0, 0, 0], vec![1, 1, 1]]);
    }

    #[test]
    fn constant_function_always_returns_constant() {
        let text = r#"{
            "alphabet": {"kind": "prime_field", "q": 2},
            "omega": 2,
            "sinks": [{
                "id": "T",
                "in_edges": [{"id": "e", "support": [1, 2], "map": {"linear": ["1", "1"]}}],
                "demand": {"function": {"args": [1, 2], "table": ["1", "1", "1", "1"]}}
            }]
        }"#;
        let inst = parse_instance(text).unwrap();
        for x in crate::model::total_assignments(2, 2) {
            let rv = evaluate_received(&inst, "T", &x).unwrap();
            let result = compute_function(&inst, "T", &rv).unwrap();
            assert_eq!(result.function_value, Some(1));
        }
    }

    #[test]
    fn compute_matches_oracle_on_small_instances() {
        let inst =
            parse_instance(&corpus::fixture("example3-majority").unwrap().instance_text).unwrap();
        for x in crate::model::total_assignments(2, 4) {
            let rv = evaluate_received(&inst, "T", &x).unwrap();
            let value = compute_function(&inst, "T", &rv).unwrap().function_value.unwrap();
            let oracle_values = oracle::brute_force_compute(&inst, "T", &rv).unwrap();
            assert_eq!(oracle_values.len(), 1);
            assert!(oracle_values.contains(&value));
        }
    }

    #[test]
    fn traceback_never_costs_more_than_multiple_vertex() {
        let (inst, options) = n3();
        let x = Assignment::from_total(&[3, 3, 1, 2, 0]);
        let rv = evaluate_received(&inst, "43", &x).unwrap();
        let tb = decode_with(&inst, "43", &rv, DecodeMode::SingleVertexTraceback, &options)
            .unwrap()
            .ops
            .total();
        let mv =
            decode_with(&inst, "43", &rv, DecodeMode::MultipleVertex, &options).unwrap().ops.total();
        assert!(tb < mv, "{tb} !< {mv}");
    }
}
