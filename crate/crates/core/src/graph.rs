//! Per-sink factor graphs and cycle elimination by variable stretching.
//!
//! A decoding graph has one variable node per source message and one factor
//! node per in-edge, the factor kernel being the indicator that the edge's
//! encoding map reproduces the received symbol. Function-computation graphs
//! add a dummy factor node over the target function's arguments with a
//! constant-1 kernel. Cyclic graphs are made acyclic by removing edges to
//! form a spanning forest and stretching each removed edge's variable along
//! the forest path it lost, enlarging local domains but leaving kernels
//! untouched, which preserves every marginal exactly.

use std::collections::VecDeque;

use thiserror::Error;

use crate::model::{
    eval_map_tuple, Demand, ModelError, NetworkCodeInstance, ReceivedVector, MAX_TABLE_LEN,
};
use crate::table::{config_count, BoolTable, VarIndex};

pub type NodeId = usize;

#[derive(Debug, Error)]
pub enum BuildError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("sink {0:?} demands messages; use the decoding builder")]
    WrongBuilderForMessages(String),
    #[error("sink {0:?} demands a function; use the function builder")]
    WrongBuilderForFunction(String),
    #[error("demanded variable x{var} appears in no encoding-map domain; \
             it is unconstrained and its support would be all of the alphabet")]
    DemandNotCovered { var: VarIndex },
    #[error("stretched domain of node {node} would exceed the size guard")]
    DomainTooLarge { node: NodeId },
    #[error("tree override names a nonexistent edge (x{var}, {edge:?})")]
    OverrideUnknownEdge { var: VarIndex, edge: String },
    #[error("tree override does not leave a spanning forest (a cycle remains or a component was disconnected)")]
    OverrideNotForest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Variable,
    Factor,
    DummyFactor,
}

/// A node of the factor graph.
#[derive(Debug, Clone)]
pub struct FGNode {
    pub id: NodeId,
    pub label: String,
    pub kind: NodeKind,
    /// Local domain `S_z`: ascending variable indices, enlarged by stretching.
    pub domain: Vec<VarIndex>,
    /// Local kernel over the pre-stretch domain; `None` for variable nodes.
    /// Dummy factors carry a constant-1 kernel.
    pub kernel: Option<BoolTable>,
    /// Variable node that sits in no encoding-map domain.
    pub unconstrained: bool,
}

impl FGNode {
    pub fn is_factor(&self) -> bool {
        !matches!(self.kind, NodeKind::Variable)
    }

    /// 1 for factor and dummy-factor nodes, 0 for variable nodes.
    pub fn a_z(&self) -> u64 {
        if self.is_factor() {
            1
        } else {
            0
        }
    }
}

/// One stretching event: a variable pushed along a forest path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StretchRecord {
    pub var: VarIndex,
    pub path: Vec<NodeId>,
}

/// Bipartite factor graph with stretch bookkeeping.
#[derive(Debug, Clone)]
pub struct FactorGraph {
    pub q: u32,
    pub omega: u32,
    pub nodes: Vec<FGNode>,
    /// Sorted adjacency lists; edges join a variable and a factor node.
    adj: Vec<Vec<NodeId>>,
    pub acyclic: bool,
    /// Edges deleted to form the spanning forest, as (variable, factor) pairs.
    pub removed_edges: Vec<(NodeId, NodeId)>,
    pub stretch_log: Vec<StretchRecord>,
}

impl FactorGraph {
    fn new(q: u32, omega: u32) -> Self {
        FactorGraph {
            q,
            omega,
            nodes: Vec::new(),
            adj: Vec::new(),
            acyclic: false,
            removed_edges: Vec::new(),
            stretch_log: Vec::new(),
        }
    }

    fn push_node(&mut self, node: FGNode) -> NodeId {
        let id = self.nodes.len();
        debug_assert_eq!(node.id, id);
        self.nodes.push(node);
        self.adj.push(Vec::new());
        id
    }

    fn add_edge(&mut self, a: NodeId, b: NodeId) {
        debug_assert!(self.nodes[a].is_factor() != self.nodes[b].is_factor());
        self.adj[a].push(b);
        self.adj[b].push(a);
        self.adj[a].sort_unstable();
        self.adj[b].sort_unstable();
    }

    fn remove_edge(&mut self, a: NodeId, b: NodeId) {
        self.adj[a].retain(|&n| n != b);
        self.adj[b].retain(|&n| n != a);
    }

    pub fn neighbors(&self, z: NodeId) -> &[NodeId] {
        &self.adj[z]
    }

    pub fn degree(&self, z: NodeId) -> usize {
        self.adj[z].len()
    }

    /// `q^{|S_z|}`, the node's configuration-space size.
    pub fn q_z(&self, z: NodeId) -> u64 {
        config_count(self.q, self.nodes[z].domain.len()) as u64
    }

    /// `q^{|S_a ∩ S_b|}` for an edge.
    pub fn q_e(&self, a: NodeId, b: NodeId) -> u64 {
        let shared = crate::table::intersect_vars(&self.nodes[a].domain, &self.nodes[b].domain);
        config_count(self.q, shared.len()) as u64
    }

    /// Undirected edges as ordered (low, high) pairs, ascending.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::new();
        for a in 0..self.adj.len() {
            for &b in &self.adj[a] {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|n| n.len()).sum::<usize>() / 2
    }

    pub fn variable_nodes(&self) -> impl Iterator<Item = &FGNode> {
        self.nodes.iter().filter(|n| !n.is_factor())
    }

    pub fn factor_nodes(&self) -> impl Iterator<Item = &FGNode> {
        self.nodes.iter().filter(|n| n.is_factor())
    }

    /// Connected components, each sorted ascending, ordered by smallest node.
    pub fn components(&self) -> Vec<Vec<NodeId>> {
        let mut seen = vec![false; self.nodes.len()];
        let mut out = Vec::new();
        for start in 0..self.nodes.len() {
            if seen[start] {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(z) = queue.pop_front() {
                comp.push(z);
                for &n in &self.adj[z] {
                    if !seen[n] {
                        seen[n] = true;
                        queue.push_back(n);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_forest(&self) -> bool {
        self.edge_count() + self.components().len() == self.node_count()
    }

    /// Node whose label matches, if any. Labels are `x<i>` for variables and
    /// the edge id for factors.
    pub fn node_by_label(&self, label: &str) -> Option<NodeId> {
        self.nodes.iter().position(|n| n.label == label)
    }

    /// Unique path between two nodes of the forest (inclusive), if connected.
    pub fn forest_path(&self, from: NodeId, to: NodeId) -> Option<Vec<NodeId>> {
        let mut prev = vec![usize::MAX; self.nodes.len()];
        let mut queue = VecDeque::from([from]);
        prev[from] = from;
        while let Some(z) = queue.pop_front() {
            if z == to {
                let mut path = vec![to];
                let mut cur = to;
                while cur != from {
                    cur = prev[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for &n in &self.adj[z] {
                if prev[n] == usize::MAX {
                    prev[n] = z;
                    queue.push_back(n);
                }
            }
        }
        None
    }

    /// Stable multi-line description; byte-identical for identical graphs.
    pub fn describe(&self) -> String {
        let mut out = String::new();
        for node in &self.nodes {
            let kind = match node.kind {
                NodeKind::Variable => "var",
                NodeKind::Factor => "factor",
                NodeKind::DummyFactor => "dummy",
            };
            let domain: Vec<String> = node.domain.iter().map(|v| format!("x{v}")).collect();
            out.push_str(&format!(
                "node {} {} {} domain={{{}}} degree={}{}\n",
                node.id,
                kind,
                node.label,
                domain.join(","),
                self.degree(node.id),
                if node.unconstrained { " unconstrained" } else { "" },
            ));
        }
        for (a, b) in self.edges() {
            out.push_str(&format!("edge {a}-{b}\n"));
        }
        for (a, b) in &self.removed_edges {
            out.push_str(&format!("removed {a}-{b}\n"));
        }
        for s in &self.stretch_log {
            let path: Vec<String> = s.path.iter().map(|n| n.to_string()).collect();
            out.push_str(&format!("stretch x{} along {}\n", s.var, path.join("-")));
        }
        out
    }
}

/// Spanning-tree override: edges to delete before stretching, named as
/// (message variable, factor edge id) pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TreeOverride {
    pub remove: Vec<(VarIndex, String)>,
}

fn build_common(
    inst: &NetworkCodeInstance,
    sink_id: &str,
    received: &ReceivedVector,
) -> Result<FactorGraph, BuildError> {
    let sink = inst.sink(sink_id)?;
    received.validate(inst)?;
    if received.sink_id != sink_id {
        return Err(ModelError::ReceivedMismatch {
            sink: sink_id.to_string(),
            edge: format!("received data addressed to sink {}", received.sink_id),
        }
        .into());
    }
    let q = inst.alphabet.q();
    let mut g = FactorGraph::new(q, inst.omega);
    for i in 1..=inst.omega {
        g.push_node(FGNode {
            id: (i - 1) as NodeId,
            label: format!("x{i}"),
            kind: NodeKind::Variable,
            domain: vec![i],
            kernel: None,
            unconstrained: true,
        });
    }
    for edge in &sink.in_edges {
        let y = received.values[&edge.edge_id];
        let kernel = BoolTable::from_fn(q, &edge.support, |tuple| {
            eval_map_tuple(&inst.alphabet, edge, tuple) == y
        });
        let id = g.nodes.len();
        g.push_node(FGNode {
            id,
            label: edge.edge_id.clone(),
            kind: NodeKind::Factor,
            domain: edge.support.clone(),
            kernel: Some(kernel),
            unconstrained: false,
        });
        for &v in &edge.support {
            g.nodes[(v - 1) as usize].unconstrained = false;
            g.add_edge((v - 1) as NodeId, id);
        }
    }
    g.acyclic = g.is_forest();
    Ok(g)
}

fn check_demand_covered(g: &FactorGraph, demanded: &[VarIndex]) -> Result<(), BuildError> {
    for &v in demanded {
        if g.nodes[(v - 1) as usize].unconstrained {
            return Err(BuildError::DemandNotCovered { var: v });
        }
    }
    Ok(())
}

/// Factor graph for decoding a message demand at a sink.
pub fn build_decoding_graph(
    inst: &NetworkCodeInstance,
    sink_id: &str,
    received: &ReceivedVector,
) -> Result<FactorGraph, BuildError> {
    let sink = inst.sink(sink_id)?;
    let demanded = match &sink.demand {
        Demand::Messages(d) => d.clone(),
        Demand::Function { .. } => {
            return Err(BuildError::WrongBuilderForFunction(sink_id.to_string()))
        }
    };
    let g = build_common(inst, sink_id, received)?;
    check_demand_covered(&g, &demanded)?;
    Ok(g)
}

/// Factor graph for computing a target function at a sink: the decoding
/// graph plus a dummy factor node over the function's arguments.
pub fn build_function_graph(
    inst: &NetworkCodeInstance,
    sink_id: &str,
    received: &ReceivedVector,
) -> Result<FactorGraph, BuildError> {
    let sink = inst.sink(sink_id)?;
    let args = match &sink.demand {
        Demand::Function { args, .. } => args.clone(),
        Demand::Messages(_) => {
            return Err(BuildError::WrongBuilderForMessages(sink_id.to_string()))
        }
    };
    let mut g = build_common(inst, sink_id, received)?;
    check_demand_covered(&g, &args)?;
    let id = g.nodes.len();
    let kernel = BoolTable::all_ones(g.q, &args);
    g.push_node(FGNode {
        id,
        label: "g".to_string(),
        kind: NodeKind::DummyFactor,
        domain: args.clone(),
        kernel: Some(kernel),
        unconstrained: false,
    });
    for &v in &args {
        g.add_edge((v - 1) as NodeId, id);
    }
    g.acyclic = g.is_forest();
    Ok(g)
}

/// Remove cycles by spanning-forest extraction and variable stretching.
///
/// Without an override, the forest is grown breadth-first from the lowest
/// node id of each component, visiting neighbors in ascending id order; every
/// non-tree edge is removed. With an override, exactly the listed edges are
/// removed (they must leave a spanning forest). Each removed edge (x, w) then
/// has x stretched along the forest path from x's node to w.
pub fn acyclify(g: &FactorGraph, tie_break: Option<&TreeOverride>) -> Result<FactorGraph, BuildError> {
    if g.acyclic && tie_break.is_none() {
        return Ok(g.clone());
    }
    let mut out = g.clone();
    let removed = match tie_break {
        Some(ov) => {
            let mut removed = Vec::new();
            for (var, edge_id) in &ov.remove {
                let var_node = (*var as usize).checked_sub(1).filter(|&v| v < g.omega as usize);
                let factor_node = g.node_by_label(edge_id);
                match (var_node, factor_node) {
                    (Some(v), Some(w)) if g.adj[v].contains(&w) => removed.push((v, w)),
                    _ => {
                        return Err(BuildError::OverrideUnknownEdge {
                            var: *var,
                            edge: edge_id.clone(),
                        })
                    }
                }
            }
            let before = out.components().len();
            for &(v, w) in &removed {
                out.remove_edge(v, w);
            }
            if !out.is_forest() || out.components().len() != before {
                return Err(BuildError::OverrideNotForest);
            }
            removed
        }
        None => {
            // BFS spanning forest from the lowest id of each component.
            let mut in_tree = vec![false; g.nodes.len()];
            let mut parent = vec![usize::MAX; g.nodes.len()];
            let mut removed = Vec::new();
            for start in 0..g.nodes.len() {
                if in_tree[start] {
                    continue;
                }
                in_tree[start] = true;
                let mut queue = VecDeque::from([start]);
                while let Some(z) = queue.pop_front() {
                    for &n in &g.adj[z] {
                        if !in_tree[n] {
                            in_tree[n] = true;
                            parent[n] = z;
                            queue.push_back(n);
                        } else if parent[z] != n {
                            // non-tree edge; store as (variable, factor)
                            let pair = if g.nodes[z].is_factor() { (n, z) } else { (z, n) };
                            if !removed.contains(&pair) {
                                removed.push(pair);
                            }
                        }
                    }
                }
            }
            for &(v, w) in &removed {
                out.remove_edge(v, w);
            }
            removed
        }
    };

    // Stretch each removed edge's variable along the forest path it lost.
    for &(var_node, factor_node) in &removed {
        let var = g.nodes[var_node].domain[0];
        let path = out
            .forest_path(var_node, factor_node)
            .expect("removed edge endpoints stay connected in the spanning forest");
        for &z in &path {
            if !out.nodes[z].domain.contains(&var) {
                out.nodes[z].domain.push(var);
                out.nodes[z].domain.sort_unstable();
                let len = out.nodes[z].domain.len();
                let mut size = 1usize;
                for _ in 0..len {
                    size = size.saturating_mul(out.q as usize);
                }
                if size > MAX_TABLE_LEN {
                    return Err(BuildError::DomainTooLarge { node: z });
                }
            }
        }
        out.stretch_log.push(StretchRecord { var, path });
    }
    out.removed_edges = removed;
    out.acyclic = true;
    debug_assert!(out.is_forest());
    debug_assert!(stretch_paths_covered(&out));
    Ok(out)
}

/// Every removed edge's variable must sit in every domain along its path.
fn stretch_paths_covered(g: &FactorGraph) -> bool {
    g.stretch_log.iter().all(|s| {
        s.path
            .iter()
            .all(|&z| g.nodes[z].domain.contains(&s.var))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{parse_instance, Assignment};

    fn butterfly() -> NetworkCodeInstance {
        parse_instance(&crate::corpus::fixture("butterfly").unwrap().instance_text).unwrap()
    }

    fn butterfly_graph(y1: u32, y2: u32) -> FactorGraph {
        let inst = butterfly();
        let rv = ReceivedVector {
            sink_id: "T1".into(),
            values: [("V1-T1".to_string(), y1), ("V4-T1".to_string(), y2)]
                .into_iter()
                .collect(),
        };
        build_decoding_graph(&inst, "T1", &rv).unwrap()
    }

    #[test]
    fn butterfly_t1_structure() {
        let g = butterfly_graph(1, 1);
        assert_eq!(g.variable_nodes().count(), 2);
        assert_eq!(g.factor_nodes().count(), 2);
        let f1 = g.node_by_label("V1-T1").unwrap();
        let f2 = g.node_by_label("V4-T1").unwrap();
        assert_eq!(g.nodes[f1].domain, vec![1]);
        assert_eq!(g.nodes[f2].domain, vec![1, 2]);
        assert_eq!(g.edges(), vec![(0, f1), (0, f2), (1, f2)]);
        assert!(g.acyclic);
    }

    #[test]
    fn single_edge_graph() {
        let text = r#"{
            "alphabet": {"kind": "prime_field", "q": 2},
            "omega": 1,
            "sinks": [{
                "id": "T",
                "in_edges": [{"id": "e", "support": [1], "map": {"linear": ["1"]}}],
                "demand": {"messages": [1]}
            }]
        }"#;
        let inst = parse_instance(text).unwrap();
        let rv = crate::model::evaluate_received(&inst, "T", &Assignment::from_total(&[1])).unwrap();
        let g = build_decoding_graph(&inst, "T", &rv).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn acyclic_input_unchanged() {
        let g = butterfly_graph(0, 0);
        let s = acyclify(&g, None).unwrap();
        assert!(s.removed_edges.is_empty());
        assert_eq!(s.describe(), g.describe());
    }

    #[test]
    fn n3_sink43_cycles_and_paper_tree() {
        let fixture = crate::corpus::fixture("n3-sink43").unwrap();
        let inst = parse_instance(&fixture.instance_text).unwrap();
        let rv =
            crate::model::evaluate_received(&inst, "43", &Assignment::from_total(&[0; 5])).unwrap();
        let g = build_decoding_graph(&inst, "43", &rv).unwrap();
        assert_eq!(g.variable_nodes().count(), 5);
        assert_eq!(g.factor_nodes().count(), 6);
        // two independent cycles: |E| - |Z| + components
        assert_eq!(g.edge_count() - g.node_count() + g.components().len(), 2);
        assert!(!g.acyclic);

        let s = acyclify(&g, fixture.tree_override.as_ref()).unwrap();
        assert!(s.acyclic);
        assert!(s.is_forest());
        let max_domain = s.nodes.iter().map(|n| n.domain.len()).max().unwrap();
        assert_eq!(max_domain, 3);
        // stretched domains of the pinned tree
        let dom = |label: &str| s.nodes[s.node_by_label(label).unwrap()].domain.clone();
        assert_eq!(dom("x1"), vec![1, 3]);
        assert_eq!(dom("x2"), vec![2, 3]);
        assert_eq!(dom("x4"), vec![3, 4]);
        assert_eq!(dom("x5"), vec![3, 5]);
        assert_eq!(dom("31-43"), vec![1, 2, 3]);
        assert_eq!(dom("36-43"), vec![3, 4, 5]);
    }

    #[test]
    fn default_bfs_tree_is_deterministic() {
        let fixture = crate::corpus::fixture("n3-sink43").unwrap();
        let inst = parse_instance(&fixture.instance_text).unwrap();
        let rv =
            crate::model::evaluate_received(&inst, "43", &Assignment::from_total(&[1, 2, 3, 0, 1]))
                .unwrap();
        let g = build_decoding_graph(&inst, "43", &rv).unwrap();
        let a = acyclify(&g, None).unwrap();
        let b = acyclify(&g, None).unwrap();
        assert_eq!(a.describe(), b.describe());
        assert!(a.acyclic && a.is_forest());
    }

    #[test]
    fn override_must_leave_forest() {
        let g = butterfly_graph(0, 0);
        // removing a bridge disconnects the graph
        let ov = TreeOverride { remove: vec![(2, "V4-T1".into())] };
        assert!(matches!(acyclify(&g, Some(&ov)), Err(BuildError::OverrideNotForest)));
        let ov = TreeOverride { remove: vec![(2, "nope".into())] };
        assert!(matches!(acyclify(&g, Some(&ov)), Err(BuildError::OverrideUnknownEdge { .. })));
    }

    #[test]
    fn function_graph_adds_dummy() {
        let fixture = crate::corpus::fixture("example3-majority").unwrap();
        let inst = parse_instance(&fixture.instance_text).unwrap();
        let rv =
            crate::model::evaluate_received(&inst, "T", &Assignment::from_total(&[1, 1, 1, 0]))
                .unwrap();
        let g = build_function_graph(&inst, "T", &rv).unwrap();
        assert_eq!(g.variable_nodes().count(), 4);
        assert_eq!(g.factor_nodes().count(), 4); // three edges + dummy
        let dummy = g.node_by_label("g").unwrap();
        assert_eq!(g.nodes[dummy].kind, NodeKind::DummyFactor);
        assert_eq!(g.degree(dummy), 3);
        assert!(g.nodes[dummy].kernel.as_ref().unwrap().is_trivial());
        // x4 participates in nothing
        assert!(g.nodes[3].unconstrained);
        assert_eq!(g.degree(3), 0);
    }

    #[test]
    fn uncovered_demand_is_a_build_error() {
        let text = r#"{
            "alphabet": {"kind": "prime_field", "q": 2},
            "omega": 2,
            "sinks": [{
                "id": "T",
                "in_edges": [{"id": "e", "support": [2], "map": {"linear": ["1"]}}],
                "demand": {"function": {"args": [1], "table": ["0", "1"]}}
            }]
        }"#;
        let inst = parse_instance(text).unwrap();
        let rv = ReceivedVector {
            sink_id: "T".into(),
            values: [("e".to_string(), 0)].into_iter().collect(),
        };
        assert!(matches!(
            build_function_graph(&inst, "T", &rv),
            Err(BuildError::DemandNotCovered { var: 1 })
        ));
    }

    #[test]
    fn function_graph_mirrors_decoding_graph_plus_dummy() {
        // converting a message demand to the projection function adds exactly
        // one dummy node and its argument edges
        let inst = butterfly();
        let mut sinks = inst.sinks.clone();
        sinks[0].demand = Demand::Function { args: vec![1, 2], table: vec![0, 1, 2 % 2, 1] };
        let finst =
            NetworkCodeInstance::new(inst.alphabet.clone(), inst.omega, sinks).unwrap();
        let rv = ReceivedVector {
            sink_id: "T1".into(),
            values: [("V1-T1".to_string(), 1), ("V4-T1".to_string(), 1)]
                .into_iter()
                .collect(),
        };
        let dg = build_decoding_graph(&inst, "T1", &rv).unwrap();
        let fg = build_function_graph(&finst, "T1", &rv).unwrap();
        assert_eq!(fg.node_count(), dg.node_count() + 1);
        let dummy = fg.node_by_label("g").unwrap();
        assert_eq!(fg.edge_count(), dg.edge_count() + fg.degree(dummy));
        for (a, b) in dg.edges() {
            assert!(fg.edges().contains(&(a, b)));
        }
    }

    #[test]
    fn stretch_example_fig_shape() {
        // A 6-node chain of pairwise constraints closed into two cycles:
        // removing the closing edges stretches their variables along the
        // remaining path, and the result stays exact (checked elsewhere).
        let text = r#"{
            "alphabet": {"kind": "prime_field", "q": 2},
            "omega": 3,
            "sinks": [{
                "id": "T",
                "in_edges": [
                    {"id": "h1", "support": [1, 2], "map": {"linear": ["1", "1"]}},
                    {"id": "h2", "support": [2, 3], "map": {"linear": ["1", "1"]}},
                    {"id": "h3", "support": [1, 3], "map": {"linear": ["1", "1"]}}
                ],
                "demand": {"messages": [1, 2, 3]}
            }]
        }"#;
        let inst = parse_instance(text).unwrap();
        let rv = crate::model::evaluate_received(&inst, "T", &Assignment::from_total(&[0, 1, 1]))
            .unwrap();
        let g = build_decoding_graph(&inst, "T", &rv).unwrap();
        assert!(!g.acyclic);
        let s = acyclify(&g, None).unwrap();
        assert_eq!(s.removed_edges.len(), 1);
        assert_eq!(s.stretch_log.len(), 1);
        let rec = &s.stretch_log[0];
        for &z in &rec.path {
            assert!(s.nodes[z].domain.contains(&rec.var));
        }
    }
}
