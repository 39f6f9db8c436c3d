//! Closed-form operation-count predictions and fast-decodability reporting.
//!
//! The five predictors are literal evaluations of the schedule cost formulas
//! on the graph's degrees, configuration-space sizes, and edge overlaps:
//!
//! * `c1` — single-vertex sum-product;
//! * `c2` — single-vertex with a support scan at the root;
//! * `c3` — single-vertex with traceback at every node;
//! * `c4` — all-vertex sum-product;
//! * `c5` — all-vertex with support scans everywhere.
//!
//! The formulas assume every product touches non-trivial tables, so on
//! leaf-heavy graphs they can exceed (or on degree-one variable nodes,
//! undershoot) what the instrumented engine actually performs. The report
//! prints both columns and their difference; it never reconciles them.

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{FactorGraph, NodeId};
use crate::table::OpCount;

#[derive(Debug, Error)]
pub enum AnalyzeError {
    #[error("predictions require an acyclic graph; run acyclify first")]
    Cyclic,
    #[error("invalid root id {0}")]
    BadRoot(NodeId),
}

/// Closed-form predictions and per-graph statistics.
#[derive(Debug, Clone)]
pub struct CountReport {
    pub c1: i64,
    pub c2: i64,
    pub c3: i64,
    pub c4: i64,
    pub c5: i64,
    pub root: NodeId,
    /// Largest post-stretch local domain size.
    pub max_domain_size: usize,
    /// `max_domain_size < omega`: sum-product decoding beats brute force for
    /// a sink demanding every message.
    pub fast_decodable: bool,
    /// Per node: (degree, q_z, a_z).
    pub node_stats: Vec<(usize, u64, u64)>,
    /// Per edge: (a, b, q_e).
    pub edge_stats: Vec<(NodeId, NodeId, u64)>,
    /// Instrumented totals per mode, when a run was performed.
    pub instrumented: Vec<(String, OpCount)>,
}

/// Evaluate the closed forms on an acyclic graph with the given root.
pub fn predict(g: &FactorGraph, root: NodeId) -> Result<CountReport, AnalyzeError> {
    if !g.acyclic {
        return Err(AnalyzeError::Cyclic);
    }
    if root >= g.node_count() {
        return Err(AnalyzeError::BadRoot(root));
    }
    let node_stats: Vec<(usize, u64, u64)> = g
        .nodes
        .iter()
        .map(|n| (g.degree(n.id), g.q_z(n.id), n.a_z()))
        .collect();
    let edge_stats: Vec<(NodeId, NodeId, u64)> =
        g.edges().into_iter().map(|(a, b)| (a, b, g.q_e(a, b))).collect();

    let sum_dq: i64 = node_stats.iter().map(|&(d, q, _)| d as i64 * q as i64).sum();
    let sum_qe: i64 = edge_stats.iter().map(|&(_, _, q)| q as i64).sum();
    let sum_qv: i64 =
        node_stats.iter().filter(|&&(_, _, a)| a == 0).map(|&(_, q, _)| q as i64).sum();
    let sum_qw: i64 =
        node_stats.iter().filter(|&&(_, _, a)| a == 1).map(|&(_, q, _)| q as i64).sum();
    let sum_qz: i64 = node_stats.iter().map(|&(_, q, _)| q as i64).sum();
    let n_nodes = g.node_count() as i64;
    let q_root = g.q_z(root) as i64;

    let c1 = sum_dq - sum_qe - sum_qv;
    let c2 = c1 + q_root - 1;
    let c3 = sum_dq - sum_qe + sum_qw - n_nodes;
    let c4: i64 = node_stats
        .iter()
        .map(|&(d, q, _)| (4 * d as i64 - 5) * q as i64)
        .sum::<i64>()
        + 2 * sum_qw
        - 2 * sum_qe;
    let c5 = c4 + sum_qz - n_nodes;

    let max_domain_size = g.nodes.iter().map(|n| n.domain.len()).max().unwrap_or(0);
    Ok(CountReport {
        c1,
        c2,
        c3,
        c4,
        c5,
        root,
        max_domain_size,
        fast_decodable: max_domain_size < g.omega as usize,
        node_stats,
        edge_stats,
        instrumented: Vec::new(),
    })
}

/// Largest post-stretch domain size and whether it beats brute force.
pub fn fast_decodability(g: &FactorGraph, omega: u32) -> (usize, bool) {
    let m = g.nodes.iter().map(|n| n.domain.len()).max().unwrap_or(0);
    (m, m < omega as usize)
}

/// Render the report. `machine` emits stable line-oriented `key=value`
/// output; the human form groups the same data into sections. Headline
/// totals fold comparison counts into the OR column.
pub fn render_report(g: &FactorGraph, report: &CountReport, machine: bool) -> String {
    let mut out = String::new();
    if machine {
        let _ = writeln!(out, "graph.nodes={}", g.node_count());
        let _ = writeln!(out, "graph.edges={}", g.edge_count());
        let _ = writeln!(out, "graph.variable_nodes={}", g.variable_nodes().count());
        let _ = writeln!(out, "graph.factor_nodes={}", g.factor_nodes().count());
        let _ = writeln!(out, "graph.removed_edges={}", g.removed_edges.len());
        let _ = writeln!(out, "graph.max_domain_size={}", report.max_domain_size);
        for (i, &(d, q, a)) in report.node_stats.iter().enumerate() {
            let _ = writeln!(
                out,
                "node.{i}.label={} node.{i}.d={d} node.{i}.q={q} node.{i}.a={a}",
                g.nodes[i].label
            );
        }
        for &(a, b, q) in &report.edge_stats {
            let _ = writeln!(out, "edge.{a}-{b}.q={q}");
        }
        let _ = writeln!(out, "predict.root={}", report.root);
        let _ = writeln!(out, "predict.c1={}", report.c1);
        let _ = writeln!(out, "predict.c2={}", report.c2);
        let _ = writeln!(out, "predict.c3={}", report.c3);
        let _ = writeln!(out, "predict.c4={}", report.c4);
        let _ = writeln!(out, "predict.c5={}", report.c5);
        for (mode, ops) in &report.instrumented {
            let _ = writeln!(out, "instrumented.{mode}.and={}", ops.and_ops);
            let _ = writeln!(out, "instrumented.{mode}.or={}", ops.or_ops + ops.cmp_ops);
            let _ = writeln!(out, "instrumented.{mode}.or_only={}", ops.or_ops);
            let _ = writeln!(out, "instrumented.{mode}.cmp_only={}", ops.cmp_ops);
            let _ = writeln!(out, "instrumented.{mode}.total={}", ops.total());
        }
        let _ = writeln!(out, "fast.m={}", report.max_domain_size);
        let _ = writeln!(out, "fast.omega={}", g.omega);
        let _ = writeln!(out, "fast.decodable={}", report.fast_decodable);
    } else {
        let _ = writeln!(out, "graph: {} nodes ({} variable, {} factor), {} edges, {} removed for stretching",
            g.node_count(),
            g.variable_nodes().count(),
            g.factor_nodes().count(),
            g.edge_count(),
            g.removed_edges.len());
        let _ = writeln!(out, "predictions (root {}):", g.nodes[report.root].label);
        let _ = writeln!(out, "  single-vertex             C1 = {}", report.c1);
        let _ = writeln!(out, "  single-vertex + support   C2 = {}", report.c2);
        let _ = writeln!(out, "  single-vertex + traceback C3 = {}", report.c3);
        let _ = writeln!(out, "  all-vertex                C4 = {}", report.c4);
        let _ = writeln!(out, "  all-vertex + supports     C5 = {}", report.c5);
        for (mode, ops) in &report.instrumented {
            let _ = writeln!(
                out,
                "instrumented {mode}: total={} (and={}, or={}, cmp={})",
                ops.total(),
                ops.and_ops,
                ops.or_ops,
                ops.cmp_ops
            );
        }
        let _ = writeln!(
            out,
            "fast decodability: max domain {} vs omega {} -> {}",
            report.max_domain_size,
            g.omega,
            if report.fast_decodable { "fast" } else { "not fast" }
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::graph::{acyclify, build_decoding_graph};
    use crate::model::{evaluate_received, parse_instance, Assignment};

    fn butterfly_t1() -> FactorGraph {
        let inst =
            parse_instance(&corpus::fixture("butterfly").unwrap().instance_text).unwrap();
        let rv = evaluate_received(&inst, "T1", &Assignment::from_total(&[1, 0])).unwrap();
        build_decoding_graph(&inst, "T1", &rv).unwrap()
    }

    #[test]
    fn butterfly_hand_derived_predictions() {
        // d = (2,1,1,2), q_z = (2,2,2,4), q_e = (2,2,2):
        // C1 = 16 − 6 − 4 = 6; C2 = 6 + 2 − 1 = 7 at root x1;
        // C3 = 16 − 6 + 6 − 4 = 12; C4 = (6−2−2+12) + 12 − 12 = 14;
        // C5 = 14 + 10 − 4 = 20.
        let g = butterfly_t1();
        let report = predict(&g, 0).unwrap();
        assert_eq!(report.c1, 6);
        assert_eq!(report.c2, 7);
        assert_eq!(report.c3, 12);
        assert_eq!(report.c4, 14);
        assert_eq!(report.c5, 20);
    }

    #[test]
    fn single_edge_graph_c1_zero() {
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
        let rv = evaluate_received(&inst, "T", &Assignment::from_total(&[0])).unwrap();
        let g = build_decoding_graph(&inst, "T", &rv).unwrap();
        let report = predict(&g, 0).unwrap();
        assert_eq!(report.c1, 0);
    }

    #[test]
    fn c3_identity_every_root() {
        // C3 = C2 + Σ_{z≠r}(q_z − 1) for every root
        let g = butterfly_t1();
        for root in 0..g.node_count() {
            let report = predict(&g, root).unwrap();
            let extra: i64 = (0..g.node_count())
                .filter(|&z| z != root)
                .map(|z| g.q_z(z) as i64 - 1)
                .sum();
            assert_eq!(report.c3, report.c2 + extra, "root {root}");
        }
    }

    #[test]
    fn root_independence_of_c1_c3_c4_c5() {
        let g = butterfly_t1();
        let base = predict(&g, 0).unwrap();
        for root in 1..g.node_count() {
            let r = predict(&g, root).unwrap();
            assert_eq!(r.c1, base.c1);
            assert_eq!(r.c3, base.c3);
            assert_eq!(r.c4, base.c4);
            assert_eq!(r.c5, base.c5);
        }
    }

    #[test]
    fn fast_decodability_butterfly_vs_n3() {
        let g = butterfly_t1();
        let (m, fast) = fast_decodability(&g, 2);
        assert_eq!(m, 2);
        assert!(!fast);

        let fixture = corpus::fixture("n3-sink43").unwrap();
        let inst = parse_instance(&fixture.instance_text).unwrap();
        let rv = evaluate_received(&inst, "43", &Assignment::from_total(&[0; 5])).unwrap();
        let g = build_decoding_graph(&inst, "43", &rv).unwrap();
        let s = acyclify(&g, fixture.tree_override.as_ref()).unwrap();
        let (m, fast) = fast_decodability(&s, 5);
        assert_eq!(m, 3);
        assert!(fast);
    }

    #[test]
    fn full_domain_factor_is_not_fast() {
        let text = r#"{
            "alphabet": {"kind": "prime_field", "q": 2},
            "omega": 3,
            "sinks": [{
                "id": "T",
                "in_edges": [{"id": "e", "support": [1, 2, 3], "map": {"linear": ["1", "1", "1"]}}],
                "demand": {"messages": [1]}
            }]
        }"#;
        let inst = parse_instance(text).unwrap();
        let rv = evaluate_received(&inst, "T", &Assignment::from_total(&[0, 0, 0])).unwrap();
        let g = build_decoding_graph(&inst, "T", &rv).unwrap();
        let (m, fast) = fast_decodability(&g, 3);
        assert_eq!(m, 3);
        assert!(!fast);
    }

    #[test]
    fn cyclic_graph_rejected() {
        let fixture = corpus::fixture("n3-sink43").unwrap();
        let inst = parse_instance(&fixture.instance_text).unwrap();
        let rv = evaluate_received(&inst, "43", &Assignment::from_total(&[0; 5])).unwrap();
        let g = build_decoding_graph(&inst, "43", &rv).unwrap();
        assert!(matches!(predict(&g, 0), Err(AnalyzeError::Cyclic)));
    }

    #[test]
    fn machine_report_is_stable() {
        let g = butterfly_t1();
        let report = predict(&g, 0).unwrap();
        let a = render_report(&g, &report, true);
        let b = render_report(&g, &report, true);
        assert_eq!(a, b);
        assert!(a.contains("predict.c1=6"));
        assert!(a.contains("fast.decodable=false"));
    }
}
