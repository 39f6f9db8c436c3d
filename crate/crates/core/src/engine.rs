//! Boolean-semiring message passing on acyclic factor graphs.
//!
//! Messages and marginals are Boolean tables; products are pointwise ANDs
//! and marginalization is an OR over dropped variables. Counting conventions,
//! pinned so instrumented totals reproduce the closed-form predictions on
//! graphs without trivial messages:
//!
//! * one AND per entry per pairwise product of non-trivial tables, products
//!   being formed over the sending node's full local domain;
//! * `(#configurations summed − 1)` ORs per output entry of a marginalization;
//! * all-ones tables cost nothing to produce and are skipped in products;
//! * extending a table to a superset of variables is free index arithmetic;
//! * a support scan costs `table length − 1` comparisons regardless of where
//!   the hits occur (no early exit).
//!
//! The single-vertex schedule retains every message and every partial
//! marginal `λ_z` (the product formed at `z` before the final
//! marginalization), so traceback can consume them without further ANDs.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::graph::{FactorGraph, NodeId};
use crate::table::{intersect_vars, product_at, BoolTable, OpCount};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("node {0} is not a leaf")]
    NotLeaf(NodeId),
    #[error("invalid node id {0}")]
    BadNode(NodeId),
    #[error("message from {from} to {to} is missing")]
    MissingMessage { from: NodeId, to: NodeId },
    #[error("graph must be acyclic; run acyclify first")]
    Cyclic,
}

/// A directed message: a table over the shared domain of its endpoints.
#[derive(Debug, Clone)]
pub struct Message {
    pub from: NodeId,
    pub to: NodeId,
    pub table: BoolTable,
}

/// Marginal function of one node, over its full local domain.
#[derive(Debug, Clone)]
pub struct Marginal {
    pub node: NodeId,
    pub table: BoolTable,
}

/// What a counted step was for; mirrors the rows of an operation audit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountEventKind {
    Message { from: NodeId, to: NodeId },
    Marginal { node: NodeId },
    Support { node: NodeId },
    Traceback { node: NodeId },
}

/// One accounted step of a run.
#[derive(Debug, Clone, Copy)]
pub struct CountEvent {
    pub kind: CountEventKind,
    pub ops: OpCount,
}

/// Messages, partial marginals, and the per-step operation log of a run.
#[derive(Debug, Default)]
pub struct MessageStore {
    messages: HashMap<(NodeId, NodeId), BoolTable>,
    lambdas: HashMap<NodeId, BoolTable>,
    pub log: Vec<CountEvent>,
}

impl MessageStore {
    pub fn message(&self, from: NodeId, to: NodeId) -> Option<&BoolTable> {
        self.messages.get(&(from, to))
    }

    pub fn has_message(&self, from: NodeId, to: NodeId) -> bool {
        self.messages.contains_key(&(from, to))
    }

    /// Partial marginal `λ_z`: the product computed at `z` while messaging
    /// toward the root, before the final OR-marginalization.
    pub fn lambda(&self, node: NodeId) -> Option<&BoolTable> {
        self.lambdas.get(&node)
    }

    pub fn insert_message(&mut self, from: NodeId, to: NodeId, table: BoolTable, ops: OpCount) {
        self.messages.insert((from, to), table);
        self.log.push(CountEvent { kind: CountEventKind::Message { from, to }, ops });
    }

    pub fn record(&mut self, kind: CountEventKind, ops: OpCount) {
        self.log.push(CountEvent { kind, ops });
    }
}

/// Result of a single-vertex run.
pub struct SingleVertexRun {
    pub root: NodeId,
    pub marginal: Marginal,
    pub ops: OpCount,
    pub store: MessageStore,
}

fn kernel_of(g: &FactorGraph, z: NodeId) -> impl Iterator<Item = &BoolTable> {
    g.nodes[z].kernel.iter()
}

/// Compute the message `z -> to` from the node's kernel and the given
/// incoming messages (all neighbors but `to`). Returns the message table and
/// the partial marginal `λ_z` whose marginalization produced it.
fn message_from(
    g: &FactorGraph,
    z: NodeId,
    to: NodeId,
    incoming: &[&BoolTable],
    ops: &mut OpCount,
) -> (BoolTable, BoolTable) {
    let domain = &g.nodes[z].domain;
    let lambda = product_at(g.q, domain, kernel_of(g, z).chain(incoming.iter().copied()), ops);
    let shared = intersect_vars(domain, &g.nodes[to].domain);
    let table = lambda.marginalize_onto(&shared, ops);
    (table, lambda)
}

fn gather_incoming<'a>(
    store: &'a MessageStore,
    g: &FactorGraph,
    z: NodeId,
    except: Option<NodeId>,
) -> Result<Vec<&'a BoolTable>, EngineError> {
    let mut incoming = Vec::new();
    for &n in g.neighbors(z) {
        if Some(n) == except {
            continue;
        }
        incoming
            .push(store.message(n, z).ok_or(EngineError::MissingMessage { from: n, to: z })?);
    }
    Ok(incoming)
}

/// Message sent by a degree-one node. A variable leaf sends the all-ones
/// table at no cost; a factor leaf sends its kernel marginalized onto the
/// shared domain.
pub fn leaf_message(
    g: &FactorGraph,
    z: NodeId,
    to: NodeId,
) -> Result<(Message, OpCount), EngineError> {
    if g.degree(z) != 1 {
        return Err(EngineError::NotLeaf(z));
    }
    let mut ops = OpCount::default();
    let (table, _) = message_from(g, z, to, &[], &mut ops);
    Ok((Message { from: z, to, table }, ops))
}

/// Message from a variable node `v` to a factor node `w`, given the messages
/// from every other neighbor.
pub fn var_to_factor(
    g: &FactorGraph,
    v: NodeId,
    w: NodeId,
    incoming: &[&BoolTable],
) -> (Message, OpCount) {
    debug_assert!(!g.nodes[v].is_factor());
    let mut ops = OpCount::default();
    let (table, _) = message_from(g, v, w, incoming, &mut ops);
    (Message { from: v, to: w, table }, ops)
}

/// Message from a factor node `w` to a variable node `v`: the kernel joins
/// the product. Trivial incoming messages are skipped at zero cost.
pub fn factor_to_var(
    g: &FactorGraph,
    w: NodeId,
    v: NodeId,
    incoming: &[&BoolTable],
) -> (Message, OpCount) {
    debug_assert!(g.nodes[w].is_factor());
    let mut ops = OpCount::default();
    let (table, _) = message_from(g, w, v, incoming, &mut ops);
    (Message { from: w, to: v, table }, ops)
}

/// BFS order of the component containing `root` (root first), neighbors
/// visited in ascending id order, with the parent map.
pub fn bfs_from(g: &FactorGraph, root: NodeId) -> (Vec<NodeId>, HashMap<NodeId, NodeId>) {
    let mut order = vec![root];
    let mut parent = HashMap::new();
    let mut seen = vec![false; g.node_count()];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(z) = queue.pop_front() {
        for &n in g.neighbors(z) {
            if !seen[n] {
                seen[n] = true;
                parent.insert(n, z);
                order.push(n);
                queue.push_back(n);
            }
        }
    }
    (order, parent)
}

/// Single-vertex schedule: every node of the root's component sends exactly
/// one message toward the root; the root marginal is the product of its
/// kernel (if any) with all incoming messages. Other components contribute
/// nothing.
pub fn run_single_vertex(g: &FactorGraph, root: NodeId) -> Result<SingleVertexRun, EngineError> {
    if root >= g.node_count() {
        return Err(EngineError::BadNode(root));
    }
    if !g.acyclic {
        return Err(EngineError::Cyclic);
    }
    let (order, parent) = bfs_from(g, root);
    let mut store = MessageStore::default();
    let mut total = OpCount::default();

    // children send before parents: walk the BFS order backwards
    for &z in order.iter().rev() {
        if z == root {
            continue;
        }
        let p = parent[&z];
        let incoming = gather_incoming(&store, g, z, Some(p))?;
        let mut ops = OpCount::default();
        let (table, lambda) = message_from(g, z, p, &incoming, &mut ops);
        store.lambdas.insert(z, lambda);
        store.insert_message(z, p, table, ops);
        total.add(ops);
    }

    let incoming = gather_incoming(&store, g, root, None)?;
    let mut ops = OpCount::default();
    let table = product_at(
        g.q,
        &g.nodes[root].domain,
        kernel_of(g, root).chain(incoming.iter().copied()),
        &mut ops,
    );
    store.lambdas.insert(root, table.clone());
    store.record(CountEventKind::Marginal { node: root }, ops);
    total.add(ops);

    Ok(SingleVertexRun { root, marginal: Marginal { node: root, table }, ops: total, store })
}

/// Result of an all-vertex run.
pub struct AllVertexRun {
    pub marginals: Vec<Marginal>,
    pub ops: OpCount,
    pub store: MessageStore,
}

/// All-vertex schedule over every component, rooted at each component's
/// lowest node id.
pub fn run_all_vertex(g: &FactorGraph) -> Result<AllVertexRun, EngineError> {
    run_all_vertex_rooted(g, None)
}

/// All-vertex schedule with a preferred root for its component.
///
/// Messages flow to the root and back. At a node of degree d with neighbors
/// ordered root-side first and local function h, consecutive forward
/// products c_d = h·k_d, c_{d-1} = c_d·k_{d-1}, …, c_2 serve the root-side
/// message and the marginal; after the root-side k_1 arrives, the marginal
/// is k_1·c_2, backward products b_1 = k_1, b_j = b_{j-1}·k_j accumulate,
/// and the outgoing message toward neighbor i is b_{i-1}·c_{i+1} (with
/// c_{d+1} = h), marginalized onto the edge.
pub fn run_all_vertex_rooted(
    g: &FactorGraph,
    preferred_root: Option<NodeId>,
) -> Result<AllVertexRun, EngineError> {
    if !g.acyclic {
        return Err(EngineError::Cyclic);
    }
    if let Some(r) = preferred_root {
        if r >= g.node_count() {
            return Err(EngineError::BadNode(r));
        }
    }
    let mut store = MessageStore::default();
    let mut total = OpCount::default();
    let mut marginals: Vec<Option<Marginal>> = (0..g.node_count()).map(|_| None).collect();

    for component in g.components() {
        let root = match preferred_root {
            Some(r) if component.contains(&r) => r,
            _ => component[0],
        };
        let (order, parent) = bfs_from(g, root);

        // neighbor lists with the root-side neighbor first; for the root the
        // first neighbor plays that role
        let ordered_neighbors = |z: NodeId| -> Vec<NodeId> {
            let mut ns: Vec<NodeId> = g.neighbors(z).to_vec();
            if let Some(&p) = parent.get(&z) {
                ns.retain(|&n| n != p);
                ns.insert(0, p);
            }
            ns
        };

        // forward chains: chains[z][j] = h·k_d·…·k_{j} extended to S_z,
        // positions j = d+1 (h alone) down to 2
        let mut chains: HashMap<NodeId, Vec<BoolTable>> = HashMap::new();

        // phase 1: toward the root, children first
        for &z in order.iter().rev() {
            let ns = ordered_neighbors(z);
            let d = ns.len();
            let domain = &g.nodes[z].domain;
            let h = match &g.nodes[z].kernel {
                Some(k) => k.extend(domain),
                None => BoolTable::all_ones(g.q, domain),
            };
            let mut fwd_ops = OpCount::default();
            let mut chain = Vec::with_capacity(d);
            chain.push(h); // c_{d+1}
            for &n in ns.iter().skip(1).rev() {
                let k = store
                    .message(n, z)
                    .expect("children send before parents")
                    .extend(domain);
                let prev = chain.last().unwrap();
                chain.push(and_skipping_trivial(prev, &k, &mut fwd_ops));
            }
            // chain now ends with c_2 = h·k_2·…·k_d
            let c2 = chain.last().unwrap().clone();
            store.lambdas.insert(z, c2.clone());
            if z != root {
                let p = parent[&z];
                let shared = intersect_vars(domain, &g.nodes[p].domain);
                let table = c2.marginalize_onto(&shared, &mut fwd_ops);
                total.add(fwd_ops);
                store.insert_message(z, p, table, fwd_ops);
            } else if fwd_ops != OpCount::default() {
                total.add(fwd_ops);
                store.record(CountEventKind::Marginal { node: z }, fwd_ops);
            }
            chains.insert(z, chain);
        }

        // phase 2: away from the root, parents first (BFS order)
        for &z in &order {
            let ns = ordered_neighbors(z);
            let d = ns.len();
            let domain = &g.nodes[z].domain;
            let chain = &chains[&z];
            // chain[i] = c_{d+1-i}: chain[0] = c_{d+1} = h, chain[d-1] = c_2
            let c = |j: usize| &chain[d + 1 - j];

            if d == 0 {
                let table = chain[0].clone();
                marginals[z] = Some(Marginal { node: z, table });
                store.record(CountEventKind::Marginal { node: z }, OpCount::default());
                continue;
            }

            // k_1 from the root side; for the root itself every message has
            // arrived in phase 1
            let k1 = store
                .message(ns[0], z)
                .ok_or(EngineError::MissingMessage { from: ns[0], to: z })?
                .extend(domain);

            let mut marg_ops = OpCount::default();
            let marginal = and_skipping_trivial(&k1, c(2), &mut marg_ops);
            total.add(marg_ops);
            store.record(CountEventKind::Marginal { node: z }, marg_ops);
            marginals[z] = Some(Marginal { node: z, table: marginal });

            if z == root && d >= 1 {
                // the root's message toward its designated first neighbor
                let mut ops = OpCount::default();
                let shared = intersect_vars(domain, &g.nodes[ns[0]].domain);
                let table = c(2).marginalize_onto(&shared, &mut ops);
                total.add(ops);
                store.insert_message(z, ns[0], table, ops);
            }

            // backward products b_1 = k_1, b_j = b_{j-1}·k_j; byproduct cost
            // is folded into the outgoing message that consumes it
            let mut b_prev = k1;
            let mut pending = OpCount::default();
            for i in 2..=d {
                let mut ops = pending;
                pending = OpCount::default();
                let khat = and_skipping_trivial(&b_prev, c(i + 1), &mut ops);
                let shared = intersect_vars(domain, &g.nodes[ns[i - 1]].domain);
                let table = khat.marginalize_onto(&shared, &mut ops);
                total.add(ops);
                store.insert_message(z, ns[i - 1], table, ops);
                if i < d {
                    let k = store
                        .message(ns[i - 1], z)
                        .ok_or(EngineError::MissingMessage { from: ns[i - 1], to: z })?
                        .extend(domain);
                    b_prev = and_skipping_trivial(&b_prev, &k, &mut pending);
                }
            }
        }
    }

    let marginals = marginals
        .into_iter()
        .enumerate()
        .map(|(z, m)| m.unwrap_or(Marginal { node: z, table: BoolTable::all_ones(g.q, &g.nodes[z].domain) }))
        .collect();
    Ok(AllVertexRun { marginals, ops: total, store })
}

/// Pairwise AND over a shared domain with trivial-operand skipping: a
/// product with an all-ones operand is the other operand, at no cost.
fn and_skipping_trivial(a: &BoolTable, b: &BoolTable, ops: &mut OpCount) -> BoolTable {
    if a.is_trivial() {
        return b.clone();
    }
    if b.is_trivial() {
        return a.clone();
    }
    let mut out = a.clone();
    out.and_with(b, ops);
    out
}
