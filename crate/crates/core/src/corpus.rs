//! Built-in fixtures and seeded random instance generators.
//!
//! Three hand-built fixtures cover the interesting regimes: a two-message
//! multicast code over GF(2), a five-message vector nonlinear code over
//! 2-bit words whose pinned spanning tree and root make the operation totals
//! land on their closed forms, and a function-computation instance whose
//! consistent pre-images all evaluate to the same target value. Random
//! generators produce tree-shaped decodable codes, cyclic codes for
//! stretching tests, and valid function-computation codes.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::TreeOverride;
use crate::model::{
    serialize_instance, Alphabet, Assignment, Demand, EncodingMap, MapBody, ModelError,
    NetworkCodeInstance, SinkSpec,
};
use crate::table::{encode_index, Symbol, VarIndex};

/// Closed-form totals a fixture is pinned to, for count regression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectedCounts {
    pub traceback_total: u64,
    pub multiple_vertex_total: u64,
    /// Where the numbers come from.
    pub note: String,
}

/// A named instance with optional pinned schedule choices.
#[derive(Debug, Clone)]
pub struct CorpusFixture {
    pub name: String,
    pub instance_text: String,
    pub notes: String,
    pub tree_override: Option<TreeOverride>,
    /// Label of the node the single-vertex run should root at.
    pub root_label: Option<String>,
    pub expected_counts: Option<ExpectedCounts>,
}

/// Names of the hand-built fixtures.
pub const FIXTURE_NAMES: [&str; 3] = ["butterfly", "n3-sink43", "example3-majority"];

/// Look up a fixture; `random-tree-<seed>` generates one deterministically.
pub fn fixture(name: &str) -> Result<CorpusFixture, ModelError> {
    if let Some(seed) = name.strip_prefix("random-tree-") {
        if let Ok(seed) = seed.parse::<u64>() {
            let (inst, _) = random_tree_instance(seed);
            return Ok(CorpusFixture {
                name: name.to_string(),
                instance_text: serialize_instance(&inst),
                notes: format!("seeded random tree-shaped decodable code (seed {seed})"),
                tree_override: None,
                root_label: None,
                expected_counts: None,
            });
        }
    }
    match name {
        "butterfly" => Ok(butterfly()),
        "n3-sink43" => Ok(n3_sink43()),
        "example3-majority" => Ok(example3_majority()),
        other => Err(ModelError::UnknownSink(format!("no fixture named {other:?}"))),
    }
}

fn butterfly() -> CorpusFixture {
    let alphabet = Alphabet::prime_field(2).unwrap();
    let sink = |id: &str, direct_edge: &str, direct_var: VarIndex| SinkSpec {
        sink_id: id.to_string(),
        in_edges: vec![
            EncodingMap {
                edge_id: direct_edge.to_string(),
                support: vec![direct_var],
                body: MapBody::Linear(vec![1]),
            },
            EncodingMap {
                edge_id: format!("V4-{id}"),
                support: vec![1, 2],
                body: MapBody::Linear(vec![1, 1]),
            },
        ],
        demand: Demand::Messages(vec![1, 2]),
    };
    let inst = NetworkCodeInstance::new(
        alphabet,
        2,
        vec![sink("T1", "V1-T1", 1), sink("T2", "V2-T2", 2)],
    )
    .unwrap();
    CorpusFixture {
        name: "butterfly".to_string(),
        instance_text: serialize_instance(&inst),
        notes: "two-message multicast over GF(2): each sink sees one message \
                directly plus the sum of both"
            .to_string(),
        tree_override: None,
        root_label: None,
        expected_counts: None,
    }
}

/// 2-bit word reversal on Z4 symbols: 0<->0, 1<->2, 3<->3.
fn word_reverse(s: Symbol) -> Symbol {
    [0, 2, 1, 3][s as usize]
}

fn n3_sink43() -> CorpusFixture {
    let alphabet = Alphabet::symbol_set(4, None).unwrap();
    let z4_sum_table = |left: fn(Symbol) -> Symbol| {
        let mut entries = Vec::with_capacity(16);
        for a in 0..4 {
            for b in 0..4 {
                entries.push((left(a) + b) % 4);
            }
        }
        entries
    };
    let ident = |s: Symbol| s;
    let edge = |id: &str, support: Vec<VarIndex>, left: fn(Symbol) -> Symbol| EncodingMap {
        edge_id: id.to_string(),
        support,
        body: MapBody::Table(z4_sum_table(left)),
    };
    let inst = NetworkCodeInstance::new(
        alphabet,
        5,
        vec![SinkSpec {
            sink_id: "43".to_string(),
            in_edges: vec![
                edge("31-43", vec![1, 2], ident),
                edge("32-43", vec![1, 3], ident),
                edge("33-43", vec![2, 3], ident),
                edge("34-43", vec![3, 4], word_reverse),
                edge("35-43", vec![3, 5], word_reverse),
                edge("36-43", vec![4, 5], ident),
            ],
            demand: Demand::Messages(vec![1, 2, 3, 4, 5]),
        }],
    )
    .unwrap();
    CorpusFixture {
        name: "n3-sink43".to_string(),
        instance_text: serialize_instance(&inst),
        notes: "five 2-bit messages, six nonlinear maps built from Z4 addition \
                and the 2-bit word reversal t; the sink demands everything. \
                With the pinned tree and root, traceback decoding totals \
                5q^3+2q^2+q-3 operations and multiple-vertex decoding \
                9q^3+6q^2-2q-3 at q=4"
            .to_string(),
        tree_override: Some(TreeOverride {
            remove: vec![(3, "33-43".to_string()), (3, "35-43".to_string())],
        }),
        root_label: Some("36-43".to_string()),
        expected_counts: Some(ExpectedCounts {
            traceback_total: 353,
            multiple_vertex_total: 661,
            note: "closed-form totals for the pinned spanning tree and root at q=4".to_string(),
        }),
    }
}

fn example3_majority() -> CorpusFixture {
    let alphabet = Alphabet::prime_field(2).unwrap();
    let edge = |id: &str, support: Vec<VarIndex>| EncodingMap {
        edge_id: id.to_string(),
        support,
        body: MapBody::Linear(vec![1, 1]),
    };
    // g(x1,x2,x3) = x1+x2+x3+Maj(x1,x2,x3) over GF(2), row-major
    let mut table = Vec::with_capacity(8);
    for idx in 0..8u32 {
        let (a, b, c) = (idx >> 2 & 1, idx >> 1 & 1, idx & 1);
        let maj = u32::from(a + b + c >= 2);
        table.push((a + b + c + maj) % 2);
    }
    let inst = NetworkCodeInstance::new(
        alphabet,
        4,
        vec![SinkSpec {
            sink_id: "T".to_string(),
            in_edges: vec![
                edge("e1", vec![1, 2]),
                edge("e2", vec![2, 3]),
                edge("e3", vec![1, 3]),
            ],
            demand: Demand::Function { args: vec![1, 2, 3], table },
        }],
    )
    .unwrap();
    CorpusFixture {
        name: "example3-majority".to_string(),
        instance_text: serialize_instance(&inst),
        notes: "four binary messages, three XOR edges; the sink computes \
                x1+x2+x3+Maj(x1,x2,x3) from arguments {1,2,3}; x4 is \
                unconstrained and undemanded"
            .to_string(),
        tree_override: None,
        root_label: None,
        expected_counts: None,
    }
}

fn random_permutation(rng: &mut ChaCha8Rng, q: u32) -> Vec<Symbol> {
    let mut perm: Vec<Symbol> = (0..q).collect();
    perm.shuffle(rng);
    perm
}

/// Table over sorted support `{u, v}` that is, for every value of `u`,
/// a bijection in `v`. Pins `v` uniquely once `u` is known.
fn pinning_table(rng: &mut ChaCha8Rng, q: u32, u: VarIndex, v: VarIndex) -> (Vec<VarIndex>, Vec<Symbol>) {
    let perms: Vec<Vec<Symbol>> = (0..q).map(|_| random_permutation(rng, q)).collect();
    let support = if u < v { vec![u, v] } else { vec![v, u] };
    let mut entries = Vec::with_capacity((q * q) as usize);
    for a in 0..q {
        for b in 0..q {
            // row-major over sorted support; (a, b) = (first, second)
            let (u_val, v_val) = if u < v { (a, b) } else { (b, a) };
            entries.push(perms[u_val as usize][v_val as usize]);
        }
    }
    (support, entries)
}

/// Seeded random tree-shaped instance: the factor graph is a tree and the
/// code determines every message uniquely (one bijective unary map pins the
/// first variable, then each new variable joins through a map bijective in
/// it). Returns the instance and a random total message vector.
pub fn random_tree_instance(seed: u64) -> (NetworkCodeInstance, Assignment) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q: u32 = *[2, 2, 3, 3, 4].choose(&mut rng).unwrap();
    let omega: u32 = match q {
        2 => rng.random_range(3..=5),
        3 => rng.random_range(2..=4),
        _ => rng.random_range(2..=3),
    };
    let alphabet = Alphabet::symbol_set(q, None).unwrap();
    let mut order: Vec<VarIndex> = (1..=omega).collect();
    order.shuffle(&mut rng);

    let mut in_edges = Vec::new();
    let first = order[0];
    in_edges.push(EncodingMap {
        edge_id: format!("e{}", in_edges.len()),
        support: vec![first],
        body: MapBody::Table(random_permutation(&mut rng, q)),
    });
    let mut attached = vec![first];
    for &v in &order[1..] {
        let u = *attached.choose(&mut rng).unwrap();
        let (support, entries) = pinning_table(&mut rng, q, u, v);
        in_edges.push(EncodingMap {
            edge_id: format!("e{}", in_edges.len()),
            support,
            body: MapBody::Table(entries),
        });
        attached.push(v);
    }
    // a few redundant unary pins keep leaf factors in the mix
    for &v in &attached {
        if rng.random_bool(0.25) {
            in_edges.push(EncodingMap {
                edge_id: format!("e{}", in_edges.len()),
                support: vec![v],
                body: MapBody::Table(random_permutation(&mut rng, q)),
            });
        }
    }

    let mut demand: Vec<VarIndex> =
        (1..=omega).filter(|_| rng.random_bool(0.6)).collect();
    if demand.is_empty() {
        demand.push(rng.random_range(1..=omega));
    }
    let inst = NetworkCodeInstance::new(
        alphabet,
        omega,
        vec![SinkSpec { sink_id: "T".to_string(), in_edges, demand: Demand::Messages(demand) }],
    )
    .unwrap();
    let x_star =
        Assignment::from_total(&(0..omega).map(|_| rng.random_range(0..q)).collect::<Vec<_>>());
    (inst, x_star)
}

/// Seeded random instance whose factor graph contains at least one cycle.
/// No decodability guarantee; meant for stretching-exactness checks against
/// the enumeration oracle. Returns the instance and a random total vector.
pub fn random_cyclic_instance(seed: u64) -> (NetworkCodeInstance, Assignment) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9).wrapping_add(seed));
    loop {
        let q: u32 = *[2, 2, 3].choose(&mut rng).unwrap();
        let omega: u32 = if q == 2 { rng.random_range(3..=5) } else { rng.random_range(3..=4) };
        let edge_count = rng.random_range(omega..=omega + 2);
        let mut in_edges = Vec::new();
        for i in 0..edge_count {
            let size = rng.random_range(2..=2.max(omega.min(3)) as usize);
            let mut vars: Vec<VarIndex> = (1..=omega).collect();
            vars.shuffle(&mut rng);
            let mut support: Vec<VarIndex> = vars.into_iter().take(size).collect();
            support.sort_unstable();
            let len = (q as usize).pow(support.len() as u32);
            let entries: Vec<Symbol> = (0..len).map(|_| rng.random_range(0..q)).collect();
            in_edges.push(EncodingMap {
                edge_id: format!("e{i}"),
                support,
                body: MapBody::Table(entries),
            });
        }
        let inst = NetworkCodeInstance::new(
            Alphabet::symbol_set(q, None).unwrap(),
            omega,
            vec![SinkSpec {
                sink_id: "T".to_string(),
                in_edges,
                demand: Demand::Messages((1..=omega).collect()),
            }],
        )
        .unwrap();
        // cyclomatic check: edges − nodes + components > 0
        let vars_used: std::collections::BTreeSet<VarIndex> = inst.sinks[0]
            .in_edges
            .iter()
            .flat_map(|e| e.support.iter().copied())
            .collect();
        let node_count = vars_used.len() + inst.sinks[0].in_edges.len();
        let edge_total: usize = inst.sinks[0].in_edges.iter().map(|e| e.support.len()).sum();
        if edge_total > node_count {
            let x_star = Assignment::from_total(
                &(0..omega).map(|_| rng.random_range(0..q)).collect::<Vec<_>>(),
            );
            return (inst, x_star);
        }
    }
}

/// Seeded random valid function-computation instance: the target function is
/// a function of the received symbols by construction, so every consistent
/// pre-image shares one function value. Returns the instance and a random
/// total vector.
pub fn random_function_instance(seed: u64) -> (NetworkCodeInstance, Assignment) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x5bd1_e995));
    let q: u32 = *[2, 2, 3].choose(&mut rng).unwrap();
    let omega: u32 = rng.random_range(2..=4);
    let edge_count = rng.random_range(2..=3);
    let mut in_edges: Vec<EncodingMap> = Vec::new();
    for i in 0..edge_count {
        let size = rng.random_range(1..=omega.min(2) as usize);
        let mut vars: Vec<VarIndex> = (1..=omega).collect();
        vars.shuffle(&mut rng);
        let mut support: Vec<VarIndex> = vars.into_iter().take(size).collect();
        support.sort_unstable();
        let len = (q as usize).pow(support.len() as u32);
        let entries: Vec<Symbol> = (0..len).map(|_| rng.random_range(0..q)).collect();
        in_edges.push(EncodingMap { edge_id: format!("e{i}"), support, body: MapBody::Table(entries) });
    }
    let mut args: Vec<VarIndex> = in_edges
        .iter()
        .flat_map(|e| e.support.iter().copied())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    args.sort_unstable();

    // g = h(edge values), with h a random table: valid by construction
    let h_len = (q as usize).pow(edge_count);
    let h: Vec<Symbol> = (0..h_len).map(|_| rng.random_range(0..q)).collect();
    let alphabet = Alphabet::symbol_set(q, None).unwrap();
    let g_len = (q as usize).pow(args.len() as u32);
    let mut g_table = Vec::with_capacity(g_len);
    let mut tuple = vec![0; args.len()];
    for idx in 0..g_len {
        crate::table::decode_index(q, idx, &mut tuple);
        let mut a = Assignment::new();
        for (i, &v) in args.iter().enumerate() {
            a.set(v, tuple[i]);
        }
        let edge_values: Vec<Symbol> = in_edges
            .iter()
            .map(|e| crate::model::eval_map(&alphabet, e, &a).unwrap())
            .collect();
        g_table.push(h[encode_index(q, &edge_values)]);
    }

    let inst = NetworkCodeInstance::new(
        alphabet,
        omega,
        vec![SinkSpec {
            sink_id: "T".to_string(),
            in_edges,
            demand: Demand::Function { args, table: g_table },
        }],
    )
    .unwrap();
    let x_star = Assignment::from_total(
        &(0..omega).map(|_| rng.random_range(0..q)).collect::<Vec<_>>(),
    );
    (inst, x_star)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_instance;

    #[test]
    fn fixtures_parse() {
        for name in FIXTURE_NAMES {
            let f = fixture(name).unwrap();
            let inst = parse_instance(&f.instance_text).unwrap();
            assert!(!inst.sinks.is_empty(), "{name}");
        }
        assert!(fixture("nope").is_err());
    }

    #[test]
    fn random_tree_fixture_parses() {
        let f = fixture("random-tree-7").unwrap();
        let inst = parse_instance(&f.instance_text).unwrap();
        assert!(inst.omega >= 2);
        // deterministic: same seed, same text
        assert_eq!(fixture("random-tree-7").unwrap().instance_text, f.instance_text);
    }

    #[test]
    fn n3_fixture_carries_overrides() {
        let f = fixture("n3-sink43").unwrap();
        assert!(f.tree_override.is_some());
        assert_eq!(f.root_label.as_deref(), Some("36-43"));
        let counts = f.expected_counts.unwrap();
        assert_eq!(counts.traceback_total, 353);
        assert_eq!(counts.multiple_vertex_total, 661);
    }

    #[test]
    fn word_reversal_is_an_involution() {
        for s in 0..4 {
            assert_eq!(word_reverse(word_reverse(s)), s);
        }
        assert_eq!(word_reverse(1), 2);
    }

    #[test]
    fn random_tree_is_actually_a_tree_and_decodable() {
        for seed in 0..20 {
            let (inst, x_star) = random_tree_instance(seed);
            let rv = crate::model::evaluate_received(&inst, "T", &x_star).unwrap();
            let g = crate::graph::build_decoding_graph(&inst, "T", &rv).unwrap();
            assert!(g.is_forest(), "seed {seed}");
            let hits = crate::oracle::consistent_projections(
                &inst,
                "T",
                &rv,
                &(1..=inst.omega).collect::<Vec<_>>(),
            )
            .unwrap();
            assert_eq!(hits.len(), 1, "seed {seed}");
        }
    }

    #[test]
    fn random_cyclic_has_cycles() {
        for seed in 0..10 {
            let (inst, x_star) = random_cyclic_instance(seed);
            let rv = crate::model::evaluate_received(&inst, "T", &x_star).unwrap();
            let g = crate::graph::build_decoding_graph(&inst, "T", &rv).unwrap();
            assert!(!g.is_forest(), "seed {seed}");
        }
    }

    #[test]
    fn random_function_instance_is_valid() {
        for seed in 0..10 {
            let (inst, x_star) = random_function_instance(seed);
            let rv = crate::model::evaluate_received(&inst, "T", &x_star).unwrap();
            let values = crate::oracle::brute_force_compute(&inst, "T", &rv).unwrap();
            assert_eq!(values.len(), 1, "seed {seed}");
        }
    }
}
