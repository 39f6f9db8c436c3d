//! Sum-product decoding of network codes over the Boolean semiring.
//!
//! A sink that knows the global encoding maps of its incoming edges can
//! recover its demanded source messages by treating each received symbol as
//! an indicator constraint and marginalizing the product of those indicators
//! with OR as addition and AND as multiplication. This crate builds the
//! per-sink factor graph, removes cycles by variable stretching, runs the
//! message-passing schedules (single-vertex with traceback, multiple-vertex,
//! all-vertex), computes in-network target functions via a dummy factor
//! node, counts every semiring operation exactly, predicts those counts in
//! closed form, and cross-checks all of it against a brute-force
//! enumeration oracle.
//!
//! Entry points:
//!
//! * [`model::parse_instance`] / [`model::parse_received`] — the file formats;
//! * [`decode::decode`] and [`decode::compute_function`] — sink decoding;
//! * [`analyze::predict`] — closed-form operation counts;
//! * [`oracle`] — exhaustive ground truth;
//! * [`corpus::fixture`] — built-in examples.

pub mod analyze;
pub mod corpus;
pub mod decode;
pub mod engine;
pub mod graph;
pub mod model;
pub mod oracle;
pub mod table;

pub use analyze::{fast_decodability, predict, render_report, AnalyzeError, CountReport};
pub use corpus::{fixture, CorpusFixture, ExpectedCounts, FIXTURE_NAMES};
pub use decode::{
    choose_root, compute_function, compute_function_with, decode, decode_with, function_support,
    traceback_step, DecodeError, DecodeMode, DecodeOptions, DecodeResult,
};
pub use engine::{
    factor_to_var, leaf_message, run_all_vertex, run_all_vertex_rooted, run_single_vertex,
    var_to_factor, CountEvent, CountEventKind, EngineError, Marginal, Message, MessageStore,
};
pub use graph::{
    acyclify, build_decoding_graph, build_function_graph, BuildError, FGNode, FactorGraph,
    NodeId, NodeKind, StretchRecord, TreeOverride,
};
pub use model::{
    eval_map, evaluate_received, parse_instance, parse_received, serialize_instance,
    serialize_received, Alphabet, AlphabetKind, Assignment, Demand, EncodingMap, MapBody,
    ModelError, NetworkCodeInstance, ReceivedVector, SinkSpec,
};
pub use oracle::{
    brute_force_compute, brute_force_decode, brute_force_marginal, OracleError, SIZE_GUARD,
};
pub use table::{BoolTable, OpCount, Symbol, VarIndex};
