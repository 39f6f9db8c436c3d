//! Ground truth by exhaustive enumeration.
//!
//! Everything here works straight off the encoding maps, never touching the
//! factor-graph or message-passing machinery, so it can serve as an
//! independent check of both.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::model::{
    eval_map_tuple, message_space, Demand, ModelError, NetworkCodeInstance, ReceivedVector,
};
use crate::table::{encode_index, Symbol, VarIndex};

/// Enumeration ceiling: instances with more than this many message vectors
/// are refused rather than ground through.
pub const SIZE_GUARD: usize = 10_000_000;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("q^omega exceeds the enumeration guard of {SIZE_GUARD}")]
    GuardExceeded,
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn guard(inst: &NetworkCodeInstance) -> Result<(), OracleError> {
    match message_space(inst.alphabet.q(), inst.omega) {
        Some(n) if n <= SIZE_GUARD => Ok(()),
        _ => Err(OracleError::GuardExceeded),
    }
}

/// All message vectors consistent with the received data, projected onto the
/// sink's demanded indices and deduplicated.
pub fn brute_force_decode(
    inst: &NetworkCodeInstance,
    sink_id: &str,
    received: &ReceivedVector,
) -> Result<BTreeSet<Vec<Symbol>>, OracleError> {
    let sink = inst.sink(sink_id)?;
    let demand = match &sink.demand {
        Demand::Messages(d) => d.clone(),
        Demand::Function { args, .. } => args.clone(),
    };
    Ok(consistent_projections(inst, sink_id, received, &demand)?)
}

/// Consistent message vectors projected onto an arbitrary index set.
pub fn consistent_projections(
    inst: &NetworkCodeInstance,
    sink_id: &str,
    received: &ReceivedVector,
    onto: &[VarIndex],
) -> Result<BTreeSet<Vec<Symbol>>, OracleError> {
    guard(inst)?;
    let sink = inst.sink(sink_id)?;
    received.validate(inst)?;
    let q = inst.alphabet.q();
    let n = message_space(q, inst.omega).expect("guarded above");
    // plain index loop with reusable buffers; the guard keeps n small
    let edges: Vec<(&crate::model::EncodingMap, Symbol)> = sink
        .in_edges
        .iter()
        .map(|e| (e, received.values[&e.edge_id]))
        .collect();
    let mut out = BTreeSet::new();
    let mut tuple = vec![0; inst.omega as usize];
    let mut restricted: Vec<Symbol> = Vec::new();
    for idx in 0..n {
        crate::table::decode_index(q, idx, &mut tuple);
        let consistent = edges.iter().all(|(edge, y)| {
            restricted.clear();
            restricted.extend(edge.support.iter().map(|&v| tuple[(v - 1) as usize]));
            eval_map_tuple(&inst.alphabet, edge, &restricted) == *y
        });
        if consistent {
            out.insert(onto.iter().map(|&v| tuple[(v - 1) as usize]).collect());
        }
    }
    Ok(out)
}

/// All target-function values reachable from message vectors consistent with
/// the received data. Singleton exactly when the code validly computes the
/// function for this received vector.
pub fn brute_force_compute(
    inst: &NetworkCodeInstance,
    sink_id: &str,
    received: &ReceivedVector,
) -> Result<BTreeSet<Symbol>, OracleError> {
    let sink = inst.sink(sink_id)?;
    let (args, table) = match &sink.demand {
        Demand::Function { args, table } => (args.clone(), table.clone()),
        Demand::Messages(_) => {
            return Err(ModelError::UnknownSink(format!(
                "sink {sink_id} demands messages, not a function"
            ))
            .into())
        }
    };
    let projections = consistent_projections(inst, sink_id, received, &args)?;
    Ok(projections
        .into_iter()
        .map(|tuple| table[encode_index(inst.alphabet.q(), &tuple)])
        .collect())
}

/// Brute-force marginal over `onto`: which configurations of those variables
/// extend to a message vector consistent with the received data.
pub fn brute_force_marginal(
    inst: &NetworkCodeInstance,
    sink_id: &str,
    received: &ReceivedVector,
    onto: &[VarIndex],
) -> Result<crate::table::BoolTable, OracleError> {
    let hits = consistent_projections(inst, sink_id, received, onto)?;
    Ok(crate::table::BoolTable::from_fn(inst.alphabet.q(), onto, |tuple| {
        hits.contains(&tuple.to_vec())
    }))
}
