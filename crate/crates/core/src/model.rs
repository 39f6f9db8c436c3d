//! Problem statement types: alphabets, global encoding maps, sink demands,
//! and received edge data, plus the text format they are exchanged in.
//!
//! The alphabet is either a prime field (with addition/multiplication mod p)
//! or an opaque symbol set; linear encoding maps require the former, while
//! nonlinear and vector codes are expressed as explicit tables. All types are
//! immutable after construction and safe to share across decode sessions.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::table::{encode_index, Symbol, VarIndex};

/// Largest table (encoding map or configuration space) the library will
/// materialize. Guards against runaway `q^|S|` allocations on bad input.
pub const MAX_TABLE_LEN: usize = 1 << 24;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("syntax error at line {line}, column {column}: {msg}")]
    Syntax { line: usize, column: usize, msg: String },
    #[error("alphabet size q must be at least 2 (got {0})")]
    AlphabetTooSmall(u32),
    #[error("prime_field alphabet requires prime q, got {0}")]
    NotPrime(u32),
    #[error("symbol_names must list exactly q={q} distinct names")]
    BadSymbolNames { q: u32 },
    #[error("omega must be at least 1")]
    BadOmega,
    #[error("instance must declare at least one sink")]
    NoSinks,
    #[error("duplicate sink id {0:?}")]
    DuplicateSink(String),
    #[error("sink {sink:?}: duplicate edge id {edge:?}")]
    DuplicateEdge { sink: String, edge: String },
    #[error("sink {0:?} has no in-edges")]
    NoEdges(String),
    #[error("edge {edge:?}: support must be distinct, ascending, within 1..={omega}")]
    BadSupport { edge: String, omega: u32 },
    #[error("edge {edge:?}: linear map requires a prime_field alphabet")]
    LinearOverSymbolSet { edge: String },
    #[error("edge {edge:?}: linear map needs {expected} coefficients, got {got}")]
    BadCoeffCount { edge: String, expected: usize, got: usize },
    #[error("edge {edge:?}: zero coefficient in support (drop the variable instead)")]
    ZeroCoefficient { edge: String },
    #[error("edge {edge:?}: table needs {expected} entries, got {got}")]
    BadTableSize { edge: String, expected: usize, got: usize },
    #[error("table for {edge:?} would exceed the size guard ({len} entries)")]
    TableTooLarge { edge: String, len: usize },
    #[error("sink {sink:?}: demand index {index} out of range 1..={omega}")]
    DemandOutOfRange { sink: String, index: u32, omega: u32 },
    #[error("sink {sink:?}: demand must be nonempty, distinct, ascending")]
    BadDemand { sink: String },
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),
    #[error("unknown sink {0:?}")]
    UnknownSink(String),
    #[error("received data for sink {sink:?} must cover exactly its in-edges; problem near {edge:?}")]
    ReceivedMismatch { sink: String, edge: String },
    #[error("assignment is missing variable x{0}")]
    MissingVariable(VarIndex),
}

/// Alphabet kind: prime field with arithmetic, or an opaque symbol set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlphabetKind {
    PrimeField,
    SymbolSet,
}

/// Finite symbol set of size `q`, optionally a prime field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    kind: AlphabetKind,
    q: u32,
    symbol_names: Option<Vec<String>>,
}

impl Alphabet {
    pub fn prime_field(p: u32) -> Result<Self, ModelError> {
        if p < 2 {
            return Err(ModelError::AlphabetTooSmall(p));
        }
        if !is_prime(p) {
            return Err(ModelError::NotPrime(p));
        }
        Ok(Alphabet { kind: AlphabetKind::PrimeField, q: p, symbol_names: None })
    }

    pub fn symbol_set(q: u32, symbol_names: Option<Vec<String>>) -> Result<Self, ModelError> {
        if q < 2 {
            return Err(ModelError::AlphabetTooSmall(q));
        }
        if let Some(names) = &symbol_names {
            let mut distinct = names.clone();
            distinct.sort();
            distinct.dedup();
            if names.len() != q as usize || distinct.len() != q as usize {
                return Err(ModelError::BadSymbolNames { q });
            }
        }
        Ok(Alphabet { kind: AlphabetKind::SymbolSet, q, symbol_names })
    }

    pub fn kind(&self) -> &AlphabetKind {
        &self.kind
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn is_field(&self) -> bool {
        self.kind == AlphabetKind::PrimeField
    }

    /// Canonical display name of a symbol (defaults `"0".."q-1"`).
    pub fn name(&self, s: Symbol) -> String {
        match &self.symbol_names {
            Some(names) => names[s as usize].clone(),
            None => s.to_string(),
        }
    }

    pub fn parse_symbol(&self, text: &str) -> Result<Symbol, ModelError> {
        match &self.symbol_names {
            Some(names) => names
                .iter()
                .position(|n| n == text)
                .map(|i| i as Symbol)
                .ok_or_else(|| ModelError::UnknownSymbol(text.to_string())),
            None => match text.parse::<u32>() {
                Ok(v) if v < self.q => Ok(v),
                _ => Err(ModelError::UnknownSymbol(text.to_string())),
            },
        }
    }

    pub fn add(&self, a: Symbol, b: Symbol) -> Symbol {
        debug_assert!(self.is_field());
        (a + b) % self.q
    }

    pub fn mul(&self, a: Symbol, b: Symbol) -> Symbol {
        debug_assert!(self.is_field());
        ((a as u64 * b as u64) % self.q as u64) as Symbol
    }

    fn symbol_names_vec(&self) -> Option<Vec<String>> {
        self.symbol_names.clone()
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Body of a global encoding map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapBody {
    /// Nonzero field coefficients, one per support variable.
    Linear(Vec<Symbol>),
    /// Total map from the support's configuration space, row-major.
    Table(Vec<Symbol>),
}

/// Global encoding map of one edge: `y_e = f(x_S)` for the support `S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodingMap {
    pub edge_id: String,
    /// Distinct ascending variable indices the map depends on.
    pub support: Vec<VarIndex>,
    pub body: MapBody,
}

/// What a sink wants: a set of messages, or a function of them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Demand {
    /// Distinct ascending message indices.
    Messages(Vec<VarIndex>),
    /// Target function over `args`, stored as a row-major table.
    Function { args: Vec<VarIndex>, table: Vec<Symbol> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SinkSpec {
    pub sink_id: String,
    pub in_edges: Vec<EncodingMap>,
    pub demand: Demand,
}

/// A full decoding problem: alphabet, message count, and per-sink code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkCodeInstance {
    pub alphabet: Alphabet,
    pub omega: u32,
    pub sinks: Vec<SinkSpec>,
}

impl NetworkCodeInstance {
    pub fn new(alphabet: Alphabet, omega: u32, sinks: Vec<SinkSpec>) -> Result<Self, ModelError> {
        let inst = NetworkCodeInstance { alphabet, omega, sinks };
        inst.validate()?;
        Ok(inst)
    }

    pub fn sink(&self, sink_id: &str) -> Result<&SinkSpec, ModelError> {
        self.sinks
            .iter()
            .find(|s| s.sink_id == sink_id)
            .ok_or_else(|| ModelError::UnknownSink(sink_id.to_string()))
    }

    fn validate(&self) -> Result<(), ModelError> {
        let q = self.alphabet.q();
        if self.omega < 1 {
            return Err(ModelError::BadOmega);
        }
        if self.sinks.is_empty() {
            return Err(ModelError::NoSinks);
        }
        let mut sink_ids: Vec<&str> = Vec::new();
        for sink in &self.sinks {
            if sink_ids.contains(&sink.sink_id.as_str()) {
                return Err(ModelError::DuplicateSink(sink.sink_id.clone()));
            }
            sink_ids.push(&sink.sink_id);
            if sink.in_edges.is_empty() {
                return Err(ModelError::NoEdges(sink.sink_id.clone()));
            }
            let mut edge_ids: Vec<&str> = Vec::new();
            for edge in &sink.in_edges {
                if edge_ids.contains(&edge.edge_id.as_str()) {
                    return Err(ModelError::DuplicateEdge {
                        sink: sink.sink_id.clone(),
                        edge: edge.edge_id.clone(),
                    });
                }
                edge_ids.push(&edge.edge_id);
                validate_support(&edge.support, self.omega).map_err(|_| ModelError::BadSupport {
                    edge: edge.edge_id.clone(),
                    omega: self.omega,
                })?;
                match &edge.body {
                    MapBody::Linear(coeffs) => {
                        if !self.alphabet.is_field() {
                            return Err(ModelError::LinearOverSymbolSet {
                                edge: edge.edge_id.clone(),
                            });
                        }
                        if coeffs.len() != edge.support.len() {
                            return Err(ModelError::BadCoeffCount {
                                edge: edge.edge_id.clone(),
                                expected: edge.support.len(),
                                got: coeffs.len(),
                            });
                        }
                        if coeffs.iter().any(|&c| c == 0 || c >= q) {
                            return Err(ModelError::ZeroCoefficient {
                                edge: edge.edge_id.clone(),
                            });
                        }
                    }
                    MapBody::Table(entries) => {
                        let expected = checked_config_count(q, edge.support.len())
                            .ok_or(ModelError::TableTooLarge {
                                edge: edge.edge_id.clone(),
                                len: usize::MAX,
                            })?;
                        if entries.len() != expected {
                            return Err(ModelError::BadTableSize {
                                edge: edge.edge_id.clone(),
                                expected,
                                got: entries.len(),
                            });
                        }
                        if entries.iter().any(|&e| e >= q) {
                            return Err(ModelError::UnknownSymbol(format!(
                                "out-of-range entry in table for {}",
                                edge.edge_id
                            )));
                        }
                    }
                }
            }
            match &sink.demand {
                Demand::Messages(d) => {
                    if d.is_empty() || validate_support(d, self.omega).is_err() {
                        if let Some(&index) = d.iter().find(|&&i| i < 1 || i > self.omega) {
                            return Err(ModelError::DemandOutOfRange {
                                sink: sink.sink_id.clone(),
                                index,
                                omega: self.omega,
                            });
                        }
                        return Err(ModelError::BadDemand { sink: sink.sink_id.clone() });
                    }
                }
                Demand::Function { args, table } => {
                    if validate_support(args, self.omega).is_err() {
                        if let Some(&index) = args.iter().find(|&&i| i < 1 || i > self.omega) {
                            return Err(ModelError::DemandOutOfRange {
                                sink: sink.sink_id.clone(),
                                index,
                                omega: self.omega,
                            });
                        }
                        return Err(ModelError::BadDemand { sink: sink.sink_id.clone() });
                    }
                    let expected = checked_config_count(q, args.len())
                        .ok_or(ModelError::TableTooLarge {
                            edge: sink.sink_id.clone(),
                            len: usize::MAX,
                        })?;
                    if table.len() != expected || table.iter().any(|&e| e >= q) {
                        return Err(ModelError::BadTableSize {
                            edge: format!("function at sink {}", sink.sink_id),
                            expected,
                            got: table.len(),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

fn validate_support(support: &[VarIndex], omega: u32) -> Result<(), ()> {
    if support.windows(2).any(|w| w[0] >= w[1]) {
        return Err(());
    }
    if support.iter().any(|&v| v < 1 || v > omega) {
        return Err(());
    }
    Ok(())
}

fn checked_config_count(q: u32, n: usize) -> Option<usize> {
    let mut len = 1usize;
    for _ in 0..n {
        len = len.checked_mul(q as usize)?;
        if len > MAX_TABLE_LEN {
            return None;
        }
    }
    Some(len)
}

/// Partial or total assignment of symbols to message variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment(pub BTreeMap<VarIndex, Symbol>);

impl Assignment {
    pub fn new() -> Self {
        Assignment(BTreeMap::new())
    }

    pub fn from_total(values: &[Symbol]) -> Self {
        Assignment(values.iter().enumerate().map(|(i, &s)| (i as VarIndex + 1, s)).collect())
    }

    pub fn get(&self, var: VarIndex) -> Option<Symbol> {
        self.0.get(&var).copied()
    }

    pub fn set(&mut self, var: VarIndex, sym: Symbol) {
        self.0.insert(var, sym);
    }

    pub fn contains(&self, var: VarIndex) -> bool {
        self.0.contains_key(&var)
    }

    pub fn restrict(&self, vars: &[VarIndex]) -> Assignment {
        Assignment(
            self.0
                .iter()
                .filter(|(v, _)| vars.contains(v))
                .map(|(&v, &s)| (v, s))
                .collect(),
        )
    }

    pub fn display(&self, alphabet: &Alphabet) -> String {
        self.0
            .iter()
            .map(|(v, &s)| format!("x{}={}", v, alphabet.name(s)))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.0.iter().map(|(v, s)| format!("x{}={}", v, s)).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Symbols observed on a sink's in-edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReceivedVector {
    pub sink_id: String,
    pub values: BTreeMap<String, Symbol>,
}

impl ReceivedVector {
    /// Check the vector covers exactly the sink's in-edges.
    pub fn validate(&self, inst: &NetworkCodeInstance) -> Result<(), ModelError> {
        let sink = inst.sink(&self.sink_id)?;
        for edge in &sink.in_edges {
            match self.values.get(&edge.edge_id) {
                Some(&v) if v < inst.alphabet.q() => {}
                _ => {
                    return Err(ModelError::ReceivedMismatch {
                        sink: self.sink_id.clone(),
                        edge: edge.edge_id.clone(),
                    })
                }
            }
        }
        if self.values.len() != sink.in_edges.len() {
            let extra = self
                .values
                .keys()
                .find(|k| sink.in_edges.iter().all(|e| &e.edge_id != *k))
                .cloned()
                .unwrap_or_default();
            return Err(ModelError::ReceivedMismatch { sink: self.sink_id.clone(), edge: extra });
        }
        Ok(())
    }
}

/// Evaluate an encoding map on an assignment covering its support.
/// Assigned variables outside the support are ignored.
pub fn eval_map(
    alphabet: &Alphabet,
    map: &EncodingMap,
    a: &Assignment,
) -> Result<Symbol, ModelError> {
    let mut tuple = Vec::with_capacity(map.support.len());
    for &v in &map.support {
        tuple.push(a.get(v).ok_or(ModelError::MissingVariable(v))?);
    }
    Ok(eval_map_tuple(alphabet, map, &tuple))
}

/// Evaluate an encoding map on the support-ordered tuple directly.
pub fn eval_map_tuple(alphabet: &Alphabet, map: &EncodingMap, tuple: &[Symbol]) -> Symbol {
    debug_assert_eq!(tuple.len(), map.support.len());
    match &map.body {
        MapBody::Linear(coeffs) => {
            let mut acc = 0;
            for (&c, &x) in coeffs.iter().zip(tuple) {
                acc = alphabet.add(acc, alphabet.mul(c, x));
            }
            acc
        }
        MapBody::Table(entries) => entries[encode_index(alphabet.q(), tuple)],
    }
}

/// Apply every in-edge map of a sink to a total message vector.
pub fn evaluate_received(
    inst: &NetworkCodeInstance,
    sink_id: &str,
    x_star: &Assignment,
) -> Result<ReceivedVector, ModelError> {
    let sink = inst.sink(sink_id)?;
    let mut values = BTreeMap::new();
    for edge in &sink.in_edges {
        values.insert(edge.edge_id.clone(), eval_map(&inst.alphabet, edge, x_star)?);
    }
    Ok(ReceivedVector { sink_id: sink_id.to_string(), values })
}

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct InstanceDoc {
    alphabet: AlphabetDoc,
    omega: u32,
    sinks: Vec<SinkDoc>,
}

#[derive(Serialize, Deserialize)]
struct AlphabetDoc {
    kind: String,
    q: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    symbol_names: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct SinkDoc {
    id: String,
    in_edges: Vec<EdgeDoc>,
    demand: DemandDoc,
}

#[derive(Serialize, Deserialize)]
struct EdgeDoc {
    id: String,
    support: Vec<u32>,
    map: MapDoc,
}

#[derive(Serialize, Deserialize)]
enum MapDoc {
    #[serde(rename = "linear")]
    Linear(Vec<String>),
    #[serde(rename = "table")]
    Table(Vec<String>),
}

#[derive(Serialize, Deserialize)]
enum DemandDoc {
    #[serde(rename = "messages")]
    Messages(Vec<u32>),
    #[serde(rename = "function")]
    Function { args: Vec<u32>, table: Vec<String> },
}

#[derive(Serialize, Deserialize)]
struct ReceivedDoc {
    sink: String,
    values: BTreeMap<String, String>,
}

fn syntax_error(err: serde_json::Error) -> ModelError {
    ModelError::Syntax { line: err.line(), column: err.column(), msg: err.to_string() }
}

/// Parse and validate an instance document.
pub fn parse_instance(text: &str) -> Result<NetworkCodeInstance, ModelError> {
    let doc: InstanceDoc = serde_json::from_str(text).map_err(syntax_error)?;
    let alphabet = match doc.alphabet.kind.as_str() {
        "prime_field" => {
            if doc.alphabet.symbol_names.is_some() {
                // names are allowed for display on fields too
                let a = Alphabet::prime_field(doc.alphabet.q)?;
                Alphabet {
                    kind: a.kind,
                    q: a.q,
                    symbol_names: {
                        Alphabet::symbol_set(doc.alphabet.q, doc.alphabet.symbol_names)?
                            .symbol_names
                    },
                }
            } else {
                Alphabet::prime_field(doc.alphabet.q)?
            }
        }
        "symbol_set" => Alphabet::symbol_set(doc.alphabet.q, doc.alphabet.symbol_names)?,
        other => {
            return Err(ModelError::Syntax {
                line: 0,
                column: 0,
                msg: format!("unknown alphabet kind {other:?}"),
            })
        }
    };
    let mut sinks = Vec::new();
    for sink in doc.sinks {
        let mut in_edges = Vec::new();
        for edge in sink.in_edges {
            let body = match edge.map {
                MapDoc::Linear(coeffs) => MapBody::Linear(
                    coeffs
                        .iter()
                        .map(|c| alphabet.parse_symbol(c))
                        .collect::<Result<_, _>>()?,
                ),
                MapDoc::Table(entries) => MapBody::Table(
                    entries
                        .iter()
                        .map(|e| alphabet.parse_symbol(e))
                        .collect::<Result<_, _>>()?,
                ),
            };
            in_edges.push(EncodingMap { edge_id: edge.id, support: edge.support, body });
        }
        let demand = match sink.demand {
            DemandDoc::Messages(d) => Demand::Messages(d),
            DemandDoc::Function { args, table } => Demand::Function {
                args,
                table: table
                    .iter()
                    .map(|e| alphabet.parse_symbol(e))
                    .collect::<Result<_, _>>()?,
            },
        };
        sinks.push(SinkSpec { sink_id: sink.id, in_edges, demand });
    }
    NetworkCodeInstance::new(alphabet, doc.omega, sinks)
}

/// Serialize an instance back to its document form. `parse_instance` of the
/// result reproduces the instance exactly.
pub fn serialize_instance(inst: &NetworkCodeInstance) -> String {
    let alphabet = AlphabetDoc {
        kind: match inst.alphabet.kind() {
            AlphabetKind::PrimeField => "prime_field".to_string(),
            AlphabetKind::SymbolSet => "symbol_set".to_string(),
        },
        q: inst.alphabet.q(),
        symbol_names: inst.alphabet.symbol_names_vec(),
    };
    let sinks = inst
        .sinks
        .iter()
        .map(|sink| SinkDoc {
            id: sink.sink_id.clone(),
            in_edges: sink
                .in_edges
                .iter()
                .map(|edge| EdgeDoc {
                    id: edge.edge_id.clone(),
                    support: edge.support.clone(),
                    map: match &edge.body {
                        MapBody::Linear(coeffs) => MapDoc::Linear(
                            coeffs.iter().map(|&c| inst.alphabet.name(c)).collect(),
                        ),
                        MapBody::Table(entries) => MapDoc::Table(
                            entries.iter().map(|&e| inst.alphabet.name(e)).collect(),
                        ),
                    },
                })
                .collect(),
            demand: match &sink.demand {
                Demand::Messages(d) => DemandDoc::Messages(d.clone()),
                Demand::Function { args, table } => DemandDoc::Function {
                    args: args.clone(),
                    table: table.iter().map(|&e| inst.alphabet.name(e)).collect(),
                },
            },
        })
        .collect();
    let doc = InstanceDoc { alphabet, omega: inst.omega, sinks };
    serde_json::to_string_pretty(&doc).expect("instance serialization cannot fail")
}

/// Parse a received-data document.
pub fn parse_received(
    inst: &NetworkCodeInstance,
    text: &str,
) -> Result<ReceivedVector, ModelError> {
    let doc: ReceivedDoc = serde_json::from_str(text).map_err(syntax_error)?;
    let mut values = BTreeMap::new();
    for (edge, sym) in doc.values {
        values.insert(edge, inst.alphabet.parse_symbol(&sym)?);
    }
    let rv = ReceivedVector { sink_id: doc.sink, values };
    rv.validate(inst)?;
    Ok(rv)
}

pub fn serialize_received(inst: &NetworkCodeInstance, rv: &ReceivedVector) -> String {
    let doc = ReceivedDoc {
        sink: rv.sink_id.clone(),
        values: rv
            .values
            .iter()
            .map(|(e, &s)| (e.clone(), inst.alphabet.name(s)))
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("received serialization cannot fail")
}

/// Total number of message vectors, guarded against overflow.
pub fn message_space(q: u32, omega: u32) -> Option<usize> {
    let mut len = 1usize;
    for _ in 0..omega {
        len = len.checked_mul(q as usize)?;
    }
    Some(len)
}

/// Iterate every total assignment over `[omega]` in row-major order.
pub fn total_assignments(q: u32, omega: u32) -> impl Iterator<Item = Assignment> {
    let n = message_space(q, omega).expect("message space too large to enumerate");
    (0..n).map(move |idx| {
        let mut tuple = vec![0; omega as usize];
        crate::table::decode_index(q, idx, &mut tuple);
        Assignment::from_total(&tuple)
    })
}

/// Row-major lookup helper shared by tests and the oracle: index of the
/// support-restricted tuple of `a`.
pub fn support_index(q: u32, support: &[VarIndex], a: &Assignment) -> Option<usize> {
    let mut tuple = Vec::with_capacity(support.len());
    for &v in support {
        tuple.push(a.get(v)?);
    }
    Some(encode_index(q, &tuple))
}
