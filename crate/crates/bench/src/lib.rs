// benchmarks only; see benches/decode.rs
