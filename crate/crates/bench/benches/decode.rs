use criterion::{criterion_group, criterion_main, Criterion};

use netsp::{
    acyclify, brute_force_decode, build_decoding_graph, compute_function, corpus, decode_with,
    evaluate_received, parse_instance, run_all_vertex, Assignment, DecodeMode, DecodeOptions,
};

fn n3_setup() -> (netsp::NetworkCodeInstance, netsp::ReceivedVector, DecodeOptions) {
    let fixture = corpus::fixture("n3-sink43").unwrap();
    let inst = parse_instance(&fixture.instance_text).unwrap();
    let x = Assignment::from_total(&[2, 1, 3, 0, 2]);
    let rv = evaluate_received(&inst, "43", &x).unwrap();
    let options = DecodeOptions {
        tree_override: fixture.tree_override,
        root_label: fixture.root_label,
    };
    (inst, rv, options)
}

fn bench_decode_modes(c: &mut Criterion) {
    let (inst, rv, options) = n3_setup();
    let mut group = c.benchmark_group("decode-n3-sink43");
    for (name, mode) in [
        ("traceback", DecodeMode::SingleVertexTraceback),
        ("multiple-vertex", DecodeMode::MultipleVertex),
        ("all-vertex", DecodeMode::AllVertex),
    ] {
        group.bench_function(name, |b| {
            b.iter(|| decode_with(&inst, "43", &rv, mode, &options).unwrap())
        });
    }
    group.finish();
}

fn bench_oracle(c: &mut Criterion) {
    let (inst, rv, _) = n3_setup();
    c.bench_function("oracle-n3-sink43", |b| {
        b.iter(|| brute_force_decode(&inst, "43", &rv).unwrap())
    });
}

fn bench_all_vertex_engine(c: &mut Criterion) {
    let (inst, rv, options) = n3_setup();
    let g = build_decoding_graph(&inst, "43", &rv).unwrap();
    let g = acyclify(&g, options.tree_override.as_ref()).unwrap();
    c.bench_function("all-vertex-engine-n3", |b| b.iter(|| run_all_vertex(&g).unwrap()));
}

fn bench_function_computation(c: &mut Criterion) {
    let fixture = corpus::fixture("example3-majority").unwrap();
    let inst = parse_instance(&fixture.instance_text).unwrap();
    let rv = evaluate_received(&inst, "T", &Assignment::from_total(&[1, 1, 1, 0])).unwrap();
    c.bench_function("compute-example3", |b| {
        b.iter(|| compute_function(&inst, "T", &rv).unwrap())
    });
}

criterion_group!(
    benches,
    bench_decode_modes,
    bench_oracle,
    bench_all_vertex_engine,
    bench_function_computation
);
criterion_main!(benches);
