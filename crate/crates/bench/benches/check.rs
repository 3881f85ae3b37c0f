use criterion::{black_box, criterion_group, criterion_main, Criterion};
use strictlin::checker::{check_strict, find_linearization, RecordedExecution};
use strictlin::explorer::{enumerate_executions, parse_program, ExploreOptions, Projection};
use strictlin::models::{MsQueue, ObjectModel};
use strictlin::repro::{fig3_execution, ms_workloads};

fn bench(c: &mut Criterion) {
    let fig3 = fig3_execution().unwrap();
    let hw_spec = strictlin::models::HwQueue::new(4).seq_spec();
    c.bench_function("find_linearization recorded hw execution", |b| {
        b.iter(|| find_linearization(black_box(&fig3), &hw_spec).unwrap())
    });

    let ms = MsQueue::new(4);
    let init = ms.initial_state();
    let opts = ExploreOptions {
        projection: Projection::History,
        ..ExploreOptions::default()
    };
    let execs: Vec<RecordedExecution<_>> = ms_workloads()
        .iter()
        .take(8)
        .flat_map(|text| {
            let p = parse_program(text).unwrap();
            enumerate_executions(&p, &ms, &p.initial_client(), &init, &opts).unwrap()
        })
        .map(|r| RecordedExecution::from_result(&init, &r).unwrap())
        .collect();
    let spec = ms.seq_spec();
    c.bench_function("check_strict ms-queue workloads", |b| {
        b.iter(|| check_strict(black_box(&execs), &spec).unwrap())
    });
}

criterion_group!(benches, bench);
criterion_main!(benches);
