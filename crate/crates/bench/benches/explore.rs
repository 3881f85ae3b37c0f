use criterion::{black_box, criterion_group, criterion_main, Criterion};
use strictlin::explorer::{explore, parse_program, DEFAULT_BOUND};
use strictlin::models::{HwQueue, MsQueue, ObjectModel};
use strictlin::repro::{FIG2_PROGRAM, SEC52_PROGRAM};

fn bench(c: &mut Criterion) {
    let hw = HwQueue::new(4);
    let ms = MsQueue::new(4);
    for (name, text) in [("three-call", FIG2_PROGRAM), ("three-phase", SEC52_PROGRAM)] {
        let p = parse_program(text).unwrap();
        c.bench_function(&format!("explore hw-queue {name}"), |b| {
            b.iter(|| explore(black_box(&p), &hw, &p.initial_client(), &hw.initial_state(), DEFAULT_BOUND).unwrap())
        });
    }
    let p = parse_program(FIG2_PROGRAM).unwrap();
    c.bench_function("explore ms-queue three-call", |b| {
        b.iter(|| explore(black_box(&p), &ms, &p.initial_client(), &ms.initial_state(), DEFAULT_BOUND).unwrap())
    });
}

criterion_group!(benches, bench);
criterion_main!(benches);
