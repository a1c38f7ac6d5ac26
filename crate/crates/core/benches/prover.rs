use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use elenchus_core::base::AtomicImplication;
use elenchus_core::fixtures::provo_base;
use elenchus_core::formula::{AtomId, Formula, Sequent};
use elenchus_core::par::Execution;
use elenchus_core::prover::{derivable_batch_with, ProverConfig};
use elenchus_core::MaterialBase;

fn random_formula(rng: &mut ChaCha8Rng, atoms: &[AtomId], depth: u32) -> Formula {
    if depth == 0 || rng.random_bool(0.3) {
        return Formula::Atom(atoms[rng.random_range(0..atoms.len())].clone());
    }
    let a = random_formula(rng, atoms, depth - 1);
    match rng.random_range(0..4) {
        0 => Formula::neg(a),
        1 => Formula::and(a, random_formula(rng, atoms, depth - 1)),
        2 => Formula::or(a, random_formula(rng, atoms, depth - 1)),
        _ => Formula::imp(a, random_formula(rng, atoms, depth - 1)),
    }
}

fn workload(base: &MaterialBase, n: usize, depth: u32) -> Vec<Sequent> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let atoms: Vec<AtomId> = base.atoms().iter().cloned().collect();
    (0..n)
        .map(|_| {
            let lhs: Vec<Formula> = (0..rng.random_range(0..3))
                .map(|_| random_formula(&mut rng, &atoms, depth))
                .collect();
            let rhs: Vec<Formula> = (0..rng.random_range(1..3))
                .map(|_| random_formula(&mut rng, &atoms, depth))
                .collect();
            Sequent::new(lhs, rhs)
        })
        .collect()
}

fn synthetic_base(atoms: usize, implications: usize) -> MaterialBase {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let names: Vec<AtomId> = (0..atoms)
        .map(|i| AtomId::new(format!("a{i}")).unwrap())
        .collect();
    let mut base = MaterialBase::new();
    for a in &names {
        base.declare(a.clone());
    }
    for _ in 0..implications {
        let pick = |rng: &mut ChaCha8Rng| -> Vec<AtomId> {
            (0..rng.random_range(1..3))
                .map(|_| names[rng.random_range(0..names.len())].clone())
                .collect()
        };
        let imp = AtomicImplication::new(pick(&mut rng), pick(&mut rng));
        base.insert(imp, None).unwrap();
    }
    base
}

fn batch(c: &mut Criterion) {
    let cases = [
        ("provo", provo_base(), 2000, 3),
        ("synthetic", synthetic_base(12, 40), 500, 4),
    ];
    for (name, base, n, depth) in cases {
        let queries = workload(&base, n, depth);
        let mut group = c.benchmark_group(format!("batch/{name}"));
        group.sample_size(10);
        for exec in [Execution::Sequential, Execution::Parallel] {
            group.bench_with_input(
                BenchmarkId::from_parameter(format!("{exec:?}")),
                &queries,
                |b, q| b.iter(|| derivable_batch_with(&base, q, ProverConfig::default(), exec)),
            );
        }
        group.finish();
    }
}

criterion_group!(benches, batch);
criterion_main!(benches);
