#![allow(dead_code)]

use bmatch_core::instance::{
    attach_random_coverage, attach_random_cut, attach_random_partition, generate_random, HyperEdge, Instance,
    MatroidSpec, ObjectiveSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Small linear instances: `k <= n <= 10`, `1 <= m <= 12`, capacities in
/// `[1, 3]`, integer weights in `[1, 20]`.
pub fn weighted_corpus(count: usize, base_seed: u64, k: usize) -> Vec<Instance> {
    (0..count as u64)
        .map(|i| {
            let seed = base_seed.wrapping_add(i);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(k.max(3)..=10);
            let m = rng.gen_range(1..=12);
            generate_random(seed, n, m, k, 3, 20).unwrap()
        })
        .collect()
}

/// Coverage objectives over `m <= 10` edges.
pub fn coverage_corpus(count: usize, base_seed: u64) -> Vec<Instance> {
    (0..count as u64)
        .map(|i| {
            let seed = base_seed.wrapping_add(i);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(3..=8);
            let m = rng.gen_range(1..=10);
            let mut inst = generate_random(seed, n, m, 2, 3, 20).unwrap();
            attach_random_coverage(&mut inst, seed, rng.gen_range(3..=12), 4, 10).unwrap();
            inst
        })
        .collect()
}

/// Cut objectives over `m <= 12` edges.
pub fn cut_corpus(count: usize, base_seed: u64) -> Vec<Instance> {
    (0..count as u64)
        .map(|i| {
            let seed = base_seed.wrapping_add(i);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(4..=8);
            let m = rng.gen_range(4..=12);
            let mut inst = generate_random(seed, n, m, 2, 3, 20).unwrap();
            attach_random_cut(&mut inst, seed, 0.4, 10).unwrap();
            inst
        })
        .collect()
}

/// Coverage objectives under a matroid of rank at least one. Even seeds get
/// a partition matroid, odd seeds a uniform one.
pub fn matroid_corpus(count: usize, base_seed: u64) -> Vec<Instance> {
    let mut out = Vec::with_capacity(count);
    let mut seed = base_seed;
    while out.len() < count {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(3..=8);
        let m = rng.gen_range(2..=10);
        let mut inst = generate_random(seed, n, m, 2, 3, 20).unwrap();
        attach_random_coverage(&mut inst, seed, rng.gen_range(3..=12), 4, 10).unwrap();
        if seed.is_multiple_of(2) {
            attach_random_partition(&mut inst, seed, rng.gen_range(1..=3), 2).unwrap();
        } else {
            inst.matroid = Some(MatroidSpec::Uniform { rank: rng.gen_range(1..=4) });
        }
        seed += 1;
        if inst.matroid().unwrap().is_some_and(|mt| mt.rank() >= 1) {
            out.push(inst);
        }
    }
    out
}

/// Star-shaped streams that drive one capacity-1 hub through a run of
/// geometrically heavier edges to fresh leaves, with a couple of light edges
/// between earlier leaves. Hub queues grow past the eviction depth for
/// `eps >= 0.2` while `m = 22` keeps exact enumeration cheap.
pub fn eviction_corpus(count: usize, base_seed: u64) -> Vec<Instance> {
    (0..count as u64)
        .map(|i| {
            let seed = base_seed.wrapping_add(i);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = 22;
            let ratio = rng.gen_range(1.3..1.6);
            let mut capacities = vec![1];
            capacities.extend((0..m).map(|_| rng.gen_range(1..=3)));
            let mut edges: Vec<HyperEdge> = Vec::new();
            let mut leaves = 0;
            let mut w = 1.0f64;
            while edges.len() < m {
                let (endpoints, weight) = if leaves >= 3 && rng.gen_bool(0.08) {
                    let a = rng.gen_range(1..=leaves);
                    let b = (a + rng.gen_range(0..leaves - 1)) % leaves + 1;
                    (vec![a, b], (w * rng.gen_range(0.2..0.9) * 100.0).round() / 100.0)
                } else {
                    w *= ratio;
                    leaves += 1;
                    (vec![0, leaves], (w * 100.0).round() / 100.0)
                };
                edges.push(HyperEdge { index: edges.len() + 1, endpoints, weight });
            }
            Instance { n: m + 1, k: 2, capacities, edges, objective: ObjectiveSpec::Linear, matroid: None }
        })
        .collect()
}

/// Long star streams with geometric weights; too large for enumeration but
/// exercising many eviction events.
pub fn long_eviction_stream(seed: u64, m: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let leaves = 8;
    let mut capacities = vec![1];
    capacities.extend((0..leaves).map(|_| rng.gen_range(1..=2)));
    let ratio = rng.gen_range(1.5..2.0);
    let mut w = 1.0f64;
    let edges = (0..m)
        .map(|t| {
            w *= ratio;
            HyperEdge { index: t + 1, endpoints: vec![0, rng.gen_range(1..=leaves)], weight: w }
        })
        .collect();
    Instance { n: leaves + 1, k: 2, capacities, edges, objective: ObjectiveSpec::Linear, matroid: None }
}
