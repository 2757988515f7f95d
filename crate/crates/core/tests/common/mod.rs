#![allow(dead_code)]

use rand::Rng;
use rwbandit::builtin;
use rwbandit::walk::{sample_trajectory, stream_rng, SimRng};
use rwbandit::{ChainInstance, EdgeLengths, LengthProcess, Trajectory};

pub fn rng(seed: u64) -> SimRng {
    stream_rng(seed, 0, 0)
}

/// Small chains with different shapes: the asymmetric two-node instance,
/// the nine-node ring and a dense random one.
pub fn test_chains() -> Vec<(&'static str, ChainInstance)> {
    vec![
        ("fig1", builtin::fig1(0.1)),
        ("exp9", builtin::exp9()),
        ("dense4", dense_chain(4, 0.8, 11)),
    ]
}

/// Every entry positive, row sums spread over `(0.3 rho, rho]`.
pub fn dense_chain(k: usize, rho: f64, seed: u64) -> ChainInstance {
    let mut r = rng(seed);
    let mut m = Vec::with_capacity(k * k);
    for _ in 0..k {
        let raw: Vec<f64> = (0..k).map(|_| r.gen_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let target = rho * r.gen_range(0.3..1.0);
        m.extend(raw.iter().map(|x| x * target / total));
    }
    ChainInstance::new(k, m, rho).unwrap()
}

/// Lengths drawn uniformly from `[0, 1]`.
pub fn random_lengths(k: usize, seed: u64) -> EdgeLengths {
    let mut r = rng(seed);
    EdgeLengths::new(k, (0..k * (k + 1)).map(|_| r.gen::<f64>()).collect()).unwrap()
}

/// `n` walks from `start`, lengths realized afresh per walk.
pub fn walks(
    chain: &ChainInstance,
    process: &LengthProcess,
    start: usize,
    n: usize,
    rng: &mut SimRng,
) -> Vec<Trajectory> {
    (0..n)
        .map(|_| {
            let l = process.realize(1, rng).unwrap();
            sample_trajectory(chain, &l, start, 1, rng).unwrap()
        })
        .collect()
}

pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let (m, s) = rwbandit::stats::mean_std(xs);
    (m, s / (xs.len() as f64).sqrt())
}
