//! Named instances used by the experiments and the CLI.

use crate::markov::ChainInstance;

/// The symmetric two-node chain `[[1/2, 1/8], [1/8, 1/2 + eps]]`.
///
/// Node 1 (zero-based) carries the `eps` bump and is the optimal arm.
pub fn fig1(eps: f64) -> ChainInstance {
    two_node(0.5, 0.5 + eps, eps)
}

/// The mirror image of [`fig1`]: the bump sits on node 0.
pub fn fig1_prime(eps: f64) -> ChainInstance {
    two_node(0.5 + eps, 0.5, eps)
}

fn two_node(a: f64, b: f64, eps: f64) -> ChainInstance {
    ChainInstance::new(2, vec![a, 0.125, 0.125, b], 0.625 + eps.max(0.0))
        .expect("two-node instance is valid for eps in [0, 1/4)")
}

/// Nine nodes on a ring: self-loop 0.3, each neighbour 0.1.
pub fn exp9() -> ChainInstance {
    ring(9, 0.3, 0.1)
}

/// `k` nodes on a ring with a self-loop and symmetric neighbour transitions.
pub fn ring(k: usize, stay: f64, neighbour: f64) -> ChainInstance {
    let mut m = vec![0.0; k * k];
    for i in 0..k {
        m[i * k + i] += stay;
        if k > 1 {
            m[i * k + (i + 1) % k] += neighbour;
            m[i * k + (i + k - 1) % k] += neighbour;
        }
    }
    let norm = (0..k)
        .map(|i| m[i * k..(i + 1) * k].iter().sum::<f64>())
        .fold(0.0, f64::max);
    ChainInstance::new(k, m, norm).expect("ring instance is valid")
}
