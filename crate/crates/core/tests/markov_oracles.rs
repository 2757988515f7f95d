mod common;

use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::Rng;

use common::{dense_chain, mean_se, random_lengths, rng, test_chains, walks};
use rwbandit::markov::{
    expected_hitting_times, first_passage_probs, hitting_centrality, kappa_from_centrality,
    tail_bound, unit_hitting_times,
};
use rwbandit::walk::{exp_adv_length_process, sample_trajectory};
use rwbandit::{builtin, ChainInstance, EdgeLengths, LengthProcess};

#[test]
fn hitting_times_match_monte_carlo() {
    let n = 100_000;
    for (name, chain) in test_chains() {
        let k = chain.k();
        let processes = [
            LengthProcess::Fixed(EdgeLengths::unit(k)),
            LengthProcess::Fixed(random_lengths(k, 3)),
            exp_adv_length_process(k),
        ];
        for (pi, process) in processes.iter().enumerate() {
            let mu = expected_hitting_times(&chain, &process.expected(1).unwrap()).unwrap();
            let mut r = rng(100 + pi as u64);
            for (i, &m) in mu.iter().enumerate() {
                let lengths: Vec<f64> = walks(&chain, process, i, n, &mut r)
                    .iter()
                    .map(|t| t.length())
                    .collect();
                let (mean, se) = mean_se(&lengths);
                assert!(
                    (mean - m).abs() < 4.0 * se,
                    "{name} process {pi} node {i}: MC {mean} vs exact {m} (se {se})"
                );
            }
        }
    }
}

#[test]
fn first_step_law_matches_rows() {
    let n = 100_000;
    for (name, chain) in test_chains() {
        let k = chain.k();
        let unit = EdgeLengths::unit(k);
        let mut r = rng(7);
        for i in 0..k {
            let mut counts = vec![0usize; k + 1];
            for _ in 0..n {
                let t = sample_trajectory(&chain, &unit, i, 1, &mut r).unwrap();
                let next = t.visits().get(1).copied().unwrap_or(k);
                counts[next] += 1;
            }
            for (j, &c) in counts.iter().enumerate() {
                let p = if j == k {
                    chain.absorb(i)
                } else {
                    chain.m(i, j)
                };
                let se = (p * (1.0 - p) / n as f64).sqrt();
                let freq = c as f64 / n as f64;
                if p == 0.0 {
                    assert_eq!(c, 0, "{name} {i}->{j}");
                } else {
                    assert!(
                        (freq - p).abs() < 4.0 * se,
                        "{name} {i}->{j}: {freq} vs {p}"
                    );
                }
            }
        }
    }
}

#[test]
fn centrality_matches_monte_carlo() {
    let chain = builtin::exp9();
    let k = chain.k();
    let n = 200_000;
    let unit = LengthProcess::Fixed(EdgeLengths::unit(k));
    let mut r = rng(21);
    let mut covered = vec![vec![0usize; k]; k];
    for (u, row) in covered.iter_mut().enumerate() {
        for t in walks(&chain, &unit, u, n, &mut r) {
            for (v, c) in row.iter_mut().enumerate() {
                if t.covers(v) {
                    *c += 1;
                }
            }
        }
    }
    let cent = hitting_centrality(&chain).unwrap();
    for v in 0..k {
        let exact = first_passage_probs(&chain, v).unwrap();
        for u in (0..k).filter(|&u| u != v) {
            let p = exact[u];
            let freq = covered[u][v] as f64 / n as f64;
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((freq - p).abs() < 4.0 * se, "r_{u}({v}): {freq} vs {p}");
        }
        let mc_alpha = covered
            .iter()
            .enumerate()
            .filter(|&(u, _)| u != v)
            .map(|(_, row)| row[v] as f64 / n as f64)
            .fold(f64::INFINITY, f64::min);
        let se = (cent.per_node[v] * (1.0 - cent.per_node[v]) / n as f64).sqrt();
        assert!(
            (mc_alpha - cent.per_node[v]).abs() < 3.0 * se + 1e-3,
            "alpha_{v}"
        );
    }
}

#[test]
fn tail_bound_holds_empirically() {
    let n = 200_000;
    for (name, chain) in test_chains() {
        let k = chain.k();
        let unit = LengthProcess::Fixed(EdgeLengths::unit(k));
        let mut r = rng(5);
        for start in 0..k {
            let hops: Vec<usize> = walks(&chain, &unit, start, n, &mut r)
                .iter()
                .map(|t| t.hops())
                .collect();
            for b in [2u32, 4, 8] {
                let freq = hops.iter().filter(|&&h| h > b as usize).count() as f64 / n as f64;
                assert!(
                    freq <= tail_bound(chain.rho(), b),
                    "{name} start {start} B={b}: {freq}"
                );
            }
        }
    }
}

#[test]
fn uniform_row_sums_give_constant_hitting_times() {
    // Row sums of 1/2 give mu = 1 / (1 - 1/2) from every node.
    let chain = builtin::ring(6, 0.25, 0.125);
    let mu = unit_hitting_times(&chain).unwrap();
    for m in mu {
        assert_relative_eq!(m, 2.0, epsilon = 1e-12);
    }
}

#[test]
fn kappa_monotone_on_grid() {
    let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
    for &a in &grid {
        for &b in &grid {
            let base = kappa_from_centrality(&[a, b, 0.3]).unwrap();
            assert!((1.0..=4.0).contains(&base));
            for &a2 in grid.iter().filter(|&&x| x >= a) {
                assert!(kappa_from_centrality(&[a2, b, 0.3]).unwrap() <= base + 1e-15);
            }
        }
    }
}

fn arb_chain() -> impl Strategy<Value = (ChainInstance, EdgeLengths)> {
    (1usize..7, 0.05f64..0.95, any::<u64>()).prop_map(|(k, rho, seed)| {
        let mut r = rng(seed);
        let mut m = vec![0.0; k * k];
        for i in 0..k {
            let raw: Vec<f64> = (0..k)
                .map(|_| if r.gen_bool(0.4) { 0.0 } else { r.gen::<f64>() })
                .collect();
            let total: f64 = raw.iter().sum();
            if total > 0.0 {
                let target = rho * r.gen_range(0.0..=1.0);
                for j in 0..k {
                    m[i * k + j] = raw[j] * target / total;
                }
            }
        }
        let chain = ChainInstance::new_non_primitive(k, m, rho).unwrap();
        let lengths = random_lengths(k, seed ^ 0x5eed);
        (chain, lengths)
    })
}

proptest! {
    #![proptest_config(ProptestConfig {
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn hitting_times_solve_the_system((chain, lengths) in arb_chain()) {
        let mu = expected_hitting_times(&chain, &lengths).unwrap();
        let c = lengths.step_costs(&chain).unwrap();
        let k = chain.k();
        let scale = mu.iter().chain(&c).fold(1.0f64, |a, x| a.max(x.abs()));
        for i in 0..k {
            let lhs: f64 = mu[i] - (0..k).map(|j| chain.m(i, j) * mu[j]).sum::<f64>();
            prop_assert!((lhs - c[i]).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn first_passage_respects_reachability((chain, _l) in arb_chain()) {
        let k = chain.k();
        for v in 0..k {
            let r = first_passage_probs(&chain, v).unwrap();
            prop_assert_eq!(r[v], 1.0);
            for u in (0..k).filter(|&u| u != v) {
                prop_assert!((0.0..=1.0).contains(&r[u]));
                prop_assert_eq!(r[u] > 0.0, chain.reachable(u, v), "u={} v={}", u, v);
            }
        }
    }
}

#[test]
fn dense_chain_is_valid() {
    let c = dense_chain(5, 0.7, 1);
    assert!(c.validate().passed());
}
