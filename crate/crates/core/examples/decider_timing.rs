//! Timing harness for the exhaustive deciders on the instances the test
//! suite cares about. Run with --release.

use slupecki_core::budget::SearchBudget;
use slupecki_core::families;
use slupecki_core::poly::{k_idempotent_trivial, k_slupecki};
use std::time::Instant;

fn main() {
    let budget = SearchBudget {
        max_nodes: 2_000_000_000,
        timeout: Some(std::time::Duration::from_secs(900)),
    };
    let cases: Vec<(&str, slupecki_core::Digraph, usize)> = vec![
        ("directed 3-cycle", families::directed_cycle(3).unwrap(), 2),
        ("symmetric 4-cycle", families::symmetric_cycle(4).unwrap(), 2),
        ("symmetric 5-cycle", families::symmetric_cycle(5).unwrap(), 2),
        ("chorded 4-cycle", families::chorded_4_cycle(), 2),
        ("2+2", families::ordinal_sum(&[2, 2]).unwrap(), 2),
        ("2+3", families::ordinal_sum(&[2, 3]).unwrap(), 2),
        ("2+2+2", families::ordinal_sum(&[2, 2, 2]).unwrap(), 2),
        ("2+3+2", families::ordinal_sum(&[2, 3, 2]).unwrap(), 2),
        ("2+4+2", families::ordinal_sum(&[2, 4, 2]).unwrap(), 2),
        ("2+5+2", families::ordinal_sum(&[2, 5, 2]).unwrap(), 2),
    ];
    for (name, g, k) in &cases {
        let t = Instant::now();
        let v = k_slupecki(g, *k, &budget).unwrap();
        println!(
            "{name:>18} k={k}: holds={:?} nodes={} prunes={} canonical={} in {:?}",
            v.holds,
            v.stats.nodes,
            v.stats.prunes,
            v.canonical_witness,
            t.elapsed()
        );
    }
    for (name, g, k) in [
        ("2+2+2", families::ordinal_sum(&[2, 2, 2]).unwrap(), 2),
        ("symmetric 4-cycle", families::symmetric_cycle(4).unwrap(), 2),
        ("chain 2", families::chain(2).unwrap(), 2),
    ] {
        let t = Instant::now();
        let v = k_idempotent_trivial(&g, k, &budget).unwrap();
        println!(
            "idtrivial {name:>18} k={k}: holds={:?} nodes={} in {:?}",
            v.holds,
            v.stats.nodes,
            t.elapsed()
        );
    }
    // Stretch instances.
    for (name, g, k) in [
        ("2+6+2", families::ordinal_sum(&[2, 6, 2]).unwrap(), 2),
        ("chorded 4-cycle", families::chorded_4_cycle(), 3),
    ] {
        let t = Instant::now();
        let v = k_slupecki(&g, k, &budget).unwrap();
        println!(
            "stretch {name:>18} k={k}: holds={:?} nodes={} in {:?}",
            v.holds,
            v.stats.nodes,
            t.elapsed()
        );
    }
}
