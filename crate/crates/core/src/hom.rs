//! Homomorphism enumeration between reflexive digraphs, the digraph
//! `Hom(G, H)` on the homomorphism set, and diagnostics for the position of
//! the identity endomorphism inside it.
//!
//! Enumeration is deterministic: homomorphisms are visited in lexicographic
//! order of their full value table.

use crate::budget::{SearchBudget, SearchStats};
use crate::digraph::Digraph;
use crate::poly::OperationTable;
use crate::search::{SearchControl, Searcher, VarOrder};
use std::ops::ControlFlow;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HomError {
    #[error("target digraph has {0} vertices; at most 64 are supported")]
    TargetTooLarge(usize),
    #[error("pin source vertex {0} out of range for {1} vertices")]
    PinSourceOutOfRange(usize, usize),
    #[error("pin target vertex {0} out of range for {1} vertices")]
    PinTargetOutOfRange(usize, usize),
    #[error("vertex {0} pinned twice")]
    DuplicatePin(usize),
    #[error("search budget exhausted after {} nodes", .stats.nodes)]
    Incomplete { stats: SearchStats },
}

/// A partial map from source vertices to target vertices; pinned vertices
/// are distinct and all values are in range.
#[derive(Clone, Debug, Default)]
pub struct Pinning {
    pairs: Vec<(usize, usize)>,
}

impl Pinning {
    pub fn empty() -> Pinning {
        Pinning { pairs: Vec::new() }
    }

    pub fn new(
        pairs: Vec<(usize, usize)>,
        source_n: usize,
        target_n: usize,
    ) -> Result<Pinning, HomError> {
        let mut seen = vec![false; source_n];
        for &(s, t) in &pairs {
            if s >= source_n {
                return Err(HomError::PinSourceOutOfRange(s, source_n));
            }
            if t >= target_n {
                return Err(HomError::PinTargetOutOfRange(t, target_n));
            }
            if seen[s] {
                return Err(HomError::DuplicatePin(s));
            }
            seen[s] = true;
        }
        Ok(Pinning { pairs })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }
}

/// Visits every homomorphism `source -> target` extending `pins` exactly
/// once, in lexicographic order of the full table. The search propagates
/// candidate sets through arcs in both directions and fails early on emptied
/// sets. Budget exhaustion is reported in the returned stats; results
/// delivered before the cut remain valid but the enumeration is incomplete.
pub fn enumerate_homs(
    source: &Digraph,
    target: &Digraph,
    pins: &Pinning,
    budget: &SearchBudget,
    mut visitor: impl FnMut(&[usize]) -> ControlFlow<()>,
) -> Result<SearchStats, HomError> {
    if target.n() > 64 {
        return Err(HomError::TargetTooLarge(target.n()));
    }
    // Re-validate pins against these digraphs.
    let pins = Pinning::new(pins.pairs.clone(), source.n(), target.n())?;
    let mut searcher = Searcher::new(source, target, pins.pairs(), VarOrder::Static, false, budget);
    let mut scratch = vec![0usize; source.n()];
    let stats = searcher.run(&mut |leaf: &[u8]| {
        for (dst, &v) in scratch.iter_mut().zip(leaf) {
            *dst = v as usize;
        }
        match visitor(&scratch) {
            ControlFlow::Continue(()) => SearchControl::Continue,
            ControlFlow::Break(()) => SearchControl::Stop,
        }
    });
    Ok(stats)
}

pub fn count_homs(
    source: &Digraph,
    target: &Digraph,
    pins: &Pinning,
    budget: &SearchBudget,
) -> Result<(u64, SearchStats), HomError> {
    let mut count = 0u64;
    let stats = enumerate_homs(source, target, pins, budget, |_| {
        count += 1;
        ControlFlow::Continue(())
    })?;
    Ok((count, stats))
}

/// Collects homomorphisms as value tables, stopping at `limit` when given.
pub fn collect_homs(
    source: &Digraph,
    target: &Digraph,
    pins: &Pinning,
    limit: Option<usize>,
    budget: &SearchBudget,
) -> Result<(Vec<Vec<usize>>, SearchStats), HomError> {
    let mut out = Vec::new();
    let cap = limit.unwrap_or(usize::MAX);
    let stats = enumerate_homs(source, target, pins, budget, |h| {
        out.push(h.to_vec());
        if out.len() >= cap {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok((out, stats))
}

/// All endomorphisms of `g` as unary operation tables, in lexicographic
/// order. Errors with `Incomplete` when the budget is exhausted first.
pub fn endomorphisms(
    g: &Digraph,
    budget: &SearchBudget,
) -> Result<(Vec<OperationTable>, SearchStats), HomError> {
    let (maps, stats) = collect_homs(g, g, &Pinning::empty(), None, budget)?;
    if !stats.status.is_complete() {
        return Err(HomError::Incomplete { stats });
    }
    let tables = maps
        .into_iter()
        .map(|m| OperationTable::new(g.n(), 1, m).expect("endomorphism table"))
        .collect();
    Ok((tables, stats))
}

/// The arc rule of the homomorphism digraph: `f -> g` iff `(f(x), g(y))` is
/// an arc of the target whenever `(x, y)` is an arc of the source.
pub fn hom_arc(f: &[usize], g: &[usize], source: &Digraph, target: &Digraph) -> bool {
    for x in 0..source.n() {
        for y in source.out_neighbors(x) {
            if !target.arc(f[x], g[y]) {
                return false;
            }
        }
    }
    true
}

/// The digraph `Hom(source, target)`: one vertex per homomorphism (in
/// lexicographic table order) and arcs per the homomorphism arc rule. Every
/// vertex carries a loop; in particular the identity is a loop in
/// `Hom(G, G)`.
#[derive(Clone, Debug)]
pub struct HomDigraph {
    pub graph: Digraph,
    /// Value table of each homomorphism, indexed like `graph`.
    pub vertices: Vec<Vec<usize>>,
    /// Enumeration cost; adjacency construction is not budgeted separately.
    pub stats: SearchStats,
}

impl HomDigraph {
    /// Index of the hom with the given table, when present.
    pub fn position(&self, table: &[usize]) -> Option<usize> {
        self.vertices.iter().position(|t| t == table)
    }
}

pub fn hom_digraph(
    source: &Digraph,
    target: &Digraph,
    budget: &SearchBudget,
) -> Result<HomDigraph, HomError> {
    let (maps, stats) = collect_homs(source, target, &Pinning::empty(), None, budget)?;
    if !stats.status.is_complete() {
        return Err(HomError::Incomplete { stats });
    }
    let m = maps.len();
    let mut arcs = Vec::new();
    for (i, f) in maps.iter().enumerate() {
        for (j, g) in maps.iter().enumerate() {
            if hom_arc(f, g, source, target) {
                arcs.push((i, j));
            }
        }
    }
    let graph = Digraph::new(m.max(1), &arcs).expect("hom digraph");
    debug_assert!((0..m).all(|i| graph.arc(i, i)), "every hom is a loop");
    Ok(HomDigraph {
        graph,
        vertices: maps,
        stats,
    })
}

/// Where the identity sits in `Hom(G, G)`.
#[derive(Clone, Debug)]
pub struct IdentityStatus {
    /// No in- or out-neighbour other than itself.
    pub isolated_loop: bool,
    /// Alone in its weak component.
    pub alone_weak: bool,
    /// Alone in its strong component.
    pub alone_strong: bool,
    /// Endomorphisms `f != id` with `f -> id`.
    pub in_neighbors: Vec<OperationTable>,
    /// Endomorphisms `g != id` with `id -> g`.
    pub out_neighbors: Vec<OperationTable>,
    /// Members of the identity's weak component, identity included.
    pub weak_component: Vec<OperationTable>,
    pub stats: SearchStats,
}

pub fn identity_status(g: &Digraph, budget: &SearchBudget) -> Result<IdentityStatus, HomError> {
    let hom = hom_digraph(g, g, budget)?;
    let id_table: Vec<usize> = (0..g.n()).collect();
    let id = hom.position(&id_table).expect("identity endomorphism");
    let graph = &hom.graph;
    let as_table =
        |f: usize| OperationTable::new(g.n(), 1, hom.vertices[f].clone()).expect("endomorphism");
    let in_neighbors: Vec<OperationTable> = graph
        .in_neighbors(id)
        .filter(|&f| f != id)
        .map(as_table)
        .collect();
    let out_neighbors: Vec<OperationTable> = graph
        .out_neighbors(id)
        .filter(|&f| f != id)
        .map(as_table)
        .collect();
    let weak = graph.weak_components();
    let strong = graph.strong_components();
    let weak_component: Vec<OperationTable> = weak.blocks[weak.block_of[id]]
        .iter()
        .map(|&f| as_table(f))
        .collect();
    let alone_weak = weak.blocks[weak.block_of[id]].len() == 1;
    let alone_strong = strong.blocks[strong.block_of[id]].len() == 1;
    let isolated_loop = in_neighbors.is_empty() && out_neighbors.is_empty();
    let stats = hom.stats.clone();
    Ok(IdentityStatus {
        isolated_loop,
        alone_weak,
        alone_strong,
        in_neighbors,
        out_neighbors,
        weak_component,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::BudgetStatus;
    use crate::families;

    fn all_maps(n: usize, m: usize) -> Vec<Vec<usize>> {
        // Brute-force oracle: all m^n maps from [0,n) to [0,m).
        let total = m.pow(n as u32);
        (0..total)
            .map(|mut idx| {
                let mut map = vec![0; n];
                for slot in (0..n).rev() {
                    map[slot] = idx % m;
                    idx /= m;
                }
                map
            })
            .collect()
    }

    fn brute_force_homs(source: &Digraph, target: &Digraph) -> Vec<Vec<usize>> {
        all_maps(source.n(), target.n())
            .into_iter()
            .filter(|f| {
                source
                    .arcs()
                    .iter()
                    .all(|&(x, y)| target.arc(f[x], f[y]))
            })
            .collect()
    }

    #[test]
    fn homs_from_singleton_count_vertices() {
        let g = families::chorded_4_cycle();
        let (count, stats) = count_homs(
            &Digraph::singleton(),
            &g,
            &Pinning::empty(),
            &SearchBudget::default(),
        )
        .unwrap();
        assert_eq!(count, 4);
        assert!(stats.status.is_complete());
    }

    #[test]
    fn directed_triangle_has_six_endomorphisms() {
        let d3 = families::directed_cycle(3).unwrap();
        let (endos, _) = endomorphisms(&d3, &SearchBudget::default()).unwrap();
        let brute = brute_force_homs(&d3, &d3);
        assert_eq!(endos.len(), 6);
        assert_eq!(endos.len(), brute.len());
        let tables: Vec<Vec<usize>> = endos.iter().map(|t| t.values().to_vec()).collect();
        assert_eq!(tables, brute, "lexicographic order matches brute force");
    }

    #[test]
    fn pinned_edge_homs_into_complete_minus_hamiltonian() {
        let h4 = families::complete_minus_hamiltonian(4).unwrap();
        let edge = families::path(&"+".parse().unwrap()).unwrap();
        let pins = Pinning::new(vec![(0, 0)], 2, 4).unwrap();
        let (maps, _) = collect_homs(&edge, &h4, &pins, None, &SearchBudget::default()).unwrap();
        let targets: Vec<usize> = maps.iter().map(|m| m[1]).collect();
        assert_eq!(targets, vec![0, 2, 3]);
    }

    #[test]
    fn chain_has_three_monotone_self_maps() {
        let chain = families::chain(2).unwrap();
        let (endos, _) = endomorphisms(&chain, &SearchBudget::default()).unwrap();
        assert_eq!(endos.len(), 3);
        assert_eq!(brute_force_homs(&chain, &chain).len(), 3);
    }

    #[test]
    fn chorded_cycle_retractions_are_endomorphisms() {
        let g = families::chorded_4_cycle();
        let (endos, _) = endomorphisms(&g, &SearchBudget::default()).unwrap();
        let tables: Vec<&[usize]> = endos.iter().map(|t| t.values()).collect();
        assert!(tables.contains(&[0, 1, 2, 3][..].into())); // identity
        assert!(tables.contains(&[1, 1, 2, 3][..].into())); // r: 0 -> 1
        assert!(tables.contains(&[3, 1, 2, 3][..].into())); // s: 0 -> 3
        // Constants are endomorphisms of any reflexive digraph.
        for v in 0..4 {
            assert!(tables.contains(&vec![v; 4][..].into()));
        }
    }

    #[test]
    fn every_emitted_hom_passes_independent_recheck() {
        let g = families::mixed_4_cycle();
        let c5 = families::symmetric_cycle(5).unwrap();
        let (maps, _) =
            collect_homs(&c5, &g, &Pinning::empty(), None, &SearchBudget::default()).unwrap();
        assert!(!maps.is_empty());
        for f in &maps {
            for (x, y) in c5.arcs() {
                assert!(g.arc(f[x], f[y]));
            }
        }
        assert_eq!(maps, brute_force_homs(&c5, &g));
    }

    #[test]
    fn deterministic_runs_produce_identical_sequences() {
        let g = families::chorded_4_cycle();
        let (a, _) = collect_homs(&g, &g, &Pinning::empty(), None, &SearchBudget::default()).unwrap();
        let (b, _) = collect_homs(&g, &g, &Pinning::empty(), None, &SearchBudget::default()).unwrap();
        assert_eq!(a, b);
        let mut sorted = a.clone();
        sorted.sort();
        assert_eq!(a, sorted, "emission is lexicographic");
    }

    #[test]
    fn hom_digraph_of_singleton_source_is_the_target() {
        let g = families::chorded_4_cycle();
        let hom = hom_digraph(&Digraph::singleton(), &g, &SearchBudget::default()).unwrap();
        assert_eq!(hom.graph, g);
    }

    #[test]
    fn chorded_cycle_hom_digraph_around_the_identity() {
        // Brute-force ground truth: the identity's component carries the
        // arcs s -> id -> r, the chord-induced arc s -> r, and loops.
        let g = families::chorded_4_cycle();
        let hom = hom_digraph(&g, &g, &SearchBudget::default()).unwrap();
        assert_eq!(hom.vertices.len(), 11);
        let id = hom.position(&[0, 1, 2, 3]).unwrap();
        let r = hom.position(&[1, 1, 2, 3]).unwrap();
        let s = hom.position(&[3, 1, 2, 3]).unwrap();
        for a in [id, r, s] {
            for b in [id, r, s] {
                let expect = a == b || (a, b) == (s, id) || (a, b) == (id, r) || (a, b) == (s, r);
                assert_eq!(hom.graph.arc(a, b), expect);
            }
        }
    }

    #[test]
    fn composition_preserves_hom_arcs() {
        let g = families::chorded_4_cycle();
        let hom = hom_digraph(&g, &g, &SearchBudget::default()).unwrap();
        let n = hom.vertices.len();
        for f in 0..n {
            for gg in 0..n {
                if !hom.graph.arc(f, gg) {
                    continue;
                }
                for h in 0..n {
                    let hf: Vec<usize> =
                        hom.vertices[f].iter().map(|&v| hom.vertices[h][v]).collect();
                    let hg: Vec<usize> =
                        hom.vertices[gg].iter().map(|&v| hom.vertices[h][v]).collect();
                    assert!(hom_arc(&hf, &hg, &g, &g));
                }
            }
        }
    }

    #[test]
    fn identity_status_examples() {
        let g = families::chorded_4_cycle();
        let st = identity_status(&g, &SearchBudget::default()).unwrap();
        assert!(!st.isolated_loop);
        assert!(!st.alone_weak);
        assert!(st.alone_strong);
        let comp: Vec<&[usize]> = st.weak_component.iter().map(|t| t.values()).collect();
        assert_eq!(comp.len(), 3);
        assert!(comp.contains(&[0, 1, 2, 3][..].into()));
        assert!(comp.contains(&[1, 1, 2, 3][..].into()));
        assert!(comp.contains(&[3, 1, 2, 3][..].into()));

        let poset = families::ordinal_sum(&[2, 2, 2]).unwrap();
        let st = identity_status(&poset, &SearchBudget::default()).unwrap();
        assert!(st.isolated_loop && st.alone_weak && st.alone_strong);

        let chain = families::chain(2).unwrap();
        let st = identity_status(&chain, &SearchBudget::default()).unwrap();
        assert!(!st.isolated_loop);
        let outs: Vec<&[usize]> = st.out_neighbors.iter().map(|t| t.values()).collect();
        assert!(outs.contains(&[1, 1][..].into()), "id -> constant-top");
    }

    #[test]
    fn isolated_implies_alone_weak_implies_alone_strong() {
        for g in [
            families::chain(2).unwrap(),
            families::chorded_4_cycle(),
            families::ordinal_sum(&[2, 2, 2]).unwrap(),
            families::directed_cycle(4).unwrap(),
        ] {
            let st = identity_status(&g, &SearchBudget::default()).unwrap();
            if st.isolated_loop {
                assert!(st.alone_weak);
            }
            if st.alone_weak {
                assert!(st.alone_strong);
            }
        }
    }

    #[test]
    fn budget_exhaustion_is_an_error_for_hom_digraph() {
        let c5 = families::symmetric_cycle(5).unwrap();
        match hom_digraph(&c5, &c5, &SearchBudget::nodes(5)) {
            Err(HomError::Incomplete { stats }) => {
                assert_eq!(stats.status, BudgetStatus::NodeBudgetExceeded)
            }
            other => panic!("expected Incomplete, got {:?}", other.map(|h| h.vertices.len())),
        }
    }
}
