//! Simplicial realisation of a reflexive digraph: a vertex set is a simplex
//! iff it is the image of a homomorphism from a finite chain, equivalently
//! iff it admits a linear order with an arc from every earlier to every later
//! element. Provides simplex enumeration, the Euler characteristic, and a
//! structural recogniser for digraphs triangulating a 1-sphere.

use crate::digraph::Digraph;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TopologyError {
    #[error("simplex enumeration supports at most 16 vertices without a dimension bound (got {0})")]
    GuardExceeded(usize),
}

const SUBSET_GUARD: usize = 16;

/// All simplices of the realisation, grouped by dimension; `by_dim[d]` holds
/// the `d`-simplices as sorted vertex lists in lexicographic order.
/// `complete` is false only when a dimension bound cut the enumeration before
/// the largest simplex dimension was reached.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    pub by_dim: Vec<Vec<Vec<usize>>>,
    pub complete: bool,
}

impl SimplicialComplex {
    pub fn counts(&self) -> Vec<usize> {
        self.by_dim.iter().map(|s| s.len()).collect()
    }

    pub fn max_dimension(&self) -> usize {
        self.by_dim.len().saturating_sub(1)
    }

    pub fn contains(&self, simplex: &[usize]) -> bool {
        let mut sorted = simplex.to_vec();
        sorted.sort_unstable();
        self.by_dim
            .get(simplex.len().saturating_sub(1))
            .map(|sets| sets.binary_search(&sorted).is_ok())
            .unwrap_or(false)
    }
}

/// Enumerates the simplices of `g`, optionally only up to `max_dim`.
/// Beyond 16 vertices a dimension bound is required; within the guard,
/// admissible subsets are computed by a memoised first-element recursion
/// over the subset lattice.
pub fn simplices(g: &Digraph, max_dim: Option<usize>) -> Result<SimplicialComplex, TopologyError> {
    let n = g.n();
    if n > SUBSET_GUARD {
        return match max_dim {
            None => Err(TopologyError::GuardExceeded(n)),
            Some(d) => Ok(bounded_simplices(g, d)),
        };
    }
    let out_masks: Vec<u32> = (0..n)
        .map(|v| {
            let mut m = 0u32;
            for w in g.out_neighbors(v) {
                m |= 1 << w;
            }
            m
        })
        .collect();
    let total = 1usize << n;
    // admits[s]: the set s has an order s1 < ... < st with every earlier
    // element arcing to every later one. A set qualifies iff some member
    // dominates the rest and the rest qualifies; subsets precede supersets
    // numerically, so one ascending pass suffices.
    let mut admits = vec![false; total];
    let mut max_size = 0usize;
    for s in 1..total {
        let size = (s as u32).count_ones() as usize;
        if size == 1 {
            admits[s] = true;
        } else {
            let mut bits = s as u32;
            while bits != 0 {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let rest = s & !(1 << v);
                if admits[rest] && out_masks[v] & rest as u32 == rest as u32 {
                    admits[s] = true;
                    break;
                }
            }
        }
        if admits[s] {
            max_size = max_size.max(size);
        }
    }
    let cap_size = max_dim.map(|d| d + 1).unwrap_or(n).min(n);
    let mut by_dim: Vec<Vec<Vec<usize>>> = vec![Vec::new(); cap_size.min(max_size)];
    for s in 1..total {
        if !admits[s] {
            continue;
        }
        let size = (s as u32).count_ones() as usize;
        if size > cap_size {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|&v| s >> v & 1 == 1).collect();
        by_dim[size - 1].push(members);
    }
    for sets in &mut by_dim {
        sets.sort();
    }
    Ok(SimplicialComplex {
        by_dim,
        complete: max_size <= cap_size,
    })
}

/// Dimension-bounded enumeration for digraphs beyond the subset guard:
/// grows chains one dominated element at a time, deduplicating the
/// underlying sets. Looks one size past the bound to settle completeness.
fn bounded_simplices(g: &Digraph, max_dim: usize) -> SimplicialComplex {
    use std::collections::BTreeSet;
    let cap_size = max_dim + 1;
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut overflow = false;
    let mut chain: Vec<usize> = Vec::new();

    fn extend(
        g: &Digraph,
        chain: &mut Vec<usize>,
        cap_size: usize,
        seen: &mut BTreeSet<Vec<usize>>,
        overflow: &mut bool,
    ) {
        let mut key = chain.clone();
        key.sort_unstable();
        if key.len() == cap_size + 1 {
            *overflow = true;
            return;
        }
        if !seen.insert(key) {
            return;
        }
        for w in 0..g.n() {
            if chain.contains(&w) {
                continue;
            }
            if chain.iter().all(|&u| g.arc(u, w)) {
                chain.push(w);
                extend(g, chain, cap_size, seen, overflow);
                chain.pop();
            }
        }
    }

    for v in 0..g.n() {
        chain.push(v);
        extend(g, &mut chain, cap_size, &mut seen, &mut overflow);
        chain.pop();
    }
    let mut by_dim: Vec<Vec<Vec<usize>>> = Vec::new();
    for set in seen {
        let d = set.len() - 1;
        while by_dim.len() <= d {
            by_dim.push(Vec::new());
        }
        by_dim[d].push(set);
    }
    SimplicialComplex {
        by_dim,
        complete: !overflow,
    }
}

/// Alternating sum over dimensions of the simplex counts; requires the full
/// enumeration and so the 16-vertex guard.
pub fn euler_characteristic(g: &Digraph) -> Result<i64, TopologyError> {
    let complex = simplices(g, None)?;
    Ok(complex
        .counts()
        .iter()
        .enumerate()
        .map(|(d, &c)| if d % 2 == 0 { c as i64 } else { -(c as i64) })
        .sum())
}

/// Structural test: the symmetrisation is a single cycle through all
/// vertices, and a girth-3 cycle qualifies only as the directed 3-cycle.
pub fn triangulates_1_sphere(g: &Digraph) -> bool {
    let n = g.n();
    if n < 3 || !g.is_connected() {
        return false;
    }
    let sym = g.symmetrization();
    for v in 0..n {
        // Two distinct neighbours plus the loop.
        if sym.out_degree(v) != 3 {
            return false;
        }
    }
    if n > 3 {
        return true;
    }
    // Girth 3: only the cyclically oriented triangle has no simplex of size
    // three.
    g.non_loop_arc_count() == 3 && is_intransitive(g)
}

pub fn max_simplex_dimension(g: &Digraph) -> Result<usize, TopologyError> {
    Ok(simplices(g, None)?.max_dimension())
}

/// No transitive triples: `u -> v -> w` with `u -> w` for distinct vertices,
/// equivalently every simplex has dimension at most 1.
pub fn is_intransitive(g: &Digraph) -> bool {
    let n = g.n();
    for u in 0..n {
        for v in g.out_neighbors(u) {
            if v == u {
                continue;
            }
            for w in g.out_neighbors(v) {
                if w != u && w != v && g.arc(u, w) {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;

    #[test]
    fn symmetric_triangle_has_a_2_simplex() {
        let c3 = families::symmetric_cycle(3).unwrap();
        let complex = simplices(&c3, None).unwrap();
        assert!(complex.contains(&[0, 1, 2]));
        assert_eq!(complex.max_dimension(), 2);
    }

    #[test]
    fn directed_triangle_has_no_2_simplex() {
        let d3 = families::directed_cycle(3).unwrap();
        let complex = simplices(&d3, None).unwrap();
        assert_eq!(complex.max_dimension(), 1);
        assert!(is_intransitive(&d3));
    }

    #[test]
    fn three_level_poset_has_eight_2_simplices() {
        let p = families::ordinal_sum(&[2, 2, 2]).unwrap();
        let complex = simplices(&p, None).unwrap();
        assert_eq!(complex.counts(), vec![6, 12, 8]);
    }

    #[test]
    fn euler_characteristic_examples() {
        assert_eq!(
            euler_characteristic(&families::symmetric_cycle(4).unwrap()).unwrap(),
            0
        );
        assert_eq!(
            euler_characteristic(&families::complete_minus_matching(6).unwrap()).unwrap(),
            2
        );
        assert_eq!(
            euler_characteristic(&families::ordinal_sum(&[2, 2, 2]).unwrap()).unwrap(),
            2
        );
    }

    #[test]
    fn one_sphere_recognition() {
        assert!(triangulates_1_sphere(
            &families::cycle(&"ssss".parse().unwrap()).unwrap()
        ));
        assert!(triangulates_1_sphere(&families::directed_cycle(3).unwrap()));
        assert!(!triangulates_1_sphere(
            &families::symmetric_cycle(3).unwrap()
        ));
        assert!(!triangulates_1_sphere(&families::chain(3).unwrap()));
    }

    #[test]
    fn dimension_examples() {
        assert!(is_intransitive(&families::directed_cycle(5).unwrap()));
        assert_eq!(
            max_simplex_dimension(&families::chain(3).unwrap()).unwrap(),
            2
        );
        assert!(is_intransitive(&families::crown(6).unwrap()));
    }

    #[test]
    fn max_dim_bound_reports_completeness() {
        let chain = families::chain(4).unwrap();
        let complex = simplices(&chain, Some(1)).unwrap();
        assert!(!complex.complete);
        assert_eq!(complex.by_dim.len(), 2);
        let full = simplices(&chain, Some(5)).unwrap();
        assert!(full.complete);
    }

    #[test]
    fn downward_closure_holds() {
        for g in [
            families::complete_minus_hamiltonian(4).unwrap(),
            families::ordinal_sum(&[2, 3]).unwrap(),
            families::mixed_4_cycle(),
        ] {
            let complex = simplices(&g, None).unwrap();
            for sets in &complex.by_dim {
                for s in sets {
                    for skip in 0..s.len() {
                        if s.len() > 1 {
                            let face: Vec<usize> = s
                                .iter()
                                .enumerate()
                                .filter(|&(i, _)| i != skip)
                                .map(|(_, &v)| v)
                                .collect();
                            assert!(complex.contains(&face));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn guard_is_enforced_without_bound() {
        let big = Digraph::new(17, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(
            simplices(&big, None).unwrap_err(),
            TopologyError::GuardExceeded(17)
        );
        let bounded = simplices(&big, Some(1)).unwrap();
        assert_eq!(bounded.counts(), vec![17, 3]);
        assert!(!bounded.complete, "the transitive triple exceeds the bound");
        let full = simplices(&big, Some(4)).unwrap();
        assert!(full.complete);
        assert_eq!(full.counts(), vec![17, 3, 1]);
    }
}
