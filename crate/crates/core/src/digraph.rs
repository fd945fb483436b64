//! Reflexive digraphs on dense vertex sets `0..n-1` with bit-row adjacency,
//! products and powers, components, and induced-embedding search. Every
//! constructor enforces reflexivity; loops are stored explicitly and counted.

use crate::budget::{BudgetStatus, SearchBudget, SearchStats};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DigraphError {
    #[error("digraph must have at least one vertex")]
    NoVertices,
    #[error("arc ({0}, {1}) out of range for {2} vertices")]
    ArcOutOfRange(usize, usize, usize),
    #[error("vertex {0} out of range for {1} vertices")]
    VertexOutOfRange(usize, usize),
    #[error("vertex selection must be non-empty")]
    EmptySelection,
    #[error("vertex selection contains duplicate vertex {0}")]
    DuplicateVertex(usize),
    #[error("power arity must be at least 1")]
    ZeroArity,
    #[error("{0}^{1} vertices exceed the supported size")]
    PowerTooLarge(usize, usize),
    #[error("tuple index {0} out of range for {1}^{2} tuples")]
    TupleIndexOutOfRange(usize, usize, usize),
}

const WORD_BITS: usize = 64;
/// Largest vertex count a product/power construction may produce.
const MAX_DENSE_VERTICES: usize = 1 << 13;

fn words_for(n: usize) -> usize {
    n.div_ceil(WORD_BITS)
}

/// A finite reflexive digraph. `adj` holds one bit row per vertex (bit `(u,v)`
/// set iff there is an arc `u -> v`); `radj` is the transpose, kept for fast
/// in-neighbourhood queries.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Digraph {
    n: usize,
    words: usize,
    adj: Vec<u64>,
    radj: Vec<u64>,
}

impl std::fmt::Debug for Digraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Digraph(n={}, arcs={:?})", self.n, self.non_loop_arcs())
    }
}

impl Serialize for Digraph {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Digraph", 2)?;
        s.serialize_field("n", &self.n)?;
        s.serialize_field("arcs", &self.non_loop_arcs())?;
        s.end()
    }
}

impl Digraph {
    /// Builds the reflexive digraph with the given non-loop (or loop) arcs;
    /// all loops are added and duplicates collapse.
    pub fn new(n: usize, arcs: &[(usize, usize)]) -> Result<Digraph, DigraphError> {
        if n == 0 {
            return Err(DigraphError::NoVertices);
        }
        let words = words_for(n);
        let mut g = Digraph {
            n,
            words,
            adj: vec![0; n * words],
            radj: vec![0; n * words],
        };
        for v in 0..n {
            g.set_arc(v, v);
        }
        for &(u, v) in arcs {
            if u >= n || v >= n {
                return Err(DigraphError::ArcOutOfRange(u, v, n));
            }
            g.set_arc(u, v);
        }
        Ok(g)
    }

    /// Single looped vertex.
    pub fn singleton() -> Digraph {
        Digraph::new(1, &[]).unwrap()
    }

    fn set_arc(&mut self, u: usize, v: usize) {
        self.adj[u * self.words + v / WORD_BITS] |= 1 << (v % WORD_BITS);
        self.radj[v * self.words + u / WORD_BITS] |= 1 << (u % WORD_BITS);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arc(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.words + v / WORD_BITS] >> (v % WORD_BITS) & 1 == 1
    }

    pub fn out_row(&self, u: usize) -> &[u64] {
        &self.adj[u * self.words..(u + 1) * self.words]
    }

    pub fn in_row(&self, v: usize) -> &[u64] {
        &self.radj[v * self.words..(v + 1) * self.words]
    }

    /// Out-neighbourhood as a single word; only valid when `n <= 64`.
    pub fn out_mask64(&self, u: usize) -> u64 {
        debug_assert!(self.n <= 64);
        self.adj[u * self.words]
    }

    pub fn in_mask64(&self, v: usize) -> u64 {
        debug_assert!(self.n <= 64);
        self.radj[v * self.words]
    }

    pub fn out_neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        BitIter::new(self.out_row(u))
    }

    pub fn in_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        BitIter::new(self.in_row(v))
    }

    pub fn out_degree(&self, u: usize) -> usize {
        self.out_row(u).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Total number of arcs, loops included.
    pub fn arc_count(&self) -> usize {
        self.adj.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn non_loop_arc_count(&self) -> usize {
        self.arc_count() - self.n
    }

    /// All arcs (loops included) in lexicographic order.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.arc_count());
        for u in 0..self.n {
            for v in self.out_neighbors(u) {
                out.push((u, v));
            }
        }
        out
    }

    /// Non-loop arcs in lexicographic order.
    pub fn non_loop_arcs(&self) -> Vec<(usize, usize)> {
        self.arcs().into_iter().filter(|&(u, v)| u != v).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|u| self.out_neighbors(u).all(|v| self.arc(v, u)))
    }

    /// Symmetric closure.
    pub fn symmetrization(&self) -> Digraph {
        let mut arcs = self.non_loop_arcs();
        let rev: Vec<_> = arcs.iter().map(|&(u, v)| (v, u)).collect();
        arcs.extend(rev);
        Digraph::new(self.n, &arcs).unwrap()
    }

    /// Digraph with every arc reversed.
    pub fn reversed(&self) -> Digraph {
        let arcs: Vec<_> = self.non_loop_arcs().iter().map(|&(u, v)| (v, u)).collect();
        Digraph::new(self.n, &arcs).unwrap()
    }

    /// Product of relational structures; vertex `(g, h)` gets the row-major
    /// index `g * |H| + h` and `((g1,h1),(g2,h2))` is an arc iff both
    /// projections are arcs.
    pub fn product(&self, other: &Digraph) -> Result<Digraph, DigraphError> {
        let n = self
            .n
            .checked_mul(other.n)
            .filter(|&n| n <= MAX_DENSE_VERTICES)
            .ok_or(DigraphError::PowerTooLarge(self.n, 2))?;
        let words = words_for(n);
        let mut g = Digraph {
            n,
            words,
            adj: vec![0; n * words],
            radj: vec![0; n * words],
        };
        for g1 in 0..self.n {
            for g2 in self.out_neighbors(g1) {
                for h1 in 0..other.n {
                    let base = g1 * other.n + h1;
                    for h2 in other.out_neighbors(h1) {
                        g.set_arc(base, g2 * other.n + h2);
                    }
                }
            }
        }
        Ok(g)
    }

    /// `k`-th categorical power; vertices are `VertexTuple`s in mixed-radix
    /// order with the first coordinate most significant. `power(g, 1)` is a
    /// bit-for-bit copy of `g`.
    pub fn power(&self, k: usize) -> Result<Digraph, DigraphError> {
        if k == 0 {
            return Err(DigraphError::ZeroArity);
        }
        let mut result = self.clone();
        for _ in 1..k {
            result = result.product(self)?;
        }
        Ok(result)
    }

    /// Subdigraph induced by `sel`, relabelled to `0..sel.len()-1` preserving
    /// the order of `sel`.
    pub fn induced(&self, sel: &[usize]) -> Result<Digraph, DigraphError> {
        if sel.is_empty() {
            return Err(DigraphError::EmptySelection);
        }
        let mut seen = vec![false; self.n];
        for &v in sel {
            if v >= self.n {
                return Err(DigraphError::VertexOutOfRange(v, self.n));
            }
            if seen[v] {
                return Err(DigraphError::DuplicateVertex(v));
            }
            seen[v] = true;
        }
        let mut arcs = Vec::new();
        for (i, &u) in sel.iter().enumerate() {
            for (j, &v) in sel.iter().enumerate() {
                if self.arc(u, v) {
                    arcs.push((i, j));
                }
            }
        }
        Digraph::new(sel.len(), &arcs)
    }

    /// Weak components (components of the symmetrization).
    pub fn weak_components(&self) -> ComponentPartition {
        let sym = self.symmetrization();
        let mut block_of = vec![usize::MAX; self.n];
        let mut blocks = Vec::new();
        for start in 0..self.n {
            if block_of[start] != usize::MAX {
                continue;
            }
            let id = blocks.len();
            let mut stack = vec![start];
            let mut members = Vec::new();
            block_of[start] = id;
            while let Some(u) = stack.pop() {
                members.push(u);
                for v in sym.out_neighbors(u) {
                    if block_of[v] == usize::MAX {
                        block_of[v] = id;
                        stack.push(v);
                    }
                }
            }
            members.sort_unstable();
            blocks.push(members);
        }
        ComponentPartition {
            block_of,
            blocks,
            block_order: None,
        }
    }

    /// Strong components together with the reflexive-transitive reachability
    /// order between blocks.
    pub fn strong_components(&self) -> ComponentPartition {
        let raw = tarjan(self);
        // Canonical block order: sort by smallest member.
        let mut order: Vec<usize> = (0..raw.len()).collect();
        order.sort_by_key(|&b| raw[b][0]);
        let mut blocks = Vec::with_capacity(raw.len());
        let mut block_of = vec![0; self.n];
        for (new_id, &old_id) in order.iter().enumerate() {
            let mut members = raw[old_id].clone();
            members.sort_unstable();
            for &v in &members {
                block_of[v] = new_id;
            }
            blocks.push(members);
        }
        let b = blocks.len();
        // Direct arcs between blocks, then transitive closure.
        let mut direct = vec![vec![false; b]; b];
        for u in 0..self.n {
            for v in self.out_neighbors(u) {
                direct[block_of[u]][block_of[v]] = true;
            }
        }
        for mid in 0..b {
            for lo in 0..b {
                if direct[lo][mid] {
                    for hi in 0..b {
                        if direct[mid][hi] {
                            direct[lo][hi] = true;
                        }
                    }
                }
            }
        }
        let mut arcs = Vec::new();
        for lo in 0..b {
            for hi in 0..b {
                if direct[lo][hi] {
                    arcs.push((lo, hi));
                }
            }
        }
        ComponentPartition {
            block_of,
            blocks,
            block_order: Some(Digraph::new(b, &arcs).unwrap()),
        }
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.strong_components().blocks.len() == 1
    }

    pub fn is_connected(&self) -> bool {
        self.weak_components().blocks.len() == 1
    }

    /// Isomorphism test via induced-embedding search between equal-size
    /// digraphs.
    pub fn is_isomorphic_to(&self, other: &Digraph) -> bool {
        if self.n != other.n || self.arc_count() != other.arc_count() {
            return false;
        }
        let (maps, stats) = find_embeddings(self, other, 1, &SearchBudget::unlimited());
        debug_assert!(stats.status.is_complete());
        !maps.is_empty()
    }
}

struct BitIter<'a> {
    words: &'a [u64],
    word_idx: usize,
    current: u64,
}

impl<'a> BitIter<'a> {
    fn new(words: &'a [u64]) -> Self {
        BitIter {
            words,
            word_idx: 0,
            current: if words.is_empty() { 0 } else { words[0] },
        }
    }
}

impl Iterator for BitIter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        while self.current == 0 {
            self.word_idx += 1;
            if self.word_idx >= self.words.len() {
                return None;
            }
            self.current = self.words[self.word_idx];
        }
        let bit = self.current.trailing_zeros() as usize;
        self.current &= self.current - 1;
        Some(self.word_idx * WORD_BITS + bit)
    }
}

fn tarjan(g: &Digraph) -> Vec<Vec<usize>> {
    struct State<'a> {
        g: &'a Digraph,
        index: usize,
        idx: Vec<Option<usize>>,
        low: Vec<usize>,
        stack: Vec<usize>,
        on_stack: Vec<bool>,
        comps: Vec<Vec<usize>>,
    }

    fn connect(v: usize, st: &mut State<'_>) {
        st.idx[v] = Some(st.index);
        st.low[v] = st.index;
        st.index += 1;
        st.stack.push(v);
        st.on_stack[v] = true;
        let neighbors: Vec<usize> = st.g.out_neighbors(v).collect();
        for w in neighbors {
            if st.idx[w].is_none() {
                connect(w, st);
                st.low[v] = st.low[v].min(st.low[w]);
            } else if st.on_stack[w] {
                st.low[v] = st.low[v].min(st.idx[w].unwrap());
            }
        }
        if st.low[v] == st.idx[v].unwrap() {
            let mut comp = Vec::new();
            loop {
                let w = st.stack.pop().expect("stack underflow");
                st.on_stack[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            st.comps.push(comp);
        }
    }

    let mut st = State {
        g,
        index: 0,
        idx: vec![None; g.n()],
        low: vec![0; g.n()],
        stack: Vec::new(),
        on_stack: vec![false; g.n()],
        comps: Vec::new(),
    };
    for v in 0..g.n() {
        if st.idx[v].is_none() {
            connect(v, &mut st);
        }
    }
    st.comps
}

/// Partition of the vertex set into (weak or strong) components. For strong
/// components `block_order` carries the reflexive-transitive reachability
/// relation between blocks, which is a partial order.
#[derive(Clone, Debug)]
pub struct ComponentPartition {
    pub block_of: Vec<usize>,
    pub blocks: Vec<Vec<usize>>,
    pub block_order: Option<Digraph>,
}

impl ComponentPartition {
    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// `a` is below-or-equal `b` in the block order.
    pub fn block_le(&self, a: usize, b: usize) -> bool {
        self.block_order
            .as_ref()
            .map(|o| o.arc(a, b))
            .unwrap_or(a == b)
    }

    /// Blocks with no other block below them.
    pub fn minimal_blocks(&self) -> Vec<usize> {
        let order = match &self.block_order {
            Some(o) => o,
            None => return (0..self.blocks.len()).collect(),
        };
        (0..self.blocks.len())
            .filter(|&b| order.in_neighbors(b).all(|a| a == b))
            .collect()
    }

    /// Blocks with no other block above them.
    pub fn maximal_blocks(&self) -> Vec<usize> {
        let order = match &self.block_order {
            Some(o) => o,
            None => return (0..self.blocks.len()).collect(),
        };
        (0..self.blocks.len())
            .filter(|&b| order.out_neighbors(b).all(|a| a == b))
            .collect()
    }
}

/// Coordinates of a vertex of a `k`-th power, with the canonical mixed-radix
/// index `sum_i coords[i] * base^(k-1-i)` (first coordinate most significant).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexTuple {
    pub base: usize,
    pub coords: Vec<usize>,
}

impl VertexTuple {
    pub fn new(base: usize, coords: Vec<usize>) -> Result<VertexTuple, DigraphError> {
        for &c in &coords {
            if c >= base {
                return Err(DigraphError::VertexOutOfRange(c, base));
            }
        }
        if coords.is_empty() {
            return Err(DigraphError::ZeroArity);
        }
        Ok(VertexTuple { base, coords })
    }

    pub fn from_index(base: usize, arity: usize, index: usize) -> Result<VertexTuple, DigraphError> {
        if arity == 0 {
            return Err(DigraphError::ZeroArity);
        }
        let total = base
            .checked_pow(arity as u32)
            .ok_or(DigraphError::PowerTooLarge(base, arity))?;
        if index >= total {
            return Err(DigraphError::TupleIndexOutOfRange(index, base, arity));
        }
        Ok(VertexTuple {
            base,
            coords: tuple_from_index(index, base, arity),
        })
    }

    pub fn index(&self) -> usize {
        tuple_index(&self.coords, self.base)
    }

    pub fn arity(&self) -> usize {
        self.coords.len()
    }
}

pub(crate) fn tuple_index(coords: &[usize], base: usize) -> usize {
    coords.iter().fold(0, |acc, &c| acc * base + c)
}

pub(crate) fn tuple_from_index(mut index: usize, base: usize, arity: usize) -> Vec<usize> {
    let mut coords = vec![0; arity];
    for slot in (0..arity).rev() {
        coords[slot] = index % base;
        index /= base;
    }
    coords
}

/// Odometer over all `base^arity` coordinate tuples in index order.
pub(crate) fn for_each_tuple(base: usize, arity: usize, mut f: impl FnMut(&[usize])) {
    let mut coords = vec![0usize; arity];
    loop {
        f(&coords);
        let mut slot = arity;
        loop {
            if slot == 0 {
                return;
            }
            slot -= 1;
            coords[slot] += 1;
            if coords[slot] < base {
                break;
            }
            coords[slot] = 0;
        }
    }
}

/// Enumerates induced embeddings of `h` into `g` in lexicographic order of
/// the image tuple `(e(0), ..., e(|H|-1))`, stopping after `limit` maps.
/// Every returned map `e` is injective and satisfies
/// `(x, y)` arc of `h` iff `(e(x), e(y))` arc of `g`.
///
/// An empty result with a complete status means no embedding exists; an empty
/// result with an exceeded status means the search was cut short.
pub fn find_embeddings(
    h: &Digraph,
    g: &Digraph,
    limit: usize,
    budget: &SearchBudget,
) -> (Vec<Vec<usize>>, SearchStats) {
    let mut found = Vec::new();
    let mut stats = SearchStats::new();
    let start = Instant::now();
    if limit == 0 || h.n() > g.n() {
        stats.elapsed = start.elapsed();
        return (found, stats);
    }
    let h_out: Vec<usize> = (0..h.n()).map(|x| h.out_degree(x)).collect();
    let h_in: Vec<usize> = (0..h.n()).map(|x| h.in_degree(x)).collect();
    let g_out: Vec<usize> = (0..g.n()).map(|v| g.out_degree(v)).collect();
    let g_in: Vec<usize> = (0..g.n()).map(|v| g.in_degree(v)).collect();

    let mut image = Vec::with_capacity(h.n());
    let mut used = vec![false; g.n()];
    let deadline = budget.timeout.map(|t| start + t);

    fn dfs(
        h: &Digraph,
        g: &Digraph,
        h_out: &[usize],
        h_in: &[usize],
        g_out: &[usize],
        g_in: &[usize],
        image: &mut Vec<usize>,
        used: &mut [bool],
        found: &mut Vec<Vec<usize>>,
        limit: usize,
        stats: &mut SearchStats,
        max_nodes: u64,
        deadline: Option<Instant>,
    ) -> bool {
        let x = image.len();
        if x == h.n() {
            found.push(image.clone());
            return found.len() >= limit;
        }
        'cand: for v in 0..g.n() {
            if used[v] {
                continue;
            }
            if stats.nodes >= max_nodes {
                stats.status = BudgetStatus::NodeBudgetExceeded;
                return true;
            }
            stats.nodes += 1;
            if stats.nodes % 4096 == 0 {
                if let Some(d) = deadline {
                    if Instant::now() > d {
                        stats.status = BudgetStatus::TimedOut;
                        return true;
                    }
                }
            }
            if h_out[x] > g_out[v] || h_in[x] > g_in[v] {
                stats.prunes += 1;
                continue;
            }
            for (y, &w) in image.iter().enumerate() {
                if h.arc(x, y) != g.arc(v, w) || h.arc(y, x) != g.arc(w, v) {
                    stats.prunes += 1;
                    continue 'cand;
                }
            }
            image.push(v);
            used[v] = true;
            let stop = dfs(
                h, g, h_out, h_in, g_out, g_in, image, used, found, limit, stats, max_nodes,
                deadline,
            );
            image.pop();
            used[v] = false;
            if stop {
                return true;
            }
        }
        false
    }

    dfs(
        h,
        g,
        &h_out,
        &h_in,
        &g_out,
        &g_in,
        &mut image,
        &mut used,
        &mut found,
        limit,
        &mut stats,
        budget.max_nodes,
        deadline,
    );
    stats.elapsed = start.elapsed();
    (found, stats)
}

/// Rechecks that `map` is an induced embedding of `h` into `g`; used by tests
/// and verifiers as an oracle independent of the search.
pub fn is_induced_embedding(h: &Digraph, g: &Digraph, map: &[usize]) -> bool {
    if map.len() != h.n() {
        return false;
    }
    let mut seen = vec![false; g.n()];
    for &v in map {
        if v >= g.n() || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    for x in 0..h.n() {
        for y in 0..h.n() {
            if h.arc(x, y) != g.arc(map[x], map[y]) {
                return false;
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
    fn single_vertex_has_one_arc() {
        let g = Digraph::new(1, &[]).unwrap();
        assert_eq!(g.arc_count(), 1);
        assert!(g.arc(0, 0));
    }

    #[test]
    fn chorded_cycle_has_nine_arcs() {
        let g = Digraph::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (3, 1)]).unwrap();
        assert_eq!(g.arc_count(), 9);
        assert!(g.arc(3, 1) && !g.arc(1, 3));
    }

    #[test]
    fn out_of_range_arc_is_rejected_naming_the_pair() {
        let err = Digraph::new(3, &[(0, 5)]).unwrap_err();
        assert_eq!(err, DigraphError::ArcOutOfRange(0, 5, 3));
    }

    #[test]
    fn product_of_loops_is_a_loop() {
        let l = Digraph::singleton();
        let p = l.product(&l).unwrap();
        assert_eq!(p.n(), 1);
        assert_eq!(p.arc_count(), 1);
    }

    #[test]
    fn product_arc_count_multiplies() {
        let c4 = families::symmetric_cycle(4).unwrap();
        let p = c4.product(&c4).unwrap();
        assert_eq!(p.n(), 16);
        assert_eq!(p.arc_count(), 144);
    }

    #[test]
    fn power_one_is_bit_for_bit_identity() {
        let g = families::chorded_4_cycle();
        assert_eq!(g.power(1).unwrap(), g);
    }

    #[test]
    fn power_agrees_with_product() {
        let c4 = families::symmetric_cycle(4).unwrap();
        assert_eq!(c4.power(2).unwrap(), c4.product(&c4).unwrap());
        let d3 = families::directed_cycle(3).unwrap();
        assert_eq!(d3.power(3).unwrap().n(), 27);
        assert!(matches!(c4.power(0), Err(DigraphError::ZeroArity)));
    }

    #[test]
    fn symmetrization_examples() {
        let d3 = families::directed_cycle(3).unwrap();
        assert_eq!(d3.symmetrization(), families::symmetric_cycle(3).unwrap());
        let c4 = families::symmetric_cycle(4).unwrap();
        assert_eq!(c4.symmetrization(), c4);
        // The chorded 4-cycle symmetrises to the 4-cycle plus the chord {1,3}.
        let g = families::chorded_4_cycle().symmetrization();
        let expect = Digraph::new(
            4,
            &[
                (0, 1),
                (1, 0),
                (1, 2),
                (2, 1),
                (2, 3),
                (3, 2),
                (3, 0),
                (0, 3),
                (1, 3),
                (3, 1),
            ],
        )
        .unwrap();
        assert_eq!(g, expect);
    }

    #[test]
    fn component_examples() {
        let g = families::chorded_4_cycle();
        assert_eq!(g.strong_components().block_count(), 1);

        let chain = families::chain(2).unwrap();
        let sc = chain.strong_components();
        assert_eq!(sc.block_count(), 2);
        assert!(sc.block_le(sc.block_of[0], sc.block_of[1]));
        assert!(!sc.block_le(sc.block_of[1], sc.block_of[0]));
        assert_eq!(sc.minimal_blocks(), vec![sc.block_of[0]]);

        let two_loops = Digraph::new(2, &[]).unwrap();
        assert_eq!(two_loops.weak_components().block_count(), 2);
    }

    #[test]
    fn block_order_is_acyclic_between_distinct_blocks() {
        let g = Digraph::new(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 3)]).unwrap();
        let sc = g.strong_components();
        let order = sc.block_order.as_ref().unwrap();
        for a in 0..sc.block_count() {
            for b in 0..sc.block_count() {
                if a != b {
                    assert!(!(order.arc(a, b) && order.arc(b, a)));
                }
            }
        }
    }

    #[test]
    fn induced_examples() {
        let g = families::chorded_4_cycle();
        let h = g.induced(&[1, 2, 3]).unwrap();
        assert_eq!(h, families::directed_cycle(3).unwrap());
        assert!(g.induced(&[0, 1, 2, 3]).unwrap().is_isomorphic_to(&g));
        let c6 = families::symmetric_cycle(6).unwrap();
        let e = c6.induced(&[0, 1]).unwrap();
        assert_eq!(e, Digraph::new(2, &[(0, 1), (1, 0)]).unwrap());
        assert!(g.induced(&[]).is_err());
    }

    #[test]
    fn vertex_tuple_roundtrip() {
        for idx in 0..27 {
            let t = VertexTuple::from_index(3, 3, idx).unwrap();
            assert_eq!(t.index(), idx);
        }
        assert!(VertexTuple::from_index(3, 3, 27).is_err());
        assert_eq!(VertexTuple::new(4, vec![1, 0]).unwrap().index(), 4);
    }

    #[test]
    fn embeddings_of_singleton() {
        let g = families::chorded_4_cycle();
        let (maps, stats) =
            find_embeddings(&Digraph::singleton(), &g, usize::MAX, &SearchBudget::default());
        assert_eq!(maps.len(), 4);
        assert!(stats.status.is_complete());
    }

    #[test]
    fn diagonal_style_embedding_found() {
        let c4 = families::symmetric_cycle(4).unwrap();
        let sq = c4.power(2).unwrap();
        let (maps, _) = find_embeddings(&c4, &sq, usize::MAX, &SearchBudget::default());
        let diag: Vec<usize> = (0..4).map(|x| x * 4).collect();
        assert!(maps.contains(&diag));
        for m in &maps {
            assert!(is_induced_embedding(&c4, &sq, m));
        }
    }

    #[test]
    fn no_symmetric_edge_in_directed_cycle() {
        let edge = Digraph::new(2, &[(0, 1), (1, 0)]).unwrap();
        let d3 = families::directed_cycle(3).unwrap();
        let (maps, stats) = find_embeddings(&edge, &d3, usize::MAX, &SearchBudget::default());
        assert!(maps.is_empty());
        assert!(stats.status.is_complete());
    }

    #[test]
    fn embedding_budget_exhaustion_is_flagged() {
        let c4 = families::symmetric_cycle(4).unwrap();
        let sq = c4.power(2).unwrap();
        let (_, stats) = find_embeddings(&c4, &sq, usize::MAX, &SearchBudget::nodes(3));
        assert_eq!(stats.status, BudgetStatus::NodeBudgetExceeded);
    }
}
