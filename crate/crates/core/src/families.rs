//! Constructors for the digraph families under study: oriented paths and
//! cycles, crowns, complete graphs minus a matching or a Hamiltonian cycle,
//! ordinal sums of antichains, suspensions, and two specific 4-vertex
//! examples.

use crate::digraph::Digraph;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FamilyError {
    #[error("orientation word may only contain '+', '-' and 's' (got {0:?})")]
    BadOrientationChar(char),
    #[error("orientation word must be non-empty")]
    EmptyWord,
    #[error("cycle girth must be at least 3 (got {0})")]
    GirthTooSmall(usize),
    #[error("crown size must be even and at least 4 (got {0})")]
    BadCrownSize(usize),
    #[error("matching family needs an even vertex count of at least 4 (got {0})")]
    BadMatchingSize(usize),
    #[error("hamiltonian family needs at least 3 vertices (got {0})")]
    BadHamiltonianSize(usize),
    #[error("level sizes must be positive")]
    EmptyLevel,
    #[error("at least one level is required")]
    NoLevels,
    #[error("vertex count must be positive")]
    ZeroVertices,
    #[error("poset suspension requires a poset input")]
    NotAPoset,
}

/// Orientation of one edge slot of a path or cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeOrientation {
    /// Arc `i -> i+1` only.
    Forward,
    /// Arc `i+1 -> i` only.
    Backward,
    /// Both arcs.
    Both,
}

/// One symbol per consecutive edge slot: `+` forward, `-` backward, `s` both.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientationWord(Vec<EdgeOrientation>);

impl OrientationWord {
    pub fn new(slots: Vec<EdgeOrientation>) -> Result<Self, FamilyError> {
        if slots.is_empty() {
            return Err(FamilyError::EmptyWord);
        }
        Ok(OrientationWord(slots))
    }

    pub fn uniform(slot: EdgeOrientation, len: usize) -> Result<Self, FamilyError> {
        OrientationWord::new(vec![slot; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn slots(&self) -> &[EdgeOrientation] {
        &self.0
    }
}

impl FromStr for OrientationWord {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, FamilyError> {
        let mut slots = Vec::with_capacity(s.len());
        for c in s.chars() {
            slots.push(match c {
                '+' => EdgeOrientation::Forward,
                '-' => EdgeOrientation::Backward,
                's' => EdgeOrientation::Both,
                other => return Err(FamilyError::BadOrientationChar(other)),
            });
        }
        OrientationWord::new(slots)
    }
}

impl fmt::Display for OrientationWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for slot in &self.0 {
            f.write_str(match slot {
                EdgeOrientation::Forward => "+",
                EdgeOrientation::Backward => "-",
                EdgeOrientation::Both => "s",
            })?;
        }
        Ok(())
    }
}

fn slot_arcs(arcs: &mut Vec<(usize, usize)>, lo: usize, hi: usize, o: EdgeOrientation) {
    match o {
        EdgeOrientation::Forward => arcs.push((lo, hi)),
        EdgeOrientation::Backward => arcs.push((hi, lo)),
        EdgeOrientation::Both => {
            arcs.push((lo, hi));
            arcs.push((hi, lo));
        }
    }
}

/// Path of length `|w|` on vertices `0..=|w|`, slot `i` realised per `w[i]`.
pub fn path(w: &OrientationWord) -> Result<Digraph, FamilyError> {
    let mut arcs = Vec::new();
    for (i, &o) in w.slots().iter().enumerate() {
        slot_arcs(&mut arcs, i, i + 1, o);
    }
    Ok(Digraph::new(w.len() + 1, &arcs).unwrap())
}

/// Cycle of girth `|w|`; slot `i` joins `i` and `i+1 mod |w|`.
pub fn cycle(w: &OrientationWord) -> Result<Digraph, FamilyError> {
    let n = w.len();
    if n < 3 {
        return Err(FamilyError::GirthTooSmall(n));
    }
    let mut arcs = Vec::new();
    for (i, &o) in w.slots().iter().enumerate() {
        slot_arcs(&mut arcs, i, (i + 1) % n, o);
    }
    Ok(Digraph::new(n, &arcs).unwrap())
}

pub fn directed_cycle(girth: usize) -> Result<Digraph, FamilyError> {
    if girth < 3 {
        return Err(FamilyError::GirthTooSmall(girth));
    }
    cycle(&OrientationWord::uniform(EdgeOrientation::Forward, girth).unwrap())
}

pub fn symmetric_cycle(girth: usize) -> Result<Digraph, FamilyError> {
    if girth < 3 {
        return Err(FamilyError::GirthTooSmall(girth));
    }
    cycle(&OrientationWord::uniform(EdgeOrientation::Both, girth).unwrap())
}

/// The crown on `size = 2m` vertices: arcs `(2i, 2i+1)` and `(2i, 2i-1)`
/// modulo `2m`. Even vertices are minimal, odd vertices maximal.
pub fn crown(size: usize) -> Result<Digraph, FamilyError> {
    if size < 4 || size % 2 != 0 {
        return Err(FamilyError::BadCrownSize(size));
    }
    let mut arcs = Vec::new();
    for i in 0..size / 2 {
        let v = 2 * i;
        arcs.push((v, (v + 1) % size));
        arcs.push((v, (v + size - 1) % size));
    }
    Ok(Digraph::new(size, &arcs).unwrap())
}

/// Complete symmetric digraph on `size = 2n` vertices minus both arcs between
/// `i` and `i + n` for each `i < n`.
pub fn complete_minus_matching(size: usize) -> Result<Digraph, FamilyError> {
    if size < 4 || size % 2 != 0 {
        return Err(FamilyError::BadMatchingSize(size));
    }
    let half = size / 2;
    let mut arcs = Vec::new();
    for u in 0..size {
        for v in 0..size {
            if u != v && (u + half) % size != v {
                arcs.push((u, v));
            }
        }
    }
    Ok(Digraph::new(size, &arcs).unwrap())
}

/// Complete symmetric digraph on `n` vertices minus the directed Hamiltonian
/// cycle `(0,1), (1,2), ..., (n-1,0)`; loops kept.
pub fn complete_minus_hamiltonian(n: usize) -> Result<Digraph, FamilyError> {
    if n < 3 {
        return Err(FamilyError::BadHamiltonianSize(n));
    }
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && (u + 1) % n != v {
                arcs.push((u, v));
            }
        }
    }
    Ok(Digraph::new(n, &arcs).unwrap())
}

pub fn antichain(n: usize) -> Result<Digraph, FamilyError> {
    if n == 0 {
        return Err(FamilyError::ZeroVertices);
    }
    Ok(Digraph::new(n, &[]).unwrap())
}

pub fn chain(n: usize) -> Result<Digraph, FamilyError> {
    if n == 0 {
        return Err(FamilyError::ZeroVertices);
    }
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            arcs.push((u, v));
        }
    }
    Ok(Digraph::new(n, &arcs).unwrap())
}

/// Ordinal sum of antichains: vertices numbered level by level, bottom
/// first, with `x -> y` iff `level(x) < level(y)` or `x = y`.
pub fn ordinal_sum(levels: &[usize]) -> Result<Digraph, FamilyError> {
    if levels.is_empty() {
        return Err(FamilyError::NoLevels);
    }
    if levels.iter().any(|&s| s == 0) {
        return Err(FamilyError::EmptyLevel);
    }
    let n: usize = levels.iter().sum();
    let mut level_of = Vec::with_capacity(n);
    for (idx, &size) in levels.iter().enumerate() {
        level_of.extend(std::iter::repeat(idx).take(size));
    }
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if level_of[u] < level_of[v] {
                arcs.push((u, v));
            }
        }
    }
    Ok(Digraph::new(n, &arcs).unwrap())
}

/// Adds two new vertices joined symmetrically to every old vertex and not to
/// each other.
pub fn suspension(g: &Digraph) -> Digraph {
    let n = g.n();
    let mut arcs = g.non_loop_arcs();
    for new in [n, n + 1] {
        for old in 0..n {
            arcs.push((new, old));
            arcs.push((old, new));
        }
    }
    Digraph::new(n + 2, &arcs).unwrap()
}

/// Ordinal sum with a fresh 2-antichain on top; input must be a poset.
pub fn poset_suspension(p: &Digraph) -> Result<Digraph, FamilyError> {
    if !is_poset(p) {
        return Err(FamilyError::NotAPoset);
    }
    let n = p.n();
    let mut arcs = p.non_loop_arcs();
    for new in [n, n + 1] {
        for old in 0..n {
            arcs.push((old, new));
        }
    }
    Ok(Digraph::new(n + 2, &arcs).unwrap())
}

/// The directed 4-cycle with the extra chord `3 -> 1`: a strongly connected
/// digraph whose endomorphisms include two retractions adjacent to the
/// identity.
pub fn chorded_4_cycle() -> Digraph {
    Digraph::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (3, 1)]).unwrap()
}

/// The 4-cycle with orientation word `+s+s`:
/// arcs `(0,1), (1,2), (2,1), (2,3), (3,0), (0,3)` plus loops.
pub fn mixed_4_cycle() -> Digraph {
    Digraph::new(4, &[(0, 1), (1, 2), (2, 1), (2, 3), (3, 0), (0, 3)]).unwrap()
}

/// True iff the arc relation is reflexive, antisymmetric and transitive.
pub fn is_poset(g: &Digraph) -> bool {
    let n = g.n();
    for u in 0..n {
        for v in g.out_neighbors(u) {
            if u != v && g.arc(v, u) {
                return false;
            }
            for w in g.out_neighbors(v) {
                if !g.arc(u, w) {
                    return false;
                }
            }
        }
    }
    true
}
