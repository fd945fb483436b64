//! pp-definability machinery: a gadget is a digraph with pinned input
//! vertices and one output vertex; the set it defines in a target digraph is
//! the set of output values over all homomorphisms respecting the pins.
//! A uniform gadget whose pinnings always define proper subsets and reach
//! every co-singleton certifies that the target's surjective polymorphisms
//! of every arity are essentially unary; the certificate is checked
//! exhaustively and can be cross-validated on small targets by gluing copies
//! and enumerating all homomorphisms of the glued structure.

use crate::budget::{BudgetStatus, SearchBudget, SearchStats};
use crate::digraph::Digraph;
use crate::families::{self, EdgeOrientation, OrientationWord};
use crate::hom::{self, HomError, Pinning};
use crate::poly::{slupecki_relation, PolyError};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeSet;
use std::ops::ControlFlow;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GadgetError {
    #[error("pin vertex {0} out of range for gadget with {1} vertices")]
    PinOutOfRange(usize, usize),
    #[error("output vertex {0} out of range for gadget with {1} vertices")]
    OutputOutOfRange(usize, usize),
    #[error("pins must be distinct")]
    DuplicatePin,
    #[error("at least one pin is required")]
    NoPins,
    #[error("pinning has {got} values for {expected} pins")]
    PinningArity { expected: usize, got: usize },
    #[error("pinning value {0} out of range for {1} vertices")]
    PinningOutOfRange(usize, usize),
    #[error("gluing requires at least 2 copies")]
    TooFewCopies,
    #[error("direct check supports at most 4 target vertices (got {0})")]
    DirectCheckGuard(usize),
    #[error("{0} pinnings exceed the enumeration guard")]
    TooManyPinnings(u64),
    #[error("no path orientation variant yields a valid crown gadget")]
    NoValidCrownVariant,
    #[error("unsupported family parameters: {0}")]
    BadFamily(String),
    #[error(transparent)]
    Hom(#[from] HomError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Family(#[from] families::FamilyError),
}

/// A digraph with distinguished pin vertices and an output vertex. The
/// output may coincide with a pin; `output_is_pin` flags that case.
#[derive(Clone, Debug, Serialize)]
pub struct GadgetSpec {
    pub graph: Digraph,
    pub pins: Vec<usize>,
    pub output: usize,
    pub output_is_pin: bool,
    /// Human-readable account of the construction.
    pub description: String,
}

impl GadgetSpec {
    pub fn new(
        graph: Digraph,
        pins: Vec<usize>,
        output: usize,
        description: impl Into<String>,
    ) -> Result<GadgetSpec, GadgetError> {
        if pins.is_empty() {
            return Err(GadgetError::NoPins);
        }
        let n = graph.n();
        let mut seen = vec![false; n];
        for &p in &pins {
            if p >= n {
                return Err(GadgetError::PinOutOfRange(p, n));
            }
            if seen[p] {
                return Err(GadgetError::DuplicatePin);
            }
            seen[p] = true;
        }
        if output >= n {
            return Err(GadgetError::OutputOutOfRange(output, n));
        }
        let output_is_pin = pins.contains(&output);
        Ok(GadgetSpec {
            graph,
            pins,
            output,
            output_is_pin,
            description: description.into(),
        })
    }
}

/// The subset of `g` defined by the gadget under one pinning: all values of
/// the output vertex over homomorphisms of the gadget into `g` mapping pin
/// `i` to `pinning[i]`. Returned sorted; may be empty.
pub fn pp_defined_set(
    g: &Digraph,
    gadget: &GadgetSpec,
    pinning: &[usize],
    budget: &SearchBudget,
) -> Result<Vec<usize>, GadgetError> {
    if pinning.len() != gadget.pins.len() {
        return Err(GadgetError::PinningArity {
            expected: gadget.pins.len(),
            got: pinning.len(),
        });
    }
    for &v in pinning {
        if v >= g.n() {
            return Err(GadgetError::PinningOutOfRange(v, g.n()));
        }
    }
    let pins = Pinning::new(
        gadget.pins.iter().copied().zip(pinning.iter().copied()).collect(),
        gadget.graph.n(),
        g.n(),
    )?;
    let mut values = BTreeSet::new();
    let stats = hom::enumerate_homs(&gadget.graph, g, &pins, budget, |h| {
        values.insert(h[gadget.output]);
        if values.len() == g.n() {
            // The set is already everything; no need to keep enumerating.
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    if !stats.status.is_complete() && values.len() < g.n() {
        return Err(GadgetError::Hom(HomError::Incomplete { stats }));
    }
    Ok(values.into_iter().collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateRow {
    pub pinning: Vec<usize>,
    pub set: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoSingleton {
    /// The missing vertex `a` of the defined set `G \ {a}`.
    pub missing: usize,
    /// A pinning whose defined set is exactly `G \ {a}`.
    pub pinning: Vec<usize>,
}

/// Exhaustive verification record for a uniform gadget: one row per pinning,
/// the co-singletons reached, and the two conditions. `valid` only when both
/// conditions were established over every pinning.
#[derive(Clone, Debug, Serialize)]
pub struct UniformGadgetCertificate {
    pub digraph: Digraph,
    pub gadget: GadgetSpec,
    pub rows: Vec<CertificateRow>,
    pub co_singletons_found: Vec<CoSingleton>,
    pub proper_everywhere: bool,
    pub valid: bool,
    pub status: BudgetStatus,
    /// Pinnings not evaluated when the budget ran out.
    pub remaining_pinnings: Vec<Vec<usize>>,
    pub stats: SearchStats,
}

const PINNING_GUARD: u64 = 1 << 20;

fn all_pinnings(n: usize, t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    crate::digraph::for_each_tuple(n, t, |coords| out.push(coords.to_vec()));
    out
}

/// Checks both uniform-gadget conditions over all `|G|^t` pinnings: every
/// defined set is a proper subset, and every co-singleton `G \ {a}` is
/// reached. Pinnings are independent and verified concurrently when
/// `threads > 1`; the certificate is assembled in pinning order either way.
pub fn verify_uniform_gadget(
    g: &Digraph,
    gadget: &GadgetSpec,
    budget: &SearchBudget,
    threads: usize,
) -> Result<UniformGadgetCertificate, GadgetError> {
    let t = gadget.pins.len();
    match (g.n() as u64).checked_pow(t as u32) {
        Some(c) if c <= PINNING_GUARD => {}
        c => return Err(GadgetError::TooManyPinnings(c.unwrap_or(u64::MAX))),
    }
    let pinnings = all_pinnings(g.n(), t);
    let mut rows = Vec::with_capacity(pinnings.len());
    let mut stats = SearchStats::new();
    let mut status = BudgetStatus::Complete;
    let mut remaining = Vec::new();

    if threads > 1 {
        let results: Vec<Result<Vec<usize>, GadgetError>> = pinnings
            .par_iter()
            .map(|p| pp_defined_set(g, gadget, p, budget))
            .collect();
        for (p, res) in pinnings.iter().zip(results) {
            match res {
                Ok(set) => rows.push(CertificateRow {
                    pinning: p.clone(),
                    set,
                }),
                Err(GadgetError::Hom(HomError::Incomplete { stats: s })) => {
                    stats.absorb(&s);
                    status = s.status;
                    remaining.push(p.clone());
                }
                Err(e) => return Err(e),
            }
        }
    } else {
        for p in &pinnings {
            if status.is_complete() {
                match pp_defined_set(g, gadget, p, budget) {
                    Ok(set) => rows.push(CertificateRow {
                        pinning: p.clone(),
                        set,
                    }),
                    Err(GadgetError::Hom(HomError::Incomplete { stats: s })) => {
                        status = s.status;
                        stats.absorb(&s);
                        remaining.push(p.clone());
                    }
                    Err(e) => return Err(e),
                }
            } else {
                remaining.push(p.clone());
            }
        }
    }

    let full: Vec<usize> = (0..g.n()).collect();
    let proper_everywhere = rows.iter().all(|r| r.set != full);
    let mut co_singletons = Vec::new();
    for a in 0..g.n() {
        let target: Vec<usize> = (0..g.n()).filter(|&v| v != a).collect();
        if let Some(row) = rows.iter().find(|r| r.set == target) {
            co_singletons.push(CoSingleton {
                missing: a,
                pinning: row.pinning.clone(),
            });
        }
    }
    let valid = status.is_complete()
        && proper_everywhere
        && co_singletons.len() == g.n()
        && remaining.is_empty();
    stats.status = status;
    Ok(UniformGadgetCertificate {
        digraph: g.clone(),
        gadget: gadget.clone(),
        rows,
        co_singletons_found: co_singletons,
        proper_everywhere,
        valid,
        status,
        remaining_pinnings: remaining,
        stats,
    })
}

/// Families with a built-in gadget.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BuiltinGadgetFamily {
    /// Directed cycle of the given girth: a directed path of length
    /// `girth - 2` from the pin to the output.
    DirectedCycle { girth: usize },
    /// Symmetric cycle of even girth `2m`: a symmetric path of length
    /// `m - 1`.
    SymmetricEvenCycle { girth: usize },
    /// Crown on `size` vertices: two alternating paths of length `size/2`
    /// glued at both endpoints, orientation variant chosen by validation.
    Crown { size: usize },
    /// The 4-cycle with orientation word `+s+s`: a directed 4-cycle with the
    /// output antipodal to the pin.
    Mixed4Cycle,
    /// Complete graph on `size` vertices minus a perfect matching: a single
    /// symmetric edge.
    CompleteMinusMatching { size: usize },
    /// Complete graph on `size` vertices minus a directed Hamiltonian
    /// cycle: a single directed edge.
    CompleteMinusHamiltonian { size: usize },
}

impl BuiltinGadgetFamily {
    /// The digraph the gadget certifies.
    pub fn target(&self) -> Result<Digraph, GadgetError> {
        Ok(match *self {
            BuiltinGadgetFamily::DirectedCycle { girth } => families::directed_cycle(girth)?,
            BuiltinGadgetFamily::SymmetricEvenCycle { girth } => {
                if girth % 2 != 0 {
                    return Err(GadgetError::BadFamily(format!(
                        "symmetric even cycle needs even girth, got {girth}"
                    )));
                }
                families::symmetric_cycle(girth)?
            }
            BuiltinGadgetFamily::Crown { size } => families::crown(size)?,
            BuiltinGadgetFamily::Mixed4Cycle => families::mixed_4_cycle(),
            BuiltinGadgetFamily::CompleteMinusMatching { size } => {
                families::complete_minus_matching(size)?
            }
            BuiltinGadgetFamily::CompleteMinusHamiltonian { size } => {
                families::complete_minus_hamiltonian(size)?
            }
        })
    }
}

fn alternating_word(first: EdgeOrientation, len: usize) -> OrientationWord {
    let slots: Vec<EdgeOrientation> = (0..len)
        .map(|i| {
            let fwd = matches!(first, EdgeOrientation::Forward);
            if (i % 2 == 0) == fwd {
                EdgeOrientation::Forward
            } else {
                EdgeOrientation::Backward
            }
        })
        .collect();
    OrientationWord::new(slots).unwrap()
}

/// Two paths of length `m` glued at their start `x = 0` and their end
/// `u = m`; the first runs through vertices `1..m-1`, the second through
/// `m+1..2m-1`.
fn crown_gadget_graph(m: usize, p_word: &OrientationWord, q_word: &OrientationWord) -> Digraph {
    let n = 2 * m;
    let mut arcs = Vec::new();
    let p_vertex = |i: usize| if i == m { m } else if i == 0 { 0 } else { i };
    let q_vertex = |i: usize| {
        if i == 0 {
            0
        } else if i == m {
            m
        } else {
            m + i
        }
    };
    for (i, &o) in p_word.slots().iter().enumerate() {
        let (lo, hi) = (p_vertex(i), p_vertex(i + 1));
        match o {
            EdgeOrientation::Forward => arcs.push((lo, hi)),
            EdgeOrientation::Backward => arcs.push((hi, lo)),
            EdgeOrientation::Both => {
                arcs.push((lo, hi));
                arcs.push((hi, lo));
            }
        }
    }
    for (i, &o) in q_word.slots().iter().enumerate() {
        let (lo, hi) = (q_vertex(i), q_vertex(i + 1));
        match o {
            EdgeOrientation::Forward => arcs.push((lo, hi)),
            EdgeOrientation::Backward => arcs.push((hi, lo)),
            EdgeOrientation::Both => {
                arcs.push((lo, hi));
                arcs.push((hi, lo));
            }
        }
    }
    Digraph::new(n, &arcs).unwrap()
}

/// Builds the built-in gadget for a family. The crown builder tries the four
/// start-orientation variants of its two alternating paths and returns the
/// first whose certificate validates, recording the choice in the
/// description.
pub fn builtin_gadget(family: BuiltinGadgetFamily) -> Result<GadgetSpec, GadgetError> {
    match family {
        BuiltinGadgetFamily::DirectedCycle { girth } => {
            if girth < 3 {
                return Err(GadgetError::BadFamily(format!(
                    "directed cycle needs girth >= 3, got {girth}"
                )));
            }
            let len = girth - 2;
            let word = OrientationWord::uniform(EdgeOrientation::Forward, len)
                .map_err(|_| GadgetError::BadFamily("girth 2 has no path gadget".into()))?;
            let graph = families::path(&word)?;
            GadgetSpec::new(
                graph,
                vec![0],
                len,
                format!("directed path of length {len}"),
            )
        }
        BuiltinGadgetFamily::SymmetricEvenCycle { girth } => {
            if girth < 4 || girth % 2 != 0 {
                return Err(GadgetError::BadFamily(format!(
                    "symmetric even cycle needs even girth >= 4, got {girth}"
                )));
            }
            let len = girth / 2 - 1;
            let word = OrientationWord::uniform(EdgeOrientation::Both, len).unwrap();
            let graph = families::path(&word)?;
            GadgetSpec::new(
                graph,
                vec![0],
                len,
                format!("symmetric path of length {len}"),
            )
        }
        BuiltinGadgetFamily::Crown { size } => {
            if size < 4 || size % 2 != 0 {
                return Err(GadgetError::BadFamily(format!(
                    "crown needs an even size >= 4, got {size}"
                )));
            }
            let m = size / 2;
            let target = families::crown(size)?;
            let variants = [
                (EdgeOrientation::Forward, EdgeOrientation::Backward),
                (EdgeOrientation::Backward, EdgeOrientation::Forward),
                (EdgeOrientation::Forward, EdgeOrientation::Forward),
                (EdgeOrientation::Backward, EdgeOrientation::Backward),
            ];
            for (p_first, q_first) in variants {
                let p_word = alternating_word(p_first, m);
                let q_word = alternating_word(q_first, m);
                let graph = crown_gadget_graph(m, &p_word, &q_word);
                let spec = GadgetSpec::new(
                    graph,
                    vec![0],
                    m,
                    format!("glued alternating paths P={p_word} Q={q_word}"),
                )?;
                let cert =
                    verify_uniform_gadget(&target, &spec, &SearchBudget::default(), 1)?;
                if cert.valid {
                    return Ok(spec);
                }
            }
            Err(GadgetError::NoValidCrownVariant)
        }
        BuiltinGadgetFamily::Mixed4Cycle => {
            let graph = families::directed_cycle(4)?;
            GadgetSpec::new(graph, vec![0], 2, "directed 4-cycle, output antipodal")
        }
        BuiltinGadgetFamily::CompleteMinusMatching { size } => {
            if size < 4 || size % 2 != 0 {
                return Err(GadgetError::BadFamily(format!(
                    "matching family needs an even size >= 4, got {size}"
                )));
            }
            let word = OrientationWord::uniform(EdgeOrientation::Both, 1).unwrap();
            GadgetSpec::new(families::path(&word)?, vec![0], 1, "symmetric edge")
        }
        BuiltinGadgetFamily::CompleteMinusHamiltonian { size } => {
            if size < 3 {
                return Err(GadgetError::BadFamily(format!(
                    "hamiltonian family needs size >= 3, got {size}"
                )));
            }
            let word = OrientationWord::uniform(EdgeOrientation::Forward, 1).unwrap();
            GadgetSpec::new(families::path(&word)?, vec![0], 1, "directed edge")
        }
    }
}

/// Glues `copies` disjoint copies of the gadget by identifying their pin
/// vertices. Shared pins take indices `0..t`; the outputs of the copies are
/// returned in copy order.
pub fn glued_gadget(
    gadget: &GadgetSpec,
    copies: usize,
) -> Result<(Digraph, Vec<usize>), GadgetError> {
    if copies < 2 {
        return Err(GadgetError::TooFewCopies);
    }
    let t = gadget.pins.len();
    let k_n = gadget.graph.n();
    let others: Vec<usize> = (0..k_n).filter(|v| !gadget.pins.contains(v)).collect();
    let per_copy = others.len();
    let total = t + copies * per_copy;
    // Vertex translation for copy c.
    let translate = |c: usize, v: usize| -> usize {
        if let Some(pin_idx) = gadget.pins.iter().position(|&p| p == v) {
            pin_idx
        } else {
            let other_idx = others.iter().position(|&o| o == v).unwrap();
            t + c * per_copy + other_idx
        }
    };
    let mut arcs = Vec::new();
    for c in 0..copies {
        for (u, v) in gadget.graph.non_loop_arcs() {
            arcs.push((translate(c, u), translate(c, v)));
        }
    }
    let graph = Digraph::new(total, &arcs).unwrap();
    let outputs = (0..copies).map(|c| translate(c, gadget.output)).collect();
    Ok((graph, outputs))
}

/// Independent cross-check for targets with at most 4 vertices: glues `|G|`
/// copies of the gadget, enumerates every homomorphism of the glued
/// structure into `g`, collects the output tuples, and compares the set with
/// the missing-value relation.
pub fn direct_theta_check(
    g: &Digraph,
    gadget: &GadgetSpec,
    budget: &SearchBudget,
) -> Result<bool, GadgetError> {
    if g.n() > 4 {
        return Err(GadgetError::DirectCheckGuard(g.n()));
    }
    let (glued, outputs) = glued_gadget(gadget, g.n())?;
    let mut tuples: BTreeSet<Vec<usize>> = BTreeSet::new();
    let stats = hom::enumerate_homs(&glued, g, &Pinning::empty(), budget, |h| {
        tuples.insert(outputs.iter().map(|&u| h[u]).collect());
        ControlFlow::Continue(())
    })?;
    if !stats.status.is_complete() {
        return Err(GadgetError::Hom(HomError::Incomplete { stats }));
    }
    let theta = slupecki_relation(g.n())?;
    let got: Vec<Vec<usize>> = tuples.into_iter().collect();
    Ok(got == theta.tuples())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b() -> SearchBudget {
        SearchBudget::default()
    }

    #[test]
    fn directed_cycle_pp_sets() {
        let g = families::directed_cycle(5).unwrap();
        let gadget = builtin_gadget(BuiltinGadgetFamily::DirectedCycle { girth: 5 }).unwrap();
        // Pinning the start to 2 reaches everything except 1.
        let set = pp_defined_set(&g, &gadget, &[2], &b()).unwrap();
        assert_eq!(set, vec![0, 2, 3, 4]);
    }

    #[test]
    fn symmetric_cycle_pp_sets() {
        let g = families::symmetric_cycle(6).unwrap();
        let gadget = builtin_gadget(BuiltinGadgetFamily::SymmetricEvenCycle { girth: 6 }).unwrap();
        let set = pp_defined_set(&g, &gadget, &[0], &b()).unwrap();
        assert_eq!(set, vec![0, 1, 2, 4, 5], "everything but the antipode");
    }

    #[test]
    fn crown_pp_sets() {
        let g = families::crown(6).unwrap();
        let gadget = builtin_gadget(BuiltinGadgetFamily::Crown { size: 6 }).unwrap();
        let set = pp_defined_set(&g, &gadget, &[0], &b()).unwrap();
        assert_eq!(set, vec![0, 1, 2, 4, 5], "everything but the antipode");
    }

    #[test]
    fn matching_family_certificate_is_valid() {
        let fam = BuiltinGadgetFamily::CompleteMinusMatching { size: 6 };
        let g = fam.target().unwrap();
        let gadget = builtin_gadget(fam).unwrap();
        let cert = verify_uniform_gadget(&g, &gadget, &b(), 1).unwrap();
        assert!(cert.valid);
        assert!(cert.proper_everywhere);
        assert_eq!(cert.co_singletons_found.len(), 6);
    }

    #[test]
    fn hamiltonian_family_certificate_is_valid() {
        let fam = BuiltinGadgetFamily::CompleteMinusHamiltonian { size: 4 };
        let g = fam.target().unwrap();
        let gadget = builtin_gadget(fam).unwrap();
        let cert = verify_uniform_gadget(&g, &gadget, &b(), 1).unwrap();
        assert!(cert.valid);
        // Pinning x to i leaves exactly i+1 unreachable.
        for row in &cert.rows {
            let a = (row.pinning[0] + 1) % 4;
            let expect: Vec<usize> = (0..4).filter(|&v| v != a).collect();
            assert_eq!(row.set, expect);
        }
    }

    #[test]
    fn mixed_cycle_certificate_is_valid() {
        let fam = BuiltinGadgetFamily::Mixed4Cycle;
        let g = fam.target().unwrap();
        let gadget = builtin_gadget(fam).unwrap();
        let cert = verify_uniform_gadget(&g, &gadget, &b(), 1).unwrap();
        assert!(cert.valid);
    }

    #[test]
    fn glued_gadget_shapes() {
        let edge = builtin_gadget(BuiltinGadgetFamily::CompleteMinusMatching { size: 4 }).unwrap();
        let (glued, outputs) = glued_gadget(&edge, 4).unwrap();
        assert_eq!(glued.n(), 5, "one shared pin plus four outputs");
        assert_eq!(outputs.len(), 4);
        let mut distinct = outputs.clone();
        distinct.dedup();
        assert_eq!(distinct.len(), 4);
        assert!(glued_gadget(&edge, 1).is_err());
    }

    #[test]
    fn direct_check_agrees_on_small_targets() {
        let fam = BuiltinGadgetFamily::Mixed4Cycle;
        assert!(direct_theta_check(&fam.target().unwrap(), &builtin_gadget(fam).unwrap(), &b())
            .unwrap());
        let fam = BuiltinGadgetFamily::CompleteMinusMatching { size: 4 };
        assert!(direct_theta_check(&fam.target().unwrap(), &builtin_gadget(fam).unwrap(), &b())
            .unwrap());
    }

    #[test]
    fn wrong_gadget_fails_direct_check() {
        // A path one edge short cannot exclude any vertex of the directed
        // 4-cycle pattern.
        let g = families::directed_cycle(4).unwrap();
        let word = OrientationWord::uniform(EdgeOrientation::Forward, 1).unwrap();
        let gadget = GadgetSpec::new(families::path(&word).unwrap(), vec![0], 1, "too short")
            .unwrap();
        assert!(!direct_theta_check(&g, &gadget, &b()).unwrap());
        let cert = verify_uniform_gadget(&g, &gadget, &b(), 1).unwrap();
        assert!(!cert.valid);
    }

    #[test]
    fn pin_relaxation_grows_the_set() {
        // Same gadget graph with one pin versus two pins.
        let g = families::symmetric_cycle(5).unwrap();
        let word: OrientationWord = "ss".parse().unwrap();
        let graph = families::path(&word).unwrap();
        let two_pins = GadgetSpec::new(graph.clone(), vec![0, 1], 2, "pinned midpoint").unwrap();
        let one_pin = GadgetSpec::new(graph, vec![0], 2, "free midpoint").unwrap();
        for a in 0..5 {
            for mid in 0..5 {
                if let Ok(strict) = pp_defined_set(&g, &two_pins, &[a, mid], &b()) {
                    let relaxed = pp_defined_set(&g, &one_pin, &[a], &b()).unwrap();
                    assert!(strict.iter().all(|v| relaxed.contains(v)));
                }
            }
        }
    }
}
