//! Operation tables over a finite base, their classification (projections,
//! essentially unary operations, essential operations), the relation of
//! tuples missing a value together with its preservation check, exhaustive
//! deciders for the k-ary surjective/idempotent triviality properties, the
//! embedding condition for onto polymorphisms, and two verified binary
//! witness constructions.

use crate::budget::{BudgetStatus, SearchBudget, SearchStats};
use crate::digraph::{tuple_from_index, tuple_index, Digraph, DigraphError};
use crate::hom::hom_arc;
use crate::search::{SearchControl, Searcher, VarOrder};
use crate::{families, topology};
use rayon::prelude::*;
use serde::Serialize;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PolyError {
    #[error("table has {got} entries; expected {expected}")]
    BadTableLength { expected: usize, got: usize },
    #[error("table value {0} out of range for base {1}")]
    ValueOutOfRange(usize, usize),
    #[error("operation arity must be at least 1")]
    ZeroArity,
    #[error("operation base {0} does not match digraph size {1}")]
    BaseMismatch(usize, usize),
    #[error("relation base {0} does not match operation base {1}")]
    RelationBaseMismatch(usize, usize),
    #[error("property arity must be at least 2 (got {0})")]
    ArityTooSmall(usize),
    #[error("base {0} too large to materialise the missing-value relation")]
    RelationTooLarge(usize),
    #[error("base must be at least 2 (got {0})")]
    BaseTooSmall(usize),
    #[error("digraph has {0} vertices; deciders support at most 64")]
    TooManyVertices(usize),
    #[error("operation is not a polymorphism of the digraph")]
    NotAPolymorphism,
    #[error("operation is not surjective")]
    NotSurjective,
    #[error("construction refused: {0}")]
    Refused(String),
    #[error("constructed witness failed its own verification")]
    WitnessVerificationFailed,
    #[error(transparent)]
    Digraph(#[from] DigraphError),
}

/// A `k`-ary operation on `[0, base)` stored as a value table of length
/// `base^k` in mixed-radix tuple order (first argument most significant).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct OperationTable {
    base: usize,
    arity: usize,
    values: Vec<usize>,
}

impl std::fmt::Debug for OperationTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Op(base={}, k={}, {:?})", self.base, self.arity, self.values)
    }
}

impl OperationTable {
    pub fn new(base: usize, arity: usize, values: Vec<usize>) -> Result<Self, PolyError> {
        if arity == 0 {
            return Err(PolyError::ZeroArity);
        }
        let expected = base
            .checked_pow(arity as u32)
            .ok_or(PolyError::BadTableLength {
                expected: usize::MAX,
                got: values.len(),
            })?;
        if values.len() != expected {
            return Err(PolyError::BadTableLength {
                expected,
                got: values.len(),
            });
        }
        for &v in &values {
            if v >= base {
                return Err(PolyError::ValueOutOfRange(v, base));
            }
        }
        Ok(OperationTable {
            base,
            arity,
            values,
        })
    }

    pub fn from_fn(
        base: usize,
        arity: usize,
        mut f: impl FnMut(&[usize]) -> usize,
    ) -> Result<Self, PolyError> {
        if arity == 0 {
            return Err(PolyError::ZeroArity);
        }
        let size = base.pow(arity as u32);
        let mut values = Vec::with_capacity(size);
        crate::digraph::for_each_tuple(base, arity, |coords| values.push(f(coords)));
        OperationTable::new(base, arity, values)
    }

    pub fn projection(base: usize, arity: usize, coord: usize) -> Self {
        OperationTable::from_fn(base, arity, |coords| coords[coord]).unwrap()
    }

    pub fn identity(base: usize) -> Self {
        OperationTable::projection(base, 1, 0)
    }

    pub fn constant(base: usize, arity: usize, value: usize) -> Self {
        OperationTable::from_fn(base, arity, |_| value).unwrap()
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn eval(&self, coords: &[usize]) -> usize {
        debug_assert_eq!(coords.len(), self.arity);
        self.values[tuple_index(coords, self.base)]
    }

    pub fn image_mask(&self) -> u64 {
        debug_assert!(self.base <= 64);
        self.values.iter().fold(0u64, |m, &v| m | 1 << v)
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.base];
        for &v in &self.values {
            hit[v] = true;
        }
        hit.iter().all(|&b| b)
    }

    pub fn is_idempotent(&self) -> bool {
        (0..self.base).all(|v| self.eval(&vec![v; self.arity]) == v)
    }
}

/// How an operation uses its arguments.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperationKind {
    /// `f(x_1, ..., x_k) = x_{coord}`.
    Projection { coord: usize },
    /// `f(x_1, ..., x_k) = inner(x_{coord})` for a unary `inner`.
    EssentiallyUnary { coord: usize, inner: OperationTable },
    /// At least two essential coordinates.
    Essential,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub surjective: bool,
    pub idempotent: bool,
    /// Coordinates where two tuples differing only there can differ in value.
    pub essential_coords: Vec<usize>,
    pub kind: OperationKind,
}

/// Classifies a table by scanning for essential coordinates and, when at
/// most one is essential, recovering and validating the inner unary map.
pub fn classify(f: &OperationTable) -> Classification {
    let n = f.base();
    let k = f.arity();
    let mut essential = Vec::new();
    'coords: for i in 0..k {
        let stride = n.pow((k - 1 - i) as u32);
        for idx in 0..f.values.len() {
            if (idx / stride) % n != 0 {
                continue;
            }
            let v0 = f.values[idx];
            for step in 1..n {
                if f.values[idx + step * stride] != v0 {
                    essential.push(i);
                    continue 'coords;
                }
            }
        }
    }
    let kind = if essential.len() >= 2 {
        OperationKind::Essential
    } else {
        let coord = essential.first().copied().unwrap_or(0);
        let stride = n.pow((k - 1 - coord) as u32);
        let inner_values: Vec<usize> = (0..n).map(|v| f.values[v * stride]).collect();
        let inner = OperationTable::new(n, 1, inner_values).unwrap();
        if cfg!(debug_assertions) {
            let consistent = (0..f.values.len()).all(|idx| {
                let coords = tuple_from_index(idx, n, k);
                f.values[idx] == inner.values[coords[coord]]
            });
            debug_assert!(consistent, "at most one essential coordinate");
        }
        if inner.values.iter().enumerate().all(|(v, &w)| v == w) {
            OperationKind::Projection { coord }
        } else {
            OperationKind::EssentiallyUnary { coord, inner }
        }
    };
    Classification {
        surjective: f.is_surjective(),
        idempotent: f.is_idempotent(),
        essential_coords: essential,
        kind,
    }
}

/// True iff `f` preserves every arc of the `k`-th power of `g`, checked
/// componentwise over all tuples of arcs (loops included).
pub fn is_polymorphism(g: &Digraph, f: &OperationTable) -> Result<bool, PolyError> {
    if f.base() != g.n() {
        return Err(PolyError::BaseMismatch(f.base(), g.n()));
    }
    let arcs = g.arcs();
    let k = f.arity();
    let mut sel = vec![0usize; k];
    let mut u = vec![0usize; k];
    let mut v = vec![0usize; k];
    loop {
        for i in 0..k {
            let (a, b) = arcs[sel[i]];
            u[i] = a;
            v[i] = b;
        }
        if !g.arc(f.eval(&u), f.eval(&v)) {
            return Ok(false);
        }
        let mut slot = k;
        loop {
            if slot == 0 {
                return Ok(true);
            }
            slot -= 1;
            sel[slot] += 1;
            if sel[slot] < arcs.len() {
                break;
            }
            sel[slot] = 0;
        }
    }
}

/// A finite relation: a deduplicated, sorted set of `arity`-tuples over
/// `[0, base)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Relation {
    base: usize,
    arity: usize,
    tuples: Vec<Vec<usize>>,
}

impl Relation {
    pub fn new(base: usize, arity: usize, mut tuples: Vec<Vec<usize>>) -> Result<Self, PolyError> {
        for t in &tuples {
            if t.len() != arity {
                return Err(PolyError::BadTableLength {
                    expected: arity,
                    got: t.len(),
                });
            }
            for &v in t {
                if v >= base {
                    return Err(PolyError::ValueOutOfRange(v, base));
                }
            }
        }
        tuples.sort();
        tuples.dedup();
        Ok(Relation {
            base,
            arity,
            tuples,
        })
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn tuples(&self) -> &[Vec<usize>] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, t: &[usize]) -> bool {
        self.tuples.binary_search_by(|probe| probe.as_slice().cmp(t)).is_ok()
    }
}

/// The `n`-ary relation of all tuples over `[0, n)` with fewer than `n`
/// distinct entries (`n^n - n!` tuples). Materialisation is capped at base 8.
pub fn slupecki_relation(n: usize) -> Result<Relation, PolyError> {
    if n < 2 {
        return Err(PolyError::BaseTooSmall(n));
    }
    if n > 8 {
        return Err(PolyError::RelationTooLarge(n));
    }
    let mut tuples = Vec::new();
    crate::digraph::for_each_tuple(n, n, |coords| {
        let mut mask = 0u64;
        for &c in coords {
            mask |= 1 << c;
        }
        if (mask.count_ones() as usize) < n {
            tuples.push(coords.to_vec());
        }
    });
    Relation::new(n, n, tuples)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PreservationMode {
    /// All `|R|^k` column selections enumerated.
    Exhaustive,
    /// Backtracking construction of a single violating matrix (missing-value
    /// relation only).
    ViolationSearch,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum PreservationOutcome {
    Preserves,
    /// Columns are tuples of the relation; applying the operation to the
    /// rows of the column matrix yields `result`, which is outside it.
    Violates {
        columns: Vec<Vec<usize>>,
        result: Vec<usize>,
    },
    /// Budget exhausted before a definite answer.
    Unknown,
}

#[derive(Clone, Debug, Serialize)]
pub struct PreservationReport {
    pub mode: PreservationMode,
    #[serde(flatten)]
    pub outcome: PreservationOutcome,
    pub stats: SearchStats,
}

const EXHAUSTIVE_SELECTION_LIMIT: u64 = 20_000_000;

/// Decides whether `f` preserves `r`. Selections are enumerated exhaustively
/// up to a size threshold; above it, when `r` is the missing-value relation,
/// the check switches to a direct search for one violating matrix. Budget
/// exhaustion yields `Unknown`, never a false claim.
pub fn preserves_relation(
    f: &OperationTable,
    r: &Relation,
    budget: &SearchBudget,
) -> Result<PreservationReport, PolyError> {
    if f.base() != r.base() {
        return Err(PolyError::RelationBaseMismatch(r.base(), f.base()));
    }
    let selections = (r.len() as u64).checked_pow(f.arity() as u32);
    let small = selections.map_or(false, |s| s <= EXHAUSTIVE_SELECTION_LIMIT);
    if small {
        return Ok(preserves_exhaustive(f, r, budget));
    }
    let is_missing_value =
        r.arity() == r.base() && *r == slupecki_relation(r.base())?;
    if is_missing_value {
        return Ok(theta_violation_search(f, budget));
    }
    Ok(preserves_exhaustive(f, r, budget))
}

fn preserves_exhaustive(
    f: &OperationTable,
    r: &Relation,
    budget: &SearchBudget,
) -> PreservationReport {
    let start = Instant::now();
    let mut stats = SearchStats::new();
    let p = f.arity();
    let rows = r.arity();
    // Membership bitset indexed by the mixed-radix encoding of a tuple,
    // falling back to binary search when the index space is too large.
    let member: Option<Vec<bool>> = r
        .base()
        .checked_pow(rows as u32)
        .filter(|&total| total <= 1 << 24)
        .map(|total| {
            let mut bits = vec![false; total];
            for t in r.tuples() {
                bits[tuple_index(t, r.base())] = true;
            }
            bits
        });
    let contains = |t: &[usize]| match &member {
        Some(bits) => bits[tuple_index(t, r.base())],
        None => r.contains(t),
    };
    let deadline = budget.timeout.map(|t| start + t);
    let mut sel = vec![0usize; p];
    let mut row = vec![0usize; p];
    let mut result = vec![0usize; rows];
    if r.is_empty() {
        stats.elapsed = start.elapsed();
        return PreservationReport {
            mode: PreservationMode::Exhaustive,
            outcome: PreservationOutcome::Preserves,
            stats,
        };
    }
    loop {
        stats.nodes += 1;
        if stats.nodes > budget.max_nodes
            || (stats.nodes % 8192 == 0
                && deadline.map_or(false, |d| Instant::now() > d))
        {
            stats.status = if stats.nodes > budget.max_nodes {
                BudgetStatus::NodeBudgetExceeded
            } else {
                BudgetStatus::TimedOut
            };
            stats.elapsed = start.elapsed();
            return PreservationReport {
                mode: PreservationMode::Exhaustive,
                outcome: PreservationOutcome::Unknown,
                stats,
            };
        }
        for i in 0..rows {
            for (j, &s) in sel.iter().enumerate() {
                row[j] = r.tuples()[s][i];
            }
            result[i] = f.eval(&row);
        }
        if !contains(&result) {
            let columns: Vec<Vec<usize>> = sel.iter().map(|&s| r.tuples()[s].clone()).collect();
            stats.elapsed = start.elapsed();
            return PreservationReport {
                mode: PreservationMode::Exhaustive,
                outcome: PreservationOutcome::Violates {
                    columns,
                    result: result.clone(),
                },
                stats,
            };
        }
        let mut slot = p;
        loop {
            if slot == 0 {
                stats.elapsed = start.elapsed();
                return PreservationReport {
                    mode: PreservationMode::Exhaustive,
                    outcome: PreservationOutcome::Preserves,
                    stats,
                };
            }
            slot -= 1;
            sel[slot] += 1;
            if sel[slot] < r.len() {
                break;
            }
            sel[slot] = 0;
        }
    }
}

/// Searches for a matrix whose columns each repeat a value while the
/// row-application of `f` is a permutation of the base. Exhausting the
/// search space proves preservation.
fn theta_violation_search(f: &OperationTable, budget: &SearchBudget) -> PreservationReport {
    let start = Instant::now();
    let mut stats = SearchStats::new();
    let n = f.base();
    let p = f.arity();
    let mut preimages: Vec<Vec<Vec<usize>>> = vec![Vec::new(); n];
    crate::digraph::for_each_tuple(n, p, |coords| {
        preimages[f.eval(coords)].push(coords.to_vec());
    });
    // A violating result row must be a permutation, so a value with no
    // preimage settles the question immediately.
    if preimages.iter().any(|pre| pre.is_empty()) {
        stats.elapsed = start.elapsed();
        return PreservationReport {
            mode: PreservationMode::ViolationSearch,
            outcome: PreservationOutcome::Preserves,
            stats,
        };
    }
    struct Ctx<'a> {
        n: usize,
        p: usize,
        preimages: &'a [Vec<Vec<usize>>],
        rows: Vec<&'a [usize]>,
        row_values: Vec<usize>,
        used: u64,
        col_seen: Vec<u64>,
        col_repeat: Vec<bool>,
        stats: &'a mut SearchStats,
        max_nodes: u64,
        deadline: Option<Instant>,
    }

    fn dfs(ctx: &mut Ctx<'_>) -> Option<()> {
        if ctx.rows.len() == ctx.n {
            if ctx.col_repeat.iter().all(|&r| r) {
                return Some(());
            }
            return None;
        }
        for v in 0..ctx.n {
            if ctx.used >> v & 1 == 1 {
                continue;
            }
            for tuple in &ctx.preimages[v] {
                ctx.stats.nodes += 1;
                if ctx.stats.nodes > ctx.max_nodes {
                    ctx.stats.status = BudgetStatus::NodeBudgetExceeded;
                    return None;
                }
                if ctx.stats.nodes % 4096 == 0 {
                    if let Some(d) = ctx.deadline {
                        if Instant::now() > d {
                            ctx.stats.status = BudgetStatus::TimedOut;
                            return None;
                        }
                    }
                }
                let saved_seen = ctx.col_seen.clone();
                let saved_repeat = ctx.col_repeat.clone();
                for j in 0..ctx.p {
                    let bit = 1u64 << tuple[j];
                    if ctx.col_seen[j] & bit != 0 {
                        ctx.col_repeat[j] = true;
                    }
                    ctx.col_seen[j] |= bit;
                }
                ctx.rows.push(tuple);
                ctx.row_values.push(v);
                ctx.used |= 1 << v;
                let hit = dfs(ctx);
                if hit.is_some() || !ctx.stats.status.is_complete() {
                    return hit;
                }
                ctx.rows.pop();
                ctx.row_values.pop();
                ctx.used &= !(1 << v);
                ctx.col_seen = saved_seen;
                ctx.col_repeat = saved_repeat;
            }
        }
        None
    }

    let mut ctx = Ctx {
        n,
        p,
        preimages: &preimages,
        rows: Vec::new(),
        row_values: Vec::new(),
        used: 0,
        col_seen: vec![0; p],
        col_repeat: vec![false; p],
        stats: &mut stats,
        max_nodes: budget.max_nodes,
        deadline: budget.timeout.map(|t| start + t),
    };
    let hit: Option<(Vec<Vec<usize>>, Vec<usize>)> = dfs(&mut ctx).map(|()| {
        let columns: Vec<Vec<usize>> = (0..p)
            .map(|j| ctx.rows.iter().map(|row| row[j]).collect())
            .collect();
        (columns, ctx.row_values.clone())
    });
    let outcome = match hit {
        Some((columns, result)) => PreservationOutcome::Violates { columns, result },
        None if stats.status.is_complete() => PreservationOutcome::Preserves,
        None => PreservationOutcome::Unknown,
    };
    stats.elapsed = start.elapsed();
    PreservationReport {
        mode: PreservationMode::ViolationSearch,
        outcome,
        stats,
    }
}

/// Decision-procedure identifiers for verdict reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "property", rename_all = "snake_case")]
pub enum Property {
    KSlupecki { k: usize },
    KIdempotentTrivial { k: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct VerdictWitness {
    pub table: OperationTable,
    pub classification: Classification,
}

/// Result of an exhaustive property decision. `holds == None` means the
/// budget ran out; `holds == Some(false)` always carries a witness that has
/// been re-verified from scratch.
#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    #[serde(flatten)]
    pub property: Property,
    pub holds: Option<bool>,
    pub witness: Option<VerdictWitness>,
    /// In deterministic single-threaded runs the witness is the
    /// lexicographically least one; parallel runs may return any witness.
    pub canonical_witness: bool,
    pub stats: SearchStats,
}

/// Worker configuration for the deciders. More than one thread splits the
/// root branching across workers and waives witness canonicality.
#[derive(Clone, Copy, Debug)]
pub struct DeciderOptions {
    pub threads: usize,
}

impl Default for DeciderOptions {
    fn default() -> Self {
        DeciderOptions { threads: 1 }
    }
}

#[derive(Clone, Copy)]
enum WitnessTest {
    SurjectiveEssential,
    NonProjection,
}

/// Exhaustive check that every surjective `k`-ary polymorphism of `g` is
/// essentially unary. Cells of the `k`-th power are filled by backtracking
/// with arc-consistency propagation and surjectivity-feasibility pruning; a
/// completed table is a witness iff it is surjective with at least two
/// essential coordinates.
pub fn k_slupecki(g: &Digraph, k: usize, budget: &SearchBudget) -> Result<Verdict, PolyError> {
    k_slupecki_opts(g, k, budget, &DeciderOptions::default())
}

pub fn k_slupecki_opts(
    g: &Digraph,
    k: usize,
    budget: &SearchBudget,
    opts: &DeciderOptions,
) -> Result<Verdict, PolyError> {
    decide(
        g,
        k,
        Property::KSlupecki { k },
        WitnessTest::SurjectiveEssential,
        budget,
        opts,
    )
}

/// Exhaustive check that every idempotent `k`-ary polymorphism of `g` is a
/// projection; diagonal cells are pinned to their coordinate value.
pub fn k_idempotent_trivial(
    g: &Digraph,
    k: usize,
    budget: &SearchBudget,
) -> Result<Verdict, PolyError> {
    k_idempotent_trivial_opts(g, k, budget, &DeciderOptions::default())
}

pub fn k_idempotent_trivial_opts(
    g: &Digraph,
    k: usize,
    budget: &SearchBudget,
    opts: &DeciderOptions,
) -> Result<Verdict, PolyError> {
    decide(
        g,
        k,
        Property::KIdempotentTrivial { k },
        WitnessTest::NonProjection,
        budget,
        opts,
    )
}

fn decide(
    g: &Digraph,
    k: usize,
    property: Property,
    test: WitnessTest,
    budget: &SearchBudget,
    opts: &DeciderOptions,
) -> Result<Verdict, PolyError> {
    if k < 2 {
        return Err(PolyError::ArityTooSmall(k));
    }
    if g.n() > 64 {
        return Err(PolyError::TooManyVertices(g.n()));
    }
    let n = g.n();
    let power = g.power(k)?;
    let pins: Vec<(usize, usize)> = match test {
        WitnessTest::SurjectiveEssential => Vec::new(),
        WitnessTest::NonProjection => (0..n)
            .map(|v| (tuple_index(&vec![v; k], n), v))
            .collect(),
    };
    let projections: Vec<Vec<u8>> = (0..k)
        .map(|coord| {
            let mut t = Vec::with_capacity(power.n());
            crate::digraph::for_each_tuple(n, k, |coords| t.push(coords[coord] as u8));
            t
        })
        .collect();
    let full_mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let is_witness = move |leaf: &[u8]| -> bool {
        match test {
            WitnessTest::SurjectiveEssential => {
                let mask = leaf.iter().fold(0u64, |m, &v| m | 1 << v);
                mask == full_mask && essential_coord_count(leaf, n, k, 2) >= 2
            }
            WitnessTest::NonProjection => projections.iter().all(|p| p.as_slice() != leaf),
        }
    };

    let mut stats = SearchStats::new();
    let mut witness_leaf: Option<Vec<u8>> = None;
    let mut complete;
    let mut canonical = true;

    if opts.threads > 1 {
        let root = Searcher::new(&power, g, &pins, VarOrder::FailFirst, true, budget);
        let (leaf, par_stats, par_complete) = run_parallel(root, budget, &is_witness);
        stats.absorb(&par_stats);
        witness_leaf = leaf;
        complete = par_complete;
        canonical = false;
    } else {
        let mut searcher = Searcher::new(&power, g, &pins, VarOrder::FailFirst, true, budget);
        let run_stats = searcher.run(&mut |leaf| {
            if is_witness(leaf) {
                witness_leaf = Some(leaf.to_vec());
                SearchControl::Stop
            } else {
                SearchControl::Continue
            }
        });
        complete = run_stats.status.is_complete();
        stats.absorb(&run_stats);
        if witness_leaf.is_some() {
            // Second pass in static order: the first witness of a
            // lexicographic enumeration is the least one.
            let mut canon = Searcher::new(&power, g, &pins, VarOrder::Static, true, budget);
            let mut canon_leaf: Option<Vec<u8>> = None;
            let canon_stats = canon.run(&mut |leaf| {
                if is_witness(leaf) {
                    canon_leaf = Some(leaf.to_vec());
                    SearchControl::Stop
                } else {
                    SearchControl::Continue
                }
            });
            stats.absorb(&canon_stats);
            if let (Some(leaf), true) = (canon_leaf, canon_stats.status.is_complete()) {
                witness_leaf = Some(leaf);
            } else {
                canonical = false;
            }
        }
    }

    if witness_leaf.is_some() {
        // A verified witness is a definite answer even if some pass hit the
        // budget.
        complete = true;
        stats.status = BudgetStatus::Complete;
    }

    let witness = match witness_leaf {
        None => None,
        Some(leaf) => {
            let table =
                OperationTable::new(n, k, leaf.iter().map(|&v| v as usize).collect())?;
            let classification = classify(&table);
            let ok = is_polymorphism(g, &table)?
                && match test {
                    WitnessTest::SurjectiveEssential => {
                        classification.surjective
                            && classification.kind == OperationKind::Essential
                    }
                    WitnessTest::NonProjection => {
                        classification.idempotent
                            && !matches!(classification.kind, OperationKind::Projection { .. })
                    }
                };
            if !ok {
                return Err(PolyError::WitnessVerificationFailed);
            }
            Some(VerdictWitness {
                table,
                classification,
            })
        }
    };

    let holds = if witness.is_some() {
        Some(false)
    } else if complete {
        Some(true)
    } else {
        None
    };
    Ok(Verdict {
        property,
        holds,
        witness,
        canonical_witness: canonical,
        stats,
    })
}

fn run_parallel(
    root: Searcher,
    budget: &SearchBudget,
    is_witness: &(impl Fn(&[u8]) -> bool + Sync),
) -> (Option<Vec<u8>>, SearchStats, bool) {
    let branches = root.root_branches();
    if branches.is_empty() {
        // Root either failed or propagated to a unique assignment.
        let mut s = root;
        let mut leaf_out = None;
        let stats = s.run(&mut |leaf| {
            if is_witness(leaf) {
                leaf_out = Some(leaf.to_vec());
                SearchControl::Stop
            } else {
                SearchControl::Continue
            }
        });
        let complete = stats.status.is_complete();
        return (leaf_out, stats, complete);
    }
    let (cell, values) = &branches[0];
    let shared_nodes = Arc::new(AtomicU64::new(0));
    let stop = Arc::new(AtomicBool::new(false));
    let witness: Mutex<Option<Vec<u8>>> = Mutex::new(None);
    let prunes = AtomicU64::new(0);
    let exhausted = AtomicBool::new(false);
    values.par_iter().for_each(|&v| {
        if stop.load(Ordering::Relaxed) {
            return;
        }
        let mut branch = root.clone();
        branch.share(Arc::clone(&shared_nodes), Arc::clone(&stop));
        if !branch.assign_root(*cell, v) {
            return;
        }
        let st = branch.run(&mut |leaf| {
            if is_witness(leaf) {
                *witness.lock().unwrap() = Some(leaf.to_vec());
                stop.store(true, Ordering::Relaxed);
                SearchControl::Stop
            } else {
                SearchControl::Continue
            }
        });
        prunes.fetch_add(st.prunes, Ordering::Relaxed);
        if !st.status.is_complete() {
            exhausted.store(true, Ordering::Relaxed);
        }
    });
    let leaf = witness.into_inner().unwrap();
    let mut stats = SearchStats::new();
    stats.nodes = shared_nodes.load(Ordering::Relaxed);
    stats.prunes = prunes.load(Ordering::Relaxed);
    let budget_hit = exhausted.load(Ordering::Relaxed);
    if budget_hit {
        stats.status = if stats.nodes > budget.max_nodes {
            BudgetStatus::NodeBudgetExceeded
        } else {
            BudgetStatus::TimedOut
        };
    }
    let complete = leaf.is_some() || !budget_hit;
    (leaf, stats, complete)
}

/// Counts essential coordinates of a packed table, stopping at `cap`.
fn essential_coord_count(values: &[u8], n: usize, k: usize, cap: usize) -> usize {
    let mut count = 0;
    'coords: for i in 0..k {
        let stride = n.pow((k - 1 - i) as u32);
        for idx in 0..values.len() {
            if (idx / stride) % n != 0 {
                continue;
            }
            let v0 = values[idx];
            for step in 1..n {
                if values[idx + step * stride] != v0 {
                    count += 1;
                    if count >= cap {
                        return count;
                    }
                    continue 'coords;
                }
            }
        }
    }
    count
}

/// Outcome of the embedding-condition search for an onto polymorphism.
#[derive(Clone, Debug, Serialize)]
pub struct EmbeddingSearch {
    /// Lexicographically least induced embedding `e : G -> G^p` with
    /// `f` restricted to the image onto, when one exists.
    pub embedding: Option<Vec<usize>>,
    pub stats: SearchStats,
}

/// Searches for an induced embedding `e` of `g` into its `p`-th power such
/// that the restriction of `f` to the image is onto. `f` must be a
/// surjective polymorphism of arity at least 2. An empty result with a
/// complete status means no such embedding exists.
pub fn embedding_condition(
    g: &Digraph,
    f: &OperationTable,
    budget: &SearchBudget,
) -> Result<EmbeddingSearch, PolyError> {
    if f.arity() < 2 {
        return Err(PolyError::ArityTooSmall(f.arity()));
    }
    if !is_polymorphism(g, f)? {
        return Err(PolyError::NotAPolymorphism);
    }
    if !f.is_surjective() {
        return Err(PolyError::NotSurjective);
    }
    let power = g.power(f.arity())?;
    let n = g.n();
    let start = Instant::now();
    let deadline = budget.timeout.map(|t| start + t);
    let mut stats = SearchStats::new();
    let mut image: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; power.n()];
    let mut value_used = vec![false; n];

    struct Ctx<'a> {
        g: &'a Digraph,
        power: &'a Digraph,
        f: &'a OperationTable,
        stats: &'a mut SearchStats,
        max_nodes: u64,
        deadline: Option<Instant>,
    }

    // Onto a set of size |G| over |G| image points forces injectivity of
    // f on the image, which prunes candidates sharing an f-value.
    fn dfs(
        ctx: &mut Ctx<'_>,
        image: &mut Vec<usize>,
        used: &mut [bool],
        value_used: &mut [bool],
    ) -> bool {
        let x = image.len();
        if x == ctx.g.n() {
            return true;
        }
        'cand: for w in 0..ctx.power.n() {
            if used[w] {
                continue;
            }
            ctx.stats.nodes += 1;
            if ctx.stats.nodes > ctx.max_nodes {
                ctx.stats.status = BudgetStatus::NodeBudgetExceeded;
                return false;
            }
            if ctx.stats.nodes % 4096 == 0 {
                if let Some(d) = ctx.deadline {
                    if Instant::now() > d {
                        ctx.stats.status = BudgetStatus::TimedOut;
                        return false;
                    }
                }
            }
            let fv = ctx.f.values()[w];
            if value_used[fv] {
                ctx.stats.prunes += 1;
                continue;
            }
            for (y, &iy) in image.iter().enumerate() {
                if ctx.g.arc(x, y) != ctx.power.arc(w, iy) || ctx.g.arc(y, x) != ctx.power.arc(iy, w)
                {
                    ctx.stats.prunes += 1;
                    continue 'cand;
                }
            }
            image.push(w);
            used[w] = true;
            value_used[fv] = true;
            if dfs(ctx, image, used, value_used) {
                return true;
            }
            let stop = !ctx.stats.status.is_complete();
            image.pop();
            used[w] = false;
            value_used[fv] = false;
            if stop {
                return false;
            }
        }
        false
    }

    let mut ctx = Ctx {
        g,
        power: &power,
        f,
        stats: &mut stats,
        max_nodes: budget.max_nodes,
        deadline,
    };
    let found = dfs(&mut ctx, &mut image, &mut used, &mut value_used);
    stats.elapsed = start.elapsed();
    Ok(EmbeddingSearch {
        embedding: if found { Some(image) } else { None },
        stats,
    })
}

/// Builds the binary operation `f(x, y) = y` for `x` in an extreme strong
/// component `A` and `f(x, y) = r(y)` otherwise, given an endomorphism
/// `r != id` adjacent to the identity. With `id -> r` the component `A` is
/// taken minimal; with `r -> id`, maximal. The result is re-verified to be a
/// surjective polymorphism of essential arity 2.
pub fn min_component_witness(g: &Digraph, r: &OperationTable) -> Result<OperationTable, PolyError> {
    if r.base() != g.n() {
        return Err(PolyError::BaseMismatch(r.base(), g.n()));
    }
    if r.arity() != 1 {
        return Err(PolyError::Refused(format!(
            "expected a unary endomorphism, got arity {}",
            r.arity()
        )));
    }
    let id: Vec<usize> = (0..g.n()).collect();
    if r.values() == id.as_slice() {
        return Err(PolyError::Refused("r must differ from the identity".into()));
    }
    if !is_polymorphism_unary(g, r.values()) {
        return Err(PolyError::Refused("r is not an endomorphism".into()));
    }
    let strong = g.strong_components();
    if strong.block_count() == 1 {
        return Err(PolyError::Refused(
            "digraph is strongly connected; no extreme proper component exists".into(),
        ));
    }
    let id_to_r = hom_arc(&id, r.values(), g, g);
    let r_to_id = hom_arc(r.values(), &id, g, g);
    let block = if id_to_r {
        strong.minimal_blocks()[0]
    } else if r_to_id {
        strong.maximal_blocks()[0]
    } else {
        return Err(PolyError::Refused(
            "r is not adjacent to the identity in the endomorphism digraph".into(),
        ));
    };
    let in_a: Vec<bool> = (0..g.n()).map(|v| strong.block_of[v] == block).collect();
    let witness = OperationTable::from_fn(g.n(), 2, |xy| {
        if in_a[xy[0]] {
            xy[1]
        } else {
            r.values()[xy[1]]
        }
    })?;
    let c = classify(&witness);
    if !(is_polymorphism(g, &witness)? && c.surjective && c.kind == OperationKind::Essential) {
        return Err(PolyError::WitnessVerificationFailed);
    }
    Ok(witness)
}

fn is_polymorphism_unary(g: &Digraph, f: &[usize]) -> bool {
    g.arcs().iter().all(|&(u, v)| g.arc(f[u], f[v]))
}

/// Builds a binary idempotent non-projection polymorphism from an
/// endomorphism `f != id` adjacent to the identity, for posets, symmetric
/// digraphs and intransitive digraphs. The hypothesis pattern of the
/// matching case must be present; otherwise the construction is refused
/// with the reason.
pub fn neighbor_idempotent_witness(
    g: &Digraph,
    f: &OperationTable,
) -> Result<OperationTable, PolyError> {
    if f.base() != g.n() {
        return Err(PolyError::BaseMismatch(f.base(), g.n()));
    }
    if f.arity() != 1 {
        return Err(PolyError::Refused(format!(
            "expected a unary endomorphism, got arity {}",
            f.arity()
        )));
    }
    let id: Vec<usize> = (0..g.n()).collect();
    if f.values() == id.as_slice() {
        return Err(PolyError::Refused("f must differ from the identity".into()));
    }
    if !is_polymorphism_unary(g, f.values()) {
        return Err(PolyError::Refused("f is not an endomorphism".into()));
    }

    let candidate = if families::is_poset(g) {
        poset_case(g, f)?
    } else if g.is_symmetric() {
        symmetric_case(g, f)?
    } else if topology::is_intransitive(g) {
        intransitive_case(g, f, &id)?
    } else {
        return Err(PolyError::Refused(
            "digraph is neither a poset, symmetric, nor intransitive".into(),
        ));
    };

    let c = classify(&candidate);
    if !(is_polymorphism(g, &candidate)?
        && c.idempotent
        && !matches!(c.kind, OperationKind::Projection { .. }))
    {
        return Err(PolyError::WitnessVerificationFailed);
    }
    Ok(candidate)
}

fn poset_case(g: &Digraph, f: &OperationTable) -> Result<OperationTable, PolyError> {
    let n = g.n();
    let above = (0..n).all(|v| g.arc(v, f.values()[v]));
    let below = (0..n).all(|v| g.arc(f.values()[v], v));
    if !above && !below {
        return Err(PolyError::Refused(
            "f is not pointwise comparable with the identity".into(),
        ));
    }
    let diffs: Vec<usize> = (0..n).filter(|&v| f.values()[v] != v).collect();
    if diffs.len() != 1 {
        return Err(PolyError::Refused(format!(
            "f differs from the identity at {} points; the poset pattern needs exactly one",
            diffs.len()
        )));
    }
    let a = diffs[0];
    let b = f.values()[a];
    if above {
        // b must be the unique upper cover of a: a < c implies b <= c.
        for c in 0..n {
            if c != a && g.arc(a, c) && !g.arc(b, c) {
                return Err(PolyError::Refused(format!(
                    "{b} is not a unique upper cover of {a}"
                )));
            }
        }
        OperationTable::from_fn(n, 2, |xy| {
            if g.arc(xy[0], a) {
                xy[1]
            } else {
                f.values()[xy[1]]
            }
        })
    } else {
        for c in 0..n {
            if c != a && g.arc(c, a) && !g.arc(c, b) {
                return Err(PolyError::Refused(format!(
                    "{b} is not a unique lower cover of {a}"
                )));
            }
        }
        OperationTable::from_fn(n, 2, |xy| {
            if g.arc(a, xy[0]) {
                xy[1]
            } else {
                f.values()[xy[1]]
            }
        })
    }
}

fn symmetric_case(g: &Digraph, f: &OperationTable) -> Result<OperationTable, PolyError> {
    let id: Vec<usize> = (0..g.n()).collect();
    if !hom_arc(&id, f.values(), g, g) {
        return Err(PolyError::Refused(
            "f is not adjacent to the identity in the endomorphism digraph".into(),
        ));
    }
    let fixed = (0..g.n()).find(|&v| f.values()[v] == v);
    let a = match fixed {
        Some(a) => a,
        None => {
            return Err(PolyError::Refused(
                "f has no fixed point; the symmetric pattern needs one".into(),
            ))
        }
    };
    OperationTable::from_fn(g.n(), 2, |xy| {
        if xy[0] == a {
            f.values()[xy[1]]
        } else {
            xy[1]
        }
    })
}

fn intransitive_case(
    g: &Digraph,
    f: &OperationTable,
    id: &[usize],
) -> Result<OperationTable, PolyError> {
    let (graph, fv) = if hom_arc(f.values(), id, g, g) {
        (g.clone(), f.values().to_vec())
    } else if hom_arc(id, f.values(), g, g) {
        // A polymorphism of the reversal is a polymorphism of the digraph.
        (g.reversed(), f.values().to_vec())
    } else {
        return Err(PolyError::Refused(
            "f is not adjacent to the identity in the endomorphism digraph".into(),
        ));
    };
    let n = g.n();
    for x in 0..n {
        for y in 0..n {
            if x == y || !graph.arc(x, y) {
                continue;
            }
            if fv[x] != x || fv[y] != x {
                continue;
            }
            let candidate = OperationTable::from_fn(n, 2, |uv| {
                if uv[1] == y && uv[0] != y {
                    x
                } else {
                    uv[1]
                }
            })?;
            let c = classify(&candidate);
            if is_polymorphism(g, &candidate)?
                && c.idempotent
                && !matches!(c.kind, OperationKind::Projection { .. })
            {
                return Ok(candidate);
            }
        }
    }
    Err(PolyError::Refused(
        "no arc pattern fixed by f admits the intransitive construction".into(),
    ))
}
