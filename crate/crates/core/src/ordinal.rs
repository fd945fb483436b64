//! Three-level ordinal sums of antichains and the combinatorics of their
//! binary surjective polymorphisms: the bound `B(m, k)`, the threshold
//! predicate for binary triviality, explicit ternary and binary witness
//! operations (re-verified after construction), the row/column constancy
//! profile of restriction tables, and a claim-by-claim structural report for
//! binary surjective polymorphisms.

use crate::digraph::Digraph;
use crate::families;
use crate::poly::{classify, is_polymorphism, OperationKind, OperationTable, PolyError};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OrdinalError {
    #[error("level sizes must be at least 2 (got {0})")]
    LevelTooSmall(usize),
    #[error("construction refused: {0}")]
    Refused(String),
    #[error("constructed witness failed its own verification: {0}")]
    VerificationFailed(String),
    #[error("restriction table has base {got}, expected {expected}")]
    RestrictionBase { expected: usize, got: usize },
    #[error("operation must be binary (got arity {0})")]
    NotBinary(usize),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Level of a vertex in a three-level ordinal sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Bottom,
    Middle,
    Top,
}

/// The poset `m (+) n (+) k`: minimal elements `a_0..a_{m-1}`, middle
/// elements `b_0..b_{n-1}`, maximal elements `c_0..c_{k-1}`, numbered level
/// by level from the bottom.
#[derive(Clone, Debug)]
pub struct OrdinalSumPoset {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    graph: Digraph,
}

impl OrdinalSumPoset {
    pub fn new(m: usize, n: usize, k: usize) -> Result<Self, OrdinalError> {
        for lvl in [m, n, k] {
            if lvl < 2 {
                return Err(OrdinalError::LevelTooSmall(lvl));
            }
        }
        let graph = families::ordinal_sum(&[m, n, k]).expect("valid levels");
        debug_assert!(families::is_poset(&graph));
        Ok(OrdinalSumPoset { m, n, k, graph })
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn size(&self) -> usize {
        self.m + self.n + self.k
    }

    pub fn a(&self, i: usize) -> usize {
        debug_assert!(i < self.m);
        i
    }

    pub fn b(&self, i: usize) -> usize {
        debug_assert!(i < self.n);
        self.m + i
    }

    pub fn c(&self, i: usize) -> usize {
        debug_assert!(i < self.k);
        self.m + self.n + i
    }

    pub fn level(&self, v: usize) -> Level {
        if v < self.m {
            Level::Bottom
        } else if v < self.m + self.n {
            Level::Middle
        } else {
            Level::Top
        }
    }

    pub fn le(&self, x: usize, y: usize) -> bool {
        self.graph.arc(x, y)
    }
}

pub type Quadruple = (usize, usize, usize, usize);

/// Maximum of `alpha*gamma + beta*delta` over integers
/// `0 < alpha, beta < m`, `0 < gamma, delta < k` with
/// `(m-alpha)(m-beta) >= m-1` and `(k-gamma)(k-delta) >= k-1`, together with
/// every maximising quadruple in lexicographic order.
pub fn mu(m: usize, k: usize) -> Result<(usize, Vec<Quadruple>), OrdinalError> {
    if m < 2 {
        return Err(OrdinalError::LevelTooSmall(m));
    }
    if k < 2 {
        return Err(OrdinalError::LevelTooSmall(k));
    }
    let mut best = 0usize;
    let mut argmax: Vec<Quadruple> = Vec::new();
    for alpha in 1..m {
        for beta in 1..m {
            if (m - alpha) * (m - beta) < m - 1 {
                continue;
            }
            for gamma in 1..k {
                for delta in 1..k {
                    if (k - gamma) * (k - delta) < k - 1 {
                        continue;
                    }
                    let value = alpha * gamma + beta * delta;
                    if value > best {
                        best = value;
                        argmax.clear();
                    }
                    if value == best {
                        argmax.push((alpha, beta, gamma, delta));
                    }
                }
            }
        }
    }
    argmax.sort_unstable();
    Ok((best, argmax))
}

/// How the bound was attained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum BmkSource {
    /// `B = mk`, realised by a pair of projections.
    Mk,
    /// `B = mu(m, k) >= mk`, with the maximising quadruples.
    Mu { argmax: Vec<Quadruple> },
}

#[derive(Clone, Debug, Serialize)]
pub struct BmkResult {
    pub m: usize,
    pub k: usize,
    pub mu: usize,
    pub b: usize,
    #[serde(flatten)]
    pub source: BmkSource,
}

/// `B(m, k) = max(mu(m, k), mk)`; always in `[mk, 2mk)` and at least 4.
pub fn bmk(m: usize, k: usize) -> Result<BmkResult, OrdinalError> {
    let (mu_value, argmax) = mu(m, k)?;
    let b = mu_value.max(m * k);
    debug_assert!(m * k <= b && b < 2 * m * k && b >= 4);
    let source = if mu_value >= m * k {
        BmkSource::Mu { argmax }
    } else {
        BmkSource::Mk
    };
    Ok(BmkResult {
        m,
        k,
        mu: mu_value,
        b,
        source,
    })
}

/// Whether `m (+) n (+) k` has only essentially unary binary surjective
/// polymorphisms: true iff `n > B(m, k) + 1`.
pub fn two_slupecki_predicate(m: usize, n: usize, k: usize) -> Result<bool, OrdinalError> {
    if n < 2 {
        return Err(OrdinalError::LevelTooSmall(n));
    }
    Ok(n > bmk(m, k)?.b + 1)
}

/// The ternary onto, not essentially unary polymorphism of `m (+) n (+) k`:
/// `s` on the diagonal of the extreme levels, `b_i` at `(a_0, c_0, b_i)`,
/// `a_0` strictly below such a triple, `c_0` strictly above one, `b_0`
/// elsewhere. Re-verified to be well-defined, polymorphic, surjective and of
/// essential arity at least 2.
pub fn ternary_witness(m: usize, n: usize, k: usize) -> Result<OperationTable, OrdinalError> {
    let p = OrdinalSumPoset::new(m, n, k)?;
    let a0 = p.a(0);
    let b0 = p.b(0);
    let c0 = p.c(0);
    let size = p.size();
    let strictly_below = |x: usize, y: usize, z: usize, bi: usize| {
        p.le(x, a0) && p.le(y, c0) && p.le(z, bi) && (x, y, z) != (a0, c0, bi)
    };
    let strictly_above = |x: usize, y: usize, z: usize, bi: usize| {
        p.le(a0, x) && p.le(c0, y) && p.le(bi, z) && (x, y, z) != (a0, c0, bi)
    };
    let mut table = Vec::with_capacity(size * size * size);
    for x in 0..size {
        for y in 0..size {
            for z in 0..size {
                // Values assigned by each matching case; they must agree.
                let mut assigned: Vec<usize> = Vec::new();
                if x == y && y == z && p.level(x) != Level::Middle {
                    assigned.push(x);
                }
                if (x, y) == (a0, c0) && p.level(z) == Level::Middle {
                    assigned.push(z);
                }
                if (0..n).any(|i| strictly_below(x, y, z, p.b(i))) {
                    assigned.push(a0);
                }
                if (0..n).any(|i| strictly_above(x, y, z, p.b(i))) {
                    assigned.push(c0);
                }
                let value = match assigned.first() {
                    None => b0,
                    Some(&v) => {
                        if assigned.iter().any(|&w| w != v) {
                            return Err(OrdinalError::VerificationFailed(format!(
                                "conflicting case values at ({x}, {y}, {z}): {assigned:?}"
                            )));
                        }
                        v
                    }
                };
                table.push(value);
            }
        }
    }
    let f = OperationTable::new(size, 3, table)?;
    let c = classify(&f);
    if !is_polymorphism(p.graph(), &f)? {
        return Err(OrdinalError::VerificationFailed("not a polymorphism".into()));
    }
    if !c.surjective {
        return Err(OrdinalError::VerificationFailed("not surjective".into()));
    }
    if c.essential_coords.len() < 2 {
        return Err(OrdinalError::VerificationFailed(
            "fewer than 2 essential coordinates".into(),
        ));
    }
    Ok(f)
}

/// Row/column constancy profile of restriction tables on the extreme levels:
/// `l(T)` collects the elements whose row is constant (with the constant),
/// `r(T)` those whose column is constant. Vertices are reported in the
/// poset's global numbering.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LrProfile {
    pub l_bottom: Vec<(usize, usize)>,
    pub r_bottom: Vec<(usize, usize)>,
    pub l_top: Vec<(usize, usize)>,
    pub r_top: Vec<(usize, usize)>,
}

impl LrProfile {
    /// The mixed domain `(l(A) x r(C)) U (l(C) x r(A))` in lexicographic
    /// order, bottom-top pairs first.
    pub fn mixed_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for &(s, _) in &self.l_bottom {
            for &(t, _) in &self.r_top {
                out.push((s, t));
            }
        }
        for &(s, _) in &self.l_top {
            for &(t, _) in &self.r_bottom {
                out.push((s, t));
            }
        }
        out
    }
}

fn constancy_profile(table: &OperationTable) -> (Vec<(usize, usize)>, Vec<(usize, usize)>) {
    let size = table.base();
    let mut rows = Vec::new();
    let mut cols = Vec::new();
    for s in 0..size {
        let v0 = table.eval(&[s, 0]);
        if (1..size).all(|x| table.eval(&[s, x]) == v0) {
            rows.push((s, v0));
        }
        let w0 = table.eval(&[0, s]);
        if (1..size).all(|x| table.eval(&[x, s]) == w0) {
            cols.push((s, w0));
        }
    }
    (rows, cols)
}

/// Computes the profile for binary tables `f_bottom` on the minimal level
/// and `f_top` on the maximal level (bases `m` and `k`); results are mapped
/// into the poset's vertex numbering.
pub fn lr_profile(
    p: &OrdinalSumPoset,
    f_bottom: &OperationTable,
    f_top: &OperationTable,
) -> Result<LrProfile, OrdinalError> {
    if f_bottom.base() != p.m {
        return Err(OrdinalError::RestrictionBase {
            expected: p.m,
            got: f_bottom.base(),
        });
    }
    if f_top.base() != p.k {
        return Err(OrdinalError::RestrictionBase {
            expected: p.k,
            got: f_top.base(),
        });
    }
    for t in [f_bottom, f_top] {
        if t.arity() != 2 {
            return Err(OrdinalError::NotBinary(t.arity()));
        }
    }
    let (rows_a, cols_a) = constancy_profile(f_bottom);
    let (rows_c, cols_c) = constancy_profile(f_top);
    let map_a = |(s, v): (usize, usize)| (p.a(s), p.a(v));
    let map_c = |(s, v): (usize, usize)| (p.c(s), p.c(v));
    Ok(LrProfile {
        l_bottom: rows_a.into_iter().map(map_a).collect(),
        r_bottom: cols_a.into_iter().map(map_a).collect(),
        l_top: rows_c.into_iter().map(map_c).collect(),
        r_top: cols_c.into_iter().map(map_c).collect(),
    })
}

/// Extreme-level tables realising exactly `B(m, k)` doubly-constant mixed
/// pairs: a pair of projections when `B = mk`, otherwise block tables from
/// the first maximising quadruple with a cyclic onto map on the free block.
fn extreme_tables(
    m: usize,
    k: usize,
    bound: &BmkResult,
) -> (OperationTable, OperationTable) {
    match &bound.source {
        BmkSource::Mk => (
            OperationTable::projection(m, 2, 0),
            OperationTable::projection(k, 2, 1),
        ),
        BmkSource::Mu { argmax } => {
            let (alpha, beta, gamma, delta) = argmax[0];
            let f_bottom = OperationTable::from_fn(m, 2, |xy| {
                let (i, j) = (xy[0], xy[1]);
                if i < alpha || j < beta {
                    0
                } else {
                    ((i - alpha) * (m - beta) + (j - beta)) % (m - 1) + 1
                }
            })
            .unwrap();
            let f_top = OperationTable::from_fn(k, 2, |xy| {
                let (i, j) = (xy[0], xy[1]);
                if i < delta || j < gamma {
                    0
                } else {
                    ((i - delta) * (k - gamma) + (j - gamma)) % (k - 1) + 1
                }
            })
            .unwrap();
            (f_bottom, f_top)
        }
    }
}

/// The binary onto essentially binary polymorphism of `m (+) n (+) k`,
/// constructible exactly when `n <= B(m, k) + 1`: extreme-level tables from
/// the bound construction, a surjection from the doubly-constant mixed pairs
/// onto the middle level minus `b_0`, constants on the mixed rows/columns of
/// the profile, and `b_0` elsewhere. Re-verified to be a monotone surjective
/// polymorphism of essential arity 2 collapsing the middle square to `b_0`.
pub fn binary_witness(m: usize, n: usize, k: usize) -> Result<OperationTable, OrdinalError> {
    let p = OrdinalSumPoset::new(m, n, k)?;
    let bound = bmk(m, k)?;
    if n > bound.b + 1 {
        return Err(OrdinalError::Refused(format!(
            "no essentially binary onto polymorphism exists for n = {n} > B({m}, {k}) + 1 = {}",
            bound.b + 1
        )));
    }
    let (f_bottom, f_top) = extreme_tables(m, k, &bound);
    let profile = lr_profile(&p, &f_bottom, &f_top)?;
    let mixed = profile.mixed_pairs();
    debug_assert_eq!(mixed.len(), bound.b);
    let b0 = p.b(0);
    // Surjection onto the middle level minus b_0; the domain has B >= n-1
    // entries.
    let h = |position: usize| p.b(position % (n - 1) + 1);
    let mixed_index = |x: usize, y: usize| mixed.iter().position(|&(s, t)| (s, t) == (x, y));
    let l_value = |x: usize| {
        profile
            .l_bottom
            .iter()
            .chain(&profile.l_top)
            .find(|&&(s, _)| s == x)
            .map(|&(_, v)| v)
    };
    let r_value = |y: usize| {
        profile
            .r_bottom
            .iter()
            .chain(&profile.r_top)
            .find(|&&(t, _)| t == y)
            .map(|&(_, v)| v)
    };
    let size = p.size();
    let f = OperationTable::from_fn(size, 2, |xy| {
        let (x, y) = (xy[0], xy[1]);
        match (p.level(x), p.level(y)) {
            (Level::Bottom, Level::Bottom) => p.a(f_bottom.eval(&[x, y])),
            (Level::Top, Level::Top) => {
                p.c(f_top.eval(&[x - p.c(0), y - p.c(0)]))
            }
            _ => {
                if let Some(pos) = mixed_index(x, y) {
                    h(pos)
                } else if p.level(y) == Level::Middle {
                    l_value(x).unwrap_or(b0)
                } else if p.level(x) == Level::Middle {
                    r_value(y).unwrap_or(b0)
                } else {
                    b0
                }
            }
        }
    })?;
    // Re-verify everything the construction promises.
    let c = classify(&f);
    if !is_polymorphism(p.graph(), &f)? {
        return Err(OrdinalError::VerificationFailed("not a polymorphism".into()));
    }
    if !c.surjective {
        return Err(OrdinalError::VerificationFailed("not surjective".into()));
    }
    if c.kind != OperationKind::Essential {
        return Err(OrdinalError::VerificationFailed(
            "not essentially binary".into(),
        ));
    }
    let middle_image: std::collections::BTreeSet<usize> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| f.eval(&[p.b(i), p.b(j)]))
        .collect();
    if middle_image.len() != 1 || !middle_image.contains(&b0) {
        return Err(OrdinalError::VerificationFailed(format!(
            "middle square image {middle_image:?} is not {{b_0}}"
        )));
    }
    Ok(f)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimStatus {
    Pass,
    Fail,
    /// The claim's hypotheses do not apply to this operation.
    NotApplicable,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClaimResult {
    pub name: &'static str,
    pub status: ClaimStatus,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClaimReport {
    pub claims: Vec<ClaimResult>,
}

impl ClaimReport {
    pub fn all_applicable_pass(&self) -> bool {
        self.claims.iter().all(|c| c.status != ClaimStatus::Fail)
    }
}

/// Evaluates the structural claims satisfied by binary surjective
/// polymorphisms of a three-level ordinal sum, claim by claim, on a given
/// operation: a property harness for the structure theory, not a proof.
/// The operation must be a binary surjective polymorphism of the poset.
pub fn verify_binary_claims(
    p: &OrdinalSumPoset,
    f: &OperationTable,
) -> Result<ClaimReport, OrdinalError> {
    if f.arity() != 2 {
        return Err(OrdinalError::NotBinary(f.arity()));
    }
    if !is_polymorphism(p.graph(), f)? {
        return Err(OrdinalError::Refused(
            "claim report requires a polymorphism".into(),
        ));
    }
    if !f.is_surjective() {
        return Err(OrdinalError::Refused(
            "claim report requires a surjective operation".into(),
        ));
    }
    let classification = classify(f);
    let essentially_unary = classification.kind != OperationKind::Essential;
    let mut claims = Vec::new();

    let bottom: Vec<usize> = (0..p.m).map(|i| p.a(i)).collect();
    let middle: Vec<usize> = (0..p.n).map(|i| p.b(i)).collect();
    let top: Vec<usize> = (0..p.k).map(|i| p.c(i)).collect();
    let image = |xs: &[usize], ys: &[usize]| -> std::collections::BTreeSet<usize> {
        xs.iter()
            .flat_map(|&x| ys.iter().map(move |&y| f.eval(&[x, y])))
            .collect()
    };

    // Claim 1: f(A^2) covers A, f(C^2) covers C, f(B^2) stays in B.
    let bottom_sq = image(&bottom, &bottom);
    let top_sq = image(&top, &top);
    let middle_sq = image(&middle, &middle);
    let c1 = bottom.iter().all(|v| bottom_sq.contains(v))
        && top.iter().all(|v| top_sq.contains(v))
        && middle_sq.iter().all(|&v| p.level(v) == Level::Middle);
    claims.push(ClaimResult {
        name: "claim1_extreme_coverage",
        status: if c1 { ClaimStatus::Pass } else { ClaimStatus::Fail },
        detail: format!(
            "f(A^2) = {bottom_sq:?}, f(C^2) = {top_sq:?}, f(B^2) = {middle_sq:?}"
        ),
    });
    let claim1_holds = c1;

    // Claim 2: the extreme squares map exactly onto their levels.
    let c2 = bottom_sq == bottom.iter().copied().collect()
        && top_sq == top.iter().copied().collect();
    claims.push(ClaimResult {
        name: "claim2_extreme_squares_onto",
        status: if c2 { ClaimStatus::Pass } else { ClaimStatus::Fail },
        detail: String::new(),
    });

    // Claim 3: a middle value reached from a mixed extreme/middle pair is
    // reached on the middle square.
    let mut c3 = true;
    let mut c3_detail = String::new();
    for b in &middle {
        let mut reached = false;
        'outer: for (xs, ys) in [
            (&bottom, &middle),
            (&middle, &bottom),
            (&top, &middle),
            (&middle, &top),
        ] {
            for &x in xs.iter() {
                for &y in ys.iter() {
                    if f.eval(&[x, y]) == *b {
                        reached = true;
                        break 'outer;
                    }
                }
            }
        }
        if reached && !middle_sq.contains(b) {
            c3 = false;
            c3_detail = format!("{b} reached on a mixed pair but not on the middle square");
            break;
        }
    }
    claims.push(ClaimResult {
        name: "claim3_mixed_middle_values_on_middle_square",
        status: if c3 { ClaimStatus::Pass } else { ClaimStatus::Fail },
        detail: c3_detail,
    });

    // Claim 4: some extreme-opposite pair takes a middle value; an
    // existence statement that fails vacuously for essentially unary maps.
    let mixed_b_pair = bottom
        .iter()
        .flat_map(|&a| top.iter().map(move |&c| (a, c)))
        .chain(top.iter().flat_map(|&c| bottom.iter().map(move |&a| (c, a))))
        .find(|&(x, y)| p.level(f.eval(&[x, y])) == Level::Middle);
    claims.push(if essentially_unary {
        ClaimResult {
            name: "claim4_middle_valued_mixed_pair",
            status: ClaimStatus::NotApplicable,
            detail: "hypothesis not met: operation is essentially unary".into(),
        }
    } else {
        ClaimResult {
            name: "claim4_middle_valued_mixed_pair",
            status: if mixed_b_pair.is_some() {
                ClaimStatus::Pass
            } else {
                ClaimStatus::Fail
            },
            detail: format!("{mixed_b_pair:?}"),
        }
    });

    // Claims 5-7 read the l/r profile off the restrictions, which needs the
    // extreme squares to stay inside their levels.
    let restrictions_ok = claim1_holds && c2;
    if !restrictions_ok {
        for name in [
            "claim5_middle_pairs_are_doubly_constant",
            "claim6_middle_square_collapses",
            "claim7_profile_bound",
        ] {
            claims.push(ClaimResult {
                name,
                status: ClaimStatus::NotApplicable,
                detail: "hypothesis not met: extreme squares do not map onto their levels".into(),
            });
        }
        return Ok(ClaimReport { claims });
    }
    let f_bottom = OperationTable::from_fn(p.m, 2, |xy| f.eval(&[p.a(xy[0]), p.a(xy[1])]))?;
    let f_top = OperationTable::from_fn(p.k, 2, |xy| {
        f.eval(&[p.c(xy[0]), p.c(xy[1])]) - p.c(0)
    })?;
    let profile = lr_profile(p, &f_bottom, &f_top)?;
    let in_l = |x: usize| {
        profile
            .l_bottom
            .iter()
            .chain(&profile.l_top)
            .any(|&(s, _)| s == x)
    };
    let in_r = |y: usize| {
        profile
            .r_bottom
            .iter()
            .chain(&profile.r_top)
            .any(|&(t, _)| t == y)
    };

    // Claim 5: for every b0 in f(B^2), a mixed extreme pair with a middle
    // value other than b0 lies in l(.) x r(.).
    let mut c5 = true;
    let mut c5_detail = String::new();
    'c5: for &b0 in &middle_sq {
        for (xs, ys) in [(&bottom, &top), (&top, &bottom)] {
            for &x in xs.iter() {
                for &y in ys.iter() {
                    let v = f.eval(&[x, y]);
                    if p.level(v) == Level::Middle && v != b0 && !(in_l(x) && in_r(y)) {
                        c5 = false;
                        c5_detail =
                            format!("pair ({x}, {y}) -> {v} escapes the profile for b0 = {b0}");
                        break 'c5;
                    }
                }
            }
        }
    }
    claims.push(if essentially_unary {
        ClaimResult {
            name: "claim5_middle_pairs_are_doubly_constant",
            status: ClaimStatus::NotApplicable,
            detail: "hypothesis not met: operation is essentially unary".into(),
        }
    } else {
        ClaimResult {
            name: "claim5_middle_pairs_are_doubly_constant",
            status: if c5 { ClaimStatus::Pass } else { ClaimStatus::Fail },
            detail: c5_detail,
        }
    });

    // Claim 6: the middle square collapses to a single value.
    claims.push(if essentially_unary {
        ClaimResult {
            name: "claim6_middle_square_collapses",
            status: ClaimStatus::NotApplicable,
            detail: "hypothesis not met: operation is essentially unary".into(),
        }
    } else {
        ClaimResult {
            name: "claim6_middle_square_collapses",
            status: if middle_sq.len() == 1 {
                ClaimStatus::Pass
            } else {
                ClaimStatus::Fail
            },
            detail: format!("f(B^2) = {middle_sq:?}"),
        }
    });

    // Claim 7: the doubly-constant mixed pairs are at most B(m, k).
    let pairs = profile.mixed_pairs().len();
    let bound = bmk(p.m, p.k)?;
    claims.push(ClaimResult {
        name: "claim7_profile_bound",
        status: if pairs <= bound.b {
            ClaimStatus::Pass
        } else {
            ClaimStatus::Fail
        },
        detail: format!("{pairs} pairs <= B({}, {}) = {}", p.m, p.k, bound.b),
    });

    Ok(ClaimReport { claims })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mu_smallest_case() {
        let (value, argmax) = mu(2, 2).unwrap();
        assert_eq!(value, 2);
        assert_eq!(argmax, vec![(1, 1, 1, 1)]);
    }

    #[test]
    fn mu_large_case_has_known_achiever() {
        let (value, argmax) = mu(12, 12).unwrap();
        assert_eq!(value, 145);
        assert!(argmax.contains(&(9, 8, 9, 8)));
        assert_eq!((12 - 9) * (12 - 8), 12);
    }

    #[test]
    fn bmk_small_cases_equal_mk() {
        for m in 2..=6 {
            for k in 2..=6 {
                let r = bmk(m, k).unwrap();
                assert_eq!(r.b, m * k, "B({m}, {k})");
                assert_eq!(r.source, BmkSource::Mk);
            }
        }
    }

    #[test]
    fn bmk_twelve_twelve() {
        let r = bmk(12, 12).unwrap();
        assert_eq!(r.b, 145);
        match r.source {
            BmkSource::Mu { ref argmax } => assert_eq!(argmax[0], (8, 9, 8, 9)),
            _ => panic!("expected mu source"),
        }
    }

    #[test]
    fn bmk_ten_thirteen_matches_enumeration() {
        // Frozen from independent exhaustive enumeration of the defining
        // maximisation.
        let r = bmk(10, 13).unwrap();
        assert_eq!(r.b, 133);
        match r.source {
            BmkSource::Mu { ref argmax } => {
                assert_eq!(argmax, &[(7, 7, 9, 10), (7, 7, 10, 9)]);
            }
            _ => panic!("expected mu source"),
        }
    }

    #[test]
    fn bmk_range_invariants() {
        for m in 2..=14 {
            for k in 2..=14 {
                let r = bmk(m, k).unwrap();
                assert!(m * k <= r.b && r.b < 2 * m * k && r.b >= 4);
            }
        }
    }

    #[test]
    fn two_slupecki_threshold() {
        assert!(!two_slupecki_predicate(2, 2, 2).unwrap());
        assert!(two_slupecki_predicate(2, 6, 2).unwrap());
        assert!(!two_slupecki_predicate(12, 146, 12).unwrap());
        assert!(two_slupecki_predicate(12, 147, 12).unwrap());
    }

    #[test]
    fn ternary_witness_smallest_case_values() {
        let p = OrdinalSumPoset::new(2, 2, 2).unwrap();
        let f = ternary_witness(2, 2, 2).unwrap();
        let (a0, b0, b1, c0) = (p.a(0), p.b(0), p.b(1), p.c(0));
        assert_eq!(f.eval(&[a0, c0, c0]), c0);
        assert_eq!(f.eval(&[a0, c0, a0]), a0);
        assert_eq!(f.eval(&[a0, c0, b1]), b1);
        assert_eq!(f.eval(&[a0, c0, b0]), b0);
        // (c0, c0, b0) is strictly above (a0, c0, b0).
        assert_eq!(f.eval(&[c0, c0, b0]), c0);
        // Non-injective in the third slot.
        assert_eq!(f.eval(&[a0, c0, a0]), f.eval(&[a0, c0, p.a(1)]));
    }

    #[test]
    fn ternary_witness_verifies_over_small_levels() {
        for (m, n, k) in [(2, 2, 2), (2, 3, 2), (3, 2, 4), (4, 4, 4)] {
            let f = ternary_witness(m, n, k).unwrap();
            assert_eq!(f.arity(), 3);
        }
    }

    #[test]
    fn lr_profile_of_projections() {
        let p = OrdinalSumPoset::new(2, 2, 2).unwrap();
        let pi1 = OperationTable::projection(2, 2, 0);
        let pi2 = OperationTable::projection(2, 2, 1);
        let profile = lr_profile(&p, &pi1, &pi2).unwrap();
        assert_eq!(profile.l_bottom, vec![(p.a(0), p.a(0)), (p.a(1), p.a(1))]);
        assert!(profile.r_bottom.is_empty());
        assert_eq!(profile.r_top, vec![(p.c(0), p.c(0)), (p.c(1), p.c(1))]);
        assert!(profile.l_top.is_empty());
    }

    #[test]
    fn lr_profile_of_block_table() {
        // The block construction at the (12, 12) maximiser.
        let bound = bmk(12, 12).unwrap();
        let (f_bottom, _) = extreme_tables(12, 12, &bound);
        let (rows, cols) = constancy_profile(&f_bottom);
        assert_eq!(rows.len(), 8);
        assert_eq!(cols.len(), 9);
        assert!(f_bottom.is_surjective());
    }

    #[test]
    fn binary_witness_smallest_case_values() {
        let p = OrdinalSumPoset::new(2, 2, 2).unwrap();
        let f = binary_witness(2, 2, 2).unwrap();
        assert_eq!(f.eval(&[p.a(0), p.c(0)]), p.b(1));
        assert_eq!(f.eval(&[p.a(0), p.b(0)]), p.a(0));
        assert_eq!(f.eval(&[p.b(0), p.b(1)]), p.b(0));
    }

    #[test]
    fn binary_witness_at_the_block_table_threshold() {
        // B(12, 12) = 145 comes from the block construction, not the
        // projections; n = 146 sits exactly at the constructive boundary.
        let f = binary_witness(12, 146, 12).unwrap();
        let p = OrdinalSumPoset::new(12, 146, 12).unwrap();
        let report = verify_binary_claims(&p, &f).unwrap();
        assert!(report.all_applicable_pass());
        match binary_witness(12, 147, 12) {
            Err(OrdinalError::Refused(_)) => {}
            other => panic!("expected refusal, got {other:?}"),
        }
        assert!(two_slupecki_predicate(12, 147, 12).unwrap());
        assert!(!two_slupecki_predicate(12, 146, 12).unwrap());
    }

    #[test]
    fn binary_witness_refused_beyond_threshold() {
        match binary_witness(2, 6, 2) {
            Err(OrdinalError::Refused(msg)) => assert!(msg.contains("B(2, 2) + 1 = 5")),
            other => panic!("expected refusal, got {other:?}"),
        }
        for n in 2..=5 {
            assert!(binary_witness(2, n, 2).is_ok());
        }
    }

    #[test]
    fn claim_report_passes_on_witnesses() {
        for (m, n, k) in [(2, 2, 2), (2, 4, 2), (3, 3, 3), (2, 5, 2)] {
            let p = OrdinalSumPoset::new(m, n, k).unwrap();
            let f = binary_witness(m, n, k).unwrap();
            let report = verify_binary_claims(&p, &f).unwrap();
            for claim in &report.claims {
                assert_eq!(
                    claim.status,
                    ClaimStatus::Pass,
                    "{} failed: {}",
                    claim.name,
                    claim.detail
                );
            }
        }
    }

    #[test]
    fn claim_report_on_projection_marks_claim4_not_applicable() {
        let p = OrdinalSumPoset::new(2, 2, 2).unwrap();
        let pi1 = OperationTable::projection(p.size(), 2, 0);
        let report = verify_binary_claims(&p, &pi1).unwrap();
        let by_name = |n: &str| report.claims.iter().find(|c| c.name == n).unwrap();
        assert_eq!(by_name("claim1_extreme_coverage").status, ClaimStatus::Pass);
        assert_eq!(
            by_name("claim4_middle_valued_mixed_pair").status,
            ClaimStatus::NotApplicable
        );
    }

    #[test]
    fn claim_report_rejects_non_polymorphisms() {
        let p = OrdinalSumPoset::new(2, 2, 2).unwrap();
        // Swap two values of the witness to break monotonicity.
        let f = binary_witness(2, 2, 2).unwrap();
        let mut values = f.values().to_vec();
        values.swap(0, p.size() * p.size() - 1);
        let broken = OperationTable::new(p.size(), 2, values).unwrap();
        assert!(verify_binary_claims(&p, &broken).is_err());
    }
}
