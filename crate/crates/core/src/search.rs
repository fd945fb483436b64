//! Internal backtracking engine for homomorphism search: bitset domains over
//! the target vertices, AC-3 style propagation through the source arcs in
//! both directions, optional surjectivity-feasibility pruning, and support
//! for splitting the root branching across worker threads.
//!
//! The target must have at most 64 vertices so that a domain fits one word;
//! the source may be any digraph (typically a power of the target).

use crate::budget::{BudgetStatus, SearchBudget, SearchStats};
use crate::digraph::Digraph;
use std::collections::VecDeque;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum VarOrder {
    /// Ascending cell index: solutions are emitted in lexicographic order of
    /// the full assignment table.
    Static,
    /// Smallest candidate set first, ties broken by index.
    FailFirst,
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum SearchControl {
    Continue,
    Stop,
}

/// Byte-chunked union tables: `chunk[b][byte]` is the union of the masks of
/// the vertices encoded by `byte` at byte position `b`.
struct UnionTable {
    chunks: Vec<[u64; 256]>,
}

impl UnionTable {
    fn build(masks: &[u64]) -> UnionTable {
        let n = masks.len();
        let n_chunks = n.div_ceil(8);
        let mut chunks = vec![[0u64; 256]; n_chunks];
        for (c, chunk) in chunks.iter_mut().enumerate() {
            for byte in 0usize..256 {
                let mut acc = 0u64;
                let mut bits = byte;
                while bits != 0 {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    let v = c * 8 + b;
                    if v < n {
                        acc |= masks[v];
                    }
                }
                chunk[byte] = acc;
            }
        }
        UnionTable { chunks }
    }

    #[inline]
    fn union(&self, mask: u64) -> u64 {
        let mut acc = 0u64;
        let mut rest = mask;
        let mut c = 0;
        while rest != 0 {
            let byte = (rest & 0xff) as usize;
            if byte != 0 {
                acc |= self.chunks[c][byte];
            }
            rest >>= 8;
            c += 1;
        }
        acc
    }
}

/// Immutable per-instance data shared by all clones of a searcher.
struct Instance {
    /// Non-loop out/in neighbours of each source vertex.
    out_nb: Vec<Vec<u32>>,
    in_nb: Vec<Vec<u32>>,
    out_union: UnionTable,
    in_union: UnionTable,
    full: u64,
}

pub(crate) struct Searcher {
    inst: Arc<Instance>,
    domains: Vec<u64>,
    trail: Vec<(u32, u64)>,
    queue: VecDeque<u32>,
    in_queue: Vec<bool>,
    require_surjective: bool,
    order: VarOrder,
    root_failed: bool,
    // Budget accounting.
    max_nodes: u64,
    deadline: Option<Instant>,
    start: Instant,
    nodes: u64,
    prunes: u64,
    status: BudgetStatus,
    shared_nodes: Option<Arc<AtomicU64>>,
    stop_flag: Option<Arc<AtomicBool>>,
    nodes_since_sync: u64,
}

impl Clone for Searcher {
    fn clone(&self) -> Self {
        Searcher {
            inst: Arc::clone(&self.inst),
            domains: self.domains.clone(),
            trail: Vec::new(),
            queue: VecDeque::new(),
            in_queue: vec![false; self.domains.len()],
            require_surjective: self.require_surjective,
            order: self.order,
            root_failed: self.root_failed,
            max_nodes: self.max_nodes,
            deadline: self.deadline,
            start: self.start,
            nodes: 0,
            prunes: 0,
            status: BudgetStatus::Complete,
            shared_nodes: self.shared_nodes.clone(),
            stop_flag: self.stop_flag.clone(),
            nodes_since_sync: 0,
        }
    }
}

impl Searcher {
    /// Sets up domains from `pins` and runs root propagation. A conflicting
    /// root is not an error: the search simply has no solutions.
    pub(crate) fn new(
        source: &Digraph,
        target: &Digraph,
        pins: &[(usize, usize)],
        order: VarOrder,
        require_surjective: bool,
        budget: &SearchBudget,
    ) -> Searcher {
        debug_assert!(target.n() <= 64);
        let m = source.n();
        let n_vals = target.n();
        let full = if n_vals == 64 {
            u64::MAX
        } else {
            (1u64 << n_vals) - 1
        };
        let mut out_nb = vec![Vec::new(); m];
        let mut in_nb = vec![Vec::new(); m];
        for u in 0..m {
            for v in source.out_neighbors(u) {
                if u != v {
                    out_nb[u].push(v as u32);
                    in_nb[v].push(u as u32);
                }
            }
        }
        let out_masks: Vec<u64> = (0..n_vals).map(|v| target.out_mask64(v)).collect();
        let in_masks: Vec<u64> = (0..n_vals).map(|v| target.in_mask64(v)).collect();
        let inst = Instance {
            out_nb,
            in_nb,
            out_union: UnionTable::build(&out_masks),
            in_union: UnionTable::build(&in_masks),
            full,
        };
        let start = Instant::now();
        let mut s = Searcher {
            inst: Arc::new(inst),
            domains: vec![full; m],
            trail: Vec::new(),
            queue: VecDeque::new(),
            in_queue: vec![false; m],
            require_surjective,
            order,
            root_failed: false,
            max_nodes: budget.max_nodes,
            deadline: budget.timeout.map(|t| start + t),
            start,
            nodes: 0,
            prunes: 0,
            status: BudgetStatus::Complete,
            shared_nodes: None,
            stop_flag: None,
            nodes_since_sync: 0,
        };
        for &(cell, value) in pins {
            let mask = 1u64 << value;
            if s.domains[cell] & mask == 0 {
                s.root_failed = true;
                return s;
            }
            s.domains[cell] = mask;
        }
        // Root propagation from every cell.
        for cell in 0..m {
            s.enqueue(cell as u32);
        }
        if !s.propagate() {
            s.root_failed = true;
        }
        s.trail.clear();
        s
    }

    /// Attaches shared budget accounting and a shared stop flag for parallel
    /// root splits.
    pub(crate) fn share(&mut self, nodes: Arc<AtomicU64>, stop: Arc<AtomicBool>) {
        self.shared_nodes = Some(nodes);
        self.stop_flag = Some(stop);
    }

    /// Cells the root branches on, in search order, with their candidate
    /// values; used to fan a search out across workers.
    pub(crate) fn root_branches(&self) -> Vec<(usize, Vec<usize>)> {
        if self.root_failed {
            return Vec::new();
        }
        match self.pick_cell() {
            None => Vec::new(),
            Some(cell) => {
                let values = bits(self.domains[cell]).collect();
                vec![(cell, values)]
            }
        }
    }

    /// Pins one more cell and re-propagates; returns false when the
    /// assignment is inconsistent.
    pub(crate) fn assign_root(&mut self, cell: usize, value: usize) -> bool {
        debug_assert!(!self.root_failed);
        let mask = 1u64 << value;
        if self.domains[cell] & mask == 0 {
            return false;
        }
        self.domains[cell] = mask;
        self.enqueue(cell as u32);
        let ok = self.propagate();
        self.trail.clear();
        if !ok {
            self.root_failed = true;
        }
        ok
    }

    fn enqueue(&mut self, cell: u32) {
        if !self.in_queue[cell as usize] {
            self.in_queue[cell as usize] = true;
            self.queue.push_back(cell);
        }
    }

    /// AC-3 worklist to fixpoint; records every domain change on the trail.
    /// Returns false on a wiped-out domain or a surjectivity dead end.
    fn propagate(&mut self) -> bool {
        while let Some(cell) = self.queue.pop_front() {
            self.in_queue[cell as usize] = false;
            let dom = self.domains[cell as usize];
            let out_allowed = self.inst.out_union.union(dom);
            for i in 0..self.inst.out_nb[cell as usize].len() {
                let v = self.inst.out_nb[cell as usize][i];
                let old = self.domains[v as usize];
                let new = old & out_allowed;
                if new != old {
                    if new == 0 {
                        self.prunes += 1;
                        self.queue.clear();
                        self.in_queue.iter_mut().for_each(|b| *b = false);
                        return false;
                    }
                    self.trail.push((v, old));
                    self.domains[v as usize] = new;
                    self.enqueue(v);
                }
            }
            let in_allowed = self.inst.in_union.union(dom);
            for i in 0..self.inst.in_nb[cell as usize].len() {
                let w = self.inst.in_nb[cell as usize][i];
                let old = self.domains[w as usize];
                let new = old & in_allowed;
                if new != old {
                    if new == 0 {
                        self.prunes += 1;
                        self.queue.clear();
                        self.in_queue.iter_mut().for_each(|b| *b = false);
                        return false;
                    }
                    self.trail.push((w, old));
                    self.domains[w as usize] = new;
                    self.enqueue(w);
                }
            }
        }
        if self.require_surjective && !self.surjectivity_feasible() {
            self.prunes += 1;
            return false;
        }
        true
    }

    /// Every target value must occur in some domain, and the number of
    /// unsettled cells must cover the values not yet fixed by a singleton.
    fn surjectivity_feasible(&self) -> bool {
        let mut union = 0u64;
        let mut singles = 0u64;
        let mut free = 0usize;
        for &d in &self.domains {
            union |= d;
            if d & (d - 1) == 0 {
                singles |= d;
            } else {
                free += 1;
            }
        }
        if union != self.inst.full {
            return false;
        }
        let missing = (self.inst.full & !singles).count_ones() as usize;
        missing <= free
    }

    fn pick_cell(&self) -> Option<usize> {
        match self.order {
            VarOrder::Static => self
                .domains
                .iter()
                .position(|&d| d & (d - 1) != 0),
            VarOrder::FailFirst => {
                let mut best: Option<(u32, usize)> = None;
                for (i, &d) in self.domains.iter().enumerate() {
                    let pc = d.count_ones();
                    if pc > 1 {
                        match best {
                            Some((b, _)) if b <= pc => {}
                            _ => best = Some((pc, i)),
                        }
                        if pc == 2 {
                            break;
                        }
                    }
                }
                best.map(|(_, i)| i)
            }
        }
    }

    #[inline]
    fn budget_exceeded(&mut self) -> bool {
        if !self.status.is_complete() {
            return true;
        }
        if let Some(stop) = &self.stop_flag {
            if self.nodes % 64 == 0 && stop.load(Ordering::Relaxed) {
                // A sibling branch already produced the answer; not a budget
                // condition, so leave the status complete.
                return true;
            }
        }
        if let Some(shared) = &self.shared_nodes {
            if self.nodes_since_sync >= 1024 {
                let total = shared.fetch_add(self.nodes_since_sync, Ordering::Relaxed)
                    + self.nodes_since_sync;
                self.nodes_since_sync = 0;
                if total > self.max_nodes {
                    self.status = BudgetStatus::NodeBudgetExceeded;
                    return true;
                }
            }
        } else if self.nodes > self.max_nodes {
            self.status = BudgetStatus::NodeBudgetExceeded;
            return true;
        }
        if self.nodes % 4096 == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() > d {
                    self.status = BudgetStatus::TimedOut;
                    return true;
                }
            }
        }
        false
    }

    /// Depth-first search; `visit` receives each complete assignment (one
    /// target vertex per source vertex) and may stop the run.
    pub(crate) fn run(&mut self, visit: &mut dyn FnMut(&[u8]) -> SearchControl) -> SearchStats {
        if !self.root_failed {
            let mut leaf_buf = vec![0u8; self.domains.len()];
            self.dfs(visit, &mut leaf_buf);
        }
        if let (Some(shared), true) = (&self.shared_nodes, self.nodes_since_sync > 0) {
            shared.fetch_add(self.nodes_since_sync, Ordering::Relaxed);
            self.nodes_since_sync = 0;
        }
        SearchStats {
            nodes: self.nodes,
            prunes: self.prunes,
            status: self.status,
            elapsed: self.start.elapsed(),
        }
    }

    fn dfs(&mut self, visit: &mut dyn FnMut(&[u8]) -> SearchControl, leaf_buf: &mut [u8]) -> bool {
        let cell = match self.pick_cell() {
            None => {
                for (i, &d) in self.domains.iter().enumerate() {
                    leaf_buf[i] = d.trailing_zeros() as u8;
                }
                return visit(leaf_buf) == SearchControl::Stop;
            }
            Some(c) => c,
        };
        let dom = self.domains[cell];
        for value in bits(dom) {
            self.nodes += 1;
            self.nodes_since_sync += 1;
            if self.budget_exceeded() {
                return true;
            }
            let mark = self.trail.len();
            self.trail.push((cell as u32, dom));
            self.domains[cell] = 1u64 << value;
            self.enqueue(cell as u32);
            let ok = self.propagate();
            let stop = if ok {
                self.dfs(visit, leaf_buf)
            } else {
                false
            };
            while self.trail.len() > mark {
                let (c, old) = self.trail.pop().unwrap();
                self.domains[c as usize] = old;
            }
            if stop {
                return true;
            }
        }
        false
    }
}

#[inline]
fn bits(mask: u64) -> impl Iterator<Item = usize> {
    std::iter::successors((mask != 0).then_some(mask), |&m| {
        let rest = m & (m - 1);
        (rest != 0).then_some(rest)
    })
    .map(|m| m.trailing_zeros() as usize)
}
