//! #-swap search for near transversals.
//!
//! Starting from an order-`n` array whose main diagonal holds
//! `0,0,1,1,2,…,n−3` (a weight `n−2` diagonal), the search repeatedly
//! #-swaps a pivot row `r0` against the row holding the duplicated symbol
//! and branches over every symbol the newly exposed cell could hold. A
//! branch closes as soon as some row or column has `n−1` filled cells: all of
//! them must come from the `n−2` duplicate symbols, which is impossible in a
//! Latin array, so every completion of that branch has a near transversal.
//!
//! Two drivers are provided. [`naive_hash`] always pivots on row 0 and
//! reports a failure whenever the swap sequence returns to the starting
//! diagonal. [`advanced_hash`] escalates through pivot rows 0..=3 on such
//! cycles, resolves markers with fewest liberties every fourth step, and
//! after each placement marks the corners of every length `n−2` partial
//! transversal. The first placement on a path sweeps the whole array; later
//! ones only need the transversals through the new cell.
//!
//! Searches are exhaustive: an inconclusive branch does not stop the
//! exploration of its siblings, so the statistics count every leaf.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::array::{CellState, DiagonalPerm, PartialLatinArray, PartialTransversal, Symbol};
use crate::error::{Error, Result};

/// Largest order the engine accepts; row and column masks are `u32`.
pub const MAX_ORDER: usize = 16;

const EMPTY: u8 = 0xFF;
const MARKER: u8 = 0xFE;

/// Branch points closer to the root than this are explored in parallel when
/// more than one thread is requested.
const PARALLEL_SPLIT_LEVELS: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Naive,
    Advanced,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::Naive => "naive",
            Algorithm::Advanced => "advanced",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Pure #-swap reachability: no marker resolution, no corner marking.
    pub swap_only: bool,
    /// Close branches that can no longer complete to a Latin square.
    pub square_prune: bool,
    /// Worker threads; 1 runs the plain sequential search.
    pub threads: usize,
    /// Keep the arrays at inconclusive leaves.
    pub capture_failures: bool,
    /// Assert the phase invariant, pigeonhole soundness and exact undo at
    /// every node. Slow; meant for small orders.
    pub instrumented: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            swap_only: false,
            square_prune: false,
            threads: 1,
            capture_failures: true,
            instrumented: false,
        }
    }
}

/// Counters gathered by a search. Deterministic for a fixed order,
/// algorithm and option set, including parallel runs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    /// Branches closed by a row or column with `n−1` filled cells.
    pub true_leaves: u64,
    /// Inconclusive leaves: the swap sequence returned to the seed diagonal
    /// with no pivot row left to try.
    pub false_leaves: u64,
    /// Escalations to the next pivot row, indexed by the pivot row left.
    pub cycle_backs_at: [u64; 4],
    /// Branches closed by the Latin-square cutoff.
    pub pruned: u64,
    /// Calls of the hash step.
    pub nodes: u64,
    /// Largest swap depth reached within one pivot phase.
    pub max_depth: u64,
}

impl SearchStats {
    pub fn merge(&mut self, other: &SearchStats) {
        self.true_leaves += other.true_leaves;
        self.false_leaves += other.false_leaves;
        for (a, b) in self.cycle_backs_at.iter_mut().zip(other.cycle_backs_at) {
            *a += b;
        }
        self.pruned += other.pruned;
        self.nodes += other.nodes;
        self.max_depth = self.max_depth.max(other.max_depth);
    }
}

/// An array and diagonal captured at an inconclusive leaf.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Failure {
    pub array: PartialLatinArray,
    pub diagonal: DiagonalPerm,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchVerdict {
    pub proved: bool,
    pub failures: Vec<Failure>,
}

/// Search state at a hash step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchFrame {
    pub array: PartialLatinArray,
    pub sigma: DiagonalPerm,
    pub depth: usize,
    /// Pivot row.
    pub r0: usize,
    /// Row most recently swapped against the pivot.
    pub r1: usize,
}

impl SearchFrame {
    /// The initial frame: seed array, identity diagonal, depth 0, pivot row 0
    /// and previous row 3.
    pub fn seed(n: usize) -> Result<Self> {
        let (array, sigma) = seed_array(n)?;
        Ok(Self {
            array,
            sigma,
            depth: 0,
            r0: 0,
            r1: 3,
        })
    }
}

/// The order-`n` seed: empty except for the main diagonal
/// `0,0,1,1,2,3,…,n−3`, over the `n−2` duplicate symbols.
pub fn seed_array(n: usize) -> Result<(PartialLatinArray, DiagonalPerm)> {
    if n < 4 {
        return Err(Error::OrderTooSmall(n));
    }
    let mut a = PartialLatinArray::empty(n, n, n - 2);
    for i in 0..n {
        let s = if i < 4 { i / 2 } else { i - 2 };
        a.set(i, i, CellState::Symbol(s as Symbol));
    }
    Ok((a, DiagonalPerm::identity(n)))
}

/// #-swaps the pivot row `f.r0` with `row`. An empty cell newly placed on
/// the diagonal in the pivot row becomes a marker: it must repeat one of
/// the covered symbols, or the swapped diagonal would be heavier.
pub fn hash_swap(f: &mut SearchFrame, row: usize) -> Result<()> {
    let n = f.sigma.len();
    if row >= n {
        return Err(Error::OutOfBounds { row, col: 0 });
    }
    if row == f.r0 {
        return Err(Error::PivotRow { row });
    }
    f.sigma.swap_rows(f.r0, row);
    let c = f.sigma.column(f.r0);
    if f.array.get(f.r0, c) == CellState::Empty {
        f.array.set(f.r0, c, CellState::Marker);
    }
    Ok(())
}

/// Marks the four cells where the two rows and two columns missed by `t`
/// cross, wherever they are empty. Returns how many markers were written.
pub fn mark_corners(a: &mut PartialLatinArray, t: &PartialTransversal) -> usize {
    let mut rows_used = vec![false; a.rows()];
    let mut cols_used = vec![false; a.cols()];
    for e in t.entries() {
        rows_used[e.row] = true;
        cols_used[e.col] = true;
    }
    let mut written = 0;
    for r in (0..a.rows()).filter(|&r| !rows_used[r]) {
        for c in (0..a.cols()).filter(|&c| !cols_used[c]) {
            if a.get(r, c) == CellState::Empty {
                a.set(r, c, CellState::Marker);
                written += 1;
            }
        }
    }
    written
}

/// True when the top-left `(n−2)×(n−2)` block has fewer than `2(n−2)−4`
/// empty cells. A Latin square completion must place the two symbols
/// outside the duplicate pool at least `n−4` times each in that block, so
/// such a branch cannot complete to a Latin square.
pub fn latin_square_prune(a: &PartialLatinArray) -> bool {
    let n = a.rows().min(a.cols());
    if n < 4 {
        return false;
    }
    let m = n - 2;
    let empty = (0..m)
        .flat_map(|r| (0..m).map(move |c| (r, c)))
        .filter(|&(r, c)| a.get(r, c) == CellState::Empty)
        .count();
    empty < 2 * m - 4
}

/// Algorithm 1: pivots on row 0 only. `r` is the row just swapped against
/// the pivot; the initial call uses the seed frame with `r = 3`.
pub fn naive_hash(f: &SearchFrame, r: usize, stats: &mut SearchStats) -> Result<SearchVerdict> {
    naive_hash_with(f, r, stats, &SearchOptions::default())
}

pub fn naive_hash_with(
    f: &SearchFrame,
    r: usize,
    stats: &mut SearchStats,
    options: &SearchOptions,
) -> Result<SearchVerdict> {
    if f.r0 != 0 {
        return Err(Error::Invalid("the naive search always pivots on row 0".into()));
    }
    let mut engine = Engine::from_frame(f, *options)?;
    if r >= engine.n || r == 0 {
        return Err(Error::PivotRow { row: r });
    }
    let proved = run_with_stack(|| engine.naive(f.depth as u64, r as u8, 0));
    Ok(engine.finish(proved, stats))
}

/// Algorithm 2 from an arbitrary frame (the seed frame for a full run).
pub fn advanced_hash(f: &SearchFrame, stats: &mut SearchStats, options: &SearchOptions) -> Result<SearchVerdict> {
    let mut engine = Engine::from_frame(f, *options)?;
    check_rows(&engine, f)?;
    let (d, r0, r1) = (f.depth as u64, f.r0 as u8, f.r1 as u8);
    let proved = run_with_stack(|| engine.hash(d, r0, r1, 0));
    Ok(engine.finish(proved, stats))
}

/// Fills cell `(r, c)` with every admissible symbol in turn (or recurses
/// directly if it already holds one) and continues the advanced search.
pub fn fill_cell(
    f: &SearchFrame,
    r: usize,
    c: usize,
    stats: &mut SearchStats,
    options: &SearchOptions,
) -> Result<SearchVerdict> {
    let mut engine = Engine::from_frame(f, *options)?;
    check_rows(&engine, f)?;
    if r >= engine.n || c >= engine.n {
        return Err(Error::OutOfBounds { row: r, col: c });
    }
    let (d, r0, r1) = (f.depth as u64, f.r0 as u8, f.r1 as u8);
    let proved = run_with_stack(|| engine.fill(r as u8, c as u8, d, r0, r1, 0));
    Ok(engine.finish(proved, stats))
}

/// Symbols the search would try in empty cell `(r, c)` of `a`: the duplicate
/// pool `0..=min(k+1, n−3)`, where `k` is the largest symbol already placed
/// twice, minus those present in row `r` or column `c`.
pub fn branch_symbols(a: &PartialLatinArray, r: usize, c: usize) -> Result<Vec<Symbol>> {
    let engine = Engine::from_frame(
        &SearchFrame {
            array: a.clone(),
            sigma: DiagonalPerm::identity(a.order()?),
            depth: 0,
            r0: 0,
            r1: 1,
        },
        SearchOptions::default(),
    )?;
    if r >= engine.n || c >= engine.n {
        return Err(Error::OutOfBounds { row: r, col: c });
    }
    Ok(engine.candidates(r as u8, c as u8).into_iter().map(Symbol::from).collect())
}

fn check_rows(engine: &Engine, f: &SearchFrame) -> Result<()> {
    if f.r0 >= engine.n || f.r1 >= engine.n || f.r0 == f.r1 {
        return Err(Error::Invalid(format!("bad phase rows r0 = {}, r1 = {}", f.r0, f.r1)));
    }
    Ok(())
}

/// Full report of one verification run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub order: usize,
    pub algorithm: Algorithm,
    pub options: SearchOptions,
    pub verdict: SearchVerdict,
    pub stats: SearchStats,
    /// A proved verdict shows every Latin array of this order has a near
    /// transversal, given that every array of order `n−1` has one (which
    /// provides the weight `n−2` seed diagonal).
    pub assumes_order_below: Option<usize>,
}

impl SearchReport {
    pub fn failure_count(&self) -> usize {
        self.verdict.failures.len()
    }
}

/// Runs the selected search from the seed of order `n`. Failures are sorted
/// by their grid text.
pub fn verify_order(n: usize, algorithm: Algorithm, options: &SearchOptions) -> Result<SearchReport> {
    if n > MAX_ORDER {
        return Err(Error::OrderTooLarge(n));
    }
    let frame = SearchFrame::seed(n)?;
    let mut stats = SearchStats::default();
    let verdict = match algorithm {
        Algorithm::Naive => naive_hash_with(&frame, 3, &mut stats, options)?,
        Algorithm::Advanced => advanced_hash(&frame, &mut stats, options)?,
    };
    Ok(SearchReport {
        order: n,
        algorithm,
        options: *options,
        verdict,
        stats,
        assumes_order_below: (n > 4).then_some(n - 1),
    })
}

/// Sorts failures canonically and drops exact duplicates.
pub fn canonicalize_failures(failures: &mut Vec<Failure>) {
    failures.sort_by_cached_key(failure_key);
    failures.dedup();
}

fn failure_key(f: &Failure) -> (String, Vec<usize>) {
    (f.array.to_grid_string(), f.diagonal.columns().to_vec())
}

#[cfg(not(target_arch = "wasm32"))]
fn run_with_stack<F: FnOnce() -> bool + Send>(f: F) -> bool {
    // The recursion depth follows the swap cycle length, which can reach a
    // few thousand frames at order 11.
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(512 << 20)
            .spawn_scoped(s, f)
            .expect("spawn search thread")
            .join()
            .expect("search thread panicked")
    })
}

// No threads on the browser target; callers keep the order small there.
#[cfg(target_arch = "wasm32")]
fn run_with_stack<F: FnOnce() -> bool + Send>(f: F) -> bool {
    f()
}

/// Compact board with incremental row/column bookkeeping and an undo trail.
#[derive(Clone)]
struct Board {
    n: usize,
    cells: Vec<u8>,
    row_mask: Vec<u32>,
    col_mask: Vec<u32>,
    row_fill: Vec<u8>,
    col_fill: Vec<u8>,
    sym_count: Vec<u16>,
    markers: u32,
    trail: Vec<(u16, u8)>,
}

impl Board {
    fn from_array(a: &PartialLatinArray) -> Result<Self> {
        let n = a.order()?;
        if n > MAX_ORDER {
            return Err(Error::OrderTooLarge(n));
        }
        if n < 4 {
            return Err(Error::OrderTooSmall(n));
        }
        let mut b = Board {
            n,
            cells: vec![EMPTY; n * n],
            row_mask: vec![0; n],
            col_mask: vec![0; n],
            row_fill: vec![0; n],
            col_fill: vec![0; n],
            sym_count: vec![0; n],
            markers: 0,
            trail: Vec::new(),
        };
        for r in 0..n {
            for c in 0..n {
                let v = match a.get(r, c) {
                    CellState::Empty => continue,
                    CellState::Marker => MARKER,
                    CellState::Symbol(s) if (s as usize) < n - 2 => s as u8,
                    CellState::Symbol(s) => {
                        return Err(Error::Invalid(format!(
                            "symbol {s} at ({r}, {c}) is outside the duplicate pool 0..{}",
                            n - 2
                        )))
                    }
                };
                if v != MARKER && (b.row_mask[r] | b.col_mask[c]) & (1 << v) != 0 {
                    return Err(Error::Invalid(format!("symbol {v} at ({r}, {c}) breaks the Latin property")));
                }
                b.set((r * n + c) as u16, v);
            }
        }
        b.trail.clear();
        Ok(b)
    }

    fn to_array(&self) -> PartialLatinArray {
        let n = self.n;
        let mut a = PartialLatinArray::empty(n, n, n - 2);
        for (i, &v) in self.cells.iter().enumerate() {
            let state = match v {
                EMPTY => continue,
                MARKER => CellState::Marker,
                s => CellState::Symbol(s as Symbol),
            };
            a.set(i / n, i % n, state);
        }
        a
    }

    #[inline]
    fn get(&self, r: u8, c: u8) -> u8 {
        self.cells[r as usize * self.n + c as usize]
    }

    #[inline]
    fn set(&mut self, idx: u16, v: u8) {
        let (r, c) = (idx as usize / self.n, idx as usize % self.n);
        let old = self.cells[idx as usize];
        self.trail.push((idx, old));
        self.clear_cell(r, c, old);
        self.apply_cell(r, c, v);
        self.cells[idx as usize] = v;
    }

    #[inline]
    fn clear_cell(&mut self, r: usize, c: usize, old: u8) {
        match old {
            EMPTY => {}
            MARKER => {
                self.markers -= 1;
                self.row_fill[r] -= 1;
                self.col_fill[c] -= 1;
            }
            s => {
                self.row_mask[r] &= !(1 << s);
                self.col_mask[c] &= !(1 << s);
                self.sym_count[s as usize] -= 1;
                self.row_fill[r] -= 1;
                self.col_fill[c] -= 1;
            }
        }
    }

    #[inline]
    fn apply_cell(&mut self, r: usize, c: usize, v: u8) {
        match v {
            EMPTY => {}
            MARKER => {
                self.markers += 1;
                self.row_fill[r] += 1;
                self.col_fill[c] += 1;
            }
            s => {
                self.row_mask[r] |= 1 << s;
                self.col_mask[c] |= 1 << s;
                self.sym_count[s as usize] += 1;
                self.row_fill[r] += 1;
                self.col_fill[c] += 1;
            }
        }
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (idx, old) = self.trail.pop().unwrap();
            let (r, c) = (idx as usize / self.n, idx as usize % self.n);
            let cur = self.cells[idx as usize];
            self.clear_cell(r, c, cur);
            self.apply_cell(r, c, old);
            self.cells[idx as usize] = old;
        }
    }

    /// Some row or column holds at least `n−1` filled cells.
    fn saturated_line(&self) -> Option<(bool, usize)> {
        let limit = (self.n - 1) as u8;
        if let Some(r) = self.row_fill.iter().position(|&f| f >= limit) {
            return Some((true, r));
        }
        self.col_fill.iter().position(|&f| f >= limit).map(|c| (false, c))
    }

    /// Largest symbol occurring at least twice, if any.
    fn largest_repeated(&self) -> Option<u8> {
        self.sym_count.iter().rposition(|&k| k >= 2).map(|k| k as u8)
    }

    fn pool_mask(&self) -> u32 {
        (1u32 << (self.n - 2)) - 1
    }

    fn liberties(&self, r: u8, c: u8) -> u32 {
        (self.pool_mask() & !(self.row_mask[r as usize] | self.col_mask[c as usize])).count_ones()
    }

    /// The marker with fewest liberties, ties broken row-major.
    fn tightest_marker(&self) -> Option<(u8, u8)> {
        let mut best: Option<(u32, u8, u8)> = None;
        for (i, &v) in self.cells.iter().enumerate() {
            if v != MARKER {
                continue;
            }
            let (r, c) = ((i / self.n) as u8, (i % self.n) as u8);
            let l = self.liberties(r, c);
            if best.is_none_or(|(bl, _, _)| l < bl) {
                best = Some((l, r, c));
            }
        }
        best.map(|(_, r, c)| (r, c))
    }

    fn top_left_empty(&self) -> usize {
        let m = self.n - 2;
        (0..m)
            .map(|r| self.cells[r * self.n..r * self.n + m].iter().filter(|&&v| v == EMPTY).count())
            .sum()
    }

    fn fingerprint(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.cells.hash(&mut h);
        h.finish()
    }

    /// Marks the corners of every partial transversal of length `n−2`
    /// through the concrete cell `(r, c)`.
    fn mark_corners_through(&mut self, r: u8, c: u8) {
        let s0 = self.get(r, c);
        debug_assert!((s0 as usize) < self.n - 2);
        self.mark_corners_from(1 << r, 1 << c, Some(s0));
    }

    /// Marks the corners of every partial transversal of length `n−2`.
    fn mark_all_corners(&mut self) {
        self.mark_corners_from(0, 0, None);
    }

    /// A length `n−2` partial transversal holds every pool symbol exactly
    /// once, so it is one cell per symbol in distinct rows and columns, and
    /// only the pair of uncovered rows and columns matters.
    fn mark_corners_from(&mut self, rows0: u32, cols0: u32, placed: Option<u8>) {
        let n = self.n;
        let pool = n - 2;
        let mut by_symbol: Vec<Vec<(u8, u8)>> = vec![Vec::new(); pool];
        for (i, &v) in self.cells.iter().enumerate() {
            if (v as usize) < pool && Some(v) != placed {
                by_symbol[v as usize].push(((i / n) as u8, (i % n) as u8));
            }
        }
        let mut order: Vec<usize> = (0..pool).filter(|&s| Some(s as u8) != placed).collect();
        if order.iter().any(|&s| by_symbol[s].is_empty()) {
            return;
        }
        order.sort_by_key(|&s| by_symbol[s].len());
        let lists: Vec<&[(u8, u8)]> = order.iter().map(|&s| by_symbol[s].as_slice()).collect();

        let mut seen: HashSet<u64> = HashSet::new();
        let mut ends: Vec<(u32, u32)> = Vec::new();
        fn dfs(
            lists: &[&[(u8, u8)]],
            level: usize,
            rows: u32,
            cols: u32,
            seen: &mut HashSet<u64>,
            ends: &mut Vec<(u32, u32)>,
        ) {
            if level == lists.len() {
                ends.push((rows, cols));
                return;
            }
            for &(r, c) in lists[level] {
                let (rb, cb) = (1u32 << r, 1u32 << c);
                if rows & rb != 0 || cols & cb != 0 {
                    continue;
                }
                let (nr, nc) = (rows | rb, cols | cb);
                if seen.insert(((nr as u64) << 32) | nc as u64) {
                    dfs(lists, level + 1, nr, nc, seen, ends);
                }
            }
        }
        dfs(&lists, 0, rows0, cols0, &mut seen, &mut ends);

        let full = (1u32 << n) - 1;
        for (rows, cols) in ends {
            let (fr, fc) = (full & !rows, full & !cols);
            for rr in bits(fr) {
                for cc in bits(fc) {
                    let idx = (rr * n + cc) as u16;
                    if self.cells[idx as usize] == EMPTY {
                        self.set(idx, MARKER);
                    }
                }
            }
        }
    }
}

fn bits(mut m: u32) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            b
        })
    })
}

#[derive(Clone)]
struct Engine {
    n: usize,
    board: Board,
    sigma: Vec<u8>,
    opts: SearchOptions,
    stats: SearchStats,
    failures: Vec<Failure>,
    /// Whether some placement on the current path already marked the corners
    /// of every partial transversal. Later placements only need to look at
    /// transversals through the new cell.
    swept: bool,
}

impl Engine {
    fn from_frame(f: &SearchFrame, opts: SearchOptions) -> Result<Self> {
        let board = Board::from_array(&f.array)?;
        let n = board.n;
        if f.sigma.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: f.sigma.len(),
            });
        }
        Ok(Self {
            n,
            board,
            sigma: f.sigma.columns().iter().map(|&c| c as u8).collect(),
            opts,
            stats: SearchStats::default(),
            failures: Vec::new(),
            swept: false,
        })
    }

    fn finish(&mut self, proved: bool, stats: &mut SearchStats) -> SearchVerdict {
        stats.merge(&self.stats);
        let mut failures = std::mem::take(&mut self.failures);
        canonicalize_failures(&mut failures);
        SearchVerdict {
            proved: proved && failures.is_empty() && self.stats.false_leaves == 0,
            failures,
        }
    }

    fn is_identity(&self) -> bool {
        self.sigma.iter().enumerate().all(|(i, &c)| i == c as usize)
    }

    fn diag(&self, r: u8) -> u8 {
        self.board.get(r, self.sigma[r as usize])
    }

    /// The row other than `a` and `b` whose diagonal cell holds `s`.
    fn row_holding(&self, s: u8, a: u8, b: u8) -> u8 {
        let mut found = None;
        for r in 0..self.n as u8 {
            if r != a && r != b && self.diag(r) == s {
                assert!(found.is_none(), "symbol {s} is on the diagonal more than twice");
                found = Some(r);
                if !self.opts.instrumented {
                    break;
                }
            }
        }
        found.unwrap_or_else(|| panic!("symbol {s} has no second diagonal row"))
    }

    fn visit(&mut self, d: u64) {
        self.stats.nodes += 1;
        self.stats.max_depth = self.stats.max_depth.max(d);
    }

    fn capture(&mut self) {
        if self.opts.capture_failures {
            self.failures.push(Failure {
                array: self.board.to_array(),
                diagonal: DiagonalPerm::new(self.sigma.iter().map(|&c| c as usize).collect()).unwrap(),
            });
        }
    }

    /// Closes the branch if a row or column has `n−1` filled cells.
    fn pigeonhole(&mut self) -> bool {
        match self.board.saturated_line() {
            Some(line) => {
                if self.opts.instrumented {
                    self.assert_pigeonhole(line);
                }
                self.stats.true_leaves += 1;
                true
            }
            None => false,
        }
    }

    fn assert_pigeonhole(&self, (is_row, i): (bool, usize)) {
        let n = self.n;
        let cells: Vec<u8> = (0..n)
            .map(|j| if is_row { self.board.cells[i * n + j] } else { self.board.cells[j * n + i] })
            .filter(|&v| v != EMPTY)
            .collect();
        assert!(cells.len() >= n - 1);
        let mut seen = 0u32;
        for v in cells.into_iter().filter(|&v| v != MARKER) {
            assert!((v as usize) < n - 2, "filled cell outside the duplicate pool");
            assert!(seen & (1 << v) == 0, "Latin property broken in a saturated line");
            seen |= 1 << v;
        }
    }

    /// Diagonal cells off the pivot row are concrete and cover the pool with
    /// exactly one duplicate, which sits at row `r1`.
    fn assert_phase(&self, r0: u8, r1: u8) {
        let n = self.n;
        let pool = n - 2;
        let mut count = vec![0u8; pool];
        for r in (0..n as u8).filter(|&r| r != r0) {
            let v = self.diag(r);
            assert!((v as usize) < pool, "diagonal cell at row {r} is not concrete");
            count[v as usize] += 1;
        }
        assert!(count.iter().all(|&k| k >= 1), "diagonal lost a symbol");
        let dups: Vec<usize> = (0..pool).filter(|&s| count[s] == 2).collect();
        assert_eq!(dups, vec![self.diag(r1) as usize], "duplicate is not at row r1");
        let p = self.diag(r0);
        assert!(p != EMPTY, "pivot diagonal cell is empty");
        let mut cols = vec![false; n];
        for &c in &self.sigma {
            assert!(!std::mem::replace(&mut cols[c as usize], true), "sigma is not a permutation");
        }
    }

    /// Swaps the pivot with `row`; returns the undo mark taken beforehand.
    fn swap(&mut self, r0: u8, row: u8) -> usize {
        let mark = self.board.trail.len();
        self.sigma.swap(r0 as usize, row as usize);
        let c = self.sigma[r0 as usize];
        if self.board.get(r0, c) == EMPTY {
            self.board.set((r0 as usize * self.n + c as usize) as u16, MARKER);
        }
        mark
    }

    fn unswap(&mut self, r0: u8, row: u8, mark: usize) {
        self.board.undo_to(mark);
        self.sigma.swap(r0 as usize, row as usize);
    }

    /// Symbols worth trying at `(r, c)`: `0..=min(k+1, n−3)` where `k` is the
    /// largest repeated symbol (the rest are interchangeable), minus those
    /// already in the row or column.
    fn candidates(&self, r: u8, c: u8) -> Vec<u8> {
        let top = match self.board.largest_repeated() {
            Some(k) => (k as usize + 1).min(self.n - 3),
            None => 0,
        };
        let blocked = self.board.row_mask[r as usize] | self.board.col_mask[c as usize];
        (0..=top as u8).filter(|&s| blocked & (1 << s) == 0).collect()
    }

    fn naive(&mut self, d: u64, r: u8, level: u32) -> bool {
        self.visit(d);
        if self.opts.instrumented {
            self.assert_phase(0, r);
        }
        if self.pigeonhole() {
            return true;
        }
        if d != 0 && r == 3 && self.is_identity() {
            self.stats.false_leaves += 1;
            self.capture();
            return false;
        }
        let s = self.diag(r);
        let big = self.row_holding(s, 0, r);
        let mark = self.swap(0, big);
        let c = self.sigma[big as usize];
        let v = self.board.get(big, c);
        let ok = if v != EMPTY && v != MARKER {
            self.naive(d + 1, big, level)
        } else {
            let idx = (big as usize * self.n + c as usize) as u16;
            let cands = self.candidates(big, c);
            self.branch(&cands, level, |e, s, lvl| {
                e.board.set(idx, s);
                e.naive(d + 1, big, lvl)
            })
        };
        self.unswap(0, big, mark);
        ok
    }

    fn hash(&mut self, d: u64, r0: u8, r1: u8, level: u32) -> bool {
        self.visit(d);
        if self.opts.instrumented {
            self.assert_phase(r0, r1);
        }
        if self.pigeonhole() {
            return true;
        }
        if self.opts.square_prune {
            let m = self.n - 2;
            if self.board.top_left_empty() < 2 * m - 4 {
                self.stats.pruned += 1;
                return true;
            }
        }
        if d != 0 && r0 + r1 == 3 && self.is_identity() {
            if r0 >= 3 {
                self.stats.false_leaves += 1;
                self.capture();
                return false;
            }
            self.stats.cycle_backs_at[r0 as usize] += 1;
            return self.hash(0, r0 + 1, r1 - 1, level);
        }
        if !self.opts.swap_only && d % 4 == 3 && self.board.markers > 0 {
            let (r, c) = self.board.tightest_marker().unwrap();
            return self.fill(r, c, d, r0, r1, level);
        }
        let s = self.diag(r1);
        let big = self.row_holding(s, r0, r1);
        let mark = self.swap(r0, big);
        let c = self.sigma[big as usize];
        let ok = self.fill(big, c, d, r0, big, level);
        self.unswap(r0, big, mark);
        ok
    }

    fn fill(&mut self, r: u8, c: u8, d: u64, r0: u8, r1: u8, level: u32) -> bool {
        let v = self.board.get(r, c);
        if v != EMPTY && v != MARKER {
            return self.hash(d + 1, r0, r1, level);
        }
        let idx = (r as usize * self.n + c as usize) as u16;
        let cands = self.candidates(r, c);
        let corners = !self.opts.swap_only;
        let swept = self.swept;
        self.branch(&cands, level, |e, s, lvl| {
            e.board.set(idx, s);
            if corners {
                if swept {
                    e.board.mark_corners_through(r, c);
                } else {
                    e.board.mark_all_corners();
                }
            }
            e.swept = corners;
            let ok = e.hash(d + 1, r0, r1, lvl);
            e.swept = swept;
            ok
        })
    }

    /// Runs `step` once per candidate symbol, restoring the board after each.
    /// Every branch is explored; the result is true only if all are.
    fn branch<F>(&mut self, cands: &[u8], level: u32, step: F) -> bool
    where
        F: Fn(&mut Engine, u8, u32) -> bool + Sync,
    {
        if self.opts.threads > 1 && level < PARALLEL_SPLIT_LEVELS && cands.len() > 1 {
            let results: Vec<(bool, SearchStats, Vec<Failure>)> = cands
                .par_iter()
                .map(|&s| {
                    let mut e = self.fork();
                    let ok = step(&mut e, s, level + 1);
                    (ok, e.stats, e.failures)
                })
                .collect();
            let mut all = true;
            for (ok, stats, failures) in results {
                all &= ok;
                self.stats.merge(&stats);
                self.failures.extend(failures);
            }
            return all;
        }
        let mut all = true;
        for &s in cands {
            let mark = self.board.trail.len();
            let before = self.opts.instrumented.then(|| self.board.fingerprint());
            all &= step(self, s, level + 1);
            self.board.undo_to(mark);
            if let Some(h) = before {
                assert_eq!(h, self.board.fingerprint(), "backtracking did not restore the array");
            }
        }
        all
    }

    fn fork(&self) -> Engine {
        let mut e = self.clone();
        e.board.trail.clear();
        e.stats = SearchStats::default();
        e.failures = Vec::new();
        e
    }
}
