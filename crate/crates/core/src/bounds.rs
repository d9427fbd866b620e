//! Minimal `n_k` sequences and the partial transversal lengths they imply.
//!
//! A sequence `n_2, n_3, …, n_K` is admissible when
//!
//! * `n_2 >= 11`,
//! * `n_k >= n_{k−1} + 2k` for `k > 2`,
//! * `(n_k − n_j)(2n_j + n_{k−1} − 2n_k + 2k − j) <= n_j(n_j − n_{j−1} − 2j)`
//!   for `3 <= j < k`.
//!
//! Every Latin array of order `n < n_k` has a diagonal of weight above
//! `n − k`. [`minimize_nk`] finds the least admissible `n_k` for each `k`
//! with a viability table that only ever loses pairs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest admissible `n_k` for `k = 2..=21`.
pub const MIN_NK_TABLE: [u64; 20] = [
    11, 17, 28, 41, 58, 78, 107, 140, 177, 226, 283, 346, 436, 525, 626, 736, 887, 1043, 1234, 1449,
];

/// Largest `K` accepted by [`brute_force_min_nk`].
pub const BRUTE_FORCE_MAX_K: usize = 6;

/// `n_2, n_3, …` stored from index 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BoundSequence {
    values: Vec<u64>,
}

impl BoundSequence {
    pub fn new(values: Vec<u64>) -> Self {
        Self { values }
    }

    /// `n_k`, if present.
    pub fn get(&self, k: usize) -> Option<u64> {
        k.checked_sub(2).and_then(|i| self.values.get(i)).copied()
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    /// Index of the last entry (`K`), or `None` when empty.
    pub fn last_index(&self) -> Option<usize> {
        (!self.values.is_empty()).then(|| self.values.len() + 1)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl fmt::Display for BoundSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

impl std::str::FromStr for BoundSequence {
    type Err = Error;

    /// Comma-separated integers, optionally wrapped in brackets.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
        let values = inner
            .split(',')
            .map(|t| t.trim())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<u64>().map_err(|_| Error::Invalid(format!("bad sequence entry {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { values })
    }
}

/// A violated inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Violation {
    /// `n_2 < 11`.
    Shor1,
    /// `n_k < n_{k−1} + 2k`.
    Shor2 { k: usize },
    /// The product inequality fails for `(j, k)`.
    Shor3 { j: usize, k: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Shor1 => write!(f, "n_2 must be at least 11"),
            Violation::Shor2 { k } => write!(f, "gap condition fails at k = {k}"),
            Violation::Shor3 { j, k } => write!(f, "product condition fails at (j, k) = ({j}, {k})"),
        }
    }
}

fn shor2_ok(prev: u64, cur: u64, k: usize) -> bool {
    cur >= prev + 2 * k as u64
}

/// The product inequality for `(j, k)`; `n(i)` must be defined for
/// `i ∈ {j − 1, j, k − 1, k}`.
fn shor3_ok(j: usize, k: usize, n: impl Fn(usize) -> u64) -> bool {
    let (nj, njm, nk, nkm) = (n(j) as i128, n(j - 1) as i128, n(k) as i128, n(k - 1) as i128);
    let (j, k) = (j as i128, k as i128);
    (nk - nj) * (2 * nj + nkm - 2 * nk + 2 * k - j) <= nj * (nj - njm - 2 * j)
}

/// First violation in order of `k`, checking the gap condition for `k`
/// before the product conditions `(j, k)` with `j` ascending.
pub fn first_violation(s: &BoundSequence) -> Option<Violation> {
    let n = |i: usize| s.values[i - 2];
    let last = s.last_index()?;
    if n(2) < 11 {
        return Some(Violation::Shor1);
    }
    for k in 3..=last {
        if !shor2_ok(n(k - 1), n(k), k) {
            return Some(Violation::Shor2 { k });
        }
        if let Some(j) = (3..k).find(|&j| !shor3_ok(j, k, n)) {
            return Some(Violation::Shor3 { j, k });
        }
    }
    None
}

/// `Ok(())` for an admissible sequence, otherwise the first violation.
pub fn check_sequence(s: &BoundSequence) -> std::result::Result<(), Violation> {
    first_violation(s).map_or(Ok(()), Err)
}

/// Pairs `(level, value)` that may still lie on an admissible sequence with
/// last value below the current champion. Pairs can only ever be killed.
#[derive(Debug, Clone)]
pub struct ViabilityTable {
    levels: Vec<Option<Level>>,
}

#[derive(Debug, Clone)]
struct Level {
    lo: u64,
    alive: Vec<bool>,
    dead: Vec<bool>,
}

impl ViabilityTable {
    /// An empty table for levels `2..=k`.
    pub fn new(k: usize) -> Self {
        Self {
            levels: vec![None; k + 1],
        }
    }

    pub fn top_level(&self) -> usize {
        self.levels.len() - 1
    }

    /// Declares `lo..=hi` viable at level `x` (an empty level if `lo > hi`).
    /// Each level is initialized once.
    pub fn init_level(&mut self, x: usize, lo: u64, hi: u64) {
        assert!(self.levels[x].is_none(), "level {x} initialized twice");
        let len = if hi >= lo { (hi - lo + 1) as usize } else { 0 };
        self.levels[x] = Some(Level {
            lo,
            alive: vec![true; len],
            dead: vec![false; len],
        });
    }

    fn level(&self, x: usize) -> &Level {
        self.levels[x].as_ref().expect("level not initialized")
    }

    fn level_mut(&mut self, x: usize) -> &mut Level {
        self.levels[x].as_mut().expect("level not initialized")
    }

    pub fn is_viable(&self, x: usize, y: u64) -> bool {
        let l = self.level(x);
        y >= l.lo && l.alive.get((y - l.lo) as usize).copied().unwrap_or(false)
    }

    /// Marks `(x, y)` non-viable. Returns whether it was viable before.
    pub fn kill(&mut self, x: usize, y: u64) -> bool {
        let l = self.level_mut(x);
        let Some(i) = y.checked_sub(l.lo).map(|i| i as usize).filter(|&i| i < l.alive.len()) else {
            return false;
        };
        let was = l.alive[i];
        l.alive[i] = false;
        l.dead[i] = true;
        was
    }

    /// Kills every pair `(x, y')` with `y' >= y`; returns how many died.
    pub fn kill_from(&mut self, x: usize, y: u64) -> usize {
        let hi = self.max_viable(x);
        match hi {
            Some(hi) if hi >= y => (y..=hi).filter(|&v| self.kill(x, v)).count(),
            _ => 0,
        }
    }

    /// Re-asserts that `(x, y)` is viable. Reviving a killed pair is a
    /// logic error and panics.
    pub fn mark_viable(&mut self, x: usize, y: u64) {
        let l = self.level_mut(x);
        let i = (y - l.lo) as usize;
        assert!(!l.dead[i], "pair ({x}, {y}) was killed and cannot become viable again");
        l.alive[i] = true;
    }

    pub fn viable_values(&self, x: usize) -> impl DoubleEndedIterator<Item = u64> + '_ {
        let l = self.level(x);
        l.alive
            .iter()
            .enumerate()
            .filter(|(_, &a)| a)
            .map(move |(i, _)| l.lo + i as u64)
    }

    pub fn min_viable(&self, x: usize) -> Option<u64> {
        self.viable_values(x).next()
    }

    pub fn max_viable(&self, x: usize) -> Option<u64> {
        self.viable_values(x).next_back()
    }

    pub fn viable_count(&self, x: usize) -> usize {
        self.level(x).alive.iter().filter(|&&a| a).count()
    }
}

/// One entry of the minimality log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum LogEvent {
    /// Step 1: the previous champion extended greedily.
    Greedy { sequence: BoundSequence },
    /// Steps 2 and 3: the initial viable range of each level.
    Initialized { ranges: Vec<(usize, u64, u64)> },
    /// Step 4 killed `count` pairs at `level` during sweep `sweep`.
    Killed { sweep: usize, level: usize, count: usize },
    /// Step 5: a better sequence survived the sweep.
    Improved { sweep: usize, sequence: BoundSequence },
    /// Step 5: `level` has no viable pair left, so the champion is optimal.
    Exhausted { sweep: usize, level: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelResult {
    pub k: usize,
    pub n_k: u64,
    pub witness: BoundSequence,
    pub log: Vec<LogEvent>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinimizeOptions {
    /// The value `n_2` is pinned to.
    pub n2: u64,
    /// Check every pair in the witness sweep instead of stopping at the
    /// first viable value of a level. Slower, same result.
    pub exhaustive_sweep: bool,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            n2: 11,
            exhaustive_sweep: false,
        }
    }
}

/// Least admissible `n_k` for `k = 2..=max_k`, each with a witness.
pub fn minimize_nk(max_k: usize) -> Result<Vec<LevelResult>> {
    minimize_nk_with(max_k, &MinimizeOptions::default())
}

pub fn minimize_nk_with(max_k: usize, opts: &MinimizeOptions) -> Result<Vec<LevelResult>> {
    if max_k < 2 {
        return Err(Error::Invalid(format!("K must be at least 2, got {max_k}")));
    }
    Ok(NkSolver::new(opts)?.take(max_k - 1).collect())
}

/// Yields the result for `k = 2, 3, …` in turn, without end.
#[derive(Debug, Clone)]
pub struct NkSolver {
    opts: MinimizeOptions,
    // mins[i] = least n_i found so far
    mins: Vec<u64>,
    last: Option<BoundSequence>,
}

impl NkSolver {
    pub fn new(opts: &MinimizeOptions) -> Result<Self> {
        if opts.n2 < 11 {
            return Err(Error::Invalid(format!("n_2 must be at least 11, got {}", opts.n2)));
        }
        Ok(Self {
            opts: *opts,
            mins: vec![0, 0],
            last: None,
        })
    }
}

impl Iterator for NkSolver {
    type Item = LevelResult;

    fn next(&mut self) -> Option<LevelResult> {
        let r = match &self.last {
            None => LevelResult {
                k: 2,
                n_k: self.opts.n2,
                witness: BoundSequence::new(vec![self.opts.n2]),
                log: Vec::new(),
            },
            Some(prev) => solve_level(prev.len() + 2, prev, &self.mins, &self.opts),
        };
        self.mins.push(r.n_k);
        self.last = Some(r.witness.clone());
        Some(r)
    }
}

fn greedy_extend(prev: &BoundSequence, k: usize) -> BoundSequence {
    let mut v = prev.values().to_vec();
    let last = *v.last().expect("nonempty");
    v.push(last + 2 * k as u64);
    loop {
        let s = BoundSequence::new(v.clone());
        if check_sequence(&s).is_ok() {
            return s;
        }
        *v.last_mut().expect("nonempty") += 1;
    }
}

fn solve_level(k: usize, prev: &BoundSequence, mins: &[u64], opts: &MinimizeOptions) -> LevelResult {
    let mut log = Vec::new();
    // step 1
    let mut champion = greedy_extend(prev, k);
    log.push(LogEvent::Greedy {
        sequence: champion.clone(),
    });
    let kappa = champion.get(k).expect("length k−1");

    // steps 2 and 3
    let mut table = ViabilityTable::new(k);
    table.init_level(2, opts.n2, opts.n2);
    let lo_k = mins[k - 1] + 2 * k as u64;
    table.init_level(k, lo_k, kappa.saturating_sub(1));
    let mut ranges = vec![(k, lo_k, kappa.saturating_sub(1))];
    for i in (3..k).rev() {
        let lo = mins[i];
        let hi = table.max_viable(i + 1).and_then(|m| m.checked_sub(2 * i as u64 + 2));
        match hi {
            Some(hi) => {
                table.init_level(i, lo, hi);
                ranges.push((i, lo, hi));
            }
            None => {
                table.init_level(i, 1, 0);
                ranges.push((i, 1, 0));
            }
        }
    }
    ranges.push((2, opts.n2, opts.n2));
    ranges.reverse();
    log.push(LogEvent::Initialized { ranges });

    let mut sweep = 0;
    loop {
        sweep += 1;
        // step 5 check before sweeping: a level may already be empty
        if let Some(level) = (2..=k).find(|&x| table.viable_count(x) == 0) {
            log.push(LogEvent::Exhausted { sweep, level });
            break;
        }
        // step 4
        let mut witness_from_two = None;
        for i in (2..k).rev() {
            let values: Vec<u64> = table.viable_values(i).rev().collect();
            let mut killed = 0;
            let mut settled = false;
            for y in values {
                if settled {
                    continue;
                }
                match find_tail(&table, i, y, k) {
                    Some(tail) => {
                        if i == 2 {
                            witness_from_two = Some(tail);
                        }
                        // smaller values at this level reuse the same tail
                        settled = !opts.exhaustive_sweep;
                    }
                    None => {
                        table.kill(i, y);
                        killed += 1;
                    }
                }
            }
            if killed > 0 {
                log.push(LogEvent::Killed { sweep, level: i, count: killed });
            }
        }
        // step 5
        if let Some(level) = (2..=k).find(|&x| table.viable_count(x) == 0) {
            log.push(LogEvent::Exhausted { sweep, level });
            break;
        }
        let tail = witness_from_two.expect("(2, n_2) survives when no level is empty");
        let t_k = *tail.last().expect("nonempty");
        champion = BoundSequence::new(tail);
        debug_assert!(check_sequence(&champion).is_ok());
        log.push(LogEvent::Improved {
            sweep,
            sequence: champion.clone(),
        });
        table.kill_from(k, t_k);
    }
    LevelResult {
        k,
        n_k: champion.get(k).expect("length k−1"),
        witness: champion,
        log,
    }
}

/// A sequence `t_i = y, t_{i+1}, …, t_k` of viable pairs satisfying every
/// condition that involves only those entries. Values are tried in
/// ascending order.
fn find_tail(table: &ViabilityTable, i: usize, y: u64, k: usize) -> Option<Vec<u64>> {
    let mut n = vec![0u64; k + 1];
    n[i] = y;
    let hi: Vec<u64> = (0..=k)
        .map(|x| if x > i { table.max_viable(x).unwrap_or(0) } else { 0 })
        .collect();
    if extend(table, &mut n, &hi, i, i + 1, k) {
        Some(n[i..].to_vec())
    } else {
        None
    }
}

fn extend(table: &ViabilityTable, n: &mut [u64], hi: &[u64], i: usize, x: usize, k: usize) -> bool {
    if x > k {
        return true;
    }
    let start = n[x - 1] + 2 * x as u64;
    if start > hi[x] {
        return false;
    }
    for t in start..=hi[x] {
        if !table.is_viable(x, t) {
            continue;
        }
        n[x] = t;
        if (i + 1..x).all(|j| shor3_ok(j, x, |m| n[m])) && extend(table, n, hi, i, x + 1, k) {
            return true;
        }
    }
    false
}

/// Exact minima of `n_k` for `k = 2..=max_k` by plain enumeration, with `n_2`
/// free from 11 upwards. Only small `K` is feasible.
pub fn brute_force_min_nk(max_k: usize) -> Result<Vec<u64>> {
    brute_force_min_nk_with_prefix(max_k, &[])
}

/// As [`brute_force_min_nk`], with `n_2, n_3, …` pinned to `prefix`.
/// Entry `k − 2` of the result is the least `n_k` over sequences of length
/// `k − 1` that extend the prefix, for every `k` past the prefix.
pub fn brute_force_min_nk_with_prefix(max_k: usize, prefix: &[u64]) -> Result<Vec<u64>> {
    if max_k > BRUTE_FORCE_MAX_K {
        return Err(Error::BruteForceLimit {
            k: max_k,
            max: BRUTE_FORCE_MAX_K,
        });
    }
    if max_k < 2 {
        return Err(Error::Invalid(format!("K must be at least 2, got {max_k}")));
    }
    let mut best = Vec::with_capacity(max_k - 1);
    for k in 2..=max_k {
        if k - 1 <= prefix.len() {
            let s = BoundSequence::new(prefix[..k - 1].to_vec());
            if let Err(v) = check_sequence(&s) {
                return Err(Error::Infeasible(format!("prefix {s}: {v}")));
            }
            best.push(prefix[k - 2]);
            continue;
        }
        // doubling extension of any admissible sequence stays admissible,
        // so this bounds n_k from above
        let mut cap = best.last().map_or(11, |&b| 2 * b + 2 * k as u64);
        let mut n = vec![0u64; k + 1];
        enumerate(&mut n, 2, k, prefix, &mut cap);
        best.push(cap);
    }
    Ok(best)
}

/// Lowers `cap` to the least admissible `n_k` not above it.
fn enumerate(n: &mut [u64], x: usize, k: usize, prefix: &[u64], cap: &mut u64) {
    let tail: u64 = (x + 1..=k).map(|y| 2 * y as u64).sum();
    let (lo, hi) = match prefix.get(x - 2) {
        Some(&p) => (p, p),
        None if x == 2 => (11, cap.saturating_sub(tail)),
        None => (n[x - 1] + 2 * x as u64, cap.saturating_sub(tail)),
    };
    for t in lo..=hi {
        if t + tail > *cap {
            break;
        }
        n[x] = t;
        if x > 2 && !(shor2_ok(n[x - 1], t, x) && (3..x).all(|j| shor3_ok(j, x, |m| n[m]))) {
            continue;
        }
        if x == k {
            *cap = t;
            return;
        }
        enumerate(n, x + 1, k, prefix, cap);
    }
}

/// Which rule produced a guaranteed length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GuaranteeRule {
    /// Orders up to 11 have a near transversal.
    SmallOrder,
    /// From the `n_k` table.
    Table { k: usize },
    /// `⌈n − √n⌉`.
    SquareRoot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Guarantee {
    pub n: u64,
    pub length: u64,
    pub rule: GuaranteeRule,
}

/// `⌈n − √n⌉` in integer arithmetic.
pub fn ceil_n_minus_sqrt(n: u64) -> u64 {
    n - n.isqrt()
}

/// Guaranteed partial transversal length for every Latin array of order `n`,
/// using the shipped table.
pub fn guarantee_length(n: u64) -> Guarantee {
    guarantee_length_with(n, &MIN_NK_TABLE)
}

/// As [`guarantee_length`] with `table[i] = n_{i+2}`. On ties the earlier
/// rule in the order small order, table, square root wins.
pub fn guarantee_length_with(n: u64, table: &[u64]) -> Guarantee {
    let mut best = Guarantee {
        n,
        length: ceil_n_minus_sqrt(n),
        rule: GuaranteeRule::SquareRoot,
    };
    if let Some(i) = table.iter().position(|&v| v > n) {
        let k = i + 2;
        let length = (n + 1).saturating_sub(k as u64);
        if length >= best.length {
            best = Guarantee {
                n,
                length,
                rule: GuaranteeRule::Table { k },
            };
        }
    }
    if (1..=11).contains(&n) && n - 1 >= best.length {
        best = Guarantee {
            n,
            length: n - 1,
            rule: GuaranteeRule::SmallOrder,
        };
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(v: &[u64]) -> BoundSequence {
        BoundSequence::new(v.to_vec())
    }

    #[test]
    fn check_examples() {
        assert_eq!(check_sequence(&seq(&[11, 17])), Ok(()));
        assert_eq!(check_sequence(&seq(&[11, 17, 31, 41])), Ok(()));
        assert_eq!(check_sequence(&seq(&[11, 17, 28, 41])), Err(Violation::Shor3 { j: 4, k: 5 }));
        assert_eq!(check_sequence(&seq(&[10])), Err(Violation::Shor1));
        assert_eq!(check_sequence(&seq(&[11, 16])), Err(Violation::Shor2 { k: 3 }));
        assert_eq!(check_sequence(&seq(&[])), Ok(()));
    }

    #[test]
    fn product_arithmetic() {
        // j = 4, k = 5 for [11,17,31,41]: 10 * 17 <= 31 * 6
        let n = |i: usize| [0, 0, 11, 17, 31, 41][i];
        assert!(shor3_ok(4, 5, n));
        let m = |i: usize| [0, 0, 11, 17, 28, 41][i];
        assert!(!shor3_ok(4, 5, m));
    }

    #[test]
    fn parse_sequences() {
        assert_eq!("11,17,28".parse::<BoundSequence>().unwrap(), seq(&[11, 17, 28]));
        assert_eq!("[11, 17]".parse::<BoundSequence>().unwrap(), seq(&[11, 17]));
        assert!("11,x".parse::<BoundSequence>().is_err());
        assert_eq!(seq(&[11, 17]).to_string(), "[11,17]");
    }

    #[test]
    fn doubling_extension_stays_admissible() {
        for r in minimize_nk(8).unwrap() {
            let mut v = r.witness.values().to_vec();
            let k = r.k + 1;
            v.push(2 * r.n_k + 2 * k as u64);
            assert_eq!(check_sequence(&seq(&v)), Ok(()));
        }
    }

    #[test]
    fn small_k_matches_brute_force() {
        let solved = minimize_nk(BRUTE_FORCE_MAX_K).unwrap();
        let brute = brute_force_min_nk(BRUTE_FORCE_MAX_K).unwrap();
        let values: Vec<u64> = solved.iter().map(|r| r.n_k).collect();
        assert_eq!(values, brute);
        assert_eq!(values, MIN_NK_TABLE[..5]);
        for r in &solved {
            assert_eq!(check_sequence(&r.witness), Ok(()));
            assert_eq!(r.witness.len(), r.k - 1);
        }
        assert_eq!(solved[2].witness, seq(&[11, 17, 28]));
    }

    #[test]
    fn forced_prefixes() {
        // with n_4 = 28 the fifth term cannot reach 41
        let forced = brute_force_min_nk_with_prefix(5, &[11, 17, 28]).unwrap();
        assert!(forced[3] > 41);
        let forced = brute_force_min_nk_with_prefix(5, &[11, 17, 31]).unwrap();
        assert_eq!(forced[3], 41);
        assert!(matches!(brute_force_min_nk(7), Err(Error::BruteForceLimit { k: 7, max: 6 })));
        assert!(matches!(brute_force_min_nk_with_prefix(4, &[11, 16]), Err(Error::Infeasible(_))));
    }

    #[test]
    fn sweep_shortcut_agrees_with_full_sweep() {
        let fast = minimize_nk(9).unwrap();
        let slow = minimize_nk_with(
            9,
            &MinimizeOptions {
                exhaustive_sweep: true,
                ..Default::default()
            },
        )
        .unwrap();
        let f: Vec<_> = fast.iter().map(|r| (r.n_k, r.witness.clone())).collect();
        let s: Vec<_> = slow.iter().map(|r| (r.n_k, r.witness.clone())).collect();
        assert_eq!(f, s);
    }

    #[test]
    fn first_twelve_levels() {
        let solved = minimize_nk(12).unwrap();
        let values: Vec<u64> = solved.iter().map(|r| r.n_k).collect();
        assert_eq!(values, MIN_NK_TABLE[..11]);
        for r in &solved {
            assert_eq!(check_sequence(&r.witness), Ok(()));
        }
    }

    #[test]
    fn other_n2_values() {
        assert!(minimize_nk_with(3, &MinimizeOptions { n2: 10, ..Default::default() }).is_err());
        let r = minimize_nk_with(4, &MinimizeOptions { n2: 12, ..Default::default() }).unwrap();
        for l in &r {
            assert_eq!(l.witness.get(2), Some(12));
            assert_eq!(check_sequence(&l.witness), Ok(()));
        }
        // a larger start can only push later terms up
        assert!(r[2].n_k >= 28);
    }

    #[test]
    fn viability_is_monotone() {
        let mut t = ViabilityTable::new(3);
        t.init_level(3, 20, 25);
        assert!(t.kill(3, 22));
        assert!(!t.kill(3, 22));
        assert_eq!(t.kill_from(3, 24), 2);
        assert_eq!(t.viable_values(3).collect::<Vec<_>>(), vec![20, 21, 23]);
        t.mark_viable(3, 20);
    }

    #[test]
    #[should_panic(expected = "cannot become viable again")]
    fn reviving_a_dead_pair_panics() {
        let mut t = ViabilityTable::new(3);
        t.init_level(3, 20, 25);
        t.kill(3, 21);
        t.mark_viable(3, 21);
    }

    #[test]
    fn guarantee_examples() {
        assert_eq!(guarantee_length(11), Guarantee { n: 11, length: 10, rule: GuaranteeRule::SmallOrder });
        assert_eq!(guarantee_length(10).rule, GuaranteeRule::SmallOrder);
        assert_eq!(guarantee_length(100), Guarantee { n: 100, length: 93, rule: GuaranteeRule::Table { k: 8 } });
        assert_eq!(
            guarantee_length(1448),
            Guarantee { n: 1448, length: 1428, rule: GuaranteeRule::Table { k: 21 } }
        );
        // past the table only the square root rule is left
        assert_eq!(guarantee_length(1449), Guarantee { n: 1449, length: 1449 - 38, rule: GuaranteeRule::SquareRoot });
        assert_eq!(guarantee_length(1).length, 0);
    }

    #[test]
    fn square_root_rule_is_a_ceiling() {
        for n in 0u64..100_000 {
            let exact = (n as f64 - (n as f64).sqrt()).ceil() as u64;
            assert_eq!(ceil_n_minus_sqrt(n), exact, "n = {n}");
        }
    }

    #[test]
    fn longer_tables_never_hurt() {
        for n in 1u64..=2000 {
            let mut last = 0;
            for len in 0..=MIN_NK_TABLE.len() {
                let g = guarantee_length_with(n, &MIN_NK_TABLE[..len]).length;
                assert!(g >= last, "n = {n}, table length {len}");
                last = g;
            }
        }
    }
}
