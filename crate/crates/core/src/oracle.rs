//! Exact brute-force answers for small arrays.
//!
//! These are deliberately simple exhaustive searches. They serve as
//! standalone tools and as the independent check for the #-swap search and
//! the constructions.

use serde::{Deserialize, Serialize};

use crate::array::{CellState, DiagonalPerm, Entry, PartialLatinArray, PartialTransversal};
use crate::error::{Error, Result};

/// Default order cap for the exhaustive searches.
pub const DEFAULT_ORDER_CAP: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    pub order_cap: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            order_cap: DEFAULT_ORDER_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    Diagonal(DiagonalPerm),
    Transversal(PartialTransversal),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult {
    pub value: usize,
    pub witness: Witness,
    pub nodes_explored: u64,
}

/// Maximum diagonal weight by branch and bound over rows in order, columns
/// in increasing order. A branch is cut when its distinct count plus the
/// rows still to place cannot beat the best diagonal found.
pub fn max_diagonal_weight(a: &PartialLatinArray, cfg: &OracleConfig) -> Result<OracleResult> {
    let n = a.order()?;
    if n > cfg.order_cap {
        return Err(Error::CapExceeded {
            order: n,
            cap: cfg.order_cap,
        });
    }
    struct Bnb<'a> {
        a: &'a PartialLatinArray,
        n: usize,
        cols_used: Vec<bool>,
        counts: Vec<u32>,
        distinct: usize,
        current: Vec<usize>,
        best: Option<(usize, Vec<usize>)>,
        nodes: u64,
    }
    impl Bnb<'_> {
        fn go(&mut self, row: usize) {
            self.nodes += 1;
            if row == self.n {
                if self.best.as_ref().is_none_or(|(w, _)| self.distinct > *w) {
                    self.best = Some((self.distinct, self.current.clone()));
                }
                return;
            }
            for col in 0..self.n {
                if self.cols_used[col] {
                    continue;
                }
                if let Some((w, _)) = &self.best {
                    if self.distinct + (self.n - row) <= *w {
                        return;
                    }
                }
                let sym = self.a.get(row, col).symbol();
                self.cols_used[col] = true;
                self.current.push(col);
                if let Some(s) = sym {
                    self.counts[s as usize] += 1;
                    if self.counts[s as usize] == 1 {
                        self.distinct += 1;
                    }
                }
                self.go(row + 1);
                if let Some(s) = sym {
                    self.counts[s as usize] -= 1;
                    if self.counts[s as usize] == 0 {
                        self.distinct -= 1;
                    }
                }
                self.current.pop();
                self.cols_used[col] = false;
            }
        }
    }
    let mut b = Bnb {
        a,
        n,
        cols_used: vec![false; n],
        counts: vec![0; a.universe()],
        distinct: 0,
        current: Vec::with_capacity(n),
        best: None,
        nodes: 0,
    };
    b.go(0);
    let (value, cols) = b.best.expect("every square array has a diagonal");
    Ok(OracleResult {
        value,
        witness: Witness::Diagonal(DiagonalPerm::new(cols)?),
        nodes_explored: b.nodes,
    })
}

/// Length of the longest partial transversal, by backtracking over rows
/// (each row contributes one concrete cell or is skipped).
pub fn max_partial_transversal_length(a: &PartialLatinArray, cfg: &OracleConfig) -> Result<OracleResult> {
    if a.rows() > cfg.order_cap {
        return Err(Error::CapExceeded {
            order: a.rows(),
            cap: cfg.order_cap,
        });
    }
    struct Bt<'a> {
        a: &'a PartialLatinArray,
        cols_used: Vec<bool>,
        syms_used: Vec<bool>,
        current: Vec<Entry>,
        best: Vec<Entry>,
        limit: usize,
        nodes: u64,
    }
    impl Bt<'_> {
        fn go(&mut self, row: usize) {
            self.nodes += 1;
            if self.current.len() > self.best.len() {
                self.best = self.current.clone();
            }
            if row == self.a.rows()
                || self.best.len() == self.limit
                || self.current.len() + (self.a.rows() - row) <= self.best.len()
            {
                return;
            }
            for col in 0..self.a.cols() {
                if self.cols_used[col] {
                    continue;
                }
                let CellState::Symbol(s) = self.a.get(row, col) else {
                    continue;
                };
                if self.syms_used[s as usize] {
                    continue;
                }
                self.cols_used[col] = true;
                self.syms_used[s as usize] = true;
                self.current.push(Entry { row, col, symbol: s });
                self.go(row + 1);
                self.current.pop();
                self.syms_used[s as usize] = false;
                self.cols_used[col] = false;
            }
            self.go(row + 1);
        }
    }
    let mut b = Bt {
        a,
        cols_used: vec![false; a.cols()],
        syms_used: vec![false; a.universe()],
        current: Vec::new(),
        best: Vec::new(),
        limit: a.rows().min(a.cols()).min(a.universe()),
        nodes: 0,
    };
    b.go(0);
    let value = b.best.len();
    Ok(OracleResult {
        value,
        witness: Witness::Transversal(PartialTransversal::new(b.best)?),
        nodes_explored: b.nodes,
    })
}

/// True when the square array has a diagonal of full weight.
pub fn has_transversal(a: &PartialLatinArray, cfg: &OracleConfig) -> Result<bool> {
    let n = a.order()?;
    Ok(max_diagonal_weight(a, cfg)?.value == n)
}

/// Rewrites `d` so that no symbol occurs more than twice on it, without
/// losing weight and keeping the cell of row `preserve`.
///
/// Each round takes the smallest row `r1 != preserve` whose symbol occurs
/// at least three times, and the smallest row `r2 != preserve` such that
/// `L(r1, d[r2])` is missing from the diagonal and `L(r2, d[r1])` occurs at
/// most once on it; the two rows then exchange columns. Every round removes
/// at least one cell carrying an over-represented symbol.
pub fn normalize_diagonal(a: &PartialLatinArray, d: &DiagonalPerm, preserve: usize) -> Result<DiagonalPerm> {
    normalize_diagonal_traced(a, d, preserve).map(|(d, _)| d)
}

/// As [`normalize_diagonal`], also returning the number of exchanges made.
pub fn normalize_diagonal_traced(
    a: &PartialLatinArray,
    d: &DiagonalPerm,
    preserve: usize,
) -> Result<(DiagonalPerm, usize)> {
    let n = a.order()?;
    if !a.is_fully_filled() || !a.check_latin().is_latin() {
        return Err(Error::NotFilledLatin);
    }
    if d.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: d.len(),
        });
    }
    if preserve >= n {
        return Err(Error::OutOfBounds { row: preserve, col: 0 });
    }
    let sym = |r: usize, c: usize| a.get(r, c).symbol().unwrap() as usize;
    let mut cols = d.columns().to_vec();
    let mut swaps = 0;
    loop {
        let mut mult = vec![0usize; a.universe()];
        for (r, &c) in cols.iter().enumerate() {
            mult[sym(r, c)] += 1;
        }
        let Some(r1) = (0..n).find(|&r| r != preserve && mult[sym(r, cols[r])] >= 3) else {
            break;
        };
        let r2 = (0..n)
            .find(|&r2| r2 != preserve && mult[sym(r1, cols[r2])] == 0 && mult[sym(r2, cols[r1])] <= 1)
            .ok_or_else(|| Error::Invalid(format!("no exchange row for row {r1}")))?;
        cols.swap(r1, r2);
        swaps += 1;
        if swaps > n {
            return Err(Error::Invalid("normalization did not terminate".into()));
        }
    }
    Ok((DiagonalPerm::new(cols)?, swaps))
}
