//! Near transversals in small Latin arrays.
//!
//! * [`array`]: partial Latin arrays, diagonals, partial transversals and
//!   the grid file format.
//! * [`oracle`]: exact brute-force answers used to cross-check everything else.
//! * [`search`]: the #-swap search proving that Latin arrays of small order
//!   have a diagonal of weight `n−1`.
//! * [`construction`]: column-Latin arrays without transversals, with
//!   certificates.
//! * [`bounds`]: minimal `n_k` sequences and the partial transversal
//!   lengths they guarantee.

pub mod array;
pub mod bounds;
pub mod construction;
pub mod error;
pub mod oracle;
pub mod search;

pub use array::{parse_array, parse_grid, CellState, DiagonalPerm, Entry, PartialLatinArray, PartialTransversal, Symbol};
pub use error::{Error, ParseError, Result};

#[cfg(test)]
pub(crate) mod testutil {
    use rand::seq::SliceRandom;
    use rand::Rng;

    use crate::array::{PartialLatinArray, Symbol};

    /// A random fully filled Latin square, built row by row. Every Latin
    /// rectangle extends, so each row only needs a local backtrack.
    pub fn random_latin<R: Rng>(n: usize, rng: &mut R) -> PartialLatinArray {
        let mut rows: Vec<Vec<Symbol>> = Vec::with_capacity(n);
        let mut col_used = vec![vec![false; n]; n];
        for _ in 0..n {
            let mut row = vec![0 as Symbol; n];
            let mut sym_used = vec![false; n];
            let orders: Vec<Vec<usize>> = (0..n)
                .map(|_| {
                    let mut o: Vec<usize> = (0..n).collect();
                    o.shuffle(rng);
                    o
                })
                .collect();
            assert!(fill_row(0, &orders, &col_used, &mut sym_used, &mut row));
            for (c, &s) in row.iter().enumerate() {
                col_used[c][s as usize] = true;
            }
            rows.push(row);
        }
        PartialLatinArray::from_rows(&rows).unwrap()
    }

    fn fill_row(
        c: usize,
        orders: &[Vec<usize>],
        col_used: &[Vec<bool>],
        sym_used: &mut [bool],
        row: &mut [Symbol],
    ) -> bool {
        if c == row.len() {
            return true;
        }
        for &s in &orders[c] {
            if sym_used[s] || col_used[c][s] {
                continue;
            }
            sym_used[s] = true;
            row[c] = s as Symbol;
            if fill_row(c + 1, orders, col_used, sym_used, row) {
                return true;
            }
            sym_used[s] = false;
        }
        false
    }
}
