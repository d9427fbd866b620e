#![allow(dead_code)]

use hashswap::{CellState, PartialLatinArray, Symbol};
use rand::seq::SliceRandom;
use rand::Rng;

/// Random fully filled Latin square, row by row.
pub fn random_latin<R: Rng>(n: usize, rng: &mut R) -> PartialLatinArray {
    let empty = PartialLatinArray::empty(n, n, n);
    complete_latin(&empty, n, n, Some(rng)).expect("an empty square always completes")
}

/// Completes `a` to a Latin square on `symbols` symbols, with markers
/// restricted to `0..marker_pool`. Cells are filled most-constrained first;
/// symbol order is shuffled when `rng` is given.
pub fn complete_latin<R: Rng>(
    a: &PartialLatinArray,
    symbols: usize,
    marker_pool: usize,
    mut rng: Option<&mut R>,
) -> Option<PartialLatinArray> {
    let n = a.rows();
    let mut grid: Vec<Option<usize>> = Vec::with_capacity(n * n);
    let mut allowed_max = vec![symbols; n * n];
    for r in 0..n {
        for c in 0..n {
            match a.get(r, c) {
                CellState::Symbol(s) => grid.push(Some(s as usize)),
                CellState::Marker => {
                    grid.push(None);
                    allowed_max[r * n + c] = marker_pool;
                }
                CellState::Empty => grid.push(None),
            }
        }
    }
    let mut row_used = vec![vec![false; symbols]; n];
    let mut col_used = vec![vec![false; symbols]; n];
    for r in 0..n {
        for c in 0..n {
            if let Some(s) = grid[r * n + c] {
                if row_used[r][s] || col_used[c][s] {
                    return None;
                }
                row_used[r][s] = true;
                col_used[c][s] = true;
            }
        }
    }
    let mut order: Vec<usize> = (0..symbols).collect();
    if let Some(rng) = rng.as_deref_mut() {
        order.shuffle(rng);
    }
    if !fill(&mut grid, &allowed_max, &mut row_used, &mut col_used, n, &order) {
        return None;
    }
    let rows: Vec<Vec<Symbol>> = (0..n)
        .map(|r| (0..n).map(|c| grid[r * n + c].unwrap() as Symbol).collect())
        .collect();
    Some(PartialLatinArray::from_rows(&rows).unwrap())
}

fn fill(
    grid: &mut [Option<usize>],
    allowed_max: &[usize],
    row_used: &mut [Vec<bool>],
    col_used: &mut [Vec<bool>],
    n: usize,
    order: &[usize],
) -> bool {
    let options = |i: usize, row_used: &[Vec<bool>], col_used: &[Vec<bool>]| {
        let (r, c) = (i / n, i % n);
        order
            .iter()
            .copied()
            .filter(|&s| s < allowed_max[i] && !row_used[r][s] && !col_used[c][s])
            .collect::<Vec<_>>()
    };
    let mut best: Option<(usize, Vec<usize>)> = None;
    for i in 0..grid.len() {
        if grid[i].is_some() {
            continue;
        }
        let opts = options(i, row_used, col_used);
        if best.as_ref().is_none_or(|(_, b)| opts.len() < b.len()) {
            let done = opts.len() <= 1;
            best = Some((i, opts));
            if done {
                break;
            }
        }
    }
    let Some((i, opts)) = best else {
        return true;
    };
    let (r, c) = (i / n, i % n);
    for s in opts {
        grid[i] = Some(s);
        row_used[r][s] = true;
        col_used[c][s] = true;
        if fill(grid, allowed_max, row_used, col_used, n, order) {
            return true;
        }
        row_used[r][s] = false;
        col_used[c][s] = false;
        grid[i] = None;
    }
    false
}
