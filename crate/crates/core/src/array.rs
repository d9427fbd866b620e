//! Partial Latin arrays, diagonals and partial transversals.
//!
//! Cells are either empty, a concrete symbol, or a *marker*: a cell known to
//! hold some symbol from the duplicate pool of a search, value unknown.
//! Markers are wildcards for every structural check; they never conflict
//! with a symbol and never join a partial transversal.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, ParseErrorKind, Result};

/// Symbols are dense integers `0..universe`.
pub type Symbol = u16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CellState {
    Empty,
    Marker,
    Symbol(Symbol),
}

impl CellState {
    pub fn symbol(self) -> Option<Symbol> {
        match self {
            CellState::Symbol(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_concrete(self) -> bool {
        matches!(self, CellState::Symbol(_))
    }

    /// Concrete or marker.
    pub fn is_filled(self) -> bool {
        !matches!(self, CellState::Empty)
    }
}

impl fmt::Display for CellState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellState::Empty => f.write_str("."),
            CellState::Marker => f.write_str("x"),
            CellState::Symbol(s) => write!(f, "{s}"),
        }
    }
}

/// A rectangular grid of cells over the symbols `0..universe`.
///
/// The type itself only guarantees the symbol range; whether rows and
/// columns are Latin is reported by [`PartialLatinArray::check_latin`] and
/// enforced by [`parse_array`]. Column-Latin constructions that are not
/// row-Latin are therefore representable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartialLatinArray {
    rows: usize,
    cols: usize,
    universe: usize,
    cells: Vec<CellState>,
}

impl PartialLatinArray {
    /// An all-empty array.
    pub fn empty(rows: usize, cols: usize, universe: usize) -> Self {
        assert!(rows > 0 && cols > 0, "dimensions must be positive");
        Self {
            rows,
            cols,
            universe: universe.max(1),
            cells: vec![CellState::Empty; rows * cols],
        }
    }

    /// Builds a fully filled array from rows of symbols. The universe is
    /// `max symbol + 1`.
    pub fn from_rows<R: AsRef<[Symbol]>>(rows: &[R]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        if nrows == 0 || ncols == 0 {
            return Err(Error::Invalid("array must be nonempty".into()));
        }
        let mut cells = Vec::with_capacity(nrows * ncols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != ncols {
                return Err(Error::DimensionMismatch {
                    expected: ncols,
                    found: r.len(),
                });
            }
            cells.extend(r.iter().map(|&s| CellState::Symbol(s)));
        }
        let universe = default_universe(&cells);
        Ok(Self {
            rows: nrows,
            cols: ncols,
            universe,
            cells,
        })
    }

    /// Builds an array from raw cells in row-major order.
    pub fn from_cells(rows: usize, cols: usize, universe: usize, cells: Vec<CellState>) -> Result<Self> {
        if rows == 0 || cols == 0 || universe == 0 {
            return Err(Error::Invalid("dimensions and universe must be positive".into()));
        }
        if cells.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: cells.len(),
            });
        }
        if let Some(s) = cells.iter().filter_map(|c| c.symbol()).find(|&s| s as usize >= universe) {
            return Err(Error::Invalid(format!("symbol {s} is not below universe {universe}")));
        }
        Ok(Self {
            rows,
            cols,
            universe,
            cells,
        })
    }

    /// The Cayley table of the cyclic group of order `n`.
    pub fn cyclic(n: usize) -> Self {
        let cells = (0..n)
            .flat_map(|r| (0..n).map(move |c| CellState::Symbol(((r + c) % n) as Symbol)))
            .collect();
        Self {
            rows: n,
            cols: n,
            universe: n,
            cells,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Order of a square array.
    pub fn order(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn get(&self, row: usize, col: usize) -> CellState {
        self.cells[row * self.cols + col]
    }

    /// Overwrites a cell. Panics if the symbol is outside the universe.
    pub fn set(&mut self, row: usize, col: usize, state: CellState) {
        if let CellState::Symbol(s) = state {
            assert!((s as usize) < self.universe, "symbol {s} outside universe {}", self.universe);
        }
        self.cells[row * self.cols + col] = state;
    }

    pub fn cells(&self) -> &[CellState] {
        &self.cells
    }

    pub fn row(&self, row: usize) -> &[CellState] {
        &self.cells[row * self.cols..(row + 1) * self.cols]
    }

    pub fn concrete_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_concrete()).count()
    }

    pub fn marker_count(&self) -> usize {
        self.cells.iter().filter(|c| **c == CellState::Marker).count()
    }

    pub fn is_fully_filled(&self) -> bool {
        self.cells.iter().all(|c| c.is_concrete())
    }

    fn check_cell(&self, row: usize, col: usize) -> Result<()> {
        if row >= self.rows || col >= self.cols {
            return Err(Error::OutOfBounds { row, col });
        }
        Ok(())
    }

    /// Reports every concrete symbol that repeats an earlier one in its row
    /// or column. Markers and empty cells are exempt.
    pub fn check_latin(&self) -> LatinReport {
        let mut report = LatinReport::default();
        let mut seen = vec![false; self.universe];
        for r in 0..self.rows {
            seen.fill(false);
            for c in 0..self.cols {
                if let Some(s) = self.get(r, c).symbol() {
                    if std::mem::replace(&mut seen[s as usize], true) {
                        report.row_violations.push((r, c));
                    }
                }
            }
        }
        for c in 0..self.cols {
            seen.fill(false);
            for r in 0..self.rows {
                if let Some(s) = self.get(r, c).symbol() {
                    if std::mem::replace(&mut seen[s as usize], true) {
                        report.col_violations.push((r, c));
                    }
                }
            }
        }
        report
    }

    /// Number of distinct concrete symbols on the diagonal.
    pub fn diagonal_weight(&self, diag: &DiagonalPerm) -> Result<usize> {
        let n = self.order()?;
        if diag.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: diag.len(),
            });
        }
        let mut seen = vec![false; self.universe];
        let mut weight = 0;
        for (r, &c) in diag.columns().iter().enumerate() {
            if let Some(s) = self.get(r, c).symbol() {
                if !std::mem::replace(&mut seen[s as usize], true) {
                    weight += 1;
                }
            }
        }
        Ok(weight)
    }

    /// Number of pool symbols that do not occur in row `row` or column `col`.
    pub fn liberties(&self, row: usize, col: usize, pool: impl IntoIterator<Item = Symbol>) -> Result<usize> {
        self.check_cell(row, col)?;
        if self.get(row, col).is_concrete() {
            return Err(Error::CellConcrete { row, col });
        }
        let mut blocked = vec![false; self.universe];
        for c in 0..self.cols {
            if let Some(s) = self.get(row, c).symbol() {
                blocked[s as usize] = true;
            }
        }
        for r in 0..self.rows {
            if let Some(s) = self.get(r, col).symbol() {
                blocked[s as usize] = true;
            }
        }
        Ok(pool
            .into_iter()
            .filter(|&s| blocked.get(s as usize).map_or(true, |b| !b))
            .count())
    }

    /// All partial transversals of exactly `len` entries over concrete cells,
    /// optionally required to contain `through`. Results are in
    /// lexicographic order of their row-sorted entry lists.
    pub fn partial_transversals(&self, len: usize, through: Option<(usize, usize)>) -> Result<Vec<PartialTransversal>> {
        let n = self.order()?;
        if len > n {
            return Err(Error::Invalid(format!("length {len} exceeds order {n}")));
        }
        if let Some((r, c)) = through {
            self.check_cell(r, c)?;
            if !self.get(r, c).is_concrete() {
                return Err(Error::CellNotConcrete { row: r, col: c });
            }
        }
        let mut out = Vec::new();
        let mut stack = Vec::with_capacity(len);
        let mut used_cols = vec![false; n];
        let mut used_syms = vec![false; self.universe];
        self.pt_rec(
            0,
            len,
            through,
            &mut stack,
            &mut used_cols,
            &mut used_syms,
            &mut out,
        );
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn pt_rec(
        &self,
        row: usize,
        len: usize,
        through: Option<(usize, usize)>,
        stack: &mut Vec<Entry>,
        used_cols: &mut [bool],
        used_syms: &mut [bool],
        out: &mut Vec<PartialTransversal>,
    ) {
        if stack.len() == len {
            out.push(PartialTransversal { entries: stack.clone() });
            return;
        }
        if self.rows - row < len - stack.len() {
            return;
        }
        let forced = through.filter(|&(r, _)| r == row);
        for col in 0..self.cols {
            if forced.is_some_and(|(_, c)| c != col) || used_cols[col] {
                continue;
            }
            let Some(s) = self.get(row, col).symbol() else {
                continue;
            };
            if used_syms[s as usize] {
                continue;
            }
            used_cols[col] = true;
            used_syms[s as usize] = true;
            stack.push(Entry { row, col, symbol: s });
            self.pt_rec(row + 1, len, through, stack, used_cols, used_syms, out);
            stack.pop();
            used_cols[col] = false;
            used_syms[s as usize] = false;
        }
        if forced.is_none() {
            self.pt_rec(row + 1, len, through, stack, used_cols, used_syms, out);
        }
    }

    /// Grid-file text: header, then one line per row, single spaces, `\n`
    /// endings. The universe is written only when it differs from
    /// `max symbol + 1`.
    pub fn to_grid_string(&self) -> String {
        let mut out = String::new();
        if self.universe == default_universe(&self.cells) {
            out.push_str(&format!("{} {}\n", self.rows, self.cols));
        } else {
            out.push_str(&format!("{} {} {}\n", self.rows, self.cols, self.universe));
        }
        for r in 0..self.rows {
            let line: Vec<String> = self.row(r).iter().map(ToString::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for PartialLatinArray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_grid_string())
    }
}

fn default_universe(cells: &[CellState]) -> usize {
    cells
        .iter()
        .filter_map(|c| c.symbol())
        .max()
        .map_or(1, |m| m as usize + 1)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LatinReport {
    /// Cells repeating a symbol seen earlier in the same row.
    pub row_violations: Vec<(usize, usize)>,
    /// Cells repeating a symbol seen earlier in the same column.
    pub col_violations: Vec<(usize, usize)>,
}

impl LatinReport {
    pub fn is_row_latin(&self) -> bool {
        self.row_violations.is_empty()
    }

    pub fn is_column_latin(&self) -> bool {
        self.col_violations.is_empty()
    }

    pub fn is_latin(&self) -> bool {
        self.is_row_latin() && self.is_column_latin()
    }

    /// All violating cells, row-major, deduplicated.
    pub fn violations(&self) -> Vec<(usize, usize)> {
        let mut all: Vec<_> = self.row_violations.iter().chain(&self.col_violations).copied().collect();
        all.sort_unstable();
        all.dedup();
        all
    }
}

/// A diagonal of a square array: row `i` uses column `columns()[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct DiagonalPerm(Vec<usize>);

impl DiagonalPerm {
    pub fn new(columns: Vec<usize>) -> Result<Self> {
        let n = columns.len();
        let mut seen = vec![false; n];
        for &c in &columns {
            if c >= n || std::mem::replace(&mut seen[c], true) {
                return Err(Error::NotPermutation(columns));
            }
        }
        Ok(Self(columns))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn columns(&self) -> &[usize] {
        &self.0
    }

    pub fn column(&self, row: usize) -> usize {
        self.0[row]
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &c)| i == c)
    }

    /// Exchanges the columns used by two rows.
    pub fn swap_rows(&mut self, a: usize, b: usize) {
        self.0.swap(a, b);
    }

    /// Cells `(row, col)` of the diagonal in row order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.iter().copied().enumerate()
    }
}

impl TryFrom<Vec<usize>> for DiagonalPerm {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<DiagonalPerm> for Vec<usize> {
    fn from(d: DiagonalPerm) -> Self {
        d.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Entry {
    pub row: usize,
    pub col: usize,
    pub symbol: Symbol,
}

/// Entries in distinct rows, columns and symbols, sorted by row.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PartialTransversal {
    entries: Vec<Entry>,
}

impl PartialTransversal {
    pub fn new(mut entries: Vec<Entry>) -> Result<Self> {
        entries.sort_unstable();
        let distinct = |key: fn(&Entry) -> usize| {
            let mut v: Vec<usize> = entries.iter().map(key).collect();
            v.sort_unstable();
            v.windows(2).all(|w| w[0] != w[1])
        };
        if !distinct(|e| e.row) {
            return Err(Error::InvalidTransversal("repeated row"));
        }
        if !distinct(|e| e.col) {
            return Err(Error::InvalidTransversal("repeated column"));
        }
        if !distinct(|e| e.symbol as usize) {
            return Err(Error::InvalidTransversal("repeated symbol"));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// True when every entry matches the array's concrete cell.
    pub fn is_in(&self, a: &PartialLatinArray) -> bool {
        self.entries.iter().all(|e| {
            e.row < a.rows() && e.col < a.cols() && a.get(e.row, e.col) == CellState::Symbol(e.symbol)
        })
    }
}

/// Parses a grid file without checking the Latin property.
pub fn parse_grid(text: &str) -> Result<PartialLatinArray, ParseError> {
    parse_with_positions(text).map(|(a, _)| a)
}

type Positions = Vec<(usize, usize)>;

fn parse_with_positions(text: &str) -> Result<(PartialLatinArray, Positions), ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let err = |line, column, kind| ParseError { line, column, kind };

    let (hline, header) = lines.next().ok_or(err(1, 1, ParseErrorKind::MissingHeader))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if !(2..=3).contains(&fields.len()) {
        return Err(err(hline, 1, ParseErrorKind::BadHeader(fields.len())));
    }
    let mut dims = Vec::with_capacity(3);
    for (i, f) in fields.iter().enumerate() {
        let v: usize = f
            .parse()
            .map_err(|_| err(hline, i + 1, ParseErrorKind::BadToken(f.to_string())))?;
        if v == 0 {
            return Err(err(hline, i + 1, ParseErrorKind::ZeroDimension));
        }
        dims.push(v);
    }
    let (rows, cols) = (dims[0], dims[1]);
    let explicit_universe = dims.get(2).copied();

    let mut cells = Vec::with_capacity(rows * cols);
    let mut positions = Vec::with_capacity(rows * cols);
    let mut seen_rows = 0;
    for (lno, line) in lines {
        if seen_rows == rows {
            return Err(err(
                lno,
                1,
                ParseErrorKind::RowCount {
                    expected: rows,
                    found: seen_rows + 1,
                },
            ));
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != cols {
            return Err(err(
                lno,
                tokens.len().min(cols) + 1,
                ParseErrorKind::RowLength {
                    expected: cols,
                    found: tokens.len(),
                },
            ));
        }
        for (i, tok) in tokens.iter().enumerate() {
            let cell = match *tok {
                "." => CellState::Empty,
                "x" => CellState::Marker,
                t => CellState::Symbol(
                    t.parse::<Symbol>()
                        .map_err(|_| err(lno, i + 1, ParseErrorKind::BadToken(t.to_string())))?,
                ),
            };
            cells.push(cell);
            positions.push((lno, i + 1));
        }
        seen_rows += 1;
    }
    if seen_rows != rows {
        let last = text.lines().count().max(1);
        return Err(err(
            last,
            1,
            ParseErrorKind::RowCount {
                expected: rows,
                found: seen_rows,
            },
        ));
    }
    let universe = match explicit_universe {
        Some(u) => {
            if let Some((i, s)) = cells
                .iter()
                .enumerate()
                .filter_map(|(i, c)| c.symbol().map(|s| (i, s)))
                .find(|&(_, s)| s as usize >= u)
            {
                let (l, c) = positions[i];
                return Err(err(
                    l,
                    c,
                    ParseErrorKind::SymbolOutOfRange {
                        symbol: s as u32,
                        universe: u,
                    },
                ));
            }
            u
        }
        None => default_universe(&cells),
    };
    let array = PartialLatinArray {
        rows,
        cols,
        universe,
        cells,
    };
    Ok((array, positions))
}

/// Parses a grid file and rejects arrays that are not row- and column-Latin.
pub fn parse_array(text: &str) -> Result<PartialLatinArray, ParseError> {
    let (a, positions) = parse_with_positions(text)?;
    let report = a.check_latin();
    let first_row = report.row_violations.first().copied();
    let first_col = report.col_violations.first().copied();
    // report whichever offending cell comes first in the file
    let pick = match (first_row, first_col) {
        (Some(r), Some(c)) => Some(if r <= c { (r, true) } else { (c, false) }),
        (Some(r), None) => Some((r, true)),
        (None, Some(c)) => Some((c, false)),
        (None, None) => None,
    };
    if let Some(((r, c), in_row)) = pick {
        let (line, column) = positions[r * a.cols() + c];
        let symbol = a.get(r, c).symbol().unwrap_or_default() as u32;
        let kind = if in_row {
            ParseErrorKind::RowDuplicate { symbol, row: r }
        } else {
            ParseErrorKind::ColumnDuplicate { symbol, col: c }
        };
        return Err(ParseError { line, column, kind });
    }
    Ok(a)
}
