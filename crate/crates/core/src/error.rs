use thiserror::Error;

/// A grid-file parse failure with its 1-based line and token position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("missing header line `ROWS COLS [UNIVERSE]`")]
    MissingHeader,
    #[error("malformed token `{0}`")]
    BadToken(String),
    #[error("header must have 2 or 3 fields, found {0}")]
    BadHeader(usize),
    #[error("dimensions must be positive")]
    ZeroDimension,
    #[error("expected {expected} tokens in row, found {found}")]
    RowLength { expected: usize, found: usize },
    #[error("expected {expected} rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("symbol {symbol} is not below the universe size {universe}")]
    SymbolOutOfRange { symbol: u32, universe: usize },
    #[error("symbol {symbol} repeated in row {row}")]
    RowDuplicate { symbol: u32, row: usize },
    #[error("symbol {symbol} repeated in column {col}")]
    ColumnDuplicate { symbol: u32, col: usize },
}

/// Errors raised by operations on arrays, diagonals and searches.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("array must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("not a permutation: {0:?}")]
    NotPermutation(Vec<usize>),
    #[error("cell ({row}, {col}) is outside the array")]
    OutOfBounds { row: usize, col: usize },
    #[error("cell ({row}, {col}) already holds a symbol")]
    CellConcrete { row: usize, col: usize },
    #[error("cell ({row}, {col}) does not hold a symbol")]
    CellNotConcrete { row: usize, col: usize },
    #[error("invalid partial transversal: {0}")]
    InvalidTransversal(&'static str),
    #[error("order {order} exceeds the configured cap {cap}")]
    CapExceeded { order: usize, cap: usize },
    #[error("array must be fully filled and Latin")]
    NotFilledLatin,
    #[error("order {0} is too small, need at least 4")]
    OrderTooSmall(usize),
    #[error("order {0} is too large for the search engine")]
    OrderTooLarge(usize),
    #[error("row {row} equals the pivot row")]
    PivotRow { row: usize },
    #[error("drisko parameters need m < n <= 2m - 2, got m = {m}, n = {n}")]
    DriskoRange { m: usize, n: usize },
    #[error("not a drisko array: {0}")]
    NotDrisko(String),
    #[error("no sequence satisfies the constraints: {0}")]
    Infeasible(String),
    #[error("brute force is limited to k <= {max}, got {k}")]
    BruteForceLimit { k: usize, max: usize },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
