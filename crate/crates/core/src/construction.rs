//! Column-Latin arrays without transversals.
//!
//! For `m < n <= 2m - 2` the `m × n` array with `a[i][j] = i mod m` in the
//! first `m − 1` columns and `(i + 1) mod m` in the rest has no transversal.
//! With `Δ(i, j) = a[i][j] − i (mod m)`, a transversal would use every
//! symbol once and so have `ΣΔ ≡ 0`; but `Δ` is 0 on the first block and 1
//! on the second, so `ΣΔ` equals the number `t` of transversal cells in the
//! second block, and `1 <= t <= n − m + 1 <= m − 1`.

use serde::{Deserialize, Serialize};

use crate::array::{CellState, PartialLatinArray, Symbol};
use crate::error::{Error, Result};

/// The `m × n` array described in the module docs.
pub fn drisko(m: usize, n: usize) -> Result<PartialLatinArray> {
    if !(m < n && n + 2 <= 2 * m) {
        return Err(Error::DriskoRange { m, n });
    }
    let rows: Vec<Vec<Symbol>> = (0..m)
        .map(|i| {
            (0..n)
                .map(|j| if j + 2 <= m { i % m } else { (i + 1) % m } as Symbol)
                .collect()
        })
        .collect();
    PartialLatinArray::from_rows(&rows)
}

/// Machine-checked evidence that a Drisko array has no transversal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaCertificate {
    pub m: usize,
    pub n: usize,
    /// `delta_table[i][j] = (a[i][j] − i) mod m`.
    pub delta_table: Vec<Vec<usize>>,
    /// The table is 0 on columns `0..=m−2` and 1 afterwards.
    pub pattern_ok: bool,
    /// Possible counts of transversal cells in the second column block.
    pub bound_count_range: (usize, usize),
    pub conclusion: String,
}

impl DeltaCertificate {
    /// The JSON form `{m, n, pattern_ok, bound_count_range, conclusion}`.
    pub fn summary(&self) -> CertificateSummary {
        CertificateSummary {
            m: self.m,
            n: self.n,
            pattern_ok: self.pattern_ok,
            bound_count_range: [self.bound_count_range.0, self.bound_count_range.1],
            conclusion: self.conclusion.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateSummary {
    pub m: usize,
    pub n: usize,
    pub pattern_ok: bool,
    pub bound_count_range: [usize; 2],
    pub conclusion: String,
}

/// Re-derives the delta table from `a` and checks every fact the
/// no-transversal argument needs. Nothing about `a` is trusted.
pub fn certify_no_transversal(a: &PartialLatinArray) -> Result<DeltaCertificate> {
    let (m, n) = (a.rows(), a.cols());
    if !(m < n && n + 2 <= 2 * m) {
        return Err(Error::DriskoRange { m, n });
    }
    if a.universe() > m {
        return Err(Error::NotDrisko(format!("symbols must lie in 0..{m}")));
    }
    let mut delta_table = vec![vec![0usize; n]; m];
    for (i, row) in delta_table.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            let CellState::Symbol(s) = a.get(i, j) else {
                return Err(Error::NotDrisko(format!("cell ({i}, {j}) is not filled")));
            };
            *slot = (s as usize + m - i % m) % m;
        }
    }
    let mismatch = delta_table.iter().enumerate().find_map(|(i, row)| {
        row.iter()
            .enumerate()
            .find(|&(j, &d)| d != usize::from(j + 2 > m))
            .map(|(j, &d)| (i, j, d))
    });
    if let Some((i, j, d)) = mismatch {
        return Err(Error::NotDrisko(format!("delta at ({i}, {j}) is {d}")));
    }
    if !a.check_latin().is_column_latin() {
        return Err(Error::NotDrisko("array is not column-Latin".into()));
    }
    // m rows but only m − 1 first-block columns: at least one cell lands in
    // the second block, which has n − m + 1 columns.
    let lo = 1;
    let hi = n - m + 1;
    let range_ok = (lo..=hi).all(|t| t % m != 0);
    if !range_ok {
        return Err(Error::NotDrisko(format!("count range {lo}..={hi} meets a multiple of {m}")));
    }
    Ok(DeltaCertificate {
        m,
        n,
        delta_table,
        pattern_ok: true,
        bound_count_range: (lo, hi),
        conclusion: "no transversal".to_string(),
    })
}
