//! 0-1 matrix patterns and their link to strong poset containment in
//! two-dimensional grids.
//!
//! Entry `(i, j)` (1-based) of the matrix of a family is 1 exactly when the
//! grid point `(i, j)` is a member, so grid order is "weakly south-east".

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;

use crate::containment::strong_copies;
use crate::error::{Error, Result};
use crate::grid::{GridFamily, GridShape};
use crate::poset::Poset;

/// Largest poset accepted by [`pattern_family_of`].
pub const MAX_PATTERN_POSET: usize = 5;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<bool>,
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryMatrix[{}]", self.row_strings().join("/"))
    }
}

impl fmt::Display for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.row_strings() {
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

impl FromStr for BinaryMatrix {
    type Err = Error;

    /// One row per line of `0`/`1` characters; blank lines and `#` comments
    /// are skipped.
    fn from_str(s: &str) -> Result<Self> {
        let mut rows: Vec<Vec<bool>> = Vec::new();
        for line in s.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    other => Err(Error::InvalidMatrix(format!("unexpected character `{other}`"))),
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        BinaryMatrix::from_rows(&rows)
    }
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidMatrix(format!("{rows}x{cols} has no entries")));
        }
        Ok(BinaryMatrix { rows, cols, entries: vec![false; rows * cols] })
    }

    pub fn ones(rows: usize, cols: usize) -> Result<Self> {
        let mut m = BinaryMatrix::zeros(rows, cols)?;
        m.entries.iter_mut().for_each(|e| *e = true);
        Ok(m)
    }

    pub fn from_rows<R: AsRef<[bool]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut m = BinaryMatrix::zeros(rows.len(), cols)?;
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::InvalidMatrix("rows have different lengths".into()));
            }
            m.entries[i * cols..(i + 1) * cols].copy_from_slice(r);
        }
        Ok(m)
    }

    /// Parses rows like `["010", "101"]`.
    pub fn from_strs(rows: &[&str]) -> Result<Self> {
        rows.join("\n").parse()
    }

    /// Row-major bitmask, bit `i * cols + j`; at most 64 entries.
    pub fn from_mask(rows: usize, cols: usize, mask: u64) -> Result<Self> {
        let mut m = BinaryMatrix::zeros(rows, cols)?;
        for (i, e) in m.entries.iter_mut().enumerate() {
            *e = mask >> i & 1 == 1;
        }
        Ok(m)
    }

    pub fn to_mask(&self) -> Option<u64> {
        (self.entries.len() <= 64)
            .then(|| self.entries.iter().enumerate().filter(|(_, &e)| e).fold(0u64, |acc, (i, _)| acc | 1 << i))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// 0-based access.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn count_ones(&self) -> usize {
        self.entries.iter().filter(|&&e| e).count()
    }

    pub fn one_positions(&self) -> Vec<(usize, usize)> {
        (0..self.rows).flat_map(|i| (0..self.cols).map(move |j| (i, j))).filter(|&(i, j)| self.get(i, j)).collect()
    }

    pub fn row_strings(&self) -> Vec<String> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| if self.get(i, j) { '1' } else { '0' }).collect()).collect()
    }

    pub fn is_zero_row(&self, i: usize) -> bool {
        (0..self.cols).all(|j| !self.get(i, j))
    }

    pub fn is_zero_col(&self, j: usize) -> bool {
        (0..self.rows).all(|i| !self.get(i, j))
    }

    pub fn transpose(&self) -> BinaryMatrix {
        let mut t = BinaryMatrix::zeros(self.cols, self.rows).expect("nonempty");
        for (i, j) in self.one_positions() {
            t.set(j, i, true);
        }
        t
    }

    /// Drops all-zero rows and columns. `None` when no 1-entry remains.
    pub fn compress(&self) -> Option<BinaryMatrix> {
        let rows: Vec<usize> = (0..self.rows).filter(|&i| !self.is_zero_row(i)).collect();
        let cols: Vec<usize> = (0..self.cols).filter(|&j| !self.is_zero_col(j)).collect();
        if rows.is_empty() {
            return None;
        }
        let mut m = BinaryMatrix::zeros(rows.len(), cols.len()).ok()?;
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m.set(a, b, self.get(i, j));
            }
        }
        Some(m)
    }
}

/// Core containment test on an arbitrary host given by `host(i, j)`.
///
/// Pattern columns are placed on increasing host columns; given a column
/// choice, rows are matched greedily (earliest host row covering each
/// pattern row), which is optimal for subsequence matching. With `forced`,
/// the copy must use host cell `(r, c)` as the image of some pattern 1.
fn embeds(
    host_rows: usize,
    host_cols: usize,
    host: &dyn Fn(usize, usize) -> bool,
    pat: &BinaryMatrix,
    forced: Option<(usize, usize)>,
) -> bool {
    if pat.rows > host_rows || pat.cols > host_cols {
        return false;
    }
    let row_fits = |hr: usize, pr: usize, cols: &[usize]| (0..pat.cols).all(|b| !pat.get(pr, b) || host(hr, cols[b]));
    let greedy = |pat_rows: std::ops::Range<usize>, host_rows: std::ops::Range<usize>, cols: &[usize]| {
        let mut hr = host_rows.start;
        for pr in pat_rows {
            while hr < host_rows.end && !row_fits(hr, pr, cols) {
                hr += 1;
            }
            if hr >= host_rows.end {
                return false;
            }
            hr += 1;
        }
        true
    };
    match forced {
        None => (0..host_cols).combinations(pat.cols).any(|cols| greedy(0..pat.rows, 0..host_rows, &cols)),
        Some((r, c)) => pat.one_positions().into_iter().any(|(a, b)| {
            if a > r || pat.rows - a > host_rows - r || b > c || pat.cols - b > host_cols - c {
                return false;
            }
            (0..c).combinations(b).any(|left| {
                (c + 1..host_cols).combinations(pat.cols - b - 1).any(|right| {
                    let mut cols = left.clone();
                    cols.push(c);
                    cols.extend_from_slice(&right);
                    row_fits(r, a, &cols)
                        && greedy(0..a, 0..r, &cols)
                        && greedy(a + 1..pat.rows, r + 1..host_rows, &cols)
                })
            })
        }),
    }
}

/// Whether `a` contains `m`: some row/column subsequence of `a` has a 1
/// wherever `m` does.
pub fn matrix_contains(a: &BinaryMatrix, m: &BinaryMatrix) -> bool {
    embeds(a.rows, a.cols, &|i, j| a.get(i, j), m, None)
}

/// Containment through a given cell of the host (0-based), which is treated
/// as a 1.
pub fn matrix_contains_through(a: &BinaryMatrix, m: &BinaryMatrix, cell: (usize, usize)) -> bool {
    embeds(a.rows, a.cols, &|i, j| (i, j) == cell || a.get(i, j), m, Some(cell))
}

/// Host given as a row-major mask, for the search engine.
pub(crate) fn mask_contains(rows: usize, cols: usize, mask: u64, m: &BinaryMatrix) -> bool {
    embeds(rows, cols, &|i, j| mask >> (i * cols + j) & 1 == 1, m, None)
}

pub(crate) fn mask_contains_through(rows: usize, cols: usize, mask: u64, m: &BinaryMatrix, cell: usize) -> bool {
    let full = mask | 1 << cell;
    embeds(rows, cols, &|i, j| full >> (i * cols + j) & 1 == 1, m, Some((cell / cols, cell % cols)))
}

/// `J_s`: the identity with its last column moved to the front.
pub fn j_matrix(s: usize) -> Result<BinaryMatrix> {
    if s < 2 {
        return Err(Error::ParameterOutOfRange { name: "J_s size", value: s as i64, min: 2, max: i64::MAX });
    }
    let mut m = BinaryMatrix::zeros(s, s)?;
    for i in 0..s {
        // identity column i lands at position (i + 1) mod s
        m.set(i, (i + 1) % s, true);
    }
    Ok(m)
}

/// The matrix `M_F` of a two-dimensional family.
pub fn family_to_matrix(f: &GridFamily) -> Result<BinaryMatrix> {
    let shape = f.shape();
    if shape.dim() != 2 {
        return Err(Error::ShapeMismatch(format!("{shape} is not two-dimensional")));
    }
    let (k, l) = (shape.dims()[0], shape.dims()[1]);
    let mut m = BinaryMatrix::zeros(k, l)?;
    for p in f.points() {
        m.set(p.0[0] - 1, p.0[1] - 1, true);
    }
    Ok(m)
}

pub fn matrix_to_family(m: &BinaryMatrix) -> GridFamily {
    let shape = GridShape::rect(m.rows, m.cols).expect("nonempty matrix");
    GridFamily::from_indices(&shape, m.one_positions().into_iter().map(|(i, j)| i * m.cols + j))
}

/// A nonempty set of distinct forbidden matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternFamily {
    matrices: BTreeSet<BinaryMatrix>,
}

impl PatternFamily {
    pub fn new(matrices: impl IntoIterator<Item = BinaryMatrix>) -> Result<Self> {
        let matrices: BTreeSet<_> = matrices.into_iter().collect();
        if matrices.is_empty() {
            return Err(Error::Precondition("a pattern family needs at least one matrix".into()));
        }
        Ok(PatternFamily { matrices })
    }

    pub fn single(m: BinaryMatrix) -> Self {
        PatternFamily { matrices: BTreeSet::from([m]) }
    }

    pub fn matrices(&self) -> impl Iterator<Item = &BinaryMatrix> {
        self.matrices.iter()
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    /// Largest side over all members.
    pub fn max_side(&self) -> usize {
        self.matrices.iter().map(|m| m.rows.max(m.cols)).max().unwrap_or(0)
    }

    pub fn avoided_by(&self, a: &BinaryMatrix) -> bool {
        !self.matrices.iter().any(|m| matrix_contains(a, m))
    }

    /// Avoids every member, and flipping any 0 creates one.
    pub fn saturated_by(&self, a: &BinaryMatrix) -> bool {
        self.avoided_by(a)
            && (0..a.rows).all(|i| {
                (0..a.cols).all(|j| a.get(i, j) || self.matrices.iter().any(|m| matrix_contains_through(a, m, (i, j))))
            })
    }
}

/// All distinct compressed matrices `M_f` over strong embeddings `f` of a
/// two-dimensional poset into `[|P|]^2`.
pub fn pattern_family_of(p: &Poset) -> Result<PatternFamily> {
    if p.len() > MAX_PATTERN_POSET {
        return Err(Error::SizeLimit { what: "poset for the pattern family", size: p.len(), limit: MAX_PATTERN_POSET });
    }
    if p.is_empty() {
        return Err(Error::Precondition("the empty poset has no pattern".into()));
    }
    if p.dimension_at_most_2()?.is_none() {
        return Err(Error::NotTwoDimensional);
    }
    let n = p.len();
    let shape = GridShape::cube(n, 2)?;
    let mut out = BTreeSet::new();
    for w in strong_copies(p, &shape)? {
        let mut t = BinaryMatrix::zeros(n, n)?;
        for q in &w.mapping {
            t.set(q.0[0] - 1, q.0[1] - 1, true);
        }
        out.insert(t.compress().expect("copy has points"));
    }
    PatternFamily::new(out)
}

/// Length and start of the first run of `q` consecutive indices satisfying
/// `zero`.
fn zero_run(len: usize, q: usize, zero: impl Fn(usize) -> bool) -> Option<usize> {
    let mut run = 0;
    for i in 0..len {
        run = if zero(i) { run + 1 } else { 0 };
        if run >= q {
            return Some(i + 1 - q);
        }
    }
    None
}

/// Enlarges a saturated square matrix to `target_n x target_n` by inserting
/// all-zero rows and columns inside existing runs of `q` consecutive zero
/// rows and columns, `q` being the largest pattern side.
pub fn extend_saturated(a: &BinaryMatrix, pats: &PatternFamily, target_n: usize) -> Result<BinaryMatrix> {
    if a.rows != a.cols {
        return Err(Error::Precondition(format!("expected a square matrix, got {}x{}", a.rows, a.cols)));
    }
    let n = a.rows;
    if target_n < n {
        return Err(Error::Precondition(format!("target {target_n} is smaller than {n}")));
    }
    if !pats.saturated_by(a) {
        return Err(Error::Precondition("matrix is not saturated for the patterns".into()));
    }
    let q = pats.max_side();
    let row_start = zero_run(n, q, |i| a.is_zero_row(i))
        .ok_or_else(|| Error::Precondition(format!("no {q} consecutive all-zero rows")))?;
    let col_start = zero_run(n, q, |j| a.is_zero_col(j))
        .ok_or_else(|| Error::Precondition(format!("no {q} consecutive all-zero columns")))?;
    let extra = target_n - n;
    // old index -> new index; inserted lines sit right after the run's first line
    let shift = |i: usize, start: usize| if i > start { i + extra } else { i };
    let mut out = BinaryMatrix::zeros(target_n, target_n)?;
    for (i, j) in a.one_positions() {
        out.set(shift(i, row_start), shift(j, col_start), true);
    }
    Ok(out)
}
