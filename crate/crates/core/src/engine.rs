//! Exact extremal and saturation numbers on small hosts.
//!
//! Both searches work over a universe of at most 64 cells encoded as `u64`
//! masks, with cells ordered row-major. An [`Obstruction`] answers two
//! questions: does a mask contain a forbidden copy, and does adding one cell
//! complete a copy through that cell.

use std::time::Instant;

use num_rational::Ratio;
use serde::Serialize;
use serde_json::{json, Value};

use crate::containment::{GridMatcher, Mode};
use crate::error::{Error, Result};
use crate::grid::{GridFamily, GridShape};
use crate::matrix::{j_matrix, mask_contains, mask_contains_through, BinaryMatrix, PatternFamily};
use crate::poset::Poset;

/// Default point limit for the maximum search.
pub const LA_MAX_POINTS: usize = 42;
/// Default point limit for the saturation search.
pub const SAT_MAX_POINTS: usize = 25;
/// Default cell limit for matrix searches.
pub const MATRIX_MAX_CELLS: usize = 36;
/// Masks are single machine words.
pub const HARD_MAX_POINTS: usize = 64;

pub(crate) trait Obstruction {
    fn universe(&self) -> usize;
    fn contains(&self, mask: u64) -> bool;
    fn creates_copy(&self, mask: u64, x: usize) -> bool;
}

struct GridObstruction(GridMatcher);

impl Obstruction for GridObstruction {
    fn universe(&self) -> usize {
        self.0.shape().point_count()
    }

    fn contains(&self, mask: u64) -> bool {
        self.0.contains_words(&[mask])
    }

    fn creates_copy(&self, mask: u64, x: usize) -> bool {
        self.0.creates_copy_words(&[mask], x)
    }
}

struct MatrixObstruction<'a> {
    rows: usize,
    cols: usize,
    pats: &'a PatternFamily,
}

impl Obstruction for MatrixObstruction<'_> {
    fn universe(&self) -> usize {
        self.rows * self.cols
    }

    fn contains(&self, mask: u64) -> bool {
        self.pats.matrices().any(|m| mask_contains(self.rows, self.cols, mask, m))
    }

    fn creates_copy(&self, mask: u64, x: usize) -> bool {
        self.pats.matrices().any(|m| mask_contains_through(self.rows, self.cols, mask, m, x))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub nodes_explored: u64,
    pub pruned: u64,
    pub wall_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchWitness {
    Grid(GridFamily),
    Matrix(BinaryMatrix),
}

impl SearchWitness {
    pub fn size(&self) -> usize {
        match self {
            SearchWitness::Grid(f) => f.len(),
            SearchWitness::Matrix(m) => m.count_ones(),
        }
    }

    pub fn as_family(&self) -> Option<&GridFamily> {
        match self {
            SearchWitness::Grid(f) => Some(f),
            SearchWitness::Matrix(_) => None,
        }
    }

    pub fn as_matrix(&self) -> Option<&BinaryMatrix> {
        match self {
            SearchWitness::Matrix(m) => Some(m),
            SearchWitness::Grid(_) => None,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            SearchWitness::Grid(f) => serde_json::to_value(f.to_json()).expect("family serializes"),
            SearchWitness::Matrix(m) => json!(m.row_strings()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub value: usize,
    pub witness: SearchWitness,
    pub stats: SearchStats,
}

impl SearchResult {
    /// `{value, witness, nodes_explored, pruned, wall_ms}`; `canonical`
    /// zeroes the wall time so output is byte-stable.
    pub fn to_json(&self, canonical: bool) -> Value {
        json!({
            "value": self.value,
            "witness": self.witness.to_json(),
            "nodes_explored": self.stats.nodes_explored,
            "pruned": self.stats.pruned,
            "wall_ms": if canonical { 0 } else { self.stats.wall_ms },
        })
    }
}

fn check_universe(what: &'static str, size: usize, limit: usize) -> Result<()> {
    let limit = limit.min(HARD_MAX_POINTS);
    if size > limit {
        return Err(Error::SizeLimit { what, size, limit });
    }
    Ok(())
}

#[inline]
fn suffix(m: usize, j: usize) -> u64 {
    let all = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    if j >= 64 {
        0
    } else {
        all & (u64::MAX << j)
    }
}

/// Maximum free mask by a Russian-doll search: `best[i]` is the exact
/// optimum over cells `i..m`, computed for `i = m-1` down to `0`, and every
/// stage only asks whether `best[i+1] + 1` is reachable with cell `i` in.
fn max_free<O: Obstruction>(o: &O) -> (u64, usize, SearchStats) {
    let m = o.universe();
    let mut best = vec![0usize; m + 1];
    let mut witness = 0u64;
    let mut stats = SearchStats::default();

    fn extend<O: Obstruction>(
        o: &O,
        best: &[usize],
        fam: u64,
        size: usize,
        start: usize,
        target: usize,
        stats: &mut SearchStats,
    ) -> Option<u64> {
        stats.nodes_explored += 1;
        if size == target {
            return Some(fam);
        }
        for j in start..best.len() - 1 {
            if size + best[j] < target {
                stats.pruned += 1;
                break;
            }
            if !o.creates_copy(fam, j) {
                if let Some(f) = extend(o, best, fam | 1 << j, size + 1, j + 1, target, stats) {
                    return Some(f);
                }
            }
        }
        None
    }

    for i in (0..m).rev() {
        best[i] = best[i + 1];
        if o.creates_copy(0, i) {
            continue;
        }
        let target = best[i + 1] + 1;
        if let Some(f) = extend(o, &best, 1 << i, 1, i + 1, target, &mut stats) {
            best[i] = target;
            witness = f;
        }
    }
    debug_assert!(!o.contains(witness));
    (witness, best[0], stats)
}

/// Minimum saturated mask by iterative deepening on the size. Inside one
/// size, cells are decided in order; a skipped cell must still be coverable
/// by the chosen cells plus all undecided ones, since coverage only grows
/// with the family.
fn min_saturated<O: Obstruction>(o: &O) -> (u64, usize, SearchStats) {
    let m = o.universe();
    let mut stats = SearchStats::default();

    fn saturated<O: Obstruction>(o: &O, fam: u64, m: usize) -> bool {
        (0..m).all(|x| fam >> x & 1 == 1 || o.creates_copy(fam, x))
    }

    fn fill<O: Obstruction>(
        o: &O,
        m: usize,
        fam: u64,
        size: usize,
        start: usize,
        t: usize,
        stats: &mut SearchStats,
    ) -> Option<u64> {
        stats.nodes_explored += 1;
        if size == t {
            return saturated(o, fam, m).then_some(fam);
        }
        for j in start..m {
            if size + (m - j) < t {
                break;
            }
            if j > start && !o.creates_copy(fam | suffix(m, j), j - 1) {
                // cell j - 1 stays uncovered however the rest is filled
                stats.pruned += 1;
                break;
            }
            if o.creates_copy(fam, j) {
                continue;
            }
            if let Some(f) = fill(o, m, fam | 1 << j, size + 1, j + 1, t, stats) {
                return Some(f);
            }
        }
        None
    }

    for t in 0..=m {
        if let Some(f) = fill(o, m, 0, 0, 0, t, &mut stats) {
            debug_assert!(!o.contains(f));
            return (f, t, stats);
        }
    }
    unreachable!("a greedy maximal free family is saturated, so some size succeeds")
}

fn timed<T>(run: impl FnOnce() -> (u64, usize, SearchStats), wrap: impl FnOnce(u64) -> T) -> (T, usize, SearchStats) {
    let clock = Instant::now();
    let (mask, value, mut stats) = run();
    stats.wall_ms = clock.elapsed().as_millis() as u64;
    (wrap(mask), value, stats)
}

fn grid_result(shape: &GridShape, run: impl FnOnce() -> (u64, usize, SearchStats)) -> SearchResult {
    let (f, value, stats) =
        timed(run, |mask| GridFamily::from_indices(shape, (0..shape.point_count()).filter(|&i| mask >> i & 1 == 1)));
    SearchResult { value, witness: SearchWitness::Grid(f), stats }
}

/// `La` (weak) or `La*` (strong) for a set of forbidden posets, with the
/// default point limit.
pub fn la_exact(shape: &GridShape, posets: &[Poset], mode: Mode) -> Result<SearchResult> {
    la_exact_with_limit(shape, posets, mode, LA_MAX_POINTS)
}

pub fn la_exact_with_limit(shape: &GridShape, posets: &[Poset], mode: Mode, max_points: usize) -> Result<SearchResult> {
    check_universe("grid for the maximum search", shape.point_count(), max_points)?;
    let o = GridObstruction(GridMatcher::new(shape, posets, mode)?);
    Ok(grid_result(shape, || max_free(&o)))
}

/// `sat` (weak) or `sat*` (strong) for a set of forbidden posets.
pub fn sat_exact(shape: &GridShape, posets: &[Poset], mode: Mode) -> Result<SearchResult> {
    sat_exact_with_limit(shape, posets, mode, SAT_MAX_POINTS)
}

pub fn sat_exact_with_limit(
    shape: &GridShape,
    posets: &[Poset],
    mode: Mode,
    max_points: usize,
) -> Result<SearchResult> {
    check_universe("grid for the saturation search", shape.point_count(), max_points)?;
    let o = GridObstruction(GridMatcher::new(shape, posets, mode)?);
    Ok(grid_result(shape, || min_saturated(&o)))
}

fn matrix_result(rows: usize, cols: usize, run: impl FnOnce() -> (u64, usize, SearchStats)) -> Result<SearchResult> {
    let (m, value, stats) = timed(run, |mask| BinaryMatrix::from_mask(rows, cols, mask));
    Ok(SearchResult { value, witness: SearchWitness::Matrix(m?), stats })
}

/// `ex(n, m, pats)`: most 1-entries in an `n x m` matrix avoiding every
/// pattern.
pub fn ex_matrix(n: usize, m: usize, pats: &PatternFamily) -> Result<SearchResult> {
    ex_matrix_with_limit(n, m, pats, MATRIX_MAX_CELLS)
}

pub fn ex_matrix_with_limit(n: usize, m: usize, pats: &PatternFamily, max_cells: usize) -> Result<SearchResult> {
    BinaryMatrix::zeros(n, m)?;
    check_universe("matrix", n * m, max_cells)?;
    let o = MatrixObstruction { rows: n, cols: m, pats };
    matrix_result(n, m, || max_free(&o))
}

/// `sat(n, m, pats)`: fewest 1-entries in a saturated `n x m` matrix.
pub fn sat_matrix(n: usize, m: usize, pats: &PatternFamily) -> Result<SearchResult> {
    sat_matrix_with_limit(n, m, pats, MATRIX_MAX_CELLS)
}

pub fn sat_matrix_with_limit(n: usize, m: usize, pats: &PatternFamily, max_cells: usize) -> Result<SearchResult> {
    BinaryMatrix::zeros(n, m)?;
    check_universe("matrix", n * m, max_cells)?;
    let o = MatrixObstruction { rows: n, cols: m, pats };
    matrix_result(n, m, || min_saturated(&o))
}

/// Upper bound on `La([k]^2, P)` from packing the `2k - 1` diagonals
/// `x - y = const` into groups of four consecutive ones, each group holding
/// at most `|P| + h(P) - 2` members, plus every point of the one or three
/// leftover diagonals at the corner.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DoubleChainBound {
    pub k: usize,
    /// `(|P| + h(P)) / 2 - 1`.
    #[serde(serialize_with = "ratio_as_string")]
    pub leading: Ratio<i64>,
    pub group_capacity: usize,
    pub groups: usize,
    pub leftover_diagonals: usize,
    pub leftover_points: usize,
    /// `groups * group_capacity + leftover_points`.
    pub value: usize,
}

fn ratio_as_string<S: serde::Serializer>(r: &Ratio<i64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl DoubleChainBound {
    /// Largest allowed distance of a construction size from `leading * k`.
    pub fn slack(&self) -> usize {
        self.group_capacity + self.leftover_points
    }

    pub fn leading_term(&self) -> Ratio<i64> {
        self.leading * Ratio::from_integer(self.k as i64)
    }
}

pub fn double_chain_bound(p: &Poset, k: usize) -> Result<DoubleChainBound> {
    if k == 0 {
        return Err(Error::ParameterOutOfRange { name: "k", value: 0, min: 1, max: i64::MAX });
    }
    if p.is_empty() {
        return Err(Error::Precondition("the empty poset has no bound".into()));
    }
    let (size, h) = (p.len(), p.height());
    let diagonals = 2 * k - 1;
    let leftover_diagonals = if diagonals % 4 == 1 { 1 } else { 3 };
    let groups = (diagonals - leftover_diagonals) / 4;
    // the corner diagonals hold 1, 2, 3, … points, capped by the middle one
    let leftover_points = (0..leftover_diagonals).map(|t| k - (k - 1).abs_diff(t)).sum();
    let group_capacity = size + h - 2;
    Ok(DoubleChainBound {
        k,
        leading: Ratio::new((size + h) as i64, 2) - 1,
        group_capacity,
        groups,
        leftover_diagonals,
        leftover_points,
        value: groups * group_capacity + leftover_points,
    })
}

/// The four quantities of the conjectured chain
/// `sat(n,n,J_s) = ex(n,n,J_s) = sat*([n]^2, ∨_s) = La*([n]^2, ∨_s)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjectureFive {
    pub n: usize,
    pub s: usize,
    pub sat_matrix: usize,
    pub ex_matrix: usize,
    pub sat_star: usize,
    pub la_star: usize,
    pub chain_holds: bool,
}

pub fn conjecture_five_report(n: usize, s: usize) -> Result<ConjectureFive> {
    let pats = PatternFamily::single(j_matrix(s)?);
    let shape = GridShape::cube(n, 2)?;
    let vee = [Poset::vee(s)];
    let sat_m = sat_matrix(n, n, &pats)?.value;
    let ex_m = ex_matrix(n, n, &pats)?.value;
    let sat_star = sat_exact(&shape, &vee, Mode::Strong)?.value;
    let la_star = la_exact(&shape, &vee, Mode::Strong)?.value;
    Ok(ConjectureFive {
        n,
        s,
        sat_matrix: sat_m,
        ex_matrix: ex_m,
        sat_star,
        la_star,
        chain_holds: sat_m == ex_m && ex_m == sat_star && sat_star == la_star,
    })
}
