//! Grid posets `[k_1] x ... x [k_d]` ordered coordinatewise, their rank
//! levels, and subsets of them.
//!
//! Coordinates are 1-based. Points are indexed row-major (last coordinate
//! fastest), so index order coincides with lexicographic order.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bits;
use crate::error::{Error, Result};

/// Largest number of grid points any shape may have.
pub const MAX_GRID_POINTS: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GridShape {
    dims: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl GridShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidGrid("a grid needs at least one dimension".into()));
        }
        if let Some(&k) = dims.iter().find(|&&k| k == 0) {
            return Err(Error::InvalidGrid(format!("side length {k} must be positive")));
        }
        let mut total: usize = 1;
        for &k in &dims {
            total = total.checked_mul(k).filter(|&t| t <= MAX_GRID_POINTS).ok_or(Error::SizeLimit {
                what: "grid",
                size: usize::MAX,
                limit: MAX_GRID_POINTS,
            })?;
        }
        let mut strides = vec![1; dims.len()];
        for i in (0..dims.len() - 1).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        Ok(GridShape { dims, strides, total })
    }

    /// `[k]^d`.
    pub fn cube(k: usize, d: usize) -> Result<Self> {
        GridShape::new(vec![k; d])
    }

    /// `[k] x [l]`.
    pub fn rect(k: usize, l: usize) -> Result<Self> {
        GridShape::new(vec![k, l])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    pub fn point_count(&self) -> usize {
        self.total
    }

    /// The side length when the shape is `[k]^d`.
    pub fn cubic_side(&self) -> Option<usize> {
        let k = self.dims[0];
        self.dims.iter().all(|&x| x == k).then_some(k)
    }

    pub fn require_cubic(&self) -> Result<usize> {
        self.cubic_side().ok_or_else(|| Error::NotCubic(self.to_string()))
    }

    pub fn max_rank(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn contains_point(&self, p: &GridPoint) -> bool {
        p.0.len() == self.dim() && p.0.iter().zip(&self.dims).all(|(&c, &k)| (1..=k).contains(&c))
    }

    pub fn index_of(&self, p: &GridPoint) -> Result<usize> {
        if !self.contains_point(p) {
            return Err(Error::ShapeMismatch(format!("point {p} is not in {self}")));
        }
        Ok(p.0.iter().zip(&self.strides).map(|(&c, &s)| (c - 1) * s).sum())
    }

    pub fn point(&self, index: usize) -> GridPoint {
        let mut coords = Vec::with_capacity(self.dim());
        self.write_coords(index, &mut coords);
        GridPoint(coords)
    }

    pub(crate) fn write_coords(&self, index: usize, out: &mut Vec<usize>) {
        out.clear();
        let mut rest = index;
        for &s in &self.strides {
            out.push(rest / s + 1);
            rest %= s;
        }
    }

    /// Coordinates of every point in index order, flattened.
    pub(crate) fn coord_table(&self) -> Vec<usize> {
        let mut table = Vec::with_capacity(self.total * self.dim());
        let mut buf = Vec::new();
        for i in 0..self.total {
            self.write_coords(i, &mut buf);
            table.extend_from_slice(&buf);
        }
        table
    }

    pub fn points(&self) -> impl Iterator<Item = GridPoint> + '_ {
        (0..self.total).map(|i| self.point(i))
    }

    pub fn rank_of_index(&self, index: usize) -> usize {
        let mut rest = index;
        let mut r = 0;
        for &s in &self.strides {
            r += rest / s + 1;
            rest %= s;
        }
        r
    }

    /// Level sizes of `[k]^d` up to rank `kd`, rejecting other shapes.
    pub fn level_size(&self, r: usize) -> Result<u64> {
        let k = self.require_cubic()?;
        Ok(level_size(k, self.dim(), r))
    }

    pub fn width(&self) -> Result<u64> {
        let k = self.require_cubic()?;
        Ok(width(k, self.dim()))
    }
}

impl fmt::Display for GridShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|k| k.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl FromStr for GridShape {
    type Err = Error;

    /// Accepts `KxL[xM...]` or `K^D`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidGrid(format!("cannot parse grid `{s}` (use KxL or K^D)"));
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        if let Some((k, d)) = s.split_once('^') {
            let (k, d) = (num(k)?, num(d)?);
            if d == 0 {
                return Err(bad());
            }
            return GridShape::cube(k, d);
        }
        let dims = s.split(['x', 'X']).map(num).collect::<Result<Vec<_>>>()?;
        GridShape::new(dims)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GridPoint(pub Vec<usize>);

impl GridPoint {
    pub fn new(coords: impl Into<Vec<usize>>) -> Self {
        GridPoint(coords.into())
    }

    pub fn coords(&self) -> &[usize] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn compare(&self, other: &GridPoint) -> Result<PointOrder> {
        if self.0.len() != other.0.len() {
            return Err(Error::ShapeMismatch(format!("{self} and {other} have different dimensions")));
        }
        Ok(compare_coords(&self.0, &other.0))
    }

    /// L1 distance one.
    pub fn is_neighbor(&self, other: &GridPoint) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).map(|(&a, &b)| a.abs_diff(b)).sum::<usize>() == 1
    }
}

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointOrder {
    Below,
    Above,
    Equal,
    Incomparable,
}

#[inline]
pub(crate) fn compare_coords(a: &[usize], b: &[usize]) -> PointOrder {
    let (mut le, mut ge) = (true, true);
    for (&x, &y) in a.iter().zip(b) {
        le &= x <= y;
        ge &= x >= y;
    }
    match (le, ge) {
        (true, true) => PointOrder::Equal,
        (true, false) => PointOrder::Below,
        (false, true) => PointOrder::Above,
        (false, false) => PointOrder::Incomparable,
    }
}

/// `s_{k,d,r}`: points of `[k]^d` with coordinate sum `r`.
pub fn level_size(k: usize, d: usize, r: usize) -> u64 {
    level_sizes(k, d).get(r).copied().unwrap_or(0)
}

/// All level sizes of `[k]^d`, indexed by rank `0..=kd` (entries below `d`
/// are zero).
pub fn level_sizes(k: usize, d: usize) -> Vec<u64> {
    let mut counts = vec![1u64];
    for _ in 0..d {
        let mut next = vec![0u64; counts.len() + k];
        for (r, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for x in 1..=k {
                next[r + x] += c;
            }
        }
        counts = next;
    }
    counts
}

/// `w_{k,d}`, the middle level size.
pub fn width(k: usize, d: usize) -> u64 {
    level_size(k, d, (k + 1) * d / 2)
}

/// A subset of a grid, stored as a bitset over point indices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GridFamily {
    shape: GridShape,
    members: Vec<u64>,
}

impl fmt::Debug for GridFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pts: Vec<String> = self.points().iter().map(|p| p.to_string()).collect();
        write!(f, "GridFamily[{}]{{{}}}", self.shape, pts.join(" "))
    }
}

impl GridFamily {
    pub fn empty(shape: &GridShape) -> Self {
        GridFamily { shape: shape.clone(), members: vec![0; bits::words(shape.point_count())] }
    }

    pub fn full(shape: &GridShape) -> Self {
        let mut f = GridFamily::empty(shape);
        for i in 0..shape.point_count() {
            bits::set(&mut f.members, i);
        }
        f
    }

    pub fn from_points<'a>(shape: &GridShape, points: impl IntoIterator<Item = &'a GridPoint>) -> Result<Self> {
        let mut f = GridFamily::empty(shape);
        for p in points {
            f.insert(p)?;
        }
        Ok(f)
    }

    /// Convenience for literals: `from_coords(&shape, &[[1, 1], [2, 1]])`.
    pub fn from_coords<const D: usize>(shape: &GridShape, coords: &[[usize; D]]) -> Result<Self> {
        let pts: Vec<GridPoint> = coords.iter().map(|c| GridPoint(c.to_vec())).collect();
        GridFamily::from_points(shape, &pts)
    }

    pub fn from_indices(shape: &GridShape, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut f = GridFamily::empty(shape);
        for i in indices {
            assert!(i < shape.point_count(), "index {i} outside {shape}");
            bits::set(&mut f.members, i);
        }
        f
    }

    pub fn shape(&self) -> &GridShape {
        &self.shape
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        bits::count(&self.members)
    }

    pub fn is_empty(&self) -> bool {
        bits::is_empty(&self.members)
    }

    pub fn contains(&self, p: &GridPoint) -> bool {
        self.shape.index_of(p).map(|i| bits::get(&self.members, i)).unwrap_or(false)
    }

    pub fn contains_index(&self, i: usize) -> bool {
        bits::get(&self.members, i)
    }

    pub fn insert(&mut self, p: &GridPoint) -> Result<bool> {
        let i = self.shape.index_of(p)?;
        Ok(self.insert_index(i))
    }

    pub fn insert_index(&mut self, i: usize) -> bool {
        let had = bits::get(&self.members, i);
        bits::set(&mut self.members, i);
        !had
    }

    pub fn remove_index(&mut self, i: usize) -> bool {
        let had = bits::get(&self.members, i);
        bits::clear(&mut self.members, i);
        had
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        bits::ones(&self.members)
    }

    /// Members in lexicographic order.
    pub fn points(&self) -> Vec<GridPoint> {
        self.indices().map(|i| self.shape.point(i)).collect()
    }

    pub fn is_subset(&self, other: &GridFamily) -> bool {
        self.shape == other.shape && self.members.iter().zip(&other.members).all(|(a, b)| a & !b == 0)
    }

    pub fn union(&self, other: &GridFamily) -> Result<GridFamily> {
        self.same_shape(other)?;
        let members = self.members.iter().zip(&other.members).map(|(a, b)| a | b).collect();
        Ok(GridFamily { shape: self.shape.clone(), members })
    }

    fn same_shape(&self, other: &GridFamily) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch(format!("{} vs {}", self.shape, other.shape)));
        }
        Ok(())
    }

    /// Whether every point below a member is a member.
    pub fn is_downward_closed(&self) -> bool {
        let pts = self.points();
        self.shape
            .points()
            .all(|q| self.contains(&q) || !pts.iter().any(|p| compare_coords(&q.0, &p.0) == PointOrder::Below))
    }

    pub fn is_antichain(&self) -> bool {
        let pts = self.points();
        pts.iter()
            .enumerate()
            .all(|(i, p)| pts[..i].iter().all(|q| compare_coords(&p.0, &q.0) == PointOrder::Incomparable))
    }

    pub fn to_json(&self) -> GridFamilyJson {
        GridFamilyJson { dims: self.shape.dims.clone(), points: self.points().into_iter().map(|p| p.0).collect() }
    }

    pub fn from_json(json: &GridFamilyJson) -> Result<Self> {
        let shape = GridShape::new(json.dims.clone())?;
        let pts: Vec<GridPoint> = json.points.iter().map(|c| GridPoint(c.clone())).collect();
        GridFamily::from_points(&shape, &pts)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("family json")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        GridFamily::from_json(&serde_json::from_str(s)?)
    }

    /// Picture of a two-dimensional family: first coordinate left to right,
    /// second coordinate bottom to top.
    pub fn render(&self) -> String {
        if self.shape.dim() != 2 {
            return format!("{self:?}");
        }
        let (k, l) = (self.shape.dims[0], self.shape.dims[1]);
        let mut out = String::new();
        for y in (1..=l).rev() {
            for x in 1..=k {
                out.push(if self.contains(&GridPoint(vec![x, y])) { '#' } else { '.' });
            }
            out.push('\n');
        }
        out
    }
}

/// Wire format `{"dims":[...],"points":[[...],...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridFamilyJson {
    pub dims: Vec<usize>,
    pub points: Vec<Vec<usize>>,
}

/// All points of rank `r`.
pub fn level_set(shape: &GridShape, r: usize) -> GridFamily {
    GridFamily::from_indices(shape, (0..shape.point_count()).filter(|&i| shape.rank_of_index(i) == r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(c: &[usize]) -> GridPoint {
        GridPoint(c.to_vec())
    }

    #[test]
    fn ranks() {
        assert_eq!(pt(&[1, 1, 1]).rank(), 3);
        assert_eq!(pt(&[3, 3]).rank(), 6);
        assert_eq!(pt(&[2, 3]).rank(), 5);
    }

    #[test]
    fn level_size_examples() {
        for k in 1..6 {
            for d in 1..5 {
                assert_eq!(level_size(k, d, d), 1);
            }
        }
        assert_eq!(level_size(3, 2, 4), 3);
        assert_eq!(level_size(2, 3, 4), 3);
        assert_eq!(level_size(3, 2, 1), 0);
        assert_eq!(level_size(3, 2, 7), 0);
    }

    #[test]
    fn level_size_matches_enumeration() {
        for (k, d) in [(3, 2), (2, 3), (4, 3), (3, 4)] {
            let shape = GridShape::cube(k, d).unwrap();
            for r in 0..=k * d + 1 {
                let direct = shape.points().filter(|p| p.rank() == r).count() as u64;
                assert_eq!(level_size(k, d, r), direct, "k={k} d={d} r={r}");
            }
        }
    }

    #[test]
    fn level_size_recurrence_and_symmetry() {
        // s_{k,d,i} = s_{k,d,i-1} + s_{k,d-1,i-1} - s_{k,d-1,i-1-k} (1-based coordinates)
        let s = |k: usize, d: usize, i: i64| if i < 0 { 0 } else { level_size(k, d, i as usize) as i64 };
        for k in 1..=8usize {
            for d in 1..=8usize {
                for i in 1..=(k * d + d) as i64 {
                    assert_eq!(
                        s(k, d, i),
                        s(k, d, i - 1) + s(k, d - 1, i - 1) - s(k, d - 1, i - 1 - k as i64),
                        "k={k} d={d} i={i}"
                    );
                }
                for r in d..=k * d {
                    assert_eq!(level_size(k, d, r), level_size(k, d, (k + 1) * d - r));
                }
            }
        }
        for k in 1..=6 {
            for d in 1..=6 {
                let total: u64 = level_sizes(k, d).iter().sum();
                assert_eq!(total, (k as u64).pow(d as u32));
            }
        }
    }

    #[test]
    fn width_examples() {
        for k in 1..8 {
            assert_eq!(width(k, 1), 1);
        }
        assert_eq!(width(3, 2), 3);
        assert_eq!(width(2, 3), 3);
    }

    #[test]
    fn level_sets() {
        let s = GridShape::cube(3, 2).unwrap();
        assert_eq!(level_set(&s, 3).points(), vec![pt(&[1, 2]), pt(&[2, 1])]);
        let c = GridShape::cube(3, 3).unwrap();
        assert_eq!(level_set(&c, 3).points(), vec![pt(&[1, 1, 1])]);
        assert_eq!(level_set(&GridShape::cube(2, 3).unwrap(), 4).len(), 3);
        for (k, d) in [(3, 2), (4, 2), (3, 3), (2, 4)] {
            let shape = GridShape::cube(k, d).unwrap();
            let middle = level_set(&shape, (k + 1) * d / 2);
            assert!(middle.is_antichain());
            assert_eq!(middle.len() as u64, width(k, d));
        }
    }

    #[test]
    fn comparisons() {
        assert_eq!(pt(&[1, 2]).compare(&pt(&[2, 2])).unwrap(), PointOrder::Below);
        assert_eq!(pt(&[1, 3]).compare(&pt(&[3, 1])).unwrap(), PointOrder::Incomparable);
        assert_eq!(pt(&[2, 2]).compare(&pt(&[2, 2])).unwrap(), PointOrder::Equal);
        assert_eq!(pt(&[3, 2]).compare(&pt(&[2, 2])).unwrap(), PointOrder::Above);
        assert!(matches!(pt(&[1]).compare(&pt(&[1, 1])), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn shapes_parse_and_reject() {
        assert_eq!("3x4".parse::<GridShape>().unwrap().dims(), &[3, 4]);
        assert_eq!("3^3".parse::<GridShape>().unwrap().dims(), &[3, 3, 3]);
        assert!("3x0".parse::<GridShape>().is_err());
        assert!("abc".parse::<GridShape>().is_err());
        assert!(matches!(GridShape::cube(2, 21), Err(Error::SizeLimit { .. })));
        let rect = GridShape::rect(2, 3).unwrap();
        assert!(matches!(rect.width(), Err(Error::NotCubic(_))));
        assert_eq!(GridShape::cube(3, 2).unwrap().width().unwrap(), 3);
    }

    #[test]
    fn row_major_indexing() {
        let s = GridShape::rect(2, 3).unwrap();
        let pts: Vec<GridPoint> = s.points().collect();
        let mut sorted = pts.clone();
        sorted.sort();
        assert_eq!(pts, sorted);
        for (i, p) in pts.iter().enumerate() {
            assert_eq!(s.index_of(p).unwrap(), i);
            assert_eq!(s.rank_of_index(i), p.rank());
        }
    }

    #[test]
    fn json_round_trip() {
        let s = GridShape::rect(3, 3).unwrap();
        let f = GridFamily::from_coords(&s, &[[2, 1], [1, 3], [1, 1]]).unwrap();
        let text = f.to_json_string();
        assert_eq!(text, r#"{"dims":[3,3],"points":[[1,1],[1,3],[2,1]]}"#);
        assert_eq!(GridFamily::from_json_str(&text).unwrap(), f);
        assert!(GridFamily::from_json_str(r#"{"dims":[2,2],"points":[[3,1]]}"#).is_err());
    }

    /// Maximum antichain by exhaustive subset search.
    fn brute_width(shape: &GridShape) -> usize {
        let pts: Vec<GridPoint> = shape.points().collect();
        let n = pts.len();
        let mut best = 0;
        for mask in 0u32..(1 << n) {
            let size = mask.count_ones() as usize;
            if size <= best {
                continue;
            }
            let ok = (0..n).filter(|&i| mask >> i & 1 == 1).all(|i| {
                (0..i)
                    .filter(|&j| mask >> j & 1 == 1)
                    .all(|j| compare_coords(&pts[i].0, &pts[j].0) == PointOrder::Incomparable)
            });
            if ok {
                best = size;
            }
        }
        best
    }

    #[test]
    fn width_matches_brute_force_antichains() {
        for (k, d) in [(1, 3), (2, 2), (3, 2), (4, 2), (2, 3), (2, 4)] {
            let shape = GridShape::cube(k, d).unwrap();
            assert_eq!(width(k, d) as usize, brute_width(&shape), "k={k} d={d}");
        }
    }

    proptest! {
        #[test]
        fn json_is_lossless(k in 1usize..5, l in 1usize..5, seed in any::<u64>()) {
            let s = GridShape::rect(k, l).unwrap();
            let f = GridFamily::from_indices(&s, (0..k * l).filter(|i| seed >> i & 1 == 1));
            prop_assert_eq!(GridFamily::from_json_str(&f.to_json_string()).unwrap(), f);
        }
    }
}
