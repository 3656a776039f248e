//! Explicit extremal and saturating families, plus greedy saturation.

use serde::{Deserialize, Serialize};

use crate::containment::{GridMatcher, Mode};
use crate::error::{Error, Result};
use crate::grid::{GridFamily, GridPoint, GridShape};
use crate::poset::Poset;

/// `k_s` and `c_s`: the longest run of row lengths `2, 3, …, k_s` whose sum
/// stays below `s`, and the remainder `s - 1 - (2 + … + k_s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KsCs {
    pub k_s: usize,
    pub c_s: usize,
}

pub fn ks_cs(s: usize) -> Result<KsCs> {
    if s < 2 {
        return Err(Error::ParameterOutOfRange { name: "s", value: s as i64, min: 2, max: i64::MAX });
    }
    if s == 2 {
        return Ok(KsCs { k_s: 1, c_s: 1 });
    }
    let mut k = 1;
    let mut sum = 0;
    while sum + (k + 1) < s {
        k += 1;
        sum += k;
    }
    Ok(KsCs { k_s: k, c_s: s - 1 - sum })
}

fn positive(name: &'static str, value: usize, min: usize) -> Result<()> {
    if value < min {
        return Err(Error::ParameterOutOfRange { name, value: value as i64, min: min as i64, max: i64::MAX });
    }
    Ok(())
}

/// Weak `∨_s`-free family in `[k]^2`.
///
/// Row `i` (points with second coordinate `i`) is an interval starting on
/// the anti-diagonal at `(k + 1 - i, i)` and running towards larger first
/// coordinates, clipped at `k`. Its length is `k_s + 1` when
/// `i mod (k_s + 1)` lies in `1..=c_s` and `k_s` otherwise, so every
/// anti-diagonal point lies below exactly `s - 1` members once clipping is
/// out of reach, and every other member lies below fewer.
pub fn vee_weak_family(k: usize, s: usize) -> Result<GridFamily> {
    positive("k", k, 1)?;
    let KsCs { k_s, c_s } = ks_cs(s)?;
    let shape = GridShape::cube(k, 2)?;
    let mut f = GridFamily::empty(&shape);
    for i in 1..=k {
        let r = i % (k_s + 1);
        let len = if (1..=c_s).contains(&r) { k_s + 1 } else { k_s };
        let start = k + 1 - i;
        for x in start..(start + len).min(k + 1) {
            f.insert(&GridPoint::new([x, i]))?;
        }
    }
    Ok(f)
}

/// The anti-diagonal points of [`vee_weak_family`], the starts of its rows.
pub fn anti_diagonal(k: usize) -> Vec<GridPoint> {
    (1..=k).map(|i| GridPoint::new([k + 1 - i, i])).collect()
}

/// The boundary of `[k] × [l]`: strong `∨_3`-free of size `2(k + l) - 4`.
pub fn vee_three_border_family(k: usize, l: usize) -> Result<GridFamily> {
    positive("k", k, 2)?;
    positive("l", l, 2)?;
    let shape = GridShape::rect(k, l)?;
    let idx = shape
        .points()
        .enumerate()
        .filter(|(_, p)| p.0[0] == 1 || p.0[0] == k || p.0[1] == 1 || p.0[1] == l)
        .map(|(i, _)| i)
        .collect::<Vec<_>>();
    Ok(GridFamily::from_indices(&shape, idx))
}

/// The top `s - 1` rows and rightmost `s - 1` columns of `[k]^2`:
/// strong `∨_s`-free of size `2(s - 1)k - (s - 1)^2`.
pub fn vee_rows_cols_family(k: usize, s: usize) -> Result<GridFamily> {
    positive("s", s, 2)?;
    if k < s - 1 {
        return Err(Error::Precondition(format!("k = {k} is smaller than s - 1 = {}", s - 1)));
    }
    let shape = GridShape::cube(k, 2)?;
    let edge = k + 1 - (s - 1);
    let idx = shape
        .points()
        .enumerate()
        .filter(|(_, p)| p.0[0] >= edge || p.0[1] >= edge)
        .map(|(i, _)| i)
        .collect::<Vec<_>>();
    Ok(GridFamily::from_indices(&shape, idx))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiamondVariant {
    D2,
    D3,
}

impl DiamondVariant {
    pub fn poset(self) -> Poset {
        match self {
            DiamondVariant::D2 => Poset::diamond(2),
            DiamondVariant::D3 => Poset::diamond(3),
        }
    }
}

/// Three consecutive anti-diagonal bands around rank `k + 1`: for `D3` all
/// of ranks `k..=k+2`; for `D2` the middle band keeps only odd first
/// coordinates.
pub fn diamond_free_family(k: usize, variant: DiamondVariant) -> Result<GridFamily> {
    positive("k", k, 2)?;
    let shape = GridShape::cube(k, 2)?;
    let idx = shape
        .points()
        .enumerate()
        .filter(|(_, p)| {
            let r = p.rank();
            match variant {
                DiamondVariant::D3 => (k..=k + 2).contains(&r),
                DiamondVariant::D2 => r == k || r == k + 2 || (r == k + 1 && p.0[0] % 2 == 1),
            }
        })
        .map(|(i, _)| i)
        .collect::<Vec<_>>();
    Ok(GridFamily::from_indices(&shape, idx))
}

/// `{(k,1), (k-1,2), …, (1,k), (1,k+1), …, (1,l)}` in `[k] × [l]`, a strong
/// `{∨_2, ∧_2}`-saturated family of size `max(k, l)`. For `k > l` the
/// construction for `[l] × [k]` is transposed.
pub fn vee_wedge_sat_chain(k: usize, l: usize) -> Result<GridFamily> {
    positive("k", k, 1)?;
    positive("l", l, 1)?;
    let shape = GridShape::rect(k, l)?;
    let (a, b) = (k.min(l), k.max(l));
    let pts: Vec<GridPoint> = (1..=a)
        .map(|i| [a + 1 - i, i])
        .chain((a + 1..=b).map(|j| [1, j]))
        .map(|[x, y]| if k <= l { GridPoint::new([x, y]) } else { GridPoint::new([y, x]) })
        .collect();
    GridFamily::from_points(&shape, &pts)
}

/// Order in which [`greedy_saturate`] offers points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Enumeration {
    /// By rank, ties lexicographic.
    RankIncreasing,
    /// Middle comes last; see [`mcl_enumeration`].
    Mcl,
    /// A permutation of all grid points.
    Explicit(Vec<GridPoint>),
}

pub fn rank_increasing(shape: &GridShape) -> Vec<GridPoint> {
    let mut pts: Vec<GridPoint> = shape.points().collect();
    pts.sort_by(|a, b| a.rank().cmp(&b.rank()).then_with(|| a.0.cmp(&b.0)));
    pts
}

/// Points of a cube by decreasing distance of the rank from the middle
/// rank `d(k+1)/2`; ties by rank, then lexicographic.
pub fn mcl_enumeration(shape: &GridShape) -> Result<Vec<GridPoint>> {
    let k = shape
        .cubic_side()
        .ok_or_else(|| Error::NotCubic(format!("middle-comes-last order needs a cube, got {shape}")))?;
    let twice_mid = shape.dim() * (k + 1);
    let mut pts: Vec<GridPoint> = shape.points().collect();
    pts.sort_by(|a, b| {
        let da = (2 * a.rank()).abs_diff(twice_mid);
        let db = (2 * b.rank()).abs_diff(twice_mid);
        db.cmp(&da).then_with(|| a.rank().cmp(&b.rank())).then_with(|| a.0.cmp(&b.0))
    });
    Ok(pts)
}

/// Offers points in order and keeps each one that does not complete a copy
/// of a forbidden poset. The result is always saturated.
pub fn greedy_saturate(
    shape: &GridShape,
    posets: &[Poset],
    mode: Mode,
    enumeration: &Enumeration,
) -> Result<GridFamily> {
    let order = match enumeration {
        Enumeration::RankIncreasing => rank_increasing(shape),
        Enumeration::Mcl => mcl_enumeration(shape)?,
        Enumeration::Explicit(list) => {
            let mut seen = GridFamily::empty(shape);
            for p in list {
                if !seen.insert(p)? {
                    return Err(Error::Precondition(format!("point {p:?} repeats in the enumeration")));
                }
            }
            if seen.len() != shape.point_count() {
                return Err(Error::Precondition(format!(
                    "enumeration lists {} of {} points",
                    seen.len(),
                    shape.point_count()
                )));
            }
            list.clone()
        }
    };
    let matcher = GridMatcher::new(shape, posets, mode)?;
    let mut f = GridFamily::empty(shape);
    for p in &order {
        let x = shape.index_of(p)?;
        if !matcher.creates_copy(&f, x) {
            f.insert_index(x);
        }
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::containment::{is_free, is_saturated};
    use crate::grid::level_size;

    #[test]
    fn ks_cs_examples() {
        assert_eq!(ks_cs(2).unwrap(), KsCs { k_s: 1, c_s: 1 });
        assert_eq!(ks_cs(3).unwrap(), KsCs { k_s: 2, c_s: 0 });
        assert_eq!(ks_cs(8).unwrap(), KsCs { k_s: 3, c_s: 2 });
        assert!(ks_cs(1).is_err());
        for s in 3..200 {
            let KsCs { k_s, c_s } = ks_cs(s).unwrap();
            let sum = |m: usize| (2..=m).sum::<usize>();
            assert!(sum(k_s) < s && sum(k_s + 1) >= s);
            assert!(c_s <= k_s);
        }
    }

    #[test]
    fn figure_family_row_lengths() {
        let f = vee_weak_family(12, 8).unwrap();
        let lens: Vec<usize> = (1..=12).map(|i| f.points().iter().filter(|p| p.0[1] == i).count()).collect();
        // unclipped lengths repeat 4,4,3,3 from row 1; row i starts at x = 13 - i
        let period = [4, 4, 3, 3];
        for (i, &len) in lens.iter().enumerate() {
            assert_eq!(len, period[i % 4].min(i + 1), "row {}", i + 1);
        }
    }

    #[test]
    fn vee_weak_small() {
        for k in 1..=8 {
            for s in 2..=5 {
                let f = vee_weak_family(k, s).unwrap();
                assert!(is_free(&f, &Poset::vee(s), Mode::Weak).unwrap(), "k={k} s={s}");
                for d in anti_diagonal(k) {
                    let above = f.points().iter().filter(|q| **q != d && d.0[0] <= q.0[0] && d.0[1] <= q.0[1]).count();
                    assert!(above < s);
                }
            }
        }
        // c_3 = 0: every unclipped row has k_3 = 2 points
        let f = vee_weak_family(6, 3).unwrap();
        assert!((2..=6).all(|i| f.points().iter().filter(|p| p.0[1] == i).count() == 2));
    }

    #[test]
    fn border_and_rows_cols() {
        assert_eq!(vee_three_border_family(2, 2).unwrap().len(), 4);
        assert_eq!(vee_three_border_family(3, 4).unwrap().len(), 10);
        assert!(vee_three_border_family(1, 4).is_err());
        assert_eq!(vee_rows_cols_family(5, 2).unwrap().len(), 9);
        assert_eq!(vee_rows_cols_family(4, 3).unwrap().len(), 12);
        assert!(is_free(&vee_rows_cols_family(4, 3).unwrap(), &Poset::vee(3), Mode::Strong).unwrap());
        assert!(vee_rows_cols_family(2, 4).is_err());
    }

    #[test]
    fn diamonds() {
        let d3 = diamond_free_family(4, DiamondVariant::D3).unwrap();
        assert_eq!(d3.len() as u64, level_size(4, 2, 4) + level_size(4, 2, 5) + level_size(4, 2, 6));
        let d2 = diamond_free_family(2, DiamondVariant::D2).unwrap();
        let s = GridShape::cube(2, 2).unwrap();
        assert_eq!(d2, GridFamily::from_coords(&s, &[[1, 1], [2, 2], [1, 2]]).unwrap());
        for k in 2..=6 {
            assert!(
                is_free(&diamond_free_family(k, DiamondVariant::D2).unwrap(), &Poset::diamond(2), Mode::Weak).unwrap()
            );
            assert!(
                is_free(&diamond_free_family(k, DiamondVariant::D3).unwrap(), &Poset::diamond(3), Mode::Weak).unwrap()
            );
        }
    }

    #[test]
    fn sat_chain() {
        let s = GridShape::cube(3, 2).unwrap();
        assert_eq!(vee_wedge_sat_chain(3, 3).unwrap(), GridFamily::from_coords(&s, &[[3, 1], [2, 2], [1, 3]]).unwrap());
        let r = GridShape::rect(2, 4).unwrap();
        assert_eq!(
            vee_wedge_sat_chain(2, 4).unwrap(),
            GridFamily::from_coords(&r, &[[2, 1], [1, 2], [1, 3], [1, 4]]).unwrap()
        );
        let pair = [Poset::vee(2), Poset::wedge(2)];
        for k in 1..=5 {
            for l in 1..=5 {
                let f = vee_wedge_sat_chain(k, l).unwrap();
                assert_eq!(f.len(), k.max(l));
                assert!(is_saturated(&f, &pair, Mode::Strong).unwrap(), "{k}x{l}");
            }
        }
    }

    #[test]
    fn mcl_orders() {
        let line = GridShape::cube(2, 1).unwrap();
        assert_eq!(mcl_enumeration(&line).unwrap(), vec![GridPoint::new([1]), GridPoint::new([2])]);
        let sq = GridShape::cube(3, 2).unwrap();
        let ranks: Vec<usize> = mcl_enumeration(&sq).unwrap().iter().map(|p| p.rank()).collect();
        assert_eq!(ranks, vec![2, 6, 3, 3, 5, 5, 4, 4, 4]);
        assert!(mcl_enumeration(&GridShape::rect(2, 3).unwrap()).is_err());
    }

    #[test]
    fn greedy_examples() {
        let sq = GridShape::cube(3, 2).unwrap();
        let c2 = greedy_saturate(&sq, &[Poset::chain(2)], Mode::Weak, &Enumeration::RankIncreasing).unwrap();
        assert_eq!(c2, GridFamily::from_coords(&sq, &[[1, 1]]).unwrap());
        let mcl = greedy_saturate(&sq, &[Poset::chain(3)], Mode::Weak, &Enumeration::Mcl).unwrap();
        assert_eq!(mcl, GridFamily::from_coords(&sq, &[[1, 1], [3, 3]]).unwrap());
        let rank = greedy_saturate(&sq, &[Poset::chain(3)], Mode::Weak, &Enumeration::RankIncreasing).unwrap();
        assert!(rank.len() <= 3 && rank.is_downward_closed());
        let mut rev: Vec<GridPoint> = sq.points().collect();
        rev.reverse();
        let top = greedy_saturate(&sq, &[Poset::vee(2)], Mode::Strong, &Enumeration::Explicit(rev.clone())).unwrap();
        assert!(is_saturated(&top, &[Poset::vee(2)], Mode::Strong).unwrap());
        rev.pop();
        assert!(greedy_saturate(&sq, &[Poset::vee(2)], Mode::Strong, &Enumeration::Explicit(rev)).is_err());
    }
}
