//! π-blocks of `2^[n']` and their identification with `[k]^d`, the counting
//! identity behind the grid-to-cube transfer, and freeness of consecutive
//! levels of the Boolean lattice.
//!
//! Subsets of `[n']` are bitmasks with element `e` at bit `e - 1`.

use itertools::Itertools;
use num_rational::Ratio;
use serde::Serialize;

use crate::containment::{contains_copy_in_poset, Mode};
use crate::error::{Error, Result};
use crate::grid::{level_size, GridPoint};
use crate::poset::Poset;

/// Largest `n'` for exhaustive permutation counts.
pub const MAX_ENUMERATED_NPRIME: usize = 8;
/// Largest `n'` for exact factorial ratios in `i128`.
pub const MAX_RATIO_NPRIME: usize = 30;
/// Largest Boolean lattice for level freeness.
pub const MAX_LEVELS_N: usize = 7;
pub const MAX_LEVELS_POSET: usize = 5;

/// `d` segments of `k - 1` consecutive positions of a permutation `π` of
/// `[n']`, `n' = d(k - 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockStructure {
    d: usize,
    k: usize,
    pi: Vec<usize>,
}

fn check_split(n_prime: usize, d: usize, k: usize) -> Result<()> {
    if d == 0 || k < 2 {
        return Err(Error::Precondition(format!("need d >= 1 and k >= 2, got d = {d}, k = {k}")));
    }
    if n_prime != d * (k - 1) {
        return Err(Error::Precondition(format!("n' = {n_prime} is not d(k - 1) = {}", d * (k - 1))));
    }
    if n_prime > 32 {
        return Err(Error::SizeLimit { what: "n'", size: n_prime, limit: 32 });
    }
    Ok(())
}

/// `k` from `n' = d(k - 1)`.
pub fn side_for(n_prime: usize, d: usize) -> Result<usize> {
    if d == 0 || !n_prime.is_multiple_of(d) {
        return Err(Error::Precondition(format!("n' = {n_prime} is not divisible by d = {d}")));
    }
    Ok(n_prime / d + 1)
}

impl BlockStructure {
    /// `pi` lists `π(1), …, π(n')`, values in `1..=n'`.
    pub fn new(d: usize, k: usize, pi: Vec<usize>) -> Result<Self> {
        check_split(pi.len(), d, k)?;
        let mut seen = vec![false; pi.len()];
        for &v in &pi {
            if v == 0 || v > pi.len() || std::mem::replace(&mut seen[v - 1], true) {
                return Err(Error::Precondition(format!("{pi:?} is not a permutation of 1..={}", pi.len())));
            }
        }
        Ok(BlockStructure { d, k, pi })
    }

    pub fn identity(d: usize, k: usize) -> Result<Self> {
        BlockStructure::new(d, k, (1..=d * (k.max(1) - 1)).collect())
    }

    pub fn n_prime(&self) -> usize {
        self.pi.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    fn segment(&self, j: usize) -> &[usize] {
        &self.pi[j * (self.k - 1)..(j + 1) * (self.k - 1)]
    }

    /// Length of the initial part of segment `j` inside `f`, if `f` meets
    /// the segment in exactly that initial part.
    fn initial_run(&self, f: u32, j: usize) -> Option<usize> {
        let seg = self.segment(j);
        let h = seg.iter().take_while(|&&e| f >> (e - 1) & 1 == 1).count();
        seg[h..].iter().all(|&e| f >> (e - 1) & 1 == 0).then_some(h)
    }

    pub fn is_pi_block(&self, f: u32) -> bool {
        f >> self.n_prime() == 0 && (0..self.d).all(|j| self.initial_run(f, j).is_some())
    }

    /// Coordinate `j` is one more than the size of `f` on segment `j`.
    pub fn block_to_grid_point(&self, f: u32) -> Result<GridPoint> {
        if f >> self.n_prime() != 0 {
            return Err(Error::NotPiBlock);
        }
        (0..self.d)
            .map(|j| self.initial_run(f, j).map(|h| h + 1).ok_or(Error::NotPiBlock))
            .collect::<Result<Vec<_>>>()
            .map(GridPoint::new)
    }

    pub fn grid_point_to_block(&self, p: &GridPoint) -> Result<u32> {
        if p.0.len() != self.d || p.0.iter().any(|&c| c == 0 || c > self.k) {
            return Err(Error::ShapeMismatch(format!("{p:?} is outside [{}]^{}", self.k, self.d)));
        }
        Ok((0..self.d).flat_map(|j| self.segment(j)[..p.0[j] - 1].iter()).fold(0u32, |acc, &e| acc | 1 << (e - 1)))
    }

    /// All `k^d` blocks.
    pub fn blocks(&self) -> Vec<u32> {
        (0..1u64 << self.n_prime()).map(|f| f as u32).filter(|&f| self.is_pi_block(f)).collect()
    }
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CountMode {
    Formula,
    Enumerate,
}

/// Permutations of `[n']` for which `f` is a π-block.
pub fn count_block_permutations(n_prime: usize, d: usize, k: usize, f: u32, mode: CountMode) -> Result<u128> {
    check_split(n_prime, d, k)?;
    if n_prime < 32 && f >> n_prime != 0 {
        return Err(Error::Precondition(format!("{f:#b} is not a subset of [{n_prime}]")));
    }
    let size = f.count_ones() as usize;
    match mode {
        CountMode::Formula => Ok(level_size(k, d, size + d) as u128 * factorial(size) * factorial(n_prime - size)),
        CountMode::Enumerate => {
            if n_prime > MAX_ENUMERATED_NPRIME {
                return Err(Error::SizeLimit {
                    what: "n' for permutation enumeration",
                    size: n_prime,
                    limit: MAX_ENUMERATED_NPRIME,
                });
            }
            Ok((1..=n_prime)
                .permutations(n_prime)
                .filter(|pi| BlockStructure { d, k, pi: pi.clone() }.is_pi_block(f))
                .count() as u128)
        }
    }
}

/// Pairs `(F, π)` with `F ∈ family` a π-block, by the closed formula.
pub fn block_pair_count_formula(n_prime: usize, d: usize, k: usize, family: &[u32]) -> Result<u128> {
    family.iter().map(|&f| count_block_permutations(n_prime, d, k, f, CountMode::Formula)).sum()
}

/// The same count by running over every permutation.
pub fn block_pair_count_enumerated(n_prime: usize, d: usize, k: usize, family: &[u32]) -> Result<u128> {
    check_split(n_prime, d, k)?;
    if n_prime > MAX_ENUMERATED_NPRIME {
        return Err(Error::SizeLimit {
            what: "n' for permutation enumeration",
            size: n_prime,
            limit: MAX_ENUMERATED_NPRIME,
        });
    }
    let mut total = 0u128;
    for pi in (1..=n_prime).permutations(n_prime) {
        let b = BlockStructure { d, k, pi };
        total += family.iter().filter(|&&f| b.is_pi_block(f)).count() as u128;
    }
    Ok(total)
}

/// `(⌊n'/2⌋ - i)! (⌈n'/2⌉ + i)! / (⌊n'/2⌋! ⌈n'/2⌉!)` from factorials.
pub fn factorial_ratio_direct(n_prime: usize, i: usize) -> Result<Ratio<i128>> {
    check_ratio(n_prime, i)?;
    let (lo, hi) = (n_prime / 2, n_prime.div_ceil(2));
    let num = factorial(lo - i) * factorial(hi + i);
    let den = factorial(lo) * factorial(hi);
    Ok(Ratio::new(num as i128, den as i128))
}

/// The same ratio as `∏_{j=1}^{i} (⌈n'/2⌉ + i - j + 1) / (⌊n'/2⌋ - j + 1)`.
pub fn factorial_ratio_product(n_prime: usize, i: usize) -> Result<Ratio<i128>> {
    check_ratio(n_prime, i)?;
    let (lo, hi) = (n_prime / 2, n_prime.div_ceil(2));
    Ok((1..=i).map(|j| Ratio::new((hi + i - j + 1) as i128, (lo - j + 1) as i128)).product())
}

/// `(1 + 2i/n')^i`, a lower bound for the ratio.
pub fn factorial_ratio_lower_bound(n_prime: usize, i: usize) -> Result<Ratio<i128>> {
    check_ratio(n_prime, i)?;
    Ok(Ratio::new((n_prime + 2 * i) as i128, n_prime as i128).pow(i as i32))
}

fn check_ratio(n_prime: usize, i: usize) -> Result<()> {
    if n_prime == 0 || n_prime > MAX_RATIO_NPRIME {
        return Err(Error::ParameterOutOfRange {
            name: "n'",
            value: n_prime as i64,
            min: 1,
            max: MAX_RATIO_NPRIME as i64,
        });
    }
    if i > n_prime / 2 {
        return Err(Error::ParameterOutOfRange { name: "i", value: i as i64, min: 0, max: (n_prime / 2) as i64 });
    }
    Ok(())
}

/// `2^[n]` ordered by inclusion, elements indexed by their bitmask.
pub fn boolean_lattice(n: usize) -> Result<Poset> {
    if n > MAX_LEVELS_N {
        return Err(Error::SizeLimit { what: "Boolean lattice dimension", size: n, limit: MAX_LEVELS_N });
    }
    let covers: Vec<(usize, usize)> =
        (0..1usize << n).flat_map(|a| (0..n).filter(move |&e| a >> e & 1 == 0).map(move |e| (a, a | 1 << e))).collect();
    let labels = (0..1usize << n)
        .map(|a| {
            let members: Vec<String> = (0..n).filter(|&e| a >> e & 1 == 1).map(|e| (e + 1).to_string()).collect();
            format!("{{{}}}", members.join(","))
        })
        .collect();
    Poset::from_relations(1 << n, &covers, Some(labels))
}

/// Largest `m` such that every `m` consecutive levels of `2^[n]` are free
/// of `p` (capped at `n + 1`, the whole lattice); 0 when a single level
/// already holds a copy.
pub fn consecutive_levels_free(n: usize, p: &Poset, mode: Mode) -> Result<usize> {
    if p.len() > MAX_LEVELS_POSET {
        return Err(Error::SizeLimit { what: "poset for level freeness", size: p.len(), limit: MAX_LEVELS_POSET });
    }
    let host = boolean_lattice(n)?;
    let level = |a: usize| a.count_ones() as usize;
    let mut best = 0;
    for m in 1..=n + 1 {
        for r in 0..=n + 1 - m {
            let active: Vec<usize> = (0..1usize << n).filter(|&a| (r..r + m).contains(&level(a))).collect();
            if contains_copy_in_poset(&host, p, mode, Some(&active))?.is_some() {
                return Ok(best);
            }
        }
        best = m;
    }
    Ok(best)
}

/// One line of the identity suite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> IdentityCheck {
    IdentityCheck { name: name.into(), pass, detail: detail.into() }
}

/// Runs every finite identity for one `(n', d)`: block count per
/// permutation, isomorphism with `[k]^d`, per-set permutation counts, the
/// summed pair count over all subsets, and the factorial-ratio identities.
pub fn verify_identities(n_prime: usize, d: usize) -> Result<Vec<IdentityCheck>> {
    let k = side_for(n_prime, d)?;
    check_split(n_prime, d, k)?;
    if n_prime > MAX_ENUMERATED_NPRIME {
        return Err(Error::SizeLimit {
            what: "n' for identity verification",
            size: n_prime,
            limit: MAX_ENUMERATED_NPRIME,
        });
    }
    let mut out = Vec::new();
    let all: Vec<u32> = (0..1u32 << n_prime).collect();
    let grid_size = (k as u128).pow(d as u32);

    let mut per_pi_ok = true;
    let mut iso_ok = true;
    let mut per_set = vec![0u128; all.len()];
    for pi in (1..=n_prime).permutations(n_prime) {
        let b = BlockStructure { d, k, pi };
        let blocks = b.blocks();
        per_pi_ok &= blocks.len() as u128 == grid_size;
        for &f in &blocks {
            per_set[f as usize] += 1;
        }
        let pts: Vec<GridPoint> = blocks.iter().map(|&f| b.block_to_grid_point(f).expect("is a block")).collect();
        for (i, &f) in blocks.iter().enumerate() {
            iso_ok &= b.grid_point_to_block(&pts[i]).ok() == Some(f);
            for (j, &g) in blocks.iter().enumerate() {
                let subset = f & !g == 0;
                let below = pts[i].0.iter().zip(&pts[j].0).all(|(a, c)| a <= c);
                iso_ok &= subset == below;
                iso_ok &= b.block_to_grid_point(f | g).ok().map(|p| p.0)
                    == Some(pts[i].0.iter().zip(&pts[j].0).map(|(a, c)| *a.max(c)).collect());
                iso_ok &= b.block_to_grid_point(f & g).ok().map(|p| p.0)
                    == Some(pts[i].0.iter().zip(&pts[j].0).map(|(a, c)| *a.min(c)).collect());
            }
        }
    }
    out.push(check("blocks per permutation", per_pi_ok, format!("every π has {grid_size} blocks")));
    out.push(check("block isomorphism", iso_ok, "inclusion, union and intersection match the grid order"));

    let mismatches = all
        .iter()
        .filter(|&&f| count_block_permutations(n_prime, d, k, f, CountMode::Formula).ok() != Some(per_set[f as usize]))
        .count();
    out.push(check(
        "permutation count formula",
        mismatches == 0,
        format!("{} subsets, {mismatches} mismatches", all.len()),
    ));

    let total: u128 = per_set.iter().sum();
    let expected = factorial(n_prime) * grid_size;
    out.push(check("total block pairs", total == expected, format!("{total} vs n'! k^d = {expected}")));

    let formula_total = block_pair_count_formula(n_prime, d, k, &all)?;
    out.push(check("pair count formula", formula_total == total, format!("{formula_total} vs {total}")));

    let mut ratio_ok = true;
    for i in 0..=n_prime / 2 {
        let direct = factorial_ratio_direct(n_prime, i)?;
        ratio_ok &= direct == factorial_ratio_product(n_prime, i)?;
        ratio_ok &= direct >= factorial_ratio_lower_bound(n_prime, i)?;
    }
    out.push(check("factorial ratio", ratio_ok, format!("i = 0..={}", n_prime / 2)));
    Ok(out)
}
