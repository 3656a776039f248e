//! Word-packed bitsets used by the grid families and the copy matcher.
//!
//! A set over `n` elements is a slice of `words(n)` `u64` words; bit `i` lives
//! in word `i / 64`. Callers own the storage so the hot loops can reuse
//! scratch buffers instead of allocating.

pub(crate) const WORD: usize = 64;

#[inline]
pub(crate) fn words(n: usize) -> usize {
    n.div_ceil(WORD)
}

#[inline]
pub(crate) fn get(set: &[u64], i: usize) -> bool {
    set[i / WORD] >> (i % WORD) & 1 == 1
}

#[inline]
pub(crate) fn set(set: &mut [u64], i: usize) {
    set[i / WORD] |= 1 << (i % WORD);
}

#[inline]
pub(crate) fn clear(set: &mut [u64], i: usize) {
    set[i / WORD] &= !(1 << (i % WORD));
}

#[inline]
pub(crate) fn count(set: &[u64]) -> usize {
    set.iter().map(|w| w.count_ones() as usize).sum()
}

#[inline]
pub(crate) fn count_and(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum()
}

#[inline]
pub(crate) fn and_assign(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d &= s;
    }
}

#[inline]
pub(crate) fn is_empty(set: &[u64]) -> bool {
    set.iter().all(|&w| w == 0)
}

/// Clears every bit with index `<= i`.
#[inline]
pub(crate) fn clear_through(set: &mut [u64], i: usize) {
    let w = i / WORD;
    for word in set.iter_mut().take(w) {
        *word = 0;
    }
    let b = i % WORD;
    if b == WORD - 1 {
        set[w] = 0;
    } else {
        set[w] &= !((1u64 << (b + 1)) - 1);
    }
}

/// Iterates the indices of set bits in increasing order.
pub(crate) fn ones(set: &[u64]) -> Ones<'_> {
    Ones { words: set, idx: 0, cur: set.first().copied().unwrap_or(0) }
}

pub(crate) struct Ones<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl Iterator for Ones<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let t = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.idx * WORD + t);
            }
            self.idx += 1;
            if self.idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.idx];
        }
    }
}
