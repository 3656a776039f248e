//! Finite strict partial orders and the builtin pattern posets.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest parameter accepted by builtin poset specs.
pub const MAX_BUILTIN_PARAM: usize = 12;
/// Size limit for the exhaustive two-dimensionality test.
pub const MAX_DIMENSION_TEST: usize = 9;

/// A finite poset stored as its full (transitively closed) strict relation.
///
/// Elements are the indices `0..n`; labels exist only for input and output.
#[derive(Clone, PartialEq, Eq)]
pub struct Poset {
    n: usize,
    less: Vec<bool>,
    labels: Vec<String>,
}

impl fmt::Debug for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<String> =
            self.relation_pairs().into_iter().map(|(a, b)| format!("{}<{}", self.labels[a], self.labels[b])).collect();
        write!(f, "Poset({}; {})", self.labels.join(","), pairs.join(" "))
    }
}

impl Poset {
    /// Builds a poset from arbitrary strict relation pairs, closing them
    /// transitively. A pair set whose closure is not antisymmetric is
    /// rejected.
    pub fn from_relations(n: usize, pairs: &[(usize, usize)], labels: Option<Vec<String>>) -> Result<Self> {
        let labels = match labels {
            Some(l) if l.len() == n => l,
            Some(l) => return Err(Error::Precondition(format!("{} labels given for {} elements", l.len(), n))),
            None => (0..n).map(|i| i.to_string()).collect(),
        };
        let mut less = vec![false; n * n];
        for &(a, b) in pairs {
            if a >= n || b >= n {
                return Err(Error::Precondition(format!("relation ({a},{b}) outside 0..{n}")));
            }
            less[a * n + b] = true;
        }
        // Warshall
        for k in 0..n {
            for i in 0..n {
                if less[i * n + k] {
                    for j in 0..n {
                        if less[k * n + j] {
                            less[i * n + j] = true;
                        }
                    }
                }
            }
        }
        if let Some(a) = (0..n).find(|&a| less[a * n + a]) {
            return Err(Error::Cycle(labels[a].clone()));
        }
        Ok(Poset { n, less, labels })
    }

    pub fn antichain(n: usize) -> Self {
        Poset::from_relations(n, &[], None).expect("empty relation is a poset")
    }

    pub fn chain(p: usize) -> Self {
        let pairs: Vec<_> = (1..p).map(|i| (i - 1, i)).collect();
        let labels = (1..=p).map(|i| format!("c{i}")).collect();
        Poset::from_relations(p, &pairs, Some(labels)).expect("chain")
    }

    /// `a < b_1, ..., b_s`.
    pub fn vee(s: usize) -> Self {
        let pairs: Vec<_> = (1..=s).map(|i| (0, i)).collect();
        let mut labels = vec!["a".to_string()];
        labels.extend((1..=s).map(|i| format!("b{i}")));
        Poset::from_relations(s + 1, &pairs, Some(labels)).expect("vee")
    }

    /// `b_1, ..., b_s < a`.
    pub fn wedge(s: usize) -> Self {
        Poset::vee(s).dual()
    }

    /// `a < b_1, ..., b_k < c`.
    pub fn diamond(k: usize) -> Self {
        let c = k + 1;
        let mut pairs = Vec::new();
        for i in 1..=k {
            pairs.push((0, i));
            pairs.push((i, c));
        }
        let mut labels = vec!["a".to_string()];
        labels.extend((1..=k).map(|i| format!("b{i}")));
        labels.push("c".to_string());
        Poset::from_relations(k + 2, &pairs, Some(labels)).expect("diamond")
    }

    /// The standard example `S_m`: `a_i < b_j` exactly when `i != j`.
    pub fn standard_example(m: usize) -> Self {
        let mut pairs = Vec::new();
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    pairs.push((i, m + j));
                }
            }
        }
        let mut labels: Vec<String> = (1..=m).map(|i| format!("a{i}")).collect();
        labels.extend((1..=m).map(|i| format!("b{i}")));
        Poset::from_relations(2 * m, &pairs, Some(labels)).expect("standard example")
    }

    /// Parses a builtin spec such as `vee:3`.
    pub fn builtin(spec: &str) -> Result<Self> {
        let (name, param) = spec.split_once(':').ok_or_else(|| Error::UnknownBuiltin(spec.to_string()))?;
        let name = name.trim();
        if !matches!(name, "chain" | "vee" | "wedge" | "diamond") {
            return Err(Error::UnknownBuiltin(spec.to_string()));
        }
        let value: i64 = param.trim().parse().map_err(|_| Error::UnknownBuiltin(spec.to_string()))?;
        if !(1..=MAX_BUILTIN_PARAM as i64).contains(&value) {
            return Err(Error::ParameterOutOfRange {
                name: "builtin poset parameter",
                value,
                min: 1,
                max: MAX_BUILTIN_PARAM as i64,
            });
        }
        let v = value as usize;
        Ok(match name {
            "chain" => Poset::chain(v),
            "vee" => Poset::vee(v),
            "wedge" => Poset::wedge(v),
            _ => Poset::diamond(v),
        })
    }

    /// Parses the cover-relation text format: one `a < b` per line, `#`
    /// comments, and a lone token declares an element with no relations.
    pub fn parse_covers(text: &str) -> Result<Self> {
        let mut index: BTreeMap<String, usize> = BTreeMap::new();
        let mut labels = Vec::new();
        let mut pairs = Vec::new();
        let mut intern = |tok: &str, labels: &mut Vec<String>| -> usize {
            *index.entry(tok.to_string()).or_insert_with(|| {
                labels.push(tok.to_string());
                labels.len() - 1
            })
        };
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks.as_slice() {
                [a] if *a != "<" => {
                    intern(a, &mut labels);
                }
                [a, "<", b] => {
                    if a == b {
                        return Err(Error::Cycle(a.to_string()));
                    }
                    let ia = intern(a, &mut labels);
                    let ib = intern(b, &mut labels);
                    pairs.push((ia, ib));
                }
                _ => {
                    return Err(Error::PosetParse {
                        line: lineno + 1,
                        message: format!("expected `a < b`, got `{line}`"),
                    })
                }
            }
        }
        let n = labels.len();
        Poset::from_relations(n, &pairs, Some(labels))
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn less(&self, a: usize, b: usize) -> bool {
        self.less[a * self.n + b]
    }

    #[inline]
    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.less(a, b) || self.less(b, a)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    /// All pairs `(a, b)` with `a < b`.
    pub fn relation_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in 0..self.n {
                if self.less(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn covers(&self) -> Vec<(usize, usize)> {
        self.relation_pairs()
            .into_iter()
            .filter(|&(a, b)| !(0..self.n).any(|c| self.less(a, c) && self.less(c, b)))
            .collect()
    }

    /// Number of elements strictly above `a`.
    pub fn up_count(&self, a: usize) -> usize {
        (0..self.n).filter(|&b| self.less(a, b)).count()
    }

    /// Number of elements strictly below `a`.
    pub fn down_count(&self, a: usize) -> usize {
        (0..self.n).filter(|&b| self.less(b, a)).count()
    }

    pub fn dual(&self) -> Self {
        let n = self.n;
        let mut less = vec![false; n * n];
        for a in 0..n {
            for b in 0..n {
                less[a * n + b] = self.less(b, a);
            }
        }
        Poset { n, less, labels: self.labels.clone() }
    }

    /// Places `other` beside `self` with no relations between the parts.
    pub fn disjoint_union(&self, other: &Poset) -> Self {
        let n = self.n + other.n;
        let mut pairs = self.relation_pairs();
        pairs.extend(other.relation_pairs().into_iter().map(|(a, b)| (a + self.n, b + self.n)));
        let mut labels: Vec<String> = self.labels.iter().map(|l| format!("{l}.0")).collect();
        labels.extend(other.labels.iter().map(|l| format!("{l}.1")));
        Poset::from_relations(n, &pairs, Some(labels)).expect("union of posets")
    }

    pub fn is_chain(&self) -> bool {
        (0..self.n).all(|a| (0..a).all(|b| self.comparable(a, b)))
    }

    /// Element count of a longest chain.
    pub fn height(&self) -> usize {
        // down-counts strictly increase along any chain, so they give a topological order
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by_key(|&a| self.down_count(a));
        let mut longest = vec![1usize; self.n];
        for (i, &b) in order.iter().enumerate() {
            for &a in &order[..i] {
                if self.less(a, b) {
                    longest[b] = longest[b].max(longest[a] + 1);
                }
            }
        }
        longest.into_iter().max().unwrap_or(0)
    }

    /// Connected components of the comparability graph, each sorted, ordered
    /// by smallest element.
    pub fn comparability_components(&self) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.n];
        let mut out = Vec::new();
        for start in 0..self.n {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![start];
            comp[start] = id;
            let mut queue = VecDeque::from([start]);
            while let Some(a) = queue.pop_front() {
                for b in 0..self.n {
                    if comp[b] == usize::MAX && self.comparable(a, b) {
                        comp[b] = id;
                        members.push(b);
                        queue.push_back(b);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Searches for two linear orders whose intersection is this poset.
    ///
    /// Every linear extension is tried as the first order; the second is then
    /// forced (comparable pairs keep their order, incomparable pairs flip), so
    /// only its consistency needs checking.
    pub fn dimension_at_most_2(&self) -> Result<Option<Realizer2>> {
        if self.n > MAX_DIMENSION_TEST {
            return Err(Error::SizeLimit {
                what: "poset for the dimension test",
                size: self.n,
                limit: MAX_DIMENSION_TEST,
            });
        }
        let mut prefix = Vec::with_capacity(self.n);
        let mut placed = vec![false; self.n];
        Ok(self.extend_linear(&mut prefix, &mut placed))
    }

    fn extend_linear(&self, prefix: &mut Vec<usize>, placed: &mut [bool]) -> Option<Realizer2> {
        if prefix.len() == self.n {
            return self.forced_second_order(prefix);
        }
        for a in 0..self.n {
            if placed[a] || (0..self.n).any(|b| !placed[b] && self.less(b, a)) {
                continue;
            }
            placed[a] = true;
            prefix.push(a);
            if let Some(r) = self.extend_linear(prefix, placed) {
                return Some(r);
            }
            prefix.pop();
            placed[a] = false;
        }
        None
    }

    fn forced_second_order(&self, first: &[usize]) -> Option<Realizer2> {
        let n = self.n;
        let mut pos1 = vec![0; n];
        for (i, &a) in first.iter().enumerate() {
            pos1[a] = i;
        }
        let before = |a: usize, b: usize| self.less(a, b) || (!self.less(b, a) && pos1[b] < pos1[a]);
        // in a strict total order, the number of successors pins the position
        let mut pos2 = vec![0; n];
        for a in 0..n {
            let succ = (0..n).filter(|&b| b != a && before(a, b)).count();
            pos2[a] = n - 1 - succ;
        }
        for a in 0..n {
            for b in 0..n {
                if a != b && before(a, b) != (pos2[a] < pos2[b]) {
                    return None;
                }
            }
        }
        let mut second = vec![0; n];
        for a in 0..n {
            second[pos2[a]] = a;
        }
        Some(Realizer2 { pi1: first.to_vec(), pi2: second })
    }
}

impl FromStr for Poset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Poset::builtin(s)
    }
}

/// Two linear orders, each listed bottom to top, realizing a poset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Realizer2 {
    pub pi1: Vec<usize>,
    pub pi2: Vec<usize>,
}

impl Realizer2 {
    fn positions(order: &[usize]) -> Vec<usize> {
        let mut pos = vec![0; order.len()];
        for (i, &a) in order.iter().enumerate() {
            pos[a] = i;
        }
        pos
    }

    /// Checks `a < b` iff both orders rank `a` before `b`, pair by pair.
    pub fn realizes(&self, p: &Poset) -> bool {
        if self.pi1.len() != p.len() || self.pi2.len() != p.len() {
            return false;
        }
        let (p1, p2) = (Self::positions(&self.pi1), Self::positions(&self.pi2));
        (0..p.len()).all(|a| (0..p.len()).all(|b| a == b || p.less(a, b) == (p1[a] < p1[b] && p2[a] < p2[b])))
    }

    /// The strong embedding into `[n]^2` given by 1-based ranks in both orders.
    pub fn embedding(&self) -> Vec<[usize; 2]> {
        let (p1, p2) = (Self::positions(&self.pi1), Self::positions(&self.pi2));
        (0..p1.len()).map(|a| [p1[a] + 1, p2[a] + 1]).collect()
    }
}
