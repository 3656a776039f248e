//! Weak and strong copies of pattern posets inside grid families and
//! abstract posets, and the saturation predicate built on top.
//!
//! The matcher assigns pattern elements to host elements one at a time.
//! Candidate sets are bitsets: the intersection of the host relation rows
//! demanded by every already-placed pattern element. Pattern elements with
//! identical relations to everything else ("twins") are interchangeable, so
//! their images are forced to increase, which removes the `s!` redundancy on
//! patterns like `vee:s`.

use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::bits;
use crate::error::{Error, Result};
use crate::grid::{compare_coords, GridFamily, GridPoint, GridShape, PointOrder, MAX_GRID_POINTS};
use crate::poset::Poset;

/// Largest pattern poset accepted by the copy search.
pub const MAX_PATTERN: usize = 10;
/// Hosts up to this size get a precomputed relation table.
const DENSE_LIMIT: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Weak,
    Strong,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Weak => "weak",
            Mode::Strong => "strong",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weak" => Ok(Mode::Weak),
            "strong" => Ok(Mode::Strong),
            _ => Err(Error::Precondition(format!("mode must be weak or strong, got `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Rel {
    Above,
    Below,
    Incomparable,
}

/// The order relation of a host, either tabulated or evaluated from grid
/// coordinates on demand.
pub(crate) enum HostRelation {
    Dense {
        n: usize,
        w: usize,
        /// `below[i]`: hosts strictly below `i`.
        below: Vec<u64>,
        above: Vec<u64>,
        incomparable: Vec<u64>,
    },
    Coords {
        n: usize,
        d: usize,
        coords: Vec<usize>,
    },
}

impl HostRelation {
    pub(crate) fn from_less(n: usize, less: impl Fn(usize, usize) -> bool) -> Self {
        let w = bits::words(n);
        let mut below = vec![0; n * w];
        let mut above = vec![0; n * w];
        let mut incomparable = vec![0; n * w];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let row = i * w..(i + 1) * w;
                if less(j, i) {
                    bits::set(&mut below[row], j);
                } else if less(i, j) {
                    bits::set(&mut above[row], j);
                } else {
                    bits::set(&mut incomparable[row], j);
                }
            }
        }
        HostRelation::Dense { n, w, below, above, incomparable }
    }

    /// Relation among the given points (flattened coordinates, `d` per point).
    pub(crate) fn from_coords(d: usize, coords: Vec<usize>) -> Self {
        let n = coords.len() / d.max(1);
        if n <= DENSE_LIMIT {
            let at = |i: usize| &coords[i * d..(i + 1) * d];
            HostRelation::from_less(n, |i, j| compare_coords(at(i), at(j)) == PointOrder::Below)
        } else {
            HostRelation::Coords { n, d, coords }
        }
    }

    pub(crate) fn for_grid(shape: &GridShape) -> Self {
        HostRelation::from_coords(shape.dim(), shape.coord_table())
    }

    pub(crate) fn len(&self) -> usize {
        match self {
            HostRelation::Dense { n, .. } | HostRelation::Coords { n, .. } => *n,
        }
    }

    fn words(&self) -> usize {
        bits::words(self.len())
    }

    fn coords_of(coords: &[usize], d: usize, i: usize) -> &[usize] {
        &coords[i * d..(i + 1) * d]
    }

    /// Restricts `cand` to hosts standing in relation `rel` to host `h`.
    #[inline]
    fn restrict(&self, rel: Rel, h: usize, cand: &mut [u64]) {
        match self {
            HostRelation::Dense { w, below, above, incomparable, .. } => {
                let table = match rel {
                    Rel::Above => above,
                    Rel::Below => below,
                    Rel::Incomparable => incomparable,
                };
                bits::and_assign(cand, &table[h * w..(h + 1) * w]);
            }
            HostRelation::Coords { d, coords, .. } => {
                let hc = Self::coords_of(coords, *d, h);
                let want = match rel {
                    Rel::Above => PointOrder::Above,
                    Rel::Below => PointOrder::Below,
                    Rel::Incomparable => PointOrder::Incomparable,
                };
                let members: Vec<usize> = bits::ones(cand).collect();
                for j in members {
                    if compare_coords(Self::coords_of(coords, *d, j), hc) != want {
                        bits::clear(cand, j);
                    }
                }
            }
        }
    }

    /// `(members of active above h, members of active below h)`, when cheap.
    #[inline]
    fn degrees(&self, h: usize, active: &[u64]) -> Option<(usize, usize)> {
        match self {
            HostRelation::Dense { w, below, above, .. } => Some((
                bits::count_and(&above[h * w..(h + 1) * w], active),
                bits::count_and(&below[h * w..(h + 1) * w], active),
            )),
            HostRelation::Coords { .. } => None,
        }
    }

    /// Whether host `a` is strictly below host `b`.
    fn less(&self, a: usize, b: usize) -> bool {
        match self {
            HostRelation::Dense { w, below, .. } => bits::get(&below[b * w..(b + 1) * w], a),
            HostRelation::Coords { d, coords, .. } => {
                compare_coords(Self::coords_of(coords, *d, a), Self::coords_of(coords, *d, b)) == PointOrder::Below
            }
        }
    }
}

#[derive(Debug, Clone)]
struct Step {
    elem: usize,
    constraints: Vec<(usize, Rel)>,
    /// Earlier step holding a twin; this step's image must exceed it.
    after_twin: Option<usize>,
    up: usize,
    down: usize,
}

#[derive(Debug, Clone)]
struct Plan {
    steps: Vec<Step>,
}

impl Plan {
    fn build(p: &Poset, mode: Mode, twin_class: &[usize], anchor: Option<usize>) -> Plan {
        let n = p.len();
        let degree = |a: usize| (0..n).filter(|&b| p.comparable(a, b)).count();
        let mut order: Vec<usize> = (0..n).filter(|&a| Some(a) != anchor).collect();
        order.sort_by_key(|&a| (std::cmp::Reverse(degree(a)), a));
        if let Some(a) = anchor {
            order.insert(0, a);
        }
        let steps = order
            .iter()
            .enumerate()
            .map(|(t, &e)| {
                let mut constraints = Vec::new();
                for (s, &q) in order[..t].iter().enumerate() {
                    if p.less(q, e) {
                        constraints.push((s, Rel::Above));
                    } else if p.less(e, q) {
                        constraints.push((s, Rel::Below));
                    } else if mode == Mode::Strong {
                        constraints.push((s, Rel::Incomparable));
                    }
                }
                let after_twin =
                    (0..t).rev().find(|&s| twin_class[order[s]] == twin_class[e] && Some(order[s]) != anchor);
                Step { elem: e, constraints, after_twin, up: p.up_count(e), down: p.down_count(e) }
            })
            .collect();
        Plan { steps }
    }
}

/// Class id per element; twins share an id.
fn twin_classes(p: &Poset) -> Vec<usize> {
    let n = p.len();
    let mut class = vec![usize::MAX; n];
    for a in 0..n {
        if class[a] != usize::MAX {
            continue;
        }
        class[a] = a;
        for b in a + 1..n {
            if class[b] == usize::MAX
                && !p.comparable(a, b)
                && (0..n)
                    .filter(|&c| c != a && c != b)
                    .all(|c| p.less(a, c) == p.less(b, c) && p.less(c, a) == p.less(c, b))
            {
                class[b] = a;
            }
        }
    }
    class
}

/// A pattern poset compiled for one mode: a free search plan plus one plan
/// anchored at each twin-class representative.
#[derive(Debug, Clone)]
pub(crate) struct CompiledPattern {
    free: Plan,
    anchored: Vec<Plan>,
    size: usize,
}

impl CompiledPattern {
    pub(crate) fn new(p: &Poset, mode: Mode) -> Result<Self> {
        if p.len() > MAX_PATTERN {
            return Err(Error::SizeLimit { what: "pattern poset", size: p.len(), limit: MAX_PATTERN });
        }
        let class = twin_classes(p);
        let free = Plan::build(p, mode, &class, None);
        let anchored = (0..p.len()).filter(|&a| class[a] == a).map(|a| Plan::build(p, mode, &class, Some(a))).collect();
        Ok(CompiledPattern { free, anchored, size: p.len() })
    }
}

struct Search<'a> {
    host: &'a HostRelation,
    plan: &'a Plan,
    active: &'a [u64],
    w: usize,
    scratch: Vec<u64>,
    used: Vec<u64>,
    image: Vec<usize>,
}

impl<'a> Search<'a> {
    fn new(host: &'a HostRelation, plan: &'a Plan, active: &'a [u64]) -> Self {
        let w = host.words();
        Search {
            host,
            plan,
            active,
            w,
            scratch: vec![0; w * plan.steps.len().max(1)],
            used: vec![0; w],
            image: vec![usize::MAX; plan.steps.len()],
        }
    }

    fn admissible(&self, step: &Step, h: usize) -> bool {
        match self.host.degrees(h, self.active) {
            Some((up, down)) => up >= step.up && down >= step.down,
            None => true,
        }
    }

    /// Depth-first extension from step `t`; `visit` sees complete maps
    /// indexed by step.
    fn run<F>(&mut self, t: usize, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[usize]) -> ControlFlow<()>,
    {
        if t == self.plan.steps.len() {
            return visit(&self.image);
        }
        let plan = self.plan;
        let step = &plan.steps[t];
        let w = self.w;
        let mut cand = std::mem::take(&mut self.scratch);
        {
            let buf = &mut cand[t * w..(t + 1) * w];
            for (b, (a, u)) in buf.iter_mut().zip(self.active.iter().zip(&self.used)) {
                *b = a & !u;
            }
            for &(s, rel) in &step.constraints {
                self.host.restrict(rel, self.image[s], buf);
            }
            if let Some(s) = step.after_twin {
                bits::clear_through(buf, self.image[s]);
            }
        }
        let candidates: Vec<usize> = bits::ones(&cand[t * w..(t + 1) * w]).collect();
        self.scratch = cand;
        for h in candidates {
            if !self.admissible(step, h) {
                continue;
            }
            self.image[t] = h;
            bits::set(&mut self.used, h);
            let flow = self.run(t + 1, visit);
            bits::clear(&mut self.used, h);
            flow?;
        }
        ControlFlow::Continue(())
    }

    /// Runs with step 0 pinned to host `x`.
    fn run_anchored<F>(&mut self, x: usize, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[usize]) -> ControlFlow<()>,
    {
        if !self.admissible(&self.plan.steps[0], x) {
            return ControlFlow::Continue(());
        }
        self.image[0] = x;
        bits::set(&mut self.used, x);
        let flow = self.run(1, visit);
        bits::clear(&mut self.used, x);
        flow
    }

    /// Converts a step-indexed image to an element-indexed map.
    fn by_element(plan: &Plan, image: &[usize]) -> Vec<usize> {
        let mut out = vec![0; image.len()];
        for (step, &h) in plan.steps.iter().zip(image) {
            out[step.elem] = h;
        }
        out
    }
}

/// Finds one copy of `pat` among the `active` hosts; the result maps pattern
/// elements to host indices.
pub(crate) fn find_copy(host: &HostRelation, pat: &CompiledPattern, active: &[u64]) -> Option<Vec<usize>> {
    if pat.size == 0 {
        return Some(Vec::new());
    }
    let mut found = None;
    let mut search = Search::new(host, &pat.free, active);
    let _ = search.run(0, &mut |img| {
        found = Some(Search::by_element(&pat.free, img));
        ControlFlow::Break(())
    });
    found
}

/// Finds a copy of `pat` inside `active ∪ {x}` that uses `x`.
pub(crate) fn find_copy_through(
    host: &HostRelation,
    pat: &CompiledPattern,
    active: &[u64],
    x: usize,
) -> Option<Vec<usize>> {
    let mut with_x = active.to_vec();
    bits::set(&mut with_x, x);
    for plan in &pat.anchored {
        let mut found = None;
        let mut search = Search::new(host, plan, &with_x);
        let _ = search.run_anchored(x, &mut |img| {
            found = Some(Search::by_element(plan, img));
            ControlFlow::Break(())
        });
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Calls `visit` on every copy, up to the twin symmetry (each image set
/// appears once per distinct assignment of non-twin roles).
pub(crate) fn for_each_copy<F>(host: &HostRelation, pat: &CompiledPattern, active: &[u64], mut visit: F)
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    let mut search = Search::new(host, &pat.free, active);
    let _ = search.run(0, &mut |img| visit(&Search::by_element(&pat.free, img)));
}

/// A set of forbidden posets compiled against one grid shape, for repeated
/// incremental queries by the search engine and the greedy constructions.
pub struct GridMatcher {
    shape: GridShape,
    host: HostRelation,
    patterns: Vec<CompiledPattern>,
    mode: Mode,
}

impl GridMatcher {
    pub fn new(shape: &GridShape, posets: &[Poset], mode: Mode) -> Result<Self> {
        if posets.is_empty() {
            return Err(Error::Precondition("at least one forbidden poset is required".into()));
        }
        let patterns = posets.iter().map(|p| CompiledPattern::new(p, mode)).collect::<Result<Vec<_>>>()?;
        Ok(GridMatcher { shape: shape.clone(), host: HostRelation::for_grid(shape), patterns, mode })
    }

    pub fn shape(&self) -> &GridShape {
        &self.shape
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Whether the family given by `active` words contains a copy of some
    /// forbidden poset.
    pub(crate) fn contains_words(&self, active: &[u64]) -> bool {
        self.patterns.iter().any(|p| find_copy(&self.host, p, active).is_some())
    }

    /// Whether `active ∪ {x}` has a copy of some forbidden poset using `x`.
    pub(crate) fn creates_copy_words(&self, active: &[u64], x: usize) -> bool {
        self.patterns.iter().any(|p| find_copy_through(&self.host, p, active, x).is_some())
    }

    pub fn contains(&self, f: &GridFamily) -> bool {
        self.contains_words(f.words())
    }

    pub fn creates_copy(&self, f: &GridFamily, x: usize) -> bool {
        self.creates_copy_words(f.words(), x)
    }

    /// Free, and every non-member completes a copy.
    pub fn is_saturated(&self, f: &GridFamily) -> bool {
        !self.contains(f) && (0..self.shape.point_count()).all(|x| f.contains_index(x) || self.creates_copy(f, x))
    }
}

/// Images of the pattern elements, indexed like the pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub mapping: Vec<GridPoint>,
}

impl Witness {
    /// Checks injectivity and the mode's relation conditions pair by pair.
    pub fn validate(&self, p: &Poset, mode: Mode) -> bool {
        let m = &self.mapping;
        if m.len() != p.len() {
            return false;
        }
        for a in 0..m.len() {
            for b in 0..m.len() {
                if a == b {
                    continue;
                }
                let Ok(ord) = m[a].compare(&m[b]) else { return false };
                if ord == PointOrder::Equal {
                    return false;
                }
                let host_less = ord == PointOrder::Below;
                match mode {
                    Mode::Weak if p.less(a, b) && !host_less => return false,
                    Mode::Strong if p.less(a, b) != host_less => return false,
                    _ => {}
                }
            }
        }
        true
    }

    /// Family JSON of the image plus a `map` from pattern labels to points.
    pub fn to_json(&self, shape: &GridShape, p: &Poset) -> serde_json::Value {
        let fam = GridFamily::from_points(shape, &self.mapping).expect("witness points lie in the grid");
        let mut map = serde_json::Map::new();
        for (label, pt) in p.labels().iter().zip(&self.mapping) {
            map.insert(label.clone(), json!(pt.0));
        }
        let mut v = serde_json::to_value(fam.to_json()).expect("family json");
        v["map"] = serde_json::Value::Object(map);
        v
    }
}

fn check_family_size(f: &GridFamily) -> Result<()> {
    if f.len() > MAX_GRID_POINTS {
        return Err(Error::SizeLimit { what: "family", size: f.len(), limit: MAX_GRID_POINTS });
    }
    Ok(())
}

/// Host relation restricted to the members of `f`, with the member list.
fn member_host(f: &GridFamily) -> (HostRelation, Vec<usize>) {
    let members: Vec<usize> = f.indices().collect();
    let shape = f.shape();
    let mut coords = Vec::with_capacity(members.len() * shape.dim());
    let mut buf = Vec::new();
    for &i in &members {
        shape.write_coords(i, &mut buf);
        coords.extend_from_slice(&buf);
    }
    (HostRelation::from_coords(shape.dim(), coords), members)
}

fn all_active(n: usize) -> Vec<u64> {
    let mut v = vec![0; bits::words(n)];
    for i in 0..n {
        bits::set(&mut v, i);
    }
    v
}

pub fn contains_copy(f: &GridFamily, p: &Poset, mode: Mode) -> Result<Option<Witness>> {
    check_family_size(f)?;
    let pat = CompiledPattern::new(p, mode)?;
    let (host, members) = member_host(f);
    let active = all_active(members.len());
    Ok(find_copy(&host, &pat, &active)
        .map(|m| Witness { mapping: m.into_iter().map(|h| f.shape().point(members[h])).collect() }))
}

pub fn is_free(f: &GridFamily, p: &Poset, mode: Mode) -> Result<bool> {
    Ok(contains_copy(f, p, mode)?.is_none())
}

/// Free of every poset in the set.
pub fn is_free_of_all(f: &GridFamily, posets: &[Poset], mode: Mode) -> Result<bool> {
    for p in posets {
        if !is_free(f, p, mode)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `f` is free of every poset in `posets`, and adding any other grid point
/// creates a copy of at least one of them.
pub fn is_saturated(f: &GridFamily, posets: &[Poset], mode: Mode) -> Result<bool> {
    check_family_size(f)?;
    Ok(GridMatcher::new(f.shape(), posets, mode)?.is_saturated(f))
}

/// Every strong copy of `p` in the given shape (up to twin symmetry).
pub fn strong_copies(p: &Poset, shape: &GridShape) -> Result<Vec<Witness>> {
    let pat = CompiledPattern::new(p, Mode::Strong)?;
    let host = HostRelation::for_grid(shape);
    let active = all_active(shape.point_count());
    let mut out = Vec::new();
    for_each_copy(&host, &pat, &active, |m| {
        out.push(Witness { mapping: m.iter().map(|&h| shape.point(h)).collect() });
        ControlFlow::Continue(())
    });
    Ok(out)
}

pub const MAX_NEIGHBOR_PATTERN: usize = 6;
pub const MAX_NEIGHBOR_SIDE: usize = 6;

/// Whether no strong copy of `p` in the full two-dimensional grid uses two
/// points at L1 distance one.
pub fn strong_copies_neighbor_free(p: &Poset, shape: &GridShape) -> Result<bool> {
    if shape.dim() != 2 {
        return Err(Error::ShapeMismatch(format!("{shape} is not two-dimensional")));
    }
    if p.len() > MAX_NEIGHBOR_PATTERN {
        return Err(Error::SizeLimit { what: "pattern poset", size: p.len(), limit: MAX_NEIGHBOR_PATTERN });
    }
    if let Some(&side) = shape.dims().iter().find(|&&k| k > MAX_NEIGHBOR_SIDE) {
        return Err(Error::SizeLimit { what: "grid side", size: side, limit: MAX_NEIGHBOR_SIDE });
    }
    let pat = CompiledPattern::new(p, Mode::Strong)?;
    let host = HostRelation::for_grid(shape);
    let active = all_active(shape.point_count());
    let mut clean = true;
    for_each_copy(&host, &pat, &active, |m| {
        let pts: Vec<GridPoint> = m.iter().map(|&h| shape.point(h)).collect();
        let touching = pts.iter().enumerate().any(|(i, a)| pts[..i].iter().any(|b| a.is_neighbor(b)));
        if touching {
            clean = false;
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    Ok(clean)
}

/// Copy of `p` inside an abstract host poset, restricted to `active`
/// elements when given; returns pattern element -> host element.
pub fn contains_copy_in_poset(
    host: &Poset,
    p: &Poset,
    mode: Mode,
    active: Option<&[usize]>,
) -> Result<Option<Vec<usize>>> {
    let pat = CompiledPattern::new(p, mode)?;
    let rel = HostRelation::from_less(host.len(), |a, b| host.less(a, b));
    let mask = match active {
        Some(list) => {
            let mut m = vec![0; bits::words(host.len())];
            for &a in list {
                bits::set(&mut m, a);
            }
            m
        }
        None => all_active(host.len()),
    };
    Ok(find_copy(&rel, &pat, &mask))
}

/// Verifies a host-indexed map against an abstract host poset.
pub fn validate_poset_map(host: &Poset, p: &Poset, mode: Mode, map: &[usize]) -> bool {
    let rel = HostRelation::from_less(host.len(), |a, b| host.less(a, b));
    map.len() == p.len()
        && (0..map.len()).all(|a| {
            (0..map.len()).all(|b| {
                a == b
                    || (map[a] != map[b]
                        && match mode {
                            Mode::Weak => !p.less(a, b) || rel.less(map[a], map[b]),
                            Mode::Strong => p.less(a, b) == rel.less(map[a], map[b]),
                        })
            })
        })
}
