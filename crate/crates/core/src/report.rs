//! Reproduction tables: each row compares one computed quantity against a
//! closed formula, a bound, or nothing at all (observation rows).

use std::fmt;
use std::time::Instant;

use num_rational::Ratio;
use serde::Serialize;
use serde_json::{json, Value};

use crate::constructions::{
    diamond_free_family, greedy_saturate, vee_rows_cols_family, vee_three_border_family, vee_weak_family,
    vee_wedge_sat_chain, DiamondVariant, Enumeration,
};
use crate::containment::{is_free_of_all, is_saturated, Mode};
use crate::engine::{double_chain_bound, ex_matrix, la_exact, sat_exact, sat_matrix};
use crate::error::{Error, Result};
use crate::grid::{level_set, level_size, GridFamily, GridShape};
use crate::matrix::{j_matrix, PatternFamily};
use crate::poset::Poset;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
    Ge,
    /// `|value - expected| <= slack`.
    Within(i64),
    /// Reported, never asserted.
    Observe,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::Eq => write!(f, "eq"),
            Relation::Le => write!(f, "le"),
            Relation::Ge => write!(f, "ge"),
            Relation::Within(s) => write!(f, "within {s}"),
            Relation::Observe => write!(f, "observe"),
        }
    }
}

impl Relation {
    fn holds(self, value: i64, expected: Option<Ratio<i64>>) -> Option<bool> {
        let v = Ratio::from_integer(value);
        match (self, expected) {
            (Relation::Observe, _) | (_, None) => None,
            (Relation::Eq, Some(e)) => Some(v == e),
            (Relation::Le, Some(e)) => Some(v <= e),
            (Relation::Ge, Some(e)) => Some(v >= e),
            (Relation::Within(s), Some(e)) => {
                let s = Ratio::from_integer(s);
                Some(v - e <= s && e - v <= s)
            }
        }
    }
}

type Compute = Box<dyn Fn() -> Result<i64> + Send + Sync>;

/// A row still to be computed.
pub struct RowSpec {
    pub instance: String,
    pub quantity: String,
    pub relation: Relation,
    pub expected: Option<Ratio<i64>>,
    pub source: String,
    compute: Compute,
}

impl fmt::Debug for RowSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RowSpec")
            .field("instance", &self.instance)
            .field("quantity", &self.quantity)
            .finish_non_exhaustive()
    }
}

impl RowSpec {
    fn new(
        instance: impl Into<String>,
        quantity: impl Into<String>,
        relation: Relation,
        expected: Option<Ratio<i64>>,
        source: impl Into<String>,
        compute: impl Fn() -> Result<i64> + Send + Sync + 'static,
    ) -> Self {
        RowSpec {
            instance: instance.into(),
            quantity: quantity.into(),
            relation,
            expected,
            source: source.into(),
            compute: Box::new(compute),
        }
    }

    pub fn evaluate(&self) -> Result<ReportRow> {
        let clock = Instant::now();
        let value = (self.compute)()?;
        Ok(ReportRow {
            instance: self.instance.clone(),
            quantity: self.quantity.clone(),
            value,
            relation: self.relation,
            expected: self.expected,
            source: self.source.clone(),
            matches: self.relation.holds(value, self.expected),
            wall_ms: clock.elapsed().as_millis() as u64,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub instance: String,
    pub quantity: String,
    pub value: i64,
    pub relation: Relation,
    pub expected: Option<Ratio<i64>>,
    pub source: String,
    /// `None` for observation rows.
    pub matches: Option<bool>,
    pub wall_ms: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub parameters: Value,
    pub rows: Vec<ReportRow>,
}

pub const CSV_HEADER: &str = "instance,quantity,value,relation,expected,source,match,wall_ms";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn ratio_text(r: &Option<Ratio<i64>>) -> String {
    r.map(|r| r.to_string()).unwrap_or_default()
}

#[derive(Serialize)]
struct RowJson<'a> {
    instance: &'a str,
    quantity: &'a str,
    value: i64,
    relation: String,
    expected: Option<String>,
    source: &'a str,
    #[serde(rename = "match")]
    matches: Option<bool>,
    wall_ms: u64,
}

impl Report {
    pub fn new(command: impl Into<String>, parameters: Value) -> Self {
        Report { command: command.into(), parameters, rows: Vec::new() }
    }

    /// Every asserted row holds.
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(|r| r.matches != Some(false))
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| r.matches == Some(false))
    }

    pub fn to_json(&self, canonical: bool) -> Value {
        let rows: Vec<RowJson> = self
            .rows
            .iter()
            .map(|r| RowJson {
                instance: &r.instance,
                quantity: &r.quantity,
                value: r.value,
                relation: r.relation.to_string(),
                expected: r.expected.map(|e| e.to_string()),
                source: &r.source,
                matches: r.matches,
                wall_ms: if canonical { 0 } else { r.wall_ms },
            })
            .collect();
        json!({
            "command": self.command,
            "parameters": self.parameters,
            "all_match": self.all_match(),
            "rows": rows,
        })
    }

    pub fn to_csv(&self, canonical: bool) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let fields = [
                csv_field(&r.instance),
                csv_field(&r.quantity),
                r.value.to_string(),
                csv_field(&r.relation.to_string()),
                ratio_text(&r.expected),
                csv_field(&r.source),
                r.matches.map(|m| m.to_string()).unwrap_or_default(),
                if canonical { 0 } else { r.wall_ms }.to_string(),
            ];
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }
}

/// Evaluates specs in order on the current thread.
pub fn run_sequential(command: &str, parameters: Value, specs: &[RowSpec]) -> Result<Report> {
    let mut report = Report::new(command, parameters);
    for s in specs {
        report.rows.push(s.evaluate()?);
    }
    Ok(report)
}

fn int(v: usize) -> Option<Ratio<i64>> {
    Some(Ratio::from_integer(v as i64))
}

fn check_max(name: &'static str, max: usize, lo: usize, hi: usize) -> Result<()> {
    if !(lo..=hi).contains(&max) {
        return Err(Error::ParameterOutOfRange { name, value: max as i64, min: lo as i64, max: hi as i64 });
    }
    Ok(())
}

fn rect(k: usize, l: usize) -> Result<GridShape> {
    GridShape::rect(k, l)
}

fn la_value(shape: GridShape, posets: Vec<Poset>, mode: Mode) -> impl Fn() -> Result<i64> + Send + Sync {
    move || Ok(la_exact(&shape, &posets, mode)?.value as i64)
}

fn sat_value(shape: GridShape, posets: Vec<Poset>, mode: Mode) -> impl Fn() -> Result<i64> + Send + Sync {
    move || Ok(sat_exact(&shape, &posets, mode)?.value as i64)
}

fn flag(b: bool) -> i64 {
    b as i64
}

pub const THM4_MAX: usize = 6;
pub const THM8_MAX: usize = 5;
pub const PROP5_MAX: usize = 6;
pub const PROP6_MAX: usize = 4;
pub const CONJ5_MAX: usize = 5;

/// Exact maximum strong-free sizes on rectangles and the constructions
/// behind them, for `2 <= k, l <= max`.
pub fn plan_thm4(max: usize) -> Result<Vec<RowSpec>> {
    check_max("max", max, 2, THM4_MAX)?;
    let mut rows = Vec::new();
    for k in 2..=max {
        for l in 2..=max {
            let inst = format!("{k}x{l}");
            rows.push(RowSpec::new(
                &inst,
                "La*(vee:2)",
                Relation::Eq,
                int(k + l - 1),
                "formula k+l-1",
                la_value(rect(k, l)?, vec![Poset::vee(2)], Mode::Strong),
            ));
            rows.push(RowSpec::new(
                &inst,
                "La*(vee:3)",
                Relation::Eq,
                int(2 * (k + l) - 4),
                "formula 2(k+l)-4",
                la_value(rect(k, l)?, vec![Poset::vee(3)], Mode::Strong),
            ));
            rows.push(RowSpec::new(
                &inst,
                "La*(vee:2,wedge:2)",
                Relation::Eq,
                int(k + l - 1),
                "formula k+l-1",
                la_value(rect(k, l)?, vec![Poset::vee(2), Poset::wedge(2)], Mode::Strong),
            ));
            rows.push(RowSpec::new(
                &inst,
                "border family size",
                Relation::Eq,
                int(2 * (k + l) - 4),
                "formula 2(k+l)-4",
                move || {
                    let f = vee_three_border_family(k, l)?;
                    if !is_free_of_all(&f, &[Poset::vee(3)], Mode::Strong)? {
                        return Err(Error::Precondition("border family contains a strong vee:3".into()));
                    }
                    Ok(f.len() as i64)
                },
            ));
        }
    }
    for k in 2..=max {
        for s in 2..=4usize.min(k + 1) {
            let inst = format!("{k}x{k} s={s}");
            let bound = 2 * (s - 1) * k - (s - 1) * (s - 1);
            rows.push(RowSpec::new(
                &inst,
                format!("La*(vee:{s})"),
                Relation::Ge,
                int(bound),
                "construction 2(s-1)k-(s-1)^2",
                la_value(GridShape::cube(k, 2)?, vec![Poset::vee(s)], Mode::Strong),
            ));
            rows.push(RowSpec::new(
                &inst,
                "rows+columns family size",
                Relation::Eq,
                int(bound),
                "formula 2(s-1)k-(s-1)^2",
                move || {
                    let f = vee_rows_cols_family(k, s)?;
                    if !is_free_of_all(&f, &[Poset::vee(s)], Mode::Strong)? {
                        return Err(Error::Precondition("rows+columns family is not free".into()));
                    }
                    Ok(f.len() as i64)
                },
            ));
            let weak = vee_weak_family(k, s)?.len();
            rows.push(RowSpec::new(
                &inst,
                format!("La(vee:{s})"),
                Relation::Ge,
                int(weak),
                "construction: anti-diagonal rows",
                la_value(GridShape::cube(k, 2)?, vec![Poset::vee(s)], Mode::Weak),
            ));
        }
    }
    Ok(rows)
}

/// Exact minimum strong-saturated sizes on rectangles.
pub fn plan_thm8(max: usize) -> Result<Vec<RowSpec>> {
    check_max("max", max, 2, THM8_MAX)?;
    let mut rows = Vec::new();
    for k in 2..=max {
        for l in 2..=max {
            let inst = format!("{k}x{l}");
            rows.push(RowSpec::new(
                &inst,
                "sat*(vee:2,wedge:2)",
                Relation::Eq,
                int(k.max(l)),
                "formula max(k,l)",
                sat_value(rect(k, l)?, vec![Poset::vee(2), Poset::wedge(2)], Mode::Strong),
            ));
            rows.push(RowSpec::new(
                &inst,
                "sat*(vee:2)",
                Relation::Eq,
                int(k + l - 1),
                "formula k+l-1",
                sat_value(rect(k, l)?, vec![Poset::vee(2)], Mode::Strong),
            ));
            rows.push(RowSpec::new(
                &inst,
                "sat*(vee:3)",
                Relation::Ge,
                int(k.max(l)),
                "lower bound max(k,l)",
                sat_value(rect(k, l)?, vec![Poset::vee(3)], Mode::Strong),
            ));
            rows.push(RowSpec::new(
                &inst,
                "chain construction size",
                Relation::Eq,
                int(k.max(l)),
                "formula max(k,l)",
                move || {
                    let f = vee_wedge_sat_chain(k, l)?;
                    if !is_saturated(&f, &[Poset::vee(2), Poset::wedge(2)], Mode::Strong)? {
                        return Err(Error::Precondition("chain construction is not saturated".into()));
                    }
                    Ok(f.len() as i64)
                },
            ));
        }
    }
    Ok(rows)
}

/// Diamond-free maxima against the diagonal packing bound, and the
/// three-band constructions against the leading term.
pub fn plan_prop5(max: usize) -> Result<Vec<RowSpec>> {
    check_max("max", max, 2, PROP5_MAX)?;
    let mut rows = Vec::new();
    for k in 2..=max {
        let inst = format!("{k}x{k}");
        for (variant, name) in [(DiamondVariant::D2, "diamond:2"), (DiamondVariant::D3, "diamond:3")] {
            let p = variant.poset();
            let bound = double_chain_bound(&p, k)?;
            rows.push(RowSpec::new(
                &inst,
                format!("La({name})"),
                Relation::Le,
                int(bound.value),
                "diagonal packing bound",
                la_value(GridShape::cube(k, 2)?, vec![p.clone()], Mode::Weak),
            ));
            rows.push(RowSpec::new(
                &inst,
                format!("{name} band family size"),
                Relation::Within(bound.slack() as i64),
                Some(bound.leading_term()),
                "leading term (|P|+h(P))/2-1 times k",
                move || {
                    let f = diamond_free_family(k, variant)?;
                    if !is_free_of_all(&f, &[variant.poset()], Mode::Weak)? {
                        return Err(Error::Precondition(format!("{name} band family is not free")));
                    }
                    Ok(f.len() as i64)
                },
            ));
        }
    }
    Ok(rows)
}

/// Sum of the `count` lowest level sizes of `[k]^d`.
fn lowest_levels(k: usize, d: usize, count: usize) -> u64 {
    (d..d + count).map(|r| level_size(k, d, r)).sum()
}

fn within_lowest(f: &GridFamily, d: usize, count: usize) -> bool {
    f.points().iter().all(|p| p.rank() < d + count)
}

/// Greedy saturation in rank order: downward closed, inside the `p - 1`
/// lowest levels, and no larger than those levels.
pub fn plan_prop6(max: usize) -> Result<Vec<RowSpec>> {
    check_max("max", max, 2, PROP6_MAX)?;
    let mut rows = Vec::new();
    let posets = [("chain:3", Poset::chain(3)), ("vee:2", Poset::vee(2)), ("diamond:2", Poset::diamond(2))];
    for d in [2, 3] {
        for k in 2..=max {
            for (name, p) in &posets {
                let inst = format!("{k}^{d} {name}");
                let shape = GridShape::cube(k, d)?;
                let levels = p.len() - 1;
                let greedy = {
                    let (shape, p) = (shape.clone(), p.clone());
                    move || greedy_saturate(&shape, std::slice::from_ref(&p), Mode::Weak, &Enumeration::RankIncreasing)
                };
                let g = greedy.clone();
                rows.push(RowSpec::new(
                    &inst,
                    "greedy size",
                    Relation::Le,
                    int(lowest_levels(k, d, levels) as usize),
                    "sum of the p-1 lowest level sizes",
                    move || Ok(g()?.len() as i64),
                ));
                let g = greedy.clone();
                rows.push(RowSpec::new(
                    &inst,
                    "greedy downward closed",
                    Relation::Eq,
                    int(1),
                    "structure",
                    move || Ok(flag(g()?.is_downward_closed())),
                ));
                let g = greedy.clone();
                rows.push(RowSpec::new(
                    &inst,
                    "greedy in p-1 lowest levels",
                    Relation::Eq,
                    int(1),
                    "structure",
                    move || Ok(flag(within_lowest(&g()?, d, levels))),
                ));
                if shape.point_count() <= 16 {
                    let p = p.clone();
                    let shape = shape.clone();
                    rows.push(RowSpec::new(
                        &inst,
                        "sat minus greedy size",
                        Relation::Le,
                        int(0),
                        "greedy is feasible",
                        move || {
                            let sat = sat_exact(&shape, std::slice::from_ref(&p), Mode::Weak)?.value as i64;
                            Ok(sat - greedy()?.len() as i64)
                        },
                    ));
                }
            }
        }
    }
    let sq = GridShape::cube(3, 2)?;
    rows.push(RowSpec::new("3^2 chain:3", "MCL greedy size", Relation::Eq, int(2), "bottom and top levels", {
        let sq = sq.clone();
        move || Ok(greedy_saturate(&sq, &[Poset::chain(3)], Mode::Weak, &Enumeration::Mcl)?.len() as i64)
    }));
    rows.push(RowSpec::new(
        "3^2 chain:3",
        "MCL greedy is bottom+top",
        Relation::Eq,
        int(1),
        "bottom and top levels",
        move || {
            let f = greedy_saturate(&sq, &[Poset::chain(3)], Mode::Weak, &Enumeration::Mcl)?;
            let expected = level_set(&sq, 2).union(&level_set(&sq, 6))?;
            Ok(flag(f == expected))
        },
    ));
    Ok(rows)
}

/// The four quantities of the conjectured equality chain for `J_3` and
/// `∨_3`, `n = 2..=max`. Only the grid maximum is asserted.
pub fn plan_conj5(max: usize) -> Result<Vec<RowSpec>> {
    check_max("max", max, 2, CONJ5_MAX)?;
    let s = 3;
    let mut rows = Vec::new();
    for n in 2..=max {
        let inst = format!("n={n} s={s}");
        let pats = PatternFamily::single(j_matrix(s)?);
        let p2 = pats.clone();
        rows.push(RowSpec::new(&inst, "sat(n,n,J_s)", Relation::Observe, None, "search", move || {
            Ok(sat_matrix(n, n, &pats)?.value as i64)
        }));
        rows.push(RowSpec::new(&inst, "ex(n,n,J_s)", Relation::Observe, None, "search", move || {
            Ok(ex_matrix(n, n, &p2)?.value as i64)
        }));
        rows.push(RowSpec::new(
            &inst,
            "sat*(vee:s)",
            Relation::Observe,
            None,
            "search",
            sat_value(GridShape::cube(n, 2)?, vec![Poset::vee(s)], Mode::Strong),
        ));
        rows.push(RowSpec::new(
            &inst,
            "La*(vee:s)",
            Relation::Eq,
            int(4 * n - 4),
            "formula 2(k+l)-4",
            la_value(GridShape::cube(n, 2)?, vec![Poset::vee(s)], Mode::Strong),
        ));
        rows.push(RowSpec::new(
            &inst,
            "chain of equalities holds",
            Relation::Observe,
            None,
            "observation",
            move || Ok(flag(crate::engine::conjecture_five_report(n, s)?.chain_holds)),
        ));
    }
    Ok(rows)
}

/// Plans a report by name.
pub fn plan(name: &str, max: usize) -> Result<Vec<RowSpec>> {
    match name {
        "thm4" => plan_thm4(max),
        "thm8" => plan_thm8(max),
        "prop5" => plan_prop5(max),
        "prop6" => plan_prop6(max),
        "conj5" => plan_conj5(max),
        other => {
            Err(Error::Precondition(format!("unknown report `{other}` (expected thm4, thm8, prop5, prop6 or conj5)")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_csv_is_header_only() {
        let r = Report::new("report", json!({}));
        assert_eq!(r.to_csv(true), format!("{CSV_HEADER}\n"));
        assert!(r.all_match());
    }

    #[test]
    fn relations() {
        let e = Some(Ratio::new(25, 2));
        assert_eq!(Relation::Within(1).holds(12, e), Some(true));
        assert_eq!(Relation::Within(1).holds(14, e), Some(false));
        assert_eq!(Relation::Le.holds(3, int(3)), Some(true));
        assert_eq!(Relation::Ge.holds(2, int(3)), Some(false));
        assert_eq!(Relation::Observe.holds(2, int(3)), None);
    }

    #[test]
    fn small_reports_match() {
        for name in ["thm4", "thm8", "prop5", "prop6", "conj5"] {
            let specs = plan(name, 3).unwrap();
            let r = run_sequential(name, json!({"max": 3}), &specs).unwrap();
            let bad: Vec<_> = r.mismatches().collect();
            assert!(bad.is_empty(), "{name}: {bad:?}");
        }
        let conj = run_sequential("conj5", json!({}), &plan_conj5(2).unwrap()).unwrap();
        assert!(conj.rows.iter().filter(|r| r.relation == Relation::Observe).all(|r| r.matches.is_none()));
    }

    #[test]
    fn one_row_csv() {
        let spec = RowSpec::new("2x3", "La*(vee:2)", Relation::Eq, int(4), "formula k+l-1", || Ok(4));
        let mut r = Report::new("thm4", json!({}));
        r.rows.push(spec.evaluate().unwrap());
        assert_eq!(r.to_csv(true), format!("{CSV_HEADER}\n2x3,La*(vee:2),4,eq,4,formula k+l-1,true,0\n"));
    }

    #[test]
    fn limits() {
        assert!(plan("thm4", 7).is_err());
        assert!(plan("thm8", 1).is_err());
        assert!(plan("nope", 3).is_err());
    }
}
