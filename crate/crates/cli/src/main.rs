//! `gridposet`: exact extremal and saturation numbers for forbidden
//! subposets of grids, explicit constructions, the matrix correspondence
//! and reproduction tables.
//!
//! Exit codes: 0 success, 1 usage or limit error, 2 a report or
//! verification row disagreed with its expected value.

mod inputs;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gridposet::bridge::{consecutive_levels_free, verify_identities};
use gridposet::constructions::{
    diamond_free_family, greedy_saturate, vee_rows_cols_family, vee_three_border_family, vee_weak_family,
    vee_wedge_sat_chain, DiamondVariant, Enumeration,
};
use gridposet::containment::{contains_copy, is_saturated};
use gridposet::engine::{
    ex_matrix_with_limit, la_exact_with_limit, sat_exact_with_limit, sat_matrix_with_limit, SearchResult,
    LA_MAX_POINTS, MATRIX_MAX_CELLS, SAT_MAX_POINTS,
};
use gridposet::grid::{level_sizes, GridFamily, GridShape};
use gridposet::matrix::matrix_contains;
use gridposet::report::{plan, Report, RowSpec};
use gridposet::{Error, Mode};
use rayon::prelude::*;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "gridposet", version, about = "Forbidden subposet problems on grid posets")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Byte-reproducible output: timings zeroed, single worker thread.
    #[arg(long, global = true)]
    canonical: bool,
    /// Worker threads for independent report rows.
    #[arg(long, global = true, env = "GRIDPOSET_THREADS", default_value_t = 1)]
    threads: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Weak,
    Strong,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Weak => Mode::Weak,
            ModeArg::Strong => Mode::Strong,
        }
    }
}

#[derive(Args, Debug)]
struct Problem {
    /// Grid such as `3x4` or `3^2`.
    #[arg(long)]
    grid: String,
    /// Forbidden poset: `chain:p`, `vee:s`, `wedge:s`, `diamond:k`, or a
    /// cover-relation file. Repeat for a set.
    #[arg(long = "poset", required = true)]
    posets: Vec<String>,
    #[arg(long, value_enum, default_value_t = ModeArg::Weak)]
    mode: ModeArg,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Largest free family (`La` weak, `La*` strong).
    La {
        #[command(flatten)]
        problem: Problem,
        #[arg(long, default_value_t = LA_MAX_POINTS)]
        max_points: usize,
    },
    /// Smallest saturated family (`sat` weak, `sat*` strong).
    Sat {
        #[command(flatten)]
        problem: Problem,
        #[arg(long, default_value_t = SAT_MAX_POINTS)]
        max_points: usize,
    },
    /// Emit an explicit family as JSON.
    Construct(ConstructArgs),
    /// Check a family (JSON file) for copies and saturation.
    Contains {
        /// Family JSON `{"dims": [...], "points": [[...], ...]}`, or `-` for stdin.
        #[arg(long)]
        family: String,
        #[arg(long = "poset", required = true)]
        posets: Vec<String>,
        #[arg(long, value_enum, default_value_t = ModeArg::Weak)]
        mode: ModeArg,
    },
    /// 0-1 matrix patterns.
    #[command(subcommand)]
    Matrix(MatrixCommand),
    /// Block structures of the Boolean lattice.
    #[command(subcommand)]
    Bridge(BridgeCommand),
    /// Reproduction table against closed formulas.
    Report {
        #[arg(value_parser = ["thm4", "thm8", "prop5", "prop6", "conj5"])]
        name: String,
        /// Largest grid side.
        #[arg(long, default_value_t = 4)]
        max: usize,
    },
    /// Level sizes and width of a cube.
    Levels {
        #[arg(long)]
        grid: String,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyKind {
    /// Weak vee:s-free rows along the anti-diagonal of [k]^2.
    VeeWeak,
    /// Boundary of [k]x[l].
    VeeBorder,
    /// Top s-1 rows and right s-1 columns of [k]^2.
    VeeRowsCols,
    /// Three bands around the middle, diamond:2-free.
    DiamondD2,
    /// Three bands around the middle, diamond:3-free.
    DiamondD3,
    /// Anti-diagonal plus first row, saturated for {vee:2, wedge:2}.
    VeeWedgeSat,
    /// Greedy saturation of `--grid` for `--poset`.
    Greedy,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum OrderArg {
    Rank,
    Mcl,
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[arg(long, value_enum)]
    family: FamilyKind,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    grid: Option<String>,
    #[arg(long = "poset")]
    posets: Vec<String>,
    #[arg(long, value_enum, default_value_t = ModeArg::Weak)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = OrderArg::Rank)]
    order: OrderArg,
    /// Print an ASCII picture to stderr as well.
    #[arg(long)]
    render: bool,
}

#[derive(Subcommand, Debug)]
enum MatrixCommand {
    /// Most 1-entries avoiding every pattern.
    Ex(MatrixSearch),
    /// Fewest 1-entries in a saturated matrix.
    Sat(MatrixSearch),
    /// Whether a host matrix contains a pattern.
    Contains {
        /// Host matrix: file in `0`/`1` row format or `rows:010/101`.
        #[arg(long)]
        host: String,
        #[arg(long = "pattern", required = true)]
        patterns: Vec<String>,
    },
}

#[derive(Args, Debug)]
struct MatrixSearch {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: Option<usize>,
    /// `J:s`, `poset:SPEC`, `rows:010/101`, or a matrix file. Repeatable.
    #[arg(long = "pattern", required = true)]
    patterns: Vec<String>,
    #[arg(long, default_value_t = MATRIX_MAX_CELLS)]
    max_cells: usize,
}

#[derive(Subcommand, Debug)]
enum BridgeCommand {
    /// Check the block identities for one `n' = d(k-1)`.
    Verify {
        #[arg(long)]
        nprime: usize,
        #[arg(long)]
        d: usize,
    },
    /// Largest m with every m consecutive levels of 2^[n] free.
    LevelsFree {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        poset: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Weak)]
        mode: ModeArg,
    },
}

/// Failure modes mapped onto exit codes.
enum Failure {
    Usage(String),
    Mismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (stdout, code) = match run(&cli) {
        Ok(out) => (out, 0),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            (String::new(), 1)
        }
        Err(Failure::Mismatch(out)) => {
            eprintln!("error: some rows disagree with their expected values");
            (out, 2)
        }
    };
    let mut lock = std::io::stdout().lock();
    let _ = lock.write_all(stdout.as_bytes());
    let _ = lock.flush();
    ExitCode::from(code)
}

/// One JSON document per line; keys come out sorted, so output is stable.
fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string(v).expect("json values serialize");
    s.push('\n');
    s
}

fn run(cli: &Cli) -> Outcome {
    let common = &cli.common;
    match &cli.command {
        Command::La { problem, max_points } => {
            let (shape, posets) = problem_inputs(problem)?;
            let r = la_exact_with_limit(&shape, &posets, problem.mode.into(), *max_points)?;
            Ok(search_output(&r, common))
        }
        Command::Sat { problem, max_points } => {
            let (shape, posets) = problem_inputs(problem)?;
            let r = sat_exact_with_limit(&shape, &posets, problem.mode.into(), *max_points)?;
            Ok(search_output(&r, common))
        }
        Command::Construct(args) => construct(args, common),
        Command::Contains { family, posets, mode } => {
            let f = GridFamily::from_json_str(&inputs::read_text(family)?)?;
            let posets = posets.iter().map(|p| inputs::poset(p)).collect::<Result<Vec<_>, _>>()?;
            let mode: Mode = (*mode).into();
            let mut copies = Vec::new();
            for p in &posets {
                copies.push(match contains_copy(&f, p, mode)? {
                    Some(w) => w.to_json(f.shape(), p),
                    None => Value::Null,
                });
            }
            let free = copies.iter().all(Value::is_null);
            let saturated = is_saturated(&f, &posets, mode)?;
            Ok(render_json(&json!({
                "size": f.len(),
                "free": free,
                "saturated": saturated,
                "copies": copies,
            })))
        }
        Command::Matrix(cmd) => matrix(cmd, common),
        Command::Bridge(BridgeCommand::Verify { nprime, d }) => {
            let checks = verify_identities(*nprime, *d)?;
            let pass = checks.iter().all(|c| c.pass);
            let out = match common.format {
                Format::Json => render_json(&json!({ "nprime": nprime, "d": d, "pass": pass, "checks": checks })),
                Format::Csv => {
                    let mut s = String::from("check,pass,detail\n");
                    for c in &checks {
                        s.push_str(&format!("{},{},\"{}\"\n", c.name, c.pass, c.detail.replace('"', "\"\"")));
                    }
                    s
                }
            };
            if pass {
                Ok(out)
            } else {
                Err(Failure::Mismatch(out))
            }
        }
        Command::Bridge(BridgeCommand::LevelsFree { n, poset, mode }) => {
            let p = inputs::poset(poset)?;
            let m = consecutive_levels_free(*n, &p, (*mode).into())?;
            Ok(render_json(&json!({ "n": n, "poset": poset, "mode": Mode::from(*mode), "levels": m })))
        }
        Command::Report { name, max } => report(name, *max, common),
        Command::Levels { grid } => {
            let shape: GridShape = grid.parse()?;
            let k = shape.require_cubic()?;
            let d = shape.dim();
            let sizes = level_sizes(k, d);
            let width = shape.width()?;
            Ok(match common.format {
                Format::Json => render_json(&json!({
                    "k": k,
                    "d": d,
                    "levels": (d..=k * d).map(|r| json!({"rank": r, "size": sizes[r]})).collect::<Vec<_>>(),
                    "width": width,
                })),
                Format::Csv => {
                    let mut s = String::from("rank,size\n");
                    for r in d..=k * d {
                        s.push_str(&format!("{r},{}\n", sizes[r]));
                    }
                    s
                }
            })
        }
    }
}

fn problem_inputs(problem: &Problem) -> Result<(GridShape, Vec<gridposet::Poset>), Failure> {
    let shape: GridShape = problem.grid.parse()?;
    let posets = problem.posets.iter().map(|p| inputs::poset(p)).collect::<Result<Vec<_>, _>>()?;
    Ok((shape, posets))
}

fn search_output(r: &SearchResult, common: &Common) -> String {
    match common.format {
        Format::Json => render_json(&r.to_json(common.canonical)),
        Format::Csv => format!(
            "value,nodes_explored,pruned,wall_ms\n{},{},{},{}\n",
            r.value,
            r.stats.nodes_explored,
            r.stats.pruned,
            if common.canonical { 0 } else { r.stats.wall_ms }
        ),
    }
}

fn need(v: Option<usize>, name: &str) -> Result<usize, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("this family needs --{name}")))
}

fn construct(args: &ConstructArgs, common: &Common) -> Outcome {
    let f = match args.family {
        FamilyKind::VeeWeak => vee_weak_family(need(args.k, "k")?, need(args.s, "s")?)?,
        FamilyKind::VeeBorder => vee_three_border_family(need(args.k, "k")?, need(args.l, "l")?)?,
        FamilyKind::VeeRowsCols => vee_rows_cols_family(need(args.k, "k")?, need(args.s, "s")?)?,
        FamilyKind::DiamondD2 => diamond_free_family(need(args.k, "k")?, DiamondVariant::D2)?,
        FamilyKind::DiamondD3 => diamond_free_family(need(args.k, "k")?, DiamondVariant::D3)?,
        FamilyKind::VeeWedgeSat => vee_wedge_sat_chain(need(args.k, "k")?, need(args.l, "l")?)?,
        FamilyKind::Greedy => {
            let grid = args.grid.as_deref().ok_or_else(|| Failure::Usage("greedy needs --grid".into()))?;
            if args.posets.is_empty() {
                return Err(Failure::Usage("greedy needs at least one --poset".into()));
            }
            let shape: GridShape = grid.parse()?;
            let posets = args.posets.iter().map(|p| inputs::poset(p)).collect::<Result<Vec<_>, _>>()?;
            let order = match args.order {
                OrderArg::Rank => Enumeration::RankIncreasing,
                OrderArg::Mcl => Enumeration::Mcl,
            };
            greedy_saturate(&shape, &posets, args.mode.into(), &order)?
        }
    };
    if args.render {
        eprint!("{}", f.render());
    }
    Ok(match common.format {
        Format::Json => render_json(&serde_json::to_value(f.to_json()).expect("family serializes")),
        Format::Csv => {
            let d = f.shape().dim();
            let mut s = (1..=d).map(|i| format!("c{i}")).collect::<Vec<_>>().join(",");
            s.push('\n');
            for p in f.points() {
                s.push_str(&p.0.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","));
                s.push('\n');
            }
            s
        }
    })
}

fn matrix(cmd: &MatrixCommand, common: &Common) -> Outcome {
    match cmd {
        MatrixCommand::Ex(s) | MatrixCommand::Sat(s) => {
            let pats = inputs::pattern_family(&s.patterns)?;
            let m = s.m.unwrap_or(s.n);
            let r = if matches!(cmd, MatrixCommand::Ex(_)) {
                ex_matrix_with_limit(s.n, m, &pats, s.max_cells)?
            } else {
                sat_matrix_with_limit(s.n, m, &pats, s.max_cells)?
            };
            Ok(search_output(&r, common))
        }
        MatrixCommand::Contains { host, patterns } => {
            let a = inputs::matrix(host)?;
            let pats = inputs::pattern_family(patterns)?;
            let hits: Vec<Vec<String>> =
                pats.matrices().filter(|m| matrix_contains(&a, m)).map(|m| m.row_strings()).collect();
            Ok(render_json(&json!({ "contains": !hits.is_empty(), "contained_patterns": hits })))
        }
    }
}

fn evaluate(specs: &[RowSpec], threads: usize) -> Result<Vec<gridposet::report::ReportRow>, Failure> {
    if threads <= 1 {
        return specs.iter().map(|s| s.evaluate().map_err(Failure::from)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
    // collect keeps the planned row order
    pool.install(|| specs.par_iter().map(|s| s.evaluate()).collect::<Result<Vec<_>, _>>()).map_err(Failure::from)
}

fn report(name: &str, max: usize, common: &Common) -> Outcome {
    let specs = plan(name, max)?;
    let threads = if common.canonical { 1 } else { common.threads.max(1) };
    let mut report = Report::new(format!("report {name}"), json!({ "max": max }));
    report.rows = evaluate(&specs, threads)?;
    let out = match common.format {
        Format::Json => render_json(&report.to_json(common.canonical)),
        Format::Csv => report.to_csv(common.canonical),
    };
    if report.all_match() {
        Ok(out)
    } else {
        Err(Failure::Mismatch(out))
    }
}
