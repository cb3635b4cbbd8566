//! `braidcode`: construct, encode, decode and verify braid codes stored as JSON.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use braidcode::bench;
use braidcode::braid1d::{self, BraidParams1D, CStarMode, ClassFilter};
use braidcode::braidnd::{self, UnitaryBraidParamsND};
use braidcode::codec;
use braidcode::generator::{self, GeneratorCode};
use braidcode::oracle::{self, Verdict};
use braidcode::params::{parse_qtable, Params};
use braidcode::{Codeword, ColorMap, Error, GridPoint};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

const LIMIT_VAR: &str = "BRAIDCODE_VERIFY_LIMIT";

#[derive(Parser)]
#[command(name = "braidcode", version, about = "Multiset braid codes on integer grids")]
struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a code and write its color map.
    Construct(ConstructArgs),
    /// Print the codeword of a tag.
    Encode(EncodeArgs),
    /// Recover the tag of a codeword.
    Decode(DecodeArgs),
    /// List the tags consistent with a partial codeword.
    ErasureDecode(ErasureArgs),
    /// Check distinguishability by brute force.
    Verify(VerifyArgs),
    /// Pick braid parameters with the fewest colors.
    Optimize(OptimizeArgs),
    /// Color counts over prime-window grid families, as TSV.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    Auto,
}

impl From<ClassArg> for ClassFilter {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::One => ClassFilter::One,
            ClassArg::Two => ClassFilter::Two,
            ClassArg::Auto => ClassFilter::Any,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CStarArg {
    Existing,
    Fresh,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long, value_delimiter = ',')]
    dims: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    block: Vec<usize>,
    /// Sub-block sizes; all ones when omitted.
    #[arg(long, value_delimiter = ',')]
    parts: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value = "auto")]
    class: ClassArg,
    #[arg(long)]
    g: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    q: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    c: Option<Vec<usize>>,
    /// Catalog generator names, one per part.
    #[arg(long, value_delimiter = ',')]
    generators: Option<Vec<String>>,
    /// n-D unitary construction from `--qtable`.
    #[arg(long, requires = "qtable")]
    unitary: bool,
    #[arg(long)]
    qtable: Option<PathBuf>,
    /// Shrink the constructed grid to these sides.
    #[arg(long, value_delimiter = ',')]
    target_dims: Option<Vec<usize>>,
    /// Color used when a 1D code is shrunk to a multiple of m.
    #[arg(long, value_enum)]
    cstar: Option<CStarArg>,
    /// Read a shrunk 1D code as a flat window instead of a cycle.
    #[arg(long)]
    flat: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long)]
    map: PathBuf,
    #[arg(long)]
    point: String,
    /// Print palette labels instead of ids.
    #[arg(long)]
    labels: bool,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long)]
    map: PathBuf,
    #[arg(long)]
    codeword: Option<String>,
    /// Read the codeword as one associated-matrix label per sub-grid.
    #[arg(long)]
    labels: bool,
    /// Print the associated matrix and the B matrix.
    #[arg(long)]
    dump_matrices: bool,
}

#[derive(Args)]
struct ErasureArgs {
    #[arg(long)]
    map: PathBuf,
    /// The colors that were read.
    #[arg(long, conflicts_with = "point")]
    codeword: Option<String>,
    /// Encode this tag and drop `--erasures` colors from it.
    #[arg(long, requires = "erasures")]
    point: Option<String>,
    #[arg(long)]
    erasures: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    map: PathBuf,
    /// Ignore the block limit.
    #[arg(long)]
    exhaustive: bool,
    /// Also check multiplicity one and periodic color classes.
    #[arg(long)]
    structure: bool,
}

#[derive(Args)]
struct OptimizeArgs {
    #[arg(long)]
    dims: usize,
    #[arg(long, value_delimiter = ',', required = true)]
    parts: Vec<usize>,
    #[arg(long, value_enum, default_value = "auto")]
    class: ClassArg,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    from: usize,
    #[arg(long, default_value_t = 3)]
    to: usize,
}

enum Failure {
    Lib(Error),
    Usage(String),
    Io(String),
    /// A construction that should be distinguishable is not.
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Verification(_) => 4,
            Failure::Lib(e) => match e {
                Error::Infeasible(_) | Error::BoundExceeded { .. } => 3,
                Error::NotACodeword { .. } | Error::NotASubCodeword => 5,
                _ => 2,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Lib(e) => e.to_string(),
            Failure::Usage(s) | Failure::Io(s) | Failure::Verification(s) => s.clone(),
        }
    }
}

struct Report {
    text: String,
    json: Value,
    code: u8,
}

impl Report {
    fn ok(text: String, json: Value) -> Self {
        Report { text, json, code: 0 }
    }
}

type Outcome = Result<Report, Failure>;

fn verify_limit() -> Result<usize, Failure> {
    match std::env::var(LIMIT_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("{LIMIT_VAR} must be a non-negative integer, got {v:?}"))),
        Err(_) => Ok(oracle::DEFAULT_LIMIT),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load_map(path: &Path) -> Result<ColorMap, Failure> {
    Ok(ColorMap::from_json(&read(path)?)?)
}

fn join(values: &[usize]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

#[derive(Deserialize)]
struct QTableFile {
    g: usize,
    q: BTreeMap<String, BTreeMap<String, usize>>,
}

fn construct_unitary(a: &ConstructArgs) -> Result<(ColorMap, bool), Failure> {
    let path = a
        .qtable
        .as_ref()
        .ok_or_else(|| Failure::Usage("--unitary needs --qtable".into()))?;
    let file: QTableFile =
        serde_json::from_str(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let q = parse_qtable(&a.block, &file.q).map_err(Failure::Usage)?;
    let params = UnitaryBraidParamsND {
        m: a.block.clone(),
        g: file.g,
        q,
    };
    let bad = params.validate();
    if !bad.is_empty() {
        return Err(Error::InvalidParams(bad).into());
    }
    let dims = params.dims()?;
    if !a.dims.is_empty() && a.dims != dims {
        return Err(Failure::Usage(format!(
            "--dims {} does not match the q table, which gives {}",
            join(&a.dims),
            join(&dims)
        )));
    }
    let map = braidnd::construct_unitary_nd(&params)?;
    match &a.target_dims {
        Some(target) => {
            let ext = braidnd::extend_arbitrary_size(&map, target)?;
            Ok((ext.map, ext.guaranteed))
        }
        None => Ok((map, true)),
    }
}

fn construct_braid(a: &ConstructArgs) -> Result<(ColorMap, bool), Failure> {
    let (&size, &m) = match (a.dims.as_slice(), a.block.as_slice()) {
        ([size], [m]) => (size, m),
        _ => {
            return Err(Failure::Usage(
                "1D braid codes take one --dims and one --block value; use --unitary for n-D".into(),
            ))
        }
    };
    let parts = a.parts.clone().unwrap_or_else(|| vec![1; m]);
    if parts.iter().sum::<usize>() != m {
        return Err(Failure::Usage(format!(
            "parts {} do not sum to the block {m}",
            join(&parts)
        )));
    }
    let params = match (a.g, &a.q) {
        (Some(g), Some(q)) => BraidParams1D {
            size,
            parts: parts.clone(),
            g,
            c: a.c.clone().unwrap_or_else(|| vec![1; parts.len()]),
            q: q.clone(),
        },
        (None, None) if a.c.is_none() => braid1d::optimize_generators(size, &parts, a.class.into())?.params,
        _ => return Err(Failure::Usage("explicit parameters need both --g and --q".into())),
    };
    let bad = params.validate();
    if !bad.is_empty() {
        return Err(Error::InvalidParams(bad).into());
    }
    let map = match &a.generators {
        Some(names) => {
            let gens = names
                .iter()
                .map(|n| generator::builtin(n))
                .collect::<Result<Vec<GeneratorCode>, _>>()?;
            braid1d::construct(&params, &gens)?
        }
        None => braid1d::construct_auto(&params)?,
    };
    let target = match a.target_dims.as_deref() {
        None => return Ok((map, true)),
        Some([t]) => *t,
        Some(_) => return Err(Failure::Usage("--target-dims takes one value for a 1D code".into())),
    };
    if a.flat {
        return Ok((braid1d::restrict_flat(&map, target)?, true));
    }
    if target == size {
        return Ok((map, true));
    }
    if target % m == 0 {
        let mode = match a.cstar {
            Some(CStarArg::Fresh) => CStarMode::Fresh,
            Some(CStarArg::Existing) => CStarMode::Existing,
            None if params.parts.iter().all(|&p| p == 1) => CStarMode::Existing,
            None => CStarMode::Fresh,
        };
        return Ok((braid1d::modify_general_size(&map, target, mode)?, true));
    }
    let r = braid1d::restrict(&map, target)?;
    Ok((r.map, r.guaranteed))
}

fn construct(a: &ConstructArgs) -> Outcome {
    let (map, guaranteed) = if a.unitary {
        construct_unitary(a)?
    } else {
        construct_braid(a)?
    };
    let limit = verify_limit()?;
    let blocks = map.coding_area().len();
    let verdict = if blocks <= limit {
        Some(oracle::is_distinguishable_within(&map, limit)?)
    } else {
        None
    };
    let verified = match &verdict {
        None => "skipped".to_string(),
        Some(Verdict::Distinguishable) => "ok".to_string(),
        Some(Verdict::Counterexample(x, y)) if guaranteed => {
            return Err(Failure::Verification(format!(
                "constructed map is not distinguishable: tags {x} and {y} share a codeword"
            )))
        }
        Some(Verdict::Counterexample(x, y)) => format!("counterexample {x} {y}"),
    };
    let body = map.to_json()?;
    let colors = oracle::count_colors(&map);
    let summary = format!("colors={colors} blocks={blocks} verified={verified}");
    let json_map: Value = serde_json::from_str(&body).map_err(|e| Failure::Io(e.to_string()))?;
    match &a.out {
        Some(path) => {
            fs::write(path, body).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            Ok(Report::ok(
                format!("wrote {} {summary}", path.display()),
                json!({"out": path.display().to_string(), "colors": colors, "blocks": blocks, "verified": verified}),
            ))
        }
        None => {
            eprintln!("{summary}");
            Ok(Report::ok(
                body,
                json!({"colors": colors, "blocks": blocks, "verified": verified, "map": json_map}),
            ))
        }
    }
}

fn parse_point(s: &str) -> Result<GridPoint, Failure> {
    Ok(GridPoint::from_str(s)?)
}

fn encode(a: &EncodeArgs) -> Outcome {
    let map = load_map(&a.map)?;
    let tag = parse_point(&a.point)?;
    let w = map.encode(&tag)?;
    let labels: Vec<&str> = w.colors().iter().map(|&c| map.label(c)).collect();
    let text = if a.labels { labels.join(",") } else { w.to_string() };
    Ok(Report::ok(
        text,
        json!({"tag": tag.coords(), "codeword": w.colors(), "labels": labels}),
    ))
}

fn decode(a: &DecodeArgs) -> Outcome {
    let map = load_map(&a.map)?;
    let mut lines = Vec::new();
    let mut out = json!({});
    if a.dump_matrices {
        let g = match map.params() {
            Some(Params::Braid1d(r)) => r.g,
            _ => return Err(Error::Unsupported("matrices exist for 1D braid maps only".into()).into()),
        };
        let am = codec::associated_matrix(&map)?;
        let bm = codec::b_matrix(&am, g)?;
        lines.push(codec::dump_matrices(&am, &bm).trim_end().to_string());
        out["A"] = json!(am.rows);
        out["B"] = json!(bm.rows);
    }
    match &a.codeword {
        Some(text) => {
            let w = if a.labels {
                codec::codeword_from_labels(&map, &parse_labels(text)?)?
            } else {
                Codeword::from_str(text)?
            };
            let res = codec::decode(&map, &w)?;
            if !lines.is_empty() {
                lines.push(String::new());
            }
            lines.push(res.to_string());
            out["tag"] = json!(res.tag.coords());
            out["diagnostics"] = json!(res
                .diagnostics
                .iter()
                .map(|d| json!({"j": d.j, "i": d.i + 1, "r": d.r}))
                .collect::<Vec<_>>());
        }
        None if !a.dump_matrices => return Err(Failure::Usage("decode needs --codeword or --dump-matrices".into())),
        None => {}
    }
    Ok(Report::ok(lines.join("\n"), out))
}

/// Labels keep their order, unlike a codeword.
fn parse_labels(text: &str) -> braidcode::Result<Vec<usize>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::InvalidParams(vec![format!("bad label {t:?}")]))
        })
        .collect()
}

fn erasure_decode(a: &ErasureArgs) -> Outcome {
    let map = load_map(&a.map)?;
    let partial = match (&a.codeword, &a.point, a.erasures) {
        (Some(text), None, _) => Codeword::from_str(text)?,
        (None, Some(point), Some(e)) => {
            let w = map.encode(&parse_point(point)?)?;
            if e >= w.len() {
                return Err(Failure::Usage(format!("cannot erase {e} of {} colors", w.len())));
            }
            Codeword::new(w.colors()[e..].to_vec())
        }
        _ => return Err(Failure::Usage("give --codeword, or --point with --erasures".into())),
    };
    let res = codec::erasure_decode(&map, &partial)?;
    let tags: Vec<String> = res.candidates.iter().map(|t| t.to_string()).collect();
    Ok(Report::ok(
        format!("candidates={} resolution={}", tags.join(","), res.resolution),
        json!({
            "partial": partial.colors(),
            "candidates": res.candidates.iter().map(|t| t.coords().to_vec()).collect::<Vec<_>>(),
            "resolution": res.resolution,
        }),
    ))
}

fn verify(a: &VerifyArgs) -> Outcome {
    let map = load_map(&a.map)?;
    let limit = if a.exhaustive { usize::MAX } else { verify_limit()? };
    let verdict = oracle::is_distinguishable_within(&map, limit)?;
    let colors = oracle::count_colors(&map);
    let mut out = json!({"colors": colors, "blocks": map.coding_area().len()});
    let (mut text, code) = match &verdict {
        Verdict::Distinguishable => {
            out["verdict"] = json!("ok");
            ("Ok".to_string(), 0)
        }
        Verdict::Counterexample(x, y) => {
            out["verdict"] = json!("counterexample");
            out["pair"] = json!([x.coords(), y.coords()]);
            (format!("counterexample {x} {y}"), 6)
        }
    };
    text.push_str(&format!("\ncolors={colors}"));
    if a.structure {
        let report = oracle::check_structure(&map, limit)?;
        out["repeated"] = json!(report.repeated.len());
        out["period_violations"] = json!(report.period.len());
        text.push_str(&format!(
            "\nrepeated={} period_violations={}",
            report.repeated.len(),
            report.period.len()
        ));
        if let Some((x, y)) = report.period.first() {
            text.push_str(&format!(" first={x},{y}"));
        }
    }
    Ok(Report { text, json: out, code })
}

fn optimize(a: &OptimizeArgs) -> Outcome {
    let best = braid1d::optimize_generators(a.dims, &a.parts, a.class.into())?;
    let p = &best.params;
    Ok(Report::ok(
        format!(
            "g={} c={} q={} l={} cost={} exact={}",
            p.g,
            join(&p.c),
            join(&p.q),
            join(&p.lengths()),
            best.cost,
            best.exact
        ),
        json!({"g": p.g, "c": p.c, "q": p.q, "l": p.lengths(), "cost": best.cost, "exact": best.exact}),
    ))
}

fn run_bench(a: &BenchArgs) -> Outcome {
    if a.from == 0 || a.from > a.to {
        return Err(Failure::Usage("need 1 <= --from <= --to".into()));
    }
    let rows = bench::order_bench(a.m, a.n, a.from..=a.to)?;
    let json_rows: Vec<Value> = rows
        .iter()
        .map(|r| json!({"s": r.s, "primes": r.primes, "L": r.side, "K": r.colors, "ratio": r.ratio, "constructed": r.constructed}))
        .collect();
    Ok(Report::ok(
        bench::to_tsv(&rows).trim_end().to_string(),
        json!(json_rows),
    ))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Construct(a) => construct(a),
        Command::Encode(a) => encode(a),
        Command::Decode(a) => decode(a),
        Command::ErasureDecode(a) => erasure_decode(a),
        Command::Verify(a) => verify(a),
        Command::Optimize(a) => optimize(a),
        Command::Bench(a) => run_bench(a),
    };
    match outcome {
        Ok(report) => {
            if cli.json {
                println!("{}", report.json);
            } else {
                println!("{}", report.text);
            }
            ExitCode::from(report.code)
        }
        Err(failure) => {
            let code = failure.code();
            if cli.json {
                println!("{}", json!({"error": failure.message(), "code": code}));
            }
            eprintln!("error: {}", failure.message());
            ExitCode::from(code)
        }
    }
}
