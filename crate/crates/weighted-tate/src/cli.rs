//! Command-line front end: load a JSON job description, dispatch to the
//! pipeline, and render the results.
//!
//! Exit codes: 0 on success, 2 for any problem with the job file or the
//! requested parameters (reported with line and column where the input
//! format provides one), 3 when the resolver hits its resource cap.
//!
//! The `--json` documents are stable: maps are emitted in sorted key
//! order, and the text renderers are pure functions of the documents, so
//! re-rendering an emitted document reproduces the text output exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::dmod::FlagOptions;
use crate::polyring::{parse_polynomial, ParseError, Polynomial, WeightedRing};
use crate::field::PrimeField;
use crate::resolution::GradedModule;
use crate::tate::{
    choose_r, sheaf_cohomology_with, tate_window_with, CohomologyQuery, CohomologyTable,
    Provenance, TateError, TateWindow,
};

#[derive(Parser)]
#[command(
    name = "weighted-tate",
    about = "Sheaf cohomology on weighted projective stacks",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print regularity invariants and the chosen starting degree.
    Regularity(JobArgs),
    /// Print the cohomology table h^i(F(j)) over a twist range.
    Cohomology(CohomologyArgs),
    /// Print the resolved Tate window.
    Tate(TateArgs),
    /// Print the dimensions of the graded pieces of M.
    Hilbert(HilbertArgs),
}

#[derive(Args)]
struct JobArgs {
    /// Path to a JSON job description.
    spec: PathBuf,
    /// Cap on the expanded dimension the resolver may allocate.
    #[arg(long, default_value_t = 100_000)]
    limit: usize,
}

#[derive(Args)]
struct CohomologyArgs {
    #[command(flatten)]
    job: JobArgs,
    /// Inclusive twist range, written LO..HI.
    #[arg(long, allow_hyphen_values = true)]
    twists: RangeArg,
    /// Highest cohomological degree to report (default: ambient dimension).
    #[arg(long)]
    imax: Option<usize>,
    /// Starting degree for the window (must be at least the computed one).
    #[arg(long, allow_negative_numbers = true)]
    r: Option<i64>,
    /// Emit the machine-readable document instead of the table.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct TateArgs {
    #[command(flatten)]
    job: JobArgs,
    /// Number of resolution rounds to run.
    #[arg(long)]
    steps: usize,
    /// Starting degree for the window (must be at least the computed one).
    #[arg(long, allow_negative_numbers = true)]
    r: Option<i64>,
    /// Emit the machine-readable document instead of the display.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct HilbertArgs {
    #[command(flatten)]
    job: JobArgs,
    /// Inclusive degree range, written LO..HI.
    #[arg(long, allow_hyphen_values = true)]
    range: RangeArg,
}

#[derive(Clone, Copy)]
struct RangeArg {
    lo: i64,
    hi: i64,
}

impl std::str::FromStr for RangeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let Some((lo, hi)) = s.split_once("..") else {
            return Err(format!("expected LO..HI, got `{s}`"));
        };
        let lo: i64 = lo.trim().parse().map_err(|_| format!("bad range start `{lo}`"))?;
        let hi: i64 = hi.trim().parse().map_err(|_| format!("bad range end `{hi}`"))?;
        if lo > hi {
            return Err(format!("empty range {lo}..{hi}"));
        }
        Ok(RangeArg { lo, hi })
    }
}

enum CliError {
    /// Problems with the job file or the requested parameters.
    Spec(String),
    /// The resolver exceeded its resource cap.
    Resource(String),
}

impl From<TateError> for CliError {
    fn from(e: TateError) -> Self {
        match e {
            TateError::ResourceLimit { .. } => CliError::Resource(e.to_string()),
            _ => CliError::Spec(e.to_string()),
        }
    }
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(CliError::Spec(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Resource(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(command: &Command) -> Result<String, CliError> {
    match command {
        Command::Regularity(args) => {
            let job = load_job(&args.spec)?;
            render_regularity(&job)
        }
        Command::Cohomology(args) => {
            let job = load_job(&args.job.spec)?;
            let query = CohomologyQuery {
                j_lo: args.twists.lo,
                j_hi: args.twists.hi,
                i_max: args.imax,
                r_override: args.r,
            };
            let opts = FlagOptions { max_expanded: args.job.limit, ..Default::default() };
            let table = sheaf_cohomology_with(&job.module, &query, opts)?;
            let doc = cohomology_doc(&table);
            if args.json {
                Ok(to_json(&doc))
            } else {
                Ok(render_cohomology(&doc, &job.note))
            }
        }
        Command::Tate(args) => {
            if args.steps == 0 {
                return Err(CliError::Spec("--steps must be at least 1".into()));
            }
            let job = load_job(&args.job.spec)?;
            let opts = FlagOptions { max_expanded: args.job.limit, ..Default::default() };
            let window = tate_window_with(&job.module, args.steps, args.r, opts)?;
            let doc = tate_doc(&window);
            if args.json {
                Ok(to_json(&doc))
            } else {
                Ok(render_tate(&doc, &job.note))
            }
        }
        Command::Hilbert(args) => {
            let job = load_job(&args.job.spec)?;
            let dims: Vec<String> = (args.range.lo..=args.range.hi)
                .map(|d| job.module.dim(d).to_string())
                .collect();
            Ok(format!("{}\n", dims.join(" ")))
        }
    }
}

/// A loaded job: the module plus a human-readable note about any
/// normalization applied to the input.
struct Job {
    module: GradedModule,
    note: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JobSpec {
    weights: Vec<i64>,
    #[serde(rename = "char", default = "default_char")]
    characteristic: u64,
    #[serde(default)]
    vars: Option<Vec<String>>,
    module: ModuleSpec,
}

fn default_char() -> u64 {
    32003
}

#[derive(Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
enum ModuleSpec {
    /// `S/I` for the ideal generated by the listed polynomials.
    #[serde(rename = "quotient-by-ideal")]
    QuotientByIdeal { generators: Vec<String> },
    /// Cokernel of the map given column by column into the twisted free
    /// module with the listed generator degrees.
    #[serde(rename = "cokernel")]
    Cokernel { ambient_degrees: Vec<i64>, columns: Vec<Vec<String>> },
}

fn load_job(path: &PathBuf) -> Result<Job, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Spec(format!("cannot read {}: {e}", path.display())))?;
    let spec: JobSpec = serde_json::from_str(&text).map_err(|e| {
        let msg = e.to_string();
        // serde_json appends its own position suffix; ours is in front.
        let msg = msg.split(" at line ").next().unwrap_or(&msg).to_string();
        CliError::Spec(format!(
            "{} at line {}, column {}: {msg}",
            path.display(),
            e.line(),
            e.column()
        ))
    })?;
    build_job(spec).map_err(|msg| CliError::Spec(format!("{}: {msg}", path.display())))
}

fn build_job(spec: JobSpec) -> Result<Job, String> {
    let field = PrimeField::new(spec.characteristic).map_err(|e| e.to_string())?;
    let names: Vec<String> = match spec.vars {
        Some(v) => v,
        None => (0..spec.weights.len()).map(|i| format!("x{i}")).collect(),
    };
    if names.len() != spec.weights.len() {
        return Err(format!(
            "expected {} variable names, got {}",
            spec.weights.len(),
            names.len()
        ));
    }
    // The ring wants nondecreasing weights; sort stably, carrying each
    // variable name with its weight so the polynomials keep their meaning,
    // and say so in the text output.
    let mut order: Vec<usize> = (0..spec.weights.len()).collect();
    order.sort_by_key(|&i| spec.weights[i]);
    let sorted = order.windows(2).all(|w| w[0] < w[1]);
    let weights: Vec<i64> = order.iter().map(|&i| spec.weights[i]).collect();
    let names: Vec<String> = order.iter().map(|&i| names[i].clone()).collect();
    let note = if sorted {
        None
    } else {
        Some(format!("note: weights sorted nondecreasing; variable order is now {}", names.join(" ")))
    };
    let ring =
        WeightedRing::with_var_names(field, weights, names).map_err(|e| e.to_string())?;
    let module = match spec.module {
        ModuleSpec::QuotientByIdeal { generators } => {
            let gens = generators
                .iter()
                .enumerate()
                .map(|(i, s)| parse_poly(&ring, s, &format!("generator {}", i + 1)))
                .collect::<Result<Vec<_>, _>>()?;
            GradedModule::quotient_by_ideal(ring, gens).map_err(|e| e.to_string())?
        }
        ModuleSpec::Cokernel { ambient_degrees, columns } => {
            let mut cols = Vec::new();
            for (ci, col) in columns.iter().enumerate() {
                let col = col
                    .iter()
                    .enumerate()
                    .map(|(ri, s)| {
                        parse_poly(&ring, s, &format!("column {}, row {}", ci + 1, ri + 1))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                cols.push(col);
            }
            GradedModule::cokernel(ring, ambient_degrees, cols).map_err(|e| e.to_string())?
        }
    };
    Ok(Job { module, note })
}

fn parse_poly(ring: &WeightedRing, s: &str, what: &str) -> Result<Polynomial, String> {
    parse_polynomial(ring, s).map_err(|e: ParseError| {
        format!("{what} at line {}, column {}: {}", e.line, e.col, e.msg)
    })
}

fn render_regularity(job: &Job) -> Result<String, CliError> {
    let m = &job.module;
    let reg = m.regularity().ok_or(TateError::ZeroModule).map_err(CliError::from)?;
    let r = choose_r(m).map_err(CliError::from)?;
    let mut out = header(m, job.note.as_deref());
    writeln!(out, "reg = {reg}").unwrap();
    writeln!(out, "sigma = {}", m.ring.sigma()).unwrap();
    writeln!(out, "h0m_vanishes = {}", m.h0m_vanishes()).unwrap();
    writeln!(out, "r = {r}").unwrap();
    Ok(out)
}

fn header(m: &GradedModule, note: Option<&str>) -> String {
    let weights: Vec<String> = m.ring.weights().iter().map(|w| w.to_string()).collect();
    let mut out = format!(
        "weights {} over F_{}\n",
        weights.join(" "),
        m.ring.field.modulus()
    );
    if let Some(note) = note {
        out.push_str(note);
        out.push('\n');
    }
    out
}

// ----- machine-readable documents -----

#[derive(Serialize, Deserialize)]
pub struct CohomologyDoc {
    pub weights: Vec<i64>,
    #[serde(rename = "char")]
    pub characteristic: u64,
    pub r_used: i64,
    /// `"h0" → { "j" → value }`, one inner entry per requested twist.
    pub table: BTreeMap<String, BTreeMap<String, usize>>,
    pub provenance: BTreeMap<String, BTreeMap<String, String>>,
}

fn provenance_name(p: Provenance) -> &'static str {
    match p {
        Provenance::DimensionCount => "dimension-count",
        Provenance::RegularityVanishing => "regularity-vanishing",
        Provenance::ResolutionSocle => "resolution-socle",
    }
}

pub fn cohomology_doc(t: &CohomologyTable) -> CohomologyDoc {
    let mut table: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
    let mut provenance: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    for (&(i, j), &(v, p)) in &t.entries {
        table.entry(format!("h{i}")).or_default().insert(j.to_string(), v);
        provenance
            .entry(format!("h{i}"))
            .or_default()
            .insert(j.to_string(), provenance_name(p).to_string());
    }
    CohomologyDoc {
        weights: t.weights.clone(),
        characteristic: t.p,
        r_used: t.r_used,
        table,
        provenance,
    }
}

#[derive(Serialize, Deserialize)]
pub struct TateDoc {
    pub weights: Vec<i64>,
    #[serde(rename = "char")]
    pub characteristic: u64,
    pub r: i64,
    pub sigma: i64,
    pub steps: usize,
    pub columns: Vec<TateColumnDoc>,
    pub jumps: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
pub struct TateColumnDoc {
    pub l: i64,
    /// `"flag"` for resolved columns, `"module"` for the right-hand side.
    pub side: String,
    pub pieces: Vec<TatePieceDoc>,
}

#[derive(Serialize, Deserialize)]
pub struct TatePieceDoc {
    pub c: i64,
    pub s: i64,
    pub mult: usize,
}

pub fn tate_doc(w: &TateWindow) -> TateDoc {
    TateDoc {
        weights: w.weights.clone(),
        characteristic: w.p,
        r: w.r,
        sigma: w.sigma,
        steps: w.steps,
        columns: w
            .columns
            .iter()
            .map(|c| TateColumnDoc {
                l: c.ell,
                side: if c.r_side { "module" } else { "flag" }.to_string(),
                pieces: c
                    .pieces
                    .iter()
                    .map(|&(t, mult)| TatePieceDoc { c: t.c, s: t.s, mult })
                    .collect(),
            })
            .collect(),
        jumps: w.jumps.iter().copied().collect(),
    }
}

fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("document serializes");
    s.push('\n');
    s
}

// ----- text renderers (pure functions of the documents) -----

/// Sorted row labels "h0", "h1", ... and the numeric twists, descending.
fn table_axes(doc: &CohomologyDoc) -> (Vec<String>, Vec<i64>) {
    let mut rows: Vec<(usize, String)> = doc
        .table
        .keys()
        .map(|k| (k[1..].parse().expect("row label"), k.clone()))
        .collect();
    rows.sort();
    let mut twists: Vec<i64> = doc
        .table
        .values()
        .next()
        .map(|m| m.keys().map(|j| j.parse().expect("twist label")).collect())
        .unwrap_or_default();
    twists.sort_by_key(|&j| std::cmp::Reverse(j));
    (rows.into_iter().map(|(_, k)| k).collect(), twists)
}

pub fn render_cohomology(doc: &CohomologyDoc, note: &Option<String>) -> String {
    let (rows, twists) = table_axes(doc);
    // Trailing rows of zeros say nothing and are dropped, matching the
    // usual table displays; h0 always stays.
    let mut keep = rows.len();
    while keep > 1 && doc.table[&rows[keep - 1]].values().all(|&v| v == 0) {
        keep -= 1;
    }
    let weights: Vec<String> = doc.weights.iter().map(|w| w.to_string()).collect();
    let mut out = format!(
        "weights {} over F_{}\n",
        weights.join(" "),
        doc.characteristic
    );
    if let Some(note) = note {
        out.push_str(note);
        out.push('\n');
    }
    writeln!(out, "r = {}", doc.r_used).unwrap();

    let label_width = rows[..keep].iter().map(|r| r.len()).max().unwrap_or(2);
    let mut widths = Vec::new();
    for &j in &twists {
        let mut w = format!("j={j}").len();
        for row in &rows[..keep] {
            w = w.max(doc.table[row][&j.to_string()].to_string().len());
        }
        widths.push(w);
    }
    let mut line = " ".repeat(label_width);
    for (&j, &w) in twists.iter().zip(&widths) {
        line.push_str(&format!("  {:>w$}", format!("j={j}")));
    }
    out.push_str(line.trim_end());
    out.push('\n');
    for row in &rows[..keep] {
        let mut line = format!("{row:<label_width$}");
        for (&j, &w) in twists.iter().zip(&widths) {
            line.push_str(&format!("  {:>w$}", doc.table[row][&j.to_string()]));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out.push_str("provenance (D = dimension count, V = vanishing, S = resolution socle)\n");
    for row in &rows[..keep] {
        let mut line = format!("{row:<label_width$}");
        for (&j, &w) in twists.iter().zip(&widths) {
            let letter = match doc.provenance[row][&j.to_string()].as_str() {
                "dimension-count" => "D",
                "regularity-vanishing" => "V",
                _ => "S",
            };
            line.push_str(&format!("  {letter:>w$}"));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

pub fn render_tate(doc: &TateDoc, note: &Option<String>) -> String {
    let weights: Vec<String> = doc.weights.iter().map(|w| w.to_string()).collect();
    let mut out = format!(
        "weights {} over F_{}\n",
        weights.join(" "),
        doc.characteristic
    );
    if let Some(note) = note {
        out.push_str(note);
        out.push('\n');
    }
    writeln!(out, "r = {}, sigma = {}, steps = {}", doc.r, doc.sigma, doc.steps).unwrap();
    for col in &doc.columns {
        let pieces = if col.pieces.is_empty() {
            "0".to_string()
        } else {
            col.pieces
                .iter()
                .map(|p| {
                    let t = format!("w_E({};{})", p.c, p.s);
                    if p.mult == 1 {
                        t
                    } else {
                        format!("{t}^{}", p.mult)
                    }
                })
                .collect::<Vec<_>>()
                .join(" + ")
        };
        let marker = if col.side == "module" { "  [module side]" } else { "" };
        writeln!(out, "l={}: {}{}", col.l, pieces, marker).unwrap();
    }
    let jumps: Vec<String> = doc.jumps.iter().map(|j| j.to_string()).collect();
    writeln!(out, "jumps: {}", jumps.join(" ")).unwrap();
    out
}
