//! Command-line front end and the JSON/CSV wire formats.
//!
//! Exit codes: 0 success (every computed pair matched), 2 identity
//! mismatch or failed cross-check, 3 budget or cap exceeded, 4 input error.
//!
//! Integers that can outgrow 64 bits (orders, orbit counts, lengths) are
//! written as decimal strings.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::catalog::{parse_group_spec, realize, GroupSpec};
use crate::combinat::{stirling2_capped, StirlingTable, DEFAULT_STIRLING_CAP};
use crate::divisions::{
    division_sequence_with, m24_formula_rhs, rhs_division_sum, transitivity_degree, Budgets, DivisionEntry,
    DivisionOptions, DivisionTable, Elapsed, IdentityReport, Verifier, DEFAULT_REPRESENTATIVE_BUDGET,
};
use crate::error::Error;
use crate::group::{build_chain, GeneratedGroup};
use crate::action::{DEFAULT_ELEMENT_BUDGET, DEFAULT_STATE_CAP};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_INPUT: i32 = 4;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::CapExceeded { .. } | Error::LongRunning { .. } | Error::Insufficient { .. } => EXIT_BUDGET,
        Error::NonIntegerAverage { .. } | Error::Inconsistent(_) => EXIT_MISMATCH,
        Error::RepeatedPoint(_)
        | Error::OutOfRange { .. }
        | Error::Malformed(_)
        | Error::DegreeMismatch { .. }
        | Error::UnknownFamily(_)
        | Error::BadParameter(_)
        | Error::FileNotFound(_)
        | Error::FileParse(_) => EXIT_INPUT,
    }
}

#[derive(Debug, Parser)]
#[command(name = "permdiv", version, about = "Exact orbit counts and division numbers of permutation groups")]
pub struct Cli {
    /// Worker threads for element streaming and level extension (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stirling numbers of the second kind S(k, j).
    Stirling {
        #[arg(long)]
        k: usize,
        /// Print only S(k, j).
        #[arg(long)]
        j: Option<usize>,
        /// Print rows 1..=k instead of row k.
        #[arg(long)]
        table: bool,
        #[arg(long, default_value_t = DEFAULT_STIRLING_CAP)]
        stirling_cap: usize,
    },
    /// Bell number B_k.
    Bell {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_STIRLING_CAP)]
        stirling_cap: usize,
    },
    /// Label, degree, order and transitivity degree of a group.
    Info {
        /// Group spec: S:N, A:N, C:N, D:N, M11, M12, M24 or file:PATH.
        spec: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compare the Burnside average, exhaustive orbit count and division sum.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        /// A single k or an inclusive range such as 1..6.
        #[arg(long)]
        k: KRange,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Division numbers d_j with sub-orbit lengths.
    Divisions {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        max_j: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Group spec: S:N, A:N, C:N, D:N, M11, M12, M24 or file:PATH.
    #[arg(long)]
    pub group: String,
    /// Largest N^k enumerated exhaustively.
    #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
    pub state_cap: u64,
    /// Largest group streamed element by element without --long-running-ok.
    #[arg(long, default_value_t = DEFAULT_ELEMENT_BUDGET)]
    pub element_budget: u64,
    /// Largest number of orbit representatives kept per level.
    #[arg(long, default_value_t = DEFAULT_REPRESENTATIVE_BUDGET)]
    pub rep_budget: usize,
    #[arg(long, default_value_t = DEFAULT_STIRLING_CAP)]
    pub stirling_cap: usize,
    /// Stream groups larger than the element budget (e.g. all of M24).
    #[arg(long)]
    pub long_running_ok: bool,
}

impl RunArgs {
    fn budgets(&self) -> Result<Budgets, Error> {
        if self.state_cap == 0 || self.element_budget == 0 || self.rep_budget == 0 || self.stirling_cap == 0 {
            return Err(Error::BadParameter("caps and budgets must be positive".into()));
        }
        Ok(Budgets {
            element_budget: self.element_budget,
            state_cap: self.state_cap,
            representative_budget: self.rep_budget,
            stirling_cap: self.stirling_cap,
            long_running_ok: self.long_running_ok,
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Inclusive range of k values: `4` or `1..6`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KRange {
    pub start: usize,
    pub end: usize,
}

impl FromStr for KRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("`{t}` is not a positive integer"));
        let (start, end) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
            None => {
                let k = parse(s)?;
                (k, k)
            }
        };
        if start == 0 || end < start {
            return Err(format!("`{s}` is not a nonempty range of k >= 1"));
        }
        Ok(KRange { start, end })
    }
}

/// Wire form of an [`IdentityReport`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportJson {
    pub group: String,
    pub degree: usize,
    pub order: String,
    pub k: usize,
    pub lhs_burnside: Option<String>,
    pub mid_orbits: Option<String>,
    pub rhs_divisions: String,
    pub matched: bool,
    pub elapsed_ms: Elapsed,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

fn parse_big(s: &str) -> Result<BigUint, Error> {
    s.parse()
        .map_err(|_| Error::FileParse(format!("`{s}` is not a decimal integer")))
}

impl From<&IdentityReport> for ReportJson {
    fn from(r: &IdentityReport) -> Self {
        ReportJson {
            group: r.label.clone(),
            degree: r.degree,
            order: r.order.to_string(),
            k: r.k,
            lhs_burnside: r.lhs_burnside.as_ref().map(ToString::to_string),
            mid_orbits: r.mid_orbits.as_ref().map(ToString::to_string),
            rhs_divisions: r.rhs_divisions.to_string(),
            matched: r.matched,
            elapsed_ms: r.elapsed_ms.clone(),
            notes: r.notes.clone(),
        }
    }
}

impl TryFrom<ReportJson> for IdentityReport {
    type Error = Error;

    fn try_from(r: ReportJson) -> Result<Self, Error> {
        Ok(IdentityReport {
            label: r.group,
            degree: r.degree,
            order: parse_big(&r.order)?,
            k: r.k,
            lhs_burnside: r.lhs_burnside.as_deref().map(parse_big).transpose()?,
            mid_orbits: r.mid_orbits.as_deref().map(parse_big).transpose()?,
            rhs_divisions: parse_big(&r.rhs_divisions)?,
            matched: r.matched,
            elapsed_ms: r.elapsed_ms,
            notes: r.notes,
        })
    }
}

/// Wire form of a [`DivisionTable`]. Each `lengths` item is a sub-orbit
/// length, written `L` when it occurs once and `L*m` when `m` sub-orbits share it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableJson {
    pub group: String,
    pub degree: usize,
    pub order: String,
    pub entries: Vec<EntryJson>,
    pub t: usize,
    pub trivial_stabilizer_from: Option<usize>,
    pub truncated: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formula_check: Option<Vec<FormulaCheck>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryJson {
    pub j: usize,
    pub d: String,
    pub lengths: Vec<String>,
}

/// Division sum against the closed M24 formula for one k.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormulaCheck {
    pub k: usize,
    pub divisions: String,
    pub formula: String,
    pub pass: bool,
}

impl From<&DivisionTable> for TableJson {
    fn from(t: &DivisionTable) -> Self {
        let entries = t
            .entries
            .iter()
            .map(|e| EntryJson {
                j: e.j,
                d: e.d.to_string(),
                lengths: e
                    .lengths
                    .iter()
                    .rev()
                    .map(|(l, m)| if *m == BigUint::from(1u32) { l.to_string() } else { format!("{l}*{m}") })
                    .collect(),
            })
            .collect();
        TableJson {
            group: t.label.clone(),
            degree: t.degree,
            order: t.order.to_string(),
            entries,
            t: t.transitivity_degree(),
            trivial_stabilizer_from: t.trivial_stabilizer_from,
            truncated: t.truncated,
            formula_check: None,
        }
    }
}

impl TryFrom<TableJson> for DivisionTable {
    type Error = Error;

    fn try_from(t: TableJson) -> Result<Self, Error> {
        let entries = t
            .entries
            .into_iter()
            .map(|e| {
                let mut entry = DivisionEntry {
                    j: e.j,
                    d: parse_big(&e.d)?,
                    lengths: Default::default(),
                };
                for item in &e.lengths {
                    let (l, m) = match item.split_once('*') {
                        Some((l, m)) => (parse_big(l)?, parse_big(m)?),
                        None => (parse_big(item)?, BigUint::from(1u32)),
                    };
                    *entry.lengths.entry(l).or_default() += m;
                }
                Ok(entry)
            })
            .collect::<Result<Vec<_>, Error>>()?;
        Ok(DivisionTable {
            label: t.group,
            degree: t.degree,
            order: parse_big(&t.order)?,
            entries,
            trivial_stabilizer_from: t.trivial_stabilizer_from,
            truncated: t.truncated,
        })
    }
}

/// Parses arguments from the process and runs; returns the exit code.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    let mut stderr = std::io::stderr().lock();
    run(cli, &mut stdout, &mut stderr)
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if let Some(threads) = cli.threads {
        // a global pool can only be installed once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build_global();
    }
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(CliError::Domain(e)) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
        Err(CliError::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

enum CliError {
    Domain(Error),
    Io(std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

fn load_group(text: &str, err: &mut dyn Write) -> Result<(GroupSpec, GeneratedGroup), CliError> {
    let spec = parse_group_spec(text)?;
    if spec.is_degenerate() {
        writeln!(err, "warning: {spec} is the trivial group")?;
    }
    let group = realize(&spec)?;
    Ok((spec, group))
}

fn emit(output: &OutputArgs, out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    match &output.output {
        Some(path) => std::fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Stirling { k, j, table, stirling_cap } => {
            if k > stirling_cap {
                return Err(Error::CapExceeded {
                    what: format!("k={k}"),
                    cap: stirling_cap as u64,
                }
                .into());
            }
            if let Some(j) = j {
                writeln!(out, "{}", stirling2_capped(k, j, stirling_cap)?)?;
                return Ok(EXIT_OK);
            }
            let stirling = StirlingTable::new(k);
            let rows = if table { 1..=k } else { k..=k };
            for row in rows {
                let values: Vec<String> = stirling.row(row)?[1..].iter().map(ToString::to_string).collect();
                writeln!(out, "{}", values.join(" "))?;
            }
            Ok(EXIT_OK)
        }
        Command::Bell { k, stirling_cap } => {
            if k == 0 {
                return Err(Error::BadParameter("bell needs k >= 1".into()).into());
            }
            writeln!(out, "{}", crate::combinat::bell_capped(k, stirling_cap)?)?;
            Ok(EXIT_OK)
        }
        Command::Info { spec, output } => cmd_info(&spec, &output, out, err),
        Command::Verify { run, k, output } => cmd_verify(&run, k, &output, out, err),
        Command::Divisions { run, max_j, output } => cmd_divisions(&run, max_j, &output, out, err),
    }
}

#[derive(Debug, Serialize)]
struct InfoJson {
    group: String,
    degree: usize,
    order: String,
    t: usize,
    base: Vec<usize>,
    generators: Vec<String>,
}

fn cmd_info(spec: &str, output: &OutputArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let (_, group) = load_group(spec, err)?;
    let chain = build_chain(&group, &[])?;
    let info = InfoJson {
        group: group.label().to_string(),
        degree: group.degree(),
        order: chain.order().to_string(),
        t: transitivity_degree(&group)?,
        base: chain.base().iter().map(|x| x + 1).collect(),
        generators: group.generators().iter().map(ToString::to_string).collect(),
    };
    let text = match output.format {
        Format::Json => serde_json::to_string_pretty(&info)? + "\n",
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["group", "degree", "order", "t"])?;
            w.write_record([&info.group, &info.degree.to_string(), &info.order, &info.t.to_string()])?;
            String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv is utf-8")
        }
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "group:  {}", info.group);
            let _ = writeln!(s, "degree: {}", info.degree);
            let _ = writeln!(s, "order:  {}", info.order);
            let _ = writeln!(s, "t:      {}", info.t);
            let _ = writeln!(s, "base:   {:?}", info.base);
            s
        }
    };
    emit(output, out, &text)?;
    Ok(EXIT_OK)
}

fn opt(v: &Option<BigUint>) -> String {
    v.as_ref().map_or_else(|| "-".to_string(), ToString::to_string)
}

fn cmd_verify(
    run: &RunArgs,
    k: KRange,
    output: &OutputArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let budgets = run.budgets()?;
    let (_, group) = load_group(&run.group, err)?;
    let mut verifier = Verifier::new(group, budgets)?;
    let mut reports = Vec::new();
    for k in k.start..=k.end {
        let report = verifier.verify(k)?;
        if !report.matched {
            writeln!(
                err,
                "MISMATCH {} k={}: lhs={} mid={} rhs={}",
                report.label,
                report.k,
                opt(&report.lhs_burnside),
                opt(&report.mid_orbits),
                report.rhs_divisions
            )?;
        }
        reports.push(report);
    }
    let text = match output.format {
        Format::Json => {
            let mut s = String::new();
            for r in &reports {
                s += &serde_json::to_string(&ReportJson::from(r))?;
                s.push('\n');
            }
            s
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["group", "degree", "order", "k", "lhs_burnside", "mid_orbits", "rhs_divisions", "matched"])?;
            for r in &reports {
                w.write_record([
                    r.label.clone(),
                    r.degree.to_string(),
                    r.order.to_string(),
                    r.k.to_string(),
                    r.lhs_burnside.as_ref().map(ToString::to_string).unwrap_or_default(),
                    r.mid_orbits.as_ref().map(ToString::to_string).unwrap_or_default(),
                    r.rhs_divisions.to_string(),
                    r.matched.to_string(),
                ])?;
            }
            String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv is utf-8")
        }
        Format::Text => {
            let mut s = String::new();
            for r in &reports {
                let _ = writeln!(
                    s,
                    "{} k={:<3} burnside={} orbits={} divisions={} {}",
                    r.label,
                    r.k,
                    opt(&r.lhs_burnside),
                    opt(&r.mid_orbits),
                    r.rhs_divisions,
                    if r.matched { "MATCH" } else { "MISMATCH" }
                );
                for note in &r.notes {
                    let _ = writeln!(s, "    {note}");
                }
            }
            s
        }
    };
    emit(output, out, &text)?;
    Ok(if reports.iter().all(|r| r.matched) { EXIT_OK } else { EXIT_MISMATCH })
}

fn cmd_divisions(
    run: &RunArgs,
    max_j: usize,
    output: &OutputArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let budgets = run.budgets()?;
    let (spec, group) = load_group(&run.group, err)?;
    let options = DivisionOptions {
        representative_budget: budgets.representative_budget,
        ..DivisionOptions::default()
    };
    let table = division_sequence_with(&group, max_j, &options)?;
    if table.truncated {
        writeln!(
            err,
            "warning: representative budget reached; table stops at j={}",
            table.computed_up_to()
        )?;
    }
    let mut json = TableJson::from(&table);
    if spec == GroupSpec::Mathieu24 {
        let checks = (1..=table.computed_up_to())
            .map(|k| {
                let divisions = rhs_division_sum(&table, k)?;
                let formula = m24_formula_rhs(k)?;
                Ok(FormulaCheck {
                    k,
                    pass: divisions == formula,
                    divisions: divisions.to_string(),
                    formula: formula.to_string(),
                })
            })
            .collect::<Result<Vec<_>, Error>>()?;
        json.formula_check = Some(checks);
    }
    let text = match output.format {
        Format::Json => serde_json::to_string_pretty(&json)? + "\n",
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["group", "j", "d", "lengths"])?;
            for e in &json.entries {
                w.write_record([json.group.clone(), e.j.to_string(), e.d.clone(), e.lengths.join(";")])?;
            }
            String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv is utf-8")
        }
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "{} (degree {}, order {}), t = {}", json.group, json.degree, json.order, json.t);
            for e in &json.entries {
                let _ = writeln!(s, "j={:<3} d={:<12} lengths: {}", e.j, e.d, e.lengths.join(" "));
            }
            if let Some(j) = json.trivial_stabilizer_from {
                let _ = writeln!(s, "stabilizers trivial from j={j}");
            }
            if let Some(checks) = &json.formula_check {
                for c in checks {
                    let _ = writeln!(
                        s,
                        "k={:<3} divisions={} formula={} {}",
                        c.k,
                        c.divisions,
                        c.formula,
                        if c.pass { "PASS" } else { "FAIL" }
                    );
                }
            }
            s
        }
    };
    emit(output, out, &text)?;
    let failed = json.formula_check.iter().flatten().any(|c| !c.pass);
    Ok(if failed { EXIT_MISMATCH } else { EXIT_OK })
}
