//! Command-line front end shared by the `fairdiv` binary and the tests.
//!
//! Exit codes: 0 success, 2 parse or validation failure, 3 input that is not
//! a bankruptcy problem, 4 I/O failure. User numbers in every table are
//! one-based.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::error::Error;
use crate::fairness::SatisfactionReport;
use crate::problem::AllocationProblem;
use crate::rules::{Allocation, Rule};
use crate::sim::{round_ratio, run_sweep, DemandDistribution, SweepConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NOT_BANKRUPT: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "fairdiv", version, about = "Fair division of a scarce resource among claimants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Divide the estate of a problem file with one or more rules.
    Allocate {
        /// Problem JSON: {"demands": [...], "estate": ...}
        problem: PathBuf,
        /// Comma separated rule ids, or `all`.
        #[arg(long, default_value = "all")]
        rules: String,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Significant digits, or `full` for round-trip precision.
        #[arg(long, default_value = "6")]
        precision: Precision,
    },
    /// Satisfaction rates and fairness indices of a given allocation.
    Evaluate {
        problem: PathBuf,
        /// Allocation JSON: {"amounts": [...]}
        allocation: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long, default_value = "6")]
        precision: Precision,
    },
    /// Monte-Carlo sweep over the estate-to-demand ratio.
    Simulate {
        /// `uniform:LO,HI` or `weibull:SHAPE,SCALE`.
        #[arg(long, default_value = "uniform:0,100")]
        dist: String,
        #[arg(long, default_value_t = 3)]
        users: usize,
        /// `START:STOP:STEP` or a comma separated list.
        #[arg(long, default_value = "0.05:0.95:0.05")]
        ratios: String,
        #[arg(long, default_value_t = 300)]
        reps: usize,
        /// Defaults to $FAIRDIV_SEED, then 42.
        #[arg(long, env = "FAIRDIV_SEED")]
        seed: Option<u64>,
        #[arg(long, default_value = "all")]
        rules: String,
        /// Output directory (created if missing).
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Also write pooled DFS/PS box statistics.
        #[arg(long)]
        boxstats: bool,
        #[arg(long, default_value = "6")]
        precision: Precision,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Number formatting: a count of significant digits or full precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    Significant(usize),
    Full,
}

impl FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "full" {
            return Ok(Precision::Full);
        }
        match s.parse::<usize>() {
            Ok(d) if (1..=17).contains(&d) => Ok(Precision::Significant(d)),
            _ => Err(format!("expected 1..=17 or `full`, got `{s}`")),
        }
    }
}

pub fn format_number(x: f64, precision: Precision) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded = match precision {
        Precision::Full => x,
        Precision::Significant(d) => format!("{:.*e}", d - 1, x).parse().unwrap_or(x),
    };
    // Normalize -0 so outputs stay diffable.
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    format!("{rounded}")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Int(usize),
    Num(f64),
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

/// Rectangular table with a mandatory header.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl OutputTable {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "ragged row");
        self.rows.push(row);
    }

    /// Comma separated, LF line endings, header first.
    pub fn to_csv(&self, precision: Precision) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|cell| match cell {
                    Cell::Text(s) => s.clone(),
                    Cell::Int(i) => i.to_string(),
                    Cell::Num(x) => format_number(*x, precision),
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    /// `{"columns": [...], "rows": [[...], ...]}`; non-finite numbers are
    /// written as strings.
    pub fn to_json(&self, precision: Precision) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                Value::Array(
                    row.iter()
                        .map(|cell| match cell {
                            Cell::Text(s) => Value::String(s.clone()),
                            Cell::Int(i) => Value::from(*i),
                            Cell::Num(x) => {
                                let text = format_number(*x, precision);
                                text.parse::<f64>()
                                    .ok()
                                    .filter(|v| v.is_finite())
                                    .and_then(serde_json::Number::from_f64)
                                    .map(Value::Number)
                                    .unwrap_or(Value::String(text))
                            }
                        })
                        .collect(),
                )
            })
            .collect();
        let doc = serde_json::json!({ "columns": self.columns, "rows": rows });
        let mut text = serde_json::to_string_pretty(&doc).expect("table serializes");
        text.push('\n');
        text
    }

    pub fn render(&self, format: Format, precision: Precision) -> String {
        match format {
            Format::Csv => self.to_csv(precision),
            Format::Json => self.to_json(precision),
        }
    }
}

/// Failure carrying its process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn invalid(message: impl Into<String>) -> Self {
        Self { code: EXIT_INVALID, message: message.into() }
    }

    fn io(message: impl Into<String>) -> Self {
        Self { code: EXIT_IO, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        match err {
            Error::NotBankrupt { .. } => Self { code: EXIT_NOT_BANKRUPT, message: err.to_string() },
            other => Self::invalid(other.to_string()),
        }
    }
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::invalid(format!("{}: malformed JSON: {e}", path.display())))
}

fn object_with_fields<'a>(
    value: &'a Value,
    path: &Path,
    fields: &[&str],
) -> Result<&'a serde_json::Map<String, Value>, CliError> {
    let object = value
        .as_object()
        .ok_or_else(|| CliError::invalid(format!("{}: expected a JSON object", path.display())))?;
    if let Some(unknown) = object.keys().find(|k| !fields.contains(&k.as_str())) {
        return Err(CliError::invalid(format!("{}: unknown field `{unknown}`", path.display())));
    }
    if let Some(missing) = fields.iter().find(|f| !object.contains_key(**f)) {
        return Err(CliError::invalid(format!("{}: missing field `{missing}`", path.display())));
    }
    Ok(object)
}

fn number_array(value: &Value, path: &Path, field: &str) -> Result<Vec<f64>, CliError> {
    let items = value.as_array().ok_or_else(|| {
        CliError::invalid(format!("{}: field `{field}` must be an array of numbers", path.display()))
    })?;
    items
        .iter()
        .enumerate()
        .map(|(i, v)| {
            v.as_f64().ok_or_else(|| {
                CliError::invalid(format!(
                    "{}: field `{field}` element {i} is not a number",
                    path.display()
                ))
            })
        })
        .collect()
}

/// Reads `{"demands": [...], "estate": ...}`.
pub fn load_problem(path: &Path) -> Result<AllocationProblem, CliError> {
    let value = read_json(path)?;
    let object = object_with_fields(&value, path, &["demands", "estate"])?;
    let demands = number_array(&object["demands"], path, "demands")?;
    let estate = object["estate"].as_f64().ok_or_else(|| {
        CliError::invalid(format!("{}: field `estate` must be a number", path.display()))
    })?;
    Ok(AllocationProblem::new(demands, estate)?)
}

/// Reads `{"amounts": [...]}`.
pub fn load_amounts(path: &Path) -> Result<Vec<f64>, CliError> {
    let value = read_json(path)?;
    let object = object_with_fields(&value, path, &["amounts"])?;
    number_array(&object["amounts"], path, "amounts")
}

/// One row per (rule, user), ordered by rule id then user.
pub fn allocation_table(problem: &AllocationProblem, rules: &[Rule]) -> Result<OutputTable, CliError> {
    let mut sorted = rules.to_vec();
    sorted.sort_by_key(|r| r.id());
    let mut table = OutputTable::new(&["rule", "user", "amount", "note"]);
    for rule in sorted {
        let allocation = rule.apply(problem)?;
        let note = if rule == Rule::Nucleolus { "talmud" } else { "" };
        for (i, x) in allocation.amounts.iter().enumerate() {
            table.push(vec![rule.id().into(), Cell::Int(i + 1), Cell::Num(*x), note.into()]);
        }
    }
    Ok(table)
}

/// Per-user rates followed by the two indices.
pub fn evaluation_table(problem: &AllocationProblem, allocation: &Allocation) -> Result<OutputTable, CliError> {
    let report = SatisfactionReport::new(problem, allocation)?;
    let mut table = OutputTable::new(&["metric", "user", "case", "value"]);
    let per_user: [(&str, &[f64]); 4] = [
        ("amount", &allocation.amounts),
        ("dfs", &report.dfs),
        ("ps", &report.ps),
        ("propensity", &report.propensity),
    ];
    for (metric, values) in per_user {
        for (i, v) in values.iter().enumerate() {
            table.push(vec![
                metric.into(),
                Cell::Int(i + 1),
                report.cases[i].label().into(),
                Cell::Num(*v),
            ]);
        }
    }
    for (metric, v) in [("jain", report.jain), ("player_fairness", report.player_fairness)] {
        table.push(vec![metric.into(), "".into(), "".into(), Cell::Num(v)]);
    }
    Ok(table)
}

/// `START:STOP:STEP` (inclusive) or `a,b,c`.
pub fn parse_ratios(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::invalid(format!("cannot parse ratios `{spec}`"));
    let ratios: Vec<f64> = if spec.contains(':') {
        let parts: Vec<f64> = spec
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        let [start, stop, step] = parts[..] else { return Err(bad()) };
        if !(step > 0.0) || stop < start {
            return Err(bad());
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        (0..count).map(|k| round_ratio(start + k as f64 * step)).collect()
    } else {
        spec.split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?
    };
    if let Some(r) = ratios.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
        return Err(CliError::invalid(format!("ratio {r} is outside (0, 1)")));
    }
    Ok(ratios)
}

/// Files written by `simulate`, keyed by name.
pub fn simulation_tables(config: &SweepConfig, boxstats: bool) -> Result<(usize, Vec<(&'static str, OutputTable)>), CliError> {
    let output = run_sweep(config)?;
    let mut sweep = OutputTable::new(&["ratio", "rule", "index", "mean", "q1", "q3"]);
    for r in &output.indices {
        sweep.push(vec![
            Cell::Num(r.ratio),
            r.rule.id().into(),
            r.index.id().into(),
            Cell::Num(r.mean),
            Cell::Num(r.q1),
            Cell::Num(r.q3),
        ]);
    }
    let mut cases = OutputTable::new(&["ratio", "frac_Gm", "frac_Gg", "frac_Mm", "frac_Mg"]);
    for c in &output.cases {
        cases.push(vec![
            Cell::Num(c.ratio),
            Cell::Num(c.frac_gm),
            Cell::Num(c.frac_gg),
            Cell::Num(c.frac_mm),
            Cell::Num(c.frac_mg),
        ]);
    }
    let mut files = vec![("sweep.csv", sweep), ("cases.csv", cases)];
    if boxstats {
        let mut boxes =
            OutputTable::new(&["ratio", "rule", "rate", "min", "q1", "median", "q3", "max"]);
        for b in &output.boxes {
            let s = b.stats;
            boxes.push(vec![
                Cell::Num(b.ratio),
                b.rule.id().into(),
                b.rate.id().into(),
                Cell::Num(s.min),
                Cell::Num(s.q1),
                Cell::Num(s.median),
                Cell::Num(s.q3),
                Cell::Num(s.max),
            ]);
        }
        files.push(("boxstats.csv", boxes));
    }
    Ok((output.instances, files))
}

fn execute(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    let emit = |out: &mut dyn Write, text: String| {
        out.write_all(text.as_bytes()).map_err(|e| CliError::io(format!("cannot write output: {e}")))
    };
    match command {
        Command::Allocate { problem, rules, format, precision } => {
            let rules = Rule::parse_list(&rules)?;
            let problem = load_problem(&problem)?;
            let table = allocation_table(&problem, &rules)?;
            emit(out, table.render(format, precision))
        }
        Command::Evaluate { problem, allocation, format, precision } => {
            let problem = load_problem(&problem)?;
            let amounts = load_amounts(&allocation)?;
            let allocation = Allocation::checked(&problem, amounts)?;
            let table = evaluation_table(&problem, &allocation)?;
            emit(out, table.render(format, precision))
        }
        Command::Simulate { dist, users, ratios, reps, seed, rules, out: dir, boxstats, precision } => {
            let config = SweepConfig {
                distribution: dist.parse::<DemandDistribution>()?,
                users,
                ratios: parse_ratios(&ratios)?,
                reps,
                seed: seed.unwrap_or(42),
                rules: Rule::parse_list(&rules)?,
                fixed_demands: None,
            };
            let started = Instant::now();
            let (instances, files) = simulation_tables(&config, boxstats)?;
            fs::create_dir_all(&dir)
                .map_err(|e| CliError::io(format!("cannot create {}: {e}", dir.display())))?;
            for (name, table) in &files {
                let path = dir.join(name);
                fs::write(&path, table.to_csv(precision))
                    .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?;
            }
            let names: Vec<&str> = files.iter().map(|(n, _)| *n).collect();
            emit(
                out,
                format!(
                    "simulated {instances} instances ({} ratios x {reps} reps, {users} users, {}, seed {}) in {:.3}s; wrote {} to {}\n",
                    config.ratios.len(),
                    config.distribution,
                    config.seed,
                    started.elapsed().as_secs_f64(),
                    names.join(", "),
                    dir.display()
                ),
            )
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Tables go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{e}");
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "fairdiv: {}", e.message);
            e.code
        }
    }
}
