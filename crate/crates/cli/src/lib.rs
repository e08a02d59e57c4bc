//! Batch verification campaigns over posets, Coxeter groups and scaled W-sets.
//!
//! Every subcommand produces a [`Report`]; the process exits with 0 when every
//! verdict is as predicted, 1 when a violation is found and 2 on usage errors.

mod commands;
mod input;

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use pircon_core::limits::MAX_ELEMENTS_ENV;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "pircon-lab", version, about = "Special partial matchings, pircons and their order complexes")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Largest poset handed to homology, isomorphism or matching searches.
    #[arg(long, env = MAX_ELEMENTS_ENV, default_value_t = 64, global = true)]
    pub max_elements: usize,
    /// Largest Coxeter group that will be enumerated.
    #[arg(long, default_value_t = 5040, global = true)]
    pub max_group_order: usize,
    /// Include wall-clock timing (makes reports non-reproducible).
    #[arg(long, global = true)]
    pub timing: bool,
    /// Worker threads; 0 picks one per core.
    #[arg(long, default_value_t = 0, global = true)]
    pub jobs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify the order complex of every open interval as ball, sphere or neither.
    ClassifyIntervals(SourceArgs),
    /// Find an SPM (or special matching) for every non-trivial principal ideal.
    Certify(CertifyArgs),
    /// Convert Q = [0̂, M(1̂)] × 2 into P by clean zippings and removals.
    Convert(ConvertArgs),
    /// Re-check a conversion certificate without searching.
    VerifyCertificate(VerifyArgs),
    /// The non-pircon ideal of twisted identities in A4.
    CounterexampleA4,
    /// Collapse the order complex of Q = (P × 2) minus its extremes and (0̂, β).
    CollapseDemo(PosetArg),
    /// Quasiparabolic checks on a parabolic quotient.
    Qp(QpArgs),
    /// Test twisted conjugation on twisted identities for the quasiparabolic axioms.
    NofExperiment(NofArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Subset {
    /// The whole group.
    W,
    /// Twisted identities.
    Iota,
    /// Twisted involutions.
    Involutions,
}

#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    /// Poset JSON file.
    #[arg(long, conflicts_with = "coxeter", required_unless_present = "coxeter")]
    pub poset: Option<PathBuf>,
    /// Coxeter JSON, inline or as a file path.
    #[arg(long)]
    pub coxeter: Option<String>,
    /// Subset of the group whose Bruhat order is used.
    #[arg(long, value_enum, default_value_t = Subset::W, requires = "coxeter")]
    pub subset: Subset,
    /// Restrict to the ideal below this element, e.g. `s2s1s3`.
    #[arg(long, requires = "coxeter")]
    pub below: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Pircon,
    Zircon,
}

#[derive(Debug, Clone, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_enum, default_value_t = Mode::Pircon)]
    pub mode: Mode,
    /// Propose M(x) = θ(s)xs for the first right descent s instead of searching.
    #[arg(long)]
    pub twisted: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ConvertArgs {
    #[arg(long)]
    pub poset: PathBuf,
    /// SPM as a JSON object `{"x": "M(x)", ...}`.
    #[arg(long)]
    pub spm: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// A certificate, or a `convert` report containing one.
    pub certificate: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct PosetArg {
    #[arg(long)]
    pub poset: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct QpArgs {
    /// Coxeter JSON, inline or as a file path.
    #[arg(long)]
    pub coxeter: String,
    /// Comma separated generators of the parabolic subgroup, e.g. `s1,s3`.
    #[arg(long, default_value = "")]
    pub j: String,
    /// Compare every reduced expression even above 12 elements.
    #[arg(long)]
    pub exhaustive: bool,
}

#[derive(Debug, Clone, Args)]
pub struct NofArgs {
    /// One Coxeter JSON with `theta`; without it a built-in list is run.
    #[arg(long)]
    pub coxeter: Option<String>,
}

/// Deterministic, schema-versioned result of one command.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub command: String,
    pub inputs: Value,
    /// Every verdict is as predicted.
    pub ok: bool,
    pub summary: Value,
    pub items: Vec<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl Report {
    pub(crate) fn new(command: &str, inputs: Value) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            inputs,
            ok: true,
            summary: Value::Null,
            items: Vec::new(),
            timing_ms: None,
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.ok {
            0
        } else {
            1
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Tsv => render_tsv(self),
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Items as a table with a header row; without items, the summary as key/value rows.
fn render_tsv(report: &Report) -> String {
    let mut out = String::new();
    match report.items.first() {
        Some(Value::Object(first)) => {
            let keys: Vec<&String> = first.keys().collect();
            out.push_str(&keys.iter().map(|k| k.as_str()).collect::<Vec<_>>().join("\t"));
            out.push('\n');
            for item in &report.items {
                let row: Vec<String> = keys.iter().map(|k| cell(item.get(k.as_str()).unwrap_or(&Value::Null))).collect();
                out.push_str(&row.join("\t"));
                out.push('\n');
            }
        }
        Some(_) => {
            for item in &report.items {
                out.push_str(&cell(item));
                out.push('\n');
            }
        }
        None => {
            out.push_str("key\tvalue\n");
            out.push_str(&format!("ok\t{}\n", report.ok));
            if let Value::Object(map) = &report.summary {
                for (k, v) in map {
                    out.push_str(&format!("{k}\t{}\n", cell(v)));
                }
            }
        }
    }
    out
}

/// Runs one command; errors are usage or input problems.
pub fn run(cli: &Cli) -> Result<Report> {
    let start = Instant::now();
    let g = &cli.global;
    let mut report = match &cli.command {
        Command::ClassifyIntervals(a) => commands::classify_intervals(g, a)?,
        Command::Certify(a) => commands::certify(g, a)?,
        Command::Convert(a) => commands::convert(g, a)?,
        Command::VerifyCertificate(a) => commands::verify_certificate(a)?,
        Command::CounterexampleA4 => commands::counterexample_a4(g)?,
        Command::CollapseDemo(a) => commands::collapse_demo(g, a)?,
        Command::Qp(a) => commands::qp(g, a)?,
        Command::NofExperiment(a) => commands::nof_experiment(g, a)?,
    };
    if g.timing {
        report.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(report)
}

/// Parses, runs and prints; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if cli.global.jobs > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.global.jobs).build_global();
    }
    match run(&cli) {
        Ok(report) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(report.render(cli.global.format).as_bytes());
            report.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn tsv_uses_item_keys_as_header() {
        let mut r = Report::new("x", Value::Null);
        r.items = vec![json!({"b": 1, "a": "p"}), json!({"b": [1, 2], "a": null})];
        assert_eq!(r.render(Format::Tsv), "a\tb\np\t1\n\t[1,2]\n");
    }

    #[test]
    fn tsv_without_items_lists_the_summary() {
        let mut r = Report::new("x", Value::Null);
        r.ok = false;
        r.summary = json!({"valid": false});
        assert_eq!(r.render(Format::Tsv), "key\tvalue\nok\tfalse\nvalid\tfalse\n");
        assert_eq!(r.exit_code(), 1);
    }

    #[test]
    fn json_is_pretty_and_terminated() {
        let r = Report::new("x", Value::Null);
        let text = r.render(Format::Json);
        assert!(text.ends_with("}\n"));
        assert!(!text.contains("timing_ms"));
    }
}
