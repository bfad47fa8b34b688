//! Command-line front end: argument and config-file handling, rendering, exit codes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::presets;
use crate::session::{OutputFormat, Session, SessionConfig};
use crate::verify::{finite_length_block, holds_str, verify, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_COMPUTATION: i32 = 3;
pub const EXIT_FIT_UNSTABLE: i32 = 4;
pub const EXIT_GOLDEN_MISMATCH: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "bigrade", version, about = "Bigraded Hilbert functions, mixed coefficients and Koszul invariants of pairs of m-primary ideals in k[[x,y]]")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the table λ(R/I^r J^s).
    Table(CommonArgs),
    /// Fit the bigraded and Hilbert coefficients and check their identities.
    Coeffs(CommonArgs),
    /// Classify the (r,s) piece of the top local cohomology as finite or infinite.
    H2 {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 0)]
        r: u32,
        #[arg(long, default_value_t = 0)]
        s: u32,
    },
    /// Run every verification block.
    Verify(CommonArgs),
    /// Run a bundled example and compare it with its stored report.
    Example {
        /// One of: maximal, bhatt_l2, bhatt_l3, depth_zero.
        name: String,
        #[arg(long, value_enum)]
        format: Option<OutputFormat>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// Generators of I, comma separated, e.g. "x^2, x*y, y^2".
    #[arg(long = "I")]
    pub first: Option<String>,
    /// Generators of J.
    #[arg(long = "J")]
    pub second: Option<String>,
    #[arg(long)]
    pub rmax: Option<u32>,
    #[arg(long)]
    pub smax: Option<u32>,
    #[arg(long)]
    pub kmax: Option<u32>,
    #[arg(long)]
    pub kmin: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub prime: Option<u32>,
    /// Truncation order; computed from the inputs when omitted.
    #[arg(long)]
    pub order: Option<u32>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// TOML file with the same settings; its values win over flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl clap::ValueEnum for OutputFormat {
    fn value_variants<'a>() -> &'a [Self] {
        &[OutputFormat::Json, OutputFormat::Csv, OutputFormat::Text]
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
            OutputFormat::Text => "text",
        }))
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(rename = "I")]
    first: Option<String>,
    #[serde(rename = "J")]
    second: Option<String>,
    prime: Option<u32>,
    order: Option<u32>,
    r_max: Option<u32>,
    s_max: Option<u32>,
    k_max: Option<u32>,
    k_min: Option<u32>,
    seed: Option<u64>,
    format: Option<OutputFormat>,
    output: Option<PathBuf>,
}

fn merge<T: PartialEq + std::fmt::Debug>(name: &str, flag: Option<T>, file: Option<T>) -> Option<T> {
    match (flag, file) {
        (Some(a), Some(b)) => {
            if a != b {
                eprintln!("warning: {name} given as {a:?} on the command line and {b:?} in the config file; using the config file");
            }
            Some(b)
        }
        (a, b) => b.or(a),
    }
}

impl CommonArgs {
    pub fn resolve(&self) -> Result<SessionConfig> {
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                toml::from_str::<FileConfig>(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };
        let d = SessionConfig::default();
        Ok(SessionConfig {
            first: merge("I", self.first.clone(), file.first).unwrap_or_default(),
            second: merge("J", self.second.clone(), file.second).unwrap_or_default(),
            prime: merge("prime", self.prime, file.prime).unwrap_or(d.prime),
            order: merge("order", self.order, file.order),
            r_max: merge("r_max", self.rmax, file.r_max).unwrap_or(d.r_max),
            s_max: merge("s_max", self.smax, file.s_max).unwrap_or(d.s_max),
            k_max: merge("k_max", self.kmax, file.k_max).unwrap_or(d.k_max),
            k_min: merge("k_min", self.kmin, file.k_min).unwrap_or(d.k_min),
            seed: merge("seed", self.seed, file.seed),
            format: merge("format", self.format, file.format).unwrap_or(d.format),
            output: merge("output", self.output.clone(), file.output),
        })
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. }
        | Error::Config(_)
        | Error::InvalidModulus(_)
        | Error::NotMPrimary { .. }
        | Error::ZeroDivisorInput
        | Error::NotRegularSequence => EXIT_INPUT,
        Error::FitUnstable(_) => EXIT_FIT_UNSTABLE,
        _ => EXIT_COMPUTATION,
    }
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn no_csv(cfg: &SessionConfig, what: &str) -> Result<()> {
    if cfg.format == OutputFormat::Csv {
        return Err(Error::Config(format!("csv output is only available for the table, not for {what}")));
    }
    Ok(())
}

fn envelope(session: &Session, kind: &str, body: serde_json::Value) -> serde_json::Value {
    let mut obj = serde_json::Map::new();
    obj.insert("report_version".into(), 1.into());
    obj.insert("kind".into(), kind.into());
    obj.insert("provenance".into(), serde_json::to_value(session.provenance()).unwrap());
    obj.insert(
        "window".into(),
        serde_json::json!({"r_max": session.config.r_max, "s_max": session.config.s_max}),
    );
    if let serde_json::Value::Object(m) = body {
        obj.extend(m);
    }
    serde_json::Value::Object(obj)
}

fn table_output(cfg: &SessionConfig) -> Result<String> {
    Session::run(cfg, |s| {
        let t = s.table()?;
        Ok(match cfg.format {
            OutputFormat::Json => pretty(&t.to_json()),
            OutputFormat::Csv => t.to_csv(),
            OutputFormat::Text => t.to_text(),
        })
    })
}

fn coeffs_output(cfg: &SessionConfig) -> Result<String> {
    no_csv(cfg, "coefficients")?;
    Session::run(cfg, |s| {
        let c = s.coefficients()?;
        Ok(match cfg.format {
            OutputFormat::Text => {
                let b = &c.bhattacharya;
                let mut out = String::new();
                writeln!(
                    out,
                    "(e20, e11, e02, e10, e01, e00) = ({}, {}, {}, {}, {}, {})",
                    b.e20, b.e11, b.e02, b.e10, b.e01, b.e00
                )
                .unwrap();
                for (name, h) in [("I", &c.hilbert_i), ("J", &c.hilbert_j), ("IJ", &c.hilbert_ij)] {
                    writeln!(out, "{name:<2}: e0 = {}, e1 = {}, e2 = {}", h.e0, h.e1, h.e2).unwrap();
                }
                writeln!(out, "e01 - e1(J) = {}, e10 - e1(I) = {}", b.e01 - c.hilbert_j.e1, b.e10 - c.hilbert_i.e1).unwrap();
                for (name, ok) in &c.checks {
                    writeln!(out, "  [{}] {name}", if *ok { "ok" } else { "FAIL" }).unwrap();
                }
                out
            }
            _ => pretty(&envelope(s, "coefficients", c.to_json())),
        })
    })
}

fn h2_output(cfg: &SessionConfig, r: u32, s: u32) -> Result<String> {
    no_csv(cfg, "h2")?;
    if r > cfg.r_max || s > cfg.s_max {
        return Err(Error::Config(format!("({r},{s}) lies outside the {}x{} window", cfg.r_max, cfg.s_max)));
    }
    Session::run(cfg, |session| {
        let (class, block) = finite_length_block(session, r, s)?;
        let cert = &session.joint_reduction()?.1;
        Ok(match cfg.format {
            OutputFormat::Text => {
                let mut out = format!("verdict at ({r},{s}): {:?}\n", class.verdict);
                writeln!(out, "joint reduction ({}, {}) [{}]", cert.a, cert.b, cert.origin).unwrap();
                for (k, v) in &class.lengths {
                    writeln!(out, "  λ(L({r},{s};{k})) = {v}").unwrap();
                }
                for c in &block.conditions {
                    writeln!(out, "  ({}) {}: {}", c.label, holds_str(c.holds), c.statement).unwrap();
                }
                writeln!(out, "agreement: {}", holds_str(block.agreement)).unwrap();
                out
            }
            _ => pretty(&envelope(
                session,
                "h2",
                serde_json::json!({
                    "seed": session.seed(),
                    "certificate": cert,
                    "classification": class,
                    "criterion": block,
                }),
            )),
        })
    })
}

/// Output text and whether every asserted block agreed.
fn verify_output(cfg: &SessionConfig) -> Result<(String, bool)> {
    no_csv(cfg, "verify")?;
    Session::run(cfg, |s| {
        let report = verify(s, &VerifyOptions::default())?;
        let text = match cfg.format {
            OutputFormat::Text => report.to_text(),
            _ => pretty(&report.to_json()),
        };
        Ok((text, report.passed()))
    })
}

pub fn golden(name: &str) -> Option<&'static str> {
    match name {
        "maximal" => Some(include_str!("../golden/maximal.json")),
        "bhatt_l2" => Some(include_str!("../golden/bhatt_l2.json")),
        "bhatt_l3" => Some(include_str!("../golden/bhatt_l3.json")),
        "depth_zero" => Some(include_str!("../golden/depth_zero.json")),
        _ => None,
    }
}

/// The first JSON path at which two documents differ.
pub fn first_difference(a: &serde_json::Value, b: &serde_json::Value, path: &str) -> Option<String> {
    use serde_json::Value;
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => {
            for (k, v) in x {
                let p = format!("{path}.{k}");
                match y.get(k) {
                    Some(w) => {
                        if let Some(d) = first_difference(v, w, &p) {
                            return Some(d);
                        }
                    }
                    None => return Some(p),
                }
            }
            y.keys().find(|k| !x.contains_key(*k)).map(|k| format!("{path}.{k}"))
        }
        (Value::Array(x), Value::Array(y)) => {
            for (n, (v, w)) in x.iter().zip(y).enumerate() {
                if let Some(d) = first_difference(v, w, &format!("{path}[{n}]")) {
                    return Some(d);
                }
            }
            (x.len() != y.len()).then(|| format!("{path} (length {} vs {})", x.len(), y.len()))
        }
        _ => (a != b).then(|| path.to_string()),
    }
}

fn run_example(name: &str, format: Option<OutputFormat>, output: Option<PathBuf>) -> i32 {
    let Some(preset) = presets::by_name(name) else {
        let names: Vec<String> = presets::named().into_iter().map(|p| p.name).collect();
        eprintln!("error: unknown example {name:?}; available: {}", names.join(", "));
        return EXIT_INPUT;
    };
    let cfg = preset.config();
    let report = match Session::run(&cfg, |s| verify(s, &VerifyOptions::default())) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let text = match format.unwrap_or_default() {
        OutputFormat::Text => report.to_text(),
        OutputFormat::Json => pretty(&report.to_json()),
        OutputFormat::Csv => {
            eprintln!("error: csv output is only available for the table");
            return EXIT_INPUT;
        }
    };
    if let Err(e) = emit(&text, output.as_deref()) {
        eprintln!("error: {e}");
        return exit_code(&e);
    }
    let stored: serde_json::Value = serde_json::from_str(golden(name).expect("every named preset has a golden file"))
        .expect("golden files are valid json");
    match first_difference(&stored, &report.to_json(), "$") {
        None => {
            eprintln!("{name}: matches the stored report");
            if report.passed() {
                EXIT_OK
            } else {
                EXIT_COMPUTATION
            }
        }
        Some(path) => {
            eprintln!("{name}: differs from the stored report at {path}");
            EXIT_GOLDEN_MISMATCH
        }
    }
}

/// Produces the output text and whether the run passed.
type Job<'a> = Box<dyn Fn(&SessionConfig) -> Result<(String, bool)> + 'a>;

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let (args, job): (&CommonArgs, Job) = match &cli.command {
        Command::Table(a) => (a, Box::new(|c| Ok((table_output(c)?, true)))),
        Command::Coeffs(a) => (a, Box::new(|c| Ok((coeffs_output(c)?, true)))),
        Command::H2 { common, r, s } => {
            let (r, s) = (*r, *s);
            (common, Box::new(move |c| Ok((h2_output(c, r, s)?, true))))
        }
        Command::Verify(a) => (a, Box::new(verify_output)),
        Command::Example { name, format, output } => return run_example(name, *format, output.clone()),
    };
    let result = args.resolve().and_then(|cfg| {
        cfg.validate()?;
        if cfg.seed.is_none() && matches!(cli.command, Command::H2 { .. } | Command::Verify(_)) {
            eprintln!("no seed given; using {} derived from the inputs", cfg.effective_seed());
        }
        let (text, passed) = job(&cfg)?;
        emit(&text, cfg.output.as_deref())?;
        Ok(passed)
    });
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => {
            eprintln!("error: some verification blocks disagree; see the failures field of the report");
            EXIT_COMPUTATION
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
