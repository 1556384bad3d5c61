//! The `kfl` command-line front end.
//!
//! Every command writes one JSON document (or JSON lines for `enumerate`) to
//! stdout. `--pretty` switches to an indented key/value listing. Errors go to
//! stderr as `{"error": kind, "message": text}`.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::error::Error;
use crate::formula::{self, build_bh, glivenko_translate, mn_axiom, pretrans_axiom, Formula};
use crate::frame::Frame;
use crate::io::{frame_to_json, frame_to_value, model_to_json, model_to_value, parse_frame_json, parse_model_json,
    parse_partition_json, FormatError};
use crate::model::{model_check, satisfying_points, Model};
use crate::oracle::{check_validity, enumerate_frames, valuation_model, Caps, ClassSpec, Validity};
use crate::partition::{is_proper, is_refinement};
use crate::refine::{filtration_pipeline, proper_refinement, FrameClass};
use crate::verify::{run_suite, Suite};

pub const ENUM_CAPS_VAR: &str = "KFL_MAX_ENUM";

#[derive(Parser, Debug)]
#[command(name = "kfl", version, about = "Filtrations of pretransitive Kripke frames")]
pub struct Cli {
    /// Human-readable output instead of JSON.
    #[arg(long, global = true)]
    pub pretty: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Structural summary of a frame.
    Classify {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, requires = "m")]
        n: Option<usize>,
    },
    /// Truth of a formula in a model.
    Check {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        point: Option<usize>,
    },
    /// Frame validity by exhaustive valuation search.
    Valid {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        formula: String,
    },
    /// Shrinks a model satisfying a formula to a finite one in the same class.
    Filtrate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        formula: String,
        /// `mn:M,N` or `g:M`.
        #[arg(long, value_parser = parse_class)]
        class: FrameClass,
        /// Also write the output model file here.
        #[arg(long)]
        out_model: Option<PathBuf>,
    },
    /// Coarsest proper refinement of a partition.
    ProperRefine {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        partition: PathBuf,
    },
    /// Prints a generated formula.
    #[command(subcommand)]
    Gen(GenCommand),
    /// All labelled frames of a size in a class, as JSON lines.
    Enumerate {
        #[arg(long)]
        size: usize,
        /// `any`, `mn:M,N` or `g:M`.
        #[arg(long, default_value = "any", value_parser = parse_class_spec)]
        class: ClassSpec,
        #[arg(long)]
        height: Option<usize>,
    },
    /// Runs a randomized invariant suite.
    Verify {
        #[arg(long)]
        suite: Suite,
        #[arg(long, default_value_t = 100)]
        cases: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum GenCommand {
    /// Height schema.
    Bh {
        #[arg(long)]
        h: usize,
        #[arg(long)]
        m: usize,
    },
    /// `◇^n p1 → ◇^m p1`.
    MnAxiom {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
    },
    /// `◇^{m+1} p1 → ◇^{≤m} p1`.
    PretransAxiom {
        #[arg(long)]
        m: usize,
    },
    /// `◇^{≤m}□^{≤m}` applied to a formula.
    Glivenko {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        formula: String,
    },
}

fn parse_pair(s: &str) -> Option<(usize, usize)> {
    let (a, b) = s.split_once(',')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

pub fn parse_class(s: &str) -> Result<FrameClass, String> {
    let bad = || format!("expected mn:M,N or g:M, got {s:?}");
    if let Some(rest) = s.strip_prefix("mn:") {
        let (m, n) = parse_pair(rest).ok_or_else(bad)?;
        Ok(FrameClass::Mn { m, n })
    } else if let Some(rest) = s.strip_prefix("g:") {
        Ok(FrameClass::Pretrans {
            m: rest.trim().parse().map_err(|_| bad())?,
        })
    } else {
        Err(bad())
    }
}

fn parse_class_spec(s: &str) -> Result<ClassSpec, String> {
    if s == "any" {
        Ok(ClassSpec::any())
    } else {
        parse_class(s).map(ClassSpec::of)
    }
}

/// Reads `N` or `N,B`: the enumeration point cap and the valuation-bit cap.
pub fn caps_from_env(value: Option<&str>) -> Result<Caps, String> {
    let mut caps = Caps::default();
    let Some(v) = value else { return Ok(caps) };
    let bad = || format!("{ENUM_CAPS_VAR} must be N or N,B, got {v:?}");
    match v.split_once(',') {
        Some(_) => {
            let (n, b) = parse_pair(v).ok_or_else(bad)?;
            caps.max_points = n;
            caps.max_valuation_bits = b;
        }
        None => caps.max_points = v.trim().parse().map_err(|_| bad())?,
    }
    Ok(caps)
}

#[derive(Debug)]
struct Failure {
    code: i32,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            kind: "usage",
            message: message.into(),
        }
    }

    fn parse(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            kind: "parse",
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let kind = match e {
            Error::Unsatisfiable => "unsatisfiable",
            Error::CapExceeded { .. } => "cap_exceeded",
            Error::Internal(_) => "internal",
            Error::PointOutOfRange { .. } | Error::SizeMismatch(..) => "usage",
            _ => "semantic",
        };
        let code = if kind == "usage" { 2 } else { 1 };
        Failure {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn with_path(path: &Path, e: FormatError) -> Failure {
    Failure::parse(format!("{}: {e}", path.display()))
}

fn load_frame(path: &Path) -> Result<Frame, Failure> {
    parse_frame_json(&read_file(path)?).map_err(|e| with_path(path, e))
}

fn load_model(path: &Path) -> Result<Model, Failure> {
    parse_model_json(&read_file(path)?).map_err(|e| with_path(path, e))
}

fn load_formula(text: &str) -> Result<Formula, Failure> {
    formula::parse(text).map_err(|e| Failure::parse(format!("formula: {e}")))
}

fn var_name(v: u32) -> String {
    format!("p{v}")
}

/// Output of one command: a JSON document plus an exit code.
struct Outcome {
    value: Value,
    code: i32,
}

fn ok(value: Value) -> Result<Outcome, Failure> {
    Ok(Outcome { value, code: 0 })
}

/// Runs the CLI on `args` (including the program name). Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let f = Failure::usage(e.to_string().trim_end());
            return report_failure(&f, err);
        }
    };
    let caps = match caps_from_env(std::env::var(ENUM_CAPS_VAR).ok().as_deref()) {
        Ok(c) => c,
        Err(m) => return report_failure(&Failure::usage(m), err),
    };
    if let Command::Enumerate { size, class, height } = &cli.command {
        return run_enumerate(*size, *class, *height, caps, cli.pretty, out, err);
    }
    match execute(&cli.command, caps) {
        Ok(o) => {
            let text = if cli.pretty {
                let mut s = String::new();
                render_pretty(&o.value, 0, &mut s);
                s
            } else if let Value::String(s) = &o.value {
                format!("{s}\n")
            } else {
                format!("{}\n", o.value)
            };
            if out.write_all(text.as_bytes()).is_err() {
                return 1;
            }
            o.code
        }
        Err(f) => report_failure(&f, err),
    }
}

fn report_failure(f: &Failure, err: &mut dyn Write) -> i32 {
    let _ = writeln!(err, "{}", json!({"error": f.kind, "message": f.message}));
    f.code
}

fn execute(cmd: &Command, caps: Caps) -> Result<Outcome, Failure> {
    match cmd {
        Command::Classify { frame, m, n } => classify(&load_frame(frame)?, *m, *n),
        Command::Check { model, formula, point } => check(&load_model(model)?, &load_formula(formula)?, *point),
        Command::Valid { frame, formula } => valid(&load_frame(frame)?, &load_formula(formula)?, caps),
        Command::Filtrate {
            model,
            formula,
            class,
            out_model,
        } => filtrate(&load_model(model)?, &load_formula(formula)?, *class, out_model.as_deref()),
        Command::ProperRefine { frame, partition } => {
            let frame = load_frame(frame)?;
            let a = parse_partition_json(&read_file(partition)?).map_err(|e| with_path(partition, e))?;
            if a.n() != frame.n() {
                return Err(Error::SizeMismatch(a.n(), frame.n()).into());
            }
            let b = proper_refinement(&frame, &a)?;
            ok(json!({
                "blocks": b.blocks(),
                "block_count": b.len(),
                "input_blocks": a.len(),
                "proper": is_proper(&frame, &b)?,
                "input_proper": is_proper(&frame, &a)?,
                "refines_input": is_refinement(&b, &a)?,
            }))
        }
        Command::Gen(g) => generate(g).map(|f| Outcome {
            value: Value::String(f.to_string()),
            code: 0,
        }),
        Command::Verify { suite, cases, seed } => {
            let report = run_suite(*suite, *cases, *seed);
            let code = if report.passed { 0 } else { 1 };
            Ok(Outcome {
                value: serde_json::to_value(&report).expect("report serializes"),
                code,
            })
        }
        Command::Enumerate { .. } => unreachable!("streamed separately"),
    }
}

fn classify(frame: &Frame, m: Option<usize>, n: Option<usize>) -> Result<Outcome, Failure> {
    let d = frame.cluster_decomposition();
    let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
    for c in 0..d.cluster_count() {
        *histogram.entry(d.cluster(c).len()).or_default() += 1;
    }
    let mut v = json!({
        "n": frame.n(),
        "edges": frame.edge_count(),
        "pretransitivity_index": frame.pretransitivity_index(),
        "height": d.height,
        "clusters": d.cluster_count(),
        "cluster_sizes": histogram
            .iter()
            .map(|(size, count)| (size.to_string(), json!(count)))
            .collect::<serde_json::Map<_, _>>(),
    });
    if let Some(m) = m {
        v["m_transitive"] = json!({"m": m, "holds": frame.is_m_transitive(m)});
        if let Some(n) = n {
            v["mn_frame"] = json!({"m": m, "n": n, "holds": frame.is_mn_frame(m, n)});
        }
    }
    ok(v)
}

fn check(model: &Model, f: &Formula, point: Option<usize>) -> Result<Outcome, Failure> {
    match point {
        Some(x) => ok(json!({"formula": f.to_string(), "point": x, "holds": model_check(model, x, f)?})),
        None => {
            let sat = satisfying_points(model, f);
            ok(json!({
                "formula": f.to_string(),
                "points": sat.to_vec(),
                "holds_everywhere": sat.is_full(),
                "satisfiable": !sat.is_empty(),
            }))
        }
    }
}

fn valid(frame: &Frame, f: &Formula, caps: Caps) -> Result<Outcome, Failure> {
    match check_validity(frame, f, caps)? {
        Validity::Valid => ok(json!({"formula": f.to_string(), "valid": true})),
        Validity::Refuted { valuation, point } => {
            let m = valuation_model(frame, f, valuation);
            let val: BTreeMap<String, Vec<usize>> =
                m.valuation().iter().map(|(&v, s)| (var_name(v), s.to_vec())).collect();
            ok(json!({
                "formula": f.to_string(),
                "valid": false,
                "counterexample": {"valuation": val, "point": point},
            }))
        }
    }
}

fn filtrate(model: &Model, f: &Formula, class: FrameClass, out_model: Option<&Path>) -> Result<Outcome, Failure> {
    let out = filtration_pipeline(model, f, class)?;
    // Independent re-check of the result before anything is written.
    let frame_ok = class.contains(out.model.frame());
    let sat_ok = model_check(&out.model, out.report.witness_image, f)?;
    if !frame_ok || !sat_ok || out.model.n() > model.n() {
        return Err(Error::Internal("output model failed re-validation".into()).into());
    }
    if let Some(path) = out_model {
        fs::write(path, model_to_json(&out.model) + "\n")
            .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    }
    ok(json!({
        "model": model_to_value(&out.model),
        "projection": out.projection,
        "report": serde_json::to_value(&out.report).expect("report serializes"),
    }))
}

fn generate(g: &GenCommand) -> Result<Formula, Failure> {
    Ok(match *g {
        GenCommand::Bh { h, m } => build_bh(h, m).map_err(|_| Failure::usage("height must be at least 1"))?,
        GenCommand::MnAxiom { m, n } => mn_axiom(m, n),
        GenCommand::PretransAxiom { m } => pretrans_axiom(m),
        GenCommand::Glivenko { m, ref formula } => glivenko_translate(load_formula(formula)?, m),
    })
}

fn run_enumerate(
    size: usize,
    class: ClassSpec,
    height: Option<usize>,
    caps: Caps,
    pretty: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let spec = match height {
        Some(h) => class.with_height(h),
        None => class,
    };
    let frames = match enumerate_frames(size, spec, caps) {
        Ok(it) => it,
        Err(e) => return report_failure(&e.into(), err),
    };
    for frame in frames {
        let line = if pretty {
            serde_json::to_string_pretty(&frame_to_value(&frame)).expect("frame serializes")
        } else {
            frame_to_json(&frame)
        };
        if writeln!(out, "{line}").is_err() {
            return 1;
        }
    }
    0
}

fn render_pretty(v: &Value, indent: usize, s: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                match x {
                    Value::Object(inner) if !inner.is_empty() => {
                        s.push_str(&format!("{pad}{k}:\n"));
                        render_pretty(x, indent + 1, s);
                    }
                    _ => s.push_str(&format!("{pad}{k}: {}\n", scalar(x))),
                }
            }
        }
        _ => s.push_str(&format!("{pad}{}\n", scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
