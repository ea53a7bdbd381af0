//! The `braidmat` command-line tool.
//!
//! Exit codes: 0 on success, 1 on a domain error (a JSON object with an
//! `error` code is written to stderr), 2 on a usage error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use braidmat::formations::{self, FormationDescriptor};
use braidmat::ladder::{self, search_w_form};
use braidmat::matrix::{self, m02};
use braidmat::par::with_workers;
use braidmat::realizer::{verify_certificate, verify_theorem};
use braidmat::tstructure::{check_t_structure, find_t_structure};
use braidmat::{
    CertKind, Certificate, DiagramWord, Error, Exec, LadderDiagram, MoveTrace, PairCountMatrix, ProjectionWord,
    RealizeError, Realizer, RealizerOptions, StrandCount, UpperMask,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Debug, Parser)]
#[command(name = "braidmat", version, about = "Crossing, OU and CN matrices of braids")]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Number of strands, when the input does not carry it.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Node budget for searches.
    #[arg(long, global = true, env = "BRAIDMAT_BUDGET")]
    pub budget: Option<usize>,
    /// Worker threads (only `theorem6` uses more than one).
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// How to read matrix files; by default `.json` files are JSON and
    /// anything else is a pair list.
    #[arg(long, global = true, value_enum)]
    pub input: Option<InputFormat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Json,
    Pairs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Cn,
    Ou,
    Crossing,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Crossing, OU and CN matrices of a word file.
    Matrix { file: PathBuf },
    /// Check the T0 condition of a matrix file.
    T0 { file: PathBuf },
    /// List or count the T0 masks on --n strands.
    Enumerate {
        #[arg(long)]
        count_only: bool,
    },
    /// Realize a matrix and print its certificate.
    Realize {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "cn")]
        kind: KindArg,
    },
    /// Recheck a certificate file.
    Verify { file: PathBuf },
    /// Realize and verify every T0 (0,2)-matrix on --n strands (default 6).
    Theorem6,
    /// Work with BW-ladder diagram files.
    Ladder {
        #[command(subcommand)]
        action: LadderAction,
    },
    /// Find a T-structure on the support of a matrix.
    Tstructure { file: PathBuf },
    /// Matrix and word of a formation descriptor.
    Formation { descriptor: String },
}

#[derive(Debug, Subcommand)]
pub enum LadderAction {
    /// Permutation and crossing counts of a diagram.
    Eval { file: PathBuf },
    /// Replay a JSON move trace on a diagram.
    Apply {
        file: PathBuf,
        #[arg(long)]
        moves: PathBuf,
    },
    /// Search for an equivalent W-ladder.
    Search { file: PathBuf },
}

/// A failure reported to the caller.
#[derive(Debug)]
pub struct Failure {
    pub code: &'static str,
    pub message: String,
    pub detail: Value,
    pub usage: bool,
}

impl Failure {
    fn new(code: &'static str, message: impl Into<String>) -> Self {
        Failure { code, message: message.into(), detail: Value::Null, usage: false }
    }

    fn usage(message: impl Into<String>) -> Self {
        Failure { usage: true, ..Failure::new("Usage", message) }
    }

    fn with(mut self, detail: Value) -> Self {
        self.detail = detail;
        self
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({ "error": self.code, "message": self.message });
        if !self.detail.is_null() {
            v["detail"] = self.detail.clone();
        }
        v
    }
}

impl<E: Into<Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        let e: Error = e.into();
        let detail = match &e {
            Error::Realize(RealizeError::NotT0(v)) | Error::Realize(RealizeError::SumNotT0(v)) => {
                json!({ "i": v.i, "j": v.j, "k": v.k })
            }
            _ => Value::Null,
        };
        Failure::new(e.code(), e.to_string()).with(detail)
    }
}

type Outcome = Result<String, Failure>;

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match CliConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cfg).and_then(|text| emit(&cfg.common, &text)) {
        Ok(()) => 0,
        Err(f) if f.usage => {
            eprintln!("error: {}", f.message);
            2
        }
        Err(f) => {
            eprintln!("{}", f.to_json());
            1
        }
    }
}

fn emit(common: &Common, text: &str) -> Result<(), Failure> {
    match &common.out {
        Some(path) => fs::write(path, text).map_err(|e| io_failure(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::new("Io", format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| io_failure(path, e))
}

fn parse_json(path: &Path) -> Result<Value, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| Failure::new("Json", format!("{}: {e}", path.display())))
}

fn strands(n: usize) -> Result<StrandCount, Failure> {
    Ok(StrandCount::new(n)?)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

/// Splits an optional `n:` prefix off a text file, falling back to `--n`.
fn split_n(text: &str, flag: Option<usize>) -> Result<(Option<usize>, &str), Failure> {
    let text = text.trim();
    match text.split_once(':') {
        Some((head, rest)) => {
            let n = head.trim().parse().map_err(|_| Failure::new("BadToken", format!("bad strand count {head:?}")))?;
            Ok((Some(n), rest))
        }
        None => Ok((flag, text)),
    }
}

fn read_matrix(common: &Common, path: &Path) -> Result<PairCountMatrix, Failure> {
    let format = common.input.unwrap_or_else(|| match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("json") => InputFormat::Json,
        _ => InputFormat::Pairs,
    });
    match format {
        InputFormat::Json => {
            let v = parse_json(path)?;
            if v.is_array() {
                let rows: Vec<Vec<i64>> =
                    serde_json::from_value(v).map_err(|e| Failure::new("BadShape", format!("matrix rows: {e}")))?;
                Ok(PairCountMatrix::from_rows(&rows)?)
            } else {
                Ok(PairCountMatrix::from_json(&v)?)
            }
        }
        InputFormat::Pairs => {
            let text = read(path)?;
            let (n, pairs) = split_n(&text, common.n)?;
            let n = n.ok_or_else(|| Failure::usage("pair-list input needs an `n:` prefix or --n"))?;
            Ok(UpperMask::parse_pair_list(strands(n)?, pairs)?.to_matrix())
        }
    }
}

fn execute(cfg: &CliConfig) -> Outcome {
    let common = &cfg.common;
    match &cfg.command {
        Command::Matrix { file } => cmd_matrix(common, file),
        Command::T0 { file } => cmd_t0(common, file),
        Command::Enumerate { count_only } => cmd_enumerate(common, *count_only),
        Command::Realize { file, kind } => cmd_realize(common, file, *kind),
        Command::Verify { file } => cmd_verify(file),
        Command::Theorem6 => cmd_theorem(common),
        Command::Ladder { action } => cmd_ladder(common, action),
        Command::Tstructure { file } => cmd_tstructure(common, file),
        Command::Formation { descriptor } => cmd_formation(common, descriptor),
    }
}

fn options(common: &Common) -> RealizerOptions {
    let mut o = RealizerOptions::default();
    if let Some(b) = common.budget {
        o.ladder_budget = b;
        o.dfs_budget = b;
    }
    o
}

fn matrix_csv(out: &mut String, name: &str, m: &PairCountMatrix) {
    let n = m.n().get();
    for i in 1..=n {
        for j in 1..=n {
            if i != j {
                out.push_str(&format!("{name},{i},{j},{}\n", m.get(i, j)));
            }
        }
    }
}

fn cmd_matrix(common: &Common, file: &Path) -> Outcome {
    let text = read(file)?;
    let (n, body) = split_n(&text, common.n)?;
    let signed = body.split_whitespace().any(|t| t.starts_with('+') || t.starts_with('-'));
    let n = match n {
        Some(n) => n,
        None => {
            let top = body
                .split_whitespace()
                .filter_map(|t| t.trim_start_matches(['+', '-']).parse::<usize>().ok())
                .max()
                .unwrap_or(0);
            top + 1
        }
    };
    let n = strands(n)?;
    let mut named: Vec<(&str, PairCountMatrix)> = Vec::new();
    let mut facts = json!({ "n": n.get() });
    if signed {
        let d = DiagramWord::parse(n, body)?;
        named.push(("cn", d.forget().cn_matrix()));
        named.push(("ou", d.ou_matrix()));
        named.push(("crossing", d.crossing_matrix()));
        facts["pure"] = json!(d.is_pure());
        facts["positive"] = json!(d.is_positive());
    } else {
        let w = ProjectionWord::parse(n, body)?;
        named.push(("cn", w.cn_matrix()));
        facts["pure"] = json!(w.is_pure());
    }
    match common.format.unwrap_or(Format::Json) {
        Format::Json => {
            for (name, m) in &named {
                facts[*name] = json!(m.rows());
            }
            Ok(pretty(&facts))
        }
        Format::Csv => {
            let mut out = String::from("matrix,i,j,value\n");
            for (name, m) in &named {
                matrix_csv(&mut out, name, m);
            }
            Ok(out)
        }
    }
}

fn cmd_t0(common: &Common, file: &Path) -> Outcome {
    let m = read_matrix(common, file)?;
    match matrix::t0_violation(&m)? {
        None => Ok(pretty(&json!({ "n": m.n().get(), "t0": true }))),
        Some(v) => Err(RealizeError::NotT0(v).into()),
    }
}

fn cmd_enumerate(common: &Common, count_only: bool) -> Outcome {
    let n = common.n.ok_or_else(|| Failure::usage("enumerate needs --n"))?;
    if count_only {
        return Ok(format!("{}\n", matrix::count_t0(n, Exec::Sequential)?));
    }
    let masks = matrix::enumerate_t0(n)?;
    match common.format.unwrap_or(Format::Json) {
        Format::Json => {
            let list: Vec<String> = masks.iter().map(UpperMask::to_pair_list).collect();
            Ok(pretty(&json!({ "n": n, "count": list.len(), "masks": list })))
        }
        Format::Csv => {
            let mut out = String::from("mask\n");
            for m in &masks {
                out.push_str(&format!("\"{}\"\n", m.to_pair_list()));
            }
            Ok(out)
        }
    }
}

fn cmd_realize(common: &Common, file: &Path, kind: KindArg) -> Outcome {
    let m = read_matrix(common, file)?;
    let engine = Realizer::new(options(common));
    let cert = match kind {
        KindArg::Cn => engine.realize_cn(&m),
        KindArg::Ou => engine.realize_ou(&m),
        KindArg::Crossing => engine.realize_crossing(&m),
    }?;
    Ok(pretty(&cert.to_json()))
}

fn cmd_verify(file: &Path) -> Outcome {
    let cert = Certificate::from_json(&parse_json(file)?)?;
    let kind = match cert.kind {
        CertKind::Cn => "cn",
        CertKind::Ou => "ou",
        CertKind::Crossing => "crossing",
    };
    if verify_certificate(&cert) {
        Ok(pretty(&json!({ "valid": true, "kind": kind, "n": cert.target.n().get() })))
    } else {
        Err(Failure::new("CertificateInvalid", "witness does not reproduce the target matrix")
            .with(json!({ "kind": kind })))
    }
}

fn cmd_theorem(common: &Common) -> Outcome {
    let n = common.n.unwrap_or(6);
    let opts = options(common);
    let report = with_workers(common.workers, |exec| verify_theorem(n, exec, opts))?;
    let summary = json!({
        "n": n,
        "total": report.total,
        "verified": report.verified,
        "total_micros": report.total_micros as u64,
        "max_micros": report.max_micros as u64,
        "layers": report.layer_counts().into_iter().map(|(k, c)| (k, json!(c))).collect::<serde_json::Map<_, _>>(),
    });
    let body = match common.format.unwrap_or(Format::Csv) {
        Format::Csv => report.to_csv(),
        Format::Json => pretty(&serde_json::to_value(&report).expect("report serializes")),
    };
    if !report.succeeded() {
        // Beyond six strands the realizability question is open, so a miss is
        // not a counterexample.
        let code = if n >= 7 { "Unknown" } else { "Unverified" };
        emit(common, &body)?;
        return Err(Failure::new(
            code,
            format!("{} of {} matrices unrealized", report.total - report.verified, report.total),
        )
        .with(summary));
    }
    eprintln!("{summary}");
    Ok(body)
}

fn read_ladder(common: &Common, file: &Path) -> Result<LadderDiagram, Failure> {
    let text = read(file)?;
    let (n, body) = split_n(&text, common.n)?;
    let n = n.ok_or_else(|| Failure::usage("ladder files need an `n:` prefix or --n"))?;
    Ok(LadderDiagram::parse(strands(n)?, body)?)
}

fn ladder_json(d: &LadderDiagram) -> Value {
    let e = d.eval();
    json!({
        "n": d.n().get(),
        "diagram": d.to_string(),
        "permutation": e.perm.image(),
        "counts": e.counts.rows(),
        "w_ladder": d.is_w_ladder(),
    })
}

fn cmd_ladder(common: &Common, action: &LadderAction) -> Outcome {
    match action {
        LadderAction::Eval { file } => Ok(pretty(&ladder_json(&read_ladder(common, file)?))),
        LadderAction::Apply { file, moves } => {
            let d = read_ladder(common, file)?;
            let trace = MoveTrace::from_json(&parse_json(moves)?)?;
            let out = d.replay(&trace)?;
            let mut v = ladder_json(&out);
            v["preserved"] = json!(out.eval() == d.eval());
            Ok(pretty(&v))
        }
        LadderAction::Search { file } => {
            let d = read_ladder(common, file)?;
            let budget = common.budget.unwrap_or(ladder::DEFAULT_BUDGET);
            match search_w_form(&d, budget)? {
                Some(found) => {
                    let mut v = ladder_json(&found.diagram);
                    v["trace"] = found.trace.to_json();
                    v["nodes"] = json!(found.nodes);
                    Ok(pretty(&v))
                }
                None => Err(Failure::new("NoWForm", "no W-ladder is reachable from this diagram")),
            }
        }
    }
}

fn cmd_tstructure(common: &Common, file: &Path) -> Outcome {
    let mask = m02(&read_matrix(common, file)?);
    match find_t_structure(&mask) {
        Some(g) => {
            let report = check_t_structure(&g);
            Ok(pretty(&json!({ "graph": g.to_json(), "report": report })))
        }
        None => Err(Failure::new("NoTStructure", format!("no T-structure on {}", mask.to_pair_list()))),
    }
}

fn cmd_formation(common: &Common, text: &str) -> Outcome {
    let n = common.n.ok_or_else(|| Failure::usage("formation needs --n"))?;
    let f = FormationDescriptor::parse(strands(n)?, text)?;
    let mask = formations::formation_matrix(&f)?;
    let word = formations::realize(&f)?;
    Ok(pretty(&json!({
        "descriptor": f.to_string(),
        "mask": mask.to_pair_list(),
        "admissible": formations::is_admissible(&f),
        "word": word.to_string(),
        "length": word.len(),
    })))
}
