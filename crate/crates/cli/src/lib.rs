//! Command-line front end: parse, validate, translate, check and report.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use actdiag_core::check::{CheckOptions, Property, Verdict, VerdictResult, DEFAULT_STATE_LIMIT, STATE_LIMIT_ENV};
use actdiag_core::diagram::Severity;
use actdiag_core::report::{Outcome, Statistics, ToolInfo};
use actdiag_core::{
    build_lts, check_deadlock, check_determinism, emit_dot, emit_report, export_cspm, map_trace,
    parse_diagram, translate, validate, ActivityDiagram, CheckError, CspModel, Lts, Report,
    TranslationConfig,
};
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;
pub const EXIT_DIVERGENT: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Validate,
    Translate,
    CheckDeadlock,
    CheckDeterminism,
    CheckAll,
}

impl Command {
    fn properties(self) -> &'static [Property] {
        match self {
            Command::CheckDeadlock => &[Property::Deadlock],
            Command::CheckDeterminism => &[Property::Determinism],
            Command::CheckAll => &[Property::Deadlock, Property::Determinism],
            Command::Validate | Command::Translate => &[],
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub input: PathBuf,
    pub report: Option<PathBuf>,
    pub dot: Option<PathBuf>,
    pub cspm: Option<PathBuf>,
    pub translation: TranslationConfig,
    pub state_limit: usize,
    pub jobs: usize,
    pub debug_trace: bool,
    /// Record wall time in reports. Off by default so reports are reproducible.
    pub wall_time: bool,
}

impl RunConfig {
    pub fn new(command: Command, input: impl Into<PathBuf>) -> Self {
        RunConfig {
            command,
            input: input.into(),
            report: None,
            dot: None,
            cspm: None,
            translation: TranslationConfig::default(),
            state_limit: DEFAULT_STATE_LIMIT,
            jobs: 1,
            debug_trace: false,
            wall_time: false,
        }
    }

    fn check(&self) -> Result<()> {
        if self.state_limit == 0 {
            bail!("--state-limit must be positive");
        }
        if self.jobs == 0 {
            bail!("--jobs must be positive");
        }
        if self.translation.max_tokens.is_some_and(|n| n <= 0) {
            bail!("--max-tokens must be positive");
        }
        let outs: Vec<&PathBuf> = [&self.report, &self.dot, &self.cspm].into_iter().flatten().collect();
        for (i, a) in outs.iter().enumerate() {
            if *a == &self.input {
                bail!("output path {} is the input file", a.display());
            }
            if outs[i + 1..].contains(a) {
                bail!("output path {} given twice", a.display());
            }
        }
        Ok(())
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("cannot create a temporary file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// `out.json` becomes `out-deadlock.json` when several properties share one path.
fn per_property(path: &Path, p: Property, many: bool) -> PathBuf {
    if !many {
        return path.to_path_buf();
    }
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let tag = match p {
        Property::Deadlock => "deadlock",
        Property::Determinism => "determinism",
    };
    let name = match path.extension() {
        Some(ext) => format!("{stem}-{tag}.{}", ext.to_string_lossy()),
        None => format!("{stem}-{tag}"),
    };
    path.with_file_name(name)
}

fn load(path: &Path) -> Result<ActivityDiagram> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_diagram(&text).with_context(|| format!("{}", path.display()))
}

fn describe(v: &Verdict, full: bool) -> String {
    let mut s = v.to_string();
    if full {
        match &v.result {
            VerdictResult::Fail { full_trace, .. } => {
                let _ = write!(s, "\n  full trace: <{}>", actdiag_core::check::fmt_trace(full_trace));
            }
            VerdictResult::Divergent { full_stem, .. } => {
                let _ = write!(s, "\n  full stem: <{}>", actdiag_core::check::fmt_trace(full_stem));
            }
            _ => {}
        }
    }
    s
}

struct Checked {
    verdicts: Vec<Verdict>,
    lts: Lts,
    millis: f64,
}

fn check_model(m: &CspModel, props: &[Property], opts: &CheckOptions) -> Result<Checked, CheckError> {
    let start = Instant::now();
    let lts = build_lts(m, opts)?;
    let verdicts = props
        .iter()
        .map(|p| match p {
            Property::Deadlock => check_deadlock(&lts),
            Property::Determinism => check_determinism(&lts),
        })
        .collect();
    Ok(Checked {
        verdicts,
        lts,
        millis: start.elapsed().as_secs_f64() * 1e3,
    })
}

fn exit_for(v: &Verdict) -> i32 {
    Outcome::of(&v.result).exit_code()
}

fn run_inner(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    cfg.check()?;
    let d = load(&cfg.input)?;
    let issues = validate(&d);
    if cfg.command == Command::Validate {
        for v in &issues {
            writeln!(out, "{v}")?;
        }
        let errors = issues.iter().filter(|v| v.severity == Severity::Error).count();
        writeln!(
            out,
            "{}: {} nodes, {} edges, {errors} errors, {} warnings",
            cfg.input.display(),
            d.node_count(),
            d.edge_count(),
            issues.len() - errors
        )?;
        return Ok(if errors > 0 { EXIT_USAGE } else { EXIT_OK });
    }
    let m = translate(&d, &cfg.translation)?;
    if let Some(p) = &cfg.cspm {
        write_atomic(p, &export_cspm(&m))?;
    }
    if cfg.command == Command::Translate {
        if cfg.cspm.is_none() {
            out.write_all(export_cspm(&m).as_bytes())?;
        }
        return Ok(EXIT_OK);
    }

    let opts = CheckOptions {
        state_limit: cfg.state_limit,
        jobs: cfg.jobs,
    };
    let props = cfg.command.properties();
    let checked = match check_model(&m, props, &opts) {
        Ok(c) => c,
        Err(CheckError::TokenBoundExceeded { trace }) => {
            writeln!(
                out,
                "token bound exceeded after <{}>",
                actdiag_core::check::fmt_trace(&trace)
            )?;
            return Ok(EXIT_FAIL);
        }
        Err(e) => return Err(e.into()),
    };
    let many = props.len() > 1;
    let mut code = EXIT_OK;
    for v in &checked.verdicts {
        writeln!(out, "{}", describe(v, cfg.debug_trace))?;
        let t = map_trace(v, &m, &d)?;
        if !t.highlighted.is_empty() && !v.is_pass() {
            let ids: Vec<String> = t.marked().iter().map(|e| e.to_string()).collect();
            writeln!(out, "  elements: {}", ids.join(" "))?;
        }
        if let Some(p) = &cfg.dot {
            write_atomic(&per_property(p, v.property, many), &emit_dot(&d, &t))?;
        }
        if let Some(p) = &cfg.report {
            let stats = Statistics {
                states: checked.lts.len(),
                transitions: checked.lts.transition_count(),
                wall_time_ms: cfg.wall_time.then_some(checked.millis),
            };
            let r = Report::new(
                &d.top_level,
                v,
                &t,
                stats,
                ToolInfo::new(&m, cfg.state_limit),
                cfg.debug_trace,
            );
            write_atomic(&per_property(p, v.property, many), &emit_report(&r))?;
        }
        code = code.max(exit_for(v));
    }
    writeln!(
        out,
        "{} states, {} transitions",
        checked.lts.len(),
        checked.lts.transition_count()
    )?;
    Ok(code)
}

/// Runs one command; messages go to `out`, errors to `err`. Returns the exit code.
pub fn run(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match run_inner(cfg, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_USAGE
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusRow {
    pub file: String,
    pub activity: String,
    pub nodes: usize,
    pub edges: usize,
    pub deadlock: String,
    pub determinism: String,
    pub states: usize,
    pub millis: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CorpusSummary {
    pub rows: Vec<CorpusRow>,
}

fn verdict_word(v: &Verdict) -> &'static str {
    match Outcome::of(&v.result) {
        Outcome::Pass => "pass",
        Outcome::Fail => "fail",
        Outcome::ResourceLimit => "limit",
        Outcome::Divergent => "divergent",
    }
}

fn corpus_row(path: &Path, tcfg: &TranslationConfig, opts: &CheckOptions) -> CorpusRow {
    let file = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let mut row = CorpusRow {
        file,
        activity: String::new(),
        nodes: 0,
        edges: 0,
        deadlock: "-".into(),
        determinism: "-".into(),
        states: 0,
        millis: 0.0,
        error: None,
    };
    let res = (|| -> Result<()> {
        let d = load(path)?;
        row.activity = d.top_level.to_string();
        row.nodes = d.node_count();
        row.edges = d.edge_count();
        let m = translate(&d, tcfg)?;
        let c = check_model(&m, &[Property::Deadlock, Property::Determinism], opts)?;
        row.deadlock = verdict_word(&c.verdicts[0]).into();
        row.determinism = verdict_word(&c.verdicts[1]).into();
        row.states = c.lts.len();
        row.millis = c.millis;
        Ok(())
    })();
    if let Err(e) = res {
        row.error = Some(format!("{e:#}"));
    }
    row
}

/// Checks every `.json` diagram directly inside `dir`, in file-name order.
pub fn run_corpus(dir: &Path, tcfg: &TranslationConfig, opts: &CheckOptions) -> Result<CorpusSummary> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("cannot read directory {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(CorpusSummary {
        rows: files.iter().map(|f| corpus_row(f, tcfg, opts)).collect(),
    })
}

impl CorpusSummary {
    fn cells(&self, times: bool) -> Vec<Vec<String>> {
        let mut head = vec!["file", "activity", "nodes", "edges", "deadlock", "determinism", "states"];
        if times {
            head.push("ms");
        }
        let mut out = vec![head.into_iter().map(String::from).collect::<Vec<_>>()];
        for r in &self.rows {
            let mut line = vec![r.file.clone(), r.activity.clone(), r.nodes.to_string(), r.edges.to_string()];
            match &r.error {
                Some(e) => {
                    line.extend(["error".to_string(), "error".to_string(), "-".to_string()]);
                    if times {
                        line.push("-".into());
                    }
                    line.push(e.replace('\n', " "));
                }
                None => {
                    line.extend([r.deadlock.clone(), r.determinism.clone(), r.states.to_string()]);
                    if times {
                        line.push(format!("{:.1}", r.millis));
                    }
                }
            }
            out.push(line);
        }
        out
    }

    /// Column-aligned table.
    pub fn to_text(&self, times: bool) -> String {
        let cells = self.cells(times);
        let cols = cells[0].len();
        let width: Vec<usize> = (0..cols)
            .map(|i| cells.iter().filter_map(|r| r.get(i)).map(|c| c.len()).max().unwrap_or(0))
            .collect();
        let mut s = String::new();
        for row in &cells {
            let mut line = String::new();
            for (i, c) in row.iter().enumerate() {
                if i >= cols {
                    let _ = write!(line, "  {c}");
                } else if i >= 2 && i != 4 && i != 5 {
                    let _ = write!(line, "{}{c:>w$}", if i > 0 { "  " } else { "" }, w = width[i]);
                } else {
                    let _ = write!(line, "{}{c:<w$}", if i > 0 { "  " } else { "" }, w = width[i]);
                }
            }
            s.push_str(line.trim_end());
            s.push('\n');
        }
        s
    }

    pub fn to_csv(&self, times: bool) -> String {
        let mut s = String::new();
        for row in self.cells(times) {
            let fields: Vec<String> = row
                .iter()
                .map(|c| {
                    if c.contains([',', '"', '\n']) {
                        format!("\"{}\"", c.replace('"', "\"\""))
                    } else {
                        c.clone()
                    }
                })
                .collect();
            s.push_str(&fields.join(","));
            s.push('\n');
        }
        s
    }
}

#[derive(Parser, Debug)]
#[command(name = "actdiag", version, about = "Deadlock and determinism checking for UML activity diagrams")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Subcommand, Debug)]
pub enum Sub {
    /// Report structural problems in a diagram.
    Validate { input: PathBuf },
    /// Translate a diagram and print or write its CSP_M script.
    Translate(CommonArgs),
    /// Check for reachable deadlocks.
    CheckDeadlock(CommonArgs),
    /// Check failures-model determinism.
    CheckDeterminism(CommonArgs),
    /// Run both checks; the exit code is the most severe outcome.
    CheckAll(CommonArgs),
    /// Check every diagram in a directory and print a summary table.
    Corpus {
        dir: PathBuf,
        /// Also write the table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Leave out the timing column.
        #[arg(long)]
        no_times: bool,
        #[command(flatten)]
        limits: Limits,
    },
}

#[derive(Args, Debug, Clone)]
pub struct Limits {
    #[arg(long, env = STATE_LIMIT_ENV, default_value_t = DEFAULT_STATE_LIMIT)]
    pub state_limit: usize,
    /// Worker threads for state-space exploration.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Token bound per activity (default: nodes plus edges).
    #[arg(long)]
    pub max_tokens: Option<i64>,
    /// Report exceeding the token bound instead of saturating.
    #[arg(long)]
    pub strict: bool,
    /// Extra channel families to hide, e.g. `ce,behavior`.
    #[arg(long, value_delimiter = ',')]
    pub hide: Vec<String>,
    /// Channel families to keep visible even if hidden by default.
    #[arg(long, value_delimiter = ',')]
    pub visible: Vec<String>,
    /// Largest enumerable value domain.
    #[arg(long)]
    pub int_cap: Option<u64>,
}

impl Limits {
    fn translation(&self) -> TranslationConfig {
        let mut t = TranslationConfig {
            max_tokens: self.max_tokens,
            hide: self.hide.clone(),
            visible: self.visible.clone(),
            strict: self.strict,
            ..TranslationConfig::default()
        };
        if let Some(c) = self.int_cap {
            t.int_cap = c;
        }
        t
    }
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    pub input: PathBuf,
    /// JSON report path (`-deadlock`/`-determinism` suffixes for check-all).
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Graphviz rendering with the counterexample highlighted.
    #[arg(long)]
    pub dot: Option<PathBuf>,
    /// CSP_M export of the translated model.
    #[arg(long)]
    pub cspm: Option<PathBuf>,
    /// Show and record the full trace including hidden steps.
    #[arg(long)]
    pub debug_trace: bool,
    /// Record wall time in reports.
    #[arg(long)]
    pub wall_time: bool,
    #[command(flatten)]
    pub limits: Limits,
}

impl CommonArgs {
    fn config(&self, command: Command) -> RunConfig {
        RunConfig {
            command,
            input: self.input.clone(),
            report: self.report.clone(),
            dot: self.dot.clone(),
            cspm: self.cspm.clone(),
            translation: self.limits.translation(),
            state_limit: self.limits.state_limit,
            jobs: self.limits.jobs,
            debug_trace: self.debug_trace,
            wall_time: self.wall_time,
        }
    }
}

/// Entry point shared by the binary and the tests.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
            } else {
                let _ = out.write_all(text.as_bytes());
            }
            return code;
        }
    };
    let cfg = match cli.command {
        Sub::Validate { input } => RunConfig::new(Command::Validate, input),
        Sub::Translate(a) => a.config(Command::Translate),
        Sub::CheckDeadlock(a) => a.config(Command::CheckDeadlock),
        Sub::CheckDeterminism(a) => a.config(Command::CheckDeterminism),
        Sub::CheckAll(a) => a.config(Command::CheckAll),
        Sub::Corpus {
            dir,
            csv,
            no_times,
            limits,
        } => {
            let opts = CheckOptions {
                state_limit: limits.state_limit,
                jobs: limits.jobs,
            };
            let res = run_corpus(&dir, &limits.translation(), &opts).and_then(|s| {
                out.write_all(s.to_text(!no_times).as_bytes())?;
                if let Some(p) = csv {
                    write_atomic(&p, &s.to_csv(!no_times))?;
                }
                Ok(())
            });
            return match res {
                Ok(()) => EXIT_OK,
                Err(e) => {
                    let _ = writeln!(err, "error: {e:#}");
                    EXIT_USAGE
                }
            };
        }
    };
    run(&cfg, out, err)
}
