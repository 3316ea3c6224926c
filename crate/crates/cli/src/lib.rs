//! Command-line front end: formatting, evaluation under any backend,
//! compilation, the abstract machine, differential testing and interactive
//! sessions.
//!
//! Results go to stdout (JSON unless `--format text`), diagnostics to stderr.
//! Everything is driven through [`run`] with an explicit [`Io`], so the whole
//! front end can be exercised in-process.

pub mod goals;
pub mod session;

use std::fs;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use nxp_core::diff::{self, Backend, DiffConfig, Fragment, Sabotage};
use nxp_core::machine::{self, Program};
use nxp_core::monads::eval_monadic;
use nxp_core::semantics::{eval_cps, eval_seq, eval_std, BoolSeq, Continuation};
use nxp_core::wm::{Answers, Channel, LinePrompter};
use nxp_core::{parse, pretty, EvalError, Expr, WorkingMemory};

use session::{Session, Startup};

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const MISMATCH: u8 = 1;
    /// Syntax errors and unreadable or malformed input files.
    pub const INPUT: u8 = 2;
    pub const UNVALUED: u8 = 3;
    pub const UNSUPPORTED: u8 = 4;
    pub const UNDERFLOW: u8 = 5;
}

#[derive(Debug, Parser)]
#[command(name = "nxp", version, about = "Goal-language evaluators, compiler and abstract machine")]
pub struct Cli {
    /// Output format; `fmt` and `session` default to text, the rest to json.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the canonical form of an expression.
    Fmt(ExprArg),
    /// Evaluate an expression.
    Eval(EvalArgs),
    /// Show main, posted and linked code for an expression.
    Compile(ExprArg),
    /// Run a program in disassembly format.
    Run(RunArgs),
    /// Compare all backends on random expressions.
    Diff(DiffArgs),
    /// Evaluate a goal file, asking for unknown values, then take commands.
    Session(SessionArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Args)]
pub struct ExprArg {
    /// Expression text, or `-` to read it from stdin.
    pub expr: String,
}

#[derive(Debug, Args)]
pub struct Sources {
    /// Scripted answers: `identifier=true|false` lines, `#` comments.
    #[arg(long)]
    pub answers: Option<PathBuf>,
    /// Ask on the terminal for identifiers the answers file lacks.
    #[arg(long)]
    pub interactive: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Std,
    Cps,
    Seq,
    Monadic,
    Vm,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Backend {
        match b {
            BackendArg::Std => Backend::Std,
            BackendArg::Cps => Backend::Cps,
            BackendArg::Seq => Backend::Seq,
            BackendArg::Monadic => Backend::Monadic,
            BackendArg::Vm => Backend::Vm,
        }
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub expr: ExprArg,
    #[arg(long, value_enum, default_value = "seq")]
    pub backend: BackendArg,
    #[command(flatten)]
    pub sources: Sources,
    /// Include the machine's step trace (vm) or continuation log (cps).
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Program file; blank lines and `#` comments are ignored.
    pub program: PathBuf,
    #[command(flatten)]
    pub sources: Sources,
    /// Report every executed step.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FragmentArg {
    Pure,
    Full,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SabotageArg {
    None,
    OrStep,
    DropPosted,
}

#[derive(Debug, Args)]
pub struct DiffArgs {
    #[arg(long, default_value_t = 1000)]
    pub count: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub max_depth: usize,
    #[arg(long, value_enum, default_value = "both")]
    pub fragment: FragmentArg,
    /// Use these answers for every case instead of random ones.
    #[arg(long)]
    pub answers: Option<PathBuf>,
    /// Inject a fault into the machine backend.
    #[arg(long, value_enum, default_value = "none")]
    pub sabotage: SabotageArg,
    /// Report every case, not only mismatches.
    #[arg(long)]
    pub all: bool,
}

#[derive(Debug, Args)]
pub struct SessionArgs {
    /// Goal file: `name: expression` lines, `#` comments.
    pub goals: PathBuf,
    /// Answers consulted before asking.
    #[arg(long)]
    pub answers: Option<PathBuf>,
}

/// Writer shared between the command and any prompter it creates.
#[derive(Clone)]
pub struct Sink(Arc<Mutex<dyn Write + Send>>);

impl Sink {
    pub fn new<W: Write + Send + 'static>(w: W) -> Self {
        Sink(Arc::new(Mutex::new(w)))
    }
}

impl Write for Sink {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        self.0.lock().map_err(|_| io::Error::other("poisoned writer"))?.write(buf)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.0.lock().map_err(|_| io::Error::other("poisoned writer"))?.flush()
    }
}

/// In-memory output, for tests and embedding.
#[derive(Clone, Default)]
pub struct Capture(Arc<Mutex<Vec<u8>>>);

impl Capture {
    pub fn contents(&self) -> String {
        String::from_utf8_lossy(&self.0.lock().expect("capture lock")).into_owned()
    }
}

impl Write for Capture {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        self.0.lock().map_err(|_| io::Error::other("poisoned capture"))?.extend_from_slice(buf);
        Ok(buf.len())
    }

    fn flush(&mut self) -> io::Result<()> {
        Ok(())
    }
}

pub struct Io {
    pub input: Box<dyn BufRead + Send>,
    pub out: Sink,
    pub err: Sink,
}

impl Io {
    pub fn std() -> Self {
        Io {
            input: Box::new(BufReader::new(io::stdin())),
            out: Sink::new(io::stdout()),
            err: Sink::new(io::stderr()),
        }
    }

    /// Reads `input` as stdin and captures both output streams.
    pub fn capture(input: &str) -> (Self, Capture, Capture) {
        let (out, err) = (Capture::default(), Capture::default());
        let io = Io {
            input: Box::new(io::Cursor::new(input.as_bytes().to_vec())),
            out: Sink::new(out.clone()),
            err: Sink::new(err.clone()),
        };
        (io, out, err)
    }
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: exit::INPUT, message: message.into() }
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        Failure { code: eval_exit_code(&e), message: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::input(e.to_string())
    }
}

pub fn eval_exit_code(e: &EvalError) -> u8 {
    match e {
        EvalError::Unvalued(_) => exit::UNVALUED,
        EvalError::Unsupported(_) => exit::UNSUPPORTED,
        EvalError::Underflow { .. } => exit::UNDERFLOW,
        EvalError::UnknownGoal(_) | EvalError::DuplicateGoal(_) => exit::INPUT,
    }
}

/// Runs one command and returns the process exit code.
pub fn run(cli: Cli, io: Io) -> u8 {
    let mut err = io.err.clone();
    let result = match cli.command {
        Command::Fmt(a) => cmd_fmt(a, cli.format.unwrap_or(Format::Text), io),
        Command::Eval(a) => cmd_eval(a, cli.format.unwrap_or(Format::Json), io),
        Command::Compile(a) => cmd_compile(a, cli.format.unwrap_or(Format::Json), io),
        Command::Run(a) => cmd_run(a, cli.format.unwrap_or(Format::Json), io),
        Command::Diff(a) => cmd_diff(a, cli.format.unwrap_or(Format::Json), io),
        Command::Session(a) => cmd_session(a, io),
    };
    let code = match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    };
    let _ = err.flush();
    code
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn read_answers(path: &Path) -> Result<Answers, Failure> {
    read_file(path)?
        .parse()
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn read_expr(arg: &ExprArg, io: &mut Io) -> Result<Expr, Failure> {
    let text = if arg.expr == "-" {
        let mut s = String::new();
        io.input.read_to_string(&mut s)?;
        s
    } else {
        arg.expr.clone()
    };
    parse(&text).map_err(|e| Failure::input(format!("syntax error at {e}")))
}

/// Constants channel, then scripted answers, then the terminal.
fn memory(sources: &Sources, io: Io) -> Result<WorkingMemory, Failure> {
    let mut wm = WorkingMemory::new();
    if let Some(path) = &sources.answers {
        wm.add_channel(Channel::scripted("answers", read_answers(path)?));
    }
    if sources.interactive {
        // prompts go to stderr so stdout stays machine-readable
        let prompter = LinePrompter::new(io.input, Box::new(io.err));
        wm.add_channel(Channel::interactive("user", Arc::new(Mutex::new(prompter))));
    }
    Ok(wm)
}

fn emit(out: &mut Sink, format: Format, json: &Value, text: &str) -> Result<(), Failure> {
    match format {
        Format::Json => writeln!(out, "{json}")?,
        Format::Text => writeln!(out, "{text}")?,
    }
    out.flush()?;
    Ok(())
}

fn cmd_fmt(a: ExprArg, format: Format, mut io: Io) -> Result<u8, Failure> {
    let e = read_expr(&a, &mut io)?;
    let p = pretty(&e);
    emit(&mut io.out, format, &json!({ "pretty": p }), &p)?;
    Ok(exit::OK)
}

fn cmd_eval(a: EvalArgs, format: Format, mut io: Io) -> Result<u8, Failure> {
    let e = read_expr(&a.expr, &mut io)?;
    let backend = Backend::from(a.backend);
    if backend == Backend::Cps && !e.is_effect_free() {
        // reject before any question is asked
        return Err(EvalError::Unsupported(first_effect(&e).unwrap_or("post")).into());
    }
    let mut out = io.out.clone();
    let mut wm = memory(&a.sources, io)?;

    let mut json = json!({ "backend": backend.name() });
    let mut text = Vec::new();
    let (value, sequence) = match backend {
        Backend::Std => (eval_std(&e, &mut wm)?, None),
        Backend::Cps => {
            let r = eval_cps(&e, &Continuation::exit(), &mut wm)?;
            json["via_exit"] = json!(r.via_exit);
            if a.trace {
                json["log"] = json!(r.log);
                text.extend(r.log.iter().map(|l| format!("  {l}")));
            }
            (r.value, None)
        }
        Backend::Seq => {
            let s = eval_seq(&e, BoolSeq::new(), &mut wm)?;
            (s.top().expect("nonempty"), Some(s))
        }
        Backend::Monadic => {
            let (v, s) = eval_monadic(&e, &mut wm)?;
            (v, Some(s))
        }
        Backend::Vm => {
            let program = machine::compile_linked(&e);
            let trace = machine::run_traced(program, BoolSeq::new(), &mut wm)
                .map_err(|r| Failure { code: eval_exit_code(&r.source), message: r.to_string() })?;
            if a.trace {
                json["steps"] = json!(trace.steps);
                text.extend(
                    trace.steps.iter().map(|s| format!("  {:>3}  {:<12} {}", s.pc, s.instr, s.stack)),
                );
            }
            let s = trace.final_stack;
            (s.top().expect("nonempty"), Some(s))
        }
    };

    json["value"] = json!(value);
    text.push(format!("value = {value}"));
    if let Some(s) = &sequence {
        json["value_seq"] = json!(s);
        json["posted"] = json!(wm.pending_posted().iter().map(pretty).collect::<Vec<_>>());
        text.push(format!("sequence = {s}"));
    }
    json["questions"] = json!(wm.questions());
    emit(&mut out, format, &json, &text.join("\n"))?;
    Ok(exit::OK)
}

/// Leftmost `post` or `context` in `e`.
fn first_effect(e: &Expr) -> Option<&'static str> {
    match e {
        Expr::Const(_) | Expr::Var(_) => None,
        Expr::Post(..) => Some("post"),
        Expr::Context(..) => Some("context"),
        Expr::Or(l, r) | Expr::And(l, r) | Expr::Seq(l, r) => first_effect(l).or_else(|| first_effect(r)),
    }
}

fn cmd_compile(a: ExprArg, format: Format, mut io: Io) -> Result<u8, Failure> {
    let e = read_expr(&a, &mut io)?;
    let (main, posted) = machine::compile(&e, Program::new(), Program::new());
    let linked = machine::link(main.clone(), posted.clone());
    let listing = |p: &Program| p.instrs().iter().map(|i| i.to_string()).collect::<Vec<_>>();
    let json = json!({ "main": listing(&main), "posted": listing(&posted), "linked": listing(&linked) });
    // the text form is itself a valid program file for `run`
    let mut text = String::new();
    for (title, p) in [("main", &main), ("posted", &posted)] {
        text.push_str(&format!("# {title}\n"));
        for i in listing(p) {
            text.push_str(&format!("#   {i}\n"));
        }
    }
    text.push_str("# linked\n");
    text.push_str(&machine::disassemble(&linked));
    emit(&mut io.out, format, &json, text.trim_end())?;
    Ok(exit::OK)
}

fn cmd_run(a: RunArgs, format: Format, io: Io) -> Result<u8, Failure> {
    let source = read_file(&a.program)?;
    let program = machine::assemble(&source)
        .map_err(|e| Failure::input(format!("{}: {e}", a.program.display())))?;
    let mut out = io.out.clone();
    let mut wm = memory(&a.sources, io)?;
    let trace = machine::run_traced(program, BoolSeq::new(), &mut wm)
        .map_err(|r| Failure { code: eval_exit_code(&r.source), message: r.to_string() })?;

    let mut json = json!({ "final": trace.final_stack });
    let mut text = Vec::new();
    if a.trace {
        json["steps"] = json!(trace.steps);
        text.extend(trace.steps.iter().map(|s| format!("  {:>3}  {:<12} {}", s.pc, s.instr, s.stack)));
    }
    text.push(format!("final = {}", trace.final_stack));
    emit(&mut out, format, &json, &text.join("\n"))?;
    Ok(exit::OK)
}

fn cmd_diff(a: DiffArgs, format: Format, mut io: Io) -> Result<u8, Failure> {
    let answers = a.answers.as_deref().map(read_answers).transpose()?;
    let fragments = match a.fragment {
        FragmentArg::Pure => vec![Fragment::Pure],
        FragmentArg::Full => vec![Fragment::Full],
        FragmentArg::Both => vec![Fragment::Pure, Fragment::Full],
    };
    let sabotage = match a.sabotage {
        SabotageArg::None => Sabotage::None,
        SabotageArg::OrStep => Sabotage::OrStep,
        SabotageArg::DropPosted => Sabotage::DropPosted,
    };

    let mut total_mismatches = 0;
    for fragment in fragments {
        let mut cfg = DiffConfig::new(fragment);
        cfg.count = a.count;
        cfg.seed = a.seed;
        cfg.max_depth = a.max_depth;
        cfg.answers = answers.clone();
        cfg.sabotage = sabotage;

        let mut mismatches = 0;
        for report in diff::run_diff(&cfg) {
            if !report.agrees() {
                mismatches += 1;
            }
            if a.all || !report.agrees() {
                let text = match &report.divergence {
                    Some(d) => format!("mismatch: {}\n  {d}", report.expr),
                    None => format!("agree: {}", report.expr),
                };
                let json = serde_json::to_value(&report).expect("report serializes");
                emit(&mut io.out, format, &json, &text)?;
            }
        }
        total_mismatches += mismatches;
        let name = serde_json::to_value(fragment).expect("fragment serializes");
        let json = json!({ "summary": {
            "fragment": name,
            "cases": a.count,
            "mismatches": mismatches,
            "seed": a.seed,
            "max_depth": a.max_depth,
            "sabotage": sabotage,
        }});
        let text = format!(
            "{}: {} cases, {mismatches} mismatches (seed {}, depth {})",
            name.as_str().unwrap_or("?"),
            a.count,
            a.seed,
            a.max_depth
        );
        emit(&mut io.out, format, &json, &text)?;
    }
    Ok(if total_mismatches == 0 { exit::OK } else { exit::MISMATCH })
}

fn cmd_session(a: SessionArgs, io: Io) -> Result<u8, Failure> {
    let text = read_file(&a.goals)?;
    let goals = goals::parse_goals(&text)
        .map_err(|e| Failure::input(format!("{}:{e}", a.goals.display())))?;
    let answers = a.answers.as_deref().map(read_answers).transpose()?;

    let mut err = io.err.clone();
    let prompter = LinePrompter::new(io.input, Box::new(io.out.clone()));
    let mut session = Session::new(goals, answers, prompter, io.out)?;
    match session.start()? {
        Startup::Ready => {}
        Startup::Failed(e) => return Err(e.into()),
    }
    session.repl(&mut err)?;
    Ok(exit::OK)
}
