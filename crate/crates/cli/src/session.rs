//! Interactive question-and-answer session over a goal file.
//!
//! Goals are evaluated in file order under sequence semantics, each one
//! threading the sequence left by the previous. Unknown identifiers are asked
//! through the prompter, which also supplies the command lines that follow.

use std::io::{self, Write};
use std::sync::{Arc, Mutex};

use nxp_core::semantics::{eval_goal, BoolSeq};
use nxp_core::wm::{Answers, Channel, LinePrompter, SharedPrompter};
use nxp_core::{EvalError, Expr, WorkingMemory};

use crate::Sink;

const HELP: &str = "\
commands:
  <goal> | :eval <goal>   evaluate a goal from the empty sequence
  :reset <goal>           forget the values the goal last read
  :show env               known identifier values
  :show goals             registered goals
  :show posted            goals evoked so far
  :help                   this text
  :quit                   leave the session";

pub struct Session {
    wm: WorkingMemory,
    order: Vec<String>,
    prompter: Arc<Mutex<LinePrompter>>,
    out: Sink,
}

/// Outcome of the initial pass over the goals.
pub enum Startup {
    Ready,
    Failed(EvalError),
}

impl Session {
    pub fn new(
        goals: Vec<(String, Expr)>,
        answers: Option<Answers>,
        prompter: LinePrompter,
        out: Sink,
    ) -> Result<Self, EvalError> {
        let prompter = Arc::new(Mutex::new(prompter));
        let mut wm = WorkingMemory::new();
        if let Some(a) = answers {
            wm.add_channel(Channel::scripted("answers", a));
        }
        let shared: SharedPrompter = prompter.clone();
        wm.add_channel(Channel::interactive("user", shared));

        let mut order = Vec::new();
        for (name, expr) in goals {
            wm.register_goal(&name, expr)?;
            order.push(name);
        }
        Ok(Session { wm, order, prompter, out })
    }

    pub fn memory(&self) -> &WorkingMemory {
        &self.wm
    }

    /// Evaluates every goal in file order, then prints the final sequence.
    pub fn start(&mut self) -> io::Result<Startup> {
        let mut s = BoolSeq::new();
        for name in self.order.clone() {
            match eval_goal(&name, s.clone(), &mut self.wm) {
                Ok(next) => {
                    s = next;
                    writeln!(self.out, "{name} = {}", front(&s))?;
                }
                Err(e) => return Ok(Startup::Failed(e)),
            }
        }
        writeln!(self.out, "sequence = {s}")?;
        Ok(Startup::Ready)
    }

    /// Reads commands until `:quit` or end of input.
    pub fn repl(&mut self, err: &mut Sink) -> io::Result<()> {
        loop {
            write!(self.out, "> ")?;
            self.out.flush()?;
            let Some(line) = self.read_line() else {
                writeln!(self.out)?;
                return Ok(());
            };
            let line = line.trim();
            let mut words = line.split_whitespace();
            match (words.next(), words.next(), words.next()) {
                (None, ..) => {}
                (Some(":quit" | ":q"), None, _) => return Ok(()),
                (Some(":help"), None, _) => writeln!(self.out, "{HELP}")?,
                (Some(":show"), Some("env"), None) => self.show_env()?,
                (Some(":show"), Some("goals"), None) => {
                    for name in &self.order {
                        let expr = self.wm.goal(name).expect("registered");
                        writeln!(self.out, "{name}: {expr}")?;
                    }
                }
                (Some(":show"), Some("posted"), None) => {
                    for g in self.wm.pending_posted() {
                        writeln!(self.out, "{g}")?;
                    }
                }
                (Some(":reset"), Some(goal), None) => match self.wm.reset_goal(goal) {
                    Ok(()) => {
                        let ids: Vec<String> = self
                            .wm
                            .antecedents(goal)
                            .expect("goal exists")
                            .iter()
                            .map(|x| x.to_string())
                            .collect();
                        writeln!(self.out, "reset {goal}: {}", ids.join(", "))?;
                    }
                    Err(e) => writeln!(err, "error: {e}")?,
                },
                (Some(":eval"), Some(goal), None) => self.eval(goal, err)?,
                (Some(goal), None, _) if !goal.starts_with(':') => self.eval(goal, err)?,
                _ => writeln!(err, "error: unknown command `{line}` (try :help)")?,
            }
        }
    }

    fn read_line(&self) -> Option<String> {
        self.prompter.lock().ok()?.read_line()
    }

    fn eval(&mut self, goal: &str, err: &mut Sink) -> io::Result<()> {
        match eval_goal(goal, BoolSeq::new(), &mut self.wm) {
            Ok(s) => {
                writeln!(self.out, "{goal} = {}", front(&s))?;
                writeln!(self.out, "sequence = {s}")
            }
            Err(e) => writeln!(err, "error: {e}"),
        }
    }

    fn show_env(&mut self) -> io::Result<()> {
        let entries: Vec<String> = self.wm.env().map(|(x, v)| format!("{x} = {v}")).collect();
        if entries.is_empty() {
            writeln!(self.out, "(empty)")
        } else {
            writeln!(self.out, "{}", entries.join("\n"))
        }
    }
}

fn front(s: &BoolSeq) -> bool {
    s.top().expect("a goal pushes at least one value")
}
