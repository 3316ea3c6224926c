//! Working-memory executive.
//!
//! Identifier values live in a partial environment. A read that misses the
//! environment is routed through the channels in order; the first channel that
//! answers supplies the value, which is then memoized. Every answered request
//! is appended to that channel's trace. Reads made while a registered goal is
//! being evaluated are recorded as the goal's antecedents, which is what
//! [`WorkingMemory::reset_goal`] clears.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::error::EvalError;
use crate::syntax::{Expr, Ident};

/// Pseudo-identifier the compiler emits for the literal `true`.
pub const TRUE_IDENT: &str = "__true";
/// Pseudo-identifier the compiler emits for the literal `false`.
pub const FALSE_IDENT: &str = "__false";

pub fn constant_ident(b: bool) -> Ident {
    Ident::new_unchecked_namespace(if b { TRUE_IDENT } else { FALSE_IDENT })
        .expect("constant identifiers are well formed")
}

/// One answered request on a channel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Event {
    pub id: Ident,
    pub value: bool,
}

/// Per-channel ordered event lists. Concatenation is channel-wise.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ChannelTrace(Vec<Vec<Event>>);

impl ChannelTrace {
    /// The unit of concatenation: `n` empty channel histories.
    pub fn empty(channels: usize) -> Self {
        ChannelTrace(vec![Vec::new(); channels])
    }

    pub fn channels(&self) -> usize {
        self.0.len()
    }

    pub fn channel(&self, i: usize) -> &[Event] {
        &self.0[i]
    }

    pub fn record(&mut self, channel: usize, event: Event) {
        if self.0.len() <= channel {
            self.0.resize(channel + 1, Vec::new());
        }
        self.0[channel].push(event);
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(Vec::is_empty)
    }

    pub fn total(&self) -> usize {
        self.0.iter().map(Vec::len).sum()
    }

    /// Channel-wise concatenation `self ; other`.
    pub fn concat(&self, other: &ChannelTrace) -> ChannelTrace {
        let n = self.0.len().max(other.0.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut events = self.0.get(i).cloned().unwrap_or_default();
            events.extend(other.0.get(i).into_iter().flatten().cloned());
            out.push(events);
        }
        ChannelTrace(out)
    }

    /// Events appended after `earlier`, which must be a prefix of `self`.
    pub fn since(&self, earlier: &ChannelTrace) -> ChannelTrace {
        ChannelTrace(
            self.0
                .iter()
                .enumerate()
                .map(|(i, events)| {
                    let skip = earlier.0.get(i).map_or(0, Vec::len);
                    events[skip..].to_vec()
                })
                .collect(),
        )
    }
}

/// Scripted identifier values, as read from an answers file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Answers(BTreeMap<Ident, bool>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("answers line {line}: {message}")]
pub struct AnswersError {
    pub line: usize,
    pub message: String,
}

impl Answers {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, id: Ident, value: bool) {
        self.0.insert(id, value);
    }

    pub fn with(mut self, name: &str, value: bool) -> Self {
        self.insert(Ident::new(name).expect("valid identifier"), value);
        self
    }

    pub fn get(&self, id: &Ident) -> Option<bool> {
        self.0.get(id).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Ident, bool)> {
        self.0.iter().map(|(k, v)| (k, *v))
    }
}

impl FromStr for Answers {
    type Err = AnswersError;

    /// `identifier=true|false` per line; `#` starts a comment.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut answers = Answers::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| AnswersError { line: n + 1, message };
            let (name, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `identifier=true|false`, found `{line}`")))?;
            let id = Ident::new(name.trim()).map_err(|e| err(e.to_string()))?;
            let value = match value.trim() {
                "true" => true,
                "false" => false,
                other => return Err(err(format!("expected `true` or `false`, found `{other}`"))),
            };
            answers.insert(id, value);
        }
        Ok(answers)
    }
}

/// Source of answers for the interactive channel.
pub trait Prompter: Send {
    /// `None` when no answer can be obtained (for instance at end of input).
    fn ask(&mut self, id: &Ident) -> Option<bool>;
}

/// Terminal-style prompter: writes `? <id> [y/n]: ` and reads a line.
pub struct LinePrompter {
    input: Box<dyn BufRead + Send>,
    output: Box<dyn Write + Send>,
}

impl LinePrompter {
    pub fn new(input: Box<dyn BufRead + Send>, output: Box<dyn Write + Send>) -> Self {
        LinePrompter { input, output }
    }

    /// Reads one line from the shared input, without the trailing newline.
    pub fn read_line(&mut self) -> Option<String> {
        let mut line = String::new();
        match self.input.read_line(&mut line) {
            Ok(0) | Err(_) => None,
            Ok(_) => Some(line.trim_end_matches(['\n', '\r']).to_string()),
        }
    }

    pub fn output(&mut self) -> &mut (dyn Write + Send) {
        &mut *self.output
    }
}

pub fn parse_yes_no(answer: &str) -> Option<bool> {
    match answer.trim().to_ascii_lowercase().as_str() {
        "y" | "yes" | "true" => Some(true),
        "n" | "no" | "false" => Some(false),
        _ => None,
    }
}

impl Prompter for LinePrompter {
    fn ask(&mut self, id: &Ident) -> Option<bool> {
        loop {
            write!(self.output, "? {id} [y/n]: ").ok()?;
            self.output.flush().ok()?;
            let line = self.read_line()?;
            if let Some(b) = parse_yes_no(&line) {
                return Some(b);
            }
        }
    }
}

pub type SharedPrompter = Arc<Mutex<dyn Prompter>>;

#[derive(Clone)]
pub enum ChannelKind {
    /// Answers only the compiler's literal pseudo-identifiers.
    Constants,
    /// Answers identifiers present in its map, declines the rest.
    Scripted(Answers),
    /// Asks a person; never declines unless the prompter gives up.
    Interactive(SharedPrompter),
    /// Declines everything.
    Refusing,
}

impl fmt::Debug for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelKind::Constants => f.write_str("Constants"),
            ChannelKind::Scripted(a) => write!(f, "Scripted({} answers)", a.len()),
            ChannelKind::Interactive(_) => f.write_str("Interactive"),
            ChannelKind::Refusing => f.write_str("Refusing"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Channel {
    pub name: String,
    pub kind: ChannelKind,
}

impl Channel {
    pub fn scripted(name: &str, answers: Answers) -> Self {
        Channel { name: name.to_string(), kind: ChannelKind::Scripted(answers) }
    }

    pub fn interactive(name: &str, prompter: SharedPrompter) -> Self {
        Channel { name: name.to_string(), kind: ChannelKind::Interactive(prompter) }
    }

    pub fn refusing(name: &str) -> Self {
        Channel { name: name.to_string(), kind: ChannelKind::Refusing }
    }

    fn request(&self, id: &Ident) -> Option<bool> {
        match &self.kind {
            ChannelKind::Constants => match id.as_str() {
                TRUE_IDENT => Some(true),
                FALSE_IDENT => Some(false),
                _ => None,
            },
            ChannelKind::Scripted(answers) => answers.get(id),
            ChannelKind::Interactive(p) => p.lock().ok()?.ask(id),
            ChannelKind::Refusing => None,
        }
    }

    pub fn is_constants(&self) -> bool {
        matches!(self.kind, ChannelKind::Constants)
    }
}

#[derive(Debug, Clone)]
struct Goal {
    expr: Expr,
    antecedents: BTreeSet<Ident>,
}

#[derive(Serialize)]
struct TraceDump<'a> {
    channels: Vec<ChannelDump<'a>>,
}

#[derive(Serialize)]
struct ChannelDump<'a> {
    name: &'a str,
    events: &'a [Event],
}

/// Session state shared by all evaluators.
#[derive(Debug, Clone)]
pub struct WorkingMemory {
    env: BTreeMap<Ident, bool>,
    channels: Vec<Channel>,
    traces: ChannelTrace,
    /// (channel index, identifier) of every answered request, in order.
    requests: Vec<(usize, Ident)>,
    goals: BTreeMap<String, Goal>,
    active_goal: Option<String>,
    pending_posted: Vec<Expr>,
}

impl Default for WorkingMemory {
    fn default() -> Self {
        Self::new()
    }
}

impl WorkingMemory {
    /// Memory with only the built-in constants channel.
    pub fn new() -> Self {
        WorkingMemory {
            env: BTreeMap::new(),
            channels: vec![Channel { name: "constants".into(), kind: ChannelKind::Constants }],
            traces: ChannelTrace::empty(1),
            requests: Vec::new(),
            goals: BTreeMap::new(),
            active_goal: None,
            pending_posted: Vec::new(),
        }
    }

    /// Constants channel followed by one scripted channel.
    pub fn scripted(answers: Answers) -> Self {
        Self::new().with_channel(Channel::scripted("scripted", answers))
    }

    pub fn with_channel(mut self, channel: Channel) -> Self {
        self.add_channel(channel);
        self
    }

    pub fn add_channel(&mut self, channel: Channel) {
        self.channels.push(channel);
        self.traces = self.traces.concat(&ChannelTrace::empty(self.channels.len()));
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn traces(&self) -> &ChannelTrace {
        &self.traces
    }

    /// Reads `x`, acquiring it through the channels on a memo miss.
    pub fn get(&mut self, x: &Ident) -> Result<bool, EvalError> {
        if let Some(goal) = self.active_goal.as_ref().and_then(|g| self.goals.get_mut(g)) {
            if !x.is_internal() {
                goal.antecedents.insert(x.clone());
            }
        }
        if let Some(&v) = self.env.get(x) {
            return Ok(v);
        }
        for (i, channel) in self.channels.iter().enumerate() {
            if let Some(value) = channel.request(x) {
                self.env.insert(x.clone(), value);
                self.traces.record(i, Event { id: x.clone(), value });
                self.requests.push((i, x.clone()));
                return Ok(value);
            }
        }
        Err(EvalError::Unvalued(x.clone()))
    }

    /// Current value of `x` without triggering acquisition.
    pub fn lookup(&self, x: &Ident) -> Option<bool> {
        self.env.get(x).copied()
    }

    /// Assigns `x` directly, bypassing the channels.
    pub fn assign(&mut self, x: Ident, value: bool) {
        self.env.insert(x, value);
    }

    /// Makes `x` unknown again.
    pub fn reset(&mut self, x: &Ident) {
        self.env.remove(x);
    }

    pub fn env(&self) -> impl Iterator<Item = (&Ident, bool)> {
        self.env.iter().filter(|(k, _)| !k.is_internal()).map(|(k, v)| (k, *v))
    }

    pub fn register_goal(&mut self, name: &str, expr: Expr) -> Result<(), EvalError> {
        if self.goals.contains_key(name) {
            return Err(EvalError::DuplicateGoal(name.to_string()));
        }
        self.goals.insert(
            name.to_string(),
            Goal { expr, antecedents: BTreeSet::new() },
        );
        Ok(())
    }

    pub fn goal(&self, name: &str) -> Result<&Expr, EvalError> {
        self.goals
            .get(name)
            .map(|g| &g.expr)
            .ok_or_else(|| EvalError::UnknownGoal(name.to_string()))
    }

    pub fn goal_names(&self) -> impl Iterator<Item = &str> {
        self.goals.keys().map(String::as_str)
    }

    /// Identifiers read during the goal's most recent evaluation.
    pub fn antecedents(&self, name: &str) -> Result<&BTreeSet<Ident>, EvalError> {
        self.goals
            .get(name)
            .map(|g| &g.antecedents)
            .ok_or_else(|| EvalError::UnknownGoal(name.to_string()))
    }

    /// Runs `eval` as an evaluation of the goal `name`, replacing its recorded
    /// antecedents with the identifiers read along the way.
    pub fn evaluate_goal<T>(
        &mut self,
        name: &str,
        eval: impl FnOnce(&Expr, &mut WorkingMemory) -> Result<T, EvalError>,
    ) -> Result<T, EvalError> {
        let goal = self
            .goals
            .get_mut(name)
            .ok_or_else(|| EvalError::UnknownGoal(name.to_string()))?;
        goal.antecedents.clear();
        let expr = goal.expr.clone();
        let outer = self.active_goal.replace(name.to_string());
        let result = eval(&expr, self);
        self.active_goal = outer;
        result
    }

    /// Forgets the value of every antecedent of `name`.
    pub fn reset_goal(&mut self, name: &str) -> Result<(), EvalError> {
        let ids: Vec<Ident> = self.antecedents(name)?.iter().cloned().collect();
        for x in &ids {
            self.reset(x);
        }
        Ok(())
    }

    pub fn post(&mut self, goal: Expr) {
        self.pending_posted.push(goal);
    }

    pub fn pending_posted(&self) -> &[Expr] {
        &self.pending_posted
    }

    pub fn take_posted(&mut self) -> Vec<Expr> {
        std::mem::take(&mut self.pending_posted)
    }

    /// Identifiers answered by non-constant channels, in request order.
    pub fn questions(&self) -> Vec<Ident> {
        self.requests
            .iter()
            .filter(|(i, _)| !self.channels[*i].is_constants())
            .map(|(_, id)| id.clone())
            .collect()
    }

    /// Number of recorded events for `x` across all channels.
    pub fn events_for(&self, x: &Ident) -> usize {
        self.requests.iter().filter(|(_, id)| id == x).count()
    }

    pub fn total_events(&self) -> usize {
        self.requests.len()
    }

    /// `{"channels":[{"name":...,"events":[{"id":...,"value":...}]}]}`
    pub fn trace_json(&self) -> serde_json::Value {
        let dump = TraceDump {
            channels: self
                .channels
                .iter()
                .enumerate()
                .map(|(i, c)| ChannelDump { name: &c.name, events: self.traces.channel(i) })
                .collect(),
        };
        serde_json::to_value(dump).expect("trace serializes")
    }

    /// Environment plus traces; the observable state used when comparing
    /// working-memory computations.
    pub fn fingerprint(&self) -> (Vec<(Ident, bool)>, ChannelTrace) {
        (
            self.env.iter().map(|(k, v)| (k.clone(), *v)).collect(),
            self.traces.clone(),
        )
    }
}
