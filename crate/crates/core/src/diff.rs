//! Differential testing of the evaluators against each other.
//!
//! Each case runs every applicable backend on its own fresh working memory
//! scripted with the same answers. Expressions with `post` or `context` skip
//! the continuation-passing backend. A case agrees when
//!
//! * either every backend fails or none does,
//! * the standard and continuation-passing values coincide,
//! * the sequence, monadic and machine backends produce the same sequence,
//! * the standard value is the front of that sequence, wherever
//!   [`front_is_value`] says it should be.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::machine::{self, Instr, Program};
use crate::monads::eval_monadic;
use crate::semantics::{eval_cps, eval_seq, eval_std, front_is_value, BoolSeq, Continuation};
use crate::syntax::{Expr, GenConfig, Ident};
use crate::wm::{Answers, WorkingMemory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Std,
    Cps,
    Seq,
    Monadic,
    Vm,
}

impl Backend {
    pub const ALL: [Backend; 5] = [Backend::Std, Backend::Cps, Backend::Seq, Backend::Monadic, Backend::Vm];

    pub fn name(self) -> &'static str {
        match self {
            Backend::Std => "std",
            Backend::Cps => "cps",
            Backend::Seq => "seq",
            Backend::Monadic => "monadic",
            Backend::Vm => "vm",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Deliberate faults for checking that the harness notices disagreement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sabotage {
    #[default]
    None,
    /// The machine backend runs `AND` wherever the compiler emitted `OR`.
    OrStep,
    /// The machine backend runs only the main program, without posted code.
    DropPosted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BackendResult {
    pub backend: Backend,
    pub value: Option<bool>,
    pub sequence: Option<BoolSeq>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Agree,
    Mismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiffReport {
    pub expr: String,
    pub results: Vec<BackendResult>,
    pub verdict: Verdict,
    /// First failed comparison, when the verdict is a mismatch.
    pub divergence: Option<String>,
}

impl DiffReport {
    pub fn agrees(&self) -> bool {
        self.verdict == Verdict::Agree
    }

    pub fn result(&self, backend: Backend) -> Option<&BackendResult> {
        self.results.iter().find(|r| r.backend == backend)
    }
}

fn run_backend(backend: Backend, e: &Expr, answers: &Answers, sabotage: Sabotage) -> BackendResult {
    let mut wm = WorkingMemory::scripted(answers.clone());
    let outcome: Result<(Option<bool>, Option<BoolSeq>), String> = match backend {
        Backend::Std => eval_std(e, &mut wm).map(|v| (Some(v), None)).map_err(|e| e.to_string()),
        Backend::Cps => eval_cps(e, &Continuation::exit(), &mut wm)
            .map(|out| (Some(out.value), None))
            .map_err(|e| e.to_string()),
        Backend::Seq => eval_seq(e, BoolSeq::new(), &mut wm)
            .map(|s| (s.top(), Some(s)))
            .map_err(|e| e.to_string()),
        Backend::Monadic => eval_monadic(e, &mut wm)
            .map(|(v, s)| (Some(v), Some(s)))
            .map_err(|e| e.to_string()),
        Backend::Vm => {
            let (main, posted) = machine::compile(e, Program::new(), Program::new());
            let program = match sabotage {
                Sabotage::None => machine::link(main, posted),
                Sabotage::DropPosted => main,
                Sabotage::OrStep => machine::link(main, posted)
                    .instrs()
                    .iter()
                    .map(|i| if *i == Instr::Or { Instr::And } else { i.clone() })
                    .collect(),
            };
            machine::run(program, BoolSeq::new(), &mut wm)
                .map(|s| (s.top(), Some(s)))
                .map_err(|e| e.source.to_string())
        }
    };
    match outcome {
        Ok((value, sequence)) => BackendResult { backend, value, sequence, error: None },
        Err(error) => BackendResult { backend, value: None, sequence: None, error: Some(error) },
    }
}

/// Runs all applicable backends on `e` and compares them.
pub fn diff_case(e: &Expr, answers: &Answers, sabotage: Sabotage) -> DiffReport {
    let backends: Vec<Backend> = if e.is_effect_free() {
        Backend::ALL.to_vec()
    } else {
        Backend::ALL.into_iter().filter(|b| *b != Backend::Cps).collect()
    };
    let results: Vec<BackendResult> =
        backends.iter().map(|&b| run_backend(b, e, answers, sabotage)).collect();

    let divergence = first_divergence(&results, front_is_value(e));
    DiffReport {
        expr: e.to_string(),
        verdict: if divergence.is_none() { Verdict::Agree } else { Verdict::Mismatch },
        divergence,
        results,
    }
}

fn first_divergence(results: &[BackendResult], front_is_value: bool) -> Option<String> {
    let reference = &results[0];
    for r in &results[1..] {
        if r.error.is_some() != reference.error.is_some() {
            return Some(format!(
                "{} error {:?} vs {} error {:?}",
                reference.backend, reference.error, r.backend, r.error
            ));
        }
    }
    if reference.error.is_some() {
        return None;
    }

    let value_level: Vec<_> = results.iter().filter(|r| r.sequence.is_none()).collect();
    let seq_level: Vec<_> = results.iter().filter(|r| r.sequence.is_some()).collect();
    for pair in value_level.windows(2) {
        if pair[0].value != pair[1].value {
            return Some(format!(
                "{} value {:?} vs {} value {:?}",
                pair[0].backend, pair[0].value, pair[1].backend, pair[1].value
            ));
        }
    }
    if let Some((first, rest)) = seq_level.split_first() {
        for r in rest {
            if r.sequence != first.sequence || r.value != first.value {
                return Some(format!(
                    "{} sequence {} vs {} sequence {}",
                    first.backend,
                    first.sequence.as_ref().unwrap(),
                    r.backend,
                    r.sequence.as_ref().unwrap()
                ));
            }
        }
        if front_is_value {
            if let Some(v) = value_level.first() {
                if v.value != first.value {
                    return Some(format!(
                        "{} value {:?} vs {} front {:?}",
                        v.backend, v.value, first.backend, first.value
                    ));
                }
            }
        }
    }
    None
}

/// Which expressions a differential run draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Fragment {
    /// Constants, identifiers, `and`, `or`, `;`.
    Pure,
    /// The whole language.
    Full,
}

#[derive(Debug, Clone)]
pub struct DiffConfig {
    pub count: usize,
    pub seed: u64,
    pub max_depth: usize,
    pub vocab: Vec<Ident>,
    pub fragment: Fragment,
    /// Fixed answers for every case; random per case when `None`.
    pub answers: Option<Answers>,
    pub sabotage: Sabotage,
}

pub fn default_vocab() -> Vec<Ident> {
    ["a", "b", "c", "d", "e", "f"].iter().map(|n| Ident::new(n).unwrap()).collect()
}

impl DiffConfig {
    pub fn new(fragment: Fragment) -> Self {
        DiffConfig {
            count: 1000,
            seed: 7,
            max_depth: 8,
            vocab: default_vocab(),
            fragment,
            answers: None,
            sabotage: Sabotage::None,
        }
    }
}

/// Random answers for every identifier in `vocab`.
pub fn random_answers<R: Rng + ?Sized>(vocab: &[Ident], rng: &mut R) -> Answers {
    let mut a = Answers::new();
    for x in vocab {
        a.insert(x.clone(), rng.gen());
    }
    a
}

/// Deterministic stream of `(expression, answers)` cases.
pub fn cases(config: &DiffConfig) -> impl Iterator<Item = (Expr, Answers)> + '_ {
    let gen = GenConfig::new(config.max_depth, config.vocab.clone())
        .sequencing(true)
        .effects(config.fragment == Fragment::Full);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    (0..config.count).map(move |_| {
        let e = gen.sample(&mut rng);
        let answers = match &config.answers {
            Some(a) => a.clone(),
            None => random_answers(&config.vocab, &mut rng),
        };
        (e, answers)
    })
}

pub fn run_diff(config: &DiffConfig) -> Vec<DiffReport> {
    cases(config)
        .map(|(e, answers)| diff_case(&e, &answers, config.sabotage))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn answers() -> Answers {
        Answers::new().with("x", true).with("y", false).with("z", true)
    }

    #[test]
    fn pure_case_uses_all_backends() {
        let r = diff_case(&parse("x and (y ; z)").unwrap(), &answers(), Sabotage::None);
        assert!(r.agrees(), "{r:?}");
        assert_eq!(r.results.len(), 5);
        assert_eq!(r.result(Backend::Cps).unwrap().value, Some(true));
        // `;` under `and` leaves the front out of step with the value
        assert_eq!(r.result(Backend::Vm).unwrap().value, Some(false));
    }

    #[test]
    fn aligned_value_mismatch_is_noticed() {
        let results = vec![
            BackendResult { backend: Backend::Std, value: Some(true), sequence: None, error: None },
            BackendResult {
                backend: Backend::Seq,
                value: Some(false),
                sequence: Some(BoolSeq::from([0])),
                error: None,
            },
        ];
        assert!(first_divergence(&results, true).unwrap().contains("front"));
        assert_eq!(first_divergence(&results, false), None);
    }

    #[test]
    fn effectful_case_skips_cps() {
        let r = diff_case(&parse("x post y ; z").unwrap(), &answers(), Sabotage::None);
        assert!(r.agrees(), "{r:?}");
        assert!(r.result(Backend::Cps).is_none());
        assert_eq!(r.result(Backend::Vm).unwrap().sequence, Some(BoolSeq::from([1, 1, 0])));
    }

    #[test]
    fn sabotage_is_noticed() {
        let r = diff_case(&parse("x or y").unwrap(), &Answers::new().with("x", true).with("y", false), Sabotage::OrStep);
        assert_eq!(r.verdict, Verdict::Mismatch);
        assert!(r.divergence.unwrap().contains("vm"));

        let r = diff_case(&parse("x post y").unwrap(), &answers(), Sabotage::DropPosted);
        assert_eq!(r.verdict, Verdict::Mismatch);
    }

    #[test]
    fn errors_must_agree_too() {
        let r = diff_case(&parse("x or q").unwrap(), &answers(), Sabotage::None);
        assert!(r.agrees());
        assert!(r.results.iter().all(|b| b.error.is_some()));
    }

    #[test]
    fn report_serializes() {
        let r = diff_case(&parse("x post y").unwrap(), &answers(), Sabotage::None);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["verdict"], "agree");
        assert_eq!(json["results"][0]["backend"], "std");
        assert!(json["divergence"].is_null());
    }

    #[test]
    fn small_runs_agree() {
        for fragment in [Fragment::Pure, Fragment::Full] {
            let mut cfg = DiffConfig::new(fragment);
            cfg.count = 100;
            assert!(run_diff(&cfg).iter().all(DiffReport::agrees));
        }
    }
}
