//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.
//!
//! Run with `cargo test -p nxp-core --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nxp_core::diff::random_answers;
use nxp_core::machine::{self, compile_linked};
use nxp_core::monads::{check_triple_laws, eval_monadic, SeqTriple, WmTriple};
use nxp_core::semantics::{eval_cps, eval_goal, eval_seq, eval_std, Continuation};
use nxp_core::syntax::GenConfig;
use nxp_core::wm::Answers;
use nxp_core::{parse, pretty, BoolSeq, Expr, Ident, WorkingMemory};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn vocab(n: usize) -> Vec<Ident> {
    ["a", "b", "c", "d", "e", "f"][..n].iter().map(|s| Ident::new(s).unwrap()).collect()
}

fn fresh(answers: &Answers) -> WorkingMemory {
    WorkingMemory::scripted(answers.clone())
}

fn random_seq(rng: &mut ChaCha8Rng) -> BoolSeq {
    let mut s = BoolSeq::new();
    for _ in 0..rng.gen_range(0..8) {
        s.push_front(rng.gen());
    }
    s
}

/// Boolean expressions (no `;`, `post` or `context`): the sequence result is
/// the standard value pushed onto the input.
fn congruence() -> Outcome {
    let vocab = vocab(6);
    let gen = GenConfig::new(8, vocab.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut mismatches = Vec::new();
    let mut checks = 0;
    for _ in 0..1000 {
        let e = gen.sample(&mut rng);
        assert!(e.is_boolean());
        let answers = random_answers(&vocab, &mut rng);
        let v = eval_std(&e, &mut fresh(&answers)).unwrap();
        for _ in 0..10 {
            let s = random_seq(&mut rng);
            let got = eval_seq(&e, s.clone(), &mut fresh(&answers)).unwrap();
            let mut want = s;
            want.push_front(v);
            checks += 1;
            if got != want {
                mismatches.push(format!("{e} from {want}: got {got}"));
            }
        }
    }
    outcome(
        mismatches.is_empty(),
        format!("{checks} checks, {} mismatches{}", mismatches.len(), first(&mismatches)),
    )
}

/// `;`-free pure expressions: the continuation-passing value equals the
/// standard value.
fn cps_agreement() -> Outcome {
    let vocab = vocab(6);
    let gen = GenConfig::new(8, vocab.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut mismatches = Vec::new();
    for _ in 0..1000 {
        let e = gen.sample(&mut rng);
        let answers = random_answers(&vocab, &mut rng);
        let want = eval_std(&e, &mut fresh(&answers)).unwrap();
        let got = eval_cps(&e, &Continuation::exit(), &mut fresh(&answers)).unwrap();
        if got.value != want || !got.via_exit {
            mismatches.push(format!("{e}: cps {} vs std {want}", got.value));
        }
    }
    outcome(mismatches.is_empty(), format!("1000 exprs, {} mismatches{}", mismatches.len(), first(&mismatches)))
}

/// The shared full-language corpus for the machine and monadic checks.
fn full_corpus() -> Vec<(Expr, Answers)> {
    let vocab = vocab(6);
    let gen = GenConfig::new(8, vocab.clone()).effects(true).sequencing(true);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    (0..1000)
        .map(|_| {
            let e = gen.sample(&mut rng);
            let answers = random_answers(&vocab, &mut rng);
            (e, answers)
        })
        .collect()
}

fn vm_congruence(corpus: &[(Expr, Answers)]) -> Outcome {
    let mut mismatches = Vec::new();
    for (e, answers) in corpus {
        let want = eval_seq(e, BoolSeq::new(), &mut fresh(answers));
        let got = machine::run(compile_linked(e), BoolSeq::new(), &mut fresh(answers)).map_err(|r| r.source);
        if got != want {
            mismatches.push(format!("{e}: vm {got:?} vs seq {want:?}"));
        }
    }
    let posts = corpus.iter().filter(|(e, _)| !e.is_effect_free()).count();
    outcome(
        mismatches.is_empty(),
        format!(
            "{} exprs ({posts} with post/context), {} mismatches{}",
            corpus.len(),
            mismatches.len(),
            first(&mismatches)
        ),
    )
}

fn monadic_equivalence(corpus: &[(Expr, Answers)]) -> Outcome {
    let mut mismatches = Vec::new();
    for (e, answers) in corpus {
        let want = eval_seq(e, BoolSeq::new(), &mut fresh(answers)).unwrap();
        let (v, s) = eval_monadic(e, &mut fresh(answers)).unwrap();
        if s != want || Some(v) != want.top() {
            mismatches.push(format!("{e}: monadic ({v}, {s}) vs seq {want}"));
        }
    }
    outcome(
        mismatches.is_empty(),
        format!("{} exprs, {} mismatches{}", corpus.len(), mismatches.len(), first(&mismatches)),
    )
}

/// `b1 post E1 ; b2 post E2`, `b1 post (E2 ; E1) ; b2` and
/// `b1 ; b2 post (E2 ; E1)` yield the same sequence when the payloads evoke
/// nothing themselves.
fn postponement_commutes() -> Outcome {
    let vocab = vocab(6);
    let payloads = GenConfig::new(5, vocab.clone()).sequencing(true);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let atom = |rng: &mut ChaCha8Rng| -> Expr {
        if rng.gen_ratio(1, 4) {
            Expr::Const(rng.gen())
        } else {
            Expr::Var(vocab[rng.gen_range(0..vocab.len())].clone())
        }
    };
    let post = |b: &Expr, e: Expr| Expr::post(b.clone(), e).expect("atom");
    let mut mismatches = Vec::new();
    for _ in 0..200 {
        let (b1, b2) = (atom(&mut rng), atom(&mut rng));
        let (e1, e2) = (payloads.sample(&mut rng), payloads.sample(&mut rng));
        let answers = random_answers(&vocab, &mut rng);
        let forms = [
            Expr::seq(post(&b1, e1.clone()), post(&b2, e2.clone())),
            Expr::seq(post(&b1, Expr::seq(e2.clone(), e1.clone())), b2.clone()),
            Expr::seq(b1.clone(), post(&b2, Expr::seq(e2, e1))),
        ];
        let results: Vec<BoolSeq> = forms
            .iter()
            .map(|f| eval_seq(f, BoolSeq::new(), &mut fresh(&answers)).unwrap())
            .collect();
        if results.windows(2).any(|w| w[0] != w[1]) {
            mismatches.push(format!("{}: {results:?}", forms[0]));
        }
    }
    outcome(mismatches.is_empty(), format!("200 quadruples, {} mismatches{}", mismatches.len(), first(&mismatches)))
}

fn triple_laws() -> Outcome {
    let samples = 300;
    let seq = check_triple_laws(&SeqTriple::lawful(), samples, 6);
    let wm = check_triple_laws(&WmTriple::default(), samples, 6);
    let sabotaged = check_triple_laws(&SeqTriple::sabotaged(), samples, 6);
    let failed: Vec<&str> = sabotaged.laws.iter().filter(|l| !l.pass).map(|l| l.name).collect();
    let pass = seq.all_pass() && wm.all_pass() && !failed.is_empty();
    outcome(
        pass,
        format!(
            "{samples} samples: sequence {}, working memory {}, sabotaged star fails [{}]",
            verdict(seq.all_pass()),
            verdict(wm.all_pass()),
            failed.join(", ")
        ),
    )
}

fn memoization_and_reset() -> Outcome {
    let answers = Answers::new().with("x", true).with("a", false).with("b", true).with("c", true);
    let mut wm = fresh(&answers);
    let x = Ident::new("x").unwrap();
    let e = parse("x and (x or c) ; (x post b) context (x or x)").unwrap();
    let positions = occurrences(&e, &x);
    eval_seq(&e, BoolSeq::new(), &mut wm).unwrap();
    let x_events = wm.events_for(&x);

    wm.register_goal("G", parse("a and b").unwrap()).unwrap();
    eval_goal("G", BoolSeq::new(), &mut wm).unwrap();
    let antecedents: Vec<String> = wm.antecedents("G").unwrap().iter().map(|i| i.to_string()).collect();
    let posted_before = wm.pending_posted().len();
    let events_before = wm.total_events();
    wm.reset_goal("G").unwrap();
    let posted_after_reset = wm.pending_posted().len();
    eval_goal("G", BoolSeq::new(), &mut wm).unwrap();
    let new_events = wm.total_events() - events_before;

    let pass = positions == 5
        && x_events == 1
        && antecedents == ["a", "b"]
        && new_events == 2
        && posted_after_reset == posted_before
        && wm.pending_posted().len() == posted_before;
    outcome(
        pass,
        format!(
            "x at {positions} positions -> {x_events} event; antecedents {{{}}}; \
             re-evaluation after reset -> {new_events} new events; posted {posted_before} -> {}",
            antecedents.join(","),
            wm.pending_posted().len()
        ),
    )
}

fn occurrences(e: &Expr, x: &Ident) -> usize {
    match e {
        Expr::Const(_) => 0,
        Expr::Var(y) => usize::from(y == x),
        Expr::Or(l, r) | Expr::And(l, r) | Expr::Seq(l, r) | Expr::Post(l, r) | Expr::Context(l, r) => {
            occurrences(l, x) + occurrences(r, x)
        }
    }
}

fn parse_round_trip() -> Outcome {
    let gen = GenConfig::new(8, vocab(6)).effects(true).sequencing(true);
    let mut failures = Vec::new();
    for e in gen.stream(8).take(5000) {
        let text = pretty(&e);
        match parse(&text) {
            Ok(back) if back == e => {}
            other => failures.push(format!("{text}: {other:?}")),
        }
    }
    outcome(failures.is_empty(), format!("5000 exprs, {} failures{}", failures.len(), first(&failures)))
}

fn vm_accounting(corpus: &[(Expr, Answers)]) -> Outcome {
    let mut failures = Vec::new();
    let mut runs = 0;
    for (e, answers) in corpus {
        let program = compile_linked(e);
        let len = program.len();
        let Ok(trace) = machine::run_traced(program, BoolSeq::new(), &mut fresh(answers)) else {
            continue;
        };
        runs += 1;
        let json = serde_json::to_value(&trace).unwrap();
        let entries = json["steps"].as_array().map_or(0, Vec::len);
        if trace.steps.len() != len || entries != len {
            failures.push(format!("{e}: length {len}, {} steps, {entries} entries", trace.steps.len()));
        }
    }
    outcome(
        failures.is_empty() && runs == corpus.len(),
        format!("{runs} successful runs, {} accounting failures{}", failures.len(), first(&failures)),
    )
}

fn first(items: &[String]) -> String {
    items.first().map(|s| format!("; first: {s}")).unwrap_or_default()
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    if let Some(limit) = limit {
        if took >= limit {
            o.pass = false;
            o.detail.push_str(&format!("; over the {}s limit", limit.as_secs()));
        }
    }
    (o, took)
}

type Criterion<'a> = (&'static str, Option<Duration>, Box<dyn FnOnce() -> Outcome + 'a>);

fn main() -> ExitCode {
    let corpus = full_corpus();
    let criteria: Vec<Criterion> = vec![
        ("sequence semantics extends standard semantics", Some(Duration::from_secs(10)), Box::new(congruence)),
        ("continuation-passing agrees with standard", None, Box::new(cps_agreement)),
        ("compiled code matches sequence semantics", Some(Duration::from_secs(30)), Box::new(|| vm_congruence(&corpus))),
        ("monadic evaluator matches sequence semantics", None, Box::new(|| monadic_equivalence(&corpus))),
        ("sequencing and postponing commute", None, Box::new(postponement_commutes)),
        ("triple laws", None, Box::new(triple_laws)),
        ("memoization and reset", None, Box::new(memoization_and_reset)),
        ("parser round-trip", None, Box::new(parse_round_trip)),
        ("machine step accounting", None, Box::new(|| vm_accounting(&corpus))),
    ];

    let mut failed = 0;
    for (n, (name, limit, check)) in criteria.into_iter().enumerate() {
        let (o, took) = timed(limit, check);
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} {}. {name}: {} ({:.2}s)",
            if o.pass { "PASS" } else { "FAIL" },
            n + 1,
            o.detail,
            took.as_secs_f64()
        );
    }
    println!("{} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
