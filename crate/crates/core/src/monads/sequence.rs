use std::fmt;
use std::rc::Rc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Kleisli, Sample, Triple};
use crate::error::EvalError;
use crate::semantics::BoolSeq;
use crate::syntax::{Expr, Ident};
use crate::wm::WorkingMemory;

type SeqFn<A> = dyn Fn(BoolSeq, &mut WorkingMemory) -> Result<(A, BoolSeq), EvalError>;

/// Computation in the sequence triple: takes a sequence, yields a value and a
/// new sequence. Identifier reads go through the working memory.
pub struct SeqComp<A>(Rc<SeqFn<A>>);

impl<A> Clone for SeqComp<A> {
    fn clone(&self) -> Self {
        SeqComp(Rc::clone(&self.0))
    }
}

impl<A> fmt::Debug for SeqComp<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SeqComp(..)")
    }
}

impl<A: 'static> SeqComp<A> {
    pub fn new(
        f: impl Fn(BoolSeq, &mut WorkingMemory) -> Result<(A, BoolSeq), EvalError> + 'static,
    ) -> Self {
        SeqComp(Rc::new(f))
    }

    pub fn run(&self, s: BoolSeq, wm: &mut WorkingMemory) -> Result<(A, BoolSeq), EvalError> {
        (self.0)(s, wm)
    }
}

/// Lawful unit: returns `v`, leaves the sequence alone.
pub fn seq_unit<A: Clone + 'static>(v: A) -> SeqComp<A> {
    SeqComp::new(move |s, _| Ok((v.clone(), s)))
}

/// Pushes `b` and returns it: `λx.(b, ⟨b⟩ + x)`.
pub fn emit(b: bool) -> SeqComp<bool> {
    SeqComp::new(move |mut s, _| {
        s.push_front(b);
        Ok((b, s))
    })
}

/// Kleisli star. The continuation runs on the sequence `m` produced.
pub fn seq_star<A: 'static, B: 'static>(
    m: SeqComp<A>,
    k: impl Fn(A) -> SeqComp<B> + 'static,
) -> SeqComp<B> {
    SeqComp::new(move |s, wm| {
        let (a, s1) = m.run(s, wm)?;
        k(a).run(s1, wm)
    })
}

/// Reads `x` from working memory without touching the sequence.
pub fn fetch(x: Ident) -> SeqComp<bool> {
    SeqComp::new(move |s, wm| Ok((wm.get(&x)?, s)))
}

/// Replaces the two front entries with their disjunction.
pub fn or_top() -> SeqComp<bool> {
    SeqComp::new(|s, _| {
        let s = s.or_step()?;
        Ok((s.top().expect("or_step leaves an entry"), s))
    })
}

/// Replaces the two front entries with their conjunction.
pub fn and_top() -> SeqComp<bool> {
    SeqComp::new(|s, _| {
        let s = s.and_step()?;
        Ok((s.top().expect("and_step leaves an entry"), s))
    })
}

/// Evokes `goal`: its sequence, computed from `⟨⟩`, is appended at the back.
pub fn post_op(goal: &Expr) -> SeqComp<()> {
    let goal = goal.clone();
    SeqComp::new(move |mut s, wm| {
        wm.post(goal.clone());
        let (_, evoked) = super::eval::monadic(&goal).run(BoolSeq::new(), wm)?;
        s.append(&evoked);
        Ok(((), s))
    })
}

/// Which unit the sequence-triple instance uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeqUnit {
    /// [`seq_unit`].
    Pure,
    /// [`emit`], which pushes its argument.
    Emit,
}

/// Which star the sequence-triple instance uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeqStar {
    /// [`seq_star`].
    Threaded,
    /// Runs the continuation on the original sequence, dropping what `m`
    /// produced.
    DropIntermediate,
}

/// The sequence triple as a law-checking instance.
#[derive(Debug, Clone)]
pub struct SeqTriple {
    pub unit: SeqUnit,
    pub star: SeqStar,
}

impl SeqTriple {
    pub fn lawful() -> Self {
        SeqTriple { unit: SeqUnit::Pure, star: SeqStar::Threaded }
    }

    /// Negative control: the star forgets the intermediate sequence.
    pub fn sabotaged() -> Self {
        SeqTriple { unit: SeqUnit::Pure, star: SeqStar::DropIntermediate }
    }

    /// The pushing unit used by the evaluator, which is not a lawful unit.
    pub fn emitting_unit() -> Self {
        SeqTriple { unit: SeqUnit::Emit, star: SeqStar::Threaded }
    }
}

fn bit(b: bool) -> u8 {
    u8::from(b)
}

fn random_bits(rng: &mut ChaCha8Rng, max: usize) -> BoolSeq {
    let n = rng.gen_range(0..=max);
    (0..n).map(|_| rng.gen::<bool>()).collect()
}

fn gen_seq_comp(rng: &mut ChaCha8Rng, depth: usize) -> Sample<SeqComp<bool>> {
    let pick = if depth == 0 { rng.gen_range(0..5) } else { rng.gen_range(0..7) };
    match pick {
        0 => {
            let b = rng.gen();
            Sample::new(seq_unit(b), format!("unit({})", bit(b)))
        }
        1 => {
            let b = rng.gen();
            Sample::new(emit(b), format!("emit({})", bit(b)))
        }
        2 => {
            let tail = random_bits(rng, 3);
            let b = rng.gen();
            let label = format!("append({tail})->{}", bit(b));
            Sample::new(
                SeqComp::new(move |s, _| Ok((b, s.concat(&tail)))),
                label,
            )
        }
        3 => Sample::new(
            SeqComp::new(|s, _| match s.top() {
                Some(v) => Ok((v, s.rest(1))),
                None => Ok((false, s)),
            }),
            "pop".into(),
        ),
        4 => Sample::new(
            SeqComp::new(|s, _| {
                if s.len() < 2 {
                    return Ok((false, s));
                }
                let s = s.or_step()?;
                Ok((s.top().unwrap(), s))
            }),
            "or_top".into(),
        ),
        _ => {
            let m = gen_seq_comp(rng, depth - 1);
            let k = gen_seq_kleisli(rng, depth - 1);
            let label = format!("({} * {})", m.label, k.label);
            let kf = k.value;
            Sample::new(seq_star(m.value, move |a| kf(a)), label)
        }
    }
}

fn gen_seq_kleisli(rng: &mut ChaCha8Rng, depth: usize) -> Sample<Kleisli<bool, SeqComp<bool>>> {
    match rng.gen_range(0..4) {
        0 => Sample::new(Rc::new(emit), "λa.emit(a)".into()),
        1 => Sample::new(Rc::new(|a: bool| emit(!a)), "λa.emit(¬a)".into()),
        2 => {
            let t = gen_seq_comp(rng, depth);
            let f = gen_seq_comp(rng, depth);
            let label = format!("λa.if a then {} else {}", t.label, f.label);
            let (t, f) = (t.value, f.value);
            Sample::new(
                Rc::new(move |a: bool| if a { t.clone() } else { f.clone() }),
                label,
            )
        }
        _ => {
            let c = gen_seq_comp(rng, depth);
            let label = format!("λa.{} * λb.emit(a & b)", c.label);
            let c = c.value;
            Sample::new(
                Rc::new(move |a: bool| seq_star(c.clone(), move |b| emit(a & b))),
                label,
            )
        }
    }
}

impl Triple for SeqTriple {
    type Value = bool;
    type Comp = SeqComp<bool>;
    type Input = BoolSeq;
    type Outcome = Result<(bool, BoolSeq), EvalError>;

    fn name(&self) -> String {
        match (self.unit, self.star) {
            (SeqUnit::Pure, SeqStar::Threaded) => "sequence".into(),
            (SeqUnit::Pure, SeqStar::DropIntermediate) => "sequence (star drops intermediate)".into(),
            (SeqUnit::Emit, SeqStar::Threaded) => "sequence (pushing unit)".into(),
            (SeqUnit::Emit, SeqStar::DropIntermediate) => {
                "sequence (pushing unit, star drops intermediate)".into()
            }
        }
    }

    fn unit(&self, v: bool) -> SeqComp<bool> {
        match self.unit {
            SeqUnit::Pure => seq_unit(v),
            SeqUnit::Emit => emit(v),
        }
    }

    fn star(&self, m: &SeqComp<bool>, k: Kleisli<bool, SeqComp<bool>>) -> SeqComp<bool> {
        match self.star {
            SeqStar::Threaded => seq_star(m.clone(), move |a| k(a)),
            SeqStar::DropIntermediate => {
                let m = m.clone();
                SeqComp::new(move |s, wm| {
                    let (a, _dropped) = m.run(s.clone(), wm)?;
                    k(a).run(s, wm)
                })
            }
        }
    }

    fn run(&self, m: &SeqComp<bool>, input: &BoolSeq) -> Self::Outcome {
        m.run(input.clone(), &mut WorkingMemory::new())
    }

    fn gen_value(&self, rng: &mut ChaCha8Rng) -> bool {
        rng.gen()
    }

    fn gen_comp(&self, rng: &mut ChaCha8Rng) -> Sample<SeqComp<bool>> {
        gen_seq_comp(rng, 2)
    }

    fn gen_kleisli(&self, rng: &mut ChaCha8Rng) -> Sample<Kleisli<bool, SeqComp<bool>>> {
        gen_seq_kleisli(rng, 2)
    }

    fn gen_input(&self, rng: &mut ChaCha8Rng) -> BoolSeq {
        random_bits(rng, 5)
    }
}
