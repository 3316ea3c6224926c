use std::fmt;
use std::rc::Rc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Kleisli, Sample, Triple};
use crate::error::EvalError;
use crate::syntax::Ident;
use crate::wm::{Answers, Channel, ChannelTrace, WorkingMemory};

/// Result of running a working-memory computation.
#[derive(Debug, Clone)]
pub struct WmRun<A> {
    pub value: A,
    /// Channel interactions performed by this computation only.
    pub trace: ChannelTrace,
    pub memory: WorkingMemory,
}

type WmFn<A> = dyn Fn(WorkingMemory) -> Result<WmRun<A>, EvalError>;

/// Computation in the working-memory triple.
pub struct WmComp<A>(Rc<WmFn<A>>);

impl<A> Clone for WmComp<A> {
    fn clone(&self) -> Self {
        WmComp(Rc::clone(&self.0))
    }
}

impl<A> fmt::Debug for WmComp<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("WmComp(..)")
    }
}

impl<A: 'static> WmComp<A> {
    pub fn new(f: impl Fn(WorkingMemory) -> Result<WmRun<A>, EvalError> + 'static) -> Self {
        WmComp(Rc::new(f))
    }

    pub fn run(&self, memory: WorkingMemory) -> Result<WmRun<A>, EvalError> {
        (self.0)(memory)
    }
}

/// `v` with every channel left untouched.
pub fn wm_unit<A: Clone + 'static>(v: A) -> WmComp<A> {
    WmComp::new(move |memory| {
        Ok(WmRun {
            value: v.clone(),
            trace: ChannelTrace::empty(memory.channels().len()),
            memory,
        })
    })
}

/// Runs `m`, then `k` on its value and memory; traces concatenate per channel.
pub fn wm_star<A: 'static, B: 'static>(
    m: WmComp<A>,
    k: impl Fn(A) -> WmComp<B> + 'static,
) -> WmComp<B> {
    WmComp::new(move |memory| {
        let first = m.run(memory)?;
        let second = k(first.value).run(first.memory)?;
        Ok(WmRun {
            value: second.value,
            trace: first.trace.concat(&second.trace),
            memory: second.memory,
        })
    })
}

/// Reads `x`, acquiring it through the channels if needed.
pub fn wm_ask(x: Ident) -> WmComp<bool> {
    WmComp::new(move |mut memory| {
        let before = memory.traces().clone();
        let value = memory.get(&x)?;
        let trace = memory.traces().since(&before);
        Ok(WmRun { value, trace, memory })
    })
}

/// Forgets `x`; yields `v`.
pub fn wm_forget(x: Ident, v: bool) -> WmComp<bool> {
    WmComp::new(move |mut memory| {
        memory.reset(&x);
        let trace = ChannelTrace::empty(memory.channels().len());
        Ok(WmRun { value: v, trace, memory })
    })
}

/// The working-memory triple as a law-checking instance, over a small
/// vocabulary and two scripted channels that each know part of it.
#[derive(Debug, Clone)]
pub struct WmTriple {
    vocab: Vec<Ident>,
}

impl Default for WmTriple {
    fn default() -> Self {
        WmTriple {
            vocab: ["p", "q", "r", "s"].iter().map(|n| Ident::new(n).unwrap()).collect(),
        }
    }
}

impl WmTriple {
    fn pick(&self, rng: &mut ChaCha8Rng) -> Ident {
        self.vocab.choose(rng).expect("nonempty vocabulary").clone()
    }

    fn comp(&self, rng: &mut ChaCha8Rng, depth: usize) -> Sample<WmComp<bool>> {
        let pick = if depth == 0 { rng.gen_range(0..3) } else { rng.gen_range(0..4) };
        match pick {
            0 => {
                let b = rng.gen();
                Sample::new(wm_unit(b), format!("unit({b})"))
            }
            1 => {
                let x = self.pick(rng);
                let label = format!("ask({x})");
                Sample::new(wm_ask(x), label)
            }
            2 => {
                let x = self.pick(rng);
                let b = rng.gen();
                let label = format!("forget({x})->{b}");
                Sample::new(wm_forget(x, b), label)
            }
            _ => {
                let m = self.comp(rng, depth - 1);
                let k = self.kleisli(rng, depth - 1);
                let label = format!("({} * {})", m.label, k.label);
                let kf = k.value;
                Sample::new(wm_star(m.value, move |a| kf(a)), label)
            }
        }
    }

    fn kleisli(&self, rng: &mut ChaCha8Rng, depth: usize) -> Sample<Kleisli<bool, WmComp<bool>>> {
        match rng.gen_range(0..3) {
            0 => Sample::new(Rc::new(|a: bool| wm_unit(!a)), "λa.unit(¬a)".into()),
            1 => {
                let t = self.comp(rng, depth);
                let f = self.comp(rng, depth);
                let label = format!("λa.if a then {} else {}", t.label, f.label);
                let (t, f) = (t.value, f.value);
                Sample::new(Rc::new(move |a: bool| if a { t.clone() } else { f.clone() }), label)
            }
            _ => {
                let x = self.pick(rng);
                let label = format!("λa.ask({x}) * λb.unit(a | b)");
                Sample::new(
                    Rc::new(move |a: bool| wm_star(wm_ask(x.clone()), move |b| wm_unit(a | b))),
                    label,
                )
            }
        }
    }
}

/// Observable result of a working-memory computation.
pub type WmOutcome = Result<(bool, ChannelTrace, Vec<(Ident, bool)>), EvalError>;

impl Triple for WmTriple {
    type Value = bool;
    type Comp = WmComp<bool>;
    type Input = WorkingMemory;
    type Outcome = WmOutcome;

    fn name(&self) -> String {
        "working-memory".into()
    }

    fn unit(&self, v: bool) -> WmComp<bool> {
        wm_unit(v)
    }

    fn star(&self, m: &WmComp<bool>, k: Kleisli<bool, WmComp<bool>>) -> WmComp<bool> {
        wm_star(m.clone(), move |a| k(a))
    }

    fn run(&self, m: &WmComp<bool>, input: &WorkingMemory) -> WmOutcome {
        let out = m.run(input.clone())?;
        let (env, _) = out.memory.fingerprint();
        Ok((out.value, out.trace, env))
    }

    fn gen_value(&self, rng: &mut ChaCha8Rng) -> bool {
        rng.gen()
    }

    fn gen_comp(&self, rng: &mut ChaCha8Rng) -> Sample<WmComp<bool>> {
        self.comp(rng, 2)
    }

    fn gen_kleisli(&self, rng: &mut ChaCha8Rng) -> Sample<Kleisli<bool, WmComp<bool>>> {
        self.kleisli(rng, 2)
    }

    fn gen_input(&self, rng: &mut ChaCha8Rng) -> WorkingMemory {
        let mut first = Answers::new();
        let mut second = Answers::new();
        for x in &self.vocab {
            // most identifiers are answerable so that runs get past the first
            // read; the rest exercise error propagation
            match rng.gen_range(0..10) {
                0..=4 => first.insert(x.clone(), rng.gen()),
                5..=8 => second.insert(x.clone(), rng.gen()),
                _ => {}
            }
        }
        let mut memory = WorkingMemory::new()
            .with_channel(Channel::scripted("first", first))
            .with_channel(Channel::scripted("second", second));
        if rng.gen_bool(0.3) {
            let x = self.pick(rng);
            memory.assign(x, rng.gen());
        }
        memory
    }
}
