//! Triples (monads) for the evaluator's effects and an extensional checker for
//! their laws.
//!
//! A [`Triple`] instance supplies unit, star, a way to run computations to an
//! observable outcome, and generators. [`check_triple_laws`] samples random
//! values, computations and continuations and compares outcomes for
//!
//! * left unit: `η a * f ≡ f a`
//! * right unit: `m * η ≡ m`
//! * associativity: `(m * f) * g ≡ m * (λa. f a * g)`

mod eval;
mod sequence;
mod working;

use std::fmt;
use std::rc::Rc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use eval::eval_monadic;
pub use sequence::{
    and_top, emit, fetch, or_top, post_op, seq_star, seq_unit, SeqComp, SeqStar, SeqTriple, SeqUnit,
};
pub use working::{wm_ask, wm_forget, wm_star, wm_unit, WmComp, WmOutcome, WmRun, WmTriple};

/// Function from values to computations.
pub type Kleisli<V, C> = Rc<dyn Fn(V) -> C>;

/// A generated item with a printable description for witnesses.
pub struct Sample<T> {
    pub value: T,
    pub label: String,
}

impl<T> Sample<T> {
    pub fn new(value: T, label: String) -> Self {
        Sample { value, label }
    }
}

pub trait Triple {
    type Value: Clone + fmt::Debug;
    type Comp: Clone;
    type Input: fmt::Debug;
    type Outcome: PartialEq + fmt::Debug;

    fn name(&self) -> String;
    fn unit(&self, v: Self::Value) -> Self::Comp;
    fn star(&self, m: &Self::Comp, k: Kleisli<Self::Value, Self::Comp>) -> Self::Comp;
    fn run(&self, m: &Self::Comp, input: &Self::Input) -> Self::Outcome;

    fn gen_value(&self, rng: &mut ChaCha8Rng) -> Self::Value;
    fn gen_comp(&self, rng: &mut ChaCha8Rng) -> Sample<Self::Comp>;
    fn gen_kleisli(&self, rng: &mut ChaCha8Rng) -> Sample<Kleisli<Self::Value, Self::Comp>>;
    fn gen_input(&self, rng: &mut ChaCha8Rng) -> Self::Input;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawResult {
    pub name: &'static str,
    pub pass: bool,
    /// First failing sample, if any.
    pub witness: Option<String>,
}

/// `{"instance":..., "samples":n, "laws":[{"name":...,"pass":...,"witness":...}]}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub instance: String,
    pub samples: usize,
    pub laws: Vec<LawResult>,
}

impl LawReport {
    pub fn all_pass(&self) -> bool {
        self.laws.iter().all(|l| l.pass)
    }

    pub fn law(&self, name: &str) -> Option<&LawResult> {
        self.laws.iter().find(|l| l.name == name)
    }
}

pub const LEFT_UNIT: &str = "left unit";
pub const RIGHT_UNIT: &str = "right unit";
pub const ASSOCIATIVITY: &str = "associativity";

/// Checks the three laws on `sample_count` random cases each.
pub fn check_triple_laws<T: Triple + Clone + 'static>(
    instance: &T,
    sample_count: usize,
    seed: u64,
) -> LawReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut left = None;
    let mut right = None;
    let mut assoc = None;

    for i in 0..sample_count {
        let input = instance.gen_input(&mut rng);

        if left.is_none() {
            let a = instance.gen_value(&mut rng);
            let f = instance.gen_kleisli(&mut rng);
            let lhs = instance.run(&instance.star(&instance.unit(a.clone()), f.value.clone()), &input);
            let rhs = instance.run(&(f.value)(a.clone()), &input);
            if lhs != rhs {
                left = Some(format!(
                    "sample {i}: a={a:?}, f={}, input={input:?}: {lhs:?} != {rhs:?}",
                    f.label
                ));
            }
        }

        if right.is_none() {
            let m = instance.gen_comp(&mut rng);
            let unit: Kleisli<T::Value, T::Comp> = {
                let this = instance.clone();
                Rc::new(move |v| this.unit(v))
            };
            let lhs = instance.run(&instance.star(&m.value, unit), &input);
            let rhs = instance.run(&m.value, &input);
            if lhs != rhs {
                right = Some(format!(
                    "sample {i}: m={}, input={input:?}: {lhs:?} != {rhs:?}",
                    m.label
                ));
            }
        }

        if assoc.is_none() {
            let m = instance.gen_comp(&mut rng);
            let f = instance.gen_kleisli(&mut rng);
            let g = instance.gen_kleisli(&mut rng);
            let lhs = instance.run(
                &instance.star(&instance.star(&m.value, f.value.clone()), g.value.clone()),
                &input,
            );
            let inner: Kleisli<T::Value, T::Comp> = {
                let (f, g) = (f.value.clone(), g.value.clone());
                let this = instance.clone();
                Rc::new(move |a| this.star(&f(a), g.clone()))
            };
            let rhs = instance.run(&instance.star(&m.value, inner), &input);
            if lhs != rhs {
                assoc = Some(format!(
                    "sample {i}: m={}, f={}, g={}, input={input:?}: {lhs:?} != {rhs:?}",
                    m.label, f.label, g.label
                ));
            }
        }
    }

    let law = |name, witness: Option<String>| LawResult { name, pass: witness.is_none(), witness };
    LawReport {
        instance: instance.name(),
        samples: sample_count,
        laws: vec![
            law(LEFT_UNIT, left),
            law(RIGHT_UNIT, right),
            law(ASSOCIATIVITY, assoc),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lawful_instances_pass() {
        let report = check_triple_laws(&SeqTriple::lawful(), 300, 1);
        assert!(report.all_pass(), "{report:?}");
        let report = check_triple_laws(&WmTriple::default(), 300, 1);
        assert!(report.all_pass(), "{report:?}");
    }

    #[test]
    fn dropping_the_intermediate_sequence_breaks_a_law() {
        let report = check_triple_laws(&SeqTriple::sabotaged(), 200, 1);
        assert!(!report.all_pass());
        let failed = report.laws.iter().find(|l| !l.pass).unwrap();
        assert!(failed.witness.as_deref().unwrap().starts_with("sample "));
    }

    #[test]
    fn pushing_unit_is_not_a_unit() {
        let report = check_triple_laws(&SeqTriple::emitting_unit(), 200, 1);
        assert!(!report.law(LEFT_UNIT).unwrap().pass);
        assert!(!report.law(RIGHT_UNIT).unwrap().pass);
        // the star itself is still associative
        assert!(report.law(ASSOCIATIVITY).unwrap().pass);
    }

    #[test]
    fn report_json_shape() {
        let report = check_triple_laws(&SeqTriple::lawful(), 10, 0);
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["instance"], "sequence");
        assert_eq!(json["laws"].as_array().unwrap().len(), 3);
        assert_eq!(json["laws"][0]["name"], "left unit");
        assert_eq!(json["laws"][0]["pass"], true);
        assert!(json["laws"][0]["witness"].is_null());
    }

    #[test]
    fn deterministic_for_seed() {
        let a = check_triple_laws(&SeqTriple::sabotaged(), 50, 9);
        let b = check_triple_laws(&SeqTriple::sabotaged(), 50, 9);
        assert_eq!(a, b);
    }
}
