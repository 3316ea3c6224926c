use std::sync::Arc;

use serde::Serialize;

use super::{Instr, Program};
use crate::error::EvalError;
use crate::semantics::BoolSeq;
use crate::wm::WorkingMemory;

/// Effect of one instruction on the stack.
pub fn exec_instr(i: &Instr, s: BoolSeq, wm: &mut WorkingMemory) -> Result<BoolSeq, EvalError> {
    match i {
        Instr::Get(x) => {
            let v = wm.get(x)?;
            let mut s = s;
            s.push_front(v);
            Ok(s)
        }
        Instr::Reset(x) => {
            wm.reset(x);
            Ok(s)
        }
        Instr::Or => s.or_step(),
        Instr::And => s.and_step(),
    }
}

/// Program, 1-based program counter, stack.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MachineState {
    pub program: Arc<Program>,
    pub pc: usize,
    pub stack: BoolSeq,
}

impl MachineState {
    pub fn initial(program: Program, stack: BoolSeq) -> Self {
        MachineState { program: Arc::new(program), pc: 1, stack }
    }
}

/// The machine halts once the counter has moved past the last instruction.
pub fn term(state: &MachineState) -> bool {
    state.pc > state.program.len()
}

/// Executes the instruction at `pc`. Must not be called on a terminal state.
pub fn step(state: &MachineState, wm: &mut WorkingMemory) -> Result<MachineState, EvalError> {
    let instr = state.program.get(state.pc).expect("step called on a terminal state");
    let stack = exec_instr(instr, state.stack.clone(), wm)?;
    Ok(MachineState {
        program: Arc::clone(&state.program),
        pc: state.pc + 1,
        stack,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("at pc {pc}: {source}")]
pub struct RunError {
    pub pc: usize,
    pub source: EvalError,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepRecord {
    pub pc: usize,
    pub instr: String,
    /// Stack after the instruction.
    pub stack: BoolSeq,
}

/// `{"steps":[{"pc":n,"instr":"GET a","stack":[...]}], "final":[...]}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub steps: Vec<StepRecord>,
    #[serde(rename = "final")]
    pub final_stack: BoolSeq,
}

fn drive(
    program: Program,
    s: BoolSeq,
    wm: &mut WorkingMemory,
    mut on_step: impl FnMut(&MachineState, &MachineState),
) -> Result<BoolSeq, RunError> {
    let mut state = MachineState::initial(program, s);
    while !term(&state) {
        let next = step(&state, wm).map_err(|source| RunError { pc: state.pc, source })?;
        on_step(&state, &next);
        state = next;
    }
    Ok(state.stack)
}

/// Runs `program` from `(program, 1, s)` until termination; returns the stack.
pub fn run(program: Program, s: BoolSeq, wm: &mut WorkingMemory) -> Result<BoolSeq, RunError> {
    drive(program, s, wm, |_, _| {})
}

/// Like [`run`], recording one entry per executed instruction.
pub fn run_traced(program: Program, s: BoolSeq, wm: &mut WorkingMemory) -> Result<Trace, RunError> {
    let mut steps = Vec::new();
    let final_stack = drive(program, s, wm, |before, after| {
        steps.push(StepRecord {
            pc: before.pc,
            instr: before.program.get(before.pc).expect("executed").to_string(),
            stack: after.stack.clone(),
        });
    })?;
    Ok(Trace { steps, final_stack })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{assemble, compile_linked};
    use crate::syntax::{parse, Ident};
    use crate::wm::Answers;

    fn id(s: &str) -> Ident {
        Ident::new(s).unwrap()
    }

    #[test]
    fn single_instructions() {
        let mut wm = WorkingMemory::scripted(Answers::new().with("a", true));
        assert_eq!(exec_instr(&Instr::Get(id("a")), BoolSeq::new(), &mut wm), Ok(BoolSeq::from([1])));
        assert_eq!(exec_instr(&Instr::Reset(id("a")), BoolSeq::from([1]), &mut wm), Ok(BoolSeq::from([1])));
        assert_eq!(wm.lookup(&id("a")), None);
        assert_eq!(exec_instr(&Instr::Or, BoolSeq::from([1, 0]), &mut wm), Ok(BoolSeq::from([1])));
        assert_eq!(
            exec_instr(&Instr::And, BoolSeq::from([1]), &mut wm),
            Err(EvalError::Underflow { op: "and", len: 1 })
        );
    }

    #[test]
    fn step_and_term() {
        let mut wm = WorkingMemory::scripted(Answers::new().with("a", true));
        let p = assemble("GET a").unwrap();
        let s0 = MachineState::initial(p.clone(), BoolSeq::new());
        assert!(!term(&s0));
        let s1 = step(&s0, &mut wm).unwrap();
        assert_eq!(s1.pc, 2);
        assert_eq!(s1.stack, BoolSeq::from([1]));
        assert!(term(&s1));
        assert!(term(&MachineState::initial(Program::new(), BoolSeq::new())));
    }

    #[test]
    fn runs() {
        let mut wm = WorkingMemory::scripted(Answers::new().with("a", false).with("b", true));
        let p = assemble("GET a\nGET b\nOR").unwrap();
        assert_eq!(run(p, BoolSeq::new(), &mut wm), Ok(BoolSeq::from([1])));
        assert_eq!(run(Program::new(), BoolSeq::from([0, 1]), &mut wm), Ok(BoolSeq::from([0, 1])));

        let mut wm = WorkingMemory::scripted(Answers::new().with("x", true).with("y", false).with("z", true));
        let p = compile_linked(&parse("x post y ; z").unwrap());
        assert_eq!(run(p, BoolSeq::new(), &mut wm), Ok(BoolSeq::from([1, 1, 0])));
    }

    #[test]
    fn errors_carry_pc() {
        let mut wm = WorkingMemory::scripted(Answers::new().with("a", true));
        let err = run(assemble("GET a\nOR").unwrap(), BoolSeq::new(), &mut wm).unwrap_err();
        assert_eq!(err.pc, 2);
        let err = run(assemble("GET a\nGET q").unwrap(), BoolSeq::new(), &mut wm).unwrap_err();
        assert_eq!(err, RunError { pc: 2, source: EvalError::Unvalued(id("q")) });
    }

    #[test]
    fn reset_forces_a_new_question() {
        let mut wm = WorkingMemory::scripted(Answers::new().with("a", true));
        run(assemble("GET a\nRESET a\nGET a\nAND").unwrap(), BoolSeq::new(), &mut wm).unwrap();
        assert_eq!(wm.events_for(&id("a")), 2);
    }

    #[test]
    fn trace_json() {
        let mut wm = WorkingMemory::scripted(Answers::new().with("a", false).with("b", true));
        let t = run_traced(assemble("GET a\nGET b\nOR").unwrap(), BoolSeq::new(), &mut wm).unwrap();
        assert_eq!(t.steps.len(), 3);
        let json = serde_json::to_value(&t).unwrap();
        assert_eq!(json["steps"][0]["pc"], 1);
        assert_eq!(json["steps"][0]["instr"], "GET a");
        assert_eq!(json["steps"][1]["stack"], serde_json::json!([1, 0]));
        assert_eq!(json["final"], serde_json::json!([1]));
    }
}
