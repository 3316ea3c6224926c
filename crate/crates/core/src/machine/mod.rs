//! Compiler from expressions to stack-machine programs, and the machine.
//!
//! Programs use four instructions: `GET x` pushes the value of `x`, `OR` and
//! `AND` combine the two front entries, `RESET x` makes `x` unknown again.
//! Their text form (one instruction per line) is the program file format.

mod compile;
mod vm;

use std::fmt;
use std::str::FromStr;

pub use compile::{compile, compile_linked, link};
pub use vm::{exec_instr, run, run_traced, step, term, MachineState, RunError, StepRecord, Trace};

use crate::syntax::Ident;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Instr {
    Get(Ident),
    Or,
    And,
    Reset(Ident),
}

impl fmt::Display for Instr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instr::Get(x) => write!(f, "GET {x}"),
            Instr::Or => f.write_str("OR"),
            Instr::And => f.write_str("AND"),
            Instr::Reset(x) => write!(f, "RESET {x}"),
        }
    }
}

/// Finite instruction sequence; index 1 runs first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Program(Vec<Instr>);

impl Program {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// 1-based instruction fetch.
    pub fn get(&self, pc: usize) -> Option<&Instr> {
        pc.checked_sub(1).and_then(|i| self.0.get(i))
    }

    pub fn instrs(&self) -> &[Instr] {
        &self.0
    }

    pub fn push(&mut self, i: Instr) {
        self.0.push(i);
    }

    /// `self + other`.
    pub fn concat(mut self, other: &Program) -> Program {
        self.0.extend(other.0.iter().cloned());
        self
    }
}

impl FromIterator<Instr> for Program {
    fn from_iter<I: IntoIterator<Item = Instr>>(iter: I) -> Self {
        Program(iter.into_iter().collect())
    }
}

/// One instruction per line, no trailing newline.
pub fn disassemble(p: &Program) -> String {
    p.0.iter().map(Instr::to_string).collect::<Vec<_>>().join("\n")
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&disassemble(self))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("program line {line}: {message}")]
pub struct AsmError {
    pub line: usize,
    pub message: String,
}

/// Reads the disassembly format back. Blank lines and `#` comments are
/// skipped; mnemonics are case-insensitive.
pub fn assemble(text: &str) -> Result<Program, AsmError> {
    let mut out = Program::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| AsmError { line: n + 1, message };
        let mut words = line.split_whitespace();
        let op = words.next().expect("nonempty line").to_ascii_uppercase();
        let operand = words.next();
        if words.next().is_some() {
            return Err(err(format!("too many operands in `{line}`")));
        }
        let ident = |operand: Option<&str>| -> Result<Ident, AsmError> {
            let name = operand.ok_or_else(|| err(format!("`{op}` needs an identifier")))?;
            Ident::new_unchecked_namespace(name).map_err(|e| err(e.to_string()))
        };
        let instr = match op.as_str() {
            "GET" => Instr::Get(ident(operand)?),
            "RESET" => Instr::Reset(ident(operand)?),
            "OR" | "AND" if operand.is_some() => {
                return Err(err(format!("`{op}` takes no operand")))
            }
            "OR" => Instr::Or,
            "AND" => Instr::And,
            other => return Err(err(format!("unknown instruction `{other}`"))),
        };
        out.push(instr);
    }
    Ok(out)
}

impl FromStr for Program {
    type Err = AsmError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        assemble(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn id(s: &str) -> Ident {
        Ident::new(s).unwrap()
    }

    #[test]
    fn disassembly() {
        let p: Program = [Instr::Get(id("a")), Instr::Or].into_iter().collect();
        assert_eq!(disassemble(&p), "GET a\nOR");
        assert_eq!(disassemble(&Program::new()), "");
    }

    #[test]
    fn assembly_errors() {
        assert_eq!(assemble("").unwrap(), Program::new());
        assert_eq!(
            assemble("# c\nget x\n\nreset __true\nand").unwrap(),
            [
                Instr::Get(id("x")),
                Instr::Reset(Ident::new_unchecked_namespace("__true").unwrap()),
                Instr::And
            ]
            .into_iter()
            .collect()
        );
        assert_eq!(assemble("GET").unwrap_err().line, 1);
        assert_eq!(assemble("OR\nOR x").unwrap_err().line, 2);
        assert!(assemble("PUSH x").is_err());
        assert!(assemble("GET a b").is_err());
        assert!(assemble("GET or").is_err());
    }

    fn instr() -> impl Strategy<Value = Instr> {
        let name = prop::sample::select(vec!["a", "b", "x_1", "__true", "__false"]);
        prop_oneof![
            name.clone().prop_map(|n| Instr::Get(Ident::new_unchecked_namespace(n).unwrap())),
            Just(Instr::Or),
            Just(Instr::And),
            name.prop_map(|n| Instr::Reset(Ident::new_unchecked_namespace(n).unwrap())),
        ]
    }

    proptest! {
        #[test]
        fn assemble_inverts_disassemble(items in prop::collection::vec(instr(), 0..20)) {
            let p: Program = items.into_iter().collect();
            prop_assert_eq!(assemble(&disassemble(&p)).unwrap(), p);
        }

        #[test]
        fn concat_is_a_monoid(
            a in prop::collection::vec(instr(), 0..5),
            b in prop::collection::vec(instr(), 0..5),
            c in prop::collection::vec(instr(), 0..5),
        ) {
            let (a, b, c): (Program, Program, Program) =
                (a.into_iter().collect(), b.into_iter().collect(), c.into_iter().collect());
            prop_assert_eq!(a.clone().concat(&b).concat(&c), a.clone().concat(&b.clone().concat(&c)));
            prop_assert_eq!(a.clone().concat(&Program::new()), a.clone());
            prop_assert_eq!(Program::new().concat(&a), a);
        }
    }
}
