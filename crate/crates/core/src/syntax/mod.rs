//! Abstract syntax of the goal language together with its concrete text form.
//!
//! The grammar, loosest binding first:
//!
//! ```text
//! seq     ::= context (";" context)*
//! context ::= post ("context" post)*
//! post    ::= or | atom "post" post
//! or      ::= and ("or" and)*
//! and     ::= primary ("and" primary)*
//! primary ::= "true" | "false" | ident | "(" seq ")"
//! ```

mod gen;
mod parse;
mod pretty;

use std::fmt;
use std::sync::Arc;

pub use gen::{gen_random, GenConfig};
pub use parse::{parse, SyntaxError};
pub use pretty::pretty;

/// Words that cannot be used as identifiers.
pub const RESERVED: &[&str] = &["true", "false", "and", "or", "post", "context"];

/// Prefix of pseudo-identifiers used internally by the compiler for literals.
pub const INTERNAL_PREFIX: &str = "__";

/// Name of a working-memory element.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ident(Arc<str>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IdentError {
    #[error("identifier is empty")]
    Empty,
    #[error("`{0}` is not of the form [a-zA-Z_][a-zA-Z0-9_]*")]
    BadShape(String),
    #[error("`{0}` is a reserved word")]
    Reserved(String),
}

impl Ident {
    /// Validates a user-facing identifier. Keywords and the internal `__`
    /// namespace are rejected.
    pub fn new(name: &str) -> Result<Self, IdentError> {
        let ident = Self::new_unchecked_namespace(name)?;
        if name.starts_with(INTERNAL_PREFIX) {
            return Err(IdentError::Reserved(name.to_string()));
        }
        Ok(ident)
    }

    /// Like [`Ident::new`] but admits the internal `__` namespace. Used by the
    /// assembler, which must read back what the compiler emits.
    pub fn new_unchecked_namespace(name: &str) -> Result<Self, IdentError> {
        let mut chars = name.chars();
        let first = chars.next().ok_or(IdentError::Empty)?;
        if !(first.is_ascii_alphabetic() || first == '_')
            || !chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        {
            return Err(IdentError::BadShape(name.to_string()));
        }
        if RESERVED.contains(&name) {
            return Err(IdentError::Reserved(name.to_string()));
        }
        Ok(Ident(Arc::from(name)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_internal(&self) -> bool {
        self.0.starts_with(INTERNAL_PREFIX)
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl serde::Serialize for Ident {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

/// Expression tree of the goal language.
///
/// The left operand of [`Expr::Post`] is always an atom ([`Expr::Const`] or
/// [`Expr::Var`]); [`Expr::post`] enforces this.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(bool),
    Var(Ident),
    Or(Box<Expr>, Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    /// `l ; r`: investigate `l`, then `r`.
    Seq(Box<Expr>, Box<Expr>),
    /// `a post g`: collect the atom `a` and evoke goal `g`.
    Post(Box<Expr>, Box<Expr>),
    /// `l context r`: evaluate `l`, evoke `r` at low priority.
    Context(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(name: &str) -> Self {
        Expr::Var(Ident::new(name).expect("valid identifier"))
    }

    pub fn or(l: Expr, r: Expr) -> Self {
        Expr::Or(Box::new(l), Box::new(r))
    }

    pub fn and(l: Expr, r: Expr) -> Self {
        Expr::And(Box::new(l), Box::new(r))
    }

    pub fn seq(l: Expr, r: Expr) -> Self {
        Expr::Seq(Box::new(l), Box::new(r))
    }

    /// Builds `atom post goal`, or `None` when `atom` is compound.
    pub fn post(atom: Expr, goal: Expr) -> Option<Self> {
        atom.is_atom()
            .then(|| Expr::Post(Box::new(atom), Box::new(goal)))
    }

    pub fn context(l: Expr, r: Expr) -> Self {
        Expr::Context(Box::new(l), Box::new(r))
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Expr::Const(_) | Expr::Var(_))
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) => 1,
            Expr::Or(l, r)
            | Expr::And(l, r)
            | Expr::Seq(l, r)
            | Expr::Post(l, r)
            | Expr::Context(l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) => 1,
            Expr::Or(l, r)
            | Expr::And(l, r)
            | Expr::Seq(l, r)
            | Expr::Post(l, r)
            | Expr::Context(l, r) => 1 + l.node_count() + r.node_count(),
        }
    }

    /// True when no `post` or `context` node occurs in the tree.
    pub fn is_effect_free(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Var(_) => true,
            Expr::Or(l, r) | Expr::And(l, r) | Expr::Seq(l, r) => {
                l.is_effect_free() && r.is_effect_free()
            }
            Expr::Post(..) | Expr::Context(..) => false,
        }
    }

    /// True for the plain boolean fragment: constants, identifiers, `and`, `or`.
    pub fn is_boolean(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Var(_) => true,
            Expr::Or(l, r) | Expr::And(l, r) => l.is_boolean() && r.is_boolean(),
            _ => false,
        }
    }

    /// Checks the post-atom invariant over the whole tree.
    pub fn posts_are_atomic(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Var(_) => true,
            Expr::Post(a, g) => a.is_atom() && g.posts_are_atomic(),
            Expr::Or(l, r) | Expr::And(l, r) | Expr::Seq(l, r) | Expr::Context(l, r) => {
                l.posts_are_atomic() && r.posts_are_atomic()
            }
        }
    }

    /// Identifiers in order of first occurrence, left to right.
    pub fn identifiers(&self) -> Vec<Ident> {
        fn walk(e: &Expr, out: &mut Vec<Ident>) {
            match e {
                Expr::Const(_) => {}
                Expr::Var(x) => {
                    if !out.contains(x) {
                        out.push(x.clone());
                    }
                }
                Expr::Or(l, r)
                | Expr::And(l, r)
                | Expr::Seq(l, r)
                | Expr::Post(l, r)
                | Expr::Context(l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty(self))
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(b) => write!(f, "{b}"),
            Expr::Var(x) => write!(f, "{x}"),
            Expr::Or(l, r) => write!(f, "Or({l:?}, {r:?})"),
            Expr::And(l, r) => write!(f, "And({l:?}, {r:?})"),
            Expr::Seq(l, r) => write!(f, "Seq({l:?}, {r:?})"),
            Expr::Post(l, r) => write!(f, "Post({l:?}, {r:?})"),
            Expr::Context(l, r) => write!(f, "Context({l:?}, {r:?})"),
        }
    }
}
