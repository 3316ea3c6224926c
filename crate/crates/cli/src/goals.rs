//! Goal files: one `name: expression` per line, `#` starts a comment.

use std::fmt;

use nxp_core::{parse, Expr, Ident};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoalFileError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for GoalFileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for GoalFileError {}

/// Goals in file order. Columns in errors are 1-based and refer to the
/// original line.
pub fn parse_goals(text: &str) -> Result<Vec<(String, Expr)>, GoalFileError> {
    let mut goals: Vec<(String, Expr)> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let err = |column: usize, message: String| GoalFileError { line, column, message };

        let Some(colon) = body.find(':') else {
            let column = body.len() - body.trim_start().len() + 1;
            return Err(err(column, "expected `name: expression`".into()));
        };
        let name = body[..colon].trim();
        let name_col = body.len() - body.trim_start().len() + 1;
        Ident::new(name).map_err(|e| err(name_col, e.to_string()))?;
        if goals.iter().any(|(g, _)| g == name) {
            return Err(err(name_col, format!("goal `{name}` is defined twice")));
        }

        let expr = parse(&body[colon + 1..]).map_err(|e| {
            // the expression text is a single line starting right after the colon
            err(colon + 1 + e.column, e.message)
        })?;
        goals.push((name.to_string(), expr));
    }
    Ok(goals)
}
