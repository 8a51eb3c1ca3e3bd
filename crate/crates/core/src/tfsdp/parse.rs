use std::collections::HashMap;

use super::{DecisionProblem, NodeKind, ProblemBuilder};
use crate::error::{Error, Result};

fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'.')
}

pub(crate) fn parse_problem(text: &str) -> Result<DecisionProblem> {
    parse_lines(text.lines().enumerate().map(|(i, l)| (i + 1, l)))
}

/// Parses a problem from already-numbered lines. Blank lines and `#`
/// comments are skipped. Shared with the game parser, which embeds problems.
pub(crate) fn parse_lines<'a>(
    lines: impl IntoIterator<Item = (usize, &'a str)>,
) -> Result<DecisionProblem> {
    let mut builder: Option<ProblemBuilder> = None;
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut pending: Vec<(usize, String, usize)> = Vec::new();
    let mut last_line = 0;

    for (lineno, raw) in lines {
        last_line = lineno;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let tok: Vec<&str> = line.split_whitespace().collect();
        let Some(b) = builder.as_mut() else {
            if tok.len() != 2 || tok[0] != "tfsdp" {
                return Err(Error::Parse { line: lineno, msg: "expected header `tfsdp <name>`".into() });
            }
            builder = Some(ProblemBuilder::new(tok[1]));
            continue;
        };
        if tok.len() != 4 {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected `<id> <D|O|T> <parent|-> <label|->`, got {} fields", tok.len()),
            });
        }
        if !is_ident(tok[0]) {
            return Err(Error::Parse { line: lineno, msg: format!("invalid node id `{}`", tok[0]) });
        }
        let kind = match tok[1] {
            "D" => NodeKind::Decision,
            "O" => NodeKind::Observation,
            "T" => NodeKind::Terminal,
            k => return Err(Error::Parse { line: lineno, msg: format!("unknown node kind `{k}`") }),
        };
        if ids.contains_key(tok[0]) {
            return Err(Error::Parse { line: lineno, msg: format!("duplicate node id `{}`", tok[0]) });
        }
        let idx = b.add(tok[0], kind, None, tok[3]);
        ids.insert(tok[0].to_string(), idx);
        if tok[2] != "-" {
            pending.push((idx, tok[2].to_string(), lineno));
        }
    }

    let Some(b) = builder else {
        return Err(Error::Parse { line: last_line.max(1), msg: "missing `tfsdp` header".into() });
    };
    // Parents may be declared after their children, so links are resolved last.
    let ProblemBuilder { name, mut nodes } = b;
    for (idx, parent, lineno) in pending {
        let Some(&p) = ids.get(&parent) else {
            return Err(Error::Parse { line: lineno, msg: format!("unknown parent `{parent}`") });
        };
        nodes[idx].2 = Some(p);
    }
    ProblemBuilder { name, nodes }.build()
}
