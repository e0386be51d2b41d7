//! QDIMACS reading and writing.
//!
//! Atlas identities travel as `c var <id> <name>` comment lines so that a
//! written file can be decoded back into plan elements.

use std::fmt::Write as _;

use super::{Clause, Lit, LogicError, QbfProblem, QuantBlock, Quantifier, VarId, VariableAtlas};

pub fn write(q: &QbfProblem) -> String {
    let mut out = String::new();
    for (v, id) in q.atlas().iter() {
        writeln!(out, "c var {v} {id}").unwrap();
    }
    writeln!(out, "p cnf {} {}", q.num_vars(), q.num_clauses()).unwrap();
    for b in q.prefix() {
        out.push(b.quantifier.symbol());
        for v in &b.vars {
            write!(out, " {v}").unwrap();
        }
        out.push_str(" 0\n");
    }
    for c in q.matrix() {
        writeln!(out, "{c}").unwrap();
    }
    out
}

fn err(line: usize, msg: impl Into<String>) -> LogicError {
    LogicError::Qdimacs { line, msg: msg.into() }
}

pub fn read(text: &str) -> Result<QbfProblem, LogicError> {
    let mut atlas = VariableAtlas::new();
    let mut header: Option<(u32, usize)> = None;
    let mut prefix: Vec<QuantBlock> = Vec::new();
    let mut matrix: Vec<Clause> = Vec::new();
    let mut pending: Vec<Lit> = Vec::new();
    let mut pending_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('c') {
            if !(rest.is_empty() || rest.starts_with(char::is_whitespace)) {
                return Err(err(line_no, "unexpected token"));
            }
            let mut parts = rest.split_whitespace();
            if parts.next() == Some("var") {
                let id = parts
                    .next()
                    .and_then(|s| s.parse::<u32>().ok())
                    .ok_or_else(|| err(line_no, "`c var` needs a variable number"))?;
                let name: String = parts.collect::<Vec<_>>().join("");
                let identity = name.parse().map_err(|e: String| err(line_no, e))?;
                atlas.insert_at(VarId(id), identity).map_err(|e| err(line_no, e))?;
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix("p ") {
            if header.is_some() {
                return Err(err(line_no, "duplicate header"));
            }
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if parts.len() != 3 || parts[0] != "cnf" {
                return Err(err(line_no, "expected `p cnf <vars> <clauses>`"));
            }
            let nv = parts[1].parse().map_err(|_| err(line_no, "bad variable count"))?;
            let nc = parts[2].parse().map_err(|_| err(line_no, "bad clause count"))?;
            header = Some((nv, nc));
            continue;
        }
        let Some((nv, _)) = header else {
            return Err(err(line_no, "missing `p cnf` header"));
        };
        let first = line.chars().next().unwrap();
        if first == 'e' || first == 'a' {
            if !matrix.is_empty() || !pending.is_empty() {
                return Err(err(line_no, "quantifier line after clauses"));
            }
            let quantifier = if first == 'e' { Quantifier::Exists } else { Quantifier::Forall };
            let nums = parse_ints(&line[1..], line_no)?;
            if nums.last() != Some(&0) || nums[..nums.len() - 1].contains(&0) {
                return Err(err(line_no, "quantifier line must end with a single 0"));
            }
            let mut vars = Vec::with_capacity(nums.len() - 1);
            for &n in &nums[..nums.len() - 1] {
                if n <= 0 || n as u32 > nv {
                    return Err(err(line_no, format!("variable {n} out of range")));
                }
                vars.push(VarId(n as u32));
            }
            prefix.push(QuantBlock::new(quantifier, vars));
            continue;
        }
        for n in parse_ints(line, line_no)? {
            if pending.is_empty() {
                pending_line = line_no;
            }
            if n == 0 {
                if let Some(c) = Clause::new(pending.drain(..)) {
                    matrix.push(c);
                }
            } else {
                if n.unsigned_abs() > nv {
                    return Err(err(line_no, format!("literal {n} out of range")));
                }
                pending.push(Lit::from_dimacs(n).unwrap());
            }
        }
    }
    if !pending.is_empty() {
        return Err(err(pending_line, "unterminated clause"));
    }
    let Some((_, nc)) = header else {
        return Err(err(0, "missing `p cnf` header"));
    };
    if matrix.len() > nc {
        return Err(err(0, format!("header declares {nc} clauses, found {}", matrix.len())));
    }
    QbfProblem::new(prefix, matrix, atlas)
}

fn parse_ints(s: &str, line: usize) -> Result<Vec<i32>, LogicError> {
    s.split_whitespace()
        .map(|t| t.parse::<i32>().map_err(|_| err(line, format!("bad integer `{t}`"))))
        .collect()
}
