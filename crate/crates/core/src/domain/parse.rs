use std::collections::HashMap;

use super::{DomainError, Fact, FactId, FactLit, NondetRule, OpId, Operator, ProblemInstance};
use crate::logic::Formula;

const STATEMENTS: &[&str] = &["fact", "observable", "defined", "operator", "rule", "init", "goal"];
const SECTIONS: &[&str] = &["pre", "post", "eff"];

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Word(String),
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn tokenize(text: &str) -> Vec<Spanned> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let line = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        };
        let mut chars = line.char_indices().peekable();
        while let Some((ci, c)) = chars.next() {
            let (line, col) = (li + 1, line[..ci].chars().count() + 1);
            match c {
                '(' => out.push(Spanned { tok: Tok::Open, line, col }),
                ')' => out.push(Spanned { tok: Tok::Close, line, col }),
                c if c.is_whitespace() => {}
                _ => {
                    let mut word = String::from(c);
                    while let Some(&(_, d)) = chars.peek() {
                        if d.is_whitespace() || d == '(' || d == ')' {
                            break;
                        }
                        word.push(d);
                        chars.next();
                    }
                    out.push(Spanned { tok: Tok::Word(word), line, col });
                }
            }
        }
    }
    out
}

/// A name occurrence awaiting resolution against the fact table.
#[derive(Debug, Clone)]
struct NameRef {
    name: String,
    line: usize,
    col: usize,
}

type RawLit = (NameRef, bool);

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn end_position(&self) -> (usize, usize) {
        self.toks.last().map_or((1, 1), |t| (t.line, t.col + 1))
    }

    fn error_at(&self, t: Option<&Spanned>, msg: impl Into<String>) -> DomainError {
        let (line, col) = t.map_or_else(|| self.end_position(), |t| (t.line, t.col));
        DomainError::Syntax { line, col, msg: msg.into() }
    }

    fn peek_word(&self) -> Option<&str> {
        match self.peek() {
            Some(Spanned { tok: Tok::Word(w), .. }) => Some(w),
            _ => None,
        }
    }

    fn name(&mut self, what: &str) -> Result<NameRef, DomainError> {
        match self.next() {
            Some(Spanned { tok: Tok::Word(w), line, col })
                if !STATEMENTS.contains(&w.as_str()) && !w.starts_with('-') =>
            {
                Ok(NameRef { name: w, line, col })
            }
            other => Err(self.error_at(other.as_ref(), format!("expected {what}"))),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), DomainError> {
        match self.next() {
            Some(Spanned { tok: Tok::Word(w), .. }) if w == kw => Ok(()),
            other => Err(self.error_at(other.as_ref(), format!("expected `{kw}`"))),
        }
    }

    /// Names up to the next keyword or end of input.
    fn names(&mut self) -> Vec<NameRef> {
        let mut out = Vec::new();
        while let Some(Spanned { tok: Tok::Word(w), line, col }) = self.peek().cloned() {
            if STATEMENTS.contains(&w.as_str()) || SECTIONS.contains(&w.as_str()) {
                break;
            }
            self.pos += 1;
            out.push(NameRef { name: w, line, col });
        }
        out
    }

    fn lits(&mut self) -> Result<Vec<RawLit>, DomainError> {
        let mut out = Vec::new();
        for mut n in self.names() {
            let positive = !n.name.starts_with('-');
            if !positive {
                n.name.remove(0);
                n.col += 1;
                if n.name.is_empty() {
                    return Err(DomainError::Syntax {
                        line: n.line,
                        col: n.col - 1,
                        msg: "`-` must be followed by a fact name".into(),
                    });
                }
            }
            out.push((n, positive));
        }
        Ok(out)
    }

    fn formula(&mut self) -> Result<Formula<NameRef>, DomainError> {
        match self.next() {
            Some(Spanned { tok: Tok::Word(w), line, col }) => {
                if STATEMENTS.contains(&w.as_str()) || w.starts_with('-') {
                    let t = Spanned { tok: Tok::Word(w), line, col };
                    return Err(self.error_at(Some(&t), "expected a formula"));
                }
                Ok(Formula::Atom(NameRef { name: w, line, col }))
            }
            Some(open @ Spanned { tok: Tok::Open, .. }) => {
                let head = match self.next() {
                    Some(Spanned { tok: Tok::Word(w), .. }) => w,
                    other => return Err(self.error_at(other.as_ref(), "expected a connective")),
                };
                let mut args = Vec::new();
                loop {
                    match self.peek() {
                        Some(Spanned { tok: Tok::Close, .. }) => {
                            self.pos += 1;
                            break;
                        }
                        None => return Err(self.error_at(Some(&open), "unclosed parenthesis")),
                        _ => args.push(self.formula()?),
                    }
                }
                let arity = |n: usize| -> Result<(), DomainError> {
                    if args.len() == n {
                        Ok(())
                    } else {
                        Err(self.error_at(
                            Some(&open),
                            format!("`{head}` takes {n} argument(s), found {}", args.len()),
                        ))
                    }
                };
                match head.as_str() {
                    "and" => Ok(Formula::And(args)),
                    "or" => Ok(Formula::Or(args)),
                    "true" => arity(0).map(|_| Formula::True),
                    "false" => arity(0).map(|_| Formula::False),
                    "not" => {
                        arity(1)?;
                        Ok(Formula::not(args.pop().unwrap()))
                    }
                    "imp" | "iff" => {
                        arity(2)?;
                        let b = args.pop().unwrap();
                        let a = args.pop().unwrap();
                        Ok(if head == "imp" { Formula::imp(a, b) } else { Formula::iff(a, b) })
                    }
                    _ => Err(self.error_at(Some(&open), format!("unknown connective `{head}`"))),
                }
            }
            other => Err(self.error_at(other.as_ref(), "expected a formula")),
        }
    }

    /// `pre <lit>*` followed by either `post <lit>*` or two or more
    /// `eff <lit>*` groups.
    fn pre_and_effects(
        &mut self,
        allow_post: bool,
    ) -> Result<(Vec<RawLit>, Vec<Vec<RawLit>>, bool), DomainError> {
        self.keyword("pre")?;
        let pre = self.lits()?;
        if allow_post && self.peek_word() == Some("post") {
            self.pos += 1;
            return Ok((pre, vec![self.lits()?], true));
        }
        let mut effects = Vec::new();
        while self.peek_word() == Some("eff") {
            self.pos += 1;
            effects.push(self.lits()?);
        }
        if effects.is_empty() {
            let t = self.peek().cloned();
            let expected = if allow_post { "`post` or `eff`" } else { "`eff`" };
            return Err(self.error_at(t.as_ref(), format!("expected {expected}")));
        }
        Ok((pre, effects, false))
    }
}

struct RawOp {
    name: NameRef,
    pre: Vec<RawLit>,
    effects: Vec<Vec<RawLit>>,
    deterministic: bool,
}

/// Parses the textual domain format. Facts, operators and rules are
/// indexed in declaration order.
pub fn parse_domain(text: &str) -> Result<ProblemInstance, DomainError> {
    let mut p = Parser { toks: tokenize(text), pos: 0 };
    let mut facts: Vec<(NameRef, Option<Formula<NameRef>>)> = Vec::new();
    let mut observable: Vec<NameRef> = Vec::new();
    let mut ops: Vec<RawOp> = Vec::new();
    let mut rules: Vec<RawOp> = Vec::new();
    let mut init: Option<Formula<NameRef>> = None;
    let mut goal: Option<Formula<NameRef>> = None;

    while let Some(t) = p.next() {
        let Tok::Word(kw) = &t.tok else {
            return Err(p.error_at(Some(&t), "expected a statement keyword"));
        };
        match kw.as_str() {
            "fact" => {
                let names = p.names();
                if names.is_empty() {
                    let next = p.peek().cloned();
                    return Err(p.error_at(next.as_ref(), "expected fact names"));
                }
                for n in names {
                    if n.name.starts_with('-') {
                        return Err(DomainError::Syntax {
                            line: n.line,
                            col: n.col,
                            msg: "fact names cannot start with `-`".into(),
                        });
                    }
                    facts.push((n, None));
                }
            }
            "observable" => observable.extend(p.names()),
            "defined" => {
                let name = p.name("a fact name")?;
                let def = p.formula()?;
                facts.push((name, Some(def)));
            }
            "operator" | "rule" => {
                let name = p.name("a name")?;
                let is_op = kw == "operator";
                let (pre, effects, deterministic) = p.pre_and_effects(is_op)?;
                if !deterministic && effects.len() < 2 {
                    return Err(DomainError::Syntax {
                        line: name.line,
                        col: name.col,
                        msg: "at least two `eff` alternatives are required".into(),
                    });
                }
                let raw = RawOp { name, pre, effects, deterministic };
                if is_op {
                    ops.push(raw);
                } else {
                    rules.push(raw);
                }
            }
            "init" | "goal" => {
                let slot = if kw == "init" { &mut init } else { &mut goal };
                if slot.is_some() {
                    return Err(p.error_at(Some(&t), format!("duplicate `{kw}`")));
                }
                *slot = Some(p.formula()?);
            }
            other => return Err(p.error_at(Some(&t), format!("unknown statement `{other}`"))),
        }
    }
    let (line, col) = p.end_position();
    let init = init.ok_or(DomainError::Syntax { line, col, msg: "missing `init`".into() })?;
    let goal = goal.ok_or(DomainError::Syntax { line, col, msg: "missing `goal`".into() })?;

    let mut index: HashMap<String, FactId> = HashMap::new();
    for (i, (n, _)) in facts.iter().enumerate() {
        if index.insert(n.name.clone(), FactId(i)).is_some() {
            return Err(DomainError::Duplicate { name: n.name.clone(), line: n.line });
        }
    }
    let resolve = |n: &NameRef| -> Result<FactId, DomainError> {
        index.get(&n.name).copied().ok_or_else(|| DomainError::UndeclaredFact {
            name: n.name.clone(),
            line: n.line,
            col: n.col,
        })
    };
    let resolve_formula = |f: &Formula<NameRef>| -> Result<Formula<FactId>, DomainError> {
        let mut err = None;
        f.visit_atoms(&mut |n: &NameRef| {
            if err.is_none() {
                err = resolve(n).err();
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(f.map_atoms(&mut |n: &NameRef| index[&n.name])),
        }
    };
    let resolve_lits = |ls: &[RawLit]| -> Result<Vec<FactLit>, DomainError> {
        ls.iter().map(|(n, pos)| Ok(FactLit { fact: resolve(n)?, positive: *pos })).collect()
    };

    let mut obs = vec![false; facts.len()];
    for n in &observable {
        obs[resolve(n)?.0] = true;
    }
    let mut fact_list = Vec::with_capacity(facts.len());
    for (i, (n, def)) in facts.iter().enumerate() {
        let defined_by = def.as_ref().map(resolve_formula).transpose()?;
        fact_list.push(Fact { name: n.name.clone(), index: FactId(i), observable: obs[i], defined_by });
    }

    let mut names: HashMap<&str, ()> = HashMap::new();
    for r in ops.iter().chain(rules.iter()) {
        if names.insert(r.name.name.as_str(), ()).is_some() {
            return Err(DomainError::Duplicate { name: r.name.name.clone(), line: r.name.line });
        }
    }
    let mut operators = Vec::with_capacity(ops.len());
    for (i, r) in ops.iter().enumerate() {
        if r.deterministic && r.effects[0].is_empty() {
            return Err(DomainError::EmptyEffect { name: r.name.name.clone() });
        }
        operators.push(Operator {
            name: r.name.name.clone(),
            index: OpId(i),
            pre: resolve_lits(&r.pre)?,
            effects: r.effects.iter().map(|e| resolve_lits(e)).collect::<Result<_, _>>()?,
        });
    }
    let mut rule_list = Vec::with_capacity(rules.len());
    for (i, r) in rules.iter().enumerate() {
        rule_list.push(NondetRule {
            name: r.name.name.clone(),
            index: i,
            pre: resolve_lits(&r.pre)?,
            alternatives: r.effects.iter().map(|e| resolve_lits(e)).collect::<Result<_, _>>()?,
        });
    }
    ProblemInstance::new(
        fact_list,
        operators,
        rule_list,
        resolve_formula(&init)?,
        resolve_formula(&goal)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_instance() {
        let inst = parse_domain("init (true)\ngoal (true)\n").unwrap();
        assert_eq!(inst.num_ops(), 0);
        assert!(inst.facts.is_empty());
    }

    #[test]
    fn undeclared_fact() {
        let e = parse_domain("fact a\ninit a\ngoal foo\n").unwrap_err();
        assert_eq!(e, DomainError::UndeclaredFact { name: "foo".into(), line: 3, col: 6 });
    }

    #[test]
    fn undeclared_in_literal_reports_name_column() {
        let e = parse_domain("fact a\noperator o pre -zz post a\ninit a\ngoal a\n").unwrap_err();
        assert_eq!(e, DomainError::UndeclaredFact { name: "zz".into(), line: 2, col: 17 });
    }

    #[test]
    fn empty_effect() {
        let e = parse_domain("fact a\noperator o pre a post\ninit a\ngoal a\n").unwrap_err();
        assert_eq!(e, DomainError::EmptyEffect { name: "o".into() });
    }

    #[test]
    fn duplicates() {
        let e = parse_domain("fact a b a\ninit a\ngoal a\n").unwrap_err();
        assert!(matches!(e, DomainError::Duplicate { ref name, line: 1 } if name == "a"));
        let e = parse_domain("fact a\noperator o pre post a\noperator o pre post -a\ninit a\ngoal a\n")
            .unwrap_err();
        assert!(matches!(e, DomainError::Duplicate { line: 3, .. }));
    }

    #[test]
    fn syntax_errors_have_positions() {
        let e = parse_domain("fact a\ninit (and a\ngoal a\n").unwrap_err();
        assert!(matches!(e, DomainError::Syntax { line: 3, .. }), "{e}");
        let e = parse_domain("fact a\ninit (xor a a)\ngoal a\n").unwrap_err();
        assert_eq!(
            e,
            DomainError::Syntax { line: 2, col: 6, msg: "unknown connective `xor`".into() }
        );
        let e = parse_domain("fact a\ninit a\n").unwrap_err();
        assert!(matches!(e, DomainError::Syntax { ref msg, .. } if msg == "missing `goal`"));
        let e = parse_domain("fact a\nrule r pre a eff a\ninit a\ngoal a\n").unwrap_err();
        assert!(matches!(e, DomainError::Syntax { line: 2, .. }));
    }

    #[test]
    fn nondeterminism_and_defined_facts() {
        let text = "fact p q\ndefined pq (and p q)\nobservable pq\n\
                    operator flip pre eff p eff -p eff q\n\
                    rule wind pre q eff -q eff p\ninit (true)\ngoal pq\n";
        let inst = parse_domain(text).unwrap();
        assert_eq!(inst.operators[0].effects.len(), 3);
        assert_eq!(inst.rules[0].alternatives.len(), 2);
        assert!(inst.facts[2].observable && inst.facts[2].is_defined());
        let again = parse_domain(&inst.to_string()).unwrap();
        assert_eq!(again, inst);
    }

    #[test]
    fn comments_and_whitespace() {
        let inst = parse_domain("  # header\nfact a # trailing\n\n init\n a goal (not\na)").unwrap();
        assert_eq!(inst.facts.len(), 1);
    }
}
