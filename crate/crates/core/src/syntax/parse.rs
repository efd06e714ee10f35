use std::collections::BTreeSet;

use super::{Formula, Signature, SyntaxError, Term};

#[derive(Debug, Clone, PartialEq)]
enum Tok<'a> {
    Open,
    Close,
    Word(&'a str),
}

fn tokenize(text: &str) -> Vec<(usize, Tok<'_>)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in text.char_indices() {
        let delim = ch.is_whitespace() || ch == '(' || ch == ')';
        if delim {
            if let Some(s) = start.take() {
                out.push((s, Tok::Word(&text[s..i])));
            }
            match ch {
                '(' => out.push((i, Tok::Open)),
                ')' => out.push((i, Tok::Close)),
                _ => {}
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, Tok::Word(&text[s..])));
    }
    out
}

struct Parser<'a, 's> {
    toks: Vec<(usize, Tok<'a>)>,
    at: usize,
    end: usize,
    sig: &'s Signature,
}

impl<'a> Parser<'a, '_> {
    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |t| t.0)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, SyntaxError> {
        Err(SyntaxError::Parse { pos: self.pos(), msg: msg.into() })
    }

    fn next(&mut self) -> Option<(usize, Tok<'a>)> {
        let t = self.toks.get(self.at).cloned();
        self.at += 1;
        t
    }

    fn expect_close(&mut self) -> Result<(), SyntaxError> {
        match self.toks.get(self.at) {
            Some((_, Tok::Close)) => {
                self.at += 1;
                Ok(())
            }
            Some(_) => self.err("expected `)`"),
            None => self.err("unexpected end of input, expected `)`"),
        }
    }

    fn peek_close(&self) -> bool {
        matches!(self.toks.get(self.at), Some((_, Tok::Close)))
    }

    fn term(&mut self) -> Result<Term, SyntaxError> {
        match self.next() {
            Some((pos, Tok::Word(w))) => term_of(w, pos, self.sig),
            Some((pos, _)) => Err(SyntaxError::Parse { pos, msg: "expected a term".into() }),
            None => self.err("unexpected end of input, expected a term"),
        }
    }

    fn formula(&mut self) -> Result<Formula, SyntaxError> {
        match self.next() {
            Some((_, Tok::Open)) => {}
            Some((pos, _)) => return Err(SyntaxError::Parse { pos, msg: "expected `(`".into() }),
            None => return self.err("unexpected end of input, expected a formula"),
        }
        let (head_pos, head) = match self.next() {
            Some((p, Tok::Word(w))) => (p, w),
            Some((p, _)) => return Err(SyntaxError::Parse { pos: p, msg: "expected an operator or relation name".into() }),
            None => return self.err("unexpected end of input"),
        };
        let f = match head {
            "and" | "or" => {
                let mut cs = Vec::new();
                while !self.peek_close() {
                    if self.at >= self.toks.len() {
                        return self.err("unexpected end of input, expected `)`");
                    }
                    cs.push(self.formula()?);
                }
                if head == "and" {
                    Formula::And(cs)
                } else {
                    Formula::Or(cs)
                }
            }
            "not" => Formula::Not(Box::new(self.formula()?)),
            "forall" | "exists" => {
                let block = self.pos();
                match self.next() {
                    Some((_, Tok::Open)) => {}
                    _ => return Err(SyntaxError::Parse { pos: block, msg: "expected a variable block".into() }),
                }
                let mut vars = Vec::new();
                loop {
                    match self.next() {
                        Some((_, Tok::Close)) => break,
                        Some((p, Tok::Word(w))) => match w.strip_prefix('?') {
                            Some(v) if !v.is_empty() => vars.push(v.to_string()),
                            _ => return Err(SyntaxError::Parse { pos: p, msg: format!("`{w}` is not a variable") }),
                        },
                        Some((p, Tok::Open)) => return Err(SyntaxError::Parse { pos: p, msg: "expected a variable".into() }),
                        None => return self.err("unexpected end of input in variable block"),
                    }
                }
                if vars.iter().collect::<BTreeSet<_>>().len() != vars.len() {
                    return Err(SyntaxError::DuplicateVariable { pos: Some(block) });
                }
                let body = Box::new(self.formula()?);
                if head == "forall" {
                    Formula::Forall(vars, body)
                } else {
                    Formula::Exists(vars, body)
                }
            }
            "=" => {
                let a = self.term()?;
                let b = self.term()?;
                Formula::Eq(a, b)
            }
            rel => {
                let arity = self.sig.arity(rel).ok_or(SyntaxError::Undeclared { symbol: rel.to_string(), pos: Some(head_pos) })?;
                let mut args = Vec::new();
                while !self.peek_close() {
                    if self.at >= self.toks.len() {
                        return self.err("unexpected end of input, expected `)`");
                    }
                    args.push(self.term()?);
                }
                if args.len() != arity {
                    return Err(SyntaxError::Arity { rel: rel.to_string(), expected: arity, found: args.len(), pos: Some(head_pos) });
                }
                Formula::Atom { rel: rel.to_string(), args }
            }
        };
        self.expect_close()?;
        Ok(f)
    }
}

fn term_of(w: &str, pos: usize, sig: &Signature) -> Result<Term, SyntaxError> {
    if let Some(v) = w.strip_prefix('?') {
        if v.is_empty() {
            return Err(SyntaxError::Parse { pos, msg: "empty variable name".into() });
        }
        return Ok(Term::Var(v.to_string()));
    }
    if sig.is_constant(w) {
        Ok(Term::Const(w.to_string()))
    } else {
        Err(SyntaxError::Undeclared { symbol: w.to_string(), pos: Some(pos) })
    }
}

/// Parses one formula in S-expression syntax, checking it against `sig`.
pub fn parse(text: &str, sig: &Signature) -> Result<Formula, SyntaxError> {
    let mut p = Parser { toks: tokenize(text), at: 0, end: text.len(), sig };
    let f = p.formula()?;
    if p.at < p.toks.len() {
        return p.err("trailing input after formula");
    }
    Ok(f)
}

/// Parses a single term (`?x` or a declared constant).
pub fn parse_term(text: &str, sig: &Signature) -> Result<Term, SyntaxError> {
    let w = text.trim();
    let pos = text.len() - text.trim_start().len();
    term_of(w, pos, sig)
}

/// Parses a JSON array of S-expression sentences.
pub fn parse_theory(json: &str, sig: &Signature) -> Result<Vec<Formula>, SyntaxError> {
    let items: Vec<String> =
        serde_json::from_str(json).map_err(|e| SyntaxError::Parse { pos: 0, msg: format!("theory must be a JSON array of strings: {e}") })?;
    items
        .iter()
        .map(|s| {
            let f = parse(s, sig)?;
            let free = f.free_vars();
            if free.is_empty() {
                Ok(f)
            } else {
                Err(SyntaxError::NotSentence(free.into_iter().collect()))
            }
        })
        .collect()
}

pub fn render(f: &Formula) -> String {
    f.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new([("R".to_string(), 2), ("P".to_string(), 1)], vec!["d".to_string()], vec!["c0".into(), "c1".into(), "cw".into()])
            .unwrap()
    }

    #[test]
    fn empty_conjunction() {
        assert_eq!(parse("(and)", &sig()).unwrap(), Formula::And(vec![]));
    }

    #[test]
    fn faicom_disjunction() {
        let f = parse("(or (= cw c0) (= cw c1))", &sig()).unwrap();
        assert_eq!(f, Formula::Or(vec![Formula::eq_c("cw", "c0"), Formula::eq_c("cw", "c1")]));
    }

    #[test]
    fn qe_axiom_shape() {
        let f = parse("(forall (?x) (or (= ?x c0)))", &sig()).unwrap();
        assert_eq!(f, Formula::forall(["x"], Formula::Or(vec![Formula::Eq(Term::var("x"), Term::cons("c0"))])));
    }

    #[test]
    fn errors_carry_positions() {
        let s = sig();
        assert!(matches!(parse("(R c0)", &s), Err(SyntaxError::Arity { pos: Some(1), .. })));
        assert!(matches!(parse("(Q c0)", &s), Err(SyntaxError::Undeclared { pos: Some(1), .. })));
        assert!(matches!(parse("(= c0 zz)", &s), Err(SyntaxError::Undeclared { pos: Some(6), .. })));
        assert!(matches!(parse("(and (= c0 c1)", &s), Err(SyntaxError::Parse { pos: 14, .. })));
        assert!(matches!(parse("(exists (?x ?x) (P ?x))", &s), Err(SyntaxError::DuplicateVariable { .. })));
        assert!(matches!(parse("(and) (and)", &s), Err(SyntaxError::Parse { pos: 6, .. })));
    }

    #[test]
    fn render_round_trip() {
        let s = sig();
        for text in ["(forall (?x ?y) (or (R ?x ?y) (not (= ?x d))))", "(exists (?v) (and (P ?v) (or)))", "(not (not (P c1)))"] {
            let f = parse(text, &s).unwrap();
            assert_eq!(render(&f), text);
            assert_eq!(parse(&render(&f), &s).unwrap(), f);
        }
    }

    #[test]
    fn theory_rejects_open_formulas() {
        assert!(matches!(parse_theory(r#"["(P ?x)"]"#, &sig()), Err(SyntaxError::NotSentence(_))));
        assert_eq!(parse_theory(r#"["(P d)", "(and)"]"#, &sig()).unwrap().len(), 2);
    }
}
