//! Terms over the signature `{∨, ∧, →, ¬, ∼, 0, 1}`.
//!
//! Concrete syntax: `|` join, `&` meet, `->` implication (right associative),
//! `!` pseudocomplement, `~` involution, constants `0` and `1`. Unary
//! operators bind tightest, then `&`, then `|`, then `->`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::algebra::HiOps;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Zero,
    One,
    Inv(Box<Term>),
    Neg(Box<Term>),
    Meet(Box<Term>, Box<Term>),
    Join(Box<Term>, Box<Term>),
    Impl(Box<Term>, Box<Term>),
}

/// Variable assignment, keyed by name.
pub type Environment = BTreeMap<String, usize>;

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_owned())
    }

    pub fn inv(t: Term) -> Term {
        Term::Inv(Box::new(t))
    }

    pub fn neg(t: Term) -> Term {
        Term::Neg(Box::new(t))
    }

    pub fn meet(l: Term, r: Term) -> Term {
        Term::Meet(Box::new(l), Box::new(r))
    }

    pub fn join(l: Term, r: Term) -> Term {
        Term::Join(Box::new(l), Box::new(r))
    }

    pub fn imp(l: Term, r: Term) -> Term {
        Term::Impl(Box::new(l), Box::new(r))
    }

    /// `¬∼t`
    pub fn neg_inv(t: Term) -> Term {
        Term::neg(Term::inv(t))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Zero | Term::One => {}
            Term::Inv(t) | Term::Neg(t) => t.collect_vars(out),
            Term::Meet(l, r) | Term::Join(l, r) | Term::Impl(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    /// Simultaneous substitution of variables.
    pub fn substitute(&self, map: &BTreeMap<&str, Term>) -> Term {
        match self {
            Term::Var(v) => map.get(v.as_str()).cloned().unwrap_or_else(|| self.clone()),
            Term::Zero | Term::One => self.clone(),
            Term::Inv(t) => Term::inv(t.substitute(map)),
            Term::Neg(t) => Term::neg(t.substitute(map)),
            Term::Meet(l, r) => Term::meet(l.substitute(map), r.substitute(map)),
            Term::Join(l, r) => Term::join(l.substitute(map), r.substitute(map)),
            Term::Impl(l, r) => Term::imp(l.substitute(map), r.substitute(map)),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Term::Var(_) | Term::Zero | Term::One => 1,
            Term::Inv(t) | Term::Neg(t) => 1 + t.node_count(),
            Term::Meet(l, r) | Term::Join(l, r) | Term::Impl(l, r) => {
                1 + l.node_count() + r.node_count()
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Term::Impl(..) => 1,
            Term::Join(..) => 2,
            Term::Meet(..) => 3,
            Term::Inv(_) | Term::Neg(_) => 4,
            Term::Var(_) | Term::Zero | Term::One => 5,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(f: &mut fmt::Formatter<'_>, t: &Term, parens: bool) -> fmt::Result {
            if parens {
                write!(f, "({t})")
            } else {
                write!(f, "{t}")
            }
        }
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Zero => f.write_str("0"),
            Term::One => f.write_str("1"),
            Term::Inv(t) => {
                f.write_str("~")?;
                child(f, t, t.precedence() < 4)
            }
            Term::Neg(t) => {
                f.write_str("!")?;
                child(f, t, t.precedence() < 4)
            }
            Term::Meet(l, r) | Term::Join(l, r) => {
                let p = self.precedence();
                let op = if matches!(self, Term::Meet(..)) { " & " } else { " | " };
                // left associative: a right operand at the same level keeps its parentheses
                child(f, l, l.precedence() < p)?;
                f.write_str(op)?;
                child(f, r, r.precedence() <= p)
            }
            Term::Impl(l, r) => {
                child(f, l, l.precedence() <= 1)?;
                f.write_str(" -> ")?;
                child(f, r, r.precedence() < 1)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Zero,
    One,
    Tilde,
    Bang,
    Amp,
    Bar,
    Arrow,
    LParen,
    RParen,
    End,
}

fn describe(t: &Tok) -> &'static str {
    match t {
        Tok::Ident(_) => "variable",
        Tok::Zero => "`0`",
        Tok::One => "`1`",
        Tok::Tilde => "`~`",
        Tok::Bang => "`!`",
        Tok::Amp => "`&`",
        Tok::Bar => "`|`",
        Tok::Arrow => "`->`",
        Tok::LParen => "`(`",
        Tok::RParen => "`)`",
        Tok::End => "end of input",
    }
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'~' => Tok::Tilde,
            b'!' => Tok::Bang,
            b'&' => Tok::Amp,
            b'|' => Tok::Bar,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0' => Tok::Zero,
            b'1' => Tok::One,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Arrow
            }
            c if c.is_ascii_alphabetic() => {
                while i + 1 < bytes.len() && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_') {
                    i += 1;
                }
                Tok::Ident(src[start..=i].to_owned())
            }
            _ => {
                return Err(Error::Syntax {
                    position: start,
                    expected: vec!["term".into(), "operator".into()],
                })
            }
        };
        i += 1;
        out.push((start, tok));
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> Error {
        Error::Syntax {
            position: self.toks[self.pos].0,
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn implication(&mut self) -> Result<Term> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Term::imp(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Term> {
        let mut t = self.conjunction()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            t = Term::join(t, self.conjunction()?);
        }
        Ok(t)
    }

    fn conjunction(&mut self) -> Result<Term> {
        let mut t = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            t = Term::meet(t, self.unary()?);
        }
        Ok(t)
    }

    fn unary(&mut self) -> Result<Term> {
        match self.peek() {
            Tok::Tilde => {
                self.bump();
                Ok(Term::inv(self.unary()?))
            }
            Tok::Bang => {
                self.bump();
                Ok(Term::neg(self.unary()?))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Term> {
        const START: [&str; 6] = ["variable", "`0`", "`1`", "`~`", "`!`", "`(`"];
        match self.peek().clone() {
            Tok::Ident(v) => {
                self.bump();
                Ok(Term::Var(v))
            }
            Tok::Zero => {
                self.bump();
                Ok(Term::Zero)
            }
            Tok::One => {
                self.bump();
                Ok(Term::One)
            }
            Tok::LParen => {
                self.bump();
                let t = self.implication()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.error(&["`)`", "`&`", "`|`", "`->`"]));
                }
                self.bump();
                Ok(t)
            }
            _ => Err(self.error(&START)),
        }
    }
}

pub fn parse_term(src: &str) -> Result<Term> {
    let mut p = Parser { toks: tokenize(src)?, pos: 0 };
    let t = p.implication()?;
    if *p.peek() != Tok::End {
        let found = describe(p.peek());
        let mut err = p.error(&["`&`", "`|`", "`->`", "end of input"]);
        if let Error::Syntax { expected, .. } = &mut err {
            expected.retain(|e| e != found);
        }
        return Err(err);
    }
    Ok(t)
}

pub fn eval_term<A: HiOps + ?Sized>(alg: &A, t: &Term, env: &Environment) -> Result<usize> {
    Ok(match t {
        Term::Var(v) => {
            let x = *env.get(v).ok_or_else(|| Error::UnboundVariable(v.clone()))?;
            if x >= alg.size() {
                return Err(Error::OutOfRange { element: x, size: alg.size() });
            }
            x
        }
        Term::Zero => alg.bottom(),
        Term::One => alg.top(),
        Term::Inv(s) => alg.inv(eval_term(alg, s, env)?),
        Term::Neg(s) => alg.neg(eval_term(alg, s, env)?),
        Term::Meet(l, r) => alg.meet(eval_term(alg, l, env)?, eval_term(alg, r, env)?),
        Term::Join(l, r) => alg.join(eval_term(alg, l, env)?, eval_term(alg, r, env)?),
        Term::Impl(l, r) => alg.imp(eval_term(alg, l, env)?, eval_term(alg, r, env)?),
    })
}

/// Parses `name=index` pairs separated by commas.
pub fn parse_environment(src: &str) -> Result<Environment> {
    let mut env = Environment::new();
    let mut offset = 0;
    for part in src.split(',') {
        let malformed = || Error::Syntax { position: offset, expected: vec!["name=index".into()] };
        let trimmed = part.trim();
        if !trimmed.is_empty() {
            let (name, value) = trimmed.split_once('=').ok_or_else(malformed)?;
            let name = name.trim();
            let valid = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid {
                return Err(malformed());
            }
            let value: usize = value.trim().parse().map_err(|_| malformed())?;
            env.insert(name.to_owned(), value);
        }
        offset += part.len() + 1;
    }
    Ok(env)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IdentityVerdict {
    Holds,
    Counterexample { env: Environment, lhs: usize, rhs: usize },
}

impl IdentityVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, IdentityVerdict::Holds)
    }
}

/// Number of assignments an identity check over `vars` variables visits.
pub fn assignment_count(size: usize, vars: usize) -> u128 {
    (size as u128).saturating_pow(vars as u32)
}

/// Evaluates both sides under every assignment of their free variables.
/// Assignments are visited in lexicographic order over the sorted variable
/// names, so the first counterexample is canonical.
pub fn holds_identity<A: HiOps + ?Sized>(alg: &A, lhs: &Term, rhs: &Term) -> IdentityVerdict {
    let mut vars = lhs.free_vars();
    vars.extend(rhs.free_vars());
    let vars: Vec<String> = vars.into_iter().collect();
    let n = alg.size();
    let mut digits = vec![0usize; vars.len()];
    loop {
        let env: Environment = vars.iter().cloned().zip(digits.iter().copied()).collect();
        let l = eval_term(alg, lhs, &env).expect("environment covers all variables");
        let r = eval_term(alg, rhs, &env).expect("environment covers all variables");
        if l != r {
            return IdentityVerdict::Counterexample { env, lhs: l, rhs: r };
        }
        // increment, last variable fastest
        let mut i = digits.len();
        loop {
            if i == 0 {
                return IdentityVerdict::Holds;
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < n {
                break;
            }
            digits[i] = 0;
        }
    }
}
