use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};

/// A term of the sentence language.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Int(BigInt),
    /// `x<index>` as written in the source.
    Var(u32),
    Neg(Box<Term>),
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    Exp(Box<Term>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Eq,
    Ne,
}

/// 1-based source position.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub lhs: Term,
    pub relation: Relation,
    pub rhs: Term,
    pub position: Position,
}

/// A parsed sentence: a disjunction of conjunctions of atoms, with every
/// variable implicitly existentially quantified.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SentenceAst {
    /// Distinct variable indices in increasing order.
    pub variables: Vec<u32>,
    pub clauses: Vec<Vec<Atom>>,
}

impl SentenceAst {
    /// The sentence without source positions, for structural comparison.
    pub fn shape(&self) -> Vec<Vec<(Term, Relation, Term)>> {
        self.clauses
            .iter()
            .map(|c| {
                c.iter()
                    .map(|a| (a.lhs.clone(), a.relation, a.rhs.clone()))
                    .collect()
            })
            .collect()
    }
}

impl Term {
    fn collect_vars(&self, out: &mut Vec<u32>) {
        match self {
            Term::Int(_) => {}
            Term::Var(i) => out.push(*i),
            Term::Neg(t) | Term::Exp(t) => t.collect_vars(out),
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    fn write_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        let own = match self {
            Term::Add(..) | Term::Sub(..) => 1,
            Term::Mul(..) => 2,
            _ => 3,
        };
        if own < prec {
            write!(f, "(")?;
        }
        match self {
            Term::Int(v) => write!(f, "{v}")?,
            Term::Var(i) => write!(f, "x{i}")?,
            Term::Neg(t) => {
                write!(f, "-")?;
                t.write_prec(f, 3)?;
            }
            Term::Exp(t) => {
                write!(f, "E(")?;
                t.write_prec(f, 0)?;
                write!(f, ")")?;
            }
            Term::Add(a, b) | Term::Sub(a, b) => {
                a.write_prec(f, 1)?;
                write!(f, " {} ", if matches!(self, Term::Add(..)) { '+' } else { '-' })?;
                b.write_prec(f, 2)?;
            }
            Term::Mul(a, b) => {
                a.write_prec(f, 2)?;
                write!(f, " * ")?;
                b.write_prec(f, 3)?;
            }
        }
        if own < prec {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_prec(f, 0)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = match self.relation {
            Relation::Eq => "=",
            Relation::Ne => "!=",
        };
        write!(f, "{} {rel} {}", self.lhs, self.rhs)
    }
}

impl fmt::Display for SentenceAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, clause) in self.clauses.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            for (j, atom) in clause.iter().enumerate() {
                if j > 0 {
                    write!(f, " & ")?;
                }
                write!(f, "{atom}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Var(u32),
    Exp,
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    Eq,
    Ne,
    And,
    Or,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(v) => write!(f, "`{v}`"),
            Tok::Var(i) => write!(f, "`x{i}`"),
            Tok::Exp => write!(f, "`E`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::Star => write!(f, "`*`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::Eq => write!(f, "`=`"),
            Tok::Ne => write!(f, "`!=`"),
            Tok::And => write!(f, "`&`"),
            Tok::Or => write!(f, "`|`"),
            Tok::End => write!(f, "end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Position)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let pos = Position { line, column: col };
        let syntax = |message: String| Error::Syntax {
            line,
            column: col,
            message,
        };
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((Tok::Int(s.parse().expect("digits")), pos));
            col += i - start;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            let tok = if word == "E" {
                Tok::Exp
            } else if let Some(idx) = word
                .strip_prefix('x')
                .filter(|d| !d.is_empty() && d.chars().all(|c| c.is_ascii_digit()))
                .and_then(|d| d.parse::<u32>().ok())
            {
                Tok::Var(idx)
            } else {
                return Err(Error::UnknownIdentifier {
                    name: word,
                    line,
                    column: col,
                });
            };
            out.push((tok, pos));
            col += i - start;
            continue;
        }
        let (tok, len) = match c {
            '+' => (Tok::Plus, 1),
            '-' => (Tok::Minus, 1),
            '*' => (Tok::Star, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '=' => (Tok::Eq, 1),
            '&' => (Tok::And, 1),
            '|' => (Tok::Or, 1),
            '!' if chars.get(i + 1) == Some(&'=') => (Tok::Ne, 2),
            _ => return Err(syntax(format!("unexpected character `{c}`"))),
        };
        out.push((tok, pos));
        i += len;
        col += len;
    }
    out.push((Tok::End, Position { line, column: col }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Position)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Position {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> Error {
        let p = self.pos();
        Error::Syntax {
            line: p.line,
            column: p.column,
            message: format!("expected {expected}, found {}", self.peek()),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(what))
        }
    }

    fn sentence(&mut self) -> Result<Vec<Vec<Atom>>> {
        let mut clauses = vec![self.clause()?];
        while *self.peek() == Tok::Or {
            self.bump();
            clauses.push(self.clause()?);
        }
        if *self.peek() != Tok::End {
            return Err(self.error("`&`, `|` or end of input"));
        }
        Ok(clauses)
    }

    fn clause(&mut self) -> Result<Vec<Atom>> {
        let mut atoms = vec![self.atom()?];
        while *self.peek() == Tok::And {
            self.bump();
            atoms.push(self.atom()?);
        }
        Ok(atoms)
    }

    fn atom(&mut self) -> Result<Atom> {
        let position = self.pos();
        let lhs = self.sum()?;
        let relation = match self.peek() {
            Tok::Eq => Relation::Eq,
            Tok::Ne => Relation::Ne,
            _ => return Err(self.error("`=` or `!=`")),
        };
        self.bump();
        let rhs = self.sum()?;
        Ok(Atom {
            lhs,
            relation,
            rhs,
            position,
        })
    }

    fn sum(&mut self) -> Result<Term> {
        let mut acc = self.prod()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = Term::Add(Box::new(acc), Box::new(self.prod()?));
                }
                Tok::Minus => {
                    self.bump();
                    acc = Term::Sub(Box::new(acc), Box::new(self.prod()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn prod(&mut self) -> Result<Term> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::Star {
            self.bump();
            acc = Term::Mul(Box::new(acc), Box::new(self.unary()?));
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Term> {
        match self.peek().clone() {
            Tok::Minus => {
                self.bump();
                Ok(Term::Neg(Box::new(self.unary()?)))
            }
            Tok::Exp => {
                self.bump();
                self.expect(Tok::LParen, "`(` after `E`")?;
                let t = self.sum()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Term::Exp(Box::new(t)))
            }
            Tok::Int(v) => {
                self.bump();
                Ok(Term::Int(v))
            }
            Tok::Var(i) => {
                self.bump();
                Ok(Term::Var(i))
            }
            Tok::LParen => {
                self.bump();
                let t = self.sum()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            _ => Err(self.error("a term")),
        }
    }
}

/// Parses a sentence of the form `clause ('|' clause)*`, each clause a
/// conjunction of `term = term` or `term != term` atoms.
pub fn parse(text: &str) -> Result<SentenceAst> {
    let mut parser = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let clauses = parser.sentence()?;
    let mut variables = Vec::new();
    for atom in clauses.iter().flatten() {
        atom.lhs.collect_vars(&mut variables);
        atom.rhs.collect_vars(&mut variables);
    }
    variables.sort_unstable();
    variables.dedup();
    Ok(SentenceAst { variables, clauses })
}

/// Parses a single term, e.g. `x1 * E(x2) - 3`.
pub fn parse_term(text: &str) -> Result<Term> {
    let mut parser = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let t = parser.sum()?;
    if *parser.peek() != Tok::End {
        return Err(parser.error("an operator or end of input"));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        let ast = parse("E(x1) = 1").unwrap();
        assert_eq!(ast.variables, vec![1]);
        assert_eq!(
            ast.shape(),
            vec![vec![(
                Term::Exp(Box::new(Term::Var(1))),
                Relation::Eq,
                Term::Int(1.into())
            )]]
        );
        let ast = parse("x1*x1 - 6 = 0 & x1 != 1").unwrap();
        assert_eq!(ast.clauses.len(), 1);
        assert_eq!(ast.clauses[0].len(), 2);
        assert_eq!(ast.clauses[0][1].relation, Relation::Ne);
        assert_eq!(ast.clauses[0][1].position, Position { line: 1, column: 17 });
    }

    #[test]
    fn syntax_error_position() {
        match parse("x1 + = 2") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (1, 6)),
            other => panic!("{other:?}"),
        }
        match parse("x1 = 0 &\n  y2 = 1") {
            Err(Error::UnknownIdentifier { name, line, column }) => {
                assert_eq!((name.as_str(), line, column), ("y2", 2, 3))
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("x1 = "), Err(Error::Syntax { .. })));
        assert!(matches!(parse("x1 = 1 x2"), Err(Error::Syntax { .. })));
        assert!(parse_term("x1 * E(x2) - 3").is_ok());
        assert!(parse_term("x1 = 3").is_err());
    }

    #[test]
    fn printing_round_trips() {
        for s in [
            "x1 - (x2 - x3) = -(-x1) * E(x2 + 1)",
            "E(E(x1)) != 0 | x1 * (x2 * x3) = 2 & x1 = x1 - x2 - x3",
        ] {
            let a = parse(s).unwrap();
            let b = parse(&a.to_string()).unwrap();
            assert_eq!(a.shape(), b.shape());
        }
    }
}
