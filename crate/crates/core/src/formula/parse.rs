//! Recursive-descent parser for both surface syntaxes.
//!
//! Shared connectives, loosest first: `->` (right associative), `|`, `&`,
//! then prefix `!` and the quantifiers `E x.` / `A x.`, whose bodies extend as
//! far right as possible. Multiplicative atoms are `s = t`, `s <= t`, `s != t`
//! and `P[n](t)`; additive atoms are comparisons between linear terms and
//! `div[d](t)`.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use super::{AdditiveFormula, Formula, LinearTerm, Term};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Dot,
    Star,
    Caret,
    Minus,
    Plus,
    Eq,
    Le,
    Lt,
    Ge,
    Gt,
    Ne,
    And,
    Or,
    Bang,
    Arrow,
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Int(n) => format!("`{n}`"),
        Tok::End => "end of input".to_string(),
        other => format!("{other:?}"),
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        let next = chars.get(i + 1).map(|&(_, c)| c);
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].1.is_ascii_alphanumeric() || chars[j].1 == '_') {
                j += 1;
            }
            let s: String = chars[i..j].iter().map(|&(_, c)| c).collect();
            out.push((Tok::Ident(s), pos));
            i = j;
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].1.is_ascii_digit() {
                j += 1;
            }
            let s: String = chars[i..j].iter().map(|&(_, c)| c).collect();
            out.push((Tok::Int(s.parse().expect("digits")), pos));
            i = j;
            continue;
        }
        let (tok, width) = match (c, next) {
            ('<', Some('=')) => (Tok::Le, 2),
            ('>', Some('=')) => (Tok::Ge, 2),
            ('!', Some('=')) => (Tok::Ne, 2),
            ('-', Some('>')) => (Tok::Arrow, 2),
            ('<', _) => (Tok::Lt, 1),
            ('>', _) => (Tok::Gt, 1),
            ('≤', _) => (Tok::Le, 1),
            ('≠', _) => (Tok::Ne, 1),
            ('!', _) => (Tok::Bang, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('[', _) => (Tok::LBrack, 1),
            (']', _) => (Tok::RBrack, 1),
            ('.', _) => (Tok::Dot, 1),
            ('*', _) => (Tok::Star, 1),
            ('^', _) => (Tok::Caret, 1),
            ('-', _) => (Tok::Minus, 1),
            ('+', _) => (Tok::Plus, 1),
            ('=', _) => (Tok::Eq, 1),
            ('&', _) => (Tok::And, 1),
            ('|', _) => (Tok::Or, 1),
            _ => {
                return Err(Error::UnknownSymbol {
                    pos,
                    symbol: c.to_string(),
                })
            }
        };
        out.push((tok, pos));
        i += width;
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

/// Language-specific pieces of the grammar.
trait Lang {
    type F;
    const RESERVED: &'static [&'static str];
    fn truth(b: bool) -> Self::F;
    fn not(a: Self::F) -> Self::F;
    fn and(a: Self::F, b: Self::F) -> Self::F;
    fn or(a: Self::F, b: Self::F) -> Self::F;
    fn implies(a: Self::F, b: Self::F) -> Self::F;
    fn exists(x: String, a: Self::F) -> Self::F;
    fn forall(x: String, a: Self::F) -> Self::F;
    fn atom(p: &mut Parser) -> Result<Self::F>;
}

struct Mult;
struct Add;

impl Lang for Mult {
    type F = Formula;
    const RESERVED: &'static [&'static str] = &["E", "A", "P", "t", "true", "false"];

    fn truth(b: bool) -> Formula {
        if b {
            Formula::True
        } else {
            Formula::False
        }
    }
    fn not(a: Formula) -> Formula {
        Formula::not(a)
    }
    fn and(a: Formula, b: Formula) -> Formula {
        Formula::and(a, b)
    }
    fn or(a: Formula, b: Formula) -> Formula {
        Formula::or(a, b)
    }
    fn implies(a: Formula, b: Formula) -> Formula {
        Formula::implies(a, b)
    }
    fn exists(x: String, a: Formula) -> Formula {
        Formula::exists(x, a)
    }
    fn forall(x: String, a: Formula) -> Formula {
        Formula::forall(x, a)
    }

    fn atom(p: &mut Parser) -> Result<Formula> {
        if p.peek_ident("P") && p.peek_at(1) == &Tok::LBrack {
            p.bump();
            p.bump();
            let (n, pos) = p.int()?;
            let n = n
                .to_u64()
                .filter(|&n| n >= 2)
                .ok_or_else(|| Error::syntax(pos, "P[n] needs n >= 2"))?;
            p.expect(Tok::RBrack)?;
            p.expect(Tok::LParen)?;
            let t = p.mult_term()?;
            p.expect(Tok::RParen)?;
            return Ok(Formula::Pn(n, t));
        }
        let a = p.mult_term()?;
        let (rel, pos) = p.next();
        let b = p.mult_term()?;
        Ok(match rel {
            Tok::Eq => Formula::Eq(a, b),
            Tok::Le => Formula::Leq(a, b),
            Tok::Ge => Formula::Leq(b, a),
            Tok::Lt => Formula::not(Formula::Leq(b, a)),
            Tok::Gt => Formula::not(Formula::Leq(a, b)),
            Tok::Ne => Formula::not(Formula::Eq(a, b)),
            other => {
                return Err(Error::syntax(
                    pos,
                    format!("expected a relation, found {}", describe(&other)),
                ))
            }
        })
    }
}

impl Lang for Add {
    type F = AdditiveFormula;
    const RESERVED: &'static [&'static str] = &["E", "A", "div", "true", "false"];

    fn truth(b: bool) -> AdditiveFormula {
        if b {
            AdditiveFormula::True
        } else {
            AdditiveFormula::False
        }
    }
    fn not(a: AdditiveFormula) -> AdditiveFormula {
        AdditiveFormula::not(a)
    }
    fn and(a: AdditiveFormula, b: AdditiveFormula) -> AdditiveFormula {
        AdditiveFormula::and(a, b)
    }
    fn or(a: AdditiveFormula, b: AdditiveFormula) -> AdditiveFormula {
        AdditiveFormula::or(a, b)
    }
    fn implies(a: AdditiveFormula, b: AdditiveFormula) -> AdditiveFormula {
        AdditiveFormula::implies(a, b)
    }
    fn exists(x: String, a: AdditiveFormula) -> AdditiveFormula {
        AdditiveFormula::exists(x, a)
    }
    fn forall(x: String, a: AdditiveFormula) -> AdditiveFormula {
        AdditiveFormula::forall(x, a)
    }

    fn atom(p: &mut Parser) -> Result<AdditiveFormula> {
        if p.peek_ident("div") && p.peek_at(1) == &Tok::LBrack {
            p.bump();
            p.bump();
            let (d, pos) = p.int()?;
            if d.is_zero() {
                return Err(Error::syntax(pos, "div[d] needs d >= 1"));
            }
            p.expect(Tok::RBrack)?;
            p.expect(Tok::LParen)?;
            let t = p.linear_sum()?;
            p.expect(Tok::RParen)?;
            return Ok(AdditiveFormula::div(d, t));
        }
        let a = p.linear_sum()?;
        let (rel, pos) = p.next();
        let b = p.linear_sum()?;
        let one = LinearTerm::constant(1);
        Ok(match rel {
            Tok::Eq => AdditiveFormula::Eq(a, b),
            Tok::Le => AdditiveFormula::Leq(a, b),
            Tok::Ge => AdditiveFormula::Leq(b, a),
            Tok::Lt => AdditiveFormula::Leq(a + one, b),
            Tok::Gt => AdditiveFormula::Leq(b + one, a),
            Tok::Ne => AdditiveFormula::not(AdditiveFormula::Eq(a, b)),
            other => {
                return Err(Error::syntax(
                    pos,
                    format!("expected a relation, found {}", describe(&other)),
                ))
            }
        })
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    reserved: &'static [&'static str],
}

impl Parser {
    fn new(src: &str, reserved: &'static [&'static str]) -> Result<Self> {
        Ok(Parser {
            toks: lex(src)?,
            at: 0,
            reserved,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.at + k).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn peek_ident(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == s)
    }

    fn bump(&mut self) {
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
    }

    fn next(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        self.bump();
        t
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        let (t, pos) = self.next();
        if t == want {
            Ok(())
        } else {
            Err(Error::syntax(
                pos,
                format!("expected {}, found {}", describe(&want), describe(&t)),
            ))
        }
    }

    fn int(&mut self) -> Result<(BigInt, usize)> {
        match self.next() {
            (Tok::Int(n), pos) => Ok((n, pos)),
            (t, pos) => Err(Error::syntax(pos, format!("expected an integer, found {}", describe(&t)))),
        }
    }

    fn variable(&mut self) -> Result<String> {
        match self.next() {
            (Tok::Ident(x), pos) => {
                if self.reserved.contains(&x.as_str()) {
                    Err(Error::syntax(pos, format!("`{x}` is reserved")))
                } else {
                    Ok(x)
                }
            }
            (t, pos) => Err(Error::syntax(pos, format!("expected a variable, found {}", describe(&t)))),
        }
    }

    fn finish(&self) -> Result<()> {
        match self.peek() {
            Tok::End => Ok(()),
            t => Err(Error::syntax(self.pos(), format!("unexpected {}", describe(t)))),
        }
    }

    fn formula<L: Lang>(&mut self) -> Result<L::F> {
        let lhs = self.disjunction::<L>()?;
        if self.peek() == &Tok::Arrow {
            self.bump();
            let rhs = self.formula::<L>()?;
            return Ok(L::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction<L: Lang>(&mut self) -> Result<L::F> {
        let mut acc = self.conjunction::<L>()?;
        while self.peek() == &Tok::Or {
            self.bump();
            let rhs = self.conjunction::<L>()?;
            acc = L::or(acc, rhs);
        }
        Ok(acc)
    }

    fn conjunction<L: Lang>(&mut self) -> Result<L::F> {
        let mut acc = self.unary::<L>()?;
        while self.peek() == &Tok::And {
            self.bump();
            let rhs = self.unary::<L>()?;
            acc = L::and(acc, rhs);
        }
        Ok(acc)
    }

    fn unary<L: Lang>(&mut self) -> Result<L::F> {
        if self.peek() == &Tok::Bang {
            self.bump();
            return Ok(L::not(self.unary::<L>()?));
        }
        if (self.peek_ident("E") || self.peek_ident("A")) && matches!(self.peek_at(1), Tok::Ident(_)) {
            let universal = self.peek_ident("A");
            self.bump();
            let x = self.variable()?;
            self.expect(Tok::Dot)?;
            let body = self.formula::<L>()?;
            return Ok(if universal { L::forall(x, body) } else { L::exists(x, body) });
        }
        if self.peek_ident("true") {
            self.bump();
            return Ok(L::truth(true));
        }
        if self.peek_ident("false") {
            self.bump();
            return Ok(L::truth(false));
        }
        if self.peek() == &Tok::LParen {
            // Either a parenthesised formula or an atom whose first term is parenthesised.
            let save = self.at;
            self.bump();
            let grouped = self.formula::<L>().and_then(|f| {
                self.expect(Tok::RParen)?;
                Ok(f)
            });
            match grouped {
                Ok(f) if !self.at_relation() => return Ok(f),
                Ok(_) => self.at = save,
                Err(e1) => {
                    self.at = save;
                    return L::atom(self).map_err(|e2| furthest(e1, e2));
                }
            }
        }
        L::atom(self)
    }

    fn at_relation(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Eq | Tok::Le | Tok::Lt | Tok::Ge | Tok::Gt | Tok::Ne | Tok::Star | Tok::Caret | Tok::Plus | Tok::Minus
        )
    }

    fn mult_term(&mut self) -> Result<Term> {
        let mut acc = self.mult_factor()?;
        while self.peek() == &Tok::Star {
            self.bump();
            let rhs = self.mult_factor()?;
            acc = Term::mul(acc, rhs);
        }
        Ok(acc)
    }

    fn mult_factor(&mut self) -> Result<Term> {
        let mut base = self.mult_base()?;
        while self.peek() == &Tok::Caret {
            self.bump();
            let negative = if self.peek() == &Tok::Minus {
                self.bump();
                true
            } else {
                false
            };
            let (k, pos) = self.int()?;
            let k = k
                .to_i64()
                .ok_or_else(|| Error::syntax(pos, "exponent out of range"))?;
            base = Term::pow(base, if negative { -k } else { k });
        }
        Ok(base)
    }

    fn mult_base(&mut self) -> Result<Term> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(x) if x == "t" => {
                self.bump();
                Ok(Term::Tau)
            }
            Tok::Ident(_) => Ok(Term::Var(self.variable()?)),
            Tok::Int(n) => {
                if n.is_one() {
                    self.bump();
                    Ok(Term::One)
                } else {
                    Err(Error::UnknownSymbol {
                        pos,
                        symbol: n.to_string(),
                    })
                }
            }
            Tok::LParen => {
                self.bump();
                let t = self.mult_term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            t => Err(Error::syntax(pos, format!("expected a term, found {}", describe(&t)))),
        }
    }

    fn linear_sum(&mut self) -> Result<LinearTerm> {
        let mut acc = self.linear_product()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = acc + self.linear_product()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = acc - self.linear_product()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn linear_product(&mut self) -> Result<LinearTerm> {
        let mut acc = self.linear_unary()?;
        while self.peek() == &Tok::Star {
            let pos = self.pos();
            self.bump();
            let rhs = self.linear_unary()?;
            acc = if acc.is_constant() {
                rhs.scale(acc.constant_part())
            } else if rhs.is_constant() {
                acc.scale(rhs.constant_part())
            } else {
                return Err(Error::syntax(pos, "product of two non-constant terms is not linear"));
            };
        }
        Ok(acc)
    }

    fn linear_unary(&mut self) -> Result<LinearTerm> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Minus => {
                self.bump();
                Ok(-self.linear_unary()?)
            }
            Tok::Int(n) => {
                self.bump();
                Ok(LinearTerm::constant(n))
            }
            Tok::Ident(_) => Ok(LinearTerm::var(self.variable()?)),
            Tok::LParen => {
                self.bump();
                let t = self.linear_sum()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            t => Err(Error::syntax(pos, format!("expected a term, found {}", describe(&t)))),
        }
    }
}

fn furthest(a: Error, b: Error) -> Error {
    let pos = |e: &Error| match e {
        Error::Syntax { pos, .. } | Error::UnknownSymbol { pos, .. } => *pos,
        _ => 0,
    };
    if pos(&a) > pos(&b) {
        a
    } else {
        b
    }
}

/// Parses a formula of the multiplicative language.
pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut p = Parser::new(text, Mult::RESERVED)?;
    let f = p.formula::<Mult>()?;
    p.finish()?;
    Ok(f)
}

pub fn parse_term(text: &str) -> Result<Term> {
    let mut p = Parser::new(text, Mult::RESERVED)?;
    let t = p.mult_term()?;
    p.finish()?;
    Ok(t)
}

/// Parses the additive surface syntax (`x + 2*y <= 3`, `div[2](x)`, ...).
pub fn parse_additive(text: &str) -> Result<AdditiveFormula> {
    let mut p = Parser::new(text, Add::RESERVED)?;
    let f = p.formula::<Add>()?;
    p.finish()?;
    Ok(f)
}

pub fn parse_linear_term(text: &str) -> Result<LinearTerm> {
    let mut p = Parser::new(text, Add::RESERVED)?;
    let t = p.linear_sum()?;
    p.finish()?;
    Ok(t)
}
