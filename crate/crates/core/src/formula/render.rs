use std::fmt::{self, Display, Formatter, Write};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{AdditiveFormula, Formula, LinearTerm, Term};

impl Display for Term {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_term(f, self, 0)
    }
}

// 0: product position, 1: operand of `*` on the right, 2: base of a postfix `^`.
fn write_term(out: &mut Formatter<'_>, t: &Term, ctx: u8) -> fmt::Result {
    match t {
        Term::Var(x) => out.write_str(x),
        Term::One => out.write_str("1"),
        Term::Tau => out.write_str("t"),
        Term::Mul(a, b) => {
            let paren = ctx >= 1;
            if paren {
                out.write_char('(')?;
            }
            write_term(out, a, 0)?;
            out.write_str(" * ")?;
            write_term(out, b, 1)?;
            if paren {
                out.write_char(')')?;
            }
            Ok(())
        }
        Term::Inv(a) => {
            write_term(out, a, 2)?;
            out.write_str("^-1")
        }
        Term::Pow(a, k) => {
            write_term(out, a, 2)?;
            write!(out, "^{k}")
        }
    }
}

fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Implies(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        Formula::Not(..) | Formula::Exists(..) | Formula::Forall(..) => 4,
        _ => 5,
    }
}

fn is_quantifier(f: &Formula) -> bool {
    matches!(f, Formula::Exists(..) | Formula::Forall(..))
}

impl Display for Formula {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_formula(f, self)
    }
}

fn write_child(out: &mut Formatter<'_>, f: &Formula, paren: bool) -> fmt::Result {
    if paren || is_quantifier(f) {
        out.write_char('(')?;
        write_formula(out, f)?;
        out.write_char(')')
    } else {
        write_formula(out, f)
    }
}

fn write_formula(out: &mut Formatter<'_>, f: &Formula) -> fmt::Result {
    match f {
        Formula::True => out.write_str("true"),
        Formula::False => out.write_str("false"),
        Formula::Eq(a, b) => write!(out, "{a} = {b}"),
        Formula::Leq(a, b) => write!(out, "{a} <= {b}"),
        Formula::Pn(n, t) => write!(out, "P[{n}]({t})"),
        Formula::Not(a) => {
            out.write_char('!')?;
            let bare = matches!(**a, Formula::Not(_) | Formula::Pn(..) | Formula::True | Formula::False);
            write_child(out, a, !bare)
        }
        Formula::And(a, b) => {
            write_child(out, a, precedence(a) < 3)?;
            out.write_str(" & ")?;
            write_child(out, b, precedence(b) <= 3)
        }
        Formula::Or(a, b) => {
            write_child(out, a, precedence(a) < 2)?;
            out.write_str(" | ")?;
            write_child(out, b, precedence(b) <= 2)
        }
        Formula::Implies(a, b) => {
            write_child(out, a, precedence(a) <= 1)?;
            out.write_str(" -> ")?;
            write_child(out, b, false)
        }
        Formula::Exists(x, a) => write!(out, "E {x}. {a}"),
        Formula::Forall(x, a) => write!(out, "A {x}. {a}"),
    }
}

impl Display for LinearTerm {
    fn fmt(&self, out: &mut Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut piece = |out: &mut Formatter<'_>, c: &BigInt, var: Option<&str>| -> fmt::Result {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    out.write_char('-')?;
                }
            } else {
                out.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            match var {
                Some(x) if mag.is_one() => out.write_str(x),
                Some(x) => write!(out, "{mag}*{x}"),
                None => write!(out, "{mag}"),
            }
        };
        for (x, c) in self.coeffs() {
            piece(out, c, Some(x))?;
        }
        let k = self.constant_part();
        if !k.is_zero() || self.is_constant() {
            piece(out, k, None)?;
        }
        Ok(())
    }
}

fn add_precedence(f: &AdditiveFormula) -> u8 {
    match f {
        AdditiveFormula::Implies(..) => 1,
        AdditiveFormula::Or(..) => 2,
        AdditiveFormula::And(..) => 3,
        AdditiveFormula::Not(..) | AdditiveFormula::Exists(..) | AdditiveFormula::Forall(..) => 4,
        _ => 5,
    }
}

fn write_add_child(out: &mut Formatter<'_>, f: &AdditiveFormula, paren: bool) -> fmt::Result {
    let quant = matches!(f, AdditiveFormula::Exists(..) | AdditiveFormula::Forall(..));
    if paren || quant {
        write!(out, "({f})")
    } else {
        write!(out, "{f}")
    }
}

impl Display for AdditiveFormula {
    fn fmt(&self, out: &mut Formatter<'_>) -> fmt::Result {
        match self {
            AdditiveFormula::True => out.write_str("true"),
            AdditiveFormula::False => out.write_str("false"),
            AdditiveFormula::Leq(a, b) => write!(out, "{a} <= {b}"),
            AdditiveFormula::Eq(a, b) => write!(out, "{a} = {b}"),
            AdditiveFormula::Div(d, t) => write!(out, "div[{d}]({t})"),
            AdditiveFormula::Not(a) => {
                out.write_char('!')?;
                let bare = matches!(
                    **a,
                    AdditiveFormula::Not(_) | AdditiveFormula::Div(..) | AdditiveFormula::True | AdditiveFormula::False
                );
                write_add_child(out, a, !bare)
            }
            AdditiveFormula::And(a, b) => {
                write_add_child(out, a, add_precedence(a) < 3)?;
                out.write_str(" & ")?;
                write_add_child(out, b, add_precedence(b) <= 3)
            }
            AdditiveFormula::Or(a, b) => {
                write_add_child(out, a, add_precedence(a) < 2)?;
                out.write_str(" | ")?;
                write_add_child(out, b, add_precedence(b) <= 2)
            }
            AdditiveFormula::Implies(a, b) => {
                write_add_child(out, a, add_precedence(a) <= 1)?;
                out.write_str(" -> ")?;
                write_add_child(out, b, false)
            }
            AdditiveFormula::Exists(x, a) => write!(out, "E {x}. {a}"),
            AdditiveFormula::Forall(x, a) => write!(out, "A {x}. {a}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::*;

    #[test]
    fn render_examples() {
        assert_eq!(Formula::Eq(Term::One, Term::One).to_string(), "1 = 1");
        assert_eq!(
            Formula::exists("x", Formula::Leq(Term::var("x"), Term::Tau)).to_string(),
            "E x. x <= t"
        );
        assert_eq!(
            Formula::and(
                Formula::exists("x", Formula::True),
                Formula::Eq(Term::var("y"), Term::One)
            )
            .to_string(),
            "(E x. true) & y = 1"
        );
    }

    #[test]
    fn linear_rendering() {
        let t = parse_linear_term("3 - x + 2*y").unwrap();
        assert_eq!(t.to_string(), "-x + 2*y + 3");
        assert_eq!(LinearTerm::zero().to_string(), "0");
        assert_eq!(
            AdditiveFormula::Div(2.into(), LinearTerm::var("x")).to_string(),
            "div[2](x)"
        );
    }
}
