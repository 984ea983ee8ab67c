//! Expression printing.
//!
//! Output is plain ASCII math that the parser accepts back. For a
//! normalized expression the round trip is exact:
//! `parse(&print(&n), syms)` equals `n`. Printing an unnormalized tree
//! shows its raw structure and reparses to its normal form, except in
//! degenerate corners where a denominator factor hides a zero (such as
//! `log(1)`): zero-base powers normalize asymmetrically in the exponent
//! sign, so no raw rendering can round trip those. Products with
//! negative constant exponents print as fractions, and complex literals
//! are always parenthesized.

use super::{Expr, ExprRef, Q};
use num::{One, Signed, Zero};

/// Renders an expression to parseable text.
pub fn print(e: &ExprRef) -> String {
    print_node(e)
}

pub(super) fn print_node(e: &Expr) -> String {
    render(e, Prec::Sum)
}

/// Context precedence: how tightly the surrounding syntax binds.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Sum,
    Prod,
    PowBase,
}

/// A rendered subexpression: its text, how loosely its own top-level
/// operator binds, and whether it starts with a unary minus.
struct Rendered {
    text: String,
    level: Prec,
    leading_minus: bool,
    atom: bool,
}

impl Rendered {
    fn atom(text: String) -> Self {
        Rendered { text, level: Prec::PowBase, leading_minus: false, atom: true }
    }
}

fn render(e: &Expr, prec: Prec) -> String {
    let r = render_free(e);
    let needs_parens = (!r.atom && r.level < prec)
        || (r.leading_minus && prec > Prec::Sum);
    if needs_parens {
        format!("({})", r.text)
    } else {
        r.text
    }
}

fn render_free(e: &Expr) -> Rendered {
    match e {
        Expr::Rat(q) => render_rat(q),
        Expr::Cplx(re, im) => render_cplx(re, im),
        Expr::Var(name) | Expr::Param(name) => Rendered::atom(name.clone()),
        Expr::Exp(arg) => Rendered::atom(format!("exp({})", render(arg, Prec::Sum))),
        Expr::Log(arg) => Rendered::atom(format!("log({})", render(arg, Prec::Sum))),
        // A power binds tighter than '*' but must still parenthesize as
        // the base of another power, so it reports product level.
        Expr::Pow(base, exponent) => Rendered {
            text: format!(
                "{}^{}",
                render(base, Prec::PowBase),
                render_exponent(exponent)
            ),
            level: Prec::Prod,
            leading_minus: false,
            atom: false,
        },
        Expr::Sum(terms) => render_sum(terms),
        Expr::Prod(factors) => render_prod(factors),
    }
}

fn render_rat(q: &Q) -> Rendered {
    if q.is_integer() {
        Rendered {
            text: q.numer().to_string(),
            level: Prec::PowBase,
            leading_minus: q.is_negative(),
            atom: !q.is_negative(),
        }
    } else {
        Rendered {
            text: format!("{}/{}", q.numer(), q.denom()),
            level: Prec::Prod,
            leading_minus: q.is_negative(),
            atom: false,
        }
    }
}

fn render_cplx(re: &Q, im: &Q) -> Rendered {
    if re.is_zero() && im.is_one() {
        return Rendered::atom("i".to_owned());
    }
    let im_text = |v: &Q| -> String {
        if v.is_one() {
            "i".to_owned()
        } else {
            format!("{}*i", render_rat(v).text)
        }
    };
    let text = if re.is_zero() {
        if im.is_negative() {
            format!("(-{})", im_text(&-im.clone()))
        } else {
            format!("({})", im_text(im))
        }
    } else if im.is_negative() {
        format!("({} - {})", render_rat(re).text, im_text(&-im.clone()))
    } else {
        format!("({} + {})", render_rat(re).text, im_text(im))
    };
    Rendered::atom(text)
}

fn render_exponent(exponent: &ExprRef) -> String {
    if let Some(n) = exponent.as_integer() {
        if n >= 0 {
            return n.to_string();
        }
    }
    format!("({})", render(exponent, Prec::Sum))
}

fn render_sum(terms: &[ExprRef]) -> Rendered {
    let mut text = String::new();
    for (k, term) in terms.iter().enumerate() {
        if k == 0 {
            text.push_str(&render(term, Prec::Sum));
            continue;
        }
        match strip_leading_minus(term) {
            Some(positive) => {
                text.push_str(" - ");
                text.push_str(&render(&positive, Prec::Prod));
            }
            None => {
                text.push_str(" + ");
                text.push_str(&render(term, Prec::Prod));
            }
        }
    }
    Rendered {
        leading_minus: text.starts_with('-'),
        text,
        level: Prec::Sum,
        atom: false,
    }
}

/// If the term is a rational constant or a product with a negative
/// rational coefficient, returns the negated term so a sum can print it
/// after " - ".
fn strip_leading_minus(term: &ExprRef) -> Option<Expr> {
    match &**term {
        Expr::Rat(q) if q.is_negative() => Some(Expr::Rat(-q.clone())),
        Expr::Prod(factors) => match &*factors[0] {
            Expr::Rat(q) if q.is_negative() => {
                let negated = -q.clone();
                let mut out: Vec<ExprRef> = Vec::with_capacity(factors.len());
                if !negated.is_one() || factors.len() == 1 {
                    out.push(Expr::from_q(negated));
                }
                out.extend(factors.iter().skip(1).cloned());
                match out.len() {
                    1 => {
                        let only = out.into_iter().next().unwrap();
                        Some((*only).clone())
                    }
                    _ => Some(Expr::Prod(out)),
                }
            }
            _ => None,
        },
        _ => None,
    }
}

fn render_prod(factors: &[ExprRef]) -> Rendered {
    let mut coeff = Q::one();
    let mut numerator: Vec<String> = Vec::new();
    let mut denominator: Vec<String> = Vec::new();

    for factor in factors {
        match &**factor {
            Expr::Rat(q) => coeff *= q,
            Expr::Pow(base, exponent) => {
                if let Expr::Rat(x) = &**exponent {
                    // A zero base stays in exponent form: 0^q folds to 0
                    // only for positive real q, so 1/0^(-q) would not
                    // parse back to the same normal form.
                    if x.is_negative() && !base.is_zero() {
                        let flipped = -x.clone();
                        if flipped.is_one() {
                            denominator.push(render(base, Prec::PowBase));
                        } else {
                            denominator.push(format!(
                                "{}^{}",
                                render(base, Prec::PowBase),
                                render_exponent(&Expr::from_q(flipped))
                            ));
                        }
                        continue;
                    }
                }
                numerator.push(render(factor, Prec::Prod));
            }
            _ => numerator.push(render(factor, Prec::Prod)),
        }
    }

    let negative = coeff.is_negative();
    let magnitude = if negative { -coeff.clone() } else { coeff.clone() };
    if !magnitude.numer().is_one() || numerator.is_empty() {
        numerator.insert(0, magnitude.numer().to_string());
    }
    if !magnitude.denom().is_one() {
        denominator.insert(0, magnitude.denom().to_string());
    }

    let mut text = String::new();
    if negative {
        text.push('-');
    }
    text.push_str(&numerator.join("*"));
    if !denominator.is_empty() {
        text.push('/');
        if denominator.len() == 1 && !denominator[0].contains('*') {
            text.push_str(&denominator[0]);
        } else {
            text.push('(');
            text.push_str(&denominator.join("*"));
            text.push(')');
        }
    }
    Rendered { text, level: Prec::Prod, leading_minus: negative, atom: false }
}
