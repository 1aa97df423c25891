//! Canonical text form of polynomials: terms in descending graded lex order,
//! `coef*x1^2*x3` with unit coefficients omitted and signs pulled out.

use std::cmp::Ordering;

use crate::exactalg::{Monomial, Polynomial, Scalar};

fn render_monomial(m: &Monomial, names: &[String]) -> String {
    m.exponents()
        .iter()
        .zip(names)
        .filter(|(e, _)| **e > 0)
        .map(|(e, n)| if *e == 1 { n.clone() } else { format!("{n}^{e}") })
        .collect::<Vec<_>>()
        .join("*")
}

/// Sign used when a scalar is printed as a term: sign of the rational part,
/// or of the radical part when the rational part is zero.
fn display_sign(c: &Scalar) -> Ordering {
    match c.rational_part().cmp(&Default::default()) {
        Ordering::Equal => c.radical_part().cmp(&Default::default()),
        o => o,
    }
}

pub fn render_scalar(c: &Scalar) -> String {
    c.to_string()
}

pub fn render_poly(f: &Polynomial) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    let names = f.context().names();
    let mut out = String::new();
    for (i, (m, c)) in f.terms().enumerate() {
        let neg = display_sign(c) == Ordering::Less;
        let mag = if neg { -c } else { c.clone() };
        let body = if m.is_one() {
            mag.to_string()
        } else if mag.is_one() {
            render_monomial(m, names)
        } else {
            format!("{}*{}", mag, render_monomial(m, names))
        };
        match (i, neg) {
            (0, false) => out.push_str(&body),
            (0, true) => {
                out.push('-');
                out.push_str(&body);
            }
            (_, false) => {
                out.push_str(" + ");
                out.push_str(&body);
            }
            (_, true) => {
                out.push_str(" - ");
                out.push_str(&body);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::Context;
    use crate::io::parse_poly;

    #[test]
    fn canonical_strings() {
        let c = Context::new(&["x", "y"]);
        assert_eq!(render_poly(&Polynomial::zero(&c)), "0");
        assert_eq!(render_poly(&parse_poly("-y^2 + x^2", &c, 0).unwrap()), "x^2 - y^2");
        assert_eq!(render_poly(&parse_poly("-(1+rt)*x - 2", &c, 3).unwrap()), "-(1 + rt)*x - 2");
        assert_eq!(render_poly(&parse_poly("-rt*y + x*y/2", &c, 3).unwrap()), "1/2*x*y - rt*y");
    }

    #[test]
    fn graded_lex_on_p_variables() {
        let c = Context::new(&["p1", "p2", "p3", "p4", "p5"]);
        let f = parse_poly("4/3*(p3*p4 + p4^2 + 9*p1*p5)", &c, 3).unwrap();
        assert_eq!(render_poly(&f), "12*p1*p5 + 4/3*p3*p4 + 4/3*p4^2");
    }
}
