use std::fmt::{self, Write};

use super::Formula;

const IMPLIES: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNARY: u8 = 4;

/// Operands of `¬(¬a ∧ ¬b)`, printed back as `a | b`.
fn as_or(f: &Formula) -> Option<(&Formula, &Formula)> {
    if let Formula::Not(inner) = f {
        if let Formula::And(l, r) = inner.as_ref() {
            if let (Formula::Not(a), Formula::Not(b)) = (l.as_ref(), r.as_ref()) {
                return Some((a, b));
            }
        }
    }
    None
}

fn precedence(f: &Formula) -> u8 {
    if as_or(f).is_some() {
        return OR;
    }
    match f {
        Formula::Implies(..) => IMPLIES,
        Formula::And(..) => AND,
        _ => UNARY,
    }
}

fn write_at(out: &mut String, f: &Formula, min: u8) {
    if precedence(f) < min {
        out.push('(');
        write_node(out, f);
        out.push(')');
    } else {
        write_node(out, f);
    }
}

fn write_prefix(out: &mut String, prefix: &str, body: &Formula) {
    out.push_str(prefix);
    let mut inner = String::new();
    write_at(&mut inner, body, UNARY);
    if !inner.starts_with('(') {
        out.push(' ');
    }
    out.push_str(&inner);
}

fn write_node(out: &mut String, f: &Formula) {
    if let Some((a, b)) = as_or(f) {
        write_at(out, a, OR);
        out.push_str(" | ");
        write_at(out, b, AND);
        return;
    }
    match f {
        Formula::Atom(p) => out.push_str(p),
        Formula::Not(a) => {
            out.push('~');
            write_at(out, a, UNARY);
        }
        Formula::And(a, b) => {
            write_at(out, a, AND);
            out.push_str(" & ");
            write_at(out, b, UNARY);
        }
        Formula::Implies(a, b) => {
            write_at(out, a, OR);
            out.push_str(" -> ");
            write_at(out, b, IMPLIES);
        }
        Formula::K(i, a) => write_prefix(out, &format!("K[{i}]"), a),
        Formula::Kw(i, a) => write_prefix(out, &format!("Kw[{i}]"), a),
        Formula::E(a) => write_prefix(out, "E", a),
        Formula::C(a) => write_prefix(out, "C", a),
        Formula::Cw(a) => write_prefix(out, "Cw", a),
        Formula::Derived(op, a) => write_prefix(out, op.keyword(), a),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        write_node(&mut out, self);
        f.write_str(&out)
    }
}

impl Formula {
    /// Concrete syntax accepted back by the parser.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{self}");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse_unchecked, Agent, DerivedOp};
    use super::*;

    fn p() -> Formula {
        Formula::atom("p")
    }

    fn q() -> Formula {
        Formula::atom("q")
    }

    #[test]
    fn basic_shapes() {
        let a = Agent::new("a").unwrap();
        assert_eq!(Formula::kw(a.clone(), p()).render(), "Kw[a] p");
        assert_eq!(Formula::not(p()).render(), "~p");
        assert_eq!(Formula::derived(DerivedOp::Cw5, p()).render(), "Cw5 p");
        assert_eq!(
            Formula::kw(a, Formula::implies(p(), q())).render(),
            "Kw[a](p -> q)"
        );
    }

    #[test]
    fn disjunction_is_resugared() {
        let f = Formula::or(Formula::c(p()), Formula::c(Formula::not(p())));
        assert_eq!(f.render(), "C p | C ~p");
        assert_eq!(Formula::not(f.clone()).render(), "~(C p | C ~p)");
    }

    #[test]
    fn associativity_is_respected() {
        let r = Formula::atom("r");
        let left = Formula::and(Formula::and(p(), q()), r.clone());
        let right = Formula::and(p(), Formula::and(q(), r.clone()));
        assert_eq!(left.render(), "p & q & r");
        assert_eq!(right.render(), "p & (q & r)");
        let imp = Formula::implies(Formula::implies(p(), q()), r);
        assert_eq!(imp.render(), "(p -> q) -> r");
    }

    #[test]
    fn round_trips_on_samples() {
        for text in [
            "Kw[a](p -> q) & ~C p",
            "p | q & r -> p <-> q",
            "~~p",
            "Cw21 Cw(p | ~q)",
            "K[b] E ~Kw[a] p -> Cw4 q",
            "(p -> q) -> r | s",
            "~(p | q) & (r | s)",
        ] {
            let f = parse_unchecked(text).unwrap();
            assert_eq!(parse_unchecked(&f.render()).unwrap(), f, "{text}");
        }
    }
}
