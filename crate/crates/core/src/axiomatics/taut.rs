use std::collections::HashMap;

use crate::formula::Formula;

/// Largest number of opaque subformulas a tautology check will enumerate.
pub const MAX_OPAQUE: usize = 22;

/// Whether `f` is a propositional tautology when every subformula whose top
/// node is not `Not`, `And` or `Implies` is read as an atom. `None` when
/// there are more than [`MAX_OPAQUE`] such atoms.
pub fn is_tautology(f: &Formula) -> Option<bool> {
    let mut atoms: HashMap<&Formula, usize> = HashMap::new();
    collect(f, &mut atoms);
    let n = atoms.len();
    if n > MAX_OPAQUE {
        return None;
    }
    Some((0u32..1 << n).all(|v| eval(f, &atoms, v)))
}

fn collect<'a>(f: &'a Formula, atoms: &mut HashMap<&'a Formula, usize>) {
    match f {
        Formula::Not(a) => collect(a, atoms),
        Formula::And(a, b) | Formula::Implies(a, b) => {
            collect(a, atoms);
            collect(b, atoms);
        }
        _ => {
            let next = atoms.len();
            atoms.entry(f).or_insert(next);
        }
    }
}

fn eval(f: &Formula, atoms: &HashMap<&Formula, usize>, v: u32) -> bool {
    match f {
        Formula::Not(a) => !eval(a, atoms, v),
        Formula::And(a, b) => eval(a, atoms, v) && eval(b, atoms, v),
        Formula::Implies(a, b) => !eval(a, atoms, v) || eval(b, atoms, v),
        _ => v >> atoms[f] & 1 == 1,
    }
}
