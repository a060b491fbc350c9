/// A proof shipped with the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BundledProof {
    pub name: &'static str,
    pub json: &'static str,
}

/// A corrupted copy of a sample proof with the line that must be rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MutatedProof {
    pub name: &'static str,
    pub json: &'static str,
    pub failing_line: usize,
}

macro_rules! sample {
    ($name:literal) => {
        BundledProof {
            name: $name,
            json: include_str!(concat!("../../proofs/samples/", $name, ".json")),
        }
    };
}

macro_rules! mutant {
    ($name:literal, $line:expr) => {
        MutatedProof {
            name: $name,
            json: include_str!(concat!("../../proofs/mutants/", $name, ".json")),
            failing_line: $line,
        }
    };
}

/// One instance of every schema, the two small proofs from the rule
/// examples, and a derivation using every rule.
pub fn sample_proofs() -> Vec<BundledProof> {
    vec![
        sample!("axioms"),
        sample!("necessitation"),
        sample!("induction"),
        sample!("derivation"),
    ]
}

/// Ten mutations of the `derivation` sample.
pub fn mutated_proofs() -> Vec<MutatedProof> {
    vec![
        mutant!("mp-wrong-minor", 3),
        mutant!("mp-non-implication", 12),
        mutant!("forward-reference", 8),
        mutant!("reference-out-of-range", 5),
        mutant!("kw-nec-wrong-agent", 9),
        mutant!("cw-nec-wrong-body", 8),
        mutant!("mislabelled-axiom", 1),
        mutant!("non-tautology", 2),
        mutant!("re-on-non-biconditional", 6),
        mutant!("ew-missing-agent", 1),
    ]
}
