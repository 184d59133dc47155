use std::fmt;

use serde::{Deserialize, Serialize};

/// A term in a specification: a variable or a literal.
///
/// Variables are identified by their kind and rank. Rank `n` is the
/// position in the kind's naming sequence, so input ranks 1, 2, 3, 4
/// render as `I`, `J`, `K`, `I4`, output ranks as `x`, `y`, `z`, `x4`,
/// and quantified (bound) ranks as `A`, `B`, `C`, `A4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Term {
    Input(u32),
    Output(u32),
    Bound(u32),
    Lit(u64),
}

impl Term {
    pub fn is_input(&self) -> bool {
        matches!(self, Term::Input(_))
    }

    pub fn is_output(&self) -> bool {
        matches!(self, Term::Output(_))
    }
}

/// Renders rank `rank` of a three-letter naming sequence. The first three
/// ranks use the bare letters; rank 4 and up append the rank to the first
/// letter, e.g. `i4`, `i5`.
pub fn seq_name(letters: [char; 3], rank: u32) -> String {
    match rank {
        1 => letters[0].to_string(),
        2 => letters[1].to_string(),
        3 => letters[2].to_string(),
        n => format!("{}{}", letters[0], n),
    }
}

/// Inverse of [`seq_name`]: recognizes a name from the sequence and
/// returns its rank.
pub fn seq_rank(letters: [char; 3], name: &str) -> Option<u32> {
    let mut chars = name.chars();
    let first = chars.next()?;
    let rest: String = chars.collect();
    if rest.is_empty() {
        if first == letters[0] {
            return Some(1);
        }
        if first == letters[1] {
            return Some(2);
        }
        if first == letters[2] {
            return Some(3);
        }
        return None;
    }
    if first != letters[0] {
        return None;
    }
    let n: u32 = rest.parse().ok()?;
    if n >= 4 {
        Some(n)
    } else {
        None
    }
}

pub const INPUT_LETTERS: [char; 3] = ['I', 'J', 'K'];
pub const OUTPUT_LETTERS: [char; 3] = ['x', 'y', 'z'];
pub const BOUND_LETTERS: [char; 3] = ['A', 'B', 'C'];

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Input(r) => write!(f, "{}", seq_name(INPUT_LETTERS, *r)),
            Term::Output(r) => write!(f, "{}", seq_name(OUTPUT_LETTERS, *r)),
            Term::Bound(r) => write!(f, "{}", seq_name(BOUND_LETTERS, *r)),
            Term::Lit(v) => write!(f, "\"{}\"", v),
        }
    }
}

/// Parses a variable name into a term, if it belongs to one of the three
/// naming sequences.
pub fn term_from_name(name: &str) -> Option<Term> {
    if let Some(r) = seq_rank(INPUT_LETTERS, name) {
        return Some(Term::Input(r));
    }
    if let Some(r) = seq_rank(OUTPUT_LETTERS, name) {
        return Some(Term::Output(r));
    }
    if let Some(r) = seq_rank(BOUND_LETTERS, name) {
        return Some(Term::Bound(r));
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_to_name_is_bijective_per_kind() {
        for rank in 1..=8 {
            let t = Term::Input(rank);
            assert_eq!(term_from_name(&t.to_string()), Some(t));
            let t = Term::Output(rank);
            assert_eq!(term_from_name(&t.to_string()), Some(t));
            let t = Term::Bound(rank);
            assert_eq!(term_from_name(&t.to_string()), Some(t));
        }
        assert_eq!(seq_name(INPUT_LETTERS, 4), "I4");
        assert_eq!(seq_name(OUTPUT_LETTERS, 2), "y");
        assert_eq!(seq_name(BOUND_LETTERS, 1), "A");
    }

    #[test]
    fn non_sequence_names_are_rejected() {
        assert_eq!(term_from_name("J4"), None); // indexed names use the first letter
        assert_eq!(term_from_name("w"), None);
        assert_eq!(term_from_name("I0"), None);
        assert_eq!(term_from_name("I2"), None); // rank 2 is spelled J
    }
}
