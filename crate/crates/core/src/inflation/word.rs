//! Words of measurement projectors modulo the commutation structure of the
//! inflated wiring.
//!
//! Letters are (party, outcome) pairs over parties A, B, C, D.  Two
//! letters commute unless their parties are {A, C} or {B, D} (the party
//! pairs whose inflated measurements share a source slot).  Same-party
//! letters always commute; adjacent same-party letters merge when the
//! outcome agrees (projector idempotence) and annihilate the word when it
//! differs (orthogonality).
//!
//! [`canonical_word`] returns the unique lexicographically least word of
//! an equivalence class: it alternates greedy reordering (repeatedly
//! surfacing the smallest letter whose left neighbours all commute with
//! it) with adjacent reduction until a fixed point.  Greedy surfacing is
//! the standard normal form for free partially commutative monoids; the
//! fixed-point loop extends it across the idempotence/orthogonality
//! rewrites, which plain adjacent-swap sorting cannot reach (swapping is
//! not confluent here: BCA and CAB are distinct stable orders of the same
//! class).

/// Party index: 0 = A, 1 = B, 2 = C, 3 = D.
pub type Party = u8;

/// One projector letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub party: Party,
    pub outcome: u8,
}

impl Letter {
    pub fn new(party: Party, outcome: u8) -> Self {
        Letter { party, outcome }
    }
}

/// A word after canonicalization: either the zero element (annihilated by
/// orthogonal projectors) or a reduced word.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Canonical {
    Zero,
    Word(Vec<Letter>),
}

/// Do letters of these two parties commute?
pub fn parties_commute(p: Party, q: Party) -> bool {
    let pair = (p.min(q), p.max(q));
    // A and C share a slot, as do B and D; everything else commutes.
    pair != (0, 2) && pair != (1, 3)
}

/// Party name used in rendered words.
pub fn party_name(p: Party) -> char {
    (b'A' + p) as char
}

/// Render a word: outcome-0 letters print as bare party names, other
/// outcomes append the digit (e.g. "AB" or "A1B0").
pub fn word_to_string(w: &[Letter]) -> String {
    if w.iter().all(|l| l.outcome == 0) {
        w.iter().map(|l| party_name(l.party)).collect()
    } else {
        w.iter()
            .map(|l| format!("{}{}", party_name(l.party), l.outcome))
            .collect()
    }
}

/// One pass of adjacent reduction: merge equal neighbours, annihilate
/// same-party neighbours with different outcomes.
fn reduce_adjacent(w: &[Letter]) -> Option<Vec<Letter>> {
    let mut out: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in w {
        match out.last() {
            Some(&prev) if prev.party == l.party => {
                if prev.outcome != l.outcome {
                    return None; // orthogonal projectors
                }
                // idempotent: drop the duplicate
            }
            _ => out.push(l),
        }
    }
    Some(out)
}

/// Greedy lexicographic normal form within the free partially commutative
/// monoid (no reductions applied).
fn greedy_min(mut w: Vec<Letter>) -> Vec<Letter> {
    let mut out = Vec::with_capacity(w.len());
    while !w.is_empty() {
        // Letters that can surface: all left neighbours commute.
        let mut best: Option<usize> = None;
        for k in 0..w.len() {
            let movable = w[..k]
                .iter()
                .all(|x| parties_commute(x.party, w[k].party));
            if !movable {
                continue;
            }
            match best {
                None => best = Some(k),
                Some(b) if w[k] < w[b] => best = Some(k),
                _ => {}
            }
        }
        let k = best.expect("position 0 is always movable");
        out.push(w.remove(k));
    }
    out
}

/// Canonical form of a word.
pub fn canonical_word(w: &[Letter]) -> Canonical {
    let mut cur = match reduce_adjacent(w) {
        None => return Canonical::Zero,
        Some(v) => v,
    };
    loop {
        let ordered = greedy_min(cur.clone());
        let reduced = match reduce_adjacent(&ordered) {
            None => return Canonical::Zero,
            Some(v) => v,
        };
        if reduced == cur {
            return Canonical::Word(reduced);
        }
        cur = reduced;
    }
}

/// Canonical form of the reversal (the adjoint word: projectors are
/// Hermitian, so the adjoint of a product is the reversed product).
pub fn canonical_reversed(w: &[Letter]) -> Canonical {
    let rev: Vec<Letter> = w.iter().rev().copied().collect();
    canonical_word(&rev)
}

/// Order used for index words and class leaders: by length, then
/// lexicographically.
pub fn word_key(w: &[Letter]) -> (usize, Vec<Letter>) {
    (w.len(), w.to_vec())
}

/// Parse a word like "AB", "CA" or "A1B0" (bare letters mean outcome 0).
pub fn word_from_string(s: &str) -> Result<Vec<Letter>, String> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        let party = match c {
            'A'..='D' => c as u8 - b'A',
            _ => return Err(format!("unknown party letter {c:?}")),
        };
        k += 1;
        let outcome = if k < chars.len() && chars[k].is_ascii_digit() {
            let d = chars[k] as u8 - b'0';
            k += 1;
            d
        } else {
            0
        };
        out.push(Letter::new(party, outcome));
    }
    Ok(out)
}
