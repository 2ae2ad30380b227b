//! String comparators used by the spell-variant predicate.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Unit-cost insertion/deletion/substitution distance.
///
/// Works on bytes; callers pass basic-cleaned (lowercase ASCII) tokens.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let (a, b) = (a.as_bytes(), b.as_bytes());
    // keep the row over the shorter string
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    if short.is_empty() {
        return long.len();
    }
    let mut row: Vec<usize> = (0..=short.len()).collect();
    for (i, &lc) in long.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, &sc) in short.iter().enumerate() {
            let above = row[j + 1];
            let cost = usize::from(lc != sc);
            row[j + 1] = (diag + cost).min(above + 1).min(row[j] + 1);
            diag = above;
        }
    }
    row[short.len()]
}

/// Output of [`metaphone`]: uppercase letters from `0BFHJKLMNPRSTWXY` plus
/// the word-initial vowels `AEIOU`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PhoneticKey(String);

impl PhoneticKey {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for PhoneticKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Every character a [`PhoneticKey`] may contain.
pub const METAPHONE_ALPHABET: &str = "0ABEFHIJKLMNOPRSTUWXY";

const END: u8 = b'*';

fn is_vowel(c: u8) -> bool {
    matches!(c, b'a' | b'e' | b'i' | b'o' | b'u')
}

/// Original (single-key) Metaphone with no length cap.
///
/// Non-alphabetic characters are dropped before encoding.
pub fn metaphone(token: &str) -> PhoneticKey {
    let mut s: Vec<u8> = token
        .bytes()
        .filter(u8::is_ascii_alphabetic)
        .map(|b| b.to_ascii_lowercase())
        .collect();
    if [b"kn", b"gn", b"pn", b"wr", b"ae"]
        .iter()
        .any(|p| s.starts_with(*p))
    {
        s.remove(0);
    }

    let at = |i: usize| s.get(i).copied().unwrap_or(END);
    let mut key = String::with_capacity(s.len());
    let mut i = 0;
    while i < s.len() {
        let c = s[i];
        let next = at(i + 1);
        let after = at(i + 2);
        let prev = if i > 0 { Some(s[i - 1]) } else { None };

        // collapse doubled letters, except "cc"
        if c == next && c != b'c' {
            i += 1;
            continue;
        }

        match c {
            b'a' | b'e' | b'i' | b'o' | b'u' => {
                if i == 0 {
                    key.push(c.to_ascii_uppercase() as char);
                }
            }
            b'b' => {
                // silent in a final "mb"
                if !(prev == Some(b'm') && next == END) {
                    key.push('B');
                }
            }
            b'c' => {
                if (next == b'i' && after == b'a') || next == b'h' {
                    key.push('X');
                    i += 1;
                } else if matches!(next, b'i' | b'e' | b'y') {
                    key.push('S');
                    i += 1;
                } else {
                    key.push('K');
                }
            }
            b'd' => {
                if next == b'g' && matches!(after, b'i' | b'e' | b'y') {
                    key.push('J');
                    i += 2;
                } else {
                    key.push('T');
                }
            }
            b'f' | b'j' | b'l' | b'm' | b'n' | b'r' => key.push(c.to_ascii_uppercase() as char),
            b'g' => {
                if matches!(next, b'i' | b'e' | b'y') {
                    key.push('J');
                } else if next == b'h' && after != END && !is_vowel(after) {
                    i += 1;
                } else if next == b'n' && after == END {
                    // final "gn": both letters are dropped
                    i += 1;
                } else {
                    key.push('K');
                }
            }
            b'h' => {
                if i == 0 || is_vowel(next) || !prev.is_some_and(is_vowel) {
                    key.push('H');
                }
            }
            b'k' => {
                if prev != Some(b'c') {
                    key.push('K');
                }
            }
            b'p' => {
                if next == b'h' {
                    key.push('F');
                    i += 1;
                } else {
                    key.push('P');
                }
            }
            b'q' => key.push('K'),
            b's' => {
                if next == b'h' {
                    key.push('X');
                    i += 1;
                } else if next == b'i' && matches!(after, b'o' | b'a') {
                    key.push('X');
                    i += 2;
                } else {
                    key.push('S');
                }
            }
            b't' => {
                if next == b'i' && matches!(after, b'o' | b'a') {
                    key.push('X');
                } else if next == b'h' {
                    key.push('0');
                    i += 1;
                } else if !(next == b'c' && after == b'h') {
                    key.push('T');
                }
            }
            b'v' => key.push('F'),
            b'w' => {
                if i == 0 && next == b'h' {
                    key.push('W');
                    i += 1;
                } else if is_vowel(next) {
                    key.push('W');
                }
            }
            b'x' => {
                if i == 0 {
                    if next == b'h' || (next == b'i' && matches!(after, b'o' | b'a')) {
                        key.push('X');
                    } else {
                        key.push('S');
                    }
                } else {
                    key.push_str("KS");
                }
            }
            b'y' => {
                if is_vowel(next) {
                    key.push('Y');
                }
            }
            b'z' => key.push('S'),
            _ => {}
        }
        i += 1;
    }
    PhoneticKey(key)
}
