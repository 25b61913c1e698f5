//! Character classes over a finite ASCII alphabet.

use std::fmt;

use serde::{Serialize, Serializer};

/// A set of ASCII characters stored as a 128-bit mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct CharSet(u128);

impl CharSet {
    pub const EMPTY: CharSet = CharSet(0);

    pub fn singleton(c: u8) -> Self {
        debug_assert!(c < 128);
        CharSet(1u128 << c)
    }

    /// Inclusive range `lo..=hi`; empty when `lo > hi`.
    pub fn range(lo: u8, hi: u8) -> Self {
        if lo > hi || lo >= 128 {
            return CharSet::EMPTY;
        }
        let hi = hi.min(127);
        let upper = if hi == 127 { u128::MAX } else { (1u128 << (hi + 1)) - 1 };
        let lower = (1u128 << lo) - 1;
        CharSet(upper & !lower)
    }

    pub fn from_bytes(bytes: &[u8]) -> Self {
        bytes.iter().fold(CharSet::EMPTY, |acc, &b| acc.with(b))
    }

    pub fn with(self, c: u8) -> Self {
        self.union(CharSet::singleton(c))
    }

    pub fn contains(self, c: u8) -> bool {
        c < 128 && self.0 & (1u128 << c) != 0
    }

    pub fn union(self, other: CharSet) -> Self {
        CharSet(self.0 | other.0)
    }

    pub fn intersect(self, other: CharSet) -> Self {
        CharSet(self.0 & other.0)
    }

    pub fn minus(self, other: CharSet) -> Self {
        CharSet(self.0 & !other.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: CharSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Smallest member, if any.
    pub fn first(self) -> Option<u8> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as u8)
    }

    pub fn iter(self) -> impl Iterator<Item = u8> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let c = bits.trailing_zeros() as u8;
            bits &= bits - 1;
            Some(c)
        })
    }

    pub fn bits(self) -> u128 {
        self.0
    }
}

impl FromIterator<u8> for CharSet {
    fn from_iter<I: IntoIterator<Item = u8>>(iter: I) -> Self {
        iter.into_iter().fold(CharSet::EMPTY, |acc, b| acc.with(b))
    }
}

/// Renders one character the way the regex DSL would read it back.
pub(crate) fn show_char(c: u8) -> String {
    match c {
        b'\n' => "\\n".to_string(),
        b' ' => "␣".to_string(),
        b'\t' => "\\t".to_string(),
        0x21..=0x7e => (c as char).to_string(),
        _ => format!("\\x{c:02x}"),
    }
}

impl fmt::Display for CharSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        let mut chars = self.iter().peekable();
        while let Some(lo) = chars.next() {
            let mut hi = lo;
            while chars.peek() == Some(&(hi + 1)) {
                hi = chars.next().unwrap();
            }
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            if hi >= lo + 2 {
                write!(f, "{}-{}", show_char(lo), show_char(hi))?;
            } else {
                write!(f, "{}", show_char(lo))?;
                if hi > lo {
                    write!(f, ", {}", show_char(hi))?;
                }
            }
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for CharSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for CharSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let text: String = self.iter().map(|c| c as char).collect();
        s.serialize_str(&text)
    }
}

/// The finite alphabet Σ every document and formula is drawn from.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Alphabet(CharSet);

impl Alphabet {
    /// Printable ASCII (space through tilde) plus newline.
    pub fn printable() -> Self {
        Alphabet(CharSet::range(0x20, 0x7e).with(b'\n'))
    }

    pub fn new(chars: CharSet) -> Self {
        Alphabet(chars)
    }

    pub fn from_chars(chars: &str) -> Self {
        Alphabet(CharSet::from_bytes(chars.as_bytes()))
    }

    pub fn chars(self) -> CharSet {
        self.0
    }

    pub fn contains(self, c: u8) -> bool {
        self.0.contains(c)
    }

    /// Position of the first character of `text` outside the alphabet.
    pub fn first_foreign(self, text: &str) -> Option<(usize, char)> {
        text.char_indices()
            .find(|&(_, c)| !c.is_ascii() || !self.contains(c as u8))
    }
}

impl Default for Alphabet {
    fn default() -> Self {
        Alphabet::printable()
    }
}
