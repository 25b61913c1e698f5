//! Document cleaning over rule-based extraction.
//!
//! Extraction formulas are regexes with capture variables ([`regex_cv`]),
//! compiled to variable-set automata ([`automata`]) and combined with a small
//! spanner algebra ([`algebra`]). The [`verifier`] decides sufficient
//! conditions under which edits to an extracted table can be written back
//! into the source documents, and the [`cleaner`] runs that pipeline.

pub mod algebra;
pub mod allen;
pub mod automata;
pub mod charset;
pub mod cleaner;
pub mod regex_cv;
pub mod verifier;

pub use charset::{Alphabet, CharSet};
