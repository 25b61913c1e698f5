use rand::seq::SliceRandom;
use rand::Rng;

use super::{CellUpdate, ExtractedTable};
use crate::algebra::SpannerProgram;
use crate::automata::Nfa;
use crate::charset::{Alphabet, CharSet};
use crate::regex_cv::{Node, RegexCV};
use crate::verifier::domains;

/// Stars unroll at most this often.
const MAX_REPEAT: usize = 4;

/// A random word of the formula's language (captures ignored), or `None`
/// if the language is empty. Stars repeat a geometric number of times,
/// capped at a few iterations.
pub fn sample_member<R: Rng + ?Sized>(r: &RegexCV, alphabet: Alphabet, rng: &mut R) -> Option<String> {
    let mut out = Vec::new();
    sample(r.root(), alphabet, rng, &mut out).then(|| String::from_utf8(out).expect("alphabet is ASCII"))
}

fn class(node: &Node, alphabet: Alphabet) -> CharSet {
    match node {
        Node::Char(c) => CharSet::singleton(*c),
        Node::Range(lo, hi) => CharSet::range(*lo, *hi),
        Node::Any => alphabet.chars(),
        Node::Minus(base, c) => class(base, alphabet).minus(CharSet::singleton(*c)),
        _ => CharSet::EMPTY,
    }
    .intersect(alphabet.chars())
}

fn sample<R: Rng + ?Sized>(node: &Node, alphabet: Alphabet, rng: &mut R, out: &mut Vec<u8>) -> bool {
    match node {
        Node::Empty => false,
        Node::Epsilon => true,
        Node::Char(_) | Node::Range(..) | Node::Any | Node::Minus(..) => {
            let chars: Vec<u8> = class(node, alphabet).iter().collect();
            match chars.choose(rng) {
                Some(&c) => {
                    out.push(c);
                    true
                }
                None => false,
            }
        }
        Node::Alt(parts) => {
            let mut order: Vec<&Node> = parts.iter().collect();
            order.shuffle(rng);
            let mark = out.len();
            for part in order {
                if sample(part, alphabet, rng, out) {
                    return true;
                }
                out.truncate(mark);
            }
            false
        }
        Node::Concat(parts) => parts.iter().all(|p| sample(p, alphabet, rng, out)),
        Node::Star(body) => {
            let mut n = 0;
            while n < MAX_REPEAT && rng.gen_bool(0.5) {
                let mark = out.len();
                if !sample(body, alphabet, rng, out) {
                    out.truncate(mark);
                    break;
                }
                n += 1;
            }
            true
        }
        Node::Capture(_, body) => sample(body, alphabet, rng, out),
    }
}

/// A random single-cell update: a row of `table`, one of the program's
/// update variables, and a replacement drawn from the variable's domain.
/// `None` if the table is empty or no replacement was found.
pub fn random_update<R: Rng + ?Sized>(p: &SpannerProgram, table: &ExtractedTable, rng: &mut R) -> Option<CellUpdate> {
    let row = table.rows.choose(rng)?;
    let vars: Vec<String> = p.updatable_variables().into_iter().filter(|v| table.column(v).is_some()).collect();
    let column = vars.choose(rng)?.clone();
    let doms = domains(p, &column);
    let nfas: Vec<Nfa> = doms.iter().filter_map(|d| Nfa::new(d, p.alphabet()).ok()).collect();
    let new = (0..32)
        .filter_map(|_| sample_member(doms.first()?, p.alphabet(), rng))
        .find(|w| nfas.iter().all(|n| n.accepts(w)))?;
    let col = table.column(&column)?;
    Some(CellUpdate {
        doc_id: row.doc_id.clone(),
        row: row.spans(),
        column,
        old: row.cells[col].value.clone(),
        new,
    })
}
