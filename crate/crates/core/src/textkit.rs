//! Tokenization, n-gram extraction, and the edit-operation algebra the
//! editing MDP manipulates.

use alloc::borrow::ToOwned;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// A single lowercase word token with no surrounding punctuation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Token(String);

impl Token {
    /// Build a token, enforcing the non-empty / no-whitespace invariants.
    pub fn new(text: &str) -> Option<Token> {
        if text.is_empty() || text.chars().any(char::is_whitespace) {
            return None;
        }
        Some(Token(text.to_lowercase()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// An ordered sequence of tokens.
pub type TokenSeq = Vec<Token>;

/// A token-level edit on a sequence.
///
/// Indices refer to the sequence the op is applied to; `Insert` allows
/// `pos == len`. `Reorder` is a pairwise swap and requires `i != j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EditOp {
    Insert { pos: usize, word: Token },
    Delete { pos: usize },
    Substitute { pos: usize, word: Token },
    Reorder { i: usize, j: usize },
    Stop,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EditError {
    IndexOutOfRange { index: usize, len: usize },
    DegenerateReorder { index: usize },
}

impl fmt::Display for EditError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EditError::IndexOutOfRange { index, len } => {
                write!(f, "edit index {index} out of range for sequence of length {len}")
            }
            EditError::DegenerateReorder { index } => {
                write!(f, "reorder requires two distinct positions, got {index} twice")
            }
        }
    }
}

/// Lowercase, split on whitespace, strip leading/trailing punctuation from
/// each piece, and drop pieces that become empty. Internal punctuation
/// (hyphens, apostrophes) is kept; ASCII digits are kept.
pub fn tokenize(raw: &str) -> TokenSeq {
    raw.split_whitespace()
        .filter_map(|piece| {
            let trimmed = piece.trim_matches(|c: char| !c.is_alphanumeric());
            Token::new(trimmed)
        })
        .collect()
}

/// Join tokens with single spaces.
pub fn detokenize(seq: &[Token]) -> String {
    let mut out = String::new();
    for (i, tok) in seq.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(tok.as_str());
    }
    out
}

/// Apply one edit, returning a new sequence. The input is never mutated.
pub fn apply_edit(seq: &[Token], op: &EditOp) -> Result<TokenSeq, EditError> {
    let len = seq.len();
    let mut out: TokenSeq = seq.to_owned();
    match op {
        EditOp::Insert { pos, word } => {
            if *pos > len {
                return Err(EditError::IndexOutOfRange { index: *pos, len });
            }
            out.insert(*pos, word.clone());
        }
        EditOp::Delete { pos } => {
            if *pos >= len {
                return Err(EditError::IndexOutOfRange { index: *pos, len });
            }
            out.remove(*pos);
        }
        EditOp::Substitute { pos, word } => {
            if *pos >= len {
                return Err(EditError::IndexOutOfRange { index: *pos, len });
            }
            out[*pos] = word.clone();
        }
        EditOp::Reorder { i, j } => {
            if i == j {
                return Err(EditError::DegenerateReorder { index: *i });
            }
            if *i >= len {
                return Err(EditError::IndexOutOfRange { index: *i, len });
            }
            if *j >= len {
                return Err(EditError::IndexOutOfRange { index: *j, len });
            }
            out.swap(*i, *j);
        }
        EditOp::Stop => {}
    }
    Ok(out)
}

/// All contiguous n-grams with multiplicity. Empty when `|seq| < n`.
pub fn ngrams(seq: &[Token], n: usize) -> BTreeMap<Vec<Token>, usize> {
    assert!(n >= 1, "n-gram order must be >= 1");
    let mut out = BTreeMap::new();
    if seq.len() < n {
        return out;
    }
    for window in seq.windows(n) {
        *out.entry(window.to_owned()).or_insert(0) += 1;
    }
    out
}

/// Length of the longest common subsequence of `a` and `b`.
pub fn lcs_length(a: &[Token], b: &[Token]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut prev = alloc::vec![0usize; b.len() + 1];
    let mut cur = alloc::vec![0usize; b.len() + 1];
    for ta in a {
        for (j, tb) in b.iter().enumerate() {
            cur[j + 1] = if ta == tb {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}
