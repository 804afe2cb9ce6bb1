//! Free group word algebra: letters, alphabets, free and cyclic reduction,
//! and the shortlex order used everywhere downstream.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors arising from alphabet construction and word parsing.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum WordError {
    #[error("invalid generator name `{name}`: must start with a letter or `_` and contain only letters, digits and `_`")]
    InvalidGeneratorName { name: String },
    #[error("duplicate generator name `{name}`")]
    DuplicateGenerator { name: String },
    #[error("unknown generator `{name}` in word")]
    UnknownGenerator { name: String },
    #[error("malformed word factor `{token}`: expected `gen`, `gen^-1` or `gen^k`")]
    MalformedFactor { token: String },
    #[error("zero exponent in factor `{token}`")]
    ZeroExponent { token: String },
}

/// A signed generator occurrence, packed into one integer:
/// `(generator_index << 1) | sign_bit` with sign bit 1 meaning inverse.
///
/// The packing makes inversion a single XOR and gives the letter order
/// x < x⁻¹ < y < y⁻¹ < … for free via the integer order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Letter(u32);

impl Letter {
    /// Letter for generator `gen` (0-based), inverted if `inverse`.
    pub fn new(gen: u32, inverse: bool) -> Letter {
        Letter(gen << 1 | u32::from(inverse))
    }

    /// The 0-based generator index.
    pub fn generator(self) -> u32 {
        self.0 >> 1
    }

    /// True for x⁻¹-type letters.
    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    /// The formal inverse.
    pub fn inverse(self) -> Letter {
        Letter(self.0 ^ 1)
    }

    /// The packed code; useful as a hash/table key.
    pub fn code(self) -> u32 {
        self.0
    }
}

/// A named generating set. Owns the name ↔ index correspondence used when
/// words cross a text boundary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    names: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, u32>,
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || c == '_')
}

impl Alphabet {
    /// Builds an alphabet from generator names in declaration order.
    ///
    /// Names must be identifiers (so the reserved empty-word token `1`
    /// can never collide with a generator) and pairwise distinct.
    pub fn new<S: Into<String>, I: IntoIterator<Item = S>>(names: I) -> Result<Alphabet, WordError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut index = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if !valid_name(name) {
                return Err(WordError::InvalidGeneratorName { name: name.clone() });
            }
            if index.insert(name.clone(), i as u32).is_some() {
                return Err(WordError::DuplicateGenerator { name: name.clone() });
            }
        }
        Ok(Alphabet { names, index })
    }

    /// Number of generators.
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Generator names in declaration order.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// The name of the generator underlying `letter`.
    pub fn name(&self, letter: Letter) -> &str {
        &self.names[letter.generator() as usize]
    }

    /// Positive letter for a generator name, if declared.
    pub fn letter(&self, name: &str) -> Option<Letter> {
        self.index.get(name).map(|&i| Letter::new(i, false))
    }

    /// Rebuilds the name index after deserialization.
    pub fn rebuild_index(&mut self) {
        self.index = self
            .names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i as u32))
            .collect();
    }

    /// Parses the whitespace-separated factor grammar `gen`, `gen^-1`,
    /// `gen^k` (k a nonzero integer). The standalone token `1` denotes the
    /// empty word. The result is freely reduced.
    pub fn parse(&self, text: &str) -> Result<Word, WordError> {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens == ["1"] {
            return Ok(Word::empty());
        }
        let mut letters = Vec::new();
        for token in tokens {
            let (name, exponent) = match token.split_once('^') {
                None => (token, 1i64),
                Some((name, exp)) => {
                    let exp: i64 = exp
                        .parse()
                        .map_err(|_| WordError::MalformedFactor { token: token.to_string() })?;
                    if exp == 0 {
                        return Err(WordError::ZeroExponent { token: token.to_string() });
                    }
                    (name, exp)
                }
            };
            let base = self
                .letter(name)
                .ok_or_else(|| WordError::UnknownGenerator { name: name.to_string() })?;
            let letter = if exponent < 0 { base.inverse() } else { base };
            for _ in 0..exponent.unsigned_abs() {
                letters.push(letter);
            }
        }
        Ok(Word::reduce(&letters))
    }

    /// Serializes a word in the factor grammar, collapsing runs of equal
    /// letters into exponents (`x x x` → `x^3`). The empty word prints as
    /// `1`. `parse(format_word(w)) == w` for every reduced word.
    pub fn format_word(&self, word: &Word) -> String {
        if word.is_empty() {
            return "1".to_string();
        }
        let mut out = String::new();
        let letters = word.letters();
        let mut i = 0;
        while i < letters.len() {
            let letter = letters[i];
            let mut run = 1usize;
            while i + run < letters.len() && letters[i + run] == letter {
                run += 1;
            }
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(self.name(letter));
            let signed = if letter.is_inverse() { -(run as i64) } else { run as i64 };
            if signed != 1 {
                out.push('^');
                out.push_str(&signed.to_string());
            }
            i += run;
        }
        out
    }
}

/// A freely reduced word: the canonical representative of an element of the
/// free group on the ambient alphabet.
///
/// The reducedness invariant is maintained by every constructor; raw letter
/// sequences enter only through [`Word::reduce`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    /// The empty word — the group identity.
    pub fn empty() -> Word {
        Word { letters: Vec::new() }
    }

    /// Single-letter word.
    pub fn letter(letter: Letter) -> Word {
        Word { letters: vec![letter] }
    }

    /// Freely reduces a raw letter sequence (stack algorithm). Idempotent.
    pub fn reduce(raw: &[Letter]) -> Word {
        let mut stack: Vec<Letter> = Vec::with_capacity(raw.len());
        for &letter in raw {
            if stack.last() == Some(&letter.inverse()) {
                stack.pop();
            } else {
                stack.push(letter);
            }
        }
        Word { letters: stack }
    }

    /// Wraps a sequence already known to be reduced (debug-checked).
    pub fn from_reduced(letters: Vec<Letter>) -> Word {
        debug_assert!(is_reduced(&letters), "letters not freely reduced");
        Word { letters }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// The formal inverse: reversed, letterwise-inverted.
    pub fn invert(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// Product in the free group (reduces at the seam only).
    pub fn concat(&self, other: &Word) -> Word {
        let mut left = self.letters.clone();
        let mut right_start = 0usize;
        while let Some(&last) = left.last() {
            if right_start < other.letters.len() && other.letters[right_start] == last.inverse() {
                left.pop();
                right_start += 1;
            } else {
                break;
            }
        }
        left.extend_from_slice(&other.letters[right_start..]);
        Word { letters: left }
    }

    /// Product of several words, reducing left to right.
    pub fn concat_all<'a, I: IntoIterator<Item = &'a Word>>(factors: I) -> Word {
        let mut acc = Word::empty();
        for f in factors {
            acc = acc.concat(f);
        }
        acc
    }

    /// reduce(x⁻¹ · w · x).
    pub fn conjugate(&self, x: &Word) -> Word {
        x.invert().concat(self).concat(x)
    }

    /// w^p for any integer p, via cyclic decomposition so that repeated
    /// seams never re-scan cancelled prefixes.
    pub fn power(&self, p: i64) -> Word {
        if p == 0 || self.is_empty() {
            return Word::empty();
        }
        let base = if p < 0 { self.invert() } else { self.clone() };
        let (core, prefix) = base.cyclic_reduce();
        if core.is_empty() {
            return Word::empty();
        }
        let n = p.unsigned_abs() as usize;
        let mut letters = Vec::with_capacity(prefix.len() * 2 + core.len() * n);
        letters.extend_from_slice(prefix.letters());
        for _ in 0..n {
            letters.extend_from_slice(core.letters());
        }
        letters.extend_from_slice(prefix.invert().letters());
        Word::reduce(&letters)
    }

    /// Splits off the conjugating prefix: returns `(core, prefix)` with
    /// `core` cyclically reduced, `self = prefix · core · prefix⁻¹` and
    /// `core = reduce(prefix⁻¹ · self · prefix)`.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let letters = &self.letters;
        let mut lo = 0usize;
        let mut hi = letters.len();
        while hi - lo >= 2 && letters[lo] == letters[hi - 1].inverse() {
            lo += 1;
            hi -= 1;
        }
        let core = Word { letters: letters[lo..hi].to_vec() };
        let prefix = Word { letters: letters[..lo].to_vec() };
        (core, prefix)
    }

    /// True when the word survives its own cyclic reduction.
    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(&first), Some(&last)) => self.len() == 1 || first != last.inverse(),
            _ => true,
        }
    }

    /// Cyclic rotation by `k` (valid for cyclically reduced words, where
    /// every rotation is still reduced).
    pub fn rotate(&self, k: usize) -> Word {
        if self.is_empty() {
            return Word::empty();
        }
        let k = k % self.len();
        let mut letters = Vec::with_capacity(self.len());
        letters.extend_from_slice(&self.letters[k..]);
        letters.extend_from_slice(&self.letters[..k]);
        debug_assert!(is_reduced(&letters));
        Word { letters }
    }

    /// The subword `self[range]` (a subword of a reduced word is reduced).
    pub fn slice(&self, start: usize, end: usize) -> Word {
        Word { letters: self.letters[start..end].to_vec() }
    }

    /// Shortlex comparison key helper: exposes the packed codes.
    pub fn codes(&self) -> impl Iterator<Item = u32> + '_ {
        self.letters.iter().map(|l| l.code())
    }
}

fn is_reduced(letters: &[Letter]) -> bool {
    letters.windows(2).all(|w| w[0] != w[1].inverse())
}

/// Shortlex: length first, then letterwise by packed code
/// (x < x⁻¹ < y < y⁻¹ < …).
impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    /// Alphabet-free debug rendering: generator indices with `'` marking
    /// inverses, e.g. `0 1' 0`. Use [`Alphabet::format_word`] for real output.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for l in &self.letters {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "{}{}", l.generator(), if l.is_inverse() { "'" } else { "" })?;
        }
        Ok(())
    }
}

/// Iterates all freely reduced words over `rank` generators with length at
/// most `max_len`, in shortlex order starting from the empty word.
pub fn reduced_words(rank: usize, max_len: usize) -> impl Iterator<Item = Word> {
    // Frontier expansion, one length layer at a time; within a layer the
    // extension order (parent shortlex, then letter code) is exactly shortlex.
    let mut layer = vec![Word::empty()];
    let mut pending: std::collections::VecDeque<Word> = layer.iter().cloned().collect();
    let mut length = 0usize;
    std::iter::from_fn(move || {
        if let Some(w) = pending.pop_front() {
            return Some(w);
        }
        if length >= max_len {
            return None;
        }
        length += 1;
        let mut next = Vec::with_capacity(layer.len() * rank * 2);
        for w in &layer {
            let forbidden = w.letters().last().map(|l| l.inverse());
            for g in 0..rank as u32 {
                for inv in [false, true] {
                    let letter = Letter::new(g, inv);
                    if Some(letter) == forbidden {
                        continue;
                    }
                    let mut letters = w.letters().to_vec();
                    letters.push(letter);
                    next.push(Word::from_reduced(letters));
                }
            }
        }
        layer = next;
        pending = layer.iter().cloned().collect();
        pending.pop_front()
    })
}
