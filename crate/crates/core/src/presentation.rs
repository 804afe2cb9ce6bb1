//! Finite group presentations: relator normalization, symmetrized closures,
//! the small-cancellation metric, direct products, and the text file format.

use std::collections::HashSet;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::word::{Alphabet, Letter, Word, WordError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PresentationError {
    #[error("line {line}: {source}")]
    Word {
        line: usize,
        #[source]
        source: WordError,
    },
    #[error("line {line}: relator is trivial after cyclic reduction")]
    EmptyRelator { line: usize },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{0}")]
    Alphabet(#[from] WordError),
    #[error("operation requires at least one relator")]
    NoRelators,
}

/// A finite presentation ⟨X | R⟩.
///
/// Relators are stored cyclically reduced and nonempty, with exact
/// duplicates dropped; `max_relator_len` is the constant L that every
/// downstream isoperimetric bound refers to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    alphabet: Alphabet,
    relators: Vec<Word>,
    pub name: Option<String>,
}

impl Presentation {
    /// Builds a presentation, normalizing relators: each is cyclically
    /// reduced (the conjugacy-class representative), empties are rejected,
    /// exact duplicates are dropped (first occurrence kept).
    pub fn new(alphabet: Alphabet, relators: Vec<Word>) -> Result<Presentation, PresentationError> {
        let mut seen = HashSet::new();
        let mut normalized = Vec::with_capacity(relators.len());
        for (i, r) in relators.into_iter().enumerate() {
            let (core, _) = r.cyclic_reduce();
            if core.is_empty() {
                return Err(PresentationError::EmptyRelator { line: i + 1 });
            }
            if seen.insert(core.clone()) {
                normalized.push(core);
            }
        }
        Ok(Presentation { alphabet, relators: normalized, name: None })
    }

    /// The free presentation ⟨X | ⟩.
    pub fn free(alphabet: Alphabet) -> Presentation {
        Presentation { alphabet, relators: Vec::new(), name: None }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    /// L: the length of the longest relator (0 for free presentations).
    pub fn max_relator_len(&self) -> usize {
        self.relators.iter().map(Word::len).max().unwrap_or(0)
    }

    /// Parses the text format: one `gens: n1 n2 ...` line, then zero or
    /// more `rel: <word>` lines; `#` starts a comment; blank lines ignored.
    ///
    /// (Free presentations — no `rel:` lines — are accepted: experiment
    /// configs routinely use a free base group.)
    pub fn parse(text: &str) -> Result<Presentation, PresentationError> {
        let mut alphabet: Option<Alphabet> = None;
        let mut relators: Vec<(usize, Word)> = Vec::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("gens:") {
                if alphabet.is_some() {
                    return Err(PresentationError::Syntax {
                        line: line_no,
                        message: "duplicate `gens:` line".into(),
                    });
                }
                let names: Vec<&str> = rest.split_whitespace().collect();
                alphabet = Some(
                    Alphabet::new(names)
                        .map_err(|source| PresentationError::Word { line: line_no, source })?,
                );
            } else if let Some(rest) = line.strip_prefix("rel:") {
                let alphabet = alphabet.as_ref().ok_or(PresentationError::Syntax {
                    line: line_no,
                    message: "`rel:` before `gens:`".into(),
                })?;
                let word = alphabet
                    .parse(rest)
                    .map_err(|source| PresentationError::Word { line: line_no, source })?;
                relators.push((line_no, word));
            } else {
                return Err(PresentationError::Syntax {
                    line: line_no,
                    message: format!("expected `gens:` or `rel:`, found `{line}`"),
                });
            }
        }
        let alphabet = alphabet.ok_or(PresentationError::Syntax {
            line: text.lines().count() + 1,
            message: "missing `gens:` line".into(),
        })?;
        let mut seen = HashSet::new();
        let mut normalized = Vec::new();
        for (line, r) in relators {
            let (core, _) = r.cyclic_reduce();
            if core.is_empty() {
                return Err(PresentationError::EmptyRelator { line });
            }
            if seen.insert(core.clone()) {
                normalized.push(core);
            }
        }
        Ok(Presentation { alphabet, relators: normalized, name: None })
    }

    /// Serializes in the same text format, bit-exactly: generators in
    /// declaration order, relators in (normalized) input order, one
    /// trailing newline.
    pub fn serialize(&self) -> String {
        let mut out = String::from("gens:");
        for n in self.alphabet.names() {
            out.push(' ');
            out.push_str(n);
        }
        out.push('\n');
        for r in &self.relators {
            out.push_str("rel: ");
            out.push_str(&self.alphabet.format_word(r));
            out.push('\n');
        }
        out
    }

    /// The symmetrized closure: every cyclic rotation of every relator and
    /// of every inverted relator, deduplicated.
    pub fn symmetrize(&self) -> SymmetrizedClosure {
        let mut set = HashSet::new();
        let mut words = Vec::new();
        for r in &self.relators {
            for base in [r.clone(), r.invert()] {
                for k in 0..base.len() {
                    let rot = base.rotate(k);
                    if set.insert(rot.clone()) {
                        words.push(rot);
                    }
                }
            }
        }
        words.sort();
        SymmetrizedClosure { set, words }
    }

    /// The small-cancellation metric λ: the maximum of |p| / |r| over all
    /// pieces p, where a piece is the longest common prefix of two
    /// *distinct* elements of the symmetrized closure and r is the element
    /// it prefixes. The presentation is C'(1/6) iff λ < 1/6.
    ///
    /// Sorting the closure lexicographically makes each element's longest
    /// shared prefix appear against a lexicographic neighbour, so one
    /// adjacent-pair sweep is exact.
    pub fn small_cancellation_lambda(&self) -> Result<Ratio<u64>, PresentationError> {
        if self.relators.is_empty() {
            return Err(PresentationError::NoRelators);
        }
        let closure = self.symmetrize();
        let mut sorted: Vec<&Word> = closure.words().iter().collect();
        sorted.sort_by(|a, b| a.letters().cmp(b.letters()));
        let mut best = Ratio::new(0u64, 1u64);
        for pair in sorted.windows(2) {
            let lcp = pair[0]
                .letters()
                .iter()
                .zip(pair[1].letters())
                .take_while(|(a, b)| a == b)
                .count() as u64;
            if lcp == 0 {
                continue;
            }
            for w in pair {
                let ratio = Ratio::new(lcp, w.len() as u64);
                if ratio > best {
                    best = ratio;
                }
            }
        }
        Ok(best)
    }

    /// True iff the C'(1/6) small-cancellation condition holds.
    pub fn is_c_prime_sixth(&self) -> bool {
        match self.small_cancellation_lambda() {
            Ok(lambda) => lambda < Ratio::new(1, 6),
            Err(_) => false,
        }
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.serialize().trim_end())
    }
}

/// The symmetrized relator closure: closed under inversion and cyclic
/// rotation, deduplicated, shortlex-sorted for deterministic iteration.
#[derive(Debug, Clone)]
pub struct SymmetrizedClosure {
    set: HashSet<Word>,
    words: Vec<Word>,
}

impl SymmetrizedClosure {
    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.set.contains(w)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Largest member length.
    pub fn max_len(&self) -> usize {
        self.words.iter().map(Word::len).max().unwrap_or(0)
    }

    /// Smallest member length.
    pub fn min_len(&self) -> usize {
        self.words.iter().map(Word::len).min().unwrap_or(0)
    }
}

/// A presentation of G₁ × G₂ together with the embeddings of (and
/// projections onto) both factors.
#[derive(Debug, Clone)]
pub struct ProductPresentation {
    pub presentation: Presentation,
    /// product generator index of each left-factor generator
    pub left: Vec<u32>,
    /// product generator index of each right-factor generator
    pub right: Vec<u32>,
}

/// Presents G₁ × G₂: generators are the disjoint union (clashing names get
/// `_1`/`_2` suffixes, escalated with underscores until fresh), relators
/// are R₁ ∪ R₂ ∪ all cross-factor commutators.
pub fn direct_product(p1: &Presentation, p2: &Presentation) -> ProductPresentation {
    let names1 = p1.alphabet().names();
    let names2 = p2.alphabet().names();
    let clash: HashSet<&String> = names1
        .iter()
        .filter(|n| names2.contains(n))
        .chain(names2.iter().filter(|n| names1.contains(n)))
        .collect();
    let mut used: HashSet<String> = HashSet::new();
    let fresh = |base: &str, tag: &str, used: &mut HashSet<String>| -> String {
        let mut candidate = if tag.is_empty() { base.to_string() } else { format!("{base}_{tag}") };
        while used.contains(&candidate) {
            candidate.push('_');
        }
        used.insert(candidate.clone());
        candidate
    };
    let mut names = Vec::with_capacity(names1.len() + names2.len());
    let mut left = Vec::with_capacity(names1.len());
    for n in names1 {
        let tag = if clash.contains(n) { "1" } else { "" };
        left.push(names.len() as u32);
        names.push(fresh(n, tag, &mut used));
    }
    let mut right = Vec::with_capacity(names2.len());
    for n in names2 {
        let tag = if clash.contains(n) { "2" } else { "" };
        right.push(names.len() as u32);
        names.push(fresh(n, tag, &mut used));
    }
    let alphabet = Alphabet::new(names).expect("freshened names are valid and distinct");

    let transcribe = |w: &Word, map: &[u32]| -> Word {
        Word::from_reduced(
            w.letters()
                .iter()
                .map(|l| Letter::new(map[l.generator() as usize], l.is_inverse()))
                .collect(),
        )
    };
    let mut relators = Vec::new();
    for r in p1.relators() {
        relators.push(transcribe(r, &left));
    }
    for r in p2.relators() {
        relators.push(transcribe(r, &right));
    }
    for &g1 in &left {
        for &g2 in &right {
            let a = Letter::new(g1, false);
            let b = Letter::new(g2, false);
            relators.push(Word::from_reduced(vec![a, b, a.inverse(), b.inverse()]));
        }
    }
    let presentation =
        Presentation::new(alphabet, relators).expect("product relators are nonempty");
    ProductPresentation { presentation, left, right }
}

impl ProductPresentation {
    /// The combined alphabet of the product presentation.
    pub fn product_alphabet(&self) -> &Alphabet {
        self.presentation.alphabet()
    }

    /// Image of a left-factor word under the left embedding.
    pub fn embed_left(&self, w: &Word) -> Word {
        self.transcribe(w, &self.left)
    }

    /// Image of a right-factor word under the right embedding.
    pub fn embed_right(&self, w: &Word) -> Word {
        self.transcribe(w, &self.right)
    }

    /// The pair (w₁, w₂) written as a product word: left(w₁) · right(w₂).
    pub fn pair(&self, w1: &Word, w2: &Word) -> Word {
        self.embed_left(w1).concat(&self.embed_right(w2))
    }

    /// Projection onto the left factor: deletes right-factor letters.
    pub fn project_left(&self, w: &Word) -> Word {
        self.project(w, &self.left)
    }

    /// Projection onto the right factor: deletes left-factor letters.
    pub fn project_right(&self, w: &Word) -> Word {
        self.project(w, &self.right)
    }

    fn transcribe(&self, w: &Word, map: &[u32]) -> Word {
        Word::from_reduced(
            w.letters()
                .iter()
                .map(|l| Letter::new(map[l.generator() as usize], l.is_inverse()))
                .collect(),
        )
    }

    fn project(&self, w: &Word, map: &[u32]) -> Word {
        // inverse of the embedding on its image, identity-killing elsewhere
        let mut back = vec![None; self.presentation.alphabet().len()];
        for (i, &g) in map.iter().enumerate() {
            back[g as usize] = Some(i as u32);
        }
        let letters: Vec<Letter> = w
            .letters()
            .iter()
            .filter_map(|l| back[l.generator() as usize].map(|g| Letter::new(g, l.is_inverse())))
            .collect();
        Word::reduce(&letters)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2() -> Presentation {
        Presentation::parse("gens: x y\nrel: x y x^-1 y^-1\n").unwrap()
    }

    fn z3() -> Presentation {
        Presentation::parse("gens: x\nrel: x^3\n").unwrap()
    }

    #[test]
    fn parse_normalizes_and_reports_l() {
        let p = z2();
        assert_eq!(p.alphabet().names(), ["x", "y"]);
        assert_eq!(p.relators().len(), 1);
        assert_eq!(p.max_relator_len(), 4);
        assert_eq!(z3().max_relator_len(), 3);
        let bs = Presentation::parse("gens: x y\nrel: x^2 y x^-2 y^-1\n").unwrap();
        assert_eq!(bs.max_relator_len(), 6);
        // cyclic reduction: x (xyx⁻¹y⁻¹) x⁻¹ normalizes to the commutator
        let conj = Presentation::parse("gens: x y\nrel: x x y x^-1 y^-1 x^-1\n").unwrap();
        assert_eq!(conj.relators(), z2().relators());
        // exact duplicates dropped
        let dup = Presentation::parse("gens: x\nrel: x^3\nrel: x^3\n").unwrap();
        assert_eq!(dup.relators().len(), 1);
        // free presentations allowed
        let free = Presentation::parse("gens: x y\n").unwrap();
        assert!(free.relators().is_empty());
        assert_eq!(free.max_relator_len(), 0);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        assert_eq!(
            Presentation::parse("gens: x\nrel: x x^-1\n"),
            Err(PresentationError::EmptyRelator { line: 2 })
        );
        assert!(matches!(
            Presentation::parse("rel: x\n"),
            Err(PresentationError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            Presentation::parse("gens: x\nrel: z\n"),
            Err(PresentationError::Word { line: 2, .. })
        ));
        assert!(matches!(
            Presentation::parse("gens: x\nbogus\n"),
            Err(PresentationError::Syntax { line: 2, .. })
        ));
    }

    #[test]
    fn serializer_is_bit_exact() {
        let text = "gens: x y\nrel: x y x^-1 y^-1\n";
        let p = Presentation::parse(text).unwrap();
        assert_eq!(p.serialize(), text);
        // comments and runs normalize away
        let q = Presentation::parse("# a comment\ngens: x y # trailing\nrel: x y y x^-1 y^-1 y^-1\n")
            .unwrap();
        assert_eq!(q.serialize(), "gens: x y\nrel: x y^2 x^-1 y^-2\n");
        let rt = Presentation::parse(&q.serialize()).unwrap();
        assert_eq!(rt.serialize(), q.serialize());
    }

    #[test]
    fn symmetrize_counts() {
        assert_eq!(z3().symmetrize().len(), 2); // {x³, x⁻³}
        let xy = Presentation::parse("gens: x y\nrel: x y\n").unwrap();
        let closure = xy.symmetrize();
        assert_eq!(closure.len(), 4); // {xy, yx, y⁻¹x⁻¹, x⁻¹y⁻¹}
        let a = xy.alphabet();
        for s in ["x y", "y x", "y^-1 x^-1", "x^-1 y^-1"] {
            assert!(closure.contains(&a.parse(s).unwrap()));
        }
        assert_eq!(z2().symmetrize().len(), 8);
    }

    #[test]
    fn symmetrize_is_idempotent_in_effect() {
        let p = z2();
        let closure = p.symmetrize();
        let again = Presentation::new(p.alphabet().clone(), closure.words().to_vec())
            .unwrap()
            .symmetrize();
        assert_eq!(closure.words(), again.words());
    }

    /// Brute-force oracle: maximum |lcp(u, v)| / |u| over all ordered pairs
    /// of distinct closure elements.
    fn lambda_brute(p: &Presentation) -> Ratio<u64> {
        let closure = p.symmetrize();
        let mut best = Ratio::new(0, 1);
        for u in closure.words() {
            for v in closure.words() {
                if u == v {
                    continue;
                }
                let lcp = u
                    .letters()
                    .iter()
                    .zip(v.letters())
                    .take_while(|(a, b)| a == b)
                    .count() as u64;
                if lcp > 0 {
                    best = best.max(Ratio::new(lcp, u.len() as u64));
                }
            }
        }
        best
    }

    #[test]
    fn lambda_matches_brute_force_oracle() {
        // aperiodic single relator x y x y² x y³: longest piece y x y² at
        // two rotations, so λ = 4/9
        let p = Presentation::parse("gens: x y\nrel: x y x y^2 x y^3\n").unwrap();
        let fast = p.small_cancellation_lambda().unwrap();
        assert_eq!(fast, lambda_brute(&p));
        assert_eq!(fast, Ratio::new(4, 9));

        // ℤ²: piece x (and y, …), relator length 4 — not C'(1/6)
        let fast = z2().small_cancellation_lambda().unwrap();
        assert_eq!(fast, lambda_brute(&z2()));
        assert_eq!(fast, Ratio::new(1, 4));
        assert!(!z2().is_c_prime_sixth());

        // ⟨x|x³⟩: closure is {x³, x⁻³}; distinct elements share no prefix,
        // so the metric is 0 under the distinct-element convention
        let fast = z3().small_cancellation_lambda().unwrap();
        assert_eq!(fast, lambda_brute(&z3()));
        assert_eq!(fast, Ratio::new(0, 1));

        assert_eq!(
            Presentation::free(Alphabet::new(["x"]).unwrap()).small_cancellation_lambda(),
            Err(PresentationError::NoRelators)
        );
    }

    #[test]
    fn lambda_invariant_under_relabeling() {
        let p = Presentation::parse("gens: x y\nrel: x y x y^2 x y^3\n").unwrap();
        // swap the generator roles
        let q = Presentation::parse("gens: u v\nrel: v u v u^2 v u^3\n").unwrap();
        assert_eq!(
            p.small_cancellation_lambda().unwrap(),
            q.small_cancellation_lambda().unwrap()
        );
    }

    #[test]
    fn direct_product_examples() {
        // F2 × F2: clash renames, 4 commutators
        let f2 = Presentation::free(Alphabet::new(["x", "y"]).unwrap());
        let prod = direct_product(&f2, &f2);
        assert_eq!(prod.presentation.alphabet().names(), ["x_1", "y_1", "x_2", "y_2"]);
        assert_eq!(prod.presentation.relators().len(), 4);

        // ⟨x|x³⟩ × ⟨y|y³⟩ = ℤ/3 × ℤ/3: no clash, {x³, y³, [x,y]}
        let zy3 = Presentation::parse("gens: y\nrel: y^3\n").unwrap();
        let prod = direct_product(&z3(), &zy3);
        assert_eq!(prod.presentation.alphabet().names(), ["x", "y"]);
        assert_eq!(prod.presentation.relators().len(), 3);
        assert_eq!(prod.presentation.serialize(), "gens: x y\nrel: x^3\nrel: y^3\nrel: x y x^-1 y^-1\n");

        // ℤ² × ℤ²: 1 + 1 + 4 relators
        let prod = direct_product(&z2(), &z2());
        assert_eq!(prod.presentation.alphabet().len(), 4);
        assert_eq!(prod.presentation.relators().len(), 6);
    }

    #[test]
    fn product_embeddings_and_projections() {
        let f2 = Presentation::free(Alphabet::new(["x", "y"]).unwrap());
        let prod = direct_product(&f2, &f2);
        let a = f2.alphabet();
        let w1 = a.parse("x y^-1").unwrap();
        let w2 = a.parse("y^2").unwrap();
        let pair = prod.pair(&w1, &w2);
        assert_eq!(
            prod.presentation.alphabet().format_word(&pair),
            "x_1 y_1^-1 y_2^2"
        );
        assert_eq!(prod.project_left(&pair), w1);
        assert_eq!(prod.project_right(&pair), w2);
    }

    #[test]
    fn name_clash_escalation() {
        let p1 = Presentation::free(Alphabet::new(["x", "x_1"]).unwrap());
        let p2 = Presentation::free(Alphabet::new(["x"]).unwrap());
        let prod = direct_product(&p1, &p2);
        let names = prod.presentation.alphabet().names();
        assert_eq!(names.len(), 3);
        let unique: HashSet<&String> = names.iter().collect();
        assert_eq!(unique.len(), 3, "escalation must keep names distinct");
    }
}
