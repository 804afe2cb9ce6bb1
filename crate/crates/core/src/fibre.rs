//! Fibre products of a group with itself over a quotient.
//!
//! Given G = ⟨X | R⟩ and a subset A ⊆ X whose normal closure is the kernel
//! N of G → Q = ⟨X | R ∪ A⟩, the fibre product is
//! P = {(g₁, g₂) ∈ G × G : g₁ ≡ g₂ mod N}, generated by the diagonal
//! letters (x, x) and the one-sided letters (a, 1). The module provides
//! membership, the P-word metric, distortion sampling, and the
//! constructive lift of quotient-area certificates to short P-words — the
//! mechanism that transfers isoperimetric lower bounds into distortion.

use std::collections::{HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::area::{AreaDecomposition, AreaEngine, Exactness, Sample};
use crate::geometry::BallIndex;
use crate::oracle::{equal, OracleStats, ProductOracle, Verdict, WordOracle};
use crate::presentation::{
    direct_product, Presentation, PresentationError, SymmetrizedClosure,
};
use crate::word::{Alphabet, Letter, Word};

#[derive(Debug, Error)]
pub enum FibreError {
    #[error("`{name}` is not a generator of the base presentation")]
    UnknownName { name: String },
    #[error("the system has no kernel letters")]
    NoKernelLetters,
    #[error("the pair is certified to lie outside the fibre product")]
    NotAMember,
    #[error("the certificate does not verify over the quotient presentation")]
    InvalidCertificate,
    #[error("a kept factor's relator is not a single kernel generator")]
    MalformedFactor,
    #[error("the lifted word failed re-verification in the direct square")]
    VerificationFailed,
    #[error("the direct-square oracle could not confirm the lifted word")]
    VerificationInconclusive,
    #[error("deleting the kernel letters does not carry the base presentation onto the target")]
    NotARetraction,
    #[error("this system decides its quotient by deleting kernel letters; area certificates cannot be lifted through it")]
    KernelLiftUnavailable,
    #[error(transparent)]
    Presentation(#[from] PresentationError),
}

/// A word over the fibre-product generators. Diagonal letters are named
/// `d_<x>` and transcribe to (x, x); kernel letters are named `n_<a>` and
/// transcribe to (a, 1).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairWord {
    word: Word,
}

impl PairWord {
    pub fn new(word: Word) -> PairWord {
        PairWord { word }
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }
}

/// Search caps for distortion sampling: how deep the fibre-product ball is
/// grown and how much budget the base-group ball index may spend on finite
/// quotients.
#[derive(Debug, Clone, Copy)]
pub struct DistortionCaps {
    pub p_radius_cap: usize,
    pub quotient_budget: u64,
}

impl Default for DistortionCaps {
    fn default() -> DistortionCaps {
        DistortionCaps { p_radius_cap: 8, quotient_budget: 50_000_000 }
    }
}

/// A distortion lower-bound witness: γ ∈ N of base length ≤ n whose pair
/// (γ, 1) is as deep in the fibre-product metric as the search could
/// certify.
#[derive(Debug, Clone, Serialize)]
pub struct DistortionWitness {
    pub gamma: String,
    pub p_len: Option<usize>,
    /// False when some candidate's place in the metric was left uncertified.
    pub exact: bool,
}

/// The ball of the fibre product up to a radius, keyed by best-effort
/// canonical forms of the coordinate pair. Keys never merge distinct
/// elements; one element may appear under several keys when the base group
/// has no certified normal form, in which case lookups fall back to
/// oracle comparisons in depth order.
pub struct PairBall {
    lengths: HashMap<(Word, Word), usize>,
    by_depth: Vec<((Word, Word), usize)>,
    radius: usize,
}

impl PairBall {
    /// Coordinate keys with their first-visit depths, in discovery order
    /// (nondecreasing depth).
    pub fn entries(&self) -> &[((Word, Word), usize)] {
        &self.by_depth
    }

    pub fn radius(&self) -> usize {
        self.radius
    }
}

/// One fibre-product system: the base group, the derived quotient, the
/// product generators, and the oracles everything else consults.
pub struct FibreSystem {
    g: Presentation,
    q: Presentation,
    a_names: Vec<String>,
    a_indices: Vec<u32>,
    p_alphabet: Alphabet,
    base_closure: SymmetrizedClosure,
    q_engine: AreaEngine,
    oracle_g: Box<dyn WordOracle>,
    oracle_q: Box<dyn WordOracle>,
    product: ProductOracle,
    /// Present when the quotient is reached by deleting kernel letters
    /// rather than by adding single-letter relators: maps each base
    /// generator to its index in the target alphabet, kernel letters to
    /// nothing. Such systems cannot lift area certificates (the quotient
    /// relators are not kernel generators).
    retraction_keep: Option<Vec<Option<u32>>>,
}

/// Answers quotient questions for base words by deleting the kernel letters
/// and consulting an oracle over the target presentation. Sound exactly when
/// the deletion map is the quotient by the kernel letters' normal closure,
/// which `FibreSystem::with_retraction` certifies syntactically.
struct RetractionOracle {
    keep: Vec<Option<u32>>,
    inner: Box<dyn WordOracle>,
}

impl RetractionOracle {
    fn retract(&self, w: &Word) -> Word {
        let letters: Vec<Letter> = w
            .letters()
            .iter()
            .filter_map(|l| {
                self.keep[l.generator() as usize].map(|k| Letter::new(k, l.is_inverse()))
            })
            .collect();
        Word::reduce(&letters)
    }
}

impl WordOracle for RetractionOracle {
    fn query(&self, w: &Word) -> Verdict {
        self.inner.query(&self.retract(w))
    }

    fn normal_form(&self, w: &Word) -> Option<Word> {
        self.inner.normal_form(&self.retract(w))
    }

    fn stats(&self) -> OracleStats {
        self.inner.stats()
    }
}

fn oracle_for(p: &Presentation, radius: usize, move_cap: u64) -> Box<dyn WordOracle> {
    crate::oracle::strongest_oracle(p, radius, move_cap)
}

/// Builds a fibre system with default oracle budgets.
pub fn make_fibre_system(g: &Presentation, a: &[&str]) -> Result<FibreSystem, FibreError> {
    FibreSystem::with_budgets(g, a, 12, 5)
}

/// Builds a retraction-mode fibre system with default oracle budgets: the
/// quotient of `g` by the kernel letters `a` must be witnessed by deleting
/// those letters onto `target`.
pub fn make_retraction_system(
    g: &Presentation,
    a: &[&str],
    target: &Presentation,
) -> Result<FibreSystem, FibreError> {
    FibreSystem::with_retraction(g, a, target, 12, 5)
}

/// The pair-generator alphabet: a diagonal letter `d_<x>` per base generator
/// followed by a one-sided letter `n_<a>` per kernel generator.
fn pair_alphabet_for(g: &Presentation, a_names: &[String]) -> Result<Alphabet, FibreError> {
    let p_names: Vec<String> = g
        .alphabet()
        .names()
        .iter()
        .map(|n| format!("d_{n}"))
        .chain(a_names.iter().map(|n| format!("n_{n}")))
        .collect();
    Ok(Alphabet::new(p_names).map_err(PresentationError::from)?)
}

/// Resolves the requested kernel names to alphabet indices, preserving order
/// and dropping repeats.
fn resolve_kernel(
    g: &Presentation,
    a: &[&str],
) -> Result<(Vec<String>, Vec<u32>), FibreError> {
    let mut a_names: Vec<String> = Vec::new();
    let mut a_indices: Vec<u32> = Vec::new();
    for name in a {
        let idx = g
            .alphabet()
            .names()
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| FibreError::UnknownName { name: (*name).to_string() })?;
        if !a_indices.contains(&(idx as u32)) {
            a_names.push((*name).to_string());
            a_indices.push(idx as u32);
        }
    }
    Ok((a_names, a_indices))
}

impl FibreSystem {
    pub fn with_budgets(
        g: &Presentation,
        a: &[&str],
        oracle_radius: usize,
        oracle_move_cap: u64,
    ) -> Result<FibreSystem, FibreError> {
        let (a_names, a_indices) = resolve_kernel(g, a)?;
        let mut q_relators: Vec<Word> = g.relators().to_vec();
        for &idx in &a_indices {
            q_relators.push(Word::from_reduced(vec![Letter::new(idx, false)]));
        }
        let q = Presentation::new(g.alphabet().clone(), q_relators)
            .map_err(PresentationError::from)?;
        let p_alphabet = pair_alphabet_for(g, &a_names)?;
        let product = ProductOracle::new(
            direct_product(g, g),
            oracle_for(g, oracle_radius, oracle_move_cap),
            oracle_for(g, oracle_radius, oracle_move_cap),
        );
        Ok(FibreSystem {
            g: g.clone(),
            q: q.clone(),
            a_names,
            a_indices,
            p_alphabet,
            base_closure: g.symmetrize(),
            q_engine: AreaEngine::new(&q),
            oracle_g: oracle_for(g, oracle_radius, oracle_move_cap),
            oracle_q: oracle_for(&q, oracle_radius, oracle_move_cap),
            product,
            retraction_keep: None,
        })
    }

    /// Builds a system whose quotient questions are decided by deleting the
    /// kernel letters and consulting an oracle for `target`. This is the
    /// right mode for compiled presentations whose own relators are too long
    /// for a direct quotient oracle but which, by construction, retract onto
    /// the small presentation they were compiled from.
    ///
    /// The constructor certifies the retraction before trusting it: the
    /// non-kernel generators of `g` must be exactly `target`'s generators in
    /// order, and deleting the kernel letters from every relator of `g`
    /// (then reducing cyclically and dropping the empties) must reproduce
    /// `target`'s relator set. Those two checks make the deletion map the
    /// quotient of `g` by the normal closure of the kernel letters, so the
    /// target oracle answers quotient queries soundly and completely to the
    /// extent it can decide `target` itself.
    pub fn with_retraction(
        g: &Presentation,
        a: &[&str],
        target: &Presentation,
        oracle_radius: usize,
        oracle_move_cap: u64,
    ) -> Result<FibreSystem, FibreError> {
        let (a_names, a_indices) = resolve_kernel(g, a)?;
        if a_names.is_empty() {
            return Err(FibreError::NoKernelLetters);
        }
        let mut keep: Vec<Option<u32>> = vec![None; g.alphabet().len()];
        let mut kept_names: Vec<String> = Vec::new();
        for (i, name) in g.alphabet().names().iter().enumerate() {
            if !a_indices.contains(&(i as u32)) {
                keep[i] = Some(kept_names.len() as u32);
                kept_names.push(name.clone());
            }
        }
        if kept_names != target.alphabet().names() {
            return Err(FibreError::NotARetraction);
        }
        let retract = |w: &Word| -> Word {
            let letters: Vec<Letter> = w
                .letters()
                .iter()
                .filter_map(|l| {
                    keep[l.generator() as usize].map(|k| Letter::new(k, l.is_inverse()))
                })
                .collect();
            Word::reduce(&letters)
        };
        let mut deleted: HashSet<Word> = HashSet::new();
        for r in g.relators() {
            let (core, _) = retract(r).cyclic_reduce();
            if !core.is_empty() {
                deleted.insert(core);
            }
        }
        let expected: HashSet<Word> = target.relators().iter().cloned().collect();
        if deleted != expected {
            return Err(FibreError::NotARetraction);
        }
        let p_alphabet = pair_alphabet_for(g, &a_names)?;
        let product = ProductOracle::new(
            direct_product(g, g),
            oracle_for(g, oracle_radius, oracle_move_cap),
            oracle_for(g, oracle_radius, oracle_move_cap),
        );
        let oracle_q = Box::new(RetractionOracle {
            keep: keep.clone(),
            inner: oracle_for(target, oracle_radius, oracle_move_cap),
        });
        Ok(FibreSystem {
            g: g.clone(),
            q: target.clone(),
            a_names,
            a_indices,
            p_alphabet,
            base_closure: g.symmetrize(),
            q_engine: AreaEngine::new(target),
            oracle_g: oracle_for(g, oracle_radius, oracle_move_cap),
            oracle_q,
            product,
            retraction_keep: Some(keep),
        })
    }

    pub fn base(&self) -> &Presentation {
        &self.g
    }

    pub fn quotient(&self) -> &Presentation {
        &self.q
    }

    pub fn kernel_names(&self) -> &[String] {
        &self.a_names
    }

    pub fn pair_alphabet(&self) -> &Alphabet {
        &self.p_alphabet
    }

    pub fn base_oracle(&self) -> &dyn WordOracle {
        self.oracle_g.as_ref()
    }

    pub fn quotient_oracle(&self) -> &dyn WordOracle {
        self.oracle_q.as_ref()
    }

    pub fn product_oracle(&self) -> &ProductOracle {
        &self.product
    }

    pub fn quotient_engine(&self) -> &AreaEngine {
        &self.q_engine
    }

    /// The isoperimetric constant of the lift: the longest relator of the
    /// derived quotient presentation.
    pub fn longest_relator(&self) -> usize {
        self.q.max_relator_len()
    }

    /// (L+1)·area + |w|: the guaranteed length cap for a lift of a
    /// noise-bounded certificate of `w`.
    pub fn lift_length_bound(&self, d: &AreaDecomposition, w_len: usize) -> u64 {
        (self.longest_relator() as u64 + 1) * d.area() + w_len as u64
    }

    pub fn pair_generator_count(&self) -> usize {
        self.p_alphabet.len()
    }

    /// False for retraction-mode systems, whose quotient relators are not
    /// single kernel letters and therefore cannot be transcribed into
    /// one-sided pair generators.
    pub fn supports_kernel_lift(&self) -> bool {
        self.retraction_keep.is_none()
    }

    /// The image of a base word in the quotient presentation's alphabet:
    /// the word itself in standard systems, the kernel-deleted word in
    /// retraction systems. Suitable as input to the quotient area engine.
    pub fn quotient_image(&self, w: &Word) -> Word {
        match &self.retraction_keep {
            None => w.clone(),
            Some(keep) => {
                let letters: Vec<Letter> = w
                    .letters()
                    .iter()
                    .filter_map(|l| {
                        keep[l.generator() as usize].map(|k| Letter::new(k, l.is_inverse()))
                    })
                    .collect();
                Word::reduce(&letters)
            }
        }
    }

    /// Parses a pair word in the `d_*`/`n_*` alphabet.
    pub fn parse_pair_word(&self, s: &str) -> Result<PairWord, FibreError> {
        let word = self
            .p_alphabet
            .parse(s)
            .map_err(PresentationError::from)?;
        Ok(PairWord::new(word))
    }

    /// Coordinates of a pair word in the direct square: `d_x` acts as (x, x),
    /// `n_a` as (a, 1).
    pub fn transcribe(&self, pw: &PairWord) -> (Word, Word) {
        let rank = self.g.alphabet().len() as u32;
        let mut left = Vec::with_capacity(pw.len());
        let mut right = Vec::with_capacity(pw.len());
        for &l in pw.word().letters() {
            let gen = l.generator();
            if gen < rank {
                left.push(Letter::new(gen, l.is_inverse()));
                right.push(Letter::new(gen, l.is_inverse()));
            } else {
                let base = self.a_indices[(gen - rank) as usize];
                left.push(Letter::new(base, l.is_inverse()));
            }
        }
        (Word::reduce(&left), Word::reduce(&right))
    }

    /// Fibre-product membership: (g₁, g₂) ∈ P iff g₂⁻¹g₁ dies in Q.
    pub fn membership(&self, g1: &Word, g2: &Word) -> Verdict {
        self.oracle_q.query(&g2.invert().concat(g1))
    }

    /// The best-effort canonical key for a coordinate word.
    fn coordinate_key(&self, w: &Word) -> Word {
        self.oracle_g.normal_form(w).unwrap_or_else(|| w.clone())
    }

    /// Grows the fibre-product ball to `radius_cap` by breadth-first search
    /// over the pair generators, recording the first-visit depth per key.
    pub fn pair_ball(&self, radius_cap: usize) -> PairBall {
        let rank = self.g.alphabet().len() as u32;
        let mut moves: Vec<(Word, Word)> = Vec::new();
        for gen in 0..rank {
            for inv in [false, true] {
                let d = Word::from_reduced(vec![Letter::new(gen, inv)]);
                moves.push((d.clone(), d));
            }
        }
        for &idx in &self.a_indices {
            for inv in [false, true] {
                let a = Word::from_reduced(vec![Letter::new(idx, inv)]);
                moves.push((a, Word::empty()));
            }
        }
        let mut ball =
            PairBall { lengths: HashMap::new(), by_depth: Vec::new(), radius: radius_cap };
        let start = (Word::empty(), Word::empty());
        ball.lengths.insert(start.clone(), 0);
        ball.by_depth.push((start.clone(), 0));
        let mut frontier = vec![start];
        for depth in 1..=radius_cap {
            let mut next = Vec::new();
            for (s1, s2) in &frontier {
                for (d1, d2) in &moves {
                    let n1 = s1.concat(d1);
                    let n2 = s2.concat(d2);
                    let key = (self.coordinate_key(&n1), self.coordinate_key(&n2));
                    if ball.lengths.contains_key(&key) {
                        continue;
                    }
                    ball.lengths.insert(key.clone(), depth);
                    ball.by_depth.push((key, depth));
                    next.push((n1, n2));
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        ball
    }

    /// The certified first-visit depth of (g₁, g₂) in a grown ball, i.e.
    /// its geodesic length in the pair generators when the lookup can be
    /// certified.
    pub fn ball_lookup(&self, ball: &PairBall, g1: &Word, g2: &Word) -> Option<usize> {
        let key = (self.coordinate_key(g1), self.coordinate_key(g2));
        if let Some(&depth) = ball.lengths.get(&key) {
            return Some(depth);
        }
        if self.oracle_g.normal_form(g1).is_some() && self.oracle_g.normal_form(g2).is_some() {
            // canonical keys: a miss is a genuine miss
            return None;
        }
        // no canonical form: scan stored states in depth order and let the
        // oracle decide; the first certified hit is the geodesic depth
        for ((s1, s2), depth) in &ball.by_depth {
            match (
                equal(self.oracle_g.as_ref(), s1, g1),
                equal(self.oracle_g.as_ref(), s2, g2),
            ) {
                (Verdict::Trivial, Verdict::Trivial) => return Some(*depth),
                (Verdict::Unknown, _) | (_, Verdict::Unknown) => return None,
                _ => {}
            }
        }
        None
    }

    /// Geodesic length of (g₁, g₂) in the pair generators, searched up to
    /// `radius_cap`. `Ok(None)` means the search could not certify a length
    /// within the cap.
    pub fn p_length(
        &self,
        g1: &Word,
        g2: &Word,
        radius_cap: usize,
    ) -> Result<Option<usize>, FibreError> {
        match self.membership(g1, g2) {
            Verdict::Nontrivial => return Err(FibreError::NotAMember),
            Verdict::Unknown => return Ok(None),
            Verdict::Trivial => {}
        }
        let ball = self.pair_ball(radius_cap);
        Ok(self.ball_lookup(&ball, g1, g2))
    }

    /// Turns a verified quotient-area certificate for w ∈ N into a pair
    /// word equal to (w, 1): base-trivial factors are deleted, conjugators
    /// transcribe to diagonal letters, and the surviving kernel letters to
    /// one-sided generators. The result re-verifies through the
    /// direct-square oracle and its length is at most
    /// noise + area ≤ (L+1)·area + |w| for noise-bounded certificates.
    pub fn lift_area_certificate(
        &self,
        w: &Word,
        d: &AreaDecomposition,
    ) -> Result<PairWord, FibreError> {
        if self.retraction_keep.is_some() {
            return Err(FibreError::KernelLiftUnavailable);
        }
        if !self.q_engine.verify_decomposition(w, d) {
            return Err(FibreError::InvalidCertificate);
        }
        let rank = self.g.alphabet().len() as u32;
        let mut letters: Vec<Letter> = Vec::new();
        for f in &d.factors {
            if self.base_closure.contains(&f.relator) {
                continue; // already trivial in the base group
            }
            if f.relator.len() != 1 {
                return Err(FibreError::MalformedFactor);
            }
            let r = f.relator.letters()[0];
            let pos = self
                .a_indices
                .iter()
                .position(|&k| k == r.generator())
                .ok_or(FibreError::MalformedFactor)?;
            // θ⁻¹ (a,1) θ with θ in diagonal letters, which share indices
            // with the base alphabet
            letters.extend_from_slice(f.conjugator.invert().letters());
            letters.push(Letter::new(rank + pos as u32, r.is_inverse()));
            letters.extend_from_slice(f.conjugator.letters());
        }
        let pair = PairWord::new(Word::reduce(&letters));
        let (left, right) = self.transcribe(&pair);
        match (
            equal(self.oracle_g.as_ref(), &left, w),
            self.oracle_g.query(&right),
        ) {
            (Verdict::Trivial, Verdict::Trivial) => Ok(pair),
            (Verdict::Nontrivial, _) | (_, Verdict::Nontrivial) => {
                Err(FibreError::VerificationFailed)
            }
            _ => Err(FibreError::VerificationInconclusive),
        }
    }

    /// Samples the distortion function: the largest certified pair-metric
    /// length over members (g₁, g₂) with |g₁| + |g₂| ≤ n. Exact only when
    /// the base ball was complete, every membership resolved, and every
    /// member's length was certified within the caps.
    pub fn distortion(&self, n: usize, caps: &DistortionCaps) -> Sample {
        let ball = BallIndex::build(&self.g, self.oracle_g.as_ref(), n, caps.quotient_budget);
        let pball = self.pair_ball(caps.p_radius_cap);
        let mut exactness = Exactness::Exact;
        if !ball.complete() {
            exactness = exactness.join(Exactness::LowerBound);
        }
        let mut value = 0u64;
        for g1 in ball.elements() {
            for g2 in ball.elements() {
                if g1.len() + g2.len() > n {
                    continue;
                }
                match self.membership(g1, g2) {
                    Verdict::Nontrivial => continue,
                    Verdict::Unknown => {
                        exactness = exactness.join(Exactness::LowerBound);
                        continue;
                    }
                    Verdict::Trivial => {}
                }
                match self.ball_lookup(&pball, g1, g2) {
                    Some(l) => value = value.max(l as u64),
                    None => {
                        // deeper than the pair-ball cap, or uncertifiable
                        exactness = exactness.join(Exactness::LowerBound);
                    }
                }
            }
        }
        Sample { n: n as u64, value, exactness }
    }

    /// The hardest one-sided member at scale n: γ ∈ N with |γ| ≤ n
    /// maximizing the certified length of (γ, 1). These pairs witness that
    /// distortion is driven by the kernel: |(γₙ, 1)| ≥ Dist(n) − n.
    pub fn hard_distortion_witness(&self, n: usize, caps: &DistortionCaps) -> DistortionWitness {
        let ball = BallIndex::build(&self.g, self.oracle_g.as_ref(), n, caps.quotient_budget);
        let pball = self.pair_ball(caps.p_radius_cap);
        let mut exact = ball.complete();
        let mut best: Option<(Word, usize)> = None;
        for gamma in ball.elements() {
            if gamma.len() > n {
                continue;
            }
            match self.oracle_q.query(gamma) {
                Verdict::Nontrivial => continue,
                Verdict::Unknown => {
                    exact = false;
                    continue;
                }
                Verdict::Trivial => {}
            }
            match self.ball_lookup(&pball, gamma, &Word::empty()) {
                Some(l) => {
                    if best.as_ref().map_or(true, |(_, b)| l > *b) {
                        best = Some((gamma.clone(), l));
                    }
                }
                None => exact = false,
            }
        }
        let (gamma, p_len) = match best {
            Some((g, l)) => (g, Some(l)),
            None => (Word::empty(), None),
        };
        DistortionWitness {
            gamma: self.g.alphabet().format_word(&gamma),
            p_len,
            exact,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::area::AreaCaps;
    use crate::word::Word;

    fn f2() -> Presentation {
        Presentation::parse("gens: x y\n").unwrap()
    }

    fn word(p: &Presentation, s: &str) -> Word {
        p.alphabet().parse(s).unwrap()
    }

    fn kernel_x_system() -> FibreSystem {
        make_fibre_system(&f2(), &["x"]).unwrap()
    }

    #[test]
    fn system_derives_quotient_and_generators() {
        let sys = kernel_x_system();
        // the quotient adds the single-letter relator x
        assert_eq!(sys.quotient().relators(), &[word(&f2(), "x")]);
        assert_eq!(sys.pair_generator_count(), 3);
        assert_eq!(
            sys.pair_alphabet().names(),
            &["d_x".to_string(), "d_y".to_string(), "n_x".to_string()]
        );
        assert_eq!(sys.longest_relator(), 1);

        // empty kernel: the quotient is the base and the product is the
        // diagonal
        let diag = make_fibre_system(&f2(), &[]).unwrap();
        assert!(diag.quotient().relators().is_empty());
        assert_eq!(diag.pair_generator_count(), 2);

        assert!(matches!(
            make_fibre_system(&f2(), &["z"]),
            Err(FibreError::UnknownName { .. })
        ));
    }

    #[test]
    fn membership_tests_quotient_image() {
        let p = f2();
        let sys = kernel_x_system();
        // diagonal pairs are always members
        assert_eq!(sys.membership(&word(&p, "x y"), &word(&p, "x y")), Verdict::Trivial);
        // x dies in Q, y does not
        assert_eq!(sys.membership(&word(&p, "x"), &Word::empty()), Verdict::Trivial);
        assert_eq!(sys.membership(&word(&p, "y"), &Word::empty()), Verdict::Nontrivial);

        let diag = make_fibre_system(&f2(), &[]).unwrap();
        assert_eq!(diag.membership(&word(&p, "x"), &Word::empty()), Verdict::Nontrivial);
    }

    #[test]
    fn pair_lengths_frozen_values() {
        let p = f2();
        let sys = kernel_x_system();
        assert_eq!(sys.p_length(&Word::empty(), &Word::empty(), 4).unwrap(), Some(0));
        // (x², 1) needs two kernel letters
        assert_eq!(sys.p_length(&word(&p, "x^2"), &Word::empty(), 6).unwrap(), Some(2));
        // (1, x) = (x, x)⁻¹ · (x, 1) … shortest is d_x⁻¹ read after n_x
        assert_eq!(sys.p_length(&Word::empty(), &word(&p, "x"), 6).unwrap(), Some(2));
        // a conjugated kernel letter pays the conjugator diagonally
        assert_eq!(
            sys.p_length(&word(&p, "y x y^-1"), &Word::empty(), 6).unwrap(),
            Some(3)
        );
        assert!(matches!(
            sys.p_length(&word(&p, "y"), &Word::empty(), 4),
            Err(FibreError::NotAMember)
        ));
    }

    #[test]
    fn diagonal_pairs_have_base_length() {
        let p = f2();
        let diag = make_fibre_system(&f2(), &[]).unwrap();
        for s in ["1", "x", "x y", "x y^-1 x", "y^2 x^2"] {
            let g = word(&p, s);
            assert_eq!(
                diag.p_length(&g, &g, 6).unwrap(),
                Some(g.len()),
                "γ = {s}"
            );
        }
    }

    #[test]
    fn transcription_reads_coordinates() {
        let sys = kernel_x_system();
        let pw = sys.parse_pair_word("d_y^-1 n_x d_y n_x^-1").unwrap();
        let (left, right) = sys.transcribe(&pw);
        assert_eq!(left, word(&f2(), "y^-1 x y x^-1"));
        assert_eq!(right, Word::empty());
    }

    #[test]
    fn lift_of_a_kernel_letter_is_one_sided() {
        let p = f2();
        let sys = kernel_x_system();
        let w = word(&p, "x");
        let caps = AreaCaps::default_for(&w, sys.quotient());
        let crate::area::AreaOutcome::Found { certificate, .. } =
            sys.quotient_engine().area(&w, &caps)
        else {
            panic!("a kernel letter is null in Q");
        };
        let lifted = sys.lift_area_certificate(&w, &certificate).unwrap();
        assert_eq!(lifted.word(), &sys.parse_pair_word("n_x").unwrap().word().clone());
        assert_eq!(lifted.len(), 1);
    }

    #[test]
    fn lift_of_a_conjugate_pays_the_conjugator() {
        let p = f2();
        let sys = kernel_x_system();
        let w = word(&p, "y^-1 x y");
        let caps = AreaCaps::default_for(&w, sys.quotient());
        let outcome = sys.quotient_engine().area(&w, &caps);
        let crate::area::AreaOutcome::Found { area, certificate, .. } = outcome else {
            panic!("conjugate of a kernel letter must be null in Q");
        };
        assert_eq!(area, 1);
        let lifted = sys.lift_area_certificate(&w, &certificate).unwrap();
        // (y,y)⁻¹ (x,1) (y,y): three pair letters, noise 2 + area 1
        assert_eq!(lifted.len(), 3);
        assert_eq!(lifted.len() as u64, certificate.noise + area);
        assert!(lifted.len() as u64 <= sys.lift_length_bound(&certificate, w.len()));
        let (left, right) = sys.transcribe(&lifted);
        assert_eq!(left, w);
        assert!(right.is_empty());
    }

    #[test]
    fn lift_respects_the_length_bound_on_a_sample() {
        let p = f2();
        let sys = kernel_x_system();
        for s in ["x", "x^2", "y^-1 x y", "y^-1 x y x", "x y x^-1 y^-1", "y x^2 y^-1 x"] {
            let w = word(&p, s);
            let caps = AreaCaps::default_for(&w, sys.quotient());
            let outcome = sys.quotient_engine().area(&w, &caps);
            let crate::area::AreaOutcome::Found { certificate, .. } = outcome else {
                panic!("{s} should be null in Q");
            };
            let lifted = sys.lift_area_certificate(&w, &certificate).unwrap();
            assert!(certificate.noise_bound_met, "w = {s}");
            assert!(
                lifted.len() as u64 <= sys.lift_length_bound(&certificate, w.len()),
                "w = {s}: lift {} exceeds bound {}",
                lifted.len(),
                sys.lift_length_bound(&certificate, w.len())
            );
            let (left, right) = sys.transcribe(&lifted);
            assert_eq!(equal(sys.base_oracle(), &left, &w), Verdict::Trivial, "w = {s}");
            assert!(right.is_empty(), "w = {s}");
        }
    }

    #[test]
    fn lift_rejects_broken_certificates() {
        let p = f2();
        let sys = kernel_x_system();
        let w = word(&p, "x");
        let caps = AreaCaps::default_for(&w, sys.quotient());
        let crate::area::AreaOutcome::Found { mut certificate, .. } =
            sys.quotient_engine().area(&w, &caps)
        else {
            panic!("x is null in Q");
        };
        certificate.factors[0].conjugator = word(&p, "y");
        assert!(matches!(
            sys.lift_area_certificate(&w, &certificate),
            Err(FibreError::InvalidCertificate)
        ));
    }

    #[test]
    fn distortion_frozen_values_with_one_sided_kernel() {
        let sys = kernel_x_system();
        let caps = DistortionCaps { p_radius_cap: 8, quotient_budget: 0 };
        // (1, xⁿ) costs 2n pair letters: n one-sided steps plus n diagonal
        // corrections
        for (n, expected) in [(0, 0), (1, 2), (2, 4), (3, 6)] {
            let s = sys.distortion(n, &caps);
            assert_eq!((s.value, s.exactness), (expected, Exactness::Exact), "n = {n}");
        }
    }

    #[test]
    fn distortion_of_the_diagonal_is_undistorted() {
        let diag = make_fibre_system(&f2(), &[]).unwrap();
        let caps = DistortionCaps { p_radius_cap: 6, quotient_budget: 0 };
        // members are (γ, γ) with 2|γ| ≤ n and pair length |γ|
        for n in 0..=4 {
            let s = diag.distortion(n, &caps);
            assert_eq!((s.value, s.exactness), (n as u64 / 2, Exactness::Exact), "n = {n}");
        }
    }

    #[test]
    fn hard_witness_matches_the_distortion_gap() {
        let sys = kernel_x_system();
        let caps = DistortionCaps { p_radius_cap: 8, quotient_budget: 0 };
        let n = 3;
        let witness = sys.hard_distortion_witness(n, &caps);
        assert!(witness.exact);
        let dist = sys.distortion(n, &caps);
        // the one-sided witness explains all but n of the distortion
        let p_len = witness.p_len.unwrap() as u64;
        assert!(p_len + n as u64 >= dist.value, "witness {witness:?} vs {dist:?}");
        assert_eq!(p_len, 3);

        let diag = make_fibre_system(&f2(), &[]).unwrap();
        let w = diag.hard_distortion_witness(3, &caps);
        assert_eq!((w.gamma.as_str(), w.p_len), ("1", Some(0)));
    }

    #[test]
    fn pair_metric_lift_and_half_length_inequalities_hold() {
        let p = f2();
        let sys = kernel_x_system();
        let caps = DistortionCaps { p_radius_cap: 8, quotient_budget: 0 };
        let n = 3usize;
        let ball = BallIndex::build(&p, sys.base_oracle(), n, 0);
        let pball = sys.pair_ball(caps.p_radius_cap);
        let mut checked = 0usize;
        for g1 in ball.elements() {
            for g2 in ball.elements() {
                if g1.len() + g2.len() > n
                    || sys.membership(g1, g2) != Verdict::Trivial
                {
                    continue;
                }
                let pair_len = sys.ball_lookup(&pball, g1, g2).expect("certified") as u64;
                let gg_len = (g1.len() + g2.len()) as u64;
                let gamma = g2.invert().concat(g1);
                let one_sided =
                    sys.ball_lookup(&pball, &gamma, &Word::empty()).expect("certified") as u64;
                // kernel length bounds the pair length up to n
                assert!(pair_len <= one_sided + n as u64, "({g1}, {g2})");
                // the pair metric is at least half the ambient metric
                assert!(2 * pair_len >= gg_len, "({g1}, {g2})");
                // and the kernel element fits in the ambient ball
                assert!(gamma.len() as u64 <= gg_len, "({g1}, {g2})");
                // the area route bounds the same quantity through the lift
                let area_caps = AreaCaps::default_for(&gamma, sys.quotient());
                if let crate::area::AreaOutcome::Found { certificate, .. } =
                    sys.quotient_engine().area(&gamma, &area_caps)
                {
                    assert!(
                        pair_len
                            <= sys.lift_length_bound(&certificate, gamma.len()) + n as u64,
                        "({g1}, {g2})"
                    );
                }
                checked += 1;
            }
        }
        assert!(checked > 50, "only {checked} member pairs certified");
    }

    #[test]
    fn retraction_systems_decide_the_quotient_through_deletion() {
        // deleting a from ⟨x, a | [x, a]⟩ retracts onto ⟨x | ⟩
        let g = Presentation::parse("gens: x a\nrel: x a x^-1 a^-1\n").unwrap();
        let target = Presentation::parse("gens: x\n").unwrap();
        let sys = make_retraction_system(&g, &["a"], &target).unwrap();
        assert!(!sys.supports_kernel_lift());
        assert_eq!(sys.quotient(), &target);
        assert_eq!(sys.longest_relator(), 0);
        let a = word(&g, "a");
        let x = word(&g, "x");
        assert_eq!(sys.membership(&a, &Word::empty()), Verdict::Trivial);
        assert_eq!(sys.membership(&x, &Word::empty()), Verdict::Nontrivial);
        assert_eq!(sys.membership(&word(&g, "x a"), &x), Verdict::Trivial);
        assert_eq!(sys.p_length(&a, &Word::empty(), 3).unwrap(), Some(1));
        assert_eq!(sys.p_length(&word(&g, "x a"), &x, 4).unwrap(), Some(2));
        assert_eq!(sys.quotient_image(&word(&g, "x a")), target.alphabet().parse("x").unwrap());
        assert_eq!(sys.quotient_image(&a), Word::empty());

        // certificates cannot be lifted: the quotient relators are not
        // kernel letters
        let d = AreaDecomposition { factors: Vec::new(), noise: 0, noise_bound_met: true };
        assert!(matches!(
            sys.lift_area_certificate(&a, &d),
            Err(FibreError::KernelLiftUnavailable)
        ));

        // targets the deletion map does not reach are refused
        let wrong = Presentation::parse("gens: x\nrel: x^3\n").unwrap();
        assert!(matches!(
            FibreSystem::with_retraction(&g, &["a"], &wrong, 12, 5),
            Err(FibreError::NotARetraction)
        ));
        let misnamed = Presentation::parse("gens: y\n").unwrap();
        assert!(matches!(
            FibreSystem::with_retraction(&g, &["a"], &misnamed, 12, 5),
            Err(FibreError::NotARetraction)
        ));
        assert!(matches!(
            FibreSystem::with_retraction(&g, &[], &target, 12, 5),
            Err(FibreError::NoKernelLetters)
        ));
    }

    #[test]
    fn small_cancellation_base_uses_the_reducing_oracle() {
        // one-relator surface presentation satisfies the 1/6 condition
        let g = Presentation::parse(
            "gens: a b c d\nrel: a b a^-1 b^-1 c d c^-1 d^-1\n",
        )
        .unwrap();
        let sys = make_fibre_system(&g, &["a"]).unwrap();
        let a = word(&g, "a");
        assert_eq!(sys.membership(&a, &Word::empty()), Verdict::Trivial);
        assert_eq!(sys.p_length(&a, &Word::empty(), 3).unwrap(), Some(1));
        // diagonal member through a nontrivial base element
        let w = word(&g, "b c");
        assert_eq!(sys.membership(&w, &w), Verdict::Trivial);
        assert_eq!(sys.p_length(&w, &w, 4).unwrap(), Some(2));
    }
}
