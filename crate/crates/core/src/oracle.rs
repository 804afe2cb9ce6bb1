//! Word-problem oracles.
//!
//! Three implementations of one interface: a Dehn-algorithm oracle that is
//! a complete decision procedure on C'(1/6) presentations, a bounded-search
//! ball oracle that is sound on every presentation (three-valued), and a
//! product oracle for direct products. All verdicts are sound; `Unknown`
//! appears only when a budget runs out.

use std::collections::{HashMap, HashSet};
use std::sync::Mutex;

use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

use crate::lattice::{abelianization, IntegerLattice};
use crate::presentation::{Presentation, ProductPresentation, SymmetrizedClosure};
use crate::quotients::FiniteQuotients;
use crate::word::{Letter, Word};

/// Three-valued word-problem answer. `Trivial` and `Nontrivial` are sound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Trivial,
    Nontrivial,
    Unknown,
}

/// Snapshot of an oracle's counters. `iso_constant` is the observed
/// ceiling of (certified move count) / |w| over trivial verdicts — an
/// empirical stand-in for an isoperimetric constant, never a proven one.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct OracleStats {
    pub queries: u64,
    pub trivial: u64,
    pub nontrivial: u64,
    pub unknown: u64,
    pub nodes_explored: u64,
    pub iso_constant: Option<f64>,
}

#[derive(Debug, Default)]
struct StatsCell(Mutex<OracleStats>);

impl StatsCell {
    fn record(&self, verdict: Verdict, nodes: u64, moves_over_len: Option<f64>) {
        let mut s = self.0.lock().unwrap();
        s.queries += 1;
        match verdict {
            Verdict::Trivial => s.trivial += 1,
            Verdict::Nontrivial => s.nontrivial += 1,
            Verdict::Unknown => s.unknown += 1,
        }
        s.nodes_explored += nodes;
        if let Some(ratio) = moves_over_len {
            s.iso_constant = Some(s.iso_constant.map_or(ratio, |c| c.max(ratio)));
        }
    }

    fn snapshot(&self) -> OracleStats {
        *self.0.lock().unwrap()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("presentation is not C'(1/6): small-cancellation metric is {lambda} (needs < 1/6)")]
    NotSmallCancellation { lambda: Ratio<u64> },
}

/// The common oracle interface. Implementations are immutable after
/// construction and safe for concurrent queries.
pub trait WordOracle: Send + Sync {
    fn query(&self, w: &Word) -> Verdict;

    /// A canonical representative of `w`'s group element, when this oracle
    /// can certify one: equal elements always map to equal words, distinct
    /// elements to distinct words. `None` when no certificate is available.
    fn normal_form(&self, w: &Word) -> Option<Word>;

    fn stats(&self) -> OracleStats;
}

/// Equality test through an oracle: u = v in G iff u·v⁻¹ is trivial.
pub fn equal(oracle: &dyn WordOracle, u: &Word, v: &Word) -> Verdict {
    if let (Some(nu), Some(nv)) = (oracle.normal_form(u), oracle.normal_form(v)) {
        return if nu == nv { Verdict::Trivial } else { Verdict::Nontrivial };
    }
    oracle.query(&u.concat(&v.invert()))
}

// ---------------------------------------------------------------------------
// Greedy majority-subword reducer (the engine of Dehn's algorithm)
// ---------------------------------------------------------------------------

struct Pattern {
    find: Vec<Letter>,
    replace: Word,
}

/// Replaces subwords that form more than half of a symmetrized relator by
/// the inverse of the remainder, leftmost-first, smallest pattern first,
/// until no such subword remains. Each step shortens the word, so at most
/// |w| steps run. Sound on every presentation (each step applies one
/// relator); a complete triviality test exactly on C'(1/6) presentations.
pub struct DehnReducer {
    patterns: Vec<Pattern>,
    /// pattern indices bucketed by length, keyed by rolling hash
    by_len: Vec<(usize, HashMap<u64, Vec<usize>>)>,
}

const HASH_BASE: u64 = 0x9E37_79B9_7F4A_7C15;

fn letter_hash_code(l: Letter) -> u64 {
    u64::from(l.code()) + 1
}

fn hash_letters(letters: &[Letter]) -> u64 {
    letters
        .iter()
        .fold(0u64, |acc, &l| acc.wrapping_mul(HASH_BASE).wrapping_add(letter_hash_code(l)))
}

impl DehnReducer {
    pub fn new(closure: &SymmetrizedClosure) -> DehnReducer {
        // one pattern per closure element: its minimal strict-majority
        // prefix. The closure contains every rotation, so any majority
        // subword of any relator contains some pattern at its start.
        let mut patterns: Vec<Pattern> = closure
            .words()
            .iter()
            .map(|r| {
                let cut = r.len() / 2 + 1;
                Pattern {
                    find: r.letters()[..cut].to_vec(),
                    replace: r.slice(cut, r.len()).invert(),
                }
            })
            .collect();
        patterns.sort_by(|a, b| {
            (a.find.len(), &a.find, a.replace.len(), a.replace.letters())
                .cmp(&(b.find.len(), &b.find, b.replace.len(), b.replace.letters()))
        });
        // identical `find`s keep only the best (shortest) replacement
        patterns.dedup_by(|b, a| a.find == b.find);
        let mut buckets: HashMap<usize, HashMap<u64, Vec<usize>>> = HashMap::new();
        for (i, p) in patterns.iter().enumerate() {
            buckets
                .entry(p.find.len())
                .or_default()
                .entry(hash_letters(&p.find))
                .or_default()
                .push(i);
        }
        let mut by_len: Vec<(usize, HashMap<u64, Vec<usize>>)> = buckets.into_iter().collect();
        by_len.sort_by_key(|(len, _)| *len);
        DehnReducer { patterns, by_len }
    }

    /// Leftmost match of any pattern in `w`: (position, pattern index).
    fn find_match(&self, w: &Word) -> Option<(usize, usize)> {
        if self.patterns.is_empty() || w.is_empty() {
            return None;
        }
        let letters = w.letters();
        // prefix hashes for O(1) windows
        let mut prefix = Vec::with_capacity(letters.len() + 1);
        prefix.push(0u64);
        for &l in letters {
            let last = *prefix.last().unwrap();
            prefix.push(last.wrapping_mul(HASH_BASE).wrapping_add(letter_hash_code(l)));
        }
        let max_len = self.by_len.last().map_or(0, |(len, _)| *len);
        let mut pow = Vec::with_capacity(max_len + 1);
        pow.push(1u64);
        for _ in 0..max_len {
            pow.push(pow.last().unwrap().wrapping_mul(HASH_BASE));
        }
        for pos in 0..letters.len() {
            let mut hit: Option<usize> = None;
            for (len, bucket) in &self.by_len {
                if pos + len > letters.len() {
                    break;
                }
                let window = prefix[pos + len].wrapping_sub(prefix[pos].wrapping_mul(pow[*len]));
                if let Some(candidates) = bucket.get(&window) {
                    for &i in candidates {
                        if self.patterns[i].find == letters[pos..pos + len]
                            && hit.is_none_or(|h| i < h)
                        {
                            hit = Some(i);
                        }
                    }
                }
                if hit.is_some() {
                    break; // shorter pattern wins; longer ones lose the tie
                }
            }
            if let Some(i) = hit {
                return Some((pos, i));
            }
        }
        None
    }

    /// Runs the rewriting to its fixed point; returns it with the step count.
    pub fn reduce(&self, w: &Word) -> (Word, u64) {
        let mut current = w.clone();
        let mut steps = 0u64;
        while let Some((pos, i)) = self.find_match(&current) {
            let p = &self.patterns[i];
            let mut letters = current.letters()[..pos].to_vec();
            letters.extend_from_slice(p.replace.letters());
            letters.extend_from_slice(&current.letters()[pos + p.find.len()..]);
            let next = Word::reduce(&letters);
            debug_assert!(next.len() < current.len(), "majority replacement must shorten");
            current = next;
            steps += 1;
        }
        (current, steps)
    }
}

// ---------------------------------------------------------------------------
// Dehn oracle (complete on C'(1/6))
// ---------------------------------------------------------------------------

/// Decision procedure for presentations with small-cancellation metric
/// < 1/6 (free presentations are accepted too: reduction is then a no-op
/// and free triviality decides). Construction fails otherwise.
pub struct DehnOracle {
    presentation: Presentation,
    reducer: DehnReducer,
    lambda: Option<Ratio<u64>>,
    min_relator: usize,
    stats: StatsCell,
}

impl DehnOracle {
    pub fn new(presentation: Presentation) -> Result<DehnOracle, OracleError> {
        let lambda = if presentation.relators().is_empty() {
            None
        } else {
            let lambda = presentation
                .small_cancellation_lambda()
                .expect("nonempty relator list");
            if lambda >= Ratio::new(1, 6) {
                return Err(OracleError::NotSmallCancellation { lambda });
            }
            Some(lambda)
        };
        let closure = presentation.symmetrize();
        let min_relator = closure.min_len();
        Ok(DehnOracle {
            reducer: DehnReducer::new(&closure),
            presentation,
            lambda,
            min_relator,
            stats: StatsCell::default(),
        })
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    /// The verified small-cancellation metric (None for free presentations).
    pub fn lambda(&self) -> Option<Ratio<u64>> {
        self.lambda
    }

    /// The reduction fixed point, exposed for decomposition builders.
    pub fn reduce(&self, w: &Word) -> (Word, u64) {
        self.reducer.reduce(w)
    }
}

impl WordOracle for DehnOracle {
    fn query(&self, w: &Word) -> Verdict {
        let (fixed, steps) = self.reducer.reduce(w);
        let verdict = if fixed.is_empty() { Verdict::Trivial } else { Verdict::Nontrivial };
        let iso = (verdict == Verdict::Trivial && !w.is_empty())
            .then(|| steps as f64 / w.len() as f64);
        self.stats.record(verdict, steps, iso);
        verdict
    }

    /// In a C'(1/6) group every nonempty null word is longer than half the
    /// shortest relator, so words at most a quarter of that length are
    /// pairwise distinct group elements: below the threshold the reduction
    /// fixed point is a true normal form.
    fn normal_form(&self, w: &Word) -> Option<Word> {
        if self.presentation.relators().is_empty() {
            return Some(w.clone());
        }
        let (fixed, _) = self.reducer.reduce(w);
        (4 * fixed.len() <= self.min_relator).then_some(fixed)
    }

    fn stats(&self) -> OracleStats {
        self.stats.snapshot()
    }
}

// ---------------------------------------------------------------------------
// Ball oracle (sound on any presentation)
// ---------------------------------------------------------------------------

/// Work limits for [`BallOracle`]. `radius` and `move_cap` bound each
/// query's search; the rest guard construction-time precomputation and
/// per-query state growth.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SearchBudget {
    /// length cap on every intermediate word during search
    pub radius: usize,
    /// relator applications allowed per query
    pub move_cap: u64,
    /// distinct words explored per query
    pub state_cap: usize,
    /// length cap for the precomputed table of known-null words
    pub table_radius: usize,
    /// states allowed while building that table
    pub table_states: usize,
    /// work budget for the finite-quotient hom search
    pub quotient_budget: u64,
    /// skip the search when closure size × radius exceeds this
    pub expansion_cap: u64,
}

impl SearchBudget {
    pub fn new(radius: usize, move_cap: u64) -> SearchBudget {
        SearchBudget {
            radius,
            move_cap,
            state_cap: 20_000,
            table_radius: radius.min(12),
            table_states: 5_000,
            quotient_budget: 50_000_000,
            expansion_cap: 400_000,
        }
    }
}

/// Bounded-search oracle, layered for cheap sound answers:
///
/// 1. greedy majority-subword reduction (always sound, often finishes);
/// 2. lookup in a precomputed table of null words;
/// 3. abelianization residue against the relator lattice (consulted before
///    any other nontriviality source);
/// 4. finite-quotient separation;
/// 5. breadth-first search over relator applications within the length
///    radius — `Trivial` when the empty word appears, `Nontrivial` when the
///    whole reachable space was enumerated without ever touching a cap
///    (the space is then closed, and insertion moves are complete for
///    triviality), `Unknown` otherwise.
pub struct BallOracle {
    presentation: Presentation,
    closure: SymmetrizedClosure,
    budget: SearchBudget,
    reducer: DehnReducer,
    lattice: IntegerLattice,
    quotients: FiniteQuotients,
    null_table: HashMap<Word, u64>,
    stats: StatsCell,
}

impl BallOracle {
    pub fn new(presentation: Presentation, radius: usize, move_cap: u64) -> BallOracle {
        BallOracle::with_budget(presentation, SearchBudget::new(radius, move_cap))
    }

    pub fn with_budget(presentation: Presentation, budget: SearchBudget) -> BallOracle {
        let closure = presentation.symmetrize();
        let rank = presentation.alphabet().len();
        let vectors: Vec<Vec<i128>> = presentation
            .relators()
            .iter()
            .map(|r| abelianization(r, rank))
            .collect();
        let lattice = IntegerLattice::from_vectors(rank, &vectors);
        let quotients = if presentation.relators().is_empty() {
            FiniteQuotients::search(&presentation, 0)
        } else {
            FiniteQuotients::search(&presentation, budget.quotient_budget)
        };
        let reducer = DehnReducer::new(&closure);
        let mut oracle = BallOracle {
            presentation,
            closure,
            budget,
            reducer,
            lattice,
            quotients,
            null_table: HashMap::new(),
            stats: StatsCell::default(),
        };
        oracle.null_table = oracle.build_null_table();
        oracle
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn budget(&self) -> &SearchBudget {
        &self.budget
    }

    /// The homology-lattice filter, reusable by callers that bucket words by
    /// abelianized residue.
    pub fn lattice(&self) -> &IntegerLattice {
        &self.lattice
    }

    /// The finite-quotient separation tables, reusable by callers that
    /// bucket words by their quotient images.
    pub fn quotients(&self) -> &FiniteQuotients {
        &self.quotients
    }

    /// Every reduced successor of `u` under one relator application.
    fn successors(&self, u: &Word, out: &mut Vec<Word>) {
        out.clear();
        for r in self.closure.words() {
            for i in 0..=u.len() {
                let mut letters = Vec::with_capacity(u.len() + r.len());
                letters.extend_from_slice(&u.letters()[..i]);
                letters.extend_from_slice(r.letters());
                letters.extend_from_slice(&u.letters()[i..]);
                out.push(Word::reduce(&letters));
            }
        }
    }

    fn build_null_table(&self) -> HashMap<Word, u64> {
        let mut table = HashMap::new();
        table.insert(Word::empty(), 0u64);
        if self.presentation.relators().is_empty() || self.expansion_too_wide() {
            return table;
        }
        let mut frontier = vec![Word::empty()];
        let mut moves = 0u64;
        let mut successors = Vec::new();
        while !frontier.is_empty() && table.len() < self.budget.table_states {
            moves += 1;
            let mut next = Vec::new();
            for u in &frontier {
                self.successors(u, &mut successors);
                for s in successors.drain(..) {
                    if s.len() > self.budget.table_radius || table.contains_key(&s) {
                        continue;
                    }
                    if table.len() >= self.budget.table_states {
                        return table;
                    }
                    table.insert(s.clone(), moves);
                    next.push(s);
                }
            }
            frontier = next;
        }
        table
    }

    fn expansion_too_wide(&self) -> bool {
        self.closure.len() as u64 * (self.budget.radius as u64 + 1) > self.budget.expansion_cap
    }

    /// Nontriviality filters: sound `Nontrivial` or nothing.
    fn separated(&self, w: &Word) -> bool {
        let v = abelianization(w, self.presentation.alphabet().len());
        if !self.lattice.contains(&v) {
            return true;
        }
        self.quotients.separates(w)
    }

    /// The bounded search. Returns a verdict plus explored-node and move
    /// counts (`moves` is meaningful for `Trivial` only).
    fn search(&self, start: &Word) -> (Verdict, u64, u64) {
        if self.closure.is_empty() {
            // no moves exist at all: a nonempty reduced word stays itself
            return (Verdict::Nontrivial, 0, 0);
        }
        if self.expansion_too_wide() || start.len() > self.budget.radius {
            return (Verdict::Unknown, 0, 0);
        }
        let mut visited: HashSet<Word> = HashSet::new();
        visited.insert(start.clone());
        let mut frontier = vec![start.clone()];
        let mut complete = true;
        let mut moves = 0u64;
        let mut nodes = 0u64;
        let mut successors = Vec::new();
        while !frontier.is_empty() {
            if moves >= self.budget.move_cap {
                complete = false;
                break;
            }
            moves += 1;
            let mut next = Vec::new();
            for u in &frontier {
                self.successors(u, &mut successors);
                for s in successors.drain(..) {
                    nodes += 1;
                    if let Some(&table_moves) = self.null_table.get(&s) {
                        // reaching any known-null word certifies triviality
                        return (Verdict::Trivial, nodes, moves + table_moves);
                    }
                    if s.len() > self.budget.radius {
                        complete = false;
                        continue;
                    }
                    if visited.contains(&s) {
                        continue;
                    }
                    if visited.len() >= self.budget.state_cap {
                        complete = false;
                        continue;
                    }
                    visited.insert(s.clone());
                    next.push(s);
                }
            }
            frontier = next;
        }
        if complete && frontier.is_empty() {
            (Verdict::Nontrivial, nodes, 0)
        } else {
            (Verdict::Unknown, nodes, 0)
        }
    }
}

impl WordOracle for BallOracle {
    fn query(&self, w: &Word) -> Verdict {
        if w.is_empty() {
            self.stats.record(Verdict::Trivial, 0, None);
            return Verdict::Trivial;
        }
        // sound shrinking first: it can only help every later layer
        let (reduced, greedy_steps) = self.reducer.reduce(w);
        if reduced.is_empty() {
            self.stats
                .record(Verdict::Trivial, greedy_steps, Some(greedy_steps as f64 / w.len() as f64));
            return Verdict::Trivial;
        }
        if let Some(&table_moves) = self.null_table.get(&reduced) {
            let total = greedy_steps + table_moves;
            self.stats
                .record(Verdict::Trivial, greedy_steps, Some(total as f64 / w.len() as f64));
            return Verdict::Trivial;
        }
        if self.separated(&reduced) {
            self.stats.record(Verdict::Nontrivial, greedy_steps, None);
            return Verdict::Nontrivial;
        }
        let (verdict, nodes, moves) = self.search(&reduced);
        let iso = (verdict == Verdict::Trivial)
            .then(|| (greedy_steps + moves) as f64 / w.len() as f64);
        self.stats.record(verdict, greedy_steps + nodes, iso);
        verdict
    }

    /// Free presentations have free reduction as a complete normal form;
    /// nothing cheaper is certified otherwise.
    fn normal_form(&self, w: &Word) -> Option<Word> {
        self.presentation.relators().is_empty().then(|| w.clone())
    }

    fn stats(&self) -> OracleStats {
        self.stats.snapshot()
    }
}

// ---------------------------------------------------------------------------
// Product oracle
// ---------------------------------------------------------------------------

/// Word problem for G₁ × G₂: project to both coordinates and conjoin the
/// factor verdicts (a product element is trivial iff both coordinates are).
pub struct ProductOracle {
    product: ProductPresentation,
    left: Box<dyn WordOracle>,
    right: Box<dyn WordOracle>,
    stats: StatsCell,
}

impl ProductOracle {
    pub fn new(
        product: ProductPresentation,
        left: Box<dyn WordOracle>,
        right: Box<dyn WordOracle>,
    ) -> ProductOracle {
        ProductOracle { product, left, right, stats: StatsCell::default() }
    }

    pub fn product(&self) -> &ProductPresentation {
        &self.product
    }

    pub fn left_oracle(&self) -> &dyn WordOracle {
        self.left.as_ref()
    }

    pub fn right_oracle(&self) -> &dyn WordOracle {
        self.right.as_ref()
    }

    /// Queries the pair (w₁, w₂) directly in coordinates.
    pub fn query_pair(&self, w1: &Word, w2: &Word) -> Verdict {
        let verdict = conjoin(self.left.query(w1), self.right.query(w2));
        self.stats.record(verdict, 0, None);
        verdict
    }
}

fn conjoin(a: Verdict, b: Verdict) -> Verdict {
    match (a, b) {
        (Verdict::Trivial, Verdict::Trivial) => Verdict::Trivial,
        (Verdict::Nontrivial, _) | (_, Verdict::Nontrivial) => Verdict::Nontrivial,
        _ => Verdict::Unknown,
    }
}

impl WordOracle for ProductOracle {
    fn query(&self, w: &Word) -> Verdict {
        let verdict = conjoin(
            self.left.query(&self.product.project_left(w)),
            self.right.query(&self.product.project_right(w)),
        );
        self.stats.record(verdict, 0, None);
        verdict
    }

    fn normal_form(&self, w: &Word) -> Option<Word> {
        let n1 = self.left.normal_form(&self.product.project_left(w))?;
        let n2 = self.right.normal_form(&self.product.project_right(w))?;
        Some(self.product.pair(&n1, &n2))
    }

    fn stats(&self) -> OracleStats {
        self.stats.snapshot()
    }
}

// ---------------------------------------------------------------------------
// Oracle selection
// ---------------------------------------------------------------------------

/// Picks the strongest oracle a presentation admits: the reducing oracle is
/// a complete decision procedure under the small-cancellation threshold,
/// and the bounded-search oracle covers everything else (it is itself
/// complete on free presentations).
pub fn strongest_oracle(p: &Presentation, radius: usize, move_cap: u64) -> Box<dyn WordOracle> {
    if !p.relators().is_empty() && p.is_c_prime_sixth() {
        if let Ok(oracle) = DehnOracle::new(p.clone()) {
            return Box::new(oracle);
        }
    }
    Box::new(BallOracle::new(p.clone(), radius, move_cap))
}

// ---------------------------------------------------------------------------
// Order probing
// ---------------------------------------------------------------------------

/// The order of an element as far as an oracle can certify it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ElementOrder {
    /// least k with w^k trivial; every smaller positive power certified
    /// nontrivial
    Finite(u64),
    /// every power up to the bound certified nontrivial
    InfiniteUpToBound(u64),
    Unknown,
}

/// Scans w¹, w², … up to `cutoff`, stopping at the first certified-trivial
/// power; an `Unknown` along the way makes the order unknown.
pub fn order_of(w: &Word, oracle: &dyn WordOracle, cutoff: u64) -> ElementOrder {
    assert!(cutoff >= 1, "cutoff must be positive");
    for k in 1..=cutoff {
        match oracle.query(&w.power(k as i64)) {
            Verdict::Trivial => return ElementOrder::Finite(k),
            Verdict::Nontrivial => continue,
            Verdict::Unknown => return ElementOrder::Unknown,
        }
    }
    ElementOrder::InfiniteUpToBound(cutoff)
}
