//! Exact van Kampen area with verifiable certificates, plus the Dehn
//! function and its relative-to-cyclic-subgroups refinements.
//!
//! Area is computed by uniform-cost search over freely reduced words where
//! one move replaces a (possibly empty) subword `s` by `t` whenever `s·t⁻¹`
//! lies in the symmetrized closure — realized uniformly as "insert a
//! closure element, then freely reduce". Moves are complete for
//! null-homotopy, so the first time the empty word appears its depth is
//! the true minimal area (within the declared caps).

use serde::{Deserialize, Serialize};

use std::collections::HashMap;

use crate::lattice::{abelianization, IntegerLattice};
use crate::oracle::{order_of, ElementOrder, Verdict, WordOracle};
use crate::presentation::{Presentation, SymmetrizedClosure};
use crate::word::{reduced_words, Word};

/// One factor θᵢ⁻¹ · rᵢ · θᵢ of an area decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AreaFactor {
    pub conjugator: Word,
    pub relator: Word,
}

/// A certificate that `w` is a product of `factors.len()` conjugated
/// relators: the free product of the factors reduces to `w` exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AreaDecomposition {
    pub factors: Vec<AreaFactor>,
    /// Σ |θᵢ·θᵢ₊₁⁻¹| with θ₀ and θ_{M+1} empty
    pub noise: u64,
    /// noise ≤ M·L + |w| for this certificate
    pub noise_bound_met: bool,
}

impl AreaDecomposition {
    pub fn area(&self) -> u64 {
        self.factors.len() as u64
    }

    /// The free-group product of the factors.
    pub fn product(&self) -> Word {
        let mut acc = Word::empty();
        for f in &self.factors {
            acc = acc.concat(&f.conjugator.invert()).concat(&f.relator).concat(&f.conjugator);
        }
        acc
    }
}

/// Σ |θᵢ θᵢ₊₁⁻¹| over the fenced conjugator sequence (empties at both ends).
pub fn noise_of(conjugators: &[&Word]) -> u64 {
    let empty = Word::empty();
    let mut total = 0u64;
    let mut prev = &empty;
    for &theta in conjugators.iter().chain(std::iter::once(&&empty)) {
        total += prev.concat(&theta.invert()).len() as u64;
        prev = theta;
    }
    total
}

/// Search limits for one area computation.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AreaCaps {
    /// intermediate words may never exceed this length
    pub length_cap: usize,
    /// maximum certificate size searched
    pub area_cap: u64,
    /// distinct words explored
    pub state_cap: usize,
}

impl AreaCaps {
    /// Default: enough slack for small instances to come out exact.
    pub fn default_for(w: &Word, p: &Presentation) -> AreaCaps {
        AreaCaps {
            length_cap: w.len() + 2 * p.max_relator_len() + 4,
            area_cap: 24,
            state_cap: 50_000,
        }
    }

    /// Intermediate words may never grow beyond the input. Much cheaper,
    /// and sufficient whenever some minimal-area path never grows the
    /// word (commutation shuffles, for instance).
    pub fn tight(w: &Word) -> AreaCaps {
        AreaCaps { length_cap: w.len(), area_cap: 24, state_cap: 50_000 }
    }
}

/// Outcome of an area search.
#[derive(Debug, Clone, Serialize)]
pub enum AreaOutcome {
    Found {
        area: u64,
        certificate: AreaDecomposition,
        /// true when no state was discarded early enough to hide a cheaper
        /// path, so `area` is the unconditional minimum; false means
        /// minimal *within the caps* only
        exact: bool,
    },
    /// the bounded space closed without reaching the empty word and
    /// nothing was ever discarded: the word is not null-homotopic
    NotNull,
    /// budget ran out: any decomposition within the caps has more than
    /// `proven_lower_bound - 1` factors; `within_length_cap` records
    /// whether states were discarded for length, making the bound
    /// relative to the cap
    Exhausted { proven_lower_bound: u64, within_length_cap: bool },
}

impl AreaOutcome {
    pub fn found_area(&self) -> Option<u64> {
        match self {
            AreaOutcome::Found { area, .. } => Some(*area),
            _ => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, AreaOutcome::Found { exact: true, .. })
    }
}

struct Node {
    word: Word,
    parent: usize,
}

/// Keep only this many candidate conjugators per step in the
/// noise-minimization pass; candidates are sorted shortest-first, so the
/// truncation rarely costs optimality and keeps the pass cheap.
const NOISE_PASS_WIDTH: usize = 24;

/// Area computations over one presentation (closure built once).
pub struct AreaEngine {
    presentation: Presentation,
    closure: SymmetrizedClosure,
}

impl AreaEngine {
    pub fn new(presentation: &Presentation) -> AreaEngine {
        AreaEngine { presentation: presentation.clone(), closure: presentation.symmetrize() }
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn closure(&self) -> &SymmetrizedClosure {
        &self.closure
    }

    /// Minimal certificate size for `w`, by uniform-cost search.
    pub fn area(&self, w: &Word, caps: &AreaCaps) -> AreaOutcome {
        assert!(caps.area_cap > 0 && caps.state_cap > 0, "caps must be positive");
        if w.is_empty() {
            return AreaOutcome::Found {
                area: 0,
                certificate: AreaDecomposition {
                    factors: Vec::new(),
                    noise: 0,
                    noise_bound_met: true,
                },
                exact: true,
            };
        }
        if self.closure.is_empty() {
            return AreaOutcome::NotNull; // free group: only the empty word is null
        }
        let mut arena: Vec<Node> = vec![Node { word: w.clone(), parent: usize::MAX }];
        let mut visited: HashMap<Word, usize> = HashMap::new();
        visited.insert(w.clone(), 0);
        let mut frontier: Vec<usize> = vec![0];
        let mut discarded_any = false;
        let mut first_discard_depth = u64::MAX;
        let mut cost = 0u64;
        while !frontier.is_empty() {
            if cost >= caps.area_cap {
                return AreaOutcome::Exhausted {
                    proven_lower_bound: cost + 1,
                    within_length_cap: discarded_any,
                };
            }
            cost += 1;
            let mut next: Vec<usize> = Vec::new();
            for &node_idx in &frontier {
                let u = arena[node_idx].word.clone();
                for r in self.closure.words() {
                    for i in 0..=u.len() {
                        let mut letters = Vec::with_capacity(u.len() + r.len());
                        letters.extend_from_slice(&u.letters()[..i]);
                        letters.extend_from_slice(r.letters());
                        letters.extend_from_slice(&u.letters()[i..]);
                        let s = Word::reduce(&letters);
                        if s.is_empty() {
                            arena.push(Node { word: s, parent: node_idx });
                            // a state discarded at depth d reaches the empty
                            // word no sooner than depth d + 1, so the answer
                            // is unconditional iff nothing was discarded at
                            // any depth < cost - 1
                            let exact = first_discard_depth >= cost.saturating_sub(1);
                            let certificate =
                                self.certificate_for_path(&arena, arena.len() - 1, w);
                            return AreaOutcome::Found { area: cost, certificate, exact };
                        }
                        if s.len() > caps.length_cap {
                            discarded_any = true;
                            first_discard_depth = first_discard_depth.min(cost);
                            continue;
                        }
                        if visited.contains_key(&s) {
                            continue;
                        }
                        if visited.len() >= caps.state_cap {
                            discarded_any = true;
                            first_discard_depth = first_discard_depth.min(cost);
                            continue;
                        }
                        arena.push(Node { word: s.clone(), parent: node_idx });
                        visited.insert(s, arena.len() - 1);
                        next.push(arena.len() - 1);
                    }
                }
            }
            frontier = next;
        }
        if discarded_any {
            AreaOutcome::Exhausted { proven_lower_bound: cost + 1, within_length_cap: true }
        } else {
            AreaOutcome::NotNull
        }
    }

    /// Builds the lowest-noise certificate the search path supports.
    ///
    /// A step inserting `r` at position `i` of `u` is simultaneously
    /// `u → (p·r·p⁻¹)·u` with prefix p = u[..i] and `u → u·(v⁻¹·r·v)` with
    /// suffix v = u[i..]; unwinding the path along prefixes gives
    /// w = ∏ₖ pₖ·rₖ⁻¹·pₖ⁻¹ in step order, along suffixes the reversed
    /// product of vₖ⁻¹·rₖ⁻¹·vₖ. Each step usually admits several (i, r)
    /// realizations; a shortest-path pass over those choices minimizes the
    /// total noise of each form, and the quieter form wins.
    fn certificate_for_path(&self, arena: &[Node], last: usize, w: &Word) -> AreaDecomposition {
        let mut path: Vec<&Word> = Vec::new();
        let mut at = last;
        loop {
            path.push(&arena[at].word);
            if arena[at].parent == usize::MAX {
                break;
            }
            at = arena[at].parent;
        }
        path.reverse(); // w = u₀ → u₁ → … → u_M = ∅

        let steps = path.len() - 1;
        let mut prefix_options: Vec<Vec<AreaFactor>> = Vec::with_capacity(steps);
        let mut suffix_options: Vec<Vec<AreaFactor>> = Vec::with_capacity(steps);
        for k in 0..steps {
            let u = path[k];
            let v = path[k + 1];
            let mut pre = Vec::new();
            let mut suf = Vec::new();
            for r in self.closure.words() {
                for i in 0..=u.len() {
                    let mut letters = Vec::with_capacity(u.len() + r.len());
                    letters.extend_from_slice(&u.letters()[..i]);
                    letters.extend_from_slice(r.letters());
                    letters.extend_from_slice(&u.letters()[i..]);
                    if &Word::reduce(&letters) == v {
                        pre.push(AreaFactor {
                            conjugator: u.slice(0, i).invert(),
                            relator: r.invert(),
                        });
                        suf.push(AreaFactor {
                            conjugator: u.slice(i, u.len()),
                            relator: r.invert(),
                        });
                    }
                }
            }
            let trim = |mut opts: Vec<AreaFactor>| -> Vec<AreaFactor> {
                opts.sort_by(|a, b| {
                    (a.conjugator.len(), &a.conjugator, &a.relator)
                        .cmp(&(b.conjugator.len(), &b.conjugator, &b.relator))
                });
                opts.truncate(NOISE_PASS_WIDTH);
                opts
            };
            prefix_options.push(trim(pre));
            suffix_options.push(trim(suf));
        }
        suffix_options.reverse(); // suffix factors run in reverse step order

        let noise_bound =
            steps as u64 * self.presentation.max_relator_len() as u64 + w.len() as u64;
        let finish = |factors: Vec<AreaFactor>, noise: u64| -> AreaDecomposition {
            AreaDecomposition { factors, noise, noise_bound_met: noise <= noise_bound }
        };
        let (pre_noise, pre_factors) = min_noise_assignment(&prefix_options);
        let (suf_noise, suf_factors) = min_noise_assignment(&suffix_options);
        let certificate = if pre_noise <= suf_noise {
            finish(pre_factors, pre_noise)
        } else {
            finish(suf_factors, suf_noise)
        };
        debug_assert_eq!(certificate.product(), *w);
        certificate
    }

    /// Independent certificate check: every relator must lie in the
    /// symmetrized closure, the free product must reduce to `w`, and the
    /// recorded noise must match a recomputation.
    pub fn verify_decomposition(&self, w: &Word, d: &AreaDecomposition) -> bool {
        if !d.factors.iter().all(|f| self.closure.contains(&f.relator)) {
            return false;
        }
        if d.product() != *w {
            return false;
        }
        let conjugators: Vec<&Word> = d.factors.iter().map(|f| &f.conjugator).collect();
        noise_of(&conjugators) == d.noise
    }
}

/// Shortest path through per-step conjugator choices under the fenced
/// noise objective Σ|θᵢθᵢ₊₁⁻¹| (empty conjugators at both ends).
fn min_noise_assignment(options: &[Vec<AreaFactor>]) -> (u64, Vec<AreaFactor>) {
    if options.is_empty() {
        return (0, Vec::new());
    }
    let seam = |a: &Word, b: &Word| a.concat(&b.invert()).len() as u64;
    let empty = Word::empty();
    let mut cost: Vec<Vec<u64>> = Vec::with_capacity(options.len());
    let mut back: Vec<Vec<usize>> = Vec::with_capacity(options.len());
    cost.push(options[0].iter().map(|f| seam(&empty, &f.conjugator)).collect());
    back.push(vec![usize::MAX; options[0].len()]);
    for k in 1..options.len() {
        let mut row = Vec::with_capacity(options[k].len());
        let mut arg_row = Vec::with_capacity(options[k].len());
        for f in &options[k] {
            let (mut best, mut arg) = (u64::MAX, 0);
            for (j, g) in options[k - 1].iter().enumerate() {
                let c = cost[k - 1][j] + seam(&g.conjugator, &f.conjugator);
                if c < best {
                    best = c;
                    arg = j;
                }
            }
            row.push(best);
            arg_row.push(arg);
        }
        cost.push(row);
        back.push(arg_row);
    }
    let tail = options.len() - 1;
    let (mut best, mut arg) = (u64::MAX, 0);
    for (j, f) in options[tail].iter().enumerate() {
        let c = cost[tail][j] + f.conjugator.len() as u64;
        if c < best {
            best = c;
            arg = j;
        }
    }
    let mut picks = vec![0usize; options.len()];
    let mut at = arg;
    for k in (0..options.len()).rev() {
        picks[k] = at;
        at = back[k][at];
    }
    let factors = picks.iter().zip(options).map(|(&j, opts)| opts[j].clone()).collect();
    (best, factors)
}

// ---------------------------------------------------------------------------
// Growth-function tables
// ---------------------------------------------------------------------------

/// How much a reported sample value can be trusted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exactness {
    Exact,
    LowerBound,
    BudgetExhausted,
}

impl Exactness {
    pub fn join(self, other: Exactness) -> Exactness {
        use Exactness::*;
        match (self, other) {
            (BudgetExhausted, _) | (_, BudgetExhausted) => BudgetExhausted,
            (LowerBound, _) | (_, LowerBound) => LowerBound,
            _ => Exact,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Exactness::Exact => "exact",
            Exactness::LowerBound => "lower_bound",
            Exactness::BudgetExhausted => "budget_exhausted",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub n: u64,
    pub value: u64,
    pub exactness: Exactness,
}

/// The growth functions this crate samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionKind {
    Delta,
    DeltaC,
    DeltaZ,
    DeltaO,
    FrakM,
    FrakT,
    Dist,
    Cl,
    ClRel,
}

impl FunctionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FunctionKind::Delta => "delta",
            FunctionKind::DeltaC => "delta_c",
            FunctionKind::DeltaZ => "delta_z",
            FunctionKind::DeltaO => "delta_o",
            FunctionKind::FrakM => "frak_m",
            FunctionKind::FrakT => "frak_t",
            FunctionKind::Dist => "dist",
            FunctionKind::Cl => "cl",
            FunctionKind::ClRel => "cl_rel",
        }
    }

    pub fn parse(s: &str) -> Option<FunctionKind> {
        Some(match s {
            "delta" => FunctionKind::Delta,
            "delta_c" => FunctionKind::DeltaC,
            "delta_z" => FunctionKind::DeltaZ,
            "delta_o" => FunctionKind::DeltaO,
            "frak_m" => FunctionKind::FrakM,
            "frak_t" => FunctionKind::FrakT,
            "dist" => FunctionKind::Dist,
            "cl" => FunctionKind::Cl,
            "cl_rel" => FunctionKind::ClRel,
            _ => return None,
        })
    }
}

/// A sampled growth function with its budget record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionTable {
    pub name: FunctionKind,
    pub samples: Vec<Sample>,
    pub budget: String,
}

/// δ(n): the maximum area over null-homotopic words of length ≤ n.
/// Conjugation-invariance of area lets the scan range over cyclically
/// reduced words only. The value is always a certified lower bound for
/// δ(n); the flag says whether it is exactly δ(n).
pub fn dehn_function(
    engine: &AreaEngine,
    oracle: &dyn WordOracle,
    n: u64,
    caps_for: &dyn Fn(&Word) -> AreaCaps,
) -> Sample {
    let rank = engine.presentation().alphabet().len();
    let mut value = 0u64;
    let mut exactness = Exactness::Exact;
    for w in reduced_words(rank, n as usize) {
        if w.is_empty() || !w.is_cyclically_reduced() {
            continue;
        }
        match oracle.query(&w) {
            Verdict::Nontrivial => continue,
            Verdict::Unknown => {
                exactness = exactness.join(Exactness::LowerBound);
                continue;
            }
            Verdict::Trivial => {}
        }
        match engine.area(&w, &caps_for(&w)) {
            AreaOutcome::Found { area, exact, .. } => {
                value = value.max(area);
                if !exact {
                    exactness = exactness.join(Exactness::LowerBound);
                }
            }
            AreaOutcome::NotNull => {
                unreachable!("oracle certified triviality; area search cannot close without ∅")
            }
            AreaOutcome::Exhausted { .. } => {
                exactness = exactness.join(Exactness::BudgetExhausted);
            }
        }
    }
    Sample { n, value, exactness }
}

/// The three relative-to-cyclics variants of the Dehn function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CyclicsVariant {
    /// |p| ≤ o(u)/2
    C,
    /// only infinite-order u
    Z,
    /// |p| ≤ o(u)
    O,
}

/// Which length constraint binds the (w, u) pair in the rel-cyclics
/// functions. The two conventions agree up to coarse equivalence; the sum
/// form is the default, the max form is kept for cross-checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PairBound {
    SumAtMostN,
    MaxAtMostN,
}

/// δ^c / δ^z / δ^o (n): maximize Area(w·u^p) + |p|·n over pairs with
/// |w| + |u| ≤ n, w =_Γ u^{−p}, and p within the variant's allowance.
///
/// Words u representing the identity are excluded from every variant: the
/// trivial subgroup carries no geometry, and admitting it would let δ^o
/// collect a spurious |p|·n term through u^p = 1. With that exclusion the
/// three variants coincide pointwise on torsion-free groups, as every
/// admitted u then has infinite order and no constraint binds.
///
/// Orders are probed through the oracle with cutoff `order_cutoff`; an
/// unresolved order downgrades the sample to budget-exhausted. For
/// infinite-order u the exponent is found by an outward scan, skipped
/// entirely when the abelianized equation ab(w) + p·ab(u) ∈ L has no
/// solution; a scan that exhausts its range without deciding downgrades
/// the sample to a lower bound.
pub fn rel_cyclics_function(
    engine: &AreaEngine,
    oracle: &dyn WordOracle,
    n: u64,
    variant: CyclicsVariant,
    order_cutoff: u64,
    caps_for: &dyn Fn(&Word) -> AreaCaps,
) -> Sample {
    rel_cyclics_function_with_bound(
        engine,
        oracle,
        n,
        variant,
        PairBound::SumAtMostN,
        order_cutoff,
        caps_for,
    )
}

/// As [`rel_cyclics_function`], but with an explicit choice of pair-length
/// convention.
pub fn rel_cyclics_function_with_bound(
    engine: &AreaEngine,
    oracle: &dyn WordOracle,
    n: u64,
    variant: CyclicsVariant,
    bound: PairBound,
    order_cutoff: u64,
    caps_for: &dyn Fn(&Word) -> AreaCaps,
) -> Sample {
    let rank = engine.presentation().alphabet().len();
    let free_group = engine.closure().is_empty();
    let relator_columns: Vec<Vec<i128>> =
        engine.presentation().relators().iter().map(|r| abelianization(r, rank)).collect();
    let mut value = 0u64;
    let mut exactness = Exactness::Exact;
    let consider = |wu: Word, p: i64, value: &mut u64, exactness: &mut Exactness| {
        match engine.area(&wu, &caps_for(&wu)) {
            AreaOutcome::Found { area, exact, .. } => {
                *value = (*value).max(area + p.unsigned_abs() * n);
                if !exact {
                    *exactness = exactness.join(Exactness::LowerBound);
                }
            }
            AreaOutcome::NotNull => {}
            AreaOutcome::Exhausted { .. } => {
                *exactness = exactness.join(Exactness::BudgetExhausted);
            }
        }
    };
    for w in reduced_words(rank, n as usize) {
        let u_max = match bound {
            PairBound::SumAtMostN => n as usize - w.len(),
            PairBound::MaxAtMostN => n as usize,
        };
        for u in reduced_words(rank, u_max) {
            let mut candidates: Vec<i64> = Vec::new();
            match order_of(&u, oracle, order_cutoff) {
                ElementOrder::Unknown => {
                    exactness = exactness.join(Exactness::BudgetExhausted);
                    continue;
                }
                ElementOrder::Finite(1) => continue, // u trivial in the group
                ElementOrder::Finite(omega) => {
                    if variant == CyclicsVariant::Z {
                        continue; // torsion excluded
                    }
                    let omega = omega as i64;
                    // the valid p form one residue class mod ω, if any
                    let mut residue: Option<i64> = None;
                    for p0 in 0..omega {
                        match oracle.query(&w.concat(&u.power(p0))) {
                            Verdict::Trivial => {
                                residue = Some(p0);
                                break;
                            }
                            Verdict::Nontrivial => continue,
                            Verdict::Unknown => {
                                exactness = exactness.join(Exactness::BudgetExhausted);
                                break;
                            }
                        }
                    }
                    let Some(p0) = residue else { continue };
                    let allow: i64 = match variant {
                        CyclicsVariant::C => omega / 2,
                        CyclicsVariant::O => omega,
                        CyclicsVariant::Z => unreachable!(),
                    };
                    for p in [p0 - omega, p0, p0 + omega] {
                        if p.abs() <= allow {
                            candidates.push(p);
                        }
                    }
                }
                ElementOrder::InfiniteUpToBound(_) => {
                    // at most one valid p; rule the pair out through the
                    // abelianized equation before scanning
                    let mut columns = relator_columns.clone();
                    columns.push(abelianization(&u, rank));
                    let augmented = IntegerLattice::from_vectors(rank, &columns);
                    if !augmented.contains(&abelianization(&w, rank)) {
                        continue;
                    }
                    let mut decided = false;
                    'scan: for magnitude in 0..=order_cutoff as i64 {
                        for p in [magnitude, -magnitude] {
                            match oracle.query(&w.concat(&u.power(p))) {
                                Verdict::Trivial => {
                                    candidates.push(p);
                                    decided = true;
                                    break 'scan;
                                }
                                Verdict::Nontrivial => {}
                                Verdict::Unknown => {
                                    exactness = exactness.join(Exactness::BudgetExhausted);
                                    decided = true;
                                    break 'scan;
                                }
                            }
                            if magnitude == 0 {
                                break;
                            }
                        }
                    }
                    if !decided && !(free_group && order_cutoff >= n) {
                        // a valid exponent beyond the scan range cannot be
                        // ruled out — except over a free group, where
                        // |u^p| ≥ |p| forces |p| ≤ |w| ≤ n, so a scan
                        // covering ±n is complete
                        exactness = exactness.join(Exactness::LowerBound);
                    }
                }
            }
            for p in candidates {
                consider(w.concat(&u.power(p)), p, &mut value, &mut exactness);
            }
        }
    }
    Sample { n, value, exactness }
}
