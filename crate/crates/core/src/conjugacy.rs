//! Conjugacy search, conjugator-length statistics, and the constructive
//! conjugator pipeline for fibre products.
//!
//! Three layers. `conjugacy_search` decides u ~ v in a single group: exactly
//! in free groups via cyclic words, elsewhere by a certified ball scan with
//! homology pre-filters. `cl_base` / `cl_pair` sample conjugator length —
//! the max over conjugate pairs (u, v) with |u| + |v| ≤ n of the minimal
//! conjugator length — in the base group, in the fibre product's own
//! metric, and relative to the ambient direct square. `construct_p_conjugator`
//! builds a short fibre-product conjugator for a pair of members by aligning
//! coordinates, scanning centralizer exponents for a membership hit,
//! normalizing the exponents through the quotient, and lifting the leftover
//! kernel factor through a quotient-area certificate.

use serde::Serialize;

use crate::area::{AreaCaps, AreaOutcome, Exactness};
use crate::fibre::{FibreError, FibreSystem, PairBall, PairWord};
use crate::geometry::{primitive_root, BallIndex, RootSearch};
use crate::lattice::{abelianization, IntegerLattice};
use crate::oracle::{equal, order_of, ElementOrder, Verdict, WordOracle};
use crate::presentation::Presentation;
use crate::word::{reduced_words, Letter, Word};

fn shortlex_less(a: &Word, b: &Word) -> bool {
    (a.len(), a.letters()) < (b.len(), b.letters())
}

/// The shortest cyclic period of a cyclically reduced word: the unique r
/// with c = r^k for maximal k. Any sub-period of a reduced word is reduced.
fn primitive_period(c: &Word) -> Word {
    let l = c.letters();
    let m = l.len();
    for d in 1..=m {
        if m % d == 0 && (0..m).all(|i| l[i] == l[i % d]) {
            return Word::from_reduced(l[..d].to_vec());
        }
    }
    Word::empty()
}

/// Exact conjugacy in a free group: u ~ v iff their cyclic cores are
/// rotations of each other. Returns the shortest conjugator γ (shortlex-least
/// among ties) with γ⁻¹uγ = v, or None when not conjugate. Complete: one
/// solution z₀ comes from the rotation offset, and the full solution set
/// z₀·⟨root of v⟩ is scanned over the window that can still beat |z₀|.
pub fn free_group_conjugator(u: &Word, v: &Word) -> Option<Word> {
    let (cu, pu) = u.cyclic_reduce();
    let (cv, pv) = v.cyclic_reduce();
    if cu.len() != cv.len() {
        return None;
    }
    if cu.is_empty() {
        return Some(Word::empty());
    }
    let lu = cu.letters();
    let lv = cv.letters();
    let m = lu.len();
    let mut z0: Option<Word> = None;
    for k in 0..m {
        if (0..m).all(|i| lu[(k + i) % m] == lv[i]) {
            // u = pu·cu·pu⁻¹ and cu = h·t with |h| = k, so
            // u = (pu·h)·(t·h)·(pu·h)⁻¹ and t·h = cv: conjugate by pu·h·pv⁻¹
            let head = Word::from_reduced(lu[..k].to_vec());
            z0 = Some(pu.concat(&head).concat(&pv.invert()));
            break;
        }
    }
    let z0 = z0?;
    let rv = pv.concat(&primitive_period(&cv)).concat(&pv.invert());
    let mut best = z0.clone();
    let window = (2 * z0.len() / rv.len().max(1) + 1) as i64;
    for m in -window..=window {
        let cand = z0.concat(&rv.power(m));
        if cand.len() < best.len() || (cand.len() == best.len() && shortlex_less(&cand, &best)) {
            best = cand;
        }
    }
    Some(best)
}

/// Result of a bounded conjugacy search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConjugacySearch {
    /// A conjugator γ with γ⁻¹uγ = v, scanned shortest-first; the flag drops
    /// when an earlier candidate's comparison was inconclusive, i.e. a
    /// shorter conjugator might have been missed.
    Found { conjugator: Word, certified_minimal: bool },
    /// Certified: u and v are conjugate at no radius (cyclic-word mismatch
    /// in a free group, or conjugation-invariant homology separates them).
    NotConjugate,
    /// No conjugator within the radius. `complete` when every candidate was
    /// decisively ruled out, so any conjugator must be longer.
    Exhausted { radius: usize, complete: bool },
}

/// Searches for the shortest conjugator taking u to v. Free presentations
/// are decided exactly; elsewhere candidates are scanned in shortlex order
/// up to `radius` after a homology pre-check (conjugation acts trivially on
/// first homology, so distinct residues certify non-conjugacy).
pub fn conjugacy_search(
    p: &Presentation,
    oracle: &dyn WordOracle,
    u: &Word,
    v: &Word,
    radius: usize,
) -> ConjugacySearch {
    if p.relators().is_empty() {
        return match free_group_conjugator(u, v) {
            Some(c) => ConjugacySearch::Found { conjugator: c, certified_minimal: true },
            None => ConjugacySearch::NotConjugate,
        };
    }
    let rank = p.alphabet().len();
    let columns: Vec<Vec<i128>> =
        p.relators().iter().map(|r| abelianization(r, rank)).collect();
    let lattice = IntegerLattice::from_vectors(rank, &columns);
    if lattice.residue(&abelianization(u, rank)) != lattice.residue(&abelianization(v, rank)) {
        return ConjugacySearch::NotConjugate;
    }
    let mut complete = true;
    for gamma in reduced_words(rank, radius) {
        match equal(oracle, &u.conjugate(&gamma), v) {
            Verdict::Trivial => {
                return ConjugacySearch::Found {
                    conjugator: gamma,
                    certified_minimal: complete,
                }
            }
            Verdict::Nontrivial => {}
            Verdict::Unknown => complete = false,
        }
    }
    ConjugacySearch::Exhausted { radius, complete }
}

/// Membership of an element in the cyclic sub-semigroup {y, y², y³, …}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SemigroupMembership {
    /// x = yᵖ for the least positive p
    Member { least_power: u64 },
    NonMember,
    Unknown,
}

/// Decides whether x = yᵖ for some 1 ≤ p ≤ rho. `NonMember` needs every
/// power decisively unequal *and* the caller vouching that rho bounds the
/// powers that could still matter (`rho_certified`) — e.g. because |yᵖ|
/// outgrows any ball containing x, or the orders involved divide rho.
pub fn cyclic_semigroup_membership(
    x: &Word,
    y: &Word,
    oracle: &dyn WordOracle,
    rho: u64,
    rho_certified: bool,
) -> SemigroupMembership {
    let mut decisive = true;
    for p in 1..=rho {
        match equal(oracle, &y.power(p as i64), x) {
            Verdict::Trivial => return SemigroupMembership::Member { least_power: p },
            Verdict::Nontrivial => {}
            Verdict::Unknown => decisive = false,
        }
    }
    if decisive && rho_certified {
        SemigroupMembership::NonMember
    } else {
        SemigroupMembership::Unknown
    }
}

// ---------------------------------------------------------------------------
// Conjugator-length statistics
// ---------------------------------------------------------------------------

/// Which metric the pairs and the conjugators are measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClFlavor {
    /// pairs and conjugators in the base group's generators
    BaseIntrinsic,
    /// pairs and conjugators in the fibre product's own generators
    PairIntrinsic,
    /// pairs measured in the ambient direct square, conjugators in the
    /// fibre product — the relative conjugator length
    PairRelative,
}

impl ClFlavor {
    pub fn as_str(self) -> &'static str {
        match self {
            ClFlavor::BaseIntrinsic => "base_intrinsic",
            ClFlavor::PairIntrinsic => "pair_intrinsic",
            ClFlavor::PairRelative => "pair_relative",
        }
    }
}

/// One sampled value of the conjugator-length function.
#[derive(Debug, Clone, Serialize)]
pub struct ClSample {
    pub n: u64,
    pub value: u64,
    /// a pair realizing the max, rendered
    pub witness: Option<(String, String)>,
    /// its minimal conjugator, rendered
    pub conjugator: Option<String>,
    pub exactness: Exactness,
}

/// Caps for base-group conjugator-length sampling.
#[derive(Debug, Clone, Copy)]
pub struct ClCaps {
    pub search_radius: usize,
    pub quotient_budget: u64,
}

impl Default for ClCaps {
    fn default() -> ClCaps {
        ClCaps { search_radius: 4, quotient_budget: 50_000_000 }
    }
}

/// CL(n) in a single group: the max over conjugate pairs with
/// |u| + |v| ≤ n of the minimal conjugator length. Exact when the ball is
/// complete and every pair was decided; a pair whose search exhausted
/// downgrades to a lower bound (its contribution may be missing), and an
/// uncertified minimum downgrades further (the value could overshoot).
pub fn cl_base(
    p: &Presentation,
    oracle: &dyn WordOracle,
    n: u64,
    caps: &ClCaps,
) -> ClSample {
    let ball = BallIndex::build(p, oracle, n as usize, caps.quotient_budget);
    let mut exactness =
        if ball.complete() { Exactness::Exact } else { Exactness::LowerBound };
    let alpha = p.alphabet();
    let mut value = 0u64;
    let mut witness = None;
    let mut conjugator = None;
    for (i, u) in ball.elements().iter().enumerate() {
        for v in &ball.elements()[i..] {
            if u.len() + v.len() > n as usize {
                continue;
            }
            match conjugacy_search(p, oracle, u, v, caps.search_radius) {
                ConjugacySearch::Found { conjugator: c, certified_minimal } => {
                    if !certified_minimal {
                        exactness = exactness.join(Exactness::BudgetExhausted);
                    }
                    if c.len() as u64 > value {
                        value = c.len() as u64;
                        witness = Some((alpha.format_word(u), alpha.format_word(v)));
                        conjugator = Some(alpha.format_word(&c));
                    }
                }
                ConjugacySearch::NotConjugate => {}
                ConjugacySearch::Exhausted { .. } => {
                    exactness = exactness.join(Exactness::LowerBound);
                }
            }
        }
    }
    ClSample { n, value, witness, conjugator, exactness }
}

/// Caps for fibre-product conjugator-length sampling.
#[derive(Debug, Clone, Copy)]
pub struct ClPairCaps {
    /// how deep the conjugator ball is grown
    pub conjugator_radius: usize,
    pub quotient_budget: u64,
}

impl Default for ClPairCaps {
    fn default() -> ClPairCaps {
        ClPairCaps { conjugator_radius: 4, quotient_budget: 50_000_000 }
    }
}

/// The coordinate conjugator set uᵢ → vᵢ in a free base: all of
/// rootᵖ·gamma. A trivial coordinate (uᵢ = vᵢ = 1) has the whole group as
/// its set, encoded by an empty root and gamma.
struct CoordinateData {
    gamma: Word,
    root: Word,
}

fn free_coordinate_data(u: &Word, v: &Word) -> Option<CoordinateData> {
    if u.is_empty() || v.is_empty() {
        return if u.is_empty() && v.is_empty() {
            Some(CoordinateData { gamma: Word::empty(), root: Word::empty() })
        } else {
            None
        };
    }
    let gamma = free_group_conjugator(u, v)?;
    let (core, prefix) = u.cyclic_reduce();
    let root = prefix.concat(&primitive_period(&core)).concat(&prefix.invert());
    Some(CoordinateData { gamma, root })
}

/// Whether the conjugator coset (r₁ᵖγ₁, r₂^q γ₂) meets the fibre product,
/// decided through the quotient's abelianization: for a certified-abelian
/// quotient, membership is exactly the lattice condition
/// ab(γ₁) − ab(γ₂) ∈ L_Q + ℤ·ab(r₁) + ℤ·ab(r₂).
fn abelian_membership_solvable(
    sys: &FibreSystem,
    d1: &CoordinateData,
    d2: &CoordinateData,
) -> bool {
    // a trivial coordinate ranges over the whole group, whose quotient
    // image is everything: always solvable
    if (d1.root.is_empty() && d1.gamma.is_empty())
        || (d2.root.is_empty() && d2.gamma.is_empty())
    {
        return true;
    }
    let rank = sys.base().alphabet().len();
    let mut cols: Vec<Vec<i128>> = sys
        .quotient()
        .relators()
        .iter()
        .map(|r| abelianization(r, rank))
        .collect();
    cols.push(abelianization(&d1.root, rank));
    cols.push(abelianization(&d2.root, rank));
    let lat = IntegerLattice::from_vectors(rank, &cols);
    let t1 = abelianization(&d1.gamma, rank);
    let t2 = abelianization(&d2.gamma, rank);
    let target: Vec<i128> = t1.iter().zip(&t2).map(|(a, b)| a - b).collect();
    lat.contains(&target)
}

/// Certifies commutativity of the quotient by querying all generator
/// commutators.
fn quotient_certified_abelian(sys: &FibreSystem) -> bool {
    let rank = sys.base().alphabet().len() as u32;
    for i in 0..rank {
        for j in (i + 1)..rank {
            let xi = Word::from_reduced(vec![Letter::new(i, false)]);
            let xj = Word::from_reduced(vec![Letter::new(j, false)]);
            let comm = xi.invert().concat(&xj.invert()).concat(&xi).concat(&xj);
            if sys.quotient_oracle().query(&comm) != Verdict::Trivial {
                return false;
            }
        }
    }
    true
}

/// The minimal certified depth of a fibre-product conjugator taking U to V,
/// scanned over a grown pair ball in depth order. `uncertain` is raised
/// when an inconclusive comparison may have hidden a shallower conjugator.
fn pair_conjugator_min(
    sys: &FibreSystem,
    ball: &PairBall,
    u: &(Word, Word),
    v: &(Word, Word),
    uncertain: &mut bool,
) -> Option<((Word, Word), usize)> {
    let og = sys.base_oracle();
    for ((z1, z2), depth) in ball.entries() {
        match (
            equal(og, &u.0.conjugate(z1), &v.0),
            equal(og, &u.1.conjugate(z2), &v.1),
        ) {
            (Verdict::Trivial, Verdict::Trivial) => {
                return Some(((z1.clone(), z2.clone()), *depth))
            }
            (Verdict::Unknown, _) | (_, Verdict::Unknown) => *uncertain = true,
            _ => {}
        }
    }
    None
}

/// CL(n) over a fibre product, in the chosen flavor. Pairs are enumerated
/// from the fibre-product ball (intrinsic) or from member pairs of the
/// direct square (relative); conjugators always live in the fibre product.
/// For a free base with a certified-abelian quotient the enumeration and
/// the non-conjugacy filters are exact, so misses within the caps are the
/// only exactness downgrades.
pub fn cl_pair(sys: &FibreSystem, n: u64, flavor: ClFlavor, caps: &ClPairCaps) -> ClSample {
    if flavor == ClFlavor::BaseIntrinsic {
        let base_caps = ClCaps {
            search_radius: caps.conjugator_radius,
            quotient_budget: caps.quotient_budget,
        };
        return cl_base(sys.base(), sys.base_oracle(), n, &base_caps);
    }
    let base_free = sys.base().relators().is_empty();
    let abelian_q = quotient_certified_abelian(sys);
    let mut exactness = Exactness::Exact;
    if !base_free {
        // pair-ball keys and coordinate screens are only best-effort
        exactness = exactness.join(Exactness::LowerBound);
    }
    let universe: Vec<((Word, Word), usize)> = match flavor {
        ClFlavor::PairIntrinsic => sys.pair_ball(n as usize).entries().to_vec(),
        ClFlavor::PairRelative => {
            let ball =
                BallIndex::build(sys.base(), sys.base_oracle(), n as usize, caps.quotient_budget);
            if !ball.complete() {
                exactness = exactness.join(Exactness::LowerBound);
            }
            let mut members = Vec::new();
            for g1 in ball.elements() {
                for g2 in ball.elements() {
                    if g1.len() + g2.len() > n as usize {
                        continue;
                    }
                    match sys.membership(g1, g2) {
                        Verdict::Trivial => {
                            members.push(((g1.clone(), g2.clone()), g1.len() + g2.len()))
                        }
                        Verdict::Unknown => {
                            exactness = exactness.join(Exactness::LowerBound);
                        }
                        Verdict::Nontrivial => {}
                    }
                }
            }
            members
        }
        ClFlavor::BaseIntrinsic => unreachable!(),
    };
    let conj_ball = sys.pair_ball(caps.conjugator_radius);
    let alpha = sys.base().alphabet();
    let render = |w: &(Word, Word)| {
        format!("({}, {})", alpha.format_word(&w.0), alpha.format_word(&w.1))
    };
    let mut value = 0u64;
    let mut witness = None;
    let mut conjugator = None;
    for (i, (uu, lu)) in universe.iter().enumerate() {
        for (vv, lv) in &universe[i..] {
            if lu + lv > n as usize {
                continue;
            }
            if base_free {
                let coords = (
                    free_coordinate_data(&uu.0, &vv.0),
                    free_coordinate_data(&uu.1, &vv.1),
                );
                let (d1, d2) = match coords {
                    (Some(d1), Some(d2)) => (d1, d2),
                    // some coordinate is not even conjugate in the base
                    _ => continue,
                };
                if abelian_q && !abelian_membership_solvable(sys, &d1, &d2) {
                    // conjugate in the square but never inside the product
                    continue;
                }
            }
            let mut uncertain = false;
            match pair_conjugator_min(sys, &conj_ball, uu, vv, &mut uncertain) {
                Some((z, depth)) => {
                    if uncertain {
                        exactness = exactness.join(Exactness::BudgetExhausted);
                    }
                    if depth as u64 > value {
                        value = depth as u64;
                        witness = Some((render(uu), render(vv)));
                        conjugator = Some(render(&z));
                    }
                }
                None => {
                    // possibly conjugate deeper than the cap
                    exactness = exactness.join(Exactness::LowerBound);
                }
            }
        }
    }
    ClSample { n, value, witness, conjugator, exactness }
}

// ---------------------------------------------------------------------------
// The constructive conjugator pipeline
// ---------------------------------------------------------------------------

/// Caps for the conjugator pipeline.
#[derive(Debug, Clone, Copy)]
pub struct ConjugatorCaps {
    /// radius of the base-group conjugacy searches
    pub search_radius: usize,
    /// |q₁|, |q₂| bound for the centralizer-exponent scan
    pub exponent_cap: i64,
    /// power bound when ordering the root's quotient image
    pub order_cutoff: u64,
    /// ball radius for the primitive-root searches
    pub root_radius: usize,
    pub root_exponent_cap: u64,
    pub quotient_budget: u64,
}

impl Default for ConjugatorCaps {
    fn default() -> ConjugatorCaps {
        ConjugatorCaps {
            search_radius: 4,
            exponent_cap: 4,
            order_cutoff: 8,
            root_radius: 3,
            root_exponent_cap: 8,
            quotient_budget: 50_000_000,
        }
    }
}

/// Every intermediate quantity of the pipeline, for audit and display.
#[derive(Debug, Clone, Serialize)]
pub struct StageRecord {
    /// which path produced the conjugator
    pub route: String,
    /// g: aligns the second coordinates (stage: coordinate reduction)
    pub reduction_conjugator: Word,
    /// γ: conjugates u₁ to the aligned first target
    pub gamma: Word,
    /// centralizer roots y᳡ᵉ¹ = u₁, y₂ᵉ² = u₂
    pub y1: Word,
    pub e1: u64,
    pub y2: Word,
    pub e2: u64,
    /// the exponents where the membership scan hit
    pub q1: i64,
    pub q2: i64,
    /// q₂ = p·e₂ + r₂ with 0 ≤ r₂ < e₂, and p′ = q₁ − p·e₁
    pub p: i64,
    pub r2: i64,
    pub p_prime: i64,
    /// order of y₁'s quotient image when certified finite
    pub omega: Option<u64>,
    /// p′ reduced mod omega to |p″| ≤ omega/2 when that is shorter
    pub p_final: i64,
}

impl StageRecord {
    fn degenerate(route: &str) -> StageRecord {
        StageRecord {
            route: route.to_string(),
            reduction_conjugator: Word::empty(),
            gamma: Word::empty(),
            y1: Word::empty(),
            e1: 1,
            y2: Word::empty(),
            e2: 1,
            q1: 0,
            q2: 0,
            p: 0,
            r2: 0,
            p_prime: 0,
            omega: None,
            p_final: 0,
        }
    }
}

/// A verified fibre-product conjugator: ζ⁻¹ U ζ = V coordinatewise and
/// ζ ∈ P, with the full stage record of how it was built.
#[derive(Debug, Clone, Serialize)]
pub struct ConjugatorCertificate {
    pub u: (Word, Word),
    pub v: (Word, Word),
    /// the conjugator over the fibre-product generators
    pub zeta: PairWord,
    /// its coordinate image in the base group
    pub zeta_coords: (Word, Word),
    pub stages: StageRecord,
}

/// Outcome of the pipeline.
#[derive(Debug, Clone, Serialize)]
pub enum ConjugatorOutcome {
    Certificate(Box<ConjugatorCertificate>),
    /// certified impossible (a coordinate obstruction, or the quotient
    /// never lets the conjugator coset into the fibre product)
    NotConjugate,
    /// some stage ran out of budget; the stage names the frontier
    Exhausted { stage: String },
}

fn exhausted(stage: &str) -> ConjugatorOutcome {
    ConjugatorOutcome::Exhausted { stage: stage.to_string() }
}

/// (q₁, q₂) scan order: the diagonal first — a hit there keeps the leftover
/// exponent zero — then off-diagonal pairs by |q₁| + |q₂|.
fn exponent_pairs(cap: i64) -> Vec<(i64, i64)> {
    let mut out = vec![(0, 0)];
    for q in 1..=cap {
        out.push((q, q));
        out.push((-q, -q));
    }
    for s in 1..=(2 * cap) {
        for q1 in -cap..=cap {
            let rest = s - q1.abs();
            if rest < 0 || rest > cap {
                continue;
            }
            let seconds = if rest == 0 { vec![0] } else { vec![rest, -rest] };
            for q2 in seconds {
                if q1 != q2 {
                    out.push((q1, q2));
                }
            }
        }
    }
    out
}

/// Writes the coordinate pair (z₁, z₂) ∈ P as a fibre-product word:
/// (z₁, z₂) = (z₁z₂⁻¹, 1)·(z₂, z₂), the kernel factor lifted through a
/// quotient-area certificate and the diagonal read off letter for letter
/// (diagonal letters share indices with the base alphabet).
fn pair_word_for(
    sys: &FibreSystem,
    z1: &Word,
    z2: &Word,
) -> Result<Result<PairWord, ConjugatorOutcome>, FibreError> {
    let kernel_factor = z1.concat(&z2.invert());
    if kernel_factor.is_empty() {
        return Ok(Ok(PairWord::new(z2.clone())));
    }
    if !sys.supports_kernel_lift() {
        return Ok(Err(exhausted("kernel-factor lift unavailable on this system")));
    }
    let caps = AreaCaps::default_for(&kernel_factor, sys.quotient());
    match sys.quotient_engine().area(&kernel_factor, &caps) {
        AreaOutcome::Found { certificate, .. } => {
            let lifted = sys.lift_area_certificate(&kernel_factor, &certificate)?;
            Ok(Ok(PairWord::new(lifted.word().concat(z2))))
        }
        AreaOutcome::NotNull => Ok(Err(exhausted("kernel factor not null in the quotient"))),
        AreaOutcome::Exhausted { .. } => Ok(Err(exhausted("kernel-factor area search"))),
    }
}

/// Re-verifies a finished conjugator end to end: the transcription realizes
/// (z₁, z₂), the conjugation holds coordinatewise, and the pair is a member.
fn verify_and_emit(
    sys: &FibreSystem,
    u: (&Word, &Word),
    v: (&Word, &Word),
    z1: Word,
    z2: Word,
    zeta: PairWord,
    stages: StageRecord,
) -> Result<ConjugatorOutcome, FibreError> {
    let og = sys.base_oracle();
    let (left, right) = sys.transcribe(&zeta);
    let checks = [
        equal(og, &left, &z1),
        equal(og, &right, &z2),
        equal(og, &u.0.conjugate(&z1), v.0),
        equal(og, &u.1.conjugate(&z2), v.1),
        sys.membership(&z1, &z2),
    ];
    if checks.iter().any(|c| *c == Verdict::Nontrivial) {
        return Err(FibreError::VerificationFailed);
    }
    if checks.iter().any(|c| *c == Verdict::Unknown) {
        return Ok(exhausted("final verification"));
    }
    Ok(ConjugatorOutcome::Certificate(Box::new(ConjugatorCertificate {
        u: (u.0.clone(), u.1.clone()),
        v: (v.0.clone(), v.1.clone()),
        zeta,
        zeta_coords: (z1, z2),
        stages,
    })))
}

/// Builds a verified fibre-product conjugator from U to V (members given by
/// coordinates), staged:
///
/// 1. align the second coordinates with a base conjugator g;
/// 2. find γ conjugating u₁ to the aligned first target;
/// 3. take centralizer roots y₁ᵉ¹ = u₁, y₂ᵉ² = u₂;
/// 4. scan exponents for ζ = (y₁^q₁ γ, y₂^q₂) landing in the product —
///    the quotient image of y₂^{-q₂} y₁^{q₁} γ must die;
/// 5. normalize: q₂ = p·e₂ + r₂ pushes a power of U out, leaving
///    (y₁^{p′}, 1)(1, y₂^{r₂})(γ, 1) with p′ = q₁ − p·e₁;
/// 6. if y₁'s quotient image has certified finite order ω < 2|p′|, reduce
///    p′ mod ω to |p″| ≤ ω/2 — the discarded (y₁^ω, 1)^μ lies in P and
///    centralizes U;
/// 7. emit ζ″·(g, g) as a fibre-product word (kernel factor lifted through
///    a quotient-area certificate) and re-verify everything.
///
/// One-sided pairs short-circuit to a diagonal conjugator, and coordinate
/// obstructions certify `NotConjugate`.
pub fn construct_p_conjugator(
    sys: &FibreSystem,
    u: (&Word, &Word),
    v: (&Word, &Word),
    caps: &ConjugatorCaps,
) -> Result<ConjugatorOutcome, FibreError> {
    let og = sys.base_oracle();
    let oq = sys.quotient_oracle();
    for pair in [u, v] {
        match sys.membership(pair.0, pair.1) {
            Verdict::Nontrivial => return Err(FibreError::NotAMember),
            Verdict::Unknown => return Ok(exhausted("membership screening")),
            Verdict::Trivial => {}
        }
    }
    // U = V: the empty conjugator
    if equal(og, u.0, v.0) == Verdict::Trivial && equal(og, u.1, v.1) == Verdict::Trivial {
        return verify_and_emit(
            sys,
            u,
            v,
            Word::empty(),
            Word::empty(),
            PairWord::new(Word::empty()),
            StageRecord::degenerate("identity"),
        );
    }
    // coordinate triviality screen: mixed pairs can never be conjugate
    let quads = [og.query(u.0), og.query(u.1), og.query(v.0), og.query(v.1)];
    if quads.iter().any(|q| *q == Verdict::Unknown) {
        return Ok(exhausted("triviality screening"));
    }
    let u1_trivial = quads[0] == Verdict::Trivial;
    let u2_trivial = quads[1] == Verdict::Trivial;
    if u1_trivial != (quads[2] == Verdict::Trivial)
        || u2_trivial != (quads[3] == Verdict::Trivial)
    {
        return Ok(ConjugatorOutcome::NotConjugate);
    }
    // one-sided pairs: a diagonal conjugator from the live coordinate
    if u1_trivial || u2_trivial {
        let (from, to) = if u2_trivial { (u.0, v.0) } else { (u.1, v.1) };
        return match conjugacy_search(sys.base(), og, from, to, caps.search_radius) {
            ConjugacySearch::Found { conjugator, .. } => {
                let mut stages = StageRecord::degenerate("one_sided");
                stages.gamma = conjugator.clone();
                verify_and_emit(
                    sys,
                    u,
                    v,
                    conjugator.clone(),
                    conjugator.clone(),
                    PairWord::new(conjugator),
                    stages,
                )
            }
            ConjugacySearch::NotConjugate => Ok(ConjugatorOutcome::NotConjugate),
            ConjugacySearch::Exhausted { .. } => Ok(exhausted("one-sided conjugacy search")),
        };
    }
    // stage 1: align the second coordinates
    let g_word = match conjugacy_search(sys.base(), og, u.1, v.1, caps.search_radius) {
        ConjugacySearch::Found { conjugator, .. } => conjugator,
        ConjugacySearch::NotConjugate => return Ok(ConjugatorOutcome::NotConjugate),
        ConjugacySearch::Exhausted { .. } => {
            return Ok(exhausted("second-coordinate alignment"))
        }
    };
    // conjugating the target back by g⁻¹ fixes the second coordinate at u₂
    let v1_aligned = v.0.conjugate(&g_word.invert());
    // stage 2: the first-coordinate conjugator
    let gamma = match conjugacy_search(sys.base(), og, u.0, &v1_aligned, caps.search_radius) {
        ConjugacySearch::Found { conjugator, .. } => conjugator,
        ConjugacySearch::NotConjugate => return Ok(ConjugatorOutcome::NotConjugate),
        ConjugacySearch::Exhausted { .. } => {
            return Ok(exhausted("first-coordinate search"))
        }
    };
    // stage 3: centralizer roots (roots commute with their powers, so any
    // certified root works; the element itself is the fallback)
    let root_ball =
        BallIndex::build(sys.base(), og, caps.root_radius, caps.quotient_budget);
    let take_root = |w: &Word| match primitive_root(w, &root_ball, og, caps.root_exponent_cap)
    {
        RootSearch::Found { root, exponent, .. } => (root, exponent),
        RootSearch::NotFound => (w.clone(), 1),
    };
    let (y1, e1) = take_root(u.0);
    let (y2, e2) = take_root(u.1);
    // stage 4: scan exponents for a membership hit
    let mut hit = None;
    let mut scan_decisive = true;
    for (q1, q2) in exponent_pairs(caps.exponent_cap) {
        let w = y2.power(-q2).concat(&y1.power(q1)).concat(&gamma);
        match oq.query(&w) {
            Verdict::Trivial => {
                hit = Some((q1, q2));
                break;
            }
            Verdict::Nontrivial => {}
            Verdict::Unknown => scan_decisive = false,
        }
    }
    let (q1, q2) = match hit {
        Some(pair) => pair,
        None => {
            return Ok(exhausted(if scan_decisive {
                "membership scan"
            } else {
                "membership scan (inconclusive)"
            }))
        }
    };
    // stage 5: push a power of U out of the conjugator
    let p = q2.div_euclid(e2 as i64);
    let r2 = q2.rem_euclid(e2 as i64);
    let p_prime = q1 - p * (e1 as i64);
    // stage 6: reduce the leftover exponent through the quotient order
    let omega = match order_of(&y1, oq, caps.order_cutoff) {
        ElementOrder::Finite(w) => Some(w),
        _ => None,
    };
    let p_final = match omega {
        Some(w) if (w as i64) < 2 * p_prime.abs() => {
            let m = p_prime.rem_euclid(w as i64);
            if 2 * m > w as i64 {
                m - w as i64
            } else {
                m
            }
        }
        _ => p_prime,
    };
    // stage 7: assemble ζ″·(g, g) and express it over the pair generators
    let z1 = y1.power(p_final).concat(&gamma).concat(&g_word);
    let z2 = y2.power(r2).concat(&g_word);
    let zeta = match pair_word_for(sys, &z1, &z2)? {
        Ok(zeta) => zeta,
        Err(outcome) => return Ok(outcome),
    };
    let stages = StageRecord {
        route: "general".to_string(),
        reduction_conjugator: g_word,
        gamma,
        y1,
        e1,
        y2,
        e2,
        q1,
        q2,
        p,
        r2,
        p_prime,
        omega,
        p_final,
    };
    verify_and_emit(sys, u, v, z1, z2, zeta, stages)
}

// ---------------------------------------------------------------------------
// Hard instances
// ---------------------------------------------------------------------------

/// A conjugate pair whose instance size is tiny but whose conjugators must
/// reach as deep as the distortion witness: U = (a, a) for a kernel letter
/// a, V = (γ⁻¹aγ, a) for the hardest certified kernel element γ with
/// |γ| ≤ n. Every fibre-product conjugator decomposes over the centralizer
/// as (a₀ᵖ·γ, a₀^q).
#[derive(Debug, Clone, Serialize)]
pub struct HardInstance {
    pub u: (Word, Word),
    pub v: (Word, Word),
    /// the kernel element the instance is built from
    pub gamma: Word,
    pub u_p_len: Option<usize>,
    pub v_p_len: Option<usize>,
    /// |V|_P ≤ 2n + 2 certified
    pub bound_ok: bool,
}

/// Builds the hard conjugacy instance at scale n from the hardest
/// distortion witness.
pub fn hard_conjugacy_instance(
    sys: &FibreSystem,
    n: usize,
    caps: &crate::fibre::DistortionCaps,
) -> Result<HardInstance, FibreError> {
    if sys.kernel_names().is_empty() {
        return Err(FibreError::NoKernelLetters);
    }
    let name = &sys.kernel_names()[0];
    let idx = sys
        .base()
        .alphabet()
        .names()
        .iter()
        .position(|k| k == name)
        .expect("kernel letter names come from the base alphabet");
    let a = Word::from_reduced(vec![Letter::new(idx as u32, false)]);
    let witness = sys.hard_distortion_witness(n, caps);
    let gamma = sys
        .base()
        .alphabet()
        .parse(&witness.gamma)
        .map_err(crate::presentation::PresentationError::from)?;
    let u = (a.clone(), a.clone());
    let v = (a.conjugate(&gamma), a);
    let ball = sys.pair_ball(caps.p_radius_cap);
    let u_p_len = sys.ball_lookup(&ball, &u.0, &u.1);
    let v_p_len = sys.ball_lookup(&ball, &v.0, &v.1);
    let bound_ok = v_p_len.is_some_and(|l| l <= 2 * n + 2);
    Ok(HardInstance { u, v, gamma, u_p_len, v_p_len, bound_ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fibre::{make_fibre_system, DistortionCaps};
    use crate::oracle::BallOracle;

    fn f2() -> Presentation {
        Presentation::parse("gens: x y\n").unwrap()
    }

    fn z2() -> Presentation {
        Presentation::parse("gens: x y\nrel: x y x^-1 y^-1\n").unwrap()
    }

    fn z3() -> Presentation {
        Presentation::parse("gens: x\nrel: x^3\n").unwrap()
    }

    fn word(p: &Presentation, s: &str) -> Word {
        p.alphabet().parse(s).unwrap()
    }

    fn kernel_x_system() -> FibreSystem {
        make_fibre_system(&f2(), &["x"]).unwrap()
    }

    fn certificate(outcome: ConjugatorOutcome) -> ConjugatorCertificate {
        match outcome {
            ConjugatorOutcome::Certificate(c) => *c,
            other => panic!("expected a certificate, got {other:?}"),
        }
    }

    #[test]
    fn identical_words_conjugate_by_the_empty_word() {
        let p = f2();
        let oracle = BallOracle::new(p.clone(), 8, 50);
        let u = word(&p, "x y");
        match conjugacy_search(&p, &oracle, &u, &u, 2) {
            ConjugacySearch::Found { conjugator, certified_minimal } => {
                assert!(conjugator.is_empty());
                assert!(certified_minimal);
            }
            other => panic!("expected the empty conjugator, got {other:?}"),
        }
    }

    #[test]
    fn free_conjugators_frozen_values() {
        let p = f2();
        let cases = [
            ("x y", "y x", Some("x")),
            ("x", "y^-1 x y", Some("y")),
            ("x", "y x y^-1", Some("y^-1")),
            ("x y", "x y^-1", None),
            ("x", "y", None),
            ("x", "x^-1", None),
        ];
        for (us, vs, want) in cases {
            let got = free_group_conjugator(&word(&p, us), &word(&p, vs));
            match want {
                Some(ws) => {
                    let c = got.unwrap_or_else(|| panic!("{us} ~ {vs} expected"));
                    assert_eq!(c, word(&p, ws), "conjugator for {us} → {vs}");
                }
                None => assert!(got.is_none(), "{us} !~ {vs}"),
            }
        }
    }

    #[test]
    fn free_conjugator_really_conjugates() {
        let p = f2();
        for (us, vs) in [
            ("x y x", "x x y"),
            ("y^-1 x y x^-1", "x^-1 y^-1 x y"),
            ("x y^2", "y x y"),
            ("x^2 y x^-1", "x y x^-1 x^-1 x^2"),
        ] {
            let u = word(&p, us);
            let v = word(&p, vs);
            let c = free_group_conjugator(&u, &v)
                .unwrap_or_else(|| panic!("{us} ~ {vs} expected"));
            assert_eq!(u.conjugate(&c), v, "γ⁻¹·{us}·γ = {vs}");
            // minimality: no shorter conjugator among all shorter words
            for shorter in reduced_words(2, c.len().saturating_sub(1)) {
                assert_ne!(u.conjugate(&shorter), v, "shorter conjugator for {us} → {vs}");
            }
        }
    }

    #[test]
    fn homology_residues_rule_out_conjugacy() {
        let p = z2();
        let oracle = BallOracle::new(p.clone(), 10, 200);
        assert_eq!(
            conjugacy_search(&p, &oracle, &word(&p, "x"), &word(&p, "y"), 4),
            ConjugacySearch::NotConjugate
        );
    }

    #[test]
    fn abelian_equal_elements_conjugate_trivially() {
        let p = z2();
        let oracle = BallOracle::new(p.clone(), 10, 200);
        match conjugacy_search(&p, &oracle, &word(&p, "x y"), &word(&p, "y x"), 3) {
            ConjugacySearch::Found { conjugator, .. } => assert!(conjugator.is_empty()),
            other => panic!("equal elements, got {other:?}"),
        }
    }

    #[test]
    fn torsion_power_collapse_is_found_by_the_scan() {
        // x² and x⁻¹ are the same element of ⟨x | x³⟩
        let p = z3();
        let oracle = BallOracle::new(p.clone(), 8, 50);
        match conjugacy_search(&p, &oracle, &word(&p, "x^2"), &word(&p, "x^-1"), 2) {
            ConjugacySearch::Found { conjugator, .. } => assert!(conjugator.is_empty()),
            other => panic!("expected a trivial conjugator, got {other:?}"),
        }
    }

    #[test]
    fn nonfree_scan_finds_a_short_conjugator() {
        // ℤ/3 ∗ ℤ: x ~ y⁻¹xy by y, and nothing shorter works
        let p = Presentation::parse("gens: x y\nrel: x^3\n").unwrap();
        let oracle = BallOracle::new(p.clone(), 10, 100);
        match conjugacy_search(&p, &oracle, &word(&p, "x"), &word(&p, "y^-1 x y"), 2) {
            ConjugacySearch::Found { conjugator, .. } => {
                assert_eq!(conjugator, word(&p, "y"));
            }
            other => panic!("expected conjugator y, got {other:?}"),
        }
    }

    #[test]
    fn cl_base_frozen_values() {
        let free = f2();
        let free_oracle = BallOracle::new(free.clone(), 8, 50);
        let caps = ClCaps::default();

        let at2 = cl_base(&free, &free_oracle, 2, &caps);
        assert_eq!(at2.value, 0);
        assert_eq!(at2.exactness, Exactness::Exact);

        let at4 = cl_base(&free, &free_oracle, 4, &caps);
        assert_eq!(at4.value, 1);
        assert_eq!(at4.exactness, Exactness::Exact);
        let (u, v) = at4.witness.expect("a witness pair at n = 4");
        let c = at4.conjugator.expect("its conjugator");
        let uw = free.alphabet().parse(&u).unwrap();
        let vw = free.alphabet().parse(&v).unwrap();
        let cw = free.alphabet().parse(&c).unwrap();
        assert_eq!(uw.conjugate(&cw), vw);
        assert_eq!(cw.len(), 1);

        // an abelian group never needs a conjugator
        let flat = z2();
        let flat_oracle = BallOracle::new(flat.clone(), 10, 200);
        for n in [2, 4] {
            let s = cl_base(&flat, &flat_oracle, n, &caps);
            assert_eq!(s.value, 0, "abelian CL({n})");
            assert_eq!(s.exactness, Exactness::Exact);
        }
    }

    #[test]
    fn semigroup_membership_frozen_values() {
        let line = Presentation::parse("gens: x\n").unwrap();
        let line_oracle = BallOracle::new(line.clone(), 8, 50);
        assert_eq!(
            cyclic_semigroup_membership(
                &word(&line, "x^3"),
                &word(&line, "x"),
                &line_oracle,
                5,
                true
            ),
            SemigroupMembership::Member { least_power: 3 }
        );
        // x⁻¹ is behind the identity: never a positive power
        assert_eq!(
            cyclic_semigroup_membership(
                &word(&line, "x^-1"),
                &word(&line, "x"),
                &line_oracle,
                5,
                true
            ),
            SemigroupMembership::NonMember
        );
        // an unvouched bound cannot certify absence
        assert_eq!(
            cyclic_semigroup_membership(
                &word(&line, "x^-1"),
                &word(&line, "x"),
                &line_oracle,
                5,
                false
            ),
            SemigroupMembership::Unknown
        );

        let torus = z3();
        let torus_oracle = BallOracle::new(torus.clone(), 8, 50);
        assert_eq!(
            cyclic_semigroup_membership(
                &word(&torus, "x^2"),
                &word(&torus, "x"),
                &torus_oracle,
                3,
                true
            ),
            SemigroupMembership::Member { least_power: 2 }
        );
    }

    #[test]
    fn pipeline_identity_route() {
        let p = f2();
        let sys = kernel_x_system();
        let x = word(&p, "x");
        let out =
            construct_p_conjugator(&sys, (&x, &x), (&x, &x), &ConjugatorCaps::default())
                .unwrap();
        let cert = certificate(out);
        assert_eq!(cert.stages.route, "identity");
        assert!(cert.zeta.is_empty());
    }

    #[test]
    fn pipeline_one_sided_route_uses_a_diagonal_conjugator() {
        let p = f2();
        let sys = kernel_x_system();
        let u = (word(&p, "x"), Word::empty());
        let v = (word(&p, "y x y^-1"), Word::empty());
        let out = construct_p_conjugator(
            &sys,
            (&u.0, &u.1),
            (&v.0, &v.1),
            &ConjugatorCaps::default(),
        )
        .unwrap();
        let cert = certificate(out);
        assert_eq!(cert.stages.route, "one_sided");
        assert_eq!(cert.zeta.len(), 1);
        assert_eq!(cert.zeta_coords.0, word(&p, "y^-1"));
        assert_eq!(cert.zeta_coords.1, word(&p, "y^-1"));
        assert_eq!(
            sys.pair_alphabet().format_word(cert.zeta.word()),
            "d_y^-1"
        );
    }

    #[test]
    fn pipeline_lifts_the_kernel_factor() {
        let p = f2();
        let sys = kernel_x_system();
        // γ = y⁻¹xy lies in the kernel, so (x, x) and (γ⁻¹xγ, x) are
        // conjugate inside the product
        let gamma = word(&p, "y^-1 x y");
        let x = word(&p, "x");
        let u = (x.clone(), x.clone());
        let v = (x.conjugate(&gamma), x.clone());
        let out = construct_p_conjugator(
            &sys,
            (&u.0, &u.1),
            (&v.0, &v.1),
            &ConjugatorCaps::default(),
        )
        .unwrap();
        let cert = certificate(out);
        assert_eq!(cert.stages.route, "general");
        assert_eq!((cert.stages.q1, cert.stages.q2), (0, 0));
        assert_eq!(cert.stages.p_prime, 0);
        // x dies in the quotient, so its root has image of order one
        assert_eq!(cert.stages.omega, Some(1));
        assert_eq!(cert.stages.p_final, 0);
        assert_eq!(cert.zeta_coords, (gamma.clone(), Word::empty()));
        assert_eq!(
            sys.pair_alphabet().format_word(cert.zeta.word()),
            "d_y^-1 n_x d_y"
        );
        assert_eq!(cert.zeta.len(), 3);

        // brute-force minimum over the pair ball agrees
        let ball = sys.pair_ball(5);
        let mut uncertain = false;
        let (_, depth) =
            pair_conjugator_min(&sys, &ball, &u, &v, &mut uncertain).expect("a conjugator");
        assert!(!uncertain);
        assert_eq!(depth, 3);
        assert!(depth as usize <= cert.zeta.len());
    }

    #[test]
    fn every_ball_conjugator_of_the_hard_pair_splits_over_the_centralizer() {
        let p = f2();
        let sys = kernel_x_system();
        let gamma = word(&p, "y^-1 x y");
        let x = word(&p, "x");
        let u = (x.clone(), x.clone());
        let v = (x.conjugate(&gamma), x.clone());
        let og = sys.base_oracle();
        let ball = sys.pair_ball(5);
        let mut found = 0usize;
        for ((z1, z2), _) in ball.entries() {
            if equal(og, &u.0.conjugate(z1), &v.0) != Verdict::Trivial
                || equal(og, &u.1.conjugate(z2), &v.1) != Verdict::Trivial
            {
                continue;
            }
            found += 1;
            // z₁ = xᵖ·γ and z₂ = x^q for some exponents
            let splits = (-6..=6).any(|q: i64| {
                equal(og, z1, &x.power(q).concat(&gamma)) == Verdict::Trivial
            }) && (-6..=6)
                .any(|q: i64| equal(og, z2, &x.power(q)) == Verdict::Trivial);
            assert!(
                splits,
                "conjugator ({}, {}) escapes the centralizer coset",
                p.alphabet().format_word(z1),
                p.alphabet().format_word(z2),
            );
        }
        assert!(found >= 3, "expected several conjugators in the ball, found {found}");
    }

    #[test]
    fn torsion_image_normalizes_the_exponent() {
        // killing a makes x have order three in the quotient; the base
        // group is torsion-free, and mapping onto the order-21 Frobenius
        // group (a ↦ s, x ↦ t with tst⁻¹ = s⁴) shows a² and x do not
        // commute, so the instance below is not degenerate
        let g = Presentation::parse("gens: a x\nrel: x a^2 x^2 a^-1\n").unwrap();
        let sys = make_fibre_system(&g, &["a"]).unwrap();
        let a2 = word(&g, "a^2");
        let x3 = word(&g, "x^3");
        let u = (a2.clone(), x3.clone());
        let v = (word(&g, "x^-1 a^2 x"), x3.clone());
        let out = construct_p_conjugator(
            &sys,
            (&u.0, &u.1),
            (&v.0, &v.1),
            &ConjugatorCaps::default(),
        )
        .unwrap();
        let cert = certificate(out);
        assert_eq!(cert.stages.route, "general");
        // roots: a² = a·a, x³ = x·x·x
        assert_eq!((cert.stages.y1, cert.stages.e1), (word(&g, "a"), 2));
        assert_eq!((cert.stages.y2, cert.stages.e2), (word(&g, "x"), 3));
        // the scan hits on the diagonal at (1, 1), leaving p′ = 1 …
        assert_eq!((cert.stages.q1, cert.stages.q2), (1, 1));
        assert_eq!((cert.stages.p, cert.stages.r2), (0, 1));
        assert_eq!(cert.stages.p_prime, 1);
        // … and the order-one image of the root absorbs it
        assert_eq!(cert.stages.omega, Some(1));
        assert_eq!(cert.stages.p_final, 0);
        let omega = cert.stages.omega.unwrap() as i64;
        assert!(2 * cert.stages.p_final.abs() <= omega);
        // the normalized conjugator is the diagonal (x, x), one letter deep
        assert_eq!(cert.zeta_coords, (word(&g, "x"), word(&g, "x")));
        assert_eq!(cert.zeta.len(), 1);
        assert_eq!(sys.pair_alphabet().format_word(cert.zeta.word()), "d_x");
    }

    #[test]
    fn obstructed_pairs_are_not_conjugate_in_the_product() {
        // x ~ y⁻¹xy in the base, but every square conjugator (xᵖy, x^q)
        // keeps a live y in the quotient: never a member
        let p = f2();
        let sys = kernel_x_system();
        let x = word(&p, "x");
        let u = (x.clone(), x.clone());
        let v = (word(&p, "y^-1 x y"), x.clone());
        let out = construct_p_conjugator(
            &sys,
            (&u.0, &u.1),
            (&v.0, &v.1),
            &ConjugatorCaps::default(),
        )
        .unwrap();
        assert!(
            matches!(out, ConjugatorOutcome::Exhausted { ref stage } if stage == "membership scan"),
            "expected a decisive scan miss, got {out:?}"
        );
    }

    #[test]
    fn mixed_triviality_is_a_certified_obstruction() {
        let p = f2();
        let sys = kernel_x_system();
        let out = construct_p_conjugator(
            &sys,
            (&word(&p, "x"), &Word::empty()),
            (&word(&p, "x"), &word(&p, "x")),
            &ConjugatorCaps::default(),
        )
        .unwrap();
        assert!(matches!(out, ConjugatorOutcome::NotConjugate));
    }

    #[test]
    fn nonmember_inputs_are_rejected() {
        let p = f2();
        let sys = kernel_x_system();
        let y = word(&p, "y");
        let out = construct_p_conjugator(
            &sys,
            (&y, &Word::empty()),
            (&y, &Word::empty()),
            &ConjugatorCaps::default(),
        );
        assert!(matches!(out, Err(FibreError::NotAMember)));
    }

    #[test]
    fn hard_instance_contract_holds() {
        let sys = kernel_x_system();
        let caps = DistortionCaps::default();
        let inst = hard_conjugacy_instance(&sys, 3, &caps).unwrap();
        // the base point (a, a) is one diagonal letter deep
        assert_eq!(inst.u_p_len, Some(1));
        assert!(inst.bound_ok, "|V|_P ≤ 2n + 2");
        assert!(inst.v_p_len.unwrap() <= 8);
        // the instance is solvable, and the certificate survives
        // re-verification
        let out = construct_p_conjugator(
            &sys,
            (&inst.u.0, &inst.u.1),
            (&inst.v.0, &inst.v.1),
            &ConjugatorCaps::default(),
        )
        .unwrap();
        let cert = certificate(out);
        let (l, r) = sys.transcribe(&cert.zeta);
        assert_eq!(sys.membership(&l, &r), Verdict::Trivial);

        let diag = make_fibre_system(&f2(), &[]).unwrap();
        assert!(matches!(
            hard_conjugacy_instance(&diag, 2, &caps),
            Err(FibreError::NoKernelLetters)
        ));
    }

    #[test]
    fn pair_metric_cl_matches_base_cl_on_the_diagonal() {
        let p = f2();
        let diag = make_fibre_system(&p, &[]).unwrap();
        let oracle = BallOracle::new(p.clone(), 8, 50);
        let pair_caps = ClPairCaps::default();
        let base_caps = ClCaps::default();
        for n in [2u64, 4] {
            let pair = cl_pair(&diag, n, ClFlavor::PairIntrinsic, &pair_caps);
            let base = cl_base(&p, &oracle, n, &base_caps);
            assert_eq!(pair.value, base.value, "n = {n}");
            assert_eq!(pair.exactness, Exactness::Exact);
        }
    }

    #[test]
    fn kernel_system_cl_frozen_values() {
        let sys = kernel_x_system();
        let caps = ClPairCaps::default();

        let intrinsic2 = cl_pair(&sys, 2, ClFlavor::PairIntrinsic, &caps);
        assert_eq!(intrinsic2.value, 0);
        assert_eq!(intrinsic2.exactness, Exactness::Exact);
        let intrinsic4 = cl_pair(&sys, 4, ClFlavor::PairIntrinsic, &caps);
        assert_eq!(intrinsic4.value, 1);
        assert_eq!(intrinsic4.exactness, Exactness::Exact);

        let relative2 = cl_pair(&sys, 2, ClFlavor::PairRelative, &caps);
        assert_eq!(relative2.value, 0);
        assert_eq!(relative2.exactness, Exactness::Exact);
        let relative4 = cl_pair(&sys, 4, ClFlavor::PairRelative, &caps);
        assert_eq!(relative4.value, 1);
        assert_eq!(relative4.exactness, Exactness::Exact);
        let (u, v) = relative4.witness.expect("a witness pair");
        assert_ne!(u, v);
    }

    #[test]
    fn relative_cl_dominates_intrinsic_cl_where_the_witness_sets_nest() {
        // on the diagonal system the square length is exactly twice the
        // pair length, so the relative universe at 2n contains the
        // intrinsic universe at n
        let diag = make_fibre_system(&f2(), &[]).unwrap();
        let caps = ClPairCaps::default();
        for n in [1u64, 2] {
            let intrinsic = cl_pair(&diag, n, ClFlavor::PairIntrinsic, &caps);
            let relative = cl_pair(&diag, 2 * n, ClFlavor::PairRelative, &caps);
            assert!(
                relative.value >= intrinsic.value,
                "relative({}) = {} < intrinsic({}) = {}",
                2 * n,
                relative.value,
                n,
                intrinsic.value
            );
        }
    }

    #[test]
    fn base_flavor_delegates_to_the_base_group() {
        let sys = kernel_x_system();
        let caps = ClPairCaps::default();
        let s = cl_pair(&sys, 4, ClFlavor::BaseIntrinsic, &caps);
        assert_eq!(s.value, 1);
        assert_eq!(s.exactness, Exactness::Exact);
    }

    #[test]
    fn exponent_scan_order_is_diagonal_first() {
        let pairs = exponent_pairs(1);
        assert_eq!(&pairs[..3], &[(0, 0), (1, 1), (-1, -1)]);
        // all off-diagonal pairs follow, each exactly once
        let rest = &pairs[3..];
        assert_eq!(rest.len(), 6);
        for q in [(-1, 0), (0, 1), (0, -1), (1, 0), (-1, 1), (1, -1)] {
            assert_eq!(rest.iter().filter(|&&r| r == q).count(), 1, "{q:?}");
        }
    }
}
