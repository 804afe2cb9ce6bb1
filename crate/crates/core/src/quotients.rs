//! Finite quotient search: enumerate homomorphisms from a presented group
//! into small symmetric groups. A nonidentity image certifies that a word
//! is nontrivial, which catches elements invisible to abelianization
//! (e.g. commutator-like words in one-relator groups).

use crate::presentation::Presentation;
use crate::word::Word;

/// A permutation of {0, …, k−1}, as the image array i ↦ p[i].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm(Vec<u8>);

impl Perm {
    pub fn identity(degree: usize) -> Perm {
        Perm((0..degree as u8).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &p)| p as usize == i)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    /// Function composition: (self ∘ other)(i) = self(other(i)).
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&i| self.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u8; self.0.len()];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p as usize] = i as u8;
        }
        Perm(inv)
    }

    /// Packs the image array into a u64 (degree ≤ 8), for cheap signatures.
    pub fn packed(&self) -> u64 {
        self.0.iter().fold(0u64, |acc, &p| acc << 8 | u64::from(p))
    }
}

/// All k! permutations of degree k in lexicographic order of image arrays.
fn all_perms(degree: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut current: Vec<u8> = (0..degree as u8).collect();
    loop {
        out.push(Perm(current.clone()));
        // next lexicographic permutation
        let Some(i) = (0..current.len().saturating_sub(1)).rev().find(|&i| current[i] < current[i + 1]) else {
            break;
        };
        let j = (i + 1..current.len()).rev().find(|&j| current[j] > current[i]).unwrap();
        current.swap(i, j);
        current[i + 1..].reverse();
    }
    out
}

/// A deduplicated family of homomorphisms G → S_k, each given by its
/// generator images. Every stored hom kills every relator, so a
/// nonidentity image is a sound nontriviality certificate.
#[derive(Debug, Clone)]
pub struct FiniteQuotients {
    degree: usize,
    homs: Vec<Vec<Perm>>,
}

impl FiniteQuotients {
    /// Searches for homs into the largest symmetric group S_k (k ≤ 5)
    /// whose exhaustive enumeration fits the work budget
    /// (assignments × relator letters × degree ≤ budget). Conjugate homs
    /// separate exactly the same words, so the family is deduplicated up
    /// to simultaneous conjugacy.
    pub fn search(p: &Presentation, budget: u64) -> FiniteQuotients {
        let n = p.alphabet().len();
        let relator_letters: u64 = p.relators().iter().map(|r| r.len() as u64).sum::<u64>() + 1;
        let mut degree = 0usize;
        for k in (2..=5usize).rev() {
            let factorial: u64 = (1..=k as u64).product();
            let Some(assignments) = factorial.checked_pow(n as u32) else { continue };
            if assignments.saturating_mul(relator_letters).saturating_mul(k as u64) <= budget {
                degree = k;
                break;
            }
        }
        if degree == 0 || n == 0 {
            return FiniteQuotients { degree: 0, homs: Vec::new() };
        }
        let perms = all_perms(degree);
        let mut canonical = std::collections::HashSet::new();
        let mut homs = Vec::new();
        let mut assignment = vec![0usize; n];
        'outer: loop {
            let images: Vec<Perm> = assignment.iter().map(|&i| perms[i].clone()).collect();
            if images.iter().any(|p| !p.is_identity())
                && p.relators().iter().all(|r| evaluate(&images, r).is_identity())
            {
                // canonical form under simultaneous conjugation
                let canon = perms
                    .iter()
                    .map(|g| {
                        let gi = g.inverse();
                        images
                            .iter()
                            .map(|im| g.compose(im).compose(&gi))
                            .collect::<Vec<Perm>>()
                    })
                    .min()
                    .unwrap();
                if canonical.insert(canon.clone()) {
                    homs.push(canon);
                }
            }
            for slot in (0..n).rev() {
                assignment[slot] += 1;
                if assignment[slot] < perms.len() {
                    continue 'outer;
                }
                assignment[slot] = 0;
            }
            break;
        }
        homs.sort();
        FiniteQuotients { degree, homs }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.homs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.homs.is_empty()
    }

    /// True iff some hom sends `w` to a nonidentity permutation — a sound
    /// certificate that `w` is nontrivial in the group.
    pub fn separates(&self, w: &Word) -> bool {
        self.homs.iter().any(|images| !evaluate(images, w).is_identity())
    }

    /// Per-hom packed images of `w`, usable as a signature component:
    /// equal group elements always get equal image vectors.
    pub fn images(&self, w: &Word) -> Vec<u64> {
        self.homs.iter().map(|images| evaluate(images, w).packed()).collect()
    }
}

fn evaluate(images: &[Perm], w: &Word) -> Perm {
    let degree = images.first().map_or(1, Perm::degree);
    let mut acc = Perm::identity(degree);
    for l in w.letters() {
        let p = &images[l.generator() as usize];
        let factor = if l.is_inverse() { p.inverse() } else { p.clone() };
        acc = acc.compose(&factor);
    }
    acc
}
