//! Integer lattice membership and canonical residues, used to decide
//! whether a word's abelianization lies in the relator lattice.

use crate::word::Word;

/// A sublattice of ℤⁿ held as an integer column echelon basis
/// (each basis column's topmost nonzero entry — its pivot — is positive,
/// and lies strictly below the previous column's pivot).
#[derive(Debug, Clone)]
pub struct IntegerLattice {
    dim: usize,
    basis: Vec<Vec<i128>>,
    pivots: Vec<usize>,
}

impl IntegerLattice {
    /// Builds the lattice spanned by `vectors` inside ℤ^dim via integer
    /// column elimination (gcd-style, so entries stay tame).
    pub fn from_vectors(dim: usize, vectors: &[Vec<i128>]) -> IntegerLattice {
        let mut cols: Vec<Vec<i128>> = vectors
            .iter()
            .inspect(|v| assert_eq!(v.len(), dim, "vector dimension mismatch"))
            .cloned()
            .collect();
        let mut basis = Vec::new();
        let mut pivots = Vec::new();
        let mut start = 0usize;
        for row in 0..dim {
            // gcd-eliminate row entries across the unprocessed columns
            loop {
                let mut min_col: Option<usize> = None;
                for j in start..cols.len() {
                    if cols[j][row] != 0
                        && min_col.is_none_or(|m| cols[j][row].abs() < cols[m][row].abs())
                    {
                        min_col = Some(j);
                    }
                }
                let Some(m) = min_col else { break };
                let mut others = false;
                for j in start..cols.len() {
                    if j == m || cols[j][row] == 0 {
                        continue;
                    }
                    let q = cols[j][row] / cols[m][row];
                    for r in 0..dim {
                        cols[j][r] -= q * cols[m][r];
                    }
                    others |= cols[j][row] != 0;
                }
                if !others {
                    cols.swap(start, m);
                    if cols[start][row] < 0 {
                        cols[start].iter_mut().for_each(|e| *e = -*e);
                    }
                    basis.push(cols[start].clone());
                    pivots.push(row);
                    start += 1;
                    break;
                }
            }
        }
        IntegerLattice { dim, basis, pivots }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Rank of the lattice.
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// The canonical representative of the coset `v + Λ`: two vectors get
    /// the same residue iff they differ by a lattice element. The zero
    /// residue characterizes membership.
    pub fn residue(&self, v: &[i128]) -> Vec<i128> {
        assert_eq!(v.len(), self.dim, "vector dimension mismatch");
        let mut v = v.to_vec();
        for (col, &row) in self.basis.iter().zip(&self.pivots) {
            let p = col[row];
            let q = v[row].div_euclid(p);
            if q != 0 {
                for r in 0..self.dim {
                    v[r] -= q * col[r];
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[i128]) -> bool {
        self.residue(v).iter().all(|&e| e == 0)
    }
}

/// Exponent-sum vector of a word over `rank` generators.
pub fn abelianization(w: &Word, rank: usize) -> Vec<i128> {
    let mut v = vec![0i128; rank];
    for l in w.letters() {
        v[l.generator() as usize] += if l.is_inverse() { -1 } else { 1 };
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Alphabet;

    #[test]
    fn abelianization_counts_signed_occurrences() {
        let a = Alphabet::new(["x", "y"]).unwrap();
        assert_eq!(abelianization(&a.parse("x y^-2 x").unwrap(), 2), vec![2, -2]);
        assert_eq!(abelianization(&a.parse("x y x^-1 y^-1").unwrap(), 2), vec![0, 0]);
    }

    #[test]
    fn one_dimensional_lattice() {
        // 3ℤ ⊂ ℤ, the relator lattice of ⟨x | x³⟩
        let l = IntegerLattice::from_vectors(1, &[vec![3]]);
        assert!(l.contains(&[3]));
        assert!(l.contains(&[-6]));
        assert!(l.contains(&[0]));
        assert!(!l.contains(&[1]));
        assert_eq!(l.residue(&[4]), vec![1]);
        assert_eq!(l.residue(&[-1]), vec![2]); // euclidean remainder
        assert_eq!(l.residue(&[7]), l.residue(&[1]));
    }

    #[test]
    fn trivial_lattice_keeps_vectors_apart() {
        // commutator relators abelianize to zero: lattice is {0}
        let l = IntegerLattice::from_vectors(2, &[vec![0, 0]]);
        assert_eq!(l.rank(), 0);
        assert!(!l.contains(&[1, -1]));
        assert_eq!(l.residue(&[5, 7]), vec![5, 7]);
    }

    #[test]
    fn skew_lattice_membership() {
        // span{(2, 1), (0, 3)}: index 6 in ℤ²
        let l = IntegerLattice::from_vectors(2, &[vec![2, 1], vec![0, 3]]);
        assert_eq!(l.rank(), 2);
        assert!(l.contains(&[2, 1]));
        assert!(l.contains(&[2, 4]));
        assert!(l.contains(&[4, 2]));
        assert!(!l.contains(&[1, 0]));
        assert!(!l.contains(&[0, 1]));
        // canonical residues partition ℤ² into 6 classes
        let mut classes = std::collections::HashSet::new();
        for a in -6..6 {
            for b in -6..6 {
                classes.insert(l.residue(&[a, b]));
            }
        }
        assert_eq!(classes.len(), 6);
    }

    #[test]
    fn residue_is_coset_invariant() {
        let l = IntegerLattice::from_vectors(3, &[vec![2, 0, 4], vec![0, 0, 6], vec![2, 0, 10]]);
        let v = [7i128, -3, 11];
        let mut shifted = v.to_vec();
        // add a lattice combination: 3·b₀ − 2·b₁
        for (i, s) in shifted.iter_mut().enumerate() {
            *s += 3 * l.basis[0][i] - 2 * l.basis[1][i];
        }
        assert_eq!(l.residue(&v), l.residue(&shifted));
        assert!(!l.contains(&v));
        // residues are reduced below their pivots
        for (col, &row) in l.basis.iter().zip(&l.pivots) {
            let r = l.residue(&v);
            assert!(0 <= r[row] && r[row] < col[row]);
        }
    }
}
