//! Exact integer Smith normal form and the homology it computes.
//!
//! Everything here runs over arbitrary-precision integers, so intermediate
//! entry growth during elimination is harmless. The diagonalization keeps the
//! full transform pair (U, V) with S = U·M·V and checks that identity on every
//! call before returning.

use crate::delta::{DeltaComplex, IntegerMatrix};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// A finitely generated abelian group: free rank plus invariant factors
/// (each ≥ 2, each dividing the next).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianGroup {
    pub rank: usize,
    pub torsion: Vec<BigInt>,
}

impl AbelianGroup {
    pub fn free(rank: usize) -> Self {
        AbelianGroup {
            rank,
            torsion: Vec::new(),
        }
    }

    pub fn trivial() -> Self {
        AbelianGroup::free(0)
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Result of a Smith normal form computation: S diagonal with non-negative
/// entries in a divisibility chain, and unimodular U, V with S = U·M·V.
#[derive(Clone, Debug)]
pub struct SnfResult {
    pub s: IntegerMatrix,
    pub u: IntegerMatrix,
    pub v: IntegerMatrix,
}

impl SnfResult {
    /// Number of nonzero diagonal entries.
    pub fn rank(&self) -> usize {
        self.s
            .diagonal()
            .iter()
            .filter(|d| !d.is_zero())
            .count()
    }

    /// The nonzero diagonal entries, in order.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.s
            .diagonal()
            .into_iter()
            .filter(|d| !d.is_zero())
            .collect()
    }

    /// Invariant factors greater than 1, i.e. the torsion they generate.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.invariant_factors()
            .into_iter()
            .filter(|d| !d.is_one())
            .collect()
    }
}

/// Quotient rounded to nearest, so the remainder a − q·b has |r| ≤ |b|/2.
fn rounded_quotient(a: &BigInt, b: &BigInt) -> BigInt {
    let mut q = a / b;
    let r = a - &q * b;
    if r.magnitude() * 2u32 > b.magnitude().clone() {
        if r.sign() == b.sign() {
            q += 1;
        } else {
            q -= 1;
        }
    }
    q
}

fn find_min_pivot(s: &IntegerMatrix, from: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in from..s.rows() {
        for j in from..s.cols() {
            let e = s.get(i, j);
            if e.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if s.get(bi, bj).magnitude() <= e.magnitude() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

fn find_nondivisible(s: &IntegerMatrix, from: usize, p: &BigInt) -> Option<(usize, usize)> {
    for i in from + 1..s.rows() {
        for j in from + 1..s.cols() {
            if !(s.get(i, j) % p).is_zero() {
                return Some((i, j));
            }
        }
    }
    None
}

/// Smith normal form of an integer matrix.
///
/// Pivots are chosen by smallest nonzero absolute value. The returned
/// transforms are products of elementary row/column operations, hence
/// unimodular, and S = U·M·V is asserted before returning.
pub fn smith_normal_form(m: &IntegerMatrix) -> SnfResult {
    let rows = m.rows();
    let cols = m.cols();
    let mut s = m.clone();
    let mut u = IntegerMatrix::identity(rows);
    let mut v = IntegerMatrix::identity(cols);

    for k in 0..rows.min(cols) {
        let Some((pi, pj)) = find_min_pivot(&s, k) else {
            break;
        };
        s.swap_rows(k, pi);
        u.swap_rows(k, pi);
        s.swap_cols(k, pj);
        v.swap_cols(k, pj);

        loop {
            let mut dirty = false;
            for i in k + 1..rows {
                if s.get(i, k).is_zero() {
                    continue;
                }
                let q = rounded_quotient(s.get(i, k), s.get(k, k));
                if !q.is_zero() {
                    let c = -q;
                    s.add_scaled_row(i, k, &c);
                    u.add_scaled_row(i, k, &c);
                }
                if !s.get(i, k).is_zero() {
                    // Remainder strictly smaller than the pivot: promote it.
                    s.swap_rows(k, i);
                    u.swap_rows(k, i);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            for j in k + 1..cols {
                if s.get(k, j).is_zero() {
                    continue;
                }
                let q = rounded_quotient(s.get(k, j), s.get(k, k));
                if !q.is_zero() {
                    let c = -q;
                    s.add_scaled_col(j, k, &c);
                    v.add_scaled_col(j, k, &c);
                }
                if !s.get(k, j).is_zero() {
                    s.swap_cols(k, j);
                    v.swap_cols(k, j);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            let p = s.get(k, k).clone();
            if let Some((bi, _)) = find_nondivisible(&s, k, &p) {
                // Fold the offending row into row k; the next reduction pass
                // replaces the pivot by a proper divisor.
                let one = BigInt::one();
                s.add_scaled_row(k, bi, &one);
                u.add_scaled_row(k, bi, &one);
                continue;
            }
            break;
        }

        if s.get(k, k).is_negative() {
            s.negate_row(k);
            u.negate_row(k);
        }
    }

    let check = u.mul(m).mul(&v);
    assert!(
        check == s,
        "internal error: transform identity U*M*V = S failed"
    );
    SnfResult { s, u, v }
}

/// Integer homology H₀, H₁, H₂ of a valid Δ-complex.
///
/// Ranks come from the boundary ranks; torsion in degree k comes from the
/// invariant factors of ∂_{k+1}. Panics if the complex fails validation.
pub fn homology(c: &DeltaComplex) -> [AbelianGroup; 3] {
    let report = c.validate();
    assert!(report.is_valid(), "homology of an invalid complex: {report}");
    let d1 = c.boundary_matrix(1).expect("dimension 1 is valid");
    let d2 = c.boundary_matrix(2).expect("dimension 2 is valid");
    let snf1 = smith_normal_form(&d1);
    let snf2 = smith_normal_form(&d2);
    let r1 = snf1.rank();
    let r2 = snf2.rank();
    let h0 = AbelianGroup {
        rank: c.n0() - r1,
        torsion: snf1.torsion(),
    };
    let h1 = AbelianGroup {
        rank: c
            .n1()
            .checked_sub(r1 + r2)
            .expect("rank bound violated; complex is not a chain complex"),
        torsion: snf2.torsion(),
    };
    let h2 = AbelianGroup::free(c.n2() - r2);
    [h0, h1, h2]
}

/// Betti numbers, torsion and the two Euler characteristic computations for a
/// complex, with a consistency verdict between them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologySummary {
    pub cells: [usize; 3],
    pub groups: [AbelianGroup; 3],
    pub betti: [usize; 3],
    pub euler_from_cells: i64,
    pub euler_from_betti: i64,
    pub consistent: bool,
}

pub fn betti_and_torsion_summary(c: &DeltaComplex) -> HomologySummary {
    let groups = homology(c);
    let betti = [groups[0].rank, groups[1].rank, groups[2].rank];
    let euler_from_cells = c.euler_characteristic();
    let euler_from_betti = betti[0] as i64 - betti[1] as i64 + betti[2] as i64;
    HomologySummary {
        cells: [c.n0(), c.n1(), c.n2()],
        groups,
        betti,
        euler_from_cells,
        euler_from_betti,
        consistent: euler_from_cells == euler_from_betti,
    }
}

impl fmt::Display for HomologySummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "cells: ({}, {}, {})",
            self.cells[0], self.cells[1], self.cells[2]
        )?;
        for (k, g) in self.groups.iter().enumerate() {
            writeln!(f, "H{k} = {g}")?;
        }
        write!(
            f,
            "Euler characteristic: {} (cells) / {} (Betti){}",
            self.euler_from_cells,
            self.euler_from_betti,
            if self.consistent {
                ""
            } else {
                "  ** MISMATCH **"
            }
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn diag_i64(s: &IntegerMatrix) -> Vec<i64> {
        use num_traits::ToPrimitive;
        s.diagonal().iter().map(|d| d.to_i64().unwrap()).collect()
    }

    fn assert_snf_contract(m: &IntegerMatrix, r: &SnfResult) {
        // S diagonal, non-negative, divisibility chain, zeros trailing.
        for i in 0..r.s.rows() {
            for j in 0..r.s.cols() {
                if i != j {
                    assert!(r.s.get(i, j).is_zero(), "off-diagonal entry at {i},{j}");
                }
            }
        }
        let diag = r.s.diagonal();
        for w in diag.windows(2) {
            assert!(!w[0].is_negative() && !w[1].is_negative());
            if w[0].is_zero() {
                assert!(w[1].is_zero(), "zero before nonzero on the diagonal");
            } else if !w[1].is_zero() {
                assert!((&w[1] % &w[0]).is_zero(), "{} does not divide {}", w[0], w[1]);
            }
        }
        // Unimodular transforms and the defining identity.
        assert_eq!(r.u.determinant().abs(), BigInt::one());
        assert_eq!(r.v.determinant().abs(), BigInt::one());
        assert_eq!(r.u.mul(m).mul(&r.v), r.s);
    }

    #[test]
    fn already_diagonal_matrix_is_fixed() {
        let m = IntegerMatrix::from_rows(&[vec![1, 0], vec![0, 2]]);
        let r = smith_normal_form(&m);
        assert_eq!(diag_i64(&r.s), vec![1, 2]);
        assert_snf_contract(&m, &r);
    }

    #[test]
    fn two_by_two_with_torsion() {
        // det = -8 and gcd of entries 2, so the factors must be (2, 4).
        let m = IntegerMatrix::from_rows(&[vec![2, 4], vec![6, 8]]);
        let r = smith_normal_form(&m);
        assert_eq!(diag_i64(&r.s), vec![2, 4]);
        assert_snf_contract(&m, &r);
    }

    #[test]
    fn zero_matrix_stays_zero() {
        let m = IntegerMatrix::zeros(3, 2);
        let r = smith_normal_form(&m);
        assert_eq!(diag_i64(&r.s), vec![0, 0]);
        assert_eq!(r.rank(), 0);
        assert_snf_contract(&m, &r);
    }

    #[test]
    fn known_four_by_four() {
        // Same fixture as the classical worked example: factors 1, 3, 21, 0.
        let m = IntegerMatrix::from_rows(&[
            vec![2, 4, 4, 4],
            vec![-6, 6, 12, 12],
            vec![10, -4, -16, -16],
            vec![1, 1, 1, 1],
        ]);
        let r = smith_normal_form(&m);
        assert_snf_contract(&m, &r);
        let d = diag_i64(&r.s);
        assert_eq!(d.len(), 4);
        // Product of nonzero factors equals gcd-normalized determinant data;
        // the exact chain for this matrix:
        assert_eq!(d, vec![1, 2, 6, 0]);
    }

    #[test]
    fn random_matrices_satisfy_contract() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..250 {
            let rows = rng.gen_range(1..=10);
            let cols = rng.gen_range(1..=10);
            let mut m = IntegerMatrix::zeros(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    m.set(i, j, BigInt::from(rng.gen_range(-9i64..=9)));
                }
            }
            let r = smith_normal_form(&m);
            assert_snf_contract(&m, &r);
        }
    }

    proptest! {
        // Invariant factors do not change under unimodular row/column mixing.
        #[test]
        fn invariant_factors_stable_under_unimodular_ops(
            seed in 0u64..1_000_000,
            rows in 1usize..6,
            cols in 1usize..6,
            ops in 1usize..8,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut m = IntegerMatrix::zeros(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    m.set(i, j, BigInt::from(rng.gen_range(-6i64..=6)));
                }
            }
            let base = smith_normal_form(&m).invariant_factors();
            let mut mixed = m.clone();
            for _ in 0..ops {
                match rng.gen_range(0..4) {
                    0 if rows > 1 => {
                        let a = rng.gen_range(0..rows);
                        let mut b = rng.gen_range(0..rows);
                        if a == b { b = (b + 1) % rows; }
                        let c = BigInt::from(rng.gen_range(-3i64..=3));
                        mixed.add_scaled_row(a, b, &c);
                    }
                    1 if cols > 1 => {
                        let a = rng.gen_range(0..cols);
                        let mut b = rng.gen_range(0..cols);
                        if a == b { b = (b + 1) % cols; }
                        let c = BigInt::from(rng.gen_range(-3i64..=3));
                        mixed.add_scaled_col(a, b, &c);
                    }
                    2 => mixed.swap_rows(rng.gen_range(0..rows), rng.gen_range(0..rows)),
                    _ => mixed.swap_cols(rng.gen_range(0..cols), rng.gen_range(0..cols)),
                }
            }
            prop_assert_eq!(smith_normal_form(&mixed).invariant_factors(), base);
        }
    }

    #[test]
    fn triangle_homology_is_a_point() {
        let t = DeltaComplex::base_triangle();
        let h = homology(&t);
        assert_eq!(h[0], AbelianGroup::free(1));
        assert_eq!(h[1], AbelianGroup::trivial());
        assert_eq!(h[2], AbelianGroup::trivial());
        let s = betti_and_torsion_summary(&t);
        assert_eq!(s.betti, [1, 0, 0]);
        assert_eq!(s.euler_from_cells, 1);
        assert!(s.consistent);
    }

    #[test]
    fn group_display() {
        assert_eq!(AbelianGroup::trivial().to_string(), "0");
        assert_eq!(AbelianGroup::free(1).to_string(), "Z");
        assert_eq!(AbelianGroup::free(8).to_string(), "Z^8");
        let g = AbelianGroup {
            rank: 0,
            torsion: vec![BigInt::from(2)],
        };
        assert_eq!(g.to_string(), "Z/2");
        let g = AbelianGroup {
            rank: 2,
            torsion: vec![BigInt::from(2), BigInt::from(6)],
        };
        assert_eq!(g.to_string(), "Z^2 + Z/2 + Z/6");
    }
}
