//! G-theory of the covered classes of toric varieties, as [`GroupExpr`]s.

use num_bigint::BigInt;
use num_traits::Signed;

use crate::cone::{delta, Cone};
use crate::error::{Error, Result};
use crate::fan::{resolution_fan, Fan, Weights};
use crate::group::{canonicalize, evaluate, tensor, FieldModel, GroupExpr};

/// `G_n` of the affine toric surface of a full-dimensional cone:
/// `G_n(k) ⊕ Z/|delta|` for even `n`, `G_n(k)` for odd `n`.
///
/// `|delta|` is taken from the given cone; the dual cone has the same value,
/// so it does not matter which of the two the variety is built from.
pub fn affine_surface_gtheory(c: &Cone, n: u32, field: &FieldModel) -> Result<GroupExpr> {
    if *field != FieldModel::AlgClosedChar0 {
        return Err(Error::HypothesisViolation {
            theorem: "the affine toric surface formula",
            requirement: "an algebraically closed base field of characteristic zero",
        });
    }
    if c.rank() != 2 || !c.is_full_dimensional() {
        return Err(Error::NotFullDimensional { rays: c.rays().len(), rank: c.rank() });
    }
    let d = delta(c)?.abs();
    let g = GroupExpr::gk(n, 1);
    Ok(if n.is_multiple_of(2) { g.direct_sum(&GroupExpr::cyclic(d)) } else { g })
}

/// `G_n(P(a_0, ..., a_d)) = G_n(k)^{d+1}`, over any field.
pub fn wps_gtheory(weights: &Weights, n: u32) -> GroupExpr {
    GroupExpr::gk(n, weights.dim() + 1)
}

/// `G_n` of the resolution of the `cone(e_2, d e_1 - e_2)` surface: `G_n(k)^2`.
pub fn resolution_gtheory(d: u64, n: u32) -> Result<GroupExpr> {
    resolution_fan(d)?;
    Ok(GroupExpr::gk(n, 2))
}

/// `G_n(X x Y) = ⊕_{i <= n} G_i(X) ⊗ G_{n-i}(Y)` for `n <= 2`, where `gx[i]`
/// and `gy[i]` are the groups of two weighted projective spaces.
pub fn kunneth_product(gx: &[GroupExpr], gy: &[GroupExpr], n: u32, field: &FieldModel) -> Result<GroupExpr> {
    if n > 2 {
        return Err(Error::DegreeOutOfRange(n));
    }
    let need = n as usize + 1;
    for g in [gx, gy] {
        if g.len() < need {
            return Err(Error::DimensionMismatch { expected: need, found: g.len() });
        }
    }
    let sum = (0..need).fold(GroupExpr::zero(), |acc, i| acc.direct_sum(&tensor(&gx[i], &gy[need - 1 - i], field)));
    Ok(canonicalize(&evaluate(&sum, field)))
}

/// [`kunneth_product`] of two weighted projective spaces.
pub fn wps_product_gtheory(x: &Weights, y: &Weights, n: u32, field: &FieldModel) -> Result<GroupExpr> {
    let gx: Vec<GroupExpr> = (0..=n).map(|i| wps_gtheory(x, i)).collect();
    let gy: Vec<GroupExpr> = (0..=n).map(|i| wps_gtheory(y, i)).collect();
    kunneth_product(&gx, &gy, n, field)
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    (0..k).fold(BigInt::from(1), |acc, i| acc * (n - i) / (i + 1))
}

/// `b_{2k} = sum_{i=k}^{n} (-1)^{i-k} C(i, k) |Sigma(n-i)|` with a caller-supplied
/// binomial, from face counts `census[j] = |Sigma(j)|`.
pub fn alternating_binomial_sum(census: &[usize], binom: impl Fn(usize, usize) -> BigInt) -> Vec<BigInt> {
    let n = census.len() - 1;
    (0..=n)
        .map(|k| {
            (k..=n).fold(BigInt::from(0), |acc, i| {
                let term = binom(i, k) * census[n - i];
                if (i - k) % 2 == 0 {
                    acc + term
                } else {
                    acc - term
                }
            })
        })
        .collect()
}

pub fn betti_from_census(census: &[usize]) -> Vec<BigInt> {
    alternating_binomial_sum(census, binomial)
}

/// Even Betti numbers `b_0, b_2, ..., b_{2n}` of a complete simplicial toric variety.
pub fn betti_even(fan: &Fan) -> Result<Vec<BigInt>> {
    let flags = fan.flags();
    if !flags.complete.holds() {
        return Err(Error::MissingFanProperty("complete"));
    }
    if !flags.simplicial.holds() {
        return Err(Error::MissingFanProperty("simplicial"));
    }
    Ok(betti_from_census(&fan.census()))
}

/// `dim_Q G_0(X) ⊗ Q`, the sum of the even Betti numbers.
pub fn g0_rational_dim(fan: &Fan) -> Result<BigInt> {
    Ok(betti_even(fan)?.into_iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chow::class_group_affine;
    use crate::fan::{affine_fan, hirzebruch, projective_line, projective_plane, wps_fan};
    use crate::lattice::{IntMat, IntVec};
    use num_integer::Integer;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn big(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| big(x)).collect()
    }

    const K: FieldModel = FieldModel::AlgClosedChar0;

    #[test]
    fn affine_surface_examples() {
        for d in 1..=6 {
            let c = Cone::from_i64s(2, &[&[0, 1], &[d, -1]]).unwrap();
            let g = affine_surface_gtheory(&c, 0, &K).unwrap();
            assert_eq!(g, GroupExpr::free(1).direct_sum(&GroupExpr::cyclic(d)));
        }
        let smooth = Cone::from_i64s(2, &[&[1, 0], &[0, 1]]).unwrap();
        for n in 0..6 {
            assert_eq!(affine_surface_gtheory(&smooth, n, &K).unwrap(), GroupExpr::gk(n, 1));
        }
        let five = Cone::from_i64s(2, &[&[1, 0], &[2, 5]]).unwrap();
        assert_eq!(affine_surface_gtheory(&five, 3, &K).unwrap(), GroupExpr::gk(3, 1));
        assert_eq!(affine_surface_gtheory(&five, 2, &K).unwrap().to_string(), "Z/5 ⊕ G_2(k)");
    }

    #[test]
    fn affine_surface_rejects_other_fields() {
        let c = Cone::from_i64s(2, &[&[1, 0], &[2, 5]]).unwrap();
        for f in [FieldModel::Symbolic, FieldModel::FiniteField { q: 5 }] {
            assert!(matches!(affine_surface_gtheory(&c, 0, &f), Err(Error::HypothesisViolation { .. })));
        }
        let ray = Cone::from_i64s(2, &[&[1, 0]]).unwrap();
        assert!(matches!(affine_surface_gtheory(&ray, 0, &K), Err(Error::NotFullDimensional { .. })));
    }

    #[test]
    fn wps_examples() {
        let w = Weights::from_i64s(&[1, 1, 2]).unwrap();
        assert_eq!(wps_gtheory(&w, 0), GroupExpr::free(3));
        let f4 = FieldModel::finite_field(4).unwrap();
        for weights in [&[1, 1][..], &[1, 2, 3], &[2, 3, 5, 7]] {
            let w = Weights::from_i64s(weights).unwrap();
            let expected = GroupExpr::cyclic(3).power(weights.len());
            assert_eq!(evaluate(&wps_gtheory(&w, 1), &f4), expected);
        }
        let p1 = Weights::from_i64s(&[1, 1]).unwrap();
        for n in 0..5 {
            assert_eq!(wps_gtheory(&p1, n), GroupExpr::gk(n, 2));
        }
    }

    #[test]
    fn resolution_examples() {
        assert_eq!(resolution_gtheory(3, 0).unwrap(), GroupExpr::free(2));
        assert_eq!(resolution_gtheory(1, 0).unwrap(), GroupExpr::free(2));
        for d in 1..6 {
            assert_eq!(resolution_gtheory(d, 2).unwrap(), GroupExpr::gk(2, 2));
        }
        assert!(resolution_gtheory(0, 0).is_err());
    }

    #[test]
    fn kunneth_examples() {
        let p1 = Weights::from_i64s(&[1, 1]).unwrap();
        for q in [2u64, 3, 4, 5, 7] {
            let f = FieldModel::finite_field(q).unwrap();
            let g = wps_product_gtheory(&p1, &p1, 1, &f).unwrap();
            assert_eq!(g, GroupExpr::cyclic(q - 1).power(8), "q={q}");
        }
        for (x, y) in [(&[1, 1][..], &[1, 2, 3][..]), (&[1, 1, 2], &[2, 3, 5, 7]), (&[1, 2], &[1, 2])] {
            let (wx, wy) = (Weights::from_i64s(x).unwrap(), Weights::from_i64s(y).unwrap());
            assert_eq!(wps_product_gtheory(&wx, &wy, 0, &K).unwrap(), GroupExpr::free(x.len() * y.len()));
            let f = FieldModel::finite_field(5).unwrap();
            let g2 = wps_product_gtheory(&wx, &wy, 2, &f).unwrap();
            assert_eq!(g2, GroupExpr::cyclic(4).power(x.len() * y.len()));
        }
        assert_eq!(wps_product_gtheory(&p1, &p1, 3, &K), Err(Error::DegreeOutOfRange(3)));
    }

    #[test]
    fn kunneth_symbolic_degree_one() {
        let p1 = Weights::from_i64s(&[1, 1]).unwrap();
        let g = wps_product_gtheory(&p1, &p1, 1, &FieldModel::Symbolic).unwrap();
        assert_eq!(g, GroupExpr::gk(1, 8));
        let g2 = wps_product_gtheory(&p1, &p1, 2, &FieldModel::Symbolic).unwrap();
        assert_eq!(g2.to_string(), "(G_1(k)⊗G_1(k))^4 ⊕ G_2(k)^8");
    }

    #[test]
    fn betti_examples() {
        assert_eq!(betti_even(&projective_plane()).unwrap(), ints(&[1, 1, 1]));
        for r in 0..4 {
            assert_eq!(betti_even(&hirzebruch(r)).unwrap(), ints(&[1, 2, 1]));
            assert_eq!(g0_rational_dim(&hirzebruch(r)).unwrap(), big(4));
        }
        assert_eq!(betti_even(&projective_line()).unwrap(), ints(&[1, 1]));
        assert_eq!(g0_rational_dim(&projective_plane()).unwrap(), big(3));
        let p112 = wps_fan(&Weights::from_i64s(&[1, 1, 2]).unwrap()).unwrap();
        assert_eq!(g0_rational_dim(&p112).unwrap(), big(3));
    }

    #[test]
    fn betti_rejects_incomplete() {
        let cone = affine_fan(&Cone::from_i64s(2, &[&[1, 0], &[0, 1]]).unwrap()).unwrap();
        assert_eq!(betti_even(&cone), Err(Error::MissingFanProperty("complete")));
    }

    #[test]
    fn betti_matches_independent_invariants() {
        let weights: &[&[i64]] = &[&[1, 1], &[1, 2], &[1, 1, 1], &[1, 2, 3], &[1, 1, 1, 1], &[1, 2, 3, 5], &[1, 1, 1, 1, 1]];
        for w in weights {
            let w = Weights::from_i64s(w).unwrap();
            let fan = wps_fan(&w).unwrap();
            let b = betti_even(&fan).unwrap();
            let census = fan.census();
            let n = census.len() - 1;
            // euler characteristic = number of maximal cones, b_0 = 1, palindromic
            assert_eq!(b.iter().sum::<BigInt>(), BigInt::from(census[n]));
            assert_eq!(b[0], big(1));
            let rev: Vec<_> = b.iter().rev().cloned().collect();
            assert_eq!(b, rev);
            // every even betti number of P(w) is 1
            assert!(b.iter().all(|x| *x == big(1)));
            assert_eq!(g0_rational_dim(&fan).unwrap(), BigInt::from(wps_gtheory(&w, 0).free_rank));
            assert_eq!(wps_gtheory(&w, 0).free_rank, w.dim() + 1);
        }
    }

    #[test]
    fn surface_torsion_matches_class_group() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut done = 0;
        while done < 100 {
            let b: i64 = rng.gen_range(1..=40);
            let a: i64 = rng.gen_range(0..b.max(1));
            if a.gcd(&b) != 1 {
                continue;
            }
            // random unimodular image of cone(e_1, a e_1 + b e_2)
            let s: i64 = rng.gen_range(-5..=5);
            let t: i64 = rng.gen_range(-5..=5);
            let m = &IntMat::from_i64_rows(&[&[1, s], &[0, 1]]) * &IntMat::from_i64_rows(&[&[1, 0], &[t, 1]]);
            let rays = [IntVec::from_i64s(&[1, 0]), IntVec::from_i64s(&[a, b])];
            let Ok(c) = Cone::new(2, rays.iter().map(|r| m.mul_vec(r)).collect()) else { continue };
            let g = affine_surface_gtheory(&c, 0, &K).unwrap();
            let cl = class_group_affine(&c).unwrap();
            assert_eq!(g.torsion, cl.torsion);
            assert_eq!(cl.order(), Some(big(b)));
            done += 1;
        }
    }

    proptest! {
        #[test]
        fn kunneth_degree_zero_rank_is_product(x in prop::collection::vec(1i64..6, 2..5), y in prop::collection::vec(1i64..6, 2..5)) {
            let Ok(wx) = Weights::from_i64s(&x) else { return Ok(()) };
            let Ok(wy) = Weights::from_i64s(&y) else { return Ok(()) };
            let g = wps_product_gtheory(&wx, &wy, 0, &K).unwrap();
            prop_assert_eq!(g.free_rank, wps_gtheory(&wx, 0).free_rank * wps_gtheory(&wy, 0).free_rank);
        }
    }
}
