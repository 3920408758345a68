//! Rational polyhedral cones given by primitive ray generators, with the
//! two-dimensional toolkit: duality, the determinant `delta`, and the
//! `GL(2, Z)` normal form `cone(e_1, a e_1 + b e_2)` with `0 <= a < b`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{self, gcd_ext, IntMat, IntVec, SnfResult};

/// A ray generator that had to be divided by its content.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Normalization {
    pub index: usize,
    pub original: IntVec,
    pub primitive: IntVec,
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ray {}: {} normalized to {}", self.index, self.original, self.primitive)
    }
}

/// A strongly convex rational polyhedral cone in `Z^rank`.
///
/// Rays are primitive and pairwise distinct, and no ray is the negative of
/// another. Strong convexity is checked exactly in rank 2; in higher rank
/// only the antipodal-pair condition is enforced.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Cone {
    rank: usize,
    rays: Vec<IntVec>,
}

pub(crate) fn cross2(p: &IntVec, q: &IntVec) -> BigInt {
    &p[0] * &q[1] - &p[1] * &q[0]
}

impl Cone {
    /// Builds a cone, dividing non-primitive generators by their content.
    pub fn new(rank: usize, rays: Vec<IntVec>) -> Result<Cone> {
        Cone::with_normalizations(rank, rays).map(|(c, _)| c)
    }

    /// Like [`Cone::new`], also reporting which generators were rescaled.
    pub fn with_normalizations(rank: usize, rays: Vec<IntVec>) -> Result<(Cone, Vec<Normalization>)> {
        if rank == 0 {
            return Err(Error::Empty);
        }
        let mut notes = Vec::new();
        let mut primitive = Vec::with_capacity(rays.len());
        for (index, ray) in rays.into_iter().enumerate() {
            if ray.rank() != rank {
                return Err(Error::DimensionMismatch { expected: rank, found: ray.rank() });
            }
            if ray.is_zero() {
                return Err(Error::ZeroRay);
            }
            let (p, content) = ray.primitive_part();
            if !content.is_one() {
                notes.push(Normalization { index, original: ray, primitive: p.clone() });
            }
            primitive.push(p);
        }
        let mut seen = BTreeSet::new();
        for r in &primitive {
            if !seen.insert(r.clone()) {
                return Err(Error::DuplicateRay(r.clone()));
            }
        }
        if primitive.iter().any(|r| seen.contains(&r.neg())) {
            return Err(Error::NotStronglyConvex);
        }
        if rank == 2 && primitive.len() > 2 && !strongly_convex_2d(&primitive) {
            return Err(Error::NotStronglyConvex);
        }
        Ok((Cone { rank, rays: primitive }, notes))
    }

    /// Shorthand for literals: `Cone::from_i64s(2, &[&[1, 0], &[2, 5]])`.
    pub fn from_i64s(rank: usize, rays: &[&[i64]]) -> Result<Cone> {
        Cone::new(rank, rays.iter().map(|r| IntVec::from_i64s(r)).collect())
    }

    /// The cone `{0}` of `Z^rank`.
    pub fn zero(rank: usize) -> Cone {
        assert!(rank > 0);
        Cone { rank, rays: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[IntVec] {
        &self.rays
    }

    pub fn is_zero(&self) -> bool {
        self.rays.is_empty()
    }

    /// `rank x rays` matrix whose columns are the generators; `None` for the zero cone.
    pub fn ray_matrix(&self) -> Option<IntMat> {
        if self.rays.is_empty() {
            return None;
        }
        Some(IntMat::from_columns(&self.rays).expect("rays share the ambient rank"))
    }

    /// Smith form of [`Cone::ray_matrix`].
    pub fn ray_snf(&self) -> Option<SnfResult> {
        self.ray_matrix().map(|m| lattice::smith_normal_form(&m))
    }

    /// Dimension of the linear span of the rays.
    pub fn dim(&self) -> usize {
        self.ray_snf().map_or(0, |s| s.rank())
    }

    pub fn is_simplicial(&self) -> bool {
        self.dim() == self.rays.len()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dim() == self.rank
    }

    /// Image of the cone under a unimodular change of coordinates.
    pub fn transform(&self, m: &IntMat) -> Result<Cone> {
        if m.rows() != self.rank || m.cols() != self.rank {
            return Err(Error::DimensionMismatch { expected: self.rank, found: m.rows() });
        }
        if !lattice::is_unimodular(m)? {
            return Err(Error::NotUnimodular { det: lattice::det(m)? });
        }
        Cone::new(self.rank, self.rays.iter().map(|r| m.mul_vec(r)).collect())
    }

    /// Equality of ray sets, ignoring order.
    pub fn same_rays(&self, other: &Cone) -> bool {
        let a: BTreeSet<_> = self.rays.iter().collect();
        let b: BTreeSet<_> = other.rays.iter().collect();
        self.rank == other.rank && a == b
    }

    fn expect_surface(&self) -> Result<(&IntVec, &IntVec)> {
        if self.rank != 2 || self.rays.len() != 2 {
            return Err(Error::DegenerateCone(format!(
                "expected 2 rays in rank 2, got {} rays in rank {}",
                self.rays.len(),
                self.rank
            )));
        }
        let (p, q) = (&self.rays[0], &self.rays[1]);
        if cross2(p, q).is_zero() {
            return Err(Error::DegenerateCone(format!("rays {p} and {q} are collinear")));
        }
        Ok((p, q))
    }
}

impl fmt::Display for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rays.is_empty() {
            return write!(f, "cone() in Z^{}", self.rank);
        }
        write!(f, "cone(")?;
        for (i, r) in self.rays.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

/// Some pair `p, q` bounds a sector of angle `< pi` containing every ray.
fn strongly_convex_2d(rays: &[IntVec]) -> bool {
    rays.iter().any(|p| {
        rays.iter().any(|q| {
            cross2(p, q).is_positive()
                && rays.iter().all(|r| !cross2(p, r).is_negative() && !cross2(r, q).is_negative())
        })
    })
}

/// Dual of a full-dimensional cone in rank 2. Each input ray contributes the
/// primitive normal of its line that is positive on the other ray, in input order.
pub fn dual_cone_2d(c: &Cone) -> Result<Cone> {
    let (p, q) = c.expect_surface()?;
    let sign = cross2(p, q).signum();
    let n1 = IntVec::new(vec![-&p[1] * &sign, &p[0] * &sign])?;
    let n2 = IntVec::new(vec![&q[1] * &sign, -&q[0] * &sign])?;
    Cone::new(2, vec![n1, n2])
}

/// Determinant of the 2x2 matrix whose columns are the rays, in stored order.
pub fn delta(c: &Cone) -> Result<BigInt> {
    let (p, q) = c.expect_surface()?;
    Ok(cross2(p, q))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SurfaceKind {
    Smooth,
    /// `0 < a < b`, `gcd(a, b) = 1`.
    Singular {
        #[serde(with = "crate::lattice::bigint_str")]
        a: BigInt,
        #[serde(with = "crate::lattice::bigint_str")]
        b: BigInt,
    },
}

/// Canonical form of a two-dimensional cone up to `GL(2, Z)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurfaceNormalForm {
    pub kind: SurfaceKind,
    /// Sends the stored rays, in some order, to `e_1` and `a e_1 + b e_2`.
    pub transform: IntMat,
}

impl SurfaceNormalForm {
    /// `(a, b)`, with `(0, 1)` for smooth cones.
    pub fn params(&self) -> (BigInt, BigInt) {
        match &self.kind {
            SurfaceKind::Smooth => (BigInt::zero(), BigInt::one()),
            SurfaceKind::Singular { a, b } => (a.clone(), b.clone()),
        }
    }

    pub fn is_smooth(&self) -> bool {
        self.kind == SurfaceKind::Smooth
    }

    /// The canonical cone `cone(e_1, a e_1 + b e_2)`.
    pub fn canonical_cone(&self) -> Cone {
        let (a, b) = self.params();
        Cone::new(2, vec![IntVec::unit(2, 0), IntVec::new(vec![a, b]).unwrap()]).unwrap()
    }
}

/// Moves `p` to `e_1`, flips so the image of `q` has positive second
/// coordinate `b`, then shears its first coordinate into `[0, b)`.
fn normalize_ordered(p: &IntVec, q: &IntVec) -> (BigInt, BigInt, IntMat) {
    let (g, s, t) = gcd_ext(&p[0], &p[1]);
    debug_assert!(g.is_one(), "rays are primitive");
    let mut m = IntMat::new(2, 2, vec![s, t, -&p[1], p[0].clone()]).unwrap();
    let mut image = m.mul_vec(q);
    if image[1].is_negative() {
        let flip = IntMat::from_i64_rows(&[&[1, 0], &[0, -1]]);
        m = &flip * &m;
        image = m.mul_vec(q);
    }
    let b = image[1].clone();
    let a = image[0].mod_floor(&b);
    let shift = (&a - &image[0]) / &b;
    let shear = IntMat::new(2, 2, vec![BigInt::one(), shift, BigInt::zero(), BigInt::one()]).unwrap();
    (a, b, &shear * &m)
}

/// `GL(2, Z)` normal form of a full-dimensional cone in rank 2.
///
/// Of the two ray orderings the one giving the smaller `a` wins; ties keep
/// the stored order.
pub fn normalize_surface_cone(c: &Cone) -> Result<SurfaceNormalForm> {
    let (p, q) = c.expect_surface()?;
    let first = normalize_ordered(p, q);
    let second = normalize_ordered(q, p);
    let (a, b, transform) = if second.0 < first.0 { second } else { first };
    let kind = if b.is_one() { SurfaceKind::Smooth } else { SurfaceKind::Singular { a, b } };
    Ok(SurfaceNormalForm { kind, transform })
}

/// A simplicial cone is smooth when its rays are part of a basis of the lattice.
pub fn is_smooth_cone(c: &Cone) -> Result<bool> {
    let Some(snf) = c.ray_snf() else { return Ok(true) };
    let span = snf.rank();
    if span != c.rays().len() {
        return Err(Error::NotSimplicial { rays: c.rays().len(), span });
    }
    Ok(snf.is_all_ones())
}

/// Index of the sublattice spanned by the rays inside its saturation; equals
/// `|delta|` for full-dimensional simplicial cones and 1 for the zero cone.
pub fn multiplicity(c: &Cone) -> Result<BigInt> {
    let Some(snf) = c.ray_snf() else { return Ok(BigInt::one()) };
    if snf.rank() != c.rays().len() {
        return Err(Error::NotSimplicial { rays: c.rays().len(), span: snf.rank() });
    }
    Ok(snf.invariant_factors().iter().product())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cone2(p: [i64; 2], q: [i64; 2]) -> Cone {
        Cone::from_i64s(2, &[&p, &q]).unwrap()
    }

    fn big(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn construction_normalizes_and_validates() {
        let (c, notes) =
            Cone::with_normalizations(2, vec![IntVec::from_i64s(&[2, 4]), IntVec::from_i64s(&[1, 0])]).unwrap();
        assert_eq!(c.rays()[0], IntVec::from_i64s(&[1, 2]));
        assert_eq!(notes.len(), 1);
        assert_eq!(notes[0].to_string(), "ray 0: (2,4) normalized to (1,2)");

        assert_eq!(Cone::from_i64s(2, &[&[0, 0]]), Err(Error::ZeroRay));
        assert!(matches!(Cone::from_i64s(2, &[&[1, 2], &[2, 4]]), Err(Error::DuplicateRay(_))));
        assert_eq!(Cone::from_i64s(2, &[&[1, 2], &[-1, -2]]), Err(Error::NotStronglyConvex));
        assert_eq!(
            Cone::from_i64s(2, &[&[1, 0], &[0, 1], &[-1, -1]]),
            Err(Error::NotStronglyConvex)
        );
        assert!(Cone::from_i64s(2, &[&[1, 0], &[1, 1], &[0, 1]]).is_ok());
        assert!(matches!(Cone::from_i64s(3, &[&[1, 0]]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn dual_examples() {
        for (a, b) in [(2, 5), (1, 3), (3, 7)] {
            assert!(dual_cone_2d(&cone2([1, 0], [a, b])).unwrap().same_rays(&cone2([0, 1], [b, -a])));
        }
        for d in 1..6 {
            let dual = dual_cone_2d(&cone2([0, 1], [d, -1])).unwrap();
            assert!(dual.same_rays(&cone2([1, 0], [1, d])));
        }
        assert!(dual_cone_2d(&cone2([1, 0], [0, 1])).unwrap().same_rays(&cone2([1, 0], [0, 1])));
    }

    #[test]
    fn dual_generators_are_nonnegative_on_the_cone() {
        let c = cone2([3, 2], [1, -3]);
        let dual = dual_cone_2d(&c).unwrap();
        for m in dual.rays() {
            for u in c.rays() {
                assert!(!m.dot(u).is_negative());
            }
        }
    }

    #[test]
    fn surface_shape_errors() {
        let one_ray = Cone::from_i64s(2, &[&[1, 0]]).unwrap();
        assert!(matches!(dual_cone_2d(&one_ray), Err(Error::DegenerateCone(_))));
        assert!(matches!(delta(&one_ray), Err(Error::DegenerateCone(_))));
        let in_3d = Cone::from_i64s(3, &[&[1, 0, 0], &[0, 1, 0]]).unwrap();
        assert!(matches!(normalize_surface_cone(&in_3d), Err(Error::DegenerateCone(_))));
    }

    #[test]
    fn delta_examples() {
        for m in 1..6 {
            assert_eq!(delta(&cone2([1, 0], [1, m])).unwrap(), big(m));
        }
        assert_eq!(delta(&cone2([1, 0], [0, 1])).unwrap(), big(1));
        // cofactor expansion: 0 * (-1) - d * 1
        for d in 1..6 {
            assert_eq!(delta(&cone2([0, 1], [d, -1])).unwrap(), big(-d));
        }
    }

    #[test]
    fn normal_form_examples() {
        let nf = normalize_surface_cone(&cone2([1, 0], [7, 5])).unwrap();
        assert_eq!(nf.kind, SurfaceKind::Singular { a: big(2), b: big(5) });
        assert!(lattice::is_unimodular(&nf.transform).unwrap());
        // the transform sends the rays onto e_1 and (2, 5)
        let images: BTreeSet<IntVec> = cone2([1, 0], [7, 5]).rays().iter().map(|r| nf.transform.mul_vec(r)).collect();
        assert_eq!(images, [IntVec::from_i64s(&[1, 0]), IntVec::from_i64s(&[2, 5])].into_iter().collect());

        for a in -3..=3 {
            let nf = normalize_surface_cone(&cone2([1, 0], [a, 1])).unwrap();
            assert_eq!(nf.kind, SurfaceKind::Smooth);
            assert_eq!(nf.params(), (big(0), big(1)));
        }
        for d in 2..10 {
            let nf = normalize_surface_cone(&cone2([0, 1], [d, -1])).unwrap();
            let (a, b) = nf.params();
            assert_eq!(b, big(d));
            assert!(a.is_positive() && a < b && a.gcd(&b).is_one());
        }
    }

    #[test]
    fn remark_shear_by_hand() {
        // (7, 5) with m = -1 gives 0 < 7 - 5 < 5
        let m = -1;
        assert!(0 < 7 + 5 * m && 7 + 5 * m < 5);
        let shear = IntMat::from_i64_rows(&[&[1, m], &[0, 1]]);
        assert_eq!(shear.mul_vec(&IntVec::from_i64s(&[7, 5])), IntVec::from_i64s(&[2, 5]));
        assert_eq!(normalize_surface_cone(&cone2([1, 0], [7, 5])).unwrap().params(), (big(2), big(5)));
    }

    #[test]
    fn tie_break_picks_smaller_a() {
        // swapping the rays of cone(e_1, 2e_1+5e_2) yields a = 2^-1 mod 5 = 3
        let swapped = cone2([2, 5], [1, 0]);
        assert_eq!(normalize_surface_cone(&swapped).unwrap().params(), (big(2), big(5)));
        let three = cone2([1, 0], [3, 5]);
        assert_eq!(normalize_surface_cone(&three).unwrap().params(), (big(2), big(5)));
    }

    #[test]
    fn smoothness_examples() {
        for a in -2..=4 {
            assert!(is_smooth_cone(&cone2([1, 0], [a, 1])).unwrap());
        }
        assert!(!is_smooth_cone(&cone2([1, 0], [1, 2])).unwrap());
        assert!(is_smooth_cone(&Cone::from_i64s(3, &[&[1, 0, 0]]).unwrap()).unwrap());
        assert!(is_smooth_cone(&Cone::zero(3)).unwrap());
        let non_simplicial = Cone::from_i64s(2, &[&[1, 0], &[1, 1], &[0, 1]]).unwrap();
        assert_eq!(is_smooth_cone(&non_simplicial), Err(Error::NotSimplicial { rays: 3, span: 2 }));
    }

    #[test]
    fn multiplicity_of_lower_dimensional_cones() {
        let c = Cone::from_i64s(3, &[&[1, 0, 0], &[1, 2, 0]]).unwrap();
        assert_eq!(multiplicity(&c).unwrap(), big(2));
        assert_eq!(multiplicity(&Cone::zero(2)).unwrap(), big(1));
        assert_eq!(multiplicity(&cone2([3, 2], [1, -3])).unwrap(), big(11));
    }

    fn gl2() -> impl Strategy<Value = IntMat> {
        proptest::collection::vec((0usize..3, -5i64..=5), 1..10).prop_map(|ops| {
            let mut m = IntMat::identity(2);
            for (kind, c) in ops {
                let e = match kind {
                    0 => IntMat::from_i64_rows(&[&[1, c], &[0, 1]]),
                    1 => IntMat::from_i64_rows(&[&[1, 0], &[c, 1]]),
                    _ => IntMat::from_i64_rows(&[&[0, 1], &[1, 0]]),
                };
                m = &e * &m;
            }
            m
        })
    }

    fn surface_cone() -> impl Strategy<Value = Cone> {
        (-12i64..=12, -12i64..=12, -12i64..=12, -12i64..=12)
            .prop_filter_map("need a non-degenerate cone", |(a, b, c, d)| {
                if a * d - b * c == 0 {
                    return None;
                }
                Cone::from_i64s(2, &[&[a, b], &[c, d]]).ok()
            })
    }

    proptest! {
        #[test]
        fn normal_form_is_stable_on_canonical_cones(b in 2i64..60, a in 1i64..60) {
            prop_assume!(a < b && a.gcd(&b) == 1);
            // the canonical choice is min(a, a^-1 mod b)
            let inverse = (1..b).find(|x| (a * x) % b == 1).unwrap();
            let canonical = a.min(inverse);
            let nf = normalize_surface_cone(&cone2([1, 0], [canonical, b])).unwrap();
            prop_assert_eq!(nf.params(), (big(canonical), big(b)));
        }

        #[test]
        fn abs_delta_is_unimodular_invariant(c in surface_cone(), m in gl2()) {
            let image = c.transform(&m).unwrap();
            prop_assert_eq!(delta(&image).unwrap().abs(), delta(&c).unwrap().abs());
            let swapped = Cone::new(2, vec![c.rays()[1].clone(), c.rays()[0].clone()]).unwrap();
            prop_assert_eq!(delta(&swapped).unwrap(), -delta(&c).unwrap());
            prop_assert_eq!(
                normalize_surface_cone(&image).unwrap().params(),
                normalize_surface_cone(&c).unwrap().params()
            );
        }

        #[test]
        fn dual_is_an_involution(c in surface_cone()) {
            let back = dual_cone_2d(&dual_cone_2d(&c).unwrap()).unwrap();
            prop_assert!(back.same_rays(&c));
        }

        #[test]
        fn normal_form_b_is_abs_delta(c in surface_cone()) {
            let nf = normalize_surface_cone(&c).unwrap();
            let (a, b) = nf.params();
            prop_assert_eq!(&b, &delta(&c).unwrap().abs());
            prop_assert!(!a.is_negative() && a < b);
            prop_assert!(lattice::is_unimodular(&nf.transform).unwrap());
            let images: BTreeSet<IntVec> = c.rays().iter().map(|r| nf.transform.mul_vec(r)).collect();
            let expected: BTreeSet<IntVec> = nf.canonical_cone().rays().iter().cloned().collect();
            prop_assert_eq!(images, expected);
        }

        #[test]
        fn smooth_iff_unit_delta(c in surface_cone()) {
            prop_assert_eq!(is_smooth_cone(&c).unwrap(), delta(&c).unwrap().abs().is_one());
        }
    }
}
