//! Lattice combinatorics of `sigma = cone(e_1, a e_1 + b e_2)` with
//! `1 <= a <= b` coprime. The case `a = 1, b = m` is the cone
//! `cone(e_1, e_1 + m e_2)`.
//!
//! Lattice points `(c, d)` stand for monomials `x^c y^d` of the semigroup
//! ring `R = k[sigma ∩ Z^2]`. Everything here is plain enumeration; the only
//! closed form is [`floor_sum_identity`], kept separate so it can be compared
//! against the enumerations.

use std::collections::BTreeSet;

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};

pub type Point = (i64, i64);

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SemigroupBasisReport {
    pub a: i64,
    pub b: i64,
    /// Minimal generators of `sigma ∩ Z^2`, all inside region `T`.
    pub generators: Vec<Point>,
    /// One representative per `k[v]`-orbit of monomials surviving in `R/xR`,
    /// where `v = x^a y^b`.
    pub quotient_basis: Vec<Point>,
    pub rank: usize,
}

fn validate(a: i64, b: i64) -> Result<()> {
    if a < 1 || b < a || a.gcd(&b) != 1 || b.checked_mul(b).is_none() {
        return Err(Error::InvalidSurfaceParameters { a, b });
    }
    Ok(())
}

/// `(x, y) ∈ sigma`: `y >= 0` and `a y <= b x`.
pub fn in_cone(a: i64, b: i64, (x, y): Point) -> bool {
    y >= 0 && a * y <= b * x
}

/// `0 <= x <= a`, `0 <= y <= (b/a) x`.
pub fn in_region_t(a: i64, b: i64, (x, y): Point) -> bool {
    (0..=a).contains(&x) && in_cone(a, b, (x, y))
}

/// Monomials of `sigma` not divisible by `x`: `p ∈ sigma`, `p - e_1 ∉ sigma`.
fn survives_mod_x(a: i64, b: i64, (x, y): Point) -> bool {
    in_cone(a, b, (x, y)) && !in_cone(a, b, (x - 1, y))
}

fn decomposable(a: i64, b: i64, p: Point) -> bool {
    (0..=p.0).any(|qx| {
        (0..=p.1).any(|qy| {
            let q = (qx, qy);
            q != (0, 0) && q != p && in_cone(a, b, q) && in_cone(a, b, (p.0 - qx, p.1 - qy))
        })
    })
}

/// Minimal generating set of `sigma ∩ Z^2`, sorted by `(x, y)`.
///
/// Candidates are the nonzero points of region `T`; a candidate is dropped
/// when it splits as a sum of two nonzero points of the cone.
pub fn hilbert_generators_2d(a: i64, b: i64) -> Result<Vec<Point>> {
    validate(a, b)?;
    let mut gens = Vec::new();
    for x in 0..=a {
        for y in 0..=b {
            let p = (x, y);
            if p != (0, 0) && in_region_t(a, b, p) && !decomposable(a, b, p) {
                gens.push(p);
            }
        }
    }
    Ok(gens)
}

/// Enumerates the monomials surviving in `R/xR` inside `[0, box_x] x [0, box_y]`
/// and reduces each to the bottom of its orbit under `+v`.
pub fn orbit_representatives(a: i64, b: i64, box_x: i64, box_y: i64) -> BTreeSet<Point> {
    let mut reps = BTreeSet::new();
    for x in 0..=box_x {
        for y in 0..=box_y {
            let mut p = (x, y);
            if !survives_mod_x(a, b, p) {
                continue;
            }
            while survives_mod_x(a, b, (p.0 - a, p.1 - b)) {
                p = (p.0 - a, p.1 - b);
            }
            reps.insert(p);
        }
    }
    reps
}

/// The `k[v]`-module basis of `R/xR`. Representatives are the lowest point
/// of each orbit, listed by increasing `y`.
pub fn quotient_basis(a: i64, b: i64) -> Result<SemigroupBasisReport> {
    validate(a, b)?;
    let generators = hilbert_generators_2d(a, b)?;
    let mut quotient_basis: Vec<Point> = orbit_representatives(a, b, 2 * a, 2 * b).into_iter().collect();
    quotient_basis.sort_by_key(|&(x, y)| (y, x));
    let rank = quotient_basis.len();
    if rank as i64 != b {
        return Err(Error::RankMismatch { computed: rank, expected: b });
    }
    Ok(SemigroupBasisReport { a, b, generators, quotient_basis, rank })
}

/// Terms `1, floor(b/a), floor(2b/a) - floor(b/a), ..., floor(ab/a) - floor((a-1)b/a) - 1`.
pub fn floor_sum_terms(a: i64, b: i64) -> Result<Vec<i64>> {
    validate(a, b)?;
    let mut terms = vec![1];
    for j in 1..=a {
        let mut t = Integer::div_floor(&(j * b), &a) - Integer::div_floor(&((j - 1) * b), &a);
        if j == a {
            t -= 1;
        }
        terms.push(t);
    }
    Ok(terms)
}

/// Sum of [`floor_sum_terms`]; telescopes to `b`.
pub fn floor_sum_identity(a: i64, b: i64) -> Result<i64> {
    Ok(floor_sum_terms(a, b)?.iter().sum())
}

/// Number of `k[v]`-module generators of `R/xR`: the length that the
/// boundary map assigns to `[R/xR]`.
pub fn boundary_image(a: i64, b: i64) -> Result<usize> {
    Ok(quotient_basis(a, b)?.rank)
}

/// For each generator other than `v = (a, b)`, the least `l <= 2b` with
/// `l g - e_1 ∈ sigma`, so that `g^l` vanishes in `R/xR`.
pub fn nilpotency_witnesses(a: i64, b: i64) -> Result<Vec<(Point, Option<i64>)>> {
    let gens = hilbert_generators_2d(a, b)?;
    Ok(gens
        .into_iter()
        .filter(|&g| g != (a, b))
        .map(|g| {
            let l = (1..=2 * b).find(|&l| in_cone(a, b, (l * g.0 - 1, l * g.1)));
            (g, l)
        })
        .collect())
}
