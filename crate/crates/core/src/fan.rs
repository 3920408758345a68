//! Fans: cones glued along shared rays.
//!
//! Flags are computed on construction. Simpliciality and smoothness are
//! always verified exactly. Completeness is verified exactly in rank 1 and
//! 2; in higher rank it can only be declared, and the declaration must pass
//! a ridge check (every facet of a maximal cone lies in exactly two maximal
//! cones, on opposite sides), which in particular forces the rays to
//! positively span the ambient space.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::cone::{cross2, is_smooth_cone, Cone};
use crate::error::{Error, Result};
use crate::lattice::{self, IntMat, IntVec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlagState {
    Verified,
    Declared,
    False,
}

impl FlagState {
    pub fn holds(self) -> bool {
        self != FlagState::False
    }
}

impl fmt::Display for FlagState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FlagState::Verified => "verified",
            FlagState::Declared => "declared",
            FlagState::False => "no",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FanFlags {
    pub simplicial: FlagState,
    pub smooth: FlagState,
    pub complete: FlagState,
}

/// Properties asserted by the author of a fan description.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DeclaredFlags {
    pub complete: bool,
    pub simplicial: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fan {
    rank: usize,
    rays: Vec<IntVec>,
    cones: Vec<Vec<usize>>,
    flags: FanFlags,
}

impl Fan {
    /// `cones` are lists of indices into `rays`. Rays must be primitive and
    /// each must belong to at least one cone.
    pub fn new(rank: usize, rays: Vec<IntVec>, cones: Vec<Vec<usize>>, declared: DeclaredFlags) -> Result<Fan> {
        if rank == 0 {
            return Err(Error::Empty);
        }
        for r in &rays {
            if r.rank() != rank {
                return Err(Error::DimensionMismatch { expected: rank, found: r.rank() });
            }
            if !r.is_primitive() {
                return Err(Error::InvalidFan(format!("ray {r} is not primitive")));
            }
        }
        if let Some(r) = duplicate(&rays) {
            return Err(Error::DuplicateRay(r.clone()));
        }
        let mut normalized = Vec::with_capacity(cones.len());
        for (ci, cone) in cones.into_iter().enumerate() {
            let mut idx = cone.clone();
            idx.sort_unstable();
            idx.dedup();
            if idx.len() != cone.len() {
                return Err(Error::InvalidFan(format!("cone {ci} repeats a ray index")));
            }
            if let Some(&bad) = idx.iter().find(|&&i| i >= rays.len()) {
                return Err(Error::InvalidFan(format!(
                    "cone {ci} references ray {bad}, but only {} rays exist",
                    rays.len()
                )));
            }
            normalized.push(idx);
        }
        normalized.sort();
        normalized.dedup();
        let used: BTreeSet<usize> = normalized.iter().flatten().copied().collect();
        if let Some(unused) = (0..rays.len()).find(|i| !used.contains(i)) {
            return Err(Error::InvalidFan(format!("ray {unused} ({}) is not in any cone", rays[unused])));
        }

        let mut fan = Fan {
            rank,
            rays,
            cones: normalized,
            flags: FanFlags { simplicial: FlagState::False, smooth: FlagState::False, complete: FlagState::False },
        };
        // every cone must itself be a valid strongly convex cone
        for i in 0..fan.cones.len() {
            Cone::new(rank, fan.cone_rays(i))?;
        }

        let simplicial = (0..fan.cones.len()).all(|i| fan.cone(i).is_simplicial());
        if declared.simplicial && !simplicial {
            return Err(Error::InvalidFan("declared simplicial, but some cone is not".into()));
        }
        fan.flags.simplicial = if simplicial { FlagState::Verified } else { FlagState::False };
        let smooth = simplicial && (0..fan.cones.len()).all(|i| is_smooth_cone(&fan.cone(i)).unwrap_or(false));
        fan.flags.smooth = if smooth { FlagState::Verified } else { FlagState::False };

        fan.flags.complete = match rank {
            1 | 2 => {
                let complete = if rank == 1 { fan.complete_rank1() } else { fan.complete_rank2() };
                if declared.complete && !complete {
                    return Err(Error::InvalidFan("declared complete, but the cones do not cover the plane".into()));
                }
                if complete {
                    FlagState::Verified
                } else {
                    FlagState::False
                }
            }
            _ if declared.complete => {
                fan.ridge_check().map_err(|why| Error::InvalidFan(format!("declared complete, but {why}")))?;
                FlagState::Declared
            }
            _ => FlagState::False,
        };
        Ok(fan)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[IntVec] {
        &self.rays
    }

    /// Listed cones as sorted ray-index lists.
    pub fn cone_indices(&self) -> &[Vec<usize>] {
        &self.cones
    }

    pub fn flags(&self) -> FanFlags {
        self.flags
    }

    fn cone_rays(&self, i: usize) -> Vec<IntVec> {
        self.cones[i].iter().map(|&j| self.rays[j].clone()).collect()
    }

    pub fn cone(&self, i: usize) -> Cone {
        Cone::new(self.rank, self.cone_rays(i)).expect("validated on construction")
    }

    pub fn cones(&self) -> impl Iterator<Item = Cone> + '_ {
        (0..self.cones.len()).map(|i| self.cone(i))
    }

    /// Listed cones that are not faces of other listed cones.
    pub fn maximal_cones(&self) -> Vec<Cone> {
        let maximal: Vec<usize> = (0..self.cones.len())
            .filter(|&i| {
                let a: BTreeSet<_> = self.cones[i].iter().collect();
                !self.cones.iter().enumerate().any(|(j, other)| {
                    j != i && other.len() > a.len() && a.iter().all(|x| other.contains(x))
                })
            })
            .collect();
        maximal.into_iter().map(|i| self.cone(i)).collect()
    }

    /// Face counts `|Sigma(i)|` for `i = 0..=rank`, including the zero cone.
    /// Faces of simplicial cones are exactly their ray subsets.
    pub fn census(&self) -> Vec<usize> {
        let mut faces: BTreeSet<Vec<usize>> = BTreeSet::new();
        for cone in &self.cones {
            let k = cone.len();
            for mask in 0u64..(1u64 << k) {
                let face: Vec<usize> = (0..k).filter(|b| mask & (1 << b) != 0).map(|b| cone[b]).collect();
                faces.insert(face);
            }
        }
        let mut counts = vec![0; self.rank + 1];
        for f in faces {
            if f.len() <= self.rank {
                counts[f.len()] += 1;
            }
        }
        counts
    }

    fn complete_rank1(&self) -> bool {
        let maximal: BTreeSet<IntVec> = self.cones.iter().filter(|c| c.len() == 1).map(|c| self.rays[c[0]].clone()).collect();
        maximal.contains(&IntVec::from_i64s(&[1])) && maximal.contains(&IntVec::from_i64s(&[-1]))
    }

    /// Rays sorted by angle must pair up consecutively into the listed
    /// 2-cones, each spanning an angle below pi.
    fn complete_rank2(&self) -> bool {
        let two_cones: BTreeSet<(usize, usize)> =
            self.cones.iter().filter(|c| c.len() == 2).map(|c| (c[0], c[1])).collect();
        if self.rays.len() < 3 || two_cones.len() != self.rays.len() {
            return false;
        }
        // every ray sits in some 2-cone, otherwise a 1-cone is maximal
        if self.cones.iter().any(|c| c.len() == 1 && !two_cones.iter().any(|&(a, b)| a == c[0] || b == c[0])) {
            return false;
        }
        let mut order: Vec<usize> = (0..self.rays.len()).collect();
        order.sort_by(|&i, &j| angle_cmp(&self.rays[i], &self.rays[j]));
        (0..order.len()).all(|k| {
            let (i, j) = (order[k], order[(k + 1) % order.len()]);
            cross2(&self.rays[i], &self.rays[j]).is_positive() && two_cones.contains(&(i.min(j), i.max(j)))
        })
    }

    fn ridge_check(&self) -> std::result::Result<(), String> {
        let maximal = self.maximal_indices();
        let mut ridges: BTreeMap<Vec<usize>, Vec<(usize, usize)>> = BTreeMap::new();
        for &ci in &maximal {
            let cone = &self.cones[ci];
            if cone.len() != self.rank {
                return Err(format!("maximal cone {ci} has {} rays in rank {}", cone.len(), self.rank));
            }
            for (pos, &apex) in cone.iter().enumerate() {
                let mut ridge = cone.clone();
                ridge.remove(pos);
                ridges.entry(ridge).or_default().push((ci, apex));
            }
        }
        for (ridge, sides) in &ridges {
            if sides.len() != 2 {
                return Err(format!("ridge {ridge:?} lies in {} maximal cones", sides.len()));
            }
            let side = |apex: usize| -> BigInt {
                let mut cols: Vec<IntVec> = ridge.iter().map(|&j| self.rays[j].clone()).collect();
                cols.push(self.rays[apex].clone());
                lattice::det(&IntMat::from_columns(&cols).unwrap()).unwrap()
            };
            if (side(sides[0].1) * side(sides[1].1)).is_positive() || side(sides[0].1).is_zero() {
                return Err(format!("the two cones on ridge {ridge:?} overlap"));
            }
        }
        Ok(())
    }

    fn maximal_indices(&self) -> Vec<usize> {
        (0..self.cones.len())
            .filter(|&i| {
                !self.cones.iter().any(|other| {
                    other.len() > self.cones[i].len() && self.cones[i].iter().all(|x| other.contains(x))
                })
            })
            .collect()
    }

    /// For a complete simplicial fan with `rank + 1` rays generating the
    /// lattice: the positive primitive relation `sum w_i u_i = 0`.
    pub fn weight_relation(&self) -> Option<Weights> {
        if self.rays.len() != self.rank + 1 || !self.flags.complete.holds() || !self.flags.simplicial.holds() {
            return None;
        }
        let m = IntMat::from_columns(&self.rays).ok()?;
        let snf = lattice::smith_normal_form(&m);
        if snf.rank() != self.rank || !snf.invariant_factors().iter().all(One::is_one) {
            return None;
        }
        let kernel = snf.v.column(self.rank);
        let (kernel, _) = kernel.primitive_part();
        let kernel = if kernel[0].is_negative() { kernel.neg() } else { kernel };
        Weights::new(kernel.into_entries()).ok()
    }
}

fn duplicate(rays: &[IntVec]) -> Option<&IntVec> {
    let mut seen = BTreeSet::new();
    rays.iter().find(|r| !seen.insert(*r))
}

fn half_plane(v: &IntVec) -> u8 {
    if v[1].is_positive() || (v[1].is_zero() && v[0].is_positive()) {
        0
    } else {
        1
    }
}

fn angle_cmp(a: &IntVec, b: &IntVec) -> Ordering {
    half_plane(a).cmp(&half_plane(b)).then_with(|| {
        let c = cross2(a, b);
        if c.is_positive() {
            Ordering::Less
        } else if c.is_negative() {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    })
}

/// Degrees `a_0, ..., a_d` of a weighted projective space: `d >= 1`, all
/// positive, jointly coprime.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Weights(#[serde(serialize_with = "crate::lattice::bigint_str::seq")] Vec<BigInt>);

impl Weights {
    pub fn new(weights: Vec<BigInt>) -> Result<Weights> {
        if weights.len() < 2 {
            return Err(Error::InvalidWeights(format!("need at least 2 weights, got {}", weights.len())));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_positive()) {
            return Err(Error::InvalidWeights(format!("weight {w} is not positive")));
        }
        let g = weights.iter().fold(BigInt::zero(), |g, w| g.gcd(w));
        if !g.is_one() {
            return Err(Error::InvalidWeights(format!("weights have common factor {g}")));
        }
        Ok(Weights(weights))
    }

    pub fn from_i64s(weights: &[i64]) -> Result<Weights> {
        Weights::new(weights.iter().map(|&w| BigInt::from(w)).collect())
    }

    pub fn as_slice(&self) -> &[BigInt] {
        &self.0
    }

    /// Dimension `d` of `P(a_0, ..., a_d)`.
    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }
}

impl fmt::Display for Weights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P(")?;
        for (i, w) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{w}")?;
        }
        write!(f, ")")
    }
}

/// Fan of `P(a_0, ..., a_d)` in `N = Z^{d+1} / Z(a_0, ..., a_d)`, realized
/// in `Z^d` through the Smith form of the weight column: `U w = e_1`, and the
/// last `d` rows of `U` send `Z^{d+1}` onto `Z^d` with kernel `Z w`.
pub fn wps_fan(weights: &Weights) -> Result<Fan> {
    let d = weights.dim();
    let column = IntMat::new(d + 1, 1, weights.as_slice().to_vec())?;
    let snf = lattice::smith_normal_form(&column);
    debug_assert!(snf.d[(0, 0)].is_one());
    let rays: Vec<IntVec> = (0..=d)
        .map(|i| {
            let image = IntVec::new((1..=d).map(|r| snf.u[(r, i)].clone()).collect()).unwrap();
            image.primitive_part().0
        })
        .collect();
    let cones = (0..=d).rev().map(|omit| (0..=d).filter(|&i| i != omit).collect()).collect();
    Fan::new(d, rays, cones, DeclaredFlags { complete: true, simplicial: true })
}

/// The smooth subdivision of `cone(e_2, d e_1 - e_2)` by the ray through `e_1`.
pub fn resolution_fan(d: u64) -> Result<Fan> {
    if d == 0 {
        return Err(Error::InvalidFan("resolution fan needs d >= 1".into()));
    }
    let d = BigInt::from(d);
    let rays = vec![
        IntVec::from_i64s(&[0, 1]),
        IntVec::from_i64s(&[1, 0]),
        IntVec::new(vec![d, BigInt::from(-1)])?,
    ];
    Fan::new(2, rays, vec![vec![0, 1], vec![1, 2]], DeclaredFlags::default())
}

pub fn projective_line() -> Fan {
    Fan::new(
        1,
        vec![IntVec::from_i64s(&[1]), IntVec::from_i64s(&[-1])],
        vec![vec![0], vec![1]],
        DeclaredFlags { complete: true, simplicial: true },
    )
    .unwrap()
}

pub fn projective_plane() -> Fan {
    Fan::new(
        2,
        vec![IntVec::from_i64s(&[1, 0]), IntVec::from_i64s(&[0, 1]), IntVec::from_i64s(&[-1, -1])],
        vec![vec![0, 1], vec![1, 2], vec![2, 0]],
        DeclaredFlags { complete: true, simplicial: true },
    )
    .unwrap()
}

/// Hirzebruch surface `F_r`: rays `e_1, e_2, -e_1 + r e_2, -e_2`.
pub fn hirzebruch(r: i64) -> Fan {
    Fan::new(
        2,
        vec![
            IntVec::from_i64s(&[1, 0]),
            IntVec::from_i64s(&[0, 1]),
            IntVec::from_i64s(&[-1, r]),
            IntVec::from_i64s(&[0, -1]),
        ],
        vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
        DeclaredFlags { complete: true, simplicial: true },
    )
    .unwrap()
}

/// The fan of a single cone and its faces.
pub fn affine_fan(cone: &Cone) -> Result<Fan> {
    if cone.is_zero() {
        return Err(Error::InvalidFan("the zero cone has no rays to list".into()));
    }
    Fan::new(cone.rank(), cone.rays().to_vec(), vec![(0..cone.rays().len()).collect()], DeclaredFlags::default())
}
