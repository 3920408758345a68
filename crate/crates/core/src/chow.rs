//! Class groups and codimension-2 Chow groups of affine toric varieties.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::cone::{is_smooth_cone, multiplicity, Cone};
use crate::error::{Error, Result};
use crate::group::GroupExpr;
use crate::lattice::{self, IntMat, IntVec};

/// `Cl(X_sigma)`: cokernel of `Z^n -> Z^{rays}`, `m -> (<m, u_rho>)_rho`,
/// i.e. of the matrix whose rows are the rays.
pub fn class_group_affine(c: &Cone) -> Result<GroupExpr> {
    if c.is_zero() || !c.is_full_dimensional() {
        return Err(Error::NotFullDimensional { rays: c.rays().len(), rank: c.rank() });
    }
    let m = IntMat::from_rows(c.rays())?;
    let snf = lattice::smith_normal_form(&m);
    Ok(GroupExpr::free(snf.cokernel_free_rank()).direct_sum(&GroupExpr::torsion_group(snf.torsion())))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Vanishing {
    /// `A_0(G_m) = Cl(G_m) = 0`, since `k[x, 1/x]` is a UFD.
    ClassGroupOfTorus,
    /// `A_{M-3}(G_m^{M-1}) = A^2(G_m^{M-1})`, already shown to vanish.
    InductionHypothesis,
    /// `A_i(G_m) = 0` for `i > 1`.
    AboveDimension,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum ProofStep {
    /// The rays extend to the basis given by the columns of `basis`, so
    /// `X ≅ A^r x G_m^{n-r}`.
    BasisExtension { r: usize, n: usize, basis: IntMat },
    /// `r = n`: `X ≅ A^n` and `A^2(A^n) = 0`.
    AffineSpace { n: usize },
    /// `A^2(X) = A_{n-2}(X) ≅ A_{N-2}(G_m^N) = A^2(G_m^N)`, `N = n - r`.
    HomotopyReduction { r: usize, torus_rank: usize },
    /// `A^2(G_m) = 0` because `G_m` is a curve.
    CurveBaseCase,
    /// The summand `A_i(G_m) ⊗ A_{M-2-i}(G_m^{M-1})` of `A^2(G_m^M)` vanishes.
    KunnethSummand { torus_rank: usize, i: usize, reason: Vanishing },
    /// All summands vanish, so `A^2(G_m^M) = 0`.
    InductionStep { torus_rank: usize },
}

impl fmt::Display for ProofStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProofStep::BasisExtension { r, n, basis } => {
                write!(f, "rays extend to the basis {basis} of Z^{n}, so X ≅ A^{r} x G_m^{}", n - r)
            }
            ProofStep::AffineSpace { n } => write!(f, "X ≅ A^{n}, so A^2(X) = 0"),
            ProofStep::HomotopyReduction { r, torus_rank } => write!(
                f,
                "homotopy invariance: A^2(X) ≅ A^2(A^{r} x G_m^{torus_rank}) ≅ A^2(G_m^{torus_rank})"
            ),
            ProofStep::CurveBaseCase => write!(f, "A^2(G_m) = 0 since G_m is 1-dimensional"),
            ProofStep::KunnethSummand { torus_rank: m, i, reason } => {
                let j = m - 2 - i;
                let why = match reason {
                    Vanishing::ClassGroupOfTorus => "A_0(G_m) = Cl(G_m) = 0".to_string(),
                    Vanishing::InductionHypothesis => format!("A_{j}(G_m^{}) = A^2(G_m^{}) = 0", m - 1, m - 1),
                    Vanishing::AboveDimension => format!("A_{i}(G_m) = 0 for {i} > 1"),
                };
                write!(f, "A_{i}(G_m) ⊗ A_{j}(G_m^{}) = 0: {why}", m - 1)
            }
            ProofStep::InductionStep { torus_rank } => {
                write!(f, "every Künneth summand vanishes, so A^2(G_m^{torus_rank}) = 0")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Derivation {
    pub steps: Vec<ProofStep>,
}

impl Derivation {
    /// Checks that the steps prove `A^2(X_c) = 0`: the basis really extends
    /// the rays, every Künneth summand is present with a valid reason, and
    /// induction hypotheses are only used once established.
    pub fn check(&self, c: &Cone) -> std::result::Result<(), String> {
        let mut steps = self.steps.iter();
        let n = c.rank();
        let r = c.rays().len();
        match steps.next() {
            Some(ProofStep::BasisExtension { r: sr, n: sn, basis }) => {
                if (*sr, *sn) != (r, n) || basis.rows() != n || basis.cols() != n {
                    return Err("basis extension has the wrong shape".into());
                }
                if !lattice::is_unimodular(basis).unwrap_or(false) {
                    return Err("extended basis is not unimodular".into());
                }
                if (0..r).any(|j| basis.column(j) != c.rays()[j]) {
                    return Err("extended basis does not start with the rays".into());
                }
            }
            _ => return Err("missing basis extension".into()),
        }
        if r == n {
            return match (steps.next(), steps.next()) {
                (Some(ProofStep::AffineSpace { n: sn }), None) if *sn == n => Ok(()),
                _ => Err("expected the affine space case to close the proof".into()),
            };
        }
        let torus = n - r;
        match steps.next() {
            Some(ProofStep::HomotopyReduction { r: sr, torus_rank }) if *sr == r && *torus_rank == torus => {}
            _ => return Err("missing homotopy reduction".into()),
        }
        if steps.next() != Some(&ProofStep::CurveBaseCase) {
            return Err("missing base case".into());
        }
        let mut proved = 1;
        let mut pending: Vec<usize> = Vec::new();
        for step in steps {
            match step {
                ProofStep::KunnethSummand { torus_rank: m, i, reason } => {
                    if *m != proved + 1 {
                        return Err(format!("summand for G_m^{m} before A^2(G_m^{}) is known", m - 1));
                    }
                    let valid = match reason {
                        Vanishing::ClassGroupOfTorus => *i == 0,
                        Vanishing::InductionHypothesis => *i == 1 && m - 1 <= proved,
                        Vanishing::AboveDimension => *i >= 2,
                    };
                    if !valid || *i > m - 2 || pending.contains(i) {
                        return Err(format!("invalid summand i={i} for G_m^{m}"));
                    }
                    pending.push(*i);
                }
                ProofStep::InductionStep { torus_rank: m } => {
                    if *m != proved + 1 || pending.len() != m - 1 {
                        return Err(format!("A^2(G_m^{m}) concluded with {} of {} summands", pending.len(), m - 1));
                    }
                    proved = *m;
                    pending.clear();
                }
                other => return Err(format!("unexpected step: {other}")),
            }
        }
        if proved != torus || !pending.is_empty() {
            return Err(format!("induction stops at G_m^{proved}, need G_m^{torus}"));
        }
        Ok(())
    }

    pub fn is_complete(&self, c: &Cone) -> bool {
        self.check(c).is_ok()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct A2Report {
    pub group: GroupExpr,
    pub derivation: Derivation,
}

/// `A^2(X) = 0` for a smooth cone, with the reduction to `A^r x G_m^N` and
/// the induction on `N` recorded step by step.
pub fn a2_smooth_affine(c: &Cone) -> Result<A2Report> {
    if !is_smooth_cone(c)? {
        let diagonal = c.ray_snf().map(|s| s.d.diagonal()).unwrap_or_default();
        return Err(Error::NotSmooth { diagonal });
    }
    let (n, r) = (c.rank(), c.rays().len());
    let basis = lattice::extend_to_basis(c.rays(), n)?;
    let mut steps = vec![ProofStep::BasisExtension { r, n, basis }];
    if r == n {
        steps.push(ProofStep::AffineSpace { n });
    } else {
        let torus = n - r;
        steps.push(ProofStep::HomotopyReduction { r, torus_rank: torus });
        steps.push(ProofStep::CurveBaseCase);
        for m in 2..=torus {
            for i in 0..=m - 2 {
                let reason = match i {
                    0 => Vanishing::ClassGroupOfTorus,
                    1 => Vanishing::InductionHypothesis,
                    _ => Vanishing::AboveDimension,
                };
                steps.push(ProofStep::KunnethSummand { torus_rank: m, i, reason });
            }
            steps.push(ProofStep::InductionStep { torus_rank: m });
        }
    }
    Ok(A2Report { group: GroupExpr::zero(), derivation: Derivation { steps } })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConjectureStatus {
    Proved,
    Trivial,
    OutOfScope,
}

impl fmt::Display for ConjectureStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConjectureStatus::Proved => "proved",
            ConjectureStatus::Trivial => "trivial",
            ConjectureStatus::OutOfScope => "out of scope",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConjectureReport {
    pub cone: Vec<IntVec>,
    pub rank: usize,
    #[serde(with = "crate::lattice::bigint_str")]
    pub delta_abs: BigInt,
    #[serde(serialize_with = "crate::lattice::bigint_str::opt")]
    pub a2_order: Option<BigInt>,
    pub divides: Option<bool>,
    pub status: ConjectureStatus,
    pub justification: String,
    pub derivation: Option<Derivation>,
}

const SURFACE_A0: &str = "A^2(X) = A_0(X) is generated by the torus-fixed point, which lies on the \
orbit closure of a ray, a copy of A^1 on which it is the divisor of a coordinate; hence A^2(X) = 0";

/// Whether `|A^2(X)|` divides `|delta|`, decided only when a proof covers the cone.
pub fn conjecture_check(c: &Cone) -> Result<ConjectureReport> {
    if !c.is_simplicial() {
        return Err(Error::NotSimplicial { rays: c.rays().len(), span: c.dim() });
    }
    let delta_abs = multiplicity(c)?;
    let report = |order: Option<BigInt>, status, justification: &str, derivation| ConjectureReport {
        cone: c.rays().to_vec(),
        rank: c.rank(),
        divides: order.as_ref().map(|o: &BigInt| (&delta_abs % o).is_zero()),
        delta_abs: delta_abs.clone(),
        a2_order: order,
        status,
        justification: justification.to_string(),
        derivation,
    };
    if c.is_zero() {
        let a2 = a2_smooth_affine(c)?;
        return Ok(report(Some(BigInt::one()), ConjectureStatus::Trivial, "X is a torus and A^2(G_m^n) = 0", Some(a2.derivation)));
    }
    if is_smooth_cone(c)? {
        let a2 = a2_smooth_affine(c)?;
        return Ok(report(Some(BigInt::one()), ConjectureStatus::Proved, "X is smooth, so A^2(X) = 0", Some(a2.derivation)));
    }
    if c.rank() == 2 && c.is_full_dimensional() {
        return Ok(report(Some(BigInt::one()), ConjectureStatus::Trivial, SURFACE_A0, None));
    }
    Ok(report(None, ConjectureStatus::OutOfScope, "no proof covers singular cones of dimension above 2", None))
}
