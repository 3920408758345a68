//! Formal abelian group expressions `Z^r ⊕ Z/d_1 ⊕ ... ⊕ (symbolic terms)`.
//!
//! Symbolic terms stand for the K-groups `G_j(k)` of the base field, their
//! tensor products, and their reductions modulo an integer. They are only
//! resolved into concrete groups by [`evaluate`] under a finite field.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// `Z/modulus ⊗ G_{f_1}(k) ⊗ ... ⊗ G_{f_k}(k)`; no modulus means no reduction.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymTerm {
    pub modulus: Option<BigInt>,
    pub factors: Vec<u32>,
}

impl SymTerm {
    pub fn gk(j: u32) -> SymTerm {
        SymTerm { modulus: None, factors: vec![j] }
    }

    pub fn tensor_gk(i: u32, j: u32) -> SymTerm {
        SymTerm { modulus: None, factors: vec![i.min(j), i.max(j)] }
    }
}

impl fmt::Display for SymTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if let Some(m) = &self.modulus {
            parts.push(format!("Z/{m}"));
        }
        parts.extend(self.factors.iter().map(|j| format!("G_{j}(k)")));
        f.write_str(&parts.join("⊗"))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GroupExpr {
    pub free_rank: usize,
    /// Cyclic orders; in canonical form `d_1 | d_2 | ...`, all `> 1`.
    pub torsion: Vec<BigInt>,
    pub symbolic: BTreeMap<SymTerm, usize>,
}

impl GroupExpr {
    pub fn zero() -> GroupExpr {
        GroupExpr::default()
    }

    pub fn free(r: usize) -> GroupExpr {
        GroupExpr { free_rank: r, ..GroupExpr::default() }
    }

    pub fn cyclic(d: impl Into<BigInt>) -> GroupExpr {
        canonicalize(&GroupExpr { torsion: vec![d.into()], ..GroupExpr::default() })
    }

    pub fn torsion_group(orders: Vec<BigInt>) -> GroupExpr {
        canonicalize(&GroupExpr { torsion: orders, ..GroupExpr::default() })
    }

    /// `G_j(k)^mult`; `G_0(k)` folds to `Z^mult`.
    pub fn gk(j: u32, mult: usize) -> GroupExpr {
        let mut g = GroupExpr::zero();
        if mult > 0 {
            g.symbolic.insert(SymTerm::gk(j), mult);
        }
        canonicalize(&g)
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty() && self.symbolic.is_empty()
    }

    pub fn is_concrete(&self) -> bool {
        self.symbolic.is_empty()
    }

    /// Order of the torsion part, for finitely generated expressions.
    pub fn torsion_order(&self) -> BigInt {
        self.torsion.iter().product()
    }

    /// Order when the group is finite.
    pub fn order(&self) -> Option<BigInt> {
        (self.free_rank == 0 && self.symbolic.is_empty()).then(|| self.torsion_order())
    }

    pub fn direct_sum(&self, other: &GroupExpr) -> GroupExpr {
        let mut g = self.clone();
        g.free_rank += other.free_rank;
        g.torsion.extend(other.torsion.iter().cloned());
        for (t, m) in &other.symbolic {
            *g.symbolic.entry(t.clone()).or_insert(0) += m;
        }
        canonicalize(&g)
    }

    pub fn power(&self, k: usize) -> GroupExpr {
        (0..k).fold(GroupExpr::zero(), |acc, _| acc.direct_sum(self))
    }
}

/// Torsion into a divisor chain, `Z/0` and `G_0(k)` folded into the free
/// part, symbolic terms normalized and merged.
pub fn canonicalize(g: &GroupExpr) -> GroupExpr {
    let mut free_rank = g.free_rank;
    let mut torsion: Vec<BigInt> = Vec::new();
    for d in &g.torsion {
        if d.is_zero() {
            free_rank += 1;
        } else if !d.abs().is_one() {
            torsion.push(d.abs());
        }
    }
    let mut symbolic: BTreeMap<SymTerm, usize> = BTreeMap::new();
    for (term, &mult) in &g.symbolic {
        if mult == 0 {
            continue;
        }
        let modulus = term.modulus.as_ref().map(|m| m.abs()).filter(|m| !m.is_zero());
        if modulus.as_ref().is_some_and(One::is_one) {
            continue;
        }
        // G_0(k) = Z is a unit for the tensor product
        let mut factors: Vec<u32> = term.factors.iter().copied().filter(|&j| j != 0).collect();
        factors.sort_unstable();
        if factors.is_empty() {
            match modulus {
                None => free_rank += mult,
                Some(m) => torsion.extend(std::iter::repeat_n(m, mult)),
            }
            continue;
        }
        *symbolic.entry(SymTerm { modulus, factors }).or_insert(0) += mult;
    }
    GroupExpr { free_rank, torsion: divisor_chain(torsion), symbolic }
}

fn divisor_chain(mut t: Vec<BigInt>) -> Vec<BigInt> {
    for i in 0..t.len() {
        for j in i + 1..t.len() {
            let g = t[i].gcd(&t[j]);
            let l = t[i].lcm(&t[j]);
            t[i] = g;
            t[j] = l;
        }
    }
    t.retain(|d| !d.is_one());
    t
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldModel {
    AlgClosedChar0,
    FiniteField { q: u64 },
    Symbolic,
}

impl FieldModel {
    pub fn finite_field(q: u64) -> Result<FieldModel> {
        if prime_power_base(q).is_none() {
            return Err(Error::InvalidField(format!("{q} is not a prime power")));
        }
        Ok(FieldModel::FiniteField { q })
    }
}

impl fmt::Display for FieldModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldModel::AlgClosedChar0 => f.write_str("algclosed0"),
            FieldModel::FiniteField { q } => write!(f, "fq:{q}"),
            FieldModel::Symbolic => f.write_str("symbolic"),
        }
    }
}

impl FromStr for FieldModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<FieldModel> {
        match s {
            "algclosed0" => Ok(FieldModel::AlgClosedChar0),
            "symbolic" => Ok(FieldModel::Symbolic),
            _ => {
                let q = s
                    .strip_prefix("fq:")
                    .and_then(|q| q.parse::<u64>().ok())
                    .ok_or_else(|| Error::InvalidField(format!("expected algclosed0, fq:<q> or symbolic, got {s:?}")))?;
                FieldModel::finite_field(q)
            }
        }
    }
}

impl Serialize for FieldModel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    if let Some(&p) = BASES.iter().find(|&&p| n.is_multiple_of(p)) {
        return n == p;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    BASES.iter().all(|&a| {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            return true;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                return true;
            }
        }
        false
    })
}

/// `(p, k)` with `q = p^k`, `p` prime.
pub fn prime_power_base(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    for k in (1..=63u32).rev() {
        let r = integer_root(q, k);
        if r >= 2 && r.checked_pow(k) == Some(q) && is_prime(r) {
            return Some((r, k));
        }
    }
    None
}

fn integer_root(q: u64, k: u32) -> u64 {
    let mut r = (q as f64).powf(1.0 / k as f64).round() as u64;
    while r > 0 && r.checked_pow(k).is_none_or(|v| v > q) {
        r -= 1;
    }
    while (r + 1).checked_pow(k).is_some_and(|v| v <= q) {
        r += 1;
    }
    r
}

/// `G_j(F_q)`: `Z` for `j = 0`, `Z/(q^i - 1)` for `j = 2i - 1`, `0` otherwise.
pub fn finite_field_gk(q: u64, j: u32) -> GroupExpr {
    if j == 0 {
        GroupExpr::free(1)
    } else if j % 2 == 1 {
        let i = j.div_ceil(2);
        GroupExpr::cyclic(Pow::pow(BigInt::from(q), i) - 1)
    } else {
        GroupExpr::zero()
    }
}

/// Resolves symbolic terms when the field model determines them.
pub fn evaluate(g: &GroupExpr, field: &FieldModel) -> GroupExpr {
    let FieldModel::FiniteField { q } = field else {
        return canonicalize(g);
    };
    let mut out = GroupExpr { free_rank: g.free_rank, torsion: g.torsion.clone(), symbolic: BTreeMap::new() };
    for (term, &mult) in &g.symbolic {
        let mut value = match &term.modulus {
            Some(m) => GroupExpr::cyclic(m.clone()),
            None => GroupExpr::free(1),
        };
        for &j in &term.factors {
            value = tensor_raw(&value, &finite_field_gk(*q, j));
        }
        out = out.direct_sum(&value.power(mult));
    }
    canonicalize(&out)
}

fn modulus_gcd(a: &Option<BigInt>, b: &Option<BigInt>) -> Option<BigInt> {
    match (a, b) {
        (None, None) => None,
        (Some(m), None) | (None, Some(m)) => Some(m.clone()),
        (Some(m), Some(n)) => Some(m.gcd(n)),
    }
}

fn tensor_raw(x: &GroupExpr, y: &GroupExpr) -> GroupExpr {
    // each side as a list of (summand, multiplicity)
    let summands = |g: &GroupExpr| -> Vec<(SymTerm, usize)> {
        let mut v = Vec::new();
        if g.free_rank > 0 {
            v.push((SymTerm { modulus: None, factors: vec![] }, g.free_rank));
        }
        v.extend(g.torsion.iter().map(|d| (SymTerm { modulus: Some(d.clone()), factors: vec![] }, 1)));
        v.extend(g.symbolic.iter().map(|(t, &m)| (t.clone(), m)));
        v
    };
    let mut out = GroupExpr::zero();
    for (s, m) in summands(x) {
        for (t, n) in summands(y) {
            let mut factors = s.factors.clone();
            factors.extend(&t.factors);
            let term = SymTerm { modulus: modulus_gcd(&s.modulus, &t.modulus), factors };
            *out.symbolic.entry(term).or_insert(0) += m * n;
        }
    }
    canonicalize(&out)
}

/// `g1 ⊗_Z g2`, expanded bilinearly. Under a finite field both sides are
/// evaluated first, so the result is concrete.
pub fn tensor(g1: &GroupExpr, g2: &GroupExpr, field: &FieldModel) -> GroupExpr {
    match field {
        FieldModel::FiniteField { .. } => tensor_raw(&evaluate(g1, field), &evaluate(g2, field)),
        _ => tensor_raw(g1, g2),
    }
}

/// Whether `G_j(k)` is known to be divisible; `None` when the field model
/// says nothing.
pub fn is_divisible(j: u32, field: &FieldModel) -> Option<bool> {
    match field {
        FieldModel::AlgClosedChar0 => Some(j > 0),
        FieldModel::FiniteField { q } => Some(finite_field_gk(*q, j).is_zero()),
        FieldModel::Symbolic => None,
    }
}

/// Whether `G_j(k)` has a `Q/Z` summand: the odd degrees over an
/// algebraically closed field. Positive even degrees are uniquely divisible.
pub fn has_q_mod_z_summand(j: u32, field: &FieldModel) -> Option<bool> {
    match field {
        FieldModel::AlgClosedChar0 => Some(j % 2 == 1),
        FieldModel::FiniteField { .. } => Some(false),
        FieldModel::Symbolic => None,
    }
}

impl fmt::Display for GroupExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = canonicalize(self);
        let mut parts: Vec<String> = Vec::new();
        match g.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        let mut i = 0;
        while i < g.torsion.len() {
            let run = g.torsion[i..].iter().take_while(|d| **d == g.torsion[i]).count();
            parts.push(if run == 1 { format!("Z/{}", g.torsion[i]) } else { format!("(Z/{})^{run}", g.torsion[i]) });
            i += run;
        }
        for (term, &mult) in &g.symbolic {
            let simple = term.modulus.is_none() && term.factors.len() == 1;
            parts.push(match (mult, simple) {
                (1, _) => term.to_string(),
                (m, true) => format!("{term}^{m}"),
                (m, false) => format!("({term})^{m}"),
            });
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" ⊕ "))
        }
    }
}

#[derive(Serialize)]
struct SymTermJson {
    #[serde(serialize_with = "crate::lattice::bigint_str::opt")]
    modulus: Option<BigInt>,
    factors: Vec<u32>,
    multiplicity: usize,
}

#[derive(Serialize)]
struct GroupJson {
    text: String,
    free_rank: usize,
    #[serde(serialize_with = "crate::lattice::bigint_str::seq")]
    torsion: Vec<BigInt>,
    symbolic: Vec<SymTermJson>,
}

impl Serialize for GroupExpr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let g = canonicalize(self);
        GroupJson {
            text: g.to_string(),
            free_rank: g.free_rank,
            torsion: g.torsion.clone(),
            symbolic: g
                .symbolic
                .iter()
                .map(|(t, &m)| SymTermJson { modulus: t.modulus.clone(), factors: t.factors.clone(), multiplicity: m })
                .collect(),
        }
        .serialize(s)
    }
}
