//! `toricg verify`: every closed form the library relies on, set against an
//! independent computation of the same number.
//!
//! Mutations shift the closed-form side of a family of checks by a constant.
//! They exist to prove the checks can fail.

use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::report::Report;
use super::{load_fan_file, CliError, CliResult};
use crate::chow::{a2_smooth_affine, class_group_affine, conjecture_check};
use crate::cone::{delta, dual_cone_2d, is_smooth_cone, multiplicity, normalize_surface_cone, Cone, SurfaceKind};
use crate::fan::{wps_fan, Fan};
use crate::group::{FieldModel, GroupExpr};
use crate::gtheory::{alternating_binomial_sum, binomial, g0_rational_dim, wps_gtheory};
use crate::lattice;
use crate::semigroup::{floor_sum_identity, orbit_representatives};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub(crate) struct Mutations {
    pub delta: i64,
    pub rank: i64,
    pub betti: i64,
}

impl Mutations {
    fn parse(specs: &[String]) -> CliResult<Mutations> {
        let mut m = Mutations::default();
        for spec in specs {
            let (key, value) = spec
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("mutation `{spec}` is not of the form name=offset")))?;
            let offset: i64 = value.parse().map_err(|_| CliError::Usage(format!("mutation offset `{value}` is not an integer")))?;
            match key {
                "delta" => m.delta += offset,
                "rank" => m.rank += offset,
                "betti" => m.betti += offset,
                _ => return Err(CliError::Usage(format!("unknown mutation target `{key}` (delta, rank, betti)"))),
            }
        }
        Ok(m)
    }

    fn is_active(&self) -> bool {
        *self != Mutations::default()
    }
}

fn collect_inputs(paths: &[PathBuf]) -> CliResult<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let entries = std::fs::read_dir(p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
            let mut files: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| matches!(f.extension().and_then(|e| e.to_str()), Some("fan" | "json")))
                .collect();
            files.sort();
            out.extend(files);
        } else {
            out.push(p.clone());
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage("no fan files to verify".into()));
    }
    Ok(out)
}

pub(crate) fn run(paths: &[PathBuf], mutate: &[String], report: &mut Report) -> CliResult<()> {
    let m = Mutations::parse(mutate)?;
    if m.is_active() {
        report.warn(format!("mutations active: delta {:+}, rank {:+}, betti {:+}", m.delta, m.rank, m.betti));
    }
    let files = collect_inputs(paths)?;
    for path in &files {
        let before = report.checks.len();
        verify_file(path, &m, report)?;
        let n = report.checks.len() - before;
        let failed = report.checks[before..].iter().filter(|c| !c.pass).count();
        report.result(label(path), "verify", format!("{} of {n} checks passed", n - failed), n - failed);
        if n == 0 {
            report.warn(format!("{}: no checks apply", label(path)));
        }
    }
    Ok(())
}

fn label(path: &Path) -> String {
    path.file_name().map_or_else(|| path.display().to_string(), |f| f.to_string_lossy().into_owned())
}

fn verify_file(path: &Path, m: &Mutations, report: &mut Report) -> CliResult<()> {
    let json = path.extension().and_then(|e| e.to_str()) == Some("json");
    let file = load_fan_file(path, json, report)?;
    let fan = file.fan()?;
    let tag = label(path);
    for (i, idx) in file.maximal_cones.iter().enumerate() {
        let c = Cone::new(file.rank, idx.iter().map(|&j| file.rays[j].clone()).collect())?;
        let ctag = if file.maximal_cones.len() == 1 { tag.clone() } else { format!("{tag} cone {i}") };
        if c.rank() == 2 && c.rays().len() == 2 && c.is_full_dimensional() {
            surface_checks(&c, &ctag, m, report)?;
        }
        if c.is_simplicial() && c.is_full_dimensional() {
            simplicial_checks(&c, &ctag, m, report)?;
        }
        if c.is_simplicial() && is_smooth_cone(&c)? {
            smooth_checks(&c, &ctag, report)?;
        }
    }
    betti_checks(&fan, &tag, m, report);
    wps_checks(&fan, &tag, m, report)?;
    Ok(())
}

fn abs_delta(c: &Cone, m: &Mutations) -> CliResult<BigInt> {
    Ok(delta(c)?.abs() + m.delta)
}

fn surface_checks(c: &Cone, tag: &str, m: &Mutations, report: &mut Report) -> CliResult<()> {
    let d = abs_delta(c, m)?;
    let cl = class_group_affine(c)?;
    report.check(format!("{tag}: |delta| vs class group order"), ("cone::delta", d.clone()), ("chow::class_group_affine", cl.torsion_order()));

    let nf = normalize_surface_cone(c)?;
    report.check(format!("{tag}: |delta| vs normal form b"), ("cone::delta", d.clone()), ("cone::normalize_surface_cone", nf.params().1));

    let dual = dual_cone_2d(c)?;
    report.check(format!("{tag}: |delta| vs |delta| of the dual cone"), ("cone::delta", d.clone()), ("cone::dual_cone_2d", delta(&dual)?.abs()));
    let back = dual_cone_2d(&dual)?;
    let same = back.rays().len() == c.rays().len() && back.rays().iter().all(|r| c.rays().contains(r));
    report.check(format!("{tag}: dual of the dual is the cone"), ("cone::dual_cone_2d", same), ("expected", true));

    // the coordinate ring is k[sigma^v ∩ Z^2], so enumerate on the dual cone
    let (a, b) = match normalize_surface_cone(&dual)?.kind {
        SurfaceKind::Smooth => (1, 1),
        SurfaceKind::Singular { a, b } => (to_i64(&a)?, to_i64(&b)?),
    };
    let rank = orbit_representatives(a, b, 2 * a, 2 * b).len() as i64;
    report.check(
        format!("{tag}: quotient rank vs floor sum"),
        ("semigroup::orbit_representatives", rank),
        ("semigroup::floor_sum_identity", floor_sum_identity(a, b)? + m.rank),
    );
    report.check(format!("{tag}: quotient rank vs |delta|"), ("semigroup::orbit_representatives", BigInt::from(rank)), ("cone::delta", d));

    let g0 = crate::gtheory::affine_surface_gtheory(c, 0, &FieldModel::AlgClosedChar0)?;
    report.check(
        format!("{tag}: torsion of G_0 vs class group"),
        ("gtheory::affine_surface_gtheory", GroupExpr::torsion_group(g0.torsion.clone()).to_string()),
        ("chow::class_group_affine", cl.to_string()),
    );
    Ok(())
}

fn to_i64(x: &BigInt) -> CliResult<i64> {
    i64::try_from(x).map_err(|_| CliError::Usage(format!("{x} is too large for lattice-point enumeration")))
}

fn simplicial_checks(c: &Cone, tag: &str, m: &Mutations, report: &mut Report) -> CliResult<()> {
    let det = lattice::det(&c.ray_matrix().expect("nonzero cone"))?.abs() + m.delta;
    report.check(format!("{tag}: |det| vs Smith multiplicity"), ("lattice::det", det.clone()), ("cone::multiplicity", multiplicity(c)?));
    report.check(format!("{tag}: smooth iff |det| = 1"), ("lattice::det", det.is_one()), ("cone::is_smooth_cone", is_smooth_cone(c)?));
    let cr = conjecture_check(c)?;
    if let Some(order) = &cr.a2_order {
        let divides = (&cr.delta_abs % order) == BigInt::from(0);
        report.check(format!("{tag}: |A^2| divides |delta|"), ("chow::conjecture_check", divides), ("expected", true));
    }
    Ok(())
}

fn smooth_checks(c: &Cone, tag: &str, report: &mut Report) -> CliResult<()> {
    let a2 = a2_smooth_affine(c)?;
    report.check(format!("{tag}: A^2 derivation closes"), ("chow::a2_smooth_affine", a2.derivation.is_complete(c)), ("expected", true));
    report.check(format!("{tag}: A^2 vanishes"), ("chow::a2_smooth_affine", a2.group.to_string()), ("expected", "0".to_string()));
    Ok(())
}

/// Betti numbers from the alternating binomial sum, against palindromy,
/// the Euler characteristic and `b_0 = 1`.
pub(crate) fn betti_checks(fan: &Fan, tag: &str, m: &Mutations, report: &mut Report) {
    let flags = fan.flags();
    if !flags.complete.holds() || !flags.simplicial.holds() {
        return;
    }
    let census = fan.census();
    let n = fan.rank();
    let shift = m.betti;
    let b = alternating_binomial_sum(&census, |i, k| binomial(i, k) + shift);
    let prefix = if tag.is_empty() { String::new() } else { format!("{tag}: ") };
    let reversed: Vec<BigInt> = b.iter().rev().cloned().collect();
    report.check(format!("{prefix}betti palindromy"), ("gtheory::betti_even", join(&b)), ("reversed", join(&reversed)));
    report.check(
        format!("{prefix}sum of betti numbers vs maximal cones"),
        ("gtheory::betti_even", b.iter().sum::<BigInt>()),
        ("fan::census", BigInt::from(census[n])),
    );
    report.check(format!("{prefix}b_0"), ("gtheory::betti_even", b[0].clone()), ("expected", BigInt::one()));
}

fn join(v: &[BigInt]) -> String {
    v.iter().map(BigInt::to_string).collect::<Vec<_>>().join(",")
}

/// Fans with `rank + 1` rays generating the lattice are weighted projective
/// spaces; the rank of `G_0` then has two independent descriptions.
fn wps_checks(fan: &Fan, tag: &str, m: &Mutations, report: &mut Report) -> CliResult<()> {
    let Some(w) = fan.weight_relation() else { return Ok(()) };
    report.result(format!("{tag}: weights"), "fan::weight_relation", w.to_string(), &w);
    let g0_rank = BigInt::from(wps_gtheory(&w, 0).free_rank as i64 + m.rank);
    report.check(format!("{tag}: G_0 rank vs betti sum"), ("gtheory::wps_gtheory", g0_rank.clone()), ("gtheory::g0_rational_dim", g0_rational_dim(fan)?));
    report.check(format!("{tag}: G_0 rank vs d + 1"), ("gtheory::wps_gtheory", g0_rank), ("fan::rank", BigInt::from(fan.rank() + 1)));
    report.check(format!("{tag}: census vs wps fan"), ("fan::census", format!("{:?}", fan.census())), ("fan::wps_fan", format!("{:?}", wps_fan(&w)?.census())));
    Ok(())
}
