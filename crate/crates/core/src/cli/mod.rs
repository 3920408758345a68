//! The `toricg` command line. [`run_command`] is the whole program minus
//! process I/O, so it can be driven from tests.

pub mod fanfile;
pub mod report;
mod verify;

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::chow::{a2_smooth_affine, class_group_affine, conjecture_check};
use crate::cone::{delta, is_smooth_cone, multiplicity, normalize_surface_cone, Cone, SurfaceKind};
use crate::error::Error;
use crate::fan::{wps_fan, Fan, Weights};
use crate::group::{evaluate, FieldModel};
use crate::gtheory::{affine_surface_gtheory, betti_even, g0_rational_dim, resolution_gtheory, wps_gtheory, wps_product_gtheory};
use crate::lattice::IntVec;
use crate::semigroup::{floor_sum_identity, quotient_basis};

use fanfile::{parse_fan_json, parse_fan_text, read_input, FanFile, ParseError};
use report::Report;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

#[derive(Debug)]
pub(crate) enum CliError {
    Parse(ParseError),
    Core(Error),
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(e) => write!(f, "{e}"),
            CliError::Core(e) => write!(f, "error: {e}"),
            CliError::Usage(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Parse(e)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Parser, Debug)]
#[command(name = "toricg", version, about = "G-theory, Betti numbers and Chow groups of toric varieties")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Normal form and determinant of a two-dimensional cone.
    Normalize(ConeInput),
    /// G-theory groups of the supported families.
    Gtheory {
        #[command(subcommand)]
        which: GtheoryCommand,
    },
    /// Even Betti numbers of a complete simplicial fan.
    Betti(FanInput),
    /// Semigroup generators and the quotient basis of R/xR for a surface cone.
    Semigroup {
        #[command(flatten)]
        input: ConeInput,
        /// Use cone(e1, a*e1 + b*e2) directly (with --b).
        #[arg(long, requires = "b", conflicts_with_all = ["file", "json", "rays"])]
        a: Option<i64>,
        #[arg(long, requires = "a")]
        b: Option<i64>,
    },
    /// Class group, A^2 and the divisibility check for an affine toric variety.
    Chow(ConeInput),
    /// Cross-check every applicable closed form against an independent computation.
    Verify {
        /// Fan files or directories of them.
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        /// Perturb a closed-form constant, e.g. delta=+1, rank=-1, betti=+1.
        #[arg(long, hide = true)]
        mutate: Vec<String>,
    },
}

#[derive(Subcommand, Debug)]
enum GtheoryCommand {
    /// Affine toric surface of a two-dimensional cone.
    AffineSurface {
        #[command(flatten)]
        input: ConeInput,
        #[command(flatten)]
        opts: DegreeField,
    },
    /// Weighted projective space.
    Wps {
        #[arg(long)]
        weights: String,
        #[command(flatten)]
        opts: DegreeField,
    },
    /// Resolution of the cone(e2, d*e1 - e2) surface.
    Resolution {
        #[arg(long)]
        d: u64,
        #[command(flatten)]
        opts: DegreeField,
    },
    /// Product of two weighted projective spaces (degrees 0, 1, 2).
    Product {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[command(flatten)]
        opts: DegreeField,
    },
}

#[derive(Args, Debug)]
struct DegreeField {
    /// Comma-separated degrees.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    degree: Vec<u32>,
    /// algclosed0, fq:<q> or symbolic.
    #[arg(long, default_value = "algclosed0")]
    field: String,
}

#[derive(Args, Debug)]
struct ConeInput {
    /// Fan file holding a single cone.
    file: Option<PathBuf>,
    /// JSON fan file holding a single cone.
    #[arg(long, conflicts_with = "file")]
    json: Option<PathBuf>,
    /// Rays written inline, e.g. "1,0 7,5".
    #[arg(long, conflicts_with_all = ["file", "json"])]
    rays: Option<String>,
}

#[derive(Args, Debug)]
struct FanInput {
    /// Fan file.
    file: Option<PathBuf>,
    /// JSON fan file.
    #[arg(long, conflicts_with = "file")]
    json: Option<PathBuf>,
    /// Use the fan of the weighted projective space with these weights.
    #[arg(long, conflicts_with_all = ["file", "json"])]
    weights: Option<String>,
}

pub fn run_command(argv: &[String]) -> Outcome {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome { stdout: rendered, stderr: String::new(), code: 0 }
                }
                _ => Outcome { stdout: String::new(), stderr: rendered, code: 1 },
            };
        }
    };
    // echo without the binary path, so reports do not depend on install location
    let mut echo = vec!["toricg".to_string()];
    echo.extend(argv.iter().skip(1).cloned());
    let mut report = Report::new(&echo);
    match dispatch(cli.command, &mut report) {
        Ok(()) => {
            let stdout = match cli.format {
                Format::Text => report.render_text(),
                Format::Json => report.render_json(),
            };
            let code = if report.all_checks_pass() { 0 } else { 2 };
            let stderr = if code == 2 { format!("{} check(s) failed\n", report.failed_checks()) } else { String::new() };
            Outcome { stdout, stderr, code }
        }
        Err(e) => Outcome { stdout: String::new(), stderr: format!("{e}\n"), code: 1 },
    }
}

fn dispatch(command: Command, report: &mut Report) -> CliResult<()> {
    match command {
        Command::Normalize(input) => normalize(&input, report),
        Command::Gtheory { which } => gtheory(which, report),
        Command::Betti(input) => betti(&input, report),
        Command::Semigroup { input, a, b } => semigroup(&input, a.zip(b), report),
        Command::Chow(input) => chow(&input, report),
        Command::Verify { paths, mutate } => verify::run(&paths, &mutate, report),
    }
}

pub(crate) fn load_fan_file(path: &Path, json: bool, report: &mut Report) -> CliResult<FanFile> {
    let (text, bytes) = read_input(path)?;
    report.input(path.display().to_string(), &bytes);
    let file = if json { parse_fan_json(&text)? } else { parse_fan_text(&text)? };
    for w in &file.warnings {
        report.warn(format!("{}: {w}", path.display()));
    }
    Ok(file)
}

fn parse_int_list(s: &str, what: &str) -> CliResult<Vec<BigInt>> {
    s.split(',')
        .map(|t| t.trim().parse::<BigInt>().map_err(|_| CliError::Usage(format!("{what}: `{t}` is not an integer"))))
        .collect()
}

fn parse_weights(s: &str, report: &mut Report) -> CliResult<Weights> {
    report.input(format!("weights {s}"), s.as_bytes());
    Ok(Weights::new(parse_int_list(s, "weights")?)?)
}

fn load_cone(input: &ConeInput, report: &mut Report) -> CliResult<Cone> {
    let file = if let Some(rays) = &input.rays {
        report.input(format!("rays {rays}"), rays.as_bytes());
        let rays: Vec<IntVec> = rays
            .split_whitespace()
            .map(|r| parse_int_list(r, "rays").and_then(|v| IntVec::new(v).map_err(CliError::Core)))
            .collect::<CliResult<_>>()?;
        let rank = rays.first().map(IntVec::rank).ok_or_else(|| CliError::Usage("--rays is empty".into()))?;
        let (cone, notes) = Cone::with_normalizations(rank, rays)?;
        for n in notes {
            report.warn(n.to_string());
        }
        return Ok(cone);
    } else if let Some(path) = &input.file {
        load_fan_file(path, false, report)?
    } else if let Some(path) = &input.json {
        load_fan_file(path, true, report)?
    } else {
        return Err(CliError::Usage("give a fan file, --json or --rays".into()));
    };
    file.fan()?;
    file.single_cone()
        .ok_or_else(|| CliError::Usage(format!("expected exactly one cone, the file lists {}", file.maximal_cones.len())))?
        .map_err(CliError::Core)
}

fn load_fan(input: &FanInput, report: &mut Report) -> CliResult<Fan> {
    if let Some(w) = &input.weights {
        let weights = parse_weights(w, report)?;
        return Ok(wps_fan(&weights)?);
    }
    let file = match (&input.file, &input.json) {
        (Some(p), _) => load_fan_file(p, false, report)?,
        (None, Some(p)) => load_fan_file(p, true, report)?,
        (None, None) => return Err(CliError::Usage("give a fan file, --json or --weights".into())),
    };
    Ok(file.fan()?)
}

fn rays_text(c: &Cone) -> String {
    c.rays().iter().map(IntVec::to_string).collect::<Vec<_>>().join(", ")
}

fn normalize(input: &ConeInput, report: &mut Report) -> CliResult<()> {
    let c = load_cone(input, report)?;
    let d = delta(&c)?;
    let nf = normalize_surface_cone(&c)?;
    report.result("rays", "input", rays_text(&c), c.rays());
    report.result("delta", "cone::delta", d.to_string(), d.to_string());
    let (a, b) = nf.params();
    let kind = match &nf.kind {
        SurfaceKind::Smooth => "smooth".to_string(),
        SurfaceKind::Singular { a, b } => format!("singular, a = {a}, b = {b}"),
    };
    report.result("normal form", "cone::normalize_surface_cone", kind, &nf.kind);
    report.result("canonical cone", "cone::normalize_surface_cone", format!("cone((1,0), ({a},{b}))"), [a.to_string(), b.to_string()]);
    report.result("transform", "cone::normalize_surface_cone", nf.transform.to_string(), &nf.transform);
    report.check("b of the normal form vs |delta|", ("cone::normalize_surface_cone", b), ("cone::delta", d.abs()));
    Ok(())
}

fn field_arg(s: &str) -> CliResult<FieldModel> {
    Ok(s.parse::<FieldModel>()?)
}

fn gtheory(which: GtheoryCommand, report: &mut Report) -> CliResult<()> {
    match which {
        GtheoryCommand::AffineSurface { input, opts } => {
            let field = field_arg(&opts.field)?;
            let c = load_cone(&input, report)?;
            report.result("rays", "input", rays_text(&c), c.rays());
            report.result("|delta|", "cone::delta", delta(&c)?.abs().to_string(), delta(&c)?.abs().to_string());
            report.warn("X = Spec k[sigma^v ∩ Z^2] for the given cone sigma; |delta(sigma^v)| = |delta(sigma)|");
            for &n in &opts.degree {
                let g = affine_surface_gtheory(&c, n, &field)?;
                report.result(format!("G_{n}(X)"), "gtheory::affine_surface_gtheory", g.to_string(), &g);
            }
            if opts.degree.iter().any(|n| n % 2 == 0) {
                let g0 = affine_surface_gtheory(&c, 0, &field)?;
                let cl = class_group_affine(&c)?;
                report.check(
                    "torsion of G_0 vs class group",
                    ("gtheory::affine_surface_gtheory", crate::group::GroupExpr::torsion_group(g0.torsion.clone()).to_string()),
                    ("chow::class_group_affine", cl.to_string()),
                );
            }
        }
        GtheoryCommand::Wps { weights, opts } => {
            let field = field_arg(&opts.field)?;
            let w = parse_weights(&weights, report)?;
            for &n in &opts.degree {
                let g = evaluate(&wps_gtheory(&w, n), &field);
                report.result(format!("G_{n}({w})"), &op_with_field("gtheory::wps_gtheory", &field), g.to_string(), &g);
            }
        }
        GtheoryCommand::Resolution { d, opts } => {
            let field = field_arg(&opts.field)?;
            report.input(format!("d {d}"), d.to_string().as_bytes());
            for &n in &opts.degree {
                let g = evaluate(&resolution_gtheory(d, n)?, &field);
                report.result(format!("G_{n}(resolution, d = {d})"), &op_with_field("gtheory::resolution_gtheory", &field), g.to_string(), &g);
            }
        }
        GtheoryCommand::Product { x, y, opts } => {
            let field = field_arg(&opts.field)?;
            let (wx, wy) = (parse_weights(&x, report)?, parse_weights(&y, report)?);
            for &n in &opts.degree {
                let g = wps_product_gtheory(&wx, &wy, n, &field)?;
                report.result(format!("G_{n}({wx} x {wy})"), "gtheory::kunneth_product", g.to_string(), &g);
            }
        }
    }
    Ok(())
}

fn op_with_field(op: &str, field: &FieldModel) -> String {
    match field {
        FieldModel::FiniteField { .. } => format!("{op} + group::evaluate({field})"),
        _ => op.to_string(),
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

fn betti(input: &FanInput, report: &mut Report) -> CliResult<()> {
    let fan = load_fan(input, report)?;
    let census = fan.census();
    report.result("census |Sigma(0..n)|", "fan::census", join(&census), &census);
    let b = betti_even(&fan)?;
    let b_text: Vec<String> = b.iter().map(BigInt::to_string).collect();
    report.result("b_0, b_2, ..., b_2n", "gtheory::betti_even", b_text.join(", "), &b_text);
    let sum = g0_rational_dim(&fan)?;
    report.result("sum (dim G_0 ⊗ Q)", "gtheory::g0_rational_dim", sum.to_string(), sum.to_string());
    verify::betti_checks(&fan, "", &verify::Mutations::default(), report);
    Ok(())
}

fn semigroup(input: &ConeInput, ab: Option<(i64, i64)>, report: &mut Report) -> CliResult<()> {
    let (a, b, d) = match ab {
        Some((a, b)) => {
            report.input(format!("a {a} b {b}"), format!("{a},{b}").as_bytes());
            (a, b, None)
        }
        None => {
            let c = load_cone(input, report)?;
            let nf = normalize_surface_cone(&c)?;
            let (a, b) = match nf.kind {
                SurfaceKind::Smooth => (1, 1),
                SurfaceKind::Singular { a, b } => (to_i64(&a)?, to_i64(&b)?),
            };
            report.result("normal form (a, b)", "cone::normalize_surface_cone", format!("({a}, {b})"), [a, b]);
            (a, b, Some(delta(&c)?.abs()))
        }
    };
    let r = quotient_basis(a, b)?;
    let pts = |v: &[(i64, i64)]| v.iter().map(|(x, y)| format!("({x},{y})")).collect::<Vec<_>>().join(" ");
    report.result("generators", "semigroup::hilbert_generators_2d", pts(&r.generators), &r.generators);
    report.result("quotient basis of R/xR", "semigroup::quotient_basis", pts(&r.quotient_basis), &r.quotient_basis);
    report.result("rank", "semigroup::quotient_basis", r.rank.to_string(), r.rank);
    report.check("quotient rank vs floor sum", ("semigroup::quotient_basis", r.rank as i64), ("semigroup::floor_sum_identity", floor_sum_identity(a, b)?));
    if let Some(d) = d {
        report.check("quotient rank vs |delta|", ("semigroup::quotient_basis", BigInt::from(r.rank)), ("cone::delta", d));
    }
    Ok(())
}

fn to_i64(x: &BigInt) -> CliResult<i64> {
    i64::try_from(x).map_err(|_| CliError::Usage(format!("{x} is too large for lattice-point enumeration")))
}

fn chow(input: &ConeInput, report: &mut Report) -> CliResult<()> {
    let c = load_cone(input, report)?;
    report.result("rays", "input", rays_text(&c), c.rays());
    let cr = conjecture_check(&c)?;
    report.result("|delta|", "cone::multiplicity", cr.delta_abs.to_string(), cr.delta_abs.to_string());
    if !c.is_zero() && c.is_full_dimensional() {
        let cl = class_group_affine(&c)?;
        report.result("Cl(X)", "chow::class_group_affine", cl.to_string(), &cl);
        report.check("class group order vs |delta|", ("chow::class_group_affine", cl.torsion_order()), ("cone::multiplicity", multiplicity(&c)?));
    }
    let order = cr.a2_order.as_ref().map_or("unknown".to_string(), BigInt::to_string);
    report.result("|A^2(X)|", "chow::conjecture_check", order, cr.a2_order.as_ref().map(BigInt::to_string));
    let divides = cr.divides.map_or("unknown".to_string(), |d| d.to_string());
    report.result("|A^2(X)| divides |delta|", "chow::conjecture_check", divides, cr.divides);
    report.result("status", "chow::conjecture_check", cr.status.to_string(), cr.status);
    report.result("justification", "chow::conjecture_check", cr.justification.clone(), &cr.justification);
    if is_smooth_cone(&c)? {
        let a2 = a2_smooth_affine(&c)?;
        report.result("A^2(X)", "chow::a2_smooth_affine", a2.group.to_string(), &a2.group);
        report.trace("A^2 derivation", a2.derivation.steps.iter().map(ToString::to_string).collect());
        report.check("derivation closes", ("chow::Derivation::check", a2.derivation.is_complete(&c)), ("expected", true));
    }
    if let Some(order) = &cr.a2_order {
        report.check("|A^2| divides |delta|", ("chow::conjecture_check", (&cr.delta_abs % order).is_zero()), ("expected", true));
    }
    Ok(())
}
