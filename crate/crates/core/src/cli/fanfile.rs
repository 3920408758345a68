//! Line-oriented fan descriptions and their JSON mirror.
//!
//! ```text
//! # the projective plane
//! rank 2
//! name P2
//! flags complete simplicial
//! ray 1 0
//! ray 0 1
//! ray -1 -1
//! cone 0 1
//! cone 1 2
//! cone 2 0
//! ```

use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::cone::Cone;
use crate::error::Result as CoreResult;
use crate::fan::{DeclaredFlags, Fan};
use crate::lattice::IntVec;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    MissingRank,
    DimensionMismatch,
    BadIndex,
    ZeroRay,
    Io,
}

impl ParseErrorKind {
    pub fn code(self) -> &'static str {
        match self {
            ParseErrorKind::Syntax => "syntax",
            ParseErrorKind::MissingRank => "missing-rank",
            ParseErrorKind::DimensionMismatch => "dimension-mismatch",
            ParseErrorKind::BadIndex => "bad-index",
            ParseErrorKind::ZeroRay => "zero-ray",
            ParseErrorKind::Io => "io",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    /// 1-based; 0 when the error is not tied to a position.
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error[{}]", self.kind.code())?;
        if self.line > 0 {
            write!(f, " at line {}, column {}", self.line, self.column)?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for ParseError {}

fn err(kind: ParseErrorKind, line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError { kind, line, column, message: message.into() }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FanFile {
    pub name: Option<String>,
    pub rank: usize,
    pub rays: Vec<IntVec>,
    pub maximal_cones: Vec<Vec<usize>>,
    pub flags: DeclaredFlags,
    /// Notes produced while reading, such as rescaled rays.
    pub warnings: Vec<String>,
}

impl FanFile {
    pub fn fan(&self) -> CoreResult<Fan> {
        Fan::new(self.rank, self.rays.clone(), self.maximal_cones.clone(), self.flags)
    }

    /// The single listed cone, rays in the listed order.
    pub fn single_cone(&self) -> Option<CoreResult<Cone>> {
        match self.maximal_cones.as_slice() {
            [only] => Some(Cone::new(self.rank, only.iter().map(|&i| self.rays[i].clone()).collect())),
            _ => None,
        }
    }

    pub fn from_fan(fan: &Fan, name: Option<&str>) -> FanFile {
        let flags = fan.flags();
        FanFile {
            name: name.map(str::to_string),
            rank: fan.rank(),
            rays: fan.rays().to_vec(),
            maximal_cones: fan.cone_indices().to_vec(),
            flags: DeclaredFlags {
                complete: flags.complete.holds(),
                simplicial: flags.simplicial.holds(),
            },
            warnings: Vec::new(),
        }
    }

    /// Canonical text form: rank, name, flags, rays, cones.
    pub fn emit(&self) -> String {
        let mut out = format!("rank {}\n", self.rank);
        if let Some(name) = &self.name {
            out.push_str(&format!("name {name}\n"));
        }
        let mut flags = Vec::new();
        if self.flags.complete {
            flags.push("complete");
        }
        if self.flags.simplicial {
            flags.push("simplicial");
        }
        if !flags.is_empty() {
            out.push_str(&format!("flags {}\n", flags.join(" ")));
        }
        for r in &self.rays {
            let coords: Vec<String> = r.entries().iter().map(BigInt::to_string).collect();
            out.push_str(&format!("ray {}\n", coords.join(" ")));
        }
        for c in &self.maximal_cones {
            let idx: Vec<String> = c.iter().map(usize::to_string).collect();
            out.push_str(&format!("cone {}\n", idx.join(" ")));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let rays: Vec<Value> =
            self.rays.iter().map(|r| Value::Array(r.entries().iter().map(bigint_json).collect())).collect();
        let mut flags = Vec::new();
        if self.flags.complete {
            flags.push("complete");
        }
        if self.flags.simplicial {
            flags.push("simplicial");
        }
        json!({
            "name": self.name,
            "rank": self.rank,
            "rays": rays,
            "maximal_cones": self.maximal_cones,
            "flags": flags,
        })
    }
}

fn bigint_json(x: &BigInt) -> Value {
    match i64::try_from(x) {
        Ok(v) => Value::from(v),
        Err(_) => Value::String(x.to_string()),
    }
}

/// Column of the `k`-th whitespace-separated token on a line (1-based).
fn token_columns(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

pub fn parse_fan_text(text: &str) -> Result<FanFile, ParseError> {
    let mut rank: Option<usize> = None;
    let mut name = None;
    let mut flags = DeclaredFlags::default();
    let mut rays: Vec<IntVec> = Vec::new();
    let mut cones: Vec<(usize, Vec<(usize, usize)>)> = Vec::new();
    let mut warnings = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens = token_columns(content);
        let Some(&(kcol, keyword)) = tokens.first() else { continue };
        let args = &tokens[1..];
        let need_rank = |rank: Option<usize>| {
            rank.ok_or_else(|| err(ParseErrorKind::MissingRank, lineno, kcol, format!("`{keyword}` before the `rank` line")))
        };
        match keyword {
            "rank" => {
                if rank.is_some() {
                    return Err(err(ParseErrorKind::Syntax, lineno, kcol, "`rank` given twice"));
                }
                let [(col, value)] = args else {
                    return Err(err(ParseErrorKind::Syntax, lineno, kcol, "`rank` takes exactly one integer"));
                };
                let n: usize = value
                    .parse()
                    .ok()
                    .filter(|&n| n > 0)
                    .ok_or_else(|| err(ParseErrorKind::Syntax, lineno, *col, format!("rank must be a positive integer, got `{value}`")))?;
                rank = Some(n);
            }
            "name" => {
                let rest = content[kcol - 1 + keyword.len()..].trim();
                if rest.is_empty() {
                    return Err(err(ParseErrorKind::Syntax, lineno, kcol, "`name` needs a value"));
                }
                name = Some(rest.to_string());
            }
            "flags" => {
                for &(col, flag) in args {
                    match flag {
                        "complete" => flags.complete = true,
                        "simplicial" => flags.simplicial = true,
                        _ => return Err(err(ParseErrorKind::Syntax, lineno, col, format!("unknown flag `{flag}`"))),
                    }
                }
            }
            "ray" => {
                let n = need_rank(rank)?;
                let mut coords = Vec::with_capacity(args.len());
                for &(col, tok) in args {
                    let v: BigInt = tok
                        .parse()
                        .map_err(|_| err(ParseErrorKind::Syntax, lineno, col, format!("expected an integer, got `{tok}`")))?;
                    coords.push(v);
                }
                if coords.len() != n {
                    return Err(err(
                        ParseErrorKind::DimensionMismatch,
                        lineno,
                        kcol,
                        format!("ray has {} coordinates, rank is {n}", coords.len()),
                    ));
                }
                let v = IntVec::new(coords).expect("rank is positive");
                if v.is_zero() {
                    return Err(err(ParseErrorKind::ZeroRay, lineno, kcol, "the zero vector is not a ray"));
                }
                let (p, content) = v.primitive_part();
                if content != BigInt::from(1) {
                    warnings.push(format!("ray {}: {v} normalized to {p}", rays.len()));
                }
                rays.push(p);
            }
            "cone" => {
                need_rank(rank)?;
                if args.is_empty() {
                    return Err(err(ParseErrorKind::Syntax, lineno, kcol, "`cone` needs at least one ray index"));
                }
                let mut idx = Vec::with_capacity(args.len());
                for &(col, tok) in args {
                    let i: usize = tok
                        .parse()
                        .map_err(|_| err(ParseErrorKind::Syntax, lineno, col, format!("expected a ray index, got `{tok}`")))?;
                    idx.push((i, col));
                }
                cones.push((lineno, idx));
            }
            other => {
                return Err(err(ParseErrorKind::Syntax, lineno, kcol, format!("unknown keyword `{other}`")));
            }
        }
    }

    let rank = rank.ok_or_else(|| err(ParseErrorKind::MissingRank, 0, 0, "no `rank` line"))?;
    let mut maximal_cones = Vec::with_capacity(cones.len());
    for (lineno, idx) in cones {
        for &(i, col) in &idx {
            if i >= rays.len() {
                return Err(err(
                    ParseErrorKind::BadIndex,
                    lineno,
                    col,
                    format!("cone index {i} out of range ({} rays)", rays.len()),
                ));
            }
        }
        maximal_cones.push(idx.into_iter().map(|(i, _)| i).collect());
    }
    Ok(FanFile { name, rank, rays, maximal_cones, flags, warnings })
}

fn json_int(v: &Value, what: &str) -> Result<BigInt, ParseError> {
    let bad = || err(ParseErrorKind::Syntax, 0, 0, format!("{what}: expected an integer, got {v}"));
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(bad),
        Value::String(s) => s.parse().map_err(|_| bad()),
        _ => Err(bad()),
    }
}

/// Reads the JSON mirror `{rank, rays, maximal_cones, flags, name}` by
/// rendering it to the text form, so both paths share one validator.
pub fn parse_fan_json(text: &str) -> Result<FanFile, ParseError> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| err(ParseErrorKind::Syntax, e.line(), e.column(), format!("invalid JSON: {e}")))?;
    let obj = v.as_object().ok_or_else(|| err(ParseErrorKind::Syntax, 0, 0, "expected a JSON object"))?;
    let mut out = String::new();
    let rank = obj.get("rank").ok_or_else(|| err(ParseErrorKind::MissingRank, 0, 0, "no `rank` field"))?;
    out.push_str(&format!("rank {}\n", json_int(rank, "rank")?));
    if let Some(name) = obj.get("name").and_then(Value::as_str) {
        out.push_str(&format!("name {name}\n"));
    }
    match obj.get("flags") {
        None | Some(Value::Null) => {}
        Some(Value::Array(items)) => {
            let names: Option<Vec<&str>> = items.iter().map(Value::as_str).collect();
            let names = names.ok_or_else(|| err(ParseErrorKind::Syntax, 0, 0, "flags must be strings"))?;
            if !names.is_empty() {
                out.push_str(&format!("flags {}\n", names.join(" ")));
            }
        }
        Some(Value::Object(map)) => {
            let on: Vec<&str> = ["complete", "simplicial"]
                .into_iter()
                .filter(|k| map.get(*k).and_then(Value::as_bool).unwrap_or(false))
                .collect();
            if !on.is_empty() {
                out.push_str(&format!("flags {}\n", on.join(" ")));
            }
        }
        Some(other) => return Err(err(ParseErrorKind::Syntax, 0, 0, format!("flags: unexpected {other}"))),
    }
    let list = |key: &str| -> Result<Vec<Value>, ParseError> {
        match obj.get(key) {
            None => Ok(Vec::new()),
            Some(Value::Array(a)) => Ok(a.clone()),
            Some(other) => Err(err(ParseErrorKind::Syntax, 0, 0, format!("{key}: expected a list, got {other}"))),
        }
    };
    for ray in list("rays")? {
        let coords = ray.as_array().ok_or_else(|| err(ParseErrorKind::Syntax, 0, 0, format!("ray: expected a list, got {ray}")))?;
        let coords: Vec<String> = coords.iter().map(|c| json_int(c, "ray").map(|x| x.to_string())).collect::<Result<_, _>>()?;
        out.push_str(&format!("ray {}\n", coords.join(" ")));
    }
    for cone in list("maximal_cones")? {
        let idx = cone.as_array().ok_or_else(|| err(ParseErrorKind::Syntax, 0, 0, format!("cone: expected a list, got {cone}")))?;
        let idx: Vec<String> = idx.iter().map(|c| json_int(c, "cone").map(|x| x.to_string())).collect::<Result<_, _>>()?;
        out.push_str(&format!("cone {}\n", idx.join(" ")));
    }
    // positions refer to the rendered text, which is meaningless for JSON input
    parse_fan_text(&out).map_err(|e| ParseError { line: 0, column: 0, ..e })
}

pub fn read_input(path: &Path) -> Result<(String, Vec<u8>), ParseError> {
    let bytes = std::fs::read(path).map_err(|e| err(ParseErrorKind::Io, 0, 0, format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| err(ParseErrorKind::Syntax, 0, 0, format!("{}: not valid UTF-8", path.display())))?;
    Ok((text, bytes))
}
