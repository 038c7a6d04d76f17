//! Text formats: a versioned line-oriented system file, and JSON/CSV reports.
//!
//! System file layout (one record per line, `#` starts a comment):
//!
//! ```text
//! certhom-system 1
//! variables 3
//! degrees 2 2
//! poly
//! term 0 2 0 1 0
//! term 2 0 0 -1 0
//! poly
//! term 0 0 2 1 0
//! term 2 0 0 -1 0
//! root z1 0.5 0 0.5 0 0.5 0
//! ```
//!
//! `term` lists the exponents of `X_0..X_n` followed by the real and imaginary
//! parts of the coefficient. `root` takes a name and `n+1` complex coordinates.
//! With `form affine` the `variables` count excludes `X_0`, `term` lines omit
//! its exponent, and the polynomials are homogenized on input.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::harness::SearchReport;
use crate::poly::{DegreeVector, HomoPoly, PolySystem, C64};
use crate::projective::ProjectivePoint;

pub const FORMAT_HEADER: &str = "certhom-system";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct NamedRoot {
    pub name: String,
    /// Coordinates as written, not normalized.
    pub coords: Vec<C64>,
}

impl NamedRoot {
    pub fn point(&self) -> Result<ProjectivePoint> {
        ProjectivePoint::new(self.coords.clone())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SystemFile {
    pub system: PolySystem,
    pub roots: Vec<NamedRoot>,
    /// Set when the polynomials were read in affine form.
    pub homogenized: bool,
}

impl SystemFile {
    pub fn new(system: PolySystem) -> Self {
        SystemFile {
            system,
            roots: Vec::new(),
            homogenized: false,
        }
    }

    pub fn with_roots(system: PolySystem, roots: &[ProjectivePoint]) -> Self {
        let roots = roots
            .iter()
            .enumerate()
            .map(|(i, z)| NamedRoot {
                name: format!("z{}", i + 1),
                coords: z.coords().to_vec(),
            })
            .collect();
        SystemFile {
            system,
            roots,
            homogenized: false,
        }
    }

    pub fn root_points(&self) -> Result<Vec<ProjectivePoint>> {
        self.roots.iter().map(NamedRoot::point).collect()
    }
}

/// Homogenizes affine terms (exponents of `x_1..x_n`) to degree `degree`.
pub fn homogenize(
    degree: u32,
    num_affine_vars: usize,
    terms: &[(Vec<u32>, C64)],
) -> Result<HomoPoly> {
    let mut out = Vec::with_capacity(terms.len());
    for (exps, c) in terms {
        let total: u32 = exps.iter().sum();
        if exps.len() != num_affine_vars || total > degree {
            return Err(Error::InvalidMultiIndex {
                exponents: exps.clone(),
                degree,
                num_vars: num_affine_vars,
            });
        }
        let mut full = Vec::with_capacity(exps.len() + 1);
        full.push(degree - total);
        full.extend_from_slice(exps);
        out.push((full, *c));
    }
    HomoPoly::from_terms(degree, num_affine_vars + 1, out)
}

/// Sets `X_0 = 1`: the affine terms of `p`.
pub fn dehomogenize(p: &HomoPoly) -> Vec<(Vec<u32>, C64)> {
    p.terms()
        .map(|(alpha, c)| (alpha.exponents()[1..].to_vec(), *c))
        .collect()
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    let x: f64 = tok
        .parse()
        .map_err(|_| parse_err(line, format!("invalid number `{tok}`")))?;
    if !x.is_finite() {
        return Err(parse_err(line, format!("non-finite number `{tok}`")));
    }
    Ok(x)
}

fn parse_u32(tok: &str, line: usize, what: &str) -> Result<u32> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("invalid {what} `{tok}`")))
}

fn parse_complex_list(toks: &[&str], line: usize) -> Result<Vec<C64>> {
    if !toks.len().is_multiple_of(2) {
        return Err(parse_err(line, "coordinates must come in re/im pairs"));
    }
    toks.chunks(2)
        .map(|p| Ok(C64::new(parse_f64(p[0], line)?, parse_f64(p[1], line)?)))
        .collect()
}

/// Parses a system file. Errors carry 1-based line numbers.
pub fn parse_system(text: &str) -> Result<SystemFile> {
    let mut header_seen = false;
    let mut affine = false;
    let mut num_vars: Option<usize> = None;
    let mut degrees: Option<Vec<u32>> = None;
    let mut polys: Vec<Vec<(Vec<u32>, C64)>> = Vec::new();
    let mut poly_lines: Vec<usize> = Vec::new();
    let mut roots = Vec::new();
    let mut homogenized_flag = false;
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        if !header_seen {
            if toks.len() != 2 || toks[0] != FORMAT_HEADER {
                return Err(parse_err(
                    line,
                    format!("expected `{FORMAT_HEADER} {FORMAT_VERSION}`"),
                ));
            }
            let v = parse_u32(toks[1], line, "version")?;
            if v != FORMAT_VERSION {
                return Err(parse_err(line, format!("unsupported version {v}")));
            }
            header_seen = true;
            continue;
        }
        match toks[0] {
            "form" => match toks.get(1..) {
                Some(["affine"]) => affine = true,
                Some(["homogeneous"]) => affine = false,
                _ => return Err(parse_err(line, "form must be `affine` or `homogeneous`")),
            },
            "homogenized" => match toks.get(1..) {
                Some(["yes"]) => homogenized_flag = true,
                Some(["no"]) => homogenized_flag = false,
                _ => return Err(parse_err(line, "homogenized must be `yes` or `no`")),
            },
            "variables" => {
                if toks.len() != 2 {
                    return Err(parse_err(line, "expected `variables <count>`"));
                }
                num_vars = Some(parse_u32(toks[1], line, "variable count")? as usize);
            }
            "degrees" => {
                if toks.len() < 2 {
                    return Err(parse_err(line, "expected at least one degree"));
                }
                degrees = Some(
                    toks[1..]
                        .iter()
                        .map(|t| parse_u32(t, line, "degree"))
                        .collect::<Result<_>>()?,
                );
            }
            "poly" => {
                if toks.len() != 1 {
                    return Err(parse_err(line, "`poly` takes no fields"));
                }
                polys.push(Vec::new());
                poly_lines.push(line);
            }
            "term" => {
                let nv =
                    num_vars.ok_or_else(|| parse_err(line, "`variables` must precede terms"))?;
                let n_exp = nv;
                let Some(current) = polys.last_mut() else {
                    return Err(parse_err(line, "`term` before any `poly`"));
                };
                if toks.len() != 1 + n_exp + 2 {
                    return Err(parse_err(
                        line,
                        format!("expected {n_exp} exponents and a complex coefficient"),
                    ));
                }
                let exps = toks[1..=n_exp]
                    .iter()
                    .map(|t| parse_u32(t, line, "exponent"))
                    .collect::<Result<Vec<_>>>()?;
                let c = C64::new(
                    parse_f64(toks[n_exp + 1], line)?,
                    parse_f64(toks[n_exp + 2], line)?,
                );
                current.push((exps, c));
            }
            "root" => {
                if toks.len() < 2 {
                    return Err(parse_err(line, "expected `root <name> <coordinates>`"));
                }
                let coords = parse_complex_list(&toks[2..], line)?;
                roots.push((line, toks[1].to_string(), coords));
            }
            other => return Err(parse_err(line, format!("unknown record `{other}`"))),
        }
    }
    if !header_seen {
        return Err(parse_err(last_line.max(1), "missing header"));
    }
    let nv = num_vars.ok_or_else(|| parse_err(last_line, "missing `variables`"))?;
    let degrees = degrees.ok_or_else(|| parse_err(last_line, "missing `degrees`"))?;
    let hom_vars = if affine { nv + 1 } else { nv };
    if degrees.len() + 1 != hom_vars {
        return Err(parse_err(
            last_line,
            format!(
                "{} degrees for {hom_vars} homogeneous variables",
                degrees.len()
            ),
        ));
    }
    if polys.len() != degrees.len() {
        return Err(parse_err(
            last_line,
            format!("{} polynomials for {} degrees", polys.len(), degrees.len()),
        ));
    }
    let mut hps = Vec::with_capacity(polys.len());
    for ((terms, &d), &line) in polys.iter().zip(&degrees).zip(&poly_lines) {
        let p = if affine {
            homogenize(d, nv, terms)
        } else {
            HomoPoly::from_terms(d, nv, terms.iter().cloned())
        }
        .map_err(|e| parse_err(line, e.to_string()))?;
        hps.push(p);
    }
    DegreeVector::new(degrees).map_err(|e| parse_err(last_line, e.to_string()))?;
    let system = PolySystem::new(hps).map_err(|e| parse_err(last_line, e.to_string()))?;
    let roots = roots
        .into_iter()
        .map(|(line, name, coords)| {
            if coords.len() != hom_vars {
                return Err(parse_err(
                    line,
                    format!("root needs {hom_vars} coordinates"),
                ));
            }
            Ok(NamedRoot { name, coords })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SystemFile {
        system,
        roots,
        homogenized: affine || homogenized_flag,
    })
}

pub fn read_system(path: &Path) -> Result<SystemFile> {
    parse_system(&std::fs::read_to_string(path)?)
}

/// Serializes in homogeneous form with shortest round-trip floats (Rust's
/// `Debug` float format, which switches to exponent notation for extremes).
pub fn serialize_system(file: &SystemFile) -> String {
    let sys = &file.system;
    let mut out = String::new();
    let _ = writeln!(out, "{FORMAT_HEADER} {FORMAT_VERSION}");
    let _ = writeln!(out, "variables {}", sys.num_vars());
    let degrees: Vec<String> = sys
        .degrees()
        .as_slice()
        .iter()
        .map(u32::to_string)
        .collect();
    let _ = writeln!(out, "degrees {}", degrees.join(" "));
    if file.homogenized {
        let _ = writeln!(out, "homogenized yes");
    }
    for p in sys.polys() {
        let _ = writeln!(out, "poly");
        for (alpha, c) in p.terms() {
            let exps: Vec<String> = alpha.exponents().iter().map(u32::to_string).collect();
            let _ = writeln!(out, "term {} {:?} {:?}", exps.join(" "), c.re, c.im);
        }
    }
    for r in &file.roots {
        let coords: Vec<String> = r
            .coords
            .iter()
            .map(|c| format!("{:?} {:?}", c.re, c.im))
            .collect();
        let _ = writeln!(out, "root {} {}", r.name, coords.join(" "));
    }
    out
}

pub fn write_system(file: &SystemFile, path: &Path) -> Result<()> {
    std::fs::write(path, serialize_system(file))?;
    Ok(())
}

pub fn report_to_json(report: &SearchReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

pub fn report_from_json(text: &str) -> Result<SearchReport> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        msg: e.to_string(),
    })
}

fn cell(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// One column per system (kept candidates, then constructed systems); rows
/// are the per-root condition numbers, their maximum and the mean step counts.
pub fn report_to_csv(report: &SearchReport) -> String {
    let cols: Vec<_> = report.columns().collect();
    let num_roots = cols.iter().map(|c| c.per_root_mu.len()).max().unwrap_or(0);
    let heuristic = report
        .config
        .tracker
        .kinds()
        .contains(&crate::harness::TrackerKind::Heuristic);
    let mut out = String::from("row");
    for c in &cols {
        out.push(',');
        out.push_str(&c.system_id);
    }
    out.push('\n');
    let mut row = |label: String, f: &dyn Fn(&crate::harness::CandidateReport) -> Option<f64>| {
        out.push_str(&label);
        for c in &cols {
            out.push(',');
            out.push_str(&cell(f(c)));
        }
        out.push('\n');
    };
    for i in 0..num_roots {
        row(format!("mu(g;z{})", i + 1), &|c| {
            c.per_root_mu.get(i).copied()
        });
    }
    row("mu(g)".into(), &|c| c.mu);
    row("steps_certified".into(), &|c| {
        c.avg_steps_certified.as_ref().map(|s| s.mean)
    });
    if heuristic {
        row("steps_heuristic".into(), &|c| {
            c.avg_steps_heuristic.as_ref().map(|s| s.mean)
        });
    }
    out
}

/// Writes `path` (JSON) and the CSV table next to it; returns the CSV path.
pub fn write_report(report: &SearchReport, path: &Path) -> Result<PathBuf> {
    std::fs::write(path, report_to_json(report))?;
    let csv = path.with_extension("csv");
    std::fs::write(&csv, report_to_csv(report))?;
    Ok(csv)
}
