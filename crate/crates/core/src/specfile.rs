//! Line-oriented spec files describing a manifold and optionally a submanifold.
//!
//! ```text
//! [manifold]
//! name = kaehler_r4
//! dim = 4
//! mu = +1
//! domain = [-1,1] [-1,1] [-1,1] [-1,1]
//! metric = row("1","0","0","0") row("0","1","0","0") row("0","0","1","0") row("0","0","0","1")
//! affinor = row("0","-1","0","0") row("1","0","0","0") row("0","0","0","-1") row("0","0","1","0")
//!
//! [submanifold]
//! name = flat_cr
//! dim = 3
//! domain = [-1,1] [-1,1] [-1,1]
//! embedding = "u1" "u2" "u3" "0"
//! frame_D = row("1","0","0") row("0","1","0")
//! ```
//!
//! Affinor rows are `F^i_·`. Lines starting with `#` are comments.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use crate::chart::{Interval, ManifoldSpec, Mu};
use crate::expr::{Expression, VarKind};
use crate::sampling::{sample_points, DEFAULT_SEED};
use crate::submanifold::{frames_at, SubmanifoldSpec};

/// Number of probe points used to validate a freshly loaded spec.
pub const PROBE_POINTS: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub struct SpecError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

fn err<T>(line: Option<usize>, message: impl Into<String>) -> Result<T, SpecError> {
    Err(SpecError {
        line,
        message: message.into(),
    })
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Str(String),
    Row(Vec<String>),
    Interval(f64, f64),
}

fn quoted(chars: &[char], i: &mut usize, line: usize) -> Result<String, SpecError> {
    debug_assert_eq!(chars[*i], '"');
    *i += 1;
    let start = *i;
    while *i < chars.len() && chars[*i] != '"' {
        *i += 1;
    }
    if *i >= chars.len() {
        return err(Some(line), "unterminated string");
    }
    let s: String = chars[start..*i].iter().collect();
    *i += 1;
    Ok(s)
}

fn skip_ws(chars: &[char], i: &mut usize) {
    while *i < chars.len() && chars[*i].is_whitespace() {
        *i += 1;
    }
}

fn tokenize(value: &str, line: usize) -> Result<Vec<Token>, SpecError> {
    let chars: Vec<char> = value.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    loop {
        skip_ws(&chars, &mut i);
        if i >= chars.len() {
            return Ok(out);
        }
        match chars[i] {
            '"' => out.push(Token::Str(quoted(&chars, &mut i, line)?)),
            '[' => {
                let close = chars[i..]
                    .iter()
                    .position(|c| *c == ']')
                    .map(|k| i + k)
                    .ok_or(SpecError {
                        line: Some(line),
                        message: "unterminated interval".into(),
                    })?;
                let body: String = chars[i + 1..close].iter().collect();
                let parts: Vec<&str> = body.split(',').map(str::trim).collect();
                let parsed: Vec<f64> = parts.iter().filter_map(|p| p.parse().ok()).collect();
                if parts.len() != 2 || parsed.len() != 2 {
                    return err(Some(line), format!("malformed interval [{body}]"));
                }
                out.push(Token::Interval(parsed[0], parsed[1]));
                i = close + 1;
            }
            _ if chars[i..].starts_with(&['r', 'o', 'w', '(']) => {
                i += 4;
                let mut entries = Vec::new();
                loop {
                    skip_ws(&chars, &mut i);
                    match chars.get(i) {
                        Some('"') => entries.push(quoted(&chars, &mut i, line)?),
                        _ => return err(Some(line), "row entries must be quoted strings"),
                    }
                    skip_ws(&chars, &mut i);
                    match chars.get(i) {
                        Some(',') => i += 1,
                        Some(')') => {
                            i += 1;
                            break;
                        }
                        _ => return err(Some(line), "expected `,` or `)` in row"),
                    }
                }
                out.push(Token::Row(entries));
            }
            _ => {
                let start = i;
                while i < chars.len() && !chars[i].is_whitespace() {
                    i += 1;
                }
                out.push(Token::Str(chars[start..i].iter().collect()));
            }
        }
    }
}

#[derive(Debug, Clone, Default)]
struct Section {
    header_line: usize,
    entries: BTreeMap<String, (String, usize)>,
}

impl Section {
    fn get(&self, key: &str) -> Result<(&str, usize), SpecError> {
        match self.entries.get(key) {
            Some((v, l)) => Ok((v.as_str(), *l)),
            None => err(Some(self.header_line), format!("missing key `{key}`")),
        }
    }

    fn scalar(&self, key: &str) -> Result<(String, usize), SpecError> {
        let (v, l) = self.get(key)?;
        match tokenize(v, l)?.as_slice() {
            [Token::Str(s)] => Ok((s.clone(), l)),
            _ => err(Some(l), format!("`{key}` takes a single value")),
        }
    }

    fn dim(&self) -> Result<(usize, usize), SpecError> {
        let (v, l) = self.scalar("dim")?;
        match v.parse::<usize>() {
            Ok(d) if d > 0 => Ok((d, l)),
            _ => err(Some(l), format!("dim must be a positive integer, got `{v}`")),
        }
    }

    fn domain(&self, dim: usize) -> Result<Vec<Interval>, SpecError> {
        let (v, l) = self.get("domain")?;
        let mut out = Vec::new();
        for t in tokenize(v, l)? {
            match t {
                Token::Interval(lo, hi) if hi > lo => out.push(Interval::new(lo, hi)),
                Token::Interval(lo, hi) => return err(Some(l), format!("interval [{lo},{hi}] is empty")),
                _ => return err(Some(l), "domain is a list of intervals [lo,hi]"),
            }
        }
        if out.len() != dim {
            return err(Some(l), format!("domain needs {dim} intervals, got {}", out.len()));
        }
        Ok(out)
    }

    fn matrix(&self, key: &str, rows: Option<usize>, cols: usize, kind: VarKind, arity: usize) -> Result<Vec<Vec<Expression>>, SpecError> {
        let (v, l) = self.get(key)?;
        let mut out = Vec::new();
        for t in tokenize(v, l)? {
            let Token::Row(entries) = t else {
                return err(Some(l), format!("`{key}` is a list of row(...) groups"));
            };
            if entries.len() != cols {
                return err(Some(l), format!("`{key}` rows need {cols} entries, got {}", entries.len()));
            }
            out.push(
                entries
                    .iter()
                    .map(|src| parse_expr(key, src, arity, kind, l))
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
        if let Some(r) = rows {
            if out.len() != r {
                return err(Some(l), format!("`{key}` needs {r} rows, got {}", out.len()));
            }
        }
        Ok(out)
    }
}

fn parse_expr(key: &str, src: &str, arity: usize, kind: VarKind, line: usize) -> Result<Expression, SpecError> {
    Expression::parse_in(src, arity, kind).map_err(|e| SpecError {
        line: Some(line),
        message: format!("{key} entry \"{src}\": {e}"),
    })
}

/// Raw sections of a spec file keyed by header name.
fn sections(text: &str) -> Result<BTreeMap<String, Section>, SpecError> {
    let mut out: BTreeMap<String, Section> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if let Some(name) = trimmed.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let name = name.trim().to_string();
            if name != "manifold" && name != "submanifold" {
                return err(Some(line), format!("unknown section [{name}]"));
            }
            if out.contains_key(&name) {
                return err(Some(line), format!("duplicate section [{name}]"));
            }
            out.insert(
                name.clone(),
                Section {
                    header_line: line,
                    ..Section::default()
                },
            );
            current = Some(name);
            continue;
        }
        let Some(section) = current.as_ref().and_then(|c| out.get_mut(c)) else {
            return err(Some(line), "key outside of a section");
        };
        let Some((key, value)) = trimmed.split_once('=') else {
            return err(Some(line), "expected `key = value`");
        };
        let key = key.trim().to_string();
        let allowed: &[&str] = if current.as_deref() == Some("manifold") {
            &["name", "dim", "mu", "domain", "metric", "affinor"]
        } else {
            &["name", "dim", "domain", "embedding", "frame_D"]
        };
        if !allowed.contains(&key.as_str()) {
            return err(Some(line), format!("unknown key `{key}`"));
        }
        if section.entries.contains_key(&key) {
            return err(Some(line), format!("duplicate key `{key}`"));
        }
        section.entries.insert(key, (value.trim().to_string(), line));
    }
    Ok(out)
}

/// Parsed `[submanifold]` section, waiting for its ambient manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct SubmanifoldSection {
    pub name: String,
    pub dim: usize,
    pub domain: Vec<Interval>,
    pub embedding: Vec<Expression>,
    pub frame_d: Option<Vec<Vec<Expression>>>,
    header_line: usize,
    embedding_line: usize,
}

impl SubmanifoldSection {
    /// Attaches the ambient manifold and validates the result on probe points.
    pub fn attach(&self, ambient: Arc<ManifoldSpec>) -> Result<SubmanifoldSpec, SpecError> {
        if self.embedding.len() != ambient.dim {
            return err(
                Some(self.embedding_line),
                format!("embedding needs {} components for ambient `{}`, got {}", ambient.dim, ambient.name, self.embedding.len()),
            );
        }
        let spec = SubmanifoldSpec {
            name: self.name.clone(),
            dim: self.dim,
            embedding: self.embedding.clone(),
            ambient,
            domain: self.domain.clone(),
            frame_d: self.frame_d.clone(),
        };
        spec.validate_shape().or_else(|m| err(Some(self.header_line), m))?;
        for u in sample_points(&spec.domain, PROBE_POINTS, DEFAULT_SEED) {
            if let Err(e) = frames_at(&spec, &u) {
                return err(None, format!("submanifold `{}` invalid at probe point {u:?}: {e}", spec.name));
            }
        }
        Ok(spec)
    }
}

/// Contents of one spec file.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecDocument {
    pub manifold: Option<Arc<ManifoldSpec>>,
    pub submanifold: Option<SubmanifoldSection>,
}

fn manifold_section(sec: &Section) -> Result<ManifoldSpec, SpecError> {
    let (name, _) = sec.scalar("name")?;
    let (dim, _) = sec.dim()?;
    let (mu_src, mu_line) = sec.scalar("mu")?;
    let mu = mu_src
        .parse::<i64>()
        .ok()
        .and_then(Mu::from_int)
        .ok_or(SpecError {
            line: Some(mu_line),
            message: "mu must be -1 or +1".into(),
        })?;
    let domain = sec.domain(dim)?;
    let flat = |key: &str| -> Result<Vec<Expression>, SpecError> {
        Ok(sec
            .matrix(key, Some(dim), dim, VarKind::Ambient, dim)?
            .into_iter()
            .flatten()
            .collect())
    };
    let spec = ManifoldSpec {
        name,
        dim,
        mu,
        metric: flat("metric")?,
        affinor: flat("affinor")?,
        domain,
    };
    spec.validate_shape().or_else(|m| err(Some(sec.header_line), m))?;
    for x in sample_points(&spec.domain, PROBE_POINTS, DEFAULT_SEED) {
        let checked = spec.metric_at(&x).and_then(|_| spec.affinor_at(&x));
        if let Err(e) = checked {
            return err(None, format!("manifold `{}` invalid at probe point {x:?}: {e}", spec.name));
        }
    }
    Ok(spec)
}

fn submanifold_section(sec: &Section) -> Result<SubmanifoldSection, SpecError> {
    let (name, _) = sec.scalar("name")?;
    let (dim, _) = sec.dim()?;
    let domain = sec.domain(dim)?;
    let (src, line) = sec.get("embedding")?;
    let embedding = tokenize(src, line)?
        .into_iter()
        .map(|t| match t {
            Token::Str(s) => parse_expr("embedding", &s, dim, VarKind::Param, line),
            _ => err(Some(line), "embedding is a list of quoted expressions"),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let frame_d = if sec.entries.contains_key("frame_D") {
        Some(sec.matrix("frame_D", None, dim, VarKind::Param, dim)?)
    } else {
        None
    };
    Ok(SubmanifoldSection {
        name,
        dim,
        domain,
        embedding,
        frame_d,
        header_line: sec.header_line,
        embedding_line: line,
    })
}

pub fn parse_spec(text: &str) -> Result<SpecDocument, SpecError> {
    let secs = sections(text)?;
    if secs.is_empty() {
        return err(None, "no [manifold] or [submanifold] section");
    }
    let manifold = secs.get("manifold").map(manifold_section).transpose()?.map(Arc::new);
    let submanifold = secs.get("submanifold").map(submanifold_section).transpose()?;
    Ok(SpecDocument { manifold, submanifold })
}

pub fn read_spec(path: &Path) -> Result<SpecDocument, SpecError> {
    let text = std::fs::read_to_string(path).or_else(|e| err(None, format!("cannot read {}: {e}", path.display())))?;
    parse_spec(&text).map_err(|e| SpecError {
        message: format!("{}: {}", path.display(), e.message),
        ..e
    })
}

/// Ambient manifold from `main`, submanifold from `sub` if given, else from `main`.
pub fn resolve(main: SpecDocument, sub: Option<SpecDocument>) -> Result<(Arc<ManifoldSpec>, Option<SubmanifoldSpec>), SpecError> {
    let ambient = main
        .manifold
        .ok_or_else(|| SpecError {
            line: None,
            message: "the main spec needs a [manifold] section".into(),
        })?;
    let section = match sub {
        Some(doc) => Some(doc.submanifold.ok_or_else(|| SpecError {
            line: None,
            message: "the --sub spec needs a [submanifold] section".into(),
        })?),
        None => main.submanifold,
    };
    let sub = section.map(|s| s.attach(ambient.clone())).transpose()?;
    Ok((ambient, sub))
}

/// Reads the main spec and an optional separate submanifold spec.
pub fn load_spec(path: &Path, sub: Option<&Path>) -> Result<(Arc<ManifoldSpec>, Option<SubmanifoldSpec>), SpecError> {
    let main = read_spec(path)?;
    let sub = sub.map(read_spec).transpose()?;
    resolve(main, sub)
}

fn interval_list(domain: &[Interval]) -> String {
    domain
        .iter()
        .map(|iv| format!("[{:?},{:?}]", iv.lo, iv.hi))
        .collect::<Vec<_>>()
        .join(" ")
}

fn row(entries: &[Expression]) -> String {
    let quoted: Vec<String> = entries.iter().map(|e| format!("\"{e}\"")).collect();
    format!("row({})", quoted.join(","))
}

/// Spec-file text for a manifold and optional submanifold; parses back to equal specs.
pub fn export_spec(m: &ManifoldSpec, sub: Option<&SubmanifoldSpec>) -> String {
    let mut out = String::new();
    let n = m.dim;
    let rows = |entries: &[Expression]| entries.chunks(n).map(row).collect::<Vec<_>>().join(" ");
    writeln!(out, "[manifold]").unwrap();
    writeln!(out, "name = {}", m.name).unwrap();
    writeln!(out, "dim = {n}").unwrap();
    writeln!(out, "mu = {}", m.mu).unwrap();
    writeln!(out, "domain = {}", interval_list(&m.domain)).unwrap();
    writeln!(out, "metric = {}", rows(&m.metric)).unwrap();
    writeln!(out, "affinor = {}", rows(&m.affinor)).unwrap();
    if let Some(s) = sub {
        writeln!(out).unwrap();
        writeln!(out, "[submanifold]").unwrap();
        writeln!(out, "name = {}", s.name).unwrap();
        writeln!(out, "dim = {}", s.dim).unwrap();
        writeln!(out, "domain = {}", interval_list(&s.domain)).unwrap();
        let emb: Vec<String> = s.embedding.iter().map(|e| format!("\"{e}\"")).collect();
        writeln!(out, "embedding = {}", emb.join(" ")).unwrap();
        if let Some(frame) = &s.frame_d {
            writeln!(out, "frame_D = {}", frame.iter().map(|r| row(r)).collect::<Vec<_>>().join(" ")).unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::get_fixture;

    const KAEHLER: &str = r#"[manifold]
name = kaehler_r4
dim = 4
mu = +1
domain = [-1,1] [-1,1] [-1,1] [-1,1]
metric = row("1","0","0","0") row("0","1","0","0") row("0","0","1","0") row("0","0","0","1")
affinor = row("0","-1","0","0") row("1","0","0","0") row("0","0","0","-1") row("0","0","1","0")

[submanifold]
name = flat_cr
dim = 3
domain = [-1,1] [-1,1] [-1,1]
embedding = "u1" "u2" "u3" "0"
# optional: frame_D = row("1","0","0") row("0","1","0")
"#;

    #[test]
    fn reads_the_documented_example() {
        let (m, s) = resolve(parse_spec(KAEHLER).unwrap(), None).unwrap();
        assert_eq!(*m, *get_fixture("kaehler_r4").unwrap().ambient);
        let s = s.unwrap();
        assert_eq!((s.dim, s.frame_d.is_none()), (3, true));
    }

    #[test]
    fn export_round_trips_every_fixture() {
        for f in crate::catalog::all_fixtures() {
            let text = export_spec(&f.ambient, f.sub.as_ref());
            let (m, s) = resolve(parse_spec(&text).unwrap(), None).unwrap();
            assert_eq!(*m, *f.ambient, "{}", f.name);
            assert_eq!(s, f.sub, "{}", f.name);
        }
    }

    #[test]
    fn mu_outside_plus_minus_one_is_rejected() {
        let text = KAEHLER.replace("mu = +1", "mu = 2");
        let e = parse_spec(&text).unwrap_err();
        assert_eq!(e.message, "mu must be -1 or +1");
        assert_eq!(e.line, Some(4));
    }

    #[test]
    fn asymmetric_metric_is_rejected_at_load() {
        let text = KAEHLER.replace(r#"metric = row("1","0","0","0")"#, r#"metric = row("1","0.5","0","0")"#);
        let e = parse_spec(&text).unwrap_err();
        assert!(e.message.contains("probe point"), "{e}");
    }

    #[test]
    fn expression_errors_carry_line_and_offset() {
        let text = KAEHLER.replace(r#"embedding = "u1" "u2""#, r#"embedding = "u1" "u2 +""#);
        let e = parse_spec(&text).unwrap_err();
        assert_eq!(e.line, Some(13));
        assert!(e.message.contains("offset"), "{e}");
    }

    #[test]
    fn format_errors_carry_line_numbers() {
        let e = parse_spec("[manifold]\nname kaehler\n").unwrap_err();
        assert_eq!(e.line, Some(2));
        let e = parse_spec("[manifold]\ncolour = red\n").unwrap_err();
        assert_eq!(e.to_string(), "line 2: unknown key `colour`");
        let e = parse_spec(&KAEHLER.replace("[-1,1] [-1,1] [-1,1] [-1,1]", "[-1,1]")).unwrap_err();
        assert_eq!(e.line, Some(5));
    }

    #[test]
    fn frame_d_is_parsed_in_parameter_variables() {
        let text = KAEHLER.replace("# optional: ", "");
        let (_, s) = resolve(parse_spec(&text).unwrap(), None).unwrap();
        assert_eq!(s.unwrap().frame_d.unwrap().len(), 2);
    }

    #[test]
    fn separate_submanifold_file() {
        let main = parse_spec(KAEHLER.split("[submanifold]").next().unwrap()).unwrap();
        let sub = parse_spec(&format!("[submanifold]{}", KAEHLER.split("[submanifold]").nth(1).unwrap())).unwrap();
        let (_, s) = resolve(main.clone(), Some(sub)).unwrap();
        assert!(s.is_some());
        assert!(resolve(main.clone(), Some(main)).is_err());
    }
}
