//! Curve files, inline curve strings, quadratic-field elements and points
//! as text.
//!
//! A curve file has one record per line,
//!
//! ```text
//! # label a1 a2 a3 a4 a6 N w [min2]
//! 256b1 0 0 0 -2 0 256 -1 min2
//! ```
//!
//! with `w` one of `+1`, `-1` or `?`. Inline curves use the same data
//! separated by commas, e.g. `0,0,0,-2,0,N=256,w=-1`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::curves::{CurveError, CurveQ, KElem, Point, PointK, QuadExt, RootNumber};

/// A parse failure with a 1-based position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {reason}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub reason: String,
}

impl ParseError {
    fn at(line: usize, column: usize, reason: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveRecord {
    pub label: String,
    pub a: [BigInt; 5],
    pub conductor: u64,
    pub root_number: RootNumber,
    pub minimal_at_2: bool,
}

impl CurveRecord {
    pub fn to_curve(&self) -> Result<CurveQ, CurveError> {
        Ok(CurveQ::new(self.a.clone())?
            .with_conductor(self.conductor)
            .with_root_number(self.root_number)
            .with_label(self.label.clone())
            .with_minimal_at_2(self.minimal_at_2))
    }
}

impl fmt::Display for CurveRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a1, a2, a3, a4, a6] = &self.a;
        write!(
            f,
            "{} {a1} {a2} {a3} {a4} {a6} {} {}",
            self.label, self.conductor, self.root_number
        )?;
        if self.minimal_at_2 {
            f.write_str(" min2")?;
        }
        Ok(())
    }
}

fn parse_root_number(s: &str) -> Option<RootNumber> {
    match s {
        "+1" | "1" => Some(RootNumber::Plus),
        "-1" => Some(RootNumber::Minus),
        "?" => Some(RootNumber::Unknown),
        _ => None,
    }
}

/// Whitespace-separated tokens with their 1-based starting columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter()
        .map(|(byte, t)| (line[..byte].chars().count() + 1, t))
        .collect()
}

fn parse_line(lineno: usize, line: &str) -> Result<Option<CurveRecord>, ParseError> {
    let content = line.split('#').next().unwrap_or("");
    let toks = tokens(content);
    if toks.is_empty() {
        return Ok(None);
    }
    let end_col = content.trim_end().chars().count() + 1;
    let names = ["label", "a1", "a2", "a3", "a4", "a6", "N", "w"];
    if toks.len() < names.len() {
        return Err(ParseError::at(
            lineno,
            end_col,
            format!("missing field {}", names[toks.len()]),
        ));
    }
    if toks.len() > 9 {
        return Err(ParseError::at(lineno, toks[9].0, "unexpected extra field"));
    }
    let mut a: [BigInt; 5] = Default::default();
    for (i, slot) in a.iter_mut().enumerate() {
        let (col, t) = toks[i + 1];
        *slot = BigInt::from_str(t)
            .map_err(|_| ParseError::at(lineno, col, format!("malformed integer {t:?} for {}", names[i + 1])))?;
    }
    let (col, t) = toks[6];
    let conductor = u64::from_str(t)
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| ParseError::at(lineno, col, format!("conductor must be a positive integer, got {t:?}")))?;
    let (col, t) = toks[7];
    let root_number = parse_root_number(t)
        .ok_or_else(|| ParseError::at(lineno, col, format!("root number must be +1, -1 or ?, got {t:?}")))?;
    let minimal_at_2 = match toks.get(8) {
        None => false,
        Some((_, "min2")) => true,
        Some(&(col, t)) => return Err(ParseError::at(lineno, col, format!("unknown flag {t:?}"))),
    };
    let rec = CurveRecord {
        label: toks[0].1.to_string(),
        a,
        conductor,
        root_number,
        minimal_at_2,
    };
    rec.to_curve()
        .map_err(|e| ParseError::at(lineno, toks[1].0, e.to_string()))?;
    Ok(Some(rec))
}

/// Parses curve-file text; `#` starts a comment.
pub fn parse_curve_file(text: &str) -> Result<Vec<CurveRecord>, ParseError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if let Some(r) = parse_line(i + 1, line)? {
            out.push(r);
        }
    }
    Ok(out)
}

#[derive(Debug, Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    File { path: String, source: ParseError },
    #[error("{0}")]
    Inline(String),
    #[error("no curve labelled {label} in {path}")]
    MissingLabel { label: String, path: String },
}

pub fn read_curve_file(path: impl AsRef<Path>) -> Result<Vec<CurveRecord>, InputError> {
    let p = path.as_ref();
    let shown = p.display().to_string();
    let text = std::fs::read_to_string(p).map_err(|source| InputError::Io {
        path: shown.clone(),
        source,
    })?;
    parse_curve_file(&text).map_err(|source| InputError::File { path: shown, source })
}

/// `a1,a2,a3,a4,a6[,N=..][,w=..][,min2][,label=..]`.
pub fn parse_inline_curve(s: &str) -> Result<CurveRecord, InputError> {
    let bad = |m: String| InputError::Inline(format!("inline curve {s:?}: {m}"));
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() < 5 {
        return Err(bad("expected five coefficients".into()));
    }
    let mut a: [BigInt; 5] = Default::default();
    for (slot, t) in a.iter_mut().zip(&parts) {
        *slot = BigInt::from_str(t).map_err(|_| bad(format!("malformed integer {t:?}")))?;
    }
    let mut rec = CurveRecord {
        label: String::new(),
        a,
        conductor: 0,
        root_number: RootNumber::Unknown,
        minimal_at_2: false,
    };
    for t in &parts[5..] {
        match t.split_once('=') {
            Some(("N", v)) => {
                rec.conductor = v
                    .parse()
                    .ok()
                    .filter(|&n: &u64| n >= 1)
                    .ok_or_else(|| bad(format!("bad conductor {v:?}")))?
            }
            Some(("w", v)) => {
                rec.root_number = parse_root_number(v).ok_or_else(|| bad(format!("bad root number {v:?}")))?
            }
            Some(("label", v)) => rec.label = v.to_string(),
            None if *t == "min2" => rec.minimal_at_2 = true,
            _ => return Err(bad(format!("unknown field {t:?}"))),
        }
    }
    if rec.conductor == 0 {
        return Err(bad("missing N=".into()));
    }
    if rec.label.is_empty() {
        rec.label = format!("[{}]", parts[..5].join(","));
    }
    rec.to_curve().map_err(|e| bad(e.to_string()))?;
    Ok(rec)
}

/// `label@path` looks the label up in a curve file; anything else is inline.
pub fn resolve_curve(spec: &str) -> Result<CurveRecord, InputError> {
    match spec.split_once('@') {
        Some((label, path)) => read_curve_file(path)?
            .into_iter()
            .find(|r| r.label == label)
            .ok_or_else(|| InputError::MissingLabel {
                label: label.into(),
                path: path.into(),
            }),
        None => parse_inline_curve(spec),
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (BigInt::from_str(n).ok()?, BigInt::from_str(d).ok()?),
        None => (BigInt::from_str(s).ok()?, BigInt::one()),
    };
    (!d.is_zero()).then(|| BigRational::new(n, d))
}

/// `a/b+c/d*w`, where `w` is `sqrt(D)` of `field`. Pure rationals and
/// forms such as `w`, `-w`, `3*w`, `1/2-w/2` are accepted.
pub fn parse_kelem(s: &str, field: QuadExt) -> Result<KElem, String> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty element".into());
    }
    let err = || format!("malformed element {s:?} (expected a/b+c/d*w)");
    // split into signed terms at + or - not at the start and not after '/' or '*'
    let bytes = s.as_bytes();
    let mut terms = Vec::new();
    let mut start = 0;
    for i in 1..bytes.len() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'/' | b'*') {
            terms.push(&s[start..i]);
            start = i;
        }
    }
    terms.push(&s[start..]);
    let (mut a, mut b) = (BigRational::zero(), BigRational::zero());
    for t in terms {
        let (sign, body) = match t.strip_prefix('-') {
            Some(r) => (-BigRational::one(), r),
            None => (BigRational::one(), t.strip_prefix('+').unwrap_or(t)),
        };
        if body.contains('w') {
            let coeff = if body == "w" {
                Some(BigRational::one())
            } else if let Some(c) = body.strip_suffix("*w") {
                parse_rational(c)
            } else if let Some(rest) = body.strip_prefix("w/") {
                parse_rational(&format!("1/{rest}"))
            } else if let Some((c, d)) = body.split_once("*w/") {
                Some(parse_rational(c).ok_or_else(err)? / parse_rational(d).ok_or_else(err)?)
            } else {
                None
            };
            b += sign * coeff.ok_or_else(err)?;
        } else {
            a += sign * parse_rational(body).ok_or_else(err)?;
        }
    }
    Ok(KElem::new(a, b, field))
}

/// `x,y` (optionally parenthesized) with coordinates in `field`.
pub fn parse_point(s: &str, field: QuadExt) -> Result<PointK, String> {
    let t = s.trim();
    let t = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')).unwrap_or(t);
    if t == "O" || t == "inf" {
        return Ok(Point::Infinity);
    }
    let (x, y) = t
        .split_once(',')
        .ok_or_else(|| format!("point {s:?} must be x,y"))?;
    Ok(Point::Affine(parse_kelem(x, field)?, parse_kelem(y, field)?))
}

/// A `# params:` header line listing `key=value` pairs in the given order.
pub fn params_line(pairs: &[(&str, String)]) -> String {
    let body: Vec<String> = pairs.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("# params: {}", body.join(" "))
}

/// Joins fields with tabs.
pub fn tsv<I, T>(fields: I) -> String
where
    I: IntoIterator<Item = T>,
    T: fmt::Display,
{
    fields
        .into_iter()
        .map(|f| f.to_string())
        .collect::<Vec<_>>()
        .join("\t")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const FILE: &str = "\
# Cremona-style records
256b1 0 0 0 -2 0 256 -1 min2
256a1 0 1 0 -3 1 256 -1 min2

11a1  0 -1 1 -10 -20 11 +1   # trailing comment
";

    #[test]
    fn parses_file() {
        let recs = parse_curve_file(FILE).unwrap();
        assert_eq!(recs.len(), 3);
        let e = recs[0].to_curve().unwrap();
        assert_eq!(e.a4(), &BigInt::from(-2));
        assert_eq!(e.conductor(), Some(256));
        assert_eq!(e.root_number(), RootNumber::Minus);
        assert!(e.minimal_at_2_flag());
        assert_eq!(recs[1].a[1], BigInt::from(1));
        assert!(!recs[2].minimal_at_2);
        assert_eq!(recs[2].to_string(), "11a1 0 -1 1 -10 -20 11 +1");
    }

    #[test]
    fn positioned_errors() {
        let e = parse_curve_file("bad 0 0 0 0 0 11 ?").unwrap_err();
        assert_eq!((e.line, e.column), (1, 5));
        assert!(e.reason.contains("singular"), "{e}");
        let e = parse_curve_file("\n\nx 0 0 0 1x 0 11 ?").unwrap_err();
        assert_eq!((e.line, e.column), (3, 9));
        let e = parse_curve_file("x 0 0 0 1 0 11").unwrap_err();
        assert!(e.reason.contains("missing field w"));
        assert_eq!(e.column, 15);
        let e = parse_curve_file("x 0 0 0 1 0 0 ?").unwrap_err();
        assert_eq!(e.column, 13);
        let e = parse_curve_file("x 0 0 0 1 0 11 +2").unwrap_err();
        assert_eq!(e.column, 16);
        let e = parse_curve_file("x 0 0 0 1 0 11 ? min3").unwrap_err();
        assert_eq!(e.column, 18);
    }

    #[test]
    fn inline_curves() {
        let r = parse_inline_curve("0,0,0,-2,0,N=256,w=-1").unwrap();
        assert_eq!(r.conductor, 256);
        assert_eq!(r.root_number, RootNumber::Minus);
        assert_eq!(r.label, "[0,0,0,-2,0]");
        let r = parse_inline_curve("0,1,0,-3,1,N=256,w=-1,min2,label=256a1").unwrap();
        assert!(r.minimal_at_2);
        assert_eq!(r.label, "256a1");
        assert!(parse_inline_curve("0,0,0,-2,0").is_err());
        assert!(parse_inline_curve("0,0,0,0,0,N=1").is_err());
        assert!(parse_inline_curve("0,0,0,-2,0,N=256,x=1").is_err());
    }

    #[test]
    fn elements() {
        let k = QuadExt::new(-7).unwrap();
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        let e = parse_kelem("3/2+1/2*w", k).unwrap();
        assert_eq!((e.a.clone(), e.b.clone()), (q(3, 2), q(1, 2)));
        let e = parse_kelem("-1", k).unwrap();
        assert!(e.is_rational() && e.a == q(-1, 1));
        let e = parse_kelem("-w", k).unwrap();
        assert_eq!(e.b, q(-1, 1));
        let e = parse_kelem("1/2-w/2", k).unwrap();
        assert_eq!(e.b, q(-1, 2));
        let e = parse_kelem("-3/4*w+5", k).unwrap();
        assert_eq!((e.a.clone(), e.b.clone()), (q(5, 1), q(-3, 4)));
        assert!(parse_kelem("1/0", k).is_err());
        assert!(parse_kelem("x", k).is_err());
        let p = parse_point("(-1,-1)", k).unwrap();
        assert_eq!(p.x().unwrap(), &KElem::from_int(-1));
        assert!(parse_point("1", k).is_err());
    }

    #[test]
    fn output_helpers() {
        assert_eq!(tsv(["a", "b"]), "a\tb");
        assert_eq!(
            params_line(&[("K", "-7".into()), ("bound", "400".into())]),
            "# params: K=-7 bound=400"
        );
    }

    proptest! {
        #[test]
        fn record_round_trip(a in proptest::array::uniform5(-1000i64..1000), n in 1u64..1_000_000, w in 0usize..3, min2: bool) {
            let rec = CurveRecord {
                label: "c".into(),
                a: a.map(BigInt::from),
                conductor: n,
                root_number: [RootNumber::Plus, RootNumber::Minus, RootNumber::Unknown][w],
                minimal_at_2: min2,
            };
            prop_assume!(rec.to_curve().is_ok());
            let line = rec.to_string();
            let back = parse_curve_file(&line).unwrap();
            prop_assert_eq!(&back[0], &rec);
            prop_assert_eq!(back[0].to_string(), line);
        }

        #[test]
        fn kelem_round_trip(a in -500i64..500, b in 1i64..50, c in -500i64..500, d in 1i64..50) {
            let k = QuadExt::new(-7).unwrap();
            let x = KElem::new(BigRational::new(a.into(), b.into()), BigRational::new(c.into(), d.into()), k);
            prop_assert_eq!(parse_kelem(&x.to_string(), k).unwrap(), x);
        }
    }
}
