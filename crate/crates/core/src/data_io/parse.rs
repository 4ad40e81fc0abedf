//! Tokenizing the line format into located blocks, and the scalar
//! grammars shared by every block kind.

use num_bigint::BigInt;

use crate::arithmetic::{BaseField, CoeffElement, CoeffField, CoeffFieldRef, FieldElement, TruncationBound};
use crate::error::{Error, Result};
use crate::ray_class::RootOfUnity;
use crate::weight::WeightPair;
use crate::Rational;

pub(crate) const MAGIC: &str = "pw1 1";

#[derive(Clone, Debug)]
pub(crate) struct Line {
    pub no: usize,
    pub key: String,
    pub rest: String,
}

impl Line {
    pub fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { line: self.no, msg: format!("{}: {}", self.key, msg.into()) }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Block {
    pub kind: String,
    pub name: Option<String>,
    pub begin: usize,
    pub lines: Vec<Line>,
}

impl Block {
    pub fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { line: self.begin, msg: format!("{} block: {}", self.kind, msg.into()) }
    }

    /// The single line with the given key.
    pub fn one(&self, key: &str) -> Result<&Line> {
        let mut it = self.lines.iter().filter(|l| l.key == key);
        let first = it.next().ok_or_else(|| self.err(format!("missing `{key}`")))?;
        if let Some(dup) = it.next() {
            return Err(dup.err("repeated"));
        }
        Ok(first)
    }

    pub fn opt(&self, key: &str) -> Result<Option<&Line>> {
        match self.lines.iter().any(|l| l.key == key) {
            true => self.one(key).map(Some),
            false => Ok(None),
        }
    }

    pub fn all<'a>(&'a self, key: &'a str) -> impl Iterator<Item = &'a Line> + 'a {
        self.lines.iter().filter(move |l| l.key == key)
    }

    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        match self.lines.iter().find(|l| !allowed.contains(&l.key.as_str())) {
            Some(l) => Err(l.err("unknown key")),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct RawDoc {
    pub field: BaseField,
    pub coeff_field: CoeffFieldRef,
    pub blocks: Vec<Block>,
}

fn split(no: usize, text: &str) -> Option<Line> {
    let body = text.split('#').next().unwrap_or("").trim();
    if body.is_empty() {
        return None;
    }
    let (key, rest) = match body.split_once(char::is_whitespace) {
        Some((k, r)) => (k, r.trim()),
        None => (body, ""),
    };
    Some(Line { no, key: key.to_string(), rest: rest.to_string() })
}

pub(crate) fn parse_raw(text: &str) -> Result<RawDoc> {
    let mut lines = text.lines().enumerate().filter_map(|(i, t)| split(i + 1, t));
    let head = lines.next().ok_or(Error::Parse { line: 1, msg: "empty document".into() })?;
    if format!("{} {}", head.key, head.rest) != MAGIC {
        return Err(head.err(format!("expected header `{MAGIC}`")));
    }
    let mut field = None;
    let mut radicands: Option<Vec<i64>> = None;
    let mut blocks = Vec::new();
    let mut open: Option<Block> = None;
    for l in lines {
        match (l.key.as_str(), open.as_mut()) {
            ("begin", None) => {
                if field.is_none() {
                    return Err(l.err("`field` must precede the first block"));
                }
                let mut parts = l.rest.split_whitespace();
                let kind = parts.next().ok_or_else(|| l.err("missing block kind"))?.to_string();
                let name = parts.next().map(str::to_string);
                if parts.next().is_some() {
                    return Err(l.err("trailing tokens"));
                }
                open = Some(Block { kind, name, begin: l.no, lines: Vec::new() });
            }
            ("begin", Some(_)) => return Err(l.err("nested block")),
            ("end", Some(b)) => {
                if l.rest != b.kind {
                    return Err(l.err(format!("closes `{}`", b.kind)));
                }
                blocks.push(open.take().expect("open block"));
            }
            ("end", None) => return Err(l.err("no open block")),
            (_, Some(b)) => b.lines.push(l),
            ("field", None) => {
                let d = parse_int(&l, &l.rest)?;
                field = Some(BaseField::new(d).map_err(|e| l.err(e.to_string()))?);
            }
            ("radicands", None) => {
                let rs = l.rest.split_whitespace().map(|t| parse_int(&l, t)).collect::<Result<Vec<_>>>()?;
                radicands = Some(rs);
            }
            (_, None) => return Err(l.err("unknown header key")),
        }
    }
    if let Some(b) = open {
        return Err(b.err("not closed"));
    }
    let field = field.ok_or(Error::Parse { line: 1, msg: "missing `field`".into() })?;
    let coeff_field = CoeffField::new(radicands.unwrap_or_default())
        .map_err(|e| Error::Parse { line: 1, msg: e.to_string() })?;
    Ok(RawDoc { field, coeff_field, blocks })
}

pub(crate) fn parse_int(l: &Line, t: &str) -> Result<i64> {
    t.parse::<i64>().map_err(|_| l.err(format!("`{t}` is not an integer")))
}

pub(crate) fn parse_usize(l: &Line, t: &str) -> Result<usize> {
    t.parse::<usize>().map_err(|_| l.err(format!("`{t}` is not a nonnegative integer")))
}

pub(crate) fn parse_rational(l: &Line, t: &str) -> Result<Rational> {
    let bad = || l.err(format!("`{t}` is not a rational"));
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n, d),
        None => (t, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d == BigInt::from(0) {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

/// `x` for a rational, or `a,b` for `(a + b√d)/2`.
pub(crate) fn parse_element(l: &Line, field: &BaseField, t: &str) -> Result<FieldElement> {
    match t.split_once(',') {
        None => Ok(field.element(parse_rational(l, t)?, Rational::from_integer(0.into()))),
        Some((a, b)) => {
            let half = Rational::new(1.into(), 2.into());
            Ok(field.element(parse_rational(l, a)? * &half, parse_rational(l, b)? * half))
        }
    }
}

pub(crate) fn parse_coords(l: &Line, k: &CoeffFieldRef, t: &str) -> Result<CoeffElement> {
    let coords = t.split_whitespace().map(|x| parse_rational(l, x)).collect::<Result<Vec<_>>>()?;
    if coords.len() != k.degree() {
        return Err(Error::Validation {
            invariant: "coordinate length".into(),
            msg: format!("line {}: {} coordinates for degree {}", l.no, coords.len(), k.degree()),
        });
    }
    k.element(coords)
}

/// `KEY : coords`, returning the key text.
pub(crate) fn keyed_coords<'a>(l: &'a Line, k: &CoeffFieldRef) -> Result<(&'a str, CoeffElement)> {
    let (head, tail) = l.rest.split_once(':').ok_or_else(|| l.err("expected `:` before coordinates"))?;
    Ok((head.trim(), parse_coords(l, k, tail)?))
}

pub(crate) fn parse_weight(l: &Line) -> Result<WeightPair> {
    let v = l.rest.split_whitespace().map(|t| parse_int(l, t)).collect::<Result<Vec<_>>>()?;
    match v.as_slice() {
        [k1, k2] => Ok(WeightPair::new(*k1, *k2)),
        _ => Err(l.err("expected two integers")),
    }
}

pub(crate) fn parse_bound(l: &Line, field: &BaseField) -> Result<TruncationBound> {
    let v: Vec<&str> = l.rest.split_whitespace().collect();
    match v.as_slice() {
        [a, b] => TruncationBound::from_elements(parse_element(l, field, a)?, parse_element(l, field, b)?)
            .map_err(|e| l.err(e.to_string())),
        _ => Err(l.err("expected two bounds")),
    }
}

pub(crate) fn parse_signs(l: &Line, t: &str) -> Result<[bool; 2]> {
    let c: Vec<char> = t.chars().collect();
    let one = |ch: char| match ch {
        '+' => Ok(false),
        '-' => Ok(true),
        _ => Err(l.err(format!("bad sign pattern `{t}`"))),
    };
    match c.as_slice() {
        [a, b] => Ok([one(*a)?, one(*b)?]),
        _ => Err(l.err(format!("bad sign pattern `{t}`"))),
    }
}

pub(crate) fn parse_root(l: &Line, t: &str) -> Result<RootOfUnity> {
    let q = parse_rational(l, t)?;
    let n: i64 = q.numer().try_into().map_err(|_| l.err("root of unity too large"))?;
    let d: i64 = q.denom().try_into().map_err(|_| l.err("root of unity too large"))?;
    Ok(RootOfUnity::from_fraction(n, d))
}

pub(crate) fn parse_bool(l: &Line) -> Result<bool> {
    match l.rest.as_str() {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(l.err("expected true or false")),
    }
}
