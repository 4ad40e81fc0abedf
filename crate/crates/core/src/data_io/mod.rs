//! File formats for eigenvalue records, expansion bases, characters and
//! reports: one line-oriented text grammar, documented in
//! `docs/fixture-format.md`.

mod emit;
mod parse;

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use crate::arithmetic::{BaseField, CoeffFieldRef, PrincipalIdeal, TruncationBound};
use crate::error::{Error, Result};
use crate::fourier::{BoxIndex, TruncatedSeries};
use crate::hecke::NewformRecord;
use crate::linalg::{rank, Vector};
use crate::ray_class::{Modulus, RayCharacter, RayClassGroup};
use crate::search::{BoundDiagnostic, SearchReport};
use crate::exec::Exec;

use parse::{
    keyed_coords, parse_bool, parse_bound, parse_element, parse_raw, parse_root, parse_signs, parse_usize,
    parse_weight, Block, RawDoc,
};

pub use emit::{emit_character, emit_newforms, emit_record_table, emit_report, emit_series, emit_space, ReportFormat};

/// Cusp form data for one weight and level: eigenvalue records of newforms
/// at divisors of the level, or an explicit basis of expansions.
#[derive(Clone, Debug)]
pub struct SpaceFixture {
    pub field: BaseField,
    pub weight: crate::WeightPair,
    pub level: PrincipalIdeal,
    pub dimension: usize,
    pub bound: Option<TruncationBound>,
    pub coeff_field: CoeffFieldRef,
    pub provenance: String,
    pub content: SpaceContent,
}

#[derive(Clone, Debug)]
pub enum SpaceContent {
    Newforms(Vec<NewformRecord>),
    Basis(Vec<TruncatedSeries>),
}

impl SpaceFixture {
    pub fn is_empty(&self) -> bool {
        match &self.content {
            SpaceContent::Newforms(r) => r.is_empty(),
            SpaceContent::Basis(s) => s.is_empty(),
        }
    }

    /// Basis fixtures must have full rank at their bound; this is the
    /// truncation injectivity check.
    pub fn validate(&self) -> Result<()> {
        if let SpaceContent::Basis(series) = &self.content {
            if series.len() != self.dimension {
                return Err(Error::Validation {
                    invariant: "dimension".into(),
                    msg: format!("{} basis series for declared dimension {}", series.len(), self.dimension),
                });
            }
            if let Some(first) = series.first() {
                let index = first.index().clone();
                let vectors = series
                    .iter()
                    .map(|s| s.truncate_to(&index).map(|t| t.to_vector()))
                    .collect::<Result<Vec<Vector>>>()?;
                let r = rank(&vectors, index.len() + 1, Exec::default());
                if r < self.dimension {
                    return Err(Error::Validation {
                        invariant: "rank".into(),
                        msg: format!("basis has rank {r} < {} at bound {}", self.dimension, index.bound()),
                    });
                }
            }
        }
        Ok(())
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.display().to_string(), msg: e.to_string() })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io { path: path.display().to_string(), msg: e.to_string() })
}

/// Named characters of a document; `trivial` is reserved.
struct Characters(HashMap<String, RayCharacter>);

impl Characters {
    fn collect(doc: &RawDoc) -> Result<Self> {
        let mut map = HashMap::new();
        for b in doc.blocks.iter().filter(|b| b.kind == "character") {
            let name = b.name.clone().ok_or_else(|| b.err("characters must be named"))?;
            if name == "trivial" || map.contains_key(&name) {
                return Err(b.err(format!("character name `{name}` reused")));
            }
            map.insert(name, character_block(doc, b)?);
        }
        Ok(Characters(map))
    }

    fn get(&self, b: &Block) -> Result<Option<RayCharacter>> {
        let l = b.one("character")?;
        if l.rest == "trivial" {
            return Ok(None);
        }
        self.0.get(&l.rest).cloned().map(Some).ok_or_else(|| l.err(format!("unknown character `{}`", l.rest)))
    }
}

fn character_block(doc: &RawDoc, b: &Block) -> Result<RayCharacter> {
    b.check_keys(&["modulus", "value", "order"])?;
    let field = &doc.field;
    let m = b.one("modulus")?;
    let parts: Vec<&str> = m.rest.split_whitespace().collect();
    let (gen, inf) = match parts.as_slice() {
        [g] => (*g, [false, false]),
        [g, "inf", a, c] => (*g, [*a == "1", *c == "1"]),
        _ => return Err(m.err("expected `GEN` or `GEN inf I1 I2`")),
    };
    let finite = field.ideal(&parse_element(m, field, gen)?).map_err(|e| m.err(e.to_string()))?;
    let group = RayClassGroup::new(field, &Modulus::new(finite, inf)).map_err(|e| m.err(e.to_string()))?;
    let mut values = Vec::new();
    for l in b.all("value") {
        let p: Vec<&str> = l.rest.split_whitespace().collect();
        let [e, s, v] = p.as_slice() else { return Err(l.err("expected `ELEM SIGNS FRACTION`")) };
        values.push((parse_element(l, field, e)?, parse_signs(l, s)?, parse_root(l, v)?));
    }
    let chi = RayCharacter::from_values(group, &values)?;
    if let Some(l) = b.opt("order")? {
        if parse_usize(l, &l.rest)? as u64 != chi.order() {
            return Err(Error::Validation { invariant: "character order".into(), msg: format!("line {}: declared {}", l.no, l.rest) });
        }
    }
    Ok(chi)
}

fn newform_block(doc: &RawDoc, chars: &Characters, b: &Block) -> Result<NewformRecord> {
    b.check_keys(&["level", "weight", "character", "provenance", "eigen"])?;
    let field = &doc.field;
    let k = &doc.coeff_field;
    let l = b.one("level")?;
    let level = field.ideal(&parse_element(l, field, &l.rest)?).map_err(|e| l.err(e.to_string()))?;
    let weight = parse_weight(b.one("weight")?)?;
    let character = chars.get(b)?;
    let provenance = b.one("provenance")?.rest.clone();
    if provenance.is_empty() {
        return Err(b.err("empty provenance"));
    }
    let mut eigenvalues = BTreeMap::new();
    for l in b.all("eigen") {
        let (head, value) = keyed_coords(l, k)?;
        let mut parts = head.split_whitespace();
        let gen = parts.next().ok_or_else(|| l.err("missing generator"))?;
        let ideal = field.ideal(&parse_element(l, field, gen)?).map_err(|e| l.err(e.to_string()))?;
        match (parts.next(), parts.next(), parts.next()) {
            (None, None, None) => {}
            (Some("norm"), Some(n), None) => {
                if parse_usize(l, n)? as u64 != ideal.norm() {
                    return Err(Error::Validation {
                        invariant: "declared norm".into(),
                        msg: format!("line {}: {ideal} has norm {}, not {n}", l.no, ideal.norm()),
                    });
                }
            }
            _ => return Err(l.err("expected `GEN [norm N] : coords`")),
        }
        if !ideal.is_unit_ideal() && !field.is_prime_ideal(&ideal) {
            return Err(Error::Validation { invariant: "prime keys".into(), msg: format!("line {}: {ideal} is not prime", l.no) });
        }
        if eigenvalues.insert(ideal.clone(), value).is_some() {
            return Err(Error::Validation { invariant: "distinct primes".into(), msg: format!("line {}: {ideal} repeated", l.no) });
        }
    }
    match eigenvalues.get(&field.unit_ideal()) {
        Some(c) if c.is_one() => {}
        _ => return Err(Error::Validation { invariant: "c((1)) = 1".into(), msg: format!("record at line {}", b.begin) }),
    }
    Ok(NewformRecord { field: field.clone(), level, weight, character, coeff_field: k.clone(), eigenvalues, provenance })
}

fn series_block(doc: &RawDoc, chars: &Characters, b: &Block) -> Result<TruncatedSeries> {
    b.check_keys(&["bound", "weight", "character", "constant", "c"])?;
    let field = &doc.field;
    let k = &doc.coeff_field;
    let bound = parse_bound(b.one("bound")?, field)?;
    let index = BoxIndex::new(field, &bound);
    let weight = parse_weight(b.one("weight")?)?;
    let character = chars.get(b)?;
    let cl = b.one("constant")?;
    let (head, constant) = keyed_coords(cl, k)?;
    if !head.is_empty() {
        return Err(cl.err("expected `constant : coords`"));
    }
    let mut coeffs = vec![k.zero(); index.len()];
    let mut seen = vec![false; index.len()];
    for l in b.all("c") {
        let (head, value) = keyed_coords(l, k)?;
        let alpha = parse_element(l, field, head)?;
        let i = index.position(&alpha).ok_or_else(|| l.err(format!("{alpha} is not a box index")))?;
        if std::mem::replace(&mut seen[i], true) {
            return Err(l.err(format!("{alpha} repeated")));
        }
        coeffs[i] = value;
    }
    TruncatedSeries::from_parts(&index, k, weight, character, constant, coeffs)
}

pub fn parse_newforms(text: &str) -> Result<Vec<NewformRecord>> {
    let doc = parse_raw(text)?;
    let chars = Characters::collect(&doc)?;
    doc.blocks.iter().filter(|b| b.kind == "newform").map(|b| newform_block(&doc, &chars, b)).collect()
}

pub fn load_newforms(path: &Path) -> Result<Vec<NewformRecord>> {
    parse_newforms(&read(path)?)
}

pub fn parse_series(text: &str) -> Result<Vec<TruncatedSeries>> {
    let doc = parse_raw(text)?;
    let chars = Characters::collect(&doc)?;
    doc.blocks.iter().filter(|b| b.kind == "series").map(|b| series_block(&doc, &chars, b)).collect()
}

pub fn load_series(path: &Path) -> Result<Vec<TruncatedSeries>> {
    parse_series(&read(path)?)
}

/// The first character block of a document.
pub fn parse_character(text: &str) -> Result<RayCharacter> {
    let doc = parse_raw(text)?;
    let b = doc.blocks.iter().find(|b| b.kind == "character").ok_or(Error::Parse { line: 1, msg: "no character block".into() })?;
    character_block(&doc, b)
}

pub fn load_character(path: &Path) -> Result<RayCharacter> {
    parse_character(&read(path)?)
}

pub fn parse_space(text: &str) -> Result<SpaceFixture> {
    let doc = parse_raw(text)?;
    let chars = Characters::collect(&doc)?;
    let mut spaces = doc.blocks.iter().filter(|b| b.kind == "space");
    let b = spaces.next().ok_or(Error::Parse { line: 1, msg: "no space block".into() })?;
    if let Some(extra) = spaces.next() {
        return Err(extra.err("one space per document"));
    }
    b.check_keys(&["weight", "level", "dimension", "bound", "provenance", "form"])?;
    let field = &doc.field;
    let weight = parse_weight(b.one("weight")?)?;
    let l = b.one("level")?;
    let level = field.ideal(&parse_element(l, field, &l.rest)?).map_err(|e| l.err(e.to_string()))?;
    let dl = b.one("dimension")?;
    let dimension = parse_usize(dl, &dl.rest)?;
    let bound = b.opt("bound")?.map(|l| parse_bound(l, field)).transpose()?;
    let provenance = b.one("provenance")?.rest.clone();
    let fl = b.one("form")?;
    let content = match fl.rest.as_str() {
        "newforms" => {
            let records = doc
                .blocks
                .iter()
                .filter(|b| b.kind == "newform")
                .map(|b| newform_block(&doc, &chars, b))
                .collect::<Result<Vec<_>>>()?;
            if let Some(r) = records.iter().find(|r| r.weight != weight) {
                return Err(Error::Validation { invariant: "space weight".into(), msg: format!("record of weight {}", r.weight) });
            }
            SpaceContent::Newforms(records)
        }
        "basis" => {
            let series = doc
                .blocks
                .iter()
                .filter(|b| b.kind == "series")
                .map(|b| series_block(&doc, &chars, b))
                .collect::<Result<Vec<_>>>()?;
            if let Some(s) = series.iter().find(|s| s.weight() != weight) {
                return Err(Error::Validation { invariant: "space weight".into(), msg: format!("series of weight {}", s.weight()) });
            }
            SpaceContent::Basis(series)
        }
        other => return Err(fl.err(format!("unknown form `{other}`"))),
    };
    let fixture = SpaceFixture {
        field: field.clone(),
        weight,
        level,
        dimension,
        bound,
        coeff_field: doc.coeff_field.clone(),
        provenance,
        content,
    };
    fixture.validate()?;
    Ok(fixture)
}

pub fn load_space(path: &Path) -> Result<SpaceFixture> {
    parse_space(&read(path)?)
}

/// Reads a structured report back.
pub fn parse_report(text: &str) -> Result<SearchReport> {
    let doc = parse_raw(text)?;
    let chars = Characters::collect(&doc)?;
    let b = doc.blocks.iter().find(|b| b.kind == "report").ok_or(Error::Parse { line: 1, msg: "no report block".into() })?;
    b.check_keys(&["weight", "level", "character", "hecke_prime", "dim_v", "dim_v2", "cm_bound", "stable", "provenance", "diag", "candidate"])?;
    let field = &doc.field;
    let num = |key: &str| -> Result<usize> {
        let l = b.one(key)?;
        parse_usize(l, &l.rest)
    };
    let ideal = |key: &str| -> Result<PrincipalIdeal> {
        let l = b.one(key)?;
        field.ideal(&parse_element(l, field, &l.rest)?).map_err(|e| l.err(e.to_string()))
    };
    let character = chars.get(b)?.ok_or_else(|| b.err("report character must be named"))?;
    let series: HashMap<String, TruncatedSeries> = doc
        .blocks
        .iter()
        .filter(|x| x.kind == "series")
        .map(|x| Ok((x.name.clone().ok_or_else(|| x.err("candidate series must be named"))?, series_block(&doc, &chars, x)?)))
        .collect::<Result<_>>()?;
    let mut diagnostics = Vec::new();
    for l in b.all("diag") {
        let p: Vec<&str> = l.rest.split_whitespace().collect();
        let [b1, b2, v, v2] = p.as_slice() else { return Err(l.err("expected `B1 B2 DIM_V DIM_V2`")) };
        let bound = TruncationBound::from_elements(parse_element(l, field, b1)?, parse_element(l, field, b2)?)?;
        diagnostics.push(BoundDiagnostic { bound, dim_v: parse_usize(l, v)?, dim_v2: parse_usize(l, v2)? });
    }
    let candidates = b
        .all("candidate")
        .map(|l| series.get(&l.rest).cloned().ok_or_else(|| l.err(format!("unknown series `{}`", l.rest))))
        .collect::<Result<Vec<_>>>()?;
    let report = SearchReport {
        weight: parse_weight(b.one("weight")?)?,
        level: ideal("level")?,
        character,
        hecke_prime: ideal("hecke_prime")?,
        dim_v: num("dim_v")?,
        dim_v2: num("dim_v2")?,
        cm_bound: num("cm_bound")?,
        candidates,
        diagnostics,
        provenance: b.one("provenance")?.rest.clone(),
    };
    let stable = parse_bool(b.one("stable")?)?;
    if stable != report.stable() {
        return Err(Error::Validation { invariant: "stability flag".into(), msg: "disagrees with diagnostics".into() });
    }
    Ok(report)
}
