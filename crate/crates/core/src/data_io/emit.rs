//! Canonical serialization: equal values produce byte-identical text.

use std::fmt::Write;

use crate::arithmetic::{BaseField, CoeffElement, CoeffField, CoeffFieldRef, FieldElement, TruncationBound};
use crate::error::Result;
use crate::fourier::TruncatedSeries;
use crate::hecke::NewformRecord;
use crate::ray_class::RayCharacter;
use crate::search::SearchReport;
use crate::Rational;

use super::parse::MAGIC;
use super::{SpaceContent, SpaceFixture};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    /// Human-readable summary.
    Table,
    /// The line format, readable by `parse_report`.
    Structured,
}

fn rat(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub(crate) fn element(e: &FieldElement) -> String {
    if e.y() == &Rational::from_integer(0.into()) {
        return rat(e.x());
    }
    let two = Rational::from_integer(2.into());
    format!("{},{}", rat(&(e.x() * &two)), rat(&(e.y() * two)))
}

fn coords(c: &CoeffElement) -> String {
    c.coords().iter().map(rat).collect::<Vec<_>>().join(" ")
}

fn bound(b: &TruncationBound) -> String {
    format!("{} {}", element(b.b1()), element(b.b2()))
}

fn signs(s: [bool; 2]) -> String {
    s.iter().map(|&n| if n { '-' } else { '+' }).collect()
}

/// Document writer that names characters on first use.
struct Writer {
    field: BaseField,
    k: CoeffFieldRef,
    characters: Vec<RayCharacter>,
    body: String,
}

impl Writer {
    fn new(field: &BaseField, k: &CoeffFieldRef) -> Self {
        Writer { field: field.clone(), k: k.clone(), characters: Vec::new(), body: String::new() }
    }

    fn character_name(&mut self, c: Option<&RayCharacter>) -> String {
        let Some(c) = c else { return "trivial".into() };
        let i = match self.characters.iter().position(|x| x == c) {
            Some(i) => i,
            None => {
                self.characters.push(c.clone());
                self.characters.len() - 1
            }
        };
        format!("chi{i}")
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.body.push_str(s.as_ref());
        self.body.push('\n');
    }

    fn series(&mut self, name: &str, s: &TruncatedSeries) -> Result<()> {
        let s = s.embed_coeffs(&self.k)?;
        let ch = self.character_name(s.character());
        self.line(format!("begin series {name}"));
        self.line(format!("bound {}", bound(s.bound())));
        self.line(format!("weight {} {}", s.weight().k1, s.weight().k2));
        self.line(format!("character {ch}"));
        self.line(format!("constant : {}", coords(s.constant())));
        for (a, c) in s.index().elements().iter().zip(s.coeffs()) {
            if !c.is_zero() {
                self.line(format!("c {} : {}", element(a), coords(c)));
            }
        }
        self.line("end series");
        Ok(())
    }

    fn newform(&mut self, r: &NewformRecord) -> Result<()> {
        let ch = self.character_name(r.character.as_ref());
        self.line("begin newform");
        self.line(format!("level {}", element(r.level.gen())));
        self.line(format!("weight {} {}", r.weight.k1, r.weight.k2));
        self.line(format!("character {ch}"));
        self.line(format!("provenance {}", r.provenance));
        for (p, c) in &r.eigenvalues {
            let c = self.k.embed(c)?;
            self.line(format!("eigen {} norm {} : {}  # {c}", element(p.gen()), p.norm(), coords(&c)));
        }
        self.line("end newform");
        Ok(())
    }

    fn finish(self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{MAGIC}");
        let _ = writeln!(out, "field {}", self.field.d());
        if !self.k.radicands().is_empty() {
            let r: Vec<String> = self.k.radicands().iter().map(|r| r.to_string()).collect();
            let _ = writeln!(out, "radicands {}", r.join(" "));
        }
        for (i, c) in self.characters.iter().enumerate() {
            out.push_str(&character_block(&format!("chi{i}"), c));
        }
        out.push_str(&self.body);
        out
    }
}

fn character_block(name: &str, c: &RayCharacter) -> String {
    let g = c.group();
    let m = g.modulus();
    let mut out = String::new();
    let _ = writeln!(out, "begin character {name}");
    let _ = writeln!(
        out,
        "modulus {} inf {} {}",
        element(m.finite.gen()),
        u8::from(m.infinite[0]),
        u8::from(m.infinite[1])
    );
    let _ = writeln!(out, "order {}", c.order());
    for gen in g.generators() {
        let class = g.class_with_signs(&gen.residue, gen.signs).expect("generators are coprime");
        let v = c.value_at_class(class);
        let f = v.fraction();
        let frac = if *f.numer() == 0 { "0".to_string() } else { format!("{}/{}", f.numer(), f.denom()) };
        let _ = writeln!(out, "value {} {} {frac}", element(&gen.residue), signs(gen.signs));
    }
    let _ = writeln!(out, "end character");
    out
}

fn common_field<'a>(fields: impl Iterator<Item = &'a CoeffFieldRef>) -> Result<CoeffFieldRef> {
    let mut k = CoeffField::rationals();
    for f in fields {
        k = CoeffField::compositum(&k, f)?;
    }
    Ok(k)
}

/// A standalone character document.
pub fn emit_character(c: &RayCharacter) -> String {
    let w = Writer::new(c.field(), &CoeffField::rationals());
    let mut out = w.finish();
    out.push_str(&character_block("chi", c));
    out
}

pub fn emit_newforms(records: &[NewformRecord]) -> Result<String> {
    let Some(first) = records.first() else {
        return Err(crate::Error::Validation { invariant: "nonempty".into(), msg: "no records".into() });
    };
    let k = common_field(records.iter().map(|r| &r.coeff_field))?;
    let mut w = Writer::new(&first.field, &k);
    for r in records {
        w.newform(r)?;
    }
    Ok(w.finish())
}

pub fn emit_series(series: &[TruncatedSeries]) -> Result<String> {
    let Some(first) = series.first() else {
        return Err(crate::Error::Validation { invariant: "nonempty".into(), msg: "no series".into() });
    };
    let k = common_field(series.iter().map(|s| s.coeff_field()))?;
    let mut w = Writer::new(first.field(), &k);
    for (i, s) in series.iter().enumerate() {
        w.series(&format!("s{i}"), s)?;
    }
    Ok(w.finish())
}

pub fn emit_space(space: &SpaceFixture) -> Result<String> {
    let k = match &space.content {
        SpaceContent::Newforms(r) => common_field(std::iter::once(&space.coeff_field).chain(r.iter().map(|r| &r.coeff_field)))?,
        SpaceContent::Basis(s) => common_field(std::iter::once(&space.coeff_field).chain(s.iter().map(|s| s.coeff_field())))?,
    };
    let mut w = Writer::new(&space.field, &k);
    w.line("begin space");
    w.line(format!("weight {} {}", space.weight.k1, space.weight.k2));
    w.line(format!("level {}", element(space.level.gen())));
    w.line(format!("dimension {}", space.dimension));
    if let Some(b) = &space.bound {
        w.line(format!("bound {}", bound(b)));
    }
    w.line(format!("provenance {}", space.provenance));
    match &space.content {
        SpaceContent::Newforms(records) => {
            w.line("form newforms");
            w.line("end space");
            for r in records {
                w.newform(r)?;
            }
        }
        SpaceContent::Basis(series) => {
            w.line("form basis");
            w.line("end space");
            for (i, s) in series.iter().enumerate() {
                w.series(&format!("s{i}"), s)?;
            }
        }
    }
    Ok(w.finish())
}

pub fn emit_report(report: &SearchReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Structured => structured_report(report),
        ReportFormat::Table => Ok(table_report(report)),
    }
}

fn structured_report(r: &SearchReport) -> Result<String> {
    let k = common_field(r.candidates.iter().map(|s| s.coeff_field()))?;
    let mut w = Writer::new(r.character.field(), &k);
    let ch = w.character_name(Some(&r.character));
    w.line("begin report");
    w.line(format!("weight {} {}", r.weight.k1, r.weight.k2));
    w.line(format!("level {}", element(r.level.gen())));
    w.line(format!("character {ch}"));
    w.line(format!("hecke_prime {}", element(r.hecke_prime.gen())));
    w.line(format!("dim_v {}", r.dim_v));
    w.line(format!("dim_v2 {}", r.dim_v2));
    w.line(format!("cm_bound {}", r.cm_bound));
    w.line(format!("stable {}", r.stable()));
    w.line(format!("provenance {}", r.provenance));
    for d in &r.diagnostics {
        w.line(format!("diag {} {} {}", bound(&d.bound), d.dim_v, d.dim_v2));
    }
    for i in 0..r.candidates.len() {
        w.line(format!("candidate cand{i}"));
    }
    w.line("end report");
    for (i, s) in r.candidates.iter().enumerate() {
        w.series(&format!("cand{i}"), s)?;
    }
    Ok(w.finish())
}

fn table_report(r: &SearchReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "search report");
    let _ = writeln!(out, "  weight       {}", r.weight);
    let _ = writeln!(out, "  level        {}", r.level);
    let _ = writeln!(out, "  character    order {} modulo {}", r.character.order(), r.character.modulus());
    let _ = writeln!(out, "  Hecke prime  {}", r.hecke_prime);
    let _ = writeln!(out, "  provenance   {}", r.provenance);
    let _ = writeln!(out, "  {:<40} {:>6} {:>6}", "bound", "dim V", "dim V2");
    for d in &r.diagnostics {
        let _ = writeln!(out, "  {:<40} {:>6} {:>6}", d.bound.to_string(), d.dim_v, d.dim_v2);
    }
    let _ = writeln!(out, "  dim V        {}", r.dim_v);
    let _ = writeln!(out, "  dim V2       {}", r.dim_v2);
    let _ = writeln!(out, "  CM bound     {} (CM dimension detectable on the box, an upper bound; compared by inequality)", r.cm_bound);
    let _ = writeln!(out, "  stable       {}", if r.stable() { "yes" } else { "no" });
    let _ = writeln!(out, "  candidates   {}", r.candidates.len());
    out
}

/// Normalized eigenvalues as a table: generator, norm, value with radical
/// labels, and the coordinate vector.
pub fn emit_record_table(r: &NewformRecord) -> String {
    let mut out = String::new();
    let labels: Vec<String> = (0..r.coeff_field.degree()).map(|m| r.coeff_field.label(m)).collect();
    let _ = writeln!(out, "# weight {} level {} provenance: {}", r.weight, r.level, r.provenance);
    let _ = writeln!(out, "# basis: {}", labels.join(", "));
    for (p, c) in &r.eigenvalues {
        if p.is_unit_ideal() {
            continue;
        }
        let _ = writeln!(out, "{} | {} | {} | [{}]", p.gen(), p.norm(), c, coords(c));
    }
    out
}
