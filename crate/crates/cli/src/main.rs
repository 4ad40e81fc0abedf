//! `pw1`: search for and certify partial weight one Hilbert modular forms
//! from fixture files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pw1_core::arithmetic::{BaseField, FieldElement, PrincipalIdeal, TruncationBound};
use pw1_core::cm::{cm_test, cm_twist_candidates};
use pw1_core::data_io::{
    emit_report, emit_series, load_character, load_newforms, load_series, load_space, ReportFormat, SpaceFixture,
};
use pw1_core::eisenstein::eisenstein_series;
use pw1_core::exec::Exec;
use pw1_core::hecke::reconstruct_expansion;
use pw1_core::search::{certify_holomorphic_with, ramanujan_check, run_search_with, Certification, SearchInput};
use pw1_core::{Error, Rational, WeightPair};

#[derive(Parser, Debug)]
#[command(name = "pw1", version, about = "Exact search and certification of partial weight one Hilbert modular forms")]
#[command(arg_required_else_help = true)]
struct Cli {
    /// Run every kernel on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Table,
    Structured,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Table => ReportFormat::Table,
            Format::Structured => ReportFormat::Structured,
        }
    }
}

/// `a` for a rational generator or `a,b` for `(a + b√d)/2`.
#[derive(Clone, Debug)]
struct Gen(Rational, Rational);

fn parse_rational(s: &str) -> Result<Rational, String> {
    let q: Rational = s.trim().parse().map_err(|_| format!("`{s}` is not a rational number"))?;
    Ok(q)
}

fn parse_gen(s: &str) -> Result<Gen, String> {
    match s.split_once(',') {
        None => Ok(Gen(parse_rational(s)?, Rational::from_integer(0.into()))),
        Some((a, b)) => Ok(Gen(parse_rational(a)?, parse_rational(b)?)),
    }
}

impl Gen {
    fn element(&self, field: &BaseField) -> FieldElement {
        if self.1 == Rational::from_integer(0.into()) {
            return field.element(self.0.clone(), self.1.clone());
        }
        let half = Rational::new(1.into(), 2.into());
        field.element(&self.0 * &half, &self.1 * &half)
    }

    fn ideal(&self, field: &BaseField) -> pw1_core::Result<PrincipalIdeal> {
        field.ideal(&self.element(field))
    }
}

/// `b1,b2` with rational entries, or `bn:N` for `b(N) = N·(δ', δ)`.
#[derive(Clone, Debug)]
enum BoundSpec {
    Pair(Rational, Rational),
    Family(i64),
}

fn parse_bound(s: &str) -> Result<BoundSpec, String> {
    if let Some(n) = s.strip_prefix("bn:") {
        let n: i64 = n.parse().map_err(|_| format!("`{n}` is not an integer"))?;
        if n <= 0 {
            return Err("bn:N needs N > 0".into());
        }
        return Ok(BoundSpec::Family(n));
    }
    let (a, b) = s.split_once(',').ok_or_else(|| format!("`{s}` is neither `b1,b2` nor `bn:N`"))?;
    Ok(BoundSpec::Pair(parse_rational(a)?, parse_rational(b)?))
}

impl BoundSpec {
    fn resolve(&self, field: &BaseField) -> pw1_core::Result<TruncationBound> {
        match self {
            BoundSpec::Pair(a, b) => TruncationBound::rational(field, a.clone(), b.clone()),
            BoundSpec::Family(n) => TruncationBound::b_n(field, *n),
        }
    }
}

fn parse_weight(s: &str) -> Result<WeightPair, String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("`{s}` is not `K1,K2`"))?;
    let k1: i64 = a.trim().parse().map_err(|_| format!("`{a}` is not an integer"))?;
    let k2: i64 = b.trim().parse().map_err(|_| format!("`{b}` is not an integer"))?;
    Ok(WeightPair::new(k1, k2))
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute V and V⁽²⁾ over a bound schedule and report candidates.
    Search {
        #[arg(long)]
        field: i64,
        #[arg(long, value_parser = parse_gen)]
        level: Gen,
        /// Character document for the nebentypus.
        #[arg(long = "char")]
        character: PathBuf,
        /// Target weight `K1,K2` with `K2 = 1`.
        #[arg(long, value_parser = parse_weight)]
        weight: WeightPair,
        /// Bounds separated by `;`, each `b1,b2` or `bn:N`.
        #[arg(long, value_parser = parse_bound, value_delimiter = ';', default_value = "bn:24;bn:26;bn:28")]
        bounds: Vec<BoundSpec>,
        #[arg(long, value_parser = parse_gen)]
        hecke_prime: Gen,
        /// Directory holding `weight_K1_K2_level_GEN.pw1` for the numerator
        /// weight; defaults to `$PW1_FIXTURES`.
        #[arg(long, env = "PW1_FIXTURES")]
        fixtures: PathBuf,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Emit the weight one Eisenstein series `E_{1,ψ}` in the series format.
    Eisenstein {
        #[arg(long = "char")]
        character: PathBuf,
        #[arg(long, value_parser = parse_bound)]
        bound: BoundSpec,
    },
    /// Emit the expansions of the records of a newform document.
    Reconstruct {
        #[arg(long)]
        newform: PathBuf,
        #[arg(long, value_parser = parse_bound)]
        bound: BoundSpec,
    },
    /// Test each record for CM by the totally odd quadratic twists of the
    /// level, or by one given twist.
    CmTest {
        #[arg(long)]
        newform: PathBuf,
        #[arg(long, value_parser = parse_gen)]
        level: Gen,
        #[arg(long)]
        prime_bound: u64,
        /// Test this quadratic character only.
        #[arg(long)]
        twist: Option<PathBuf>,
    },
    /// Certify that a candidate is holomorphic by the power trick.
    Verify {
        /// Series document; the candidate is its series number `--index`.
        #[arg(long)]
        candidate: PathBuf,
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long)]
        power: u32,
        #[arg(long)]
        high_space: PathBuf,
        #[arg(long)]
        aux_space: PathBuf,
        #[arg(long, value_parser = parse_gen)]
        hecke_prime: Gen,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Check `|c(p)| ≤ 2N(p)^{(k0-1)/2}` at both infinite places.
    CheckRamanujan {
        #[arg(long)]
        newform: PathBuf,
        #[arg(long)]
        norm_bound: u64,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
}

/// File name of a space fixture, keyed by the canonical generator of the
/// level in the fixture element syntax.
fn fixture_name(weight: WeightPair, level: &PrincipalIdeal) -> String {
    let g = level.gen();
    let two = Rational::from_integer(2.into());
    let gen = if g.is_rational() { g.x().to_string() } else { format!("{},{}", g.x() * &two, g.y() * &two) };
    format!("weight_{}_{}_level_{}.pw1", weight.k1, weight.k2, gen)
}

fn field_mismatch(what: &str, expected: i64, found: i64) -> Error {
    Error::Validation { invariant: "base field".into(), msg: format!("{what} is over Q(√{found}), expected Q(√{expected})") }
}

#[allow(clippy::too_many_arguments)]
fn search(
    exec: Exec,
    d: i64,
    level: &Gen,
    character: &Path,
    weight: WeightPair,
    bounds: &[BoundSpec],
    hecke_prime: &Gen,
    fixtures: &Path,
    format: Format,
) -> pw1_core::Result<String> {
    let chi = load_character(character)?;
    if chi.field().d() != d {
        return Err(field_mismatch("the character", d, chi.field().d()));
    }
    let field = chi.field().clone();
    let level_ideal = level.ideal(&field)?;
    let numerator_weight = weight.add(&WeightPair::new(1, 1));
    let path = fixtures.join(fixture_name(numerator_weight, &level_ideal));
    let fixture = load_space(&path)?;
    check_space(&fixture, d, numerator_weight, &level_ideal, &path)?;
    let input = SearchInput {
        field: field.clone(),
        weight,
        level: level_ideal,
        character: chi,
        bounds: bounds.iter().map(|b| b.resolve(&field)).collect::<pw1_core::Result<_>>()?,
        hecke_prime: hecke_prime.ideal(&field)?,
    };
    let report = run_search_with(&input, &fixture, exec)?;
    let mut out = emit_report(&report, format.into())?;
    if matches!(format, Format::Table) {
        let _ = writeln!(out, "  fixture      {}", path.display());
    }
    Ok(out)
}

fn check_space(s: &SpaceFixture, d: i64, weight: WeightPair, level: &PrincipalIdeal, path: &Path) -> pw1_core::Result<()> {
    if s.field.d() != d {
        return Err(field_mismatch(&path.display().to_string(), d, s.field.d()));
    }
    if s.weight != weight || &s.level != level {
        return Err(Error::MetadataMismatch(format!(
            "{} holds weight {} level {}, expected weight {weight} level {level}",
            path.display(),
            s.weight,
            s.level
        )));
    }
    Ok(())
}

fn cm(newform: &Path, level: &Gen, prime_bound: u64, twist: Option<&Path>) -> pw1_core::Result<String> {
    let records = load_newforms(newform)?;
    let mut out = String::new();
    for (i, r) in records.iter().enumerate() {
        let level = level.ideal(&r.field)?;
        let twists = match twist {
            Some(p) => {
                let eps = load_character(p)?;
                if eps.field().d() != r.field.d() {
                    return Err(field_mismatch("the twist", r.field.d(), eps.field().d()));
                }
                vec![eps]
            }
            None => cm_twist_candidates(&r.field, &level)?,
        };
        let _ = writeln!(out, "record {i}: weight {} level {} ({})", r.weight, r.level, r.provenance);
        if twists.is_empty() {
            let _ = writeln!(out, "  no totally odd quadratic characters of conductor dividing {level}·∞1∞2");
        }
        for eps in &twists {
            let outcome = cm_test(r, eps, prime_bound)?;
            let _ = writeln!(out, "  twist of conductor {}: {outcome}", eps.conductor()?);
        }
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn verify(
    exec: Exec,
    candidate: &Path,
    index: usize,
    power: u32,
    high: &Path,
    aux: &Path,
    hecke_prime: &Gen,
    format: Format,
) -> pw1_core::Result<String> {
    let series = load_series(candidate)?;
    let f = series.get(index).ok_or_else(|| Error::Validation {
        invariant: "candidate index".into(),
        msg: format!("{} holds {} series, asked for number {index}", candidate.display(), series.len()),
    })?;
    let high_space = load_space(high)?;
    let aux_space = load_space(aux)?;
    let field = f.field().clone();
    for (s, p) in [(&high_space, high), (&aux_space, aux)] {
        if s.field.d() != field.d() {
            return Err(field_mismatch(&p.display().to_string(), field.d(), s.field.d()));
        }
    }
    // Certification happens on the declared box of the high space.
    let f = match &high_space.bound {
        Some(b) if b != f.bound() => f.truncate(b)?,
        _ => f.clone(),
    };
    let q = hecke_prime.ideal(&field)?;
    let outcome = certify_holomorphic_with(&f, power, &high_space, &aux_space, &q, exec)?;
    let mut out = String::new();
    match (&outcome, format) {
        (Certification::Certified(g), Format::Structured) => out.push_str(&emit_series(std::slice::from_ref(g))?),
        (Certification::Certified(_), Format::Table) => {
            let _ = writeln!(out, "certified: f^{power} equals a weight {} form from the auxiliary space on {}", f.weight().scale(power as i64), f.bound());
            let _ = writeln!(out, "  high space   {} (dimension {}, {})", high.display(), high_space.dimension, high_space.provenance);
            let _ = writeln!(out, "  aux space    {} (dimension {}, {})", aux.display(), aux_space.dimension, aux_space.provenance);
        }
        (Certification::InjectivityFailure { rank, declared }, _) => {
            let _ = writeln!(out, "not certified: truncation to {} has rank {rank} on a space of dimension {declared}", f.bound());
        }
        (Certification::NoMatch, _) => {
            let _ = writeln!(out, "not certified: f^{power} is not in the span built from the auxiliary space on {}", f.bound());
        }
    }
    Ok(out)
}

fn ramanujan(newform: &Path, norm_bound: u64, format: Format) -> pw1_core::Result<String> {
    let records = load_newforms(newform)?;
    let mut out = String::new();
    for (i, r) in records.iter().enumerate() {
        let rows = ramanujan_check(r, norm_bound)?;
        match format {
            Format::Table => {
                let _ = writeln!(out, "record {i}: weight {} level {} ({})", r.weight, r.level, r.provenance);
                let _ = writeln!(
                    out,
                    "  {:<14} {:>6} {:>5} {:>16} {:>16} {:>16} {:>6} {:>6}",
                    "prime", "norm", "level", "|c| at ∞1", "|c| at ∞2", "bound", "∞1", "∞2"
                );
                for row in &rows {
                    let verdict = |b: bool| if b { "pass" } else { "FAIL" };
                    let _ = writeln!(
                        out,
                        "  {:<14} {:>6} {:>5} {:>16.6} {:>16.6} {:>16.6} {:>6} {:>6}",
                        row.prime.gen().to_string(),
                        row.prime.norm(),
                        if row.divides_level { "yes" } else { "no" },
                        row.abs_value[0],
                        row.abs_value[1],
                        row.bound,
                        verdict(row.passes[0]),
                        verdict(row.passes[1])
                    );
                }
                let failures = rows.iter().filter(|r| !r.passes.iter().all(|&b| b)).count();
                let _ = writeln!(out, "  {} primes checked, {failures} violations", rows.len());
            }
            Format::Structured => {
                let _ = writeln!(out, "record\tprime\tnorm\tdivides_level\tabs_inf1\tabs_inf2\tbound\tpass_inf1\tpass_inf2\twidth");
                for row in &rows {
                    let _ = writeln!(
                        out,
                        "{i}\t{}\t{}\t{}\t{:e}\t{:e}\t{:e}\t{}\t{}\t{:e}",
                        row.prime.gen(),
                        row.prime.norm(),
                        row.divides_level,
                        row.abs_value[0],
                        row.abs_value[1],
                        row.bound,
                        row.passes[0],
                        row.passes[1],
                        row.width
                    );
                }
            }
        }
    }
    Ok(out)
}

fn run(cli: Cli) -> pw1_core::Result<String> {
    let exec = if cli.sequential { Exec::Sequential } else { Exec::default() };
    match cli.command {
        Command::Search { field, level, character, weight, bounds, hecke_prime, fixtures, format } => {
            search(exec, field, &level, &character, weight, &bounds, &hecke_prime, &fixtures, format)
        }
        Command::Eisenstein { character, bound } => {
            let psi = load_character(&character)?;
            let e = eisenstein_series(&psi, &bound.resolve(psi.field())?)?;
            emit_series(&[e])
        }
        Command::Reconstruct { newform, bound } => {
            let records = load_newforms(&newform)?;
            let series = records
                .iter()
                .map(|r| reconstruct_expansion(r, &bound.resolve(&r.field)?))
                .collect::<pw1_core::Result<Vec<_>>>()?;
            emit_series(&series)
        }
        Command::CmTest { newform, level, prime_bound, twist } => cm(&newform, &level, prime_bound, twist.as_deref()),
        Command::Verify { candidate, index, power, high_space, aux_space, hecke_prime, format } => {
            verify(exec, &candidate, index, power, &high_space, &aux_space, &hecke_prime, format)
        }
        Command::CheckRamanujan { newform, norm_bound, format } => ramanujan(&newform, norm_bound, format),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
