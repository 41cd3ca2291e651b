//! The `fricke` command line: point queries, table sweeps, genus tables and
//! the verification suites.

use std::ffi::OsString;
use std::io::Write;
use std::ops::RangeInclusive;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::arith::factorize;
use crate::characters::{parse_star_signs, star_obstruction, ExtChar, GroupKind, QuadChar, Unit};
use crate::dims::{dim_cusp, verify_power_relations, CheckStatus, DimReport, Dims};
use crate::elliptic::{
    nu2, nu2_plus, nu2_plus_oracle, star_class_sum, star_elliptic_classes, star_extra_sum,
};
use crate::error::{Error, Result};
use crate::qforms::{class_number, genus_partition, QForm};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_WEIGHT: i32 = 3;

const MAX_LEVEL: u64 = 100_000;
const MAX_WEIGHT: i64 = 1000;

#[derive(Debug, Parser)]
#[command(
    name = "fricke",
    version,
    about = "Dimensions of modular form spaces for Gamma0(N) and its Atkin-Lehner extensions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dimensions and term breakdown for a single space.
    Dim(Query),
    /// One row per (N, chi, sign, k) over ranges.
    Table(Query),
    /// Genera of positive definite forms of discriminant -4N or D.
    Genera(GeneraArgs),
    /// Run a verification suite; exits 1 on any failure.
    Verify(VerifyArgs),
    /// Quick internal consistency battery.
    Selftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Query {
    /// gamma0, gamma0+ or gamma0*
    #[arg(long, default_value = "gamma0")]
    pub group: String,
    /// N or A..B
    #[arg(long)]
    pub level: String,
    /// k or A..B
    #[arg(long, allow_hyphen_values = true)]
    pub weight: String,
    /// Character tokens like p13,p17 or m4, `triv`, or `all`
    #[arg(long, default_value = "triv")]
    pub chi: String,
    /// Sign on W_N for gamma0+: +1, -1, +i, -i or all
    #[arg(long, allow_hyphen_values = true)]
    pub sign: Option<String>,
    /// Prime signs for gamma0*: p:s,... or all
    #[arg(long)]
    pub signs: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct GeneraArgs {
    /// Level N, discriminant -4N
    #[arg(long, conflicts_with = "disc")]
    pub level: Option<u64>,
    /// Negative discriminant D
    #[arg(long, allow_hyphen_values = true)]
    pub disc: Option<i64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// paper-example, sum-identity, oracle, integrality, zero-sum or all
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Largest level swept by the range-based suites
    #[arg(long, default_value_t = 100)]
    pub max_level: u64,
}

fn parse_range<T>(text: &str, what: &str) -> Result<RangeInclusive<T>>
where
    T: FromStr + PartialOrd + Copy,
{
    let parse = |s: &str| {
        s.trim()
            .parse::<T>()
            .map_err(|_| Error::InvalidInput(format!("bad {what} '{s}'")))
    };
    let range = match text.split_once("..") {
        Some((a, b)) => parse(a)?..=parse(b)?,
        None => {
            let v = parse(text)?;
            v..=v
        }
    };
    if range.start() > range.end() {
        return Err(Error::InvalidInput(format!("empty {what} range '{text}'")));
    }
    Ok(range)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::UnsupportedWeight(_) => EXIT_WEIGHT,
        Error::Inconsistent(_) | Error::InternalLimit(_) => EXIT_VERIFY,
        _ => EXIT_INPUT,
    }
}

fn characters_for(level: u64, spec: &str) -> Result<Vec<QuadChar>> {
    match spec {
        "all" => QuadChar::list(level),
        s => Ok(vec![QuadChar::parse(level, s)?]),
    }
}

/// Extensions of `chi` to the group, filtered by the requested signs.
fn extensions_for(chi: &QuadChar, kind: GroupKind, q: &Query) -> Result<Vec<ExtChar>> {
    match kind {
        GroupKind::Gamma0 => Ok(vec![ExtChar::gamma0(chi.clone())]),
        GroupKind::Gamma0Plus => match q.sign.as_deref() {
            None | Some("all") => ExtChar::extensions(chi, kind),
            Some(s) => Ok(vec![ExtChar::plus(chi.clone(), s.parse::<Unit>()?)?]),
        },
        GroupKind::Gamma0Star => match q.signs.as_deref() {
            None | Some("all") => ExtChar::extensions(chi, kind),
            Some(s) => Ok(vec![ExtChar::star(chi.clone(), &parse_star_signs(s)?)?]),
        },
    }
}

fn single_extension(q: &Query) -> Result<(ExtChar, i64)> {
    let kind: GroupKind = q.group.parse()?;
    let level: u64 = q
        .level
        .parse()
        .map_err(|_| Error::InvalidInput(format!("dim needs a single level, got '{}'", q.level)))?;
    let k: i64 = q.weight.parse().map_err(|_| {
        Error::InvalidInput(format!("dim needs a single weight, got '{}'", q.weight))
    })?;
    if level == 0 || level > MAX_LEVEL {
        return Err(Error::InvalidInput(format!("level {level} out of range")));
    }
    if q.chi == "all" {
        return Err(Error::InvalidInput("dim needs a single character".into()));
    }
    let chi = QuadChar::parse(level, &q.chi)?;
    let ext = match kind {
        GroupKind::Gamma0 => ExtChar::gamma0(chi),
        GroupKind::Gamma0Plus => {
            let s = q
                .sign
                .as_deref()
                .ok_or_else(|| Error::InvalidInput("gamma0+ needs --sign".into()))?;
            ExtChar::plus(chi, s.parse()?)?
        }
        GroupKind::Gamma0Star => {
            let s = q
                .signs
                .as_deref()
                .ok_or_else(|| Error::InvalidInput("gamma0* needs --signs".into()))?;
            ExtChar::star(chi, &parse_star_signs(s)?)?
        }
    };
    Ok((ext, k))
}

pub const CSV_HEADER: &str = "group,N,chi,sign,k,dim_cusp,dim_eis,dim_mod,parity_vanishing";

pub fn csv_row(r: &DimReport) -> String {
    let (c, e, m) = match r.dims {
        Some(d) => (
            d.cusp.to_string(),
            d.eisenstein.to_string(),
            d.modular.to_string(),
        ),
        None => (String::new(), String::new(), String::new()),
    };
    let quote = |s: &str| {
        if s.contains(',') {
            format!("\"{s}\"")
        } else {
            s.to_string()
        }
    };
    format!(
        "{},{},{},{},{},{c},{e},{m},{}",
        r.group.name(),
        r.level,
        quote(&r.chi),
        quote(&r.signs),
        r.weight,
        r.parity_vanishing()
    )
}

pub fn render_text(r: &DimReport) -> String {
    let mut out = String::new();
    let mut line = |k: &str, v: String| out.push_str(&format!("{k:<10} {v}\n"));
    line("group", r.group.name().to_string());
    line("level", r.level.to_string());
    line("weight", r.weight.to_string());
    line("chi", r.chi.clone());
    if !r.signs.is_empty() {
        line("signs", r.signs.clone());
    }
    if let Some(t) = &r.terms {
        line("index", t.index.to_string());
        line("e2", t.e2.to_string());
        line("e3", t.e3.to_string());
        line("d8", t.d8.to_string());
        line("d12", t.d12.to_string());
        line("cusp", t.cusp.to_string());
    }
    match r.dims {
        Some(Dims {
            cusp,
            eisenstein,
            modular,
        }) => {
            line("dim_cusp", cusp.to_string());
            line("dim_eis", eisenstein.to_string());
            line("dim_mod", modular.to_string());
        }
        None => line("dims", "undefined".to_string()),
    }
    if !r.flags.is_empty() {
        let flags: Vec<String> = r
            .flags
            .iter()
            .map(|f| {
                serde_json::to_value(f)
                    .unwrap()
                    .as_str()
                    .unwrap()
                    .to_string()
            })
            .collect();
        line("flags", flags.join(","));
    }
    out
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("reports serialize")
}

fn cmd_dim(q: &Query, out: &mut dyn Write) -> Result<i32> {
    let (ext, k) = single_extension(q)?;
    if k == 1 {
        return Err(Error::UnsupportedWeight(1));
    }
    let report = DimReport::compute(&ext, k)?;
    let text = match q.format {
        Format::Text => render_text(&report),
        Format::Json => to_json(&report) + "\n",
        Format::Csv => format!("{CSV_HEADER}\n{}\n", csv_row(&report)),
    };
    out.write_all(text.as_bytes()).map_err(io_err)?;
    Ok(EXIT_OK)
}

fn io_err(e: std::io::Error) -> Error {
    Error::InvalidInput(format!("write failed: {e}"))
}

/// All rows of a table query in deterministic order.
pub fn table_rows(q: &Query) -> Result<Vec<DimReport>> {
    let kind: GroupKind = q.group.parse()?;
    let levels = parse_range::<u64>(&q.level, "level")?;
    let weights = parse_range::<i64>(&q.weight, "weight")?;
    if *levels.start() == 0 || *levels.end() > MAX_LEVEL {
        return Err(Error::InvalidInput(format!(
            "levels must lie in 1..={MAX_LEVEL}"
        )));
    }
    if weights.start().abs() > MAX_WEIGHT || weights.end().abs() > MAX_WEIGHT {
        return Err(Error::InvalidInput(format!(
            "weights must lie in -{MAX_WEIGHT}..={MAX_WEIGHT}"
        )));
    }
    let explicit = q.chi != "all";
    let per_level: Vec<Result<Vec<DimReport>>> = levels
        .clone()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|n| {
            if kind != GroupKind::Gamma0 && n < 2 {
                return Ok(Vec::new());
            }
            if kind == GroupKind::Gamma0Star && !factorize(n as i64)?.is_squarefree() {
                return Ok(Vec::new());
            }
            let chis = match characters_for(n, &q.chi) {
                Ok(c) => c,
                Err(_) if explicit && levels.start() != levels.end() => return Ok(Vec::new()),
                Err(e) => return Err(e),
            };
            let mut rows = Vec::new();
            for chi in chis {
                if kind == GroupKind::Gamma0Star && star_obstruction(&chi).is_some() && !explicit {
                    continue;
                }
                let exts = match extensions_for(&chi, kind, q) {
                    Ok(e) => e,
                    // a fixed sign that does not fit this character's parity
                    Err(Error::InvalidInput(_)) if !explicit || levels.start() != levels.end() => {
                        continue
                    }
                    Err(e) => return Err(e),
                };
                for ext in &exts {
                    for k in weights.clone() {
                        rows.push(DimReport::compute(ext, k)?);
                    }
                }
            }
            Ok(rows)
        })
        .collect();
    let mut rows = Vec::new();
    for r in per_level {
        rows.extend(r?);
    }
    if rows.is_empty() {
        return Err(Error::InvalidInput("query selects no spaces".into()));
    }
    Ok(rows)
}

fn cmd_table(q: &Query, out: &mut dyn Write) -> Result<i32> {
    let rows = table_rows(q)?;
    let text = match q.format {
        Format::Csv => {
            let mut s = format!("{CSV_HEADER}\n");
            for r in &rows {
                s.push_str(&csv_row(r));
                s.push('\n');
            }
            s
        }
        Format::Json => to_json(&rows) + "\n",
        Format::Text => rows
            .iter()
            .map(|r| {
                let dims = match r.dims {
                    Some(d) => format!("{:>6} {:>6} {:>6}", d.cusp, d.eisenstein, d.modular),
                    None => format!("{:>6} {:>6} {:>6}", "-", "-", "-"),
                };
                format!(
                    "{:<8} {:>6} {:<14} {:<16} {:>4} {dims}\n",
                    r.group.name(),
                    r.level,
                    r.chi,
                    r.signs,
                    r.weight
                )
            })
            .collect(),
    };
    out.write_all(text.as_bytes()).map_err(io_err)?;
    Ok(EXIT_OK)
}

fn cmd_genera(g: &GeneraArgs, out: &mut dyn Write) -> Result<i32> {
    let d = match (g.level, g.disc) {
        (Some(n), None) if n > 0 => -4 * n as i64,
        (None, Some(d)) => d,
        _ => {
            return Err(Error::InvalidInput(
                "genera needs --level N > 0 or --disc D".into(),
            ))
        }
    };
    let table = genus_partition(d)?;
    let labels: Vec<String> = table.characters.iter().map(|c| c.label()).collect();
    let genera = table.genera();
    let sign = |s: i32| if s > 0 { "+" } else { "-" };
    let text = match g.format {
        Format::Json => {
            let rows: Vec<serde_json::Value> = genera
                .iter()
                .map(|(signs, forms)| {
                    serde_json::json!({
                        "signs": signs,
                        "forms": forms.iter().map(|f| [f.a, f.b, f.c]).collect::<Vec<_>>(),
                    })
                })
                .collect();
            to_json(&serde_json::json!({
                "disc": d,
                "class_number": table.classes.len(),
                "characters": labels,
                "genera": rows,
            })) + "\n"
        }
        Format::Csv => {
            let mut s = format!("{},forms\n", labels.join(","));
            for (signs, forms) in &genera {
                let sv: Vec<&str> = signs.iter().map(|&x| sign(x)).collect();
                let fv: Vec<String> = forms.iter().map(QForm::to_string).collect();
                s.push_str(&format!("{},\"{}\"\n", sv.join(","), fv.join(" ")));
            }
            s
        }
        Format::Text => {
            let mut s = format!(
                "discriminant {d}, {} classes in {} genera\n{}\n",
                table.classes.len(),
                genera.len(),
                labels.join(" ")
            );
            for (signs, forms) in &genera {
                let sv: Vec<String> = signs
                    .iter()
                    .zip(&labels)
                    .map(|(&x, l)| format!("{:^w$}", sign(x), w = l.len()))
                    .collect();
                let fv: Vec<String> = forms.iter().map(QForm::to_string).collect();
                s.push_str(&format!("{}   {}\n", sv.join(" "), fv.join(" ")));
            }
            s
        }
    };
    out.write_all(text.as_bytes()).map_err(io_err)?;
    Ok(EXIT_OK)
}

/// Tally of one verification suite.
#[derive(Debug, Default, Clone)]
pub struct SuiteOutcome {
    pub name: String,
    pub checked: u64,
    pub passed: u64,
    pub skipped: u64,
    pub failures: Vec<String>,
}

impl SuiteOutcome {
    fn new(name: &str) -> SuiteOutcome {
        SuiteOutcome {
            name: name.to_string(),
            ..Default::default()
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if ok {
            self.passed += 1;
        } else {
            self.failures.push(what());
        }
    }

    fn merge(mut self, other: SuiteOutcome) -> SuiteOutcome {
        self.checked += other.checked;
        self.passed += other.passed;
        self.skipped += other.skipped;
        self.failures.extend(other.failures);
        self
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

fn par_levels<F>(name: &str, levels: RangeInclusive<u64>, f: F) -> SuiteOutcome
where
    F: Fn(u64, &mut SuiteOutcome) + Sync,
{
    let parts: Vec<SuiteOutcome> = levels
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|n| {
            let mut s = SuiteOutcome::new(name);
            f(n, &mut s);
            s
        })
        .collect();
    parts
        .into_iter()
        .fold(SuiteOutcome::new(name), SuiteOutcome::merge)
}

fn parity_weights(chi: &QuadChar) -> impl Iterator<Item = i64> {
    let odd = chi.parity() < 0;
    (2..=13).filter(move |k| (k % 2 == 1) == odd)
}

pub fn suite_worked_example() -> SuiteOutcome {
    let mut s = SuiteOutcome::new("paper-example");
    let chi = QuadChar::parse(221, "p13,p17").expect("valid character");
    let g0 = dim_cusp(&ExtChar::gamma0(chi.clone()), 6);
    s.record(g0 == Ok(104), || format!("dim S6(Gamma0(221)) = {g0:?}"));
    let plus = ExtChar::plus(chi.clone(), Unit::MINUS_ONE).and_then(|c| dim_cusp(&c, 6));
    s.record(plus == Ok(52), || {
        format!("dim S6(Gamma0+(221)) = {plus:?}")
    });
    let star = ExtChar::star(chi.clone(), &[(13, Unit::MINUS_ONE), (17, Unit::MINUS_ONE)])
        .and_then(|c| dim_cusp(&c, 6));
    s.record(star == Ok(26), || {
        format!("dim S6(Gamma0*(221)) = {star:?}")
    });
    s.record(nu2(&chi) == -4, || format!("nu2 = {}", nu2(&chi)));
    let genera = genus_partition(-260).map(|t| t.genera());
    let shape = genera
        .as_ref()
        .map(|g| g.iter().map(|x| x.1.len()).collect::<Vec<_>>());
    s.record(shape == Ok(vec![2, 2, 2, 2]), || {
        format!("genera of -260: {shape:?}")
    });
    for (d, h) in [(-884, 16), (-52, 2), (-68, 4)] {
        let got = class_number(d);
        s.record(got == Ok(h), || format!("h({d}) = {got:?}"));
    }
    for (e, size) in [(221, 16), (13, 4), (17, 8)] {
        let got = star_elliptic_classes(221, e).map(|c| c.len());
        s.record(got == Ok(size), || format!("classes for e = {e}: {got:?}"));
    }
    s
}

pub fn suite_sum_identity(max_level: u64) -> SuiteOutcome {
    par_levels("sum-identity", 1..=max_level, |n, s| {
        let chis = QuadChar::list(n).unwrap_or_default();
        for chi in chis {
            for k in parity_weights(&chi) {
                match verify_power_relations(n, &chi, k) {
                    Ok(checks) => {
                        for c in checks {
                            match c.status {
                                CheckStatus::Skipped => s.skipped += 1,
                                st => s.record(st == CheckStatus::Pass, || {
                                    format!("N={n} chi={chi} k={k} {}: {}", c.name, c.detail)
                                }),
                            }
                        }
                    }
                    Err(Error::InvalidInput(_)) if star_obstruction(&chi).is_some() => {
                        s.skipped += 1
                    }
                    Err(e) => s.record(false, || format!("N={n} chi={chi} k={k}: {e}")),
                }
            }
        }
    })
}

pub fn suite_oracle(max_level: u64) -> SuiteOutcome {
    par_levels("oracle", 4..=max_level.max(4), |n, s| {
        for chi in QuadChar::list(n).unwrap_or_default() {
            for ext in ExtChar::extensions(&chi, GroupKind::Gamma0Plus).unwrap_or_default() {
                let a = nu2_plus(&ext);
                let b = nu2_plus_oracle(&ext);
                s.record(a.is_ok() && a == b, || {
                    format!("N={n} chi={chi} sign={}: {a:?} vs {b:?}", ext.sign_spec())
                });
            }
        }
    })
}

pub fn suite_integrality(max_level: u64) -> SuiteOutcome {
    par_levels("integrality", 1..=max_level, |n, s| {
        let squarefree = factorize(n as i64)
            .map(|f| f.is_squarefree())
            .unwrap_or(false);
        for chi in QuadChar::list(n).unwrap_or_default() {
            let mut exts = vec![ExtChar::gamma0(chi.clone())];
            if n >= 2 {
                exts.extend(ExtChar::extensions(&chi, GroupKind::Gamma0Plus).unwrap_or_default());
            }
            if n >= 2 && squarefree {
                match ExtChar::extensions(&chi, GroupKind::Gamma0Star) {
                    Ok(v) => exts.extend(v),
                    Err(_) => s.skipped += 1,
                }
            }
            for ext in &exts {
                for k in parity_weights(&chi) {
                    let d = Dims::compute(ext, k);
                    s.record(
                        matches!(d, Ok(x) if x.modular == x.cusp + x.eisenstein),
                        || {
                            format!(
                                "{} N={n} chi={chi} {} k={k}: {d:?}",
                                ext.kind().name(),
                                ext.sign_spec()
                            )
                        },
                    );
                }
            }
        }
    })
}

pub fn suite_zero_sum(max_level: u64) -> SuiteOutcome {
    par_levels("zero-sum", 2..=max_level.max(2), |n, s| {
        let Ok(fact) = factorize(n as i64) else {
            return;
        };
        // the lemma's standing hypothesis: square-free, every prime 1 mod 4
        if !fact.is_squarefree() || fact.primes().any(|p| p % 4 != 1) {
            return;
        }
        for chi in QuadChar::list(n).unwrap_or_default() {
            if chi.conductor() != n {
                continue;
            }
            let Ok(exts) = ExtChar::extensions(&chi, GroupKind::Gamma0Star) else {
                s.skipped += 1;
                continue;
            };
            for ext in &exts {
                for e in fact.hall_divisors().into_iter().skip(1) {
                    let v = star_class_sum(ext, e);
                    s.record(matches!(v, Ok(z) if z.re == 0 && z.im == 0), || {
                        format!("N={n} chi={chi} {} e={e}: {v:?}", ext.sign_spec())
                    });
                }
                let total = star_extra_sum(ext);
                s.record(matches!(total, Ok(z) if z.re == 0 && z.im == 0), || {
                    format!("N={n} chi={chi} {}: extra sum {total:?}", ext.sign_spec())
                });
            }
        }
    })
}

pub fn run_suite(name: &str, max_level: u64) -> Result<Vec<SuiteOutcome>> {
    Ok(match name {
        "paper-example" => vec![suite_worked_example()],
        "sum-identity" => vec![suite_sum_identity(max_level)],
        "oracle" => vec![suite_oracle(max_level)],
        "integrality" => vec![suite_integrality(max_level)],
        "zero-sum" => vec![suite_zero_sum(max_level)],
        "all" => vec![
            suite_worked_example(),
            suite_sum_identity(max_level),
            suite_oracle(max_level),
            suite_integrality(max_level),
            suite_zero_sum(max_level),
        ],
        other => return Err(Error::InvalidInput(format!("unknown suite '{other}'"))),
    })
}

fn report_suites(suites: &[SuiteOutcome], out: &mut dyn Write) -> Result<i32> {
    let mut text = String::new();
    for s in suites {
        text.push_str(&format!(
            "{:<14} {} checked={} passed={} skipped={} failed={}\n",
            s.name,
            if s.ok() { "PASS" } else { "FAIL" },
            s.checked,
            s.passed,
            s.skipped,
            s.failures.len()
        ));
        for f in s.failures.iter().take(20) {
            text.push_str(&format!("  {f}\n"));
        }
    }
    out.write_all(text.as_bytes()).map_err(io_err)?;
    Ok(if suites.iter().all(SuiteOutcome::ok) {
        EXIT_OK
    } else {
        EXIT_VERIFY
    })
}

fn cmd_verify(v: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    if v.max_level == 0 || v.max_level > MAX_LEVEL {
        return Err(Error::InvalidInput(format!(
            "max level must lie in 1..={MAX_LEVEL}"
        )));
    }
    report_suites(&run_suite(&v.suite, v.max_level)?, out)
}

fn cmd_selftest(out: &mut dyn Write) -> Result<i32> {
    report_suites(&run_suite("all", 60)?, out)
}

/// Parse arguments, run the command and return the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Dim(q) => cmd_dim(q, out),
        Command::Table(q) => cmd_table(q, out),
        Command::Genera(g) => cmd_genera(g, out),
        Command::Verify(v) => cmd_verify(v, out),
        Command::Selftest => cmd_selftest(out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv: Vec<&str> = std::iter::once("fricke")
            .chain(args.iter().copied())
            .collect();
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range::<u64>("2..10", "level").unwrap(), 2..=10);
        assert_eq!(parse_range::<i64>("6", "weight").unwrap(), 6..=6);
        assert!(parse_range::<u64>("10..2", "level").is_err());
        assert!(parse_range::<u64>("x", "level").is_err());
    }

    #[test]
    fn dim_examples() {
        let (code, out, _) = run_str(&[
            "dim", "--group", "gamma0", "--level", "221", "--weight", "6", "--chi", "p13,p17",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("dim_cusp   104"), "{out}");
        let (code, out, _) = run_str(&[
            "dim", "--group", "gamma0+", "--level", "221", "--weight", "6", "--chi", "p13,p17",
            "--sign", "-1", "--format", "json",
        ]);
        assert_eq!(code, 0);
        assert!(
            out.contains("\"dims\":{\"cusp\":52,\"eisenstein\":2,\"modular\":54}"),
            "{out}"
        );
    }

    #[test]
    fn exit_codes() {
        assert_eq!(
            run_str(&[
                "dim", "--group", "gamma0+", "--level", "5", "--weight", "3", "--chi", "p13"
            ])
            .0,
            2
        );
        assert_eq!(run_str(&["dim", "--level", "11", "--weight", "1"]).0, 3);
        assert_eq!(
            run_str(&[
                "dim",
                "--group",
                "gamma0*",
                "--level",
                "12",
                "--weight",
                "2",
                "--signs",
                "2:+1,3:+1"
            ])
            .0,
            2
        );
        assert_eq!(
            run_str(&[
                "dim", "--group", "gamma0+", "--level", "13", "--weight", "2", "--chi", "p13",
                "--sign", "+i"
            ])
            .0,
            2
        );
        assert_eq!(run_str(&["bogus"]).0, 2);
        assert_eq!(run_str(&["--help"]).0, 0);
    }

    #[test]
    fn table_rows_are_ordered() {
        let (code, out, _) = run_str(&[
            "table", "--group", "gamma0+", "--level", "2..10", "--weight", "2..12", "--chi", "all",
            "--sign", "all", "--format", "csv",
        ]);
        assert_eq!(code, 0);
        let mut lines = out.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.next(), Some("gamma0+,2,triv,+1,2,0,0,0,false"));
    }

    #[test]
    fn star_table_row() {
        let (code, out, _) = run_str(&[
            "table",
            "--group",
            "gamma0*",
            "--level",
            "221",
            "--weight",
            "6",
            "--chi",
            "p13,p17",
            "--signs",
            "13:-1,17:-1",
            "--format",
            "csv",
        ]);
        assert_eq!(code, 0);
        assert!(
            out.contains("gamma0*,221,\"p13,p17\",\"13:-1,17:-1\",6,26,1,27,false"),
            "{out}"
        );
    }

    #[test]
    fn genera_output() {
        let (code, out, _) = run_str(&["genera", "--level", "65"]);
        assert_eq!(code, 0);
        assert!(
            out.starts_with("discriminant -260, 8 classes in 4 genera"),
            "{out}"
        );
        let (code, out, _) = run_str(&["genera", "--disc", "-4"]);
        assert_eq!(code, 0);
        assert!(out.contains("1 classes in 1 genera"), "{out}");
        assert_eq!(run_str(&["genera", "--disc", "5"]).0, 2);
    }

    #[test]
    fn worked_example_suite_passes() {
        let s = suite_worked_example();
        assert!(s.ok(), "{:?}", s.failures);
    }
}
