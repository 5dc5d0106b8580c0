//! `quadrics`: classify points against quadrics over F_q, count joint
//! external/internal censuses, evaluate character sums and run sweeps.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use quadric_core::counting::{sample_pair, sweep_rng};
use quadric_core::forms::int_to_element;
use quadric_core::report::{headline, summarize, REPORT_COLUMNS};
use quadric_core::selftest::{run_selftest, SelftestOptions};
use quadric_core::{
    classify_algebraic, classify_geometric, classify_tangent_count, katz_bound, sweep, within_bound, Engine,
    FieldSpec, PairReport, PointClass, ProjectivePoint, ProjectiveSpace, QuadraticForm, QuadricPair, ReportRow,
    SweepConfig,
};

const EXIT_PROPERTY: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_MISMATCH: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "quadrics", version, about = "Exact point classification and counting for quadrics over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify points as on / ext / int with every available method.
    Classify(ClassifyArgs),
    /// Joint 3x3 census and indicator identity for one pair of quadrics.
    Count(CountArgs),
    /// Projective character sums of one form, or T11..T22 of a pair.
    Charsum(CharsumArgs),
    /// Random pairs over a list of field orders, one report row per pair.
    Sweep(SweepArgs),
    /// Pinned-seed property batteries over every module.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug, Clone)]
struct FieldArgs {
    /// Characteristic. Defaults to the order named in the form.
    #[arg(long)]
    p: Option<u32>,
    /// Extension degree.
    #[arg(long, default_value_t = 1)]
    k: u32,
    /// Monic modulus coefficients, low to high, comma separated (e.g. 1,0,1 for x^2+1).
    #[arg(long)]
    modulus: Option<String>,
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, env = "QS_WORKERS", default_value_t = 1)]
    workers: usize,
    #[arg(long, value_enum)]
    output: Option<Format>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Text,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Text => "text",
        }
    }
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[command(flatten)]
    common: CommonArgs,
    /// `n q a_11 a_12 .. a_nn`, or `@path` to read it from a file.
    #[arg(long)]
    form: String,
    /// Comma-separated homogeneous coordinates; repeatable.
    #[arg(long)]
    point: Vec<String>,
    /// Classify every point of the projective space.
    #[arg(long)]
    all: bool,
}

#[derive(Args, Debug)]
struct CountArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[command(flatten)]
    common: CommonArgs,
    /// First form (`C`). With neither form given, a random pair is drawn from the seed.
    #[arg(long, requires = "form2")]
    form: Option<String>,
    /// Second form (`D`).
    #[arg(long, requires = "form")]
    form2: Option<String>,
    /// Number of variables when drawing a random pair.
    #[arg(long, default_value_t = 3)]
    n: usize,
}

#[derive(Args, Debug)]
struct CharsumArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    form: String,
    #[arg(long)]
    form2: Option<String>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Comma-separated field orders. Defaults to the odd prime powers 7..=81.
    #[arg(long, value_delimiter = ',')]
    q_list: Option<Vec<u64>>,
    #[arg(long, default_value_t = 20)]
    trials: usize,
}

#[derive(Args, Debug)]
struct SelftestArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    quick: bool,
    #[arg(long, hide = true)]
    inject_fault: bool,
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Property(String),
    Mismatch(usize),
    Io(io::Error),
}

impl From<quadric_core::Error> for Failure {
    fn from(e: quadric_core::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(io::Error::other(e))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Io(io::Error::other(e))
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let result = match cli.command {
        Command::Classify(a) => cmd_classify(&a, &mut out),
        Command::Count(a) => cmd_count(&a, &mut out),
        Command::Charsum(a) => cmd_charsum(&a, &mut out),
        Command::Sweep(a) => cmd_sweep(&a, &mut out),
        Command::Selftest(a) => cmd_selftest(&a, &mut out),
    };
    let flushed = out.flush();
    match result.and(flushed.map_err(Failure::Io)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Property(msg)) => {
            eprintln!("property failure: {msg}");
            ExitCode::from(EXIT_PROPERTY)
        }
        Err(Failure::Mismatch(count)) => {
            eprintln!("classifier mismatch at {count} point(s)");
            ExitCode::from(EXIT_MISMATCH)
        }
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn check_workers(common: &CommonArgs) -> CliResult {
    if common.workers == 0 {
        return Err(Failure::Input("--workers must be at least 1".into()));
    }
    Ok(())
}

/// Inline form text, or the first non-comment line of the file after `@`.
fn read_form_text(src: &str) -> Result<String, Failure> {
    let Some(path) = src.strip_prefix('@') else {
        return Ok(src.to_string());
    };
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read form file {path}: {e}")))?;
    text.lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .ok_or_else(|| Failure::Input(format!("form file {path} has no form line")))
}

fn declared_order(form: &str) -> Result<u64, Failure> {
    let tok = form.split_whitespace().nth(1).ok_or_else(|| Failure::Input(format!("form '{form}' has no q")))?;
    tok.parse().map_err(|_| Failure::Input(format!("form '{form}': q = '{tok}' is not an integer")))
}

fn build_field(args: &FieldArgs, order: Option<u64>) -> Result<FieldSpec, Failure> {
    let modulus = match &args.modulus {
        None => None,
        Some(s) => Some(
            s.split(',')
                .map(|t| t.trim().parse::<u32>().map_err(|_| Failure::Input(format!("bad modulus coefficient '{t}'"))))
                .collect::<Result<Vec<_>, _>>()?,
        ),
    };
    let field = match (args.p, order) {
        (Some(p), _) => FieldSpec::new(p, args.k, modulus.as_deref())?,
        (None, Some(q)) if modulus.is_none() && args.k == 1 => FieldSpec::from_order(q)?,
        (None, Some(q)) => {
            let (p, k) = quadric_core::field::prime_power(q)
                .ok_or_else(|| Failure::Input(format!("{q} is not a prime power")))?;
            if args.k != 1 && args.k != k {
                return Err(Failure::Input(format!("--k {} conflicts with q = {q}", args.k)));
            }
            FieldSpec::new(p, k, modulus.as_deref())?
        }
        (None, None) => return Err(Failure::Input("--p is required".into())),
    };
    if let Some(q) = order {
        if q != field.q() as u64 {
            return Err(Failure::Input(format!("form is over q = {q} but the field is {field}")));
        }
    }
    Ok(field)
}

/// Field and parsed forms; every form must name the same `q`.
fn load_forms(args: &FieldArgs, sources: &[&str]) -> Result<(FieldSpec, Vec<QuadraticForm>), Failure> {
    let texts: Vec<String> = sources.iter().map(|s| read_form_text(s)).collect::<Result<_, _>>()?;
    let order = declared_order(&texts[0])?;
    let field = build_field(args, Some(order))?;
    let forms = texts.iter().map(|t| QuadraticForm::parse_line(t, &field)).collect::<Result<_, _>>()?;
    Ok((field, forms))
}

fn field_header(field: &FieldSpec) -> String {
    let modulus = if field.k() == 1 { "none".to_string() } else { field.modulus_string().replace(' ', "") };
    format!("p={} k={} q={} modulus={modulus}", field.p(), field.k(), field.q())
}

fn write_header(out: &mut impl Write, lines: &[String]) -> io::Result<()> {
    for l in lines {
        writeln!(out, "# {l}")?;
    }
    Ok(())
}

fn parse_point(field: &FieldSpec, s: &str) -> Result<ProjectivePoint, Failure> {
    let coords = s
        .split(',')
        .map(|t| {
            let v: i64 = t.trim().parse().map_err(|_| Failure::Input(format!("bad coordinate '{t}' in point '{s}'")))?;
            Ok(int_to_element(field, v)?)
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    Ok(ProjectivePoint::normalize(field, &coords)?)
}

#[derive(Serialize)]
struct Verdict {
    point: String,
    algebraic: PointClass,
    geometric: PointClass,
    #[serde(skip_serializing_if = "Option::is_none")]
    tangent: Option<PointClass>,
    mismatch: bool,
}

fn cmd_classify(a: &ClassifyArgs, out: &mut impl Write) -> CliResult {
    check_workers(&a.common)?;
    let (field, forms) = load_forms(&a.field, &[&a.form])?;
    let form = &forms[0];
    if form.n() % 2 == 0 {
        return Err(quadric_core::Error::EvenDimension(form.n()).into());
    }
    if !form.is_smooth() {
        return Err(quadric_core::Error::Degenerate.into());
    }
    if a.point.is_empty() && !a.all {
        return Err(Failure::Input("give --point or --all".into()));
    }
    let points: Vec<ProjectivePoint> = if a.all {
        ProjectiveSpace::new(form.n(), &field)?.points().collect()
    } else {
        a.point.iter().map(|s| parse_point(&field, s)).collect::<Result<_, _>>()?
    };
    let mut verdicts = Vec::with_capacity(points.len());
    for p in &points {
        if p.dim() != form.n() {
            return Err(Failure::Input(format!("point {p} has {} coordinates, the form has {}", p.dim(), form.n())));
        }
        let algebraic = classify_algebraic(form, p)?;
        let geometric = classify_geometric(form, p)?;
        let tangent = if form.n() == 3 { Some(classify_tangent_count(form, p)?) } else { None };
        let mismatch = algebraic != geometric || tangent.is_some_and(|t| t != algebraic);
        verdicts.push(Verdict { point: p.to_string(), algebraic, geometric, tangent, mismatch });
    }
    let mismatches = verdicts.iter().filter(|v| v.mismatch).count();
    let format = a.common.output.unwrap_or(Format::Text);
    let header = vec![
        format!("quadrics classify {}", field_header(&field)),
        format!("form={}", form.to_line()),
        format!("points={} output={}", if a.all { "all".to_string() } else { points.len().to_string() }, format.name()),
    ];
    match format {
        Format::Text => {
            write_header(out, &header)?;
            for v in &verdicts {
                let mut line = format!("{} {} {}", v.point, v.algebraic, v.geometric);
                if let Some(t) = v.tangent {
                    write!(line, " {t}").expect("writing to a String");
                }
                if v.mismatch {
                    line.push_str(" MISMATCH");
                }
                writeln!(out, "{line}")?;
            }
        }
        Format::Csv => {
            write_header(out, &header)?;
            writeln!(out, "point,algebraic,geometric,tangent,mismatch")?;
            for v in &verdicts {
                let t = v.tangent.map_or("", PointClass::code);
                writeln!(out, "\"{}\",{},{},{},{}", v.point, v.algebraic, v.geometric, t, v.mismatch)?;
            }
        }
        Format::Json => {
            let doc = json!({
                "config": { "command": "classify", "p": field.p(), "k": field.k(), "q": field.q(),
                            "modulus": field.modulus_string(), "form": form.to_line(), "all": a.all },
                "verdicts": verdicts,
                "mismatches": mismatches,
            });
            serde_json::to_writer_pretty(&mut *out, &doc)?;
            writeln!(out)?;
        }
    }
    if mismatches > 0 {
        return Err(Failure::Mismatch(mismatches));
    }
    Ok(())
}

fn write_rows_csv(out: &mut impl Write, rows: &[ReportRow]) -> CliResult {
    writeln!(out, "{}", REPORT_COLUMNS.join(","))?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(&mut *out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn identity_lines(r: &PairReport) -> Vec<String> {
    let c = &r.chars;
    vec![
        format!("chi_A={} chi_B={} chi_AB={}", c.chi_a, c.chi_b, c.chi_ab),
        format!(
            "identity ext/int={} int/ext={} ext/ext={} int/int={}",
            verdict(c.identity_holds),
            verdict(c.identity_int_ext),
            verdict(c.identity_ext_ext),
            verdict(c.identity_int_int)
        ),
    ]
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "holds"
    } else {
        "FAILS"
    }
}

fn cmd_count(a: &CountArgs, out: &mut impl Write) -> CliResult {
    check_workers(&a.common)?;
    let (field, pair, source) = match (&a.form, &a.form2) {
        (Some(f1), Some(f2)) => {
            let (field, mut forms) = load_forms(&a.field, &[f1, f2])?;
            let d = forms.pop().expect("two forms");
            let c = forms.pop().expect("two forms");
            (field, QuadricPair::new(c, d)?, "given")
        }
        _ => {
            let field = build_field(&a.field, None)?;
            let mut rng = sweep_rng(a.common.seed, field.q() as u64);
            (field.clone(), sample_pair(a.n, &field, &mut rng)?, "random")
        }
    };
    let engine = Engine::new(&field).with_workers(a.common.workers);
    let report = PairReport::analyze(&engine, pair, a.common.seed, 0)?;
    let row = ReportRow::from(&report);
    let format = a.common.output.unwrap_or(Format::Csv);
    let header = vec![
        format!("quadrics count {}", field_header(&field)),
        format!("n={} seed={} workers={} pair={source} output={}", report.pair.n(), a.common.seed, a.common.workers, format.name()),
        format!("form={}", report.pair.c().to_line()),
        format!("form2={}", report.pair.d().to_line()),
    ];
    match format {
        Format::Csv => {
            write_header(out, &header)?;
            write_rows_csv(out, std::slice::from_ref(&row))?;
            write_header(out, &identity_lines(&report))?;
        }
        Format::Text => {
            write_header(out, &header)?;
            writeln!(out, "{:>8} {:>10} {:>10} {:>10}", "C \\ D", "on", "ext", "int")?;
            for c in PointClass::ALL {
                let cells: Vec<String> =
                    PointClass::ALL.iter().map(|&d| format!("{:>10}", report.joint.count(c, d))).collect();
                writeln!(out, "{:>8} {}", c.code(), cells.join(" "))?;
            }
            writeln!(out, "total {}", report.joint.total())?;
            writeln!(out, "s_fg {} main_term {}/{} deviation {}", row.s_fg, row.main_term_num, row.main_term_den, row.deviation)?;
            writeln!(out, "normalized_deviation {}", row.normalized_deviation)?;
            writeln!(out, "T11 {} T12 {} T21 {} T22 {}", row.t11, row.t12, row.t21, row.t22)?;
            for l in identity_lines(&report) {
                writeln!(out, "{l}")?;
            }
        }
        Format::Json => {
            let doc = json!({
                "config": { "command": "count", "p": field.p(), "k": field.k(), "q": field.q(),
                            "modulus": field.modulus_string(), "n": report.pair.n(), "seed": a.common.seed,
                            "workers": a.common.workers, "pair": source,
                            "form": report.pair.c().to_line(), "form2": report.pair.d().to_line() },
                "report": row,
                "census": report.joint.counts,
                "char_sums": report.chars,
            });
            serde_json::to_writer_pretty(&mut *out, &doc)?;
            writeln!(out)?;
        }
    }
    if !report.chars.all_identities_hold() {
        return Err(Failure::Property("indicator identity does not hold".into()));
    }
    Ok(())
}

fn cmd_charsum(a: &CharsumArgs, out: &mut impl Write) -> CliResult {
    check_workers(&a.common)?;
    let mut sources = vec![a.form.as_str()];
    if let Some(f2) = &a.form2 {
        sources.push(f2);
    }
    let (field, forms) = load_forms(&a.field, &sources)?;
    let engine = Engine::new(&field).with_workers(a.common.workers);
    let q = field.q() as u64;
    let format = a.common.output.unwrap_or(Format::Text);
    let mut header = vec![
        format!("quadrics charsum {}", field_header(&field)),
        format!("workers={} output={}", a.common.workers, format.name()),
    ];
    header.extend(forms.iter().enumerate().map(|(i, f)| format!("form{}={}", if i == 0 { "" } else { "2" }, f.to_line())));

    let mut values: Vec<(String, String)> = Vec::new();
    let mut katz_ok = true;
    for (i, form) in forms.iter().enumerate() {
        let s = engine.single_form_char_sum(form)?;
        let name = if i == 0 { "sum_chi_f" } else { "sum_chi_g" };
        values.push((name.into(), s.to_string()));
        if form.n() % 2 == 1 && form.is_smooth() {
            let bound = katz_bound(form.n(), q);
            katz_ok &= within_bound(s, bound);
            values.push((format!("{name}_katz_rhs"), bound.to_string()));
            values.push((format!("{name}_within_katz"), within_bound(s, bound).to_string()));
        }
    }
    let mut identity_ok = true;
    if forms.len() == 2 {
        let pair = QuadricPair::new(forms[0].clone(), forms[1].clone())?;
        let analysis = engine.analyze(&pair)?;
        let c = &analysis.chars;
        identity_ok = c.all_identities_hold();
        for (k, v) in [("T11", c.sums.t11), ("T12", c.sums.t12), ("T21", c.sums.t21), ("T22", c.sums.t22)] {
            values.push((k.into(), v.to_string()));
        }
        values.push(("zeros_fg".into(), c.sums.zeros_fg.to_string()));
        let restricted = engine.restricted_char_sum(pair.c(), pair.d())?;
        values.push(("sum_chi_f_on_g_zero".into(), restricted.to_string()));
        values.push(("chi_A".into(), c.chi_a.to_string()));
        values.push(("chi_B".into(), c.chi_b.to_string()));
        values.push(("chi_AB".into(), c.chi_ab.to_string()));
        values.push(("identity_holds".into(), identity_ok.to_string()));
        if let Some(b) = c.lemma32_rhs {
            values.push(("lemma32_rhs".into(), b.to_string()));
        }
    }
    match format {
        Format::Text => {
            write_header(out, &header)?;
            for (k, v) in &values {
                writeln!(out, "{k} {v}")?;
            }
        }
        Format::Csv => {
            write_header(out, &header)?;
            writeln!(out, "{}", values.iter().map(|(k, _)| k.as_str()).collect::<Vec<_>>().join(","))?;
            writeln!(out, "{}", values.iter().map(|(_, v)| v.as_str()).collect::<Vec<_>>().join(","))?;
        }
        Format::Json => {
            let obj: serde_json::Map<String, serde_json::Value> =
                values.iter().map(|(k, v)| (k.clone(), serde_json::from_str(v).unwrap_or(json!(v)))).collect();
            let doc = json!({
                "config": { "command": "charsum", "p": field.p(), "k": field.k(), "q": field.q(),
                            "modulus": field.modulus_string(), "workers": a.common.workers,
                            "forms": forms.iter().map(QuadraticForm::to_line).collect::<Vec<_>>() },
                "values": obj,
            });
            serde_json::to_writer_pretty(&mut *out, &doc)?;
            writeln!(out)?;
        }
    }
    if !identity_ok {
        return Err(Failure::Property("indicator identity does not hold".into()));
    }
    if !katz_ok {
        return Err(Failure::Property("single-form character sum exceeds q^(n/2)/(q-1)".into()));
    }
    Ok(())
}

fn default_q_list() -> Vec<u64> {
    (7..=81).filter(|&q| q % 2 == 1 && quadric_core::field::prime_power(q).is_some()).collect()
}

fn cmd_sweep(a: &SweepArgs, out: &mut impl Write) -> CliResult {
    check_workers(&a.common)?;
    let q_list = a.q_list.clone().unwrap_or_else(default_q_list);
    let config = SweepConfig { n: a.n, q_list, trials: a.trials, seed: a.common.seed, workers: a.common.workers };
    let reports = sweep(&config)?;
    let rows: Vec<ReportRow> = reports.iter().map(ReportRow::from).collect();
    let summary = summarize(&reports);
    let top = headline(&reports);
    let format = a.common.output.unwrap_or(Format::Csv);
    let q_text = config.q_list.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
    let header = vec![
        "quadrics sweep".to_string(),
        format!(
            "n={} q_list={q_text} trials={} seed={} workers={} output={}",
            config.n,
            config.trials,
            config.seed,
            config.workers,
            format.name()
        ),
    ];
    match format {
        Format::Csv | Format::Text => {
            write_header(out, &header)?;
            write_rows_csv(out, &rows)?;
            writeln!(out, "# summary")?;
            writeln!(out, "# n,q,pairs,mean_normalized_deviation,max_normalized_deviation,identity_failures,lemma32_violations")?;
            for s in &summary {
                writeln!(
                    out,
                    "# {},{},{},{},{},{},{}",
                    s.n,
                    s.q,
                    s.pairs,
                    s.mean_normalized_deviation,
                    s.max_normalized_deviation,
                    s.identity_failures,
                    s.lemma32_violations
                )?;
            }
            match top {
                Some(h) => writeln!(out, "# headline max_normalized_deviation={h}")?,
                None => writeln!(out, "# headline none")?,
            }
        }
        Format::Json => {
            let doc = json!({
                "config": { "command": "sweep", "n": config.n, "q_list": config.q_list, "trials": config.trials,
                            "seed": config.seed, "workers": config.workers },
                "rows": rows,
                "summary": summary,
                "headline_max_normalized_deviation": top,
            });
            serde_json::to_writer_pretty(&mut *out, &doc)?;
            writeln!(out)?;
        }
    }
    let failures: usize = summary.iter().map(|s| s.identity_failures + s.lemma32_violations).sum();
    if failures > 0 {
        return Err(Failure::Property(format!("{failures} pair(s) failed the identity or the T11 bound")));
    }
    Ok(())
}

fn cmd_selftest(a: &SelftestArgs, out: &mut impl Write) -> CliResult {
    check_workers(&a.common)?;
    let opts = SelftestOptions {
        quick: a.quick,
        seed: a.common.seed,
        workers: a.common.workers,
        corrupt_char_table: a.inject_fault,
    };
    let format = a.common.output.unwrap_or(Format::Text);
    if format != Format::Json {
        write_header(
            out,
            &[format!("quadrics selftest seed={} workers={} quick={} output={}", opts.seed, opts.workers, opts.quick, format.name())],
        )?;
        if format == Format::Csv {
            writeln!(out, "battery,status,checks,failures,seconds,first_failure")?;
        }
    }
    let mut io_err = None;
    let results = run_selftest(&opts, |r| {
        let status = if r.passed() { "PASS" } else { "FAIL" };
        let line = match format {
            Format::Text => {
                let mut l = format!("{status} {:<36} {:>9} checks {:>8.2}s", r.name, r.checks, r.seconds);
                if let Some(f) = &r.first_failure {
                    write!(l, "  {} failure(s), first: {f}", r.failures).expect("writing to a String");
                }
                l
            }
            Format::Csv => format!(
                "{},{status},{},{},{:.3},\"{}\"",
                r.name,
                r.checks,
                r.failures,
                r.seconds,
                r.first_failure.as_deref().unwrap_or("").replace('"', "'")
            ),
            Format::Json => return,
        };
        if let Err(e) = writeln!(out, "{line}").and_then(|_| out.flush()) {
            io_err.get_or_insert(e);
        }
    });
    if let Some(e) = io_err {
        return Err(Failure::Io(e));
    }
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed()).map(|r| r.name).collect();
    match format {
        Format::Json => {
            let doc = json!({
                "config": { "command": "selftest", "seed": opts.seed, "workers": opts.workers, "quick": opts.quick },
                "batteries": results,
                "passed": failed.is_empty(),
            });
            serde_json::to_writer_pretty(&mut *out, &doc)?;
            writeln!(out)?;
        }
        _ => writeln!(out, "# {} of {} batteries passed", results.len() - failed.len(), results.len())?,
    }
    if !failed.is_empty() {
        return Err(Failure::Property(format!("failed batteries: {}", failed.join(", "))));
    }
    Ok(())
}
