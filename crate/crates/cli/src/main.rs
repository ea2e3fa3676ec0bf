use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gauss_cli::{parse_range, verify, write_csv, ReportRow, VerifySummary};
use gauss_core::{
    check_eligibility, closed_form_complexity, complexity_profile, complexity_via,
    exceptional_primes, is_s_injective, tau_distribution, CharSpec, ComplexityPath,
    EligibilityReport, Error, ExceptionalRecord, GaussParams, ProfileValue,
};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "gauss-periods", version, about = "Complexity of Gauss-period normal bases")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Generic,
    ClosedForm,
    N2ClosedForm,
}

impl From<Method> for ComplexityPath {
    fn from(m: Method) -> Self {
        match m {
            Method::Generic => ComplexityPath::Generic,
            Method::ClosedForm => ComplexityPath::ClosedForm,
            Method::N2ClosedForm => ComplexityPath::TwoCoset,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// C(n, k; q) with its eligibility report.
    Complexity {
        #[arg(short)]
        k: u64,
        #[arg(short)]
        n: u64,
        /// Field size, a prime power.
        #[arg(short, required_unless_present = "char_p", conflicts_with = "char_p")]
        q: Option<u64>,
        /// Shorthand for q = p.
        #[arg(long = "char", value_name = "P")]
        char_p: Option<u64>,
        #[arg(long, value_enum, default_value_t = Method::Generic)]
        method: Method,
    },
    /// C for every prime p <= k and for the class p > k.
    Profile {
        #[arg(short)]
        k: u64,
        #[arg(short)]
        n: u64,
    },
    /// The distributions a(τ) and a*(τ).
    Distribution {
        #[arg(short)]
        k: u64,
        #[arg(short)]
        n: u64,
    },
    /// Exceptional primes r = nk + 1 with witnesses.
    Exceptional {
        #[arg(short, required_unless_present = "range", conflicts_with = "range")]
        k: Option<u64>,
        /// Inclusive range `a..b`.
        #[arg(long)]
        range: Option<String>,
    },
    /// Distributions at every exceptional prime.
    Table {
        #[arg(short, required_unless_present = "range", conflicts_with = "range")]
        k: Option<u64>,
        /// Inclusive range `a..b`.
        #[arg(long)]
        range: Option<String>,
    },
    /// Closed form valid when every cyclotomic number is at most 2.
    Formula {
        #[arg(short)]
        k: u64,
        #[arg(short)]
        n: u64,
        #[arg(long = "char", value_name = "P")]
        p: u64,
    },
    /// Cross-checks every prime r = nk + 1 <= r-max.
    Verify {
        #[arg(short)]
        k: u64,
        #[arg(long)]
        r_max: u64,
    },
}

const EXIT_BAD_INPUT: u8 = 1;
const EXIT_INELIGIBLE: u8 = 2;
const EXIT_MISMATCH: u8 = 3;

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Invariant(_) => EXIT_MISMATCH,
            _ => EXIT_BAD_INPUT,
        };
        Failure { code, message: e.to_string() }
    }
}

fn bad_input(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_BAD_INPUT, message: message.into() }
}

struct Output {
    body: String,
    code: u8,
}

impl Output {
    fn ok(body: String) -> Self {
        Output { body, code: 0 }
    }
}

#[derive(Serialize)]
struct EligibilityJson {
    e: u64,
    quotient: u64,
    gcd: u64,
    eligible: bool,
}

impl From<EligibilityReport> for EligibilityJson {
    fn from(r: EligibilityReport) -> Self {
        EligibilityJson { e: r.e, quotient: r.quotient, gcd: r.gcd_value, eligible: r.eligible }
    }
}

#[derive(Serialize)]
struct ComplexityJson {
    k: u64,
    n: u64,
    r: u64,
    q: u64,
    p: u64,
    eligibility: EligibilityJson,
    value: Option<u64>,
    path: Option<&'static str>,
}

#[derive(Serialize)]
struct ProfileEntryJson {
    class: String,
    value: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eligibility: Option<EligibilityJson>,
}

#[derive(Serialize)]
struct ProfileJson {
    k: u64,
    n: u64,
    r: u64,
    profile: Vec<ProfileEntryJson>,
}

#[derive(Serialize)]
struct ExceptionalEntryJson {
    n: u64,
    r: u64,
    witness: [[u64; 2]; 2],
    resultant: String,
}

#[derive(Serialize)]
struct ExceptionalJson {
    k: u64,
    entries: Vec<ExceptionalEntryJson>,
}

#[derive(Serialize)]
struct FormulaJson {
    k: u64,
    n: u64,
    p: u64,
    value: i64,
    /// Whether r = nk + 1 is prime and not exceptional.
    applicable: bool,
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string(v).expect("plain data serializes");
    s.push('\n');
    s
}

fn csv_lines(rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new()
        .quote_style(csv::QuoteStyle::Never)
        .flexible(true)
        .from_writer(Vec::new());
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
}

fn eligibility_text(r: &EligibilityReport) -> String {
    format!(
        "e={} nk/e={} gcd={} {}",
        r.e,
        r.quotient,
        r.gcd_value,
        if r.eligible { "eligible" } else { "ineligible" }
    )
}

fn cmd_complexity(
    format: Format,
    k: u64,
    n: u64,
    q: Option<u64>,
    char_p: Option<u64>,
    method: Method,
) -> Result<Output, Failure> {
    let params = GaussParams::new(k, n)?;
    let cs = match (q, char_p) {
        (Some(q), None) => CharSpec::new(q)?,
        (None, Some(p)) => CharSpec::prime(p)?,
        _ => return Err(bad_input("exactly one of -q and --char is required")),
    };
    let report = check_eligibility(&params, &cs)?;
    let result = if report.eligible { Some(complexity_via(&params, &cs, method.into())?) } else { None };
    let body = match format {
        Format::Text => {
            let mut s = format!("k={k} n={n} r={} q={} p={}\n", params.r(), cs.q(), cs.p());
            writeln!(s, "eligibility: {}", eligibility_text(&report)).unwrap();
            match &result {
                Some(res) => writeln!(s, "C={} path={}", res.value, res.path).unwrap(),
                None => writeln!(s, "C=undefined: not a normal basis over F_{}", cs.q()).unwrap(),
            }
            s
        }
        Format::Json => json(&ComplexityJson {
            k,
            n,
            r: params.r(),
            q: cs.q(),
            p: cs.p(),
            eligibility: report.into(),
            value: result.as_ref().map(|r| r.value),
            path: result.as_ref().map(|r| r.path.as_str()),
        }),
        Format::Csv => csv_lines([
            ["k", "n", "r", "q", "p", "e", "quotient", "gcd", "eligible", "value", "path"]
                .map(String::from)
                .to_vec(),
            vec![
                k.to_string(),
                n.to_string(),
                params.r().to_string(),
                cs.q().to_string(),
                cs.p().to_string(),
                report.e.to_string(),
                report.quotient.to_string(),
                report.gcd_value.to_string(),
                report.eligible.to_string(),
                result.as_ref().map(|r| r.value.to_string()).unwrap_or_default(),
                result.as_ref().map(|r| r.path.to_string()).unwrap_or_default(),
            ],
        ]),
    };
    let code = if report.eligible { 0 } else { EXIT_INELIGIBLE };
    Ok(Output { body, code })
}

fn cmd_profile(format: Format, k: u64, n: u64) -> Result<Output, Failure> {
    let params = GaussParams::new(k, n)?;
    let profile = complexity_profile(&params)?;
    let body = match format {
        Format::Text => {
            let mut s = format!("k={k} n={n} r={}\n", params.r());
            for e in &profile {
                match e.value {
                    ProfileValue::Complexity(c) => writeln!(s, "{} C={c}", e.class).unwrap(),
                    ProfileValue::Ineligible(r) => {
                        writeln!(s, "{} {}", e.class, eligibility_text(&r)).unwrap()
                    }
                }
            }
            s
        }
        Format::Json => json(&ProfileJson {
            k,
            n,
            r: params.r(),
            profile: profile
                .iter()
                .map(|e| match e.value {
                    ProfileValue::Complexity(c) => {
                        ProfileEntryJson { class: e.class.to_string(), value: Some(c), eligibility: None }
                    }
                    ProfileValue::Ineligible(r) => ProfileEntryJson {
                        class: e.class.to_string(),
                        value: None,
                        eligibility: Some(r.into()),
                    },
                })
                .collect(),
        }),
        Format::Csv => {
            let header = ["k", "n", "r", "class", "value", "e", "quotient", "gcd"].map(String::from).to_vec();
            let rows = profile.iter().map(|e| {
                let mut row = vec![k.to_string(), n.to_string(), params.r().to_string(), e.class.to_string()];
                match e.value {
                    ProfileValue::Complexity(c) => row.extend([c.to_string(), String::new(), String::new(), String::new()]),
                    ProfileValue::Ineligible(r) => row.extend([
                        String::new(),
                        r.e.to_string(),
                        r.quotient.to_string(),
                        r.gcd_value.to_string(),
                    ]),
                }
                row
            });
            csv_lines(std::iter::once(header).chain(rows))
        }
    };
    Ok(Output::ok(body))
}

fn render_rows(format: Format, rows: &[ReportRow], empty_ks: &[u64], width: u64) -> String {
    match format {
        Format::Text => {
            let mut s = String::new();
            let mut ks: Vec<u64> = rows.iter().map(|r| r.k).chain(empty_ks.iter().copied()).collect();
            ks.sort_unstable();
            ks.dedup();
            for k in ks {
                if empty_ks.contains(&k) {
                    writeln!(s, "k={k} --").unwrap();
                }
                for row in rows.iter().filter(|r| r.k == k) {
                    s.push_str(&row.to_text());
                    s.push('\n');
                }
            }
            s
        }
        Format::Json => json(&rows),
        Format::Csv => write_csv(rows, width),
    }
}

fn cmd_distribution(format: Format, k: u64, n: u64) -> Result<Output, Failure> {
    let params = GaussParams::new(k, n)?;
    let row = ReportRow::from_distribution(&tau_distribution(&params)?);
    let body = match format {
        Format::Json => json(&row),
        _ => render_rows(format, std::slice::from_ref(&row), &[], k),
    };
    Ok(Output::ok(body))
}

fn k_range(k: Option<u64>, range: Option<&str>) -> Result<(u64, u64), Failure> {
    match (k, range) {
        (Some(0), None) => Err(bad_input("k must be positive")),
        (Some(k), None) => Ok((k, k)),
        (None, Some(r)) => parse_range(r).map_err(bad_input),
        _ => Err(bad_input("exactly one of -k and --range is required")),
    }
}

fn records(lo: u64, hi: u64) -> Result<Vec<ExceptionalRecord>, Failure> {
    (lo..=hi).map(|k| exceptional_primes(k).map_err(Failure::from)).collect()
}

fn cmd_exceptional(format: Format, lo: u64, hi: u64) -> Result<Output, Failure> {
    let recs = records(lo, hi)?;
    let body = match format {
        Format::Text => {
            let mut s = String::new();
            for rec in &recs {
                if rec.is_empty() {
                    writeln!(s, "k={}: empty", rec.k).unwrap();
                    continue;
                }
                let list: Vec<String> = rec.entries.iter().map(|e| format!("({}, {})", e.n, e.r)).collect();
                writeln!(s, "k={}: {}", rec.k, list.join(", ")).unwrap();
                for e in &rec.entries {
                    let w = e.witness;
                    writeln!(
                        s,
                        "  n={} r={} witness=({},{}),({},{}) resultant={}",
                        e.n, e.r, w.first.0, w.first.1, w.second.0, w.second.1, e.resultant
                    )
                    .unwrap();
                }
            }
            s
        }
        Format::Json => json(
            &recs
                .iter()
                .map(|rec| ExceptionalJson {
                    k: rec.k,
                    entries: rec
                        .entries
                        .iter()
                        .map(|e| ExceptionalEntryJson {
                            n: e.n,
                            r: e.r,
                            witness: [
                                [e.witness.first.0, e.witness.first.1],
                                [e.witness.second.0, e.witness.second.1],
                            ],
                            resultant: e.resultant.to_string(),
                        })
                        .collect(),
                })
                .collect::<Vec<_>>(),
        ),
        Format::Csv => {
            let header = ["k", "n", "r", "u", "v", "u2", "v2", "resultant"].map(String::from).to_vec();
            let mut rows = vec![header];
            for rec in &recs {
                if rec.is_empty() {
                    let mut row = vec![rec.k.to_string()];
                    row.extend(std::iter::repeat(String::new()).take(7));
                    rows.push(row);
                }
                for e in &rec.entries {
                    let w = e.witness;
                    rows.push(vec![
                        rec.k.to_string(),
                        e.n.to_string(),
                        e.r.to_string(),
                        w.first.0.to_string(),
                        w.first.1.to_string(),
                        w.second.0.to_string(),
                        w.second.1.to_string(),
                        e.resultant.to_string(),
                    ]);
                }
            }
            csv_lines(rows)
        }
    };
    Ok(Output::ok(body))
}

fn cmd_table(format: Format, lo: u64, hi: u64) -> Result<Output, Failure> {
    let mut rows = Vec::new();
    let mut empty = Vec::new();
    for rec in records(lo, hi)? {
        if rec.is_empty() {
            empty.push(rec.k);
        }
        for e in &rec.entries {
            let params = GaussParams::new(rec.k, e.n)?;
            rows.push(ReportRow::from_distribution(&tau_distribution(&params)?));
        }
    }
    Ok(Output::ok(render_rows(format, &rows, &empty, hi)))
}

fn cmd_formula(format: Format, k: u64, n: u64, p: u64) -> Result<Output, Failure> {
    if k == 0 {
        return Err(bad_input("k must be positive"));
    }
    if n < 2 {
        return Err(Error::TrivialDegree(n).into());
    }
    CharSpec::prime(p)?;
    let value = closed_form_complexity(k, n, p);
    let applicable = match GaussParams::new(k, n) {
        Ok(params) => is_s_injective(&params)?,
        Err(_) => false,
    };
    let body = match format {
        Format::Text => {
            let note = if applicable { "" } else { " (not applicable: r = nk + 1 is not prime or is exceptional)" };
            format!("k={k} n={n} p={p} C={value}{note}\n")
        }
        Format::Json => json(&FormulaJson { k, n, p, value, applicable }),
        Format::Csv => csv_lines([
            ["k", "n", "p", "value", "applicable"].map(String::from).to_vec(),
            vec![k.to_string(), n.to_string(), p.to_string(), value.to_string(), applicable.to_string()],
        ]),
    };
    Ok(Output::ok(body))
}

fn summary_text(s: &VerifySummary) -> String {
    let mut out = format!("verify k={} r<={}: {} primes\n", s.k, s.r_max, s.primes);
    writeln!(out, "  invariants      {}", s.invariants).unwrap();
    writeln!(out, "  brute-force     {}", s.brute_force).unwrap();
    writeln!(out, "  direct-count    {}", s.direct_count).unwrap();
    writeln!(out, "  closed-form     {} (skipped {} non-injective)", s.closed_form, s.closed_form_skipped).unwrap();
    writeln!(out, "  n2-closed-form  {}", s.two_coset).unwrap();
    writeln!(out, "mismatches {}", s.mismatches).unwrap();
    if let Some(m) = &s.first_mismatch {
        writeln!(out, "first mismatch: {m}").unwrap();
    }
    out
}

fn cmd_verify(format: Format, k: u64, r_max: u64) -> Result<Output, Failure> {
    let s = verify(k, r_max)?;
    let body = match format {
        Format::Text => summary_text(&s),
        Format::Json => json(&s),
        Format::Csv => csv_lines([
            [
                "k",
                "r_max",
                "primes",
                "invariants",
                "brute_force",
                "direct_count",
                "closed_form",
                "closed_form_skipped",
                "two_coset",
                "mismatches",
            ]
            .map(String::from)
            .to_vec(),
            [s.k, s.r_max, s.primes, s.invariants, s.brute_force, s.direct_count, s.closed_form, s.closed_form_skipped, s.two_coset, s.mismatches]
                .map(|v| v.to_string())
                .to_vec(),
        ]),
    };
    let code = if s.passed() { 0 } else { EXIT_MISMATCH };
    Ok(Output { body, code })
}

fn run(cli: Cli) -> Result<Output, Failure> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(bad_input("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| bad_input(e.to_string()))?;
    }
    let f = cli.format;
    match cli.command {
        Command::Complexity { k, n, q, char_p, method } => cmd_complexity(f, k, n, q, char_p, method),
        Command::Profile { k, n } => cmd_profile(f, k, n),
        Command::Distribution { k, n } => cmd_distribution(f, k, n),
        Command::Exceptional { k, range } => {
            let (lo, hi) = k_range(k, range.as_deref())?;
            cmd_exceptional(f, lo, hi)
        }
        Command::Table { k, range } => {
            let (lo, hi) = k_range(k, range.as_deref())?;
            cmd_table(f, lo, hi)
        }
        Command::Formula { k, n, p } => cmd_formula(f, k, n, p),
        Command::Verify { k, r_max } => cmd_verify(f, k, r_max),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_BAD_INPUT) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{}", out.body);
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
