//! Rendering and cross-checking helpers behind the `gauss-periods` binary.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use gauss_core::cyclostats::distribution_from_matrix;
use gauss_core::ntheory::is_prime;
use gauss_core::{
    brute_force_matrix, check_eligibility, closed_form_complexity, complexity_from_distribution,
    direct_complexity, is_s_injective, tau_distribution, two_coset_distribution, CharSpec, Error,
    GaussParams, TauDistribution,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// One row of the distribution table, with zero counts elided.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub k: u64,
    pub n: u64,
    pub r: u64,
    pub a: BTreeMap<u64, u64>,
    pub a_star: BTreeMap<u64, u64>,
}

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("malformed row: {0}")]
    Malformed(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Core(#[from] Error),
}

impl ReportRow {
    pub fn from_distribution(dist: &TauDistribution) -> Self {
        let p = dist.params();
        ReportRow {
            k: p.k(),
            n: p.n(),
            r: p.r(),
            a: dist.nonzero_a(),
            a_star: dist.nonzero_a_star(),
        }
    }

    pub fn to_distribution(&self) -> Result<TauDistribution, ParseError> {
        let params = GaussParams::new(self.k, self.n)?;
        if params.r() != self.r {
            return Err(ParseError::Malformed(format!("r = {} but nk + 1 = {}", self.r, params.r())));
        }
        Ok(TauDistribution::from_sparse(params, &self.a, &self.a_star)?)
    }

    /// `k=6 n=3 r=19 a: 1:3 2:4 3:2 a*: 1:1 2:2`
    pub fn to_text(&self) -> String {
        let mut s = format!("k={} n={} r={} a:", self.k, self.n, self.r);
        for (t, c) in &self.a {
            write!(s, " {t}:{c}").unwrap();
        }
        s.push_str(" a*:");
        for (t, c) in &self.a_star {
            write!(s, " {t}:{c}").unwrap();
        }
        s
    }

    pub fn parse_text(line: &str) -> Result<Self, ParseError> {
        let bad = || ParseError::Malformed(line.to_string());
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let field = |i: usize, key: &str| -> Result<u64, ParseError> {
            tokens
                .get(i)
                .and_then(|t| t.strip_prefix(key))
                .and_then(|v| v.parse().ok())
                .ok_or_else(bad)
        };
        let (k, n, r) = (field(0, "k=")?, field(1, "n=")?, field(2, "r=")?);
        if tokens.get(3) != Some(&"a:") {
            return Err(bad());
        }
        let star = tokens.iter().position(|&t| t == "a*:").ok_or_else(bad)?;
        let counts = |ts: &[&str]| -> Result<BTreeMap<u64, u64>, ParseError> {
            ts.iter()
                .map(|t| {
                    let (tau, c) = t.split_once(':').ok_or_else(bad)?;
                    Ok((tau.parse().map_err(|_| bad())?, c.parse().map_err(|_| bad())?))
                })
                .collect()
        };
        Ok(ReportRow { k, n, r, a: counts(&tokens[4..star])?, a_star: counts(&tokens[star + 1..])? })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain maps serialize")
    }

    pub fn parse_json(s: &str) -> Result<Self, ParseError> {
        Ok(serde_json::from_str(s)?)
    }

    /// Dense CSV record with `width + 1` columns for each of `a` and `a_*`.
    pub fn csv_record(&self, width: u64) -> Vec<String> {
        let mut out = vec![self.k.to_string(), self.n.to_string(), self.r.to_string()];
        for m in [&self.a, &self.a_star] {
            out.extend((0..=width).map(|t| m.get(&t).copied().unwrap_or(0).to_string()));
        }
        out
    }

    pub fn from_csv_record(record: &csv::StringRecord) -> Result<Self, ParseError> {
        let bad = || ParseError::Malformed(format!("{record:?}"));
        let vals: Vec<u64> =
            record.iter().map(|f| f.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?;
        if vals.len() < 5 || (vals.len() - 3) % 2 != 0 {
            return Err(bad());
        }
        let width = (vals.len() - 3) / 2;
        let sparse = |s: &[u64]| -> BTreeMap<u64, u64> {
            s.iter().enumerate().filter(|(_, &c)| c > 0).map(|(t, &c)| (t as u64, c)).collect()
        };
        Ok(ReportRow {
            k: vals[0],
            n: vals[1],
            r: vals[2],
            a: sparse(&vals[3..3 + width]),
            a_star: sparse(&vals[3 + width..]),
        })
    }
}

/// `k,n,r,a0..a{width},as0..as{width}`
pub fn csv_header(width: u64) -> Vec<String> {
    let mut h = vec!["k".to_string(), "n".to_string(), "r".to_string()];
    h.extend((0..=width).map(|t| format!("a{t}")));
    h.extend((0..=width).map(|t| format!("as{t}")));
    h
}

pub fn write_csv(rows: &[ReportRow], width: u64) -> String {
    let mut w = csv::WriterBuilder::new().quote_style(csv::QuoteStyle::Never).from_writer(Vec::new());
    w.write_record(csv_header(width)).expect("in-memory write");
    for row in rows {
        w.write_record(row.csv_record(width)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
}

pub fn read_csv(data: &str) -> Result<Vec<ReportRow>, ParseError> {
    let mut rdr = csv::Reader::from_reader(data.as_bytes());
    rdr.records().map(|rec| ReportRow::from_csv_record(&rec?)).collect()
}

/// Parses `a..b` (inclusive) or a single integer.
pub fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let parse = |t: &str| t.trim().parse::<u64>().map_err(|_| format!("bad range bound {t:?}"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let v = parse(s)?;
            (v, v)
        }
    };
    if lo == 0 || lo > hi {
        return Err(format!("empty or invalid range {s:?}"));
    }
    Ok((lo, hi))
}

/// Per-category case counts for [`verify`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct VerifySummary {
    pub k: u64,
    pub r_max: u64,
    pub primes: u64,
    pub invariants: u64,
    pub brute_force: u64,
    pub direct_count: u64,
    pub closed_form: u64,
    pub closed_form_skipped: u64,
    pub two_coset: u64,
    pub mismatches: u64,
    pub first_mismatch: Option<String>,
}

impl VerifySummary {
    pub fn passed(&self) -> bool {
        self.mismatches == 0
    }
}

#[derive(Default)]
struct CaseReport {
    invariants: u64,
    brute_force: u64,
    direct_count: u64,
    closed_form: u64,
    closed_form_skipped: u64,
    two_coset: u64,
    mismatches: Vec<String>,
}

const CHECK_PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];

fn verify_case(params: &GaussParams) -> Result<CaseReport, Error> {
    let (k, n, r) = (params.k(), params.n(), params.r());
    let tag = format!("k={k} n={n} r={r}");
    let mut rep = CaseReport::default();
    let fail = |rep: &mut CaseReport, what: String| rep.mismatches.push(format!("{tag}: {what}"));

    let dist = tau_distribution(params)?;
    rep.invariants += 1;
    if let Err(e) = dist.check_invariants() {
        fail(&mut rep, e.to_string());
    }
    let injective = is_s_injective(params)?;
    if injective && k >= 3 {
        rep.invariants += 1;
        let a2 = (k - 1) * (k - 2) / 2;
        let as2 = if k % 2 == 0 { (k - 2) / 2 } else { 0 };
        if dist.a()[2] != a2 || dist.a_star()[2] != as2 {
            fail(&mut rep, format!("injective a(2)/a*(2) = {}/{}", dist.a()[2], dist.a_star()[2]));
        }
    }

    let matrix = brute_force_matrix(params)?;
    let oracle = distribution_from_matrix(&matrix)?;
    rep.brute_force += 1;
    if oracle != dist {
        fail(&mut rep, "tally and coset sweep disagree".into());
    }

    for p in CHECK_PRIMES.into_iter().filter(|&p| p != r) {
        let cs = CharSpec::prime(p)?;
        if !check_eligibility(params, &cs)?.eligible {
            continue;
        }
        let generic = complexity_from_distribution(&dist, p);
        rep.direct_count += 1;
        let direct = direct_complexity(&matrix, p);
        if generic != direct {
            fail(&mut rep, format!("p={p}: distribution gives {generic}, direct count {direct}"));
        }
        if injective {
            rep.closed_form += 1;
            let cf = closed_form_complexity(k, n, p);
            if cf != generic as i64 {
                fail(&mut rep, format!("p={p}: closed form {cf}, generic {generic}"));
            }
        } else {
            rep.closed_form_skipped += 1;
        }
    }

    if n == 2 {
        rep.two_coset += 1;
        if two_coset_distribution(k)? != dist {
            fail(&mut rep, "n=2 closed-form distribution disagrees".into());
        }
    }
    Ok(rep)
}

/// Cross-checks every prime `r = nk + 1 <= r_max` with `n >= 2`.
pub fn verify(k: u64, r_max: u64) -> Result<VerifySummary, Error> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    let ns: Vec<u64> = (2..=r_max.saturating_sub(1) / k).filter(|&n| is_prime(n * k + 1)).collect();
    let reports: Vec<CaseReport> = ns
        .par_iter()
        .map(|&n| verify_case(&GaussParams::new(k, n)?))
        .collect::<Result<_, _>>()?;
    let mut s = VerifySummary { k, r_max, primes: ns.len() as u64, ..Default::default() };
    for rep in reports {
        s.invariants += rep.invariants;
        s.brute_force += rep.brute_force;
        s.direct_count += rep.direct_count;
        s.closed_form += rep.closed_form;
        s.closed_form_skipped += rep.closed_form_skipped;
        s.two_coset += rep.two_coset;
        s.mismatches += rep.mismatches.len() as u64;
        if s.first_mismatch.is_none() {
            s.first_mismatch = rep.mismatches.into_iter().next();
        }
    }
    Ok(s)
}
