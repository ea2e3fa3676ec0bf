use std::collections::BTreeMap;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use gauss_cli::ReportRow;
use gauss_core::cyclostats::distribution_from_matrix;
use gauss_core::ntheory::is_prime;
use gauss_core::{
    brute_force_matrix, build_tally, check_eligibility, closed_form_complexity,
    complexity_from_distribution, direct_complexity, exceptional_primes, is_s_injective,
    tau_distribution, two_coset_distribution, CharSpec, GaussParams, TauDistribution,
};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn single_threaded<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(f)
}

fn cli(args: &[&str]) -> (Option<i32>, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_gauss-periods")).args(args).output().unwrap();
    (out.status.code(), String::from_utf8(out.stdout).unwrap())
}

fn golden_rows() -> Vec<ReportRow> {
    include_str!("../../core/tests/data/table1.txt")
        .lines()
        .filter(|l| !l.ends_with("--"))
        .map(|l| ReportRow::parse_text(l).unwrap())
        .collect()
}

fn sparse(pairs: &[(u64, u64)]) -> BTreeMap<u64, u64> {
    pairs.iter().copied().collect()
}

/// The four counting identities, recomputed from the raw arrays.
fn sum_identities(d: &TauDistribution) -> Result<(), String> {
    let (k, n) = (d.params().k(), d.params().n());
    let weighted = |v: &[u64]| v.iter().enumerate().map(|(t, &c)| t as u64 * c).sum::<u64>();
    ensure(
        d.a().iter().sum::<u64>() == n * n
            && weighted(d.a()) == n * k - 1
            && d.a_star().iter().sum::<u64>() == n
            && weighted(d.a_star()) == k - 1,
        || format!("sum identities fail at k={k} n={n}"),
    )
}

fn criterion_1() -> Check {
    let examples = [
        (6, 3, sparse(&[(1, 3), (2, 4), (3, 2)]), sparse(&[(1, 1), (2, 2)])),
        (7, 6, sparse(&[(0, 9), (1, 14), (2, 12), (3, 1)]), sparse(&[(0, 2), (1, 2), (2, 2)])),
        (
            20,
            1166,
            sparse(&[(0, 1336402), (1, 22995), (2, 153), (3, 6)]),
            sparse(&[(0, 1156), (1, 1), (2, 9)]),
        ),
    ];
    let mut slowest = Duration::ZERO;
    for (k, n, a, a_star) in examples {
        let (ks, ns) = (k.to_string(), n.to_string());
        let t = Instant::now();
        let (code, out) = cli(&["distribution", "-k", &ks, "-n", &ns, "--format", "json"]);
        slowest = slowest.max(t.elapsed());
        let row = ReportRow::parse_json(&out).map_err(|e| e.to_string())?;
        ensure(code == Some(0) && row.a == a && row.a_star == a_star, || {
            format!("distribution k={k} n={n} gave {}", row.to_text())
        })?;
    }
    let profiles: [(u64, u64, &str); 3] = [
        (6, 3, "k=6 n=3 r=19\np=2 C=5\np=3 C=7\np=5 C=8\np>5 C=9\n"),
        (
            7,
            6,
            "k=7 n=6 r=43\np=2 e=14 nk/e=3 gcd=3 ineligible\np=3 C=26\np=5 C=27\np=7 C=27\np>7 C=29\n",
        ),
        (20, 1166, ""),
    ];
    for (k, n, expected) in profiles {
        let (ks, ns) = (k.to_string(), n.to_string());
        let t = Instant::now();
        let (code, out) = cli(&["profile", "-k", &ks, "-n", &ns]);
        slowest = slowest.max(t.elapsed());
        ensure(code == Some(0), || format!("profile k={k} exited {code:?}"))?;
        if !expected.is_empty() {
            ensure(out == expected, || format!("profile k={k} n={n}:\n{out}"))?;
            continue;
        }
        let line = |class: &str| out.lines().find(|l| l.split(' ').next() == Some(class)).unwrap_or("");
        for p in [2, 5, 7, 11, 13, 19] {
            ensure(line(&format!("p={p}")).ends_with("ineligible"), || format!("p={p} not excluded"))?;
        }
        ensure(
            line("p=3") == "p=3 C=24295" && line("p=17") == "p=17 C=24310" && line("p>19") == "p>19 C=24310",
            || format!("profile k=20 n=1166:\n{out}"),
        )?;
    }
    ensure(slowest < Duration::from_secs(1), || format!("slowest call took {slowest:?}"))?;
    Ok(format!("3 distributions, 3 profiles, slowest call {slowest:.2?}"))
}

fn criterion_2() -> Check {
    let rows = golden_rows();
    let t = Instant::now();
    single_threaded(|| -> Result<(), String> {
        for row in &rows {
            let params = GaussParams::new(row.k, row.n).map_err(|e| e.to_string())?;
            ensure(params.r() == row.r, || format!("r mismatch at k={} n={}", row.k, row.n))?;
            let dist = tau_distribution(&params).map_err(|e| e.to_string())?;
            let got = ReportRow::from_distribution(&dist);
            ensure(&got == row, || format!("expected {}\n got {}", row.to_text(), got.to_text()))?;
            let oracle = brute_force_matrix(&params).and_then(|m| distribution_from_matrix(&m));
            ensure(oracle.as_ref() == Ok(&dist), || format!("coset sweep disagrees at {}", row.to_text()))?;
        }
        Ok(())
    })?;
    let elapsed = t.elapsed();
    let max_r = rows.iter().map(|r| r.r).max().unwrap_or(0);
    ensure(elapsed < Duration::from_secs(600), || format!("took {elapsed:?}"))?;
    Ok(format!("{} rows (max r = {max_r}), both routes, single thread {elapsed:.2?}", rows.len()))
}

fn criterion_3() -> Check {
    let mut expected: BTreeMap<u64, Vec<u64>> = (1..=20).map(|k| (k, Vec::new())).collect();
    for row in golden_rows() {
        expected.get_mut(&row.k).unwrap().push(row.n);
    }
    let sweep = || -> Result<Duration, String> {
        let t = Instant::now();
        for (&k, ns) in &expected {
            let rec = exceptional_primes(k).map_err(|e| e.to_string())?;
            ensure(&rec.ns() == ns, || format!("k={k}: got {:?}, expected {ns:?}", rec.ns()))?;
        }
        Ok(t.elapsed())
    };
    let single = single_threaded(sweep)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(8).build().unwrap();
    let eight = pool.install(sweep)?;
    ensure(single < Duration::from_secs(1800) && eight < Duration::from_secs(300), || {
        format!("single {single:?}, 8 threads {eight:?}")
    })?;
    Ok(format!("k = 1..20 exact, single thread {single:.2?}, 8 threads {eight:.2?}"))
}

/// Every `(k, n)` with `k <= 10` and `r = nk + 1 < 3000` prime.
fn sweep_params() -> Vec<GaussParams> {
    (1..=10u64)
        .flat_map(|k| (2..=2998 / k).filter(move |n| is_prime(n * k + 1)).map(move |n| (k, n)))
        .map(|(k, n)| GaussParams::new(k, n).unwrap())
        .collect()
}

const SWEEP_PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];

fn criterion_4() -> Check {
    let t = Instant::now();
    let (mut cases, mut counts) = (0, 0);
    for params in sweep_params() {
        let dist = tau_distribution(&params).map_err(|e| e.to_string())?;
        let matrix = brute_force_matrix(&params).map_err(|e| e.to_string())?;
        let oracle = distribution_from_matrix(&matrix).map_err(|e| e.to_string())?;
        let tag = format!("k={} n={}", params.k(), params.n());
        ensure(oracle == dist, || format!("{tag}: tally and coset sweep disagree"))?;
        cases += 1;
        for p in SWEEP_PRIMES.into_iter().filter(|&p| p != params.r()) {
            if !check_eligibility(&params, &CharSpec::prime(p).unwrap()).unwrap().eligible {
                continue;
            }
            let (via_dist, direct) = (complexity_from_distribution(&dist, p), direct_complexity(&matrix, p));
            ensure(via_dist == direct, || format!("{tag} p={p}: {via_dist} vs direct {direct}"))?;
            counts += 1;
        }
    }
    let elapsed = t.elapsed();
    ensure(elapsed < Duration::from_secs(120), || format!("took {elapsed:?}"))?;
    Ok(format!("{cases} primes, {counts} complexity comparisons, 0 mismatches, {elapsed:.2?}"))
}

fn criterion_5() -> Check {
    let (mut closed, mut skipped) = (0, 0);
    for params in sweep_params() {
        let injective = is_s_injective(&params).map_err(|e| e.to_string())?;
        let dist = tau_distribution(&params).map_err(|e| e.to_string())?;
        for p in SWEEP_PRIMES.into_iter().filter(|&p| p != params.r()) {
            if !check_eligibility(&params, &CharSpec::prime(p).unwrap()).unwrap().eligible {
                continue;
            }
            if !injective {
                skipped += 1;
                continue;
            }
            let (generic, cf) =
                (complexity_from_distribution(&dist, p), closed_form_complexity(params.k(), params.n(), p));
            ensure(cf == generic as i64, || {
                format!("k={} n={} p={p}: closed form {cf}, generic {generic}", params.k(), params.n())
            })?;
            closed += 1;
        }
    }
    let mut two = 0;
    for k in (1..=200u64).filter(|k| is_prime(2 * k + 1)) {
        let params = GaussParams::new(k, 2).unwrap();
        let generic = tau_distribution(&params).map_err(|e| e.to_string())?;
        let closed_form = two_coset_distribution(k).map_err(|e| e.to_string())?;
        ensure(generic == closed_form, || format!("n=2 closed form disagrees at k={k}"))?;
        two += 1;
    }
    Ok(format!("{closed} closed-form comparisons ({skipped} exceptional skipped), {two} n=2 cases"))
}

fn criterion_6() -> Check {
    let mut witnesses = Vec::new();
    for (k, n) in [(6u64, 3u64), (7, 6)] {
        let params = GaussParams::new(k, n).unwrap();
        let dist = tau_distribution(&params).map_err(|e| e.to_string())?;
        let differing: Vec<u64> = (2..=k + 6)
            .filter(|&p| is_prime(p) && p != params.r())
            .filter(|&p| check_eligibility(&params, &CharSpec::prime(p).unwrap()).unwrap().eligible)
            .filter(|&p| complexity_from_distribution(&dist, p) as i64 != closed_form_complexity(k, n, p))
            .collect();
        ensure(!differing.is_empty(), || format!("no discrepancy at k={k} n={n}"))?;
        witnesses.push(format!("(k={k}, n={n}) at p in {differing:?}"));
    }
    Ok(witnesses.join(", "))
}

fn criterion_7() -> Check {
    let mut all: Vec<GaussParams> = sweep_params();
    all.extend(golden_rows().iter().map(|r| GaussParams::new(r.k, r.n).unwrap()));
    all.extend((1..=200u64).filter(|k| is_prime(2 * k + 1)).map(|k| GaussParams::new(k, 2).unwrap()));
    all.push(GaussParams::new(20, 1166).unwrap());
    let (mut injective_cases, mut one_hit) = (0, 0);
    for params in &all {
        let (k, n) = (params.k(), params.n());
        let dist = tau_distribution(params).map_err(|e| e.to_string())?;
        sum_identities(&dist)?;
        let tally = build_tally(params).map_err(|e| e.to_string())?;
        let injective = tally.max_multiplicity() <= 1;
        let hits_one = tally.entries().contains_key(&1);
        if injective {
            injective_cases += 1;
            ensure(!hits_one, || format!("1 in the S-map image at injective k={k} n={n}"))?;
            if k >= 3 {
                let a2 = (k - 1) * (k - 2) / 2;
                let as2 = if k % 2 == 0 { (k - 2) / 2 } else { 0 };
                ensure(dist.a()[2] == a2 && dist.a_star()[2] == as2, || {
                    format!("k={k} n={n}: a(2)={} a*(2)={}", dist.a()[2], dist.a_star()[2])
                })?;
                ensure(dist.a()[3..].iter().all(|&c| c == 0), || format!("k={k} n={n}: a(τ>=3) nonzero"))?;
            }
        } else if hits_one {
            one_hit += 1;
        }
    }
    Ok(format!(
        "{} distributions; {injective_cases} injective with 1 absent; 1 present only in {one_hit} non-injective cases",
        all.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("examples exact", criterion_1),
        ("table reproduction", criterion_2),
        ("exceptional sets exact", criterion_3),
        ("oracle equivalence sweep", criterion_4),
        ("closed-form agreement", criterion_5),
        ("known discrepancy witnesses", criterion_6),
        ("invariant suite", criterion_7),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let result = check();
        let elapsed = t.elapsed();
        match result {
            Ok(detail) => println!("PASS [{}] {name} ({elapsed:.2?}): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL [{}] {name} ({elapsed:.2?}): {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
