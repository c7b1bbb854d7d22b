//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line (written
//! straight to stderr so it shows without `--nocapture`) and then asserts.

use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use fermat_forge::bohr::{bohr_members, dilate, fourier_l1, rat, slice_bohr, Arc, BohrSpec};
use fermat_forge::counting::{brute_force_count, count_solutions, popular_cd_check, CountMethod, EquationSpec};
use fermat_forge::harness::{self, structured_set, variant_set, ExperimentConfig, Report};
use fermat_forge::sets::{densecount_set, random_subset, rng, size_for_density};
use fermat_forge::spectral::{convolve, dft, dft_weighted, idft};
use fermat_forge::{DenseComplexFunction, GroupSpec, WeightedFunction};
use num_complex::Complex64;
use rand::Rng;

fn report(id: u32, name: &str, pass: bool, elapsed: Duration, budget: u64, detail: &str) {
    let within = elapsed.as_secs_f64() <= budget as f64;
    let verdict = if pass && within { "PASS" } else { "FAIL" };
    let line =
        format!("{verdict} criterion {id:>2} {name}: {detail} [{:.2}s / {budget}s budget]\n", elapsed.as_secs_f64());
    std::io::stderr().write_all(line.as_bytes()).unwrap();
    assert!(pass, "criterion {id} failed: {detail}");
    assert!(within, "criterion {id} over budget: {:.2}s > {budget}s", elapsed.as_secs_f64());
}

fn shipped(name: &str) -> Report {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    let config = ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    harness::run(&config, None).unwrap()
}

fn column(r: &Report, name: &str) -> Vec<Option<f64>> {
    let i = r.column(name).unwrap_or_else(|| panic!("no column {name}"));
    r.rows.iter().map(|(_, row)| row.values[i].as_f64()).collect()
}

fn text_column(r: &Report, name: &str) -> Vec<String> {
    let i = r.column(name).unwrap();
    r.rows.iter().map(|(_, row)| row.values[i].to_string()).collect()
}

fn small_groups() -> Vec<GroupSpec> {
    let mut gs: Vec<GroupSpec> = (2..=50).map(|n| GroupSpec::cyclic(n).unwrap()).collect();
    for (p, m) in [(2, 2), (2, 3), (2, 4), (2, 5), (3, 2), (3, 3), (5, 2), (7, 2)] {
        gs.push(GroupSpec::field(p, m).unwrap());
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        gs.push(GroupSpec::field(p, 1).unwrap());
    }
    gs
}

fn random_unit(g: &GroupSpec, r: &mut impl Rng) -> u64 {
    loop {
        let c = r.gen_range(1..g.order());
        if g.is_unit(c) {
            return c;
        }
    }
}

fn random_equation(g: &GroupSpec, r: &mut impl Rng) -> EquationSpec {
    let s = r.gen_range(3..=4usize);
    let blocks_count = r.gen_range(1..=s);
    // a random composition of s into blocks_count parts
    let mut cuts: Vec<usize> = (1..s).collect();
    while cuts.len() > blocks_count - 1 {
        cuts.remove(r.gen_range(0..cuts.len()));
    }
    let mut blocks = Vec::new();
    let mut prev = 0;
    for c in cuts.into_iter().chain([s]) {
        blocks.push(c - prev);
        prev = c;
    }
    let mut exponents: Vec<u64> = Vec::new();
    let mut e = 0;
    for _ in 0..blocks.len() {
        e += r.gen_range(1..=2);
        exponents.push(e);
    }
    let coefficients = (0..s).map(|_| random_unit(g, r)).collect();
    let u = r.gen_range(0..g.order());
    EquationSpec::new(g, blocks, exponents, coefficients, u).unwrap()
}

#[test]
fn criterion_01_oracle_equivalence() {
    let t = Instant::now();
    let groups = small_groups();
    let mut r = rng(1, 0);
    let mut instances = 0;
    let mut mismatches = Vec::new();
    for i in 0..480 {
        let g = &groups[i % groups.len()];
        let size = r.gen_range(0..=g.order());
        let a = random_subset(g, size, 1, 1000 + i as u64).unwrap();
        let eq = random_equation(g, &mut r);
        let spectral = count_solutions(&a, &eq, CountMethod::Spectral).unwrap();
        let brute = brute_force_count(&a, &eq).unwrap();
        instances += 1;
        if spectral != brute {
            mismatches.push((g.to_string(), spectral, brute));
        }
    }
    let pass = instances >= 400 && mismatches.is_empty();
    report(
        1,
        "oracle equivalence",
        pass,
        t.elapsed(),
        60,
        &format!("{instances} instances, mismatches {mismatches:?}"),
    );
}

#[test]
fn criterion_02_zero_solution_set() {
    let t = Instant::now();
    let mut counts = Vec::new();
    let mut density = 0.0;
    for p in [101u64, 499] {
        let g = GroupSpec::field(p, 1).unwrap();
        let a = densecount_set(&g).unwrap();
        let eq = EquationSpec::sum_equals_square(&g).unwrap();
        counts.push((p, count_solutions(&a, &eq, CountMethod::Spectral).unwrap(), brute_force_count(&a, &eq).unwrap()));
        density = a.mass() as f64 / p as f64;
    }
    let pass = counts.iter().all(|&(_, s, b)| s == 0 && b == 0) && (density - 0.125).abs() <= 0.03;
    report(
        2,
        "zero-solution set",
        pass,
        t.elapsed(),
        10,
        &format!("(p, spectral, brute) {counts:?}, density at 499 = {density:.4}"),
    );
}

#[test]
fn criterion_03_extremal_guarantee() {
    let t = Instant::now();
    let r = shipped("extremal_gallery.toml");
    let ps = column(&r, "p");
    let counts = column(&r, "count");
    let dev = column(&r, "relative_deviation");
    let exps = text_column(&r, "exponents");
    let blocks = text_column(&r, "blocks");
    let tuples = r.rows.len();
    let all_zero = counts.iter().all(|c| *c == Some(0.0));
    let shape_ok = exps.iter().zip(&blocks).all(|(e, b)| {
        let i_r: u64 = e.split('|').map(|x| x.parse::<u64>().unwrap()).max().unwrap();
        i_r <= 4 && b.split('|').count() <= 2
    }) && ps.iter().all(|p| p.unwrap() <= 499.0);
    let outliers: Vec<String> = (0..tuples)
        .filter(|&i| ps[i].unwrap() >= 211.0 && dev[i].unwrap() > 0.25)
        .map(|i| format!("p={} i={} k={} dev={:.3}", ps[i].unwrap(), exps[i], blocks[i], dev[i].unwrap()))
        .collect();
    let pass = tuples >= 20 && all_zero && shape_ok && outliers.is_empty();
    report(
        3,
        "extremal guarantee",
        pass,
        t.elapsed(),
        120,
        &format!("{tuples} tuples, all zero: {all_zero}, density outliers (p >= 211): {outliers:?}"),
    );
}

#[test]
fn criterion_04_deligne_certification() {
    let t = Instant::now();
    let r = shipped("charsum_batch.toml");
    let sums = r.rows.len();
    let pass_col = text_column(&r, "pass");
    let certified = pass_col.iter().filter(|p| *p == "true").count();
    let pass = sums >= 10_000 && certified == sums && r.all_pass();
    report(4, "Deligne certification", pass, t.elapsed(), 120, &format!("{certified}/{sums} sums certified"));
}

#[test]
fn criterion_05_equidistribution_inequality() {
    let t = Instant::now();
    let r = shipped("equidist_field.toml");
    let orders = column(&r, "order");
    let bound = column(&r, "certified_bound");
    let verdict = text_column(&r, "bound_pass");
    let rows = r.rows.len();
    let field_rows = bound.iter().filter(|b| b.is_some()).count();
    let passing = verdict.iter().filter(|p| *p == "true").count();
    let pass = field_rows >= 500 && passing == rows && orders.iter().all(|q| q.unwrap() <= 1e4);
    report(5, "fiber-count inequality", pass, t.elapsed(), 180, &format!("{passing}/{rows} field rows pass"));
}

#[test]
fn criterion_06_popular_cauchy_davenport() {
    let t = Instant::now();
    let mut checks = 0u64;
    let mut failures = Vec::new();
    for n in 5..=8u64 {
        let g = GroupSpec::cyclic(n).unwrap();
        let subsets: Vec<WeightedFunction> = (1u64..(1 << n))
            .map(|mask| WeightedFunction::indicator(&g, (0..n).filter(|x| mask >> x & 1 == 1)).unwrap())
            .collect();
        for a in &subsets {
            for b in &subsets {
                for tt in 1..=a.mass().min(b.mass()) {
                    checks += 1;
                    let c = popular_cd_check(a, b, tt).unwrap();
                    if !c.pass {
                        failures.push((n, a.support(), b.support(), tt));
                    }
                }
            }
        }
    }
    let exhaustive = checks;
    let mut r = rng(6, 0);
    for i in 0..10_000u64 {
        let n = r.gen_range(9..=60);
        let g = GroupSpec::cyclic(n).unwrap();
        let a = random_subset(&g, r.gen_range(1..=n), 6, 2 * i + 1).unwrap();
        let b = random_subset(&g, r.gen_range(1..=n), 6, 2 * i + 2).unwrap();
        let tt = r.gen_range(1..=a.mass().min(b.mass()));
        checks += 1;
        if !popular_cd_check(&a, &b, tt).unwrap().pass {
            failures.push((n, a.support(), b.support(), tt));
        }
    }
    let pass = failures.is_empty();
    report(
        6,
        "popular Cauchy-Davenport",
        pass,
        t.elapsed(),
        120,
        &format!("{exhaustive} exhaustive + {} random checks, {} failures", checks - exhaustive, failures.len()),
    );
}

#[test]
fn criterion_07_fourier_infrastructure() {
    let t = Instant::now();
    let mut groups: Vec<GroupSpec> = (2..=512).map(|n| GroupSpec::cyclic(n).unwrap()).collect();
    for p in fermat_forge::arith::primes_between(2, 512) {
        let mut m = 1;
        while p.pow(m) <= 512 {
            groups.push(GroupSpec::field(p, m).unwrap());
            m += 1;
        }
    }
    let mut r = rng(7, 0);
    let (mut parseval, mut roundtrip, mut conv) = (0.0f64, 0.0f64, 0.0f64);
    for (i, g) in groups.iter().enumerate() {
        let values: Vec<Complex64> =
            (0..g.size()).map(|_| Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect();
        let f = DenseComplexFunction::new(g, values.clone()).unwrap();
        let s = dft(&f);
        let lhs: f64 = s.values().iter().map(|z| z.norm_sqr()).sum();
        let rhs: f64 = g.order() as f64 * values.iter().map(|z| z.norm_sqr()).sum::<f64>();
        parseval = parseval.max((lhs - rhs).abs() / rhs);
        let back = idft(&s);
        for (a, b) in back.values().iter().zip(&values) {
            roundtrip = roundtrip.max((a - b).norm());
        }
        let a = random_subset(g, r.gen_range(0..=g.order()), 7, 2 * i as u64).unwrap();
        let b = random_subset(g, r.gen_range(0..=g.order()), 7, 2 * i as u64 + 1).unwrap();
        let ab = dft_weighted(&convolve(&a, &b).unwrap());
        let prod = dft_weighted(&a).pointwise(&dft_weighted(&b)).unwrap();
        for (x, y) in ab.values().iter().zip(prod.values()) {
            conv = conv.max((x - y).norm());
        }
    }
    let pass = parseval <= 1e-9 && roundtrip <= 1e-9 && conv <= 1e-8;
    report(
        7,
        "Fourier infrastructure",
        pass,
        t.elapsed(),
        60,
        &format!(
            "{} groups; Parseval {parseval:.2e}, round trip {roundtrip:.2e}, convolution {conv:.2e}",
            groups.len()
        ),
    );
}

#[test]
fn criterion_08_crt_slicing() {
    let t = Instant::now();
    let composites: Vec<u64> =
        (6..=10_000).filter(|&n| GroupSpec::cyclic(n).unwrap().factorization().len() >= 2).collect();
    let mut r = rng(8, 0);
    let mut specs = 0;
    let mut mismatches = 0u64;
    let mut points = 0u64;
    while specs < 60 {
        let n = composites[r.gen_range(0..composites.len())];
        let g = GroupSpec::cyclic(n).unwrap();
        let c = g.as_cyclic().unwrap();
        let fac = c.factorization().to_vec();
        let (p1, m1) = fac[r.gen_range(0..fac.len())];
        let pm = p1.pow(m1);
        let rank = r.gen_range(1..=3);
        let constraints = (0..rank)
            .map(|_| {
                let beta = r.gen_range(0..n);
                let den = r.gen_range(1..=2 * n as i128);
                let a = r.gen_range(0..den);
                let len = r.gen_range(0..=den);
                (beta, Arc::new(rat(a, den), rat(a + len, den)).unwrap())
            })
            .collect();
        let b = BohrSpec::new(&g, constraints).unwrap();
        let ambient = bohr_members(&b);
        let rest = n / pm;
        for v in 0..rest {
            let slice = bohr_members(&slice_bohr(&b, pm, v).unwrap());
            for u in 0..pm {
                points += 1;
                if slice.get(u) != ambient.get(c.crt_join(u, v, pm).unwrap()) {
                    mismatches += 1;
                }
            }
        }
        specs += 1;
    }
    let pass = mismatches == 0;
    report(
        8,
        "CRT slicing",
        pass,
        t.elapsed(),
        60,
        &format!("{specs} specs, {points} points, {mismatches} mismatches"),
    );
}

#[test]
fn criterion_09_bohr_decay() {
    let t = Instant::now();
    let survey = shipped("decay_survey.toml");
    let max_cap = column(&survey, "cap_ratio").into_iter().flatten().fold(0.0, f64::max);
    let cap_rows = column(&survey, "cap_ratio").iter().filter(|c| c.is_some()).count();
    let orders = column(&survey, "order");
    let range_ok = orders.iter().all(|q| (101.0..=1009.0).contains(&q.unwrap()));
    let mut max_diff = column(&survey, "dilation_diff").into_iter().flatten().fold(0.0, f64::max);
    let wrappers = shipped("decay_wrapper.toml");
    max_diff = column(&wrappers, "dilation_diff").into_iter().flatten().fold(max_diff, f64::max);
    // dilations of random wrapper-sized sets in composite moduli as well
    let mut r = rng(9, 0);
    for i in 0..200u64 {
        let g = GroupSpec::cyclic(r.gen_range(10..=2000)).unwrap();
        let w = random_subset(&g, r.gen_range(0..=g.order()), 9, i).unwrap();
        let c = random_unit(&g, &mut r);
        max_diff = max_diff.max((fourier_l1(&dilate(&w, c).unwrap()) - fourier_l1(&w)).abs());
    }
    let pass =
        range_ok && cap_rows > 0 && max_cap <= 8.0 && max_diff <= 1e-8 && survey.all_pass() && wrappers.all_pass();
    report(
        9,
        "Bohr L1 decay",
        pass,
        t.elapsed(),
        180,
        &format!(
            "{cap_rows} rank-1 rows, max ||1_B^||_1 / log p = {max_cap:.4}; max dilation difference {max_diff:.2e}"
        ),
    );
}

#[test]
fn criterion_10_wrapping_pipeline() {
    let t = Instant::now();
    let r = shipped("wrap_demo.toml");
    let completed: Vec<_> = r.rows.iter().filter(|(_, row)| row.status == "ok").collect();
    let aborted = r.rows.iter().filter(|(_, row)| row.status.starts_with("aborted")).count();
    let mut diagnostics_emitted = true;
    let mut hard = true;
    for (_, row) in &completed {
        let d = row.detail.as_ref().expect("wrap rows carry JSON");
        for s in d["sets"].as_array().unwrap() {
            let diag = &s["diagnostics"];
            for key in ["containment", "inner_inclusion", "outer_inclusion", "l1four_pass", "magma_pass"] {
                hard &= diag[key] == serde_json::Value::Bool(true);
            }
            for key in ["y_ratio", "z_ratio", "y_reference", "z_reference"] {
                diagnostics_emitted &= diag[key].as_f64().is_some_and(f64::is_finite);
            }
        }
    }
    let pass = !completed.is_empty() && hard && diagnostics_emitted && r.all_pass() && r.jsonl().is_some();
    report(
        10,
        "wrapping pipeline",
        pass,
        t.elapsed(),
        300,
        &format!(
            "{} runs completed, {aborted} aborted by guard; hard checks {hard}; diagnostics {diagnostics_emitted}",
            completed.len()
        ),
    );
}

#[test]
fn criterion_11_positivity_spot_check() {
    let t = Instant::now();
    let mut tested = 0;
    let mut zero = Vec::new();
    let mut min_norm = f64::INFINITY;
    let density = 0.125 + 0.1;
    for p in [101u64, 211, 499] {
        let g = GroupSpec::field(p, 1).unwrap();
        let eq = EquationSpec::sum_equals_square(&g).unwrap();
        let k = (density * p as f64).ceil() as u64;
        let mut sets: Vec<(String, WeightedFunction)> = Vec::new();
        for j in 0..20u64 {
            sets.push((format!("random {j}"), random_subset(&g, k, 11, j).unwrap()));
        }
        for extra in [0.0, 0.05, 0.15] {
            let size = k.max(size_for_density(&g, density + extra).unwrap());
            sets.push((format!("structured +{extra}"), structured_set(&g, size).unwrap().0));
        }
        let (base, _) = structured_set(&g, k).unwrap();
        let mut r = rng(11, 1000 + p);
        sets.push(("dilate".into(), variant_set(&base, false, &mut r).unwrap().0));
        sets.push(("translate".into(), variant_set(&base, true, &mut r).unwrap().0));
        for (name, a) in &sets {
            assert!(a.mass() as f64 >= density * p as f64);
            let c = count_solutions(a, &eq, CountMethod::Spectral).unwrap();
            tested += 1;
            min_norm = min_norm.min(c as f64 / (p * p) as f64);
            if c == 0 {
                zero.push(format!("p={p} {name}"));
            }
        }
    }
    let pass = tested == 75 && zero.is_empty();
    report(
        11,
        "positivity spot-check",
        pass,
        t.elapsed(),
        120,
        &format!("{tested} sets, min count/p^2 = {min_norm:.4}, zero counts {zero:?}"),
    );
}
