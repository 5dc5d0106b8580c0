//! Acceptance criteria. Each criterion prints one PASS/FAIL line; the
//! process exits nonzero if any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use quadric_core::counting::sample_pair;
use quadric_core::field::prime_power;
use quadric_core::report::headline;
use quadric_core::{
    classify_algebraic, classify_geometric, classify_tangent_count, hyperplane_section_form, katz_bound,
    lemma32_bound, sample_smooth_quadric, sweep, tangent_count, within_bound, Engine, FieldElement, FieldSpec,
    Matrix, PairAnalysis, PointClass, ProjectiveSpace, QuadraticCharacter, QuadraticForm, QuadricPair, ReportRow,
    SweepConfig, WittKind,
};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

fn field(q: u64) -> FieldSpec {
    FieldSpec::from_order(q).unwrap()
}

fn odd_prime_powers(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&q| q % 2 == 1 && prime_power(q).is_some()).collect()
}

fn fixture(f: &FieldSpec) -> QuadraticForm {
    QuadraticForm::diagonal(f, &[f.one(), f.one(), f.neg(f.one())]).unwrap()
}

fn budget(label: &str, elapsed: Duration, limit: Duration) -> (bool, String) {
    (elapsed < limit, format!("{label} {:.2}s (limit {}s)", elapsed.as_secs_f64(), limit.as_secs()))
}

fn c1_planar_agreement() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let (mut points, mut mismatches) = (0u64, 0u64);
    for q in [3u64, 5, 7, 9, 11, 13] {
        let f = field(q);
        let mut forms = vec![fixture(&f)];
        for _ in 0..20 {
            forms.push(sample_smooth_quadric(3, &f, &mut rng).unwrap());
        }
        for form in &forms {
            for p in ProjectiveSpace::new(3, &f).unwrap().points() {
                let a = classify_algebraic(form, &p).unwrap();
                let g = classify_geometric(form, &p).unwrap();
                let t = classify_tangent_count(form, &p).unwrap();
                points += 1;
                mismatches += u64::from(a != g || g != t);
            }
        }
    }
    let (fast, timing) = budget("runtime", start.elapsed(), Duration::from_secs(60));
    Outcome::new(mismatches == 0 && fast, format!("{points} point checks, {mismatches} mismatches, {timing}"))
}

fn c2_dim5_agreement() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1002);
    let (mut points, mut mismatches) = (0u64, 0u64);
    for q in [3u64, 5, 7] {
        let f = field(q);
        for _ in 0..5 {
            let form = sample_smooth_quadric(5, &f, &mut rng).unwrap();
            for p in ProjectiveSpace::new(5, &f).unwrap().points() {
                points += 1;
                mismatches += u64::from(classify_algebraic(&form, &p).unwrap() != classify_geometric(&form, &p).unwrap());
            }
        }
    }
    let (fast, timing) = budget("runtime", start.elapsed(), Duration::from_secs(60));
    Outcome::new(mismatches == 0 && fast, format!("{points} point checks, {mismatches} mismatches, {timing}"))
}

/// Census by tangent lines alone: 1 tangent on the conic, 2 external, 0 internal.
fn tangent_census(form: &QuadraticForm) -> [u64; 3] {
    let f = form.field();
    let mut out = [0u64; 3];
    for p in ProjectiveSpace::new(3, f).unwrap().points() {
        let on = form.eval(p.coords()).is_zero();
        let idx = match (tangent_count(form, &p).unwrap(), on) {
            (1, true) => 0,
            (2, false) => 1,
            (0, false) => 2,
            other => panic!("unexpected tangent configuration {other:?} at {p}"),
        };
        out[idx] += 1;
    }
    out
}

fn c3_conic_census() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1003);
    let (mut conics, mut failures) = (0u64, Vec::new());
    for q in odd_prime_powers(3, 27) {
        let f = field(q);
        let engine = Engine::new(&f);
        let expected = [q + 1, q * (q + 1) / 2, q * (q - 1) / 2];
        // Confirm the closed form with the tangent-count oracle first.
        for form in [fixture(&f), sample_smooth_quadric(3, &f, &mut rng).unwrap()] {
            let oracle = tangent_census(&form);
            if oracle != expected {
                failures.push(format!("q={q}: tangent oracle {oracle:?} vs {expected:?}"));
            }
        }
        let mut check = |form: &QuadraticForm| {
            conics += 1;
            let got = engine.census(form).unwrap();
            if got != expected && failures.len() < 5 {
                failures.push(format!("q={q} '{}': {got:?}", form.to_line()));
            }
        };
        if q <= 7 {
            // Every smooth form in 3 variables.
            let total = q.pow(6);
            for code in 0..total {
                let upper: Vec<FieldElement> =
                    (0..6).map(|i| f.element(((code / q.pow(i)) % q) as u32).unwrap()).collect();
                let form = QuadraticForm::from_upper(3, &f, &upper).unwrap();
                if form.is_smooth() {
                    check(&form);
                }
            }
        } else {
            for _ in 0..300 {
                check(&sample_smooth_quadric(3, &f, &mut rng).unwrap());
            }
        }
    }
    let detail = if failures.is_empty() { format!("{conics} smooth conics") } else { failures.join("; ") };
    Outcome::new(failures.is_empty(), detail)
}

fn c4_section_determinant() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1004);
    let orders = [3u64, 7, 9, 25];
    let fields: Vec<_> = orders.iter().map(|&q| field(q)).collect();
    let mut failures = 0;
    for i in 0..1000 {
        let f = &fields[i % fields.len()];
        let n = rng.gen_range(1..=8usize);
        let a: Vec<_> = (0..=n).map(|_| f.element(rng.gen_range(1..f.q())).unwrap()).collect();
        let mut c = vec![f.one()];
        c.extend((0..n).map(|_| f.element(rng.gen_range(0..f.q())).unwrap()));
        // A_n = diag(1/a_i), B_n = (c_1..c_n ; I_n), E_n = B^t A^{-1} B.
        let a_n = Matrix::diagonal(&a.iter().map(|&x| f.inv(x).unwrap()).collect::<Vec<_>>());
        let mut b = Matrix::zeros(n + 1, n);
        for j in 0..n {
            b.set(0, j, c[j + 1]);
            b.set(j + 1, j, f.one());
        }
        let e = b.transpose().mul(&a_n.inverse(f).unwrap(), f).unwrap().mul(&b, f).unwrap();
        let prod = a.iter().fold(f.one(), |acc, &x| f.mul(acc, x));
        let sum = (0..=n).fold(f.zero(), |acc, i| f.add(acc, f.div(f.mul(c[i], c[i]), a[i]).unwrap()));
        failures += usize::from(e.det(f) != f.mul(prod, sum));
    }
    Outcome::new(failures == 0, format!("1000 instances, {failures} failures"))
}

fn c5_section_discriminant() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1005);
    let (mut checks, mut failures) = (0u64, 0u64);
    for n in [3usize, 5] {
        for q in [3u64, 5, 7, 9] {
            let f = field(q);
            for _ in 0..10 {
                let form = sample_smooth_quadric(n, &f, &mut rng).unwrap();
                let chi_disc = f.chi(form.discriminant());
                for p in ProjectiveSpace::new(n, &f).unwrap().points() {
                    let g = hyperplane_section_form(&form, &p).unwrap().form.discriminant();
                    let fp = form.eval(p.coords());
                    let ok = if fp.is_zero() { g.is_zero() } else { f.chi(g) == f.chi(fp) * chi_disc };
                    checks += 1;
                    failures += u64::from(!ok);
                }
            }
        }
    }
    Outcome::new(failures == 0, format!("{checks} points, {failures} failures"))
}

/// The pairs shared by the identity and bound criteria.
fn identity_configs() -> Vec<(usize, u64)> {
    let mut v: Vec<(usize, u64)> = [7u64, 9, 11].iter().map(|&q| (5, q)).collect();
    v.extend(odd_prime_powers(7, 81).into_iter().map(|q| (3, q)));
    v
}

fn identity_pairs() -> Vec<(QuadricPair, PairAnalysis)> {
    let mut out = Vec::new();
    for (n, q) in identity_configs() {
        let f = field(q);
        let engine = Engine::new(&f);
        let mut rng = ChaCha8Rng::seed_from_u64(1006 + 1000 * n as u64 + q);
        for _ in 0..20 {
            let pair = sample_pair(n, &f, &mut rng).unwrap();
            let analysis = engine.analyze(&pair).unwrap();
            out.push((pair, analysis));
        }
    }
    out
}

fn c6_indicator_identity() -> Outcome {
    let start = Instant::now();
    let pairs = identity_pairs();
    let mut failures = 0;
    for (_, a) in &pairs {
        let c = &a.chars;
        let s = &c.sums;
        let (chi_a, chi_b, chi_ab) = (c.chi_a.value(), c.chi_b.value(), c.chi_ab.value());
        let count = |x: PointClass, y: PointClass| 4 * a.joint.count(x, y) as i64;
        use PointClass::{External as E, Internal as I};
        let ok = count(E, I) == s.t22 + chi_a * s.t12 - chi_b * s.t21 - chi_ab * s.t11
            && count(I, I) == s.t22 - chi_a * s.t12 - chi_b * s.t21 + chi_ab * s.t11
            && count(E, E) == s.t22 + chi_a * s.t12 + chi_b * s.t21 + chi_ab * s.t11
            && count(I, E) == s.t22 - chi_a * s.t12 + chi_b * s.t21 - chi_ab * s.t11;
        failures += usize::from(!ok);
    }
    let (fast, timing) = budget("runtime", start.elapsed(), Duration::from_secs(300));
    Outcome::new(failures == 0 && fast, format!("{} pairs, {failures} identity failures, {timing}", pairs.len()))
}

fn c7_explicit_bounds() -> Outcome {
    let pairs = identity_pairs();
    let (mut t11_bad, mut katz_bad, mut t12_bad, mut trivial_bad) = (0, 0, 0, 0);
    let mut worst_katz = (0.0f64, String::new());
    for (pair, a) in &pairs {
        let f = pair.field();
        let q = f.q() as u64;
        let engine = Engine::new(f);
        if !within_bound(a.chars.sums.t11, lemma32_bound(pair.n(), q).unwrap()) {
            t11_bad += 1;
        }
        let kb = katz_bound(pair.n(), q);
        for form in [pair.c(), pair.d()] {
            let s = engine.single_form_char_sum(form).unwrap();
            if !within_bound(s, kb) {
                katz_bad += 1;
                let ratio = s.unsigned_abs() as f64 / kb;
                if ratio > worst_katz.0 {
                    worst_katz = (ratio, format!("|sum| = {} vs {kb:.3} at n={}, q={q}", s.abs(), pair.n()));
                }
            }
        }
        let whole = engine.single_form_char_sum(pair.c()).unwrap();
        let restricted = engine.restricted_char_sum(pair.c(), pair.d()).unwrap();
        t12_bad += usize::from(a.chars.sums.t12 != whole - restricted);
        let zeros_g = engine.census(pair.d()).unwrap()[PointClass::OnQuadric.index()];
        trivial_bad += usize::from(restricted.unsigned_abs() > zeros_g);
    }
    let mut detail = format!(
        "{} pairs: T11 bound violations {t11_bad}, single-form sum bound violations {katz_bad}/{}, \
         T12 decomposition failures {t12_bad}, restricted-sum bound violations {trivial_bad}",
        pairs.len(),
        2 * pairs.len()
    );
    if katz_bad > 0 {
        detail.push_str(&format!("; worst {}", worst_katz.1));
    }
    Outcome::new(t11_bad + katz_bad + t12_bad + trivial_bad == 0, detail)
}

fn c8_sweep_shape() -> Outcome {
    let start = Instant::now();
    let q_list = odd_prime_powers(7, 81);
    let reports = sweep(&SweepConfig { n: 3, q_list, trials: 20, seed: 42, workers: 1 }).unwrap();
    let (mut identity_bad, mut t11_bad, mut katz_bad, mut t12_bad, mut budget_bad) = (0, 0, 0, 0, 0);
    for r in &reports {
        let pair = &r.pair;
        let f = pair.field();
        let q = f.q() as u64;
        let engine = Engine::new(f);
        let s = &r.chars.sums;
        identity_bad += usize::from(!r.chars.all_identities_hold());
        t11_bad += usize::from(!within_bound(s.t11, lemma32_bound(3, q).unwrap()));
        let kb = katz_bound(3, q);
        for form in [pair.c(), pair.d()] {
            katz_bad += usize::from(!within_bound(engine.single_form_char_sum(form).unwrap(), kb));
        }
        let whole = engine.single_form_char_sum(pair.c()).unwrap();
        let restricted = engine.restricted_char_sum(pair.c(), pair.d()).unwrap();
        t12_bad += usize::from(s.t12 != whole - restricted);
        // |4 #S - T22| <= |T12| + |T21| + |T11| and T22 = #P^2 - #{fg = 0}.
        let points = (q * q + q + 1) as i64;
        let lhs = (4 * r.joint.s_fg as i64 - s.t22).abs();
        let ok = lhs <= s.t12.abs() + s.t21.abs() + s.t11.abs() && s.t22 == points - s.zeros_fg as i64;
        budget_bad += usize::from(!ok);
    }
    let top = headline(&reports).unwrap_or(f64::NAN);
    let (fast, timing) = budget("runtime", start.elapsed(), Duration::from_secs(300));
    let pass = identity_bad + t11_bad + katz_bad + t12_bad + budget_bad == 0 && fast;
    Outcome::new(
        pass,
        format!(
            "{} pairs, max |#S - q^2/4|/q^1.5 = {top:.6}; identity failures {identity_bad}, T11 bound violations \
             {t11_bad}, single-form sum bound violations {katz_bad}, T12 decomposition failures {t12_bad}, \
             budget failures {budget_bad}, {timing}",
            reports.len()
        ),
    )
}

fn csv_body(a: &PairAnalysis, pair: &QuadricPair) -> Vec<u8> {
    let report = quadric_core::PairReport { seed: 0, pair_id: 0, pair: pair.clone(), joint: a.joint.clone(), chars: a.chars.clone() };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.serialize(ReportRow::from(&report)).unwrap();
    w.into_inner().unwrap()
}

fn best_of<T>(runs: usize, mut f: impl FnMut() -> T) -> (Duration, T) {
    let mut best = Duration::MAX;
    let mut last = None;
    for _ in 0..runs {
        let start = Instant::now();
        let v = f();
        best = best.min(start.elapsed());
        last = Some(v);
    }
    (best, last.unwrap())
}

fn c9_performance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1009);
    let f343 = field(343);
    let big = sample_pair(3, &f343, &mut rng).unwrap();
    let f11 = field(11);
    let dim5 = sample_pair(5, &f11, &mut rng).unwrap();

    let single = Engine::new(&f343);
    let (t343, _) = best_of(1, || single.count_joint(&big).unwrap());
    let (ok343, m343) = budget("n=3 q=343", t343, Duration::from_secs(10));
    let (t11, _) = best_of(1, || Engine::new(&f11).count_joint(&dim5).unwrap());
    let (ok11, m11) = budget("n=5 q=11", t11, Duration::from_secs(5));

    let quad = Engine::new(&f343).with_workers(4);
    let (s1, a1) = best_of(5, || single.analyze(&big).unwrap());
    let (s4, a4) = best_of(5, || quad.analyze(&big).unwrap());
    let identical = csv_body(&a1, &big) == csv_body(&a4, &big);
    let speedup = s1.as_secs_f64() / s4.as_secs_f64();
    let cpus = std::thread::available_parallelism().map_or(1, usize::from);
    Outcome::new(
        ok343 && ok11 && identical && speedup >= 2.0,
        format!("{m343}; {m11}; 4-worker speedup {speedup:.2}x (need >= 2, {cpus} CPU(s) available); byte-identical {identical}"),
    )
}

/// Projective zeros counted from the affine cone over `F_q^m`.
fn cone_zero_count(form: &QuadraticForm) -> u64 {
    let f = form.field();
    let q = f.q() as u64;
    let m = form.n();
    let mut v = vec![f.zero(); m];
    let mut affine = 0u64;
    for code in 0..q.pow(m as u32) {
        let mut c = code;
        for x in v.iter_mut() {
            *x = f.element((c % q) as u32).unwrap();
            c /= q;
        }
        affine += u64::from(form.eval(&v).is_zero());
    }
    (affine - 1) / (q - 1)
}

fn c10_witt_zero_counts() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let mut failures = Vec::new();
    let mut checks = 0;
    let mut seen = std::collections::BTreeSet::new();
    // m = 2, 3 first: these confirm the closed forms against the cone count.
    for m in [2usize, 3, 4, 5] {
        for q in [3u64, 5, 7, 9] {
            let f = field(q);
            let mut forms = Vec::new();
            for t in [f.one(), f.non_square_witness()] {
                let mut d = vec![f.one(); m];
                d[m - 1] = t;
                forms.push(QuadraticForm::diagonal(&f, &d).unwrap());
            }
            for _ in 0..3 {
                forms.push(sample_smooth_quadric(m, &f, &mut rng).unwrap());
            }
            for form in &forms {
                let class = form.witt_classify().unwrap();
                seen.insert((m, class.kind == WittKind::Hyperbolic, class.kind == WittKind::Elliptic));
                let closed = class.projective_zero_count(q);
                let enumerated = form.projective_zero_count();
                let cone = cone_zero_count(form);
                checks += 1;
                if closed != enumerated || closed != cone {
                    failures.push(format!("m={m} q={q} {}: closed {closed}, enumerated {enumerated}, cone {cone}", class.kind));
                }
            }
        }
    }
    let covered = [2, 4].iter().all(|&m| seen.contains(&(m, true, false)) && seen.contains(&(m, false, true)));
    let detail = if failures.is_empty() {
        format!("{checks} forms, both even-dimension classes covered: {covered}")
    } else {
        failures.join("; ")
    };
    Outcome::new(failures.is_empty() && covered, detail)
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("planar three-way classifier agreement", c1_planar_agreement),
        ("five-variable classifier agreement", c2_dim5_agreement),
        ("single conic census", c3_conic_census),
        ("section determinant identity", c4_section_determinant),
        ("section discriminant square class", c5_section_discriminant),
        ("exact indicator identity", c6_indicator_identity),
        ("explicit character sum bounds", c7_explicit_bounds),
        ("sweep shape and arithmetic budget", c8_sweep_shape),
        ("performance floor", c9_performance),
        ("Witt zero-count table", c10_witt_zero_counts),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !filter.is_empty() && !filter.iter().any(|f| f == &id.to_string()) {
            continue;
        }
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|e| {
                let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
                Outcome::new(false, format!("panicked: {}", msg.unwrap_or_default()))
            });
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!outcome.pass);
        println!("criterion {id:>2} {status} {name} ({:.2}s): {}", start.elapsed().as_secs_f64(), outcome.detail);
    }
    println!("acceptance: {} failed", failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
