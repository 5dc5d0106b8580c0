//! Pinned-seed property batteries covering every module, run by the
//! `selftest` subcommand.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classify::{
    classify_algebraic, classify_geometric, classify_tangent_count, hyperplane_section_form, PointClass,
};
use crate::counting::{
    katz_bound, lemma32_bound, sample_pair, sample_smooth_quadric, within_bound, Engine, PairAnalysis, QuadricPair,
};
use crate::error::Result;
use crate::field::{CharTable, CharValue, FieldElement, FieldSpec, QuadraticCharacter};
use crate::forms::{QuadraticForm, WittKind};
use crate::linalg::Matrix;
use crate::projective::{enumerate_points, ProjectivePoint, ProjectiveSpace};

#[derive(Clone, Debug)]
pub struct SelftestOptions {
    /// Reduced sizes.
    pub quick: bool,
    pub seed: u64,
    pub workers: usize,
    /// Flips one entry of the character table used by the counting
    /// batteries. Negative control only.
    pub corrupt_char_table: bool,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        SelftestOptions { quick: false, seed: 42, workers: 1, corrupt_char_table: false }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BatteryOutcome {
    pub name: &'static str,
    pub checks: u64,
    pub failures: u64,
    pub first_failure: Option<String>,
    pub seconds: f64,
}

impl BatteryOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Default)]
struct Tally {
    checks: u64,
    failures: u64,
    first: Option<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.first.is_none() {
                self.first = Some(what());
            }
        }
    }
}

type Battery = fn(&mut Context, &mut Tally) -> Result<()>;

pub const BATTERY_NAMES: [&str; 23] = [
    "field.character",
    "field.char_table",
    "field.axioms",
    "forms.section_determinant",
    "forms.congruence",
    "forms.zero_counts",
    "forms.hyperbolic_exceeds_elliptic",
    "projective.counts",
    "projective.partition",
    "projective.normalize",
    "classify.section_discriminant",
    "classify.planar_agreement",
    "classify.dim5_agreement",
    "classify.scaling",
    "classify.census",
    "counting.conservation",
    "counting.identity",
    "counting.lemma32",
    "counting.katz",
    "counting.main_term",
    "counting.t12_decomposition",
    "counting.determinism",
    "counting.sampling",
];

const BATTERIES: [Battery; 23] = [
    field_character,
    field_char_table,
    field_axioms,
    forms_section_determinant,
    forms_congruence,
    forms_zero_counts,
    forms_hyperbolic_exceeds_elliptic,
    projective_counts,
    projective_partition,
    projective_normalize,
    classify_section_discriminant,
    classify_planar_agreement,
    classify_dim5_agreement,
    classify_scaling,
    classify_census,
    counting_conservation,
    counting_identity,
    counting_lemma32,
    counting_katz,
    counting_main_term,
    counting_t12_decomposition,
    counting_determinism,
    counting_sampling,
];

struct Context {
    opts: SelftestOptions,
    fields: BTreeMap<u64, FieldSpec>,
    pairs: Option<Vec<(QuadricPair, PairAnalysis)>>,
}

impl Context {
    fn field(&mut self, q: u64) -> Result<FieldSpec> {
        if let Some(f) = self.fields.get(&q) {
            return Ok(f.clone());
        }
        let f = FieldSpec::from_order(q)?;
        self.fields.insert(q, f.clone());
        Ok(f)
    }

    fn rng(&self, battery: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.opts.seed);
        rng.set_stream(battery);
        rng
    }

    fn engine(&self, field: &FieldSpec) -> Result<Engine> {
        if !self.opts.corrupt_char_table {
            return Ok(Engine::new(field).with_workers(self.opts.workers));
        }
        let mut table = CharTable::new(field)?;
        table.corrupt(field.one());
        Ok(Engine::with_char_table(field, table)?.with_workers(self.opts.workers))
    }

    /// `(n, q, pairs)` configurations shared by the counting batteries.
    fn pair_configs(&self) -> Vec<(usize, u64, usize)> {
        if self.opts.quick {
            vec![(3, 7, 3), (3, 9, 3), (5, 7, 1)]
        } else {
            let mut v: Vec<_> = [7, 9, 11].iter().flat_map(|&q| [(3, q, 20), (5, q, 20)]).collect();
            v.extend([13, 25, 27].iter().map(|&q| (3, q, 20)));
            v
        }
    }

    fn pairs(&mut self) -> Result<&[(QuadricPair, PairAnalysis)]> {
        if self.pairs.is_none() {
            let mut out = Vec::new();
            for (n, q, trials) in self.pair_configs() {
                let field = self.field(q)?;
                let engine = self.engine(&field)?;
                let mut rng = self.rng(1000 + 100 * n as u64 + q);
                for _ in 0..trials {
                    let pair = sample_pair(n, &field, &mut rng)?;
                    let analysis = engine.analyze(&pair)?;
                    out.push((pair, analysis));
                }
            }
            self.pairs = Some(out);
        }
        Ok(self.pairs.as_deref().unwrap_or_default())
    }
}

/// Runs every battery in order, calling `on_done` after each one.
pub fn run_selftest(opts: &SelftestOptions, mut on_done: impl FnMut(&BatteryOutcome)) -> Vec<BatteryOutcome> {
    let mut ctx = Context { opts: opts.clone(), fields: BTreeMap::new(), pairs: None };
    let mut out = Vec::with_capacity(BATTERIES.len());
    for (name, battery) in BATTERY_NAMES.iter().zip(BATTERIES) {
        let start = Instant::now();
        let mut tally = Tally::default();
        if let Err(e) = battery(&mut ctx, &mut tally) {
            tally.check(false, || format!("error: {e}"));
        }
        let outcome = BatteryOutcome {
            name,
            checks: tally.checks,
            failures: tally.failures,
            first_failure: tally.first,
            seconds: start.elapsed().as_secs_f64(),
        };
        on_done(&outcome);
        out.push(outcome);
    }
    out
}

/// Both sides of the section determinant identity: for nonzero `a_0..a_n`
/// and `c = (1, c_1..c_n)`, `det(B^t diag(a) B) = a_0...a_n * sum c_i^2 / a_i`
/// where `B` stacks the row `(c_1..c_n)` on `I_n`.
pub fn section_determinant_sides(
    field: &FieldSpec,
    a: &[FieldElement],
    c_tail: &[FieldElement],
) -> Result<(FieldElement, FieldElement)> {
    let n = c_tail.len();
    if a.len() != n + 1 {
        return Err(crate::Error::DimensionMismatch { expected: n + 1, got: a.len() });
    }
    let mut b = Matrix::zeros(n + 1, n);
    for (j, &cj) in c_tail.iter().enumerate() {
        b.set(0, j, cj);
        b.set(j + 1, j, FieldElement::ONE);
    }
    let e = b.transpose().mul(&Matrix::diagonal(a), field)?.mul(&b, field)?;
    let lhs = e.det(field);
    let prod = a.iter().fold(field.one(), |acc, &x| field.mul(acc, x));
    let mut sum = field.inv(a[0])?;
    for (i, &ci) in c_tail.iter().enumerate() {
        sum = field.add(sum, field.div(field.mul(ci, ci), a[i + 1])?);
    }
    Ok((lhs, field.mul(prod, sum)))
}

fn random_element<R: Rng>(field: &FieldSpec, rng: &mut R) -> FieldElement {
    field.element(rng.gen_range(0..field.q())).expect("index below q")
}

fn random_nonzero<R: Rng>(field: &FieldSpec, rng: &mut R) -> FieldElement {
    field.element(rng.gen_range(1..field.q())).expect("index below q")
}

fn random_invertible<R: Rng>(field: &FieldSpec, n: usize, rng: &mut R) -> Matrix {
    loop {
        let rows = (0..n).map(|_| (0..n).map(|_| random_element(field, rng)).collect()).collect();
        let m = Matrix::from_rows(rows).expect("rectangular");
        if !m.det(field).is_zero() {
            return m;
        }
    }
}

fn small_orders(quick: bool) -> &'static [u64] {
    if quick {
        &[3, 5, 9]
    } else {
        &[3, 5, 7, 9, 11, 13, 17, 19, 23, 25, 27]
    }
}

fn field_character(ctx: &mut Context, t: &mut Tally) -> Result<()> {
    let orders: &[u64] = if ctx.opts.quick { &[3, 5, 9, 25] } else { &[3, 5, 7, 9, 11, 13, 25, 27, 49, 81, 125, 243] };
    for &q in orders {
        let f = ctx.field(q)?;
        let nonzero: Vec<_> = f.elements().filter(|a| !a.is_zero()).collect();
        let mut squares = 0;
        for &a in &nonzero {
            let ca = f.chi(a);
            squares += (ca == CharValue::Square) as u64;
            t.check(f.chi(f.mul(a, a)) == CharValue::Square, || format!("chi(a^2) != 1 for a = {a}, q = {q}"));
            t.check(f.chi(f.inv(a).expect("nonzero")) == ca, || format!("chi(1/a) != chi(a), a = {a}, q = {q}"));
            for &b in &nonzero {
                if f.chi(f.mul(a, b)) != ca * f.chi(b) {
                    t.check(false, || format!("chi not multiplicative at ({a}, {b}), q = {q}"));
                }
            }
        }
        t.check(squares == (q - 1) / 2, || format!("{squares} nonzero squares in F_{q}"));
        t.check(f.chi(f.zero()) == CharValue::Zero, || format!("chi(0) != 0 in F_{q}"));
    }
    Ok(())
}

fn field_char_table(ctx: &mut Context, t: &mut Tally) -> Result<()> {
    let orders: &[u64] = if ctx.opts.quick { &[3, 9, 27] } else { &[3, 5, 7, 9, 25, 27, 49, 81, 121, 343, 729, 2187, 6561] };
    for &q in orders {
        let f = ctx.field(q)?;
        let table = CharTable::new(&f)?;
        t.check(table.len() == q as usize, || format!("table length {} for q = {q}", table.len()));
        for a in f.elements() {
            if table.get(a) != f.quadratic_character(a) {
                t.check(false, || format!("table and Euler criterion disagree at {a}, q = {q}"));
            }
        }
        t.check(true, String::new);
    }
    Ok(())
}

fn field_axioms(ctx: &mut Context, t: &mut Tally) -> Result<()> {
    for &q in small_orders(ctx.opts.quick) {
        let f = ctx.field(q)?;
        let els: Vec<_> = f.elements().collect();
        for &a in &els {
            t.check(f.add(a, f.neg(a)).is_zero(), || format!("a + (-a) != 0 at {a}, q = {q}"));
            if !a.is_zero() {
                t.check(f.mul(a, f.inv(a)?) == f.one(), || format!("a * a^-1 != 1 at {a}, q = {q}"));
            }
            for &b in &els {
                for &c in &els {
                    let ok = f.add(f.add(a, b), c) == f.add(a, f.add(b, c))
                        && f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
                        && f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c));
                    if !ok {
                        t.check(false, || format!("axiom failure at ({a}, {b}, {c}), q = {q}"));
                    }
                }
            }
        }
    }
    Ok(())
}

fn forms_section_determinant(ctx: &mut Context, t: &mut Tally) -> Result<()> {
    let instances = if ctx.opts.quick { 100 } else { 1000 };
    let mut rng = ctx.rng(4);
    let orders = [3u64, 7, 9, 25];
    for i in 0..instances {
        let f = ctx.field(orders[i % orders.len()])?;
        let n = rng.gen_range(1..=8);
        let a: Vec<_> = (0..=n).map(|_| random_nonzero(&f, &mut rng)).collect();
        let c: Vec<_> = (0..n).map(|_| random_element(&f, &mut rng)).collect();
        let (lhs, rhs) = section_determinant_sides(&f, &a, &c)?;
        t.check(lhs == rhs, || format!("instance {i}: det {lhs} != {rhs} over F_{}", f.q()));
    }
    Ok(())
}

fn forms_congruence(ctx: &mut Context, t: &mut Tally) -> Result<()> {
    let per = if ctx.opts.quick { 3 } else { 25 };
    let mut rng = ctx.rng(5);
    for q in [3u64, 5, 7, 9] {
        let f = ctx.field(q)?;
        for m in 2..=5 {
            for _ in 0..per {
                let form = sample_smooth_quadric(m, &f, &mut rng)?;
                let s = random_invertible(&f, m, &mut rng);
                let image = form.congruent(&s)?;
                let det_s = s.det(&f);
                t.check(image.witt_classify()? == form.witt_classify()?, || {
                    format!("Witt class changed under congruence, m = {m}, q = {q}")
                });
                t.check(image.discriminant() == f.mul(form.discriminant(), f.mul(det_s, det_s)), || {
                    format!("disc(S^t A S) != det(S)^2 disc(A), m = {m}, q = {q}")
                });
                let dual = form.dual_form()?;
                t.check(dual.dual_form()? == form, || format!("dual is not an involution, m = {m}, q = {q}"));
            }
        }
    }
    Ok(())
}

/// Forms covering every Witt class for `m` variables: the diagonal forms
/// `diag(1, ..., 1, t)` for `t` square and non-square, plus random ones.
fn witt_witnesses(f: &FieldSpec, m: usize, random: usize, rng: &mut ChaCha8Rng) -> Result<Vec<QuadraticForm>> {
    let mut out = Vec::new();
    for t in [f.one(), f.non_square_witness()] {
        let mut d = vec![f.one(); m];
        d[m - 1] = t;
        out.push(QuadraticForm::diagonal(f, &d)?);
    }
    for _ in 0..random {
        out.push(sample_smooth_quadric(m, f, rng)?);
    }
    Ok(out)
}

fn forms_zero_counts(ctx: &mut Context, t: &mut Tally) -> Result<()> {
    let random = if ctx.opts.quick { 1 } else { 4 };
    let mut rng = ctx.rng(6);
    let (orders, max_m): (&[u64], usize) = if ctx.opts.quick { (&[3, 5], 4) } else { (&[3, 5, 7, 9], 5) };
    for &q in orders {
        let f = ctx.field(q)?;
        for m in 1..=max_m {
            for form in witt_witnesses(&f, m, random, &mut rng)? {
                let class = form.witt_classify()?;
                let counted = form.projective_zero_count();
                let expected = class.projective_zero_count(q);
                t.check(counted == expected, || {
                    format!("{} form with m = {m}, q = {q}: {counted} zeros, closed form {expected}", class.kind)
                });
            }
        }
    }
    Ok(())
}

fn forms_hyperbolic_exceeds_elliptic(ctx: &mut Context, t: &mut Tally) -> Result<()> {
    let mut rng = ctx.rng(7);
    let (orders, ms): (&[u64], &[usize]) = if ctx.opts.quick { (&[3, 5], &[2, 4]) } else { (&[3, 5, 7, 9], &[2, 4]) };
    for &q in orders {
        let f = ctx.field(q)?;
        for &m in ms {
            let mut hyp = None;
            let mut ell = None;
            for form in witt_witnesses(&f, m, 0, &mut rng)? {
                match form.witt_classify()?.kind {
                    WittKind::Hyperbolic => hyp = Some(form.projective_zero_count()),
                    WittKind::Elliptic => ell = Some(form.projective_zero_count()),
                    WittKind::Parabolic => {}
                }
            }
            t.check(matches!((hyp, ell), (Some(h), Some(e)) if h > e), || {
                format!("m = {m}, q = {q}: hyperbolic {hyp:?} vs elliptic {ell:?}")
            });
        }
    }
    Ok(())
}

fn projective_counts(ctx: &mut Context, t: &mut Tally) -> Result<()> {
    for q in [3u64, 5, 7, 9] {
        let f = ctx.field(q)?;
        for n in 1..=5usize {
            let expected = (q.pow(n as u32) - 1) / (q - 1);
            let space = ProjectiveSpace::new(n, &f)?;
            t.check(space.len() == expected, || format!("|P^{}(F_{q})| = {}", n - 1, space.len()));
            if n >= 2 && (!ctx.opts.quick || n <= 3) {
                let listed = enumerate_points(n, &f)?.len() as u64;
                t.check(listed == expected, || format!("enumerate_points({n}, F_{q}) listed {listed}"));
            }
        }
    }
    Ok(())
}

fn projective_partition(ctx: &mut Context, t: &mut Tally) -> Result<()> {
    for (n, q) in [(3usize, 9u64), (4, 5), (5, 3)] {
        let f = ctx.field(q)?;
        let space = ProjectiveSpace::new(n, &f)?;
        let mut reference: Vec<Vec<u32>> = space.points().map(|p| p.coords().iter().map(|x| x.index()).collect()).collect();
        reference.sort();
        for parts in 1..=7 {
            let mut merged = Vec::new();
            for range in space.partition(parts) {
                let mut cursor = space.cursor(range);
                while let Some(x) = cursor.next_coords() {
                    merged.push(x.iter().map(|e| e.index()).collect::<Vec<_>>());
                }
            }
            merged.sort();
            t.check(merged == reference, || format!("partition into {parts} differs, n = {n}, q = {q}"));
        }
    }
    Ok(())
}

fn projective_normalize(ctx: &mut Context, t: &mut Tally) -> Result<()> {
    let mut rng = ctx.rng(10);
    let vectors = if ctx.opts.quick { 20 } else { 200 };
    for q in [3u64, 5, 9, 25] {
        let f = ctx.field(q)?;
        for _ in 0..vectors {
            let n = rng.gen_range(1..=5);
            let v: Vec<_> = (0..n).map(|_| random_element(&f, &mut rng)).collect();
            if v.iter().all(|x| x.is_zero()) {
                continue;
            }
            let p = ProjectivePoint::normalize(&f, &v)?;
            t.check(ProjectivePoint::normalize(&f, p.coords())? == p, || format!("normalize not idempotent on {p}"));
            for lam in f.elements().filter(|x| !x.is_zero()) {
                let w: Vec<_> = v.iter().map(|&x| f.mul(lam, x)).collect();
                if ProjectivePoint::normalize(&f, &w)? != p {
                    t.check(false, || format!("normalize differs on the orbit of {p}, q = {q}"));
                }
            }
        }
    }
    Ok(())
}

fn classify_section_discriminant(ctx: &mut Context, t: &mut Tally) -> Result<()> {
    let per = if ctx.opts.quick { 2 } else { 10 };
    let mut rng = ctx.rng(11);
    for n in [3usize, 5] {
        for q in [3u64, 5, 7, 9] {
            let f = ctx.field(q)?;
            for _ in 0..per {
                let form = sample_smooth_quadric(n, &f, &mut rng)?;
                let chi_disc = f.chi(form.discriminant());
                for p in ProjectiveSpace::new(n, &f)?.points() {
                    let g_disc = hyperplane_section_form(&form, &p)?.form.discriminant();
                    let fp = form.eval(p.coords());
                    let ok = if fp.is_zero() { g_disc.is_zero() } else { f.chi(g_disc) == f.chi(fp) * chi_disc };
                    if !ok {
                        t.check(false, || format!("section discriminant at {p}, n = {n}, q = {q}"));
                    }
                }
                t.check(true, String::new);
            }
        }
    }
    Ok(())
}

fn classify_planar_agreement(ctx: &mut Context, t: &mut Tally) -> Result<()> {
    let (orders, per): (&[u64], usize) = if ctx.opts.quick { (&[3, 5, 7], 3) } else { (&[3, 5, 7, 9, 11, 13], 20) };
    let mut rng = ctx.rng(12);
    for &q in orders {
        let f = ctx.field(q)?;
        let mut forms = vec![QuadraticForm::diagonal(&f, &[f.one(), f.one(), f.neg(f.one())])?];
        for _ in 0..per {
            forms.push(sample_smooth_quadric(3, &f, &mut rng)?);
        }
        for form in &forms {
            for p in ProjectiveSpace::new(3, &f)?.points() {
                let a = classify_algebraic(form, &p)?;
                let g = classify_geometric(form, &p)?;
                let c = classify_tangent_count(form, &p)?;
                t.check(a == g && g == c, || format!("{p}: {a} {g} {c} for '{}'", form.to_line()));
            }
        }
    }
    Ok(())
}

fn classify_dim5_agreement(ctx: &mut Context, t: &mut Tally) -> Result<()> {
    let (orders, per): (&[u64], usize) = if ctx.opts.quick { (&[3, 5], 1) } else { (&[3, 5, 7], 5) };
    let mut rng = ctx.rng(13);
    for &q in orders {
        let f = ctx.field(q)?;
        for _ in 0..per {
            let form = sample_smooth_quadric(5, &f, &mut rng)?;
            for p in ProjectiveSpace::new(5, &f)?.points() {
                let a = classify_algebraic(&form, &p)?;
                let g = classify_geometric(&form, &p)?;
                t.check(a == g, || format!("{p}: {a} {g} for '{}'", form.to_line()));
            }
        }
    }
    Ok(())
}

fn classify_scaling(ctx: &mut Context, t: &mut Tally) -> Result<()> {
    let per = if ctx.opts.quick { 1 } else { 5 };
    let mut rng = ctx.rng(14);
    for q in [5u64, 7, 9] {
        let f = ctx.field(q)?;
        for n in [3usize, 5] {
            for _ in 0..per {
                let form = sample_smooth_quadric(n, &f, &mut rng)?;
                let c = random_nonzero(&f, &mut rng);
                let scaled = form.scaled(c);
                for p in ProjectiveSpace::new(n, &f)?.points() {
                    let before = classify_algebraic(&form, &p)?;
                    let after = classify_algebraic(&scaled, &p)?;
                    if before != after {
                        t.check(false, || format!("{p}: {before} became {after} under scaling by {c}, q = {q}"));
                    }
                }
                t.check(true, String::new);
            }
        }
    }
    Ok(())
}

fn classify_census(ctx: &mut Context, t: &mut Tally) -> Result<()> {
    let per = if ctx.opts.quick { 2 } else { 5 };
    let mut rng = ctx.rng(15);
    for &q in small_orders(ctx.opts.quick) {
        let f = ctx.field(q)?;
        let engine = Engine::new(&f);
        let expected = [q + 1, q * (q + 1) / 2, q * (q - 1) / 2];
        for _ in 0..per {
            let form = sample_smooth_quadric(3, &f, &mut rng)?;
            let census = engine.census(&form)?;
            t.check(census == expected, || format!("census {census:?} != {expected:?} for '{}'", form.to_line()));
        }
    }
    Ok(())
}

fn counting_conservation(ctx: &mut Context, t: &mut Tally) -> Result<()> {
    for (pair, a) in ctx.pairs()? {
        let q = pair.field().q() as u64;
        let expected = (q.pow(pair.n() as u32) - 1) / (q - 1);
        t.check(a.joint.total() == expected, || format!("census total {} != {expected}", a.joint.total()));
    }
    Ok(())
}

fn counting_identity(ctx: &mut Context, t: &mut Tally) -> Result<()> {
    for (pair, a) in ctx.pairs()? {
        t.check(a.chars.all_identities_hold(), || {
            format!("indicator identity fails for '{}' / '{}'", pair.c().to_line(), pair.d().to_line())
        });
    }
    Ok(())
}

fn counting_lemma32(ctx: &mut Context, t: &mut Tally) -> Result<()> {
    for (pair, a) in ctx.pairs()? {
        let bound = lemma32_bound(pair.n(), pair.field().q() as u64)?;
        t.check(within_bound(a.chars.sums.t11, bound), || format!("|T11| = {} > {bound}", a.chars.sums.t11.abs()));
    }
    Ok(())
}

fn counting_katz(ctx: &mut Context, t: &mut Tally) -> Result<()> {
    let opts = ctx.opts.clone();
    let pairs: Vec<QuadricPair> = ctx.pairs()?.iter().map(|(p, _)| p.clone()).collect();
    for pair in pairs {
        let f = pair.field().clone();
        let engine = Engine::new(&f).with_workers(opts.workers);
        let bound = katz_bound(pair.n(), f.q() as u64);
        for form in [pair.c(), pair.d()] {
            let s = engine.single_form_char_sum(form)?;
            t.check(within_bound(s, bound), || {
                format!("|sum chi(f)| = {} > {bound:.4} for n = {}, q = {}", s.abs(), pair.n(), f.q())
            });
        }
    }
    Ok(())
}

fn counting_main_term(ctx: &mut Context, t: &mut Tally) -> Result<()> {
    for (pair, a) in ctx.pairs()? {
        let f = pair.field();
        let space = ProjectiveSpace::new(pair.n(), f)?;
        let zeros = space
            .points()
            .filter(|p| pair.c().eval(p.coords()).is_zero() || pair.d().eval(p.coords()).is_zero())
            .count() as i64;
        let s = &a.chars.sums;
        t.check(s.t22 == space.len() as i64 - zeros, || format!("T22 = {} but {} points off C u D", s.t22, space.len() as i64 - zeros));
        t.check(s.zeros_fg as i64 == zeros, || format!("zeros_fg = {} but {zeros} counted", s.zeros_fg));
    }
    Ok(())
}

fn counting_t12_decomposition(ctx: &mut Context, t: &mut Tally) -> Result<()> {
    let workers = ctx.opts.workers;
    let pairs: Vec<(QuadricPair, i64)> = ctx.pairs()?.iter().map(|(p, a)| (p.clone(), a.chars.sums.t12)).collect();
    for (pair, t12) in pairs {
        let engine = Engine::new(pair.field()).with_workers(workers);
        let whole = engine.single_form_char_sum(pair.c())?;
        let restricted = engine.restricted_char_sum(pair.c(), pair.d())?;
        t.check(t12 == whole - restricted, || format!("T12 = {t12} but {whole} - {restricted}"));
        let on_d = engine.census(pair.d())?[PointClass::OnQuadric.index()];
        t.check(restricted.unsigned_abs() <= on_d, || format!("|restricted sum| {restricted} exceeds #zeros(g) = {on_d}"));
    }
    Ok(())
}

fn counting_determinism(ctx: &mut Context, t: &mut Tally) -> Result<()> {
    let mut rng = ctx.rng(22);
    let configs: &[(usize, u64)] = if ctx.opts.quick { &[(3, 27)] } else { &[(3, 81), (5, 9)] };
    for &(n, q) in configs {
        let f = ctx.field(q)?;
        let pair = sample_pair(n, &f, &mut rng)?;
        let single = Engine::new(&f).analyze(&pair)?;
        for workers in [2, 3, 4, ctx.opts.workers.max(1)] {
            let multi = Engine::new(&f).with_workers(workers).analyze(&pair)?;
            t.check(multi.joint == single.joint && multi.chars == single.chars, || {
                format!("{workers} workers changed the report, n = {n}, q = {q}")
            });
        }
    }
    Ok(())
}

fn counting_sampling(ctx: &mut Context, t: &mut Tally) -> Result<()> {
    for (pair, _) in ctx.pairs()? {
        let ok = pair.c().is_smooth() && pair.d().is_smooth() && !pair.c().is_proportional_to(pair.d());
        t.check(ok, || format!("invalid pair '{}' / '{}'", pair.c().to_line(), pair.d().to_line()));
    }
    Ok(())
}
