//! Joint censuses for pairs of quadrics, the projective character sums
//! `T_ab = sum_P chi(f(P)^a g(P)^b)`, and the explicit bounds they are
//! checked against.
//!
//! Every scan walks `P^{n-1}(F_q)` in rank order, split into one contiguous
//! chunk per worker. Partial results are plain integers merged in chunk
//! order, so the output does not depend on the worker count.

use std::ops::Range;
use std::thread;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classify::{AlgebraicClassifier, PointClass};
use crate::error::{Error, Result};
use crate::field::{CharTable, CharValue, FieldElement, FieldSpec, QuadraticCharacter};
use crate::forms::QuadraticForm;
use crate::projective::ProjectiveSpace;

/// Relative slack when comparing exact integer sums with binary64 bounds.
pub const BOUND_RELATIVE_SLACK: f64 = 1e-9;

/// Rejection-sampling cap for random smooth forms.
pub const MAX_SAMPLING_ATTEMPTS: usize = 1000;

/// Two smooth, non-proportional quadrics `C = {f = 0}`, `D = {g = 0}` in
/// the same odd number of variables over the same field.
#[derive(Clone, Debug)]
pub struct QuadricPair {
    c: QuadraticForm,
    d: QuadraticForm,
}

impl QuadricPair {
    pub fn new(c: QuadraticForm, d: QuadraticForm) -> Result<Self> {
        if c.field() != d.field() {
            return Err(Error::FieldMismatch);
        }
        if c.n() != d.n() {
            return Err(Error::DimensionMismatch { expected: c.n(), got: d.n() });
        }
        if c.n() % 2 == 0 {
            return Err(Error::EvenDimension(c.n()));
        }
        if !c.is_smooth() || !d.is_smooth() {
            return Err(Error::Degenerate);
        }
        if c.is_proportional_to(&d) {
            return Err(Error::ProportionalForms);
        }
        Ok(QuadricPair { c, d })
    }

    pub fn c(&self) -> &QuadraticForm {
        &self.c
    }

    pub fn d(&self) -> &QuadraticForm {
        &self.d
    }

    pub fn n(&self) -> usize {
        self.c.n()
    }

    pub fn field(&self) -> &FieldSpec {
        self.c.field()
    }

    /// `k` with `n = 2k + 1`.
    pub fn half_rank(&self) -> usize {
        (self.n() - 1) / 2
    }
}

/// 3x3 census of a pair, rows indexed by the class relative to `C`,
/// columns by the class relative to `D` (order on, ext, int).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JointCountReport {
    pub n: usize,
    pub q: u64,
    pub counts: [[u64; 3]; 3],
    /// Points external to `C` and internal to `D`.
    pub s_fg: u64,
    pub main_term_num: u64,
    pub main_term_den: u64,
    /// `s_fg - q^(n-1)/4`; exact, since it is a multiple of 1/4.
    pub deviation: f64,
    /// `|deviation| / q^(n - 3/2)`
    pub normalized_deviation: f64,
}

impl JointCountReport {
    fn from_counts(n: usize, q: u64, counts: [[u64; 3]; 3]) -> Self {
        let s_fg = counts[PointClass::External.index()][PointClass::Internal.index()];
        let main = q.pow(n as u32 - 1);
        let deviation = (4 * s_fg as i128 - main as i128) as f64 / 4.0;
        let normalized_deviation = deviation.abs() / (q as f64).powf(n as f64 - 1.5);
        JointCountReport { n, q, counts, s_fg, main_term_num: main, main_term_den: 4, deviation, normalized_deviation }
    }

    pub fn count(&self, c: PointClass, d: PointClass) -> u64 {
        self.counts[c.index()][d.index()]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Census of `C` alone (on, ext, int).
    pub fn row_sums(&self) -> [u64; 3] {
        self.counts.map(|row| row.iter().sum())
    }

    /// Census of `D` alone (on, ext, int).
    pub fn col_sums(&self) -> [u64; 3] {
        let mut out = [0; 3];
        for row in &self.counts {
            for (o, v) in out.iter_mut().zip(row) {
                *o += v;
            }
        }
        out
    }
}

/// The four projective character sums and the number of points on `C u D`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CharSums {
    pub t11: i64,
    pub t12: i64,
    pub t21: i64,
    pub t22: i64,
    /// `#{P : f(P) g(P) = 0}`
    pub zeros_fg: u64,
}

impl CharSums {
    pub fn get(&self, a: u32, b: u32) -> Option<i64> {
        match (a, b) {
            (1, 1) => Some(self.t11),
            (1, 2) => Some(self.t12),
            (2, 1) => Some(self.t21),
            (2, 2) => Some(self.t22),
            _ => None,
        }
    }
}

/// Character sums together with the indicator-expansion checks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CharSumReport {
    pub sums: CharSums,
    /// `chi((-1)^k A)` with `A = disc f`
    pub chi_a: CharValue,
    /// `chi((-1)^k B)` with `B = disc g`
    pub chi_b: CharValue,
    /// `chi(A B)`
    pub chi_ab: CharValue,
    /// `4 #S = T22 + chi_a T12 - chi_b T21 - chi_ab T11` for ext/int.
    pub identity_holds: bool,
    pub identity_int_ext: bool,
    pub identity_ext_ext: bool,
    pub identity_int_int: bool,
    /// Explicit bound on `|T11|`; `None` when `q < 7`.
    pub lemma32_rhs: Option<f64>,
    pub katz_rhs: f64,
}

impl CharSumReport {
    pub fn all_identities_hold(&self) -> bool {
        self.identity_holds && self.identity_int_ext && self.identity_ext_ext && self.identity_int_int
    }

    /// Right-hand side of the indicator expansion for a pair of off-quadric
    /// classes; equals four times the matching census entry.
    pub fn predicted_four_times(&self, c: PointClass, d: PointClass) -> Option<i64> {
        let sign = |class: PointClass| match class {
            PointClass::External => Some(1),
            PointClass::Internal => Some(-1),
            PointClass::OnQuadric => None,
        };
        let (sc, sd) = (sign(c)?, sign(d)?);
        let s = &self.sums;
        Some(
            s.t22
                + sc * self.chi_a.value() * s.t12
                + sd * self.chi_b.value() * s.t21
                + sc * sd * self.chi_ab.value() * s.t11,
        )
    }
}

/// One fully analyzed pair.
#[derive(Clone, Debug)]
pub struct PairAnalysis {
    pub joint: JointCountReport,
    pub chars: CharSumReport,
}

enum CharSource {
    Table(CharTable),
    Power(FieldSpec),
}

impl QuadraticCharacter for CharSource {
    #[inline]
    fn chi(&self, a: FieldElement) -> CharValue {
        match self {
            CharSource::Table(t) => t.get(a),
            CharSource::Power(f) => f.quadratic_character(a),
        }
    }
}

/// Exhaustive scanning machinery for one field.
pub struct Engine {
    field: FieldSpec,
    chars: CharSource,
    workers: usize,
}

impl Engine {
    /// Uses a character table when `q` fits the default budget, Euler's
    /// criterion otherwise.
    pub fn new(field: &FieldSpec) -> Self {
        let chars = match CharTable::new(field) {
            Ok(t) => CharSource::Table(t),
            Err(_) => CharSource::Power(field.clone()),
        };
        Engine { field: field.clone(), chars, workers: 1 }
    }

    pub fn with_char_table(field: &FieldSpec, table: CharTable) -> Result<Self> {
        if table.len() != field.q() as usize {
            return Err(Error::DimensionMismatch { expected: field.q() as usize, got: table.len() });
        }
        Ok(Engine { field: field.clone(), chars: CharSource::Table(table), workers: 1 })
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    fn check_field(&self, f: &FieldSpec) -> Result<()> {
        if *f == self.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    /// Folds `step` over every point, one chunk per worker, merging in
    /// chunk order.
    fn scan<T, I, S, M>(&self, n: usize, init: I, step: S, merge: M) -> Result<T>
    where
        T: Send,
        I: Fn() -> T + Sync,
        S: Fn(&mut T, &[FieldElement]) + Sync,
        M: Fn(&mut T, T),
    {
        let space = ProjectiveSpace::new(n, &self.field)?;
        let run = |range: Range<u64>| {
            let mut acc = init();
            let mut cursor = space.cursor(range);
            while let Some(x) = cursor.next_coords() {
                step(&mut acc, x);
            }
            acc
        };
        if self.workers == 1 {
            return Ok(run(0..space.len()));
        }
        let chunks = space.partition(self.workers);
        let partials: Vec<T> = thread::scope(|s| {
            let handles: Vec<_> = chunks.into_iter().map(|r| s.spawn(|| run(r))).collect();
            handles.into_iter().map(|h| h.join().expect("scan worker panicked")).collect()
        });
        let mut parts = partials.into_iter();
        let mut total = parts.next().unwrap_or_else(&init);
        for p in parts {
            merge(&mut total, p);
        }
        Ok(total)
    }

    /// Census of a single form: (on, ext, int).
    pub fn census(&self, form: &QuadraticForm) -> Result<[u64; 3]> {
        self.check_field(form.field())?;
        let classifier = AlgebraicClassifier::new(form)?;
        self.scan(
            form.n(),
            || [0u64; 3],
            |acc, x| acc[classifier.classify_with(x, &self.chars).index()] += 1,
            |a, b| a.iter_mut().zip(b).for_each(|(x, y)| *x += y),
        )
    }

    pub fn count_joint(&self, pair: &QuadricPair) -> Result<JointCountReport> {
        self.check_field(pair.field())?;
        let cc = AlgebraicClassifier::new(pair.c())?;
        let dc = AlgebraicClassifier::new(pair.d())?;
        let counts = self.scan(
            pair.n(),
            || [[0u64; 3]; 3],
            |acc, x| {
                let a = cc.classify_with(x, &self.chars);
                let b = dc.classify_with(x, &self.chars);
                acc[a.index()][b.index()] += 1;
            },
            |a, b| {
                for (ra, rb) in a.iter_mut().zip(b) {
                    ra.iter_mut().zip(rb).for_each(|(x, y)| *x += y);
                }
            },
        )?;
        Ok(JointCountReport::from_counts(pair.n(), self.field.q() as u64, counts))
    }

    /// `T11, T12, T21, T22` from the character of the actual field products
    /// `f^a g^b`, plus `#{fg = 0}` counted from the zero sets directly.
    pub fn char_sums(&self, pair: &QuadricPair) -> Result<CharSums> {
        self.check_field(pair.field())?;
        let f = &self.field;
        let (cf, df) = (pair.c(), pair.d());
        self.scan(
            pair.n(),
            CharSums::default,
            |acc, x| {
                let fv = cf.eval(x);
                let gv = df.eval(x);
                if fv.is_zero() || gv.is_zero() {
                    acc.zeros_fg += 1;
                }
                let fg = f.mul(fv, gv);
                let f2 = f.mul(fv, fv);
                let g2 = f.mul(gv, gv);
                acc.t11 += self.chars.chi(fg).value();
                acc.t12 += self.chars.chi(f.mul(fv, g2)).value();
                acc.t21 += self.chars.chi(f.mul(f2, gv)).value();
                acc.t22 += self.chars.chi(f.mul(f2, g2)).value();
            },
            |a, b| {
                a.t11 += b.t11;
                a.t12 += b.t12;
                a.t21 += b.t21;
                a.t22 += b.t22;
                a.zeros_fg += b.zeros_fg;
            },
        )
    }

    /// `sum_P chi(f(P)^a g(P)^b)` for `a, b` in `{1, 2}`.
    pub fn char_sum(&self, pair: &QuadricPair, a: u32, b: u32) -> Result<i64> {
        if !(1..=2).contains(&a) || !(1..=2).contains(&b) {
            return Err(Error::BoundHypothesis(format!("exponents must lie in {{1, 2}}, got ({a}, {b})")));
        }
        self.check_field(pair.field())?;
        let f = &self.field;
        let (cf, df) = (pair.c(), pair.d());
        self.scan(
            pair.n(),
            || 0i64,
            |acc, x| {
                let fv = cf.eval(x);
                let gv = df.eval(x);
                let v = f.mul(f.pow(fv, a as u64), f.pow(gv, b as u64));
                *acc += self.chars.chi(v).value();
            },
            |a, b| *a += b,
        )
    }

    /// `sum_P chi(Q(P))` over `P^{n-1}`.
    pub fn single_form_char_sum(&self, form: &QuadraticForm) -> Result<i64> {
        self.check_field(form.field())?;
        self.scan(form.n(), || 0i64, |acc, x| *acc += self.chars.chi(form.eval(x)).value(), |a, b| *a += b)
    }

    /// `sum_{P : Z(P) = 0} chi(Q(P))`.
    pub fn restricted_char_sum(&self, form: &QuadraticForm, zero_set: &QuadraticForm) -> Result<i64> {
        self.check_field(form.field())?;
        self.check_field(zero_set.field())?;
        if form.n() != zero_set.n() {
            return Err(Error::DimensionMismatch { expected: form.n(), got: zero_set.n() });
        }
        self.scan(
            form.n(),
            || 0i64,
            |acc, x| {
                if zero_set.eval(x).is_zero() {
                    *acc += self.chars.chi(form.eval(x)).value();
                }
            },
            |a, b| *a += b,
        )
    }

    pub fn indicator_identity_check(&self, pair: &QuadricPair) -> Result<CharSumReport> {
        Ok(self.analyze(pair)?.chars)
    }

    /// Census, character sums, identity checks and bounds for one pair.
    pub fn analyze(&self, pair: &QuadricPair) -> Result<PairAnalysis> {
        let joint = self.count_joint(pair)?;
        let sums = self.char_sums(pair)?;
        let f = &self.field;
        let sign = f.sign_power(pair.half_rank() as u64);
        let disc_a = pair.c().discriminant();
        let disc_b = pair.d().discriminant();
        let chi_a = self.chars.chi(f.mul(sign, disc_a));
        let chi_b = self.chars.chi(f.mul(sign, disc_b));
        let chi_ab = self.chars.chi(f.mul(disc_a, disc_b));
        let q = f.q() as u64;
        let mut chars = CharSumReport {
            sums,
            chi_a,
            chi_b,
            chi_ab,
            identity_holds: false,
            identity_int_ext: false,
            identity_ext_ext: false,
            identity_int_int: false,
            lemma32_rhs: lemma32_bound(pair.n(), q).ok(),
            katz_rhs: katz_bound(pair.n(), q),
        };
        let holds = |c: PointClass, d: PointClass| {
            chars.predicted_four_times(c, d) == Some(4 * joint.count(c, d) as i64)
        };
        use PointClass::{External as E, Internal as I};
        let (ei, ie, ee, ii) = (holds(E, I), holds(I, E), holds(E, E), holds(I, I));
        chars.identity_holds = ei;
        chars.identity_int_ext = ie;
        chars.identity_ext_ext = ee;
        chars.identity_int_int = ii;
        Ok(PairAnalysis { joint, chars })
    }
}

impl QuadraticCharacter for Engine {
    fn chi(&self, a: FieldElement) -> CharValue {
        self.chars.chi(a)
    }
}

/// `3 * 8^(n+1) * q^((2n-3)/2) + 2 q^(n-2)`, valid for odd prime powers
/// `q >= 7` and `n >= 3`.
pub fn lemma32_bound(n: usize, q: u64) -> Result<f64> {
    if n < 3 {
        return Err(Error::BoundHypothesis(format!("needs n >= 3, got n = {n}")));
    }
    if q < 7 || q % 2 == 0 || crate::field::prime_power(q).is_none() {
        return Err(Error::BoundHypothesis(format!("needs an odd prime power q >= 7, got q = {q}")));
    }
    let (n, qf) = (n as f64, q as f64);
    Ok(3.0 * 8f64.powf(n + 1.0) * qf.powf((2.0 * n - 3.0) / 2.0) + 2.0 * qf.powf(n - 2.0))
}

/// `q^(n/2) / (q - 1)`
pub fn katz_bound(n: usize, q: u64) -> f64 {
    (q as f64).powf(n as f64 / 2.0) / (q as f64 - 1.0)
}

/// Numeric parameters of the general multiplicative character sum bound:
/// ambient `P^N`, `r` defining forms of degrees `a_degrees`, pure dimension
/// `m`, singular-locus dimension `delta`, and the degrees `d`, `e` of `H`, `Z`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RLBoundParams {
    pub ambient_dim: u32,
    pub a_degrees: Vec<u32>,
    pub dim: i64,
    pub singular_dim: i64,
    pub d: u32,
    pub e: u32,
}

impl RLBoundParams {
    pub fn new(ambient_dim: u32, a_degrees: Vec<u32>, dim: i64, singular_dim: i64, d: u32, e: u32) -> Result<Self> {
        if dim < 2 {
            return Err(Error::BoundHypothesis(format!("pure dimension must be >= 2, got {dim}")));
        }
        if gcd(d, e) != 1 {
            return Err(Error::BoundHypothesis(format!("gcd(d, e) = gcd({d}, {e}) != 1")));
        }
        Ok(RLBoundParams { ambient_dim, a_degrees, dim, singular_dim, d, e })
    }

    /// Instantiation for `sum chi(f g)` over `P^{n-1}`: `X = P^{n-1}`,
    /// `H = f g` (d = 4), `Z` a hyperplane (e = 1), singular locus of
    /// dimension `n - 4`.
    pub fn for_quadric_pair(n: usize) -> Result<Self> {
        let n = n as i64;
        Self::new((n - 1) as u32, Vec::new(), n - 1, n - 4, 4, 1)
    }

    pub fn r(&self) -> u32 {
        self.a_degrees.len() as u32
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `3 (3 + max(a_1, .., a_r, e) + d)^(N + r + 2) * q^((m + delta + 2)/2)`
pub fn rl_bound(params: &RLBoundParams, q: u64) -> f64 {
    let top = params.a_degrees.iter().copied().chain([params.e]).max().unwrap_or(params.e);
    let base = (3 + top + params.d) as f64;
    let exp = (params.ambient_dim + params.r() + 2) as f64;
    let qexp = (params.dim + params.singular_dim + 2) as f64 / 2.0;
    3.0 * base.powf(exp) * (q as f64).powf(qexp)
}

/// `|value| <= bound` up to [`BOUND_RELATIVE_SLACK`].
pub fn within_bound(value: i64, bound: f64) -> bool {
    (value.unsigned_abs() as f64) <= bound * (1.0 + BOUND_RELATIVE_SLACK)
}

pub fn sample_smooth_quadric<R: Rng + ?Sized>(n: usize, field: &FieldSpec, rng: &mut R) -> Result<QuadraticForm> {
    let q = field.q();
    for _ in 0..MAX_SAMPLING_ATTEMPTS {
        let upper: Vec<_> = (0..n * (n + 1) / 2).map(|_| field.element(rng.gen_range(0..q))).collect::<Result<_>>()?;
        let form = QuadraticForm::from_upper(n, field, &upper)?;
        if form.is_smooth() {
            return Ok(form);
        }
    }
    Err(Error::SamplingExhausted(MAX_SAMPLING_ATTEMPTS))
}

/// Deterministic in `(n, field, seed)`.
pub fn random_smooth_quadric(n: usize, field: &FieldSpec, seed: u64) -> Result<QuadraticForm> {
    sample_smooth_quadric(n, field, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Samples `C`, then resamples `D` until the pair is valid.
pub fn sample_pair<R: Rng + ?Sized>(n: usize, field: &FieldSpec, rng: &mut R) -> Result<QuadricPair> {
    if n % 2 == 0 {
        return Err(Error::EvenDimension(n));
    }
    let c = sample_smooth_quadric(n, field, rng)?;
    for _ in 0..MAX_SAMPLING_ATTEMPTS {
        let d = sample_smooth_quadric(n, field, rng)?;
        if !c.is_proportional_to(&d) {
            return QuadricPair::new(c, d);
        }
    }
    Err(Error::SamplingExhausted(MAX_SAMPLING_ATTEMPTS))
}

/// Generator for the pairs of a sweep at order `q`: ChaCha8 seeded with
/// `seed`, on stream `q`.
pub fn sweep_rng(seed: u64, q: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(q);
    rng
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub n: usize,
    pub q_list: Vec<u64>,
    pub trials: usize,
    pub seed: u64,
    pub workers: usize,
}

/// One row of a sweep or a single count.
#[derive(Clone, Debug)]
pub struct PairReport {
    pub seed: u64,
    pub pair_id: usize,
    pub pair: QuadricPair,
    pub joint: JointCountReport,
    pub chars: CharSumReport,
}

impl PairReport {
    pub fn analyze(engine: &Engine, pair: QuadricPair, seed: u64, pair_id: usize) -> Result<Self> {
        let PairAnalysis { joint, chars } = engine.analyze(&pair)?;
        Ok(PairReport { seed, pair_id, pair, joint, chars })
    }
}

/// Random valid pairs for every `q`, each fully analyzed.
pub fn sweep(config: &SweepConfig) -> Result<Vec<PairReport>> {
    if config.n % 2 == 0 {
        return Err(Error::EvenDimension(config.n));
    }
    let mut out = Vec::with_capacity(config.q_list.len() * config.trials);
    for &q in &config.q_list {
        let field = FieldSpec::from_order(q)?;
        let engine = Engine::new(&field).with_workers(config.workers);
        let mut rng = sweep_rng(config.seed, q);
        for pair_id in 0..config.trials {
            let pair = sample_pair(config.n, &field, &mut rng)?;
            out.push(PairReport::analyze(&engine, pair, config.seed, pair_id)?);
        }
    }
    Ok(out)
}
