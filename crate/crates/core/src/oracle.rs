//! Brute-force oracles: subword enumeration for the Bruhat order and finite-field point
//! censuses of fibers in `GL_2` and `SL_2`.

use std::collections::{BTreeMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::affine_weyl::{AffineWeylElement, AffineWeylGroup};
use crate::error::{Error, Result};
use crate::invariants::{discriminant_valuation, kottwitz_class, FiberQuery, GammaInvariants, Level, SplitElement, Variant};
use crate::laurent::{CoefficientField, LaurentSeries, Scalar};
use crate::loop_group::{
    iwahori_cell, iwahori_cell_fast, matrix_model, omega_generator, root_subgroup, simple_representative,
    smith_cartan_exact, IwahoriTargets, LoopMatrix, MatrixGroup,
};
use crate::root_data::RootDatum;
use crate::vinberg::{sl2_monoid_membership, VinbergSL2Point};

pub const DEFAULT_LENGTH_BOUND: usize = 8;
pub const DEFAULT_BUDGET: u64 = 10_000_000;
pub const MAX_JET_LEVEL: u32 = 6;

/// Whether `x` is a subword product of the canonical reduced word of `y`.
pub fn bruhat_subword_oracle(group: &AffineWeylGroup, x: &AffineWeylElement, y: &AffineWeylElement, bound: usize) -> Result<bool> {
    let len = group.length(y);
    if len > bound {
        return Err(Error::LengthBound { length: len, bound });
    }
    let (omega, word) = group.reduced_word(y);
    Ok(subword_products(group, &omega, &word).contains(x))
}

/// Products of all `2^ℓ` subwords of `ω·s_{i₁}⋯s_{i_ℓ}`.
pub fn subword_products(group: &AffineWeylGroup, omega: &AffineWeylElement, word: &[usize]) -> HashSet<AffineWeylElement> {
    let mut acc: HashSet<AffineWeylElement> = HashSet::from([omega.clone()]);
    for &i in word {
        let s = group.simple(i);
        let extended: Vec<AffineWeylElement> = acc.iter().map(|x| group.mul(x, s)).collect();
        acc.extend(extended);
    }
    acc
}

/// Every reduced word of `y`, by recursion on left descents.
pub fn all_reduced_words(group: &AffineWeylGroup, y: &AffineWeylElement) -> (AffineWeylElement, Vec<Vec<usize>>) {
    let len = group.length(y);
    if len == 0 {
        return (y.clone(), vec![vec![]]);
    }
    let mut omega = None;
    let mut out = Vec::new();
    for i in 0..group.num_simple() {
        let z = group.mul(group.simple(i), y);
        if group.length(&z) < len {
            let (o, words) = all_reduced_words(group, &z);
            omega = Some(o);
            for mut w in words {
                w.insert(0, i);
                out.push(w);
            }
        }
    }
    out.sort();
    (omega.expect("positive length has a descent"), out)
}

/// `round(ln(c₂/c₁) / ln(q₂/q₁))`, the degree of a count growing like `q^d`.
pub fn estimate_dimension(q1: u64, c1: u64, q2: u64, c2: u64) -> Option<i64> {
    if c1 == 0 || c2 == 0 || q1 == q2 {
        return None;
    }
    Some(((c2 as f64 / c1 as f64).ln() / (q2 as f64 / q1 as f64).ln()).round() as i64)
}

#[derive(Clone, Debug)]
pub struct CensusConfig {
    pub q: u64,
    pub jet_level: u32,
    /// Extra length beyond `⟨2ρ,λ⟩`; defaults to `2|d(γ)| + 2`.
    pub slack: Option<usize>,
    pub budget: u64,
    /// Second prime for the dimension estimate; defaults to 5 when `q = 3` and 3 otherwise.
    pub companion: Option<u64>,
    pub estimate_dimension: bool,
    pub check_surjectivity: bool,
}

impl CensusConfig {
    pub fn new(q: u64, jet_level: u32) -> Self {
        CensusConfig {
            q,
            jet_level,
            slack: None,
            budget: DEFAULT_BUDGET,
            companion: None,
            estimate_dimension: true,
            check_surjectivity: true,
        }
    }

    fn companion_prime(&self) -> u64 {
        self.companion.unwrap_or(if self.q == 3 { 5 } else { 3 })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompanionCount {
    pub q: u64,
    pub total: u64,
    pub points_enumerated: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusReport {
    pub datum: String,
    pub level: Level,
    pub variant: Variant,
    pub lambda: Vec<i64>,
    pub q: u64,
    pub jet_level: u32,
    pub length_bound: usize,
    pub slack: usize,
    pub points_enumerated: u64,
    /// Solutions keyed by the cell of `g⁻¹γg`.
    pub counts: BTreeMap<String, u64>,
    pub total: u64,
    pub empty: bool,
    /// Solutions lying in cells of the maximal enumerated length.
    pub boundary_solutions: u64,
    /// Points whose membership could not be decided.
    pub undetermined: u64,
    pub exact: bool,
    pub companion: Option<CompanionCount>,
    pub dimension_estimate: Option<i64>,
    pub predicted_nonempty: bool,
    pub predicted_dimension: Option<i64>,
    /// Iwahori level: every solution projects to a spherical solution.
    pub projection_ok: Option<bool>,
    /// Spherical level: every solution has an Iwahori-level lift over `K/I`.
    pub lifts_ok: Option<bool>,
    pub unlifted: u64,
}

/// The `N`-jet of a unit over `Q` or `F_q`, reduced into `F_q` and made exact.
pub fn reduce_jet(s: &LaurentSeries, field: CoefficientField, jet_level: u32) -> Result<LaurentSeries> {
    let coeffs = s
        .coeffs()
        .iter()
        .take(jet_level as usize)
        .map(|c| reduce_scalar(c, field))
        .collect::<Result<Vec<_>>>()?;
    Ok(LaurentSeries::new(field, s.lowest(), coeffs, None))
}

fn reduce_scalar(c: &Scalar, field: CoefficientField) -> Result<Scalar> {
    match c {
        Scalar::Q(r) => field.from_rational(r),
        other if other.field() == field => Ok(other.clone()),
        _ => Err(Error::FieldMismatch),
    }
}

/// `γ` with unit parts replaced by their `N`-jets over `F_q`.
pub fn reduce_split_element(datum: &RootDatum, g: &SplitElement, q: u64, jet_level: u32) -> Result<SplitElement> {
    let field = CoefficientField::prime(q)?;
    let mut units = g.units().iter().map(|u| reduce_jet(u, field, jet_level)).collect::<Result<Vec<_>>>()?;
    if datum.name().starts_with("SL") {
        // the last unit is determined by the others; taking its jet would break det = 1
        let m = units.len();
        let mut prod = LaurentSeries::one(field);
        for u in &units[..m - 1] {
            prod = prod.mul(u);
        }
        units[m - 1] = prod.inverse(g.working_precision())?;
    }
    SplitElement::new(datum, g.mu().to_vec(), units, g.working_precision())
}

/// Conjugation data in the `GL_2` model.
struct Model {
    gl2: RootDatum,
    /// `γ` scaled by a central factor so that its matrix is an exact polynomial matrix.
    gamma: LoopMatrix,
    /// Central shift `(m, m)` applied by the scaling.
    shift: Vec<i64>,
    lambda: Vec<i64>,
}

fn gl2_model(datum: &RootDatum, g: &SplitElement, lambda: &[i64]) -> Result<Model> {
    let gl2 = RootDatum::preset("GL2")?;
    let field = g.field();
    let coords: Vec<LaurentSeries> = g.coords();
    let (gamma, shift) = if datum.name() == "SL2" {
        // t^m u · diag(t^m u, t^{-m} u⁻¹) = diag(t^{2m} u², 1)
        let a = coords[0].to_exact();
        (LoopMatrix::diagonal(vec![a.mul(&a), LaurentSeries::one(field)], MatrixGroup::GL)?, vec![g.mu()[0]; 2])
    } else {
        (LoopMatrix::diagonal(coords.iter().map(LaurentSeries::to_exact).collect(), MatrixGroup::GL)?, vec![0, 0])
    };
    let lambda = lambda.iter().zip(&shift).map(|(a, b)| a + b).collect();
    Ok(Model { gl2, gamma, shift, lambda })
}

enum Tester {
    Spherical { lambda: Vec<i64>, variant: Variant },
    Iwahori { targets: IwahoriTargets, variant: Variant },
}

fn exact_cell(gl2: &RootDatum, h: &LoopMatrix) -> Result<AffineWeylElement> {
    iwahori_cell_fast(gl2, h, 32).or_else(|_| iwahori_cell(gl2, h))
}

impl Tester {
    /// The cell label of `h` when `h` lies in the target, as an element of the `GL_2` group.
    fn test(&self, model: &Model, h: &LoopMatrix) -> Result<Option<AffineWeylElement>> {
        match self {
            Tester::Spherical { lambda, variant } => {
                let mu = smith_cartan_exact(h)?;
                let ok = match variant {
                    Variant::Open => &mu == lambda,
                    Variant::Closed => model.gl2.dominance_leq(&mu, lambda, false),
                };
                Ok(ok.then(|| AffineWeylElement { translation: mu, finite: model.gl2.identity() }))
            }
            Tester::Iwahori { targets, variant } => {
                let cell = exact_cell(&model.gl2, h)?;
                Ok(targets.contains(&cell, *variant).then_some(cell))
            }
        }
    }
}

/// The points `ω·x_{i₁}(c₁)ṡ_{i₁}⋯x_{i_k}(c_k)ṡ_{i_k}` of one Iwahori orbit.
struct CellPoints {
    omega: LoopMatrix,
    omega_inv: LoopMatrix,
    word: Vec<usize>,
}

struct Generators {
    /// `x_i(c)ṡ_i` and its inverse, indexed by `[i][c]`.
    steps: Vec<Vec<(LoopMatrix, LoopMatrix)>>,
}

impl Generators {
    fn new(n: usize, field: CoefficientField, group: MatrixGroup, q: u64) -> Self {
        let steps = (0..n)
            .map(|i| {
                let s = simple_representative(n, i, field, group);
                let s_inv = s.scale(&LaurentSeries::one(field).neg());
                (0..q as i64)
                    .map(|c| {
                        let c = field.from_i64(c);
                        let x = root_subgroup(n, i, &c, group);
                        let x_inv = root_subgroup(n, i, &c.neg(), group);
                        (x.mul(&s), s_inv.mul(&x_inv))
                    })
                    .collect()
            })
            .collect();
        Generators { steps }
    }
}

impl CellPoints {
    fn for_each(&self, gens: &Generators, f: &mut dyn FnMut(&LoopMatrix, &LoopMatrix)) {
        fn rec(
            word: &[usize],
            gens: &Generators,
            p: &LoopMatrix,
            p_inv: &LoopMatrix,
            f: &mut dyn FnMut(&LoopMatrix, &LoopMatrix),
        ) {
            let Some((&i, rest)) = word.split_first() else {
                f(p, p_inv);
                return;
            };
            for (step, step_inv) in &gens.steps[i] {
                rec(rest, gens, &p.mul(step), &step_inv.mul(p_inv), f);
            }
        }
        rec(&self.word, gens, &self.omega, &self.omega_inv, f);
    }
}

#[derive(Default)]
struct CellTally {
    counts: BTreeMap<String, u64>,
    total: u64,
    boundary: u64,
    undetermined: u64,
    projection_failures: u64,
    unlifted: u64,
}

impl CellTally {
    fn merge(mut self, o: CellTally) -> CellTally {
        for (k, v) in o.counts {
            *self.counts.entry(k).or_default() += v;
        }
        self.total += o.total;
        self.boundary += o.boundary;
        self.undetermined += o.undetermined;
        self.projection_failures += o.projection_failures;
        self.unlifted += o.unlifted;
        self
    }
}

/// Raw census of one prime.
struct RawCensus {
    tally: CellTally,
    points: u64,
    length_bound: usize,
    slack: usize,
}

/// Jet-level point census of `X^λ_γ` (spherical) or its parabolic analogue (Iwahori).
///
/// Points are enumerated over the Iwahori orbits of length at most
/// `L = ⟨2ρ,λ⟩ + slack` in `Gr` (minimal coset representatives) or `Fl`. For `GL_2`
/// the length-zero part is restricted to `{1, τ}`, a fundamental domain for the center.
pub fn fiber_census(
    datum: &RootDatum,
    gamma: &SplitElement,
    lambda: &[i64],
    level: Level,
    variant: Variant,
    config: &CensusConfig,
) -> Result<CensusReport> {
    let (n, group) = matrix_model(datum)?;
    if n != 2 {
        return Err(Error::UnsupportedType(format!("censuses cover GL2 and SL2, not {}", datum.name())));
    }
    if config.jet_level == 0 || config.jet_level > MAX_JET_LEVEL {
        return Err(Error::InvalidArgument(format!("jet level must lie in 1..={MAX_JET_LEVEL}")));
    }
    datum.require_dominant(lambda)?;
    let main = census_at(datum, n, group, gamma, lambda, level, variant, config.q, config)?;
    let query_invariants = {
        let reduced = reduce_split_element(datum, gamma, config.q, config.jet_level)?;
        GammaInvariants::from_split(datum, &reduced)?
    };
    let query = FiberQuery::new(datum, query_invariants, lambda.to_vec(), level, variant)?;
    let predicted_nonempty = query.nonempty(datum);
    let predicted_dimension = query.dimension(datum).ok();
    let mut companion = None;
    let mut dimension_estimate = None;
    if config.estimate_dimension && main.tally.total > 0 && gamma.field() == CoefficientField::Rationals {
        let q2 = config.companion_prime();
        let other = census_at(datum, n, group, gamma, lambda, level, variant, q2, config)?;
        dimension_estimate = estimate_dimension(config.q, main.tally.total, q2, other.tally.total);
        companion = Some(CompanionCount { q: q2, total: other.tally.total, points_enumerated: other.points });
    }
    let checked = config.check_surjectivity;
    Ok(CensusReport {
        datum: datum.name().to_string(),
        level,
        variant,
        lambda: lambda.to_vec(),
        q: config.q,
        jet_level: config.jet_level,
        length_bound: main.length_bound,
        slack: main.slack,
        points_enumerated: main.points,
        total: main.tally.total,
        empty: main.tally.total == 0,
        boundary_solutions: main.tally.boundary,
        undetermined: main.tally.undetermined,
        exact: main.tally.undetermined == 0,
        counts: main.tally.counts,
        companion,
        dimension_estimate,
        predicted_nonempty,
        predicted_dimension,
        projection_ok: (checked && level == Level::Iwahori).then_some(main.tally.projection_failures == 0),
        lifts_ok: (checked && level == Level::Spherical).then_some(main.tally.unlifted == 0),
        unlifted: main.tally.unlifted,
    })
}

#[allow(clippy::too_many_arguments)]
fn census_at(
    datum: &RootDatum,
    n: usize,
    group: MatrixGroup,
    gamma: &SplitElement,
    lambda: &[i64],
    level: Level,
    variant: Variant,
    q: u64,
    config: &CensusConfig,
) -> Result<RawCensus> {
    let field = CoefficientField::prime(q)?;
    field.check_against(datum)?;
    let reduced = reduce_split_element(datum, gamma, q, config.jet_level)?;
    let d = discriminant_valuation(datum, &reduced)?;
    let slack = config.slack.unwrap_or(2 * d.unsigned_abs() as usize + 2);
    let two_rho: i64 = datum.pairing(datum.two_rho(), lambda);
    let length_bound = two_rho as usize + slack;

    let model = gl2_model(datum, &reduced, lambda)?;
    let gl2_group = AffineWeylGroup::new(&model.gl2);
    let tester = match level {
        Level::Spherical => Tester::Spherical { lambda: model.lambda.clone(), variant },
        Level::Iwahori => Tester::Iwahori { targets: IwahoriTargets::new(&gl2_group, &model.lambda)?, variant },
    };
    let lift_tester = match (level, config.check_surjectivity) {
        (Level::Spherical, true) => {
            Some(Tester::Iwahori { targets: IwahoriTargets::new(&gl2_group, &model.lambda)?, variant })
        }
        _ => None,
    };

    let aw = AffineWeylGroup::new(datum);
    let (omegas, omega_mats) = omega_window(datum, &aw, n, field, group)?;
    let finite_simple: Vec<usize> = (0..aw.num_simple()).filter(|&i| !aw.is_affine_node(i)).collect();
    let cells: Vec<AffineWeylElement> = aw
        .ball(&omegas, length_bound)
        .into_iter()
        .filter(|w| {
            level == Level::Iwahori
                || finite_simple.iter().all(|&i| aw.length(&aw.mul(w, aw.simple(i))) > aw.length(w))
        })
        .collect();
    let points: u64 = cells.iter().map(|w| q.saturating_pow(aw.length(w) as u32)).fold(0u64, u64::saturating_add);
    if points > config.budget {
        return Err(Error::BudgetExceeded(config.budget));
    }
    let gens = Generators::new(n, field, group, q);
    let lifts = kottwitz_lifts(datum, n, field, group, q);
    let shift_back = AffineWeylElement { translation: model.shift.iter().map(|x| -x).collect(), finite: model.gl2.identity() };

    let tally = cells
        .par_iter()
        .map(|w| {
            let (omega, word) = aw.reduced_word(w);
            let k = omegas.iter().position(|o| *o == omega).expect("omega in window");
            let cp = CellPoints { omega: omega_mats[k].0.clone(), omega_inv: omega_mats[k].1.clone(), word };
            let boundary = aw.length(w) == length_bound;
            let mut t = CellTally::default();
            cp.for_each(&gens, &mut |g, g_inv| {
                let h = g_inv.mul(&model.gamma).mul(g);
                match tester.test(&model, &h) {
                    Ok(Some(cell)) => {
                        let label = gl2_group.mul(&shift_back, &cell);
                        *t.counts.entry(label_in(datum, &aw, &model.gl2, &label)).or_default() += 1;
                        t.total += 1;
                        if boundary {
                            t.boundary += 1;
                        }
                        if level == Level::Iwahori && config.check_surjectivity {
                            let projected = Tester::Spherical { lambda: model.lambda.clone(), variant };
                            if !matches!(projected.test(&model, &h), Ok(Some(_))) {
                                t.projection_failures += 1;
                            }
                        }
                        if let Some(lt) = &lift_tester {
                            let lifted = lifts.iter().any(|(b, b_inv)| {
                                let hb = b_inv.mul(&h).mul(b);
                                matches!(lt.test(&model, &hb), Ok(Some(_)))
                            });
                            if !lifted {
                                t.unlifted += 1;
                            }
                        }
                    }
                    Ok(None) => {}
                    Err(_) => t.undetermined += 1,
                }
            });
            t
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(CellTally::default(), CellTally::merge);
    Ok(RawCensus { tally, points, length_bound, slack })
}

/// Formats a `GL_2` cell label in the notation of `datum`.
fn label_in(datum: &RootDatum, aw: &AffineWeylGroup, gl2: &RootDatum, x: &AffineWeylElement) -> String {
    if datum.name() == "GL2" {
        return aw.format(x);
    }
    let word = &gl2.weyl(x.finite).word;
    aw.format(&AffineWeylElement { translation: x.translation.clone(), finite: datum.from_word(word) })
}

type MatPair = (LoopMatrix, LoopMatrix);

/// Length-zero elements `{1, τ}` and their matrices.
fn omega_window(
    datum: &RootDatum,
    aw: &AffineWeylGroup,
    n: usize,
    field: CoefficientField,
    group: MatrixGroup,
) -> Result<(Vec<AffineWeylElement>, Vec<MatPair>)> {
    let id = LoopMatrix::identity(n, field, group);
    let mut omegas = vec![aw.identity()];
    let mut mats = vec![(id.clone(), id)];
    if group == MatrixGroup::GL {
        let tau = omega_generator(n, field);
        omegas.push(iwahori_cell(datum, &tau)?);
        let tau_inv = tau.inverse(1)?;
        mats.push((tau, tau_inv));
    }
    Ok((omegas, mats))
}

/// Representatives of `K/I` over `F_q`: `x_{i₁}(c₁)ṡ_{i₁}⋯` over the finite Bruhat cells.
fn kottwitz_lifts(datum: &RootDatum, n: usize, field: CoefficientField, group: MatrixGroup, q: u64) -> Vec<MatPair> {
    let gens = Generators::new(n, field, group, q);
    let id = LoopMatrix::identity(n, field, group);
    let mut out = Vec::new();
    for w in datum.weyl_elements() {
        let cp = CellPoints { omega: id.clone(), omega_inv: id.clone(), word: w.word.iter().map(|i| i + 1).collect() };
        cp.for_each(&gens, &mut |g, g_inv| out.push((g.clone(), g_inv.clone())));
    }
    out
}

/// Nonemptiness verdicts of the formula and of the census at each prime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NonemptinessComparison {
    pub predicted: bool,
    pub observed: Vec<(u64, bool)>,
}

impl NonemptinessComparison {
    pub fn agrees(&self) -> bool {
        self.observed.iter().all(|&(_, b)| b == self.predicted)
    }
}

pub fn compare_nonemptiness(
    datum: &RootDatum,
    gamma: &SplitElement,
    lambda: &[i64],
    level: Level,
    variant: Variant,
    primes: &[u64],
    jet_level: u32,
    slack: Option<usize>,
) -> Result<NonemptinessComparison> {
    let inv = GammaInvariants::from_split(datum, gamma)?;
    let predicted = FiberQuery::new(datum, inv, lambda.to_vec(), level, variant)?.nonempty(datum);
    let mut observed = Vec::new();
    for &q in primes {
        let mut cfg = CensusConfig::new(q, jet_level);
        cfg.slack = slack;
        cfg.estimate_dimension = false;
        cfg.check_surjectivity = false;
        observed.push((q, !fiber_census(datum, gamma, lambda, level, variant, &cfg)?.empty));
    }
    Ok(NonemptinessComparison { predicted, observed })
}

/// Cell-by-cell comparison of the `SL_2` Iwahori submonoid of level `n` with the
/// admissible union `⋃_{w∈Adm((n,0))} IwI`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonoidCensusReport {
    pub n: i64,
    pub q: u64,
    pub jet_level: u32,
    pub cells_checked: usize,
    pub samples: usize,
    /// Cells (or sampled matrices) where the closed membership and `Adm` disagree.
    pub closed_mismatches: Vec<String>,
    /// Cells where `A mod t ≠ 0` upper-triangular disagrees with `w ∈ {t^{xλ}}`.
    pub open_mismatches: Vec<String>,
    /// Sampled points whose Iwahori cell differed from the cell they were drawn from.
    pub cell_errors: usize,
}

fn random_jet(rng: &mut ChaCha8Rng, field: CoefficientField, q: u64, lowest: i64, len: u32) -> LaurentSeries {
    let cs: Vec<i64> = (0..len).map(|_| rng.gen_range(0..q as i64)).collect();
    LaurentSeries::from_i64s(field, lowest, &cs, None)
}

fn random_unit_jet(rng: &mut ChaCha8Rng, field: CoefficientField, q: u64, len: u32) -> LaurentSeries {
    let mut cs: Vec<i64> = (0..len).map(|_| rng.gen_range(0..q as i64)).collect();
    cs[0] = rng.gen_range(1..q as i64);
    LaurentSeries::from_i64s(field, 0, &cs, None)
}

/// A random element of `I` with polynomial entries of degree `< N` over `F_q`.
fn random_iwahori_jet(rng: &mut ChaCha8Rng, field: CoefficientField, q: u64, jet_level: u32) -> LoopMatrix {
    let rows = vec![
        vec![random_unit_jet(rng, field, q, jet_level), random_jet(rng, field, q, 0, jet_level)],
        vec![random_jet(rng, field, q, 1, jet_level), random_unit_jet(rng, field, q, jet_level)],
    ];
    LoopMatrix::new_unchecked(2, rows.into_iter().flatten().collect(), MatrixGroup::GL).expect("2×2")
}

pub fn iwahori_monoid_census(n: i64, q: u64, jet_level: u32, samples_per_cell: usize, seed: u64) -> Result<MonoidCensusReport> {
    if n < 0 {
        return Err(Error::NotDominant(format!("({n},0)")));
    }
    let field = CoefficientField::prime(q)?;
    let gl2 = RootDatum::preset("GL2")?;
    let aw = AffineWeylGroup::new(&gl2);
    let lambda = vec![n, 0];
    let adm: HashSet<AffineWeylElement> = aw.admissible_set(&lambda)?.into_iter().collect();
    let maximal: HashSet<AffineWeylElement> = aw.adm_maximal(&lambda)?.into_iter().collect();
    // every integral cell with det of valuation n has length at most 2n + 1
    let omega = aw.omega_in_class(&gl2.pi1_class(&lambda))?;
    let cells = aw.ball(&[omega], 2 * n as usize + 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = MonoidCensusReport {
        n,
        q,
        jet_level,
        cells_checked: 0,
        samples: 0,
        closed_mismatches: Vec::new(),
        open_mismatches: Vec::new(),
        cell_errors: 0,
    };
    for w in &cells {
        let wm = LoopMatrix::monomial(&gl2, w, field, MatrixGroup::GL)?;
        let base = sl2_monoid_membership(&VinbergSL2Point::from_matrix(wm.clone())?, n)?;
        report.cells_checked += 1;
        if base.iwahori_closure != adm.contains(w) {
            report.closed_mismatches.push(aw.format(w));
        }
        if base.iwahori_open != maximal.contains(w) {
            report.open_mismatches.push(aw.format(w));
        }
        for _ in 0..samples_per_cell {
            let a = random_iwahori_jet(&mut rng, field, q, jet_level)
                .mul(&wm)
                .mul(&random_iwahori_jet(&mut rng, field, q, jet_level));
            report.samples += 1;
            if iwahori_cell(&gl2, &a)? != *w {
                report.cell_errors += 1;
            }
            let m = sl2_monoid_membership(&VinbergSL2Point::from_matrix(a)?, n)?;
            if m.iwahori_closure != base.iwahori_closure {
                report.closed_mismatches.push(format!("sample in {}", aw.format(w)));
            }
        }
    }
    // random integral jets with det of valuation n, classified directly
    let mut drawn = 0;
    while drawn < samples_per_cell * cells.len() {
        let rows = vec![
            vec![random_jet(&mut rng, field, q, 0, jet_level), random_jet(&mut rng, field, q, 0, jet_level)],
            vec![random_jet(&mut rng, field, q, 0, jet_level), random_jet(&mut rng, field, q, 0, jet_level)],
        ];
        let a = LoopMatrix::new_unchecked(2, rows.into_iter().flatten().collect(), MatrixGroup::GL)?;
        let det = a.det();
        if det.is_exact_zero() || det.finite_valuation()? != n {
            continue;
        }
        drawn += 1;
        report.samples += 1;
        let m = sl2_monoid_membership(&VinbergSL2Point::from_matrix(a.clone())?, n)?;
        let cell = iwahori_cell(&gl2, &a)?;
        if m.iwahori_closure != adm.contains(&cell) {
            report.closed_mismatches.push(format!("jet sample in {}", aw.format(&cell)));
        }
    }
    Ok(report)
}

/// A `GL_2`/`SL_2` split element from integer data, for tests and random query generation.
pub fn split_from_ints(datum: &RootDatum, mu: &[i64], units: &[Vec<i64>], working: i64) -> Result<SplitElement> {
    let field = CoefficientField::Rationals;
    let mut us: Vec<LaurentSeries> = units.iter().map(|c| LaurentSeries::from_i64s(field, 0, c, None)).collect();
    if datum.name().starts_with("SL") {
        let m = us.len();
        let mut prod = LaurentSeries::one(field);
        for u in &us[..m - 1] {
            prod = prod.mul(u);
        }
        us[m - 1] = prod.inverse(working)?;
    }
    SplitElement::new(datum, mu.to_vec(), us, working)
}

/// Whether `κ(γ) = p(λ)`, used to label empty queries.
pub fn kottwitz_matches(datum: &RootDatum, gamma: &SplitElement, lambda: &[i64]) -> bool {
    kottwitz_class(datum, gamma) == datum.pi1_class(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subword_oracle_examples() {
        let gl2 = RootDatum::preset("GL2").unwrap();
        let aw = AffineWeylGroup::new(&gl2);
        let t10 = aw.translation(&[1, 0]);
        let tau = aw.parse("s1*t^[1,0]").unwrap();
        assert!(bruhat_subword_oracle(&aw, &tau, &t10, 8).unwrap());
        assert!(!bruhat_subword_oracle(&aw, &t10, &tau, 8).unwrap());
        let sl2 = RootDatum::preset("SL2").unwrap();
        let aw2 = AffineWeylGroup::new(&sl2);
        let big = aw2.translation(&[3, -3]);
        assert!(bruhat_subword_oracle(&aw2, &aw2.identity(), &aw2.translation(&[1, -1]), 8).unwrap());
        assert_eq!(
            bruhat_subword_oracle(&aw2, &aw2.identity(), &big, 4),
            Err(Error::LengthBound { length: 6, bound: 4 })
        );
    }

    #[test]
    fn subword_oracle_matches_recursion_and_is_word_independent() {
        for name in ["GL2", "SL2", "SL3", "PGL2", "Sp4"] {
            let d = RootDatum::preset(name).unwrap();
            let aw = AffineWeylGroup::new(&d);
            let omega = aw.identity();
            let ball = aw.ball(&[omega], 4);
            for y in &ball {
                let (o, words) = all_reduced_words(&aw, y);
                let sets: Vec<_> = words.iter().map(|w| subword_products(&aw, &o, w)).collect();
                assert!(sets.windows(2).all(|p| p[0] == p[1]), "{name} {}", aw.format(y));
                for x in &ball {
                    assert_eq!(bruhat_subword_oracle(&aw, x, y, 8).unwrap(), aw.bruhat_leq(x, y));
                }
            }
        }
    }

    #[test]
    fn dimension_estimates() {
        assert_eq!(estimate_dimension(3, 4, 5, 4), Some(0));
        assert_eq!(estimate_dimension(3, 2 * 3 + 1, 5, 2 * 5 + 1), Some(1));
        assert_eq!(estimate_dimension(3, 0, 5, 1), None);
    }

    #[test]
    fn dimension_zero_census() {
        let gl2 = RootDatum::preset("GL2").unwrap();
        let g = split_from_ints(&gl2, &[1, 0], &[vec![1], vec![1]], 16).unwrap();
        let mut cfg = CensusConfig::new(3, 3);
        let r = fiber_census(&gl2, &g, &[1, 0], Level::Iwahori, Variant::Open, &cfg).unwrap();
        assert!(r.total > 0 && r.exact);
        assert_eq!(r.dimension_estimate, Some(0));
        assert_eq!(r.predicted_dimension, Some(0));
        assert_eq!(r.projection_ok, Some(true));
        cfg.jet_level = 5;
        let r5 = fiber_census(&gl2, &g, &[1, 0], Level::Iwahori, Variant::Open, &cfg).unwrap();
        assert_eq!(r5.counts, r.counts);
        let s = fiber_census(&gl2, &g, &[1, 0], Level::Spherical, Variant::Open, &cfg).unwrap();
        assert!(s.total > 0);
        assert_eq!(s.lifts_ok, Some(true));
        assert_eq!(s.dimension_estimate, Some(0));
    }

    #[test]
    fn empty_and_invalid_queries() {
        let gl2 = RootDatum::preset("GL2").unwrap();
        let g = split_from_ints(&gl2, &[1, 1], &[vec![1], vec![2]], 16).unwrap();
        let cfg = CensusConfig::new(3, 3);
        let r = fiber_census(&gl2, &g, &[1, 0], Level::Spherical, Variant::Closed, &cfg).unwrap();
        assert!(r.empty && r.counts.is_empty() && r.dimension_estimate.is_none());
        assert!(!r.predicted_nonempty);
        assert!(matches!(
            fiber_census(&gl2, &g, &[1, 0], Level::Spherical, Variant::Closed, &CensusConfig::new(2, 3)),
            Err(Error::CharDividesWeylOrder { .. })
        ));
        let sl3 = RootDatum::preset("SL3").unwrap();
        let g3 = split_from_ints(&sl3, &[1, 0, -1], &[vec![1], vec![2], vec![]], 16).unwrap();
        assert!(matches!(
            fiber_census(&sl3, &g3, &[1, 0, -1], Level::Spherical, Variant::Closed, &cfg),
            Err(Error::UnsupportedType(_))
        ));
        let mut tight = CensusConfig::new(5, 3);
        tight.budget = 10;
        assert_eq!(
            fiber_census(&gl2, &g, &[1, 1], Level::Iwahori, Variant::Closed, &tight),
            Err(Error::BudgetExceeded(10))
        );
    }

    #[test]
    fn sl2_census_agrees_with_formula() {
        let sl2 = RootDatum::preset("SL2").unwrap();
        let g = split_from_ints(&sl2, &[0, 0], &[vec![1, 1], vec![]], 16).unwrap();
        for (lambda, expect) in [(vec![0, 0], true), (vec![1, -1], true)] {
            let c = compare_nonemptiness(&sl2, &g, &lambda, Level::Iwahori, Variant::Closed, &[3, 5], 3, Some(2)).unwrap();
            assert_eq!(c.predicted, expect);
            assert!(c.agrees(), "{lambda:?} {c:?}");
        }
        let g = split_from_ints(&sl2, &[2, -2], &[vec![1], vec![]], 16).unwrap();
        let c = compare_nonemptiness(&sl2, &g, &[1, -1], Level::Spherical, Variant::Open, &[3], 3, Some(2)).unwrap();
        assert!(!c.predicted && c.agrees());
    }

    #[test]
    fn census_points_lie_in_their_cells() {
        let gl2 = RootDatum::preset("GL2").unwrap();
        let aw = AffineWeylGroup::new(&gl2);
        let field = CoefficientField::prime(3).unwrap();
        let gens = Generators::new(2, field, MatrixGroup::GL, 3);
        let (omegas, mats) = omega_window(&gl2, &aw, 2, field, MatrixGroup::GL).unwrap();
        for w in aw.ball(&omegas, 3) {
            let (omega, word) = aw.reduced_word(&w);
            let k = omegas.iter().position(|o| *o == omega).unwrap();
            let cp = CellPoints { omega: mats[k].0.clone(), omega_inv: mats[k].1.clone(), word };
            let mut seen = 0;
            cp.for_each(&gens, &mut |g, g_inv| {
                assert_eq!(iwahori_cell(&gl2, g).unwrap(), w);
                assert_eq!(iwahori_cell_fast(&gl2, g, 16).unwrap(), w);
                assert!(g.mul(g_inv).sub(&LoopMatrix::identity(2, field, MatrixGroup::GL)).is_known_zero());
                seen += 1;
            });
            assert_eq!(seen, 3u64.pow(aw.length(&w) as u32));
        }
    }

    #[test]
    fn monoid_census_closed_description() {
        for n in 0..=2 {
            let r = iwahori_monoid_census(n, 3, 3, 4, 7).unwrap();
            assert!(r.closed_mismatches.is_empty(), "{r:?}");
            assert_eq!(r.cell_errors, 0);
        }
        // τ lies in the open Iwahori locus without being a translation
        let gl2 = RootDatum::preset("GL2").unwrap();
        let aw = AffineWeylGroup::new(&gl2);
        let r = iwahori_monoid_census(1, 3, 3, 0, 7).unwrap();
        assert_eq!(r.open_mismatches, vec![aw.format(&aw.parse("s1*t^[1,0]").unwrap())]);
    }
}
