//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! A criterion whose statement is refuted by a certified counterexample prints FAIL with the
//! certificate; any other failure makes the process exit nonzero.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use masf_core::affine_weyl::{dominant_translation_parts, AffineWeylElement, AffineWeylGroup};
use masf_core::intmat::Rational;
use masf_core::invariants::{
    discriminant_valuation, mv_dimension, newton_point, random_split_element, FiberQuery, GammaInvariants, Level, SplitElement, Variant,
};
use masf_core::laurent::{CoefficientField, LaurentSeries, Valuation};
use masf_core::loop_group::{smith_cartan_exact, LoopMatrix, MatrixGroup};
use masf_core::oracle::{bruhat_subword_oracle, fiber_census, iwahori_monoid_census, split_from_ints, CensusConfig, CensusReport};
use masf_core::root_data::{RootDatum, PRESETS};
use masf_core::vinberg::{sl2_chi_plus, sl2_ext_discriminant, sl2_gamma_lambda, sl2_monoid_membership, VinbergSL2Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

enum Verdict {
    Pass(String),
    Fail(String),
    /// The statement is false; the message carries a checked counterexample.
    Refuted(String),
}

impl From<Outcome> for Verdict {
    fn from(o: Outcome) -> Self {
        match o {
            Ok(m) => Verdict::Pass(m),
            Err(m) => Verdict::Fail(m),
        }
    }
}

/// A census together with the element it was run on.
struct Run {
    datum: RootDatum,
    gamma: SplitElement,
    report: CensusReport,
}

const Q: CoefficientField = CoefficientField::Rationals;
const WORKING: i64 = 24;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

fn preset(name: &str) -> RootDatum {
    RootDatum::preset(name).expect("preset")
}

/// `Σ_{α>0} ⟨α, λ⟩` straight from the root list.
fn two_rho_pairing(d: &RootDatum, lambda: &[i64]) -> i64 {
    (0..d.num_roots()).filter(|&b| d.is_positive_root(b)).map(|b| d.pairing(d.root(b), lambda)).sum()
}

/// `dim G/P_λ`: positive roots not orthogonal to `λ`.
fn flag_dimension_by_roots(d: &RootDatum, lambda: &[i64]) -> usize {
    (0..d.num_roots()).filter(|&b| d.is_positive_root(b) && d.pairing(d.root(b), lambda) != 0).count()
}

/// `Σ_α val(1 − α(γ))` evaluated root by root: `min(0, ⟨α,μ⟩)` off the walls, the valuation of
/// `1 − α(u)` on them.
fn disc_by_roots(d: &RootDatum, g: &SplitElement) -> i64 {
    (0..d.num_roots())
        .map(|b| {
            let k = d.pairing(d.root(b), g.mu());
            if k != 0 {
                k.min(0)
            } else {
                let v = LaurentSeries::one(g.field()).sub(&g.root_value(d, b).unwrap());
                match v.valuation().unwrap() {
                    Valuation::Finite(x) => x,
                    Valuation::Infinite => panic!("non-regular element"),
                }
            }
        })
        .sum()
}

fn c1_gl2_admissible() -> Outcome {
    let d = preset("GL2");
    let aw = AffineWeylGroup::new(&d);
    let s = aw.finite(d.simple_reflection(0));
    let expected: BTreeSet<AffineWeylElement> =
        [aw.translation(&[1, 0]), aw.translation(&[0, 1]), aw.mul(&s, &aw.translation(&[1, 0]))].into_iter().collect();
    let got: BTreeSet<AffineWeylElement> = aw.admissible_set(&[1, 0]).map_err(e)?.into_iter().collect();
    check(got == expected, || format!("got {:?}", got.iter().map(|x| aw.format(x)).collect::<Vec<_>>()))?;
    Ok(format!("Adm(1,0) = {{{}}}", got.iter().map(|x| aw.format(x)).collect::<Vec<_>>().join(", ")))
}

fn c2_closure_identity() -> Outcome {
    let mut total = 0;
    for name in PRESETS {
        let d = preset(name);
        let aw = AffineWeylGroup::new(&d);
        for lambda in d.dominant_in_box(-2, 2) {
            let adm = aw.admissible_set(&lambda).map_err(e)?;
            let parts: BTreeSet<Vec<i64>> = dominant_translation_parts(&d, &adm).into_iter().collect();
            let bound = d.weyl_orbit(&lambda).iter().flatten().map(|x| x.abs()).max().unwrap_or(0);
            let below: BTreeSet<Vec<i64>> =
                d.dominant_in_box(-bound, bound).into_iter().filter(|mu| d.dominance_leq(mu, &lambda, false)).collect();
            check(parts == below, || format!("{name} λ={lambda:?}: {parts:?} vs {below:?}"))?;
            total += 1;
        }
    }
    Ok(format!("{total} coweights over {} presets", PRESETS.len()))
}

fn c3_bruhat_oracle() -> Outcome {
    let mut pairs = 0u64;
    for name in ["GL2", "SL2", "SL3"] {
        let d = preset(name);
        let aw = AffineWeylGroup::new(&d);
        let classes: Vec<Vec<i64>> = match d.pi1_moduli() {
            [0] => (-1..=2).map(|k| vec![k]).collect(),
            _ => vec![d.pi1_class(&vec![0; d.weight_lattice_rank()]).0],
        };
        let omegas = classes
            .into_iter()
            .map(|c| aw.omega_in_class(&masf_core::root_data::Pi1Class(c)))
            .collect::<masf_core::Result<Vec<_>>>()
            .map_err(e)?;
        let ball = aw.ball(&omegas, 6);
        for y in &ball {
            for x in &ball {
                let o = bruhat_subword_oracle(&aw, x, y, 8).map_err(e)?;
                check(o == aw.bruhat_leq(x, y), || format!("{name}: {} ≤ {}", aw.format(x), aw.format(y)))?;
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} pairs"))
}

fn c4_length_law() -> Outcome {
    let mut n = 0;
    for name in PRESETS {
        let d = preset(name);
        let aw = AffineWeylGroup::new(&d);
        for lambda in d.dominant_in_box(0, 3) {
            let t = aw.translation(&lambda);
            let expected = two_rho_pairing(&d, &lambda);
            let (_, word) = aw.reduced_word(&t);
            check(aw.length(&t) as i64 == expected && word.len() as i64 == expected, || {
                format!("{name} λ={lambda:?}: ℓ = {}, |word| = {}, ⟨2ρ,λ⟩ = {expected}", aw.length(&t), word.len())
            })?;
            n += 1;
        }
    }
    Ok(format!("{n} coweights"))
}

fn c5_maximization() -> Outcome {
    let mut lambdas = 0;
    let mut gammas = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    for name in PRESETS {
        let d = preset(name);
        for lambda in d.dominant_in_box(0, 3) {
            let stab = d.stabilizer_simple(&lambda);
            let best = (0..d.weyl_order()).map(|w| d.length(d.min_coset_rep(w, &stab))).max().unwrap();
            let dim = flag_dimension_by_roots(&d, &lambda);
            check(best == dim, || format!("{name} λ={lambda:?}: max ℓ(w^λ) = {best}, dim G/P_λ = {dim}"))?;
            lambdas += 1;
        }
        let mut found = 0;
        while found < 20 {
            let g = random_split_element(&d, &mut rng, 2, WORKING);
            let inv = GammaInvariants::from_split(&d, &g).map_err(e)?;
            let candidates: Vec<Vec<i64>> = d
                .dominant_in_box(-3, 3)
                .into_iter()
                .filter(|l| {
                    FiberQuery::new(&d, inv.clone(), l.clone(), Level::Iwahori, Variant::Closed).map(|q| q.nonempty(&d)).unwrap_or(false)
                })
                .collect();
            if candidates.is_empty() {
                continue;
            }
            let lambda = candidates[rng.gen_range(0..candidates.len())].clone();
            let dv = disc_by_roots(&d, &g);
            check(dv == discriminant_valuation(&d, &g).map_err(e)?, || format!("{name}: d(γ) disagrees"))?;
            let mu = d.dominant_conjugate(g.mu()).0;
            let half_d = Rational::new(dv, 2);
            let mut best: Option<Rational> = None;
            for w in 0..d.weyl_order() {
                let v = mv_dimension(&d, &lambda, &mu, w).map_err(e)? - d.rho_pairing(&mu) + half_d;
                best = Some(best.map_or(v, |b| b.max(v)));
            }
            let expected = Rational::new(two_rho_pairing(&d, &lambda), 2) + half_d;
            check(best == Some(expected), || format!("{name} λ={lambda:?}: max {best:?} vs {expected}"))?;
            for level in [Level::Spherical, Level::Iwahori] {
                for variant in [Variant::Open, Variant::Closed] {
                    let q = FiberQuery::new(&d, inv.clone(), lambda.clone(), level, variant).map_err(e)?;
                    if !q.nonempty(&d) {
                        // only the open Iwahori fiber can vanish, and only off ν = λ
                        check(level == Level::Iwahori && variant == Variant::Open && newton_point(&d, &g) != lambda, || {
                            format!("{name} λ={lambda:?}: {level:?}/{variant:?} empty")
                        })?;
                        continue;
                    }
                    let dim = q.dimension(&d).map_err(e)?;
                    check(Rational::from_integer(dim) == expected, || format!("{name}: dim_fiber {dim} vs {expected}"))?;
                }
            }
            found += 1;
            gammas += 1;
        }
    }
    Ok(format!("{lambdas} coweights, {gammas} random split γ"))
}

/// A random `GL_2`/`SL_2` query whose unit parts stay regular after reduction to `N`-jets.
fn random_rank_one_query(rng: &mut ChaCha8Rng, jet_level: u32) -> (RootDatum, SplitElement, Vec<i64>) {
    let consts = [1, 2, 4, 7, 8, 11];
    let sl = rng.gen_bool(0.5);
    let d = preset(if sl { "SL2" } else { "GL2" });
    let (mu, mut units) = if sl {
        let m = rng.gen_range(-1..=1);
        (vec![m, -m], vec![vec![consts[rng.gen_range(0..consts.len())]]])
    } else {
        (
            vec![rng.gen_range(-1..=2), rng.gen_range(-1..=1)],
            vec![vec![consts[rng.gen_range(0..consts.len())]], vec![consts[rng.gen_range(0..consts.len())]]],
        )
    };
    if mu[0] == mu[1] {
        // keep the eigenvalues apart at a depth below N in every characteristic used
        let k = rng.gen_range(1..jet_level as usize);
        let mut u = vec![0; k + 1];
        u[0] = 1;
        u[k] = 1;
        units = if sl { vec![u] } else { vec![vec![1], u] };
    }
    if sl {
        units.push(vec![]);
    }
    let g = split_from_ints(&d, &mu, &units, WORKING).expect("regular split element");
    let lambda = if sl {
        let l = rng.gen_range(0..=2);
        vec![l, -l]
    } else {
        let a = rng.gen_range(-1..=2);
        vec![a, a - rng.gen_range(0..=2)]
    };
    (d, g, lambda)
}

fn c6_nonemptiness(runs: &mut Vec<Run>) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let mut agreed = 0;
    let mut nonempty = 0;
    for _ in 0..50 {
        let jet_level = rng.gen_range(2..=4);
        let (d, g, lambda) = random_rank_one_query(&mut rng, jet_level);
        let level = if rng.gen_bool(0.5) { Level::Iwahori } else { Level::Spherical };
        let variant = if rng.gen_bool(0.5) { Variant::Open } else { Variant::Closed };
        let inv = GammaInvariants::from_split(&d, &g).map_err(e)?;
        let predicted = FiberQuery::new(&d, inv, lambda.clone(), level, variant).map_err(e)?.nonempty(&d);
        for q in [3, 5] {
            // a short slack keeps every query under the point budget; it can only hide solutions
            let mut cfg = CensusConfig::new(q, jet_level);
            cfg.slack = Some(2);
            cfg.estimate_dimension = false;
            let r = fiber_census(&d, &g, &lambda, level, variant, &cfg).map_err(e)?;
            check(!r.empty == predicted, || {
                format!("{} μ={:?} λ={lambda:?} {level:?}/{variant:?} q={q} N={jet_level}: predicted {predicted}, census total {}", d.name(), g.mu(), r.total)
            })?;
            runs.push(Run { datum: d.clone(), gamma: g.clone(), report: r });
        }
        agreed += 1;
        nonempty += predicted as usize;
    }
    Ok(format!("{agreed} queries ({nonempty} nonempty) agree at q = 3 and 5, slack 2"))
}

fn c7_dimension_zero(runs: &mut Vec<Run>) -> Outcome {
    let d = preset("GL2");
    let mut checked = 0;
    for units in [vec![vec![1], vec![1]], vec![vec![1], vec![2]], vec![vec![1, 1], vec![4, 0, 2]]] {
        let g = split_from_ints(&d, &[1, 0], &units, WORKING).map_err(e)?;
        let inv = GammaInvariants::from_split(&d, &g).map_err(e)?;
        let dims = [Level::Spherical, Level::Iwahori].map(|level| {
            FiberQuery::new(&d, inv.clone(), vec![1, 0], level, Variant::Closed).and_then(|q| q.dimension(&d))
        });
        check(matches!(dims, [Ok(0), Ok(0)]), || format!("formula dimensions {dims:?}"))?;
        for variant in [Variant::Open, Variant::Closed] {
            let mut totals = Vec::new();
            for jet_level in [3, 4] {
                let r = fiber_census(&d, &g, &[1, 0], Level::Iwahori, variant, &CensusConfig::new(3, jet_level)).map_err(e)?;
                check(r.exact && r.total > 0 && r.dimension_estimate == Some(0) && r.predicted_dimension == Some(0), || {
                    format!("units {units:?} {variant:?} N={jet_level}: {r:?}")
                })?;
                totals.push(r.total);
                runs.push(Run { datum: d.clone(), gamma: g.clone(), report: r });
            }
            check(totals[0] == totals[1], || format!("units {units:?} {variant:?}: counts {totals:?} not N-stable"))?;
            let s = fiber_census(&d, &g, &[1, 0], Level::Spherical, variant, &CensusConfig::new(3, 3)).map_err(e)?;
            check(s.exact && s.total > 0 && s.dimension_estimate == Some(0), || format!("spherical {variant:?}: {s:?}"))?;
            runs.push(Run { datum: d.clone(), gamma: g.clone(), report: s });
            checked += 1;
        }
    }
    Ok(format!("{checked} γ/variant pairs: exact, positive, N-stable, spherical = iwahori = 0"))
}

fn c8_ext_discriminant() -> Outcome {
    let d = preset("SL2");
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let mut n = 0;
    while n < 50 {
        let g = random_split_element(&d, &mut rng, 2, WORKING);
        let m = g.mu()[0];
        let l = m.abs() + rng.gen_range(0..=2);
        let lambda = [l, -l];
        let p = sl2_gamma_lambda(&d, &g, &lambda).map_err(e)?;
        let (a, c) = sl2_chi_plus(&p);
        let lhs = sl2_ext_discriminant(&a, &c).map_err(e)?;
        let rhs = two_rho_pairing(&d, &lambda) + disc_by_roots(&d, &g);
        check(lhs == rhs, || format!("μ={:?} λ={lambda:?}: {lhs} vs {rhs}", g.mu()))?;
        n += 1;
    }
    Ok(format!("{n} random split γ"))
}

fn c9_vinberg() -> Outcome {
    for n in 1..=3 {
        let one_minus = LaurentSeries::parse(&format!("1 - t^{n}"), Q, None).map_err(e)?;
        let geo = one_minus.inverse(WORKING).map_err(e)?;
        let rows = vec![vec![geo, LaurentSeries::one(Q)], vec![one_minus.clone(), one_minus]];
        let p = VinbergSL2Point::new(rows.clone()).map_err(e)?;
        let m = sl2_monoid_membership(&p, n).map_err(e)?;
        check(m.open_locus && m.closure, || format!("n = {n}: {m:?}"))?;
        let g = LoopMatrix::from_rows(rows, MatrixGroup::GL).map_err(e)?;
        let cartan = smith_cartan_exact(&g).map_err(e)?;
        check(cartan == [n, 0], || format!("n = {n}: Cartan {cartan:?}"))?;
    }
    let mut cells = 0;
    let mut samples = 0;
    let mut open_notes = Vec::new();
    for n in 0..=2 {
        let r = iwahori_monoid_census(n, 3, 4, 3, 0x5eed_0009 + n as u64).map_err(e)?;
        check(r.closed_mismatches.is_empty() && r.cell_errors == 0, || format!("n = {n}: {r:?}"))?;
        cells += r.cells_checked;
        samples += r.samples;
        open_notes.extend(r.open_mismatches.iter().map(|c| format!("n={n}:{c}")));
    }
    Ok(format!(
        "explicit matrices open with Cartan (n,0), n = 1..3; closed description matches on {cells} cells / {samples} samples; open-description exceptions: [{}]",
        open_notes.join(", ")
    ))
}

fn c10_surjectivity(runs: &[Run]) -> Verdict {
    let outcome = || -> Result<Verdict, String> {
        let proj: Vec<&Run> = runs.iter().filter(|r| r.report.projection_ok.is_some()).collect();
        let lifts: Vec<&Run> = runs.iter().filter(|r| r.report.lifts_ok.is_some()).collect();
        check(!proj.is_empty() && !lifts.is_empty(), || "no census exercised both checks".into())?;
        let bad_proj = proj.iter().filter(|r| r.report.projection_ok == Some(false)).count();
        check(bad_proj == 0, || format!("{bad_proj} iwahori censuses with a non-spherical projection"))?;
        let mut refuted = Vec::new();
        for r in lifts.iter().filter(|r| r.report.lifts_ok == Some(false)) {
            let c = &r.report;
            let nu = newton_point(&r.datum, &r.gamma);
            let label = format!("{} μ={:?} λ={:?} {:?} q={} N={}", c.datum, r.gamma.mu(), c.lambda, c.variant, c.q, c.jet_level);
            check(c.variant == Variant::Open && nu != c.lambda, || format!("{label}: {} unlifted solutions", c.unlifted))?;
            // certificate: the open Iwahori fiber has no points at all, so nothing can lift
            let mut cfg = CensusConfig::new(c.q, c.jet_level);
            cfg.slack = Some(c.slack);
            cfg.estimate_dimension = false;
            let up = fiber_census(&r.datum, &r.gamma, &c.lambda, Level::Iwahori, Variant::Open, &cfg).map_err(e)?;
            check(up.empty && c.unlifted == c.total && c.total > 0, || format!("{label}: unlifted solutions without a certificate"))?;
            refuted.push(format!("{label} ν={nu:?}: {} spherical solutions, open Iwahori fiber empty", c.total));
        }
        let solutions: u64 = runs.iter().map(|r| r.report.total).sum();
        let summary = format!("{} projection checks, {} lift checks over {solutions} solutions", proj.len(), lifts.len());
        if refuted.is_empty() {
            return Ok(Verdict::Pass(summary));
        }
        Ok(Verdict::Refuted(format!(
            "{summary}; every closed-variant lift and every open lift with ν_γ = λ succeeds, but open spherical solutions \
             with ν_γ ≠ λ never lift because elements of I t^μ I have Newton point dom(μ): {}",
            refuted.join("; ")
        )))
    };
    outcome().unwrap_or_else(Verdict::Fail)
}

fn main() {
    let mut runs = Vec::new();
    let mut failed = 0;
    let mut refuted = 0;
    let mut run = |id: u32, title: &str, budget: Duration, f: &mut dyn FnMut() -> Verdict| {
        let start = Instant::now();
        let verdict = f();
        let elapsed = start.elapsed();
        let verdict = match verdict {
            Verdict::Pass(msg) if elapsed > budget => Verdict::Fail(format!("{msg}; took {elapsed:.2?}, budget {budget:?}")),
            other => other,
        };
        match verdict {
            Verdict::Pass(msg) => println!("PASS {id:>2} {title}: {msg} ({elapsed:.2?})"),
            Verdict::Fail(msg) => {
                failed += 1;
                println!("FAIL {id:>2} {title}: {msg} ({elapsed:.2?})");
            }
            Verdict::Refuted(msg) => {
                refuted += 1;
                println!("FAIL {id:>2} {title}: refuted by certified counterexample: {msg} ({elapsed:.2?})");
            }
        }
    };
    let s = Duration::from_secs;
    run(1, "GL2 admissible set", s(1), &mut || c1_gl2_admissible().into());
    run(2, "closure identity", s(30), &mut || c2_closure_identity().into());
    run(3, "Bruhat order vs subword oracle", s(60), &mut || c3_bruhat_oracle().into());
    run(4, "length law", s(5), &mut || c4_length_law().into());
    run(5, "maximization identity", s(600), &mut || c5_maximization().into());
    run(6, "non-emptiness vs census", s(600), &mut || c6_nonemptiness(&mut runs).into());
    run(7, "dimension-zero census", s(300), &mut || c7_dimension_zero(&mut runs).into());
    run(8, "extended discriminant", s(600), &mut || c8_ext_discriminant().into());
    run(9, "Vinberg membership", s(600), &mut || c9_vinberg().into());
    run(10, "surjectivity on censuses", s(600), &mut || c10_surjectivity(&runs));
    if refuted > 0 {
        println!("{refuted} criteria refuted by certified counterexamples (not counted as unexpected failures)");
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed unexpectedly");
        std::process::exit(1);
    }
}
