//! Fast invariant suites of every module, for the `selftest` command.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::affine_weyl::{dominant_translation_parts, AffineWeylGroup};
use crate::invariants::{
    discriminant_valuation, mv_dimension, partial_flag_dimension, random_split_element, FiberQuery, GammaInvariants, Level,
    Variant,
};
use crate::laurent::{CoefficientField, LaurentSeries, Valuation};
use crate::loop_group::{iwahori_cell, iwahori_cell_fast, smith_cartan, smith_cartan_exact, LoopMatrix, MatrixGroup};
use crate::oracle::{bruhat_subword_oracle, fiber_census, iwahori_monoid_census, split_from_ints, CensusConfig};
use crate::root_data::{RootDatum, PRESETS};
use crate::vinberg::{sl2_chi_plus, sl2_ext_discriminant, sl2_gamma_lambda, sl2_steinberg_section, sl3_embed, sl3_vinberg_check};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub module: &'static str,
    pub name: &'static str,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelftestReport {
    pub passed: bool,
    pub checks: Vec<Check>,
}

type Outcome = std::result::Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

pub fn run() -> SelftestReport {
    let suites: Vec<(&'static str, &'static str, fn() -> Outcome)> = vec![
        ("root_data", "dominance order is a partial order", dominance_partial_order),
        ("root_data", "dominant conjugate is idempotent and W-invariant", dominant_conjugates),
        ("laurent", "valuation is multiplicative and inverse is exact", laurent_laws),
        ("laurent", "text form round-trips", laurent_round_trip),
        ("affine_weyl", "bruhat order agrees with the subword oracle", bruhat_oracle),
        ("affine_weyl", "GL2 admissible set", gl2_admissible),
        ("affine_weyl", "closure identity on double cosets", closure_identity),
        ("affine_weyl", "translation length law", length_law),
        ("invariants", "maximization identity for the dimension formula", maximization),
        ("invariants", "fiber dimension is W-invariant in γ", w_invariance),
        ("loop_group", "cell algorithms agree on random Iwahori double cosets", cell_agreement),
        ("vinberg", "Steinberg section and SL3 relations", vinberg_relations),
        ("vinberg", "extended discriminant matches ⟨2ρ,λ⟩ + d(γ)", ext_discriminant),
        ("vinberg", "Iwahori submonoid equals the admissible union", monoid_census),
        ("oracle", "dimension-zero census", dimension_zero_census),
    ];
    let checks: Vec<Check> = suites
        .into_iter()
        .map(|(module, name, f)| {
            let r = f();
            Check { module, name, passed: r.is_ok(), detail: r.err() }
        })
        .collect();
    SelftestReport { passed: checks.iter().all(|c| c.passed), checks }
}

fn dominance_partial_order() -> Outcome {
    for name in PRESETS {
        let d = RootDatum::preset(name).map_err(err)?;
        let pts = d.dominant_in_box(-1, 2);
        for a in &pts {
            ensure(d.dominance_leq(a, a, false), || format!("{name}: {a:?} not reflexive"))?;
            for b in &pts {
                if a != b && d.dominance_leq(a, b, false) {
                    ensure(!d.dominance_leq(b, a, false), || format!("{name}: {a:?}, {b:?} antisymmetry"))?;
                }
            }
        }
    }
    Ok(())
}

fn dominant_conjugates() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for name in PRESETS {
        let d = RootDatum::preset(name).map_err(err)?;
        for _ in 0..20 {
            let mu: Vec<i64> = (0..d.weight_lattice_rank()).map(|_| rng.gen_range(-3..=3)).collect();
            if d.check_coweight(&mu).is_err() {
                continue;
            }
            let (dom, w) = d.dominant_conjugate(&mu);
            ensure(d.is_dominant(&dom) && d.act_coweight(w, &mu) == dom, || format!("{name}: {mu:?}"))?;
            ensure(d.dominant_conjugate(&dom).0 == dom, || format!("{name}: not idempotent at {mu:?}"))?;
        }
    }
    Ok(())
}

fn laurent_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for field in [CoefficientField::Rationals, CoefficientField::prime(5).map_err(err)?] {
        for _ in 0..30 {
            let a = LaurentSeries::from_i64s(field, rng.gen_range(-3..3), &[rng.gen_range(1..5), rng.gen_range(-4..5)], None);
            let b = LaurentSeries::from_i64s(field, rng.gen_range(-3..3), &[rng.gen_range(1..5), rng.gen_range(-4..5)], None);
            let va = a.finite_valuation().map_err(err)?;
            let vb = b.finite_valuation().map_err(err)?;
            ensure(a.mul(&b).finite_valuation().map_err(err)? == va + vb, || format!("val({a}·{b})"))?;
            let prod = a.mul(&a.inverse(16).map_err(err)?);
            ensure(prod.sub(&LaurentSeries::one(field)).is_known_zero(), || format!("{a}·{a}⁻¹ = {prod}"))?;
            ensure(a.add(&b).valuation().map_err(err)? >= Valuation::Finite(va.min(vb)), || format!("val({a}+{b})"))?;
        }
    }
    Ok(())
}

fn laurent_round_trip() -> Outcome {
    let q = CoefficientField::Rationals;
    for s in ["t^{-1} + 2 + 3*t + O(t^5)", "-1/2*t^3", "O(t^2)", "1 - t^2", "0"] {
        let x = LaurentSeries::parse(s, q, None).map_err(err)?;
        ensure(x.to_string() == s, || format!("{s} printed as {x}"))?;
    }
    Ok(())
}

fn bruhat_oracle() -> Outcome {
    for name in ["GL2", "SL2", "SL3"] {
        let d = RootDatum::preset(name).map_err(err)?;
        let aw = AffineWeylGroup::new(&d);
        let ball = aw.ball(&[aw.identity()], 3);
        for y in &ball {
            for x in &ball {
                let o = bruhat_subword_oracle(&aw, x, y, 8).map_err(err)?;
                ensure(o == aw.bruhat_leq(x, y), || format!("{name}: {} ≤ {}", aw.format(x), aw.format(y)))?;
            }
        }
    }
    Ok(())
}

fn gl2_admissible() -> Outcome {
    let d = RootDatum::preset("GL2").map_err(err)?;
    let aw = AffineWeylGroup::new(&d);
    let got: Vec<String> = aw.admissible_set(&[1, 0]).map_err(err)?.iter().map(|x| aw.format(x)).collect();
    ensure(got == ["t^[0,1]*s1", "t^[0,1]", "t^[1,0]"], || format!("{got:?}"))
}

fn closure_identity() -> Outcome {
    for name in ["GL2", "SL2", "SL3", "PGL2"] {
        let d = RootDatum::preset(name).map_err(err)?;
        let aw = AffineWeylGroup::new(&d);
        for lambda in d.dominant_in_box(-1, 1) {
            let adm = aw.admissible_set(&lambda).map_err(err)?;
            let mut parts = dominant_translation_parts(&d, &adm);
            parts.sort();
            let mut below: Vec<Vec<i64>> =
                d.dominant_in_box(-3, 3).into_iter().filter(|mu| d.dominance_leq(mu, &lambda, false)).collect();
            below.sort();
            ensure(parts == below, || format!("{name} {lambda:?}: {parts:?} vs {below:?}"))?;
        }
    }
    Ok(())
}

fn length_law() -> Outcome {
    for name in PRESETS {
        let d = RootDatum::preset(name).map_err(err)?;
        let aw = AffineWeylGroup::new(&d);
        for lambda in d.dominant_in_box(0, 2) {
            let l = aw.length(&aw.translation(&lambda)) as i64;
            ensure(l == d.pairing(d.two_rho(), &lambda), || format!("{name} {lambda:?}: {l}"))?;
        }
    }
    Ok(())
}

fn maximization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for name in PRESETS {
        let d = RootDatum::preset(name).map_err(err)?;
        for lambda in d.dominant_in_box(0, 2) {
            let best = (0..d.weyl_order())
                .map(|w| d.length(d.min_coset_rep(w, &d.stabilizer_simple(&lambda))))
                .max()
                .unwrap_or(0);
            ensure(best == partial_flag_dimension(&d, &lambda), || format!("{name} {lambda:?}"))?;
        }
        for _ in 0..5 {
            let g = random_split_element(&d, &mut rng, 2, 16);
            let lambda = d.dominant_conjugate(g.mu()).0;
            let dv = discriminant_valuation(&d, &g).map_err(err)?;
            let mu = lambda.clone();
            let best = (0..d.weyl_order())
                .map(|w| mv_dimension(&d, &lambda, &mu, w).map(|e| e - d.rho_pairing(&mu)))
                .collect::<crate::Result<Vec<_>>>()
                .map_err(err)?
                .into_iter()
                .max()
                .unwrap();
            let expected = d.rho_pairing(&lambda);
            ensure(best == expected, || format!("{name} {lambda:?}: {best} vs {expected}"))?;
            let query = FiberQuery::new(&d, GammaInvariants::from_split(&d, &g).map_err(err)?, lambda.clone(), Level::Iwahori, Variant::Closed)
                .map_err(err)?;
            if let Ok(dim) = query.dimension(&d) {
                let twice = 2 * dim - d.pairing(d.two_rho(), &lambda);
                ensure(twice == dv, || format!("{name}: dimension {dim} vs d = {dv}"))?;
            }
        }
    }
    Ok(())
}

fn w_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for name in ["GL2", "SL3", "Sp4"] {
        let d = RootDatum::preset(name).map_err(err)?;
        for _ in 0..5 {
            let g = random_split_element(&d, &mut rng, 2, 16);
            let base = discriminant_valuation(&d, &g).map_err(err)?;
            for w in 0..d.weyl_order() {
                let h = g.conjugate(&d, w).map_err(err)?;
                ensure(discriminant_valuation(&d, &h).map_err(err)? == base, || format!("{name}: d not W-invariant"))?;
            }
        }
    }
    Ok(())
}

fn cell_agreement() -> Outcome {
    let q = CoefficientField::Rationals;
    for (name, n, group) in [("GL2", 2, MatrixGroup::GL), ("SL3", 3, MatrixGroup::SL)] {
        let d = RootDatum::preset(name).map_err(err)?;
        let aw = AffineWeylGroup::new(&d);
        for w in aw.ball(&[aw.identity()], 3) {
            let m = LoopMatrix::monomial(&d, &w, q, group).map_err(err)?;
            let x = crate::loop_group::root_subgroup(n, 1, &q.from_i64(2), group);
            let y = crate::loop_group::root_subgroup(n, 0, &q.from_i64(-1), group);
            let g = x.mul(&m).mul(&y);
            let slow = iwahori_cell(&d, &g).map_err(err)?;
            ensure(slow == w, || format!("{name}: cell of {} is {}", aw.format(&w), aw.format(&slow)))?;
            ensure(iwahori_cell_fast(&d, &g, 16).map_err(err)? == w, || format!("{name}: fast cell"))?;
            ensure(smith_cartan(&g, 16).map_err(err)? == smith_cartan_exact(&g).map_err(err)?, || format!("{name}: smith"))?;
        }
    }
    Ok(())
}

fn vinberg_relations() -> Outcome {
    let q = CoefficientField::Rationals;
    let a = LaurentSeries::from_i64s(q, 1, &[2, 1], None);
    let c = LaurentSeries::from_i64s(q, 0, &[1, -3], None);
    ensure(sl2_chi_plus(&sl2_steinberg_section(&a, &c)) == (a.clone(), c.clone()), || "χ₊∘ε₊ ≠ id".into())?;
    let g = crate::loop_group::root_subgroup(3, 1, &q.from_i64(3), MatrixGroup::SL)
        .mul(&crate::loop_group::simple_representative(3, 0, q, MatrixGroup::SL));
    let p = sl3_embed(&a.shift(-1), &c, &g, 16).map_err(err)?;
    ensure(sl3_vinberg_check(&p).map_err(err)?, || "SL3 embedding violates the relations".into())
}

fn ext_discriminant() -> Outcome {
    let d = RootDatum::preset("SL2").map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let g = random_split_element(&d, &mut rng, 2, 16);
        let l = rng.gen_range(0..3);
        let p = sl2_gamma_lambda(&d, &g, &[l, -l]).map_err(err)?;
        let (a, c) = sl2_chi_plus(&p);
        let lhs = sl2_ext_discriminant(&a, &c).map_err(err)?;
        let rhs = 2 * l + discriminant_valuation(&d, &g).map_err(err)?;
        ensure(lhs == rhs, || format!("{lhs} vs {rhs}"))?;
    }
    Ok(())
}

fn monoid_census() -> Outcome {
    for n in 0..=2 {
        let r = iwahori_monoid_census(n, 3, 3, 2, 11).map_err(err)?;
        ensure(r.closed_mismatches.is_empty() && r.cell_errors == 0, || format!("n = {n}: {:?}", r.closed_mismatches))?;
    }
    Ok(())
}

fn dimension_zero_census() -> Outcome {
    let d = RootDatum::preset("GL2").map_err(err)?;
    let g = split_from_ints(&d, &[1, 0], &[vec![1], vec![2]], 16).map_err(err)?;
    let r = fiber_census(&d, &g, &[1, 0], Level::Iwahori, Variant::Open, &CensusConfig::new(3, 3)).map_err(err)?;
    ensure(r.total > 0 && r.exact && r.dimension_estimate == Some(0), || format!("{r:?}"))?;
    ensure(r.projection_ok == Some(true), || "projection check failed".into())
}
