//! Newton points, Kottwitz classes, discriminant valuations and dimension formulas.

use num_traits::Signed;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intmat::{dot, Rational};
use crate::laurent::{char_eval, CoefficientField, LaurentSeries, Valuation};
use crate::root_data::{Pi1Class, RootDatum, WeylId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Open,
    Closed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Spherical,
    Iwahori,
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "open" => Ok(Variant::Open),
            "closed" => Ok(Variant::Closed),
            _ => Err(Error::Parse(format!("unknown variant `{s}`"))),
        }
    }
}

impl std::str::FromStr for Level {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spherical" => Ok(Level::Spherical),
            "iwahori" => Ok(Level::Iwahori),
            _ => Err(Error::Parse(format!("unknown level `{s}`"))),
        }
    }
}

/// A split regular semisimple element `γ = t^μ·u` of `T(F)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitElement {
    mu: Vec<i64>,
    units: Vec<LaurentSeries>,
    working: i64,
}

impl SplitElement {
    /// Validates unit entries, the torus constraints and regularity.
    pub fn new(datum: &RootDatum, mu: Vec<i64>, units: Vec<LaurentSeries>, working: i64) -> Result<Self> {
        datum.check_coweight(&mu)?;
        let m = datum.weight_lattice_rank();
        if units.len() != m {
            return Err(Error::DimensionMismatch { expected: m, got: units.len() });
        }
        let field = units[0].field();
        for u in &units {
            if u.field() != field {
                return Err(Error::FieldMismatch);
            }
            match u.valuation() {
                Ok(Valuation::Finite(0)) => {}
                Ok(_) => return Err(Error::NonUnitEntry(u.to_string())),
                Err(e) => return Err(e),
            }
        }
        for k in datum.coweight_constraints() {
            let prod = char_eval(datum, k, &units, working)?;
            if !prod.sub(&LaurentSeries::one(field)).is_known_zero() {
                return Err(Error::InvalidDatum(format!(
                    "unit part violates the torus relation {k:?}: product is {prod}"
                )));
            }
        }
        let g = SplitElement { mu, units, working };
        for a in 0..datum.num_roots() {
            let v = g.one_minus_root(datum, a)?;
            if v.is_known_zero() {
                return Err(Error::NotRegular(format!("α(γ) = 1 for α = {:?}", datum.root(a))));
            }
        }
        Ok(g)
    }

    pub fn mu(&self) -> &[i64] {
        &self.mu
    }

    pub fn units(&self) -> &[LaurentSeries] {
        &self.units
    }

    pub fn field(&self) -> CoefficientField {
        self.units[0].field()
    }

    pub fn working_precision(&self) -> i64 {
        self.working
    }

    /// Torus coordinates `t^{μ_i} u_i`.
    pub fn coords(&self) -> Vec<LaurentSeries> {
        self.mu.iter().zip(&self.units).map(|(&k, u)| u.shift(k)).collect()
    }

    pub fn root_value(&self, datum: &RootDatum, a: usize) -> Result<LaurentSeries> {
        char_eval(datum, datum.root(a), &self.coords(), self.working)
    }

    fn one_minus_root(&self, datum: &RootDatum, a: usize) -> Result<LaurentSeries> {
        Ok(LaurentSeries::one(self.field()).sub(&self.root_value(datum, a)?))
    }

    /// `val(1 − α(γ))`.
    pub fn root_term(&self, datum: &RootDatum, a: usize) -> Result<i64> {
        match self.one_minus_root(datum, a)?.valuation() {
            Ok(Valuation::Finite(v)) => Ok(v),
            Ok(Valuation::Infinite) => Err(Error::NotRegular(format!("α(γ) = 1 for α = {:?}", datum.root(a)))),
            Err(e) => Err(e),
        }
    }

    /// `w·γ`, acting through the coweight matrix of `w`.
    pub fn conjugate(&self, datum: &RootDatum, w: WeylId) -> Result<Self> {
        let mat = &datum.weyl(w).coweight_action;
        let m = datum.weight_lattice_rank();
        let field = self.field();
        let mut units = Vec::with_capacity(m);
        for j in 0..m {
            let mut acc = LaurentSeries::one(field);
            for i in 0..m {
                let e = mat.get(j, i);
                if e != 0 {
                    acc = acc.mul(&self.units[i].pow(e, self.working)?);
                }
            }
            units.push(acc);
        }
        SplitElement::new(datum, datum.act_coweight(w, &self.mu), units, self.working)
    }
}

pub fn newton_point(datum: &RootDatum, g: &SplitElement) -> Vec<i64> {
    datum.dominant_conjugate(g.mu()).0
}

pub fn kottwitz_class(datum: &RootDatum, g: &SplitElement) -> Pi1Class {
    datum.pi1_class(g.mu())
}

/// `d(γ) = Σ_{α∈Φ} val(1 − α(γ))`.
pub fn discriminant_valuation(datum: &RootDatum, g: &SplitElement) -> Result<i64> {
    (0..datum.num_roots()).map(|a| g.root_term(datum, a)).sum()
}

pub fn c_invariant(_g: &SplitElement) -> i64 {
    0
}

/// Invariants of `γ` that the non-emptiness and dimension formulas consume.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GammaInvariants {
    #[serde(serialize_with = "ser_rationals")]
    pub newton: Vec<Rational>,
    pub kappa: Pi1Class,
    pub d: i64,
    pub c: i64,
}

fn ser_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        if x.is_integer() {
            seq.serialize_element(&x.to_integer())?;
        } else {
            seq.serialize_element(&format!("{}/{}", x.numer(), x.denom()))?;
        }
    }
    seq.end()
}

impl GammaInvariants {
    pub fn from_split(datum: &RootDatum, g: &SplitElement) -> Result<Self> {
        Ok(GammaInvariants {
            newton: newton_point(datum, g).into_iter().map(Rational::from_integer).collect(),
            kappa: kottwitz_class(datum, g),
            d: discriminant_valuation(datum, g)?,
            c: c_invariant(g),
        })
    }

    /// Caller-supplied invariants of a possibly non-split element. `kappa` is given by any
    /// coweight in the class.
    pub fn explicit(datum: &RootDatum, nu: Vec<Rational>, kappa: &[i64], d: i64, c: i64) -> Result<Self> {
        if c < 0 {
            return Err(Error::NegativeC(c));
        }
        let m = datum.weight_lattice_rank();
        if nu.len() != m {
            return Err(Error::DimensionMismatch { expected: m, got: nu.len() });
        }
        datum.check_coweight(kappa)?;
        let pairings = datum
            .simple_roots()
            .iter()
            .map(|a| a.iter().zip(&nu).map(|(&x, y)| *y * Rational::from_integer(x)).sum::<Rational>());
        if pairings.into_iter().any(|p| p.is_negative()) {
            return Err(Error::NotDominant("Newton point".into()));
        }
        Ok(GammaInvariants { newton: nu, kappa: datum.pi1_class(kappa), d, c })
    }
}

#[derive(Clone, Debug)]
pub struct FiberQuery {
    pub gamma: GammaInvariants,
    pub lambda: Vec<i64>,
    pub level: Level,
    pub variant: Variant,
}

/// Result bundle of a non-emptiness and dimension query.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct FiberReport {
    pub nonempty: bool,
    pub dimension: Option<i64>,
    pub d: i64,
    pub d_plus: i64,
    pub c: i64,
    #[serde(serialize_with = "ser_rationals")]
    pub newton: Vec<Rational>,
    pub kottwitz: Pi1Class,
    pub level: Level,
    pub variant: Variant,
}

impl FiberQuery {
    pub fn new(datum: &RootDatum, gamma: GammaInvariants, lambda: Vec<i64>, level: Level, variant: Variant) -> Result<Self> {
        datum.require_dominant(&lambda)?;
        if gamma.c < 0 {
            return Err(Error::NegativeC(gamma.c));
        }
        Ok(FiberQuery { gamma, lambda, level, variant })
    }

    /// `κ(γ) = [λ]` and `ν_γ ≤_ℚ λ`, except for the open Iwahori variant, which needs `ν_γ = λ`.
    ///
    /// An element `h` of `I t^μ I` has `hⁿ ∈ I t^{nμ} I` because translations are straight, so its
    /// Newton point is the dominant conjugate of `μ`. Conversely a split `γ` with `ν_γ = λ` is
    /// `W`-conjugate into `t^λ T(O)`.
    pub fn nonempty(&self, datum: &RootDatum) -> bool {
        if self.gamma.kappa != datum.pi1_class(&self.lambda) {
            return false;
        }
        match (self.level, self.variant) {
            (Level::Iwahori, Variant::Open) => {
                self.gamma.newton.iter().zip(&self.lambda).all(|(n, &l)| *n == Rational::from_integer(l))
            }
            _ => datum.rational_dominance_leq(&self.gamma.newton, &self.lambda),
        }
    }

    /// `d₊ = ⟨2ρ, λ⟩ + d(γ)`.
    pub fn extended_discriminant(&self, datum: &RootDatum) -> Result<i64> {
        if !self.nonempty(datum) {
            return Err(Error::EmptyFiber);
        }
        let dp = dot(datum.two_rho(), &self.lambda) + self.gamma.d;
        if dp < 0 {
            return Err(Error::NonIntegralDimension(format!("extended discriminant {dp} is negative")));
        }
        Ok(dp)
    }

    /// `⟨ρ, λ⟩ + (d − c)/2`.
    pub fn dimension(&self, datum: &RootDatum) -> Result<i64> {
        if !self.nonempty(datum) {
            return Err(Error::EmptyFiber);
        }
        let val = datum.rho_pairing(&self.lambda) + Rational::new(self.gamma.d - self.gamma.c, 2);
        if !val.is_integer() || val.is_negative() {
            return Err(Error::NonIntegralDimension(format!("{val}")));
        }
        Ok(val.to_integer())
    }

    pub fn report(&self, datum: &RootDatum) -> Result<FiberReport> {
        let nonempty = self.nonempty(datum);
        let dimension = if nonempty { Some(self.dimension(datum)?) } else { None };
        Ok(FiberReport {
            nonempty,
            dimension,
            d: self.gamma.d,
            d_plus: dot(datum.two_rho(), &self.lambda) + self.gamma.d,
            c: self.gamma.c,
            newton: self.gamma.newton.clone(),
            kottwitz: self.gamma.kappa.clone(),
            level: self.level,
            variant: self.variant,
        })
    }
}

/// `dim G/P_λ = ℓ(w₀) − ℓ(w_{0,λ})`.
pub fn partial_flag_dimension(datum: &RootDatum, lambda: &[i64]) -> usize {
    let stab = datum.stabilizer_simple(lambda);
    let longest_stab = datum
        .parabolic_subgroup(&stab)
        .into_iter()
        .map(|w| datum.length(w))
        .max()
        .unwrap_or(0);
    datum.length(datum.longest_element()) - longest_stab
}

/// `⟨λ + μ, ρ⟩ − dim G/P_λ + ℓ(w^λ)` with `w^λ` minimal in `wW_λ`.
pub fn mv_dimension(datum: &RootDatum, lambda: &[i64], mu: &[i64], w: WeylId) -> Result<Rational> {
    datum.require_dominant(lambda)?;
    datum.check_coweight(mu)?;
    let sum: Vec<i64> = lambda.iter().zip(mu).map(|(a, b)| a + b).collect();
    let stab = datum.stabilizer_simple(lambda);
    let rep = datum.min_coset_rep(w, &stab);
    Ok(datum.rho_pairing(&sum) - Rational::from_integer(partial_flag_dimension(datum, lambda) as i64)
        + Rational::from_integer(datum.length(rep) as i64))
}

/// Checks that a set of root indices is `Φ^±∖Φ_J^±` for some set `J` of simple roots.
pub fn validate_parabolic(datum: &RootDatum, roots: &[usize]) -> Result<()> {
    let mut target: Vec<usize> = roots.to_vec();
    target.sort_unstable();
    target.dedup();
    if target.len() != roots.len() {
        return Err(Error::InvalidParabolic("repeated root".into()));
    }
    let r = datum.rank();
    for mask in 0u32..(1 << r) {
        let in_j = |b: usize| {
            let c = datum.simple_root_coefficients(datum.root(b));
            (0..r).all(|i| c[i] == 0 || mask & (1 << i) != 0)
        };
        for positive in [true, false] {
            let n: Vec<usize> = (0..datum.num_roots())
                .filter(|&b| datum.is_positive_root(b) == positive && !in_j(b))
                .collect();
            if n == target {
                return Ok(());
            }
        }
    }
    Err(Error::InvalidParabolic(format!("{roots:?}")))
}

/// `r_N(γ) = Σ_{β∈N} val(1 − β(γ))`.
pub fn r_n_valuation(datum: &RootDatum, g: &SplitElement, roots: &[usize]) -> Result<i64> {
    validate_parabolic(datum, roots)?;
    roots.iter().map(|&b| g.root_term(datum, b)).sum()
}

/// Random regular split element with `μ` in `[-mu_bound, mu_bound]` and polynomial units.
pub fn random_split_element<R: Rng>(datum: &RootDatum, rng: &mut R, mu_bound: i64, working: i64) -> SplitElement {
    let m = datum.weight_lattice_rank();
    let field = CoefficientField::Rationals;
    loop {
        let mut mu: Vec<i64> = (0..m).map(|_| rng.gen_range(-mu_bound..=mu_bound)).collect();
        let mut units: Vec<LaurentSeries> = (0..m)
            .map(|_| {
                let mut cs = vec![rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 }];
                for _ in 0..rng.gen_range(0..3) {
                    cs.push(rng.gen_range(-2..=2));
                }
                LaurentSeries::from_i64s(field, 0, &cs, None)
            })
            .collect();
        // project onto the constraints; only the sum-zero form is needed for presets
        for k in datum.coweight_constraints() {
            if let Some(j) = (0..m).rev().find(|&j| k[j] == 1) {
                let rest: i64 = (0..m).filter(|&i| i != j).map(|i| k[i] * mu[i]).sum();
                mu[j] = -rest;
                let mut prod = LaurentSeries::one(field);
                for i in (0..m).filter(|&i| i != j) {
                    prod = prod.mul(&units[i].pow(k[i], working).expect("unit"));
                }
                units[j] = prod.inverse(working).expect("unit");
            }
        }
        if let Ok(g) = SplitElement::new(datum, mu, units, working) {
            if discriminant_valuation(datum, &g).is_ok() {
                return g;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::root_data::PRESETS;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const Q: CoefficientField = CoefficientField::Rationals;

    fn s(x: &str) -> LaurentSeries {
        LaurentSeries::parse(x, Q, None).unwrap()
    }

    fn split(d: &RootDatum, mu: &[i64], units: &[&str]) -> SplitElement {
        SplitElement::new(d, mu.to_vec(), units.iter().map(|u| s(u)).collect(), 16).unwrap()
    }

    fn query(d: &RootDatum, g: &SplitElement, lambda: &[i64]) -> FiberQuery {
        FiberQuery::new(d, GammaInvariants::from_split(d, g).unwrap(), lambda.to_vec(), Level::Spherical, Variant::Closed)
            .unwrap()
    }

    #[test]
    fn newton_and_kottwitz() {
        let gl2 = RootDatum::preset("GL2").unwrap();
        let g = split(&gl2, &[1, 0], &["2", "1 + t"]);
        assert_eq!(newton_point(&gl2, &g), vec![1, 0]);
        assert_eq!(kottwitz_class(&gl2, &g).to_string(), "1");
        let g = split(&gl2, &[0, 0], &["2", "1 + t"]);
        assert_eq!(newton_point(&gl2, &g), vec![0, 0]);
        let g = split(&gl2, &[1, 1], &["2", "1 + t"]);
        assert_eq!(kottwitz_class(&gl2, &g).to_string(), "2");
        let sl3 = RootDatum::preset("SL3").unwrap();
        let g = split(&sl3, &[-1, -1, 2], &["2", "3", "1/6"]);
        assert_eq!(newton_point(&sl3, &g), vec![2, -1, -1]);
        assert!(kottwitz_class(&sl3, &g).is_trivial());
        let sl2 = RootDatum::preset("SL2").unwrap();
        assert!(kottwitz_class(&sl2, &split(&sl2, &[1, -1], &["2", "1/2"])).is_trivial());
    }

    #[test]
    fn construction_checks() {
        let gl2 = RootDatum::preset("GL2").unwrap();
        let bad = SplitElement::new(&gl2, vec![0, 0], vec![s("1"), s("1")], 16);
        assert!(matches!(bad, Err(Error::NotRegular(_))));
        let bad = SplitElement::new(&gl2, vec![0, 0], vec![s("t"), s("1")], 16);
        assert!(matches!(bad, Err(Error::NonUnitEntry(_))));
        let sl2 = RootDatum::preset("SL2").unwrap();
        let bad = SplitElement::new(&sl2, vec![0, 0], vec![s("2"), s("2")], 16);
        assert!(matches!(bad, Err(Error::InvalidDatum(_))));
    }

    #[test]
    fn nonempty_examples() {
        let gl2 = RootDatum::preset("GL2").unwrap();
        let g = split(&gl2, &[1, 0], &["2", "1"]);
        assert!(query(&gl2, &g, &[1, 0]).nonempty(&gl2));
        let g = split(&gl2, &[0, 0], &["2", "1"]);
        assert!(!query(&gl2, &g, &[1, 0]).nonempty(&gl2));
        let sl2 = RootDatum::preset("SL2").unwrap();
        let g = split(&sl2, &[1, -1], &["2", "1/2"]);
        assert!(query(&sl2, &g, &[1, -1]).nonempty(&sl2));
        let open = |g: &SplitElement, l: &[i64]| {
            let inv = GammaInvariants::from_split(&sl2, g).unwrap();
            FiberQuery::new(&sl2, inv, l.to_vec(), Level::Iwahori, Variant::Open).unwrap().nonempty(&sl2)
        };
        assert!(open(&g, &[1, -1]));
        assert!(!open(&g, &[2, -2]));
        assert!(query(&sl2, &g, &[2, -2]).nonempty(&sl2));
    }

    #[test]
    fn discriminant_examples() {
        let gl2 = RootDatum::preset("GL2").unwrap();
        let g = split(&gl2, &[1, 0], &["1", "1"]);
        assert_eq!(discriminant_valuation(&gl2, &g).unwrap(), -1);
        let g = split(&gl2, &[0, 0], &["1 + t", "1 - t"]);
        assert_eq!(discriminant_valuation(&gl2, &g).unwrap(), 2);
        let sl2 = RootDatum::preset("SL2").unwrap();
        let u = s("1 + t");
        let g = SplitElement::new(&sl2, vec![0, 0], vec![u.clone(), u.inverse(16).unwrap()], 16).unwrap();
        assert_eq!(discriminant_valuation(&sl2, &g).unwrap(), 2);
        assert_eq!(query(&sl2, &g, &[1, -1]).extended_discriminant(&sl2).unwrap(), 4);
        assert_eq!(query(&sl2, &g, &[1, -1]).dimension(&sl2).unwrap(), 2);
        let g = split(&gl2, &[1, 0], &["1", "1"]);
        assert_eq!(query(&gl2, &g, &[1, 0]).extended_discriminant(&gl2).unwrap(), 0);
        assert_eq!(query(&gl2, &g, &[1, 0]).dimension(&gl2).unwrap(), 0);
        let g = split(&gl2, &[0, 0], &["1 + t", "1 - t"]);
        assert_eq!(query(&gl2, &g, &[0, 0]).extended_discriminant(&gl2).unwrap(), 2);
        assert_eq!(query(&gl2, &g, &[1, -1]).dimension(&gl2).unwrap(), 2);
        assert!(matches!(query(&gl2, &g, &[1, 0]).dimension(&gl2), Err(Error::EmptyFiber)));
    }

    #[test]
    fn c_invariant_handling() {
        let gl2 = RootDatum::preset("GL2").unwrap();
        assert_eq!(c_invariant(&split(&gl2, &[1, 0], &["1", "1"])), 0);
        let half = Rational::new(1, 2);
        let inv = GammaInvariants::explicit(&gl2, vec![half, half], &[1, 0], 0, 1).unwrap();
        assert_eq!(inv.c, 1);
        let q = FiberQuery::new(&gl2, inv, vec![1, 0], Level::Spherical, Variant::Open).unwrap();
        assert!(q.nonempty(&gl2));
        assert_eq!(q.dimension(&gl2).unwrap(), 0);
        assert!(matches!(
            GammaInvariants::explicit(&gl2, vec![half, half], &[1, 0], 1, -1),
            Err(Error::NegativeC(-1))
        ));
        let odd = GammaInvariants::explicit(&gl2, vec![half, half], &[1, 0], 1, 1).unwrap();
        let q = FiberQuery::new(&gl2, odd, vec![1, 0], Level::Spherical, Variant::Open).unwrap();
        assert!(matches!(q.dimension(&gl2), Err(Error::NonIntegralDimension(_))));
    }

    #[test]
    fn mv_dimension_examples() {
        let gl2 = RootDatum::preset("GL2").unwrap();
        let s1 = gl2.simple_reflection(0);
        assert_eq!(mv_dimension(&gl2, &[1, 0], &[1, 0], s1).unwrap(), Rational::from_integer(1));
        for name in PRESETS {
            let d = RootDatum::preset(name).unwrap();
            let w0 = d.longest_element();
            let l0 = d.length(w0) as i64;
            for lambda in d.dominant_in_box(0, 2) {
                let mu = lambda.clone();
                let sum: Vec<i64> = lambda.iter().zip(&mu).map(|(a, b)| a + b).collect();
                let base = d.rho_pairing(&sum);
                let e = mv_dimension(&d, &lambda, &mu, d.identity()).unwrap();
                assert_eq!(e, base - Rational::from_integer(partial_flag_dimension(&d, &lambda) as i64));
                if d.stabilizer_simple(&lambda).is_empty() {
                    assert_eq!(partial_flag_dimension(&d, &lambda) as i64, l0);
                    assert_eq!(mv_dimension(&d, &lambda, &mu, w0).unwrap(), base);
                }
                let best = (0..d.weyl_order())
                    .map(|w| d.length(d.min_coset_rep(w, &d.stabilizer_simple(&lambda))))
                    .max()
                    .unwrap();
                assert_eq!(best, partial_flag_dimension(&d, &lambda));
            }
        }
    }

    #[test]
    fn r_n_examples() {
        let gl2 = RootDatum::preset("GL2").unwrap();
        let g = split(&gl2, &[1, 0], &["1", "1"]);
        let alpha = gl2.root_index(&[1, -1]).unwrap();
        let neg = gl2.root_index(&[-1, 1]).unwrap();
        assert_eq!(r_n_valuation(&gl2, &g, &[neg]).unwrap(), -1);
        assert_eq!(r_n_valuation(&gl2, &g, &[alpha]).unwrap(), 0);
        assert_eq!(r_n_valuation(&gl2, &g, &[]).unwrap(), 0);
        let sl3 = RootDatum::preset("SL3").unwrap();
        let a1 = sl3.root_index(&[1, -1, 0]).unwrap();
        let g3 = split(&sl3, &[1, 0, -1], &["2", "3", "1/6"]);
        assert!(matches!(r_n_valuation(&sl3, &g3, &[a1]), Err(Error::InvalidParabolic(_))));
    }

    /// `r_{U⁻}(t^μ)` and `½d(t^μ) + ⟨μ, ρ⟩` differ by `⟨2ρ, μ⟩` on dominant `μ`.
    #[test]
    fn r_u_minus_diagnostic() {
        for name in ["GL2", "SL3", "Sp4"] {
            let d = RootDatum::preset(name).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            for _ in 0..10 {
                let g = random_split_element(&d, &mut rng, 2, 16);
                if !d.is_dominant(g.mu()) {
                    continue;
                }
                let neg: Vec<usize> = (d.num_positive_roots()..d.num_roots()).collect();
                let r = r_n_valuation(&d, &g, &neg).unwrap();
                let dd = discriminant_valuation(&d, &g).unwrap();
                let other = Rational::new(dd, 2) + d.rho_pairing(g.mu());
                let gap = Rational::from_integer(dot(d.two_rho(), g.mu()));
                assert_eq!(other - Rational::from_integer(r), gap, "{name}");
            }
        }
    }

    #[test]
    fn gl2_discriminant_closed_form() {
        let gl2 = RootDatum::preset("GL2").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let g = random_split_element(&gl2, &mut rng, 2, 16);
            let (a, b) = (g.mu()[0], g.mu()[1]);
            let d = discriminant_valuation(&gl2, &g).unwrap();
            if a != b {
                assert_eq!(d, -(a - b).abs());
            } else {
                let diff = g.units()[0].sub(&g.units()[1]);
                assert_eq!(d, 2 * diff.valuation().unwrap().finite().unwrap());
            }
        }
    }

    #[test]
    fn weyl_invariance_and_positivity() {
        for name in PRESETS {
            let d = RootDatum::preset(name).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            for _ in 0..8 {
                let g = random_split_element(&d, &mut rng, 2, 16);
                let dd = discriminant_valuation(&d, &g).unwrap();
                for w in 0..d.weyl_order() {
                    let h = g.conjugate(&d, w).unwrap();
                    assert_eq!(discriminant_valuation(&d, &h).unwrap(), dd, "{name}");
                }
                for lambda in d.dominant_in_box(-2, 2) {
                    let q = query(&d, &g, &lambda);
                    if q.nonempty(&d) {
                        assert!(q.extended_discriminant(&d).unwrap() >= 0);
                        let dims: Vec<i64> = [Level::Spherical, Level::Iwahori]
                            .iter()
                            .flat_map(|&l| [Variant::Open, Variant::Closed].map(move |v| (l, v)))
                            .map(|(l, v)| FiberQuery::new(&d, q.gamma.clone(), lambda.clone(), l, v).unwrap())
                            .filter(|q| q.nonempty(&d))
                            .map(|q| q.dimension(&d).unwrap())
                            .collect();
                        assert!(dims.windows(2).all(|p| p[0] == p[1]));
                    }
                }
            }
        }
    }
}
