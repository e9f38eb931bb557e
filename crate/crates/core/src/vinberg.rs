//! Explicit Vinberg monoids of `SL_2` and `SL_3`.
//!
//! For `SL_2` the monoid is `M_2` with abelianization `det`. For `SL_3` a point is a
//! tuple `(x, y, A₁, A₂)` subject to `A₁ᵀA₂ = A₁A₂ᵀ = xy·1`, `Λ²A₁ = x·A₂`, `Λ²A₂ = y·A₁`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::intmat::{integer_kernel, solve_integer, IntMat};
use crate::invariants::SplitElement;
use crate::laurent::{char_eval, CoefficientField, LaurentSeries, Valuation};
use crate::loop_group::{LoopMatrix, MatrixGroup};
use crate::root_data::RootDatum;

#[derive(Clone, Debug, PartialEq)]
pub struct VinbergSL2Point {
    pub a: LoopMatrix,
}

impl VinbergSL2Point {
    /// Any 2×2 matrix, singular ones included.
    pub fn new(rows: Vec<Vec<LaurentSeries>>) -> Result<Self> {
        if rows.len() != 2 || rows.iter().any(|r| r.len() != 2) {
            return Err(Error::DimensionMismatch { expected: 4, got: rows.iter().map(Vec::len).sum() });
        }
        Ok(VinbergSL2Point { a: LoopMatrix::new_unchecked(2, rows.into_iter().flatten().collect(), MatrixGroup::GL)? })
    }

    pub fn from_matrix(a: LoopMatrix) -> Result<Self> {
        if a.n() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: a.n() });
        }
        Ok(VinbergSL2Point { a })
    }
}

/// `χ₊ = (det A, tr A)`.
pub fn sl2_chi_plus(p: &VinbergSL2Point) -> (LaurentSeries, LaurentSeries) {
    (p.a.det(), p.a.get(0, 0).add(p.a.get(1, 1)))
}

/// The companion matrix `[[0, −1], [a, c]]`, a section of `χ₊`.
pub fn sl2_steinberg_section(a: &LaurentSeries, c: &LaurentSeries) -> VinbergSL2Point {
    let f = a.field();
    let entries = vec![LaurentSeries::zero(f), LaurentSeries::one(f).neg(), a.clone(), c.clone()];
    VinbergSL2Point { a: LoopMatrix::new_unchecked(2, entries, MatrixGroup::GL).expect("2×2") }
}

/// `val(c² − 4a)`, the extended discriminant pulled back along `(det, tr)`.
pub fn sl2_ext_discriminant(a: &LaurentSeries, c: &LaurentSeries) -> Result<i64> {
    if a.field().characteristic() == 2 {
        return Err(Error::CharTwo);
    }
    let disc = c.mul(c).sub(&a.scale(&a.field().from_i64(4)));
    match disc.valuation()? {
        Valuation::Finite(v) => Ok(v),
        Valuation::Infinite => Err(Error::NotRegular("c² − 4a vanishes identically".into())),
    }
}

/// Membership of an `SL_2` monoid point in the restricted monoids of level `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Sl2Membership {
    /// Integral with `det ∈ tⁿ·O^×`.
    pub closure: bool,
    /// Additionally `A mod t ≠ 0`.
    pub open_locus: bool,
    /// `closure` and `A mod t` upper-triangular.
    pub iwahori_closure: bool,
    /// `iwahori_closure` and `A mod t ≠ 0`.
    pub iwahori_open: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sl2MembershipLabel {
    Outside,
    Closure,
    IwahoriClosure,
    OpenLocus,
    IwahoriOpen,
}

impl Sl2Membership {
    /// The most specific locus containing the point.
    pub fn label(&self) -> Sl2MembershipLabel {
        if self.iwahori_open {
            Sl2MembershipLabel::IwahoriOpen
        } else if self.open_locus {
            Sl2MembershipLabel::OpenLocus
        } else if self.iwahori_closure {
            Sl2MembershipLabel::IwahoriClosure
        } else if self.closure {
            Sl2MembershipLabel::Closure
        } else {
            Sl2MembershipLabel::Outside
        }
    }
}

pub fn sl2_monoid_membership(p: &VinbergSL2Point, n: i64) -> Result<Sl2Membership> {
    let outside = Sl2Membership { closure: false, open_locus: false, iwahori_closure: false, iwahori_open: false };
    if !p.a.is_integral()? {
        return Ok(outside);
    }
    let det = p.a.det();
    if det.is_known_zero() && det.precision().is_none_or(|q| q > n) {
        return Ok(outside);
    }
    if det.finite_valuation()? != n {
        return Ok(outside);
    }
    let r = p.a.residue()?;
    let nonzero = r.iter().flatten().any(|x| !x.is_zero());
    let upper = r[1][0].is_zero();
    Ok(Sl2Membership { closure: true, open_locus: nonzero, iwahori_closure: upper, iwahori_open: upper && nonzero })
}

#[derive(Clone, Debug, PartialEq)]
pub struct VinbergSL3Point {
    pub x: LaurentSeries,
    pub y: LaurentSeries,
    pub a1: LoopMatrix,
    pub a2: LoopMatrix,
}

/// All four defining relations hold up to precision.
pub fn sl3_vinberg_check(p: &VinbergSL3Point) -> Result<bool> {
    if p.a1.n() != 3 || p.a2.n() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, got: p.a1.n().max(p.a2.n()) });
    }
    let f = p.x.field();
    let xy = LoopMatrix::identity(3, f, MatrixGroup::GL).scale(&p.x.mul(&p.y));
    let relations = [
        p.a1.transpose().mul(&p.a2).sub(&xy),
        p.a1.mul(&p.a2.transpose()).sub(&xy),
        p.a1.cofactor().sub(&p.a2.scale(&p.x)),
        p.a2.cofactor().sub(&p.a1.scale(&p.y)),
    ];
    Ok(relations.iter().all(LoopMatrix::is_known_zero))
}

/// `(t₁t₂⁻¹, t₁t₂², t₁·g, t₁t₂·(g⁻¹)ᵀ)`.
pub fn sl3_embed(t1: &LaurentSeries, t2: &LaurentSeries, g: &LoopMatrix, working: i64) -> Result<VinbergSL3Point> {
    if g.n() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, got: g.n() });
    }
    let det = g.det();
    if !det.sub(&LaurentSeries::one(det.field())).is_known_zero() {
        return Err(Error::NotUnimodular(format!("determinant {det}")));
    }
    let t2inv = t2.inverse(working)?;
    let t1t2 = t1.mul(t2);
    Ok(VinbergSL3Point {
        x: t1.mul(&t2inv),
        y: t1t2.mul(t2),
        a1: g.scale(t1),
        a2: g.inverse(working)?.transpose().scale(&t1t2),
    })
}

/// An element of `T_ad(F)` in simple-root coordinates: the `i`-th entry is `α_i(γ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdjointTorusElement {
    pub mu: Vec<i64>,
    pub units: Vec<LaurentSeries>,
}

impl AdjointTorusElement {
    pub fn new(datum: &RootDatum, mu: Vec<i64>, units: Vec<LaurentSeries>) -> Result<Self> {
        let r = datum.rank();
        if mu.len() != r || units.len() != r {
            return Err(Error::DimensionMismatch { expected: r, got: mu.len().max(units.len()) });
        }
        for u in &units {
            if u.valuation()? != Valuation::Finite(0) {
                return Err(Error::NonUnitEntry(u.to_string()));
            }
        }
        Ok(AdjointTorusElement { mu, units })
    }

    /// Image of a split element of `T(F)`.
    pub fn from_split(datum: &RootDatum, g: &SplitElement) -> Result<Self> {
        let mu = adjoint_coweight(datum, g.mu());
        let units = datum
            .simple_roots()
            .iter()
            .map(|a| char_eval(datum, a, g.units(), g.working_precision()))
            .collect::<Result<Vec<_>>>()?;
        Ok(AdjointTorusElement { mu, units })
    }

    pub fn coords(&self) -> Vec<LaurentSeries> {
        self.mu.iter().zip(&self.units).map(|(&k, u)| u.shift(k)).collect()
    }
}

/// `λ ↦ (⟨α_i, λ⟩)_i`, identifying `X_*(T_ad)` with `ℤ^r`.
pub fn adjoint_coweight(datum: &RootDatum, lambda: &[i64]) -> Vec<i64> {
    datum.simple_roots().iter().map(|a| datum.pairing(a, lambda)).collect()
}

/// Coordinates of `−w₀(λ_ad)`: the opposition involution permutes the simple roots.
pub fn opposition(datum: &RootDatum, lambda_ad: &[i64]) -> Vec<i64> {
    let w0 = datum.longest_element();
    datum
        .simple_roots()
        .iter()
        .map(|a| {
            let b = datum.root_index(a).expect("simple root");
            let image = datum.root(datum.negate_root(datum.act_root(w0, b)));
            let j = datum.simple_roots().iter().position(|s| s.as_slice() == image).expect("simple root");
            lambda_ad[j]
        })
        .collect()
}

/// Whether `v ∈ ℤ^r` lies in the image of `X_*(T)`.
fn in_coweight_image(datum: &RootDatum, v: &[i64]) -> bool {
    let m = datum.weight_lattice_rank();
    let basis = if datum.coweight_constraints().is_empty() {
        IntMat::identity(m)
    } else {
        integer_kernel(&IntMat::from_rows(datum.coweight_constraints()))
    };
    let images: Vec<Vec<i64>> = (0..basis.cols()).map(|j| adjoint_coweight(datum, &basis.column(j))).collect();
    if images.is_empty() {
        return v.iter().all(|&x| x == 0);
    }
    solve_integer(&IntMat::from_columns(datum.rank(), &images), v).is_some()
}

/// A point of `T₊(F)` in `X_*(T₊) ⊂ X_*(T_ad) × X_*(T_ad)` coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct TPlusElement {
    /// Abelianization coweight, `−w₀(λ_ad)`.
    pub abelianization: Vec<i64>,
    /// Image in `T_ad(F)`.
    pub adjoint: AdjointTorusElement,
}

/// The lift `γ_λ ∈ T₊(F)` with adjoint image `γ_ad` and abelianization `t^{−w₀(λ_ad)}`,
/// normalized by a trivial central component.
pub fn gamma_lambda_lift(datum: &RootDatum, gamma_ad: &AdjointTorusElement, lambda_ad: &[i64]) -> Result<TPlusElement> {
    let r = datum.rank();
    if lambda_ad.len() != r {
        return Err(Error::DimensionMismatch { expected: r, got: lambda_ad.len() });
    }
    if lambda_ad.iter().any(|&x| x < 0) {
        return Err(Error::NotDominant(format!("{lambda_ad:?}")));
    }
    let first = opposition(datum, lambda_ad);
    let sum: Vec<i64> = first.iter().zip(&gamma_ad.mu).map(|(a, b)| a + b).collect();
    if !in_coweight_image(datum, &sum) {
        return Err(Error::KottwitzMismatch(format!(
            "({first:?}, {:?}) does not lie in the coweight lattice of T₊",
            gamma_ad.mu
        )));
    }
    Ok(TPlusElement { abelianization: first, adjoint: gamma_ad.clone() })
}

/// `γ_λ` for `SL_2` as a diagonal monoid point: `t^{λ₀}·γ`, so `det = t^{⟨α,λ⟩}` and the
/// adjoint image is that of `γ`.
pub fn sl2_gamma_lambda(datum: &RootDatum, gamma: &SplitElement, lambda: &[i64]) -> Result<VinbergSL2Point> {
    if datum.name() != "SL2" {
        return Err(Error::UnsupportedType(datum.name().to_string()));
    }
    datum.require_dominant(lambda)?;
    gamma_lambda_lift(datum, &AdjointTorusElement::from_split(datum, gamma)?, &adjoint_coweight(datum, lambda))?;
    let coords = gamma.coords();
    let rows = vec![
        vec![coords[0].shift(lambda[0]), LaurentSeries::zero(gamma.field())],
        vec![LaurentSeries::zero(gamma.field()), coords[1].shift(lambda[0])],
    ];
    VinbergSL2Point::new(rows)
}

/// Jet-level points for tests and censuses: a matrix over `F_q[t]` with entries of degree `< n`.
pub fn sl2_point_from_jets(field: CoefficientField, jets: &[Vec<i64>; 4]) -> VinbergSL2Point {
    let rows = vec![
        vec![LaurentSeries::from_i64s(field, 0, &jets[0], None), LaurentSeries::from_i64s(field, 0, &jets[1], None)],
        vec![LaurentSeries::from_i64s(field, 0, &jets[2], None), LaurentSeries::from_i64s(field, 0, &jets[3], None)],
    ];
    VinbergSL2Point::new(rows).expect("2×2")
}
