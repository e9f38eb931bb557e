//! Truncated Laurent series `Σ c_k t^k + O(t^N)` over `ℚ` or `𝔽_p`.
//!
//! A series either is exact (a Laurent polynomial, `precision == None`) or is known
//! modulo `t^N`. Arithmetic propagates the precision with the usual interval rules, so
//! a result never claims more than its inputs determine.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::root_data::RootDatum;

pub const DEFAULT_PRECISION: i64 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoefficientField {
    Rationals,
    PrimeField(u64),
}

impl CoefficientField {
    pub fn prime(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(CoefficientField::PrimeField(p))
        } else {
            Err(Error::UnsupportedCharacteristic(format!("{p} is not prime")))
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            CoefficientField::Rationals => 0,
            CoefficientField::PrimeField(p) => *p,
        }
    }

    /// Rejects a characteristic dividing `|W|`.
    pub fn check_against(&self, datum: &RootDatum) -> Result<()> {
        let p = self.characteristic();
        if p != 0 && datum.weyl_order() as u64 % p == 0 {
            return Err(Error::CharDividesWeylOrder { p, order: datum.weyl_order() });
        }
        Ok(())
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, x: i64) -> Scalar {
        match self {
            CoefficientField::Rationals => Scalar::Q(BigRational::from_integer(BigInt::from(x))),
            CoefficientField::PrimeField(p) => Scalar::F { v: x.rem_euclid(*p as i64) as u64, p: *p },
        }
    }

    pub fn from_rational(&self, r: &BigRational) -> Result<Scalar> {
        match self {
            CoefficientField::Rationals => Ok(Scalar::Q(r.clone())),
            CoefficientField::PrimeField(p) => {
                let pb = BigInt::from(*p);
                let num = ((r.numer() % &pb) + &pb) % &pb;
                let den = ((r.denom() % &pb) + &pb) % &pb;
                let den = den.to_u64().unwrap_or(0);
                if den == 0 {
                    return Err(Error::Parse(format!("denominator of {r} vanishes mod {p}")));
                }
                let n = Scalar::F { v: num.to_u64().unwrap_or(0), p: *p };
                Ok(n.mul(&Scalar::F { v: den, p: *p }.inv()?))
            }
        }
    }
}

impl fmt::Display for CoefficientField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientField::Rationals => write!(f, "Q"),
            CoefficientField::PrimeField(p) => write!(f, "GF({p})"),
        }
    }
}

impl FromStr for CoefficientField {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "Q" || s == "QQ" {
            return Ok(CoefficientField::Rationals);
        }
        let inner = s
            .strip_prefix("GF(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| s.strip_prefix('F'))
            .ok_or_else(|| Error::Parse(format!("unknown coefficient field `{s}`")))?;
        let p: u64 = inner.parse().map_err(|_| Error::Parse(format!("bad characteristic `{inner}`")))?;
        CoefficientField::prime(p)
    }
}

impl Serialize for CoefficientField {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for CoefficientField {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= p {
        if p % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

/// A field element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Q(BigRational),
    F { v: u64, p: u64 },
}

impl Scalar {
    pub fn field(&self) -> CoefficientField {
        match self {
            Scalar::Q(_) => CoefficientField::Rationals,
            Scalar::F { p, .. } => CoefficientField::PrimeField(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(x) => x.is_zero(),
            Scalar::F { v, .. } => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Q(x) => x.is_one(),
            Scalar::F { v, .. } => *v == 1,
        }
    }

    pub fn add(&self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a + b),
            (Scalar::F { v: a, p }, Scalar::F { v: b, p: q }) if p == q => Scalar::F { v: (a + b) % p, p: *p },
            _ => panic!("{}", Error::FieldMismatch),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Q(a) => Scalar::Q(-a),
            Scalar::F { v, p } => Scalar::F { v: (p - v) % p, p: *p },
        }
    }

    pub fn sub(&self, o: &Scalar) -> Scalar {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a * b),
            (Scalar::F { v: a, p }, Scalar::F { v: b, p: q }) if p == q => {
                Scalar::F { v: ((*a as u128 * *b as u128) % *p as u128) as u64, p: *p }
            }
            _ => panic!("{}", Error::FieldMismatch),
        }
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::NotInvertible("zero scalar".into()));
        }
        Ok(match self {
            Scalar::Q(a) => Scalar::Q(a.recip()),
            Scalar::F { v, p } => Scalar::F { v: pow_mod(*v, p - 2, *p), p: *p },
        })
    }

    /// Sign used when printing: `true` when the coefficient prints with a minus sign.
    fn is_negative(&self) -> bool {
        matches!(self, Scalar::Q(a) if a.is_negative())
    }

    fn abs(&self) -> Scalar {
        match self {
            Scalar::Q(a) => Scalar::Q(a.abs()),
            other => other.clone(),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(a) => {
                if a.is_integer() {
                    write!(f, "{}", a.numer())
                } else {
                    write!(f, "{}/{}", a.numer(), a.denom())
                }
            }
            Scalar::F { v, .. } => write!(f, "{v}"),
        }
    }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u128;
    let mut bb = b as u128 % p as u128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * bb % p as u128;
        }
        bb = bb * bb % p as u128;
        e >>= 1;
    }
    b = r as u64;
    b
}

/// `t`-adic valuation; the exact zero has valuation `+∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
            (Valuation::Finite(_), Valuation::Infinite) => Ordering::Less,
            (Valuation::Infinite, Valuation::Finite(_)) => Ordering::Greater,
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "+inf"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => s.serialize_i64(*v),
            Valuation::Infinite => s.serialize_str("+inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentSeries {
    field: CoefficientField,
    lowest: i64,
    coeffs: Vec<Scalar>,
    precision: Option<i64>,
}

fn min_prec(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl LaurentSeries {
    /// Builds `Σ coeffs[i] t^(lowest+i) + O(t^precision)` and normalizes it.
    pub fn new(field: CoefficientField, lowest: i64, coeffs: Vec<Scalar>, precision: Option<i64>) -> Self {
        let mut s = LaurentSeries { field, lowest, coeffs, precision };
        s.normalize();
        s
    }

    pub fn from_i64s(field: CoefficientField, lowest: i64, coeffs: &[i64], precision: Option<i64>) -> Self {
        Self::new(field, lowest, coeffs.iter().map(|&c| field.from_i64(c)).collect(), precision)
    }

    fn normalize(&mut self) {
        if let Some(p) = self.precision {
            let keep = (p - self.lowest).max(0) as usize;
            if self.coeffs.len() > keep {
                self.coeffs.truncate(keep);
            }
        }
        while self.coeffs.last().is_some_and(Scalar::is_zero) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.lowest += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.lowest = self.precision.unwrap_or(0);
        }
    }

    pub fn zero(field: CoefficientField) -> Self {
        Self::new(field, 0, vec![], None)
    }

    pub fn one(field: CoefficientField) -> Self {
        Self::constant(field, field.one())
    }

    pub fn constant(field: CoefficientField, c: Scalar) -> Self {
        Self::new(field, 0, vec![c], None)
    }

    pub fn from_int(field: CoefficientField, c: i64) -> Self {
        Self::constant(field, field.from_i64(c))
    }

    /// Exact monomial `t^k`.
    pub fn t_pow(field: CoefficientField, k: i64) -> Self {
        Self::new(field, k, vec![field.one()], None)
    }

    /// `O(t^k)`: zero known only modulo `t^k`.
    pub fn big_o(field: CoefficientField, k: i64) -> Self {
        Self::new(field, k, vec![], Some(k))
    }

    pub fn field(&self) -> CoefficientField {
        self.field
    }

    pub fn lowest(&self) -> i64 {
        self.lowest
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn precision(&self) -> Option<i64> {
        self.precision
    }

    pub fn is_exact(&self) -> bool {
        self.precision.is_none()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.precision.is_none() && self.coeffs.is_empty()
    }

    /// No nonzero coefficient below the precision (includes the exact zero).
    pub fn is_known_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Exponent of the first possibly-nonzero term: the valuation, or the precision for an
    /// inexact zero.
    fn order(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            self.precision
        } else {
            Some(self.lowest)
        }
    }

    pub fn valuation(&self) -> Result<Valuation> {
        if !self.coeffs.is_empty() {
            return Ok(Valuation::Finite(self.lowest));
        }
        match self.precision {
            None => Ok(Valuation::Infinite),
            Some(p) => Err(Error::InsufficientPrecision(format!(
                "series vanishes to its precision O(t^{p})"
            ))),
        }
    }

    /// Finite valuation; `NotInvertible` for the exact zero.
    pub fn finite_valuation(&self) -> Result<i64> {
        match self.valuation()? {
            Valuation::Finite(v) => Ok(v),
            Valuation::Infinite => Err(Error::NotInvertible("exact zero".into())),
        }
    }

    pub fn coefficient(&self, k: i64) -> Result<Scalar> {
        if let Some(p) = self.precision {
            if k >= p {
                return Err(Error::InsufficientPrecision(format!(
                    "coefficient of t^{k} requested from a series known modulo t^{p}"
                )));
            }
        }
        let idx = k - self.lowest;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            Ok(self.field.zero())
        } else {
            Ok(self.coeffs[idx as usize].clone())
        }
    }

    pub fn leading_coefficient(&self) -> Option<&Scalar> {
        self.coeffs.first()
    }

    /// Coefficient list indexed `[from, to)`.
    pub fn window(&self, from: i64, to: i64) -> Result<Vec<Scalar>> {
        (from..to).map(|k| self.coefficient(k)).collect()
    }

    pub fn truncate(&self, precision: i64) -> Self {
        Self::new(self.field, self.lowest, self.coeffs.clone(), min_prec(self.precision, Some(precision)))
    }

    /// Forgets precision: the stored Laurent polynomial as an exact element.
    pub fn to_exact(&self) -> Self {
        Self::new(self.field, self.lowest, self.coeffs.clone(), None)
    }

    pub fn with_precision_if_exact(&self, precision: i64) -> Self {
        if self.is_exact() {
            self.truncate(precision)
        } else {
            self.clone()
        }
    }

    fn check_field(&self, o: &Self) {
        if self.field != o.field {
            panic!("{}", Error::FieldMismatch);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check_field(o);
        let precision = min_prec(self.precision, o.precision);
        if self.coeffs.is_empty() {
            return Self::new(o.field, o.lowest, o.coeffs.clone(), precision);
        }
        if o.coeffs.is_empty() {
            return Self::new(self.field, self.lowest, self.coeffs.clone(), precision);
        }
        let lo = self.lowest.min(o.lowest);
        let hi_a = self.lowest + self.coeffs.len() as i64;
        let hi_b = o.lowest + o.coeffs.len() as i64;
        let mut hi = hi_a.max(hi_b);
        if let Some(p) = precision {
            hi = hi.min(p.max(lo));
        }
        let mut out = Vec::with_capacity((hi - lo).max(0) as usize);
        for k in lo..hi {
            let a = self.raw(k);
            let b = o.raw(k);
            out.push(match (a, b) {
                (Some(x), Some(y)) => x.add(y),
                (Some(x), None) => x.clone(),
                (None, Some(y)) => y.clone(),
                (None, None) => self.field.zero(),
            });
        }
        Self::new(self.field, lo, out, precision)
    }

    fn raw(&self, k: i64) -> Option<&Scalar> {
        let i = k - self.lowest;
        if i < 0 {
            None
        } else {
            self.coeffs.get(i as usize)
        }
    }

    pub fn neg(&self) -> Self {
        Self::new(self.field, self.lowest, self.coeffs.iter().map(Scalar::neg).collect(), self.precision)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero(self.field);
        }
        Self::new(self.field, self.lowest, self.coeffs.iter().map(|x| x.mul(c)).collect(), self.precision)
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self::new(self.field, self.lowest + k, self.coeffs.clone(), self.precision.map(|p| p + k))
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.check_field(o);
        if self.is_exact_zero() || o.is_exact_zero() {
            return Self::zero(self.field);
        }
        let va = self.order().expect("nonzero operand has an order");
        let vb = o.order().expect("nonzero operand has an order");
        let precision = match (self.precision, o.precision) {
            (None, None) => None,
            (Some(pa), None) => Some(pa + vb),
            (None, Some(pb)) => Some(pb + va),
            (Some(pa), Some(pb)) => Some((pa + vb).min(pb + va)),
        };
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return Self::new(self.field, 0, vec![], precision);
        }
        let lowest = self.lowest + o.lowest;
        let mut len = self.coeffs.len() + o.coeffs.len() - 1;
        if let Some(p) = precision {
            len = len.min((p - lowest).max(0) as usize);
        }
        let mut out = vec![self.field.zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= len || a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Self::new(self.field, lowest, out, precision)
    }

    /// Multiplicative inverse. An exact non-monomial input is expanded to `working`
    /// coefficients beyond its valuation; inexact inputs keep their relative precision.
    pub fn inverse(&self, working: i64) -> Result<Self> {
        if self.is_exact_zero() {
            return Err(Error::NotInvertible("exact zero".into()));
        }
        let v = self.finite_valuation()?;
        let rel = match self.precision {
            Some(p) => p - v,
            None if self.coeffs.len() == 1 => {
                let c = self.coeffs[0].inv()?;
                return Ok(Self::new(self.field, -v, vec![c], None));
            }
            None => working.max(1),
        };
        let n = rel as usize;
        let a0inv = self.coeffs[0].inv()?;
        let mut b: Vec<Scalar> = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = if k == 0 { self.field.one() } else { self.field.zero() };
            for j in 1..=k.min(self.coeffs.len().saturating_sub(1)) {
                acc = acc.sub(&self.coeffs[j].mul(&b[k - j]));
            }
            b.push(acc.mul(&a0inv));
        }
        Ok(Self::new(self.field, -v, b, Some(-v + rel)))
    }

    pub fn div(&self, o: &Self, working: i64) -> Result<Self> {
        Ok(self.mul(&o.inverse(working)?))
    }

    pub fn pow(&self, e: i64, working: i64) -> Result<Self> {
        let base = if e < 0 { self.inverse(working)? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut result = Self::one(self.field);
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        Ok(result)
    }

    /// `t^{-v} s`, the unit part of a series of valuation `v`.
    pub fn unit_part(&self) -> Result<Self> {
        let v = self.finite_valuation()?;
        Ok(self.shift(-v))
    }

    /// Reduction modulo `t` of an integral series.
    pub fn residue(&self) -> Result<Scalar> {
        self.coefficient(0)
    }

    pub fn parse(s: &str, field: CoefficientField, default_precision: Option<i64>) -> Result<Self> {
        parse_series(s, field, default_precision)
    }

    /// Evaluates a Laurent polynomial over `𝔽_p` truncated below `n` as a jet vector.
    pub fn jet(&self, n: i64) -> Result<Vec<Scalar>> {
        self.window(0, n)
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<(bool, String)> = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let k = self.lowest + i as i64;
            let neg = c.is_negative();
            let a = c.abs();
            let body = if k == 0 {
                a.to_string()
            } else {
                let tk = match k {
                    1 => "t".to_string(),
                    k if k < 0 => format!("t^{{{k}}}"),
                    k => format!("t^{k}"),
                };
                if a.is_one() {
                    tk
                } else {
                    format!("{a}*{tk}")
                }
            };
            terms.push((neg, body));
        }
        if let Some(p) = self.precision {
            let o = match p {
                0 => "O(1)".to_string(),
                1 => "O(t)".to_string(),
                p if p < 0 => format!("O(t^{{{p}}})"),
                p => format!("O(t^{p})"),
            };
            terms.push((false, o));
        }
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (neg, body)) in terms.iter().enumerate() {
            match (i, neg) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

fn parse_int(s: &str) -> Result<i64> {
    let s = s.trim();
    let s = s.strip_prefix('{').and_then(|x| x.strip_suffix('}')).unwrap_or(s);
    s.trim().parse().map_err(|_| Error::Parse(format!("bad exponent `{s}`")))
}

fn parse_coefficient(s: &str, field: CoefficientField) -> Result<Scalar> {
    let s = s.trim();
    let s = s.strip_prefix('(').and_then(|x| x.strip_suffix(')')).unwrap_or(s);
    let r = if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| Error::Parse(format!("bad coefficient `{s}`")))?;
        let d: BigInt = d.trim().parse().map_err(|_| Error::Parse(format!("bad coefficient `{s}`")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        BigRational::new(n, d)
    } else {
        let n: BigInt = s.parse().map_err(|_| Error::Parse(format!("bad coefficient `{s}`")))?;
        BigRational::from_integer(n)
    };
    field.from_rational(&r)
}

/// Exponent of `t`, `t^k` or `t^{k}`; `1` for a bare constant.
fn parse_power(s: &str) -> Result<i64> {
    let s = s.trim();
    if s == "1" {
        return Ok(0);
    }
    let rest = s.strip_prefix('t').ok_or_else(|| Error::Parse(format!("expected a power of t, got `{s}`")))?;
    if rest.trim().is_empty() {
        return Ok(1);
    }
    let e = rest.trim().strip_prefix('^').ok_or_else(|| Error::Parse(format!("bad power `{s}`")))?;
    parse_int(e)
}

fn parse_series(input: &str, field: CoefficientField, default_precision: Option<i64>) -> Result<LaurentSeries> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty series".into()));
    }
    // split into signed terms at top-level + and - that are not exponent signs
    let bytes = s.as_bytes();
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut depth = 0i32;
    let mut start = 0usize;
    let mut neg = false;
    for i in 0..bytes.len() {
        let c = bytes[i] as char;
        match c {
            '(' | '{' => depth += 1,
            ')' | '}' => depth -= 1,
            '+' | '-' if depth == 0 => {
                let prev = if i == 0 { None } else { Some(bytes[i - 1] as char) };
                if matches!(prev, Some('^') | Some('/') | Some('*')) {
                    continue;
                }
                if i > start {
                    terms.push((neg, s[start..i].to_string()));
                } else if i != 0 {
                    return Err(Error::Parse(format!("dangling sign in `{input}`")));
                }
                neg = c == '-';
                start = i + 1;
            }
            _ => {}
        }
    }
    if start >= s.len() {
        return Err(Error::Parse(format!("dangling sign in `{input}`")));
    }
    terms.push((neg, s[start..].to_string()));

    let mut precision: Option<i64> = None;
    let mut acc: Vec<(i64, Scalar)> = Vec::new();
    for (neg, term) in terms {
        if let Some(inner) = term.strip_prefix("O(").and_then(|x| x.strip_suffix(')')) {
            if neg {
                return Err(Error::Parse("negative O-term".into()));
            }
            let p = parse_power(inner)?;
            precision = Some(precision.map_or(p, |q| q.min(p)));
            continue;
        }
        let (coef, exp) = match term.find('t') {
            Some(pos) => {
                let c = term[..pos].trim_end_matches('*');
                let c = if c.is_empty() { field.one() } else { parse_coefficient(c, field)? };
                (c, parse_power(&term[pos..])?)
            }
            None => (parse_coefficient(&term, field)?, 0),
        };
        acc.push((exp, if neg { coef.neg() } else { coef }));
    }
    let precision = precision.or(default_precision);
    if acc.is_empty() {
        return Ok(LaurentSeries::new(field, 0, vec![], precision));
    }
    let lo = acc.iter().map(|x| x.0).min().unwrap();
    let hi = acc.iter().map(|x| x.0).max().unwrap();
    let mut coeffs = vec![field.zero(); (hi - lo + 1) as usize];
    for (e, c) in acc {
        let i = (e - lo) as usize;
        coeffs[i] = coeffs[i].add(&c);
    }
    Ok(LaurentSeries::new(field, lo, coeffs, precision))
}

/// JSON form `{lowest, coeffs, precision, field}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LaurentDoc {
    pub lowest: i64,
    pub coeffs: Vec<String>,
    pub precision: Option<i64>,
    pub field: CoefficientField,
}

impl From<&LaurentSeries> for LaurentDoc {
    fn from(s: &LaurentSeries) -> Self {
        LaurentDoc {
            lowest: s.lowest,
            coeffs: s.coeffs.iter().map(Scalar::to_string).collect(),
            precision: s.precision,
            field: s.field,
        }
    }
}

impl TryFrom<&LaurentDoc> for LaurentSeries {
    type Error = Error;
    fn try_from(d: &LaurentDoc) -> Result<Self> {
        let coeffs = d.coeffs.iter().map(|c| parse_coefficient(c, d.field)).collect::<Result<_>>()?;
        Ok(LaurentSeries::new(d.field, d.lowest, coeffs, d.precision))
    }
}

impl Serialize for LaurentSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LaurentDoc::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = LaurentDoc::deserialize(d)?;
        LaurentSeries::try_from(&doc).map_err(serde::de::Error::custom)
    }
}

/// `χ(x) = ∏ x_i^{χ_i}` for a torus element given by its coordinates.
pub fn char_eval(datum: &RootDatum, chi: &[i64], torus: &[LaurentSeries], working: i64) -> Result<LaurentSeries> {
    let m = datum.weight_lattice_rank();
    if chi.len() != m {
        return Err(Error::DimensionMismatch { expected: m, got: chi.len() });
    }
    if torus.len() != m {
        return Err(Error::DimensionMismatch { expected: m, got: torus.len() });
    }
    let field = torus[0].field();
    let mut acc = LaurentSeries::one(field);
    for (x, &e) in torus.iter().zip(chi) {
        if x.is_known_zero() {
            return Err(Error::NonUnitEntry(x.to_string()));
        }
        if e != 0 {
            acc = acc.mul(&x.pow(e, working)?);
        }
    }
    Ok(acc)
}
