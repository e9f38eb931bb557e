//! The extended affine Weyl group `W̃ = X_*(T) ⋊ W`.
//!
//! Elements are written `t^μ w`, with `(t^μ₁ w₁)(t^μ₂ w₂) = t^{μ₁ + w₁μ₂} w₁w₂`.
//! The base alcove is the one attached to the Iwahori subgroup that reduces to the
//! upper-triangular Borel modulo `t`. With that choice
//!
//! `ℓ(t^μ w) = Σ_{α>0} |⟨α, μ⟩ + [w⁻¹α < 0]|`,
//!
//! the affine simple reflection of a component with highest root `θ` is
//! `s₀ = t^{-θ^∨} s_θ`, and for `GL_2` the element `t^{(0,1)} s` has length zero.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::intmat::dot;
use crate::root_data::{Pi1Class, RootDatum, WeylId};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineWeylElement {
    pub translation: Vec<i64>,
    pub finite: WeylId,
}

/// Serializable description of an element.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ElementDoc {
    pub text: String,
    pub translation: Vec<i64>,
    pub finite_word: Vec<usize>,
    pub length: usize,
    pub omega_class: Pi1Class,
}

/// Extended affine Weyl group of a root datum.
#[derive(Clone, Debug)]
pub struct AffineWeylGroup<'d> {
    datum: &'d RootDatum,
    simple: Vec<AffineWeylElement>,
}

impl<'d> AffineWeylGroup<'d> {
    pub fn new(datum: &'d RootDatum) -> Self {
        let r = datum.rank();
        let comps = datum.components();
        let affine_node = |c: usize| {
            let theta = datum.highest_roots()[c];
            AffineWeylElement {
                translation: datum.coroot(theta).iter().map(|x| -x).collect(),
                finite: datum.reflection(theta),
            }
        };
        let mut simple = Vec::with_capacity(r + comps.len());
        simple.push(affine_node(0));
        for i in 0..r {
            simple.push(AffineWeylElement {
                translation: vec![0; datum.weight_lattice_rank()],
                finite: datum.simple_reflection(i),
            });
        }
        for c in 1..comps.len() {
            simple.push(affine_node(c));
        }
        AffineWeylGroup { datum, simple }
    }

    pub fn datum(&self) -> &'d RootDatum {
        self.datum
    }

    /// Number of affine simple reflections (`s₀, s₁, …`).
    pub fn num_simple(&self) -> usize {
        self.simple.len()
    }

    pub fn simple(&self, i: usize) -> &AffineWeylElement {
        &self.simple[i]
    }

    /// Whether index `i` is an affine node rather than a finite simple reflection.
    pub fn is_affine_node(&self, i: usize) -> bool {
        i == 0 || i > self.datum.rank()
    }

    pub fn identity(&self) -> AffineWeylElement {
        AffineWeylElement { translation: vec![0; self.datum.weight_lattice_rank()], finite: self.datum.identity() }
    }

    pub fn translation(&self, mu: &[i64]) -> AffineWeylElement {
        AffineWeylElement { translation: mu.to_vec(), finite: self.datum.identity() }
    }

    pub fn finite(&self, w: WeylId) -> AffineWeylElement {
        AffineWeylElement { translation: vec![0; self.datum.weight_lattice_rank()], finite: w }
    }

    pub fn mul(&self, x: &AffineWeylElement, y: &AffineWeylElement) -> AffineWeylElement {
        let moved = self.datum.act_coweight(x.finite, &y.translation);
        AffineWeylElement {
            translation: x.translation.iter().zip(&moved).map(|(a, b)| a + b).collect(),
            finite: self.datum.mul(x.finite, y.finite),
        }
    }

    pub fn inverse(&self, x: &AffineWeylElement) -> AffineWeylElement {
        let winv = self.datum.inverse(x.finite);
        AffineWeylElement {
            translation: self.datum.act_coweight(winv, &x.translation).iter().map(|v| -v).collect(),
            finite: winv,
        }
    }

    pub fn product(&self, factors: &[AffineWeylElement]) -> AffineWeylElement {
        factors.iter().fold(self.identity(), |acc, f| self.mul(&acc, f))
    }

    pub fn from_word(&self, omega: &AffineWeylElement, word: &[usize]) -> AffineWeylElement {
        word.iter().fold(omega.clone(), |acc, &i| self.mul(&acc, &self.simple[i]))
    }

    pub fn length(&self, x: &AffineWeylElement) -> usize {
        let d = self.datum;
        let winv = d.inverse(x.finite);
        let mut total: i64 = 0;
        for a in 0..d.num_positive_roots() {
            let k = dot(d.root(a), &x.translation);
            let flip = i64::from(!d.is_positive_root(d.act_root(winv, a)));
            total += (k + flip).abs();
        }
        total as usize
    }

    pub fn omega_class(&self, x: &AffineWeylElement) -> Pi1Class {
        self.datum.pi1_class(&x.translation)
    }

    /// Returns `(ω, [i₁, …, i_k])` with `x = ω s_{i₁} ⋯ s_{i_k}`, `ℓ(ω) = 0`, `k = ℓ(x)`.
    pub fn reduced_word(&self, x: &AffineWeylElement) -> (AffineWeylElement, Vec<usize>) {
        let mut cur = x.clone();
        let mut len = self.length(&cur);
        let mut rev = Vec::with_capacity(len);
        while len > 0 {
            let (i, next) = (0..self.simple.len())
                .map(|i| (i, self.mul(&cur, &self.simple[i])))
                .find(|(_, y)| self.length(y) < len)
                .expect("an element of positive length has a right descent");
            rev.push(i);
            cur = next;
            len -= 1;
        }
        rev.reverse();
        (cur, rev)
    }

    pub fn left_descent(&self, y: &AffineWeylElement) -> Option<(usize, AffineWeylElement)> {
        let ly = self.length(y);
        (0..self.simple.len())
            .map(|i| (i, self.mul(&self.simple[i], y)))
            .find(|(_, sy)| self.length(sy) < ly)
    }

    /// Bruhat order; elements in different `Ω`-classes are incomparable.
    pub fn bruhat_leq(&self, x: &AffineWeylElement, y: &AffineWeylElement) -> bool {
        if self.omega_class(x) != self.omega_class(y) {
            return false;
        }
        let mut x = x.clone();
        let mut y = y.clone();
        loop {
            let lx = self.length(&x);
            let ly = self.length(&y);
            if lx > ly {
                return false;
            }
            if ly == 0 {
                return x == y;
            }
            if lx == ly {
                return x == y;
            }
            let (i, sy) = self.left_descent(&y).expect("positive length");
            let sx = self.mul(&self.simple[i], &x);
            if self.length(&sx) < lx {
                x = sx;
            }
            y = sy;
        }
    }

    /// All elements `ω·(subword of word)`.
    pub fn subword_closure(&self, omega: &AffineWeylElement, word: &[usize]) -> HashSet<AffineWeylElement> {
        let mut set: HashSet<AffineWeylElement> = HashSet::new();
        set.insert(omega.clone());
        for &i in word {
            let extra: Vec<AffineWeylElement> = set.iter().map(|x| self.mul(x, &self.simple[i])).collect();
            set.extend(extra);
        }
        set
    }

    pub fn lower_ideal(&self, y: &AffineWeylElement) -> HashSet<AffineWeylElement> {
        let (omega, word) = self.reduced_word(y);
        self.subword_closure(&omega, &word)
    }

    /// Canonical ordering: by length, then translation, then finite part.
    pub fn sort_canonical(&self, xs: &mut [AffineWeylElement]) {
        xs.sort_by_cached_key(|x| (self.length(x), x.translation.clone(), x.finite));
    }

    pub fn adm_maximal(&self, lambda: &[i64]) -> Result<Vec<AffineWeylElement>> {
        self.datum.require_dominant(lambda)?;
        let mut out: Vec<AffineWeylElement> =
            self.datum.weyl_orbit(lambda).into_iter().map(|mu| self.translation(&mu)).collect();
        self.sort_canonical(&mut out);
        Ok(out)
    }

    pub fn admissible_set(&self, lambda: &[i64]) -> Result<Vec<AffineWeylElement>> {
        let maximal = self.adm_maximal(lambda)?;
        let mut all: HashSet<AffineWeylElement> = HashSet::new();
        for y in &maximal {
            all.extend(self.lower_ideal(y));
        }
        let mut out: Vec<AffineWeylElement> = all.into_iter().collect();
        self.sort_canonical(&mut out);
        Ok(out)
    }

    /// Dominant `μ ≤ λ` in the same `π₁` class: the spherical cells in the closure of `t^λ`.
    pub fn double_coset_support(&self, lambda: &[i64]) -> Result<Vec<Vec<i64>>> {
        let d = self.datum;
        d.require_dominant(lambda)?;
        let lowest = d.act_coweight(d.longest_element(), lambda);
        let span: Vec<i64> = lambda.iter().zip(&lowest).map(|(a, b)| a - b).collect();
        let bounds: Vec<i64> = d
            .coroot_coefficients(&span)
            .expect("λ − w₀λ lies in the coroot span")
            .iter()
            .map(|c| c.to_integer())
            .collect();
        let r = d.rank();
        let mut out = Vec::new();
        let mut c = vec![0i64; r];
        loop {
            let mut mu = lambda.to_vec();
            for (i, &ci) in c.iter().enumerate() {
                for (x, y) in mu.iter_mut().zip(&d.simple_coroots()[i]) {
                    *x -= ci * y;
                }
            }
            if d.is_dominant(&mu) {
                out.push(mu);
            }
            let mut i = 0;
            loop {
                if i == r {
                    out.sort();
                    out.reverse();
                    return Ok(out);
                }
                c[i] += 1;
                if c[i] <= bounds[i] {
                    break;
                }
                c[i] = 0;
                i += 1;
            }
        }
    }

    /// A length-zero element in a given `π₁` class.
    pub fn omega_in_class(&self, class: &Pi1Class) -> Result<AffineWeylElement> {
        let mu = self.datum.pi1_representative(class)?;
        Ok(self.reduced_word(&self.translation(&mu)).0)
    }

    /// All elements `ω·u` with `ω` from `omegas` and `ℓ(u) ≤ max_len`, grouped by nothing
    /// in particular; deduplicated and canonically sorted.
    pub fn ball(&self, omegas: &[AffineWeylElement], max_len: usize) -> Vec<AffineWeylElement> {
        let mut seen: HashSet<AffineWeylElement> = HashSet::new();
        let mut frontier: Vec<AffineWeylElement> = Vec::new();
        for w in omegas {
            if seen.insert(w.clone()) {
                frontier.push(w.clone());
            }
        }
        for len in 0..max_len {
            let mut next = Vec::new();
            for x in &frontier {
                for s in &self.simple {
                    let y = self.mul(x, s);
                    if self.length(&y) == len + 1 && seen.insert(y.clone()) {
                        next.push(y);
                    }
                }
            }
            frontier = next;
        }
        let mut out: Vec<AffineWeylElement> = seen.into_iter().collect();
        self.sort_canonical(&mut out);
        out
    }

    pub fn describe(&self, x: &AffineWeylElement) -> ElementDoc {
        ElementDoc {
            text: self.format(x),
            translation: x.translation.clone(),
            finite_word: self.datum.weyl(x.finite).word.iter().map(|i| i + 1).collect(),
            length: self.length(x),
            omega_class: self.omega_class(x),
        }
    }

    /// Text form `t^[1,0]*s1`, with finite letters numbered from 1.
    pub fn format(&self, x: &AffineWeylElement) -> String {
        let mut parts = Vec::new();
        if x.translation.iter().any(|&v| v != 0) {
            let coords: Vec<String> = x.translation.iter().map(i64::to_string).collect();
            parts.push(format!("t^[{}]", coords.join(",")));
        }
        for &i in &self.datum.weyl(x.finite).word {
            parts.push(format!("s{}", i + 1));
        }
        if parts.is_empty() {
            "e".to_string()
        } else {
            parts.join("*")
        }
    }

    pub fn parse(&self, s: &str) -> Result<AffineWeylElement> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut acc = self.identity();
        for factor in s.split('*') {
            let f = if factor == "e" || factor == "1" {
                self.identity()
            } else if let Some(body) = factor.strip_prefix("t^[").and_then(|b| b.strip_suffix(']')) {
                let mu: Vec<i64> = body
                    .split(',')
                    .map(|v| v.parse().map_err(|_| Error::Parse(format!("bad coordinate `{v}`"))))
                    .collect::<Result<_>>()?;
                self.datum.check_coweight(&mu)?;
                self.translation(&mu)
            } else if let Some(idx) = factor.strip_prefix('s') {
                let i: usize = idx.parse().map_err(|_| Error::Parse(format!("bad reflection `{factor}`")))?;
                self.simple.get(i).cloned().ok_or_else(|| Error::Parse(format!("no simple reflection s{i}")))?
            } else {
                return Err(Error::Parse(format!("bad factor `{factor}`")));
            };
            acc = self.mul(&acc, &f);
        }
        Ok(acc)
    }
}

impl fmt::Display for AffineWeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t^{:?}*w{}", self.translation, self.finite)
    }
}

/// Dominant parts of the translation components of a set of elements.
pub fn dominant_translation_parts(datum: &RootDatum, xs: &[AffineWeylElement]) -> Vec<Vec<i64>> {
    let set: BTreeSet<Vec<i64>> = xs.iter().map(|x| datum.dominant_conjugate(&x.translation).0).collect();
    let mut out: Vec<Vec<i64>> = set.into_iter().collect();
    out.reverse();
    out
}
