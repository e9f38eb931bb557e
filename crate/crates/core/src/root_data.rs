//! Split root data in ambient integer coordinates.
//!
//! Both `X^*` and `X_*` live in `ℤ^m` and pair by the dot product. A datum may
//! carry linear constraints cutting `X_*` out of `ℤ^m` (for `SL_n` the sum of the
//! coordinates vanishes); characters are then read modulo the dual relations.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intmat::{
    dot, integer_kernel, rational_rank, row_hermite, smith_normal_form, solve_integer, solve_rational,
    IntMat, Rational,
};

pub const PRESETS: [&str; 6] = ["SL2", "PGL2", "GL2", "SL3", "GL3", "Sp4"];

const MAX_WEYL_ORDER: u128 = 60_000;
const MAX_ROOTS: usize = 2_000;
const TABLE_LIMIT: usize = 1_000;

/// Index of an element of the finite Weyl group inside its datum.
pub type WeylId = usize;

#[derive(Clone, Debug)]
pub struct WeylElement {
    /// Reduced word in simple reflection indices, leftmost letter first.
    pub word: Vec<usize>,
    /// Matrix of the action on `X_*` (column vectors).
    pub coweight_action: IntMat,
    /// Matrix of the action on `X^*` (column vectors).
    pub weight_action: IntMat,
}

impl WeylElement {
    pub fn length(&self) -> usize {
        self.word.len()
    }
}

/// Versioned interchange form of a root datum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootDatumDoc {
    #[serde(default = "default_version")]
    pub version: u32,
    #[serde(default = "custom_name")]
    pub name: String,
    pub rank: usize,
    #[serde(default)]
    pub weight_lattice_rank: Option<usize>,
    pub simple_roots: Vec<Vec<i64>>,
    pub simple_coroots: Vec<Vec<i64>>,
    pub pairing: Vec<Vec<i64>>,
    #[serde(default)]
    pub coweight_constraints: Vec<Vec<i64>>,
}

fn default_version() -> u32 {
    1
}

fn custom_name() -> String {
    "custom".to_string()
}

/// Image of a coweight in `π₁(G) = X_*/ℤΦ^∨`.
///
/// Entries are listed against [`RootDatum::pi1_moduli`]; a modulus of zero marks a free
/// coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Pi1Class(pub Vec<i64>);

impl Pi1Class {
    pub fn is_trivial(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }
}

impl fmt::Display for Pi1Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.as_slice() {
            [] => write!(f, "0"),
            [x] => write!(f, "{x}"),
            xs => {
                let parts: Vec<String> = xs.iter().map(i64::to_string).collect();
                write!(f, "({})", parts.join(","))
            }
        }
    }
}

#[derive(Clone, Debug)]
struct Pi1Data {
    /// Columns form a basis of `X_*` inside `ℤ^m`.
    basis: IntMat,
    /// Rows turning basis coordinates into class coordinates.
    rows: Vec<Vec<i64>>,
    moduli: Vec<i64>,
}

#[derive(Clone, Debug)]
pub struct RootDatum {
    name: String,
    dim: usize,
    simple_roots: Vec<Vec<i64>>,
    simple_coroots: Vec<Vec<i64>>,
    constraints: Vec<Vec<i64>>,
    cartan: Vec<Vec<i64>>,
    roots: Vec<Vec<i64>>,
    coroots: Vec<Vec<i64>>,
    heights: Vec<i64>,
    num_positive: usize,
    root_lookup: HashMap<Vec<i64>, usize>,
    weyl: Vec<WeylElement>,
    weyl_lookup: HashMap<IntMat, WeylId>,
    simple_ids: Vec<WeylId>,
    inverse: Vec<WeylId>,
    table: Option<Vec<WeylId>>,
    root_action: Vec<Vec<usize>>,
    reflection_ids: Vec<WeylId>,
    longest: WeylId,
    two_rho: Vec<i64>,
    fundamental_coweights: Vec<Vec<Rational>>,
    components: Vec<Vec<usize>>,
    highest_roots: Vec<usize>,
    pi1: Pi1Data,
}

fn type_a(n: usize) -> Vec<Vec<i64>> {
    (0..n - 1)
        .map(|i| {
            let mut v = vec![0; n];
            v[i] = 1;
            v[i + 1] = -1;
            v
        })
        .collect()
}

impl RootDatum {
    pub fn preset(name: &str) -> Result<Self> {
        let (roots, coroots, constraints) = match name {
            "SL2" => (type_a(2), type_a(2), vec![vec![1, 1]]),
            "SL3" => (type_a(3), type_a(3), vec![vec![1, 1, 1]]),
            "GL2" => (type_a(2), type_a(2), vec![]),
            "GL3" => (type_a(3), type_a(3), vec![]),
            "PGL2" => (vec![vec![1]], vec![vec![2]], vec![]),
            "Sp4" => (vec![vec![1, -1], vec![0, 2]], vec![vec![1, -1], vec![0, 1]], vec![]),
            other => return Err(Error::UnknownPreset(other.to_string())),
        };
        Self::custom(name, roots, coroots, constraints)
    }

    pub fn from_doc(doc: &RootDatumDoc) -> Result<Self> {
        let m = doc.simple_roots.first().map_or(doc.pairing.len(), Vec::len);
        if let Some(w) = doc.weight_lattice_rank {
            if w != m {
                return Err(Error::DimensionMismatch { expected: w, got: m });
            }
        }
        if doc.pairing != IntMat::identity(m).to_rows() {
            return Err(Error::InvalidDatum(
                "pairing must be the identity matrix in ambient coordinates".into(),
            ));
        }
        if doc.rank != doc.simple_roots.len() {
            return Err(Error::DimensionMismatch { expected: doc.rank, got: doc.simple_roots.len() });
        }
        if PRESETS.contains(&doc.name.as_str()) {
            let preset = Self::preset(&doc.name)?;
            if preset.to_doc() == *doc {
                return Ok(preset);
            }
        }
        let name = if PRESETS.contains(&doc.name.as_str()) { "custom" } else { doc.name.as_str() };
        Self::custom(
            name,
            doc.simple_roots.clone(),
            doc.simple_coroots.clone(),
            doc.coweight_constraints.clone(),
        )
    }

    pub fn to_doc(&self) -> RootDatumDoc {
        RootDatumDoc {
            version: 1,
            name: self.name.clone(),
            rank: self.rank(),
            weight_lattice_rank: Some(self.dim),
            simple_roots: self.simple_roots.clone(),
            simple_coroots: self.simple_coroots.clone(),
            pairing: IntMat::identity(self.dim).to_rows(),
            coweight_constraints: self.constraints.clone(),
        }
    }

    /// Builds and validates a datum from simple roots and coroots in `ℤ^m`.
    pub fn custom(
        name: &str,
        simple_roots: Vec<Vec<i64>>,
        simple_coroots: Vec<Vec<i64>>,
        constraints: Vec<Vec<i64>>,
    ) -> Result<Self> {
        let r = simple_roots.len();
        if r == 0 {
            return Err(Error::InvalidDatum("at least one simple root is required".into()));
        }
        if simple_coroots.len() != r {
            return Err(Error::DimensionMismatch { expected: r, got: simple_coroots.len() });
        }
        let m = simple_roots[0].len();
        if m == 0 {
            return Err(Error::InvalidDatum("empty coordinate vectors".into()));
        }
        for v in simple_roots.iter().chain(&simple_coroots).chain(&constraints) {
            if v.len() != m {
                return Err(Error::DimensionMismatch { expected: m, got: v.len() });
            }
        }
        for c in &simple_coroots {
            if constraints.iter().any(|k| dot(k, c) != 0) {
                return Err(Error::InvalidDatum(format!("coroot {c:?} violates the coweight constraints")));
            }
        }
        if rational_rank(&IntMat::from_rows(&simple_roots)) != r {
            return Err(Error::InvalidDatum("simple roots are linearly dependent".into()));
        }
        if rational_rank(&IntMat::from_rows(&simple_coroots)) != r {
            return Err(Error::InvalidDatum("simple coroots are linearly dependent".into()));
        }

        let cartan: Vec<Vec<i64>> = (0..r)
            .map(|i| (0..r).map(|j| dot(&simple_roots[i], &simple_coroots[j])).collect())
            .collect();
        validate_cartan(&cartan)?;
        let components = dynkin_components(&cartan);
        let mut expected_order: u128 = 1;
        for comp in &components {
            let o = component_weyl_order(&cartan, comp)
                .ok_or_else(|| Error::InvalidCartan("Cartan matrix is not of finite type".into()))?;
            expected_order = expected_order.saturating_mul(o);
        }
        if expected_order > MAX_WEYL_ORDER {
            return Err(Error::InvalidDatum(format!(
                "Weyl group of order {expected_order} is too large to enumerate"
            )));
        }

        // Roots together with their coroots, closed under simple reflections.
        let reflect_root = |i: usize, v: &[i64]| -> Vec<i64> {
            let k = dot(v, &simple_coroots[i]);
            v.iter().zip(&simple_roots[i]).map(|(x, a)| x - k * a).collect()
        };
        let reflect_coroot = |i: usize, v: &[i64]| -> Vec<i64> {
            let k = dot(&simple_roots[i], v);
            v.iter().zip(&simple_coroots[i]).map(|(x, a)| x - k * a).collect()
        };
        let mut pairs: Vec<(Vec<i64>, Vec<i64>)> = Vec::new();
        let mut seen: HashMap<Vec<i64>, usize> = HashMap::new();
        let mut queue = VecDeque::new();
        for i in 0..r {
            if seen.insert(simple_roots[i].clone(), pairs.len()).is_none() {
                pairs.push((simple_roots[i].clone(), simple_coroots[i].clone()));
                queue.push_back(pairs.len() - 1);
            }
        }
        while let Some(p) = queue.pop_front() {
            for i in 0..r {
                let nr = reflect_root(i, &pairs[p].0);
                if !seen.contains_key(&nr) {
                    let nc = reflect_coroot(i, &pairs[p].1);
                    seen.insert(nr.clone(), pairs.len());
                    pairs.push((nr, nc));
                    queue.push_back(pairs.len() - 1);
                    if pairs.len() > MAX_ROOTS {
                        return Err(Error::InvalidCartan("root system is not finite".into()));
                    }
                }
            }
        }
        let root_basis = IntMat::from_columns(m, &simple_roots);
        let mut positive = Vec::new();
        let mut negative = Vec::new();
        for (root, coroot) in pairs {
            let coeffs = solve_rational(&root_basis, &root)
                .ok_or_else(|| Error::InvalidDatum("root outside the span of simple roots".into()))?;
            if coeffs.iter().any(|c| !c.is_integer()) {
                return Err(Error::InvalidDatum("root is not an integral combination of simple roots".into()));
            }
            let height: i64 = coeffs.iter().map(|c| c.to_integer()).sum();
            if coeffs.iter().all(|c| !c.is_negative()) {
                positive.push((height, root, coroot));
            } else if coeffs.iter().all(|c| !c.is_positive()) {
                negative.push((height, root, coroot));
            } else {
                return Err(Error::InvalidCartan("root with mixed-sign coefficients".into()));
            }
        }
        if positive.len() != negative.len() {
            return Err(Error::InvalidCartan("root set is not closed under negation".into()));
        }
        positive.sort();
        let mut roots = Vec::new();
        let mut coroots = Vec::new();
        let mut heights = Vec::new();
        for (h, a, c) in &positive {
            roots.push(a.clone());
            coroots.push(c.clone());
            heights.push(*h);
        }
        for (h, a, c) in &positive {
            roots.push(a.iter().map(|x| -x).collect());
            coroots.push(c.iter().map(|x| -x).collect());
            heights.push(-h);
        }
        let root_lookup: HashMap<Vec<i64>, usize> =
            roots.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        if root_lookup.len() != roots.len() || negative.iter().any(|(_, a, _)| !root_lookup.contains_key(a)) {
            return Err(Error::InvalidCartan("root set is not closed under negation".into()));
        }

        // Weyl group by breadth-first search on left multiplication.
        let simple_coweight: Vec<IntMat> = (0..r)
            .map(|i| {
                let mut mat = IntMat::identity(m);
                for a in 0..m {
                    for b in 0..m {
                        mat.set(a, b, mat.get(a, b) - simple_coroots[i][a] * simple_roots[i][b]);
                    }
                }
                mat
            })
            .collect();
        let simple_weight: Vec<IntMat> = (0..r)
            .map(|i| {
                let mut mat = IntMat::identity(m);
                for a in 0..m {
                    for b in 0..m {
                        mat.set(a, b, mat.get(a, b) - simple_roots[i][a] * simple_coroots[i][b]);
                    }
                }
                mat
            })
            .collect();
        let mut weyl = vec![WeylElement {
            word: vec![],
            coweight_action: IntMat::identity(m),
            weight_action: IntMat::identity(m),
        }];
        let mut weyl_lookup = HashMap::new();
        weyl_lookup.insert(IntMat::identity(m), 0);
        let mut head = 0;
        while head < weyl.len() {
            for i in 0..r {
                let cw = simple_coweight[i].mul(&weyl[head].coweight_action);
                if weyl_lookup.contains_key(&cw) {
                    continue;
                }
                let ww = simple_weight[i].mul(&weyl[head].weight_action);
                let mut word = vec![i];
                word.extend_from_slice(&weyl[head].word);
                weyl_lookup.insert(cw.clone(), weyl.len());
                weyl.push(WeylElement { word, coweight_action: cw, weight_action: ww });
                if weyl.len() as u128 > expected_order {
                    return Err(Error::InvalidCartan("Weyl group larger than its type predicts".into()));
                }
            }
            head += 1;
        }
        if weyl.len() as u128 != expected_order {
            return Err(Error::InvalidCartan(format!(
                "Weyl group has {} elements but its type predicts {expected_order}",
                weyl.len()
            )));
        }
        let simple_ids: Vec<WeylId> = (0..r).map(|i| weyl_lookup[&simple_coweight[i]]).collect();

        let n = weyl.len();
        let mut root_action = Vec::with_capacity(n);
        for w in &weyl {
            let mut perm = Vec::with_capacity(roots.len());
            for a in &roots {
                let image = w.weight_action.apply(a);
                let idx = *root_lookup
                    .get(&image)
                    .ok_or_else(|| Error::InvalidDatum("Weyl group does not preserve the roots".into()))?;
                perm.push(idx);
            }
            root_action.push(perm);
        }
        let num_positive = positive.len();
        for (id, w) in weyl.iter().enumerate() {
            let inversions = (0..num_positive).filter(|&a| root_action[id][a] >= num_positive).count();
            if inversions != w.length() {
                return Err(Error::InvalidDatum("length does not match the inversion count".into()));
            }
        }
        let longest = (0..n).max_by_key(|&i| weyl[i].length()).unwrap_or(0);

        let mut two_rho = vec![0; m];
        for a in &roots[..num_positive] {
            for (x, y) in two_rho.iter_mut().zip(a) {
                *x += y;
            }
        }

        let cartan_mat = IntMat::from_rows(&cartan);
        let coroot_mat = IntMat::from_columns(m, &simple_coroots);
        let mut fundamental_coweights = Vec::new();
        for i in 0..r {
            let e: Vec<i64> = (0..r).map(|k| i64::from(k == i)).collect();
            let c = solve_rational(&cartan_mat, &e)
                .ok_or_else(|| Error::InvalidCartan("Cartan matrix is singular".into()))?;
            let w: Vec<Rational> = (0..m)
                .map(|a| (0..r).map(|j| c[j] * Rational::from_integer(coroot_mat.get(a, j))).sum())
                .collect();
            fundamental_coweights.push(w);
        }

        let pi1 = pi1_data(m, &constraints, &simple_coroots)?;

        let mut datum = RootDatum {
            name: name.to_string(),
            dim: m,
            simple_roots,
            simple_coroots,
            constraints,
            cartan,
            roots,
            coroots,
            heights,
            num_positive,
            root_lookup,
            weyl,
            weyl_lookup,
            simple_ids,
            inverse: vec![],
            table: None,
            root_action,
            reflection_ids: vec![],
            longest,
            two_rho,
            fundamental_coweights,
            components,
            highest_roots: vec![],
            pi1,
        };
        datum.inverse = (0..n)
            .map(|w| {
                let word: Vec<usize> = datum.weyl[w].word.iter().rev().copied().collect();
                datum.from_word(&word)
            })
            .collect();
        if n <= TABLE_LIMIT {
            let mut table = vec![0; n * n];
            for a in 0..n {
                for b in 0..n {
                    table[a * n + b] = datum.mul_slow(a, b);
                }
            }
            datum.table = Some(table);
        }
        datum.reflection_ids = (0..datum.roots.len())
            .map(|b| {
                let mut mat = IntMat::identity(m);
                for x in 0..m {
                    for y in 0..m {
                        mat.set(x, y, mat.get(x, y) - datum.coroots[b][x] * datum.roots[b][y]);
                    }
                }
                datum.weyl_lookup[&mat]
            })
            .collect();
        datum.highest_roots = datum
            .components
            .iter()
            .map(|comp| {
                (0..datum.num_positive)
                    .filter(|&b| {
                        let c = datum.simple_root_coefficients(&datum.roots[b]);
                        (0..r).all(|i| comp.contains(&i) || c[i] == 0)
                    })
                    .max_by_key(|&b| datum.heights[b])
                    .expect("every component has a positive root")
            })
            .collect();
        Ok(datum)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of simple roots.
    pub fn rank(&self) -> usize {
        self.simple_roots.len()
    }

    /// Dimension of the ambient coordinate space of `X^*` and `X_*`.
    pub fn weight_lattice_rank(&self) -> usize {
        self.dim
    }

    pub fn simple_roots(&self) -> &[Vec<i64>] {
        &self.simple_roots
    }

    pub fn simple_coroots(&self) -> &[Vec<i64>] {
        &self.simple_coroots
    }

    pub fn coweight_constraints(&self) -> &[Vec<i64>] {
        &self.constraints
    }

    /// Entries `⟨α_i, α_j^∨⟩`.
    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    pub fn pairing(&self, chi: &[i64], mu: &[i64]) -> i64 {
        dot(chi, mu)
    }

    /// All roots; the first [`num_positive_roots`](Self::num_positive_roots) are positive.
    pub fn roots(&self) -> &[Vec<i64>] {
        &self.roots
    }

    pub fn root(&self, b: usize) -> &[i64] {
        &self.roots[b]
    }

    pub fn coroot(&self, b: usize) -> &[i64] {
        &self.coroots[b]
    }

    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    pub fn num_positive_roots(&self) -> usize {
        self.num_positive
    }

    pub fn is_positive_root(&self, b: usize) -> bool {
        b < self.num_positive
    }

    pub fn root_height(&self, b: usize) -> i64 {
        self.heights[b]
    }

    pub fn root_index(&self, root: &[i64]) -> Option<usize> {
        self.root_lookup.get(root).copied()
    }

    pub fn negate_root(&self, b: usize) -> usize {
        if b < self.num_positive {
            b + self.num_positive
        } else {
            b - self.num_positive
        }
    }

    /// Coefficients of an element of the root lattice in the simple-root basis.
    pub fn simple_root_coefficients(&self, chi: &[i64]) -> Vec<i64> {
        let basis = IntMat::from_columns(self.dim, &self.simple_roots);
        solve_integer(&basis, chi).expect("vector lies in the root lattice")
    }

    pub fn two_rho(&self) -> &[i64] {
        &self.two_rho
    }

    /// `⟨ρ, μ⟩` as an exact rational.
    pub fn rho_pairing(&self, mu: &[i64]) -> Rational {
        Rational::new(dot(&self.two_rho, mu), 2)
    }

    pub fn rho_pairing_rational(&self, nu: &[Rational]) -> Rational {
        nu.iter().zip(&self.two_rho).map(|(x, &y)| *x * Rational::from_integer(y)).sum::<Rational>()
            / Rational::from_integer(2)
    }

    pub fn fundamental_coweights(&self) -> &[Vec<Rational>] {
        &self.fundamental_coweights
    }

    /// Simple-root index sets of the irreducible components.
    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    /// Highest root of each irreducible component.
    pub fn highest_roots(&self) -> &[usize] {
        &self.highest_roots
    }

    pub fn weyl_order(&self) -> usize {
        self.weyl.len()
    }

    pub fn weyl(&self, w: WeylId) -> &WeylElement {
        &self.weyl[w]
    }

    pub fn weyl_elements(&self) -> &[WeylElement] {
        &self.weyl
    }

    pub fn identity(&self) -> WeylId {
        0
    }

    pub fn simple_reflection(&self, i: usize) -> WeylId {
        self.simple_ids[i]
    }

    pub fn longest_element(&self) -> WeylId {
        self.longest
    }

    /// The reflection `s_β` for a root index.
    pub fn reflection(&self, b: usize) -> WeylId {
        self.reflection_ids[b]
    }

    pub fn length(&self, w: WeylId) -> usize {
        self.weyl[w].length()
    }

    pub fn inverse(&self, w: WeylId) -> WeylId {
        self.inverse[w]
    }

    fn mul_slow(&self, a: WeylId, b: WeylId) -> WeylId {
        let m = self.weyl[a].coweight_action.mul(&self.weyl[b].coweight_action);
        self.weyl_lookup[&m]
    }

    pub fn mul(&self, a: WeylId, b: WeylId) -> WeylId {
        match &self.table {
            Some(t) => t[a * self.weyl.len() + b],
            None => self.mul_slow(a, b),
        }
    }

    pub fn from_word(&self, word: &[usize]) -> WeylId {
        let mut m = IntMat::identity(self.dim);
        for &i in word {
            m = m.mul(&self.weyl[self.simple_ids[i]].coweight_action);
        }
        self.weyl_lookup[&m]
    }

    pub fn lookup_coweight_action(&self, m: &IntMat) -> Option<WeylId> {
        self.weyl_lookup.get(m).copied()
    }

    pub fn act_coweight(&self, w: WeylId, mu: &[i64]) -> Vec<i64> {
        self.weyl[w].coweight_action.apply(mu)
    }

    pub fn act_weight(&self, w: WeylId, chi: &[i64]) -> Vec<i64> {
        self.weyl[w].weight_action.apply(chi)
    }

    /// Index of `w(β)`.
    pub fn act_root(&self, w: WeylId, b: usize) -> usize {
        self.root_action[w][b]
    }

    pub fn check_coweight(&self, mu: &[i64]) -> Result<()> {
        if mu.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: mu.len() });
        }
        if let Some(k) = self.constraints.iter().find(|k| dot(k, mu) != 0) {
            return Err(Error::InvalidDatum(format!(
                "coweight {mu:?} violates the constraint {k:?} on X_*"
            )));
        }
        Ok(())
    }

    pub fn is_dominant(&self, mu: &[i64]) -> bool {
        self.simple_roots.iter().all(|a| dot(a, mu) >= 0)
    }

    pub fn require_dominant(&self, mu: &[i64]) -> Result<()> {
        self.check_coweight(mu)?;
        if self.is_dominant(mu) {
            Ok(())
        } else {
            Err(Error::NotDominant(format!("{mu:?}")))
        }
    }

    /// Returns `(μ₊, w)` with `w(μ) = μ₊` dominant and `w` of minimal length.
    pub fn dominant_conjugate(&self, mu: &[i64]) -> (Vec<i64>, WeylId) {
        let mut cur = mu.to_vec();
        let mut w = self.identity();
        while let Some(i) = (0..self.rank()).find(|&i| dot(&self.simple_roots[i], &cur) < 0) {
            let k = dot(&self.simple_roots[i], &cur);
            for (x, c) in cur.iter_mut().zip(&self.simple_coroots[i]) {
                *x -= k * c;
            }
            w = self.mul(self.simple_ids[i], w);
        }
        (cur, w)
    }

    pub fn weyl_orbit(&self, mu: &[i64]) -> Vec<Vec<i64>> {
        let mut out: Vec<Vec<i64>> = (0..self.weyl_order()).map(|w| self.act_coweight(w, mu)).collect();
        out.sort();
        out.dedup();
        out
    }

    /// Coefficients of `v` in the simple-coroot basis, if `v` lies in their rational span.
    pub fn coroot_coefficients(&self, v: &[i64]) -> Option<Vec<Rational>> {
        solve_rational(&IntMat::from_columns(self.dim, &self.simple_coroots), v)
    }

    /// `μ ≤ λ`: `λ − μ` is a non-negative combination of simple coroots (integral unless
    /// `rational` is set) and the two coweights have the same image in `π₁`.
    pub fn dominance_leq(&self, mu: &[i64], lambda: &[i64], rational: bool) -> bool {
        let diff: Vec<i64> = lambda.iter().zip(mu).map(|(a, b)| a - b).collect();
        let Some(c) = self.coroot_coefficients(&diff) else { return false };
        if c.iter().any(Signed::is_negative) {
            return false;
        }
        if !rational && c.iter().any(|x| !x.is_integer()) {
            return false;
        }
        self.pi1_class(mu) == self.pi1_class(lambda)
    }

    /// Rational dominance `ν ≤_ℚ λ` for a rational coweight, without a `π₁` condition.
    pub fn rational_dominance_leq(&self, nu: &[Rational], lambda: &[i64]) -> bool {
        let den = nu.iter().fold(1i64, |acc, x| num_integer::lcm(acc, *x.denom()));
        let scaled: Vec<i64> = lambda
            .iter()
            .zip(nu)
            .map(|(&l, x)| l * den - (*x * Rational::from_integer(den)).to_integer())
            .collect();
        match self.coroot_coefficients(&scaled) {
            Some(c) => c.iter().all(|x| !x.is_negative()),
            None => false,
        }
    }

    pub fn pi1_moduli(&self) -> &[i64] {
        &self.pi1.moduli
    }

    pub fn pi1_class(&self, mu: &[i64]) -> Pi1Class {
        let coords = solve_integer(&self.pi1.basis, mu).expect("coweight lies in X_*");
        Pi1Class(
            self.pi1
                .rows
                .iter()
                .zip(&self.pi1.moduli)
                .map(|(row, &d)| {
                    let y = dot(row, &coords);
                    if d == 0 {
                        y
                    } else {
                        y.rem_euclid(d)
                    }
                })
                .collect(),
        )
    }

    /// Element of `X_*` representing a `π₁` class.
    pub fn pi1_representative(&self, class: &Pi1Class) -> Result<Vec<i64>> {
        if class.0.len() != self.pi1.rows.len() {
            return Err(Error::DimensionMismatch { expected: self.pi1.rows.len(), got: class.0.len() });
        }
        let k = self.pi1.basis.cols();
        // Search small coordinate vectors; classes are tiny at the scales in use.
        let bound = 1 + class.0.iter().map(|x| x.abs()).max().unwrap_or(0)
            + self.pi1.moduli.iter().copied().max().unwrap_or(0);
        let mut coords = vec![-bound; k];
        loop {
            let mu = self.pi1.basis.apply(&coords);
            if self.pi1_class(&mu) == *class {
                return Ok(mu);
            }
            let mut i = 0;
            loop {
                if i == k {
                    return Err(Error::InvalidDatum(format!("no coweight found in class {class}")));
                }
                coords[i] += 1;
                if coords[i] <= bound {
                    break;
                }
                coords[i] = -bound;
                i += 1;
            }
        }
    }

    /// Parabolic subgroup `W_λ` generated by the simple reflections fixing a dominant `λ`.
    pub fn stabilizer_simple(&self, lambda: &[i64]) -> Vec<usize> {
        (0..self.rank()).filter(|&i| dot(&self.simple_roots[i], lambda) == 0).collect()
    }

    /// Elements of the standard parabolic subgroup generated by the given simple reflections.
    pub fn parabolic_subgroup(&self, simple: &[usize]) -> Vec<WeylId> {
        (0..self.weyl_order())
            .filter(|&w| self.weyl[w].word.iter().all(|i| simple.contains(i)))
            .collect()
    }

    /// Minimal-length representative of `w·W_J`.
    pub fn min_coset_rep(&self, w: WeylId, simple: &[usize]) -> WeylId {
        let mut cur = w;
        loop {
            let next = simple.iter().map(|&j| self.mul(cur, self.simple_ids[j])).find(|&x| self.length(x) < self.length(cur));
            match next {
                Some(x) => cur = x,
                None => return cur,
            }
        }
    }

    /// Dominant coweights in the box `[lo, hi]^m` that lie in `X_*`.
    pub fn dominant_in_box(&self, lo: i64, hi: i64) -> Vec<Vec<i64>> {
        let m = self.dim;
        let mut out = Vec::new();
        let mut cur = vec![lo; m];
        loop {
            if self.check_coweight(&cur).is_ok() && self.is_dominant(&cur) {
                out.push(cur.clone());
            }
            let mut i = 0;
            loop {
                if i == m {
                    return out;
                }
                cur[i] += 1;
                if cur[i] <= hi {
                    break;
                }
                cur[i] = lo;
                i += 1;
            }
        }
    }
}

fn validate_cartan(c: &[Vec<i64>]) -> Result<()> {
    let r = c.len();
    for i in 0..r {
        if c[i][i] != 2 {
            return Err(Error::InvalidCartan(format!("diagonal entry {i} is {} instead of 2", c[i][i])));
        }
        for j in 0..r {
            if i != j {
                if c[i][j] > 0 {
                    return Err(Error::InvalidCartan(format!("positive off-diagonal entry at ({i},{j})")));
                }
                if (c[i][j] == 0) != (c[j][i] == 0) {
                    return Err(Error::InvalidCartan(format!("asymmetric zero pattern at ({i},{j})")));
                }
            }
        }
    }
    // symmetrizable: find d with d_i c_ij = d_j c_ji
    let mut d: Vec<Option<Rational>> = vec![None; r];
    for start in 0..r {
        if d[start].is_some() {
            continue;
        }
        d[start] = Some(Rational::from_integer(1));
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for j in 0..r {
                if i != j && c[i][j] != 0 {
                    let dj = d[i].unwrap() * Rational::new(c[i][j], c[j][i]);
                    match d[j] {
                        None => {
                            d[j] = Some(dj);
                            stack.push(j);
                        }
                        Some(x) if x != dj => {
                            return Err(Error::InvalidCartan("matrix is not symmetrizable".into()));
                        }
                        _ => {}
                    }
                }
            }
        }
    }
    if d.iter().any(|x| x.map_or(true, |v| v <= Rational::zero())) {
        return Err(Error::InvalidCartan("matrix is not symmetrizable".into()));
    }
    Ok(())
}

fn dynkin_components(c: &[Vec<i64>]) -> Vec<Vec<usize>> {
    let r = c.len();
    let mut comp = vec![usize::MAX; r];
    let mut out = Vec::new();
    for s in 0..r {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = vec![];
        let mut stack = vec![s];
        comp[s] = id;
        while let Some(i) = stack.pop() {
            members.push(i);
            for j in 0..r {
                if j != i && c[i][j] != 0 && comp[j] == usize::MAX {
                    comp[j] = id;
                    stack.push(j);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

fn factorial(n: u128) -> u128 {
    (1..=n).product()
}

/// Order of the Weyl group of a connected Dynkin diagram, or `None` if it is not of finite type.
fn component_weyl_order(c: &[Vec<i64>], comp: &[usize]) -> Option<u128> {
    let n = comp.len();
    if n == 1 {
        return Some(2);
    }
    let mut edges = Vec::new();
    for (a, &i) in comp.iter().enumerate() {
        for (b, &j) in comp.iter().enumerate().skip(a + 1) {
            if c[i][j] != 0 {
                edges.push((a, b, c[i][j] * c[j][i]));
            }
        }
    }
    if edges.len() != n - 1 || edges.iter().any(|e| !(1..=3).contains(&e.2)) {
        return None;
    }
    let mut degree = vec![0usize; n];
    for &(a, b, _) in &edges {
        degree[a] += 1;
        degree[b] += 1;
    }
    let multiple: Vec<_> = edges.iter().filter(|e| e.2 > 1).collect();
    let n128 = n as u128;
    match multiple.as_slice() {
        [] => {
            let branches: Vec<usize> = (0..n).filter(|&v| degree[v] >= 3).collect();
            match branches.as_slice() {
                [] => Some(factorial(n128 + 1)),
                [v] if degree[*v] == 3 => {
                    let mut arms: Vec<usize> = edges
                        .iter()
                        .filter_map(|&(a, b, _)| {
                            if a == *v {
                                Some(b)
                            } else if b == *v {
                                Some(a)
                            } else {
                                None
                            }
                        })
                        .map(|start| arm_length(&edges, *v, start))
                        .collect();
                    arms.sort_unstable();
                    match arms.as_slice() {
                        [1, 1, _] => Some((1u128 << (n - 1)) * factorial(n128)),
                        [1, 2, 2] => Some(51_840),
                        [1, 2, 3] => Some(2_903_040),
                        [1, 2, 4] => Some(696_729_600),
                        _ => None,
                    }
                }
                _ => None,
            }
        }
        [e] => {
            if degree.iter().any(|&d| d > 2) {
                return None;
            }
            if e.2 == 3 {
                return (n == 2).then_some(12);
            }
            if degree[e.0] == 1 || degree[e.1] == 1 {
                Some((1u128 << n) * factorial(n128))
            } else if n == 4 {
                Some(1152)
            } else {
                None
            }
        }
        _ => None,
    }
}

fn arm_length(edges: &[(usize, usize, i64)], from: usize, start: usize) -> usize {
    let mut prev = from;
    let mut cur = start;
    let mut len = 1;
    loop {
        let next = edges.iter().find_map(|&(a, b, _)| {
            if a == cur && b != prev {
                Some(b)
            } else if b == cur && a != prev {
                Some(a)
            } else {
                None
            }
        });
        match next {
            Some(x) => {
                prev = cur;
                cur = x;
                len += 1;
            }
            None => return len,
        }
    }
}

fn pi1_data(m: usize, constraints: &[Vec<i64>], coroots: &[Vec<i64>]) -> Result<Pi1Data> {
    let basis = if constraints.is_empty() {
        IntMat::identity(m)
    } else {
        integer_kernel(&IntMat::from_rows(constraints))
    };
    let coords: Vec<Vec<i64>> = coroots
        .iter()
        .map(|c| solve_integer(&basis, c).ok_or_else(|| Error::InvalidDatum("coroot outside X_*".into())))
        .collect::<Result<_>>()?;
    let a = IntMat::from_columns(basis.cols(), &coords);
    let snf = smith_normal_form(&a);
    let mut rows = Vec::new();
    let mut moduli = Vec::new();
    for (i, &d) in snf.diagonal.iter().enumerate() {
        if d != 1 {
            rows.push(snf.u.row(i));
            moduli.push(d);
        }
    }
    let free: Vec<Vec<i64>> = (snf.rank()..snf.u.rows()).map(|i| snf.u.row(i)).collect();
    for row in row_hermite(&free) {
        rows.push(row);
        moduli.push(0);
    }
    Ok(Pi1Data { basis, rows, moduli })
}
