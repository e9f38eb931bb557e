//! Matrices over `F = k((t))` for `GL_n` and `SL_n`.
//!
//! The Iwahori subgroup `I` is the preimage of the upper-triangular Borel under
//! reduction modulo `t`. Cells are labelled by `t^μ σ`, the monomial matrix sending
//! `e_j` to `t^{μ_{σ(j)}} e_{σ(j)}`.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::affine_weyl::{AffineWeylElement, AffineWeylGroup};
use crate::error::{Error, Result};
use crate::intmat::IntMat;
use crate::invariants::Variant;
use crate::laurent::{CoefficientField, LaurentSeries, Scalar, Valuation, DEFAULT_PRECISION};
use crate::root_data::RootDatum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MatrixGroup {
    GL,
    SL,
}

/// `(n, GL|SL)` for a datum with a matrix model, otherwise `UnsupportedType`.
pub fn matrix_model(datum: &RootDatum) -> Result<(usize, MatrixGroup)> {
    let name = datum.name();
    let group = if name.starts_with("GL") {
        MatrixGroup::GL
    } else if name.starts_with("SL") {
        MatrixGroup::SL
    } else {
        return Err(Error::UnsupportedType(format!("no matrix model for {name}")));
    };
    let n: usize = name[2..].parse().map_err(|_| Error::UnsupportedType(name.to_string()))?;
    if n != datum.weight_lattice_rank() {
        return Err(Error::UnsupportedType(name.to_string()));
    }
    Ok((n, group))
}

/// Datum of `GL_n` or `SL_n`; presets for `n ≤ 3`.
pub fn matrix_datum(n: usize, group: MatrixGroup) -> Result<RootDatum> {
    let name = match group {
        MatrixGroup::GL => format!("GL{n}"),
        MatrixGroup::SL => format!("SL{n}"),
    };
    if n <= 3 && n >= 2 {
        return RootDatum::preset(&name);
    }
    if n < 2 {
        return Err(Error::UnsupportedType(name));
    }
    let roots: Vec<Vec<i64>> = (0..n - 1)
        .map(|i| {
            let mut v = vec![0; n];
            v[i] = 1;
            v[i + 1] = -1;
            v
        })
        .collect();
    let constraints = match group {
        MatrixGroup::GL => vec![],
        MatrixGroup::SL => vec![vec![1; n]],
    };
    RootDatum::custom(&name, roots.clone(), roots, constraints)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoopMatrix {
    n: usize,
    entries: Vec<LaurentSeries>,
    group: MatrixGroup,
}

impl LoopMatrix {
    /// Checks invertibility, and `det = 1` for `SL_n`.
    pub fn new(n: usize, entries: Vec<LaurentSeries>, group: MatrixGroup) -> Result<Self> {
        let m = Self::new_unchecked(n, entries, group)?;
        let det = m.det();
        match det.valuation() {
            Ok(Valuation::Finite(_)) => {}
            Ok(Valuation::Infinite) => return Err(Error::NotInvertible("determinant is zero".into())),
            Err(e) => return Err(e),
        }
        if group == MatrixGroup::SL && !det.sub(&LaurentSeries::one(m.field())).is_known_zero() {
            return Err(Error::NotUnimodular(format!("determinant {det}")));
        }
        Ok(m)
    }

    pub fn new_unchecked(n: usize, entries: Vec<LaurentSeries>, group: MatrixGroup) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: entries.len() });
        }
        let f = entries[0].field();
        if entries.iter().any(|e| e.field() != f) {
            return Err(Error::FieldMismatch);
        }
        Ok(LoopMatrix { n, entries, group })
    }

    pub fn from_rows(rows: Vec<Vec<LaurentSeries>>, group: MatrixGroup) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: rows.iter().map(Vec::len).max().unwrap_or(0) });
        }
        Self::new(n, rows.into_iter().flatten().collect(), group)
    }

    /// Parses a square array of Laurent strings.
    pub fn parse(rows: &[Vec<String>], field: CoefficientField, precision: Option<i64>, group: MatrixGroup) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|s| LaurentSeries::parse(s, field, precision)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(parsed, group)
    }

    pub fn identity(n: usize, field: CoefficientField, group: MatrixGroup) -> Self {
        let mut entries = vec![LaurentSeries::zero(field); n * n];
        for i in 0..n {
            entries[i * n + i] = LaurentSeries::one(field);
        }
        LoopMatrix { n, entries, group }
    }

    pub fn diagonal(diag: Vec<LaurentSeries>, group: MatrixGroup) -> Result<Self> {
        let n = diag.len();
        let field = diag[0].field();
        let mut m = Self::identity(n, field, group);
        for (i, d) in diag.into_iter().enumerate() {
            m.entries[i * n + i] = d;
        }
        Self::new(n, m.entries, group)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn group(&self) -> MatrixGroup {
        self.group
    }

    pub fn field(&self) -> CoefficientField {
        self.entries[0].field()
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentSeries {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: LaurentSeries) {
        self.entries[i * self.n + j] = v;
    }

    pub fn entries(&self) -> &[LaurentSeries] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<LaurentSeries>> {
        (0..self.n).map(|i| self.entries[i * self.n..(i + 1) * self.n].to_vec()).collect()
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
    }

    pub fn mul(&self, o: &LoopMatrix) -> LoopMatrix {
        assert_eq!(self.n, o.n, "dimension mismatch");
        let n = self.n;
        let f = self.field();
        let mut out = vec![LaurentSeries::zero(f); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_exact_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = o.get(k, j);
                    if b.is_exact_zero() {
                        continue;
                    }
                    out[i * n + j] = out[i * n + j].add(&a.mul(b));
                }
            }
        }
        LoopMatrix { n, entries: out, group: self.group }
    }

    pub fn scale(&self, c: &LaurentSeries) -> LoopMatrix {
        LoopMatrix { n: self.n, entries: self.entries.iter().map(|e| e.mul(c)).collect(), group: self.group }
    }

    fn minor_det(&self, rows: &[usize], cols: &[usize]) -> LaurentSeries {
        let k = rows.len();
        if k == 1 {
            return self.get(rows[0], cols[0]).clone();
        }
        let mut acc = LaurentSeries::zero(self.field());
        for (pos, &c) in cols.iter().enumerate() {
            let a = self.get(rows[0], c);
            if a.is_exact_zero() {
                continue;
            }
            let sub_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let term = a.mul(&self.minor_det(&rows[1..], &sub_cols));
            acc = if pos % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
        }
        acc
    }

    pub fn det(&self) -> LaurentSeries {
        let idx: Vec<usize> = (0..self.n).collect();
        self.minor_det(&idx, &idx)
    }

    /// Cofactor matrix `det(A)·(A⁻¹)ᵀ`, i.e. `Λ²A` under `Λ²F³ ≅ F³` when `n = 3`.
    pub fn cofactor(&self) -> LoopMatrix {
        let n = self.n;
        if n == 1 {
            return LoopMatrix { n, entries: vec![LaurentSeries::one(self.field())], group: self.group };
        }
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let rows: Vec<usize> = (0..n).filter(|&r| r != i).collect();
                let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
                let m = self.minor_det(&rows, &cols);
                out.push(if (i + j) % 2 == 0 { m } else { m.neg() });
            }
        }
        LoopMatrix { n, entries: out, group: self.group }
    }

    pub fn transpose(&self) -> LoopMatrix {
        let n = self.n;
        let entries = (0..n * n).map(|k| self.get(k % n, k / n).clone()).collect();
        LoopMatrix { n, entries, group: self.group }
    }

    pub fn sub(&self, o: &LoopMatrix) -> LoopMatrix {
        let entries = self.entries.iter().zip(&o.entries).map(|(a, b)| a.sub(b)).collect();
        LoopMatrix { n: self.n, entries, group: self.group }
    }

    /// Every entry vanishes up to its precision.
    pub fn is_known_zero(&self) -> bool {
        self.entries.iter().all(LaurentSeries::is_known_zero)
    }

    /// Inverse by the adjugate formula.
    pub fn inverse(&self, working: i64) -> Result<LoopMatrix> {
        let det_inv = self.det().inverse(working)?;
        Ok(self.cofactor().transpose().scale(&det_inv))
    }

    /// `g⁻¹ γ g`.
    pub fn conjugate_by(&self, g: &LoopMatrix, working: i64) -> Result<LoopMatrix> {
        Ok(g.inverse(working)?.mul(self).mul(g))
    }

    /// Smallest valuation among entries, with inexact zeros counted at their precision.
    pub fn min_valuation(&self) -> Result<i64> {
        let mut best: Option<i64> = None;
        for e in &self.entries {
            let v = if e.is_exact_zero() {
                continue;
            } else if e.is_known_zero() {
                e.precision().expect("inexact")
            } else {
                e.lowest()
            };
            best = Some(best.map_or(v, |b: i64| b.min(v)));
        }
        best.ok_or_else(|| Error::NotInvertible("zero matrix".into()))
    }

    /// Whether every entry lies in `O`.
    pub fn is_integral(&self) -> Result<bool> {
        for e in &self.entries {
            if e.is_exact_zero() {
                continue;
            }
            if e.is_known_zero() {
                if e.precision().unwrap() < 0 {
                    return Err(Error::InsufficientPrecision(format!("entry {e} undetermined below t^0")));
                }
                continue;
            }
            if e.lowest() < 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Reduction modulo `t` of an integral matrix.
    pub fn residue(&self) -> Result<Vec<Vec<Scalar>>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j).coefficient(0)).collect()).collect()
    }

    /// Monomial matrix of `t^μ σ`. For `SL_n` the first nonzero column absorbs the sign of `σ`.
    pub fn monomial(datum: &RootDatum, x: &AffineWeylElement, field: CoefficientField, group: MatrixGroup) -> Result<LoopMatrix> {
        let n = datum.weight_lattice_rank();
        let perm = permutation_of(datum, x.finite);
        let mut m = LoopMatrix { n, entries: vec![LaurentSeries::zero(field); n * n], group };
        for j in 0..n {
            let i = perm[j];
            m.set(i, j, LaurentSeries::t_pow(field, x.translation[i]));
        }
        if group == MatrixGroup::SL && permutation_sign(&perm) < 0 {
            let i = perm[0];
            let v = m.get(i, 0).neg();
            m.set(i, 0, v);
        }
        Ok(m)
    }

    /// Smallest absolute precision among entries, `None` when exact.
    pub fn precision(&self) -> Option<i64> {
        self.entries.iter().filter_map(LaurentSeries::precision).min()
    }
}

impl fmt::Display for LoopMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|r| format!("[{}]", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")))
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

/// `σ` as a list `j ↦ σ(j)`, read off the permutation matrix of a Weyl element.
pub fn permutation_of(datum: &RootDatum, w: usize) -> Vec<usize> {
    let m = &datum.weyl(w).coweight_action;
    (0..m.cols()).map(|j| (0..m.rows()).find(|&i| m.get(i, j) != 0).expect("permutation matrix")).collect()
}

fn permutation_sign(perm: &[usize]) -> i64 {
    let mut sign = 1;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                sign = -sign;
            }
        }
    }
    sign
}

fn weyl_of_permutation(datum: &RootDatum, perm: &[usize]) -> Result<usize> {
    let n = perm.len();
    let mut m = IntMat::zeros(n, n);
    for (j, &i) in perm.iter().enumerate() {
        m.set(i, j, 1);
    }
    datum
        .lookup_coweight_action(&m)
        .ok_or_else(|| Error::InvalidDatum(format!("permutation {perm:?} is not a Weyl element")))
}

/// A nonzero entry of certified valuation `v`, or an error when no pivot can be certified.
fn certified_min(entries: &[(usize, usize, &LaurentSeries)]) -> Result<Option<i64>> {
    let mut best: Option<i64> = None;
    let mut fuzzy: Option<i64> = None;
    for (_, _, e) in entries {
        if e.is_exact_zero() {
            continue;
        }
        if e.is_known_zero() {
            let p = e.precision().unwrap();
            fuzzy = Some(fuzzy.map_or(p, |f: i64| f.min(p)));
        } else {
            best = Some(best.map_or(e.lowest(), |b: i64| b.min(e.lowest())));
        }
    }
    match (best, fuzzy) {
        (None, None) => Ok(None),
        (None, Some(p)) => Err(Error::InsufficientPrecision(format!("pivot undetermined below t^{p}"))),
        (Some(v), Some(p)) if p <= v => {
            Err(Error::InsufficientPrecision(format!("pivot of valuation {v} not certified modulo t^{p}")))
        }
        (Some(v), _) => Ok(Some(v)),
    }
}

/// Elementary-divisor valuations `v₁ ≥ … ≥ v_n`: the dominant `μ` with `g ∈ K t^μ K`.
pub fn smith_cartan(g: &LoopMatrix, working: i64) -> Result<Vec<i64>> {
    let n = g.n;
    let mut a = g.clone();
    let mut rows: Vec<usize> = (0..n).collect();
    let mut cols: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(n);
    while !rows.is_empty() {
        let block: Vec<(usize, usize, &LaurentSeries)> =
            rows.iter().flat_map(|&i| cols.iter().map(move |&j| (i, j))).map(|(i, j)| (i, j, a.get(i, j))).collect();
        let v = certified_min(&block)?.ok_or_else(|| Error::NotInvertible("singular matrix".into()))?;
        let (pi, pj) = block
            .iter()
            .find(|(_, _, e)| !e.is_known_zero() && e.lowest() == v)
            .map(|&(i, j, _)| (i, j))
            .unwrap();
        eliminate(&mut a, pi, pj, &rows, &cols, working)?;
        out.push(v);
        rows.retain(|&r| r != pi);
        cols.retain(|&c| c != pj);
    }
    out.sort_unstable_by(|x, y| y.cmp(x));
    Ok(out)
}

/// Elementary divisors from minimal valuations of `k×k` minors; uses no division, so it
/// is exact on exact input.
pub fn smith_cartan_exact(g: &LoopMatrix) -> Result<Vec<i64>> {
    let n = g.n;
    let mut partial = vec![0i64; n + 1];
    for k in 1..=n {
        let subsets = index_subsets(n, k);
        let mut best: Option<i64> = None;
        // Minors known only to vanish below some precision bound the minimum from below.
        let mut floor: Option<i64> = None;
        for rows in &subsets {
            for cols in &subsets {
                let m = g.minor_det(rows, cols);
                if m.is_exact_zero() {
                    continue;
                }
                if m.is_known_zero() {
                    let p = m.precision().expect("inexact zero has a precision");
                    floor = Some(floor.map_or(p, |f: i64| f.min(p)));
                    continue;
                }
                let v = m.finite_valuation()?;
                best = Some(best.map_or(v, |b: i64| b.min(v)));
            }
        }
        partial[k] = match (best, floor) {
            (Some(b), Some(f)) if f <= b => {
                return Err(Error::InsufficientPrecision(format!("{k}×{k} minors are only known modulo t^{f}")))
            }
            (Some(b), _) => b,
            (None, Some(f)) => return Err(Error::InsufficientPrecision(format!("{k}×{k} minors vanish modulo t^{f}"))),
            (None, None) => return Err(Error::NotInvertible("singular matrix".into())),
        };
    }
    let mut out: Vec<i64> = (1..=n).map(|k| partial[k] - partial[k - 1]).collect();
    out.sort_unstable_by(|x, y| y.cmp(x));
    Ok(out)
}

fn index_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for last in k - 1..n {
        for mut s in index_subsets(last, k - 1) {
            s.push(last);
            out.push(s);
        }
    }
    out
}

/// Clears row `pi` and column `pj` around the pivot using the remaining rows and columns.
fn eliminate(a: &mut LoopMatrix, pi: usize, pj: usize, rows: &[usize], cols: &[usize], working: i64) -> Result<()> {
    let pinv = a.get(pi, pj).inverse(working)?;
    for &k in rows {
        if k == pi || a.get(k, pj).is_exact_zero() {
            continue;
        }
        let c = a.get(k, pj).mul(&pinv);
        for &l in cols {
            let v = a.get(k, l).sub(&c.mul(a.get(pi, l)));
            a.set(k, l, v);
        }
        a.set(k, pj, LaurentSeries::zero(a.field()));
    }
    for &l in cols {
        if l == pj || a.get(pi, l).is_exact_zero() {
            continue;
        }
        let c = a.get(pi, l).mul(&pinv);
        for &k in rows {
            let v = a.get(k, l).sub(&c.mul(a.get(k, pj)));
            a.set(k, l, v);
        }
        a.set(pi, l, LaurentSeries::zero(a.field()));
    }
    Ok(())
}

/// Iwahori cell by valuation-pivot elimination.
///
/// The pivot is a minimal-valuation entry in the lowest possible row, leftmost within
/// that row; every row and column operation used is then left or right multiplication
/// by an element of `I`.
pub fn iwahori_cell_fast(datum: &RootDatum, g: &LoopMatrix, working: i64) -> Result<AffineWeylElement> {
    let n = g.n;
    let mut a = g.clone();
    let mut rows: Vec<usize> = (0..n).collect();
    let mut cols: Vec<usize> = (0..n).collect();
    let mut perm = vec![usize::MAX; n];
    let mut mu = vec![0i64; n];
    while !rows.is_empty() {
        let block: Vec<(usize, usize, &LaurentSeries)> =
            rows.iter().flat_map(|&i| cols.iter().map(move |&j| (i, j))).map(|(i, j)| (i, j, a.get(i, j))).collect();
        let v = certified_min(&block)?.ok_or_else(|| Error::NotInvertible("singular matrix".into()))?;
        // with ties on the valuation, the choice below must also be certified
        for (_, _, e) in &block {
            if e.is_known_zero() && !e.is_exact_zero() && e.precision().unwrap() <= v + 1 {
                return Err(Error::InsufficientPrecision("pivot position not certified".into()));
            }
        }
        let (pi, pj) = block
            .iter()
            .filter(|(_, _, e)| !e.is_known_zero() && e.lowest() == v)
            .map(|&(i, j, _)| (i, j))
            .max_by(|x, y| x.0.cmp(&y.0).then(y.1.cmp(&x.1)))
            .unwrap();
        eliminate(&mut a, pi, pj, &rows, &cols, working)?;
        perm[pj] = pi;
        mu[pi] = v;
        rows.retain(|&r| r != pi);
        cols.retain(|&c| c != pj);
    }
    Ok(AffineWeylElement { translation: mu, finite: weyl_of_permutation(datum, &perm)? })
}

fn scalar_rank(mut m: Vec<Vec<Scalar>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, p);
        let inv = m[rank][c].inv().expect("nonzero pivot");
        for r in rank + 1..rows {
            if m[r][c].is_zero() {
                continue;
            }
            let f = m[r][c].mul(&inv);
            for k in c..cols {
                let sub = f.mul(&m[rank][k]);
                m[r][k] = m[r][k].sub(&sub);
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Iwahori cell from relative-position invariants.
///
/// Write `ε(a, i) = t^a e_i` with order index `n·a + (n−1−i)`; elements of `I` are
/// triangular with invertible diagonal in this ordered basis. The rank `R(p, q)` of the
/// block of `g` with rows of index `≤ p` and columns of index `≥ q` is therefore an
/// invariant of `I g I`, and the second difference of `R` is the permutation matrix of
/// the monomial representative.
pub fn iwahori_cell(datum: &RootDatum, g: &LoopMatrix) -> Result<AffineWeylElement> {
    let n = g.n as i64;
    let vmin = g.min_valuation()?;
    let vdet = match g.det().valuation()? {
        Valuation::Finite(v) => v,
        Valuation::Infinite => return Err(Error::NotInvertible("determinant is zero".into())),
    };
    let vmax = vdet - (n - 1) * vmin;
    let field = g.field();
    let rank = |p: i64, q: i64| -> Result<usize> {
        let rlo = n * (q.div_euclid(n) + vmin);
        let chi = n * (p.div_euclid(n) - vmin) + n - 1;
        if p < rlo || chi < q {
            return Ok(0);
        }
        let mut block = Vec::new();
        for r in rlo..=p {
            let (b, k) = (r.div_euclid(n), (n - 1 - r.rem_euclid(n)) as usize);
            let mut row = Vec::new();
            for c in q..=chi {
                let (a, i) = (c.div_euclid(n), (n - 1 - c.rem_euclid(n)) as usize);
                let e = g.get(k, i);
                row.push(if e.is_exact_zero() { field.zero() } else { e.coefficient(b - a)? });
            }
            block.push(row);
        }
        Ok(scalar_rank(block))
    };
    let mut perm = vec![usize::MAX; g.n];
    let mut mu = vec![i64::MIN; g.n];
    for j in 0..g.n {
        let c = n - 1 - j as i64;
        let mut hits = Vec::new();
        for p in n * vmin..=n * vmax + n - 1 {
            let delta = rank(p, c)? as i64 - rank(p - 1, c)? as i64 - rank(p, c + 1)? as i64 + rank(p - 1, c + 1)? as i64;
            if delta != 0 {
                hits.push((p, delta));
            }
        }
        match hits.as_slice() {
            [(p, 1)] => {
                let i = (n - 1 - p.rem_euclid(n)) as usize;
                perm[j] = i;
                mu[i] = p.div_euclid(n);
            }
            _ => {
                return Err(Error::InsufficientPrecision(format!(
                    "relative position of column {j} undetermined: {hits:?}"
                )))
            }
        }
    }
    if mu.contains(&i64::MIN) {
        return Err(Error::InsufficientPrecision("relative position is not a permutation".into()));
    }
    Ok(AffineWeylElement { translation: mu, finite: weyl_of_permutation(datum, &perm)? })
}

/// Closed: `smith_cartan(g⁻¹γg) ≤ λ`; open: equality.
pub fn spherical_membership(
    datum: &RootDatum,
    g: &LoopMatrix,
    gamma: &LoopMatrix,
    lambda: &[i64],
    variant: Variant,
    working: i64,
) -> Result<bool> {
    datum.require_dominant(lambda)?;
    let h = gamma.conjugate_by(g, working)?;
    let mu = smith_cartan(&h, working)?;
    Ok(match variant {
        Variant::Open => mu == lambda,
        Variant::Closed => datum.dominance_leq(&mu, lambda, false),
    })
}

/// Cell sets `{t^{xλ}}` and `Adm(λ)` for repeated Iwahori membership tests.
#[derive(Clone, Debug)]
pub struct IwahoriTargets {
    pub lambda: Vec<i64>,
    pub maximal: HashSet<AffineWeylElement>,
    pub admissible: HashSet<AffineWeylElement>,
}

impl IwahoriTargets {
    pub fn new(group: &AffineWeylGroup, lambda: &[i64]) -> Result<Self> {
        Ok(IwahoriTargets {
            lambda: lambda.to_vec(),
            maximal: group.adm_maximal(lambda)?.into_iter().collect(),
            admissible: group.admissible_set(lambda)?.into_iter().collect(),
        })
    }

    pub fn contains(&self, cell: &AffineWeylElement, variant: Variant) -> bool {
        match variant {
            Variant::Open => self.maximal.contains(cell),
            Variant::Closed => self.admissible.contains(cell),
        }
    }
}

/// Open: the cell of `g⁻¹γg` is some `t^{xλ}`; closed: it lies in `Adm(λ)`.
pub fn iwahori_membership(
    datum: &RootDatum,
    g: &LoopMatrix,
    gamma: &LoopMatrix,
    lambda: &[i64],
    variant: Variant,
    working: i64,
) -> Result<bool> {
    let group = AffineWeylGroup::new(datum);
    let targets = IwahoriTargets::new(&group, lambda)?;
    let h = gamma.conjugate_by(g, working)?;
    Ok(targets.contains(&iwahori_cell(datum, &h)?, variant))
}

/// `x_{a_i}(c)`: `1 + c E_{i-1,i}` for a finite node, `1 + c t E_{n-1,0}` for the affine node.
pub fn root_subgroup(n: usize, i: usize, c: &Scalar, group: MatrixGroup) -> LoopMatrix {
    let field = c.field();
    let mut m = LoopMatrix::identity(n, field, group);
    if i == 0 {
        m.set(n - 1, 0, LaurentSeries::constant(field, c.clone()).shift(1));
    } else {
        m.set(i - 1, i, LaurentSeries::constant(field, c.clone()));
    }
    m
}

/// Representative `ṡ_i` of an affine simple reflection, of determinant one.
pub fn simple_representative(n: usize, i: usize, field: CoefficientField, group: MatrixGroup) -> LoopMatrix {
    let mut m = LoopMatrix::identity(n, field, group);
    let zero = LaurentSeries::zero(field);
    let one = LaurentSeries::one(field);
    if i == 0 {
        m.set(0, 0, zero.clone());
        m.set(n - 1, n - 1, zero);
        m.set(n - 1, 0, LaurentSeries::t_pow(field, 1));
        m.set(0, n - 1, LaurentSeries::t_pow(field, -1).neg());
    } else {
        let (a, b) = (i - 1, i);
        m.set(a, a, zero.clone());
        m.set(b, b, zero);
        m.set(b, a, one.clone());
        m.set(a, b, one.neg());
    }
    m
}

/// The length-zero generator of `GL_n`: `e_j ↦ e_{j-1}`, `e_0 ↦ t e_{n-1}`.
pub fn omega_generator(n: usize, field: CoefficientField) -> LoopMatrix {
    let mut m = LoopMatrix { n, entries: vec![LaurentSeries::zero(field); n * n], group: MatrixGroup::GL };
    for j in 1..n {
        m.set(j - 1, j, LaurentSeries::one(field));
    }
    m.set(n - 1, 0, LaurentSeries::t_pow(field, 1));
    m
}

pub fn default_working() -> i64 {
    DEFAULT_PRECISION
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const Q: CoefficientField = CoefficientField::Rationals;
    const W: i64 = 16;

    fn m(rows: &[&[&str]], group: MatrixGroup) -> LoopMatrix {
        let rows: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect();
        LoopMatrix::parse(&rows, Q, None, group).unwrap()
    }

    #[test]
    fn cartan_examples() {
        let gl = MatrixGroup::GL;
        assert_eq!(smith_cartan(&m(&[&["t", "0"], &["0", "1"]], gl), W).unwrap(), vec![1, 0]);
        assert_eq!(smith_cartan(&m(&[&["t", "0"], &["0", "t"]], gl), W).unwrap(), vec![1, 1]);
        for n in 1..=3 {
            let tn = format!("t^{n}");
            let one_minus = format!("1 - {tn}");
            // 1/(1 − tⁿ) as a truncated geometric series
            let geo = LaurentSeries::parse(&one_minus, Q, None).unwrap().inverse(W).unwrap();
            let g = LoopMatrix::from_rows(
                vec![
                    vec![geo, LaurentSeries::one(Q)],
                    vec![LaurentSeries::parse(&one_minus, Q, None).unwrap(), LaurentSeries::parse(&one_minus, Q, None).unwrap()],
                ],
                gl,
            )
            .unwrap();
            assert_eq!(g.det().valuation().unwrap(), Valuation::Finite(n));
            assert_eq!(smith_cartan(&g, W).unwrap(), vec![n, 0]);
        }
    }

    #[test]
    fn representatives_have_expected_cells() {
        for (name, n, group) in [("GL2", 2, MatrixGroup::GL), ("SL2", 2, MatrixGroup::SL), ("SL3", 3, MatrixGroup::SL), ("GL3", 3, MatrixGroup::GL)] {
            let d = RootDatum::preset(name).unwrap();
            let aw = AffineWeylGroup::new(&d);
            for i in 0..aw.num_simple() {
                let s = simple_representative(n, i, Q, group);
                assert_eq!(s.det(), LaurentSeries::one(Q));
                assert_eq!(iwahori_cell(&d, &s).unwrap(), *aw.simple(i), "{name} s{i}");
                assert_eq!(iwahori_cell_fast(&d, &s, W).unwrap(), *aw.simple(i));
                let x = root_subgroup(n, i, &Q.from_i64(3), group);
                assert_eq!(iwahori_cell(&d, &x).unwrap(), aw.identity());
            }
            if group == MatrixGroup::GL {
                let tau = omega_generator(n, Q);
                let cell = iwahori_cell(&d, &tau).unwrap();
                assert_eq!(aw.length(&cell), 0);
                assert_eq!(cell, iwahori_cell_fast(&d, &tau, W).unwrap());
            }
        }
        let gl2 = RootDatum::preset("GL2").unwrap();
        let aw = AffineWeylGroup::new(&gl2);
        let tau = m(&[&["0", "1"], &["t", "0"]], MatrixGroup::GL);
        assert_eq!(iwahori_cell(&gl2, &tau).unwrap(), aw.parse("s1*t^[1,0]").unwrap());
        assert_eq!(iwahori_cell(&gl2, &LoopMatrix::identity(2, Q, MatrixGroup::GL)).unwrap(), aw.identity());
    }

    fn random_iwahori(rng: &mut ChaCha8Rng, n: usize, group: MatrixGroup, field: CoefficientField) -> LoopMatrix {
        let mut g = LoopMatrix::identity(n, field, group);
        for _ in 0..6 {
            let i = rng.gen_range(0..n);
            let c = field.from_i64(rng.gen_range(-3..=3));
            let x = if rng.gen_bool(0.3) {
                // lower-triangular entry divisible by t
                let mut x = LoopMatrix::identity(n, field, group);
                let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
                if a > b {
                    x.set(a, b, LaurentSeries::constant(field, c).shift(rng.gen_range(1..3)));
                }
                x
            } else if i == 0 {
                root_subgroup(n, 0, &c, group)
            } else {
                root_subgroup(n, i, &c, group)
            };
            g = g.mul(&x);
        }
        if group == MatrixGroup::GL {
            let mut diag = vec![LaurentSeries::one(field); n];
            diag[rng.gen_range(0..n)] = LaurentSeries::from_i64s(field, 0, &[2, rng.gen_range(-2..=2)], None);
            g = g.mul(&LoopMatrix::diagonal(diag, group).unwrap());
        }
        g
    }

    #[test]
    fn round_trip_through_random_iwahori_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (name, n, group) in [("GL2", 2, MatrixGroup::GL), ("SL2", 2, MatrixGroup::SL), ("GL3", 3, MatrixGroup::GL), ("SL3", 3, MatrixGroup::SL)] {
            let d = RootDatum::preset(name).unwrap();
            let aw = AffineWeylGroup::new(&d);
            let omegas: Vec<_> = if group == MatrixGroup::GL {
                (-1..=1).map(|k| {
                    let mut mu = vec![0; n];
                    mu[0] = k;
                    aw.omega_in_class(&d.pi1_class(&mu)).unwrap()
                }).collect()
            } else {
                vec![aw.identity()]
            };
            for w in aw.ball(&omegas, 4) {
                let wm = LoopMatrix::monomial(&d, &w, Q, group).unwrap();
                assert_eq!(iwahori_cell(&d, &wm).unwrap(), w);
                for _ in 0..3 {
                    let i1 = random_iwahori(&mut rng, n, group, Q);
                    let i2 = random_iwahori(&mut rng, n, group, Q);
                    let g = i1.mul(&wm).mul(&i2);
                    let slow = iwahori_cell(&d, &g).unwrap();
                    assert_eq!(slow, w, "{name} {}", aw.format(&w));
                    assert_eq!(iwahori_cell_fast(&d, &g, W).unwrap(), slow);
                    // the Iwahori cell refines the spherical cell
                    assert_eq!(smith_cartan(&g, W).unwrap(), d.dominant_conjugate(&w.translation).0);
                }
            }
        }
    }

    #[test]
    fn cartan_by_minors_agrees() {
        let d = RootDatum::preset("GL3").unwrap();
        let aw = AffineWeylGroup::new(&d);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for w in aw.ball(&[aw.identity()], 3) {
            let g = random_iwahori(&mut rng, 3, MatrixGroup::GL, Q)
                .mul(&LoopMatrix::monomial(&d, &w, Q, MatrixGroup::GL).unwrap())
                .mul(&random_iwahori(&mut rng, 3, MatrixGroup::GL, Q));
            assert_eq!(smith_cartan_exact(&g).unwrap(), smith_cartan(&g, W).unwrap());
        }
    }

    #[test]
    fn cartan_of_inverse() {
        let d = RootDatum::preset("GL3").unwrap();
        let aw = AffineWeylGroup::new(&d);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for w in aw.ball(&[aw.identity()], 3) {
            let g = random_iwahori(&mut rng, 3, MatrixGroup::GL, Q).mul(&LoopMatrix::monomial(&d, &w, Q, MatrixGroup::GL).unwrap());
            let c = smith_cartan(&g, W).unwrap();
            let ci = smith_cartan(&g.inverse(W).unwrap(), W).unwrap();
            let expect = d.dominant_conjugate(&d.act_coweight(d.longest_element(), &c).iter().map(|x| -x).collect::<Vec<_>>()).0;
            assert_eq!(ci, expect);
        }
    }

    #[test]
    fn membership_examples() {
        let gl2 = RootDatum::preset("GL2").unwrap();
        let e = LoopMatrix::identity(2, Q, MatrixGroup::GL);
        let gamma = m(&[&["2*t", "0"], &["0", "1 + t"]], MatrixGroup::GL);
        assert!(spherical_membership(&gl2, &e, &gamma, &[1, 0], Variant::Open, W).unwrap());
        assert!(iwahori_membership(&gl2, &e, &gamma, &[1, 0], Variant::Open, W).unwrap());
        assert!(iwahori_membership(&gl2, &e, &gamma, &[1, 0], Variant::Closed, W).unwrap());
        let units = m(&[&["2", "0"], &["0", "1 + t"]], MatrixGroup::GL);
        assert!(!spherical_membership(&gl2, &e, &units, &[1, 0], Variant::Closed, W).unwrap());
        let gl3 = RootDatum::preset("GL3").unwrap();
        let e3 = LoopMatrix::identity(3, Q, MatrixGroup::GL);
        let gamma3 = m(&[&["2*t", "0", "0"], &["0", "1 + t", "0"], &["0", "0", "3"]], MatrixGroup::GL);
        assert!(iwahori_membership(&gl3, &e3, &gamma3, &[1, 0, 0], Variant::Open, W).unwrap());
        assert!(!iwahori_membership(&gl3, &e3, &gamma3, &[2, 0, -1], Variant::Open, W).unwrap());
        let sl2 = RootDatum::preset("SL2").unwrap();
        let u = LaurentSeries::parse("1 + t", Q, None).unwrap();
        let gamma = LoopMatrix::diagonal(vec![u.clone(), u.inverse(W).unwrap()], MatrixGroup::SL).unwrap();
        let g = m(&[&["1", "t^{-1}"], &["0", "1"]], MatrixGroup::SL);
        // g⁻¹γg = [[u, (u − u⁻¹)t⁻¹], [0, u⁻¹]] is integral, so it sits in the closed cell of (1,-1)
        assert!(spherical_membership(&sl2, &g, &gamma, &[1, -1], Variant::Closed, W).unwrap());
        assert!(!spherical_membership(&sl2, &g, &gamma, &[1, -1], Variant::Open, W).unwrap());
    }

    #[test]
    fn precision_errors_surface() {
        let gl2 = RootDatum::preset("GL2").unwrap();
        let g = LoopMatrix::from_rows(
            vec![
                vec![LaurentSeries::parse("O(t^2)", Q, None).unwrap(), LaurentSeries::one(Q)],
                vec![LaurentSeries::one(Q), LaurentSeries::parse("1 + O(t^3)", Q, None).unwrap()],
            ],
            MatrixGroup::GL,
        )
        .unwrap();
        assert!(smith_cartan(&g, W).is_ok());
        let bad = LoopMatrix::new_unchecked(
            2,
            vec![
                LaurentSeries::parse("O(1)", Q, None).unwrap(),
                LaurentSeries::parse("O(1)", Q, None).unwrap(),
                LaurentSeries::parse("O(1)", Q, None).unwrap(),
                LaurentSeries::parse("O(1)", Q, None).unwrap(),
            ],
            MatrixGroup::GL,
        )
        .unwrap();
        assert!(matches!(smith_cartan(&bad, W), Err(Error::InsufficientPrecision(_))));
        assert!(matches!(smith_cartan_exact(&bad), Err(Error::InsufficientPrecision(_))));
        assert!(iwahori_cell(&gl2, &bad).is_err());
    }

    #[test]
    fn exact_cartan_tolerates_deep_unknowns() {
        let rows: Vec<Vec<String>> = [["t", "1"], ["0", "t^2"]].iter().map(|r| r.map(String::from).to_vec()).collect();
        let g = LoopMatrix::parse(&rows, Q, Some(W), MatrixGroup::GL).unwrap();
        assert_eq!(smith_cartan_exact(&g).unwrap(), vec![3, 0]);
    }

    #[test]
    fn matrix_models() {
        assert_eq!(matrix_model(&RootDatum::preset("SL3").unwrap()).unwrap(), (3, MatrixGroup::SL));
        assert!(matches!(matrix_model(&RootDatum::preset("Sp4").unwrap()), Err(Error::UnsupportedType(_))));
        let d = matrix_datum(4, MatrixGroup::SL).unwrap();
        assert_eq!(d.weyl_order(), 24);
        assert_eq!(matrix_model(&d).unwrap(), (4, MatrixGroup::SL));
    }
}
