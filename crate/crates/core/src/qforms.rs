//! Quadratic forms over F₂.
//!
//! A form on `Vₙ` is `Σ_{i≤j} c_ij x_i x_j`, stored as a bitmask over the
//! upper-triangular coefficient table in row-major order (`c₁₁` is bit 0,
//! then `c₁₂, …, c₁ₙ, c₂₂, …`). Vectors of `F₂ⁿ` are bitmasks with `x₁` in
//! bit 0.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{Monomial, Poly, Ring};

/// Largest ambient dimension accepted by [`QuadraticForm`].
pub const MAX_DIM: usize = 10;
/// Largest dimension for exhaustive orbit and classification searches.
pub const MAX_CENSUS_DIM: usize = 4;

#[inline]
fn tri_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i <= j && j < n);
    // row i starts after Σ_{r<i} (n − r) entries
    i * (2 * n - i + 1) / 2 + (j - i)
}

pub fn coeff_count(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Default variable names: `u, v, w` up to dimension 3, then `u…z`, then `x1…`.
pub fn default_names(n: usize) -> Vec<String> {
    const SHORT: [&str; 6] = ["u", "v", "w", "x", "y", "z"];
    if n <= SHORT.len() {
        SHORT[..n].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=n).map(|i| format!("x{i}")).collect()
    }
}

pub fn default_ring(n: usize) -> Arc<Ring> {
    Ring::degree_one(&default_names(n)).expect("valid default names")
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadraticForm {
    n: u8,
    bits: u64,
}

/// A linear map `V_m → V_n`, stored as `n` rows of `m`-bit masks: the `i`-th
/// coordinate of the image of `y` is `⟨row_i, y⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearMap {
    pub source_dim: usize,
    pub rows: Vec<u32>,
}

impl LinearMap {
    pub fn target_dim(&self) -> usize {
        self.rows.len()
    }

    /// Every linear map `V_m → V_n`.
    pub fn all(source_dim: usize, target_dim: usize) -> impl Iterator<Item = LinearMap> {
        let total = source_dim * target_dim;
        assert!(total < 32, "too many linear maps to enumerate");
        let mask = (1u32 << source_dim) - 1;
        (0u32..(1u32 << total)).map(move |code| LinearMap {
            source_dim,
            rows: (0..target_dim)
                .map(|i| (code >> (i * source_dim)) & mask)
                .collect(),
        })
    }

    /// Transvections `x_i ↦ x_i + x_j` generating `GL_n(F₂)`.
    pub fn transvections(n: usize) -> Vec<LinearMap> {
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let rows = (0..n)
                        .map(|r| if r == i { (1 << i) | (1 << j) } else { 1 << r })
                        .collect();
                    out.push(LinearMap { source_dim: n, rows });
                }
            }
        }
        out
    }

    pub fn apply(&self, y: u32) -> u32 {
        self.rows
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &r)| acc | ((((r & y).count_ones()) & 1) << i))
    }

    pub fn is_invertible(&self) -> bool {
        self.source_dim == self.rows.len() && mask_rank(&self.rows) == self.rows.len()
    }
}

fn mask_rank(rows: &[u32]) -> usize {
    let mut rows = rows.to_vec();
    let mut rank = 0;
    for bit in 0..32 {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r] >> bit & 1 == 1) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank];
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && *row >> bit & 1 == 1 {
                *row ^= pivot;
            }
        }
        rank += 1;
    }
    rank
}

/// Basis of the kernel of the symmetric matrix with the given rows.
fn mask_kernel(rows: &[u32], n: usize) -> Vec<u32> {
    (0u32..(1 << n))
        .filter(|&x| rows.iter().all(|&r| (r & x).count_ones() % 2 == 0))
        .fold(Vec::new(), |mut basis: Vec<u32>, x| {
            let mut probe = basis.clone();
            probe.push(x);
            if mask_rank(&probe) == probe.len() {
                basis.push(x);
            }
            basis
        })
}

impl QuadraticForm {
    pub fn new(n: usize, bits: u64) -> Result<Self> {
        if n > MAX_DIM {
            return Err(Error::Resource(format!("forms are limited to dimension {MAX_DIM}")));
        }
        let count = coeff_count(n);
        if count < 64 && bits >> count != 0 {
            return Err(Error::Contract(format!("coefficient mask {bits:#x} too wide for dimension {n}")));
        }
        Ok(QuadraticForm { n: n as u8, bits })
    }

    pub fn zero(n: usize) -> Self {
        QuadraticForm::new(n, 0).expect("dimension within bounds")
    }

    /// Every form on `Vₙ`, in ascending mask order.
    pub fn all(n: usize) -> impl Iterator<Item = QuadraticForm> {
        let count = coeff_count(n);
        assert!(count < 32, "too many forms to enumerate");
        (0u64..(1u64 << count)).map(move |bits| QuadraticForm { n: n as u8, bits })
    }

    pub fn dim(&self) -> usize {
        self.n as usize
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn coeff(&self, i: usize, j: usize) -> bool {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.bits >> tri_index(self.dim(), i, j) & 1 == 1
    }

    fn with_coeff(mut self, i: usize, j: usize, value: bool) -> Self {
        let k = tri_index(self.dim(), i.min(j), i.max(j));
        if value {
            self.bits |= 1 << k;
        } else {
            self.bits &= !(1 << k);
        }
        self
    }

    /// `q(x)` for `x ∈ F₂ⁿ` given as a bitmask.
    pub fn eval(&self, x: u32) -> bool {
        let n = self.dim();
        let mut acc = false;
        for i in 0..n {
            if x >> i & 1 == 0 {
                continue;
            }
            for j in i..n {
                if x >> j & 1 == 1 && self.coeff(i, j) {
                    acc = !acc;
                }
            }
        }
        acc
    }

    /// Polarization `b(x, y) = q(x+y) + q(x) + q(y)`.
    pub fn polar(&self, x: u32, y: u32) -> bool {
        self.eval(x ^ y) ^ self.eval(x) ^ self.eval(y)
    }

    /// Rows of the alternating Gram matrix of the polarization.
    pub fn polar_rows(&self) -> Vec<u32> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| j != i && self.coeff(i, j))
                    .fold(0u32, |acc, j| acc | 1 << j)
            })
            .collect()
    }

    pub fn polar_rank(&self) -> usize {
        mask_rank(&self.polar_rows())
    }

    /// Basis of the radical of the polarization.
    pub fn radical(&self) -> Vec<u32> {
        mask_kernel(&self.polar_rows(), self.dim())
    }

    /// `q` is nonzero somewhere on the radical of its polarization.
    pub fn is_defective(&self) -> bool {
        self.radical().iter().any(|&x| self.eval(x))
    }

    pub fn zero_count(&self) -> u64 {
        (0u32..(1 << self.dim())).filter(|&x| !self.eval(x)).count() as u64
    }

    /// Arf invariant of a nondegenerate form, by counting zeros:
    /// `#{q = 0} = 2^{n−1} + 2^{n/2−1}` exactly when the invariant is 0.
    pub fn arf(&self) -> Result<u8> {
        let n = self.dim();
        if self.polar_rank() != n {
            return Err(Error::Contract(format!("arf needs a nondegenerate form, {self} has polar rank {}", self.polar_rank())));
        }
        if n == 0 {
            return Ok(0);
        }
        let split = (1u64 << (n - 1)) + (1u64 << (n / 2 - 1));
        Ok(if self.zero_count() == split { 0 } else { 1 })
    }

    /// Arf invariant of a nondefective form by symplectic-basis reduction:
    /// `Σ q(e_i) q(f_i)` over a symplectic basis of a complement of the radical.
    pub fn arf_by_reduction(&self) -> Result<u8> {
        if self.is_defective() {
            return Err(Error::Contract(format!("{self} is defective")));
        }
        let mut space: Vec<u32> = (0..self.dim()).map(|i| 1 << i).collect();
        let mut arf = false;
        loop {
            let pair = space.iter().find_map(|&e| {
                space.iter().find(|&&f| self.polar(e, f)).map(|&f| (e, f))
            });
            let Some((e, f)) = pair else { break };
            arf ^= self.eval(e) & self.eval(f);
            let projected: Vec<u32> = space
                .iter()
                .map(|&w| {
                    let mut w2 = w;
                    if self.polar(w, f) {
                        w2 ^= e;
                    }
                    if self.polar(w, e) {
                        w2 ^= f;
                    }
                    w2
                })
                .collect();
            space = projected.into_iter().fold(Vec::new(), |mut basis, x| {
                let mut probe = basis.clone();
                probe.push(x);
                if x != 0 && mask_rank(&probe) == probe.len() {
                    basis.push(x);
                }
                basis
            });
        }
        Ok(arf as u8)
    }

    /// `φ*(q) = q ∘ φ` for `φ: V_m → V_n`.
    pub fn pullback(&self, map: &LinearMap) -> QuadraticForm {
        assert_eq!(map.target_dim(), self.dim(), "pullback along a map with the wrong target");
        let m = map.source_dim;
        let n = self.dim();
        let mut out = QuadraticForm::zero(m);
        let a = |i: usize, k: usize| map.rows[i] >> k & 1 == 1;
        for i in 0..n {
            for j in i..n {
                if !self.coeff(i, j) {
                    continue;
                }
                if i == j {
                    for k in 0..m {
                        if a(i, k) {
                            out = out.with_coeff(k, k, !out.coeff(k, k));
                        }
                    }
                } else {
                    for k in 0..m {
                        if a(i, k) && a(j, k) {
                            out = out.with_coeff(k, k, !out.coeff(k, k));
                        }
                        for l in k + 1..m {
                            if (a(i, k) && a(j, l)) ^ (a(i, l) && a(j, k)) {
                                out = out.with_coeff(k, l, !out.coeff(k, l));
                            }
                        }
                    }
                }
            }
        }
        out
    }

    pub fn to_poly(&self, ring: &Arc<Ring>) -> Result<Poly> {
        if ring.len() != self.dim() || !ring.all_degree_one() {
            return Err(Error::Structural(format!(
                "form on V_{} needs a ring of {} degree-1 variables",
                self.dim(),
                self.dim()
            )));
        }
        let n = self.dim();
        let mut terms = Vec::new();
        for i in 0..n {
            for j in i..n {
                if self.coeff(i, j) {
                    let m = if i == j {
                        Monomial::var_pow(i, 2)
                    } else {
                        Monomial::var(i).mul(&Monomial::var(j))?
                    };
                    terms.push(m);
                }
            }
        }
        Ok(Poly::from_terms(ring, terms))
    }

    pub fn to_default_poly(&self) -> Poly {
        self.to_poly(&default_ring(self.dim())).expect("default ring matches")
    }

    pub fn from_poly(p: &Poly) -> Result<QuadraticForm> {
        let ring = p.ring();
        if !ring.all_degree_one() {
            return Err(Error::UnsupportedAlgebra("forms live in degree-1 polynomial rings".into()));
        }
        if !p.is_zero() && p.degree() != Some(2) {
            return Err(Error::Degree(format!("{p} is not a quadratic form")));
        }
        let mut q = QuadraticForm::new(ring.len(), 0)?;
        for m in p.terms() {
            let vars: Vec<(usize, u32)> = m.iter().collect();
            q = match vars.as_slice() {
                [(i, 2)] => q.with_coeff(*i, *i, true),
                [(i, 1), (j, 1)] => q.with_coeff(*i, *j, true),
                _ => unreachable!("degree-2 monomial"),
            };
        }
        Ok(q)
    }

    /// Parses a form in the default variables of `Vₙ`, e.g. `u^2 + u*v + v^2`.
    pub fn parse(n: usize, text: &str) -> Result<QuadraticForm> {
        QuadraticForm::from_poly(&Poly::parse(&default_ring(n), text)?)
    }

    /// Upper-triangular coefficient string `c₁₁ c₁₂ … cₙₙ`.
    pub fn bit_string(&self) -> String {
        (0..coeff_count(self.dim()))
            .map(|k| if self.bits >> k & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    /// Rank, defect and Arf invariant; these determine the `GL_n` orbit.
    pub fn invariants(&self) -> FormInvariants {
        let rank = self.polar_rank();
        let defective = self.is_defective();
        let arf = if defective {
            None
        } else {
            // radical of dimension k = n − rank; zeros = 2^k (2^{2s−1} ± 2^{s−1}), rank = 2s
            let k = (self.dim() - rank) as u32;
            let s = (rank / 2) as u32;
            let split_twice = (1u64 << k) * ((1u64 << (2 * s)) + (1u64 << s));
            Some(if 2 * self.zero_count() == split_twice { 0 } else { 1 })
        };
        FormInvariants { rank, defective, arf }
    }

    /// Rank, defect, Arf and the canonical representative of the orbit.
    pub fn classify(&self) -> Result<FormClass> {
        if self.dim() > MAX_CENSUS_DIM + 1 {
            return Err(Error::Resource(format!(
                "canonical representatives are searched up to dimension {}",
                MAX_CENSUS_DIM + 1
            )));
        }
        let inv = self.invariants();
        let representative = QuadraticForm::all(self.dim())
            .find(|q| q.invariants() == inv)
            .expect("the form itself matches");
        Ok(FormClass {
            rank: inv.rank,
            defective: inv.defective,
            arf: inv.arf,
            representative,
        })
    }
}

impl fmt::Display for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_default_poly())
    }
}

impl fmt::Debug for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuadraticForm[{}]({})", self.dim(), self)
    }
}

impl Serialize for QuadraticForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FormInvariants {
    pub rank: usize,
    pub defective: bool,
    pub arf: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FormClass {
    pub rank: usize,
    pub defective: bool,
    /// `None` for defective forms.
    pub arf: Option<u8>,
    pub representative: QuadraticForm,
}

impl FormClass {
    pub fn label(&self) -> String {
        match (self.defective, self.arf) {
            (true, _) => format!("rank {} defective", self.rank),
            (false, Some(a)) => format!("rank {} arf {a}", self.rank),
            (false, None) => unreachable!("nondefective forms carry an Arf invariant"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitRecord {
    pub class: FormClass,
    pub size: usize,
    pub members: Vec<QuadraticForm>,
}

/// `GL_n(F₂)`-orbits on `S²(Vₙ^#)`, found by closing each form under
/// transvections. Sorted by canonical representative.
pub fn orbit_census(n: usize) -> Result<Vec<OrbitRecord>> {
    if n > MAX_CENSUS_DIM {
        return Err(Error::Resource(format!("orbit census is limited to n ≤ {MAX_CENSUS_DIM}")));
    }
    let gens = LinearMap::transvections(n);
    let total = 1usize << coeff_count(n);
    let mut orbit_of = vec![usize::MAX; total];
    let mut orbits: Vec<Vec<QuadraticForm>> = Vec::new();
    for q in QuadraticForm::all(n) {
        if orbit_of[q.bits as usize] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        let mut members = vec![q];
        orbit_of[q.bits as usize] = id;
        let mut k = 0;
        while k < members.len() {
            let cur = members[k];
            for g in &gens {
                let next = cur.pullback(g);
                if orbit_of[next.bits as usize] == usize::MAX {
                    orbit_of[next.bits as usize] = id;
                    members.push(next);
                }
            }
            k += 1;
        }
        members.sort();
        orbits.push(members);
    }
    let mut records: Vec<OrbitRecord> = orbits
        .into_iter()
        .map(|members| {
            let inv = members[0].invariants();
            OrbitRecord {
                class: FormClass {
                    rank: inv.rank,
                    defective: inv.defective,
                    arf: inv.arf,
                    representative: members[0],
                },
                size: members.len(),
                members,
            }
        })
        .collect();
    records.sort_by_key(|r| r.class.representative);
    Ok(records)
}

/// Pullback closure of a list of generating forms in dimension `m`:
/// `{ φ*(g) : g generator on V_k, φ: V_m → V_k }`.
pub fn pullback_closure(generators: &[QuadraticForm], m: usize) -> BTreeMap<u64, QuadraticForm> {
    let mut out = BTreeMap::new();
    let zero = QuadraticForm::zero(m);
    out.insert(zero.bits, zero);
    for g in generators {
        for phi in LinearMap::all(m, g.dim()) {
            let q = g.pullback(&phi);
            out.insert(q.bits, q);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: usize, s: &str) -> QuadraticForm {
        QuadraticForm::parse(n, s).unwrap()
    }

    #[test]
    fn indexing_is_row_major_upper_triangular() {
        let n = 4;
        let mut seen = Vec::new();
        for i in 0..n {
            for j in i..n {
                seen.push(tri_index(n, i, j));
            }
        }
        assert_eq!(seen, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn polar_rank_examples() {
        assert_eq!(q(2, "u^2").polar_rank(), 0);
        assert_eq!(q(2, "u*v").polar_rank(), 2);
        // u₁v₁ + u₂v₂ + w² on V₅
        let f = QuadraticForm::parse(5, "u*v + w*x + y^2").unwrap();
        assert_eq!(f.polar_rank(), 4);
    }

    #[test]
    fn arf_examples() {
        assert_eq!(q(2, "u*v").arf().unwrap(), 0);
        assert_eq!(q(2, "u^2 + u*v + v^2").arf().unwrap(), 1);
        let h2 = QuadraticForm::parse(4, "u*v + w*x").unwrap();
        assert_eq!(h2.zero_count(), 10);
        assert_eq!(h2.arf().unwrap(), 0);
        assert!(matches!(q(2, "u^2").arf(), Err(Error::Contract(_))));
        assert!(matches!(q(3, "u*v + w^2").arf(), Err(Error::Contract(_))));
    }

    #[test]
    fn arf_by_reduction_agrees_on_full_rank() {
        for n in [2, 4] {
            for f in QuadraticForm::all(n) {
                if f.polar_rank() == n {
                    assert_eq!(f.arf().unwrap(), f.arf_by_reduction().unwrap(), "{f}");
                }
            }
        }
    }

    #[test]
    fn classify_examples() {
        let zero = QuadraticForm::zero(2).classify().unwrap();
        assert_eq!((zero.rank, zero.defective, zero.arf), (0, false, Some(0)));
        assert!(zero.representative.is_zero());

        let c = q(3, "u^2 + u*v + v^2 + w^2").classify().unwrap();
        assert_eq!((c.rank, c.defective, c.arf), (2, true, None));
        assert_eq!(c, q(3, "u*v + w^2").classify().unwrap());

        let c4 = QuadraticForm::parse(4, "u*v + w*x + w^2").unwrap().classify().unwrap();
        assert_eq!(c4.rank, 4);
        assert!(!c4.defective);
    }

    #[test]
    fn census_small() {
        let c1 = orbit_census(1).unwrap();
        assert_eq!(c1.len(), 2);
        let c2 = orbit_census(2).unwrap();
        assert_eq!(c2.len(), 4);
        assert_eq!(c2.iter().map(|r| r.size).sum::<usize>(), 8);
        let reps: Vec<String> = c2.iter().map(|r| r.class.representative.to_string()).collect();
        assert_eq!(reps, vec!["0", "u^2", "u*v", "u^2 + u*v + v^2"]);
        let c3 = orbit_census(3).unwrap();
        assert_eq!(c3.iter().map(|r| r.size).sum::<usize>(), 64);
        assert_eq!(c3.len(), 5);
        assert!(matches!(orbit_census(5), Err(Error::Resource(_))));
    }

    #[test]
    fn pullback_matches_polynomial_substitution() {
        let f = q(3, "u*v + v*w + w^2 + u^2");
        let ring3 = default_ring(3);
        let ring2 = default_ring(2);
        for phi in LinearMap::all(2, 3) {
            let images: BTreeMap<String, Poly> = default_names(3)
                .into_iter()
                .zip(&phi.rows)
                .map(|(name, &row)| {
                    let lin = Poly::from_terms(&ring2, (0..2).filter(|k| row >> k & 1 == 1).map(Monomial::var));
                    (name, lin)
                })
                .collect();
            let via_poly = f.to_poly(&ring3).unwrap().substitute(&images).unwrap();
            assert_eq!(f.pullback(&phi).to_poly(&ring2).unwrap(), via_poly);
        }
    }

    #[test]
    fn eval_matches_pullback_definition() {
        let f = q(3, "u*v + w^2");
        for phi in LinearMap::all(2, 3) {
            let g = f.pullback(&phi);
            for y in 0..4 {
                assert_eq!(g.eval(y), f.eval(phi.apply(y)));
            }
        }
    }

    #[test]
    fn from_poly_rejects_non_quadratic() {
        let r = default_ring(2);
        assert!(matches!(QuadraticForm::from_poly(&Poly::parse(&r, "u").unwrap()), Err(Error::Degree(_))));
        assert!(QuadraticForm::new(2, 1 << 3).is_err());
        assert!(matches!(QuadraticForm::new(11, 0), Err(Error::Resource(_))));
    }
}
