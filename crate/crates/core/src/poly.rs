//! Weighted-graded commutative polynomial algebras over F₂.
//!
//! A [`Ring`] is an ordered list of named variables with positive degrees.
//! A [`Poly`] is a finite set of [`Monomial`]s (the coefficient 1 is
//! implicit), so addition is symmetric difference.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Variable {
    pub name: String,
    pub degree: u32,
}

impl Variable {
    pub fn new(name: impl Into<String>, degree: u32) -> Self {
        Variable {
            name: name.into(),
            degree,
        }
    }
}

fn valid_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Ordered list of variables; the order fixes the canonical monomial order.
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct Ring {
    vars: Vec<Variable>,
}

impl Ring {
    pub fn new(vars: Vec<Variable>) -> Result<Arc<Ring>> {
        for (i, v) in vars.iter().enumerate() {
            if v.degree == 0 {
                return Err(Error::Degree(format!("variable {} has degree 0", v.name)));
            }
            if !valid_identifier(&v.name) {
                return Err(Error::Parse(format!("invalid variable name {:?}", v.name)));
            }
            if vars[..i].iter().any(|w| w.name == v.name) {
                return Err(Error::Structural(format!("duplicate variable {}", v.name)));
            }
        }
        Ok(Arc::new(Ring { vars }))
    }

    /// Polynomial ring on degree-1 generators, e.g. `H*(BV)`.
    pub fn degree_one<S: AsRef<str>>(names: &[S]) -> Result<Arc<Ring>> {
        Ring::new(names.iter().map(|n| Variable::new(n.as_ref(), 1)).collect())
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    pub fn all_degree_one(&self) -> bool {
        self.vars.iter().all(|v| v.degree == 1)
    }

    pub fn monomial_degree(&self, m: &Monomial) -> u64 {
        m.iter()
            .map(|(v, e)| self.vars[v].degree as u64 * e as u64)
            .sum()
    }

    /// All monomials of degree exactly `d`, in ascending canonical order.
    pub fn basis(&self, d: u64) -> Vec<Monomial> {
        fn go(ring: &Ring, var: usize, left: u64, acc: &mut Vec<(u32, u32)>, out: &mut Vec<Monomial>) {
            if var == ring.vars.len() {
                if left == 0 {
                    out.push(Monomial { exps: acc.clone() });
                }
                return;
            }
            let deg = ring.vars[var].degree as u64;
            let mut e = 0u64;
            while e * deg <= left {
                if e > 0 {
                    acc.push((var as u32, e as u32));
                }
                go(ring, var + 1, left - e * deg, acc, out);
                if e > 0 {
                    acc.pop();
                }
                e += 1;
            }
        }
        let mut out = Vec::new();
        go(self, 0, d, &mut Vec::new(), &mut out);
        out.sort();
        out
    }
}

/// A monomial; only nonzero exponents are stored, sorted by variable.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    exps: Vec<(u32, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(index: usize) -> Self {
        Monomial::var_pow(index, 1)
    }

    pub fn var_pow(index: usize, exp: u32) -> Self {
        if exp == 0 {
            Monomial::one()
        } else {
            Monomial {
                exps: vec![(index as u32, exp)],
            }
        }
    }

    /// Builds a monomial from a dense exponent vector.
    pub fn from_dense(exps: &[u32]) -> Self {
        Monomial {
            exps: exps
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| (i as u32, e))
                .collect(),
        }
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exp(&self, var: usize) -> u32 {
        self.exps
            .iter()
            .find(|(v, _)| *v as usize == var)
            .map_or(0, |(_, e)| *e)
    }

    /// `(variable index, exponent)` pairs with nonzero exponent.
    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.exps.iter().map(|&(v, e)| (v as usize, e))
    }

    pub fn to_dense(&self, nvars: usize) -> Vec<u32> {
        let mut out = vec![0; nvars];
        for (v, e) in self.iter() {
            out[v] = e;
        }
        out
    }

    pub fn mul(&self, other: &Monomial) -> Result<Monomial> {
        let mut exps = Vec::with_capacity(self.exps.len() + other.exps.len());
        let (mut i, mut j) = (0, 0);
        while i < self.exps.len() || j < other.exps.len() {
            match (self.exps.get(i), other.exps.get(j)) {
                (Some(&(va, ea)), Some(&(vb, eb))) if va == vb => {
                    exps.push((va, ea.checked_add(eb).ok_or(Error::Overflow)?));
                    i += 1;
                    j += 1;
                }
                (Some(&a), Some(&b)) if a.0 < b.0 => {
                    exps.push(a);
                    i += 1;
                }
                (Some(_), Some(&b)) => {
                    exps.push(b);
                    j += 1;
                }
                (Some(&a), None) => {
                    exps.push(a);
                    i += 1;
                }
                (None, Some(&b)) => {
                    exps.push(b);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Ok(Monomial { exps })
    }

    pub fn pow(&self, k: u32) -> Result<Monomial> {
        if k == 0 {
            return Ok(Monomial::one());
        }
        let exps = self
            .exps
            .iter()
            .map(|&(v, e)| e.checked_mul(k).map(|e| (v, e)).ok_or(Error::Overflow))
            .collect::<Result<_>>()?;
        Ok(Monomial { exps })
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut exps = Vec::with_capacity(self.exps.len());
        let mut j = 0;
        for &(v, e) in &self.exps {
            let mut e = e;
            if let Some(&(w, f)) = other.exps.get(j) {
                if w < v {
                    return None;
                }
                if w == v {
                    e = e.checked_sub(f)?;
                    j += 1;
                }
            }
            if e > 0 {
                exps.push((v, e));
            }
        }
        if j < other.exps.len() {
            return None;
        }
        Some(Monomial { exps })
    }
}

impl Ord for Monomial {
    /// Lexicographic on the dense exponent vector, first variable most significant.
    fn cmp(&self, other: &Self) -> Ordering {
        let (mut i, mut j) = (0, 0);
        loop {
            let a = self.exps.get(i);
            let b = other.exps.get(j);
            match (a, b) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(va, ea)), Some(&(vb, eb))) => {
                    if va < vb {
                        return Ordering::Greater;
                    }
                    if vb < va {
                        return Ordering::Less;
                    }
                    match ea.cmp(&eb) {
                        Ordering::Equal => {
                            i += 1;
                            j += 1;
                        }
                        ord => return ord,
                    }
                }
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exps)
    }
}

/// Element of a graded polynomial algebra over F₂.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    ring: Arc<Ring>,
    terms: BTreeSet<Monomial>,
}

fn same_ring(a: &Arc<Ring>, b: &Arc<Ring>) -> Result<()> {
    if Arc::ptr_eq(a, b) || **a == **b {
        Ok(())
    } else {
        Err(Error::Structural(format!(
            "{:?} vs {:?}",
            a.vars.iter().map(|v| &v.name).collect::<Vec<_>>(),
            b.vars.iter().map(|v| &v.name).collect::<Vec<_>>()
        )))
    }
}

impl Poly {
    pub fn zero(ring: &Arc<Ring>) -> Self {
        Poly {
            ring: ring.clone(),
            terms: BTreeSet::new(),
        }
    }

    pub fn one(ring: &Arc<Ring>) -> Self {
        Poly::from_monomial(ring, Monomial::one())
    }

    pub fn from_monomial(ring: &Arc<Ring>, m: Monomial) -> Self {
        Poly {
            ring: ring.clone(),
            terms: BTreeSet::from([m]),
        }
    }

    /// Sum of the given monomials with F₂ cancellation of repeats.
    pub fn from_terms(ring: &Arc<Ring>, terms: impl IntoIterator<Item = Monomial>) -> Self {
        let mut p = Poly::zero(ring);
        for m in terms {
            p.toggle(m);
        }
        p
    }

    pub fn var(ring: &Arc<Ring>, name: &str) -> Result<Self> {
        let i = ring
            .var_index(name)
            .ok_or_else(|| Error::Parse(format!("unknown variable {name}")))?;
        Ok(Poly::from_monomial(ring, Monomial::var(i)))
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = &Monomial> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeSet<Monomial> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        self.terms.contains(m)
    }

    /// Adds a single monomial in place.
    pub fn toggle(&mut self, m: Monomial) {
        if !self.terms.remove(&m) {
            self.terms.insert(m);
        }
    }

    pub fn add_assign(&mut self, other: &Poly) -> Result<()> {
        same_ring(&self.ring, &other.ring)?;
        for m in &other.terms {
            self.toggle(m.clone());
        }
        Ok(())
    }

    pub fn add(&self, other: &Poly) -> Result<Poly> {
        let mut out = self.clone();
        out.add_assign(other)?;
        Ok(out)
    }

    pub fn mul(&self, other: &Poly) -> Result<Poly> {
        same_ring(&self.ring, &other.ring)?;
        let mut out = Poly::zero(&self.ring);
        for a in &self.terms {
            for b in &other.terms {
                out.toggle(a.mul(b)?);
            }
        }
        Ok(out)
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Result<Poly> {
        let terms = self.terms.iter().map(|a| a.mul(m)).collect::<Result<BTreeSet<_>>>()?;
        Ok(Poly {
            ring: self.ring.clone(),
            terms,
        })
    }

    /// Frobenius: squaring doubles every exponent.
    pub fn square(&self) -> Result<Poly> {
        let terms = self.terms.iter().map(|m| m.pow(2)).collect::<Result<BTreeSet<_>>>()?;
        Ok(Poly {
            ring: self.ring.clone(),
            terms,
        })
    }

    pub fn pow(&self, mut k: u32) -> Result<Poly> {
        let mut base = self.clone();
        let mut acc = Poly::one(&self.ring);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.square()?;
            }
        }
        Ok(acc)
    }

    pub fn monomial_degree(&self, m: &Monomial) -> u64 {
        self.ring.monomial_degree(m)
    }

    /// Degree if the polynomial is nonzero and homogeneous.
    pub fn degree(&self) -> Option<u64> {
        let mut degs = self.terms.iter().map(|m| self.ring.monomial_degree(m));
        let d = degs.next()?;
        degs.all(|e| e == d).then_some(d)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.degree().is_some()
    }

    pub fn homogeneous_part(&self, d: u64) -> Poly {
        Poly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|m| self.ring.monomial_degree(m) == d)
                .cloned()
                .collect(),
        }
    }

    /// Homogeneous components keyed by degree.
    pub fn components(&self) -> BTreeMap<u64, Poly> {
        let mut out: BTreeMap<u64, Poly> = BTreeMap::new();
        for m in &self.terms {
            let d = self.ring.monomial_degree(m);
            out.entry(d).or_insert_with(|| Poly::zero(&self.ring)).terms.insert(m.clone());
        }
        out
    }

    /// Ring homomorphism determined by `images` (keyed by variable name).
    ///
    /// Unmapped variables are sent to the variable of the same name in the
    /// target ring. Every image must be zero or homogeneous of its variable's
    /// degree.
    pub fn substitute(&self, images: &BTreeMap<String, Poly>) -> Result<Poly> {
        let target = match images.values().next() {
            Some(p) => p.ring.clone(),
            None => return Ok(self.clone()),
        };
        let mut table: Vec<Poly> = Vec::with_capacity(self.ring.len());
        for var in &self.ring.vars {
            let image = match images.get(&var.name) {
                Some(p) => {
                    same_ring(&target, &p.ring)?;
                    if !p.is_zero() && p.degree() != Some(var.degree as u64) {
                        return Err(Error::Degree(format!(
                            "image of {} must be homogeneous of degree {}, got {}",
                            var.name, var.degree, p
                        )));
                    }
                    p.clone()
                }
                None => {
                    let i = target.var_index(&var.name).ok_or_else(|| {
                        Error::Structural(format!("{} has no image in the target ring", var.name))
                    })?;
                    if target.vars[i].degree != var.degree {
                        return Err(Error::Degree(format!("{} changes degree under identity image", var.name)));
                    }
                    Poly::from_monomial(&target, Monomial::var(i))
                }
            };
            table.push(image);
        }
        self.substitute_table(&target, &table)
    }

    /// Substitution with images given positionally (one per variable of the
    /// source ring); no degree checking.
    pub fn substitute_table(&self, target: &Arc<Ring>, table: &[Poly]) -> Result<Poly> {
        assert_eq!(table.len(), self.ring.len());
        let mut powers: BTreeMap<(usize, u32), Poly> = BTreeMap::new();
        let mut out = Poly::zero(target);
        for m in &self.terms {
            let mut acc = Poly::one(target);
            for (v, e) in m.iter() {
                let pw = match powers.get(&(v, e)) {
                    Some(p) => p.clone(),
                    None => {
                        let p = table[v].pow(e)?;
                        powers.insert((v, e), p.clone());
                        p
                    }
                };
                acc = acc.mul(&pw)?;
                if acc.is_zero() {
                    break;
                }
            }
            out.add_assign(&acc)?;
        }
        Ok(out)
    }

    pub fn parse(ring: &Arc<Ring>, text: &str) -> Result<Poly> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut out = Poly::zero(ring);
        if compact == "0" {
            return Ok(out);
        }
        for term in compact.split('+') {
            if term.is_empty() {
                return Err(Error::Parse(format!("empty term in {text:?}")));
            }
            let mut m = Monomial::one();
            for factor in term.split('*') {
                let (name, exp) = match factor.split_once('^') {
                    Some((n, e)) => (
                        n,
                        e.parse::<u32>()
                            .map_err(|_| Error::Parse(format!("bad exponent in {factor:?}")))?,
                    ),
                    None => (factor, 1),
                };
                if name == "1" {
                    continue;
                }
                let i = ring
                    .var_index(name)
                    .ok_or_else(|| Error::Parse(format!("unknown variable {name:?}")))?;
                m = m.mul(&Monomial::var_pow(i, exp))?;
            }
            out.toggle(m);
        }
        Ok(out)
    }

    /// Largest monomial dividing every term (`1` for zero).
    pub fn monomial_gcd(&self) -> Monomial {
        let mut it = self.terms.iter();
        let Some(first) = it.next() else {
            return Monomial::one();
        };
        let mut g: Vec<(u32, u32)> = first.exps.clone();
        for m in it {
            g = g
                .into_iter()
                .filter_map(|(v, e)| match m.exp(v as usize) {
                    0 => None,
                    f => Some((v, e.min(f))),
                })
                .collect();
        }
        Monomial { exps: g }
    }

    /// Display with the common monomial factor pulled out, as in `u*v*(u^3 + v^3)`.
    pub fn factored(&self) -> String {
        let g = self.monomial_gcd();
        if g.is_one() || self.terms.len() < 2 {
            return self.to_string();
        }
        let rest = Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|m| m.div(&g).expect("gcd divides")).collect(),
        };
        format!("{}*({rest})", Poly::format_monomial(&self.ring, &g))
    }

    pub fn format_monomial(ring: &Ring, m: &Monomial) -> String {
        if m.is_one() {
            return "1".into();
        }
        m.iter()
            .map(|(v, e)| {
                let name = &ring.vars[v].name;
                if e == 1 {
                    name.clone()
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|m| Poly::format_monomial(&self.ring, m))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

/// Dimensions of the degree-`d` parts, `d = 0..=cap`, of the free graded
/// commutative algebra on generators of the given degrees.
pub fn free_algebra_dims(generator_degrees: &[u32], cap: usize) -> Vec<u64> {
    let mut dims = vec![0u64; cap + 1];
    dims[0] = 1;
    for &g in generator_degrees {
        assert!(g >= 1, "generator degrees must be positive");
        let g = g as usize;
        for d in g..=cap {
            dims[d] = dims[d]
                .checked_add(dims[d - g])
                .expect("dimension exceeds u64");
        }
    }
    dims
}
