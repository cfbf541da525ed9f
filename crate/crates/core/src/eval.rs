//! Classes of `H*(K_2)` as natural operations `S²(V^#) → S^p(V^#)`.
//!
//! A class `ψ` is a polynomial in `ι₂, q₀, q₁, …` with `q_i = Q_i(ι₂)`.
//! Evaluating it on a quadratic form `s` substitutes `ι₂ ↦ s` and
//! `q_i ↦ Q_i(s)`. The forms sent to zero make up a subfunctor of `S²`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use serde::Serialize;

use crate::action::milnor_q;
use crate::algebra::KnCohomology;
use crate::error::{Error, Result};
use crate::gf2::{BitVec, Subspace};
use crate::poly::{Monomial, Poly, Ring, Variable};
use crate::qforms::{default_ring, pullback_closure, QuadraticForm};

/// Default bound on the dimension for exhaustive kernel enumeration.
pub const DEFAULT_KERNEL_DIM: usize = 4;
/// Hard bound: `2^{n(n+1)/2}` forms are enumerated.
pub const MAX_KERNEL_DIM: usize = 5;

/// `d₂ = ι₂ q₀ + q₁`, the class whose kernel is generated by `u² + uv + v²`.
pub const D2: &str = "i2*q0 + q1";
/// `h₂ = ι₂² q₁ + q₀³ + ι₂³ q₀`, the class whose kernel is generated by `uv`.
pub const H2: &str = "i2^2*q1 + q0^3 + i2^3*q0";

static K2: OnceLock<KnCohomology> = OnceLock::new();

/// The shared presentation of `H*(K_2)` used for operation classes.
pub fn k2() -> &'static KnCohomology {
    K2.get_or_init(KnCohomology::k2)
}

/// Index `i` of the generator `q_i`, or `None` for `ι₂`.
fn milnor_index(name: &str) -> Option<u32> {
    name.strip_prefix('q').and_then(|s| s.parse().ok())
}

#[derive(Clone, PartialEq, Eq)]
pub struct OperationClass {
    pub source_degree: u32,
    pub target_degree: u64,
    pub expression: Poly,
}

impl OperationClass {
    pub fn new(expression: Poly) -> Result<Self> {
        let ring = k2().ring();
        if !Arc::ptr_eq(expression.ring(), ring) && **expression.ring() != **ring {
            return Err(Error::Structural("operation classes live in H*(K_2)".into()));
        }
        let p = expression
            .degree()
            .ok_or_else(|| Error::Degree(format!("{expression} is zero or not homogeneous")))?;
        if p <= 2 {
            return Err(Error::Contract(format!("target degree {p} must exceed the source degree 2")));
        }
        Ok(OperationClass {
            source_degree: 2,
            target_degree: p,
            expression,
        })
    }

    /// Parses a class in `i2, q0, q1, …`; the aliases `d2` and `h2` may be
    /// used as factors.
    pub fn parse(text: &str) -> Result<Self> {
        let base = k2().ring();
        let mut vars: Vec<Variable> = base.vars().to_vec();
        vars.push(Variable::new("d2", 5));
        vars.push(Variable::new("h2", 9));
        let extended = Ring::new(vars)?;
        let raw = Poly::parse(&extended, text)?;
        let mut table: Vec<Poly> = base
            .vars()
            .iter()
            .enumerate()
            .map(|(i, _)| Poly::from_monomial(base, Monomial::var(i)))
            .collect();
        table.push(Poly::parse(base, D2)?);
        table.push(Poly::parse(base, H2)?);
        OperationClass::new(raw.substitute_table(base, &table)?)
    }

    pub fn d2() -> Self {
        OperationClass::parse(D2).expect("d2")
    }

    pub fn h2() -> Self {
        OperationClass::parse(H2).expect("h2")
    }

    /// Product of two classes.
    pub fn mul(&self, other: &OperationClass) -> Result<OperationClass> {
        OperationClass::new(self.expression.mul(&other.expression)?)
    }

    /// Largest `i` with `q_i` occurring in the expression.
    fn milnor_indices(&self) -> BTreeSet<(usize, Option<u32>)> {
        let ring = self.expression.ring();
        self.expression
            .terms()
            .flat_map(|m| m.iter().map(|(v, _)| v).collect::<Vec<_>>())
            .map(|v| (v, milnor_index(&ring.vars()[v].name)))
            .collect()
    }
}

impl fmt::Display for OperationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.expression)
    }
}

impl fmt::Debug for OperationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OperationClass(H^{}(K_2) ∋ {})", self.target_degree, self.expression)
    }
}

impl Serialize for OperationClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `ψ_*(s) ∈ S^p(Vₙ^#)`.
pub fn evaluate(psi: &OperationClass, s: &QuadraticForm) -> Result<Poly> {
    evaluate_poly(psi, &s.to_default_poly())
}

/// `ψ_*` on a degree-2 class of an arbitrary degree-1 polynomial ring.
pub fn evaluate_poly(psi: &OperationClass, s: &Poly) -> Result<Poly> {
    if psi.source_degree != 2 {
        return Err(Error::Unsupported(format!(
            "evaluation from H^{} is not implemented",
            psi.source_degree
        )));
    }
    if !s.is_zero() && s.degree() != Some(2) {
        return Err(Error::Contract(format!("{s} is not homogeneous of degree 2")));
    }
    let target = s.ring().clone();
    let ring = psi.expression.ring();
    let mut table: Vec<Poly> = vec![Poly::zero(&target); ring.len()];
    for (v, q) in psi.milnor_indices() {
        table[v] = match q {
            None => s.clone(),
            Some(i) => milnor_q(i, s)?,
        };
    }
    psi.expression.substitute_table(&target, &table)
}

fn check_dim(n: usize, max: usize) -> Result<()> {
    if n > max {
        Err(Error::Resource(format!("kernel enumeration limited to n ≤ {max}, got {n}")))
    } else {
        Ok(())
    }
}

/// Forms on `Vₙ` annihilated by `ψ`, in ascending mask order.
pub fn kernel_set(psi: &OperationClass, n: usize) -> Result<Vec<QuadraticForm>> {
    kernel_set_bounded(psi, n, DEFAULT_KERNEL_DIM)
}

pub fn kernel_set_bounded(psi: &OperationClass, n: usize, max_dim: usize) -> Result<Vec<QuadraticForm>> {
    check_dim(n, max_dim.min(MAX_KERNEL_DIM))?;
    let forms: Vec<QuadraticForm> = QuadraticForm::all(n).collect();
    let flags: Vec<bool> = forms
        .par_iter()
        .map(|s| evaluate(psi, s).map(|p| p.is_zero()))
        .collect::<Result<_>>()?;
    Ok(forms
        .into_iter()
        .zip(flags)
        .filter_map(|(s, z)| z.then_some(s))
        .collect())
}

/// Per-dimension sets of forms, closed under pullback along linear maps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubfunctorWitness {
    pub sets: BTreeMap<usize, BTreeSet<QuadraticForm>>,
    pub generators: Option<Vec<QuadraticForm>>,
}

impl SubfunctorWitness {
    pub fn from_kernel(psi: &OperationClass, n_max: usize) -> Result<Self> {
        let mut sets = BTreeMap::new();
        for n in 0..=n_max {
            sets.insert(n, kernel_set_bounded(psi, n, n_max.max(DEFAULT_KERNEL_DIM))?.into_iter().collect());
        }
        Ok(SubfunctorWitness { sets, generators: None })
    }

    /// The subfunctor generated by `generators`, through dimension `n_max`.
    pub fn generated(generators: &[QuadraticForm], n_max: usize) -> Self {
        let sets = (0..=n_max)
            .map(|n| (n, pullback_closure(generators, n).into_values().collect()))
            .collect();
        SubfunctorWitness {
            sets,
            generators: Some(generators.to_vec()),
        }
    }

    pub fn n_max(&self) -> usize {
        self.sets.keys().next_back().copied().unwrap_or(0)
    }

    pub fn contains_zero(&self) -> bool {
        self.sets.iter().all(|(&n, s)| s.contains(&QuadraticForm::zero(n)))
    }

    /// Checks closure under every linear map between the stored dimensions.
    pub fn is_pullback_closed(&self) -> bool {
        self.sets.iter().all(|(&n, forms)| {
            self.sets.iter().all(|(&m, target)| {
                crate::qforms::LinearMap::all(m, n)
                    .all(|phi| forms.iter().all(|s| target.contains(&s.pullback(&phi))))
            })
        })
    }

    pub fn union(&self, other: &SubfunctorWitness) -> SubfunctorWitness {
        let mut sets = self.sets.clone();
        for (n, s) in &other.sets {
            sets.entry(*n).or_default().extend(s.iter().copied());
        }
        SubfunctorWitness { sets, generators: None }
    }

    pub fn same_sets(&self, other: &SubfunctorWitness) -> bool {
        self.sets == other.sets
    }
}

/// Whether `witness` is exactly the subfunctor generated by `generators`
/// in every stored dimension.
pub fn generated_by(witness: &SubfunctorWitness, generators: &[QuadraticForm], n_max: usize) -> bool {
    (0..=n_max).all(|n| {
        let closure: BTreeSet<QuadraticForm> = pullback_closure(generators, n).into_values().collect();
        witness.sets.get(&n) == Some(&closure)
    })
}

/// A class found by [`search_classes`].
#[derive(Debug, Clone, Serialize)]
pub struct SearchHit {
    pub degree: u64,
    pub class: OperationClass,
}

/// Largest dimension of `H^p(K_2)` searched exhaustively.
pub const MAX_SEARCH_DIM: usize = 16;

/// All nonzero classes of degree `3..=p_max` whose kernel equals the
/// subfunctor generated by `target` in every dimension `≤ n_max`.
pub fn search_classes(p_max: u64, target: &[QuadraticForm], n_max: usize) -> Result<Vec<SearchHit>> {
    check_dim(n_max, MAX_KERNEL_DIM)?;
    let expected: Vec<BTreeSet<u64>> = (0..=n_max)
        .map(|n| pullback_closure(target, n).into_keys().collect())
        .collect();
    let forms: Vec<QuadraticForm> = (0..=n_max).flat_map(QuadraticForm::all).collect();
    let k2 = k2();
    let mut hits = Vec::new();
    for p in 3..=p_max {
        let basis = k2.ring().basis(p);
        if basis.is_empty() {
            continue;
        }
        if basis.len() > MAX_SEARCH_DIM {
            return Err(Error::Resource(format!(
                "H^{p}(K_2) has dimension {} > {MAX_SEARCH_DIM}",
                basis.len()
            )));
        }
        let classes: Vec<OperationClass> = basis
            .iter()
            .map(|m| OperationClass::new(Poly::from_monomial(k2.ring(), m.clone())))
            .collect::<Result<_>>()?;
        // for each form, the subspace of coefficient vectors vanishing on it
        let vanishing: Vec<Subspace> = forms
            .par_iter()
            .map(|s| -> Result<Subspace> {
                let values: Vec<Poly> = classes.iter().map(|c| evaluate(c, s)).collect::<Result<_>>()?;
                let monos: BTreeSet<Monomial> = values.iter().flat_map(|v| v.terms().cloned()).collect();
                let index: BTreeMap<&Monomial, usize> = monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
                let images: Vec<BitVec> = values
                    .iter()
                    .map(|v| BitVec::from_indices(monos.len(), v.terms().map(|m| index[m])))
                    .collect();
                let kernel = crate::gf2::kernel(&images, monos.len());
                Ok(Subspace::spanned_by(classes.len(), &kernel))
            })
            .collect::<Result<_>>()?;
        let inside: Vec<bool> = forms
            .iter()
            .map(|s| expected[s.dim()].contains(&s.bits()))
            .collect();
        for code in 1u64..(1u64 << basis.len()) {
            let c = BitVec::from_indices(basis.len(), (0..basis.len()).filter(|j| code >> j & 1 == 1));
            let matches = vanishing
                .iter()
                .zip(&inside)
                .all(|(space, &want)| space.contains(&c) == want);
            if matches {
                let expr = Poly::from_terms(k2.ring(), c.ones().map(|j| basis[j].clone()));
                hits.push(SearchHit {
                    degree: p,
                    class: OperationClass::new(expr)?,
                });
            }
        }
    }
    Ok(hits)
}

/// `F₂`-linear image of a polynomial under the linear substitution given by
/// a [`crate::qforms::LinearMap`] `V_m → V_n` (pullback on `S*(V^#)`).
pub fn pull_back_poly(p: &Poly, map: &crate::qforms::LinearMap) -> Result<Poly> {
    let target = default_ring(map.source_dim);
    let table: Vec<Poly> = map
        .rows
        .iter()
        .map(|&row| Poly::from_terms(&target, (0..map.source_dim).filter(|k| row >> k & 1 == 1).map(Monomial::var)))
        .collect();
    p.substitute_table(&target, &table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qforms::LinearMap;

    fn psi(s: &str) -> OperationClass {
        OperationClass::parse(s).unwrap()
    }

    fn form(n: usize, s: &str) -> QuadraticForm {
        QuadraticForm::parse(n, s).unwrap()
    }

    fn forms(n: usize, list: &[&str]) -> Vec<QuadraticForm> {
        let mut v: Vec<_> = list.iter().map(|s| form(n, s)).collect();
        v.sort();
        v
    }

    #[test]
    fn aliases_expand() {
        assert_eq!(OperationClass::d2().to_string(), "i2*q0 + q1");
        assert_eq!(OperationClass::d2().target_degree, 5);
        assert_eq!(OperationClass::h2().target_degree, 9);
        assert_eq!(psi("i2*d2").expression, psi("i2^2*q0 + i2*q1").expression);
        assert!(OperationClass::parse("i2").is_err());
        assert!(OperationClass::parse("i2 + q0").is_err());
    }

    #[test]
    fn evaluation_examples() {
        let uv = form(2, "u*v");
        assert_eq!(evaluate(&psi("i2^2"), &uv).unwrap().to_string(), "u^2*v^2");
        for i in 0..4u32 {
            let e = (1u32 << (i + 1)) - 1;
            let expected = Poly::parse(uv.to_default_poly().ring(), &format!("u^{}*v + u*v^{}", e + 1, e + 1)).unwrap();
            assert_eq!(evaluate(&psi(&format!("q{i}")), &uv).unwrap(), expected);
        }
        assert!(evaluate(&OperationClass::d2(), &form(2, "u^2 + u*v + v^2")).unwrap().is_zero());
        assert!(evaluate(&OperationClass::h2(), &uv).unwrap().is_zero());
        assert!(!evaluate(&OperationClass::d2(), &uv).unwrap().is_zero());
        assert!(!evaluate(&OperationClass::h2(), &form(2, "u^2 + u*v + v^2")).unwrap().is_zero());
    }

    #[test]
    fn unsupported_source_degree() {
        let mut c = OperationClass::d2();
        c.source_degree = 3;
        assert!(matches!(evaluate(&c, &form(2, "u*v")), Err(Error::Unsupported(_))));
    }

    #[test]
    fn kernel_examples_dimension_two() {
        assert_eq!(kernel_set(&psi("i2^2"), 2).unwrap(), forms(2, &["0"]));
        assert_eq!(kernel_set(&psi("i2^3"), 2).unwrap(), forms(2, &["0"]));
        for q in ["q0", "q1", "q2"] {
            assert_eq!(kernel_set(&psi(q), 2).unwrap(), forms(2, &["0", "u^2", "v^2", "u^2 + v^2"]));
        }
        assert_eq!(
            kernel_set(&OperationClass::d2(), 2).unwrap(),
            forms(2, &["0", "u^2", "v^2", "u^2 + v^2", "u^2 + u*v + v^2"])
        );
        assert!(matches!(kernel_set(&psi("q0"), 5), Err(Error::Resource(_))));
    }

    #[test]
    fn generated_by_examples() {
        let d2 = SubfunctorWitness::from_kernel(&OperationClass::d2(), 3).unwrap();
        assert!(generated_by(&d2, &[form(2, "u^2 + u*v + v^2")], 3));
        assert!(!generated_by(&d2, &[form(2, "u*v")], 3));
        let q1 = SubfunctorWitness::from_kernel(&psi("q1"), 3).unwrap();
        assert!(generated_by(&q1, &[form(1, "u^2")], 3));
        let trivial = SubfunctorWitness::from_kernel(&psi("i2^2"), 3).unwrap();
        assert!(generated_by(&trivial, &[], 3));
        assert!(d2.is_pullback_closed());
        assert!(d2.contains_zero());
    }

    #[test]
    fn naturality_under_linear_maps() {
        let classes = [OperationClass::d2(), OperationClass::h2(), psi("i2*q0")];
        for n in 1..=3 {
            for m in 1..=3 {
                let sample: Vec<QuadraticForm> = QuadraticForm::all(n).step_by(5).collect();
                for phi in LinearMap::all(m, n).step_by(7) {
                    for c in &classes {
                        for s in &sample {
                            let lhs = evaluate(c, &s.pullback(&phi)).unwrap();
                            let rhs = pull_back_poly(&evaluate(c, s).unwrap(), &phi).unwrap();
                            assert_eq!(lhs, rhs);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn kernel_of_product_is_union() {
        let pairs = [("i2", "q0"), ("q0", "q1"), ("i2", "d2"), ("d2", "h2"), ("q1", "h2")];
        for (a, b) in pairs {
            let prod = psi(&format!("{a}*{b}"));
            for n in 1..=3 {
                let ka = if a == "i2" { vec![QuadraticForm::zero(n)] } else { kernel_set(&psi(a), n).unwrap() };
                let kb = kernel_set(&psi(b), n).unwrap();
                let union: BTreeSet<_> = ka.into_iter().chain(kb).collect();
                let kp: BTreeSet<_> = kernel_set(&prod, n).unwrap().into_iter().collect();
                assert_eq!(kp, union, "{a}*{b}, n = {n}");
            }
        }
    }

    #[test]
    fn kernels_are_gl_stable() {
        for c in [OperationClass::d2(), OperationClass::h2()] {
            for n in 2..=3 {
                let k: BTreeSet<_> = kernel_set(&c, n).unwrap().into_iter().collect();
                for g in LinearMap::transvections(n) {
                    assert!(k.iter().all(|s| k.contains(&s.pullback(&g))));
                }
            }
        }
    }

    #[test]
    fn search_finds_q_family() {
        let hits = search_classes(9, &[form(1, "u^2")], 2).unwrap();
        let found: Vec<String> = hits.iter().map(|h| h.class.to_string()).collect();
        for expected in ["q0", "q1", "i2*q0", "q0^2"] {
            assert!(found.contains(&expected.to_string()), "{expected} missing from {found:?}");
        }
    }
}
