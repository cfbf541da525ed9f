//! Steenrod squares and Milnor primitives acting on `H*(BV) = F₂[x₁,…,xₙ]`.
//!
//! `Sq^k` is the degree-`k` part of the total square, the ring endomorphism
//! `x ↦ x + x²` on degree-1 generators. On a monomial `x^e` the coefficient of
//! `x^{e+j}` is `C(e, j) mod 2`, which by Lucas is odd iff `j` is a bit-submask
//! of `e`.
//!
//! `Q_0 = Sq¹` and `Q_{i+1} = Sq^{2^{i+1}} Q_i + Q_i Sq^{2^{i+1}}`; values on
//! monomials are memoised per thread.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::poly::{Monomial, Poly};

/// The operation applied by [`OperationRequest::apply`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperationKind {
    Sq(u32),
    Q(u32),
}

#[derive(Debug, Clone)]
pub struct OperationRequest {
    pub kind: OperationKind,
    pub target: Poly,
}

impl OperationRequest {
    pub fn apply(&self) -> Result<Poly> {
        match self.kind {
            OperationKind::Sq(k) => sq(k, &self.target),
            OperationKind::Q(i) => milnor_q(i, &self.target),
        }
    }
}

fn check_degree_one(f: &Poly) -> Result<()> {
    if f.ring().all_degree_one() {
        Ok(())
    } else {
        Err(Error::UnsupportedAlgebra(
            "Steenrod action is implemented on polynomial algebras with degree-1 generators".into(),
        ))
    }
}

/// Terms of `Sq^k(m)` for a monomial in degree-1 variables.
pub(crate) fn sq_monomial(k: u64, m: &Monomial) -> Vec<Monomial> {
    let exps: Vec<(usize, u32)> = m.iter().collect();
    let total: u64 = exps.iter().map(|&(_, e)| e as u64).sum();
    if k > total {
        return Vec::new();
    }
    if k == 0 {
        return vec![m.clone()];
    }
    // suffix[i] = sum of exponents from i on (upper bound for remaining j)
    let mut suffix = vec![0u64; exps.len() + 1];
    for i in (0..exps.len()).rev() {
        suffix[i] = suffix[i + 1] + exps[i].1 as u64;
    }
    let mut out = Vec::new();
    let mut chosen = vec![0u32; exps.len()];

    fn go(
        i: usize,
        left: u64,
        exps: &[(usize, u32)],
        suffix: &[u64],
        chosen: &mut Vec<u32>,
        out: &mut Vec<Monomial>,
    ) {
        if i == exps.len() {
            if left == 0 {
                let mut dense: Vec<(usize, u32)> = Vec::with_capacity(exps.len());
                for (k, &(v, e)) in exps.iter().enumerate() {
                    dense.push((v, e + chosen[k]));
                }
                let nvars = dense.last().map_or(0, |&(v, _)| v + 1);
                let mut full = vec![0u32; nvars];
                for (v, e) in dense {
                    full[v] = e;
                }
                out.push(Monomial::from_dense(&full));
            }
            return;
        }
        let e = exps[i].1;
        let rest_max = suffix[i + 1];
        // iterate over submasks j of e (including 0)
        let mut j = e;
        loop {
            let jv = j as u64;
            if jv <= left && left - jv <= rest_max {
                chosen[i] = j;
                go(i + 1, left - jv, exps, suffix, chosen, out);
            }
            if j == 0 {
                break;
            }
            j = (j - 1) & e;
        }
        chosen[i] = 0;
    }

    go(0, k, &exps, &suffix, &mut chosen, &mut out);
    out
}

fn toggle(set: &mut BTreeSet<Monomial>, m: Monomial) {
    if !set.remove(&m) {
        set.insert(m);
    }
}

fn sq_set(k: u64, input: &BTreeSet<Monomial>) -> BTreeSet<Monomial> {
    let mut out = BTreeSet::new();
    for m in input {
        for t in sq_monomial(k, m) {
            toggle(&mut out, t);
        }
    }
    out
}

/// `Sq^k(f)` for `f` in a polynomial algebra on degree-1 generators.
pub fn sq(k: u32, f: &Poly) -> Result<Poly> {
    check_degree_one(f)?;
    Ok(Poly::from_terms(
        f.ring(),
        f.terms().flat_map(|m| sq_monomial(k as u64, m)),
    ))
}

/// Applies the composite `Sq^{i₁} ∘ … ∘ Sq^{i_k}` (rightmost letter first).
pub fn sq_word(word: &[u32], f: &Poly) -> Result<Poly> {
    check_degree_one(f)?;
    let mut cur: BTreeSet<Monomial> = f.terms().cloned().collect();
    for &k in word.iter().rev() {
        cur = sq_set(k as u64, &cur);
        if cur.is_empty() {
            break;
        }
    }
    Ok(Poly::from_terms(f.ring(), cur))
}

type QMemo = HashMap<(u32, Monomial), Rc<BTreeSet<Monomial>>>;

thread_local! {
    static Q_MEMO: RefCell<QMemo> = RefCell::new(HashMap::new());
}

fn q_monomial(i: u32, m: &Monomial) -> Rc<BTreeSet<Monomial>> {
    if let Some(hit) = Q_MEMO.with(|memo| memo.borrow().get(&(i, m.clone())).cloned()) {
        return hit;
    }
    let value: BTreeSet<Monomial> = if i == 0 {
        sq_monomial(1, m).into_iter().fold(BTreeSet::new(), |mut acc, t| {
            toggle(&mut acc, t);
            acc
        })
    } else {
        let step = 1u64 << i;
        let prev = q_monomial(i - 1, m);
        let mut out = sq_set(step, &prev);
        for t in sq_monomial(step, m) {
            for r in q_monomial(i - 1, &t).iter() {
                toggle(&mut out, r.clone());
            }
        }
        out
    };
    let value = Rc::new(value);
    Q_MEMO.with(|memo| memo.borrow_mut().insert((i, m.clone()), value.clone()));
    value
}

/// The Milnor primitive `Q_i`, of degree `2^{i+1} − 1`.
pub fn milnor_q(i: u32, f: &Poly) -> Result<Poly> {
    check_degree_one(f)?;
    if i > 30 {
        return Err(Error::Resource(format!("Q_{i} has degree beyond 2^31")));
    }
    let mut out = BTreeSet::new();
    for m in f.terms() {
        for t in q_monomial(i, m).iter() {
            toggle(&mut out, t.clone());
        }
    }
    Ok(Poly::from_terms(f.ring(), out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Ring;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn ring(names: &[&str]) -> Arc<Ring> {
        Ring::degree_one(names).unwrap()
    }

    fn p(r: &Arc<Ring>, s: &str) -> Poly {
        Poly::parse(r, s).unwrap()
    }

    /// `Q_i` on a monomial from the derivation rule `Q_i(x) = x^{2^{i+1}}`.
    fn q_by_derivation(i: u32, f: &Poly) -> Poly {
        let shift = (1u32 << (i + 1)) - 1;
        Poly::from_terms(
            f.ring(),
            f.terms().flat_map(|m| {
                m.iter()
                    .filter(|&(_, e)| e % 2 == 1)
                    .map(|(v, _)| m.mul(&Monomial::var_pow(v, shift)).unwrap())
                    .collect::<Vec<_>>()
            }),
        )
    }

    #[test]
    fn sq_examples() {
        let r = ring(&["u", "v"]);
        assert!(sq(1, &p(&r, "u^2")).unwrap().is_zero());
        assert_eq!(sq(2, &p(&r, "u^2")).unwrap(), p(&r, "u^4"));
        // (u + u²)(v + v²) in degree 3
        assert_eq!(sq(1, &p(&r, "u*v")).unwrap(), p(&r, "u^2*v + u*v^2"));
        assert_eq!(sq(2, &p(&r, "u*v")).unwrap(), p(&r, "u^2*v^2"));
        assert!(sq(3, &p(&r, "u*v")).unwrap().is_zero());
    }

    #[test]
    fn sq_on_powers_follows_binomials() {
        let r = ring(&["u"]);
        // Sq^k(u^n) = C(n, k) u^{n+k}
        for n in 0..20u32 {
            for k in 0..=n + 2 {
                let expected = if k <= n && (k & !n) == 0 {
                    p(&r, &format!("u^{}", n + k))
                } else {
                    Poly::zero(&r)
                };
                assert_eq!(sq(k, &p(&r, &format!("u^{n}"))).unwrap(), expected, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn milnor_identities_on_forms() {
        let r = ring(&["u", "v"]);
        for i in 0..4u32 {
            let e = (1u32 << (i + 1)) - 1;
            let expected = p(&r, &format!("u*v*u^{e} + u*v*v^{e}"));
            assert!(milnor_q(i, &p(&r, "u^2")).unwrap().is_zero());
            assert_eq!(milnor_q(i, &p(&r, "u*v")).unwrap(), expected);
            assert_eq!(milnor_q(i, &p(&r, "u^2 + u*v + v^2")).unwrap(), expected);
        }
    }

    #[test]
    fn milnor_on_generators() {
        let r = ring(&["u", "v", "w"]);
        for i in 0..6u32 {
            for x in ["u", "v", "w"] {
                let expected = p(&r, &format!("{x}^{}", 1u32 << (i + 1)));
                assert_eq!(milnor_q(i, &p(&r, x)).unwrap(), expected);
            }
        }
    }

    #[test]
    fn milnor_matches_derivation_formula() {
        let r = ring(&["u", "v", "w"]);
        for text in ["u^3*v^5*w", "u*v*w", "u^7 + v^2*w^3", "u^2*v^2"] {
            let f = p(&r, text);
            for i in 0..5 {
                assert_eq!(milnor_q(i, &f).unwrap(), q_by_derivation(i, &f), "{text}, i={i}");
            }
        }
    }

    #[test]
    fn unsupported_algebra() {
        let r = Ring::new(vec![crate::poly::Variable::new("i2", 2)]).unwrap();
        let f = p(&r, "i2");
        assert!(matches!(sq(1, &f), Err(Error::UnsupportedAlgebra(_))));
        assert!(matches!(milnor_q(0, &f), Err(Error::UnsupportedAlgebra(_))));
    }

    #[test]
    fn heterogeneous_input_componentwise() {
        let r = ring(&["u", "v"]);
        let f = p(&r, "u + u*v");
        let expected = sq(1, &p(&r, "u")).unwrap().add(&sq(1, &p(&r, "u*v")).unwrap()).unwrap();
        assert_eq!(sq(1, &f).unwrap(), expected);
    }

    #[test]
    fn word_application_is_right_to_left() {
        let r = ring(&["u", "v"]);
        let f = p(&r, "u*v");
        let manual = sq(2, &sq(1, &f).unwrap()).unwrap();
        assert_eq!(sq_word(&[2, 1], &f).unwrap(), manual);
    }

    fn ring4() -> Arc<Ring> {
        ring(&["a", "b", "c", "d"])
    }

    fn arb_homogeneous(max_deg: u32) -> impl Strategy<Value = Poly> {
        (1..=max_deg).prop_flat_map(|deg| {
            proptest::collection::vec(proptest::collection::vec(0u32..=deg, 4), 1..5).prop_map(move |rows| {
                let r = ring4();
                let terms = rows.into_iter().map(|mut e| {
                    // rescale to total degree `deg`
                    let mut s: u32 = e.iter().sum();
                    while s > deg {
                        let k = e.iter().position(|&x| x > 0).unwrap();
                        e[k] -= 1;
                        s -= 1;
                    }
                    e[0] += deg - s;
                    Monomial::from_dense(&e)
                });
                Poly::from_terms(&r, terms)
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn cartan_formula(f in arb_homogeneous(4), g in arb_homogeneous(4), k in 0u32..10) {
            let lhs = sq(k, &f.mul(&g).unwrap()).unwrap();
            let mut rhs = Poly::zero(f.ring());
            for a in 0..=k {
                rhs.add_assign(&sq(a, &f).unwrap().mul(&sq(k - a, &g).unwrap()).unwrap()).unwrap();
            }
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn instability(f in arb_homogeneous(8)) {
            let d = f.degree().unwrap_or(0) as u32;
            prop_assert_eq!(sq(0, &f).unwrap(), f.clone());
            prop_assert_eq!(sq(d, &f).unwrap(), f.square().unwrap());
            prop_assert!(sq(d + 1, &f).unwrap().is_zero());
        }

        #[test]
        fn q_is_derivation_and_exterior(f in arb_homogeneous(4), g in arb_homogeneous(4), i in 0u32..5) {
            let lhs = milnor_q(i, &f.mul(&g).unwrap()).unwrap();
            let rhs = milnor_q(i, &f).unwrap().mul(&g).unwrap()
                .add(&f.mul(&milnor_q(i, &g).unwrap()).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            prop_assert!(milnor_q(i, &milnor_q(i, &f).unwrap()).unwrap().is_zero());
        }
    }
}
