use proptest::prelude::*;

use steenrod_core::action::sq_word;
use steenrod_core::algebra::{adem_normalize, excess, KnCohomology, SteenrodWord};
use steenrod_core::eval::{evaluate, kernel_set, pull_back_poly, OperationClass};
use steenrod_core::lannes::l2_zero_dim;
use steenrod_core::poly::Poly;
use steenrod_core::qforms::{default_ring, LinearMap, QuadraticForm};

fn word() -> impl Strategy<Value = SteenrodWord> {
    prop::collection::vec(1u32..6, 1..4).prop_map(|v| SteenrodWord::new(v).unwrap())
}

fn form(n: usize) -> impl Strategy<Value = QuadraticForm> {
    let count = n * (n + 1) / 2;
    (0u64..(1 << count)).prop_map(move |b| QuadraticForm::new(n, b).unwrap())
}

fn linear_map(m: usize, n: usize) -> impl Strategy<Value = LinearMap> {
    prop::collection::vec(0u32..(1 << m), n).prop_map(move |rows| LinearMap { source_dim: m, rows })
}

fn invertible(n: usize) -> impl Strategy<Value = LinearMap> {
    linear_map(n, n).prop_filter("invertible", LinearMap::is_invertible)
}

fn class() -> impl Strategy<Value = OperationClass> {
    prop::sample::select(vec!["q0", "q1", "i2*q0", "d2", "h2", "i2*d2", "q0^2", "i2^2*q0 + i2*q1"])
        .prop_map(|s| OperationClass::parse(s).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normal_form_acts_like_the_word(w in word(), exps in prop::collection::vec(0u32..3, 3)) {
        let ring = default_ring(3);
        let text = format!("u^{}*v^{}*w^{} + u*v", exps[0], exps[1], exps[2]);
        let f = Poly::parse(&ring, &text).unwrap();
        let mut rhs = Poly::zero(&ring);
        for a in adem_normalize(&w).words() {
            prop_assert!(a.is_admissible());
            rhs.add_assign(&sq_word(a.entries(), &f).unwrap()).unwrap();
        }
        prop_assert_eq!(sq_word(w.entries(), &f).unwrap(), rhs);
    }

    #[test]
    fn normal_forms_are_homogeneous(w in word()) {
        let n = adem_normalize(&w);
        for a in n.words() {
            prop_assert_eq!(a.degree(), w.degree());
            prop_assert!(excess(a).is_ok());
        }
    }

    #[test]
    fn invariants_are_gl_invariant(s in form(3), g in invertible(3)) {
        prop_assert_eq!(s.pullback(&g).invariants(), s.invariants());
        prop_assert_eq!(s.pullback(&g).zero_count(), s.zero_count());
    }

    #[test]
    fn evaluation_is_natural(c in class(), s in form(2), phi in linear_map(3, 2)) {
        let lhs = evaluate(&c, &s.pullback(&phi)).unwrap();
        let rhs = pull_back_poly(&evaluate(&c, &s).unwrap(), &phi).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn kernels_are_closed_under_pullback(c in class(), phi in linear_map(2, 3)) {
        let big: Vec<QuadraticForm> = kernel_set(&c, 3).unwrap();
        let small = kernel_set(&c, 2).unwrap();
        for s in big {
            prop_assert!(small.contains(&s.pullback(&phi)));
        }
    }

    #[test]
    fn fiber_size_is_gl_stable(c in class(), g in invertible(3)) {
        let k = kernel_set(&c, 3).unwrap();
        prop_assert!(k.iter().all(|s| k.contains(&s.pullback(&g))));
        prop_assert_eq!(l2_zero_dim(&c, 3).unwrap(), k.len() as u128);
    }
}

#[test]
fn kn_action_agrees_with_forms() {
    // Sq^k on H*(K_2) followed by evaluation equals evaluation followed by Sq^k.
    let k2 = KnCohomology::k2();
    let ring = default_ring(3);
    let forms: Vec<QuadraticForm> = QuadraticForm::all(3).step_by(3).collect();
    for text in ["i2*q0", "q1", "i2^2", "q0^2*i2"] {
        let x = k2.parse(text).unwrap();
        let c = OperationClass::new(x.clone()).unwrap();
        for k in 1..=6u32 {
            let y = k2.steenrod(k as u64, &x).unwrap();
            for s in &forms {
                let direct = sq_word(&[k], &evaluate(&c, s).unwrap()).unwrap();
                let via = if y.is_zero() {
                    Poly::zero(&ring)
                } else {
                    evaluate(&OperationClass::new(y.clone()).unwrap(), s).unwrap()
                };
                assert_eq!(via, direct, "Sq^{k}({text}) on {s}");
            }
        }
    }
}
