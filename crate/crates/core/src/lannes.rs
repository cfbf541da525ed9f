//! Dimension bookkeeping for Lannes' functor `T_V`.
//!
//! `T_V F(p) ≅ ⊕_{0≤i≤p} Γ^i(V) ⊗ F(p−i)`, and in degree zero
//! `T_V H*(K_p)` is the Boolean algebra of functions on `Γ^p(V^#)`.

use serde::Serialize;

use crate::algebra::f_dims;
use crate::error::{Error, Result};
use crate::eval::{kernel_set, OperationClass};

/// `C(n, k)` as `u128`, `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        acc = acc.checked_mul((n - j) as u128)? / (j as u128 + 1);
    }
    Some(acc)
}

/// `dim Γ^i(V)` for `dim V = n`, that is `C(n+i−1, i)`.
pub fn gamma_dim(n: u64, i: u64) -> Result<u128> {
    if n == 0 {
        return Ok(u128::from(i == 0));
    }
    binomial(n + i - 1, i).ok_or(Error::Overflow)
}

#[derive(Debug, Clone, Serialize)]
pub struct TvComponent {
    pub i: u64,
    pub gamma_dim: u128,
    /// Dimensions of `F(p − i)` through the cap.
    pub f_dims: Vec<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TvReport {
    pub p: u64,
    pub n: u64,
    pub cap: u64,
    pub components: Vec<TvComponent>,
    pub dims: Vec<u128>,
}

pub fn tv_report(p: u64, n: u64, cap: u64) -> Result<TvReport> {
    if p < 1 {
        return Err(Error::Contract("p must be at least 1".into()));
    }
    let mut dims = vec![0u128; cap as usize + 1];
    let mut components = Vec::new();
    for i in 0..=p {
        let g = gamma_dim(n, i)?;
        if g == 0 {
            continue;
        }
        let f = f_dims((p - i) as u32, cap);
        for (d, &x) in f.iter().enumerate() {
            dims[d] = dims[d].checked_add(g.checked_mul(x as u128).ok_or(Error::Overflow)?).ok_or(Error::Overflow)?;
        }
        components.push(TvComponent { i, gamma_dim: g, f_dims: f });
    }
    Ok(TvReport { p, n, cap, components, dims })
}

/// Dimensions of `T_V F(p)` through degree `cap`, `dim V = n`.
pub fn tv_f_dims(p: u64, n: u64, cap: u64) -> Result<Vec<u128>> {
    Ok(tv_report(p, n, cap)?.dims)
}

/// `dim T_V(H*(K_p))^0 = 2^{C(n+p−1, p)}`.
pub fn tv_hk_degree0(p: u64, n: u64) -> Result<u128> {
    if p < 1 {
        return Err(Error::Contract("p must be at least 1".into()));
    }
    let e = gamma_dim(n, p)?;
    if e > 64 {
        return Err(Error::Resource(format!("2^{e} exceeds the 2^64 cap")));
    }
    Ok(1u128 << e)
}

#[derive(Debug, Clone, Serialize)]
pub struct L2Report {
    pub class: String,
    pub n: usize,
    pub fiber_size: usize,
    /// Dimension of the algebra of `F₂`-valued functions on the fiber.
    pub dim: u128,
    /// Number of elements of that Boolean algebra, `2^{fiber size}`.
    pub cardinality: u128,
}

/// Degree-zero part of `T_V(H*(K_2)) ⊗_{F₂^{Γ^p(V^#)}} F₂`: functions on
/// the fiber `ψ_*^{-1}(0) ⊂ S²(V^#)`.
pub fn l2_zero(psi: &OperationClass, n: usize) -> Result<L2Report> {
    let size = kernel_set(psi, n)?.len();
    if size > 64 {
        return Err(Error::Resource(format!("2^{size} exceeds the 2^64 cap")));
    }
    Ok(L2Report {
        class: psi.to_string(),
        n,
        fiber_size: size,
        dim: size as u128,
        cardinality: 1u128 << size,
    })
}

pub fn l2_zero_dim(psi: &OperationClass, n: usize) -> Result<u128> {
    Ok(l2_zero(psi, n)?.dim)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), Some(10));
        assert_eq!(binomial(2, 3), Some(0));
        assert_eq!(gamma_dim(0, 0).unwrap(), 1);
        assert_eq!(gamma_dim(0, 3).unwrap(), 0);
        assert_eq!(gamma_dim(2, 2).unwrap(), 3);
        assert!(binomial(300, 150).is_none());
    }

    #[test]
    fn zero_space_is_identity() {
        for p in 1..=4u64 {
            let f: Vec<u128> = f_dims(p as u32, 20).into_iter().map(u128::from).collect();
            assert_eq!(tv_f_dims(p, 0, 20).unwrap(), f);
        }
    }

    #[test]
    fn small_example() {
        assert_eq!(tv_f_dims(1, 1, 4).unwrap(), vec![1, 1, 1, 0, 1]);
    }

    #[test]
    fn direct_sum_is_convolution() {
        for p in 1..=4u64 {
            for a in 0..=3u64 {
                for b in 0..=3 - a {
                    let direct = tv_f_dims(p, a + b, 16).unwrap();
                    let mut conv = vec![0u128; 17];
                    for i in 0..=p {
                        let g: u128 = (0..=i).map(|j| gamma_dim(a, j).unwrap() * gamma_dim(b, i - j).unwrap()).sum();
                        for (d, x) in f_dims((p - i) as u32, 16).iter().enumerate() {
                            conv[d] += g * *x as u128;
                        }
                    }
                    assert_eq!(direct, conv, "p={p} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn boolean_degree_zero() {
        assert_eq!(tv_hk_degree0(2, 0).unwrap(), 1);
        assert_eq!(tv_hk_degree0(2, 1).unwrap(), 2);
        assert_eq!(tv_hk_degree0(2, 2).unwrap(), 8);
        assert!(matches!(tv_hk_degree0(10, 10), Err(Error::Resource(_))));
    }

    #[test]
    fn l2_examples() {
        let r = l2_zero(&OperationClass::parse("i2^2").unwrap(), 2).unwrap();
        assert_eq!((r.fiber_size, r.cardinality), (1, 2));
        let r = l2_zero(&OperationClass::parse("q1").unwrap(), 1).unwrap();
        assert_eq!((r.fiber_size, r.cardinality), (2, 4));
        assert_eq!(l2_zero_dim(&OperationClass::d2(), 1).unwrap(), 2);
        // the fiber sits inside all of S²(V^#)
        for n in 0..=3 {
            assert!(l2_zero_dim(&OperationClass::h2(), n).unwrap() <= tv_hk_degree0(2, n as u64).unwrap());
        }
    }
}
