//! Invariant subalgebras of `F₂[u, v]`: the Dickson algebra `D(2)`, the
//! algebra `H₂`, the fiber product `M₂`, and the `ℤ/2` norm sequence.
//!
//! Subalgebras are handled degree by degree as subspaces of the monomial
//! basis, so every comparison is an exact rank computation.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::action::{milnor_q, sq};
use crate::error::{Error, Result};
use crate::eval::pull_back_poly;
use crate::gf2::{kernel, BitVec, Subspace};
use crate::poly::{free_algebra_dims, Monomial, Poly, Ring};
use crate::qforms::{default_ring, LinearMap};

pub const DICKSON_GENERATORS: [&str; 2] = ["u^2 + u*v + v^2", "u^2*v + u*v^2"];
pub const SYMMETRIC_GENERATORS: [&str; 2] = ["u + v", "u*v"];

/// Monomial bases of one ring, degree by degree, with coordinate maps.
pub struct GradedBasis {
    ring: Arc<Ring>,
    monos: Vec<Vec<Monomial>>,
    index: Vec<HashMap<Monomial, usize>>,
}

impl GradedBasis {
    pub fn new(ring: &Arc<Ring>, cap: u64) -> Self {
        let monos: Vec<Vec<Monomial>> = (0..=cap).map(|d| ring.basis(d)).collect();
        let index = monos
            .iter()
            .map(|b| b.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect())
            .collect();
        GradedBasis {
            ring: ring.clone(),
            monos,
            index,
        }
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn cap(&self) -> u64 {
        self.monos.len() as u64 - 1
    }

    pub fn dim(&self, d: u64) -> usize {
        self.monos[d as usize].len()
    }

    pub fn monomials(&self, d: u64) -> &[Monomial] {
        &self.monos[d as usize]
    }

    /// Coordinates of a polynomial homogeneous of degree `d`.
    pub fn coords(&self, p: &Poly, d: u64) -> Result<BitVec> {
        let index = &self.index[d as usize];
        let mut v = BitVec::zeros(index.len());
        for m in p.terms() {
            let i = index
                .get(m)
                .ok_or_else(|| Error::Degree(format!("{p} has a term outside degree {d}")))?;
            v.set(*i, true);
        }
        Ok(v)
    }

    pub fn poly(&self, v: &BitVec, d: u64) -> Poly {
        Poly::from_terms(&self.ring, v.ones().map(|i| self.monos[d as usize][i].clone()))
    }

    pub fn basis_polys<'a>(&'a self, space: &'a Subspace, d: u64) -> impl Iterator<Item = Poly> + 'a {
        space.basis().map(move |v| self.poly(v, d))
    }
}

/// A subalgebra given by homogeneous generators, truncated at degree `cap`.
#[derive(Clone, Debug)]
pub struct SubalgebraSpec {
    pub ambient: Arc<Ring>,
    pub generators: Vec<Poly>,
    pub cap: u64,
}

impl SubalgebraSpec {
    pub fn new(ambient: &Arc<Ring>, generators: Vec<Poly>, cap: u64) -> Result<Self> {
        for g in &generators {
            match g.degree() {
                Some(d) if d > 0 => {}
                _ => return Err(Error::Degree(format!("generator {g} must be homogeneous of positive degree"))),
            }
        }
        Ok(SubalgebraSpec {
            ambient: ambient.clone(),
            generators,
            cap,
        })
    }

    pub fn parse(ambient: &Arc<Ring>, generators: &[&str], cap: u64) -> Result<Self> {
        let gens = generators
            .iter()
            .map(|s| Poly::parse(ambient, s))
            .collect::<Result<Vec<_>>>()?;
        SubalgebraSpec::new(ambient, gens, cap)
    }
}

/// Degree-wise spans of the subalgebra, optionally also closed under all
/// `Sq^k` (the unstable subalgebra generated).
pub fn closure_spans(spec: &SubalgebraSpec, basis: &GradedBasis, unstable: bool) -> Result<Vec<Subspace>> {
    if unstable && !spec.ambient.all_degree_one() {
        return Err(Error::UnsupportedAlgebra("Steenrod closure needs degree-one generators".into()));
    }
    let cap = spec.cap.min(basis.cap());
    let mut spans: Vec<Subspace> = Vec::with_capacity(cap as usize + 1);
    for d in 0..=cap {
        let mut space = Subspace::new(basis.dim(d));
        if d == 0 {
            space.insert(basis.coords(&Poly::one(&spec.ambient), 0)?);
        }
        for g in &spec.generators {
            let e = g.degree().expect("validated");
            if e > d {
                continue;
            }
            let lower: Vec<Poly> = basis.basis_polys(&spans[(d - e) as usize], d - e).collect();
            for b in lower {
                space.insert(basis.coords(&g.mul(&b)?, d)?);
            }
        }
        if unstable {
            for k in 1..=d / 2 {
                let lower: Vec<Poly> = basis.basis_polys(&spans[(d - k) as usize], d - k).collect();
                for b in lower {
                    space.insert(basis.coords(&sq(k as u32, &b)?, d)?);
                }
            }
        }
        spans.push(space);
    }
    Ok(spans)
}

pub fn subalgebra_dims(spec: &SubalgebraSpec) -> Result<Vec<u64>> {
    let basis = GradedBasis::new(&spec.ambient, spec.cap);
    Ok(closure_spans(spec, &basis, false)?
        .iter()
        .map(|s| s.dim() as u64)
        .collect())
}

/// Dimensions of the invariants of the group generated by `group` acting on
/// `F₂[x₁,…,xₙ]` by linear substitution.
pub fn invariant_ring_dims(group: &[LinearMap], n: usize, cap: u64) -> Result<Vec<u64>> {
    for g in group {
        if g.source_dim != n || g.target_dim() != n {
            return Err(Error::Structural(format!("expected {n}×{n} matrices")));
        }
        if !g.is_invertible() {
            return Err(Error::Contract(format!("matrix {:?} is singular", g.rows)));
        }
    }
    let ring = default_ring(n);
    let basis = GradedBasis::new(&ring, cap);
    let mut dims = Vec::new();
    for d in 0..=cap {
        let width = basis.dim(d);
        let mut images = Vec::with_capacity(width);
        for m in &basis.monos[d as usize] {
            let x = Poly::from_monomial(&ring, m.clone());
            let mut stacked = BitVec::zeros(0);
            for g in group {
                let diff = pull_back_poly(&x, g)?.add(&x)?;
                stacked = stacked.concat(&basis.coords(&diff, d)?);
            }
            images.push(stacked);
        }
        let target = width * group.len();
        dims.push(kernel(&images, target).len() as u64);
    }
    Ok(dims)
}

/// Every invertible `n × n` matrix over F₂.
pub fn general_linear_group(n: usize) -> Vec<LinearMap> {
    LinearMap::all(n, n).filter(LinearMap::is_invertible).collect()
}

/// The swap `u ↔ v`.
pub fn swap() -> LinearMap {
    LinearMap {
        source_dim: 2,
        rows: vec![0b10, 0b01],
    }
}

pub fn uv_ring() -> Arc<Ring> {
    default_ring(2)
}

/// `uv` followed by `Q_i(uv) = uv(u^{2^{i+1}-1} + v^{2^{i+1}-1})` up to degree `cap`.
pub fn h2_milnor_generators(cap: u64) -> Result<Vec<Poly>> {
    let uv = Poly::parse(&uv_ring(), "u*v")?;
    let mut gens = vec![uv.clone()];
    for i in 0.. {
        if 2 + (1u64 << (i + 1)) - 1 > cap {
            break;
        }
        gens.push(milnor_q(i, &uv)?);
    }
    Ok(gens)
}

/// `w₂ w₁^j` up to degree `cap`, with `w₁ = u + v`, `w₂ = uv`.
pub fn h2_stiefel_whitney_generators(cap: u64) -> Result<Vec<Poly>> {
    let ring = uv_ring();
    let w1 = Poly::parse(&ring, "u + v")?;
    let mut g = Poly::parse(&ring, "u*v")?;
    let mut gens = Vec::new();
    for _ in 2..=cap {
        gens.push(g.clone());
        g = g.mul(&w1)?;
    }
    Ok(gens)
}

/// Per degree `d`, the space of `x` with `x^{2^depth}` in `spans`.
/// `basis` must reach degree `2^depth · cap`.
pub fn frobenius_preimage(spans: &[Subspace], basis: &GradedBasis, cap: u64, depth: u32) -> Result<Vec<Subspace>> {
    let e = 1u32 << depth;
    let mut out = Vec::new();
    for d in 0..=cap {
        let high = d * e as u64;
        let target = spans
            .get(high as usize)
            .ok_or_else(|| Error::Resource(format!("closure computed only to degree {}", spans.len() - 1)))?;
        let residues: Vec<BitVec> = basis.monos[d as usize]
            .iter()
            .map(|m| -> Result<BitVec> {
                let p = Poly::from_monomial(basis.ring(), m.pow(e)?);
                Ok(target.reduce(basis.coords(&p, high)?))
            })
            .collect::<Result<_>>()?;
        let ker = kernel(&residues, basis.dim(high));
        out.push(Subspace::spanned_by(basis.dim(d), &ker));
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct H2Comparison {
    pub cap: u64,
    pub milnor_dims: Vec<u64>,
    pub stiefel_whitney_dims: Vec<u64>,
    /// Degrees where the algebras generated by the two lists differ.
    pub literal_mismatch: Vec<u64>,
    /// Same comparison after closing both under all Steenrod squares.
    pub unstable_mismatch: Vec<u64>,
    /// Smallest `k` for which `{x : x^{2^k} ∈ ·}` agree through `cap`.
    pub radical_depth: Option<u32>,
    pub literal_equal: bool,
}

/// Largest Frobenius depth tried by [`h2_two_descriptions_check`].
pub const MAX_RADICAL_DEPTH: u32 = 3;

/// Compares the two generating sets of `H₂` degree by degree.
pub fn h2_two_descriptions_check(cap: u64) -> Result<H2Comparison> {
    let ring = uv_ring();
    let high = cap << MAX_RADICAL_DEPTH;
    let basis = GradedBasis::new(&ring, high);
    let k_spec = SubalgebraSpec::new(&ring, h2_milnor_generators(high)?, high)?;
    let w_spec = SubalgebraSpec::new(&ring, h2_stiefel_whitney_generators(high)?, high)?;
    let k = closure_spans(&k_spec, &basis, false)?;
    let w = closure_spans(&w_spec, &basis, false)?;
    let mismatch = |a: &[Subspace], b: &[Subspace]| -> Vec<u64> {
        (0..=cap).filter(|&d| !a[d as usize].same_as(&b[d as usize])).collect()
    };
    let literal_mismatch = mismatch(&k, &w);
    let low_basis = GradedBasis::new(&ring, cap);
    let k_low = SubalgebraSpec { cap, ..k_spec.clone() };
    let w_low = SubalgebraSpec { cap, ..w_spec.clone() };
    let unstable_mismatch = mismatch(
        &closure_spans(&k_low, &low_basis, true)?,
        &closure_spans(&w_low, &low_basis, true)?,
    );
    let mut radical_depth = None;
    for depth in 0..=MAX_RADICAL_DEPTH {
        let rk = frobenius_preimage(&k, &basis, cap, depth)?;
        let rw = frobenius_preimage(&w, &basis, cap, depth)?;
        if mismatch(&rk, &rw).is_empty() {
            radical_depth = Some(depth);
            break;
        }
    }
    Ok(H2Comparison {
        cap,
        milnor_dims: k.iter().take(cap as usize + 1).map(|s| s.dim() as u64).collect(),
        stiefel_whitney_dims: w.iter().take(cap as usize + 1).map(|s| s.dim() as u64).collect(),
        literal_equal: literal_mismatch.is_empty(),
        literal_mismatch,
        unstable_mismatch,
        radical_depth,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct M2Row {
    pub degree: u64,
    pub dickson: u64,
    pub h2: u64,
    pub image_sum: u64,
    pub image_intersection: u64,
    /// Nullity of `(a, b) ↦ ρ(a) + ρ(b)`, computed directly.
    pub fiber_product: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct M2Table {
    pub restriction: &'static str,
    pub rows: Vec<M2Row>,
}

impl M2Table {
    pub fn dims(&self) -> Vec<u64> {
        self.rows.iter().map(|r| r.fiber_product).collect()
    }

    /// `dim M₂ = dim D(2) + dim H₂ − dim(common image)` in every degree.
    pub fn rank_identity_holds(&self) -> bool {
        self.rows.iter().all(|r| {
            r.fiber_product + r.image_sum == r.dickson + r.h2
                && r.fiber_product + r.image_intersection == r.dickson + r.h2
        })
    }
}

/// The fiber product of `D(2)` and `H₂` over `F₂[u]` along `v ↦ u`.
pub fn m2_table(cap: u64) -> Result<M2Table> {
    let ring = uv_ring();
    let line = default_ring(1);
    let basis = GradedBasis::new(&ring, cap);
    let line_basis = GradedBasis::new(&line, cap);
    let dickson = closure_spans(&SubalgebraSpec::parse(&ring, &DICKSON_GENERATORS, cap)?, &basis, false)?;
    let h2 = closure_spans(&SubalgebraSpec::new(&ring, h2_milnor_generators(cap)?, cap)?, &basis, false)?;
    let u = Poly::var(&line, "u")?;
    let restrict = |p: &Poly| p.substitute_table(&line, &[u.clone(), u.clone()]);
    let mut rows = Vec::new();
    for d in 0..=cap {
        let image = |space: &Subspace| -> Result<Vec<BitVec>> {
            basis
                .basis_polys(space, d)
                .map(|p| line_basis.coords(&restrict(&p)?, d))
                .collect()
        };
        let i1 = image(&dickson[d as usize])?;
        let i2 = image(&h2[d as usize])?;
        let s1 = Subspace::spanned_by(line_basis.dim(d), &i1);
        let s2 = Subspace::spanned_by(line_basis.dim(d), &i2);
        let stacked: Vec<BitVec> = i1.iter().chain(&i2).cloned().collect();
        rows.push(M2Row {
            degree: d,
            dickson: dickson[d as usize].dim() as u64,
            h2: h2[d as usize].dim() as u64,
            image_sum: s1.sum(&s2).dim() as u64,
            image_intersection: s1.intersection_dim(&s2) as u64,
            fiber_product: kernel(&stacked, line_basis.dim(d)).len() as u64,
        });
    }
    Ok(M2Table {
        restriction: "diagonal restriction v -> u on both factors",
        rows,
    })
}

pub fn m2_dims(cap: u64) -> Result<Vec<u64>> {
    Ok(m2_table(cap)?.dims())
}

#[derive(Debug, Clone, Serialize)]
pub struct NormRow {
    pub degree: u64,
    pub kernel: u64,
    pub image: u64,
    pub symmetric: u64,
    pub kernel_is_symmetric: bool,
    pub quotient: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NormReport {
    pub rows: Vec<NormRow>,
}

impl NormReport {
    pub fn holds(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.kernel_is_symmetric && r.quotient == u64::from(r.degree % 2 == 0))
    }
}

/// `F₂[w₁,w₂] → F₂[u,v] → F₂[u,v]` with the second map `1 + τ*`.
pub fn norm_sequence_check(cap: u64) -> Result<NormReport> {
    let ring = uv_ring();
    let basis = GradedBasis::new(&ring, cap);
    let symmetric = closure_spans(&SubalgebraSpec::parse(&ring, &SYMMETRIC_GENERATORS, cap)?, &basis, false)?;
    let tau = swap();
    let mut rows = Vec::new();
    for d in 0..=cap {
        let width = basis.dim(d);
        let images: Vec<BitVec> = basis.monos[d as usize]
            .iter()
            .map(|m| {
                let x = Poly::from_monomial(&ring, m.clone());
                basis.coords(&pull_back_poly(&x, &tau)?.add(&x)?, d)
            })
            .collect::<Result<_>>()?;
        let ker = Subspace::spanned_by(width, &kernel(&images, width));
        let im = Subspace::spanned_by(width, &images);
        rows.push(NormRow {
            degree: d,
            kernel: ker.dim() as u64,
            image: im.dim() as u64,
            symmetric: symmetric[d as usize].dim() as u64,
            kernel_is_symmetric: ker.same_as(&symmetric[d as usize]),
            quotient: (ker.dim() - im.dim()) as u64,
        });
    }
    Ok(NormReport { rows })
}

/// Dimensions of `F₂[u]/F₂[u²]`.
pub fn ext_witness_dims(cap: u64) -> Result<Vec<u64>> {
    let line = default_ring(1);
    let sub = subalgebra_dims(&SubalgebraSpec::parse(&line, &["u^2"], cap)?)?;
    let full = free_algebra_dims(&[1], cap as usize);
    Ok(full.iter().zip(sub).map(|(a, b)| a - b).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct ParityRow {
    pub p: u64,
    pub witness_dim: u64,
    pub p_minus_one_odd: bool,
    pub agrees: bool,
}

/// For each `p`, whether the witness in degree `p − 1` is nonzero exactly
/// when `p − 1` is odd.
pub fn parity_report(ps: impl IntoIterator<Item = u64>) -> Result<Vec<ParityRow>> {
    ps.into_iter()
        .map(|p| {
            if p < 1 {
                return Err(Error::Contract("p must be positive".into()));
            }
            let witness_dim = ext_witness_dims(p - 1)?[(p - 1) as usize];
            let odd = (p - 1) % 2 == 1;
            Ok(ParityRow {
                p,
                witness_dim,
                p_minus_one_odd: odd,
                agrees: (witness_dim != 0) == odd,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dickson_three_ways() {
        let cap = 15;
        let fixed = invariant_ring_dims(&general_linear_group(2), 2, cap).unwrap();
        let closure = subalgebra_dims(&SubalgebraSpec::parse(&uv_ring(), &DICKSON_GENERATORS, cap).unwrap()).unwrap();
        assert_eq!(fixed, free_algebra_dims(&[2, 3], cap as usize));
        assert_eq!(closure, fixed);
        assert_eq!(&fixed[..7], &[1, 0, 1, 1, 1, 1, 2]);
    }

    #[test]
    fn dickson_generators_are_fixed() {
        let ring = uv_ring();
        let gl = general_linear_group(2);
        assert_eq!(gl.len(), 6);
        for g in DICKSON_GENERATORS {
            let d = Poly::parse(&ring, g).unwrap();
            for m in &gl {
                assert_eq!(pull_back_poly(&d, m).unwrap(), d);
            }
        }
    }

    #[test]
    fn other_groups() {
        let id = LinearMap { source_dim: 2, rows: vec![0b01, 0b10] };
        assert_eq!(invariant_ring_dims(&[id], 2, 4).unwrap(), vec![1, 2, 3, 4, 5]);
        assert_eq!(invariant_ring_dims(&[swap()], 2, 5).unwrap(), free_algebra_dims(&[1, 2], 5));
        let singular = LinearMap { source_dim: 2, rows: vec![0b11, 0b11] };
        assert!(matches!(invariant_ring_dims(&[singular], 2, 3), Err(Error::Contract(_))));
    }

    #[test]
    fn simple_subalgebras() {
        let line = default_ring(1);
        assert_eq!(subalgebra_dims(&SubalgebraSpec::parse(&line, &["u"], 3).unwrap()).unwrap(), vec![1, 1, 1, 1]);
        assert!(SubalgebraSpec::parse(&line, &["u + u^2"], 3).is_err());
    }

    #[test]
    fn h2_generators_are_milnor_images() {
        let ring = uv_ring();
        let gens = h2_milnor_generators(40).unwrap();
        assert_eq!(gens.len(), 6);
        for (k, g) in gens.iter().enumerate().skip(1) {
            let e = (1u32 << k) - 1;
            let expected = Poly::parse(&ring, &format!("u^{}*v + u*v^{}", e + 1, e + 1)).unwrap();
            assert_eq!(g, &expected);
        }
    }

    #[test]
    fn h2_descriptions() {
        let report = h2_two_descriptions_check(12).unwrap();
        // identical in low degrees
        assert!(report.literal_mismatch.iter().all(|&d| d >= 4));
        assert_eq!(report.milnor_dims[4], 1);
        assert_eq!(report.stiefel_whitney_dims[4], 2);
        assert!(!report.literal_equal);
        assert!(!report.unstable_mismatch.is_empty());
        assert!(report.radical_depth.is_some());
        assert!(h2_two_descriptions_check(3).unwrap().literal_equal);
        // W is F₂ ⊕ w₂F₂[w₁, w₂]
        let mut expected = vec![1, 0];
        expected.extend(free_algebra_dims(&[1, 2], 10));
        assert_eq!(report.stiefel_whitney_dims, expected);
    }

    #[test]
    fn m2_examples() {
        let t = m2_table(12).unwrap();
        assert_eq!(t.rows[0].fiber_product, 1);
        assert!(t.rank_identity_holds());
        // (u² + uv + v², uv) both restrict to u²
        assert_eq!(t.rows[2].image_sum, 1);
        assert_eq!(t.rows[2].fiber_product, t.rows[2].dickson + t.rows[2].h2 - 1);
        for r in &t.rows {
            assert!(r.fiber_product <= r.dickson + r.h2);
            assert_eq!(r.fiber_product == r.dickson + r.h2, r.image_intersection == 0);
        }
    }

    #[test]
    fn norm_sequence() {
        let r = norm_sequence_check(12).unwrap();
        assert!(r.holds());
        assert_eq!(r.rows[1].kernel, 1);
        assert_eq!(r.rows[1].quotient, 0);
        assert_eq!(r.rows[2].kernel, 2);
        assert_eq!(r.rows[2].quotient, 1);
        assert_eq!(r.rows[0].quotient, 1);
    }

    #[test]
    fn parity() {
        let w = ext_witness_dims(9).unwrap();
        assert_eq!(w, vec![0, 1, 0, 1, 0, 1, 0, 1, 0, 1]);
        assert!(parity_report(3..=10).unwrap().iter().all(|r| r.agrees));
    }
}
