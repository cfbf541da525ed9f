//! `Tor^{-s,t}_{H*(K_p)}(M, F₂)` from the reduced bar complex
//! `B_s = M ⊗ Ā^{⊗s}`, `Ā = H̃*(K_p)`, with
//!
//! `d(m[a₁|…|a_s]) = m·φ(a₁)[a₂|…|a_s] + Σ m[…|a_i a_{i+1}|…]`.
//!
//! `M` is either `H*(K_2)` made a module through `φ(ι_p) = ψ`, or `F₂`.
//! Chains are materialised one internal degree `t` at a time.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{all_words, serre_generators, KnCohomology, SteenrodWord};
use crate::error::{Error, Result};
use crate::eval::{k2, OperationClass};
use crate::gf2::{rank, BitVec, Subspace};
use crate::invariants::GradedBasis;
use crate::poly::{free_algebra_dims, Monomial, Poly, Ring};

/// Largest internal degree accepted by [`bar_tor`].
pub const MAX_BAR_DEGREE: u64 = 16;
/// Largest number of bar cells in one bidegree.
pub const MAX_CELLS: usize = 250_000;
pub const DEFAULT_DEGREE: u64 = 12;
pub const DEFAULT_COLUMNS: usize = 4;
pub const DEFAULT_LOOP_DEGREE: u64 = 14;

/// `H*(K_p)` through degree `cap`.
pub struct AlgebraTruncation {
    pub p: u32,
    pub cap: u64,
    pub cohomology: KnCohomology,
    basis: GradedBasis,
}

impl AlgebraTruncation {
    pub fn new(p: u32, cap: u64) -> Result<Self> {
        let cohomology = KnCohomology::new(p, cap)?;
        let basis = GradedBasis::new(cohomology.ring(), cap);
        Ok(AlgebraTruncation { p, cap, cohomology, basis })
    }

    pub fn ring(&self) -> &Arc<Ring> {
        self.cohomology.ring()
    }

    pub fn basis(&self, d: u64) -> &[Monomial] {
        self.basis.monomials(d)
    }

    pub fn dims(&self) -> Vec<u64> {
        (0..=self.cap).map(|d| self.basis.dim(d) as u64).collect()
    }

    pub fn product(&self, a: &Monomial, b: &Monomial) -> Result<Monomial> {
        a.mul(b)
    }
}

#[derive(Clone, Debug)]
pub enum ModuleKind {
    Trivial,
    Class(OperationClass),
}

/// `M` with the action of `H*(K_p)` through `φ`.
pub struct ModuleTruncation {
    pub kind: ModuleKind,
    pub cap: u64,
    ring: Arc<Ring>,
    basis: GradedBasis,
    /// `φ` of each algebra generator `Sq^I ι_p`.
    generator_images: Vec<Poly>,
    phi_memo: Mutex<HashMap<Monomial, Poly>>,
}

impl ModuleTruncation {
    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn basis(&self, d: u64) -> &[Monomial] {
        self.basis.monomials(d)
    }

    pub fn dims(&self) -> Vec<u64> {
        (0..=self.cap).map(|d| self.basis.dim(d) as u64).collect()
    }

    pub fn generator_image(&self, i: usize) -> &Poly {
        &self.generator_images[i]
    }

    /// `φ(a)` for a monomial `a` of the algebra.
    pub fn phi(&self, a: &Monomial) -> Result<Poly> {
        if let Some(p) = self.phi_memo.lock().unwrap().get(a) {
            return Ok(p.clone());
        }
        let mut out = Poly::one(&self.ring);
        for (v, e) in a.iter() {
            out = out.mul(&self.generator_images[v].pow(e)?)?;
            if out.is_zero() {
                break;
            }
        }
        self.phi_memo.lock().unwrap().insert(a.clone(), out.clone());
        Ok(out)
    }

    /// `m · φ(a)`.
    pub fn act(&self, a: &Monomial, m: &Monomial) -> Result<Poly> {
        self.phi(a)?.mul_monomial(m)
    }
}

pub fn build_truncations(p: u32, kind: ModuleKind, cap: u64) -> Result<(AlgebraTruncation, ModuleTruncation)> {
    if cap > MAX_BAR_DEGREE {
        return Err(Error::Resource(format!("bar complex degree cap is {MAX_BAR_DEGREE}, got {cap}")));
    }
    if let ModuleKind::Class(psi) = &kind {
        if psi.target_degree != p as u64 {
            return Err(Error::Degree(format!("{psi} has degree {}, expected {p}", psi.target_degree)));
        }
    }
    let alg = AlgebraTruncation::new(p, cap)?;
    let (ring, generator_images) = match &kind {
        ModuleKind::Trivial => {
            let ring = Ring::new(Vec::new())?;
            let zero = Poly::zero(&ring);
            (ring, vec![zero; alg.ring().len()])
        }
        ModuleKind::Class(psi) => {
            let k = k2();
            let images = alg
                .cohomology
                .presentation()
                .generators
                .iter()
                .map(|g| {
                    if g.degree > cap {
                        Ok(Poly::zero(k.ring()))
                    } else {
                        k.apply_word(&g.word, &psi.expression)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            (k.ring().clone(), images)
        }
    };
    let module = ModuleTruncation {
        kind,
        cap,
        basis: GradedBasis::new(&ring, cap),
        ring,
        generator_images,
        phi_memo: Mutex::new(HashMap::new()),
    };
    Ok((alg, module))
}

/// A bar cell `m[a₁|…|a_s]`: the module monomial followed by the factors.
pub type Cell = Vec<Monomial>;

/// The reduced bar complex of a pair of truncations.
pub struct BarComplex {
    pub alg: AlgebraTruncation,
    pub module: ModuleTruncation,
}

impl BarComplex {
    pub fn new(p: u32, kind: ModuleKind, cap: u64) -> Result<Self> {
        let (alg, module) = build_truncations(p, kind, cap)?;
        Ok(BarComplex { alg, module })
    }

    pub fn cap(&self) -> u64 {
        self.alg.cap
    }

    /// Basis of `B_s` in internal degree `t`.
    pub fn cells(&self, s: usize, t: u64) -> Result<Vec<Cell>> {
        let p = self.alg.p as u64;
        let mut out = Vec::new();
        if t < s as u64 * p || t > self.cap() {
            return Ok(out);
        }
        let mut factors: Vec<Vec<Monomial>> = Vec::new();
        fn go(
            bar: &BarComplex,
            left: usize,
            degree: u64,
            prefix: &mut Vec<Monomial>,
            acc: &mut Vec<Vec<Monomial>>,
        ) -> Result<()> {
            let p = bar.alg.p as u64;
            if left == 0 {
                if degree == 0 {
                    acc.push(prefix.clone());
                    if acc.len() > MAX_CELLS {
                        return Err(Error::Resource(format!("more than {MAX_CELLS} bar cells")));
                    }
                }
                return Ok(());
            }
            if degree < left as u64 * p {
                return Ok(());
            }
            for d in p..=degree - (left as u64 - 1) * p {
                for a in bar.alg.basis(d) {
                    prefix.push(a.clone());
                    go(bar, left - 1, degree - d, prefix, acc)?;
                    prefix.pop();
                }
            }
            Ok(())
        }
        for t0 in 0..=t - s as u64 * p {
            let ms = self.module.basis(t0);
            if ms.is_empty() {
                continue;
            }
            factors.clear();
            go(self, s, t - t0, &mut Vec::new(), &mut factors)?;
            for m in ms {
                for f in &factors {
                    let mut cell = Vec::with_capacity(s + 1);
                    cell.push(m.clone());
                    cell.extend(f.iter().cloned());
                    out.push(cell);
                }
                if out.len() > MAX_CELLS {
                    return Err(Error::Resource(format!("more than {MAX_CELLS} bar cells")));
                }
            }
        }
        Ok(out)
    }

    /// `d` of one cell, as a list of cells with multiplicity.
    pub fn boundary_cell(&self, cell: &[Monomial]) -> Result<Vec<Cell>> {
        let s = cell.len() - 1;
        let mut out = Vec::new();
        if s == 0 {
            return Ok(out);
        }
        for n in self.module.act(&cell[1], &cell[0])?.terms() {
            let mut c = Vec::with_capacity(s);
            c.push(n.clone());
            c.extend(cell[2..].iter().cloned());
            out.push(c);
        }
        for i in 1..s {
            let mut c: Cell = cell[..i].to_vec();
            c.push(self.alg.product(&cell[i], &cell[i + 1])?);
            c.extend(cell[i + 2..].iter().cloned());
            out.push(c);
        }
        Ok(out)
    }

    /// `d` of a chain given as a set of cells.
    pub fn boundary(&self, chain: &BTreeSet<Cell>) -> Result<BTreeSet<Cell>> {
        let mut out = BTreeSet::new();
        for c in chain {
            for b in self.boundary_cell(c)? {
                if !out.remove(&b) {
                    out.insert(b);
                }
            }
        }
        Ok(out)
    }

    pub fn format_cell(&self, cell: &[Monomial]) -> String {
        let m = Poly::format_monomial(self.module.ring(), &cell[0]);
        let a: Vec<String> = cell[1..]
            .iter()
            .map(|x| Poly::format_monomial(self.alg.ring(), x))
            .collect();
        format!("{m}[{}]", a.join("|"))
    }

    /// Rows of `d_s : B_s(t) → B_{s−1}(t)` in the given cell orders.
    fn matrix(&self, source: &[Cell], target: &[Cell]) -> Result<Vec<BitVec>> {
        let index: HashMap<&Cell, usize> = target.iter().enumerate().map(|(i, c)| (c, i)).collect();
        source
            .iter()
            .map(|c| {
                let mut row = BitVec::zeros(target.len());
                for b in self.boundary_cell(c)? {
                    let j = index
                        .get(&b)
                        .ok_or_else(|| Error::Structural(format!("boundary cell {} outside the complex", self.format_cell(&b))))?;
                    row.flip(*j);
                }
                Ok(row)
            })
            .collect()
    }

    /// Homology of the full complex in internal degree `t`.
    fn degree_slice(&self, t: u64) -> Result<Vec<TorEntry>> {
        let top = (t / self.alg.p as u64) as usize;
        let cells: Vec<Vec<Cell>> = (0..=top + 1).map(|s| self.cells(s, t)).collect::<Result<_>>()?;
        let mut ranks = vec![0usize; top + 2];
        let mut previous: Option<Vec<BitVec>> = None;
        for s in 1..=top + 1 {
            let rows = self.matrix(&cells[s], &cells[s - 1])?;
            if let Some(prev) = &previous {
                for r in &rows {
                    let mut acc = BitVec::zeros(cells[s - 2].len());
                    for j in r.ones() {
                        acc.xor_assign(&prev[j]);
                    }
                    if !acc.is_zero() {
                        return Err(Error::Structural(format!("d∘d ≠ 0 at s = {s}, t = {t}")));
                    }
                }
            }
            let mut work = rows.clone();
            ranks[s] = rank(&mut work);
            previous = Some(rows);
        }
        Ok((0..=top)
            .map(|s| TorEntry {
                s,
                t,
                chain_dim: cells[s].len() as u64,
                tor: (cells[s].len() - ranks[s] - ranks[s + 1]) as u64,
            })
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TorEntry {
    pub s: usize,
    pub t: u64,
    pub chain_dim: u64,
    pub tor: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TorTable {
    pub p: u32,
    pub module: String,
    pub cap: u64,
    pub max_s: usize,
    pub entries: Vec<TorEntry>,
}

impl TorTable {
    pub fn get(&self, s: usize, t: u64) -> u64 {
        self.entries
            .iter()
            .find(|e| e.s == s && e.t == t)
            .map_or(0, |e| e.tor)
    }

    pub fn chain_dim(&self, s: usize, t: u64) -> u64 {
        self.entries
            .iter()
            .find(|e| e.s == s && e.t == t)
            .map_or(0, |e| e.chain_dim)
    }

    /// `Σ_s (−1)^s dim B_s(t) = Σ_s (−1)^s dim Tor^{-s,t}` for every `t`,
    /// over all `s` (the stored entries cover complete complexes).
    pub fn euler_consistent(&self) -> bool {
        (0..=self.cap).all(|t| {
            let (mut c, mut h) = (0i64, 0i64);
            for e in self.entries.iter().filter(|e| e.t == t) {
                let sign = if e.s % 2 == 0 { 1 } else { -1 };
                c += sign * e.chain_dim as i64;
                h += sign * e.tor as i64;
            }
            c == h
        })
    }

    /// Entries with `s ≤ max_s`.
    pub fn visible(&self) -> impl Iterator<Item = &TorEntry> {
        self.entries.iter().filter(move |e| e.s <= self.max_s)
    }

    /// `Σ_s Tor^{-s, n+s}` over the stored entries.
    pub fn total_degree(&self, n: u64) -> u64 {
        self.entries
            .iter()
            .filter(|e| e.t == n + e.s as u64)
            .map(|e| e.tor)
            .sum()
    }
}

impl fmt::Display for TorTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Tor^(-s,t) over H*(K_{}) with M = {}, t <= {}", self.p, self.module, self.cap)?;
        write!(f, "{:>4}", "s\\t")?;
        for t in 0..=self.cap {
            write!(f, "{t:>4}")?;
        }
        writeln!(f)?;
        for s in 0..=self.max_s {
            write!(f, "{s:>4}")?;
            for t in 0..=self.cap {
                if t < s as u64 * self.p as u64 {
                    write!(f, "{:>4}", ".")?;
                } else {
                    write!(f, "{:>4}", self.get(s, t))?;
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Tor of the bar complex for `ψ` (or the trivial module) through degree
/// `cap`; rows `s ≤ max_s` are reported.
pub fn bar_tor(p: u32, kind: ModuleKind, cap: u64, max_s: usize) -> Result<TorTable> {
    let module = match &kind {
        ModuleKind::Trivial => "F2".to_string(),
        ModuleKind::Class(psi) => format!("H*(K_2) via {psi}"),
    };
    let bar = BarComplex::new(p, kind, cap)?;
    bar_tor_of(&bar, module, max_s)
}

pub fn bar_tor_of(bar: &BarComplex, module: String, max_s: usize) -> Result<TorTable> {
    let slices: Vec<Vec<TorEntry>> = (0..=bar.cap())
        .into_par_iter()
        .map(|t| bar.degree_slice(t))
        .collect::<Result<_>>()?;
    Ok(TorTable {
        p: bar.alg.p,
        module,
        cap: bar.cap(),
        max_s,
        entries: slices.into_iter().flatten().collect(),
    })
}

/// `dim (M / M·φ(Ā))_t`, with the ideal generated by `Sq^I ψ` for every
/// word `I` (admissible or not).
pub fn psi_ideal_quotient_dims(psi: &OperationClass, cap: u64) -> Result<Vec<u64>> {
    let k = k2();
    let basis = GradedBasis::new(k.ring(), cap);
    let mut gens = vec![psi.expression.clone()];
    for d in 1..=cap.saturating_sub(psi.target_degree) {
        for w in all_words(d) {
            let v = k.apply_word(&w, &psi.expression)?;
            if !v.is_zero() {
                gens.push(v);
            }
        }
    }
    let mut out = Vec::new();
    for t in 0..=cap {
        let mut ideal = Subspace::new(basis.dim(t));
        for g in &gens {
            let e = g.degree().expect("homogeneous");
            if e > t {
                continue;
            }
            for m in basis.monomials(t - e) {
                ideal.insert(basis.coords(&g.mul_monomial(m)?, t)?);
            }
        }
        out.push((basis.dim(t) - ideal.dim()) as u64);
    }
    Ok(out)
}

/// `dims(s, t) = 0` for all `t ≤ s − 1`.
pub fn connectivity_check(table: &TorTable) -> bool {
    table
        .entries
        .iter()
        .all(|e| e.s == 0 || e.t + 1 > e.s as u64 || e.tor == 0)
}

/// Homology of the trivial-module bar complex, split by the exponent
/// vector of the product of all factors.
fn multigraded_tor(weights: &[u64], e: &[u32]) -> Vec<u64> {
    type Part = Vec<u32>;
    fn splits(e: &[u32]) -> Vec<Part> {
        let mut out: Vec<Part> = vec![Vec::new()];
        for &x in e {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (0..=x).map(move |k| {
                        let mut q = p.clone();
                        q.push(k);
                        q
                    })
                })
                .collect();
        }
        out.retain(|p| p.iter().any(|&k| k > 0));
        out
    }
    fn factorizations(e: &[u32], s: usize, memo: &mut HashMap<(Part, usize), Vec<Vec<Part>>>) -> Vec<Vec<Part>> {
        if s == 0 {
            return if e.iter().all(|&x| x == 0) { vec![Vec::new()] } else { Vec::new() };
        }
        if let Some(v) = memo.get(&(e.to_vec(), s)) {
            return v.clone();
        }
        let mut out = Vec::new();
        for first in splits(e) {
            let rest: Part = e.iter().zip(&first).map(|(a, b)| a - b).collect();
            for mut tail in factorizations(&rest, s - 1, memo) {
                tail.insert(0, first.clone());
                out.push(tail);
            }
        }
        memo.insert((e.to_vec(), s), out.clone());
        out
    }
    let _ = weights;
    let total: u32 = e.iter().sum();
    let mut memo = HashMap::new();
    let cells: Vec<Vec<Vec<Part>>> = (0..=total as usize + 1).map(|s| factorizations(e, s, &mut memo)).collect();
    let mut ranks = vec![0usize; cells.len() + 1];
    for s in 2..cells.len() {
        let index: HashMap<&Vec<Part>, usize> = cells[s - 1].iter().enumerate().map(|(i, c)| (c, i)).collect();
        let mut rows: Vec<BitVec> = cells[s]
            .iter()
            .map(|c| {
                let mut row = BitVec::zeros(cells[s - 1].len());
                for i in 0..s - 1 {
                    let mut merged: Vec<Part> = c[..i].to_vec();
                    merged.push(c[i].iter().zip(&c[i + 1]).map(|(a, b)| a + b).collect());
                    merged.extend(c[i + 2..].iter().cloned());
                    row.flip(index[&merged]);
                }
                row
            })
            .collect();
        ranks[s] = rank(&mut rows);
    }
    (0..=total as usize)
        .map(|s| (cells[s].len() - ranks[s] - ranks[s + 1]) as u64)
        .collect()
}

/// Exponent vectors `e` with `Σ e_i (w_i − 1) ≤ bound`, all `w_i ≥ 2`.
fn exponent_vectors(weights: &[u64], bound: u64) -> Vec<Vec<u32>> {
    let mut out: Vec<Vec<u32>> = vec![Vec::new()];
    for &w in weights {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                let used: u64 = prefix.iter().zip(weights).map(|(&k, &w)| k as u64 * (w - 1)).sum();
                (0..=((bound - used) / (w - 1)) as u32).map(move |k| {
                    let mut q = prefix.clone();
                    q.push(k);
                    q
                })
            })
            .collect();
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct LoopRow {
    pub n: u64,
    pub bar_total: u64,
    pub expected: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LoopReport {
    pub p: u32,
    pub rows: Vec<LoopRow>,
    pub pass: bool,
}

/// `Σ_s Tor^{-s, n+s}_{H*(K_p)}(F₂, F₂) = dim H^n(K_{p−1})` for `n ≤ n_max`.
pub fn loop_collapse_check(p: u32, n_max: u64) -> Result<LoopReport> {
    if !(2..=5).contains(&p) {
        return Err(Error::Contract(format!("loop check supports 2 ≤ p ≤ 5, got {p}")));
    }
    let weights: Vec<u64> = serre_generators(p, n_max + 1)
        .generators
        .iter()
        .map(|g| g.degree)
        .collect();
    let per_e: Vec<(u64, Vec<u64>)> = exponent_vectors(&weights, n_max)
        .into_par_iter()
        .map(|e| {
            let t: u64 = e.iter().zip(&weights).map(|(&k, &w)| k as u64 * w).sum();
            (t, multigraded_tor(&weights, &e))
        })
        .collect();
    let mut totals = vec![0u64; n_max as usize + 1];
    for (t, tor) in per_e {
        for (s, x) in tor.into_iter().enumerate() {
            if let Some(n) = t.checked_sub(s as u64).filter(|&n| n <= n_max) {
                totals[n as usize] += x;
            }
        }
    }
    let fiber = serre_generators(p - 1, n_max).degrees();
    let expected = free_algebra_dims(&fiber, n_max as usize);
    let rows: Vec<LoopRow> = (0..=n_max)
        .map(|n| LoopRow {
            n,
            bar_total: totals[n as usize],
            expected: expected[n as usize],
        })
        .collect();
    let pass = rows.iter().all(|r| r.bar_total == r.expected);
    Ok(LoopReport { p, rows, pass })
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainReport {
    pub psi: String,
    pub chain: Vec<String>,
    pub boundary: Vec<String>,
    pub is_cycle: bool,
    pub is_boundary: Option<bool>,
}

fn word(entries: &[u32]) -> SteenrodWord {
    SteenrodWord::new(entries.to_vec()).expect("positive entries")
}

fn generator_monomial(alg: &AlgebraTruncation, entries: &[u32]) -> Result<Monomial> {
    let w = if entries.is_empty() { SteenrodWord::identity() } else { word(entries) };
    let g = alg
        .cohomology
        .generator(&w)
        .ok_or_else(|| Error::Contract(format!("{w} ι_{} is not a generator", alg.p)))?;
    let m = g.terms().next().expect("generator").clone();
    Ok(m)
}

/// Whether a chain in `B_s(t)` is a boundary.
fn is_boundary(bar: &BarComplex, chain: &BTreeSet<Cell>, s: usize, t: u64) -> Result<bool> {
    let target = bar.cells(s, t)?;
    let index: HashMap<&Cell, usize> = target.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let rows = bar.matrix(&bar.cells(s + 1, t)?, &target)?;
    let space = Subspace::spanned_by(target.len(), &rows);
    let v = BitVec::from_indices(target.len(), chain.iter().map(|c| index[c]));
    Ok(space.contains(&v))
}

/// The degree-9 chain `[Sq⁴ι₅] + ι₂[Sq²ι₅] + ι₂²[ι₅]` for `ψ = ι₂q₀`.
pub fn candidate_chain_evidence() -> Result<ChainReport> {
    let psi = OperationClass::parse("i2*q0")?;
    let bar = BarComplex::new(5, ModuleKind::Class(psi.clone()), 9)?;
    let m = bar.module.ring().clone();
    let i2 = Monomial::var(m.var_index("i2").expect("i2"));
    let chain: BTreeSet<Cell> = [
        vec![Monomial::one(), generator_monomial(&bar.alg, &[4])?],
        vec![i2.clone(), generator_monomial(&bar.alg, &[2])?],
        vec![i2.pow(2)?, generator_monomial(&bar.alg, &[])?],
    ]
    .into_iter()
    .collect();
    let boundary = bar.boundary(&chain)?;
    let is_cycle = boundary.is_empty();
    Ok(ChainReport {
        psi: psi.to_string(),
        chain: chain.iter().map(|c| bar.format_cell(c)).collect(),
        boundary: boundary.iter().map(|c| bar.format_cell(c)).collect(),
        is_cycle,
        is_boundary: if is_cycle { Some(is_boundary(&bar, &chain, 1, 9)?) } else { None },
    })
}

/// Shuffle product of two bar chains with trivial module coefficients 1.
pub fn shuffle(x: &[Monomial], y: &[Monomial], module_unit: &Monomial) -> BTreeSet<Cell> {
    fn go(x: &[Monomial], y: &[Monomial], prefix: &mut Vec<Monomial>, out: &mut BTreeSet<Cell>) {
        if x.is_empty() && y.is_empty() {
            if !out.remove(prefix) {
                out.insert(prefix.clone());
            }
            return;
        }
        if let Some((a, rest)) = x.split_first() {
            prefix.push(a.clone());
            go(rest, y, prefix, out);
            prefix.pop();
        }
        if let Some((b, rest)) = y.split_first() {
            prefix.push(b.clone());
            go(x, rest, prefix, out);
            prefix.pop();
        }
    }
    let mut out = BTreeSet::new();
    go(x, y, &mut vec![module_unit.clone()], &mut out);
    out
}

/// `[Sq¹ι₄] · [Sq²Sq¹ι₄]` for `ψ = ι₂²`.
pub fn shuffle_smoke_test() -> Result<ChainReport> {
    let psi = OperationClass::parse("i2^2")?;
    let bar = BarComplex::new(4, ModuleKind::Class(psi.clone()), 12)?;
    let x = generator_monomial(&bar.alg, &[1])?;
    let y = generator_monomial(&bar.alg, &[2, 1])?;
    for a in [&x, &y] {
        let c: BTreeSet<Cell> = [vec![Monomial::one(), a.clone()]].into_iter().collect();
        if !bar.boundary(&c)?.is_empty() {
            return Err(Error::Structural(format!("{} is not a cycle", bar.format_cell(&c.into_iter().next().unwrap()))));
        }
    }
    let product = shuffle(&[x], &[y], &Monomial::one());
    let boundary = bar.boundary(&product)?;
    let is_cycle = boundary.is_empty();
    Ok(ChainReport {
        psi: psi.to_string(),
        chain: product.iter().map(|c| bar.format_cell(c)).collect(),
        boundary: boundary.iter().map(|c| bar.format_cell(c)).collect(),
        is_cycle,
        is_boundary: if is_cycle { Some(is_boundary(&bar, &product, 2, 12)?) } else { None },
    })
}

/// Structural checks on one ψ-module table.
#[derive(Debug, Clone, Serialize)]
pub struct BarCheck {
    pub psi: String,
    pub p: u32,
    pub cap: u64,
    pub max_s: usize,
    pub row_zero_matches_quotient: bool,
    pub vanishes_below_sp: bool,
    pub tor_1p_zero: bool,
    pub euler: bool,
    pub connectivity: bool,
}

impl BarCheck {
    pub fn pass(&self) -> bool {
        self.row_zero_matches_quotient && self.vanishes_below_sp && self.tor_1p_zero && self.euler && self.connectivity
    }
}

/// Runs the bar complex (which asserts `d∘d = 0`) and the structural checks.
pub fn bar_structural_check(psi: &OperationClass, cap: u64, max_s: usize) -> Result<(TorTable, BarCheck)> {
    let p = psi.target_degree as u32;
    let table = bar_tor(p, ModuleKind::Class(psi.clone()), cap, max_s)?;
    let quotient = psi_ideal_quotient_dims(psi, cap)?;
    let check = BarCheck {
        psi: psi.to_string(),
        p,
        cap,
        max_s,
        row_zero_matches_quotient: (0..=cap).all(|t| table.get(0, t) == quotient[t as usize]),
        vanishes_below_sp: table
            .entries
            .iter()
            .all(|e| e.t >= e.s as u64 * p as u64 || e.tor == 0),
        tor_1p_zero: cap < p as u64 || table.get(1, p as u64) == 0,
        euler: table.euler_consistent(),
        connectivity: connectivity_check(&table),
    };
    Ok((table, check))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn truncation_examples() {
        let (alg, module) = build_truncations(3, ModuleKind::Trivial, 6).unwrap();
        assert_eq!(alg.dims(), vec![1, 0, 0, 1, 1, 1, 2]);
        assert_eq!(module.dims(), vec![1, 0, 0, 0, 0, 0, 0]);
        let psi = OperationClass::parse("i2^2").unwrap();
        let (alg, module) = build_truncations(4, ModuleKind::Class(psi), 8).unwrap();
        assert_eq!(alg.dims()[4], 1);
        let i4 = generator_monomial(&alg, &[]).unwrap();
        assert_eq!(module.phi(&i4).unwrap().to_string(), "i2^2");
        // Sq²(ι₂²) = (Sq¹ι₂)² = q0^2, Sq¹(ι₂²) = 0
        assert_eq!(module.phi(&generator_monomial(&alg, &[2]).unwrap()).unwrap().to_string(), "q0^2");
        assert!(module.phi(&generator_monomial(&alg, &[1]).unwrap()).unwrap().is_zero());
        assert!(build_truncations(5, ModuleKind::Class(OperationClass::d2()), 20).is_err());
        assert!(build_truncations(4, ModuleKind::Class(OperationClass::d2()), 8).is_err());
    }

    #[test]
    fn module_action_matches_evaluation_on_forms() {
        use crate::eval::evaluate;
        use crate::qforms::QuadraticForm;
        let psi = OperationClass::parse("i2^2").unwrap();
        let (alg, module) = build_truncations(4, ModuleKind::Class(psi.clone()), 10).unwrap();
        for g in &alg.cohomology.presentation().generators {
            if g.degree > 10 {
                continue;
            }
            let image = OperationClass::new(module.phi(&generator_monomial(&alg, g.word.entries()).unwrap()).unwrap());
            for s in QuadraticForm::all(2) {
                let direct = crate::action::sq_word(g.word.entries(), &evaluate(&psi, &s).unwrap()).unwrap();
                match &image {
                    Ok(c) => assert_eq!(evaluate(c, &s).unwrap(), direct),
                    Err(_) => assert!(direct.is_zero()),
                }
            }
        }
    }

    #[test]
    fn trivial_module_matches_multigraded() {
        for p in 2..=3u32 {
            let table = bar_tor(p, ModuleKind::Trivial, 10, 10).unwrap();
            let weights: Vec<u64> = serre_generators(p, 10).generators.iter().map(|g| g.degree).collect();
            let mut direct: BTreeMap<(usize, u64), u64> = BTreeMap::new();
            for e in exponent_vectors(&weights, 10) {
                let t: u64 = e.iter().zip(&weights).map(|(&k, &w)| k as u64 * w).sum();
                if t > 10 {
                    continue;
                }
                for (s, x) in multigraded_tor(&weights, &e).into_iter().enumerate() {
                    *direct.entry((s, t)).or_default() += x;
                }
            }
            for e in &table.entries {
                assert_eq!(e.tor, direct.get(&(e.s, e.t)).copied().unwrap_or(0), "p={p} s={} t={}", e.s, e.t);
            }
        }
    }

    #[test]
    fn loop_checks() {
        let r = loop_collapse_check(2, 12).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.rows.iter().all(|x| x.expected == 1));
        let r = loop_collapse_check(3, 6).unwrap();
        assert!(r.pass, "{r:?}");
        let got: Vec<u64> = r.rows.iter().map(|x| x.bar_total).collect();
        assert_eq!(got, vec![1, 0, 1, 1, 1, 2, 2]);
        assert!(loop_collapse_check(4, 8).unwrap().pass);
    }

    #[test]
    fn structural_suite_small() {
        let (table, check) = bar_structural_check(&OperationClass::parse("i2^2").unwrap(), 10, 3).unwrap();
        assert!(check.pass(), "{check:?}\n{table}");
        assert_eq!(table.get(1, 4), 0);
        assert_eq!(table.get(0, 4), 0);
        assert_eq!(table.get(0, 2), 1);
    }

    #[test]
    fn connectivity_negative_control() {
        let table = TorTable {
            p: 2,
            module: "synthetic".into(),
            cap: 3,
            max_s: 2,
            entries: vec![TorEntry { s: 2, t: 1, chain_dim: 1, tor: 1 }],
        };
        assert!(!connectivity_check(&table));
    }

    #[test]
    fn shuffle_product_is_cycle() {
        let r = shuffle_smoke_test().unwrap();
        assert!(r.is_cycle, "{r:?}");
        assert_eq!(r.chain.len(), 2);
    }

    #[test]
    fn candidate_chain() {
        let r = candidate_chain_evidence().unwrap();
        assert_eq!(r.chain.len(), 3);
        // recorded as evidence; the boundary is q0^3
        assert!(!r.is_cycle);
        assert_eq!(r.boundary, vec!["q0^3[]".to_string()]);
    }
}
