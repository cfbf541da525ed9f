//! The acceptance suite: twelve exact checks shared by `steenrod verify`
//! and the `acceptance` test target.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::action::{milnor_q, sq_word};
use crate::algebra::{adem_normalize, all_words, serre_generators, SteenrodWord};
use crate::error::Result;
use crate::eval::{generated_by, OperationClass, SubfunctorWitness};
use crate::invariants::{
    ext_witness_dims, general_linear_group, h2_two_descriptions_check, invariant_ring_dims, m2_table,
    norm_sequence_check, parity_report, subalgebra_dims, uv_ring, SubalgebraSpec, DICKSON_GENERATORS,
};
use crate::poly::{free_algebra_dims, Poly};
use crate::qforms::{default_ring, orbit_census, QuadraticForm};
use crate::tor::{bar_structural_check, loop_collapse_check};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
    /// Set when the check is known to fail for a documented mathematical reason.
    pub known_divergence: Option<&'static str>,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let status = match (self.pass, self.known_divergence) {
            (true, _) => "PASS",
            (false, Some(_)) => "FAIL (known divergence)",
            (false, None) => "FAIL",
        };
        format!("[{status}] {:>2}. {} ({:.2}s): {}", self.id, self.name, self.seconds, self.detail)
    }

    /// A failure that is not explained by a documented divergence.
    pub fn unexpected_failure(&self) -> bool {
        !self.pass && self.known_divergence.is_none()
    }
}

pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub known_divergence: Option<&'static str>,
    run: fn(u64) -> Result<(bool, String)>,
}

const H2_DIVERGENCE: &str = "the algebra generated by uv and Q_i(uv) is strictly smaller than \
the one generated by w1^j w2 from degree 4 on (u^2v^2 versus u^2v^2, u^3v + uv^3); \
the two agree after quadratic closure";

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { id: 1, name: "Milnor identities", known_divergence: None, run: milnor_identities },
        Criterion { id: 2, name: "Adem faithfulness on H*(V_6)", known_divergence: None, run: adem_faithfulness },
        Criterion { id: 3, name: "Serre presentation of H*(K_2)", known_divergence: None, run: serre_series },
        Criterion { id: 4, name: "Kernel subfunctors", known_divergence: None, run: kernel_propositions },
        Criterion { id: 5, name: "Quadratic form census", known_divergence: None, run: census },
        Criterion { id: 6, name: "Dickson algebra three ways", known_divergence: None, run: dickson },
        Criterion { id: 7, name: "H_2 two descriptions", known_divergence: Some(H2_DIVERGENCE), run: h2_descriptions },
        Criterion { id: 8, name: "M_2 fiber product", known_divergence: None, run: m2 },
        Criterion { id: 9, name: "Norm sequence", known_divergence: None, run: norm },
        Criterion { id: 10, name: "Bar complex structure", known_divergence: None, run: bar_suite },
        Criterion { id: 11, name: "Loop space collapse", known_divergence: None, run: loop_collapse },
        Criterion { id: 12, name: "Parity witness", known_divergence: None, run: parity },
    ]
}

pub fn run_criterion(c: &Criterion, seed: u64) -> CriterionResult {
    let start = Instant::now();
    let (pass, detail) = match (c.run)(seed) {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionResult {
        id: c.id,
        name: c.name,
        pass,
        detail,
        seconds: start.elapsed().as_secs_f64(),
        known_divergence: c.known_divergence,
    }
}

pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    criteria().iter().map(|c| run_criterion(c, seed)).collect()
}

fn milnor_identities(_: u64) -> Result<(bool, String)> {
    let ring = default_ring(2);
    let u = Poly::var(&ring, "u")?;
    let u2 = Poly::parse(&ring, "u^2")?;
    let uv = Poly::parse(&ring, "u*v")?;
    let mut bad = Vec::new();
    for i in 0..=4u32 {
        let e = (1u64 << (i + 1)) - 1;
        let expected = Poly::parse(&ring, &format!("u^{}*v + u*v^{}", e + 1, e + 1))?;
        if !milnor_q(i, &u2)?.is_zero() {
            bad.push(format!("Q_{i}(u^2) != 0"));
        }
        if milnor_q(i, &uv)? != expected {
            bad.push(format!("Q_{i}(uv) != {expected}"));
        }
        if milnor_q(i, &u)? != Poly::parse(&ring, &format!("u^{}", e + 1))? {
            bad.push(format!("Q_{i}(u) != u^{}", e + 1));
        }
    }
    Ok((bad.is_empty(), if bad.is_empty() { "Q_i(u^2) = 0 and Q_i(uv) match for i <= 4".into() } else { bad.join("; ") }))
}

fn random_word(rng: &mut StdRng, max_degree: u64) -> SteenrodWord {
    let d = rng.gen_range(1..=max_degree);
    let mut entries = Vec::new();
    let mut run = 1u32;
    for _ in 1..d {
        if rng.gen_bool(0.5) {
            entries.push(run);
            run = 1;
        } else {
            run += 1;
        }
    }
    entries.push(run);
    SteenrodWord::new(entries).expect("positive entries")
}

fn adem_faithfulness(seed: u64) -> Result<(bool, String)> {
    let ring = default_ring(6);
    let battery: Vec<Poly> = ["u", "u*v", "u^2*v*w", "u*v*w*x*y*z", "u^3*v^2", "u*x + v*y + w*z", "u^5*z^2 + v^3*w"]
        .iter()
        .map(|s| Poly::parse(&ring, s))
        .collect::<Result<_>>()?;
    let mut words: Vec<SteenrodWord> = (1..=12).flat_map(all_words).collect();
    let exhaustive = words.len();
    let mut rng = StdRng::seed_from_u64(seed);
    words.extend((0..200).map(|_| random_word(&mut rng, 16)));
    let failures: Vec<String> = words
        .par_iter()
        .map(|w| -> Result<Option<String>> {
            let normal = adem_normalize(w);
            for f in &battery {
                let lhs = sq_word(w.entries(), f)?;
                let mut rhs = Poly::zero(&ring);
                for a in normal.words() {
                    rhs.add_assign(&sq_word(a.entries(), f)?)?;
                }
                if lhs != rhs {
                    return Ok(Some(format!("{w} on {f}")));
                }
            }
            Ok(None)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let detail = format!(
        "{} words ({exhaustive} exhaustive, 200 random, seed {seed:#x}) on {} classes; {} mismatches{}",
        words.len(),
        battery.len(),
        failures.len(),
        failures.first().map(|f| format!(", first: {f}")).unwrap_or_default()
    );
    Ok((failures.is_empty(), detail))
}

fn serre_series(_: u64) -> Result<(bool, String)> {
    let presentation = serre_generators(2, 20);
    let degrees = presentation.degrees();
    let from_generators = free_algebra_dims(&degrees, 20);
    let product = free_algebra_dims(&[2, 3, 5, 9, 17], 20);
    let ok = degrees == [2, 3, 5, 9, 17] && from_generators == product;
    Ok((ok, format!("generator degrees {degrees:?}; series {from_generators:?}")))
}

fn forms(n: usize, list: &[&str]) -> Result<Vec<QuadraticForm>> {
    list.iter().map(|s| QuadraticForm::parse(n, s)).collect()
}

fn kernel_propositions(_: u64) -> Result<(bool, String)> {
    let n_max = 3;
    let none: Vec<QuadraticForm> = Vec::new();
    let squares = forms(1, &["u^2"])?;
    let dickson = forms(2, &["u^2 + u*v + v^2"])?;
    let hyperbolic = forms(2, &["u*v"])?;
    let both = forms(2, &["u^2 + u*v + v^2", "u*v"])?;
    let cases: [(&str, &Vec<QuadraticForm>); 10] = [
        ("i2^2", &none),
        ("i2^3", &none),
        ("q0", &squares),
        ("q1", &squares),
        ("i2*q0", &squares),
        ("d2", &dickson),
        ("i2*d2", &dickson),
        ("h2", &hyperbolic),
        ("i2*h2", &hyperbolic),
        ("d2*h2", &both),
    ];
    let results: Vec<(String, bool)> = cases
        .par_iter()
        .map(|(psi, gens)| -> Result<(String, bool)> {
            let class = OperationClass::parse(psi)?;
            let witness = SubfunctorWitness::from_kernel(&class, n_max)?;
            Ok((psi.to_string(), generated_by(&witness, gens, n_max)))
        })
        .collect::<Result<_>>()?;
    let failed: Vec<&str> = results.iter().filter(|r| !r.1).map(|r| r.0.as_str()).collect();
    let detail = if failed.is_empty() {
        format!("{} classes, kernels equal the stated pullback closures for n <= {n_max}", cases.len())
    } else {
        format!("mismatch for {}", failed.join(", "))
    };
    Ok((failed.is_empty(), detail))
}

fn census(_: u64) -> Result<(bool, String)> {
    let mut problems = Vec::new();
    let mut counts = Vec::new();
    for n in 1..=4 {
        let orbits = orbit_census(n)?;
        counts.push(orbits.len());
        let total: u64 = orbits.iter().map(|o| o.size as u64).sum();
        if total != 1 << crate::qforms::coeff_count(n) {
            problems.push(format!("n={n}: orbit sizes sum to {total}"));
        }
        let mut seen = BTreeSet::new();
        for o in &orbits {
            let inv = o.class.representative.invariants();
            if !seen.insert((inv.rank, inv.defective, inv.arf)) {
                problems.push(format!("n={n}: two orbits share invariants {inv:?}"));
            }
            for s in &o.members {
                if s.invariants() != inv {
                    problems.push(format!("n={n}: invariants vary inside the orbit of {}", o.class.representative));
                }
            }
        }
        for s in QuadraticForm::all(n) {
            if s.polar_rank() == n && s.arf()? != s.arf_by_reduction()? {
                problems.push(format!("Arf disagreement on {s}"));
            }
        }
    }
    let reps: Vec<String> = orbit_census(2)?.iter().map(|o| o.class.representative.to_string()).collect();
    if reps != ["0", "u^2", "u*v", "u^2 + u*v + v^2"] {
        problems.push(format!("n=2 representatives {reps:?}"));
    }
    let ok = problems.is_empty();
    let detail = if ok {
        format!("orbit counts for n = 1..4: {counts:?}; n = 2: {reps:?}")
    } else {
        problems.join("; ")
    };
    Ok((ok, detail))
}

fn dickson(_: u64) -> Result<(bool, String)> {
    let cap = 15;
    let fixed = invariant_ring_dims(&general_linear_group(2), 2, cap)?;
    let closure = subalgebra_dims(&SubalgebraSpec::parse(&uv_ring(), &DICKSON_GENERATORS, cap)?)?;
    let free = free_algebra_dims(&[2, 3], cap as usize);
    Ok((fixed == closure && closure == free, format!("dims through degree {cap}: {fixed:?}")))
}

fn h2_descriptions(_: u64) -> Result<(bool, String)> {
    let r = h2_two_descriptions_check(12)?;
    let detail = format!(
        "uv/Q_i(uv) dims {:?}; w1^j w2 dims {:?}; spans differ in degrees {:?}; \
         unstable closures differ in {:?}; equal after x -> x^(2^k) with k = {}",
        r.milnor_dims,
        r.stiefel_whitney_dims,
        r.literal_mismatch,
        r.unstable_mismatch,
        r.radical_depth.map_or("none".into(), |k| k.to_string())
    );
    Ok((r.literal_equal, detail))
}

fn m2(_: u64) -> Result<(bool, String)> {
    let t = m2_table(12)?;
    let ok = t.rank_identity_holds() && t.rows[0].fiber_product == 1;
    Ok((ok, format!("dims {:?} ({})", t.dims(), t.restriction)))
}

fn norm(_: u64) -> Result<(bool, String)> {
    let r = norm_sequence_check(12)?;
    let q: Vec<u64> = r.rows.iter().map(|x| x.quotient).collect();
    Ok((r.holds(), format!("ker(1+tau*) symmetric through degree 12; ker/im dims {q:?}")))
}

fn bar_suite(_: u64) -> Result<(bool, String)> {
    let cases = [("i2^2", 12u64, 3usize), ("d2", 12, 3), ("h2", 12, 3)];
    let checks = cases
        .par_iter()
        .map(|(psi, cap, s)| bar_structural_check(&OperationClass::parse(psi)?, *cap, *s).map(|(_, c)| c))
        .collect::<Result<Vec<_>>>()?;
    let ok = checks.iter().all(|c| c.pass());
    let detail = checks
        .iter()
        .map(|c| format!("{} (p={}, D={}): {}", c.psi, c.p, c.cap, if c.pass() { "ok" } else { "FAILED" }))
        .collect::<Vec<_>>()
        .join("; ");
    Ok((ok, format!("d^2 = 0 asserted; {detail}")))
}

fn loop_collapse(_: u64) -> Result<(bool, String)> {
    let two = loop_collapse_check(2, 12)?;
    let three = loop_collapse_check(3, 6)?;
    let series = free_algebra_dims(&serre_generators(2, 6).degrees(), 6);
    let totals: Vec<u64> = three.rows.iter().map(|r| r.bar_total).collect();
    let ok = two.pass && three.pass && two.rows.iter().all(|r| r.bar_total == 1) && totals == series;
    Ok((ok, format!("p=2 totals all 1 for n <= 12: {}; p=3 totals {totals:?}", two.pass)))
}

fn parity(_: u64) -> Result<(bool, String)> {
    let w = ext_witness_dims(20)?;
    let pattern = w.iter().enumerate().all(|(d, &x)| x == (d % 2) as u64);
    let rows = parity_report(3..=10)?;
    let agree = rows.iter().all(|r| r.agrees);
    Ok((pattern && agree, format!("witness 1 exactly in odd degrees <= 20: {pattern}; p-1 in 2..=9 agree: {agree}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_words_have_bounded_degree() {
        let mut rng = StdRng::seed_from_u64(1);
        for _ in 0..100 {
            let w = random_word(&mut rng, 16);
            assert!((1..=16).contains(&w.degree()));
        }
    }

    #[test]
    fn ids_are_sequential() {
        let ids: Vec<u8> = criteria().iter().map(|c| c.id).collect();
        assert_eq!(ids, (1..=12).collect::<Vec<_>>());
    }
}
