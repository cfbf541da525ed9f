//! `steenrod`: command-line access to steenrod-core.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use steenrod_core::action::{milnor_q, sq};
use steenrod_core::algebra::{adem_normalize, f_basis, serre_generators, SteenrodWord};
use steenrod_core::eval::{evaluate, kernel_set_bounded, search_classes, OperationClass, DEFAULT_KERNEL_DIM};
use steenrod_core::invariants::{
    ext_witness_dims, general_linear_group, h2_two_descriptions_check, invariant_ring_dims, m2_table,
    norm_sequence_check, parity_report, subalgebra_dims, uv_ring, SubalgebraSpec, DICKSON_GENERATORS,
};
use steenrod_core::lannes::{l2_zero, tv_hk_degree0, tv_report};
use steenrod_core::poly::{free_algebra_dims, Poly, Ring};
use steenrod_core::qforms::{default_names, orbit_census, QuadraticForm};
use steenrod_core::tor::{
    bar_structural_check, bar_tor, candidate_chain_evidence, loop_collapse_check, shuffle_smoke_test, ModuleKind,
    DEFAULT_COLUMNS, DEFAULT_DEGREE,
};
use steenrod_core::verify::{criteria, run_criterion, DEFAULT_SEED};
use steenrod_core::Error;

const SCHEMA: &str = "steenrod-cli/1";

#[derive(Parser)]
#[command(name = "steenrod", version, about = "Exact mod-2 Steenrod algebra computations")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunConfig {
    /// Degree cap for dimension tables.
    #[arg(long, global = true)]
    max_degree: Option<u64>,
    /// Dimension n of V_n (or of K_n for serre-basis).
    #[arg(long, global = true)]
    dim: Option<usize>,
    /// Internal degree cap of the bar complex.
    #[arg(long, global = true)]
    bar_degree: Option<u64>,
    /// Number of bar columns s shown.
    #[arg(long, global = true)]
    bar_columns: Option<usize>,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Sq^k on a polynomial in degree-one variables.
    Sq {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        poly: String,
        /// Comma-separated variable names (inferred when omitted).
        #[arg(long)]
        vars: Option<String>,
    },
    /// Milnor primitive Q_i on a polynomial in degree-one variables.
    Milnor {
        #[arg(long)]
        i: u32,
        #[arg(long)]
        poly: String,
        #[arg(long)]
        vars: Option<String>,
    },
    /// Admissible normal form of a Steenrod word.
    Adem {
        #[arg(long)]
        word: String,
    },
    /// Serre generators of H*(K_n), n = --dim.
    SerreBasis {
        /// Also list the basis of the free unstable module F(n).
        #[arg(long)]
        free: bool,
    },
    /// Evaluate a class of H*(K_2) on a quadratic form.
    EvalOp {
        #[arg(long)]
        psi: String,
        #[arg(long)]
        form: String,
    },
    /// Forms on V_n killed by a class.
    Kernel {
        #[arg(long)]
        psi: String,
    },
    /// Invariants and orbit representative of a form.
    Classify {
        #[arg(long)]
        form: String,
    },
    /// GL_n-orbits of quadratic forms on V_n.
    Census,
    /// Dickson algebra dimensions three ways.
    Dickson,
    /// Dimensions of a subalgebra of a polynomial ring.
    Subalgebra {
        /// Comma-separated homogeneous generators.
        #[arg(long)]
        gens: String,
        #[arg(long)]
        vars: Option<String>,
    },
    /// Compare the two generating sets of H_2.
    H2Check,
    /// Fiber product of D(2) and H_2.
    M2,
    /// Norm sequence of Z/2 acting on F_2[u,v], and the parity witness.
    NormCheck,
    /// Dimensions of T_V F(p) and T_V H*(K_p) in degree 0.
    Tv {
        #[arg(long)]
        p: u64,
        /// Also report the degree-0 fiber algebra of this class on V_n.
        #[arg(long)]
        psi: Option<String>,
    },
    /// Tor over H*(K_p) from the reduced bar complex.
    Tor {
        /// Class of H*(K_2) defining the module; p is its degree.
        #[arg(long, conflicts_with = "trivial")]
        psi: Option<String>,
        /// Use F_2 as the module.
        #[arg(long, requires = "p")]
        trivial: bool,
        #[arg(long)]
        p: Option<u32>,
        /// Also report the shuffle product and the degree-9 candidate chain.
        #[arg(long)]
        evidence: bool,
    },
    /// Tor over H*(K_p) with trivial coefficients against H*(K_{p-1}).
    LoopCheck {
        #[arg(long)]
        p: u32,
    },
    /// Classes whose kernel is the subfunctor generated by given forms.
    Search {
        /// Comma-separated generating forms.
        #[arg(long)]
        generators: String,
    },
    /// Run the acceptance suite.
    Verify {
        /// Comma-separated criterion ids.
        #[arg(long)]
        only: Option<String>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Sq { .. } => "sq",
            Command::Milnor { .. } => "milnor",
            Command::Adem { .. } => "adem",
            Command::SerreBasis { .. } => "serre-basis",
            Command::EvalOp { .. } => "eval-op",
            Command::Kernel { .. } => "kernel",
            Command::Classify { .. } => "classify",
            Command::Census => "census",
            Command::Dickson => "dickson",
            Command::Subalgebra { .. } => "subalgebra",
            Command::H2Check => "h2-check",
            Command::M2 => "m2",
            Command::NormCheck => "norm-check",
            Command::Tv { .. } => "tv",
            Command::Tor { .. } => "tor",
            Command::LoopCheck { .. } => "loop-check",
            Command::Search { .. } => "search",
            Command::Verify { .. } => "verify",
        }
    }
}

enum Failure {
    Core(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type CliResult = Result<Report, Failure>;

struct Report {
    text: String,
    json: Value,
    ok: bool,
}

impl Report {
    fn new(text: impl Into<String>, json: impl Serialize) -> Self {
        Report {
            text: text.into(),
            json: serde_json::to_value(json).expect("serializable"),
            ok: true,
        }
    }
}

fn identifiers(text: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut cur = String::new();
    let mut in_exp = false;
    for c in text.chars().chain(std::iter::once(' ')) {
        if c.is_ascii_alphanumeric() || c == '_' {
            if cur.is_empty() && (c.is_ascii_digit() || in_exp) {
                continue;
            }
            cur.push(c);
        } else {
            if !cur.is_empty() && !out.contains(&cur) {
                out.push(cur.clone());
            }
            cur.clear();
            in_exp = c == '^';
        }
    }
    out
}

/// Ring of degree-one variables: explicit, or the shortest prefix of the
/// default names `u, v, w, …` covering the input, or the names sorted.
fn infer_ring(text: &str, vars: Option<&str>) -> Result<Arc<Ring>, Failure> {
    if let Some(v) = vars {
        let names: Vec<&str> = v.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        return Ok(Ring::degree_one(&names)?);
    }
    let ids = identifiers(text);
    Ok(Ring::degree_one(&infer_names(&ids))?)
}

fn infer_names(ids: &[String]) -> Vec<String> {
    let defaults = default_names(10);
    let positions: Option<Vec<usize>> = ids.iter().map(|i| defaults.iter().position(|d| d == i)).collect();
    match positions {
        Some(p) => defaults[..p.into_iter().max().map_or(1, |m| m + 1)].to_vec(),
        None => {
            let mut v = ids.to_vec();
            v.sort();
            v
        }
    }
}

fn form_dim(text: &str, dim: Option<usize>) -> usize {
    dim.unwrap_or_else(|| infer_names(&identifiers(text)).len())
}

fn parse_form(text: &str, dim: Option<usize>) -> Result<QuadraticForm, Failure> {
    Ok(QuadraticForm::parse(form_dim(text, dim), text)?)
}

fn table(rows: &[(String, String)]) -> String {
    let w = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
    rows.iter()
        .map(|(a, b)| format!("{a:<w$}  {b}\n"))
        .collect()
}

fn dims_line(label: &str, dims: &[impl ToString]) -> String {
    let parts: Vec<String> = dims.iter().map(ToString::to_string).collect();
    format!("{label}: {}\n", parts.join(" "))
}

fn run(cli: Cli) -> CliResult {
    let cfg = cli.config;
    match cli.command {
        Command::Sq { k, poly, vars } => {
            let ring = infer_ring(&poly, vars.as_deref())?;
            let f = Poly::parse(&ring, &poly)?;
            let r = sq(k, &f)?;
            Ok(Report::new(
                format!("{}\n", r.factored()),
                json!({"k": k, "input": f.to_string(), "result": r.to_string(), "factored": r.factored()}),
            ))
        }
        Command::Milnor { i, poly, vars } => {
            let ring = infer_ring(&poly, vars.as_deref())?;
            let f = Poly::parse(&ring, &poly)?;
            let r = milnor_q(i, &f)?;
            Ok(Report::new(
                format!("{}\n", r.factored()),
                json!({"i": i, "input": f.to_string(), "result": r.to_string(), "factored": r.factored()}),
            ))
        }
        Command::Adem { word } => {
            let w = SteenrodWord::parse(&word)?;
            let n = adem_normalize(&w);
            let words: Vec<String> = n.words().map(ToString::to_string).collect();
            Ok(Report::new(
                format!("{n}\n"),
                json!({"word": w.to_string(), "normal_form": n.to_string(), "terms": words}),
            ))
        }
        Command::SerreBasis { free } => {
            let n = cfg.dim.unwrap_or(2) as u32;
            if n == 0 {
                return Err(Failure::Usage("--dim must be positive".into()));
            }
            let cap = cfg.max_degree.unwrap_or(20);
            let pres = serre_generators(n, cap);
            let degrees = pres.degrees();
            let series = free_algebra_dims(&degrees, cap as usize);
            let rows: Vec<(String, String)> = pres
                .generators
                .iter()
                .map(|g| (g.name.clone(), format!("degree {:>3}  Sq^I = {}", g.degree, g.word)))
                .collect();
            let mut text = format!("H*(K_{n}) generators through degree {cap}\n{}", table(&rows));
            text += &dims_line("dims", &series);
            let mut out = json!({
                "n": n,
                "cap": cap,
                "generators": pres.generators.iter().map(|g| json!({"name": g.name, "degree": g.degree, "word": g.word.to_string()})).collect::<Vec<_>>(),
                "dims": series,
            });
            if free {
                let basis: Vec<String> = f_basis(n, cap).iter().map(ToString::to_string).collect();
                text += &format!("F({n}) basis: {}\n", basis.join(", "));
                out["free_basis"] = json!(basis);
            }
            Ok(Report::new(text, out))
        }
        Command::EvalOp { psi, form } => {
            let c = OperationClass::parse(&psi)?;
            let s = parse_form(&form, cfg.dim)?;
            let r = evaluate(&c, &s)?;
            Ok(Report::new(
                format!("{}\n", r.factored()),
                json!({"psi": c, "form": s, "degree": c.target_degree, "result": r.to_string()}),
            ))
        }
        Command::Kernel { psi } => {
            let c = OperationClass::parse(&psi)?;
            let n = cfg.dim.unwrap_or(2);
            let forms = kernel_set_bounded(&c, n, DEFAULT_KERNEL_DIM.max(n))?;
            let mut orbits: BTreeMap<QuadraticForm, (String, usize)> = BTreeMap::new();
            for s in &forms {
                let class = s.classify()?;
                orbits
                    .entry(class.representative)
                    .or_insert_with(|| (class.label(), 0))
                    .1 += 1;
            }
            let mut text = format!("kernel of {c} on V_{n}: {} forms\n", forms.len());
            for s in &forms {
                text += &format!("  {s}\n");
            }
            text += "orbits:\n";
            let rows: Vec<(String, String)> = orbits
                .iter()
                .map(|(rep, (label, size))| (format!("  {rep}"), format!("{label}, {size} forms")))
                .collect();
            text += &table(&rows);
            Ok(Report::new(
                text,
                json!({
                    "psi": c, "n": n, "forms": forms,
                    "orbits": orbits.iter().map(|(r, (l, k))| json!({"representative": r, "label": l, "size": k})).collect::<Vec<_>>(),
                }),
            ))
        }
        Command::Classify { form } => {
            let s = parse_form(&form, cfg.dim)?;
            let class = s.classify()?;
            let inv = s.invariants();
            Ok(Report::new(
                format!("{s}: {} (representative {})\n", class.label(), class.representative),
                json!({"form": s, "n": s.dim(), "class": class, "invariants": inv, "zero_count": s.zero_count()}),
            ))
        }
        Command::Census => {
            let n = cfg.dim.unwrap_or(2);
            let orbits = orbit_census(n)?;
            let rows: Vec<(String, String)> = orbits
                .iter()
                .map(|o| (o.class.representative.to_string(), format!("{}, {} forms", o.class.label(), o.size)))
                .collect();
            Ok(Report::new(
                format!("GL_{n}(F_2)-orbits on quadratic forms: {}\n{}", orbits.len(), table(&rows)),
                json!({"n": n, "orbits": orbits.iter().map(|o| json!({"class": o.class, "size": o.size})).collect::<Vec<_>>()}),
            ))
        }
        Command::Dickson => {
            let cap = cfg.max_degree.unwrap_or(15);
            let fixed = invariant_ring_dims(&general_linear_group(2), 2, cap)?;
            let closure = subalgebra_dims(&SubalgebraSpec::parse(&uv_ring(), &DICKSON_GENERATORS, cap)?)?;
            let free = free_algebra_dims(&[2, 3], cap as usize);
            let ok = fixed == closure && closure == free;
            let text = dims_line("GL_2 fixed points    ", &fixed)
                + &dims_line("generated subalgebra ", &closure)
                + &dims_line("free on degrees 2, 3 ", &free)
                + &format!("agree: {ok}\n");
            Ok(Report::new(text, json!({"cap": cap, "fixed": fixed, "closure": closure, "free": free, "agree": ok})))
        }
        Command::Subalgebra { gens, vars } => {
            let cap = cfg.max_degree.unwrap_or(12);
            let ring = infer_ring(&gens, vars.as_deref())?;
            let list: Vec<&str> = gens.split(',').map(str::trim).collect();
            let dims = subalgebra_dims(&SubalgebraSpec::parse(&ring, &list, cap)?)?;
            Ok(Report::new(dims_line("dims", &dims), json!({"generators": list, "cap": cap, "dims": dims})))
        }
        Command::H2Check => {
            let cap = cfg.max_degree.unwrap_or(12);
            let r = h2_two_descriptions_check(cap)?;
            let text = dims_line("uv, Q_i(uv)  ", &r.milnor_dims)
                + &dims_line("w1^j w2      ", &r.stiefel_whitney_dims)
                + &format!("identical spans: {}\n", r.literal_equal)
                + &format!("differ in degrees: {:?}\n", r.literal_mismatch)
                + &format!(
                    "equal after x -> x^(2^k): {}\n",
                    r.radical_depth.map_or("no".to_string(), |k| format!("yes, k = {k}"))
                );
            Ok(Report::new(text, r))
        }
        Command::M2 => {
            let t = m2_table(cfg.max_degree.unwrap_or(12))?;
            let rows: Vec<(String, String)> = t
                .rows
                .iter()
                .map(|r| {
                    (
                        format!("{:>3}", r.degree),
                        format!(
                            "D(2) {:>2}  H_2 {:>2}  image {:>1}  M_2 {:>2}",
                            r.dickson, r.h2, r.image_sum, r.fiber_product
                        ),
                    )
                })
                .collect();
            let text = format!("restriction: {}\n{}rank identity: {}\n", t.restriction, table(&rows), t.rank_identity_holds());
            Ok(Report::new(text, json!({"restriction": t.restriction, "dims": t.dims(), "rows": t.rows, "rank_identity": t.rank_identity_holds()})))
        }
        Command::NormCheck => {
            let cap = cfg.max_degree.unwrap_or(12);
            let r = norm_sequence_check(cap)?;
            let witness = ext_witness_dims(cap)?;
            let parity = parity_report(3..=10)?;
            let quotient: Vec<u64> = r.rows.iter().map(|x| x.quotient).collect();
            let text = dims_line("ker(1+tau*)     ", &r.rows.iter().map(|x| x.kernel).collect::<Vec<_>>())
                + &dims_line("F_2[w1,w2]      ", &r.rows.iter().map(|x| x.symmetric).collect::<Vec<_>>())
                + &dims_line("ker/im          ", &quotient)
                + &dims_line("F_2[u]/F_2[u^2] ", &witness)
                + &format!("sequence exact as stated: {}\n", r.holds())
                + &parity
                    .iter()
                    .map(|p| format!("p = {:>2}: witness in degree p-1 = {}, p-1 odd = {}, agree = {}\n", p.p, p.witness_dim, p.p_minus_one_odd, p.agrees))
                    .collect::<String>();
            Ok(Report::new(text, json!({"norm": r, "holds": r.holds(), "witness": witness, "parity": parity})))
        }
        Command::Tv { p, psi } => {
            let n = cfg.dim.unwrap_or(1);
            let cap = cfg.max_degree.unwrap_or(12);
            let report = tv_report(p, n as u64, cap)?;
            let degree0 = tv_hk_degree0(p, n as u64)?;
            let mut text = dims_line(&format!("T_V F({p}), dim V = {n}"), &report.dims);
            text += &format!("dim T_V(H*(K_{p}))^0 = {degree0}\n");
            let mut out = json!({"tv": report, "hk_degree0": degree0.to_string()});
            if let Some(psi) = psi {
                let l2 = l2_zero(&OperationClass::parse(&psi)?, n)?;
                text += &format!(
                    "fiber of {} on V_{n}: {} forms, function algebra of dimension {} ({} elements)\n",
                    l2.class, l2.fiber_size, l2.dim, l2.cardinality
                );
                out["l2"] = json!({"class": l2.class, "n": n, "fiber_size": l2.fiber_size, "dim": l2.dim.to_string(), "cardinality": l2.cardinality.to_string()});
            }
            Ok(Report::new(text, out))
        }
        Command::Tor { psi, trivial, p, evidence } => {
            let cap = cfg.bar_degree.unwrap_or(DEFAULT_DEGREE);
            let columns = cfg.bar_columns.unwrap_or(DEFAULT_COLUMNS);
            let mut out;
            let mut text;
            match (psi, trivial) {
                (Some(psi), false) => {
                    let c = OperationClass::parse(&psi)?;
                    if let Some(p) = p {
                        if p as u64 != c.target_degree {
                            return Err(Failure::Usage(format!("{c} has degree {}, not {p}", c.target_degree)));
                        }
                    }
                    let (t, check) = bar_structural_check(&c, cap, columns)?;
                    text = format!("{t}checks: {}\n", if check.pass() { "pass" } else { "FAIL" });
                    out = json!({"table": t, "checks": check});
                }
                (None, true) => {
                    let t = bar_tor(p.expect("required by clap"), ModuleKind::Trivial, cap, columns)?;
                    text = t.to_string();
                    out = json!({"table": t});
                }
                _ => return Err(Failure::Usage("give --psi or --trivial --p P".into())),
            }
            if evidence {
                let shuffle = shuffle_smoke_test()?;
                let chain = candidate_chain_evidence()?;
                text += &format!(
                    "shuffle product for {}: {} (cycle: {}, boundary: {:?})\n",
                    shuffle.psi,
                    shuffle.chain.join(" + "),
                    shuffle.is_cycle,
                    shuffle.is_boundary
                );
                text += &format!(
                    "candidate chain for {}: {} has boundary {}\n",
                    chain.psi,
                    chain.chain.join(" + "),
                    if chain.boundary.is_empty() { "0".to_string() } else { chain.boundary.join(" + ") }
                );
                out["shuffle"] = json!(shuffle);
                out["candidate"] = json!(chain);
            }
            Ok(Report::new(text, out))
        }
        Command::LoopCheck { p } => {
            let n_max = cfg.max_degree.unwrap_or(12);
            let r = loop_collapse_check(p, n_max)?;
            let text = dims_line("bar totals      ", &r.rows.iter().map(|x| x.bar_total).collect::<Vec<_>>())
                + &dims_line(&format!("dim H^n(K_{})  ", p - 1), &r.rows.iter().map(|x| x.expected).collect::<Vec<_>>())
                + &format!("match: {}\n", r.pass);
            let ok = r.pass;
            let mut rep = Report::new(text, r);
            rep.ok = ok;
            Ok(rep)
        }
        Command::Search { generators } => {
            let p_max = cfg.max_degree.unwrap_or(9);
            let n_max = cfg.dim.unwrap_or(3);
            let dim = infer_names(&identifiers(&generators)).len();
            let gens: Vec<QuadraticForm> = generators
                .split(',')
                .map(|s| QuadraticForm::parse(dim, s.trim()))
                .collect::<Result<_, _>>()?;
            let hits = search_classes(p_max, &gens, n_max)?;
            let mut text = format!("{} classes of degree <= {p_max} (checked on V_n, n <= {n_max})\n", hits.len());
            for h in &hits {
                text += &format!("  degree {:>2}: {}\n", h.degree, h.class);
            }
            Ok(Report::new(text, json!({"p_max": p_max, "n_max": n_max, "generators": gens, "hits": hits})))
        }
        Command::Verify { only } => {
            let seed = cfg.seed.unwrap_or(DEFAULT_SEED);
            let ids: Option<Vec<u8>> = only
                .map(|s| {
                    s.split(',')
                        .map(|x| x.trim().parse::<u8>().map_err(|_| Failure::Usage(format!("bad criterion id {x:?}"))))
                        .collect::<Result<_, _>>()
                })
                .transpose()?;
            let results: Vec<_> = criteria()
                .iter()
                .filter(|c| ids.as_ref().is_none_or(|ids| ids.contains(&c.id)))
                .map(|c| run_criterion(c, seed))
                .collect();
            let ok = results.iter().all(|r| r.pass);
            let mut text: String = results.iter().map(|r| r.line() + "\n").collect();
            text += &format!("{}/{} passed\n", results.iter().filter(|r| r.pass).count(), results.len());
            let mut rep = Report::new(text, json!({"seed": seed, "criteria": results, "pass": ok}));
            rep.ok = ok;
            Ok(rep)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let as_json = cli.config.json;
    let command = cli.command.name();
    match run(cli) {
        Ok(report) => {
            if as_json {
                let doc = json!({"schema": SCHEMA, "command": command, "result": report.json});
                println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
            } else {
                print!("{}", report.text);
            }
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::Resource(_) | Error::Overflow => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
