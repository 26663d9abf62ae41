//! Command-line driver: ingest configuration and curve documents, run the
//! analysis pipeline, and emit deterministic machine-readable reports.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 verification mismatch,
//! 3 enumeration budget exceeded.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use latq::lattice::{config_from_exponents, config_from_tree, LatticeConfiguration};
use latq::linalg::{is_prime, next_prime};
use latq::quiver::build_quiver;
use latq::rep::{build_m, decompose, is_subrep, local_linear_independence, QuiverRep, SubRep};
use latq::strata::{
    brute_force_points, closure_leq, component_phi, components, enumerate_strata, phi,
    realize_stratum, stratum_dim, stratum_multiplicities, DoubleTreeGeom, StrataError,
    StrataTuple,
};
use latq::tropical::{
    condition_eq1, integral_tropical_hull, is_concentrated, multidegree_at, normalize_point,
    twist_closure_vertices, DualGraph, TwistCoeffs,
};
use latq::curve::{gamma_s_exponents, h0, h1, special_fiber_rep, Node, RationalNodalCurve};
use latq::{FieldMatrix, LaurentScalar, Subspace};

#[derive(Parser)]
#[command(name = "latq", about = "Lattice configurations, linked Grassmannian strata, and nodal-curve section spaces", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
struct Common {
    /// Field characteristic (prime); overrides the input document
    #[arg(long, global = true)]
    p: Option<u64>,
    /// Seed for all randomized constructions
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Pretty-print the report
    #[arg(long, global = true)]
    pretty: bool,
    /// Enumeration budget (overrides LQ_BUDGET)
    #[arg(long, global = true)]
    budget: Option<u128>,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a lattice configuration document
    Analyze {
        path: PathBuf,
        /// Take the convex closure first if the input is not convex
        #[arg(long)]
        close: bool,
        /// Also enumerate strata and components at this subspace dimension
        #[arg(long)]
        r: Option<usize>,
    },
    /// Enumerate strata, dimensions, and components at dimension r
    Strata {
        path: PathBuf,
        #[arg(long)]
        r: usize,
        /// Construct a witness point in every stratum
        #[arg(long)]
        realize: bool,
    },
    /// Compare exhaustive point enumeration against the predicted strata
    Bruteforce {
        path: PathBuf,
        #[arg(long)]
        r: usize,
        /// Field size for the enumeration
        #[arg(long, default_value_t = 2)]
        oracle: u64,
    },
    /// Twist-graph and tropical-hull analysis of a dual-graph document
    Tropical {
        path: PathBuf,
        /// Derive twist coefficients with k extra negative twists per vertex
        #[arg(long)]
        auto_concentrate: Option<i64>,
    },
    /// Verify the three-component cycle-curve family and print its exponents
    CurveExample {
        #[arg(long)]
        n12: usize,
        #[arg(long)]
        n13: usize,
        #[arg(long)]
        n23: usize,
        /// Base multidegree a1,a2,a3 (default: maximal admissible)
        #[arg(long, value_delimiter = ',', num_args = 3)]
        a: Option<Vec<i64>>,
    },
    /// The two-point Pluecker discrepancy fixture
    Counterexample,
    /// Integral tropical hull of a point-list document
    Hull { path: PathBuf },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help/version are successes, everything else is a usage error
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    format!("{:x}", h.finalize())
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    command: &'static str,
    p: u64,
    seed: u64,
    input_sha256: String,
    report: T,
}

fn emit<T: Serialize>(cli: &Cli, env: &Envelope<T>) -> Result<()> {
    let out = if cli.common.pretty {
        serde_json::to_string_pretty(env)?
    } else {
        serde_json::to_string(env)?
    };
    println!("{out}");
    Ok(())
}

// ---------------------------------------------------------------------------
// input documents

#[derive(Deserialize)]
struct TreeDoc {
    edges: Vec<(usize, usize)>,
    root: usize,
}

#[derive(Deserialize)]
struct ConfigDoc {
    p: Option<u64>,
    exponents: Option<Vec<Vec<i64>>>,
    tree: Option<TreeDoc>,
}

#[derive(Deserialize)]
struct GraphDoc {
    vertices: usize,
    edges: Vec<(usize, usize, usize)>,
}

#[derive(Deserialize)]
struct TropicalDoc {
    graph: GraphDoc,
    w0: Vec<i64>,
    coeffs: Option<Vec<Vec<i64>>>,
}

#[derive(Deserialize)]
struct HullDoc {
    points: Vec<Vec<i64>>,
}

/// Configuration input, kept rebuildable at any characteristic.
enum ConfigSource {
    Exponents(Vec<Vec<i64>>),
    Tree(TreeDoc),
}

impl ConfigSource {
    fn build(&self, p: u64) -> Result<(LatticeConfiguration, Vec<usize>)> {
        let built = match self {
            ConfigSource::Exponents(rows) => config_from_exponents(p, rows),
            ConfigSource::Tree(t) => config_from_tree(p, &t.edges, t.root),
        };
        built.map_err(|e| anyhow!("invalid configuration: {e}"))
    }
}

fn load_config(cli: &Cli, path: &PathBuf) -> Result<(ConfigSource, u64, String)> {
    let raw = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let hash = sha256_hex(&raw);
    let doc: ConfigDoc = serde_json::from_slice(&raw)
        .with_context(|| format!("parsing {}", path.display()))?;
    let p = cli.common.p.or(doc.p).unwrap_or(2);
    if !is_prime(p) {
        bail!("p = {p} is not prime");
    }
    let src = match (doc.exponents, doc.tree) {
        (Some(rows), None) => {
            if rows.is_empty() {
                bail!("empty lattice list");
            }
            ConfigSource::Exponents(rows)
        }
        (None, Some(t)) => ConfigSource::Tree(t),
        _ => bail!("document must contain exactly one of `exponents` or `tree`"),
    };
    Ok((src, p, hash))
}

fn tuple_list(d: &StrataTuple) -> Vec<((usize, usize), usize)> {
    d.iter().map(|(&e, &k)| (e, k)).collect()
}

/// Multiplicity vector of the ambient projective decomposition: the bound the
/// admissibility inequalities run against.
fn ambient_type(rep: &QuiverRep) -> Result<Vec<usize>> {
    Ok(decompose(rep, &SubRep::full(rep))
        .map_err(|e| anyhow!("{e}"))?
        .r_v)
}

// ---------------------------------------------------------------------------
// analyze

#[derive(Serialize)]
struct StratumEntry {
    ranks: Vec<((usize, usize), usize)>,
    dimension: i64,
    multiplicities_v: Vec<usize>,
    multiplicities_e: Vec<((usize, usize), usize)>,
    is_maximal: bool,
}

#[derive(Serialize)]
struct StrataSection {
    r: usize,
    strata: Vec<StratumEntry>,
    components: Vec<Vec<usize>>,
    component_ranks: Vec<Vec<((usize, usize), usize)>>,
    maximal_equal_components: bool,
}

#[derive(Serialize)]
struct AnalysisReport {
    d: usize,
    num_classes: usize,
    shift_matrix: Vec<Vec<i64>>,
    convex: bool,
    closed: bool,
    arrows: Vec<(usize, usize, i64)>,
    algebra_dim: usize,
    double_tree: bool,
    lli_per_class: Vec<bool>,
    lli: bool,
    ambient_projective: Option<Vec<usize>>,
    strata: Option<StrataSection>,
}

fn strata_section(rep: &QuiverRep, r: usize) -> Result<(StrataSection, bool)> {
    let geom = DoubleTreeGeom::from_rep(rep).map_err(|e| anyhow!("{e}"))?;
    let d_v = ambient_type(rep)?;
    let tuples = enumerate_strata(r, &geom, &d_v);
    let comps = components(r, &geom, &d_v);
    let comp_phis: Vec<StrataTuple> =
        comps.iter().map(|c| component_phi(c, &geom)).collect();
    let maximal: Vec<&StrataTuple> = tuples
        .iter()
        .filter(|d| !tuples.iter().any(|d2| *d2 != **d && closure_leq(d, d2)))
        .collect();
    let max_set: BTreeSet<Vec<((usize, usize), usize)>> =
        maximal.iter().map(|d| tuple_list(d)).collect();
    let comp_set: BTreeSet<Vec<((usize, usize), usize)>> =
        comp_phis.iter().map(tuple_list).collect();
    let agree = max_set == comp_set;
    let strata = tuples
        .iter()
        .map(|d| {
            let mult = stratum_multiplicities(d, r, &geom)
                .ok_or_else(|| anyhow!("admissible tuple has no multiplicities"))?;
            Ok(StratumEntry {
                ranks: tuple_list(d),
                dimension: stratum_dim(&mult, &d_v, &geom, rep.p),
                multiplicities_v: mult.r_v.clone(),
                multiplicities_e: mult.r_e.iter().map(|(&e, &k)| (e, k)).collect(),
                is_maximal: max_set.contains(&tuple_list(d)),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((
        StrataSection {
            r,
            strata,
            components: comps,
            component_ranks: comp_phis.iter().map(tuple_list).collect(),
            maximal_equal_components: agree,
        },
        agree,
    ))
}

fn cmd_analyze(cli: &Cli, path: &PathBuf, close: bool, r: Option<usize>) -> Result<u8> {
    let (src, p, hash) = load_config(cli, path)?;
    let (mut cfg, _) = src.build(p)?;
    let convex = cfg.is_convex().map_err(|e| anyhow!("{e}"))?;
    let mut closed = false;
    if !convex {
        if !close {
            bail!("configuration is not convex; rerun with --close");
        }
        let hull = latq::lattice::convex_closure(cfg.classes()).map_err(|e| anyhow!("{e}"))?;
        let lattices: Vec<latq::Lattice> =
            hull.iter().map(|c| c.representative().clone()).collect();
        cfg = LatticeConfiguration::new(&lattices).map_err(|e| anyhow!("{e}"))?.0;
        closed = true;
    }
    let quiver = build_quiver(&cfg);
    let arrows: Vec<(usize, usize, i64)> = quiver
        .arrows()
        .iter()
        .map(|&(i, j)| (i, j, quiver.weight(i, j)))
        .collect();
    let (lli_per_class, lli) = local_linear_independence(&cfg).map_err(|e| anyhow!("{e}"))?;
    let rep = build_m(&cfg).map_err(|e| anyhow!("{e}"))?;
    let ambient_projective = if lli {
        let dec = decompose(&rep, &SubRep::full(&rep)).map_err(|e| anyhow!("{e}"))?;
        Some(dec.r_v)
    } else {
        None
    };
    let (strata, mut ok) = match r {
        Some(r) if lli => {
            let (s, agree) = strata_section(&rep, r)?;
            (Some(s), agree)
        }
        _ => (None, true),
    };
    if r.is_some() && !lli {
        ok = false;
    }
    let report = AnalysisReport {
        d: cfg.d,
        num_classes: cfg.len(),
        shift_matrix: cfg.shift_matrix().clone(),
        convex,
        closed,
        arrows,
        algebra_dim: quiver.algebra_dim(),
        double_tree: quiver.double_tree().is_some(),
        lli_per_class,
        lli,
        ambient_projective,
        strata,
    };
    emit(cli, &Envelope { command: "analyze", p, seed: cli.common.seed, input_sha256: hash, report })?;
    Ok(if ok { 0 } else { 2 })
}

// ---------------------------------------------------------------------------
// strata

#[derive(Serialize)]
struct RealizedEntry {
    ranks: Vec<((usize, usize), usize)>,
    p_used: u64,
    dims: Vec<usize>,
    phi_verified: bool,
}

#[derive(Serialize)]
struct StrataReport {
    #[serde(flatten)]
    section: StrataSection,
    realized: Option<Vec<RealizedEntry>>,
}

fn cmd_strata(cli: &Cli, path: &PathBuf, r: usize, realize: bool) -> Result<u8> {
    let (src, p, hash) = load_config(cli, path)?;
    let (cfg, _) = src.build(p)?;
    let rep = build_m(&cfg).map_err(|e| anyhow!("{e}"))?;
    let (section, mut ok) = strata_section(&rep, r)?;
    let realized = if realize {
        let geom = DoubleTreeGeom::from_rep(&rep).map_err(|e| anyhow!("{e}"))?;
        let d_v = ambient_type(&rep)?;
        let mut rng = ChaCha8Rng::seed_from_u64(cli.common.seed);
        let mut out = Vec::new();
        for d in enumerate_strata(r, &geom, &d_v) {
            // retry with a larger field when witnesses need general position
            let mut pw = p;
            let (witness, rep_w, geom_w) = loop {
                let (cfg_w, _) = src.build(pw)?;
                let rep_w = build_m(&cfg_w).map_err(|e| anyhow!("{e}"))?;
                let geom_w = DoubleTreeGeom::from_rep(&rep_w).map_err(|e| anyhow!("{e}"))?;
                match realize_stratum(&rep_w, &geom_w, &d, r, &mut rng, 64) {
                    Ok(u) => break (u, rep_w, geom_w),
                    Err(StrataError::GeneralPosition) if pw < 1 << 14 => {
                        pw = next_prime(pw + 1);
                    }
                    Err(e) => return Err(anyhow!("realizing {:?}: {e}", tuple_list(&d))),
                }
            };
            let observed = phi(&rep_w, &geom_w, &witness).map_err(|e| anyhow!("{e}"))?;
            let verified = observed == d && is_subrep(&rep_w, &witness);
            ok &= verified;
            out.push(RealizedEntry {
                ranks: tuple_list(&d),
                p_used: pw,
                dims: witness.dim_vector(),
                phi_verified: verified,
            });
        }
        Some(out)
    } else {
        None
    };
    let report = StrataReport { section, realized };
    emit(cli, &Envelope { command: "strata", p, seed: cli.common.seed, input_sha256: hash, report })?;
    Ok(if ok { 0 } else { 2 })
}

// ---------------------------------------------------------------------------
// bruteforce

#[derive(Serialize)]
struct BruteforceReport {
    q: u64,
    r: usize,
    num_points: usize,
    observed_strata: Vec<Vec<((usize, usize), usize)>>,
    predicted_strata: Vec<Vec<((usize, usize), usize)>>,
    strata_agree: bool,
    observed_maximal: Vec<Vec<((usize, usize), usize)>>,
    component_ranks: Vec<Vec<((usize, usize), usize)>>,
    maximal_agree: bool,
    point_counts: Vec<(Vec<((usize, usize), usize)>, usize)>,
}

fn cmd_bruteforce(cli: &Cli, path: &PathBuf, r: usize, q: u64) -> Result<u8> {
    let (src, _, hash) = load_config(cli, path)?;
    if !is_prime(q) {
        bail!("oracle field size {q} is not prime");
    }
    let (cfg, _) = src.build(q)?;
    let rep = build_m(&cfg).map_err(|e| anyhow!("{e}"))?;
    let geom = DoubleTreeGeom::from_rep(&rep).map_err(|e| anyhow!("{e}"))?;
    let d_v = ambient_type(&rep)?;
    let points = match brute_force_points(&rep, r, cli.common.budget) {
        Ok(pts) => pts,
        Err(StrataError::Budget { needed, budget }) => {
            eprintln!("budget exceeded: needed {needed}, budget {budget}");
            return Ok(3);
        }
        Err(e) => return Err(anyhow!("{e}")),
    };
    let mut counts: std::collections::BTreeMap<Vec<((usize, usize), usize)>, usize> =
        Default::default();
    for u in &points {
        let t = phi(&rep, &geom, u).map_err(|e| anyhow!("{e}"))?;
        *counts.entry(tuple_list(&t)).or_default() += 1;
    }
    let observed: Vec<Vec<((usize, usize), usize)>> = counts.keys().cloned().collect();
    let predicted: BTreeSet<Vec<((usize, usize), usize)>> = enumerate_strata(r, &geom, &d_v)
        .iter()
        .map(tuple_list)
        .collect();
    let observed_set: BTreeSet<_> = observed.iter().cloned().collect();
    let strata_agree = observed_set == predicted;
    let tuples: Vec<StrataTuple> = enumerate_strata(r, &geom, &d_v);
    let observed_tuples: Vec<StrataTuple> = tuples
        .iter()
        .filter(|d| observed_set.contains(&tuple_list(d)))
        .cloned()
        .collect();
    let observed_maximal: BTreeSet<Vec<((usize, usize), usize)>> = observed_tuples
        .iter()
        .filter(|d| !observed_tuples.iter().any(|d2| *d2 != **d && closure_leq(d, d2)))
        .map(tuple_list)
        .collect();
    let comp_ranks: BTreeSet<Vec<((usize, usize), usize)>> = components(r, &geom, &d_v)
        .iter()
        .map(|c| tuple_list(&component_phi(c, &geom)))
        .collect();
    let maximal_agree = observed_maximal == comp_ranks;
    let report = BruteforceReport {
        q,
        r,
        num_points: points.len(),
        observed_strata: observed,
        predicted_strata: predicted.into_iter().collect(),
        strata_agree,
        observed_maximal: observed_maximal.into_iter().collect(),
        component_ranks: comp_ranks.into_iter().collect(),
        maximal_agree,
        point_counts: counts.into_iter().collect(),
    };
    let ok = report.strata_agree && report.maximal_agree;
    emit(cli, &Envelope { command: "bruteforce", p: q, seed: cli.common.seed, input_sha256: hash, report })?;
    Ok(if ok { 0 } else { 2 })
}

// ---------------------------------------------------------------------------
// tropical

#[derive(Serialize)]
struct TropicalReport {
    coeffs: Vec<Vec<i64>>,
    concentrated: Vec<bool>,
    condition_eq1: bool,
    closure_coords: Vec<Vec<i64>>,
    closure_multidegrees: Vec<Vec<i64>>,
    hull: Vec<Vec<i64>>,
    closure_equals_hull: bool,
}

fn cmd_tropical(cli: &Cli, path: &PathBuf, auto_concentrate: Option<i64>) -> Result<u8> {
    let raw = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let hash = sha256_hex(&raw);
    let doc: TropicalDoc = serde_json::from_slice(&raw)?;
    let g = DualGraph::new(doc.graph.vertices, &doc.graph.edges).map_err(|e| anyhow!("{e}"))?;
    let n = g.num_vertices();
    if doc.w0.len() != n {
        bail!("w0 has wrong length");
    }
    let coeffs: TwistCoeffs = match (doc.coeffs, auto_concentrate) {
        (Some(c), None) => c,
        (None, Some(k)) => {
            // one negative twist at the own vertex is one positive twist at
            // every other vertex; k adds extra rounds
            (0..n)
                .map(|i| (0..n).map(|j| if i == j { 0 } else { k + 1 }).collect())
                .collect()
        }
        (None, None) => bail!("document has no `coeffs`; pass --auto-concentrate"),
        (Some(_), Some(_)) => bail!("both `coeffs` and --auto-concentrate given"),
    };
    if coeffs.len() != n || coeffs.iter().any(|row| row.len() != n) {
        bail!("coeffs must be an n x n matrix");
    }
    let concentrated: Vec<bool> = (0..n)
        .map(|i| is_concentrated(&g, &multidegree_at(&g, &doc.w0, &coeffs[i]), i))
        .collect();
    let eq1 = condition_eq1(&coeffs);
    let verts = twist_closure_vertices(&g, &doc.w0, &coeffs).map_err(|e| anyhow!("{e}"))?;
    let closure_coords: Vec<Vec<i64>> = verts.iter().map(|(c, _)| c.clone()).collect();
    let hull = integral_tropical_hull(&coeffs.iter().map(|r| normalize_point(r)).collect::<Vec<_>>());
    let closure_set: BTreeSet<&Vec<i64>> = closure_coords.iter().collect();
    let hull_set: BTreeSet<&Vec<i64>> = hull.iter().collect();
    let contained = closure_set.is_subset(&hull_set);
    let equal = closure_set == hull_set;
    let report = TropicalReport {
        coeffs,
        concentrated,
        condition_eq1: eq1,
        closure_multidegrees: verts.iter().map(|(_, w)| w.clone()).collect(),
        closure_coords,
        hull,
        closure_equals_hull: equal,
    };
    // containment always holds; equality must track the eq1 verdict
    let ok = contained && equal == eq1;
    let p = cli.common.p.unwrap_or(2);
    emit(cli, &Envelope { command: "tropical", p, seed: cli.common.seed, input_sha256: hash, report })?;
    Ok(if ok { 0 } else { 2 })
}

fn cmd_hull(cli: &Cli, path: &PathBuf) -> Result<u8> {
    let raw = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let hash = sha256_hex(&raw);
    let doc: HullDoc = serde_json::from_slice(&raw)?;
    if doc.points.is_empty() {
        bail!("empty point list");
    }
    let hull = integral_tropical_hull(&doc.points);
    let p = cli.common.p.unwrap_or(2);
    emit(cli, &Envelope { command: "hull", p, seed: cli.common.seed, input_sha256: hash, report: hull })?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// curve example

#[derive(Serialize)]
struct CurveReport {
    n: (usize, usize, usize),
    a: Vec<i64>,
    p: u64,
    divisor: Vec<i64>,
    expected_h0: usize,
    closure_size: usize,
    h0_ok: bool,
    h1_ok: bool,
    boundary_isos: bool,
    kernel_dims: Vec<usize>,
    kernel_dims_ok: bool,
    kernels_span: bool,
    num_classes: usize,
    exponents: Vec<Vec<i64>>,
    convex: bool,
    lli: bool,
}

fn cmd_curve_example(cli: &Cli, n12: usize, n13: usize, n23: usize, a: Option<Vec<i64>>) -> Result<u8> {
    let n = [[0, n12, n13], [n12, 0, n23], [n13, n23, 0]];
    let deg: Vec<usize> = (0..3).map(|i| n[i].iter().sum()).collect();
    if deg.iter().filter(|&&d| d == 0).count() > 0 {
        bail!("every component must meet another one");
    }
    let a: Vec<i64> = match a {
        Some(a) => a,
        None => (0..3)
            .map(|i| {
                let m = (0..3).filter(|&j| j != i).map(|j| n[i][j]).min().unwrap();
                2 * m as i64 - 1
            })
            .collect(),
    };
    for i in 0..3 {
        let m = (0..3).filter(|&j| j != i).map(|j| n[i][j]).min().unwrap();
        if a[i] >= 2 * m as i64 {
            bail!("a[{i}] = {} is not admissible (needs < {})", a[i], 2 * m);
        }
    }
    let p = match cli.common.p {
        Some(p) if is_prime(p) => p,
        Some(p) => bail!("p = {p} is not prime"),
        None => next_prime(*deg.iter().max().unwrap() as u64),
    };
    // place node coordinates 0,1,2,... along each component
    let mut next_pt = vec![0u64; 3];
    let mut nodes = Vec::new();
    for i in 0..3 {
        for j in i + 1..3 {
            for _ in 0..n[i][j] {
                nodes.push(Node { ca: i, xa: next_pt[i], cb: j, xb: next_pt[j], c: 1 });
                next_pt[i] += 1;
                next_pt[j] += 1;
            }
        }
    }
    if next_pt.iter().any(|&k| k > p) {
        bail!("p = {p} too small for the node coordinates");
    }
    let curve = RationalNodalCurve::new(p, 3, nodes).map_err(|e| anyhow!("{e}"))?;
    let divisor: Vec<i64> = (0..3).map(|i| deg[i] as i64 - a[i] - 1).collect();
    let coeffs: TwistCoeffs = (0..3)
        .map(|i| (0..3).map(|j| i64::from(i != j)).collect())
        .collect();
    let expected_h0 = n12 + n13 + n23;

    let g = curve.dual_graph().map_err(|e| anyhow!("{e}"))?;
    let verts = twist_closure_vertices(&g, &a, &coeffs).map_err(|e| anyhow!("{e}"))?;
    let mut h0_ok = true;
    let mut h1_ok = true;
    for (_, w) in &verts {
        let full: Vec<i64> = w.iter().zip(&divisor).map(|(&x, &d)| x + d).collect();
        h0_ok &= h0(&curve, &full).dim() == expected_h0;
        h1_ok &= h1(&curve, &full) == 0;
    }

    let sfr = special_fiber_rep(&curve, &a, &coeffs, &divisor).map_err(|e| anyhow!("{e}"))?;
    let center = sfr.class_of[sfr.w0_vertex];
    // boundary multidegrees: one positive twist at each vertex
    let mut boundary_isos = true;
    for i in 0..3 {
        let coord = normalize_point(&(0..3).map(|j| i64::from(i == j)).collect::<Vec<_>>());
        let v = sfr
            .coords
            .iter()
            .position(|c| *c == coord)
            .ok_or_else(|| anyhow!("boundary multidegree missing from closure"))?;
        let f = sfr.vertex_map(sfr.w0_vertex, v);
        boundary_isos &= f.rows == f.cols && f.rank() == f.rows;
    }
    let mut kernel_dims = Vec::new();
    let mut kernel_dims_ok = true;
    let mut span = Subspace::zero(p, expected_h0);
    let mut total = 0usize;
    for i in 0..3 {
        let leaf = sfr.class_of[sfr.concentrated_vertex[i]];
        let k = if leaf == center {
            0
        } else {
            let m = sfr.class_map(center, leaf);
            let ker = Subspace::kernel_of(&m);
            span = span.sum(&Subspace::column_space(&sfr.class_map(leaf, center)));
            ker.dim()
        };
        total += k;
        kernel_dims.push(k);
        let (j, l) = match i {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        kernel_dims_ok &= k == n[j][l];
    }
    let kernels_span = span.dim() == total && total == expected_h0;

    let (cfg, _) = gamma_s_exponents(&sfr).map_err(|e| anyhow!("{e}"))?;
    let exponents = diag_exponents(&cfg)?;
    let convex = cfg.is_convex().map_err(|e| anyhow!("{e}"))?;
    let (_, lli) = local_linear_independence(&cfg).map_err(|e| anyhow!("{e}"))?;

    let report = CurveReport {
        n: (n12, n13, n23),
        a: a.clone(),
        p,
        divisor,
        expected_h0,
        closure_size: verts.len(),
        h0_ok,
        h1_ok,
        boundary_isos,
        kernel_dims,
        kernel_dims_ok,
        kernels_span,
        num_classes: cfg.len(),
        exponents,
        convex,
        lli,
    };
    let ok = report.h0_ok
        && report.h1_ok
        && report.boundary_isos
        && report.kernel_dims_ok
        && report.kernels_span
        && report.convex
        && report.lli;
    let hash = sha256_hex(format!("curve-example {n12} {n13} {n23} {a:?}").as_bytes());
    emit(cli, &Envelope { command: "curve-example", p, seed: cli.common.seed, input_sha256: hash, report })?;
    Ok(if ok { 0 } else { 2 })
}

/// Diagonal exponent rows of a configuration built from an exponent matrix.
fn diag_exponents(cfg: &LatticeConfiguration) -> Result<Vec<Vec<i64>>> {
    let mut rows = Vec::with_capacity(cfg.len());
    for c in cfg.classes() {
        let b = c.representative().basis();
        let mut row = Vec::with_capacity(cfg.d);
        for i in 0..cfg.d {
            for j in 0..cfg.d {
                if i != j && !b.get(i, j).is_zero() {
                    bail!("configuration is not diagonal");
                }
            }
            row.push(
                b.get(i, i)
                    .valuation()
                    .ok_or_else(|| anyhow!("zero diagonal entry"))?,
            );
        }
        rows.push(row);
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// counterexample

#[derive(Serialize)]
struct PlueckerCheck {
    p: u64,
    x1: Vec<u64>,
    x2: Vec<u64>,
    minors_vanish: bool,
    linked_condition: bool,
    discrepancy: bool,
    witness_minors_vanish: bool,
    witness_linked_condition: bool,
    r1_equivalence: bool,
}

/// Pluecker coordinates of the row span of a 2 x 4 matrix over F_p, in the
/// column-pair order (01, 02, 03, 12, 13, 23).
fn pluecker2(m: &FieldMatrix) -> Vec<u64> {
    let p = m.p;
    let mut out = Vec::with_capacity(6);
    for a in 0..4 {
        for b in a + 1..4 {
            let det = latq::linalg::fp_sub(
                p,
                latq::linalg::fp_mul(p, m.get(0, a), m.get(1, b)),
                latq::linalg::fp_mul(p, m.get(0, b), m.get(1, a)),
            );
            out.push(det);
        }
    }
    out
}

/// All 2x2 minors of the stacked 2 x k matrix vanish modulo t.
fn minors_vanish(r1: &[LaurentScalar], r2: &[LaurentScalar]) -> bool {
    let k = r1.len();
    for a in 0..k {
        for b in a + 1..k {
            let m = r1[a].mul(&r2[b]).sub(&r1[b].mul(&r2[a]));
            if !m.is_zero() && m.valuation() == Some(0) {
                return false;
            }
        }
    }
    true
}

fn two_point_rep(p: u64) -> Result<QuiverRep> {
    let (cfg, _) = config_from_exponents(p, &[vec![0, 0, 0, 0], vec![-1, 0, 0, 0]])
        .map_err(|e| anyhow!("{e}"))?;
    build_m(&cfg).map_err(|e| anyhow!("{e}"))
}

/// Stacked-minor test for a candidate pair of subspaces, using the basis
/// change between the two diagonal lattices: coordinates involving the first
/// basis vector pick up one power of t on the first row.
fn pair_minors_vanish(p: u64, x1: &[u64], x2: &[u64], weights: &[i64]) -> bool {
    let r1: Vec<LaurentScalar> = x1
        .iter()
        .zip(weights)
        .map(|(&c, &w)| LaurentScalar::from_const(p, c).mul(&LaurentScalar::t_pow(p, w)))
        .collect();
    let r2: Vec<LaurentScalar> = x2.iter().map(|&c| LaurentScalar::from_const(p, c)).collect();
    minors_vanish(&r1, &r2)
}

fn cmd_counterexample(cli: &Cli) -> Result<u8> {
    let p = cli.common.p.unwrap_or(2);
    if !is_prime(p) {
        bail!("p = {p} is not prime");
    }
    let rep = two_point_rep(p)?;
    // fixture point: span{e1, e2} at the standard lattice, span{e2 + e4, e3}
    // at the shifted one
    let u1 = FieldMatrix::from_rows(p, &[vec![1, 0, 0, 0], vec![0, 1, 0, 0]]);
    let u2 = FieldMatrix::from_rows(p, &[vec![0, 1, 0, 1], vec![0, 0, 1, 0]]);
    let x1 = pluecker2(&u1);
    let x2 = pluecker2(&u2);
    // wedge weights of the basis change diag(t, 1, 1, 1): pairs with index 0
    let weights = [1i64, 1, 1, 0, 0, 0];
    let fixture_minors = pair_minors_vanish(p, &x1, &x2, &weights);
    let candidate = SubRep {
        spaces: vec![
            Subspace::from_rows(p, 4, &u1.rows_vec()),
            Subspace::from_rows(p, 4, &u2.rows_vec()),
        ],
    };
    let linked = is_subrep(&rep, &candidate);

    // a point of an actual component satisfies both conditions
    let geom = DoubleTreeGeom::from_rep(&rep).map_err(|e| anyhow!("{e}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cli.common.seed);
    let d: StrataTuple = [((0usize, 1usize), 2usize), ((1, 0), 0)].into_iter().collect();
    let witness = realize_stratum(&rep, &geom, &d, 2, &mut rng, 256).map_err(|e| anyhow!("{e}"))?;
    let w1 = FieldMatrix::from_rows(p, &witness.spaces[0].basis_rows());
    let w2 = FieldMatrix::from_rows(p, &witness.spaces[1].basis_rows());
    let witness_minors = pair_minors_vanish(p, &pluecker2(&w1), &pluecker2(&w2), &weights);
    let witness_linked = is_subrep(&rep, &witness);

    // at r = 1 the minor locus and the linked condition agree exactly
    let line_weights = [1i64, 0, 0, 0];
    let lines = latq::linalg::enumerate_subspaces(p, 4, 1);
    let mut r1_equiv = true;
    for l1 in &lines {
        for l2 in &lines {
            let v1 = l1.basis_rows().remove(0);
            let v2 = l2.basis_rows().remove(0);
            let minors = pair_minors_vanish(p, &v1, &v2, &line_weights);
            let sub = is_subrep(
                &rep,
                &SubRep { spaces: vec![l1.clone(), l2.clone()] },
            );
            r1_equiv &= minors == sub;
        }
    }

    let report = PlueckerCheck {
        p,
        x1,
        x2,
        minors_vanish: fixture_minors,
        linked_condition: linked,
        discrepancy: fixture_minors && !linked,
        witness_minors_vanish: witness_minors,
        witness_linked_condition: witness_linked,
        r1_equivalence: r1_equiv,
    };
    let ok = report.discrepancy && witness_minors && witness_linked;
    let hash = sha256_hex(b"counterexample fixture");
    emit(cli, &Envelope { command: "counterexample", p, seed: cli.common.seed, input_sha256: hash, report })?;
    Ok(if ok { 0 } else { 2 })
}

// ---------------------------------------------------------------------------

fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Analyze { path, close, r } => cmd_analyze(cli, path, *close, *r),
        Command::Strata { path, r, realize } => cmd_strata(cli, path, *r, *realize),
        Command::Bruteforce { path, r, oracle } => cmd_bruteforce(cli, path, *r, *oracle),
        Command::Tropical { path, auto_concentrate } => {
            cmd_tropical(cli, path, *auto_concentrate)
        }
        Command::CurveExample { n12, n13, n23, a } => {
            cmd_curve_example(cli, *n12, *n13, *n23, a.clone())
        }
        Command::Counterexample => cmd_counterexample(cli),
        Command::Hull { path } => cmd_hull(cli, path),
    }
}
