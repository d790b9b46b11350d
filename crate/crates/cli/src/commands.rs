use std::path::PathBuf;
use std::str::FromStr;

use clap::Args;
use geogt::action::{self, Thresholds};
use geogt::chevalley::{self, ProductOrder};
use geogt::coarse::{self, CayleyBall, DeltaMode, FiniteGraphSpace};
use geogt::group::{FreeWord, GroupElement, IntZ, ModMatrix};
use geogt::horoball::{self, BallFamily, ScanPolicy};
use geogt::numring::{self, QuadOrder};
use geogt::rootsys::{self, RootSystem, RootVector};
use num_bigint::BigInt;
use num_rational::Rational64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::inputs::{self, GroupSpec};
use crate::{Failure, Format, Output};

fn system(name: &str) -> Result<RootSystem, Failure> {
    let (family, rank) = rootsys::parse_system_name(name)?;
    Ok(rootsys::build_root_system(family, rank)?)
}

/// A root index, or coordinates like `(1,-1,0)`.
fn root_arg(sys: &RootSystem, s: &str) -> Result<usize, Failure> {
    if let Ok(i) = s.trim().parse::<usize>() {
        return if i < sys.len() {
            Ok(i)
        } else {
            Err(Failure::Reject(format!("root index {i} out of range (system has {} roots)", sys.len())))
        };
    }
    let v = RootVector::from_str(s)?;
    sys.index_of(&v)
        .ok_or_else(|| Failure::Reject(format!("{s} is not a root of {}", sys.name())))
}

/// Exact mode unless sampling is requested, which then needs a seed.
fn delta_mode(exact: bool, samples: Option<u64>, seed: Option<u64>) -> Result<DeltaMode, Failure> {
    match (exact, samples, seed) {
        (true, Some(_), _) => Err(Failure::Usage("--exact and --samples are exclusive".into())),
        (_, Some(_), None) => Err(Failure::Usage("sampling requested without --seed".into())),
        (_, Some(samples), Some(seed)) => Ok(DeltaMode::Sampled { samples, seed }),
        _ => Ok(DeltaMode::Exact),
    }
}

fn space_summary(s: &FiniteGraphSpace) -> Value {
    json!({
        "vertices": s.n(),
        "edges": s.edge_count(),
        "connected": s.is_connected(),
        "diameter": s.diameter().map_or("inf".to_string(), |d| d.to_string()),
    })
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Args, Debug, Serialize)]
pub struct RootsysArgs {
    /// A2, B3, C3, D4, G2, ...
    #[arg(long)]
    pub system: String,
}

pub fn rootsys(a: &RootsysArgs, fmt: Format) -> Result<Output, Failure> {
    let sys = system(&a.system)?;
    let rows = rootsys::pair_table(&sys);
    if fmt == Format::Csv {
        let mut out = String::from("alpha,beta,class\n");
        for r in &rows {
            out.push_str(&format!(
                "{},{},{}\n",
                csv_field(&r.alpha.to_string()),
                csv_field(&r.beta.to_string()),
                r.class
            ));
        }
        return Ok(Output::Csv(out));
    }
    let roots: Vec<Value> = (0..sys.len())
        .map(|i| {
            json!({
                "index": i,
                "root": sys.root(i),
                "long": sys.is_long(i),
                "height": sys.height(i),
                "simple_coeffs": sys.simple_coeffs(i),
            })
        })
        .collect();
    Ok(Output::Json(json!({
        "system": sys.name(),
        "rank": sys.rank(),
        "roots": roots,
        "simple": sys.simple_roots(),
        "pairs": rows,
    })))
}

#[derive(Args, Debug, Serialize)]
pub struct SteinbergArgs {
    #[arg(long)]
    pub system: String,
    /// Restrict to one pair; both --alpha and --beta are needed.
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub beta: Option<String>,
    /// Check t, u in [-grid, grid].
    #[arg(long, default_value_t = 3)]
    pub grid: i64,
    /// Also check Weyl conjugation for every pair with t in [-weyl_range, weyl_range].
    #[arg(long)]
    pub weyl: bool,
    #[arg(long, default_value_t = 2)]
    pub weyl_range: i64,
    #[arg(long)]
    pub decreasing: bool,
}

pub fn steinberg(a: &SteinbergArgs) -> Result<Output, Failure> {
    if a.grid < 1 || a.weyl_range < 0 {
        return Err(Failure::Usage("--grid must be positive and --weyl-range nonnegative".into()));
    }
    let sys = system(&a.system)?;
    let l = chevalley::chevalley_basis(&sys)?;
    let verification = chevalley::verify_basis(&l);
    let pairs: Vec<(usize, usize)> = match (&a.alpha, &a.beta) {
        (Some(x), Some(y)) => vec![(root_arg(&sys, x)?, root_arg(&sys, y)?)],
        (None, None) => (0..sys.len())
            .flat_map(|i| (0..sys.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && i != sys.negative_of(j))
            .collect(),
        _ => return Err(Failure::Usage("--alpha and --beta go together".into())),
    };
    let grid: Vec<i64> = (-a.grid..=a.grid).collect();
    let order = if a.decreasing {
        ProductOrder::DecreasingHeight
    } else {
        ProductOrder::IncreasingHeight
    };
    let reports = pairs
        .iter()
        .map(|&(i, j)| chevalley::steinberg_commutator(&l, i, j, &grid, order))
        .collect::<geogt::Result<Vec<_>>>()?;
    let max_abs_n = reports
        .iter()
        .flat_map(|r| r.factors.iter().map(|f| f.n.abs()))
        .max()
        .unwrap_or(0);
    let mut out = json!({
        "system": sys.name(),
        "verification": verification,
        "verification_passed": verification.passed(),
        "pairs": reports,
        "max_abs_n": max_abs_n,
    });
    if a.weyl {
        let mut checks = Vec::new();
        for i in 0..sys.len() {
            for j in 0..sys.len() {
                for t in -a.weyl_range..=a.weyl_range {
                    checks.push(chevalley::weyl_conjugation_check(&l, i, j, t)?);
                }
            }
        }
        out["weyl"] = json!(checks);
    }
    Ok(Output::Json(out))
}

/// Decimal integer, or `B^E`.
fn parse_bigint(s: &str) -> Result<BigInt, Failure> {
    let bad = || Failure::Usage(format!("bad integer {s:?}"));
    match s.split_once('^') {
        Some((b, e)) => {
            let b: BigInt = b.trim().parse().map_err(|_| bad())?;
            let e: u32 = e.trim().parse().map_err(|_| bad())?;
            Ok(b.pow(e))
        }
        None => s.trim().parse().map_err(|_| bad()),
    }
}

#[derive(Args, Debug, Serialize)]
pub struct LogwordArgs {
    #[arg(long)]
    pub system: String,
    /// Root index or coordinates.
    #[arg(long)]
    pub root: String,
    /// Target parameter; accepts `2^20`.
    #[arg(long)]
    pub n: String,
    /// Also find the exact word length by bidirectional search up to this radius.
    #[arg(long)]
    pub bfs_radius: Option<usize>,
    #[arg(long, default_value_t = 20_000_000)]
    pub bfs_states: usize,
}

pub fn logword(a: &LogwordArgs) -> Result<Output, Failure> {
    let sys = system(&a.system)?;
    let l = chevalley::chevalley_basis(&sys)?;
    let root = root_arg(&sys, &a.root)?;
    let n = parse_bigint(&a.n)?;
    let rep = l.logword(root, &n)?;
    let verified = l.evaluate(&rep.word) == l.exp_root(root, &n);
    let log2 = chevalley::ceil_log2(&n);
    let bound = rep.c * log2 + rep.c_prime;
    let mut out = json!({
        "system": sys.name(),
        "root": sys.root(root),
        "n": n.to_string(),
        "method": rep.method,
        "length": rep.length,
        "word": rep.word.render(&sys),
        "letters": rep.word,
        "verified": verified,
        "ceil_log2": log2,
        "bound": bound,
        "within_bound": (rep.length as u64) <= bound,
    });
    if let Some(radius) = a.bfs_radius {
        let gens = chevalley::unit_root_generators(&l);
        let target = l.exp_root(root, &n);
        let bfs = chevalley::bfs_word_length(&gens, &target, radius, a.bfs_states)?;
        out["bfs"] = json!(bfs);
    }
    Ok(Output::Json(out))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NumringTask {
    Unit,
    Identities,
    Idealnorm,
    Stubborn,
}

#[derive(Args, Debug, Serialize)]
pub struct NumringArgs {
    #[arg(long)]
    pub d: i64,
    #[arg(long, value_enum)]
    pub task: NumringTask,
    /// Ideal generators `a,b;c,d` meaning `a+bω, c+dω`; default `2(1−ω₀²)`.
    #[arg(long)]
    pub gens: Option<String>,
    /// `a,b` meaning `a+bω`; default 1.
    #[arg(long)]
    pub lambda: Option<String>,
}

fn parse_quad(o: QuadOrder, s: &str) -> Result<numring::QuadInt, Failure> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| Failure::Usage(format!("ring element {s:?} must look like a,b")))?;
    let a: BigInt = a.trim().parse().map_err(|_| Failure::Usage(format!("bad integer in {s:?}")))?;
    let b: BigInt = b.trim().parse().map_err(|_| Failure::Usage(format!("bad integer in {s:?}")))?;
    Ok(o.elem(a, b))
}

pub fn numring(a: &NumringArgs) -> Result<Output, Failure> {
    let o = QuadOrder::new(a.d)?;
    let out = match a.task {
        NumringTask::Unit => {
            let u = numring::fundamental_unit(a.d)?;
            json!({
                "d": a.d,
                "fundamental_unit": u,
                "norm": u.norm().to_string(),
                "sample_units": numring::sample_units(o)?,
            })
        }
        NumringTask::Identities => {
            let units = numring::sample_units(o)?;
            let mut diag = Vec::new();
            let mut comm = Vec::new();
            for u in &units {
                diag.push(numring::verify_diag_decomposition(o, u)?);
                for lam in o.integral_basis() {
                    comm.push(numring::verify_unit_commutator(o, u, &lam)?);
                }
            }
            let all_hold = diag.iter().all(|d| d.holds) && comm.iter().all(|c| c.holds);
            json!({
                "d": a.d,
                "diag_decompositions": diag,
                "unit_commutators": comm,
                "all_hold": all_hold,
            })
        }
        NumringTask::Idealnorm => {
            let gens = match &a.gens {
                Some(g) => g.split(';').map(|t| parse_quad(o, t)).collect::<Result<Vec<_>, _>>()?,
                None => {
                    let u = numring::fundamental_unit(a.d)?;
                    vec![o.one().sub(&u.mul(&u)).scale(&BigInt::from(2))]
                }
            };
            let module = numring::ideal_module(o, &gens)?;
            let norm = numring::ideal_norm(o, &gens)?;
            json!({
                "d": a.d,
                "generators": gens,
                "module": module,
                "norm": norm.to_string(),
            })
        }
        NumringTask::Stubborn => {
            let lam = match &a.lambda {
                Some(s) => parse_quad(o, s)?,
                None => o.one(),
            };
            json!({ "d": a.d, "witness": numring::stubborn_witness(o, &lam)? })
        }
    };
    Ok(Output::Json(out))
}

#[derive(Args, Debug, Serialize)]
pub struct DeltaArgs {
    /// Edge-list file or built-in space (path:N, cycle:N, grid:WxH, tree:N:SEED).
    #[arg(long)]
    pub input: String,
    #[arg(long)]
    pub exact: bool,
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also compute the largest insize of a geodesic triangle.
    #[arg(long)]
    pub thinness: bool,
}

pub fn delta(a: &DeltaArgs) -> Result<Output, Failure> {
    let mode = delta_mode(a.exact, a.samples, a.seed)?;
    let s = inputs::load_space(&a.input, None)?;
    let r = coarse::four_point_delta(&s, mode)?;
    let mut out = json!({ "space": space_summary(&s), "delta": r });
    if a.thinness {
        out["thinness"] = json!(coarse::tripod_thinness(&s)?);
    }
    Ok(Output::Json(out))
}

#[derive(Args, Debug, Serialize)]
pub struct QiArgs {
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
    /// `identity`, `scale:K`, or a file listing the image of each vertex of X.
    #[arg(long)]
    pub map: String,
}

pub fn qi(a: &QiArgs) -> Result<Output, Failure> {
    let x = inputs::load_space(&a.x, None)?;
    let y = inputs::load_space(&a.y, None)?;
    let f = inputs::load_map(&a.map, x.n())?;
    let r = coarse::qi_constants(&f, &x, &y)?;
    Ok(Output::Json(json!({
        "x": space_summary(&x),
        "y": space_summary(&y),
        "fit": r,
    })))
}

#[derive(Args, Debug, Serialize)]
pub struct FiberArgs {
    /// Built-in instance: `two-lines` or `two-lines:LEN`.
    #[arg(long)]
    pub instance: Option<String>,
    /// JSON file with spaces, maps, generator triples and parameters.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long, default_value_t = 100_000)]
    pub max_group: usize,
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn fiber(a: &FiberArgs) -> Result<Output, Failure> {
    let mode = delta_mode(false, a.samples, a.seed)?;
    let inst = inputs::load_fiber(a.instance.as_deref(), a.spec.as_deref())?;
    let f = inst.build(a.max_group)?;
    let bounds = coarse::fiber_bounds(&f, &inst.x, mode)?;
    let identity = inst.gens.first().map(|g| g.identity_like());
    let elements: Vec<String> = match identity {
        Some(id) => geogt::group::enumerate_group(&id, &inst.gens, a.max_group)?
            .iter()
            .map(|g| g.label())
            .collect(),
        None => vec![],
    };
    Ok(Output::Json(json!({
        "params": f.params,
        "j0": f.params.j0().to_string(),
        "j1": f.params.j1().to_string(),
        "j2": f.params.j2().to_string(),
        "a0_size": f.a0.len(),
        "a1_size": f.a1.len(),
        "group_order": f.group_order,
        "group_elements": elements,
        "equivariance_defect": f.equivariance_defect,
        "graph": space_summary(&f.graph),
        "bounds": bounds,
        "all_hold": bounds.all_hold(),
    })))
}

#[derive(Args, Debug, Serialize)]
pub struct CayleyArgs {
    /// `free:R`, `sl2:P`, `sl:N:P` or `z`.
    #[arg(long)]
    pub group: String,
    #[arg(long)]
    pub radius: u32,
    #[arg(long, default_value_t = 200_000)]
    pub max_vertices: usize,
    /// Compute the four-point constant of the ball.
    #[arg(long)]
    pub delta: bool,
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

fn sl_generators(n: usize, p: u64) -> Vec<ModMatrix> {
    let mut g = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                g.push(ModMatrix::elementary(p, n, i, j, 1));
                g.push(ModMatrix::elementary(p, n, i, j, -1));
            }
        }
    }
    g.sort();
    g.dedup();
    g
}

fn ball_summary<G: GroupElement>(ball: &CayleyBall<G>, mode: Option<DeltaMode>) -> Result<Value, Failure> {
    let mut spheres = vec![0usize; ball.radius as usize + 1];
    for &w in &ball.word_length {
        spheres[w as usize] += 1;
    }
    let mut out = json!({
        "radius": ball.radius,
        "partial": ball.partial,
        "space": space_summary(&ball.space),
        "sphere_sizes": spheres,
    });
    if let Some(mode) = mode {
        out["delta"] = json!(coarse::four_point_delta(&ball.space, mode)?);
    }
    Ok(out)
}

pub fn cayley(a: &CayleyArgs) -> Result<Output, Failure> {
    let mode = if a.delta || a.samples.is_some() {
        Some(delta_mode(false, a.samples, a.seed)?)
    } else {
        None
    };
    let summary = match inputs::parse_group(&a.group)? {
        GroupSpec::Free(r) => ball_summary(
            &coarse::cayley_ball(&FreeWord::identity(r), &FreeWord::symmetric_generators(r), a.radius, a.max_vertices)?,
            mode,
        )?,
        GroupSpec::Sl { n, p } => ball_summary(
            &coarse::cayley_ball(&ModMatrix::identity(p, n), &sl_generators(n, p), a.radius, a.max_vertices)?,
            mode,
        )?,
        GroupSpec::Z => ball_summary(&coarse::cayley_ball(&IntZ(0), &[IntZ(1), IntZ(-1)], a.radius, a.max_vertices)?, mode)?,
    };
    Ok(Output::Json(json!({ "group": a.group, "ball": summary })))
}

#[derive(Args, Debug, Serialize)]
pub struct ConeArgs {
    #[arg(long)]
    pub group: String,
    #[arg(long)]
    pub radius: u32,
    /// Subgroup to cone off; repeatable. `gen:K` for free groups,
    /// `upper`, `lower` or `diag` for SL, `mult:K` for Z.
    #[arg(long = "subgroup", required = true)]
    pub subgroups: Vec<String>,
    #[arg(long, default_value_t = 200_000)]
    pub max_vertices: usize,
    #[arg(long)]
    pub delta: bool,
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

type Membership<G> = Box<dyn Fn(&G) -> bool + Sync>;

fn cone_summary<G: GroupElement>(ball: &CayleyBall<G>, tests: Vec<Membership<G>>, mode: Option<DeltaMode>) -> Result<Value, Failure> {
    let refs: Vec<&(dyn Fn(&G) -> bool + Sync)> = tests.iter().map(|b| b.as_ref()).collect();
    let c = coarse::coned_space(ball, &refs)?;
    let mut out = json!({
        "ball_vertices": ball.elements.len(),
        "partial": ball.partial,
        "group_vertices": c.group_vertices,
        "cones_per_subgroup": c.cones_per_subgroup,
        "space": space_summary(&c.space),
        "group_diameter": c.diameter.map_or("inf".to_string(), |d| d.to_string()),
    });
    if let Some(mode) = mode {
        out["delta"] = json!(coarse::four_point_delta(&c.space, mode)?);
    }
    Ok(out)
}

pub fn cone(a: &ConeArgs) -> Result<Output, Failure> {
    let mode = if a.delta || a.samples.is_some() {
        Some(delta_mode(false, a.samples, a.seed)?)
    } else {
        None
    };
    let bad = |s: &str| Failure::Usage(format!("subgroup {s:?} does not fit group {}", a.group));
    let summary = match inputs::parse_group(&a.group)? {
        GroupSpec::Free(r) => {
            let mut tests: Vec<Membership<FreeWord>> = Vec::new();
            for s in &a.subgroups {
                let k: i32 = s.strip_prefix("gen:").and_then(|k| k.parse().ok()).ok_or_else(|| bad(s))?;
                if k < 1 || k as u32 > r {
                    return Err(bad(s));
                }
                tests.push(Box::new(move |w: &FreeWord| w.letters.iter().all(|l| l.abs() == k)));
            }
            let ball = coarse::cayley_ball(&FreeWord::identity(r), &FreeWord::symmetric_generators(r), a.radius, a.max_vertices)?;
            cone_summary(&ball, tests, mode)?
        }
        GroupSpec::Sl { n, p } => {
            let mut tests: Vec<Membership<ModMatrix>> = Vec::new();
            for s in &a.subgroups {
                let t: Membership<ModMatrix> = match s.as_str() {
                    "upper" => Box::new(move |m: &ModMatrix| {
                        (0..n).all(|i| (0..n).all(|j| m.entries[i * n + j] == u64::from(i == j) || i < j))
                    }),
                    "lower" => Box::new(move |m: &ModMatrix| {
                        (0..n).all(|i| (0..n).all(|j| m.entries[i * n + j] == u64::from(i == j) || i > j))
                    }),
                    "diag" => Box::new(move |m: &ModMatrix| (0..n).all(|i| (0..n).all(|j| i == j || m.entries[i * n + j] == 0))),
                    _ => return Err(bad(s)),
                };
                tests.push(t);
            }
            let ball = coarse::cayley_ball(&ModMatrix::identity(p, n), &sl_generators(n, p), a.radius, a.max_vertices)?;
            cone_summary(&ball, tests, mode)?
        }
        GroupSpec::Z => {
            let mut tests: Vec<Membership<IntZ>> = Vec::new();
            for s in &a.subgroups {
                let k: i64 = s.strip_prefix("mult:").and_then(|k| k.parse().ok()).ok_or_else(|| bad(s))?;
                if k < 1 {
                    return Err(bad(s));
                }
                tests.push(Box::new(move |z: &IntZ| z.0 % k == 0));
            }
            let ball = coarse::cayley_ball(&IntZ(0), &[IntZ(1), IntZ(-1)], a.radius, a.max_vertices)?;
            cone_summary(&ball, tests, mode)?
        }
    };
    Ok(Output::Json(json!({ "group": a.group, "coned": summary })))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    Exp,
    Orbit,
    Custom,
}

#[derive(Args, Debug, Serialize)]
pub struct HoroballArgs {
    /// Base graph (for the orbit family, the ambient space).
    #[arg(long)]
    pub base: String,
    #[arg(long, value_enum, default_value_t = FamilyArg::Exp)]
    pub family: FamilyArg,
    /// Custom family file with lines "n v: w1 w2 ...".
    #[arg(long)]
    pub custom: Option<PathBuf>,
    /// Orbit points: `all` or a comma-separated vertex list.
    #[arg(long)]
    pub orbit: Option<String>,
    #[arg(long)]
    pub c1: Option<u32>,
    #[arg(long)]
    pub depth: u32,
    /// Report δ₄ of the truncations at --depths (default 1..=depth).
    #[arg(long)]
    pub profile: bool,
    #[arg(long, value_delimiter = ',')]
    pub depths: Vec<u32>,
    /// Scan exactly when n⁴ is at most this.
    #[arg(long, default_value_t = 1_000_000_000)]
    pub exact_limit: u64,
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Check the orbit-family distance formula on this many sampled pairs.
    #[arg(long)]
    pub formula_pairs: Option<u64>,
    #[arg(long)]
    pub allow_inadmissible: bool,
}

pub fn horoball(a: &HoroballArgs, fmt: Format) -> Result<Output, Failure> {
    if a.samples.is_some() && a.seed.is_none() || a.formula_pairs.is_some() && a.seed.is_none() {
        return Err(Failure::Usage("sampling requested without --seed".into()));
    }
    let ambient = inputs::load_space(&a.base, None)?;
    let (base, fam): (FiniteGraphSpace, BallFamily) = match a.family {
        FamilyArg::Exp => (ambient.clone(), horoball::exponential_family(&ambient, a.depth)),
        FamilyArg::Orbit => {
            let c1 = a.c1.ok_or_else(|| Failure::Usage("the orbit family needs --c1".into()))?;
            let orbit: Vec<u32> = match a.orbit.as_deref() {
                None | Some("all") => (0..ambient.n() as u32).collect(),
                Some(list) => list
                    .split(',')
                    .map(|t| t.trim().parse().map_err(|_| Failure::Usage(format!("bad orbit vertex {t:?}"))))
                    .collect::<Result<_, _>>()?,
            };
            horoball::orbit_family(&ambient, &orbit, c1, a.depth)?
        }
        FamilyArg::Custom => {
            let path = a.custom.as_ref().ok_or_else(|| Failure::Usage("the custom family needs --custom FILE".into()))?;
            let fam = horoball::parse_custom_family(&inputs::read_text(path)?, ambient.n())?;
            (ambient.clone(), fam)
        }
    };
    let admissibility = horoball::admissible_check(&base, &fam, &[])?;
    let h = horoball::build_horoball(&base, &fam, a.depth, a.allow_inadmissible)?;
    let mut out = json!({
        "base": space_summary(&base),
        "family": fam.kind,
        "depth": a.depth,
        "admissibility": admissibility,
        "admissible": admissibility.admissible(),
        "horoball": space_summary(&h.space),
    });
    if a.profile {
        let depths: Vec<u32> = if a.depths.is_empty() {
            (1..=a.depth).collect()
        } else {
            a.depths.clone()
        };
        let policy = ScanPolicy {
            exact_limit: a.exact_limit,
            samples: a.samples.unwrap_or(0),
            seed: a.seed.unwrap_or(0),
        };
        for &d in &depths {
            let n = base.n() * (d as usize + 1);
            if matches!(policy.mode_for(n), DeltaMode::Sampled { .. }) && a.samples.is_none() {
                return Err(Failure::Usage(format!(
                    "depth {d} has {n} vertices, beyond the exact limit; pass --samples and --seed"
                )));
            }
        }
        let rows = horoball::delta_profile(&base, &fam, &depths, policy)?;
        if fmt == Format::Csv {
            let mut csv = String::from("depth,delta4\n");
            for r in &rows {
                csv.push_str(&format!("{},{}\n", r.depth, r.delta.delta4));
            }
            return Ok(Output::Csv(csv));
        }
        out["profile"] = json!(rows);
    }
    if let Some(pairs) = a.formula_pairs {
        let c1 = match a.family {
            FamilyArg::Orbit => a.c1.expect("checked above"),
            _ => return Err(Failure::Usage("the distance formula applies to the orbit family".into())),
        };
        let orbit: Vec<u32> = match a.orbit.as_deref() {
            None | Some("all") => (0..ambient.n() as u32).collect(),
            Some(list) => list.split(',').map(|t| t.trim().parse().unwrap_or(0)).collect(),
        };
        let r = horoball::distance_formula_check(
            &h,
            |i, j| ambient.d(orbit[i] as usize, orbit[j] as usize),
            c1,
            pairs,
            a.seed.expect("checked above"),
        )?;
        out["formula_holds"] = json!(r.mismatches.is_empty());
        out["formula"] = json!(r);
    }
    Ok(Output::Json(out))
}

#[derive(Args, Debug, Serialize)]
pub struct ActionArgs {
    /// Action specification file (JSON).
    #[arg(long)]
    pub action: Option<PathBuf>,
    /// Built-in instance: line-shift, cycle-rotation, horoball-translation, comb-shift.
    #[arg(long)]
    pub corpus: Option<String>,
    /// Number of powers examined.
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub elliptic_ceiling: Option<u32>,
    /// Smallest linear rate accepted as hyperbolic, e.g. `1/2`.
    #[arg(long, default_value = "1/2")]
    pub rate_floor: String,
}

fn thresholds(a: &ActionArgs) -> Result<Thresholds, Failure> {
    let rate_floor: Rational64 = a
        .rate_floor
        .parse()
        .map_err(|_| Failure::Usage(format!("bad --rate-floor {:?}", a.rate_floor)))?;
    if rate_floor <= Rational64::from_integer(0) {
        return Err(Failure::Usage("--rate-floor must be positive".into()));
    }
    Ok(Thresholds {
        elliptic_ceiling: a.elliptic_ceiling,
        rate_floor,
    })
}

pub fn classify(a: &ActionArgs) -> Result<Output, Failure> {
    let th = thresholds(a)?;
    let la = inputs::load_action(a.action.as_deref(), a.corpus.as_deref(), a.n)?;
    if la.n == 0 {
        return Err(Failure::Usage("--n must be positive".into()));
    }
    let mut elements = serde_json::Map::new();
    for (name, w) in &la.elements {
        let c = action::classify_isometry(&la.action, w, la.basepoint, la.n, la.delta, th)?;
        let t = action::stable_translation_length(&la.action, w, la.basepoint, la.n).ok();
        elements.insert(
            name.clone(),
            json!({ "word": w.render(), "classification": c, "translation_length": t }),
        );
    }
    Ok(Output::Json(json!({
        "delta": la.delta,
        "delta_source": la.delta_source,
        "basepoint": la.basepoint,
        "n": la.n,
        "thresholds": th,
        "elements": elements,
    })))
}

pub fn pseudochar(a: &ActionArgs) -> Result<Output, Failure> {
    let th = thresholds(a)?;
    let la = inputs::load_action(a.action.as_deref(), a.corpus.as_deref(), a.n)?;
    if la.n == 0 {
        return Err(Failure::Usage("--n must be positive".into()));
    }
    let ray = la
        .ray
        .as_ref()
        .ok_or_else(|| Failure::Reject("pseudocharacters need a ray in the action spec".into()))?;
    if ray.points[0] != la.basepoint {
        return Err(Failure::Reject("the ray must start at the basepoint".into()));
    }
    let r = action::pseudochar_report(&la.action, ray, &la.elements, la.n, la.delta, th)?;
    let mut out = serde_json::to_value(&r).expect("report serializes");
    out["delta_source"] = json!(la.delta_source);
    out["consistent"] = json!(r.p.values().all(|p| p.consistent));
    out["defect_within_bound"] = json!(r.defect_observed <= r.defect_bound);
    Ok(Output::Json(out))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SubgroupFamily {
    /// Every elementary root subgroup (upper and lower unipotents for n = 2).
    Unipotent,
    Trivial,
}

#[derive(Args, Debug, Serialize)]
pub struct BgenArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = SubgroupFamily::Unipotent)]
    pub subgroups: SubgroupFamily,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_order: usize,
}

pub fn bgen(a: &BgenArgs) -> Result<Output, Failure> {
    if a.p < 2 || a.n < 2 {
        return Err(Failure::Usage("need p ≥ 2 and n ≥ 2".into()));
    }
    let roots: Vec<Vec<ModMatrix>> = (0..a.n)
        .flat_map(|i| (0..a.n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| vec![ModMatrix::elementary(a.p, a.n, i, j, 1)])
        .collect();
    let gens: Vec<ModMatrix> = roots.iter().flatten().cloned().collect();
    let subgroups = match a.subgroups {
        SubgroupFamily::Unipotent => roots,
        SubgroupFamily::Trivial => vec![vec![ModMatrix::identity(a.p, a.n)]],
    };
    let r = action::bounded_generation_diameter(&gens, &subgroups, a.max_order)?;
    Ok(Output::Json(json!({ "p": a.p, "n": a.n, "result": r })))
}
