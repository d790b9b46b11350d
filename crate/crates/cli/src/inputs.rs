//! Reading spaces, maps and action/fiber specifications from disk or from
//! built-in names.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use geogt::action::{self, GroupAction, RaySpec, Word};
use geogt::coarse::{self, DeltaMode, FiberInstance, FiberParams, FiniteGraphSpace, TriplePerm};
use geogt::group::Perm;
use geogt::horoball::PartialMap;
use geogt::HalfInt;
use num_rational::Rational64;
use serde::Deserialize;
use serde_json::Value;

use crate::Failure;

pub fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

/// A built-in space name or an edge-list file, relative to `dir`.
pub fn load_space(r: &str, dir: Option<&Path>) -> Result<FiniteGraphSpace, Failure> {
    if let Some(built) = coarse::parse_space_ref(r) {
        return Ok(built?);
    }
    let path = match dir {
        Some(d) => d.join(r),
        None => PathBuf::from(r),
    };
    Ok(coarse::build_space(&read_text(&path)?)?)
}

/// `identity`, `scale:K` (v ↦ K·v) or a file of whitespace-separated images.
pub fn load_map(r: &str, n: usize) -> Result<Vec<u32>, Failure> {
    if r == "identity" {
        return Ok((0..n as u32).collect());
    }
    if let Some(k) = r.strip_prefix("scale:") {
        let k: u32 = k.parse().map_err(|_| Failure::Usage(format!("bad scale in {r:?}")))?;
        return Ok((0..n as u32).map(|v| v * k).collect());
    }
    let text = read_text(Path::new(r))?;
    text.split_whitespace()
        .map(|t| t.parse::<u32>().map_err(|_| Failure::Reject(format!("bad vertex {t:?} in map file"))))
        .collect()
}

pub fn parse_halfint(v: &Value) -> Result<HalfInt, Failure> {
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(Failure::Reject("delta must be a number or string".into())),
    };
    let r: Rational64 = if let Some((a, b)) = s.split_once('.') {
        match b {
            "0" => a.parse::<i64>().map(Rational64::from_integer),
            "5" => a.parse::<i64>().map(|a| Rational64::new(2 * a + if s.starts_with('-') { -1 } else { 1 }, 2)),
            _ => return Err(Failure::Reject(format!("delta {s} is not a half-integer"))),
        }
        .map_err(|_| Failure::Reject(format!("bad delta {s}")))?
    } else {
        s.parse().map_err(|_| Failure::Reject(format!("bad delta {s}")))?
    };
    let doubled = r * 2;
    if !doubled.is_integer() {
        return Err(Failure::Reject(format!("delta {s} is not a half-integer")));
    }
    Ok(HalfInt::from_doubled(doubled.to_integer()))
}

fn parse_rational(v: &Value) -> Result<Rational64, Failure> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(Rational64::from_integer)
            .ok_or_else(|| Failure::Reject(format!("parameter {n} must be an integer or a fraction string"))),
        Value::String(s) => s.parse().map_err(|_| Failure::Reject(format!("bad rational {s:?}"))),
        _ => Err(Failure::Reject("parameters must be numbers or strings".into())),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ActionSpecFile {
    space: String,
    /// Image of each vertex; `-1` where the map is undefined.
    generators: Vec<Vec<i64>>,
    #[serde(default)]
    labels: Option<Vec<String>>,
    elements: BTreeMap<String, String>,
    basepoint: u32,
    #[serde(default)]
    ray: Option<Vec<u32>>,
    #[serde(default)]
    window: Option<usize>,
    #[serde(default)]
    n: Option<u32>,
    #[serde(default)]
    delta: Option<Value>,
    #[serde(default)]
    delta_samples: Option<u64>,
    #[serde(default)]
    seed: Option<u64>,
}

pub struct LoadedAction {
    pub action: GroupAction,
    pub elements: Vec<(String, Word)>,
    pub basepoint: u32,
    pub ray: Option<RaySpec>,
    pub n: u32,
    pub delta: HalfInt,
    pub delta_source: String,
}

pub const CORPUS: [&str; 4] = ["line-shift", "cycle-rotation", "horoball-translation", "comb-shift"];

pub fn corpus_instance(name: &str) -> Result<action::CorpusInstance, Failure> {
    let inst = match name {
        "line-shift" => action::line_shift_instance(800, 2, 400, 64),
        "cycle-rotation" => action::cycle_rotation_instance(24, 48),
        "horoball-translation" => action::horoball_translation_instance(513, 9, 256, 128, 200_000, 2024),
        "comb-shift" => action::comb_shift_instance(600, 300, 64),
        _ => {
            return Err(Failure::Usage(format!(
                "unknown corpus instance {name:?}; expected one of {}",
                CORPUS.join(", ")
            )))
        }
    };
    Ok(inst?)
}

pub fn load_action(path: Option<&Path>, corpus: Option<&str>, n_override: Option<u32>) -> Result<LoadedAction, Failure> {
    match (path, corpus) {
        (Some(_), Some(_)) | (None, None) => Err(Failure::Usage("give exactly one of --action or --corpus".into())),
        (None, Some(name)) => {
            let inst = corpus_instance(name)?;
            Ok(LoadedAction {
                basepoint: inst.ray.points[0],
                ray: Some(inst.ray),
                elements: inst.samples,
                n: n_override.unwrap_or(inst.n),
                delta: inst.delta,
                delta_source: format!("corpus:{name}"),
                action: inst.action,
            })
        }
        (Some(path), None) => {
            let text = read_text(path)?;
            let spec: ActionSpecFile =
                serde_json::from_str(&text).map_err(|e| Failure::Reject(format!("{}: {e}", path.display())))?;
            let space = load_space(&spec.space, path.parent())?;
            let gens: Vec<PartialMap> = spec
                .generators
                .iter()
                .map(|g| g.iter().map(|&v| u32::try_from(v).ok()).collect())
                .collect();
            let n_vertices = space.n();
            let (delta, delta_source) = match (&spec.delta, spec.delta_samples, spec.seed) {
                (Some(d), _, _) => (parse_halfint(d)?, "given".to_string()),
                (None, Some(samples), Some(seed)) => {
                    let r = coarse::four_point_delta(&space, DeltaMode::Sampled { samples, seed })?;
                    (r.delta4, format!("sampled:{samples}:{seed}"))
                }
                (None, Some(_), None) => return Err(Failure::Usage("delta_samples needs a seed".into())),
                (None, None, _) => {
                    if (n_vertices as u128).pow(4) > 1_000_000_000 {
                        return Err(Failure::Usage(
                            "space too large for an exact delta scan; give delta or delta_samples with a seed".into(),
                        ));
                    }
                    (coarse::four_point_delta(&space, DeltaMode::Exact)?.delta4, "exact".to_string())
                }
            };
            let action = GroupAction::new(space, gens, spec.labels)?;
            let elements = spec
                .elements
                .iter()
                .map(|(k, w)| Ok((k.clone(), Word::parse(w)?)))
                .collect::<Result<Vec<_>, geogt::Error>>()?;
            let ray = match spec.ray {
                Some(points) => {
                    let window = spec.window.unwrap_or_else(|| (points.len() / 4).max(1));
                    Some(RaySpec::new(points, window)?)
                }
                None => None,
            };
            Ok(LoadedAction {
                action,
                elements,
                basepoint: spec.basepoint,
                ray,
                n: n_override.or(spec.n).unwrap_or(64),
                delta,
                delta_source,
            })
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FiberGen {
    v: Vec<u32>,
    w: Vec<u32>,
    x: Vec<u32>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FiberParamsFile {
    b: Value,
    delta: Value,
    k: Value,
    c: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FiberSpecFile {
    v: String,
    w: String,
    x: String,
    phi: Vec<u32>,
    psi: Vec<u32>,
    #[serde(default)]
    generators: Vec<FiberGen>,
    params: FiberParamsFile,
}

/// `two-lines` or `two-lines:LEN`, or a JSON spec file.
pub fn load_fiber(instance: Option<&str>, spec: Option<&Path>) -> Result<FiberInstance, Failure> {
    match (instance, spec) {
        (Some(name), None) => {
            let len = match name.split_once(':') {
                Some(("two-lines", l)) => l.parse().map_err(|_| Failure::Usage(format!("bad length in {name:?}")))?,
                None if name == "two-lines" => 40,
                _ => return Err(Failure::Usage(format!("unknown fiber instance {name:?}"))),
            };
            if len < 2 {
                return Err(Failure::Usage("two-lines needs length at least 2".into()));
            }
            Ok(coarse::two_lines_instance(len))
        }
        (None, Some(path)) => {
            let text = read_text(path)?;
            let s: FiberSpecFile =
                serde_json::from_str(&text).map_err(|e| Failure::Reject(format!("{}: {e}", path.display())))?;
            let dir = path.parent();
            let gens = s
                .generators
                .into_iter()
                .map(|g| {
                    Ok(TriplePerm {
                        v: Perm::new(g.v)?,
                        w: Perm::new(g.w)?,
                        x: Perm::new(g.x)?,
                    })
                })
                .collect::<Result<Vec<_>, geogt::Error>>()?;
            Ok(FiberInstance {
                v: load_space(&s.v, dir)?,
                w: load_space(&s.w, dir)?,
                x: load_space(&s.x, dir)?,
                phi: s.phi,
                psi: s.psi,
                gens,
                params: FiberParams {
                    b_param: parse_rational(&s.params.b)?,
                    delta: parse_rational(&s.params.delta)?,
                    k: parse_rational(&s.params.k)?,
                    c: parse_rational(&s.params.c)?,
                },
            })
        }
        _ => Err(Failure::Usage("give exactly one of --instance or --spec".into())),
    }
}

#[derive(Clone, Copy, Debug)]
pub enum GroupSpec {
    Free(u32),
    Sl { n: usize, p: u64 },
    Z,
}

/// `free:R`, `sl2:P`, `sl:N:P` or `z`.
pub fn parse_group(s: &str) -> Result<GroupSpec, Failure> {
    let bad = || Failure::Usage(format!("unknown group {s:?}; expected free:R, sl2:P, sl:N:P or z"));
    let parts: Vec<&str> = s.split(':').collect();
    let g = match parts.as_slice() {
        ["z"] => GroupSpec::Z,
        ["free", r] => GroupSpec::Free(r.parse().map_err(|_| bad())?),
        ["sl2", p] => GroupSpec::Sl {
            n: 2,
            p: p.parse().map_err(|_| bad())?,
        },
        ["sl", n, p] => GroupSpec::Sl {
            n: n.parse().map_err(|_| bad())?,
            p: p.parse().map_err(|_| bad())?,
        },
        _ => return Err(bad()),
    };
    match g {
        GroupSpec::Free(0) => Err(Failure::Usage("free groups need rank at least 1".into())),
        GroupSpec::Sl { n, p } if n < 2 || p < 2 => Err(Failure::Usage("SL(n, Z/p) needs n ≥ 2 and p ≥ 2".into())),
        g => Ok(g),
    }
}
