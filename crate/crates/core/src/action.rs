//! Group actions on finite spaces by partial isometries: orbit
//! displacements, isometry-type classification, quasi-horofunctions,
//! quasicharacters and pseudocharacters, and bounded-generation diameters
//! of finite matrix groups.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::coarse::FiniteGraphSpace;
use crate::error::{Error, Result};
use crate::group::{enumerate_group, GroupElement, ModMatrix};
use crate::halfint::HalfInt;
use crate::horoball::PartialMap;
use crate::serde_util::ratio_str;

/// Generators acting by partial injective isometries. Truncated spaces
/// make translations undefined near the boundary.
#[derive(Clone, Debug)]
pub struct GroupAction {
    pub space: FiniteGraphSpace,
    generators: Vec<PartialMap>,
    inverses: Vec<PartialMap>,
    pub labels: Vec<String>,
}

fn invert_partial(g: &PartialMap) -> Result<PartialMap> {
    let mut inv = vec![None; g.len()];
    for (v, img) in g.iter().enumerate() {
        if let Some(w) = *img {
            let slot = inv
                .get_mut(w as usize)
                .ok_or_else(|| Error::invalid(format!("image {w} out of range")))?;
            if slot.is_some() {
                return Err(Error::invalid(format!("map is not injective at image {w}")));
            }
            *slot = Some(v as u32);
        }
    }
    Ok(inv)
}

impl GroupAction {
    /// Rejects maps that are not injective or change a distance between
    /// two points of their domain.
    pub fn new(space: FiniteGraphSpace, generators: Vec<PartialMap>, labels: Option<Vec<String>>) -> Result<Self> {
        let n = space.n();
        let mut inverses = Vec::new();
        for (i, g) in generators.iter().enumerate() {
            if g.len() != n {
                return Err(Error::invalid(format!("generator {i} has {} entries, expected {n}", g.len())));
            }
            inverses.push(invert_partial(g)?);
            let dom: Vec<usize> = (0..n).filter(|&v| g[v].is_some()).collect();
            let bad = dom.par_iter().find_any(|&&u| {
                let gu = g[u].unwrap() as usize;
                dom.iter().any(|&v| space.d(gu, g[v].unwrap() as usize) != space.d(u, v))
            });
            if let Some(&u) = bad {
                return Err(Error::invalid(format!("generator {i} is not an isometry near vertex {u}")));
            }
        }
        let labels = labels.unwrap_or_else(|| (0..generators.len()).map(|i| format!("g{i}")).collect());
        if labels.len() != generators.len() {
            return Err(Error::invalid("one label per generator"));
        }
        Ok(GroupAction {
            space,
            generators,
            inverses,
            labels,
        })
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    pub fn generator(&self, i: usize) -> &PartialMap {
        &self.generators[i]
    }

    /// `g·x` for `g = s₁s₂…s_k`, i.e. `s₁(s₂(…s_k(x)))`; `None` once the
    /// point leaves a generator's domain.
    pub fn apply(&self, w: &Word, x: u32) -> Option<u32> {
        let mut p = x;
        for &(g, inv) in w.letters.iter().rev() {
            let map = if inv { &self.inverses[g] } else { &self.generators[g] };
            p = map[p as usize]?;
        }
        Some(p)
    }

    fn check_word(&self, w: &Word) -> Result<()> {
        match w.letters.iter().find(|l| l.0 >= self.generators.len()) {
            Some(l) => Err(Error::invalid(format!("no generator {}", l.0))),
            None => Ok(()),
        }
    }
}

/// A word in the generators; `(i, true)` is the inverse of generator `i`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    pub letters: Vec<(usize, bool)>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    pub fn generator(i: usize) -> Self {
        Word {
            letters: vec![(i, false)],
        }
    }

    /// Parse generator indices separated by spaces or commas; a leading
    /// `-` marks an inverse. `e` or an empty string is the identity.
    pub fn parse(s: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for tok in s.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            if tok == "e" {
                continue;
            }
            let (inv, digits) = match tok.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, tok),
            };
            let i = digits
                .parse::<usize>()
                .map_err(|_| Error::invalid(format!("bad generator index {tok:?} in word {s:?}")))?;
            letters.push((i, inv));
        }
        Ok(Word { letters })
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters }
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|&(g, inv)| (g, !inv)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Word {
        Word {
            letters: self.letters.repeat(k as usize),
        }
    }

    pub fn render(&self) -> String {
        if self.letters.is_empty() {
            return "e".into();
        }
        self.letters
            .iter()
            .map(|&(g, inv)| if inv { format!("-{g}") } else { g.to_string() })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Displacements {
    /// `d(x₀, gⁿx₀)` for `n = 1, 2, …`.
    pub values: Vec<u32>,
    /// The orbit left the truncation before `N` steps.
    pub partial: bool,
}

pub fn displacements(a: &GroupAction, g: &Word, x0: u32, n: u32) -> Result<Displacements> {
    a.check_word(g)?;
    if x0 as usize >= a.space.n() {
        return Err(Error::invalid("basepoint out of range"));
    }
    let mut values = Vec::with_capacity(n as usize);
    let mut p = x0;
    for _ in 0..n {
        match a.apply(g, p) {
            Some(q) => {
                p = q;
                values.push(a.space.d(x0 as usize, p as usize));
            }
            None => {
                return Ok(Displacements {
                    values,
                    partial: true,
                })
            }
        }
    }
    Ok(Displacements {
        values,
        partial: false,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TranslationLength {
    /// `min_{n ≤ N} d(x₀,gⁿx₀)/n`, an upper bound for the limit.
    #[serde(serialize_with = "ratio_str")]
    pub upper: Rational64,
    /// `d(x₀,g^N x₀)/N`.
    #[serde(serialize_with = "ratio_str")]
    pub estimate: Rational64,
    pub steps: u32,
    pub partial: bool,
}

pub fn stable_translation_length(a: &GroupAction, g: &Word, x0: u32, n: u32) -> Result<TranslationLength> {
    if n == 0 {
        return Err(Error::invalid("N must be positive"));
    }
    let d = displacements(a, g, x0, n)?;
    if d.values.is_empty() {
        return Err(Error::Inconclusive("orbit leaves the space immediately".into()));
    }
    let upper = d
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| Rational64::new(v as i64, i as i64 + 1))
        .min()
        .expect("nonempty");
    let steps = d.values.len() as u32;
    Ok(TranslationLength {
        upper,
        estimate: Rational64::new(*d.values.last().unwrap() as i64, steps as i64),
        steps,
        partial: d.partial,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IsometryType {
    Elliptic,
    Hyperbolic,
    UnboundedNonhyperbolic,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Thresholds {
    /// Elliptic when every displacement is at most this; default `2δ₄+2`.
    pub elliptic_ceiling: Option<u32>,
    /// Smallest linear rate accepted as hyperbolic.
    #[serde(serialize_with = "ratio_str")]
    pub rate_floor: Rational64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            elliptic_ceiling: None,
            rate_floor: Rational64::new(1, 2),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub kind: IsometryType,
    pub max_displacement: u32,
    pub ceiling: u32,
    /// Largest `ε` with `d(x₀,gⁿx₀) ≥ εn − b` for all sampled `n`, `b = ceiling`.
    #[serde(serialize_with = "ratio_str")]
    pub epsilon: Rational64,
    pub steps: u32,
    pub partial: bool,
}

/// Elliptic if the displacements stay under the ceiling; hyperbolic if the
/// best linear lower bound has rate at least `rate_floor`; unbounded but
/// not hyperbolic if that rate is below half the floor. Rates in between,
/// and orbits leaving the truncation before 8 steps, are inconclusive.
pub fn classify_isometry(a: &GroupAction, g: &Word, x0: u32, n: u32, delta: HalfInt, th: Thresholds) -> Result<Classification> {
    if n == 0 {
        return Err(Error::invalid("N must be positive"));
    }
    let d = displacements(a, g, x0, n)?;
    let ceiling = th
        .elliptic_ceiling
        .unwrap_or_else(|| (delta.doubled().max(0) + 2) as u32);
    let max_displacement = d.values.iter().copied().max().unwrap_or(0);
    let epsilon = d
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| Rational64::new(v as i64 + ceiling as i64, i as i64 + 1))
        .min()
        .unwrap_or_else(Rational64::zero);
    let steps = d.values.len() as u32;
    let kind = if d.partial && steps < 8 {
        IsometryType::Inconclusive
    } else if max_displacement <= ceiling {
        IsometryType::Elliptic
    } else if epsilon >= th.rate_floor {
        IsometryType::Hyperbolic
    } else if epsilon * 2 < th.rate_floor {
        IsometryType::UnboundedNonhyperbolic
    } else {
        IsometryType::Inconclusive
    };
    Ok(Classification {
        kind,
        max_displacement,
        ceiling,
        epsilon,
        steps,
        partial: d.partial,
    })
}

/// Points `x₀, x₁, …, x_M` and the length of the tail window used for limsups.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RaySpec {
    pub points: Vec<u32>,
    pub window: usize,
}

impl RaySpec {
    pub fn new(points: Vec<u32>, window: usize) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::invalid("a ray needs at least two points"));
        }
        if window == 0 || window >= points.len() {
            return Err(Error::invalid("tail window must be between 1 and M"));
        }
        Ok(RaySpec { points, window })
    }

    fn tail(&self) -> &[u32] {
        &self.points[self.points.len() - self.window..]
    }

    /// Whether `(x_i | x_{i+1})_{x₀}` is nondecreasing over the tail.
    pub fn is_monotone(&self, s: &FiniteGraphSpace) -> bool {
        let x0 = self.points[0] as usize;
        let start = self.points.len() - self.window - 1;
        let gp: Vec<i64> = self.points[start..]
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0] as usize, w[1] as usize);
                s.d(a, x0) as i64 + s.d(b, x0) as i64 - s.d(a, b) as i64
            })
            .collect();
        gp.windows(2).all(|w| w[0] <= w[1])
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HorofunctionValue {
    pub value: HalfInt,
    /// Max minus min of `d(a,x_n) − d(x₀,x_n)` over the tail window.
    pub spread: HalfInt,
}

/// `η(a)`: the largest `d(a,x_n) − d(x₀,x_n)` over the tail window. The
/// tail values must agree to within `4δ`.
pub fn quasi_horofunction(s: &FiniteGraphSpace, ray: &RaySpec, a: u32, delta: HalfInt) -> Result<HorofunctionValue> {
    let x0 = ray.points[0] as usize;
    let vals: Vec<i64> = ray
        .tail()
        .iter()
        .map(|&x| s.d(a as usize, x as usize) as i64 - s.d(x0, x as usize) as i64)
        .collect();
    let hi = *vals.iter().max().expect("nonempty tail");
    let lo = *vals.iter().min().expect("nonempty tail");
    let spread = HalfInt::from_int(hi - lo);
    if spread > delta.scale(4) {
        return Err(Error::Inconclusive(format!(
            "tail values at vertex {a} spread by {spread} > 4δ = {}; extend the ray",
            delta.scale(4)
        )));
    }
    Ok(HorofunctionValue {
        value: HalfInt::from_int(hi),
        spread,
    })
}

/// `q(g) = η(g·x₀)`.
pub fn quasicharacter(a: &GroupAction, ray: &RaySpec, g: &Word, delta: HalfInt) -> Result<HalfInt> {
    a.check_word(g)?;
    let gx = a
        .apply(g, ray.points[0])
        .ok_or_else(|| Error::Inconclusive(format!("a word of length {} moves x0 outside the truncation", g.letters.len())))?;
    Ok(quasi_horofunction(&a.space, ray, gx, delta)?.value)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DefectAudit {
    pub q: Vec<HalfInt>,
    /// `max |q(gh) − q(g) − q(h)|` over sampled pairs where all three are defined.
    pub defect_observed: HalfInt,
    pub pairs_checked: u64,
    pub pairs_skipped: u64,
}

pub fn defect_audit(a: &GroupAction, ray: &RaySpec, elements: &[Word], delta: HalfInt) -> Result<DefectAudit> {
    let q: Vec<Option<HalfInt>> = elements.iter().map(|g| quasicharacter(a, ray, g, delta).ok()).collect();
    let mut worst = HalfInt::ZERO;
    let mut checked = 0u64;
    let mut skipped = 0u64;
    for (i, g) in elements.iter().enumerate() {
        for (j, h) in elements.iter().enumerate() {
            match (q[i], q[j], quasicharacter(a, ray, &g.mul(h), delta).ok()) {
                (Some(qg), Some(qh), Some(qgh)) => {
                    checked += 1;
                    worst = worst.max((qgh - qg - qh).abs());
                }
                _ => skipped += 1,
            }
        }
    }
    if q.iter().any(Option::is_none) {
        return Err(Error::Inconclusive("some sampled element has no stable q value".into()));
    }
    Ok(DefectAudit {
        q: q.into_iter().map(Option::unwrap).collect(),
        defect_observed: worst,
        pairs_checked: checked,
        pairs_skipped: skipped,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PseudocharValue {
    /// `q(g^N)/N`.
    #[serde(serialize_with = "ratio_str")]
    pub p_hat: Rational64,
    /// `16δ/N`.
    #[serde(serialize_with = "ratio_str")]
    pub error_bound: Rational64,
    pub n: u32,
    pub classification: Classification,
    /// `|p̂| > 16δ/N` exactly when the classification is hyperbolic.
    pub consistent: bool,
}

pub fn pseudocharacter(a: &GroupAction, ray: &RaySpec, g: &Word, n: u32, delta: HalfInt, th: Thresholds) -> Result<PseudocharValue> {
    if n == 0 {
        return Err(Error::invalid("N must be positive"));
    }
    let q = quasicharacter(a, ray, &g.pow(n), delta)?;
    let p_hat = q.to_rational() / n as i64;
    let error_bound = delta.to_rational() * 16 / n as i64;
    let classification = classify_isometry(a, g, ray.points[0], n, delta, th)?;
    let consistent = (p_hat.abs() > error_bound) == (classification.kind == IsometryType::Hyperbolic);
    Ok(PseudocharValue {
        p_hat,
        error_bound,
        n,
        classification,
        consistent,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PseudocharReport {
    /// `η` at every point where it was evaluated, keyed by vertex label.
    pub eta: BTreeMap<String, HalfInt>,
    pub q: BTreeMap<String, HalfInt>,
    pub p: BTreeMap<String, PseudocharValue>,
    /// Elements whose `N`-th power moves `x₀` outside the truncation.
    pub p_undefined: Vec<String>,
    pub defect_observed: HalfInt,
    pub defect_bound: HalfInt,
    pub delta: HalfInt,
    #[serde(rename = "N_used")]
    pub n_used: u32,
    pub ray_monotone: bool,
    pub window: usize,
}

/// η, q and p̂ for the named elements, plus a defect audit over the
/// elements and their products.
pub fn pseudochar_report(
    a: &GroupAction,
    ray: &RaySpec,
    elements: &[(String, Word)],
    n: u32,
    delta: HalfInt,
    th: Thresholds,
) -> Result<PseudocharReport> {
    let mut eta = BTreeMap::new();
    let mut q = BTreeMap::new();
    let mut p = BTreeMap::new();
    let mut p_undefined = Vec::new();
    for (name, g) in elements {
        a.check_word(g)?;
        for k in [1, n] {
            if let Some(x) = a.apply(&g.pow(k), ray.points[0]) {
                let v = quasi_horofunction(&a.space, ray, x, delta)?;
                eta.insert(a.space.label(x as usize), v.value);
            }
        }
        q.insert(name.clone(), quasicharacter(a, ray, g, delta)?);
        if a.apply(&g.pow(n), ray.points[0]).is_some() {
            p.insert(name.clone(), pseudocharacter(a, ray, g, n, delta, th)?);
        } else {
            p_undefined.push(name.clone());
        }
    }
    let words: Vec<Word> = elements.iter().map(|e| e.1.clone()).collect();
    let audit = defect_audit(a, ray, &words, delta)?;
    Ok(PseudocharReport {
        eta,
        q,
        p,
        p_undefined,
        defect_observed: audit.defect_observed,
        defect_bound: delta.scale(16),
        delta,
        n_used: n,
        ray_monotone: ray.is_monotone(&a.space),
        window: ray.window,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundedGeneration {
    pub group_order: usize,
    pub generator_count: usize,
    /// `None` when the subgroups do not generate the group.
    #[serde(serialize_with = "crate::serde_util::opt_u32_str")]
    pub diameter: Option<u32>,
    pub reached: usize,
}

/// Diameter of the Cayley graph of `⟨group_gens⟩` with respect to the
/// union of the subgroups `⟨subgroups[i]⟩`.
pub fn bounded_generation_diameter(group_gens: &[ModMatrix], subgroups: &[Vec<ModMatrix>], max_order: usize) -> Result<BoundedGeneration> {
    let first = group_gens
        .first()
        .or_else(|| subgroups.iter().flatten().next())
        .ok_or_else(|| Error::invalid("no generators"))?;
    let id = first.identity_like();
    let group = enumerate_group(&id, group_gens, max_order).map_err(|e| match e {
        Error::Budget(_) => Error::Budget(format!("group order exceeds {max_order}")),
        other => other,
    })?;
    let index: HashMap<&ModMatrix, u32> = group.iter().enumerate().map(|(i, g)| (g, i as u32)).collect();
    let mut gens: Vec<ModMatrix> = Vec::new();
    for sub in subgroups {
        for h in enumerate_group(&id, sub, max_order)? {
            if !h.is_identity() {
                if !index.contains_key(&h) {
                    return Err(Error::invalid(format!("subgroup element {} outside the group", h.label())));
                }
                gens.push(h);
            }
        }
    }
    gens.sort();
    gens.dedup();
    let gen_idx: Vec<Vec<u32>> = group
        .par_iter()
        .map(|g| gens.iter().map(|s| index[&g.mul(s)]).collect())
        .collect();
    let mut dist = vec![u32::MAX; group.len()];
    dist[0] = 0;
    let mut queue = VecDeque::from([0u32]);
    while let Some(u) = queue.pop_front() {
        for &v in &gen_idx[u as usize] {
            if dist[v as usize] == u32::MAX {
                dist[v as usize] = dist[u as usize] + 1;
                queue.push_back(v);
            }
        }
    }
    let reached = dist.iter().filter(|&&d| d != u32::MAX).count();
    // Cayley graphs are vertex-transitive, so the eccentricity of the
    // identity is the diameter.
    let diameter = (reached == group.len()).then(|| dist.iter().copied().max().unwrap_or(0));
    Ok(BoundedGeneration {
        group_order: group.len(),
        generator_count: gens.len(),
        diameter,
        reached,
    })
}

/// Upper and lower unipotent subgroup generators of `SL(2, Z/p)`.
pub fn sl2_unipotents(p: u64) -> (Vec<ModMatrix>, Vec<ModMatrix>) {
    (
        vec![ModMatrix::elementary(p, 2, 0, 1, 1)],
        vec![ModMatrix::elementary(p, 2, 1, 0, 1)],
    )
}

/// A named action with a ray, a distinguished element and sample elements
/// for pseudocharacter experiments.
#[derive(Clone, Debug)]
pub struct CorpusInstance {
    pub name: String,
    pub action: GroupAction,
    pub ray: RaySpec,
    pub element: Word,
    pub samples: Vec<(String, Word)>,
    pub n: u32,
    pub delta: HalfInt,
}

impl CorpusInstance {
    pub fn report(&self) -> Result<PseudocharReport> {
        pseudochar_report(&self.action, &self.ray, &self.samples, self.n, self.delta, Thresholds::default())
    }
}

fn power_samples(g: &Word, range: std::ops::RangeInclusive<i32>) -> Vec<(String, Word)> {
    range
        .map(|k| {
            let w = if k < 0 { g.inverse().pow(k.unsigned_abs()) } else { g.pow(k as u32) };
            (format!("g^{k}"), w)
        })
        .collect()
}

fn translation(len: usize, s: u32) -> PartialMap {
    (0..len as u32).map(|v| (v + s < len as u32).then_some(v + s)).collect()
}

pub fn line_shift_instance(len: usize, s: u32, x0: u32, n: u32) -> Result<CorpusInstance> {
    let action = GroupAction::new(crate::coarse::path_graph(len), vec![translation(len, s)], None)?;
    let ray = RaySpec::new((x0..len as u32).collect(), 8)?;
    let g = Word::generator(0);
    Ok(CorpusInstance {
        name: format!("line-shift-{s}"),
        action,
        ray,
        samples: power_samples(&g, -3..=3),
        element: g,
        n,
        delta: HalfInt::ZERO,
    })
}

pub fn cycle_rotation_instance(len: usize, n: u32) -> Result<CorpusInstance> {
    let space = crate::coarse::cycle_graph(len);
    let delta = crate::coarse::four_point_delta(&space, crate::coarse::DeltaMode::Exact)?.delta4;
    let rot: PartialMap = (0..len as u32).map(|v| Some((v + 1) % len as u32)).collect();
    let action = GroupAction::new(space, vec![rot], None)?;
    let ray = RaySpec::new((0..=(len / 2) as u32).collect(), (len / 4).clamp(1, 4))?;
    let g = Word::generator(0);
    Ok(CorpusInstance {
        name: format!("cycle-rotation-{len}"),
        action,
        ray,
        samples: power_samples(&g, -3..=3),
        element: g,
        n,
        delta,
    })
}

/// Translation of the base of the exponential horoball over a path; the
/// ray climbs vertically above `x0`.
pub fn horoball_translation_instance(len: usize, depth: u32, x0: u32, n: u32, delta_samples: u64, seed: u64) -> Result<CorpusInstance> {
    let base = crate::coarse::path_graph(len);
    let fam = crate::horoball::exponential_family(&base, depth);
    let h = crate::horoball::build_horoball(&base, &fam, depth, false)?;
    let delta = crate::coarse::four_point_delta(
        &h.space,
        crate::coarse::DeltaMode::Sampled {
            samples: delta_samples,
            seed,
        },
    )?
    .delta4;
    let shift: PartialMap = (0..h.space.n())
        .map(|i| {
            let (v, lvl) = h.coords(i);
            (v + 1 < len).then(|| h.index(v + 1, lvl) as u32)
        })
        .collect();
    let ray = RaySpec::new((0..=depth).map(|l| h.index(x0 as usize, l) as u32).collect(), 3)?;
    let action = GroupAction::new(h.space, vec![shift], None)?;
    let g = Word::generator(0);
    Ok(CorpusInstance {
        name: "horoball-translation".into(),
        action,
        ray,
        samples: power_samples(&g, -2..=2),
        element: g,
        n,
        delta,
    })
}

/// A comb: spine `0..len` with a tooth `len + v` on each spine vertex,
/// translated along the spine.
pub fn comb_shift_instance(len: usize, x0: u32, n: u32) -> Result<CorpusInstance> {
    let l = len as u32;
    let mut edges: Vec<(u32, u32)> = (1..l).map(|v| (v - 1, v)).collect();
    edges.extend((0..l).map(|v| (v, l + v)));
    let space = FiniteGraphSpace::from_edges(2 * len, &edges)?;
    let shift: PartialMap = (0..2 * l)
        .map(|v| {
            let (spine, off) = if v < l { (v, 0) } else { (v - l, l) };
            (spine + 1 < l).then_some(spine + 1 + off)
        })
        .collect();
    let action = GroupAction::new(space, vec![shift], None)?;
    let ray = RaySpec::new((x0..l).collect(), 8)?;
    let g = Word::generator(0);
    Ok(CorpusInstance {
        name: "comb-shift".into(),
        action,
        ray,
        samples: power_samples(&g, -3..=3),
        element: g,
        n,
        delta: HalfInt::ZERO,
    })
}

/// The standard corpus: line shift, cycle rotation, horoball base
/// translation and a tree (comb) shift.
pub fn pseudochar_corpus() -> Result<Vec<CorpusInstance>> {
    Ok(vec![
        line_shift_instance(800, 2, 400, 64)?,
        cycle_rotation_instance(24, 48)?,
        horoball_translation_instance(513, 9, 256, 128, 200_000, 2024)?,
        comb_shift_instance(600, 300, 64)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coarse::{cycle_graph, four_point_delta, path_graph, DeltaMode};

    fn line_action(len: usize, s: u32) -> GroupAction {
        let shift: PartialMap = (0..len as u32).map(|v| (v + s < len as u32).then_some(v + s)).collect();
        GroupAction::new(path_graph(len), vec![shift], None).unwrap()
    }

    fn rotation(n: usize) -> GroupAction {
        let rot: PartialMap = (0..n as u32).map(|v| Some((v + 1) % n as u32)).collect();
        GroupAction::new(cycle_graph(n), vec![rot], None).unwrap()
    }

    #[test]
    fn displacement_examples() {
        let a = line_action(50, 1);
        let g = Word::generator(0);
        assert_eq!(displacements(&a, &Word::identity(), 10, 5).unwrap().values, vec![0; 5]);
        assert_eq!(displacements(&a, &g, 10, 4).unwrap().values, vec![1, 2, 3, 4]);
        let d = displacements(&a, &g, 45, 10).unwrap();
        assert!(d.partial);
        assert_eq!(d.values.len(), 4);
        let r = rotation(6);
        assert_eq!(displacements(&r, &g, 0, 8).unwrap().values, vec![1, 2, 3, 2, 1, 0, 1, 2]);
    }

    #[test]
    fn non_isometry_rejected() {
        let fold: PartialMap = (0..5u32).map(|v| Some(v.min(4 - v) * 2 % 5)).collect();
        assert!(GroupAction::new(path_graph(5), vec![fold], None).is_err());
    }

    #[test]
    fn translation_lengths() {
        let a = line_action(100, 3);
        let t = stable_translation_length(&a, &Word::generator(0), 0, 20).unwrap();
        assert_eq!(t.upper, Rational64::from_integer(3));
        assert_eq!(t.estimate, Rational64::from_integer(3));
        let r = rotation(10);
        let t = stable_translation_length(&r, &Word::generator(0), 0, 100).unwrap();
        assert_eq!(t.upper, Rational64::zero());
        assert!(stable_translation_length(&r, &Word::generator(0), 0, 0).is_err());
    }

    #[test]
    fn classification() {
        let a = line_action(200, 1);
        let c = classify_isometry(&a, &Word::generator(0), 0, 64, HalfInt::ZERO, Thresholds::default()).unwrap();
        assert_eq!(c.kind, IsometryType::Hyperbolic);
        let r = rotation(12);
        let d4 = four_point_delta(&r.space, DeltaMode::Exact).unwrap().delta4;
        let c = classify_isometry(&r, &Word::generator(0), 0, 64, d4, Thresholds::default()).unwrap();
        assert_eq!(c.kind, IsometryType::Elliptic);
    }

    #[test]
    fn horofunction_on_a_line() {
        let s = path_graph(40);
        let ray = RaySpec::new((10..40).collect(), 5).unwrap();
        let v = quasi_horofunction(&s, &ray, 7, HalfInt::ZERO).unwrap();
        assert_eq!(v.value, HalfInt::from_int(3));
        assert_eq!(quasi_horofunction(&s, &ray, 10, HalfInt::ZERO).unwrap().value, HalfInt::ZERO);
        assert!(ray.is_monotone(&s));
    }

    #[test]
    fn unstable_tail_is_inconclusive() {
        let s = cycle_graph(12);
        let ray = RaySpec::new((0..12).collect(), 6).unwrap();
        let e = quasi_horofunction(&s, &ray, 6, HalfInt::ZERO).unwrap_err();
        assert!(matches!(e, Error::Inconclusive(_)));
    }

    #[test]
    fn line_shift_pseudocharacter() {
        let s = 3;
        let a = line_action(400, s);
        let ray = RaySpec::new((0..400).collect(), 8).unwrap();
        let g = Word::generator(0);
        assert_eq!(quasicharacter(&a, &ray, &g, HalfInt::ZERO).unwrap(), HalfInt::from_int(-3));
        assert_eq!(quasicharacter(&a, &ray, &Word::identity(), HalfInt::ZERO).unwrap(), HalfInt::ZERO);
        let p = pseudocharacter(&a, &ray, &g, 32, HalfInt::ZERO, Thresholds::default()).unwrap();
        assert_eq!(p.p_hat, Rational64::from_integer(-(s as i64)));
        assert!(p.consistent);
        let elems: Vec<Word> = (0..6).map(|k| g.pow(k)).collect();
        assert_eq!(defect_audit(&a, &ray, &elems, HalfInt::ZERO).unwrap().defect_observed, HalfInt::ZERO);
    }

    #[test]
    fn word_parsing() {
        let w = Word::parse("0 1,-1 e").unwrap();
        assert_eq!(w.letters, vec![(0, false), (1, false), (1, true)]);
        assert_eq!(w.render(), "0 1 -1");
        assert_eq!(Word::parse("").unwrap(), Word::identity());
        assert!(Word::parse("x").is_err());
    }

    /// All-sources BFS over the explicit element list.
    fn bg_oracle(p: u64) -> u32 {
        let (u, l) = sl2_unipotents(p);
        let id = ModMatrix::identity(p, 2);
        let all = enumerate_group(&id, &[u[0].clone(), l[0].clone()], 100_000).unwrap();
        let gens: Vec<ModMatrix> = (1..p as i64)
            .flat_map(|t| [ModMatrix::elementary(p, 2, 0, 1, t), ModMatrix::elementary(p, 2, 1, 0, t)])
            .collect();
        let pos: HashMap<ModMatrix, usize> = all.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
        let mut diam = 0;
        for s in 0..all.len() {
            let mut d = vec![u32::MAX; all.len()];
            d[s] = 0;
            let mut q = VecDeque::from([s]);
            while let Some(x) = q.pop_front() {
                for t in &gens {
                    let y = pos[&all[x].mul(t)];
                    if d[y] == u32::MAX {
                        d[y] = d[x] + 1;
                        q.push_back(y);
                    }
                }
            }
            diam = diam.max(*d.iter().max().unwrap());
        }
        diam
    }

    #[test]
    fn bounded_generation_small() {
        for p in [3u64, 5] {
            let (u, l) = sl2_unipotents(p);
            let gens = [u.clone(), l.clone()].concat();
            let r = bounded_generation_diameter(&gens, &[u, l], 1_000_000).unwrap();
            assert_eq!(r.group_order as u64, p * (p * p - 1));
            assert_eq!(r.diameter, Some(bg_oracle(p)));
        }
        let (u, l) = sl2_unipotents(3);
        let gens = [u, l].concat();
        let triv = vec![ModMatrix::identity(3, 2)];
        let r = bounded_generation_diameter(&gens, &[triv], 1000).unwrap();
        assert_eq!(r.diameter, None);
        assert!(bounded_generation_diameter(&gens, &[], 5).unwrap_err().is_budget());
    }

    #[test]
    fn corpus_consistency() {
        for inst in pseudochar_corpus().unwrap() {
            let r = inst.report().unwrap();
            assert!(r.defect_observed <= r.defect_bound, "{}", inst.name);
            for (name, p) in &r.p {
                assert!(p.consistent, "{} {name}: {p:?}", inst.name);
            }
            let g = &inst.element;
            let q1 = quasicharacter(&inst.action, &inst.ray, &g.pow(inst.n / 2), inst.delta).unwrap();
            let q2 = quasicharacter(&inst.action, &inst.ray, &g.pow(inst.n), inst.delta).unwrap();
            let drift = (q2.to_rational() / inst.n as i64 - q1.to_rational() * 2 / inst.n as i64).abs();
            assert!(drift <= inst.delta.to_rational() * 32 / inst.n as i64, "{}", inst.name);
        }
    }

    #[test]
    fn corpus_expected_types() {
        let c = pseudochar_corpus().unwrap();
        let kind = |i: usize| c[i].report().unwrap().p["g^1"].classification.kind;
        assert_eq!(kind(0), IsometryType::Hyperbolic);
        assert_eq!(c[0].report().unwrap().p["g^1"].p_hat, Rational64::from_integer(-2));
        assert_eq!(kind(1), IsometryType::Elliptic);
        assert_eq!(c[1].report().unwrap().p["g^1"].p_hat, Rational64::zero());
        assert_eq!(kind(2), IsometryType::UnboundedNonhyperbolic);
        assert_eq!(c[3].report().unwrap().defect_observed, HalfInt::ZERO);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(32))]

        #[test]
        fn line_shift_is_additive(s in 1u32..5, x0 in 15u32..30) {
            let inst = line_shift_instance(200, s, x0, 16).unwrap();
            let words: Vec<Word> = inst.samples.iter().map(|e| e.1.clone()).collect();
            let audit = defect_audit(&inst.action, &inst.ray, &words, HalfInt::ZERO).unwrap();
            proptest::prop_assert_eq!(audit.defect_observed, HalfInt::ZERO);
            let p = pseudocharacter(&inst.action, &inst.ray, &inst.element, 16, HalfInt::ZERO, Thresholds::default()).unwrap();
            proptest::prop_assert_eq!(p.p_hat, Rational64::from_integer(-(s as i64)));
        }

        #[test]
        fn fekete_upper_bound_nonincreasing(len in 5usize..40, n in 1u32..60) {
            let r = rotation(len);
            let g = Word::generator(0);
            let a = stable_translation_length(&r, &g, 0, n).unwrap().upper;
            let b = stable_translation_length(&r, &g, 0, n + 7).unwrap().upper;
            proptest::prop_assert!(b <= a);
        }

        #[test]
        fn rotations_are_elliptic_and_consistent(len in 4usize..30, k in 1u32..4) {
            let inst = cycle_rotation_instance(len, len as u32 * k).unwrap();
            let p = pseudocharacter(&inst.action, &inst.ray, &inst.element, inst.n, inst.delta, Thresholds::default()).unwrap();
            proptest::prop_assert_eq!(p.classification.kind, IsometryType::Elliptic);
            proptest::prop_assert!(p.consistent);
        }
    }
}
