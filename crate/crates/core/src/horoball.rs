//! Combinatorial horoballs over finite base graphs: ball families, the
//! four admissibility axioms, truncated horoball graphs, four-point
//! profiles by depth, and the orbit-family distance formula.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::coarse::{four_point_delta, path_graph, DeltaMode, DeltaReport, FiniteGraphSpace};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FamilyKind {
    Exponential,
    Orbit { c1: u32, basepoint: u32 },
    Custom,
}

/// `B_n(v)` for `n = 1..=depth`, each set sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallFamily {
    pub kind: FamilyKind,
    table: Vec<Vec<Vec<u32>>>,
}

impl BallFamily {
    pub fn from_table(kind: FamilyKind, mut table: Vec<Vec<Vec<u32>>>) -> Result<Self> {
        let n = table.first().map_or(0, Vec::len);
        for level in &mut table {
            if level.len() != n {
                return Err(Error::invalid("every level must list every vertex"));
            }
            for set in level.iter_mut() {
                set.sort_unstable();
                set.dedup();
                if set.last().is_some_and(|&w| w as usize >= n) {
                    return Err(Error::invalid("ball member out of range"));
                }
            }
        }
        Ok(BallFamily { kind, table })
    }

    pub fn depth(&self) -> u32 {
        self.table.len() as u32
    }

    pub fn vertex_count(&self) -> usize {
        self.table.first().map_or(0, Vec::len)
    }

    /// `B_n(v)`, `1 ≤ n ≤ depth`.
    pub fn ball(&self, n: u32, v: usize) -> &[u32] {
        &self.table[n as usize - 1][v]
    }

    pub fn contains(&self, n: u32, v: usize, w: u32) -> bool {
        self.ball(n, v).binary_search(&w).is_ok()
    }

    pub fn truncated(&self, depth: u32) -> BallFamily {
        BallFamily {
            kind: self.kind.clone(),
            table: self.table[..depth.min(self.depth()) as usize].to_vec(),
        }
    }
}

/// `B_n(v)` = metric ball of radius `2^{n−1}` about `v`.
pub fn exponential_family(x: &FiniteGraphSpace, depth: u32) -> BallFamily {
    let n = x.n();
    let table = (1..=depth)
        .map(|level| {
            let r = 1u64 << (level - 1).min(40);
            (0..n)
                .into_par_iter()
                .map(|v| {
                    let row = x.distances().row(v);
                    (0..n as u32).filter(|&w| (row[w as usize] as u64) <= r).collect()
                })
                .collect()
        })
        .collect();
    BallFamily {
        kind: FamilyKind::Exponential,
        table,
    }
}

/// Orbit family over the points `orbit[i] = g_i·x₀` of an ambient space:
/// `B_n(i) = { j : d(g_j x₀, g_i x₀) ≤ (2n+1)·C₁ }`.
///
/// Returns the base graph on orbit indices, joining `i, j` when they are
/// within `3·C₁`, so that `B_1` is its radius-one ball, together with the
/// family. The first orbit point is recorded as the basepoint.
pub fn orbit_family(ambient: &FiniteGraphSpace, orbit: &[u32], c1: u32, depth: u32) -> Result<(FiniteGraphSpace, BallFamily)> {
    if c1 == 0 {
        return Err(Error::invalid("C1 must be positive"));
    }
    if orbit.is_empty() {
        return Err(Error::invalid("empty orbit"));
    }
    if let Some(&bad) = orbit.iter().find(|&&p| p as usize >= ambient.n()) {
        return Err(Error::invalid(format!("orbit point {bad} outside the space")));
    }
    let m = orbit.len();
    let d = |i: usize, j: usize| ambient.d(orbit[i] as usize, orbit[j] as usize) as u64;
    let table: Vec<Vec<Vec<u32>>> = (1..=depth as u64)
        .map(|level| {
            let r = (2 * level + 1) * c1 as u64;
            (0..m)
                .into_par_iter()
                .map(|i| (0..m as u32).filter(|&j| d(i, j as usize) <= r).collect())
                .collect()
        })
        .collect();
    let mut edges = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            if d(i, j) <= 3 * c1 as u64 {
                edges.push((i as u32, j as u32));
            }
        }
    }
    let base = FiniteGraphSpace::from_edges(m, &edges)?;
    let fam = BallFamily {
        kind: FamilyKind::Orbit {
            c1,
            basepoint: orbit[0],
        },
        table,
    };
    Ok((base, fam))
}

/// Parse "n v: w1 w2 ..." lines (with `#` comments) into a family on `n_vertices`.
/// Unlisted balls are empty; depth is the largest `n` mentioned.
pub fn parse_custom_family(text: &str, n_vertices: usize) -> Result<BallFamily> {
    let mut entries: Vec<(u32, u32, Vec<u32>)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let perr = |msg: String| Error::Parse { line: line_no, msg };
        let (head, tail) = line
            .split_once(':')
            .ok_or_else(|| perr("expected \"n v: w1 w2 ...\"".into()))?;
        let head: Vec<&str> = head.split_whitespace().collect();
        let [n, v] = head.as_slice() else {
            return Err(perr("expected level and vertex before ':'".into()));
        };
        let num = |t: &str| t.parse::<u32>().map_err(|_| perr(format!("expected an integer, found {t:?}")));
        let (n, v) = (num(n)?, num(v)?);
        if n == 0 {
            return Err(perr("levels start at 1".into()));
        }
        if v as usize >= n_vertices {
            return Err(perr(format!("vertex {v} not in the base graph")));
        }
        let ws = tail.split_whitespace().map(num).collect::<Result<Vec<u32>>>()?;
        if let Some(w) = ws.iter().find(|&&w| w as usize >= n_vertices) {
            return Err(perr(format!("vertex {w} not in the base graph")));
        }
        entries.push((n, v, ws));
    }
    let depth = entries.iter().map(|e| e.0).max().unwrap_or(0);
    let mut table = vec![vec![Vec::new(); n_vertices]; depth as usize];
    for (n, v, ws) in entries {
        table[n as usize - 1][v as usize].extend(ws);
    }
    BallFamily::from_table(FamilyKind::Custom, table)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomResult {
    pub axiom: &'static str,
    pub holds: bool,
    pub checked: u64,
    /// First failing instance, e.g. `[n, v, w, u]` for exponential growth.
    pub witness: Option<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdmissibilityReport {
    pub depth: u32,
    pub axioms: Vec<AxiomResult>,
}

impl AdmissibilityReport {
    pub fn admissible(&self) -> bool {
        self.axioms.iter().all(|a| a.holds)
    }

    pub fn axiom(&self, name: &str) -> &AxiomResult {
        self.axioms.iter().find(|a| a.axiom == name).expect("known axiom")
    }
}

/// A vertex map that may be undefined near the edge of a truncated space.
pub type PartialMap = Vec<Option<u32>>;

/// Check connectedness, exponential growth and symmetry on `1..=depth`
/// (growth on `1..depth`), and equivariance under each generator where it
/// is defined.
pub fn admissible_check(x: &FiniteGraphSpace, fam: &BallFamily, gens: &[PartialMap]) -> Result<AdmissibilityReport> {
    let n = x.n();
    if fam.vertex_count() != n && fam.depth() > 0 {
        return Err(Error::invalid("family and base graph have different vertex counts"));
    }
    if let Some(g) = gens.iter().find(|g| g.len() != n) {
        return Err(Error::invalid(format!("generator has {} entries, expected {n}", g.len())));
    }
    let depth = fam.depth();

    let mut connectedness = AxiomResult {
        axiom: "connectedness",
        holds: true,
        checked: 0,
        witness: None,
    };
    if depth >= 1 {
        for v in 0..n {
            connectedness.checked += 1;
            let row = x.distances().row(v);
            let want: Vec<u32> = (0..n as u32).filter(|&w| row[w as usize] <= 1).collect();
            if fam.ball(1, v) != want.as_slice() {
                let w = (0..n as u32)
                    .find(|&w| fam.contains(1, v, w) != (row[w as usize] <= 1))
                    .expect("sets differ");
                connectedness.holds = false;
                connectedness.witness = Some(vec![v as u32, w]);
                break;
            }
        }
    }

    // v ∈ B_n(w) ⇒ B_n(v) ⊆ B_{n+1}(w); witness [n, v, w, u] with u ∈ B_n(v) \ B_{n+1}(w)
    let growth_hits: Vec<(u64, Option<Vec<u32>>)> = (0..n)
        .into_par_iter()
        .map(|w| {
            let mut checked = 0u64;
            for level in 1..depth {
                for &v in fam.ball(level, w) {
                    checked += 1;
                    if let Some(&u) = fam.ball(level, v as usize).iter().find(|&&u| !fam.contains(level + 1, w, u)) {
                        return (checked, Some(vec![level, v, w as u32, u]));
                    }
                }
            }
            (checked, None)
        })
        .collect();
    let growth = AxiomResult {
        axiom: "exponential_growth",
        holds: growth_hits.iter().all(|h| h.1.is_none()),
        checked: growth_hits.iter().map(|h| h.0).sum(),
        witness: growth_hits.into_iter().find_map(|h| h.1),
    };

    let mut symmetry = AxiomResult {
        axiom: "symmetry",
        holds: true,
        checked: 0,
        witness: None,
    };
    'sym: for level in 1..=depth {
        for w in 0..n {
            for &v in fam.ball(level, w) {
                symmetry.checked += 1;
                if !fam.contains(level, v as usize, w as u32) {
                    symmetry.holds = false;
                    symmetry.witness = Some(vec![level, v, w as u32]);
                    break 'sym;
                }
            }
        }
    }

    // u ∈ B_n(w) ⇔ g u ∈ B_n(g w) wherever g is defined; witness [gen, n, w, u]
    let mut equivariance = AxiomResult {
        axiom: "equivariance",
        holds: true,
        checked: 0,
        witness: None,
    };
    'eq: for (gi, g) in gens.iter().enumerate() {
        for level in 1..=depth {
            for w in 0..n {
                let Some(gw) = g[w] else { continue };
                for u in 0..n {
                    let Some(gu) = g[u] else { continue };
                    equivariance.checked += 1;
                    if fam.contains(level, w, u as u32) != fam.contains(level, gw as usize, gu) {
                        equivariance.holds = false;
                        equivariance.witness = Some(vec![gi as u32, level, w as u32, u as u32]);
                        break 'eq;
                    }
                }
            }
        }
    }

    Ok(AdmissibilityReport {
        depth,
        axioms: vec![connectedness, growth, symmetry, equivariance],
    })
}

/// The horoball truncated at `depth`; vertex `(v, n)` has index `n·|X| + v`.
#[derive(Clone, Debug)]
pub struct HoroballGraph {
    pub space: FiniteGraphSpace,
    pub base_size: usize,
    pub depth: u32,
}

impl HoroballGraph {
    pub fn index(&self, v: usize, level: u32) -> usize {
        level as usize * self.base_size + v
    }

    pub fn coords(&self, idx: usize) -> (usize, u32) {
        (idx % self.base_size, (idx / self.base_size) as u32)
    }
}

/// Build the horoball on levels `0..=depth`. Level 0 takes its horizontal
/// edges from `B_1`, level `n ≥ 1` from `B_n`. An inadmissible family is
/// rejected unless `allow_inadmissible` is set.
pub fn build_horoball(x: &FiniteGraphSpace, fam: &BallFamily, depth: u32, allow_inadmissible: bool) -> Result<HoroballGraph> {
    if depth > fam.depth() {
        return Err(Error::invalid(format!("family only covers depth {}", fam.depth())));
    }
    if depth >= 1 && fam.vertex_count() != x.n() {
        return Err(Error::invalid("family and base graph have different vertex counts"));
    }
    let fam = fam.truncated(depth.max(1));
    if !allow_inadmissible && depth >= 1 {
        let report = admissible_check(x, &fam, &[])?;
        if let Some(bad) = report.axioms.iter().find(|a| !a.holds) {
            return Err(Error::invalid(format!(
                "family fails the {} axiom at {:?}",
                bad.axiom, bad.witness
            )));
        }
    }
    let b = x.n();
    let total = b * (depth as usize + 1);
    let mut adj = vec![Vec::new(); total];
    for level in 0..=depth {
        for v in 0..b {
            let me = level as usize * b + v;
            if level < depth {
                adj[me].push((me + b) as u32);
                adj[me + b].push(me as u32);
            }
            let horiz: &[u32] = if level == 0 {
                if depth == 0 {
                    x.neighbors(v)
                } else {
                    fam.ball(1, v)
                }
            } else {
                fam.ball(level, v)
            };
            for &w in horiz {
                if w as usize != v {
                    adj[me].push(level * b as u32 + w);
                    adj[level as usize * b + w as usize].push(me as u32);
                }
            }
        }
    }
    let labels = (0..total).map(|i| format!("({},{})", i % b, i / b)).collect();
    let space = FiniteGraphSpace::from_adjacency(adj)?.with_labels(labels)?;
    Ok(HoroballGraph {
        space,
        base_size: b,
        depth,
    })
}

/// How to scan each truncation: exactly when `n⁴` is at most
/// `exact_limit`, otherwise with `samples` quadruples from `seed`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ScanPolicy {
    pub exact_limit: u64,
    pub samples: u64,
    pub seed: u64,
}

impl ScanPolicy {
    pub fn mode_for(&self, n: usize) -> DeltaMode {
        let n4 = (n as u128).pow(4);
        if n4 <= self.exact_limit as u128 {
            DeltaMode::Exact
        } else {
            DeltaMode::Sampled {
                samples: self.samples,
                seed: self.seed,
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProfileRow {
    pub depth: u32,
    pub vertices: usize,
    pub delta: DeltaReport,
}

/// Four-point constant of each truncation in `depths`.
pub fn delta_profile(x: &FiniteGraphSpace, fam: &BallFamily, depths: &[u32], policy: ScanPolicy) -> Result<Vec<ProfileRow>> {
    depths
        .iter()
        .map(|&depth| {
            let h = build_horoball(x, fam, depth, true)?;
            let delta = four_point_delta(&h.space, policy.mode_for(h.space.n()))?;
            Ok(ProfileRow {
                depth,
                vertices: h.space.n(),
                delta,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormulaMismatch {
    pub a: u32,
    pub n: u32,
    pub b: u32,
    pub m: u32,
    pub k: u32,
    pub bfs: u32,
    pub expected: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormulaReport {
    pub c1: u32,
    pub seed: u64,
    pub pairs_checked: u64,
    /// Pairs with `k` beyond the truncation depth are redrawn, not checked.
    pub redrawn: u64,
    pub mismatches: Vec<FormulaMismatch>,
}

/// The `k` with `(2k−1)·C₁ < d ≤ (2k+1)·C₁`.
pub fn bracket_k(d: u32, c1: u32) -> u32 {
    // k = ceil((d/C₁ − 1)/2) = ceil((d − C₁) / 2C₁)
    if d <= c1 {
        0
    } else {
        (d - c1).div_ceil(2 * c1)
    }
}

/// Distances predicted for `(a,n)`, `(b,m)`, `a ≠ b`, given `k`.
pub fn predicted_distances(n: u32, m: u32, k: u32) -> Vec<u32> {
    if n.max(m) >= k {
        vec![n.abs_diff(m) + 1]
    } else {
        let base = 2 * k - (m + n);
        vec![base, base + 1]
    }
}

/// Compare horoball BFS distances with the orbit-family formula on
/// `pairs` random vertex pairs with distinct base points. `orbit_distance`
/// gives `d(g_a x₀, g_b x₀)` in the ambient space.
pub fn distance_formula_check(
    h: &HoroballGraph,
    orbit_distance: impl Fn(usize, usize) -> u32,
    c1: u32,
    pairs: u64,
    seed: u64,
) -> Result<FormulaReport> {
    if h.base_size < 2 {
        return Err(Error::invalid("need at least two base points"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = Vec::new();
    let mut checked = 0u64;
    let mut redrawn = 0u64;
    while checked < pairs {
        if redrawn > 1000 * pairs.max(1) {
            return Err(Error::Inconclusive("truncation too shallow to sample pairs".into()));
        }
        let a = rng.random_range(0..h.base_size);
        let b = rng.random_range(0..h.base_size);
        let n = rng.random_range(0..=h.depth);
        let m = rng.random_range(0..=h.depth);
        if a == b {
            redrawn += 1;
            continue;
        }
        let k = bracket_k(orbit_distance(a, b), c1);
        if k > h.depth {
            redrawn += 1;
            continue;
        }
        checked += 1;
        let bfs = h.space.d(h.index(a, n), h.index(b, m));
        let expected = predicted_distances(n, m, k);
        if !expected.contains(&bfs) {
            mismatches.push(FormulaMismatch {
                a: a as u32,
                n,
                b: b as u32,
                m,
                k,
                bfs,
                expected,
            });
        }
    }
    Ok(FormulaReport {
        c1,
        seed,
        pairs_checked: checked,
        redrawn,
        mismatches,
    })
}

/// The orbit family of the unit shift on a path of length `len`, in which
/// every vertex is an orbit point; the family is built regardless of
/// admissibility. Returns the admissibility report and the formula check.
pub fn z_shift_formula_check(len: usize, c1: u32, depth: u32, pairs: u64, seed: u64) -> Result<(AdmissibilityReport, FormulaReport)> {
    let line = path_graph(len);
    let orbit: Vec<u32> = (0..len as u32).collect();
    let (base, fam) = orbit_family(&line, &orbit, c1, depth)?;
    let shift: PartialMap = (0..len as u32).map(|v| (v + 1 < len as u32).then_some(v + 1)).collect();
    let adm = admissible_check(&base, &fam, &[shift])?;
    let h = build_horoball(&base, &fam, depth, true)?;
    let report = distance_formula_check(&h, |a, b| line.d(a, b), c1, pairs, seed)?;
    Ok((adm, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coarse::{cycle_graph, grid_graph, path_graph, random_tree, DeltaMode};

    fn shift(n: usize) -> PartialMap {
        (0..n).map(|v| (v + 1 < n).then_some(v as u32 + 1)).collect()
    }

    #[test]
    fn exponential_radii() {
        let p = path_graph(21);
        let f = exponential_family(&p, 4);
        assert_eq!(f.ball(1, 10), &[9, 10, 11]);
        assert_eq!(f.ball(3, 10), &(6..=14).collect::<Vec<u32>>()[..]);
        let r = admissible_check(&p, &f, &[shift(21)]).unwrap();
        assert!(r.admissible(), "{r:?}");
    }

    #[test]
    fn broken_symmetry_is_witnessed() {
        let p = path_graph(5);
        let f = exponential_family(&p, 3);
        let mut table: Vec<Vec<Vec<u32>>> = (1..=3).map(|n| (0..5).map(|v| f.ball(n, v).to_vec()).collect()).collect();
        table[1][0].retain(|&w| w != 2);
        let g = BallFamily::from_table(FamilyKind::Custom, table).unwrap();
        let r = admissible_check(&p, &g, &[]).unwrap();
        assert!(!r.axiom("symmetry").holds);
        assert_eq!(r.axiom("symmetry").witness, Some(vec![2, 0, 2]));
        assert!(build_horoball(&p, &g, 3, false).is_err());
    }

    #[test]
    fn small_horoballs() {
        let single = FiniteGraphSpace::from_edges(1, &[]).unwrap();
        let h = build_horoball(&single, &exponential_family(&single, 5), 5, false).unwrap();
        assert_eq!(h.space.n(), 6);
        assert_eq!(h.space.d(0, 5), 5);
        assert_eq!(four_point_delta(&h.space, DeltaMode::Exact).unwrap().delta4.doubled(), 0);

        // Two adjacent vertices: a ladder with a rung on every level.
        let two = path_graph(2);
        let h = build_horoball(&two, &exponential_family(&two, 3), 3, false).unwrap();
        assert_eq!(h.space.n(), 8);
        assert_eq!(h.space.edge_count(), 3 * 2 + 4);

        let line = path_graph(200);
        let h = build_horoball(&line, &exponential_family(&line, 8), 8, false).unwrap();
        assert_eq!(h.space.n(), 1800);
    }

    #[test]
    fn vertical_geodesy_and_level_monotonicity() {
        for base in [path_graph(30), cycle_graph(17), grid_graph(5, 4), random_tree(25, 3)] {
            let h = build_horoball(&base, &exponential_family(&base, 6), 6, false).unwrap();
            for v in 0..base.n() {
                for n in 0..=6 {
                    assert_eq!(h.space.d(h.index(v, 0), h.index(v, n)), n);
                }
                for w in 0..base.n() {
                    let dh = h.space.d(h.index(v, 0), h.index(w, 0));
                    let dx = base.d(v, w);
                    assert!(dh <= dx);
                    if dx <= 2 {
                        assert_eq!(dh, dx);
                    }
                }
            }
        }
    }

    #[test]
    fn custom_family_parse() {
        let text = "# two vertices\n1 0: 0 1\n1 1: 1 0\n2 0: 0 1\n2 1: 0 1\n";
        let f = parse_custom_family(text, 2).unwrap();
        assert_eq!(f.depth(), 2);
        assert!(admissible_check(&path_graph(2), &f, &[]).unwrap().admissible());
        let e = parse_custom_family("1 0 0 1\n", 2).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        let e = parse_custom_family("1 0: 0\n1 5: 0\n", 2).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn orbit_family_on_a_line_breaks_growth() {
        // Z acting by translation on a line: orbit distances grow linearly,
        // which the linear radii (2n+1)C₁ cannot absorb.
        let line = path_graph(40);
        let orbit: Vec<u32> = (0..40).collect();
        let (base, fam) = orbit_family(&line, &orbit, 1, 5).unwrap();
        assert_eq!(fam.ball(2, 20), &(15..=25).collect::<Vec<u32>>()[..]);
        let r = admissible_check(&base, &fam, &[shift(40)]).unwrap();
        assert!(r.axiom("connectedness").holds);
        assert!(r.axiom("symmetry").holds);
        assert!(r.axiom("equivariance").holds);
        let g = r.axiom("exponential_growth");
        assert!(!g.holds);
        let w = g.witness.clone().unwrap();
        let (n, v, c, u) = (w[0], w[1] as usize, w[2] as usize, w[3]);
        assert!(fam.contains(n, c, v as u32) && fam.contains(n, v, u) && !fam.contains(n + 1, c, u));
    }

    #[test]
    fn trivial_orbit() {
        let p = path_graph(3);
        let (base, fam) = orbit_family(&p, &[1], 2, 3).unwrap();
        assert_eq!(base.n(), 1);
        assert_eq!(fam.ball(3, 0), &[0]);
    }

    #[test]
    fn bracket() {
        assert_eq!(bracket_k(9, 1), 4);
        assert_eq!(bracket_k(10, 1), 5);
        assert_eq!(bracket_k(1, 1), 0);
        assert_eq!(bracket_k(3, 1), 1);
        for c1 in 1..5 {
            for d in 1..100 {
                let k = bracket_k(d, c1) as i64;
                assert!((2 * k - 1) * (c1 as i64) < d as i64 && d as i64 <= (2 * k + 1) * c1 as i64);
            }
        }
        assert_eq!(predicted_distances(0, 0, 4), vec![8, 9]);
        assert_eq!(predicted_distances(5, 1, 4), vec![5]);
    }
}
