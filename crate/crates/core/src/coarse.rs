//! Finite graph metrics: all-pairs distances, Gromov products, the
//! four-point constant, quasi-isometry constants, Cayley balls, coned-off
//! balls and the fiber-product space of two quasi-isometric embeddings.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::budget;
use crate::error::{Error, Result};
use crate::group::{enumerate_group, GroupElement, Perm};
use crate::halfint::HalfInt;
use crate::serde_util::{opt_u32_str, ratio_str};

/// Marker for "no path" in a [`DistanceMatrix`].
pub const INF: u32 = u32::MAX;

/// Dense symmetric table of nonnegative integer distances.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<u32>,
}

impl DistanceMatrix {
    /// Build row by row in parallel; `row(i)` must return `n` entries.
    pub fn from_rows(n: usize, row: impl Fn(usize) -> Vec<u32> + Sync) -> Result<Self> {
        budget::check((n as u64) * (n as u64) * 4, "distance table")?;
        let rows: Vec<Vec<u32>> = (0..n).into_par_iter().map(&row).collect();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            debug_assert_eq!(r.len(), n);
            data.extend_from_slice(&r);
        }
        Ok(DistanceMatrix { n, data })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> u32 + Sync) -> Result<Self> {
        Self::from_rows(n, |i| (0..n).map(|j| f(i, j)).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.n + j]
    }

    pub fn finite(&self, i: usize, j: usize) -> Option<u32> {
        let d = self.get(i, j);
        (d != INF).then_some(d)
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn is_connected(&self) -> bool {
        !self.data.contains(&INF)
    }

    /// `None` when some pair is at infinite distance.
    pub fn diameter(&self) -> Option<u32> {
        if self.is_connected() {
            Some(self.data.iter().copied().max().unwrap_or(0))
        } else {
            None
        }
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

/// Single-source BFS distances, [`INF`] for unreachable vertices.
pub fn bfs_distances(adj: &[Vec<u32>], source: usize) -> Vec<u32> {
    let mut dist = vec![INF; adj.len()];
    let mut queue = VecDeque::new();
    dist[source] = 0;
    queue.push_back(source as u32);
    while let Some(u) = queue.pop_front() {
        let du = dist[u as usize];
        for &v in &adj[u as usize] {
            if dist[v as usize] == INF {
                dist[v as usize] = du + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// A finite simple graph with its path metric.
#[derive(Clone, Debug)]
pub struct FiniteGraphSpace {
    adj: Vec<Vec<u32>>,
    dist: DistanceMatrix,
    labels: Option<Vec<String>>,
}

impl FiniteGraphSpace {
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::invalid(format!("edge ({u},{v}) out of range for {n} vertices")));
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop at {u}")));
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        Self::from_adjacency(adj)
    }

    /// Neighbour lists are sorted and deduplicated; they must be symmetric.
    pub fn from_adjacency(mut adj: Vec<Vec<u32>>) -> Result<Self> {
        let n = adj.len();
        for (u, nb) in adj.iter_mut().enumerate() {
            nb.sort_unstable();
            nb.dedup();
            if nb.binary_search(&(u as u32)).is_ok() {
                return Err(Error::invalid(format!("self-loop at {u}")));
            }
            if nb.last().is_some_and(|&v| v as usize >= n) {
                return Err(Error::invalid("neighbour out of range"));
            }
        }
        for u in 0..n {
            for &v in &adj[u] {
                if adj[v as usize].binary_search(&(u as u32)).is_err() {
                    return Err(Error::invalid(format!("adjacency not symmetric at ({u},{v})")));
                }
            }
        }
        let dist = DistanceMatrix::from_rows(n, |s| bfs_distances(&adj, s))?;
        Ok(FiniteGraphSpace {
            adj,
            dist,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(Error::invalid("label count differs from vertex count"));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn adjacency(&self) -> &[Vec<u32>] {
        &self.adj
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }

    pub fn distances(&self) -> &DistanceMatrix {
        &self.dist
    }

    #[inline]
    pub fn d(&self, u: usize, v: usize) -> u32 {
        self.dist.get(u, v)
    }

    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for (u, nb) in self.adj.iter().enumerate() {
            for &v in nb {
                if (u as u32) < v {
                    out.push((u as u32, v));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn is_connected(&self) -> bool {
        self.dist.is_connected()
    }

    pub fn diameter(&self) -> Option<u32> {
        self.dist.diameter()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, v: usize) -> String {
        match &self.labels {
            Some(l) => l[v].clone(),
            None => v.to_string(),
        }
    }

    /// Whether the vertex map `p` preserves every distance.
    pub fn is_isometry(&self, p: &[u32]) -> bool {
        p.len() == self.n()
            && (0..self.n())
                .into_par_iter()
                .all(|u| (0..self.n()).all(|v| self.d(p[u] as usize, p[v] as usize) == self.d(u, v)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeList {
    pub n: usize,
    pub edges: Vec<(u32, u32)>,
}

/// Parse "u v" lines. `#` starts a comment; a line holding a single vertex
/// declares it without edges. Duplicate edges are merged.
pub fn parse_edge_list(text: &str) -> Result<EdgeList> {
    let mut n = 0usize;
    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse = |tok: &str| -> Result<u32> {
            tok.parse::<u32>().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("expected a vertex index, found {tok:?}"),
            })
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            [a] => {
                let a = parse(a)?;
                n = n.max(a as usize + 1);
            }
            [a, b] => {
                let (a, b) = (parse(a)?, parse(b)?);
                if a == b {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("self-loop at {a}"),
                    });
                }
                n = n.max(a.max(b) as usize + 1);
                if seen.insert((a.min(b), a.max(b))) {
                    edges.push((a, b));
                }
            }
            _ => {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected \"u v\", found {} fields", toks.len()),
                })
            }
        }
    }
    Ok(EdgeList { n, edges })
}

pub fn build_space(text: &str) -> Result<FiniteGraphSpace> {
    let el = parse_edge_list(text)?;
    FiniteGraphSpace::from_edges(el.n, &el.edges)
}

fn path_edges(n: usize) -> Vec<(u32, u32)> {
    (1..n as u32).map(|i| (i - 1, i)).collect()
}

fn cycle_edges(n: usize) -> Vec<(u32, u32)> {
    (0..n as u32).map(|i| (i, (i + 1) % n as u32)).collect()
}

fn grid_edges(w: usize, h: usize) -> Vec<(u32, u32)> {
    let mut edges = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let v = (y * w + x) as u32;
            if x + 1 < w {
                edges.push((v, v + 1));
            }
            if y + 1 < h {
                edges.push((v, v + w as u32));
            }
        }
    }
    edges
}

fn tree_edges(n: usize, seed: u64) -> Vec<(u32, u32)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (1..n as u32).map(|i| (rng.random_range(0..i), i)).collect()
}

pub fn path_graph(n: usize) -> FiniteGraphSpace {
    FiniteGraphSpace::from_edges(n, &path_edges(n)).expect("path graph")
}

pub fn cycle_graph(n: usize) -> FiniteGraphSpace {
    assert!(n >= 3, "cycle needs at least 3 vertices");
    FiniteGraphSpace::from_edges(n, &cycle_edges(n)).expect("cycle graph")
}

/// `w × h` grid, vertex `(x, y)` at index `y·w + x`.
pub fn grid_graph(w: usize, h: usize) -> FiniteGraphSpace {
    FiniteGraphSpace::from_edges(w * h, &grid_edges(w, h)).expect("grid graph")
}

/// Random recursive tree: vertex `i` attaches to a uniform earlier vertex.
pub fn random_tree(n: usize, seed: u64) -> FiniteGraphSpace {
    FiniteGraphSpace::from_edges(n, &tree_edges(n, seed)).expect("random tree")
}

/// `(x|y)_z = ½(d(x,z)+d(y,z)−d(x,y))`.
pub fn gromov_product(s: &FiniteGraphSpace, x: usize, y: usize, z: usize) -> Result<HalfInt> {
    let dm = s.distances();
    match (dm.finite(x, z), dm.finite(y, z), dm.finite(x, y)) {
        (Some(a), Some(b), Some(c)) => Ok(HalfInt::from_doubled(a as i64 + b as i64 - c as i64)),
        _ => Err(Error::invalid("Gromov product of points at infinite distance")),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DeltaMode {
    Exact,
    Sampled { samples: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaReport {
    pub delta4: HalfInt,
    /// Quadruple attaining `delta4`, sorted ascending; `None` below 4 points.
    pub witness: Option<[u32; 4]>,
    pub mode: DeltaMode,
    pub quadruples_checked: u64,
    /// Sampled mode only: whether local search raised the sampled maximum.
    pub refined_by_local_search: bool,
}

/// Twice the four-point defect of `q`: largest pair sum minus the middle one.
#[inline]
pub fn quad_defect2(dm: &DistanceMatrix, q: [u32; 4]) -> i64 {
    let [a, b, c, d] = q.map(|v| v as usize);
    let s1 = dm.get(a, b) as i64 + dm.get(c, d) as i64;
    let s2 = dm.get(a, c) as i64 + dm.get(b, d) as i64;
    let s3 = dm.get(a, d) as i64 + dm.get(b, c) as i64;
    let (hi, mid) = top_two(s1, s2, s3);
    hi - mid
}

#[inline]
fn top_two(s1: i64, s2: i64, s3: i64) -> (i64, i64) {
    let (hi, lo) = if s1 >= s2 { (s1, s2) } else { (s2, s1) };
    if s3 >= hi {
        (s3, hi)
    } else if s3 >= lo {
        (hi, s3)
    } else {
        (hi, lo)
    }
}

pub fn four_point_delta(s: &FiniteGraphSpace, mode: DeltaMode) -> Result<DeltaReport> {
    if !s.is_connected() {
        return Err(Error::invalid("four-point constant of a disconnected space"));
    }
    four_point_delta_matrix(s.distances(), mode)
}

/// Four-point constant of an arbitrary finite (pseudo)metric table.
///
/// Exact mode scans unordered quadruples; the three pairings cover every
/// ordering. Sampled mode draws uniformly random quadruples from a
/// ChaCha8 stream per fixed-size chunk, then hill-climbs from the best ones
/// by moving one point at a time to a point within distance 2.
pub fn four_point_delta_matrix(dm: &DistanceMatrix, mode: DeltaMode) -> Result<DeltaReport> {
    if !dm.is_connected() {
        return Err(Error::invalid("four-point constant with infinite distances"));
    }
    let n = dm.n();
    if n < 4 {
        return Ok(DeltaReport {
            delta4: HalfInt::ZERO,
            witness: None,
            mode,
            quadruples_checked: 0,
            refined_by_local_search: false,
        });
    }
    match mode {
        DeltaMode::Exact => Ok(exact_scan(dm)),
        DeltaMode::Sampled { samples, seed } => Ok(sampled_scan(dm, samples, seed)),
    }
}

fn exact_scan(dm: &DistanceMatrix) -> DeltaReport {
    let n = dm.n();
    let per_a: Vec<(i64, [u32; 4], u64)> = (0..n - 3)
        .into_par_iter()
        .map(|a| {
            let ra = dm.row(a);
            let mut best = (-1i64, [0u32; 4]);
            let mut count = 0u64;
            for b in a + 1..n {
                let rb = dm.row(b);
                let dab = ra[b] as i64;
                for c in b + 1..n {
                    let rc = dm.row(c);
                    let (dac, dbc) = (ra[c] as i64, rb[c] as i64);
                    for d in c + 1..n {
                        let s1 = dab + rc[d] as i64;
                        let s2 = dac + rb[d] as i64;
                        let s3 = ra[d] as i64 + dbc;
                        let (hi, mid) = top_two(s1, s2, s3);
                        if hi - mid > best.0 {
                            best = (hi - mid, [a as u32, b as u32, c as u32, d as u32]);
                        }
                    }
                    count += (n - c - 1) as u64;
                }
            }
            (best.0, best.1, count)
        })
        .collect();
    let mut best = (-1i64, [0u32; 4]);
    let mut total = 0u64;
    for (v, w, c) in per_a {
        total += c;
        if v > best.0 {
            best = (v, w);
        }
    }
    DeltaReport {
        delta4: HalfInt::from_doubled(best.0),
        witness: Some(best.1),
        mode: DeltaMode::Exact,
        quadruples_checked: total,
        refined_by_local_search: false,
    }
}

const SAMPLE_CHUNK: u64 = 1 << 14;
const CLIMB_STARTS: usize = 48;
const CLIMB_STEPS: usize = 10_000;

fn sorted_quad(mut q: [u32; 4]) -> [u32; 4] {
    q.sort_unstable();
    q
}

fn draw_quad(rng: &mut ChaCha8Rng, n: u32) -> [u32; 4] {
    let mut q = [0u32; 4];
    let mut k = 0;
    while k < 4 {
        let v = rng.random_range(0..n);
        if !q[..k].contains(&v) {
            q[k] = v;
            k += 1;
        }
    }
    sorted_quad(q)
}

/// Keeps the `cap` best `(defect, quad)` pairs; ties prefer smaller quads.
fn push_top(top: &mut BTreeSet<(std::cmp::Reverse<i64>, [u32; 4])>, cap: usize, v: i64, q: [u32; 4]) {
    let key = (std::cmp::Reverse(v), q);
    if top.len() < cap {
        top.insert(key);
    } else if let Some(last) = top.last() {
        if key < *last {
            top.insert(key);
            top.pop_last();
        }
    }
}

fn sampled_scan(dm: &DistanceMatrix, samples: u64, seed: u64) -> DeltaReport {
    let n = dm.n() as u32;
    let chunks = samples.div_ceil(SAMPLE_CHUNK);
    let tops: Vec<_> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let count = SAMPLE_CHUNK.min(samples - chunk * SAMPLE_CHUNK);
            let mut top = BTreeSet::new();
            for _ in 0..count {
                let q = draw_quad(&mut rng, n);
                push_top(&mut top, CLIMB_STARTS, quad_defect2(dm, q), q);
            }
            top
        })
        .collect();
    let mut top = BTreeSet::new();
    for t in tops {
        for (v, q) in t {
            push_top(&mut top, CLIMB_STARTS, v.0, q);
        }
    }
    let (sampled_best, sampled_witness) = top
        .first()
        .map(|(v, q)| (v.0, *q))
        .unwrap_or((0, [0, 1, 2, 3]));

    let starts: Vec<[u32; 4]> = top.iter().map(|(_, q)| *q).collect();
    let climbed: Vec<(i64, [u32; 4], u64)> = starts.par_iter().map(|&q| hill_climb(dm, q)).collect();
    let mut best = (sampled_best, sampled_witness);
    let mut evals = 0u64;
    for (v, q, e) in climbed {
        evals += e;
        if v > best.0 || (v == best.0 && q < best.1) {
            best = (v, q);
        }
    }
    DeltaReport {
        delta4: HalfInt::from_doubled(best.0),
        witness: Some(best.1),
        mode: DeltaMode::Sampled { samples, seed },
        quadruples_checked: samples + evals,
        refined_by_local_search: best.0 > sampled_best,
    }
}

fn hill_climb(dm: &DistanceMatrix, start: [u32; 4]) -> (i64, [u32; 4], u64) {
    let n = dm.n();
    let mut cur = start;
    let mut val = quad_defect2(dm, cur);
    let mut evals = 0u64;
    for _ in 0..CLIMB_STEPS {
        let mut best: Option<(i64, [u32; 4])> = None;
        for pos in 0..4 {
            let row = dm.row(cur[pos] as usize);
            for u in 0..n {
                if row[u] == 0 || row[u] > 2 || cur.contains(&(u as u32)) {
                    continue;
                }
                let mut q = cur;
                q[pos] = u as u32;
                let q = sorted_quad(q);
                let v = quad_defect2(dm, q);
                evals += 1;
                if v > val && best.is_none_or(|(bv, bq)| v > bv || (v == bv && q < bq)) {
                    best = Some((v, q));
                }
            }
        }
        match best {
            Some((v, q)) => {
                val = v;
                cur = q;
            }
            None => break,
        }
    }
    (val, cur, evals)
}

/// Vertex-level thin-triangle constant: the largest distance between two
/// vertices on different sides of a geodesic triangle (over all choices of
/// geodesics) that map to the same point of the comparison tripod.
///
/// Intended for small graphs; cost is cubic in `n` times interval sizes.
pub fn tripod_thinness(s: &FiniteGraphSpace) -> Result<u32> {
    if !s.is_connected() {
        return Err(Error::invalid("tripod constant of a disconnected space"));
    }
    let n = s.n();
    let dm = s.distances();
    let worst: Vec<u32> = (0..n)
        .into_par_iter()
        .map(|x| {
            let rx = dm.row(x);
            // layers[y][t] = vertices on some geodesic from x to y at distance t from x
            let layers: Vec<Vec<Vec<u32>>> = (0..n)
                .map(|y| {
                    let dxy = rx[y];
                    let mut l = vec![Vec::new(); dxy as usize + 1];
                    for p in 0..n {
                        if rx[p] + dm.get(p, y) == dxy {
                            l[rx[p] as usize].push(p as u32);
                        }
                    }
                    l
                })
                .collect();
            let mut worst = 0u32;
            for y in 0..n {
                for z in y + 1..n {
                    let gp2 = rx[y] + rx[z] - dm.get(y, z);
                    for t in 0..=(gp2 / 2) as usize {
                        for &p in &layers[y][t] {
                            let rp = dm.row(p as usize);
                            for &q in &layers[z][t] {
                                worst = worst.max(rp[q as usize]);
                            }
                        }
                    }
                }
            }
            worst
        })
        .collect();
    Ok(worst.into_iter().max().unwrap_or(0))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QiFit {
    #[serde(serialize_with = "ratio_str")]
    pub k: Rational64,
    #[serde(serialize_with = "ratio_str")]
    pub c: Rational64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QIReport {
    #[serde(serialize_with = "ratio_str")]
    pub k: Rational64,
    #[serde(serialize_with = "ratio_str")]
    pub c: Rational64,
    #[serde(serialize_with = "ratio_str")]
    pub onto_c: Rational64,
    /// Every candidate `K` with its minimal `C`.
    pub grid: Vec<QiFit>,
    /// `C·K ≥ diam X`: the lower inequality is vacuous, so the fit says
    /// nothing about the map being an embedding.
    pub lower_bound_vacuous: bool,
}

/// Candidate multiplicative constants `1, 3/2, 2, 3, 4, 6, …, 2^max_exp`.
pub fn qi_grid(max_exp: u32) -> Vec<Rational64> {
    let mut g = vec![Rational64::from_integer(1)];
    for j in 1..=max_exp {
        g.push(Rational64::new(3 << (j - 1), 2));
        g.push(Rational64::from_integer(1 << j));
    }
    g
}

/// Smallest additive constant for a fixed `K` over all vertex pairs.
pub fn qi_constant_for(f: &[u32], x: &FiniteGraphSpace, y: &FiniteGraphSpace, k: Rational64) -> Rational64 {
    let (p, q) = (*k.numer(), *k.denom());
    // C ≥ d_Y − K d_X = (q d_Y − p d_X)/q  and  C ≥ d_X/K − d_Y = (q d_X − p d_Y)/p
    let (up, lo) = (0..x.n())
        .into_par_iter()
        .map(|a| {
            let mut up = 0i64;
            let mut lo = 0i64;
            for b in a + 1..x.n() {
                let dx = x.d(a, b) as i64;
                let dy = y.d(f[a] as usize, f[b] as usize) as i64;
                up = up.max(q * dy - p * dx);
                lo = lo.max(q * dx - p * dy);
            }
            (up, lo)
        })
        .reduce(|| (0, 0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    Rational64::new(up, q).max(Rational64::new(lo, p))
}

/// Fit `(K, C)` for a vertex map `f: X → Y` over a fixed grid of `K`.
///
/// The chosen `K` is the smallest grid value whose minimal `C` does not
/// exceed it; if there is none, the grid value with the least `C`.
pub fn qi_constants(f: &[u32], x: &FiniteGraphSpace, y: &FiniteGraphSpace) -> Result<QIReport> {
    if f.len() != x.n() {
        return Err(Error::invalid("map must be defined on every vertex of X"));
    }
    if let Some(&bad) = f.iter().find(|&&v| v as usize >= y.n()) {
        return Err(Error::invalid(format!("image vertex {bad} not in Y")));
    }
    if !x.is_connected() || !y.is_connected() {
        return Err(Error::invalid("quasi-isometry constants need connected spaces"));
    }
    let grid: Vec<QiFit> = qi_grid(12)
        .into_iter()
        .map(|k| QiFit {
            k,
            c: qi_constant_for(f, x, y, k),
        })
        .collect();
    let chosen = grid
        .iter()
        .find(|fit| fit.c <= fit.k)
        .or_else(|| grid.iter().min_by(|a, b| a.c.cmp(&b.c).then(a.k.cmp(&b.k))))
        .expect("grid is nonempty")
        .clone();
    let image: Vec<usize> = {
        let mut v: Vec<usize> = f.iter().map(|&v| v as usize).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let onto = (0..y.n())
        .map(|v| image.iter().map(|&w| y.d(v, w)).min().unwrap_or(INF))
        .max()
        .unwrap_or(0);
    let diam_x = x.diameter().unwrap_or(0) as i64;
    Ok(QIReport {
        lower_bound_vacuous: diam_x > 0 && chosen.c * chosen.k >= Rational64::from_integer(diam_x),
        k: chosen.k,
        c: chosen.c,
        onto_c: Rational64::from_integer(onto as i64),
        grid,
    })
}

/// A ball in a Cayley graph, with the group element behind each vertex.
#[derive(Clone, Debug)]
pub struct CayleyBall<G> {
    pub space: FiniteGraphSpace,
    pub elements: Vec<G>,
    pub word_length: Vec<u32>,
    pub radius: u32,
    /// The vertex budget ran out before the radius was reached.
    pub partial: bool,
}

/// BFS ball of the given radius about the identity under right
/// multiplication by `gens`, which must be closed under inverses.
pub fn cayley_ball<G: GroupElement>(identity: &G, gens: &[G], radius: u32, max_vertices: usize) -> Result<CayleyBall<G>> {
    let gen_set: HashSet<&G> = gens.iter().collect();
    if let Some(g) = gens.iter().find(|g| !gen_set.contains(&g.inverse())) {
        return Err(Error::invalid(format!("generator set lacks the inverse of {}", g.label())));
    }
    budget::check((max_vertices.min(1 << 26) as u64) * 64, "Cayley ball")?;
    let mut index: HashMap<G, u32> = HashMap::new();
    let mut elements = vec![identity.clone()];
    let mut word_length = vec![0u32];
    index.insert(identity.clone(), 0);
    let mut partial = false;
    let mut frontier = vec![0u32];
    for r in 1..=radius {
        let mut next = Vec::new();
        'outer: for &v in &frontier {
            for s in gens {
                let h = elements[v as usize].mul(s);
                if !index.contains_key(&h) {
                    if elements.len() >= max_vertices {
                        partial = true;
                        break 'outer;
                    }
                    let id = elements.len() as u32;
                    index.insert(h.clone(), id);
                    elements.push(h);
                    word_length.push(r);
                    next.push(id);
                }
            }
        }
        if partial || next.is_empty() {
            break;
        }
        frontier = next;
    }
    let mut adj = vec![Vec::new(); elements.len()];
    for (v, g) in elements.iter().enumerate() {
        for s in gens {
            if let Some(&w) = index.get(&g.mul(s)) {
                if w as usize != v {
                    adj[v].push(w);
                    adj[w as usize].push(v as u32);
                }
            }
        }
    }
    let labels = elements.iter().map(G::label).collect();
    let space = FiniteGraphSpace::from_adjacency(adj)?.with_labels(labels)?;
    Ok(CayleyBall {
        space,
        elements,
        word_length,
        radius,
        partial,
    })
}

#[derive(Clone, Debug)]
pub struct ConedSpace {
    pub space: FiniteGraphSpace,
    /// Vertices `0..group_vertices` are the ball; the rest are cone points.
    pub group_vertices: usize,
    /// Cone points per subgroup, in the order given.
    pub cones_per_subgroup: Vec<usize>,
    /// Largest distance between group vertices; `None` if disconnected.
    pub diameter: Option<u32>,
}

/// Cone off every left coset `gP` meeting the ball, for each subgroup
/// `P` given by a membership test.
pub fn coned_space<G: GroupElement>(ball: &CayleyBall<G>, subgroups: &[&(dyn Fn(&G) -> bool + Sync)]) -> Result<ConedSpace> {
    let m = ball.elements.len();
    let mut adj: Vec<Vec<u32>> = ball.space.adjacency().to_vec();
    let mut cones_per_subgroup = Vec::new();
    for member in subgroups {
        let mut reps: Vec<usize> = Vec::new();
        let mut cone_of = vec![0usize; m];
        for h in 0..m {
            let hinv = ball.elements[h].inverse();
            match reps.iter().position(|&r| member(&hinv.mul(&ball.elements[r]))) {
                Some(c) => cone_of[h] = c,
                None => {
                    cone_of[h] = reps.len();
                    reps.push(h);
                }
            }
        }
        let base = adj.len();
        adj.extend(std::iter::repeat_with(Vec::new).take(reps.len()));
        for (h, &c) in cone_of.iter().enumerate() {
            adj[h].push((base + c) as u32);
            adj[base + c].push(h as u32);
        }
        cones_per_subgroup.push(reps.len());
    }
    let space = FiniteGraphSpace::from_adjacency(adj)?;
    let dm = space.distances();
    let diameter = (0..m)
        .flat_map(|u| (0..m).map(move |v| (u, v)))
        .map(|(u, v)| dm.get(u, v))
        .max()
        .unwrap_or(0);
    Ok(ConedSpace {
        space,
        group_vertices: m,
        cones_per_subgroup,
        diameter: (diameter != INF).then_some(diameter),
    })
}

/// One element of the diagonal action on `V`, `W` and `X`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TriplePerm {
    pub v: Perm,
    pub w: Perm,
    pub x: Perm,
}

impl GroupElement for TriplePerm {
    fn mul(&self, o: &Self) -> Self {
        TriplePerm {
            v: self.v.mul(&o.v),
            w: self.w.mul(&o.w),
            x: self.x.mul(&o.x),
        }
    }

    fn inverse(&self) -> Self {
        TriplePerm {
            v: self.v.inverse(),
            w: self.w.inverse(),
            x: self.x.inverse(),
        }
    }

    fn identity_like(&self) -> Self {
        TriplePerm {
            v: self.v.identity_like(),
            w: self.w.identity_like(),
            x: self.x.identity_like(),
        }
    }

    fn label(&self) -> String {
        format!("({};{};{})", self.v.label(), self.w.label(), self.x.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FiberParams {
    #[serde(serialize_with = "ratio_str")]
    pub b_param: Rational64,
    #[serde(serialize_with = "ratio_str")]
    pub delta: Rational64,
    #[serde(serialize_with = "ratio_str")]
    pub k: Rational64,
    #[serde(serialize_with = "ratio_str")]
    pub c: Rational64,
}

impl FiberParams {
    pub fn j0(&self) -> Rational64 {
        self.b_param * 2 + self.delta * 2
    }

    pub fn j1(&self) -> Rational64 {
        self.j0() + self.c * 2
    }

    pub fn j2(&self) -> Rational64 {
        self.j1() * 4
    }
}

#[derive(Clone, Debug)]
pub struct FiberSpace {
    pub params: FiberParams,
    pub a0: Vec<(u32, u32)>,
    /// Closure of `a0` under the action, sorted.
    pub a1: Vec<(u32, u32)>,
    /// `d(φv₁,φv₂) + d(ψw₁,ψw₂)` on `a1`.
    pub a1_metric: DistanceMatrix,
    /// Graph on `a1` joining `p, q` when some `g` has `d(gp, gq) ≤ J₂`.
    pub graph: FiniteGraphSpace,
    /// Number of group elements quantified over in the edge rule.
    pub group_order: usize,
    /// Worst observed `d(φ(gv), gφ(v))` and `d(ψ(gw), gψ(w))` over generators.
    pub equivariance_defect: u32,
}

/// Fiber product of two coarsely equivariant maps `φ: V → X`, `ψ: W → X`.
///
/// The action is given by generator triples of permutations; the edge rule
/// quantifies over the whole (enumerated) group they generate, which must
/// have at most `max_group` elements.
#[allow(clippy::too_many_arguments)]
pub fn fiber_space(
    v: &FiniteGraphSpace,
    w: &FiniteGraphSpace,
    x: &FiniteGraphSpace,
    phi: &[u32],
    psi: &[u32],
    gens: &[TriplePerm],
    params: FiberParams,
    max_group: usize,
) -> Result<FiberSpace> {
    if phi.len() != v.n() || psi.len() != w.n() {
        return Err(Error::invalid("maps must be defined on every vertex"));
    }
    if phi.iter().chain(psi).any(|&p| p as usize >= x.n()) {
        return Err(Error::invalid("map image outside X"));
    }
    if !v.is_connected() || !w.is_connected() || !x.is_connected() {
        return Err(Error::invalid("fiber construction needs connected spaces"));
    }
    for (i, g) in gens.iter().enumerate() {
        if g.v.0.len() != v.n() || g.w.0.len() != w.n() || g.x.0.len() != x.n() {
            return Err(Error::invalid(format!("generator {i} has the wrong size")));
        }
        if !v.is_isometry(&g.v.0) || !w.is_isometry(&g.w.0) || !x.is_isometry(&g.x.0) {
            return Err(Error::invalid(format!("generator {i} is not an isometry")));
        }
    }
    let mut defect = 0u32;
    for g in gens {
        for a in 0..v.n() {
            defect = defect.max(x.d(phi[g.v.apply(a as u32) as usize] as usize, g.x.apply(phi[a]) as usize));
        }
        for b in 0..w.n() {
            defect = defect.max(x.d(psi[g.w.apply(b as u32) as usize] as usize, g.x.apply(psi[b]) as usize));
        }
    }
    if Rational64::from_integer(defect as i64) > params.c {
        return Err(Error::invalid(format!(
            "maps are only {defect}-coarsely equivariant, more than C = {}",
            params.c
        )));
    }
    let j0 = params.j0();
    let a0: Vec<(u32, u32)> = (0..v.n() as u32)
        .flat_map(|a| (0..w.n() as u32).map(move |b| (a, b)))
        .filter(|&(a, b)| Rational64::from_integer(x.d(phi[a as usize] as usize, psi[b as usize] as usize) as i64) <= j0)
        .collect();
    if a0.is_empty() {
        return Err(Error::invalid(format!("no pair of points lies within J0 = {j0}")));
    }
    let mut a1_set: BTreeSet<(u32, u32)> = a0.iter().copied().collect();
    let mut queue: VecDeque<(u32, u32)> = a0.iter().copied().collect();
    let gens_inv: Vec<TriplePerm> = gens.iter().flat_map(|g| [g.clone(), g.inverse()]).collect();
    while let Some((a, b)) = queue.pop_front() {
        for g in &gens_inv {
            let p = (g.v.apply(a), g.w.apply(b));
            if a1_set.insert(p) {
                queue.push_back(p);
            }
        }
    }
    let a1: Vec<(u32, u32)> = a1_set.into_iter().collect();
    let metric = |p: (u32, u32), q: (u32, u32)| -> u32 {
        x.d(phi[p.0 as usize] as usize, phi[q.0 as usize] as usize)
            + x.d(psi[p.1 as usize] as usize, psi[q.1 as usize] as usize)
    };
    let a1_metric = DistanceMatrix::from_fn(a1.len(), |i, j| metric(a1[i], a1[j]))?;

    let identity = TriplePerm {
        v: Perm::identity(v.n()),
        w: Perm::identity(w.n()),
        x: Perm::identity(x.n()),
    };
    let group = enumerate_group(&identity, gens, max_group)?;
    let j2 = params.j2();
    let adj: Vec<Vec<u32>> = (0..a1.len())
        .into_par_iter()
        .map(|i| {
            let p = a1[i];
            (0..a1.len())
                .filter(|&j| {
                    j != i && {
                        let q = a1[j];
                        group.iter().any(|g| {
                            let gp = (g.v.apply(p.0), g.w.apply(p.1));
                            let gq = (g.v.apply(q.0), g.w.apply(q.1));
                            Rational64::from_integer(metric(gp, gq) as i64) <= j2
                        })
                    }
                })
                .map(|j| j as u32)
                .collect()
        })
        .collect();
    let graph = FiniteGraphSpace::from_adjacency(adj)?;
    Ok(FiberSpace {
        params,
        a0,
        a1,
        a1_metric,
        graph,
        group_order: group.len(),
        equivariance_defect: defect,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberBounds {
    pub a1_delta: DeltaReport,
    pub x_delta: DeltaReport,
    /// `2δ₄(X) + 4J₁`.
    #[serde(serialize_with = "ratio_str")]
    pub hyperbolicity_bound: Rational64,
    pub hyperbolicity_holds: bool,
    pub pairs_checked: u64,
    /// Pairs with `d_A(p,q) < (2/(3J₂))·d(p,q)`.
    pub lower_violations: u64,
    /// Pairs with `d_A(p,q) > d(p,q)/J₁ + 2`.
    pub upper_violations: u64,
    #[serde(serialize_with = "opt_u32_str")]
    pub graph_diameter: Option<u32>,
}

impl FiberBounds {
    pub fn all_hold(&self) -> bool {
        self.hyperbolicity_holds && self.lower_violations == 0 && self.upper_violations == 0
    }
}

/// Check the hyperbolicity bound of `A₁` and both inequalities comparing
/// `A₁` with the graph `A` on every pair of points.
pub fn fiber_bounds(f: &FiberSpace, x: &FiniteGraphSpace, mode: DeltaMode) -> Result<FiberBounds> {
    let a1_delta = four_point_delta_matrix(&f.a1_metric, mode)?;
    let x_delta = four_point_delta(x, mode)?;
    let bound = x_delta.delta4.to_rational() * 2 + f.params.j1() * 4;
    let j1 = f.params.j1();
    let j2 = f.params.j2();
    let n = f.a1.len();
    let dm = f.graph.distances();
    let (lower, upper) = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut lo = 0u64;
            let mut up = 0u64;
            for j in i + 1..n {
                let d1 = Rational64::from_integer(f.a1_metric.get(i, j) as i64);
                match dm.finite(i, j) {
                    Some(da) => {
                        let da = Rational64::from_integer(da as i64);
                        if da * j2 * 3 < d1 * 2 {
                            lo += 1;
                        }
                        if da > d1 / j1 + 2 {
                            up += 1;
                        }
                    }
                    None => up += 1,
                }
            }
            (lo, up)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(FiberBounds {
        hyperbolicity_holds: a1_delta.delta4.to_rational() <= bound,
        a1_delta,
        x_delta,
        hyperbolicity_bound: bound,
        pairs_checked: (n as u64) * (n.saturating_sub(1) as u64) / 2,
        lower_violations: lower,
        upper_violations: upper,
        graph_diameter: f.graph.diameter(),
    })
}

/// Inputs of a fiber construction.
#[derive(Clone, Debug)]
pub struct FiberInstance {
    pub v: FiniteGraphSpace,
    pub w: FiniteGraphSpace,
    pub x: FiniteGraphSpace,
    pub phi: Vec<u32>,
    pub psi: Vec<u32>,
    pub gens: Vec<TriplePerm>,
    pub params: FiberParams,
}

impl FiberInstance {
    pub fn build(&self, max_group: usize) -> Result<FiberSpace> {
        fiber_space(&self.v, &self.w, &self.x, &self.phi, &self.psi, &self.gens, self.params, max_group)
    }
}

/// Two paths of length `len` sent onto the even and odd vertices of a path
/// of length `2·len`, with the reflection acting on all three.
pub fn two_lines_instance(len: usize) -> FiberInstance {
    let l = len as u32;
    let v = path_graph(len);
    let x = path_graph(2 * len);
    let flip = |m: u32| Perm((0..m).rev().collect());
    FiberInstance {
        w: v.clone(),
        v,
        x,
        phi: (0..l).map(|i| 2 * i).collect(),
        psi: (0..l).map(|i| 2 * i + 1).collect(),
        gens: vec![TriplePerm {
            v: flip(l),
            w: flip(l),
            x: flip(2 * l),
        }],
        params: FiberParams {
            b_param: Rational64::from_integer(2),
            delta: Rational64::zero(),
            k: Rational64::from_integer(2),
            c: Rational64::from_integer(1),
        },
    }
}

/// Built-in spaces: `path:N`, `cycle:N`, `grid:WxH`, `tree:N:SEED`.
/// Returns `None` for anything else, which callers treat as a file path.
pub fn parse_space_ref(s: &str) -> Option<Result<FiniteGraphSpace>> {
    let (kind, rest) = s.split_once(':')?;
    let num = |t: &str| {
        t.parse::<usize>()
            .map_err(|_| Error::invalid(format!("bad size {t:?} in space {s:?}")))
    };
    let edges = match kind {
        "path" => num(rest).map(|n| (n, path_edges(n))),
        "cycle" => num(rest).and_then(|n| {
            if n < 3 {
                Err(Error::invalid("a cycle needs at least 3 vertices"))
            } else {
                Ok((n, cycle_edges(n)))
            }
        }),
        "grid" => match rest.split_once('x') {
            Some((w, h)) => num(w).and_then(|w| {
                let h = num(h)?;
                Ok((w * h, grid_edges(w, h)))
            }),
            None => Err(Error::invalid(format!("grid size must look like WxH, got {rest:?}"))),
        },
        "tree" => match rest.split_once(':') {
            Some((n, seed)) => num(n).and_then(|n| {
                let seed = seed
                    .parse::<u64>()
                    .map_err(|_| Error::invalid(format!("bad seed in space {s:?}")))?;
                Ok((n, tree_edges(n, seed)))
            }),
            None => Err(Error::invalid("tree spaces need a seed: tree:N:SEED")),
        },
        _ => return None,
    };
    let built = edges.and_then(|(n, e)| {
        if n == 0 {
            Err(Error::invalid("empty space"))
        } else {
            FiniteGraphSpace::from_edges(n, &e)
        }
    });
    Some(built)
}

/// Rational to `f64` for display only.
pub fn ratio_f64(r: Rational64) -> f64 {
    if r.is_zero() {
        0.0
    } else {
        r.to_f64().unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{FreeWord, IntZ, ModMatrix};
    use proptest::prelude::*;

    /// Glossary form over ordered quadruples, independent of the pairing trick.
    fn delta_oracle(dm: &DistanceMatrix) -> i64 {
        let n = dm.n();
        let mut best = 0i64;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let lhs = (dm.get(a, d) + dm.get(b, c)) as i64;
                        let m = ((dm.get(a, b) + dm.get(c, d)) as i64).max((dm.get(a, c) + dm.get(b, d)) as i64);
                        best = best.max(lhs - m);
                    }
                }
            }
        }
        best
    }

    #[test]
    fn basic_distances() {
        assert_eq!(path_graph(4).d(0, 3), 3);
        assert_eq!(cycle_graph(8).d(0, 4), 4);
        let s = FiniteGraphSpace::from_edges(2, &[]).unwrap();
        assert_eq!(s.distances().finite(0, 1), None);
        assert!(four_point_delta(&s, DeltaMode::Exact).is_err());
    }

    #[test]
    fn parse_errors_carry_lines() {
        let e = parse_edge_list("0 1\n# c\n1 x\n").unwrap_err();
        assert_eq!(
            e,
            Error::Parse {
                line: 3,
                msg: "expected a vertex index, found \"x\"".into()
            }
        );
        assert!(matches!(parse_edge_list("0 1 2").unwrap_err(), Error::Parse { line: 1, .. }));
        let el = parse_edge_list("0 1 # edge\n1 0\n5\n").unwrap();
        assert_eq!(el.n, 6);
        assert_eq!(el.edges.len(), 1);
    }

    #[test]
    fn cycle_delta_matches_oracle() {
        for n in [4, 5, 6, 8, 9, 12] {
            let c = cycle_graph(n);
            let r = four_point_delta(&c, DeltaMode::Exact).unwrap();
            assert_eq!(r.delta4.doubled(), delta_oracle(c.distances()), "C_{n}");
            assert_eq!(quad_defect2(c.distances(), r.witness.unwrap()), r.delta4.doubled());
        }
    }

    #[test]
    fn sampled_is_lower_bound() {
        let g = grid_graph(6, 5);
        let exact = four_point_delta(&g, DeltaMode::Exact).unwrap();
        let s = four_point_delta(&g, DeltaMode::Sampled { samples: 500, seed: 7 }).unwrap();
        assert!(s.delta4 <= exact.delta4);
        assert_eq!(s.delta4, exact.delta4, "local search should reach the corner quadruple");
    }

    #[test]
    fn qi_examples() {
        let p = path_graph(10);
        let id: Vec<u32> = (0..10).collect();
        let r = qi_constants(&id, &p, &p).unwrap();
        assert_eq!((r.k, r.c), (Rational64::from_integer(1), Rational64::zero()));
        assert!(!r.lower_bound_vacuous);

        let big = path_graph(20);
        let half: Vec<u32> = (0..20).map(|i| i / 2).collect();
        let r = qi_constants(&half, &big, &p).unwrap();
        assert_eq!(r.k, Rational64::from_integer(2));
        assert_eq!(r.c, Rational64::new(1, 2));

        let konst = vec![0u32; 20];
        let r = qi_constants(&konst, &big, &p).unwrap();
        assert!(r.lower_bound_vacuous);
        assert_eq!(r.onto_c, Rational64::from_integer(9));
    }

    #[test]
    fn cayley_examples() {
        let z = cayley_ball(&IntZ(0), &[IntZ(1), IntZ(-1)], 5, 1000).unwrap();
        assert_eq!(z.space.n(), 11);
        assert_eq!(z.space.edge_count(), 10);

        let f = cayley_ball(&FreeWord::identity(2), &FreeWord::symmetric_generators(2), 3, 1000).unwrap();
        assert_eq!(f.space.n(), 1 + 4 + 12 + 36);

        let id = ModMatrix::identity(3, 2);
        let gens = vec![
            ModMatrix::elementary(3, 2, 0, 1, 1),
            ModMatrix::elementary(3, 2, 0, 1, -1),
            ModMatrix::elementary(3, 2, 1, 0, 1),
            ModMatrix::elementary(3, 2, 1, 0, -1),
        ];
        let b = cayley_ball(&id, &gens, 20, 1000).unwrap();
        assert_eq!(b.space.n(), 24);
        assert!(!b.partial);
        let cut = cayley_ball(&id, &gens, 20, 10).unwrap();
        assert!(cut.partial);
        assert_eq!(cut.space.n(), 10);

        assert!(cayley_ball(&IntZ(0), &[IntZ(1)], 3, 10).is_err());
    }

    #[test]
    fn coned_examples() {
        let z = cayley_ball(&IntZ(0), &[IntZ(1), IntZ(-1)], 5, 1000).unwrap();
        let all = |_: &IntZ| true;
        let c = coned_space(&z, &[&all]).unwrap();
        assert_eq!(c.diameter, Some(2));
        let triv = |g: &IntZ| g.0 == 0;
        let c = coned_space(&z, &[&triv]).unwrap();
        assert_eq!(c.diameter, z.space.diameter());
        assert_eq!(c.cones_per_subgroup, vec![11]);
    }

    #[test]
    fn fiber_identity_instance() {
        let x = path_graph(6);
        let id: Vec<u32> = (0..6).collect();
        let params = FiberParams {
            b_param: Rational64::zero(),
            delta: Rational64::zero(),
            k: Rational64::from_integer(1),
            c: Rational64::zero(),
        };
        let f = fiber_space(&x, &x, &x, &id, &id, &[], params, 10).unwrap();
        let diag: Vec<(u32, u32)> = (0..6).map(|i| (i, i)).collect();
        assert_eq!(f.a0, diag);
        assert_eq!(f.a1, diag);
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(f.a1_metric.get(i, j), 2 * x.d(i, j));
            }
        }
        // J2 = 0, so only coincident points would be joined
        assert_eq!(f.graph.edge_count(), 0);
    }

    fn arb_connected_graph() -> impl Strategy<Value = FiniteGraphSpace> {
        (4usize..14, any::<u64>(), proptest::collection::vec((0u32..14, 0u32..14), 0..20)).prop_map(
            |(n, seed, extra)| {
                let t = random_tree(n, seed);
                let mut edges = t.edges();
                for (a, b) in extra {
                    let (a, b) = (a % n as u32, b % n as u32);
                    if a != b {
                        edges.push((a, b));
                    }
                }
                FiniteGraphSpace::from_edges(n, &edges).unwrap()
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn metric_axioms(g in arb_connected_graph()) {
            let dm = g.distances();
            let n = g.n();
            prop_assert!(dm.is_symmetric());
            for a in 0..n {
                prop_assert_eq!(dm.get(a, a), 0);
                for b in 0..n {
                    if a != b { prop_assert!(dm.get(a, b) > 0); }
                    for c in 0..n {
                        prop_assert!(dm.get(a, c) <= dm.get(a, b) + dm.get(b, c));
                    }
                }
            }
        }

        #[test]
        fn delta_exact_matches_oracle_and_relabeling(g in arb_connected_graph(), shift in 0usize..14) {
            let r = four_point_delta(&g, DeltaMode::Exact).unwrap();
            prop_assert_eq!(r.delta4.doubled(), delta_oracle(g.distances()));
            let n = g.n();
            let perm: Vec<u32> = (0..n).map(|i| ((i + shift) % n) as u32).collect();
            let edges: Vec<_> = g.edges().into_iter().map(|(a, b)| (perm[a as usize], perm[b as usize])).collect();
            let h = FiniteGraphSpace::from_edges(n, &edges).unwrap();
            prop_assert_eq!(four_point_delta(&h, DeltaMode::Exact).unwrap().delta4, r.delta4);
            let s = four_point_delta(&g, DeltaMode::Sampled { samples: 50, seed: shift as u64 }).unwrap();
            prop_assert!(s.delta4 <= r.delta4);
        }

        #[test]
        fn gromov_product_bounds(g in arb_connected_graph(), x in 0usize..4, y in 0usize..4, z in 0usize..4) {
            let p = gromov_product(&g, x, y, z).unwrap();
            prop_assert_eq!(p, gromov_product(&g, y, x, z).unwrap());
            prop_assert!(p >= HalfInt::ZERO);
            prop_assert!(p <= HalfInt::from_int(g.d(x, z).min(g.d(y, z)) as i64));
        }

        #[test]
        fn tripod_within_factor_six(g in arb_connected_graph()) {
            let d4 = four_point_delta(&g, DeltaMode::Exact).unwrap().delta4;
            let thin = tripod_thinness(&g).unwrap() as i64;
            // thin ≤ 6δ, with δ a half-integer: compare doubled values
            prop_assert!(2 * thin <= 6 * d4.doubled(), "thin {} delta {}", thin, d4);
        }
    }
}
