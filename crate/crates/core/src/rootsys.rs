//! Reduced root systems of types A, B, C, D and G₂ with exact rational
//! coordinates, Cartan integers, root strings, reflections, and the
//! classification of rank-two subsystems spanned by pairs of roots.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    G,
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(Family::A),
            "B" => Ok(Family::B),
            "C" => Ok(Family::C),
            "D" => Ok(Family::D),
            "G" => Ok(Family::G),
            other => Err(Error::invalid(format!("unknown root system family {other:?}"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Family::A => "A",
            Family::B => "B",
            Family::C => "C",
            Family::D => "D",
            Family::G => "G",
        };
        f.write_str(c)
    }
}

/// Parse names such as `A2`, `b3`, `G2` into a family and rank.
pub fn parse_system_name(name: &str) -> Result<(Family, usize)> {
    let name = name.trim();
    if name.len() < 2 {
        return Err(Error::invalid(format!("bad root system name {name:?}")));
    }
    let family: Family = name[..1].parse()?;
    let rank: usize = name[1..]
        .parse()
        .map_err(|_| Error::invalid(format!("bad rank in root system name {name:?}")))?;
    Ok((family, rank))
}

/// A vector in the ambient Euclidean space, compared by exact coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootVector {
    coords: Vec<Rational64>,
}

impl RootVector {
    pub fn new(coords: Vec<Rational64>) -> Self {
        RootVector { coords }
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        RootVector {
            coords: coords.iter().map(|&c| Rational64::from_integer(c)).collect(),
        }
    }

    pub fn coords(&self) -> &[Rational64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn dot(&self, other: &RootVector) -> Rational64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .fold(Rational64::zero(), |acc, x| acc + x)
    }

    pub fn norm2(&self) -> Rational64 {
        self.dot(self)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &RootVector) -> RootVector {
        RootVector::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn scaled(&self, k: Rational64) -> RootVector {
        RootVector::new(self.coords.iter().map(|a| a * k).collect())
    }

    pub fn neg(&self) -> RootVector {
        self.scaled(-Rational64::one())
    }

    /// `self + k * other` for an integer `k`.
    pub fn add_multiple(&self, other: &RootVector, k: i64) -> RootVector {
        self.add(&other.scaled(Rational64::from_integer(k)))
    }
}

impl fmt::Display for RootVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for RootVector {
    type Err = Error;
    /// Accepts `1,-1,0` or `(1,-1,0)`; entries may be fractions like `1/2`.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let coords = inner
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<Rational64>()
                    .map_err(|_| Error::invalid(format!("bad root coordinate {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RootVector::new(coords))
    }
}

impl Serialize for RootVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Isomorphism type of `Span{α,β} ∩ Φ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Rank2Class {
    A1,
    A1xA1,
    A2,
    B2,
    G2,
}

impl fmt::Display for Rank2Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rank2Class::A1 => "A1",
            Rank2Class::A1xA1 => "A1xA1",
            Rank2Class::A2 => "A2",
            Rank2Class::B2 => "B2",
            Rank2Class::G2 => "G2",
        };
        f.write_str(s)
    }
}

impl Rank2Class {
    fn from_count(count: usize) -> Option<Self> {
        match count {
            2 => Some(Rank2Class::A1),
            4 => Some(Rank2Class::A1xA1),
            6 => Some(Rank2Class::A2),
            8 => Some(Rank2Class::B2),
            12 => Some(Rank2Class::G2),
            _ => None,
        }
    }
}

/// A closed subsystem `Φ' = Span(Φ') ∩ Φ` together with the pair it was
/// built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subsystem {
    pub class: Rank2Class,
    /// Indices into the ambient system's root list, ascending.
    pub roots: Vec<usize>,
    /// The two roots whose span defines the subsystem.
    pub spanning_pair: (usize, usize),
}

/// A reduced root system with a fixed base.
///
/// Roots are stored in lexicographic order of their coordinates; every
/// index-based method refers to that order.
#[derive(Clone, Debug)]
pub struct RootSystem {
    family: Family,
    rank: usize,
    roots: Vec<RootVector>,
    index: HashMap<RootVector, usize>,
    simple: Vec<usize>,
    neg: Vec<usize>,
    norms: Vec<Rational64>,
    /// `cartan[i * n + j] = A(root_i, root_j) = 2(root_j, root_i)/(root_i, root_i)`.
    cartan: Vec<i64>,
    /// Coordinates of each root in the basis of simple roots.
    coeffs: Vec<Vec<i64>>,
}

fn unit(dim: usize, i: usize, scale: i64) -> Vec<i64> {
    let mut v = vec![0; dim];
    v[i] = scale;
    v
}

fn combo(dim: usize, terms: &[(usize, i64)]) -> Vec<i64> {
    let mut v = vec![0; dim];
    for &(i, c) in terms {
        v[i] += c;
    }
    v
}

/// Expected number of roots for a supported (family, rank).
pub fn classical_root_count(family: Family, rank: usize) -> usize {
    match family {
        Family::A => rank * (rank + 1),
        Family::B | Family::C => 2 * rank * rank,
        Family::D => 2 * rank * (rank - 1),
        Family::G => 12,
    }
}

fn supported(family: Family, rank: usize) -> bool {
    match family {
        Family::A => rank >= 1,
        Family::B | Family::C => rank >= 2,
        Family::D => rank >= 4,
        Family::G => rank == 2,
    }
}

/// Solve `G x = b` over the rationals for an invertible `G`.
fn solve_rational(mut g: Vec<Vec<Rational64>>, mut b: Vec<Rational64>) -> Option<Vec<Rational64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !g[r][col].is_zero())?;
        g.swap(col, piv);
        b.swap(col, piv);
        let p = g[col][col];
        for r in 0..n {
            if r != col && !g[r][col].is_zero() {
                let f = g[r][col] / p;
                for c in col..n {
                    let sub = f * g[col][c];
                    g[r][c] -= sub;
                }
                let sub = f * b[col];
                b[r] -= sub;
            }
        }
    }
    Some((0..n).map(|i| b[i] / g[i][i]).collect())
}

fn gram_det3(a: &RootVector, b: &RootVector, c: &RootVector) -> Rational64 {
    let v = [a, b, c];
    let m: Vec<Vec<Rational64>> = (0..3)
        .map(|i| (0..3).map(|j| v[i].dot(v[j])).collect())
        .collect();
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Construct the root system of the given family and rank.
pub fn build_root_system(family: Family, rank: usize) -> Result<RootSystem> {
    if !supported(family, rank) {
        return Err(Error::invalid(format!(
            "unsupported root system {family}{rank}: need A_n (n≥1), B_n/C_n (n≥2), D_n (n≥4) or G_2"
        )));
    }
    let (dim, raw, simple_raw): (usize, Vec<Vec<i64>>, Vec<Vec<i64>>) = match family {
        Family::A => {
            let dim = rank + 1;
            let mut roots = Vec::new();
            for i in 0..dim {
                for j in 0..dim {
                    if i != j {
                        roots.push(combo(dim, &[(i, 1), (j, -1)]));
                    }
                }
            }
            let simple = (0..rank).map(|i| combo(dim, &[(i, 1), (i + 1, -1)])).collect();
            (dim, roots, simple)
        }
        Family::B | Family::C | Family::D => {
            let dim = rank;
            let mut roots = Vec::new();
            for i in 0..dim {
                for j in i + 1..dim {
                    for (si, sj) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                        roots.push(combo(dim, &[(i, si), (j, sj)]));
                    }
                }
            }
            let long_or_short = match family {
                Family::B => 1,
                Family::C => 2,
                _ => 0,
            };
            if long_or_short != 0 {
                for i in 0..dim {
                    roots.push(unit(dim, i, long_or_short));
                    roots.push(unit(dim, i, -long_or_short));
                }
            }
            let mut simple: Vec<Vec<i64>> = (0..rank - 1)
                .map(|i| combo(dim, &[(i, 1), (i + 1, -1)]))
                .collect();
            simple.push(match family {
                Family::B => unit(dim, rank - 1, 1),
                Family::C => unit(dim, rank - 1, 2),
                _ => combo(dim, &[(rank - 2, 1), (rank - 1, 1)]),
            });
            (dim, roots, simple)
        }
        Family::G => {
            // Short roots are the A₂ roots; long roots are ±(2e_i − e_j − e_k).
            let dim = 3;
            let mut roots = Vec::new();
            for i in 0..3 {
                for j in 0..3 {
                    if i != j {
                        roots.push(combo(dim, &[(i, 1), (j, -1)]));
                    }
                }
                let others: Vec<usize> = (0..3).filter(|&k| k != i).collect();
                let long = combo(dim, &[(i, 2), (others[0], -1), (others[1], -1)]);
                roots.push(long.iter().map(|x| -x).collect());
                roots.push(long);
            }
            let simple = vec![vec![1, -1, 0], vec![-2, 1, 1]];
            (dim, roots, simple)
        }
    };
    debug_assert!(raw.iter().all(|r| r.len() == dim));

    let mut roots: Vec<RootVector> = raw.iter().map(|r| RootVector::from_ints(r)).collect();
    roots.sort();
    roots.dedup();
    let index: HashMap<RootVector, usize> =
        roots.iter().cloned().enumerate().map(|(i, r)| (r, i)).collect();
    let simple: Vec<usize> = simple_raw
        .iter()
        .map(|s| index[&RootVector::from_ints(s)])
        .collect();
    let neg: Vec<usize> = roots.iter().map(|r| index[&r.neg()]).collect();
    let norms: Vec<Rational64> = roots.iter().map(RootVector::norm2).collect();

    let n = roots.len();
    let mut cartan = vec![0i64; n * n];
    for i in 0..n {
        for j in 0..n {
            let v = Rational64::from_integer(2) * roots[j].dot(&roots[i]) / norms[i];
            if !v.is_integer() {
                return Err(Error::Internal(format!(
                    "non-integral Cartan pairing between {} and {}",
                    roots[i], roots[j]
                )));
            }
            cartan[i * n + j] = v.to_integer();
        }
    }

    let gram: Vec<Vec<Rational64>> = simple
        .iter()
        .map(|&a| simple.iter().map(|&b| roots[a].dot(&roots[b])).collect())
        .collect();
    let mut coeffs = Vec::with_capacity(n);
    for r in &roots {
        let rhs: Vec<Rational64> = simple.iter().map(|&s| r.dot(&roots[s])).collect();
        let sol = solve_rational(gram.clone(), rhs)
            .ok_or_else(|| Error::Internal("singular Gram matrix of simple roots".into()))?;
        if sol.iter().any(|c| !c.is_integer()) {
            return Err(Error::Internal(format!("root {r} is not an integral combination")));
        }
        let c: Vec<i64> = sol.iter().map(|c| c.to_integer()).collect();
        if !(c.iter().all(|&x| x >= 0) || c.iter().all(|&x| x <= 0)) {
            return Err(Error::Internal(format!("root {r} has mixed-sign simple coordinates")));
        }
        coeffs.push(c);
    }

    let sys = RootSystem {
        family,
        rank,
        roots,
        index,
        simple,
        neg,
        norms,
        cartan,
        coeffs,
    };
    if sys.roots.len() != classical_root_count(family, rank) {
        return Err(Error::Internal(format!(
            "{family}{rank} produced {} roots",
            sys.roots.len()
        )));
    }
    Ok(sys)
}

impl RootSystem {
    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn name(&self) -> String {
        format!("{}{}", self.family, self.rank)
    }

    pub fn ambient_dim(&self) -> usize {
        self.roots[0].dim()
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn roots(&self) -> &[RootVector] {
        &self.roots
    }

    pub fn root(&self, i: usize) -> &RootVector {
        &self.roots[i]
    }

    /// Indices of the simple roots, in Dynkin order.
    pub fn simple_roots(&self) -> &[usize] {
        &self.simple
    }

    pub fn index_of(&self, v: &RootVector) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn contains(&self, v: &RootVector) -> bool {
        self.index.contains_key(v)
    }

    fn require(&self, v: &RootVector) -> Result<usize> {
        self.index_of(v)
            .ok_or_else(|| Error::invalid(format!("{v} is not a root of {}", self.name())))
    }

    pub fn negative_of(&self, i: usize) -> usize {
        self.neg[i]
    }

    pub fn norm2(&self, i: usize) -> Rational64 {
        self.norms[i]
    }

    pub fn is_long(&self, i: usize) -> bool {
        let max = self.norms.iter().max().copied().unwrap_or_default();
        self.norms[i] == max
    }

    pub fn inner(&self, i: usize, j: usize) -> Rational64 {
        self.roots[i].dot(&self.roots[j])
    }

    /// Coordinates of root `i` in the simple-root basis.
    pub fn simple_coeffs(&self, i: usize) -> &[i64] {
        &self.coeffs[i]
    }

    pub fn height(&self, i: usize) -> i64 {
        self.coeffs[i].iter().sum()
    }

    pub fn is_positive(&self, i: usize) -> bool {
        self.height(i) > 0
    }

    pub fn positive_roots(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.is_positive(i)).collect()
    }

    /// Index of `root_i + root_j` when it is a root.
    pub fn sum_index(&self, i: usize, j: usize) -> Option<usize> {
        self.index_of(&self.roots[i].add(&self.roots[j]))
    }

    /// Index of `a·root_i + b·root_j` when it is a root.
    pub fn combo_index(&self, i: usize, a: i64, j: usize, b: i64) -> Option<usize> {
        let v = self.roots[i]
            .scaled(Rational64::from_integer(a))
            .add_multiple(&self.roots[j], b);
        self.index_of(&v)
    }

    /// `A(root_i, root_j) = 2(root_j, root_i)/(root_i, root_i)`.
    pub fn cartan(&self, i: usize, j: usize) -> i64 {
        self.cartan[i * self.len() + j]
    }

    /// Cartan integer `A(α,β) = 2(β,α)/(α,α)` for roots given by coordinates.
    pub fn cartan_int(&self, alpha: &RootVector, beta: &RootVector) -> Result<i64> {
        let a = self.require(alpha)?;
        let b = self.require(beta)?;
        Ok(self.cartan(a, b))
    }

    /// Index form of [`RootSystem::root_string`].
    pub fn root_string_idx(&self, beta: usize, alpha: usize) -> Result<(i64, i64)> {
        if beta == alpha || beta == self.neg[alpha] {
            return Err(Error::invalid(
                "root string is undefined for proportional roots",
            ));
        }
        let (b, a) = (&self.roots[beta], &self.roots[alpha]);
        let mut r = 0;
        while self.contains(&b.add_multiple(a, -(r + 1))) {
            r += 1;
        }
        let mut q = 0;
        while self.contains(&b.add_multiple(a, q + 1)) {
            q += 1;
        }
        Ok((r, q))
    }

    /// The α-string through β: maximal `(r, q)` with `β−rα, …, β+qα` all roots.
    pub fn root_string(&self, beta: &RootVector, alpha: &RootVector) -> Result<(i64, i64)> {
        let b = self.require(beta)?;
        let a = self.require(alpha)?;
        self.root_string_idx(b, a)
    }

    /// Weyl reflection `s_α(v) = v − (2(v,α)/(α,α))·α`.
    pub fn reflect(&self, alpha: &RootVector, v: &RootVector) -> Result<RootVector> {
        let a = self.require(alpha)?;
        if v.dim() != self.ambient_dim() {
            return Err(Error::invalid("vector has the wrong ambient dimension"));
        }
        let k = Rational64::from_integer(2) * v.dot(alpha) / self.norms[a];
        Ok(v.add(&alpha.scaled(-k)))
    }

    pub fn reflect_idx(&self, alpha: usize, v: usize) -> usize {
        let k = self.cartan(alpha, v);
        self.index[&self.roots[v].add_multiple(&self.roots[alpha], -k)]
    }

    /// Roots lying in the span of two linearly independent roots.
    fn span_members(&self, a: usize, b: usize) -> Vec<usize> {
        let (ra, rb) = (&self.roots[a], &self.roots[b]);
        (0..self.len())
            .filter(|&g| gram_det3(ra, rb, &self.roots[g]).is_zero())
            .collect()
    }

    fn subsystem_idx(&self, a: usize, b: usize) -> Subsystem {
        if a == b || a == self.neg[b] {
            let mut roots = vec![a, self.neg[a]];
            roots.sort_unstable();
            return Subsystem {
                class: Rank2Class::A1,
                roots,
                spanning_pair: (a, b),
            };
        }
        let roots = self.span_members(a, b);
        let class = Rank2Class::from_count(roots.len())
            .expect("a rank-two root system has 4, 6, 8 or 12 roots");
        Subsystem {
            class,
            roots,
            spanning_pair: (a, b),
        }
    }

    /// Isomorphism type of `Span{α,β} ∩ Φ`.
    pub fn rank2_subsystem(&self, alpha: &RootVector, beta: &RootVector) -> Result<Rank2Class> {
        let a = self.require(alpha)?;
        let b = self.require(beta)?;
        Ok(self.subsystem_idx(a, b).class)
    }

    pub fn rank2_class_idx(&self, a: usize, b: usize) -> Rank2Class {
        self.subsystem_idx(a, b).class
    }

    /// A closed rank-two subsystem containing both roots, never of type
    /// A1xA1 when the roots are opposite.
    pub fn embed_pair(&self, alpha: &RootVector, beta: &RootVector) -> Result<Subsystem> {
        let a = self.require(alpha)?;
        let b = self.require(beta)?;
        self.embed_pair_idx(a, b)
    }

    pub fn embed_pair_idx(&self, a: usize, b: usize) -> Result<Subsystem> {
        if self.rank < 2 {
            return Err(Error::invalid(format!(
                "{} has rank 1; no rank-two subsystem exists",
                self.name()
            )));
        }
        if a != b && a != self.neg[b] {
            return Ok(self.subsystem_idx(a, b));
        }
        for g in 0..self.len() {
            if g == a || g == self.neg[a] {
                continue;
            }
            let sub = self.subsystem_idx(a, g);
            if sub.class != Rank2Class::A1xA1 {
                return Ok(sub);
            }
        }
        Err(Error::Internal(format!(
            "no rank-two subsystem of {} other than A1xA1 contains {}",
            self.name(),
            self.roots[a]
        )))
    }

    /// Whether the Cartan integer table has the shape expected of a root system.
    pub fn cartan_entries_valid(&self) -> bool {
        let n = self.len();
        let simple_ok = self.simple.iter().all(|&a| {
            self.simple
                .iter()
                .all(|&b| a == b || self.cartan(a, b) <= 0)
        });
        simple_ok && self.cartan.iter().all(|v| v.abs() <= 3) && (0..n).all(|i| self.cartan(i, i) == 2)
    }

    pub fn max_abs_cartan(&self) -> i64 {
        self.cartan.iter().map(|v| v.abs()).max().unwrap_or(0)
    }
}

/// One row of the pairwise classification table.
#[derive(Clone, Debug, Serialize)]
pub struct PairRow {
    pub alpha: RootVector,
    pub beta: RootVector,
    pub class: Rank2Class,
}

/// Classify the span of every ordered pair of roots.
pub fn pair_table(sys: &RootSystem) -> Vec<PairRow> {
    let mut rows = Vec::with_capacity(sys.len() * sys.len());
    for a in 0..sys.len() {
        for b in 0..sys.len() {
            rows.push(PairRow {
                alpha: sys.root(a).clone(),
                beta: sys.root(b).clone(),
                class: sys.rank2_class_idx(a, b),
            });
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rv(c: &[i64]) -> RootVector {
        RootVector::from_ints(c)
    }

    /// Independent oracle: all ±e_i and ±e_i±e_j in n dimensions.
    fn brute_b(n: usize) -> usize {
        let mut set = std::collections::BTreeSet::new();
        for i in 0..n {
            for s in [-1i64, 1] {
                let mut v = vec![0; n];
                v[i] = s;
                set.insert(v);
            }
            for j in 0..n {
                if i == j {
                    continue;
                }
                for si in [-1i64, 1] {
                    for sj in [-1i64, 1] {
                        let mut v = vec![0; n];
                        v[i] = si;
                        v[j] = sj;
                        set.insert(v);
                    }
                }
            }
        }
        set.len()
    }

    #[test]
    fn counts() {
        assert_eq!(build_root_system(Family::A, 2).unwrap().len(), 6);
        let g2 = build_root_system(Family::G, 2).unwrap();
        assert_eq!(g2.len(), 12);
        let short = (0..12).filter(|&i| g2.norm2(i) == Rational64::from_integer(2)).count();
        let long = (0..12).filter(|&i| g2.norm2(i) == Rational64::from_integer(6)).count();
        assert_eq!((short, long), (6, 6));
        assert_eq!(build_root_system(Family::B, 3).unwrap().len(), brute_b(3));
        assert_eq!(brute_b(3), 18);
    }

    #[test]
    fn rejects_unsupported() {
        for (f, r) in [(Family::A, 0), (Family::B, 1), (Family::C, 1), (Family::D, 3), (Family::G, 3)] {
            assert!(matches!(build_root_system(f, r), Err(Error::InvalidInput(_))), "{f}{r}");
        }
    }

    #[test]
    fn cartan_examples() {
        let a2 = build_root_system(Family::A, 2).unwrap();
        let s = a2.simple_roots();
        let (a, b) = (a2.root(s[0]).clone(), a2.root(s[1]).clone());
        assert_eq!(a2.cartan_int(&a, &a).unwrap(), 2);
        assert_eq!(a2.cartan_int(&a, &b).unwrap(), -1);

        let g2 = build_root_system(Family::G, 2).unwrap();
        let short = rv(&[1, -1, 0]);
        let long = rv(&[-2, 1, 1]);
        // (long, short) = -3 and |short|² = 2 give 2·(-3)/2.
        assert_eq!(g2.cartan_int(&short, &long).unwrap(), -3);
        assert_eq!(g2.cartan_int(&long, &short).unwrap(), -1);
        assert!(g2.cartan_int(&rv(&[1, 0, 0]), &long).is_err());
    }

    #[test]
    fn root_strings() {
        let a2 = build_root_system(Family::A, 2).unwrap();
        let s = a2.simple_roots();
        let (a, b) = (a2.root(s[0]).clone(), a2.root(s[1]).clone());
        assert_eq!(a2.root_string(&b, &a).unwrap(), (0, 1));
        assert!(a2.root_string(&a, &a.neg()).is_err());

        let a3 = build_root_system(Family::A, 3).unwrap();
        assert_eq!(
            a3.root_string(&rv(&[1, -1, 0, 0]), &rv(&[0, 0, 1, -1])).unwrap(),
            (0, 0)
        );
    }

    #[test]
    fn g2_short_string_matches_membership_scan() {
        let g2 = build_root_system(Family::G, 2).unwrap();
        let alpha = rv(&[1, -1, 0]);
        let beta = rv(&[0, 1, -1]);
        assert_eq!(alpha.dot(&beta), Rational64::from_integer(-1));
        // Membership oracle over t ∈ [-4, 4].
        let members: Vec<i64> = (-4..=4)
            .filter(|&t| g2.contains(&beta.add_multiple(&alpha, t)))
            .collect();
        assert_eq!(members, vec![-1, 0, 1, 2]);
        assert_eq!(g2.root_string(&beta, &alpha).unwrap(), (1, 2));
    }

    #[test]
    fn reflections() {
        let a2 = build_root_system(Family::A, 2).unwrap();
        let s = a2.simple_roots();
        let (a, b) = (a2.root(s[0]).clone(), a2.root(s[1]).clone());
        assert_eq!(a2.reflect(&a, &a).unwrap(), a.neg());
        assert_eq!(a2.reflect(&a, &b).unwrap(), a.add(&b));
        let a3 = build_root_system(Family::A, 3).unwrap();
        let x = rv(&[1, -1, 0, 0]);
        let y = rv(&[0, 0, 1, -1]);
        assert_eq!(a3.reflect(&x, &y).unwrap(), y);
        assert!(a3.reflect(&rv(&[1, 1, 0, 0]), &y).is_err());
    }

    #[test]
    fn rank2_examples() {
        let b2 = build_root_system(Family::B, 2).unwrap();
        let short = rv(&[0, 1]);
        let long = rv(&[1, -1]);
        assert_eq!(b2.rank2_subsystem(&short, &long).unwrap(), Rank2Class::B2);

        let a3 = build_root_system(Family::A, 3).unwrap();
        let x = rv(&[1, -1, 0, 0]);
        let y = rv(&[0, 0, 1, -1]);
        assert_eq!(a3.rank2_subsystem(&x, &y).unwrap(), Rank2Class::A1xA1);
        let sub = a3.embed_pair(&x, &y).unwrap();
        assert_eq!(sub.roots.len(), 4);
        assert_eq!(a3.rank2_subsystem(&x, &x.neg()).unwrap(), Rank2Class::A1);
    }

    #[test]
    fn embed_opposite_pairs() {
        let a2 = build_root_system(Family::A, 2).unwrap();
        let a = a2.root(0).clone();
        let sub = a2.embed_pair(&a, &a.neg()).unwrap();
        assert_eq!(sub.class, Rank2Class::A2);
        assert_eq!(sub.roots.len(), 6);

        let b3 = build_root_system(Family::B, 3).unwrap();
        let e1 = rv(&[1, 0, 0]);
        let sub = b3.embed_pair(&e1, &e1.neg()).unwrap();
        assert_eq!(sub.class, Rank2Class::B2);
        assert!(sub.roots.contains(&b3.index_of(&e1).unwrap()));

        let a1 = build_root_system(Family::A, 1).unwrap();
        let r = a1.root(0).clone();
        assert!(a1.embed_pair(&r, &r.neg()).is_err());
    }

    #[test]
    fn parse_names_and_vectors() {
        assert_eq!(parse_system_name("G2").unwrap(), (Family::G, 2));
        assert_eq!(parse_system_name("b3").unwrap(), (Family::B, 3));
        assert!(parse_system_name("X").is_err());
        let v: RootVector = "(1,-1/2,0)".parse().unwrap();
        assert_eq!(v.coords()[1], Rational64::new(-1, 2));
    }
}
