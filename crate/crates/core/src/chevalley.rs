//! Chevalley Z-forms of simple Lie algebras and their root elements in the
//! adjoint representation.
//!
//! Basis order: `X_α` for every root in the root system's (lexicographic)
//! order, followed by the simple coroots `H_1, …, H_l`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::rootsys::RootSystem;

/// A sparse integer combination of basis vectors, sorted by basis index.
pub type Combo = Vec<(usize, i64)>;

#[derive(Clone, Debug)]
pub struct ChevalleyZForm {
    sys: RootSystem,
    /// `[b_i, b_j]` at `brackets[i * dim + j]`.
    brackets: Vec<Combo>,
    /// `ad(X_α)^m / m!` for `m = 1, 2, …` until it vanishes, per root.
    divided: Vec<Vec<IntMatrix>>,
}

/// An element of the adjoint Chevalley group, acting on the Chevalley basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AdjointElement {
    pub matrix: IntMatrix,
}

impl AdjointElement {
    pub fn identity(dim: usize) -> Self {
        AdjointElement {
            matrix: IntMatrix::identity(dim),
        }
    }

    pub fn mul(&self, other: &AdjointElement) -> AdjointElement {
        AdjointElement {
            matrix: self.matrix.matmul(&other.matrix),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity()
    }
}

/// One letter `x_α(t)` of a word in root subgroups.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Letter {
    pub root: usize,
    #[serde(serialize_with = "crate::serde_util::bigint_str")]
    pub scalar: BigInt,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RootWord {
    pub letters: Vec<Letter>,
}

impl RootWord {
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn push(&mut self, root: usize, scalar: impl Into<BigInt>) {
        self.letters.push(Letter {
            root,
            scalar: scalar.into(),
        });
    }

    pub fn extend(&mut self, other: &RootWord) {
        self.letters.extend(other.letters.iter().cloned());
    }

    pub fn inverse(&self) -> RootWord {
        RootWord {
            letters: self
                .letters
                .iter()
                .rev()
                .map(|l| Letter {
                    root: l.root,
                    scalar: -&l.scalar,
                })
                .collect(),
        }
    }

    pub fn render(&self, sys: &RootSystem) -> String {
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|l| format!("x{}({})", sys.root(l.root), l.scalar))
            .collect();
        parts.join(" ")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RuleCheck {
    pub rule: String,
    pub passed: bool,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct JacobiResidual {
    pub triple: (String, String, String),
    pub residual: Vec<(String, i64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub system: String,
    pub dim: usize,
    pub rules: Vec<RuleCheck>,
    pub jacobi_triples_checked: usize,
    pub jacobi_residuals: Vec<JacobiResidual>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.rules.iter().all(|r| r.passed) && self.jacobi_residuals.is_empty()
    }
}

/// Order of the factors `x_{iα+jβ}` in a commutator expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ProductOrder {
    /// Increasing `i + j`, ties broken by increasing `i`.
    IncreasingHeight,
    /// The reverse of `IncreasingHeight`.
    DecreasingHeight,
}

#[derive(Clone, Debug, Serialize)]
pub struct CommutatorFactor {
    pub i: u32,
    pub j: u32,
    pub root: String,
    pub n: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SteinbergReport {
    pub system: String,
    pub alpha: String,
    pub beta: String,
    pub order: ProductOrder,
    /// Factors in the order they appear in the product.
    pub factors: Vec<CommutatorFactor>,
    pub samples_checked: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct WeylReport {
    pub alpha: String,
    pub beta: String,
    pub t: i64,
    pub image_root: String,
    pub sign: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WordMethod {
    Empty,
    Unary,
    /// Base-φ digits moved by a hyperbolic element of an A₂-type SL₂.
    GoldenConjugation,
    /// A single commutator of log-length words, with correction factors.
    CommutatorTransfer,
}

#[derive(Clone, Debug, Serialize)]
pub struct LogWordReport {
    pub method: WordMethod,
    pub length: usize,
    /// Constants of the bound `length ≤ c·⌈log₂|n|⌉ + c′` for this method.
    pub c: u64,
    pub c_prime: u64,
    pub word: RootWord,
}

/// Outcome of a bounded word-metric search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BfsOutcome {
    /// Exact distance when it is at most the searched radius.
    pub distance: Option<usize>,
    /// Every word of length ≤ this was accounted for.
    pub searched_radius: usize,
    pub states: usize,
    /// True when the state budget stopped the search early.
    pub partial: bool,
}

fn add_into(acc: &mut HashMap<usize, i64>, combo: &[(usize, i64)], k: i64) {
    for &(i, c) in combo {
        *acc.entry(i).or_insert(0) += c * k;
    }
}

fn normalize(acc: HashMap<usize, i64>) -> Combo {
    let mut v: Combo = acc.into_iter().filter(|&(_, c)| c != 0).collect();
    v.sort_unstable();
    v
}

impl ChevalleyZForm {
    pub fn system(&self) -> &RootSystem {
        &self.sys
    }

    pub fn dim(&self) -> usize {
        self.sys.len() + self.sys.rank()
    }

    /// Basis index of the simple coroot `H_k`.
    pub fn h_index(&self, k: usize) -> usize {
        self.sys.len() + k
    }

    pub fn basis_labels(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .sys
            .roots()
            .iter()
            .map(|r| format!("X{r}"))
            .collect();
        out.extend((1..=self.sys.rank()).map(|k| format!("H{k}")));
        out
    }

    pub fn bracket(&self, i: usize, j: usize) -> &Combo {
        &self.brackets[i * self.dim() + j]
    }

    /// `N_{α,β}` with `[X_α, X_β] = N_{α,β} X_{α+β}`; zero when `α+β` is not a root.
    pub fn structure_constant(&self, a: usize, b: usize) -> i64 {
        match self.sys.sum_index(a, b) {
            Some(c) => self
                .bracket(a, b)
                .iter()
                .find(|&&(i, _)| i == c)
                .map(|&(_, v)| v)
                .unwrap_or(0),
            None => 0,
        }
    }

    /// Coordinates of `H_α` in the simple-coroot basis.
    pub fn coroot_coeffs(&self, a: usize) -> Vec<i64> {
        let sys = &self.sys;
        sys.simple_roots()
            .iter()
            .zip(sys.simple_coeffs(a))
            .map(|(&s, &k)| {
                let c = Rational64::from_integer(k) * sys.norm2(s) / sys.norm2(a);
                debug_assert!(c.is_integer());
                c.to_integer()
            })
            .collect()
    }

    fn bracket_combo(&self, x: usize, v: &[(usize, i64)]) -> Combo {
        let mut acc = HashMap::new();
        for &(j, c) in v {
            add_into(&mut acc, self.bracket(x, j), c);
        }
        normalize(acc)
    }

    /// `ad(b_i)` as a matrix acting on column vectors.
    pub fn ad_matrix(&self, i: usize) -> IntMatrix {
        let d = self.dim();
        let mut m = IntMatrix::zeros(d);
        for j in 0..d {
            for &(k, c) in self.bracket(i, j) {
                m.set(k, j, BigInt::from(c));
            }
        }
        m
    }

    /// `x_α(t) = exp(t·ad X_α)`, an exact integer matrix.
    pub fn exp_root(&self, a: usize, t: &BigInt) -> AdjointElement {
        let mut m = IntMatrix::identity(self.dim());
        let mut tp = BigInt::one();
        for d in &self.divided[a] {
            tp *= t;
            m = m.add(&d.scale(&tp));
        }
        AdjointElement { matrix: m }
    }

    pub fn exp_root_i64(&self, a: usize, t: i64) -> AdjointElement {
        self.exp_root(a, &BigInt::from(t))
    }

    /// Highest power of `ad X_α` that is nonzero.
    pub fn nilpotency_degree(&self, a: usize) -> usize {
        self.divided[a].len()
    }

    pub fn evaluate(&self, word: &RootWord) -> AdjointElement {
        let mut m = AdjointElement::identity(self.dim());
        for l in &word.letters {
            m = m.mul(&self.exp_root(l.root, &l.scalar));
        }
        m
    }

    /// A copy with the sign of `[X_a, X_b]` and `[X_b, X_a]` flipped.
    ///
    /// Antisymmetry survives the flip, so only the Jacobi scan can catch it.
    pub fn with_flipped_sign(&self, a: usize, b: usize) -> ChevalleyZForm {
        let d = self.dim();
        let mut brackets = self.brackets.clone();
        for (i, j) in [(a, b), (b, a)] {
            for e in brackets[i * d + j].iter_mut() {
                e.1 = -e.1;
            }
        }
        let divided = divided_powers(&brackets, d, self.sys.len());
        ChevalleyZForm {
            sys: self.sys.clone(),
            brackets,
            divided,
        }
    }
}

fn divided_powers(brackets: &[Combo], d: usize, n_roots: usize) -> Vec<Vec<IntMatrix>> {
    (0..n_roots)
        .map(|a| {
            let mut ad = IntMatrix::zeros(d);
            for j in 0..d {
                for &(k, c) in &brackets[a * d + j] {
                    ad.set(k, j, BigInt::from(c));
                }
            }
            let mut out = Vec::new();
            let mut cur = ad.clone();
            let mut m = 1i64;
            while !cur.is_zero() {
                out.push(cur.clone());
                m += 1;
                // The divided powers of a Chevalley basis element stay integral.
                match cur.matmul(&ad).div_exact(&BigInt::from(m)) {
                    Some(next) => cur = next,
                    None => break,
                }
                if m > 2 * d as i64 {
                    break;
                }
            }
            out
        })
        .collect()
}

/// Structure constants from positive extraspecial pairs.
struct Signs<'a> {
    sys: &'a RootSystem,
    special: HashMap<(usize, usize), i64>,
    rank_of: Vec<usize>,
}

impl<'a> Signs<'a> {
    fn precedes(&self, a: usize, b: usize) -> bool {
        self.rank_of[a] < self.rank_of[b]
    }

    fn lookup(&self, a: usize, b: usize) -> i64 {
        if self.precedes(a, b) {
            self.special[&(a, b)]
        } else {
            -self.special[&(b, a)]
        }
    }

    /// `N_{a,b}` for arbitrary roots using the three-root cyclic identity and
    /// `N_{−a,−b} = −N_{a,b}`.
    fn n(&self, a: usize, b: usize) -> i64 {
        let sys = self.sys;
        let Some(c) = sys.sum_index(a, b) else {
            return 0;
        };
        let pa = sys.is_positive(a);
        let pb = sys.is_positive(b);
        if pa && pb {
            return self.lookup(a, b);
        }
        if !pa && !pb {
            return -self.n(sys.negative_of(a), sys.negative_of(b));
        }
        let mc = sys.negative_of(c);
        let triple = [a, b, mc];
        let positives = triple.iter().filter(|&&x| sys.is_positive(x)).count();
        if positives == 1 {
            return -self.n(sys.negative_of(a), sys.negative_of(b));
        }
        // N_{x,y}/(z,z) is invariant under cyclic rotation of (x,y,z).
        for rot in 0..3 {
            let (x, y, z) = (triple[rot], triple[(rot + 1) % 3], triple[(rot + 2) % 3]);
            if sys.is_positive(x) && sys.is_positive(y) {
                let v = Rational64::from_integer(self.lookup(x, y)) * sys.norm2(c) / sys.norm2(z);
                debug_assert!(v.is_integer());
                return v.to_integer();
            }
        }
        unreachable!("a zero-sum triple with two positive roots has a positive adjacent pair")
    }
}

/// Build the Chevalley basis with `N = +(r+1)` on extraspecial pairs.
pub fn chevalley_basis(sys: &RootSystem) -> Result<ChevalleyZForm> {
    let n_roots = sys.len();
    let mut pos = sys.positive_roots();
    pos.sort_by(|&a, &b| sys.height(a).cmp(&sys.height(b)).then(a.cmp(&b)));
    let mut rank_of = vec![usize::MAX; n_roots];
    for (k, &p) in pos.iter().enumerate() {
        rank_of[p] = k;
    }
    let mut signs = Signs {
        sys,
        special: HashMap::new(),
        rank_of,
    };

    for &xi in &pos {
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for &a in &pos {
            for &b in &pos {
                if signs.precedes(a, b) && sys.sum_index(a, b) == Some(xi) {
                    pairs.push((a, b));
                }
            }
        }
        pairs.sort_by_key(|&(a, _)| signs.rank_of[a]);
        let Some(&(a0, b0)) = pairs.first() else {
            continue;
        };
        let (r0, _) = sys.root_string_idx(b0, a0)?;
        let n0 = r0 + 1;
        signs.special.insert((a0, b0), n0);
        for &(a, b) in &pairs[1..] {
            let mut total = Rational64::zero();
            let ma0 = sys.negative_of(a0);
            let mb0 = sys.negative_of(b0);
            if let Some(d) = sys.sum_index(b, ma0) {
                total += Rational64::from_integer(signs.n(b, ma0) * signs.n(a, mb0)) / sys.norm2(d);
            }
            if let Some(d) = sys.sum_index(a, ma0) {
                total += Rational64::from_integer(signs.n(ma0, a) * signs.n(b, mb0)) / sys.norm2(d);
            }
            let v = total * sys.norm2(xi) / Rational64::from_integer(n0);
            if !v.is_integer() {
                return Err(Error::Internal(format!(
                    "non-integral structure constant for ({}, {})",
                    sys.root(a),
                    sys.root(b)
                )));
            }
            signs.special.insert((a, b), v.to_integer());
        }
    }

    let rank = sys.rank();
    let d = n_roots + rank;
    let mut brackets = vec![Combo::new(); d * d];
    let simple = sys.simple_roots().to_vec();
    for a in 0..n_roots {
        for b in 0..n_roots {
            let entry = if b == sys.negative_of(a) {
                let mut h = Combo::new();
                let sys_coeffs: Vec<i64> = sys
                    .simple_roots()
                    .iter()
                    .zip(sys.simple_coeffs(a))
                    .map(|(&s, &k)| {
                        (Rational64::from_integer(k) * sys.norm2(s) / sys.norm2(a)).to_integer()
                    })
                    .collect();
                for (k, c) in sys_coeffs.into_iter().enumerate() {
                    if c != 0 {
                        h.push((n_roots + k, c));
                    }
                }
                h
            } else if let Some(c) = sys.sum_index(a, b) {
                vec![(c, signs.n(a, b))]
            } else {
                Combo::new()
            };
            brackets[a * d + b] = entry;
        }
        for (k, &s) in simple.iter().enumerate() {
            let h = n_roots + k;
            let c = sys.cartan(s, a);
            if c != 0 {
                brackets[h * d + a] = vec![(a, c)];
                brackets[a * d + h] = vec![(a, -c)];
            }
        }
    }
    let divided = divided_powers(&brackets, d, n_roots);
    Ok(ChevalleyZForm {
        sys: sys.clone(),
        brackets,
        divided,
    })
}

/// Check antisymmetry, the three bracket rules, and the Jacobi identity on
/// every ordered basis triple.
pub fn verify_basis(l: &ChevalleyZForm) -> VerificationReport {
    let sys = &l.sys;
    let d = l.dim();
    let nr = sys.len();
    let labels = l.basis_labels();

    let mut anti = Vec::new();
    for i in 0..d {
        for j in 0..d {
            let lhs = l.bracket(i, j);
            let rhs: Combo = l.bracket(j, i).iter().map(|&(k, c)| (k, -c)).collect();
            if *lhs != rhs {
                anti.push(format!("[{},{}]", labels[i], labels[j]));
            }
        }
    }

    let mut rule1 = Vec::new();
    let mut rule2 = Vec::new();
    let mut rule3 = Vec::new();
    for a in 0..nr {
        let h: Combo = l
            .coroot_coeffs(a)
            .into_iter()
            .enumerate()
            .filter(|&(_, c)| c != 0)
            .map(|(k, c)| (nr + k, c))
            .collect();
        if *l.bracket(a, sys.negative_of(a)) != h {
            rule1.push(format!("[X{0},X-{0}]", sys.root(a)));
        }
        // [H_α, X_β] = A(α,β) X_β with H_α in the simple-coroot basis.
        for b in 0..nr {
            let got = {
                let mut acc = HashMap::new();
                for &(hk, c) in &h {
                    add_into(&mut acc, l.bracket(hk, b), c);
                }
                normalize(acc)
            };
            let want_c = sys.cartan(a, b);
            let want: Combo = if want_c == 0 { vec![] } else { vec![(b, want_c)] };
            if got != want {
                rule2.push(format!("[H{},X{}]", sys.root(a), sys.root(b)));
            }
            if b == a || b == sys.negative_of(a) {
                continue;
            }
            let br = l.bracket(a, b);
            match sys.sum_index(a, b) {
                Some(c) => {
                    let (r, _) = sys.root_string_idx(b, a).expect("non-proportional");
                    let ok = br.len() == 1 && br[0].0 == c && br[0].1.abs() == r + 1;
                    if !ok {
                        rule3.push(format!("[X{},X{}]", sys.root(a), sys.root(b)));
                    }
                }
                None => {
                    if !br.is_empty() {
                        rule3.push(format!("[X{},X{}] should vanish", sys.root(a), sys.root(b)));
                    }
                }
            }
        }
    }

    let residuals: Vec<JacobiResidual> = (0..d)
        .into_par_iter()
        .flat_map_iter(|x| {
            let mut out = Vec::new();
            for y in 0..d {
                for z in 0..d {
                    let mut acc = HashMap::new();
                    add_into(&mut acc, &l.bracket_combo(x, l.bracket(y, z)), 1);
                    add_into(&mut acc, &l.bracket_combo(y, l.bracket(z, x)), 1);
                    add_into(&mut acc, &l.bracket_combo(z, l.bracket(x, y)), 1);
                    let res = normalize(acc);
                    if !res.is_empty() {
                        out.push(JacobiResidual {
                            triple: (labels[x].clone(), labels[y].clone(), labels[z].clone()),
                            residual: res.into_iter().map(|(k, c)| (labels[k].clone(), c)).collect(),
                        });
                    }
                }
            }
            out
        })
        .collect();

    let mk = |rule: &str, failures: Vec<String>| RuleCheck {
        rule: rule.to_string(),
        passed: failures.is_empty(),
        failures,
    };
    VerificationReport {
        system: sys.name(),
        dim: d,
        rules: vec![
            mk("antisymmetry", anti),
            mk("[X_a,X_-a]=H_a", rule1),
            mk("[H_a,X_b]=A(a,b)X_b", rule2),
            mk("[X_a,X_b]=+-(r+1)X_(a+b)", rule3),
        ],
        jacobi_triples_checked: d * d * d,
        jacobi_residuals: residuals,
    }
}

fn commutator(l: &ChevalleyZForm, a: usize, t: &BigInt, b: usize, u: &BigInt) -> AdjointElement {
    l.exp_root(a, t)
        .mul(&l.exp_root(b, u))
        .mul(&l.exp_root(a, &-t))
        .mul(&l.exp_root(b, &-u))
}

/// Roots `iα+jβ` with `i, j > 0`, in increasing-height order.
pub fn positive_combinations(sys: &RootSystem, a: usize, b: usize) -> Vec<(u32, u32, usize)> {
    let mut out = Vec::new();
    for i in 1..=4u32 {
        for j in 1..=4u32 {
            if let Some(g) = sys.combo_index(a, i as i64, b, j as i64) {
                out.push((i, j, g));
            }
        }
    }
    out.sort_by_key(|&(i, j, _)| (i + j, i));
    out
}

/// Peel `r = ∏ x_{γ_k}(c_k)` (factors in the given order) from the left.
fn peel_unipotent(
    l: &ChevalleyZForm,
    mut r: AdjointElement,
    roots: &[usize],
) -> std::result::Result<Vec<BigInt>, AdjointElement> {
    let sys = &l.sys;
    let mut coeffs = Vec::with_capacity(roots.len());
    for &g in roots {
        let k = (0..sys.rank())
            .find(|&k| sys.cartan(sys.simple_roots()[k], g) != 0)
            .expect("some simple coroot pairs nontrivially with every root");
        let pairing = BigInt::from(sys.cartan(sys.simple_roots()[k], g));
        let entry = r.matrix.get(g, l.h_index(k)).clone();
        let c = -(entry.clone() / &pairing);
        if &c * &pairing != -entry {
            return Err(r);
        }
        r = l.exp_root(g, &-&c).mul(&r);
        coeffs.push(c);
    }
    if r.is_identity() {
        Ok(coeffs)
    } else {
        Err(r)
    }
}

/// Factor `[x_α(t), x_β(u)] = x_α(t)x_β(u)x_α(−t)x_β(−u)` as an ordered
/// product of root elements and extract the integers `N_{α,β,i,j}`.
pub fn steinberg_commutator(
    l: &ChevalleyZForm,
    a: usize,
    b: usize,
    grid: &[i64],
    order: ProductOrder,
) -> Result<SteinbergReport> {
    let sys = &l.sys;
    if a == b || a == sys.negative_of(b) {
        return Err(Error::invalid("commutator relations need non-proportional roots"));
    }
    let combos = positive_combinations(sys, a, b);
    let roots_inc: Vec<usize> = combos.iter().map(|c| c.2).collect();
    let mut n_vals: Vec<Option<i64>> = vec![None; combos.len()];
    let mut samples = 0;
    for &t in grid {
        for &u in grid {
            let (bt, bu) = (BigInt::from(t), BigInt::from(u));
            let comm = commutator(l, a, &bt, b, &bu);
            // A product in decreasing order is the inverse of an
            // increasing product of the negated coefficients, and the inverse
            // of [x,y] is [y,x].
            let coeffs = match order {
                ProductOrder::IncreasingHeight => peel_unipotent(l, comm, &roots_inc),
                ProductOrder::DecreasingHeight => {
                    peel_unipotent(l, commutator(l, b, &bu, a, &bt), &roots_inc)
                        .map(|v| v.into_iter().map(|c| -c).collect())
                }
            }
            .map_err(|res| {
                Error::Verification(format!(
                    "commutator of x{}({t}) and x{}({u}) is not a product over iα+jβ; residual:\n{}",
                    sys.root(a),
                    sys.root(b),
                    res.matrix
                ))
            })?;
            samples += 1;
            if t == 0 || u == 0 {
                if coeffs.iter().any(|c| !c.is_zero()) {
                    return Err(Error::Verification("trivial commutator has factors".into()));
                }
                continue;
            }
            for (k, &(i, j, _)) in combos.iter().enumerate() {
                let mono = BigInt::from(t).pow(i) * BigInt::from(u).pow(j);
                let c = &coeffs[k];
                if !(c % &mono).is_zero() {
                    return Err(Error::Verification(format!(
                        "coefficient {c} of x_{{{i}α+{j}β}} is not a multiple of t^{i}u^{j}"
                    )));
                }
                let n = (c / &mono).to_i64().expect("structure constants are small");
                match n_vals[k] {
                    None => n_vals[k] = Some(n),
                    Some(prev) if prev != n => {
                        return Err(Error::Verification(format!(
                            "N_{{{i},{j}}} varies across samples: {prev} vs {n}"
                        )))
                    }
                    _ => {}
                }
            }
        }
    }
    let mut factors: Vec<CommutatorFactor> = combos
        .iter()
        .zip(&n_vals)
        .map(|(&(i, j, g), n)| CommutatorFactor {
            i,
            j,
            root: sys.root(g).to_string(),
            n: n.unwrap_or(0),
        })
        .collect();
    if order == ProductOrder::DecreasingHeight {
        factors.reverse();
    }
    Ok(SteinbergReport {
        system: sys.name(),
        alpha: sys.root(a).to_string(),
        beta: sys.root(b).to_string(),
        order,
        factors,
        samples_checked: samples,
    })
}

/// `w_β = x_β(1)x_{−β}(−1)x_β(1)`.
pub fn weyl_element(l: &ChevalleyZForm, b: usize) -> (AdjointElement, AdjointElement) {
    let mb = l.sys.negative_of(b);
    let w = l
        .exp_root_i64(b, 1)
        .mul(&l.exp_root_i64(mb, -1))
        .mul(&l.exp_root_i64(b, 1));
    let w_inv = l
        .exp_root_i64(b, -1)
        .mul(&l.exp_root_i64(mb, 1))
        .mul(&l.exp_root_i64(b, -1));
    (w, w_inv)
}

/// Verify `w_β x_α(t) w_β⁻¹ = x_{s_β(α)}(±t)` and report the sign.
pub fn weyl_conjugation_check(l: &ChevalleyZForm, a: usize, b: usize, t: i64) -> Result<WeylReport> {
    let sys = &l.sys;
    let (w, w_inv) = weyl_element(l, b);
    let conj = w.mul(&l.exp_root_i64(a, t)).mul(&w_inv);
    let image = sys.reflect_idx(b, a);
    let sign = [1i64, -1]
        .into_iter()
        .find(|&s| l.exp_root_i64(image, s * t) == conj)
        .ok_or_else(|| {
            Error::Verification(format!(
                "conjugate of x{}({t}) by w{} is not x{}(±{t})",
                sys.root(a),
                sys.root(b),
                sys.root(image)
            ))
        })?;
    // For t = 0 both signs match; report +.
    let sign = if t == 0 { 1 } else { sign };
    Ok(WeylReport {
        alpha: sys.root(a).to_string(),
        beta: sys.root(b).to_string(),
        t,
        image_root: sys.root(image).to_string(),
        sign,
    })
}

// --- logarithmic words -------------------------------------------------

/// `a + bφ` with `φ² = φ + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct ZPhi {
    a: BigInt,
    b: BigInt,
}

impl ZPhi {
    fn int(n: BigInt) -> Self {
        ZPhi { a: n, b: BigInt::zero() }
    }

    fn one() -> Self {
        ZPhi::int(BigInt::one())
    }

    fn times_phi(&self) -> Self {
        ZPhi {
            a: self.b.clone(),
            b: &self.a + &self.b,
        }
    }

    fn div_phi(&self) -> Self {
        ZPhi {
            a: &self.b - &self.a,
            b: self.a.clone(),
        }
    }

    fn sub(&self, o: &ZPhi) -> Self {
        ZPhi {
            a: &self.a - &o.a,
            b: &self.b - &o.b,
        }
    }

    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Exact sign of `a + bφ = (2a + b + b√5)/2`.
    fn sign(&self) -> i32 {
        let p = BigInt::from(2) * &self.a + &self.b;
        let q = self.b.clone();
        let sp = p.signum();
        let sq = q.signum();
        if sp >= BigInt::zero() && sq >= BigInt::zero() {
            return if p.is_zero() && q.is_zero() { 0 } else { 1 };
        }
        if sp <= BigInt::zero() && sq <= BigInt::zero() {
            return -1;
        }
        let lhs = &p * &p;
        let rhs = BigInt::from(5) * &q * &q;
        // Opposite signs: the term with larger square wins.
        if p.is_positive() {
            if lhs > rhs { 1 } else { -1 }
        } else if rhs > lhs {
            1
        } else {
            -1
        }
    }
}

/// Exponents of the greedy base-φ expansion of a positive integer (no two
/// consecutive exponents), highest first.
pub fn golden_expansion(n: &BigInt) -> Vec<i64> {
    assert!(n.is_positive());
    let target = ZPhi::int(n.clone());
    let mut top = 0i64;
    let mut pw = ZPhi::one();
    loop {
        let next = pw.times_phi();
        if target.sub(&next).sign() < 0 {
            break;
        }
        pw = next;
        top += 1;
    }
    let mut r = target;
    let mut out = Vec::new();
    let mut j = top;
    while !r.is_zero() {
        if r.sub(&pw).sign() >= 0 {
            r = r.sub(&pw);
            out.push(j);
        }
        pw = pw.div_phi();
        j -= 1;
        assert!(j > -4 * top - 16, "base-φ expansion failed to terminate");
    }
    out
}

/// Roots `δ` such that `α`, `γ = α+δ` span a commuting pair acted on by
/// the SL₂ of `±δ` through its standard 2-dimensional representation.
fn a2_partner(sys: &RootSystem, a: usize) -> Option<(usize, usize)> {
    (0..sys.len()).find_map(|d| {
        let g = sys.sum_index(a, d)?;
        let bad = sys.combo_index(a, 1, d, 2).is_some()
            || sys.combo_index(a, 1, d, -1).is_some()
            || sys.combo_index(a, 2, d, 1).is_some();
        (!bad).then_some((d, g))
    })
}

impl ChevalleyZForm {
    /// Sign `ε` with `x_s(1) x_a(1) x_s(−1) = x_a(1) x_{a+s}(ε)`.
    fn conj_sign(&self, s: usize, a: usize, g: usize) -> Option<i64> {
        let lhs = self
            .exp_root_i64(s, 1)
            .mul(&self.exp_root_i64(a, 1))
            .mul(&self.exp_root_i64(s, -1));
        [1, -1]
            .into_iter()
            .find(|&e| self.exp_root_i64(a, 1).mul(&self.exp_root_i64(g, e)) == lhs)
    }

    fn golden_word(&self, a: usize, n: &BigInt) -> Option<RootWord> {
        let sys = &self.sys;
        let (d, g) = a2_partner(sys, a)?;
        let md = sys.negative_of(d);
        let eps = self.conj_sign(d, a, g)?;
        let eps2 = self.conj_sign(md, g, a)?;
        let sgn = if n.is_negative() { -1 } else { 1 };
        let exps = golden_expansion(&n.abs());
        // Pair exponents as φ^{2k}·(1 or φ); conjugation by g is ·φ².
        let mut digits: Vec<(i64, usize)> = exps
            .iter()
            .map(|&e| {
                let k = e.div_euclid(2);
                (k, if e.rem_euclid(2) == 0 { a } else { g })
            })
            .collect();
        digits.sort();
        let lo = digits.first()?.0;
        let hi = digits.last()?.0;
        let mut gw = RootWord::default();
        gw.push(d, eps);
        gw.push(md, eps2);
        let gi = gw.inverse();
        let mut w = RootWord::default();
        for _ in 0..(-lo).max(0) {
            w.extend(&gi);
        }
        for _ in 0..lo.max(0) {
            w.extend(&gw);
        }
        let mut k = lo;
        for (dk, root) in digits {
            while k < dk {
                w.extend(&gw);
                k += 1;
            }
            w.push(root, sgn);
        }
        for _ in 0..hi.max(0) {
            w.extend(&gi);
        }
        for _ in 0..(-hi).max(0) {
            w.extend(&gw);
        }
        Some(w)
    }

    fn transfer_word(&self, a: usize, n: &BigInt) -> Option<RootWord> {
        let sys = &self.sys;
        for p in 0..sys.len() {
            for q in 0..sys.len() {
                if p == q || p == sys.negative_of(q) || sys.sum_index(p, q) != Some(a) {
                    continue;
                }
                if a2_partner(sys, p).is_none() {
                    continue;
                }
                let combos = positive_combinations(sys, p, q);
                if combos[0].0 != 1 || combos[0].1 != 1 {
                    continue;
                }
                if combos[1..].iter().any(|&(_, _, g)| a2_partner(sys, g).is_none()) {
                    continue;
                }
                let rep = steinberg_commutator(self, p, q, &[1], ProductOrder::IncreasingHeight).ok()?;
                let n11 = rep.factors[0].n;
                if n11.abs() != 1 {
                    continue;
                }
                // [x_p(n), x_q(u)] = x_a(n11·n·u) · ∏ x_{ip+jq}(N n^i u^j)
                let u = n11;
                let mut w = self.golden_word(p, n)?;
                w.push(q, u);
                w.extend(&self.golden_word(p, &-n)?);
                w.push(q, -u);
                for (f, &(i, j, g)) in rep.factors.iter().zip(&combos).skip(1).rev() {
                    let c = BigInt::from(-f.n) * n.pow(i) * BigInt::from(u).pow(j);
                    if !c.is_zero() {
                        w.extend(&self.golden_word(g, &c)?);
                    }
                }
                return Some(w);
            }
        }
        None
    }

    /// A word in unit root elements evaluating to `x_α(n)` whose length
    /// grows logarithmically in `|n|`.
    pub fn logword(&self, a: usize, n: &BigInt) -> Result<LogWordReport> {
        let sys = &self.sys;
        if sys.rank() < 2 {
            return Err(Error::invalid(
                "rank-one systems have no distortion mechanism for root elements",
            ));
        }
        if n.is_zero() {
            return Ok(LogWordReport {
                method: WordMethod::Empty,
                length: 0,
                c: 0,
                c_prime: 0,
                word: RootWord::default(),
            });
        }
        let mut best: Option<(WordMethod, RootWord, u64, u64)> = None;
        let consider = |best: &mut Option<(WordMethod, RootWord, u64, u64)>, m, w: RootWord, c, cp| {
            if best.as_ref().is_none_or(|b| w.len() < b.1.len()) {
                *best = Some((m, w, c, cp));
            }
        };
        if let Some(w) = self.golden_word(a, n) {
            consider(&mut best, WordMethod::GoldenConjugation, w, 8, 12);
        } else if let Some(w) = self.transfer_word(a, n) {
            consider(&mut best, WordMethod::CommutatorTransfer, w, 40, 80);
        } else {
            return Err(Error::Unsupported(format!(
                "no logarithmic word construction for the root {} of {}",
                sys.root(a),
                sys.name()
            )));
        }
        if let Some(k) = n.abs().to_u64().filter(|&k| k <= 64) {
            let mut w = RootWord::default();
            for _ in 0..k {
                w.push(a, n.signum());
            }
            consider(&mut best, WordMethod::Unary, w, 0, 64);
        }
        let (method, word, c, c_prime) = best.expect("at least one construction succeeded");
        Ok(LogWordReport {
            method,
            length: word.len(),
            c,
            c_prime,
            word,
        })
    }
}

/// `⌈log₂ n⌉` for `n ≥ 1`.
pub fn ceil_log2(n: &BigInt) -> u64 {
    let n = n.abs();
    if n <= BigInt::one() {
        return 0;
    }
    (n - 1u32).bits()
}

// --- word metric search --------------------------------------------------

// Keys are zigzag varints of the entries: small matrices pack into a few
// bytes each, which is what makes multi-million-state searches fit.
type Key = Box<[u8]>;

fn encode(entries: &[i64]) -> Key {
    let mut out = Vec::with_capacity(entries.len() + 4);
    for &v in entries {
        let mut z = ((v << 1) ^ (v >> 63)) as u64;
        loop {
            let byte = (z & 0x7f) as u8;
            z >>= 7;
            if z == 0 {
                out.push(byte);
                break;
            }
            out.push(byte | 0x80);
        }
    }
    out.into_boxed_slice()
}

fn decode(key: &[u8], out: &mut Vec<i64>) {
    out.clear();
    let mut z = 0u64;
    let mut shift = 0;
    for &b in key {
        z |= ((b & 0x7f) as u64) << shift;
        if b & 0x80 == 0 {
            out.push(((z >> 1) as i64) ^ -((z & 1) as i64));
            z = 0;
            shift = 0;
        } else {
            shift += 7;
        }
    }
}

fn mul_into(x: &[i64], g: &[i64], n: usize, out: &mut [i64]) -> Option<()> {
    out.iter_mut().for_each(|v| *v = 0);
    for i in 0..n {
        for k in 0..n {
            let a = x[i * n + k];
            if a == 0 {
                continue;
            }
            for j in 0..n {
                let b = g[k * n + j];
                if b != 0 {
                    out[i * n + j] = out[i * n + j].checked_add(a.checked_mul(b)?)?;
                }
            }
        }
    }
    Some(())
}

fn expand(key: &[u8], gens: &[Vec<i64>], n: usize) -> Vec<Option<Key>> {
    let mut x = Vec::with_capacity(n * n);
    decode(key, &mut x);
    let mut buf = vec![0i64; n * n];
    gens.iter()
        .map(|g| mul_into(&x, g, n, &mut buf).map(|_| encode(&buf)))
        .collect()
}

/// Exact word-metric distance from the identity to `target` in the group
/// generated by `generators`, searching words up to length `radius` from
/// both ends.
///
/// `generators` must be closed under inverses. At most `max_states` group
/// elements are stored; hitting that limit returns a partial outcome.
pub fn bfs_matrix_word_length(
    generators: &[IntMatrix],
    target: &IntMatrix,
    radius: usize,
    max_states: usize,
) -> Result<BfsOutcome> {
    let n = target.dim();
    let gens: Vec<Vec<i64>> = generators
        .iter()
        .map(IntMatrix::to_i64)
        .collect::<Option<_>>()
        .ok_or_else(|| Error::invalid("generator entries exceed 64 bits"))?;
    if gens.iter().any(|g| g.len() != n * n) {
        return Err(Error::invalid("generators and target differ in size"));
    }
    let start = encode(&IntMatrix::identity(n).to_i64().expect("identity fits"));
    let goal = encode(
        &target
            .to_i64()
            .ok_or_else(|| Error::invalid("target entries exceed 64 bits"))?,
    );
    if start == goal {
        return Ok(BfsOutcome {
            distance: Some(0),
            searched_radius: 0,
            states: 1,
            partial: false,
        });
    }
    let mut seen: [HashMap<Key, u32>; 2] = [HashMap::new(), HashMap::new()];
    seen[0].insert(start.clone(), 0);
    seen[1].insert(goal.clone(), 0);
    let mut frontier: [Vec<Key>; 2] = [vec![start], vec![goal]];
    let mut depth = [0usize; 2];
    let total = |seen: &[HashMap<Key, u32>; 2]| seen[0].len() + seen[1].len();
    loop {
        if depth[0] + depth[1] >= radius {
            return Ok(BfsOutcome {
                distance: None,
                searched_radius: radius,
                states: total(&seen),
                partial: false,
            });
        }
        let side = if frontier[0].len() <= frontier[1].len() { 0 } else { 1 };
        let other = 1 - side;
        // The backward side multiplies by the same inverse-closed set.
        let next: Vec<Vec<Option<Key>>> = frontier[side]
            .par_iter()
            .map(|x| expand(x, &gens, n))
            .collect();
        let mut layer = Vec::new();
        let mut best: Option<usize> = None;
        for k in next.into_iter().flatten() {
            let Some(k) = k else {
                return Err(Error::Budget("matrix entries overflowed 64 bits".into()));
            };
            if seen[side].contains_key(&k) {
                continue;
            }
            if let Some(&od) = seen[other].get(&k) {
                let d = depth[side] + 1 + od as usize;
                best = Some(best.map_or(d, |b: usize| b.min(d)));
            }
            seen[side].insert(k.clone(), depth[side] as u32 + 1);
            layer.push(k);
            if total(&seen) > max_states {
                return Ok(BfsOutcome {
                    distance: None,
                    searched_radius: depth[0] + depth[1],
                    states: total(&seen),
                    partial: true,
                });
            }
        }
        depth[side] += 1;
        if let Some(b) = best {
            return Ok(BfsOutcome {
                distance: (b <= radius).then_some(b),
                searched_radius: radius.min(depth[0] + depth[1]),
                states: total(&seen),
                partial: false,
            });
        }
        if layer.is_empty() {
            return Ok(BfsOutcome {
                distance: None,
                searched_radius: radius,
                states: total(&seen),
                partial: false,
            });
        }
        frontier[side] = layer;
    }
}

/// [`bfs_matrix_word_length`] for adjoint group elements.
pub fn bfs_word_length(
    generators: &[AdjointElement],
    target: &AdjointElement,
    radius: usize,
    max_states: usize,
) -> Result<BfsOutcome> {
    let gens: Vec<IntMatrix> = generators.iter().map(|g| g.matrix.clone()).collect();
    bfs_matrix_word_length(&gens, &target.matrix, radius, max_states)
}

/// `{x_γ(±1) : γ ∈ Φ}`, closed under inverses.
pub fn unit_root_generators(l: &ChevalleyZForm) -> Vec<AdjointElement> {
    let mut out = Vec::new();
    for g in 0..l.sys.len() {
        out.push(l.exp_root_i64(g, 1));
        out.push(l.exp_root_i64(g, -1));
    }
    out
}

impl fmt::Display for AdjointElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.matrix)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::{build_root_system, Family};

    fn form(f: Family, r: usize) -> ChevalleyZForm {
        chevalley_basis(&build_root_system(f, r).unwrap()).unwrap()
    }

    fn n_values(l: &ChevalleyZForm) -> Vec<i64> {
        let n = l.system().len();
        let mut v: Vec<i64> = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .map(|(a, b)| l.structure_constant(a, b))
            .filter(|&x| x != 0)
            .map(i64::abs)
            .collect();
        v.sort();
        v.dedup();
        v
    }

    #[test]
    fn dims_and_constants() {
        let a2 = form(Family::A, 2);
        assert_eq!(a2.dim(), 8);
        assert_eq!(n_values(&a2), vec![1]);
        let b2 = form(Family::B, 2);
        assert_eq!(b2.dim(), 10);
        assert_eq!(n_values(&b2), vec![1, 2]);
        let g2 = form(Family::G, 2);
        assert_eq!(g2.dim(), 14);
        assert_eq!(n_values(&g2), vec![1, 2, 3]);
    }

    #[test]
    fn verification_passes_and_detects_tampering() {
        for (f, r) in [(Family::A, 2), (Family::B, 2), (Family::G, 2)] {
            let l = form(f, r);
            let rep = verify_basis(&l);
            assert!(rep.passed(), "{f}{r}: {:?}", rep.rules);
        }
        let l = form(Family::A, 2);
        let sys = l.system();
        let (a, b) = (0..sys.len())
            .flat_map(|a| (0..sys.len()).map(move |b| (a, b)))
            .find(|&(a, b)| sys.sum_index(a, b).is_some())
            .unwrap();
        let bad = l.with_flipped_sign(a, b);
        let rep = verify_basis(&bad);
        assert!(rep.rules[0].passed);
        assert!(!rep.jacobi_residuals.is_empty());
    }

    #[test]
    fn exp_root_group_law() {
        let l = form(Family::G, 2);
        for a in 0..l.system().len() {
            let x = l.exp_root_i64(a, 2).mul(&l.exp_root_i64(a, -3));
            assert_eq!(x, l.exp_root_i64(a, -1));
            assert!(l.exp_root_i64(a, 0).is_identity());
            assert_eq!(l.exp_root_i64(a, 5).matrix.determinant(), BigInt::one());
        }
        // Short roots of G₂ have ad³ ≠ 0; long roots stop at ad².
        let sys = l.system();
        for a in 0..sys.len() {
            let want = if sys.is_long(a) { 2 } else { 3 };
            assert_eq!(l.nilpotency_degree(a), want, "{}", sys.root(a));
        }
    }

    #[test]
    fn nilpotency_matches_direct_powering() {
        let l = form(Family::G, 2);
        for a in 0..l.system().len() {
            let ad = l.ad_matrix(a);
            let mut p = ad.clone();
            let mut k = 1;
            while !p.is_zero() {
                p = p.matmul(&ad);
                k += 1;
            }
            assert_eq!(k - 1, l.nilpotency_degree(a));
        }
    }

    #[test]
    fn a2_commutator_is_single_unit_factor() {
        let l = form(Family::A, 2);
        let s = l.system().simple_roots().to_vec();
        let grid: Vec<i64> = (-3..=3).collect();
        let rep = steinberg_commutator(&l, s[0], s[1], &grid, ProductOrder::IncreasingHeight).unwrap();
        assert_eq!(rep.factors.len(), 1);
        assert_eq!(rep.factors[0].n.abs(), 1);
        assert_eq!(rep.samples_checked, 49);
    }

    #[test]
    fn orthogonal_pair_commutes() {
        let l = form(Family::A, 3);
        let sys = l.system();
        let a = sys.index_of(&"1,-1,0,0".parse().unwrap()).unwrap();
        let b = sys.index_of(&"0,0,1,-1".parse().unwrap()).unwrap();
        let rep = steinberg_commutator(&l, a, b, &[-2, 1, 3], ProductOrder::IncreasingHeight).unwrap();
        assert!(rep.factors.is_empty());
    }

    #[test]
    fn order_changes_signs_only() {
        let l = form(Family::G, 2);
        let sys = l.system();
        let a = sys.index_of(&"1,-1,0".parse().unwrap()).unwrap();
        let b = sys.index_of(&"0,1,-1".parse().unwrap()).unwrap();
        let grid = [-2, -1, 1, 2];
        let inc = steinberg_commutator(&l, a, b, &grid, ProductOrder::IncreasingHeight).unwrap();
        let dec = steinberg_commutator(&l, a, b, &grid, ProductOrder::DecreasingHeight).unwrap();
        let mut m1: Vec<_> = inc.factors.iter().map(|f| (f.i, f.j, f.n.abs())).collect();
        let mut m2: Vec<_> = dec.factors.iter().map(|f| (f.i, f.j, f.n.abs())).collect();
        m1.sort();
        m2.sort();
        assert_eq!(m1, m2);
        assert!(inc.factors.iter().any(|f| f.n.abs() == 3) || inc.factors.iter().any(|f| f.n.abs() == 2));
    }

    #[test]
    fn weyl_examples() {
        let l = form(Family::A, 2);
        let a = l.system().simple_roots()[0];
        let rep = weyl_conjugation_check(&l, a, a, 1).unwrap();
        assert_eq!(rep.image_root, l.system().root(l.system().negative_of(a)).to_string());
        let l3 = form(Family::A, 3);
        let sys = l3.system();
        let x = sys.index_of(&"1,-1,0,0".parse().unwrap()).unwrap();
        let y = sys.index_of(&"0,0,1,-1".parse().unwrap()).unwrap();
        let rep = weyl_conjugation_check(&l3, x, y, 2).unwrap();
        assert_eq!(rep.sign, 1);
        assert_eq!(rep.image_root, sys.root(x).to_string());
    }

    #[test]
    fn golden_expansion_small() {
        // 4 = φ² + 1 + φ⁻²
        assert_eq!(golden_expansion(&BigInt::from(4)), vec![2, 0, -2]);
        assert_eq!(golden_expansion(&BigInt::from(1)), vec![0]);
        assert_eq!(golden_expansion(&BigInt::from(2)), vec![1, -2]);
    }

    #[test]
    fn logwords_evaluate() {
        let l = form(Family::A, 2);
        let a = l.system().simple_roots()[0];
        for n in [1i64, 2, 3, 4, 7, 100, -37, 1 << 12] {
            let n = BigInt::from(n);
            let rep = l.logword(a, &n).unwrap();
            assert_eq!(l.evaluate(&rep.word), l.exp_root(a, &n), "n={n}");
        }
        assert_eq!(l.logword(a, &BigInt::one()).unwrap().length, 1);
        let a1 = chevalley_basis(&build_root_system(Family::A, 1).unwrap()).unwrap();
        assert!(a1.logword(0, &BigInt::from(5)).is_err());
    }

    #[test]
    fn bfs_small() {
        let l = form(Family::A, 2);
        let gens = unit_root_generators(&l);
        let a = l.system().simple_roots()[0];
        let id = AdjointElement::identity(l.dim());
        assert_eq!(bfs_word_length(&gens, &id, 3, 1 << 20).unwrap().distance, Some(0));
        let t2 = l.exp_root_i64(a, 2);
        assert_eq!(bfs_word_length(&gens, &t2, 4, 1 << 20).unwrap().distance, Some(2));
        let t5 = l.exp_root_i64(a, 5);
        let out = bfs_word_length(&gens, &t5, 3, 1 << 20).unwrap();
        assert_eq!(out.distance, None);
        assert!(!out.partial);
    }
}
