//! Rings of integers of quadratic fields, 2×2 matrices over them, and the
//! elementary-matrix identities used to exhibit stubborn unipotents in
//! SL(2, O).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// The ring of integers of `Q(√d)` with integral basis `(1, ω)`:
/// `ω = √d` when `d ≢ 1 (mod 4)`, otherwise `ω = (1+√d)/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct QuadOrder {
    d: i64,
}

fn is_squarefree(d: i64) -> bool {
    let n = d.unsigned_abs();
    let mut p = 2u64;
    while p * p <= n {
        if n % (p * p) == 0 {
            return false;
        }
        p += 1;
    }
    true
}

impl QuadOrder {
    pub fn new(d: i64) -> Result<Self> {
        if d == 0 || d == 1 || !is_squarefree(d) {
            return Err(Error::invalid(format!("d = {d} must be squarefree and not 0 or 1")));
        }
        Ok(QuadOrder { d })
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    /// Whether `ω = (1+√d)/2`.
    pub fn half_integral(&self) -> bool {
        self.d.rem_euclid(4) == 1
    }

    pub fn elem(&self, a: impl Into<BigInt>, b: impl Into<BigInt>) -> QuadInt {
        QuadInt {
            order: *self,
            a: a.into(),
            b: b.into(),
        }
    }

    pub fn int(&self, a: impl Into<BigInt>) -> QuadInt {
        self.elem(a, 0)
    }

    pub fn zero(&self) -> QuadInt {
        self.int(0)
    }

    pub fn one(&self) -> QuadInt {
        self.int(1)
    }

    pub fn omega(&self) -> QuadInt {
        self.elem(0, 1)
    }

    pub fn integral_basis(&self) -> [QuadInt; 2] {
        [self.one(), self.omega()]
    }

    /// `ω² = d` or `ω² = ω + (d−1)/4`, as `(c0, c1)` with `ω² = c0 + c1ω`.
    fn omega_sq(&self) -> (BigInt, BigInt) {
        if self.half_integral() {
            (BigInt::from((self.d - 1) / 4), BigInt::one())
        } else {
            (BigInt::from(self.d), BigInt::zero())
        }
    }
}

impl fmt::Display for QuadOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.half_integral() {
            write!(f, "Z[(1+sqrt({}))/2]", self.d)
        } else {
            write!(f, "Z[sqrt({})]", self.d)
        }
    }
}

/// `a + bω` in a quadratic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadInt {
    order: QuadOrder,
    pub a: BigInt,
    pub b: BigInt,
}

/// Sign of `p + q√d` for `d > 0` not a perfect square.
fn sign_surd(p: &BigInt, q: &BigInt, d: i64) -> i32 {
    let sp = p.sign();
    let sq = q.sign();
    use num_bigint::Sign::*;
    match (sp, sq) {
        (NoSign, NoSign) => 0,
        (Plus, Plus) | (Plus, NoSign) | (NoSign, Plus) => 1,
        (Minus, Minus) | (Minus, NoSign) | (NoSign, Minus) => -1,
        (Plus, Minus) => {
            if p * p > BigInt::from(d) * q * q {
                1
            } else {
                -1
            }
        }
        (Minus, Plus) => {
            if BigInt::from(d) * q * q > p * p {
                1
            } else {
                -1
            }
        }
    }
}

impl QuadInt {
    pub fn order(&self) -> QuadOrder {
        self.order
    }

    fn same(&self, o: &QuadInt) {
        assert_eq!(self.order, o.order, "elements of different orders");
    }

    pub fn add(&self, o: &QuadInt) -> QuadInt {
        self.same(o);
        self.order.elem(&self.a + &o.a, &self.b + &o.b)
    }

    pub fn sub(&self, o: &QuadInt) -> QuadInt {
        self.same(o);
        self.order.elem(&self.a - &o.a, &self.b - &o.b)
    }

    pub fn neg(&self) -> QuadInt {
        self.order.elem(-&self.a, -&self.b)
    }

    pub fn mul(&self, o: &QuadInt) -> QuadInt {
        self.same(o);
        let (c0, c1) = self.order.omega_sq();
        let bb = &self.b * &o.b;
        self.order.elem(
            &self.a * &o.a + &bb * c0,
            &self.a * &o.b + &self.b * &o.a + &bb * c1,
        )
    }

    pub fn scale(&self, k: &BigInt) -> QuadInt {
        self.order.elem(&self.a * k, &self.b * k)
    }

    pub fn pow(&self, mut e: u32) -> QuadInt {
        let mut base = self.clone();
        let mut acc = self.order.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Galois conjugate `√d ↦ −√d`.
    pub fn conj(&self) -> QuadInt {
        if self.order.half_integral() {
            self.order.elem(&self.a + &self.b, -&self.b)
        } else {
            self.order.elem(self.a.clone(), -&self.b)
        }
    }

    pub fn norm(&self) -> BigInt {
        let p = self.mul(&self.conj());
        debug_assert!(p.b.is_zero());
        p.a
    }

    pub fn trace(&self) -> BigInt {
        self.add(&self.conj()).a
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        self.norm().abs().is_one()
    }

    pub fn inverse(&self) -> Result<QuadInt> {
        let n = self.norm();
        if !n.abs().is_one() {
            return Err(Error::invalid(format!("{self} is not a unit (norm {n})")));
        }
        Ok(self.conj().scale(&n))
    }

    /// `self / o` when the quotient lies in the ring.
    pub fn div_exact(&self, o: &QuadInt) -> Option<QuadInt> {
        let n = o.norm();
        if n.is_zero() {
            return None;
        }
        let num = self.mul(&o.conj());
        let (qa, ra) = num.a.div_rem(&n);
        let (qb, rb) = num.b.div_rem(&n);
        (ra.is_zero() && rb.is_zero()).then(|| self.order.elem(qa, qb))
    }

    /// Sign under the real embedding with `√d > 0` (real orders only).
    pub fn real_sign(&self) -> i32 {
        assert!(self.order.d > 0, "real embedding needs d > 0");
        if self.order.half_integral() {
            sign_surd(&(BigInt::from(2) * &self.a + &self.b), &self.b, self.order.d)
        } else {
            sign_surd(&self.a, &self.b, self.order.d)
        }
    }

    /// Value under the real embedding, for display only.
    pub fn to_f64(&self) -> f64 {
        let w = if self.order.half_integral() {
            (1.0 + (self.order.d as f64).sqrt()) / 2.0
        } else {
            (self.order.d as f64).sqrt()
        };
        self.a.to_f64().unwrap_or(f64::NAN) + self.b.to_f64().unwrap_or(f64::NAN) * w
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = if self.order.half_integral() {
            "w".to_string()
        } else {
            format!("sqrt({})", self.order.d)
        };
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}*{}", self.b, sym),
            (false, false) => {
                if self.b.is_negative() {
                    write!(f, "{}-{}*{}", self.a, -&self.b, sym)
                } else {
                    write!(f, "{}+{}*{}", self.a, self.b, sym)
                }
            }
        }
    }
}

impl Serialize for QuadInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("QuadInt", 2)?;
        st.serialize_field("a", &self.a.to_string())?;
        st.serialize_field("b", &self.b.to_string())?;
        st.end()
    }
}

/// Exact `floor((p + √d)/q)` for `d > 0` not a square and `q ≠ 0`.
fn floor_surd_quotient(p: &BigInt, q: &BigInt, d: i64) -> BigInt {
    let s = BigInt::from(d).sqrt();
    let mut m = (p + &s).div_floor(q);
    // y ≥ m  ⇔  (p − mq) + √d has the sign of q (or is zero).
    let ge = |m: &BigInt| {
        let sg = sign_surd(&(p - m * q), &BigInt::one(), d);
        if q.is_positive() {
            sg >= 0
        } else {
            sg <= 0
        }
    };
    while !ge(&m) {
        m -= 1;
    }
    while ge(&(&m + 1)) {
        m += 1;
    }
    m
}

/// The fundamental unit `ε > 1` of a real quadratic order, from the
/// continued-fraction convergents of `ω`.
pub fn fundamental_unit(d: i64) -> Result<QuadInt> {
    if d < 2 {
        return Err(Error::invalid(format!(
            "d = {d}: only real quadratic orders (d ≥ 2) have units of infinite order"
        )));
    }
    let o = QuadOrder::new(d)?;
    // ω = (P + √d)/Q with Q | d − P².
    let (mut p, mut q) = if o.half_integral() {
        (BigInt::one(), BigInt::from(2))
    } else {
        (BigInt::zero(), BigInt::one())
    };
    let dd = BigInt::from(d);
    let (mut h1, mut h2) = (BigInt::one(), BigInt::zero());
    let (mut k1, mut k2) = (BigInt::zero(), BigInt::one());
    for _ in 0..100_000 {
        let a = floor_surd_quotient(&p, &q, d);
        let h = &a * &h1 + &h2;
        let k = &a * &k1 + &k2;
        let cand = o.elem(h.clone(), -&k);
        if cand.norm().abs().is_one() {
            let mut u = cand.inverse()?;
            if u.real_sign() < 0 {
                u = u.neg();
            }
            return Ok(u);
        }
        h2 = std::mem::replace(&mut h1, h);
        k2 = std::mem::replace(&mut k1, k);
        let p_next = &a * &q - &p;
        let q_next = (&dd - &p_next * &p_next) / &q;
        p = p_next;
        q = q_next;
    }
    Err(Error::Budget(format!("continued fraction for d = {d} did not close")))
}

/// A 2×2 matrix over a quadratic order, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat2 {
    pub e: [QuadInt; 4],
}

impl Mat2 {
    pub fn new(a: QuadInt, b: QuadInt, c: QuadInt, d: QuadInt) -> Self {
        Mat2 { e: [a, b, c, d] }
    }

    pub fn identity(o: QuadOrder) -> Self {
        Mat2::new(o.one(), o.zero(), o.zero(), o.one())
    }

    pub fn upper(x: &QuadInt) -> Self {
        let o = x.order();
        Mat2::new(o.one(), x.clone(), o.zero(), o.one())
    }

    pub fn lower(x: &QuadInt) -> Self {
        let o = x.order();
        Mat2::new(o.one(), o.zero(), x.clone(), o.one())
    }

    /// `diag(t, t⁻¹)` for a unit `t`.
    pub fn diag(t: &QuadInt) -> Result<Self> {
        let o = t.order();
        Ok(Mat2::new(t.clone(), o.zero(), o.zero(), t.inverse()?))
    }

    pub fn mul(&self, m: &Mat2) -> Mat2 {
        let [a, b, c, d] = &self.e;
        let [p, q, r, s] = &m.e;
        Mat2::new(
            a.mul(p).add(&b.mul(r)),
            a.mul(q).add(&b.mul(s)),
            c.mul(p).add(&d.mul(r)),
            c.mul(q).add(&d.mul(s)),
        )
    }

    pub fn det(&self) -> QuadInt {
        let [a, b, c, d] = &self.e;
        a.mul(d).sub(&b.mul(c))
    }

    /// Inverse of a determinant-one matrix.
    pub fn inverse_sl(&self) -> Mat2 {
        let [a, b, c, d] = &self.e;
        Mat2::new(d.clone(), b.neg(), c.neg(), a.clone())
    }
}

impl Serialize for Mat2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.e.serialize(s)
    }
}

/// A generator of SL(2, O) appearing in an explicit word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Mat2Letter {
    Upper(QuadInt),
    Lower(QuadInt),
    /// `diag(t, t⁻¹)` for a unit `t`.
    Diag(QuadInt),
}

impl Mat2Letter {
    pub fn matrix(&self) -> Result<Mat2> {
        match self {
            Mat2Letter::Upper(x) => Ok(Mat2::upper(x)),
            Mat2Letter::Lower(x) => Ok(Mat2::lower(x)),
            Mat2Letter::Diag(t) => Mat2::diag(t),
        }
    }
}

pub fn evaluate_word(o: QuadOrder, word: &[Mat2Letter]) -> Result<Mat2> {
    let mut m = Mat2::identity(o);
    for l in word {
        m = m.mul(&l.matrix()?);
    }
    Ok(m)
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagDecomposition {
    pub t: QuadInt,
    pub word: Vec<Mat2Letter>,
    pub product: Mat2,
    pub holds: bool,
}

/// Write `diag(t, t⁻¹)` as six elementary matrices:
/// `[[0,t],[−t⁻¹,0]]·[[0,−1],[1,0]]`, each factor being
/// `upper(λ)·lower(−λ⁻¹)·upper(λ)`.
pub fn verify_diag_decomposition(o: QuadOrder, t: &QuadInt) -> Result<DiagDecomposition> {
    let ti = t.inverse()?;
    let m1 = o.int(-1);
    let word = vec![
        Mat2Letter::Upper(t.clone()),
        Mat2Letter::Lower(ti.neg()),
        Mat2Letter::Upper(t.clone()),
        Mat2Letter::Upper(m1.clone()),
        Mat2Letter::Lower(o.one()),
        Mat2Letter::Upper(m1),
    ];
    let product = evaluate_word(o, &word)?;
    let holds = product == Mat2::diag(t)?;
    Ok(DiagDecomposition {
        t: t.clone(),
        word,
        product,
        holds,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct UnitCommutator {
    pub omega: QuadInt,
    pub lambda: QuadInt,
    /// Upper-right entry of `[upper(λ), diag(ω,ω⁻¹)]`, expected `(1−ω²)λ`.
    pub upper_first: QuadInt,
    /// Upper-right entry of `[diag(ω,ω⁻¹), upper(λ)]`, which is `(ω²−1)λ`.
    pub diag_first: QuadInt,
    pub holds: bool,
}

fn commutator2(x: &Mat2, y: &Mat2) -> Mat2 {
    x.mul(y).mul(&x.inverse_sl()).mul(&y.inverse_sl())
}

/// Check `[upper(λ), diag(ω,ω⁻¹)] = upper((1−ω²)λ)` with `[x,y] = xyx⁻¹y⁻¹`.
pub fn verify_unit_commutator(o: QuadOrder, omega: &QuadInt, lambda: &QuadInt) -> Result<UnitCommutator> {
    let d = Mat2::diag(omega)?;
    let u = Mat2::upper(lambda);
    let expected = o.one().sub(&omega.mul(omega)).mul(lambda);
    let uf = commutator2(&u, &d);
    let df = commutator2(&d, &u);
    let holds = uf == Mat2::upper(&expected);
    Ok(UnitCommutator {
        omega: omega.clone(),
        lambda: lambda.clone(),
        upper_first: uf.e[1].clone(),
        diag_first: df.e[1].clone(),
        holds,
    })
}

/// Hermite form of the Z-module spanned by integer row vectors of length 2.
pub fn hermite_2(rows: &[[BigInt; 2]]) -> Option<[[BigInt; 2]; 2]> {
    let mut rows: Vec<[BigInt; 2]> = rows.to_vec();
    let mut out: Vec<[BigInt; 2]> = Vec::new();
    for col in 0..2 {
        // Euclid on column `col` among the remaining rows.
        loop {
            let nz: Vec<usize> = (0..rows.len()).filter(|&i| !rows[i][col].is_zero()).collect();
            if nz.len() <= 1 {
                break;
            }
            let piv = *nz
                .iter()
                .min_by_key(|&&i| rows[i][col].abs())
                .expect("nonempty");
            for &i in &nz {
                if i == piv {
                    continue;
                }
                let q = rows[i][col].div_floor(&rows[piv][col]);
                let (p0, p1) = (rows[piv][0].clone(), rows[piv][1].clone());
                rows[i][0] -= &q * p0;
                rows[i][1] -= &q * p1;
            }
        }
        let piv = (0..rows.len()).find(|&i| !rows[i][col].is_zero())?;
        let mut r = rows.swap_remove(piv);
        if r[col].is_negative() {
            r = [-&r[0], -&r[1]];
        }
        out.push(r);
    }
    // Reduce the off-diagonal entry of the first row modulo the second pivot.
    let q = out[0][1].div_floor(&out[1][1]);
    let sub = &q * &out[1][1];
    out[0][1] -= sub;
    Some([out[0].clone(), out[1].clone()])
}

#[derive(Clone, Debug, Serialize)]
pub struct IdealZModule {
    pub generators: Vec<QuadInt>,
    /// Rows are coordinates in the basis `(1, ω)`.
    pub z_basis: [[String; 2]; 2],
    #[serde(serialize_with = "crate::serde_util::bigint_str")]
    pub index: BigInt,
}

pub fn ideal_module(o: QuadOrder, gens: &[QuadInt]) -> Result<IdealZModule> {
    let w = o.omega();
    let mut rows = Vec::new();
    for g in gens {
        let wg = w.mul(g);
        rows.push([g.a.clone(), g.b.clone()]);
        rows.push([wg.a, wg.b]);
    }
    let h = hermite_2(&rows).ok_or_else(|| Error::invalid("the zero ideal has infinite index"))?;
    let index = (&h[0][0] * &h[1][1]).abs();
    Ok(IdealZModule {
        generators: gens.to_vec(),
        z_basis: [
            [h[0][0].to_string(), h[0][1].to_string()],
            [h[1][0].to_string(), h[1][1].to_string()],
        ],
        index,
    })
}

/// `|O/I|` for the ideal generated by `gens`.
pub fn ideal_norm(o: QuadOrder, gens: &[QuadInt]) -> Result<BigInt> {
    Ok(ideal_module(o, gens)?.index)
}

#[derive(Clone, Debug, Serialize)]
pub struct StubbornWitness {
    pub unit: QuadInt,
    pub lambda: QuadInt,
    /// `|O/I|` for `I = (2(1−ω₀²))`.
    #[serde(serialize_with = "crate::serde_util::bigint_str")]
    pub ideal_index: BigInt,
    /// Exponent certified by the witness word: the least multiple of
    /// `ideal_index` with `k·λ ∈ (2(1−ω₀⁴))`.
    #[serde(serialize_with = "crate::serde_util::bigint_str")]
    pub k: BigInt,
    pub word: Vec<Mat2Letter>,
    pub evaluates: bool,
}

/// Exhibit `upper(λ)^k` as the commutator `[upper(2μ), diag(ω₀², ω₀⁻²)]`.
///
/// Those commutators realize exactly the upper unipotents with entry in
/// `2(1−ω₀⁴)·O`, which can be strictly smaller than `(2(1−ω₀²))`, so `k`
/// may be a proper multiple of the ideal index.
pub fn stubborn_witness(o: QuadOrder, lambda: &QuadInt) -> Result<StubbornWitness> {
    let u = fundamental_unit(o.d())?;
    let u2 = u.mul(&u);
    let i_gen = o.one().sub(&u2).scale(&BigInt::from(2));
    let ideal_index = ideal_norm(o, &[i_gen])?;
    if lambda.is_zero() {
        return Ok(StubbornWitness {
            unit: u,
            lambda: lambda.clone(),
            ideal_index,
            k: BigInt::one(),
            word: vec![],
            evaluates: true,
        });
    }
    let j_gen = o.one().sub(&u2.mul(&u2)).scale(&BigInt::from(2));
    let j_index = ideal_norm(o, &[j_gen.clone()])?;
    let mut k = ideal_index.clone();
    // j_index ∈ J, so some multiple of it works and the search is bounded.
    let bound = &ideal_index * &j_index;
    let mu = loop {
        if let Some(mu) = lambda.scale(&k).div_exact(&j_gen) {
            break mu;
        }
        k += &ideal_index;
        if k > bound {
            return Err(Error::Internal("no multiple of the ideal index lies in J".into()));
        }
    };
    let two_mu = mu.scale(&BigInt::from(2));
    let word = vec![
        Mat2Letter::Upper(two_mu.clone()),
        Mat2Letter::Diag(u2.clone()),
        Mat2Letter::Upper(two_mu.neg()),
        Mat2Letter::Diag(u2.inverse()?),
    ];
    let evaluates = evaluate_word(o, &word)? == Mat2::upper(&lambda.scale(&k));
    Ok(StubbornWitness {
        unit: u,
        lambda: lambda.clone(),
        ideal_index,
        k,
        word,
        evaluates,
    })
}

/// Units `±ω₀^j` for `j ∈ {−2, −1, 1, 2}`.
pub fn sample_units(o: QuadOrder) -> Result<Vec<QuadInt>> {
    let u = fundamental_unit(o.d())?;
    let ui = u.inverse()?;
    let mut out = Vec::new();
    for base in [u.clone(), u.mul(&u), ui.clone(), ui.mul(&ui)] {
        out.push(base.neg());
        out.push(base);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2() -> QuadOrder {
        QuadOrder::new(2).unwrap()
    }

    #[test]
    fn ring_basics() {
        let o = z2();
        assert_eq!(o.elem(1, 1).norm(), BigInt::from(-1));
        let x = o.elem(3, -7);
        assert_eq!(x.conj().conj(), x);
        assert!(o.zero().norm().is_zero());
        assert!(o.elem(2, 0).inverse().is_err());
        let f = QuadOrder::new(5).unwrap();
        let phi = f.omega();
        assert_eq!(phi.mul(&phi), phi.add(&f.one()));
        assert_eq!(phi.norm(), BigInt::from(-1));
        assert!(QuadOrder::new(8).is_err());
        assert!(QuadOrder::new(1).is_err());
    }

    /// Smallest unit > 1 by scanning `b`, independent of continued fractions.
    fn brute_unit(d: i64) -> (i64, i64) {
        let o = QuadOrder::new(d).unwrap();
        let mut best: Option<QuadInt> = None;
        for b in 1..2000i64 {
            for a in -4000i64..4000 {
                let x = o.elem(a, b);
                if x.norm().abs().is_one() && x.sub(&o.one()).real_sign() > 0 {
                    let better = best.as_ref().is_none_or(|y| x.sub(y).real_sign() < 0);
                    if better {
                        best = Some(x);
                    }
                }
            }
            if best.is_some() {
                break;
            }
        }
        let u = best.unwrap();
        (u.a.to_i64().unwrap(), u.b.to_i64().unwrap())
    }

    #[test]
    fn fundamental_units_match_scan() {
        assert_eq!(fundamental_unit(2).unwrap(), z2().elem(1, 1));
        let o5 = QuadOrder::new(5).unwrap();
        assert_eq!(fundamental_unit(5).unwrap(), o5.omega());
        for d in [2, 3, 5, 6, 7, 10, 11, 13, 14, 15, 17, 21] {
            let u = fundamental_unit(d).unwrap();
            assert!(u.is_unit());
            assert_eq!((u.a.to_i64().unwrap(), u.b.to_i64().unwrap()), brute_unit(d), "d={d}");
        }
        assert!(fundamental_unit(-1).is_err());
    }

    #[test]
    fn diag_words() {
        let o = z2();
        let t = o.elem(1, 1);
        let rep = verify_diag_decomposition(o, &t).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.word.len(), 6);
        assert_eq!(rep.product, Mat2::new(t.clone(), o.zero(), o.zero(), o.elem(-1, 1)));
        assert!(verify_diag_decomposition(o, &o.one()).unwrap().product == Mat2::identity(o));
        let m = verify_diag_decomposition(o, &o.int(-1)).unwrap();
        assert_eq!(m.product, Mat2::new(o.int(-1), o.zero(), o.zero(), o.int(-1)));
        assert!(verify_diag_decomposition(o, &o.int(3)).is_err());
    }

    #[test]
    fn unit_commutator() {
        let o = z2();
        let rep = verify_unit_commutator(o, &o.elem(1, 1), &o.one()).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.upper_first, o.elem(-2, -2));
        assert_eq!(rep.diag_first, o.elem(2, 2));
        let triv = verify_unit_commutator(o, &o.int(-1), &o.elem(5, 3)).unwrap();
        assert!(triv.holds && triv.upper_first.is_zero());
    }

    #[test]
    fn ideal_norms() {
        let o = z2();
        assert_eq!(ideal_norm(o, &[o.one()]).unwrap(), BigInt::one());
        assert_eq!(ideal_norm(o, &[o.int(2)]).unwrap(), BigInt::from(4));
        let g = o.elem(-4, -4);
        assert_eq!(g.norm().abs(), BigInt::from(16));
        assert_eq!(ideal_norm(o, &[g]).unwrap(), BigInt::from(16));
        assert!(ideal_norm(o, &[o.zero()]).is_err());
        // (2, √2) = (√2) has index 2.
        assert_eq!(ideal_norm(o, &[o.int(2), o.omega()]).unwrap(), BigInt::from(2));
    }

    #[test]
    fn stubborn() {
        let o = z2();
        let w = stubborn_witness(o, &o.one()).unwrap();
        assert_eq!(w.ideal_index, BigInt::from(16));
        assert_eq!(w.k, BigInt::from(16));
        assert!(w.evaluates);
        let z = stubborn_witness(o, &o.zero()).unwrap();
        assert!(z.k.is_one() && z.word.is_empty());
        let o3 = QuadOrder::new(3).unwrap();
        let w3 = stubborn_witness(o3, &o3.omega()).unwrap();
        assert_eq!(w3.ideal_index, BigInt::from(48));
        assert!(w3.evaluates);
        let o5 = QuadOrder::new(5).unwrap();
        let w5 = stubborn_witness(o5, &o5.one()).unwrap();
        assert_eq!(w5.ideal_index, BigInt::from(4));
        assert_eq!(w5.k, BigInt::from(20));
        assert!(w5.evaluates);
    }
}
