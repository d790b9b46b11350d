//! Concrete groups whose elements can be multiplied, inverted, and compared
//! exactly: permutations, matrices over Z/m, free groups, and Z.

use std::fmt;
use std::hash::Hash;

use crate::error::{Error, Result};

pub trait GroupElement: Clone + Eq + Hash + Ord + Send + Sync + fmt::Debug {
    fn mul(&self, other: &Self) -> Self;
    fn inverse(&self) -> Self;
    /// Identity of the same group (same size, modulus or rank).
    fn identity_like(&self) -> Self;
    fn label(&self) -> String;

    fn is_identity(&self) -> bool {
        *self == self.identity_like()
    }
}

/// A permutation of `0..n`, acting on the right: `(p·q)(i) = q(p(i))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(pub Vec<u32>);

impl Perm {
    pub fn new(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            let v = v as usize;
            if v >= n || seen[v] {
                return Err(Error::invalid("not a permutation"));
            }
            seen[v] = true;
        }
        Ok(Perm(images))
    }

    pub fn identity(n: usize) -> Self {
        Perm((0..n as u32).collect())
    }

    pub fn apply(&self, i: u32) -> u32 {
        self.0[i as usize]
    }
}

impl GroupElement for Perm {
    fn mul(&self, other: &Self) -> Self {
        Perm(self.0.iter().map(|&i| other.0[i as usize]).collect())
    }

    fn inverse(&self) -> Self {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v as usize] = i as u32;
        }
        Perm(inv)
    }

    fn identity_like(&self) -> Self {
        Perm::identity(self.0.len())
    }

    fn label(&self) -> String {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        format!("[{}]", parts.join(","))
    }
}

/// An `n×n` matrix over `Z/m`, entries reduced into `0..m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModMatrix {
    pub modulus: u64,
    pub n: usize,
    pub entries: Vec<u64>,
}

impl ModMatrix {
    pub fn new(modulus: u64, n: usize, entries: &[i64]) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::invalid("modulus must be at least 2"));
        }
        if entries.len() != n * n {
            return Err(Error::invalid("entry count must be n*n"));
        }
        let m = modulus as i64;
        Ok(ModMatrix {
            modulus,
            n,
            entries: entries.iter().map(|&e| e.rem_euclid(m) as u64).collect(),
        })
    }

    pub fn identity(modulus: u64, n: usize) -> Self {
        let mut entries = vec![0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1 % modulus;
        }
        ModMatrix {
            modulus,
            n,
            entries,
        }
    }

    /// `I + t·E_{ij}`.
    pub fn elementary(modulus: u64, n: usize, i: usize, j: usize, t: i64) -> Self {
        let mut m = Self::identity(modulus, n);
        m.entries[i * n + j] = (m.entries[i * n + j] as i64 + t).rem_euclid(modulus as i64) as u64;
        m
    }

    pub fn det(&self) -> u64 {
        // Cofactor expansion; only small n is ever used.
        fn det_rec(m: &[u64], n: usize, p: u64) -> u64 {
            if n == 1 {
                return m[0] % p;
            }
            let mut acc = 0u64;
            for c in 0..n {
                let mut minor = Vec::with_capacity((n - 1) * (n - 1));
                for r in 1..n {
                    for k in 0..n {
                        if k != c {
                            minor.push(m[r * n + k]);
                        }
                    }
                }
                let term = (m[c] as u128 * det_rec(&minor, n - 1, p) as u128 % p as u128) as u64;
                acc = if c % 2 == 0 {
                    (acc + term) % p
                } else {
                    (acc + p - term) % p
                };
            }
            acc
        }
        det_rec(&self.entries, self.n, self.modulus)
    }
}

fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    (r == 1).then(|| t.rem_euclid(m as i128) as u64)
}

impl GroupElement for ModMatrix {
    fn mul(&self, o: &Self) -> Self {
        let n = self.n;
        let m = self.modulus as u128;
        let mut entries = vec![0u64; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0u128;
                for k in 0..n {
                    acc += self.entries[i * n + k] as u128 * o.entries[k * n + j] as u128;
                }
                entries[i * n + j] = (acc % m) as u64;
            }
        }
        ModMatrix {
            modulus: self.modulus,
            n,
            entries,
        }
    }

    /// Inverse by Gauss–Jordan elimination over `Z/m`.
    ///
    /// Panics when the matrix is not invertible; callers construct group
    /// elements only from invertible generators.
    fn inverse(&self) -> Self {
        let n = self.n;
        let p = self.modulus;
        let mut a = self.entries.clone();
        let mut inv = Self::identity(p, n).entries;
        for col in 0..n {
            let piv = (col..n)
                .find(|&r| mod_inverse(a[r * n + col], p).is_some())
                .expect("matrix is invertible over Z/m");
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
                inv.swap(col * n + k, piv * n + k);
            }
            let s = mod_inverse(a[col * n + col], p).expect("unit pivot");
            for k in 0..n {
                a[col * n + k] = (a[col * n + k] as u128 * s as u128 % p as u128) as u64;
                inv[col * n + k] = (inv[col * n + k] as u128 * s as u128 % p as u128) as u64;
            }
            for r in 0..n {
                if r == col || a[r * n + col] == 0 {
                    continue;
                }
                let f = a[r * n + col];
                for k in 0..n {
                    let sub_a = (f as u128 * a[col * n + k] as u128 % p as u128) as u64;
                    a[r * n + k] = (a[r * n + k] + p - sub_a) % p;
                    let sub_i = (f as u128 * inv[col * n + k] as u128 % p as u128) as u64;
                    inv[r * n + k] = (inv[r * n + k] + p - sub_i) % p;
                }
            }
        }
        ModMatrix {
            modulus: p,
            n,
            entries: inv,
        }
    }

    fn identity_like(&self) -> Self {
        Self::identity(self.modulus, self.n)
    }

    fn label(&self) -> String {
        let rows: Vec<String> = self
            .entries
            .chunks(self.n)
            .map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
            .collect();
        format!("[{}]", rows.join(";"))
    }
}

/// A reduced word in a free group; letter `k > 0` is generator `k`, `−k` its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeWord {
    pub rank: u32,
    pub letters: Vec<i32>,
}

impl FreeWord {
    pub fn identity(rank: u32) -> Self {
        FreeWord {
            rank,
            letters: vec![],
        }
    }

    pub fn generator(rank: u32, k: i32) -> Result<Self> {
        if k == 0 || k.unsigned_abs() > rank {
            return Err(Error::invalid(format!("no generator {k} in a free group of rank {rank}")));
        }
        Ok(FreeWord {
            rank,
            letters: vec![k],
        })
    }

    /// `{a_1^{±1}, …, a_r^{±1}}`.
    pub fn symmetric_generators(rank: u32) -> Vec<Self> {
        (1..=rank as i32)
            .flat_map(|k| [k, -k])
            .map(|k| FreeWord {
                rank,
                letters: vec![k],
            })
            .collect()
    }
}

impl GroupElement for FreeWord {
    fn mul(&self, other: &Self) -> Self {
        let mut letters = self.letters.clone();
        for &l in &other.letters {
            if letters.last() == Some(&-l) {
                letters.pop();
            } else {
                letters.push(l);
            }
        }
        FreeWord {
            rank: self.rank,
            letters,
        }
    }

    fn inverse(&self) -> Self {
        FreeWord {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|l| -l).collect(),
        }
    }

    fn identity_like(&self) -> Self {
        FreeWord::identity(self.rank)
    }

    fn label(&self) -> String {
        if self.letters.is_empty() {
            return "e".into();
        }
        self.letters
            .iter()
            .map(|&l| {
                if l > 0 {
                    format!("a{l}")
                } else {
                    format!("A{}", -l)
                }
            })
            .collect::<Vec<_>>()
            .join("")
    }
}

/// The additive group of integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntZ(pub i64);

impl GroupElement for IntZ {
    fn mul(&self, other: &Self) -> Self {
        IntZ(self.0 + other.0)
    }

    fn inverse(&self) -> Self {
        IntZ(-self.0)
    }

    fn identity_like(&self) -> Self {
        IntZ(0)
    }

    fn label(&self) -> String {
        self.0.to_string()
    }
}

/// All elements of the group generated by `gens`, in BFS order from the identity.
pub fn enumerate_group<G: GroupElement>(identity: &G, gens: &[G], max_elements: usize) -> Result<Vec<G>> {
    let mut seen = std::collections::HashSet::new();
    let mut order = vec![identity.clone()];
    seen.insert(identity.clone());
    let mut i = 0;
    while i < order.len() {
        let x = order[i].clone();
        for g in gens.iter().flat_map(|g| [g.clone(), g.inverse()]) {
            let y = x.mul(&g);
            if seen.insert(y.clone()) {
                if order.len() >= max_elements {
                    return Err(Error::Budget(format!(
                        "group has more than {max_elements} elements"
                    )));
                }
                order.push(y);
            }
        }
        i += 1;
    }
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perm_law() {
        let p = Perm::new(vec![1, 2, 0]).unwrap();
        assert_eq!(p.mul(&p.inverse()), Perm::identity(3));
        assert!(Perm::new(vec![0, 0]).is_err());
    }

    #[test]
    fn sl2_mod3_order() {
        let u = ModMatrix::elementary(3, 2, 0, 1, 1);
        let l = ModMatrix::elementary(3, 2, 1, 0, 1);
        let g = enumerate_group(&ModMatrix::identity(3, 2), &[u.clone(), l], 1000).unwrap();
        assert_eq!(g.len(), 24);
        assert!(g.iter().all(|m| m.det() == 1));
        assert_eq!(u.mul(&u.inverse()), ModMatrix::identity(3, 2));
    }

    #[test]
    fn free_reduction() {
        let a = FreeWord::generator(2, 1).unwrap();
        let b = FreeWord::generator(2, 2).unwrap();
        let w = a.mul(&b).mul(&b.inverse()).mul(&a.inverse());
        assert!(w.is_identity());
        assert_eq!(a.mul(&b).label(), "a1a2");
    }
}
