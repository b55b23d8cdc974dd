//! Distinguished root data of the affine superalgebra `D(m,n)^(1)`.
//!
//! Everything lives in one orthonormal ambient space with basis
//! `eps_0 .. eps_{n+m+1}`; the negative-norm directions are
//! `delta_k = i * eps_{n+k}`, so a single bilinear form yields the super form
//! on roots, the positive form on the lattice and the form on `P`.

use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::{smallvec, SmallVec};
use thiserror::Error;

use crate::scalar::GaussRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("type D(m,n) requires m>1 (got m={0})")]
    RankM(i64),
    #[error("type D(m,n) requires n>=1 (got n={0})")]
    RankN(i64),
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_bit(b: i64) -> Self {
        if b.rem_euclid(2) == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    pub fn bit(self) -> u8 {
        self as u8
    }
}

impl std::ops::Add for Parity {
    type Output = Parity;
    fn add(self, rhs: Parity) -> Parity {
        Parity::from_bit((self.bit() + rhs.bit()) as i64)
    }
}

/// Koszul sign `(-1)^{p(a)p(b)}`.
pub fn koszul(a: Parity, b: Parity) -> i64 {
    if a.is_odd() && b.is_odd() {
        -1
    } else {
        1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AmbientVector(pub Vec<GaussRational>);

impl AmbientVector {
    pub fn zero(dim: usize) -> Self {
        AmbientVector(vec![GaussRational::zero(); dim])
    }

    pub fn basis(dim: usize, a: usize) -> Self {
        let mut v = Self::zero(dim);
        v.0[a] = GaussRational::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn add(&self, other: &Self) -> Self {
        AmbientVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        AmbientVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: &GaussRational) -> Self {
        AmbientVector(self.0.iter().map(|a| a * c).collect())
    }
}

/// Standard orthonormal ambient form, bilinear (no conjugation).
pub fn super_form(x: &AmbientVector, y: &AmbientVector) -> Result<GaussRational, ConfigError> {
    if x.dim() != y.dim() {
        return Err(ConfigError::Dimension(x.dim(), y.dim()));
    }
    let mut acc = GaussRational::zero();
    for (a, b) in x.0.iter().zip(&y.0) {
        if !a.is_zero() && !b.is_zero() {
            acc += &(a * b);
        }
    }
    Ok(acc)
}

/// Element of `L = Z eps_1 + ... + Z eps_{m+n}`; `coeffs[k]` is the coefficient of `eps_{k+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticeVector(pub Coords);

/// Inline storage for lattice coordinates.
pub type Coords = SmallVec<[i64; 6]>;

impl LatticeVector {
    pub fn zero(rank: usize) -> Self {
        LatticeVector(smallvec![0; rank])
    }

    /// `eps_a`, one-based like the lattice basis.
    pub fn eps(rank: usize, a: usize) -> Self {
        let mut v = Self::zero(rank);
        v.0[a - 1] = 1;
        v
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn dot(&self, other: &Self) -> i64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> i64 {
        self.dot(self)
    }

    pub fn parity(&self) -> Parity {
        Parity::from_bit(self.norm())
    }

    pub fn add(&self, other: &Self) -> Self {
        LatticeVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn neg(&self) -> Self {
        LatticeVector(self.0.iter().map(|a| -a).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// The lattice two-cocycle: `F(eps_i, eps_j) = 1` if `i <= j`, `-1` otherwise,
/// extended bimultiplicatively.
pub fn cocycle(alpha: &LatticeVector, beta: &LatticeVector) -> i64 {
    // exponent of -1 is sum over i > j of alpha_i beta_j
    let mut prefix = 0i64;
    let mut exponent = 0i64;
    for (a, b) in alpha.0.iter().zip(&beta.0) {
        exponent += a * prefix;
        prefix += b;
    }
    if exponent.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Element of `C = P + P*`. `coords` are over the basis `(cbar, eps_1, ..., eps_{n+m})` of `P`;
/// `star` selects the dual copy.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CVector {
    pub coords: Vec<GaussRational>,
    pub star: bool,
}

impl CVector {
    /// Basis element; `a = 0` is `cbar`, `a >= 1` is `eps_a`.
    pub fn basis(rank: usize, a: usize, star: bool) -> Self {
        let mut coords = vec![GaussRational::zero(); rank + 1];
        coords[a] = GaussRational::one();
        CVector { coords, star }
    }

    /// `beta = -cbar + eps_1`.
    pub fn beta(rank: usize, star: bool) -> Self {
        let mut v = Self::basis(rank, 1, star);
        v.coords[0] = GaussRational::from_int(-1);
        v
    }

    /// Nonzero `(P-basis index, coefficient)` pairs.
    pub fn support(&self) -> impl Iterator<Item = (usize, &GaussRational)> {
        self.coords.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }
}

/// Form on `P` in the basis `(cbar, eps_1, ...)`: `cbar` is isotropic and orthogonal to all `eps_i`.
pub fn p_form_basis(a: usize, b: usize) -> i64 {
    if a == b && a != 0 {
        1
    } else {
        0
    }
}

/// Antisymmetric pairing of basis elements of `C`.
pub fn c_pairing_basis(a: usize, a_star: bool, b: usize, b_star: bool) -> i64 {
    match (a_star, b_star) {
        (true, false) => p_form_basis(a, b),
        (false, true) => -p_form_basis(a, b),
        _ => 0,
    }
}

/// `<b*, a> = (a, b) = -<a, b*>`, `<a, b> = <a*, b*> = 0`.
pub fn c_pairing(u: &CVector, v: &CVector) -> GaussRational {
    let mut acc = GaussRational::zero();
    for (a, x) in u.support() {
        for (b, y) in v.support() {
            let s = c_pairing_basis(a, u.star, b, v.star);
            if s != 0 {
                acc += &(x * y).scale_int(s);
            }
        }
    }
    acc
}

#[derive(Debug, Clone)]
pub struct RootSystem {
    pub m: usize,
    pub n: usize,
    pub simple_roots: Vec<AmbientVector>,
    pub theta: AmbientVector,
    pub cbar: AmbientVector,
    pub beta: AmbientVector,
    pub d: Vec<i64>,
    pub cartan: Vec<Vec<i64>>,
    pub parity: Vec<Parity>,
    gram: Vec<Vec<i64>>,
}

impl RootSystem {
    pub fn build(m: i64, n: i64) -> Result<Self, ConfigError> {
        if m < 2 {
            return Err(ConfigError::RankM(m));
        }
        if n < 1 {
            return Err(ConfigError::RankN(n));
        }
        let (m, n) = (m as usize, n as usize);
        let dim = n + m + 2;
        let eps = |a: usize| AmbientVector::basis(dim, a);
        let delta = |k: usize| eps(n + k).scale(&GaussRational::i());

        let mut simple = Vec::with_capacity(m + n + 1);
        let theta = eps(1).scale(&GaussRational::from_int(2));
        let cbar = eps(0).add(&delta(m + 1));
        simple.push(cbar.sub(&theta));
        for i in 1..n {
            simple.push(eps(i).sub(&eps(i + 1)));
        }
        simple.push(eps(n).sub(&delta(1)));
        for k in 1..m {
            simple.push(delta(k).sub(&delta(k + 1)));
        }
        simple.push(delta(m - 1).add(&delta(m)));
        let beta = eps(1).sub(&cbar);

        let mut d = vec![2i64];
        d.extend(std::iter::repeat_n(1, n));
        d.extend(std::iter::repeat_n(-1, m));

        let size = m + n + 1;
        let mut gram = vec![vec![0i64; size]; size];
        for i in 0..size {
            for j in 0..size {
                let v = super_form(&simple[i], &simple[j]).expect("same dimension");
                assert!(v.is_real() && v.re.is_integer(), "root form must be integral");
                gram[i][j] = v.re.to_i64().expect("small integer");
            }
        }
        let mut cartan = vec![vec![0i64; size]; size];
        for i in 0..size {
            for j in 0..size {
                assert_eq!(gram[i][j] % d[i], 0, "d_i must divide (alpha_i|alpha_j)");
                cartan[i][j] = gram[i][j] / d[i];
            }
        }
        let parity = (0..size)
            .map(|i| if i == n { Parity::Odd } else { Parity::Even })
            .collect();
        Ok(RootSystem {
            m,
            n,
            simple_roots: simple,
            theta,
            cbar,
            beta,
            d,
            cartan,
            parity,
            gram,
        })
    }

    /// Rank of the lattice `L`, i.e. `m + n`.
    pub fn rank(&self) -> usize {
        self.m + self.n
    }

    /// Number of Chevalley nodes, `m + n + 1`.
    pub fn nodes(&self) -> usize {
        self.m + self.n + 1
    }

    /// `(alpha_i | alpha_j)`.
    pub fn root_form(&self, i: usize, j: usize) -> i64 {
        self.gram[i][j]
    }

    pub fn is_isotropic(&self, i: usize) -> bool {
        self.gram[i][i] == 0
    }

    pub fn ambient_dim(&self) -> usize {
        self.n + self.m + 2
    }

    /// Number of Weyl generators, a basis of `C`.
    pub fn weyl_generators(&self) -> usize {
        2 * (self.rank() + 1)
    }
}

/// Index of a basis generator of `C` in `0..2(rank+1)`: `P` first, then `P*`.
pub fn weyl_gen_index(rank: usize, a: usize, star: bool) -> usize {
    a + if star { rank + 1 } else { 0 }
}

/// Inverse of [`weyl_gen_index`].
pub fn weyl_gen_split(rank: usize, g: usize) -> (usize, bool) {
    if g > rank {
        (g - rank - 1, true)
    } else {
        (g, false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_m() {
        assert_eq!(RootSystem::build(1, 1).unwrap_err(), ConfigError::RankM(1));
        assert_eq!(RootSystem::build(2, 0).unwrap_err(), ConfigError::RankN(0));
    }

    #[test]
    fn odd_row_for_2_2() {
        let sys = RootSystem::build(2, 2).unwrap();
        assert_eq!(sys.cartan[2], vec![0, -1, 0, 1, 1]);
        assert_eq!(sys.d, vec![2, 1, 1, -1, -1]);
    }

    #[test]
    fn affine_corner() {
        for (m, n) in [(2, 1), (2, 2), (3, 1), (4, 3)] {
            let sys = RootSystem::build(m, n).unwrap();
            assert_eq!(sys.cartan[0][0], 2);
            assert_eq!(sys.cartan[0][1], -1);
            assert_eq!(sys.cartan[1][0], -2);
        }
    }

    #[test]
    fn symmetrized_cartan_matches_form() {
        for (m, n) in [(2, 1), (2, 2), (3, 1), (3, 3), (5, 2)] {
            let sys = RootSystem::build(m, n).unwrap();
            for i in 0..sys.nodes() {
                for j in 0..sys.nodes() {
                    let f = super_form(&sys.simple_roots[i], &sys.simple_roots[j]).unwrap();
                    assert_eq!(f, GaussRational::from_int(sys.d[i] * sys.cartan[i][j]));
                }
            }
        }
    }

    #[test]
    fn fork_and_odd_node() {
        for (m, n) in [(2, 1), (3, 2), (4, 1)] {
            let sys = RootSystem::build(m, n).unwrap();
            let (m, n) = (m as usize, n as usize);
            let last = m + n;
            assert_eq!(sys.cartan[n][n], 0);
            assert_eq!(sys.cartan[last - 1][last], 0);
            assert_eq!(sys.cartan[last][last - 1], 0);
            // for m = 2 the fork sits on the odd node
            let fork = if m == 2 { 1 } else { -1 };
            assert_eq!(sys.cartan[last - 2][last - 1], fork);
            assert_eq!(sys.cartan[last - 2][last], fork);
            assert_eq!(sys.cartan[last][last - 2], -1);
            for i in 0..sys.nodes() {
                assert_eq!(sys.parity[i].is_odd(), i == n);
            }
        }
    }

    #[test]
    fn special_vectors() {
        let sys = RootSystem::build(3, 2).unwrap();
        let one = GaussRational::one();
        assert_eq!(super_form(&sys.beta, &sys.beta).unwrap(), one);
        let dim = sys.ambient_dim();
        for i in 1..=sys.rank() {
            let expect = if i == 1 { one.clone() } else { GaussRational::zero() };
            // (beta|eps_i) for the P-directions eps_1..eps_{n+m}
            assert_eq!(super_form(&sys.beta, &AmbientVector::basis(dim, i)).unwrap(), expect);
        }
        assert_eq!(super_form(&sys.simple_roots[0], &sys.simple_roots[0]).unwrap(), GaussRational::from_int(4));
        assert_eq!(sys.simple_roots[0], sys.cbar.sub(&sys.theta));
        let d1 = AmbientVector::basis(dim, 3).scale(&GaussRational::i());
        let d2 = AmbientVector::basis(dim, 4).scale(&GaussRational::i());
        let r = d1.sub(&d2);
        assert_eq!(super_form(&r, &r).unwrap(), GaussRational::from_int(-2));
        assert!(super_form(&sys.cbar, &sys.cbar).unwrap().is_zero());
    }

    #[test]
    fn form_dimension_mismatch() {
        let e = super_form(&AmbientVector::zero(3), &AmbientVector::zero(4));
        assert_eq!(e, Err(ConfigError::Dimension(3, 4)));
    }

    #[test]
    fn cocycle_examples() {
        let e = |a| LatticeVector::eps(3, a);
        assert_eq!(cocycle(&e(1), &e(2)), 1);
        assert_eq!(cocycle(&e(2), &e(1)), -1);
        assert_eq!(cocycle(&e(1).add(&e(2)), &e(1)), -1);
        let a = LatticeVector(smallvec![2, -1, 3]);
        assert_eq!(cocycle(&a, &LatticeVector::zero(3)), 1);
        assert_eq!(cocycle(&LatticeVector::zero(3), &a), 1);
    }

    fn ball(rank: usize, radius: i64) -> Vec<LatticeVector> {
        let mut out = vec![LatticeVector::zero(rank)];
        for k in 0..rank {
            let mut next = Vec::new();
            for v in &out {
                for c in -radius..=radius {
                    let mut w = v.clone();
                    w.0[k] = c;
                    if w.norm() <= radius * radius {
                        next.push(w);
                    }
                }
            }
            out = next;
        }
        out
    }

    #[test]
    fn cocycle_bimultiplicative() {
        let pts: Vec<_> = ball(3, 2).into_iter().filter(|v| v.norm() <= 3).collect();
        for a in &pts {
            for b in &pts {
                for c in &pts {
                    assert_eq!(cocycle(&a.add(b), c), cocycle(a, c) * cocycle(b, c));
                    assert_eq!(cocycle(c, &a.add(b)), cocycle(c, a) * cocycle(c, b));
                }
            }
        }
    }

    #[test]
    fn cocycle_commutator_is_super_sign() {
        let pts = ball(3, 2);
        for a in &pts {
            for b in &pts {
                let e = a.dot(b) + a.norm() * b.norm();
                let expect = if e.rem_euclid(2) == 0 { 1 } else { -1 };
                assert_eq!(cocycle(a, b) * cocycle(b, a), expect);
            }
        }
    }

    #[test]
    fn c_pairing_examples() {
        let r = 3;
        let e1 = CVector::basis(r, 1, false);
        let e1s = CVector::basis(r, 1, true);
        assert_eq!(c_pairing(&e1s, &e1), GaussRational::one());
        assert_eq!(c_pairing(&e1, &e1s), GaussRational::from_int(-1));
        assert!(c_pairing(&CVector::beta(r, true), &e1s).is_zero());
        // cbar lies in the radical
        let c = CVector::basis(r, 0, false);
        let cs = CVector::basis(r, 0, true);
        for a in 0..=r {
            for star in [false, true] {
                let v = CVector::basis(r, a, star);
                assert!(c_pairing(&c, &v).is_zero());
                assert!(c_pairing(&cs, &v).is_zero());
            }
        }
    }

    #[test]
    fn c_pairing_antisymmetric() {
        let r = 3;
        for a in 0..=r {
            for b in 0..=r {
                for sa in [false, true] {
                    for sb in [false, true] {
                        let u = CVector::basis(r, a, sa);
                        let v = CVector::basis(r, b, sb);
                        assert_eq!(c_pairing(&u, &v), -c_pairing(&v, &u));
                    }
                }
            }
        }
    }
}
