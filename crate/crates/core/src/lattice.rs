//! Heisenberg algebra, twisted group algebra `C[L]` and vertex operators on
//! `V[L] = S(h_-) (x) C[L]`.
//!
//! Vertex operators are `X(alpha,z) = e^alpha z^{alpha(0)} E^-(-alpha,z) E^+(-alpha,z)`
//! expanded as `sum_j X(alpha,j) z^{-j-1}`. The exponentials are never expanded as
//! series: only the coefficients compatible with the requested power are generated.

use std::borrow::Cow;
use std::fmt;
use std::sync::OnceLock;

use crate::lincomb::LinComb;
use crate::roots::{cocycle, LatticeVector, Parity};
use crate::weyl::Factors;
use crate::scalar::{GaussRational, Rational};

/// `heis (x) e^exponent`, with `heis` a sorted list of `(direction, level)` meaning
/// `eps_{direction+1}(-level)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeBasis {
    pub exponent: LatticeVector,
    pub heis: Factors,
}

pub type LatticeState = LinComb<LatticeBasis>;

impl LatticeBasis {
    pub fn vacuum(rank: usize) -> Self {
        LatticeBasis { exponent: LatticeVector::zero(rank), heis: Factors::new() }
    }

    pub fn charged(exponent: LatticeVector) -> Self {
        LatticeBasis { exponent, heis: Factors::new() }
    }

    pub fn with_heis(exponent: LatticeVector, mut heis: Vec<(u16, u16)>) -> Self {
        heis.sort_unstable();
        LatticeBasis { exponent, heis: Factors::from_vec(heis) }
    }

    pub fn energy(&self) -> u32 {
        self.heis.iter().map(|&(_, l)| l as u32).sum()
    }

    pub fn max_level(&self) -> u16 {
        self.heis.iter().map(|&(_, l)| l).max().unwrap_or(0)
    }

    pub fn parity(&self) -> Parity {
        self.exponent.parity()
    }

    fn with_factor(&self, dir: u16, level: u16) -> Self {
        let mut h = self.heis.clone();
        let pos = h.partition_point(|&x| x < (dir, level));
        h.insert(pos, (dir, level));
        LatticeBasis { exponent: self.exponent.clone(), heis: h }
    }

    fn without_index(&self, idx: usize) -> Self {
        let mut h = self.heis.clone();
        h.remove(idx);
        LatticeBasis { exponent: self.exponent.clone(), heis: h }
    }

    pub fn render(&self) -> String {
        let mut parts: Vec<String> = self.heis.iter().map(|&(d, l)| format!("h{}(-{l})", d + 1)).collect();
        parts.push(format!("e^{}", self.exponent));
        parts.join(" ")
    }
}

impl fmt::Display for LatticeBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn multiply_creator(alpha: &LatticeVector, level: u16, b: &LatticeBasis, c: &GaussRational, out: &mut LatticeState) {
    for (d, &a) in alpha.0.iter().enumerate() {
        if a != 0 {
            out.add_term(b.with_factor(d as u16, level), c.scale_int(a));
        }
    }
}

/// `alpha(k)` with `k > 0` as the derivation `alpha(k) beta(-l) = delta_{kl} k (alpha,beta)`.
fn derive(alpha: &LatticeVector, k: u16, b: &LatticeBasis, c: &GaussRational, out: &mut LatticeState) {
    for (idx, &(d, l)) in b.heis.iter().enumerate() {
        if l != k {
            continue;
        }
        let a = alpha.0[d as usize];
        if a != 0 {
            out.add_term(b.without_index(idx), c.scale_int(a * k as i64));
        }
    }
}

/// `alpha(k)` on a basis vector.
pub fn heis_apply_basis(alpha: &LatticeVector, k: i64, b: &LatticeBasis) -> LatticeState {
    let mut out = LatticeState::zero();
    let one = GaussRational::one();
    if k < 0 {
        multiply_creator(alpha, (-k) as u16, b, &one, &mut out);
    } else if k == 0 {
        out.add_term(b.clone(), GaussRational::from_int(alpha.dot(&b.exponent)));
    } else if k as u32 <= b.max_level() as u32 {
        derive(alpha, k as u16, b, &one, &mut out);
    }
    out
}

pub fn heis_apply(alpha: &LatticeVector, k: i64, s: &LatticeState) -> LatticeState {
    s.map_linear(|b| heis_apply_basis(alpha, k, b))
}

/// Left multiplication by `e^alpha` in the twisted group algebra.
pub fn group_apply_basis(alpha: &LatticeVector, b: &LatticeBasis) -> LatticeState {
    let sign = cocycle(alpha, &b.exponent);
    let next = LatticeBasis { exponent: alpha.add(&b.exponent), heis: b.heis.clone() };
    LatticeState::term(next, GaussRational::from_int(sign))
}

pub fn group_apply(alpha: &LatticeVector, s: &LatticeState) -> LatticeState {
    s.map_linear(|b| group_apply_basis(alpha, b))
}

/// Partitions of `total` as `(part, multiplicity)` lists.
fn partitions(total: u32) -> Vec<Vec<(u16, u32)>> {
    fn rec(rest: u32, max_part: u32, acc: &mut Vec<(u16, u32)>, out: &mut Vec<Vec<(u16, u32)>>) {
        if rest == 0 {
            out.push(acc.clone());
            return;
        }
        for part in (1..=max_part.min(rest)).rev() {
            for mult in (1..=rest / part).rev() {
                acc.push((part as u16, mult));
                rec(rest - part * mult, part - 1, acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(total, total, &mut Vec::new(), &mut out);
    out
}

const PARTITION_TABLE: u32 = 24;

fn partitions_cached(total: u32) -> Cow<'static, [Vec<(u16, u32)>]> {
    static TABLE: OnceLock<Vec<Vec<Vec<(u16, u32)>>>> = OnceLock::new();
    if total > PARTITION_TABLE {
        return Cow::Owned(partitions(total));
    }
    let table = TABLE.get_or_init(|| (0..=PARTITION_TABLE).map(partitions).collect());
    Cow::Borrowed(&table[total as usize])
}

fn factorial(n: u32) -> i64 {
    (1..=n as i64).product()
}

/// Coefficient of `z^{-M}` in `E^+(-alpha,z) = exp(-sum_{k>0} alpha(k) z^{-k}/k)` applied to `b`.
fn e_plus_coefficient(alpha: &LatticeVector, total: u32, b: &LatticeBasis) -> LatticeState {
    let mut out = LatticeState::zero();
    for part in partitions_cached(total).iter() {
        let mut cur = LatticeState::basis(b.clone());
        let mut scale = Rational::one();
        for &(k, mult) in part {
            // (-1/k)^mult / mult!
            let denom = (k as i64).pow(mult) * factorial(mult);
            let num = if mult % 2 == 0 { 1 } else { -1 };
            scale = &scale * &Rational::new(num, denom);
            for _ in 0..mult {
                let mut next = LatticeState::zero();
                for (t, c) in cur.iter() {
                    derive(alpha, k, t, c, &mut next);
                }
                cur = next;
                if cur.is_zero() {
                    break;
                }
            }
            if cur.is_zero() {
                break;
            }
        }
        out.add_scaled(&cur, &scale.into());
    }
    out
}

/// Coefficient of `z^N` in `E^-(-alpha,z) = exp(sum_{k>0} alpha(-k) z^k/k)` applied to `s`.
fn e_minus_coefficient(alpha: &LatticeVector, total: u32, s: &LatticeState) -> LatticeState {
    let mut out = LatticeState::zero();
    for part in partitions_cached(total).iter() {
        let mut cur = s.clone();
        let mut scale = Rational::one();
        for &(k, mult) in part {
            let denom = (k as i64).pow(mult) * factorial(mult);
            scale = &scale * &Rational::new(1, denom);
            for _ in 0..mult {
                let mut next = LatticeState::zero();
                for (t, c) in cur.iter() {
                    multiply_creator(alpha, k, t, c, &mut next);
                }
                cur = next;
            }
        }
        out.add_scaled(&cur, &scale.into());
    }
    out
}

/// Largest `j` with `X(alpha,j) b` possibly nonzero.
pub fn vertex_bound(alpha: &LatticeVector, b: &LatticeBasis) -> i64 {
    b.energy() as i64 - 1 - alpha.dot(&b.exponent)
}

/// `E^+(-alpha,z)` coefficients of `z^{-M}` on `b` for `M = 0..=energy(b)`; shared by all
/// components of `X(alpha,z)` on `b`.
pub fn vertex_annihilation_parts(alpha: &LatticeVector, b: &LatticeBasis) -> Vec<LatticeState> {
    (0..=b.energy()).map(|m| e_plus_coefficient(alpha, m, b)).collect()
}

/// The component `X(alpha,j)` applied to a basis vector.
pub fn vertex_component_basis(alpha: &LatticeVector, j: i64, b: &LatticeBasis) -> LatticeState {
    if j > vertex_bound(alpha, b) {
        return LatticeState::zero();
    }
    vertex_component_from_parts(alpha, j, b, &vertex_annihilation_parts(alpha, b))
}

/// `X(alpha,j) b` from precomputed [`vertex_annihilation_parts`].
pub fn vertex_component_from_parts(alpha: &LatticeVector, j: i64, b: &LatticeBasis, parts: &[LatticeState]) -> LatticeState {
    let mut out = LatticeState::zero();
    let pairing = alpha.dot(&b.exponent);
    if j > vertex_bound(alpha, b) {
        return out;
    }
    let sign = GaussRational::from_int(cocycle(alpha, &b.exponent));
    let shifted = alpha.add(&b.exponent);
    for (removed, after_plus) in parts.iter().enumerate() {
        // z-power: pairing + added - removed = -j - 1
        let added = removed as i64 - 1 - pairing - j;
        if added < 0 || after_plus.is_zero() {
            continue;
        }
        let after_minus = e_minus_coefficient(alpha, added as u32, after_plus);
        for (t, c) in after_minus.iter() {
            let moved = LatticeBasis { exponent: shifted.clone(), heis: t.heis.clone() };
            out.add_term(moved, c * &sign);
        }
    }
    out
}

/// `E^-(-alpha,z)` coefficient of `z^N` as a list of creator monomials.
pub fn creation_polynomial(alpha: &LatticeVector, total: u32) -> Vec<(Factors, GaussRational)> {
    let vac = LatticeState::basis(LatticeBasis::vacuum(alpha.rank()));
    e_minus_coefficient(alpha, total, &vac).iter().map(|(b, c)| (b.heis.clone(), c.clone())).collect()
}

/// Multiset union of two sorted creator lists.
pub fn merge_heis(a: &Factors, b: &Factors) -> Factors {
    let mut out = Factors::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

pub fn vertex_component_apply(alpha: &LatticeVector, j: i64, s: &LatticeState) -> LatticeState {
    s.map_linear(|b| vertex_component_basis(alpha, j, b))
}
