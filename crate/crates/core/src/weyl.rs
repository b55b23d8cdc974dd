//! The Weyl algebra of modes `u(k)`, `u` in `C = P + P*`, on its Fock space.
//!
//! Modes obey `[u(k), v(l)] = <u,v> delta_{k+l,-1}`: creators are `u(k)` with
//! `k <= -1`, annihilators `u(k)` with `k >= 0`.

use std::collections::BTreeMap;
use std::fmt;

use smallvec::SmallVec;

use crate::lincomb::LinComb;
use crate::roots::{c_pairing_basis, weyl_gen_index, weyl_gen_split, CVector};
use crate::scalar::GaussRational;

/// Creation monomial `prod g(-level)` applied to the vacuum; factors sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct WeylMonomial(pub Factors);

/// Sorted `(generator or direction, level)` pairs stored inline.
pub type Factors = SmallVec<[(u16, u16); 4]>;

pub type WeylState = LinComb<WeylMonomial>;

impl WeylMonomial {
    pub fn vacuum() -> Self {
        WeylMonomial(Factors::new())
    }

    pub fn from_factors(mut factors: Vec<(u16, u16)>) -> Self {
        factors.sort_unstable();
        WeylMonomial(Factors::from_vec(factors))
    }

    /// Sum of `|mode|` over factors.
    pub fn energy(&self) -> u32 {
        self.0.iter().map(|&(_, l)| l as u32).sum()
    }

    pub fn max_level(&self) -> u16 {
        self.0.iter().map(|&(_, l)| l).max().unwrap_or(0)
    }

    pub fn with_factor(&self, gen: u16, level: u16) -> Self {
        let mut f = self.0.clone();
        let pos = f.partition_point(|&x| x < (gen, level));
        f.insert(pos, (gen, level));
        WeylMonomial(f)
    }

    pub fn without_index(&self, idx: usize) -> Self {
        let mut f = self.0.clone();
        f.remove(idx);
        WeylMonomial(f)
    }

    pub fn render(&self, rank: usize) -> String {
        if self.0.is_empty() {
            return "|0>".to_string();
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&(g, l)| format!("{}(-{l})", gen_name(rank, g as usize)))
            .collect();
        parts.join(" ")
    }
}

/// Text name of a basis generator of `C`: `c`, `c*`, `e1`, `e*1`, ...
pub fn gen_name(rank: usize, g: usize) -> String {
    let (a, star) = weyl_gen_split(rank, g);
    match (a, star) {
        (0, false) => "c".into(),
        (0, true) => "c*".into(),
        (a, false) => format!("e{a}"),
        (a, true) => format!("e*{a}"),
    }
}

impl fmt::Display for WeylMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Expands a `C` vector into `(generator index, coefficient)` pairs.
pub fn cvector_gens(rank: usize, u: &CVector) -> Vec<(u16, GaussRational)> {
    u.support()
        .map(|(a, c)| (weyl_gen_index(rank, a, u.star) as u16, c.clone()))
        .collect()
}

/// Pairing of two generator indices.
pub fn gen_pairing(rank: usize, g: u16, h: u16) -> i64 {
    let (a, sa) = weyl_gen_split(rank, g as usize);
    let (b, sb) = weyl_gen_split(rank, h as usize);
    c_pairing_basis(a, sa, b, sb)
}

/// Action of a single basis generator mode on a monomial.
pub fn apply_gen_mode(rank: usize, gen: u16, k: i64, mono: &WeylMonomial, out: &mut WeylState, coeff: &GaussRational) {
    if k <= -1 {
        out.add_term(mono.with_factor(gen, (-k) as u16), coeff.clone());
        return;
    }
    // annihilator: contract against each factor at level k+1
    let target = (k + 1) as u16;
    for (idx, &(h, l)) in mono.0.iter().enumerate() {
        if l != target {
            continue;
        }
        let p = gen_pairing(rank, gen, h);
        if p != 0 {
            out.add_term(mono.without_index(idx), coeff.scale_int(p));
        }
    }
}

/// `u(k)` on a basis monomial.
pub fn weyl_apply_basis(rank: usize, gens: &[(u16, GaussRational)], k: i64, mono: &WeylMonomial) -> WeylState {
    let mut out = WeylState::zero();
    if k >= 0 && (k + 1) as u32 > mono.max_level() as u32 {
        return out;
    }
    for (g, c) in gens {
        apply_gen_mode(rank, *g, k, mono, &mut out, c);
    }
    out
}

/// `u(k)` on a state.
pub fn weyl_apply(rank: usize, u: &CVector, k: i64, s: &WeylState) -> WeylState {
    let gens = cvector_gens(rank, u);
    s.map_linear(|m| weyl_apply_basis(rank, &gens, k, m))
}

/// Splits a state by energy.
pub fn weyl_grade(s: &WeylState) -> BTreeMap<u32, WeylState> {
    let mut out: BTreeMap<u32, WeylState> = BTreeMap::new();
    for (m, c) in s.iter() {
        out.entry(m.energy()).or_default().add_term(m.clone(), c.clone());
    }
    out
}
