//! Finite linear combinations of basis vectors with Gaussian-rational coefficients.

use std::collections::btree_map::{self, BTreeMap};

use crate::scalar::GaussRational;

/// Canonical sparse vector: no zero coefficients are ever stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinComb<B: Ord> {
    terms: BTreeMap<B, GaussRational>,
}

impl<B: Ord> Default for LinComb<B> {
    fn default() -> Self {
        LinComb { terms: BTreeMap::new() }
    }
}

impl<B: Ord + Clone> LinComb<B> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(b: B) -> Self {
        Self::term(b, GaussRational::one())
    }

    pub fn term(b: B, c: GaussRational) -> Self {
        let mut s = Self::zero();
        s.add_term(b, c);
        s
    }

    pub fn clear(&mut self) {
        self.terms.clear();
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> btree_map::Iter<'_, B, GaussRational> {
        self.terms.iter()
    }

    pub fn coeff(&self, b: &B) -> GaussRational {
        self.terms.get(b).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, b: B, c: GaussRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(b) {
            btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &Self, c: &GaussRational) {
        if c.is_zero() {
            return;
        }
        let unit = c.is_one();
        for (b, x) in other.iter() {
            let v = if unit { x.clone() } else { x * c };
            self.add_term(b.clone(), v);
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        self.add_scaled(other, &GaussRational::one());
    }

    pub fn scaled(&self, c: &GaussRational) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &GaussRational::from_int(-1));
        out
    }

    pub fn support(&self) -> impl Iterator<Item = &B> {
        self.terms.keys()
    }

    /// Applies a basis-level linear map and sums the results.
    pub fn map_linear<C: Ord + Clone>(&self, mut f: impl FnMut(&B) -> LinComb<C>) -> LinComb<C> {
        let mut out = LinComb::zero();
        for (b, c) in self.iter() {
            out.add_scaled(&f(b), c);
        }
        out
    }
}

impl<B: Ord + Clone> FromIterator<(B, GaussRational)> for LinComb<B> {
    fn from_iter<T: IntoIterator<Item = (B, GaussRational)>>(iter: T) -> Self {
        let mut s = Self::zero();
        for (b, c) in iter {
            s.add_term(b, c);
        }
        s
    }
}
