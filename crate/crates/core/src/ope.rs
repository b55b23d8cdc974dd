//! Singular parts of operator product expansions and the bridge to mode brackets.
//!
//! `[a(z), b(w)] = sum_j c^j(w) d_w^{(j)} delta(z-w)` is stored as the map `j -> c^j`.
//! Only the contractions listed in [`contract`] are known symbolically; everything
//! else is reported as outside the symbolic closure and left to the numeric path.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::field::{Evaluator, FieldExpr, TensorState};
use crate::roots::{c_pairing, cocycle, LatticeVector, Parity};
use crate::scalar::{binomial, GaussRational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OpeError {
    #[error("outside symbolic closure: {0}")]
    OutsideClosure(String),
}

/// Coefficient `c^j`: a field plus constant multiples of the identity and of `K`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OpeLevel {
    pub fields: Vec<(GaussRational, FieldExpr)>,
    pub identity: GaussRational,
    pub central: GaussRational,
}

impl OpeLevel {
    pub fn is_zero(&self) -> bool {
        self.fields.is_empty() && self.identity.is_zero() && self.central.is_zero()
    }

    fn add_field(&mut self, c: GaussRational, e: FieldExpr) {
        if let Some(slot) = self.fields.iter_mut().find(|(_, f)| *f == e) {
            slot.0 += &c;
        } else {
            self.fields.push((c, e));
        }
        self.fields.retain(|(c, _)| !c.is_zero());
    }

    /// The field part as a single expression, if any.
    pub fn field(&self) -> Option<FieldExpr> {
        match self.fields.as_slice() {
            [] => None,
            [(c, e)] => Some(FieldExpr::scaled(c.clone(), e.clone())),
            many => Some(FieldExpr::Sum(many.iter().map(|(c, e)| FieldExpr::scaled(c.clone(), e.clone())).collect())),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct OpeSingularPart {
    pub levels: BTreeMap<u32, OpeLevel>,
}

impl OpeSingularPart {
    pub fn is_zero(&self) -> bool {
        self.levels.values().all(OpeLevel::is_zero)
    }

    pub fn level(&self, j: u32) -> Option<&OpeLevel> {
        self.levels.get(&j)
    }

    pub fn add_identity(&mut self, j: u32, c: GaussRational) {
        let lvl = self.levels.entry(j).or_default();
        lvl.identity += &c;
    }

    pub fn add_central(&mut self, j: u32, c: GaussRational) {
        let lvl = self.levels.entry(j).or_default();
        lvl.central += &c;
    }

    pub fn add_field(&mut self, j: u32, c: GaussRational, e: FieldExpr) {
        if !c.is_zero() {
            self.levels.entry(j).or_default().add_field(c, e);
        }
    }

    fn prune(&mut self) {
        self.levels.retain(|_, l| !l.is_zero());
    }
}

/// One term `coeff * (z-w)^{-order} * fields(w)` of a pair contraction.
#[derive(Debug, Clone)]
struct Piece {
    order: u32,
    fields: Vec<FieldExpr>,
    coeff: GaussRational,
}

/// Vertex pairs `X(a,z) X(-a,w)` with `(a,a) = 1`; their product is multiplicative,
/// `F(a,-a) (z-w)^{-1} (1 + (z-w) a(w) + ...)`.
fn unit_vertex_pair(a: &LatticeVector, b: &LatticeVector) -> bool {
    a.norm() == 1 && *b == a.neg()
}

fn is_unit(a: &LatticeVector) -> bool {
    a.norm() == 1 && a.0.iter().all(|c| c.abs() <= 1)
}

/// Expansion of the singular part (plus the subleading term for vertex pairs).
fn pair_pieces(a: &FieldExpr, b: &FieldExpr) -> Result<Vec<Piece>, OpeError> {
    use FieldExpr::*;
    let scalar = |order: u32, c: GaussRational| if c.is_zero() { vec![] } else { vec![Piece { order, fields: vec![], coeff: c }] };
    Ok(match (a, b) {
        (WeylAtom(u), WeylAtom(v)) => scalar(1, c_pairing(u, v)),
        (WeylAtom(_), Vertex(_) | HeisCurrent(_)) | (Vertex(_) | HeisCurrent(_), WeylAtom(_)) => vec![],
        (CentralK, _) | (_, CentralK) => vec![],
        (HeisCurrent(x), HeisCurrent(y)) => scalar(2, GaussRational::from_int(x.dot(y))),
        (HeisCurrent(x), Vertex(y)) => {
            let c = x.dot(y);
            if c == 0 { vec![] } else { vec![Piece { order: 1, fields: vec![Vertex(y.clone())], coeff: GaussRational::from_int(c) }] }
        }
        (Vertex(y), HeisCurrent(x)) => {
            let c = x.dot(y);
            if c == 0 { vec![] } else { vec![Piece { order: 1, fields: vec![Vertex(y.clone())], coeff: GaussRational::from_int(-c) }] }
        }
        (Vertex(x), Vertex(y)) if is_unit(x) && is_unit(y) => {
            if unit_vertex_pair(x, y) {
                let f = GaussRational::from_int(cocycle(x, y));
                vec![
                    Piece { order: 1, fields: vec![], coeff: f.clone() },
                    Piece { order: 0, fields: vec![HeisCurrent(x.clone())], coeff: f },
                ]
            } else {
                vec![]
            }
        }
        _ => return Err(OpeError::OutsideClosure(format!("no contraction rule for {a} with {b}"))),
    })
}

/// Singular part of `a(z) b(w)` for atoms `a`, `b`.
pub fn contract(a: &FieldExpr, b: &FieldExpr) -> Result<OpeSingularPart, OpeError> {
    if !a.is_atom() || !b.is_atom() {
        return Err(OpeError::OutsideClosure("contraction needs two atoms".into()));
    }
    let mut out = OpeSingularPart::default();
    for piece in pair_pieces(a, b)? {
        if piece.order == 0 {
            continue;
        }
        let j = piece.order - 1;
        match piece.fields.as_slice() {
            [] => out.add_identity(j, piece.coeff),
            [f] if j == 0 => out.add_field(0, piece.coeff, f.clone()),
            _ => return Err(OpeError::OutsideClosure(format!("{a} with {b}"))),
        }
    }
    out.prune();
    Ok(out)
}

fn atoms_of(e: &FieldExpr) -> Result<Vec<FieldExpr>, OpeError> {
    match e {
        FieldExpr::NormalQuad(a, b) => Ok(vec![(**a).clone(), (**b).clone()]),
        a if a.is_atom() => Ok(vec![a.clone()]),
        other => Err(OpeError::OutsideClosure(format!("{other} is not a normally ordered monomial"))),
    }
}

/// Koszul sign of moving `seq` (listed by original positions) into the new order.
fn permutation_sign(order: &[usize], parities: &[Parity]) -> i64 {
    let mut sign = 1;
    for x in 0..order.len() {
        for y in x + 1..order.len() {
            if order[x] > order[y] && parities[order[x]].is_odd() && parities[order[y]].is_odd() {
                sign = -sign;
            }
        }
    }
    sign
}

/// Partial matchings between left positions `0..l` and right positions `0..r`.
fn matchings(l: usize, r: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(i: usize, l: usize, r: usize, used: &mut Vec<bool>, acc: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if i == l {
            out.push(acc.clone());
            return;
        }
        rec(i + 1, l, r, used, acc, out);
        for j in 0..r {
            if !used[j] {
                used[j] = true;
                acc.push((i, j));
                rec(i + 1, l, r, used, acc, out);
                acc.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(0, l, r, &mut vec![false; r], &mut Vec::new(), &mut out);
    out
}

fn monomial_ope(left: &[FieldExpr], right: &[FieldExpr], scale: &GaussRational, out: &mut OpeSingularPart) -> Result<(), OpeError> {
    let all: Vec<&FieldExpr> = left.iter().chain(right.iter()).collect();
    let parities: Vec<Parity> = all.iter().map(|e| e.parity()).collect();
    let nl = left.len();
    // vertex pairs with a pole are multiplicative and must always be taken together
    let forced: Vec<(usize, usize)> = (0..nl)
        .flat_map(|i| (0..right.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| matches!((&left[i], &right[j]), (FieldExpr::Vertex(x), FieldExpr::Vertex(y)) if x.dot(y) < 0))
        .collect();
    for matching in matchings(nl, right.len()) {
        if forced.iter().any(|f| !matching.contains(f)) {
            continue;
        }
        if matching.is_empty() {
            continue;
        }
        let mut order: Vec<usize> = Vec::new();
        for &(i, j) in &matching {
            order.push(i);
            order.push(nl + j);
        }
        let rest: Vec<usize> = (0..all.len()).filter(|p| !order.contains(p)).collect();
        order.extend(&rest);
        let sign = permutation_sign(&order, &parities);
        let left_rest = rest.iter().any(|&p| p < nl);
        let remainder: Vec<FieldExpr> = rest.iter().map(|&p| all[p].clone()).collect();

        let mut combos: Vec<Piece> = vec![Piece { order: 0, fields: vec![], coeff: scale.scale_int(sign) }];
        for &(i, j) in &matching {
            let pieces = pair_pieces(&left[i], &right[j])?;
            let mut next = Vec::new();
            for c in &combos {
                for p in &pieces {
                    let mut fields = c.fields.clone();
                    fields.extend(p.fields.iter().cloned());
                    next.push(Piece { order: c.order + p.order, fields, coeff: &c.coeff * &p.coeff });
                }
            }
            combos = next;
        }
        let vertex_pairs = matching.iter().filter(|m| forced.contains(m)).count();
        let other_poles: u32 = matching
            .iter()
            .filter(|m| !forced.contains(m))
            .map(|&(i, j)| pair_pieces(&left[i], &right[j]).map(|ps| ps.iter().map(|p| p.order).max().unwrap_or(0)))
            .sum::<Result<u32, _>>()?;
        if vertex_pairs > 0 && other_poles >= 2 {
            return Err(OpeError::OutsideClosure("vertex pair against a higher pole".into()));
        }
        for c in combos {
            if c.order == 0 {
                continue;
            }
            if c.order >= 2 && left_rest {
                return Err(OpeError::OutsideClosure("higher pole with an uncontracted left field".into()));
            }
            let mut fields = c.fields.clone();
            fields.extend(remainder.iter().cloned());
            let j = c.order - 1;
            match fields.len() {
                0 => out.add_identity(j, c.coeff),
                1 => out.add_field(j, c.coeff, fields.pop().unwrap()),
                2 => {
                    let vertices = fields.iter().filter(|f| matches!(f, FieldExpr::Vertex(_))).count();
                    if vertices > 1 {
                        return Err(OpeError::OutsideClosure("product of two vertex operators".into()));
                    }
                    let b = fields.pop().unwrap();
                    let a = fields.pop().unwrap();
                    out.add_field(j, c.coeff, FieldExpr::quad(a, b));
                }
                _ => return Err(OpeError::OutsideClosure("normal product of more than two fields".into())),
            }
        }
    }
    Ok(())
}

/// Singular part of `a(z) b(w)` for linear combinations of normally ordered monomials.
pub fn wick_ope(a: &FieldExpr, b: &FieldExpr) -> Result<OpeSingularPart, OpeError> {
    let mut out = OpeSingularPart::default();
    for (ca, ea) in a.summands() {
        if matches!(ea, FieldExpr::CentralK) {
            continue;
        }
        let left = atoms_of(ea)?;
        for (cb, eb) in b.summands() {
            if matches!(eb, FieldExpr::CentralK) {
                continue;
            }
            let right = atoms_of(eb)?;
            monomial_ope(&left, &right, &(&ca * &cb), &mut out)?;
        }
    }
    out.prune();
    Ok(out)
}

/// The commutator `[a(p), b(q)] s` predicted by a singular part:
/// `sum_j binomial(p, j) c^j(p + q - j) s`.
pub fn modes_from_ope(ev: &mut Evaluator, ope: &OpeSingularPart, p: i64, q: i64, s: &TensorState) -> TensorState {
    let mut out = TensorState::zero();
    for (&j, level) in &ope.levels {
        let weight = binomial(p, j);
        if weight == 0 {
            continue;
        }
        let w = GaussRational::from_int(weight);
        let mode = p + q - j as i64;
        for (c, f) in &level.fields {
            let v = ev.eval_mode(f, mode, s);
            out.add_scaled(&v, &(&w * c));
        }
        if mode == -1 {
            let constant = &level.identity + &(&level.central * ev.central_value());
            out.add_scaled(s, &(&w * &constant));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::vacuum;
    use crate::parse::parse_expr;

    const RANK: usize = 3;

    fn px(t: &str) -> FieldExpr {
        parse_expr(t, RANK).unwrap()
    }

    #[test]
    fn contraction_examples() {
        assert!(contract(&px("e1"), &px("e*2")).unwrap().is_zero());
        let c = contract(&px("X(1,0,0)"), &px("X(-1,0,0)")).unwrap();
        assert_eq!(c.level(0).unwrap().identity, GaussRational::one());
        assert_eq!(c.levels.len(), 1);
        assert!(contract(&px("e1"), &px("X(0,1,0)")).unwrap().is_zero());
        let h = contract(&px("H(1,0,0)"), &px("H(1,1,0)")).unwrap();
        assert_eq!(h.level(1).unwrap().identity, GaussRational::one());
        assert!(matches!(contract(&px("X(1,1,0)"), &px("X(-1,-1,0)")), Err(OpeError::OutsideClosure(_))));
    }

    #[test]
    fn beta_pair_central_term() {
        let ope = wick_ope(&px("1/2 * :b* e*1:"), &px("1/2 * :b e1:")).unwrap();
        let l1 = ope.level(1).unwrap();
        assert_eq!(l1.identity, GaussRational::ratio(1, 2));
    }

    #[test]
    fn starred_pairs_vanish() {
        assert!(wick_ope(&px(":b* e*1:"), &px(":e*1 e*2:")).unwrap().is_zero());
    }

    #[test]
    fn heisenberg_bridge() {
        let ope = contract(&px("H(1,0,0)"), &px("H(1,0,0)")).unwrap();
        let mut ev = Evaluator::new(RANK, GaussRational::from_int(-1));
        assert_eq!(modes_from_ope(&mut ev, &ope, 1, -1, &vacuum(RANK)), vacuum(RANK));
        let mut only = OpeSingularPart::default();
        only.add_identity(1, GaussRational::from_int(3));
        assert_eq!(modes_from_ope(&mut ev, &only, 2, -2, &vacuum(RANK)), vacuum(RANK).scaled(&GaussRational::from_int(6)));
    }

    #[test]
    fn matchings_count() {
        assert_eq!(matchings(2, 2).len(), 7);
        assert_eq!(matchings(1, 2).len(), 3);
    }
}
