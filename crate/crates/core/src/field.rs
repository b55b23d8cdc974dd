//! Field expressions and their exact mode action on `V[L] (x) F`.
//!
//! A field `a(z) = sum_k a(k) z^{-k-1}` is evaluated one mode at a time. Normal
//! products use the mode split
//! `:ab:(k) = sum_{j<0} a(j) b(k-1-j) + (-1)^{p(a)p(b)} sum_{j>=0} b(k-1-j) a(j)`,
//! truncated by the grading bounds of each atom on the state it meets.

use std::collections::hash_map::Entry;

use rustc_hash::FxHashMap as HashMap;
use std::fmt;
use std::hash::Hash;
use std::rc::Rc;

use smallvec::SmallVec;

use crate::lattice::{
    creation_polynomial, heis_apply_basis, merge_heis, vertex_annihilation_parts, vertex_bound, LatticeBasis, LatticeState,
};
use crate::lincomb::LinComb;
use crate::roots::{cocycle, koszul, CVector, LatticeVector, Parity};
use crate::scalar::GaussRational;
use crate::weyl::{cvector_gens, weyl_apply_basis, Factors, WeylMonomial, WeylState};

/// Basis vector `heis (x) e^gamma (x) weyl` of the representation space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TensorBasis {
    pub lattice: LatticeBasis,
    pub weyl: WeylMonomial,
}

pub type TensorState = LinComb<TensorBasis>;

impl TensorBasis {
    pub fn vacuum(rank: usize) -> Self {
        TensorBasis { lattice: LatticeBasis::vacuum(rank), weyl: WeylMonomial::vacuum() }
    }

    pub fn parity(&self) -> Parity {
        self.lattice.parity()
    }

    pub fn energy(&self) -> u32 {
        self.lattice.energy() + self.weyl.energy()
    }
}

pub fn vacuum(rank: usize) -> TensorState {
    TensorState::basis(TensorBasis::vacuum(rank))
}

/// Tensor of a lattice state with a Weyl state.
pub fn tensor(l: &LatticeState, w: &WeylState) -> TensorState {
    let mut out = TensorState::zero();
    for (lb, lc) in l.iter() {
        for (wb, wc) in w.iter() {
            out.add_term(TensorBasis { lattice: lb.clone(), weyl: wb.clone() }, lc * wc);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FieldExpr {
    WeylAtom(CVector),
    HeisCurrent(LatticeVector),
    Vertex(LatticeVector),
    NormalQuad(Box<FieldExpr>, Box<FieldExpr>),
    ScalarMul(GaussRational, Box<FieldExpr>),
    Sum(Vec<FieldExpr>),
    CentralK,
}

impl FieldExpr {
    pub fn quad(a: FieldExpr, b: FieldExpr) -> Self {
        FieldExpr::NormalQuad(Box::new(a), Box::new(b))
    }

    pub fn scaled(c: GaussRational, e: FieldExpr) -> Self {
        if c.is_one() {
            e
        } else {
            FieldExpr::ScalarMul(c, Box::new(e))
        }
    }

    pub fn is_atom(&self) -> bool {
        matches!(
            self,
            FieldExpr::WeylAtom(_) | FieldExpr::HeisCurrent(_) | FieldExpr::Vertex(_) | FieldExpr::CentralK
        )
    }

    /// Parity; sums take the parity of their first summand.
    pub fn parity(&self) -> Parity {
        match self {
            FieldExpr::Vertex(a) => a.parity(),
            FieldExpr::NormalQuad(a, b) => a.parity() + b.parity(),
            FieldExpr::ScalarMul(_, e) => e.parity(),
            FieldExpr::Sum(parts) => parts.first().map_or(Parity::Even, |e| e.parity()),
            _ => Parity::Even,
        }
    }

    /// Splits into `(coefficient, non-scaled expression)` summands, flattening nested sums.
    pub fn summands(&self) -> Vec<(GaussRational, &FieldExpr)> {
        let mut out = Vec::new();
        self.collect_summands(GaussRational::one(), &mut out);
        out
    }

    fn collect_summands<'a>(&'a self, c: GaussRational, out: &mut Vec<(GaussRational, &'a FieldExpr)>) {
        match self {
            FieldExpr::ScalarMul(d, e) => e.collect_summands(&c * d, out),
            FieldExpr::Sum(parts) => {
                for p in parts {
                    p.collect_summands(c.clone(), out);
                }
            }
            e => out.push((c, e)),
        }
    }
}

impl fmt::Display for FieldExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parse::render_expr(self))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Neutral,
    Lattice,
    Weyl,
    Mixed,
}

impl Side {
    fn join(self, other: Side) -> Side {
        match (self, other) {
            (Side::Neutral, s) | (s, Side::Neutral) => s,
            (a, b) if a == b => a,
            _ => Side::Mixed,
        }
    }
}

#[derive(Debug, Clone)]
enum Kind {
    Weyl(Vec<(u16, GaussRational)>),
    Heis(LatticeVector),
    Vertex(LatticeVector),
    Central,
    Quad(u32, u32),
    Scale(GaussRational, u32),
    Sum(Vec<u32>),
}

#[derive(Debug, Clone)]
struct Node {
    kind: Kind,
    parity: Parity,
    side: Side,
}

/// Handle of an interned expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldId(u32);

/// Interned lattice basis vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Lid(u32);

/// Interned Weyl monomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Wid(u32);

/// Interned tensor basis vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Tid(Lid, Wid);

/// Frozen sparse vector over interned ids; no zero coefficients.
type Terms<B> = Vec<(B, GaussRational)>;

/// Sparse accumulator over interned ids.
struct Acc<B>(HashMap<B, GaussRational>);

impl<B: Copy + Hash + Eq> Acc<B> {
    fn new() -> Self {
        Acc(HashMap::default())
    }

    fn add(&mut self, b: B, c: GaussRational) {
        if c.is_zero() {
            return;
        }
        match self.0.entry(b) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => *o.get_mut() += &c,
        }
    }

    fn add_scaled(&mut self, terms: &[(B, GaussRational)], c: &GaussRational) {
        if c.is_one() {
            for (b, d) in terms {
                self.add(*b, d.clone());
            }
        } else {
            for (b, d) in terms {
                self.add(*b, d * c);
            }
        }
    }

    fn freeze(&mut self) -> Terms<B> {
        self.0.drain().filter(|(_, c)| !c.is_zero()).collect()
    }
}

struct Interner<T> {
    items: Vec<T>,
    index: HashMap<T, u32>,
}

impl<T: Clone + Hash + Eq> Interner<T> {
    fn new() -> Self {
        Interner { items: Vec::new(), index: HashMap::default() }
    }

    fn id(&mut self, t: &T) -> u32 {
        if let Some(&i) = self.index.get(t) {
            return i;
        }
        let i = self.items.len() as u32;
        self.items.push(t.clone());
        self.index.insert(t.clone(), i);
        i
    }

    fn get(&self, i: u32) -> &T {
        &self.items[i as usize]
    }
}

/// One tensor factor (or the whole tensor product) on which nodes can act.
trait Factor: Copy + Ord + Hash + Eq {
    fn apply_atom(ev: &mut Evaluator, id: u32, kind: &Kind, k: i64, b: Self) -> Terms<Self>;
    fn atom_max_mode(ev: &Evaluator, kind: &Kind, b: Self) -> i64;
    fn cache(ev: &mut Evaluator) -> &mut Cache<Self>;
    fn nested_cache(ev: &mut Evaluator) -> &mut NestedCache<Self>;

    /// `out += c * [chain] b` for a chain of length at least two.
    fn nested_accumulate(ev: &mut Evaluator, chain: &[(FieldId, i64)], b: Self, c: &GaussRational, out: &mut Acc<Self>) {
        let r = ev.nested_basis(chain, b);
        out.add_scaled(&r, c);
    }

    /// `out += c * node(k) b`.
    fn accumulate(ev: &mut Evaluator, id: u32, k: i64, b: Self, c: &GaussRational, out: &mut Acc<Self>) {
        let r = ev.eval_on(id, k, b);
        out.add_scaled(&r, c);
    }
}

type Cache<B> = HashMap<(u32, i64, B), Rc<Terms<B>>>;

type ChainKey = SmallVec<[(FieldId, i64); 4]>;

type NestedCache<B> = HashMap<(ChainKey, B), Rc<Terms<B>>>;

/// Evaluates field modes with interning and per-factor memoization.
///
/// Basis vectors are interned to integer ids. Results are cached by
/// `(expression, mode, factor basis id)`; a field acting only on the lattice factor is
/// cached by the lattice id alone, and likewise for the Weyl factor.
pub struct Evaluator {
    rank: usize,
    central_value: GaussRational,
    nodes: Vec<Node>,
    index: HashMap<FieldExpr, u32>,
    lattice_ids: Interner<LatticeBasis>,
    weyl_ids: Interner<WeylMonomial>,
    lattice_cache: Cache<Lid>,
    weyl_cache: Cache<Wid>,
    tensor_cache: Cache<Tid>,
    lattice_nested: NestedCache<Lid>,
    weyl_nested: NestedCache<Wid>,
    tensor_nested: NestedCache<Tid>,
    /// `E^+` coefficients per (vertex node, lattice id), as creator lists.
    vertex_parts: HashMap<(u32, Lid), Rc<Vec<Terms<Factors>>>>,
    /// `E^-` coefficients per (vertex node, level).
    creation: HashMap<(u32, u32), Rc<Terms<Factors>>>,
    /// Budget on cached terms; all memo tables are dropped when it is exceeded.
    cache_limit: usize,
    cached_terms: usize,
}

impl Evaluator {
    /// `central_value` is the scalar by which `K` acts.
    pub fn new(rank: usize, central_value: GaussRational) -> Self {
        Evaluator {
            rank,
            central_value,
            nodes: Vec::new(),
            index: HashMap::default(),
            lattice_ids: Interner::new(),
            weyl_ids: Interner::new(),
            lattice_cache: HashMap::default(),
            weyl_cache: HashMap::default(),
            tensor_cache: HashMap::default(),
            lattice_nested: HashMap::default(),
            weyl_nested: HashMap::default(),
            tensor_nested: HashMap::default(),
            vertex_parts: HashMap::default(),
            creation: HashMap::default(),
            cache_limit: 8_000_000,
            cached_terms: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn central_value(&self) -> &GaussRational {
        &self.central_value
    }

    pub fn set_cache_limit(&mut self, limit: usize) {
        self.cache_limit = limit;
    }

    /// Interns an expression.
    ///
    /// # Panics
    /// If a normal product has a non-atomic argument.
    pub fn intern(&mut self, e: &FieldExpr) -> FieldId {
        FieldId(self.intern_raw(e))
    }

    fn intern_raw(&mut self, e: &FieldExpr) -> u32 {
        if let Some(&id) = self.index.get(e) {
            return id;
        }
        let node = match e {
            FieldExpr::WeylAtom(u) => Node {
                kind: Kind::Weyl(cvector_gens(self.rank, u)),
                parity: Parity::Even,
                side: Side::Weyl,
            },
            FieldExpr::HeisCurrent(a) => Node { kind: Kind::Heis(a.clone()), parity: Parity::Even, side: Side::Lattice },
            FieldExpr::Vertex(a) => Node { kind: Kind::Vertex(a.clone()), parity: a.parity(), side: Side::Lattice },
            FieldExpr::CentralK => Node { kind: Kind::Central, parity: Parity::Even, side: Side::Neutral },
            FieldExpr::NormalQuad(a, b) => {
                assert!(a.is_atom() && b.is_atom(), "normal product arguments must be atoms");
                let ia = self.intern_raw(a);
                let ib = self.intern_raw(b);
                let (na, nb) = (&self.nodes[ia as usize], &self.nodes[ib as usize]);
                Node { kind: Kind::Quad(ia, ib), parity: na.parity + nb.parity, side: na.side.join(nb.side) }
            }
            FieldExpr::ScalarMul(c, inner) => {
                let ii = self.intern_raw(inner);
                let n = &self.nodes[ii as usize];
                Node { kind: Kind::Scale(c.clone(), ii), parity: n.parity, side: n.side }
            }
            FieldExpr::Sum(parts) => {
                let ids: Vec<u32> = parts.iter().map(|p| self.intern_raw(p)).collect();
                let parity = ids.first().map_or(Parity::Even, |&i| self.nodes[i as usize].parity);
                let side = ids.iter().fold(Side::Neutral, |s, &i| s.join(self.nodes[i as usize].side));
                Node { kind: Kind::Sum(ids), parity, side }
            }
        };
        let id = self.nodes.len() as u32;
        self.nodes.push(node);
        self.index.insert(e.clone(), id);
        id
    }

    pub fn parity(&self, id: FieldId) -> Parity {
        self.nodes[id.0 as usize].parity
    }

    fn max_mode<F: Factor>(&self, id: u32, b: F) -> i64 {
        match &self.nodes[id as usize].kind {
            Kind::Scale(_, inner) => self.max_mode(*inner, b),
            Kind::Sum(parts) => parts.iter().map(|&p| self.max_mode(p, b)).max().unwrap_or(i64::MIN),
            Kind::Quad(..) => unreachable!("normal products are never nested"),
            kind => F::atom_max_mode(self, kind, b),
        }
    }

    fn eval_on<F: Factor>(&mut self, id: u32, k: i64, b: F) -> Rc<Terms<F>> {
        if let Some(hit) = F::cache(self).get(&(id, k, b)) {
            return Rc::clone(hit);
        }
        let kind = self.nodes[id as usize].kind.clone();
        let out = match kind {
            Kind::Scale(c, inner) => {
                let mut acc = Acc::new();
                F::accumulate(self, inner, k, b, &c, &mut acc);
                acc.freeze()
            }
            Kind::Sum(parts) => {
                let one = GaussRational::one();
                let mut acc = Acc::new();
                for p in parts {
                    F::accumulate(self, p, k, b, &one, &mut acc);
                }
                acc.freeze()
            }
            Kind::Quad(x, y) => {
                let mut acc = Acc::new();
                self.quad_on(x, y, k, b, &mut acc);
                acc.freeze()
            }
            atom => F::apply_atom(self, id, &atom, k, b),
        };
        let out = Rc::new(out);
        self.reserve(out.len());
        F::cache(self).insert((id, k, b), Rc::clone(&out));
        out
    }

    fn accumulate_state<F: Factor>(&mut self, id: u32, k: i64, s: &[(F, GaussRational)], c: &GaussRational, out: &mut Acc<F>) {
        for (b, d) in s {
            let cd = if c.is_one() { d.clone() } else { c * d };
            F::accumulate(self, id, k, *b, &cd, out);
        }
    }

    fn quad_on<F: Factor>(&mut self, x: u32, y: u32, k: i64, b: F, out: &mut Acc<F>) {
        let sign = koszul(self.nodes[x as usize].parity, self.nodes[y as usize].parity);
        let one = GaussRational::one();
        let mut tmp = Acc::new();
        // creation part of x on the left
        let my = self.max_mode(y, b);
        let start = k.saturating_sub(1).saturating_sub(my);
        for j in start..0 {
            F::accumulate(self, y, k - 1 - j, b, &one, &mut tmp);
            let yb = tmp.freeze();
            self.accumulate_state(x, j, &yb, &one, out);
        }
        // annihilation part of x on the right
        let mx = self.max_mode(x, b);
        let sign = GaussRational::from_int(sign);
        for j in 0..=mx {
            F::accumulate(self, x, j, b, &one, &mut tmp);
            let xb = tmp.freeze();
            self.accumulate_state(y, k - 1 - j, &xb, &sign, out);
        }
    }

    fn vertex_parts_of(&mut self, id: u32, a: &LatticeVector, b: Lid) -> Rc<Vec<Terms<Factors>>> {
        if let Some(p) = self.vertex_parts.get(&(id, b)) {
            return Rc::clone(p);
        }
        let parts = vertex_annihilation_parts(a, self.lattice_ids.get(b.0));
        let p: Rc<Vec<Terms<Factors>>> =
            Rc::new(parts.iter().map(|s| s.iter().map(|(t, c)| (t.heis.clone(), c.clone())).collect()).collect());
        self.reserve(p.iter().map(Vec::len).sum());
        self.vertex_parts.insert((id, b), Rc::clone(&p));
        p
    }

    /// Accounts for a new cache entry of `terms` terms, clearing every table when over budget.
    fn reserve(&mut self, terms: usize) {
        self.cached_terms += terms + 1;
        if self.cached_terms > self.cache_limit {
            self.lattice_cache.clear();
            self.weyl_cache.clear();
            self.tensor_cache.clear();
            self.lattice_nested.clear();
            self.weyl_nested.clear();
            self.tensor_nested.clear();
            self.vertex_parts.clear();
            self.cached_terms = terms + 1;
        }
    }

    fn creation_of(&mut self, id: u32, a: &LatticeVector, level: u32) -> Rc<Terms<Factors>> {
        Rc::clone(self.creation.entry((id, level)).or_insert_with(|| Rc::new(creation_polynomial(a, level))))
    }

    fn lattice_id(&mut self, b: &LatticeBasis) -> Lid {
        Lid(self.lattice_ids.id(b))
    }

    fn weyl_id(&mut self, b: &WeylMonomial) -> Wid {
        Wid(self.weyl_ids.id(b))
    }

    fn to_ids(&mut self, s: &TensorState) -> Terms<Tid> {
        s.iter().map(|(b, c)| (Tid(self.lattice_id(&b.lattice), self.weyl_id(&b.weyl)), c.clone())).collect()
    }

    fn from_ids(&self, s: &[(Tid, GaussRational)]) -> TensorState {
        s.iter()
            .map(|(t, c)| {
                let b = TensorBasis { lattice: self.lattice_ids.get(t.0 .0).clone(), weyl: self.weyl_ids.get(t.1 .0).clone() };
                (b, c.clone())
            })
            .collect()
    }

    /// Mode `k` of the field on a state.
    pub fn eval(&mut self, id: FieldId, k: i64, s: &TensorState) -> TensorState {
        let s = self.to_ids(s);
        let mut out = Acc::new();
        self.accumulate_state(id.0, k, &s, &GaussRational::one(), &mut out);
        self.from_ids(&out.freeze())
    }

    pub fn eval_mode(&mut self, e: &FieldExpr, k: i64, s: &TensorState) -> TensorState {
        let id = self.intern(e);
        self.eval(id, k, s)
    }

    /// `[a(p), b(q)] s` as a super-bracket.
    pub fn bracket(&mut self, a: FieldId, p: i64, b: FieldId, q: i64, s: &TensorState) -> TensorState {
        let chain = [(a, p), (b, q)];
        self.nested(&chain, s)
    }

    pub fn bracket_apply(&mut self, a: &FieldExpr, p: i64, b: &FieldExpr, q: i64, s: &TensorState) -> TensorState {
        let (ia, ib) = (self.intern(a), self.intern(b));
        self.bracket(ia, p, ib, q, s)
    }

    /// Right-nested super-bracket `[A1(k1), [A2(k2), ... [A_{r-1}, A_r] ...]] s`.
    ///
    /// # Panics
    /// If the chain is empty.
    pub fn nested(&mut self, chain: &[(FieldId, i64)], s: &TensorState) -> TensorState {
        assert!(!chain.is_empty(), "empty bracket chain");
        let s = self.to_ids(s);
        let mut out = Acc::new();
        self.nested_into(chain, &s, &GaussRational::one(), &mut out);
        self.from_ids(&out.freeze())
    }

    fn nested_into<F: Factor>(&mut self, chain: &[(FieldId, i64)], s: &[(F, GaussRational)], c: &GaussRational, out: &mut Acc<F>) {
        if chain.len() == 1 {
            self.accumulate_state(chain[0].0 .0, chain[0].1, s, c, out);
            return;
        }
        for (b, d) in s {
            let cd = if c.is_one() { d.clone() } else { c * d };
            F::nested_accumulate(self, chain, *b, &cd, out);
        }
    }

    fn chain_side(&self, chain: &[(FieldId, i64)]) -> Side {
        chain.iter().fold(Side::Neutral, |acc, &(id, _)| acc.join(self.nodes[id.0 as usize].side))
    }

    fn nested_basis<F: Factor>(&mut self, chain: &[(FieldId, i64)], b: F) -> Rc<Terms<F>> {
        let key = (ChainKey::from_slice(chain), b);
        if let Some(hit) = F::nested_cache(self).get(&key) {
            return Rc::clone(hit);
        }
        let s = [(b, GaussRational::one())];
        let (head, k) = chain[0];
        let rest = &chain[1..];
        let rest_parity = rest.iter().fold(Parity::Even, |acc, &(id, _)| acc + self.parity(id));
        let sign = GaussRational::from_int(-koszul(self.parity(head), rest_parity));
        let one = GaussRational::one();
        let mut tmp = Acc::new();
        self.nested_into(rest, &s, &one, &mut tmp);
        let inner = tmp.freeze();
        let mut out = Acc::new();
        self.accumulate_state(head.0, k, &inner, &one, &mut out);
        self.accumulate_state(head.0, k, &s, &one, &mut tmp);
        let moved = tmp.freeze();
        self.nested_into(rest, &moved, &sign, &mut out);
        let out = Rc::new(out.freeze());
        self.reserve(out.len());
        F::nested_cache(self).insert(key, Rc::clone(&out));
        out
    }

    /// `sum c * [chain] b`, where an empty chain is the identity and a single-element
    /// chain is one mode.
    fn combination_ids(&mut self, combo: &[(GaussRational, Vec<(FieldId, i64)>)], b: Tid) -> Terms<Tid> {
        let s = [(b, GaussRational::one())];
        let mut out = Acc::new();
        for (c, chain) in combo {
            if chain.is_empty() {
                out.add(b, c.clone());
            } else {
                self.nested_into(chain, &s, c, &mut out);
            }
        }
        out.freeze()
    }

    fn tensor_id(&mut self, b: &TensorBasis) -> Tid {
        Tid(self.lattice_id(&b.lattice), self.weyl_id(&b.weyl))
    }

    /// Applies a linear combination of bracket chains to a basis vector.
    pub fn combination(&mut self, combo: &[(GaussRational, Vec<(FieldId, i64)>)], b: &TensorBasis) -> TensorState {
        let t = self.tensor_id(b);
        let out = self.combination_ids(combo, t);
        self.from_ids(&out)
    }

    /// Whether a linear combination of bracket chains annihilates a basis vector.
    pub fn combination_vanishes(&mut self, combo: &[(GaussRational, Vec<(FieldId, i64)>)], b: &TensorBasis) -> bool {
        let t = self.tensor_id(b);
        self.combination_ids(combo, t).is_empty()
    }

    pub fn nested_bracket_apply(&mut self, chain: &[(FieldExpr, i64)], s: &TensorState) -> TensorState {
        let ids: Vec<(FieldId, i64)> = chain.iter().map(|(e, k)| (self.intern(e), *k)).collect();
        self.nested(&ids, s)
    }
}

fn central_action<B>(ev: &Evaluator, k: i64, b: B) -> Terms<B> {
    if k == -1 {
        vec![(b, ev.central_value.clone())]
    } else {
        Vec::new()
    }
}

impl Factor for Lid {
    fn apply_atom(ev: &mut Evaluator, id: u32, kind: &Kind, k: i64, b: Self) -> Terms<Self> {
        let basis = ev.lattice_ids.get(b.0);
        let out = match kind {
            Kind::Heis(a) => heis_apply_basis(a, k, basis),
            Kind::Vertex(a) => {
                if k > vertex_bound(a, basis) {
                    return Vec::new();
                }
                let pairing = a.dot(&basis.exponent);
                let negate = cocycle(a, &basis.exponent) < 0;
                let shifted = a.add(&basis.exponent);
                let parts = ev.vertex_parts_of(id, a, b);
                let mut acc = Acc::new();
                for (removed, part) in parts.iter().enumerate() {
                    let added = removed as i64 - 1 - pairing - k;
                    if added < 0 || part.is_empty() {
                        continue;
                    }
                    let poly = ev.creation_of(id, a, added as u32);
                    for (h, c) in part.iter() {
                        let c = if negate { -c } else { c.clone() };
                        for (mono, d) in poly.iter() {
                            let l = ev.lattice_id(&LatticeBasis { exponent: shifted.clone(), heis: merge_heis(h, mono) });
                            acc.add(l, &c * d);
                        }
                    }
                }
                return acc.freeze();
            }
            Kind::Central => return central_action(ev, k, b),
            _ => unreachable!("Weyl atom on the lattice factor"),
        };
        out.iter().map(|(lb, c)| (ev.lattice_id(lb), c.clone())).collect()
    }

    fn atom_max_mode(ev: &Evaluator, kind: &Kind, b: Self) -> i64 {
        let basis = ev.lattice_ids.get(b.0);
        match kind {
            Kind::Heis(_) => basis.max_level().max(0) as i64,
            Kind::Vertex(a) => vertex_bound(a, basis),
            Kind::Central => -1,
            _ => i64::MIN,
        }
    }

    fn cache(ev: &mut Evaluator) -> &mut Cache<Self> {
        &mut ev.lattice_cache
    }

    fn nested_cache(ev: &mut Evaluator) -> &mut NestedCache<Self> {
        &mut ev.lattice_nested
    }
}

impl Factor for Wid {
    fn apply_atom(ev: &mut Evaluator, _id: u32, kind: &Kind, k: i64, b: Self) -> Terms<Self> {
        let out = match kind {
            Kind::Weyl(gens) => weyl_apply_basis(ev.rank, gens, k, ev.weyl_ids.get(b.0)),
            Kind::Central => return central_action(ev, k, b),
            _ => unreachable!("lattice atom on the Weyl factor"),
        };
        out.iter().map(|(wb, c)| (ev.weyl_id(wb), c.clone())).collect()
    }

    fn atom_max_mode(ev: &Evaluator, kind: &Kind, b: Self) -> i64 {
        match kind {
            Kind::Weyl(_) => ev.weyl_ids.get(b.0).max_level() as i64 - 1,
            Kind::Central => -1,
            _ => i64::MIN,
        }
    }

    fn cache(ev: &mut Evaluator) -> &mut Cache<Self> {
        &mut ev.weyl_cache
    }

    fn nested_cache(ev: &mut Evaluator) -> &mut NestedCache<Self> {
        &mut ev.weyl_nested
    }
}

impl Factor for Tid {
    fn apply_atom(ev: &mut Evaluator, id: u32, kind: &Kind, k: i64, b: Self) -> Terms<Self> {
        match kind {
            Kind::Weyl(_) => Wid::apply_atom(ev, id, kind, k, b.1).into_iter().map(|(w, c)| (Tid(b.0, w), c)).collect(),
            _ => Lid::apply_atom(ev, id, kind, k, b.0).into_iter().map(|(l, c)| (Tid(l, b.1), c)).collect(),
        }
    }

    fn atom_max_mode(ev: &Evaluator, kind: &Kind, b: Self) -> i64 {
        match kind {
            Kind::Weyl(_) => Wid::atom_max_mode(ev, kind, b.1),
            _ => Lid::atom_max_mode(ev, kind, b.0),
        }
    }

    fn cache(ev: &mut Evaluator) -> &mut Cache<Self> {
        &mut ev.tensor_cache
    }

    fn nested_cache(ev: &mut Evaluator) -> &mut NestedCache<Self> {
        &mut ev.tensor_nested
    }

    fn nested_accumulate(ev: &mut Evaluator, chain: &[(FieldId, i64)], b: Self, c: &GaussRational, out: &mut Acc<Self>) {
        match ev.chain_side(chain) {
            Side::Lattice | Side::Neutral => {
                let r = ev.nested_basis(chain, b.0);
                for (l, d) in r.iter() {
                    out.add(Tid(*l, b.1), c * d);
                }
            }
            Side::Weyl => {
                let r = ev.nested_basis(chain, b.1);
                for (w, d) in r.iter() {
                    out.add(Tid(b.0, *w), c * d);
                }
            }
            Side::Mixed => {
                let r = ev.nested_basis(chain, b);
                out.add_scaled(&r, c);
            }
        }
    }

    fn accumulate(ev: &mut Evaluator, id: u32, k: i64, b: Self, c: &GaussRational, out: &mut Acc<Self>) {
        let unit = c.is_one();
        match ev.nodes[id as usize].side {
            Side::Lattice | Side::Neutral => {
                let l = ev.eval_on(id, k, b.0);
                for (lb, d) in l.iter() {
                    out.add(Tid(*lb, b.1), if unit { d.clone() } else { c * d });
                }
            }
            Side::Weyl => {
                let w = ev.eval_on(id, k, b.1);
                for (wb, d) in w.iter() {
                    out.add(Tid(b.0, *wb), if unit { d.clone() } else { c * d });
                }
            }
            Side::Mixed => {
                let r = ev.eval_on(id, k, b);
                out.add_scaled(&r, c);
            }
        }
    }
}

/// Mode `k` of `e` on `s`, with `K` acting by `central_value`.
pub fn eval_mode(rank: usize, central_value: &GaussRational, e: &FieldExpr, k: i64, s: &TensorState) -> TensorState {
    Evaluator::new(rank, central_value.clone()).eval_mode(e, k, s)
}

/// `[a(p), b(q)] s`.
pub fn bracket_apply(
    rank: usize,
    central_value: &GaussRational,
    a: &FieldExpr,
    p: i64,
    b: &FieldExpr,
    q: i64,
    s: &TensorState,
) -> TensorState {
    Evaluator::new(rank, central_value.clone()).bracket_apply(a, p, b, q, s)
}

/// Right-nested super-bracket of a chain of field modes applied to `s`.
pub fn nested_bracket_apply(
    rank: usize,
    central_value: &GaussRational,
    chain: &[(FieldExpr, i64)],
    s: &TensorState,
) -> TensorState {
    Evaluator::new(rank, central_value.clone()).nested_bracket_apply(chain, s)
}
