//! The relation suite: every defining relation of the toroidal superalgebra checked
//! mode by mode on a finite family of test states.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::field::{Evaluator, FieldExpr, FieldId, TensorBasis, TensorState};
use crate::lattice::LatticeBasis;
use crate::lincomb::LinComb;
use crate::parse::Role;
use crate::roots::{LatticeVector, RootSystem};
use crate::scalar::GaussRational;
use crate::table::{differing_entries, ForcingInstance, GeneratorTable, ManifestEntry, Variant};
use crate::weyl::{gen_pairing, WeylMonomial};

/// The relation families. `Plus`/`Minus` select the sign for families stated for both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    Central,
    Cartan,
    CartanRoot(bool),
    RootRoot,
    SerreSelf(bool),
    SerreUnlinked(bool),
    SerreIsotropic(bool),
    SerreNested(bool),
}

impl Relation {
    pub fn id(self) -> &'static str {
        match self {
            Relation::Central => "1",
            Relation::Cartan => "2",
            Relation::CartanRoot(true) => "3+",
            Relation::CartanRoot(false) => "3-",
            Relation::RootRoot => "4",
            Relation::SerreSelf(_) => "5a",
            Relation::SerreUnlinked(_) => "5b",
            Relation::SerreIsotropic(_) => "5c",
            Relation::SerreNested(_) => "5d",
        }
    }

    /// Display name including the sign for Serre families, e.g. `5d+`.
    pub fn label(self) -> String {
        match self {
            Relation::SerreSelf(s) | Relation::SerreUnlinked(s) | Relation::SerreIsotropic(s) | Relation::SerreNested(s) => {
                format!("{}{}", self.id(), if s { "+" } else { "-" })
            }
            _ => self.id().to_string(),
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// One relation at fixed indices and modes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationInstance {
    pub relation: Relation,
    pub i: usize,
    pub j: usize,
    pub modes: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteConfig {
    pub m: i64,
    pub n: i64,
    pub mode_range: i64,
    pub energy_cap: u32,
    pub charge_cap: i64,
    pub word_depth: u32,
    pub variant: Variant,
    /// Relation ids or prefixes (`3` selects `3+` and `3-`); empty selects all.
    pub relations: Vec<String>,
    /// Drop tensor factors no table entry acts on before checking.
    pub reduce_spectators: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            m: 2,
            n: 1,
            mode_range: 2,
            energy_cap: 3,
            charge_cap: 4,
            word_depth: 2,
            variant: Variant::Corrected,
            relations: Vec::new(),
            reduce_spectators: true,
        }
    }
}

impl SuiteConfig {
    pub fn selects(&self, r: Relation) -> bool {
        self.relations.is_empty() || self.relations.iter().any(|f| r.label().starts_with(f.as_str()) || r.id() == f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl FromStr for Status {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pass" => Ok(Status::Pass),
            "fail" => Ok(Status::Fail),
            other => Err(other.to_string()),
        }
    }
}

/// Outcome of one relation instance over all test states.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationReport {
    pub instance: RelationInstance,
    /// Number of test states checked, or the first failing state.
    pub state: String,
    pub status: Status,
    pub lhs: Option<TensorState>,
    pub rhs: Option<TensorState>,
}

/// A central coefficient read off `[a(1), b(-1)]` on the vacuum.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelRecord {
    pub relation: Relation,
    pub i: usize,
    pub j: usize,
    pub coefficient: GaussRational,
    pub expected: GaussRational,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Summary {
    pub checked: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub reports: Vec<RelationReport>,
    pub summary: Summary,
    pub levels: Vec<LevelRecord>,
    pub states: usize,
}

/// Evaluates relation sides for one generator table.
pub struct Checker<'a> {
    pub sys: &'a RootSystem,
    pub table: &'a GeneratorTable,
    pub ev: Evaluator,
    plus: Vec<FieldId>,
    minus: Vec<FieldId>,
    cartan: Vec<FieldId>,
    central: FieldId,
}

impl<'a> Checker<'a> {
    pub fn new(sys: &'a RootSystem, table: &'a GeneratorTable) -> Self {
        let mut ev = Evaluator::new(sys.rank(), table.central_value.clone());
        let plus = table.plus.iter().map(|e| ev.intern(e)).collect();
        let minus = table.minus.iter().map(|e| ev.intern(e)).collect();
        let cartan = table.cartan.iter().map(|e| ev.intern(e)).collect();
        let central = ev.intern(&FieldExpr::CentralK);
        Checker { sys, table, ev, plus, minus, cartan, central }
    }

    fn root(&self, i: usize, plus: bool) -> FieldId {
        if plus {
            self.plus[i]
        } else {
            self.minus[i]
        }
    }

    pub fn id(&self, i: usize, role: Role) -> FieldId {
        match role {
            Role::Plus => self.plus[i],
            Role::Minus => self.minus[i],
            Role::Cartan => self.cartan[i],
        }
    }

    /// Normalization of the root-root bracket: `-2/(a|a)`, or `-1` for isotropic roots.
    pub fn root_root_scale(&self, i: usize) -> GaussRational {
        let form = self.sys.root_form(i, i);
        if form == 0 {
            GaussRational::from_int(-1)
        } else {
            GaussRational::ratio(-2, form)
        }
    }

    /// Both sides of an instance as combinations of bracket chains.
    pub fn combinations(&self, inst: &RelationInstance) -> (Combination, Combination) {
        let (i, j) = (inst.i, inst.j);
        let kappa = self.table.central_value.clone();
        let m = &inst.modes;
        let one = GaussRational::one();
        let int = GaussRational::from_int;
        match inst.relation {
            Relation::Central => {
                let lhs = vec![
                    (one.clone(), vec![(self.central, m[0]), (self.plus[j], m[1])]),
                    (one, vec![(self.central, m[0]), (self.minus[j], m[1])]),
                ];
                (lhs, Vec::new())
            }
            Relation::Cartan => {
                let (p, q) = (m[0], m[1]);
                let lhs = vec![(one, vec![(self.cartan[i], p), (self.cartan[j], q)])];
                let mut rhs = Vec::new();
                if p + q == 0 {
                    rhs.push((&kappa * &int(self.sys.root_form(i, j) * p), Vec::new()));
                }
                (lhs, rhs)
            }
            Relation::CartanRoot(sign) => {
                let (p, q) = (m[0], m[1]);
                let x = self.root(j, sign);
                let lhs = vec![(one, vec![(self.cartan[i], p), (x, q)])];
                let c = self.sys.root_form(i, j) * if sign { 1 } else { -1 };
                (lhs, vec![(int(c), vec![(x, p + q)])])
            }
            Relation::RootRoot => {
                let (p, q) = (m[0], m[1]);
                let lhs = vec![(one, vec![(self.plus[i], p), (self.minus[j], q)])];
                if i != j {
                    return (lhs, Vec::new());
                }
                let scale = self.root_root_scale(i);
                let mut rhs = vec![(scale.clone(), vec![(self.cartan[i], p + q)])];
                if p + q == 0 {
                    rhs.push((&scale * &(&kappa * &int(p)), Vec::new()));
                }
                (lhs, rhs)
            }
            Relation::SerreSelf(sign) => {
                let x = self.root(i, sign);
                (vec![(one, vec![(x, m[0]), (x, m[1])])], Vec::new())
            }
            Relation::SerreUnlinked(sign) => {
                let (x, y) = (self.root(i, sign), self.root(j, sign));
                (vec![(one, vec![(x, m[0]), (y, m[1])])], Vec::new())
            }
            Relation::SerreIsotropic(sign) | Relation::SerreNested(sign) => {
                let (x, y) = (self.root(i, sign), self.root(j, sign));
                let last = m.len() - 1;
                let mut chain: Vec<(FieldId, i64)> = m[..last].iter().map(|&k| (x, k)).collect();
                chain.push((y, m[last]));
                (vec![(one, chain)], Vec::new())
            }
        }
    }

    /// `(lhs, rhs)` of an instance on a basis vector.
    pub fn sides(&mut self, inst: &RelationInstance, b: &TensorBasis) -> (TensorState, TensorState) {
        let (lhs, rhs) = self.combinations(inst);
        (self.ev.combination(&lhs, b), self.ev.combination(&rhs, b))
    }

    /// `lhs - rhs` of an instance.
    pub fn difference(&self, inst: &RelationInstance) -> Combination {
        let (mut diff, rhs) = self.combinations(inst);
        diff.extend(rhs.into_iter().map(|(c, chain)| (-c, chain)));
        diff
    }
}

/// A linear combination of bracket chains; the empty chain is the identity.
pub type Combination = Vec<(GaussRational, Vec<(FieldId, i64)>)>;

fn mode_tuples(range: i64, len: usize) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for t in &out {
            for k in -range..=range {
                let mut t = t.clone();
                t.push(k);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// All relation instances selected by the configuration, in canonical order.
pub fn relation_instances(sys: &RootSystem, config: &SuiteConfig) -> Vec<RelationInstance> {
    let nodes = sys.nodes();
    let b = config.mode_range;
    let pairs = mode_tuples(b, 2);
    let mut out = Vec::new();
    let mut push = |relation: Relation, i: usize, j: usize, modes: &[Vec<i64>]| {
        if config.selects(relation) {
            for m in modes {
                out.push(RelationInstance { relation, i, j, modes: m.clone() });
            }
        }
    };
    for j in 0..nodes {
        push(Relation::Central, j, j, &pairs);
    }
    for i in 0..nodes {
        for j in 0..nodes {
            push(Relation::Cartan, i, j, &pairs);
        }
    }
    for sign in [true, false] {
        for i in 0..nodes {
            for j in 0..nodes {
                push(Relation::CartanRoot(sign), i, j, &pairs);
            }
        }
    }
    for i in 0..nodes {
        for j in 0..nodes {
            push(Relation::RootRoot, i, j, &pairs);
        }
    }
    for sign in [true, false] {
        for i in 0..nodes {
            push(Relation::SerreSelf(sign), i, i, &pairs);
        }
        for i in 0..nodes {
            for j in 0..nodes {
                if i == j {
                    continue;
                }
                let (aii, aij) = (sys.cartan[i][i], sys.cartan[i][j]);
                if aii == 0 && aij == 0 {
                    push(Relation::SerreUnlinked(sign), i, j, &pairs);
                } else if aii == 0 {
                    push(Relation::SerreIsotropic(sign), i, j, &mode_tuples(b, 3));
                } else if aij <= 0 {
                    let depth = (1 - aij) as usize;
                    push(Relation::SerreNested(sign), i, j, &mode_tuples(b, depth + 1));
                }
            }
        }
    }
    out
}

/// Tensor factors some table entry can act on nontrivially.
#[derive(Debug, Clone)]
pub struct ActiveFactors {
    pub directions: BTreeSet<usize>,
    pub weyl: BTreeSet<u16>,
}

fn collect_atoms<'e>(e: &'e FieldExpr, out: &mut Vec<&'e FieldExpr>) {
    match e {
        FieldExpr::NormalQuad(a, b) => {
            collect_atoms(a, out);
            collect_atoms(b, out);
        }
        FieldExpr::ScalarMul(_, x) => collect_atoms(x, out),
        FieldExpr::Sum(parts) => parts.iter().for_each(|p| collect_atoms(p, out)),
        atom => out.push(atom),
    }
}

/// Lattice charge of each summand; spectator reduction needs one charge per entry.
fn homogeneous_charge(e: &FieldExpr, rank: usize) -> bool {
    let mut charges = BTreeSet::new();
    for (_, t) in e.summands() {
        let mut atoms = Vec::new();
        collect_atoms(t, &mut atoms);
        let mut c = LatticeVector::zero(rank);
        for a in atoms {
            if let FieldExpr::Vertex(v) = a {
                c = c.add(v);
            }
        }
        charges.insert(c);
    }
    charges.len() <= 1
}

impl ActiveFactors {
    pub fn of(table: &GeneratorTable, rank: usize) -> Self {
        let mut directions = BTreeSet::new();
        let mut used_gens = BTreeSet::new();
        for i in 0..table.nodes() {
            for role in Role::ALL {
                let mut atoms = Vec::new();
                collect_atoms(table.entry(i, role), &mut atoms);
                for a in atoms {
                    match a {
                        FieldExpr::HeisCurrent(v) | FieldExpr::Vertex(v) => {
                            directions.extend(v.0.iter().enumerate().filter(|(_, &c)| c != 0).map(|(d, _)| d));
                        }
                        FieldExpr::WeylAtom(u) => {
                            used_gens.extend(crate::weyl::cvector_gens(rank, u).into_iter().map(|(g, _)| g));
                        }
                        _ => {}
                    }
                }
            }
        }
        let total = 2 * (rank + 1) as u16;
        let weyl = (0..total).filter(|&h| used_gens.iter().any(|&g| gen_pairing(rank, g, h) != 0)).collect();
        ActiveFactors { directions, weyl }
    }

    /// Everything is active: no reduction.
    pub fn all(rank: usize) -> Self {
        ActiveFactors { directions: (0..rank).collect(), weyl: (0..2 * (rank + 1) as u16).collect() }
    }

    pub fn strip(&self, b: &TensorBasis) -> TensorBasis {
        let exponent = LatticeVector(
            b.lattice.exponent.0.iter().enumerate().map(|(d, &c)| if self.directions.contains(&d) { c } else { 0 }).collect(),
        );
        let heis = b.lattice.heis.iter().copied().filter(|&(d, _)| self.directions.contains(&(d as usize))).collect();
        let weyl = b.weyl.0.iter().copied().filter(|&(g, _)| self.weyl.contains(&g)).collect();
        TensorBasis { lattice: LatticeBasis::with_heis(exponent, heis), weyl: WeylMonomial::from_factors(weyl) }
    }
}

/// Lattice vectors over the given directions with squared norm at most `cap`.
pub fn charge_ball(rank: usize, directions: &[usize], cap: i64) -> Vec<LatticeVector> {
    let bound = (cap as f64).sqrt().floor() as i64;
    let mut out = vec![(LatticeVector::zero(rank), 0i64)];
    for &d in directions {
        let mut next = Vec::new();
        for (v, norm) in &out {
            for c in -bound..=bound {
                let nn = norm + c * c;
                if nn <= cap {
                    let mut w = v.clone();
                    w.0[d] = c;
                    next.push((w, nn));
                }
            }
        }
        out = next;
    }
    out.into_iter().map(|(v, _)| v).collect()
}

/// Multisets of `(generator, level)` creators with total level at most `cap`.
fn creator_monomials(gens: &[u16], cap: u32) -> Vec<Vec<(u16, u16)>> {
    let mut slots: Vec<(u16, u16)> = Vec::new();
    for level in 1..=cap as u16 {
        for &g in gens {
            slots.push((g, level));
        }
    }
    fn rec(slots: &[(u16, u16)], start: usize, left: u32, acc: &mut Vec<(u16, u16)>, out: &mut Vec<Vec<(u16, u16)>>) {
        out.push(acc.clone());
        for k in start..slots.len() {
            let lvl = slots[k].1 as u32;
            if lvl <= left {
                acc.push(slots[k]);
                rec(slots, k, left - lvl, acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(&slots, 0, cap, &mut Vec::new(), &mut out);
    out
}

/// Monomial test states with energy and charge caps, over the given factors.
pub fn monomial_states(rank: usize, active: &ActiveFactors, energy_cap: u32, charge_cap: i64) -> Vec<TensorBasis> {
    let dirs: Vec<usize> = active.directions.iter().copied().collect();
    let charges = charge_ball(rank, &dirs, charge_cap);
    // heisenberg creators use generator ids offset past the Weyl ones
    let offset = 1000u16;
    let mut gens: Vec<u16> = dirs.iter().map(|&d| offset + d as u16).collect();
    gens.extend(active.weyl.iter().copied());
    let monos = creator_monomials(&gens, energy_cap);
    let mut out = Vec::with_capacity(charges.len() * monos.len());
    for c in &charges {
        for mono in &monos {
            let heis = mono.iter().filter(|(g, _)| *g >= offset).map(|&(g, l)| (g - offset, l)).collect();
            let weyl = mono.iter().filter(|(g, _)| *g < offset).copied().collect();
            out.push(TensorBasis { lattice: LatticeBasis::with_heis(c.clone(), heis), weyl: WeylMonomial::from_factors(weyl) });
        }
    }
    out
}

/// States reached from the vacuum by at most `depth` generator modes.
pub fn word_states(checker: &mut Checker, mode_range: i64, depth: u32) -> Vec<TensorState> {
    let rank = checker.sys.rank();
    let mut ops = Vec::new();
    for i in 0..checker.table.nodes() {
        for role in Role::ALL {
            for k in -mode_range..=mode_range {
                ops.push((checker.id(i, role), k));
            }
        }
    }
    let mut frontier = vec![crate::field::vacuum(rank)];
    let mut out = Vec::new();
    for _ in 0..depth {
        let mut next = Vec::new();
        for s in &frontier {
            for &(id, k) in &ops {
                let t = checker.ev.eval(id, k, s);
                if !t.is_zero() {
                    next.push(t);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

pub fn render_basis(b: &TensorBasis, rank: usize) -> String {
    format!("{} | {}", b.lattice.render(), b.weyl.render(rank))
}

/// The deterministic list of basis vectors the suite checks on.
pub fn test_basis(checker: &mut Checker, config: &SuiteConfig) -> Vec<TensorBasis> {
    let rank = checker.sys.rank();
    let reduce = config.reduce_spectators
        && (0..checker.table.nodes()).all(|i| Role::ALL.iter().all(|&r| homogeneous_charge(checker.table.entry(i, r), rank)));
    let active = if reduce { ActiveFactors::of(checker.table, rank) } else { ActiveFactors::all(rank) };
    let mut set: BTreeSet<TensorBasis> = BTreeSet::new();
    set.insert(TensorBasis::vacuum(rank));
    for b in monomial_states(rank, &active, config.energy_cap, config.charge_cap) {
        set.insert(b);
    }
    for s in word_states(checker, config.mode_range, config.word_depth) {
        for b in s.support() {
            set.insert(active.strip(b));
        }
    }
    set.into_iter().collect()
}

/// Test states as listed in the configuration: vacuum, monomials, then words.
pub fn test_states(sys: &RootSystem, table: &GeneratorTable, config: &SuiteConfig) -> Vec<TensorState> {
    let rank = sys.rank();
    let mut checker = Checker::new(sys, table);
    let mut out = vec![crate::field::vacuum(rank)];
    for b in monomial_states(rank, &ActiveFactors::all(rank), config.energy_cap, config.charge_cap) {
        if b != TensorBasis::vacuum(rank) {
            out.push(TensorState::basis(b));
        }
    }
    out.extend(word_states(&mut checker, config.mode_range, config.word_depth));
    out
}

/// Runs the suite; with `stop_at_failure` it returns right after the first failing instance.
pub fn run_suite_with(sys: &RootSystem, table: &GeneratorTable, config: &SuiteConfig, stop_at_failure: bool) -> SuiteOutcome {
    run_instances(sys, table, config, relation_instances(sys, config), stop_at_failure)
}

/// Checks the given instances on the configured test states.
pub fn run_instances(
    sys: &RootSystem,
    table: &GeneratorTable,
    config: &SuiteConfig,
    instances: Vec<RelationInstance>,
    stop_at_failure: bool,
) -> SuiteOutcome {
    let rank = sys.rank();
    let mut checker = Checker::new(sys, table);
    let basis = test_basis(&mut checker, config);
    let mut reports = Vec::new();
    let mut summary = Summary::default();
    for inst in instances {
        let mut failure = None;
        let diff = checker.difference(&inst);
        for b in &basis {
            if !checker.ev.combination_vanishes(&diff, b) {
                let (lhs, rhs) = checker.sides(&inst, b);
                failure = Some((render_basis(b, rank), lhs, rhs));
                break;
            }
        }
        summary.checked += 1;
        let report = match failure {
            None => {
                summary.passed += 1;
                RelationReport { instance: inst, state: format!("all {}", basis.len()), status: Status::Pass, lhs: None, rhs: None }
            }
            Some((state, lhs, rhs)) => {
                summary.failed += 1;
                RelationReport { instance: inst, state, status: Status::Fail, lhs: Some(lhs), rhs: Some(rhs) }
            }
        };
        let failed = report.status == Status::Fail;
        reports.push(report);
        if failed && stop_at_failure {
            break;
        }
    }
    let levels = if stop_at_failure { Vec::new() } else { harvest_levels(&mut checker, config) };
    SuiteOutcome { reports, summary, levels, states: basis.len() }
}

pub fn run_suite(sys: &RootSystem, table: &GeneratorTable, config: &SuiteConfig) -> SuiteOutcome {
    run_suite_with(sys, table, config, false)
}

/// Central coefficients of `[alpha_i(1), alpha_j(-1)]` and `[x_i^+(1), x_i^-(-1)]` on the vacuum.
pub fn harvest_levels(checker: &mut Checker, config: &SuiteConfig) -> Vec<LevelRecord> {
    let rank = checker.sys.rank();
    let vac = crate::field::vacuum(rank);
    let vb = TensorBasis::vacuum(rank);
    let level = GaussRational::from_int(-1);
    let nodes = checker.table.nodes();
    let mut out = Vec::new();
    if config.selects(Relation::Cartan) {
        for i in 0..nodes {
            for j in 0..nodes {
                let v = checker.ev.bracket(checker.cartan[i], 1, checker.cartan[j], -1, &vac);
                out.push(LevelRecord {
                    relation: Relation::Cartan,
                    i,
                    j,
                    coefficient: v.coeff(&vb),
                    expected: GaussRational::from_int(checker.sys.root_form(i, j)) * level.clone(),
                });
            }
        }
    }
    if config.selects(Relation::RootRoot) {
        for i in 0..nodes {
            let v = checker.ev.bracket(checker.plus[i], 1, checker.minus[i], -1, &vac);
            let scale = checker.root_root_scale(i);
            out.push(LevelRecord {
                relation: Relation::RootRoot,
                i,
                j: i,
                coefficient: v.coeff(&vb),
                expected: scale * level.clone(),
            });
        }
    }
    out
}

/// For every entry where the shipped tables differ: a failing instance of the corrected
/// table with only that entry reverted, or `None` if it still passes. Instances with
/// `i = j` equal to the entry's node are tried first, then the whole suite in order.
pub fn audit_entries(sys: &RootSystem, config: &SuiteConfig) -> Vec<((usize, Role), Option<ForcingInstance>, String, String)> {
    let printed = crate::table::generator_table(sys, &Variant::AsPrinted).expect("shipped table");
    let corrected = crate::table::generator_table(sys, &Variant::Corrected).expect("shipped table");
    let mut out = Vec::new();
    for (i, role) in differing_entries(&printed, &corrected) {
        let mut t = corrected.clone();
        t.set_entry(i, role, printed.entry(i, role).clone());
        let (diagonal, rest): (Vec<_>, Vec<_>) =
            relation_instances(sys, config).into_iter().partition(|inst| inst.i == i && inst.j == i);
        let mut outcome = run_instances(sys, &t, config, diagonal, true);
        if outcome.summary.failed == 0 {
            outcome = run_instances(sys, &t, config, rest, true);
        }
        let forcing = outcome.reports.iter().find(|r| r.status == Status::Fail).map(|r| ForcingInstance {
            relation: r.instance.relation.label(),
            i: r.instance.i,
            j: r.instance.j,
            modes: r.instance.modes.clone(),
            state: r.state.clone(),
        });
        out.push((
            (i, role),
            forcing,
            crate::parse::render_expr(printed.entry(i, role)),
            crate::parse::render_expr(corrected.entry(i, role)),
        ));
    }
    out
}

/// The discrepancy manifest: entries whose as-printed text alone breaks the suite.
pub fn discrepancy_manifest(sys: &RootSystem, config: &SuiteConfig) -> crate::table::Manifest {
    let entries = audit_entries(sys, config)
        .into_iter()
        .filter_map(|((index, role), forcing, as_printed, corrected)| {
            forcing.map(|forcing| ManifestEntry { index, role: role.name().to_string(), as_printed, corrected, forcing })
        })
        .collect();
    crate::table::Manifest { m: sys.m, n: sys.n, entries }
}

/// Table entries implicated by failing reports, for comparison with the manifest.
pub fn failing_entries(outcome: &SuiteOutcome) -> BTreeSet<(Relation, usize, usize)> {
    outcome
        .reports
        .iter()
        .filter(|r| r.status == Status::Fail)
        .map(|r| (r.instance.relation, r.instance.i, r.instance.j))
        .collect()
}

/// Groups a state's terms by basis vector, mainly for diagnostics.
pub fn support_map(s: &TensorState) -> HashMap<TensorBasis, GaussRational> {
    s.iter().map(|(b, c)| (b.clone(), c.clone())).collect()
}

pub type BasisState = LinComb<TensorBasis>;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::generator_table;

    fn setup(m: i64, n: i64, v: Variant) -> (RootSystem, GeneratorTable) {
        let sys = RootSystem::build(m, n).unwrap();
        let t = generator_table(&sys, &v).unwrap();
        (sys, t)
    }

    #[test]
    fn caps_zero_gives_vacuum() {
        let (sys, t) = setup(2, 1, Variant::Corrected);
        let cfg = SuiteConfig { energy_cap: 0, charge_cap: 0, word_depth: 0, ..SuiteConfig::default() };
        let states = test_states(&sys, &t, &cfg);
        assert_eq!(states, vec![crate::field::vacuum(3)]);
    }

    #[test]
    fn energy_one_count() {
        let (sys, t) = setup(2, 1, Variant::Corrected);
        let cfg = SuiteConfig { energy_cap: 1, charge_cap: 0, word_depth: 0, ..SuiteConfig::default() };
        let (m, n) = (2, 1);
        assert_eq!(test_states(&sys, &t, &cfg).len(), 1 + (m + n) + 2 * (n + m + 1));
    }

    #[test]
    fn word_states_reach_last_root_sector() {
        let (sys, t) = setup(2, 1, Variant::Corrected);
        let cfg = SuiteConfig { energy_cap: 0, charge_cap: 0, word_depth: 1, ..SuiteConfig::default() };
        let states = test_states(&sys, &t, &cfg);
        let target = TensorState::basis(TensorBasis {
            lattice: LatticeBasis::charged(LatticeVector(smallvec::smallvec![0, 1, 1])),
            weyl: WeylMonomial::vacuum(),
        });
        assert!(states.contains(&target));
    }

    #[test]
    fn relation_filter() {
        let sys = RootSystem::build(2, 1).unwrap();
        let cfg = SuiteConfig { relations: vec!["2".into()], ..SuiteConfig::default() };
        let inst = relation_instances(&sys, &cfg);
        assert!(!inst.is_empty());
        assert!(inst.iter().all(|r| r.relation == Relation::Cartan));
        let cfg = SuiteConfig { relations: vec!["5".into()], ..SuiteConfig::default() };
        assert!(relation_instances(&sys, &cfg).iter().all(|r| r.relation.id().starts_with('5')));
    }

    #[test]
    fn serre_depth_three_for_double_link() {
        let sys = RootSystem::build(2, 2).unwrap();
        let cfg = SuiteConfig { mode_range: 1, relations: vec!["5d".into()], ..SuiteConfig::default() };
        let inst = relation_instances(&sys, &cfg);
        let deep: Vec<_> = inst.iter().filter(|r| r.i == 1 && r.j == 0).collect();
        assert!(!deep.is_empty());
        assert!(deep.iter().all(|r| r.modes.len() == 4));
    }

    #[test]
    fn cartan_zero_zero_on_vacuum() {
        let (sys, t) = setup(2, 2, Variant::Corrected);
        let mut c = Checker::new(&sys, &t);
        let inst = RelationInstance { relation: Relation::Cartan, i: 0, j: 0, modes: vec![1, -1] };
        let (lhs, rhs) = c.sides(&inst, &TensorBasis::vacuum(4));
        assert_eq!(lhs, crate::field::vacuum(4).scaled(&GaussRational::from_int(-4)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn spectators_do_not_change_verdicts() {
        let (sys, t) = setup(2, 2, Variant::Corrected);
        let (_, printed) = setup(2, 2, Variant::AsPrinted);
        let rank = 4;
        let spect = TensorBasis {
            lattice: LatticeBasis::with_heis(LatticeVector(smallvec::smallvec![1, -1, 0, 1]), vec![(0, 1)]),
            weyl: WeylMonomial::from_factors(vec![(0, 1), (3, 1), (1, 1)]),
        };
        for table in [&t, &printed] {
            let active = ActiveFactors::of(table, rank);
            let stripped = active.strip(&spect);
            let mut c = Checker::new(&sys, table);
            let cfg = SuiteConfig { m: 2, n: 2, mode_range: 1, ..SuiteConfig::default() };
            for inst in relation_instances(&sys, &cfg).into_iter().step_by(7) {
                let (l1, r1) = c.sides(&inst, &spect);
                let (l2, r2) = c.sides(&inst, &stripped);
                assert_eq!(l1 == r1, l2 == r2, "{inst:?}");
            }
        }
    }
}
