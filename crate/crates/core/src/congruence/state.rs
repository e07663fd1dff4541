//! Saturation state for one set of context hypotheses.
//!
//! The state is an e-graph over a finite universe of βι-normal, locally
//! closed terms. Merges come from hypotheses, from congruence (application,
//! recursor and `Eq`), from reducing an application whose head is equal to a
//! λ (or a recursor whose scrutinee is equal to a constructor), from binder
//! congruence, and from arithmetic deduction over the algebraic caps of the
//! classes. Every merge is an edge of a proof forest, so any two terms in
//! one class can be explained by a derivation.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::Arc;

use num_bigint::BigInt;

use super::proof::{AlienEntry, Proof, Rule};
use super::{ConvError, Conversion, Hypothesis, Origin};
use crate::arith::witness::{compact, EntailmentWitness};
use crate::arith::{self, cap, Atom, Entailment, LinEq, LinPoly, Model, Search};
use crate::reduce::redex_kind;
use crate::term::{Class, Name, Term, TermKind};

pub(crate) type NodeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Consistency {
    Consistent,
    Inconsistent,
    /// The arithmetic engine could not decide the pool within its limits.
    Undetermined,
}

#[derive(Clone, Copy, Debug)]
enum Shape {
    App(NodeId, NodeId),
    Rec([NodeId; 4]),
    EqIntro(NodeId),
    Binder(NodeId),
    Atom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Sig {
    App(NodeId, NodeId),
    Rec([NodeId; 4]),
    EqIntro(NodeId),
}

#[derive(Debug)]
struct DedRecord {
    premises: Vec<(NodeId, NodeId)>,
    /// Abstracted premises and goal; no goal for a refutation.
    eqs: Vec<LinEq>,
    goal: Option<LinEq>,
    aliens: Vec<(u32, NodeId)>,
    witness: EntailmentWitness,
}

#[derive(Debug)]
enum Reason {
    Hyp(usize),
    Congruence,
    Reduction { via: NodeId, redex: Term, paths: Vec<Vec<u8>> },
    /// Bodies opened at `var`; `hyps` is `None` when the extended context
    /// has the same hypotheses as this state.
    Binder { var: Name, left: Term, right: Term, hyps: Option<Vec<Hypothesis>> },
    Ded(Arc<DedRecord>),
    Collapse,
}

impl Reason {
    fn origin(&self) -> Origin {
        match self {
            Reason::Hyp(_) => Origin::Hypothesis,
            Reason::Congruence => Origin::Congruence,
            Reason::Reduction { .. } => Origin::Reduction,
            Reason::Binder { .. } => Origin::Binder,
            Reason::Ded(_) => Origin::Arithmetic,
            Reason::Collapse => Origin::Collapse,
        }
    }
}

struct Edge {
    a: NodeId,
    b: NodeId,
    reason: Reason,
}

pub(crate) struct State {
    pub hyps: Vec<Hypothesis>,
    terms: Vec<Term>,
    shapes: Vec<Shape>,
    index: HashMap<Term, NodeId>,
    root: Vec<NodeId>,
    members: Vec<Vec<NodeId>>,
    /// λ-nodes and constructor (`0`, `S t`) nodes of each class.
    lams: Vec<Vec<NodeId>>,
    ctors: Vec<Vec<NodeId>>,
    uses: Vec<Vec<NodeId>>,
    sigs: HashMap<Sig, NodeId>,
    adj: Vec<Vec<usize>>,
    edges: Vec<Edge>,
    pending: VecDeque<(NodeId, NodeId, Reason)>,
    pub consistency: Consistency,
    refutation: Option<Arc<DedRecord>>,
    models: Vec<Model>,
    reduced: HashSet<(NodeId, NodeId)>,
    binder_memo: HashMap<(NodeId, NodeId), u64>,
    in_progress: HashSet<(NodeId, NodeId)>,
    merges: u64,
    zero: NodeId,
    explained: HashMap<(NodeId, NodeId), Arc<Proof>>,
    edge_proofs: HashMap<(usize, bool), Arc<Proof>>,
    absurd: Option<Arc<Proof>>,
    pub diagnostics: Vec<String>,
}

impl State {
    pub fn new(hyps: Vec<Hypothesis>, eng: &Conversion) -> Result<State, ConvError> {
        let mut st = State {
            hyps: Vec::new(),
            terms: Vec::new(),
            shapes: Vec::new(),
            index: HashMap::new(),
            root: Vec::new(),
            members: Vec::new(),
            lams: Vec::new(),
            ctors: Vec::new(),
            uses: Vec::new(),
            sigs: HashMap::new(),
            adj: Vec::new(),
            edges: Vec::new(),
            pending: VecDeque::new(),
            consistency: Consistency::Consistent,
            refutation: None,
            models: Vec::new(),
            reduced: HashSet::new(),
            binder_memo: HashMap::new(),
            in_progress: HashSet::new(),
            merges: 0,
            zero: 0,
            explained: HashMap::new(),
            edge_proofs: HashMap::new(),
            absurd: None,
            diagnostics: Vec::new(),
        };
        st.zero = st.add(&Term::zero(), eng)?;
        for (i, h) in hyps.iter().enumerate() {
            let l = st.add_normal(&h.lhs, eng)?;
            let r = st.add_normal(&h.rhs, eng)?;
            st.pending.push_back((l, r, Reason::Hyp(i)));
        }
        st.hyps = hyps;
        Ok(st)
    }

    pub fn same_class(&self, a: NodeId, b: NodeId) -> bool {
        self.root[a] == self.root[b]
    }

    /// Merge log in order: origin and the two terms joined.
    pub fn trace(&self) -> impl Iterator<Item = (Origin, &Term, &Term)> {
        self.edges.iter().map(|e| (e.reason.origin(), &self.terms[e.a], &self.terms[e.b]))
    }

    fn add_normal(&mut self, t: &Term, eng: &Conversion) -> Result<NodeId, ConvError> {
        let (nf, _) = eng.normal_form(t)?;
        self.add(&nf, eng)
    }

    /// Add a βι-normal, locally closed term and its subterms.
    pub fn add(&mut self, t: &Term, eng: &Conversion) -> Result<NodeId, ConvError> {
        if let Some(&id) = self.index.get(t) {
            return Ok(id);
        }
        if self.terms.len() >= eng.max_universe {
            return Err(ConvError::Universe(eng.max_universe));
        }
        let shape = match t.kind() {
            TermKind::App(f, a) => {
                let f = self.add(f, eng)?;
                Shape::App(f, self.add(a, eng)?)
            }
            TermKind::Rec(s, m, z, st) => {
                Shape::Rec([self.add(s, eng)?, self.add(m, eng)?, self.add(z, eng)?, self.add(st, eng)?])
            }
            TermKind::EqIntro(p) => Shape::EqIntro(self.add(p, eng)?),
            TermKind::Lam(b) | TermKind::Prod(b) => Shape::Binder(self.add(&b.domain, eng)?),
            _ => Shape::Atom,
        };
        let id = self.terms.len();
        self.terms.push(t.clone());
        self.shapes.push(shape);
        self.index.insert(t.clone(), id);
        self.root.push(id);
        self.members.push(vec![id]);
        self.lams.push(if matches!(t.kind(), TermKind::Lam(_)) { vec![id] } else { vec![] });
        let ctor = matches!(t.kind(), TermKind::Zero) || t.as_succ().is_some();
        self.ctors.push(if ctor { vec![id] } else { vec![] });
        self.uses.push(Vec::new());
        self.adj.push(Vec::new());
        if let Some(sig) = self.sig(id) {
            for c in self.children(id) {
                let r = self.root[c];
                self.uses[r].push(id);
            }
            match self.sigs.get(&sig) {
                Some(&other) => self.pending.push_back((id, other, Reason::Congruence)),
                None => {
                    self.sigs.insert(sig, id);
                }
            }
        }
        if self.consistency == Consistency::Inconsistent && t.class() == Class::O && id != self.zero {
            self.pending.push_back((id, self.zero, Reason::Collapse));
        }
        Ok(id)
    }

    fn children(&self, id: NodeId) -> Vec<NodeId> {
        match self.shapes[id] {
            Shape::App(f, a) => vec![f, a],
            Shape::Rec(c) => c.to_vec(),
            Shape::EqIntro(p) => vec![p],
            Shape::Binder(_) | Shape::Atom => vec![],
        }
    }

    fn sig(&self, id: NodeId) -> Option<Sig> {
        let r = |n: NodeId| self.root[n];
        match self.shapes[id] {
            Shape::App(f, a) => Some(Sig::App(r(f), r(a))),
            Shape::Rec(c) => Some(Sig::Rec(c.map(r))),
            Shape::EqIntro(p) => Some(Sig::EqIntro(r(p))),
            _ => None,
        }
    }

    fn union(&mut self, a: NodeId, b: NodeId, reason: Reason) {
        let (mut ra, mut rb) = (self.root[a], self.root[b]);
        if ra == rb {
            return;
        }
        let e = self.edges.len();
        self.edges.push(Edge { a, b, reason });
        self.adj[a].push(e);
        self.adj[b].push(e);
        self.merges += 1;
        if self.members[ra].len() < self.members[rb].len() {
            std::mem::swap(&mut ra, &mut rb);
        }
        let moved = std::mem::take(&mut self.members[rb]);
        for &m in &moved {
            self.root[m] = ra;
        }
        self.members[ra].extend(moved);
        let lams = std::mem::take(&mut self.lams[rb]);
        self.lams[ra].extend(lams);
        let ctors = std::mem::take(&mut self.ctors[rb]);
        self.ctors[ra].extend(ctors);
        for u in std::mem::take(&mut self.uses[rb]) {
            let sig = self.sig(u).expect("only compound nodes are uses");
            match self.sigs.get(&sig) {
                Some(&v) if self.root[v] != self.root[u] => self.pending.push_back((u, v, Reason::Congruence)),
                Some(_) => {}
                None => {
                    self.sigs.insert(sig, u);
                }
            }
            self.uses[ra].push(u);
        }
    }

    fn flush(&mut self) {
        while let Some((a, b, r)) = self.pending.pop_front() {
            self.union(a, b, r);
        }
    }

    /// Run all phases to a fixpoint over the current universe.
    pub fn saturate(&mut self, eng: &mut Conversion) -> Result<(), ConvError> {
        loop {
            self.flush();
            let before = (self.merges, self.terms.len());
            self.reductions(eng)?;
            self.flush();
            self.binders(eng)?;
            self.flush();
            if before == (self.merges, self.terms.len()) {
                self.deduce(eng);
                self.flush();
            }
            if before == (self.merges, self.terms.len()) && self.pending.is_empty() {
                return Ok(());
            }
        }
    }

    fn reductions(&mut self, eng: &mut Conversion) -> Result<(), ConvError> {
        let inconsistent = self.consistency == Consistency::Inconsistent;
        for id in 0..self.terms.len() {
            if inconsistent && self.terms[id].class() == Class::O {
                continue;
            }
            let with = match self.shapes[id] {
                Shape::App(f, _) => self.lams[self.root[f]].clone(),
                Shape::Rec([s, ..]) => self.ctors[self.root[s]].clone(),
                _ => continue,
            };
            for via in with {
                if !self.reduced.insert((id, via)) {
                    continue;
                }
                let redex = match self.shapes[id] {
                    Shape::App(_, a) => Term::app(self.terms[via].clone(), self.terms[a].clone()),
                    Shape::Rec([_, m, z, st]) => Term::rec(
                        self.terms[via].clone(),
                        self.terms[m].clone(),
                        self.terms[z].clone(),
                        self.terms[st].clone(),
                    ),
                    _ => unreachable!(),
                };
                if redex_kind(&redex).is_none() {
                    continue;
                }
                let (nf, paths) = eng.normal_form(&redex)?;
                let r = self.add(&nf, eng)?;
                self.pending.push_back((id, r, Reason::Reduction { via, redex, paths }));
            }
        }
        Ok(())
    }

    fn binders(&mut self, eng: &mut Conversion) -> Result<(), ConvError> {
        let inconsistent = self.consistency == Consistency::Inconsistent;
        let binders: Vec<NodeId> =
            (0..self.terms.len()).filter(|&i| matches!(self.shapes[i], Shape::Binder(_))).collect();
        for (k, &i) in binders.iter().enumerate() {
            for &j in &binders[k + 1..] {
                let (Shape::Binder(di), Shape::Binder(dj)) = (self.shapes[i], self.shapes[j]) else { unreachable!() };
                if self.same_class(i, j) || !self.same_class(di, dj) {
                    continue;
                }
                if inconsistent && self.terms[i].class() == Class::O {
                    continue;
                }
                let (bi, prod_i) = binder_of(&self.terms[i]);
                let (bj, prod_j) = binder_of(&self.terms[j]);
                if prod_i != prod_j || bi.annot != bj.annot || bi.var_sort != bj.var_sort {
                    continue;
                }
                if self.binder_memo.get(&(i, j)) == Some(&self.merges) || self.in_progress.contains(&(i, j)) {
                    continue;
                }
                self.in_progress.insert((i, j));
                let var = eng.fresh_var(&bi.name);
                let x = Term::var(var.clone(), bi.var_sort);
                let left = bi.body.instantiate(&x);
                let right = bj.body.instantiate(&x);
                let ext = eng.extended_hyps(&self.hyps, &var, bi.annot, &bi.domain);
                let result = match &ext {
                    None => self.decide(eng, &left, &right),
                    Some(h) => eng.decide_with(h, &left, &right),
                };
                self.in_progress.remove(&(i, j));
                if result? {
                    self.pending.push_back((i, j, Reason::Binder { var, left, right, hyps: ext }));
                    self.flush();
                } else {
                    self.binder_memo.insert((i, j), self.merges);
                }
            }
        }
        Ok(())
    }

    /// Decide `t ≃ u` for arbitrary locally closed terms.
    pub fn decide(&mut self, eng: &mut Conversion, t: &Term, u: &Term) -> Result<bool, ConvError> {
        let (a, b) = self.query(eng, t, u)?;
        Ok(self.same_class(a, b))
    }

    /// Add both normal forms and saturate; returns their nodes.
    fn query(&mut self, eng: &mut Conversion, t: &Term, u: &Term) -> Result<(NodeId, NodeId), ConvError> {
        let a = self.add_normal(t, eng)?;
        let b = self.add_normal(u, eng)?;
        if !self.same_class(a, b) {
            self.saturate(eng)?;
        }
        Ok((a, b))
    }

    /// A derivation of `t ≃ u`, if one exists.
    pub fn prove(&mut self, eng: &mut Conversion, t: &Term, u: &Term) -> Result<Option<Arc<Proof>>, ConvError> {
        let (a, b) = self.query(eng, t, u)?;
        if !self.same_class(a, b) {
            return Ok(None);
        }
        let (nt, pt) = eng.normal_form(t)?;
        let (nu, pu) = eng.normal_form(u)?;
        let mid = self.explain(eng, a, b)?;
        Ok(Proof::chain([Proof::reduction(t, &nt, pt), mid, Proof::sym(Proof::reduction(u, &nu, pu))]))
    }

    fn o_classes(&self) -> Vec<NodeId> {
        (0..self.terms.len())
            .filter(|&i| self.root[i] == i && !self.members[i].is_empty() && self.terms[i].class() == Class::O)
            .collect()
    }

    fn cap_of(&self, n: NodeId, seen: &mut Vec<(u32, NodeId)>) -> LinPoly {
        let mut alien = |t: &Term| {
            let id = self.index[t];
            let var = self.root[id] as u32;
            if !seen.contains(&(var, id)) {
                seen.push((var, id));
            }
            Atom::Alien(var)
        };
        cap(&self.terms[n], &mut alien)
    }

    /// The member of class `r` whose cap has the fewest aliens.
    fn base(&self, r: NodeId) -> (NodeId, LinPoly) {
        let aliens = |p: &LinPoly| p.atoms().filter(|a| matches!(a, Atom::Alien(_))).count();
        self.members[r]
            .iter()
            .map(|&m| (m, self.cap_of(m, &mut Vec::new())))
            .min_by_key(|(m, c)| (aliens(c), *m))
            .expect("classes are non-empty")
    }

    /// The equation pool: for each class, every member's cap equals the cap
    /// of the class's base member.
    fn pool(&self) -> (Vec<LinEq>, Vec<(NodeId, NodeId)>) {
        let mut eqs = Vec::new();
        let mut src = Vec::new();
        let mut seen = HashSet::new();
        for r in self.o_classes() {
            let (first, c0) = self.base(r);
            for &m in &self.members[r] {
                if m == first {
                    continue;
                }
                let e = LinEq::new(self.cap_of(m, &mut Vec::new()), c0.clone());
                if !e.is_trivial() && seen.insert(e.clone()) {
                    eqs.push(e);
                    src.push((m, first));
                }
            }
        }
        (eqs, src)
    }

    fn record(
        &self,
        pool: &[LinEq],
        src: &[(NodeId, NodeId)],
        goal: Option<(NodeId, NodeId, LinEq)>,
        w: &EntailmentWitness,
    ) -> DedRecord {
        let mut used = BTreeSet::new();
        w.below.used_equations(&mut used);
        w.above.used_equations(&mut used);
        let keep: Vec<usize> = used.into_iter().filter(|&i| i < pool.len()).collect();
        let witness = EntailmentWitness {
            below: compact(&w.below, pool.len(), &keep),
            above: compact(&w.above, pool.len(), &keep),
        };
        let premises: Vec<(NodeId, NodeId)> = keep.iter().map(|&i| src[i]).collect();
        let mut aliens = Vec::new();
        let goal_nodes = goal.as_ref().map(|(a, b, _)| (*a, *b));
        for &(a, b) in premises.iter().chain(goal_nodes.iter()) {
            self.cap_of(a, &mut aliens);
            self.cap_of(b, &mut aliens);
        }
        let eqs = keep.iter().map(|&i| pool[i].clone()).collect();
        DedRecord { premises, eqs, goal: goal.map(|g| g.2), aliens, witness }
    }

    fn deduce(&mut self, eng: &mut Conversion) {
        if self.consistency == Consistency::Inconsistent {
            return;
        }
        let (pool, src) = self.pool();
        self.models.retain(|m| pool.iter().all(|e| e.holds(&|a| value(m, a))));
        if self.models.is_empty() {
            match arith::solve(&pool, eng.arith) {
                Ok(Search::Sat(m)) => {
                    self.models.push(m);
                    self.consistency = Consistency::Consistent;
                }
                Ok(Search::Refuted(w)) => {
                    // Reused as an entailment witness, where the strict goal
                    // sits right after the premises.
                    let n = pool.len();
                    let w = w.remap(&|i| if i >= n { i + 1 } else { i });
                    let ew = EntailmentWitness { below: w.clone(), above: w };
                    self.refutation = Some(Arc::new(self.record(&pool, &src, None, &ew)));
                    self.consistency = Consistency::Inconsistent;
                    for n in 0..self.terms.len() {
                        if self.terms[n].class() == Class::O && !self.same_class(n, self.zero) {
                            self.pending.push_back((n, self.zero, Reason::Collapse));
                        }
                    }
                    return;
                }
                Err(e) => {
                    self.consistency = Consistency::Undetermined;
                    self.diagnostics.push(format!("consistency undetermined: {e}"));
                }
            }
        }
        let classes = self.o_classes();
        let bases: Vec<(NodeId, LinPoly)> = classes.iter().map(|&r| self.base(r)).collect();
        let caps: Vec<&LinPoly> = bases.iter().map(|(_, c)| c).collect();
        for i in 0..classes.len() {
            for j in i + 1..classes.len() {
                let separated = self.models.iter().any(|m| caps[i].eval(&|a| value(m, a)) != caps[j].eval(&|a| value(m, a)));
                if separated {
                    continue;
                }
                let goal = LinEq::new(caps[i].clone(), caps[j].clone());
                match arith::entails(&pool, &goal, eng.arith) {
                    Ok(Entailment::Entailed(w)) => {
                        let (a, b) = (bases[i].0, bases[j].0);
                        let rec = self.record(&pool, &src, Some((a, b, goal.clone())), &w);
                        self.pending.push_back((a, b, Reason::Ded(Arc::new(rec))));
                    }
                    Ok(Entailment::Countermodel(m)) => self.models.push(m),
                    Err(e) => self.diagnostics.push(format!("arithmetic unknown for {goal}: {e}")),
                }
            }
        }
    }

    /// Derivation of `terms[a] ≃ terms[b]` for two nodes of one class.
    pub fn explain(&mut self, eng: &mut Conversion, a: NodeId, b: NodeId) -> Result<Arc<Proof>, ConvError> {
        if a == b {
            return Ok(Proof::refl(&self.terms[a]));
        }
        if let Some(p) = self.explained.get(&(a, b)) {
            return Ok(p.clone());
        }
        let path = self.forest_path(a, b);
        let mut steps = Vec::with_capacity(path.len());
        for (e, forward) in path {
            steps.push(self.edge_proof(eng, e, forward)?);
        }
        let p = Proof::chain(steps).expect("distinct nodes have a non-empty path");
        self.explained.insert((a, b), p.clone());
        Ok(p)
    }

    /// Edges from `a` to `b` in the proof forest, with traversal direction.
    fn forest_path(&self, a: NodeId, b: NodeId) -> Vec<(usize, bool)> {
        let mut prev: HashMap<NodeId, (NodeId, usize)> = HashMap::new();
        let mut queue = VecDeque::from([a]);
        let mut seen = HashSet::from([a]);
        while let Some(n) = queue.pop_front() {
            if n == b {
                break;
            }
            for &e in &self.adj[n] {
                let m = if self.edges[e].a == n { self.edges[e].b } else { self.edges[e].a };
                if seen.insert(m) {
                    prev.insert(m, (n, e));
                    queue.push_back(m);
                }
            }
        }
        let mut path = Vec::new();
        let mut cur = b;
        while cur != a {
            let (p, e) = prev[&cur];
            path.push((e, self.edges[e].a == p));
            cur = p;
        }
        path.reverse();
        path
    }

    /// Derivation for edge `e`, from `a` to `b` when `forward`.
    fn edge_proof(&mut self, eng: &mut Conversion, e: usize, forward: bool) -> Result<Arc<Proof>, ConvError> {
        if let Some(p) = self.edge_proofs.get(&(e, forward)) {
            return Ok(p.clone());
        }
        let (a, b) = (self.edges[e].a, self.edges[e].b);
        let (from, to) = if forward { (a, b) } else { (b, a) };
        let mut oriented = false;
        let p = match &self.edges[e].reason {
            Reason::Hyp(i) => {
                let h = self.hyps[*i].clone();
                let (nl, pl) = eng.normal_form(&h.lhs)?;
                let (nr, pr) = eng.normal_form(&h.rhs)?;
                let hyp = Arc::new(Proof {
                    lhs: h.lhs.clone(),
                    rhs: h.rhs.clone(),
                    rule: Rule::Hyp { name: h.name.clone(), beta_steps: h.beta_steps },
                });
                Proof::chain([Proof::sym(Proof::reduction(&h.lhs, &nl, pl)), hyp, Proof::reduction(&h.rhs, &nr, pr)])
                    .unwrap()
            }
            Reason::Congruence => match (self.shapes[a], self.shapes[b]) {
                (Shape::App(f1, x1), Shape::App(f2, x2)) => {
                    let pf = self.explain(eng, f1, f2)?;
                    Proof::app(pf, self.explain(eng, x1, x2)?)
                }
                (Shape::Rec(c1), Shape::Rec(c2)) => {
                    let mut parts = Vec::with_capacity(4);
                    for k in 0..4 {
                        parts.push(self.explain(eng, c1[k], c2[k])?);
                    }
                    Proof::rec(parts.try_into().unwrap())
                }
                (Shape::EqIntro(p1), Shape::EqIntro(p2)) => Proof::eq_intro(self.explain(eng, p1, p2)?),
                _ => unreachable!("congruence edge between different shapes"),
            },
            Reason::Reduction { via, redex, paths } => {
                let (via, redex, paths) = (*via, redex.clone(), paths.clone());
                let head = match self.shapes[a] {
                    Shape::App(f, x) => Proof::app(self.explain(eng, f, via)?, Proof::refl(&self.terms[x])),
                    Shape::Rec([s, m, z, st]) => Proof::rec([
                        self.explain(eng, s, via)?,
                        Proof::refl(&self.terms[m]),
                        Proof::refl(&self.terms[z]),
                        Proof::refl(&self.terms[st]),
                    ]),
                    _ => unreachable!(),
                };
                Proof::trans(head, Proof::reduction(&redex, &self.terms[b], paths))
            }
            Reason::Binder { var, left, right, hyps } => {
                let (var, left, right, hyps) = (var.clone(), left.clone(), right.clone(), hyps.clone());
                let (Shape::Binder(da), Shape::Binder(db)) = (self.shapes[a], self.shapes[b]) else { unreachable!() };
                let domain = self.explain(eng, da, db)?;
                let body = match hyps {
                    None => self.prove(eng, &left, &right)?,
                    Some(h) => eng.prove_with(&h, &left, &right)?,
                }
                .expect("binder bodies were found convertible");
                let (binder, prod) = binder_of(&self.terms[a]);
                Proof::binder(prod, binder.annot, binder.var_sort, var, domain, body)
            }
            Reason::Ded(rec) => {
                let rec = rec.clone();
                let (l, r) = (self.terms[from].clone(), self.terms[to].clone());
                oriented = true;
                self.ded_proof(eng, &rec, &l, &r)?
            }
            Reason::Collapse => {
                let absurd = match &self.absurd {
                    Some(p) => p.clone(),
                    None => {
                        let rec = self.refutation.clone().expect("collapse without refutation");
                        let p = self.ded_proof(eng, &rec, &Term::zero(), &Term::numeral(1))?;
                        self.absurd = Some(p.clone());
                        p
                    }
                };
                oriented = true;
                Arc::new(Proof { lhs: self.terms[from].clone(), rhs: self.terms[to].clone(), rule: Rule::Collapse(absurd) })
            }
        };
        let p = if oriented || forward { p } else { Proof::sym(p) };
        self.edge_proofs.insert((e, forward), p.clone());
        Ok(p)
    }

    /// Drop premises the deduction does not need, re-deriving the witness.
    fn minimize(&self, eng: &Conversion, rec: &DedRecord) -> (Vec<usize>, EntailmentWitness) {
        let mut keep: Vec<usize> = (0..rec.eqs.len()).collect();
        let mut witness = rec.witness.clone();
        for i in (0..rec.eqs.len()).rev() {
            let trial: Vec<usize> = keep.iter().copied().filter(|&k| k != i).collect();
            let sys: Vec<LinEq> = trial.iter().map(|&k| rec.eqs[k].clone()).collect();
            let found = match &rec.goal {
                Some(g) => match arith::entails(&sys, g, eng.arith) {
                    Ok(Entailment::Entailed(w)) => Some(w),
                    _ => None,
                },
                None => match arith::solve(&sys, eng.arith) {
                    Ok(Search::Refuted(w)) => {
                        let n = sys.len();
                        let w = w.remap(&|j| if j >= n { j + 1 } else { j });
                        Some(EntailmentWitness { below: w.clone(), above: w })
                    }
                    _ => None,
                },
            };
            if let Some(w) = found {
                keep = trial;
                witness = w;
            }
        }
        (keep, witness)
    }

    fn ded_proof(&mut self, eng: &mut Conversion, rec: &DedRecord, lhs: &Term, rhs: &Term) -> Result<Arc<Proof>, ConvError> {
        let (keep, witness) = self.minimize(eng, rec);
        let mut premises = Vec::with_capacity(keep.len());
        for &k in &keep {
            let (x, y) = rec.premises[k];
            premises.push(self.explain(eng, x, y)?);
        }
        // Every alien occurring in a premise or goal side needs a table
        // entry, including those whose coefficients cancel.
        let mut occurring: Vec<Term> = Vec::new();
        let sides = keep
            .iter()
            .flat_map(|&k| [rec.premises[k].0, rec.premises[k].1])
            .map(|n| self.terms[n].clone())
            .chain([lhs.clone(), rhs.clone()]);
        for side in sides {
            cap(&side, &mut |t: &Term| {
                if !occurring.contains(t) {
                    occurring.push(t.clone());
                }
                Atom::Alien(0)
            });
        }
        let mut aliens: Vec<AlienEntry> = Vec::new();
        let mut reps: BTreeMap<u32, NodeId> = BTreeMap::new();
        let entries: Vec<(u32, NodeId)> =
            rec.aliens.iter().copied().filter(|(_, n)| occurring.contains(&self.terms[*n])).collect();
        for (var, n) in entries {
            let link = match reps.get(&var) {
                None => {
                    reps.insert(var, n);
                    None
                }
                Some(&r) => Some(self.explain(eng, n, r)?),
            };
            aliens.push(AlienEntry { var, term: self.terms[n].clone(), link });
        }
        // Aliens the record does not cover get variables of their own.
        let mut next = rec.aliens.iter().map(|(v, _)| v + 1).max().unwrap_or(0);
        for t in occurring {
            if !aliens.iter().any(|e| e.term == t) {
                aliens.push(AlienEntry { var: next, term: t, link: None });
                next += 1;
            }
        }
        Ok(Arc::new(Proof {
            lhs: lhs.clone(),
            rhs: rhs.clone(),
            rule: Rule::Ded { premises, aliens, witness },
        }))
    }
}

fn binder_of(t: &Term) -> (&crate::term::Binder, bool) {
    match t.kind() {
        TermKind::Lam(b) => (b, false),
        TermKind::Prod(b) => (b, true),
        _ => unreachable!("binder node"),
    }
}

/// Value of an atom in a model; atoms the model does not mention are
/// unconstrained and get large, pairwise distinct values.
fn value(m: &Model, a: &Atom) -> BigInt {
    if let Some(v) = m.get(a) {
        return v.clone();
    }
    let k: u64 = match a {
        Atom::Alien(k) => *k as u64 * 2 + 1,
        Atom::Slack(k) => *k as u64 * 2 + 2,
        Atom::Var(n) => {
            use std::hash::{Hash, Hasher};
            let mut h = std::collections::hash_map::DefaultHasher::new();
            n.hash(&mut h);
            h.finish() >> 20
        }
    };
    BigInt::from(1_000_003u64) * BigInt::from(k + 1) + BigInt::from(17u64)
}
