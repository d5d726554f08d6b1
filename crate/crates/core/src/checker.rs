//! The satisfaction relation and the fixpoint engines.
//!
//! Everything is computed as extensions: `ext(M, f)` is the set of live worlds of `M`
//! where `f` holds. Fixpoint variables live in an environment that takes precedence
//! over the model's valuation; restriction intersects them with the live worlds.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::kripke::{Atom, EpistemicModel, PointedModel};
use crate::lang::{
    Alternative, Announcement, Assignment, BellFamily, BellKind, Formula, Owners, Repeat,
};
use crate::worldset::{WorldId, WorldSet};

/// Fixpoint-variable bindings, as sets over the frame.
pub type Env = HashMap<Atom, WorldSet>;

/// Largest candidate space (worlds or classes) any enumeration engine accepts.
pub const ENUMERATION_LIMIT: usize = 20;

#[derive(Clone, Debug)]
pub struct Config {
    /// `max` in `[f]* g := ⋀_{n<max} [f]^n g`; defaults to the world count of the
    /// model in which the starred formula is evaluated.
    pub star_bound: Option<usize>,
    /// `nu`/`mu` use exact subset enumeration up to this many live worlds and a
    /// guarded Kleene iteration beyond.
    pub exact_fixpoint_limit: usize,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            star_bound: None,
            exact_fixpoint_limit: 12,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Checker {
    pub config: Config,
}

pub fn extension(m: &EpistemicModel, f: &Formula) -> Result<WorldSet> {
    Checker::default().extension(m, f)
}

pub fn eval(pm: &PointedModel, f: &Formula) -> Result<bool> {
    Checker::default().eval(pm, f, &Env::new())
}

impl Checker {
    pub fn new(config: Config) -> Self {
        Self { config }
    }

    pub fn extension(&self, m: &EpistemicModel, f: &Formula) -> Result<WorldSet> {
        self.ext(m, f, &Env::new())
    }

    pub fn extension_with(&self, m: &EpistemicModel, f: &Formula, env: &Env) -> Result<WorldSet> {
        self.ext(m, f, env)
    }

    pub fn eval(&self, pm: &PointedModel, f: &Formula, env: &Env) -> Result<bool> {
        Ok(self.ext(&pm.model, f, env)?.contains(pm.point))
    }

    fn ext(&self, m: &EpistemicModel, f: &Formula, env: &Env) -> Result<WorldSet> {
        let live = m.worlds();
        Ok(match f {
            Formula::Top => live.clone(),
            Formula::Bottom => WorldSet::empty(m.universe()),
            Formula::Atom(p) => atom_ext(m, p, env)?,
            Formula::Not(a) => live.difference(&self.ext(m, a, env)?),
            Formula::And(a, b) => {
                let mut s = self.ext(m, a, env)?;
                if !s.is_empty() {
                    s.intersect_with(&self.ext(m, b, env)?);
                }
                s
            }
            Formula::Or(a, b) => {
                let mut s = self.ext(m, a, env)?;
                s.union_with(&self.ext(m, b, env)?);
                s
            }
            Formula::Implies(a, b) => {
                let mut s = live.difference(&self.ext(m, a, env)?);
                s.union_with(&self.ext(m, b, env)?);
                s
            }
            Formula::Know(ag, a) => {
                let i = m.agent_index(ag)?;
                let s = self.ext(m, a, env)?;
                know(m, i, &s)
            }
            Formula::Possible(ag, a) => {
                let i = m.agent_index(ag)?;
                let s = self.ext(m, a, env)?;
                possible(m, i, &s)
            }
            Formula::Announce(ann, rep, body) => self.announce(m, ann, *rep, body, env, false)?,
            Formula::Diamond(ann, rep, body) => self.announce(m, ann, *rep, body, env, true)?,
            Formula::Gfp(x, body) => {
                let u = if live.len() <= self.config.exact_fixpoint_limit {
                    let space = CandidateSpace::worlds(m);
                    let table = self.tabulate(m, x, body, env, &space)?;
                    table.post_fixed_union()
                } else {
                    self.kleene(m, x, body, env, live.clone(), false)?
                };
                self.ext(m, body, &bind(env, x, u))?
            }
            Formula::Lfp(x, body) => {
                let u = if live.len() <= self.config.exact_fixpoint_limit {
                    let space = CandidateSpace::worlds(m);
                    let table = self.tabulate(m, x, body, env, &space)?;
                    table.pre_fixed_intersection()
                } else {
                    self.kleene(m, x, body, env, WorldSet::empty(m.universe()), true)?
                };
                self.ext(m, body, &bind(env, x, u))?
            }
            Formula::Assign(sigma, body) => {
                let updated = self.apply_assignment_env(m, sigma, env)?;
                let mut inner = env.clone();
                for (p, _) in sigma.pairs() {
                    inner.remove(p);
                }
                self.ext(&updated, body, &inner)?
            }
            Formula::Invariant(p) => {
                let classes = m.classes().ok_or(Error::NoClassStructure)?;
                let s = atom_ext(m, p, env)?;
                let mut inside: HashMap<u32, (bool, bool)> = HashMap::new();
                for w in live.iter() {
                    let e = inside.entry(classes.label(w)).or_default();
                    if s.contains(w) {
                        e.0 = true;
                    } else {
                        e.1 = true;
                    }
                }
                if inside.values().all(|&(t, f)| !(t && f)) {
                    live.clone()
                } else {
                    WorldSet::empty(m.universe())
                }
            }
        })
    }

    /// `V^σ(p) = ⟦σ(p)⟧`, all right-hand sides evaluated in `m` before any is written.
    pub fn apply_assignment(
        &self,
        m: &EpistemicModel,
        sigma: &Assignment,
    ) -> Result<EpistemicModel> {
        self.apply_assignment_env(m, sigma, &Env::new())
    }

    fn apply_assignment_env(
        &self,
        m: &EpistemicModel,
        sigma: &Assignment,
        env: &Env,
    ) -> Result<EpistemicModel> {
        let values = sigma
            .pairs()
            .iter()
            .map(|(p, f)| Ok((p.clone(), self.ext(m, f, env)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(m.with_valuation(values))
    }

    /// The extensions of the concrete announcements making up `ann` in `m`.
    /// Tests contribute two alternatives; bell families one per knowing set present.
    pub fn alternatives(
        &self,
        m: &EpistemicModel,
        ann: &Announcement,
        env: &Env,
    ) -> Result<Vec<WorldSet>> {
        let mut out = Vec::new();
        for alt in ann.alternatives() {
            match alt {
                Alternative::Formula(f) => out.push(self.ext(m, f, env)?),
                Alternative::Test(f) => {
                    let s = self.ext(m, f, env)?;
                    out.push(m.worlds().difference(&s));
                    out.insert(out.len() - 1, s);
                }
                Alternative::Bell(b) => out.extend(bell_blocks(m, b)?),
            }
        }
        Ok(out)
    }

    fn announce(
        &self,
        m: &EpistemicModel,
        ann: &Announcement,
        rep: Repeat,
        body: &Formula,
        env: &Env,
        diamond: bool,
    ) -> Result<WorldSet> {
        match rep {
            Repeat::Once => self.iterate(m, ann, 1, body, env, diamond),
            Repeat::Times(n) => self.iterate(m, ann, n as usize, body, env, diamond),
            Repeat::Star => {
                let bound = self.config.star_bound.unwrap_or_else(|| m.len());
                let mut memo = HashMap::new();
                let t = self.star_box(m, ann, bound, body, env, diamond, &mut memo)?;
                Ok(if diamond {
                    m.worlds().difference(&t)
                } else {
                    t
                })
            }
        }
    }

    fn iterate(
        &self,
        m: &EpistemicModel,
        ann: &Announcement,
        n: usize,
        body: &Formula,
        env: &Env,
        diamond: bool,
    ) -> Result<WorldSet> {
        if n == 0 {
            return self.ext(m, body, env);
        }
        let live = m.worlds();
        let alts = self.alternatives(m, ann, env)?;
        let mut acc = if diamond {
            WorldSet::empty(m.universe())
        } else {
            live.clone()
        };
        for e in alts {
            let inner = if &e == live {
                self.iterate(m, ann, n - 1, body, env, diamond)?
            } else {
                self.iterate(&m.restrict(&e), ann, n - 1, body, env, diamond)?
            };
            if diamond {
                acc.union_with(&inner);
            } else {
                let mut ok = live.difference(&e);
                ok.union_with(&inner);
                acc.intersect_with(&ok);
            }
        }
        Ok(acc)
    }

    /// `T(M, k) = ⋀_{n<k} [ann]^n body`, with `body` negated when `negate` is set.
    /// Uses `T(M, k) = body ∧ ⋀_i [ann_i] T(M|ann_i, k-1)`; alternatives that leave
    /// the model unchanged can be dropped because `T` only shrinks as `k` grows.
    #[allow(clippy::too_many_arguments)]
    fn star_box(
        &self,
        m: &EpistemicModel,
        ann: &Announcement,
        bound: usize,
        body: &Formula,
        env: &Env,
        negate: bool,
        memo: &mut HashMap<(WorldSet, usize), WorldSet>,
    ) -> Result<WorldSet> {
        let live = m.worlds();
        if bound == 0 {
            return Ok(live.clone());
        }
        let key = (live.clone(), bound);
        if let Some(t) = memo.get(&key) {
            return Ok(t.clone());
        }
        let phi = self.ext(m, body, env)?;
        let mut acc = if negate { live.difference(&phi) } else { phi };
        for e in self.alternatives(m, ann, env)? {
            if &e == live || e.is_empty() || acc.is_empty() {
                continue;
            }
            let sub = m.restrict(&e);
            let inner = self.star_box(&sub, ann, bound - 1, body, env, negate, memo)?;
            let mut ok = live.difference(&e);
            ok.union_with(&inner);
            acc.intersect_with(&ok);
        }
        memo.insert(key, acc.clone());
        Ok(acc)
    }

    fn kleene(
        &self,
        m: &EpistemicModel,
        x: &Atom,
        body: &Formula,
        env: &Env,
        start: WorldSet,
        upward: bool,
    ) -> Result<WorldSet> {
        let mut cur = start;
        for step in 0.. {
            let next = self.ext(m, body, &bind(env, x, cur.clone()))?;
            if next == cur {
                return Ok(cur);
            }
            let ordered = if upward {
                cur.is_subset(&next)
            } else {
                next.is_subset(&cur)
            };
            if !ordered {
                return Err(Error::NonMonotone { step });
            }
            cur = next;
        }
        unreachable!()
    }

    fn tabulate(
        &self,
        m: &EpistemicModel,
        x: &Atom,
        body: &Formula,
        env: &Env,
        space: &CandidateSpace,
    ) -> Result<Table> {
        let k = space.atoms.len();
        if k > ENUMERATION_LIMIT {
            return Err(Error::SizeGuard {
                what: space.what,
                size: k,
                limit: ENUMERATION_LIMIT,
            });
        }
        let mut sets = Vec::with_capacity(1 << k);
        let mut images = Vec::with_capacity(1 << k);
        let mut env = env.clone();
        for mask in 0u32..(1u32 << k) {
            let set = space.union(mask, m.universe());
            env.insert(x.clone(), set.clone());
            images.push(self.ext(m, body, &env)?);
            sets.push(set);
        }
        Ok(Table {
            k,
            universe: m.universe(),
            live: m.worlds().clone(),
            sets,
            images,
        })
    }

    /// `nu` by exhaustive enumeration of every subset of the live worlds.
    pub fn gfp_subset_enum(
        &self,
        m: &EpistemicModel,
        p: &Atom,
        body: &Formula,
    ) -> Result<FixpointReport> {
        self.gfp_enum(m, p, body, &CandidateSpace::worlds(m))
    }

    /// `nu` restricted to unions of colour-permutation classes.
    pub fn gfp_invariant_enum(
        &self,
        m: &EpistemicModel,
        p: &Atom,
        body: &Formula,
    ) -> Result<FixpointReport> {
        self.gfp_enum(m, p, body, &CandidateSpace::classes(m)?)
    }

    fn gfp_enum(
        &self,
        m: &EpistemicModel,
        p: &Atom,
        body: &Formula,
        space: &CandidateSpace,
    ) -> Result<FixpointReport> {
        let table = self.tabulate(m, p, body, &Env::new(), space)?;
        let u = table.post_fixed_union();
        let truth_set = self.ext(m, body, &bind(&Env::new(), p, u.clone()))?;
        Ok(FixpointReport {
            post_fixed_family: table.post_fixed(),
            monotone: table.monotone(),
            candidates: table.sets.len(),
            u,
            truth_set,
        })
    }

    /// Full tabulation of `X ↦ ⟦body⟧_{p↦X}` over a candidate space, for inspection.
    pub fn fixpoint_table(
        &self,
        m: &EpistemicModel,
        p: &Atom,
        body: &Formula,
        candidates: Candidates,
    ) -> Result<Vec<(WorldSet, WorldSet)>> {
        let space = match candidates {
            Candidates::All => CandidateSpace::worlds(m),
            Candidates::Invariant => CandidateSpace::classes(m)?,
        };
        let t = self.tabulate(m, p, body, &Env::new(), &space)?;
        Ok(t.sets.into_iter().zip(t.images).collect())
    }

    /// Least fixpoint by iteration from the empty set; fails if the chain ever shrinks.
    pub fn lfp_kleene(&self, m: &EpistemicModel, q: &Atom, body: &Formula) -> Result<WorldSet> {
        let u = self.kleene(m, q, body, &Env::new(), WorldSet::empty(m.universe()), true)?;
        self.ext(m, body, &bind(&Env::new(), q, u))
    }

    /// `⟦body⟧_{q↦U}` with `U` the intersection of all pre-fixed candidates.
    pub fn mu_direct(
        &self,
        m: &EpistemicModel,
        q: &Atom,
        body: &Formula,
        candidates: Candidates,
    ) -> Result<WorldSet> {
        let space = match candidates {
            Candidates::All => CandidateSpace::worlds(m),
            Candidates::Invariant => CandidateSpace::classes(m)?,
        };
        let table = self.tabulate(m, q, body, &Env::new(), &space)?;
        let u = table.pre_fixed_intersection();
        self.ext(m, body, &bind(&Env::new(), q, u))
    }

    /// `mu q. body` rewritten as `~nu q. ~body[q/~q]` and evaluated with the `nu` enumeration.
    pub fn mu_via_abbrev(
        &self,
        m: &EpistemicModel,
        q: &Atom,
        body: &Formula,
        candidates: Candidates,
    ) -> Result<WorldSet> {
        let Formula::Not(inner) = Formula::lfp(q, body.clone()).desugar() else {
            unreachable!("mu desugars to a negated nu")
        };
        let Formula::Gfp(_, nu_body) = *inner else {
            unreachable!("mu desugars to a negated nu")
        };
        let report = match candidates {
            Candidates::All => self.gfp_subset_enum(m, q, &nu_body)?,
            Candidates::Invariant => self.gfp_invariant_enum(m, q, &nu_body)?,
        };
        Ok(m.worlds().difference(&report.truth_set))
    }

    /// Updates with `ann` at `point`: restrict to the unique alternative true there.
    pub fn update(
        &self,
        m: &EpistemicModel,
        ann: &Announcement,
        point: WorldId,
    ) -> Result<PointedModel> {
        let alts = self.alternatives(m, ann, &Env::new())?;
        let mut holding = alts.into_iter().filter(|e| e.contains(point));
        let Some(e) = holding.next() else {
            return Err(Error::AnnouncementFalse);
        };
        if holding.any(|other| other != e) {
            return Err(Error::Unsupported(
                "announcement alternatives are not mutually exclusive at the point".into(),
            ));
        }
        PointedModel::new(m.restrict(&e), point)
    }
}

pub fn update(m: &EpistemicModel, ann: &Announcement, point: WorldId) -> Result<PointedModel> {
    Checker::default().update(m, ann, point)
}

pub fn apply_assignment(m: &EpistemicModel, sigma: &Assignment) -> Result<EpistemicModel> {
    Checker::default().apply_assignment(m, sigma)
}

fn bind(env: &Env, x: &Atom, set: WorldSet) -> Env {
    let mut e = env.clone();
    e.insert(x.clone(), set);
    e
}

fn atom_ext(m: &EpistemicModel, p: &Atom, env: &Env) -> Result<WorldSet> {
    if let Some(s) = env.get(p) {
        return Ok(s.intersection(m.worlds()));
    }
    m.valuation(p)
        .cloned()
        .ok_or_else(|| Error::UnknownAtom(p.to_string()))
}

/// Worlds whose whole `agent`-block lies inside `s`.
fn know(m: &EpistemicModel, agent: usize, s: &WorldSet) -> WorldSet {
    let rel = m.relation(agent);
    let mut bad = vec![false; rel.label_bound()];
    for w in m.worlds().difference(s).iter() {
        bad[rel.label(w) as usize] = true;
    }
    let mut out = WorldSet::empty(m.universe());
    for w in m.worlds().iter() {
        if !bad[rel.label(w) as usize] {
            out.insert(w);
        }
    }
    out
}

/// Worlds whose `agent`-block meets `s`.
fn possible(m: &EpistemicModel, agent: usize, s: &WorldSet) -> WorldSet {
    let rel = m.relation(agent);
    let mut good = vec![false; rel.label_bound()];
    for w in s.iter() {
        good[rel.label(w) as usize] = true;
    }
    let mut out = WorldSet::empty(m.universe());
    for w in m.worlds().iter() {
        if good[rel.label(w) as usize] {
            out.insert(w);
        }
    }
    out
}

/// For each frame world, the set of owners (as a bit mask over `owners`) who know the
/// truth value of each of their atoms there. Entries for dead worlds are zero.
pub fn knowing_sets(m: &EpistemicModel, owners: &Owners) -> Result<Vec<u64>> {
    if owners.0.len() > 64 {
        return Err(Error::SizeGuard {
            what: "bell owners",
            size: owners.0.len(),
            limit: 64,
        });
    }
    let mut masks = vec![0u64; m.universe()];
    for (bit, (agent, atoms)) in owners.0.iter().enumerate() {
        let i = m.agent_index(agent)?;
        let rel = m.relation(i);
        let mut known = vec![true; rel.label_bound()];
        for p in atoms {
            let ext = m
                .valuation(p)
                .ok_or_else(|| Error::UnknownAtom(p.to_string()))?;
            let mut seen = vec![(false, false); rel.label_bound()];
            for w in m.worlds().iter() {
                let s = &mut seen[rel.label(w) as usize];
                if ext.contains(w) {
                    s.0 = true;
                } else {
                    s.1 = true;
                }
            }
            for (k, (t, f)) in known.iter_mut().zip(seen) {
                if t && f {
                    *k = false;
                }
            }
        }
        for w in m.worlds().iter() {
            if known[rel.label(w) as usize] {
                masks[w.index()] |= 1 << bit;
            }
        }
    }
    Ok(masks)
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// The non-empty extensions of the members of a bell family, ordered by knowing set.
pub fn bell_blocks(m: &EpistemicModel, b: &BellFamily) -> Result<Vec<WorldSet>> {
    let masks = knowing_sets(m, &b.owners)?;
    let full = full_mask(b.owners.0.len());
    let mut groups: std::collections::BTreeMap<u64, WorldSet> = Default::default();
    for w in m.worlds().iter() {
        let key = match b.kind {
            BellKind::All => masks[w.index()],
            BellKind::NotLast if masks[w.index()] == full => continue,
            BellKind::NotLast => masks[w.index()],
            BellKind::EmptyTest => u64::from(masks[w.index()] != 0),
        };
        groups
            .entry(key)
            .or_insert_with(|| WorldSet::empty(m.universe()))
            .insert(w);
    }
    Ok(groups.into_values().collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Candidates {
    /// every subset of the live worlds
    All,
    /// unions of colour-permutation classes
    Invariant,
}

#[derive(Clone, Debug)]
pub struct FixpointReport {
    /// union of the post-fixed candidates
    pub u: WorldSet,
    /// `⟦body⟧` with the variable bound to `u`
    pub truth_set: WorldSet,
    /// post-fixed candidates in enumeration order
    pub post_fixed_family: Vec<WorldSet>,
    /// whether `X ⊆ Y ⇒ f(X) ⊆ f(Y)` holds on the candidate space
    pub monotone: bool,
    pub candidates: usize,
}

struct CandidateSpace {
    what: &'static str,
    atoms: Vec<WorldSet>,
}

impl CandidateSpace {
    fn worlds(m: &EpistemicModel) -> Self {
        Self {
            what: "subset enumeration (worlds)",
            atoms: m
                .worlds()
                .iter()
                .map(|w| WorldSet::from_ids(m.universe(), [w]))
                .collect(),
        }
    }

    fn classes(m: &EpistemicModel) -> Result<Self> {
        let classes = m.classes().ok_or(Error::NoClassStructure)?;
        let mut by_label: std::collections::BTreeMap<u32, WorldSet> = Default::default();
        for w in m.worlds().iter() {
            by_label
                .entry(classes.label(w))
                .or_insert_with(|| WorldSet::empty(m.universe()))
                .insert(w);
        }
        let mut atoms: Vec<WorldSet> = by_label.into_values().collect();
        atoms.sort_by_key(|s| s.first());
        Ok(Self {
            what: "invariant enumeration (classes)",
            atoms,
        })
    }

    fn union(&self, mask: u32, universe: usize) -> WorldSet {
        let mut s = WorldSet::empty(universe);
        for (i, a) in self.atoms.iter().enumerate() {
            if mask & (1 << i) != 0 {
                s.union_with(a);
            }
        }
        s
    }
}

struct Table {
    k: usize,
    universe: usize,
    live: WorldSet,
    sets: Vec<WorldSet>,
    images: Vec<WorldSet>,
}

impl Table {
    fn post_fixed(&self) -> Vec<WorldSet> {
        self.sets
            .iter()
            .zip(&self.images)
            .filter(|(x, fx)| x.is_subset(fx))
            .map(|(x, _)| x.clone())
            .collect()
    }

    fn post_fixed_union(&self) -> WorldSet {
        let mut u = WorldSet::empty(self.universe);
        for x in self.post_fixed() {
            u.union_with(&x);
        }
        u
    }

    fn pre_fixed_intersection(&self) -> WorldSet {
        let mut u = self.live.clone();
        for (x, fx) in self.sets.iter().zip(&self.images) {
            if fx.is_subset(x) {
                u.intersect_with(x);
            }
        }
        u
    }

    /// Monotonicity on covering pairs, which implies it on all pairs.
    fn monotone(&self) -> bool {
        (0..self.sets.len()).all(|mask| {
            (0..self.k)
                .filter(|b| mask & (1 << b) == 0)
                .all(|b| self.images[mask].is_subset(&self.images[mask | (1 << b)]))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::{Agent, Frame, Partition};
    use crate::lang::parse;
    use std::collections::BTreeMap;
    use std::sync::Arc;

    /// p at w1 only; one block for agent a.
    fn two_worlds() -> EpistemicModel {
        let frame =
            Arc::new(Frame::new(vec!["w1".into(), "w2".into()], vec![Agent::new("a")]).unwrap());
        let mut val = BTreeMap::new();
        val.insert(Atom::new("p"), WorldSet::from_ids(2, [WorldId(0)]));
        EpistemicModel::new(frame, vec![Partition::from_keys([0, 0])], val).unwrap()
    }

    fn at(m: &EpistemicModel, w: &str, f: &str) -> bool {
        let pm = PointedModel::new(m.clone(), m.world(w).unwrap()).unwrap();
        eval(&pm, &parse(f).unwrap()).unwrap()
    }

    #[test]
    fn moore_sentence() {
        let m = two_worlds();
        assert!(at(&m, "w1", "[p & ~K{a} p] ~(p & ~K{a} p)"));
        assert!(at(&m, "w1", "[p] K{a} p"));
        assert!(!at(&m, "w1", "p -> K{a} p"));
        assert!(at(&m, "w1", "p & ~K{a} p"));
        assert!(!at(&m, "w1", "<p & ~K{a} p> (p & ~K{a} p)"));
    }

    #[test]
    fn constants_and_unknowns() {
        let m = two_worlds();
        assert_eq!(extension(&m, &parse("p | ~p").unwrap()).unwrap().len(), 2);
        assert!(extension(&m, &parse("false").unwrap()).unwrap().is_empty());
        assert_eq!(
            extension(&m, &parse("q").unwrap()),
            Err(Error::UnknownAtom("q".into()))
        );
        assert_eq!(
            extension(&m, &parse("K{z} p").unwrap()),
            Err(Error::UnknownAgent("z".into()))
        );
        assert_eq!(
            extension(&m, &parse("Inv{p}").unwrap()),
            Err(Error::NoClassStructure)
        );
    }

    #[test]
    fn fixpoints_with_constant_body() {
        let m = two_worlds();
        let c = Checker::default();
        let p = Atom::new("x");
        let rep = c.gfp_subset_enum(&m, &p, &parse("x").unwrap()).unwrap();
        assert_eq!(rep.u.len(), 2);
        assert_eq!(rep.truth_set.len(), 2);
        assert!(rep.monotone);
        let rep = c.gfp_subset_enum(&m, &p, &parse("false").unwrap()).unwrap();
        assert!(rep.u.is_empty() && rep.truth_set.is_empty());
        let q = Atom::new("q");
        assert!(c
            .lfp_kleene(&m, &q, &parse("q").unwrap())
            .unwrap()
            .is_empty());
        assert_eq!(
            c.lfp_kleene(&m, &q, &parse("p | q").unwrap())
                .unwrap()
                .len(),
            1
        );
        for body in ["q", "p", "p | K{a} q"] {
            let b = parse(body).unwrap();
            let direct = c.mu_direct(&m, &q, &b, Candidates::All).unwrap();
            let abbrev = c.mu_via_abbrev(&m, &q, &b, Candidates::All).unwrap();
            assert_eq!(direct, abbrev, "{body}");
            assert_eq!(direct, c.lfp_kleene(&m, &q, &b).unwrap(), "{body}");
        }
        assert!(
            extension(&m, &parse("nu x. p").unwrap()).unwrap()
                == extension(&m, &parse("p").unwrap()).unwrap()
        );
        assert!(
            extension(&m, &parse("mu x. p").unwrap()).unwrap()
                == extension(&m, &parse("p").unwrap()).unwrap()
        );
    }

    #[test]
    fn kleene_guard_fires_on_flip() {
        let m = two_worlds();
        let q = Atom::new("q");
        assert!(matches!(
            Checker::default().lfp_kleene(&m, &q, &parse("~q").unwrap()),
            Err(Error::NonMonotone { step: 1 })
        ));
    }

    #[test]
    fn assignment_is_simultaneous() {
        let m = two_worlds().with_valuation([(Atom::new("q"), WorldSet::empty(2))]);
        // swap p and q: p becomes empty, q becomes {w1}
        assert!(at(&m, "w1", "[p := q, q := p] (~p & q)"));
        assert!(at(&m, "w2", "[p := ~p] [p := ~p] ~p"));
        let sigma = Assignment::new(vec![(Atom::new("p"), parse("~p").unwrap())]).unwrap();
        let twice = apply_assignment(&apply_assignment(&m, &sigma).unwrap(), &sigma).unwrap();
        assert!(twice.same_as(&m));
        assert!(apply_assignment(&m, &Assignment::default())
            .unwrap()
            .same_as(&m));
    }

    #[test]
    fn update_signals_false_announcement() {
        let m = two_worlds();
        let ann = Announcement::single(parse("p").unwrap());
        let pm = update(&m, &ann, m.world("w1").unwrap()).unwrap();
        assert_eq!(pm.model.len(), 1);
        assert_eq!(
            update(&m, &ann, m.world("w2").unwrap()).unwrap_err(),
            Error::AnnouncementFalse
        );
        let top = Announcement::single(Formula::Top);
        assert!(update(&m, &top, WorldId(0)).unwrap().model.same_as(&m));
    }

    #[test]
    fn bounded_iteration_matches_unfolding() {
        let m = two_worlds();
        let star = extension(&m, &parse("[~K{a} p]* ~p").unwrap()).unwrap();
        let unfolded = extension(&m, &parse("~p & [~K{a} p] ~p").unwrap()).unwrap();
        assert_eq!(star, unfolded);
        let dia = extension(&m, &parse("<p>* K{a} p").unwrap()).unwrap();
        assert_eq!(
            dia,
            extension(&m, &parse("K{a} p | <p> K{a} p").unwrap()).unwrap()
        );
    }
}
