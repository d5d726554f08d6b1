//! The bell protocol on explicit models, the signature-level simulator, and the search
//! for signatures consistent with a partially known departure log.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::checker::{knowing_sets, Checker};
use crate::error::{Error, Result};
use crate::kripke::{EpistemicModel, PointedModel};
use crate::lang::{Announcement, Owners};
use crate::puzzles::{
    hat_model, hat_model_filtered, no_unique_colour, signature_of, solvable_prime, HatModel,
};
use crate::worldset::{WorldId, WorldSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// update with the unique true `bell_L`
    Bell,
    /// update with whichever of `bell_∅` and its negation is true
    BellEmptyTest,
}

/// How the model is cut down before the first ring.
#[derive(Clone, Debug)]
pub enum Initial {
    None,
    Announce(Announcement),
    Worlds(WorldSet),
}

#[derive(Clone, Debug)]
pub struct TraceStep {
    pub label: String,
    pub model: EpistemicModel,
    /// knowing set (bit mask over the owners) of every frame world; zero for dead worlds
    pub knowing: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct RoundResult {
    pub solved: bool,
    /// bell refinements applied before everybody knows at the point
    pub refinements: usize,
    /// per owner, the ring at which it first knows (ring 1 = before any refinement)
    pub departure_ring: Vec<Option<usize>>,
    pub point: WorldId,
    pub owners: Arc<Owners>,
    pub trace: Vec<TraceStep>,
}

impl RoundResult {
    /// The ring at which the last owner leaves, `refinements + 1` when solved.
    pub fn last_ring(&self) -> Option<usize> {
        if self.solved {
            Some(self.refinements + 1)
        } else {
            None
        }
    }

    pub fn final_model(&self) -> &EpistemicModel {
        &self
            .trace
            .last()
            .expect("trace holds the initial model")
            .model
    }

    /// Owners who never come to know.
    pub fn ignorant(&self) -> Vec<usize> {
        (0..self.departure_ring.len())
            .filter(|&i| self.departure_ring[i].is_none())
            .collect()
    }
}

fn mask_names(owners: &Owners, mask: u64) -> String {
    let names: Vec<&str> = owners
        .0
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, (a, _))| a.as_str())
        .collect();
    format!("{{{}}}", names.join(","))
}

/// Runs the bell protocol at `point` until every owner knows or nothing changes.
pub fn run_protocol(
    model: &EpistemicModel,
    point: WorldId,
    owners: &Arc<Owners>,
    initial: &Initial,
    variant: Variant,
) -> Result<RoundResult> {
    let n = owners.0.len();
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut trace = Vec::new();
    let mut current = match initial {
        Initial::None => model.clone(),
        Initial::Announce(ann) => Checker::default().update(model, ann, point)?.model,
        Initial::Worlds(keep) => {
            if !keep.contains(point) {
                return Err(Error::AnnouncementFalse);
            }
            model.restrict(keep)
        }
    };
    PointedModel::new(current.clone(), point)?;
    let mut departure_ring = vec![None; n];
    let mut label = match initial {
        Initial::None => "initial".to_string(),
        _ => "initial update".to_string(),
    };
    for refinements in 0.. {
        let knowing = knowing_sets(&current, owners)?;
        let here = knowing[point.index()];
        for (i, d) in departure_ring.iter_mut().enumerate() {
            if here & (1 << i) != 0 && d.is_none() {
                *d = Some(refinements + 1);
            }
        }
        trace.push(TraceStep {
            label: label.clone(),
            model: current.clone(),
            knowing: knowing.clone(),
        });
        if here == full {
            return Ok(RoundResult {
                solved: true,
                refinements,
                departure_ring,
                point,
                owners: owners.clone(),
                trace,
            });
        }
        let keep = WorldSet::from_ids(
            current.universe(),
            current.worlds().iter().filter(|w| match variant {
                Variant::Bell => knowing[w.index()] == here,
                Variant::BellEmptyTest => (knowing[w.index()] == 0) == (here == 0),
            }),
        );
        if &keep == current.worlds() {
            return Ok(RoundResult {
                solved: false,
                refinements,
                departure_ring,
                point,
                owners: owners.clone(),
                trace,
            });
        }
        label = match variant {
            Variant::Bell => format!(
                "ring {}: bell L={}",
                refinements + 1,
                mask_names(owners, here)
            ),
            Variant::BellEmptyTest => format!(
                "ring {}: bell_0? {}",
                refinements + 1,
                if here == 0 {
                    "nobody knows"
                } else {
                    "somebody knows"
                }
            ),
        };
        current = current.restrict(&keep);
    }
    unreachable!()
}

/// The worlds reachable from `point` through any agent's relation.
pub fn component(m: &EpistemicModel, point: WorldId) -> WorldSet {
    let mut seen = WorldSet::from_ids(m.universe(), [point]);
    let mut stack = vec![point];
    while let Some(w) = stack.pop() {
        for i in 0..m.agents().len() {
            for v in m.relation(i).block_of(w, m.worlds()).iter() {
                if !seen.contains(v) {
                    seen.insert(v);
                    stack.push(v);
                }
            }
        }
    }
    seen
}

/// Ring → sizes of the colour groups leaving at that ring. Silent rings are listed
/// with no groups; the log ends with the last departure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepartureLog {
    pub rings: Vec<RingEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingEntry {
    pub ring: usize,
    pub groups: Vec<u16>,
}

impl DepartureLog {
    fn from_rings(by_ring: &BTreeMap<usize, Vec<u16>>) -> Self {
        let last = by_ring.keys().next_back().copied().unwrap_or(0);
        let rings = (1..=last)
            .map(|r| {
                let mut groups = by_ring.get(&r).cloned().unwrap_or_default();
                groups.sort_unstable();
                RingEntry { ring: r, groups }
            })
            .collect();
        Self { rings }
    }

    /// Ring of the last departure.
    pub fn last_ring(&self) -> usize {
        self.rings.len()
    }

    pub fn silent_rings(&self) -> usize {
        self.rings.iter().filter(|r| r.groups.is_empty()).count()
    }

    pub fn groups_at(&self, ring: usize) -> &[u16] {
        self.rings
            .get(ring.wrapping_sub(1))
            .map_or(&[][..], |r| r.groups.as_slice())
    }

    /// Only the rings at which somebody leaves.
    pub fn departures(&self) -> Vec<(usize, Vec<u16>)> {
        self.rings
            .iter()
            .filter(|r| !r.groups.is_empty())
            .map(|r| (r.ring, r.groups.clone()))
            .collect()
    }
}

impl fmt::Display for DepartureLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rings {
            if r.groups.is_empty() {
                writeln!(f, "ring {}: silent", r.ring)?;
            } else {
                let gs: Vec<String> = r.groups.iter().map(|g| g.to_string()).collect();
                writeln!(f, "ring {}: {{{}}}", r.ring, gs.join(","))?;
            }
        }
        Ok(())
    }
}

/// A distribution with the given sorted group sizes: colours `0, 1, …` assigned to
/// consecutive runs of gnomes.
pub fn representative(sig: &[u16]) -> Vec<u16> {
    sig.iter()
        .enumerate()
        .flat_map(|(c, &s)| std::iter::repeat_n(c as u16, s as usize))
        .collect()
}

/// Worlds scanned before the literal `solvable'` update gives way to direct generation.
const LITERAL_SOLVABLE_LIMIT: usize = 4096;

/// The hat model after `solvable'`.
pub fn solvable_model(gnomes: usize, colours: usize) -> Result<HatModel> {
    let total = (colours as u128)
        .checked_pow(gnomes as u32)
        .unwrap_or(u128::MAX);
    if total <= LITERAL_SOLVABLE_LIMIT as u128 {
        let h = hat_model(gnomes, colours)?;
        let keep = crate::checker::extension(&h.model, &solvable_prime(gnomes, colours))?;
        Ok(h.restrict(&keep))
    } else {
        hat_model_filtered(gnomes, colours, no_unique_colour)
    }
}

/// The protocol on the hat model after `solvable'`, at distribution `dist`.
pub fn solve_rounds(hats: &HatModel, dist: &[u16]) -> Result<RoundResult> {
    if !no_unique_colour(dist) {
        return Err(Error::AnnouncementFalse);
    }
    let point = hats.world_of(dist)?;
    run_protocol(
        &hats.model,
        point,
        &hats.owners(),
        &Initial::None,
        Variant::Bell,
    )
}

/// Groups the gnomes' departure rings by colour. Fails if a colour group splits.
pub fn explicit_log(dist: &[u16], result: &RoundResult) -> Result<DepartureLog> {
    let mut ring_of: BTreeMap<u16, (u16, Option<usize>)> = BTreeMap::new();
    for (g, &c) in dist.iter().enumerate() {
        let d = result.departure_ring[g];
        let e = ring_of.entry(c).or_insert((0, d));
        if e.1 != d {
            return Err(Error::SimulationAborted(format!(
                "colour {c} splits across rings {:?} and {d:?}",
                e.1
            )));
        }
        e.0 += 1;
    }
    let mut by_ring: BTreeMap<usize, Vec<u16>> = BTreeMap::new();
    for (size, d) in ring_of.into_values() {
        let d = d.ok_or_else(|| Error::SimulationAborted("a colour group never leaves".into()))?;
        by_ring.entry(d).or_default().push(size);
    }
    Ok(DepartureLog::from_rings(&by_ring))
}

/// Checks a signature: non-empty, every part at least 2. Returns it sorted.
pub fn validate_signature(sig: &[u16]) -> Result<Vec<u16>> {
    if sig.is_empty() {
        return Err(Error::InvalidSignature("empty signature".into()));
    }
    if let Some(s) = sig.iter().find(|&&s| s < 2) {
        return Err(Error::InvalidSignature(format!(
            "part {s}: every colour must be worn at least twice"
        )));
    }
    let mut v = sig.to_vec();
    v.sort_unstable();
    Ok(v)
}

/// Departure log of a signature, from the recursive hypothesis-elimination simulation.
pub fn simulate_abstract(sig: &[u16]) -> Result<DepartureLog> {
    HorizonSimulator::new().simulate(sig)
}

/// Per-signature state of the abstract simulation.
///
/// A member of a group of size `s ≥ 3` considers, besides its true colour, every other
/// colour it sees: a world whose signature moves one gnome from its group to that
/// colour's group. Such a world is ruled out at the first ring where the public
/// departures differ from those that world would produce, which only depends on that
/// world's own departures up to the same ring. A group leaves one ring after its last
/// alternative is ruled out; groups of size 2 have no alternative and leave at ring 1.
struct SigState {
    sizes: Vec<u16>,
    /// `departed[r - 1]`: bit mask over `sizes` of groups gone by ring `r`
    departed: Vec<u64>,
    hypotheses: Vec<Vec<Hypothesis>>,
}

enum Target {
    Pending(Vec<u16>),
    Interned(usize),
}

struct Hypothesis {
    target: Target,
    /// pairs (index in own sizes, index in the hypothetical signature's sizes) to compare
    compare: Vec<(usize, usize)>,
    ruled_out: bool,
}

/// The recursion on full signatures, every counterfactual interned as met. Exact, and
/// the reference `HorizonSimulator` is checked against; practical up to a few dozen
/// gnomes.
pub struct ExactSimulator {
    states: Vec<SigState>,
    index: HashMap<Vec<u16>, usize>,
    ring_cap: usize,
}

impl Default for ExactSimulator {
    fn default() -> Self {
        Self::new()
    }
}

impl ExactSimulator {
    pub fn new() -> Self {
        Self {
            states: Vec::new(),
            index: HashMap::new(),
            ring_cap: 0,
        }
    }

    /// Number of distinct signatures touched so far.
    pub fn signatures_visited(&self) -> usize {
        self.states.len()
    }

    pub fn simulate(&mut self, sig: &[u16]) -> Result<DepartureLog> {
        let sig = validate_signature(sig)?;
        if sig.iter().collect::<std::collections::BTreeSet<_>>().len() > 64 {
            return Err(Error::InvalidSignature(
                "more than 64 distinct group sizes".into(),
            ));
        }
        let total: usize = sig.iter().map(|&s| s as usize).sum();
        self.ring_cap = self.ring_cap.max(total + 2);
        let id = self.intern(sig.clone());
        let all = (1u64 << self.states[id].sizes.len()) - 1;
        let mut ring = 1;
        while self.status(id, ring)? != all {
            ring += 1;
            if ring > self.ring_cap {
                return Err(Error::SimulationAborted(format!(
                    "groups still present after ring {}",
                    self.ring_cap
                )));
            }
        }
        let st = &self.states[id];
        let mut by_ring: BTreeMap<usize, Vec<u16>> = BTreeMap::new();
        let mut mult: BTreeMap<u16, usize> = BTreeMap::new();
        for &s in &sig {
            *mult.entry(s).or_default() += 1;
        }
        for (i, &s) in st.sizes.iter().enumerate() {
            let r = (1..=ring)
                .find(|&r| st.departed[r - 1] & (1 << i) != 0)
                .unwrap();
            by_ring
                .entry(r)
                .or_default()
                .extend(std::iter::repeat_n(s, mult[&s]));
        }
        Ok(DepartureLog::from_rings(&by_ring))
    }

    fn intern(&mut self, sig: Vec<u16>) -> usize {
        if let Some(&i) = self.index.get(&sig) {
            return i;
        }
        let mut sizes = sig.clone();
        sizes.dedup();
        let id = self.states.len();
        self.states.push(SigState {
            hypotheses: Vec::new(),
            departed: Vec::new(),
            sizes,
        });
        self.states[id].hypotheses = self.build_hypotheses(&sig);
        self.index.insert(sig, id);
        id
    }

    fn build_hypotheses(&self, sig: &[u16]) -> Vec<Vec<Hypothesis>> {
        counterfactuals(sig)
            .into_iter()
            .map(|hs| {
                hs.into_iter()
                    .map(|(h, compare)| Hypothesis {
                        target: Target::Pending(h),
                        compare,
                        ruled_out: false,
                    })
                    .collect()
            })
            .collect()
    }

    /// State index of a hypothesis' signature, interned on first use.
    fn resolve(&mut self, id: usize, g: usize, k: usize) -> usize {
        let pending = match &self.states[id].hypotheses[g][k].target {
            Target::Interned(i) => return *i,
            Target::Pending(sig) => sig.clone(),
        };
        let i = self.intern(pending);
        self.states[id].hypotheses[g][k].target = Target::Interned(i);
        i
    }

    /// Bit mask of the groups of `id` that have left by ring `ring`.
    fn status(&mut self, id: usize, ring: usize) -> Result<u64> {
        while self.states[id].departed.len() < ring {
            let r = self.states[id].departed.len() + 1;
            if r > self.ring_cap {
                return Err(Error::SimulationAborted(format!(
                    "hypothetical signature {:?} still undecided after ring {}",
                    self.states[id].sizes, self.ring_cap
                )));
            }
            let before = if r == 1 {
                0
            } else {
                self.states[id].departed[r - 2]
            };
            let mut now = before;
            for g in 0..self.states[id].sizes.len() {
                if before & (1 << g) != 0 {
                    continue;
                }
                let mut all_out = true;
                for k in 0..self.states[id].hypotheses[g].len() {
                    if self.states[id].hypotheses[g][k].ruled_out {
                        continue;
                    }
                    if r >= 2 {
                        let other = self.resolve(id, g, k);
                        let theirs = self.status(other, r - 1)?;
                        let mine = self.states[id].departed[r - 2];
                        let h = &mut self.states[id].hypotheses[g][k];
                        let differs = h
                            .compare
                            .iter()
                            .any(|&(a, b)| (mine >> a & 1) != (theirs >> b & 1));
                        if differs {
                            h.ruled_out = true;
                            continue;
                        }
                    }
                    all_out = false;
                }
                if all_out {
                    now |= 1 << g;
                }
            }
            self.states[id].departed.push(now);
        }
        Ok(self.states[id].departed[ring - 1])
    }
}

/// A counterfactual signature and the size-index pairs compared against it.
type Counterfactual = (Vec<u16>, Vec<(usize, usize)>);

/// For every distinct size of `sig`, the signatures a member of such a group cannot yet
/// exclude, each with the pairs (own size index, counterfactual size index) whose
/// departures are compared.
fn counterfactuals(sig: &[u16]) -> Vec<Vec<Counterfactual>> {
    let mut sizes = sig.to_vec();
    sizes.dedup();
    let count = |v: u16| sig.iter().filter(|&&x| x == v).count();
    let idx = |v: &[u16], x: u16| v.iter().position(|&y| y == x).unwrap();
    let mut out = Vec::with_capacity(sizes.len());
    for &s in &sizes {
        let mut hs = Vec::new();
        if s >= 3 {
            for &t in &sizes {
                if t == s && count(s) < 2 {
                    continue;
                }
                let mut h = sig.to_vec();
                let pos = h.iter().position(|&x| x == s).unwrap();
                h.remove(pos);
                let pos = h.iter().position(|&x| x == t).unwrap();
                h.remove(pos);
                h.push(s - 1);
                h.push(t + 1);
                h.sort_unstable();
                let mut hsizes = h.clone();
                hsizes.dedup();
                let mut compare = vec![
                    (idx(&sizes, s), idx(&hsizes, s - 1)),
                    (idx(&sizes, t), idx(&hsizes, t + 1)),
                ];
                for &u in &sizes {
                    let others = count(u) - usize::from(u == s) - usize::from(u == t);
                    if others > 0 {
                        compare.push((idx(&sizes, u), idx(&hsizes, u)));
                    }
                }
                hs.push((h, compare));
            }
        }
        out.push(hs);
    }
    out
}

/// Coarsening applied by `HorizonSimulator`: at ring `r`, sizes above `r + margin`
/// keep only their order, their ties and gaps of at most `gap`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Horizon {
    pub margin: usize,
    pub gap: u16,
}

impl Default for Horizon {
    fn default() -> Self {
        Self { margin: 2, gap: 1 }
    }
}

/// A signature as `(size, multiplicity)` pairs, sizes strictly increasing.
type Groups = SmallVec<[(u16, u16); 24]>;
type Rings = SmallVec<[u8; 24]>;

fn groups_of(sig: &[u16]) -> Groups {
    let mut out = Groups::new();
    for &s in sig {
        match out.last_mut() {
            Some((t, m)) if *t == s => *m += 1,
            _ => out.push((s, 1)),
        }
    }
    out
}

impl Horizon {
    /// Representative of `sig` (sorted) for departures up to `ring`; keeps the number
    /// and order of distinct sizes.
    pub fn apply(&self, sig: &[u16], ring: usize) -> Vec<u16> {
        self.coarsen(&groups_of(sig), ring)
            .iter()
            .flat_map(|&(s, m)| std::iter::repeat_n(s, usize::from(m)))
            .collect()
    }

    fn coarsen(&self, groups: &Groups, ring: usize) -> Groups {
        let limit = u16::try_from(ring + self.margin).unwrap_or(u16::MAX);
        let (mut prev_in, mut prev_out) = (limit, limit);
        groups
            .iter()
            .map(|&(s, m)| {
                if s <= limit {
                    return (s, m);
                }
                let v = prev_out + (s - prev_in).min(self.gap);
                prev_in = s;
                prev_out = v;
                (v, m)
            })
            .collect()
    }
}

/// Whether a member of group `g` can picture itself wearing the colour of group `t`.
fn eligible(groups: &Groups, g: usize, t: usize) -> bool {
    groups[g].0 >= 3 && (t != g || groups[g].1 >= 2)
}

/// The counterfactual signature in which one member of group `g` moves to group `t`,
/// with the pairs (own group, counterfactual group) whose departures are compared.
fn counterfactual(groups: &Groups, g: usize, t: usize) -> (Groups, SmallVec<[(u8, u8); 24]>) {
    let (s, ts) = (groups[g].0, groups[t].0);
    let mut left: SmallVec<[u16; 24]> = groups.iter().map(|&(_, m)| m).collect();
    left[g] -= 1;
    left[t] -= 1;
    let mut h = Groups::new();
    let mut add = |size: u16, m: u16| {
        if m == 0 {
            return;
        }
        match h.iter_mut().find(|(x, _)| *x == size) {
            Some((_, n)) => *n += m,
            None => h.push((size, m)),
        }
    };
    for (i, &(size, _)) in groups.iter().enumerate() {
        add(size, left[i]);
    }
    add(s - 1, 1);
    add(ts + 1, 1);
    h.sort_unstable();
    let at = |size: u16| h.iter().position(|&(x, _)| x == size).unwrap() as u8;
    let mut compare = SmallVec::new();
    compare.push((g as u8, at(s - 1)));
    compare.push((t as u8, at(ts + 1)));
    for (i, &(size, _)) in groups.iter().enumerate() {
        if left[i] > 0 {
            compare.push((i as u8, at(size)));
        }
    }
    (h, compare)
}

/// Departures after ring 1: exactly the groups with no counterfactual leave.
fn first_ring(groups: &Groups) -> Rings {
    (0..groups.len())
        .map(|g| u8::from(!(0..groups.len()).any(|t| eligible(groups, g, t))))
        .collect()
}

struct Entry {
    rings: Rings,
    /// bit `g * len + t`: the counterfactual moving a member of `g` to `t` still stands
    open: SmallVec<[u64; 8]>,
}

/// The same recursion as `ExactSimulator`, but the departures of a signature up to ring `r`
/// are memoised on its `Horizon` coarsening at `r`: groups far larger than `r` can
/// neither have left nor told anyone anything by then, so only their relative layout
/// is kept. Counterfactuals still standing are carried from ring to ring.
///
/// Agreement with `ExactSimulator` is a tested property, not a theorem.
#[derive(Default)]
pub struct HorizonSimulator {
    horizon: Horizon,
    memo: FxHashMap<(Groups, u8), u32>,
    entries: Vec<Entry>,
}

impl HorizonSimulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_horizon(horizon: Horizon) -> Self {
        Self {
            horizon,
            ..Self::default()
        }
    }

    /// Number of (signature, ring) entries stored so far.
    pub fn entries(&self) -> usize {
        self.entries.len()
    }

    pub fn simulate(&mut self, sig: &[u16]) -> Result<DepartureLog> {
        let sig = validate_signature(sig)?;
        let groups = groups_of(&sig);
        if groups.len() > 64 {
            return Err(Error::InvalidSignature(
                "more than 64 distinct group sizes".into(),
            ));
        }
        let total: usize = sig.iter().map(|&s| s as usize).sum();
        let cap = (total + 2).min(usize::from(u8::MAX));
        let mut ring = 1;
        let rings = loop {
            let rings = self.rings(&groups, ring);
            if rings.iter().all(|&r| r > 0) {
                break rings;
            }
            if ring == cap {
                return Err(Error::SimulationAborted(format!(
                    "groups still present after ring {cap}"
                )));
            }
            ring += 1;
        };
        let mut by_ring: BTreeMap<usize, Vec<u16>> = BTreeMap::new();
        for (&(s, m), &r) in groups.iter().zip(&rings) {
            by_ring
                .entry(usize::from(r))
                .or_default()
                .extend(std::iter::repeat_n(s, usize::from(m)));
        }
        Ok(DepartureLog::from_rings(&by_ring))
    }

    /// Departure ring of every group, `0` for groups still present after `ring`.
    fn rings(&mut self, groups: &Groups, ring: usize) -> Rings {
        if ring == 1 {
            return first_ring(groups);
        }
        let i = self.entry(groups, ring);
        self.entries[i].rings.clone()
    }

    fn entry(&mut self, groups: &Groups, ring: usize) -> usize {
        let c = self.horizon.coarsen(groups, ring);
        let key = (c, ring as u8);
        if let Some(&i) = self.memo.get(&key) {
            return i as usize;
        }
        let c = &key.0;
        let n = c.len();
        let (before, mut open) = if ring == 2 {
            let mut open: SmallVec<[u64; 8]> = SmallVec::from_elem(0, (n * n).div_ceil(64));
            for g in 0..n {
                for t in 0..n {
                    if eligible(c, g, t) {
                        open[(g * n + t) / 64] |= 1 << ((g * n + t) % 64);
                    }
                }
            }
            (first_ring(c), open)
        } else {
            let prev = self.entry(c, ring - 1);
            let e = &self.entries[prev];
            (e.rings.clone(), e.open.clone())
        };
        let mut rings = before.clone();
        for g in 0..n {
            if before[g] != 0 {
                continue;
            }
            let mut standing = false;
            for t in 0..n {
                let bit = g * n + t;
                if open[bit / 64] & (1 << (bit % 64)) == 0 {
                    continue;
                }
                let (h, compare) = counterfactual(c, g, t);
                let theirs = self.rings(&h, ring - 1);
                let refuted = compare
                    .iter()
                    .any(|&(a, b)| before[usize::from(a)] != theirs[usize::from(b)]);
                if refuted {
                    open[bit / 64] &= !(1 << (bit % 64));
                } else {
                    standing = true;
                }
            }
            if !standing {
                rings[g] = ring as u8;
            }
        }
        let i = self.entries.len();
        self.entries.push(Entry { rings, open });
        self.memo.insert(key, i as u32);
        i
    }
}

/// Departure rings predicted by "size `s` leaves at ring `s - 1`, except that a unique
/// largest group leaves one ring after the last other group if that is earlier".
pub fn closed_form_log(sig: &[u16]) -> Result<DepartureLog> {
    let sig = validate_signature(sig)?;
    let max = *sig.last().unwrap();
    let unique_max = sig.iter().filter(|&&s| s == max).count() == 1;
    let mut by_ring: BTreeMap<usize, Vec<u16>> = BTreeMap::new();
    let others_last = sig[..sig.len() - 1].iter().map(|&s| s as usize - 1).max();
    for (i, &s) in sig.iter().enumerate() {
        let mut r = s as usize - 1;
        if unique_max && i == sig.len() - 1 {
            r = match others_last {
                Some(o) => r.min(o + 1),
                None => 1,
            };
        }
        by_ring.entry(r).or_default().push(s);
    }
    Ok(DepartureLog::from_rings(&by_ring))
}

/// What is known about one ring of the log.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingConstraint {
    pub ring: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gnomes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_count: Option<usize>,
    /// exact sizes of the groups leaving; `[]` for a silent ring
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub groups: Option<Vec<u16>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraints {
    pub total: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub silent_rings: Option<usize>,
    /// reported against, not filtered on
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub answer_range: Option<(usize, usize)>,
    pub rings: Vec<RingConstraint>,
}

impl Constraints {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: Constraints = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.total < 2 {
            return Err(Error::InvalidConstraints("total must be at least 2".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for r in &self.rings {
            if r.ring == 0 {
                return Err(Error::InvalidConstraints(
                    "rings are numbered from 1".into(),
                ));
            }
            if !seen.insert(r.ring) {
                return Err(Error::InvalidConstraints(format!(
                    "ring {} constrained twice",
                    r.ring
                )));
            }
        }
        if let Some((lo, hi)) = self.answer_range {
            if lo > hi {
                return Err(Error::InvalidConstraints("empty answer range".into()));
            }
        }
        Ok(())
    }

    fn ring(&self, r: usize) -> Option<&RingConstraint> {
        self.rings.iter().find(|c| c.ring == r)
    }

    /// Whether `log` satisfies every constraint (the answer range excepted).
    pub fn admits(&self, sig: &[u16], log: &DepartureLog) -> bool {
        let total: usize = sig.iter().map(|&s| s as usize).sum();
        if total != self.total {
            return false;
        }
        if let Some(s) = self.silent_rings {
            if log.silent_rings() != s {
                return false;
            }
        }
        self.rings.iter().all(|c| {
            let gs = log.groups_at(c.ring);
            let gnomes: usize = gs.iter().map(|&g| g as usize).sum();
            c.gnomes.is_none_or(|n| n == gnomes)
                && c.group_count.is_none_or(|k| k == gs.len())
                && c.groups.as_ref().is_none_or(|want| {
                    let mut w = want.clone();
                    w.sort_unstable();
                    w == gs
                })
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Solution {
    pub signature: Vec<u16>,
    /// ring of the last departure
    pub n: usize,
    pub log: DepartureLog,
    pub in_answer_range: Option<bool>,
}

/// Candidate contents of ring `r` under the schedule "size `s` leaves at ring `s - 1`,
/// or a unique largest group leaves early as the very last group".
fn ring_options(c: Option<&RingConstraint>, r: usize, remaining: usize) -> Vec<Vec<u16>> {
    let size = r + 1;
    let mut out = Vec::new();
    if let Some(gs) = c.and_then(|c| c.groups.clone()) {
        if gs.iter().map(|&g| g as usize).sum::<usize>() <= remaining {
            out.push(gs);
        }
        return out;
    }
    let fits = |k: usize| {
        c.is_none_or(|c| {
            c.group_count.is_none_or(|n| n == k) && c.gnomes.is_none_or(|n| n == k * size)
        })
    };
    for k in 0..=remaining / size {
        if fits(k) {
            out.push(vec![size as u16; k]);
        }
    }
    // the shortened last group takes everything that is left
    if remaining > size
        && c.is_none_or(|c| {
            c.group_count.is_none_or(|n| n == 1) && c.gnomes.is_none_or(|n| n == remaining)
        })
    {
        out.push(vec![remaining as u16]);
    }
    out
}

/// Partitions of `n` into parts `>= min`, parts non-decreasing.
pub fn partitions(n: usize, min: usize) -> Vec<Vec<u16>> {
    fn go(n: usize, min: usize, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for p in min..=n {
            if n - p == 0 || n - p >= p {
                cur.push(p as u16);
                go(n - p, p, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    if min > 0 {
        go(n, min, &mut Vec::new(), &mut out);
    }
    out
}

/// All signatures whose simulated log satisfies `constraints`.
///
/// Rings up to the last constrained one are filled from the schedule, then the
/// remaining gnomes are split into groups too large to leave by that ring.
pub fn invert_log(constraints: &Constraints) -> Result<Vec<Solution>> {
    constraints.validate()?;
    let last = constraints.rings.iter().map(|c| c.ring).max().unwrap_or(0);
    let mut prefixes: Vec<(Vec<u16>, usize, bool)> = vec![(Vec::new(), constraints.total, false)];
    for r in 1..=last {
        let c = constraints.ring(r);
        let mut next = Vec::new();
        for (prefix, remaining, closed) in prefixes {
            if closed {
                // everybody already left; later rings must be silent
                if ring_options(c, r, 0).iter().any(|o| o.is_empty()) {
                    next.push((prefix, remaining, closed));
                }
                continue;
            }
            for opt in ring_options(c, r, remaining) {
                let used: usize = opt.iter().map(|&g| g as usize).sum();
                let shortened = opt.len() == 1 && opt[0] as usize > r + 1;
                let mut p = prefix.clone();
                p.extend(&opt);
                next.push((p, remaining - used, shortened || remaining == used));
            }
        }
        prefixes = next;
    }
    let mut candidates: Vec<Vec<u16>> = Vec::new();
    for (prefix, remaining, _) in prefixes {
        if remaining == 0 {
            candidates.push(prefix);
            continue;
        }
        for tail in partitions(remaining, last + 2) {
            let mut s = prefix.clone();
            s.extend(tail);
            candidates.push(s);
        }
    }
    filter_candidates(constraints, candidates)
}

/// Every partition of the total into parts `>= 2`, simulated and filtered; only
/// feasible for small totals, used to check that `invert_log` misses nothing.
pub fn invert_log_naive(constraints: &Constraints) -> Result<Vec<Solution>> {
    constraints.validate()?;
    filter_candidates(constraints, partitions(constraints.total, 2))
}

fn filter_candidates(
    constraints: &Constraints,
    candidates: Vec<Vec<u16>>,
) -> Result<Vec<Solution>> {
    let mut sim = HorizonSimulator::new();
    let mut out = Vec::new();
    for mut sig in candidates {
        if sig.iter().any(|&s| s < 2) {
            continue;
        }
        sig.sort_unstable();
        let log = sim.simulate(&sig)?;
        if constraints.admits(&sig, &log) {
            out.push(Solution {
                n: log.last_ring(),
                in_answer_range: constraints
                    .answer_range
                    .map(|(lo, hi)| (lo..=hi).contains(&log.last_ring())),
                signature: sig,
                log,
            });
        }
    }
    out.sort_by(|a, b| a.signature.cmp(&b.signature));
    out.dedup_by(|a, b| a.signature == b.signature);
    Ok(out)
}

/// The riddle's departure log as constraints.
pub fn muetzen_constraints() -> Constraints {
    let mut rings = vec![
        RingConstraint {
            ring: 1,
            gnomes: Some(10),
            ..Default::default()
        },
        RingConstraint {
            ring: 2,
            group_count: Some(4),
            ..Default::default()
        },
    ];
    for r in 3..=8 {
        rings.push(RingConstraint {
            ring: r,
            group_count: Some(1),
            ..Default::default()
        });
    }
    for r in 9..=12 {
        rings.push(RingConstraint {
            ring: r,
            groups: Some(vec![]),
            ..Default::default()
        });
    }
    rings.push(RingConstraint {
        ring: 13,
        group_count: Some(2),
        ..Default::default()
    });
    Constraints {
        total: 126,
        silent_rings: Some(7),
        answer_range: Some((17, 26)),
        rings,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MuetzenReport {
    pub solutions: Vec<Solution>,
    /// set when no solution ends with two equally large groups leaving together
    pub note: Option<String>,
}

/// Whether the last ring of `log` sees two groups of the overall maximum size leave.
pub fn ends_with_equal_maxima(sig: &[u16], log: &DepartureLog) -> bool {
    let max = sig.iter().copied().max().unwrap_or(0);
    let last = log.groups_at(log.last_ring());
    last.iter().filter(|&&g| g == max).count() >= 2
}

pub fn muetzen() -> Result<MuetzenReport> {
    let solutions = invert_log(&muetzen_constraints())?;
    let note = if solutions
        .iter()
        .any(|s| ends_with_equal_maxima(&s.signature, &s.log))
    {
        None
    } else {
        Some(
            "no consistent signature ends with two groups of the same maximum size; \
             the last group leaves alone, one ring after the second largest"
                .to_string(),
        )
    };
    Ok(MuetzenReport { solutions, note })
}

/// Signature of the point of a hat model.
pub fn point_signature(hats: &HatModel, w: WorldId) -> Vec<u16> {
    signature_of(hats.distribution(w))
}
