//! Explicit epistemic models.
//!
//! A model lives on a [`Frame`]: the fixed universe of world names and the agent
//! list. Each agent's indistinguishability relation is a [`Partition`] of the frame,
//! stored as one block label per world. Restriction only shrinks the set of live
//! worlds, so blocks are intersected for free and world ids stay stable.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::worldset::{WorldId, WorldSet};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom(Arc<str>);

impl Atom {
    pub fn new(name: impl AsRef<str>) -> Self {
        Atom(Arc::from(name.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Atom {
    fn from(s: &str) -> Self {
        Atom::new(s)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Agent(Arc<str>);

impl Agent {
    pub fn new(name: impl AsRef<str>) -> Self {
        Agent(Arc::from(name.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Agent {
    fn from(s: &str) -> Self {
        Agent::new(s)
    }
}

/// World names and agents shared by a model and all of its restrictions.
#[derive(Debug)]
pub struct Frame {
    names: Vec<String>,
    index: HashMap<String, WorldId>,
    agents: Vec<Agent>,
}

impl Frame {
    pub fn new(names: Vec<String>, agents: Vec<Agent>) -> Result<Self> {
        if agents.is_empty() {
            return Err(Error::InvalidModel("agent set is empty".into()));
        }
        let mut seen = BTreeSet::new();
        for a in &agents {
            if !seen.insert(a.clone()) {
                return Err(Error::InvalidModel(format!("agent `{a}` listed twice")));
            }
        }
        let mut index = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), WorldId(i)).is_some() {
                return Err(Error::InvalidModel(format!("world `{n}` listed twice")));
            }
        }
        Ok(Self {
            names,
            index,
            agents,
        })
    }

    pub fn universe(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, w: WorldId) -> &str {
        &self.names[w.0]
    }

    pub fn lookup(&self, name: &str) -> Option<WorldId> {
        self.index.get(name).copied()
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn agent_index(&self, a: &Agent) -> Option<usize> {
        self.agents.iter().position(|b| b == a)
    }
}

/// An equivalence relation over the frame, one block label per world.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<u32>,
}

impl Partition {
    /// Builds a partition from arbitrary hashable labels; labels are renumbered densely.
    pub fn from_keys<K: Hash + Eq>(keys: impl IntoIterator<Item = K>) -> Self {
        let mut dense: HashMap<K, u32> = HashMap::new();
        let labels = keys
            .into_iter()
            .map(|k| {
                let next = dense.len() as u32;
                *dense.entry(k).or_insert(next)
            })
            .collect();
        Self { labels }
    }

    pub fn discrete(universe: usize) -> Self {
        Self {
            labels: (0..universe as u32).collect(),
        }
    }

    #[inline]
    pub fn label(&self, w: WorldId) -> u32 {
        self.labels[w.0]
    }

    pub fn label_bound(&self) -> usize {
        self.labels
            .iter()
            .map(|&l| l as usize + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Blocks of `live`, each sorted, ordered by their least world.
    pub fn blocks(&self, live: &WorldSet) -> Vec<Vec<WorldId>> {
        let mut by_label: BTreeMap<u32, Vec<WorldId>> = BTreeMap::new();
        for w in live.iter() {
            by_label.entry(self.labels[w.0]).or_default().push(w);
        }
        let mut blocks: Vec<Vec<WorldId>> = by_label.into_values().collect();
        blocks.sort_by_key(|b| b[0]);
        blocks
    }

    /// The block of `w` inside `live`.
    pub fn block_of(&self, w: WorldId, live: &WorldSet) -> WorldSet {
        let l = self.labels[w.0];
        let mut out = WorldSet::empty(live.universe());
        for v in live.iter() {
            if self.labels[v.0] == l {
                out.insert(v);
            }
        }
        out
    }

    fn refine<K: Hash + Eq>(&self, live: &WorldSet, key: impl Fn(WorldId) -> K) -> Partition {
        // dead worlds keep a label of their own so they can never merge with live ones
        let keys = (0..self.labels.len()).map(|i| {
            let w = WorldId(i);
            if live.contains(w) {
                (self.labels[i], Some(key(w)), usize::MAX)
            } else {
                (self.labels[i], None, i)
            }
        });
        Partition::from_keys(keys)
    }

    /// Same equivalence classes on `live`.
    pub fn same_on(&self, other: &Partition, live: &WorldSet) -> bool {
        let mut fwd: HashMap<u32, u32> = HashMap::new();
        let mut bwd: HashMap<u32, u32> = HashMap::new();
        for w in live.iter() {
            let (a, b) = (self.label(w), other.label(w));
            if *fwd.entry(a).or_insert(b) != b || *bwd.entry(b).or_insert(a) != a {
                return false;
            }
        }
        true
    }
}

/// An epistemic model `(W, ~, V)` over a frame.
#[derive(Clone)]
pub struct EpistemicModel {
    frame: Arc<Frame>,
    live: WorldSet,
    relations: Vec<Arc<Partition>>,
    valuation: BTreeMap<Atom, WorldSet>,
    classes: Option<Arc<Partition>>,
}

impl EpistemicModel {
    pub fn new(
        frame: Arc<Frame>,
        relations: Vec<Partition>,
        valuation: BTreeMap<Atom, WorldSet>,
    ) -> Result<Self> {
        let universe = frame.universe();
        if relations.len() != frame.agents().len() {
            return Err(Error::InvalidModel(format!(
                "{} agents but {} relations",
                frame.agents().len(),
                relations.len()
            )));
        }
        for (a, p) in frame.agents().iter().zip(&relations) {
            if p.len() != universe {
                return Err(Error::InvalidModel(format!(
                    "relation of `{a}` covers {} worlds, frame has {universe}",
                    p.len()
                )));
            }
        }
        for (p, ext) in &valuation {
            if ext.universe() != universe {
                return Err(Error::InvalidModel(format!(
                    "valuation of `{p}` has wrong universe"
                )));
            }
        }
        Ok(Self {
            live: WorldSet::full(universe),
            frame,
            relations: relations.into_iter().map(Arc::new).collect(),
            valuation,
            classes: None,
        })
    }

    /// Attaches the colour-permutation class index (one label per frame world).
    pub fn with_classes(mut self, classes: Partition) -> Self {
        assert_eq!(classes.len(), self.frame.universe());
        self.classes = Some(Arc::new(classes));
        self
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn worlds(&self) -> &WorldSet {
        &self.live
    }

    pub fn universe(&self) -> usize {
        self.frame.universe()
    }

    pub fn len(&self) -> usize {
        self.live.len()
    }

    pub fn is_empty(&self) -> bool {
        self.live.is_empty()
    }

    pub fn agents(&self) -> &[Agent] {
        self.frame.agents()
    }

    pub fn agent_index(&self, a: &Agent) -> Result<usize> {
        self.frame
            .agent_index(a)
            .ok_or_else(|| Error::UnknownAgent(a.to_string()))
    }

    pub fn relation(&self, agent: usize) -> &Partition {
        &self.relations[agent]
    }

    pub fn classes(&self) -> Option<&Partition> {
        self.classes.as_deref()
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.valuation.keys()
    }

    /// `V(p)` restricted to the live worlds.
    pub fn valuation(&self, p: &Atom) -> Option<&WorldSet> {
        self.valuation.get(p)
    }

    pub fn name(&self, w: WorldId) -> &str {
        self.frame.name(w)
    }

    pub fn world(&self, name: &str) -> Result<WorldId> {
        self.frame
            .lookup(name)
            .filter(|w| self.live.contains(*w))
            .ok_or_else(|| Error::UnknownWorld(name.to_string()))
    }

    pub fn world_set(&self, names: &[&str]) -> Result<WorldSet> {
        let mut set = WorldSet::empty(self.universe());
        for n in names {
            set.insert(self.world(n)?);
        }
        Ok(set)
    }

    pub fn names(&self, set: &WorldSet) -> Vec<String> {
        set.iter().map(|w| self.name(w).to_string()).collect()
    }

    pub fn true_atoms(&self, w: WorldId) -> Vec<&Atom> {
        self.valuation
            .iter()
            .filter(|(_, ext)| ext.contains(w))
            .map(|(p, _)| p)
            .collect()
    }

    /// Blocks of agent `agent` over the live worlds.
    pub fn blocks(&self, agent: usize) -> Vec<Vec<WorldId>> {
        self.relations[agent].blocks(&self.live)
    }

    /// `M|keep`: worlds outside `keep` disappear, blocks and valuation are intersected.
    pub fn restrict(&self, keep: &WorldSet) -> EpistemicModel {
        let live = self.live.intersection(keep);
        let valuation = self
            .valuation
            .iter()
            .map(|(p, ext)| (p.clone(), ext.intersection(&live)))
            .collect();
        EpistemicModel {
            frame: self.frame.clone(),
            live,
            relations: self.relations.clone(),
            valuation,
            classes: self.classes.clone(),
        }
    }

    /// Splits every agent's blocks by `key`; worlds and valuation unchanged.
    pub fn refine_by_key<K: Hash + Eq>(&self, key: impl Fn(WorldId) -> K) -> EpistemicModel {
        let relations = self
            .relations
            .iter()
            .map(|p| Arc::new(p.refine(&self.live, &key)))
            .collect();
        EpistemicModel {
            frame: self.frame.clone(),
            live: self.live.clone(),
            relations,
            valuation: self.valuation.clone(),
            classes: self.classes.clone(),
        }
    }

    /// Replaces the valuation of the listed atoms; all other atoms unchanged.
    pub fn with_valuation(&self, updates: impl IntoIterator<Item = (Atom, WorldSet)>) -> Self {
        let mut out = self.clone();
        for (p, ext) in updates {
            out.valuation.insert(p, ext.intersection(&self.live));
        }
        out
    }

    /// True when both models have the same worlds, relations (on those worlds) and valuation.
    pub fn same_as(&self, other: &EpistemicModel) -> bool {
        Arc::ptr_eq(&self.frame, &other.frame)
            && self.live == other.live
            && self
                .relations
                .iter()
                .zip(&other.relations)
                .all(|(a, b)| a.same_on(b, &self.live))
            && self.valuation == other.valuation
    }

    /// True if `self` is exactly `other` restricted to `self`'s worlds.
    pub fn is_restriction_of(&self, other: &EpistemicModel) -> bool {
        self.live.is_subset(&other.live) && other.restrict(&self.live).same_as(self)
    }

    pub fn to_file(&self, point: Option<WorldId>) -> ModelFile {
        let worlds = self
            .live
            .iter()
            .map(|w| WorldEntry {
                id: self.name(w).to_string(),
                true_atoms: self.true_atoms(w).iter().map(|p| p.to_string()).collect(),
            })
            .collect();
        let agents = self
            .agents()
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let blocks = self
                    .blocks(i)
                    .into_iter()
                    .map(|b| b.into_iter().map(|w| self.name(w).to_string()).collect())
                    .collect();
                (a.to_string(), blocks)
            })
            .collect();
        ModelFile {
            atoms: Some(self.valuation.keys().map(|p| p.to_string()).collect()),
            worlds,
            agents,
            point: point.map(|w| self.name(w).to_string()),
        }
    }

    pub fn from_file(file: &ModelFile) -> Result<(EpistemicModel, Option<WorldId>)> {
        let names: Vec<String> = file.worlds.iter().map(|w| w.id.clone()).collect();
        let agents: Vec<Agent> = file.agents.keys().map(Agent::new).collect();
        let frame = Arc::new(Frame::new(names, agents)?);
        let universe = frame.universe();

        let mut valuation: BTreeMap<Atom, WorldSet> = BTreeMap::new();
        for p in file.atoms.iter().flatten() {
            valuation
                .entry(Atom::new(p))
                .or_insert_with(|| WorldSet::empty(universe));
        }
        for (i, w) in file.worlds.iter().enumerate() {
            for p in &w.true_atoms {
                valuation
                    .entry(Atom::new(p))
                    .or_insert_with(|| WorldSet::empty(universe))
                    .insert(WorldId(i));
            }
        }

        let mut relations = Vec::new();
        for (agent, blocks) in &file.agents {
            let mut labels: Vec<Option<u32>> = vec![None; universe];
            for (b, block) in blocks.iter().enumerate() {
                if block.is_empty() {
                    return Err(Error::InvalidModel(format!(
                        "agent `{agent}` has an empty block"
                    )));
                }
                for name in block {
                    let w = frame
                        .lookup(name)
                        .ok_or_else(|| Error::UnknownWorld(name.clone()))?;
                    if labels[w.0].replace(b as u32).is_some() {
                        return Err(Error::InvalidModel(format!(
                            "blocks of agent `{agent}` overlap at world `{name}`"
                        )));
                    }
                }
            }
            if let Some(i) = labels.iter().position(Option::is_none) {
                return Err(Error::InvalidModel(format!(
                    "world `{}` is in no block of agent `{agent}`",
                    frame.name(WorldId(i))
                )));
            }
            relations.push(Partition {
                labels: labels.into_iter().map(Option::unwrap).collect(),
            });
        }

        let model = EpistemicModel::new(frame.clone(), relations, valuation)?;
        let point = match &file.point {
            Some(p) => Some(model.world(p)?),
            None => None,
        };
        Ok((model, point))
    }

    pub fn from_json(text: &str) -> Result<(EpistemicModel, Option<WorldId>)> {
        let file: ModelFile = serde_json::from_str(text)?;
        Self::from_file(&file)
    }
}

impl fmt::Debug for EpistemicModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let worlds: Vec<&str> = self.live.iter().map(|w| self.name(w)).collect();
        let mut s = f.debug_struct("EpistemicModel");
        s.field("worlds", &worlds);
        for (i, a) in self.agents().iter().enumerate() {
            let blocks: Vec<Vec<&str>> = self
                .blocks(i)
                .into_iter()
                .filter(|b| b.len() > 1)
                .map(|b| b.into_iter().map(|w| self.name(w)).collect())
                .collect();
            s.field(a.as_str(), &blocks);
        }
        s.finish()
    }
}

/// A model with a designated actual world.
#[derive(Clone, Debug)]
pub struct PointedModel {
    pub model: EpistemicModel,
    pub point: WorldId,
}

impl PointedModel {
    pub fn new(model: EpistemicModel, point: WorldId) -> Result<Self> {
        if !model.worlds().contains(point) {
            return Err(Error::UnknownWorld(model.name(point).to_string()));
        }
        Ok(Self { model, point })
    }
}

/// On-disk model format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms: Option<Vec<String>>,
    pub worlds: Vec<WorldEntry>,
    pub agents: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorldEntry {
    pub id: String,
    #[serde(default)]
    pub true_atoms: Vec<String>,
}
