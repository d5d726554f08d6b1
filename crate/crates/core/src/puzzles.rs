//! Muddy-children and hat-puzzle models, and the named formulas used to solve them.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kripke::{Agent, Atom, EpistemicModel, Frame, Partition};
use crate::lang::{Announcement, Assignment, BellFamily, BellKind, Formula, Macros, Owners};
use crate::worldset::{WorldId, WorldSet};

/// Explicit hat models are refused beyond this many distributions.
pub const HAT_WORLD_LIMIT: usize = 1_000_000;

/// Literal bell unions are built only up to this many agents.
pub const LITERAL_BELL_AGENTS: usize = 4;

/// Literal invariance conjuncts are built only up to `|Δ|·|I|` of this size.
pub const LITERAL_INVARIANCE_LIMIT: usize = 100_000;

/// `a`, `b`, …, `z`, then `g26`, `g27`, …
pub fn agent_name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("g{i}")
    }
}

pub fn agents(n: usize) -> Vec<Agent> {
    (0..n).map(|i| Agent::new(agent_name(i))).collect()
}

pub fn muddy_atom(agent: &Agent) -> Atom {
    Atom::new(format!("m_{agent}"))
}

/// Every agent owns its own muddiness atom.
pub fn muddy_owners(n: usize) -> Arc<Owners> {
    Arc::new(Owners(
        agents(n)
            .into_iter()
            .map(|a| {
                let m = muddy_atom(&a);
                (a, vec![m])
            })
            .collect(),
    ))
}

/// The muddy-children cube: worlds are 0/1 strings, digit `i` saying whether child `i`
/// is muddy; child `i` cannot tell apart worlds that differ only in digit `i`.
pub fn muddy_model(n: usize) -> Result<EpistemicModel> {
    if !(1..=12).contains(&n) {
        return Err(Error::SizeGuard {
            what: "muddy children",
            size: n,
            limit: 12,
        });
    }
    let count = 1usize << n;
    let digits = |w: usize| (0..n).map(move |i| (w >> (n - 1 - i)) & 1);
    let names = (0..count)
        .map(|w| digits(w).map(|d| char::from(b'0' + d as u8)).collect())
        .collect();
    let ags = agents(n);
    let frame = Arc::new(Frame::new(names, ags.clone())?);
    let relations = (0..n)
        .map(|i| Partition::from_keys((0..count).map(|w| w & !(1 << (n - 1 - i)))))
        .collect();
    let valuation = ags
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let ids = (0..count)
                .filter(|w| w >> (n - 1 - i) & 1 == 1)
                .map(WorldId);
            (muddy_atom(a), WorldSet::from_ids(count, ids))
        })
        .collect();
    EpistemicModel::new(frame, relations, valuation)
}

/// `m_a | m_b | …`: at least one child is muddy.
pub fn father(n: usize) -> Formula {
    Formula::disj(agents(n).iter().map(|a| Formula::Atom(muddy_atom(a))))
}

pub fn colour_atom(colour: usize, gnome: &Agent) -> Atom {
    Atom::new(format!("{colour}_{gnome}"))
}

/// A hat model together with what is needed to read its worlds as distributions.
#[derive(Clone, Debug)]
pub struct HatModel {
    pub gnomes: Vec<Agent>,
    pub colours: usize,
    pub model: EpistemicModel,
    distributions: Vec<Vec<u16>>,
}

impl HatModel {
    /// The same hat model with its live worlds cut down to `keep`.
    pub fn restrict(&self, keep: &WorldSet) -> HatModel {
        HatModel {
            model: self.model.restrict(keep),
            ..self.clone()
        }
    }

    /// The colour of every gnome at `w`.
    pub fn distribution(&self, w: WorldId) -> &[u16] {
        &self.distributions[w.index()]
    }

    pub fn world_of(&self, dist: &[u16]) -> Result<WorldId> {
        self.model.world(&world_name(dist, self.colours))
    }

    /// Every gnome owns its colour atoms.
    pub fn owners(&self) -> Arc<Owners> {
        Arc::new(Owners(
            self.gnomes
                .iter()
                .map(|g| {
                    (
                        g.clone(),
                        (0..self.colours).map(|c| colour_atom(c, g)).collect(),
                    )
                })
                .collect(),
        ))
    }
}

fn digit(c: u16, colours: usize) -> String {
    if colours <= 36 {
        char::from_digit(u32::from(c), 36).unwrap().to_string()
    } else {
        format!("{c}.")
    }
}

/// One base-`colours` digit per gnome; palettes wider than 36 use `c.` per gnome.
pub fn world_name(dist: &[u16], colours: usize) -> String {
    dist.iter().map(|&c| digit(c, colours)).collect()
}

/// The shape of a distribution: gnomes numbered by first occurrence of their colour.
pub fn shape(dist: &[u16]) -> Vec<u16> {
    let mut seen: Vec<u16> = Vec::new();
    dist.iter()
        .map(|c| match seen.iter().position(|s| s == c) {
            Some(i) => i as u16,
            None => {
                seen.push(*c);
                (seen.len() - 1) as u16
            }
        })
        .collect()
}

/// Sorted colour-group sizes of a distribution.
pub fn signature_of(dist: &[u16]) -> Vec<u16> {
    let mut counts: BTreeMap<u16, u16> = BTreeMap::new();
    for &c in dist {
        *counts.entry(c).or_default() += 1;
    }
    let mut sig: Vec<u16> = counts.into_values().collect();
    sig.sort_unstable();
    sig
}

/// Whether no colour in `dist` is worn by exactly one gnome.
pub fn no_unique_colour(dist: &[u16]) -> bool {
    signature_of(dist).iter().all(|&s| s >= 2)
}

/// All `colours^gnomes` distributions, gnome `g` indistinguishing worlds that agree on
/// every other gnome. Carries the colour-permutation class index.
pub fn hat_model(gnomes: usize, colours: usize) -> Result<HatModel> {
    let total = (colours as u128)
        .checked_pow(gnomes as u32)
        .unwrap_or(u128::MAX);
    if total > HAT_WORLD_LIMIT as u128 {
        return Err(Error::SizeGuard {
            what: "hat distributions",
            size: usize::try_from(total).unwrap_or(usize::MAX),
            limit: HAT_WORLD_LIMIT,
        });
    }
    hat_model_filtered(gnomes, colours, |_| true)
}

/// Distributions scanned by `hat_model_filtered` before filtering.
pub const HAT_SCAN_LIMIT: usize = 20_000_000;

/// The hat model restricted to the distributions accepted by `keep`, built directly.
/// Only the kept worlds count against `HAT_WORLD_LIMIT`.
pub fn hat_model_filtered(
    gnomes: usize,
    colours: usize,
    keep: impl Fn(&[u16]) -> bool,
) -> Result<HatModel> {
    if gnomes == 0 || colours == 0 {
        return Err(Error::InvalidModel(
            "need at least one gnome and one colour".into(),
        ));
    }
    let total = (colours as u128)
        .checked_pow(gnomes as u32)
        .unwrap_or(u128::MAX);
    if total > HAT_SCAN_LIMIT as u128 {
        return Err(Error::SizeGuard {
            what: "hat distributions scanned",
            size: usize::try_from(total).unwrap_or(usize::MAX),
            limit: HAT_SCAN_LIMIT,
        });
    }
    let mut dists = Vec::new();
    let mut cur = vec![0u16; gnomes];
    for _ in 0..total {
        if keep(&cur) {
            dists.push(cur.clone());
        }
        for d in cur.iter_mut().rev() {
            *d += 1;
            if (*d as usize) < colours {
                break;
            }
            *d = 0;
        }
    }
    if dists.len() > HAT_WORLD_LIMIT {
        return Err(Error::SizeGuard {
            what: "hat distributions",
            size: dists.len(),
            limit: HAT_WORLD_LIMIT,
        });
    }
    build_hat_model(gnomes, colours, dists)
}

fn build_hat_model(gnomes: usize, colours: usize, dists: Vec<Vec<u16>>) -> Result<HatModel> {
    let n = dists.len();
    let names = dists.iter().map(|d| world_name(d, colours)).collect();
    let ags = agents(gnomes);
    let frame = Arc::new(Frame::new(names, ags.clone())?);
    let relations = (0..gnomes)
        .map(|g| {
            Partition::from_keys(dists.iter().map(|d| {
                let mut k = d.clone();
                k[g] = u16::MAX;
                k
            }))
        })
        .collect();
    let mut valuation = BTreeMap::new();
    for (g, a) in ags.iter().enumerate() {
        for c in 0..colours {
            let ids = (0..n).filter(|&w| dists[w][g] as usize == c).map(WorldId);
            valuation.insert(colour_atom(c, a), WorldSet::from_ids(n, ids));
        }
    }
    let classes = Partition::from_keys(dists.iter().map(|d| shape(d)));
    let model = EpistemicModel::new(frame, relations, valuation)?.with_classes(classes);
    Ok(HatModel {
        gnomes: ags,
        colours,
        model,
        distributions: dists,
    })
}

/// `⋀_g ⋀_c (c_g -> ⋁_{h≠g} c_h)`: nobody wears a unique colour.
pub fn solvable_prime(gnomes: usize, colours: usize) -> Formula {
    let ags = agents(gnomes);
    Formula::conj(ags.iter().enumerate().flat_map(|(g, a)| {
        let ags = &ags;
        (0..colours).map(move |c| {
            let others = ags
                .iter()
                .enumerate()
                .filter(|&(h, _)| h != g)
                .map(|(_, b)| Formula::Atom(colour_atom(c, b)));
            Formula::implies(Formula::Atom(colour_atom(c, a)), Formula::disj(others))
        })
    }))
}

/// The complete description of a distribution: its own atoms true, all others false.
pub fn description(dist: &[u16], colours: usize) -> Formula {
    let ags = agents(dist.len());
    Formula::conj(ags.iter().zip(dist).flat_map(|(a, &d)| {
        (0..colours).map(move |c| {
            let p = Formula::Atom(colour_atom(c, a));
            if c == d as usize {
                p
            } else {
                Formula::not(p)
            }
        })
    }))
}

/// `c_g := ι(c)_g` for every colour and gnome, where `perm[c] = ι(c)`.
pub fn perm_assignment(perm: &[u16], gnomes: usize) -> Assignment {
    let pairs = agents(gnomes)
        .iter()
        .flat_map(|a| {
            perm.iter().enumerate().map(move |(c, &ic)| {
                (
                    colour_atom(c, a),
                    Formula::Atom(colour_atom(ic as usize, a)),
                )
            })
        })
        .collect();
    Assignment::new(pairs).expect("one binding per colour atom")
}

/// Every permutation of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<u16>> {
    let mut out = Vec::new();
    let mut cur: Vec<u16> = (0..n as u16).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
}

/// `⋀_{c} (K_g c_g | K_g ~c_g)` for each owned atom: `agent` knows its own values.
pub fn knows_own(agent: &Agent, atoms: &[Atom]) -> Formula {
    Formula::conj(atoms.iter().map(|p| {
        let p = Formula::Atom(p.clone());
        Formula::or(
            Formula::know(agent, p.clone()),
            Formula::know(agent, Formula::not(p)),
        )
    }))
}

/// `bell_L`: exactly the owners in `members` (a bit mask) know their own atoms.
pub fn bell_l(owners: &Owners, members: u64) -> Formula {
    Formula::conj(owners.0.iter().enumerate().map(|(i, (a, atoms))| {
        let k = knows_own(a, atoms);
        if members & (1 << i) != 0 {
            k
        } else {
            Formula::not(k)
        }
    }))
}

fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// The bell family of `kind`, literal for at most `LITERAL_BELL_AGENTS` owners and
/// symbolic otherwise (or when `literal` is false).
pub fn bell_family(owners: &Arc<Owners>, kind: BellKind, literal: bool) -> Announcement {
    let n = owners.0.len();
    if !literal || n > LITERAL_BELL_AGENTS {
        let name = match kind {
            BellKind::All => "bell",
            BellKind::NotLast => "bellN",
            BellKind::EmptyTest => "bellE",
        };
        return Announcement::bell(BellFamily {
            name: name.into(),
            kind,
            owners: owners.clone(),
        });
    }
    let full = full_mask(n);
    match kind {
        BellKind::All => Announcement::union((0..=full).map(|l| bell_l(owners, l))),
        BellKind::NotLast => Announcement::union((0..full).map(|l| bell_l(owners, l))),
        BellKind::EmptyTest => Announcement::test(bell_l(owners, 0)),
    }
}

/// `bellL` (everyone knows), `bellN`, `bell`, `bellE` (`bell_∅?`) and `bell0` (`bell_∅`).
pub fn puzzle_macros(owners: &Arc<Owners>, literal: bool) -> Macros {
    let mut m = Macros::new();
    let full = full_mask(owners.0.len());
    m.insert("bellL", Announcement::single(bell_l(owners, full)));
    m.insert("bell0", Announcement::single(bell_l(owners, 0)));
    m.insert("bellN", bell_family(owners, BellKind::NotLast, literal));
    m.insert("bell", bell_family(owners, BellKind::All, literal));
    m.insert("bellE", bell_family(owners, BellKind::EmptyTest, literal));
    m
}

/// How the permutation-invariance requirement on `p` is expressed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Invariance {
    /// `⋀_δ (U(δ̂ -> p) -> ⋀_ι [ι] U(δ̂ -> p))` with `U` the chain `K{g1}…K{gn}`,
    /// which reaches every world of the full hat model.
    Global,
    /// `⋀_δ ((δ̂ -> p) -> ⋀_ι [ι](δ̂ -> p))`, read at each world separately.
    Pointwise,
    /// `Inv{p}`, checked directly against the class index.
    Semantic,
}

/// How `bell^nlast` is iterated before `bell^last`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Iteration {
    /// `<p> <bellN>* bellL`
    Star,
    /// `<p> (mu q. bellL | <bellN> q)`
    Mu,
}

pub fn fixpoint_var() -> Atom {
    Atom::new("p")
}

fn universal(gnomes: &[Agent], f: Formula) -> Formula {
    gnomes.iter().rev().fold(f, |acc, g| Formula::know(g, acc))
}

/// The body `φ(p)` whose greatest fixpoint is `solvable`.
pub fn solvable_body(
    hats: &HatModel,
    invariance: Invariance,
    iteration: Iteration,
    literal_bell: bool,
) -> Result<Formula> {
    let g = hats.gnomes.len();
    let c = hats.colours;
    let p = Formula::Atom(fixpoint_var());
    let inv = match invariance {
        Invariance::Semantic => Formula::Invariant(fixpoint_var()),
        Invariance::Global | Invariance::Pointwise => {
            let deltas = c.pow(g as u32);
            let perms: usize = (1..=c).product();
            if deltas.saturating_mul(perms) > LITERAL_INVARIANCE_LIMIT {
                return Err(Error::SizeGuard {
                    what: "literal invariance conjunct",
                    size: deltas.saturating_mul(perms),
                    limit: LITERAL_INVARIANCE_LIMIT,
                });
            }
            let wrap = |f: Formula| match invariance {
                Invariance::Global => universal(&hats.gnomes, f),
                _ => f,
            };
            let sigmas: Vec<Assignment> = permutations(c)
                .iter()
                .map(|pi| perm_assignment(pi, g))
                .collect();
            let mut conj = Vec::with_capacity(deltas);
            let mut dist = vec![0u16; g];
            for _ in 0..deltas {
                let local = Formula::implies(description(&dist, c), p.clone());
                let images = Formula::conj(
                    sigmas
                        .iter()
                        .map(|s| Formula::Assign(s.clone(), Box::new(wrap(local.clone())))),
                );
                conj.push(Formula::implies(wrap(local), images));
                for d in dist.iter_mut().rev() {
                    *d += 1;
                    if (*d as usize) < c {
                        break;
                    }
                    *d = 0;
                }
            }
            Formula::conj(conj)
        }
    };
    let owners = hats.owners();
    let last = bell_l(&owners, full_mask(g));
    let nlast = bell_family(&owners, BellKind::NotLast, literal_bell);
    let tail = match iteration {
        Iteration::Star => Formula::Diamond(nlast, crate::lang::Repeat::Star, Box::new(last)),
        Iteration::Mu => {
            let q = Atom::new("q");
            Formula::lfp(
                &q,
                Formula::or(last, Formula::diamond(nlast, Formula::Atom(q.clone()))),
            )
        }
    };
    Ok(Formula::and(
        inv,
        Formula::diamond(Announcement::single(p), tail),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::{extension, knowing_sets};

    #[test]
    fn muddy_cube_shape() {
        let m = muddy_model(3).unwrap();
        assert_eq!(m.len(), 8);
        for i in 0..3 {
            assert!(m.blocks(i).iter().all(|b| b.len() == 2));
            assert_eq!(m.blocks(i).len(), 4);
        }
        let m1 = muddy_model(1).unwrap();
        assert_eq!(m1.blocks(0), vec![vec![WorldId(0), WorldId(1)]]);
        let m2 = muddy_model(2).unwrap();
        let a: Vec<Vec<String>> = m2
            .blocks(0)
            .iter()
            .map(|b| b.iter().map(|w| m2.name(*w).to_string()).collect())
            .collect();
        assert_eq!(a, vec![vec!["00", "10"], vec!["01", "11"]]);
        assert_eq!(extension(&m, &father(3)).unwrap().len(), 7);
        assert!(muddy_model(0).is_err() && muddy_model(13).is_err());
    }

    #[test]
    fn hat_model_shape() {
        let h = hat_model(3, 4).unwrap();
        assert_eq!(h.model.len(), 64);
        let w = h.model.world("000").unwrap();
        let block = h.model.relation(0).block_of(w, h.model.worlds());
        assert_eq!(h.model.names(&block), vec!["000", "100", "200", "300"]);
        let h1 = hat_model(1, 2).unwrap();
        assert_eq!(h1.model.blocks(0).len(), 1);
        let h2 = hat_model(2, 3).unwrap();
        let classes = h2.model.classes().unwrap();
        let same: Vec<_> = h2
            .model
            .worlds()
            .iter()
            .filter(|&w| classes.label(w) == classes.label(WorldId(0)))
            .collect();
        assert_eq!(same.len(), 3);
        assert!(hat_model(7, 8).is_err());
    }

    #[test]
    fn solvable_prime_extension() {
        let h = hat_model(3, 4).unwrap();
        let e = extension(&h.model, &solvable_prime(3, 4)).unwrap();
        assert_eq!(h.model.names(&e), vec!["000", "111", "222", "333"]);
        let h2 = hat_model(2, 3).unwrap();
        let e2 = extension(&h2.model, &solvable_prime(2, 3)).unwrap();
        assert_eq!(h2.model.names(&e2), vec!["00", "11", "22"]);
        let h1 = hat_model(1, 2).unwrap();
        assert!(extension(&h1.model, &solvable_prime(1, 2))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn solvable_prime_matches_signature_for_small_palettes() {
        for (g, c) in [(2, 2), (3, 3), (4, 3), (4, 5)] {
            let h = hat_model(g, c).unwrap();
            let e = extension(&h.model, &solvable_prime(g, c)).unwrap();
            for w in h.model.worlds().iter() {
                assert_eq!(e.contains(w), no_unique_colour(h.distribution(w)));
            }
        }
    }

    #[test]
    fn description_and_permutation() {
        let h = hat_model(3, 4).unwrap();
        let e = extension(&h.model, &description(&[1, 1, 0], 4)).unwrap();
        assert_eq!(h.model.names(&e), vec!["110"]);
        let swapped =
            crate::checker::apply_assignment(&h.model, &perm_assignment(&[1, 0, 2, 3], 3)).unwrap();
        let w = h.model.world("010").unwrap();
        let read: Vec<String> = swapped
            .true_atoms(w)
            .iter()
            .map(|a| a.to_string())
            .collect();
        assert_eq!(read, vec!["0_b", "1_a", "1_c"]);
        assert_eq!(permutations(3).len(), 6);
    }

    #[test]
    fn knowing_sets_in_muddy_restriction() {
        let m = muddy_model(3).unwrap();
        let r = m.restrict(&m.world_set(&["000", "100", "110"]).unwrap());
        let ks = knowing_sets(&r, &muddy_owners(3)).unwrap();
        let at = |w: &str| ks[r.world(w).unwrap().index()];
        assert_eq!(at("000"), 0b110);
        assert_eq!(at("100"), 0b100);
        assert_eq!(at("110"), 0b101);
        // nobody knows anything on the full cube
        let full = knowing_sets(&m, &muddy_owners(3)).unwrap();
        assert!(full.iter().all(|&k| k == 0));
        let macros = puzzle_macros(&muddy_owners(3), true);
        let f = crate::lang::parse_with("bell0", &macros).unwrap();
        assert_eq!(extension(&m, &f).unwrap().len(), 8);
    }

    #[test]
    fn literal_and_symbolic_bells_agree() {
        let m = muddy_model(3).unwrap();
        let r = m.restrict(&m.world_set(&["000", "100", "110", "111", "011"]).unwrap());
        let owners = muddy_owners(3);
        for body in [
            "<bellN> bellL",
            "[bell] K{a} m_a",
            "<bellN>* bellL",
            "[bellE] ~bellL",
        ] {
            let lit = crate::lang::parse_with(body, &puzzle_macros(&owners, true)).unwrap();
            let sym = crate::lang::parse_with(body, &puzzle_macros(&owners, false)).unwrap();
            assert_eq!(
                extension(&r, &lit).unwrap(),
                extension(&r, &sym).unwrap(),
                "{body}"
            );
        }
    }
}
