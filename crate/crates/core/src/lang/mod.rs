//! Formulas of public announcement logic with fixpoints, iteration and assignments.

mod parse;
mod print;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::kripke::{Agent, Atom};

pub use parse::{parse, parse_with, Macros};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Top,
    Bottom,
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Know(Agent, Box<Formula>),
    /// `Khat{a} f`, the dual of `K{a}`.
    Possible(Agent, Box<Formula>),
    /// `[ann] f`, `[ann]^n f`, `[ann]* f`
    Announce(Announcement, Repeat, Box<Formula>),
    /// `<ann> f` and its iterated forms.
    Diamond(Announcement, Repeat, Box<Formula>),
    Gfp(Atom, Box<Formula>),
    Lfp(Atom, Box<Formula>),
    Assign(Assignment, Box<Formula>),
    /// `Inv{p}`: the extension of `p` is a union of colour-permutation classes.
    Invariant(Atom),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Repeat {
    Once,
    Times(u32),
    /// Bounded by the evaluator; see `checker::Config::star_bound`.
    Star,
}

/// A non-deterministic choice between announcements; `[a u b] f` is `[a] f & [b] f`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Announcement {
    alts: Vec<Alternative>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Alternative {
    Formula(Formula),
    /// `f?`, shorthand for `f u ~f`.
    Test(Formula),
    /// A bell family executed by partitioning on knowing sets rather than materialised.
    Bell(BellFamily),
}

/// Which knowing sets a symbolic bell announcement ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BellKind {
    /// every `L ⊆ G`
    All,
    /// every `L ⊊ G`
    NotLast,
    /// `bell_∅ u ~bell_∅`
    EmptyTest,
}

/// The agents of a puzzle together with the atoms each agent tries to learn.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Owners(pub Vec<(Agent, Vec<Atom>)>);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BellFamily {
    pub name: String,
    pub kind: BellKind,
    pub owners: Arc<Owners>,
}

impl Announcement {
    pub fn single(f: Formula) -> Self {
        Self {
            alts: vec![Alternative::Formula(f)],
        }
    }

    pub fn test(f: Formula) -> Self {
        Self {
            alts: vec![Alternative::Test(f)],
        }
    }

    pub fn union(alts: impl IntoIterator<Item = Formula>) -> Self {
        Self::from_alternatives(alts.into_iter().map(Alternative::Formula).collect())
    }

    /// # Panics
    /// If `alts` is empty.
    pub fn from_alternatives(alts: Vec<Alternative>) -> Self {
        assert!(
            !alts.is_empty(),
            "an announcement needs at least one alternative"
        );
        Self { alts }
    }

    pub fn bell(family: BellFamily) -> Self {
        Self {
            alts: vec![Alternative::Bell(family)],
        }
    }

    pub fn alternatives(&self) -> &[Alternative] {
        &self.alts
    }

    /// The single announced formula, if this is not a choice.
    pub fn as_single(&self) -> Option<&Formula> {
        match self.alts.as_slice() {
            [Alternative::Formula(f)] => Some(f),
            _ => None,
        }
    }

    fn map_formulas(&self, mut f: impl FnMut(&Formula) -> Formula) -> Announcement {
        let alts = self
            .alts
            .iter()
            .map(|a| match a {
                Alternative::Formula(g) => Alternative::Formula(f(g)),
                Alternative::Test(g) => Alternative::Test(f(g)),
                Alternative::Bell(b) => Alternative::Bell(b.clone()),
            })
            .collect();
        Announcement { alts }
    }
}

/// Simultaneous substitution `[p := f, q := g]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Assignment {
    pairs: Vec<(Atom, Formula)>,
}

impl Assignment {
    /// Returns `None` if an atom is bound twice.
    pub fn new(pairs: Vec<(Atom, Formula)>) -> Option<Self> {
        let mut seen = BTreeSet::new();
        if pairs.iter().all(|(p, _)| seen.insert(p.clone())) {
            Some(Self { pairs })
        } else {
            None
        }
    }

    pub fn pairs(&self) -> &[(Atom, Formula)] {
        &self.pairs
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn binds(&self, p: &Atom) -> bool {
        self.pairs.iter().any(|(q, _)| q == p)
    }

    fn map_formulas(&self, mut f: impl FnMut(&Formula) -> Formula) -> Assignment {
        Assignment {
            pairs: self.pairs.iter().map(|(p, g)| (p.clone(), f(g))).collect(),
        }
    }
}

#[allow(clippy::should_implement_trait)]
impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(Atom::new(name))
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn know(a: &Agent, f: Formula) -> Formula {
        Formula::Know(a.clone(), Box::new(f))
    }

    pub fn possible(a: &Agent, f: Formula) -> Formula {
        Formula::Possible(a.clone(), Box::new(f))
    }

    pub fn announce(ann: Announcement, f: Formula) -> Formula {
        Formula::Announce(ann, Repeat::Once, Box::new(f))
    }

    pub fn diamond(ann: Announcement, f: Formula) -> Formula {
        Formula::Diamond(ann, Repeat::Once, Box::new(f))
    }

    pub fn gfp(x: &Atom, f: Formula) -> Formula {
        Formula::Gfp(x.clone(), Box::new(f))
    }

    pub fn lfp(x: &Atom, f: Formula) -> Formula {
        Formula::Lfp(x.clone(), Box::new(f))
    }

    /// Left-nested conjunction; `Top` when empty.
    pub fn conj(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::Top)
    }

    /// Left-nested disjunction; `Bottom` when empty.
    pub fn disj(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::Bottom)
    }

    /// Number of nodes, counting announcement and assignment contents.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        match self {
            Formula::Top | Formula::Bottom | Formula::Atom(_) | Formula::Invariant(_) => {}
            Formula::Not(a) | Formula::Know(_, a) | Formula::Possible(_, a) => a.visit(f),
            Formula::Gfp(_, a) | Formula::Lfp(_, a) => a.visit(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Formula::Announce(ann, _, body) | Formula::Diamond(ann, _, body) => {
                for alt in ann.alternatives() {
                    if let Alternative::Formula(g) | Alternative::Test(g) = alt {
                        g.visit(f);
                    }
                }
                body.visit(f);
            }
            Formula::Assign(sigma, body) => {
                for (_, g) in sigma.pairs() {
                    g.visit(f);
                }
                body.visit(f);
            }
        }
    }

    /// Atoms with a free occurrence (not bound by an enclosing fixpoint or assignment).
    pub fn free_vars(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Atom>, out: &mut BTreeSet<Atom>) {
        match self {
            Formula::Top | Formula::Bottom => {}
            Formula::Atom(p) | Formula::Invariant(p) => {
                if !bound.contains(p) {
                    out.insert(p.clone());
                }
            }
            Formula::Not(a) | Formula::Know(_, a) | Formula::Possible(_, a) => {
                a.collect_free(bound, out)
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Announce(ann, rep, body) | Formula::Diamond(ann, rep, body) => {
                // `[f]^0 g` is `g`: the announcement is never evaluated
                let alts = if *rep == Repeat::Times(0) {
                    &[][..]
                } else {
                    ann.alternatives()
                };
                for alt in alts {
                    match alt {
                        Alternative::Formula(g) | Alternative::Test(g) => {
                            g.collect_free(bound, out)
                        }
                        Alternative::Bell(b) => {
                            for (_, atoms) in &b.owners.0 {
                                for p in atoms {
                                    if !bound.contains(p) {
                                        out.insert(p.clone());
                                    }
                                }
                            }
                        }
                    }
                }
                body.collect_free(bound, out);
            }
            Formula::Gfp(x, a) | Formula::Lfp(x, a) => {
                bound.push(x.clone());
                a.collect_free(bound, out);
                bound.pop();
            }
            Formula::Assign(sigma, body) => {
                for (_, g) in sigma.pairs() {
                    g.collect_free(bound, out);
                }
                let n = bound.len();
                bound.extend(sigma.pairs().iter().map(|(p, _)| p.clone()));
                body.collect_free(bound, out);
                bound.truncate(n);
            }
        }
    }

    /// Replaces every free occurrence of `x` by `~x`.
    pub fn negate_free(&self, x: &Atom) -> Formula {
        let rec = |f: &Formula| f.negate_free(x);
        match self {
            Formula::Atom(p) if p == x => Formula::not(self.clone()),
            Formula::Top | Formula::Bottom | Formula::Atom(_) | Formula::Invariant(_) => {
                self.clone()
            }
            Formula::Not(a) => Formula::not(rec(a)),
            Formula::And(a, b) => Formula::and(rec(a), rec(b)),
            Formula::Or(a, b) => Formula::or(rec(a), rec(b)),
            Formula::Implies(a, b) => Formula::implies(rec(a), rec(b)),
            Formula::Know(ag, a) => Formula::know(ag, rec(a)),
            Formula::Possible(ag, a) => Formula::possible(ag, rec(a)),
            Formula::Announce(ann, r, body) => {
                Formula::Announce(ann.map_formulas(rec), *r, Box::new(rec(body)))
            }
            Formula::Diamond(ann, r, body) => {
                Formula::Diamond(ann.map_formulas(rec), *r, Box::new(rec(body)))
            }
            Formula::Gfp(y, _) | Formula::Lfp(y, _) if y == x => self.clone(),
            Formula::Gfp(y, a) => Formula::gfp(y, rec(a)),
            Formula::Lfp(y, a) => Formula::lfp(y, rec(a)),
            Formula::Assign(sigma, body) => {
                let sigma2 = sigma.map_formulas(rec);
                let body2 = if sigma.binds(x) {
                    (**body).clone()
                } else {
                    rec(body)
                };
                Formula::Assign(sigma2, Box::new(body2))
            }
        }
    }

    /// Rewrites all abbreviations into the primitive connectives.
    ///
    /// The output uses only `Top`, atoms, `~`, `&`, `K`, single-step and starred
    /// announcements (possibly unions), `nu`, assignments and `Inv`.
    pub fn desugar(&self) -> Formula {
        match self {
            Formula::Top | Formula::Atom(_) | Formula::Invariant(_) => self.clone(),
            Formula::Bottom => Formula::not(Formula::Top),
            Formula::Not(a) => Formula::not(a.desugar()),
            Formula::And(a, b) => Formula::and(a.desugar(), b.desugar()),
            Formula::Or(a, b) => Formula::not(Formula::and(
                Formula::not(a.desugar()),
                Formula::not(b.desugar()),
            )),
            Formula::Implies(a, b) => {
                Formula::not(Formula::and(a.desugar(), Formula::not(b.desugar())))
            }
            Formula::Know(ag, a) => Formula::know(ag, a.desugar()),
            Formula::Possible(ag, a) => Formula::not(Formula::know(ag, Formula::not(a.desugar()))),
            Formula::Announce(ann, rep, body) => {
                let ann = desugar_announcement(ann);
                let body = body.desugar();
                match rep {
                    Repeat::Once => Formula::Announce(ann, Repeat::Once, Box::new(body)),
                    Repeat::Star => Formula::Announce(ann, Repeat::Star, Box::new(body)),
                    Repeat::Times(n) => (0..*n).fold(body, |acc, _| {
                        Formula::Announce(ann.clone(), Repeat::Once, Box::new(acc))
                    }),
                }
            }
            Formula::Diamond(ann, rep, body) => {
                let ann = desugar_announcement(ann);
                let body = body.desugar();
                let step = |inner: Formula, rep: Repeat| {
                    Formula::not(Formula::Announce(
                        ann.clone(),
                        rep,
                        Box::new(Formula::not(inner)),
                    ))
                };
                match rep {
                    Repeat::Once => step(body, Repeat::Once),
                    Repeat::Star => step(body, Repeat::Star),
                    Repeat::Times(n) => (0..*n).fold(body, |acc, _| step(acc, Repeat::Once)),
                }
            }
            Formula::Gfp(x, a) => Formula::gfp(x, a.desugar()),
            Formula::Lfp(x, a) => {
                Formula::not(Formula::gfp(x, Formula::not(a.desugar().negate_free(x))))
            }
            Formula::Assign(sigma, body) => Formula::Assign(
                sigma.map_formulas(Formula::desugar),
                Box::new(body.desugar()),
            ),
        }
    }
}

fn desugar_announcement(ann: &Announcement) -> Announcement {
    let mut alts = Vec::with_capacity(ann.alts.len());
    for alt in &ann.alts {
        match alt {
            Alternative::Formula(f) => alts.push(Alternative::Formula(f.desugar())),
            Alternative::Test(f) => {
                let f = f.desugar();
                alts.push(Alternative::Formula(Formula::not(f.clone())));
                alts.insert(alts.len() - 1, Alternative::Formula(f));
            }
            Alternative::Bell(b) => alts.push(Alternative::Bell(b.clone())),
        }
    }
    Announcement { alts }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print::print(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn khat_desugars_to_not_know_not() {
        assert_eq!(p("Khat{a} q").desugar(), p("~K{a} ~q"));
    }

    #[test]
    fn test_desugars_to_union_with_negation() {
        assert_eq!(p("[q?] r").desugar(), p("[q u ~q] r"));
    }

    #[test]
    fn mu_substitutes_free_occurrences_only() {
        let f = p("mu x. K{a} x & nu x. x");
        let expected = p("~nu x. ~(K{a} ~x & nu x. x)");
        assert_eq!(f.desugar(), expected);
    }

    #[test]
    fn bounded_iteration_unfolds() {
        assert_eq!(p("[q]^2 r").desugar(), p("[q] [q] r"));
        assert_eq!(p("[q]^0 r").desugar(), p("r"));
        assert_eq!(p("<q>^2 r").desugar(), p("~[q] ~~[q] ~r"));
    }

    #[test]
    fn free_vars_respect_binders() {
        let f = p("nu x. x & y & [x := z] x");
        let fv: Vec<String> = f.free_vars().iter().map(|a| a.to_string()).collect();
        assert_eq!(fv, vec!["y", "z"]);
    }

    #[test]
    fn assignment_rejects_duplicate_binding() {
        assert!(Assignment::new(vec![
            (Atom::new("p"), Formula::Top),
            (Atom::new("p"), Formula::Bottom)
        ])
        .is_none());
        assert!(parse("[p := q, p := r] p").is_err());
    }
}
