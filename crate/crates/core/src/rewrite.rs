//! Announcement elimination by reduction axioms, negation normal form, polarity
//! and the syntactic fixpoint-positive fragment.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::kripke::Atom;
use crate::lang::{Alternative, Announcement, Formula, Repeat};

/// Rewrites `f` into an equivalent announcement-free formula.
///
/// `[f] g` and `<f> g` are pushed inwards by structural recursion on `g`; nested
/// announcements compose through `<f> h`, which is itself announcement-free once
/// `f` is. Fixpoints, assignments, starred announcements, `Inv` and symbolic bells
/// are rejected.
pub fn reduce_announcements(f: &Formula) -> Result<Formula> {
    Ok(match f {
        Formula::Top | Formula::Bottom | Formula::Atom(_) => f.clone(),
        Formula::Not(a) => Formula::not(reduce_announcements(a)?),
        Formula::And(a, b) => Formula::and(reduce_announcements(a)?, reduce_announcements(b)?),
        Formula::Or(a, b) => Formula::or(reduce_announcements(a)?, reduce_announcements(b)?),
        Formula::Implies(a, b) => {
            Formula::implies(reduce_announcements(a)?, reduce_announcements(b)?)
        }
        Formula::Know(ag, a) => Formula::know(ag, reduce_announcements(a)?),
        Formula::Possible(ag, a) => Formula::possible(ag, reduce_announcements(a)?),
        Formula::Announce(ann, rep, body) => {
            let (alts, body) = unfold(ann, *rep, body, false)?;
            match alts {
                None => reduce_announcements(&body)?,
                Some(alts) => Formula::conj(
                    alts.iter()
                        .map(|psi| boxed(psi, &body))
                        .collect::<Result<Vec<_>>>()?,
                ),
            }
        }
        Formula::Diamond(ann, rep, body) => {
            let (alts, body) = unfold(ann, *rep, body, true)?;
            match alts {
                None => reduce_announcements(&body)?,
                Some(alts) => Formula::disj(
                    alts.iter()
                        .map(|psi| diamond(psi, &body))
                        .collect::<Result<Vec<_>>>()?,
                ),
            }
        }
        Formula::Gfp(..) | Formula::Lfp(..) => return Err(unsupported("fixpoint")),
        Formula::Assign(..) => return Err(unsupported("assignment")),
        Formula::Invariant(_) => return Err(unsupported("Inv")),
    })
}

fn unsupported(what: &str) -> Error {
    Error::Unsupported(format!(
        "{what} cannot be reduced to announcement-free form"
    ))
}

/// Peels one step off an iterated announcement. Returns the reduced alternatives of
/// the first step (or `None` if nothing is announced) and the remaining body.
fn unfold(
    ann: &Announcement,
    rep: Repeat,
    body: &Formula,
    dia: bool,
) -> Result<(Option<Vec<Formula>>, Formula)> {
    let rest = match rep {
        Repeat::Once => body.clone(),
        Repeat::Times(0) => return Ok((None, body.clone())),
        Repeat::Times(n) if dia => {
            Formula::Diamond(ann.clone(), Repeat::Times(n - 1), Box::new(body.clone()))
        }
        Repeat::Times(n) => {
            Formula::Announce(ann.clone(), Repeat::Times(n - 1), Box::new(body.clone()))
        }
        Repeat::Star => return Err(unsupported("starred announcement")),
    };
    Ok((Some(reduced_alternatives(ann)?), rest))
}

fn reduced_alternatives(ann: &Announcement) -> Result<Vec<Formula>> {
    let mut out = Vec::new();
    for alt in ann.alternatives() {
        match alt {
            Alternative::Formula(f) => out.push(reduce_announcements(f)?),
            Alternative::Test(f) => {
                let f = reduce_announcements(f)?;
                out.push(f.clone());
                out.push(Formula::not(f));
            }
            Alternative::Bell(_) => return Err(unsupported("symbolic bell")),
        }
    }
    Ok(out)
}

/// Same as `unfold` but for announcements nested under another one; keeps `Diamond`
/// and `Announce` bodies in the shape the caller expects.
fn nested(
    ann: &Announcement,
    rep: Repeat,
    body: &Formula,
    dia: bool,
) -> Result<(Option<Vec<Formula>>, Formula)> {
    match rep {
        Repeat::Times(n) if n > 0 => {
            let rest = if dia {
                Formula::Diamond(ann.clone(), Repeat::Times(n - 1), Box::new(body.clone()))
            } else {
                Formula::Announce(ann.clone(), Repeat::Times(n - 1), Box::new(body.clone()))
            };
            Ok((Some(raw_alternatives(ann)?), rest))
        }
        Repeat::Times(_) => Ok((None, body.clone())),
        Repeat::Once => Ok((Some(raw_alternatives(ann)?), body.clone())),
        Repeat::Star => Err(unsupported("starred announcement")),
    }
}

/// Alternatives as written, tests split; they are evaluated inside the outer
/// announcement and reduced by `diamond`.
fn raw_alternatives(ann: &Announcement) -> Result<Vec<Formula>> {
    let mut out = Vec::new();
    for alt in ann.alternatives() {
        match alt {
            Alternative::Formula(f) => out.push(f.clone()),
            Alternative::Test(f) => {
                out.push(f.clone());
                out.push(Formula::not(f.clone()));
            }
            Alternative::Bell(_) => return Err(unsupported("symbolic bell")),
        }
    }
    Ok(out)
}

/// `[psi] xi` for announcement-free `psi`.
fn boxed(psi: &Formula, xi: &Formula) -> Result<Formula> {
    let guard = |g: Formula| Formula::implies(psi.clone(), g);
    Ok(match xi {
        Formula::Top => Formula::Top,
        Formula::Bottom | Formula::Atom(_) => guard(xi.clone()),
        Formula::Not(a) => guard(Formula::not(diamond(psi, a)?)),
        Formula::And(a, b) => Formula::and(boxed(psi, a)?, boxed(psi, b)?),
        Formula::Or(a, b) => Formula::or(boxed(psi, a)?, boxed(psi, b)?),
        Formula::Implies(a, b) => Formula::implies(diamond(psi, a)?, boxed(psi, b)?),
        Formula::Know(ag, a) => guard(Formula::know(ag, boxed(psi, a)?)),
        Formula::Possible(ag, a) => guard(Formula::possible(ag, diamond(psi, a)?)),
        Formula::Announce(ann, rep, body) => match nested(ann, *rep, body, false)? {
            (None, body) => boxed(psi, &body)?,
            (Some(chis), body) => Formula::conj(
                chis.iter()
                    .map(|chi| boxed(&diamond(psi, chi)?, &body))
                    .collect::<Result<Vec<_>>>()?,
            ),
        },
        Formula::Diamond(ann, rep, body) => match nested(ann, *rep, body, true)? {
            (None, body) => boxed(psi, &body)?,
            (Some(chis), body) => guard(Formula::disj(
                chis.iter()
                    .map(|chi| diamond(&diamond(psi, chi)?, &body))
                    .collect::<Result<Vec<_>>>()?,
            )),
        },
        Formula::Gfp(..) | Formula::Lfp(..) => return Err(unsupported("fixpoint")),
        Formula::Assign(..) => return Err(unsupported("assignment")),
        Formula::Invariant(_) => return Err(unsupported("Inv")),
    })
}

/// `<psi> xi` for announcement-free `psi`.
fn diamond(psi: &Formula, xi: &Formula) -> Result<Formula> {
    let guard = |g: Formula| Formula::and(psi.clone(), g);
    Ok(match xi {
        Formula::Top => psi.clone(),
        Formula::Bottom => Formula::Bottom,
        Formula::Atom(_) => guard(xi.clone()),
        Formula::Not(a) => guard(Formula::not(boxed(psi, a)?)),
        Formula::And(a, b) => Formula::and(diamond(psi, a)?, diamond(psi, b)?),
        Formula::Or(a, b) => Formula::or(diamond(psi, a)?, diamond(psi, b)?),
        Formula::Implies(a, b) => guard(Formula::implies(boxed(psi, a)?, diamond(psi, b)?)),
        Formula::Know(ag, a) => guard(Formula::know(ag, boxed(psi, a)?)),
        Formula::Possible(ag, a) => guard(Formula::possible(ag, diamond(psi, a)?)),
        Formula::Diamond(ann, rep, body) => match nested(ann, *rep, body, true)? {
            (None, body) => diamond(psi, &body)?,
            (Some(chis), body) => Formula::disj(
                chis.iter()
                    .map(|chi| diamond(&diamond(psi, chi)?, &body))
                    .collect::<Result<Vec<_>>>()?,
            ),
        },
        Formula::Announce(ann, rep, body) => match nested(ann, *rep, body, false)? {
            (None, body) => diamond(psi, &body)?,
            (Some(chis), body) => guard(Formula::conj(
                chis.iter()
                    .map(|chi| boxed(&diamond(psi, chi)?, &body))
                    .collect::<Result<Vec<_>>>()?,
            )),
        },
        Formula::Gfp(..) | Formula::Lfp(..) => return Err(unsupported("fixpoint")),
        Formula::Assign(..) => return Err(unsupported("assignment")),
        Formula::Invariant(_) => return Err(unsupported("Inv")),
    })
}

/// Negation normal form of an announcement-free formula: `~` only on atoms,
/// `->` eliminated, `~K` turned into `Khat ~` and vice versa.
pub fn to_nnf(f: &Formula) -> Result<Formula> {
    nnf(f, false)
}

fn nnf(f: &Formula, neg: bool) -> Result<Formula> {
    Ok(match f {
        Formula::Top if neg => Formula::Bottom,
        Formula::Bottom if neg => Formula::Top,
        Formula::Top | Formula::Bottom => f.clone(),
        Formula::Atom(_) if neg => Formula::not(f.clone()),
        Formula::Atom(_) => f.clone(),
        Formula::Not(a) => nnf(a, !neg)?,
        Formula::And(a, b) if neg => Formula::or(nnf(a, true)?, nnf(b, true)?),
        Formula::And(a, b) => Formula::and(nnf(a, false)?, nnf(b, false)?),
        Formula::Or(a, b) if neg => Formula::and(nnf(a, true)?, nnf(b, true)?),
        Formula::Or(a, b) => Formula::or(nnf(a, false)?, nnf(b, false)?),
        Formula::Implies(a, b) if neg => Formula::and(nnf(a, false)?, nnf(b, true)?),
        Formula::Implies(a, b) => Formula::or(nnf(a, true)?, nnf(b, false)?),
        Formula::Know(ag, a) if neg => Formula::possible(ag, nnf(a, true)?),
        Formula::Know(ag, a) => Formula::know(ag, nnf(a, false)?),
        Formula::Possible(ag, a) if neg => Formula::know(ag, nnf(a, true)?),
        Formula::Possible(ag, a) => Formula::possible(ag, nnf(a, false)?),
        _ => {
            return Err(Error::Unsupported(
                "negation normal form needs an announcement-free formula".into(),
            ))
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarity {
    Positive,
    Negative,
    Mixed,
    Absent,
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::Positive => "positive",
            Polarity::Negative => "negative",
            Polarity::Mixed => "mixed",
            Polarity::Absent => "absent",
        })
    }
}

/// Sign of the occurrences of `x` in `to_nnf(reduce_announcements(f))`.
///
/// This is a property of that one canonical form, not of every equivalent formula.
pub fn polarity(f: &Formula, x: &Atom) -> Result<Polarity> {
    let n = to_nnf(&reduce_announcements(f)?)?;
    let (mut pos, mut neg) = (false, false);
    census(&n, x, &mut pos, &mut neg);
    Ok(match (pos, neg) {
        (true, true) => Polarity::Mixed,
        (true, false) => Polarity::Positive,
        (false, true) => Polarity::Negative,
        (false, false) => Polarity::Absent,
    })
}

fn census(f: &Formula, x: &Atom, pos: &mut bool, neg: &mut bool) {
    match f {
        Formula::Atom(p) if p == x => *pos = true,
        Formula::Not(a) if matches!(&**a, Formula::Atom(p) if p == x) => *neg = true,
        Formula::And(a, b) | Formula::Or(a, b) => {
            census(a, x, pos, neg);
            census(b, x, pos, neg);
        }
        Formula::Know(_, a) | Formula::Possible(_, a) => census(a, x, pos, neg),
        _ => {}
    }
}

/// Membership in `φ ::= q | p | ~p | φ|φ | φ&φ | K{a}φ | [~φ]φ` where `q` ranges over
/// `designated` and `p` over every other atom. `true` and `false` are admitted too.
pub fn in_fixpoint_positive_fragment(f: &Formula, designated: &BTreeSet<Atom>) -> bool {
    let rec = |g: &Formula| in_fixpoint_positive_fragment(g, designated);
    match f {
        Formula::Top | Formula::Bottom | Formula::Atom(_) => true,
        Formula::Not(a) => matches!(&**a, Formula::Atom(p) if !designated.contains(p)),
        Formula::And(a, b) | Formula::Or(a, b) => rec(a) && rec(b),
        Formula::Know(_, a) => rec(a),
        Formula::Announce(ann, Repeat::Once, body) => match ann.as_single() {
            Some(Formula::Not(psi)) => rec(psi) && rec(body),
            _ => false,
        },
        _ => false,
    }
}
