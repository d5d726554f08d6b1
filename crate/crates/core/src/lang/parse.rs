use std::collections::HashMap;

use super::{Alternative, Announcement, Assignment, Formula, Repeat};
use crate::error::{Error, Result};
use crate::kripke::{Agent, Atom};

/// Named announcements substituted at parse time, e.g. `bellL` or `bellN`.
///
/// A macro with a single formula alternative may stand anywhere a formula may;
/// a choice (union or symbolic bell) may only appear inside `[..]` or `<..>`.
#[derive(Clone, Debug, Default)]
pub struct Macros {
    table: HashMap<String, Announcement>,
}

impl Macros {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, ann: Announcement) {
        self.table.insert(name.into(), ann);
    }

    pub fn get(&self, name: &str) -> Option<&Announcement> {
        self.table.get(name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Not,
    And,
    Or,
    Arrow,
    LBracket,
    RBracket,
    LAngle,
    RAngle,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Caret,
    Star,
    Question,
    Dot,
    Comma,
    Define,
}

const RESERVED: [&str; 5] = ["nu", "mu", "u", "true", "false"];

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if is_ident_char(c) {
            let mut end = pos;
            while let Some(&(i, d)) = chars.peek() {
                if !is_ident_char(d) {
                    break;
                }
                end = i + d.len_utf8();
                chars.next();
            }
            out.push((pos, Tok::Ident(text[pos..end].to_string())));
            continue;
        }
        chars.next();
        let tok = match c {
            '~' => Tok::Not,
            '&' => Tok::And,
            '|' => Tok::Or,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '<' => Tok::LAngle,
            '>' => Tok::RAngle,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '^' => Tok::Caret,
            '*' => Tok::Star,
            '?' => Tok::Question,
            '.' => Tok::Dot,
            ',' => Tok::Comma,
            '-' if matches!(chars.peek(), Some((_, '>'))) => {
                chars.next();
                Tok::Arrow
            }
            ':' if matches!(chars.peek(), Some((_, '='))) => {
                chars.next();
                Tok::Define
            }
            other => {
                return Err(Error::Syntax {
                    pos,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push((pos, tok));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    macros: &'a Macros,
}

pub fn parse(text: &str) -> Result<Formula> {
    parse_with(text, &Macros::default())
}

pub fn parse_with(text: &str, macros: &Macros) -> Result<Formula> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
        end: text.len(),
        macros,
    };
    let f = p.form()?;
    if p.at < p.toks.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(f)
}

impl Parser<'_> {
    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |t| t.0)
    }

    fn error(&self, msg: &str) -> Error {
        let found = match self.toks.get(self.at) {
            Some((_, t)) => format!("{t:?}"),
            None => "end of input".to_string(),
        };
        Error::Syntax {
            pos: self.pos(),
            msg: format!("{msg} (found {found})"),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.1)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.at + k).map(|t| &t.1)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<()> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.error(&format!("expected {what}")))
        }
    }

    fn peek_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    /// An identifier that is not a reserved word.
    fn ident(&mut self, what: &str) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) if !RESERVED.contains(&s.as_str()) => {
                let s = s.clone();
                self.at += 1;
                Ok(s)
            }
            _ => Err(self.error(&format!("expected {what}"))),
        }
    }

    fn form(&mut self) -> Result<Formula> {
        let lhs = self.disj()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.form()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disj(&mut self) -> Result<Formula> {
        let mut f = self.conj()?;
        while self.eat(&Tok::Or) {
            f = Formula::or(f, self.conj()?);
        }
        Ok(f)
    }

    fn conj(&mut self) -> Result<Formula> {
        let mut f = self.unary()?;
        while self.eat(&Tok::And) {
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn agent_brace(&mut self) -> Result<Agent> {
        self.expect(&Tok::LBrace, "`{`")?;
        let a = self.ident("agent name")?;
        self.expect(&Tok::RBrace, "`}`")?;
        Ok(Agent::new(a))
    }

    fn repeat(&mut self) -> Result<Repeat> {
        if self.eat(&Tok::Star) {
            return Ok(Repeat::Star);
        }
        if self.eat(&Tok::Caret) {
            return match self.peek() {
                Some(Tok::Ident(s)) if s.bytes().all(|b| b.is_ascii_digit()) => {
                    let n = s
                        .parse::<u32>()
                        .map_err(|_| self.error("iteration count too large"))?;
                    self.at += 1;
                    Ok(Repeat::Times(n))
                }
                _ => Err(self.error("expected iteration count after `^`")),
            };
        }
        Ok(Repeat::Once)
    }

    fn unary(&mut self) -> Result<Formula> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.error("expected formula"));
        };
        match tok {
            Tok::Not => {
                self.at += 1;
                Ok(Formula::not(self.unary()?))
            }
            Tok::LParen => {
                self.at += 1;
                let f = self.form()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::LBracket => {
                self.at += 1;
                if matches!(self.peek(), Some(Tok::Ident(_)))
                    && self.peek_at(1) == Some(&Tok::Define)
                {
                    return self.assignment();
                }
                let ann = self.announcement(&Tok::RBracket)?;
                self.expect(&Tok::RBracket, "`]`")?;
                let rep = self.repeat()?;
                let body = self.unary()?;
                Ok(Formula::Announce(ann, rep, Box::new(body)))
            }
            Tok::LAngle => {
                self.at += 1;
                let ann = self.announcement(&Tok::RAngle)?;
                self.expect(&Tok::RAngle, "`>`")?;
                let rep = self.repeat()?;
                let body = self.unary()?;
                Ok(Formula::Diamond(ann, rep, Box::new(body)))
            }
            Tok::Ident(name) => {
                let braced = self.peek_at(1) == Some(&Tok::LBrace);
                match name.as_str() {
                    "K" if braced => {
                        self.at += 1;
                        let a = self.agent_brace()?;
                        Ok(Formula::Know(a, Box::new(self.unary()?)))
                    }
                    "Khat" if braced => {
                        self.at += 1;
                        let a = self.agent_brace()?;
                        Ok(Formula::Possible(a, Box::new(self.unary()?)))
                    }
                    "Inv" if braced => {
                        self.at += 1;
                        self.expect(&Tok::LBrace, "`{`")?;
                        let p = self.ident("atom")?;
                        self.expect(&Tok::RBrace, "`}`")?;
                        Ok(Formula::Invariant(Atom::new(p)))
                    }
                    "nu" | "mu" => {
                        self.at += 1;
                        let x = Atom::new(self.ident("fixpoint variable")?);
                        self.expect(&Tok::Dot, "`.`")?;
                        let body = self.form()?;
                        Ok(if name == "nu" {
                            Formula::gfp(&x, body)
                        } else {
                            Formula::lfp(&x, body)
                        })
                    }
                    "true" => {
                        self.at += 1;
                        Ok(Formula::Top)
                    }
                    "false" => {
                        self.at += 1;
                        Ok(Formula::Bottom)
                    }
                    "u" => Err(self.error("`u` is only allowed between announcement alternatives")),
                    _ => {
                        if let Some(m) = self.macros.get(&name) {
                            return match m.as_single() {
                                Some(f) => {
                                    self.at += 1;
                                    Ok(f.clone())
                                }
                                None => Err(self.error(&format!(
                                    "macro `{name}` is a choice and may only be announced"
                                ))),
                            };
                        }
                        self.at += 1;
                        Ok(Formula::Atom(Atom::new(name)))
                    }
                }
            }
            Tok::Question => Err(self.error("`?` is only allowed on announcement alternatives")),
            _ => Err(self.error("expected formula")),
        }
    }

    fn announcement(&mut self, close: &Tok) -> Result<Announcement> {
        let mut alts = Vec::new();
        loop {
            self.alternative(close, &mut alts)?;
            if self.peek_keyword("u") {
                self.at += 1;
            } else {
                break;
            }
        }
        Ok(Announcement::from_alternatives(alts))
    }

    fn alternative(&mut self, close: &Tok, alts: &mut Vec<Alternative>) -> Result<()> {
        if let Some(Tok::Ident(name)) = self.peek() {
            if let Some(m) = self.macros.get(name) {
                let ends = match self.peek_at(1) {
                    None => true,
                    Some(Tok::Ident(s)) => s == "u",
                    Some(t) => t == close,
                };
                if ends && m.as_single().is_none() {
                    alts.extend(m.alternatives().iter().cloned());
                    self.at += 1;
                    return Ok(());
                }
            }
        }
        let f = self.form()?;
        if self.eat(&Tok::Question) {
            alts.push(Alternative::Test(f));
        } else {
            alts.push(Alternative::Formula(f));
        }
        Ok(())
    }

    fn assignment(&mut self) -> Result<Formula> {
        let mut pairs = Vec::new();
        loop {
            let start = self.pos();
            let p = Atom::new(self.ident("assigned atom")?);
            self.expect(&Tok::Define, "`:=`")?;
            let f = self.form()?;
            if pairs.iter().any(|(q, _): &(Atom, Formula)| *q == p) {
                return Err(Error::Syntax {
                    pos: start,
                    msg: format!("atom `{p}` assigned twice"),
                });
            }
            pairs.push((p, f));
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(&Tok::RBracket, "`]`")?;
        let body = self.unary()?;
        let sigma = Assignment::new(pairs).expect("duplicates rejected above");
        Ok(Formula::Assign(sigma, Box::new(body)))
    }
}
