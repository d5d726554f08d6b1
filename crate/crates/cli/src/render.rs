//! Text and JSON output.

use std::collections::BTreeMap;
use std::fmt;

use palfix::rounds::{DepartureLog, RoundResult, Solution};
use palfix::EpistemicModel;
use serde::Serialize;

use crate::Failure;

pub fn print_json<T: Serialize>(value: &T) {
    outln!(
        "{}",
        serde_json::to_string_pretty(value).expect("reports serialise")
    );
}

pub fn set<S: AsRef<str>>(items: &[S]) -> String {
    let items: Vec<&str> = items.iter().map(AsRef::as_ref).collect();
    format!("{{{}}}", items.join(","))
}

fn sizes(sig: &[u16]) -> String {
    let v: Vec<String> = sig.iter().map(u16::to_string).collect();
    set(&v)
}

/// Every step of a run must be a restriction of the step before it.
pub fn check_trace(result: &RoundResult) -> Result<(), Failure> {
    for (i, pair) in result.trace.windows(2).enumerate() {
        if !pair[1].model.is_restriction_of(&pair[0].model) {
            return Err(Failure::Usage(format!(
                "internal: trace step {} is not a restriction of step {i}",
                i + 1
            )));
        }
    }
    Ok(())
}

#[derive(Serialize)]
pub struct CheckReport {
    pub world: String,
    pub formula: String,
    pub value: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extension: Option<Vec<String>>,
}

#[derive(Serialize)]
pub struct TraceEvent {
    pub label: String,
    pub worlds: Vec<String>,
    /// per agent, its blocks with more than one world
    pub blocks: BTreeMap<String, Vec<Vec<String>>>,
    /// per live world, the agents that know their own atoms there
    pub knowing: BTreeMap<String, Vec<String>>,
}

#[derive(Serialize)]
pub struct RunReport {
    pub point: String,
    pub solved: bool,
    pub refinements: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub last_ring: Option<usize>,
    /// per agent, the ring at which it first knows
    pub departures: BTreeMap<String, Option<usize>>,
    pub ignorant: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceEvent>>,
}

fn blocks(m: &EpistemicModel) -> BTreeMap<String, Vec<Vec<String>>> {
    m.agents()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let bs = m
                .blocks(i)
                .into_iter()
                .filter(|b| b.len() > 1)
                .map(|b| b.into_iter().map(|w| m.name(w).to_string()).collect())
                .collect();
            (a.to_string(), bs)
        })
        .collect()
}

impl RunReport {
    pub fn new(result: &RoundResult, with_trace: bool) -> Self {
        let agents: Vec<String> = result.owners.0.iter().map(|(a, _)| a.to_string()).collect();
        let model = result.final_model();
        let trace = with_trace.then(|| {
            result
                .trace
                .iter()
                .map(|step| {
                    let m = &step.model;
                    let knowing = m
                        .worlds()
                        .iter()
                        .map(|w| {
                            let mask = step.knowing[w.index()];
                            let who = (0..agents.len())
                                .filter(|i| mask & (1 << i) != 0)
                                .map(|i| agents[i].clone())
                                .collect();
                            (m.name(w).to_string(), who)
                        })
                        .collect();
                    TraceEvent {
                        label: step.label.clone(),
                        worlds: m.names(m.worlds()),
                        blocks: blocks(m),
                        knowing,
                    }
                })
                .collect()
        });
        RunReport {
            point: model.name(result.point).to_string(),
            solved: result.solved,
            refinements: result.refinements,
            last_ring: result.last_ring(),
            departures: agents
                .iter()
                .cloned()
                .zip(result.departure_ring.iter().copied())
                .collect(),
            ignorant: result
                .ignorant()
                .into_iter()
                .map(|i| agents[i].clone())
                .collect(),
            trace,
        }
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "point: {}", self.point)?;
        match self.last_ring {
            Some(r) => writeln!(
                f,
                "solved after {} refinement(s); last departure at ring {r}",
                self.refinements
            )?,
            None => writeln!(
                f,
                "stuck after {} refinement(s); never knowing: {}",
                self.refinements,
                set(&self.ignorant)
            )?,
        }
        for (a, d) in &self.departures {
            match d {
                Some(r) => writeln!(f, "  {a}: knows at ring {r}")?,
                None => writeln!(f, "  {a}: never knows")?,
            }
        }
        if let Some(trace) = &self.trace {
            for (i, e) in trace.iter().enumerate() {
                writeln!(f, "step {i}: {}", e.label)?;
                writeln!(f, "  worlds ({}): {}", e.worlds.len(), set(&e.worlds))?;
                for (a, bs) in &e.blocks {
                    let bs: Vec<String> = bs.iter().map(|b| set(b)).collect();
                    writeln!(f, "  {a}: {}", bs.join(" "))?;
                }
                let knowing: Vec<String> = e
                    .knowing
                    .iter()
                    .map(|(w, who)| format!("{w}:{}", set(who)))
                    .collect();
                writeln!(f, "  knowing: {}", knowing.join(" "))?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize)]
pub struct FixpointSummary {
    /// how the invariance conjunct was built
    pub invariance: &'static str,
    pub u: Vec<String>,
    pub truth_set: Vec<String>,
    pub post_fixed: usize,
    pub candidates: usize,
    pub monotone: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subset_enumeration_agrees: Option<bool>,
}

#[derive(Serialize)]
pub struct HatRun {
    pub world: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log: Option<DepartureLog>,
    pub run: RunReport,
}

#[derive(Serialize)]
pub struct HatsReport {
    pub gnomes: usize,
    pub colours: usize,
    pub worlds: usize,
    pub solvable_prime: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixpoint: Option<FixpointSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub run: Option<HatRun>,
}

impl fmt::Display for HatsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "hats: {} gnomes, {} colours, {} worlds",
            self.gnomes, self.colours, self.worlds
        )?;
        writeln!(
            f,
            "solvable': {} worlds {}",
            self.solvable_prime.len(),
            set(&self.solvable_prime)
        )?;
        if let Some(fx) = &self.fixpoint {
            writeln!(f, "solvable ({} invariance):", fx.invariance)?;
            writeln!(f, "  U = {}", set(&fx.u))?;
            writeln!(f, "  truth set = {}", set(&fx.truth_set))?;
            writeln!(
                f,
                "  {} post-fixed of {} invariant candidates; monotone: {}",
                fx.post_fixed, fx.candidates, fx.monotone
            )?;
            if let Some(agrees) = fx.subset_enumeration_agrees {
                writeln!(f, "  subset enumeration agrees: {agrees}")?;
            }
        }
        if let Some(run) = &self.run {
            writeln!(f, "world {}:", run.world)?;
            if let Some(log) = &run.log {
                write!(f, "{log}")?;
            }
            write!(f, "{}", run.run)?;
        }
        Ok(())
    }
}

pub fn log_text(sig: &[u16], log: &DepartureLog) -> String {
    format!(
        "signature: {}\n{log}last departure: ring {}\n",
        sizes(sig),
        log.last_ring()
    )
}

pub fn solution_text(s: &Solution) -> String {
    let range = match s.in_answer_range {
        Some(true) => " (within the answer range)",
        Some(false) => " (outside the answer range)",
        None => "",
    };
    format!(
        "signature: {}\nN = {}{range}\n{}",
        sizes(&s.signature),
        s.n,
        s.log
    )
}

#[derive(Serialize)]
pub struct RewriteReport {
    pub formula: String,
    pub reduced: String,
    pub nnf: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polarity: Option<String>,
}
