//! `palfix`: model checking and puzzle solving from the command line.
//!
//! Exit codes: 0 for a true formula or a solved run, 1 for a false formula, a stuck
//! run or an empty search, 2 for usage, parse and load errors.

/// `print!` that exits quietly once the reader has gone away, e.g. `palfix … | head`.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        if write!(std::io::stdout().lock(), $($arg)*).is_err() {
            std::process::exit(0);
        }
    }};
}

macro_rules! outln {
    ($($arg:tt)*) => {{
        use std::io::Write;
        if writeln!(std::io::stdout().lock(), $($arg)*).is_err() {
            std::process::exit(0);
        }
    }};
}

mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use palfix::checker::{Checker, ENUMERATION_LIMIT};
use palfix::puzzles::{
    self, fixpoint_var, hat_model, muddy_model, muddy_owners, no_unique_colour, solvable_body,
    solvable_prime, HatModel, Invariance, Iteration, LITERAL_BELL_AGENTS, LITERAL_INVARIANCE_LIMIT,
};
use palfix::rewrite::{polarity, reduce_announcements, to_nnf};
use palfix::rounds::{
    explicit_log, muetzen, run_protocol, simulate_abstract, solvable_model, solve_rounds,
    Constraints, Initial, Variant,
};
use palfix::{parse, parse_with, Announcement, Atom, EpistemicModel, Error};

const DEFAULT_MAX_WORLDS: usize = 4096;

const TWO_WORLDS: &str = r#"{
  "worlds": [
    {"id": "w1", "true_atoms": ["p"]},
    {"id": "w2", "true_atoms": []}
  ],
  "agents": {"a": [["w1", "w2"]]},
  "point": "w1"
}"#;

#[derive(Parser)]
#[command(
    name = "palfix",
    version,
    about = "Public announcement logic with fixpoints"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a formula at a world
    Check {
        /// Model file (JSON); a two-world model with `p` true at `w1` if omitted
        #[arg(long)]
        model: Option<PathBuf>,
        /// Defaults to the point stored in the model file
        #[arg(long)]
        world: Option<String>,
        #[arg(long)]
        formula: String,
        /// Also print every world where the formula holds
        #[arg(long)]
        extension: bool,
        #[arg(long)]
        json: bool,
    },
    /// Run the bell protocol on the muddy-children cube
    Muddy {
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Comma-separated worlds or a formula to announce first; the father's
        /// announcement if omitted
        #[arg(long)]
        restriction: Option<String>,
        /// Defaults to the world where every child is muddy
        #[arg(long)]
        world: Option<String>,
        #[arg(long, value_enum, default_value_t = VariantArg::Bell)]
        variant: VariantArg,
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        json: bool,
    },
    /// Fixpoint report and protocol runs on a hat model
    Hats {
        #[arg(long)]
        gnomes: usize,
        /// Defaults to one more than the number of gnomes
        #[arg(long)]
        colours: Option<usize>,
        #[arg(long, value_enum, default_value_t = FixpointArg::SolvablePrime)]
        fixpoint: FixpointArg,
        /// A distribution, one digit per gnome, to run the protocol on
        #[arg(long)]
        world: Option<String>,
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        json: bool,
    },
    /// Departure log of a signature such as `2,2,8`
    Simulate {
        signature: String,
        #[arg(long)]
        json: bool,
    },
    /// Signatures consistent with a constraint file
    Invert {
        constraints: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Solve the riddle of the 126 gnomes
    Muetzen {
        #[arg(long)]
        json: bool,
    },
    /// Announcement-free form, negation normal form and polarity of a formula
    Rewrite {
        #[arg(long)]
        formula: String,
        /// Report the polarity of this atom
        #[arg(long)]
        var: Option<String>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Bell,
    BellEmpty,
}

#[derive(Clone, Copy, ValueEnum)]
enum FixpointArg {
    Solvable,
    SolvablePrime,
}

/// Failures, split by exit code.
enum Failure {
    Usage(String),
    Negative,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn verdict(ok: bool) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(Failure::Negative)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check {
            model,
            world,
            formula,
            extension,
            json,
        } => check(model, world, &formula, extension, json),
        Command::Muddy {
            n,
            restriction,
            world,
            variant,
            trace,
            json,
        } => muddy(n, restriction.as_deref(), world, variant, trace, json),
        Command::Hats {
            gnomes,
            colours,
            fixpoint,
            world,
            trace,
            json,
        } => hats(
            gnomes,
            colours.unwrap_or(gnomes + 1),
            fixpoint,
            world,
            trace,
            json,
        ),
        Command::Simulate { signature, json } => simulate(&signature, json),
        Command::Invert { constraints, json } => invert(&constraints, json),
        Command::Muetzen { json } => solve_muetzen(json),
        Command::Rewrite { formula, var, json } => rewrite(&formula, var, json),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Negative) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn max_worlds() -> Result<usize, Failure> {
    match std::env::var("PALFIX_MAX_WORLDS") {
        Ok(v) => v
            .parse()
            .map_err(|_| Failure::Usage(format!("PALFIX_MAX_WORLDS: not a count: `{v}`"))),
        Err(_) => Ok(DEFAULT_MAX_WORLDS),
    }
}

fn guard(what: &str, size: u128) -> Outcome {
    let limit = max_worlds()?;
    if size > limit as u128 {
        return Err(Failure::Usage(format!(
            "{what} has {size} worlds, more than {limit}; raise PALFIX_MAX_WORLDS to proceed"
        )));
    }
    Ok(())
}

fn check(
    model: Option<PathBuf>,
    world: Option<String>,
    formula: &str,
    extension: bool,
    json: bool,
) -> Outcome {
    let text = match &model {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
        None => TWO_WORLDS.to_string(),
    };
    let (m, point) = EpistemicModel::from_json(&text)?;
    let point = match world {
        Some(w) => m.world(&w)?,
        None => point
            .ok_or_else(|| Failure::Usage("no --world given and the model has no point".into()))?,
    };
    let f = parse(formula)?;
    let checker = Checker::default();
    let ext = checker.extension(&m, &f)?;
    let value = ext.contains(point);
    let ext = extension.then(|| m.names(&ext));
    if json {
        render::print_json(&render::CheckReport {
            world: m.name(point).to_string(),
            formula: f.to_string(),
            value,
            extension: ext,
        });
    } else {
        outln!("{value}");
        if let Some(names) = ext {
            outln!("extension: {}", render::set(&names));
        }
    }
    verdict(value)
}

fn muddy(
    n: usize,
    restriction: Option<&str>,
    world: Option<String>,
    variant: VariantArg,
    trace: bool,
    json: bool,
) -> Outcome {
    if n > 0 && n <= 12 {
        guard("the muddy-children cube", 1u128 << n)?;
    }
    let m = muddy_model(n)?;
    let owners = muddy_owners(n);
    let point_name = world.unwrap_or_else(|| "1".repeat(n));
    let point = m.world(&point_name)?;
    let initial = match restriction {
        None => Initial::Announce(Announcement::single(puzzles::father(n))),
        Some(text) => {
            let names: Vec<&str> = text.split(',').map(str::trim).collect();
            if names.iter().all(|w| m.world(w).is_ok()) {
                Initial::Worlds(m.world_set(&names)?)
            } else {
                Initial::Announce(Announcement::single(parse_with(
                    text,
                    &puzzles::puzzle_macros(&owners, true),
                )?))
            }
        }
    };
    let variant = match variant {
        VariantArg::Bell => Variant::Bell,
        VariantArg::BellEmpty => Variant::BellEmptyTest,
    };
    let result = match run_protocol(&m, point, &owners, &initial, variant) {
        Err(Error::AnnouncementFalse) => {
            return Err(Failure::Usage(format!(
                "world {point_name} does not survive the initial restriction"
            )))
        }
        r => r?,
    };
    render::check_trace(&result)?;
    let report = render::RunReport::new(&result, trace);
    if json {
        render::print_json(&report);
    } else {
        out!("{report}");
    }
    verdict(result.solved)
}

fn hats(
    gnomes: usize,
    colours: usize,
    fixpoint: FixpointArg,
    world: Option<String>,
    trace: bool,
    json: bool,
) -> Outcome {
    guard(
        "the hat model",
        (colours as u128)
            .checked_pow(gnomes as u32)
            .unwrap_or(u128::MAX),
    )?;
    let hm = hat_model(gnomes, colours)?;
    let checker = Checker::default();
    let mut report = render::HatsReport {
        gnomes,
        colours,
        worlds: hm.model.len(),
        solvable_prime: hm
            .model
            .names(&checker.extension(&hm.model, &solvable_prime(gnomes, colours))?),
        fixpoint: None,
        run: None,
    };
    if let FixpointArg::Solvable = fixpoint {
        report.fixpoint = Some(solvable_report(&checker, &hm)?);
    }
    let mut ok = true;
    if let Some(name) = &world {
        let dist = parse_distribution(name, gnomes, colours)?;
        if !no_unique_colour(&dist) {
            return Err(Failure::Usage(format!(
                "{name}: some colour is worn by one gnome only, refused by solvable'"
            )));
        }
        let solved = solvable_model(gnomes, colours)?;
        let result = solve_rounds(&solved, &dist)?;
        render::check_trace(&result)?;
        let log = if result.solved {
            Some(explicit_log(&dist, &result)?)
        } else {
            None
        };
        ok = result.solved;
        report.run = Some(render::HatRun {
            world: name.clone(),
            log,
            run: render::RunReport::new(&result, trace),
        });
    }
    if json {
        render::print_json(&report);
    } else {
        out!("{report}");
    }
    verdict(ok)
}

fn parse_distribution(name: &str, gnomes: usize, colours: usize) -> Result<Vec<u16>, Failure> {
    let digits: Option<Vec<u16>> = name
        .chars()
        .map(|c| {
            c.to_digit(36)
                .filter(|&d| (d as usize) < colours)
                .map(|d| d as u16)
        })
        .collect();
    match digits {
        Some(d) if d.len() == gnomes => Ok(d),
        _ => Err(Failure::Usage(format!(
            "`{name}` is not a distribution of {gnomes} gnomes over {colours} colours"
        ))),
    }
}

fn solvable_report(checker: &Checker, hm: &HatModel) -> Result<render::FixpointSummary, Failure> {
    let perms: usize = (1..=hm.colours).product();
    let literal = hm.model.len().saturating_mul(perms) <= LITERAL_INVARIANCE_LIMIT;
    let invariance = if literal {
        Invariance::Global
    } else {
        Invariance::Semantic
    };
    let body = solvable_body(
        hm,
        invariance,
        Iteration::Star,
        hm.gnomes.len() <= LITERAL_BELL_AGENTS,
    )?;
    let p = fixpoint_var();
    let inv = checker.gfp_invariant_enum(&hm.model, &p, &body)?;
    let subsets = if hm.model.len() <= ENUMERATION_LIMIT {
        Some(checker.gfp_subset_enum(&hm.model, &p, &body)?)
    } else {
        None
    };
    Ok(render::FixpointSummary {
        invariance: if literal { "literal" } else { "semantic" },
        u: hm.model.names(&inv.u),
        truth_set: hm.model.names(&inv.truth_set),
        post_fixed: inv.post_fixed_family.len(),
        candidates: inv.candidates,
        monotone: inv.monotone,
        subset_enumeration_agrees: subsets.map(|s| s.u == inv.u && s.truth_set == inv.truth_set),
    })
}

fn parse_signature(text: &str) -> Result<Vec<u16>, Failure> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<u16>()
                .map_err(|_| Failure::Usage(format!("`{s}` is not a group size")))
        })
        .collect()
}

fn simulate(signature: &str, json: bool) -> Outcome {
    let mut sig = parse_signature(signature)?;
    sig.sort_unstable();
    let log = simulate_abstract(&sig)?;
    if json {
        render::print_json(&log);
    } else {
        out!("{}", render::log_text(&sig, &log));
    }
    Ok(())
}

fn invert(path: &PathBuf, json: bool) -> Outcome {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let constraints = Constraints::from_json(&text)?;
    let solutions = palfix::rounds::invert_log(&constraints)?;
    if json {
        render::print_json(&solutions);
    } else if solutions.is_empty() {
        outln!("no signature is consistent with the constraints");
    } else {
        for s in &solutions {
            out!("{}", render::solution_text(s));
        }
    }
    verdict(!solutions.is_empty())
}

fn solve_muetzen(json: bool) -> Outcome {
    let report = muetzen()?;
    let mut replays = Vec::new();
    for s in &report.solutions {
        let replay = simulate_abstract(&s.signature)?;
        if replay != s.log {
            return Err(Failure::Usage(format!(
                "replay of {:?} does not reproduce its log",
                s.signature
            )));
        }
        replays.push(replay);
    }
    if json {
        render::print_json(&report);
    } else {
        for s in &report.solutions {
            out!("{}", render::solution_text(s));
        }
        if let Some(note) = &report.note {
            outln!("note: {note}");
        }
    }
    verdict(!report.solutions.is_empty())
}

fn rewrite(formula: &str, var: Option<String>, json: bool) -> Outcome {
    let f = parse(formula)?;
    let reduced = reduce_announcements(&f)?;
    let nnf = to_nnf(&reduced)?;
    let pol = match &var {
        Some(v) => Some(polarity(&f, &Atom::new(v))?),
        None => None,
    };
    if json {
        render::print_json(&render::RewriteReport {
            formula: f.to_string(),
            reduced: reduced.to_string(),
            nnf: nnf.to_string(),
            polarity: pol.map(|p| p.to_string()),
        });
    } else {
        outln!("reduced: {reduced}");
        outln!("nnf: {nnf}");
        if let (Some(v), Some(p)) = (&var, pol) {
            outln!("polarity of {v} (in the reduced normal form, not a positivity test): {p}");
        }
    }
    Ok(())
}
