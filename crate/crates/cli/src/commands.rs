use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use clap::Subcommand;
use pecr::engine::Session;
use pecr::eval::{certify_axc5, AppMap, CellularAutomaton, Env, Evaluator};
use pecr::foundry::{mutants, purge, search_axioms, Failure, FoundryError, Outcome, SearchConfig, SoundnessTest, SoundnessVerdict};
use pecr::kernel::{parse_line, ProofScript};
use pecr::theory::Numeric;
use pecr::{RuleRecord, Statement, Theory, Token};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{Format, Global};
use crate::error::CliError;
use crate::verify::{verify, ProofVerdict};

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Verify proof scripts (per-line records with `--format lines`).
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Verify proof scripts and print the extracted theorem blocks.
    Extract {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Print the options of a partial derivation: numbered lines or a saved session.
    Options { session: PathBuf },
    /// Evaluate a program (file or `;`-separated text) on an environment (file or `,`-separated bindings).
    Eval {
        program: String,
        env: String,
        /// Bind `f` to an elementary automaton, given as `rule:cells`.
        #[arg(long)]
        automaton: Option<String>,
    },
    /// Certify that iterating an elementary cellular automaton always computes.
    Certify {
        #[arg(long, default_value_t = 110)]
        rule: u8,
        #[arg(long, default_value_t = 8)]
        cells: usize,
        #[arg(long, default_value_t = 10_000)]
        steps: i64,
        /// Initial state as a bit string; sampled from the seed when absent.
        #[arg(long)]
        state: Option<String>,
    },
    /// Sample stored axioms for soundness violations.
    Sample {
        /// Rule labels; every axiom when empty.
        labels: Vec<String>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Sample the hand-mutated axioms instead; success means every one is caught.
        #[arg(long)]
        mutants: bool,
    },
    /// Bounded search for new axioms.
    Search {
        #[arg(long, value_delimiter = ',', required = true)]
        atoms: Vec<String>,
        #[arg(long, default_value_t = 2)]
        max_premise: usize,
        #[arg(long, value_delimiter = ',')]
        consts: Vec<String>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long)]
        max_candidates: Option<usize>,
        /// Purge these rules (with their dependents) before searching.
        #[arg(long, value_delimiter = ',')]
        purge: Vec<String>,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, env = "PECR_LISTEN", default_value = "127.0.0.1:7878")]
        listen: SocketAddr,
        /// Directory where sessions are saved and restored from.
        #[arg(long, env = "PECR_SESSIONS_DIR")]
        sessions_dir: Option<PathBuf>,
    },
}

pub fn execute(cmd: &Command, g: &Global, out: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::Check { files } => check(g, files, out),
        Command::Extract { files } => extract(g, files, out),
        Command::Options { session } => options(g, session, out),
        Command::Eval { program, env, automaton } => eval(g, program, env, automaton.as_deref(), out),
        Command::Certify { rule, cells, steps, state } => certify(g, *rule, *cells, *steps, state.as_deref(), out),
        Command::Sample { labels, samples, mutants } => sample(g, labels, *samples, *mutants, out),
        Command::Search { atoms, max_premise, consts, samples, max_candidates, purge } => {
            let mut cfg = SearchConfig::new(&atoms.iter().map(String::as_str).collect::<Vec<_>>(), *max_premise);
            cfg.samples = *samples;
            cfg.seed = g.seed;
            if let Some(m) = max_candidates {
                cfg.max_candidates = *m;
            }
            search(g, cfg, consts, purge, out)
        }
        Command::Serve { listen, sessions_dir } => {
            let state = crate::service::AppState::load(g, sessions_dir.clone())?;
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(crate::service::serve(*listen, state))
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

/// Splits at `seps` outside brackets, braces and quotes.
fn split_top(text: &str, seps: &[char]) -> Vec<String> {
    let (mut depth, mut quoted) = (0i32, false);
    let mut parts = vec![String::new()];
    for c in text.chars() {
        match c {
            '\'' => quoted = !quoted,
            '[' | '{' if !quoted => depth += 1,
            ']' | '}' if !quoted => depth -= 1,
            _ => {}
        }
        if depth == 0 && !quoted && seps.contains(&c) {
            parts.push(String::new());
        } else {
            parts.last_mut().expect("never empty").push(c);
        }
    }
    parts.into_iter().map(|p| p.trim().to_string()).filter(|p| !p.is_empty()).collect()
}

/// File contents when `arg` names a file, else `arg` split at the separators into lines.
fn text_or_file(arg: &str, seps: &[char]) -> Result<String, CliError> {
    let p = Path::new(arg);
    if p.is_file() {
        return read(p);
    }
    Ok(split_top(arg, seps).join("\n"))
}

fn load_scripts(g: &Global, files: &[PathBuf]) -> Result<(Theory, Vec<ProofScript>), CliError> {
    let mut files = files.to_vec();
    files.sort();
    let th = g.load(&g.theory_name(files.first().map(PathBuf::as_path), "int"))?;
    let texts: Vec<String> = files.iter().map(|f| read(f)).collect::<Result<_, _>>()?;
    let parsed = std::thread::scope(|scope| {
        let th = &th;
        let handles: Vec<_> = texts.iter().map(|t| scope.spawn(move || ProofScript::parse_all(t, th))).collect();
        handles.into_iter().map(|h| h.join().expect("parser thread panicked")).collect::<Vec<_>>()
    });
    let mut scripts = Vec::new();
    for (f, p) in files.iter().zip(parsed) {
        scripts.extend(p.map_err(|e| CliError::Parse(format!("{}: {e}", f.display())))?);
    }
    Ok((th, scripts))
}

fn verify_files(g: &Global, files: &[PathBuf]) -> Result<Vec<ProofVerdict>, CliError> {
    let (th, scripts) = load_scripts(g, files)?;
    verify(&th, &scripts).map_err(|e| CliError::Verification(e.to_string()))
}

fn check(g: &Global, files: &[PathBuf], out: &mut dyn Write) -> Result<(), CliError> {
    let verdicts = verify_files(g, files)?;
    let (mut ok, mut failed, mut redundancies) = (0, 0, 0);
    for v in &verdicts {
        redundancies += v.redundant.len();
        if g.format == Format::Lines {
            for l in &v.lines {
                let cl: Vec<String> = l.cl.iter().map(usize::to_string).collect();
                writeln!(out, "line {} {} {} {}", v.label, l.number, l.label, cl.join(" "))?;
            }
        }
        let status = match (&v.error, v.redundant.is_empty()) {
            (Some(e), _) => {
                failed += 1;
                match g.format {
                    Format::Text => format!("{e}"),
                    Format::Lines => format!("proof {} fail {e}", v.label),
                }
            }
            (None, false) => {
                failed += 1;
                match g.format {
                    Format::Text => format!("{}: redundant lines {:?}", v.label, v.redundant),
                    Format::Lines => format!("proof {} redundant {:?}", v.label, v.redundant),
                }
            }
            (None, true) => {
                ok += 1;
                match g.format {
                    Format::Text => format!("{}: verified, {} lines", v.label, v.lines.len()),
                    Format::Lines => format!("proof {} ok {}", v.label, v.lines.len()),
                }
            }
        };
        writeln!(out, "{status}")?;
    }
    match g.format {
        Format::Text if failed == 0 => writeln!(out, "{ok} proofs verified, {redundancies} redundancies")?,
        Format::Text => writeln!(out, "{ok} proofs verified, {failed} failed, {redundancies} redundancies")?,
        Format::Lines => writeln!(out, "summary {ok} {failed} {redundancies}")?,
    }
    if failed > 0 {
        return Err(CliError::Verification(format!("{failed} of {} proofs failed", verdicts.len())));
    }
    Ok(())
}

fn extract(g: &Global, files: &[PathBuf], out: &mut dyn Write) -> Result<(), CliError> {
    let verdicts = verify_files(g, files)?;
    let mut first = true;
    for v in &verdicts {
        let Some(rec) = v.theorem.as_ref().filter(|_| v.verified()) else {
            let reason = v.error.clone().unwrap_or_else(|| format!("{}: redundant lines {:?}", v.label, v.redundant));
            return Err(CliError::Verification(reason));
        };
        match g.format {
            Format::Text => {
                if !first {
                    writeln!(out)?;
                }
                write!(out, "{}", rec.block())?;
            }
            Format::Lines => writeln!(out, "{}", serde_json::to_string(rec).map_err(|e| CliError::Internal(e.to_string()))?)?,
        }
        first = false;
    }
    Ok(())
}

/// A saved session, or numbered derivation lines whose leading unjustified lines are the premise.
pub fn load_session(g: &Global, path: &Path) -> Result<(Theory, Session), CliError> {
    let text = read(path)?;
    if text.trim_start().starts_with('{') {
        let s: Session = serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        let th = g.load(g.theory.as_deref().unwrap_or(&s.theory))?;
        return Ok((th, s));
    }
    let th = g.load(&g.theory_name(Some(path), "int"))?;
    let mut lines = Vec::new();
    for (k, raw) in text.lines().map(str::trim).filter(|l| !l.is_empty()).enumerate() {
        let numbered = raw.split_whitespace().next().is_some_and(|t| t.parse::<usize>().is_ok());
        let raw = if numbered { raw.to_string() } else { format!("{} {raw}", k + 1) };
        lines.push(parse_line(&raw, k + 1, &th).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?);
    }
    let s = Session::from_script_lines(&th, &lines).map_err(|e| CliError::Verification(format!("{}: {e}", path.display())))?;
    Ok((th, s))
}

fn options(g: &Global, path: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let (th, session) = load_session(g, path)?;
    for (k, step) in session.options(&th).iter().enumerate() {
        match g.format {
            Format::Text => writeln!(out, "{step}")?,
            Format::Lines => writeln!(out, "{k}\t{}\t{}\t{}", session.option_id(step), step.result, step.justification())?,
        }
    }
    Ok(())
}

fn automaton(spec: &str) -> Result<CellularAutomaton, CliError> {
    let bad = || CliError::Parse(format!("automaton `{spec}`: expected `rule:cells` with 1 to 12 cells"));
    let (r, m) = spec.split_once(':').ok_or_else(bad)?;
    CellularAutomaton::new(r.parse().map_err(|_| bad())?, m.parse().map_err(|_| bad())?).ok_or_else(bad)
}

pub fn rat_scale(th: &Theory) -> Option<i64> {
    (th.numeric == Numeric::Rat).then(|| th.machine.scale())
}

fn eval(g: &Global, program: &str, env: &str, ca: Option<&str>, out: &mut dyn Write) -> Result<(), CliError> {
    let th = g.load(&g.theory_name(Some(Path::new(program)).filter(|p| p.is_file()), "int"))?;
    let p = th.parse_program(&text_or_file(program, &[';', '\n'])?).map_err(|e| CliError::Parse(e.to_string()))?;
    th.validate_program(&p).map_err(|e| CliError::Parse(format!("invalid program: {e:?}")))?;
    let env = Env::parse(&text_or_file(env, &[',', ';', '\n'])?, rat_scale(&th), &th.consts)
        .map_err(|e| CliError::Parse(e.to_string()))?;
    let map = ca.map(automaton).transpose()?;
    let mut ev = Evaluator::new(&th, th.machine);
    if let Some(m) = &map {
        ev = ev.with_map(m);
    }
    let result = ev.eval(&p, &env).map_err(|e| CliError::Eval(format!("ExecError: {e}")))?;
    let outputs = p.outputs();
    for (k, v) in result.iter().filter(|(k, _)| outputs.contains(k)) {
        match g.format {
            Format::Text => writeln!(out, "{k} = {}", v.render(th.machine.scale()))?,
            Format::Lines => writeln!(out, "{k}\t{}", v.render(th.machine.scale()))?,
        }
    }
    Ok(())
}

fn certify(g: &Global, rule: u8, cells: usize, steps: i64, state: Option<&str>, out: &mut dyn Write) -> Result<(), CliError> {
    let th = g.load(g.theory.as_deref().unwrap_or("vec"))?;
    let ca = CellularAutomaton::new(rule, cells)
        .ok_or_else(|| CliError::Parse(format!("an automaton has 1 to {} cells", CellularAutomaton::MAX_CELLS)))?;
    let v: Vec<i64> = match state {
        Some(bits) => bits
            .chars()
            .map(|c| c.to_digit(2).map(i64::from).ok_or_else(|| CliError::Parse(format!("state `{bits}` is not a bit string"))))
            .collect::<Result<_, _>>()?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
            (0..cells).map(|_| rng.random_range(0..=1)).collect()
        }
    };
    let (lo, hi) = ca.domain();
    let cert = certify_axc5(&th, th.machine, &ca, (&lo, &hi), &v, steps).map_err(|e| CliError::Eval(e.to_string()))?;
    match g.format {
        Format::Text => write!(out, "{}", cert.render())?,
        Format::Lines => writeln!(out, "certified {} {} {}", ca.id(), cert.checked_steps, cert.digest)?,
    }
    Ok(())
}

fn failure_text(f: &Failure) -> String {
    match f {
        Failure::Exec(e) => e.to_string(),
        Failure::FalsePremiseComputes => "the premise of a falsity rule computes".into(),
    }
}

fn write_verdict(g: &Global, th: &Theory, v: &SoundnessVerdict, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "{}", v.line())?;
    if let Outcome::Violation(cx) = &v.outcome {
        let env: Vec<String> = cx.env.iter().map(|(k, x)| format!("{k} = {}", x.render(th.machine.scale()))).collect();
        match g.format {
            Format::Text => writeln!(out, "  counterexample: {}\n  failure: {}", env.join(", "), failure_text(&cx.failure))?,
            Format::Lines => writeln!(out, "counterexample {} {} | {}", v.label, env.join(", "), failure_text(&cx.failure))?,
        }
    }
    Ok(())
}

fn sample(g: &Global, labels: &[String], samples: usize, use_mutants: bool, out: &mut dyn Write) -> Result<(), CliError> {
    let th = g.load(&g.theory_name(None, if use_mutants { "vec" } else { "int" }))?;
    let rules: Vec<RuleRecord> = if use_mutants {
        mutants(&th).map_err(|e| CliError::Parse(e.to_string()))?.into_iter().map(|m| m.rule).collect()
    } else if labels.is_empty() {
        th.store.axioms().cloned().collect()
    } else {
        labels
            .iter()
            .map(|l| th.rule(l).cloned().ok_or_else(|| CliError::Parse(format!("unknown label `{l}`"))))
            .collect::<Result<_, _>>()?
    };
    let tester = SoundnessTest::new(&th, th.machine);
    let (mut violations, mut missed) = (0, Vec::new());
    for r in &rules {
        match tester.run(r, samples, g.seed) {
            Ok(v) => {
                write_verdict(g, &th, &v, out)?;
                if v.is_violation() {
                    violations += 1;
                } else {
                    missed.push(r.label.clone());
                }
            }
            Err(e @ (FoundryError::NoEvaluatorHook(_) | FoundryError::NoGenerator(_))) => {
                writeln!(out, "{} skipped {e}", r.label)?;
                missed.push(r.label.clone());
            }
            Err(e) => return Err(CliError::Internal(e.to_string())),
        }
    }
    if use_mutants && !missed.is_empty() {
        return Err(CliError::Verification(format!("mutants not caught: {}", missed.join(" "))));
    }
    if !use_mutants && violations > 0 {
        return Err(CliError::Verification(format!("{violations} soundness violations")));
    }
    Ok(())
}

fn parse_const(th: &Theory, text: &str) -> Result<Token, CliError> {
    let s = Statement::parse_with(&format!("c [{text}] [ ]"), &th.consts, th.machine.nstr)
        .map_err(|e| CliError::Parse(format!("constant `{text}`: {e}")))?;
    match s.inputs.into_iter().next() {
        Some(t) if t.is_const() => Ok(t),
        _ => Err(CliError::Parse(format!("`{text}` is not a constant of `{}`", th.name))),
    }
}

fn search(
    g: &Global,
    mut cfg: SearchConfig,
    consts: &[String],
    purged: &[String],
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let mut th = g.load(&g.theory_name(None, "int"))?;
    cfg.consts = consts.iter().map(|c| parse_const(&th, c)).collect::<Result<_, _>>()?;
    for l in purged {
        let removed = purge(l, &mut th.store).map_err(|e| CliError::Parse(e.to_string()))?;
        writeln!(out, "purged {}", removed.join(" "))?;
    }
    let report = search_axioms(&th, &cfg, th.machine).map_err(|e| match e {
        FoundryError::CapExceeded(_) | FoundryError::Invalid(_) => CliError::Parse(e.to_string()),
        e => CliError::Internal(e.to_string()),
    })?;
    let counts = [
        ("enumerated", report.enumerated),
        ("structural", report.structural),
        ("sound", report.sound),
        ("reducible", report.reducible),
        ("derivable", report.derivable),
        ("candidates", report.candidates.len()),
    ];
    for (k, n) in counts {
        writeln!(out, "{k} {n}")?;
    }
    for c in &report.candidates {
        match g.format {
            Format::Text => write!(out, "\n{}", c.block())?,
            Format::Lines => writeln!(out, "candidate {} {} | {}", c.label, c.premise.stmts.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("; "), c.conclusion)?,
        }
    }
    Ok(())
}
