//! Command-line surface and dispatch.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Rational64;
use shaomega_core::brauer::{
    br1_verdict, brauer_split, bs_sequence, citation, equal_x_conditions, prop_q1, sha2_t_hat, sha2_t_prime,
    Q1_DEFAULT_CAP,
};
use shaomega_core::hilbert::{
    fiber_scan, hilbert_symbol, invariant_profile, local_invariant, multinorm_local_solvable, PlaceOfQ,
    QuaternionClass,
};
use shaomega_core::sha::{h1_defect, sha2_omega_p};
use shaomega_core::Budget;

use crate::cache::{Cache, Lookup};
use crate::error::{CliError, Result, EXIT_INTERNAL, EXIT_OK};
use crate::report::Report;
use crate::scenario::{load_scenario, LoadedScenario};
use crate::selftest::selftest;

/// Most λ values accepted by one fiber scan.
pub const MAX_FIBERS: usize = 10_000;

#[derive(Debug, Parser)]
#[command(name = "shaomega", version, about = "Galois-module invariants of norm-equation varieties")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Scenario file describing the group, K and the factors of P.
    #[arg(long, global = true)]
    pub scenario: Option<PathBuf>,
    /// Maximum cochain entries for one cohomology computation.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub budget_entries: u128,
    /// Reject scenario groups larger than this.
    #[arg(long, global = true, default_value_t = shaomega_core::group::MAX_ORDER)]
    pub max_group_order: usize,
    /// Report cache directory (disabled when unset).
    #[arg(long, global = true, env = crate::cache::CACHE_ENV)]
    pub cache_dir: Option<PathBuf>,
    /// Also write the machine-readable report here.
    #[arg(long, global = true)]
    pub machine_out: Option<PathBuf>,
    /// Ignore the cache even if a directory is configured.
    #[arg(long, global = true)]
    pub no_cache: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModuleKind {
    /// Character lattice of the norm-one torus of K.
    THat,
    /// Character lattice of the torus cut out by the factors of P and K.
    TPrime,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ш²_ω of the scenario's torus.
    Sha2Omega {
        #[arg(long, value_enum, default_value = "t-hat")]
        module: ModuleKind,
    },
    /// Ш²_ω(T̂) together with its P-kernel.
    Sha2OmegaP,
    /// H¹(T̂ ⊗ Z_P) / j_P* H¹(T̂).
    H1Defect,
    /// Both ends of the Brauer exact sequence.
    Bs,
    /// The ⟨H_L, core(H_K)⟩ = G criterion with cross-checks.
    Br1,
    /// The five sufficient conditions for Br(X^c) = Br(X).
    EqualX,
    /// K/k with group (Z/n)² and L cyclic of degree n inside K.
    PropQ1 {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = Q1_DEFAULT_CAP)]
        cap: u64,
    },
    /// Ш²_ω((Z/n)², Z/d) for n | d.
    BrauerSplit {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        d: u64,
    },
    /// Hilbert symbol at one place, or the invariant profile of (a, b).
    Hilbert {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_rational)]
        a: Rational64,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_rational)]
        b: Rational64,
        #[arg(long, value_parser = parse_place)]
        place: Option<PlaceOfQ>,
    },
    /// Local solvability of (x₁²−ax₂²)(y₁²−by₂²)(z₁²−abz₂²) = c.
    Multinorm {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_rational)]
        a: Rational64,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_rational)]
        b: Rational64,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_rational)]
        c: Rational64,
        #[arg(long, value_parser = parse_place)]
        place: PlaceOfQ,
    },
    /// Local solvability of the fibers t = λ for P = ∏ p_i^{e_i}.
    FiberScan {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_rational)]
        a: Rational64,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_rational)]
        b: Rational64,
        /// `c0,c1,...[:e]`, coefficients in increasing degree.
        #[arg(long = "factor", required = true, allow_hyphen_values = true, value_parser = parse_factor)]
        factors: Vec<(Vec<i64>, u32)>,
        #[arg(long, allow_hyphen_values = true)]
        from: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        to: Option<i64>,
        #[arg(long = "lambda", allow_hyphen_values = true, value_parser = parse_rational)]
        lambdas: Vec<Rational64>,
    },
    /// Runs the built-in regression corpus.
    Selftest,
}

pub fn parse_rational(s: &str) -> std::result::Result<Rational64, String> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: i64 = n.trim().parse().map_err(|e| format!("bad numerator {n:?}: {e}"))?;
    let d: i64 = d.trim().parse().map_err(|e| format!("bad denominator {d:?}: {e}"))?;
    if d == 0 {
        return Err("zero denominator".into());
    }
    Ok(Rational64::new(n, d))
}

pub fn parse_place(s: &str) -> std::result::Result<PlaceOfQ, String> {
    match s {
        "inf" | "real" => Ok(PlaceOfQ::Real),
        _ => {
            let p: u64 = s.parse().map_err(|_| format!("expected a prime or 'inf', got {s:?}"))?;
            PlaceOfQ::prime(p).map_err(|e| e.to_string())
        }
    }
}

pub fn parse_factor(s: &str) -> std::result::Result<(Vec<i64>, u32), String> {
    let (coeffs, e) = match s.split_once(':') {
        Some((c, e)) => (c, e.parse::<u32>().map_err(|_| format!("bad multiplicity {e:?}"))?),
        None => (s, 1),
    };
    if e == 0 {
        return Err("multiplicity must be at least 1".into());
    }
    let coeffs: Vec<i64> = coeffs
        .split(',')
        .map(|c| c.trim().parse::<i64>().map_err(|_| format!("bad coefficient {c:?}")))
        .collect::<std::result::Result<_, _>>()?;
    if coeffs.iter().all(|&c| c == 0) {
        return Err("factor polynomial must be nonzero".into());
    }
    Ok((coeffs, e))
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Sha2Omega { .. } => "sha2-omega",
            Command::Sha2OmegaP => "sha2-omega-p",
            Command::H1Defect => "h1-defect",
            Command::Bs => "bs",
            Command::Br1 => "br1",
            Command::EqualX => "equal-x",
            Command::PropQ1 { .. } => "prop-q1",
            Command::BrauerSplit { .. } => "brauer-split",
            Command::Hilbert { .. } => "hilbert",
            Command::Multinorm { .. } => "multinorm",
            Command::FiberScan { .. } => "fiber-scan",
            Command::Selftest => "selftest",
        }
    }

    fn needs_scenario(&self) -> bool {
        matches!(
            self,
            Command::Sha2Omega { .. } | Command::Sha2OmegaP | Command::H1Defect | Command::Bs | Command::Br1 | Command::EqualX
        )
    }

    /// Canonical argument string; part of the report and the cache key.
    fn canonical_args(&self) -> String {
        let factors = |fs: &[(Vec<i64>, u32)]| {
            fs.iter()
                .map(|(c, e)| format!("{}:{e}", c.iter().map(i64::to_string).collect::<Vec<_>>().join(",")))
                .collect::<Vec<_>>()
                .join(";")
        };
        match self {
            Command::Sha2Omega { module } => format!("module={}", module.to_possible_value().unwrap().get_name()),
            Command::PropQ1 { n, cap } => format!("n={n} cap={cap}"),
            Command::BrauerSplit { n, d } => format!("n={n} d={d}"),
            Command::Hilbert { a, b, place } => {
                format!("a={a} b={b} place={}", place.map_or("all".to_string(), |p| p.to_string()))
            }
            Command::Multinorm { a, b, c, place } => format!("a={a} b={b} c={c} place={place}"),
            Command::FiberScan { a, b, factors: fs, .. } => {
                let l = self.lambdas().map(|l| l.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
                format!("a={a} b={b} factors={} lambdas={}", factors(fs), l.unwrap_or_default())
            }
            _ => String::new(),
        }
    }

    fn lambdas(&self) -> Result<Vec<Rational64>> {
        let Command::FiberScan { from, to, lambdas, .. } = self else {
            return Ok(vec![]);
        };
        let mut out = lambdas.clone();
        match (from, to) {
            (Some(f), Some(t)) => {
                if t < f || (t - f) as usize >= MAX_FIBERS {
                    return Err(CliError::Validation(format!("bad λ range {f}..={t}")));
                }
                out.extend((*f..=*t).map(Rational64::from_integer));
            }
            (None, None) => {}
            _ => return Err(CliError::Validation("--from and --to go together".into())),
        }
        out.sort();
        out.dedup();
        if out.is_empty() {
            return Err(CliError::Validation("no λ values given".into()));
        }
        if out.len() > MAX_FIBERS {
            return Err(CliError::Validation(format!("at most {MAX_FIBERS} λ values")));
        }
        Ok(out)
    }
}

/// What a run produced.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
    pub report: Option<Report>,
    pub cached: bool,
}

fn compute(cmd: &Command, sc: Option<&LoadedScenario>, budget: &Budget, report: &mut Report) -> Result<()> {
    let scenario = || sc.map(|s| &s.scenario).expect("scenario checked by caller");
    match cmd {
        Command::Sha2Omega { module } => {
            let s = scenario();
            let sha = match module {
                ModuleKind::THat => sha2_t_hat(s, budget)?,
                ModuleKind::TPrime => sha2_t_prime(s, budget)?,
            };
            report.structure("result.sha2_omega", &sha.structure);
            report.push("result.order", sha.structure.order().map_or("inf".into(), |o| o.to_string()));
            if *module == ModuleKind::TPrime {
                report.push("citation.0", citation("sha-t"));
            }
        }
        Command::Sha2OmegaP => {
            let s = scenario();
            let r = sha2_omega_p(&s.group, &s.hk, &s.factors, budget)?;
            report.structure("result.sha2_omega", &r.sha.structure);
            report.structure("result.sha2_omega_p", &r.kernel.structure);
            report.push("citation.0", citation("lemma-sha"));
        }
        Command::H1Defect => {
            let s = scenario();
            let d = h1_defect(&s.group, &s.hk, &s.factors, budget)?;
            report.structure("result.h1_defect", &d);
            report.push("citation.0", citation("bs"));
        }
        Command::Bs => {
            let r = bs_sequence(scenario(), budget)?;
            report.structure("result.left", &r.left);
            report.structure("result.right", &r.right);
            report.push("result.middle_order", r.middle_order);
            report.push(
                "result.middle_structure",
                r.middle_structure.as_ref().map_or("undetermined".into(), |m| m.to_machine()),
            );
            for (i, n) in r.notes.iter().enumerate() {
                report.push(format!("note.{i}"), n);
            }
        }
        Command::Br1 => report.verdict(&br1_verdict(scenario(), budget)?),
        Command::EqualX => report.verdict(&equal_x_conditions(scenario())?),
        Command::PropQ1 { n, cap } => {
            let r = prop_q1(*n, *cap, budget)?;
            report.structure("result.sha2_omega", &r.computed);
            report.structure("result.sha2_omega_p", &r.computed_p);
            report.structure("result.kunneth_h3", &r.kunneth);
            report.push("result.kunneth_agrees", r.computed == r.kunneth);
            report.structure("annotation.br_vc_over_br0", &r.paper_refined);
            report.push("citation.0", citation("q1"));
            report.push("citation.1", citation("kunneth"));
        }
        Command::BrauerSplit { n, d } => {
            let r = brauer_split(*n, *d, budget)?;
            report.structure("result.structure", &r);
            report.push("citation.0", citation("brauer-split"));
            report.push("citation.1", citation("q2"));
        }
        Command::Hilbert { a, b, place } => {
            let q = QuaternionClass::new(*a, *b)?;
            match place {
                Some(v) => {
                    report.push("result.symbol", hilbert_symbol(*a, *b, *v)?);
                    report.push("result.invariant", local_invariant(&q, *v)?);
                }
                None => {
                    let prof = invariant_profile(&q)?;
                    for (v, inv) in &prof {
                        report.push(format!("profile.{v}"), inv);
                    }
                    report.push("result.sum", "0");
                }
            }
        }
        Command::Multinorm { a, b, c, place } => {
            report.push("result.solvable", multinorm_local_solvable(*a, *b, *c, *place)?);
            report.push("citation.0", citation("rational-2"));
        }
        Command::FiberScan { a, b, factors, .. } => {
            let lambdas = cmd.lambdas()?;
            let fibers = fiber_scan(*a, *b, factors, &lambdas)?;
            let mut els = 0;
            for (i, f) in fibers.iter().enumerate() {
                let key = |s: &str| format!("fiber.{i}.{s}");
                report.push(key("lambda"), f.lambda);
                match f.value {
                    None => report.push(key("skipped"), "root of P"),
                    Some(c) => {
                        report.push(key("value"), c);
                        for (v, ok) in &f.places {
                            report.push(key(&format!("place.{v}")), ok);
                        }
                        for (j, prof) in f.profiles.iter().enumerate() {
                            let ram: Vec<String> = prof.iter().filter(|(_, x)| x.half).map(|(v, _)| v.to_string()).collect();
                            report.push(key(&format!("factor.{j}.ramified")), format!("[{}]", ram.join(",")));
                        }
                        report.push(key("everywhere_locally_solvable"), f.everywhere_locally_solvable);
                        els += f.everywhere_locally_solvable as usize;
                    }
                }
            }
            report.push("result.fibers", fibers.len());
            report.push("result.everywhere_locally_solvable", els);
        }
        Command::Selftest => unreachable!("handled separately"),
    }
    Ok(())
}

fn finish(report: Report, cached: bool, global: &GlobalOpts, mut stderr: String, code: i32) -> Outcome {
    if let Some(path) = &global.machine_out {
        if let Err(e) = std::fs::write(path, report.to_machine()) {
            stderr.push_str(&format!("error: {}: {e}\n", path.display()));
            return Outcome { code: crate::error::EXIT_IO, stdout: report.to_human(cached), stderr, report: Some(report), cached };
        }
    }
    Outcome { code, stdout: report.to_human(cached), stderr, report: Some(report), cached }
}

fn failure(e: CliError, stderr: String) -> Outcome {
    Outcome { code: e.exit_code(), stdout: String::new(), stderr: format!("{stderr}error: {e}\n"), report: None, cached: false }
}

/// Executes one parsed command line.
pub fn run(cli: &Cli) -> Outcome {
    let g = &cli.global;
    let budget = Budget::new(g.budget_entries);
    let mut stderr = String::new();
    let name = cli.command.name();

    if let Command::Selftest = cli.command {
        let (report, failed) = selftest(&budget);
        let code = if failed == 0 { EXIT_OK } else { EXIT_INTERNAL };
        if failed > 0 {
            stderr.push_str(&format!("error: {}\n", CliError::SelftestFailed(failed)));
        }
        return finish(report, false, g, stderr, code);
    }

    let sc = if cli.command.needs_scenario() {
        let Some(path) = &g.scenario else {
            return failure(CliError::Validation(format!("{name} needs --scenario <path>")), stderr);
        };
        match load_scenario(path) {
            Ok(s) if s.scenario.group.order() > g.max_group_order => {
                return failure(
                    CliError::Validation(format!(
                        "group order {} exceeds --max-group-order {}",
                        s.scenario.group.order(),
                        g.max_group_order
                    )),
                    stderr,
                )
            }
            Ok(s) => Some(s),
            Err(e) => return failure(e, stderr),
        }
    } else {
        None
    };
    if let Some(s) = &sc {
        for n in &s.notices {
            stderr.push_str(&format!("notice: {n}\n"));
        }
    }

    let args = cli.command.canonical_args();
    let cache = match (&g.cache_dir, g.no_cache) {
        (Some(dir), false) => Some(Cache::new(dir)),
        _ => None,
    };
    let key = Cache::key(name, &args, sc.as_ref().map(|s| s.hash.as_str()), g.budget_entries);
    if let Some(c) = &cache {
        match c.get(&key) {
            Lookup::Hit(r) => return finish(r, true, g, stderr, EXIT_OK),
            Lookup::Miss => {}
            Lookup::Corrupt(why) => stderr.push_str(&format!("warning: discarding cache entry: {why}\n")),
        }
    }

    let mut report = Report::new(name, args, g.budget_entries);
    if let Some(s) = &sc {
        report.scenario_id = Some(s.scenario.id.clone());
        report.scenario_hash = Some(s.hash.clone());
        for (i, n) in s.notices.iter().enumerate() {
            report.push(format!("notice.{i}"), n);
        }
        for (k, v) in &s.scenario.annotations {
            report.push(format!("annotation.{k}"), v);
        }
    }
    if let Err(e) = compute(&cli.command, sc.as_ref(), &budget, &mut report) {
        return failure(e, stderr);
    }
    if let Some(c) = &cache {
        if let Err(e) = c.put(&key, &report) {
            stderr.push_str(&format!("warning: could not write cache entry in {}: {e}\n", c.dir().display()));
        }
    }
    finish(report, false, g, stderr, EXIT_OK)
}

/// Parses arguments and runs; clap usage errors map to the validation exit code.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { crate::error::EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                Outcome { code, stdout: String::new(), stderr: text, report: None, cached: false }
            } else {
                Outcome { code, stdout: text, stderr: String::new(), report: None, cached: false }
            }
        }
    }
}
