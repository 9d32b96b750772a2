//! Command-line front end. Exit status: 0 when every checked inequality
//! holds, 1 on a violation (the worst instance is printed), 2 on a
//! configuration or input error.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::bounds::BoundReport;
use crate::error::{Error, Result};
use crate::markov::{simulate, Distribution, ErgodicityProfile, Provenance};
use crate::montecarlo::{
    bound_report, run_slln_experiment, run_variance_experiment, Experiment, ExperimentConfig,
};
use crate::par;
use crate::proof::{run_proposition_checks, PropositionGrid};
use crate::report::{self, num};
use crate::ustat::degeneracy_order;

#[derive(Debug, Parser)]
#[command(name = "ustat-markov", version, about = "U-statistics of Markov chains: bounds and their verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,

    /// JSON configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Directory for CSV and JSON outputs.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,

    /// Overrides the master seed of the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Enumeration cap for exact computations.
    #[arg(long, global = true)]
    pub budget: Option<u64>,

    /// Worker threads; 0 uses all cores. Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,

    /// Print the JSON schema of the configuration and exit.
    #[arg(long, global = true)]
    pub emit_schema: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Simulate one trajectory.
    Simulate,
    /// Evaluate the requested bounds over the n-grid.
    Bound,
    /// Compare exact or simulated L2 norms against the bounds.
    VerifyVariance,
    /// Track U_n(h) along one path towards its limit.
    VerifySlln,
    /// Exhaustive checks of the inequalities behind the bounds.
    CheckPropositions,
    /// Compute the exact rate sequence of a finite chain.
    CertifyProfile,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Bound => "bound",
            Command::VerifyVariance => "verify-variance",
            Command::VerifySlln => "verify-slln",
            Command::CheckPropositions => "check-propositions",
            Command::CertifyProfile => "certify-profile",
        }
    }
}

/// Whether every check passed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Violation,
}

impl Status {
    fn from_pass(pass: bool) -> Self {
        if pass {
            Status::Pass
        } else {
            Status::Violation
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Violation => 1,
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(status) => status.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

pub fn run(cli: &Cli) -> Result<Status> {
    if cli.emit_schema {
        let schema = match cli.command {
            Some(Command::CheckPropositions) => schemars::schema_for!(PropositionGrid),
            _ => schemars::schema_for!(ExperimentConfig),
        };
        println!("{}", serde_json::to_string_pretty(&schema)?);
        return Ok(Status::Pass);
    }
    let command = cli.command.ok_or_else(|| Error::Config("no subcommand given (see --help)".into()))?;
    std::fs::create_dir_all(&cli.out)?;
    par::with_jobs(cli.jobs, || match command {
        Command::CheckPropositions => check_propositions(cli),
        other => {
            let exp = Experiment::new(load_config(cli)?)?;
            match other {
                Command::Simulate => simulate_cmd(cli, &exp),
                Command::Bound => bound_cmd(cli, &exp),
                Command::VerifyVariance => verify_variance(cli, &exp),
                Command::VerifySlln => verify_slln(cli, &exp),
                Command::CertifyProfile => certify_profile(cli, &exp),
                Command::CheckPropositions => unreachable!("handled above"),
            }
        }
    })
}

fn read_config_text(cli: &Cli) -> Result<Option<String>> {
    match &cli.config {
        None => Ok(None),
        Some(path) => std::fs::read_to_string(path)
            .map(Some)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display()))),
    }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let text = read_config_text(cli)?.ok_or_else(|| Error::Config("--config is required".into()))?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if let Some(seed) = cli.seed {
        cfg.master_seed = seed;
    }
    if let Some(budget) = cli.budget {
        cfg.budget = Some(budget);
    }
    Ok(cfg)
}

fn out_path(cli: &Cli, name: &str) -> PathBuf {
    cli.out.join(name)
}

fn line(status: bool, command: Command, detail: &str) {
    println!("{} {} {detail}", if status { "PASS" } else { "FAIL" }, command.name());
}

fn simulate_cmd(cli: &Cli, exp: &Experiment) -> Result<Status> {
    let n = exp
        .config
        .simulate
        .as_ref()
        .map(|s| s.n)
        .ok_or_else(|| Error::Config("simulate needs a \"simulate\": {\"n\": ...} section".into()))?;
    let traj = simulate(&exp.kernel, &exp.mu, n, exp.config.master_seed)?;
    let path = out_path(cli, "trajectory.csv");
    report::write_csv_file(&path, |f| report::write_trajectory_csv(f, &traj, &exp.kernel))?;
    let mut counts = vec![0usize; exp.kernel.size()];
    for &y in &traj.values {
        counts[y] += 1;
    }
    let occupation: Vec<String> = counts.iter().map(|&c| format!("{:.4}", c as f64 / n as f64)).collect();
    line(true, Command::Simulate, &format!("n={n} seed={} occupation=[{}] -> {}", traj.seed, occupation.join(", "), path.display()));
    Ok(Status::Pass)
}

fn bound_cmd(cli: &Cli, exp: &Experiment) -> Result<Status> {
    if exp.config.n_grid.is_empty() {
        return Err(Error::Config("n_grid is empty".into()));
    }
    let h = exp.kernel_fn()?;
    let degeneracy = degeneracy_order(&h, &exp.pi)?;
    let reports = exp
        .config
        .n_grid
        .iter()
        .map(|&n| bound_report(exp, &h, n, degeneracy))
        .collect::<Result<Vec<BoundReport>>>()?;
    report::write_csv_file(&out_path(cli, "bounds.csv"), |f| report::write_bounds_csv(f, &reports))?;
    report::write_json(&out_path(cli, "bounds.json"), &reports)?;
    let mut all_ok = true;
    for r in &reports {
        for b in &r.bounds {
            let ok = b.value >= 0.0;
            all_ok &= ok;
            line(ok, Command::Bound, &format!("n={} {}={} provenance={}", r.n, b.name, num(b.value), b.provenance));
        }
        for (name, why) in &r.unsupported {
            println!("SKIP bound n={} {name}: {why}", r.n);
        }
    }
    Ok(Status::from_pass(all_ok))
}

fn verify_variance(cli: &Cli, exp: &Experiment) -> Result<Status> {
    let outcome = run_variance_experiment(exp)?;
    report::write_csv_file(&out_path(cli, "variance.csv"), |f| report::write_variance_csv(f, &outcome))?;
    report::write_json(&out_path(cli, "variance.json"), &outcome)?;
    let mut worst: Option<(f64, String)> = None;
    for r in &outcome.reports {
        for b in &r.bounds {
            let margin = b.margin.unwrap_or(f64::NAN);
            let detail = format!(
                "n={} {} bound={} l2={} stderr={} margin={}",
                r.n,
                b.name,
                num(b.value),
                r.l2.map(num).unwrap_or_default(),
                r.stderr.map(num).unwrap_or_default(),
                num(margin)
            );
            line(b.pass.unwrap_or(false), Command::VerifyVariance, &detail);
            if worst.as_ref().is_none_or(|(m, _)| margin < *m) {
                worst = Some((margin, detail));
            }
        }
        for (name, why) in &r.unsupported {
            println!("SKIP verify-variance n={} {name}: {why}", r.n);
        }
    }
    let status = Status::from_pass(outcome.passed());
    if status == Status::Violation {
        if let Some((_, detail)) = worst {
            eprintln!("worst case: {detail}");
        }
    }
    Ok(status)
}

fn verify_slln(cli: &Cli, exp: &Experiment) -> Result<Status> {
    let table = run_slln_experiment(exp)?;
    report::write_csv_file(&out_path(cli, "slln.csv"), |f| report::write_slln_csv(f, &table))?;
    report::write_json(&out_path(cli, "slln.json"), &table)?;
    for c in &table.conditions {
        println!("NOTE verify-slln {c}");
    }
    let checks = table.checks();
    for (what, ok) in &checks {
        line(*ok, Command::VerifySlln, what);
    }
    if let Some(last) = table.rows.last() {
        println!("INFO verify-slln n={} u_n={} target={} abs_error={}", last.n, num(last.u_n), num(last.target), num(last.abs_error));
    }
    let status = Status::from_pass(table.passed());
    if status == Status::Violation {
        if let Some(worst) = table.rows.iter().max_by(|a, b| a.abs_error.total_cmp(&b.abs_error)) {
            eprintln!("worst case: n={} abs_error={}", worst.n, num(worst.abs_error));
        }
    }
    Ok(status)
}

fn check_propositions(cli: &Cli) -> Result<Status> {
    let mut grid = match read_config_text(cli)? {
        Some(text) => serde_json::from_str::<PropositionGrid>(&text).map_err(|e| Error::Config(e.to_string()))?,
        None => PropositionGrid::default(),
    };
    if let Some(seed) = cli.seed {
        grid.seed = seed;
    }
    let report = run_proposition_checks(&grid)?;
    report::write_json(&out_path(cli, "propositions.json"), &report)?;
    for c in &report.checks {
        line(
            c.passed(),
            Command::CheckPropositions,
            &format!("{} instances={} violations={} max_ratio={}", c.name, c.instances, c.violations, num(c.max_ratio)),
        );
        if !c.passed() {
            eprintln!(
                "worst case for {}: tuple {:?} ({})",
                c.name,
                c.worst_case_tuple.as_deref().unwrap_or(&[]),
                c.worst_case_detail.as_deref().unwrap_or("")
            );
        }
    }
    Ok(Status::from_pass(report.passed()))
}

#[derive(Serialize)]
struct CertifiedProfile<'a> {
    pi: &'a Distribution,
    initial: &'a Distribution,
    m_sup: f64,
    profile: &'a ErgodicityProfile,
}

fn certify_profile(cli: &Cli, exp: &Experiment) -> Result<Status> {
    let doc = CertifiedProfile { pi: &exp.pi, initial: &exp.mu, m_sup: exp.m_sup, profile: &exp.profile };
    let path = out_path(cli, "profile.json");
    report::write_json(&path, &doc)?;
    let horizon = exp.profile.tabulated_horizon();
    let kind = match exp.profile.provenance {
        Provenance::Certified => "certified",
        Provenance::Declared => "declared (not checked)",
    };
    let last = horizon.map(|k| format!(" rho({k})={}", num(exp.profile.rho(k)))).unwrap_or_default();
    line(
        true,
        Command::CertifyProfile,
        &format!("{kind} rho(0)={} rho(1)={}{last} M={} -> {}", num(exp.profile.rho(0)), num(exp.profile.rho(1)), num(exp.m_sup), path.display()),
    );
    Ok(Status::Pass)
}
