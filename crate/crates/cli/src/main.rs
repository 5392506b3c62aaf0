//! Command-line front door: subcommands wiring the library to files and
//! reports with reproducible configuration.
//!
//! Exit codes: 0 success, 1 verification FAIL or runtime error, 2 usage or
//! configuration error.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sarg_core::argzeros::{self, ZeroSet};
use sarg_core::audit::{self, AuditSpec};
use sarg_core::characters::{characters, DirichletCharacter};
use sarg_core::explicit::{self, sigma1_of, DEFAULT_ZERO_WINDOW};
use sarg_core::lfunc;
use sarg_core::numerics::{ComplexPoint, EmConfig};
use sarg_core::sampling::SplitMix64;

use config::RunConfig;
use output::{fmt12, write_out};

#[derive(Parser)]
#[command(
    name = "sarg",
    about = "Argument of Dirichlet L-functions: values, zeros, explicit-formula checks, bound audits",
    version
)]
struct Cli {
    /// Optional JSON configuration file (see README for the schema).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Zero-cache directory (env: SARG_ZERO_CACHE).
    #[arg(long, global = true)]
    zero_cache: Option<PathBuf>,

    /// Seed for sampling-based checks (env: SARG_SEED).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Report file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Report format.
    #[arg(long, global = true, value_parser = ["csv", "json"])]
    format: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CharSelect {
    /// Modulus q >= 3.
    #[arg(long)]
    q: u64,
    /// Character label `<q>.<e1>-<e2>-...`; defaults to the first primitive
    /// character mod q.
    #[arg(long)]
    chi: Option<String>,
}

/// Usage errors exit with 2, runtime failures with 1.
enum CliError {
    Usage(String),
    Run(String),
}

impl From<String> for CliError {
    fn from(msg: String) -> Self {
        CliError::Run(msg)
    }
}

impl CharSelect {
    fn resolve(&self) -> Result<DirichletCharacter, CliError> {
        match &self.chi {
            Some(label) => {
                let chi = DirichletCharacter::from_label(label)
                    .map_err(|e| CliError::Usage(e.to_string()))?;
                if chi.modulus() != self.q {
                    return Err(CliError::Usage(format!(
                        "label {label} does not match --q {}",
                        self.q
                    )));
                }
                Ok(chi)
            }
            None => sarg_core::characters::primitive_characters(self.q)
                .map_err(|e| CliError::Usage(e.to_string()))?
                .into_iter()
                .next()
                .ok_or_else(|| CliError::Usage(format!("no primitive character mod {}", self.q))),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the sharp envelope constant and check it against 0.804.
    Constant,
    /// Enumerate all characters mod q with conductor, parity, primitivity.
    Characters { q: u64 },
    /// Evaluate L, the completed function, and Z at sigma + it.
    Eval {
        #[command(flatten)]
        select: CharSelect,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 0.5)]
        sigma: f64,
    },
    /// Compute S(t, chi) by continuous argument variation.
    S {
        #[command(flatten)]
        select: CharSelect,
        #[arg(long)]
        t: f64,
    },
    /// Find critical-line zeros up to height T and cache them.
    Zeros {
        #[command(flatten)]
        select: CharSelect,
        #[arg(long = "T", default_value_t = 50.0)]
        t_height: f64,
        /// Re-validate an existing cache file instead of recomputing.
        #[arg(long)]
        verify: bool,
    },
    /// Check the explicit-formula identity for L'/L at s = sigma_1 + it.
    Lemma2 {
        #[command(flatten)]
        select: CharSelect,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        x: f64,
        #[arg(long = "T", default_value_t = 60.0)]
        t_height: f64,
        #[arg(long = "H", default_value_t = DEFAULT_ZERO_WINDOW)]
        window: f64,
    },
    /// Check the kernel-density identity for Re L'/L at sigma_1 + it.
    Eq3 {
        #[command(flatten)]
        select: CharSelect,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        x: Option<f64>,
        #[arg(long = "T", default_value_t = 60.0)]
        t_height: f64,
        #[arg(long = "H", default_value_t = DEFAULT_ZERO_WINDOW)]
        window: f64,
    },
    /// Check the windowed zero-sum inequality on seeded samples.
    Lemma1 {
        #[command(flatten)]
        select: CharSelect,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        x: f64,
        #[arg(long = "T", default_value_t = 60.0)]
        t_height: f64,
        #[arg(long = "H", default_value_t = DEFAULT_ZERO_WINDOW)]
        window: f64,
        #[arg(long, default_value_t = 10)]
        samples: usize,
    },
    /// Split S(t, chi) into the M1/M2/M3 parts and check the identity.
    Decomp {
        #[command(flatten)]
        select: CharSelect,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        x: Option<f64>,
    },
    /// Audit |S|/envelope over a grid of moduli and heights.
    Audit {
        /// Moduli, comma separated (e.g. 3,4,5) or ranges (e.g. 3-50).
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<String>,
        #[arg(long, default_value_t = 2.0)]
        t_min: f64,
        #[arg(long, default_value_t = 80.0)]
        t_max: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        /// Disable the parallel map (single-threaded run).
        #[arg(long)]
        serial: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match RunConfig::assemble(
        cli.config.as_deref(),
        cli.zero_cache.clone(),
        cli.seed,
        cli.format.clone(),
    ) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("config error: {msg}");
            return ExitCode::from(2);
        }
    };
    match run(cli.command, &cfg, cli.out.as_deref()) {
        Ok(pass) => {
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

/// Zero set for a character: from the cache when present, computed (and
/// cached) otherwise.
fn zero_set(chi: &DirichletCharacter, height: f64, cfg: &RunConfig) -> Result<ZeroSet, String> {
    let one = |c: &DirichletCharacter| -> Result<argzeros::ZeroList, String> {
        let path = cfg.zero_cache.join(format!("{}.zeros", c.label()));
        if let Ok(list) = argzeros::load_zeros(&path) {
            if list.height >= height && list.completeness == argzeros::Completeness::Certified {
                return Ok(list);
            }
        }
        let list = argzeros::find_zeros(c, height).map_err(|e| e.to_string())?;
        std::fs::create_dir_all(&cfg.zero_cache).map_err(|e| e.to_string())?;
        argzeros::save_zeros(&list, &path).map_err(|e| e.to_string())?;
        Ok(list)
    };
    let own = one(chi)?;
    if chi.is_real() {
        ZeroSet::from_self_dual(chi, &own).map_err(|e| e.to_string())
    } else {
        let conj = one(&chi.conjugate())?;
        ZeroSet::from_pair(chi, &own, &conj).map_err(|e| e.to_string())
    }
}

fn parse_q_set(specs: &[String]) -> Result<Vec<u64>, CliError> {
    let mut out = Vec::new();
    for spec in specs {
        if let Some((a, b)) = spec.split_once('-') {
            let a: u64 = a
                .parse()
                .map_err(|_| CliError::Usage(format!("bad q range '{spec}'")))?;
            let b: u64 = b
                .parse()
                .map_err(|_| CliError::Usage(format!("bad q range '{spec}'")))?;
            if a > b {
                return Err(CliError::Usage(format!("bad q range '{spec}'")));
            }
            out.extend(a..=b);
        } else {
            out.push(
                spec.parse()
                    .map_err(|_| CliError::Usage(format!("bad q value '{spec}'")))?,
            );
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn run(cmd: Command, cfg: &RunConfig, out: Option<&std::path::Path>) -> Result<bool, CliError> {
    match cmd {
        Command::Constant => {
            let c = audit::theorem_constant();
            let pass = c < 0.804;
            println!("constant {}", fmt12(c));
            println!(
                "bound 0.804: {}",
                if pass {
                    "PASS (strictly below)"
                } else {
                    "FAIL"
                }
            );
            Ok(pass)
        }
        Command::Characters { q } => {
            let chars = characters(q).map_err(|e| e.to_string())?;
            println!("label conductor parity primitive principal real");
            for chi in &chars {
                println!(
                    "{} {} {} {} {} {}",
                    chi.label(),
                    chi.conductor(),
                    chi.parity(),
                    chi.is_primitive(),
                    chi.is_principal(),
                    chi.is_real()
                );
            }
            Ok(true)
        }
        Command::Eval { select, t, sigma } => {
            let chi = select.resolve()?;
            let s = ComplexPoint::new(sigma, t).map_err(|e| e.to_string())?;
            let em = EmConfig::for_height_with_target(t, cfg.precision.l_target);
            let l = lfunc::l_value(s, &chi, &em).map_err(|e| e.to_string())?;
            let completed = lfunc::completed_with(s, &chi, &em).map_err(|e| e.to_string())?;
            let rn = lfunc::root_number(&chi).map_err(|e| e.to_string())?;
            println!("chi {}", chi.label());
            println!("s {} + {}i", fmt12(sigma), fmt12(t));
            println!("L {} + {}i", fmt12(l.re), fmt12(l.im));
            println!(
                "Lambda {} + {}i",
                fmt12(completed.lambda.re),
                fmt12(completed.lambda.im)
            );
            println!(
                "epsilon {} + {}i",
                fmt12(rn.epsilon.re),
                fmt12(rn.epsilon.im)
            );
            if (sigma - 0.5).abs() < 1e-12 {
                let z = lfunc::hardy_z_with(t, &chi, &em).map_err(|e| e.to_string())?;
                println!("Z {}", fmt12(z));
            }
            Ok(true)
        }
        Command::S { select, t } => {
            let chi = select.resolve()?;
            let trace = argzeros::s_value(t, &chi).map_err(|e| e.to_string())?;
            println!("chi {}", chi.label());
            println!("t {}", fmt12(t));
            println!("S {}", fmt12(trace.s_value));
            println!("steps {}", trace.steps_used);
            println!("averaged {}", trace.averaged);
            Ok(true)
        }
        Command::Zeros {
            select,
            t_height,
            verify,
        } => {
            let chi = select.resolve()?;
            let path = cfg.zero_cache.join(format!("{}.zeros", chi.label()));
            if verify {
                let list = argzeros::load_zeros(&path).map_err(|e| e.to_string())?;
                match argzeros::verify_zeros(&list, &chi) {
                    Ok(()) => {
                        println!("verified {} ordinates: PASS", list.ordinates.len());
                        Ok(true)
                    }
                    Err(e) => {
                        println!("verification FAIL: {e}");
                        Ok(false)
                    }
                }
            } else {
                let list = argzeros::find_zeros(&chi, t_height).map_err(|e| e.to_string())?;
                std::fs::create_dir_all(&cfg.zero_cache).map_err(|e| e.to_string())?;
                argzeros::save_zeros(&list, &path).map_err(|e| e.to_string())?;
                println!("chi {}", chi.label());
                println!("zeros {}", list.ordinates.len());
                println!(
                    "complete {}",
                    list.completeness == argzeros::Completeness::Certified
                );
                if let Some(d) = &list.diagnostic {
                    println!("diagnostic {d}");
                }
                println!("cache {}", path.display());
                Ok(list.completeness == argzeros::Completeness::Certified)
            }
        }
        Command::Lemma2 {
            select,
            t,
            x,
            t_height,
            window,
        } => {
            let chi = select.resolve()?;
            let zeros = zero_set(&chi, t_height, cfg)?;
            let s = ComplexPoint::new(sigma1_of(x), t).map_err(|e| e.to_string())?;
            let report =
                explicit::verify_lemma2(s, &chi, x, &zeros, window).map_err(|e| e.to_string())?;
            emit_report(&report, cfg, out)?;
            Ok(report.pass)
        }
        Command::Eq3 {
            select,
            t,
            x,
            t_height,
            window,
        } => {
            let chi = select.resolve()?;
            let x = x.unwrap_or_else(|| audit::default_cutoff(chi.modulus(), t).0);
            let zeros = zero_set(&chi, t_height, cfg)?;
            let report =
                explicit::verify_eq3(t, &chi, x, &zeros, window).map_err(|e| e.to_string())?;
            emit_report(&report, cfg, out)?;
            Ok(report.pass)
        }
        Command::Lemma1 {
            select,
            t,
            x,
            t_height,
            window,
            samples,
        } => {
            let chi = select.resolve()?;
            let zeros = zero_set(&chi, t_height, cfg)?;
            let sigma1 = sigma1_of(x);
            let mut rng = SplitMix64::new(cfg.seed);
            let mut all_pass = true;
            let mut worst = f64::INFINITY;
            for k in 0..samples {
                let sigma = sigma1 + rng.range_f64(0.0, 2.0);
                let s = ComplexPoint::new(sigma, t).map_err(|e| e.to_string())?;
                let rep = explicit::lemma1_inequality_check(s, &chi, x, &zeros, window)
                    .map_err(|e| e.to_string())?;
                all_pass &= rep.pass;
                worst = worst.min(rep.margin);
                println!(
                    "sample {k} sigma {} lhs {} rhs {} margin {} {}",
                    fmt12(sigma),
                    fmt12(rep.lhs),
                    fmt12(rep.rhs),
                    fmt12(rep.margin),
                    if rep.pass { "PASS" } else { "FAIL" }
                );
            }
            println!(
                "lemma1 {} (worst margin {})",
                if all_pass { "PASS" } else { "FAIL" },
                fmt12(worst)
            );
            Ok(all_pass)
        }
        Command::Decomp { select, t, x } => {
            let chi = select.resolve()?;
            let x = x.unwrap_or_else(|| audit::default_cutoff(chi.modulus(), t).0);
            let d = audit::m_decomposition(t, &chi, x).map_err(|e| e.to_string())?;
            let json = serde_json::json!({
                "decomposition": &d,
                "residual": d.residual(),
                "config": cfg,
            });
            write_out(out, &serde_json::to_string_pretty(&json).unwrap())
                .map_err(|e| e.to_string())?;
            println!(
                "decomp residual {} {}",
                fmt12(d.residual()),
                if d.residual() < 1e-6 { "PASS" } else { "FAIL" }
            );
            Ok(d.residual() < 1e-6)
        }
        Command::Audit {
            q,
            t_min,
            t_max,
            step,
            serial,
        } => {
            let q_set = parse_q_set(&q)?;
            let mut spec = AuditSpec::new(q_set, t_min, t_max, step).map_err(|e| e.to_string())?;
            spec.zero_cache = Some(cfg.zero_cache.clone());
            spec.parallel = !serial;
            let outcome = audit::audit_scan(&spec).map_err(|e| e.to_string())?;
            match cfg.format.as_str() {
                "csv" => {
                    let text = audit::rows_to_csv(&outcome.rows);
                    write_out(out, &text).map_err(|e| e.to_string())?;
                }
                _ => {
                    let json = serde_json::json!({
                        "summary": &outcome.summary,
                        "rows": &outcome.rows,
                        "config": cfg,
                    });
                    write_out(out, &serde_json::to_string_pretty(&json).unwrap())
                        .map_err(|e| e.to_string())?;
                }
            }
            eprintln!(
                "max ratio {} over {} rows ({} failed)",
                fmt12(outcome.summary.max_ratio),
                outcome.summary.rows,
                outcome.summary.failed_rows
            );
            Ok(outcome.summary.failed_rows == 0 && outcome.summary.max_ratio.is_finite())
        }
    }
}

fn emit_report(
    report: &explicit::ResidualReport,
    cfg: &RunConfig,
    out: Option<&std::path::Path>,
) -> Result<(), String> {
    let json = serde_json::json!({
        "report": report,
        "config": cfg,
    });
    write_out(out, &serde_json::to_string_pretty(&json).unwrap()).map_err(|e| e.to_string())?;
    println!(
        "{} residual {} tolerance {} {}",
        report.check,
        fmt12(report.residual),
        fmt12(report.tolerance),
        if report.pass { "PASS" } else { "FAIL" }
    );
    Ok(())
}
