//! `diamond` — broken k-diamond partition numbers from the command line.
//!
//! Subcommands: `compute` (exact series values), `exact-formula`
//! (truncated exact-formula evaluation with certification), `asymptotic`
//! (main term and error envelopes), `verify` (inequality sweeps), and
//! `reproduce` (the full acceptance suite).
//!
//! Exit codes: 0 when every asserted check passes, 1 when a check fails
//! (counterexample witnesses are printed), 2 on usage errors.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use diamond_core::acceptance::{run_all, run_criterion, CriterionResult};
use diamond_core::asymptotics::{estimate, main_term};
use diamond_core::ball::Ball;
use diamond_core::circle::{convergence_profile, exact_formula_eval};
use diamond_core::inequalities::{
    self, threshold_certificate, IneqReport, ThresholdReport, Verdict,
};
use diamond_core::series::TableCache;
use diamond_core::{Error, Prec};

#[derive(Parser)]
#[command(
    name = "diamond",
    version,
    about = "Broken k-diamond partition numbers: exact series, exact formula, asymptotics, and inequality verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format; csv applies to sweep tables only
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Working precision for ball arithmetic, in bits (minimum 64)
    #[arg(long, global = true, default_value_t = 256)]
    bits: u32,

    /// Directory for on-disk coefficient-table caches
    /// (falls back to DIAMOND_CACHE_DIR)
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    /// Worker threads for sweeps (0 = one per CPU)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Treat inconclusive results as failures
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Exact series values Delta_k(n)
    Compute {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        from: Option<u64>,
        #[arg(long)]
        to: Option<u64>,
    },
    /// Truncated exact-formula evaluation with integer certification
    ExactFormula {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: u64,
        /// Truncation depth of the j-sum
        #[arg(long = "J", default_value_t = 50)]
        j_max: u64,
        /// Also report the convergence profile |partial(J) - exact|
        #[arg(long)]
        profile: bool,
    },
    /// Main term, error envelope, and relative-error bound
    Asymptotic {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        from: Option<u64>,
        #[arg(long)]
        to: Option<u64>,
    },
    /// Inequality sweeps with verdicts and witnesses
    Verify {
        #[command(subcommand)]
        family: VerifyCmd,
    },
    /// Run the full acceptance suite
    Reproduce {
        /// Run a single criterion (1..=11)
        #[arg(long)]
        only: Option<u32>,
    },
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    k: u32,
    #[arg(long)]
    from: u64,
    #[arg(long)]
    to: u64,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Turan inequality of the given order (order 2 = log-concavity)
    Turan {
        #[command(flatten)]
        range: SweepArgs,
        #[arg(long, default_value_t = 2)]
        order: u32,
    },
    /// Laguerre inequality of the given order
    Laguerre {
        #[command(flatten)]
        range: SweepArgs,
        #[arg(long, default_value_t = 2)]
        order: u32,
    },
    /// Positivity of forward differences of the given order
    Diff {
        #[command(flatten)]
        range: SweepArgs,
        #[arg(long, default_value_t = 1)]
        order: u32,
    },
    /// Exact log-concavity plus the ball-certified sufficient condition
    Logconcave {
        #[command(flatten)]
        range: SweepArgs,
    },
    /// Delta_k(a) Delta_k(b) >= Delta_k(a+b) over all pairs in the range
    Multiplicative {
        #[command(flatten)]
        range: SweepArgs,
    },
    /// Certified log-concavity threshold for one k
    Threshold {
        #[arg(long)]
        k: u32,
    },
}

#[derive(Serialize)]
struct BallRepr {
    mid: String,
    rad: String,
    bits: u32,
}

fn ball_repr(b: &Ball) -> BallRepr {
    let (mid, rad) = b.to_mid_rad_strings();
    BallRepr { mid, rad, bits: b.prec() }
}

#[derive(Serialize)]
struct ConfigEcho {
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    from: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    to: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    j_max: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    order: Option<u32>,
    bits: u32,
    format: &'static str,
    threads: usize,
    strict: bool,
}

#[derive(Serialize)]
struct Report<T: Serialize> {
    command: &'static str,
    config: ConfigEcho,
    results: T,
    verdict: &'static str,
    timing_ms: u128,
}

#[derive(Serialize)]
struct ComputeRow {
    n: u64,
    value: String,
}

#[derive(Serialize)]
struct ExactFormulaResult {
    k: u32,
    n: u64,
    j_max: u64,
    rounded: Option<String>,
    certified: bool,
    imag_contains_zero: bool,
    partial_sum: BallRepr,
    imag: BallRepr,
    tail_allowance: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<String>,
    terms: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    profile: Option<Vec<(u64, f64)>>,
}

#[derive(Serialize)]
struct AsymptoticRow {
    n: u64,
    x: BallRepr,
    main: BallRepr,
    #[serde(skip_serializing_if = "Option::is_none")]
    r_bound: Option<BallRepr>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eps_bound: Option<BallRepr>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    envelope_holds: Option<bool>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    let cache_dir =
        cli.cache_dir.clone().or_else(|| std::env::var_os("DIAMOND_CACHE_DIR").map(PathBuf::from));
    let cache = TableCache::new(cache_dir);
    match run(&cli, &cache) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(Error::Precondition(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn format_name(f: Format) -> &'static str {
    match f {
        Format::Text => "text",
        Format::Json => "json",
        Format::Csv => "csv",
    }
}

fn config_echo(cli: &Cli) -> ConfigEcho {
    ConfigEcho {
        k: None,
        n: None,
        from: None,
        to: None,
        j_max: None,
        order: None,
        bits: cli.bits,
        format: format_name(cli.format),
        threads: cli.threads,
        strict: cli.strict,
    }
}

fn print_report<T: Serialize>(report: &Report<T>) {
    println!("{}", serde_json::to_string_pretty(report).expect("report serialization"));
}

fn run(cli: &Cli, cache: &TableCache) -> Result<bool, Error> {
    let start = Instant::now();
    let bits: Prec = cli.bits.max(64);
    match &cli.command {
        Command::Compute { k, n, from, to } => {
            let (lo, hi) = resolve_range(*n, *from, *to)?;
            let table = cache.delta(*k, hi);
            let rows: Vec<ComputeRow> = (lo..=hi)
                .map(|n| Ok(ComputeRow { n, value: table.value(n)?.to_string() }))
                .collect::<Result<_, Error>>()?;
            let mut config = config_echo(cli);
            config.k = Some(*k);
            config.from = Some(lo);
            config.to = Some(hi);
            match cli.format {
                Format::Json => print_report(&Report {
                    command: "compute",
                    config,
                    results: rows,
                    verdict: "pass",
                    timing_ms: start.elapsed().as_millis(),
                }),
                Format::Csv => {
                    println!("n,value");
                    for r in rows {
                        println!("{},{}", r.n, r.value);
                    }
                }
                Format::Text => {
                    if lo == hi {
                        println!("{}", rows[0].value);
                    } else {
                        for r in rows {
                            println!("Delta_{}({}) = {}", k, r.n, r.value);
                        }
                    }
                }
            }
            Ok(true)
        }

        Command::ExactFormula { k, n, j_max, profile } => {
            if cli.format == Format::Csv && !*profile {
                return Err(Error::Precondition(
                    "csv output is for sweep tables; add --profile or pick another format".into(),
                ));
            }
            let table = cache.delta(*k, *n);
            let eval = exact_formula_eval(*k, *n, *j_max, bits, Some(&table))?;
            let prof =
                if *profile { Some(convergence_profile(*k, *n, *j_max, bits, &table)?) } else { None };
            let result = ExactFormulaResult {
                k: *k,
                n: *n,
                j_max: *j_max,
                rounded: eval.rounded.as_ref().map(|v| v.to_string()),
                certified: eval.certified,
                imag_contains_zero: eval.imag_contains_zero,
                partial_sum: ball_repr(&eval.partial_sum),
                imag: ball_repr(&eval.imag_sum),
                tail_allowance: eval.tail_allowance.to_f64().to_string(),
                oracle: eval.oracle.as_ref().map(|v| v.to_string()),
                terms: eval.terms.len(),
                profile: prof.clone(),
            };
            let ok = eval.certified;
            let mut config = config_echo(cli);
            config.k = Some(*k);
            config.n = Some(*n);
            config.j_max = Some(*j_max);
            match cli.format {
                Format::Json => print_report(&Report {
                    command: "exact-formula",
                    config,
                    results: result,
                    verdict: if ok { "pass" } else { "fail" },
                    timing_ms: start.elapsed().as_millis(),
                }),
                Format::Csv => {
                    println!("J,deviation");
                    for (j, d) in prof.unwrap_or_default() {
                        println!("{j},{d:e}");
                    }
                }
                Format::Text => {
                    println!(
                        "Delta_{}({}) via exact formula, J <= {}: rounded = {}",
                        k,
                        n,
                        j_max,
                        result.rounded.as_deref().unwrap_or("-")
                    );
                    println!(
                        "certified: {} (imag encloses 0: {}, oracle: {})",
                        result.certified,
                        result.imag_contains_zero,
                        result.oracle.as_deref().unwrap_or("-")
                    );
                    if let Some(p) = &result.profile {
                        for (j, d) in p {
                            println!("  J={j:>3}  |deviation| ~ {d:.3e}");
                        }
                    }
                }
            }
            Ok(ok)
        }

        Command::Asymptotic { k, n, from, to } => {
            let (lo, hi) = resolve_range(*n, *from, *to)?;
            let table = cache.delta(*k, hi);
            let mut all_ok = true;
            let rows: Vec<AsymptoticRow> = (lo..=hi)
                .map(|n| {
                    let x = diamond_core::asymptotics::x_of_n(*k, n, bits)?;
                    let m = main_term(*k, n, bits)?;
                    let exact = table.value(n)?;
                    if *k >= 3 {
                        let est = estimate(*k, n, bits)?;
                        let dev = Ball::from_bigint(bits, exact).sub(&m).abs();
                        let holds = dev.le_certain(&est.r_bound);
                        all_ok &= holds;
                        Ok(AsymptoticRow {
                            n,
                            x: ball_repr(&x),
                            main: ball_repr(&m),
                            r_bound: Some(ball_repr(&est.r_bound)),
                            eps_bound: est.eps_bound.as_ref().map(ball_repr),
                            exact: Some(exact.to_string()),
                            envelope_holds: Some(holds),
                        })
                    } else {
                        Ok(AsymptoticRow {
                            n,
                            x: ball_repr(&x),
                            main: ball_repr(&m),
                            r_bound: None,
                            eps_bound: None,
                            exact: Some(exact.to_string()),
                            envelope_holds: None,
                        })
                    }
                })
                .collect::<Result<_, Error>>()?;
            let mut config = config_echo(cli);
            config.k = Some(*k);
            config.from = Some(lo);
            config.to = Some(hi);
            match cli.format {
                Format::Json => print_report(&Report {
                    command: "asymptotic",
                    config,
                    results: rows,
                    verdict: if all_ok { "pass" } else { "fail" },
                    timing_ms: start.elapsed().as_millis(),
                }),
                Format::Csv => {
                    println!("n,x_mid,main_mid,r_bound_mid,eps_bound_mid,exact,envelope_holds");
                    for r in rows {
                        println!(
                            "{},{},{},{},{},{},{}",
                            r.n,
                            r.x.mid,
                            r.main.mid,
                            r.r_bound.as_ref().map_or(String::new(), |b| b.mid.clone()),
                            r.eps_bound.as_ref().map_or(String::new(), |b| b.mid.clone()),
                            r.exact.as_deref().unwrap_or(""),
                            r.envelope_holds.map_or(String::new(), |b| b.to_string()),
                        );
                    }
                }
                Format::Text => {
                    for r in &rows {
                        println!(
                            "n={:>6}  M = {}  envelope_holds = {}",
                            r.n,
                            r.main.mid,
                            r.envelope_holds.map_or("n/a".into(), |b| b.to_string())
                        );
                    }
                }
            }
            Ok(all_ok)
        }

        Command::Verify { family } => {
            let (report, threshold): (Option<IneqReport>, Option<ThresholdReport>) = match family {
                VerifyCmd::Turan { range, order } => {
                    let table = cache.delta(range.k, range.to + u64::from(*order));
                    (
                        Some(inequalities::sweep_turan(&table, range.k, *order, range.from, range.to)?),
                        None,
                    )
                }
                VerifyCmd::Laguerre { range, order } => {
                    let table = cache.delta(range.k, range.to + 2 * *order as u64);
                    (
                        Some(inequalities::sweep_laguerre(
                            &table, range.k, *order, range.from, range.to,
                        )?),
                        None,
                    )
                }
                VerifyCmd::Diff { range, order } => {
                    let table = cache.delta(range.k, range.to + *order as u64);
                    (
                        Some(inequalities::sweep_difference(
                            &table, range.k, *order, range.from, range.to,
                        )?),
                        None,
                    )
                }
                VerifyCmd::Logconcave { range } => {
                    let table = cache.delta(range.k, range.to + 1);
                    (
                        Some(inequalities::sweep_logconcave(
                            &table, range.k, range.from, range.to, bits,
                        )?),
                        None,
                    )
                }
                VerifyCmd::Multiplicative { range } => {
                    let table = cache.delta(range.k, 2 * range.to);
                    (
                        Some(inequalities::sweep_multiplicative(&table, range.k, range.from, range.to)?),
                        None,
                    )
                }
                VerifyCmd::Threshold { k } => (None, Some(threshold_certificate(*k, bits)?)),
            };
            let mut config = config_echo(cli);
            let (ok, verdict_str) = match (&report, &threshold) {
                (Some(r), _) => {
                    config.k = Some(r.k);
                    config.from = Some(r.range.0);
                    config.to = Some(r.range.1);
                    match &r.verdict {
                        Verdict::AllHold => (true, "pass"),
                        Verdict::Counterexamples(_) => (false, "fail"),
                        Verdict::Inconclusive { .. } => {
                            (!cli.strict, if cli.strict { "fail" } else { "inconclusive" })
                        }
                    }
                }
                (_, Some(t)) => {
                    config.k = Some(t.k);
                    (t.passed, if t.passed { "pass" } else { "fail" })
                }
                _ => unreachable!(),
            };
            match cli.format {
                Format::Json => {
                    if let Some(r) = &report {
                        print_report(&Report {
                            command: "verify",
                            config,
                            results: r,
                            verdict: verdict_str,
                            timing_ms: start.elapsed().as_millis(),
                        });
                    } else {
                        print_report(&Report {
                            command: "verify",
                            config,
                            results: threshold.as_ref().unwrap(),
                            verdict: verdict_str,
                            timing_ms: start.elapsed().as_millis(),
                        });
                    }
                }
                Format::Csv => {
                    let r = report
                        .as_ref()
                        .ok_or_else(|| Error::Precondition("csv output is for sweep tables".into()))?;
                    println!("n,holds,values");
                    match &r.verdict {
                        Verdict::AllHold => {
                            for w in &r.witnesses {
                                println!("{},true,{}", w.n, w.values.join(";"));
                            }
                        }
                        Verdict::Counterexamples(ws) => {
                            for w in ws {
                                println!("{},false,{}", w.n, w.values.join(";"));
                            }
                        }
                        Verdict::Inconclusive { .. } => {}
                    }
                }
                Format::Text => {
                    if let Some(r) = &report {
                        match &r.verdict {
                            Verdict::AllHold => println!(
                                "AllHold: {:?} for k={} on [{}, {}] ({} checks{})",
                                r.family,
                                r.k,
                                r.range.0,
                                r.range.1,
                                r.checked,
                                r.certified_count
                                    .map_or(String::new(), |c| format!(", {c} ball-certified")),
                            ),
                            Verdict::Counterexamples(ws) => {
                                println!(
                                    "Counterexamples: {:?} for k={} fails at {} point(s)",
                                    r.family,
                                    r.k,
                                    ws.len()
                                );
                                for w in ws.iter().take(20) {
                                    println!("  n={}: {}", w.n, w.values.join(", "));
                                }
                            }
                            Verdict::Inconclusive { reason } => println!("Inconclusive: {reason}"),
                        }
                    }
                    if let Some(t) = &threshold {
                        println!(
                            "threshold certificate k={}: n0_ceil={} threshold={} branch={:?} passed={}",
                            t.k, t.n0_ceil, t.threshold, t.branch, t.passed
                        );
                    }
                }
            }
            Ok(ok)
        }

        Command::Reproduce { only } => {
            if cli.format == Format::Csv {
                return Err(Error::Precondition("csv output is for sweep tables".into()));
            }
            let results: Vec<CriterionResult> = match only {
                Some(id) => vec![run_criterion(*id, cache)?],
                None => run_all(cache)?,
            };
            let ok = results.iter().all(|r| r.passed);
            let config = config_echo(cli);
            match cli.format {
                Format::Json => print_report(&Report {
                    command: "reproduce",
                    config,
                    results: &results,
                    verdict: if ok { "pass" } else { "fail" },
                    timing_ms: start.elapsed().as_millis(),
                }),
                _ => {
                    for r in &results {
                        println!(
                            "criterion {:>2}: {} [{} ms] {} - {}",
                            r.id,
                            if r.passed { "PASS" } else { "FAIL" },
                            r.millis,
                            r.name,
                            r.detail
                        );
                    }
                    println!("{}", if ok { "all criteria passed" } else { "some criteria FAILED" });
                }
            }
            Ok(ok)
        }
    }
}

fn resolve_range(n: Option<u64>, from: Option<u64>, to: Option<u64>) -> Result<(u64, u64), Error> {
    match (n, from, to) {
        (Some(n), None, None) => Ok((n, n)),
        (None, Some(a), Some(b)) if a <= b => Ok((a, b)),
        (None, Some(_), Some(_)) => Err(Error::Precondition("--from must be <= --to".into())),
        _ => Err(Error::Precondition("pass either --n or both --from and --to".into())),
    }
}
