use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rmx_cli::config::FileConfig;
use rmx_cli::report::SuiteReport;
use rmx_cli::suite::{run_suite, SuiteParams, SUITE_NAMES};
use rmx_core::laurent::Fraction;
use rmx_core::network::{cylindric_loop_schur, loop_e, loop_schur, CylShape, SkewShape};
use rmx_core::qtorus::{kappa_eps, lambda_pq, lambda_snake};
use rmx_core::quiver::{build_q, build_q_tilde, build_q_tilde_prime};
use rmx_core::rmatrix::{geometric_r, quantum_geometric_r};
use rmx_core::scalar::Rationals;
use rmx_core::seed::{parse_word, r_word, XSeed, YSeedTropical, YSeedUniversal};
use rmx_core::skew::{render_expr, replay_witness, SpecConfig, Witness};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "rmx",
    about = "Exact and randomized verification for cylindric cluster R-matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and emit a report.
    Verify {
        /// Suite name (use `all` for every suite).
        suite: String,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Compute one object and print it.
    Compute {
        /// Object: loop-schur | cyl-schur | loop-e | geometric-r | quantum-r |
        /// kappa | quiver | r-word | mutate
        object: String,
        #[command(flatten)]
        opts: CommonOpts,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        m: usize,
        /// Shape, e.g. "2,1" or "3,1/1".
        #[arg(long)]
        shape: Option<String>,
        /// Cylindric period parameter.
        #[arg(long)]
        s: Option<usize>,
        #[arg(long, default_value_t = 1)]
        r: i64,
        #[arg(long, default_value_t = 1)]
        k: i64,
        #[arg(long, default_value_t = 1)]
        i: i64,
        #[arg(long, default_value_t = 1)]
        cycle: usize,
        #[arg(long, default_value_t = 1)]
        j: i64,
        /// Quiver variant: plain | enriched | reduced.
        #[arg(long, default_value = "plain")]
        variant: String,
        /// Mutation word, e.g. "mu(v(1,1)),swap(v(1,2),v(1,3))".
        #[arg(long)]
        word: Option<String>,
        /// Seed kind for `mutate`: x | y | trop.
        #[arg(long, default_value = "x")]
        kind: String,
    },
    /// Re-run a recorded oracle witness.
    Replay {
        /// Path to a witness JSON file.
        witness: PathBuf,
    },
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Trials per randomized check.
    #[arg(long)]
    trials: Option<u32>,
    /// Comma-separated root orders, e.g. 5,7,11.
    #[arg(long)]
    root_orders: Option<String>,
    /// Bit size of the random primes.
    #[arg(long)]
    prime_bits: Option<u32>,
    /// Master seed for the randomized checks.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for suite execution.
    #[arg(long)]
    workers: Option<usize>,
    /// Output format: text | json.
    #[arg(long)]
    format: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include wall-clock timings in the report.
    #[arg(long, default_value_t = false)]
    timing: bool,
    /// Key = value file providing defaults for the flags above.
    #[arg(long)]
    config: Option<PathBuf>,
}

struct Effective {
    params: SuiteParams,
    format: String,
    out: Option<PathBuf>,
}

fn effective(opts: &CommonOpts) -> Result<Effective> {
    let file = match &opts.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let mut oracle = SpecConfig::default();
    if let Some(t) = opts.trials.or(file.get("trials")?) {
        oracle.trials = t;
    }
    if let Some(bits) = opts.prime_bits.or(file.get("prime-bits")?) {
        if !(16..=61).contains(&bits) {
            bail!("prime-bits must lie in 16..=61");
        }
        oracle.prime_bits = bits;
    }
    if let Some(seed) = opts.seed.or(file.get("seed")?) {
        oracle.seed = seed;
    }
    let orders = match &opts.root_orders {
        Some(raw) => Some(
            raw.split(',')
                .map(|x| x.trim().parse::<u64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .context("parsing --root-orders")?,
        ),
        None => file.get_list("root-orders")?,
    };
    if let Some(orders) = orders {
        if orders.is_empty() || orders.iter().any(|&l| l < 2) {
            bail!("root orders must be at least 2");
        }
        oracle.root_orders = orders;
    }
    let workers = opts.workers.or(file.get("workers")?).unwrap_or(1);
    let format = opts
        .format
        .clone()
        .or(file.get("format")?)
        .unwrap_or_else(|| "text".to_string());
    if format != "text" && format != "json" {
        bail!("format must be text or json");
    }
    let out = opts.out.clone().or(file.get::<String>("out")?.map(PathBuf::from));
    Ok(Effective {
        params: SuiteParams {
            oracle,
            workers,
            timing: opts.timing,
        },
        format,
        out,
    })
}

fn emit(reports: &[SuiteReport], eff: &Effective) -> Result<()> {
    let mut text = String::new();
    for (i, rep) in reports.iter().enumerate() {
        if eff.format == "json" {
            text.push_str(&rep.to_json(eff.params.timing));
            if i + 1 < reports.len() {
                text.push('\n');
            }
        } else {
            let mut body = rep.clone();
            if !eff.params.timing {
                for c in body.checks.iter_mut() {
                    c.wall_ms = None;
                }
            }
            text.push_str(&body.to_text());
        }
    }
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &eff.out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{}", text),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Verify { suite, opts } => {
            let eff = effective(&opts)?;
            let reports = run_suite(&suite, &eff.params).ok_or_else(|| {
                anyhow!(
                    "unknown suite '{}'; available: {}",
                    suite,
                    SUITE_NAMES.join(", ")
                )
            })?;
            emit(&reports, &eff)?;
            if reports.iter().all(|r| r.all_ok()) {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(1))
            }
        }
        Command::Compute {
            object,
            opts,
            n,
            m,
            shape,
            s,
            r,
            k,
            i,
            cycle,
            j,
            variant,
            word,
            kind,
        } => {
            let eff = effective(&opts)?;
            let text = compute(
                &object, n, m, shape, s, r, k, i, cycle, j, &variant, word, &kind,
            )?;
            match &eff.out {
                Some(path) => std::fs::write(path, text)?,
                None => print!("{}", text),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Replay { witness } => {
            let raw = std::fs::read_to_string(&witness)
                .with_context(|| format!("reading {}", witness.display()))?;
            let w: Witness = serde_json::from_str(&raw).context("parsing witness")?;
            let reproduced = replay_witness(&w).map_err(|e| anyhow!(e.to_string()))?;
            if reproduced {
                println!(
                    "witness for '{}' reproduces: prime {}, root order {}, mismatch at index {}",
                    w.label, w.assignment.prime, w.assignment.root_order, w.mismatch_index
                );
                Ok(ExitCode::SUCCESS)
            } else {
                println!("witness for '{}' did NOT reproduce", w.label);
                Ok(ExitCode::from(1))
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn compute(
    object: &str,
    n: usize,
    m: usize,
    shape: Option<String>,
    s: Option<usize>,
    r: i64,
    k: i64,
    i: i64,
    cycle: usize,
    j: i64,
    variant: &str,
    word: Option<String>,
    kind: &str,
) -> Result<String> {
    let quiver_of = |variant: &str| -> Result<rmx_core::quiver::ExchangeMatrix> {
        Ok(match variant {
            "plain" => build_q(n, m).map_err(|e| anyhow!(e.to_string()))?,
            "enriched" => build_q_tilde(n, m).map_err(|e| anyhow!(e.to_string()))?,
            "reduced" => build_q_tilde_prime(n, m).map_err(|e| anyhow!(e.to_string()))?,
            _ => bail!("variant must be plain, enriched, or reduced"),
        })
    };
    match object {
        "loop-schur" => {
            let spec = shape.ok_or_else(|| anyhow!("--shape required"))?;
            let shape = SkewShape::parse(&spec).map_err(|e| anyhow!(e.to_string()))?;
            let comm = lambda_snake(n, m).map_err(|e| anyhow!(e.to_string()))?;
            Ok(format!("{}\n", loop_schur(&comm, n, m, &shape, r)))
        }
        "cyl-schur" => {
            let spec = shape.ok_or_else(|| anyhow!("--shape required"))?;
            let s = s.ok_or_else(|| anyhow!("--s required"))?;
            let lambda: Vec<usize> = spec
                .split(',')
                .map(|x| x.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .context("parsing --shape")?;
            let shape =
                CylShape::from_partition(n, s, &lambda).map_err(|e| anyhow!(e.to_string()))?;
            let comm = lambda_snake(n, m).map_err(|e| anyhow!(e.to_string()))?;
            Ok(format!("{}\n", cylindric_loop_schur(&comm, m, &shape, r)))
        }
        "loop-e" => {
            let comm = lambda_snake(n, m).map_err(|e| anyhow!(e.to_string()))?;
            Ok(format!("{}\n", loop_e(&comm, n, m, k, r)))
        }
        "geometric-r" => {
            let map = geometric_r(n).map_err(|e| anyhow!(e.to_string()))?;
            let mut out = String::new();
            for (idx, img) in map.images.iter().enumerate() {
                out.push_str(&format!("{} -> {}\n", map.source.name(idx), img));
            }
            Ok(out)
        }
        "quantum-r" => {
            let comm = lambda_pq(n).map_err(|e| anyhow!(e.to_string()))?;
            let p: Vec<usize> = (1..=n)
                .map(|x| comm.index_of(&rmx_core::qtorus::Gen::P(x as u8)).unwrap())
                .collect();
            let q: Vec<usize> = (1..=n)
                .map(|x| comm.index_of(&rmx_core::qtorus::Gen::Q(x as u8)).unwrap())
                .collect();
            let subst = quantum_geometric_r(&comm, n, &p, &q);
            let mut out = String::new();
            for g in 0..comm.len() {
                out.push_str(&format!(
                    "{} -> {}\n",
                    comm.gens()[g],
                    render_expr(subst.image(g).map_err(|e| anyhow!(e.to_string()))?, &comm)
                ));
            }
            Ok(out)
        }
        "kappa" => {
            let comm = lambda_pq(n).map_err(|e| anyhow!(e.to_string()))?;
            let p: Vec<usize> = (1..=n)
                .map(|x| comm.index_of(&rmx_core::qtorus::Gen::P(x as u8)).unwrap())
                .collect();
            let q: Vec<usize> = (1..=n)
                .map(|x| comm.index_of(&rmx_core::qtorus::Gen::Q(x as u8)).unwrap())
                .collect();
            Ok(format!("{}\n", kappa_eps(&comm, n, i, &p, &q)))
        }
        "quiver" => Ok(quiver_of(variant)?.export_text()),
        "r-word" => {
            let q = quiver_of(variant)?;
            let w = r_word(&q, cycle, j, variant != "plain");
            Ok(format!("{}\n", rmx_core::seed::format_word(&w)))
        }
        "mutate" => {
            let q = quiver_of(variant)?;
            let word = word.ok_or_else(|| anyhow!("--word required"))?;
            let steps = parse_word(&word).map_err(|e| anyhow!(e.to_string()))?;
            let mut out = String::new();
            match kind {
                "x" => {
                    let seed = XSeed::initial(Rationals, q.clone())
                        .apply_word(&steps)
                        .map_err(|e| anyhow!(e.to_string()))?;
                    for &v in q.verts() {
                        out.push_str(&format!("x{} = {}\n", v, seed.var(v)));
                    }
                }
                "y" => {
                    let seed = YSeedUniversal::initial(q.clone())
                        .apply_word(&steps)
                        .map_err(|e| anyhow!(e.to_string()))?;
                    for &v in q.verts() {
                        let f: &Fraction<Rationals> = seed.var(v);
                        out.push_str(&format!("y{} = {}\n", v, f));
                    }
                }
                "trop" => {
                    let seed = YSeedTropical::initial(q.clone())
                        .apply_word(&steps)
                        .map_err(|e| anyhow!(e.to_string()))?;
                    for &v in q.verts() {
                        out.push_str(&format!("y{} = {:?}\n", v, seed.var(v).exps));
                    }
                }
                _ => bail!("kind must be x, y, or trop"),
            }
            Ok(out)
        }
        _ => bail!(
            "unknown object '{}'; available: loop-schur, cyl-schur, loop-e, geometric-r, quantum-r, kappa, quiver, r-word, mutate",
            object
        ),
    }
}
