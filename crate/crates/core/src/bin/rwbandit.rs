use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::info;

use rwbandit::harness::{
    self, aggregate, oblivious_schedule, reproduce_fig_adv, reproduce_fig_sto, write_curves,
    write_run, Config, FigAdvSettings, FigStoSettings, RunRecord, RunSeed,
};
use rwbandit::lower_bounds::{k_node_bound, k_node_gap, minimax_choice, report_row, KNodeFamily};
use rwbandit::markov::{kappa, ChainFile};
use rwbandit::{builtin, Error};

/// Random-walk bandit simulations.
///
/// CSV output goes to the directory named by RWBANDIT_OUT (default `out`).
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a chain file or builtin instance (fig1, fig1-prime, exp9).
    Validate {
        instance: String,
        /// Bump for fig1 / fig1-prime.
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
    },
    /// Run trajectory-feedback UCB under a stochastic length law.
    RunUcb {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run EXP3 against an oblivious length schedule.
    RunExp3 {
        #[arg(long)]
        config: PathBuf,
    },
    /// Tabulate the two-node and K-node lower-bound quantities.
    LowerboundReport {
        #[arg(long, value_delimiter = ',', default_values_t = [100usize, 1000, 10_000, 100_000])]
        horizons: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [2usize, 4, 8, 16])]
        ks: Vec<usize>,
    },
    /// Rerun one of the nine-node experiments.
    Reproduce {
        #[command(subcommand)]
        which: Figure,
    },
    /// Render a curve CSV as an SVG line chart.
    Plot {
        csv: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "")]
        title: String,
    },
}

#[derive(Subcommand)]
enum Figure {
    FigAdv {
        #[arg(long, default_value_t = FigAdvSettings::default().horizon)]
        horizon: usize,
        #[arg(long, default_value_t = 10)]
        runs: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long, default_value_t = 0.001)]
        eta: f64,
    },
    FigSto {
        #[arg(long, default_value_t = FigStoSettings::default().horizon)]
        horizon: usize,
        #[arg(long, default_value_t = 10)]
        runs: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        /// Multiplier on the UCB confidence width.
        #[arg(long, default_value_t = 1.0)]
        width_scale: f64,
    },
}

fn out_dir() -> rwbandit::Result<PathBuf> {
    let dir = std::env::var_os("RWBANDIT_OUT").map_or_else(|| PathBuf::from("out"), PathBuf::from);
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn create(dir: &Path, name: &str) -> rwbandit::Result<BufWriter<File>> {
    let path = dir.join(name);
    info!("writing {}", path.display());
    Ok(BufWriter::new(File::create(path)?))
}

fn validate(instance: &str, eps: f64) -> rwbandit::Result<()> {
    let (report, allowed) = match instance {
        "fig1" => (builtin::fig1(eps).validate(), false),
        "fig1-prime" => (builtin::fig1_prime(eps).validate(), false),
        "exp9" => (builtin::exp9().validate(), false),
        path => {
            let file = ChainFile::load(path)?;
            (file.validation(), file.non_primitive_allowed)
        }
    };
    println!("K = {}", report.k);
    println!("inf-norm = {} (rho = {})", report.inf_norm, report.rho);
    println!("nonnegative: {}", report.nonnegative);
    println!("norm below rho < 1: {}", report.norm_ok);
    println!(
        "primitive: {}{}",
        report.primitive,
        if allowed { " (not required)" } else { "" }
    );
    let ok = if allowed {
        report.passed_ignoring_primitivity()
    } else {
        report.passed()
    };
    if !ok {
        return Err(Error::InvalidChain(report.failures.join("; ")));
    }
    println!("ok");
    Ok(())
}

fn write_runs(dir: &Path, prefix: &str, runs: &[RunRecord]) -> rwbandit::Result<()> {
    for rec in runs {
        write_run(
            rec,
            create(dir, &format!("{prefix}_run{}.csv", rec.seed.run))?,
        )?;
        info!(
            "{prefix} run {}: final regret {:.4} in {:?}",
            rec.seed.run,
            rec.final_regret(),
            rec.wall_time
        );
    }
    Ok(())
}

fn run_ucb(path: &Path) -> rwbandit::Result<()> {
    let cfg = Config::load(path)?;
    let (chain, process) = cfg.setup()?;
    let seeds = RunSeed::runs(cfg.master_seed, cfg.runs);
    let runs = harness::fan_out(&seeds, |seed| {
        harness::run_stochastic(&mut cfg.ucb(&chain), &chain, &process, cfg.horizon, seed)
    })?;
    let dir = out_dir()?;
    write_runs(&dir, "ucb", &runs)?;
    let regret = aggregate(&runs, |r| Some(r.regret))?;
    let error = aggregate(&runs, |r| r.estimate_error)?;
    write_curves(
        &[("regret", &regret), ("error", &error)],
        create(&dir, "ucb_curves.csv")?,
    )?;
    println!(
        "mean regret at T = {}: {} (std {})",
        cfg.horizon,
        regret.mean_at(cfg.horizon),
        regret.std_at(cfg.horizon)
    );
    Ok(())
}

fn run_exp3(path: &Path) -> rwbandit::Result<()> {
    let cfg = Config::load(path)?;
    let (chain, process) = cfg.setup()?;
    cfg.exp3(&chain)?;
    info!("kappa = {}", kappa(&chain)?);
    let seeds = RunSeed::runs(cfg.master_seed, cfg.runs);
    let runs = harness::fan_out(&seeds, |seed| {
        let schedule = oblivious_schedule(&process, cfg.horizon, seed)?;
        harness::run_adversarial(&mut cfg.exp3(&chain)?, &chain, &schedule, cfg.horizon, seed)
    })?;
    let dir = out_dir()?;
    write_runs(&dir, "exp3", &runs)?;
    let regret = aggregate(&runs, |r| Some(r.regret))?;
    write_curves(&[("regret", &regret)], create(&dir, "exp3_curves.csv")?)?;
    let mut w = csv::Writer::from_writer(create(&dir, "exp3_per_node.csv")?);
    w.write_record(["run", "node", "regret"])?;
    for rec in &runs {
        for (i, r) in rec.regret_per_node.iter().enumerate() {
            w.write_record([rec.seed.run.to_string(), i.to_string(), r.to_string()])?;
        }
    }
    w.flush()?;
    println!(
        "mean best-fixed regret at T = {}: {} (std {})",
        cfg.horizon,
        regret.mean_at(cfg.horizon),
        regret.std_at(cfg.horizon)
    );
    Ok(())
}

fn lowerbound_report(horizons: &[usize], ks: &[usize]) -> rwbandit::Result<()> {
    let dir = out_dir()?;
    let mut w = csv::Writer::from_writer(create(&dir, "lowerbound.csv")?);
    w.write_record([
        "T",
        "eps",
        "gap_exact",
        "gap_leading",
        "step_kl_over_eps2",
        "trajectory_kl_over_eps2",
        "regret_lb",
    ])?;
    for &t in horizons {
        let (eps, _) = minimax_choice(t as f64);
        let row = report_row(eps, t as f64)?;
        w.write_record([
            t.to_string(),
            row.eps.to_string(),
            row.gap_exact.to_string(),
            row.gap_leading.to_string(),
            row.step_kl_ratio.to_string(),
            row.trajectory_kl_ratio.to_string(),
            row.regret_lb.to_string(),
        ])?;
        println!(
            "T = {t}: eps = {:.6}, lower bound {:.4}",
            row.eps, row.regret_lb
        );
    }
    w.flush()?;
    let mut w = csv::Writer::from_writer(create(&dir, "lowerbound_knode.csv")?);
    w.write_record(["K", "T", "eps", "gap", "bound"])?;
    for &k in ks {
        for &t in horizons {
            let family = KNodeFamily::new(k, t)?;
            w.write_record([
                k.to_string(),
                t.to_string(),
                family.eps.to_string(),
                k_node_gap(&family, 0)?.to_string(),
                k_node_bound(k, t).to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn reproduce(which: Figure) -> rwbandit::Result<()> {
    let dir = out_dir()?;
    match which {
        Figure::FigAdv {
            horizon,
            runs,
            seed,
            eta,
        } => {
            let fig = reproduce_fig_adv(&FigAdvSettings {
                horizon,
                runs,
                master_seed: seed,
                eta,
            })?;
            write_curves(
                &[("trajectory", &fig.trajectory), ("standard", &fig.standard)],
                create(&dir, "fig_adv.csv")?,
            )?;
            println!(
                "T = {horizon}: trajectory estimator {:.3} +- {:.3}, standard {:.3} +- {:.3}",
                fig.trajectory.mean_at(horizon),
                fig.trajectory.std_at(horizon),
                fig.standard.mean_at(horizon),
                fig.standard.std_at(horizon)
            );
        }
        Figure::FigSto {
            horizon,
            runs,
            seed,
            width_scale,
        } => {
            let fig = reproduce_fig_sto(&FigStoSettings {
                horizon,
                runs,
                master_seed: seed,
                width_scale,
            })?;
            write_curves(
                &[("regret", &fig.regret), ("error", &fig.error)],
                create(&dir, "fig_sto.csv")?,
            )?;
            println!(
                "T = {horizon}: regret {:.3} +- {:.3}, estimate error {:.4}",
                fig.regret.mean_at(horizon),
                fig.regret.std_at(horizon),
                fig.error.mean_at(horizon)
            );
        }
    }
    Ok(())
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidChain(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Validate { instance, eps } => validate(&instance, eps),
        Cmd::RunUcb { config } => run_ucb(&config),
        Cmd::RunExp3 { config } => run_exp3(&config),
        Cmd::LowerboundReport { horizons, ks } => lowerbound_report(&horizons, &ks),
        Cmd::Reproduce { which } => reproduce(which),
        Cmd::Plot { csv, out, title } => {
            let out = out.unwrap_or_else(|| csv.with_extension("svg"));
            harness::plot_csv(&csv, &out, &title)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
