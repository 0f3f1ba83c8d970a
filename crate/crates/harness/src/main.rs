use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Arg, ArgAction, ArgMatches, Command};
use seqec_harness::config::{ExperimentConfig, KEYS};
use seqec_harness::experiments::{compare, forgetting, format_summaries, summarize, sweep_memory};
use seqec_harness::plot::emit_plots;
use seqec_harness::run_experiment;
use seqec_harness::stats::Metric;

fn experiment_command(name: &'static str, about: &'static str) -> Command {
    let mut cmd = Command::new(name)
        .about(about)
        .arg(Arg::new("config").long("config").value_name("FILE").help("key = value file applied before flags"));
    for &(key, help) in KEYS {
        cmd = cmd.arg(Arg::new(key).long(key).value_name("VALUE").help(help));
    }
    cmd
}

fn cli() -> Command {
    Command::new("seqec")
        .about("Episodic control experiments on the double T-maze")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .subcommand(experiment_command("run", "Run one agent configuration"))
        .subcommand(experiment_command("compare", "Run SEC, NSEC and MFEC on the same seeds"))
        .subcommand(experiment_command("sweep", "Run SEC and NSEC over a grid of memory capacities"))
        .subcommand(experiment_command("forgetting", "Compare Fixed and Fifo retention for SEC and NSEC"))
        .subcommand(
            Command::new("plot")
                .about("Render metrics CSV files as SVG charts")
                .arg(Arg::new("csv").required(true).num_args(1..).value_parser(clap::value_parser!(PathBuf)))
                .arg(Arg::new("out").long("out").default_value("plots").value_parser(clap::value_parser!(PathBuf)))
                .arg(Arg::new("window").long("window").default_value("50").value_parser(clap::value_parser!(usize)))
                .arg(
                    Arg::new("metrics")
                        .long("metrics")
                        .default_value("reward,steps,entropy")
                        .help("comma-separated subset of reward, steps, entropy"),
                )
                .arg(Arg::new("quiet").long("quiet").action(ArgAction::SetTrue)),
        )
}

fn load_config(m: &ArgMatches) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    if let Some(path) = m.get_one::<String>("config") {
        cfg.apply_file(path.as_ref())?;
    }
    for &(key, _) in KEYS {
        if let Some(value) = m.get_one::<String>(key) {
            cfg.set(key, value)?;
        }
    }
    cfg.validate()?;
    cfg.load_map()?;
    Ok(cfg)
}

fn parse_metrics(list: &str) -> Result<Vec<Metric>> {
    list.split(',')
        .map(|m| match m.trim() {
            "reward" => Ok(Metric::Reward),
            "steps" => Ok(Metric::Steps),
            "entropy" => Ok(Metric::Entropy),
            other => anyhow::bail!("unknown metric '{other}'"),
        })
        .collect()
}

fn report(files: &[PathBuf]) {
    for f in files {
        println!("wrote {}", f.display());
    }
}

fn main() -> Result<()> {
    let matches = cli().get_matches();
    match matches.subcommand() {
        Some(("run", m)) => {
            let cfg = load_config(m)?;
            let label = format!("run_{}_{}_{}", cfg.agent, cfg.ec_capacity, cfg.retention);
            let out = run_experiment(&cfg, &label).context("run failed")?;
            print!("{}", format_summaries(&[summarize(&cfg, &label, &out.rows())]));
            report(&[out.csv]);
        }
        Some(("compare", m)) => {
            let cfg = load_config(m)?;
            let r = compare(&cfg).context("compare failed")?;
            print!("{}", format_summaries(&r.summaries));
            report(&r.files);
        }
        Some(("sweep", m)) => {
            let cfg = load_config(m)?;
            let r = sweep_memory(&cfg, &cfg.capacities).context("sweep failed")?;
            print!("{}", format_summaries(&r.summaries));
            print!("{}", r.ratio.to_csv());
            report(&r.files);
        }
        Some(("forgetting", m)) => {
            let cfg = load_config(m)?;
            let r = forgetting(&cfg).context("forgetting failed")?;
            print!("{}", format_summaries(&r.summaries));
            report(&r.files);
        }
        Some(("plot", m)) => {
            let csv: Vec<PathBuf> = m.get_many::<PathBuf>("csv").unwrap().cloned().collect();
            let out = m.get_one::<PathBuf>("out").unwrap();
            let window = *m.get_one::<usize>("window").unwrap();
            let metrics = parse_metrics(m.get_one::<String>("metrics").unwrap())?;
            let files = emit_plots(&csv, out, window, &metrics)?;
            if !m.get_flag("quiet") {
                report(&files);
            }
        }
        _ => unreachable!("subcommand required"),
    }
    Ok(())
}
