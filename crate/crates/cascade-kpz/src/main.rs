//! Thin command-line front end; all logic lives in the library.

use std::path::PathBuf;
use std::process::ExitCode;

use cascade_kpz::{runner, ExperimentConfig};

const USAGE: &str = "\
cascade-kpz — multiplicative-cascade measures, dimension estimation, KPZ experiments

USAGE:
    cascade-kpz <COMMAND> [--flag value]...
    cascade-kpz replay <provenance.json> [--out DIR] [--threads N]

COMMANDS:
    validate      check a weight model against the cascade hypotheses
    mass-stats    total-mass martingale statistics over seeds
    dimension     partition-function dimension estimate for a set
    energy        dyadic-ball energy growth profiles
    kpz           end-to-end KPZ relation experiment (predicted vs measured)
    bound-check   per-ball moment bound E[mu(B)^s] <= |B|^phi(s)
    replay        re-run a provenance.json bit-identically

FLAGS:
    --d N                 spatial dimension (1..=4, default 2)
    --weight SPEC         lognormal(sigma2=0.5) | twopoint(a=0.5,b=1.5,p=0.5)
    --set SPEC            fullcube | cantor(keep=[0,3]) | slice(axis=1,coord=0.5)
                          | singleton(0.3,0.7) | union(...)
    --n-min N --n-max N   depth range (default 4..12; 4..16 when d=1)
    --depth N             single depth for mass-stats / bound-check
    --s-grid SPEC         0:1:0.05 or comma list (default 0:1:0.05)
    --seeds N             seed count / Monte Carlo trials (default 20)
    --master-seed N       master seed recorded in artifacts (default 42)
    --tail RULE           mean_one | extended(q)   (default mean_one)
    --threads N           thread budget hint (env CASCADE_KPZ_THREADS)
    --out DIR             output directory (default ./out)
    --tolerance X         pass/fail tolerance (default 0.05)
    --points N            energy sample count (default 2000)
    --config FILE         key = value config file; flags override

OUTPUT: report.json, provenance.json, and per-command CSV tables in --out.
EXIT CODES: 0 pass, 1 error, 2 tolerance or validity failure.
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() || args[0] == "--help" || args[0] == "-h" || args[0] == "help" {
        print!("{USAGE}");
        return ExitCode::SUCCESS;
    }
    if args[0] == "--version" || args[0] == "version" {
        println!(
            "cascade-kpz {} (hash {})",
            cascade_kpz::TOOL_VERSION,
            cascade_kpz::rng::HASH_VERSION
        );
        return ExitCode::SUCCESS;
    }

    let outcome = if args[0] == "replay" {
        if args.len() < 2 {
            eprintln!("error: replay needs a provenance.json path");
            return ExitCode::from(1);
        }
        let mut out = None;
        let mut threads = None;
        let mut i = 2;
        while i < args.len() {
            if args[i] == "--out" && i + 1 < args.len() {
                out = Some(PathBuf::from(&args[i + 1]));
                i += 2;
            } else if args[i] == "--threads" && i + 1 < args.len() {
                match args[i + 1].parse() {
                    Ok(t) => threads = Some(t),
                    Err(_) => {
                        eprintln!("error: --threads needs an integer");
                        return ExitCode::from(1);
                    }
                }
                i += 2;
            } else {
                eprintln!("error: unexpected argument `{}`", args[i]);
                return ExitCode::from(1);
            }
        }
        runner::replay(std::path::Path::new(&args[1]), out, threads)
    } else {
        ExperimentConfig::parse_args(&args).and_then(|config| runner::run(&config))
    };

    match outcome {
        Ok(run) => {
            println!("{}", run.summary);
            for artifact in &run.artifacts {
                println!("wrote {}", artifact.display());
            }
            ExitCode::from(run.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
