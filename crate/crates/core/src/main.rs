use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bspci::run::{
    format_convergence, run_convergence, run_solve, run_zscan, write_convergence, write_solve, write_zscan,
    RunConfig,
};
use bspci::{selftest, Error};

const EXIT_CONFIG: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_PARTIAL: u8 = 3;

#[derive(Parser)]
#[command(name = "bspci", version, about = "B-spline CI for helium-like atoms: energies and entanglement entropies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one state and report its energy and entropies.
    Solve(Common),
    /// Entropy convergence table over l_max and n_max.
    Converge(Common),
    /// Scan the nuclear charge for the requested states.
    Zscan(Common),
    /// Run the oracle suites.
    Selftest,
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    z: Option<f64>,
    /// 1s2, 1s2s-1S, 1s2s-3S, 1s3s-1S or 1s3s-3S.
    #[arg(long)]
    state: Option<String>,
    #[arg(long)]
    lmax: Option<u32>,
    #[arg(long)]
    nmax: Option<u32>,
    /// Box radius in bohr, or `auto`.
    #[arg(long)]
    rmax: Option<String>,
    /// Spline order.
    #[arg(long)]
    order: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv, json or svg; repeatable.
    #[arg(long = "format")]
    formats: Vec<String>,
    #[arg(long)]
    threads: Option<usize>,
    /// Any other config key, as KEY=VALUE; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig, Error> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        let mut set = |k: &str, v: String| cfg.set(k, &v);
        if let Some(z) = self.z {
            set("z", z.to_string())?;
        }
        if let Some(s) = &self.state {
            set("state", s.clone())?;
        }
        if let Some(l) = self.lmax {
            set("lmax", l.to_string())?;
        }
        if let Some(n) = self.nmax {
            set("nmax", n.to_string())?;
        }
        if let Some(r) = &self.rmax {
            set("rmax", r.clone())?;
        }
        if let Some(k) = self.order {
            set("order", k.to_string())?;
        }
        if let Some(o) = &self.out {
            set("out", o.display().to_string())?;
        }
        if !self.formats.is_empty() {
            set("format", self.formats.join(","))?;
        }
        if let Some(t) = self.threads {
            set("threads", t.to_string())?;
        }
        for kv in &self.sets {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got `{kv}`")))?;
            set(k.trim(), v.trim().to_string())?;
        }
        cfg.validate()?;
        if let Some(n) = cfg.threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| Error::Config(format!("cannot set up {n} threads: {e}")))?;
        }
        Ok(cfg)
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if e.is_config_error() { EXIT_CONFIG } else { EXIT_NUMERICAL })
}

fn list_outputs(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn solve(args: &Common) -> Result<ExitCode, Error> {
    let cfg = args.resolve()?;
    let rep = run_solve(&cfg)?;
    let (b, r) = (&rep.basis, &rep.result);
    println!(
        "Z = {}  state {}  l_max = {}  n_max = {}  N = {}  k = {}  R = {}",
        b.z, r.state, b.l_max, b.n_max, b.n_splines, b.order, b.r_max
    );
    println!("configurations  {}", r.dimension);
    println!("energy          {:.10}", r.energy);
    println!("S_L             {:.7}", r.entropies.linear);
    println!("S_vN            {:.7}", r.entropies.von_neumann);
    println!("xi (S_z = 0)    {:.7}", r.entropies.xi);
    println!(
        "root {}  weight on {}: {:.4}  dominant {} ({:.4})",
        r.root,
        r.state.configuration(),
        r.target_weight,
        r.dominant,
        r.dominant_weight
    );
    for w in &rep.diagnostics.warnings {
        eprintln!("warning: {w}");
    }
    list_outputs(&write_solve(&rep)?);
    Ok(ExitCode::SUCCESS)
}

fn converge(args: &Common) -> Result<ExitCode, Error> {
    let cfg = args.resolve()?;
    let table = run_convergence(&cfg)?;
    println!("{} at Z = {}", cfg.state, cfg.z);
    println!("linear entropy\n{}", format_convergence(&table, |r| r.s_linear));
    println!("von Neumann entropy\n{}", format_convergence(&table, |r| r.s_von_neumann));
    println!("energy\n{}", format_convergence(&table, |r| r.energy));
    list_outputs(&write_convergence(&table)?);
    Ok(ExitCode::SUCCESS)
}

fn zscan(args: &Common) -> Result<ExitCode, Error> {
    let cfg = args.resolve()?;
    let scan = run_zscan(&cfg)?;
    println!(
        "{:>7} {:>8} {:<9} {:>15} {:>10} {:>10} {:>7}",
        "Z", "1/Z", "state", "energy", "S_L", "S_vN", "R"
    );
    for r in &scan.rows {
        if r.error.is_empty() {
            println!(
                "{:>7} {:>8.4} {:<9} {:>15.8} {:>10.6} {:>10.6} {:>7}{}",
                r.z,
                r.inv_z,
                r.state,
                r.energy.unwrap_or(f64::NAN),
                r.s_linear.unwrap_or(f64::NAN),
                r.s_von_neumann.unwrap_or(f64::NAN),
                r.r_max,
                if r.box_converged { "" } else { "  (box not converged)" }
            );
        } else {
            println!("{:>7} {:>8.4} {:<9} failed: {}", r.z, r.inv_z, r.state, r.error);
        }
    }
    list_outputs(&write_zscan(&scan)?);
    let failed = scan.failures();
    if failed > 0 {
        eprintln!("{failed} of {} rows failed", scan.rows.len());
        return Ok(ExitCode::from(EXIT_PARTIAL));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let res = match &cli.command {
        Command::Solve(a) => solve(a),
        Command::Converge(a) => converge(a),
        Command::Zscan(a) => zscan(a),
        Command::Selftest => {
            let checks = selftest::run_all();
            for c in &checks {
                println!("{c}");
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            println!("{} of {} suites passed", checks.len() - failed, checks.len());
            Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(EXIT_NUMERICAL) })
        }
    };
    res.unwrap_or_else(|e| fail(&e))
}
