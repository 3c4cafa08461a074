use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};

use wplab::error::Error;
use wplab::field::grid::Grid;
use wplab::field::snapshot::write_snapshot;
use wplab::fractal::cubes::CubeFamily;
use wplab::fractal::density::fractal_density;
use wplab::propagator::solve_spacetime;
use wplab::wavepacket::{decompose, export_packet_family, orthogonality_constant};
use wplab::xcheck::{
    build_cube_family, emit_report, fit_growth_exponent, run_experiment, Config, ExperimentKind,
    ExperimentOpts, FamilyKind, RatioTable, ReportFormat, Scenario, ScenarioKind,
};

/// Numerical toolkit for band-limited Schrödinger evolution and dyadic-scale
/// inequality measurements.
#[derive(Parser)]
#[command(name = "wplab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a scenario datum over B^{n+1}(0, R) and write a binary field
    /// snapshot.
    Propagate {
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 32.0)]
        r: f64,
        #[arg(long, default_value = "random_band")]
        scenario: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Wave-packet decomposition of a scenario datum; writes JSON-lines plus
    /// a coefficient blob and prints the verified properties.
    Decompose {
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 64.0)]
        r: f64,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, default_value = "random_band")]
        scenario: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Measure one inequality as a ratio table across dyadic scales.
    RatioScan {
        #[arg(long)]
        experiment: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 32.0)]
        rmin: f64,
        #[arg(long, default_value_t = 256.0)]
        rmax: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        family: Option<String>,
        #[arg(long, default_value = "random_band")]
        scenario: String,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        k: Option<f64>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Report the fractal density of a cube family (from a file or a
    /// generated kind).
    FractalScan {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 64.0)]
        r: f64,
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convert a stored JSON ratio table to CSV or JSON.
    Report {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::init();
    if let Ok(threads) = std::env::var("WPLAB_THREADS") {
        if let Ok(t) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Precondition(_) | Error::Parse(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn dyadic_scales(rmin: f64, rmax: f64) -> Result<Vec<f64>, Error> {
    if !(rmin >= 4.0 && rmax >= rmin) {
        return Err(Error::config("need 4 <= rmin <= rmax"));
    }
    let mut rs = Vec::new();
    let mut r = rmin;
    while r <= rmax * (1.0 + 1e-9) {
        rs.push(r);
        r *= 2.0;
    }
    Ok(rs)
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Propagate { n, r, scenario, seed, out } => {
            let kind = ScenarioKind::parse(&scenario)?;
            let grid = Arc::new(Grid::for_ball(n, r, 1.0)?);
            let datum = Scenario::new(kind, n, seed).build(grid, r)?;
            let field = solve_spacetime(&datum, r)?;
            if !field.all_finite() {
                return Err(Error::invariant("non-finite field values"));
            }
            let file = std::fs::File::create(&out)?;
            write_snapshot(&field, std::io::BufWriter::new(file))?;
            println!(
                "wrote snapshot: n={n} R={r} grid {}x{} samples to {}",
                field.grid.spatial_len(),
                field.grid.nt,
                out.display()
            );
            Ok(())
        }
        Command::Decompose { n, r, rho, scenario, seed, out } => {
            let kind = ScenarioKind::parse(&scenario)?;
            let grid = Arc::new(Grid::for_ball(n, r, 1.0)?);
            let built = Scenario::new(kind, n, seed).build(grid.clone(), r)?;
            // The decomposition wants supp f_hat in B(0, 1/2); clip the
            // scenario datum to that band.
            let mut datum = wplab::field::Datum::new(grid.clone());
            for (k, a) in built.iter() {
                if wplab::field::grid::norm_n(&grid.xi_of(*k), n) <= 0.5 {
                    datum.add_coeff(*k, *a)?;
                }
            }
            let rho = rho.unwrap_or(r);
            let family = decompose(&datum, rho)?;
            let recon = family.reconstruct()?;
            let err = if datum.l2_norm() > 0.0 {
                recon.l2_distance(&datum) / datum.l2_norm()
            } else {
                0.0
            };
            let keys: Vec<_> = family.keys().cloned().collect();
            let orth = orthogonality_constant(&family, &[keys])?;
            let blob = out.with_extension("bin");
            export_packet_family(&family, &out, &blob)?;
            println!(
                "tubes={} reconstruction_rel_err={:.3e} subset_ratio={:.3} mass_ratio={:.3}",
                family.len(),
                err,
                orth.max_subset_ratio,
                orth.mass_ratio
            );
            if err > 1e-8 {
                return Err(Error::invariant(format!("reconstruction error {err} > 1e-8")));
            }
            Ok(())
        }
        Command::RatioScan {
            experiment,
            n,
            rmin,
            rmax,
            seed,
            out,
            family,
            scenario,
            alpha,
            k,
            config,
        } => {
            let cfg = match config {
                Some(p) => Config::load(&p)?,
                None => Config::default(),
            };
            let kind = ExperimentKind::parse(&experiment)?;
            let sc_kind = ScenarioKind::parse(&scenario)?;
            let family_kind = family.as_deref().map(FamilyKind::parse).transpose()?;
            let mut opts = ExperimentOpts::default();
            if let Some(a) = alpha.or(cfg.get_f64("alpha")?) {
                opts.alpha = a;
            }
            if let Some(kk) = k.or(cfg.get_f64("k")?) {
                opts.k = kk;
            }
            if let Some(m) = cfg.get_f64("m")? {
                opts.m = m;
            }
            let rs = dyadic_scales(rmin, rmax)?;
            let sc = Scenario::new(sc_kind, n, seed);
            let table = run_experiment(kind, &sc, family_kind, &rs, &opts)?;
            let format = if out.extension().map(|e| e == "json").unwrap_or(false) {
                ReportFormat::Json
            } else {
                ReportFormat::Csv
            };
            emit_report(&table, format, &out)?;
            if table.rows.len() >= 3 {
                let fit = fit_growth_exponent(&table)?;
                println!(
                    "{}: {} rows, ratio slope {:.4} (residual {:.3e}) -> {}",
                    table.kind,
                    table.rows.len(),
                    fit.slope,
                    fit.residual,
                    out.display()
                );
            } else {
                println!("{}: {} rows -> {}", table.kind, table.rows.len(), out.display());
            }
            Ok(())
        }
        Command::FractalScan { family, alpha, n, r, m, seed, out } => {
            let fam: CubeFamily = if std::path::Path::new(&family).exists() {
                let file = std::fs::File::open(&family)?;
                CubeFamily::read_text(std::io::BufReader::new(file))?
            } else {
                let kind = FamilyKind::parse(&family)?;
                let f = build_cube_family(kind, n, r, m, seed)?;
                if kind == FamilyKind::Graph && !f.vertical_line_test() {
                    return Err(Error::invariant("graph family failed the vertical line test"));
                }
                f
            };
            let rep = fractal_density(&fam, alpha)?;
            println!(
                "cubes={} M={} Delta_alpha({}) = {:.6} witness_r={} witness_count={} vlt={}",
                fam.len(),
                fam.m,
                alpha,
                rep.value,
                rep.witness_radius,
                rep.witness_count,
                fam.vertical_line_test()
            );
            if let Some(path) = out {
                let mut table = RatioTable {
                    kind: "fractal_density".into(),
                    rows: vec![],
                    metadata: Default::default(),
                };
                table.push(fam.r, rep.value, 1.0);
                emit_report(&table, ReportFormat::Csv, &path)?;
            }
            Ok(())
        }
        Command::Report { input, format, out } => {
            let text = std::fs::read_to_string(&input)?;
            let table = wplab::xcheck::report::parse_json(&text)?;
            let fmt = ReportFormat::parse(&format)?;
            emit_report(&table, fmt, &out)?;
            println!("{} rows -> {}", table.rows.len(), out.display());
            Ok(())
        }
    }
}
