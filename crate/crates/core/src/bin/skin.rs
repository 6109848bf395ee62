use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use skin_core::kinetic::{CouplingConstant, PlasmaParams};
use skin_core::neumann::{field_profile, grid_spec_for, solve_direct, KernelMatrix, NeumannSeries};
use skin_core::quadrature::build_grid;
use skin_core::reference::{impedance_diffuse, impedance_specular};
use skin_core::sweep::{emit_csv, run_sweep, SweepConfig, OUTPUT_DIR_ENV};
use skin_core::Complex64;

/// Speed of light in cm/s.
const C_CGS: f64 = 2.997_924_58e10;

#[derive(Parser)]
#[command(
    name = "skin",
    version,
    about = "Surface impedance of a plasma half-space with partially diffuse reflection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Log-spaced alpha sweep written as CSV.
    Sweep(SweepArgs),
    /// Series terms, direct solve and references at a single point.
    Point(PointArgs),
    /// Field profile e(x) written as CSV.
    Profile(ProfileArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// JSON file with sweep settings; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alpha_min: Option<f64>,
    #[arg(long)]
    alpha_max: Option<f64>,
    #[arg(long)]
    alpha_count: Option<usize>,
    #[arg(long)]
    omega_ratio: Option<f64>,
    /// Specularity values, comma separated.
    #[arg(long, value_delimiter = ',')]
    q: Option<Vec<f64>>,
    /// Highest series order written.
    #[arg(long)]
    orders: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PointArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    omega_ratio: f64,
    #[arg(long, default_value_t = 0.0)]
    q: f64,
    #[arg(long, default_value_t = 2)]
    orders: usize,
    /// Use the unnormalized coupling constant 2/(i pi sqrt(pi)).
    #[arg(long)]
    unnormalized: bool,
    /// Also report Z in cgs units (s/cm); needs --omega, --nu and --mfp.
    #[arg(long, requires_all = ["omega", "nu", "mfp"])]
    physical: bool,
    /// Angular frequency in 1/s.
    #[arg(long)]
    omega: Option<f64>,
    /// Collision frequency in 1/s.
    #[arg(long)]
    nu: Option<f64>,
    /// Mean free path in cm.
    #[arg(long)]
    mfp: Option<f64>,
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    omega_ratio: f64,
    #[arg(long, default_value_t = 0.0)]
    q: f64,
    /// Largest depth in mean free paths.
    #[arg(long, default_value_t = 10.0)]
    x_max: f64,
    #[arg(long, default_value_t = 101)]
    x_count: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn complex_json(z: Complex64) -> serde_json::Value {
    json!([z.re, z.im])
}

fn sweep(args: SweepArgs) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let mut config = match &args.config {
        Some(path) => SweepConfig::from_file(path)?,
        None => SweepConfig::default(),
    };
    if let Some(v) = args.alpha_min {
        config.alpha_min = v;
    }
    if let Some(v) = args.alpha_max {
        config.alpha_max = v;
    }
    if let Some(v) = args.alpha_count {
        config.alpha_count = v;
    }
    if let Some(v) = args.omega_ratio {
        config.omega_over_nu = v;
    }
    if let Some(v) = args.q {
        config.q_values = v;
    }
    if let Some(v) = args.orders {
        config.max_order = v;
    }
    if let Some(v) = args.tol {
        config.tolerance = v;
    }
    if let Some(v) = args.out {
        config.output_path = Some(v);
    }
    config.validate()?;
    let rows = run_sweep(&config)?;
    let path = config.resolved_output();
    emit_csv(&rows, &path)?;
    let bad = rows.iter().filter(|r| !r.status.is_ok()).count();
    eprintln!("wrote {} rows to {} ({} not ok)", rows.len(), path.display(), bad);
    Ok(if bad == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn point(args: PointArgs) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let params = PlasmaParams::new(args.omega_ratio, args.alpha, args.q)?;
    let coupling = if args.unnormalized {
        CouplingConstant::Unnormalized
    } else {
        CouplingConstant::Derived
    };
    let grid = build_grid(&grid_spec_for(&params))?;
    let kernel = KernelMatrix::build(grid, params, coupling, skin_core::parallel::Execution::best_available())?;
    let series = NeumannSeries::new(&kernel, args.orders)?.impedance(args.q);
    let direct = solve_direct(&kernel, args.q)?;
    let zeta_ref = impedance_specular(&params)?;
    let zeta_dif = impedance_diffuse(&params)?;
    let mut report = json!({
        "alpha": args.alpha,
        "omega_over_nu": args.omega_ratio,
        "q": args.q,
        "grid_nodes": kernel.len(),
        "terms": series.terms().iter().copied().map(complex_json).collect::<Vec<_>>(),
        "partial_sums": series.partial_sums().iter().copied().map(complex_json).collect::<Vec<_>>(),
        "tail_estimate": series.tail_estimate(),
        "diverging": series.is_diverging(),
        "direct": complex_json(direct.impedance()),
        "condition": direct.condition(),
        "zeta_ref": complex_json(zeta_ref),
        "zeta_dif": complex_json(zeta_dif),
        "resistance_ratio_dif_ref": zeta_dif.im / zeta_ref.im,
        "reactance_ratio_dif_ref": zeta_dif.re / zeta_ref.re,
    });
    if args.physical {
        let (omega, nu, mfp) = (args.omega.unwrap(), args.nu.unwrap(), args.mfp.unwrap());
        if ((omega / nu) - args.omega_ratio).abs() > 1e-9 * args.omega_ratio.max(1.0) {
            eprintln!(
                "note: omega/nu = {} differs from --omega-ratio {}",
                omega / nu,
                args.omega_ratio
            );
        }
        let prefactor = Complex64::new(0.0, 4.0 * omega * mfp / (C_CGS * C_CGS));
        report["physical"] = json!({
            "series": complex_json(prefactor * series.total()),
            "direct": complex_json(prefactor * direct.impedance()),
            "specular": complex_json(prefactor * zeta_ref),
            "diffuse": complex_json(prefactor * zeta_dif),
        });
    }
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(ExitCode::SUCCESS)
}

fn profile(args: ProfileArgs) -> Result<ExitCode, Box<dyn std::error::Error>> {
    if args.x_count < 2 || args.x_max.is_nan() || args.x_max <= 0.0 {
        return Err("need x_count >= 2 and x_max > 0".into());
    }
    let params = PlasmaParams::new(args.omega_ratio, args.alpha, args.q)?;
    let grid = build_grid(&grid_spec_for(&params))?;
    let kernel = KernelMatrix::new(grid, params)?;
    let solution = solve_direct(&kernel, args.q)?;
    let xs: Vec<f64> = (0..args.x_count)
        .map(|i| args.x_max * i as f64 / (args.x_count - 1) as f64)
        .collect();
    let prof = field_profile(solution.spectrum(), &xs, args.tol)?;
    let path = args.out.unwrap_or_else(|| {
        std::env::var_os(OUTPUT_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_default()
            .join("profile.csv")
    });
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["x", "re_e", "im_e", "abs_e", "error"])?;
    for ((x, e), err) in prof.x_nodes().iter().zip(prof.e_values()).zip(prof.errors()) {
        w.write_record([x, &e.re, &e.im, &e.norm(), err].map(|v| format!("{v:.11e}")))?;
    }
    w.flush()?;
    eprintln!("wrote {} depths to {}", xs.len(), path.display());
    Ok(if prof.is_accurate() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sweep(a) => sweep(a),
        Command::Point(a) => point(a),
        Command::Profile(a) => profile(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
