use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use nalgebra::Matrix3;

use nv_cycle::cli::config::{range, RunConfig};
use nv_cycle::cli::sweep::{self, num, run_sweep, CYCLE_COLUMNS, RATE_COLUMNS};
use nv_cycle::cycle::MwTarget;
use nv_cycle::frames::{
    compose_mixture, decompose_symmetry, direction_vector, to_local, Frame, NvOrientation,
    StressTensor,
};
use nv_cycle::vibronic::Term;
use nv_cycle::{Error, Result};

/// Exit status for usage errors (sysexits EX_USAGE).
const EXIT_USAGE: u8 = 64;
const EXIT_POINT_FAILED: u8 = 2;

#[derive(Parser)]
#[command(
    name = "nv-cycle",
    version,
    about = "NV center optical cycle under stress"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Run configuration (TOML); defaults apply when omitted.
    #[arg(long, short, alias = "pjt")]
    config: Option<PathBuf>,
    /// Hydrostatic fraction of the loading, in [0, 1].
    #[arg(long)]
    alpha: Option<f64>,
    /// Loading in GPa: a comma list or `start:stop:step`.
    #[arg(long)]
    loading: Option<String>,
    /// Microwave line: `minus` or `plus`.
    #[arg(long)]
    mw_target: Option<String>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Evaluate points one after another.
    #[arg(long)]
    serial: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Crystal → local stress transform and symmetry split.
    TransformStress {
        #[command(flatten)]
        common: Common,
        /// NV axis, e.g. `111` or `-1-11`.
        #[arg(long)]
        orientation: Option<String>,
        /// `hydro:P`, `uniaxial:DIR:P`, `mix:ALPHA:DIR:P` or six components
        /// `xx,yy,zz,xy,xz,yz` (crystal frame, GPa).
        #[arg(long, allow_hyphen_values = true)]
        tensor: Option<String>,
    },
    /// Π components, gaps and SOC matrix elements.
    Couplings {
        #[command(flatten)]
        common: Common,
    },
    /// Singlet vibronic spectrum at the first loading point.
    Vibronic {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10)]
        states: usize,
    },
    /// Rate table.
    Rates {
        #[command(flatten)]
        common: Common,
    },
    /// Full pipeline with ODMR contrast.
    Contrast {
        #[command(flatten)]
        common: Common,
    },
    /// Batch run writing rates.csv, contrast.csv and populations_<P>.csv.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
}

fn parse_loading(s: &str) -> Result<Vec<f64>> {
    let bad = |_| Error::Config(format!("--loading: cannot read {s:?}"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let v: Vec<f64> = parts
            .iter()
            .map(|p| p.trim().parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(bad)?;
        return range(v[0], v[1], v[2]);
    }
    s.split(',')
        .map(|p| p.trim().parse().map_err(bad))
        .collect()
}

fn load_config(c: &Common) -> Result<RunConfig> {
    let mut cfg = match &c.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(a) = c.alpha {
        cfg.stress.set_alpha(a)?;
    }
    if let Some(l) = &c.loading {
        cfg.stress.points = parse_loading(l)?;
    }
    if let Some(t) = &c.mw_target {
        cfg.drive.mw_target = t.parse::<MwTarget>()?;
    }
    if let Some(d) = &c.out_dir {
        cfg.output.dir = d.clone();
    }
    if c.serial {
        cfg.output.parallel = false;
    }
    Ok(cfg)
}

fn parse_tensor(s: &str) -> Result<StressTensor> {
    let bad = || Error::Config(format!("--tensor: cannot read {s:?}"));
    let f = |x: &str| x.trim().parse::<f64>().map_err(|_| bad());
    let dir = |x: &str| direction_vector(x).map_err(Error::Config);
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["hydro", p] => Ok(StressTensor::hydrostatic(f(p)?, Frame::Crystal)),
        ["uniaxial", d, p] => Ok(StressTensor::uniaxial(dir(d)?, f(p)?, Frame::Crystal)),
        ["mix", a, d, p] => compose_mixture(f(a)?, f(p)?, dir(d)?),
        [comps] => {
            let v: Vec<f64> = comps.split(',').map(f).collect::<Result<_>>()?;
            let c: [f64; 6] = v.try_into().map_err(|_| bad())?;
            Ok(StressTensor::new(c, Frame::Crystal))
        }
        _ => Err(bad()),
    }
}

/// Rounding residue below 1e-12 GPa prints as zero.
fn print_matrix(label: &str, m: &Matrix3<f64>) {
    let m = m.map(|v| if v.abs() < 1e-12 { 0.0 } else { v });
    println!("{label}");
    for i in 0..3 {
        let row: Vec<String> = (0..3).map(|j| format!("{:>16}", num(m[(i, j)]))).collect();
        println!("  {}", row.join(" "));
    }
}

fn transform_stress(c: &Common, orientation: Option<&str>, tensor: Option<&str>) -> Result<u8> {
    let cfg = load_config(c)?;
    let orientation: NvOrientation = match orientation {
        Some(o) => o.parse()?,
        None => cfg.stress.orientation,
    };
    let tensors: Vec<(String, StressTensor)> = match tensor {
        Some(t) => vec![(t.to_string(), parse_tensor(t)?)],
        None => cfg
            .stress
            .points
            .iter()
            .map(|&p| Ok((format!("{p} GPa"), cfg.stress.tensor_at(p)?)))
            .collect::<Result<_>>()?,
    };
    for (label, t) in tensors {
        let local = match t.frame() {
            Frame::Local => t,
            Frame::Crystal => to_local(&t, orientation)?,
        };
        let d = decompose_symmetry(&local)?;
        println!("# {label}, NV axis [{orientation}]");
        if t.frame() == Frame::Crystal {
            print_matrix("crystal", &t.to_matrix());
        }
        print_matrix("local", &local.to_matrix());
        print_matrix("preserving", &d.preserving.to_matrix());
        print_matrix("breaking", &d.breaking.to_matrix());
    }
    Ok(0)
}

fn couplings(c: &Common) -> Result<u8> {
    let cfg = load_config(c)?;
    let model = cfg.model()?;
    println!(
        "stress_GPa,alpha,pi3e_z_GHz,pi3e_x_GHz,pi3e_y_GHz,pi1e_z_GHz,pi1e_x_GHz,pi1e_y_GHz,\
delta_x_eV,delta_y_eV,sigma_x_eV,sigma_y_eV,lambda_eV,zpl_x_eV,zpl_y_eV,lambda_z_GHz,\
lambda_perp_x_GHz,lambda_perp_y_GHz,lambda_perp_l_x_GHz,lambda_perp_l_y_GHz,lambda_prime_GHz,\
lambda_z_prime_GHz"
    );
    for &p in &cfg.stress.points {
        let s = model.state(&cfg.stress.tensor_at(p)?)?;
        let (e3, e1, g, soc) = (s.pi_3e.to_ghz(), s.pi_1e.to_ghz(), s.gaps, s.soc);
        let row = [
            p,
            cfg.stress.alpha(),
            e3.z,
            e3.x,
            e3.y,
            e1.z,
            e1.x,
            e1.y,
            g.delta_x,
            g.delta_y,
            g.sigma_x,
            g.sigma_y,
            g.lambda,
            g.zpl_x,
            g.zpl_y,
            soc.lambda_z,
            soc.lambda_perp_x,
            soc.lambda_perp_y,
            soc.lambda_perp_l_x,
            soc.lambda_perp_l_y,
            soc.lambda_prime,
            soc.lambda_z_prime,
        ];
        println!("{}", row.map(num).join(","));
    }
    Ok(0)
}

fn leading(terms: &[Term]) -> String {
    match terms
        .iter()
        .max_by(|a, b| a.value.abs().total_cmp(&b.value.abs()))
    {
        Some(t) => format!("{}@{}", num(t.value), t.shell),
        None => "-".into(),
    }
}

fn vibronic(c: &Common, count: usize) -> Result<u8> {
    let cfg = load_config(c)?;
    let model = cfg.model()?;
    let p = cfg.stress.points[0];
    let state = model.state(&cfg.stress.tensor_at(p)?)?;
    let spec = model.vibronic(&state)?;
    println!("# loading {p} GPa; leading coefficient of each family as value@shell");
    println!("index,energy_meV,irrep,purity,c,d,f,g");
    for (k, s) in spec.states.iter().take(count).enumerate() {
        let coeffs = spec
            .extract_coefficients(s)
            .map(|co| [&co.c, &co.d, &co.f, &co.g].map(|t| leading(t)))
            .unwrap_or_else(|_| std::array::from_fn(|_| "-".to_string()));
        println!(
            "{k},{},{},{},{}",
            num(s.energy),
            s.irrep.name(),
            num(s.purity),
            coeffs.join(",")
        );
    }
    Ok(0)
}

fn table(c: &Common, with_cycle: bool) -> Result<u8> {
    let cfg = load_config(c)?;
    let model = cfg.model()?;
    let mut cfg = cfg;
    cfg.output.populations = false;
    let res = run_sweep(&cfg, &model, cfg.output.parallel);
    let mut cols: Vec<&str> = RATE_COLUMNS.to_vec();
    if with_cycle {
        cols.extend(CYCLE_COLUMNS);
    }
    println!("{}", cols.join(","));
    for p in &res.points {
        if let Ok(r) = &p.result {
            let mut f = sweep::rate_fields(p.loading, p.alpha, r);
            if with_cycle {
                f.extend(sweep::cycle_fields(r));
            }
            println!("{}", f.join(","));
        }
    }
    Ok(if res.failures() > 0 {
        EXIT_POINT_FAILED
    } else {
        0
    })
}

fn run_batch(c: &Common) -> Result<u8> {
    let cfg = load_config(c)?;
    let model = cfg.model()?;
    let res = run_sweep(&cfg, &model, cfg.output.parallel);
    sweep::write_outputs(&cfg.output.dir, &model, &res)?;
    let failed = res.failures();
    log::info!(
        "{} of {} points written to {}",
        res.points.len() - failed,
        res.points.len(),
        cfg.output.dir.display()
    );
    Ok(if failed > 0 { EXIT_POINT_FAILED } else { 0 })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let out = match &cli.cmd {
        Cmd::TransformStress {
            common,
            orientation,
            tensor,
        } => transform_stress(common, orientation.as_deref(), tensor.as_deref()),
        Cmd::Couplings { common } => couplings(common),
        Cmd::Vibronic { common, states } => vibronic(common, *states),
        Cmd::Rates { common } => table(common, false),
        Cmd::Contrast { common } => table(common, true),
        Cmd::Sweep { common } => run_batch(common),
    };
    match out {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            log::error!("{e}");
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
