//! `lsys` command-line front end.
//!
//! Exit codes: 0 success, 2 domain error, 3 parse error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use lsys::control::make_controller;
use lsys::coupling::lf_impedance;
use lsys::document::{ClassReport, FSystemDoc, LFCouplingDoc, SystemDocument, SystemModel};
use lsys::herglotz::{
    alpha_for_minv_q_kappa, alpha_for_mq, alpha_for_mq_kappa, classify_value, oracle_theta0, oracle_v1, oracle_v2,
    ClassLabel, DEFAULT_CLASS_EPSILON,
};
use lsys::timedomain::{conservation_residual, simulate, simulate_fsystem, stationary_output_error, InitialState, SimulationConfig};
use lsys::{c, unimodular_transform, Alpha, ClassKind, Complex, ComplexMatrix, Error, ScalarHerglotz, TransferFunction, I};

#[derive(Parser)]
#[command(name = "lsys", version, about = "Conservative L-systems: evaluation, classification, coupling, simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every invariant of a system document.
    Validate { path: PathBuf },
    /// Evaluate the transfer or impedance function as CSV.
    Eval {
        path: PathBuf,
        #[arg(long, value_enum, default_value = "transfer")]
        what: What,
        /// Single point `re,im`.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "grid")]
        z: Option<String>,
        /// Grid `re0,re1,im0,im1,n` with n points per axis.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
    },
    /// Classify a scalar impedance function.
    Classify {
        #[arg(required_unless_present = "oracle", conflicts_with = "oracle")]
        path: Option<PathBuf>,
        /// `theta0:l=<length>`, `v1` or `v2`.
        #[arg(long)]
        oracle: Option<String>,
        #[arg(long, default_value_t = DEFAULT_CLASS_EPSILON)]
        eps: f64,
    },
    /// Couple a scalar L-system with a controller.
    Transform {
        path: PathBuf,
        #[arg(long, allow_hyphen_values = true, required_unless_present = "auto", conflicts_with = "auto")]
        alpha: Option<f64>,
        /// Pick the angle that maps the class onto its Q-negated class.
        #[arg(long)]
        auto: bool,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_CLASS_EPSILON)]
        eps: f64,
    },
    /// Write the controller document for an angle.
    Controller {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Simulate the response to `phi e^{izt}` as CSV.
    Simulate {
        path: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// Input amplitude as `re,im[,re,im...]`; defaults to the first unit vector.
        #[arg(long, allow_hyphen_values = true)]
        phi: Option<String>,
        #[arg(long)]
        t_end: f64,
        #[arg(long)]
        dt: f64,
        #[arg(long, value_enum, default_value = "stationary")]
        init: Init,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum What {
    Transfer,
    Impedance,
}

#[derive(Clone, Copy, ValueEnum)]
enum Init {
    Stationary,
    Zero,
}

enum Failure {
    Parse(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Parse(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Parse(msg)) => {
            eprintln!("parse error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {}: {e}", e.name());
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> CliResult<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match command {
        Command::Validate { path } => cmd_validate(&path, &mut out),
        Command::Eval { path, what, z, grid } => cmd_eval(&path, what, z.as_deref(), grid.as_deref(), &mut out),
        Command::Classify { path, oracle, eps } => cmd_classify(path.as_deref(), oracle.as_deref(), eps, &mut out),
        Command::Transform { path, alpha, auto, output, eps } => {
            cmd_transform(&path, alpha, auto, output.as_deref(), eps, &mut out)
        }
        Command::Controller { alpha, output } => cmd_controller(alpha, output.as_deref(), &mut out),
        Command::Simulate { path, z, phi, t_end, dt, init, output } => {
            let cfg = SimArgs { z: &z, phi: phi.as_deref(), t_end, dt, init };
            match output {
                Some(p) => cmd_simulate(&path, &cfg, &mut io::BufWriter::new(fs::File::create(p)?)),
                None => cmd_simulate(&path, &cfg, &mut out),
            }
        }
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_numbers(text: &str, what: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| Failure::Parse(format!("{what}: cannot read {s:?} as a number"))))
        .collect()
}

fn parse_point(text: &str) -> CliResult<Complex> {
    match parse_numbers(text, "z")?.as_slice() {
        &[re, im] => Ok(c(re, im)),
        _ => Err(Failure::Parse(format!("z must be re,im, got {text:?}"))),
    }
}

fn parse_grid(text: &str) -> CliResult<Vec<Complex>> {
    let v = parse_numbers(text, "grid")?;
    let &[re0, re1, im0, im1, n] = v.as_slice() else {
        return Err(Failure::Parse(format!("grid must be re0,re1,im0,im1,n, got {text:?}")));
    };
    if !(n >= 1.0) || n.fract() != 0.0 {
        return Err(Failure::Parse(format!("grid size must be a positive integer, got {n}")));
    }
    let n = n as usize;
    let lin = |lo: f64, hi: f64, k: usize| if n == 1 { lo } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 };
    let mut pts = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            pts.push(c(lin(re0, re1, b), lin(im0, im1, a)));
        }
    }
    Ok(pts)
}

fn load_document(path: &Path) -> CliResult<SystemDocument> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    SystemDocument::parse(&text).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn load_model(path: &Path) -> CliResult<SystemModel> {
    Ok(load_document(path)?.to_model()?)
}

fn write_text(path: Option<&Path>, text: &str, out: &mut dyn Write) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, format!("{text}\n"))?,
        None => writeln!(out, "{text}")?,
    }
    Ok(())
}

fn cmd_validate(path: &Path, out: &mut dyn Write) -> CliResult<()> {
    let doc = load_document(path)?;
    let checks = doc.validate()?;
    writeln!(out, "kind={}", doc.kind())?;
    for check in &checks {
        writeln!(out, "{}: residual={} bound={}", check.name, num(check.residual), num(check.bound))?;
    }
    writeln!(out, "valid")?;
    Ok(())
}

fn cmd_eval(path: &Path, what: What, z: Option<&str>, grid: Option<&str>, out: &mut dyn Write) -> CliResult<()> {
    let points = match (z, grid) {
        (Some(z), None) => vec![parse_point(z)?],
        (None, Some(g)) => parse_grid(g)?,
        _ => return Err(Failure::Parse("give exactly one of --z or --grid".into())),
    };
    let model = load_model(path)?;
    let m = model.io_dim();
    let mut header = vec!["z_re".to_string(), "z_im".to_string()];
    for r in 0..m {
        for col in 0..m {
            header.push(format!("e{}{}_re", r + 1, col + 1));
            header.push(format!("e{}{}_im", r + 1, col + 1));
        }
    }
    header.push("status".into());
    writeln!(out, "{}", header.join(","))?;
    for z in points {
        let value = match what {
            What::Transfer => model.transfer_at(z),
            What::Impedance => model.impedance_at(z),
        };
        let mut row = vec![num(z.re), num(z.im)];
        match value {
            Ok(v) => {
                for r in 0..m {
                    for col in 0..m {
                        let e = v.get(r, col);
                        row.push(num(e.re));
                        row.push(num(e.im));
                    }
                }
                row.push("ok".into());
            }
            Err(Error::SpectrumHit { .. }) => {
                row.extend(std::iter::repeat_n("NaN".to_string(), 2 * m * m));
                row.push("spectrum".into());
            }
            Err(e) => return Err(e.into()),
        }
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

fn parse_oracle(oracle_text: &str) -> CliResult<ScalarHerglotz> {
    let (name, params) = oracle_text.split_once(':').unwrap_or((oracle_text, ""));
    match name {
        "v1" if params.is_empty() => Ok(oracle_v1()),
        "v2" if params.is_empty() => Ok(oracle_v2()),
        "theta0" => {
            let l = params
                .strip_prefix("l=")
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| Failure::Parse(format!("theta0 oracle needs l=<length>, got {oracle_text:?}")))?;
            Ok(oracle_theta0(l)?)
        }
        _ => Err(Failure::Parse(format!("unknown oracle {oracle_text:?}"))),
    }
}

fn scalar_value(v: &ComplexMatrix) -> CliResult<Complex> {
    if v.shape() != (1, 1) {
        return Err(Error::ChannelNotScalar { m: v.rows() }.into());
    }
    Ok(v.get(0, 0))
}

fn model_class(model: &SystemModel, eps: f64) -> CliResult<ClassLabel> {
    if model.io_dim() != 1 {
        return Err(Error::ChannelNotScalar { m: model.io_dim() }.into());
    }
    Ok(classify_value(scalar_value(&model.impedance_at(I)?)?, eps)?)
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("reports always serialize")
}

fn cmd_classify(path: Option<&Path>, oracle: Option<&str>, eps: f64, out: &mut dyn Write) -> CliResult<()> {
    let label = match (path, oracle) {
        (_, Some(oracle_text)) => classify_value(parse_oracle(oracle_text)?.eval(I)?, eps)?,
        (Some(p), None) => model_class(&load_model(p)?, eps)?,
        (None, None) => return Err(Failure::Parse("give a document path or --oracle".into())),
    };
    writeln!(out, "{}", to_json(&ClassReport::from(&label)))?;
    Ok(())
}

#[derive(Serialize)]
struct TransformReport {
    alpha: f64,
    tan_alpha: f64,
    factor: [f64; 2],
    pre: ClassReport,
    post: ClassReport,
    /// `max |W_coupled(z) - factor W(z)|` over the sample points.
    transfer_residual: f64,
    /// `max |W_coupled(z) - W(z)|` over the sample points.
    transfer_change: f64,
}

const SAMPLE_POINTS: [(f64, f64); 6] = [(0.0, 1.0), (0.5, 2.0), (-1.5, 0.3), (3.0, 1.0), (-0.2, 4.0), (1.0, 0.0)];

fn cmd_transform(
    path: &Path,
    alpha: Option<f64>,
    auto: bool,
    output: Option<&Path>,
    eps: f64,
    out: &mut dyn Write,
) -> CliResult<()> {
    let SystemModel::L(l) = load_model(path)? else {
        return Err(Error::InvalidParameter("transform needs an lsystem document".into()).into());
    };
    let pre = model_class(&SystemModel::L(l.clone()), eps)?;
    let alpha = match (alpha, auto) {
        (Some(a), false) => Alpha::new(a)?,
        (None, true) => match pre.kind {
            ClassKind::MQ => alpha_for_mq(pre.q)?.alpha,
            ClassKind::MQKappa => alpha_for_mq_kappa(pre.q, pre.kappa)?.alpha,
            ClassKind::MInvQKappa => alpha_for_minv_q_kappa(pre.q, pre.kappa)?.alpha,
            ClassKind::M | ClassKind::MKappa | ClassKind::MInvKappa => return Err(Error::QZero.into()),
        },
        _ => return Err(Failure::Parse("give exactly one of --alpha or --auto".into())),
    };
    let coupled = unimodular_transform(&l, alpha)?;
    let post = classify_value(scalar_value(&lf_impedance(&coupled, I)?)?, eps)?;
    let factor = alpha.unimodular_factor();
    let (mut residual, mut change) = (0.0_f64, 0.0_f64);
    for (re, im) in SAMPLE_POINTS {
        let z = c(re, im);
        let (Ok(w), Ok(wc)) = (l.transfer(z), coupled.transfer(z)) else { continue };
        let (w, wc) = (w.get(0, 0), wc.get(0, 0));
        residual = residual.max((wc - factor * w).norm());
        change = change.max((wc - w).norm());
    }
    let report = TransformReport {
        alpha: alpha.value(),
        tan_alpha: alpha.value().tan(),
        factor: [factor.re, factor.im],
        pre: ClassReport::from(&pre),
        post: ClassReport::from(&post),
        transfer_residual: residual,
        transfer_change: change,
    };
    let doc = SystemDocument::LFCoupling(LFCouplingDoc::from_model(&coupled));
    match output {
        Some(p) => fs::write(p, format!("{}\n", doc.to_json()))?,
        None => writeln!(out, "{}", doc.to_json())?,
    }
    writeln!(out, "{}", to_json(&report))?;
    Ok(())
}

fn cmd_controller(alpha: f64, output: Option<&Path>, out: &mut dyn Write) -> CliResult<()> {
    let controller = make_controller(Alpha::new(alpha)?)?;
    let doc = SystemDocument::FSystem(FSystemDoc::from_model(controller.realization()));
    write_text(output, &doc.to_json(), out)
}

struct SimArgs<'a> {
    z: &'a str,
    phi: Option<&'a str>,
    t_end: f64,
    dt: f64,
    init: Init,
}

fn cmd_simulate(path: &Path, args: &SimArgs, out: &mut dyn Write) -> CliResult<()> {
    let z = parse_point(args.z)?;
    let model = load_model(path)?;
    let m = model.io_dim();
    let phi = match args.phi {
        Some(text) => {
            let v = parse_numbers(text, "phi")?;
            if v.len() != 2 * m {
                return Err(Failure::Parse(format!("phi needs {} numbers for {m} channels", 2 * m)));
            }
            let entries = v.chunks(2).map(|p| c(p[0], p[1])).collect();
            ComplexMatrix::from_row_major(m, 1, entries)?
        }
        None => {
            let mut e = ComplexMatrix::zeros(m, 1);
            e.set(0, 0, c(1.0, 0.0));
            e
        }
    };
    let initial = match args.init {
        Init::Stationary => InitialState::Stationary,
        Init::Zero => InitialState::Zero,
    };
    let cfg = SimulationConfig::new(z, phi, args.t_end, args.dt, initial);
    let (traj, j, stationary) = match &model {
        SystemModel::L(s) => {
            let traj = simulate(s, &cfg)?;
            let err = match args.init {
                Init::Stationary => Some(stationary_output_error(&traj, s, &cfg)?),
                Init::Zero => None,
            };
            (traj, s.j().clone(), err)
        }
        SystemModel::F(s) => (simulate_fsystem(s, &cfg)?, s.j().clone(), None),
        SystemModel::LF(_) => return Err(Error::UnsupportedProjection.into()),
    };
    traj.write_csv(&mut *out)?;
    writeln!(out, "# conservation_residual={}", num(conservation_residual(&traj, &j, &cfg)))?;
    if let Some(err) = stationary {
        writeln!(out, "# stationary_output_error={}", num(err))?;
    }
    out.flush()?;
    Ok(())
}
