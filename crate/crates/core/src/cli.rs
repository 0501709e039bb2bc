//! Command-line front end. [`run`] maps an argument vector to an exit code:
//! 0 on success, 1 on a domain error, 2 on a usage error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::channel::{reciprocity_report, Direction, Tolerances};
use crate::error::{Error, Result};
use crate::experiments::{
    add_noise, circle_fit, load_scenario, optimize_pattern, pattern_table, plotdata_csv, render_table, report_csv,
    report_json, round_trip_demo, trajectory_csv, trajectory_json, voltage_sweep, write_atomic, OptimizeMode,
    PlotData, Scenario, FIXTURE_IDS,
};
use crate::model::{ControlKind, ReflectionModel};
use crate::nonreciprocal::{
    fourier_coefficients, parseval_check, round_trip_test_with, ControlSchedule, NonlinearCellModel, ReturnPath,
    RoundTripOptions,
};
use crate::pattern::{PatternKind, PatternSpec};

const SCENARIO_HELP: &str = "Scenario file (TOML) or fixture id: ris1-a, ris1-b, ris2-a, ris2-b. \
The RISRECIP_FIXTURES environment variable replaces the built-in fixtures with <dir>/<id>.toml.";

const SCENARIO_SCHEMA: &str = "\
Scenario file (TOML, unknown keys rejected):
  id = \"name\"                 report_phase = true|false
  [geometry]   d1_m, theta1_deg, d2_m, theta2_deg, f_hz, pt_dbm
  [panel]      rows, cols, dx_m, dy_m, group_cols,
               model = { kind = \"ideal_varactor\" | \"ideal_pin\" | \"table_varactor\" (path)
                       | \"angle_dependent\" (q, base) | \"active\" (state, gain_db, isolation_db)
                       | \"nonlinear\" (t_max, c_fwd, c_rev, exponent, p_ref_w) }
  [pattern]    kind = \"identical\" (value) | \"gradient\" (step_deg) | \"stripe\" | \"custom\" (values)
  [direct_link] kind = \"none\" | \"free_space_los\" | \"fixed_complex\" (re, im)
  [sweep]      steps   (optional)";

const SCHEDULE_SCHEMA: &str = "\
Schedule file (TOML):
  period_s = 2e-9
  [[groups]]                          # one table per super-column, or
  segments = [[start, end, control], ...]
  [gradient]                          # one waveform delayed group by group
  groups = 64
  shift = -0.05                       # delay per group, in periods
  segments = [[start, end, control], ...]
Segments of each group must tile [0, 1) in order.";

#[derive(Parser, Debug)]
#[command(
    name = "ris-recip",
    version,
    about = "Uplink/downlink channel simulator for RIS-assisted TDD links",
    after_help = "Exit codes: 0 success, 1 domain error, 2 usage error. Outputs are written atomically."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep one shared control voltage over the cell range and record both directions.
    #[command(after_help = concat!(
        "Output (CSV, or JSON for a .json path): voltage_v,re_up,im_up,re_down,im_down\n",
        "Without --out the CSV goes to stdout."
    ))]
    Sweep(SweepArgs),
    /// Received power and phase per scenario and coding pattern, in both directions.
    #[command(after_help = concat!(
        "Report (CSV, or JSON for a .json path): scenario,pattern,p_up_dbm,p_down_dbm,phase_up_deg,phase_down_deg\n",
        "Missing phases are NA in CSV and null in JSON; a null channel has power -inf (null in JSON).\n",
        "Plot data: label,re_up,im_up,re_down,im_down"
    ))]
    Table(TableArgs),
    /// Compare uplink and downlink channels of one scene.
    Reciprocity(ReciprocityArgs),
    /// Closed-form Fourier coefficients of a control schedule.
    #[command(after_help = concat!(
        "Output (CSV): group,k,re,im,magnitude. Without --out the CSV goes to stdout.\n",
        "Run with --help (not -h) for the schedule file format."
    ))]
    Harmonics(HarmonicsArgs),
    /// Two-pass reflection off a time-modulated panel.
    #[command(after_help = concat!(
        "Without --schedule the built-in demo runs: 64 quarter-wave columns at 10 GHz, f_m = 0.5 GHz,\n",
        "four-step staircase with a spatial gradient of 0.2·k0 per harmonic, incidence at 30°."
    ))]
    Roundtrip(RoundtripArgs),
    /// Direction-dependent transmission of the power-saturating cell.
    #[command(after_help = "Output (CSV): p_in_w,forward,reverse,isolation_db")]
    Nonlinear(NonlinearArgs),
    /// Search for a coding pattern that maximises received power.
    #[command(after_help = "Report (CSV or JSON): same schema as `table`, one row for identical and one for the optimum.")]
    Optimize(OptimizeArgs),
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, help = SCENARIO_HELP, long_help = format!("{SCENARIO_HELP}\n\n{SCENARIO_SCHEMA}"))]
    scenario: String,
    /// Number of equally spaced voltages [default: the scenario's, else 211].
    #[arg(long)]
    steps: Option<usize>,
    /// Output path (.csv or .json).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Standard deviation of complex Gaussian noise added per component.
    #[arg(long, default_value_t = 0.0)]
    noise_sigma: f64,
    /// Seed for the noise generator.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PatternName {
    Identical,
    Gradient,
    Stripe,
}

#[derive(Args, Debug)]
struct TableArgs {
    /// Scenario file or fixture id; repeatable [default: all four fixtures].
    #[arg(long)]
    scenario: Vec<String>,
    /// Pattern; repeatable [default: identical plus gradient or stripe, by cell model].
    #[arg(long, value_enum)]
    pattern: Vec<PatternName>,
    /// Phase step between super-columns for the gradient pattern, degrees.
    #[arg(long, default_value_t = 90.0)]
    gradient_step: f64,
    /// Report path (.csv or .json).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Complex-plane plot data path (CSV).
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReciprocityArgs {
    #[arg(long, help = SCENARIO_HELP)]
    scenario: String,
    /// Pattern to apply [default: the scenario's own].
    #[arg(long, value_enum)]
    pattern: Option<PatternName>,
    #[arg(long, default_value_t = 90.0)]
    gradient_step: f64,
    /// Magnitude tolerance, dB.
    #[arg(long, default_value_t = 1e-9)]
    tol_db: f64,
    /// Phase tolerance, degrees.
    #[arg(long, default_value_t = 1e-9)]
    tol_deg: f64,
}

#[derive(Args, Debug)]
struct HarmonicsArgs {
    /// Schedule file [default: the round-trip demo schedule].
    #[arg(long, long_help = format!("Schedule file [default: the round-trip demo schedule].\n\n{SCHEDULE_SCHEMA}"))]
    schedule: Option<PathBuf>,
    /// Scenario whose cell model interprets the control values [default: ideal varactor].
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long, default_value_t = 8)]
    k_max: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PathName {
    Mirrored,
    Retraced,
}

#[derive(Args, Debug)]
struct RoundtripArgs {
    /// Uplink schedule; requires --scenario for the panel.
    #[arg(long, requires = "scenario", long_help = format!("Uplink schedule; requires --scenario for the panel.\n\n{SCHEDULE_SCHEMA}"))]
    schedule: Option<PathBuf>,
    /// Downlink schedule [default: same as uplink].
    #[arg(long, requires = "schedule")]
    downlink_schedule: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<String>,
    /// Demo only: falling staircase on the return pass.
    #[arg(long, conflicts_with = "schedule")]
    cancel: bool,
    /// Incidence angle, degrees [default: demo value or the scenario's theta1].
    #[arg(long, allow_negative_numbers = true)]
    theta1: Option<f64>,
    /// Carrier, Hz [default: demo value or the scenario's f_hz].
    #[arg(long)]
    f1: Option<f64>,
    /// Angle grid step, degrees.
    #[arg(long, default_value_t = 0.01)]
    resolution: f64,
    #[arg(long, default_value_t = 8)]
    k_max: usize,
    #[arg(long, value_enum, default_value_t = PathName::Mirrored)]
    return_path: PathName,
}

#[derive(Args, Debug)]
struct NonlinearArgs {
    #[arg(long, default_value_t = -40.0, allow_negative_numbers = true)]
    p_min_dbm: f64,
    #[arg(long, default_value_t = 40.0, allow_negative_numbers = true)]
    p_max_dbm: f64,
    #[arg(long, default_value_t = 9)]
    steps: usize,
    #[arg(long, default_value_t = 0.9)]
    t_max: f64,
    #[arg(long, default_value_t = 0.01)]
    c_fwd: f64,
    #[arg(long, default_value_t = 100.0)]
    c_rev: f64,
    #[arg(long, default_value_t = 2.0)]
    exponent: f64,
    #[arg(long, default_value_t = 1e-3)]
    p_ref_w: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeName {
    ContinuousAlign,
    ExhaustiveBits,
    GreedyBits,
}

#[derive(Args, Debug)]
struct OptimizeArgs {
    #[arg(long, help = SCENARIO_HELP)]
    scenario: String,
    #[arg(long, value_enum)]
    mode: ModeName,
    /// Report path (.csv or .json).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `argv` (program name first) and runs one subcommand.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(command: Command) -> Result<String> {
    match command {
        Command::Sweep(a) => sweep(a),
        Command::Table(a) => table(a),
        Command::Reciprocity(a) => reciprocity(a),
        Command::Harmonics(a) => harmonics(a),
        Command::Roundtrip(a) => roundtrip(a),
        Command::Nonlinear(a) => nonlinear(a),
        Command::Optimize(a) => optimize(a),
    }
}

/// Fails before any work if the output directory is missing.
fn check_out(path: &Option<PathBuf>) -> Result<()> {
    if let Some(p) = path {
        let dir = match p.parent() {
            Some(d) if !d.as_os_str().is_empty() => d,
            _ => Path::new("."),
        };
        if !dir.is_dir() {
            return Err(Error::io(
                p,
                std::io::Error::new(std::io::ErrorKind::NotFound, "output directory does not exist"),
            ));
        }
    }
    Ok(())
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn pattern_spec(name: PatternName, scenario: &Scenario, step: f64) -> Result<PatternSpec> {
    Ok(match name {
        PatternName::Identical => PatternSpec::Identical {
            value: scenario.build_panel()?.cell_model().rest_control(),
        },
        PatternName::Gradient => PatternSpec::Gradient { step_deg: step },
        PatternName::Stripe => PatternSpec::Stripe,
    })
}

fn sweep(a: SweepArgs) -> Result<String> {
    check_out(&a.out)?;
    let scenario = load_scenario(&a.scenario)?;
    let scene = scenario.scene()?;
    let mut points = voltage_sweep(&scene, a.steps.unwrap_or_else(|| scenario.sweep_steps()))?;
    if a.noise_sigma != 0.0 {
        points = add_noise(&points, a.noise_sigma, a.seed)?;
    }
    let Some(out) = a.out else {
        return Ok(trajectory_csv(&points));
    };
    let text = if is_json(&out) {
        trajectory_json(&points)
    } else {
        trajectory_csv(&points)
    };
    write_atomic(&out, text.as_bytes())?;
    let ups: Vec<_> = points.iter().map(|p| p.h_up).collect();
    let spread = points.iter().map(|p| (p.h_up - p.h_down).norm()).fold(0.0, f64::max);
    let mut s = format!("{}: {} points written to {}\n", scenario.id, points.len(), out.display());
    match circle_fit(&ups) {
        Ok(fit) => writeln!(
            s,
            "circle center {:.6e}{:+.6e}j, radius {:.6e}, rms residual {:.3e}",
            fit.center.re, fit.center.im, fit.radius, fit.rms_residual
        )
        .unwrap(),
        Err(e) => writeln!(s, "no circle: {e}").unwrap(),
    }
    writeln!(s, "max |h_up - h_down| = {spread:.3e}").unwrap();
    Ok(s)
}

fn table(a: TableArgs) -> Result<String> {
    check_out(&a.out)?;
    check_out(&a.plot)?;
    let ids: Vec<String> = if a.scenario.is_empty() {
        FIXTURE_IDS.iter().map(|s| s.to_string()).collect()
    } else {
        a.scenario
    };
    let mut items = Vec::with_capacity(ids.len());
    for id in &ids {
        let scenario = load_scenario(id)?;
        let names = if a.pattern.is_empty() {
            let second = match scenario.build_panel()?.cell_model().control_kind() {
                ControlKind::Continuous => Some(PatternName::Gradient),
                ControlKind::Binary => Some(PatternName::Stripe),
                ControlKind::Fixed => None,
            };
            std::iter::once(PatternName::Identical).chain(second).collect()
        } else {
            a.pattern.clone()
        };
        let specs = names
            .into_iter()
            .map(|n| pattern_spec(n, &scenario, a.gradient_step))
            .collect::<Result<Vec<_>>>()?;
        items.push((scenario, specs));
    }
    let rows = pattern_table(&items)?;
    if let Some(out) = &a.out {
        let text = if is_json(out) { report_json(&rows) } else { report_csv(&rows) };
        write_atomic(out, text.as_bytes())?;
    }
    if let Some(plot) = &a.plot {
        write_atomic(plot, plotdata_csv(PlotData::PatternMap(&rows))?.as_bytes())?;
    }
    Ok(render_table(&rows))
}

fn reciprocity(a: ReciprocityArgs) -> Result<String> {
    let scenario = load_scenario(&a.scenario)?;
    let spec = match a.pattern {
        Some(n) => pattern_spec(n, &scenario, a.gradient_step)?,
        None => scenario.pattern.clone(),
    };
    let scene = scenario.scene_with(&spec)?;
    let tol = Tolerances {
        magnitude_db: a.tol_db,
        phase_deg: a.tol_deg,
    };
    let r = reciprocity_report(&scene, &tol)?;
    Ok(format!(
        "{} / {}: cell model {} ({})\nh_up   = {:.9e}{:+.9e}j\nh_down = {:.9e}{:+.9e}j\ndeviation {:.6} dB / {:.6}°, verdict {}\n",
        scenario.id,
        spec.kind(),
        scene.panel.cell_model().name(),
        scene.panel.cell_model().reciprocity_class(),
        r.h_up.re,
        r.h_up.im,
        r.h_down.re,
        r.h_down.im,
        r.magnitude_deviation_db,
        r.phase_deviation_deg,
        r.verdict
    ))
}

fn harmonics(a: HarmonicsArgs) -> Result<String> {
    check_out(&a.out)?;
    let schedule = match &a.schedule {
        Some(p) => ControlSchedule::load(p)?,
        None => round_trip_demo(false)?.uplink,
    };
    let model = match &a.scenario {
        Some(s) => load_scenario(s)?.build_panel()?.cell_model().clone(),
        None => ReflectionModel::ideal_varactor(),
    };
    let spec = fourier_coefficients(&schedule, &model, a.k_max)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["group", "k", "re", "im", "magnitude"]).expect("in-memory CSV write");
    for g in 0..spec.group_count() {
        for k in spec.harmonics() {
            let c = spec.coefficient(k, g);
            w.write_record([g.to_string(), k.to_string(), c.re.to_string(), c.im.to_string(), c.norm().to_string()])
                .expect("in-memory CSV write");
        }
    }
    let csv_text = String::from_utf8(w.into_inner().expect("in-memory CSV flush")).expect("CSV output is UTF-8");
    let Some(out) = a.out else {
        return Ok(csv_text);
    };
    write_atomic(&out, csv_text.as_bytes())?;
    let inc = crate::model::Incidence::normal(Direction::Uplink);
    let mut worst = 0.0f64;
    for g in 0..spec.group_count() {
        worst = worst.max(parseval_check(&schedule, &model, &spec, g, &inc)?.residual());
    }
    let mut s = format!(
        "{} groups, f_m = {} Hz, k in [-{}, {}] written to {}\n",
        spec.group_count(),
        spec.modulation_hz(),
        a.k_max,
        a.k_max,
        out.display()
    );
    for k in spec.harmonics() {
        writeln!(s, "k = {k:+}: |a| = {:.6}", spec.coefficient(k, 0).norm()).unwrap();
    }
    writeln!(s, "worst Parseval residual {worst:.3e}").unwrap();
    Ok(s)
}

fn roundtrip(a: RoundtripArgs) -> Result<String> {
    let (panel, up, down, theta1, f1) = match &a.schedule {
        Some(path) => {
            let scenario = load_scenario(a.scenario.as_deref().expect("clap enforces --scenario"))?;
            let up = ControlSchedule::load(path)?;
            let down = match &a.downlink_schedule {
                Some(p) => ControlSchedule::load(p)?,
                None => up.clone(),
            };
            let panel = scenario.build_panel()?;
            (panel, up, down, scenario.geometry.theta1_deg, scenario.geometry.f_hz)
        }
        None => {
            let d = round_trip_demo(a.cancel)?;
            (d.panel, d.uplink, d.downlink, d.theta1_deg, d.f1_hz)
        }
    };
    let opts = RoundTripOptions {
        resolution_deg: a.resolution,
        k_max: a.k_max,
        return_path: match a.return_path {
            PathName::Mirrored => ReturnPath::Mirrored,
            PathName::Retraced => ReturnPath::Retraced,
        },
        ..Default::default()
    };
    let r = round_trip_test_with(&panel, &up, &down, a.theta1.unwrap_or(theta1), a.f1.unwrap_or(f1), &opts)?;
    let mut s = String::new();
    writeln!(s, "pass 1: theta1 = {:.2}°, f1 = {} Hz -> k1 = {:+}, theta2 = {:.2}°, f2 = {} Hz", r.theta1_deg, r.f1_hz, r.k1, r.theta2_deg, r.f2_hz).unwrap();
    writeln!(s, "pass 2: theta2 = {:.2}°, f2 = {} Hz -> k2 = {:+}, theta3 = {:.2}°, f3 = {} Hz", r.theta2_deg, r.f2_hz, r.k2, r.theta3_deg, r.f3_hz).unwrap();
    writeln!(s, "return path {:?}, fitted gradient {:.6} rad/m per harmonic", r.return_path, r.beta_s()).unwrap();
    match r.predicted_theta3_deg {
        Some(p) => writeln!(s, "momentum ledger: predicted theta3 = {p:.4}°, residual {:.3e} rad/m", r.momentum_residual).unwrap(),
        None => writeln!(s, "momentum ledger: predicted return is evanescent").unwrap(),
    }
    writeln!(s, "reciprocal = {}", r.reciprocal).unwrap();
    Ok(s)
}

fn nonlinear(a: NonlinearArgs) -> Result<String> {
    check_out(&a.out)?;
    if a.steps < 2 || !(a.p_max_dbm > a.p_min_dbm) {
        return Err(Error::Argument("need --steps >= 2 and --p-max-dbm > --p-min-dbm".into()));
    }
    let m = NonlinearCellModel {
        t_max: a.t_max,
        c_fwd: a.c_fwd,
        c_rev: a.c_rev,
        exponent: a.exponent,
        p_ref_w: a.p_ref_w,
    };
    m.validate()?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["p_in_w", "forward", "reverse", "isolation_db"]).expect("in-memory CSV write");
    for i in 0..a.steps {
        let dbm = a.p_min_dbm + (a.p_max_dbm - a.p_min_dbm) * i as f64 / (a.steps - 1) as f64;
        let p = crate::channel::dbm_to_watts(dbm);
        let fwd = m.transmission(Direction::Downlink, p)?;
        let rev = m.transmission(Direction::Uplink, p)?;
        let iso = 20.0 * (fwd / rev).log10();
        w.write_record([p.to_string(), fwd.to_string(), rev.to_string(), iso.to_string()])
            .expect("in-memory CSV write");
    }
    let text = String::from_utf8(w.into_inner().expect("in-memory CSV flush")).expect("CSV output is UTF-8");
    match a.out {
        Some(out) => {
            write_atomic(&out, text.as_bytes())?;
            Ok(format!("{} power levels written to {}\n", a.steps, out.display()))
        }
        None => Ok(text),
    }
}

fn optimize(a: OptimizeArgs) -> Result<String> {
    check_out(&a.out)?;
    let scenario = load_scenario(&a.scenario)?;
    let scene = scenario.scene()?;
    let mode = match a.mode {
        ModeName::ContinuousAlign => OptimizeMode::ContinuousAlign,
        ModeName::ExhaustiveBits => OptimizeMode::ExhaustiveBits,
        ModeName::GreedyBits => OptimizeMode::GreedyBits,
    };
    let r = optimize_pattern(&scene, mode)?;
    if let Some(out) = &a.out {
        let rest = PatternSpec::Identical {
            value: scene.panel.cell_model().rest_control(),
        };
        let best = PatternSpec::Custom {
            values: r.pattern.values.clone(),
        };
        let rows = pattern_table(&[(scenario.clone(), vec![rest, best])])?;
        let text = if is_json(out) { report_json(&rows) } else { report_csv(&rows) };
        write_atomic(out, text.as_bytes())?;
    }
    let values: Vec<String> = r.pattern.values.iter().map(|v| format!("{v}")).collect();
    Ok(format!(
        "{} {}: pattern [{}]\nuplink {:.3} dBm ({:+.6} dB over {}), downlink {:.3} dBm ({:+.6} dB)\n",
        scenario.id,
        mode.as_str(),
        values.join(", "),
        r.p_up_dbm,
        r.gain_up_db(),
        PatternKind::Identical,
        r.p_down_dbm,
        r.gain_down_db()
    ))
}
