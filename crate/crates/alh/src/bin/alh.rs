//! Command-line front end for the `alh` lattice-hierarchy library.
//!
//! Exit codes: 0 success, 1 verification-check failure, 2 usage/parse error,
//! 3 numerical failure (singular state, blow-up, divergence).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use alh::functionals::{self, Functional};
use alh::lattice::{gaussian_state, pair_state, random_state, zero_state, LatticeState};
use alh::operators::{self, OpName};
use alh::scattering;
use alh::verify::{self, Report, SuiteConfig};
use alh::{flows, AlError, C64, Field};

#[derive(Parser)]
#[command(name = "alh", version, about = "Ablowitz-Ladik lattice hierarchy toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a lattice state and write it as JSON.
    Gen(GenArgs),
    /// Compute scattering data on a grid of spectral points (CSV).
    Scatter(ScatterArgs),
    /// Evaluate the conserved functionals of a state (JSON).
    Conserved(ConservedArgs),
    /// Integrate a hierarchy flow and tabulate invariant drift (CSV).
    Evolve(EvolveArgs),
    /// Apply a named operator to a field (JSON in, JSON out).
    Apply(ApplyArgs),
    /// Run the verification suites.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct GenArgs {
    /// State family: zero | pair | gaussian | random.
    #[arg(long)]
    kind: String,
    /// Number of lattice sites.
    #[arg(long, short = 'n', default_value_t = 32)]
    n: usize,
    /// (pair) value of r at site 0.
    #[arg(long, default_value = "0.1")]
    r0: String,
    /// (pair) value of q at site 1.
    #[arg(long, default_value = "0.2")]
    q1: String,
    /// (gaussian, random) amplitude scale.
    #[arg(long, default_value_t = 0.1)]
    amplitude: f64,
    /// (gaussian) envelope width in sites.
    #[arg(long, default_value_t = 4.0)]
    width: f64,
    /// (gaussian) linear phase chirp.
    #[arg(long, default_value_t = 0.0)]
    chirp: f64,
    /// (random) RNG seed.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// (random) exponential decay rate toward the window edges.
    #[arg(long, default_value_t = 0.15)]
    decay: f64,
    /// Output path (stdout if omitted).
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScatterArgs {
    /// Input state JSON.
    #[arg(long)]
    state: PathBuf,
    /// Spectral grid: "r0:r1:n,theta0:theta1:m" (radii x angles, radians)
    /// or "single:<z>".
    #[arg(long, default_value = "single:2.0")]
    z_grid: String,
    /// Output CSV path (stdout if omitted).
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConservedArgs {
    /// Input state JSON.
    #[arg(long)]
    state: PathBuf,
    /// Output JSON path (stdout if omitted).
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvolveArgs {
    /// Input state JSON.
    #[arg(long)]
    state: PathBuf,
    /// Flow: "al" | "al-standard" | "n:<int>" (hierarchy flow X_n).
    #[arg(long, default_value = "al")]
    flow: String,
    /// Symmetry reduction imposed at t = 0: none | focusing | defocusing.
    #[arg(long, default_value = "none")]
    reduction: String,
    /// Time step.
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    /// Final time.
    #[arg(long, default_value_t = 1.0)]
    t_final: f64,
    /// Record a sample every this many steps.
    #[arg(long, default_value_t = 100)]
    out_every: usize,
    /// Spectral points for |a(z)| monitoring, comma separated.
    #[arg(long, default_value = "2.0")]
    z: String,
    /// Output CSV path (stdout if omitted).
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ApplyArgs {
    /// Input state JSON (supplies the window and the operator coefficients).
    #[arg(long)]
    state: PathBuf,
    /// Operator name: L, Linv, Lplus, Lminus, Lstar, Linvstar, R, K, J,
    /// D1, D2, B, Binv, sigma1, sigma3, identity.
    #[arg(long)]
    op: String,
    /// Apply the operator this many times.
    #[arg(long, default_value_t = 1)]
    power: usize,
    /// Input field JSON; defaults to the potential pair in the operator's
    /// domain ordering.
    #[arg(long)]
    field: Option<PathBuf>,
    /// Output JSON path (stdout if omitted).
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite: operators | resolvent | kernel | lenard | commute | jacobi | all.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Lattice size.
    #[arg(long, short = 'n', default_value_t = 32)]
    n: usize,
    /// RNG seeds, comma separated.
    #[arg(long, default_value = "42,43,44")]
    seeds: String,
    /// Random-state amplitude.
    #[arg(long, default_value_t = 0.1)]
    amplitude: f64,
    /// Write the full JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
}

fn parse_c64(text: &str) -> Result<C64, AlError> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || AlError::InvalidInput(format!("cannot parse complex number `{text}`"));
    if t.is_empty() {
        return Err(bad());
    }
    // Pure imaginary: "3i", "-0.3i", "i", "-i".
    if let Some(body) = t.strip_suffix('i') {
        // Split a possible real part: find a '+' or '-' after position 0
        // that is not part of an exponent.
        let mut split = None;
        for (idx, c) in body.char_indices().skip(1) {
            if (c == '+' || c == '-') && !matches!(body.as_bytes()[idx - 1], b'e' | b'E') {
                split = Some(idx);
            }
        }
        let (re_s, im_s) = match split {
            Some(idx) => (&body[..idx], &body[idx..]),
            None => ("0", body),
        };
        let im = match im_s {
            "" | "+" => 1.0,
            "-" => -1.0,
            other => other.parse::<f64>().map_err(|_| bad())?,
        };
        let re = if re_s.is_empty() {
            0.0
        } else {
            re_s.parse::<f64>().map_err(|_| bad())?
        };
        return Ok(C64::new(re, im));
    }
    t.parse::<f64>().map(|re| C64::new(re, 0.0)).map_err(|_| bad())
}

fn parse_z_grid(text: &str) -> Result<Vec<C64>, AlError> {
    if let Some(zs) = text.strip_prefix("single:") {
        return Ok(vec![parse_c64(zs)?]);
    }
    let bad = || {
        AlError::InvalidInput(format!(
            "cannot parse z grid `{text}`; expected \
             \"r0:r1:n,theta0:theta1:m\" or \"single:<z>\""
        ))
    };
    let (rad, ang) = text.split_once(',').ok_or_else(bad)?;
    let parse_axis = |axis: &str| -> Result<(f64, f64, usize), AlError> {
        let parts: Vec<&str> = axis.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let a = parts[0].parse::<f64>().map_err(|_| bad())?;
        let b = parts[1].parse::<f64>().map_err(|_| bad())?;
        let n = parts[2].parse::<usize>().map_err(|_| bad())?;
        if n == 0 {
            return Err(bad());
        }
        Ok((a, b, n))
    };
    let (r0, r1, nr) = parse_axis(rad)?;
    let (t0, t1, nt) = parse_axis(ang)?;
    let mut out = Vec::with_capacity(nr * nt);
    for i in 0..nr {
        let r = if nr == 1 {
            r0
        } else {
            r0 + (r1 - r0) * i as f64 / (nr - 1) as f64
        };
        for j in 0..nt {
            let t = if nt == 1 {
                t0
            } else {
                t0 + (t1 - t0) * j as f64 / (nt - 1) as f64
            };
            out.push(C64::from_polar(r, t));
        }
    }
    Ok(out)
}

fn write_text(path: &Option<PathBuf>, text: &str) -> Result<(), AlError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(AlError::from),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn load_state(path: &PathBuf) -> Result<LatticeState, AlError> {
    LatticeState::from_json(&std::fs::read_to_string(path)?)
}

fn cmd_gen(args: &GenArgs) -> Result<i32, AlError> {
    let s = match args.kind.as_str() {
        "zero" => zero_state(args.n)?,
        "pair" => pair_state(args.n, 0, parse_c64(&args.r0)?, 1, parse_c64(&args.q1)?)?,
        "gaussian" => gaussian_state(args.n, args.amplitude, args.width, args.chirp)?,
        "random" => random_state(args.n, args.seed, args.amplitude, args.decay)?,
        other => {
            return Err(AlError::InvalidInput(format!(
                "unknown state kind `{other}` (zero | pair | gaussian | random)"
            )))
        }
    };
    write_text(&args.out, &s.to_json())?;
    Ok(0)
}

fn cmd_scatter(args: &ScatterArgs) -> Result<i32, AlError> {
    let s = load_state(&args.state)?;
    let grid = parse_z_grid(&args.z_grid)?;
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record([
        "z_re", "z_im", "a_re", "a_im", "ahat_re", "ahat_im", "b_re", "b_im", "C0_re", "C0_im",
    ])
    .map_err(|e| AlError::InvalidInput(e.to_string()))?;
    for z in grid {
        let d = scattering::scattering_data(&s, z)?;
        wtr.write_record([
            z.re.to_string(),
            z.im.to_string(),
            d.a.re.to_string(),
            d.a.im.to_string(),
            d.ahat.re.to_string(),
            d.ahat.im.to_string(),
            d.b.re.to_string(),
            d.b.im.to_string(),
            d.c0.re.to_string(),
            d.c0.im.to_string(),
        ])
        .map_err(|e| AlError::InvalidInput(e.to_string()))?;
    }
    let bytes = wtr.into_inner().map_err(|e| AlError::InvalidInput(e.to_string()))?;
    write_text(&args.out, String::from_utf8_lossy(&bytes).trim_end())?;
    Ok(0)
}

fn cmd_conserved(args: &ConservedArgs) -> Result<i32, AlError> {
    let s = load_state(&args.state)?;
    let mut map = serde_json::Map::new();
    for f in [
        Functional::H0,
        Functional::C0,
        Functional::C1,
        Functional::C2,
        Functional::C1hat,
        Functional::C2hat,
        Functional::HAl,
    ] {
        let v = functionals::evaluate(&f, &s)?;
        map.insert(
            f.name().to_string(),
            serde_json::json!([v.re, v.im]),
        );
    }
    let text = serde_json::to_string_pretty(&serde_json::Value::Object(map))?;
    write_text(&args.out, &text)?;
    Ok(0)
}

fn cmd_evolve(args: &EvolveArgs) -> Result<i32, AlError> {
    let s0 = load_state(&args.state)?;
    let mut spec = flows::FlowSpec::parse(&args.flow)?;
    spec.reduction = match args.reduction.as_str() {
        "none" => flows::Reduction::None,
        "focusing" => flows::Reduction::Focusing,
        "defocusing" => flows::Reduction::Defocusing,
        other => {
            return Err(AlError::InvalidInput(format!(
                "unknown reduction `{other}` (none | focusing | defocusing)"
            )))
        }
    };
    let zs: Vec<C64> = args
        .z
        .split(',')
        .map(parse_c64)
        .collect::<Result<_, _>>()?;
    let rec = flows::integrate(&s0, &spec, args.dt, args.t_final, args.out_every)?;

    let mut wtr = csv::Writer::from_writer(Vec::new());
    let mut header = vec![
        "t".to_string(),
        "H0".to_string(),
        "C1".to_string(),
        "C2".to_string(),
        "C1hat".to_string(),
        "C2hat".to_string(),
    ];
    for (i, _) in zs.iter().enumerate() {
        header.push(format!("abs_a_z{}", i + 1));
        header.push(format!("arg_a_z{}", i + 1));
    }
    wtr.write_record(&header)
        .map_err(|e| AlError::InvalidInput(e.to_string()))?;
    for (t, state) in rec.times.iter().zip(rec.states.iter()) {
        let mut row = vec![t.to_string()];
        for f in [
            Functional::H0,
            Functional::C1,
            Functional::C2,
            Functional::C1hat,
            Functional::C2hat,
        ] {
            row.push(functionals::evaluate(&f, state)?.re.to_string());
        }
        for &z in &zs {
            let d = scattering::scattering_data(state, z)?;
            row.push(d.a.norm().to_string());
            row.push(d.a.arg().to_string());
        }
        wtr.write_record(&row)
            .map_err(|e| AlError::InvalidInput(e.to_string()))?;
    }
    let bytes = wtr.into_inner().map_err(|e| AlError::InvalidInput(e.to_string()))?;
    write_text(&args.out, String::from_utf8_lossy(&bytes).trim_end())?;
    Ok(0)
}

fn cmd_apply(args: &ApplyArgs) -> Result<i32, AlError> {
    let s = load_state(&args.state)?;
    let name = OpName::parse(&args.op)?;
    let op = operators::assemble(name, &s)?;
    let field = match &args.field {
        Some(p) => Field::from_json(&std::fs::read_to_string(p)?)?,
        None => match op.domain_ordering {
            alh::Ordering::Rq => s.rq_field(),
            alh::Ordering::Qr => s.qr_field(),
        },
    };
    let out = operators::power_apply(&op, &field, args.power)?;
    write_text(&args.out, &out.to_json())?;
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs) -> Result<i32, AlError> {
    let seeds: Vec<u64> = args
        .seeds
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| AlError::InvalidInput(format!("bad seed `{t}`")))
        })
        .collect::<Result<_, _>>()?;
    if seeds.is_empty() {
        return Err(AlError::InvalidInput("need at least one seed".into()));
    }
    let cfg = SuiteConfig {
        n: args.n,
        amplitude: args.amplitude,
        seeds,
        ..SuiteConfig::default()
    };
    let results = verify::run_suite(&args.suite, &cfg)?;
    let report = Report::new(results);
    for r in &report.results {
        let verdict = if r.diagnostic {
            "diag"
        } else if r.pass {
            "pass"
        } else {
            "FAIL"
        };
        println!(
            "[{verdict}] {}/{}: metric {:.3e} (tol {:.1e})",
            r.suite, r.case, r.metric, r.tol
        );
    }
    println!(
        "{} checks: {} passed, {} failed, {} diagnostic",
        report.total, report.passed, report.failed, report.diagnostics
    );
    if let Some(p) = &args.json {
        std::fs::write(p, report.to_json())?;
    }
    Ok(if report.all_pass() { 0 } else { 1 })
}

fn main() -> ExitCode {
    // Accepted for interface stability; all computation is single-threaded.
    let _ = std::env::var("ALH_THREADS");
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Scatter(a) => cmd_scatter(a),
        Command::Conserved(a) => cmd_conserved(a),
        Command::Evolve(a) => cmd_evolve(a),
        Command::Apply(a) => cmd_apply(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
