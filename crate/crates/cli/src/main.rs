//! `b2closure`: moment I/O, closure evaluation, region sweeps and the slab E₃ export.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use b2_closure::ansatz::DEFAULT_QUAD_ORDER;
use b2_closure::closure::flux_vectors;
use b2_closure::hyperbolicity::DIAG_TOL;
use b2_closure::{
    build_moments, eigenframe, evaluate_closure, nonneg_diagnostics, realizability_margin,
    sample_hyperbolic_region, sample_nonneg_region, slab_e3, spherical_moments,
    spherical_moments_quadrature, write_region_csv, write_slab_csv, AnsatzMoments, BetaShape,
    Branch, ClosureError, ClosureFrame, MomentState,
};
use clap::{Args, Parser, Subcommand};
use nalgebra::{Matrix3, Vector3};
use serde::Deserialize;
use serde_json::{json, Value};

/// Tolerance of the `--verify` check on the semi-analytic moments, relative to `e0`.
const VERIFY_TOL: f64 = 1e-9;
/// Same for the quadrature moments.
const VERIFY_QUAD_TOL: f64 = 1e-6;

#[derive(Parser, Debug)]
#[command(
    name = "b2closure",
    version,
    about = "Closed-form 3D B2 moment closure for radiative transfer"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Realizability and non-negativity diagnostics of a state.
    Check(StateIo),
    /// Closure parameters, third moments and fluxes of a state.
    Close {
        #[command(flatten)]
        io: StateIo,
        /// Quadrature order used by `--verify`.
        #[arg(long, default_value_t = DEFAULT_QUAD_ORDER)]
        quad_order: usize,
        /// Re-integrate the reconstructed ansatz and compare with the input.
        #[arg(long)]
        verify: bool,
    },
    /// Non-negativity sweep over the eigenvalue triangle.
    SampleNonneg {
        #[arg(long, default_value_t = 200)]
        grid: usize,
        #[arg(long, default_value_t = 11)]
        fgrid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hyperbolicity sweep at zero flux.
    SampleHyp {
        #[arg(long, default_value_t = 200)]
        grid: usize,
        #[arg(long, default_value_t = 200)]
        dirs: usize,
        #[arg(long, default_value_t = DIAG_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Slab-geometry E3 over the (E1, E2) triangle.
    SlabE3 {
        #[arg(long, default_value_t = 200)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct StateIo {
    /// JSON state; `-` or absent reads stdin.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StateRecord {
    e0: f64,
    e1: [f64; 3],
    e2: [[f64; 3]; 3],
}

/// Failure classes mapped onto exit codes.
enum Fail {
    /// Malformed input or I/O trouble: exit 1.
    Input(String),
    /// Valid input outside the realizable set: exit 2.
    NotRealizable,
}

impl From<io::Error> for Fail {
    fn from(e: io::Error) -> Self {
        Fail::Input(e.to_string())
    }
}

/// Writes every float with 17 significant digits.
struct FullPrecision;

impl serde_json::ser::Formatter for FullPrecision {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Fail::NotRealizable) => ExitCode::from(2),
    }
}

fn run(cmd: Command) -> Result<(), Fail> {
    match cmd {
        Command::Check(io) => cmd_check(&io),
        Command::Close {
            io,
            quad_order,
            verify,
        } => cmd_close(&io, quad_order, verify),
        Command::SampleNonneg { grid, fgrid, out } => {
            check_resolution("grid", grid)?;
            check_resolution("fgrid", fgrid)?;
            let samples = sample_nonneg_region(grid, fgrid);
            with_output(out.as_deref(), |w| write_region_csv(w, &samples))
        }
        Command::SampleHyp {
            grid,
            dirs,
            tol,
            out,
        } => {
            check_resolution("grid", grid)?;
            check_resolution("dirs", dirs)?;
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(Fail::Input(format!("--tol must be positive, got {tol}")));
            }
            let samples = sample_hyperbolic_region(grid, dirs, tol);
            with_output(out.as_deref(), |w| write_region_csv(w, &samples))
        }
        Command::SlabE3 { grid, out } => {
            check_resolution("grid", grid)?;
            let samples = slab_e3(grid);
            with_output(out.as_deref(), |w| write_slab_csv(w, &samples))
        }
    }
}

fn check_resolution(name: &str, n: usize) -> Result<(), Fail> {
    if n < 2 {
        return Err(Fail::Input(format!("--{name} must be at least 2, got {n}")));
    }
    Ok(())
}

fn with_output(
    path: Option<&Path>,
    body: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), Fail> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| Fail::Input(format!("{}: {e}", p.display())))?;
            let mut w = BufWriter::new(file);
            body(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            body(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn write_json(path: Option<&Path>, value: &Value) -> Result<(), Fail> {
    with_output(path, |w| {
        let mut ser = serde_json::Serializer::with_formatter(&mut *w, FullPrecision);
        serde::Serialize::serialize(value, &mut ser).map_err(io::Error::other)?;
        writeln!(w)
    })
}

fn read_state(io: &StateIo) -> Result<MomentState, Fail> {
    let mut text = String::new();
    match io.input.as_deref() {
        Some(p) if p != Path::new("-") => {
            File::open(p)
                .and_then(|mut f| f.read_to_string(&mut text))
                .map_err(|e| Fail::Input(format!("{}: {e}", p.display())))?;
        }
        _ => {
            io::stdin().read_to_string(&mut text)?;
        }
    }
    let rec: StateRecord =
        serde_json::from_str(&text).map_err(|e| Fail::Input(format!("malformed state: {e}")))?;
    build_moments(
        rec.e0,
        Vector3::from(rec.e1),
        Matrix3::from_fn(|i, j| rec.e2[i][j]),
    )
    .map_err(|e| Fail::Input(format!("invalid state: {e}")))
}

fn matrix_json(m: &Matrix3<f64>) -> Value {
    json!([
        [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
        [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
        [m[(2, 0)], m[(2, 1)], m[(2, 2)]]
    ])
}

fn vector_json(v: &Vector3<f64>) -> Value {
    json!([v[0], v[1], v[2]])
}

fn state_fields(m: &MomentState) -> serde_json::Map<String, Value> {
    let mut map = serde_json::Map::new();
    map.insert("e0".into(), json!(m.e0()));
    map.insert("e1".into(), vector_json(m.e1()));
    map.insert("e2".into(), matrix_json(m.e2()));
    map
}

fn frame_json(f: &ClosureFrame) -> Value {
    json!({ "lambda": f.lambda, "f": f.f, "rot": matrix_json(&f.rot) })
}

fn shape_json(s: &BetaShape) -> Value {
    let branch = match s.branch {
        Branch::Smooth => json!({ "kind": "smooth" }),
        Branch::DiracSingle { mu } => json!({ "kind": "dirac", "mu": mu }),
        Branch::DiracPair { weight_plus } => {
            json!({ "kind": "dirac_pair", "weight_plus": weight_plus })
        }
    };
    json!({ "gamma": s.gamma, "delta": s.delta, "branch": branch })
}

fn not_realizable(e: &ClosureError) -> bool {
    matches!(
        e,
        ClosureError::NotRealizable { .. }
            | ClosureError::NegativeEigenvalue { .. }
            | ClosureError::BoundaryViolation { .. }
    )
}

fn cmd_check(io: &StateIo) -> Result<(), Fail> {
    let m = read_state(io)?;
    let frame = eigenframe(&m);
    let margin = realizability_margin(&m);
    let realizable = matches!(margin, Ok(v) if v >= -b2_closure::closure::MARGIN_TOL * m.e0());
    let mut out = state_fields(&m);
    out.insert(
        "margin".into(),
        margin.as_ref().map_or(Value::Null, |v| json!(v)),
    );
    out.insert("lambda".into(), json!(frame.lambda));
    out.insert("f".into(), json!(frame.f));
    out.insert("realizable".into(), json!(realizable));
    if let Err(e) = &margin {
        out.insert("error".into(), json!(e.to_string()));
    }
    match nonneg_diagnostics(&m) {
        Ok(d) => {
            out.insert("delta".into(), json!(d.delta));
            out.insert("box_ok".into(), json!(d.box_ok));
            out.insert("sigma_pos".into(), json!(d.sigma_pos_ok));
            out.insert(
                "nonneg_guaranteed".into(),
                json!(realizable && d.guaranteed(m.e0())),
            );
        }
        Err(_) => {
            out.insert("delta".into(), Value::Null);
            out.insert("nonneg_guaranteed".into(), json!(false));
        }
    }
    write_json(io.out.as_deref(), &Value::Object(out))?;
    if realizable {
        Ok(())
    } else {
        Err(Fail::NotRealizable)
    }
}

fn moment_error(a: &AnsatzMoments, m: &MomentState) -> f64 {
    let mut err = (a.e0 - m.e0()).abs();
    err = err.max((a.e1 - m.e1()).amax());
    err.max((a.e2 - m.e2()).amax()) / m.e0()
}

fn cmd_close(io: &StateIo, quad_order: usize, verify: bool) -> Result<(), Fail> {
    check_resolution("quad-order", quad_order)?;
    let m = read_state(io)?;
    let ev = match evaluate_closure(&m) {
        Ok(ev) => ev,
        Err(e) if not_realizable(&e) => {
            eprintln!("not realizable: {e}");
            return Err(Fail::NotRealizable);
        }
        Err(e) => return Err(Fail::Input(format!("closure failed: {e}"))),
    };
    let fluxes = flux_vectors(&m, &ev.e3);
    let params = ev.params();
    let mut out = state_fields(&m);
    out.insert("margin".into(), json!(ev.margin));
    out.insert(
        "params".into(),
        json!({
            "frame": frame_json(&ev.frame),
            "sigma": ev.sigma,
            "w": ev.w,
            "shapes": ev.shapes.iter().map(|s| s.as_ref().map_or(Value::Null, shape_json)).collect::<Vec<_>>(),
        }),
    );
    out.insert("e3".into(), json!(ev.e3.independent()));
    out.insert(
        "fluxes".into(),
        json!({ "x": fluxes[0], "y": fluxes[1], "z": fluxes[2] }),
    );
    out.insert(
        "diagnostics".into(),
        json!({
            "delta": ev.diagnostics.delta,
            "box_ok": ev.diagnostics.box_ok,
            "sigma_pos": ev.diagnostics.sigma_pos_ok,
        }),
    );
    out.insert("unsafe".into(), json!(ev.unsafe_region));

    let mut verify_failed = false;
    if verify {
        let result = params
            .ok_or_else(|| "no ansatz parameters".to_string())
            .and_then(|p| {
                let terms = p.terms().map_err(|e| e.to_string())?;
                let semi = spherical_moments(&terms).map_err(|e| e.to_string())?;
                let quad =
                    spherical_moments_quadrature(&terms, quad_order).map_err(|e| e.to_string())?;
                Ok((moment_error(&semi, &m), moment_error(&quad, &m)))
            });
        let v = match result {
            Ok((semi, quad)) => {
                let pass = semi <= VERIFY_TOL && quad <= VERIFY_QUAD_TOL;
                verify_failed = !pass;
                json!({ "semi_analytic_error": semi, "quadrature_error": quad, "pass": pass })
            }
            Err(msg) => {
                verify_failed = true;
                json!({ "error": msg, "pass": false })
            }
        };
        out.insert("verify".into(), v);
    }
    write_json(io.out.as_deref(), &Value::Object(out))?;
    if verify_failed {
        return Err(Fail::Input("verification failed".into()));
    }
    Ok(())
}
