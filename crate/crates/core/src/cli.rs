//! The `kdiv` command line.
//!
//! Every command reads JSON (inline or from a file), writes one artifact to
//! `--out` or stdout, and exits 0 on success, 2 on invalid input and 3 when
//! a computation fails (hypothesis violated, LP iteration limit).

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::cmlab::{cm_witness_l1_linf, kpq_probe, non_cm_demo, ProbeSpec, WitnessConfig, WitnessStatus};
use crate::divisibility::{k_divide_eps, p_k_divide_eps, DEFAULT_EPSILON};
use crate::error::{Error, Result};
use crate::grid::DyadicGrid;
use crate::io::{csv_string, read_json_arg, to_json};
use crate::kfunctional::{k_curve, DEFAULT_ACCURACY};
use crate::kmethod::{e_hat_upper, k_space_norm, lions_peetre_norm, orbit_norm, EHatNorm, ParameterLattice};
use crate::lattice::convexify::{convexify_element, oplus};
use crate::lattice::probe::{l_convexity_probe, pq_convexity_probe};
use crate::lattice::{ConcavePL, Couple, Element, Leg};
use crate::rng::seeded;

#[derive(Debug, Clone, Parser)]
#[command(name = "kdiv", version, about = "K-functionals, K-method norms and K-divisibility")]
pub struct JobSpec {
    /// Dyadic grid as `min:max:per_octave` or JSON; defaults to $KDIV_GRID or -20:20:4.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Seed for every random family.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the artifact here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Relative accuracy for numeric K-functionals.
    #[arg(long, global = true, default_value_t = DEFAULT_ACCURACY)]
    pub accuracy: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// K(t, x) on the grid as CSV `t,K`, or the whole curve as JSON.
    Kfunc {
        #[arg(long)]
        couple: String,
        #[arg(long)]
        element: String,
        /// A single t instead of the grid.
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// K-space norm for a parameter, a Lions-Peetre norm, or an E-hat upper value.
    Norm(NormArgs),
    /// sup_t K(t, y) / K(t, x).
    Orbit {
        #[arg(long)]
        couple: String,
        #[arg(long)]
        element: String,
        #[arg(long)]
        x: String,
        /// Couple of x; defaults to --couple.
        #[arg(long)]
        x_couple: Option<String>,
    },
    /// Split x along majorants of its K-curve.
    Divide {
        #[arg(long)]
        couple: String,
        #[arg(long)]
        element: String,
        /// JSON array of concave curves.
        #[arg(long)]
        majorants: String,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
    },
    /// The same with majorants combined in l^p, 0 < p <= 1.
    Pdivide {
        #[arg(long)]
        couple: String,
        #[arg(long)]
        element: String,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        majorants: String,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
    },
    /// Operator T with T x = y bounded on (l1, linf).
    Witness {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, default_value_t = 1.0)]
        bound: f64,
        #[arg(long, default_value_t = crate::cmlab::DEFAULT_CAP)]
        cap: usize,
        /// Skip exact rational pivoting.
        #[arg(long)]
        float: bool,
    },
    /// Random one-sided probes of lattice constants.
    Probe(ProbeArgs),
    /// An element viewed in the p-convexification.
    Convexify {
        #[arg(long)]
        element: String,
        #[arg(long)]
        p: f64,
        /// Exponent of the l^r or L^r space holding the element.
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        /// Also report element (+) with.
        #[arg(long)]
        with: Option<String>,
    },
    /// Demonstrations.
    Demo {
        #[arg(value_enum)]
        which: Demo,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value = "inf", value_parser = parse_exponent)]
        q: f64,
        #[arg(long, default_value_t = 16)]
        nmax: usize,
    },
}

#[derive(Debug, Clone, Args)]
pub struct NormArgs {
    #[arg(long, required_unless_present = "ehat")]
    couple: Option<String>,
    #[arg(long, required_unless_present = "ehat")]
    element: Option<String>,
    /// Parameter lattice JSON.
    #[arg(long, conflicts_with_all = ["lions_peetre", "ehat"])]
    param: Option<String>,
    /// `theta:r` for the Lions-Peetre norm.
    #[arg(long, conflicts_with = "ehat")]
    lions_peetre: Option<String>,
    /// E-hat configuration JSON; needs --curve.
    #[arg(long, requires = "curve")]
    ehat: Option<String>,
    #[arg(long)]
    curve: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProbeKind {
    Kpq,
    PqConvexity,
    LConvexity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Demo {
    NonCm,
}

#[derive(Debug, Clone, Args)]
pub struct ProbeArgs {
    #[arg(value_enum)]
    kind: ProbeKind,
    /// Couple for the K(p,q) probe.
    #[arg(long, default_value = r#"{"kind":"sequence_lp","p":1,"q":"inf"}"#)]
    couple: String,
    /// The probed space is l^r.
    #[arg(long, default_value_t = 1.0)]
    r: f64,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    q: f64,
    #[arg(long, default_value_t = 4)]
    dim: usize,
    #[arg(long, default_value_t = 3)]
    pieces: usize,
    /// Trials (K(p,q)) or family budget (convexity probes).
    #[arg(long, default_value_t = 100)]
    trials: usize,
}

fn parse_exponent(s: &str) -> std::result::Result<f64, String> {
    match s {
        "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
        _ => s.parse::<f64>().map_err(|e| e.to_string()),
    }
}

fn grid_of(job: &JobSpec) -> Result<DyadicGrid> {
    match &job.grid {
        Some(g) => DyadicGrid::parse(g),
        None => DyadicGrid::from_env(),
    }
}

fn couple_arg(s: &str) -> Result<Couple> {
    let c: Couple = read_json_arg(s, "couple")?;
    c.validate()?;
    Ok(c)
}

fn element_arg(s: &str, what: &str) -> Result<Element> {
    let e: Element = read_json_arg(s, what)?;
    if e.is_empty() {
        return Err(Error::invalid(format!("{what}: empty element")));
    }
    Ok(e)
}

#[derive(Serialize)]
struct ScalarOut {
    #[serde(with = "crate::io::float_or_inf")]
    value: f64,
}

#[derive(Serialize)]
struct ConvexifyOut {
    element: Element,
    p: f64,
    norm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    oplus: Option<Element>,
}

/// Runs one job and returns the artifact text.
pub fn run(job: &JobSpec) -> Result<String> {
    let grid = grid_of(job)?;
    if !(job.accuracy > 0.0) {
        return Err(Error::invalid(format!("accuracy must be positive, got {}", job.accuracy)));
    }
    match &job.command {
        Command::Kfunc { couple, element, t, json } => {
            let c = couple_arg(couple)?;
            let x = element_arg(element, "element")?;
            let k = k_curve(&x, &c, &grid, job.accuracy)?;
            if *json {
                return Ok(to_json(&k));
            }
            let ts = match t {
                Some(t) if *t > 0.0 && t.is_finite() => vec![*t],
                Some(t) => return Err(Error::invalid(format!("t must be positive and finite, got {t}"))),
                None => grid.points(),
            };
            let rows: Vec<Vec<f64>> = ts.iter().map(|t| vec![*t, k.eval(*t)]).collect();
            Ok(csv_string(&["t", "K"], &rows))
        }
        Command::Norm(a) => norm(a, &grid, job.accuracy),
        Command::Orbit { couple, element, x, x_couple } => {
            let cy = couple_arg(couple)?;
            let cx = match x_couple {
                Some(s) => couple_arg(s)?,
                None => cy.clone(),
            };
            let y = element_arg(element, "element")?;
            let x = element_arg(x, "x")?;
            Ok(to_json(&ScalarOut { value: orbit_norm(&y, &cy, &x, &cx, &grid, job.accuracy)? }))
        }
        Command::Divide { couple, element, majorants, epsilon } => {
            let c = couple_arg(couple)?;
            let x = element_arg(element, "element")?;
            let m: Vec<ConcavePL> = read_json_arg(majorants, "majorants")?;
            Ok(to_json(&k_divide_eps(&x, &c, &m, *epsilon)?))
        }
        Command::Pdivide { couple, element, p, majorants, epsilon } => {
            let c = couple_arg(couple)?;
            let x = element_arg(element, "element")?;
            let m: Vec<ConcavePL> = read_json_arg(majorants, "majorants")?;
            Ok(to_json(&p_k_divide_eps(&x, &c, *p, &m, *epsilon)?))
        }
        Command::Witness { x, y, bound, cap, float } => {
            let (x, y) = (element_arg(x, "x")?, element_arg(y, "y")?);
            let (Element::Seq(xs), Element::Seq(ys)) = (&x, &y) else {
                return Err(Error::Unsupported("operator witnesses need sequence elements".into()));
            };
            let w = cm_witness_l1_linf(xs, ys, *bound, WitnessConfig { cap: *cap, exact: !float })?;
            if w.status == WitnessStatus::IterationLimit {
                return Err(Error::IterationLimit(w.pivots));
            }
            Ok(to_json(&w))
        }
        Command::Probe(a) => probe(a, &grid, job.seed),
        Command::Convexify { element, p, r, with } => {
            let x = element_arg(element, "element")?;
            let leg = match x {
                Element::Seq(_) => Leg::lp(*r),
                Element::Step(_) => Leg::FunctionLp { p: *r },
            };
            let cx = convexify_element(&x, *p, &leg)?;
            let plus = match with {
                Some(s) => Some(oplus(&x, &element_arg(s, "with")?, *p)?),
                None => None,
            };
            Ok(to_json(&ConvexifyOut { element: cx.element, p: *p, norm: cx.norm, oplus: plus }))
        }
        Command::Demo { which: Demo::NonCm, p, q, nmax } => {
            let rows: Vec<Vec<f64>> =
                non_cm_demo(*p, *q, *nmax)?.iter().map(|r| vec![r.n as f64, r.ratio_lp_l1, r.sup_k]).collect();
            Ok(csv_string(&["n", "ratio_lp_l1", "sup_K"], &rows))
        }
    }
}

fn norm(a: &NormArgs, grid: &DyadicGrid, accuracy: f64) -> Result<String> {
    if let Some(cfg) = &a.ehat {
        let cfg: EHatNorm = read_json_arg(cfg, "ehat")?;
        let f: ConcavePL = read_json_arg(a.curve.as_deref().unwrap_or_default(), "curve")?;
        return Ok(to_json(&e_hat_upper(&f, &cfg)?));
    }
    let c = couple_arg(a.couple.as_deref().unwrap_or_default())?;
    let x = element_arg(a.element.as_deref().unwrap_or_default(), "element")?;
    if let Some(lp) = &a.lions_peetre {
        let bad = || Error::invalid(format!("lions-peetre `{lp}`: expected theta:r"));
        let (th, r) = lp.split_once(':').ok_or_else(bad)?;
        let theta: f64 = th.trim().parse().map_err(|_| bad())?;
        let r = parse_exponent(r.trim()).map_err(|_| bad())?;
        return Ok(to_json(&ScalarOut { value: lions_peetre_norm(&x, &c, theta, r, grid, accuracy)? }));
    }
    let e: ParameterLattice = match &a.param {
        Some(p) => read_json_arg(p, "param")?,
        None => return Err(Error::invalid("norm needs --param, --lions-peetre or --ehat")),
    };
    Ok(to_json(&k_space_norm(&x, &c, &e, accuracy)?))
}

fn probe(a: &ProbeArgs, grid: &DyadicGrid, seed: u64) -> Result<String> {
    let mut rng = seeded(seed);
    let leg = Leg::lp(a.r);
    match a.kind {
        ProbeKind::Kpq => {
            let spec = ProbeSpec {
                couple: couple_arg(&a.couple)?,
                space: leg,
                p: a.p,
                q: a.q,
                dim: a.dim,
                max_pieces: a.pieces,
                grid: *grid,
            };
            Ok(to_json(&kpq_probe(&spec, a.trials, &mut rng)?))
        }
        ProbeKind::PqConvexity => Ok(to_json(&pq_convexity_probe(&leg, a.dim, a.p, a.q, a.trials, &mut rng)?)),
        ProbeKind::LConvexity => Ok(to_json(&l_convexity_probe(&leg, a.dim, a.trials, &mut rng)?)),
    }
}

/// Parses `args`, runs the job, writes the artifact and returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let job = match JobSpec::try_parse_from(args) {
        Ok(j) => j,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let text = match run(&job) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("kdiv: {e}");
            return e.exit_code();
        }
    };
    let written = match &job.out {
        Some(path) => std::fs::write(path, text.as_bytes()),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("kdiv: cannot write output: {e}");
        return 2;
    }
    0
}
