//! `famedkit` — exact Neumann–Zagier data, FAMED certification, and
//! desk-scale asymptotics for ordered ideal triangulations.
//!
//! Exit codes: 0 success, 1 mathematical-failure verdict (e.g. FAMED
//! false), 2 input error.

use clap::{Parser, Subcommand, ValueEnum};
use famedkit::angles::{self, AngleStructure};
use famedkit::exact::RatMat;
use famedkit::geometry;
use famedkit::kinematical;
use famedkit::nz::{self, Convention};
use famedkit::oneloop;
use famedkit::partition::{self, ContourSpec, OperatorPoly};
use famedkit::presets;
use famedkit::special::{self, QDilogParams};
use famedkit::tri::OrderedTriangulation;
use num_complex::Complex64;
use serde_json::{json, Map, Value};
use std::f64::consts::PI;
use num_traits::ToPrimitive;
use std::process::ExitCode;

const FORMAT_VERSION: &str = "1";

#[derive(Parser)]
#[command(name = "famedkit", version, about = "FAMED triangulation toolkit")]
struct Cli {
    /// Emit a JSON report on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for the quadrature stages (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    /// B = G'' - G'
    GppGp,
    /// B = G'' - G
    GppG,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::GppGp => Convention::GppMinusGp,
            ConventionArg::GppG => Convention::GppMinusG,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and validate a triangulation; summarize its combinatorics.
    Parse { file: String },
    /// Exact kinematical matrices R, A, B, det A, Q, G.
    Matrices { file: String },
    /// FAMED certificate.
    Famed {
        file: String,
        #[arg(long)]
        drop_edge: Option<usize>,
        #[arg(long, value_enum, default_value = "gpp-gp")]
        convention: ConventionArg,
    },
    /// Maximize the volume functional, optionally on a holonomy slice.
    Volume {
        file: String,
        #[arg(long)]
        slice: Option<f64>,
        /// Slice curve (angular holonomy constraint); default the longitude.
        #[arg(long, default_value = "l")]
        curve: String,
        #[arg(long)]
        csv: bool,
    },
    /// Solve the gluing equations at a holonomy target u.
    Solve {
        file: String,
        #[arg(long, default_value = "0,0", value_parser = parse_complex)]
        u: Complex64,
    },
    /// Continuation sweep of u from A to B.
    SweepU {
        file: String,
        #[arg(long, value_parser = parse_complex)]
        from: Complex64,
        #[arg(long, value_parser = parse_complex)]
        to: Complex64,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long)]
        csv: bool,
    },
    /// Strong combinatorial flattening and the 1-loop invariant.
    OneLoop {
        file: String,
        #[arg(long, default_value = "0,0", value_parser = parse_complex)]
        u: Complex64,
    },
    /// Evaluate Faddeev's quantum dilogarithm and its identity residuals.
    Qdilog {
        #[arg(long)]
        b: f64,
        #[arg(long, value_parser = parse_complex)]
        z: Complex64,
    },
    /// Partition modulus |Z(X, alpha)| by contour quadrature.
    Partition {
        file: String,
        /// "regular", "max", or a comma-separated angle list (radians).
        #[arg(long, default_value = "max")]
        alpha: String,
        #[arg(long)]
        b: f64,
        #[arg(long, default_value_t = 200)]
        nodes: usize,
    },
    /// b-sweep of |Z| with running rate/prefactor fits.
    Asympt {
        file: String,
        /// Comma-separated b values, decreasing.
        #[arg(long, default_value = "1.0,0.8,0.6,0.5,0.45,0.4")]
        sweep: String,
        #[arg(long, default_value = "max")]
        alpha: String,
        #[arg(long, default_value_t = 400)]
        nodes: usize,
        #[arg(long)]
        csv: bool,
    },
    /// Jones function at a point.
    Jones {
        file: String,
        #[arg(long, value_parser = parse_complex)]
        x: Complex64,
        #[arg(long)]
        b: f64,
        #[arg(long, default_value_t = 300)]
        nodes: usize,
    },
    /// Evaluate a candidate annihilating operator at q = 1 on the
    /// geometric branch.
    Aj {
        file: String,
        #[arg(long)]
        poly: String,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0.1)]
        radius: f64,
    },
    /// Run the acceptance suite.
    Accept {
        #[arg(long, default_value = "desk")]
        suite: String,
    },
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| "expected RE,IM".to_string())?;
    Ok(Complex64::new(
        re.trim().parse().map_err(|e| format!("bad real part: {e}"))?,
        im.trim().parse().map_err(|e| format!("bad imaginary part: {e}"))?,
    ))
}

fn f(x: f64) -> String {
    format!("{x:.16e}")
}

fn cstr(z: Complex64) -> String {
    format!("{}{}{}i", f(z.re), if z.im < 0.0 { "-" } else { "+" }, f(z.im.abs()))
}

fn ratmat_json(m: &RatMat) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| {
                Value::Array(m.row(i).iter().map(|r| Value::String(r.to_string())).collect())
            })
            .collect(),
    )
}

fn imat_json(m: &[Vec<i64>]) -> Value {
    json!(m)
}

struct Report {
    command: String,
    inputs: Map<String, Value>,
    outputs: Map<String, Value>,
    timings: Map<String, Value>,
    start: std::time::Instant,
}

impl Report {
    fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            inputs: Map::new(),
            outputs: Map::new(),
            timings: Map::new(),
            start: std::time::Instant::now(),
        }
    }

    fn input(&mut self, key: &str, value: Value) -> &mut Self {
        self.inputs.insert(key.to_string(), value);
        self
    }

    fn output(&mut self, key: &str, value: Value) -> &mut Self {
        self.outputs.insert(key.to_string(), value);
        self
    }

    fn finish(mut self, json_mode: bool, text: String) {
        self.timings.insert(
            "total_ms".to_string(),
            json!(self.start.elapsed().as_millis() as u64),
        );
        if json_mode {
            let report = json!({
                "command": self.command,
                "inputs": Value::Object(self.inputs),
                "outputs": Value::Object(self.outputs),
                "timings": Value::Object(self.timings),
                "versions": {
                    "artifact": env!("CARGO_PKG_VERSION"),
                    "format": FORMAT_VERSION,
                },
            });
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
        } else {
            print!("{text}");
        }
    }
}

fn load(file: &str) -> Result<OrderedTriangulation, String> {
    presets::load_path_or_preset(file)
}

fn resolve_alpha(tri: &OrderedTriangulation, spec: &str) -> Result<AngleStructure, String> {
    match spec {
        "regular" => Ok(AngleStructure::regular(tri.n())),
        "max" => {
            let rep = angles::maximize_volume(tri, None).map_err(|e| e.to_string())?;
            if !rep.converged {
                return Err("volume maximization did not converge".to_string());
            }
            Ok(rep.maximizer)
        }
        csv => {
            let vals: Result<Vec<f64>, _> = csv.split(',').map(|s| s.trim().parse()).collect();
            let angles = vals.map_err(|e| format!("bad angle list: {e}"))?;
            if angles.len() != 3 * tri.n() {
                return Err(format!("expected {} angles", 3 * tri.n()));
            }
            let alpha = AngleStructure { angles };
            let residual = alpha.balance_residual(tri);
            if residual > 1e-6 {
                return Err(format!(
                    "angle list is not a balanced angle structure (residual {residual:.2e})"
                ));
            }
            Ok(alpha)
        }
    }
}

fn run() -> Result<u8, String> {
    let cli = Cli::parse();
    if let Some(k) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    let json_mode = cli.json;
    match cli.cmd {
        Cmd::Parse { file } => {
            let tri = load(&file)?;
            let mut rep = Report::new("parse");
            rep.input("file", json!(file));
            rep.output("name", json!(tri.name));
            rep.output("tetrahedra", json!(tri.n()));
            rep.output("signs", json!(tri.signs()));
            rep.output("edge_classes", json!(tri.edge_classes.len()));
            rep.output(
                "edge_multiplicities",
                json!(tri
                    .edge_classes
                    .iter()
                    .map(|e| e.multiplicity())
                    .collect::<Vec<_>>()),
            );
            rep.output(
                "curves",
                json!(tri.curves.iter().map(|c| c.name.clone()).collect::<Vec<_>>()),
            );
            let text = format!(
                "{}: {} tetrahedra, signs {:?}, {} edge classes {:?}, curves {:?}\n",
                tri.name,
                tri.n(),
                tri.signs(),
                tri.edge_classes.len(),
                tri.edge_classes.iter().map(|e| e.multiplicity()).collect::<Vec<_>>(),
                tri.curves.iter().map(|c| c.name.clone()).collect::<Vec<_>>()
            );
            rep.finish(json_mode, text);
            Ok(0)
        }
        Cmd::Matrices { file } => {
            let tri = load(&file)?;
            let km = kinematical::build(&tri).map_err(|e| e.to_string())?;
            let mut rep = Report::new("matrices");
            rep.input("file", json!(file));
            rep.output("R", ratmat_json(&km.r));
            rep.output("A", ratmat_json(&km.a));
            rep.output("B", ratmat_json(&km.b));
            rep.output("det_A", json!(km.det_a.to_string()));
            rep.output("Q", ratmat_json(&km.q));
            rep.output("G", ratmat_json(&km.script_g));
            let text = format!(
                "R =\n{}A =\n{}B =\n{}det A = {}\nQ =\n{}G =\n{}",
                km.r, km.a, km.b, km.det_a, km.q, km.script_g
            );
            rep.finish(json_mode, text);
            Ok(0)
        }
        Cmd::Famed {
            file,
            drop_edge,
            convention,
        } => {
            let tri = load(&file)?;
            let conv: Convention = convention.into();
            let cert = nz::famed_check(&tri, drop_edge).map_err(|e| e.to_string())?;
            let nzs = {
                let curve = tri.curve("l").map_err(|e| e.to_string())?.clone();
                let gm = nz::assemble_gluing(&tri, &curve, drop_edge).map_err(|e| e.to_string())?;
                nz::assemble_nz(&tri, &gm, conv)
            };
            let mut rep = Report::new("famed");
            rep.input("file", json!(file));
            rep.input("convention", json!(format!("{conv:?}")));
            rep.output("certificate", serde_json::to_value(&cert).unwrap());
            rep.output("A_bold", imat_json(&nzs.abold));
            rep.output("B_bold", imat_json(&nzs.bbold));
            rep.output("nu_over_pi", json!(nzs.nu));
            let text = format!(
                "famed = {}\n  angle space nonempty: {}\n  det A = {} (nonzero: {})\n  det B = {} (nonzero: {})\n  duality B^-1 A = G: {}\n  duality under G''-G convention: {}\n",
                cert.famed,
                cert.angle_space_nonempty,
                cert.det_a,
                cert.det_a_nonzero,
                cert.det_b,
                cert.det_b_nonzero,
                cert.duality_holds,
                cert.alt_duality_holds
            );
            let famed = cert.famed;
            rep.finish(json_mode, text);
            Ok(if famed { 0 } else { 1 })
        }
        Cmd::Volume {
            file,
            slice,
            curve,
            csv,
        } => {
            let tri = load(&file)?;
            let slice_arg = slice.map(|t| (curve.as_str(), t));
            let vrep = angles::maximize_volume(&tri, slice_arg).map_err(|e| e.to_string())?;
            let mut rep = Report::new("volume");
            rep.input("file", json!(file));
            rep.input("slice", json!(slice));
            rep.input("curve", json!(curve));
            rep.output("value", json!(vrep.value));
            rep.output("converged", json!(vrep.converged));
            rep.output("kkt_residual", json!(vrep.kkt_residual));
            rep.output("maximizer", json!(vrep.maximizer.angles));
            let text = if csv {
                format!(
                    "theta,volume,converged\n{},{},{}\n",
                    slice.map_or("".to_string(), f),
                    f(vrep.value),
                    vrep.converged
                )
            } else {
                format!(
                    "volume = {}\nconverged = {} (kkt residual {})\nmaximizer = {:?}\n",
                    f(vrep.value),
                    vrep.converged,
                    f(vrep.kkt_residual),
                    vrep.maximizer.angles
                )
            };
            let ok = vrep.converged;
            rep.finish(json_mode, text);
            Ok(if ok { 0 } else { 1 })
        }
        Cmd::Solve { file, u } => {
            let tri = load(&file)?;
            let nzs = nz::nz_for_longitude(&tri, None).map_err(|e| e.to_string())?;
            let sol = geometry::solve_gluing(&nzs, u, None).map_err(|e| e.to_string())?;
            let mut rep = Report::new("solve");
            rep.input("file", json!(file));
            rep.input("u", json!(cstr(u)));
            rep.output("residual", json!(sol.residual));
            rep.output("geometric", json!(sol.geometric));
            rep.output("volume", json!(sol.volume()));
            rep.output(
                "z",
                json!(sol.z.iter().map(|z| cstr(*z)).collect::<Vec<_>>()),
            );
            let mut text = format!(
                "residual = {}\ngeometric = {}\nvolume = {}\n",
                f(sol.residual),
                sol.geometric,
                f(sol.volume())
            );
            for (k, z) in sol.z.iter().enumerate() {
                text += &format!("z[{k}] = {}\n", cstr(*z));
            }
            rep.finish(json_mode, text);
            Ok(0)
        }
        Cmd::SweepU {
            file,
            from,
            to,
            steps,
            csv,
        } => {
            let tri = load(&file)?;
            let nzs = nz::nz_for_longitude(&tri, None).map_err(|e| e.to_string())?;
            let path = geometry::sweep_u(&nzs, from, to, steps).map_err(|e| e.to_string())?;
            let mut rep = Report::new("sweep-u");
            rep.input("file", json!(file));
            rep.input("from", json!(cstr(from)));
            rep.input("to", json!(cstr(to)));
            rep.input("steps", json!(steps));
            let rows: Vec<Value> = path
                .iter()
                .map(|s| {
                    json!({
                        "u": cstr(s.u_target),
                        "volume": s.volume(),
                        "geometric": s.geometric,
                        "residual": s.residual,
                    })
                })
                .collect();
            rep.output("path", Value::Array(rows));
            let mut text = if csv {
                "u_re,u_im,volume,geometric,residual\n".to_string()
            } else {
                String::new()
            };
            for s in &path {
                if csv {
                    text += &format!(
                        "{},{},{},{},{}\n",
                        f(s.u_target.re),
                        f(s.u_target.im),
                        f(s.volume()),
                        s.geometric,
                        f(s.residual)
                    );
                } else {
                    text += &format!(
                        "u = {}  volume = {}  geometric = {}\n",
                        cstr(s.u_target),
                        f(s.volume()),
                        s.geometric
                    );
                }
            }
            rep.finish(json_mode, text);
            Ok(0)
        }
        Cmd::OneLoop { file, u } => {
            let tri = load(&file)?;
            let nzs = nz::nz_for_longitude(&tri, None).map_err(|e| e.to_string())?;
            let flat = oneloop::strong_flattening(&tri).map_err(|e| e.to_string())?;
            let sol = geometry::solve_gluing(&nzs, u, None).map_err(|e| e.to_string())?;
            let (tau, tau_alt) =
                oneloop::one_loop_both_conventions(&tri, &sol, &flat, None).map_err(|e| e.to_string())?;
            let mut rep = Report::new("one-loop");
            rep.input("file", json!(file));
            rep.input("u", json!(cstr(u)));
            rep.output("flattening_f", json!(flat.f));
            rep.output("flattening_fp", json!(flat.fp));
            rep.output("flattening_fpp", json!(flat.fpp));
            rep.output("strong", json!(flat.strong));
            rep.output("tau", json!(cstr(tau.tau)));
            rep.output("tau_alt_convention", json!(cstr(tau_alt.tau)));
            rep.output(
                "conventions_agree",
                json!((tau.tau - tau_alt.tau).norm() < 1e-9 * tau.tau.norm().max(1.0)),
            );
            let text = format!(
                "flattening f = {:?}, f' = {:?}, f'' = {:?} (strong: {})\ntau (B = G''-G') = {}\ntau (B = G''-G)  = {}\n",
                flat.f,
                flat.fp,
                flat.fpp,
                flat.strong,
                cstr(tau.tau),
                cstr(tau_alt.tau)
            );
            rep.finish(json_mode, text);
            Ok(0)
        }
        Cmd::Qdilog { b, z } => {
            if b <= 0.0 {
                return Err("b must be positive".to_string());
            }
            let p = QDilogParams::new(b);
            let v = special::phi_b(z, &p).map_err(|e| e.to_string())?;
            let inv = special::phi_b(-z, &p).map_err(|e| e.to_string())?;
            let c = Complex64::new(0.0, PI / 12.0 * (b * b + 1.0 / (b * b))).exp();
            let inversion_residual =
                (v * inv - c * (Complex64::new(0.0, PI) * z * z).exp()).norm();
            let unitarity_residual = if z.im == 0.0 {
                Some((v.norm() - 1.0).abs())
            } else {
                None
            };
            let mut rep = Report::new("qdilog");
            rep.input("b", json!(b));
            rep.input("z", json!(cstr(z)));
            rep.output("phi_b", json!(cstr(v)));
            rep.output("inversion_residual", json!(inversion_residual));
            rep.output("unitarity_residual", json!(unitarity_residual));
            let mut text = format!(
                "Phi_b({}) = {}\ninversion residual = {}\n",
                cstr(z),
                cstr(v),
                f(inversion_residual)
            );
            if let Some(u) = unitarity_residual {
                text += &format!("unitarity residual = {}\n", f(u));
            }
            rep.finish(json_mode, text);
            Ok(0)
        }
        Cmd::Partition {
            file,
            alpha,
            b,
            nodes,
        } => {
            let tri = load(&file)?;
            let km = kinematical::build(&tri).map_err(|e| e.to_string())?;
            let alpha_s = resolve_alpha(&tri, &alpha)?;
            let spec = ContourSpec {
                nodes_per_axis: nodes,
                ..Default::default()
            };
            let v = partition::partition_modulus(&tri, &km, &alpha_s, b, &spec)
                .map_err(|e| e.to_string())?;
            let mut rep = Report::new("partition");
            rep.input("file", json!(file));
            rep.input("alpha", json!(alpha));
            rep.input("b", json!(b));
            rep.input("nodes", json!(nodes));
            rep.output("modulus", json!(v));
            rep.output("log_rate", json!(2.0 * PI * b * b * v.ln()));
            rep.finish(json_mode, format!("|Z| = {}\n2 pi b^2 log|Z| = {}\n", f(v), f(2.0 * PI * b * b * v.ln())));
            Ok(0)
        }
        Cmd::Asympt {
            file,
            sweep,
            alpha,
            nodes,
            csv,
        } => {
            let tri = load(&file)?;
            let km = kinematical::build(&tri).map_err(|e| e.to_string())?;
            let nzs = nz::nz_for_longitude(&tri, None).map_err(|e| e.to_string())?;
            let flat = oneloop::strong_flattening(&tri).map_err(|e| e.to_string())?;
            let alpha_s = resolve_alpha(&tri, &alpha)?;
            let bs: Result<Vec<f64>, _> = sweep.split(',').map(|s| s.trim().parse()).collect();
            let bs = bs.map_err(|e| format!("bad sweep: {e}"))?;
            let spec = ContourSpec {
                nodes_per_axis: nodes,
                ..Default::default()
            };
            let mut samples = Vec::new();
            for &b in &bs {
                let v = partition::partition_modulus(&tri, &km, &alpha_s, b, &spec)
                    .map_err(|e| e.to_string())?;
                samples.push((b, v));
            }
            // prediction for the rate/prefactor columns
            let sol = geometry::solve_gluing(&nzs, Complex64::new(0.0, 0.0), None)
                .map_err(|e| e.to_string())?;
            let vol = sol.volume();
            let tau = oneloop::one_loop_tau(&nzs, &sol, &flat).map_err(|e| e.to_string())?;
            let det_a = ToPrimitive::to_f64(&km.det_a).unwrap().abs();
            let det_b_inv = 1.0 / ToPrimitive::to_f64(&nzs.det_b).unwrap();
            let pred_prefactor =
                1.0 / (det_a * (2.0 * det_b_inv).abs().sqrt() * tau.tau.norm().sqrt());
            let fit = partition::fit_asymptotics(&samples, -vol, pred_prefactor)
                .map_err(|e| e.to_string())?;
            let mut rep = Report::new("asympt");
            rep.input("file", json!(file));
            rep.input("sweep", json!(bs));
            rep.input("alpha", json!(alpha));
            rep.output("report", serde_json::to_value(&fit).unwrap());
            let mut text = if csv {
                "b,modulus,rate_partial,prefactor_partial\n".to_string()
            } else {
                String::new()
            };
            for &(b, v) in &samples {
                let rate_partial = 2.0 * PI * b * b * v.ln();
                let prefactor_partial = v * (vol / (2.0 * PI * b * b)).exp();
                if csv {
                    text += &format!("{},{},{},{}\n", f(b), f(v), f(rate_partial), f(prefactor_partial));
                } else {
                    text += &format!(
                        "b = {b}: |Z| = {}, 2 pi b^2 log|Z| = {}, prefactor so far = {}\n",
                        f(v),
                        f(rate_partial),
                        f(prefactor_partial)
                    );
                }
            }
            if !csv {
                text += &format!(
                    "fitted rate = {} (predicted {})\nfitted prefactor = {} (predicted {})\n",
                    f(fit.fitted_rate),
                    f(fit.predicted_rate),
                    f(fit.fitted_prefactor),
                    f(fit.predicted_prefactor)
                );
            }
            rep.finish(json_mode, text);
            Ok(0)
        }
        Cmd::Jones { file, x, b, nodes } => {
            let tri = load(&file)?;
            let km = kinematical::build(&tri).map_err(|e| e.to_string())?;
            let nzs = nz::nz_for_longitude(&tri, None).map_err(|e| e.to_string())?;
            let spec = ContourSpec {
                nodes_per_axis: nodes,
                ..Default::default()
            };
            let v = partition::jones_function(&tri, &km, &nzs, x, b, &spec)
                .map_err(|e| e.to_string())?;
            let jv = partition::jones_variable(&tri, &nzs).map_err(|e| e.to_string())?;
            let mut rep = Report::new("jones");
            rep.input("file", json!(file));
            rep.input("x", json!(cstr(x)));
            rep.input("b", json!(b));
            rep.output("value", json!(cstr(v)));
            rep.output("modulus", json!(v.norm()));
            rep.output("n1", json!(jv.n1.to_string()));
            rep.output("n2", json!(jv.n2.to_string()));
            rep.finish(
                json_mode,
                format!("J(x) = {}\n|J| = {}\n", cstr(v), f(v.norm())),
            );
            Ok(0)
        }
        Cmd::Aj {
            file,
            poly,
            samples,
            radius,
        } => {
            let tri = load(&file)?;
            let nzs = nz::nz_for_longitude(&tri, None).map_err(|e| e.to_string())?;
            let text = std::fs::read_to_string(&poly).map_err(|e| format!("{poly}: {e}"))?;
            let op = OperatorPoly::parse(&text)?;
            let report = partition::aj_evaluate(&op, &tri, &nzs, samples, radius)
                .map_err(|e| e.to_string())?;
            let divisible = report.max_abs < 1e-8;
            let mut rep = Report::new("aj");
            rep.input("file", json!(file));
            rep.input("poly", json!(poly));
            rep.input("samples", json!(samples));
            rep.input("radius", json!(radius));
            rep.output("max_abs", json!(report.max_abs));
            rep.output("divisible_verdict", json!(divisible));
            rep.finish(
                json_mode,
                format!(
                    "max |A(M, L, 1)| on the geometric branch = {}\nverdict: {}\n",
                    f(report.max_abs),
                    if divisible {
                        "vanishes (consistent with divisibility by the geometric component)"
                    } else {
                        "does not vanish"
                    }
                ),
            );
            Ok(if divisible { 0 } else { 1 })
        }
        Cmd::Accept { suite } => {
            if suite != "desk" {
                return Err(format!("unknown suite '{suite}'"));
            }
            let results = famedkit::accept::run_all();
            let all_pass = results.iter().all(|c| c.passed);
            let mut rep = Report::new("accept");
            rep.input("suite", json!(suite));
            rep.output("criteria", serde_json::to_value(&results).unwrap());
            rep.output("all_pass", json!(all_pass));
            let mut text = String::new();
            for c in &results {
                text += &format!(
                    "{}: {} ({} ms)\n",
                    c.id,
                    if c.passed { "PASS" } else { "FAIL" },
                    c.millis
                );
                for d in &c.details {
                    text += &format!("    {d}\n");
                }
            }
            text += &format!("overall: {}\n", if all_pass { "PASS" } else { "FAIL" });
            rep.finish(json_mode, text);
            Ok(if all_pass { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
