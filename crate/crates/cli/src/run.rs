//! Command implementations. Each command renders one text artifact.

use std::fmt::Write as _;

use qubit_landscape::dynamics::{objective, HessianSample};
use qubit_landscape::format::{problem_from_text, problem_to_text};
use qubit_landscape::landscape::trap_free_verdict;
use qubit_landscape::optimize::{optimize, random_start};
use qubit_landscape::problem::{critical_time, exceptional_control, reduce, vectors, Preset};
use qubit_landscape::regularity::span_rank;
use qubit_landscape::scan::{run_scan, ScanConfig};
use qubit_landscape::{
    classify, hessian_kernel_at_zero, phi_psi, probe_saddle, Bloch3, ControlProblem,
    PiecewiseControl,
};
use serde::Serialize;
use serde_json::json;

use crate::args::{Command, Format, ProblemArgs};
use crate::error::Failure;

/// File contents a command reads; recorded verbatim in the manifest.
#[derive(Debug, Clone, Default, Serialize, serde::Deserialize)]
pub struct Inputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub problem: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub control: Option<String>,
}

impl Inputs {
    /// Reads the files named by `cmd`.
    pub fn load(cmd: &Command) -> Result<Self, Failure> {
        let read = |p: &std::path::Path| {
            std::fs::read_to_string(p)
                .map_err(|e| Failure::Config(format!("cannot read {}: {e}", p.display())))
        };
        let mut inputs = Inputs::default();
        let (problem, control) = match cmd {
            Command::Info(a) | Command::Classify(a) | Command::TrapFree(a) | Command::ProbeSaddle(a) => {
                (Some(&a.problem), None)
            }
            Command::Evaluate(a) => (Some(&a.problem.problem), Some(&a.control)),
            Command::Hessian(a) => (Some(&a.problem.problem), None),
            Command::SpanRank(a) => (Some(&a.problem.problem), a.control.as_ref()),
            Command::Optimize(a) => (Some(&a.problem.problem), None),
            Command::Scan(_) | Command::Preset(_) | Command::Replay(_) => (None, None),
        };
        if let Some(p) = problem {
            inputs.problem = Some(read(p)?);
        }
        if let Some(c) = control {
            inputs.control = Some(read(c)?);
        }
        Ok(inputs)
    }

    fn problem(&self, args: &ProblemArgs) -> Result<ControlProblem, Failure> {
        let text = self
            .problem
            .as_deref()
            .ok_or_else(|| Failure::Config("missing problem input".into()))?;
        let p = problem_from_text(text)?;
        Ok(match args.horizon {
            Some(t) => p.with_horizon(t)?,
            None => p,
        })
    }

    fn control(&self) -> Result<Option<PiecewiseControl>, Failure> {
        self.control
            .as_deref()
            .map(|t| PiecewiseControl::from_text(t).map_err(Failure::from))
            .transpose()
    }
}

/// Rendered output plus the resolved configuration recorded in the manifest.
pub struct Rendered {
    pub text: String,
    pub resolved: serde_json::Value,
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::Config(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn record_format(cmd: &Command) -> Result<(), Failure> {
    match cmd.output().and_then(|o| o.format) {
        Some(Format::Csv) => Err(Failure::Config(format!(
            "`{}` produces a JSON record; --format csv is available for scan and hessian",
            cmd.name()
        ))),
        _ => Ok(()),
    }
}

fn resolved_problem(p: &ControlProblem) -> serde_json::Value {
    serde_json::to_value(p).unwrap_or(serde_json::Value::Null)
}

pub fn execute(cmd: &Command, inputs: &Inputs) -> Result<Rendered, Failure> {
    match cmd {
        Command::Info(a) => {
            record_format(cmd)?;
            let p = inputs.problem(a)?;
            info(&p)
        }
        Command::Evaluate(a) => {
            record_format(cmd)?;
            let p = inputs.problem(&a.problem)?;
            let f = inputs
                .control()?
                .ok_or_else(|| Failure::Config("missing control input".into()))?;
            let j = objective(&p, &f)?;
            let f0 = exceptional_control(&p.h0, &p.v)?;
            let j_exceptional = objective(&p, &PiecewiseControl::constant(p.horizon, f0)?)?;
            Ok(Rendered {
                text: to_json(&json!({
                    "horizon": p.horizon,
                    "intervals": f.len(),
                    "J": j,
                    "J_exceptional": j_exceptional,
                }))?,
                resolved: resolved_problem(&p),
            })
        }
        Command::Hessian(a) => {
            let p = inputs.problem(&a.problem)?;
            hessian(&p, a.grid.rows, a.grid.cols, a.problem.output.format)
        }
        Command::Classify(a) => {
            record_format(cmd)?;
            let p = inputs.problem(a)?;
            let pv = vectors(&reduce(&p)?)?;
            let label = classify(&pv)?;
            let (phi, psi) = phi_psi(&pv);
            Ok(Rendered {
                text: to_json(&json!({ "label": label.code(), "Phi": phi, "Psi": psi }))?,
                resolved: resolved_problem(&p),
            })
        }
        Command::TrapFree(a) => {
            record_format(cmd)?;
            let p = inputs.problem(a)?;
            let verdict = trap_free_verdict(&vectors(&reduce(&p)?)?);
            Ok(Rendered {
                text: to_json(&verdict)?,
                resolved: resolved_problem(&p),
            })
        }
        Command::ProbeSaddle(a) => {
            record_format(cmd)?;
            let p = inputs.problem(a)?;
            let report = probe_saddle(&reduce(&p)?)?;
            Ok(Rendered {
                text: to_json(&report)?,
                resolved: resolved_problem(&p),
            })
        }
        Command::SpanRank(a) => {
            record_format(cmd)?;
            let p = inputs.problem(&a.problem)?;
            let f = match inputs.control()? {
                Some(f) => f,
                None => PiecewiseControl::constant(p.horizon, exceptional_control(&p.h0, &p.v)?)?,
            };
            let rank = span_rank(&p, &f, a.samples)?;
            Ok(Rendered {
                text: to_json(&json!({ "rank": rank, "intervals": f.len(), "samples": a.samples }))?,
                resolved: resolved_problem(&p),
            })
        }
        Command::Scan(a) => {
            let cfg = ScanConfig {
                horizon: a.horizon,
                grid_phi: a.grid.rows,
                grid_psi: a.grid.cols,
                samples: a.samples,
                intervals: a.intervals,
                amplitude_sigma: a.sigma,
                seed: a.seed,
                r: Bloch3::EY,
            };
            let grid = run_scan(&cfg)?;
            let text = match a.output.format.unwrap_or(Format::Csv) {
                Format::Csv => grid.to_csv(),
                Format::Json => to_json(&grid)?,
            };
            Ok(Rendered {
                text,
                resolved: serde_json::to_value(&cfg).unwrap_or_default(),
            })
        }
        Command::Optimize(a) => {
            record_format(cmd)?;
            let p = inputs.problem(&a.problem)?;
            let start = random_start(p.horizon, a.intervals, a.sigma, a.seed)?;
            let mut report = optimize(&p, a.intervals, &start, a.max_iter, a.tol)?;
            report.start_seed = Some(a.seed);
            Ok(Rendered {
                text: to_json(&report)?,
                resolved: resolved_problem(&p),
            })
        }
        Command::Preset(a) => {
            if a.output.format.is_some() {
                return Err(Failure::Config("`preset` writes a problem file; --format does not apply".into()));
            }
            let preset = match (Preset::by_name(&a.name), a.v, a.phi, a.psi) {
                (None, ..) => {
                    return Err(Failure::Config(format!(
                        "unknown preset `{}`; expected one of {}",
                        a.name,
                        Preset::NAMES.join(", ")
                    )))
                }
                (Some(Preset::SpinRotation { .. }), v, None, None) => {
                    let v = v.unwrap_or(crate::args::Pair(1.0, 0.0));
                    Preset::SpinRotation { vx: v.0, vy: v.1 }
                }
                (Some(Preset::ScanDefault { .. }), None, phi, psi) => Preset::ScanDefault {
                    phi: phi.unwrap_or(0.0),
                    psi: psi.unwrap_or(0.0),
                },
                (Some(Preset::LandauZener), None, None, None) => Preset::LandauZener,
                _ => {
                    return Err(Failure::Config(format!(
                        "preset `{}` does not take these options (--v: spin-rotation; --phi/--psi: scan-default)",
                        a.name
                    )))
                }
            };
            let p = preset.problem(a.horizon)?;
            Ok(Rendered {
                text: format!("# preset {}\n{}", a.name, problem_to_text(&p)),
                resolved: resolved_problem(&p),
            })
        }
        Command::Replay(_) => Err(Failure::Config("replay cannot be nested".into())),
    }
}

fn info(p: &ControlProblem) -> Result<Rendered, Failure> {
    let f0 = exceptional_control(&p.h0, &p.v).ok();
    let t0 = critical_time(&p.h0, &p.v).ok();
    let (reduced, reduction_error) = match reduce(p) {
        Ok(rp) => {
            let pv = vectors(&rp);
            let canonical = match pv {
                Ok(pv) => {
                    let (phi, psi) = phi_psi(&pv);
                    json!({
                        "a_t": pv.a_t,
                        "alpha": pv.alpha,
                        "beta": pv.beta,
                        "phi_v": pv.phi_v,
                        "Phi": phi,
                        "Psi": psi,
                        "label": classify(&pv).ok().map(|l| l.code()),
                    })
                }
                Err(e) => json!({ "error": e.to_string() }),
            };
            (
                json!({
                    "v": rp.v,
                    "r": rp.r,
                    "a0": rp.a0,
                    "a_trace": rp.a_trace,
                    "horizon": rp.horizon,
                    "time_scale": rp.time_scale,
                    "canonical": canonical,
                }),
                None,
            )
        }
        Err(e) => (serde_json::Value::Null, Some(e.to_string())),
    };
    Ok(Rendered {
        text: to_json(&json!({
            "horizon": p.horizon,
            "f0": f0,
            "T0": t0,
            "reduced": reduced,
            "reduction_error": reduction_error,
        }))?,
        resolved: resolved_problem(p),
    })
}

fn hessian(
    p: &ControlProblem,
    rows: usize,
    cols: usize,
    format: Option<Format>,
) -> Result<Rendered, Failure> {
    if rows < 2 || cols < 2 {
        return Err(Failure::Config(format!("hessian grid must be at least 2x2, got {rows}x{cols}")));
    }
    let pv = vectors(&reduce(p)?)?;
    let t = pv.horizon;
    let mut samples: Vec<HessianSample> = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            let t1 = t * i as f64 / (rows - 1) as f64;
            let t2 = t * j as f64 / (cols - 1) as f64;
            samples.push(hessian_kernel_at_zero(&pv, t1, t2)?);
        }
    }
    let text = match format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = String::from("t1,t2,value\n");
            for h in &samples {
                let _ = writeln!(s, "{:.16e},{:.16e},{:.16e}", h.t1, h.t2, h.value);
            }
            s
        }
        Format::Json => to_json(&samples)?,
    };
    Ok(Rendered {
        text,
        resolved: resolved_problem(p),
    })
}
