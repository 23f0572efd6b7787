use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use oscint_core::degeneracy::{is_degenerate, DegeneracyAnalyzer};
use oscint_core::linalg::Mat;
use oscint_core::poly::MultiPoly;
use oscint_core::quadrature::{self, fit_decay, DecaySweep, RowStatus, SweepMode};
use oscint_core::resolution::{self, derived_projections, verify_resolution, ResolutionJson};
use oscint_core::wire::{rows_to_json, MapsJson, PolyJson};

use crate::input::{parse, RunSpec, SnarlInput};
use crate::record::RunRecord;
use crate::{CliError, CliResult, Exit, TOOL_VERSION};

pub struct Outcome {
    pub record: RunRecord,
    /// Some sweep row stopped at the node cap.
    pub unconverged: bool,
}

impl Outcome {
    fn exact(record: RunRecord) -> Self {
        Outcome {
            record,
            unconverged: false,
        }
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("plain data serializes")
}

#[derive(Serialize, Deserialize)]
struct ResolveInput {
    snarl: SnarlInput,
    seed: u64,
}

/// Resolution of a snarl, with its verification and, for snarls given by maps, the
/// derived maps of every new entry.
pub fn resolve(snarl: &SnarlInput, seed: u64) -> CliResult<Outcome> {
    let s = snarl.snarl()?;
    let r = resolution::resolve(&s, seed)?;
    let report = verify_resolution(&r);
    if !report.passed {
        return Err(CliError {
            exit: Exit::Genericity,
            message: "resolution failed its own verification".into(),
            detail: Some(to_value(&report)),
        });
    }
    let mut output = json!({
        "steps": r.steps.len(),
        "terminal_general_position": r.terminal_general_position,
        "resolution": to_value(&ResolutionJson::from(&r)),
        "verification": to_value(&report),
    });
    if let Some(mut maps) = snarl.maps()? {
        let mut derived = Vec::new();
        for (k, step) in r.steps.iter().enumerate() {
            let (pn, pn1) = derived_projections(step, &maps)?;
            maps.retain(|(l, _)| l != &step.witness.alpha0);
            derived.push(json!({
                "step": k,
                "alpha0": step.witness.alpha0,
                "maps": [
                    {"label": step.witness.beta1, "rows": to_value(&rows_to_json(&pn1))},
                    {"label": step.witness.beta2, "rows": to_value(&rows_to_json(&pn))},
                ],
            }));
            maps.push((step.witness.beta1.clone(), pn1));
            maps.push((step.witness.beta2.clone(), pn));
        }
        output["derived_maps"] = Value::Array(derived);
        output["terminal_maps"] = to_value(&MapsJson::from_maps(s.ambient_dim(), &maps));
    }
    let mut seeds = vec![seed];
    seeds.extend(r.steps.iter().flat_map(|st| st.seeds_used.iter().copied()));
    let input = to_value(&ResolveInput {
        snarl: snarl.clone(),
        seed,
    });
    Ok(Outcome::exact(RunRecord::new(
        "resolve", input, output, seeds,
    )))
}

#[derive(Serialize, Deserialize)]
struct DegeneracyInput {
    poly: PolyJson,
    maps: MapsJson,
}

pub fn degeneracy(poly: &PolyJson, maps: &MapsJson) -> CliResult<Outcome> {
    if poly.vars != maps.m {
        return Err(CliError::input(format!(
            "polynomial in {} variables but maps on a space of dimension {}",
            poly.vars, maps.m
        )));
    }
    let p = MultiPoly::try_from(poly.clone())?;
    let labelled = maps.to_maps()?;
    let report = is_degenerate(&p, &labelled)?;
    let mats: Vec<Mat> = labelled.iter().map(|x| x.1.clone()).collect();
    let analyzer = DegeneracyAnalyzer::cached(p.num_vars(), &mats, p.degree())?;
    let mut output = to_value(&report);
    output["degree"] = json!(p.degree());
    output["degenerate_dimension"] = json!(analyzer.rank());
    output["space_dimension"] = json!(analyzer.monomial_basis().len());
    let input = to_value(&DegeneracyInput {
        poly: poly.clone(),
        maps: maps.clone(),
    });
    Ok(Outcome::exact(RunRecord::new(
        "degeneracy",
        input,
        output,
        vec![],
    )))
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct SweepOptions {
    pub adversarial: bool,
    pub allow_unconverged: bool,
}

#[derive(Serialize, Deserialize)]
struct SweepInput {
    runspec: RunSpec,
    allow_unconverged: bool,
}

pub fn sweep(spec: &RunSpec, opts: SweepOptions) -> CliResult<Outcome> {
    let mut spec = spec.clone();
    spec.adversarial |= opts.adversarial;
    let p = MultiPoly::try_from(spec.phase.clone())?;
    let maps = spec.labelled_maps()?;
    let pis: Vec<Mat> = maps.iter().map(|x| x.1.clone()).collect();
    let cfg = spec.quad.config(p.num_vars());
    let mode = if spec.adversarial {
        let report = is_degenerate(&p, &maps)?;
        let Some(cert) = report.certificate else {
            return Err(CliError::input(format!(
                "phase is nondegenerate (quotient norm {}); no adversarial functions exist",
                report.quotient_norm
            )));
        };
        SweepMode::Adversarial {
            cert: cert.into_iter().map(|t| (t.label, t.q)).collect(),
            boxes: spec.supports(&maps),
        }
    } else {
        SweepMode::Fixed(spec.bumps(&maps))
    };
    let mut result: DecaySweep = quadrature::sweep(&p, &pis, &mode, &spec.lambdas, &cfg)?;
    if let Some(bad) = result.rows.iter().find(|r| r.status == RowStatus::Failed) {
        return Err(CliError::input(format!(
            "λ = {}: {}",
            bad.lambda,
            bad.error.clone().unwrap_or_default()
        )));
    }
    let tail_from = spec.tail_from.unwrap_or(spec.lambdas[0]);
    result.fit = fit_decay(&result, tail_from).ok();
    let unconverged = !result.all_converged();
    let mut output = to_value(&result);
    output["mode"] = json!(if spec.adversarial {
        "adversarial"
    } else {
        "fixed"
    });
    output["relative_spread"] = json!(result.relative_spread());
    let seeds = spec.seed.into_iter().collect();
    let input = to_value(&SweepInput {
        runspec: spec,
        allow_unconverged: opts.allow_unconverged,
    });
    Ok(Outcome {
        record: RunRecord::new("sweep", input, output, seeds),
        unconverged,
    })
}

#[derive(Debug, Serialize)]
pub struct ReplayReport {
    pub command: String,
    pub reproduced: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
    pub tolerance: Option<f64>,
    pub diffs: Vec<Value>,
}

const MAX_DIFFS: usize = 50;

fn diff_values(path: &str, a: &Value, b: &Value, out: &mut Vec<Value>) {
    if out.len() >= MAX_DIFFS {
        return;
    }
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => {
            let keys: std::collections::BTreeSet<&String> = x.keys().chain(y.keys()).collect();
            for k in keys {
                let sub = format!("{path}/{k}");
                match (x.get(k), y.get(k)) {
                    (Some(u), Some(v)) => diff_values(&sub, u, v, out),
                    (u, v) => out.push(json!({"path": sub, "recorded": u, "replayed": v})),
                }
            }
        }
        (Value::Array(x), Value::Array(y)) if x.len() == y.len() => {
            for (i, (u, v)) in x.iter().zip(y).enumerate() {
                diff_values(&format!("{path}/{i}"), u, v, out);
            }
        }
        _ if a != b => out.push(json!({"path": path, "recorded": a, "replayed": b})),
        _ => {}
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Row-by-row comparison with relative tolerance `tol` on values and fit.
fn diff_sweeps(recorded: &Value, replayed: &Value, tol: f64, out: &mut Vec<Value>) {
    let parse_sweep = |v: &Value| serde_json::from_value::<DecaySweep>(v.clone());
    let (Ok(a), Ok(b)) = (parse_sweep(recorded), parse_sweep(replayed)) else {
        out.push(json!({"path": "/output", "recorded": recorded, "replayed": replayed}));
        return;
    };
    if a.rows.len() != b.rows.len() {
        out.push(
            json!({"path": "/output/rows", "recorded": a.rows.len(), "replayed": b.rows.len()}),
        );
        return;
    }
    for (i, (x, y)) in a.rows.iter().zip(&b.rows).enumerate() {
        let scale = x.abs.max(y.abs);
        let same = x.lambda == y.lambda
            && x.status == y.status
            && (x.value() - y.value()).norm() <= tol * scale.max(f64::MIN_POSITIVE);
        if !same {
            out.push(json!({"path": format!("/output/rows/{i}"), "recorded": to_value(x), "replayed": to_value(y)}));
        }
    }
    match (&a.fit, &b.fit) {
        (None, None) => {}
        (Some(x), Some(y))
            if close(x.rho, y.rho, tol)
                && close(x.r2, y.r2, tol)
                && close(x.log_c, y.log_c, tol) => {}
        (x, y) => out
            .push(json!({"path": "/output/fit", "recorded": to_value(x), "replayed": to_value(y)})),
    }
    for key in ["mode"] {
        if recorded.get(key) != replayed.get(key) {
            out.push(json!({"path": format!("/output/{key}"), "recorded": recorded.get(key), "replayed": replayed.get(key)}));
        }
    }
}

/// Reruns a record's command on its embedded input and compares: exact commands must
/// reproduce the output byte for byte, sweeps within the run's `refine_tol`.
pub fn replay(record: &RunRecord) -> CliResult<ReplayReport> {
    let warning = (record.tool_version != TOOL_VERSION).then(|| {
        format!(
            "record written by {}, replaying with {TOOL_VERSION}",
            record.tool_version
        )
    });
    let input_text = record.input.to_string();
    let mut diffs = Vec::new();
    if record.run_id != record.content_hash() {
        diffs.push(json!({"path": "/run_id", "recorded": record.run_id, "replayed": record.content_hash()}));
    }
    let (rerun, tolerance) = match record.command.as_str() {
        "resolve" => {
            let i: ResolveInput = parse("recorded input", &input_text)?;
            (resolve(&i.snarl, i.seed)?, None)
        }
        "degeneracy" => {
            let i: DegeneracyInput = parse("recorded input", &input_text)?;
            (degeneracy(&i.poly, &i.maps)?, None)
        }
        "sweep" => {
            let i: SweepInput = parse("recorded input", &input_text)?;
            let tol = i.runspec.quad.config(i.runspec.num_vars()).refine_tol;
            let opts = SweepOptions {
                adversarial: i.runspec.adversarial,
                allow_unconverged: true,
            };
            (sweep(&i.runspec, opts)?, Some(tol))
        }
        other => {
            return Err(CliError::input(format!(
                "unknown command `{other}` in record"
            )))
        }
    };
    let new = rerun.record;
    match tolerance {
        None => {
            let (recorded, replayed) = (record.output.to_string(), new.output.to_string());
            if recorded != replayed {
                diff_values("/output", &record.output, &new.output, &mut diffs);
            }
        }
        Some(tol) => diff_sweeps(&record.output, &new.output, tol, &mut diffs),
    }
    if record.seeds != new.seeds {
        diffs.push(json!({"path": "/seeds", "recorded": record.seeds, "replayed": new.seeds}));
    }
    Ok(ReplayReport {
        command: record.command.clone(),
        reproduced: diffs.is_empty(),
        warning,
        tolerance,
        diffs,
    })
}
