use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use lqcert::certify::{
    boundary_enclosure, cell_upper_bound, search_qmax, theorem7_driver, theorem9_driver,
    verify_boundary_decreasing, JobConfig, THEOREM7_Q_MAX, THEOREM9_DELTA,
};
use lqcert::format::{sig17, sig6, Sig17};
use lqcert::recovery::{
    irls_lq, lemma3_sweep, nsp_check, phase_csv, phase_transition, ric_exact, ric_monte_carlo,
    IrlsOptions, MatrixSource, PhaseConfig,
};
use lqcert::scalar::{
    boundary_b, lemma3_check, max_gap, pq, pq_derivative, q1_discriminant, q1_threshold, r_q1_max,
};
use lqcert::{Cell, Certificate, QExponent, RicParam, SensingMatrix, Verdict, VerifyOptions};
use serde::Serialize;

use crate::{Cli, Command, EngineArgs, MatrixArgs, Status, Theorem};

/// Writes machine output to `path`, or stdout when absent.
fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(value: &impl serde::Serialize, path: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(&text, path)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn options(engine: &EngineArgs) -> VerifyOptions {
    VerifyOptions { mode: engine.mode.into(), refine_budget: engine.refine_budget, workers: None }
}

fn load_matrix(args: &MatrixArgs) -> Result<SensingMatrix> {
    let phi = match (&args.matrix, args.m, args.n) {
        (Some(path), _, _) => SensingMatrix::read_file(path).with_context(|| format!("matrix {}", path.display()))?,
        (None, Some(m), Some(n)) => {
            let seed = args.matrix_seed;
            let source = match args.ensemble {
                crate::EnsembleArg::Gaussian => MatrixSource::Gaussian { seed },
                crate::EnsembleArg::Bernoulli => MatrixSource::Bernoulli { seed },
            };
            SensingMatrix::generate(m, n, source)?
        }
        _ => bail!("give --matrix, or --m and --n"),
    };
    if let Some(path) = &args.save_matrix {
        phi.write_file(path).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(phi)
}

fn certificate_status(cert: &Certificate) -> Status {
    eprintln!(
        "{}: {} ({} cells, worst bound {}, {} s)",
        cert.claim,
        cert.verdict,
        cert.cells_checked,
        sig6(cert.worst_bound),
        sig6(cert.duration)
    );
    match cert.verdict {
        Verdict::Certified => Status::Ok,
        Verdict::Refuted => {
            if let Some(w) = cert.witness {
                eprintln!("witness: t = {}, q = {}, r = {}", sig17(w.t), sig17(w.q), sig17(w.r));
            }
            Status::Refuted
        }
        Verdict::Inconclusive => Status::Inconclusive,
    }
}

#[derive(Serialize)]
struct Enclosure {
    q: Sig17,
    lo: Sig17,
    hi: Sig17,
}

#[derive(Serialize)]
struct BoundaryOutput {
    report: lqcert::certify::BoundaryReport,
    enclosures: Vec<Enclosure>,
}

#[derive(Serialize)]
struct CellOutput {
    cell: Cell,
    delta: Sig17,
    mode: lqcert::Mode,
    bound: Sig17,
    below_one: bool,
}

#[derive(Serialize)]
struct ThresholdOutput {
    threshold: Sig17,
    /// Discriminant at `delta`, or at the threshold itself.
    discriminant: Sig17,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<Sig17>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t_max: Option<Sig17>,
    #[serde(skip_serializing_if = "Option::is_none")]
    r_max: Option<Sig17>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verdict: Option<Verdict>,
}

#[derive(Serialize)]
struct MaxGapOutput {
    n: usize,
    q: Sig17,
    r_star: Sig17,
    value: Sig17,
    pq_sqrt_n: Sig17,
}

fn pq_table(from: f64, to: f64, step: f64) -> Result<String> {
    if !(0.0 < from && from <= to && to < 1.0) {
        bail!("need 0 < from <= to < 1, got from = {from}, to = {to}");
    }
    if !(step > 0.0) {
        bail!("step must be positive, got {step}");
    }
    let rows = ((to - from) / step + 1e-9).floor() as u64;
    let mut out = String::from("q,p_q,dp_dq,B\n");
    for i in 0..=rows {
        // snap to 12 decimals so grid points print as the intended decimals
        let q = QExponent::new(((from + i as f64 * step) * 1e12).round() / 1e12)?;
        writeln!(
            out,
            "{},{},{},{}",
            sig17(q.value()),
            sig17(pq(q)),
            sig17(pq_derivative(q)?),
            sig17(boundary_b(q)?)
        )?;
    }
    Ok(out)
}

pub fn run(cli: Cli) -> Result<Status> {
    if let Some(n) = cli.workers {
        if n == 0 {
            bail!("--workers must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match cli.command {
        Command::PqTable { from, to, step, output } => {
            emit(&pq_table(from, to, step)?, output.as_deref())?;
            Ok(Status::Ok)
        }
        Command::Boundary { q_lo, q_hi, step, at, output } => {
            let report = verify_boundary_decreasing(q_lo, q_hi, step)?;
            let enclosures = at
                .iter()
                .map(|&q| {
                    let b = boundary_enclosure(QExponent::new(q)?)?;
                    Ok(Enclosure { q: Sig17(q), lo: Sig17(b.lo()), hi: Sig17(b.hi()) })
                })
                .collect::<Result<Vec<_>>>()?;
            eprintln!(
                "B decreasing on [{}, {}]: {} (worst factor {})",
                sig6(q_lo),
                sig6(q_hi),
                report.decreasing,
                sig6(report.worst_factor)
            );
            let decreasing = report.decreasing;
            emit_json(&BoundaryOutput { report, enclosures }, output.as_deref())?;
            Ok(if decreasing { Status::Ok } else { Status::Inconclusive })
        }
        Command::Verify { theorem, delta, q_max, config, engine, output } => {
            let cert = match (theorem, config) {
                (_, Some(path)) => {
                    let job = JobConfig::from_json(&read(&path)?)?;
                    let cert = job.run()?;
                    let dest = output.or(job.output.map(PathBuf::from));
                    emit(&(cert.to_json()? + "\n"), dest.as_deref())?;
                    return Ok(certificate_status(&cert));
                }
                (Some(Theorem::Seven), None) => {
                    let delta = RicParam::new(delta.unwrap_or(0.5))?;
                    let q_max = QExponent::new(q_max.unwrap_or(THEOREM7_Q_MAX))?;
                    theorem7_driver(delta, q_max, &options(&engine), None)?
                }
                (Some(Theorem::Nine), None) => {
                    if q_max.is_some() {
                        bail!("--q-max applies to theorem 7 only");
                    }
                    theorem9_driver(RicParam::new(delta.unwrap_or(THEOREM9_DELTA))?, &options(&engine))?
                }
                (None, None) => bail!("give --theorem or --config"),
            };
            emit(&(cert.to_json()? + "\n"), output.as_deref())?;
            Ok(certificate_status(&cert))
        }
        Command::VerifyCell { t_lo, t_hi, q_lo, q_hi, delta, mode } => {
            let cell = Cell::new(t_lo, t_hi, q_lo, q_hi)?;
            let bound = cell_upper_bound(&cell, RicParam::new(delta)?, mode.into())?;
            let out = CellOutput { cell, delta: Sig17(delta), mode: mode.into(), bound: Sig17(bound), below_one: bound < 1.0 };
            emit_json(&out, None)?;
            eprintln!("cell bound {}", sig6(bound));
            Ok(if bound < 1.0 { Status::Ok } else { Status::Inconclusive })
        }
        Command::SearchQmax { delta, precision, engine } => {
            let s = search_qmax(RicParam::new(delta)?, precision, &options(&engine))?;
            emit_json(&s, None)?;
            match s.q_failed {
                Some(hi) => eprintln!("q_max in [{}, {}) at delta = {}", sig6(s.q_certified), sig6(hi), sig6(delta)),
                None => eprintln!("q_max >= {} at delta = {}", sig6(s.q_certified), sig6(delta)),
            }
            Ok(Status::Ok)
        }
        Command::ThresholdQ1 { delta } => {
            let th = q1_threshold();
            let Some(d) = delta else {
                let out = ThresholdOutput {
                    threshold: Sig17(th),
                    discriminant: Sig17(q1_discriminant(th)),
                    delta: None,
                    t_max: None,
                    r_max: None,
                    verdict: None,
                };
                emit_json(&out, None)?;
                eprintln!("q = 1 threshold {}", sig6(th));
                return Ok(Status::Ok);
            };
            let (t, r) = r_q1_max(RicParam::new(d)?);
            let verdict = if r < 1.0 { Verdict::Certified } else { Verdict::Refuted };
            let out = ThresholdOutput {
                threshold: Sig17(th),
                discriminant: Sig17(q1_discriminant(d)),
                delta: Some(Sig17(d)),
                t_max: Some(Sig17(t)),
                r_max: Some(Sig17(r)),
                verdict: Some(verdict),
            };
            emit_json(&out, None)?;
            eprintln!("max of r(t, 1, {}) is {} at t = {}: {verdict}", sig6(d), sig6(r), sig6(t));
            if verdict == Verdict::Refuted {
                eprintln!("witness: t = {}, q = 1, r = {}", sig17(t), sig17(r));
                return Ok(Status::Refuted);
            }
            Ok(Status::Ok)
        }
        Command::Lemma3Test { trials, n_min, n_max, q, seed, vector } => {
            if let Some(x) = vector {
                let check = lemma3_check(&x, QExponent::new(q[0])?)?;
                emit_json(&check, None)?;
                eprintln!("lhs {} <= rhs {}: {}", sig6(check.lhs), sig6(check.rhs), check.holds);
                return Ok(if check.holds { Status::Ok } else { Status::Refuted });
            }
            let sweep = lemma3_sweep(trials, (n_min, n_max), &q, seed)?;
            emit_json(&sweep, None)?;
            eprintln!("{} vectors, {} violations, min slack {}", sweep.trials, sweep.violations, sig6(sweep.min_slack));
            Ok(if sweep.violations == 0 { Status::Ok } else { Status::Refuted })
        }
        Command::MaxGap { n, q } => {
            let qe = QExponent::new(q)?;
            let g = max_gap(n, qe)?;
            let cap = pq(qe) * (n as f64).sqrt();
            let out = MaxGapOutput { n, q: Sig17(q), r_star: Sig17(g.r_star), value: Sig17(g.value), pq_sqrt_n: Sig17(cap) };
            emit_json(&out, None)?;
            eprintln!("max at r = {}: {} (p_q sqrt(n) = {})", sig6(g.r_star), sig6(g.value), sig6(cap));
            Ok(Status::Ok)
        }
        Command::Ric { matrix, k, samples, seed, output } => {
            let phi = load_matrix(&matrix)?;
            let est = match samples {
                Some(s) => ric_monte_carlo(&phi, k, s, seed)?,
                None => ric_exact(&phi, k)?,
            };
            emit_json(&est, output.as_deref())?;
            let kind = if est.is_lower_bound { "lower bound" } else { "exact" };
            eprintln!("delta_{k} = {} ({kind})", sig6(est.value));
            Ok(Status::Ok)
        }
        Command::Recover { matrix, b, q, output } => {
            let phi = load_matrix(&matrix)?;
            let res = irls_lq(&phi, &b, QExponent::new(q)?, &IrlsOptions::default())?;
            emit_json(&res, output.as_deref())?;
            eprintln!(
                "support {:?}, residual {}, {} iterations, converged {}",
                res.support,
                sig6(res.residual),
                res.iterations,
                res.converged
            );
            Ok(Status::Ok)
        }
        Command::NspCheck { matrix, t0, q, samples, seed, output } => {
            let phi = load_matrix(&matrix)?;
            let rep = nsp_check(&phi, &t0, QExponent::new(q)?, samples, seed)?;
            emit_json(&rep, output.as_deref())?;
            let kind = if rep.exact { "exact" } else { "sampled" };
            eprintln!("max tau {} ({kind}), nsp holds: {}", sig6(rep.max_tau), rep.holds_probably);
            Ok(Status::Ok)
        }
        Command::Experiment { config, m, n, k_values, q_values, trials, seed, ensemble, output } => {
            let cfg = match config {
                Some(path) => serde_json::from_str::<PhaseConfig>(&read(&path)?)?,
                None => PhaseConfig {
                    m: m.unwrap_or_default(),
                    n: n.unwrap_or_default(),
                    k_values,
                    q_values,
                    trials,
                    seed,
                    ensemble: ensemble.into(),
                },
            };
            cfg.validate()?;
            let rows = phase_transition(&cfg, &IrlsOptions::default())?;
            emit(&phase_csv(&cfg, &rows), output.as_deref())?;
            eprintln!("{} rows, {} trials each", rows.len(), cfg.trials);
            Ok(Status::Ok)
        }
    }
}
