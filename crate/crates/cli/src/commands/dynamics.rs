use std::f64::consts::PI;

use driven_tls::analytic_model::{flip_time, rwa_gap, step_count_estimate, AnalyticModel};
use driven_tls::dynamics::{bloch_trajectory, detect_steps, non_decay_trace, StepLadder, TraceOptions, HORIZON_FACTOR};
use driven_tls::floquet::{tls_gap, DEGENERACY_TOL};
use driven_tls::{DriveParams, StateVector};
use serde::Serialize;

use super::{measured_peak, positive};
use crate::args::DynamicsArgs;
use crate::error::{usage, CliError, CliResult};
use crate::output::{Cell, Run, Table};

#[derive(Serialize)]
struct LadderReport {
    amp_ratio: f64,
    t_flip: Option<f64>,
    step_count_estimate: Option<f64>,
    ladder: Option<StepLadder>,
    /// Why no ladder was detected.
    #[serde(skip_serializing_if = "Option::is_none")]
    skipped: Option<String>,
}

/// Flip time from the measured gap. When the pair is degenerate on the
/// quasienergy circle but the averaged gap is not (`A = 0` at
/// `omega = delta` folds both levels onto the zone edge) the averaged gap is
/// used instead.
fn flip_time_for(p: &DriveParams, gap: f64) -> Option<(f64, &'static str)> {
    if gap > DEGENERACY_TOL * p.omega {
        return Some((PI / gap, "quasienergy_gap"));
    }
    flip_time(p).ok().map(|t| (t, "averaged_gap"))
}

pub fn run(args: &DynamicsArgs) -> CliResult<()> {
    let delta = positive("delta", args.delta)?;
    let omega = positive("omega", args.omega)?;
    let (ratio, gap) = match (args.amp, args.peak) {
        (Some(r), None) => {
            if !(r >= 0.0) || !r.is_finite() {
                return Err(usage(format!("--amp must be non-negative, got {r}")));
            }
            (r, tls_gap(delta, omega, r, args.steps_per_period)?)
        }
        (None, Some(n)) => {
            let f = measured_peak(delta, omega, n, args.steps_per_period)?;
            (f.amp_ratio, f.gap)
        }
        _ => return Err(usage("give exactly one of --amp and --peak")),
    };
    let p = DriveParams::from_amp_ratio(delta, omega, ratio)?;
    let flip = flip_time_for(&p, gap);
    let horizon = match (args.horizon, flip) {
        (Some(h), _) => positive("horizon", h)?,
        (None, Some((tf, _))) => HORIZON_FACTOR * tf,
        (None, None) => {
            return Err(CliError::Numerical(driven_tls::Error::DivergentFlipTime { gap }));
        }
    };
    let opts = TraceOptions { steps_per_period: args.steps_per_period, samples_per_period: args.samples_per_period };

    let mut run = Run::start("dynamics", &args.out, args)?;
    run.grid("trace", opts);
    run.grid("horizon", horizon);
    run.result("amp_ratio", ratio);
    run.result("quasienergy_gap", gap);
    run.result("t_flip", flip.map(|f| f.0));
    run.result("t_flip_source", flip.map(|f| f.1));

    let psi0 = StateVector::basis(2, 0)?;
    let trace = non_decay_trace(&p, &psi0, horizon, &opts)?;
    let bloch = if args.bloch { Some(bloch_trajectory(&p, &psi0, horizon, &opts)?) } else { None };
    let model = AnalyticModel::new(&p);
    let averaged = rwa_gap(&p);

    let mut header = vec!["t", "pnd_numeric"];
    if args.analytic {
        header.push("pnd_analytic");
    }
    if args.bloch {
        header.extend(["bloch_x", "bloch_y", "bloch_z"]);
    }
    if args.rwa_reference {
        header.extend(["pnd_rwa", "cos_omega_t"]);
    }
    let mut table = Table::new(header);
    let mut sup = 0.0_f64;
    for (s, (&t, &pnd)) in trace.times().iter().zip(trace.pnd()).enumerate() {
        let mut row: Vec<Cell> = vec![t.into(), pnd.into()];
        if args.analytic {
            let a = model.pnd(t);
            if flip.is_some_and(|(tf, _)| t <= tf) {
                sup = sup.max((pnd - a).abs());
            }
            row.push(a.into());
        }
        if let Some(b) = &bloch {
            row.extend([b[s].x.into(), b[s].y.into(), b[s].z.into()]);
        }
        if args.rwa_reference {
            row.extend([(0.5 * averaged * t).cos().powi(2).into(), (omega * t).cos().into()]);
        }
        table.push(row);
    }
    if args.analytic && flip.is_some() {
        run.result("analytic_sup_norm_to_t_flip", sup);
    }

    let (ladder, skipped) = match detect_steps(&trace) {
        Ok(l) => (Some(l), None),
        Err(e @ driven_tls::Error::TraceTooShort(_)) => (None, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    if let Some(l) = &ladder {
        run.result("plateaus", l.len());
        run.result("monotone_decreasing", l.monotone_decreasing);
    }
    let report = LadderReport {
        amp_ratio: ratio,
        t_flip: flip.map(|f| f.0),
        step_count_estimate: step_count_estimate(&p).ok(),
        ladder,
        skipped,
    };
    run.csv("dynamics.csv", &table)?;
    run.json("ladder.json", &report)?;
    run.finish()
}
