use driven_tls::dynamics::{non_decay_trace, TraceOptions};
use driven_tls::floquet::tls_gap;
use driven_tls::{DriveParams, StateVector};
use serde_json::json;

use super::{amp_range, positive};
use crate::args::ScanArgs;
use crate::error::{usage, CliResult};
use crate::output::{Cell, Run, Table};

/// Samples per period of the trace whose last point is `P_ND(T_F)`.
const SCAN_SAMPLES_PER_PERIOD: usize = 64;

pub fn run(args: &ScanArgs) -> CliResult<()> {
    let delta = positive("delta", args.delta)?;
    let omega = positive("omega", args.omega)?;
    let amps = amp_range(args.amp_min, args.amp_max, args.points)?;
    let floor = args.gap_floor.unwrap_or(driven_tls::floquet::DEGENERACY_TOL * omega);
    if !(floor >= 0.0) || !floor.is_finite() {
        return Err(usage(format!("--gap-floor must be non-negative, got {floor}")));
    }
    let opts = TraceOptions { steps_per_period: args.steps_per_period, samples_per_period: SCAN_SAMPLES_PER_PERIOD };

    let mut run = Run::start("scan-pnd", &args.out, args)?;
    run.grid("amp_ratio", json!({"min": args.amp_min, "max": args.amp_max, "points": args.points}));
    run.grid("trace", opts);
    run.grid("gap_floor", floor);

    let psi0 = StateVector::basis(2, 0)?;
    let mut table = Table::new(["amp_ratio", "t_flip", "pnd_at_tflip"]);
    let mut skipped = 0usize;
    for &r in &amps {
        let gap = tls_gap(delta, omega, r, args.steps_per_period)?;
        if gap <= floor {
            table.push([r.into(), Cell::Text("skipped"), Cell::Text("skipped")]);
            skipped += 1;
            continue;
        }
        let t_flip = std::f64::consts::PI / gap;
        let p = DriveParams::from_amp_ratio(delta, omega, r)?;
        let trace = non_decay_trace(&p, &psi0, t_flip, &opts)?;
        let pnd = *trace.pnd().last().expect("traces hold at least two samples");
        table.push([r.into(), t_flip.into(), pnd.clamp(0.0, 1.0).into()]);
    }
    run.csv("scan_pnd.csv", &table)?;
    run.result("skipped_points", skipped);
    run.finish()
}
