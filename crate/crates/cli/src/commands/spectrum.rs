use driven_tls::analytic_model::rwa_gap;
use driven_tls::floquet::{find_features, spectrum_sweep_with, SweepOptions, DEGENERACY_TOL};
use driven_tls::DriveParams;
use serde_json::json;

use super::{amp_range, positive};
use crate::args::SpectrumArgs;
use crate::error::CliResult;
use crate::output::{Run, Table};

pub fn run(args: &SpectrumArgs) -> CliResult<()> {
    let delta = positive("delta", args.delta)?;
    let omega = positive("omega", args.omega)?;
    let amps = amp_range(args.amp_min, args.amp_max, args.points)?;
    let opts = SweepOptions { steps_per_period: args.steps_per_period, ..SweepOptions::default() };

    let mut run = Run::start("spectrum", &args.out, args)?;
    run.grid("amp_ratio", json!({"min": args.amp_min, "max": args.amp_max, "points": args.points}));
    run.grid("sweep", opts);

    let sweep = spectrum_sweep_with(delta, omega, &amps, &opts)?;
    let mut table = Table::new(["amp_ratio", "eps_plus", "eps_minus", "gap", "rwa_gap_reference"]);
    for pt in &sweep {
        let (plus, minus) = pt.eps_plus_minus();
        let reference = rwa_gap(&DriveParams::from_amp_ratio(delta, omega, pt.amp_ratio)?);
        table.push([pt.amp_ratio.into(), plus.into(), minus.into(), pt.gap.into(), reference.into()]);
    }
    let tol = DEGENERACY_TOL * omega;
    let features = find_features(&sweep, tol)?;
    run.csv("spectrum.csv", &table)?;
    run.json("features.json", &json!({"delta": delta, "omega": omega, "degeneracy_tol": tol, "features": features}))?;
    run.result("flagged_points", sweep.iter().filter(|p| p.flagged).count());
    run.finish()
}
