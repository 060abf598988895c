use std::f64::consts::PI;

use driven_tls::analytic_model::AnalyticModel;
use driven_tls::dynamics::HORIZON_FACTOR;
use driven_tls::floquet::{linspace, tls_gap, SweepOptions, DEGENERACY_TOL};
use driven_tls::multilevel::{
    driven_dynamics, find_acs, floquet_sweep_multilevel, static_spectrum, synthetic_ac, ACDescriptor, AcFrame,
    InitialState, MultiLevelSystem, PopulationBasis, SyntheticAcSpec,
};
use driven_tls::DriveParams;
use serde_json::json;

use super::{amp_range, measured_peak, positive};
use crate::args::{BasisArg, InitialArg, MultilevelArgs};
use crate::error::{usage, CliError, CliResult};
use crate::output::{Cell, Run, Table};

/// Half-width of the default field window, in crossing gaps.
const SYNTHETIC_WINDOW: f64 = 10.0;
/// Default largest splitting of a synthetic crossing, in engineered gaps.
const SYNTHETIC_MAX_GAP: f64 = 2.0;

struct Source {
    system: MultiLevelSystem,
    /// Default field window and crossing threshold, if the source has them.
    defaults: Option<((f64, f64), f64)>,
}

fn load_source(args: &MultilevelArgs) -> CliResult<Source> {
    if let Some(path) = &args.system {
        return Ok(Source { system: MultiLevelSystem::load(path)?, defaults: None });
    }
    let name = args.synthetic.as_deref().expect("clap requires a source");
    let spec = if name == "default" {
        SyntheticAcSpec::default()
    } else {
        let text = std::fs::read_to_string(name).map_err(|e| CliError::Input(format!("cannot read {name}: {e}")))?;
        serde_json::from_str(&text).map_err(|e| {
            CliError::Input(format!("malformed synthetic spec {name} at line {}, column {}: {e}", e.line(), e.column()))
        })?
    };
    let system = synthetic_ac(&spec).map_err(|e| CliError::Input(format!("synthetic spec rejected: {e}")))?;
    let w = SYNTHETIC_WINDOW * spec.gap;
    Ok(Source { system, defaults: Some(((spec.eps_center - w, spec.eps_center + w), SYNTHETIC_MAX_GAP * spec.gap)) })
}

fn field_grid(args: &MultilevelArgs, src: &Source) -> CliResult<Vec<f64>> {
    let (lo, hi) = match (args.eps_min, args.eps_max, src.defaults) {
        (Some(lo), Some(hi), _) => (lo, hi),
        (None, None, Some((window, _))) => window,
        _ => return Err(usage("give both --eps-min and --eps-max (required with --system)")),
    };
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(usage(format!("field window [{lo}, {hi}] is empty")));
    }
    if args.eps_points < super::MIN_POINTS {
        return Err(usage(format!("--eps-points must be at least {}", super::MIN_POINTS)));
    }
    Ok(linspace(lo, hi, args.eps_points))
}

fn crossings(args: &MultilevelArgs, src: &Source, grid: &[f64]) -> CliResult<Vec<ACDescriptor>> {
    let max_gap = args.max_gap.or(src.defaults.map(|d| d.1)).unwrap_or(f64::INFINITY);
    Ok(find_acs(&static_spectrum(&src.system, grid)?, max_gap))
}

fn chosen(args: &MultilevelArgs, acs: &[ACDescriptor]) -> CliResult<ACDescriptor> {
    acs.get(args.ac_index).copied().ok_or_else(|| {
        usage(format!("--ac-index {} out of range: {} crossing(s) in the field window", args.ac_index, acs.len()))
    })
}

fn ac_json(k: usize, ac: &ACDescriptor) -> serde_json::Value {
    json!({
        "index": k,
        "eps_center": ac.eps_center,
        "gap": ac.gap,
        "level_pair": ac.level_pair,
        "slopes": ac.slopes,
        "coupling": ac.coupling(),
    })
}

pub fn run(args: &MultilevelArgs) -> CliResult<()> {
    let src = load_source(args)?;
    let grid = field_grid(args, &src)?;
    let mut run = Run::start("multilevel", &args.out, args)?;
    run.grid("field", json!({"min": grid[0], "max": grid[grid.len() - 1], "points": grid.len()}));
    run.result("dim", src.system.dim());

    if args.static_spectrum {
        let table = static_spectrum(&src.system, &grid)?;
        let mut csv =
            Table::new(std::iter::once("eps".to_string()).chain((0..table.dim()).map(|k| format!("level_{k}"))));
        for (e, levels) in table.eps.iter().zip(&table.levels) {
            csv.push(std::iter::once(Cell::Num(*e)).chain(levels.iter().map(|&x| Cell::Num(x))));
        }
        run.csv("static_spectrum.csv", &csv)?;
        return run.finish();
    }

    let acs = crossings(args, &src, &grid)?;
    if args.find_acs {
        let list: Vec<_> = acs.iter().enumerate().map(|(k, ac)| ac_json(k, ac)).collect();
        run.json("acs.json", &list)?;
        run.result("crossings", acs.len());
        return run.finish();
    }

    let ac = chosen(args, &acs)?;
    run.result("crossing", ac_json(args.ac_index, &ac));
    if args.drive {
        drive(args, &src.system, &ac, &mut run)?;
    } else {
        sweep(args, &src.system, &ac, &mut run)?;
    }
    run.finish()
}

fn drive(args: &MultilevelArgs, sys: &MultiLevelSystem, ac: &ACDescriptor, run: &mut Run) -> CliResult<()> {
    let [mult] = args.omega_mult[..] else {
        return Err(usage("--drive takes a single --omega-mult"));
    };
    let mult = positive("omega-mult", mult)?;
    let omega = mult * ac.gap;
    // The two-level problem scales with the gap, so peaks are located at
    // delta = 1, omega = mult.
    let (ratio, unit_gap) = match (args.amp, args.peak) {
        (Some(r), None) if r >= 0.0 && r.is_finite() => (r, tls_gap(1.0, mult, r, args.steps_per_period)?),
        (Some(r), None) => return Err(usage(format!("--amp must be non-negative, got {r}"))),
        (None, Some(n)) => {
            let f = measured_peak(1.0, mult, n, args.steps_per_period)?;
            (f.amp_ratio, f.gap)
        }
        _ => return Err(usage("--drive needs one of --amp and --peak")),
    };
    let t_flip = (unit_gap > DEGENERACY_TOL * mult).then(|| PI / (unit_gap * ac.gap));
    let horizon = match (args.horizon, t_flip) {
        (Some(h), _) => positive("horizon", h)?,
        (None, Some(tf)) => HORIZON_FACTOR * tf,
        (None, None) => {
            return Err(CliError::Numerical(driven_tls::Error::DivergentFlipTime { gap: unit_gap * ac.gap }))
        }
    };
    let frame = AcFrame::new(sys, ac)?;
    let amplitude = frame.field_amplitude(ratio, omega);
    let initial = match args.initial {
        InitialArg::Diabatic0 => InitialState::Diabatic(0),
        InitialArg::Diabatic1 => InitialState::Diabatic(1),
        InitialArg::Eigen0 => InitialState::AcEigenstate(0),
        InitialArg::Eigen1 => InitialState::AcEigenstate(1),
    };
    let basis = match args.basis {
        BasisArg::Diabatic => PopulationBasis::AcDiabatic,
        BasisArg::Center => PopulationBasis::CenterEigenbasis,
    };
    run.grid("propagation", json!({"steps_per_period": args.steps_per_period, "sample_stride": args.sample_stride}));
    run.grid("horizon", horizon);
    run.result("amp_ratio", ratio);
    run.result("field_amplitude", amplitude);
    run.result("omega", omega);
    run.result("t_flip", t_flip);

    let traces = driven_dynamics(
        sys,
        ac,
        amplitude,
        omega,
        &initial,
        horizon,
        basis,
        args.steps_per_period,
        args.sample_stride,
    )?;
    let model = AnalyticModel::new(&DriveParams::from_amp_ratio(ac.gap, omega, ratio)?);
    let leakage = traces.leakage();
    let (i, _) = traces.level_pair;
    let mut csv = Table::new(
        std::iter::once("t".to_string())
            .chain((0..sys.dim()).map(|k| format!("pop_{k}")))
            .chain(["leakage".to_string(), "pnd_tls_analytic".to_string()]),
    );
    let mut sup = 0.0_f64;
    for (s, &t) in traces.times.iter().enumerate() {
        let analytic = model.pnd(t);
        if t_flip.is_some_and(|tf| t <= tf) {
            sup = sup.max((traces.populations[s][i] - analytic).abs());
        }
        csv.push(
            std::iter::once(Cell::Num(t))
                .chain(traces.populations[s].iter().map(|&x| Cell::Num(x)))
                .chain([Cell::Num(leakage[s]), Cell::Num(analytic)]),
        );
    }
    run.csv("populations.csv", &csv)?;
    run.result("max_leakage", leakage.iter().copied().fold(0.0, f64::max));
    if matches!(args.initial, InitialArg::Diabatic0) && matches!(basis, PopulationBasis::AcDiabatic) && t_flip.is_some()
    {
        run.result("analytic_sup_norm_to_t_flip", sup);
    }
    Ok(())
}

fn sweep(args: &MultilevelArgs, sys: &MultiLevelSystem, ac: &ACDescriptor, run: &mut Run) -> CliResult<()> {
    let amps = amp_range(args.amp_min, args.amp_max, args.points)?;
    let opts = SweepOptions { steps_per_period: args.steps_per_period, ..SweepOptions::default() };
    run.grid("amp_ratio", json!({"min": args.amp_min, "max": args.amp_max, "points": args.points}));
    run.grid("sweep", opts);
    let mut summary = Vec::new();
    for &m in &args.omega_mult {
        let m = positive("omega-mult", m)?;
        let result = floquet_sweep_multilevel(sys, ac, m * ac.gap, &amps, &opts)?;
        let mut csv = Table::new(["amp_ratio", "eps_plus", "eps_minus", "gap", "gap_tls", "flagged"]);
        for (pt, reference) in result.points.iter().zip(&result.reference) {
            let (plus, minus) = pt.eps_plus_minus();
            let flag = Cell::Text(if pt.flagged { "1" } else { "0" });
            csv.push([pt.amp_ratio.into(), plus.into(), minus.into(), pt.gap.into(), reference.gap.into(), flag]);
        }
        let file = format!("floquet_omega_{m}.csv");
        run.csv(&file, &csv)?;
        summary.push(json!({
            "omega_mult": m,
            "omega": result.omega,
            "distortion": result.distortion,
            "flagged": result.flagged,
            "file": file,
        }));
    }
    let d: Vec<f64> = summary.iter().map(|s| s["distortion"].as_f64().unwrap_or(f64::NAN)).collect();
    let increasing = d.windows(2).all(|w| w[1] > w[0]);
    run.result("distortion_strictly_increasing", increasing);
    run.json("distortion.json", &json!({"sweeps": summary, "strictly_increasing": increasing}))
}
