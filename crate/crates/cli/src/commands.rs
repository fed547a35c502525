use std::fmt::Write as _;

use qms_core::families;
use qms_core::feasibility::{
    bell_locality_decide, chsh_optimal_settings, ghz_contradiction_check, ghz_quantum_expectations, visibility_threshold,
    BellJoints, LocalityVerdict,
};
use qms_core::io::{bound_csv, report_csv, StateSpec};
use qms_core::majorization::compute_bound;
use qms_core::simplex::FeasibilityOutcome;
use qms_core::steering::{
    auto_bound, scan_family, steering_check, table1, two_way_check, Direction, ScanOptions, SteeringScenario,
    CONTINUUM_SIZES,
};
use qms_core::tensor::{build_from_lhv, LhvModel, MagicSquareTensor, TensorShape};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{ChshMode, DirectionChoice, PresetSpec, RunConfig};
use crate::error::CliError;
use crate::output::field;

/// Resolved settings shared by every command.
#[derive(Debug, Clone)]
pub struct Context {
    pub config: RunConfig,
    pub seed: u64,
    pub tol: f64,
    pub samples: usize,
}

/// CSV body plus a short human summary for stderr.
pub struct Report {
    pub csv: String,
    pub summary: String,
}

fn num(v: f64) -> String {
    format!("{v:.15}")
}

fn state_or_singlet(spec: Option<&StateSpec>) -> Result<qms_core::quantum::DensityMatrix, CliError> {
    Ok(match spec {
        Some(s) => s.build()?,
        None => families::singlet(),
    })
}

/// Quantum joints from `state`, `alice` and `bob`, defaulting to the
/// singlet at CHSH-optimal settings.
fn quantum_joints(cfg: &RunConfig) -> Result<BellJoints, CliError> {
    let rho = state_or_singlet(cfg.state.as_ref())?;
    let (default_a, default_b) = chsh_optimal_settings();
    let a = cfg.alice.as_deref().map(RunConfig::settings).transpose()?.unwrap_or(default_a);
    let b = cfg.bob.as_deref().map(RunConfig::settings).transpose()?.unwrap_or(default_b);
    let joints = BellJoints::from_state(&rho, &a, &b)?;
    Ok(match cfg.visibility {
        Some(v) if !(0.0..=1.0).contains(&v) => return Err(CliError::Config(format!("visibility {v} outside [0, 1]"))),
        Some(v) => joints.with_visibility(v),
        None => joints,
    })
}

fn chsh_rows(joints: &BellJoints, out: &mut String) -> Result<(f64, bool), CliError> {
    if joints.settings() != (2, 2) {
        return Err(CliError::Config(format!("CHSH needs two settings per party, got {:?}", joints.settings())));
    }
    out.push_str("quantity,value\n");
    for x in 0..2 {
        for y in 0..2 {
            let _ = writeln!(out, "E{x}{y},{}", num(joints.correlation(x, y)?));
        }
    }
    let s = joints.chsh_value()?;
    let local = bell_locality_decide(joints)?.verdict.is_local();
    let _ = writeln!(out, "S,{}", num(s));
    let _ = writeln!(out, "status,{}", if local { "feasible" } else { "infeasible" });
    Ok((s, local))
}

pub fn chsh(ctx: &Context) -> Result<Report, CliError> {
    let cfg = &ctx.config;
    let mut csv = String::new();
    match cfg.mode.unwrap_or_default() {
        ChshMode::RandomTensor => {
            let shape = TensorShape::uniform(2, 2, 2);
            csv.push_str("seed,S\n");
            let mut worst: f64 = 0.0;
            for i in 0..ctx.samples as u64 {
                let seed = ctx.seed.wrapping_add(i);
                let t = MagicSquareTensor::random(shape.clone(), &mut ChaCha8Rng::seed_from_u64(seed));
                let s = t.chsh_value()?;
                worst = worst.max(s.abs());
                let _ = writeln!(csv, "{seed},{}", num(s));
            }
            Ok(Report {
                csv,
                summary: format!("{} random tensors, max |S| = {worst:.15}", ctx.samples),
            })
        }
        ChshMode::Lhv => {
            let shape = TensorShape::uniform(2, 2, 2);
            let model = match &cfg.lhv {
                Some(spec) => spec.build(&shape)?,
                None => LhvModel::deterministic(&shape, &[vec![0, 0], vec![0, 0]])?,
            };
            let joints = BellJoints::from_tensor(&build_from_lhv(&model))?;
            let (s, local) = chsh_rows(&joints, &mut csv)?;
            Ok(Report {
                csv,
                summary: format!("S = {s:.12}, {}", if local { "feasible" } else { "infeasible" }),
            })
        }
        ChshMode::Quantum => {
            let (s, local) = chsh_rows(&quantum_joints(cfg)?, &mut csv)?;
            Ok(Report {
                csv,
                summary: format!("S = {s:.12}, {}", if local { "feasible" } else { "infeasible" }),
            })
        }
    }
}

pub fn ghz(_ctx: &Context) -> Result<Report, CliError> {
    let report = ghz_contradiction_check()?;
    let q = ghz_quantum_expectations()?;
    let mut csv = String::from("item,value\n");
    for (name, v) in ["XYY", "YXY", "YYX", "XXX"].iter().zip(q) {
        let _ = writeln!(csv, "quantum_{name},{}", num(v));
    }
    let FeasibilityOutcome::Infeasible { certificate } = &report.full else {
        return Err(CliError::Failure("four-constraint system reported feasible".into()));
    };
    csv.push_str("full_system,INFEASIBLE\n");
    for (r, y) in certificate.iter().enumerate() {
        let _ = writeln!(csv, "certificate_{r},{}", num(*y));
    }
    let relaxed = if report.relaxed.is_feasible() { "FEASIBLE" } else { "INFEASIBLE" };
    let _ = writeln!(csv, "relaxed_system,{relaxed}");
    let (lo, hi) = report.forced_xxx;
    let _ = writeln!(csv, "forced_XXX_min,{}", num(lo));
    let _ = writeln!(csv, "forced_XXX_max,{}", num(hi));
    let forced = if (hi - lo).abs() < 1e-8 { format!("forced <XXX> = {lo:.0}") } else { format!("<XXX> in [{lo}, {hi}]") };
    Ok(Report {
        csv,
        summary: format!(
            "quantum (XYY, YXY, YYX, XXX) = ({:.0}, {:.0}, {:.0}, {:.0}); four constraints INFEASIBLE with certificate; three constraints {relaxed}, {forced}",
            q[0], q[1], q[2], q[3]
        ),
    })
}

pub fn bell_test(ctx: &Context) -> Result<Report, CliError> {
    let joints = quantum_joints(&ctx.config)?;
    let decision = bell_locality_decide(&joints)?;
    let critical = visibility_threshold(&joints, ctx.tol)?;
    let (ma, mb) = joints.settings();
    let mut csv = String::from("item,value\n");
    let _ = writeln!(csv, "settings,{}", field(&format!("{ma}x{mb}")));
    let summary = match &decision.verdict {
        LocalityVerdict::Local { tensor, residual } => {
            csv.push_str("status,feasible\n");
            let _ = writeln!(csv, "residual,{residual:e}");
            for (i, v) in tensor.values().iter().enumerate() {
                let _ = writeln!(csv, "cell_{i},{}", num(*v));
            }
            format!("feasible (residual {residual:.1e})")
        }
        LocalityVerdict::Nonlocal { certificate, gap } => {
            csv.push_str("status,infeasible\n");
            let _ = writeln!(csv, "gap,{}", num(*gap));
            for (r, y) in certificate.iter().enumerate() {
                let _ = writeln!(csv, "certificate_{r},{}", num(*y));
            }
            format!("infeasible (certificate gap {gap:.3e})")
        }
    };
    let _ = writeln!(csv, "critical_visibility,{}", num(critical));
    Ok(Report {
        csv,
        summary: format!("{summary}; local below visibility {critical:.6}"),
    })
}

pub fn bound(ctx: &Context) -> Result<Report, CliError> {
    let obs = ctx.config.observable_set()?;
    let b = compute_bound(&obs)?;
    let m = obs.len();
    Ok(Report {
        csv: bound_csv(&b),
        summary: format!("{} observables, S_{m} = {:.12}", m, b.partial_sum(m)),
    })
}

pub fn steer(ctx: &Context) -> Result<Report, CliError> {
    let cfg = &ctx.config;
    let state = cfg
        .state
        .as_ref()
        .ok_or_else(|| CliError::Config("missing `state`".into()))?
        .build()?;
    let pairs = cfg.pairs()?;
    let reports = match cfg.direction.unwrap_or_default() {
        DirectionChoice::Both => {
            let (ab, ba) = two_way_check(&state, &pairs)?;
            vec![ab, ba]
        }
        choice => {
            let direction = if choice == DirectionChoice::BSteersA { Direction::BSteersA } else { Direction::ASteersB };
            vec![steering_check(&SteeringScenario::new(state, pairs, direction)?)?]
        }
    };
    let summary = reports
        .iter()
        .map(|r| {
            let d = qms_core::io::direction_label(r.direction);
            if r.holds {
                format!("{d}: holds (slack {:.3e} at k = {})", r.slack, r.worst_k)
            } else {
                format!("{d}: VIOLATED by {:.3e} at k = {}", r.violation, r.worst_k)
            }
        })
        .collect::<Vec<_>>()
        .join("; ");
    Ok(Report {
        csv: report_csv(&reports),
        summary,
    })
}

pub fn scan(ctx: &Context) -> Result<Report, CliError> {
    let cfg = &ctx.config;
    let family = cfg.family.ok_or_else(|| CliError::Config("missing `family`".into()))?;
    let options = ScanOptions {
        grid: cfg.grid.unwrap_or(ScanOptions::default().grid),
        tol: ctx.tol,
    };
    let sized = matches!(&cfg.preset, Some(p) if p.is_sized());
    let sizes: Vec<Option<usize>> = match (&cfg.sizes, sized) {
        (Some(sizes), true) => sizes.iter().copied().map(Some).collect(),
        (Some(_), false) => return Err(CliError::Config("`sizes` needs a planar or sphere preset".into())),
        (None, _) => vec![None],
    };
    let mut csv = String::from("n,threshold\n");
    let mut summary = Vec::new();
    for n in sizes {
        let mut sized_cfg = cfg.clone();
        if let (Some(n), Some(preset)) = (n, &cfg.preset) {
            sized_cfg.preset = Some(match preset {
                PresetSpec::Planar { .. } => PresetSpec::Planar { n },
                _ => PresetSpec::Sphere { n },
            });
        }
        let pairs = sized_cfg.pairs()?;
        let observables: Vec<_> = pairs.iter().map(|p| p.b.clone()).collect();
        let bound = auto_bound(&observables)?;
        let t = scan_family(&family.build(), &pairs, &bound, options)?;
        let _ = writeln!(csv, "{},{}", pairs.len(), num(t));
        summary.push(format!("n = {}: {t:.8}", pairs.len()));
    }
    Ok(Report {
        csv,
        summary: format!("thresholds {}", summary.join(", ")),
    })
}

pub fn table(ctx: &Context) -> Result<Report, CliError> {
    let sizes: [usize; 3] = match &ctx.config.sizes {
        Some(s) => s
            .as_slice()
            .try_into()
            .map_err(|_| CliError::Config(format!("table1 needs exactly three `sizes`, got {}", s.len())))?,
        None => CONTINUUM_SIZES,
    };
    let options = ScanOptions {
        grid: ctx.config.grid.unwrap_or(ScanOptions::default().grid),
        tol: ctx.tol,
    };
    let rows = table1(options, &sizes)?;
    let mut csv = String::from("state,measurements,computed,expected,abs_error\n");
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{:e}",
            field(r.state),
            field(&r.measurements),
            num(r.computed),
            num(r.expected),
            r.error()
        );
    }
    let worst = rows.iter().map(|r| r.error()).fold(0.0, f64::max);
    Ok(Report {
        csv,
        summary: format!("{} rows, largest absolute error {worst:.2e}", rows.len()),
    })
}
