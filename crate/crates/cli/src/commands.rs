use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use stellar_zeros::dynamics::tracking::match_distance;
use stellar_zeros::dynamics::{closed_form, closed_form_trajectory, integrate, ZeroTrajectory};
use stellar_zeros::entire::hermite_series;
use stellar_zeros::io::{
    crossing_json_lines, fmt17, parse_descriptor, to_json17, trajectory_csv_rows, Descriptor, FormDescriptor,
    TRAJECTORY_HEADER,
};
use stellar_zeros::oracle::{zeros_from_fock, FockPropagator};
use stellar_zeros::phase::{audit_form, detect_crossings, phase_trajectory, AuditVerdict, MIN_SAMPLES};
use stellar_zeros::state::{random_stellar_state, stellar_to_fock, StellarState};
use stellar_zeros::wavefunction::{build_wavefunction, eval_form, WavefunctionForm};
use stellar_zeros::{Error, Result, C64};

use crate::config::{read, Input, MethodChoice, RunConfig};

/// Exit status for a run that completed but found a contract violation.
pub const VIOLATION: u8 = 2;

const CROSSING_SAMPLES: usize = 512;
const MIN_ORACLE_CUTOFF: usize = 80;

struct Loaded {
    state: Option<StellarState>,
    form: WavefunctionForm,
}

fn load(cfg: &RunConfig) -> Result<Loaded> {
    let input = cfg
        .input
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("no input: pass --state PATH or --random RANK,SEED".into()))?;
    let state = match input {
        Input::Random { rank, seed, scale } => random_stellar_state(*rank, *seed, *scale),
        Input::File(path) => match parse_descriptor(&read(path)?)? {
            Descriptor::State(st) => st,
            Descriptor::Form(form) => return Ok(Loaded { state: None, form }),
        },
    };
    Ok(Loaded {
        form: build_wavefunction(&state)?,
        state: Some(state),
    })
}

/// Write through a sibling temporary file so readers never see a partial artifact.
fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let io_err = |e: std::io::Error| Error::InvalidParameter(format!("cannot write {}: {e}", path.display()));
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidParameter(format!("output path {} has no file name", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    let mut f = fs::File::create(&tmp).map_err(io_err)?;
    f.write_all(text.as_bytes()).and_then(|_| f.sync_all()).map_err(io_err)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io_err(e)
    })
}

fn emit(cfg: &RunConfig, text: &str) -> Result<()> {
    match &cfg.out {
        Some(path) => write_atomic(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn build(cfg: &RunConfig) -> Result<u8> {
    let form = load(cfg)?.form;
    emit(cfg, &(to_json17(&FormDescriptor::from_form(&form))? + "\n"))?;
    Ok(0)
}

pub fn zeros(cfg: &RunConfig) -> Result<u8> {
    let form = load(cfg)?.form;
    let text: String = form
        .zeros()
        .iter()
        .map(|z| format!("{} {}\n", fmt17(z.re), fmt17(z.im)))
        .collect();
    emit(cfg, &text)?;
    Ok(0)
}

pub fn evolve(cfg: &RunConfig) -> Result<u8> {
    let form = load(cfg)?.form;
    let grid = cfg.time_grid()?;
    let h = &cfg.hamiltonian;
    let mut trajectories: Vec<ZeroTrajectory> = Vec::new();
    if cfg.method != MethodChoice::Closed {
        trajectories.push(integrate(&form, h, &grid)?);
    }
    if cfg.method != MethodChoice::Ode {
        match closed_form_trajectory(&form, h, &grid) {
            Ok(t) => trajectories.push(t),
            // `both` degrades to the integrator alone where no closed form exists
            Err(Error::UnsupportedHamiltonian(_)) if cfg.method == MethodChoice::Both => {}
            Err(e) => return Err(e),
        }
    }
    let mut text = format!("{TRAJECTORY_HEADER}\n");
    for t in &trajectories {
        text.push_str(&trajectory_csv_rows(t));
    }
    emit(cfg, &text)?;
    Ok(0)
}

pub fn crossings(cfg: &RunConfig) -> Result<u8> {
    let form = load(cfg)?.form;
    let samples = cfg.time.map_or(CROSSING_SAMPLES, |t| t.2.max(MIN_SAMPLES));
    let events = detect_crossings(&phase_trajectory(&form, samples)?)?;
    emit(cfg, &crossing_json_lines(&events))?;
    Ok(0)
}

pub fn audit(cfg: &RunConfig) -> Result<u8> {
    let form = load(cfg)?.form;
    let audit = audit_form(&form)?;
    let g = &audit.gershgorin;
    println!(
        "verdict={} events={} rank={} hypothesis={} min_separation={} threshold={}",
        audit.verdict.name(),
        audit.verdict.events(),
        form.rank(),
        g.hypothesis_holds,
        fmt17(g.min_separation),
        fmt17(g.threshold),
    );
    if let Some(path) = &cfg.out {
        write_atomic(path, &crossing_json_lines(&audit.events))?;
    }
    Ok(match audit.verdict {
        AuditVerdict::GuaranteedButMissed(_) => VIOLATION,
        _ => 0,
    })
}

/// Standard comparison grid, `|Re z|, |Im z| <= 3` in steps of 1/2.
fn standard_grid() -> Vec<C64> {
    let ticks: Vec<f64> = (-6..=6).map(|k| 0.5 * k as f64).collect();
    ticks.iter().flat_map(|&x| ticks.iter().map(move |&y| C64::new(x, y))).collect()
}

pub fn verify(cfg: &RunConfig) -> Result<u8> {
    let loaded = load(cfg)?;
    let state = loaded
        .state
        .ok_or_else(|| Error::InvalidParameter("verify needs a state descriptor, not a built form".into()))?;
    let form = loaded.form;
    let h = &cfg.hamiltonian;
    let grid = match cfg.time {
        Some(_) => cfg.time_grid()?,
        None => vec![0.0, 0.3, 1.1, 2.9],
    };
    let cutoff = state.default_cutoff().max(MIN_ORACLE_CUTOFF);
    let fock = stellar_to_fock(&state, cutoff)?;

    let dual = standard_grid()
        .par_iter()
        .map(|&z| {
            let b = hermite_series(&fock, z).value;
            (eval_form(&form, z) - b).norm() / b.norm()
        })
        .reduce(|| 0.0, f64::max);

    let ode = integrate(&form, h, &grid)?;
    let closed: Option<Vec<Vec<C64>>> = match grid.iter().map(|&t| closed_form(&form, h, t)).collect() {
        Ok(z) => Some(z),
        Err(Error::UnsupportedHamiltonian(_)) => None,
        Err(e) => return Err(e),
    };
    let reference: Vec<Vec<C64>> = match &closed {
        Some(z) => z.clone(),
        None => (0..grid.len()).map(|i| ode.zeros_at(i)).collect(),
    };
    let closed_vs_ode = closed.as_ref().map(|z| {
        z.iter()
            .enumerate()
            .map(|(i, zi)| match_distance(zi, &ode.zeros_at(i)))
            .fold(0.0, f64::max)
    });

    let propagator = FockPropagator::new(h, cutoff);
    let oracle: Vec<f64> = grid
        .par_iter()
        .zip(&reference)
        .map(|(&t, expect)| {
            let w = propagator.evolve(&fock, t)?;
            let half = expect.iter().map(|z| z.re.abs().max(z.im.abs())).fold(1.5, f64::max) + 0.5;
            Ok(match_distance(expect, &zeros_from_fock(&w, form.rank(), half)?))
        })
        .collect::<Result<_>>()?;
    let oracle = oracle.into_iter().fold(0.0, f64::max);

    let mut worst = dual.max(oracle);
    println!("dual_path max_relative={}", fmt17(dual));
    match closed_vs_ode {
        Some(d) => {
            worst = worst.max(d);
            println!("closed_vs_ode max_distance={}", fmt17(d));
        }
        None => println!("closed_vs_ode skipped=unsupported_hamiltonian"),
    }
    println!(
        "oracle_vs_{} max_distance={} cutoff={cutoff}",
        if closed.is_some() { "closed" } else { "ode" },
        fmt17(oracle)
    );
    let ok = worst <= cfg.tol;
    println!("verdict={} tol={}", if ok { "ok" } else { "violation" }, fmt17(cfg.tol));
    Ok(if ok { 0 } else { VIOLATION })
}
