//! Run configuration: command-line flags merged over an optional JSON file.

use std::fs;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Deserialize;
use stellar_zeros::dynamics::QuadraticHamiltonian;
use stellar_zeros::{Error, Result};

pub const DEFAULT_SCALE: f64 = 0.5;
pub const DEFAULT_TOL: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodChoice {
    Ode,
    Closed,
    Both,
}

/// Flags shared by every subcommand. Anything left unset falls back to the
/// `--config` file, then to the built-in default.
#[derive(Args, Clone, Debug, Default)]
pub struct Flags {
    /// State or form descriptor (JSON).
    #[arg(long, value_name = "PATH", conflicts_with = "random")]
    pub state: Option<PathBuf>,

    /// Seeded random state instead of a descriptor.
    #[arg(long, value_name = "RANK,SEED", value_parser = parse_random)]
    pub random: Option<(usize, u64)>,

    /// Bound on |alpha| and |chi| for `--random`.
    #[arg(long)]
    pub scale: Option<f64>,

    /// Coefficients of A x^2 + B p^2 + C (xp+px)/2 + D x + E p + F.
    #[arg(long, value_name = "A,B,C,D,E,F", value_parser = parse_hamiltonian, allow_hyphen_values = true)]
    pub hamiltonian: Option<[f64; 6]>,

    /// Time grid: N samples from T0 to T1 inclusive.
    #[arg(long, value_name = "T0,T1,N", value_parser = parse_time)]
    pub time: Option<(f64, f64, usize)>,

    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[arg(long)]
    pub tol: Option<f64>,

    #[arg(long, value_enum)]
    pub method: Option<MethodChoice>,

    /// JSON file with the same keys as the long flags.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    state: Option<PathBuf>,
    random: Option<(usize, u64)>,
    scale: Option<f64>,
    hamiltonian: Option<[f64; 6]>,
    time: Option<(f64, f64, usize)>,
    out: Option<PathBuf>,
    tol: Option<f64>,
    method: Option<MethodChoice>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Input {
    File(PathBuf),
    Random { rank: usize, seed: u64, scale: f64 },
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub input: Option<Input>,
    pub hamiltonian: QuadraticHamiltonian,
    pub time: Option<(f64, f64, usize)>,
    pub out: Option<PathBuf>,
    pub tol: f64,
    pub method: MethodChoice,
}

impl RunConfig {
    pub fn resolve(flags: &Flags) -> Result<Self> {
        let file = match &flags.config {
            Some(path) => {
                let text = read(path)?;
                serde_json::from_str::<FileConfig>(&text)
                    .map_err(|e| Error::InvalidParameter(format!("bad config {}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };
        let scale = flags.scale.or(file.scale).unwrap_or(DEFAULT_SCALE);
        if !(scale >= 0.0 && scale.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale must be finite and >= 0, got {scale}")));
        }
        // an input given on the command line wins over either input in the file
        let input = match (&flags.state, flags.random) {
            (Some(p), _) => Some(Input::File(p.clone())),
            (None, Some((rank, seed))) => Some(Input::Random { rank, seed, scale }),
            (None, None) => match (file.state, file.random) {
                (Some(_), Some(_)) => {
                    return Err(Error::InvalidParameter("config sets both `state` and `random`".into()))
                }
                (Some(p), None) => Some(Input::File(p)),
                (None, Some((rank, seed))) => Some(Input::Random { rank, seed, scale }),
                (None, None) => None,
            },
        };
        let [a, b, c, d, e, f] = flags.hamiltonian.or(file.hamiltonian).unwrap_or([0.5, 0.5, 0.0, 0.0, 0.0, 0.0]);
        let time = flags.time.or(file.time);
        if let Some(t) = time {
            check_time(t)?;
        }
        let tol = flags.tol.or(file.tol).unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
        }
        Ok(Self {
            input,
            hamiltonian: QuadraticHamiltonian::new(a, b, c, d, e, f)?,
            time,
            out: flags.out.clone().or(file.out),
            tol,
            method: flags.method.or(file.method).unwrap_or(MethodChoice::Both),
        })
    }

    pub fn time_grid(&self) -> Result<Vec<f64>> {
        let (t0, t1, n) = self
            .time
            .ok_or_else(|| Error::InvalidParameter("this command needs --time T0,T1,N".into()))?;
        Ok((0..n).map(|i| t0 + (t1 - t0) * i as f64 / (n - 1) as f64).collect())
    }
}

pub fn read(path: &PathBuf) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))
}

fn check_time((t0, t1, n): (f64, f64, usize)) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("time grid needs at least 2 samples, got {n}")));
    }
    if !(t0 >= 0.0 && t1 > t0 && t1.is_finite()) {
        return Err(Error::InvalidParameter(format!("time grid needs 0 <= T0 < T1, got {t0},{t1}")));
    }
    Ok(())
}

fn floats(s: &str, n: usize) -> std::result::Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated numbers, got {}", v.len()));
    }
    Ok(v)
}

fn parse_random(s: &str) -> std::result::Result<(usize, u64), String> {
    let (rank, seed) = s.split_once(',').ok_or("expected RANK,SEED")?;
    Ok((
        rank.trim().parse().map_err(|e| format!("rank: {e}"))?,
        seed.trim().parse().map_err(|e| format!("seed: {e}"))?,
    ))
}

fn parse_hamiltonian(s: &str) -> std::result::Result<[f64; 6], String> {
    let v = floats(s, 6)?;
    Ok([v[0], v[1], v[2], v[3], v[4], v[5]])
}

fn parse_time(s: &str) -> std::result::Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err("expected T0,T1,N".into());
    }
    let t = floats(&parts[..2].join(","), 2)?;
    let n = parts[2].trim().parse().map_err(|e| format!("samples: {e}"))?;
    Ok((t[0], t[1], n))
}
