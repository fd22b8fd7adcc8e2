//! JSON descriptors and text output formats.

use serde::{Deserialize, Serialize};

use crate::dynamics::ZeroTrajectory;
use crate::phase::CrossingEvent;
use crate::state::StellarState;
use crate::wavefunction::WavefunctionForm;
use crate::{Error, Result, C64};

type Pair = [f64; 2];

fn pair(c: C64) -> Pair {
    [c.re, c.im]
}

fn complex(p: Pair) -> C64 {
    C64::new(p[0], p[1])
}

/// `{"rank", "core", "alpha", "chi"}`; complex numbers as `[re, im]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateDescriptor {
    pub rank: usize,
    pub core: Vec<Pair>,
    pub alpha: Pair,
    pub chi: Pair,
}

impl StateDescriptor {
    pub fn from_state(st: &StellarState) -> Self {
        Self {
            rank: st.rank(),
            core: st.core().iter().map(|&c| pair(c)).collect(),
            alpha: pair(st.alpha()),
            chi: pair(st.chi()),
        }
    }

    pub fn to_state(&self) -> Result<StellarState> {
        if self.core.len() != self.rank + 1 {
            return Err(Error::InvalidState(format!(
                "rank {} needs {} core coefficients, got {}",
                self.rank,
                self.rank + 1,
                self.core.len()
            )));
        }
        StellarState::new(
            self.core.iter().map(|&p| complex(p)).collect(),
            complex(self.alpha),
            complex(self.chi),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormDescriptor {
    pub g2: Pair,
    pub g1: Pair,
    pub g0: Pair,
    pub zeros: Vec<Pair>,
    pub leading: Pair,
}

impl FormDescriptor {
    pub fn from_form(wf: &WavefunctionForm) -> Self {
        Self {
            g2: pair(wf.g2()),
            g1: pair(wf.g1()),
            g0: pair(wf.g0()),
            zeros: wf.zeros().iter().map(|&z| pair(z)).collect(),
            leading: pair(wf.leading()),
        }
    }

    pub fn to_form(&self) -> Result<WavefunctionForm> {
        WavefunctionForm::new(
            complex(self.g2),
            complex(self.g1),
            complex(self.g0),
            self.zeros.iter().map(|&p| complex(p)).collect(),
            complex(self.leading),
        )
    }
}

/// A parsed input file: either a stellar state or an already built form.
#[derive(Clone, Debug)]
pub enum Descriptor {
    State(StellarState),
    Form(WavefunctionForm),
}

pub fn parse_descriptor(text: &str) -> Result<Descriptor> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("bad JSON: {e}")))?;
    let bad = |e: serde_json::Error| Error::InvalidParameter(format!("bad descriptor: {e}"));
    if value.get("core").is_some() {
        let d: StateDescriptor = serde_json::from_value(value).map_err(bad)?;
        Ok(Descriptor::State(d.to_state()?))
    } else if value.get("zeros").is_some() {
        let d: FormDescriptor = serde_json::from_value(value).map_err(bad)?;
        Ok(Descriptor::Form(d.to_form()?))
    } else {
        Err(Error::InvalidParameter("descriptor has neither `core` nor `zeros`".into()))
    }
}

/// 17 significant digits in scientific notation; round-trips any double.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Compact JSON with every float written by [`fmt17`].
struct Fmt17;

impl serde_json::ser::Formatter for Fmt17 {
    fn write_f64<W: ?Sized + std::io::Write>(&mut self, w: &mut W, value: f64) -> std::io::Result<()> {
        w.write_all(fmt17(value).as_bytes())
    }
}

pub fn to_json17<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Fmt17);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::InvalidParameter(format!("cannot serialize: {e}")))?;
    Ok(String::from_utf8(buf).expect("JSON output is UTF-8"))
}

pub const TRAJECTORY_HEADER: &str = "t,k,re,im,method";

/// CSV rows `t,k,re,im,method`, one per time sample and zero.
pub fn trajectory_csv_rows(traj: &ZeroTrajectory) -> String {
    let mut out = String::new();
    for (i, &t) in traj.times.iter().enumerate() {
        for (k, path) in traj.paths.iter().enumerate() {
            let z = path[i];
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt17(t),
                k,
                fmt17(z.re),
                fmt17(z.im),
                traj.method.label()
            ));
        }
    }
    out
}

#[derive(Serialize)]
struct CrossingLine<'a> {
    k: usize,
    t: f64,
    x: f64,
    flag: &'a str,
}

/// One JSON object per line: `{"k", "t", "x", "flag"}`.
pub fn crossing_json_lines(events: &[CrossingEvent]) -> String {
    let mut out = String::new();
    for e in events {
        let line = CrossingLine {
            k: e.zero_index,
            t: e.t_star,
            x: e.x_star,
            flag: e.flag.label(),
        };
        out.push_str(&to_json17(&line).expect("plain struct serializes"));
        out.push('\n');
    }
    out
}
