use std::fmt::Write as _;

use crate::error::{Error, Result};

use super::intensity::{decay, is_strictly_sorted};
use super::params::ModelParams;

/// Source of a jump of the intensity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JumpKind {
    /// A claim arrival: the intensity jumps by ℓ(mark), the insurer pays `mark`.
    Claim,
    /// An external shock: the intensity jumps by `mark`.
    External,
}

impl JumpKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Claim => "claim",
            Self::External => "external",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpRecord {
    pub time: f64,
    pub kind: JumpKind,
    pub mark: f64,
}

impl JumpRecord {
    pub fn claim(time: f64, mark: f64) -> Self {
        Self {
            time,
            kind: JumpKind::Claim,
            mark,
        }
    }

    pub fn external(time: f64, mark: f64) -> Self {
        Self {
            time,
            kind: JumpKind::External,
            mark,
        }
    }

    /// Size of the intensity jump this record causes.
    #[inline]
    pub fn intensity_jump(&self, params: &ModelParams) -> f64 {
        match self.kind {
            JumpKind::Claim => params.self_excitation.eval(self.mark),
            JumpKind::External => self.mark,
        }
    }
}

/// One simulated realization of the marked jumps on `(start, horizon]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord {
    pub params: ModelParams,
    /// Time at which the path was started.
    pub start: f64,
    /// Intensity at `start`.
    pub initial_intensity: f64,
    /// Jumps ordered by strictly increasing time, all in `(start, horizon]`.
    pub jumps: Vec<JumpRecord>,
    pub seed: u64,
    pub horizon: f64,
}

/// One piece of a path between consecutive jumps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub from: f64,
    pub to: f64,
    /// Intensity right after `from` (post-jump value).
    pub intensity: f64,
    /// The jump that ends the segment, if any.
    pub end_jump: Option<JumpRecord>,
}

impl PathRecord {
    pub fn validate(&self) -> Result<()> {
        if !is_strictly_sorted(&self.jumps) {
            return Err(Error::Structural(
                "path jumps are not strictly increasing in time".into(),
            ));
        }
        if let Some(j) = self.jumps.first() {
            if j.time <= self.start {
                return Err(Error::Structural(format!(
                    "jump at {} precedes path start {}",
                    j.time, self.start
                )));
            }
        }
        if let Some(j) = self.jumps.last() {
            if j.time > self.horizon {
                return Err(Error::Structural(format!(
                    "jump at {} beyond horizon {}",
                    j.time, self.horizon
                )));
            }
        }
        Ok(())
    }

    pub fn claims(&self) -> impl Iterator<Item = &JumpRecord> {
        self.jumps.iter().filter(|j| j.kind == JumpKind::Claim)
    }

    pub fn claim_count(&self) -> usize {
        self.claims().count()
    }

    /// Inter-jump segments covering `[start, horizon]`.
    pub fn segments(&self) -> Segments<'_> {
        Segments {
            path: self,
            next: 0,
            time: self.start,
            intensity: self.initial_intensity,
            done: false,
        }
    }

    /// Intensity at `t` by recursion over the segments; càdlàg unless `left_limit`.
    pub fn intensity_at(&self, t: f64, left_limit: bool) -> f64 {
        let p = &self.params;
        let mut time = self.start;
        let mut lam = self.initial_intensity;
        for j in &self.jumps {
            if j.time > t || (left_limit && j.time == t) {
                break;
            }
            lam = decay(p, lam, j.time - time) + j.intensity_jump(p);
            time = j.time;
        }
        decay(p, lam, t - time)
    }

    /// Intensity at the horizon.
    pub fn terminal_intensity(&self) -> f64 {
        self.intensity_at(self.horizon, false)
    }

    /// CSV dump: `time,kind,mark,lambda_after`, floats with 17 significant digits.
    pub fn to_csv(&self, header_comment: Option<&str>) -> String {
        let mut out = String::new();
        if let Some(c) = header_comment {
            for line in c.lines() {
                let _ = writeln!(out, "# {line}");
            }
        }
        out.push_str("time,kind,mark,lambda_after\n");
        for seg in self.segments() {
            if let Some(j) = seg.end_jump {
                let after = decay(&self.params, seg.intensity, seg.to - seg.from) + j.intensity_jump(&self.params);
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    fmt17(j.time),
                    j.kind.as_str(),
                    fmt17(j.mark),
                    fmt17(after)
                );
            }
        }
        out
    }
}

pub struct Segments<'a> {
    path: &'a PathRecord,
    next: usize,
    time: f64,
    intensity: f64,
    done: bool,
}

impl Iterator for Segments<'_> {
    type Item = Segment;

    fn next(&mut self) -> Option<Segment> {
        if self.done {
            return None;
        }
        let p = &self.path.params;
        match self.path.jumps.get(self.next) {
            Some(j) => {
                let seg = Segment {
                    from: self.time,
                    to: j.time,
                    intensity: self.intensity,
                    end_jump: Some(*j),
                };
                self.intensity = decay(p, self.intensity, j.time - self.time) + j.intensity_jump(p);
                self.time = j.time;
                self.next += 1;
                Some(seg)
            }
            None => {
                self.done = true;
                Some(Segment {
                    from: self.time,
                    to: self.path.horizon,
                    intensity: self.intensity,
                    end_jump: None,
                })
            }
        }
    }
}

/// Decimal rendering with 17 significant digits; parses back to the same bits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}
