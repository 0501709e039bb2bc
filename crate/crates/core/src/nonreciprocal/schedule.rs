use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::model::{Mechanism, ReciprocityClass};

/// One constant-control interval of a schedule, in fractions of the period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub value: f64,
}

impl Segment {
    pub fn new(start: f64, end: f64, value: f64) -> Self {
        Segment { start, end, value }
    }
}

/// Periodic, piecewise-constant control waveform per super-column.
///
/// Every group's segments tile `[0, 1)` exactly: sorted, contiguous,
/// non-empty, first start 0 and last end 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSchedule {
    period_s: f64,
    groups: Vec<Vec<Segment>>,
}

impl ControlSchedule {
    pub fn new(period_s: f64, groups: Vec<Vec<Segment>>) -> Result<Self> {
        if !(period_s > 0.0 && period_s.is_finite()) {
            return Err(Error::Schedule(format!("period {period_s} s must be > 0")));
        }
        if groups.is_empty() {
            return Err(Error::Schedule("schedule has no groups".into()));
        }
        for (g, segs) in groups.iter().enumerate() {
            check_tiling(g, segs)?;
        }
        Ok(ControlSchedule { period_s, groups })
    }

    /// Time-invariant schedule holding one value per group.
    pub fn constant(period_s: f64, values: &[f64]) -> Result<Self> {
        Self::new(
            period_s,
            values.iter().map(|&v| vec![Segment::new(0.0, 1.0, v)]).collect(),
        )
    }

    /// Replicates `base` over `n_groups` groups, delaying group `g` by
    /// `g · shift` periods. Delay by a fraction of the period is what turns
    /// a temporal waveform into a per-harmonic spatial phase ramp.
    pub fn time_gradient(period_s: f64, base: &[Segment], n_groups: usize, shift: f64) -> Result<Self> {
        check_tiling(0, base)?;
        if !shift.is_finite() {
            return Err(Error::Schedule(format!("group shift {shift} is not finite")));
        }
        let groups = (0..n_groups).map(|g| delayed(base, g as f64 * shift)).collect();
        Self::new(period_s, groups)
    }

    pub fn period_s(&self) -> f64 {
        self.period_s
    }

    pub fn modulation_hz(&self) -> f64 {
        1.0 / self.period_s
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    pub fn segments(&self, group: usize) -> &[Segment] {
        &self.groups[group]
    }

    /// Index of the segment holding period fraction `u` (reduced into [0, 1)).
    pub(crate) fn segment_index(&self, group: usize, u: f64) -> usize {
        let u = reduce(u);
        let segs = &self.groups[group];
        segs.partition_point(|s| s.end <= u).min(segs.len() - 1)
    }

    pub fn value_at(&self, group: usize, u: f64) -> f64 {
        self.groups[group][self.segment_index(group, u)].value
    }

    /// Control values of all groups at absolute time `t_s`.
    pub fn values_at(&self, t_s: f64) -> Vec<f64> {
        let u = t_s / self.period_s;
        (0..self.groups.len()).map(|g| self.value_at(g, u)).collect()
    }

    pub fn is_static(&self) -> bool {
        self.groups
            .iter()
            .all(|segs| segs.iter().all(|s| s.value == segs[0].value))
    }

    pub fn reciprocity_class(&self) -> ReciprocityClass {
        if self.is_static() {
            ReciprocityClass::Reciprocal
        } else {
            ReciprocityClass::Nonreciprocal(Mechanism::TimeVarying)
        }
    }

    pub fn from_toml_str(text: &str, path: &Path) -> Result<Self> {
        let file: ScheduleFile = toml::from_str(text).map_err(|e| parse_error(path, text, &e))?;
        let to_segments = |raw: &[[f64; 3]]| -> Vec<Segment> {
            raw.iter().map(|s| Segment::new(s[0], s[1], s[2])).collect()
        };
        match (file.groups, file.gradient) {
            (Some(groups), None) => Self::new(
                file.period_s,
                groups.iter().map(|g| to_segments(&g.segments)).collect(),
            ),
            (None, Some(gr)) => Self::time_gradient(file.period_s, &to_segments(&gr.segments), gr.groups, gr.shift),
            _ => Err(Error::Parse {
                path: path.to_path_buf(),
                line: None,
                column: None,
                message: "exactly one of [[groups]] or [gradient] is required".into(),
            }),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text, path)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleFile {
    period_s: f64,
    groups: Option<Vec<GroupEntry>>,
    gradient: Option<GradientEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupEntry {
    segments: Vec<[f64; 3]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GradientEntry {
    groups: usize,
    shift: f64,
    segments: Vec<[f64; 3]>,
}

pub(crate) fn parse_error(path: &Path, text: &str, e: &toml::de::Error) -> Error {
    let (line, column) = match e.span() {
        Some(span) => {
            let before = &text[..span.start.min(text.len())];
            let line = before.matches('\n').count() + 1;
            let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
            (Some(line), Some(column))
        }
        None => (None, None),
    };
    Error::Parse {
        path: path.to_path_buf(),
        line,
        column,
        message: e.message().to_string(),
    }
}

fn reduce(u: f64) -> f64 {
    let r = u.rem_euclid(1.0);
    // rem_euclid rounds tiny negatives up to exactly 1.0.
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

fn check_tiling(group: usize, segs: &[Segment]) -> Result<()> {
    let fail = |msg: String| Err(Error::Schedule(format!("group {group}: {msg}")));
    let Some(first) = segs.first() else {
        return fail("no segments".into());
    };
    if first.start != 0.0 {
        return fail(format!("first segment starts at {} instead of 0", first.start));
    }
    for (i, s) in segs.iter().enumerate() {
        if !s.value.is_finite() {
            return fail(format!("segment {i} value {} is not finite", s.value));
        }
        if !(s.end > s.start) {
            return fail(format!("segment {i} [{}, {}) is empty", s.start, s.end));
        }
        if let Some(next) = segs.get(i + 1) {
            if next.start < s.end {
                return fail(format!("segments {i} and {} overlap at {}", i + 1, next.start));
            }
            if next.start > s.end {
                return fail(format!("gap between {} and {}", s.end, next.start));
            }
        }
    }
    let last = segs[segs.len() - 1].end;
    if last != 1.0 {
        return fail(format!("last segment ends at {last} instead of 1"));
    }
    Ok(())
}

/// `base(u - delay)` re-expressed as segments tiling [0, 1).
fn delayed(base: &[Segment], delay: f64) -> Vec<Segment> {
    let d = reduce(delay);
    if d == 0.0 {
        return base.to_vec();
    }
    let mut starts: Vec<(f64, f64)> = base.iter().map(|s| (reduce(s.start + d), s.value)).collect();
    starts.sort_by(|a, b| a.0.total_cmp(&b.0));
    if starts[0].0 > 0.0 {
        let wrap = starts[starts.len() - 1].1;
        starts.insert(0, (0.0, wrap));
    }
    let mut out = Vec::with_capacity(starts.len());
    for (i, &(start, value)) in starts.iter().enumerate() {
        let end = starts.get(i + 1).map_or(1.0, |n| n.0);
        if end > start {
            out.push(Segment::new(start, end, value));
        }
    }
    out
}
