//! Per-image search for the parameter at which a filter reaches a target
//! smoothing level, where smoothing level = 1 - SO.
//!
//! SO is assumed non-increasing in the parameter, so the search is a
//! bracketing bisection on `[0, param_max]`. It stops when the achieved level
//! is within [`MATCH_TOLERANCE`] of the target, when the smoothing levels at
//! the bracket ends differ by less than [`BRACKET_COLLAPSE`], or after
//! [`MAX_EVALUATIONS`] evaluations. The best parameter seen is returned, not
//! the last iterate.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::FilterInstance;
use crate::metrics::so_from_fields;
use crate::raster::{gradient_magnitude, GradientField, ImageF};

pub const MATCH_TOLERANCE: f64 = 1e-3;
pub const BRACKET_COLLAPSE: f64 = 1e-4;
pub const MAX_EVALUATIONS: usize = 60;

/// The ten common-baseline targets 0.1, 0.2, ..., 1.0.
pub fn baseline_levels() -> Vec<f64> {
    (1..=10).map(|i| i as f64 / 10.0).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub filter_id: String,
    pub target_level: f64,
    pub param: f64,
    /// `param / param_max`.
    pub normalized_param: f64,
    pub achieved_so: f64,
    pub achieved_level: f64,
    pub deviation: f64,
    /// Parameter values evaluated by this search.
    pub evaluations: usize,
    pub converged: bool,
    /// The parameter is an integer and every admissible value was scanned
    /// without converging, so `param` is the closest integer match.
    #[serde(default)]
    pub resolution_limited: bool,
}

impl MatchResult {
    /// Converged, or as close as an integer parameter allows.
    pub fn settled(&self) -> bool {
        self.converged || self.resolution_limited
    }

    pub const CSV_HEADER: [&'static str; 8] = [
        "filter_id",
        "target",
        "param",
        "normalized_param",
        "achieved_level",
        "deviation",
        "evaluations",
        "converged",
    ];

    pub fn csv_record(&self) -> [String; 8] {
        [
            self.filter_id.clone(),
            self.target_level.to_string(),
            self.param.to_string(),
            self.normalized_param.to_string(),
            self.achieved_level.to_string(),
            self.deviation.to_string(),
            self.evaluations.to_string(),
            self.converged.to_string(),
        ]
    }
}

/// Raw outcome of a search over an abstract level function.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome<T> {
    pub param: f64,
    pub level: f64,
    pub deviation: f64,
    pub evaluations: usize,
    pub converged: bool,
    /// Every integer parameter was evaluated without converging.
    pub resolution_limited: bool,
    /// The payload produced at `param`.
    pub payload: T,
    /// Final bracket `(lo, level(lo), hi, level(hi))`.
    pub bracket: (f64, f64, f64, f64),
}

/// Bisection over `[0, max]` for a non-decreasing level function.
///
/// `eval(p)` returns the smoothing level at `p` and a payload kept for the
/// best parameter. With `integer`, only integer parameters are probed, and
/// when bisection ends unconverged the remaining integers are scanned if
/// they fit in the evaluation budget. The result is then the closest integer
/// match even where the level is not monotone.
pub fn search<T, F>(mut eval: F, max: f64, integer: bool, target: f64) -> Result<SearchOutcome<T>>
where
    F: FnMut(f64) -> Result<(f64, T)>,
{
    if !(0.0..=1.0).contains(&target) {
        return Err(Error::TargetOutOfRange(target));
    }
    let max = if integer { max.floor() } else { max };
    let mut probed: Vec<f64> = Vec::new();
    // (param, level, deviation, payload) of the best evaluation so far.
    let mut best: Option<(f64, f64, f64, T)> = None;
    let mut probe = |p: f64, probed: &mut Vec<f64>, best: &mut Option<(f64, f64, f64, T)>| -> Result<f64> {
        let (level, payload) = eval(p)?;
        probed.push(p);
        let dev = (level - target).abs();
        // Ties go to the parameter probed first.
        if best.as_ref().is_none_or(|b| dev < b.2) {
            *best = Some((p, level, dev, payload));
        }
        Ok(level)
    };
    let done = |best: &Option<(f64, f64, f64, T)>| best.as_ref().is_some_and(|b| b.2 <= MATCH_TOLERANCE);

    let (mut lo, mut hi) = (0.0, max);
    let mut lo_level = probe(lo, &mut probed, &mut best)?;
    let mut hi_level = lo_level;
    if !done(&best) && max > 0.0 {
        hi_level = probe(hi, &mut probed, &mut best)?;
        // Bisect only while the target is bracketed.
        if lo_level <= target && target <= hi_level {
            while !done(&best) && probed.len() < MAX_EVALUATIONS {
                if (hi_level - lo_level).abs() < BRACKET_COLLAPSE {
                    break;
                }
                let mid = if integer {
                    if hi - lo <= 1.0 {
                        break;
                    }
                    ((lo + hi) / 2.0).floor()
                } else {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    mid
                };
                let level = probe(mid, &mut probed, &mut best)?;
                if level < target {
                    lo = mid;
                    lo_level = level;
                } else {
                    hi = mid;
                    hi_level = level;
                }
            }
        }
    }
    let mut resolution_limited = false;
    if integer && !done(&best) {
        let rest: Vec<f64> = (0..=max as usize)
            .map(|r| r as f64)
            .filter(|r| !probed.contains(r))
            .collect();
        if probed.len() + rest.len() <= MAX_EVALUATIONS {
            for r in rest {
                probe(r, &mut probed, &mut best)?;
            }
            resolution_limited = true;
        }
    }
    let (param, level, deviation, payload) = best.expect("at least one evaluation");
    Ok(SearchOutcome {
        param,
        level,
        deviation,
        evaluations: probed.len(),
        converged: deviation <= MATCH_TOLERANCE,
        resolution_limited: resolution_limited && deviation > MATCH_TOLERANCE,
        payload,
        bracket: (lo, lo_level, hi, hi_level),
    })
}

/// Searches parameters of one filter on one image, memoizing the smoothing
/// level of evaluated parameters so that several targets share filter
/// applications.
pub struct Matcher<'a> {
    filter: &'a FilterInstance,
    image: &'a ImageF,
    original: GradientField,
    levels: HashMap<u64, f64>,
}

impl<'a> Matcher<'a> {
    pub fn new(filter: &'a FilterInstance, image: &'a ImageF) -> Self {
        Self {
            filter,
            image,
            original: gradient_magnitude(image),
            levels: HashMap::new(),
        }
    }

    pub fn filter(&self) -> &FilterInstance {
        self.filter
    }

    /// Smoothing level at `param`, with the output when it had to be
    /// computed.
    fn evaluate(&mut self, param: f64, keep: bool) -> Result<(f64, Option<ImageF>)> {
        if let Some(level) = self.levels.get(&param.to_bits()) {
            return Ok((*level, None));
        }
        let out = self.filter.apply(self.image, param)?;
        let level = 1.0 - so_from_fields(&self.original, &gradient_magnitude(&out), None);
        self.levels.insert(param.to_bits(), level);
        Ok((level, keep.then_some(out)))
    }

    fn run(&mut self, target: f64, keep: bool) -> Result<(MatchResult, Option<ImageF>)> {
        let max = self.filter.param_max();
        let integer = self.filter.descriptor().integer_param;
        let outcome = search(|p| self.evaluate(p, keep), max, integer, target)?;
        let result = MatchResult {
            filter_id: self.filter.id().to_string(),
            target_level: target,
            param: outcome.param,
            normalized_param: outcome.param / max,
            achieved_so: 1.0 - outcome.level,
            achieved_level: outcome.level,
            deviation: outcome.deviation,
            evaluations: outcome.evaluations,
            converged: outcome.converged,
            resolution_limited: outcome.resolution_limited,
        };
        Ok((result, outcome.payload))
    }

    pub fn find(&mut self, target: f64) -> Result<MatchResult> {
        self.run(target, false).map(|(m, _)| m)
    }

    /// Best match for `target` together with the smoothed image.
    pub fn find_with_output(&mut self, target: f64) -> Result<(MatchResult, ImageF)> {
        let (m, out) = self.run(target, true)?;
        let out = match out {
            Some(out) => out,
            None => self.filter.apply(self.image, m.param)?,
        };
        Ok((m, out))
    }
}

/// Finds the parameter whose output smoothing level best matches `target`.
pub fn find_parameter(filter: &FilterInstance, image: &ImageF, target: f64) -> Result<MatchResult> {
    Matcher::new(filter, image).find(target)
}

/// Like [`find_parameter`], also returning the matched output.
pub fn find_parameter_with_output(
    filter: &FilterInstance,
    image: &ImageF,
    target: f64,
) -> Result<(MatchResult, ImageF)> {
    Matcher::new(filter, image).find_with_output(target)
}

/// Matches the ten baseline levels in order.
pub fn baseline_match(filter: &FilterInstance, image: &ImageF) -> Result<Vec<MatchResult>> {
    let mut matcher = Matcher::new(filter, image);
    baseline_levels()
        .into_iter()
        .map(|t| matcher.find(t))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(f: impl Fn(f64) -> f64, max: f64, integer: bool, target: f64) -> SearchOutcome<()> {
        search(|p| Ok((f(p), ())), max, integer, target).unwrap()
    }

    #[test]
    fn target_zero_stops_at_identity() {
        let o = run(|p| p / 10.0, 10.0, false, 0.0);
        assert_eq!((o.param, o.deviation, o.evaluations), (0.0, 0.0, 1));
        assert!(o.converged);
    }

    #[test]
    fn linear_level_converges() {
        let o = run(|p| p / 10.0, 10.0, false, 0.437);
        assert!(o.converged && o.deviation <= 1e-3);
        assert!(o.evaluations <= MAX_EVALUATIONS);
    }

    #[test]
    fn unreachable_target_clamps_to_max() {
        let o = run(|p| 0.9 * p / 2.0, 2.0, false, 1.0);
        assert_eq!(o.param, 2.0);
        assert!(!o.converged && !o.resolution_limited);
        assert!((o.deviation - 0.1).abs() < 1e-12);
        assert_eq!(o.evaluations, 2);
    }

    #[test]
    fn integer_steps() {
        let level = |p: f64| p.round() / 10.0;
        let o = run(level, 10.0, true, 0.34);
        assert_eq!(o.evaluations, 11);
        assert_eq!(o.param, 3.0);
        assert!(!o.converged && o.resolution_limited);
        assert!((o.deviation - 0.04).abs() < 1e-12);
    }

    #[test]
    fn integer_scan_handles_non_monotone_levels() {
        // Peaks at r = 2 and falls off: endpoints do not bracket 0.7.
        let table = [0.0, 0.75, 0.8, 0.6, 0.55, 0.5];
        let o = run(|p| table[p as usize], 5.0, true, 0.7);
        assert_eq!(o.param, 1.0);
        assert!(o.resolution_limited);
    }

    #[test]
    fn out_of_range_target() {
        assert!(search(|p| Ok((p, ())), 1.0, false, 1.5).is_err());
        assert!(search(|p| Ok((p, ())), 1.0, false, f64::NAN).is_err());
    }

    #[test]
    fn best_seen_beats_final_endpoints() {
        // A jittery but mostly increasing response.
        let f = |p: f64| (p + 0.02 * (40.0 * p).sin()).clamp(0.0, 1.0);
        for t in [0.13, 0.5, 0.77] {
            let o = run(f, 1.0, false, t);
            let (lo, _, hi, _) = o.bracket;
            assert!(o.deviation <= (f(lo) - t).abs() + 1e-15);
            assert!(o.deviation <= (f(hi) - t).abs() + 1e-15);
        }
    }

    #[test]
    fn flat_bracket_stops() {
        // Level jumps from 0.2 to 0.6 at p = 0.5: the target 0.4 is never
        // matched; the loop ends on the evaluation cap or bracket width.
        let o = run(|p| if p < 0.5 { 0.2 } else { 0.6 }, 1.0, false, 0.4);
        assert!(!o.converged);
        assert!(o.evaluations <= MAX_EVALUATIONS);
    }
}
