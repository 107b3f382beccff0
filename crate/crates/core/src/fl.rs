//! Spectrum-based fault localization with the Ochiai metric.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lang::{CoverageTrace, StmtId};

/// Execution counts of one statement over a test suite.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    /// failing tests executing the statement
    pub ef: u32,
    /// passing tests executing the statement
    pub ep: u32,
    /// failing tests not executing it
    pub nf: u32,
    /// passing tests not executing it
    pub np: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub failing: u32,
    pub passing: u32,
    /// statement -> (source offset, counts)
    pub statements: BTreeMap<StmtId, (usize, Counts)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FlError {
    #[error("no failing test")]
    NoFailingTest,
    #[error("no test traces")]
    NoTraces,
    #[error("bug has no ground-truth buggy statements")]
    NoGroundTruth,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Suspicious {
    pub stmt: StmtId,
    pub score: f64,
}

/// Count executions for every statement of `universe` (statement id plus
/// its start offset). Crashed and timed-out tests count as failing.
pub fn build_spectrum(traces: &[CoverageTrace], universe: &[(StmtId, usize)]) -> Result<Spectrum, FlError> {
    if traces.is_empty() {
        return Err(FlError::NoTraces);
    }
    let failing = traces.iter().filter(|t| !t.verdict.is_pass()).count() as u32;
    if failing == 0 {
        return Err(FlError::NoFailingTest);
    }
    let passing = traces.len() as u32 - failing;
    let mut statements = BTreeMap::new();
    for (id, pos) in universe {
        let mut c = Counts::default();
        for t in traces {
            match (t.covers(id), t.verdict.is_pass()) {
                (true, false) => c.ef += 1,
                (true, true) => c.ep += 1,
                (false, false) => c.nf += 1,
                (false, true) => c.np += 1,
            }
        }
        statements.insert(id.clone(), (*pos, c));
    }
    Ok(Spectrum { failing, passing, statements })
}

/// `ef / sqrt((ef + nf) * (ef + ep))`, or 0 when the denominator is 0.
pub fn ochiai(ef: u32, ep: u32, nf: u32) -> f64 {
    let denom = (((ef + nf) as f64) * ((ef + ep) as f64)).sqrt();
    if denom == 0.0 {
        0.0
    } else {
        ef as f64 / denom
    }
}

/// Statements with a positive score, highest first; ties by file path then
/// source offset.
pub fn rank(spectrum: &Spectrum) -> Vec<Suspicious> {
    let mut scored: Vec<(&StmtId, usize, f64)> = spectrum
        .statements
        .iter()
        .map(|(id, (pos, c))| (id, *pos, ochiai(c.ef, c.ep, c.nf)))
        .filter(|(_, _, s)| *s > 0.0)
        .collect();
    scored.sort_by(|a, b| {
        b.2.partial_cmp(&a.2).unwrap_or(Ordering::Equal).then_with(|| a.0.file.cmp(&b.0.file)).then(a.1.cmp(&b.1))
    });
    scored.into_iter().map(|(id, _, score)| Suspicious { stmt: id.clone(), score }).collect()
}

/// The known buggy statements, each with score 1, in source order.
pub fn perfect_localization(locations: &[(StmtId, usize)]) -> Result<Vec<Suspicious>, FlError> {
    if locations.is_empty() {
        return Err(FlError::NoGroundTruth);
    }
    let mut locs: Vec<&(StmtId, usize)> = locations.iter().collect();
    locs.sort_by(|a, b| a.0.file.cmp(&b.0.file).then(a.1.cmp(&b.1)));
    locs.dedup_by(|a, b| a.0 == b.0);
    Ok(locs.into_iter().map(|(id, _)| Suspicious { stmt: id.clone(), score: 1.0 }).collect())
}

/// 1-based position of the first of `targets` in a suspicious list.
pub fn position_of(list: &[Suspicious], targets: &[StmtId]) -> Option<usize> {
    list.iter().position(|s| targets.contains(&s.stmt)).map(|p| p + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::Verdict;

    fn sid(n: u32) -> StmtId {
        StmtId { file: "a.mj".into(), node: n }
    }

    fn trace(verdict: Verdict, covered: &[u32]) -> CoverageTrace {
        CoverageTrace { test: "t".into(), verdict, counts: covered.iter().map(|n| (sid(*n), 1)).collect() }
    }

    #[test]
    fn hand_counted_spectrum() {
        let traces = vec![trace(Verdict::Failed, &[1, 2]), trace(Verdict::Passed, &[2])];
        let sp = build_spectrum(&traces, &[(sid(1), 10), (sid(2), 20), (sid(3), 30)]).unwrap();
        assert_eq!(sp.statements[&sid(1)].1, Counts { ef: 1, ep: 0, nf: 0, np: 1 });
        assert_eq!(sp.statements[&sid(2)].1, Counts { ef: 1, ep: 1, nf: 0, np: 0 });
        assert_eq!(sp.statements[&sid(3)].1, Counts { ef: 0, ep: 0, nf: 1, np: 1 });
        let r = rank(&sp);
        assert_eq!(r.iter().map(|s| s.stmt.node).collect::<Vec<_>>(), vec![1, 2]);
    }

    #[test]
    fn all_passing_is_an_error() {
        let traces = vec![trace(Verdict::Passed, &[1])];
        assert_eq!(build_spectrum(&traces, &[(sid(1), 0)]), Err(FlError::NoFailingTest));
    }

    #[test]
    fn crashes_count_as_failures() {
        let traces = vec![trace(Verdict::Crashed("x".into()), &[1]), trace(Verdict::TimedOut, &[])];
        let sp = build_spectrum(&traces, &[(sid(1), 0)]).unwrap();
        assert_eq!(sp.failing, 2);
    }

    #[test]
    fn ochiai_values() {
        assert_eq!(ochiai(1, 0, 0), 1.0);
        assert_eq!(ochiai(0, 3, 2), 0.0);
        assert!((ochiai(2, 2, 1) - 2.0 / 12f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn perfect_localization_is_source_ordered() {
        let l = perfect_localization(&[(sid(9), 90), (sid(3), 30), (sid(5), 50)]).unwrap();
        assert_eq!(l.iter().map(|s| s.stmt.node).collect::<Vec<_>>(), vec![3, 5, 9]);
        assert!(l.iter().all(|s| s.score == 1.0));
        assert_eq!(perfect_localization(&[]), Err(FlError::NoGroundTruth));
    }
}
