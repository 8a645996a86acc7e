//! Admissible integer weights of level k on a trivalent graph.
//!
//! A weight assigns `j_e / k` to every edge, `0 <= j_e <= k`. At each vertex,
//! with `a, b, c` the numerators on its three edge-ends (a loop counted twice):
//!
//! 1. `a + b + c` is even,
//! 2. `a + b + c <= 2k`,
//! 3. `a, b, c` satisfy the triangle inequalities,
//!
//! and 4. every bridge carries an even numerator. All checks are exact integer
//! arithmetic on numerators.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::params::Level;
use crate::trigraph::{bridges, TrivalentGraph};

/// Slack for the real-relaxed polytope test, absorbing `j/k` rounding.
pub const POLYTOPE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeightError {
    #[error("weight has {got} labels but the graph has {expected} edges")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("weight is of level {weight} but level {requested} was requested")]
    LevelMismatch { weight: u32, requested: u32 },
    #[error("label {numerator}/{level} on edge {edge} exceeds 1")]
    LabelOutOfRange {
        edge: usize,
        numerator: u32,
        level: u32,
    },
    #[error("action coordinate {value} at index {index} lies outside [0, 1]")]
    CoordinateOutOfRange { index: usize, value: f64 },
}

/// Which numerators an edge label may take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelRange {
    /// `0..=k`, labels `{0, 1/k, ..., 1}`.
    #[default]
    Closed,
    /// `0..k`, labels `{0, 1/k, ..., (k-1)/k}` without the endpoint 1.
    HalfOpen,
}

impl LabelRange {
    fn max_numerator(self, k: u32) -> Option<u32> {
        match self {
            LabelRange::Closed => Some(k),
            LabelRange::HalfOpen => k.checked_sub(1),
        }
    }
}

/// Edge labelling `w_e = numerators[e] / level`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct WeightFunction {
    level: Level,
    numerators: Vec<u32>,
}

impl WeightFunction {
    pub fn new(level: Level, numerators: Vec<u32>) -> Result<Self, WeightError> {
        let k = level.get();
        if let Some((edge, &numerator)) = numerators.iter().enumerate().find(|(_, &j)| j > k) {
            return Err(WeightError::LabelOutOfRange {
                edge,
                numerator,
                level: k,
            });
        }
        Ok(WeightFunction { level, numerators })
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn numerators(&self) -> &[u32] {
        &self.numerators
    }

    pub fn label(&self, e: usize) -> f64 {
        f64::from(self.numerators[e]) / f64::from(self.level.get())
    }

    /// The labels as a point of the action cube.
    pub fn to_action_point(&self) -> ActionPoint {
        ActionPoint((0..self.numerators.len()).map(|e| self.label(e)).collect())
    }
}

/// Point of `[0, 1]^E` in action coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ActionPoint(Vec<f64>);

impl ActionPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self, WeightError> {
        if let Some((index, &value)) = coords
            .iter()
            .enumerate()
            .find(|(_, c)| !(0.0..=1.0).contains(*c))
        {
            return Err(WeightError::CoordinateOutOfRange { index, value });
        }
        Ok(ActionPoint(coords))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Site {
    Vertex(usize),
    Edge(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub site: Site,
    /// Condition number 1..=4 as listed in the module docs.
    pub condition: u8,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.site {
            Site::Vertex(v) => write!(f, "vertex {v}")?,
            Site::Edge(e) => write!(f, "edge {e}")?,
        }
        write!(f, ", condition {}: {}", self.condition, self.detail)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AdmissibilityReport {
    pub violations: Vec<Violation>,
}

impl AdmissibilityReport {
    pub fn admissible(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violates(&self, condition: u8) -> bool {
        self.violations.iter().any(|v| v.condition == condition)
    }
}

#[inline]
fn parity_ok(a: u32, b: u32, c: u32) -> bool {
    (a + b + c) % 2 == 0
}

#[inline]
fn sum_ok(a: u32, b: u32, c: u32, k: u32) -> bool {
    a + b + c <= 2 * k
}

#[inline]
fn triangle_ok(a: u32, b: u32, c: u32) -> bool {
    a <= b + c && b <= a + c && c <= a + b
}

#[inline]
fn vertex_ok(a: u32, b: u32, c: u32, k: u32) -> bool {
    parity_ok(a, b, c) && sum_ok(a, b, c, k) && triangle_ok(a, b, c)
}

/// Checks every condition and lists each violation.
pub fn is_admissible(
    graph: &TrivalentGraph,
    k: Level,
    w: &WeightFunction,
) -> Result<AdmissibilityReport, WeightError> {
    check_shape(graph, w.numerators.len())?;
    if w.level != k {
        return Err(WeightError::LevelMismatch {
            weight: w.level.get(),
            requested: k.get(),
        });
    }
    let kk = k.get();
    let j = &w.numerators;
    let mut violations = Vec::new();
    for (v, ends) in graph.vertex_ends().into_iter().enumerate() {
        let [a, b, c] = ends.map(|e| j[e]);
        let site = Site::Vertex(v);
        let sum = a + b + c;
        if !parity_ok(a, b, c) {
            violations.push(Violation {
                site,
                condition: 1,
                detail: format!("numerator sum {sum} of ({a}, {b}, {c}) is odd"),
            });
        }
        if !sum_ok(a, b, c, kk) {
            violations.push(Violation {
                site,
                condition: 2,
                detail: format!("numerator sum {sum} exceeds 2k = {}", 2 * kk),
            });
        }
        if !triangle_ok(a, b, c) {
            violations.push(Violation {
                site,
                condition: 3,
                detail: format!("({a}, {b}, {c}) violates the triangle inequality"),
            });
        }
    }
    for e in bridges(graph).iter() {
        if j[e] % 2 != 0 {
            violations.push(Violation {
                site: Site::Edge(e),
                condition: 4,
                detail: format!("bridge numerator {} is odd", j[e]),
            });
        }
    }
    Ok(AdmissibilityReport { violations })
}

fn check_shape(graph: &TrivalentGraph, got: usize) -> Result<(), WeightError> {
    if got != graph.edge_count() {
        return Err(WeightError::ShapeMismatch {
            expected: graph.edge_count(),
            got,
        });
    }
    Ok(())
}

/// Edge order and the checks that become decidable after each assignment.
struct Plan {
    order: Vec<usize>,
    /// `closes[p]`: vertices whose three ends are all labelled once
    /// `order[..=p]` is assigned, as their end edge indices.
    closes: Vec<Vec<[usize; 3]>>,
    is_bridge: Vec<bool>,
    max_numerator: u32,
    k: u32,
}

impl Plan {
    fn new(graph: &TrivalentGraph, k: u32, max_numerator: u32) -> Self {
        let ends = graph.vertex_ends();
        let m = graph.edge_count();
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); m];
        for (v, e3) in ends.iter().enumerate() {
            for &e in e3 {
                if !incident[e].contains(&v) {
                    incident[e].push(v);
                }
            }
        }
        let mut labelled = vec![false; m];
        let mut open_ends: Vec<usize> = vec![3; ends.len()];
        let mut order = Vec::with_capacity(m);
        let mut closes = Vec::with_capacity(m);
        for _ in 0..m {
            // greedy: close the most vertices, then touch the most-advanced ones
            let best = (0..m)
                .filter(|&e| !labelled[e])
                .max_by_key(|&e| {
                    let mut closing = 0;
                    let mut progress = 0;
                    for &v in &incident[e] {
                        let uses = ends[v].iter().filter(|&&x| x == e).count();
                        if open_ends[v] == uses {
                            closing += 1;
                        }
                        progress += 3 - open_ends[v];
                    }
                    // prefer lower index on ties
                    (closing, progress, std::cmp::Reverse(e))
                })
                .expect("unlabelled edge remains");
            labelled[best] = true;
            let mut closed = Vec::new();
            for &v in &incident[best] {
                open_ends[v] -= ends[v].iter().filter(|&&x| x == best).count();
                if open_ends[v] == 0 {
                    closed.push(ends[v]);
                }
            }
            order.push(best);
            closes.push(closed);
        }
        let bridge_set = bridges(graph);
        let is_bridge = (0..m).map(|e| bridge_set.contains(e)).collect();
        Plan {
            order,
            closes,
            is_bridge,
            max_numerator,
            k,
        }
    }

    #[inline]
    fn accepts(&self, pos: usize, labels: &[u32]) -> bool {
        let e = self.order[pos];
        if self.is_bridge[e] && labels[e] % 2 != 0 {
            return false;
        }
        self.closes[pos]
            .iter()
            .all(|&[a, b, c]| vertex_ok(labels[a], labels[b], labels[c], self.k))
    }

    fn count(&self, pos: usize, labels: &mut [u32]) -> u64 {
        if pos == self.order.len() {
            return 1;
        }
        let e = self.order[pos];
        let mut total = 0;
        for j in 0..=self.max_numerator {
            labels[e] = j;
            if self.accepts(pos, labels) {
                total += self.count(pos + 1, labels);
            }
        }
        total
    }

    fn collect(&self, pos: usize, labels: &mut [u32], out: &mut Vec<Vec<u32>>) {
        if pos == self.order.len() {
            out.push(labels.to_vec());
            return;
        }
        let e = self.order[pos];
        for j in 0..=self.max_numerator {
            labels[e] = j;
            if self.accepts(pos, labels) {
                self.collect(pos + 1, labels, out);
            }
        }
    }

    /// Independent subtrees, one per label of the first edge.
    fn branches(&self) -> Vec<Vec<u32>> {
        let m = self.order.len();
        (0..=self.max_numerator)
            .filter_map(|j| {
                let mut labels = vec![0; m];
                labels[self.order[0]] = j;
                self.accepts(0, &labels).then_some(labels)
            })
            .collect()
    }
}

/// All admissible weights, sorted lexicographically by numerators.
pub fn enumerate_admissible(graph: &TrivalentGraph, k: Level) -> Vec<WeightFunction> {
    enumerate_admissible_in(graph, k, LabelRange::Closed)
}

pub fn enumerate_admissible_in(
    graph: &TrivalentGraph,
    k: Level,
    range: LabelRange,
) -> Vec<WeightFunction> {
    let Some(max) = range.max_numerator(k.get()) else {
        return Vec::new();
    };
    let plan = Plan::new(graph, k.get(), max);
    let mut all: Vec<Vec<u32>> = plan
        .branches()
        .into_par_iter()
        .flat_map_iter(|mut labels| {
            let mut out = Vec::new();
            plan.collect(1, &mut labels, &mut out);
            out
        })
        .collect();
    all.sort_unstable();
    all.into_iter()
        .map(|numerators| WeightFunction {
            level: k,
            numerators,
        })
        .collect()
}

/// Number of admissible weights, without materializing them.
pub fn count_admissible(graph: &TrivalentGraph, k: Level) -> u64 {
    count_admissible_in(graph, k, LabelRange::Closed)
}

pub fn count_admissible_in(graph: &TrivalentGraph, k: Level, range: LabelRange) -> u64 {
    let Some(max) = range.max_numerator(k.get()) else {
        return 0;
    };
    let plan = Plan::new(graph, k.get(), max);
    plan.branches()
        .into_par_iter()
        .map(|mut labels| plan.count(1, &mut labels))
        .sum()
}

/// Membership in the moment polytope: conditions 2 and 3 over the reals.
pub fn polytope_contains(graph: &TrivalentGraph, c: &ActionPoint) -> Result<bool, WeightError> {
    check_shape(graph, c.0.len())?;
    let x = &c.0;
    Ok(graph.vertex_ends().into_iter().all(|ends| {
        let [a, b, c] = ends.map(|e| x[e]);
        a + b + c <= 2.0 + POLYTOPE_TOL
            && a <= b + c + POLYTOPE_TOL
            && b <= a + c + POLYTOPE_TOL
            && c <= a + b + POLYTOPE_TOL
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lvl(k: u32) -> Level {
        Level::new(k).unwrap()
    }

    fn wf(k: u32, j: &[u32]) -> WeightFunction {
        WeightFunction::new(lvl(k), j.to_vec()).unwrap()
    }

    #[test]
    fn theta_examples() {
        let theta = TrivalentGraph::theta();
        assert!(is_admissible(&theta, lvl(1), &wf(1, &[0, 0, 0]))
            .unwrap()
            .admissible());
        assert!(is_admissible(&theta, lvl(1), &wf(1, &[1, 1, 0]))
            .unwrap()
            .admissible());
        let r = is_admissible(&theta, lvl(2), &wf(2, &[1, 0, 0])).unwrap();
        assert!(!r.admissible());
        assert!(r.violates(1) && r.violates(3));
        assert!(!r.violates(2) && !r.violates(4));
    }

    #[test]
    fn dumbbell_odd_bridge() {
        // loops 1/2 each, bridge 1/2: vertex sums are odd too
        let r = is_admissible(&TrivalentGraph::dumbbell(), lvl(2), &wf(2, &[1, 1, 1])).unwrap();
        assert!(r.violates(4));
        assert!(r
            .violations
            .iter()
            .any(|v| v.site == Site::Edge(1) && v.condition == 4));
    }

    #[test]
    fn shape_and_level_mismatch() {
        let theta = TrivalentGraph::theta();
        assert_eq!(
            is_admissible(&theta, lvl(1), &wf(1, &[0, 0])),
            Err(WeightError::ShapeMismatch {
                expected: 3,
                got: 2
            })
        );
        assert!(matches!(
            is_admissible(&theta, lvl(2), &wf(1, &[0, 0, 0])),
            Err(WeightError::LevelMismatch { .. })
        ));
        assert!(matches!(
            WeightFunction::new(lvl(1), vec![0, 2, 0]),
            Err(WeightError::LabelOutOfRange {
                edge: 1,
                numerator: 2,
                level: 1
            })
        ));
        assert!(polytope_contains(&theta, &ActionPoint::new(vec![0.0; 4]).unwrap()).is_err());
        assert!(ActionPoint::new(vec![0.0, 1.5, 0.0]).is_err());
    }

    #[test]
    fn enumeration_examples() {
        let theta = TrivalentGraph::theta();
        let got: Vec<Vec<u32>> = enumerate_admissible(&theta, lvl(1))
            .into_iter()
            .map(|w| w.numerators)
            .collect();
        assert_eq!(
            got,
            vec![vec![0, 0, 0], vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]
        );

        let got: Vec<Vec<u32>> = enumerate_admissible(&TrivalentGraph::dumbbell(), lvl(1))
            .into_iter()
            .map(|w| w.numerators)
            .collect();
        assert_eq!(
            got,
            vec![vec![0, 0, 0], vec![0, 0, 1], vec![1, 0, 0], vec![1, 0, 1]]
        );

        assert_eq!(enumerate_admissible(&theta, lvl(2)).len(), 10);
        assert_eq!(count_admissible(&theta, lvl(2)), 10);
    }

    #[test]
    fn half_open_range() {
        let theta = TrivalentGraph::theta();
        assert_eq!(count_admissible_in(&theta, lvl(1), LabelRange::HalfOpen), 1);
        assert_eq!(
            enumerate_admissible_in(&theta, lvl(1), LabelRange::HalfOpen).len(),
            1
        );
    }

    #[test]
    fn polytope_examples() {
        let theta = TrivalentGraph::theta();
        assert!(polytope_contains(&theta, &ActionPoint::new(vec![0.0; 3]).unwrap()).unwrap());
        assert!(
            !polytope_contains(&theta, &ActionPoint::new(vec![1.0, 0.0, 0.0]).unwrap()).unwrap()
        );
        assert!(
            !polytope_contains(&theta, &ActionPoint::new(vec![1.0, 1.0, 0.9]).unwrap()).unwrap()
        );
        assert!(
            polytope_contains(&theta, &ActionPoint::new(vec![1.0, 1.0, 0.0]).unwrap()).unwrap()
        );
    }
}
