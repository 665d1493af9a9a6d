//! Per-edge classification metrics between graphs, best-of-K selection
//! and the threshold recognition classifier.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{is_simple, Polygon};
use crate::visibility::{visibility_graph, VisGraph};

/// Confusion counts over all unordered vertex pairs; positive = visible.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeConfusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 { 0.0 } else { num as f64 / den as f64 }
}

impl EdgeConfusion {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn accuracy(&self) -> f64 {
        ratio(self.tp + self.tn, self.total())
    }

    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    /// `2tp / (2tp + fp + fn)`; 1 when neither graph has an edge.
    pub fn f1(&self) -> f64 {
        let den = 2 * self.tp + self.fp + self.fn_;
        if den == 0 { 1.0 } else { 2.0 * self.tp as f64 / den as f64 }
    }

    pub fn scores(&self) -> Scores {
        Scores {
            accuracy: self.accuracy(),
            precision: self.precision(),
            recall: self.recall(),
            f1: self.f1(),
        }
    }
}

impl std::ops::Add for EdgeConfusion {
    type Output = EdgeConfusion;
    fn add(self, o: Self) -> Self {
        EdgeConfusion {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            tn: self.tn + o.tn,
            fn_: self.fn_ + o.fn_,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

pub fn edge_confusion(pred: &VisGraph, truth: &VisGraph) -> Result<EdgeConfusion> {
    if pred.n() != truth.n() {
        return Err(Error::SizeMismatch(pred.n(), truth.n()));
    }
    let mut c = EdgeConfusion::default();
    for i in 0..pred.n() {
        for j in i + 1..pred.n() {
            match (pred.has_edge(i, j), truth.has_edge(i, j)) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, true) => c.fn_ += 1,
                (false, false) => c.tn += 1,
            }
        }
    }
    Ok(c)
}

pub fn f1_score(pred: &VisGraph, truth: &VisGraph) -> Result<f64> {
    edge_confusion(pred, truth).map(|c| c.f1())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Averaging {
    /// Mean of per-graph scores.
    #[default]
    Macro,
    /// Scores of the pooled confusion counts.
    Micro,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetScore {
    pub averaging: Averaging,
    pub count: usize,
    #[serde(flatten)]
    pub scores: Scores,
}

pub fn dataset_score(pairs: &[(VisGraph, VisGraph)], averaging: Averaging) -> Result<DatasetScore> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let per: Vec<EdgeConfusion> = pairs
        .par_iter()
        .map(|(p, t)| edge_confusion(p, t))
        .collect::<Result<_>>()?;
    let scores = match averaging {
        Averaging::Micro => per.iter().fold(EdgeConfusion::default(), |a, &b| a + b).scores(),
        Averaging::Macro => {
            let k = per.len() as f64;
            let mut s = Scores { accuracy: 0.0, precision: 0.0, recall: 0.0, f1: 0.0 };
            for c in &per {
                s.accuracy += c.accuracy();
                s.precision += c.precision();
                s.recall += c.recall();
                s.f1 += c.f1();
            }
            Scores {
                accuracy: s.accuracy / k,
                precision: s.precision / k,
                recall: s.recall / k,
                f1: s.f1 / k,
            }
        }
    };
    Ok(DatasetScore { averaging, count: pairs.len(), scores })
}

/// A candidate counts when it is simple and has the target's vertex count.
pub fn is_valid_candidate(c: &Polygon, target: &VisGraph) -> bool {
    c.len() == target.n() && is_simple(c)
}

/// F1 of every candidate against `target`; `None` for invalid ones.
pub fn candidate_f1s(candidates: &[Polygon], target: &VisGraph) -> Vec<Option<f64>> {
    candidates
        .iter()
        .map(|c| {
            if !is_valid_candidate(c, target) {
                return None;
            }
            visibility_graph(c).ok().and_then(|g| f1_score(&g, target).ok())
        })
        .collect()
}

fn argmax(f1s: &[Option<f64>]) -> Option<(usize, f64)> {
    f1s.iter()
        .enumerate()
        .filter_map(|(i, f)| f.map(|f| (i, f)))
        .fold(None, |best, (i, f)| match best {
            Some((_, bf)) if bf >= f => best,
            _ => Some((i, f)),
        })
}

/// Index and F1 of the best valid candidate, lowest index on ties.
pub fn best_of_k(candidates: &[Polygon], target: &VisGraph) -> Result<(usize, f64)> {
    if candidates.is_empty() {
        return Err(Error::EmptyInput);
    }
    argmax(&candidate_f1s(candidates, target)).ok_or(Error::NoValidCandidate)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecognitionVerdict {
    pub is_valid: bool,
    /// 0 when no candidate is valid.
    pub best_f1: f64,
    pub best_index: Option<usize>,
}

fn check_threshold(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::InvalidThreshold(t))
    }
}

pub fn recognize(candidates: &[Polygon], target: &VisGraph, threshold: f64) -> Result<RecognitionVerdict> {
    check_threshold(threshold)?;
    if candidates.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(verdict(argmax(&candidate_f1s(candidates, target)), threshold))
}

fn verdict(best: Option<(usize, f64)>, threshold: f64) -> RecognitionVerdict {
    match best {
        Some((i, f)) => RecognitionVerdict { is_valid: f >= threshold, best_f1: f, best_index: Some(i) },
        None => RecognitionVerdict { is_valid: false, best_f1: 0.0, best_index: None },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecognitionCase {
    pub candidates: Vec<Polygon>,
    pub target: VisGraph,
    /// True when the target is a realizable visibility graph.
    pub label: bool,
}

/// Evenly spaced thresholds `from + (to - from) * i / steps`, `i = 0..=steps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdGrid {
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl Default for ThresholdGrid {
    fn default() -> Self {
        ThresholdGrid { from: 0.5, to: 1.0, steps: 50 }
    }
}

impl ThresholdGrid {
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 0 {
            return vec![self.from];
        }
        (0..=self.steps)
            .map(|i| self.from + (self.to - self.from) * i as f64 / self.steps as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub threshold: f64,
    pub accuracy: f64,
}

/// Accuracy of the recognition rule at each grid threshold.
pub fn threshold_sweep(cases: &[RecognitionCase], grid: &ThresholdGrid) -> Result<Vec<SweepPoint>> {
    if cases.is_empty() {
        return Err(Error::EmptyInput);
    }
    let thresholds = grid.values();
    for &t in &thresholds {
        check_threshold(t)?;
    }
    let best: Vec<Option<(usize, f64)>> = cases
        .par_iter()
        .map(|c| argmax(&candidate_f1s(&c.candidates, &c.target)))
        .collect();
    Ok(sweep_best(&best.iter().zip(cases).map(|(b, c)| (*b, c.label)).collect::<Vec<_>>(), &thresholds))
}

fn sweep_best(best: &[(Option<(usize, f64)>, bool)], thresholds: &[f64]) -> Vec<SweepPoint> {
    thresholds
        .iter()
        .map(|&t| {
            let correct = best.iter().filter(|(b, label)| verdict(*b, t).is_valid == *label).count();
            SweepPoint { threshold: t, accuracy: correct as f64 / best.len() as f64 }
        })
        .collect()
}

/// Highest-accuracy point, lowest threshold on ties.
pub fn best_threshold(curve: &[SweepPoint]) -> Option<SweepPoint> {
    curve.iter().copied().fold(None, |b, p| match b {
        Some(q) if q.accuracy >= p.accuracy => b,
        _ => Some(p),
    })
}

/// CSV with a `threshold,accuracy` header.
pub fn sweep_csv(curve: &[SweepPoint]) -> String {
    let mut s = String::from("threshold,accuracy\n");
    for p in curve {
        s.push_str(&format!("{:.2},{}\n", p.threshold, p.accuracy));
    }
    s
}
