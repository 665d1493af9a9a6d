//! Dataset pipeline: raw generation, link-diameter rebalancing,
//! graph-preserving augmentation, test splits and JSONL persistence.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{point_in_polygon, Point, PointLocation, Polygon};
use crate::polygen::{
    augment, generate_family, random_simple_polygon_with, rng_from_seed, rotate_augment, AugmentConfig, Family,
    FamilyConfig, GenRng,
};
use crate::sdf::{polygon_sdf, write_sdf, SdfSidecar};
use crate::triangulate::{cdt, Triangulation};
use crate::visibility::{
    graph_density, link_diameter, visibility_graph, visibility_graph_with_hole, HolePolygon, VisGraph,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    TestIn,
    TestOut,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub id: String,
    pub n: usize,
    pub polygon: Polygon,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hole: Option<Polygon>,
    pub vis_graph: VisGraph,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tri_graph: Option<Triangulation>,
    /// `None` when the graph is disconnected.
    pub link_diameter: Option<usize>,
    pub density: f64,
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent_id: Option<String>,
    pub split: Split,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sdf_path: Option<String>,
}

impl DatasetRecord {
    /// Computes graphs and statistics for a simple polygon.
    pub fn from_polygon(id: impl Into<String>, polygon: Polygon, family: Family, split: Split) -> Result<Self> {
        let vis_graph = visibility_graph(&polygon)?;
        let tri_graph = Some(cdt(&polygon)?);
        Ok(DatasetRecord {
            id: id.into(),
            n: polygon.len(),
            link_diameter: link_diameter(&vis_graph),
            density: graph_density(&vis_graph),
            polygon,
            hole: None,
            vis_graph,
            tri_graph,
            family,
            parent_id: None,
            split,
            sdf_path: None,
        })
    }

    /// Record whose graph is the hole-blocked graph of `hp`.
    pub fn from_hole(id: impl Into<String>, hp: &HolePolygon, split: Split) -> Result<Self> {
        let vis_graph = visibility_graph_with_hole(hp)?;
        Ok(DatasetRecord {
            id: id.into(),
            n: hp.outer().len(),
            link_diameter: link_diameter(&vis_graph),
            density: graph_density(&vis_graph),
            polygon: hp.outer().clone(),
            hole: Some(hp.hole().clone()),
            vis_graph,
            tri_graph: None,
            family: Family::HoleInvalid,
            parent_id: None,
            split,
            sdf_path: None,
        })
    }

    /// Recomputes every stored derived field from the stored geometry.
    pub fn verify(&self) -> Result<()> {
        let mismatch = |what: &str| Err(Error::Format(format!("record {}: stored {what} does not recompute", self.id)));
        if self.n != self.polygon.len() {
            return mismatch("n");
        }
        let g = match &self.hole {
            Some(h) => visibility_graph_with_hole(&HolePolygon::new(self.polygon.clone(), h.clone())?)?,
            None => visibility_graph(&self.polygon)?,
        };
        if g != self.vis_graph {
            return mismatch("vis_graph");
        }
        if link_diameter(&g) != self.link_diameter {
            return mismatch("link_diameter");
        }
        if graph_density(&g) != self.density {
            return mismatch("density");
        }
        if let Some(t) = &self.tri_graph {
            if *t != cdt(&self.polygon)? {
                return mismatch("tri_graph");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    /// Vertices per polygon.
    pub n: usize,
    pub n_raw: usize,
    pub n_rebalanced: usize,
    /// In-distribution test polygons held out per link diameter.
    pub reserve_per_diameter: usize,
    /// Fail with `InsufficientPool` instead of shrinking the reserve of a
    /// small bucket to half its size.
    pub strict_reserve: bool,
    /// Buckets are dropped, smallest first, until the rebalanced histogram's
    /// max/min ratio is at most this. `None` keeps every bucket.
    pub max_bucket_ratio: Option<f64>,
    /// Out-of-distribution polygons per typed family.
    pub typed_per_family: usize,
    /// Invalid (hole) and valid recognition targets, each.
    pub recognition_per_label: usize,
    /// Rotated copies per base polygon for the triangulation track.
    pub rotation_copies: usize,
    pub max_2opt_iters: usize,
    pub seed: u64,
    pub augment: AugmentConfig,
    pub family: FamilyConfig,
    /// Write a binary SDF per base training record.
    pub sdf: bool,
    pub sdf_res: usize,
    pub sdf_margin: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            n: 25,
            n_raw: 60_000,
            n_rebalanced: 18_500,
            reserve_per_diameter: 100,
            strict_reserve: false,
            max_bucket_ratio: Some(2.0),
            typed_per_family: 100,
            recognition_per_label: 25,
            rotation_copies: 0,
            max_2opt_iters: 10_000,
            seed: 0,
            augment: AugmentConfig::default(),
            family: FamilyConfig::default(),
            sdf: false,
            sdf_res: 40,
            sdf_margin: 0.05,
        }
    }
}

impl PipelineConfig {
    /// One tenth of the default scale.
    pub fn desk() -> Self {
        PipelineConfig {
            n_raw: 6_000,
            n_rebalanced: 1_850,
            reserve_per_diameter: 10,
            typed_per_family: 20,
            ..PipelineConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 5 {
            return Err(Error::InvalidConfig(format!("n = {} < 5", self.n)));
        }
        if self.n_raw == 0 {
            return Err(Error::InvalidConfig("n_raw must be >= 1".into()));
        }
        if self.n_rebalanced > self.n_raw {
            return Err(Error::InvalidConfig(format!(
                "n_rebalanced {} exceeds n_raw {}",
                self.n_rebalanced, self.n_raw
            )));
        }
        if self.max_2opt_iters < self.n * self.n {
            return Err(Error::InvalidConfig("max_2opt_iters < n^2".into()));
        }
        if let Some(r) = self.max_bucket_ratio {
            if r.is_nan() || r < 1.0 {
                return Err(Error::InvalidConfig(format!("max_bucket_ratio {r} < 1")));
            }
        }
        self.augment.validate()
    }
}

/// Independent stream for `(stage, index)` under `base`. Streams of one
/// stage are `base + index` offsets of a stage-specific key.
pub fn stage_rng(base: u64, stage: Stage, index: u64) -> GenRng {
    rng_from_seed((base ^ ((stage as u64) << 56)).wrapping_add(index))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Stage {
    Raw = 1,
    Reserve = 2,
    Rebalance = 3,
    Augment = 4,
    Rotate = 5,
    Typed = 6,
    Hole = 7,
    Valid = 8,
}

fn random_record(cfg: &PipelineConfig, stage: Stage, index: usize, id: String, split: Split) -> Result<DatasetRecord> {
    let mut rng = stage_rng(cfg.seed, stage, index as u64);
    let mut last = Error::EmptyInput;
    for _ in 0..4 {
        match random_simple_polygon_with(cfg.n, cfg.max_2opt_iters, &mut rng)
            .and_then(|p| DatasetRecord::from_polygon(id.clone(), p, Family::Random, split))
        {
            Ok(r) => return Ok(r),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// `n_raw` random polygons, record `i` drawn from its own seed stream.
pub fn build_raw(cfg: &PipelineConfig) -> Result<Vec<DatasetRecord>> {
    (0..cfg.n_raw)
        .into_par_iter()
        .map(|i| random_record(cfg, Stage::Raw, i, format!("raw-{i:06}"), Split::Train))
        .collect()
}

/// Link-diameter histogram; disconnected graphs are not counted.
pub fn diameter_histogram<'a>(records: impl IntoIterator<Item = &'a DatasetRecord>) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for r in records {
        if let Some(d) = r.link_diameter {
            *h.entry(d).or_insert(0) += 1;
        }
    }
    h
}

/// max / min over nonempty buckets.
pub fn bucket_ratio(h: &BTreeMap<usize, usize>) -> f64 {
    let max = h.values().copied().filter(|&c| c > 0).max().unwrap_or(0);
    let min = h.values().copied().filter(|&c| c > 0).min().unwrap_or(0);
    if min == 0 { f64::INFINITY } else { max as f64 / min as f64 }
}

/// Per-bucket counts: every bucket gets `min(size, ceil(target / buckets))`,
/// then the shortfall goes one at a time, round robin, to the buckets with
/// the most unused records. Overshoot from the ceiling is trimmed from the
/// largest allocations.
pub fn allocate(sizes: &BTreeMap<usize, usize>, target: usize) -> BTreeMap<usize, usize> {
    let live: Vec<usize> = sizes.iter().filter(|(_, &s)| s > 0).map(|(&d, _)| d).collect();
    let mut alloc: BTreeMap<usize, usize> = BTreeMap::new();
    if live.is_empty() {
        return alloc;
    }
    let cap = target.div_ceil(live.len());
    for &d in &live {
        alloc.insert(d, sizes[&d].min(cap));
    }
    let mut total: usize = alloc.values().sum();
    while total < target {
        let mut order: Vec<usize> = live.iter().copied().filter(|d| alloc[d] < sizes[d]).collect();
        if order.is_empty() {
            break;
        }
        order.sort_by_key(|d| (std::cmp::Reverse(sizes[d] - alloc[d]), *d));
        for d in order {
            if total == target {
                break;
            }
            *alloc.get_mut(&d).unwrap() += 1;
            total += 1;
        }
    }
    while total > target {
        let mut order = live.clone();
        order.sort_by_key(|d| (std::cmp::Reverse(alloc[d]), std::cmp::Reverse(*d)));
        for d in order {
            if total == target {
                break;
            }
            *alloc.get_mut(&d).unwrap() -= 1;
            total -= 1;
        }
    }
    alloc
}

/// [`allocate`], dropping the smallest bucket while the resulting
/// histogram's max/min ratio exceeds `max_ratio`.
pub fn allocate_with_ratio(
    sizes: &BTreeMap<usize, usize>,
    target: usize,
    max_ratio: Option<f64>,
) -> (BTreeMap<usize, usize>, Vec<usize>) {
    let mut kept: BTreeMap<usize, usize> = sizes.iter().filter(|(_, &s)| s > 0).map(|(&d, &s)| (d, s)).collect();
    let mut dropped = Vec::new();
    loop {
        let alloc = allocate(&kept, target);
        let Some(limit) = max_ratio else { return (alloc, dropped) };
        if kept.len() <= 1 || bucket_ratio(&alloc) <= limit {
            return (alloc, dropped);
        }
        let (&d, _) = kept.iter().min_by_key(|(&d, &s)| (s, std::cmp::Reverse(d))).unwrap();
        kept.remove(&d);
        dropped.push(d);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RebalanceReport {
    pub input: BTreeMap<usize, usize>,
    pub output: BTreeMap<usize, usize>,
    pub dropped_buckets: Vec<usize>,
    /// Records whose graph is disconnected (never selected).
    pub disconnected: usize,
}

/// Downsamples toward equal counts per link diameter. Records inside a
/// bucket are chosen by a seeded shuffle; output keeps input order.
pub fn rebalance_by_diameter(
    records: Vec<DatasetRecord>,
    target_total: usize,
    max_ratio: Option<f64>,
    rng: &mut impl Rng,
) -> (Vec<DatasetRecord>, RebalanceReport) {
    let input = diameter_histogram(&records);
    let (alloc, dropped_buckets) = allocate_with_ratio(&input, target_total, max_ratio);
    let mut by_bucket: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut disconnected = 0;
    for (i, r) in records.iter().enumerate() {
        match r.link_diameter {
            Some(d) => by_bucket.entry(d).or_default().push(i),
            None => disconnected += 1,
        }
    }
    let mut keep = vec![false; records.len()];
    for (d, mut idx) in by_bucket {
        idx.shuffle(rng);
        for &i in idx.iter().take(alloc.get(&d).copied().unwrap_or(0)) {
            keep[i] = true;
        }
    }
    let out: Vec<DatasetRecord> = records.into_iter().zip(keep).filter(|(_, k)| *k).map(|(r, _)| r).collect();
    let output = diameter_histogram(&out);
    (
        out,
        RebalanceReport {
            input,
            output,
            dropped_buckets,
            disconnected,
        },
    )
}

/// Splits a per-diameter reserve off the pool. Returns `(reserve, rest)`.
pub fn take_reserve(
    records: Vec<DatasetRecord>,
    per_diameter: usize,
    strict: bool,
    rng: &mut impl Rng,
) -> Result<(Vec<DatasetRecord>, Vec<DatasetRecord>)> {
    let mut by_bucket: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        if let Some(d) = r.link_diameter {
            by_bucket.entry(d).or_default().push(i);
        }
    }
    let mut reserved = vec![false; records.len()];
    for (d, mut idx) in by_bucket {
        let take = if idx.len() >= per_diameter {
            per_diameter
        } else if strict {
            return Err(Error::InsufficientPool {
                diameter: d,
                available: idx.len(),
                needed: per_diameter,
            });
        } else {
            idx.len() / 2
        };
        idx.shuffle(rng);
        for &i in &idx[..take] {
            reserved[i] = true;
        }
    }
    let (mut res, mut rest) = (Vec::new(), Vec::new());
    for (r, flag) in records.into_iter().zip(reserved) {
        if flag {
            res.push(DatasetRecord { split: Split::TestIn, ..r });
        } else {
            rest.push(r);
        }
    }
    Ok((res, rest))
}

/// Outcome of augmenting one base record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentFailure {
    pub id: String,
    pub error: String,
}

fn child(parent: &DatasetRecord, id: String, polygon: Polygon, tri_graph: Option<Triangulation>) -> DatasetRecord {
    DatasetRecord {
        id,
        n: polygon.len(),
        polygon,
        hole: None,
        vis_graph: parent.vis_graph.clone(),
        tri_graph,
        link_diameter: parent.link_diameter,
        density: parent.density,
        family: parent.family,
        parent_id: Some(parent.id.clone()),
        split: parent.split,
        sdf_path: None,
    }
}

/// `cfg.copies` graph-identical children per base record. A base whose
/// copies cannot all be found contributes nothing and is reported.
pub fn expand_augment(
    base: &[DatasetRecord],
    cfg: &AugmentConfig,
    seed: u64,
) -> Result<(Vec<DatasetRecord>, Vec<AugmentFailure>)> {
    cfg.validate()?;
    let per: Vec<std::result::Result<Vec<DatasetRecord>, AugmentFailure>> = base
        .par_iter()
        .enumerate()
        .map(|(i, r)| {
            let mut rng = stage_rng(seed, Stage::Augment, i as u64);
            let copies = augment(&r.polygon, cfg, &mut rng).map_err(|e| AugmentFailure {
                id: r.id.clone(),
                error: e.to_string(),
            })?;
            copies
                .into_iter()
                .enumerate()
                .map(|(k, p)| {
                    let tri = cdt(&p).map_err(|e| AugmentFailure { id: r.id.clone(), error: e.to_string() })?;
                    Ok(child(r, format!("{}-a{k:02}", r.id), p, Some(tri)))
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut failures = Vec::new();
    for p in per {
        match p {
            Ok(c) => out.extend(c),
            Err(f) => failures.push(f),
        }
    }
    Ok((out, failures))
}

/// Rotated children for the triangulation track; each shares its parent's
/// visibility graph and constrained Delaunay diagonals.
pub fn expand_rotations(base: &[DatasetRecord], copies: usize, seed: u64) -> Result<Vec<DatasetRecord>> {
    let per: Vec<Vec<DatasetRecord>> = base
        .par_iter()
        .enumerate()
        .map(|(i, r)| {
            let mut rng = stage_rng(seed, Stage::Rotate, i as u64);
            (0..copies)
                .map(|k| {
                    let angle = rng.random_range(0.0..std::f64::consts::TAU);
                    let p = rotate_augment(&r.polygon, angle);
                    let tri = cdt(&p)?;
                    Ok(child(r, format!("{}-r{k:02}", r.id), p, Some(tri)))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(per.into_iter().flatten().collect())
}

/// Out-of-distribution records: `per_family` of each typed family.
pub fn build_typed(cfg: &PipelineConfig) -> Result<Vec<DatasetRecord>> {
    let jobs: Vec<(usize, Family, usize)> = Family::TYPED
        .iter()
        .enumerate()
        .flat_map(|(f, &fam)| (0..cfg.typed_per_family).map(move |k| (f, fam, k)))
        .collect();
    jobs.par_iter()
        .map(|&(f, fam, k)| {
            let mut rng = stage_rng(cfg.seed, Stage::Typed, (f * 1_000_000 + k) as u64);
            let p = generate_family(fam, cfg.n, &cfg.family, &mut rng)?;
            DatasetRecord::from_polygon(format!("{}-{k:04}", fam.name()), p, fam, Split::TestOut)
        })
        .collect()
}

/// Random simple outer polygon with a small triangular hole strictly
/// inside that blocks at least one sightline of the outer polygon.
pub fn hole_polygon(n: usize, max_2opt_iters: usize, rng: &mut impl Rng) -> Result<HolePolygon> {
    const TRIES: usize = 200;
    for _ in 0..TRIES {
        let outer = random_simple_polygon_with(n, max_2opt_iters, rng)?;
        let free = visibility_graph(&outer)?;
        let (lo, hi) = outer.bounding_box();
        for _ in 0..50 {
            let c = Point::new(rng.random_range(lo.x..hi.x), rng.random_range(lo.y..hi.y));
            if point_in_polygon(c, &outer) != PointLocation::Inside {
                continue;
            }
            let r = 0.5 * outer.boundary_distance(c);
            if r < 1e-3 {
                continue;
            }
            let phase = rng.random_range(0.0..std::f64::consts::TAU);
            // clockwise triangle
            let hole: Vec<Point> = (0..3)
                .map(|k| {
                    let t = phase - k as f64 * std::f64::consts::TAU / 3.0;
                    c + Point::new(t.cos(), t.sin()) * r
                })
                .collect();
            let Ok(hole) = Polygon::new(hole) else { continue };
            let Ok(hp) = HolePolygon::new(outer.clone(), hole) else { continue };
            if visibility_graph_with_hole(&hp)?.edge_count() < free.edge_count() {
                return Ok(hp);
            }
        }
    }
    Err(Error::ClassConstructionFailed("hole", TRIES))
}

/// `per_label` hole-blocked (invalid) and `per_label` fresh random (valid)
/// recognition targets.
pub fn build_recognition(cfg: &PipelineConfig) -> Result<Vec<DatasetRecord>> {
    let invalid: Vec<DatasetRecord> = (0..cfg.recognition_per_label)
        .into_par_iter()
        .map(|k| {
            let mut rng = stage_rng(cfg.seed, Stage::Hole, k as u64);
            let hp = hole_polygon(cfg.n, cfg.max_2opt_iters, &mut rng)?;
            DatasetRecord::from_hole(format!("hole-{k:04}"), &hp, Split::TestOut)
        })
        .collect::<Result<_>>()?;
    let valid: Vec<DatasetRecord> = (0..cfg.recognition_per_label)
        .into_par_iter()
        .map(|k| random_record(cfg, Stage::Valid, k, format!("valid-{k:04}"), Split::TestOut))
        .collect::<Result<_>>()?;
    Ok(invalid.into_iter().chain(valid).collect())
}

/// In-distribution reserve, out-of-distribution typed set and recognition
/// set, built from a raw pool.
pub fn build_test_sets(
    cfg: &PipelineConfig,
    raw: Vec<DatasetRecord>,
) -> Result<TestSets> {
    let mut rng = stage_rng(cfg.seed, Stage::Reserve, 0);
    let (test_in, rest) = take_reserve(raw, cfg.reserve_per_diameter, cfg.strict_reserve, &mut rng)?;
    Ok(TestSets {
        test_in,
        test_out: build_typed(cfg)?,
        recognition: build_recognition(cfg)?,
        remaining: rest,
    })
}

pub struct TestSets {
    pub test_in: Vec<DatasetRecord>,
    pub test_out: Vec<DatasetRecord>,
    /// Hole-invalid and valid targets.
    pub recognition: Vec<DatasetRecord>,
    /// Raw pool minus the reserve, available for training.
    pub remaining: Vec<DatasetRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyStats {
    pub count: usize,
    pub mean_density: f64,
    pub diameters: BTreeMap<usize, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineSummary {
    pub config: PipelineConfig,
    pub raw: usize,
    pub train_base: usize,
    pub train: usize,
    pub train_rotated: usize,
    pub test_in: usize,
    pub test_out: usize,
    pub recognition: usize,
    pub rebalance: RebalanceReport,
    pub bucket_ratio: f64,
    pub test_in_diameters: BTreeMap<usize, usize>,
    pub families: BTreeMap<String, FamilyStats>,
    pub augment_failures: Vec<AugmentFailure>,
}

pub struct PipelineOutput {
    pub train_base: Vec<DatasetRecord>,
    pub train: Vec<DatasetRecord>,
    pub train_rotated: Vec<DatasetRecord>,
    pub test_in: Vec<DatasetRecord>,
    pub test_out: Vec<DatasetRecord>,
    pub recognition: Vec<DatasetRecord>,
    pub summary: PipelineSummary,
}

fn family_stats<'a>(records: impl IntoIterator<Item = &'a DatasetRecord>) -> BTreeMap<String, FamilyStats> {
    let mut groups: BTreeMap<String, Vec<&DatasetRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(r.family.name().to_string()).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|(k, rs)| {
            let stats = FamilyStats {
                count: rs.len(),
                mean_density: rs.iter().map(|r| r.density).sum::<f64>() / rs.len() as f64,
                diameters: diameter_histogram(rs.iter().copied()),
            };
            (k, stats)
        })
        .collect()
}

/// Full in-memory build.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutput> {
    cfg.validate()?;
    let raw = build_raw(cfg)?;
    let n_raw = raw.len();
    let sets = build_test_sets(cfg, raw)?;
    let mut rng = stage_rng(cfg.seed, Stage::Rebalance, 0);
    let (train_base, rebalance) =
        rebalance_by_diameter(sets.remaining, cfg.n_rebalanced, cfg.max_bucket_ratio, &mut rng);
    let (train, augment_failures) = expand_augment(&train_base, &cfg.augment, cfg.seed)?;
    let train_rotated = if cfg.rotation_copies > 0 {
        expand_rotations(&train_base, cfg.rotation_copies, cfg.seed)?
    } else {
        Vec::new()
    };
    let summary = PipelineSummary {
        config: cfg.clone(),
        raw: n_raw,
        train_base: train_base.len(),
        train: train.len(),
        train_rotated: train_rotated.len(),
        test_in: sets.test_in.len(),
        test_out: sets.test_out.len(),
        recognition: sets.recognition.len(),
        bucket_ratio: bucket_ratio(&rebalance.output),
        rebalance,
        test_in_diameters: diameter_histogram(&sets.test_in),
        families: family_stats(train_base.iter().chain(&sets.test_out).chain(&sets.recognition)),
        augment_failures,
    };
    Ok(PipelineOutput {
        train_base,
        train,
        train_rotated,
        test_in: sets.test_in,
        test_out: sets.test_out,
        recognition: sets.recognition,
        summary,
    })
}

pub fn write_jsonl(path: &Path, records: &[DatasetRecord]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_jsonl(path: &Path) -> Result<Vec<DatasetRecord>> {
    let r = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (k, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::Format(format!("{}:{}: {e}", path.display(), k + 1)))?);
    }
    Ok(out)
}

pub const OUTPUT_FILES: [&str; 5] = ["train_base.jsonl", "train.jsonl", "test_in.jsonl", "test_out.jsonl", "recognition.jsonl"];

/// Writes every split as JSONL plus `summary.json` (and optional SDF files
/// under `sdf/`). Returns the written paths.
pub fn write_pipeline(out: &mut PipelineOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let cfg = out.summary.config.clone();
    if cfg.sdf {
        let sdf_dir = dir.join("sdf");
        fs::create_dir_all(&sdf_dir)?;
        for r in &mut out.train_base {
            let grid = polygon_sdf(&r.polygon, cfg.sdf_res, cfg.sdf_margin)?;
            let rel = format!("sdf/{}.sdf", r.id);
            write_sdf(&grid, BufWriter::new(File::create(dir.join(&rel))?))?;
            let side = serde_json::to_string(&SdfSidecar::for_grid(&grid, cfg.sdf_margin))?;
            fs::write(dir.join(format!("sdf/{}.json", r.id)), side + "\n")?;
            r.sdf_path = Some(rel);
        }
    }
    let mut written = Vec::new();
    let sets: [(&str, &[DatasetRecord]); 5] = [
        (OUTPUT_FILES[0], &out.train_base),
        (OUTPUT_FILES[1], &out.train),
        (OUTPUT_FILES[2], &out.test_in),
        (OUTPUT_FILES[3], &out.test_out),
        (OUTPUT_FILES[4], &out.recognition),
    ];
    for (name, recs) in sets {
        let p = dir.join(name);
        write_jsonl(&p, recs)?;
        written.push(p);
    }
    if !out.train_rotated.is_empty() {
        let p = dir.join("train_rotated.jsonl");
        write_jsonl(&p, &out.train_rotated)?;
        written.push(p);
    }
    let p = dir.join("summary.json");
    fs::write(&p, serde_json::to_string_pretty(&out.summary)? + "\n")?;
    written.push(p);
    Ok(written)
}
