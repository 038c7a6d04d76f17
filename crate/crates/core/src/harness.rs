//! Experiment engine: solving random systems by continuation, screening start
//! systems by condition number or by average step count, and the one-root
//! comparison of good, total-degree and random initial pairs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homotopy::{
    track_certified, track_heuristic, CertifiedOptions, GeodesicHomotopy, HeuristicSettings,
    TrackResult,
};
use crate::oracle::DEDUP_DISTANCE;
use crate::poly::{DegreeVector, PolySystem, C64};
use crate::projective::{condition_mu, newton_refine, riemann_distance, ProjectivePoint};
use crate::rng::{domain, stream};
use crate::start::{
    fekete_quartic, good_initial_pair, optimize_r, random_initial_pair, sample_sphere,
    total_degree, InitialPair,
};

/// Newton steps applied to every endpoint returned by [`RootSolver`].
pub const ENDPOINT_REFINEMENT: usize = 3;

/// Failed-target fraction from which an estimate is flagged.
pub const FAILURE_FLAG_FRACTION: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrackerKind {
    Certified,
    Heuristic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrackerChoice {
    Certified,
    Heuristic,
    Both,
}

impl TrackerChoice {
    pub fn kinds(self) -> &'static [TrackerKind] {
        match self {
            TrackerChoice::Certified => &[TrackerKind::Certified],
            TrackerChoice::Heuristic => &[TrackerKind::Heuristic],
            TrackerChoice::Both => &[TrackerKind::Certified, TrackerKind::Heuristic],
        }
    }

    /// The tracker used when only one can be run.
    pub fn primary(self) -> TrackerKind {
        match self {
            TrackerChoice::Heuristic => TrackerKind::Heuristic,
            _ => TrackerKind::Certified,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    ByCondition,
    ByAvgSteps,
    OneRoot,
}

/// Constructed systems reported next to the searched ones.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructedFlags {
    pub total_r1: bool,
    pub total_rstar: bool,
    pub good_pair: bool,
    pub fekete: bool,
    pub random_pair: bool,
}

impl ConstructedFlags {
    pub fn defaults_for(mode: SearchMode, degrees: &DegreeVector) -> Self {
        let quartic = degrees.as_slice() == [4];
        match mode {
            SearchMode::OneRoot => ConstructedFlags {
                total_r1: true,
                good_pair: true,
                random_pair: true,
                ..Default::default()
            },
            _ => ConstructedFlags {
                total_r1: true,
                total_rstar: degrees.len() > 1,
                fekete: quartic,
                ..Default::default()
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub degrees: DegreeVector,
    pub num_candidates: usize,
    pub keep: usize,
    pub num_targets: usize,
    pub pilot_targets: usize,
    pub mode: SearchMode,
    pub tracker: TrackerChoice,
    pub seed: u64,
    pub include: ConstructedFlags,
}

impl ExperimentConfig {
    /// Desk-scale defaults.
    pub fn new(degrees: DegreeVector, mode: SearchMode, seed: u64) -> Self {
        let include = ConstructedFlags::defaults_for(mode, &degrees);
        ExperimentConfig {
            degrees,
            num_candidates: 2000,
            keep: 5,
            num_targets: 500,
            pilot_targets: 50,
            mode,
            tracker: TrackerChoice::Certified,
            seed,
            include,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.num_targets == 0 {
            return bad("num_targets must be positive");
        }
        if self.mode != SearchMode::OneRoot {
            if self.num_candidates == 0 || self.keep == 0 {
                return bad("num_candidates and keep must be positive");
            }
            if self.mode == SearchMode::ByAvgSteps && self.pilot_targets == 0 {
                return bad("pilot_targets must be positive");
            }
            if self.include.good_pair || self.include.random_pair {
                return bad("good and random pairs have a single known root; use one_root mode");
            }
        }
        if self.include.fekete && self.degrees.as_slice() != [4] {
            return bad("the Fekete system is only available for degrees (4)");
        }
        Ok(())
    }
}

/// Mean and standard error of per-target step totals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepStats {
    pub mean: f64,
    pub stderr: f64,
    pub num_targets: usize,
    /// Targets excluded because at least one of their paths failed.
    pub failed_targets: usize,
    /// Set when `failed_targets` reaches one percent of the targets.
    pub flagged: bool,
}

impl StepStats {
    fn from_samples(samples: &[f64], failed_targets: usize) -> Option<StepStats> {
        if samples.is_empty() {
            return None;
        }
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = if samples.len() > 1 {
            samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let total = samples.len() + failed_targets;
        Some(StepStats {
            mean,
            stderr: (var / n).sqrt(),
            num_targets: samples.len(),
            failed_targets,
            flagged: failed_targets as f64 >= FAILURE_FLAG_FRACTION * total as f64,
        })
    }

    /// Difference of means in units of the combined standard error.
    pub fn separation(&self, other: &StepStats) -> f64 {
        (other.mean - self.mean) / (self.stderr.powi(2) + other.stderr.powi(2)).sqrt()
    }
}

/// Result of [`estimate_avg_steps`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AvgSteps {
    pub certified: Option<StepStats>,
    pub heuristic: Option<StepStats>,
    pub num_paths_failed: usize,
    pub paths_tracked: u64,
}

impl AvgSteps {
    pub fn get(&self, kind: TrackerKind) -> Option<&StepStats> {
        match kind {
            TrackerKind::Certified => self.certified.as_ref(),
            TrackerKind::Heuristic => self.heuristic.as_ref(),
        }
    }
}

/// One column of a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateReport {
    pub system_id: String,
    /// Condition number at each root; in one-root mode, at the tracked start
    /// root only (empty for random pairs).
    pub per_root_mu: Vec<f64>,
    pub mu: Option<f64>,
    pub avg_steps_certified: Option<StepStats>,
    pub avg_steps_heuristic: Option<StepStats>,
    pub num_paths_failed: usize,
    /// Pilot mean used for ranking in average-steps mode.
    pub pilot_mean: Option<f64>,
}

impl CandidateReport {
    fn new(system_id: String, per_root_mu: Vec<f64>) -> Self {
        let mu = per_root_mu.iter().copied().reduce(f64::max);
        CandidateReport {
            system_id,
            per_root_mu,
            mu,
            avg_steps_certified: None,
            avg_steps_heuristic: None,
            num_paths_failed: 0,
            pilot_mean: None,
        }
    }

    fn with_steps(mut self, steps: AvgSteps) -> Self {
        self.avg_steps_certified = steps.certified;
        self.avg_steps_heuristic = steps.heuristic;
        self.num_paths_failed = steps.num_paths_failed;
        self
    }

    pub fn steps(&self, kind: TrackerKind) -> Option<&StepStats> {
        match kind {
            TrackerKind::Certified => self.avg_steps_certified.as_ref(),
            TrackerKind::Heuristic => self.avg_steps_heuristic.as_ref(),
        }
    }
}

/// Score of a screened candidate (condition number or pilot mean).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScreenedCandidate {
    pub index: usize,
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub format_version: u32,
    pub library_version: String,
    pub git_hash: String,
    pub config: ExperimentConfig,
    /// Kept candidates, ascending by condition number.
    pub candidates: Vec<CandidateReport>,
    pub constructed: Vec<CandidateReport>,
    /// Every successfully screened candidate, ascending by score.
    pub screened: Vec<ScreenedCandidate>,
    /// Candidates whose root set could not be computed.
    pub discarded: Vec<usize>,
    pub paths_tracked: u64,
}

impl SearchReport {
    fn new(config: &ExperimentConfig) -> Self {
        SearchReport {
            format_version: 1,
            library_version: env!("CARGO_PKG_VERSION").to_string(),
            git_hash: "unknown".to_string(),
            config: config.clone(),
            candidates: Vec::new(),
            constructed: Vec::new(),
            screened: Vec::new(),
            discarded: Vec::new(),
            paths_tracked: 0,
        }
    }

    /// Kept candidates followed by constructed systems: the report's columns.
    pub fn columns(&self) -> impl Iterator<Item = &CandidateReport> {
        self.candidates.iter().chain(&self.constructed)
    }

    pub fn column(&self, system_id: &str) -> Option<&CandidateReport> {
        self.columns().find(|c| c.system_id == system_id)
    }
}

/// Tracks one path with the chosen tracker and default settings.
pub fn track_path(
    h: &GeodesicHomotopy,
    z0: &ProjectivePoint,
    kind: TrackerKind,
) -> Result<TrackResult> {
    match kind {
        TrackerKind::Certified => track_certified(h, z0, &CertifiedOptions::without_trace()),
        TrackerKind::Heuristic => {
            track_heuristic(h, z0, &HeuristicSettings::for_arc_length(h.arc_length()))
        }
    }
}

/// Builds the homotopy from `start` to `target`, rotating the start by a
/// fixed phase when the two coincide up to sign.
fn homotopy_to(target: &PolySystem, start: &PolySystem) -> Result<GeodesicHomotopy> {
    match GeodesicHomotopy::new(target, start) {
        Err(Error::DegenerateHomotopy(_)) => {
            GeodesicHomotopy::new(target, &start.scale(C64::from_polar(1.0, 0.5)))
        }
        other => other,
    }
}

/// Finds all roots of systems of a fixed degree vector by continuation from
/// the total-degree system with optimal radius.
#[derive(Clone, Debug)]
pub struct RootSolver {
    start: InitialPair,
    tracker: TrackerKind,
}

impl RootSolver {
    pub fn new(degrees: &DegreeVector, tracker: TrackerKind) -> Self {
        let r = optimize_r(degrees).r_star;
        RootSolver {
            start: total_degree(degrees, r),
            tracker,
        }
    }

    pub fn start(&self) -> &InitialPair {
        &self.start
    }

    /// All Bezout-many roots of `f`, each refined by three Newton steps.
    pub fn solve(&self, f: &PolySystem) -> Result<Vec<ProjectivePoint>> {
        if f.degrees() != self.start.system.degrees() {
            return Err(Error::ShapeMismatch(format!(
                "solver for degrees {} given a system of degrees {}",
                self.start.system.degrees(),
                f.degrees()
            )));
        }
        let f = f.normalize_to_sphere()?;
        let h = homotopy_to(&f, &self.start.system)?;
        let endpoints = self
            .start
            .starts
            .par_iter()
            .map(|z0| {
                let res = track_path(&h, z0, self.tracker)?;
                if !res.converged() {
                    return Err(Error::TrackingFailed(format!("{:?}", res.status)));
                }
                Ok(newton_refine(&f, &res.endpoint, ENDPOINT_REFINEMENT)?
                    .last()
                    .clone())
            })
            .collect::<Result<Vec<_>>>()?;
        let mut roots: Vec<ProjectivePoint> = Vec::with_capacity(endpoints.len());
        for z in endpoints {
            if roots
                .iter()
                .all(|w| riemann_distance(w, &z) >= DEDUP_DISTANCE)
            {
                roots.push(z);
            }
        }
        let expected = self.start.starts.len();
        if roots.len() != expected {
            return Err(Error::RootCountDeficit {
                expected,
                found: roots.len(),
            });
        }
        Ok(roots)
    }
}

/// All roots of `f` by continuation from `total_degree(d, r_star)`.
pub fn solve_all(f: &PolySystem, tracker: TrackerChoice) -> Result<Vec<ProjectivePoint>> {
    RootSolver::new(f.degrees(), tracker.primary()).solve(f)
}

/// Target system number `index` of a run seeded with `seed`.
pub fn draw_target(degrees: &DegreeVector, seed: u64, index: usize) -> PolySystem {
    sample_sphere(degrees, &mut stream(seed, domain::TARGETS, index as u64))
}

/// Per-target outcome: step total per tracker (`None` if a path failed).
struct TargetSteps {
    totals: Vec<Option<u64>>,
    failed_paths: usize,
}

fn track_all_roots(pair: &InitialPair, target: &PolySystem, kinds: &[TrackerKind]) -> TargetSteps {
    let Ok(h) = homotopy_to(target, &pair.system) else {
        return TargetSteps {
            totals: vec![None; kinds.len()],
            failed_paths: pair.starts.len() * kinds.len(),
        };
    };
    let mut failed_paths = 0;
    let totals = kinds
        .iter()
        .map(|&kind| {
            let mut total = Some(0u64);
            for z0 in &pair.starts {
                match track_path(&h, z0, kind) {
                    Ok(res) if res.converged() => {
                        total = total.map(|t| t + res.num_steps as u64);
                    }
                    _ => {
                        failed_paths += 1;
                        total = None;
                    }
                }
            }
            total
        })
        .collect();
    TargetSteps {
        totals,
        failed_paths,
    }
}

fn collect_stats(outcomes: &[TargetSteps], kinds: &[TrackerKind], num_paths: u64) -> AvgSteps {
    let mut out = AvgSteps {
        certified: None,
        heuristic: None,
        num_paths_failed: outcomes.iter().map(|o| o.failed_paths).sum(),
        paths_tracked: num_paths * kinds.len() as u64,
    };
    for (k, &kind) in kinds.iter().enumerate() {
        let samples: Vec<f64> = outcomes
            .iter()
            .filter_map(|o| o.totals[k].map(|t| t as f64))
            .collect();
        let stats = StepStats::from_samples(&samples, outcomes.len() - samples.len());
        match kind {
            TrackerKind::Certified => out.certified = stats,
            TrackerKind::Heuristic => out.heuristic = stats,
        }
    }
    out
}

/// Average over `num_targets` random targets of the total number of steps
/// needed to track every start root of `pair` to the target.
///
/// Targets are drawn from the `TARGETS` stream of `seed`, so estimates for
/// different start systems under one seed share their targets.
pub fn estimate_avg_steps(
    pair: &InitialPair,
    num_targets: usize,
    tracker: TrackerChoice,
    seed: u64,
) -> Result<AvgSteps> {
    if pair.starts.is_empty() {
        return Err(Error::EmptyRoots);
    }
    let degrees = pair.system.degrees();
    let kinds = tracker.kinds();
    let outcomes: Vec<TargetSteps> = (0..num_targets)
        .into_par_iter()
        .map(|i| track_all_roots(pair, &draw_target(degrees, seed, i), kinds))
        .collect();
    Ok(collect_stats(
        &outcomes,
        kinds,
        (num_targets * pair.starts.len()) as u64,
    ))
}

fn per_root_mu(pair: &InitialPair) -> Vec<f64> {
    pair.starts
        .iter()
        .map(|z| condition_mu(&pair.system, z))
        .collect()
}

/// Constructed systems for the screening modes, with their full root sets.
fn constructed_pairs(config: &ExperimentConfig) -> Vec<(String, InitialPair)> {
    let d = &config.degrees;
    let mut out = Vec::new();
    if config.include.total_r1 {
        out.push(("total(r=1)".to_string(), total_degree(d, 1.0)));
    }
    if config.include.total_rstar {
        let r = optimize_r(d).r_star;
        out.push((format!("total(r={r:.6})"), total_degree(d, r)));
    }
    if config.include.fekete {
        out.push(("fekete".to_string(), fekete_quartic()));
    }
    out
}

fn report_constructed(config: &ExperimentConfig, report: &mut SearchReport) -> Result<()> {
    for (id, pair) in constructed_pairs(config) {
        let steps = estimate_avg_steps(&pair, config.num_targets, config.tracker, config.seed)?;
        report.paths_tracked += steps.paths_tracked;
        report
            .constructed
            .push(CandidateReport::new(id, per_root_mu(&pair)).with_steps(steps));
    }
    Ok(())
}

struct Screened {
    index: usize,
    pair: InitialPair,
    per_root_mu: Vec<f64>,
}

/// Draws candidate `index` and computes its roots and condition numbers.
fn screen_candidate(
    config: &ExperimentConfig,
    solver: &RootSolver,
    index: usize,
) -> Option<Screened> {
    let g = sample_sphere(
        &config.degrees,
        &mut stream(config.seed, domain::CANDIDATES, index as u64),
    );
    let roots = solver.solve(&g).ok()?;
    let pair = InitialPair {
        system: g,
        starts: roots,
    };
    let mus = per_root_mu(&pair);
    if mus.iter().any(|m| !m.is_finite()) {
        return None;
    }
    Some(Screened {
        index,
        pair,
        per_root_mu: mus,
    })
}

fn screen_all(config: &ExperimentConfig, report: &mut SearchReport) -> Vec<Screened> {
    let solver = RootSolver::new(&config.degrees, TrackerKind::Certified);
    let results: Vec<Option<Screened>> = (0..config.num_candidates)
        .into_par_iter()
        .map(|i| screen_candidate(config, &solver, i))
        .collect();
    report.paths_tracked += (config.num_candidates as u64) * config.degrees.bezout_number();
    let mut kept = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Some(s) => kept.push(s),
            None => report.discarded.push(i),
        }
    }
    kept
}

fn candidate_id(index: usize) -> String {
    format!("candidate-{index}")
}

fn max_mu(s: &Screened) -> f64 {
    s.per_root_mu.iter().copied().fold(0.0, f64::max)
}

/// Keeps the `keep` best-conditioned random systems and estimates their
/// average step counts next to the requested constructed systems.
pub fn screen_by_condition(config: &ExperimentConfig) -> Result<SearchReport> {
    config.validate()?;
    if config.mode != SearchMode::ByCondition {
        return Err(Error::InvalidConfig("mode must be by_condition".into()));
    }
    let mut report = SearchReport::new(config);
    let mut screened = screen_all(config, &mut report);
    screened.sort_by(|a, b| max_mu(a).total_cmp(&max_mu(b)).then(a.index.cmp(&b.index)));
    report.screened = screened
        .iter()
        .map(|s| ScreenedCandidate {
            index: s.index,
            score: max_mu(s),
        })
        .collect();
    for s in screened.iter().take(config.keep) {
        let steps = estimate_avg_steps(&s.pair, config.num_targets, config.tracker, config.seed)?;
        report.paths_tracked += steps.paths_tracked;
        report.candidates.push(
            CandidateReport::new(candidate_id(s.index), s.per_root_mu.clone()).with_steps(steps),
        );
    }
    report_constructed(config, &mut report)?;
    Ok(report)
}

/// Ranks random systems by a pilot estimate of their average step count,
/// then re-estimates the `keep` best with the full number of targets.
pub fn screen_by_avg_steps(config: &ExperimentConfig) -> Result<SearchReport> {
    config.validate()?;
    if config.mode != SearchMode::ByAvgSteps {
        return Err(Error::InvalidConfig("mode must be by_avg_steps".into()));
    }
    let kind = config.tracker.primary();
    let ranking = match kind {
        TrackerKind::Certified => TrackerChoice::Certified,
        TrackerKind::Heuristic => TrackerChoice::Heuristic,
    };
    let mut report = SearchReport::new(config);
    let screened = screen_all(config, &mut report);
    let mut piloted = Vec::with_capacity(screened.len());
    for s in screened {
        let pilot = estimate_avg_steps(&s.pair, config.pilot_targets, ranking, config.seed)?;
        report.paths_tracked += pilot.paths_tracked;
        match pilot.get(kind) {
            Some(stats) => {
                let mean = stats.mean;
                piloted.push((s, mean));
            }
            None => report.discarded.push(s.index),
        }
    }
    report.discarded.sort_unstable();
    piloted.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.index.cmp(&b.0.index)));
    report.screened = piloted
        .iter()
        .map(|(s, m)| ScreenedCandidate {
            index: s.index,
            score: *m,
        })
        .collect();
    for (s, pilot_mean) in piloted.iter().take(config.keep) {
        let steps = estimate_avg_steps(&s.pair, config.num_targets, config.tracker, config.seed)?;
        report.paths_tracked += steps.paths_tracked;
        let mut row =
            CandidateReport::new(candidate_id(s.index), s.per_root_mu.clone()).with_steps(steps);
        row.pilot_mean = Some(*pilot_mean);
        report.candidates.push(row);
    }
    report.candidates.sort_by(|a, b| {
        a.mu.unwrap_or(f64::INFINITY)
            .total_cmp(&b.mu.unwrap_or(f64::INFINITY))
    });
    report_constructed(config, &mut report)?;
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum OneRootKind {
    Good,
    TotalR1,
    TotalRStar,
    Fekete,
    Random,
}

/// Tracks one path per target from each requested kind of initial pair.
pub fn one_root_experiment(config: &ExperimentConfig) -> Result<SearchReport> {
    config.validate()?;
    if config.mode != SearchMode::OneRoot {
        return Err(Error::InvalidConfig("mode must be one_root".into()));
    }
    let d = &config.degrees;
    let mut report = SearchReport::new(config);
    let single = |pair: InitialPair| InitialPair {
        starts: pair.starts.into_iter().take(1).collect(),
        system: pair.system,
    };
    let mut rows: Vec<(String, OneRootKind, Option<InitialPair>)> = Vec::new();
    let flags = &config.include;
    if flags.good_pair {
        rows.push(("good".into(), OneRootKind::Good, Some(good_initial_pair(d))));
    }
    if flags.total_r1 {
        rows.push((
            "total(r=1)".into(),
            OneRootKind::TotalR1,
            Some(single(total_degree(d, 1.0))),
        ));
    }
    if flags.total_rstar {
        let r = optimize_r(d).r_star;
        rows.push((
            format!("total(r={r:.6})"),
            OneRootKind::TotalRStar,
            Some(single(total_degree(d, r))),
        ));
    }
    if flags.fekete {
        rows.push((
            "fekete".into(),
            OneRootKind::Fekete,
            Some(single(fekete_quartic())),
        ));
    }
    if flags.random_pair {
        rows.push(("random".into(), OneRootKind::Random, None));
    }
    let kinds = config.tracker.kinds();
    for (id, kind, pair) in rows {
        let outcomes: Vec<TargetSteps> = (0..config.num_targets)
            .into_par_iter()
            .map(|i| {
                let target = draw_target(d, config.seed, i);
                let drawn;
                let pair = match &pair {
                    Some(p) => p,
                    None => {
                        let mut rng = stream(config.seed, domain::RANDOM_PAIRS, i as u64);
                        match random_initial_pair(d, &mut rng) {
                            Ok(p) => {
                                drawn = p;
                                &drawn
                            }
                            Err(_) => {
                                return TargetSteps {
                                    totals: vec![None; kinds.len()],
                                    failed_paths: kinds.len(),
                                }
                            }
                        }
                    }
                };
                track_all_roots(pair, &target, kinds)
            })
            .collect();
        let steps = collect_stats(&outcomes, kinds, config.num_targets as u64);
        report.paths_tracked += steps.paths_tracked;
        let mus = match (&pair, kind) {
            (Some(p), _) => per_root_mu(p),
            (None, _) => Vec::new(),
        };
        report
            .constructed
            .push(CandidateReport::new(id, mus).with_steps(steps));
    }
    Ok(report)
}

/// Dispatches on `config.mode`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<SearchReport> {
    match config.mode {
        SearchMode::ByCondition => screen_by_condition(config),
        SearchMode::ByAvgSteps => screen_by_avg_steps(config),
        SearchMode::OneRoot => one_root_experiment(config),
    }
}
