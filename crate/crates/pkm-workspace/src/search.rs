//! Largest certified cube search and workspace paving.
//!
//! The search keeps a FIFO list of candidate-center boxes. A candidate box
//! survives only while it may contain the center of a certified cube with
//! half-edge one accuracy step above the current best. Boxes are discarded
//! either by finding a certified non-dextrous witness inside the region
//! common to all candidate cubes, or by classifying the inflated hull of
//! all candidate cubes as outside. Midpoints of surviving boxes are probed
//! with the doubling/backtracking growth schedule, which only ever raises
//! the best half-edge, so stale snapshots of the best value keep every
//! discard sound.

use std::time::Instant;

use rayon::prelude::*;

use crate::certify::{
    classify, in_reachable_domain, is_dextrous_point, BoxVerdict, DextrousSpec, DomainStatus,
    Verdict, DEFAULT_EXCLUSION_BUDGET,
};
use crate::interval::{Interval, IntervalBox};
use crate::kinematics::{MachineModel, Pose};

/// Default recursion depth when searching a box for a certified
/// non-dextrous witness.
pub const DEFAULT_WITNESS_DEPTH: u32 = 6;

#[derive(Debug, Clone)]
pub struct CubeSearchConfig {
    /// Accuracy threshold: the result is a multiple of `alpha` and no cube
    /// with half-edge `W + alpha` was certified anywhere examined.
    pub alpha: f64,
    pub spec: DextrousSpec,
    /// Must enclose the reachable workspace; cubes never grow past it.
    pub initial_domain: IntervalBox,
    /// Safety cap on processed candidate boxes.
    pub max_boxes: u64,
    /// Zero-exclusion bisection depth per threshold check.
    pub budget: u32,
    /// Witness-search recursion depth.
    pub witness_depth: u32,
    pub workers: usize,
}

impl CubeSearchConfig {
    pub fn new(machine: &MachineModel, spec: DextrousSpec) -> Self {
        Self {
            alpha: 1e-3,
            spec,
            initial_domain: machine.default_domain(),
            max_boxes: 10_000_000,
            budget: DEFAULT_EXCLUSION_BUDGET,
            witness_depth: DEFAULT_WITNESS_DEPTH,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Candidate boxes taken from the work list (or paving boxes classified).
    pub boxes: u64,
    pub classify_calls: u64,
    pub wall_ms: u128,
}

/// The certified cube: `[center - W, center + W]` on each axis classifies
/// `Inside`. The optimality guarantee is one-sided and resolution-limited:
/// no examined center admitted a certified cube of half-edge `W + alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct CubeResult {
    pub center: Vec<f64>,
    pub half_edge: f64,
    pub alpha: f64,
    pub stats: SearchStats,
    /// True when `max_boxes` stopped the search early.
    pub incomplete: bool,
}

impl CubeResult {
    pub fn edge(&self) -> f64 {
        2.0 * self.half_edge
    }
}

fn pose_from(center: &[f64]) -> Pose {
    Pose::new(
        center[0],
        center[1],
        center.get(2).copied().unwrap_or(0.0),
    )
}

/// Largest `k` such that the cube of half-edge `k * alpha` at `center` stays
/// within the initial domain.
fn domain_cap(center: &[f64], cfg: &CubeSearchConfig) -> u64 {
    let mut margin = f64::INFINITY;
    for (j, &c) in center.iter().enumerate() {
        let axis = cfg.initial_domain.axis(j);
        margin = margin.min(c - axis.lo()).min(axis.hi() - c);
    }
    if margin <= 0.0 {
        return 0;
    }
    (margin / cfg.alpha).floor() as u64
}

/// Fast necessary condition for a cube to certify `Inside`: sample its
/// center, corners and face centers. One non-dextrous sample proves the
/// cube contains a non-dextrous pose, so full classification (which would
/// return Outside or Undetermined) can be skipped.
fn cube_samples_dextrous(
    machine: &MachineModel,
    center: &[f64],
    half_edge: f64,
    spec: &DextrousSpec,
) -> bool {
    if !is_dextrous_point(machine, pose_from(center), spec) {
        return false;
    }
    let dim = center.len();
    let mut probe = [0.0; 3];
    probe[..dim].copy_from_slice(center);
    for j in 0..dim {
        for sgn in [-1.0, 1.0] {
            probe[..dim].copy_from_slice(center);
            probe[j] += sgn * half_edge;
            if !is_dextrous_point(machine, Pose::new(probe[0], probe[1], probe[2]), spec) {
                return false;
            }
        }
    }
    for corner in 0..(1u32 << dim) {
        for j in 0..dim {
            let sgn = if corner & (1 << j) == 0 { -1.0 } else { 1.0 };
            probe[j] = center[j] + sgn * half_edge;
        }
        if !is_dextrous_point(machine, Pose::new(probe[0], probe[1], probe[2]), spec) {
            return false;
        }
    }
    true
}

fn classify_cube_inside(
    machine: &MachineModel,
    center: &[f64],
    k: u64,
    cfg: &CubeSearchConfig,
    calls: &mut u64,
) -> bool {
    let half_edge = k as f64 * cfg.alpha;
    if !cube_samples_dextrous(machine, center, half_edge, &cfg.spec) {
        return false;
    }
    *calls += 1;
    let b = IntervalBox::cube(center, half_edge);
    classify(machine, &b, &cfg.spec, cfg.budget).code == Verdict::Inside
}

/// Grow a certified cube at `center` using the doubling schedule: step sizes
/// double while certification succeeds, then binary backtracking isolates
/// consecutive `k` (certified) and `k + 1` (not certified). `seed_good`
/// must already be certified by the caller (0 when starting from scratch).
fn grow_from(
    machine: &MachineModel,
    center: &[f64],
    cfg: &CubeSearchConfig,
    seed_good: u64,
    calls: &mut u64,
) -> u64 {
    let cap = domain_cap(center, cfg);
    if cap == 0 {
        return 0;
    }
    let mut good = if seed_good > 0 {
        seed_good.min(cap)
    } else {
        if !machine.is_reachable(pose_from(center))
            || !classify_cube_inside(machine, center, 1, cfg, calls)
        {
            return 0;
        }
        1
    };
    let mut bad = None;
    let mut step = 1u64;
    while good < cap {
        let next = good.saturating_add(step).min(cap);
        if classify_cube_inside(machine, center, next, cfg, calls) {
            good = next;
            step = step.saturating_mul(2);
        } else {
            bad = Some(next);
            break;
        }
    }
    if let Some(mut bad) = bad {
        while bad - good > 1 {
            let mid = good + (bad - good) / 2;
            if classify_cube_inside(machine, center, mid, cfg, calls) {
                good = mid;
            } else {
                bad = mid;
            }
        }
    }
    good
}

/// Half-edge `k * alpha` of the largest certified cube centered at `center`,
/// found by doubling and binary backtracking. Returns 0 when even the
/// smallest cube fails to certify (in particular for unreachable centers).
pub fn grow_cube_at(machine: &MachineModel, center: &[f64], cfg: &CubeSearchConfig) -> f64 {
    let mut calls = 0;
    grow_from(machine, center, cfg, 0, &mut calls) as f64 * cfg.alpha
}

/// Pointwise bound-violation magnitude; infinite when the pose is
/// unreachable or singular. Positive values mean the pose is certainly not
/// dextrous (up to floating error).
fn violation(machine: &MachineModel, p: Pose, spec: &DextrousSpec) -> f64 {
    match machine.transmission_factors(p) {
        Ok(tf) => (spec.sigma_min() - tf.min_sigma()).max(tf.max_sigma() - spec.sigma_max()),
        Err(_) => f64::INFINITY,
    }
}

/// Search `b` for a sub-box certified entirely non-dextrous. Sound one-way:
/// `true` proves a witness exists, `false` proves nothing.
fn exists_outside_witness(
    machine: &MachineModel,
    b: &IntervalBox,
    cfg: &CubeSearchConfig,
    depth: u32,
    calls: &mut u64,
) -> bool {
    if in_reachable_domain(machine, b) == DomainStatus::Outside {
        return true;
    }
    let mid = b.midpoint();
    if violation(machine, pose_from(&mid[..b.dim()]), &cfg.spec) > 0.0 {
        let tiny = IntervalBox::from_fn(b.dim(), |j| {
            let r = 0.5 * cfg.alpha.min(b.axis(j).width());
            Interval::new(mid[j] - r, mid[j] + r)
        });
        *calls += 1;
        if classify(machine, &tiny, &cfg.spec, cfg.budget).code == Verdict::Outside {
            return true;
        }
    }
    if depth == 0 || b.max_width() <= 0.0 {
        return false;
    }
    let Ok((left, right)) = b.bisect(b.widest_axis()) else {
        return false;
    };
    let score = |sub: &IntervalBox| {
        let m = sub.midpoint();
        violation(machine, pose_from(&m[..sub.dim()]), &cfg.spec)
    };
    let (first, second) = if score(&left) >= score(&right) {
        (left, right)
    } else {
        (right, left)
    };
    exists_outside_witness(machine, &first, cfg, depth - 1, calls)
        || exists_outside_witness(machine, &second, cfg, depth - 1, calls)
}

/// The sub-box common to every candidate cube of half-edge `h` centered in
/// `c`; `None` when the candidate cubes share no common region.
fn core_box(c: &IntervalBox, h: f64) -> Option<IntervalBox> {
    let mid = c.midpoint();
    let mut radii = [0.0; 3];
    for j in 0..c.dim() {
        radii[j] = h - 0.5 * c.axis(j).width();
        if radii[j] <= 0.0 {
            return None;
        }
    }
    Some(IntervalBox::from_fn(c.dim(), |j| {
        Interval::new(mid[j] - radii[j], mid[j] + radii[j])
    }))
}

struct Outcome {
    /// Certified half-edge multiple achieved by probing the box midpoint.
    grow: Option<(u64, Vec<f64>)>,
    children: Option<(IntervalBox, IntervalBox)>,
    calls: u64,
}

/// One step of the branch-and-bound loop for candidate box `c`, using a
/// snapshot `best_k` of the best half-edge multiple. A stale (smaller)
/// snapshot only weakens discards and probe seeds, never soundness.
fn process_candidate(
    machine: &MachineModel,
    c: &IntervalBox,
    best_k: u64,
    cfg: &CubeSearchConfig,
) -> Outcome {
    let mut calls = 0u64;
    let target = best_k + 1;
    let h = target as f64 * cfg.alpha;
    let mut out = Outcome {
        grow: None,
        children: None,
        calls: 0,
    };

    // Candidate cubes centered anywhere in `c` all lie inside the inflated
    // hull; a hull entirely outside the reachable domain discards the box.
    if in_reachable_domain(machine, &c.inflate(h)) == DomainStatus::Outside {
        return out;
    }

    // Every candidate cube contains the core; one certified non-dextrous
    // witness there rules out every center in the box.
    if let Some(core) = core_box(c, h) {
        if exists_outside_witness(machine, &core, cfg, cfg.witness_depth, &mut calls) {
            out.calls = calls;
            return out;
        }
    }

    // Probe the midpoint for an improved cube.
    let mid_full = c.midpoint();
    let mid = &mid_full[..c.dim()];
    if domain_cap(mid, cfg) >= target && classify_cube_inside(machine, mid, target, cfg, &mut calls)
    {
        let k = grow_from(machine, mid, cfg, target, &mut calls);
        out.grow = Some((k, mid.to_vec()));
    }

    if c.max_width() > cfg.alpha {
        out.children = c.bisect(c.widest_axis()).ok();
    }
    out.calls = calls;
    out
}

/// Branch-and-bound search for the largest axis-aligned cube (square in 2D)
/// certified inside the dextrous workspace, to accuracy `alpha`.
pub fn find_largest_cube(machine: &MachineModel, cfg: &CubeSearchConfig) -> CubeResult {
    assert!(cfg.alpha > 0.0, "alpha must be positive");
    assert_eq!(
        cfg.initial_domain.dim(),
        machine.search_dim(),
        "initial domain dimension does not match the machine"
    );
    let start = Instant::now();
    let mut stats = SearchStats::default();

    // Seed with the largest cube centered at the origin.
    let origin = vec![0.0; machine.search_dim()];
    let mut best_k = grow_from(machine, &origin, cfg, 0, &mut stats.classify_calls);
    let mut best_center = origin;

    let mut list = vec![cfg.initial_domain];
    let mut i = 0usize;
    let mut incomplete = false;

    let pool = (cfg.workers > 1).then(|| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .expect("failed to build worker pool")
    });

    while i < list.len() {
        if stats.boxes >= cfg.max_boxes {
            incomplete = true;
            break;
        }
        let remaining = list.len() - i;
        let batch = match &pool {
            Some(_) => remaining.min(cfg.workers * 8).min((cfg.max_boxes - stats.boxes) as usize),
            None => 1,
        };
        let snapshot = best_k;
        let outcomes: Vec<Outcome> = match &pool {
            Some(pool) => pool.install(|| {
                list[i..i + batch]
                    .par_iter()
                    .map(|c| process_candidate(machine, c, snapshot, cfg))
                    .collect()
            }),
            None => vec![process_candidate(machine, &list[i], snapshot, cfg)],
        };
        i += batch;
        stats.boxes += batch as u64;
        for out in outcomes {
            stats.classify_calls += out.calls;
            if let Some((k, center)) = out.grow {
                if k > best_k {
                    best_k = k;
                    best_center = center;
                }
            }
            if let Some((l, r)) = out.children {
                list.push(l);
                list.push(r);
            }
        }
    }

    stats.wall_ms = start.elapsed().as_millis();
    CubeResult {
        center: best_center,
        half_edge: best_k as f64 * cfg.alpha,
        alpha: cfg.alpha,
        stats,
        incomplete,
    }
}

#[derive(Debug, Clone)]
pub struct PaveConfig {
    pub spec: DextrousSpec,
    /// Undetermined boxes are bisected until narrower than this.
    pub resolution: f64,
    pub budget: u32,
    pub max_boxes: u64,
    pub workers: usize,
}

impl PaveConfig {
    pub fn new(spec: DextrousSpec, resolution: f64) -> Self {
        Self {
            spec,
            resolution,
            budget: DEFAULT_EXCLUSION_BUDGET,
            max_boxes: 10_000_000,
            workers: 1,
        }
    }
}

/// A cover of the initial domain by classified boxes: `Inside` boxes are an
/// under-approximation of the dextrous workspace, `Inside` plus
/// `Undetermined` (boundary) boxes an over-approximation.
#[derive(Debug, Clone)]
pub struct Paving {
    pub boxes: Vec<(IntervalBox, BoxVerdict)>,
    pub complete: bool,
    pub stats: SearchStats,
}

impl Paving {
    /// Total volume (area in 2D) of the certified-inside boxes.
    pub fn inside_volume(&self) -> f64 {
        self.boxes
            .iter()
            .filter(|(_, v)| v.code == Verdict::Inside)
            .map(|(b, _)| b.volume())
            .sum()
    }
}

/// Recursive bisection paving of the dextrous workspace over `domain`
/// (defaults to the machine's `[-L, L]` box).
pub fn pave_dextrous_workspace(
    machine: &MachineModel,
    cfg: &PaveConfig,
    domain: Option<IntervalBox>,
) -> Paving {
    assert!(cfg.resolution > 0.0, "resolution must be positive");
    let start = Instant::now();
    let mut stats = SearchStats::default();
    let mut out: Vec<(IntervalBox, BoxVerdict)> = Vec::new();
    let mut frontier = vec![domain.unwrap_or_else(|| machine.default_domain())];
    let mut complete = true;

    let pool = (cfg.workers > 1).then(|| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .expect("failed to build worker pool")
    });

    while !frontier.is_empty() {
        if stats.boxes + frontier.len() as u64 > cfg.max_boxes {
            // Emit what remains as boundary boxes; the cover stays valid.
            complete = false;
            for b in frontier.drain(..) {
                out.push((
                    b,
                    BoxVerdict {
                        code: Verdict::Undetermined,
                        sigma_mid: None,
                    },
                ));
            }
            break;
        }
        stats.boxes += frontier.len() as u64;
        stats.classify_calls += frontier.len() as u64;
        let classified: Vec<(IntervalBox, BoxVerdict)> = match &pool {
            Some(pool) => pool.install(|| {
                frontier
                    .par_iter()
                    .map(|b| (*b, classify(machine, b, &cfg.spec, cfg.budget)))
                    .collect()
            }),
            None => frontier
                .iter()
                .map(|b| (*b, classify(machine, b, &cfg.spec, cfg.budget)))
                .collect(),
        };
        frontier.clear();
        for (b, v) in classified {
            match v.code {
                Verdict::Inside | Verdict::Outside => out.push((b, v)),
                Verdict::Undetermined => {
                    if b.max_width() < cfg.resolution {
                        out.push((b, v));
                    } else if let Ok((l, r)) = b.bisect(b.widest_axis()) {
                        frontier.push(l);
                        frontier.push(r);
                    } else {
                        out.push((b, v));
                    }
                }
            }
        }
    }

    stats.wall_ms = start.elapsed().as_millis();
    Paving {
        boxes: out,
        complete,
        stats,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orthoglide() -> MachineModel {
        MachineModel::orthoglide(1.0).unwrap()
    }

    fn coarse_cfg(machine: &MachineModel, alpha: f64) -> CubeSearchConfig {
        let spec = DextrousSpec::from_psi_max(2.0).unwrap();
        CubeSearchConfig {
            alpha,
            ..CubeSearchConfig::new(machine, spec)
        }
    }

    #[test]
    fn grow_outside_reachable_domain_is_zero() {
        let m = orthoglide();
        let cfg = coarse_cfg(&m, 0.01);
        assert_eq!(grow_cube_at(&m, &[0.0, 0.99, 0.0], &cfg), 0.0);
        assert_eq!(grow_cube_at(&m, &[2.0, 0.0, 0.0], &cfg), 0.0);
    }

    #[test]
    fn grow_doubling_is_monotone_in_k() {
        let m = orthoglide();
        let cfg = coarse_cfg(&m, 0.01);
        let mut calls = 0;
        let k = grow_from(&m, &[0.0, 0.0, 0.0], &cfg, 0, &mut calls);
        assert!(k > 0);
        // Nested cubes: every k' <= k certifies, k + 1 does not.
        for kp in [1, k / 2, k] {
            assert!(classify_cube_inside(&m, &[0.0; 3], kp.max(1), &cfg, &mut calls));
        }
        assert!(!classify_cube_inside(&m, &[0.0; 3], k + 1, &cfg, &mut calls));
    }

    #[test]
    fn origin_cube_matches_sampling_oracle() {
        let m = orthoglide();
        let cfg = coarse_cfg(&m, 0.001);
        let w = grow_cube_at(&m, &[0.0, 0.0, 0.0], &cfg);
        // Surface-sampling oracle puts the true value near 0.2357; the
        // certified result must stay below it and well above the optimum
        // lower bound minus certification slack.
        assert!(w <= 0.2360, "origin cube too large: {w}");
        assert!(w >= 0.2300, "origin cube too small: {w}");
    }

    #[test]
    fn coarse_search_finds_published_cube_region() {
        let m = orthoglide();
        let cfg = coarse_cfg(&m, 0.02);
        let r = find_largest_cube(&m, &cfg);
        assert!(!r.incomplete);
        assert!(r.edge() > 0.56 && r.edge() < 0.66, "edge {}", r.edge());
        for c in &r.center {
            assert!((c - 0.086).abs() < 0.08, "center {:?}", r.center);
        }
        // Certified result: re-classify from scratch.
        let cube = IntervalBox::cube(&r.center, r.half_edge);
        let v = classify(&m, &cube, &cfg.spec, cfg.budget);
        assert_eq!(v.code, Verdict::Inside);
    }

    #[test]
    fn search_is_deterministic() {
        let m = orthoglide();
        let cfg = coarse_cfg(&m, 0.025);
        let a = find_largest_cube(&m, &cfg);
        let b = find_largest_cube(&m, &cfg);
        assert_eq!(a.center, b.center);
        assert_eq!(a.half_edge, b.half_edge);
        assert_eq!(a.stats.boxes, b.stats.boxes);
        assert_eq!(a.stats.classify_calls, b.stats.classify_calls);
    }

    #[test]
    fn parallel_search_agrees_with_sequential() {
        let m = orthoglide();
        let cfg = coarse_cfg(&m, 0.025);
        let seq = find_largest_cube(&m, &cfg);
        let par = find_largest_cube(
            &m,
            &CubeSearchConfig {
                workers: 3,
                ..cfg.clone()
            },
        );
        assert!((seq.half_edge - par.half_edge).abs() <= cfg.alpha + 1e-12);
        let cube = IntervalBox::cube(&par.center, par.half_edge);
        assert_eq!(classify(&m, &cube, &cfg.spec, cfg.budget).code, Verdict::Inside);
    }

    #[test]
    fn psi_max_monotonicity() {
        let m = orthoglide();
        let mut edges = Vec::new();
        for psi_max in [2.0, 1.5, 1.2] {
            let spec = DextrousSpec::from_psi_max(psi_max).unwrap();
            let cfg = CubeSearchConfig {
                alpha: 0.02,
                ..CubeSearchConfig::new(&m, spec)
            };
            edges.push(find_largest_cube(&m, &cfg).edge());
        }
        assert!(edges[0] >= edges[1] && edges[1] >= edges[2], "{edges:?}");
    }

    #[test]
    fn max_boxes_flags_incomplete() {
        let m = orthoglide();
        let cfg = CubeSearchConfig {
            max_boxes: 10,
            ..coarse_cfg(&m, 0.01)
        };
        let r = find_largest_cube(&m, &cfg);
        assert!(r.incomplete);
    }

    #[test]
    fn coarse_paving_covers_domain_and_separates_verdicts() {
        let m = orthoglide();
        let spec = DextrousSpec::from_psi_max(2.0).unwrap();
        let paving = pave_dextrous_workspace(&m, &PaveConfig::new(spec, 0.2), None);
        assert!(paving.complete);
        let total: f64 = paving.boxes.iter().map(|(b, _)| b.volume()).sum();
        assert!((total - 8.0).abs() < 1e-9, "cover volume {total}");
        assert!(paving.inside_volume() > 0.0);

        // The found cube is disjoint from every Outside box.
        let cfg = coarse_cfg(&m, 0.02);
        let r = find_largest_cube(&m, &cfg);
        let cube = IntervalBox::cube(&r.center, r.half_edge);
        for (b, v) in &paving.boxes {
            if v.code == Verdict::Outside {
                let overlaps = (0..3).all(|j| {
                    b.axis(j).lo() < cube.axis(j).hi() && cube.axis(j).lo() < b.axis(j).hi()
                });
                assert!(!overlaps, "outside box {b:?} overlaps the cube");
            }
        }
    }
}
