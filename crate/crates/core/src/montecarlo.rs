//! Finite-`N` ruin probabilities by simulation.
//!
//! With `N` businesses the aggregated surplus is `sqrt(N)` times a single
//! fBm path, so company `i` is ruined at `t` iff
//! `B_H(t) > (a_i + c_i t) sqrt(N)`. One path therefore serves every `N`,
//! which [`estimate_ruin_multi`] exploits as common random numbers.

use serde::Serialize;

use crate::asymptotics::{
    log_rate_and, pi_and_asym, pi_and_exact_h1, pi_sim_asym, AsymptoticValue, FormulaConstants, LogRateOptions,
    PaperFlags,
};
use crate::constants::piterbarg_for_crossing;
use crate::error::{Result, RuinError};
use crate::gaussian_paths::{covariance_with, FbmGenerator, Grid};
use crate::risk_model::{classify, critical_points, peak_constants, NormalizedParams, RegimeTag};
use crate::seeding::{map_blocks_init, replication_rng, DEFAULT_SEED};

/// Smallest replication count accepted by [`RuinQuery::new`].
pub const MIN_REPLICATIONS: u64 = 100;

/// Default number of grid points, `2^11 + 1`.
pub const DEFAULT_GRID_POINTS: usize = 2049;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RuinType {
    /// Both companies below their barriers at a common time.
    Simultaneous,
    /// Each company ruined at some time, not necessarily the same.
    Joint,
    /// At least one company ruined.
    AtLeastOne,
}

impl RuinType {
    pub fn name(self) -> &'static str {
        match self {
            Self::Simultaneous => "simultaneous",
            Self::Joint => "joint",
            Self::AtLeastOne => "at_least_one",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Plain,
    /// Mean shift along `Cov(B_H(.), B_H(t0))` with likelihood-ratio weights.
    Shifted,
}

impl Estimator {
    pub fn name(self) -> &'static str {
        match self {
            Self::Plain => "plain",
            Self::Shifted => "shifted",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RuinQuery {
    pub params: NormalizedParams,
    pub ruin_type: RuinType,
    pub grid: Grid,
    pub replications: u64,
    pub seed: u64,
    pub estimator: Estimator,
}

impl RuinQuery {
    pub fn new(
        params: NormalizedParams,
        ruin_type: RuinType,
        grid: Grid,
        replications: u64,
        seed: u64,
        estimator: Estimator,
    ) -> Result<Self> {
        let q = Self { params, ruin_type, grid, replications, seed, estimator };
        q.validate()?;
        Ok(q)
    }

    /// Default grid, replication count and seed; plain estimator.
    pub fn with_defaults(params: NormalizedParams, ruin_type: RuinType) -> Result<Self> {
        Self::new(
            params,
            ruin_type,
            Grid::new(params.horizon, DEFAULT_GRID_POINTS)?,
            100_000,
            DEFAULT_SEED,
            Estimator::Plain,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications < MIN_REPLICATIONS {
            return Err(RuinError::InvalidParameter(format!(
                "at least {MIN_REPLICATIONS} replications are required, got {}",
                self.replications
            )));
        }
        let (t, g) = (self.params.horizon, self.grid.horizon());
        if (t - g).abs() > 1e-12 * t {
            return Err(RuinError::InvalidParameter(format!(
                "grid horizon {g} differs from the model horizon {t}"
            )));
        }
        if !(self.params.n_businesses > 0.0 && self.params.n_businesses.is_finite()) {
            return Err(RuinError::InvalidParameter(format!(
                "number of businesses must be positive, got {}",
                self.params.n_businesses
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateCI {
    pub ruin_type: RuinType,
    pub n_businesses: f64,
    pub p_hat: f64,
    pub std_error: f64,
    pub replications: u64,
    pub hits: u64,
    pub seed: u64,
    pub estimator: Estimator,
    pub grid_n: usize,
    /// Kish effective sample size of the weighted hits (`hits` when plain).
    pub ess: f64,
    pub warning: Option<String>,
}

impl EstimateCI {
    pub fn ci95(&self) -> (f64, f64) {
        (self.p_hat - 1.96 * self.std_error, self.p_hat + 1.96 * self.std_error)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShiftSpec {
    /// Shift centre, snapped to the grid.
    pub center_time: f64,
    pub center_index: usize,
    /// `gamma`; the mean path is `gamma Cov(B_H(t), B_H(t0))`.
    pub magnitude: f64,
    /// Barrier level at `t0`, equal to the shifted mean there.
    pub barrier: f64,
    /// `Var(B_H(t0))`
    pub variance: f64,
}

impl ShiftSpec {
    pub fn vector(&self, grid: &Grid, q: &RuinQuery) -> Vec<f64> {
        covariance_with(grid, self.center_time, q.params.h)
            .into_iter()
            .map(|k| self.magnitude * k)
            .collect()
    }

    /// Likelihood ratio of a path whose unshifted value at `t0` is `z0`.
    #[inline]
    pub fn weight(&self, z0: f64) -> f64 {
        (-self.magnitude * z0 - 0.5 * self.magnitude * self.magnitude * self.variance).exp()
    }
}

/// Where the rare event most likely happens: the crossing time in the
/// interior and boundary cases, otherwise the variance peak of the binding
/// company, capped at the horizon.
pub fn default_shift(q: &RuinQuery) -> ShiftSpec {
    let p = &q.params;
    let t = p.horizon;
    let regime = classify(p);
    let cp = regime.detail;
    let sqrt_n = p.n_businesses.sqrt();
    let level = |i: usize, s: f64| {
        let (a, c) = p.company(i);
        (a + c * s) * sqrt_n
    };

    let center = if p.h.is_one() {
        t
    } else if q.ruin_type == RuinType::AtLeastOne {
        // the company whose own ruin is likelier
        let score = |i: usize| {
            let s = if i == 1 { cp.t1 } else { cp.t2 }.min(t);
            level(i, s) / s.powf(p.h.value())
        };
        if score(1) <= score(2) { cp.t1.min(t) } else { cp.t2.min(t) }
    } else {
        match regime.tag {
            RegimeTag::Degenerate | RegimeTag::SimCaseI => cp.t1.min(t),
            RegimeTag::SimCaseV | RegimeTag::BeyondHorizon => cp.t2.min(t),
            _ => cp.t_star,
        }
    };

    let j = q.grid.nearest_interior(center);
    let t0 = q.grid.point(j);
    let barrier = match q.ruin_type {
        RuinType::AtLeastOne => level(1, t0).min(level(2, t0)),
        _ => level(1, t0).max(level(2, t0)),
    };
    let variance = t0.powf(2.0 * p.h.value());
    ShiftSpec { center_time: t0, center_index: j, magnitude: barrier / variance, barrier, variance }
}

/// Which of the ruin events a path triggers.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PathHits {
    pub simultaneous: bool,
    pub company1: bool,
    pub company2: bool,
}

impl PathHits {
    pub fn joint(self) -> bool {
        self.company1 && self.company2
    }

    pub fn at_least_one(self) -> bool {
        self.company1 || self.company2
    }

    pub fn get(self, kind: RuinType) -> bool {
        match kind {
            RuinType::Simultaneous => self.simultaneous,
            RuinType::Joint => self.joint(),
            RuinType::AtLeastOne => self.at_least_one(),
        }
    }
}

/// Barrier levels `(a_i + c_i t_j) sqrt(N)` on a grid.
#[derive(Debug, Clone)]
pub struct Barriers {
    b1: Vec<f64>,
    b2: Vec<f64>,
}

impl Barriers {
    pub fn new(p: &NormalizedParams, grid: &Grid, n_businesses: f64) -> Self {
        let s = n_businesses.sqrt();
        Self {
            b1: grid.points().map(|t| (p.a1 + p.c1 * t) * s).collect(),
            b2: grid.points().map(|t| (p.a2 + p.c2 * t) * s).collect(),
        }
    }

    /// Evaluate `path + shift` (shift may be empty).
    pub fn check(&self, path: &[f64], shift: &[f64]) -> PathHits {
        let mut h = PathHits::default();
        for j in 0..path.len() {
            let x = path[j] + shift.get(j).copied().unwrap_or(0.0);
            let u1 = x > self.b1[j];
            let u2 = x > self.b2[j];
            h.company1 |= u1;
            h.company2 |= u2;
            if u1 && u2 {
                h.simultaneous = true;
                break;
            }
        }
        h
    }
}

/// Associative accumulator of weighted hits.
#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    hits: u64,
    sum_w: f64,
    sum_w2: f64,
}

impl Tally {
    fn push(&mut self, w: f64) {
        self.hits += 1;
        self.sum_w += w;
        self.sum_w2 += w * w;
    }

    fn merge(self, o: Self) -> Self {
        Self { hits: self.hits + o.hits, sum_w: self.sum_w + o.sum_w, sum_w2: self.sum_w2 + o.sum_w2 }
    }

    fn finish(self, q: &RuinQuery, n: f64, estimator: Estimator) -> EstimateCI {
        let reps = q.replications as f64;
        let mean = self.sum_w / reps;
        let var = ((self.sum_w2 - reps * mean * mean) / (reps - 1.0)).max(0.0);
        let ess = if self.sum_w2 > 0.0 { self.sum_w * self.sum_w / self.sum_w2 } else { 0.0 };
        let warning = match estimator {
            Estimator::Shifted if ess < 1.0 => {
                Some("shifted estimator has zero effective sample size; all weights negligible".to_string())
            }
            Estimator::Plain if self.hits == 0 => {
                Some("no hits; probability below simulation resolution, try the shifted estimator".to_string())
            }
            _ => None,
        };
        EstimateCI {
            ruin_type: q.ruin_type,
            n_businesses: n,
            p_hat: mean,
            std_error: (var / reps).sqrt(),
            replications: q.replications,
            hits: self.hits,
            seed: q.seed,
            estimator,
            grid_n: q.grid.len(),
            ess,
            warning,
        }
    }
}

/// Simulate `q` at its own `n_businesses`. Bit-identical for a fixed query,
/// independent of the thread count.
pub fn estimate_ruin(q: &RuinQuery) -> Result<EstimateCI> {
    let mut out = estimate_ruin_multi(q, &[q.params.n_businesses], &[q.estimator])?;
    Ok(out.remove(0).remove(0))
}

/// Simulate `q` at every `N` in `ns` and for every estimator, reusing one
/// path per replication. Result is indexed `[n][estimator]`.
pub fn estimate_ruin_multi(q: &RuinQuery, ns: &[f64], estimators: &[Estimator]) -> Result<Vec<Vec<EstimateCI>>> {
    q.validate()?;
    if let Some(bad) = ns.iter().find(|n| !(**n > 0.0 && n.is_finite())) {
        return Err(RuinError::InvalidParameter(format!("number of businesses must be positive, got {bad}")));
    }
    let gen = FbmGenerator::new(q.grid, q.params.h)?;
    let grid = q.grid;

    struct Setup {
        barriers: Barriers,
        estimator: Estimator,
        shift: Option<(ShiftSpec, Vec<f64>)>,
    }
    let mut setups = Vec::new();
    for &n in ns {
        let qn = RuinQuery { params: q.params.with_n(n), ..*q };
        for &e in estimators {
            let shift = (e == Estimator::Shifted).then(|| {
                let s = default_shift(&qn);
                (s, s.vector(&grid, &qn))
            });
            setups.push(Setup { barriers: Barriers::new(&q.params, &grid, n), estimator: e, shift });
        }
    }

    let kind = q.ruin_type;
    let blocks = map_blocks_init(
        q.replications,
        || (gen.scratch(), vec![0.0; grid.len()]),
        |(scratch, path), range| {
            let mut tallies = vec![Tally::default(); setups.len()];
            for i in range {
                let mut rng = replication_rng(q.seed, i);
                gen.fill(&mut rng, scratch, path);
                for (s, tally) in setups.iter().zip(tallies.iter_mut()) {
                    match &s.shift {
                        None => {
                            if s.barriers.check(path, &[]).get(kind) {
                                tally.push(1.0);
                            }
                        }
                        Some((spec, v)) => {
                            if s.barriers.check(path, v).get(kind) {
                                tally.push(spec.weight(path[spec.center_index]));
                            }
                        }
                    }
                }
            }
            tallies
        },
    );

    let mut total = vec![Tally::default(); setups.len()];
    for b in blocks {
        for (t, x) in total.iter_mut().zip(b) {
            *t = t.merge(x);
        }
    }
    let mut out = Vec::with_capacity(ns.len());
    let mut it = total.into_iter().zip(&setups);
    for &n in ns {
        let row = it
            .by_ref()
            .take(estimators.len())
            .map(|(t, s)| t.finish(q, n, s.estimator))
            .collect();
        out.push(row);
    }
    Ok(out)
}

/// Per-replication counts of the nested ruin events on shared paths.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct InclusionReport {
    pub replications: u64,
    pub simultaneous: u64,
    pub joint: u64,
    pub at_least_one: u64,
    pub company1: u64,
    pub company2: u64,
    /// Replications where simultaneous ⇒ joint ⇒ at-least-one fails.
    pub violations: u64,
}

impl InclusionReport {
    fn merge(self, o: Self) -> Self {
        Self {
            replications: self.replications + o.replications,
            simultaneous: self.simultaneous + o.simultaneous,
            joint: self.joint + o.joint,
            at_least_one: self.at_least_one + o.at_least_one,
            company1: self.company1 + o.company1,
            company2: self.company2 + o.company2,
            violations: self.violations + o.violations,
        }
    }
}

/// Evaluate all three ruin events on the same plain paths.
pub fn inclusion_check(q: &RuinQuery) -> Result<InclusionReport> {
    q.validate()?;
    let gen = FbmGenerator::new(q.grid, q.params.h)?;
    let barriers = Barriers::new(&q.params, &q.grid, q.params.n_businesses);
    let blocks = map_blocks_init(
        q.replications,
        || (gen.scratch(), vec![0.0; q.grid.len()]),
        |(scratch, path), range| {
            let mut r = InclusionReport::default();
            for i in range {
                let mut rng = replication_rng(q.seed, i);
                gen.fill(&mut rng, scratch, path);
                let h = barriers.check(path, &[]);
                let (s, j, o) = (h.simultaneous, h.joint(), h.at_least_one());
                r.replications += 1;
                r.simultaneous += s as u64;
                r.joint += j as u64;
                r.at_least_one += o as u64;
                r.company1 += h.company1 as u64;
                r.company2 += h.company2 as u64;
                r.violations += ((s && !j) || (j && !o)) as u64;
            }
            r
        },
    );
    Ok(blocks.into_iter().fold(InclusionReport::default(), InclusionReport::merge))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorChoice {
    /// Plain where its estimate is at least `1e-3`, shifted below.
    Auto,
    Plain,
    Shifted,
}

/// Plain estimates below this switch to the shifted estimator under
/// [`EstimatorChoice::Auto`].
pub const PLAIN_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceOptions {
    pub grid_points: usize,
    pub replications: u64,
    pub seed: u64,
    pub estimator: EstimatorChoice,
    pub constants: FormulaConstants,
    pub flags: PaperFlags,
}

impl Default for ConvergenceOptions {
    fn default() -> Self {
        Self {
            grid_points: DEFAULT_GRID_POINTS,
            replications: 100_000,
            seed: DEFAULT_SEED,
            estimator: EstimatorChoice::Auto,
            constants: FormulaConstants::default(),
            flags: PaperFlags::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: f64,
    pub mc_estimate: f64,
    pub mc_stderr: f64,
    pub estimator: Estimator,
    /// Asymptotic (or exact, at H = 1) value at this `N`, where available.
    pub asym_value: Option<f64>,
    /// `mc_estimate / asym_value`
    pub ratio: Option<f64>,
    /// `-ln(mc_estimate) / N`
    pub log_mc_over_n: f64,
    /// `-(ln mc_k - ln mc_{k-1}) / (N_k - N_{k-1})`; absent on the first row.
    pub log_slope: Option<f64>,
    /// Limiting decay rate `-lim ln(pi) / N` for comparison.
    pub log_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub ruin_type: RuinType,
    pub regime: RegimeTag,
    /// Which formula the `asym_value` column comes from.
    pub reference: Option<String>,
    /// Why no asymptotic column is available, if so.
    pub note: Option<String>,
    pub rows: Vec<ConvergenceRow>,
}

enum Reference {
    Formula(AsymptoticValue),
    Exact(crate::asymptotics::H1Exact),
    RateOnly(f64, String),
    None(String),
}

fn reference(p: &NormalizedParams, ruin_type: RuinType, opts: &ConvergenceOptions) -> Reference {
    let regime = classify(p);
    if ruin_type == RuinType::AtLeastOne {
        return Reference::None("no asymptotic result for at-least-one ruin; data only".into());
    }
    if p.h.is_one() {
        // at H = 1 simultaneous and joint ruin coincide: both need Z T above the higher barrier
        return match pi_and_exact_h1(p, opts.flags) {
            Ok(e) => Reference::Exact(e),
            Err(e) => Reference::None(e.to_string()),
        };
    }
    let mut constants = opts.constants;
    if constants.piterbarg.is_none() && regime.tag == RegimeTag::InteriorHalf {
        if let Ok(k) = peak_constants(p, &critical_points(p)) {
            constants.piterbarg = piterbarg_for_crossing(regime.detail.t_star, k.a1, k.a2).ok().map(|e| e.value);
        }
    }
    let res = match ruin_type {
        RuinType::Simultaneous => pi_sim_asym(p, &regime, &constants, opts.flags),
        _ => pi_and_asym(p, &regime, &constants, opts.flags),
    };
    match res {
        Ok(v) => Reference::Formula(v),
        Err(RuinError::OnlyLogRate(tag)) => {
            let r = log_rate_and(p, LogRateOptions::default());
            Reference::RateOnly(r.rate, format!("only the logarithmic rate is known in regime {tag}"))
        }
        Err(e) => Reference::None(e.to_string()),
    }
}

/// Monte Carlo against asymptotics over increasing `N`, with common random
/// numbers across `N`.
pub fn convergence_study(
    p: &NormalizedParams,
    ruin_type: RuinType,
    n_list: &[f64],
    opts: ConvergenceOptions,
) -> Result<ConvergenceTable> {
    if n_list.is_empty() {
        return Err(RuinError::InvalidParameter("N list is empty".into()));
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(RuinError::InvalidParameter("N list must be strictly ascending".into()));
    }
    let q = RuinQuery::new(
        *p,
        ruin_type,
        Grid::new(p.horizon, opts.grid_points)?,
        opts.replications,
        opts.seed,
        Estimator::Plain,
    )?;
    let estimators: &[Estimator] = match opts.estimator {
        EstimatorChoice::Auto => &[Estimator::Plain, Estimator::Shifted],
        EstimatorChoice::Plain => &[Estimator::Plain],
        EstimatorChoice::Shifted => &[Estimator::Shifted],
    };
    let results = estimate_ruin_multi(&q, n_list, estimators)?;

    let reference = reference(p, ruin_type, &opts);
    let (ref_name, note) = match &reference {
        Reference::Formula(v) => (Some(v.form.clone()), None),
        Reference::Exact(e) => (Some(e.as_asymptotic().form), None),
        Reference::RateOnly(_, why) => (Some("log-rate".to_string()), Some(why.clone())),
        Reference::None(why) => (None, Some(why.clone())),
    };

    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(n_list.len());
    for (&n, ests) in n_list.iter().zip(results) {
        let chosen = match opts.estimator {
            EstimatorChoice::Auto if ests[0].p_hat < PLAIN_FLOOR => ests[1].clone(),
            _ => ests[0].clone(),
        };
        let (asym_value, log_rate) = match &reference {
            Reference::Formula(v) => (Some(v.evaluate(n)), Some(v.rate)),
            Reference::Exact(e) => (Some(e.probability(n)), Some(0.5 * e.threshold * e.threshold)),
            Reference::RateOnly(r, _) => (None, Some(*r)),
            Reference::None(_) => (None, None),
        };
        let log_mc_over_n = -chosen.p_hat.ln() / n;
        let log_slope = rows.last().map(|prev| {
            -(chosen.p_hat.ln() - prev.mc_estimate.ln()) / (n - prev.n)
        });
        rows.push(ConvergenceRow {
            n,
            mc_estimate: chosen.p_hat,
            mc_stderr: chosen.std_error,
            estimator: chosen.estimator,
            asym_value,
            ratio: asym_value.map(|a| chosen.p_hat / a),
            log_mc_over_n,
            log_slope,
            log_rate,
        });
    }
    Ok(ConvergenceTable { ruin_type, regime: classify(p).tag, reference: ref_name, note, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::psi;

    fn np(a: (f64, f64), c: (f64, f64), h: f64, t: f64) -> NormalizedParams {
        NormalizedParams::new(a, c, h, t).unwrap()
    }

    fn query(p: NormalizedParams, kind: RuinType, n_points: usize, reps: u64, e: Estimator) -> RuinQuery {
        RuinQuery::new(p, kind, Grid::new(p.horizon, n_points).unwrap(), reps, 5, e).unwrap()
    }

    #[test]
    fn query_validation() {
        let p = np((1.0, 2.0), (2.0, 1.0), 0.5, 3.0);
        let g = Grid::new(3.0, 65).unwrap();
        assert!(RuinQuery::new(p, RuinType::Joint, g, 99, 1, Estimator::Plain).is_err());
        let g2 = Grid::new(2.0, 65).unwrap();
        assert!(RuinQuery::new(p, RuinType::Joint, g2, 1000, 1, Estimator::Plain).is_err());
    }

    #[test]
    fn shift_examples() {
        let g = |t: f64| Grid::new(t, 3001).unwrap();
        for n in [1.0, 4.0] {
            let p = np((1.0, 2.0), (2.0, 1.0), 0.5, 3.0).with_n(n);
            let q = RuinQuery::new(p, RuinType::Simultaneous, g(3.0), 100, 1, Estimator::Shifted).unwrap();
            let s = default_shift(&q);
            assert!((s.center_time - 1.0).abs() < 1e-12);
            assert!((s.barrier - 3.0 * n.sqrt()).abs() < 1e-9);
            assert!((s.magnitude - 3.0 * n.sqrt()).abs() < 1e-9);

            let p = np((1.0, 2.0), (1.25, 1.0), 0.5, 5.0).with_n(n);
            let q = RuinQuery::new(p, RuinType::Joint, g(5.0), 100, 1, Estimator::Shifted).unwrap();
            let s = default_shift(&q);
            assert!((s.center_time - 2.0).abs() < 1e-12);
            assert!((s.barrier - 4.0 * n.sqrt()).abs() < 1e-9);
            assert!((s.magnitude - 2.0 * n.sqrt()).abs() < 1e-9);
        }
        // degenerate: company 1 at min(t1, T)
        let p = np((2.0, 1.0), (2.0, 1.0), 0.5, 3.0);
        let q = RuinQuery::new(p, RuinType::Joint, g(3.0), 100, 1, Estimator::Shifted).unwrap();
        let s = default_shift(&q);
        assert!((s.center_time - 1.0).abs() < 1e-12);
        assert!((s.barrier - 4.0).abs() < 1e-12);
    }

    #[test]
    fn shifted_mean_touches_barrier() {
        let p = np((1.0, 2.0), (2.0, 1.0), 0.3, 3.0).with_n(2.0);
        let q = query(p, RuinType::Simultaneous, 301, 100, Estimator::Shifted);
        let s = default_shift(&q);
        let v = s.vector(&q.grid, &q);
        assert!((v[s.center_index] - s.barrier).abs() < 1e-9 * s.barrier);
    }

    #[test]
    fn reflection_probe() {
        // a = (1, 1 + eps) is degenerate after relabeling: company 1 alone
        let p = np((1.0, 1.0 + 1e-9), (1.0, 1.0 - 1e-9), 0.5, 1.0);
        let q = query(p, RuinType::Joint, 2049, 20_000, Estimator::Plain);
        let e = estimate_ruin(&q).unwrap();
        let target = psi(2.0) + (-2.0f64).exp() * 0.5;
        assert!((target - 0.090_418).abs() < 1e-6);
        assert!((e.p_hat - target).abs() < 3.0 * e.std_error + 0.004, "{e:?}");
        assert_eq!(e.p_hat, e.hits as f64 / e.replications as f64);
    }

    #[test]
    fn deterministic() {
        let p = np((1.0, 2.0), (2.0, 1.0), 0.7, 3.0);
        let q = query(p, RuinType::Joint, 129, 3000, Estimator::Shifted);
        assert_eq!(estimate_ruin(&q).unwrap(), estimate_ruin(&q).unwrap());
    }

    #[test]
    fn plain_and_shifted_agree() {
        let p = np((0.5, 1.0), (1.0, 0.5), 0.5, 3.0);
        for kind in [RuinType::Simultaneous, RuinType::Joint, RuinType::AtLeastOne] {
            let q = query(p, kind, 257, 20_000, Estimator::Plain);
            let r = estimate_ruin_multi(&q, &[1.0], &[Estimator::Plain, Estimator::Shifted]).unwrap();
            let (a, b) = (&r[0][0], &r[0][1]);
            assert!(a.p_hat >= 1e-2);
            let pooled = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
            assert!((a.p_hat - b.p_hat).abs() < 4.0 * pooled, "{kind:?}: {a:?} {b:?}");
        }
    }

    #[test]
    fn multi_matches_single() {
        let p = np((1.0, 2.0), (2.0, 1.0), 0.5, 3.0);
        let q = query(p.with_n(2.0), RuinType::Joint, 129, 2000, Estimator::Shifted);
        let single = estimate_ruin(&q).unwrap();
        let multi = estimate_ruin_multi(&q, &[1.0, 2.0], &[Estimator::Plain, Estimator::Shifted]).unwrap();
        assert_eq!(multi[1][1], single);
    }

    #[test]
    fn inclusion_chain_small() {
        let p = np((1.0, 2.0), (2.0, 1.0), 0.5, 3.0);
        let q = query(p, RuinType::Joint, 129, 20_000, Estimator::Plain);
        let r = inclusion_check(&q).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.simultaneous <= r.joint && r.joint <= r.at_least_one);
        assert!(r.at_least_one >= r.company1.max(r.company2));
        assert!(r.simultaneous > 0);
    }

    #[test]
    fn degenerate_sim_equals_joint() {
        let p = np((2.0, 1.5), (2.0, 1.0), 0.5, 3.0);
        let q = query(p, RuinType::Joint, 257, 20_000, Estimator::Plain);
        let r = inclusion_check(&q).unwrap();
        assert_eq!(r.simultaneous, r.joint);
    }

    #[test]
    fn h1_convergence_ratios() {
        let p = np((1.0, 2.0), (2.0, 1.0), 1.0, 3.0);
        let opts = ConvergenceOptions { grid_points: 65, replications: 20_000, ..Default::default() };
        let t = convergence_study(&p, RuinType::Joint, &[1.0, 4.0, 16.0], opts).unwrap();
        for r in &t.rows {
            let ratio = r.ratio.unwrap();
            assert!((ratio - 1.0).abs() < 3.0 * r.mc_stderr / r.asym_value.unwrap(), "{r:?}");
        }
    }

    #[test]
    fn study_rejects_unsorted() {
        let p = np((1.0, 2.0), (2.0, 1.0), 0.5, 3.0);
        assert!(convergence_study(&p, RuinType::Joint, &[2.0, 1.0], ConvergenceOptions::default()).is_err());
    }

    #[test]
    fn or_is_data_only() {
        let p = np((1.0, 2.0), (2.0, 1.0), 0.5, 3.0);
        let opts = ConvergenceOptions { grid_points: 65, replications: 1000, ..Default::default() };
        let t = convergence_study(&p, RuinType::AtLeastOne, &[1.0], opts).unwrap();
        assert!(t.reference.is_none() && t.rows[0].asym_value.is_none());
    }
}
