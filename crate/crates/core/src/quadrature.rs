//! Tensor-grid quadrature for `I(λP; f) = ∫ e^{iλP(x)} ∏ f_j(π_j x) dx`, λ sweeps and
//! power-law fits of the decay.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::degeneracy::verify_certificate;
use crate::error::{Error, Result};
use crate::linalg::{rat, rat_to_f64, ratio, Mat, Rat};
use crate::poly::{F64Poly, MultiPoly};
use crate::wire::RatStr;

/// Environment variable capping the number of quadrature worker threads.
pub const THREADS_ENV: &str = "OSCINT_THREADS";

fn pool() -> &'static rayon::ThreadPool {
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let n = std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&n| n > 0)
            .unwrap_or(0);
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .thread_name(|i| format!("oscint-quad-{i}"))
            .build()
            .expect("thread pool")
    })
}

/// Closed interval with rational endpoints, written `["lo", "hi"]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Rat,
    pub hi: Rat,
}

impl Interval {
    pub fn new(lo: Rat, hi: Rat) -> Self {
        Interval { lo, hi }
    }

    /// `[-1/2, 1/2]`
    pub fn unit() -> Self {
        Interval::new(ratio(-1, 2), ratio(1, 2))
    }

    pub fn width(&self) -> f64 {
        rat_to_f64(&(&self.hi - &self.lo))
    }
}

impl Serialize for Interval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (RatStr(self.lo.clone()), RatStr(self.hi.clone())).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (lo, hi) = <(RatStr, RatStr)>::deserialize(d)?;
        Ok(Interval::new(lo.0, hi.0))
    }
}

pub fn unit_box(dim: usize) -> Vec<Interval> {
    vec![Interval::unit(); dim]
}

fn check_box(b: &[Interval], what: &str) -> Result<()> {
    if b.is_empty() {
        return Err(Error::InvalidInput(format!("{what} has no axes")));
    }
    if let Some(bad) = b.iter().find(|i| i.lo >= i.hi) {
        return Err(Error::InvalidInput(format!(
            "{what} has an empty axis [{}, {}]",
            bad.lo, bad.hi
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BumpKind {
    SmoothBump,
    ModulatedBump,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Modulation {
    #[serde(with = "crate::wire::poly_serde")]
    pub q: MultiPoly,
    pub lambda: f64,
}

/// `f(t) = e^{−iλQ(t)} · bump(t)`, where `bump` is `∏ exp(−1/(1−s²))` in coordinates
/// `s` rescaling the box to `[−1, 1]` per axis, and zero outside.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpSpec {
    pub kind: BumpKind,
    #[serde(rename = "box")]
    pub support: Vec<Interval>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulation: Option<Modulation>,
}

impl BumpSpec {
    pub fn smooth(support: Vec<Interval>) -> Self {
        BumpSpec {
            kind: BumpKind::SmoothBump,
            support,
            modulation: None,
        }
    }

    pub fn modulated(support: Vec<Interval>, q: MultiPoly, lambda: f64) -> Self {
        BumpSpec {
            kind: BumpKind::ModulatedBump,
            support,
            modulation: Some(Modulation { q, lambda }),
        }
    }

    pub fn dim(&self) -> usize {
        self.support.len()
    }

    pub fn validate(&self) -> Result<()> {
        check_box(&self.support, "bump box")?;
        match (&self.kind, &self.modulation) {
            (BumpKind::SmoothBump, None) => Ok(()),
            (BumpKind::ModulatedBump, Some(m)) if m.q.num_vars() == self.dim() => Ok(()),
            (BumpKind::ModulatedBump, Some(m)) => Err(Error::DimensionMismatch {
                left: self.dim(),
                right: m.q.num_vars(),
            }),
            _ => Err(Error::InvalidInput(
                "modulation must be present exactly for modulated bumps".into(),
            )),
        }
    }
}

/// Standard one-dimensional cutoff on `(−1, 1)`.
pub fn bump1(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - s * s)).exp()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    Midpoint,
    GaussLegendre,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub nodes_per_axis: usize,
    pub domain_box: Vec<Interval>,
    pub rule: Rule,
    pub refine_tol: f64,
    /// Overrides the default per-axis node cap for the dimension.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_nodes_per_axis: Option<usize>,
}

pub const DEFAULT_REFINE_TOL: f64 = 1e-4;
pub const MIN_NODES_PER_AXIS: usize = 8;

impl QuadConfig {
    /// Gauss–Legendre on the unit box, starting at 8 nodes per axis.
    pub fn unit(m: usize) -> Self {
        QuadConfig {
            nodes_per_axis: MIN_NODES_PER_AXIS,
            domain_box: unit_box(m),
            rule: Rule::GaussLegendre,
            refine_tol: DEFAULT_REFINE_TOL,
            max_nodes_per_axis: None,
        }
    }

    pub fn node_cap(&self) -> Result<usize> {
        if let Some(c) = self.max_nodes_per_axis {
            return Ok(c);
        }
        default_node_cap(self.domain_box.len())
    }

    fn validate(&self) -> Result<()> {
        check_box(&self.domain_box, "domain box")?;
        if self.nodes_per_axis < MIN_NODES_PER_AXIS {
            return Err(Error::InvalidInput(format!(
                "nodes_per_axis must be at least {MIN_NODES_PER_AXIS}"
            )));
        }
        if self.refine_tol.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::InvalidInput("refine_tol must be positive".into()));
        }
        if self.node_cap()? < self.nodes_per_axis {
            return Err(Error::InvalidInput(
                "node cap below the starting node count".into(),
            ));
        }
        Ok(())
    }
}

/// 4096 per axis in two dimensions, 512 in three, 64 in four.
pub fn default_node_cap(m: usize) -> Result<usize> {
    match m {
        1 => Ok(1 << 16),
        2 => Ok(4096),
        3 => Ok(512),
        4 => Ok(64),
        _ => Err(Error::InvalidInput(format!(
            "quadrature supports 1 to 4 dimensions, got {m}"
        ))),
    }
}

type Rule1d = Arc<(Vec<f64>, Vec<f64>)>;

/// Gauss–Legendre nodes and weights on `[−1, 1]`, cached per order.
pub fn gauss_legendre(n: usize) -> Rule1d {
    static CACHE: OnceLock<RwLock<HashMap<usize, Rule1d>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(r) = cache.read().unwrap_or_else(|e| e.into_inner()).get(&n) {
        return r.clone();
    }
    let rule = Arc::new(compute_gauss_legendre(n));
    cache
        .write()
        .unwrap_or_else(|e| e.into_inner())
        .entry(n)
        .or_insert(rule)
        .clone()
}

fn compute_gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        let wt = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wt;
        w[n - 1 - i] = wt;
    }
    (x, w)
}

fn axis_rule(rule: Rule, n: usize, iv: &Interval) -> (Vec<f64>, Vec<f64>) {
    let (lo, hi) = (rat_to_f64(&iv.lo), rat_to_f64(&iv.hi));
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    match rule {
        Rule::GaussLegendre => {
            let r = gauss_legendre(n);
            (
                r.0.iter().map(|t| mid + half * t).collect(),
                r.1.iter().map(|w| half * w).collect(),
            )
        }
        Rule::Midpoint => {
            let h = (hi - lo) / n as f64;
            (
                (0..n).map(|i| lo + (i as f64 + 0.5) * h).collect(),
                vec![h; n],
            )
        }
    }
}

/// Float-ready form of one factor `f_j ∘ π_j`.
struct Factor {
    rows: Vec<Vec<f64>>,
    center: Vec<f64>,
    inv_half: Vec<f64>,
    phase: Option<(F64Poly, f64)>,
}

impl Factor {
    fn new(pi: &Mat, f: &BumpSpec) -> Self {
        Factor {
            rows: (0..pi.rows())
                .map(|i| pi.row(i).iter().map(rat_to_f64).collect())
                .collect(),
            center: f
                .support
                .iter()
                .map(|iv| 0.5 * (rat_to_f64(&iv.lo) + rat_to_f64(&iv.hi)))
                .collect(),
            inv_half: f.support.iter().map(|iv| 2.0 / iv.width()).collect(),
            phase: f
                .modulation
                .as_ref()
                .filter(|m| m.lambda != 0.0 && !m.q.is_zero())
                .map(|m| (m.q.to_f64_terms(), m.lambda)),
        }
    }

    /// Adds this factor's log-amplitude and phase angle; `false` outside the support.
    fn accumulate(&self, x: &[f64], t: &mut Vec<f64>, log_amp: &mut f64, angle: &mut f64) -> bool {
        t.clear();
        for ((row, c), s) in self.rows.iter().zip(&self.center).zip(&self.inv_half) {
            let ti: f64 = row.iter().zip(x).map(|(a, b)| a * b).sum();
            let u = (ti - c) * s;
            if u.abs() >= 1.0 {
                return false;
            }
            *log_amp -= 1.0 / (1.0 - u * u);
            t.push(ti);
        }
        if let Some((q, lambda)) = &self.phase {
            *angle -= lambda * q.eval(t);
        }
        true
    }
}

struct Integrand {
    phase: F64Poly,
    lambda: f64,
    factors: Vec<Factor>,
}

impl Integrand {
    /// Amplitudes multiply as one exponential of summed logs and all phases add into
    /// one angle, so cancelling phases cancel before the trigonometric call.
    fn eval(&self, x: &[f64], t: &mut Vec<f64>) -> Complex64 {
        let (mut log_amp, mut angle) = (0.0, 0.0);
        for f in &self.factors {
            if !f.accumulate(x, t, &mut log_amp, &mut angle) {
                return Complex64::new(0.0, 0.0);
            }
        }
        if self.lambda != 0.0 {
            angle += self.lambda * self.phase.eval(x);
        }
        Complex64::from_polar(log_amp.exp(), angle)
    }
}

/// One fixed-grid tensor quadrature. The outer axis is split across workers; partial
/// sums are combined in index order so the result does not depend on the thread count.
fn tensor_sum(f: &Integrand, cfg: &QuadConfig, n: usize) -> Complex64 {
    let axes: Vec<(Vec<f64>, Vec<f64>)> = cfg
        .domain_box
        .iter()
        .map(|iv| axis_rule(cfg.rule, n, iv))
        .collect();
    let m = axes.len();
    let inner_count = n.pow(m as u32 - 1);
    let work = || -> Vec<Complex64> {
        (0..n)
            .into_par_iter()
            .map(|i0| {
                let mut x = vec![0.0; m];
                let mut t = Vec::with_capacity(m);
                x[0] = axes[0].0[i0];
                let mut acc = Complex64::new(0.0, 0.0);
                for mut k in 0..inner_count {
                    let mut w = axes[0].1[i0];
                    for ax in (1..m).rev() {
                        let i = k % n;
                        k /= n;
                        x[ax] = axes[ax].0[i];
                        w *= axes[ax].1[i];
                    }
                    acc += f.eval(&x, &mut t) * w;
                }
                acc
            })
            .collect()
    };
    // already inside a pool (a parallel sweep, or a caller's own pool): stay there
    let partials = if rayon::current_thread_index().is_some() {
        work()
    } else {
        pool().install(work)
    };
    partials
        .into_iter()
        .fold(Complex64::new(0.0, 0.0), |a, b| a + b)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: Complex64,
    pub nodes_per_axis: usize,
    /// Grid points of the final level.
    pub nodes_used: usize,
    /// `(nodes_per_axis, estimate)` for every level computed.
    pub history: Vec<(usize, Complex64)>,
}

/// Absolute floor for the stopping test, relative to the domain volume, so integrals
/// that vanish identically still terminate.
const ABS_FLOOR: f64 = 1e-13;

/// `∫ e^{iλP(x)} ∏ f_j(π_j x) dx` over the domain box, doubling the nodes per axis
/// until two successive estimates differ by less than `refine_tol` relative.
pub fn eval_integral(
    p: &MultiPoly,
    lambda: f64,
    pis: &[Mat],
    fs: &[BumpSpec],
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    cfg.validate()?;
    let m = cfg.domain_box.len();
    if p.num_vars() != m {
        return Err(Error::DimensionMismatch {
            left: m,
            right: p.num_vars(),
        });
    }
    if pis.len() != fs.len() {
        return Err(Error::InvalidInput(format!(
            "{} maps but {} functions",
            pis.len(),
            fs.len()
        )));
    }
    for (pi, f) in pis.iter().zip(fs) {
        f.validate()?;
        if pi.cols() != m || pi.rows() != f.dim() {
            return Err(Error::DimensionMismatch {
                left: pi.rows(),
                right: f.dim(),
            });
        }
    }
    if !lambda.is_finite() {
        return Err(Error::InvalidInput("lambda must be finite".into()));
    }
    let integrand = Integrand {
        phase: p.to_f64_terms(),
        lambda,
        factors: pis
            .iter()
            .zip(fs)
            .map(|(pi, f)| Factor::new(pi, f))
            .collect(),
    };
    let volume: f64 = cfg.domain_box.iter().map(Interval::width).product();
    let cap = cfg.node_cap()?;
    let mut n = cfg.nodes_per_axis;
    let mut history = vec![(n, tensor_sum(&integrand, cfg, n))];
    loop {
        let next = 2 * n;
        if next > cap {
            let k = history.len();
            let last = history[k - 1].1;
            let previous = if k > 1 { history[k - 2].1 } else { last };
            return Err(Error::NodeCapExceeded {
                nodes: n,
                previous,
                last,
            });
        }
        let v = tensor_sum(&integrand, cfg, next);
        let prev = history.last().unwrap().1;
        history.push((next, v));
        n = next;
        if (v - prev).norm() <= cfg.refine_tol * v.norm().max(ABS_FLOOR * volume) {
            return Ok(QuadResult {
                value: v,
                nodes_per_axis: n,
                nodes_used: n.pow(m as u32),
                history,
            });
        }
    }
}

/// Modulated bumps `f_j = e^{−iλQ_j} · bump_j` that cancel the phase `λP` exactly when
/// `Σ Q_j ∘ π_j = P`, leaving the integrand `∏ bump_j(π_j x)` for every λ.
pub fn adversarial_functions(
    p: &MultiPoly,
    pis: &[Mat],
    cert: &[(String, MultiPoly)],
    boxes: &[Vec<Interval>],
    lambda: f64,
) -> Result<Vec<BumpSpec>> {
    if boxes.len() != cert.len() {
        return Err(Error::InvalidInput(format!(
            "{} boxes for {} certificate terms",
            boxes.len(),
            cert.len()
        )));
    }
    let qs: Vec<MultiPoly> = cert.iter().map(|c| c.1.clone()).collect();
    for (q, pi) in qs.iter().zip(pis) {
        if q.num_vars() != pi.rows() {
            return Err(Error::InvalidCertificate(format!(
                "polynomial in {} variables for a map with {} rows",
                q.num_vars(),
                pi.rows()
            )));
        }
    }
    if !verify_certificate(p, pis, &qs)? {
        return Err(Error::InvalidCertificate(
            "sum of pullbacks differs from the phase".into(),
        ));
    }
    Ok(qs
        .into_iter()
        .zip(boxes)
        .map(|(q, b)| {
            if lambda == 0.0 || q.is_zero() {
                BumpSpec::smooth(b.clone())
            } else {
                BumpSpec::modulated(b.clone(), q, lambda)
            }
        })
        .collect())
}

#[derive(Clone, Debug)]
pub enum SweepMode {
    /// The same functions for every λ.
    Fixed(Vec<BumpSpec>),
    /// Certificate-modulated bumps rebuilt for each λ.
    Adversarial {
        cert: Vec<(String, MultiPoly)>,
        boxes: Vec<Vec<Interval>>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowStatus {
    Converged,
    Unconverged,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
    pub nodes: usize,
    pub status: RowStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SweepRow {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub rho: f64,
    #[serde(rename = "logC")]
    pub log_c: f64,
    pub r2: f64,
    pub tail_from: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecaySweep {
    pub rows: Vec<SweepRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<DecayFit>,
}

pub const CSV_HEADER: &str = "lambda,re,im,abs,nodes,status";

impl DecaySweep {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let status = serde_json::to_value(r.status).expect("plain enum");
            out.push_str(&format!(
                "{},{:e},{:e},{:e},{},{}\n",
                r.lambda,
                r.re,
                r.im,
                r.abs,
                r.nodes,
                status.as_str().unwrap_or_default()
            ));
        }
        out
    }

    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.status == RowStatus::Converged)
    }

    /// Largest relative deviation of `|I|` from its mean over converged rows.
    pub fn relative_spread(&self) -> f64 {
        let abs: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.status == RowStatus::Converged)
            .map(|r| r.abs)
            .collect();
        if abs.is_empty() {
            return f64::NAN;
        }
        let max = abs.iter().cloned().fold(f64::MIN, f64::max);
        let min = abs.iter().cloned().fold(f64::MAX, f64::min);
        (max - min) / max.abs().max(f64::MIN_POSITIVE)
    }
}

pub const MIN_SWEEP_LAMBDAS: usize = 4;

/// One quadrature per λ; a row that fails is recorded and the sweep continues.
pub fn sweep(
    p: &MultiPoly,
    pis: &[Mat],
    mode: &SweepMode,
    lambdas: &[f64],
    cfg: &QuadConfig,
) -> Result<DecaySweep> {
    if lambdas.len() < MIN_SWEEP_LAMBDAS {
        return Err(Error::InvalidInput(format!(
            "a sweep needs at least {MIN_SWEEP_LAMBDAS} λ values, got {}",
            lambdas.len()
        )));
    }
    if lambdas
        .windows(2)
        .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
    {
        return Err(Error::InvalidInput(
            "λ values must be strictly increasing".into(),
        ));
    }
    let rows = lambdas
        .iter()
        .map(|&lambda| {
            let fs = match mode {
                SweepMode::Fixed(fs) => Ok(fs.clone()),
                SweepMode::Adversarial { cert, boxes } => {
                    adversarial_functions(p, pis, cert, boxes, lambda)
                }
            };
            let res = fs.and_then(|fs| eval_integral(p, lambda, pis, &fs, cfg));
            let row = |v: Complex64, nodes, status, error| SweepRow {
                lambda,
                re: v.re,
                im: v.im,
                abs: v.norm(),
                nodes,
                status,
                error,
            };
            match res {
                Ok(r) => row(r.value, r.nodes_used, RowStatus::Converged, None),
                Err(e @ Error::NodeCapExceeded { nodes, last, .. }) => row(
                    last,
                    nodes.pow(cfg.domain_box.len() as u32),
                    RowStatus::Unconverged,
                    Some(e.to_string()),
                ),
                Err(e) => row(
                    Complex64::new(0.0, 0.0),
                    0,
                    RowStatus::Failed,
                    Some(e.to_string()),
                ),
            }
        })
        .collect();
    Ok(DecaySweep { rows, fit: None })
}

/// Least-squares fit of `log|I| = logC − ρ·log(1+λ)` over converged rows with
/// `λ ≥ tail_from` and nonzero `|I|`.
pub fn fit_decay(s: &DecaySweep, tail_from: f64) -> Result<DecayFit> {
    let pts: Vec<(f64, f64)> = s
        .rows
        .iter()
        .filter(|r| r.lambda >= tail_from && r.status == RowStatus::Converged && r.abs > 0.0)
        .map(|r| ((1.0 + r.lambda.abs()).ln(), r.abs.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientTail(pts.len()));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientTail(1));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let r2 = if syy <= f64::EPSILON * k * my.abs().max(1.0) {
        1.0
    } else {
        1.0 - ss_res / syy
    };
    Ok(DecayFit {
        rho: -slope,
        log_c: intercept,
        r2,
        tail_from,
        points: pts.len(),
    })
}

/// `λ0, λ0·r, λ0·r², …` up to and including `last`.
pub fn geometric_lambdas(first: f64, ratio: f64, last: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut l = first;
    while l <= last * (1.0 + 1e-12) {
        out.push(l);
        l *= ratio;
    }
    out
}

/// Coordinate projection onto the listed axes.
pub fn coordinate_map(m: usize, axes: &[usize]) -> Mat {
    let mut a = Mat::zeros(axes.len(), m);
    for (i, &j) in axes.iter().enumerate() {
        a[(i, j)] = rat(1);
    }
    a
}
