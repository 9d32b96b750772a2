//! Seeded replicated simulation: L2 norms of U-statistics (exact for small
//! `n`, Monte Carlo otherwise) compared against the explicit bounds, and
//! single-path convergence runs for the strong law.

use rand::SeedableRng;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    b_q, corollary2_bound, corollary3_bound, m_sup, theorem1_bound, BoundInputs, BoundReport, BqValue, L2Kind,
};
use crate::error::{Error, Result};
use crate::markov::{
    certify_rho, stationary, ChainRng, ChainSpec, Distribution, ErgodicityProfile, FiniteKernel, KernelSampler, Rho,
};
use crate::par;
use crate::proof::PowerTable;
use crate::ustat::{
    binomial_f64, binomial_u128, degeneracy_order, hoeffding_project, IncrementalUStat, KernelSpec,
    SymmetricKernelFn, DEFAULT_BUDGET,
};

/// Seed of replicate `r`: the splitmix64 finalizer applied to
/// `seed + (r + 1) * 0x9E3779B97F4A7C15`.
pub fn mix(seed: u64, r: u64) -> u64 {
    let mut z = seed.wrapping_add(r.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Law of `Y_0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(untagged)]
pub enum InitialSpec {
    /// Explicit weights over the states.
    Weights(Vec<f64>),
    Named(NamedInitial),
    /// Point mass on a state index.
    Dirac { dirac: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum NamedInitial {
    Stationary,
    Uniform,
}

impl Default for InitialSpec {
    fn default() -> Self {
        InitialSpec::Named(NamedInitial::Stationary)
    }
}

impl InitialSpec {
    pub fn resolve(&self, kernel: &FiniteKernel, pi: &Distribution) -> Result<Distribution> {
        let s = kernel.size();
        match self {
            InitialSpec::Weights(w) => {
                crate::markov::check_dim(s, w.len())?;
                Distribution::new(w.clone())
            }
            InitialSpec::Named(NamedInitial::Stationary) => Ok(pi.clone()),
            InitialSpec::Named(NamedInitial::Uniform) => Ok(Distribution::uniform(s)),
            InitialSpec::Dirac { dirac } if *dirac < s => Ok(Distribution::dirac(s, *dirac)),
            InitialSpec::Dirac { dirac } => {
                Err(Error::InvalidDistribution(format!("dirac state {dirac} out of range for {s} states")))
            }
        }
    }
}

/// Where `(V, rho)` comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProfileSpec {
    /// Exact `rho(k)` of the chain for `k <= k_max` (default: the largest `n` used, at least 200).
    Certified {
        #[serde(default)]
        k_max: Option<usize>,
    },
    /// User-supplied rate; `m` overrides `M(mu, V)`.
    Declared {
        rho: Rho,
        #[serde(default)]
        m: Option<f64>,
    },
}

impl Default for ProfileSpec {
    fn default() -> Self {
        ProfileSpec::Certified { k_max: None }
    }
}

/// A bound to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BoundRequest {
    Theorem1,
    Corollary2,
    Corollary3 { p: f64 },
}

impl BoundRequest {
    pub fn label(&self) -> String {
        match self {
            BoundRequest::Theorem1 => "theorem1".into(),
            BoundRequest::Corollary2 => "corollary2".into(),
            BoundRequest::Corollary3 { p } => format!("corollary3(p={p})"),
        }
    }
}

/// Strong-law run along a single path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SllnSpec {
    pub n_max: usize,
    /// Defaults to the powers of two `>= m` below `n_max`, then `n_max`.
    #[serde(default)]
    pub checkpoints: Option<Vec<usize>>,
    /// Exponent of the log-moment condition; must be positive.
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Required bound on the error at the last checkpoint.
    #[serde(default)]
    pub tolerance: Option<f64>,
}

fn default_delta() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SimulateSpec {
    pub n: usize,
}

/// Experiment description shared by every subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub chain: ChainSpec,
    #[serde(default)]
    pub initial: InitialSpec,
    #[serde(default)]
    pub profile: ProfileSpec,
    #[serde(default)]
    pub kernel: Option<KernelSpec>,
    #[serde(default = "default_m")]
    pub m: usize,
    /// Declared `||h||_inf`; must dominate the exact value.
    #[serde(default)]
    pub declared_sup: Option<f64>,
    #[serde(default)]
    pub n_grid: Vec<usize>,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub master_seed: u64,
    /// Empty means the default for the kernel's degeneracy.
    #[serde(default)]
    pub bounds: Vec<BoundRequest>,
    /// Largest `n` evaluated exactly instead of by simulation.
    #[serde(default = "default_exact_max_n")]
    pub exact_max_n: usize,
    #[serde(default)]
    pub budget: Option<u64>,
    #[serde(default)]
    pub slln: Option<SllnSpec>,
    #[serde(default)]
    pub simulate: Option<SimulateSpec>,
}

fn default_m() -> usize {
    2
}

fn default_replicates() -> usize {
    1000
}

fn default_exact_max_n() -> usize {
    12
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::Config("m must be >= 1".into()));
        }
        if self.replicates < 2 {
            return Err(Error::Config(format!("replicates = {} must be >= 2", self.replicates)));
        }
        if self.n_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("n_grid must be strictly increasing".into()));
        }
        if let Some(&n) = self.n_grid.iter().find(|&&n| n < self.m) {
            return Err(Error::Config(format!("n = {n} is below the degree m = {}", self.m)));
        }
        if let Some(slln) = &self.slln {
            if !(slln.delta > 0.0) {
                return Err(Error::Config(format!("slln.delta = {} must be > 0", slln.delta)));
            }
            if slln.n_max < self.m {
                return Err(Error::Config("slln.n_max is below the degree".into()));
            }
            if let Some(cp) = &slln.checkpoints {
                if cp.windows(2).any(|w| w[1] <= w[0]) || cp.iter().any(|&c| c < self.m || c > slln.n_max) {
                    return Err(Error::Config("slln.checkpoints must increase within [m, n_max]".into()));
                }
            }
        }
        for b in &self.bounds {
            if let BoundRequest::Corollary3 { p } = b {
                if !(*p > 0.0) {
                    return Err(Error::PNotPositive(*p));
                }
            }
        }
        Ok(())
    }

    pub fn budget(&self) -> u128 {
        self.budget.map_or(DEFAULT_BUDGET, u128::from)
    }

    fn horizon(&self) -> usize {
        let grid_max = self.n_grid.last().copied().unwrap_or(0);
        let slln_max = self.slln.as_ref().map_or(0, |s| s.n_max);
        grid_max.max(slln_max).max(200)
    }
}

/// Everything resolved from a config: chain, laws, profile and kernel.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub kernel: FiniteKernel,
    pub pi: Distribution,
    pub mu: Distribution,
    pub profile: ErgodicityProfile,
    pub m_sup: f64,
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let kernel = config.chain.kernel()?;
        let pi = stationary(&kernel)?;
        let mu = config.initial.resolve(&kernel, &pi)?;
        let v = config.chain.v_values()?;
        let profile = match &config.profile {
            ProfileSpec::Certified { k_max } => certify_rho(&kernel, &v, k_max.unwrap_or(config.horizon()))?,
            ProfileSpec::Declared { rho, m } => {
                let p = ErgodicityProfile::declared(v, rho.clone())?;
                match m {
                    Some(m) => p.with_declared_m(*m),
                    None => p,
                }
            }
        };
        profile.validate()?;
        let m_sup = m_sup(&mu, &profile, &kernel)?;
        Ok(Self { config, kernel, pi, mu, profile, m_sup })
    }

    /// The configured kernel bound to this chain.
    pub fn kernel_fn(&self) -> Result<SymmetricKernelFn> {
        let spec = self.config.kernel.as_ref().ok_or_else(|| Error::Config("config has no kernel".into()))?;
        let h = spec.bind(self.config.m, &self.kernel, &self.pi)?;
        match self.config.declared_sup {
            Some(sup) => h.with_declared_sup(sup),
            None => Ok(h),
        }
    }
}

/// Monte Carlo estimate of `(E U^2)^{1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct L2Estimate {
    pub point: f64,
    pub stderr: f64,
    pub replicates: usize,
}

/// `||U_{n,m}(h)||_2` computed exactly: every pair of index sets `A, B`
/// contributes `E[h(Y_A) h(Y_B)]` under the joint law of `Y` at `A u B`.
pub fn exact_l2(mu: &Distribution, kernel: &FiniteKernel, h: &SymmetricKernelFn, n: usize, budget: u128) -> Result<f64> {
    let m = h.degree();
    crate::markov::check_dim(kernel.size(), h.states())?;
    if n < m {
        return Err(Error::DegreeTooLarge { n, m });
    }
    let combos = binomial_u128(n as u64, m as u64).unwrap_or(u128::MAX);
    let per_pair = (h.states() as u128).saturating_pow(2 * m as u32);
    let needed = combos.saturating_mul(combos).saturating_mul(per_pair);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let subsets = combinations(n, m);
    let table = PowerTable::new(kernel, n);
    let rows = par::map_indexed(subsets.len(), |a| -> Result<f64> {
        let sa = &subsets[a];
        let mut terms = Vec::with_capacity(subsets.len() - a);
        let (mut ya, mut yb) = (vec![0usize; m], vec![0usize; m]);
        for (b, sb) in subsets.iter().enumerate().skip(a) {
            let mut times: Vec<usize> = sa.iter().chain(sb).copied().collect();
            times.sort_unstable();
            times.dedup();
            let pos = |t: usize| times.binary_search(&t).expect("time is present");
            let (pa, pb): (Vec<usize>, Vec<usize>) = (sa.iter().map(|&t| pos(t)).collect(), sb.iter().map(|&t| pos(t)).collect());
            let law = table.joint_law(mu.weights(), &times)?;
            let e = law.expect(|y| {
                for k in 0..m {
                    ya[k] = y[pa[k]];
                    yb[k] = y[pb[k]];
                }
                h.eval(&ya) * h.eval(&yb)
            });
            terms.push(if b == a { e } else { 2.0 * e });
        }
        Ok(par::pairwise_sum(&terms))
    });
    let rows = rows.into_iter().collect::<Result<Vec<f64>>>()?;
    let second = par::pairwise_sum(&rows) / (combos as f64 * combos as f64);
    Ok(second.max(0.0).sqrt())
}

/// Increasing `m`-subsets of `1..=n`.
fn combinations(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (1..=m).collect();
    loop {
        out.push(cur.clone());
        let Some(j) = (0..m).rev().find(|&j| cur[j] < n - (m - 1 - j)) else {
            return out;
        };
        cur[j] += 1;
        for t in j + 1..m {
            cur[t] = cur[t - 1] + 1;
        }
    }
}

/// Simulates `replicates` paths with seeds `mix(master_seed, r)` and
/// returns the root mean square of `U_{n,m}(h)`. The delta-method standard
/// error comes from the sample variance of `U_r^2`.
pub fn estimate_l2(
    kernel: &FiniteKernel,
    mu: &Distribution,
    h: &SymmetricKernelFn,
    n: usize,
    replicates: usize,
    master_seed: u64,
) -> Result<L2Estimate> {
    crate::markov::check_dim(kernel.size(), h.states())?;
    crate::markov::check_dim(kernel.size(), mu.len())?;
    if replicates < 2 {
        return Err(Error::Config(format!("replicates = {replicates} must be >= 2")));
    }
    if n < h.degree() {
        return Err(Error::DegreeTooLarge { n, m: h.degree() });
    }
    let sampler = KernelSampler::new(kernel);
    let squares = par::map_indexed(replicates, |r| {
        let mut rng = ChainRng::seed_from_u64(mix(master_seed, r as u64));
        let mut u = IncrementalUStat::new(h);
        sampler.run(mu, n, &mut rng, |y| u.push(y));
        let value = u.value().expect("n >= m");
        value * value
    });
    let r = replicates as f64;
    let mean = par::pairwise_sum(&squares) / r;
    let deviations: Vec<f64> = squares.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = par::pairwise_sum(&deviations) / (r - 1.0);
    let point = mean.sqrt();
    let stderr = if point > 0.0 { (var / r).sqrt() / (2.0 * point) } else { 0.0 };
    Ok(L2Estimate { point, stderr, replicates })
}

/// Result of [`run_variance_experiment`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceOutcome {
    pub degeneracy: usize,
    /// `pi^{(x)m} h`, subtracted before taking norms when `h` is not canonical.
    pub theta: f64,
    pub centered: bool,
    pub reports: Vec<BoundReport>,
}

impl VarianceOutcome {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(BoundReport::all_pass)
    }
}

fn bound_inputs(exp: &Experiment, h: &SymmetricKernelFn, n: usize, degeneracy: usize) -> BoundInputs {
    BoundInputs {
        n,
        m: h.degree(),
        profile: exp.profile.clone(),
        mu: exp.mu.weights().to_vec(),
        m_sup: exp.m_sup,
        sup_h: Some(h.declared_sup.unwrap_or_else(|| h.sup_norm())),
        bq: None,
        p: None,
        degeneracy,
    }
}

/// Evaluates the requested bounds at `n`. Theorem-1 requests on kernels that
/// are not canonical are answered with the corollary-2 bound instead.
pub fn bound_report(exp: &Experiment, h: &SymmetricKernelFn, n: usize, degeneracy: usize) -> Result<BoundReport> {
    let m = h.degree();
    let mut requests = exp.config.bounds.clone();
    if requests.is_empty() {
        requests.push(if degeneracy >= m { BoundRequest::Theorem1 } else { BoundRequest::Corollary2 });
    }
    let base = bound_inputs(exp, h, n, degeneracy);
    let mut report = BoundReport::new(n, m);
    for req in &requests {
        match req {
            BoundRequest::Theorem1 if degeneracy < m => {
                if !requests.contains(&BoundRequest::Corollary2) {
                    report.push("corollary2", corollary2_bound(&base)?, &base);
                }
            }
            BoundRequest::Theorem1 => report.push("theorem1", theorem1_bound(&base)?, &base),
            BoundRequest::Corollary2 => report.push("corollary2", corollary2_bound(&base)?, &base),
            BoundRequest::Corollary3 { p } => {
                let q = 2.0 * (p + 1.0);
                let inputs = match b_q(h, &exp.profile, q) {
                    Ok(value) => BoundInputs { p: Some(*p), bq: Some(BqValue { q, value }), ..base.clone() },
                    Err(e) => {
                        report.unsupported.push((req.label(), e.to_string()));
                        continue;
                    }
                };
                match corollary3_bound(&inputs) {
                    Ok(v) => report.push(&req.label(), v, &inputs),
                    Err(e @ Error::Unsupported(_)) => report.unsupported.push((req.label(), e.to_string())),
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(report)
}

/// Per `n`: the L2 norm of `U_{n,m}(h)` (of `U - pi^{(x)m} h` for kernels
/// that are not canonical), exact when `n <= exact_max_n` and simulated
/// otherwise, against every requested bound. A bound passes when
/// `bound >= l2 + 3 stderr`.
pub fn run_variance_experiment(exp: &Experiment) -> Result<VarianceOutcome> {
    let cfg = &exp.config;
    if cfg.n_grid.is_empty() {
        return Err(Error::Config("n_grid is empty".into()));
    }
    let h = exp.kernel_fn()?;
    let degeneracy = degeneracy_order(&h, &exp.pi)?;
    let theta = hoeffding_project(&h, &exp.pi, 0)?.scalar().expect("order-0 projection is a scalar");
    let centered = degeneracy < h.degree();
    let target = if centered {
        h.combine(1.0, &SymmetricKernelFn::constant(h.degree(), h.states(), theta)?, -1.0)?
    } else {
        h.clone()
    };
    let mut reports = Vec::with_capacity(cfg.n_grid.len());
    for &n in &cfg.n_grid {
        let mut report = bound_report(exp, &h, n, degeneracy)?;
        if n <= cfg.exact_max_n {
            let l2 = exact_l2(&exp.mu, &exp.kernel, &target, n, cfg.budget())?;
            report.compare(L2Kind::Exact, l2, 0.0);
        } else {
            let est = estimate_l2(&exp.kernel, &exp.mu, &target, n, cfg.replicates, cfg.master_seed)?;
            report.compare(L2Kind::Empirical, est.point, est.stderr);
        }
        reports.push(report);
    }
    Ok(VarianceOutcome { degeneracy, theta, centered, reports })
}

/// One checkpoint of a strong-law run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SllnRow {
    pub n: usize,
    pub u_n: f64,
    pub target: f64,
    pub abs_error: f64,
}

/// Convergence table of `U_n(h)` towards `pi^{(x)m} h` along one path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SllnTable {
    pub seed: u64,
    pub rows: Vec<SllnRow>,
    /// Standing assumptions and how each was established.
    pub conditions: Vec<String>,
    pub tolerance: Option<f64>,
}

impl SllnTable {
    /// Final error within tolerance (when set) and, with at least six
    /// checkpoints, the last three errors all below the largest of the first three.
    pub fn checks(&self) -> Vec<(String, bool)> {
        let mut out = Vec::new();
        if let (Some(tol), Some(last)) = (self.tolerance, self.rows.last()) {
            out.push((format!("final error {:.3e} < {tol:e}", last.abs_error), last.abs_error < tol));
        }
        if self.rows.len() >= 6 {
            let max = |rows: &[SllnRow]| rows.iter().map(|r| r.abs_error).fold(0.0, f64::max);
            let (early, late) = (max(&self.rows[..3]), max(&self.rows[self.rows.len() - 3..]));
            out.push((format!("late max error {late:.3e} < early max error {early:.3e}"), late < early));
        }
        out
    }

    pub fn passed(&self) -> bool {
        self.checks().iter().all(|(_, ok)| *ok)
    }
}

fn rate_condition(profile: &ErgodicityProfile) -> String {
    match &profile.rho {
        Rho::Geometric { varrho, .. } => format!("rho geometric with varrho = {varrho}; polynomial rate holds for every r"),
        Rho::Explicit { tail_ratio, .. } => {
            format!("rho tabulated with geometric tail ratio {tail_ratio}; polynomial rate holds for every r")
        }
    }
}

/// Default checkpoints: powers of two from the first one `>= m`, then `n_max`.
pub fn dyadic_checkpoints(m: usize, n_max: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (0..usize::BITS).map(|k| 1usize << k).skip_while(|&c| c < m).take_while(|&c| c < n_max).collect();
    out.push(n_max);
    out
}

/// Runs one path of length `n_max` from seed `mix(master_seed, 0)` and
/// records `|U_n(h) - pi^{(x)m} h|` at the checkpoints.
pub fn run_slln_experiment(exp: &Experiment) -> Result<SllnTable> {
    let cfg = &exp.config;
    let slln = cfg.slln.as_ref().ok_or_else(|| Error::Config("config has no slln section".into()))?;
    let h = exp.kernel_fn()?;
    let target = hoeffding_project(&h, &exp.pi, 0)?.scalar().expect("order-0 projection is a scalar");
    let checkpoints = slln.checkpoints.clone().unwrap_or_else(|| dyadic_checkpoints(h.degree(), slln.n_max));
    let seed = mix(cfg.master_seed, 0);
    let sampler = KernelSampler::new(&exp.kernel);
    let mut rng = ChainRng::seed_from_u64(seed);
    let mut u = IncrementalUStat::new(&h);
    let mut rows = Vec::with_capacity(checkpoints.len());
    let mut next = checkpoints.iter().peekable();
    sampler.run(&exp.mu, slln.n_max, &mut rng, |y| {
        u.push(y);
        if next.peek() == Some(&&u.len()) {
            next.next();
            let u_n = u.value().expect("checkpoints are >= m");
            rows.push(SllnRow { n: u.len(), u_n, target, abs_error: (u_n - target).abs() });
        }
    });
    let conditions = vec![
        rate_condition(&exp.profile),
        format!("M(mu, V) = {} is finite", exp.m_sup),
        format!("log-moment condition with delta = {} holds: h is bounded on a finite space", slln.delta),
    ];
    Ok(SllnTable { seed, rows, conditions, tolerance: slln.tolerance })
}

/// Ordinary least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let k = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / k, ly.iter().sum::<f64>() / k);
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

/// Exact `E[U_{n,m}(h)^2]` for i.i.d. draws from `pi` and canonical `h`:
/// `pi^{(x)m}(h^2) / binom(n, m)`.
pub fn iid_canonical_l2(h: &SymmetricKernelFn, pi: &Distribution, n: usize) -> Result<f64> {
    let squared = SymmetricKernelFn::from_fn(h.degree(), h.states(), |y| h.eval(y).powi(2))?;
    let mean = hoeffding_project(&squared, pi, 0)?.scalar().expect("scalar");
    Ok((mean / binomial_f64(n, h.degree())).sqrt())
}
