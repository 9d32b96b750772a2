//! U-statistics of state sequences, Hoeffding projections and degeneracy.
//!
//! A degree-`m` kernel on a finite space is stored as a dense table over
//! `S^m` state-index tuples (row-major, last argument fastest). The
//! U-statistic
//!
//! ```text
//! U_{n,m}(h) = binom(n,m)^{-1} sum_{i_1 < ... < i_m} h(Y_{i_1}, ..., Y_{i_m})
//! ```
//!
//! is evaluated by full lexicographic enumeration, `O(binom(n,m) * m)` table
//! lookups, partitioned on the first index and reduced in a fixed order.

use std::sync::Arc;

use rand::Rng;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::markov::{check_dim, Distribution, FiniteKernel, Trajectory};
use crate::par;

/// Threshold below which a Hoeffding projection counts as identically zero.
pub const EPS_DEG: f64 = 1e-10;

/// Default cap on `binom(n, m)` for full enumeration.
pub const DEFAULT_BUDGET: u128 = 100_000_000;

/// Cap on dense kernel tables (`S^m` entries).
pub const TABLE_BUDGET: u128 = 10_000_000;

/// Projections with more than this many entries are evaluated lazily.
pub const PROJECTION_TABLE_LIMIT: u128 = 1_000_000;

pub fn binomial_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

pub fn binomial_f64(n: usize, k: usize) -> f64 {
    match binomial_u128(n as u64, k as u64) {
        Some(b) => b as f64,
        None => ln_binomial(n, k).exp(),
    }
}

pub fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    (1..=k).map(|i| ((n - k + i) as f64 / i as f64).ln()).sum()
}

fn pow_u128(base: usize, exp: usize) -> u128 {
    (0..exp).fold(1u128, |acc, _| acc.saturating_mul(base as u128))
}

/// Centering constant for builtin kernels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(untagged)]
pub enum Center {
    Value(f64),
    Named(NamedCenter),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum NamedCenter {
    /// The stationary mean of the state labels, `pi(x)`.
    Stationary,
}

impl Default for Center {
    fn default() -> Self {
        Center::Value(0.0)
    }
}

impl Center {
    fn resolve(self, stationary_mean: Option<f64>) -> Result<f64> {
        match self {
            Center::Value(c) => Ok(c),
            Center::Named(NamedCenter::Stationary) => stationary_mean.ok_or(Error::NonIntegrable),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct WeightedKernel {
    pub weight: f64,
    pub kernel: KernelSpec,
}

/// Kernel description as it appears in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum KernelSpec {
    /// `prod_i (x_i - center)`.
    Product {
        #[serde(default)]
        center: Center,
    },
    /// `sum_i (x_i - center)`.
    Additive {
        #[serde(default)]
        center: Center,
    },
    /// `1` when all arguments are the same state, else `0`.
    IndicatorDiag,
    /// `exp(-sum_{i<j} (x_i - x_j)^2 / (2 bandwidth^2))`.
    GaussianRbf { bandwidth: f64 },
    /// The constant `value`.
    Constant { value: f64 },
    /// Dense table over state indices: nested arrays of depth `m`.
    Table { values: serde_json::Value },
    /// Weighted sum of kernels of the same degree.
    Sum { terms: Vec<WeightedKernel> },
}

impl KernelSpec {
    /// Evaluates on state labels. Table kernels need indices and are not
    /// evaluable here.
    pub fn eval_values(&self, xs: &[f64], stationary_mean: Option<f64>) -> Result<f64> {
        Ok(match self {
            KernelSpec::Product { center } => {
                let c = center.resolve(stationary_mean)?;
                xs.iter().map(|x| x - c).product()
            }
            KernelSpec::Additive { center } => {
                let c = center.resolve(stationary_mean)?;
                xs.iter().map(|x| x - c).sum()
            }
            KernelSpec::IndicatorDiag => {
                if xs.windows(2).all(|w| w[0] == w[1]) {
                    1.0
                } else {
                    0.0
                }
            }
            KernelSpec::GaussianRbf { bandwidth } => {
                if !(*bandwidth > 0.0) {
                    return Err(Error::InvalidSymmetricKernel(format!("bandwidth {bandwidth}")));
                }
                let mut ss = 0.0;
                for i in 0..xs.len() {
                    for j in i + 1..xs.len() {
                        ss += (xs[i] - xs[j]).powi(2);
                    }
                }
                (-ss / (2.0 * bandwidth * bandwidth)).exp()
            }
            KernelSpec::Constant { value } => *value,
            KernelSpec::Table { .. } => {
                return Err(Error::InvalidSymmetricKernel(
                    "table kernels are indexed by state, not by value".into(),
                ))
            }
            KernelSpec::Sum { terms } => {
                let mut total = 0.0;
                for t in terms {
                    total += t.weight * t.kernel.eval_values(xs, stationary_mean)?;
                }
                total
            }
        })
    }

    /// Tabulates the kernel over the states of `kernel`; `pi` resolves
    /// stationary centers.
    pub fn bind(&self, degree: usize, kernel: &FiniteKernel, pi: &Distribution) -> Result<SymmetricKernelFn> {
        let s = kernel.size();
        let mean = pi.expect(kernel.states());
        let table = self.tabulate(degree, kernel.states(), mean)?;
        SymmetricKernelFn::from_table(degree, s, table)
    }

    fn tabulate(&self, degree: usize, states: &[f64], mean: f64) -> Result<Vec<f64>> {
        let s = states.len();
        match self {
            KernelSpec::Table { values } => {
                let mut flat = Vec::new();
                flatten_table(values, degree, s, &mut flat)?;
                Ok(flat)
            }
            KernelSpec::Sum { terms } => {
                let mut acc = vec![0.0; checked_table_len(s, degree)?];
                for t in terms {
                    let part = t.kernel.tabulate(degree, states, mean)?;
                    acc.iter_mut().zip(part).for_each(|(a, p)| *a += t.weight * p);
                }
                Ok(acc)
            }
            _ => {
                let len = checked_table_len(s, degree)?;
                let mut idx = vec![0usize; degree];
                let mut xs = vec![0.0; degree];
                let mut out = Vec::with_capacity(len);
                for offset in 0..len {
                    decode(offset, s, &mut idx);
                    for (x, &i) in xs.iter_mut().zip(&idx) {
                        *x = states[i];
                    }
                    out.push(self.eval_values(&xs, Some(mean))?);
                }
                Ok(out)
            }
        }
    }
}

fn flatten_table(value: &serde_json::Value, depth: usize, s: usize, out: &mut Vec<f64>) -> Result<()> {
    if depth == 0 {
        return value
            .as_f64()
            .map(|v| out.push(v))
            .ok_or_else(|| Error::InvalidSymmetricKernel(format!("table entry {value} is not a number")));
    }
    let arr = value
        .as_array()
        .ok_or_else(|| Error::InvalidSymmetricKernel("table nesting shallower than the degree".into()))?;
    if arr.len() != s {
        return Err(Error::InvalidSymmetricKernel(format!(
            "table axis has length {}, expected {s}",
            arr.len()
        )));
    }
    arr.iter().try_for_each(|v| flatten_table(v, depth - 1, s, out))
}

fn checked_table_len(s: usize, degree: usize) -> Result<usize> {
    let len = pow_u128(s, degree);
    if len > TABLE_BUDGET {
        return Err(Error::BudgetExceeded { needed: len, budget: TABLE_BUDGET });
    }
    Ok(len as usize)
}

/// Writes the base-`s` digits of `offset` into `idx` (most significant first).
pub(crate) fn decode(mut offset: usize, s: usize, idx: &mut [usize]) {
    for slot in idx.iter_mut().rev() {
        *slot = offset % s;
        offset /= s;
    }
}

pub(crate) fn encode(idx: &[usize], s: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * s + i)
}

/// A symmetric degree-`m` kernel tabulated over `S^m` state tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricKernelFn {
    degree: usize,
    states: usize,
    table: Arc<Vec<f64>>,
    pub declared_sup: Option<f64>,
    /// Declared `(q, B_q(h))` envelopes.
    pub declared_bq: Vec<(f64, f64)>,
}

impl SymmetricKernelFn {
    pub fn from_table(degree: usize, states: usize, table: Vec<f64>) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidSymmetricKernel("degree must be >= 1".into()));
        }
        let len = checked_table_len(states, degree)?;
        if table.len() != len {
            return Err(Error::DimensionMismatch { expected: len, actual: table.len() });
        }
        if let Some(bad) = table.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidSymmetricKernel(format!("non-finite value {bad}")));
        }
        let mut idx = vec![0usize; degree];
        for (offset, &value) in table.iter().enumerate() {
            decode(offset, states, &mut idx);
            idx.sort_unstable();
            let sorted = table[encode(&idx, states)];
            if (sorted - value).abs() > 1e-12 * (1.0 + value.abs()) {
                return Err(Error::InvalidSymmetricKernel(format!(
                    "not symmetric at offset {offset}: {value} vs {sorted}"
                )));
            }
        }
        Ok(Self { degree, states, table: Arc::new(table), declared_sup: None, declared_bq: Vec::new() })
    }

    pub fn from_fn(degree: usize, states: usize, f: impl Fn(&[usize]) -> f64) -> Result<Self> {
        let len = checked_table_len(states, degree)?;
        let mut idx = vec![0usize; degree];
        let table = (0..len)
            .map(|o| {
                decode(o, states, &mut idx);
                f(&idx)
            })
            .collect();
        Self::from_table(degree, states, table)
    }

    pub fn constant(degree: usize, states: usize, value: f64) -> Result<Self> {
        Self::from_fn(degree, states, |_| value)
    }

    /// Random symmetric kernel with values uniform in `[-1, 1]`.
    pub fn random<R: Rng + ?Sized>(degree: usize, states: usize, rng: &mut R) -> Result<Self> {
        let len = checked_table_len(states, degree)?;
        let mut idx = vec![0usize; degree];
        let mut table = vec![0.0; len];
        // The sorted arrangement of a tuple is its lexicographically smallest
        // permutation, so it has already been filled when we reach the tuple.
        for offset in 0..len {
            decode(offset, states, &mut idx);
            if idx.windows(2).all(|w| w[0] <= w[1]) {
                table[offset] = rng.random_range(-1.0..=1.0);
            } else {
                idx.sort_unstable();
                table[offset] = table[encode(&idx, states)];
            }
        }
        Self::from_table(degree, states, table)
    }

    pub fn with_declared_sup(mut self, sup: f64) -> Result<Self> {
        if !(sup >= 0.0) {
            return Err(Error::InvalidSymmetricKernel(format!("declared sup {sup} < 0")));
        }
        if self.sup_norm() > sup * (1.0 + 1e-12) {
            return Err(Error::InvalidSymmetricKernel(format!(
                "|h| reaches {} above declared sup {sup}",
                self.sup_norm()
            )));
        }
        self.declared_sup = Some(sup);
        Ok(self)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn eval(&self, idx: &[usize]) -> f64 {
        self.table[encode(idx, self.states)]
    }

    /// Exact `||h||_inf` over the finite space.
    pub fn sup_norm(&self) -> f64 {
        self.table.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        check_dim(self.table.len(), other.table.len())?;
        let table = self.table.iter().zip(other.table.iter()).map(|(x, y)| a * x + b * y).collect();
        Self::from_table(self.degree, self.states, table)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum ProjectionStore {
    Table(Vec<f64>),
    /// Partial integrals `g_t` for `t = 0..=m`, evaluated on demand.
    Lazy(Arc<Vec<Vec<f64>>>),
}

/// The Hoeffding projection `pi_{c,m} h`, a symmetric function of `c`
/// arguments.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedKernel {
    pub c: usize,
    pub degree: usize,
    states: usize,
    pub pi: Distribution,
    store: ProjectionStore,
}

impl ProjectedKernel {
    pub fn eval(&self, idx: &[usize]) -> f64 {
        debug_assert_eq!(idx.len(), self.c);
        match &self.store {
            ProjectionStore::Table(t) => t[encode(idx, self.states)],
            ProjectionStore::Lazy(g) => subset_expansion(g, idx, self.states),
        }
    }

    /// `pi^{(x) m} h` when `c = 0`.
    pub fn scalar(&self) -> Option<f64> {
        (self.c == 0).then(|| self.eval(&[]))
    }

    pub fn is_tabulated(&self) -> bool {
        matches!(self.store, ProjectionStore::Table(_))
    }

    pub fn states(&self) -> usize {
        self.states
    }

    /// `max |pi_{c,m} h|` over all `c`-tuples.
    pub fn max_abs(&self) -> f64 {
        match &self.store {
            ProjectionStore::Table(t) => t.iter().fold(0.0, |a, v| a.max(v.abs())),
            ProjectionStore::Lazy(_) => {
                let len = pow_u128(self.states, self.c) as usize;
                let mut idx = vec![0usize; self.c];
                (0..len).fold(0.0, |a, o| {
                    decode(o, self.states, &mut idx);
                    a.max(self.eval(&idx).abs())
                })
            }
        }
    }

    /// The projection as a standalone symmetric kernel (requires `c >= 1`).
    pub fn to_kernel(&self) -> Result<SymmetricKernelFn> {
        if self.c == 0 {
            return Err(Error::DomainError("degree-0 projection is a scalar".into()));
        }
        SymmetricKernelFn::from_fn(self.c, self.states, |idx| self.eval(idx))
    }
}

/// `sum_{T subset of positions} (-1)^{c-|T|} g_{|T|}(y_T)`.
fn subset_expansion(g: &[Vec<f64>], idx: &[usize], s: usize) -> f64 {
    let c = idx.len();
    let mut total = 0.0;
    let mut kept = Vec::with_capacity(c);
    for mask in 0u32..(1 << c) {
        kept.clear();
        kept.extend((0..c).filter(|&j| mask >> j & 1 == 1).map(|j| idx[j]));
        let sign = if (c - kept.len()).is_multiple_of(2) { 1.0 } else { -1.0 };
        total += sign * g[kept.len()][encode(&kept, s)];
    }
    total
}

/// Partial integrals `g_t(y_1..y_t) = int h(y_1..y_t, z_{t+1..m}) pi(dz)...`
/// for `t = 0..=m`; `g_m = h`, `g_0 = pi^{(x) m} h`.
fn partial_integrals(h: &SymmetricKernelFn, pi: &Distribution) -> Vec<Vec<f64>> {
    let s = h.states;
    let w = pi.weights();
    let mut g = vec![Vec::new(); h.degree + 1];
    g[h.degree] = h.table.as_ref().clone();
    for t in (0..h.degree).rev() {
        g[t] = g[t + 1].chunks(s).map(|row| row.iter().zip(w).map(|(v, p)| v * p).sum()).collect();
    }
    g
}

fn project_from(g: &Arc<Vec<Vec<f64>>>, c: usize, degree: usize, s: usize, pi: &Distribution) -> ProjectedKernel {
    let len = pow_u128(s, c);
    let store = if len <= PROJECTION_TABLE_LIMIT {
        let mut idx = vec![0usize; c];
        let table = (0..len as usize)
            .map(|o| {
                decode(o, s, &mut idx);
                subset_expansion(g, &idx, s)
            })
            .collect();
        ProjectionStore::Table(table)
    } else {
        ProjectionStore::Lazy(Arc::clone(g))
    };
    ProjectedKernel { c, degree, states: s, pi: pi.clone(), store }
}

/// `pi_{c,m} h = (delta_{y_1} - pi) (x) ... (x) (delta_{y_c} - pi) (x) pi^{(x)(m-c)} [h]`,
/// expanded over the `2^c` subsets of kept coordinates with memoized
/// partial integrals.
pub fn hoeffding_project(h: &SymmetricKernelFn, pi: &Distribution, c: usize) -> Result<ProjectedKernel> {
    check_dim(h.states, pi.len())?;
    if c > h.degree {
        return Err(Error::DomainError(format!("projection order {c} exceeds degree {}", h.degree)));
    }
    let g = Arc::new(partial_integrals(h, pi));
    Ok(project_from(&g, c, h.degree, h.states, pi))
}

/// All projections `pi_{c,m} h` for `c = 0..=m`, sharing one set of partial integrals.
pub fn hoeffding_decomposition(h: &SymmetricKernelFn, pi: &Distribution) -> Result<Vec<ProjectedKernel>> {
    check_dim(h.states, pi.len())?;
    let g = Arc::new(partial_integrals(h, pi));
    Ok((0..=h.degree).map(|c| project_from(&g, c, h.degree, h.states, pi)).collect())
}

/// The fully canonical part `pi_{m,m} h` as a degree-`m` kernel.
pub fn canonical_part(h: &SymmetricKernelFn, pi: &Distribution) -> Result<SymmetricKernelFn> {
    hoeffding_project(h, pi, h.degree)?.to_kernel()
}

/// Smallest `d` with `max |pi_{d,m} h| > EPS_DEG`, or `m + 1` when every
/// projection vanishes (`h = 0` `pi`-almost everywhere in each slice).
pub fn degeneracy_order(h: &SymmetricKernelFn, pi: &Distribution) -> Result<usize> {
    let parts = hoeffding_decomposition(h, pi)?;
    Ok(parts.iter().position(|p| p.max_abs() > EPS_DEG).unwrap_or(h.degree + 1))
}

fn check_budget(n: usize, m: usize, budget: u128) -> Result<()> {
    if n < m {
        return Err(Error::DegreeTooLarge { n, m });
    }
    let needed = binomial_u128(n as u64, m as u64).unwrap_or(u128::MAX);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok(())
}

/// Sum over `i_1 < ... < i_m` of `table[sum_j path[i_j] * S^(m-1-j)]`.
///
/// One block per first index; within a block combinations are visited in
/// lexicographic order and the table offset of the shared prefix is reused.
fn table_combination_sum(path: &[usize], m: usize, s: usize, table: &[f64]) -> f64 {
    let n = path.len();
    let strides: Vec<usize> = (0..m).map(|j| s.pow((m - 1 - j) as u32)).collect();
    let blocks = par::map_indexed(n + 1 - m, |first| {
        let base = path[first] * strides[0];
        if m == 1 {
            return table[base];
        }
        let mut pos: Vec<usize> = (0..m).map(|j| first + j).collect();
        let mut prefix = vec![0usize; m];
        prefix[1] = base;
        for j in 2..m {
            prefix[j] = prefix[j - 1] + path[pos[j - 1]] * strides[j - 1];
        }
        let last = m - 1;
        let mut sum = 0.0;
        loop {
            let head = prefix[last];
            for &y in &path[pos[last]..n] {
                sum += table[head + y * strides[last]];
            }
            // Advance the rightmost movable position below `last`.
            let mut j = last - 1;
            loop {
                if j == 0 {
                    return sum;
                }
                if pos[j] < n - (m - j) {
                    break;
                }
                j -= 1;
            }
            pos[j] += 1;
            for t in j + 1..m {
                pos[t] = pos[t - 1] + 1;
            }
            for t in j + 1..m {
                prefix[t] = prefix[t - 1] + path[pos[t - 1]] * strides[t - 1];
            }
        }
    });
    par::pairwise_sum(&blocks)
}

/// `U_{n,m}(h)` with the default enumeration budget.
pub fn u_statistic(traj: &Trajectory, h: &SymmetricKernelFn) -> Result<f64> {
    u_statistic_with_budget(&traj.values, h, DEFAULT_BUDGET)
}

pub fn u_statistic_with_budget(path: &[usize], h: &SymmetricKernelFn, budget: u128) -> Result<f64> {
    let (n, m) = (path.len(), h.degree);
    check_budget(n, m, budget)?;
    if let Some(&bad) = path.iter().find(|&&y| y >= h.states) {
        return Err(Error::DimensionMismatch { expected: h.states, actual: bad + 1 });
    }
    Ok(table_combination_sum(path, m, h.states, &h.table) / binomial_f64(n, m))
}

/// `U_{n,c}(pi_{c,m} h)`, with `U_{n,0}(f) = f`.
pub fn u_statistic_projected(path: &[usize], p: &ProjectedKernel, budget: u128) -> Result<f64> {
    if p.c == 0 {
        return Ok(p.eval(&[]));
    }
    let (n, c) = (path.len(), p.c);
    check_budget(n, c, budget)?;
    match &p.store {
        ProjectionStore::Table(t) => Ok(table_combination_sum(path, c, p.states, t) / binomial_f64(n, c)),
        ProjectionStore::Lazy(_) => {
            let f = |xs: &[usize]| p.eval(xs);
            u_statistic_values(path, c, budget, f)
        }
    }
}

/// U-statistic of arbitrary points (e.g. a sampler-backed trajectory).
pub fn u_statistic_values<T, F>(points: &[T], m: usize, budget: u128, h: F) -> Result<f64>
where
    T: Clone + Send + Sync,
    F: Fn(&[T]) -> f64 + Sync + Send,
{
    let n = points.len();
    if m == 0 {
        return Err(Error::DomainError("degree must be >= 1".into()));
    }
    check_budget(n, m, budget)?;
    let blocks = par::map_indexed(n + 1 - m, |first| {
        let mut pos: Vec<usize> = (0..m).map(|j| first + j).collect();
        let mut buf: Vec<T> = pos.iter().map(|&i| points[i].clone()).collect();
        let mut sum = 0.0;
        loop {
            sum += h(&buf);
            let mut j = m - 1;
            loop {
                if j == 0 {
                    return sum;
                }
                if pos[j] < n - (m - j) {
                    break;
                }
                j -= 1;
            }
            pos[j] += 1;
            for t in j + 1..m {
                pos[t] = pos[t - 1] + 1;
            }
            for t in j..m {
                buf[t] = points[pos[t]].clone();
            }
        }
    });
    Ok(par::pairwise_sum(&blocks) / binomial_f64(n, m))
}

/// `|U_{n,m}(h) - sum_c binom(m,c) U_{n,c}(pi_{c,m} h)|`.
pub fn verify_hoeffding(traj: &Trajectory, h: &SymmetricKernelFn, pi: &Distribution) -> Result<f64> {
    let u = u_statistic(traj, h)?;
    let parts = hoeffding_decomposition(h, pi)?;
    let mut recomposed = 0.0;
    for p in &parts {
        recomposed += binomial_f64(h.degree, p.c) * u_statistic_projected(&traj.values, p, DEFAULT_BUDGET)?;
    }
    Ok((u - recomposed).abs())
}

/// Running `U_{n,m}(h)` over a growing finite-state path.
///
/// Keeps, for each `c = 1..=m`, the tensor
/// `A_c(s_{c+1..m}) = sum_{i_1<..<i_c <= n} h(Y_{i_1},..,Y_{i_c}, s_{c+1..m})`.
/// Appending `y` updates `A_c += A_{c-1}(y, .)` from `c = m` down, which
/// costs `sum_c S^(m-c)` per step.
#[derive(Debug, Clone)]
pub struct IncrementalUStat {
    h: SymmetricKernelFn,
    acc: Vec<Vec<f64>>,
    n: usize,
}

impl IncrementalUStat {
    pub fn new(h: &SymmetricKernelFn) -> Self {
        let (m, s) = (h.degree, h.states);
        let acc = (0..=m).map(|c| if c == 0 { Vec::new() } else { vec![0.0; s.pow((m - c) as u32)] }).collect();
        Self { h: h.clone(), acc, n: 0 }
    }

    pub fn push(&mut self, y: usize) {
        let m = self.h.degree;
        let top = (self.n + 1).min(m);
        for c in (1..=top).rev() {
            let (lower, upper) = self.acc.split_at_mut(c);
            let src: &[f64] = if c == 1 { &self.h.table } else { &lower[c - 1] };
            let dst = &mut upper[0];
            let len = dst.len();
            for (d, v) in dst.iter_mut().zip(&src[y * len..(y + 1) * len]) {
                *d += v;
            }
        }
        self.n += 1;
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Current `U_{n,m}(h)`, or `None` while `n < m`.
    pub fn value(&self) -> Option<f64> {
        let m = self.h.degree;
        (self.n >= m).then(|| self.acc[m][0] / binomial_f64(self.n, m))
    }
}
