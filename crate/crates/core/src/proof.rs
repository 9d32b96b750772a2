//! Exact finite-space checks of the second-moment argument: gap indices of
//! ordered index tuples, joint and tilted laws as dense tensors, the vanishing
//! of canonical cross-moments under the tilted law, and the inequalities built
//! on it.

use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::bounds::{b_q, d_constant, lemma_constant, m_sup};
use crate::error::{Error, Result};
use crate::markov::{
    certify_rho, check_dim, identity, l1, matmul, stationary, ChainRng, Distribution, ErgodicityProfile,
    FiniteKernel,
};
use crate::par;
use crate::ustat::{binomial_u128, canonical_part, decode, degeneracy_order, SymmetricKernelFn};

/// Largest tensor [`joint_law`] will build.
pub const TENSOR_BUDGET: u128 = 10_000_000;

/// Absolute slack for floating-point comparisons of exact inequalities.
pub const INEQ_SLACK: f64 = 1e-12;

/// Tolerance for the vanishing cross-moment under the tilted law.
pub const KEY_IDENTITY_TOL: f64 = 1e-11;

/// Non-decreasing time indices `1 <= i_1 <= ... <= i_{2m} <= n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct OrderedTuple {
    indices: Vec<usize>,
}

impl OrderedTuple {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() || !indices.len().is_multiple_of(2) {
            return Err(Error::DomainError(format!("tuple length {} is not a positive even number", indices.len())));
        }
        if indices[0] == 0 || indices.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::DomainError(format!("{indices:?} is not non-decreasing in [1, n]")));
        }
        Ok(Self { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Half the length, i.e. the kernel degree.
    pub fn degree(&self) -> usize {
        self.indices.len() / 2
    }
}

/// Gap indices of an ordered tuple; `ell_star` is 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JIndices {
    pub j: Vec<usize>,
    pub j_star: usize,
    pub ell_star: usize,
}

/// `j_l = min(i_{2l-1} - i_{2l-2}, i_{2l} - i_{2l-1})` with `i_0 = 1`,
/// `j_star = max_l j_l`, and `ell_star` the first `l` attaining it.
pub fn j_indices(t: &OrderedTuple) -> JIndices {
    let i = &t.indices;
    let j: Vec<usize> = (0..t.degree())
        .map(|l| {
            let before = if l == 0 { 1 } else { i[2 * l - 1] };
            (i[2 * l] - before).min(i[2 * l + 1] - i[2 * l])
        })
        .collect();
    let j_star = *j.iter().max().expect("degree >= 1");
    let ell_star = j.iter().position(|&x| x == j_star).expect("max is attained") + 1;
    JIndices { j, j_star, ell_star }
}

/// A probability tensor over `S^arity`, first coordinate most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct JointLaw {
    arity: usize,
    states: usize,
    tensor: Vec<f64>,
}

impl JointLaw {
    /// The law of a single coordinate.
    pub fn from_distribution(d: &Distribution) -> Self {
        Self { arity: 1, states: d.len(), tensor: d.weights().to_vec() }
    }

    /// The point mass on the empty tuple.
    pub fn unit(states: usize) -> Self {
        Self { arity: 0, states, tensor: vec![1.0] }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn tensor(&self) -> &[f64] {
        &self.tensor
    }

    /// Independent coupling; coordinates of `self` come first.
    pub fn product(&self, other: &JointLaw) -> Result<JointLaw> {
        check_dim(self.states, other.states)?;
        check_tensor(self.states, self.arity + other.arity)?;
        let tensor = self.tensor.iter().flat_map(|a| other.tensor.iter().map(move |b| a * b)).collect();
        Ok(JointLaw { arity: self.arity + other.arity, states: self.states, tensor })
    }

    /// Sums out the last coordinate.
    pub fn marginalize_last(&self) -> JointLaw {
        if self.arity == 0 {
            return self.clone();
        }
        let tensor = self.tensor.chunks(self.states).map(|c| c.iter().sum()).collect();
        JointLaw { arity: self.arity - 1, states: self.states, tensor }
    }

    /// `E[f(y_1, ..., y_arity)]` by full contraction.
    pub fn expect(&self, mut f: impl FnMut(&[usize]) -> f64) -> f64 {
        let mut idx = vec![0usize; self.arity];
        let mut total = 0.0;
        for (offset, &w) in self.tensor.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            decode(offset, self.states, &mut idx);
            total += w * f(&idx);
        }
        total
    }

    /// L1 distance between two laws of the same shape.
    pub fn tv(&self, other: &JointLaw) -> Result<f64> {
        check_dim(self.tensor.len(), other.tensor.len())?;
        Ok(l1(&self.tensor, &other.tensor))
    }
}

fn check_tensor(states: usize, arity: usize) -> Result<()> {
    let needed = (states as u128).checked_pow(arity as u32).unwrap_or(u128::MAX);
    if needed > TENSOR_BUDGET {
        return Err(Error::BudgetExceeded { needed, budget: TENSOR_BUDGET });
    }
    Ok(())
}

/// `P^0, P^1, ..., P^horizon`.
pub(crate) struct PowerTable {
    size: usize,
    powers: Vec<Vec<f64>>,
}

impl PowerTable {
    pub(crate) fn new(kernel: &FiniteKernel, horizon: usize) -> Self {
        let s = kernel.size();
        let mut powers = Vec::with_capacity(horizon + 1);
        powers.push(identity(s));
        for k in 1..=horizon {
            let next = matmul(&powers[k - 1], kernel.matrix(), s);
            powers.push(next);
        }
        Self { size: s, powers }
    }

    fn get(&self, k: usize) -> &[f64] {
        &self.powers[k]
    }

    fn horizon(&self) -> usize {
        self.powers.len() - 1
    }

    /// Law of `(Y_{k_1}, ..., Y_{k_l})` with `Y_0 ~ mu`.
    pub(crate) fn joint_law(&self, mu: &[f64], ks: &[usize]) -> Result<JointLaw> {
        let s = self.size;
        check_dim(s, mu.len())?;
        if ks.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::DomainError(format!("times {ks:?} are not non-decreasing")));
        }
        if let Some(&last) = ks.last() {
            if last > self.horizon() {
                return Err(Error::DomainError(format!("time {last} beyond tabulated horizon {}", self.horizon())));
            }
        }
        check_tensor(s, ks.len())?;
        let mut tensor = vec![1.0];
        let mut prev_time = 0;
        for (step, &k) in ks.iter().enumerate() {
            let p = self.get(k - prev_time);
            let mut next = vec![0.0; tensor.len() * s];
            for (t, &w) in tensor.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let out = &mut next[t * s..(t + 1) * s];
                if step == 0 {
                    for (x, &mx) in mu.iter().enumerate() {
                        for (o, q) in out.iter_mut().zip(&p[x * s..(x + 1) * s]) {
                            *o += mx * q;
                        }
                    }
                } else {
                    let last = t % s;
                    for (o, q) in out.iter_mut().zip(&p[last * s..(last + 1) * s]) {
                        *o = w * q;
                    }
                }
            }
            tensor = next;
            prev_time = k;
        }
        Ok(JointLaw { arity: ks.len(), states: s, tensor })
    }
}

/// Exact law of `(Y_{k_1}, ..., Y_{k_l})` for the chain started at `Y_0 ~ mu`.
pub fn joint_law(mu: &Distribution, kernel: &FiniteKernel, ks: &[usize]) -> Result<JointLaw> {
    let horizon = ks.last().copied().unwrap_or(0);
    PowerTable::new(kernel, horizon).joint_law(mu.weights(), ks)
}

/// The law with the coordinate `2 ell_star - 1` replaced by an independent
/// stationary draw: `P^{i_1..i_{2l-2}} (x) pi (x) P^{i_{2l}..i_{2m}}`.
pub fn tilde_law(mu: &Distribution, kernel: &FiniteKernel, pi: &Distribution, t: &OrderedTuple) -> Result<JointLaw> {
    let table = PowerTable::new(kernel, *t.indices.last().expect("non-empty"));
    tilde_from(&table, mu, pi, t)
}

fn tilde_from(table: &PowerTable, mu: &Distribution, pi: &Distribution, t: &OrderedTuple) -> Result<JointLaw> {
    let l = j_indices(t).ell_star;
    let prefix = table.joint_law(mu.weights(), &t.indices[..2 * l - 2])?;
    let suffix = table.joint_law(mu.weights(), &t.indices[2 * l - 1..])?;
    prefix.product(&JointLaw::from_distribution(pi))?.product(&suffix)
}

/// `E[h(y_{s(0..m)}) h(y_{s(m..2m)})]` under `law`, with `sigma` a
/// 0-based permutation of `0..2m`.
pub fn f_sigma_expectation(law: &JointLaw, h: &SymmetricKernelFn, sigma: &[usize]) -> Result<f64> {
    let m = h.degree();
    check_dim(2 * m, law.arity())?;
    check_dim(2 * m, sigma.len())?;
    check_dim(h.states(), law.states())?;
    let mut seen = vec![false; 2 * m];
    for &x in sigma {
        if x >= 2 * m || std::mem::replace(&mut seen[x], true) {
            return Err(Error::DomainError(format!("{sigma:?} is not a permutation")));
        }
    }
    let mut a = vec![0usize; m];
    let mut b = vec![0usize; m];
    Ok(law.expect(|y| {
        for k in 0..m {
            a[k] = y[sigma[k]];
            b[k] = y[sigma[m + k]];
        }
        h.eval(&a) * h.eval(&b)
    }))
}

/// All permutations of `0..k` in lexicographic order.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (0..k).collect();
    let mut out = vec![current.clone()];
    loop {
        let Some(i) = (1..k).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..k).rev().find(|&j| current[j] > current[i - 1]).expect("successor exists");
        current.swap(i - 1, j);
        current[i..].reverse();
        out.push(current.clone());
    }
}

/// All non-decreasing tuples of length `len` with entries in `1..=n`.
pub fn ordered_tuples(n: usize, len: usize) -> Vec<OrderedTuple> {
    let mut out = Vec::new();
    if n == 0 || len == 0 {
        return out;
    }
    let mut cur = vec![1usize; len];
    loop {
        out.push(OrderedTuple { indices: cur.clone() });
        let Some(pos) = (0..len).rev().find(|&p| cur[p] < n) else {
            return out;
        };
        let v = cur[pos] + 1;
        cur[pos..].fill(v);
    }
}

/// Precomputed chain data shared by the per-tuple checks.
pub struct ProofContext {
    pub kernel: FiniteKernel,
    pub mu: Distribution,
    pub pi: Distribution,
    pub profile: ErgodicityProfile,
    /// `M(mu, V)`.
    pub m_sup: f64,
    table: PowerTable,
}

impl ProofContext {
    /// Supports tuples with entries up to `horizon`.
    pub fn new(kernel: FiniteKernel, mu: Distribution, profile: ErgodicityProfile, horizon: usize) -> Result<Self> {
        check_dim(kernel.size(), mu.len())?;
        let pi = stationary(&kernel)?;
        let m_sup = m_sup(&mu, &profile, &kernel)?;
        let table = PowerTable::new(&kernel, horizon);
        Ok(Self { kernel, mu, pi, profile, m_sup, table })
    }

    pub fn joint_law(&self, ks: &[usize]) -> Result<JointLaw> {
        self.table.joint_law(self.mu.weights(), ks)
    }

    pub fn tilde_law(&self, t: &OrderedTuple) -> Result<JointLaw> {
        tilde_from(&self.table, &self.mu, &self.pi, t)
    }

    /// Exact `||P^I - P~^I||` and `4 rho(j_star) M(mu, V)`.
    pub fn verify_prop5(&self, t: &OrderedTuple) -> Result<(f64, f64)> {
        let tv = self.joint_law(&t.indices)?.tv(&self.tilde_law(t)?)?;
        Ok((tv, self.prop5_bound(t)))
    }

    fn prop5_bound(&self, t: &OrderedTuple) -> f64 {
        4.0 * self.profile.rho(j_indices(t).j_star) * self.m_sup
    }

    /// `|E f_sigma(Y_I)|` with the bounded-kernel bound and, for `p > 0`,
    /// the envelope bound `m^2 D^2 rho(j_star)^{p/(p+1)}`.
    pub fn verify_prop7(
        &self,
        h: &SymmetricKernelFn,
        t: &OrderedTuple,
        sigma: &[usize],
        p: Option<f64>,
    ) -> Result<Prop7Check> {
        let m = h.degree();
        check_dim(2 * m, t.indices.len())?;
        let d = degeneracy_order(h, &self.pi)?;
        if d < m {
            return Err(Error::NotCanonical { degeneracy: d, degree: m });
        }
        let lhs = f_sigma_expectation(&self.joint_law(&t.indices)?, h, sigma)?.abs();
        let sup = h.sup_norm();
        let bound1 = self.prop5_bound(t) * sup * sup;
        let bound2 = match p {
            Some(p) => Some(self.prop7_envelope(h, p)? * self.profile.rho(j_indices(t).j_star).powf(p / (p + 1.0))),
            None => None,
        };
        Ok(Prop7Check { lhs, bound1, bound2 })
    }

    /// `m^2 D(p, mu, V, h)^2`.
    fn prop7_envelope(&self, h: &SymmetricKernelFn, p: f64) -> Result<f64> {
        lemma_constant(p)?;
        let b = b_q(h, &self.profile, 2.0 * (p + 1.0))?;
        let d = d_constant(p, self.m_sup, b)?;
        Ok((h.degree() * h.degree()) as f64 * d * d)
    }
}

/// Outcome of one cross-moment check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prop7Check {
    pub lhs: f64,
    pub bound1: f64,
    pub bound2: Option<f64>,
}

/// `|xi(f) - xi'(f)|` and `C(p) [xi|f|^{1+p} + xi'|f|^{1+p}]^{1/(p+1)} ||xi - xi'||^{p/(p+1)}`.
pub fn verify_lemma6(xi: &Distribution, xi2: &Distribution, f: &[f64], p: f64) -> Result<(f64, f64)> {
    let c = lemma_constant(p)?;
    check_dim(xi.len(), xi2.len())?;
    check_dim(xi.len(), f.len())?;
    let lhs = (xi.expect(f) - xi2.expect(f)).abs();
    let moments: Vec<f64> = f.iter().map(|x| x.abs().powf(1.0 + p)).collect();
    let tv = l1(xi.weights(), xi2.weights());
    let rhs = c * (xi.expect(&moments) + xi2.expect(&moments)).powf(1.0 / (p + 1.0)) * tv.powf(p / (p + 1.0));
    Ok((lhs, rhs))
}

/// `|{I ordered 2m-tuple in [1, n] : j_star(I) = k}|`.
pub fn count_tuples(n: usize, m: usize, k: usize) -> Result<u64> {
    Ok(count_histogram(n, m)?.get(k).copied().unwrap_or(0))
}

/// Counts of ordered `2m`-tuples in `[1, n]` bucketed by `j_star`.
pub fn count_histogram(n: usize, m: usize) -> Result<Vec<u64>> {
    if m == 0 {
        return Err(Error::DomainError("m must be >= 1".into()));
    }
    let needed = binomial_u128((n + 2 * m).saturating_sub(1) as u64, (2 * m) as u64).unwrap_or(u128::MAX);
    if needed > crate::ustat::DEFAULT_BUDGET {
        return Err(Error::BudgetExceeded { needed, budget: crate::ustat::DEFAULT_BUDGET });
    }
    let mut hist = vec![0u64; n.max(1)];
    for t in ordered_tuples(n, 2 * m) {
        hist[j_indices(&t).j_star] += 1;
    }
    Ok(hist)
}

/// `2^m n^m (k+1)^m`.
pub fn count_bound(n: usize, m: usize, k: usize) -> f64 {
    (2.0 * n as f64 * (k + 1) as f64).powi(m as i32)
}

/// Grid for the exhaustive proposition checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct PropositionGrid {
    /// Number of random chains.
    pub chains: usize,
    pub states: usize,
    pub m: usize,
    /// Largest time index `i_{2m}`.
    pub n: usize,
    /// Exponents for the envelope bound.
    pub p_values: Vec<f64>,
    pub lemma6_instances: usize,
    pub lemma6_points: usize,
    pub lemma6_p: Vec<f64>,
    pub counting_n_max: usize,
    pub counting_m: Vec<usize>,
    pub seed: u64,
}

impl Default for PropositionGrid {
    fn default() -> Self {
        Self {
            chains: 3,
            states: 3,
            m: 2,
            n: 8,
            p_values: vec![0.5, 1.0],
            lemma6_instances: 1000,
            lemma6_points: 10,
            lemma6_p: vec![0.5, 1.0, 2.0],
            counting_n_max: 10,
            counting_m: vec![1, 2],
            seed: 20_240_601,
        }
    }
}

/// Aggregate of one inequality over a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckStats {
    pub name: String,
    pub instances: u64,
    pub violations: u64,
    /// Largest `lhs / bound` (for the identity, `|value| / tolerance`).
    pub max_ratio: f64,
    pub max_lhs: f64,
    pub worst_case_tuple: Option<Vec<usize>>,
    pub worst_case_detail: Option<String>,
}

impl CheckStats {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            instances: 0,
            violations: 0,
            max_ratio: 0.0,
            max_lhs: 0.0,
            worst_case_tuple: None,
            worst_case_detail: None,
        }
    }

    /// Records `lhs <= bound` (up to [`INEQ_SLACK`]).
    fn record(&mut self, lhs: f64, bound: f64, tuple: &[usize], detail: impl FnOnce() -> String) {
        self.instances += 1;
        let violated = !(lhs <= bound + INEQ_SLACK * (1.0 + bound.abs()));
        if violated {
            self.violations += 1;
        }
        let ratio = if bound > 0.0 {
            lhs / bound
        } else if lhs <= INEQ_SLACK {
            0.0
        } else {
            f64::INFINITY
        };
        self.max_lhs = self.max_lhs.max(lhs);
        if self.worst_case_tuple.is_none() || ratio > self.max_ratio {
            self.max_ratio = self.max_ratio.max(ratio);
            self.worst_case_tuple = Some(tuple.to_vec());
            self.worst_case_detail = Some(detail());
        }
    }

    fn merge(&mut self, other: CheckStats) {
        self.instances += other.instances;
        self.violations += other.violations;
        self.max_lhs = self.max_lhs.max(other.max_lhs);
        if other.max_ratio > self.max_ratio || self.worst_case_tuple.is_none() {
            self.max_ratio = self.max_ratio.max(other.max_ratio);
            self.worst_case_tuple = other.worst_case_tuple;
            self.worst_case_detail = other.worst_case_detail;
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Results of [`run_proposition_checks`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropositionReport {
    pub grid: PropositionGrid,
    pub checks: Vec<CheckStats>,
}

impl PropositionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckStats::passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckStats> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Random primitive kernel with rows bounded away from zero.
pub fn random_kernel<R: Rng + ?Sized>(states: usize, rng: &mut R) -> Result<FiniteKernel> {
    let rows = (0..states)
        .map(|_| {
            let w: Vec<f64> = (0..states).map(|_| 0.05 + rng.random::<f64>()).collect();
            let total: f64 = w.iter().sum();
            w.into_iter().map(|x| x / total).collect()
        })
        .collect();
    FiniteKernel::from_rows(rows)
}

fn random_distribution<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Result<Distribution> {
    Distribution::normalized((0..len).map(|_| rng.random::<f64>().powi(3)).collect())
}

struct ChainCase {
    ctx: ProofContext,
    h: SymmetricKernelFn,
    envelopes: Vec<(f64, f64)>,
}

fn chain_case(grid: &PropositionGrid, rng: &mut ChainRng) -> Result<ChainCase> {
    let kernel = random_kernel(grid.states, rng)?;
    let mu = random_distribution(grid.states, rng)?;
    let v: Vec<f64> = (0..grid.states).map(|_| 1.0 + 2.0 * rng.random::<f64>()).collect();
    let profile = certify_rho(&kernel, &v, grid.n.max(1) * 4)?;
    let ctx = ProofContext::new(kernel, mu, profile, grid.n)?;
    let h = canonical_part(&SymmetricKernelFn::random(grid.m, grid.states, rng)?, &ctx.pi)?;
    let envelopes = grid
        .p_values
        .iter()
        .map(|&p| Ok((p, ctx.prop7_envelope(&h, p)?)))
        .collect::<Result<_>>()?;
    Ok(ChainCase { ctx, h, envelopes })
}

const KEY: &str = "key-identity";
const PROP5: &str = "tv-tilted";
const PROP7_BOUNDED: &str = "cross-moment-bounded";
const LEMMA6: &str = "moment-tv-interpolation";
const COUNTING: &str = "tuple-counting";

fn prop7_envelope_name(p: f64) -> String {
    format!("cross-moment-envelope-p{p}")
}

fn check_tuple(case: &ChainCase, chain: usize, t: &OrderedTuple, perms: &[Vec<usize>]) -> Result<Vec<CheckStats>> {
    let ctx = &case.ctx;
    let law = ctx.joint_law(&t.indices)?;
    let tilde = ctx.tilde_law(t)?;
    let js = j_indices(t);
    let rho = ctx.profile.rho(js.j_star);
    let sup = case.h.sup_norm();
    let describe = |what: &str| format!("chain {chain}, {what}, j_star {}, ell_star {}", js.j_star, js.ell_star);

    let mut key = CheckStats::new(KEY);
    let mut prop5 = CheckStats::new(PROP5);
    let mut bounded = CheckStats::new(PROP7_BOUNDED);
    let mut envelope: Vec<CheckStats> = case.envelopes.iter().map(|(p, _)| CheckStats::new(&prop7_envelope_name(*p))).collect();

    let tv = law.tv(&tilde)?;
    prop5.record(tv, 4.0 * rho * ctx.m_sup, &t.indices, || describe("tv"));
    for sigma in perms {
        let tilted = f_sigma_expectation(&tilde, &case.h, sigma)?.abs();
        key.record(tilted, KEY_IDENTITY_TOL, &t.indices, || describe(&format!("sigma {sigma:?}")));
        let lhs = f_sigma_expectation(&law, &case.h, sigma)?.abs();
        bounded.record(lhs, 4.0 * ctx.m_sup * rho * sup * sup, &t.indices, || describe(&format!("sigma {sigma:?}")));
        for (stats, (p, env)) in envelope.iter_mut().zip(&case.envelopes) {
            stats.record(lhs, env * rho.powf(p / (p + 1.0)), &t.indices, || describe(&format!("sigma {sigma:?}")));
        }
    }
    let mut out = vec![key, prop5, bounded];
    out.extend(envelope);
    Ok(out)
}

fn lemma6_checks(grid: &PropositionGrid, rng: &mut ChainRng) -> Result<CheckStats> {
    let mut stats = CheckStats::new(LEMMA6);
    if grid.lemma6_p.is_empty() {
        return Ok(stats);
    }
    for i in 0..grid.lemma6_instances {
        let p = grid.lemma6_p[i % grid.lemma6_p.len()];
        let xi = random_distribution(grid.lemma6_points, rng)?;
        let xi2 = random_distribution(grid.lemma6_points, rng)?;
        let f: Vec<f64> = (0..grid.lemma6_points)
            .map(|_| {
                let z: f64 = rng.sample(StandardNormal);
                z * 10f64.powf(rng.random_range(-2.0..2.0))
            })
            .collect();
        let (lhs, rhs) = verify_lemma6(&xi, &xi2, &f, p)?;
        stats.record(lhs, rhs, &[i], || format!("instance {i}, p {p}"));
    }
    Ok(stats)
}

fn counting_checks(grid: &PropositionGrid) -> Result<CheckStats> {
    let mut stats = CheckStats::new(COUNTING);
    for &m in &grid.counting_m {
        for n in 1..=grid.counting_n_max {
            let hist = count_histogram(n, m)?;
            let total: u64 = hist.iter().sum();
            let expected = binomial_u128((n + 2 * m - 1) as u64, (2 * m) as u64).expect("small");
            if total as u128 != expected {
                stats.violations += 1;
                stats.worst_case_tuple = Some(vec![n, m]);
                stats.worst_case_detail = Some(format!("n {n}, m {m}: total {total} != {expected}"));
            }
            for k in 0..=n {
                let count = hist.get(k).copied().unwrap_or(0) as f64;
                stats.record(count, count_bound(n, m, k), &[n, m, k], || format!("n {n}, m {m}, k {k}"));
            }
        }
    }
    Ok(stats)
}

/// Exhaustive checks over all ordered `2m`-tuples with `i_{2m} <= n`, every
/// permutation, on random chains with random canonical kernels; plus the
/// randomized interpolation inequality and the tuple-counting bound.
pub fn run_proposition_checks(grid: &PropositionGrid) -> Result<PropositionReport> {
    if grid.m == 0 || grid.n < 1 || grid.states < 2 {
        return Err(Error::Config("grid needs m >= 1, n >= 1 and at least 2 states".into()));
    }
    let mut rng = ChainRng::seed_from_u64(grid.seed);
    let perms = permutations(2 * grid.m);
    let tuples = ordered_tuples(grid.n, 2 * grid.m);
    let mut totals: Vec<CheckStats> = Vec::new();
    for chain in 0..grid.chains {
        let case = chain_case(grid, &mut rng)?;
        let results = par::map_slice(&tuples, |t| check_tuple(&case, chain, t, &perms));
        for r in results {
            let stats = r?;
            if totals.is_empty() {
                totals = stats.iter().map(|s| CheckStats::new(&s.name)).collect();
            }
            for (acc, s) in totals.iter_mut().zip(stats) {
                acc.merge(s);
            }
        }
    }
    totals.push(lemma6_checks(grid, &mut rng)?);
    totals.push(counting_checks(grid)?);
    Ok(PropositionReport { grid: grid.clone(), checks: totals })
}
