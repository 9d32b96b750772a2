//! Finite-state Markov kernels, exact distribution evolution, stationary
//! laws, total variation, and ergodicity profiles `(V, rho)`.
//!
//! Total variation follows the convention `sup_{|f| <= 1} |mu(f) - nu(f)|`,
//! which on a finite space is the L1 distance and ranges over `[0, 2]`.
//!
//! Trajectories index time from an unobserved `Y_0 ~ mu`, so the observed
//! values `Y_1, ..., Y_n` satisfy `Y_i ~ mu P^i`, matching the joint laws
//! built in [`crate::proof`].

use nalgebra::{DMatrix, DVector};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution as _;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on row sums and on the total mass of a distribution.
pub const MASS_TOL: f64 = 1e-12;

/// Generator used for every simulated path.
pub type ChainRng = ChaCha8Rng;

/// Relative level below which certified rates are rounding noise.
const RHO_NOISE_FLOOR: f64 = 1e-8;

/// Row-stochastic transition matrix on `S` labelled states.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteKernel {
    states: Vec<f64>,
    matrix: Vec<f64>,
    size: usize,
}

impl FiniteKernel {
    pub fn new(states: Vec<f64>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let size = rows.len();
        if size == 0 {
            return Err(Error::InvalidKernel("state space is empty".into()));
        }
        if states.len() != size {
            return Err(Error::DimensionMismatch { expected: size, actual: states.len() });
        }
        let mut matrix = Vec::with_capacity(size * size);
        for (x, row) in rows.iter().enumerate() {
            if row.len() != size {
                return Err(Error::DimensionMismatch { expected: size, actual: row.len() });
            }
            if let Some(bad) = row.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
                return Err(Error::InvalidKernel(format!("row {x} has entry {bad}")));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > MASS_TOL {
                return Err(Error::InvalidKernel(format!("row {x} sums to {total}")));
            }
            matrix.extend_from_slice(row);
        }
        Ok(Self { states, matrix, size })
    }

    /// Kernel whose state labels are `0, 1, ..., S-1`.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let states = (0..rows.len()).map(|i| i as f64).collect();
        Self::new(states, rows)
    }

    /// The chain `[[1-a, a], [b, 1-b]]` on the given two labels.
    pub fn two_state(a: f64, b: f64, labels: [f64; 2]) -> Result<Self> {
        Self::new(labels.to_vec(), vec![vec![1.0 - a, a], vec![b, 1.0 - b]])
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn states(&self) -> &[f64] {
        &self.states
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.matrix[x * self.size..(x + 1) * self.size]
    }

    pub fn entry(&self, x: usize, y: usize) -> f64 {
        self.matrix[x * self.size + y]
    }

    /// Row-major copy of the matrix.
    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    /// `mu P` for a weight vector.
    pub fn step_weights(&self, mu: &[f64]) -> Vec<f64> {
        let s = self.size;
        let mut out = vec![0.0; s];
        for (x, &w) in mu.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for (o, p) in out.iter_mut().zip(self.row(x)) {
                *o += w * p;
            }
        }
        out
    }

    /// `P^k` as a row-major matrix; `P^0` is the identity.
    pub fn power(&self, k: usize) -> Vec<f64> {
        let s = self.size;
        let mut acc = identity(s);
        for _ in 0..k {
            acc = matmul(&acc, &self.matrix, s);
        }
        acc
    }

    /// Primitivity test: some power `P^k` with `k <= S^2` is strictly positive.
    ///
    /// By Wielandt's bound it suffices to look at `k = (S-1)^2 + 1`.
    pub fn is_primitive(&self) -> bool {
        let s = self.size;
        let pattern = BoolMatrix::from_support(&self.matrix, s);
        let k = (s - 1) * (s - 1) + 1;
        pattern.pow(k).is_full()
    }
}

pub(crate) fn identity(s: usize) -> Vec<f64> {
    let mut m = vec![0.0; s * s];
    for i in 0..s {
        m[i * s + i] = 1.0;
    }
    m
}

pub(crate) fn matmul(a: &[f64], b: &[f64], s: usize) -> Vec<f64> {
    let mut out = vec![0.0; s * s];
    for i in 0..s {
        for k in 0..s {
            let aik = a[i * s + k];
            if aik == 0.0 {
                continue;
            }
            let brow = &b[k * s..(k + 1) * s];
            let orow = &mut out[i * s..(i + 1) * s];
            for (o, bkj) in orow.iter_mut().zip(brow) {
                *o += aik * bkj;
            }
        }
    }
    out
}

/// Support pattern of a square matrix, one bitset per row.
struct BoolMatrix {
    rows: Vec<Vec<u64>>,
    size: usize,
}

impl BoolMatrix {
    fn words(size: usize) -> usize {
        size.div_ceil(64)
    }

    fn from_support(matrix: &[f64], size: usize) -> Self {
        let mut rows = vec![vec![0u64; Self::words(size)]; size];
        for (x, row) in rows.iter_mut().enumerate() {
            for y in 0..size {
                if matrix[x * size + y] > 0.0 {
                    row[y / 64] |= 1 << (y % 64);
                }
            }
        }
        Self { rows, size }
    }

    fn identity(size: usize) -> Self {
        let mut rows = vec![vec![0u64; Self::words(size)]; size];
        for (x, row) in rows.iter_mut().enumerate() {
            row[x / 64] |= 1 << (x % 64);
        }
        Self { rows, size }
    }

    fn mul(&self, other: &Self) -> Self {
        let words = Self::words(self.size);
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut out = vec![0u64; words];
                for j in 0..self.size {
                    if row[j / 64] >> (j % 64) & 1 == 1 {
                        for (o, b) in out.iter_mut().zip(&other.rows[j]) {
                            *o |= b;
                        }
                    }
                }
                out
            })
            .collect();
        Self { rows, size: self.size }
    }

    fn pow(&self, mut k: usize) -> Self {
        let mut base = Self { rows: self.rows.clone(), size: self.size };
        let mut acc = Self::identity(self.size);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    fn is_full(&self) -> bool {
        let s = self.size;
        self.rows.iter().all(|row| {
            (0..s).all(|j| row[j / 64] >> (j % 64) & 1 == 1)
        })
    }
}

/// Probability vector over the states of a finite kernel.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Distribution {
    weights: Vec<f64>,
}

impl Distribution {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDistribution("no states".into()));
        }
        if let Some(bad) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidDistribution(format!("weight {bad}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidDistribution(format!("weights sum to {total}")));
        }
        Ok(Self { weights })
    }

    /// Normalizes nonnegative weights to unit mass.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidDistribution(format!("total mass {total}")));
        }
        Self::new(weights.into_iter().map(|w| w / total).collect())
    }

    pub fn dirac(size: usize, x: usize) -> Self {
        let mut weights = vec![0.0; size];
        weights[x] = 1.0;
        Self { weights }
    }

    pub fn uniform(size: usize) -> Self {
        Self { weights: vec![1.0 / size as f64; size] }
    }

    /// Wraps weights produced by exact kernel arithmetic (mass already ~1).
    pub(crate) fn from_evolved(weights: Vec<f64>) -> Self {
        Self { weights }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `mu(f)` for a function given by its values on the states.
    pub fn expect(&self, f: &[f64]) -> f64 {
        self.weights.iter().zip(f).map(|(w, v)| w * v).sum()
    }

    fn sampler(&self) -> WeightedIndex<f64> {
        WeightedIndex::new(&self.weights).expect("distribution has positive mass")
    }
}

/// Stationary distribution of an irreducible aperiodic kernel.
///
/// Solves `(P^T - I) pi = 0` with one equation replaced by `sum(pi) = 1`;
/// chains with more than 2000 states use power iteration instead.
pub fn stationary(kernel: &FiniteKernel) -> Result<Distribution> {
    if !kernel.is_primitive() {
        return Err(Error::NotErgodic(format!(
            "no strictly positive power P^k with k <= {}",
            kernel.size() * kernel.size()
        )));
    }
    let s = kernel.size();
    let mut pi = if s > 2000 { power_iteration(kernel) } else { direct_solve(kernel)? };
    for w in pi.iter_mut() {
        if *w < 0.0 {
            *w = 0.0;
        }
    }
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|w| *w /= total);
    for _ in 0..8 {
        if residual(kernel, &pi) <= MASS_TOL {
            break;
        }
        pi = kernel.step_weights(&pi);
    }
    Ok(Distribution::from_evolved(pi))
}

fn residual(kernel: &FiniteKernel, pi: &[f64]) -> f64 {
    kernel.step_weights(pi).iter().zip(pi).map(|(a, b)| (a - b).abs()).sum()
}

fn direct_solve(kernel: &FiniteKernel) -> Result<Vec<f64>> {
    let s = kernel.size();
    let mut a = DMatrix::<f64>::zeros(s, s);
    for i in 0..s {
        for j in 0..s {
            a[(i, j)] = kernel.entry(j, i) - if i == j { 1.0 } else { 0.0 };
        }
    }
    for j in 0..s {
        a[(s - 1, j)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(s);
    rhs[s - 1] = 1.0;
    a.lu()
        .solve(&rhs)
        .map(|v| v.iter().copied().collect())
        .ok_or_else(|| Error::NotErgodic("singular stationary system".into()))
}

fn power_iteration(kernel: &FiniteKernel) -> Vec<f64> {
    let s = kernel.size();
    let mut pi = vec![1.0 / s as f64; s];
    for _ in 0..100_000 {
        let next = kernel.step_weights(&pi);
        let diff: f64 = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
        pi = next;
        if diff <= 1e-14 {
            break;
        }
    }
    pi
}

/// `mu P^k` by repeated vector-matrix products.
pub fn evolve(mu: &Distribution, kernel: &FiniteKernel, k: usize) -> Result<Distribution> {
    check_dim(kernel.size(), mu.len())?;
    let mut w = mu.weights().to_vec();
    for _ in 0..k {
        w = kernel.step_weights(&w);
    }
    Ok(Distribution::from_evolved(w))
}

/// Total variation distance, L1 convention (range `[0, 2]`).
pub fn tv_distance(mu: &Distribution, nu: &Distribution) -> Result<f64> {
    check_dim(mu.len(), nu.len())?;
    Ok(l1(mu.weights(), nu.weights()))
}

pub(crate) fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

pub(crate) fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

/// Where an ergodicity profile came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Computed exactly from a finite kernel.
    Certified,
    /// Supplied by the user; not checkable.
    Declared,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Certified => "certified",
            Provenance::Declared => "declared",
        }
    }
}

/// The rate sequence `rho(k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum Rho {
    /// Tabulated `rho(0..len)`, continued by `rho(last) * tail_ratio^(k - last)`.
    Explicit { values: Vec<f64>, tail_ratio: f64 },
    /// `rho(k) = c * varrho^k`.
    Geometric { c: f64, varrho: f64 },
}

/// Drift constants `PV <= lambda V + b`, kept as provenance only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct DriftConstants {
    pub lambda: f64,
    pub b: f64,
}

/// The pair `(V, rho)` controlling V-weighted convergence in total variation:
/// `TV(mu P^k, mu' P^k) <= rho(k) (mu(V) + mu'(V))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct ErgodicityProfile {
    pub provenance: Provenance,
    /// `V` on each state; empty for sampler-backed chains.
    pub v: Vec<f64>,
    pub rho: Rho,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drift: Option<DriftConstants>,
    /// User-supplied `M(mu, V)` for chains where it cannot be computed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared_m: Option<f64>,
}

impl ErgodicityProfile {
    pub fn declared(v: Vec<f64>, rho: Rho) -> Result<Self> {
        let profile = Self { provenance: Provenance::Declared, v, rho, drift: None, declared_m: None };
        profile.validate()?;
        Ok(profile)
    }

    pub fn with_declared_m(mut self, m: f64) -> Self {
        self.declared_m = Some(m);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(bad) = self.v.iter().find(|v| !(v.is_finite() && **v >= 1.0)) {
            return Err(Error::InvalidProfile(format!("V value {bad} < 1")));
        }
        match &self.rho {
            Rho::Explicit { values, tail_ratio } => {
                if values.is_empty() {
                    return Err(Error::InvalidProfile("empty rho sequence".into()));
                }
                if values.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
                    return Err(Error::InvalidProfile("rho must be finite and nonnegative".into()));
                }
                if values.windows(2).any(|w| w[1] > w[0]) {
                    return Err(Error::InvalidProfile("rho must be non-increasing".into()));
                }
                let last = *values.last().unwrap_or(&0.0);
                if !(0.0..1.0).contains(tail_ratio) && last > 0.0 {
                    return Err(Error::InvalidProfile(format!(
                        "tail ratio {tail_ratio} does not drive rho to 0"
                    )));
                }
            }
            Rho::Geometric { c, varrho } => {
                if !(*c > 0.0 && c.is_finite()) {
                    return Err(Error::InvalidProfile(format!("c = {c} must be > 0")));
                }
                if !(*varrho > 0.0 && *varrho < 1.0) {
                    return Err(Error::InvalidProfile(format!("varrho = {varrho} not in (0,1)")));
                }
            }
        }
        if let Some(m) = self.declared_m {
            if !(m.is_finite() && m >= 1.0) {
                return Err(Error::InvalidProfile(format!("declared M = {m} must be >= 1")));
            }
        }
        Ok(())
    }

    pub fn rho(&self, k: usize) -> f64 {
        match &self.rho {
            Rho::Explicit { values, tail_ratio } => {
                let last = values.len() - 1;
                if k <= last {
                    values[k]
                } else if values[last] == 0.0 {
                    0.0
                } else {
                    values[last] * tail_ratio.powi((k - last).min(i32::MAX as usize) as i32)
                }
            }
            Rho::Geometric { c, varrho } => c * varrho.powi(k.min(i32::MAX as usize) as i32),
        }
    }

    /// True when `rho(k)` comes from the extrapolated tail of a tabulated
    /// sequence rather than an exact value.
    pub fn is_estimated(&self, k: usize) -> bool {
        match &self.rho {
            Rho::Explicit { values, .. } => k >= values.len() && *values.last().unwrap() > 0.0,
            Rho::Geometric { .. } => false,
        }
    }

    /// Largest `k` with an exact tabulated value, if the sequence is tabulated.
    pub fn tabulated_horizon(&self) -> Option<usize> {
        match &self.rho {
            Rho::Explicit { values, .. } => Some(values.len() - 1),
            Rho::Geometric { .. } => None,
        }
    }
}

/// Minimal rate sequence of a finite chain for a given `V`:
/// `rho(k) = max_{x, x'} TV(P^k(x, .), P^k(x', .)) / (V(x) + V(x'))`.
///
/// Dirac pairs are extreme: for `mu = sum a_x delta_x`, `mu' = sum b_x' delta_x'`
/// the difference `(mu - mu') P^k` is the mixture `sum a_x b_x' (delta_x - delta_x') P^k`,
/// so the bound extends to all pairs of initial laws. Past `k_max` the
/// sequence continues geometrically with the last one-step ratio above the rounding floor.
pub fn certify_rho(kernel: &FiniteKernel, v: &[f64], k_max: usize) -> Result<ErgodicityProfile> {
    let s = kernel.size();
    check_dim(s, v.len())?;
    if let Some(bad) = v.iter().find(|x| !(x.is_finite() && **x >= 1.0)) {
        return Err(Error::InvalidProfile(format!("V value {bad} < 1")));
    }
    let mut values = Vec::with_capacity(k_max + 1);
    let mut pk = identity(s);
    for k in 0..=k_max {
        if k > 0 {
            pk = matmul(&pk, kernel.matrix(), s);
        }
        let mut worst: f64 = 0.0;
        for x in 0..s {
            for y in x + 1..s {
                let tv = l1(&pk[x * s..(x + 1) * s], &pk[y * s..(y + 1) * s]);
                worst = worst.max(tv / (v[x] + v[y]));
            }
        }
        values.push(worst);
    }
    // Pairwise TV contracts under P, so the exact sequence is monotone; lift
    // earlier entries over any rounding bumps to keep every entry an upper bound.
    for k in (0..k_max).rev() {
        if values[k] < values[k + 1] {
            values[k] = values[k + 1];
        }
    }
    let first = values[0];
    let last = values[k_max];
    if s > 1 && last >= first * (1.0 - 1e-9) {
        return Err(Error::NotErgodic(format!(
            "rho({k_max}) = {last} has not decayed from rho(0) = {first}"
        )));
    }
    // Entries at rounding level carry no decay information, so the tail ratio
    // is read off the last step still well above it.
    let reliable = (1..=k_max).rev().find(|&k| values[k] > RHO_NOISE_FLOOR * first);
    let tail_ratio = match reliable {
        Some(k) if values[k - 1] > 0.0 => (values[k] / values[k - 1]).min(1.0 - f64::EPSILON),
        _ => 0.0,
    };
    Ok(ErgodicityProfile {
        provenance: Provenance::Certified,
        v: v.to_vec(),
        rho: Rho::Explicit { values, tail_ratio },
        drift: None,
        declared_m: None,
    })
}

/// A simulated path `Y_1, ..., Y_n` of state indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub values: Vec<usize>,
    pub seed: u64,
    pub initial: Distribution,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Per-row samplers for a finite kernel; build once, reuse across paths.
#[derive(Debug, Clone)]
pub struct KernelSampler {
    rows: Vec<WeightedIndex<f64>>,
}

impl KernelSampler {
    pub fn new(kernel: &FiniteKernel) -> Self {
        let rows = (0..kernel.size())
            .map(|x| WeightedIndex::new(kernel.row(x)).expect("rows are stochastic"))
            .collect();
        Self { rows }
    }

    pub fn next<R: Rng + ?Sized>(&self, x: usize, rng: &mut R) -> usize {
        self.rows[x].sample(rng)
    }

    /// Draws `Y_0 ~ mu0` and then returns `Y_1..Y_n`, feeding each value to `visit`.
    pub fn run<R: Rng + ?Sized>(
        &self,
        mu0: &Distribution,
        n: usize,
        rng: &mut R,
        mut visit: impl FnMut(usize),
    ) {
        let mut y = mu0.sampler().sample(rng);
        for _ in 0..n {
            y = self.next(y, rng);
            visit(y);
        }
    }
}

/// Simulates `Y_1..Y_n` with `Y_0 ~ mu0`; bit-reproducible for a fixed seed.
pub fn simulate(kernel: &FiniteKernel, mu0: &Distribution, n: usize, seed: u64) -> Result<Trajectory> {
    check_dim(kernel.size(), mu0.len())?;
    if n == 0 {
        return Err(Error::DomainError("trajectory length must be >= 1".into()));
    }
    let sampler = KernelSampler::new(kernel);
    let mut rng = ChainRng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(n);
    sampler.run(mu0, n, &mut rng, |y| values.push(y));
    Ok(Trajectory { values, seed, initial: mu0.clone() })
}

/// A chain on a general state space that can only be sampled. Its
/// ergodicity profile has to be declared by the user.
pub trait SamplerChain: Sync {
    type State: Clone + Send + Sync;

    fn initial<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::State;

    fn step<R: Rng + ?Sized>(&self, state: &Self::State, rng: &mut R) -> Self::State;
}

/// `Y_1..Y_n` of a sampler-backed chain, with `Y_0` drawn by [`SamplerChain::initial`].
pub fn simulate_sampler<C: SamplerChain>(chain: &C, n: usize, seed: u64) -> Vec<C::State> {
    let mut rng = ChainRng::seed_from_u64(seed);
    let mut y = chain.initial(&mut rng);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        y = chain.step(&y, &mut rng);
        out.push(y.clone());
    }
    out
}

/// Gaussian AR(1) chain `Y_{k+1} = phi Y_k + sigma eps_k` started at `x0`.
#[derive(Debug, Clone, Copy)]
pub struct Ar1Chain {
    pub phi: f64,
    pub sigma: f64,
    pub x0: f64,
}

impl SamplerChain for Ar1Chain {
    type State = f64;

    fn initial<R: Rng + ?Sized>(&self, _rng: &mut R) -> f64 {
        self.x0
    }

    fn step<R: Rng + ?Sized>(&self, state: &f64, rng: &mut R) -> f64 {
        let noise = Normal::new(0.0, self.sigma).expect("sigma > 0").sample(rng);
        self.phi * state + noise
    }
}

/// Chain specification file: `{"states": [...], "matrix": [[...]], "v": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ChainSpec {
    /// Real-valued state labels; defaults to `0..S`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<f64>>,
    pub matrix: Vec<Vec<f64>>,
    /// Lyapunov weights `V >= 1`; defaults to all ones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<f64>>,
}

impl ChainSpec {
    pub fn kernel(&self) -> Result<FiniteKernel> {
        match &self.states {
            Some(states) => FiniteKernel::new(states.clone(), self.matrix.clone()),
            None => FiniteKernel::from_rows(self.matrix.clone()),
        }
    }

    pub fn v_values(&self) -> Result<Vec<f64>> {
        let s = self.matrix.len();
        match &self.v {
            Some(v) => {
                check_dim(s, v.len())?;
                Ok(v.clone())
            }
            None => Ok(vec![1.0; s]),
        }
    }
}
