//! Explicit constants and L2 bounds for U-statistics of ergodic chains.
//!
//! Combinatorial factors (`(2m)!`, `binom(n, m)`, `n^m`) are combined in
//! log-space and exponentiated once.

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::markov::{check_dim, stationary, Distribution, ErgodicityProfile, FiniteKernel, Provenance};
use crate::ustat::{binomial_f64, ln_binomial, SymmetricKernelFn};

/// Accuracy of the truncated supremum in [`m_sup`].
pub const M_SUP_TOL: f64 = 1e-9;

const M_SUP_MAX_STEPS: usize = 10_000_000;

/// `M(mu, V) = sup_{k >= 0} mu P^k (V)`.
///
/// Iterates `mu P^k (V)` until the profile guarantees
/// `|mu P^k (V) - pi(V)| <= rho(k) (mu(V) + pi(V)) max V < 1e-9` for all later
/// `k`, and returns the running maximum (never below `pi(V)`). Declared
/// profiles that carry a user-supplied `M` return it unchanged.
pub fn m_sup(mu: &Distribution, profile: &ErgodicityProfile, kernel: &FiniteKernel) -> Result<f64> {
    if profile.provenance == Provenance::Declared {
        if let Some(m) = profile.declared_m {
            return Ok(m);
        }
    }
    let s = kernel.size();
    check_dim(s, mu.len())?;
    if profile.v.len() != s {
        return Err(Error::Unbounded(format!(
            "profile has {} V values for {s} states and no declared M",
            profile.v.len()
        )));
    }
    let v = &profile.v;
    let pi_v = stationary(kernel)?.expect(v);
    let mu_v = mu.expect(v);
    let v_max = v.iter().copied().fold(1.0, f64::max);
    let mut weights = mu.weights().to_vec();
    let mut best = pi_v.max(mu_v);
    for k in 0..M_SUP_MAX_STEPS {
        let value: f64 = weights.iter().zip(v).map(|(w, x)| w * x).sum();
        best = best.max(value);
        if profile.rho(k) * (mu_v + pi_v) * v_max < M_SUP_TOL {
            return Ok(best);
        }
        weights = kernel.step_weights(&weights);
    }
    Err(Error::Unbounded(format!("rho has not reached the tolerance after {M_SUP_MAX_STEPS} steps")))
}

/// `sum_{k=0}^{n} (k+1)^m rho(k)^exponent`.
pub fn mixing_sum(profile: &ErgodicityProfile, n: usize, m: usize, exponent: f64) -> f64 {
    (0..=n)
        .map(|k| {
            let r = profile.rho(k);
            if r == 0.0 {
                0.0
            } else {
                ((k + 1) as f64).powi(m as i32) * r.powf(exponent)
            }
        })
        .sum()
}

fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

fn check_nm(n: usize, m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::DomainError("degree m must be >= 1".into()));
    }
    if n < m {
        return Err(Error::DegreeTooLarge { n, m });
    }
    Ok(())
}

/// `C_{n,m} = 2^{m/2+1} sqrt((2m)!) (sum_{k=0}^n (k+1)^m rho(k))^{1/2} n^m / binom(n, m)`.
pub fn c_nm(n: usize, m: usize, profile: &ErgodicityProfile) -> Result<f64> {
    check_nm(n, m)?;
    let sum = mixing_sum(profile, n, m, 1.0);
    if sum == 0.0 {
        return Ok(0.0);
    }
    let ln = (m as f64 / 2.0 + 1.0) * std::f64::consts::LN_2
        + 0.5 * ln_factorial(2 * m)
        + 0.5 * sum.ln()
        + m as f64 * (n as f64).ln()
        - ln_binomial(n, m);
    Ok(ln.exp())
}

/// `B_q(h) = sup |h(y_1..y_m)| / sum_j V(y_j)^{1/q}`.
///
/// Exact maximization over the finite space when the profile carries `V` on
/// every state; otherwise falls back to an envelope declared on `h`.
pub fn b_q(h: &SymmetricKernelFn, profile: &ErgodicityProfile, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::DomainError(format!("q = {q} must be >= 1")));
    }
    let s = h.states();
    if profile.v.len() != s {
        return h
            .declared_bq
            .iter()
            .find(|(dq, _)| (dq - q).abs() <= 1e-12)
            .map(|&(_, b)| b)
            .ok_or(Error::NeedDeclaredEnvelope(q));
    }
    let m = h.degree();
    let roots: Vec<f64> = profile.v.iter().map(|v| v.powf(1.0 / q)).collect();
    let mut idx = vec![0usize; m];
    let mut best: f64 = 0.0;
    for (offset, value) in h.table().iter().enumerate() {
        crate::ustat::decode(offset, s, &mut idx);
        let denom: f64 = idx.iter().map(|&i| roots[i]).sum();
        best = best.max(value.abs() / denom);
    }
    Ok(best)
}

/// `C(p) = p^{1/(p+1)} + p^{-p/(p+1)}`.
pub fn lemma_constant(p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::PNotPositive(p));
    }
    Ok(p.powf(1.0 / (p + 1.0)) + p.powf(-p / (p + 1.0)))
}

/// `D(p, mu, V, h) = 2^{(2p+1)/(2(p+1))} C(p)^{1/2} sqrt(M) B_{2(p+1)}(h)`.
pub fn d_constant(p: f64, m_sup: f64, b: f64) -> Result<f64> {
    let cp = lemma_constant(p)?;
    Ok(2f64.powf((2.0 * p + 1.0) / (2.0 * (p + 1.0))) * cp.sqrt() * m_sup.sqrt() * b)
}

/// Upper bound on `sum_{k=0}^n (k+1)^m varrho^k` valid for every `n`:
///
/// ```text
/// (varrho L^{m+1})^{-1} (m^{m+1} - L^{m+1}) / (m - L),   L = -ln varrho
/// ```
///
/// At `L = m` the quotient has the removable value `(m+1) m^m`.
pub fn geometric_sum_bound(varrho: f64, m: usize) -> Result<f64> {
    if !(varrho > 0.0 && varrho < 1.0) {
        return Err(Error::DomainError(format!("varrho = {varrho} not in (0,1)")));
    }
    if m == 0 {
        return Err(Error::DomainError("m must be >= 1".into()));
    }
    let l = -varrho.ln();
    let mf = m as f64;
    let prefactor = 1.0 / (varrho * l.powi(m as i32 + 1));
    let denom = mf + varrho.ln();
    if denom.abs() < 1e-9 {
        return Ok(prefactor * (mf + 1.0) * mf.powi(m as i32));
    }
    Ok(prefactor * (mf.powi(m as i32 + 1) - l.powi(m as i32 + 1)) / denom)
}

/// B_q with its exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BqValue {
    pub q: f64,
    pub value: f64,
}

/// Everything a bound needs besides the kernel itself.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundInputs {
    pub n: usize,
    pub m: usize,
    pub profile: ErgodicityProfile,
    pub mu: Vec<f64>,
    /// `M(mu, V)`, from [`m_sup`] or declared.
    pub m_sup: f64,
    pub sup_h: Option<f64>,
    pub bq: Option<BqValue>,
    pub p: Option<f64>,
    pub degeneracy: usize,
}

impl BoundInputs {
    pub fn validate(&self) -> Result<()> {
        check_nm(self.n, self.m)?;
        if let Some(s) = self.sup_h {
            if !(s >= 0.0) {
                return Err(Error::DomainError(format!("sup_h = {s} < 0")));
            }
        }
        if !(self.m_sup.is_finite() && self.m_sup >= 1.0) {
            return Err(Error::Unbounded(format!("M(mu,V) = {}", self.m_sup)));
        }
        Ok(())
    }

    fn sup(&self) -> Result<f64> {
        self.sup_h.ok_or_else(|| Error::DomainError("bound needs a declared sup norm of h".into()))
    }

    /// Short digest of the inputs, stable across runs.
    pub fn digest(&self, bound: &str) -> String {
        let json = serde_json::to_string(self).expect("inputs serialize");
        let hash = Sha256::new().chain_update(bound.as_bytes()).chain_update(json.as_bytes()).finalize();
        hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    /// Provenance tag for a bound that reads `rho(0..=n)`.
    pub fn provenance(&self) -> String {
        let base = self.profile.provenance.as_str();
        if (0..=self.n).any(|k| self.profile.is_estimated(k)) {
            format!("{base}+estimated-tail")
        } else {
            base.to_string()
        }
    }
}

/// `C_{n,c} sqrt(M) ||h|| n^{-c/2}`.
fn canonical_term(inputs: &BoundInputs, c: usize, sup: f64) -> Result<f64> {
    Ok(c_nm(inputs.n, c, &inputs.profile)? * inputs.m_sup.sqrt() * sup * (inputs.n as f64).powf(-(c as f64) / 2.0))
}

/// `||U_{n,m}(h)||_2 <= C_{n,m} sqrt(M(mu,V)) ||h||_inf n^{-m/2}` for canonical `h`.
pub fn theorem1_bound(inputs: &BoundInputs) -> Result<f64> {
    inputs.validate()?;
    if inputs.degeneracy < inputs.m {
        return Err(Error::NotCanonical { degeneracy: inputs.degeneracy, degree: inputs.m });
    }
    canonical_term(inputs, inputs.m, inputs.sup()?)
}

/// Bound on `||U_{n,m}(h) - pi^{(x)m} h||_2` for a bounded `d`-degenerate `h`:
/// `sqrt(M) ||h|| sum_{c = max(d,1)}^m binom(m,c) 2^c C_{n,c} n^{-c/2}`.
pub fn corollary2_bound(inputs: &BoundInputs) -> Result<f64> {
    inputs.validate()?;
    let sup = inputs.sup()?;
    let mut total = 0.0;
    for c in inputs.degeneracy.max(1)..=inputs.m {
        total += binomial_f64(inputs.m, c) * 2f64.powi(c as i32) * canonical_term(inputs, c, sup)?;
    }
    Ok(total)
}

/// Bound for canonical `h` with `B_{2(p+1)}(h) < inf`:
///
/// ```text
/// 2^{m/2} m sqrt((2m)!) D(p,mu,V,h) (sum_k (k+1)^m rho(k)^{p/(p+1)})^{1/2} n^{m/2} / binom(n,m)
/// ```
pub fn corollary3_bound(inputs: &BoundInputs) -> Result<f64> {
    inputs.validate()?;
    let p = inputs.p.ok_or_else(|| Error::DomainError("corollary 3 needs p".into()))?;
    if !(p > 0.0) {
        return Err(Error::PNotPositive(p));
    }
    if inputs.degeneracy < inputs.m {
        return Err(Error::Unsupported(format!(
            "B_q bound for a {}-degenerate kernel of degree {}",
            inputs.degeneracy, inputs.m
        )));
    }
    let q = 2.0 * (p + 1.0);
    let bq = inputs
        .bq
        .filter(|b| (b.q - q).abs() <= 1e-12)
        .ok_or_else(|| Error::DomainError(format!("corollary 3 with p = {p} needs B_{q}(h)")))?;
    let d = d_constant(p, inputs.m_sup, bq.value)?;
    let (n, m) = (inputs.n, inputs.m);
    let sum = mixing_sum(&inputs.profile, n, m, p / (p + 1.0));
    if d == 0.0 || sum == 0.0 {
        return Ok(0.0);
    }
    let mf = m as f64;
    let ln = mf / 2.0 * std::f64::consts::LN_2
        + mf.ln()
        + 0.5 * ln_factorial(2 * m)
        + d.ln()
        + 0.5 * sum.ln()
        + mf / 2.0 * (n as f64).ln()
        - ln_binomial(n, m);
    Ok(ln.exp())
}

/// One named bound value within a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundEntry {
    pub name: String,
    pub value: f64,
    pub inputs_hash: String,
    pub provenance: String,
    /// `value - (l2 + 3 stderr)` when an L2 figure is attached.
    pub margin: Option<f64>,
    pub pass: Option<bool>,
}

/// How the L2 norm in a report was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum L2Kind {
    Exact,
    Empirical,
}

/// Per-`n` record: the L2 norm of the statistic and every applicable bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub n: usize,
    pub m: usize,
    pub l2_kind: Option<L2Kind>,
    pub l2: Option<f64>,
    pub stderr: Option<f64>,
    pub bounds: Vec<BoundEntry>,
    /// Requested bounds that do not apply, with the reason.
    pub unsupported: Vec<(String, String)>,
}

impl BoundReport {
    pub fn new(n: usize, m: usize) -> Self {
        Self { n, m, l2_kind: None, l2: None, stderr: None, bounds: Vec::new(), unsupported: Vec::new() }
    }

    pub fn push(&mut self, name: &str, value: f64, inputs: &BoundInputs) {
        self.bounds.push(BoundEntry {
            name: name.to_string(),
            value,
            inputs_hash: inputs.digest(name),
            provenance: inputs.provenance(),
            margin: None,
            pass: None,
        });
    }

    /// Attaches an L2 figure and fills margins: pass iff `bound >= l2 + 3 stderr`.
    pub fn compare(&mut self, kind: L2Kind, l2: f64, stderr: f64) {
        self.l2_kind = Some(kind);
        self.l2 = Some(l2);
        self.stderr = Some(stderr);
        for b in &mut self.bounds {
            let margin = b.value - (l2 + 3.0 * stderr);
            b.margin = Some(margin);
            b.pass = Some(margin >= 0.0);
        }
    }

    pub fn all_pass(&self) -> bool {
        self.bounds.iter().all(|b| b.pass.unwrap_or(true))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::{certify_rho, evolve, ChainRng, Rho};
    use crate::ustat::{binomial_u128, KernelSpec, Center, NamedCenter};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::{Rng, SeedableRng};

    fn two_state() -> FiniteKernel {
        FiniteKernel::two_state(0.3, 0.2, [0.0, 1.0]).unwrap()
    }

    fn geometric(c: f64, varrho: f64) -> ErgodicityProfile {
        ErgodicityProfile::declared(vec![], Rho::Geometric { c, varrho }).unwrap()
    }

    fn zero_rho() -> ErgodicityProfile {
        ErgodicityProfile::declared(vec![], Rho::Explicit { values: vec![0.0], tail_ratio: 0.0 }).unwrap()
    }

    fn inputs(n: usize, m: usize, profile: ErgodicityProfile, sup: f64, degeneracy: usize) -> BoundInputs {
        BoundInputs {
            n,
            m,
            profile,
            mu: vec![1.0, 0.0],
            m_sup: 1.0,
            sup_h: Some(sup),
            bq: None,
            p: None,
            degeneracy,
        }
    }

    #[test]
    fn m_sup_examples() {
        let k = two_state();
        let pi = stationary(&k).unwrap();
        let flat = certify_rho(&k, &[1.0, 1.0], 60).unwrap();
        assert_abs_diff_eq!(m_sup(&Distribution::dirac(2, 0), &flat, &k).unwrap(), 1.0, epsilon = 1e-15);

        let weighted = certify_rho(&k, &[1.0, 2.0], 60).unwrap();
        assert_abs_diff_eq!(m_sup(&pi, &weighted, &k).unwrap(), pi.expect(&[1.0, 2.0]), epsilon = 1e-14);

        let mu = Distribution::dirac(2, 0);
        let brute = (0..=200)
            .map(|j| evolve(&mu, &k, j).unwrap().expect(&[1.0, 2.0]))
            .fold(f64::MIN, f64::max);
        let m = m_sup(&mu, &weighted, &k).unwrap();
        assert!((1.6 - 1e-9..=1.6).contains(&m));
        assert_abs_diff_eq!(m, brute, epsilon = 1e-9);
    }

    #[test]
    fn m_sup_dominates_stationary_moment() {
        let mut rng = ChainRng::seed_from_u64(77);
        let rows: Vec<Vec<f64>> = (0..4)
            .map(|_| {
                let w: Vec<f64> = (0..4).map(|_| rng.random::<f64>() + 0.1).collect();
                let t: f64 = w.iter().sum();
                w.into_iter().map(|x| x / t).collect()
            })
            .collect();
        let k = FiniteKernel::from_rows(rows).unwrap();
        let v = vec![1.0, 5.0, 2.0, 1.5];
        let profile = certify_rho(&k, &v, 40).unwrap();
        let pi_v = stationary(&k).unwrap().expect(&v);
        for _ in 0..50 {
            let mu = Distribution::normalized((0..4).map(|_| rng.random::<f64>()).collect()).unwrap();
            assert!(m_sup(&mu, &profile, &k).unwrap() >= pi_v);
        }
    }

    #[test]
    fn m_sup_declared_and_unbounded() {
        let k = two_state();
        let declared = geometric(1.0, 0.5).with_declared_m(3.0);
        assert_eq!(m_sup(&Distribution::dirac(2, 0), &declared, &k).unwrap(), 3.0);
        assert!(matches!(m_sup(&Distribution::dirac(2, 0), &geometric(1.0, 0.5), &k), Err(Error::Unbounded(_))));
    }

    #[test]
    fn c_nm_examples() {
        assert_eq!(c_nm(10, 2, &zero_rho()).unwrap(), 0.0);
        assert_relative_eq!(c_nm(1, 1, &geometric(1.0, 0.5)).unwrap(), 4.0 * 2f64.sqrt(), max_relative = 1e-14);
        let p = geometric(1.0, 0.7);
        for n in [1, 5, 40] {
            let sum: f64 = (0..=n).map(|k| (k + 1) as f64 * 0.7f64.powi(k as i32)).sum();
            let expected = 2f64.powf(1.5) * 2f64.sqrt() * sum.sqrt();
            assert_relative_eq!(c_nm(n, 1, &p).unwrap(), expected, max_relative = 1e-13);
        }
        assert!(matches!(c_nm(2, 3, &p), Err(Error::DegreeTooLarge { .. })));
    }

    #[test]
    fn c_nm_matches_exact_integer_factors() {
        let p = geometric(1.0, 0.5);
        for m in 1..=6usize {
            for n in [m, m + 1, 17, 250, 10_000] {
                let fact: u128 = (1..=(2 * m) as u128).product();
                let npow = (n as u128).pow(m as u32);
                let binom = binomial_u128(n as u64, m as u64).unwrap();
                let sum = mixing_sum(&p, n, m, 1.0);
                let expected = 2f64.powf(m as f64 / 2.0 + 1.0)
                    * (fact as f64).sqrt()
                    * sum.sqrt()
                    * (npow as f64 / binom as f64);
                assert_relative_eq!(c_nm(n, m, &p).unwrap(), expected, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn c_nm_survives_huge_factorials() {
        let v = c_nm(1_000_000, 40, &geometric(1.0, 0.5)).unwrap();
        assert!(v.is_finite() && v > 0.0);
    }

    #[test]
    fn c_nm_monotone_in_rho() {
        let base = vec![1.0, 0.6, 0.3, 0.1, 0.05];
        let profile = |values: Vec<f64>| {
            ErgodicityProfile::declared(vec![], Rho::Explicit { values, tail_ratio: 0.5 }).unwrap()
        };
        let c0 = c_nm(8, 2, &profile(base.clone())).unwrap();
        for k in 1..base.len() {
            let mut bumped = base.clone();
            bumped[k] = (bumped[k] * 1.2).min(bumped[k - 1]);
            assert!(c_nm(8, 2, &profile(bumped)).unwrap() >= c0);
        }
    }

    #[test]
    fn theorem1_and_corollary2() {
        let p = geometric(1.0, 0.5);
        assert_eq!(theorem1_bound(&inputs(100, 2, p.clone(), 0.0, 2)).unwrap(), 0.0);
        assert_eq!(theorem1_bound(&inputs(100, 2, zero_rho(), 1.0, 2)).unwrap(), 0.0);
        assert!(matches!(
            theorem1_bound(&inputs(100, 2, p.clone(), 1.0, 1)),
            Err(Error::NotCanonical { .. })
        ));
        for m in 1..=4 {
            let inp = inputs(50, m, p.clone(), 0.7, m);
            assert_eq!(corollary2_bound(&inp).unwrap(), 2f64.powi(m as i32) * theorem1_bound(&inp).unwrap());
        }
        assert_eq!(corollary2_bound(&inputs(100, 2, p.clone(), 0.0, 1)).unwrap(), 0.0);
    }

    #[test]
    fn theorem1_two_state_against_rational_factors() {
        let k = two_state();
        let pi = stationary(&k).unwrap();
        let profile = certify_rho(&k, &[1.0, 1.0], 200).unwrap();
        let h = KernelSpec::Product { center: Center::Named(NamedCenter::Stationary) }.bind(2, &k, &pi).unwrap();
        let n = 100;
        let inp = BoundInputs {
            n,
            m: 2,
            profile: profile.clone(),
            mu: vec![1.0, 0.0],
            m_sup: m_sup(&Distribution::dirac(2, 0), &profile, &k).unwrap(),
            sup_h: Some(h.sup_norm()),
            bq: None,
            p: None,
            degeneracy: 2,
        };
        // 2^{2} sqrt(4!) * n^2/binom(n,2) = 4 sqrt(24) * 2n/(n-1), exact rational ratio.
        let ratio = (2 * n) as f64 / (n - 1) as f64;
        let sum: f64 = (0..=n).map(|j| ((j + 1) * (j + 1)) as f64 * 0.5f64.powi(j as i32)).sum();
        let expected = 4.0 * 24f64.sqrt() * sum.sqrt() * ratio * 0.36 / n as f64;
        assert_relative_eq!(theorem1_bound(&inp).unwrap(), expected, max_relative = 1e-10);
    }

    #[test]
    fn corollary2_term_by_term() {
        let p = geometric(1.0, 0.5);
        let inp = BoundInputs { m_sup: 1.3, ..inputs(100, 2, p.clone(), 0.8, 1) };
        let n = 100f64;
        let t1 = 2.0 * 2.0 * c_nm(100, 1, &p).unwrap() / n.sqrt();
        let t2 = 1.0 * 4.0 * c_nm(100, 2, &p).unwrap() / n;
        assert_relative_eq!(corollary2_bound(&inp).unwrap(), 1.3f64.sqrt() * 0.8 * (t1 + t2), max_relative = 1e-13);
    }

    #[test]
    fn b_q_examples() {
        let flat = ErgodicityProfile::declared(vec![1.0; 3], Rho::Geometric { c: 1.0, varrho: 0.5 }).unwrap();
        let one = SymmetricKernelFn::constant(2, 3, 1.0).unwrap();
        assert_abs_diff_eq!(b_q(&one, &flat, 4.0).unwrap(), 0.5, epsilon = 1e-15);
        assert_eq!(b_q(&SymmetricKernelFn::constant(2, 3, 0.0).unwrap(), &flat, 2.0).unwrap(), 0.0);

        let mut rng = ChainRng::seed_from_u64(1);
        let h = SymmetricKernelFn::random(2, 3, &mut rng).unwrap();
        let v: Vec<f64> = (0..3).map(|_| 1.0 + 4.0 * rng.random::<f64>()).collect();
        let prof = ErgodicityProfile::declared(v.clone(), Rho::Geometric { c: 1.0, varrho: 0.5 }).unwrap();
        let mut brute: f64 = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                brute = brute.max(h.eval(&[a, b]).abs() / (v[a].powf(0.25) + v[b].powf(0.25)));
            }
        }
        assert_abs_diff_eq!(b_q(&h, &prof, 4.0).unwrap(), brute, epsilon = 1e-15);
    }

    #[test]
    fn b_q_needs_envelope_without_v() {
        let h = SymmetricKernelFn::constant(2, 3, 1.0).unwrap();
        let general = geometric(1.0, 0.5);
        assert!(matches!(b_q(&h, &general, 4.0), Err(Error::NeedDeclaredEnvelope(_))));
        let mut declared = h.clone();
        declared.declared_bq.push((4.0, 0.9));
        assert_eq!(b_q(&declared, &general, 4.0).unwrap(), 0.9);
    }

    #[test]
    fn corollary3_examples() {
        let p = geometric(1.0, 0.5);
        let mut inp = inputs(100, 2, p.clone(), 1.0, 2);
        inp.p = Some(1.0);
        inp.bq = Some(BqValue { q: 4.0, value: 0.0 });
        assert_eq!(corollary3_bound(&inp).unwrap(), 0.0);

        assert_relative_eq!(
            d_constant(1.0, 2.5, 0.3).unwrap(),
            2f64.powf(0.75) * 2f64.sqrt() * 2.5f64.sqrt() * 0.3,
            max_relative = 1e-14
        );
        assert_eq!(lemma_constant(1.0).unwrap(), 2.0);

        inp.bq = Some(BqValue { q: 4.0, value: 0.18 });
        let n = 100usize;
        let sum = mixing_sum(&p, n, 2, 0.5);
        let expected = 2.0 * 2.0 * 24f64.sqrt() * d_constant(1.0, 1.0, 0.18).unwrap() * sum.sqrt() * n as f64
            / binomial_f64(n, 2);
        assert_relative_eq!(corollary3_bound(&inp).unwrap(), expected, max_relative = 1e-12);

        inp.p = Some(0.0);
        assert!(matches!(corollary3_bound(&inp), Err(Error::PNotPositive(_))));
        inp.p = Some(1.0);
        inp.degeneracy = 1;
        assert!(matches!(corollary3_bound(&inp), Err(Error::Unsupported(_))));
    }

    #[test]
    fn p_constants_are_continuous() {
        let grid: Vec<f64> = (1..=4000).map(|i| i as f64 * 1e-3).collect();
        for w in grid.windows(2) {
            let (a, b) = (lemma_constant(w[0]).unwrap(), lemma_constant(w[1]).unwrap());
            assert!((a - b).abs() < 0.05, "C jumps between {} and {}", w[0], w[1]);
            let (da, db) = (d_constant(w[0], 2.0, 1.0).unwrap(), d_constant(w[1], 2.0, 1.0).unwrap());
            assert!((da - db).abs() < 0.05);
        }
        assert!(matches!(lemma_constant(0.0), Err(Error::PNotPositive(_))));
    }

    fn partial_sums(varrho: f64, m: usize, n: usize) -> Vec<f64> {
        let mut acc = 0.0;
        (0..=n)
            .map(|k| {
                acc += ((k + 1) as f64).powi(m as i32) * varrho.powi(k as i32);
                acc
            })
            .collect()
    }

    #[test]
    fn geometric_sum_examples() {
        let l2 = std::f64::consts::LN_2;
        let expected = (1.0 / (0.5 * l2 * l2)) * (1.0 - l2 * l2) / (1.0 - l2);
        assert_relative_eq!(geometric_sum_bound(0.5, 1).unwrap(), expected, max_relative = 1e-14);
        for m in 1..=3 {
            let varrho = (-(m as f64)).exp();
            let b = geometric_sum_bound(varrho, m).unwrap();
            let mf = m as f64;
            assert_relative_eq!(b, (mf + 1.0) * mf.powi(m as i32) / (varrho * mf.powi(m as i32 + 1)), max_relative = 1e-12);
            assert!(partial_sums(varrho, m, 10_000).iter().all(|s| *s <= b));
        }
        for varrho in [0.2, 0.5, 0.8, 0.9] {
            assert!(geometric_sum_bound(varrho, 2).unwrap() >= 1.0);
        }
        assert!(geometric_sum_bound(1.0, 1).is_err());
        assert!(geometric_sum_bound(0.0, 1).is_err());
    }

    #[test]
    fn geometric_sum_is_continuous_at_the_singularity() {
        for m in 1..=3usize {
            let center = (-(m as f64)).exp();
            let at = geometric_sum_bound(center, m).unwrap();
            for eps in [1e-6, 1e-7, -1e-6, -1e-7] {
                let near = geometric_sum_bound(center * (1.0 + eps), m).unwrap();
                assert_relative_eq!(near, at, max_relative = 1e-4);
            }
        }
    }

    #[test]
    fn report_margins() {
        let inp = inputs(10, 2, geometric(1.0, 0.5), 1.0, 2);
        let mut r = BoundReport::new(10, 2);
        r.push("theorem1", 1.0, &inp);
        r.compare(L2Kind::Empirical, 0.5, 0.1);
        assert_abs_diff_eq!(r.bounds[0].margin.unwrap(), 0.2, epsilon = 1e-15);
        assert!(r.all_pass());
        r.compare(L2Kind::Empirical, 0.9, 0.1);
        assert!(!r.all_pass());
        assert_eq!(r.bounds[0].inputs_hash.len(), 16);
        assert_eq!(r.bounds[0].provenance, "declared");
    }
}
