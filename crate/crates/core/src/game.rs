//! Coalition representation, the matched prior, and exact valuations.
//!
//! A coalition of candidate features is a subset `T` of `{0..n-1}` held as a
//! bitmask. The matched prior assigns `P_T = t!(n-t)!/(n+1)!` to every
//! coalition of size `t`; it is the unique non-informative density under
//! which the sum of expected marginal effects equals the expected payoff
//! above the empty model. This module computes the valuation `λ_i[v]` and
//! the Shapley value `Ψ_i[v]` by full enumeration, and provides numerical
//! verifiers for the three identities behind them:
//!
//! 1. matching: `Σ_i λ_i[v] = E v(S) - v(∅)` for every payoff `v`;
//! 2. expected Shapley: `E_Z Ψ_i[v_Z] = λ_i[v]` where `v_Z(T) = v(Z∩T)`;
//! 3. ordering representation: `λ_i[v] = E[(n-|Ξ|)/(n+1) · φ_i^τ]` over
//!    uniformly random orderings `τ`.

use std::sync::atomic::{AtomicU64, Ordering};

use dashmap::DashMap;

use crate::{Error, Result};

/// Hard ceiling on the number of candidate features (bitmask width).
pub const MAX_FEATURES: usize = 63;

/// Largest `n` for which full `2^n` subset enumeration is attempted.
pub const ENUM_LIMIT: usize = 25;

/// Largest `n` for the expected-Shapley verifier, which enumerates carrier
/// sets `Z` and, inside each, coalitions `T` (roughly `4^n` work).
pub const CARRIER_ENUM_LIMIT: usize = 12;

/// Largest `n` for the ordering-representation verifier (`n!` orderings).
pub const ORDERING_ENUM_LIMIT: usize = 8;

/// A coalition `T ⊆ {0..n-1}` of candidate features.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct FeatureSet {
    bits: u64,
    n: u8,
}

impl FeatureSet {
    /// The empty coalition over `n` candidates.
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_FEATURES {
            return Err(Error::Domain(format!(
                "feature count must be in 1..={MAX_FEATURES}, got {n}"
            )));
        }
        Ok(FeatureSet { bits: 0, n: n as u8 })
    }

    /// The grand coalition `{0..n-1}`.
    pub fn full(n: usize) -> Result<Self> {
        let mut s = Self::empty(n)?;
        s.bits = Self::full_mask(n);
        Ok(s)
    }

    pub fn from_bits(bits: u64, n: usize) -> Result<Self> {
        let base = Self::empty(n)?;
        if bits & !Self::full_mask(n) != 0 {
            return Err(Error::Domain(format!(
                "bitmask {bits:#x} has bits set at or above position {n}"
            )));
        }
        Ok(FeatureSet { bits, n: base.n })
    }

    pub fn from_indices(indices: &[usize], n: usize) -> Result<Self> {
        let mut s = Self::empty(n)?;
        for &i in indices {
            if i >= n {
                return Err(Error::Domain(format!("feature index {i} out of range 0..{n}")));
            }
            s.bits |= 1 << i;
        }
        Ok(s)
    }

    fn full_mask(n: usize) -> u64 {
        if n == 64 { u64::MAX } else { (1u64 << n) - 1 }
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Coalition size `t = |T|`.
    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.n() && self.bits >> i & 1 == 1
    }

    /// `T ∪ {i}`.
    pub fn with(&self, i: usize) -> Self {
        debug_assert!(i < self.n());
        FeatureSet { bits: self.bits | 1 << i, n: self.n }
    }

    /// `T \ {i}`.
    pub fn without(&self, i: usize) -> Self {
        FeatureSet { bits: self.bits & !(1 << i), n: self.n }
    }

    pub fn union(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        FeatureSet { bits: self.bits | other.bits, n: self.n }
    }

    pub fn intersect(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        FeatureSet { bits: self.bits & other.bits, n: self.n }
    }

    pub fn difference(&self, other: &Self) -> Self {
        FeatureSet { bits: self.bits & !other.bits, n: self.n }
    }

    /// Member indices in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        let n = self.n();
        (0..n).filter(move |&i| self.contains(i))
    }

    pub fn indices(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// All `2^n` coalitions over `n` candidates, in ascending bitmask order.
    pub fn all_subsets(n: usize) -> Result<impl Iterator<Item = FeatureSet>> {
        if n > ENUM_LIMIT {
            return Err(Error::Capacity {
                op: "subset enumeration",
                n,
                limit: ENUM_LIMIT,
                cost: "2^n",
            });
        }
        let _ = Self::empty(n)?;
        Ok((0..1u64 << n).map(move |bits| FeatureSet { bits, n: n as u8 }))
    }
}

/// Log-factorial table: `lnf[k] = ln(k!)` for `k = 0..=m`.
fn ln_factorials(m: usize) -> Vec<f64> {
    let mut t = vec![0.0; m + 1];
    for k in 1..=m {
        t[k] = t[k - 1] + (k as f64).ln();
    }
    t
}

/// The matched non-informative prior `P_T = t!(n-t)!/(n+1)!`.
///
/// The mass depends only on the coalition size `t`, and the implied size
/// marginal is uniform: `δ_t = 1/(n+1)` for every `t`.
#[derive(Clone, Debug)]
pub struct MatchedPrior {
    n: usize,
    log_mass: Vec<f64>,
}

impl MatchedPrior {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_FEATURES {
            return Err(Error::Domain(format!(
                "prior requires 1 <= n <= {MAX_FEATURES}, got {n}"
            )));
        }
        let lnf = ln_factorials(n + 1);
        let log_mass = (0..=n)
            .map(|t| lnf[t] + lnf[n - t] - lnf[n + 1])
            .collect();
        Ok(MatchedPrior { n, log_mass })
    }

    /// Negative-control hook: a deliberately wrong prior whose masses are
    /// scaled by `1 + bias·t`. Used to confirm that the identity verifiers
    /// actually detect a mismatched density.
    pub fn corrupted(n: usize, bias: f64) -> Result<Self> {
        let mut p = Self::new(n)?;
        for (t, lm) in p.log_mass.iter_mut().enumerate() {
            *lm += (1.0 + bias * t as f64).ln();
        }
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `P_T` for any coalition of size `t`.
    pub fn mass(&self, t: usize) -> f64 {
        self.log_mass[t].exp()
    }
}

/// Probability `P_T = t!(n-t)!/(n+1)!` of one coalition of size `t`,
/// computed in log space so it stays finite up to `n = 63`.
pub fn prior_mass(t: usize, n: usize) -> Result<f64> {
    if t > n {
        return Err(Error::Domain(format!("coalition size {t} exceeds n = {n}")));
    }
    Ok(MatchedPrior::new(n)?.mass(t))
}

/// Compensated (Kahan) accumulator.
#[derive(Clone, Copy, Default)]
pub(crate) struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Anything that assigns a payoff to every coalition over `n` candidates.
pub trait CoalitionValue: Sync {
    fn n(&self) -> usize;
    fn value(&self, t: FeatureSet) -> f64;
}

/// Memoized payoff function `v: 2^N → R`.
///
/// `v` must be a pure function of the coalition; the cache makes repeated
/// evaluation of the same `T` bit-identical and is safe to share across
/// threads.
pub struct GameOracle {
    n: usize,
    payoff: Box<dyn Fn(FeatureSet) -> f64 + Send + Sync>,
    cache: DashMap<u64, f64>,
    lookups: AtomicU64,
}

impl GameOracle {
    pub fn new<F>(n: usize, payoff: F) -> Result<Self>
    where
        F: Fn(FeatureSet) -> f64 + Send + Sync + 'static,
    {
        if n == 0 || n > MAX_FEATURES {
            return Err(Error::Domain(format!(
                "game requires 1 <= n <= {MAX_FEATURES}, got {n}"
            )));
        }
        Ok(GameOracle {
            n,
            payoff: Box::new(payoff),
            cache: DashMap::new(),
            lookups: AtomicU64::new(0),
        })
    }

    /// Game defined by a dense table of `2^n` values indexed by bitmask.
    pub fn from_table(n: usize, values: Vec<f64>) -> Result<Self> {
        if n > ENUM_LIMIT {
            return Err(Error::Capacity {
                op: "table game",
                n,
                limit: ENUM_LIMIT,
                cost: "2^n",
            });
        }
        if values.len() != 1 << n {
            return Err(Error::Input(format!(
                "table game over {n} features needs {} values, got {}",
                1usize << n,
                values.len()
            )));
        }
        Self::new(n, move |t| values[t.bits() as usize])
    }

    /// Number of `value` calls made so far (cache hits included).
    pub fn lookups(&self) -> u64 {
        self.lookups.load(Ordering::Relaxed)
    }

    /// Number of distinct coalitions evaluated so far.
    pub fn distinct_evaluations(&self) -> u64 {
        self.cache.len() as u64
    }

    /// The restricted (carrier) game `v_S(T) = v(S ∩ T)`.
    ///
    /// Intersecting before the cache lookup means every carrier game shares
    /// this oracle's cache.
    pub fn carrier(&self, s: FeatureSet) -> CarrierGame<'_> {
        CarrierGame { base: self, mask: s }
    }
}

impl CoalitionValue for GameOracle {
    fn n(&self) -> usize {
        self.n
    }

    fn value(&self, t: FeatureSet) -> f64 {
        debug_assert_eq!(t.n(), self.n);
        self.lookups.fetch_add(1, Ordering::Relaxed);
        if let Some(v) = self.cache.get(&t.bits()) {
            return *v;
        }
        let v = (self.payoff)(t);
        *self.cache.entry(t.bits()).or_insert(v)
    }
}

/// View of a [`GameOracle`] restricted to a carrier set `S`.
pub struct CarrierGame<'a> {
    base: &'a GameOracle,
    mask: FeatureSet,
}

impl CoalitionValue for CarrierGame<'_> {
    fn n(&self) -> usize {
        self.base.n
    }

    fn value(&self, t: FeatureSet) -> f64 {
        self.base.value(t.intersect(&self.mask))
    }
}

fn check_enum_capacity(op: &'static str, n: usize, limit: usize, cost: &'static str) -> Result<()> {
    if n > limit {
        return Err(Error::Capacity { op, n, limit, cost });
    }
    Ok(())
}

fn check_feature(i: usize, n: usize) -> Result<()> {
    if i >= n {
        return Err(Error::Domain(format!("feature index {i} out of range 0..{n}")));
    }
    Ok(())
}

/// Exact valuation `λ_i[v] = Σ_T P_T [v(T∪{i}) - v(T)]` under a given prior.
///
/// Coalitions containing `i` contribute exactly zero and are skipped.
pub fn exact_lambda_with_prior(
    game: &impl CoalitionValue,
    i: usize,
    prior: &MatchedPrior,
) -> Result<f64> {
    let n = game.n();
    check_feature(i, n)?;
    check_enum_capacity("exact_lambda", n, ENUM_LIMIT, "2^n")?;
    if prior.n() != n {
        return Err(Error::Domain(format!(
            "prior is over n = {}, game over n = {n}",
            prior.n()
        )));
    }
    let mut acc = KahanSum::default();
    for t in FeatureSet::all_subsets(n)? {
        if t.contains(i) {
            continue;
        }
        let diff = game.value(t.with(i)) - game.value(t);
        if diff != 0.0 {
            acc.add(prior.mass(t.len()) * diff);
        }
    }
    Ok(acc.value())
}

/// Exact valuation `λ_i[v]` under the matched prior.
pub fn exact_lambda(game: &impl CoalitionValue, i: usize) -> Result<f64> {
    exact_lambda_with_prior(game, i, &MatchedPrior::new(game.n())?)
}

/// Exact Shapley value `Ψ_i[v] = Σ_{T: i∉T} t!(n-t-1)!/n! · [v(T∪{i}) - v(T)]`.
pub fn exact_shapley(game: &impl CoalitionValue, i: usize) -> Result<f64> {
    let n = game.n();
    check_feature(i, n)?;
    check_enum_capacity("exact_shapley", n, ENUM_LIMIT, "2^n")?;
    let lnf = ln_factorials(n);
    let weights: Vec<f64> = (0..n)
        .map(|t| (lnf[t] + lnf[n - t - 1] - lnf[n]).exp())
        .collect();
    let mut acc = KahanSum::default();
    for t in FeatureSet::all_subsets(n)? {
        if t.contains(i) {
            continue;
        }
        let diff = game.value(t.with(i)) - game.value(t);
        if diff != 0.0 {
            acc.add(weights[t.len()] * diff);
        }
    }
    Ok(acc.value())
}

/// Expected payoff `E v(S) = Σ_T P_T v(T)` under the matched prior.
pub fn expected_payoff(game: &impl CoalitionValue) -> Result<f64> {
    expected_payoff_with_prior(game, &MatchedPrior::new(game.n())?)
}

pub fn expected_payoff_with_prior(
    game: &impl CoalitionValue,
    prior: &MatchedPrior,
) -> Result<f64> {
    let n = game.n();
    check_enum_capacity("expected_payoff", n, ENUM_LIMIT, "2^n")?;
    let mut acc = KahanSum::default();
    for t in FeatureSet::all_subsets(n)? {
        acc.add(prior.mass(t.len()) * game.value(t));
    }
    Ok(acc.value())
}

/// Residual of the matching identity `Σ_i λ_i[v] - (E v(S) - v(∅))`.
///
/// Zero (up to rounding) for every payoff under the matched prior.
pub fn verify_matching(game: &impl CoalitionValue) -> Result<f64> {
    verify_matching_with_prior(game, &MatchedPrior::new(game.n())?)
}

pub fn verify_matching_with_prior(
    game: &impl CoalitionValue,
    prior: &MatchedPrior,
) -> Result<f64> {
    let n = game.n();
    let mut lambda_sum = KahanSum::default();
    for i in 0..n {
        lambda_sum.add(exact_lambda_with_prior(game, i, prior)?);
    }
    let ev = expected_payoff_with_prior(game, prior)?;
    let v_empty = game.value(FeatureSet::empty(n)?);
    Ok(lambda_sum.value() - (ev - v_empty))
}

/// Snapshot of all `2^n` payoffs, indexed by bitmask.
fn value_table(game: &impl CoalitionValue) -> Result<Vec<f64>> {
    let n = game.n();
    Ok(FeatureSet::all_subsets(n)?.map(|t| game.value(t)).collect())
}

/// Max over features of `|E_Z Ψ_i[v_Z] - λ_i[v]|` where `v_Z(T) = v(Z∩T)`.
///
/// Zero (up to rounding) by the expected-Shapley identity. Enumerates every
/// carrier set `Z` and, inside each, every coalition, so the limit is much
/// tighter than for plain enumeration.
pub fn verify_expected_shapley(game: &impl CoalitionValue) -> Result<f64> {
    let n = game.n();
    check_enum_capacity("verify_expected_shapley", n, CARRIER_ENUM_LIMIT, "4^n-ish")?;
    let prior = MatchedPrior::new(n)?;
    let table = value_table(game)?;
    let lnf = ln_factorials(n);
    let shapley_w: Vec<f64> = (0..n)
        .map(|t| (lnf[t] + lnf[n - t - 1] - lnf[n]).exp())
        .collect();

    let mut max_dev = 0.0f64;
    for i in 0..n {
        let lambda_i = exact_lambda(game, i)?;
        let mut expect = KahanSum::default();
        for z_bits in 0..1u64 << n {
            // i is a dummy in v_Z whenever i ∉ Z.
            if z_bits >> i & 1 == 0 {
                continue;
            }
            let p_z = prior.mass(z_bits.count_ones() as usize);
            let mut psi = KahanSum::default();
            for t_bits in 0..1u64 << n {
                if t_bits >> i & 1 == 1 {
                    continue;
                }
                let vt = table[(z_bits & t_bits) as usize];
                let vti = table[(z_bits & (t_bits | 1 << i)) as usize];
                if vti != vt {
                    psi.add(shapley_w[t_bits.count_ones() as usize] * (vti - vt));
                }
            }
            expect.add(p_z * psi.value());
        }
        max_dev = max_dev.max((expect.value() - lambda_i).abs());
    }
    Ok(max_dev)
}

/// Visits every permutation of `0..n` (Heap's algorithm).
fn for_each_permutation(n: usize, mut visit: impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    visit(&perm);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            visit(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Max over features of the deviation between the exhaustive ordering
/// average of `(n-|Ξ_i^τ|)/(n+1) · φ_i^τ` and `λ_i[v]`.
///
/// Zero (up to rounding) by the ordering representation; iterates all `n!`
/// orderings.
pub fn verify_ordering_representation(game: &impl CoalitionValue) -> Result<f64> {
    let n = game.n();
    check_enum_capacity("verify_ordering_representation", n, ORDERING_ENUM_LIMIT, "n!")?;
    let table = value_table(game)?;

    let mut sums = vec![KahanSum::default(); n];
    let mut count = 0u64;
    for_each_permutation(n, |perm| {
        count += 1;
        let mut prefix = 0u64;
        let mut v_prev = table[0];
        for (pos, &i) in perm.iter().enumerate() {
            let next = prefix | 1 << i;
            let v_next = table[next as usize];
            let weight = (n - pos) as f64 / (n + 1) as f64;
            sums[i].add(weight * (v_next - v_prev));
            prefix = next;
            v_prev = v_next;
        }
    });

    let mut max_dev = 0.0f64;
    for i in 0..n {
        let avg = sums[i].value() / count as f64;
        max_dev = max_dev.max((avg - exact_lambda(game, i)?).abs());
    }
    Ok(max_dev)
}


#[cfg(test)]
pub(crate) use tests::{fixture_game, random_game};
