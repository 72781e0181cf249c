//! Partial sums of `sum a^-alpha` over the nested sets, towers and the diagonal, with
//! tail brackets where the growth of the set gives one, and convergence-exponent
//! estimates.

use crate::error::{Error, Result};
use crate::iterated::{IteratedPrimes, SetFamily};
use crate::record::{fmt_f64, fmt_opt_f64, Record};

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesAccount {
    pub family: SetFamily,
    pub alpha: f64,
    pub cutoff_x: u64,
    pub partial_sum: f64,
    /// Upper bound on the sum of the terms above the cutoff; `None` when unknown.
    pub tail_upper: Option<f64>,
    pub terms_used: u64,
}

impl SeriesAccount {
    /// `[partial, partial + tail]`; the upper end is infinite when the tail is unknown.
    pub fn bracket(&self) -> (f64, f64) {
        (self.partial_sum, self.tail_upper.map_or(f64::INFINITY, |t| self.partial_sum + t))
    }
}

impl Record for SeriesAccount {
    fn fields(&self) -> Vec<(&'static str, String)> {
        let (lo, hi) = self.bracket();
        vec![
            ("family", self.family.to_string()),
            ("alpha", fmt_f64(self.alpha)),
            ("cutoff_x", self.cutoff_x.to_string()),
            ("partial_sum", fmt_f64(self.partial_sum)),
            ("tail_upper", fmt_opt_f64(self.tail_upper)),
            ("terms_used", self.terms_used.to_string()),
            ("bracket", format!("[{}, {}]", fmt_f64(lo), fmt_f64(hi))),
        ]
    }
}

/// Compensated running sum; plain summation is the same loop with the correction off.
#[derive(Debug, Default, Clone, Copy)]
struct Accumulator {
    sum: f64,
    carry: f64,
    compensated: bool,
}

impl Accumulator {
    fn new(compensated: bool) -> Self {
        Accumulator { compensated, ..Default::default() }
    }

    fn add(&mut self, term: f64) {
        if self.compensated {
            let y = term - self.carry;
            let t = self.sum + y;
            self.carry = (t - self.sum) - y;
            self.sum = t;
        } else {
            self.sum += term;
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("alpha must be a positive finite number, got {alpha}")))
    }
}

/// Bound on `sum_{j >= k} a_j^-alpha` for a sequence whose steps satisfy
/// `a_{j+1} >= a_j log a_j`, given its first term `a_k = p`: the geometric series
/// `p^-alpha * L^alpha / (L^alpha - 1)` with `L = log p`. The value decreases in `p`,
/// so any `p <= a_k` also gives a valid bound.
pub fn geometric_tail(p: u64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let l_alpha = (p as f64).ln().powf(alpha);
    if !(l_alpha > 1.0) {
        return Err(Error::Domain(format!("(log {p})^{alpha} = {l_alpha} must exceed 1")));
    }
    Ok((p as f64).powf(-alpha) * l_alpha / (l_alpha - 1.0))
}

/// Tail bound of the tower over `n` starting at its `k`-th member, `k >= 2`.
pub fn tower_tail_bound(lat: &IteratedPrimes, n: u64, alpha: f64, k: u32) -> Result<f64> {
    if k < 2 {
        return Err(Error::Precondition(format!("the tower tail bound starts at k >= 2, got {k}")));
    }
    geometric_tail(lat.iterated_prime(n, k)?.value, alpha)
}

/// Tail bound of the diagonal starting at `p^(k)_k`, `k >= 2`.
pub fn diagonal_tail_bound(lat: &IteratedPrimes, alpha: f64, k: u32) -> Result<f64> {
    if k < 2 {
        return Err(Error::Precondition(format!("the diagonal tail bound starts at k >= 2, got {k}")));
    }
    geometric_tail(lat.iterated_prime(k as u64, k)?.value, alpha)
}

/// Tail above `x` for a tower or the diagonal: with `a_{k-1} <= x < a_k` and `k >= 2`,
/// the bound at `a_k` (or at `ceiling + 1` when `a_k` lies above the ceiling).
fn tail_above(lat: &IteratedPrimes, family: SetFamily, alpha: f64, x: u64) -> Result<Option<f64>> {
    let mut k = 1;
    let first_above = loop {
        match lat.member(family, k)? {
            Some(v) if v <= x => k += 1,
            Some(v) => break v,
            None => break lat.ceiling().saturating_add(1),
        }
    };
    if k < 2 {
        return Ok(None);
    }
    Ok(geometric_tail(first_above, alpha).ok())
}

/// Sum of `a^-alpha` over the members `a <= cutoff_x`, in increasing order of `a`.
pub fn partial_sum(lat: &IteratedPrimes, family: SetFamily, alpha: f64, cutoff_x: u64) -> Result<SeriesAccount> {
    let mut accounts = partial_sums(lat, family, alpha, &[cutoff_x])?;
    Ok(accounts.pop().expect("one cutoff"))
}

/// Partial sums at every cutoff (sorted ascending) from a single pass over the set.
/// Each account equals what [`partial_sum`] returns for its cutoff bit-for-bit.
pub fn partial_sums(lat: &IteratedPrimes, family: SetFamily, alpha: f64, cutoffs: &[u64]) -> Result<Vec<SeriesAccount>> {
    check_alpha(alpha)?;
    let family = family.validate()?;
    if cutoffs.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Precondition("cutoffs must be sorted ascending".into()));
    }
    let Some(&max_cutoff) = cutoffs.last() else {
        return Ok(Vec::new());
    };
    let mut acc = Accumulator::new(matches!(family, SetFamily::Nested(_)));
    let mut terms = 0u64;
    let mut snapshots = Vec::with_capacity(cutoffs.len());
    let mut next = 0;
    let flush = |upto: u64, acc: &Accumulator, terms: u64, snapshots: &mut Vec<(f64, u64)>, next: &mut usize| {
        while *next < cutoffs.len() && cutoffs[*next] < upto {
            snapshots.push((acc.sum, terms));
            *next += 1;
        }
    };
    lat.visit_set(family, max_cutoff, |a| {
        flush(a, &acc, terms, &mut snapshots, &mut next);
        acc.add((a as f64).powf(-alpha));
        terms += 1;
    })?;
    flush(u64::MAX, &acc, terms, &mut snapshots, &mut next);
    snapshots
        .into_iter()
        .zip(cutoffs)
        .map(|((partial_sum, terms_used), &cutoff_x)| {
            let tail_upper = match family {
                SetFamily::Nested(_) => None,
                _ => tail_above(lat, family, alpha, cutoff_x)?,
            };
            Ok(SeriesAccount { family, alpha, cutoff_x, partial_sum, tail_upper, terms_used })
        })
        .collect()
}

/// Partial sums of the depth-`k` nested series at each cutoff.
pub fn nested_convergence_probe(lat: &IteratedPrimes, k: u32, alpha: f64, cutoffs: &[u64]) -> Result<Vec<SeriesAccount>> {
    let mut sorted = cutoffs.to_vec();
    sorted.sort_unstable();
    partial_sums(lat, SetFamily::Nested(k), alpha, &sorted)
}

/// Depth `k` against depth `k + 1` at one cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct NestedComparison {
    pub shallow: SeriesAccount,
    pub deep: SeriesAccount,
    /// The deeper set is a subset, so its partial sum must be smaller whenever it drops
    /// at least one member of the shallower set below the cutoff.
    pub strictly_smaller: bool,
    /// `deep / shallow`; recorded against `(1/log 3)^alpha`, never asserted.
    pub contraction_ratio: f64,
    pub contraction_constant: f64,
}

impl Record for NestedComparison {
    fn fields(&self) -> Vec<(&'static str, String)> {
        vec![
            ("shallow", self.shallow.family.to_string()),
            ("deep", self.deep.family.to_string()),
            ("alpha", fmt_f64(self.shallow.alpha)),
            ("cutoff_x", self.shallow.cutoff_x.to_string()),
            ("shallow_sum", fmt_f64(self.shallow.partial_sum)),
            ("deep_sum", fmt_f64(self.deep.partial_sum)),
            ("strictly_smaller", self.strictly_smaller.to_string()),
            ("contraction_ratio", fmt_f64(self.contraction_ratio)),
            ("contraction_constant", fmt_f64(self.contraction_constant)),
        ]
    }
}

pub fn compare_nested(lat: &IteratedPrimes, k: u32, alpha: f64, cutoff_x: u64) -> Result<NestedComparison> {
    let shallow = partial_sum(lat, SetFamily::Nested(k), alpha, cutoff_x)?;
    let deep = partial_sum(lat, SetFamily::Nested(k + 1), alpha, cutoff_x)?;
    if shallow.terms_used > deep.terms_used && !(deep.partial_sum < shallow.partial_sum) {
        return Err(Error::Verification(format!(
            "nested:{} partial sum {} is not below nested:{k} partial sum {} at x = {cutoff_x}",
            k + 1,
            deep.partial_sum,
            shallow.partial_sum
        )));
    }
    Ok(NestedComparison {
        strictly_smaller: deep.partial_sum < shallow.partial_sum,
        contraction_ratio: deep.partial_sum / shallow.partial_sum,
        contraction_constant: 3f64.ln().recip().powf(alpha),
        shallow,
        deep,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentEstimate {
    pub family: SetFamily,
    pub estimate: f64,
    /// Largest index sampled (`n` for nested sets, `j` for towers and the diagonal).
    pub sample_n_max: u64,
    /// `(index, log index / log a_index)` for every sample.
    pub samples: Vec<(u64, f64)>,
}

impl Record for ExponentEstimate {
    fn fields(&self) -> Vec<(&'static str, String)> {
        vec![
            ("family", self.family.to_string()),
            ("estimate", fmt_f64(self.estimate)),
            ("sample_n_max", self.sample_n_max.to_string()),
            ("samples", self.samples.len().to_string()),
        ]
    }
}

/// Estimates `limsup log n / log a_n` as the maximum over the upper half of the
/// samples. Nested sets are sampled at `2, 10, 100, ...` and `n_max`; towers and the
/// diagonal at every `j <= n_max`.
pub fn exponent_estimate(lat: &IteratedPrimes, family: SetFamily, n_max: u64) -> Result<ExponentEstimate> {
    let family = family.validate()?;
    let mut samples = Vec::new();
    match family {
        SetFamily::Nested(k) => {
            if n_max < 2 {
                return Err(Error::Precondition("nested sets are sampled from n = 2".into()));
            }
            let mut ns = vec![2];
            ns.extend(crate::asymptotics::geometric_samples(10, n_max, 10));
            if *ns.last().expect("non-empty") != n_max {
                ns.push(n_max);
            }
            for n in ns {
                let a = lat.iterated_prime(n, k)?.value;
                samples.push((n, (n as f64).ln() / (a as f64).ln()));
            }
        }
        _ => {
            let j_max = u32::try_from(n_max).map_err(|_| Error::Domain(format!("depth {n_max} is too large")))?;
            if j_max < 1 {
                return Err(Error::Precondition("need at least one member".into()));
            }
            for j in 1..=j_max {
                let a = lat.member(family, j)?.ok_or(Error::DepthAboveCeiling {
                    n: if let SetFamily::Tower(n) = family { n } else { j as u64 },
                    depth: j,
                    ceiling: lat.ceiling(),
                })?;
                samples.push((j as u64, (j as f64).ln() / (a as f64).ln()));
            }
        }
    }
    let estimate = samples[samples.len() / 2..].iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    Ok(ExponentEstimate { family, estimate, sample_n_max: n_max, samples })
}
