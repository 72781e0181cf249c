//! Ratio traces for the asymptotic claims, and data-only experiments.
//!
//! Nothing here asserts a limit. A trace is a list of `(argument, ratio)` samples with
//! a summary taken after discarding the first [`BURN_IN`] samples. The only hard
//! check is the pointwise comparison in [`trace_tower_over_diagonal`].

use crate::error::{Error, Result};
use crate::iterated::{IteratedPrimes, SetFamily};
use crate::record::{fmt_f64, Record};

pub const BURN_IN: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendSummary {
    pub last_value: f64,
    pub max_after_burn_in: f64,
    pub min_after_burn_in: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioTrace {
    pub claim_id: String,
    pub samples: Vec<(f64, f64)>,
    pub summary: TrendSummary,
    /// Set when the ceiling cut the requested range short.
    pub truncated: bool,
}

impl RatioTrace {
    /// Builds a trace; the summary uses every sample when there are no more than
    /// [`BURN_IN`] of them.
    pub fn new(claim_id: impl Into<String>, samples: Vec<(f64, f64)>, truncated: bool) -> Result<Self> {
        let claim_id = claim_id.into();
        if samples.is_empty() {
            return Err(Error::Precondition(format!("trace {claim_id} has no computable samples")));
        }
        let tail = if samples.len() > BURN_IN { &samples[BURN_IN..] } else { &samples[..] };
        let summary = TrendSummary {
            last_value: samples.last().expect("non-empty").1,
            max_after_burn_in: tail.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max),
            min_after_burn_in: tail.iter().map(|s| s.1).fold(f64::INFINITY, f64::min),
        };
        Ok(RatioTrace { claim_id, samples, summary, truncated })
    }

    pub fn ratios(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.1)
    }

    /// Ratio recorded at `arg`, if sampled.
    pub fn at(&self, arg: f64) -> Option<f64> {
        self.samples.iter().find(|s| s.0 == arg).map(|s| s.1)
    }
}

impl Record for RatioTrace {
    fn fields(&self) -> Vec<(&'static str, String)> {
        vec![
            ("claim_id", self.claim_id.clone()),
            ("samples", self.samples.len().to_string()),
            ("last_value", fmt_f64(self.summary.last_value)),
            ("max_after_burn_in", fmt_f64(self.summary.max_after_burn_in)),
            ("min_after_burn_in", fmt_f64(self.summary.min_after_burn_in)),
            ("truncated", self.truncated.to_string()),
        ]
    }
}

/// `lo, lo*ratio, lo*ratio^2, ...` up to `hi`.
pub fn geometric_samples(lo: u64, hi: u64, ratio: u64) -> Vec<u64> {
    assert!(lo >= 1 && ratio >= 2, "geometric samples need lo >= 1 and ratio >= 2");
    let mut out = Vec::new();
    let mut x = lo;
    while x <= hi {
        out.push(x);
        match x.checked_mul(ratio) {
            Some(next) => x = next,
            None => break,
        }
    }
    out
}

/// `count` integers spread geometrically over `[lo, hi]`, both ends included, with
/// duplicates from rounding removed.
pub fn log_spaced(lo: u64, hi: u64, count: usize) -> Vec<u64> {
    assert!(lo >= 1 && lo <= hi, "log-spaced samples need 1 <= lo <= hi");
    if count <= 1 || lo == hi {
        return vec![lo];
    }
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut out: Vec<u64> = (0..count)
        .map(|i| {
            if i + 1 == count {
                hi
            } else {
                ((a + (b - a) * i as f64 / (count - 1) as f64).exp().round() as u64).clamp(lo, hi)
            }
        })
        .collect();
    out.dedup();
    out
}

/// Collects samples until the first range error, which marks the trace truncated.
fn collect<I>(claim_id: &str, args: I, mut f: impl FnMut(u64) -> Result<Option<f64>>) -> Result<RatioTrace>
where
    I: IntoIterator<Item = u64>,
{
    let mut samples = Vec::new();
    let mut truncated = false;
    for a in args {
        match f(a) {
            Ok(Some(r)) => samples.push((a as f64, r)),
            Ok(None) => {}
            Err(e) if e.is_range() => {
                truncated = true;
                if samples.is_empty() {
                    return Err(e);
                }
                break;
            }
            Err(e) => return Err(e),
        }
    }
    RatioTrace::new(claim_id, samples, truncated)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthTraces {
    /// `p^(k)_n / (n log^k n)`
    pub asymptotic: RatioTrace,
    /// `p^(k)_{n+1} / p^(k)_n`
    pub successive: RatioTrace,
    /// `log p^(k)_n / log n`
    pub log_ratio: RatioTrace,
}

/// The three growth ratios of one nested set at the sampled `n`.
pub fn trace_growth(lat: &IteratedPrimes, k: u32, ns: &[u64]) -> Result<GrowthTraces> {
    let value = |n: u64| lat.iterated_prime(n, k).map(|c| c.value as f64);
    let asymptotic = collect("growth-asymptotic", ns.iter().copied(), |n| {
        let nf = n as f64;
        let denom = nf * nf.ln().powi(k as i32);
        if denom <= 0.0 {
            return Ok(None);
        }
        Ok(Some(value(n)? / denom))
    })?;
    let successive = collect("growth-successive", ns.iter().copied(), |n| Ok(Some(value(n + 1)? / value(n)?)))?;
    let log_ratio = collect("growth-log-ratio", ns.iter().copied().filter(|&n| n >= 2), |n| {
        Ok(Some(value(n)?.ln() / (n as f64).ln()))
    })?;
    Ok(GrowthTraces { asymptotic, successive, log_ratio })
}

/// `H_k(x) = A_k(x) log^k x / x` for the nested set of depth `k`; samples need `x >= 2`.
pub fn trace_density(lat: &IteratedPrimes, k: u32, xs: &[u64]) -> Result<RatioTrace> {
    collect("density", xs.iter().copied(), |x| {
        if x < 2 {
            return Err(Error::Precondition("density samples need x >= 2".into()));
        }
        let count = lat.count_set(SetFamily::Nested(k), x)?.count as f64;
        let xf = x as f64;
        Ok(Some(count * xf.ln().powi(k as i32) / xf))
    })
}

/// `p^(k+1)_n / (p^(k)_n log p^(k)_n)` for `1 <= k <= k_max`.
pub fn trace_tower_step(lat: &IteratedPrimes, n: u64, k_max: u32) -> Result<RatioTrace> {
    collect("tower-step", 1..=k_max as u64, |k| {
        let a = lat.iterated_prime(n, k as u32)?.value as f64;
        let b = lat.iterated_prime(n, k as u32 + 1)?.value as f64;
        Ok(Some(b / (a * a.ln())))
    })
}

/// `log a_j / (j log j)` for `2 <= j <= j_max` along a tower or the diagonal.
pub fn trace_log_growth(lat: &IteratedPrimes, family: SetFamily, j_max: u32) -> Result<RatioTrace> {
    let id = match family {
        SetFamily::Diagonal => "diagonal-log-growth",
        SetFamily::Tower(_) => "tower-log-growth",
        SetFamily::Nested(_) => return Err(Error::Domain("log growth is traced along towers or the diagonal".into())),
    };
    collect(id, 2..=j_max as u64, |j| {
        let a = lat.member(family, j as u32)?.ok_or(Error::DepthAboveCeiling {
            n: if let SetFamily::Tower(n) = family { n } else { j },
            depth: j as u32,
            ceiling: lat.ceiling(),
        })?;
        let jf = j as f64;
        Ok(Some((a as f64).ln() / (jf * jf.ln())))
    })
}

/// `p^(k)_{k+1} / p^(k)_k` for `1 <= k <= k_max`.
pub fn experiment_neighbour_ratio(lat: &IteratedPrimes, k_max: u32) -> Result<RatioTrace> {
    collect("neighbour-ratio", 1..=k_max as u64, |k| {
        let next = lat.iterated_prime(k + 1, k as u32)?.value as f64;
        let diag = lat.iterated_prime(k, k as u32)?.value as f64;
        Ok(Some(next / diag))
    })
}

/// `p^(k)_n / p^(k)_k` for `n <= k <= k_max`.
pub fn experiment_row_over_diagonal(lat: &IteratedPrimes, n: u64, k_max: u32) -> Result<RatioTrace> {
    if n == 0 {
        return Err(Error::Domain("row index must be at least 1".into()));
    }
    collect("row-over-diagonal", n..=k_max as u64, |k| {
        let row = lat.iterated_prime(n, k as u32)?.value as f64;
        let diag = lat.iterated_prime(k, k as u32)?.value as f64;
        Ok(Some(row / diag))
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub model: String,
    pub family: SetFamily,
    pub c: f64,
    pub beta: f64,
    pub residual_norm: f64,
    pub sample_range: (u64, u64),
    pub samples: usize,
}

impl Record for FitResult {
    fn fields(&self) -> Vec<(&'static str, String)> {
        vec![
            ("model", self.model.clone()),
            ("family", self.family.to_string()),
            ("c", fmt_f64(self.c)),
            ("beta", fmt_f64(self.beta)),
            ("residual_norm", fmt_f64(self.residual_norm)),
            ("sample_range", format!("{}..={}", self.sample_range.0, self.sample_range.1)),
            ("samples", self.samples.to_string()),
        ]
    }
}

/// Ordinary least squares for `count(x) - log x = log c + beta log log x`, i.e.
/// `exp(count(x)) ~ c x log^beta x`.
pub fn fit_exp_counting(lat: &IteratedPrimes, family: SetFamily, xs: &[u64]) -> Result<FitResult> {
    if matches!(family, SetFamily::Nested(_)) {
        return Err(Error::Domain("the exp-count model applies to towers and the diagonal".into()));
    }
    if xs.len() < 3 {
        return Err(Error::DegenerateFit(format!("need at least 3 samples, got {}", xs.len())));
    }
    if xs.iter().any(|&x| x < 2) {
        return Err(Error::Precondition("fit samples need x >= 2".into()));
    }
    let mut points = Vec::with_capacity(xs.len());
    for &x in xs {
        let count = lat.count_set(family, x)?.count as f64;
        let lx = (x as f64).ln();
        points.push((lx.ln(), count - lx));
    }
    let m = points.len() as f64;
    let mean_u = points.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_v = points.iter().map(|p| p.1).sum::<f64>() / m;
    let suu: f64 = points.iter().map(|p| (p.0 - mean_u).powi(2)).sum();
    if suu == 0.0 {
        return Err(Error::DegenerateFit("all samples share the same log log x".into()));
    }
    let suv: f64 = points.iter().map(|p| (p.0 - mean_u) * (p.1 - mean_v)).sum();
    let beta = suv / suu;
    let log_c = mean_v - beta * mean_u;
    let residual_norm = points.iter().map(|p| (p.1 - log_c - beta * p.0).powi(2)).sum::<f64>().sqrt();
    Ok(FitResult {
        model: "exp-count ~ c*x*log^beta(x)".into(),
        family,
        c: log_c.exp(),
        beta,
        residual_norm,
        sample_range: (*xs.iter().min().expect("non-empty"), *xs.iter().max().expect("non-empty")),
        samples: xs.len(),
    })
}

/// Ratio of the tower count to the diagonal count at each sample. For samples at or
/// above `p^(n)_n` the tower count must not fall below the diagonal count; a sample
/// that breaks this is a verification error.
pub fn trace_tower_over_diagonal(lat: &IteratedPrimes, n: u64, xs: &[u64]) -> Result<RatioTrace> {
    let threshold = lat.try_iterated_prime(n, n.try_into().map_err(|_| Error::Domain("row index too large".into()))?)?;
    collect("tower-over-diagonal", xs.iter().copied(), |x| {
        let diag = lat.count_set(SetFamily::Diagonal, x)?.count;
        if diag == 0 {
            return Err(Error::Precondition(format!("no diagonal member is <= {x}")));
        }
        let tower = lat.count_set(SetFamily::Tower(n), x)?.count;
        if threshold.is_some_and(|t| x >= t) && tower < diag {
            return Err(Error::Verification(format!("tower:{n} count {tower} below diagonal count {diag} at x = {x}")));
        }
        Ok(Some(tower as f64 / diag as f64))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat() -> IteratedPrimes {
        IteratedPrimes::with_ceiling(20_000_000).unwrap()
    }

    #[test]
    fn samples() {
        assert_eq!(geometric_samples(1, 1000, 10), vec![1, 10, 100, 1000]);
        assert_eq!(geometric_samples(3, 100, 10), vec![3, 30]);
        assert_eq!(geometric_samples(u64::MAX / 2, u64::MAX, 10), vec![u64::MAX / 2]);
    }

    #[test]
    fn spread() {
        assert_eq!(log_spaced(1, 1000, 4), vec![1, 10, 100, 1000]);
        assert_eq!(log_spaced(5, 5, 10), vec![5]);
        let s = log_spaced(3, 10_000_000_000, 50);
        assert_eq!(s.len(), 50);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        assert_eq!((s[0], s[49]), (3, 10_000_000_000));
        assert_eq!(log_spaced(1, 3, 10), vec![1, 2, 3]);
    }

    #[test]
    fn growth_at_depth_zero_is_identity() {
        let l = lat();
        let t = trace_growth(&l, 0, &[1, 2, 10, 1000]).unwrap();
        assert!(t.asymptotic.ratios().all(|r| r == 1.0));
        assert!(t.log_ratio.ratios().all(|r| r == 1.0));
        assert_eq!(t.log_ratio.samples.len(), 3);
        assert_eq!(t.successive.at(10.0), Some(1.1));
    }

    #[test]
    fn growth_at_depth_one() {
        let l = lat();
        let t = trace_growth(&l, 1, &[1_000_000]).unwrap();
        let expected = 15_485_863.0 / (1e6 * 1e6f64.ln());
        assert!((t.asymptotic.at(1e6).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 1.1209).abs() < 1e-4);
    }

    #[test]
    fn growth_truncates_at_ceiling() {
        let l = IteratedPrimes::with_ceiling(1000).unwrap();
        let t = trace_growth(&l, 1, &[10, 100, 1000]).unwrap();
        assert!(t.asymptotic.truncated);
        assert_eq!(t.asymptotic.samples.len(), 2);
        assert!(trace_growth(&l, 1, &[10_000]).unwrap_err().is_range());
    }

    #[test]
    fn density_examples() {
        let l = lat();
        let t = trace_density(&l, 0, &[2, 10, 12345]).unwrap();
        assert!(t.ratios().all(|r| r == 1.0));
        let t = trace_density(&l, 1, &[10_000_000]).unwrap();
        let expected = 664_579.0 * 1e7f64.ln() / 1e7;
        assert_eq!(t.summary.last_value, expected);
        assert!(trace_density(&l, 1, &[1]).is_err());
    }

    #[test]
    fn tower_step_examples() {
        let l = lat();
        let t = trace_tower_step(&l, 1, 4).unwrap();
        assert!((t.at(1.0).unwrap() - 3.0 / (2.0 * 2f64.ln())).abs() < 1e-12);
        assert!((t.at(4.0).unwrap() - 31.0 / (11.0 * 11f64.ln())).abs() < 1e-12);
        assert!((t.at(1.0).unwrap() - 2.164).abs() < 1e-3);
        assert!((t.at(4.0).unwrap() - 1.175).abs() < 1e-3);
    }

    #[test]
    fn log_growth_examples() {
        let l = lat();
        let t = trace_log_growth(&l, SetFamily::Tower(1), 3).unwrap();
        assert!((t.at(2.0).unwrap() - 3f64.ln() / (2.0 * 2f64.ln())).abs() < 1e-12);
        let d = trace_log_growth(&l, SetFamily::Diagonal, 3).unwrap();
        assert!((d.at(3.0).unwrap() - 31f64.ln() / (3.0 * 3f64.ln())).abs() < 1e-12);
        assert!((d.at(3.0).unwrap() - 1.0417).abs() < 5e-4);
        assert!(trace_log_growth(&l, SetFamily::Nested(1), 3).is_err());
    }

    #[test]
    fn experiments() {
        let l = lat();
        let q = experiment_neighbour_ratio(&l, 3).unwrap();
        assert_eq!(q.ratios().collect::<Vec<_>>(), vec![1.5, 11.0 / 5.0, 59.0 / 31.0]);
        let h = experiment_row_over_diagonal(&l, 1, 3).unwrap();
        assert_eq!(h.at(1.0), Some(1.0));
        assert_eq!(h.at(3.0), Some(5.0 / 31.0));
        let h = experiment_row_over_diagonal(&l, 2, 4).unwrap();
        assert_eq!(h.at(2.0), Some(1.0));
        assert_eq!(h.at(4.0), Some(31.0 / 277.0));
    }

    #[test]
    fn fit_needs_three_samples() {
        let l = lat();
        assert!(matches!(fit_exp_counting(&l, SetFamily::Tower(1), &[100, 1000]), Err(Error::DegenerateFit(_))));
        let f = fit_exp_counting(&l, SetFamily::Tower(1), &geometric_samples(1000, 10_000_000, 10)).unwrap();
        assert_eq!(f.samples, 5);
        assert!(f.c > 0.0 && f.beta.is_finite() && f.residual_norm >= 0.0);
        // three collinear points in (log log x, count - log x) fit exactly
        let xs = [100, 1000, 10_000];
        let f = fit_exp_counting(&l, SetFamily::Diagonal, &xs).unwrap();
        assert!(f.residual_norm >= 0.0);
    }

    #[test]
    fn tower_over_diagonal_examples() {
        let l = lat();
        let t = trace_tower_over_diagonal(&l, 1, &[2, 31, 10_000_000]).unwrap();
        assert_eq!(t.at(2.0), Some(1.0));
        assert_eq!(t.at(31.0), Some(5.0 / 3.0));
        assert!(t.ratios().all(|r| r >= 1.0));
        assert!(matches!(trace_tower_over_diagonal(&l, 1, &[1]), Err(Error::Precondition(_))));
    }
}
