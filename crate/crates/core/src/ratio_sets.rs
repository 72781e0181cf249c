//! Quotients of set members: nearest-ratio witnesses for the nested sets, and
//! consecutive-ratio certificates showing that towers and the diagonal spread apart.

use crate::bounds::LOWER_GUARD;
use crate::error::{Error, Result};
use crate::iterated::{IteratedPrimes, SetFamily};
use crate::record::{fmt_f64, Record};

#[derive(Debug, Clone, PartialEq)]
pub struct RatioWitness {
    pub k: u32,
    pub target: f64,
    pub epsilon: f64,
    pub a: u64,
    pub b: u64,
    /// `|a/b - target|`
    pub achieved_error: f64,
    pub search_bound: u64,
    /// `achieved_error <= epsilon`; otherwise the pair is only the best found.
    pub sufficient: bool,
}

impl RatioWitness {
    /// `target a b error`
    pub fn to_line(&self) -> String {
        format!("{} {} {} {}", fmt_f64(self.target), self.a, self.b, fmt_f64(self.achieved_error))
    }
}

impl Record for RatioWitness {
    fn fields(&self) -> Vec<(&'static str, String)> {
        vec![
            ("family", SetFamily::Nested(self.k).to_string()),
            ("target", fmt_f64(self.target)),
            ("epsilon", fmt_f64(self.epsilon)),
            ("a", self.a.to_string()),
            ("b", self.b.to_string()),
            ("achieved_error", fmt_f64(self.achieved_error)),
            ("search_bound", self.search_bound.to_string()),
            ("sufficient", self.sufficient.to_string()),
        ]
    }
}

pub fn ratio_error(a: u64, b: u64, target: f64) -> f64 {
    (a as f64 / b as f64 - target).abs()
}

/// The pair `(a, b, error)` from a sorted member list whose quotient is nearest to
/// `target`. For each `a` only the two neighbours of `a / target` can be optimal, since
/// `a / b` is monotone in `b`. Ties go to the smaller `b`, then to the earlier `a`.
pub fn best_ratio_pair(members: &[u64], target: f64) -> Option<(u64, u64, f64)> {
    let mut best: Option<(u64, u64, f64)> = None;
    for &a in members {
        let q = a as f64 / target;
        let idx = members.partition_point(|&b| (b as f64) < q);
        for i in [idx.wrapping_sub(1), idx] {
            let Some(&b) = members.get(i) else { continue };
            let err = ratio_error(a, b, target);
            if best.is_none_or(|(_, _, e)| err < e) {
                best = Some((a, b, err));
            }
        }
    }
    best
}

/// Searches the depth-`k` nested set below `search_bound` for `a / b` near `target`.
pub fn find_ratio_witness(lat: &IteratedPrimes, k: u32, target: f64, epsilon: f64, search_bound: u64) -> Result<RatioWitness> {
    if !(target.is_finite() && target > 0.0) {
        return Err(Error::Domain(format!("target must be positive and finite, got {target}")));
    }
    if !(epsilon >= 0.0) {
        return Err(Error::Domain(format!("epsilon must be non-negative, got {epsilon}")));
    }
    let members = lat.enumerate_set(SetFamily::Nested(k), search_bound)?;
    let (a, b, achieved_error) = best_ratio_pair(&members, target)
        .ok_or_else(|| Error::EmptySet(format!("nested:{k} has no members <= {search_bound}")))?;
    Ok(RatioWitness { k, target, epsilon, a, b, achieved_error, search_bound, sufficient: achieved_error <= epsilon })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsolationStep {
    pub j: u32,
    pub a_j: u64,
    pub a_next: u64,
    /// `a_{j+1} / a_j`
    pub ratio: f64,
    /// `log a_j`, the per-step lower bound on the ratio
    pub log_bound: f64,
    pub holds: bool,
    /// Diagonal only: `p^(j)_{j+1}` and whether `a_{j+1} >= p^(j)_{j+1} log p^(j)_{j+1}`.
    pub intermediate: Option<(u64, bool)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsolationCertificate {
    pub family: SetFamily,
    pub steps: Vec<IsolationStep>,
    /// Minimum consecutive ratio over all computed steps.
    pub consecutive_ratio_floor: f64,
    /// Minimum over steps `j >= 2`; `None` with fewer than two steps.
    pub floor_from_second: Option<f64>,
    /// Consecutive ratios strictly increase across the computed steps.
    pub increasing: bool,
    /// The ceiling stopped the scan before the requested `j_max`.
    pub truncated: bool,
}

impl IsolationCertificate {
    /// Every per-step inequality holds and every ratio exceeds 1.
    pub fn holds(&self) -> bool {
        self.steps.iter().all(|s| s.holds && s.ratio > 1.0 && s.intermediate.is_none_or(|(_, ok)| ok))
    }

    pub fn j_max(&self) -> u32 {
        self.steps.last().map_or(0, |s| s.j)
    }
}

impl Record for IsolationCertificate {
    fn fields(&self) -> Vec<(&'static str, String)> {
        vec![
            ("family", self.family.to_string()),
            ("j_range", format!("1..={}", self.j_max())),
            ("holds", self.holds().to_string()),
            ("consecutive_ratio_floor", fmt_f64(self.consecutive_ratio_floor)),
            ("floor_from_second", self.floor_from_second.map_or_else(|| "unknown".into(), fmt_f64)),
            ("increasing", self.increasing.to_string()),
            ("truncated", self.truncated.to_string()),
        ]
    }
}

fn tower_or_diagonal(family: SetFamily) -> Result<SetFamily> {
    match family.validate()? {
        SetFamily::Nested(_) => Err(Error::Domain("consecutive ratios are defined for towers and the diagonal".into())),
        f => Ok(f),
    }
}

/// Members `a_1..=a_{j_max+1}`, stopping early at the ceiling.
fn leading_members(lat: &IteratedPrimes, family: SetFamily, j_max: u32) -> Result<(Vec<u64>, bool)> {
    let mut members = Vec::new();
    for j in 1..=j_max + 1 {
        match lat.member(family, j)? {
            Some(v) => members.push(v),
            None => return Ok((members, true)),
        }
    }
    Ok((members, false))
}

/// Checks `a_{j+1} >= a_j log a_j` for `1 <= j <= j_max` (and, on the diagonal, the
/// sharper intermediate step through `p^(j)_{j+1}`), recording the consecutive ratios.
pub fn isolation_certificate(lat: &IteratedPrimes, family: SetFamily, j_max: u32) -> Result<IsolationCertificate> {
    let family = tower_or_diagonal(family)?;
    if j_max < 1 {
        return Err(Error::Precondition("need j_max >= 1".into()));
    }
    let (members, truncated) = leading_members(lat, family, j_max)?;
    if members.len() < 2 {
        return Err(Error::DepthAboveCeiling {
            n: if let SetFamily::Tower(n) = family { n } else { members.len() as u64 + 1 },
            depth: members.len() as u32 + 1,
            ceiling: lat.ceiling(),
        });
    }
    let mut steps = Vec::with_capacity(members.len() - 1);
    for (i, w) in members.windows(2).enumerate() {
        let j = i as u32 + 1;
        let (a, next) = (w[0], w[1]);
        let log_bound = (a as f64).ln();
        let holds = next as f64 >= a as f64 * log_bound * LOWER_GUARD;
        let intermediate = match family {
            SetFamily::Diagonal => {
                let mid = lat.iterated_prime(j as u64 + 1, j)?.value;
                Some((mid, next as f64 >= mid as f64 * (mid as f64).ln() * LOWER_GUARD))
            }
            _ => None,
        };
        steps.push(IsolationStep { j, a_j: a, a_next: next, ratio: next as f64 / a as f64, log_bound, holds, intermediate });
    }
    let floor = |s: &[IsolationStep]| s.iter().map(|s| s.ratio).fold(f64::INFINITY, f64::min);
    Ok(IsolationCertificate {
        family,
        consecutive_ratio_floor: floor(&steps),
        floor_from_second: (steps.len() >= 2).then(|| floor(&steps[1..])),
        increasing: steps.windows(2).all(|w| w[1].ratio > w[0].ratio),
        truncated,
        steps,
    })
}

/// `(j, a_{j+1} / a_j)` for `1 <= j <= j_max`.
pub fn ratio_gap_scan(lat: &IteratedPrimes, family: SetFamily, j_max: u32) -> Result<Vec<(u32, f64)>> {
    let family = tower_or_diagonal(family)?;
    let (members, truncated) = leading_members(lat, family, j_max)?;
    if truncated {
        return Err(Error::DepthAboveCeiling {
            n: if let SetFamily::Tower(n) = family { n } else { members.len() as u64 + 1 },
            depth: members.len() as u32 + 1,
            ceiling: lat.ceiling(),
        });
    }
    Ok(members.windows(2).enumerate().map(|(i, w)| (i as u32 + 1, w[1] as f64 / w[0] as f64)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat() -> IteratedPrimes {
        IteratedPrimes::with_ceiling(20_000_000).unwrap()
    }

    fn all_pairs(members: &[u64], target: f64) -> f64 {
        members
            .iter()
            .flat_map(|&a| members.iter().map(move |&b| ratio_error(a, b, target)))
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn unit_target_is_exact() {
        let l = lat();
        for k in 0..3 {
            let w = find_ratio_witness(&l, k, 1.0, 0.0, 1000).unwrap();
            assert_eq!(w.achieved_error, 0.0);
            assert!(w.sufficient);
            assert_eq!(w.a, w.b);
            assert_eq!(w.a, l.iterated_prime(1, k).unwrap().value);
        }
    }

    #[test]
    fn half_among_primes() {
        let l = lat();
        let w = find_ratio_witness(&l, 1, 0.5, 1e-4, 1_000_000).unwrap();
        assert!(w.sufficient);
        assert_eq!(w.achieved_error, ratio_error(w.a, w.b, 0.5));
        assert!(l.table().is_prime(w.a).unwrap() && l.table().is_prime(w.b).unwrap());
    }

    #[test]
    fn matches_all_pairs_on_small_sets() {
        let l = lat();
        for k in 1..=3 {
            let members = l.enumerate_set(SetFamily::Nested(k), 3000).unwrap();
            for target in [0.5, 0.9, 1.0, 2.75, 10.0, 1e-6, 1e6] {
                let (_, _, e) = best_ratio_pair(&members, target).unwrap();
                assert_eq!(e, all_pairs(&members, target), "k={k} target={target}");
            }
        }
    }

    #[test]
    fn ties_prefer_smaller_b() {
        // 10/4 = 2.5 and 10/5 = 2.0 are equally far from 2.25
        assert_eq!(best_ratio_pair(&[4, 5, 10], 2.25), Some((10, 4, 0.25)));
    }

    #[test]
    fn empty_and_insufficient() {
        let l = lat();
        assert!(matches!(find_ratio_witness(&l, 2, 1.0, 0.1, 2), Err(Error::EmptySet(_))));
        let w = find_ratio_witness(&l, 1, 1e9, 1e-3, 100).unwrap();
        assert!(!w.sufficient);
        assert_eq!((w.a, w.b), (97, 2));
        assert_eq!(w.to_line(), format!("1000000000.0 97 2 {}", fmt_f64(w.achieved_error)));
    }

    #[test]
    fn isolation_examples() {
        let l = lat();
        let c = isolation_certificate(&l, SetFamily::Tower(1), 4).unwrap();
        assert!(c.holds());
        assert_eq!(c.steps[0].ratio, 1.5);
        assert!((c.steps[3].ratio - 31.0 / 11.0).abs() < 1e-15);
        assert!((c.steps[3].log_bound - 11f64.ln()).abs() < 1e-15);
        assert_eq!(c.consecutive_ratio_floor, 1.5);
        assert_eq!(c.floor_from_second, Some(5.0 / 3.0));
        assert!(c.increasing && !c.truncated);

        let d = isolation_certificate(&l, SetFamily::Diagonal, 3).unwrap();
        assert!(d.holds());
        // p^(3)_4 = p_17 = 59 sits between p^(3)_3 = 31 and p^(4)_4
        assert_eq!(d.steps[2].intermediate.unwrap().0, 59);
        assert_eq!(d.steps[2].a_next, 277);
    }

    #[test]
    fn isolation_truncates() {
        let l = IteratedPrimes::with_ceiling(1000).unwrap();
        let c = isolation_certificate(&l, SetFamily::Tower(1), 10).unwrap();
        assert!(c.truncated);
        assert_eq!(c.j_max(), 6);
        assert!(ratio_gap_scan(&l, SetFamily::Tower(1), 10).unwrap_err().is_range());
    }

    #[test]
    fn gap_scan_examples() {
        let l = lat();
        let t = ratio_gap_scan(&l, SetFamily::Tower(1), 4).unwrap();
        assert_eq!(t.iter().map(|s| s.0).collect::<Vec<_>>(), vec![1, 2, 3, 4]);
        assert_eq!(t[0].1, 1.5);
        assert!((t[1].1 - 1.667).abs() < 1e-3 && t[2].1 == 2.2 && (t[3].1 - 2.818).abs() < 1e-3);
        let d = ratio_gap_scan(&l, SetFamily::Diagonal, 2).unwrap();
        assert_eq!(d, vec![(1, 2.5), (2, 6.2)]);
        assert_eq!(ratio_gap_scan(&l, SetFamily::Diagonal, 1).unwrap().len(), 1);
        assert!(ratio_gap_scan(&l, SetFamily::Nested(1), 1).is_err());
    }
}
