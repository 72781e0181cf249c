//! Executable forms of the explicit inequalities on `p^(k)_n` and the diagonal.
//!
//! Every check compares an exact integer against a real bound evaluated in double
//! precision. Lower bounds pass when `actual >= bound * (1 - 2^-40)` and upper bounds
//! when `actual <= bound * (1 + 2^-40)`, so rounding in the bound can never turn a
//! true inequality into a reported violation. An upper bound that overflows to
//! infinity passes and is counted separately.
//!
//! Bounds that involve `log log a` are only evaluated for `a >= 3`; cells below that
//! are listed in the report as skipped.
//!
//! The existential starting depths of the super-logarithmic upper bounds are searched
//! for constructively: [`find_k0`] scans depths upward and certifies the first one at
//! which both side conditions hold for every `l` in `2..=l_max`.

use std::fmt;

use crate::error::{Error, Result};
use crate::iterated::{IteratedPrimes, SetFamily};
use crate::record::{fmt_f64, Record};

pub const LOWER_GUARD: f64 = 1.0 - 1.0 / (1u64 << 40) as f64;
pub const UPPER_GUARD: f64 = 1.0 + 1.0 / (1u64 << 40) as f64;
pub const DEFAULT_L_MAX: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `actual >= bound`
    Lower,
    /// `actual <= bound`
    Upper,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub coords: Vec<(&'static str, u64)>,
    pub actual: f64,
    pub bound: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, v) in &self.coords {
            write!(f, "{name}={v} ")?;
        }
        write!(f, "actual={} bound={}", fmt_f64(self.actual), fmt_f64(self.bound))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub bound_id: String,
    pub range_checked: String,
    pub passed: bool,
    /// Lexicographically first failing cell in iteration order.
    pub first_violation: Option<Violation>,
    /// Smallest `actual / bound` (lower bounds) or `bound / actual` (upper bounds).
    pub min_slack: f64,
    pub min_slack_at: Vec<(&'static str, u64)>,
    pub cells_checked: u64,
    /// Upper bounds that overflowed to infinity.
    pub inf_passes: u64,
    pub skipped: Vec<String>,
}

impl BoundReport {
    pub fn new(bound_id: impl Into<String>, range_checked: impl Into<String>) -> Self {
        BoundReport {
            bound_id: bound_id.into(),
            range_checked: range_checked.into(),
            passed: true,
            first_violation: None,
            min_slack: f64::INFINITY,
            min_slack_at: Vec::new(),
            cells_checked: 0,
            inf_passes: 0,
            skipped: Vec::new(),
        }
    }

    /// Records one comparison and returns whether it held.
    pub fn record(&mut self, coords: &[(&'static str, u64)], actual: f64, bound: f64, dir: Direction) -> bool {
        self.cells_checked += 1;
        let (holds, slack) = match dir {
            Direction::Lower => {
                let slack = if bound > 0.0 { actual / bound } else { f64::INFINITY };
                (actual >= bound * LOWER_GUARD, slack)
            }
            Direction::Upper => {
                if bound.is_infinite() && bound > 0.0 {
                    self.inf_passes += 1;
                    return true;
                }
                (actual <= bound * UPPER_GUARD, bound / actual)
            }
        };
        if slack < self.min_slack {
            self.min_slack = slack;
            self.min_slack_at = coords.to_vec();
        }
        if !holds {
            self.passed = false;
            if self.first_violation.is_none() {
                self.first_violation = Some(Violation { coords: coords.to_vec(), actual, bound });
            }
        }
        holds
    }

    pub fn skip(&mut self, reason: impl Into<String>) {
        self.skipped.push(reason.into());
    }
}

fn fmt_coords(coords: &[(&'static str, u64)]) -> String {
    coords.iter().map(|(k, v)| format!("{k}:{v}")).collect::<Vec<_>>().join(",")
}

impl Record for BoundReport {
    fn fields(&self) -> Vec<(&'static str, String)> {
        vec![
            ("bound_id", self.bound_id.clone()),
            ("range_checked", self.range_checked.clone()),
            ("passed", self.passed.to_string()),
            ("first_violation", self.first_violation.as_ref().map_or_else(|| "none".into(), |v| v.to_string())),
            ("min_slack", fmt_f64(self.min_slack)),
            ("min_slack_at", fmt_coords(&self.min_slack_at)),
            ("cells_checked", self.cells_checked.to_string()),
            ("inf_passes", self.inf_passes.to_string()),
            ("skipped", self.skipped.len().to_string()),
        ]
    }
}

pub fn all_passed(reports: &[BoundReport]) -> bool {
    reports.iter().all(|r| r.passed)
}

/// `p_n >= n log n` for `1 <= n <= n_max` and `p_n <= n (log n + log log n)` for
/// `6 <= n <= n_max`. Returns the lower-bound report, then the upper.
pub fn check_rosser(lat: &IteratedPrimes, n_max: u64) -> Result<Vec<BoundReport>> {
    if n_max == 0 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    let last = lat.table().nth_prime(n_max.try_into()?)?;
    let mut lower = BoundReport::new("rosser-lower", format!("1<=n<={n_max}"));
    let mut upper = BoundReport::new("rosser-upper", format!("6<=n<={n_max}"));
    for (i, p) in lat.table().primes_in_range(2, last)?.enumerate() {
        let n = i as u64 + 1;
        let nf = n as f64;
        let log_n = nf.ln();
        lower.record(&[("n", n)], p as f64, nf * log_n, Direction::Lower);
        if n >= 6 {
            upper.record(&[("n", n)], p as f64, nf * (log_n + log_n.ln()), Direction::Upper);
        }
    }
    Ok(vec![lower, upper])
}

/// Values `a_j` for `j` in `from..=to`; range error when one is above the ceiling.
fn members(lat: &IteratedPrimes, family: SetFamily, from: u32, to: u32) -> Result<Vec<u64>> {
    (from..=to)
        .map(|j| match family {
            SetFamily::Tower(n) => Ok(lat.iterated_prime(n, j)?.value),
            SetFamily::Diagonal => Ok(lat.iterated_prime(j as u64, j)?.value),
            SetFamily::Nested(_) => Err(Error::Domain("bounds are indexed by depth; nested sets do not apply".into())),
        })
        .collect()
}

/// `prod_{i=from}^{to} (log_a + c(i) * loglog_a)` where `c` is the per-factor weight.
fn log_product(log_a: f64, from: u32, to: u32, weight: impl Fn(f64) -> f64) -> f64 {
    let loglog = log_a.ln();
    (from..=to).map(|i| log_a + weight(i as f64) * loglog).product()
}

fn i_log_i(i: f64) -> f64 {
    if i <= 1.0 {
        0.0
    } else {
        i * i.ln()
    }
}

/// Lower bounds along one tower from depth `k`:
/// `p^(j)_n >= p^(k)_n log^(j-k) p^(k)_n` and
/// `p^(j)_n >= p^(k)_n prod_{i<j-k} (log p^(k)_n + i log log p^(k)_n)` for `k <= j <= j_max`.
pub fn check_tower_lower_bounds(lat: &IteratedPrimes, n: u64, k: u32, j_max: u32) -> Result<Vec<BoundReport>> {
    let range = format!("n={n},k={k},{k}<=j<={j_max}");
    let mut power = BoundReport::new("tower-lower-power", range.clone());
    let mut product = BoundReport::new("tower-lower-product", range);
    if j_max < k {
        return Ok(vec![power, product]);
    }
    let cells = if k == 0 {
        let mut v = vec![n];
        v.extend(members(lat, SetFamily::Tower(n), 1, j_max)?);
        v
    } else {
        members(lat, SetFamily::Tower(n), k, j_max)?
    };
    lower_bounds_from(&mut power, &mut product, &cells, &[("n", n), ("k", k as u64)], k);
    Ok(vec![power, product])
}

/// Shared by towers and the diagonal: `cells[0]` is the starting member at depth `k`.
fn lower_bounds_from(
    power: &mut BoundReport,
    product: &mut BoundReport,
    cells: &[u64],
    prefix: &[(&'static str, u64)],
    k: u32,
) {
    let base = cells[0] as f64;
    let log_a = base.ln();
    let product_ok = cells[0] >= 3;
    if !product_ok {
        product.skip(format!("{}: start value {} has non-positive log log", fmt_coords(prefix), cells[0]));
    }
    for (offset, &v) in cells.iter().enumerate() {
        let j = k + offset as u32;
        let mut coords = prefix.to_vec();
        coords.push(("j", j as u64));
        power.record(&coords, v as f64, base * log_a.powi(offset as i32), Direction::Lower);
        if product_ok {
            let bound = if offset == 0 { base } else { base * log_product(log_a, 0, offset as u32 - 1, |i| i) };
            product.record(&coords, v as f64, bound, Direction::Lower);
        }
    }
}

/// Count upper bound `A(x) <= log x / log log a_k + (k - log a_k / log log a_k)` for
/// `x >= a_k`, where `a_k` is the depth-`k` member of a tower or of the diagonal.
fn count_upper_at(report: &mut BoundReport, count: u64, x: u64, a_k: u64, k: u32, coords: &[(&'static str, u64)]) {
    let log_a = (a_k as f64).ln();
    let loglog = log_a.ln();
    let bound = (x as f64).ln() / loglog + (k as f64 - log_a / loglog);
    report.record(coords, count as f64, bound, Direction::Upper);
}

pub fn check_tower_count_upper(lat: &IteratedPrimes, n: u64, k: u32, x_samples: &[u64]) -> Result<BoundReport> {
    let a_k = lat.iterated_prime(n, k)?.value;
    if a_k < 3 {
        return Err(Error::Domain(format!("p^({k})_{n} = {a_k} < 3 has non-positive log log")));
    }
    let mut report = BoundReport::new("tower-count-upper", format!("n={n},k={k},samples={}", x_samples.len()));
    for &x in x_samples {
        if x < a_k {
            return Err(Error::Precondition(format!("sample x = {x} is below p^({k})_{n} = {a_k}")));
        }
        let count = lat.count_set(SetFamily::Tower(n), x)?.count;
        count_upper_at(&mut report, count, x, a_k, k, &[("n", n), ("k", k as u64), ("x", x)]);
    }
    Ok(report)
}

/// Side conditions that let the upper-bound induction absorb constants:
/// `factor <= L^const_exponent` and
/// `factor * (L + l_weight * l log l * log L) <= L^(log l)` for every `2 <= l <= l_max`,
/// where `L = log a_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideConditions {
    pub factor: f64,
    pub const_exponent: f64,
    pub l_weight: f64,
}

impl SideConditions {
    /// Towers: `2 <= L^(2 log 2 - 1)` and `2 (L + l log l log L) <= L^(log l)`.
    pub fn tower() -> Self {
        SideConditions { factor: 2.0, const_exponent: 2.0 * 2f64.ln() - 1.0, l_weight: 1.0 }
    }

    /// Diagonal: `8 <= L^(4 log 2 - 2)` and `8 (L + 2 l log l log L) <= L^(log l)`.
    pub fn diagonal() -> Self {
        SideConditions { factor: 8.0, const_exponent: 4.0 * 2f64.ln() - 2.0, l_weight: 2.0 }
    }

    pub fn for_family(family: SetFamily) -> Self {
        match family {
            SetFamily::Diagonal => Self::diagonal(),
            _ => Self::tower(),
        }
    }

    /// Both sides of the constant condition.
    pub fn constant(&self, log_a: f64) -> (f64, f64) {
        (self.factor, log_a.powf(self.const_exponent))
    }

    /// Both sides of the per-step condition at `l`.
    pub fn step(&self, log_a: f64, l: u64) -> (f64, f64) {
        let lf = l as f64;
        let lhs = self.factor * (log_a + self.l_weight * lf * lf.ln() * log_a.ln());
        (lhs, log_a.powf(lf.ln()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SideFailure {
    pub condition: &'static str,
    pub l: Option<u64>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct K0Attempt {
    pub k: u32,
    pub value: u64,
    /// `None` when both conditions held over the whole `l` range.
    pub failure: Option<SideFailure>,
}

impl Record for K0Attempt {
    fn fields(&self) -> Vec<(&'static str, String)> {
        let (cond, l, lhs, rhs) = match &self.failure {
            Some(f) => (f.condition.to_string(), f.l.map_or("-".into(), |l| l.to_string()), fmt_f64(f.lhs), fmt_f64(f.rhs)),
            None => ("none".into(), "-".into(), "-".into(), "-".into()),
        };
        vec![
            ("k", self.k.to_string()),
            ("value", self.value.to_string()),
            ("holds", self.failure.is_none().to_string()),
            ("failed_condition", cond),
            ("l", l),
            ("lhs", lhs),
            ("rhs", rhs),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KZeroCertificate {
    pub bound_id: String,
    pub family: SetFamily,
    pub k0: u32,
    pub l_range_checked: (u64, u64),
    /// Filled in once the main upper bounds have been verified from `k0`.
    pub verified_j_range: Option<(u32, u32)>,
}

impl Record for KZeroCertificate {
    fn fields(&self) -> Vec<(&'static str, String)> {
        vec![
            ("bound_id", self.bound_id.clone()),
            ("family", self.family.to_string()),
            ("k0", self.k0.to_string()),
            ("l_range_checked", format!("{}..={}", self.l_range_checked.0, self.l_range_checked.1)),
            (
                "verified_j_range",
                self.verified_j_range.map_or_else(|| "none".into(), |(a, b)| format!("{a}..={b}")),
            ),
        ]
    }
}

/// Outcome of a starting-depth search. A missing certificate is a normal outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct K0Search {
    pub family: SetFamily,
    pub l_max: u64,
    pub attempts: Vec<K0Attempt>,
    pub certificate: Option<KZeroCertificate>,
    /// True when every depth from the certified one upward also satisfies the conditions.
    pub monotone: bool,
}

fn side_failure(cond: &SideConditions, log_a: f64, l_max: u64) -> Option<SideFailure> {
    let (lhs, rhs) = cond.constant(log_a);
    if !(lhs <= rhs) {
        return Some(SideFailure { condition: "constant", l: None, lhs, rhs });
    }
    (2..=l_max).find_map(|l| {
        let (lhs, rhs) = cond.step(log_a, l);
        (!(lhs <= rhs)).then_some(SideFailure { condition: "step", l: Some(l), lhs, rhs })
    })
}

/// Scans every computable depth `k >= 1` of a tower or of the diagonal.
pub fn find_k0(lat: &IteratedPrimes, family: SetFamily, l_max: u64) -> Result<K0Search> {
    if l_max < 2 {
        return Err(Error::Domain("l_max must be at least 2".into()));
    }
    let cond = SideConditions::for_family(family);
    let depth = lat.depth_limit(family)?;
    let mut attempts = Vec::new();
    for k in 1..=depth {
        let value = lat.member(family, k)?.expect("within depth limit");
        let failure = side_failure(&cond, (value as f64).ln(), l_max);
        attempts.push(K0Attempt { k, value, failure });
    }
    let first = attempts.iter().position(|a| a.failure.is_none());
    let monotone = first.is_some_and(|i| attempts[i..].iter().all(|a| a.failure.is_none()));
    let certificate = first.map(|i| KZeroCertificate {
        bound_id: match family {
            SetFamily::Diagonal => "diag-upper-k0".into(),
            _ => "tower-upper-k0".into(),
        },
        family,
        k0: attempts[i].k,
        l_range_checked: (2, l_max),
        verified_j_range: None,
    });
    Ok(K0Search { family, l_max, attempts, certificate, monotone })
}

pub fn find_k0_tower(lat: &IteratedPrimes, n: u64, l_max: u64) -> Result<K0Search> {
    find_k0(lat, SetFamily::Tower(n).validate()?, l_max)
}

/// Upper bounds along one tower for all `k_start <= k <= j <= j_max`:
/// - `p^(j) <= p^(k) L^((j-k+1) log(j-k+1))`
/// - `p^(j) <= 2^(j-k) p^(k) prod_{i=1}^{j-k} (L + i log i log L)`
/// - `p^(j) <= p^(k) L^((j-k)^alpha)`
///
/// with `L = log p^(k)_n`. The starting depth is taken as given; see
/// [`check_tower_upper_main`] for the certified entry point.
pub fn check_tower_upper(lat: &IteratedPrimes, n: u64, k_start: u32, j_max: u32, alpha: f64) -> Result<Vec<BoundReport>> {
    upper_bounds(lat, SetFamily::Tower(n).validate()?, k_start, j_max, alpha)
}

pub fn check_tower_upper_main(
    lat: &IteratedPrimes,
    n: u64,
    certificate: &mut KZeroCertificate,
    j_max: u32,
    alpha: f64,
) -> Result<Vec<BoundReport>> {
    if certificate.family != SetFamily::Tower(n) {
        return Err(Error::Precondition(format!("certificate is for {}, not tower:{n}", certificate.family)));
    }
    let reports = check_tower_upper(lat, n, certificate.k0, j_max, alpha)?;
    if all_passed(&reports) {
        certificate.verified_j_range = Some((certificate.k0, j_max));
    }
    Ok(reports)
}

fn upper_bounds(lat: &IteratedPrimes, family: SetFamily, k_start: u32, j_max: u32, alpha: f64) -> Result<Vec<BoundReport>> {
    if !(alpha > 1.0) {
        return Err(Error::Domain(format!("alpha must exceed 1, got {alpha}")));
    }
    if k_start == 0 {
        return Err(Error::Domain("starting depth must be at least 1".into()));
    }
    let diag = family == SetFamily::Diagonal;
    let (tag, step_mult, exp_mult, squared) = if diag { ("diag", 8.0f64, 2.0, true) } else { ("tower", 2.0f64, 1.0, false) };
    let range = format!("{family},{k_start}<=k<=j<={j_max}");
    let mut llog = BoundReport::new(format!("{tag}-upper-llog-exponent"), range.clone());
    let mut product = BoundReport::new(format!("{tag}-upper-step-product"), range.clone());
    let mut power = BoundReport::new(format!("{tag}-upper-power-alpha"), format!("{range},alpha={alpha}"));
    if j_max < k_start {
        return Ok(vec![llog, product, power]);
    }
    let cells = members(lat, family, k_start, j_max)?;
    for (ki, &a_k) in cells.iter().enumerate() {
        let k = k_start + ki as u32;
        let base = a_k as f64;
        let log_a = base.ln();
        let product_ok = a_k >= 3;
        if !product_ok {
            product.skip(format!("k={k}: start value {a_k} has non-positive log log"));
        }
        for (ji, &a_j) in cells.iter().enumerate().skip(ki) {
            let j = k_start + ji as u32;
            let coords = [("k", k as u64), ("j", j as u64)];
            let d = (j - k) as f64;
            let e = exp_mult * i_log_i(d + 1.0);
            llog.record(&coords, a_j as f64, base * log_a.powf(e), Direction::Upper);
            if product_ok {
                let factors = if j == k { 1.0 } else { log_product(log_a, 1, j - k, i_log_i) };
                let factors = if squared { factors * factors } else { factors };
                let bound = step_mult.powi((j - k) as i32) * base * factors;
                product.record(&coords, a_j as f64, bound, Direction::Upper);
            }
            power.record(&coords, a_j as f64, base * log_a.powf(d.powf(alpha)), Direction::Upper);
        }
    }
    Ok(vec![llog, product, power])
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalReport {
    pub j_max: u32,
    pub reports: Vec<BoundReport>,
    pub k0: K0Search,
}

impl DiagonalReport {
    pub fn report(&self, id: &str) -> Option<&BoundReport> {
        self.reports.iter().find(|r| r.bound_id == id)
    }
}

#[derive(Debug, Clone)]
pub struct DiagonalOptions {
    pub j_max: u32,
    pub alpha: f64,
    pub l_max: u64,
    pub count_samples: Vec<u64>,
    /// Explicit start for the upper bounds when no depth is certified.
    pub upper_from: Option<u32>,
}

/// Diagonal analogues of the tower checks, plus the two diagonal step facts
/// `p^(j+1)_{j+1} <= 8 a_j log^2 a_j` and `p^(j-1)_{j+1} <= p^(j)_j` for `3 <= j < j_max`.
pub fn check_diagonal_bounds(lat: &IteratedPrimes, opts: &DiagonalOptions) -> Result<DiagonalReport> {
    let j_max = opts.j_max;
    if j_max == 0 {
        return Err(Error::Domain("j_max must be at least 1".into()));
    }
    let cells = members(lat, SetFamily::Diagonal, 1, j_max)?;
    let a = |j: u32| cells[j as usize - 1];
    let range = format!("1<=k<=j<={j_max}");
    let mut power = BoundReport::new("diag-lower-power", range.clone());
    let mut product = BoundReport::new("diag-lower-product", range);
    for k in 1..=j_max {
        lower_bounds_from(&mut power, &mut product, &cells[k as usize - 1..], &[("k", k as u64)], k);
    }

    let step_range = format!("3<=j<{j_max}");
    let mut step = BoundReport::new("diag-step-square", step_range.clone());
    let mut shift = BoundReport::new("diag-index-shift", step_range);
    for j in 3..j_max {
        let aj = a(j) as f64;
        step.record(&[("j", j as u64)], a(j + 1) as f64, 8.0 * aj * aj.ln().powi(2), Direction::Upper);
        let shifted = lat.iterated_prime(j as u64 + 1, j - 1)?.value;
        shift.record(&[("j", j as u64)], shifted as f64, aj, Direction::Upper);
    }

    let mut count = BoundReport::new("diag-count-upper", format!("2<=k<={j_max},samples={}", opts.count_samples.len()));
    if let Some(&x_max) = opts.count_samples.iter().max() {
        let members_le = lat.enumerate_set(SetFamily::Diagonal, x_max)?;
        for k in 2..=j_max {
            let a_k = a(k);
            for &x in opts.count_samples.iter().filter(|&&x| x >= a_k) {
                let c = members_le.partition_point(|&m| m <= x) as u64;
                count_upper_at(&mut count, c, x, a_k, k, &[("k", k as u64), ("x", x)]);
            }
        }
    }

    let k0 = find_k0(lat, SetFamily::Diagonal, opts.l_max)?;
    let start = k0.certificate.as_ref().map(|c| c.k0).or(opts.upper_from);
    let mut reports = vec![power, product, step, shift, count];
    match start {
        Some(k_start) => reports.extend(upper_bounds(lat, SetFamily::Diagonal, k_start, j_max, opts.alpha)?),
        None => {
            for id in ["diag-upper-llog-exponent", "diag-upper-step-product", "diag-upper-power-alpha"] {
                let mut r = BoundReport::new(id, "not run");
                r.skip("no certified starting depth within the computable range");
                reports.push(r);
            }
        }
    }
    Ok(DiagonalReport { j_max, reports, k0 })
}
