//! Iterated prime indexing `p^(k)_n` and the sets built from it.
//!
//! `p^(0)_n = n` and `p^(k+1)_n = p_{p^(k)_n}`. Three families of sets come out of
//! the matrix `[p^(k)_n]`: the nested sets (one value of `k`, all `n`), the towers
//! (one row `n`, all `k >= 1`) and the diagonal `{p^(k)_k}`.

use std::collections::HashMap;
use std::fmt;
use std::fs::{self, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::prime_engine::{PrimeIndex, PrimeTable};

/// Largest number of elements `enumerate_set` emits for the nested set of depth 0.
pub const NATURALS_ENUMERATION_CAP: u64 = 10_000_000;

pub const MEMO_FILE: &str = "iterated.memo";

/// One entry `p^(k)_n` of the matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub n: u64,
    pub k: u32,
    pub value: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetFamily {
    /// `{p^(k)_n : n >= 1}`; depth 0 is the positive integers, depth 1 the primes.
    Nested(u32),
    /// `{p^(k)_n : k >= 1}` for a fixed `n >= 1`.
    Tower(u64),
    /// `{p^(k)_k : k >= 1}`.
    Diagonal,
}

impl SetFamily {
    pub fn validate(self) -> Result<Self> {
        match self {
            SetFamily::Tower(0) => Err(Error::Domain("tower index must be at least 1".into())),
            f => Ok(f),
        }
    }
}

impl fmt::Display for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetFamily::Nested(k) => write!(f, "nested:{k}"),
            SetFamily::Tower(n) => write!(f, "tower:{n}"),
            SetFamily::Diagonal => write!(f, "diagonal"),
        }
    }
}

impl FromStr for SetFamily {
    type Err = Error;

    /// Accepts `nested:K`, `tower:N` and `diagonal`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Domain(format!("unrecognised set family `{s}` (expected nested:K, tower:N or diagonal)"));
        if s == "diagonal" || s == "diag" {
            return Ok(SetFamily::Diagonal);
        }
        let (kind, param) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "nested" => param.parse().map(SetFamily::Nested).map_err(|_| bad()),
            "tower" => param.parse().map(SetFamily::Tower).map_err(|_| bad())?.validate(),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountSample {
    pub x: u64,
    pub count: u64,
    pub family: SetFamily,
}

/// How two towers `n < m` relate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailRelation {
    Disjoint,
    /// `m = p^(k)_n`; the tower of `m` is the tower of `n` minus its first `k` members.
    Contained(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountingDifference {
    pub n: u64,
    pub m: u64,
    pub x: u64,
    /// The unique `j0` with `p^(j0)_n <= m < p^(j0+1)_n`.
    pub j0: u32,
    pub difference: i64,
    pub within_band: bool,
}

/// Memoized iteration on top of a [`PrimeTable`].
pub struct IteratedPrimes {
    table: Arc<PrimeTable>,
    memo: Mutex<HashMap<(u64, u32), u64>>,
    memo_path: Option<PathBuf>,
}

impl fmt::Debug for IteratedPrimes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IteratedPrimes").field("table", &self.table).finish_non_exhaustive()
    }
}

impl IteratedPrimes {
    /// Wraps a table; when the table has a cache directory the memo file there is
    /// loaded and appended to.
    pub fn new(table: impl Into<Arc<PrimeTable>>) -> Result<Self> {
        let table = table.into();
        let memo_path = table.cache_dir().map(|d| d.join(MEMO_FILE));
        let mut memo = HashMap::new();
        if let Some(path) = &memo_path {
            if path.exists() {
                let reader = BufReader::new(fs::File::open(path)?);
                for line in reader.lines() {
                    let line = line?;
                    let mut it = line.split_whitespace().map(str::parse::<u64>);
                    if let (Some(Ok(n)), Some(Ok(k)), Some(Ok(v))) = (it.next(), it.next(), it.next()) {
                        if v <= table.ceiling() {
                            memo.insert((n, k as u32), v);
                        }
                    }
                }
            }
        }
        Ok(IteratedPrimes { table, memo: Mutex::new(memo), memo_path })
    }

    pub fn with_ceiling(ceiling: u64) -> Result<Self> {
        Self::new(PrimeTable::with_ceiling(ceiling)?)
    }

    pub fn table(&self) -> &PrimeTable {
        &self.table
    }

    pub fn ceiling(&self) -> u64 {
        self.table.ceiling()
    }

    fn remember(&self, n: u64, k: u32, value: u64) -> Result<()> {
        let fresh = self.memo.lock().expect("memo lock").insert((n, k), value).is_none();
        if fresh {
            if let Some(path) = &self.memo_path {
                let mut f = OpenOptions::new().create(true).append(true).open(path)?;
                writeln!(f, "{n} {k} {value}")?;
            }
        }
        Ok(())
    }

    /// `p^(k)_n`, or `Err(depth)` with the first depth whose value exceeds the ceiling.
    fn iterate(&self, n: u64, k: u32) -> Result<std::result::Result<u64, u32>> {
        if n == 0 {
            return Err(Error::Domain("row index n must be at least 1".into()));
        }
        if n > self.ceiling() {
            return Ok(Err(0));
        }
        let mut value = n;
        let mut start = 1;
        {
            let memo = self.memo.lock().expect("memo lock");
            for j in (1..=k).rev() {
                if let Some(&v) = memo.get(&(n, j)) {
                    value = v;
                    start = j + 1;
                    break;
                }
            }
        }
        for j in start..=k {
            match self.table.try_nth_prime(PrimeIndex::new(value).expect("values are positive"))? {
                Some(p) => {
                    value = p;
                    self.remember(n, j, p)?;
                }
                None => return Ok(Err(j)),
            }
        }
        Ok(Ok(value))
    }

    pub fn iterated_prime(&self, n: u64, k: u32) -> Result<Cell> {
        match self.iterate(n, k)? {
            Ok(value) => Ok(Cell { n, k, value }),
            Err(depth) => Err(Error::DepthAboveCeiling { n, depth, ceiling: self.ceiling() }),
        }
    }

    /// `p^(k)_n`, or `None` when it lies above the ceiling.
    pub fn try_iterated_prime(&self, n: u64, k: u32) -> Result<Option<u64>> {
        Ok(self.iterate(n, k)?.ok())
    }

    /// Checks `p_{p^(k)_n} = p^(k)_{p_n}`.
    pub fn commutation_check(&self, n: u64, k: u32) -> Result<bool> {
        let outer = self.iterated_prime(n, k + 1)?.value;
        let first = self.table.nth_prime(PrimeIndex::try_from(n)?)?;
        let mut value = first;
        for _ in 0..k {
            value = self.table.nth_prime(PrimeIndex::try_from(value)?)?;
        }
        Ok(outer == value)
    }

    /// Member `j >= 1` of a tower or the diagonal; `None` above the ceiling.
    pub fn member(&self, family: SetFamily, j: u32) -> Result<Option<u64>> {
        match family.validate()? {
            SetFamily::Tower(n) => self.try_iterated_prime(n, j),
            SetFamily::Diagonal => self.try_iterated_prime(j as u64, j),
            SetFamily::Nested(_) => Err(Error::Domain("members of nested sets are indexed by n, not depth".into())),
        }
    }

    /// Largest `j` whose tower or diagonal member stays under the ceiling.
    pub fn depth_limit(&self, family: SetFamily) -> Result<u32> {
        let mut j = 0;
        while self.member(family, j + 1)?.is_some() {
            j += 1;
        }
        Ok(j)
    }

    pub fn enumerate_set(&self, family: SetFamily, x: u64) -> Result<Vec<u64>> {
        if matches!(family, SetFamily::Nested(0)) && x > NATURALS_ENUMERATION_CAP {
            return Err(Error::Precondition(format!(
                "enumerating the positive integers is capped at {NATURALS_ENUMERATION_CAP}"
            )));
        }
        let mut out = Vec::new();
        self.visit_set(family, x, |v| out.push(v))?;
        Ok(out)
    }

    /// Calls `f` on every member `<= x` in increasing order without collecting them.
    pub fn visit_set(&self, family: SetFamily, x: u64, mut f: impl FnMut(u64)) -> Result<()> {
        if x > self.ceiling() {
            return Err(Error::AboveCeiling { value: x, ceiling: self.ceiling() });
        }
        match family.validate()? {
            SetFamily::Nested(0) => (1..=x).for_each(f),
            SetFamily::Nested(1) => {
                if x >= 2 {
                    self.table.primes_in_range(2, x)?.for_each(f);
                }
            }
            SetFamily::Nested(k) => {
                // p_i is in the depth-k set iff i is in the depth-(k-1) set.
                if x < 2 {
                    return Ok(());
                }
                let indices = self.enumerate_set(SetFamily::Nested(k - 1), self.table.prime_pi(x)?)?;
                let mut wanted = indices.into_iter().peekable();
                for (i, p) in self.table.primes_in_range(2, x)?.enumerate() {
                    match wanted.peek() {
                        Some(&w) if w == i as u64 + 1 => {
                            f(p);
                            wanted.next();
                        }
                        Some(_) => {}
                        None => break,
                    }
                }
            }
            family => {
                let mut j = 1;
                while let Some(v) = self.member(family, j)? {
                    if v > x {
                        break;
                    }
                    f(v);
                    j += 1;
                }
            }
        }
        Ok(())
    }

    pub fn count_set(&self, family: SetFamily, x: u64) -> Result<CountSample> {
        if x > self.ceiling() {
            return Err(Error::AboveCeiling { value: x, ceiling: self.ceiling() });
        }
        let count = match family.validate()? {
            // p^(k)_n <= x iff n <= pi^k(x)
            SetFamily::Nested(k) => {
                let mut c = x;
                for _ in 0..k {
                    c = self.table.prime_pi(c)?;
                }
                c
            }
            f => self.enumerate_set(f, x)?.len() as u64,
        };
        Ok(CountSample { x, count, family })
    }

    /// Largest `k` with `m` in the nested set of depth `k`, by following `m -> pi(m)`
    /// while the current value is prime.
    pub fn tower_level(&self, m: u64) -> Result<u32> {
        if m == 0 {
            return Err(Error::Domain("tower level is defined for m >= 1".into()));
        }
        let mut m = m;
        let mut level = 0;
        while self.table.is_prime(m)? {
            m = self.table.prime_pi(m)?;
            level += 1;
        }
        Ok(level)
    }

    pub fn tail_intersection(&self, n: u64, m: u64) -> Result<TailRelation> {
        if !(1 <= n && n < m) {
            return Err(Error::Precondition(format!("need 1 <= n < m, got n = {n}, m = {m}")));
        }
        if m > self.ceiling() {
            return Err(Error::AboveCeiling { value: m, ceiling: self.ceiling() });
        }
        let mut k = 0;
        let mut value = n;
        while value < m {
            k += 1;
            value = self.iterated_prime(n, k)?.value;
        }
        Ok(if value == m { TailRelation::Contained(k) } else { TailRelation::Disjoint })
    }

    /// The unique `j0` with `p^(j0)_n <= m < p^(j0+1)_n` (requires `n <= m`).
    pub fn bracket_index(&self, n: u64, m: u64) -> Result<u32> {
        if !(1 <= n && n <= m) {
            return Err(Error::Precondition(format!("need 1 <= n <= m, got n = {n}, m = {m}")));
        }
        let mut j = 0;
        loop {
            match self.try_iterated_prime(n, j + 1)? {
                Some(v) if v <= m => j += 1,
                Some(_) => return Ok(j),
                None => return Err(Error::DepthAboveCeiling { n, depth: j + 1, ceiling: self.ceiling() }),
            }
        }
    }

    pub fn counting_difference(&self, n: u64, m: u64, x: u64) -> Result<CountingDifference> {
        if !(1 <= n && n < m) {
            return Err(Error::Precondition(format!("need 1 <= n < m, got n = {n}, m = {m}")));
        }
        let j0 = self.bracket_index(n, m)?;
        let upper = self.iterated_prime(n, j0 + 1)?.value;
        if x < upper {
            return Err(Error::Precondition(format!("x = {x} is below p^({})_{n} = {upper}", j0 + 1)));
        }
        let a = self.count_set(SetFamily::Tower(n), x)?.count as i64;
        let b = self.count_set(SetFamily::Tower(m), x)?.count as i64;
        let difference = a - b;
        let within_band = difference == j0 as i64 || difference == j0 as i64 + 1;
        Ok(CountingDifference { n, m, x, j0, difference, within_band })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prime_engine::TableConfig;

    fn lattice(ceiling: u64) -> IteratedPrimes {
        IteratedPrimes::with_ceiling(ceiling).unwrap()
    }

    #[test]
    fn anchors() {
        let t = lattice(10_000_000);
        let v = |n, k| t.iterated_prime(n, k).unwrap().value;
        for n in [1, 7, 1000] {
            assert_eq!(v(n, 0), n);
        }
        assert_eq!(v(1, 2), 3);
        assert_eq!(v(1, 4), 11);
        assert_eq!(v(3, 3), 31);
        assert_eq!(v(5, 2), 31);
        assert_eq!(v(1, 11), 9_737_333);
    }

    #[test]
    fn depth_error_names_first_failing_depth() {
        let t = lattice(1000);
        // tower of 1: 2, 3, 5, 11, 31, 127, 709, 5381
        match t.iterated_prime(1, 9) {
            Err(Error::DepthAboveCeiling { n: 1, depth: 8, ceiling: 1000 }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(t.try_iterated_prime(1, 7).unwrap(), Some(709));
        assert_eq!(t.depth_limit(SetFamily::Tower(1)).unwrap(), 7);
        assert!(matches!(t.iterated_prime(0, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn commutation_examples() {
        let t = lattice(1_000_000);
        assert!(t.commutation_check(2, 1).unwrap());
        assert!(t.commutation_check(4, 2).unwrap());
        assert!(t.commutation_check(1, 0).unwrap());
    }

    #[test]
    fn enumeration_examples() {
        let t = lattice(1_000_000);
        let e = |f, x| t.enumerate_set(f, x).unwrap();
        assert_eq!(e(SetFamily::Nested(1), 10), vec![2, 3, 5, 7]);
        assert_eq!(e(SetFamily::Nested(2), 31), vec![3, 5, 11, 17, 31]);
        assert_eq!(e(SetFamily::Tower(1), 127), vec![2, 3, 5, 11, 31, 127]);
        assert_eq!(e(SetFamily::Diagonal, 31), vec![2, 5, 31]);
        assert_eq!(e(SetFamily::Nested(0), 5), vec![1, 2, 3, 4, 5]);
        assert!(e(SetFamily::Nested(3), 4).is_empty());
        assert!(matches!(t.enumerate_set(SetFamily::Tower(0), 10), Err(Error::Domain(_))));
    }

    #[test]
    fn naturals_enumeration_is_capped() {
        let t = lattice(100_000_000);
        assert!(matches!(t.enumerate_set(SetFamily::Nested(0), 10_000_001), Err(Error::Precondition(_))));
        assert_eq!(t.count_set(SetFamily::Nested(0), 10_000_001).unwrap().count, 10_000_001);
    }

    #[test]
    fn count_examples() {
        let t = lattice(1_000_000);
        let c = |f, x| t.count_set(f, x).unwrap().count;
        assert_eq!(c(SetFamily::Nested(0), 10), 10);
        assert_eq!(c(SetFamily::Nested(2), 31), 5);
        assert_eq!(c(SetFamily::Tower(1), 709), 7);
        assert_eq!(c(SetFamily::Tower(1), 708), 6);
        assert_eq!(c(SetFamily::Nested(3), 1), 0);
    }

    #[test]
    fn tower_level_examples() {
        let t = lattice(1_000_000);
        assert_eq!(t.tower_level(4).unwrap(), 0);
        assert_eq!(t.tower_level(11).unwrap(), 4);
        assert_eq!(t.tower_level(17).unwrap(), 2);
        assert_eq!(t.tower_level(1).unwrap(), 0);
        assert!(t.tower_level(0).is_err());
    }

    #[test]
    fn tail_examples() {
        let t = lattice(1_000_000);
        assert_eq!(t.tail_intersection(1, 2).unwrap(), TailRelation::Contained(1));
        assert_eq!(t.tail_intersection(1, 11).unwrap(), TailRelation::Contained(4));
        assert_eq!(t.tail_intersection(2, 4).unwrap(), TailRelation::Disjoint);
        assert!(matches!(t.tail_intersection(3, 3), Err(Error::Precondition(_))));
    }

    #[test]
    fn counting_difference_examples() {
        let t = lattice(1_000_000);
        let r = t.counting_difference(1, 2, 31).unwrap();
        assert_eq!((r.j0, r.difference, r.within_band), (1, 1, true));
        let r = t.counting_difference(1, 4, 127).unwrap();
        assert_eq!(r.j0, 2);
        assert!(r.within_band && (r.difference == 2 || r.difference == 3));
        assert!(t.counting_difference(2, 3, 1_000_000).unwrap().within_band);
        assert!(matches!(t.counting_difference(1, 4, 4), Err(Error::Precondition(_))));
    }

    #[test]
    fn family_parsing() {
        assert_eq!("nested:2".parse::<SetFamily>().unwrap(), SetFamily::Nested(2));
        assert_eq!("tower:7".parse::<SetFamily>().unwrap(), SetFamily::Tower(7));
        assert_eq!("diagonal".parse::<SetFamily>().unwrap(), SetFamily::Diagonal);
        assert!("tower:0".parse::<SetFamily>().is_err());
        assert!("column:1".parse::<SetFamily>().is_err());
        assert_eq!(SetFamily::Tower(3).to_string(), "tower:3");
    }

    #[test]
    fn memo_file_persists_and_reloads() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = TableConfig { ceiling: 100_000, cache_dir: Some(dir.path().into()), ..Default::default() };
        let t = IteratedPrimes::new(PrimeTable::new(cfg.clone()).unwrap()).unwrap();
        assert_eq!(t.iterated_prime(1, 7).unwrap().value, 709);
        let text = fs::read_to_string(dir.path().join(MEMO_FILE)).unwrap();
        assert!(text.lines().any(|l| l == "1 7 709"));
        assert_eq!(text.lines().count(), 7);
        let again = IteratedPrimes::new(PrimeTable::new(cfg).unwrap()).unwrap();
        assert_eq!(again.memo.lock().unwrap().get(&(1, 4)), Some(&11));
        assert_eq!(again.iterated_prime(1, 8).unwrap().value, 5381);
    }
}
