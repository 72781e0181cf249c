//! Segmented odd-only sieve behind every other module.
//!
//! The table covers `[0, ceiling]` in fixed-size segments. Segment `s` holds the
//! integers `[s * segment_size, (s + 1) * segment_size)` and stores one bit per odd
//! integer (`bit i` is `start + 2i + 1`). Segments are sieved lazily in order; a
//! prefix array of odd-prime counts makes `prime_pi` and `nth_prime` a lookup plus a
//! popcount inside one segment.
//!
//! Bitmaps of segments below `resident_limit` stay in memory. Bitmaps above it are
//! rebuilt on demand (or read back from the on-disk cache) and kept in a small
//! recently-used set.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use crate::error::{Error, Result};

pub const MIN_SEGMENT_SIZE: u64 = 1 << 16;
pub const DEFAULT_SEGMENT_SIZE: u64 = 1 << 21;
pub const DEFAULT_CEILING: u64 = 10_000_000_000;
pub const MAX_CEILING: u64 = i64::MAX as u64;
pub const DEFAULT_RESIDENT_LIMIT: u64 = 1 << 30;

/// Environment variable that replaces the configured cache directory.
pub const CACHE_ENV: &str = "TOWER_PRIMES_CACHE";

const SMALL_PRIMES: [u64; 5] = [2, 3, 5, 7, 11];
const RECENT_SEGMENTS: usize = 16;

// Odd multiples of 3, 5, 7, 11, 13 repeat every 15015 odd integers.
const PRESIEVE_PRIMES: [u64; 5] = [3, 5, 7, 11, 13];
const PRESIEVE_PERIOD: usize = 3 * 5 * 7 * 11 * 13;

/// A 1-based index into the sequence of primes (`p_1 = 2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrimeIndex(u64);

impl PrimeIndex {
    pub fn new(n: u64) -> Option<Self> {
        (n >= 1).then_some(PrimeIndex(n))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

impl TryFrom<u64> for PrimeIndex {
    type Error = Error;

    fn try_from(n: u64) -> Result<Self> {
        PrimeIndex::new(n).ok_or_else(|| Error::Domain("prime indices start at 1".into()))
    }
}

#[derive(Debug, Clone)]
pub struct TableConfig {
    /// Largest value any query may touch.
    pub ceiling: u64,
    /// Sieve segment length in integers; a multiple of 128 and at least 2^16.
    pub segment_size: u64,
    pub cache_dir: Option<PathBuf>,
    /// Worker threads used while extending the sieved frontier.
    pub threads: usize,
    pub resident_limit: u64,
}

impl Default for TableConfig {
    fn default() -> Self {
        TableConfig {
            ceiling: DEFAULT_CEILING,
            segment_size: DEFAULT_SEGMENT_SIZE,
            cache_dir: None,
            threads: 1,
            resident_limit: DEFAULT_RESIDENT_LIMIT,
        }
    }
}

impl TableConfig {
    pub fn with_ceiling(ceiling: u64) -> Self {
        TableConfig { ceiling, ..Default::default() }
    }

    /// Applies the `TOWER_PRIMES_CACHE` override, if set.
    pub fn with_env_cache(mut self) -> Self {
        if let Some(dir) = std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()) {
            self.cache_dir = Some(PathBuf::from(dir));
        }
        self
    }

    fn validate(&self) -> Result<()> {
        if self.ceiling < 2 {
            return Err(Error::Config(format!("ceiling must be at least 2, got {}", self.ceiling)));
        }
        if self.ceiling > MAX_CEILING {
            return Err(Error::Config(format!("ceiling must not exceed 2^63-1, got {}", self.ceiling)));
        }
        if self.segment_size < MIN_SEGMENT_SIZE || !self.segment_size.is_multiple_of(128) {
            return Err(Error::Config(format!(
                "segment size must be a multiple of 128 and at least {MIN_SEGMENT_SIZE}, got {}",
                self.segment_size
            )));
        }
        if self.threads == 0 {
            return Err(Error::Config("thread count must be positive".into()));
        }
        Ok(())
    }
}

type Bitmap = Arc<Vec<u64>>;

#[derive(Default)]
struct Frontier {
    /// Odd primes up to `base_limit`.
    base: Vec<u32>,
    base_limit: u64,
    /// `cum[s]` is the number of odd primes in segments `0..s`; one entry per sieved
    /// segment plus a leading zero.
    cum: Vec<u64>,
    resident: Vec<Bitmap>,
}

impl Frontier {
    fn sieved_segments(&self) -> usize {
        self.cum.len() - 1
    }
}

/// Sieve-backed primality, prime counting and nth-prime lookup up to a fixed ceiling.
///
/// All queries take `&self`; the table may be shared across threads.
pub struct PrimeTable {
    config: TableConfig,
    total_segments: usize,
    resident_segments: usize,
    presieve: Vec<u64>,
    frontier: RwLock<Frontier>,
    recent: Mutex<Vec<(usize, Bitmap)>>,
}

impl std::fmt::Debug for PrimeTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PrimeTable")
            .field("ceiling", &self.config.ceiling)
            .field("segment_size", &self.config.segment_size)
            .field("cache_dir", &self.config.cache_dir)
            .finish_non_exhaustive()
    }
}

impl PrimeTable {
    pub fn new(config: TableConfig) -> Result<Self> {
        config.validate()?;
        if let Some(dir) = &config.cache_dir {
            fs::create_dir_all(dir)?;
        }
        let seg = config.segment_size;
        let total_segments = usize::try_from(config.ceiling / seg + 1)
            .map_err(|_| Error::Config("too many segments for this platform".into()))?;
        let resident_segments = (config.resident_limit.div_ceil(seg) as usize).min(total_segments);
        Ok(PrimeTable {
            config,
            total_segments,
            resident_segments,
            presieve: build_presieve(),
            frontier: RwLock::new(Frontier { cum: vec![0], ..Default::default() }),
            recent: Mutex::new(Vec::new()),
        })
    }

    pub fn with_ceiling(ceiling: u64) -> Result<Self> {
        Self::new(TableConfig::with_ceiling(ceiling))
    }

    pub fn ceiling(&self) -> u64 {
        self.config.ceiling
    }

    pub fn segment_size(&self) -> u64 {
        self.config.segment_size
    }

    pub fn cache_dir(&self) -> Option<&Path> {
        self.config.cache_dir.as_deref()
    }

    fn check(&self, value: u64) -> Result<()> {
        if value > self.config.ceiling {
            Err(Error::AboveCeiling { value, ceiling: self.config.ceiling })
        } else {
            Ok(())
        }
    }

    fn segment_of(&self, value: u64) -> usize {
        (value / self.config.segment_size) as usize
    }

    fn segment_start(&self, s: usize) -> u64 {
        s as u64 * self.config.segment_size
    }

    pub fn is_prime(&self, m: u64) -> Result<bool> {
        self.check(m)?;
        if m < 2 {
            return Ok(false);
        }
        if m == 2 {
            return Ok(true);
        }
        if m.is_multiple_of(2) {
            return Ok(false);
        }
        let s = self.segment_of(m);
        self.ensure_sieved(s)?;
        let bits = self.segment_bits(s)?;
        let i = ((m - self.segment_start(s) - 1) / 2) as usize;
        Ok(bits[i / 64] >> (i % 64) & 1 == 1)
    }

    /// Number of primes `<= x`.
    pub fn prime_pi(&self, x: u64) -> Result<u64> {
        self.check(x)?;
        if x < 2 {
            return Ok(0);
        }
        let s = self.segment_of(x);
        self.ensure_sieved(s)?;
        let before = self.frontier.read().expect("frontier lock").cum[s];
        let bits = self.segment_bits(s)?;
        let odd_bits = (x - self.segment_start(s)).div_ceil(2) as usize;
        Ok(1 + before + count_ones_prefix(&bits, odd_bits))
    }

    /// The `n`-th prime, or `None` when it lies above the ceiling.
    pub fn try_nth_prime(&self, n: PrimeIndex) -> Result<Option<u64>> {
        let n = n.get();
        if n <= SMALL_PRIMES.len() as u64 {
            let p = SMALL_PRIMES[(n - 1) as usize];
            return Ok((p <= self.config.ceiling).then_some(p));
        }
        // Upper bound n(log n + log log n) for n >= 6 decides how far to sieve.
        let nf = n as f64;
        let bound = (nf * (nf.ln() + nf.ln().ln())).ceil();
        let reach = if bound >= self.config.ceiling as f64 { self.config.ceiling } else { bound as u64 };
        let target = n - 1; // odd primes only; 2 is handled by the offset
        let mut s = self.segment_of(reach);
        self.ensure_sieved(s)?;
        loop {
            let found = {
                let fr = self.frontier.read().expect("frontier lock");
                fr.cum[s + 1] >= target
            };
            if found {
                break;
            }
            if s + 1 >= self.total_segments {
                return Ok(None);
            }
            s += 1;
            self.ensure_sieved(s)?;
        }
        let (seg, before) = {
            let fr = self.frontier.read().expect("frontier lock");
            let seg = fr.cum[..=s].partition_point(|&c| c < target) - 1;
            (seg, fr.cum[seg])
        };
        let bits = self.segment_bits(seg)?;
        let i = select_bit(&bits, target - before - 1).expect("prefix counts agree with bitmap");
        let p = self.segment_start(seg) + 2 * i as u64 + 1;
        Ok((p <= self.config.ceiling).then_some(p))
    }

    pub fn nth_prime(&self, n: PrimeIndex) -> Result<u64> {
        self.try_nth_prime(n)?
            .ok_or(Error::IndexAboveCeiling { n: n.get(), ceiling: self.config.ceiling })
    }

    /// Primes in `[lo, hi]`, increasing.
    pub fn primes_in_range(&self, lo: u64, hi: u64) -> Result<PrimeRange<'_>> {
        if lo > hi {
            return Err(Error::Precondition(format!("empty range [{lo}, {hi}]")));
        }
        self.check(hi)?;
        self.ensure_sieved(self.segment_of(hi))?;
        Ok(PrimeRange::new(self, lo, hi))
    }

    /// Sieves every segment up to and including `s`.
    fn ensure_sieved(&self, s: usize) -> Result<()> {
        if self.frontier.read().expect("frontier lock").sieved_segments() > s {
            return Ok(());
        }
        let mut fr = self.frontier.write().expect("frontier lock");
        let batch = 8 * self.config.threads;
        while fr.sieved_segments() <= s {
            let first = fr.sieved_segments();
            let last = (first + batch).min(self.total_segments).min(s + batch) - 1;
            self.ensure_base(&mut fr, self.segment_end(last));
            let maps = self.build_segments(&fr.base, first..=last)?;
            for (offset, bits) in maps.into_iter().enumerate() {
                let seg = first + offset;
                let count = count_ones_prefix(&bits, bits.len() * 64);
                let next = fr.cum[seg] + count;
                fr.cum.push(next);
                if seg < self.resident_segments {
                    fr.resident.push(bits);
                }
            }
        }
        Ok(())
    }

    /// Last value covered by segment `s`, clipped to the ceiling.
    fn segment_end(&self, s: usize) -> u64 {
        (self.segment_start(s) + self.config.segment_size - 1).min(self.config.ceiling)
    }

    fn ensure_base(&self, fr: &mut Frontier, hi: u64) {
        let need = isqrt(hi) + 1;
        if fr.base_limit >= need {
            return;
        }
        let limit = need.max(fr.base_limit * 2).min(isqrt(self.config.ceiling) + 1);
        fr.base = odd_primes_upto(limit);
        fr.base_limit = limit;
    }

    fn build_segments(&self, base: &[u32], range: std::ops::RangeInclusive<usize>) -> Result<Vec<Bitmap>> {
        let segs: Vec<usize> = range.collect();
        let threads = self.config.threads.min(segs.len()).max(1);
        if threads == 1 {
            return segs.iter().map(|&s| self.load_or_sieve(base, s)).collect();
        }
        let chunk = segs.len().div_ceil(threads);
        std::thread::scope(|scope| {
            let handles: Vec<_> = segs
                .chunks(chunk)
                .map(|part| scope.spawn(move || part.iter().map(|&s| self.load_or_sieve(base, s)).collect::<Result<Vec<_>>>()))
                .collect();
            let mut out = Vec::with_capacity(segs.len());
            for h in handles {
                out.extend(h.join().expect("sieve worker panicked")?);
            }
            Ok(out)
        })
    }

    fn load_or_sieve(&self, base: &[u32], s: usize) -> Result<Bitmap> {
        let start = self.segment_start(s);
        let words = (self.config.segment_size / 128) as usize;
        if let Some(dir) = &self.config.cache_dir {
            let path = segment_path(dir, start, self.config.segment_size);
            if let Some(bits) = read_segment_file(&path, words)? {
                return Ok(Arc::new(bits));
            }
            let bits = self.sieve_segment(base, s);
            write_segment_file(&path, &bits)?;
            return Ok(Arc::new(bits));
        }
        Ok(Arc::new(self.sieve_segment(base, s)))
    }

    /// Bitmap of an already-sieved segment.
    fn segment_bits(&self, s: usize) -> Result<Bitmap> {
        {
            let fr = self.frontier.read().expect("frontier lock");
            if let Some(bits) = fr.resident.get(s) {
                return Ok(bits.clone());
            }
        }
        {
            let recent = self.recent.lock().expect("recent lock");
            if let Some((_, bits)) = recent.iter().find(|(seg, _)| *seg == s) {
                return Ok(bits.clone());
            }
        }
        let bits = {
            let fr = self.frontier.read().expect("frontier lock");
            self.load_or_sieve(&fr.base, s)?
        };
        let mut recent = self.recent.lock().expect("recent lock");
        if recent.len() >= RECENT_SEGMENTS {
            recent.remove(0);
        }
        recent.push((s, bits.clone()));
        Ok(bits)
    }

    fn sieve_segment(&self, base: &[u32], s: usize) -> Vec<u64> {
        let start = self.segment_start(s);
        let nbits = (self.config.segment_size / 2) as usize;
        let mut bits = vec![0u64; nbits / 64];

        // Lay down the presieved pattern starting at odd number start + 1.
        let offset = ((start / 2) % PRESIEVE_PERIOD as u64) as usize;
        let (mut wi, sh) = (offset / 64, offset % 64);
        for w in bits.iter_mut() {
            *w = if sh == 0 {
                self.presieve[wi]
            } else {
                (self.presieve[wi] >> sh) | (self.presieve[wi + 1] << (64 - sh))
            };
            wi += 1;
            if wi == PRESIEVE_PERIOD {
                wi = 0;
            }
        }
        if s == 0 {
            bits[0] &= !1; // 1 is not prime
            for p in PRESIEVE_PRIMES {
                let i = (p - 1) / 2;
                bits[(i / 64) as usize] |= 1 << (i % 64);
            }
        }

        let end = start + self.config.segment_size; // exclusive
        for &p in base {
            let p = p as u64;
            if p <= 13 {
                continue;
            }
            let sq = p * p;
            if sq >= end {
                break;
            }
            let mut first = if sq >= start { sq } else { start.div_ceil(p) * p };
            if first % 2 == 0 {
                first += p;
            }
            let mut i = ((first - start - 1) / 2) as usize;
            let step = p as usize;
            while i < nbits {
                bits[i >> 6] &= !(1u64 << (i & 63));
                i += step;
            }
        }

        // Values above the ceiling never count as prime.
        let ceiling = self.config.ceiling;
        if end - 1 > ceiling {
            let keep = if ceiling < start { 0 } else { (ceiling - start).div_ceil(2) as usize };
            for (w, word) in bits.iter_mut().enumerate() {
                let lo = w * 64;
                if lo >= keep {
                    *word = 0;
                } else if lo + 64 > keep {
                    *word &= (1u64 << (keep - lo)) - 1;
                }
            }
        }
        bits
    }
}

fn build_presieve() -> Vec<u64> {
    // 64 periods so that whole words repeat; one extra word for shifted reads.
    let nbits = 64 * PRESIEVE_PERIOD;
    let mut words = vec![0u64; PRESIEVE_PERIOD + 1];
    for i in 0..nbits {
        let v = 2 * i as u64 + 1;
        if PRESIEVE_PRIMES.iter().all(|&p| !v.is_multiple_of(p)) {
            words[i / 64] |= 1 << (i % 64);
        }
    }
    words[PRESIEVE_PERIOD] = words[0];
    words
}

fn count_ones_prefix(bits: &[u64], nbits: usize) -> u64 {
    let full = nbits / 64;
    let mut count: u64 = bits[..full].iter().map(|w| w.count_ones() as u64).sum();
    let rem = nbits % 64;
    if rem > 0 {
        count += (bits[full] & ((1u64 << rem) - 1)).count_ones() as u64;
    }
    count
}

/// Position of the set bit with zero-based rank `rank`.
fn select_bit(bits: &[u64], mut rank: u64) -> Option<usize> {
    for (w, &word) in bits.iter().enumerate() {
        let ones = word.count_ones() as u64;
        if rank < ones {
            let mut word = word;
            for _ in 0..rank {
                word &= word - 1;
            }
            return Some(w * 64 + word.trailing_zeros() as usize);
        }
        rank -= ones;
    }
    None
}

pub(crate) fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

/// Odd primes `<= limit` by a plain sieve.
fn odd_primes_upto(limit: u64) -> Vec<u32> {
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    let mut i = 3;
    while i <= limit {
        if !composite[i] {
            out.push(i as u32);
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += 2 * i;
            }
        }
        i += 2;
    }
    out
}

pub fn segment_path(dir: &Path, start: u64, len: u64) -> PathBuf {
    dir.join(format!("seg_{start}_{len}.bits"))
}

/// Segment files hold a little-endian `u64` bit count followed by the bitmap words,
/// each little-endian.
fn read_segment_file(path: &Path, words: usize) -> Result<Option<Vec<u64>>> {
    let mut file = match fs::File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let mut raw = Vec::with_capacity(8 + words * 8);
    file.read_to_end(&mut raw)?;
    if raw.len() != 8 + words * 8 {
        return Ok(None);
    }
    let header = u64::from_le_bytes(raw[..8].try_into().expect("8 bytes"));
    if header != (words * 64) as u64 {
        return Ok(None);
    }
    let bits = raw[8..]
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    Ok(Some(bits))
}

fn write_segment_file(path: &Path, bits: &[u64]) -> Result<()> {
    let mut raw = Vec::with_capacity(8 + bits.len() * 8);
    raw.extend_from_slice(&((bits.len() * 64) as u64).to_le_bytes());
    for w in bits {
        raw.extend_from_slice(&w.to_le_bytes());
    }
    let tmp = path.with_extension("tmp");
    let mut file = fs::File::create(&tmp)?;
    file.write_all(&raw)?;
    drop(file);
    fs::rename(tmp, path)?;
    Ok(())
}

/// Iterator returned by [`PrimeTable::primes_in_range`].
pub struct PrimeRange<'a> {
    table: &'a PrimeTable,
    lo: u64,
    hi: u64,
    pending_two: bool,
    seg: usize,
    last_seg: usize,
    bits: Option<Bitmap>,
    word: usize,
    current: u64,
    failed: bool,
}

impl<'a> PrimeRange<'a> {
    fn new(table: &'a PrimeTable, lo: u64, hi: u64) -> Self {
        PrimeRange {
            table,
            lo,
            hi,
            pending_two: lo <= 2 && hi >= 2,
            seg: table.segment_of(lo),
            last_seg: table.segment_of(hi),
            bits: None,
            word: 0,
            current: 0,
            failed: false,
        }
    }

    fn load(&mut self) -> bool {
        match self.table.segment_bits(self.seg) {
            Ok(bits) => {
                let start = self.table.segment_start(self.seg);
                let first_bit = if self.lo > start { ((self.lo - start) / 2) as usize } else { 0 };
                self.word = first_bit / 64;
                self.current = bits[self.word] & (!0u64 << (first_bit % 64));
                self.bits = Some(bits);
                true
            }
            Err(_) => {
                self.failed = true;
                false
            }
        }
    }
}

impl Iterator for PrimeRange<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.pending_two {
            self.pending_two = false;
            return Some(2);
        }
        if self.failed {
            return None;
        }
        loop {
            if self.bits.is_none()
                && (self.seg > self.last_seg || !self.load()) {
                    return None;
                }
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                let v = self.table.segment_start(self.seg) + 2 * (self.word * 64 + bit) as u64 + 1;
                if v > self.hi {
                    self.seg = self.last_seg + 1;
                    self.bits = None;
                    return None;
                }
                if v < self.lo {
                    continue;
                }
                return Some(v);
            }
            let bits = self.bits.as_ref().expect("loaded");
            self.word += 1;
            if self.word < bits.len() {
                self.current = bits[self.word];
            } else {
                self.bits = None;
                self.seg += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_is_prime(m: u64) -> bool {
        m >= 2 && (2..).take_while(|d| d * d <= m).all(|d| !m.is_multiple_of(d))
    }

    fn small_table() -> PrimeTable {
        PrimeTable::new(TableConfig { ceiling: 1_000_000, segment_size: MIN_SEGMENT_SIZE, ..Default::default() }).unwrap()
    }

    #[test]
    fn primality_matches_trial_division() {
        let t = small_table();
        for m in 0..20_000 {
            assert_eq!(t.is_prime(m).unwrap(), naive_is_prime(m), "m = {m}");
        }
        assert!(!t.is_prime(1).unwrap());
        assert!(t.is_prime(2).unwrap());
    }

    #[test]
    fn known_values() {
        let t = PrimeTable::with_ceiling(10_000_000).unwrap();
        assert!(t.is_prime(9_737_333).unwrap());
        assert!(naive_is_prime(9_737_333));
        assert_eq!(t.prime_pi(1).unwrap(), 0);
        assert_eq!(t.prime_pi(100).unwrap(), 25);
        let idx = |n| PrimeIndex::new(n).unwrap();
        assert_eq!(t.nth_prime(idx(1)).unwrap(), 2);
        assert_eq!(t.nth_prime(idx(3)).unwrap(), 5);
        assert_eq!(t.nth_prime(idx(25)).unwrap(), 97);
        assert_eq!(t.nth_prime(idx(664_579)).unwrap(), 9_999_991);
    }

    #[test]
    fn ranges() {
        let t = small_table();
        let r = |lo, hi| t.primes_in_range(lo, hi).unwrap().collect::<Vec<_>>();
        assert_eq!(r(2, 10), vec![2, 3, 5, 7]);
        assert_eq!(r(90, 100), vec![97]);
        assert!(r(14, 16).is_empty());
        assert_eq!(r(0, 2), vec![2]);
        assert_eq!(r(3, 3), vec![3]);
        // crossing a segment boundary
        let lo = MIN_SEGMENT_SIZE - 100;
        let hi = MIN_SEGMENT_SIZE + 100;
        let expected: Vec<u64> = (lo..=hi).filter(|&m| naive_is_prime(m)).collect();
        assert_eq!(r(lo, hi), expected);
    }

    #[test]
    fn ceiling_errors() {
        let t = PrimeTable::with_ceiling(100).unwrap();
        assert!(matches!(t.is_prime(101), Err(Error::AboveCeiling { value: 101, ceiling: 100 })));
        assert!(t.prime_pi(101).unwrap_err().is_range());
        assert!(t.primes_in_range(0, 101).is_err());
        // p_25 = 97 fits even though the counting bound for n = 25 exceeds 100
        assert_eq!(t.nth_prime(PrimeIndex::new(25).unwrap()).unwrap(), 97);
        assert!(matches!(
            t.nth_prime(PrimeIndex::new(26).unwrap()),
            Err(Error::IndexAboveCeiling { n: 26, ceiling: 100 })
        ));
        assert_eq!(t.prime_pi(100).unwrap(), 25);
    }

    #[test]
    fn ceiling_inside_segment_is_respected() {
        let t = PrimeTable::with_ceiling(96).unwrap();
        assert_eq!(t.prime_pi(96).unwrap(), 24);
        assert_eq!(t.try_nth_prime(PrimeIndex::new(25).unwrap()).unwrap(), None);
    }

    #[test]
    fn config_validation() {
        let bad = |c: TableConfig| PrimeTable::new(c).unwrap_err();
        assert!(matches!(bad(TableConfig::with_ceiling(1)), Error::Config(_)));
        assert!(matches!(bad(TableConfig { segment_size: 1 << 10, ..Default::default() }), Error::Config(_)));
        assert!(matches!(bad(TableConfig { segment_size: (1 << 16) + 2, ..Default::default() }), Error::Config(_)));
        assert!(matches!(bad(TableConfig { threads: 0, ..Default::default() }), Error::Config(_)));
        assert!(matches!(bad(TableConfig::with_ceiling(u64::MAX)), Error::Config(_)));
        assert!(PrimeIndex::new(0).is_none());
    }

    #[test]
    fn isqrt_edges() {
        for n in [0u64, 1, 2, 3, 4, 15, 16, 17, 99, 100, u64::MAX, (1 << 62) - 1] {
            let r = isqrt(n);
            assert!(r * r <= n);
            assert!((r + 1).checked_mul(r + 1).is_none_or(|sq| sq > n));
        }
    }

    #[test]
    fn select_and_prefix_count() {
        let bits = vec![0b1011u64, 1 << 63];
        assert_eq!(count_ones_prefix(&bits, 2), 2);
        assert_eq!(count_ones_prefix(&bits, 128), 4);
        assert_eq!(select_bit(&bits, 2), Some(3));
        assert_eq!(select_bit(&bits, 3), Some(127));
        assert_eq!(select_bit(&bits, 4), None);
    }

    #[test]
    fn segment_cache_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = TableConfig {
            ceiling: 300_000,
            segment_size: MIN_SEGMENT_SIZE,
            cache_dir: Some(dir.path().to_path_buf()),
            ..Default::default()
        };
        let first = PrimeTable::new(cfg.clone()).unwrap();
        assert_eq!(first.prime_pi(300_000).unwrap(), 25_997);
        let path = segment_path(dir.path(), 0, MIN_SEGMENT_SIZE);
        let raw = fs::read(&path).unwrap();
        assert_eq!(u64::from_le_bytes(raw[..8].try_into().unwrap()), MIN_SEGMENT_SIZE / 2);
        assert_eq!(raw.len() as u64, 8 + MIN_SEGMENT_SIZE / 16);
        // a second table reads the files back
        let second = PrimeTable::new(cfg).unwrap();
        assert_eq!(second.prime_pi(300_000).unwrap(), 25_997);
        assert_eq!(second.nth_prime(PrimeIndex::new(25_997).unwrap()).unwrap(), 299_993);
    }

    #[test]
    fn threaded_extension_matches_sequential() {
        let mk = |threads| {
            PrimeTable::new(TableConfig { ceiling: 2_000_000, segment_size: MIN_SEGMENT_SIZE, threads, ..Default::default() })
                .unwrap()
        };
        let (a, b) = (mk(1), mk(3));
        for x in [0, 2, 65_535, 65_537, 1_000_003, 2_000_000] {
            assert_eq!(a.prime_pi(x).unwrap(), b.prime_pi(x).unwrap());
        }
    }

    #[test]
    fn non_resident_segments_are_rebuilt() {
        let t = PrimeTable::new(TableConfig {
            ceiling: 1_000_000,
            segment_size: MIN_SEGMENT_SIZE,
            resident_limit: 0,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(t.prime_pi(1_000_000).unwrap(), 78_498);
        assert_eq!(t.nth_prime(PrimeIndex::new(78_498).unwrap()).unwrap(), 999_983);
        assert_eq!(t.primes_in_range(999_900, 1_000_000).unwrap().count(), 8);
    }
}
