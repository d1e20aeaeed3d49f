//! Correlated NK(C,S) performance landscapes.
//!
//! The decision vector has `M = P·N` bits split into `P` contiguous agent
//! blocks. Task `i` owns a contribution table indexed by the bits of its
//! dependency list `deps[i]`: itself, `K` other tasks of the same block and
//! `C` tasks in each of `S` other blocks. Team performance is the mean of the
//! agents' block means.
//!
//! Dependency patterns are packed most-significant-bit first in `deps`
//! order, so `deps[i] = [i, j]` with `x_i = 1, x_j = 0` reads table entry
//! `0b10 = 2`.

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::ops::Range;

use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Largest `M` for which landscapes are built (and therefore enumerated).
pub const ENUMERATION_BUDGET: usize = 20;

/// Rejections tolerated before falling back to a circulant coupling.
const MAX_REJECTIONS: usize = 10_000;

/// An `M`-bit decision vector partitioned into `P` blocks of `N` bits.
///
/// Task `i` is stored at bit `M - 1 - i` of the mask, so comparing masks as
/// integers orders configurations lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TeamConfig {
    mask: u64,
    m: u8,
    n: u8,
}

impl TeamConfig {
    /// All-zero configuration.
    pub fn zeros(m: usize, n: usize) -> Self {
        assert!(m <= 63 && n >= 1 && m.is_multiple_of(n), "invalid config shape m={m} n={n}");
        TeamConfig {
            mask: 0,
            m: m as u8,
            n: n as u8,
        }
    }

    /// Builds a configuration from a mask in lexicographic layout (bit
    /// `m - 1` is task 0). Bits above `m` are dropped.
    pub fn from_mask(mask: u64, m: usize, n: usize) -> Self {
        let mut cfg = Self::zeros(m, n);
        cfg.mask = mask & low_bits(m);
        cfg
    }

    pub fn from_bits(bits: &[bool], n: usize) -> Self {
        let mut cfg = Self::zeros(bits.len(), n);
        for (i, &b) in bits.iter().enumerate() {
            if b {
                cfg = cfg.flip(i);
            }
        }
        cfg
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn len(&self) -> usize {
        self.m as usize
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn block_size(&self) -> usize {
        self.n as usize
    }

    pub fn agents(&self) -> usize {
        self.len() / self.block_size()
    }

    #[inline]
    pub fn bit(&self, i: usize) -> bool {
        debug_assert!(i < self.len());
        (self.mask >> (self.m as usize - 1 - i)) & 1 == 1
    }

    #[inline]
    pub fn flip(self, i: usize) -> Self {
        debug_assert!(i < self.len());
        TeamConfig {
            mask: self.mask ^ (1 << (self.m as usize - 1 - i)),
            ..self
        }
    }

    /// Task indices owned by agent `p`.
    pub fn block(&self, p: usize) -> Range<usize> {
        let n = self.block_size();
        p * n..(p + 1) * n
    }

    /// Task indices of agent `p`'s private sub-block (the first `N - n_s`).
    pub fn private(&self, p: usize, n_s: usize) -> Range<usize> {
        let b = self.block(p);
        b.start..b.end - n_s
    }

    /// Task indices of agent `p`'s social sub-block (the last `n_s`).
    pub fn social(&self, p: usize, n_s: usize) -> Range<usize> {
        let b = self.block(p);
        b.end - n_s..b.end
    }

    /// Agent `p`'s bits with every bit outside its block taken from `other`.
    pub fn splice_block(self, p: usize, other: &TeamConfig) -> Self {
        let block_mask = self.block_mask(p);
        TeamConfig {
            mask: (other.mask & !block_mask) | (self.mask & block_mask),
            ..self
        }
    }

    fn block_mask(&self, p: usize) -> u64 {
        let n = self.block_size();
        let shift = self.len() - (p + 1) * n;
        low_bits(n) << shift
    }

    pub fn bits(&self) -> Vec<bool> {
        (0..self.len()).map(|i| self.bit(i)).collect()
    }

    pub fn hamming(&self, other: &TeamConfig) -> u32 {
        (self.mask ^ other.mask).count_ones()
    }
}

impl std::fmt::Display for TeamConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for p in 0..self.agents() {
            if p > 0 {
                f.write_char(' ')?;
            }
            for i in self.block(p) {
                f.write_char(if self.bit(i) { '1' } else { '0' })?;
            }
        }
        Ok(())
    }
}

fn low_bits(k: usize) -> u64 {
    if k >= 64 {
        u64::MAX
    } else {
        (1u64 << k) - 1
    }
}

/// Which tasks feed which contribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionStructure {
    m: usize,
    p: usize,
    n: usize,
    k: usize,
    c: usize,
    s: usize,
    deps: Vec<Vec<usize>>,
}

impl InteractionStructure {
    /// Samples a regular, block-symmetric coupling structure.
    ///
    /// One within-block internal pattern and one external pattern (relative
    /// agent offset plus position) are drawn and replicated across agents.
    /// Each is rejection-sampled until every position is used exactly as
    /// often as it uses others; after [`MAX_REJECTIONS`] attempts a circulant
    /// pattern is used instead.
    pub fn build<R: Rng + ?Sized>(
        p: usize,
        n: usize,
        k: usize,
        c: usize,
        s: usize,
        rng: &mut R,
    ) -> Result<Self> {
        check_shape(p, n, k, c, s)?;
        let s = if c == 0 { 0 } else { s };
        let internal = sample_internal(n, k, rng);
        let external = sample_external(p, n, c, s, rng);
        let deps = assemble_deps(p, n, &internal, &external);
        let structure = InteractionStructure {
            m: p * n,
            p,
            n,
            k,
            c,
            s,
            deps,
        };
        debug_assert!(structure.validate().is_ok());
        Ok(structure)
    }

    /// Wraps explicit dependency lists after checking every invariant.
    pub fn from_deps(
        p: usize,
        n: usize,
        k: usize,
        c: usize,
        s: usize,
        deps: Vec<Vec<usize>>,
    ) -> Result<Self> {
        check_shape(p, n, k, c, s)?;
        let s = if c == 0 { 0 } else { s };
        let structure = InteractionStructure {
            m: p * n,
            p,
            n,
            k,
            c,
            s,
            deps,
        };
        structure.validate()?;
        Ok(structure)
    }

    pub fn m(&self) -> usize {
        self.m
    }
    pub fn p(&self) -> usize {
        self.p
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn c(&self) -> usize {
        self.c
    }
    pub fn s(&self) -> usize {
        self.s
    }

    /// Number of bits feeding each contribution: `1 + K + C·S`.
    pub fn arity(&self) -> usize {
        1 + self.k + self.c * self.s
    }

    pub fn deps(&self, i: usize) -> &[usize] {
        &self.deps[i]
    }

    pub fn all_deps(&self) -> &[Vec<usize>] {
        &self.deps
    }

    fn agent_of(&self, i: usize) -> usize {
        i / self.n
    }

    /// Checks every structural invariant, naming the first one violated.
    pub fn validate(&self) -> Result<()> {
        let (m, n, p) = (self.m, self.n, self.p);
        if self.deps.len() != m {
            return Err(Error::param(format!("expected {m} dependency lists, got {}", self.deps.len())));
        }
        let mut internal_in = vec![0usize; m];
        let mut external_in = vec![0usize; m];
        for (i, deps) in self.deps.iter().enumerate() {
            if deps.len() != self.arity() {
                return Err(Error::param(format!("deps[{i}] has {} entries, expected {}", deps.len(), self.arity())));
            }
            if deps[0] != i {
                return Err(Error::param(format!("deps[{i}] must start with {i}")));
            }
            let mut seen = deps.clone();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != deps.len() || deps.iter().any(|&d| d >= m) {
                return Err(Error::param(format!("deps[{i}] has duplicate or out-of-range entries")));
            }
            let home = self.agent_of(i);
            let internal = &deps[1..1 + self.k];
            let external = &deps[1 + self.k..];
            if internal.iter().any(|&d| self.agent_of(d) != home) {
                return Err(Error::param(format!("deps[{i}] internal entries leave block {home}")));
            }
            if !internal.windows(2).all(|w| w[0] < w[1]) || !external.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::param(format!("deps[{i}] not in canonical order")));
            }
            let mut per_block = vec![0usize; p];
            for &d in external {
                per_block[self.agent_of(d)] += 1;
            }
            if per_block[home] != 0 {
                return Err(Error::param(format!("deps[{i}] external entries inside own block")));
            }
            let touched: Vec<usize> = per_block.iter().copied().filter(|&x| x > 0).collect();
            if touched.len() != self.s || touched.iter().any(|&x| x != self.c) {
                return Err(Error::param(format!(
                    "deps[{i}] must take exactly C={} tasks from each of S={} other blocks",
                    self.c, self.s
                )));
            }
            for &d in internal {
                internal_in[d] += 1;
            }
            for &d in external {
                external_in[d] += 1;
            }
        }
        if let Some(i) = internal_in.iter().position(|&x| x != self.k) {
            return Err(Error::param(format!("task {i} feeds {} internal lists, expected K={}", internal_in[i], self.k)));
        }
        let cs = self.c * self.s;
        if let Some(i) = external_in.iter().position(|&x| x != cs) {
            return Err(Error::param(format!("task {i} feeds {} external lists, expected C*S={cs}", external_in[i])));
        }
        // Block symmetry: each agent's relative pattern equals agent 0's.
        let relative = |i: usize| -> Vec<(usize, usize)> {
            let home = self.agent_of(i);
            let mut rel: Vec<(usize, usize)> = self.deps[i]
                .iter()
                .map(|&d| ((self.agent_of(d) + p - home) % p, d % n))
                .collect();
            rel[1..].sort_unstable();
            rel
        };
        for i in n..m {
            if relative(i) != relative(i % n) {
                return Err(Error::param(format!("deps[{i}] breaks block symmetry")));
            }
        }
        Ok(())
    }
}

pub(crate) fn check_shape(p: usize, n: usize, k: usize, c: usize, s: usize) -> Result<()> {
    if p == 0 || n == 0 {
        return Err(Error::param(format!("need P >= 1 and N >= 1 (got P={p}, N={n})")));
    }
    if k > n - 1 {
        return Err(Error::param(format!("K={k} exceeds N-1={}", n - 1)));
    }
    if c > 0 {
        if s < 1 {
            return Err(Error::param(format!("C={c} > 0 requires S >= 1")));
        }
        if s > p - 1 {
            return Err(Error::param(format!("S={s} exceeds P-1={}", p - 1)));
        }
        if c > n {
            return Err(Error::param(format!("C={c} exceeds N={n}")));
        }
    }
    if p * n > ENUMERATION_BUDGET {
        return Err(Error::Capability(format!(
            "M=P*N={} exceeds the enumeration budget of {ENUMERATION_BUDGET} bits",
            p * n
        )));
    }
    Ok(())
}

/// `rows[j]`: sorted within-block positions feeding position `j`.
fn sample_internal<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Vec<Vec<usize>> {
    for _ in 0..MAX_REJECTIONS {
        let mut uses = vec![0usize; n];
        let rows: Vec<Vec<usize>> = (0..n)
            .map(|j| {
                let mut row: Vec<usize> = index::sample(rng, n - 1, k)
                    .into_iter()
                    .map(|x| if x >= j { x + 1 } else { x })
                    .collect();
                row.sort_unstable();
                for &x in &row {
                    uses[x] += 1;
                }
                row
            })
            .collect();
        if uses.iter().all(|&u| u == k) {
            return rows;
        }
    }
    (0..n)
        .map(|j| {
            let mut row: Vec<usize> = (1..=k).map(|o| (j + o) % n).collect();
            row.sort_unstable();
            row
        })
        .collect()
}

/// `rows[j]`: (agent offset, within-block position) pairs feeding position `j`.
fn sample_external<R: Rng + ?Sized>(
    p: usize,
    n: usize,
    c: usize,
    s: usize,
    rng: &mut R,
) -> Vec<Vec<(usize, usize)>> {
    if c == 0 || s == 0 {
        return vec![Vec::new(); n];
    }
    for _ in 0..MAX_REJECTIONS {
        let mut uses = vec![0usize; n];
        let rows: Vec<Vec<(usize, usize)>> = (0..n)
            .map(|_| {
                let mut row = Vec::with_capacity(c * s);
                for offset in index::sample(rng, p - 1, s).into_iter().map(|x| x + 1) {
                    for pos in index::sample(rng, n, c) {
                        uses[pos] += 1;
                        row.push((offset, pos));
                    }
                }
                row
            })
            .collect();
        if uses.iter().all(|&u| u == c * s) {
            return rows;
        }
    }
    (0..n)
        .map(|j| {
            (1..=s)
                .flat_map(|offset| (0..c).map(move |o| (offset, (j + o) % n)))
                .collect()
        })
        .collect()
}

fn assemble_deps(
    p: usize,
    n: usize,
    internal: &[Vec<usize>],
    external: &[Vec<(usize, usize)>],
) -> Vec<Vec<usize>> {
    let mut deps = Vec::with_capacity(p * n);
    for agent in 0..p {
        for j in 0..n {
            let i = agent * n + j;
            let mut row = vec![i];
            row.extend(internal[j].iter().map(|&x| agent * n + x));
            let mut ext: Vec<usize> = external[j]
                .iter()
                .map(|&(offset, pos)| ((agent + offset) % p) * n + pos)
                .collect();
            ext.sort_unstable();
            row.extend(ext);
            deps.push(row);
        }
    }
    deps
}

/// Gaussian-copula correlation that yields Pearson correlation `rho` between
/// the resulting uniforms.
pub fn copula_correlation(rho: f64) -> f64 {
    if rho >= 1.0 {
        return 1.0;
    }
    (2.0 * (std::f64::consts::PI * rho / 6.0).sin()).clamp(0.0, 1.0)
}

/// Contribution tables over an interaction structure, with the exhaustively
/// enumerated global maximum.
#[derive(Debug, Clone)]
pub struct Landscape {
    structure: InteractionStructure,
    rho: f64,
    table_len: usize,
    /// `m * table_len` values; task `i` occupies `[i*table_len, (i+1)*table_len)`.
    tables: Vec<f64>,
    /// Per task, per dependency: (mask shift of the dependency, pattern shift).
    shifts: Vec<(u8, u8)>,
    global_max: f64,
    global_argmax: TeamConfig,
}

impl Landscape {
    /// Draws correlated tables for `structure`.
    ///
    /// For every (within-block position, pattern) cell a `P`-variate normal
    /// with equicorrelation [`copula_correlation`]`(rho)` is mapped through
    /// the standard normal CDF, giving `U(0,1)` marginals whose cross-agent
    /// Pearson correlation is `rho`.
    pub fn build<R: Rng + ?Sized>(structure: InteractionStructure, rho: f64, rng: &mut R) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(Error::param(format!("rho={rho} outside [0, 1]")));
        }
        let (p, n) = (structure.p, structure.n);
        let table_len = 1usize << structure.arity();
        let shared = copula_correlation(rho);
        let (common, idio) = (shared.sqrt(), (1.0 - shared).sqrt());
        let normal = Normal::standard();
        let mut tables = vec![0.0; structure.m * table_len];
        for j in 0..n {
            for pattern in 0..table_len {
                let w: f64 = rng.sample(StandardNormal);
                for agent in 0..p {
                    let e: f64 = rng.sample(StandardNormal);
                    let z = common * w + idio * e;
                    tables[(agent * n + j) * table_len + pattern] = normal.cdf(z);
                }
            }
        }
        Self::from_tables(structure, rho, tables)
    }

    /// Wraps explicit tables (flat, task-major) and enumerates the maximum.
    pub fn from_tables(structure: InteractionStructure, rho: f64, tables: Vec<f64>) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(Error::param(format!("rho={rho} outside [0, 1]")));
        }
        if structure.m > ENUMERATION_BUDGET {
            return Err(Error::Capability(format!(
                "M={} exceeds the enumeration budget of {ENUMERATION_BUDGET} bits",
                structure.m
            )));
        }
        let table_len = 1usize << structure.arity();
        if tables.len() != structure.m * table_len {
            return Err(Error::param(format!(
                "expected {} table entries, got {}",
                structure.m * table_len,
                tables.len()
            )));
        }
        if let Some(v) = tables.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::param(format!("table value {v} outside [0, 1]")));
        }
        let arity = structure.arity();
        let m = structure.m;
        let shifts = structure
            .deps
            .iter()
            .flat_map(|deps| {
                deps.iter()
                    .enumerate()
                    .map(move |(pos, &d)| ((m - 1 - d) as u8, (arity - 1 - pos) as u8))
            })
            .collect();
        let mut land = Landscape {
            structure,
            rho,
            table_len,
            tables,
            shifts,
            global_max: f64::NAN,
            global_argmax: TeamConfig::zeros(m, 1),
        };
        let (argmax, max) = land.enumerate_global_max()?;
        land.global_max = max;
        land.global_argmax = argmax;
        Ok(land)
    }

    pub fn structure(&self) -> &InteractionStructure {
        &self.structure
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn global_max(&self) -> f64 {
        self.global_max
    }

    pub fn global_argmax(&self) -> TeamConfig {
        self.global_argmax
    }

    pub fn table_len(&self) -> usize {
        self.table_len
    }

    /// Contribution table of task `i`, indexed by packed dependency pattern.
    pub fn table(&self, i: usize) -> &[f64] {
        &self.tables[i * self.table_len..(i + 1) * self.table_len]
    }

    /// Packed dependency pattern of task `i` under `cfg`.
    #[inline]
    pub fn pattern(&self, i: usize, cfg: &TeamConfig) -> usize {
        let arity = self.structure.arity();
        let mask = cfg.mask();
        self.shifts[i * arity..(i + 1) * arity]
            .iter()
            .fold(0usize, |acc, &(from, to)| acc | ((((mask >> from) & 1) as usize) << to))
    }

    #[inline]
    pub fn contribution(&self, i: usize, cfg: &TeamConfig) -> f64 {
        self.tables[i * self.table_len + self.pattern(i, cfg)]
    }

    pub fn agent_performance(&self, p: usize, cfg: &TeamConfig) -> f64 {
        let n = self.structure.n;
        let sum: f64 = (p * n..(p + 1) * n).map(|i| self.contribution(i, cfg)).sum();
        sum / n as f64
    }

    /// Writes every agent's performance into `out[..P]`.
    pub fn agent_performances_into(&self, cfg: &TeamConfig, out: &mut [f64]) {
        for (p, slot) in out[..self.structure.p].iter_mut().enumerate() {
            *slot = self.agent_performance(p, cfg);
        }
    }

    pub fn team_performance(&self, cfg: &TeamConfig) -> f64 {
        let p = self.structure.p;
        let sum: f64 = (0..p).map(|a| self.agent_performance(a, cfg)).sum();
        sum / p as f64
    }

    /// Exact maximum of team performance over all `2^M` configurations.
    ///
    /// Walks a Gray code so each step re-packs only the patterns touching the
    /// flipped bit; the sum itself is re-evaluated in the same order as
    /// [`Landscape::team_performance`], so values agree bit-for-bit. Ties
    /// resolve to the lexicographically smallest configuration.
    pub fn enumerate_global_max(&self) -> Result<(TeamConfig, f64)> {
        let st = &self.structure;
        let (m, n, p) = (st.m, st.n, st.p);
        if m > ENUMERATION_BUDGET {
            return Err(Error::Capability(format!(
                "M={m} exceeds the enumeration budget of {ENUMERATION_BUDGET} bits"
            )));
        }
        // For each mask bit, the (task, pattern bit) pairs it toggles.
        let arity = st.arity();
        let mut toggles: Vec<Vec<(usize, usize)>> = vec![Vec::new(); m];
        for (task, deps) in st.deps.iter().enumerate() {
            for (pos, &d) in deps.iter().enumerate() {
                toggles[m - 1 - d].push((task, 1 << (arity - 1 - pos)));
            }
        }
        let mut patterns = vec![0usize; m];
        let evaluate = |patterns: &[usize]| -> f64 {
            let mut total = 0.0;
            for a in 0..p {
                let mut block = 0.0;
                for (i, &pattern) in patterns.iter().enumerate().skip(a * n).take(n) {
                    block += self.tables[i * self.table_len + pattern];
                }
                total += block / n as f64;
            }
            total / p as f64
        };
        let mut mask = 0u64;
        let mut best_mask = 0u64;
        let mut best = evaluate(&patterns);
        for step in 1u64..(1u64 << m) {
            let bit = step.trailing_zeros() as usize;
            mask ^= 1 << bit;
            for &(task, flag) in &toggles[bit] {
                patterns[task] ^= flag;
            }
            let value = evaluate(&patterns);
            if value > best || (value == best && mask < best_mask) {
                best = value;
                best_mask = mask;
            }
        }
        Ok((TeamConfig::from_mask(best_mask, m, n), best))
    }

    /// Writes the landscape in the line-oriented text format described in
    /// `docs/landscape-format.md`.
    pub fn dump<W: Write>(&self, seed: u64, mut out: W) -> std::io::Result<()> {
        let st = &self.structure;
        writeln!(out, "# teamnorms landscape v1")?;
        writeln!(
            out,
            "M={} P={} N={} K={} C={} S={} rho={} seed={}",
            st.m, st.p, st.n, st.k, st.c, st.s, self.rho, seed
        )?;
        for (i, deps) in st.deps.iter().enumerate() {
            let list: Vec<String> = deps.iter().map(|d| d.to_string()).collect();
            writeln!(out, "dep {i} {}", list.join(" "))?;
        }
        for i in 0..st.m {
            let values: Vec<String> = self.table(i).iter().map(|v| format!("{v:?}")).collect();
            writeln!(out, "table {i} {}", values.join(" "))?;
        }
        Ok(())
    }

    /// Reads a landscape written by [`Landscape::dump`]; returns it with the
    /// seed recorded in the header.
    pub fn load<R: BufRead>(input: R) -> Result<(Self, u64)> {
        let bad = |msg: String| Error::Parse(format!("landscape file: {msg}"));
        let mut lines = input
            .lines()
            .map(|l| l.map_err(|e| bad(e.to_string())))
            .filter(|l| !matches!(l, Ok(s) if s.trim().is_empty() || s.starts_with('#')));
        let header = lines.next().ok_or_else(|| bad("missing header".into()))??;
        let mut fields = std::collections::HashMap::new();
        for tok in header.split_whitespace() {
            let (key, value) = tok.split_once('=').ok_or_else(|| bad(format!("bad header token {tok:?}")))?;
            fields.insert(key.to_string(), value.to_string());
        }
        let get = |key: &str| -> Result<&String> { fields.get(key).ok_or_else(|| bad(format!("header lacks {key}"))) };
        let int = |key: &str| -> Result<usize> { get(key)?.parse().map_err(|_| bad(format!("bad {key}"))) };
        let (m, p, n, k, c, s) = (int("M")?, int("P")?, int("N")?, int("K")?, int("C")?, int("S")?);
        let rho: f64 = get("rho")?.parse().map_err(|_| bad("bad rho".into()))?;
        let seed: u64 = get("seed")?.parse().map_err(|_| bad("bad seed".into()))?;
        if m != p * n {
            return Err(bad(format!("M={m} != P*N={}", p * n)));
        }
        let arity = 1 + k + if c == 0 { 0 } else { c * s };
        if m > ENUMERATION_BUDGET || arity > m {
            return Err(bad(format!("unsupported shape M={m}, arity {arity}")));
        }
        let table_len = 1usize << arity;
        let mut deps = Vec::with_capacity(m);
        let mut tables = Vec::new();
        for line in lines {
            let line = line?;
            let mut toks = line.split_whitespace();
            let kind = toks.next().unwrap_or_default();
            let idx: usize = toks
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| bad(format!("missing index in {line:?}")))?;
            match kind {
                "dep" if idx == deps.len() => {
                    let row = toks
                        .map(|t| t.parse::<usize>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|_| bad(format!("bad dep line {idx}")))?;
                    deps.push(row);
                }
                "table" if idx * table_len == tables.len() => {
                    for t in toks {
                        tables.push(t.parse::<f64>().map_err(|_| bad(format!("bad value in table {idx}")))?);
                    }
                    if tables.len() != (idx + 1) * table_len {
                        return Err(bad(format!("table {idx} should have {table_len} entries")));
                    }
                }
                _ => return Err(bad(format!("unexpected line {line:?}"))),
            }
        }
        let structure = InteractionStructure::from_deps(p, n, k, c, s, deps)?;
        Ok((Self::from_tables(structure, rho, tables)?, seed))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn config_layout_is_lexicographic() {
        let a = TeamConfig::from_bits(&[false, true, false, false], 2);
        let b = TeamConfig::from_bits(&[true, false, false, false], 2);
        assert!(a.mask() < b.mask());
        assert_eq!(b.bits(), vec![true, false, false, false]);
        assert_eq!(b.block(1), 2..4);
        assert_eq!(b.to_string(), "10 00");
    }

    #[test]
    fn private_and_social_split() {
        let cfg = TeamConfig::zeros(16, 4);
        assert_eq!(cfg.private(1, 2), 4..6);
        assert_eq!(cfg.social(1, 2), 6..8);
        assert_eq!(cfg.social(3, 0), 16..16);
        assert_eq!(cfg.private(0, 4), 0..0);
    }

    #[test]
    fn splice_only_touches_block() {
        let ones = TeamConfig::from_mask(u64::MAX, 8, 4);
        let zeros = TeamConfig::zeros(8, 4);
        let spliced = ones.splice_block(1, &zeros);
        assert_eq!(spliced.bits(), [false, false, false, false, true, true, true, true]);
    }

    #[test]
    fn uncoupled_structure_is_self_only() {
        let st = InteractionStructure::build(4, 4, 0, 0, 0, &mut rng(1)).unwrap();
        for i in 0..16 {
            assert_eq!(st.deps(i), &[i]);
        }
    }

    #[test]
    fn internal_only_structure() {
        let st = InteractionStructure::build(4, 4, 2, 0, 0, &mut rng(2)).unwrap();
        let mut feeds = [0usize; 16];
        for i in 0..16 {
            let deps = st.deps(i);
            assert_eq!(deps.len(), 3);
            assert!(deps.iter().all(|&d| d / 4 == i / 4));
            for &d in &deps[1..] {
                feeds[d] += 1;
            }
        }
        assert!(feeds.iter().all(|&f| f == 2));
    }

    #[test]
    fn coupled_structure_degrees() {
        for seed in 0..20 {
            let st = InteractionStructure::build(4, 4, 2, 2, 2, &mut rng(seed)).unwrap();
            let mut out_deg = [0usize; 16];
            for i in 0..16 {
                assert_eq!(st.deps(i).len(), 7);
                for &d in &st.deps(i)[1..] {
                    out_deg[d] += 1;
                }
            }
            assert!(out_deg.iter().all(|&f| f == 6), "seed {seed}: {out_deg:?}");
            st.validate().unwrap();
        }
    }

    #[test]
    fn infeasible_shapes_name_the_bound() {
        let err = InteractionStructure::build(4, 4, 4, 0, 0, &mut rng(0)).unwrap_err();
        assert!(err.to_string().contains("K=4"), "{err}");
        let err = InteractionStructure::build(4, 4, 2, 2, 4, &mut rng(0)).unwrap_err();
        assert!(err.to_string().contains("S=4"), "{err}");
        let err = InteractionStructure::build(4, 4, 2, 5, 1, &mut rng(0)).unwrap_err();
        assert!(err.to_string().contains("C=5"), "{err}");
        let err = InteractionStructure::build(4, 4, 2, 1, 0, &mut rng(0)).unwrap_err();
        assert!(err.to_string().contains("S >= 1"), "{err}");
        let err = InteractionStructure::build(6, 4, 2, 0, 0, &mut rng(0)).unwrap_err();
        assert!(matches!(err, Error::Capability(_)));
    }

    #[test]
    fn circulant_fallbacks_are_regular() {
        let internal = (0..5).map(|j| {
            let mut r: Vec<usize> = (1..=3).map(|o| (j + o) % 5).collect();
            r.sort_unstable();
            r
        });
        let internal: Vec<_> = internal.collect();
        let external: Vec<Vec<(usize, usize)>> =
            (0..5).map(|j| (1..=2).flat_map(|o| (0..3).map(move |c| (o, (j + c) % 5))).collect()).collect();
        let deps = assemble_deps(4, 5, &internal, &external);
        InteractionStructure::from_deps(4, 5, 3, 3, 2, deps).unwrap();
    }

    #[test]
    fn validate_rejects_asymmetric_blocks() {
        // Agent 1 uses a different internal pattern from agent 0.
        let deps = vec![vec![0, 1], vec![1, 0], vec![2, 3], vec![3, 2]];
        InteractionStructure::from_deps(2, 2, 1, 0, 0, deps).unwrap();
        let deps = vec![vec![0, 1], vec![1, 0], vec![2, 3], vec![3, 1]];
        assert!(InteractionStructure::from_deps(2, 2, 1, 0, 0, deps).is_err());
    }

    #[test]
    fn rho_one_gives_identical_tables() {
        let st = InteractionStructure::build(4, 4, 2, 2, 2, &mut rng(3)).unwrap();
        let land = Landscape::build(st, 1.0, &mut rng(4)).unwrap();
        for j in 0..4 {
            for agent in 1..4 {
                assert_eq!(land.table(j), land.table(agent * 4 + j));
            }
        }
    }

    #[test]
    fn rho_out_of_range() {
        let st = InteractionStructure::build(2, 2, 0, 0, 0, &mut rng(0)).unwrap();
        assert!(matches!(Landscape::build(st.clone(), 1.5, &mut rng(0)), Err(Error::Param(_))));
        assert!(matches!(Landscape::build(st, -0.1, &mut rng(0)), Err(Error::Param(_))));
    }

    #[test]
    fn toy_packing_convention() {
        // deps[0] = [0, 2]; config (1,0,1,0) packs (x0, x2) = (1, 1) -> index 3.
        let deps = vec![vec![0, 2], vec![1, 3], vec![2, 0], vec![3, 1]];
        let st = InteractionStructure::from_deps(2, 2, 0, 1, 1, deps).unwrap();
        let tables: Vec<f64> = (0..16).map(|v| v as f64 / 16.0).collect();
        let land = Landscape::from_tables(st, 0.0, tables).unwrap();
        let cfg = TeamConfig::from_bits(&[true, false, true, false], 2);
        assert_eq!(land.contribution(0, &cfg), land.table(0)[0b11]);
        assert_eq!(land.contribution(1, &cfg), land.table(1)[0b00]);
        let cfg = TeamConfig::from_bits(&[true, false, false, false], 2);
        assert_eq!(land.contribution(0, &cfg), land.table(0)[0b10]);
        assert_eq!(land.contribution(2, &cfg), land.table(2)[0b01]);
    }

    #[test]
    fn separable_maximum() {
        let st = InteractionStructure::build(4, 4, 0, 0, 0, &mut rng(9)).unwrap();
        let land = Landscape::build(st, 0.3, &mut rng(10)).unwrap();
        let expected: f64 = (0..16).map(|i| land.table(i)[0].max(land.table(i)[1])).sum::<f64>() / 16.0;
        assert!((land.global_max() - expected).abs() < 1e-12);
        assert_eq!(land.team_performance(&land.global_argmax()), land.global_max());
    }

    #[test]
    fn performance_means() {
        let deps: Vec<Vec<usize>> = (0..8).map(|i| vec![i]).collect();
        let st = InteractionStructure::from_deps(2, 4, 0, 0, 0, deps).unwrap();
        let mut tables = vec![0.0; 16];
        for (i, v) in [0.2, 0.4, 0.6, 0.8, 0.5, 0.5, 0.5, 0.5].into_iter().enumerate() {
            tables[2 * i] = v;
        }
        let land = Landscape::from_tables(st, 0.0, tables).unwrap();
        let cfg = TeamConfig::zeros(8, 4);
        assert!((land.agent_performance(0, &cfg) - 0.5).abs() < 1e-15);
        assert!((land.agent_performance(1, &cfg) - 0.5).abs() < 1e-15);
        assert!((land.team_performance(&cfg) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn tie_break_prefers_lexicographically_smallest() {
        let deps: Vec<Vec<usize>> = (0..4).map(|i| vec![i]).collect();
        let st = InteractionStructure::from_deps(2, 2, 0, 0, 0, deps).unwrap();
        let land = Landscape::from_tables(st, 0.0, vec![0.5; 8]).unwrap();
        assert_eq!(land.global_argmax().mask(), 0);
    }

    #[test]
    fn dump_load_round_trip() {
        let st = InteractionStructure::build(4, 4, 2, 2, 2, &mut rng(11)).unwrap();
        let land = Landscape::build(st, 0.3, &mut rng(12)).unwrap();
        let mut buf = Vec::new();
        land.dump(99, &mut buf).unwrap();
        let (back, seed) = Landscape::load(buf.as_slice()).unwrap();
        assert_eq!(seed, 99);
        assert_eq!(back.structure(), land.structure());
        assert_eq!(back.tables, land.tables);
        assert_eq!(back.global_max(), land.global_max());
    }

    #[test]
    fn load_rejects_garbage() {
        assert!(Landscape::load("M=4 P=2 N=2 K=0 C=0 S=0 rho=0 seed=1\nbogus 0\n".as_bytes()).is_err());
        assert!(Landscape::load("".as_bytes()).is_err());
    }
}
