//! Descriptive norms: who shares with whom, what each agent remembers, and
//! how well a set of social decisions matches the remembered reports.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::landscape::TeamConfig;

/// Packed social bits of one agent; position `j` of the social sub-block is
/// bit `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SocialBits {
    packed: u32,
    len: u8,
}

impl SocialBits {
    pub fn from_bits(bits: &[bool]) -> Self {
        assert!(bits.len() <= 32);
        let packed = bits
            .iter()
            .enumerate()
            .fold(0u32, |acc, (j, &b)| acc | ((b as u32) << j));
        SocialBits {
            packed,
            len: bits.len() as u8,
        }
    }

    /// The last `n_s` bits of agent `p`'s block.
    pub fn of(cfg: &TeamConfig, p: usize, n_s: usize) -> Self {
        let mut packed = 0u32;
        for (j, i) in cfg.social(p, n_s).enumerate() {
            packed |= (cfg.bit(i) as u32) << j;
        }
        SocialBits {
            packed,
            len: n_s as u8,
        }
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, j: usize) -> bool {
        debug_assert!(j < self.len());
        (self.packed >> j) & 1 == 1
    }

    /// Positions where `self` and `other` agree.
    #[inline]
    pub fn matches(&self, other: &SocialBits) -> u32 {
        debug_assert_eq!(self.len, other.len);
        let mask = if self.len >= 32 { u32::MAX } else { (1u32 << self.len) - 1 };
        self.len as u32 - ((self.packed ^ other.packed) & mask).count_ones()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoryRecord {
    pub timestamp: usize,
    pub bits: SocialBits,
}

/// One agent's store of peers' reports, oldest first.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NormMemory {
    entries: VecDeque<MemoryRecord>,
}

impl NormMemory {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a record; timestamps must be non-decreasing.
    pub fn push(&mut self, record: MemoryRecord) {
        if let Some(last) = self.entries.back() {
            assert!(
                last.timestamp <= record.timestamp,
                "memory records must arrive in time order"
            );
        }
        self.entries.push_back(record);
    }

    /// Drops records stamped at or before `t - t_l`, leaving a window of
    /// exactly `t_l` periods.
    pub fn expire(&mut self, t: usize, t_l: usize) {
        while self.entries.front().is_some_and(|r| r.timestamp + t_l <= t) {
            self.entries.pop_front();
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &MemoryRecord> {
        self.entries.iter()
    }
}

/// Norm compliance: mean over remembered records of the fraction of social
/// positions that agree with `social`. Zero until period `t_l` has passed,
/// and zero for an empty memory or an empty social block.
pub fn compliance(social: &SocialBits, memory: &NormMemory, t: usize, t_l: usize) -> f64 {
    if t <= t_l || memory.is_empty() || social.is_empty() {
        return 0.0;
    }
    let n_s = social.len() as f64;
    let total: f64 = memory
        .iter()
        .map(|r| r.bits.matches(social) as f64 / n_s)
        .sum();
    total / memory.len() as f64
}

/// Directed sharing links between agents.
///
/// * `d = 0`: nobody shares.
/// * `d = 1`: directed cycle, agent `p` sends to `p + 1`.
/// * even `d >= 2`: bidirectional ring lattice, neighbours at offsets
///   `±1..=±d/2`.
/// * odd `d >= 3`: the ring lattice for `d - 1` plus the antipodal agent
///   (`P` must be even).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SocialNetwork {
    p: usize,
    d: usize,
    /// `incoming[q]`: senders whose reports reach `q`, ascending.
    incoming: Vec<Vec<usize>>,
}

impl SocialNetwork {
    pub fn new(p: usize, d: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::param("network needs at least one agent"));
        }
        if d > 0 && d > p - 1 {
            return Err(Error::param(format!("degree D={d} exceeds P-1={}", p - 1)));
        }
        let mut incoming = vec![Vec::new(); p];
        if d == 1 {
            for (q, senders) in incoming.iter_mut().enumerate() {
                senders.push((q + p - 1) % p);
            }
        } else if d >= 2 {
            let mut offsets: Vec<usize> = (1..=d / 2).flat_map(|o| [o, p - o]).collect();
            if d % 2 == 1 {
                if p % 2 == 1 {
                    return Err(Error::param(format!("odd degree D={d} needs an even number of agents (P={p})")));
                }
                offsets.push(p / 2);
            }
            offsets.sort_unstable();
            offsets.dedup();
            if offsets.len() != d {
                return Err(Error::param(format!("degree D={d} is not realisable on a ring of P={p}")));
            }
            for (q, senders) in incoming.iter_mut().enumerate() {
                senders.extend(offsets.iter().map(|&o| (q + o) % p));
                senders.sort_unstable();
            }
        }
        Ok(SocialNetwork { p, d, incoming })
    }

    pub fn agents(&self) -> usize {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    /// Agents whose reports reach `q`.
    pub fn receives_from(&self, q: usize) -> &[usize] {
        &self.incoming[q]
    }

    /// Agents that receive `p`'s reports.
    pub fn sends_to(&self, p: usize) -> Vec<usize> {
        (0..self.p).filter(|&q| self.incoming[q].contains(&p)).collect()
    }

    /// Records every agent's period-`t` social bits in the memories of the
    /// agents it sends to.
    pub fn share(&self, t: usize, cfg: &TeamConfig, n_s: usize, memories: &mut [NormMemory]) {
        for (q, memory) in memories.iter_mut().enumerate() {
            for &sender in &self.incoming[q] {
                memory.push(MemoryRecord {
                    timestamp: t,
                    bits: SocialBits::of(cfg, sender, n_s),
                });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn record(t: usize, bits: &[bool]) -> MemoryRecord {
        MemoryRecord {
            timestamp: t,
            bits: SocialBits::from_bits(bits),
        }
    }

    #[test]
    fn ring_adjacency() {
        let net = SocialNetwork::new(4, 2).unwrap();
        assert_eq!(net.receives_from(0), &[1, 3]);
        assert_eq!(net.sends_to(0), vec![1, 3]);
        for p in 0..4 {
            assert!(!net.receives_from(p).contains(&p));
            for &q in net.receives_from(p) {
                assert!(net.receives_from(q).contains(&p));
            }
        }
    }

    #[test]
    fn other_degrees() {
        let directed = SocialNetwork::new(4, 1).unwrap();
        assert_eq!(directed.receives_from(0), &[3]);
        assert_eq!(directed.sends_to(0), vec![1]);
        let full = SocialNetwork::new(4, 3).unwrap();
        assert_eq!(full.receives_from(2), &[0, 1, 3]);
        let none = SocialNetwork::new(4, 0).unwrap();
        assert!(none.receives_from(1).is_empty());
        let wide = SocialNetwork::new(8, 4).unwrap();
        assert_eq!(wide.receives_from(0), &[1, 2, 6, 7]);
        assert!(SocialNetwork::new(4, 4).is_err());
        assert!(SocialNetwork::new(5, 3).is_err());
    }

    #[test]
    fn share_adds_degree_records() {
        let net = SocialNetwork::new(4, 2).unwrap();
        let cfg = TeamConfig::from_mask(0b0001_0010_0011_0000, 16, 4);
        let mut mems = vec![NormMemory::new(); 4];
        net.share(1, &cfg, 2, &mut mems);
        for m in &mems {
            assert_eq!(m.len(), 2);
        }
        // agent 0 hears from 1 (social bits 1,0) and 3 (0,0), never itself (0,1)
        let heard: Vec<SocialBits> = mems[0].iter().map(|r| r.bits).collect();
        assert_eq!(heard, vec![SocialBits::from_bits(&[true, false]), SocialBits::from_bits(&[false, false])]);
    }

    #[test]
    fn expire_window() {
        let mut m = NormMemory::new();
        for t in 1..=10 {
            m.push(record(t, &[true]));
        }
        let before = m.clone();
        m.expire(10, 10);
        assert_eq!(m, before);
        m.expire(12, 10);
        assert_eq!(m.iter().next().unwrap().timestamp, 3);
        assert_eq!(m.len(), 8);
        let mut empty = NormMemory::new();
        empty.expire(100, 5);
        assert!(empty.is_empty());
    }

    #[test]
    fn expire_boundary() {
        let mut m = NormMemory::new();
        m.push(record(50, &[true]));
        m.expire(99, 50);
        assert_eq!(m.len(), 1);
        m.expire(100, 50);
        assert!(m.is_empty());
    }

    #[test]
    fn compliance_examples() {
        let mut m = NormMemory::new();
        m.push(record(1, &[false, false]));
        m.push(record(1, &[true, true]));
        let me = SocialBits::from_bits(&[false, true]);
        assert_eq!(compliance(&me, &m, 5, 2), 0.5);
        assert_eq!(compliance(&me, &m, 2, 2), 0.0);
        let mut same = NormMemory::new();
        same.push(record(3, &[false, true]));
        same.push(record(4, &[false, true]));
        assert_eq!(compliance(&me, &same, 5, 2), 1.0);
        assert_eq!(compliance(&me, &NormMemory::new(), 5, 2), 0.0);
    }

    #[test]
    fn ring_memory_saturates() {
        let net = SocialNetwork::new(4, 2).unwrap();
        let cfg = TeamConfig::zeros(16, 4);
        let mut mems = vec![NormMemory::new(); 4];
        let t_l = 5;
        for t in 1..=20 {
            for m in mems.iter_mut() {
                m.expire(t, t_l);
            }
            net.share(t, &cfg, 2, &mut mems);
            if t >= t_l {
                assert!(mems.iter().all(|m| m.len() == 2 * t_l));
            }
        }
    }

    fn memory_strategy(n_s: usize) -> impl Strategy<Value = Vec<Vec<bool>>> {
        prop::collection::vec(prop::collection::vec(any::<bool>(), n_s), 1..40)
    }

    proptest! {
        #[test]
        fn compliance_bounded_and_order_free(
            recs in memory_strategy(3),
            me in prop::collection::vec(any::<bool>(), 3),
            shift in 0usize..40,
        ) {
            let me = SocialBits::from_bits(&me);
            let mut a = NormMemory::new();
            let mut b = NormMemory::new();
            for r in &recs {
                a.push(record(1, r));
            }
            let k = shift % recs.len();
            for r in recs[k..].iter().chain(&recs[..k]) {
                b.push(record(1, r));
            }
            let ca = compliance(&me, &a, 10, 5);
            let cb = compliance(&me, &b, 10, 5);
            prop_assert!((0.0..=1.0).contains(&ca));
            prop_assert!((ca - cb).abs() < 1e-12);
        }

        #[test]
        fn single_bit_compliance_is_frequency(recs in memory_strategy(1), me in any::<bool>()) {
            let mut m = NormMemory::new();
            for r in &recs {
                m.push(record(1, r));
            }
            let freq = recs.iter().filter(|r| r[0] == me).count() as f64 / recs.len() as f64;
            let c = compliance(&SocialBits::from_bits(&[me]), &m, 10, 5);
            prop_assert!((c - freq).abs() < 1e-12);
        }

        #[test]
        fn private_bits_do_not_matter(mask in 0u64..(1 << 16), flip in 0usize..2) {
            let cfg = TeamConfig::from_mask(mask, 16, 4);
            let flipped = cfg.flip(4 + flip);
            prop_assert_eq!(SocialBits::of(&cfg, 1, 2), SocialBits::of(&flipped, 1, 2));
        }
    }
}
