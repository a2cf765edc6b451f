//! The diagonal action of a permutation group on k-tuples of points.
//!
//! Tuples are ranked in mixed radix base `N` with position 0 least
//! significant: `rank(x) = x_0 + x_1·N + … + x_{k-1}·N^{k-1}`.

use std::collections::{BTreeMap, HashSet, VecDeque};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{build_chain, orbit_with_witnesses, ElementCursor, GeneratedGroup, StabilizerChain};
use crate::perm::Permutation;

/// Default ceiling on `N^k` for exhaustive orbit enumeration.
pub const DEFAULT_STATE_CAP: u64 = 100_000_000;
/// Default ceiling on `|G|` for streamed fixed-point sums.
pub const DEFAULT_ELEMENT_BUDGET: u64 = 10_000_000;
/// Direct fixed-tuple counting is cross-checked in debug builds up to this many tuples.
const DIRECT_CHECK_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TupleSpace {
    degree: usize,
    arity: usize,
}

impl TupleSpace {
    pub fn new(degree: usize, arity: usize) -> Self {
        TupleSpace { degree, arity }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn size(&self) -> BigUint {
        BigUint::from(self.degree).pow(self.arity as u32)
    }

    pub fn size_u64(&self) -> Option<u64> {
        (self.degree as u64).checked_pow(self.arity as u32)
    }

    pub fn rank(&self, tuple: &[usize]) -> u64 {
        debug_assert_eq!(tuple.len(), self.arity);
        tuple
            .iter()
            .rev()
            .fold(0u64, |acc, &x| acc * self.degree as u64 + x as u64)
    }

    pub fn unrank(&self, mut rank: u64) -> Vec<usize> {
        let n = self.degree as u64;
        (0..self.arity)
            .map(|_| {
                let digit = rank % n;
                rank /= n;
                digit as usize
            })
            .collect()
    }
}

/// Number of distinct entries of a tuple.
pub fn pattern(tuple: &[usize]) -> usize {
    let mut seen: Vec<usize> = Vec::with_capacity(tuple.len());
    for &x in tuple {
        if !seen.contains(&x) {
            seen.push(x);
        }
    }
    seen.len()
}

/// Number of k-tuples fixed by `p`, i.e. `fixed_points(p)^k`.
///
/// Debug builds also count the fixed tuples one by one when `N^k <= 10^6`
/// and assert that both counts agree.
pub fn fixed_tuple_count(p: &Permutation, k: usize) -> BigUint {
    let count = BigUint::from(p.fixed_points()).pow(k as u32);
    if cfg!(debug_assertions) {
        let space = TupleSpace::new(p.degree(), k);
        if space.size_u64().is_some_and(|s| s <= DIRECT_CHECK_LIMIT) {
            assert_eq!(count, count_fixed_tuples_directly(p, k));
        }
    }
    count
}

/// Scans every k-tuple and counts those fixed by `p`.
pub fn count_fixed_tuples_directly(p: &Permutation, k: usize) -> BigUint {
    let space = TupleSpace::new(p.degree(), k);
    let size = space.size_u64().expect("tuple space fits in u64");
    let fixed = (0..size)
        .filter(|&r| {
            let x = space.unrank(r);
            x.iter().all(|&e| p.apply(e) == e)
        })
        .count();
    BigUint::from(fixed)
}

/// How many group elements have each number of fixed points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedPointHistogram {
    order: BigUint,
    counts: Vec<u64>,
}

impl FixedPointHistogram {
    pub fn from_elements<'a>(degree: usize, elements: impl IntoIterator<Item = &'a Permutation>) -> Self {
        let mut counts = vec![0u64; degree + 1];
        for g in elements {
            counts[g.fixed_points()] += 1;
        }
        let order = BigUint::from(counts.iter().sum::<u64>());
        FixedPointHistogram { order, counts }
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    /// `counts()[f]` is the number of elements with exactly `f` fixed points.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// `Σ_g f(g)^k`.
    pub fn power_sum(&self, k: usize) -> BigUint {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(f, &c)| BigUint::from(f).pow(k as u32) * c)
            .sum()
    }

    /// `(1/|G|) Σ_g f(g)^k`, which must be an integer.
    pub fn average(&self, k: usize) -> Result<BigUint> {
        let sum = self.power_sum(k);
        let (quotient, remainder) = sum.div_rem(&self.order);
        if !remainder.is_zero() {
            return Err(Error::NonIntegerAverage {
                sum: sum.to_string(),
                order: self.order.to_string(),
            });
        }
        Ok(quotient)
    }
}

const CHUNK: u128 = 1 << 14;

/// Streams every element of the group through its stabilizer chain and
/// tallies fixed-point counts. Chunks of the element index range run in
/// parallel on the current rayon pool.
pub fn fixed_point_histogram(chain: &StabilizerChain) -> FixedPointHistogram {
    let order = chain
        .order_u128()
        .expect("group too large to stream");
    let degree = chain.degree();
    let chunks = order.div_ceil(CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut counts = vec![0u64; degree + 1];
            let mut cursor = ElementCursor::new(chain, c * CHUNK, CHUNK);
            while let Some(g) = cursor.current() {
                counts[g.fixed_points()] += 1;
                cursor.advance();
            }
            counts
        })
        .reduce(
            || vec![0u64; degree + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    FixedPointHistogram {
        order: chain.order().clone(),
        counts,
    }
}

/// Fails with `LongRunning` when the group has more than `budget` elements.
pub fn check_element_budget(chain: &StabilizerChain, budget: u64) -> Result<()> {
    if *chain.order() > BigUint::from(budget) {
        return Err(Error::LongRunning {
            estimated: chain.order().to_string(),
            budget,
        });
    }
    Ok(())
}

/// Burnside average `(1/|G|) Σ_g f(g)^k` under the default element budget.
pub fn burnside_average(group: &GeneratedGroup, k: usize) -> Result<BigUint> {
    burnside_average_with_budget(group, k, DEFAULT_ELEMENT_BUDGET)
}

pub fn burnside_average_with_budget(group: &GeneratedGroup, k: usize, budget: u64) -> Result<BigUint> {
    let chain = build_chain(group, &[])?;
    check_element_budget(&chain, budget)?;
    fixed_point_histogram(&chain).average(k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMethod {
    Exhaustive,
}

/// Orbits of one pattern (number of distinct entries).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PatternOrbits {
    pub count: u64,
    pub lengths: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitSummary {
    pub degree: usize,
    pub arity: usize,
    pub total_orbits: BigUint,
    pub per_pattern: BTreeMap<usize, PatternOrbits>,
    pub method: CountMethod,
}

impl OrbitSummary {
    /// Total number of tuples covered by the recorded orbits.
    pub fn covered(&self) -> BigUint {
        self.per_pattern
            .values()
            .flat_map(|p| p.lengths.iter())
            .map(|&l| BigUint::from(l))
            .sum()
    }
}

/// Fixed-size bitmap over tuple ranks.
struct Visited {
    words: Vec<u64>,
}

impl Visited {
    fn new(size: u64) -> Self {
        Visited {
            words: vec![0; size.div_ceil(64) as usize],
        }
    }

    /// Marks `i`; returns true if it was not marked before.
    #[inline]
    fn insert(&mut self, i: u64) -> bool {
        let (w, b) = ((i / 64) as usize, i % 64);
        let fresh = self.words[w] & (1 << b) == 0;
        self.words[w] |= 1 << b;
        fresh
    }

    #[inline]
    fn contains(&self, i: u64) -> bool {
        self.words[(i / 64) as usize] & (1 << (i % 64)) != 0
    }
}

/// Partitions `Z_N^k` into orbits by breadth-first sweeps over ranked tuples.
pub fn enumerate_orbits(group: &GeneratedGroup, k: usize, cap: u64) -> Result<OrbitSummary> {
    let space = TupleSpace::new(group.degree(), k);
    let size = match space.size_u64() {
        Some(s) if s <= cap => s,
        _ => {
            return Err(Error::CapExceeded {
                what: format!("tuple space {}^{}", group.degree(), k),
                cap,
            })
        }
    };
    let n = group.degree() as u64;
    let gens: Vec<&Permutation> = group.generators().iter().filter(|g| !g.is_identity()).collect();
    let mut visited = Visited::new(size);
    let mut per_pattern: BTreeMap<usize, PatternOrbits> = BTreeMap::new();
    let mut total = 0u64;
    let mut queue: VecDeque<u64> = VecDeque::new();
    let mut digits = vec![0usize; k];

    for start in 0..size {
        if visited.contains(start) {
            continue;
        }
        visited.insert(start);
        queue.push_back(start);
        let mut length = 0u64;
        while let Some(r) = queue.pop_front() {
            length += 1;
            let mut rest = r;
            for d in digits.iter_mut() {
                *d = (rest % n) as usize;
                rest /= n;
            }
            for g in &gens {
                let image = digits
                    .iter()
                    .rev()
                    .fold(0u64, |acc, &x| acc * n + g.apply(x) as u64);
                if visited.insert(image) {
                    queue.push_back(image);
                }
            }
        }
        let entry = per_pattern.entry(pattern(&space.unrank(start))).or_default();
        entry.count += 1;
        entry.lengths.push(length);
        total += 1;
    }

    Ok(OrbitSummary {
        degree: group.degree(),
        arity: k,
        total_orbits: BigUint::from(total),
        per_pattern,
        method: CountMethod::Exhaustive,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleOrbit {
    pub length: BigUint,
    /// Lexicographically least member of the orbit.
    pub representative: Vec<usize>,
    /// Whether the orbit was also enumerated explicitly and matched.
    pub closure_checked: bool,
}

/// Length and least member of the orbit of `tuple`.
///
/// The orbit of a tuple is in bijection with the orbit of its sequence of
/// distinct entries, so the length is `|G| / |G_(d_1,…,d_j)|`. The least
/// member is found greedily, one entry at a time, inside successive point
/// stabilizers. When the length is at most `closure_budget` the orbit is also
/// enumerated by breadth-first closure and both results must agree.
pub fn orbit_of_tuple(group: &GeneratedGroup, tuple: &[usize], closure_budget: u64) -> Result<TupleOrbit> {
    let degree = group.degree();
    for &x in tuple {
        if x >= degree {
            return Err(Error::OutOfRange { point: x + 1, degree });
        }
    }
    let mut distinct: Vec<usize> = Vec::new();
    for &x in tuple {
        if !distinct.contains(&x) {
            distinct.push(x);
        }
    }

    let mut gens: Vec<Permutation> = group.generators().to_vec();
    let mut mover = Permutation::identity(degree);
    let mut length = BigUint::from(1u32);
    for (s, &d) in distinct.iter().enumerate() {
        let y = mover.apply(d);
        let orbit = orbit_with_witnesses(degree, &gens, y);
        length *= orbit.len();
        let (least, witness) = orbit.into_iter().min_by_key(|(x, _)| *x).unwrap();
        mover = witness.compose_unchecked(&mover);
        if s + 1 < distinct.len() {
            let chain = StabilizerChain::from_generators(degree, &gens, &[least])?;
            gens = chain
                .levels()
                .get(1)
                .map(|l| l.generators().to_vec())
                .filter(|g| !g.is_empty())
                .unwrap_or_else(|| vec![Permutation::identity(degree)]);
        }
    }
    let representative = mover.apply_tuple(tuple)?;

    let mut closure_checked = false;
    if length <= BigUint::from(closure_budget) {
        let (closure_length, closure_min) = tuple_orbit_by_closure(group, tuple);
        if BigUint::from(closure_length) != length || closure_min != representative {
            return Err(Error::Inconsistent(format!(
                "orbit of {tuple:?}: stabilizer route gives {length} / {representative:?}, closure gives {closure_length} / {closure_min:?}"
            )));
        }
        closure_checked = true;
    }
    Ok(TupleOrbit {
        length,
        representative,
        closure_checked,
    })
}

fn tuple_orbit_by_closure(group: &GeneratedGroup, tuple: &[usize]) -> (u64, Vec<usize>) {
    let mut seen: HashSet<Vec<usize>> = HashSet::from([tuple.to_vec()]);
    let mut queue = VecDeque::from([tuple.to_vec()]);
    let mut least = tuple.to_vec();
    while let Some(x) = queue.pop_front() {
        if x < least {
            least = x.clone();
        }
        for g in group.generators() {
            let y: Vec<usize> = x.iter().map(|&e| g.apply(e)).collect();
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    (seen.len() as u64, least)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{cyclic, mathieu24, symmetric};
    use crate::combinat::{bell, falling_factorial, stirling2};
    use crate::group::close_group;
    use num_traits::ToPrimitive;

    fn group(n: usize, gens: &[&str]) -> GeneratedGroup {
        let gens = gens
            .iter()
            .map(|t| Permutation::parse_cycles(t, n).unwrap())
            .collect();
        GeneratedGroup::new("test", n, gens).unwrap()
    }

    #[test]
    fn rank_round_trip() {
        let space = TupleSpace::new(5, 3);
        assert_eq!(space.size(), BigUint::from(125u32));
        assert_eq!(space.rank(&[1, 0, 0]), 1);
        assert_eq!(space.rank(&[0, 1, 0]), 5);
        for r in 0..125 {
            assert_eq!(space.rank(&space.unrank(r)), r);
        }
    }

    #[test]
    fn fixed_tuple_examples() {
        assert_eq!(fixed_tuple_count(&Permutation::identity(3), 2), BigUint::from(9u32));
        let derangement = Permutation::parse_cycles("(1,2,3)", 3).unwrap();
        for k in 1..5 {
            assert!(fixed_tuple_count(&derangement, k).is_zero());
        }
        let p = Permutation::parse_cycles("(1,2)", 4).unwrap();
        assert_eq!(fixed_tuple_count(&p, 3), BigUint::from(8u32));
        assert_eq!(count_fixed_tuples_directly(&p, 3), BigUint::from(8u32));
    }

    #[test]
    fn burnside_examples() {
        let s3 = symmetric(3).unwrap();
        assert_eq!(burnside_average(&s3, 2).unwrap(), BigUint::from(2u32));
        let c3 = cyclic(3).unwrap();
        assert_eq!(burnside_average(&c3, 3).unwrap(), BigUint::from(9u32));
        let trivial = GeneratedGroup::trivial("1", 4).unwrap();
        for k in 1..5 {
            assert_eq!(burnside_average(&trivial, k).unwrap(), BigUint::from(4u32).pow(k as u32));
        }
    }

    #[test]
    fn burnside_budget() {
        assert!(matches!(
            burnside_average_with_budget(&symmetric(5).unwrap(), 2, 100),
            Err(Error::LongRunning { .. })
        ));
        assert!(matches!(burnside_average(&mathieu24(), 1), Err(Error::LongRunning { .. })));
    }

    #[test]
    fn non_divisible_sum_is_an_error() {
        // a histogram that cannot come from a group: 3 elements, total 4 fixed points
        let id = Permutation::identity(2);
        let swap = Permutation::parse_cycles("(1,2)", 2).unwrap();
        let h = FixedPointHistogram::from_elements(2, [&id, &swap, &id]);
        assert!(matches!(h.average(1), Err(Error::NonIntegerAverage { .. })));
    }

    #[test]
    fn histogram_matches_closure() {
        let g = group(6, &["(1,2,3)(4,5)", "(1,6)"]);
        let chain = build_chain(&g, &[]).unwrap();
        let elements = close_group(&g, 1000).unwrap();
        assert_eq!(
            fixed_point_histogram(&chain),
            FixedPointHistogram::from_elements(6, elements.iter())
        );
    }

    #[test]
    fn orbit_examples() {
        let trivial = GeneratedGroup::trivial("1", 2).unwrap();
        let summary = enumerate_orbits(&trivial, 2, 1000).unwrap();
        assert_eq!(summary.total_orbits, BigUint::from(4u32));
        assert!(summary.per_pattern.values().all(|p| p.lengths.iter().all(|&l| l == 1)));

        let c3 = enumerate_orbits(&cyclic(3).unwrap(), 2, 1000).unwrap();
        assert_eq!(c3.total_orbits, BigUint::from(3u32));
        assert_eq!(c3.per_pattern[&1], PatternOrbits { count: 1, lengths: vec![3] });
        assert_eq!(c3.per_pattern[&2], PatternOrbits { count: 2, lengths: vec![3, 3] });

        assert!(matches!(
            enumerate_orbits(&cyclic(10).unwrap(), 5, 1000),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn symmetric_orbits_follow_stirling() {
        for n in 1..=5usize {
            let g = symmetric(n).unwrap();
            let order = build_chain(&g, &[]).unwrap().order().to_u64().unwrap();
            for k in 1..=6usize {
                let summary = enumerate_orbits(&g, k, 1_000_000).unwrap();
                let expected: BigUint = (1..=k.min(n)).map(|j| stirling2(k, j).unwrap()).sum();
                assert_eq!(summary.total_orbits, expected, "S{n} k={k}");
                assert_eq!(summary.covered(), TupleSpace::new(n, k).size());
                for (&j, orbits) in &summary.per_pattern {
                    assert_eq!(BigUint::from(orbits.count), stirling2(k, j).unwrap());
                    for &l in &orbits.lengths {
                        assert_eq!(BigUint::from(l), falling_factorial(n, j));
                        assert_eq!(order % l, 0);
                    }
                }
                if k <= n {
                    assert_eq!(summary.total_orbits, bell(k).unwrap());
                }
            }
        }
    }

    #[test]
    fn tuple_orbit_examples() {
        // S_N on (1,2,3,2): length (N)_3
        for n in 3..=6 {
            let o = orbit_of_tuple(&symmetric(n).unwrap(), &[0, 1, 2, 1], 1_000_000).unwrap();
            assert_eq!(o.length, falling_factorial(n, 3));
            assert_eq!(o.representative, vec![0, 1, 2, 1]);
            assert!(o.closure_checked);
        }
        let trivial = GeneratedGroup::trivial("1", 4).unwrap();
        let o = orbit_of_tuple(&trivial, &[3, 1, 3], 100).unwrap();
        assert_eq!(o.length, BigUint::from(1u32));
        assert_eq!(o.representative, vec![3, 1, 3]);
        assert!(matches!(
            orbit_of_tuple(&trivial, &[4], 100),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn tuple_orbit_routes_agree() {
        let g = group(6, &["(1,2,3)(4,5)", "(2,6)(3,4)"]);
        let space = TupleSpace::new(6, 3);
        for r in 0..space.size_u64().unwrap() {
            let o = orbit_of_tuple(&g, &space.unrank(r), u64::MAX).unwrap();
            assert!(o.closure_checked);
        }
    }

    #[test]
    fn m24_six_tuple_orbits() {
        let m24 = mathieu24();
        let base = falling_factorial(24, 5);
        let long = &base * 16u32;
        let short = &base * 3u32;
        let mut seen = HashSet::new();
        for sixth in 5..24 {
            let o = orbit_of_tuple(&m24, &[0, 1, 2, 3, 4, sixth], 0).unwrap();
            assert!(o.length == long || o.length == short, "unexpected length {}", o.length);
            seen.insert(o.length);
        }
        assert_eq!(seen.len(), 2);
    }
}
