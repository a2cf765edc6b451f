//! Division numbers `d_j(G)`: the number of G-orbits on injective j-tuples.
//!
//! Under `S_N` the injective j-tuples form a single orbit of length `(N)_j`;
//! a subgroup splits it into `d_j` pieces. The transitivity degree is the
//! largest `t` with `d_1 = … = d_t = 1`, and the number of orbits on all
//! k-tuples is `Σ_j d_j·S(k, j)`. [`Verifier`] computes that count three
//! independent ways and compares them.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::action::{
    check_element_budget, enumerate_orbits, fixed_point_histogram, FixedPointHistogram, TupleSpace,
    DEFAULT_ELEMENT_BUDGET, DEFAULT_STATE_CAP,
};
use crate::combinat::{falling_factorial, stirling2_capped, DEFAULT_STIRLING_CAP};
use crate::error::{Error, Result};
use crate::group::{build_chain, pointwise_stabilizer, GeneratedGroup, StabilizerChain};
use crate::perm::Permutation;

pub const DEFAULT_REPRESENTATIVE_BUDGET: usize = 100_000;

/// Orbits of `G` on injective j-tuples for one `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisionEntry {
    pub j: usize,
    pub d: BigUint,
    /// Sub-orbit length -> how many sub-orbits have it.
    pub lengths: BTreeMap<BigUint, BigUint>,
}

impl DivisionEntry {
    /// `Σ length·multiplicity`; equals `(N)_j` when nothing was lost.
    pub fn total_length(&self) -> BigUint {
        self.lengths.iter().map(|(l, m)| l * m).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisionTable {
    pub label: String,
    pub degree: usize,
    pub order: BigUint,
    pub entries: Vec<DivisionEntry>,
    /// First level at which every representative had a trivial stabilizer.
    pub trivial_stabilizer_from: Option<usize>,
    /// Set when the representative budget stopped the computation early.
    pub truncated: bool,
}

impl DivisionTable {
    pub fn computed_up_to(&self) -> usize {
        self.entries.len()
    }

    pub fn d(&self, j: usize) -> Option<&BigUint> {
        j.checked_sub(1).and_then(|i| self.entries.get(i)).map(|e| &e.d)
    }

    pub fn is_transitive(&self) -> bool {
        self.d(1).is_some_and(One::is_one)
    }

    /// Number of leading levels with `d_j = 1`; 0 for intransitive groups.
    pub fn transitivity_degree(&self) -> usize {
        self.entries.iter().take_while(|e| e.d.is_one()).count()
    }
}

#[derive(Debug, Clone)]
pub struct DivisionOptions {
    pub representative_budget: usize,
    /// Random representatives re-checked when the trivial-stabilizer shortcut fires.
    pub spot_checks: usize,
    pub seed: u64,
    /// Stop after the first level with `d_j >= 2`.
    pub stop_at_first_split: bool,
}

impl Default for DivisionOptions {
    fn default() -> Self {
        DivisionOptions {
            representative_budget: DEFAULT_REPRESENTATIVE_BUDGET,
            spot_checks: 3,
            seed: 0x5eed,
            stop_at_first_split: false,
        }
    }
}

/// One orbit representative: an injective tuple and its pointwise stabilizer.
struct Representative {
    tuple: Vec<usize>,
    /// Generators of the stabilizer; empty when it is trivial.
    stabilizer: Vec<Permutation>,
    stabilizer_order: BigUint,
}

impl Representative {
    /// One child per orbit of the stabilizer on the unused points, least point first.
    fn extend(&self, degree: usize) -> Result<Vec<Representative>> {
        let mut used = vec![false; degree];
        for &x in &self.tuple {
            used[x] = true;
        }
        let mut children = Vec::new();
        for x in 0..degree {
            if used[x] {
                continue;
            }
            let orbit = crate::group::orbit_with_witnesses(degree, &self.stabilizer, x);
            for (y, _) in &orbit {
                used[*y] = true;
            }
            let stabilizer_order = &self.stabilizer_order / orbit.len();
            let stabilizer = if stabilizer_order.is_one() {
                Vec::new()
            } else {
                let chain = StabilizerChain::from_generators(degree, &self.stabilizer, &[x])?;
                chain
                    .levels()
                    .get(1)
                    .map(|l| l.generators().to_vec())
                    .unwrap_or_default()
            };
            let mut tuple = self.tuple.clone();
            tuple.push(x);
            children.push(Representative {
                tuple,
                stabilizer,
                stabilizer_order,
            });
        }
        Ok(children)
    }
}

fn entry_for(j: usize, order: &BigUint, reps: &[Representative]) -> DivisionEntry {
    let mut lengths: BTreeMap<BigUint, BigUint> = BTreeMap::new();
    for r in reps {
        *lengths.entry(order / &r.stabilizer_order).or_default() += 1u32;
    }
    DivisionEntry {
        j,
        d: BigUint::from(reps.len()),
        lengths,
    }
}

/// `d_1 … d_max_j` with default options.
pub fn division_sequence(group: &GeneratedGroup, max_j: usize) -> Result<DivisionTable> {
    division_sequence_with(group, max_j, &DivisionOptions::default())
}

/// Level-wise extension of orbit representatives of injective tuples.
///
/// Each representative `(x_1, …, x_j)` carries its pointwise stabilizer
/// `H`; at the next level it spawns one representative per `H`-orbit on the
/// unused points, and each sub-orbit has length `|G| / |H_x|`. Once every
/// stabilizer at some level is trivial, later levels follow from
/// `d_{j+1} = d_j·(N - j)` with all lengths `|G|`.
pub fn division_sequence_with(group: &GeneratedGroup, max_j: usize, options: &DivisionOptions) -> Result<DivisionTable> {
    let degree = group.degree();
    if max_j == 0 || max_j > degree {
        return Err(Error::OutOfRange { point: max_j, degree });
    }
    let chain = build_chain(group, &[])?;
    let order = chain.order().clone();

    let mut reps: Vec<Representative> = Vec::new();
    for orbit in group.point_orbits() {
        let x = orbit[0];
        let stabilizer = if order.is_one() {
            Vec::new()
        } else {
            let rebuilt = StabilizerChain::from_generators(degree, chain.strong_generators(), &[x])?;
            rebuilt.levels().get(1).map(|l| l.generators().to_vec()).unwrap_or_default()
        };
        reps.push(Representative {
            tuple: vec![x],
            stabilizer,
            stabilizer_order: &order / orbit.len(),
        });
    }

    let mut table = DivisionTable {
        label: group.label().to_string(),
        degree,
        order: order.clone(),
        entries: Vec::new(),
        trivial_stabilizer_from: None,
        truncated: false,
    };
    let mut j = 1;
    loop {
        let entry = entry_for(j, &order, &reps);
        let split = entry.d > BigUint::one();
        table.entries.push(entry);
        if j == max_j || (split && options.stop_at_first_split) {
            break;
        }
        if reps.iter().all(|r| r.stabilizer_order.is_one()) {
            table.trivial_stabilizer_from = Some(j);
            spot_check_trivial(&chain, &reps, options)?;
            let mut d = table.entries.last().unwrap().d.clone();
            for next in j + 1..=max_j {
                d *= degree - (next - 1);
                let lengths = BTreeMap::from([(order.clone(), d.clone())]);
                table.entries.push(DivisionEntry {
                    j: next,
                    d: d.clone(),
                    lengths,
                });
                if options.stop_at_first_split && d > BigUint::one() {
                    break;
                }
            }
            break;
        }
        let children: Vec<Vec<Representative>> = reps
            .par_iter()
            .map(|r| r.extend(degree))
            .collect::<Result<_>>()?;
        let count: usize = children.iter().map(Vec::len).sum();
        if count > options.representative_budget {
            table.truncated = true;
            break;
        }
        reps = children.into_iter().flatten().collect();
        j += 1;
    }
    Ok(table)
}

/// Extends a few random level-j representatives by one random unused point
/// and confirms from scratch that the extended tuple has a trivial stabilizer.
fn spot_check_trivial(chain: &StabilizerChain, reps: &[Representative], options: &DivisionOptions) -> Result<()> {
    let degree = chain.degree();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    for rep in reps.choose_multiple(&mut rng, options.spot_checks) {
        let unused: Vec<usize> = (0..degree).filter(|x| !rep.tuple.contains(x)).collect();
        let Some(&x) = unused.choose(&mut rng) else {
            continue;
        };
        let mut tuple = rep.tuple.clone();
        tuple.push(x);
        let stab = pointwise_stabilizer(chain, &tuple)?;
        let stab_order = build_chain(&stab, &[])?.order().clone();
        if !stab_order.is_one() {
            return Err(Error::Inconsistent(format!(
                "stabilizer of {tuple:?} has order {stab_order}, expected trivial"
            )));
        }
    }
    Ok(())
}

/// Largest `t` such that the group is t-transitive; 0 when intransitive.
pub fn transitivity_degree(group: &GeneratedGroup) -> Result<usize> {
    let options = DivisionOptions {
        stop_at_first_split: true,
        ..DivisionOptions::default()
    };
    Ok(division_sequence_with(group, group.degree(), &options)?.transitivity_degree())
}

/// `Σ_{j=1}^{min(k,N)} d_j·S(k, j)`.
pub fn rhs_division_sum(table: &DivisionTable, k: usize) -> Result<BigUint> {
    rhs_division_sum_capped(table, k, DEFAULT_STIRLING_CAP)
}

pub fn rhs_division_sum_capped(table: &DivisionTable, k: usize, stirling_cap: usize) -> Result<BigUint> {
    let need = k.min(table.degree);
    if table.computed_up_to() < need {
        return Err(Error::Insufficient {
            have: table.computed_up_to(),
            need,
        });
    }
    table.entries[..need]
        .iter()
        .map(|e| Ok(&e.d * stirling2_capped(k, e.j, stirling_cap)?))
        .sum()
}

/// The closed form for M24 on k-tuples:
/// `Σ_{j≤5} S(k,j) + 2S(k,6) + 9S(k,7) + 123S(k,8) + 1938 Σ_{j=9}^{min(k,24)} 15!/(24-j)!·S(k,j)`.
pub fn m24_formula_rhs(k: usize) -> Result<BigUint> {
    let s = |j: usize| stirling2_capped(k, j, DEFAULT_STIRLING_CAP);
    let mut total = BigUint::zero();
    for j in 1..=5 {
        total += s(j)?;
    }
    total += s(6)? * 2u32 + s(7)? * 9u32 + s(8)? * 123u32;
    for j in 9..=k.min(24) {
        total += falling_factorial(15, j - 9) * s(j)? * 1938u32;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budgets {
    pub element_budget: u64,
    pub state_cap: u64,
    pub representative_budget: usize,
    pub stirling_cap: usize,
    /// Stream the group even when it is larger than `element_budget`.
    pub long_running_ok: bool,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            element_budget: DEFAULT_ELEMENT_BUDGET,
            state_cap: DEFAULT_STATE_CAP,
            representative_budget: DEFAULT_REPRESENTATIVE_BUDGET,
            stirling_cap: DEFAULT_STIRLING_CAP,
            long_running_ok: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Elapsed {
    pub lhs: Option<u64>,
    pub mid: Option<u64>,
    pub rhs: u64,
}

/// The three counts of orbits on k-tuples: Burnside average, exhaustive
/// enumeration and the division sum. The first two may be skipped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport {
    pub label: String,
    pub degree: usize,
    pub order: BigUint,
    pub k: usize,
    pub lhs_burnside: Option<BigUint>,
    pub mid_orbits: Option<BigUint>,
    pub rhs_divisions: BigUint,
    pub matched: bool,
    pub elapsed_ms: Elapsed,
    /// Why a value was skipped.
    pub notes: Vec<String>,
}

/// Runs identity checks for one group, reusing its chain, fixed-point
/// histogram and division table across values of k.
pub struct Verifier {
    group: GeneratedGroup,
    chain: StabilizerChain,
    budgets: Budgets,
    histogram: Option<(FixedPointHistogram, u64)>,
    table: Option<(DivisionTable, u64)>,
}

impl Verifier {
    pub fn new(group: GeneratedGroup, budgets: Budgets) -> Result<Self> {
        let chain = build_chain(&group, &[])?;
        Ok(Verifier {
            group,
            chain,
            budgets,
            histogram: None,
            table: None,
        })
    }

    pub fn group(&self) -> &GeneratedGroup {
        &self.group
    }

    pub fn chain(&self) -> &StabilizerChain {
        &self.chain
    }

    /// The division table up to `N`, computed on first use.
    pub fn table(&mut self) -> Result<&DivisionTable> {
        if self.table.is_none() {
            let start = Instant::now();
            let options = DivisionOptions {
                representative_budget: self.budgets.representative_budget,
                ..DivisionOptions::default()
            };
            let table = division_sequence_with(&self.group, self.group.degree(), &options)?;
            self.table = Some((table, millis(start)));
        }
        Ok(&self.table.as_ref().unwrap().0)
    }

    fn histogram(&mut self) -> Result<Option<(&FixedPointHistogram, u64)>> {
        if self.histogram.is_none() {
            if !self.budgets.long_running_ok
                && check_element_budget(&self.chain, self.budgets.element_budget).is_err()
            {
                return Ok(None);
            }
            let start = Instant::now();
            let histogram = fixed_point_histogram(&self.chain);
            self.histogram = Some((histogram, millis(start)));
        }
        Ok(self.histogram.as_ref().map(|(h, t)| (h, *t)))
    }

    pub fn verify(&mut self, k: usize) -> Result<IdentityReport> {
        let mut notes = Vec::new();
        let mut elapsed = Elapsed::default();

        let start = Instant::now();
        let stirling_cap = self.budgets.stirling_cap;
        let rhs = rhs_division_sum_capped(self.table()?, k, stirling_cap)?;
        // table construction is charged to every report that uses it
        elapsed.rhs = millis(start).max(self.table.as_ref().unwrap().1);

        let lhs = match self.histogram()? {
            Some((histogram, build_ms)) => {
                let start = Instant::now();
                let value = histogram.average(k)?;
                elapsed.lhs = Some(build_ms + millis(start));
                Some(value)
            }
            None => {
                notes.push(format!(
                    "lhs skipped: |G| = {} exceeds element budget {}",
                    self.chain.order(),
                    self.budgets.element_budget
                ));
                None
            }
        };

        let space = TupleSpace::new(self.group.degree(), k);
        let mid = if space.size_u64().is_some_and(|s| s <= self.budgets.state_cap) {
            let start = Instant::now();
            let summary = enumerate_orbits(&self.group, k, self.budgets.state_cap)?;
            elapsed.mid = Some(millis(start));
            Some(summary.total_orbits)
        } else {
            notes.push(format!(
                "mid skipped: {}^{} tuples exceed state cap {}",
                self.group.degree(),
                k,
                self.budgets.state_cap
            ));
            None
        };

        let matched = [&lhs, &mid].iter().all(|v| v.as_ref().is_none_or(|v| *v == rhs));
        Ok(IdentityReport {
            label: self.group.label().to_string(),
            degree: self.group.degree(),
            order: self.chain.order().clone(),
            k,
            lhs_burnside: lhs,
            mid_orbits: mid,
            rhs_divisions: rhs,
            matched,
            elapsed_ms: elapsed,
            notes,
        })
    }
}

fn millis(start: Instant) -> u64 {
    start.elapsed().as_millis().to_u64().unwrap_or(u64::MAX)
}

/// Checks one `k` for one group.
pub fn verify_identity(group: &GeneratedGroup, k: usize, budgets: Budgets) -> Result<IdentityReport> {
    Verifier::new(group.clone(), budgets)?.verify(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::enumerate_orbits;
    use crate::catalog::{alternating, cyclic, dihedral, mathieu11, mathieu12, mathieu24, symmetric};
    use crate::combinat::{bell, stirling2};
    use crate::group::close_group;
    use std::collections::HashSet;

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    /// Orbits of the group on injective j-tuples by brute force over the element list.
    fn injective_orbit_lengths(group: &GeneratedGroup, j: usize) -> Vec<u64> {
        let elements = close_group(group, 1_000_000).unwrap();
        let n = group.degree();
        let space = TupleSpace::new(n, j);
        let mut seen = HashSet::new();
        let mut lengths = Vec::new();
        for r in 0..space.size_u64().unwrap() {
            let x = space.unrank(r);
            if crate::action::pattern(&x) != j || seen.contains(&x) {
                continue;
            }
            let orbit: HashSet<Vec<usize>> =
                elements.iter().map(|g| g.apply_tuple(&x).unwrap()).collect();
            lengths.push(orbit.len() as u64);
            seen.extend(orbit);
        }
        lengths.sort_unstable();
        lengths
    }

    fn table_lengths(entry: &DivisionEntry) -> Vec<u64> {
        let mut out = Vec::new();
        for (l, m) in &entry.lengths {
            for _ in 0..m.to_u64().unwrap() {
                out.push(l.to_u64().unwrap());
            }
        }
        out.sort_unstable();
        out
    }

    #[test]
    fn symmetric_has_single_orbits() {
        let table = division_sequence(&symmetric(5).unwrap(), 5).unwrap();
        assert_eq!(table.computed_up_to(), 5);
        for e in &table.entries {
            assert!(e.d.is_one());
            assert_eq!(e.total_length(), falling_factorial(5, e.j));
        }
        assert_eq!(table.transitivity_degree(), 5);
    }

    #[test]
    fn a4_divisions_match_brute_force() {
        let a4 = alternating(4).unwrap();
        let table = division_sequence(&a4, 3).unwrap();
        let d: Vec<u64> = table.entries.iter().map(|e| e.d.to_u64().unwrap()).collect();
        assert_eq!(d, vec![1, 1, 2]);
        for e in &table.entries {
            assert_eq!(table_lengths(e), injective_orbit_lengths(&a4, e.j));
        }
    }

    #[test]
    fn small_groups_match_brute_force() {
        let groups = [
            cyclic(5).unwrap(),
            dihedral(6).unwrap(),
            alternating(5).unwrap(),
            GeneratedGroup::new(
                "intransitive",
                6,
                vec![Permutation::parse_cycles("(1,2,3)(4,5)", 6).unwrap()],
            )
            .unwrap(),
            GeneratedGroup::trivial("1", 4).unwrap(),
        ];
        for g in &groups {
            let n = g.degree();
            let table = division_sequence(g, n.min(5)).unwrap();
            for e in &table.entries {
                assert_eq!(table_lengths(e), injective_orbit_lengths(g, e.j), "{} j={}", g.label(), e.j);
                assert_eq!(e.total_length(), falling_factorial(n, e.j));
            }
        }
    }

    #[test]
    fn shortcut_fires_for_regular_groups() {
        let table = division_sequence(&cyclic(6).unwrap(), 6).unwrap();
        assert_eq!(table.trivial_stabilizer_from, Some(1));
        let d: Vec<u64> = table.entries.iter().map(|e| e.d.to_u64().unwrap()).collect();
        assert_eq!(d, vec![1, 5, 20, 60, 120, 120]);
    }

    #[test]
    fn max_j_out_of_range() {
        assert!(matches!(
            division_sequence(&symmetric(3).unwrap(), 4),
            Err(Error::OutOfRange { .. })
        ));
        assert!(division_sequence(&symmetric(3).unwrap(), 0).is_err());
    }

    #[test]
    fn budget_truncates() {
        let options = DivisionOptions {
            representative_budget: 10,
            ..DivisionOptions::default()
        };
        let g = GeneratedGroup::new(
            "swap",
            8,
            vec![Permutation::parse_cycles("(1,2)", 8).unwrap()],
        )
        .unwrap();
        let table = division_sequence_with(&g, 5, &options).unwrap();
        assert!(table.truncated);
        assert!(table.computed_up_to() < 5);
        assert!(matches!(rhs_division_sum(&table, 5), Err(Error::Insufficient { .. })));
    }

    #[test]
    fn transitivity_examples() {
        for n in 1..=6 {
            assert_eq!(transitivity_degree(&symmetric(n).unwrap()).unwrap(), n);
        }
        assert_eq!(transitivity_degree(&cyclic(4).unwrap()).unwrap(), 1);
        let c4 = division_sequence(&cyclic(4).unwrap(), 2).unwrap();
        assert_eq!(c4.d(2), Some(&big(3)));
        assert_eq!(transitivity_degree(&alternating(5).unwrap()).unwrap(), 3);
        assert_eq!(transitivity_degree(&GeneratedGroup::trivial("1", 3).unwrap()).unwrap(), 0);
    }

    #[test]
    fn mathieu_transitivity() {
        assert_eq!(transitivity_degree(&mathieu11()).unwrap(), 4);
        assert_eq!(transitivity_degree(&mathieu12()).unwrap(), 5);
        assert_eq!(transitivity_degree(&mathieu24()).unwrap(), 5);
    }

    #[test]
    fn rhs_examples() {
        let c3 = division_sequence(&cyclic(3).unwrap(), 3).unwrap();
        assert_eq!(rhs_division_sum(&c3, 3).unwrap(), big(9));
        assert_eq!(enumerate_orbits(&cyclic(3).unwrap(), 3, 100).unwrap().total_orbits, big(9));
        let s4 = division_sequence(&symmetric(4).unwrap(), 4).unwrap();
        for k in 1..=8 {
            let expected: BigUint = (1..=k.min(4)).map(|j| stirling2(k, j).unwrap()).sum();
            assert_eq!(rhs_division_sum(&s4, k).unwrap(), expected);
        }
        let m11 = division_sequence(&mathieu11(), 11).unwrap();
        for k in 1..=4 {
            assert_eq!(rhs_division_sum(&m11, k).unwrap(), bell(k).unwrap());
        }
        let short = division_sequence(&symmetric(4).unwrap(), 2).unwrap();
        assert_eq!(
            rhs_division_sum(&short, 3),
            Err(Error::Insufficient { have: 2, need: 3 })
        );
    }

    #[test]
    fn m24_formula_small_k() {
        assert_eq!(m24_formula_rhs(1).unwrap(), big(1));
        for k in 1..=5 {
            assert_eq!(m24_formula_rhs(k).unwrap(), bell(k).unwrap());
        }
        assert_eq!(m24_formula_rhs(5).unwrap(), big(52));
        assert!(matches!(m24_formula_rhs(65), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn verify_examples() {
        let report = verify_identity(&symmetric(4).unwrap(), 6, Budgets::default()).unwrap();
        let expected: BigUint = (1..=4).map(|j| stirling2(6, j).unwrap()).sum();
        assert_eq!(report.lhs_burnside.as_ref(), Some(&expected));
        assert_eq!(report.mid_orbits.as_ref(), Some(&expected));
        assert_eq!(report.rhs_divisions, expected);
        assert!(report.matched);

        let report = verify_identity(&mathieu11(), 4, Budgets::default()).unwrap();
        assert_eq!(report.lhs_burnside, Some(big(15)));
        assert_eq!(report.rhs_divisions, big(15));
        assert!(report.matched);

        let report = verify_identity(&GeneratedGroup::trivial("1", 3).unwrap(), 2, Budgets::default()).unwrap();
        assert_eq!(report.lhs_burnside, Some(big(9)));
        assert_eq!(report.mid_orbits, Some(big(9)));
        assert_eq!(report.rhs_divisions, big(9));
    }

    #[test]
    fn verify_records_skips() {
        let budgets = Budgets {
            element_budget: 10,
            state_cap: 10,
            ..Budgets::default()
        };
        let report = verify_identity(&symmetric(4).unwrap(), 3, budgets).unwrap();
        assert!(report.lhs_burnside.is_none());
        assert!(report.mid_orbits.is_none());
        assert!(report.matched);
        assert_eq!(report.notes.len(), 2);
    }
}
