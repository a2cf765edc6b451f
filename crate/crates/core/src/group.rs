//! Permutation groups given by generators, and deterministic Schreier–Sims
//! stabilizer chains for exact orders, membership and pointwise stabilizers.

use std::collections::{HashSet, VecDeque};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// A subgroup of `S_N` named by a generating set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedGroup {
    label: String,
    degree: usize,
    generators: Vec<Permutation>,
}

impl GeneratedGroup {
    pub fn new(label: impl Into<String>, degree: usize, generators: Vec<Permutation>) -> Result<Self> {
        if degree == 0 {
            return Err(Error::BadParameter("degree must be at least 1".into()));
        }
        if generators.is_empty() {
            return Err(Error::BadParameter("generator list is empty".into()));
        }
        for g in &generators {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch {
                    left: degree,
                    right: g.degree(),
                });
            }
        }
        Ok(GeneratedGroup {
            label: label.into(),
            degree,
            generators,
        })
    }

    pub fn trivial(label: impl Into<String>, degree: usize) -> Result<Self> {
        Self::new(label, degree, vec![Permutation::identity(degree)])
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Points reachable from `point`, in breadth-first order.
    pub fn point_orbit(&self, point: usize) -> Vec<usize> {
        orbit_of_point(self.degree, &self.generators, point)
    }

    /// All point orbits, each listed from its least point, ordered by that point.
    pub fn point_orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree];
        let mut out = Vec::new();
        for x in 0..self.degree {
            if seen[x] {
                continue;
            }
            let orbit = self.point_orbit(x);
            for &y in &orbit {
                seen[y] = true;
            }
            out.push(orbit);
        }
        out
    }
}

fn orbit_of_point(degree: usize, generators: &[Permutation], point: usize) -> Vec<usize> {
    let mut seen = vec![false; degree];
    seen[point] = true;
    let mut orbit = vec![point];
    let mut head = 0;
    while head < orbit.len() {
        let x = orbit[head];
        head += 1;
        for g in generators {
            let y = g.apply(x);
            if !seen[y] {
                seen[y] = true;
                orbit.push(y);
            }
        }
    }
    orbit
}

/// Lists every element of the group by breadth-first closure from the identity.
///
/// Fails with `CapExceeded` as soon as more than `cap` elements have been found.
pub fn close_group(group: &GeneratedGroup, cap: usize) -> Result<Vec<Permutation>> {
    let identity = Permutation::identity(group.degree());
    let mut seen: HashSet<Permutation> = HashSet::new();
    let mut elements = vec![identity.clone()];
    seen.insert(identity);
    let mut head = 0;
    while head < elements.len() {
        let x = elements[head].clone();
        head += 1;
        for g in group.generators() {
            let y = g.compose_unchecked(&x);
            if seen.insert(y.clone()) {
                elements.push(y);
                if elements.len() > cap {
                    return Err(Error::CapExceeded {
                        what: format!("closure of {}", group.label()),
                        cap: cap as u64,
                    });
                }
            }
        }
    }
    Ok(elements)
}

/// One level of a stabilizer chain: the base point, the strong generators
/// fixing all earlier base points, and a transversal of the basic orbit.
#[derive(Debug, Clone)]
pub struct ChainLevel {
    point: usize,
    generators: Vec<Permutation>,
    orbit: Vec<usize>,
    /// `transversal[x]` maps `point` to `x`.
    transversal: Vec<Option<Permutation>>,
    inverses: Vec<Option<Permutation>>,
}

impl ChainLevel {
    fn new(degree: usize, point: usize, generators: Vec<Permutation>) -> Self {
        let mut level = ChainLevel {
            point,
            generators,
            orbit: Vec::new(),
            transversal: vec![None; degree],
            inverses: vec![None; degree],
        };
        level.rebuild_orbit();
        level
    }

    fn rebuild_orbit(&mut self) {
        let degree = self.transversal.len();
        self.transversal = vec![None; degree];
        self.inverses = vec![None; degree];
        let id = Permutation::identity(degree);
        self.transversal[self.point] = Some(id.clone());
        self.inverses[self.point] = Some(id);
        self.orbit = vec![self.point];
        let mut head = 0;
        while head < self.orbit.len() {
            let x = self.orbit[head];
            head += 1;
            for s in &self.generators {
                let y = s.apply(x);
                if self.transversal[y].is_none() {
                    let u = s.compose_unchecked(self.transversal[x].as_ref().unwrap());
                    self.inverses[y] = Some(u.inverse());
                    self.transversal[y] = Some(u);
                    self.orbit.push(y);
                }
            }
        }
    }

    pub fn point(&self) -> usize {
        self.point
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn orbit(&self) -> &[usize] {
        &self.orbit
    }

    /// The transversal element sending the base point to `x`, if `x` is in the basic orbit.
    pub fn representative(&self, x: usize) -> Option<&Permutation> {
        self.transversal.get(x).and_then(Option::as_ref)
    }
}

/// Base and strong generating set with basic-orbit transversals.
#[derive(Debug, Clone)]
pub struct StabilizerChain {
    degree: usize,
    levels: Vec<ChainLevel>,
    order: BigUint,
}

/// Builds a stabilizer chain by deterministic Schreier–Sims.
///
/// The base starts with `base_hint` (which must hold distinct, in-range
/// points) and is extended by the least point moved by a generator that
/// fixes the current base.
pub fn build_chain(group: &GeneratedGroup, base_hint: &[usize]) -> Result<StabilizerChain> {
    StabilizerChain::from_generators(group.degree(), group.generators(), base_hint)
}

impl StabilizerChain {
    pub fn from_generators(degree: usize, generators: &[Permutation], base_hint: &[usize]) -> Result<Self> {
        check_points(degree, base_hint)?;
        let mut gens: Vec<Permutation> = Vec::new();
        for g in generators {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch {
                    left: degree,
                    right: g.degree(),
                });
            }
            if !g.is_identity() && !gens.contains(g) {
                gens.push(g.clone());
            }
        }

        let mut base = base_hint.to_vec();
        for g in &gens {
            if base.iter().all(|&b| g.apply(b) == b) {
                base.push(g.least_moved_point().unwrap());
            }
        }
        let mut levels: Vec<ChainLevel> = Vec::with_capacity(base.len());
        for (i, &b) in base.iter().enumerate() {
            let fixing: Vec<Permutation> = gens
                .iter()
                .filter(|g| base[..i].iter().all(|&x| g.apply(x) == x))
                .cloned()
                .collect();
            levels.push(ChainLevel::new(degree, b, fixing));
        }

        let mut i = levels.len();
        while i > 0 {
            let level = i - 1;
            match first_failing_schreier_generator(&levels, level) {
                None => i -= 1,
                Some((residue, drop)) => {
                    if drop == levels.len() {
                        let point = residue
                            .least_moved_point()
                            .expect("non-identity residue moves a point");
                        levels.push(ChainLevel::new(degree, point, Vec::new()));
                    }
                    for l in &mut levels[level + 1..=drop] {
                        l.generators.push(residue.clone());
                        l.rebuild_orbit();
                    }
                    i = drop + 1;
                }
            }
        }

        let order = levels
            .iter()
            .fold(BigUint::one(), |acc, l| acc * l.orbit.len());
        Ok(StabilizerChain { degree, levels, order })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    pub fn order_u128(&self) -> Option<u128> {
        self.order.to_u128()
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.point).collect()
    }

    pub fn levels(&self) -> &[ChainLevel] {
        &self.levels
    }

    /// A generating set of the whole group.
    pub fn strong_generators(&self) -> &[Permutation] {
        self.levels.first().map(|l| l.generators.as_slice()).unwrap_or(&[])
    }

    /// Order of the pointwise stabilizer of the first `prefix` base points.
    pub fn stabilizer_order(&self, prefix: usize) -> BigUint {
        self.levels
            .iter()
            .skip(prefix)
            .fold(BigUint::one(), |acc, l| acc * l.orbit.len())
    }

    /// Strips `p` through the chain: `(residue, level where sifting stopped)`.
    fn sift(&self, p: &Permutation) -> (Permutation, usize) {
        sift_from(&self.levels, 0, p.clone())
    }
}

fn check_points(degree: usize, points: &[usize]) -> Result<()> {
    let mut seen = vec![false; degree];
    for &x in points {
        if x >= degree {
            return Err(Error::OutOfRange { point: x + 1, degree });
        }
        if seen[x] {
            return Err(Error::RepeatedPoint(x + 1));
        }
        seen[x] = true;
    }
    Ok(())
}

fn sift_from(levels: &[ChainLevel], start: usize, mut h: Permutation) -> (Permutation, usize) {
    let mut scratch = h.clone();
    for (l, level) in levels.iter().enumerate().skip(start) {
        let beta = h.apply(level.point);
        match &level.inverses[beta] {
            None => return (h, l),
            Some(inv) => {
                inv.compose_into(&h, &mut scratch);
                std::mem::swap(&mut h, &mut scratch);
            }
        }
    }
    (h, levels.len())
}

/// Finds a Schreier generator of `levels[level]` that does not sift through
/// the levels below it. Returns the residue and the level where it stopped.
fn first_failing_schreier_generator(levels: &[ChainLevel], level: usize) -> Option<(Permutation, usize)> {
    let current = &levels[level];
    let mut product = Permutation::identity(current.transversal.len());
    let mut schreier = product.clone();
    for &beta in &current.orbit {
        let u_beta = current.transversal[beta].as_ref().unwrap();
        for s in &current.generators {
            let gamma = s.apply(beta);
            s.compose_into(u_beta, &mut product);
            if current.transversal[gamma].as_ref() == Some(&product) {
                continue;
            }
            current.inverses[gamma]
                .as_ref()
                .unwrap()
                .compose_into(&product, &mut schreier);
            let (residue, drop) = sift_from(levels, level + 1, schreier.clone());
            if drop < levels.len() || !residue.is_identity() {
                return Some((residue, drop));
            }
        }
    }
    None
}

/// True iff `p` lies in the group described by `chain`.
pub fn membership(chain: &StabilizerChain, p: &Permutation) -> Result<bool> {
    if p.degree() != chain.degree {
        return Err(Error::DegreeMismatch {
            left: chain.degree,
            right: p.degree(),
        });
    }
    let (residue, drop) = chain.sift(p);
    Ok(drop == chain.levels.len() && residue.is_identity())
}

/// Generators of the subgroup fixing each of `points`.
///
/// The chain is rebuilt with `points` as the base prefix; the strong
/// generators below that prefix generate the stabilizer.
pub fn pointwise_stabilizer(chain: &StabilizerChain, points: &[usize]) -> Result<GeneratedGroup> {
    let rebuilt = StabilizerChain::from_generators(chain.degree, chain.strong_generators(), points)?;
    let mut gens: Vec<Permutation> = rebuilt
        .levels
        .get(points.len())
        .map(|l| l.generators.clone())
        .unwrap_or_default();
    if gens.is_empty() {
        gens.push(Permutation::identity(chain.degree));
    }
    let names: Vec<String> = points.iter().map(|x| (x + 1).to_string()).collect();
    GeneratedGroup::new(format!("stabilizer of ({})", names.join(",")), chain.degree, gens)
}

/// Walks group elements in mixed-radix order of transversal indices, the
/// last chain level varying fastest. Element with index `i` is
/// `u_0 ∘ u_1 ∘ … ∘ u_{m-1}` where the digits of `i` pick each `u_l`.
pub struct ElementCursor<'a> {
    chain: &'a StabilizerChain,
    digits: Vec<usize>,
    /// `prefix[l] = u_0 ∘ … ∘ u_l`
    prefix: Vec<Permutation>,
    identity: Permutation,
    remaining: u128,
}

impl<'a> ElementCursor<'a> {
    /// Cursor over indices `start .. start + count` (clamped to the group order).
    pub fn new(chain: &'a StabilizerChain, start: u128, count: u128) -> Self {
        let order = chain.order_u128().unwrap_or(u128::MAX);
        let start = start.min(order);
        let count = count.min(order - start);
        let m = chain.levels.len();
        let mut digits = vec![0; m];
        let mut idx = start;
        for l in (0..m).rev() {
            let radix = chain.levels[l].orbit.len() as u128;
            digits[l] = (idx % radix) as usize;
            idx /= radix;
        }
        let identity = Permutation::identity(chain.degree);
        let mut cursor = ElementCursor {
            chain,
            digits,
            prefix: vec![identity.clone(); m],
            identity,
            remaining: count,
        };
        cursor.refresh_from(0);
        cursor
    }

    fn refresh_from(&mut self, from: usize) {
        for l in from..self.digits.len() {
            let level = &self.chain.levels[l];
            let u = level.transversal[level.orbit[self.digits[l]]].as_ref().unwrap();
            if l == 0 {
                self.prefix[0].clone_from(u);
            } else {
                let (head, tail) = self.prefix.split_at_mut(l);
                head[l - 1].compose_into(u, &mut tail[0]);
            }
        }
    }

    /// Current element, or `None` once the range is exhausted.
    pub fn current(&self) -> Option<&Permutation> {
        if self.remaining == 0 {
            None
        } else {
            Some(self.prefix.last().unwrap_or(&self.identity))
        }
    }

    pub fn advance(&mut self) {
        if self.remaining == 0 {
            return;
        }
        self.remaining -= 1;
        if self.remaining == 0 {
            return;
        }
        let mut l = self.digits.len();
        while l > 0 {
            l -= 1;
            self.digits[l] += 1;
            if self.digits[l] < self.chain.levels[l].orbit.len() {
                self.refresh_from(l);
                return;
            }
            self.digits[l] = 0;
        }
        self.refresh_from(0);
    }
}

/// Iterator over every group element exactly once, without storing the group.
pub struct Elements<'a> {
    cursor: ElementCursor<'a>,
}

impl Iterator for Elements<'_> {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let item = self.cursor.current().cloned();
        self.cursor.advance();
        item
    }
}

pub fn iterate_elements(chain: &StabilizerChain) -> Elements<'_> {
    iterate_range(chain, 0, u128::MAX)
}

/// Elements with mixed-radix indices in `start .. start + count`; disjoint
/// ranges yield disjoint element sets.
pub fn iterate_range(chain: &StabilizerChain, start: u128, count: u128) -> Elements<'_> {
    Elements {
        cursor: ElementCursor::new(chain, start, count),
    }
}

/// Breadth-first orbit of a point with a witness for each orbit point.
pub(crate) fn orbit_with_witnesses(
    degree: usize,
    generators: &[Permutation],
    point: usize,
) -> Vec<(usize, Permutation)> {
    let mut witness: Vec<Option<Permutation>> = vec![None; degree];
    witness[point] = Some(Permutation::identity(degree));
    let mut queue = VecDeque::from([point]);
    let mut out = Vec::new();
    while let Some(x) = queue.pop_front() {
        let wx = witness[x].clone().unwrap();
        for g in generators {
            let y = g.apply(x);
            if witness[y].is_none() {
                witness[y] = Some(g.compose_unchecked(&wx));
                queue.push_back(y);
            }
        }
        out.push((x, wx));
    }
    out
}
