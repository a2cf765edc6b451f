//! Permutations of `{0, .., N-1}` stored as image tables.
//!
//! Points are 0-based everywhere inside the crate. Cycle notation, the only
//! text format, is 1-based: `(1,2,3)(4,5)` on 5 points maps internal point
//! 0 to 1, 1 to 2, 2 to 0, 3 to 4 and 4 to 3.
//!
//! # Composition order
//!
//! [`Permutation::compose`] applies the right factor first:
//! `p.compose(&q)?.apply(i) == p.apply(q.apply(i))`. Everything else in the
//! crate multiplies permutations through `compose`/`inverse` only.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree).collect(),
        }
    }

    /// Builds a permutation from its image table, checking that it is a bijection.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let degree = images.len();
        let mut seen = vec![false; degree];
        for &x in &images {
            if x >= degree {
                return Err(Error::OutOfRange { point: x + 1, degree });
            }
            if seen[x] {
                return Err(Error::RepeatedPoint(x + 1));
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds a permutation from 0-based cycles. Points not listed are fixed.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images: Vec<usize> = (0..degree).collect();
        let mut seen = vec![false; degree];
        for cycle in cycles {
            for (i, &x) in cycle.iter().enumerate() {
                if x >= degree {
                    return Err(Error::OutOfRange { point: x + 1, degree });
                }
                if seen[x] {
                    return Err(Error::RepeatedPoint(x + 1));
                }
                seen[x] = true;
                images[x] = cycle[(i + 1) % cycle.len()];
            }
        }
        Ok(Permutation { images })
    }

    /// Parses 1-based cycle notation such as `(1,2,3)(4,5)`; `()` is the identity.
    pub fn parse_cycles(text: &str, degree: usize) -> Result<Self> {
        parse_cycles(text, degree)
    }

    pub fn random<R: Rng + ?Sized>(degree: usize, rng: &mut R) -> Self {
        let mut images: Vec<usize> = (0..degree).collect();
        images.shuffle(rng);
        Permutation { images }
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, point: usize) -> usize {
        self.images[point]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `self ∘ other`: `other` acts first, then `self`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        Ok(self.compose_unchecked(other))
    }

    /// Same as [`compose`](Self::compose) for callers that already know the degrees agree.
    #[inline]
    pub(crate) fn compose_unchecked(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation {
            images: other.images.iter().map(|&x| self.images[x]).collect(),
        }
    }

    /// Writes `self ∘ other` into `out`, reusing its allocation.
    #[inline]
    pub(crate) fn compose_into(&self, other: &Permutation, out: &mut Permutation) {
        debug_assert_eq!(self.degree(), other.degree());
        out.images.clear();
        out.images.extend(other.images.iter().map(|&x| self.images[x]));
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            images[x] = i;
        }
        Permutation { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn fixed_points(&self) -> usize {
        self.images
            .iter()
            .enumerate()
            .filter(|&(i, &x)| i == x)
            .count()
    }

    pub fn least_moved_point(&self) -> Option<usize> {
        self.images.iter().enumerate().position(|(i, &x)| i != x)
    }

    /// Entrywise image of a tuple of 0-based points.
    pub fn apply_tuple(&self, tuple: &[usize]) -> Result<Vec<usize>> {
        tuple
            .iter()
            .map(|&x| {
                if x < self.degree() {
                    Ok(self.images[x])
                } else {
                    Err(Error::OutOfRange {
                        point: x + 1,
                        degree: self.degree(),
                    })
                }
            })
            .collect()
    }

    /// Cycles of length at least two, each starting at its least point, ordered by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] || self.images[start] == start {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.images[start];
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.images[x];
            }
            out.push(cycle);
        }
        out
    }

    /// Cycle lengths including fixed points, sorted ascending; they sum to the degree.
    pub fn cycle_type(&self) -> Vec<usize> {
        let moved: usize = self.cycles().iter().map(Vec::len).sum();
        let mut lengths = vec![1; self.degree() - moved];
        lengths.extend(self.cycles().iter().map(Vec::len));
        lengths.sort_unstable();
        lengths
    }

    /// 1-based cycle notation; `()` for the identity.
    pub fn to_cycle_string(&self) -> String {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return "()".to_string();
        }
        let mut s = String::new();
        for cycle in cycles {
            s.push('(');
            let entries: Vec<String> = cycle.iter().map(|x| (x + 1).to_string()).collect();
            s.push_str(&entries.join(","));
            s.push(')');
        }
        s
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_cycle_string())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation[{}]{}", self.degree(), self.to_cycle_string())
    }
}

/// Grammar: `CYCLES := "()" | CYCLE+`, `CYCLE := "(" INT ("," INT)* ")"`.
/// Whitespace is allowed between cycles but not inside one.
pub fn parse_cycles(text: &str, degree: usize) -> Result<Permutation> {
    let text = text.trim();
    if text == "()" {
        return Ok(Permutation::identity(degree));
    }
    if text.is_empty() {
        return Err(Error::Malformed("empty input".into()));
    }
    let bytes = text.as_bytes();
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        match bytes[pos] {
            b' ' | b'\t' | b'\n' | b'\r' => pos += 1,
            b'(' => {
                let close = text[pos..]
                    .find(')')
                    .map(|off| pos + off)
                    .ok_or_else(|| Error::Malformed(format!("unclosed cycle at byte {pos}")))?;
                let body = &text[pos + 1..close];
                if body.contains('(') {
                    return Err(Error::Malformed(format!("nested '(' at byte {pos}")));
                }
                let mut cycle = Vec::new();
                for entry in body.split(',') {
                    if entry.is_empty() {
                        return Err(Error::Malformed(format!("empty cycle entry in `({body})`")));
                    }
                    if !entry.bytes().all(|b| b.is_ascii_digit()) {
                        return Err(Error::Malformed(format!("bad entry `{entry}`")));
                    }
                    let value: usize = entry
                        .parse()
                        .map_err(|_| Error::Malformed(format!("bad entry `{entry}`")))?;
                    if value < 1 || value > degree {
                        return Err(Error::OutOfRange { point: value, degree });
                    }
                    cycle.push(value - 1);
                }
                cycles.push(cycle);
                pos = close + 1;
            }
            b')' => return Err(Error::Malformed(format!("unbalanced ')' at byte {pos}"))),
            other => {
                return Err(Error::Malformed(format!(
                    "unexpected character `{}` at byte {pos}",
                    other as char
                )))
            }
        }
    }
    Permutation::from_cycles(degree, &cycles)
}
