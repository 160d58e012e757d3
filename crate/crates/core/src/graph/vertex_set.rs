use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sorted, duplicate-free set of vertex indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    /// The full vertex range `0..n`.
    pub fn all(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// Builds a set from a sorted, strictly increasing vector without re-sorting.
    pub(crate) fn from_sorted(v: Vec<usize>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        Self(v)
    }

    pub fn from_mask(mask: &[bool]) -> Self {
        Self(
            mask.iter()
                .enumerate()
                .filter_map(|(i, &b)| b.then_some(i))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().copied()
    }

    /// Membership bitmap over `0..n`.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &v in &self.0 {
            m[v] = true;
        }
        m
    }

    /// Fails if any member is `>= n`.
    pub fn check_range(&self, n: usize) -> Result<()> {
        match self.0.last() {
            Some(&v) if v >= n => Err(Error::VertexOutOfRange { vertex: v, count: n }),
            _ => Ok(()),
        }
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        let mut j = 0;
        for &v in &self.0 {
            while j < other.0.len() && other.0[j] < v {
                j += 1;
            }
            if j == other.0.len() || other.0[j] != v {
                return false;
            }
        }
        true
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        let mut out = Vec::with_capacity(self.len());
        let mut j = 0;
        for &v in &self.0 {
            while j < other.0.len() && other.0[j] < v {
                j += 1;
            }
            if j == other.0.len() || other.0[j] != v {
                out.push(v);
            }
        }
        VertexSet(out)
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        VertexSet(out)
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0.iter().copied().filter(|&v| other.contains(v)).collect())
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut v: Vec<usize> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }
}

impl From<Vec<usize>> for VertexSet {
    fn from(v: Vec<usize>) -> Self {
        v.into_iter().collect()
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = usize;
    type IntoIter = std::iter::Copied<std::slice::Iter<'a, usize>>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter().copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_algebra() {
        let a: VertexSet = vec![5, 1, 3, 3, 9].into();
        let b: VertexSet = vec![3, 4, 9].into();
        assert_eq!(a.as_slice(), &[1, 3, 5, 9]);
        assert_eq!(a.difference(&b).as_slice(), &[1, 5]);
        assert_eq!(a.union(&b).as_slice(), &[1, 3, 4, 5, 9]);
        assert_eq!(a.intersection(&b).as_slice(), &[3, 9]);
        assert!(VertexSet::from(vec![3, 9]).is_subset(&a));
        assert!(!b.is_subset(&a));
        assert!(a.check_range(10).is_ok());
        assert!(a.check_range(9).is_err());
    }
}
