use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Mul;

use crate::error::{Error, Result};

/// Largest supported domain; points are stored as bytes.
pub const MAX_DEGREE: usize = 256;

/// A bijection of `{0, .., m-1}` stored as its image array.
///
/// Products compose as functions: `(a * b)(i) = a(b(i))`, so `b` acts first.
/// The derived ordering is lexicographic on image arrays, which is the total
/// order used for canonical coset representatives.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    images: Vec<u8>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        assert!(degree <= MAX_DEGREE, "degree {degree} exceeds {MAX_DEGREE}");
        Self {
            images: (0..degree).map(|i| i as u8).collect(),
        }
    }

    pub fn from_images(images: &[usize]) -> Result<Self> {
        let m = images.len();
        if m > MAX_DEGREE {
            return Err(Error::MalformedPermutation(format!(
                "degree {m} exceeds {MAX_DEGREE}"
            )));
        }
        let mut seen = alloc::vec![false; m];
        for &p in images {
            if p >= m {
                return Err(Error::MalformedPermutation(format!(
                    "image {p} out of range for degree {m}"
                )));
            }
            if core::mem::replace(&mut seen[p], true) {
                return Err(Error::MalformedPermutation(format!("image {p} repeated")));
            }
        }
        Ok(Self {
            images: images.iter().map(|&p| p as u8).collect(),
        })
    }

    /// Builds a permutation from disjoint cycles.
    pub fn from_cycles(degree: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..degree).collect();
        for cycle in cycles {
            for (i, &p) in cycle.iter().enumerate() {
                let q = cycle[(i + 1) % cycle.len()];
                if p >= degree || q >= degree {
                    return Err(Error::MalformedPermutation(format!(
                        "cycle point out of range for degree {degree}"
                    )));
                }
                images[p] = q;
            }
        }
        Self::from_images(&images)
    }

    pub fn transposition(degree: usize, a: usize, b: usize) -> Self {
        let mut p = Self::identity(degree);
        p.images.swap(a, b);
        p
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, point: usize) -> usize {
        self.images[point] as usize
    }

    pub fn images(&self) -> impl Iterator<Item = usize> + '_ {
        self.images.iter().map(|&p| p as usize)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.images().collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &p)| i == p as usize)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = alloc::vec![0u8; self.degree()];
        for (i, &p) in self.images.iter().enumerate() {
            inv[p as usize] = i as u8;
        }
        Self { images: inv }
    }

    /// `self * other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        debug_assert_eq!(self.degree(), other.degree());
        Self {
            images: other.images.iter().map(|&p| self.images[p as usize]).collect(),
        }
    }

    /// `self * other * self^-1`.
    pub fn conjugate(&self, other: &Self) -> Self {
        self.compose(other).compose(&self.inverse())
    }

    /// Embeds into a larger domain, acting on `offset..offset+degree` and fixing the rest.
    pub fn shifted(&self, offset: usize, degree: usize) -> Self {
        let mut p = Self::identity(degree);
        for (i, &q) in self.images.iter().enumerate() {
            p.images[offset + i] = (offset + q as usize) as u8;
        }
        p
    }
}

impl Mul for &Permutation {
    type Output = Permutation;

    fn mul(self, rhs: &Permutation) -> Permutation {
        self.compose(rhs)
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.images)
    }
}

impl fmt::Display for Permutation {
    /// Cycle notation, `()` for the identity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = alloc::vec![false; self.degree()];
        let mut any = false;
        for start in 0..self.degree() {
            if seen[start] || self.apply(start) == start {
                continue;
            }
            any = true;
            write!(f, "(")?;
            let mut p = start;
            let mut first = true;
            while !seen[p] {
                seen[p] = true;
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{p}")?;
                first = false;
                p = self.apply(p);
            }
            write!(f, ")")?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::from_images(&[0, 0, 1]).is_err());
        assert!(Permutation::from_images(&[0, 3, 1]).is_err());
        assert!(Permutation::from_images(&[2, 0, 1]).is_ok());
    }

    #[test]
    fn composition_applies_right_factor_first() {
        let a = Permutation::from_cycles(3, &[&[0, 1]]).unwrap();
        let b = Permutation::from_cycles(3, &[&[1, 2]]).unwrap();
        let ab = &a * &b;
        // b sends 1 -> 2, a fixes 2
        assert_eq!(ab.apply(1), 2);
        assert_eq!(ab.apply(2), 0);
        assert!((&ab * &ab.inverse()).is_identity());
    }

    #[test]
    fn cycle_display() {
        let p = Permutation::from_cycles(5, &[&[0, 2, 4]]).unwrap();
        assert_eq!(p.to_string(), "(0 2 4)");
        assert_eq!(Permutation::identity(3).to_string(), "()");
    }

    #[test]
    fn shifted_acts_on_block() {
        let p = Permutation::transposition(2, 0, 1).shifted(2, 4);
        assert_eq!(p.to_vec(), [0, 1, 3, 2]);
    }
}
