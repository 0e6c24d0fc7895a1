use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    /// `(-1)^e`.
    pub fn from_parity(e: u64) -> Sign {
        if e % 2 == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn from_i64(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn to_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn pow(self, e: u64) -> Sign {
        match self {
            Sign::Plus => Sign::Plus,
            Sign::Minus => Sign::from_parity(e),
        }
    }

    pub fn negate(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl std::iter::Product for Sign {
    fn product<I: Iterator<Item = Sign>>(iter: I) -> Sign {
        iter.fold(Sign::Plus, |a, b| a * b)
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// Sign of a permutation given as an image table, by cycle decomposition.
///
/// Panics if `perm` is not a bijection of `0..perm.len()`.
pub fn permutation_sign(perm: &[u32]) -> Sign {
    let mut seen = vec![false; perm.len()];
    let mut transpositions = 0u64;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0u64;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i] as usize;
            len += 1;
        }
        assert_eq!(i, start, "image table is not a permutation");
        transpositions += len - 1;
    }
    Sign::from_parity(transpositions)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_of_small_permutations() {
        assert_eq!(permutation_sign(&[]), Sign::Plus);
        assert_eq!(permutation_sign(&[0, 1, 2]), Sign::Plus);
        assert_eq!(permutation_sign(&[1, 0, 2]), Sign::Minus);
        assert_eq!(permutation_sign(&[1, 2, 0]), Sign::Plus);
        assert_eq!(permutation_sign(&[1, 2, 3, 0]), Sign::Minus);
    }

    #[test]
    fn inversion_count_agrees() {
        // every permutation of 5 points
        let mut perm: Vec<u32> = (0..5).collect();
        let mut count = 0;
        permute(&mut perm, 0, &mut |p| {
            let inversions = (0..p.len())
                .flat_map(|i| (i + 1..p.len()).map(move |j| (i, j)))
                .filter(|&(i, j)| p[i] > p[j])
                .count() as u64;
            assert_eq!(permutation_sign(p), Sign::from_parity(inversions));
            count += 1;
        });
        assert_eq!(count, 120);
    }

    fn permute(p: &mut Vec<u32>, k: usize, f: &mut impl FnMut(&[u32])) {
        if k == p.len() {
            f(p);
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            permute(p, k + 1, f);
            p.swap(k, i);
        }
    }

    #[test]
    #[should_panic]
    fn rejects_non_bijection() {
        permutation_sign(&[0, 0]);
    }
}
