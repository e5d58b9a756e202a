//! The bigrading (weight)[degree] used throughout: weight is the Tate twist,
//! degree the simplicial shift, and 2*weight - degree the Chow level.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BiDegree {
    pub weight: i64,
    pub degree: i64,
}

impl BiDegree {
    pub const ZERO: BiDegree = BiDegree {
        weight: 0,
        degree: 0,
    };

    pub fn new(weight: i64, degree: i64) -> Self {
        Self { weight, degree }
    }

    /// 2*weight - degree; additive under bidegree addition.
    pub fn chow_level(self) -> i64 {
        2 * self.weight - self.degree
    }

    /// On the line of slope two: degree = 2*weight.
    pub fn is_slope_two(self) -> bool {
        self.degree == 2 * self.weight
    }
}

impl Add for BiDegree {
    type Output = BiDegree;
    fn add(self, rhs: BiDegree) -> BiDegree {
        BiDegree::new(self.weight + rhs.weight, self.degree + rhs.degree)
    }
}

impl Sub for BiDegree {
    type Output = BiDegree;
    fn sub(self, rhs: BiDegree) -> BiDegree {
        BiDegree::new(self.weight - rhs.weight, self.degree - rhs.degree)
    }
}

impl Sum for BiDegree {
    fn sum<I: Iterator<Item = BiDegree>>(iter: I) -> BiDegree {
        iter.fold(BiDegree::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for BiDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})[{}]", self.weight, self.degree)
    }
}

impl fmt::Debug for BiDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chow_level_is_additive() {
        let a = BiDegree::new(3, 4);
        let b = BiDegree::new(-1, 7);
        assert_eq!((a + b).chow_level(), a.chow_level() + b.chow_level());
    }

    #[test]
    fn slope_two() {
        assert!(BiDegree::new(4, 8).is_slope_two());
        assert!(!BiDegree::new(4, 7).is_slope_two());
    }
}
