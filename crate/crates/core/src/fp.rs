//! Arithmetic in the prime field F_p for a small runtime prime.

/// Copyable F_p context. Values are canonical representatives in 0..p.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Fp(pub u32);

impl Fp {
    pub fn p(self) -> u32 {
        self.0
    }

    pub fn reduce_i64(self, x: i64) -> u32 {
        let p = self.0 as i64;
        (((x % p) + p) % p) as u32
    }

    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }

    pub fn pow(self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1u32;
        base %= self.0;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Inverse of a nonzero element (p is prime, so a^(p-2) works).
    pub fn inv(self, a: u32) -> u32 {
        assert!(!a.is_multiple_of(self.0), "division by zero in F_{}", self.0);
        self.pow(a, self.0 as u64 - 2)
    }
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_ops() {
        let f = Fp(7);
        assert_eq!(f.add(5, 4), 2);
        assert_eq!(f.sub(2, 5), 4);
        assert_eq!(f.mul(3, 5), 1);
        assert_eq!(f.inv(3), 5);
        assert_eq!(f.pow(3, 6), 1);
    }

    #[test]
    fn primality() {
        assert!(is_prime(2));
        assert!(is_prime(13));
        assert!(!is_prime(1));
        assert!(!is_prime(9));
    }
}
