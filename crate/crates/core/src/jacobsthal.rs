//! Jacobsthal numbers `J_0 = 0, J_1 = 1, J_{m+2} = J_{m+1} + 2 J_m` in exact arithmetic.

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Cached prefix `J_0..=J_m` of the sequence.
#[derive(Clone, Debug)]
pub struct JacobsthalTable {
    values: Vec<BigInt>,
}

impl JacobsthalTable {
    pub fn new(max: usize) -> Self {
        let mut values = Vec::with_capacity(max + 1);
        values.push(BigInt::zero());
        if max >= 1 {
            values.push(BigInt::one());
        }
        while values.len() <= max {
            let k = values.len();
            let next = &values[k - 1] + (&values[k - 2] << 1);
            values.push(next);
        }
        JacobsthalTable { values }
    }

    pub fn max_index(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, m: usize) -> &BigInt {
        &self.values[m]
    }

    pub fn values(&self) -> &[BigInt] {
        &self.values
    }
}

pub fn jacobsthal(m: usize) -> BigInt {
    let (mut a, mut b) = (BigInt::zero(), BigInt::one());
    for _ in 0..m {
        let next = &b + (&a << 1);
        a = std::mem::replace(&mut b, next);
    }
    a
}

fn signed_unit(m: usize) -> BigInt {
    if m.is_multiple_of(2) {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

/// Partial-sum identity in the form the square-cycle count telescopes through:
///
/// `sum_{i=1}^{m-1} J_i + [m odd] = (J_{m+1} - (-1)^m) / 2`.
///
/// The right side equals `J_m`, so for even `m` this is the plain partial sum
/// and for odd `m` the single-vertex strip contributes the extra `1`.
pub fn partial_sum_identity_check(m: usize) -> bool {
    if m < 2 {
        return false;
    }
    let t = JacobsthalTable::new(m + 1);
    let lhs: BigInt = t.values()[1..m].iter().sum::<BigInt>() + BigInt::from(m % 2);
    let twice_rhs = t.get(m + 1) - signed_unit(m);
    lhs * 2 == twice_rhs
}

/// The partial-sum identity with the summation range read literally,
/// `sum_{i=1}^{m-1} J_i = (J_{m+1} - (-1)^m) / 2`. Holds exactly for even `m`.
pub fn partial_sum_literal_check(m: usize) -> bool {
    if m < 2 {
        return false;
    }
    let t = JacobsthalTable::new(m + 1);
    let lhs: BigInt = t.values()[1..m].iter().sum();
    lhs * 2 == t.get(m + 1) - signed_unit(m)
}

/// `3 J_m = 2^m - (-1)^m`.
pub fn closed_form_check(m: usize) -> bool {
    let lhs = jacobsthal(m) * 3;
    let rhs = (BigInt::one() << m) - signed_unit(m);
    lhs == rhs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(jacobsthal(0), BigInt::from(0));
        assert_eq!(jacobsthal(1), BigInt::from(1));
        assert_eq!(jacobsthal(5), BigInt::from(11));
        let t = JacobsthalTable::new(12);
        let first: Vec<i64> = t.values().iter().map(|v| v.try_into().unwrap()).collect();
        assert_eq!(first, [0, 1, 1, 3, 5, 11, 21, 43, 85, 171, 341, 683, 1365]);
        assert_eq!(JacobsthalTable::new(0).values().len(), 1);
    }

    #[test]
    fn table_matches_function_and_recurrence() {
        let t = JacobsthalTable::new(300);
        for m in 0..=300 {
            assert_eq!(t.get(m), &jacobsthal(m));
        }
        for w in t.values().windows(3) {
            assert_eq!(&w[2], &(&w[1] + &w[0] * 2));
        }
        // Strictly increasing from index 2 on; J_1 = J_2 = 1.
        assert!(t.values()[2..].windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn closed_form_and_parity() {
        for m in 0..=256 {
            assert!(closed_form_check(m), "m = {m}");
            if m >= 1 {
                assert!(jacobsthal(m).bit(0), "J_{m} should be odd");
            }
        }
    }

    #[test]
    fn partial_sum_forms() {
        for m in 2..=64 {
            assert!(partial_sum_identity_check(m), "m = {m}");
            assert_eq!(partial_sum_literal_check(m), m % 2 == 0, "m = {m}");
        }
        assert!(!partial_sum_identity_check(1));
    }

    #[test]
    fn beyond_machine_words() {
        let j = jacobsthal(200);
        assert_eq!(j * 3, (BigInt::one() << 200u32) - 1);
    }
}
