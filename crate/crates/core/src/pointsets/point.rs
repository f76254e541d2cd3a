use serde::{Deserialize, Serialize};

/// A point of `[0,1)^d` stored exactly as `numerators / denominator`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RationalPoint {
    pub numerators: Vec<u64>,
    pub denominator: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl RationalPoint {
    pub fn new(numerators: Vec<u64>, denominator: u64) -> Self {
        debug_assert!(denominator > 0);
        debug_assert!(numerators.iter().all(|&n| n < denominator));
        RationalPoint { numerators, denominator }
    }

    pub fn dim(&self) -> usize {
        self.numerators.len()
    }

    pub fn is_origin(&self) -> bool {
        self.numerators.iter().all(|&n| n == 0)
    }

    /// Lowest-terms coordinates; two points are equal iff their keys are equal.
    pub fn key(&self) -> Vec<(u64, u64)> {
        self.numerators
            .iter()
            .map(|&n| {
                let g = gcd(n, self.denominator);
                (n / g, self.denominator / g)
            })
            .collect()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.numerators
            .iter()
            .map(|&n| n as f64 / self.denominator as f64)
            .collect()
    }
}

impl PartialEq for RationalPoint {
    fn eq(&self, other: &Self) -> bool {
        self.dim() == other.dim()
            && self
                .numerators
                .iter()
                .zip(&other.numerators)
                .all(|(&x, &y)| x as u128 * other.denominator as u128 == y as u128 * self.denominator as u128)
    }
}

impl Eq for RationalPoint {}

impl std::hash::Hash for RationalPoint {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.key().hash(state);
    }
}
