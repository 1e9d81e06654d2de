//! Half-integer theta characteristics `(eps1, eps2) in {0, 1/2}^g x {0, 1/2}^g`,
//! stored as bit masks: bit `i` of `a` set means `eps1_i = 1/2`.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Characteristic {
    pub g: usize,
    pub a: u32,
    pub b: u32,
}

impl Characteristic {
    pub fn new(g: usize, a: u32, b: u32) -> Characteristic {
        assert!(g < 32 && a >> g == 0 && b >> g == 0, "characteristic out of range");
        Characteristic { g, a, b }
    }

    pub fn zero(g: usize) -> Characteristic {
        Characteristic::new(g, 0, 0)
    }

    /// `4 eps1 . eps2 mod 2`.
    pub fn parity(&self) -> u32 {
        (self.a & self.b).count_ones() % 2
    }

    pub fn is_even(&self) -> bool {
        self.parity() == 0
    }

    pub fn eps1(&self) -> Vec<f64> {
        (0..self.g).map(|i| 0.5 * (self.a >> i & 1) as f64).collect()
    }

    pub fn eps2(&self) -> Vec<f64> {
        (0..self.g).map(|i| 0.5 * (self.b >> i & 1) as f64).collect()
    }

    /// Restriction to the coordinates `range` (used for block-diagonal factorisation).
    pub fn restrict(&self, start: usize, len: usize) -> Characteristic {
        let mask = (1u32 << len) - 1;
        Characteristic::new(len, self.a >> start & mask, self.b >> start & mask)
    }
}

impl fmt::Display for Characteristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bits = |m: u32| (0..self.g).map(|i| if m >> i & 1 == 1 { '1' } else { '0' }).collect::<String>();
        write!(f, "[{}/{}]", bits(self.a), bits(self.b))
    }
}

/// All even characteristics of genus `g`, ordered by `(a, b)`.
pub fn even_characteristics(g: usize) -> Vec<Characteristic> {
    let n = 1u32 << g;
    (0..n)
        .flat_map(|a| (0..n).map(move |b| Characteristic::new(g, a, b)))
        .filter(Characteristic::is_even)
        .collect()
}

/// `2^(g-1) (2^g + 1)`.
pub fn even_characteristic_count(g: usize) -> usize {
    (1usize << (g - 1)) * ((1usize << g) + 1)
}
