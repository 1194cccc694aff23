//! Scalar fields F2, F3 and F4.
//!
//! Every field used by the reductions is tiny, so elements are stored as a
//! label byte and arithmetic goes through lookup tables. F3 doubles as the
//! exponent ring Z3 of the F4 arithmetic problem.

use std::fmt::{self, Debug, Display};
use std::hash::Hash;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

/// A finite field small enough to enumerate.
///
/// `elements()` lists the field in canonical residue order: `0`, `1`, then
/// the remaining elements. Matrix enumeration orders and the choice of the
/// split scalar in [`crate::matrix::invertible_sum`] depend on this order.
pub trait FiniteField:
    Copy
    + Eq
    + Ord
    + Hash
    + Debug
    + Display
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const ORDER: usize;
    const CHARACTERISTIC: usize;

    fn elements() -> &'static [Self];

    /// Position of `self` in [`FiniteField::elements`].
    fn index(self) -> usize;

    fn from_index(index: usize) -> Self {
        Self::elements()[index]
    }

    fn inv(self) -> Option<Self>;

    /// Text symbol used by the instance formats.
    fn symbol(self) -> &'static str;

    fn parse_symbol(text: &str) -> Option<Self> {
        Self::elements().iter().copied().find(|e| e.symbol() == text)
    }

    /// `self` added to itself `k` times.
    fn times(self, k: usize) -> Self {
        let mut acc = Self::zero();
        for _ in 0..(k % Self::CHARACTERISTIC) {
            acc = acc + self;
        }
        acc
    }
}

macro_rules! prime_field {
    ($name:ident, $p:expr, $elems:expr, $symbols:expr, $inv:expr) => {
        #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
        pub struct $name(u8);

        impl $name {
            pub const fn new(value: u8) -> Self {
                $name(value % $p)
            }

            pub const fn value(self) -> u8 {
                self.0
            }
        }

        impl Add for $name {
            type Output = Self;
            fn add(self, rhs: Self) -> Self {
                $name((self.0 + rhs.0) % $p)
            }
        }

        impl Sub for $name {
            type Output = Self;
            fn sub(self, rhs: Self) -> Self {
                $name((self.0 + $p - rhs.0) % $p)
            }
        }

        impl Mul for $name {
            type Output = Self;
            fn mul(self, rhs: Self) -> Self {
                $name((self.0 * rhs.0) % $p)
            }
        }

        impl Neg for $name {
            type Output = Self;
            fn neg(self) -> Self {
                $name(($p - self.0) % $p)
            }
        }

        impl Zero for $name {
            fn zero() -> Self {
                $name(0)
            }
            fn is_zero(&self) -> bool {
                self.0 == 0
            }
        }

        impl One for $name {
            fn one() -> Self {
                $name(1)
            }
        }

        impl FiniteField for $name {
            const ORDER: usize = $p;
            const CHARACTERISTIC: usize = $p;

            fn elements() -> &'static [Self] {
                &$elems
            }

            fn index(self) -> usize {
                self.0 as usize
            }

            fn inv(self) -> Option<Self> {
                let table: [u8; $p] = $inv;
                match self.0 {
                    0 => None,
                    v => Some($name(table[v as usize])),
                }
            }

            fn symbol(self) -> &'static str {
                let symbols: [&'static str; $p] = $symbols;
                symbols[self.0 as usize]
            }
        }

        impl Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }

        impl Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.symbol())
            }
        }
    };
}

prime_field!(F2, 2, [F2(0), F2(1)], ["0", "1"], [0, 1]);
prime_field!(F3, 3, [F3(0), F3(1), F3(2)], ["0", "1", "2"], [0, 1, 2]);

/// The exponent ring of the F4 arithmetic problem.
pub type Z3 = F3;

/// The four-element field `{0, 1, α, α²}` with `α² = α + 1`.
///
/// Labels: 0 → 0, 1 → 1, 2 → α, 3 → α². The field is kept symbolic; the
/// embedding into 2×2 matrices over F2 is [`F4::to_matrix`], which sends α
/// to `(0 1; 1 1)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct F4(u8);

const F4_ADD: [[u8; 4]; 4] = [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]];

impl F4 {
    pub const ZERO: F4 = F4(0);
    pub const ONE: F4 = F4(1);
    pub const ALPHA: F4 = F4(2);
    pub const ALPHA2: F4 = F4(3);

    /// Discrete logarithm base α, `None` for zero.
    pub fn log_alpha(self) -> Option<u8> {
        match self.0 {
            0 => None,
            1 => Some(0),
            2 => Some(1),
            _ => Some(2),
        }
    }

    /// `α^t`; the exponent lives in Z3 because α³ = 1.
    pub fn alpha_pow(t: Z3) -> F4 {
        match t.value() {
            0 => F4::ONE,
            1 => F4::ALPHA,
            _ => F4::ALPHA2,
        }
    }

    pub fn square(self) -> F4 {
        self * self
    }

    /// Image under the embedding F4 → Mat2(F2), α ↦ (0 1; 1 1).
    pub fn to_matrix(self) -> crate::matrix::Matrix<F2> {
        use crate::matrix::Matrix;
        let rows: [[u8; 2]; 2] = match self.0 {
            0 => [[0, 0], [0, 0]],
            1 => [[1, 0], [0, 1]],
            2 => [[0, 1], [1, 1]],
            _ => [[1, 1], [1, 0]],
        };
        Matrix::from_rows(&[
            vec![F2::new(rows[0][0]), F2::new(rows[0][1])],
            vec![F2::new(rows[1][0]), F2::new(rows[1][1])],
        ])
        .expect("2x2 literal")
    }

    /// Inverse of [`F4::to_matrix`] on its image.
    pub fn from_matrix(m: &crate::matrix::Matrix<F2>) -> Option<F4> {
        F4::elements().iter().copied().find(|e| e.to_matrix() == *m)
    }
}

impl Add for F4 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        F4(F4_ADD[self.0 as usize][rhs.0 as usize])
    }
}

impl Sub for F4 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + rhs
    }
}

impl Neg for F4 {
    type Output = Self;
    fn neg(self) -> Self {
        self
    }
}

impl Mul for F4 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        match (self.log_alpha(), rhs.log_alpha()) {
            (Some(a), Some(b)) => F4::alpha_pow(Z3::new(a + b)),
            _ => F4::ZERO,
        }
    }
}

impl Zero for F4 {
    fn zero() -> Self {
        F4::ZERO
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl One for F4 {
    fn one() -> Self {
        F4::ONE
    }
}

impl FiniteField for F4 {
    const ORDER: usize = 4;
    const CHARACTERISTIC: usize = 2;

    fn elements() -> &'static [Self] {
        &[F4(0), F4(1), F4(2), F4(3)]
    }

    fn index(self) -> usize {
        self.0 as usize
    }

    fn inv(self) -> Option<Self> {
        self.log_alpha().map(|l| F4::alpha_pow(Z3::new(3 - l)))
    }

    fn symbol(self) -> &'static str {
        ["0", "1", "a", "a2"][self.0 as usize]
    }
}

impl Debug for F4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl Display for F4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}
