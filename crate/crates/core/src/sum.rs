//! Neumaier compensated summation at an arbitrary binary working precision.

use astro_float::{BigFloat, RoundingMode};

const RM: RoundingMode = RoundingMode::ToEven;

/// Running sum `s + c` where `c` collects the rounding error of every addition.
///
/// With round-to-nearest the error term of each `Fast2Sum` step is exact, so the
/// final `s + c` carries an error of at most `2u * sum |x_i|` plus second-order
/// terms, independent of the number of summands to first order.
#[derive(Debug, Clone)]
pub struct NeumaierSum {
    s: BigFloat,
    c: BigFloat,
    p: usize,
}

impl NeumaierSum {
    pub fn new(p: usize) -> Self {
        NeumaierSum {
            s: BigFloat::from_u8(0, p),
            c: BigFloat::from_u8(0, p),
            p,
        }
    }

    pub fn add(&mut self, x: &BigFloat) {
        let p = self.p;
        let t = self.s.add(x, p, RM);
        let err = if self.s.abs_cmp(x).is_some_and(|o| o >= 0) {
            self.s.sub(&t, p, RM).add(x, p, RM)
        } else {
            x.sub(&t, p, RM).add(&self.s, p, RM)
        };
        self.c = self.c.add(&err, p, RM);
        self.s = t;
    }

    pub fn total(&self) -> BigFloat {
        self.s.add(&self.c, self.p, RM)
    }
}
