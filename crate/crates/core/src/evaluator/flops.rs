//! Arithmetic-operation counting.
//!
//! Counts are in real operations. A complex addition is 2 additions, a complex
//! product 4 multiplications and 2 additions, a complex-by-real product 2
//! multiplications, and a complex division 8 multiplications and 3 additions
//! (reciprocal of the squared modulus included).

use std::ops::AddAssign;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FlopCounter {
    pub additions: u64,
    pub multiplications: u64,
    pub special_calls: u64,
}

impl FlopCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn total(&self) -> u64 {
        self.additions + self.multiplications
    }

    pub fn cadd(&mut self, times: u64) {
        self.additions += 2 * times;
    }

    pub fn cmul(&mut self, times: u64) {
        self.multiplications += 4 * times;
        self.additions += 2 * times;
    }

    pub fn cmul_real(&mut self, times: u64) {
        self.multiplications += 2 * times;
    }

    pub fn cdiv(&mut self, times: u64) {
        self.multiplications += 8 * times;
        self.additions += 3 * times;
    }

    pub fn rmul(&mut self, times: u64) {
        self.multiplications += times;
    }

    pub fn radd(&mut self, times: u64) {
        self.additions += times;
    }

    pub fn special(&mut self, times: u64) {
        self.special_calls += times;
    }
}

impl AddAssign for FlopCounter {
    fn add_assign(&mut self, o: FlopCounter) {
        self.additions += o.additions;
        self.multiplications += o.multiplications;
        self.special_calls += o.special_calls;
    }
}
