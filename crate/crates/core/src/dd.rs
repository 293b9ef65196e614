//! Double-double accumulation for blend and ensemble averaging.
//!
//! Tile blending and checkpoint ensembling both promise that a weighted mean
//! of bitwise-equal inputs returns that input bitwise. A plain f64 sum breaks
//! the promise (`(v + v + v) / 3 != v` for most `v`), so those two code paths
//! accumulate in double-double precision: every product is split into an
//! exact hi/lo pair and the running error is carried alongside the sum. When
//! the mathematically exact total fits in ~106 bits (it does whenever the
//! inputs agree and the integer weights are small), the quotient recovers the
//! common value exactly.

/// Running sum with an error-compensation term.
#[derive(Clone, Copy, Debug, Default)]
pub struct DdAcc {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    // mul_add is a correctly rounded FMA, so this residual is exact.
    let e = a.mul_add(b, -p);
    (p, e)
}

impl DdAcc {
    pub fn new() -> Self {
        DdAcc { hi: 0.0, lo: 0.0 }
    }

    /// Add `w * v` keeping the rounding residue.
    #[inline]
    pub fn add_prod(&mut self, w: f64, v: f64) {
        let (p, pe) = two_prod(w, v);
        let (s, se) = two_sum(self.hi, p);
        self.hi = s;
        self.lo += pe + se;
    }

    /// Add a plain value.
    #[inline]
    pub fn add(&mut self, v: f64) {
        let (s, se) = two_sum(self.hi, v);
        self.hi = s;
        self.lo += se;
    }

    /// Divide the accumulated total by `d` and round once to f64.
    #[inline]
    pub fn div(self, d: f64) -> f64 {
        let q0 = self.hi / d;
        // Residual of hi against q0*d is exact through the FMA.
        let r = (-q0).mul_add(d, self.hi) + self.lo;
        q0 + r / d
    }

    pub fn value(self) -> f64 {
        self.hi + self.lo
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_of_equal_values_is_exact() {
        for &v in &[0.1f64, 0.3, 1.0 / 3.0, 0.7251436781, 1e-12, 123456.789] {
            for n in 1..=9usize {
                let mut acc = DdAcc::new();
                for _ in 0..n {
                    acc.add_prod(1.0, v);
                }
                assert_eq!(acc.div(n as f64), v, "n={n} v={v}");
            }
        }
    }

    #[test]
    fn integer_weighted_consensus_is_exact() {
        let v = 0.1f64;
        let weights = [1.0, 3.0, 7.0, 16.0];
        let mut acc = DdAcc::new();
        let mut wsum = 0.0;
        for &w in &weights {
            acc.add_prod(w, v);
            wsum += w;
        }
        assert_eq!(acc.div(wsum), v);
    }

    #[test]
    fn plain_sum_matches_naive_when_exact() {
        let mut acc = DdAcc::new();
        for i in 1..=64 {
            acc.add(i as f64);
        }
        assert_eq!(acc.value(), (1..=64).sum::<i64>() as f64);
    }
}
