//! Small numeric helpers shared across modules.

/// Compensated (Kahan) accumulator: keeps the running rounding error in a
/// correction term so that long sums of same-scale terms lose O(ε) instead
/// of O(N·ε) accuracy.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct KahanSum {
    s: f64,
    c: f64,
}

impl KahanSum {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub(crate) fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.s + y;
        self.c = (t - self.s) - y;
        self.s = t;
    }

    #[inline]
    pub(crate) fn value(&self) -> f64 {
        self.s
    }
}
