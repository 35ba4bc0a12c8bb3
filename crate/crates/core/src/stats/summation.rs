//! Compensated summation.

/// Kahan–Babuška (Neumaier) running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = KahanSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

pub fn sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().collect::<KahanSum>().value()
}

/// `None` for an empty slice.
pub fn mean(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        None
    } else {
        Some(sum(xs.iter().copied()) / xs.len() as f64)
    }
}

/// Sample variance (n − 1 denominator), two-pass. 0 for fewer than 2 values.
pub fn sample_variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs).unwrap_or(0.0);
    sum(xs.iter().map(|x| (x - m) * (x - m))) / (xs.len() - 1) as f64
}
