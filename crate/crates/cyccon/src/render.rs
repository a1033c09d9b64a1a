use cyccon_core::rational::{format_decimal, format_fraction, Rational};

/// How numbers appear in reports: rounded decimals (half-even) at a fixed
/// number of digits, or exact fraction strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Render {
    Decimal(usize),
    Exact,
}

impl Render {
    pub fn num(&self, value: &Rational) -> String {
        match self {
            Render::Decimal(digits) => format_decimal(value, *digits),
            Render::Exact => format_fraction(value),
        }
    }

    pub fn all(&self, values: &[Rational]) -> Vec<String> {
        values.iter().map(|v| self.num(v)).collect()
    }

    /// Floating statistics (t values) are always decimal; exact mode widens
    /// them to six digits instead of switching to fractions.
    pub fn float(&self, value: f64) -> String {
        match self {
            Render::Decimal(digits) => format!("{value:.prec$}", prec = *digits),
            Render::Exact => format!("{value:.6}"),
        }
    }
}
