//! Number formatting and the growth-series CSV.

use std::io::{self, Write};

use qshadow_core::invariants::GrowthSeries;

pub const CSV_HEADER: &str = "r,log_value,growth,target,abs_error";

/// `%.15g`: 15 significant digits, fixed or scientific by exponent, trailing
/// zeros removed.
pub fn g15(x: f64) -> String {
    const DIGITS: i32 = 15;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if exp < -4 || exp >= DIGITS {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes the comment line, header and one row per `r`. Vanishing values get
/// a comment line instead of a row.
pub fn write_series<W: Write>(mut w: W, comment: &str, series: &GrowthSeries) -> io::Result<()> {
    writeln!(w, "# {comment}")?;
    writeln!(w, "{CSV_HEADER}")?;
    for z in &series.zeros {
        writeln!(w, "# r={z}: value is exactly zero, growth undefined")?;
    }
    for rec in &series.records {
        writeln!(
            w,
            "{},{},{},{},{}",
            rec.r,
            g15(rec.log_value),
            g15(rec.growth),
            g15(rec.target),
            g15(rec.abs_error)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g15_matches_printf() {
        assert_eq!(g15(0.0), "0");
        assert_eq!(g15(1.0), "1");
        assert_eq!(g15(-2.5), "-2.5");
        assert_eq!(g15(14.655449506835505), "14.6554495068355");
        assert_eq!(g15(3.663862376708876), "3.66386237670888");
        assert_eq!(g15(1e-5), "1e-05");
        assert_eq!(g15(0.0001234), "0.0001234");
        assert_eq!(g15(1234567.0), "1234567");
        assert_eq!(g15(1e15), "1e+15");
        assert_eq!(g15(123456789012345.0), "123456789012345");
        assert_eq!(g15(9.999999999999999e14), "1e+15");
        assert_eq!(g15(f64::NEG_INFINITY), "-inf");
    }
}
