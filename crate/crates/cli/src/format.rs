//! Text rendering: six significant digits, one fact per line.

use std::fmt::Write;

use matgauge::CheckReport;

/// `x` rounded to six significant digits.
pub fn sig6(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&mag) {
        let s = format!("{x:.5e}");
        let (mantissa, exp) = s.split_once('e').expect("exponent form");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        return format!("{mantissa}e{exp}");
    }
    let decimals = (5 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn report(r: &CheckReport) -> String {
    let mut out = String::new();
    let verdict = if r.is_clean() { "clean" } else { "VIOLATED" };
    let _ = writeln!(out, "law: {}", r.law_name);
    let _ = writeln!(out, "verdict: {verdict}");
    let _ = writeln!(out, "trials: {}  skipped: {}", r.trials, r.skipped);
    let _ = writeln!(out, "tolerance: {}  max slack: {}", sig6(r.tolerance), sig6(r.max_slack));
    if r.violation_count > 0 {
        let _ = writeln!(out, "violations: {}", r.violation_count);
        for v in r.violations.iter().take(5) {
            let _ = writeln!(out, "  seed {:#018x}  slack {}  {}", v.seed, sig6(v.slack), v.witness);
        }
    }
    for note in &r.notes {
        let _ = writeln!(out, "note: {note}");
    }
    for (k, v) in &r.metrics {
        let _ = writeln!(out, "{k}: {}", sig6(*v));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(4.0 / 3.0), "1.33333");
        assert_eq!(sig6(2.0), "2");
        assert_eq!(sig6(-0.125), "-0.125");
        assert_eq!(sig6(123456.7), "123457");
        assert_eq!(sig6(1234567.0), "1.23457e6");
        assert_eq!(sig6(1e-7), "1e-7");
        assert_eq!(sig6(-2.5e-9), "-2.5e-9");
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(f64::INFINITY), "inf");
        assert_eq!(sig6(12.3456789), "12.3457");
    }
}
