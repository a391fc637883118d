//! Deterministic text output: JSON and CSV with floats printed to 17
//! significant digits.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};

/// Formats like C's `%.17g`: fixed notation for exponents in -4..17,
/// scientific otherwise, trailing zeros removed.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.into();
    }
    let sci = format!("{:.16e}", x.abs());
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let body = if (-4..17).contains(&exp) {
        let point = exp + 1;
        let fixed = if point <= 0 {
            format!("0.{}{}", "0".repeat((-point) as usize), digits)
        } else {
            let p = point as usize;
            format!("{}.{}", &digits[..p], &digits[p..])
        };
        trim_fraction(&fixed).to_string()
    } else {
        let m = format!("{}.{}", &digits[..1], &digits[1..]);
        format!("{}e{}{:02}", trim_fraction(&m), if exp < 0 { '-' } else { '+' }, exp.abs())
    };
    if x < 0.0 {
        format!("-{body}")
    } else {
        body
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Prints `exp(log_value)` without underflow: values below the f64 range
/// are written as a decimal mantissa and exponent derived from the log.
pub fn fmt_from_log(log_value: f64) -> String {
    if log_value == f64::NEG_INFINITY {
        return "0".into();
    }
    let direct = log_value.exp();
    if direct.is_normal() {
        return fmt_g17(direct);
    }
    let l10 = log_value / std::f64::consts::LN_10;
    let exp = l10.floor();
    let mantissa = 10f64.powf(l10 - exp);
    // rounding can push the mantissa to 10
    let (mantissa, exp) = if mantissa >= 10.0 { (mantissa / 10.0, exp + 1.0) } else { (mantissa, exp) };
    format!("{}e{}", fmt_g17(mantissa), exp as i64)
}

struct G17;

impl Formatter for G17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_g17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Compact JSON with a trailing newline. Non-finite floats become `null`.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = Serializer::with_formatter(&mut buf, G17);
    value.serialize(&mut ser).expect("report types serialize");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON output is UTF-8")
}

/// CSV text from a header and rows of preformatted fields.
pub fn to_csv(header: &[String], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV output is UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_matches_printf() {
        assert_eq!(fmt_g17(std::f64::consts::TAU), "6.2831853071795862");
        assert_eq!(fmt_g17(1.0), "1");
        assert_eq!(fmt_g17(-2.5), "-2.5");
        assert_eq!(fmt_g17(0.1), "0.10000000000000001");
        assert_eq!(fmt_g17(1e-5), "1.0000000000000001e-05");
        assert_eq!(fmt_g17(1.5e-4), "0.00014999999999999999");
        assert_eq!(fmt_g17(1e17), "1e+17");
        assert_eq!(fmt_g17(123456.0), "123456");
        assert_eq!(fmt_g17(0.0), "0");
    }

    #[test]
    fn round_trips_through_parse() {
        for x in [std::f64::consts::PI, 1e-300, 2.0f64.sqrt() * 1e200, -7.25e-9] {
            assert_eq!(fmt_g17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn json_floats_and_nulls() {
        #[derive(Serialize)]
        struct S {
            a: f64,
            b: Vec<f64>,
            c: f64,
        }
        let s = to_json(&S { a: 0.5, b: vec![1.0, 1.0 / 3.0], c: f64::NEG_INFINITY });
        assert_eq!(s, "{\"a\":0.5,\"b\":[1,0.33333333333333331],\"c\":null}\n");
    }

    #[test]
    fn log_space_values() {
        assert_eq!(fmt_from_log(f64::NEG_INFINITY), "0");
        assert_eq!(fmt_from_log(0.0), "1");
        let tiny = fmt_from_log(-2000.0);
        assert!(tiny.ends_with("e-869"), "{tiny}");
        assert!(tiny.starts_with("2.57"), "{tiny}");
    }

    #[test]
    fn csv_layout() {
        let out = to_csv(&["a".into(), "b".into()], &[vec!["1".into(), "x".into()]]);
        assert_eq!(out, "a,b\n1,x\n");
    }
}
