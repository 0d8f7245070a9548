//! Decimal formatting for persisted reals.
//!
//! Every real written to a trace, summary or report uses 17 significant
//! digits in scientific notation, which round-trips any `f64` exactly.

use std::io;

use serde::Serialize;

/// `v` with 17 significant digits, e.g. `1.0000000000000001e-1`.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// JSON formatter that writes every `f64` through [`format_real`].
#[derive(Debug, Default, Clone, Copy)]
pub struct ExactFloatFormatter;

impl serde_json::ser::Formatter for ExactFloatFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        writer.write_all(format_real(value).as_bytes())
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.write_f64(writer, value as f64)
    }
}

/// Compact single-line JSON with exact reals.
pub fn to_json_line<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ExactFloatFormatter);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(format_real(0.1), "1.0000000000000001e-1");
        assert_eq!(format_real(3.0), "3.0000000000000000e0");
        assert_eq!(format_real(-2.5e-300), "-2.5000000000000000e-300");
    }

    proptest! {
        #[test]
        fn json_reals_round_trip(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let line = to_json_line(&serde_json::json!({ "x": v })).unwrap();
            let back: serde_json::Value = serde_json::from_str(&line).unwrap();
            prop_assert_eq!(back["x"].as_f64().unwrap().to_bits(), v.to_bits());
        }
    }
}
