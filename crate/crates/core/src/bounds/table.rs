use std::io::{self, Write};

use super::{rate_bound_b2, rate_bound_reference, rate_bound_sep2, BoundsError, ReferenceBound};

pub const CSV_HEADER: &str = "q,rate_sep2,rate_b2,ref_sep_general_t2,ref_dyachkov_t2";

/// One row of the bound curves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRow {
    pub q: u32,
    pub rate_sep2: f64,
    pub rate_b2: f64,
    /// `1/(t-1)` at `t = 2`.
    pub ref_sep_general: f64,
    /// `2/t` at `t = 2`.
    pub ref_dyachkov: f64,
}

pub fn emit_bound_table(q_min: u32, q_max: u32) -> Result<Vec<BoundRow>, BoundsError> {
    if q_min < 2 || q_min > q_max {
        return Err(BoundsError::InvalidRange(q_min, q_max));
    }
    let as_f64 = |r: num_rational::Ratio<u64>| *r.numer() as f64 / *r.denom() as f64;
    let sep_general = as_f64(rate_bound_reference(ReferenceBound::SeparableGeneral, 2)?);
    let dyachkov = as_f64(rate_bound_reference(ReferenceBound::Dyachkov, 2)?);
    (q_min..=q_max)
        .map(|q| {
            Ok(BoundRow {
                q,
                rate_sep2: as_f64(rate_bound_sep2(q)?),
                rate_b2: rate_bound_b2(q)?,
                ref_sep_general: sep_general,
                ref_dyachkov: dyachkov,
            })
        })
        .collect()
}

/// `x` rounded to `digits` significant digits, printed without exponent or
/// trailing zeros.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .expect("formatted float parses");
    rounded.to_string()
}

/// Writes the header and rows as CSV with LF line endings.
pub fn write_csv<W: Write>(rows: &[BoundRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            row.q,
            format_significant(row.rate_sep2, 12),
            format_significant(row.rate_b2, 12),
            format_significant(row.ref_sep_general, 12),
            format_significant(row.ref_dyachkov, 12),
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csv(rows: &[BoundRow]) -> String {
        let mut buf = Vec::new();
        write_csv(rows, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn single_row_at_two() {
        let rows = emit_bound_table(2, 2).unwrap();
        assert_eq!(csv(&rows), format!("{CSV_HEADER}\n2,0.6,0.6,1,1\n"));
    }

    #[test]
    fn thirteen() {
        let rows = emit_bound_table(13, 13).unwrap();
        assert!(csv(&rows).contains("\n13,0.657894736842,"));
    }

    #[test]
    fn monotone_columns() {
        let rows = emit_bound_table(2, 40).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].rate_sep2 > w[0].rate_sep2);
            assert!(w[1].rate_b2 < w[0].rate_b2);
        }
    }

    #[test]
    fn invalid_ranges() {
        assert!(emit_bound_table(1, 3).is_err());
        assert!(emit_bound_table(5, 4).is_err());
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(25.0 / 38.0, 12), "0.657894736842");
        assert_eq!(format_significant(1.0, 12), "1");
        assert_eq!(format_significant(0.6, 12), "0.6");
        assert_eq!(format_significant(123456.7890123456, 6), "123457");
    }
}
