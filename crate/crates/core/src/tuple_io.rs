//! The shared plain-text tuple format: one map per line, four
//! whitespace-separated rationals or decimals `a b c d` meaning
//! z -> (az + b)/(cz + d); `#` starts a comment. When every row is an
//! orientation-preserving affine map with rational entries, an exact affine
//! description is derived alongside the floating tuple.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{parse_rational, rational_to_f64, ExactAffine};
use crate::moebius::MoebiusMap;
use crate::words::ExactAffineTuple;

/// A parsed tuple file.
#[derive(Debug, Clone)]
pub struct ParsedTuple {
    pub maps: Vec<MoebiusMap<f64>>,
    /// Present exactly when every row is affine (`c = 0`) with a positive
    /// dilation, so the exact certification path applies.
    pub exact: Option<ExactAffineTuple>,
    /// The raw rational rows, in input order.
    pub rows: Vec<[BigRational; 4]>,
}

/// Parse the tuple format from a string. Line numbers in errors are 1-based.
pub fn parse_tuple_str(input: &str) -> Result<ParsedTuple> {
    let mut maps = Vec::new();
    let mut rows: Vec<[BigRational; 4]> = Vec::new();
    for (idx, raw) in input.lines().enumerate() {
        let line = idx + 1;
        let text = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 4 {
            return Err(Error::Parse {
                line,
                msg: format!("expected 4 entries `a b c d`, found {}", fields.len()),
            });
        }
        let mut row: Vec<BigRational> = Vec::with_capacity(4);
        for f in &fields {
            row.push(parse_rational(f).ok_or_else(|| Error::Parse {
                line,
                msg: format!("bad number {f:?}"),
            })?);
        }
        let [a, b, c, d]: [BigRational; 4] = row.try_into().unwrap();
        let map = MoebiusMap::new(
            rational_to_f64(&a),
            rational_to_f64(&b),
            rational_to_f64(&c),
            rational_to_f64(&d),
        )
        .map_err(|e| Error::Parse { line, msg: format!("not a projective map: {e}") })?;
        maps.push(map);
        rows.push([a, b, c, d]);
    }
    if maps.is_empty() {
        return Err(Error::EmptyInput);
    }
    let exact = exact_affine(&rows);
    Ok(ParsedTuple { maps, exact, rows })
}

fn exact_affine(rows: &[[BigRational; 4]]) -> Option<ExactAffineTuple> {
    let mut maps = Vec::with_capacity(rows.len());
    for [a, b, c, d] in rows {
        if !c.is_zero() || d.is_zero() {
            return None;
        }
        let lambda = a / d;
        if !lambda.is_positive() {
            return None;
        }
        maps.push(ExactAffine::new(lambda, b / d).ok()?);
    }
    ExactAffineTuple::new(maps).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn parses_rationals_decimals_and_comments() {
        let t = parse_tuple_str(
            "# the f0 triplet\n2 1 0 1\n1/3 0 0 1  # dilation below one\n\n5.0 -4 0 1\n",
        )
        .unwrap();
        assert_eq!(t.maps.len(), 3);
        let exact = t.exact.expect("all rows affine");
        assert_eq!(exact.maps.len(), 3);
        assert_eq!(exact.prime_support, vec![2, 3, 5]);
        assert_eq!(t.rows[1][0], parse_rational("1/3").unwrap());
        // the parsed float map agrees with the direct construction
        let g = MoebiusMap::affine(2.0, 1.0).unwrap();
        assert!(t.maps[0].psl_distance(&g) < 1e-12);
    }

    #[test]
    fn exact_derivation_respects_normalization() {
        // 4z + 2 over 2: same map as 2z + 1
        let t = parse_tuple_str("4 2 0 2\n").unwrap();
        let exact = t.exact.unwrap();
        assert_eq!(exact.maps[0].lambda_value(), parse_rational("2").unwrap());
        assert_eq!(exact.maps[0].kappa, BigRational::one());
    }

    #[test]
    fn non_affine_rows_skip_exact() {
        let t = parse_tuple_str("2 0 0 1\n5 4 4 5\n").unwrap();
        assert!(t.exact.is_none());
        assert_eq!(t.maps.len(), 2);
    }

    #[test]
    fn orientation_reversing_rows_rejected() {
        // determinant -2: not in PSL(2,R)
        match parse_tuple_str("-2 0 0 1\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("{other:?}"),
        }
        // both entries negated: same map as 2z, accepted
        let t = parse_tuple_str("-2 0 0 -1\n").unwrap();
        let exact = t.exact.unwrap();
        assert_eq!(exact.maps[0].lambda_value(), parse_rational("2").unwrap());
    }

    #[test]
    fn errors_carry_line_numbers() {
        match parse_tuple_str("2 0 0 1\n1 2 3\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        match parse_tuple_str("2 0 0 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("{other:?}"),
        }
        // zero determinant
        match parse_tuple_str("1 1 1 1\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_tuple_str("# only comments\n"), Err(Error::EmptyInput)));
    }
}
