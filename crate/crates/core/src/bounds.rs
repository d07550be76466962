//! Exact evaluation of every bound formula, built from [`binomial`] alone.

use num_bigint::{BigInt, BigUint};
use num_traits::Signed;
use serde_json::json;

use crate::constructions::corner_parameters;
use crate::error::{Error, Result};
use crate::fqlin::{binomial, BoundValue, FieldSpec};
use crate::predicates::Property;
use crate::setfamily::cap_level;

fn c(n: i64, k: i64) -> BigUint {
    binomial(n, k)
}

fn ci(n: i64, k: i64) -> BigInt {
    BigInt::from(binomial(n, k))
}

fn check(n: usize, q: u32) -> Result<(i64, i64)> {
    FieldSpec::new(q)?;
    if n < 1 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    Ok((n as i64, q as i64))
}

fn nonneg(id: &'static str, v: BigInt) -> Result<BoundValue> {
    if v.is_negative() {
        return Err(Error::Domain(format!("{id} evaluated to a negative number {v}")));
    }
    Ok(BoundValue::new(id, v.to_biguint().expect("nonnegative")))
}

/// `4(q-1)q C(n+q-2, q-2) + 2q`.
pub fn r_upper_main(n: usize, q: u32) -> Result<BoundValue> {
    let (n, q) = check(n, q)?;
    let v = BigUint::from((4 * (q - 1) * q) as u64) * c(n + q - 2, q - 2) + BigUint::from(2 * q as u64);
    Ok(BoundValue::new("r_upper_main", v))
}

/// `C(n+q, q-1) + 3`.
pub fn r_upper_ge(n: usize, q: u32) -> Result<BoundValue> {
    let (n, q) = check(n, q)?;
    Ok(BoundValue::new("r_upper_ge", c(n + q, q - 1) + 3u8))
}

/// `C(n+q, q-1) + 2 - C(n+q, q-3)`.
pub fn r_upper_naslund(n: usize, q: u32) -> Result<BoundValue> {
    let (n, q) = check(n, q)?;
    nonneg("r_upper_naslund", ci(n + q, q - 1) + 2 - ci(n + q, q - 3))
}

/// `C(n + (k-1)q, (k-1)(q-1))`: sets larger than this contain a k-right corner.
pub fn corner_upper_naslund(n: usize, q: u32, k: usize) -> Result<BoundValue> {
    let (n, q) = check(n, q)?;
    if k < 2 {
        return Err(Error::Domain(format!("k={k}: corners need k >= 2")));
    }
    let k = k as i64;
    Ok(BoundValue::new("corner_upper_naslund", c(n + (k - 1) * q, (k - 1) * (q - 1))))
}

/// `floor(C(n, l) / C(t, l))` with `t = floor(kq/(2k-1))`, `l = ceil((k-1)t/k)`.
/// Only the main term: the vanishing correction factor is not evaluated.
pub fn corner_lower_main_term(n: usize, q: u32, k: usize) -> Result<BoundValue> {
    let (n, _) = check(n, q)?;
    if k < 2 {
        return Err(Error::Domain(format!("k={k}: corners need k >= 2")));
    }
    let (t, cap) = corner_parameters(q, k);
    let l = cap_level(cap) as i64;
    let den = c(t as i64, l);
    Ok(BoundValue::new("corner_lower_main_term", c(n, l) / den))
}

/// `C(n+2q-1, 2q-2) + 2 C(n+q, q-1)`.
pub fn allright_upper(n: usize, q: u32) -> Result<BoundValue> {
    let (n, q) = check(n, q)?;
    Ok(BoundValue::new("allright_upper", c(n + 2 * q - 1, 2 * q - 2) + c(n + q, q - 1) * 2u8))
}

/// `C(n+q, q-1) - C(n+q-2, q-3)`.
pub fn s_upper(n: usize, q: u32) -> Result<BoundValue> {
    let (n, q) = check(n, q)?;
    nonneg("s_upper", ci(n + q, q - 1) - ci(n + q - 2, q - 3))
}

/// `C(n, q-1)`, the size of the weight-`(q-1)` construction.
pub fn s_lower_basic_size(n: usize, q: u32) -> Result<BoundValue> {
    let (n, q) = check(n, q)?;
    Ok(BoundValue::new("s_lower_basic", c(n, q - 1)))
}

/// `C(n, q-1) + C(n, q-2)`, valid when `n != -2 mod q` or `q = 1 mod 4`.
pub fn s_lower_augmented_size(n: usize, q: u32) -> Result<BoundValue> {
    let (ni, qi) = check(n, q)?;
    if !s_augmented_applies(n, q) {
        return Err(Error::Domain(format!("n={n}, q={q}: needs n ≢ -2 mod q or q ≡ 1 mod 4")));
    }
    Ok(BoundValue::new("s_lower_augmented", c(ni, qi - 1) + c(ni, qi - 2)))
}

pub fn s_augmented_applies(n: usize, q: u32) -> bool {
    (n + 2) % q as usize != 0 || q % 4 == 1
}

/// Sizes of the `q = 3` constructions: `C(n+3,2)-1`, `C(n+2,2)-1`,
/// `C(n+1,2)-1` for `n` congruent to 2, 0, 1 mod 3.
pub fn s3_lower(n: usize) -> Result<BoundValue> {
    let ni = n as i64;
    let top = match n % 3 {
        2 if n >= 2 => ni + 3,
        0 if n >= 3 => ni + 2,
        1 if n >= 4 => ni + 1,
        _ => return Err(Error::Domain(format!("n={n}: no F_3 construction"))),
    };
    Ok(BoundValue::new("s3_lower", c(top, 2) - 1u8))
}

fn binom_sum(n: i64, q: i64, step: usize, id: &'static str) -> BoundValue {
    let v = (0..=q - 1).step_by(step).map(|i| c(n, i)).sum();
    BoundValue::new(id, v)
}

/// `sum_{i=0}^{q-1} C(n, i)`.
pub fn t_upper_general(n: usize, q: u32) -> Result<BoundValue> {
    let (n, q) = check(n, q)?;
    Ok(binom_sum(n, q, 1, "t_upper_general"))
}

/// `sum_{i even, i <= q-1} C(n, i)`, for `n = 0 mod q`.
pub fn t_upper_divisible(n: usize, q: u32) -> Result<BoundValue> {
    let (ni, qi) = check(n, q)?;
    if n % q as usize != 0 {
        return Err(Error::Domain(format!("n={n}: n ≡ 0 mod {q} required")));
    }
    Ok(binom_sum(ni, qi, 2, "t_upper_divisible"))
}

/// `sum_{i even, i <= q-1} C(n, i)`.
pub fn t_lower_general(n: usize, q: u32) -> Result<BoundValue> {
    let (n, q) = check(n, q)?;
    Ok(binom_sum(n, q, 2, "t_lower_general"))
}

/// `sum_{i=0}^{q-1} C(n, i)`, for `n = -1 mod q`.
pub fn t_lower_special(n: usize, q: u32) -> Result<BoundValue> {
    let (ni, qi) = check(n, q)?;
    if (n + 1) % q as usize != 0 {
        return Err(Error::Domain(format!("n={n}: n ≡ -1 mod {q} required")));
    }
    Ok(binom_sum(ni, qi, 1, "t_lower_special"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Upper,
    Lower,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Upper => "upper",
            Side::Lower => "lower",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub property: Property,
    pub n: usize,
    pub q: u32,
    pub k: Option<usize>,
    pub value: BoundValue,
    pub side: Side,
    /// Asymptotic main term only; not a finite-n bound.
    pub main_term: bool,
    /// Value is a floor of a quotient.
    pub floor_division: bool,
    /// Best finite lower bound meets best upper bound in this `(n, q)` cell.
    pub exact: bool,
    /// Upper value smaller than an elementary lower bound (see
    /// [`elementary_lower`]), so the formula cannot hold at this point.
    pub contradicted: bool,
}

impl BoundReport {
    pub fn formula_id(&self) -> &'static str {
        self.value.formula_id
    }
}

/// Size of a set that trivially avoids the configuration: a line of `q`
/// points has no right angle, corner or all-right triangle (a product of
/// two nonzero scalars is nonzero), and the standard basis has no right
/// angle. Zero for the pair properties.
pub fn elementary_lower(property: Property, n: usize, q: u32) -> usize {
    match property {
        Property::RightAngle => n.max(q as usize),
        Property::KRightCorner(_) | Property::AllRightTriangle => q as usize,
        Property::SelfOrthDiff | Property::DivisibleHamming => 0,
    }
}

/// Every applicable formula for one parameter point, in a fixed order.
pub fn bounds_for(property: Property, n: usize, q: u32) -> Result<Vec<BoundReport>> {
    check(n, q)?;
    let k = property.k();
    let mut rows = Vec::new();
    let mut push = |value: BoundValue, side: Side, main_term: bool| {
        let floor_division = value.formula_id == "corner_lower_main_term";
        let contradicted = side == Side::Upper && value.value < BigUint::from(elementary_lower(property, n, q));
        rows.push(BoundReport { property, n, q, k, value, side, main_term, floor_division, exact: false, contradicted });
    };
    match property {
        Property::RightAngle => {
            push(r_upper_main(n, q)?, Side::Upper, false);
            push(r_upper_ge(n, q)?, Side::Upper, false);
            // negative for some tiny n (q = 7, n <= 2): no row then
            if let Ok(v) = r_upper_naslund(n, q) {
                push(v, Side::Upper, false);
            }
            push(corner_lower_main_term(n, q, 2)?, Side::Lower, true);
        }
        Property::KRightCorner(k) => {
            push(corner_upper_naslund(n, q, k)?, Side::Upper, false);
            push(corner_lower_main_term(n, q, k)?, Side::Lower, true);
        }
        Property::AllRightTriangle => push(allright_upper(n, q)?, Side::Upper, false),
        Property::SelfOrthDiff => {
            push(s_upper(n, q)?, Side::Upper, false);
            push(s_lower_basic_size(n, q)?, Side::Lower, false);
            if s_augmented_applies(n, q) {
                push(s_lower_augmented_size(n, q)?, Side::Lower, false);
            }
            if q == 3 {
                if let Ok(v) = s3_lower(n) {
                    push(v, Side::Lower, false);
                }
            }
        }
        Property::DivisibleHamming => {
            push(t_upper_general(n, q)?, Side::Upper, false);
            if n % q as usize == 0 {
                push(t_upper_divisible(n, q)?, Side::Upper, false);
            }
            push(t_lower_general(n, q)?, Side::Lower, false);
            if (n + 1) % q as usize == 0 {
                push(t_lower_special(n, q)?, Side::Lower, false);
            }
        }
    }
    let best_upper = rows.iter().filter(|r| r.side == Side::Upper && !r.contradicted).map(|r| &r.value.value).min().cloned();
    let best_lower =
        rows.iter().filter(|r| r.side == Side::Lower && !r.main_term).map(|r| &r.value.value).max().cloned();
    let exact = matches!((best_lower, best_upper), (Some(l), Some(u)) if l == u);
    for r in &mut rows {
        r.exact = exact;
    }
    Ok(rows)
}

/// Formulas for every `n` in `ns` and `q` in `qs`, `q`-major order.
pub fn bounds_table(property: Property, ns: impl IntoIterator<Item = usize> + Clone, qs: &[u32]) -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    for &q in qs {
        for n in ns.clone() {
            out.extend(bounds_for(property, n, q)?);
        }
    }
    Ok(out)
}

const COLUMNS: [&str; 11] =
    ["property", "n", "q", "k", "formula", "side", "value", "main_term", "floor_division", "exact", "contradicted"];

fn row_fields(r: &BoundReport) -> [String; 11] {
    [
        r.property.tag().to_string(),
        r.n.to_string(),
        r.q.to_string(),
        r.k.map(|k| k.to_string()).unwrap_or_default(),
        r.formula_id().to_string(),
        r.side.as_str().to_string(),
        r.value.value.to_string(),
        r.main_term.to_string(),
        r.floor_division.to_string(),
        r.exact.to_string(),
        r.contradicted.to_string(),
    ]
}

pub fn table_csv(rows: &[BoundReport]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    w.write_record(COLUMNS).expect("in-memory write");
    for r in rows {
        w.write_record(row_fields(r)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
}

pub fn table_json(rows: &[BoundReport]) -> serde_json::Value {
    let rows: Vec<serde_json::Value> = rows
        .iter()
        .map(|r| {
            let obj: serde_json::Map<String, serde_json::Value> =
                COLUMNS.iter().zip(row_fields(r)).map(|(k, v)| (k.to_string(), json!(v))).collect();
            serde_json::Value::Object(obj)
        })
        .collect();
    json!({ "schema": 1, "rows": rows })
}

pub fn table_text(rows: &[BoundReport]) -> String {
    let all: Vec<[String; 11]> = rows.iter().map(row_fields).collect();
    let mut widths: Vec<usize> = COLUMNS.iter().map(|c| c.len()).collect();
    for r in &all {
        for (w, f) in widths.iter_mut().zip(r) {
            *w = (*w).max(f.len());
        }
    }
    let line = |fields: Vec<&str>| {
        let cells: Vec<String> = fields.iter().zip(&widths).map(|(f, w)| format!("{f:<w$}")).collect();
        cells.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(COLUMNS.to_vec());
    for r in &all {
        out.push_str(&line(r.iter().map(|s| s.as_str()).collect()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn val(b: Result<BoundValue>) -> u64 {
        b.unwrap().to_u64().unwrap()
    }

    #[test]
    fn right_angle_formulas() {
        assert_eq!(val(r_upper_main(2, 3)), 78);
        assert_eq!(val(r_upper_main(1, 3)), 54);
        assert_eq!(val(r_upper_ge(2, 3)), 13);
        assert_eq!(val(r_upper_ge(1, 3)), 9);
        assert_eq!(val(r_upper_naslund(2, 3)), 11);
        assert_eq!(val(r_upper_naslund(2, 5)), 16);
        assert!(r_upper_main(2, 9).is_err());
        assert!(r_upper_main(0, 3).is_err());
    }

    #[test]
    fn corner_formulas() {
        assert_eq!(val(corner_upper_naslund(2, 3, 2)), 10);
        assert_eq!(val(corner_upper_naslund(3, 3, 3)), 126);
        for n in 1..20 {
            for q in [3, 5, 7] {
                assert_eq!(val(corner_upper_naslund(n, q, 2)) + 3, val(r_upper_ge(n, q)));
            }
        }
        assert_eq!(val(corner_lower_main_term(8, 3, 2)), 4);
        assert_eq!(val(corner_lower_main_term(10, 5, 2)), 15);
        assert_eq!(val(corner_lower_main_term(6, 3, 3)), 6);
        assert!(corner_upper_naslund(3, 3, 1).is_err());
    }

    #[test]
    fn all_right_and_s_formulas() {
        assert_eq!(val(allright_upper(2, 3)), 55);
        assert_eq!(val(allright_upper(1, 3)), 27);
        assert_eq!(val(s_upper(2, 3)), 9);
        assert_eq!(val(s_upper(5, 3)), 27);
        assert_eq!(val(s_upper(4, 5)), 105);
        for n in 1..=60 {
            assert_eq!(s_upper(n, 3).unwrap().value, binomial(n as i64 + 3, 2) - 1u8);
        }
    }

    #[test]
    fn t_formulas() {
        assert_eq!(val(t_upper_divisible(3, 3)), 4);
        assert_eq!(val(t_lower_general(3, 3)), 4);
        assert_eq!(val(t_upper_general(5, 3)), 16);
        assert_eq!(val(t_lower_special(5, 3)), 16);
        assert_eq!(val(t_lower_general(4, 3)), 7);
        assert!(t_upper_divisible(4, 3).is_err());
        assert!(t_lower_special(4, 3).is_err());
    }

    #[test]
    fn ordering_sweep() {
        for q in [3u32, 5, 7] {
            for n in 1..=30 {
                match r_upper_naslund(n, q) {
                    Ok(v) => assert!(v.value <= r_upper_ge(n, q).unwrap().value),
                    Err(_) => assert!(q == 7 && n <= 2),
                }
                assert!(allright_upper(n, q).unwrap().value >= s_upper(n, q).unwrap().value);
                assert!(r_upper_ge(n, q).unwrap().value <= r_upper_ge(n + 1, q).unwrap().value);
                assert!(t_lower_general(n, q).unwrap().value <= t_upper_general(n, q).unwrap().value);
                assert!(s_lower_basic_size(n, q).unwrap().value <= s_upper(n, q).unwrap().value);
                if s_augmented_applies(n, q) {
                    assert!(s_lower_augmented_size(n, q).unwrap().value <= s_upper(n, q).unwrap().value);
                }
            }
        }
    }

    #[test]
    fn tables() {
        let rows = bounds_table(Property::RightAngle, 1..=10, &[3]).unwrap();
        assert_eq!(rows.len(), 40);
        let ids: Vec<&str> = rows[..4].iter().map(|r| r.formula_id()).collect();
        assert_eq!(ids, ["r_upper_main", "r_upper_ge", "r_upper_naslund", "corner_lower_main_term"]);
        assert!(rows[3].main_term && rows[3].floor_division);

        assert!(bounds_table(Property::RightAngle, 1..1, &[3]).unwrap().is_empty());

        let rows = bounds_table(Property::SelfOrthDiff, 1..=12, &[3]).unwrap();
        for r in &rows {
            assert_eq!(r.exact, r.n % 3 == 2, "n={}", r.n);
        }
        let rows = bounds_table(Property::DivisibleHamming, 1..=12, &[3]).unwrap();
        for r in &rows {
            assert_eq!(r.exact, r.n % 3 != 1, "n={}", r.n);
        }
    }

    #[test]
    fn renderings() {
        let rows = bounds_table(Property::KRightCorner(3), 2..=3, &[3]).unwrap();
        let csv = table_csv(&rows);
        assert!(csv.starts_with("property,n,q,k,formula,side,value,main_term,floor_division,exact,contradicted\r\n"));
        assert!(csv.contains("k-right-corner,3,3,3,corner_upper_naslund,upper,126,false,false,false,false"));
        let js = table_json(&rows);
        assert_eq!(js["schema"], 1);
        assert_eq!(js["rows"][0]["value"], "70");
        assert!(table_text(&rows).lines().count() == rows.len() + 1);
    }

    #[test]
    fn small_n_naslund_rows_are_flagged() {
        let flagged: Vec<(usize, u32)> = [3u32, 5, 7]
            .iter()
            .flat_map(|&q| (1..=12).map(move |n| (n, q)))
            .filter(|&(n, q)| bounds_for(Property::RightAngle, n, q).unwrap().iter().any(|r| r.contradicted))
            .collect();
        assert_eq!(flagged, [(1, 5), (3, 7)]);
        let rows = bounds_for(Property::RightAngle, 3, 7).unwrap();
        let r = rows.iter().find(|r| r.contradicted).unwrap();
        assert_eq!((r.formula_id(), r.value.to_u64()), ("r_upper_naslund", Some(2)));
        assert!(bounds_for(Property::SelfOrthDiff, 2, 7).unwrap().iter().all(|r| !r.contradicted));
    }
}
