//! ECMA-262 3rd edition primitive conversions.

/// Number to string, following ECMA-262 §9.8.1.
pub fn number_to_string(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x == 0.0 {
        return "0".into();
    }
    if x < 0.0 {
        return format!("-{}", number_to_string(-x));
    }
    if x.is_infinite() {
        return "Infinity".into();
    }
    // `{:e}` yields the shortest round-tripping digits: d.ddde±x
    let sci = format!("{x:e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let k = digits.len() as i32;
    let n = exp.parse::<i32>().expect("exponent") + 1;
    if k <= n && n <= 21 {
        let mut s = digits;
        s.extend(std::iter::repeat_n('0', (n - k) as usize));
        s
    } else if 0 < n && n <= 21 {
        format!("{}.{}", &digits[..n as usize], &digits[n as usize..])
    } else if -6 < n && n <= 0 {
        format!("0.{}{}", "0".repeat((-n) as usize), digits)
    } else {
        let e = n - 1;
        let sign = if e < 0 { '-' } else { '+' };
        if k == 1 {
            format!("{digits}e{sign}{}", e.abs())
        } else {
            format!("{}.{}e{sign}{}", &digits[..1], &digits[1..], e.abs())
        }
    }
}

fn is_js_whitespace(c: char) -> bool {
    matches!(
        c,
        '\u{9}' | '\u{a}' | '\u{b}' | '\u{c}' | '\u{d}' | ' ' | '\u{a0}' | '\u{feff}' | '\u{2028}' | '\u{2029}'
    ) || (c as u32 >= 0x1680 && c.is_whitespace())
}

/// String to number, following ECMA-262 §9.3.1.
pub fn string_to_number(s: &str) -> f64 {
    let t = s.trim_matches(is_js_whitespace);
    if t.is_empty() {
        return 0.0;
    }
    if let Some(hex) = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        if hex.is_empty() || !hex.chars().all(|c| c.is_ascii_hexdigit()) {
            return f64::NAN;
        }
        return hex
            .chars()
            .fold(0.0, |acc, c| acc * 16.0 + c.to_digit(16).unwrap() as f64);
    }
    let (sign, body) = match t.as_bytes()[0] {
        b'+' => (1.0, &t[1..]),
        b'-' => (-1.0, &t[1..]),
        _ => (1.0, t),
    };
    if body == "Infinity" {
        return sign * f64::INFINITY;
    }
    if !is_decimal_literal(body) {
        return f64::NAN;
    }
    sign * body.parse::<f64>().unwrap_or(f64::NAN)
}

/// `digits [. digits] [e [+-] digits]` or `. digits [exp]`, no sign.
fn is_decimal_literal(s: &str) -> bool {
    let b = s.as_bytes();
    let mut i = 0;
    let int_start = i;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    let int_digits = i - int_start;
    let mut frac_digits = 0;
    if i < b.len() && b[i] == b'.' {
        i += 1;
        let f = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        frac_digits = i - f;
    }
    if int_digits == 0 && frac_digits == 0 {
        return false;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        i += 1;
        if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
            i += 1;
        }
        let e = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        if i == e {
            return false;
        }
    }
    i == b.len()
}

pub fn to_uint32(x: f64) -> u32 {
    if !x.is_finite() {
        return 0;
    }
    let t = x.trunc();
    t.rem_euclid(4294967296.0) as u32
}

pub fn to_int32(x: f64) -> i32 {
    to_uint32(x) as i32
}

/// Canonical numeric strings: `s == ToString(ToNumber(s))`.
pub fn is_numeric_string(s: &str) -> bool {
    number_to_string(string_to_number(s)) == s
}

/// Array index strings: canonical uint32 values below 2^32 - 1.
pub fn array_index(s: &str) -> Option<u32> {
    let n = string_to_number(s);
    if n.fract() == 0.0 && (0.0..4294967295.0).contains(&n) && number_to_string(n) == s {
        Some(n as u32)
    } else {
        None
    }
}

/// Comparison by UTF-16 code units, as ECMA string relational operators do.
pub fn utf16_cmp(a: &str, b: &str) -> std::cmp::Ordering {
    a.encode_utf16().cmp(b.encode_utf16())
}

/// Characters that can occur in a canonical numeric string.
pub fn numeric_alphabet(c: char) -> bool {
    c.is_ascii_digit() || "+-.eInfityNa".contains(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        let cases = [
            (0.0, "0"),
            (-0.0, "0"),
            (3.0, "3"),
            (-3.5, "-3.5"),
            (0.1, "0.1"),
            (1e21, "1e+21"),
            (1e20, "100000000000000000000"),
            (123e-20, "1.23e-18"),
            (0.000001, "0.000001"),
            (1e-7, "1e-7"),
            (f64::NAN, "NaN"),
            (f64::NEG_INFINITY, "-Infinity"),
            (1.5e300, "1.5e+300"),
            (4294967295.0, "4294967295"),
        ];
        for (x, s) in cases {
            assert_eq!(number_to_string(x), s, "{x}");
        }
    }

    #[test]
    fn string_parsing() {
        let cases: [(&str, f64); 12] = [
            ("", 0.0),
            ("  42 ", 42.0),
            ("0x1F", 31.0),
            ("-Infinity", f64::NEG_INFINITY),
            ("1e3", 1000.0),
            (".5", 0.5),
            ("5.", 5.0),
            ("+7", 7.0),
            ("\n\t-2.5e-1", -0.25),
            ("00012", 12.0),
            ("1_000", f64::NAN),
            ("infinity", f64::NAN),
        ];
        for (s, x) in cases {
            let got = string_to_number(s);
            assert!(got == x || (got.is_nan() && x.is_nan()), "{s:?} -> {got}");
        }
        for bad in ["xyz", "1e", "e5", "-0x10", ".", "NaN", "inf", "1 2"] {
            assert!(string_to_number(bad).is_nan(), "{bad}");
        }
    }

    #[test]
    fn int_conversions() {
        assert_eq!(to_int32(4294967295.0), -1);
        assert_eq!(to_uint32(-1.0), 4294967295);
        assert_eq!(to_int32(2147483648.0), -2147483648);
        assert_eq!(to_uint32(f64::NAN), 0);
        assert_eq!(to_int32(-3.7), -3);
    }

    #[test]
    fn numeric_strings() {
        for s in ["0", "42", "3.5", "NaN", "Infinity", "-Infinity", "-1", "1e+21"] {
            assert!(is_numeric_string(s), "{s}");
        }
        for s in ["", "01", "-0", "foo", "valueOf", "1e21", " 1", "0x10"] {
            assert!(!is_numeric_string(s), "{s}");
        }
        assert_eq!(array_index("7"), Some(7));
        assert_eq!(array_index("4294967295"), None);
        assert_eq!(array_index("1.5"), None);
        assert_eq!(array_index("-1"), None);
    }
}
