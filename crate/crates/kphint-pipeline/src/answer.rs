//! Final-answer extraction and matching.
//!
//! The default predicate takes the last `\boxed{...}` block of a response
//! (balanced through nested braces), strips whitespace, and compares
//! against the gold answer: numerically when both sides parse as rationals,
//! exact string equality otherwise. Anything beyond that (symbolic
//! equivalence, verifier models) is intentionally out of scope; the
//! predicate is pluggable.

/// Pluggable response-vs-gold predicate.
pub trait AnswerMatcher: Sync {
    fn matches(&self, response: &str, gold: &str) -> bool;
}

/// Boxed extraction plus normalized comparison.
#[derive(Debug, Default, Clone, Copy)]
pub struct BoxedAnswerMatcher;

impl AnswerMatcher for BoxedAnswerMatcher {
    fn matches(&self, response: &str, gold: &str) -> bool {
        match extract_boxed(response) {
            Some(answer) => answers_match(&answer, gold),
            None => false,
        }
    }
}

/// Content of the last `\boxed{...}` in the text, through balanced braces.
pub fn extract_boxed(text: &str) -> Option<String> {
    const OPENER: &str = "\\boxed{";
    let start = text.rfind(OPENER)? + OPENER.len();
    let mut depth = 1u32;
    for (offset, ch) in text[start..].char_indices() {
        match ch {
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth == 0 {
                    return Some(text[start..start + offset].to_string());
                }
            }
            _ => {}
        }
    }
    None
}

/// Whitespace-stripped comparison, numeric when both sides parse as
/// rationals (integers, decimals, or a/b fractions).
pub fn answers_match(answer: &str, gold: &str) -> bool {
    let a = normalize(answer);
    let g = normalize(gold);
    match (parse_rational(&a), parse_rational(&g)) {
        (Some(x), Some(y)) => x == y,
        _ => a == g,
    }
}

fn normalize(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Exact rational as a reduced (numerator, denominator) pair with a
/// positive denominator.
#[derive(Debug, PartialEq, Eq)]
struct Rational(i128, i128);

fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n = parse_decimal(num.trim())?;
        let d = parse_decimal(den.trim())?;
        return divide(n, d);
    }
    parse_decimal(s).map(|r| reduce(r.0, r.1))
}

/// Parses an integer or decimal literal as numerator / power-of-ten pair.
fn parse_decimal(s: &str) -> Option<Rational> {
    if s.is_empty() {
        return None;
    }
    let (sign, digits) = match s.strip_prefix('-') {
        Some(rest) => (-1i128, rest),
        None => match s.strip_prefix('+') {
            Some(rest) => (1, rest),
            None => (1, s),
        },
    };
    if digits.is_empty() {
        return None;
    }
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let mut numerator: i128 = 0;
    for c in int_part.chars().chain(frac_part.chars()) {
        numerator = numerator
            .checked_mul(10)?
            .checked_add(i128::from(c as u8 - b'0'))?;
    }
    let denominator = 10i128.checked_pow(frac_part.len() as u32)?;
    Some(reduce(sign * numerator, denominator))
}

fn divide(a: Rational, b: Rational) -> Option<Rational> {
    if b.0 == 0 {
        return None;
    }
    let num = a.0.checked_mul(b.1)?;
    let den = a.1.checked_mul(b.0)?;
    Some(reduce(num, den))
}

fn reduce(num: i128, den: i128) -> Rational {
    debug_assert!(den != 0);
    let sign = if den < 0 { -1 } else { 1 };
    let g = gcd(num.unsigned_abs(), den.unsigned_abs()).max(1) as i128;
    Rational(sign * num / g, den.abs() / g)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
