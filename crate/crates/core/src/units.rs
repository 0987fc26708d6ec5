//! SI unit vectors with exact rational exponents, the joker unit, and the
//! propagation rules applied by every operation in the function set.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::ParseError;

/// Number of SI base units.
pub const N_BASE: usize = 7;

/// Base unit symbols in vector order.
pub const BASE_SYMBOLS: [&str; N_BASE] = ["m", "kg", "s", "A", "K", "mol", "cd"];

/// Exponents of the seven SI base units, order `[m, kg, s, A, K, mol, cd]`.
pub type Exponents = [Rational64; N_BASE];

/// Physical unit of a (sub)expression.
///
/// `Joker` is the unit of a constant whose physical unit is not known. It is
/// distinct from the dimensionless unit, which is `Known` with all-zero
/// exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnitVector {
    Known(Exponents),
    Joker,
}

impl UnitVector {
    pub fn dimensionless() -> Self {
        UnitVector::Known([Rational64::zero(); N_BASE])
    }

    /// Builds a known unit from integer exponents.
    pub fn from_ints(exps: [i64; N_BASE]) -> Self {
        UnitVector::Known(exps.map(Rational64::from_integer))
    }

    pub fn is_joker(&self) -> bool {
        matches!(self, UnitVector::Joker)
    }

    pub fn is_dimensionless(&self) -> bool {
        match self {
            UnitVector::Known(e) => e.iter().all(Zero::is_zero),
            UnitVector::Joker => false,
        }
    }

    /// Dimensionless or joker: acceptable input for functions that require
    /// dimensionless arguments.
    fn passes_as_dimensionless(&self) -> bool {
        self.is_joker() || self.is_dimensionless()
    }

    fn zip_with(a: &Exponents, b: &Exponents, f: impl Fn(Rational64, Rational64) -> Rational64) -> Self {
        let mut out = [Rational64::zero(); N_BASE];
        for i in 0..N_BASE {
            out[i] = f(a[i], b[i]);
        }
        UnitVector::Known(out)
    }

    fn scale(e: &Exponents, k: Rational64) -> Self {
        UnitVector::Known(e.map(|x| x * k))
    }
}

impl Default for UnitVector {
    fn default() -> Self {
        UnitVector::dimensionless()
    }
}

/// Operations available to the expression trees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OpKind {
    Add,
    Sub,
    Mul,
    Div,
    Exp,
    Log,
    Sin,
    Cos,
    Tan,
    Sqrt,
    /// `x^k` for a fixed integer `k >= 2`.
    FixedPow(u32),
    /// `x^y` with both operands subtrees.
    BinaryPow,
}

impl OpKind {
    pub fn is_binary(self) -> bool {
        matches!(self, OpKind::Add | OpKind::Sub | OpKind::Mul | OpKind::Div | OpKind::BinaryPow)
    }

    pub fn is_unary(self) -> bool {
        !self.is_binary()
    }

    /// True for unary functions that only accept dimensionless arguments.
    pub fn requires_dimensionless(self) -> bool {
        matches!(self, OpKind::Exp | OpKind::Log | OpKind::Sin | OpKind::Cos | OpKind::Tan)
    }

    /// Short name used by the text format (`pow3`, `log`, `+`, ...).
    pub fn symbol(self) -> String {
        match self {
            OpKind::Add => "+".into(),
            OpKind::Sub => "-".into(),
            OpKind::Mul => "*".into(),
            OpKind::Div => "/".into(),
            OpKind::BinaryPow => "^".into(),
            OpKind::Exp => "exp".into(),
            OpKind::Log => "log".into(),
            OpKind::Sin => "sin".into(),
            OpKind::Cos => "cos".into(),
            OpKind::Tan => "tan".into(),
            OpKind::Sqrt => "sqrt".into(),
            OpKind::FixedPow(k) => format!("pow{k}"),
        }
    }

    /// Inverse of [`OpKind::symbol`].
    pub fn from_symbol(s: &str) -> Option<OpKind> {
        Some(match s {
            "+" => OpKind::Add,
            "-" => OpKind::Sub,
            "*" => OpKind::Mul,
            "/" => OpKind::Div,
            "^" => OpKind::BinaryPow,
            "exp" => OpKind::Exp,
            "log" => OpKind::Log,
            "sin" => OpKind::Sin,
            "cos" => OpKind::Cos,
            "tan" => OpKind::Tan,
            "sqrt" => OpKind::Sqrt,
            other => {
                let k: u32 = other.strip_prefix("pow")?.parse().ok()?;
                if k < 2 {
                    return None;
                }
                OpKind::FixedPow(k)
            }
        })
    }
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.symbol())
    }
}

/// Picks between two operand units after an Add/Sub mismatch.
///
/// Consumes exactly one `bool` draw from `rng`; `true` selects the left unit.
pub fn choose_operand_unit<R: Rng + ?Sized>(left: UnitVector, right: UnitVector, rng: &mut R) -> UnitVector {
    if rng.random::<bool>() {
        left
    } else {
        right
    }
}

/// Output unit of a binary operation, and whether the operands violate its
/// unit rule.
///
/// # Panics
///
/// Panics if `op` is unary.
pub fn propagate_binary<R: Rng + ?Sized>(
    op: OpKind,
    left: UnitVector,
    right: UnitVector,
    rng: &mut R,
) -> (UnitVector, bool) {
    use UnitVector::{Joker, Known};
    match op {
        OpKind::Add | OpKind::Sub => match (left, right) {
            (Joker, Joker) => (Joker, false),
            (Known(_), Joker) => (left, false),
            (Joker, Known(_)) => (right, false),
            (Known(a), Known(b)) if a == b => (left, false),
            (Known(_), Known(_)) => (choose_operand_unit(left, right, rng), true),
        },
        OpKind::Mul => match (left, right) {
            (Known(a), Known(b)) => (UnitVector::zip_with(&a, &b, |x, y| x + y), false),
            _ => (Joker, false),
        },
        OpKind::Div => match (left, right) {
            (Known(a), Known(b)) => (UnitVector::zip_with(&a, &b, |x, y| x - y), false),
            _ => (Joker, false),
        },
        OpKind::BinaryPow => {
            let ok = left.passes_as_dimensionless() && right.passes_as_dimensionless();
            (UnitVector::dimensionless(), !ok)
        }
        unary => panic!("propagate_binary called with unary operation {unary:?}"),
    }
}

/// Output unit of a unary operation, and whether its argument violates the
/// operation's unit rule. On violation the true output unit of the operation
/// is returned.
///
/// # Panics
///
/// Panics if `op` is binary.
pub fn propagate_unary(op: OpKind, child: UnitVector) -> (UnitVector, bool) {
    match op {
        OpKind::Exp | OpKind::Log | OpKind::Sin | OpKind::Cos | OpKind::Tan => {
            (UnitVector::dimensionless(), !child.passes_as_dimensionless())
        }
        OpKind::Sqrt => match child {
            UnitVector::Known(e) => (UnitVector::scale(&e, Rational64::new(1, 2)), false),
            UnitVector::Joker => (UnitVector::Joker, false),
        },
        OpKind::FixedPow(k) => match child {
            UnitVector::Known(e) => (UnitVector::scale(&e, Rational64::from_integer(k as i64)), false),
            UnitVector::Joker => (UnitVector::Joker, false),
        },
        binary => panic!("propagate_unary called with binary operation {binary:?}"),
    }
}

/// Sum of absolute exponent differences. A joker on either side counts as a
/// match and yields zero.
pub fn manhattan_distance(a: &UnitVector, b: &UnitVector) -> Rational64 {
    match (a, b) {
        (UnitVector::Known(x), UnitVector::Known(y)) => {
            x.iter().zip(y).map(|(p, q)| (p - q).abs()).sum()
        }
        _ => Rational64::zero(),
    }
}

impl fmt::Display for UnitVector {
    /// Writes the text format: `m kg s^-2`, `*` for joker, empty string for
    /// dimensionless. Exponent 1 is written without `^`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let exps = match self {
            UnitVector::Joker => return f.write_str("*"),
            UnitVector::Known(e) => e,
        };
        let mut first = true;
        for (sym, e) in BASE_SYMBOLS.iter().zip(exps) {
            if e.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            if *e == Rational64::from_integer(1) {
                f.write_str(sym)?;
            } else {
                write!(f, "{sym}^{e}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for UnitVector {
    type Err = ParseError;

    /// Parses space-separated `base^exponent` tokens. The exponent may be an
    /// integer or a fraction `p/q`; a bare base means exponent 1. Repeated
    /// bases accumulate.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "*" {
            return Ok(UnitVector::Joker);
        }
        let mut exps = [Rational64::zero(); N_BASE];
        for token in s.split_whitespace() {
            let (base, exp) = match token.split_once('^') {
                Some((b, e)) => (b, parse_rational(e).ok_or_else(|| bad_unit(s, token))?),
                None => (token, Rational64::from_integer(1)),
            };
            let idx = BASE_SYMBOLS
                .iter()
                .position(|b| *b == base)
                .ok_or_else(|| bad_unit(s, token))?;
            exps[idx] += exp;
        }
        Ok(UnitVector::Known(exps))
    }
}

fn bad_unit(s: &str, token: &str) -> ParseError {
    ParseError::new(format!("invalid unit token `{token}` in `{s}`"))
}

fn parse_rational(s: &str) -> Option<Rational64> {
    match s.split_once('/') {
        Some((n, d)) => {
            let d: i64 = d.parse().ok()?;
            if d == 0 {
                return None;
            }
            Some(Rational64::new(n.parse().ok()?, d))
        }
        None => Some(Rational64::from_integer(s.parse().ok()?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn u(e: [i64; 7]) -> UnitVector {
        UnitVector::from_ints(e)
    }

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn add_known_with_joker_returns_known() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let v = u([1, 0, -2, 0, 0, 0, 0]);
        assert_eq!(propagate_binary(OpKind::Add, v, UnitVector::Joker, &mut rng), (v, false));
    }

    #[test]
    fn mul_sums_exponents() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = propagate_binary(
            OpKind::Mul,
            u([1, 1, -2, 0, 0, 0, 0]),
            u([0, 0, 1, 0, 0, 0, 0]),
            &mut rng,
        );
        assert_eq!(out, (u([1, 1, -1, 0, 0, 0, 0]), false));
    }

    #[test]
    fn add_mismatch_picks_one_operand() {
        let a = u([1, 0, 0, 0, 0, 0, 0]);
        let b = u([0, 0, 1, 0, 0, 0, 0]);
        let mut seen = (false, false);
        for seed in 0..64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (unit, violated) = propagate_binary(OpKind::Add, a, b, &mut rng);
            assert!(violated);
            assert!(unit == a || unit == b);
            seen.0 |= unit == a;
            seen.1 |= unit == b;
        }
        assert!(seen.0 && seen.1, "both operands should be reachable");
    }

    #[test]
    fn div_same_unit_is_dimensionless() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let m = u([1, 0, 0, 0, 0, 0, 0]);
        assert_eq!(
            propagate_binary(OpKind::Div, m, m, &mut rng),
            (UnitVector::dimensionless(), false)
        );
    }

    #[test]
    fn unary_examples() {
        assert_eq!(
            propagate_unary(OpKind::Log, u([1, 2, 0, 0, 0, 0, 0])),
            (UnitVector::dimensionless(), true)
        );
        assert_eq!(
            propagate_unary(OpKind::Sqrt, u([1, 0, -2, 0, 0, 0, 0])),
            (
                UnitVector::Known([r(1, 2), r(0, 1), r(-1, 1), r(0, 1), r(0, 1), r(0, 1), r(0, 1)]),
                false
            )
        );
        assert_eq!(
            propagate_unary(OpKind::Sin, UnitVector::Joker),
            (UnitVector::dimensionless(), false)
        );
        assert_eq!(
            propagate_unary(OpKind::FixedPow(3), u([1, 0, 0, 0, 0, 0, 0])),
            (u([3, 0, 0, 0, 0, 0, 0]), false)
        );
    }

    #[test]
    fn nested_sqrt_gives_quarters() {
        let (half, _) = propagate_unary(OpKind::Sqrt, u([1, 0, 0, 0, 0, 0, 0]));
        let (quarter, _) = propagate_unary(OpKind::Sqrt, half);
        assert_eq!(quarter.to_string(), "m^1/4");
    }

    #[test]
    #[should_panic(expected = "unary")]
    fn binary_rule_rejects_unary_op() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        propagate_binary(OpKind::Log, UnitVector::Joker, UnitVector::Joker, &mut rng);
    }

    #[test]
    #[should_panic(expected = "binary")]
    fn unary_rule_rejects_binary_op() {
        propagate_unary(OpKind::Mul, UnitVector::Joker);
    }

    #[test]
    fn manhattan_examples() {
        let a = u([1, 0, 0, 0, 0, 0, 0]);
        let b = u([1, 0, -1, 0, 0, 0, 0]);
        assert_eq!(manhattan_distance(&a, &b), r(1, 1));
        assert_eq!(manhattan_distance(&UnitVector::Joker, &u([1, 1, -2, 0, 0, 0, 0])), r(0, 1));
        assert_eq!(manhattan_distance(&b, &b), r(0, 1));
    }

    #[test]
    fn joker_is_not_dimensionless() {
        assert_ne!(UnitVector::Joker, UnitVector::dimensionless());
        assert!(!UnitVector::Joker.is_dimensionless());
    }

    #[test]
    fn text_format() {
        assert_eq!("m^1 kg^1 s^-2".parse::<UnitVector>().unwrap(), u([1, 1, -2, 0, 0, 0, 0]));
        assert_eq!("m s^-1".parse::<UnitVector>().unwrap(), u([1, 0, -1, 0, 0, 0, 0]));
        assert_eq!("".parse::<UnitVector>().unwrap(), UnitVector::dimensionless());
        assert_eq!("*".parse::<UnitVector>().unwrap(), UnitVector::Joker);
        assert_eq!(u([1, 1, -2, 0, 0, 0, 0]).to_string(), "m kg s^-2");
        assert_eq!(UnitVector::dimensionless().to_string(), "");
        assert!("m^x".parse::<UnitVector>().is_err());
        assert!("furlong".parse::<UnitVector>().is_err());
        assert!("m^1/0".parse::<UnitVector>().is_err());
    }

    #[test]
    fn op_symbols_round_trip() {
        for op in [
            OpKind::Add,
            OpKind::Sub,
            OpKind::Mul,
            OpKind::Div,
            OpKind::Exp,
            OpKind::Log,
            OpKind::Sin,
            OpKind::Cos,
            OpKind::Tan,
            OpKind::Sqrt,
            OpKind::FixedPow(2),
            OpKind::FixedPow(7),
            OpKind::BinaryPow,
        ] {
            assert_eq!(OpKind::from_symbol(&op.symbol()), Some(op));
        }
        assert_eq!(OpKind::from_symbol("pow1"), None);
    }

    fn arb_rational() -> impl Strategy<Value = Rational64> {
        (-6i64..=6, prop::sample::select(vec![1i64, 2, 3, 4])).prop_map(|(n, d)| Rational64::new(n, d))
    }

    fn arb_known() -> impl Strategy<Value = UnitVector> {
        prop::array::uniform7(arb_rational()).prop_map(UnitVector::Known)
    }

    fn arb_unit() -> impl Strategy<Value = UnitVector> {
        prop_oneof![4 => arb_known(), 1 => Just(UnitVector::Joker)]
    }

    proptest! {
        #[test]
        fn mul_then_div_round_trips(a in arb_known(), b in arb_known()) {
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            let (prod, v1) = propagate_binary(OpKind::Mul, a, b, &mut rng);
            let (back, v2) = propagate_binary(OpKind::Div, prod, b, &mut rng);
            prop_assert!(!v1 && !v2);
            prop_assert_eq!(back, a);
        }

        #[test]
        fn add_and_sub_agree(a in arb_unit(), b in arb_unit(), seed in any::<u64>()) {
            let add = propagate_binary(OpKind::Add, a, b, &mut ChaCha8Rng::seed_from_u64(seed));
            let sub = propagate_binary(OpKind::Sub, a, b, &mut ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(add, sub);
        }

        #[test]
        fn manhattan_metric(a in arb_known(), b in arb_known(), c in arb_known()) {
            prop_assert_eq!(manhattan_distance(&a, &b), manhattan_distance(&b, &a));
            prop_assert!(
                manhattan_distance(&a, &c) <= manhattan_distance(&a, &b) + manhattan_distance(&b, &c)
            );
        }

        #[test]
        fn text_round_trip(a in arb_unit()) {
            prop_assert_eq!(a.to_string().parse::<UnitVector>().unwrap(), a);
        }
    }
}
