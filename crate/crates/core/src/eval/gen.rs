use super::config::EvalConfig;
use super::rng::SplitMix64;
use super::value::{Assignment, Value};
use crate::dsl::{Signature, Type};

/// Random assignment for the parameters of `sig` (plus `retval` when `need_retval` and
/// the method is non-void). A pure function of its arguments.
///
/// Variables are drawn in declaration order, `retval` last. Integers are uniform on
/// `int_range` (clipped to the `short` range for `short`), reals uniform on `real_range`.
/// Each array, at every nesting level, is null with `null_probability`; otherwise its
/// length is uniform on `[0, max_array_len]` and its elements are drawn recursively, so
/// inner arrays may differ in length.
pub fn gen_assignment(sig: &Signature, need_retval: bool, cfg: &EvalConfig, seed: u64) -> Assignment {
    let mut rng = SplitMix64::new(seed);
    let mut a = Assignment::new();
    for (name, ty) in sig.variables(need_retval) {
        let v = gen_value(&ty, cfg, &mut rng);
        a.insert(name, v);
    }
    a
}

pub fn gen_value(ty: &Type, cfg: &EvalConfig, rng: &mut SplitMix64) -> Value {
    match ty {
        Type::Int | Type::Long => Value::Int(rng.int_in(cfg.int_range.0, cfg.int_range.1)),
        Type::Short => {
            let lo = cfg.int_range.0.clamp(i16::MIN as i64, i16::MAX as i64);
            let hi = cfg.int_range.1.clamp(i16::MIN as i64, i16::MAX as i64);
            Value::Int(rng.int_in(lo, hi))
        }
        Type::Float | Type::Double => Value::Real(rng.real_in(cfg.real_range.0, cfg.real_range.1)),
        Type::Bool => Value::Bool(rng.coin()),
        Type::Array(elem) => {
            if rng.chance(cfg.null_probability) {
                return Value::Null;
            }
            let len = rng.int_in(0, cfg.max_array_len as i64) as usize;
            Value::Array((0..len).map(|_| gen_value(elem, cfg, rng)).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;

    fn get_max() -> Signature {
        parse("method getMax(a: int[]) -> int;").unwrap().signature
    }

    #[test]
    fn deterministic_per_seed() {
        let sig = parse("method f(a: double[][], x: short, b: bool) -> long;").unwrap().signature;
        let cfg = EvalConfig::default();
        for seed in 0..50 {
            let a1 = gen_assignment(&sig, true, &cfg, seed);
            assert_eq!(a1, gen_assignment(&sig, true, &cfg, seed));
            a1.check_shape(&sig.variables(true)).unwrap();
        }
        assert_ne!(gen_assignment(&sig, true, &cfg, 1), gen_assignment(&sig, true, &cfg, 2));
    }

    #[test]
    fn zero_length_no_null_gives_empty_arrays() {
        let cfg = EvalConfig { max_array_len: 0, null_probability: 0.0, ..Default::default() };
        for seed in 0..20 {
            assert_eq!(gen_assignment(&get_max(), false, &cfg, seed).get("a"), Some(&Value::Array(vec![])));
        }
    }

    #[test]
    fn certain_null() {
        let cfg = EvalConfig { null_probability: 1.0, ..Default::default() };
        let a = gen_assignment(&get_max(), true, &cfg, 9);
        assert_eq!(a.get("a"), Some(&Value::Null));
        assert!(matches!(a.get("retval"), Some(Value::Int(_))));
    }

    #[test]
    fn retval_only_when_requested() {
        let cfg = EvalConfig::default();
        assert!(gen_assignment(&get_max(), false, &cfg, 1).get("retval").is_none());
        let void = parse("method f(x: int) -> void;").unwrap().signature;
        assert!(gen_assignment(&void, true, &cfg, 1).get("retval").is_none());
    }

    #[test]
    fn jagged_inner_arrays_occur() {
        let sig = parse("method f(a: int[][]) -> void;").unwrap().signature;
        let cfg = EvalConfig { null_probability: 0.0, ..Default::default() };
        let jagged = (0..200).any(|seed| match gen_assignment(&sig, false, &cfg, seed).get("a") {
            Some(Value::Array(rows)) => rows
                .windows(2)
                .any(|w| matches!((&w[0], &w[1]), (Value::Array(x), Value::Array(y)) if x.len() != y.len())),
            _ => false,
        });
        assert!(jagged);
    }
}
