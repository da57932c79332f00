//! Fixtures shared by the benchmarks.

use quasikernel_core::surface::{elaborate_items, parse_items, ElabEnv};

pub const LIST: &str = include_str!("../../../corpus/list.qk");
pub const MIXED: &str = include_str!("../../../corpus/mixed.qk");
pub const STREAMS: &str = include_str!("../../../corpus/streams.qk");

pub fn load(src: &str) -> ElabEnv {
    elaborate_items(&parse_items(src).expect("corpus parses")).expect("corpus elaborates")
}

/// `[0, 1, ..., n - 1]` in surface syntax.
pub fn list_literal(n: usize) -> String {
    let xs: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    format!("[{}]", xs.join(", "))
}

/// The `k`-th element of the stream of naturals, as an expression.
pub fn stream_at(k: usize) -> String {
    let mut e = "unfold[Stream] (\\n -> (n, succ n)) 0".to_string();
    for _ in 0..k {
        e = format!("tl ({e})");
    }
    format!("hd ({e})")
}

#[cfg(test)]
mod tests {
    use super::*;
    use quasikernel_core::Fuel;

    #[test]
    fn fixtures_evaluate() {
        let list = load(LIST);
        let v = list.eval_str(&format!("sum {}", list_literal(10)), &mut Fuel::new(1_000_000)).unwrap();
        assert_eq!(v.as_u64(), Some(45));
        let streams = load(STREAMS);
        let v = streams.eval_str(&stream_at(7), &mut Fuel::new(1_000_000)).unwrap();
        assert_eq!(v.as_u64(), Some(7));
        load(MIXED);
    }
}
