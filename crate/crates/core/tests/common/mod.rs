//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use digitprod::FactoredRational;
use num_traits::ToPrimitive;

/// `t_n` from `t_0 = 0, t_{2n} = t_n, t_{2n+1} = 1 − t_n`, tabulated.
pub fn thue_morse_table(len: usize) -> Vec<u8> {
    let mut t = vec![0u8; len];
    for n in 1..len {
        t[n] = if n % 2 == 0 { t[n / 2] } else { 1 - t[n / 2] };
    }
    t
}

/// `v_n` from `v_0 = 0, v_{2n} = v_n, v_{4n+1} = v_n, v_{4n+3} = 1 − v_{2n+1}`.
pub fn rudin_shapiro_table(len: usize) -> Vec<u8> {
    let mut v = vec![0u8; len];
    for n in 1..len {
        v[n] = match n % 4 {
            0 | 2 => v[n / 2],
            1 => v[n / 4],
            _ => 1 - v[n / 2],
        };
    }
    v
}

/// Overlapping occurrences of `word` in the base-`base` expansion of `n`,
/// counted on the rendered digit string.
pub fn block_count(word: &str, base: u32, mut n: u64) -> usize {
    let mut s = Vec::new();
    while n > 0 {
        s.push(std::char::from_digit((n % u64::from(base)) as u32, base).unwrap());
        n /= u64::from(base);
    }
    let s: String = s.into_iter().rev().collect();
    (0..s.len()).filter(|&i| s[i..].starts_with(word)).count()
}

/// `R(n)` in double precision, straight from the factor list.
pub fn r_f64(r: &FactoredRational, n: u64) -> f64 {
    let mut v = r.scale().to_f64().unwrap();
    for f in r.factors() {
        v *= (n as f64 + f.offset.to_f64().unwrap()).powi(f.multiplicity as i32);
    }
    v
}

/// `Π_{start ≤ n ≤ last} R(n)^{sign(n)}` by direct log summation in `f64`.
pub fn naive_product(r: &FactoredRational, start: u64, last: u64, sign: impl Fn(u64) -> f64) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for n in start..=last {
        let x = sign(n) * r_f64(r, n).ln();
        let t = sum + x;
        carry += if f64::abs(sum) >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
    }
    (sum + carry).exp()
}

pub fn pm_thue(n: u64) -> f64 {
    if n.count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn pm_rs(n: u64) -> f64 {
    if (n & (n >> 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}
