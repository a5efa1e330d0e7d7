/// Physicists' Hermite polynomial `H_order(x)` via
/// `H_{a+1} = 2x H_a - 2a H_{a-1}`.
pub fn hermite(order: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if order == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for a in 1..order {
        let next = 2.0 * x * cur - 2.0 * a as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `order! * 2^order`.
pub(crate) fn hermite_norm(order: usize) -> f64 {
    (1..=order).fold(1.0, |acc, a| acc * 2.0 * a as f64)
}
