//! Direct evaluation of scLTL on finite traces.
//!
//! Satisfaction at position `i` of a trace of length `n`, for `0 ≤ i ≤ n`:
//! literals need `i < n`; `X φ` needs `i + 1 < n` (next beyond the end is
//! false); `φ U ψ` needs a witness `k` with `i ≤ k < n`. `true` holds
//! everywhere, including the empty suffix. Every operator is positive, so
//! satisfaction is preserved by extending the trace and "some prefix
//! satisfies φ" coincides with "the trace satisfies φ".

use super::formula::Formula;
use super::Valuation;

/// Satisfaction vector over positions `0..=n`.
fn sat<V: Valuation>(f: &Formula, trace: &[V]) -> Vec<bool> {
    let n = trace.len();
    match f {
        Formula::True => vec![true; n + 1],
        Formula::False => vec![false; n + 1],
        Formula::Atom(o) => {
            let mut v: Vec<bool> = trace.iter().map(|s| s.holds(o)).collect();
            v.push(false);
            v
        }
        Formula::NotAtom(o) => {
            let mut v: Vec<bool> = trace.iter().map(|s| !s.holds(o)).collect();
            v.push(false);
            v
        }
        Formula::And(a, b) => {
            let (a, b) = (sat(a, trace), sat(b, trace));
            a.iter().zip(&b).map(|(x, y)| *x && *y).collect()
        }
        Formula::Or(a, b) => {
            let (a, b) = (sat(a, trace), sat(b, trace));
            a.iter().zip(&b).map(|(x, y)| *x || *y).collect()
        }
        Formula::Next(a) => {
            let a = sat(a, trace);
            (0..=n).map(|i| i + 1 < n && a[i + 1]).collect()
        }
        Formula::Until(a, b) => {
            let (a, b) = (sat(a, trace), sat(b, trace));
            let mut v = vec![false; n + 1];
            for i in (0..n).rev() {
                v[i] = b[i] || (a[i] && v[i + 1]);
            }
            v
        }
    }
}

/// Whether some prefix of `trace` satisfies `f`.
pub fn eval_trace<V: Valuation>(f: &Formula, trace: &[V]) -> bool {
    sat(f, trace)[0]
}

/// Smallest `K` such that `trace[..=K]` satisfies `f`, if any.
pub fn first_sat_prefix<V: Valuation>(f: &Formula, trace: &[V]) -> Option<usize> {
    if !eval_trace(f, trace) {
        return None;
    }
    (0..trace.len()).find(|&k| eval_trace(f, &trace[..=k]))
}
