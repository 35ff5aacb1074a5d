//! Closed-walk counts on infinite trees and cycle cacti.
//!
//! For `m = 2` the walks live on a tree whose root has `d` neighbours and
//! every other node `branching` children. For `m = 3` they live on the cactus
//! of directed 3-cycles: the root lies on `d` cycles, every other node on its
//! parent cycle plus `branching` further ones.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::moments::binomial;
use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Largest `l` accepted by [`brute_force_tree_walks`].
pub const MAX_WALK_HALF_LENGTH: usize = 4;

fn check_kind(m: usize, l: usize) -> Result<()> {
    if m != 2 && m != 3 {
        return Err(Error::input(format!("walk kind must be 2 or 3, got {m}")));
    }
    if l == 0 {
        return Err(Error::input("walk order l must be >= 1"));
    }
    Ok(())
}

/// `A(l) = (d / l) sum_{j=0}^{l-1} C(m l, j) (l - j) (d_hat - 1)^j`.
///
/// With `d = d_hat = branching + 1` this equals [`brute_force_tree_walks`].
pub fn tree_walk_prediction<T: Scalar>(m: usize, l: usize, d: T, d_hat: T) -> Result<T> {
    check_kind(m, l)?;
    let (ml, l64) = ((m * l) as u64, l as u64);
    let exact = |x: T| BigRational::from_float(x.to_f64().unwrap_or(f64::NAN));
    match (exact(d), exact(d_hat)) {
        (Some(d), Some(dh)) => {
            let base = dh - BigRational::from_integer(1.into());
            let mut sum = BigRational::zero();
            let mut pow = BigRational::from_integer(1.into());
            for j in 0..l64 {
                let c = BigInt::from(binomial(ml, j)) * BigInt::from(l64 - j);
                sum += BigRational::from_integer(c) * &pow;
                pow *= &base;
            }
            let a = d * sum / BigRational::from_integer(BigInt::from(l64));
            Ok(lit(a.to_f64().unwrap_or(f64::NAN)))
        }
        _ => Err(Error::input("d and d_hat must be finite")),
    }
}

/// Exact count of closed walks of length `m l` from the root.
///
/// Walks are enumerated by position: the state is the stack of offsets along
/// the path from the root, and walks that differ only in which of the
/// equivalent child edges they take are counted with their multiplicity.
pub fn brute_force_tree_walks(m: usize, l: usize, d: u64, branching: u64) -> Result<BigUint> {
    check_kind(m, l)?;
    if l > MAX_WALK_HALF_LENGTH {
        return Err(Error::ComplexityGuard(format!(
            "walk enumeration limited to l <= {MAX_WALK_HALF_LENGTH}, got {l}"
        )));
    }
    let steps = m * l;
    let mut states: HashMap<Vec<u8>, BigUint> = HashMap::from([(Vec::new(), BigUint::from(1u32))]);
    for _ in 0..steps {
        let mut next: HashMap<Vec<u8>, BigUint> = HashMap::new();
        for (stack, count) in states {
            let children = if stack.is_empty() { d } else { branching };
            let mut push = |s: Vec<u8>, mult: u64| {
                if mult > 0 {
                    *next.entry(s).or_default() += &count * BigUint::from(mult);
                }
            };
            if m == 2 {
                if !stack.is_empty() {
                    push(stack[..stack.len() - 1].to_vec(), 1);
                }
                let mut down = stack.clone();
                down.push(1);
                push(down, children);
            } else {
                // move along the parent cycle: offset 1 -> 2 -> back to parent
                if let Some(&top) = stack.last() {
                    let mut s = stack[..stack.len() - 1].to_vec();
                    if top == 1 {
                        s.push(2);
                    }
                    push(s, 1);
                }
                let mut down = stack.clone();
                down.push(1);
                push(down, children);
            }
        }
        states = next;
    }
    Ok(states.remove(&Vec::new()).unwrap_or_default())
}
