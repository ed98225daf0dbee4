//! Enumeration of type profiles `theta in [m_1] x ... x [m_n]`.
//!
//! Profiles are ordered like an odometer with the last action varying
//! fastest, so profile index `k` is the mixed-radix number with digits
//! `theta_1 .. theta_n`.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Default ceiling on the number of profiles any routine will materialize.
pub const DEFAULT_STATE_CAP: usize = 200_000;

/// Product of the radices, or `TooLarge` if it exceeds `cap`.
pub fn profile_count(radices: &[usize], cap: usize) -> Result<usize> {
    let size = radices.iter().fold(1u128, |a, &m| a.saturating_mul(m as u128));
    if size > cap as u128 {
        return Err(Error::TooLarge {
            what: "type profiles",
            size,
            cap: cap as u128,
        });
    }
    Ok(size as usize)
}

/// Iterates over all profiles in odometer order.
#[derive(Debug, Clone)]
pub struct Profiles {
    radices: Vec<usize>,
    current: Vec<usize>,
    done: bool,
}

impl Profiles {
    pub fn new(radices: &[usize]) -> Self {
        Self {
            radices: radices.to_vec(),
            current: vec![0; radices.len()],
            done: radices.contains(&0),
        }
    }

    /// `n` actions with `m` types each.
    pub fn uniform(n: usize, m: usize) -> Self {
        Self::new(&vec![m; n])
    }
}

impl Iterator for Profiles {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let mut i = self.radices.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.current[i] += 1;
            if self.current[i] < self.radices[i] {
                break;
            }
            self.current[i] = 0;
        }
        Some(out)
    }
}

pub fn profile_index(radices: &[usize], profile: &[usize]) -> usize {
    profile
        .iter()
        .zip(radices)
        .fold(0, |acc, (&t, &m)| acc * m + t)
}

pub fn profile_at(radices: &[usize], mut index: usize) -> Vec<usize> {
    let mut out = vec![0; radices.len()];
    for i in (0..radices.len()).rev() {
        out[i] = index % radices[i];
        index /= radices[i];
    }
    out
}

/// Probability of a profile under independent marginals.
pub fn profile_prob(marginals: &[&[f64]], profile: &[usize]) -> f64 {
    profile.iter().zip(marginals).map(|(&t, q)| q[t]).product()
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
    out
}
