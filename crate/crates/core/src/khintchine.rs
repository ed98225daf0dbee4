//! The Khintchine constant `K(a) = E|theta . a|` over uniform signs, and the
//! polytope of two-signal signatures whose linear optimization computes it.
//!
//! The setting: `n` i.i.d. actions with types `-1` and `+1`, each with
//! probability 1/2, and schemes with two signals `+` and `-` each sent with
//! probability 1/2. Maximizing
//! `sum_i a_i (M+_{i,+1} - M+_{i,-1}) - sum_i a_i (M-_{i,+1} - M-_{i,-1})`
//! over that polytope gives exactly `K(a)`.
//!
//! The LP uses the extended formulation: one variable `p_theta =
//! phi(theta, +)` per sign vector (so `phi(theta, -) = 1 - p_theta` and
//! rows are stochastic by construction) plus the signature entries, tied to
//! `p` by equalities.

use alloc::vec;
use alloc::vec::Vec;

use crate::lp::{self, LinearProgram, LpStatus, Relation};
use crate::num::{abs, powi};
use crate::{Error, Result};

pub const BRUTE_FORCE_MAX: usize = 20;
pub const LP_MAX: usize = 12;

/// Column 0 is type `-1`, column 1 is type `+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSignalSignature {
    pub m_plus: Vec<[f64; 2]>,
    pub m_minus: Vec<[f64; 2]>,
}

impl TwoSignalSignature {
    pub fn actions(&self) -> usize {
        self.m_plus.len()
    }

    /// `M+_{i,+1} = x_i`, `M+_{i,-1} = 1/2 - x_i`, `M- = 1/2 - M+`.
    pub fn from_plus_mass(x: &[f64]) -> Self {
        let m_plus: Vec<[f64; 2]> = x.iter().map(|&v| [0.5 - v, v]).collect();
        let m_minus = m_plus.iter().map(|r| [0.5 - r[0], 0.5 - r[1]]).collect();
        Self { m_plus, m_minus }
    }

    /// Largest deviation of `M+ + M-` from the all-1/2 matrix.
    pub fn prior_error(&self) -> f64 {
        self.m_plus
            .iter()
            .zip(&self.m_minus)
            .flat_map(|(p, m)| [abs(p[0] + m[0] - 0.5), abs(p[1] + m[1] - 0.5)])
            .fold(0.0, f64::max)
    }

    /// Largest deviation of a row of `M+` from summing to 1/2.
    pub fn half_error(&self) -> f64 {
        self.m_plus.iter().map(|p| abs(p[0] + p[1] - 0.5)).fold(0.0, f64::max)
    }

    pub fn objective(&self, a: &[f64]) -> f64 {
        a.iter()
            .zip(self.m_plus.iter().zip(&self.m_minus))
            .map(|(ai, (p, m))| ai * (p[1] - p[0]) - ai * (m[1] - m[0]))
            .sum()
    }
}

/// Sign vector number `code`: bit `i` set means `theta_i = +1`.
fn sign(code: usize, i: usize) -> f64 {
    if code >> i & 1 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// `(1 / 2^n) sum_theta |theta . a|` by enumeration.
pub fn khintchine_constant(a: &[f64]) -> Result<f64> {
    let n = a.len();
    if n > BRUTE_FORCE_MAX {
        return Err(Error::TooLarge {
            what: "Khintchine brute-force dimension",
            size: n as u128,
            cap: BRUTE_FORCE_MAX as u128,
        });
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("a must be finite".into()));
    }
    let total: f64 = (0..1usize << n)
        .map(|code| abs((0..n).map(|i| sign(code, i) * a[i]).sum::<f64>()))
        .sum();
    Ok(total / (1usize << n) as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KhintchineSolution {
    pub value: f64,
    pub signature: TwoSignalSignature,
    /// `plus[code]` is the probability of signal `+` at sign vector `code`.
    pub plus: Vec<f64>,
}

impl KhintchineSolution {
    /// Probability the witness scheme sends `+`.
    pub fn plus_probability(&self) -> f64 {
        self.plus.iter().sum::<f64>() / self.plus.len() as f64
    }
}

struct Formulation {
    prog: LinearProgram,
    /// variable of `M+_{i,t}` and `M-_{i,t}`
    mp: Vec<[usize; 2]>,
    mm: Vec<[usize; 2]>,
}

/// Realizable two-signal signatures over `n` actions.
fn formulation(n: usize) -> Formulation {
    let states = 1usize << n;
    let w = 1.0 / states as f64;
    let base = states;
    let mp: Vec<[usize; 2]> = (0..n).map(|i| [base + 4 * i, base + 4 * i + 1]).collect();
    let mm: Vec<[usize; 2]> = (0..n).map(|i| [base + 4 * i + 2, base + 4 * i + 3]).collect();
    let mut prog = LinearProgram::new(states + 4 * n);
    for code in 0..states {
        prog.set_bounds(code, 0.0, 1.0);
    }
    for i in 0..n {
        for t in 0..2 {
            let members: Vec<usize> = (0..states).filter(|&c| (sign(c, i) > 0.0) == (t == 1)).collect();
            // M+_{i,t} = sum_{theta_i = t} w p_theta
            let mut row: Vec<(usize, f64)> = members.iter().map(|&c| (c, w)).collect();
            row.push((mp[i][t], -1.0));
            prog.add_constraint(row, Relation::Eq, 0.0);
            // M-_{i,t} = sum_{theta_i = t} w (1 - p_theta)
            let mut row: Vec<(usize, f64)> = members.iter().map(|&c| (c, w)).collect();
            row.push((mm[i][t], 1.0));
            prog.add_constraint(row, Relation::Eq, w * members.len() as f64);
        }
    }
    Formulation { prog, mp, mm }
}

/// Maximizes the Khintchine objective over the polytope.
pub fn solve_khintchine_lp(a: &[f64]) -> Result<KhintchineSolution> {
    let n = a.len();
    if n > LP_MAX {
        return Err(Error::TooLarge {
            what: "Khintchine LP dimension",
            size: n as u128,
            cap: LP_MAX as u128,
        });
    }
    if n == 0 {
        return Err(Error::InvalidArgument("a must be nonempty".into()));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("a must be finite".into()));
    }
    let Formulation { mut prog, mp, mm } = formulation(n);
    for i in 0..n {
        prog.add_constraint(vec![(mp[i][0], 1.0), (mp[i][1], 1.0)], Relation::Eq, 0.5);
        prog.set_objective(mp[i][1], a[i]);
        prog.set_objective(mp[i][0], -a[i]);
        prog.set_objective(mm[i][1], -a[i]);
        prog.set_objective(mm[i][0], a[i]);
    }
    let (value, x) = lp::solve(&prog)?.into_optimal("Khintchine LP")?;
    let states = 1usize << n;
    let read = |v: &[[usize; 2]]| v.iter().map(|r| [x[r[0]], x[r[1]]]).collect();
    Ok(KhintchineSolution {
        value,
        signature: TwoSignalSignature {
            m_plus: read(&mp),
            m_minus: read(&mm),
        },
        plus: x[..states].to_vec(),
    })
}

/// Whether some two-signal scheme has this signature.
pub fn realizable_two_signal(sig: &TwoSignalSignature) -> Result<bool> {
    let n = sig.actions();
    if sig.m_minus.len() != n {
        return Err(Error::DimensionMismatch {
            axis: "M- rows",
            expected: n,
            found: sig.m_minus.len(),
        });
    }
    if n > LP_MAX {
        return Err(Error::TooLarge {
            what: "Khintchine LP dimension",
            size: n as u128,
            cap: LP_MAX as u128,
        });
    }
    let Formulation { mut prog, mp, mm } = formulation(n);
    for i in 0..n {
        for t in 0..2 {
            prog.set_bounds(mp[i][t], sig.m_plus[i][t], sig.m_plus[i][t]);
            prog.set_bounds(mm[i][t], sig.m_minus[i][t], sig.m_minus[i][t]);
        }
    }
    match lp::solve(&prog)?.status {
        LpStatus::Optimal => Ok(true),
        LpStatus::Infeasible => Ok(false),
        s => Err(Error::lp(s, "two-signal realizability LP")),
    }
}

/// Membership in the Khintchine polytope: realizable, and each signal sent
/// with probability exactly 1/2.
pub fn membership_check(sig: &TwoSignalSignature) -> Result<bool> {
    if sig.half_error() > 1e-9 {
        return Ok(false);
    }
    realizable_two_signal(sig)
}

/// `c a`, componentwise.
pub fn scaled(a: &[f64], c: f64) -> Vec<f64> {
    a.iter().map(|v| c * v).collect()
}

/// `2^-n`, the probability of each sign vector.
pub fn state_weight(n: usize) -> f64 {
    powi(0.5, n)
}
