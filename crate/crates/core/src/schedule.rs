//! Weakness, perturbation and error sequences.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which indices an indicator sequence is switched on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Subsequence {
    Explicit { indices: Vec<usize> },
    /// `start, start + step, start + 2 step, ...`
    Arithmetic { start: usize, step: usize },
}

impl Subsequence {
    pub fn contains(&self, n: usize) -> bool {
        match self {
            Subsequence::Explicit { indices } => indices.contains(&n),
            Subsequence::Arithmetic { start, step } => n >= *start && (n - start) % step == 0,
        }
    }

    /// Members up to and including `horizon`.
    pub fn members(&self, horizon: usize) -> Vec<usize> {
        match self {
            Subsequence::Explicit { indices } => {
                let mut v: Vec<usize> = indices.iter().copied().filter(|&i| i <= horizon).collect();
                v.sort_unstable();
                v.dedup();
                v
            }
            Subsequence::Arithmetic { start, step } => (*start..=horizon).step_by(*step).collect(),
        }
    }

    fn is_finite(&self) -> bool {
        matches!(self, Subsequence::Explicit { .. })
    }

    fn last(&self) -> Option<usize> {
        match self {
            Subsequence::Explicit { indices } => indices.iter().copied().max(),
            Subsequence::Arithmetic { .. } => None,
        }
    }
}

/// A non-negative sequence `n -> s_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SeqSpec {
    Constant { value: f64 },
    /// `c n^{-a}`, with `c` at `n = 0`.
    PowerDecay { c: f64, a: f64 },
    /// `values[n - start]` on `start..start + len`, `tail` elsewhere.
    Explicit {
        values: Vec<f64>,
        #[serde(default = "one")]
        start: usize,
        #[serde(default)]
        tail: f64,
    },
    /// `on` for `n` in the subsequence, `off` otherwise.
    Indicator { on: f64, off: f64, subsequence: Subsequence },
}

fn one() -> usize {
    1
}

impl SeqSpec {
    pub fn zero() -> Self {
        SeqSpec::Constant { value: 0.0 }
    }

    pub fn constant(value: f64) -> Self {
        SeqSpec::Constant { value }
    }

    pub fn power(c: f64, a: f64) -> Self {
        SeqSpec::PowerDecay { c, a }
    }

    pub fn eval(&self, n: usize) -> f64 {
        match self {
            SeqSpec::Constant { value } => *value,
            SeqSpec::PowerDecay { c, a } => {
                if n == 0 {
                    *c
                } else {
                    c * (n as f64).powf(-a)
                }
            }
            SeqSpec::Explicit { values, start, tail } => {
                if n >= *start && n - start < values.len() {
                    values[n - start]
                } else {
                    *tail
                }
            }
            SeqSpec::Indicator { on, off, subsequence } => {
                if subsequence.contains(n) {
                    *on
                } else {
                    *off
                }
            }
        }
    }

    /// `sup_{n >= from} s_n`; infinite when unbounded.
    pub fn sup(&self, from: usize) -> f64 {
        match self {
            SeqSpec::Constant { value } => *value,
            SeqSpec::PowerDecay { c, a } => {
                if *c == 0.0 {
                    0.0
                } else if *a < 0.0 {
                    f64::INFINITY
                } else {
                    self.eval(from)
                }
            }
            SeqSpec::Explicit { values, start, tail } => {
                let mut m = *tail;
                for (i, v) in values.iter().enumerate() {
                    if start + i >= from {
                        m = m.max(*v);
                    }
                }
                m
            }
            SeqSpec::Indicator { on, off, subsequence } => {
                let hit = match subsequence.last() {
                    Some(l) => l >= from,
                    None => true,
                };
                if hit {
                    on.max(*off)
                } else {
                    *off
                }
            }
        }
    }

    /// Certified upper bound on `sum_{n > horizon} s_n^power`, or `None` when the tail diverges.
    pub fn power_tail_bound(&self, power: f64, horizon: usize) -> Option<f64> {
        match self {
            SeqSpec::Constant { value } => (*value == 0.0).then_some(0.0),
            SeqSpec::PowerDecay { c, a } => {
                if *c == 0.0 {
                    return Some(0.0);
                }
                let e = a * power;
                if e <= 1.0 {
                    return None;
                }
                // sum_{n > H} n^{-e} <= int_H^inf x^{-e} dx
                let h = horizon.max(1) as f64;
                Some(c.powf(power) * h.powf(1.0 - e) / (e - 1.0))
            }
            SeqSpec::Explicit { values, start, tail } => {
                if *tail != 0.0 {
                    return None;
                }
                Some(
                    values
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| start + i > horizon)
                        .map(|(_, v)| v.powf(power))
                        .sum(),
                )
            }
            SeqSpec::Indicator { on, off, subsequence } => {
                if *off != 0.0 {
                    return None;
                }
                if *on == 0.0 {
                    return Some(0.0);
                }
                if !subsequence.is_finite() {
                    return None;
                }
                let count = match subsequence {
                    Subsequence::Explicit { indices } => {
                        let mut v: Vec<usize> = indices.iter().copied().filter(|&i| i > horizon).collect();
                        v.sort_unstable();
                        v.dedup();
                        v.len()
                    }
                    Subsequence::Arithmetic { .. } => unreachable!(),
                };
                Some(count as f64 * on.powf(power))
            }
        }
    }

    /// Whether `s_n -> 0` (decided from the generator family).
    pub fn tends_to_zero(&self) -> bool {
        match self {
            SeqSpec::Constant { value } => *value == 0.0,
            SeqSpec::PowerDecay { c, a } => *c == 0.0 || *a > 0.0,
            SeqSpec::Explicit { tail, .. } => *tail == 0.0,
            SeqSpec::Indicator { on, off, subsequence } => *off == 0.0 && (*on == 0.0 || subsequence.is_finite()),
        }
    }

    pub fn is_identically_zero(&self) -> bool {
        match self {
            SeqSpec::Constant { value } => *value == 0.0,
            SeqSpec::PowerDecay { c, .. } => *c == 0.0,
            SeqSpec::Explicit { values, tail, .. } => *tail == 0.0 && values.iter().all(|v| *v == 0.0),
            SeqSpec::Indicator { on, off, .. } => *on == 0.0 && *off == 0.0,
        }
    }

    /// Checks `s_n >= 0` (and `s_n <= upper` when given) on the generator's parameters.
    pub fn validate(&self, name: &str, upper: Option<f64>) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSequence(format!("{name}: {msg}")));
        let check = |v: f64, what: &str| -> Result<()> {
            if !v.is_finite() || v < 0.0 {
                return bad(format!("{what} = {v} must be finite and non-negative"));
            }
            if let Some(u) = upper {
                if v > u {
                    return bad(format!("{what} = {v} exceeds {u}"));
                }
            }
            Ok(())
        };
        match self {
            SeqSpec::Constant { value } => check(*value, "value"),
            SeqSpec::PowerDecay { c, a } => {
                check(*c, "c")?;
                if !a.is_finite() {
                    return bad(format!("exponent a = {a} must be finite"));
                }
                if *a < 0.0 && upper.is_some() && *c > 0.0 {
                    return bad("growing sequence exceeds its upper bound".into());
                }
                Ok(())
            }
            SeqSpec::Explicit { values, tail, .. } => {
                for v in values {
                    check(*v, "entry")?;
                }
                check(*tail, "tail")
            }
            SeqSpec::Indicator { on, off, subsequence } => {
                check(*on, "on")?;
                check(*off, "off")?;
                if let Subsequence::Arithmetic { step: 0, .. } = subsequence {
                    return bad("arithmetic step must be positive".into());
                }
                Ok(())
            }
        }
    }
}

/// The six sequences of the algorithm: `t_n, t'_n` and `eta_n, eta'_n` from `n = 1`,
/// `delta_n, delta'_n` from `n = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Schedules {
    pub t: SeqSpec,
    pub t_prime: SeqSpec,
    pub delta: SeqSpec,
    pub delta_prime: SeqSpec,
    pub eta: SeqSpec,
    pub eta_prime: SeqSpec,
}

impl Default for Schedules {
    fn default() -> Self {
        Schedules::wcga(SeqSpec::constant(1.0))
    }
}

/// Values of every sequence relevant to step `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepParams {
    pub t: f64,
    pub t_prime: f64,
    /// `delta_{n-1}`
    pub delta: f64,
    /// `delta'_{n-1}`
    pub delta_prime: f64,
    pub eta: f64,
    pub eta_prime: f64,
}

impl Schedules {
    /// Zero slack with weakness `t`.
    pub fn wcga(t: SeqSpec) -> Self {
        Schedules {
            t,
            t_prime: SeqSpec::zero(),
            delta: SeqSpec::zero(),
            delta_prime: SeqSpec::zero(),
            eta: SeqSpec::zero(),
            eta_prime: SeqSpec::zero(),
        }
    }

    /// Same weakness `t`, all other sequences zero.
    pub fn without_slack(&self) -> Self {
        Schedules::wcga(self.t.clone())
    }

    pub fn is_zero_slack(&self) -> bool {
        [&self.t_prime, &self.delta, &self.delta_prime, &self.eta, &self.eta_prime].iter().all(|s| s.is_identically_zero())
    }

    pub fn validate(&self) -> Result<()> {
        self.t.validate("t", Some(1.0))?;
        self.t_prime.validate("t_prime", None)?;
        self.delta.validate("delta", None)?;
        self.delta_prime.validate("delta_prime", None)?;
        self.eta.validate("eta", None)?;
        self.eta_prime.validate("eta_prime", None)
    }

    pub fn step(&self, n: usize) -> StepParams {
        StepParams {
            t: self.t.eval(n),
            t_prime: self.t_prime.eval(n),
            delta: self.delta.eval(n - 1),
            delta_prime: self.delta_prime.eval(n - 1),
            eta: self.eta.eval(n),
            eta_prime: self.eta_prime.eval(n),
        }
    }

    /// `eta_0 = sup_{n >= 1} eta_n`.
    pub fn eta0(&self) -> f64 {
        self.eta.sup(1)
    }

    /// `eta'_0 = sup_{n >= 1} eta'_n`.
    pub fn eta0_prime(&self) -> f64 {
        self.eta_prime.sup(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation() {
        let s = SeqSpec::power(0.5, 2.0);
        assert_eq!(s.eval(0), 0.5);
        assert_eq!(s.eval(2), 0.125);
        assert_eq!(s.sup(1), 0.5);
        assert_eq!(s.sup(2), 0.125);
        let e = SeqSpec::Explicit { values: vec![0.1, 0.3], start: 1, tail: 0.0 };
        assert_eq!((e.eval(0), e.eval(1), e.eval(2), e.eval(3)), (0.0, 0.1, 0.3, 0.0));
        assert_eq!(e.sup(1), 0.3);
        let i = SeqSpec::Indicator { on: 2.0, off: 0.0, subsequence: Subsequence::Arithmetic { start: 10, step: 10 } };
        assert_eq!((i.eval(10), i.eval(15), i.eval(30)), (2.0, 0.0, 2.0));
        assert_eq!(i.sup(1), 2.0);
    }

    #[test]
    fn tails() {
        let t = SeqSpec::power(1.0, 2.0);
        let b = t.power_tail_bound(2.0, 400).unwrap();
        let direct: f64 = (401..2_000_000).map(|n| (n as f64).powi(-4)).sum();
        assert!(b >= direct && b < 1e-8);
        assert_eq!(SeqSpec::constant(1.0).power_tail_bound(2.0, 100), None);
        assert_eq!(SeqSpec::power(1.0, 0.5).power_tail_bound(2.0, 100), None);
        assert_eq!(SeqSpec::zero().power_tail_bound(2.0, 1), Some(0.0));
    }

    #[test]
    fn validation() {
        assert!(Schedules::default().validate().is_ok());
        let mut s = Schedules::default();
        s.t = SeqSpec::constant(1.5);
        assert!(s.validate().is_err());
        s.t = SeqSpec::constant(1.0);
        s.delta = SeqSpec::constant(-0.1);
        assert!(s.validate().is_err());
    }

    #[test]
    fn step_indexing() {
        let s = Schedules { delta: SeqSpec::Explicit { values: vec![0.7, 0.2], start: 0, tail: 0.0 }, ..Default::default() };
        assert_eq!(s.step(1).delta, 0.7);
        assert_eq!(s.step(2).delta, 0.2);
        assert!(s.without_slack().is_zero_slack());
        assert!(!s.is_zero_slack());
    }

    #[test]
    fn serde_round_trip() {
        let s = Schedules {
            eta_prime: SeqSpec::Indicator { on: 0.5, off: 0.0, subsequence: Subsequence::Explicit { indices: vec![10, 20] } },
            ..Default::default()
        };
        let txt = serde_json::to_string(&s).unwrap();
        let back: Schedules = serde_json::from_str(&txt).unwrap();
        assert_eq!(s, back);
    }
}
