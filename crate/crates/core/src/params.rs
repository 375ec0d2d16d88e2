//! Parameter pickers for the four asymptotic theorems.
//!
//! Each picker derives `(L, m)` from its inputs and then checks the lemma
//! preconditions `n ≥ L·16^m` and `k ≤ max_team_size`. A failed check is
//! reported in `violated`, never rounded away. Logarithms are natural.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::ParamsError;
use crate::exact;
use crate::offline::ratio_json;

/// `n` used by the `ε` picker when none is given.
pub const DESK_N: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Theorem {
    Thm1,
    Thm2,
    Thm3,
    Thm4,
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Theorem::Thm1 => "thm1",
            Theorem::Thm2 => "thm2",
            Theorem::Thm3 => "thm3",
            Theorem::Thm4 => "thm4",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Inputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ratio_json")]
    pub eps: Option<Ratio<u64>>,
    #[serde(rename = "D", skip_serializing_if = "Option::is_none")]
    pub depth: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub segment: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremParams {
    pub theorem: Theorem,
    pub inputs: Inputs,
    pub n: u64,
    #[serde(rename = "L")]
    pub segment: u64,
    pub m: u32,
    pub k: u64,
    /// `None` when `n < L·16^m` leaves the team size undefined.
    pub max_team_size: Option<u64>,
    /// `m/(5ε)` and `C(m,2)` for the `ε` picker.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ratio_json")]
    pub round_bound: Option<Ratio<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub binomial_m2: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meets_round_bound: Option<bool>,
    /// `⌈√ln n⌉` for the pickers that use it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sqrt_log_ceil: Option<u32>,
    pub feasible: bool,
    pub violated: Vec<String>,
}

impl TheoremParams {
    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("params serialize");
        out.push(b'\n');
        out
    }

    fn new(theorem: Theorem, inputs: Inputs, n: u64, segment: u64, m: u32, k: Option<u64>) -> Self {
        let mut violated = Vec::new();
        let needed = exact::sixteen_pow(m).and_then(|p| p.checked_mul(segment));
        let max_team_size = match needed {
            _ if segment == 0 || m == 0 => {
                violated.push(format!("L >= 1 and m >= 1 violated: L = {segment}, m = {m}"));
                None
            }
            Some(bound) if n >= bound => Some(exact::max_team_size(n, segment, m)),
            Some(bound) => {
                violated.push(format!("n >= L*16^m violated: {n} < {segment}*16^{m} = {bound}"));
                None
            }
            None => {
                violated.push(format!("n >= L*16^m violated: {segment}*16^{m} overflows"));
                None
            }
        };
        let k = k.or(max_team_size).unwrap_or(0);
        if let Some(max) = max_team_size {
            if k > max {
                violated.push(format!("k <= max_team_size violated: {k} > {max}"));
            }
        }
        TheoremParams {
            theorem,
            inputs,
            n,
            segment,
            m,
            k,
            max_team_size,
            round_bound: None,
            binomial_m2: None,
            meets_round_bound: None,
            sqrt_log_ceil: None,
            feasible: false,
            violated,
        }
    }

    fn settle(mut self) -> Self {
        self.feasible = self.violated.is_empty();
        self
    }
}

/// `⌈√ln n⌉`.
pub fn sqrt_log_ceil(n: u64) -> u32 {
    (n as f64).ln().sqrt().ceil() as u32
}

/// `m = ⌈ln n / ((8+c) ln ln n)⌉`, `L = ⌈n/(mk)⌉`; `m` and `L` may be
/// overridden.
pub fn pick_params_thm1(
    n: u64,
    k: u64,
    c: f64,
    m_override: Option<u32>,
    l_override: Option<u64>,
) -> Result<TheoremParams, ParamsError> {
    if n < 3 {
        return Err(ParamsError::Precondition(format!("n >= 3 required, got {n}")));
    }
    if k == 0 {
        return Err(ParamsError::Precondition("k >= 1 required".into()));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(ParamsError::Precondition(format!("c > 0 required, got {c}")));
    }
    let ln = (n as f64).ln();
    let m = m_override.unwrap_or_else(|| (ln / ((8.0 + c) * ln.ln())).ceil() as u32);
    let segment = l_override.unwrap_or_else(|| n.div_ceil(u64::from(m.max(1)) * k));
    let inputs = Inputs {
        n: Some(n),
        k: Some(k),
        c: Some(c),
        m: m_override,
        segment: l_override,
        ..Inputs::default()
    };
    let mut p = TheoremParams::new(Theorem::Thm1, inputs, n, segment, m, Some(k));
    if m < 2 {
        p.violated
            .insert(0, format!("m >= 2 violated: m = {m} gives no checkpoint"));
    }
    Ok(p.settle())
}

/// `L = 1`, `m = ⌈1/(2ε)⌉`, checked at `n` (default [`DESK_N`]).
pub fn pick_params_thm2(eps: Ratio<u64>, n: Option<u64>, k: Option<u64>) -> Result<TheoremParams, ParamsError> {
    if *eps.numer() == 0 || eps >= Ratio::new(1, 5) {
        return Err(ParamsError::OutOfRange(format!("0 < eps < 1/5 required, got {eps}")));
    }
    let m = (eps * 2).recip().ceil().to_integer();
    let m = u32::try_from(m).map_err(|_| ParamsError::OutOfRange(format!("m = {m} too large")))?;
    let n_used = n.unwrap_or(DESK_N);
    let inputs = Inputs {
        n,
        k,
        eps: Some(eps),
        ..Inputs::default()
    };
    let mut p = TheoremParams::new(Theorem::Thm2, inputs, n_used, 1, m, k);
    let round_bound = Ratio::from_integer(u64::from(m)) / (eps * 5);
    let choose = exact::binomial(u64::from(m), 2);
    p.round_bound = Some(round_bound);
    p.binomial_m2 = Some(choose);
    p.meets_round_bound = Some(Ratio::from_integer(choose) >= round_bound);
    Ok(p.settle())
}

/// `L = 1`, `m = ⌈√ln n⌉`, `k = n`.
pub fn pick_params_thm3(n: u64) -> Result<TheoremParams, ParamsError> {
    if n < 3 {
        return Err(ParamsError::Precondition(format!("n >= 3 required, got {n}")));
    }
    let m = sqrt_log_ceil(n);
    let inputs = Inputs {
        n: Some(n),
        ..Inputs::default()
    };
    let mut p = TheoremParams::new(Theorem::Thm3, inputs, n, 1, m, Some(n));
    p.sqrt_log_ceil = Some(m);
    Ok(p.settle())
}

/// `L = D` with `m` given; requires `m ≤ ⌈√ln n⌉`.
pub fn pick_params_thm4(n: u64, depth: u32, m: u32, k: Option<u64>) -> Result<TheoremParams, ParamsError> {
    if n < 2 {
        return Err(ParamsError::Precondition(format!("n >= 2 required, got {n}")));
    }
    let inputs = Inputs {
        n: Some(n),
        k,
        depth: Some(depth),
        m: Some(m),
        ..Inputs::default()
    };
    let mut p = TheoremParams::new(Theorem::Thm4, inputs, n, u64::from(depth), m, k);
    let cap = sqrt_log_ceil(n);
    p.sqrt_log_ceil = Some(cap);
    if m > cap {
        p.violated.push(format!("m <= ceil(sqrt(ln n)) violated: {m} > {cap}"));
    }
    Ok(p.settle())
}

/// Parses `0.1`, `1/20` or `3` into an exact fraction.
pub fn parse_ratio(s: &str) -> Result<Ratio<u64>, ParamsError> {
    let bad = || ParamsError::OutOfRange(format!("cannot parse {s:?} as a fraction"));
    let s = s.trim();
    if s.contains('/') {
        let r = Ratio::<u64>::from_str(s).map_err(|_| bad())?;
        return Ok(r);
    }
    let (whole, frac) = s.split_once('.').unwrap_or((s, ""));
    if whole.is_empty() && frac.is_empty() || !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let den = 10u64.checked_pow(frac.len() as u32).ok_or_else(bad)?;
    let digits = format!("{whole}{frac}");
    let num: u64 = digits.parse().map_err(|_| bad())?;
    Ok(Ratio::new(num, den))
}
