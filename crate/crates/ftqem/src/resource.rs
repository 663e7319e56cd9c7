//! Closed-form resource estimates: logical error rate versus distance, QEM
//! sampling overhead, and the code distance saved by mitigation.
//!
//! Per-cycle logical error `p_cyc(d) = C₁ (C₂ p/p_th)^((d+1)/2)`; a logical
//! gate takes `m` cycles so `p_dec = 1 − (1 − p_cyc)^m`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cycles per logical gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CyclesPerGate {
    Fixed(u32),
    /// `m = d`.
    Distance,
}

impl CyclesPerGate {
    pub fn at(self, d: f64) -> f64 {
        match self {
            CyclesPerGate::Fixed(m) => m as f64,
            CyclesPerGate::Distance => d,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodeParams {
    pub c1: f64,
    pub c2: f64,
    /// `p / p_th`.
    pub ratio: f64,
    pub m: CyclesPerGate,
}

impl Default for CodeParams {
    fn default() -> Self {
        CodeParams {
            c1: 0.13,
            c2: 0.61,
            ratio: 0.1,
            m: CyclesPerGate::Fixed(1),
        }
    }
}

impl CodeParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(Error::Invalid(format!("p/p_th = {} is not below threshold", self.ratio)));
        }
        if !(self.c1 > 0.0 && self.c2 > 0.0 && self.c2 * self.ratio < 1.0) {
            return Err(Error::Invalid("C₁, C₂ must be positive with C₂ p/p_th < 1".into()));
        }
        if self.m == CyclesPerGate::Fixed(0) {
            return Err(Error::Invalid("m must be at least 1".into()));
        }
        Ok(())
    }

    /// Per-cycle logical error at (possibly non-integer) distance `d`.
    pub fn p_cyc(&self, d: f64) -> Result<f64> {
        self.validate()?;
        Ok(self.c1 * (self.c2 * self.ratio).powf((d + 1.0) / 2.0))
    }

    /// Per-gate decoding error after `m` cycles.
    pub fn p_dec(&self, d: f64) -> Result<f64> {
        let p = self.p_cyc(d)?;
        let m = self.m.at(d);
        Ok(-(m * (-p).ln_1p()).exp_m1())
    }

    /// Sampling overhead `Γ = exp(4 m C₁ N_dec (C₂ p/p_th)^((d+1)/2))`.
    pub fn qem_overhead(&self, d: f64, n_dec: f64) -> Result<f64> {
        if n_dec < 0.0 {
            return Err(Error::Invalid("gate count must be non-negative".into()));
        }
        Ok((4.0 * self.m.at(d) * n_dec * self.p_cyc(d)?).exp())
    }

    /// Real-valued distance at which `p_dec(d) = target`, clamped below at 1
    /// (targets already met at d = 1 return 1).
    pub fn distance_for(&self, target: f64) -> Result<f64> {
        self.validate()?;
        if !(target > 0.0 && target < 1.0) {
            return Err(Error::Invalid(format!("target error {target} outside (0, 1)")));
        }
        // p_dec is strictly decreasing in d; bisect on a bracket.
        let f = |d: f64| self.p_dec(d).map(|p| p.ln() - target.ln());
        let (mut lo, mut hi) = (1.0, 2.0);
        while f(hi)? > 0.0 {
            hi *= 2.0;
            if hi > 1e6 {
                return Ok(f64::INFINITY);
            }
        }
        if f(lo)? <= 0.0 {
            return Ok(lo);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid)? > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(hi)
    }

    /// Smallest odd `d ≥ 3` with `p_dec(d) ≤ target`.
    pub fn odd_distance_for(&self, target: f64) -> Result<u32> {
        let real = self.distance_for(target)?;
        if !real.is_finite() {
            return Err(Error::Invalid("target error unreachable".into()));
        }
        let mut d = (real.ceil() as i64).max(3) as u32;
        if d % 2 == 0 {
            d += 1;
        }
        // guard the rounding against floating-point slack
        while d > 3 && self.p_dec(f64::from(d - 2))? <= target {
            d -= 2;
        }
        Ok(d)
    }

    /// Maximum logical gate count at distance `d` with `N_e` allowed errors.
    pub fn max_gates(&self, d: f64, n_e: f64) -> Result<f64> {
        if n_e <= 0.0 {
            return Err(Error::Invalid("N_e must be positive".into()));
        }
        Ok(n_e / self.p_dec(d)?)
    }
}

/// Distance requirement with and without QEM for `N_G` gates and `N_e` mean errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Requirement {
    pub n_g: f64,
    pub n_e: f64,
    pub d_nmit_real: f64,
    pub d_mit_real: f64,
    pub d_nmit: u32,
    pub d_mit: u32,
    /// `(d_mit / d_nmit)²` from the real-valued distances.
    pub qubit_ratio_real: f64,
    /// `(d_mit / d_nmit)²` from the odd distances.
    pub qubit_ratio: f64,
    /// Γ at the mitigated distance for `N_G` gates.
    pub overhead: f64,
}

impl Requirement {
    pub const CSV_HEADER: &'static str =
        "n_g,n_e,d_nmit_real,d_mit_real,d_nmit,d_mit,qubit_ratio_real,qubit_ratio,overhead";

    pub fn csv_row(&self) -> String {
        format!(
            "{:e},{:e},{:.4},{:.4},{},{},{:.5},{:.5},{:.5e}",
            self.n_g,
            self.n_e,
            self.d_nmit_real,
            self.d_mit_real,
            self.d_nmit,
            self.d_mit,
            self.qubit_ratio_real,
            self.qubit_ratio,
            self.overhead
        )
    }
}

/// Unmitigated runs need `p_dec ≤ N_e/N_G`; with QEM `p_dec ≤ 1/N_G` suffices
/// (N_e ≤ 1 is the regime where mitigation helps).
pub fn required_distance(params: &CodeParams, n_g: f64, n_e: f64) -> Result<Requirement> {
    if !(n_g >= 1.0 && n_e > 0.0) {
        return Err(Error::Invalid("need N_G ≥ 1 and N_e > 0".into()));
    }
    let t_nmit = n_e / n_g;
    let t_mit = n_e.max(1.0) / n_g;
    let d_nmit_real = params.distance_for(t_nmit)?;
    let d_mit_real = params.distance_for(t_mit)?;
    let d_nmit = params.odd_distance_for(t_nmit)?;
    let d_mit = params.odd_distance_for(t_mit)?;
    let overhead = params.qem_overhead(f64::from(d_mit), n_g)?;
    Ok(Requirement {
        n_g,
        n_e,
        d_nmit_real,
        d_mit_real,
        d_nmit,
        d_mit,
        qubit_ratio_real: (d_mit_real / d_nmit_real).powi(2),
        qubit_ratio: (f64::from(d_mit) / f64::from(d_nmit)).powi(2),
        overhead,
    })
}

/// Gate budgets at a fixed distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateBudget {
    pub d: u32,
    pub n_e: f64,
    pub unmitigated: f64,
    pub mitigated: f64,
}

impl GateBudget {
    pub fn gain(&self) -> f64 {
        self.mitigated / self.unmitigated
    }
}

pub fn max_gates_at_distance(params: &CodeParams, d: u32, n_e: f64) -> Result<GateBudget> {
    let df = f64::from(d);
    Ok(GateBudget {
        d,
        n_e,
        unmitigated: params.max_gates(df, n_e)?,
        mitigated: params.max_gates(df, n_e.max(1.0))?,
    })
}

/// Extra distance equivalent to suppressing the error by a factor `r`:
/// `2 ln r / ln(p/p_th)`.
pub fn effective_distance_gain(r: f64, ratio: f64) -> Result<f64> {
    if !(r > 0.0 && r <= 1.0 && ratio > 0.0 && ratio < 1.0) {
        return Err(Error::Invalid("need 0 < r ≤ 1 and 0 < p/p_th < 1".into()));
    }
    Ok(2.0 * r.ln() / ratio.ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs()
    }

    #[test]
    fn p_cyc_formula() {
        let p = CodeParams::default();
        assert!(close(p.p_cyc(9.0).unwrap(), 0.13 * 0.061f64.powi(5), 1e-12));
        let r = p.p_cyc(11.0).unwrap() / p.p_cyc(9.0).unwrap();
        assert!(close(r, 0.061, 1e-12));
        assert_eq!(p.p_dec(9.0).unwrap(), p.p_cyc(9.0).unwrap());
        assert!(CodeParams { ratio: 1.0, ..p }.p_cyc(3.0).is_err());
    }

    #[test]
    fn overhead_of_one_expected_error() {
        let p = CodeParams::default();
        let n_dec = 1.0 / p.p_cyc(9.0).unwrap();
        assert!(close(p.qem_overhead(9.0, n_dec).unwrap(), 4f64.exp(), 1e-12));
        assert_eq!(p.qem_overhead(9.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn resource_reductions() {
        let p = CodeParams::default();
        let a = required_distance(&p, 1e4, 1e-3).unwrap();
        assert!((a.d_nmit_real - 9.0).abs() < 0.5 && (a.d_mit_real - 4.0).abs() < 1.0, "{a:?}");
        assert!((a.qubit_ratio_real - 0.21).abs() < 0.05);
        let b = required_distance(&p, 1e10, 1e-3).unwrap();
        assert!((b.d_nmit_real - 19.0).abs() < 0.5 && (b.d_mit_real - 14.0).abs() < 0.5, "{b:?}");
        assert!((b.qubit_ratio_real - 0.55).abs() < 0.05);
        let c = required_distance(&p, 1e6, 1.0).unwrap();
        assert_eq!(c.d_mit, c.d_nmit);
        assert_eq!(c.qubit_ratio, 1.0);
    }

    #[test]
    fn gate_gain_at_d11() {
        let g = max_gates_at_distance(&CodeParams::default(), 11, 1e-3).unwrap();
        assert!((g.gain().log10() - 3.0).abs() < 0.5);
        assert!((g.unmitigated.log10() - 5.0).abs() < 0.5);
        let h = max_gates_at_distance(&CodeParams::default(), 11, 5e-4).unwrap();
        assert!(close(h.unmitigated, g.unmitigated / 2.0, 1e-12));
    }

    #[test]
    fn distance_gain_formula() {
        assert_eq!(effective_distance_gain(1.0, 0.1).unwrap(), 0.0);
        assert!(close(effective_distance_gain(0.1, 0.1).unwrap(), 2.0, 1e-12));
        assert!(close(effective_distance_gain(0.01, 0.1).unwrap(), 4.0, 1e-12));
    }

    #[test]
    fn odd_distance_is_minimal() {
        for m in [CyclesPerGate::Fixed(1), CyclesPerGate::Distance] {
            let p = CodeParams { m, ..Default::default() };
            for k in 2..14 {
                let t = 10f64.powi(-k);
                let d = p.odd_distance_for(t).unwrap();
                assert!(d % 2 == 1 && p.p_dec(f64::from(d)).unwrap() <= t);
                if d > 3 {
                    assert!(p.p_dec(f64::from(d - 2)).unwrap() > t);
                }
            }
        }
    }
}
