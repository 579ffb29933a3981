//! Model parameters shared by every solver.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the Hilbert-space dimension of a [`Truncation`].
pub const DEFAULT_DIM_CAP: usize = 4096;

/// Source-mode pump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PumpModel {
    /// Atoms tunnel into the source mode at `mu_in` and out at `mu_out`.
    Incoherent { mu_in: f64, mu_out: f64 },
    /// Coherent drive of the source mode with real amplitude `mu`.
    Coherent { mu: f64 },
}

/// Rate constants of the three-mode model. All rates are amplitude rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub eta: f64,
    pub kappa_a: f64,
    pub kappa_b: f64,
    #[serde(default)]
    pub kappa_c: f64,
    #[serde(default)]
    pub kappa_bc: f64,
    #[serde(default)]
    pub kappa_cb: f64,
    pub pump: PumpModel,
}

impl ModelParams {
    pub fn incoherent(eta: f64, kappa_a: f64, kappa_b: f64, mu_in: f64, mu_out: f64) -> Self {
        ModelParams {
            eta,
            kappa_a,
            kappa_b,
            kappa_c: 0.0,
            kappa_bc: 0.0,
            kappa_cb: 0.0,
            pump: PumpModel::Incoherent { mu_in, mu_out },
        }
    }

    pub fn coherent(eta: f64, kappa_a: f64, kappa_b: f64, kappa_c: f64, kappa_bc: f64, mu: f64) -> Self {
        ModelParams {
            eta,
            kappa_a,
            kappa_b,
            kappa_c,
            kappa_bc,
            kappa_cb: 0.0,
            pump: PumpModel::Coherent { mu },
        }
    }

    /// All violated constraints, one message per field.
    pub fn violations(&self) -> Vec<Error> {
        let mut out = Vec::new();
        let mut rate = |name: &str, v: f64| {
            if !v.is_finite() {
                out.push(Error::param(name, "must be finite"));
            } else if v < 0.0 {
                out.push(Error::param(name, format!("must be >= 0, got {v}")));
            }
        };
        rate("kappa_a", self.kappa_a);
        rate("kappa_b", self.kappa_b);
        rate("kappa_c", self.kappa_c);
        rate("kappa_bc", self.kappa_bc);
        rate("kappa_cb", self.kappa_cb);
        match self.pump {
            PumpModel::Incoherent { mu_in, mu_out } => {
                rate("mu_in", mu_in);
                rate("mu_out", mu_out);
            }
            PumpModel::Coherent { mu } => rate("mu", mu),
        }
        if !(self.eta.is_finite() && self.eta > 0.0) {
            out.push(Error::param("eta", format!("must be > 0, got {}", self.eta)));
        }
        if matches!(self.pump, PumpModel::Coherent { .. }) && self.kappa_cb != 0.0 {
            out.push(Error::param(
                "kappa_cb",
                "Raman decay c->b is not part of the coherently pumped model; set it to 0",
            ));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        match self.violations().into_iter().next() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    /// Coherent pump amplitude, or an error for the incoherent model.
    pub fn mu(&self) -> Result<f64> {
        match self.pump {
            PumpModel::Coherent { mu } => Ok(mu),
            PumpModel::Incoherent { .. } => Err(Error::param("pump", "coherent pump required")),
        }
    }

    /// Copy with the coherent pump amplitude replaced.
    pub fn with_mu(mut self, mu: f64) -> Self {
        self.pump = PumpModel::Coherent { mu };
        self
    }
}

/// Maximum retained occupation per mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Truncation {
    pub n_a: usize,
    pub n_b: usize,
    pub n_c: usize,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation { n_a: 8, n_b: 8, n_c: 3 }
    }
}

impl Truncation {
    pub fn new(n_a: usize, n_b: usize, n_c: usize) -> Self {
        Truncation { n_a, n_b, n_c }
    }

    /// Hilbert-space dimension (n_a+1)(n_b+1)(n_c+1).
    pub fn dim(&self) -> usize {
        (self.n_a + 1) * (self.n_b + 1) * (self.n_c + 1)
    }

    pub fn validate(&self, cap: usize) -> Result<()> {
        for (name, v) in [("n_a", self.n_a), ("n_b", self.n_b), ("n_c", self.n_c)] {
            if v < 1 {
                return Err(Error::param(name, "must be >= 1"));
            }
        }
        let dim = self.dim();
        if dim > cap {
            return Err(Error::DimensionCap { dim, cap });
        }
        Ok(())
    }

    /// Basis index of |na, nb, nc>: mode a slowest, mode c fastest.
    pub fn index(&self, na: usize, nb: usize, nc: usize) -> usize {
        (na * (self.n_b + 1) + nb) * (self.n_c + 1) + nc
    }

    /// Occupations of basis state `i`.
    pub fn occupations(&self, i: usize) -> (usize, usize, usize) {
        let nc = i % (self.n_c + 1);
        let rest = i / (self.n_c + 1);
        (rest / (self.n_b + 1), rest % (self.n_b + 1), nc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_roundtrip() {
        let t = Truncation::new(2, 3, 1);
        for i in 0..t.dim() {
            let (a, b, c) = t.occupations(i);
            assert_eq!(t.index(a, b, c), i);
        }
        assert_eq!(t.index(0, 0, 1), 1);
        assert_eq!(t.index(0, 1, 0), 2);
        assert_eq!(t.index(1, 0, 0), 8);
    }

    #[test]
    fn rejects_negative_rate_by_name() {
        let mut p = ModelParams::incoherent(1.0, 1.0, 1.0, 2.0, 1.0);
        p.kappa_a = -1.0;
        match p.validate() {
            Err(Error::InvalidParameter { field, .. }) => assert_eq!(field, "kappa_a"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn coherent_rejects_raman() {
        let mut p = ModelParams::coherent(4.0, 1.0, 1.0, 2.0, 0.0, 1.0);
        p.kappa_cb = 0.1;
        assert!(p.validate().is_err());
    }

    #[test]
    fn truncation_cap() {
        assert!(Truncation::new(10, 10, 10).validate(1000).is_err());
        assert!(Truncation::new(0, 1, 1).validate(1000).is_err());
        assert!(Truncation::default().validate(DEFAULT_DIM_CAP).is_ok());
    }
}
