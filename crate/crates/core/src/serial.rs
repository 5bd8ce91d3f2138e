//! Versioned JSON records for expansions and piecewise functions.
//!
//! Exact scalars are written in the `c*sqrt(d)*pi^(k/2)` text form and
//! rationals as `p/q`, so a record round-trips without loss.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::marginals::Cell;
use crate::scalar::{fmt_q, parse_q, ExactScalar, Q};
use crate::symfunc::{Expansion, JacobiExpansion, LaguerreExpansion, LaguerreKey, PiecewisePower, PwTerm, Step};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaguerreTerm {
    pub coeff: String,
    /// Power of `x`.
    pub a: String,
    /// Exponential rate: the term carries `e^{−s x}`.
    pub s: String,
    /// Present when the term carries `erf(√(u x))`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub erf_rate: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JacobiTerm {
    pub coeff: String,
    /// Power of `x`.
    pub a: String,
    /// Power of `1 − x`.
    pub b: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StepRecord {
    Always,
    Above { at: String },
    Below { at: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiecewiseTerm {
    pub coeff: String,
    /// Power of `v`.
    pub a: String,
    /// The factor `(sign·(v − shift))^shift_power`.
    pub shift: String,
    pub sign: i8,
    pub shift_power: String,
    pub step: StepRecord,
}

/// One serialized function, tagged by its family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FunctionRecord {
    Laguerre { terms: Vec<LaguerreTerm> },
    Jacobi { terms: Vec<JacobiTerm> },
    Piecewise { lo: String, hi: String, terms: Vec<PiecewiseTerm> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Versioned<T> {
    pub schema: u32,
    #[serde(flatten)]
    pub body: T,
}

impl<T> Versioned<T> {
    pub fn new(body: T) -> Self {
        Self { schema: SCHEMA_VERSION, body }
    }

    pub fn check(self) -> Result<T> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::Parse(format!("schema version {} (expected {SCHEMA_VERSION})", self.schema)));
        }
        Ok(self.body)
    }
}

/// Cached pair `(f_N(n), F_N(n))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellRecord {
    pub pdf: FunctionRecord,
    pub cdf: FunctionRecord,
}

fn scalar(s: &str) -> Result<ExactScalar> {
    s.parse()
}

/// Conversion between in-memory functions and [`FunctionRecord`].
pub trait Record: Sized {
    fn to_record(&self) -> FunctionRecord;
    fn from_record(r: &FunctionRecord) -> Result<Self>;
}

impl Record for LaguerreExpansion {
    fn to_record(&self) -> FunctionRecord {
        let terms = self
            .terms()
            .map(|(k, c)| LaguerreTerm {
                coeff: c.to_string(),
                a: fmt_q(k.a),
                s: fmt_q(k.s),
                erf_rate: k.erf.then(|| fmt_q(k.u)),
            })
            .collect();
        FunctionRecord::Laguerre { terms }
    }

    fn from_record(r: &FunctionRecord) -> Result<Self> {
        let FunctionRecord::Laguerre { terms } = r else {
            return Err(Error::Parse("expected a laguerre record".into()));
        };
        let mut out = LaguerreExpansion::new();
        for t in terms {
            let (a, s) = (parse_q(&t.a)?, parse_q(&t.s)?);
            let key = match &t.erf_rate {
                None => LaguerreKey::plain(a, s),
                Some(u) => {
                    let u = parse_q(u)?;
                    if u <= Q::from_integer(0) {
                        return Err(Error::Parse("erf rate must be positive".into()));
                    }
                    LaguerreKey::with_erf(a, s, u)
                }
            };
            out.add_term(key, &scalar(&t.coeff)?);
        }
        Ok(out)
    }
}

impl Record for JacobiExpansion {
    fn to_record(&self) -> FunctionRecord {
        let terms = self
            .terms()
            .map(|(a, b, c)| JacobiTerm { coeff: c.to_string(), a: fmt_q(a), b: fmt_q(b) })
            .collect();
        FunctionRecord::Jacobi { terms }
    }

    fn from_record(r: &FunctionRecord) -> Result<Self> {
        let FunctionRecord::Jacobi { terms } = r else {
            return Err(Error::Parse("expected a jacobi record".into()));
        };
        let mut out = JacobiExpansion::zero();
        for t in terms {
            out = out.add(&JacobiExpansion::term(scalar(&t.coeff)?, parse_q(&t.a)?, parse_q(&t.b)?));
        }
        Ok(out)
    }
}

impl Record for PiecewisePower {
    fn to_record(&self) -> FunctionRecord {
        let terms = self
            .terms
            .iter()
            .map(|t| PiecewiseTerm {
                coeff: t.c.to_string(),
                a: fmt_q(t.a),
                shift: fmt_q(t.q),
                sign: t.sigma,
                shift_power: fmt_q(t.e),
                step: match t.step {
                    Step::Always => StepRecord::Always,
                    Step::Above(r) => StepRecord::Above { at: fmt_q(r) },
                    Step::Below(r) => StepRecord::Below { at: fmt_q(r) },
                },
            })
            .collect();
        FunctionRecord::Piecewise { lo: fmt_q(self.lo), hi: fmt_q(self.hi), terms }
    }

    fn from_record(r: &FunctionRecord) -> Result<Self> {
        let FunctionRecord::Piecewise { lo, hi, terms } = r else {
            return Err(Error::Parse("expected a piecewise record".into()));
        };
        let mut out = PiecewisePower::new(parse_q(lo)?, parse_q(hi)?);
        for t in terms {
            if t.sign != 1 && t.sign != -1 {
                return Err(Error::Parse(format!("shift sign must be ±1, got {}", t.sign)));
            }
            let step = match &t.step {
                StepRecord::Always => Step::Always,
                StepRecord::Above { at } => Step::Above(parse_q(at)?),
                StepRecord::Below { at } => Step::Below(parse_q(at)?),
            };
            out.push(PwTerm::new(
                scalar(&t.coeff)?,
                parse_q(&t.a)?,
                parse_q(&t.shift)?,
                t.sign,
                parse_q(&t.shift_power)?,
                step,
            ));
        }
        Ok(out)
    }
}

pub fn cell_to_record<E: Record>(cell: &Cell<E>) -> CellRecord {
    CellRecord { pdf: cell.f.to_record(), cdf: cell.big_f.to_record() }
}

pub fn cell_from_record<E: Record>(r: &CellRecord) -> Result<Cell<E>> {
    Ok(Cell { f: E::from_record(&r.pdf)?, big_f: E::from_record(&r.cdf)? })
}

pub fn to_json<E: Record>(e: &E) -> String {
    serde_json::to_string(&Versioned::new(e.to_record())).expect("records serialize")
}

pub fn from_json<E: Record>(s: &str) -> Result<E> {
    let v: Versioned<FunctionRecord> = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    E::from_record(&v.check()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marginals::{compute_jacobi, compute_laguerre, EnsembleSpec, Ordering};
    use crate::scalar::{q, qi};

    #[test]
    fn laguerre_round_trip() {
        let spec = EnsembleSpec::laguerre(1, q(-1, 2)).unwrap();
        let t = compute_laguerre(spec, 4, Ordering::RowMajor, None).unwrap();
        for ((big_n, n), cell) in t.cells() {
            let back: Cell<LaguerreExpansion> = cell_from_record(&cell_to_record(cell)).unwrap();
            assert_eq!(&back, cell, "N={big_n} n={n}");
        }
        let f = t.big_f(4, 1);
        assert_eq!(from_json::<LaguerreExpansion>(&to_json(&f)).unwrap(), f);
    }

    #[test]
    fn jacobi_round_trip() {
        let spec = EnsembleSpec::jacobi(3, q(-1, 2), qi(2)).unwrap();
        let t = compute_jacobi(spec, 3, Ordering::RowMajor, None).unwrap();
        let f = t.big_f(3, 2);
        assert_eq!(from_json::<JacobiExpansion>(&to_json(&f)).unwrap(), f);
    }

    #[test]
    fn piecewise_round_trip() {
        let p = crate::fixedtrace::conductance_pdf(3, 3, 1).unwrap();
        let back: PiecewisePower = from_json(&to_json(&p)).unwrap();
        assert!(back.structurally_equal(&p));
    }

    #[test]
    fn wrong_version_or_kind_is_rejected() {
        let f = LaguerreExpansion::term(ExactScalar::one(), qi(1), qi(1));
        let text = to_json(&f).replace("\"schema\":1", "\"schema\":99");
        assert!(from_json::<LaguerreExpansion>(&text).is_err());
        assert!(from_json::<JacobiExpansion>(&to_json(&f)).is_err());
    }
}
