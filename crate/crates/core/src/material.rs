//! Material description: the normalized step function E*(e*) for the
//! softening branch, the strain scaling, the seeded random field of initial
//! moduli and the secant-modulus law that combines them.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{PatchGrid, PatchIndex};

/// Breakpoints `(e*, E*)` of the default step function.
pub const DEFAULT_BREAKPOINTS: [(f64, f64); 9] = [
    (0.0, 1.000),
    (2.0, 1.000),
    (2.2, 0.960),
    (2.3, 0.850),
    (2.4, 0.500),
    (2.5, 0.200),
    (2.6, 0.100),
    (2.8, 0.050),
    (5.0, 0.028),
];

/// Piecewise-linear E*(e*) with clamping outside the breakpoint range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct StepFunction {
    breakpoints: Vec<(f64, f64)>,
}

impl Default for StepFunction {
    fn default() -> Self {
        StepFunction {
            breakpoints: DEFAULT_BREAKPOINTS.to_vec(),
        }
    }
}

impl TryFrom<Vec<(f64, f64)>> for StepFunction {
    type Error = Error;

    fn try_from(v: Vec<(f64, f64)>) -> Result<Self> {
        StepFunction::new(v)
    }
}

impl From<StepFunction> for Vec<(f64, f64)> {
    fn from(sf: StepFunction) -> Self {
        sf.breakpoints
    }
}

impl StepFunction {
    pub fn new(breakpoints: Vec<(f64, f64)>) -> Result<Self> {
        let bad = |msg: String| Err(Error::Config(format!("step function: {msg}")));
        let Some(&(e0, first)) = breakpoints.first() else {
            return bad("no breakpoints".into());
        };
        if e0 < 0.0 {
            return bad(format!("first e* must be >= 0, got {e0}"));
        }
        if first != 1.0 {
            return bad(format!("first E* must be 1, got {first}"));
        }
        for (i, &(e, v)) in breakpoints.iter().enumerate() {
            if !(e.is_finite() && v.is_finite()) {
                return bad(format!("breakpoint {i} is not finite"));
            }
            if !(v > 0.0 && v <= 1.0) {
                return bad(format!("E* at breakpoint {i} must lie in (0, 1], got {v}"));
            }
            if i > 0 {
                let (pe, pv) = breakpoints[i - 1];
                if e <= pe {
                    return bad(format!("e* must increase strictly, breakpoint {i} has {e} after {pe}"));
                }
                if v > pv {
                    return bad(format!("E* must not increase, breakpoint {i} has {v} after {pv}"));
                }
            }
        }
        Ok(StepFunction { breakpoints })
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.breakpoints
    }

    /// Smallest stiffness ratio the function can return.
    pub fn min_ratio(&self) -> f64 {
        self.breakpoints.last().map_or(1.0, |b| b.1)
    }

    pub fn eval(&self, e_star: f64) -> Result<f64> {
        if e_star.is_nan() || e_star < 0.0 {
            return Err(Error::Input(format!("e* must be non-negative, got {e_star}")));
        }
        Ok(self.eval_unchecked(e_star))
    }

    pub(crate) fn eval_unchecked(&self, e_star: f64) -> f64 {
        let bp = &self.breakpoints;
        let (first, last) = (bp[0], bp[bp.len() - 1]);
        if e_star <= first.0 {
            return first.1;
        }
        if e_star >= last.0 {
            return last.1;
        }
        // first index whose e* exceeds the argument
        let hi = bp.partition_point(|&(e, _)| e <= e_star);
        let (e0, v0) = bp[hi - 1];
        let (e1, v1) = bp[hi];
        v0 + (v1 - v0) * (e_star - e0) / (e1 - e0)
    }
}

pub fn eval_step(sf: &StepFunction, e_star: f64) -> Result<f64> {
    sf.eval(e_star)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaterialParams {
    /// Mean modulus of the block material (Pa).
    pub e_avg: f64,
    /// Tensile strength (Pa).
    pub f_t: f64,
    pub nu_casi: f64,
    pub e_rubber: f64,
    pub nu_rubber: f64,
    /// Residual stiffness added to every damaged modulus (Pa).
    pub e_floor: f64,
    /// e* per unit of principal strain.
    pub estar_scale: f64,
}

impl Default for MaterialParams {
    fn default() -> Self {
        MaterialParams {
            e_avg: 6000e6,
            f_t: 2.0e6,
            nu_casi: 0.2,
            e_rubber: 1000e6,
            nu_rubber: 0.45,
            e_floor: 1e7,
            estar_scale: 6000.0,
        }
    }
}

impl MaterialParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("e_avg", self.e_avg),
            ("f_t", self.f_t),
            ("e_rubber", self.e_rubber),
            ("estar_scale", self.estar_scale),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("materials.{name} must be positive, got {v}")));
            }
        }
        if !(self.e_floor.is_finite() && self.e_floor >= 0.0) {
            return Err(Error::Config(format!("materials.e_floor must be >= 0, got {}", self.e_floor)));
        }
        for (name, nu) in [("nu_casi", self.nu_casi), ("nu_rubber", self.nu_rubber)] {
            if !(0.0..0.5).contains(&nu) {
                return Err(Error::Config(format!("materials.{name} must lie in [0, 0.5), got {nu}")));
            }
        }
        Ok(())
    }
}

/// Scaled strain; compression does not damage.
pub fn strain_to_estar(ep1: f64, params: &MaterialParams) -> f64 {
    params.estar_scale * ep1.max(0.0)
}

/// Secant modulus for a given (historical) e*.
pub fn secant_from_estar(patch_e: f64, e_star: f64, sf: &StepFunction, params: &MaterialParams) -> f64 {
    params.e_floor + sf.eval_unchecked(e_star.max(0.0)) * patch_e
}

/// `E = E_floor + E*(e*(ep1)) * patch_E`.
pub fn secant_modulus(patch_e: f64, ep1: f64, sf: &StepFunction, params: &MaterialParams) -> f64 {
    secant_from_estar(patch_e, strain_to_estar(ep1, params), sf, params)
}

/// Initial moduli per patch, stored row-major over the patch grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RandomField {
    pub seed: u64,
    pub e_min: f64,
    pub e_max: f64,
    pub grid: PatchGrid,
    pub patch_e: Vec<f64>,
}

impl RandomField {
    pub fn get(&self, p: PatchIndex) -> f64 {
        self.patch_e[self.grid.linear(p)]
    }
}

/// Independent uniform draws on `[e_min, e_max]`, one per patch in row-major
/// order. The generator is ChaCha8 seeded through `seed_from_u64`; each draw
/// takes the top 53 bits of one `u64` output, so the field depends only on
/// the seed, grid and bounds.
pub fn sample_field(seed: u64, grid: &PatchGrid, e_min: f64, e_max: f64) -> Result<RandomField> {
    if grid.is_empty() {
        return Err(Error::Config("random field needs at least one patch".into()));
    }
    if !(e_min.is_finite() && e_max.is_finite() && e_min > 0.0 && e_min <= e_max) {
        return Err(Error::Config(format!(
            "random field bounds must satisfy 0 < e_min <= e_max, got [{e_min}, {e_max}]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span = e_max - e_min;
    let patch_e = grid
        .iter()
        .map(|_| {
            let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            e_min + u * span
        })
        .collect();
    Ok(RandomField {
        seed,
        e_min,
        e_max,
        grid: *grid,
        patch_e,
    })
}
