use anyhow::Result;
use clap::Subcommand;
use fracture_core::analytic::{
    brazilian_stress, cube_splitting_strength, cube_splitting_strength_exact, eccentricity_strength,
    strength_ratios, CUBE_COEFFICIENT,
};

use crate::fmt::sig6;

#[derive(Subcommand, Debug, Clone, PartialEq)]
pub enum AnalyticCmd {
    /// Splitting stress 2N/(pi d l).
    #[command(allow_negative_numbers = true)]
    Brazil {
        /// Line load N (N).
        load: f64,
        /// Specimen height d (m).
        height: f64,
        /// Specimen length l (m).
        length: f64,
    },
    /// Cube splitting strength 0.64 N/a^2, with the exact 2/pi variant.
    #[command(allow_negative_numbers = true)]
    Cube {
        /// Failure load N (N).
        load: f64,
        /// Cube rib a (m).
        rib: f64,
    },
    /// Overall strength F/A and contact stress F/As.
    #[command(allow_negative_numbers = true)]
    Strength {
        /// Ultimate load F (N).
        load: f64,
        /// Specimen cross-section A (m^2).
        area: f64,
        /// Strip area As (m^2).
        strip_area: f64,
    },
    /// Overall strength predicted from strip eccentricity.
    #[command(allow_negative_numbers = true)]
    Ecc {
        /// Eccentricity (mm).
        ecc_mm: f64,
    },
}

impl AnalyticCmd {
    pub fn evaluate(&self) -> Result<Vec<String>> {
        Ok(match *self {
            AnalyticCmd::Brazil { load, height, length } => {
                vec![format!("splitting stress = {} Pa", sig6(brazilian_stress(load, height, length)?))]
            }
            AnalyticCmd::Cube { load, rib } => {
                let rounded = cube_splitting_strength(load, rib)?;
                let exact = cube_splitting_strength_exact(load, rib)?;
                let gap = 100.0 * (CUBE_COEFFICIENT / (2.0 / std::f64::consts::PI) - 1.0);
                vec![
                    format!("splitting strength = {} Pa", sig6(rounded)),
                    format!("with 2/pi = {} Pa", sig6(exact)),
                    format!("coefficient gap = {} %", sig6(gap)),
                ]
            }
            AnalyticCmd::Strength { load, area, strip_area } => {
                let (overall, contact) = strength_ratios(load, area, strip_area)?;
                vec![
                    format!("overall strength = {} Pa", sig6(overall)),
                    format!("contact stress = {} Pa", sig6(contact)),
                ]
            }
            AnalyticCmd::Ecc { ecc_mm } => {
                let r = eccentricity_strength(ecc_mm);
                let mut out = vec![format!("overall strength = {} MPa", sig6(r.strength_mpa))];
                if r.extrapolated {
                    out.push("note: negative eccentricity lies outside the fitted range".into());
                }
                out
            }
        })
    }
}
