use serde::{Deserialize, Serialize};

use torus_orbit_core::fixed_points::{FiniteOrbitParams, DEFAULT_MARGIN};
use torus_orbit_core::mcg_algebra::ClosureCaps;
use torus_orbit_core::rotation::BatterySpec;

use crate::input::InputError;

/// Every knob of a run. Serialized verbatim into each report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub newton_tol: f64,
    pub rot_tol: f64,
    pub orbit_tol: f64,
    /// Horizon of every Birkhoff average.
    pub birkhoff_n: usize,
    pub burn_in: usize,
    /// Time-average measures per battery.
    pub time_averages: usize,
    /// Seeds per side for fixed-point searches and rotation-set starts.
    pub grid_n: usize,
    /// Cells per side of the Lebesgue grid measure.
    pub measure_grid: usize,
    /// Seeds per side for the common fixed-point multistart.
    pub multistart_grid: usize,
    pub word_cap: usize,
    pub element_cap: usize,
    /// `null` derives the cap from the special element.
    pub m_cap: Option<u64>,
    pub orbit_cap: usize,
    pub margin: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let params = FiniteOrbitParams::default();
        RunConfig {
            seed: params.seed,
            newton_tol: params.newton_tol,
            rot_tol: params.rot_tol,
            orbit_tol: params.orbit_tol,
            birkhoff_n: params.battery.horizon,
            burn_in: params.battery.burn_in,
            time_averages: params.battery.time_averages,
            grid_n: params.grid_n,
            measure_grid: params.battery.lebesgue_grid,
            multistart_grid: params.multistart_grid,
            word_cap: params.caps.word_cap,
            element_cap: params.caps.element_cap,
            m_cap: params.m_cap,
            orbit_cap: params.orbit_cap,
            margin: DEFAULT_MARGIN,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, InputError> {
        let config: RunConfig = serde_json::from_str(text).map_err(|e| InputError::Parse(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), InputError> {
        let tolerances = [
            ("newton_tol", self.newton_tol),
            ("rot_tol", self.rot_tol),
            ("orbit_tol", self.orbit_tol),
            ("margin", self.margin),
        ];
        for (name, v) in tolerances {
            if !(v > 0.0 && v.is_finite()) {
                return Err(InputError::Invalid(format!("config: {name} must be positive")));
            }
        }
        let counts = [
            ("birkhoff_n", self.birkhoff_n),
            ("grid_n", self.grid_n),
            ("measure_grid", self.measure_grid),
            ("multistart_grid", self.multistart_grid),
            ("word_cap", self.word_cap),
            ("element_cap", self.element_cap),
            ("orbit_cap", self.orbit_cap),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(InputError::Invalid(format!("config: {name} must be positive")));
            }
        }
        if self.m_cap == Some(0) {
            return Err(InputError::Invalid("config: m_cap must be positive".into()));
        }
        Ok(())
    }

    pub fn caps(&self) -> ClosureCaps {
        ClosureCaps {
            element_cap: self.element_cap,
            word_cap: self.word_cap,
        }
    }

    pub fn battery(&self) -> BatterySpec {
        BatterySpec {
            lebesgue_grid: self.measure_grid,
            time_averages: self.time_averages,
            horizon: self.birkhoff_n,
            burn_in: self.burn_in,
        }
    }

    pub fn orbit_params(&self) -> FiniteOrbitParams {
        FiniteOrbitParams {
            newton_tol: self.newton_tol,
            rot_tol: self.rot_tol,
            orbit_tol: self.orbit_tol,
            grid_n: self.grid_n,
            multistart_grid: self.multistart_grid,
            orbit_cap: self.orbit_cap,
            m_cap: self.m_cap,
            margin: self.margin,
            caps: self.caps(),
            battery: self.battery(),
            seed: self.seed,
        }
    }
}
