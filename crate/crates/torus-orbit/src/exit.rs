//! Process exit codes.
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 2 | malformed or invalid input |
//! | 3 | inconclusive classification |
//! | 4 | the library rejected the input or a numerical step failed |
//! | 5 | the analysis ran but a verification check failed |
//! | 10 + i | finite-orbit pipeline stopped at stage `i` |

use torus_orbit_core::fixed_points::Stage;

pub const SUCCESS: u8 = 0;
pub const INPUT: u8 = 2;
pub const INCONCLUSIVE: u8 = 3;
pub const LIBRARY_ERROR: u8 = 4;
pub const CHECK_FAILED: u8 = 5;
pub const STAGE_BASE: u8 = 10;

pub fn stage(s: Stage) -> u8 {
    STAGE_BASE + s.index()
}
