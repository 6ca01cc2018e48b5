//! Stationary entanglement and steering of the effective model in closed
//! form, the steering-region classification and the values on the
//! steady/unsteady boundary `g² = κaκc`.
//!
//! All formulas describe vacuum baths; thermal occupations of the model are
//! not used.

use serde::Serialize;

use crate::chain::{classify_regime, EffectiveModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Direction {
    AtoC,
    CtoA,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SteeringRegion {
    None,
    OneWayAtoC,
    OneWayCtoA,
    TwoWay,
}

impl SteeringRegion {
    pub fn from_presence(a_to_c: bool, c_to_a: bool) -> Self {
        match (a_to_c, c_to_a) {
            (false, false) => Self::None,
            (true, false) => Self::OneWayAtoC,
            (false, true) => Self::OneWayCtoA,
            (true, true) => Self::TwoWay,
        }
    }

    /// Region implied by the signs of raw steering values.
    pub fn from_raw(s_ac: f64, s_ca: f64) -> Self {
        Self::from_presence(s_ac > 0.0, s_ca > 0.0)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::None => "None",
            Self::OneWayAtoC => "OneWayAtoC",
            Self::OneWayCtoA => "OneWayCtoA",
            Self::TwoWay => "TwoWay",
        }
    }

    pub fn a_to_c(self) -> bool {
        matches!(self, Self::OneWayAtoC | Self::TwoWay)
    }

    pub fn c_to_a(self) -> bool {
        matches!(self, Self::OneWayCtoA | Self::TwoWay)
    }
}

impl std::fmt::Display for SteeringRegion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

fn omega(g2: f64, ka: f64, kc: f64) -> f64 {
    (4.0 * g2 + (ka - kc).powi(2)).sqrt()
}

/// Steady-branch entanglement `ln[(κaκc − g²)/(κaκc − g²χ)]`, written as
/// `−ln(1 − 4κaκc/((κa+κc)²(χ+1)))` to avoid cancellation near the boundary.
pub fn entanglement_steady_branch(g2: f64, ka: f64, kc: f64) -> f64 {
    if g2 == 0.0 {
        return 0.0;
    }
    let sum2 = (ka + kc).powi(2);
    let y = 4.0 * ka * kc * (ka * kc - g2) / (g2 * sum2);
    let chi = (1.0 + y).sqrt();
    -(-4.0 * ka * kc / (sum2 * (chi + 1.0))).ln_1p()
}

/// Unsteady-branch entanglement `ln(1 + 4g²/χ̃)`, `χ̃ = Ω(κa+κc) + (κa−κc)²`.
pub fn entanglement_unsteady_branch(g2: f64, ka: f64, kc: f64) -> f64 {
    let chi_t = omega(g2, ka, kc) * (ka + kc) + (ka - kc).powi(2);
    (4.0 * g2 / chi_t).ln_1p()
}

/// Steady-branch `S_{a→c}`; swap the rates for `S_{c→a}`.
pub fn steering_steady_branch(g2: f64, ka: f64, kc: f64) -> f64 {
    let xi = ka * kc * (ka + kc).powi(2);
    ((g2 * (kc * kc - ka * ka) + xi) / (g2 * (ka - kc).powi(2) + xi)).ln()
}

/// Unsteady-branch `S_{a→c}`; swap the rates for `S_{c→a}`.
pub fn steering_unsteady_branch(g2: f64, ka: f64, kc: f64) -> f64 {
    let om = omega(g2, ka, kc);
    ((om - ka + kc) / (2.0 * om)).ln() + entanglement_unsteady_branch(g2, ka, kc)
}

/// Stationary logarithmic negativity. Critical points use the unsteady
/// branch.
pub fn stationary_entanglement(m: &EffectiveModel) -> f64 {
    let g2 = m.g_eff * m.g_eff;
    if g2 == 0.0 {
        return 0.0;
    }
    if classify_regime(m).is_steady() {
        entanglement_steady_branch(g2, m.kappa_a, m.kappa_c)
    } else {
        entanglement_unsteady_branch(g2, m.kappa_a, m.kappa_c)
    }
}

/// Stationary raw (signed) steering in the given direction.
pub fn stationary_steering(m: &EffectiveModel, direction: Direction) -> f64 {
    let g2 = m.g_eff * m.g_eff;
    let (ka, kc) = match direction {
        Direction::AtoC => (m.kappa_a, m.kappa_c),
        Direction::CtoA => (m.kappa_c, m.kappa_a),
    };
    if classify_regime(m).is_steady() {
        steering_steady_branch(g2, ka, kc)
    } else {
        steering_unsteady_branch(g2, ka, kc)
    }
}

/// Steering region from the parameter inequalities alone.
///
/// Steady regime: `a` steers `c` iff `κa < κc`. Unsteady or critical:
/// `a` steers `c` iff `g² + κaκc > 2κa²`. The `c → a` conditions swap the
/// rates. Zero coupling gives [`SteeringRegion::None`].
pub fn steering_region(m: &EffectiveModel) -> SteeringRegion {
    let g2 = m.g_eff * m.g_eff;
    if g2 == 0.0 {
        return SteeringRegion::None;
    }
    let (ka, kc) = (m.kappa_a, m.kappa_c);
    if classify_regime(m).is_steady() {
        SteeringRegion::from_presence(ka < kc, kc < ka)
    } else {
        SteeringRegion::from_presence(g2 + ka * kc > 2.0 * ka * ka, g2 + ka * kc > 2.0 * kc * kc)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundaryLimits {
    pub entanglement: f64,
    pub steering_ac: f64,
    pub steering_ca: f64,
}

/// Values at `g² = κaκc`.
pub fn boundary_limits(kappa_a: f64, kappa_c: f64) -> BoundaryLimits {
    let (ka, kc) = (kappa_a, kappa_c);
    let sq = ka * ka + kc * kc;
    BoundaryLimits {
        entanglement: ((ka + kc).powi(2) / sq).ln(),
        steering_ac: ((ka * kc + kc * kc) / sq).ln(),
        steering_ca: ((ka * ka + ka * kc) / sq).ln(),
    }
}
