//! Physical description of the string and the point damper.

use std::f64::consts::PI;
use std::fmt;

/// Physical constants of the string: length, distributed (internal) damping
/// coefficient and stiffness.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StringParams {
    /// Length of the string in meters.
    pub length: f64,
    /// Internal viscous damping coefficient, 1/s. Zero is admitted but the
    /// undamped string has poles on the imaginary axis, so norm computations
    /// may report divergence.
    pub internal_damping: f64,
    /// Stiffness (wave speed squared), m^2/s^2.
    pub stiffness: f64,
}

impl StringParams {
    pub fn new(length: f64, internal_damping: f64, stiffness: f64) -> Result<Self, ModelError> {
        if !(length.is_finite() && length > 0.0) {
            return Err(ModelError::InvalidLength(length));
        }
        if !(stiffness.is_finite() && stiffness > 0.0) {
            return Err(ModelError::InvalidStiffness(stiffness));
        }
        if !(internal_damping.is_finite() && internal_damping >= 0.0) {
            return Err(ModelError::InvalidDamping(internal_damping));
        }
        Ok(Self {
            length,
            internal_damping,
            stiffness,
        })
    }

    /// Approximate spacing `pi*sqrt(k)/l` between resonance peaks of the
    /// undamped string; used to pace frequency scans.
    pub fn modal_spacing(&self) -> f64 {
        PI * self.stiffness.sqrt() / self.length
    }
}

/// A single point damper: position along the string and viscosity (gain).
///
/// Positions on the closed interval `[0, length]` are accepted; a damper at
/// either endpoint is inert (it sits on a homogeneous Dirichlet node), which
/// lets parameter sweeps include the figure-axis edges.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Damper {
    /// Damper position in meters, measured from the left end.
    pub position: f64,
    /// Damper viscosity (gain), non-negative.
    pub gain: f64,
}

impl Damper {
    pub fn new(position: f64, gain: f64) -> Result<Self, ModelError> {
        if !(position.is_finite() && position >= 0.0) {
            return Err(ModelError::InvalidPosition(position));
        }
        if !(gain.is_finite() && gain >= 0.0) {
            return Err(ModelError::InvalidGain(gain));
        }
        Ok(Self { position, gain })
    }

    /// Check the position against a concrete string.
    pub fn validate_for(&self, params: &StringParams) -> Result<(), ModelError> {
        if self.position > params.length {
            return Err(ModelError::PositionOutsideString {
                position: self.position,
                length: params.length,
            });
        }
        Ok(())
    }
}

/// Input (forcing) shape of the model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Forcing {
    /// Spatially constant distributed input with homogeneous Dirichlet
    /// boundaries (b = 1, b_L = b_R = 0).
    Uniform,
    /// Input applied as the left Dirichlet boundary value; no distributed
    /// force (b = 0, b_L = 1, b_R = 0).
    BoundaryLeft,
}

impl fmt::Display for Forcing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Forcing::Uniform => write!(f, "uniform"),
            Forcing::BoundaryLeft => write!(f, "boundary"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelError {
    InvalidLength(f64),
    InvalidStiffness(f64),
    InvalidDamping(f64),
    InvalidPosition(f64),
    InvalidGain(f64),
    PositionOutsideString { position: f64, length: f64 },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::InvalidLength(v) => write!(f, "string length must be positive, got {v}"),
            ModelError::InvalidStiffness(v) => write!(f, "stiffness must be positive, got {v}"),
            ModelError::InvalidDamping(v) => {
                write!(f, "internal damping must be non-negative, got {v}")
            }
            ModelError::InvalidPosition(v) => {
                write!(f, "damper position must be non-negative and finite, got {v}")
            }
            ModelError::InvalidGain(v) => write!(f, "damper gain must be non-negative, got {v}"),
            ModelError::PositionOutsideString { position, length } => {
                write!(f, "damper position {position} outside string of length {length}")
            }
        }
    }
}

impl std::error::Error for ModelError {}
