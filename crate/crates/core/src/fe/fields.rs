//! Space-time data functions and boundary conditions.

use std::fmt;
use std::sync::Arc;

use crate::mesh::Side;

pub type ScalarField = Arc<dyn Fn([f64; 2], f64) -> f64 + Send + Sync>;
pub type VectorField = Arc<dyn Fn([f64; 2], f64) -> [f64; 2] + Send + Sync>;

pub fn scalar_constant(c: f64) -> ScalarField {
    Arc::new(move |_, _| c)
}

pub fn vector_constant(c: [f64; 2]) -> VectorField {
    Arc::new(move |_, _| c)
}

pub fn scalar_zero() -> ScalarField {
    scalar_constant(0.0)
}

pub fn vector_zero() -> VectorField {
    vector_constant([0.0, 0.0])
}

/// Kind of condition on an exterior side; decides which dofs are essential.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WallKind {
    /// Both velocity components prescribed.
    Velocity,
    /// Only the normal velocity component prescribed.
    NormalVelocity,
    /// Natural condition carrying a prescribed normal stress / pressure.
    Traction,
}

#[derive(Clone)]
pub enum BoundaryCondition {
    Velocity(VectorField),
    /// The normal component of the given field is imposed.
    NormalVelocity(VectorField),
    /// Boundary pressure `p_b`, entering as the load `-(p_b, v.n)`.
    Traction(ScalarField),
}

impl BoundaryCondition {
    pub fn kind(&self) -> WallKind {
        match self {
            BoundaryCondition::Velocity(_) => WallKind::Velocity,
            BoundaryCondition::NormalVelocity(_) => WallKind::NormalVelocity,
            BoundaryCondition::Traction(_) => WallKind::Traction,
        }
    }

    pub fn no_slip() -> Self {
        BoundaryCondition::Velocity(vector_zero())
    }

    pub fn no_flow() -> Self {
        BoundaryCondition::NormalVelocity(vector_zero())
    }
}

impl fmt::Debug for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.kind())
    }
}

/// Conditions on the three exterior sides of a subdomain. The entry for the
/// interface side is ignored.
#[derive(Clone, Debug)]
pub struct Walls {
    sides: [Option<BoundaryCondition>; 4],
}

impl Walls {
    pub fn new() -> Self {
        Self {
            sides: [None, None, None, None],
        }
    }

    pub fn with(mut self, side: Side, bc: BoundaryCondition) -> Self {
        self.sides[side.index()] = Some(bc);
        self
    }

    /// Same condition on every side.
    pub fn uniform(bc: BoundaryCondition) -> Self {
        let mut w = Self::new();
        for s in Side::ALL {
            w.sides[s.index()] = Some(bc.clone());
        }
        w
    }

    pub fn get(&self, side: Side) -> Option<&BoundaryCondition> {
        self.sides[side.index()].as_ref()
    }

    /// Kind per side; sides left unset default to traction-free.
    pub fn kinds(&self) -> [WallKind; 4] {
        Side::ALL.map(|s| self.get(s).map_or(WallKind::Traction, BoundaryCondition::kind))
    }
}

impl Default for Walls {
    fn default() -> Self {
        Self::new()
    }
}
