use crate::error::{KineticError, Result};
use crate::scalar::Real;

/// Physical Maxwellian parameters `(rho, V, T)` with `T = p / rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxwellianState<T> {
    pub rho: T,
    pub velocity: [T; 3],
    pub temperature: T,
}

impl<T: Real> MaxwellianState<T> {
    pub fn new(rho: T, velocity: [T; 3], temperature: T) -> Self {
        Self {
            rho,
            velocity,
            temperature,
        }
    }

    /// Density at physical velocity `u`.
    pub fn density_at(&self, u: [T; 3]) -> T {
        let two_t = T::two() * self.temperature;
        let d2: T = (0..3).map(|d| (u[d] - self.velocity[d]).powi(2)).sum();
        self.rho / (T::PI() * two_t).pow_three_halves() * (-d2 / two_t).exp()
    }
}

/// Boundary treatment at one end of the 1D domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryKind<T> {
    /// Incoming velocities take the prescribed Maxwellian.
    Inflow(MaxwellianState<T>),
    /// Outgoing velocities leave freely; incoming ones see a frozen far-field
    /// Maxwellian (the initial state next to the boundary).
    Outflow(MaxwellianState<T>),
    /// Mirror reflection `v -> v - 2 (v.n) n`.
    Specular,
    /// Re-emission from a wall Maxwellian, normalized to zero net mass flux.
    Diffuse {
        wall_velocity: [T; 3],
        wall_temperature: T,
    },
}

impl<T: Real> BoundaryKind<T> {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Diffuse {
                wall_temperature, ..
            } if !(*wall_temperature > T::zero()) => Err(KineticError::invalid(
                "diffuse wall requires a positive wall temperature",
            )),
            Self::Inflow(s) | Self::Outflow(s)
                if !(s.rho > T::zero() && s.temperature > T::zero()) =>
            {
                Err(KineticError::invalid("boundary Maxwellian needs rho > 0 and T > 0"))
            }
            _ => Ok(()),
        }
    }

    /// Whether the boundary prescribes data (Dirichlet for the frame smoother).
    pub fn prescribed_state(&self) -> Option<&MaxwellianState<T>> {
        match self {
            Self::Inflow(s) | Self::Outflow(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundaries<T> {
    Periodic,
    Ends {
        left: BoundaryKind<T>,
        right: BoundaryKind<T>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D<T> {
    vertices: Vec<T>,
    boundaries: Boundaries<T>,
}

impl<T: Real> Mesh1D<T> {
    pub fn new(vertices: Vec<T>, boundaries: Boundaries<T>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(KineticError::invalid("mesh needs at least one element"));
        }
        if vertices.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(KineticError::invalid("mesh vertices must be strictly increasing"));
        }
        if let Boundaries::Ends { left, right } = &boundaries {
            left.validate()?;
            right.validate()?;
        }
        Ok(Self {
            vertices,
            boundaries,
        })
    }

    pub fn uniform(left: T, right: T, n_elements: usize, boundaries: Boundaries<T>) -> Result<Self> {
        if n_elements == 0 {
            return Err(KineticError::invalid("mesh needs at least one element"));
        }
        let h = (right - left) / T::from_usize_lossy(n_elements);
        let vertices = (0..=n_elements)
            .map(|i| {
                if i == n_elements {
                    right
                } else {
                    left + h * T::from_usize_lossy(i)
                }
            })
            .collect();
        Self::new(vertices, boundaries)
    }

    pub fn n_elements(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertices(&self) -> &[T] {
        &self.vertices
    }

    pub fn boundaries(&self) -> &Boundaries<T> {
        &self.boundaries
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.boundaries, Boundaries::Periodic)
    }

    pub fn element_bounds(&self, e: usize) -> (T, T) {
        (self.vertices[e], self.vertices[e + 1])
    }

    pub fn element_size(&self, e: usize) -> T {
        self.vertices[e + 1] - self.vertices[e]
    }

    pub fn min_element_size(&self) -> T {
        (0..self.n_elements())
            .map(|e| self.element_size(e))
            .fold(T::infinity(), T::min)
    }

    pub fn max_element_size(&self) -> T {
        (0..self.n_elements())
            .map(|e| self.element_size(e))
            .fold(T::zero(), T::max)
    }

    pub fn domain(&self) -> (T, T) {
        (self.vertices[0], *self.vertices.last().expect("non-empty mesh"))
    }

    /// Physical coordinate of reference point `xi` in element `e`.
    pub fn map_to_physical(&self, e: usize, xi: T) -> T {
        let (a, b) = self.element_bounds(e);
        T::half() * (a + b) + T::half() * (b - a) * xi
    }

    /// Element containing `x` and the reference coordinate; points on an
    /// interior vertex belong to the element on the right.
    pub fn locate(&self, x: T) -> Option<(usize, T)> {
        let (lo, hi) = self.domain();
        if x < lo || x > hi {
            return None;
        }
        let e = match self.vertices.binary_search_by(|v| v.partial_cmp(&x).expect("finite")) {
            Ok(i) => i.min(self.n_elements() - 1),
            Err(i) => i - 1,
        };
        let (a, b) = self.element_bounds(e);
        Some((e, (T::two() * x - a - b) / (b - a)))
    }

    pub fn has_vertex_at(&self, x: T, tol: T) -> bool {
        self.vertices.iter().any(|&v| (v - x).abs() <= tol)
    }
}
