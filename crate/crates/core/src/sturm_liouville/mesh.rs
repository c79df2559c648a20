use crate::scalar::Real;

use super::SolverError;

/// Element size ratio of the geometric grading is defined at this resolution;
/// finer meshes subdivide the same node density.
const GRADING_REFERENCE_ELEMENTS: f64 = 64.0;

pub const DEFAULT_GEOMETRIC_RATIO: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Grading {
    Uniform,
    /// Elements shrink toward the left endpoint by `ratio` per element at the
    /// 64-element reference resolution.
    Geometric(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshSpec {
    elements: usize,
    grading: Grading,
}

impl MeshSpec {
    pub const MIN_ELEMENTS: usize = 8;

    pub fn new(elements: usize, grading: Grading) -> Result<Self, SolverError> {
        if elements < Self::MIN_ELEMENTS {
            return Err(SolverError::InvalidMesh(format!(
                "need at least {} elements, got {elements}",
                Self::MIN_ELEMENTS
            )));
        }
        if let Grading::Geometric(ratio) = grading {
            if !(ratio > 0.0 && ratio <= 1.0) {
                return Err(SolverError::InvalidMesh(format!("geometric ratio {ratio} outside (0, 1]")));
            }
        }
        Ok(Self { elements, grading })
    }

    pub fn uniform(elements: usize) -> Result<Self, SolverError> {
        Self::new(elements, Grading::Uniform)
    }

    pub fn graded(elements: usize) -> Result<Self, SolverError> {
        Self::new(elements, Grading::Geometric(DEFAULT_GEOMETRIC_RATIO))
    }

    pub fn elements(&self) -> usize {
        self.elements
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    /// Same grading with a different element count.
    pub fn with_elements(&self, elements: usize) -> Result<Self, SolverError> {
        Self::new(elements, self.grading)
    }

    /// Node coordinates on `[left, right]`, strictly increasing, endpoints exact.
    pub fn nodes<T: Real>(&self, left: T, right: T) -> Vec<T> {
        let n = self.elements;
        let length = right - left;
        let map: Box<dyn Fn(f64) -> f64> = match self.grading {
            Grading::Geometric(ratio) if ratio < 1.0 => {
                // exponential density: consecutive sizes grow by ratio^(-64/n)
                let kappa = -GRADING_REFERENCE_ELEMENTS * ratio.ln();
                let denom = kappa.exp_m1();
                Box::new(move |xi: f64| (kappa * xi).exp_m1() / denom)
            }
            _ => Box::new(|xi: f64| xi),
        };
        let mut nodes = Vec::with_capacity(n + 1);
        nodes.push(left);
        for j in 1..n {
            let xi = j as f64 / n as f64;
            nodes.push(left + length * T::lit(map(xi)));
        }
        nodes.push(right);
        nodes
    }
}
