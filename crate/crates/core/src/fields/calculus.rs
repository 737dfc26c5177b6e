use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A smooth 1-periodic function on the torus.
#[derive(Clone)]
pub enum TestFunction {
    Constant(f64),
    /// `√2 cos(2π m x)`
    Cos(u32),
    /// `√2 sin(2π m x)`
    Sin(u32),
    Custom {
        id: String,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl TestFunction {
    pub fn custom(id: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        TestFunction::Custom {
            id: id.into(),
            f: Arc::new(f),
        }
    }

    /// The constant 1 and the first `max_mode` cosine and sine modes.
    pub fn fourier_family(max_mode: u32) -> Vec<Self> {
        let mut out = vec![TestFunction::Constant(1.0)];
        for m in 1..=max_mode {
            out.push(TestFunction::Cos(m));
            out.push(TestFunction::Sin(m));
        }
        out
    }

    pub fn id(&self) -> String {
        match self {
            TestFunction::Constant(c) if *c == 1.0 => "const".into(),
            TestFunction::Constant(c) => format!("const({c})"),
            TestFunction::Cos(m) => format!("cos{m}"),
            TestFunction::Sin(m) => format!("sin{m}"),
            TestFunction::Custom { id, .. } => id.clone(),
        }
    }

    /// Inverse of [`TestFunction::id`] for the closed-form family.
    pub fn parse(id: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("unknown test function {id:?}"));
        if id == "const" {
            return Ok(TestFunction::Constant(1.0));
        }
        if let Some(rest) = id.strip_prefix("const(").and_then(|r| r.strip_suffix(')')) {
            return rest.parse().map(TestFunction::Constant).map_err(|_| bad());
        }
        if let Some(m) = id.strip_prefix("cos") {
            return m.parse().map(TestFunction::Cos).map_err(|_| bad());
        }
        if let Some(m) = id.strip_prefix("sin") {
            return m.parse().map(TestFunction::Sin).map_err(|_| bad());
        }
        Err(bad())
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            TestFunction::Constant(c) => *c,
            TestFunction::Cos(m) => 2f64.sqrt() * (2.0 * PI * *m as f64 * x).cos(),
            TestFunction::Sin(m) => 2f64.sqrt() * (2.0 * PI * *m as f64 * x).sin(),
            TestFunction::Custom { f, .. } => f(x.rem_euclid(1.0)),
        }
    }

    /// Grid values `φ_j = φ(j/n)`.
    pub fn on_grid(&self, n: usize) -> Result<GridFunction> {
        if n == 0 {
            return Err(Error::Dimension("grid size must be >= 1".into()));
        }
        let values: Vec<f64> = (0..n).map(|j| self.eval(j as f64 / n as f64)).collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "test function {} is not finite on the grid",
                self.id()
            )));
        }
        Ok(GridFunction {
            id: self.id(),
            n,
            values,
        })
    }
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TestFunction({})", self.id())
    }
}

impl PartialEq for TestFunction {
    fn eq(&self, other: &Self) -> bool {
        self.id() == other.id()
    }
}

/// `φ` sampled on `ℤ_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    pub id: String,
    pub n: usize,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn gradient(&self) -> Vec<f64> {
        grad(&self.values, self.n)
    }

    pub fn laplacian(&self) -> Vec<f64> {
        laplacian(&self.values, self.n)
    }

    pub fn energy(&self) -> f64 {
        energy(&self.values)
    }

    /// `ℰ_n(∇^n φ)`
    pub fn gradient_energy(&self) -> f64 {
        energy(&self.gradient())
    }
}

/// `∇^n ψ_j = n (ψ_{j+1} − ψ_j)`, periodic.
pub fn grad(psi: &[f64], n: usize) -> Vec<f64> {
    let m = psi.len();
    let scale = n as f64;
    (0..m).map(|j| scale * (psi[(j + 1) % m] - psi[j])).collect()
}

/// `Δ^n ψ_j = n² (ψ_{j+1} + ψ_{j−1} − 2ψ_j)`, periodic.
pub fn laplacian(psi: &[f64], n: usize) -> Vec<f64> {
    let m = psi.len();
    let scale = (n * n) as f64;
    (0..m)
        .map(|j| scale * (psi[(j + 1) % m] + psi[(j + m - 1) % m] - 2.0 * psi[j]))
        .collect()
}

/// `ℰ_n(ψ) = (1/n) Σ_j ψ_j²` with `n = ψ.len()`.
pub fn energy(psi: &[f64]) -> f64 {
    crate::dynamics::neumaier_sum(psi.iter().map(|v| v * v)) / psi.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constants_are_annihilated() {
        let c = TestFunction::Constant(2.5).on_grid(16).unwrap();
        assert!(c.gradient().iter().all(|&v| v == 0.0));
        assert!(c.laplacian().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn closed_form_energies() {
        // on the grid, √2cos(2πmx) has energy 1 and its gradient 4n² sin²(πm/n)
        for n in [8usize, 32, 128] {
            for m in 1..4u32 {
                for phi in [TestFunction::Cos(m), TestFunction::Sin(m)] {
                    let g = phi.on_grid(n).unwrap();
                    assert!((g.energy() - 1.0).abs() < 1e-12);
                    let s = (PI * m as f64 / n as f64).sin();
                    let expected = 4.0 * (n * n) as f64 * s * s;
                    assert!((g.gradient_energy() - expected).abs() < 1e-9 * expected);
                }
            }
        }
    }

    #[test]
    fn ids_round_trip() {
        for phi in TestFunction::fourier_family(4)
            .into_iter()
            .chain([TestFunction::Constant(0.5)])
        {
            assert_eq!(TestFunction::parse(&phi.id()).unwrap(), phi);
        }
        assert!(TestFunction::parse("tan1").is_err());
        let c = TestFunction::custom("bump", |x| (x - 0.5).powi(2));
        assert_eq!(c.id(), "bump");
        assert_eq!(c.eval(1.25), c.eval(0.25));
    }

    #[test]
    fn grid_cache_matches_rule() {
        let phi = TestFunction::Sin(3);
        let g = phi.on_grid(20).unwrap();
        for (j, v) in g.values.iter().enumerate() {
            assert_eq!(*v, phi.eval(j as f64 / 20.0));
            assert!((phi.eval(j as f64 / 20.0 + 1.0) - v).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn summation_by_parts(f in prop::collection::vec(-8i32..8, 2..24), shift in 0usize..24) {
            // integer-valued grids keep both sides exact in f64
            let m = f.len();
            let f: Vec<f64> = f.iter().map(|&v| v as f64).collect();
            let g: Vec<f64> = (0..m).map(|j| f[(j + shift) % m] * 2.0 - 1.0).collect();
            let n = m;
            let lhs: f64 = (0..m).map(|j| f[j] * grad(&g, n)[j]).sum();
            let rhs: f64 = -(0..m).map(|j| g[(j + 1) % m] * grad(&f, n)[j]).sum::<f64>();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn laplacian_is_gradient_of_gradient(f in prop::collection::vec(-50i32..50, 2..24)) {
            let m = f.len();
            let f: Vec<f64> = f.iter().map(|&v| v as f64).collect();
            let gg = grad(&grad(&f, m), m);
            let lap = laplacian(&f, m);
            for j in 0..m {
                prop_assert_eq!(gg[(j + m - 1) % m], lap[j]);
            }
        }
    }
}
