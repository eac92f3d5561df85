//! Quadrature rules on the reference triangle, the reference square and the
//! unit interval.
//!
//! Weights are normalized to sum to one; the measure of the reference cell is
//! carried separately so that `integral = measure * sum(w_i f(x_i) |det J|)`.

use super::ElementFamily;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    /// Area of the reference cell (1/2 for the triangle, 4 for the square).
    pub reference_measure: f64,
}

impl QuadratureRule {
    /// Symmetric 7-point rule, exact for total degree 5.
    pub fn triangle_7() -> Self {
        let s15 = 15f64.sqrt();
        let a1 = (6.0 - s15) / 21.0;
        let a2 = (6.0 + s15) / 21.0;
        let w1 = (155.0 - s15) / 1200.0;
        let w2 = (155.0 + s15) / 1200.0;
        let orbit = |a: f64| {
            let b = 1.0 - 2.0 * a;
            [[a, a], [b, a], [a, b]]
        };
        let mut points = vec![[1.0 / 3.0, 1.0 / 3.0]];
        points.extend(orbit(a1));
        points.extend(orbit(a2));
        let mut weights = vec![9.0 / 40.0];
        weights.extend([w1; 3]);
        weights.extend([w2; 3]);
        Self {
            points,
            weights,
            reference_measure: 0.5,
        }
    }

    /// One-point centroid rule.
    pub fn triangle_1() -> Self {
        Self {
            points: vec![[1.0 / 3.0, 1.0 / 3.0]],
            weights: vec![1.0],
            reference_measure: 0.5,
        }
    }

    /// Tensor Gauss-Legendre rule with `n` points per direction on `[-1, 1]^2`.
    pub fn square_gauss(n: usize) -> Self {
        let (xs, ws) = gauss_legendre(n);
        let mut points = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        for (j, &y) in xs.iter().enumerate() {
            for (i, &x) in xs.iter().enumerate() {
                points.push([x, y]);
                weights.push(0.25 * ws[i] * ws[j]);
            }
        }
        Self {
            points,
            weights,
            reference_measure: 4.0,
        }
    }

    /// Default stiffness rule for a family: centroid for P1, 7 points for P2,
    /// 2x2 Gauss for Q1.
    pub fn stiffness_rule(family: ElementFamily) -> Self {
        match family {
            ElementFamily::P1 => Self::triangle_1(),
            ElementFamily::P2 => Self::triangle_7(),
            ElementFamily::Q1 => Self::square_gauss(2),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` for `n` in `1..=3`.
///
/// # Panics
/// For any other `n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    match n {
        1 => (vec![0.0], vec![2.0]),
        2 => {
            let g = 1.0 / 3f64.sqrt();
            (vec![-g, g], vec![1.0, 1.0])
        }
        3 => {
            let g = (0.6f64).sqrt();
            (vec![-g, 0.0, g], vec![5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0])
        }
        _ => panic!("gauss_legendre: unsupported point count {n}"),
    }
}

/// Three-point Gauss rule on `[0, 1]`: `(t_i, w_i)` with weights summing to one.
pub fn edge_rule() -> [(f64, f64); 3] {
    let (xs, ws) = gauss_legendre(3);
    [0, 1, 2].map(|i| (0.5 * (xs[i] + 1.0), 0.5 * ws[i]))
}
