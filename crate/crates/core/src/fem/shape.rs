use super::ElementFamily;

pub const MAX_NODES: usize = 6;

/// Shape function values and reference-coordinate gradients at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeEval {
    pub len: usize,
    pub values: [f64; MAX_NODES],
    pub grads: [[f64; 2]; MAX_NODES],
}

impl ShapeEval {
    pub fn values(&self) -> &[f64] {
        &self.values[..self.len]
    }

    pub fn grads(&self) -> &[[f64; 2]] {
        &self.grads[..self.len]
    }
}

/// P1 and P2 use the unit reference triangle `{x, y >= 0, x + y <= 1}`,
/// Q1 the square `[-1, 1]^2` with counterclockwise corners.
pub fn shape_functions(family: ElementFamily, xi: [f64; 2]) -> ShapeEval {
    let [x, y] = xi;
    let mut out = ShapeEval {
        len: family.nodes_per_element(),
        values: [0.0; MAX_NODES],
        grads: [[0.0; 2]; MAX_NODES],
    };
    match family {
        ElementFamily::P1 => {
            out.values[..3].copy_from_slice(&[1.0 - x - y, x, y]);
            out.grads[..3].copy_from_slice(&[[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]]);
        }
        ElementFamily::P2 => {
            let l = 1.0 - x - y;
            out.values[..6].copy_from_slice(&[
                l * (1.0 - 2.0 * x - 2.0 * y),
                x * (2.0 * x - 1.0),
                y * (2.0 * y - 1.0),
                4.0 * x * l,
                4.0 * x * y,
                4.0 * y * l,
            ]);
            let d1 = 4.0 * x + 4.0 * y - 3.0;
            out.grads[..6].copy_from_slice(&[
                [d1, d1],
                [4.0 * x - 1.0, 0.0],
                [0.0, 4.0 * y - 1.0],
                [4.0 * (1.0 - 2.0 * x - y), -4.0 * x],
                [4.0 * y, 4.0 * x],
                [-4.0 * y, 4.0 * (1.0 - x - 2.0 * y)],
            ]);
        }
        ElementFamily::Q1 => {
            for (i, &[a, b]) in family.reference_vertices().iter().enumerate() {
                out.values[i] = 0.25 * (1.0 + a * x) * (1.0 + b * y);
                out.grads[i] = [0.25 * a * (1.0 + b * y), 0.25 * b * (1.0 + a * x)];
            }
        }
    }
    out
}

/// Second derivatives `(d2/dxi2, d2/dxi deta, d2/deta2)` in reference coordinates.
pub fn shape_hessians(family: ElementFamily, xi: [f64; 2]) -> [[f64; 3]; MAX_NODES] {
    let _ = xi;
    let mut h = [[0.0; 3]; MAX_NODES];
    match family {
        ElementFamily::P1 => {}
        ElementFamily::P2 => {
            h[..6].copy_from_slice(&[
                [4.0, 4.0, 4.0],
                [4.0, 0.0, 0.0],
                [0.0, 0.0, 4.0],
                [-8.0, -4.0, 0.0],
                [0.0, 4.0, 0.0],
                [0.0, -4.0, -8.0],
            ]);
        }
        ElementFamily::Q1 => {
            for (i, &[a, b]) in family.reference_vertices().iter().enumerate() {
                h[i] = [0.0, 0.25 * a * b, 0.0];
            }
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn point_in(family: ElementFamily, u: f64, v: f64) -> [f64; 2] {
        match family {
            ElementFamily::Q1 => [2.0 * u - 1.0, 2.0 * v - 1.0],
            // fold the unit square onto the triangle
            _ if u + v > 1.0 => [1.0 - u, 1.0 - v],
            _ => [u, v],
        }
    }

    #[test]
    fn p1_at_origin() {
        let s = shape_functions(ElementFamily::P1, [0.0, 0.0]);
        assert_eq!(s.values(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn p2_at_first_midside() {
        let s = shape_functions(ElementFamily::P2, [0.5, 0.0]);
        assert_eq!(s.values(), &[0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn nodal_interpolation_property() {
        for family in ElementFamily::ALL {
            for (i, &p) in family.reference_nodes().iter().enumerate() {
                let s = shape_functions(family, p);
                for (j, &v) in s.values().iter().enumerate() {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((v - expected).abs() < 1e-15, "{family} node {i} fn {j}: {v}");
                }
            }
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let h = 1e-6;
        for family in ElementFamily::ALL {
            let p = point_in(family, 0.23, 0.41);
            let s = shape_functions(family, p);
            for d in 0..2 {
                let mut pp = p;
                let mut pm = p;
                pp[d] += h;
                pm[d] -= h;
                let (sp, sm) = (shape_functions(family, pp), shape_functions(family, pm));
                for i in 0..s.len {
                    let fd = (sp.values[i] - sm.values[i]) / (2.0 * h);
                    assert!((fd - s.grads[i][d]).abs() < 1e-8);
                }
                let hs = shape_hessians(family, p);
                for i in 0..s.len {
                    let fd_x = (sp.grads[i][0] - sm.grads[i][0]) / (2.0 * h);
                    let fd_y = (sp.grads[i][1] - sm.grads[i][1]) / (2.0 * h);
                    // column d of the hessian
                    let (hx, hy) = if d == 0 { (hs[i][0], hs[i][1]) } else { (hs[i][1], hs[i][2]) };
                    assert!((fd_x - hx).abs() < 1e-7 && (fd_y - hy).abs() < 1e-7);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn partition_of_unity(u in 0.0f64..1.0, v in 0.0f64..1.0) {
            for family in ElementFamily::ALL {
                let s = shape_functions(family, point_in(family, u, v));
                let sum: f64 = s.values().iter().sum();
                let gx: f64 = s.grads().iter().map(|g| g[0]).sum();
                let gy: f64 = s.grads().iter().map(|g| g[1]).sum();
                prop_assert!((sum - 1.0).abs() <= 1e-14);
                prop_assert!(gx.abs() <= 1e-14 && gy.abs() <= 1e-14);
            }
        }
    }
}
