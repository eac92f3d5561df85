mod common;

use approx::assert_relative_eq;
use common::{oracle_stiffness, rigid_modes};
use nalgebra::{DMatrix, DVector};
use topopt::fem::{element_stiffness, quadrature, ElementFamily, ElementGeometry, Material, MaterialModel};

fn unit_shapes() -> Vec<ElementGeometry> {
    vec![
        ElementGeometry::new(0, ElementFamily::P1, &[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap(),
        ElementGeometry::new(0, ElementFamily::P1, &[[0.2, -0.1], [1.7, 0.4], [0.5, 1.3]]).unwrap(),
        ElementGeometry::new(
            0,
            ElementFamily::P2,
            &[[0.0, 0.0], [2.0, 0.5], [0.5, 1.5], [1.0, 0.25], [1.25, 1.0], [0.25, 0.75]],
        )
        .unwrap(),
        ElementGeometry::new(0, ElementFamily::Q1, &[[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [0.0, 1.0]]).unwrap(),
        // parallelogram
        ElementGeometry::new(0, ElementFamily::Q1, &[[0.0, 0.0], [1.5, 0.3], [2.0, 1.4], [0.5, 1.1]]).unwrap(),
    ]
}

#[test]
fn stiffness_matches_high_order_oracle() {
    for model in [MaterialModel::Lame3d, MaterialModel::PlaneStress] {
        let m = Material::new(2.5, 0.3, model).unwrap();
        for g in unit_shapes() {
            let k = element_stiffness(&g, &m).unwrap().matrix;
            let oracle = oracle_stiffness(&g, &m, 10);
            let scale = oracle.amax();
            assert!((k - oracle).amax() <= 1e-12 * scale, "{:?}", g.family);
        }
    }
}

#[test]
fn p1_reference_triangle_closed_form() {
    // B is constant; area 1/2
    let m = Material::default();
    let g = ElementGeometry::new(0, ElementFamily::P1, &[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
    let k = element_stiffness(&g, &m).unwrap().matrix;
    let (l, mu) = (m.lambda, m.mu);
    assert_relative_eq!(k[(0, 0)], 0.5 * (l + 2.0 * mu + mu), epsilon = 1e-14);
    assert_relative_eq!(k[(2, 2)], 0.5 * (l + 2.0 * mu), epsilon = 1e-14);
    assert_relative_eq!(k[(2, 5)], 0.5 * l, epsilon = 1e-14);
    assert_relative_eq!(k[(3, 4)], 0.5 * mu, epsilon = 1e-14);
}

#[test]
fn rigid_modes_are_in_kernel_and_rank_is_full_otherwise() {
    let m = Material::default();
    for g in unit_shapes() {
        let k = element_stiffness(&g, &m).unwrap().matrix;
        assert!((&k - k.transpose()).amax() == 0.0);
        for mode in rigid_modes(g.coords()) {
            let r = &k * DVector::from_vec(mode);
            assert!(r.amax() <= 1e-12 * k.amax());
        }
        let eig = k.clone().symmetric_eigen().eigenvalues;
        let tol = 1e-10 * eig.amax();
        assert_eq!(eig.iter().filter(|&&e| e.abs() <= tol).count(), 3);
        assert!(eig.iter().all(|&e| e > -tol));
    }
}

#[test]
fn stiffness_is_rotation_congruent() {
    let m = Material::default();
    let theta: f64 = 0.7;
    let (c, s) = (theta.cos(), theta.sin());
    for g in unit_shapes() {
        let rotated: Vec<[f64; 2]> = g.coords().iter().map(|p| [c * p[0] - s * p[1], s * p[0] + c * p[1]]).collect();
        let gr = ElementGeometry::new(0, g.family, &rotated).unwrap();
        let k = element_stiffness(&g, &m).unwrap().matrix;
        let kr = element_stiffness(&gr, &m).unwrap().matrix;
        let n = g.coords().len();
        let mut r = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            r[(2 * i, 2 * i)] = c;
            r[(2 * i, 2 * i + 1)] = -s;
            r[(2 * i + 1, 2 * i)] = s;
            r[(2 * i + 1, 2 * i + 1)] = c;
        }
        let expect = &r * k * r.transpose();
        assert!((&kr - &expect).amax() <= 1e-12 * expect.amax());
    }
}

#[test]
fn p2_quadratic_field_energy_is_exact() {
    // u = (x^2, x y): strain (2x, x, y)
    let m = Material::default();
    let g = ElementGeometry::new(
        0,
        ElementFamily::P2,
        &[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.5, 0.0], [0.5, 0.5], [0.0, 0.5]],
    )
    .unwrap();
    let u: Vec<f64> = g.coords().iter().flat_map(|p| [p[0] * p[0], p[0] * p[1]]).collect();
    let energy = topopt::fem::strain_energy(&g, &m, &u).unwrap();
    // int_T eps^T A eps with eps = (2x, x, y)
    let (l, mu) = (m.lambda, m.mu);
    let (xx, yy) = (1.0 / 12.0, 1.0 / 12.0);
    let exact = (l + 2.0 * mu) * (4.0 * xx + xx) + 2.0 * l * 2.0 * xx + mu * yy;
    assert_relative_eq!(energy, exact, max_relative = 1e-13);
}

#[test]
fn quadrature_exact_through_degree_five() {
    let rule = quadrature::QuadratureRule::triangle_7();
    let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
    for a in 0..=5u32 {
        for b in 0..=(5 - a) {
            let q: f64 = rule
                .points
                .iter()
                .zip(&rule.weights)
                .map(|(p, w)| w * rule.reference_measure * p[0].powi(a as i32) * p[1].powi(b as i32))
                .sum();
            let exact = fact(a) * fact(b) / fact(a + b + 2);
            assert!((q - exact).abs() <= 1e-12, "x^{a} y^{b}");
        }
    }
}
