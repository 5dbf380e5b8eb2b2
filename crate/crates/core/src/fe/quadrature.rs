//! Symmetric triangle rules (Dunavant) and Gauss-Legendre rules on [0, 1].

/// Quadrature rule on the reference triangle in barycentric coordinates.
/// Weights sum to one, so integrals are `area * sum(w * f)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl TriangleRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

fn push_orbit_3(points: &mut Vec<[f64; 3]>, weights: &mut Vec<f64>, a: f64, w: f64) {
    let b = 1.0 - 2.0 * a;
    for p in [[b, a, a], [a, b, a], [a, a, b]] {
        points.push(p);
        weights.push(w);
    }
}

fn push_orbit_6(points: &mut Vec<[f64; 3]>, weights: &mut Vec<f64>, a: f64, b: f64, w: f64) {
    let c = 1.0 - a - b;
    for p in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
        points.push(p);
        weights.push(w);
    }
}

/// Six-point rule exact for polynomials of degree 4. Used for assembly.
pub fn triangle_degree4() -> TriangleRule {
    let mut points = Vec::with_capacity(6);
    let mut weights = Vec::with_capacity(6);
    push_orbit_3(&mut points, &mut weights, 0.445948490915965, 0.223381589678011);
    push_orbit_3(&mut points, &mut weights, 0.091576213509771, 0.109951743655322);
    TriangleRule {
        points,
        weights,
        degree: 4,
    }
}

/// Twelve-point rule exact for polynomials of degree 6. Used for error norms.
pub fn triangle_degree6() -> TriangleRule {
    let mut points = Vec::with_capacity(12);
    let mut weights = Vec::with_capacity(12);
    push_orbit_3(&mut points, &mut weights, 0.249286745170910, 0.116786275726379);
    push_orbit_3(&mut points, &mut weights, 0.063089014491502, 0.050844906370207);
    push_orbit_6(
        &mut points,
        &mut weights,
        0.053145049844817,
        0.310352451033784,
        0.082851075618374,
    );
    TriangleRule {
        points,
        weights,
        degree: 6,
    }
}

/// Gauss-Legendre rule on [0, 1] with weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct LineRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

/// `n`-point Gauss-Legendre rule on [0, 1], for `n` in 1..=4.
pub fn gauss_legendre(n: usize) -> LineRule {
    let (nodes, w): (Vec<f64>, Vec<f64>) = match n {
        1 => (vec![0.0], vec![2.0]),
        2 => {
            let x = 1.0 / 3f64.sqrt();
            (vec![-x, x], vec![1.0, 1.0])
        }
        3 => {
            let x = (0.6f64).sqrt();
            (vec![-x, 0.0, x], vec![5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0])
        }
        4 => {
            let r = (6.0f64 / 5.0).sqrt();
            let x1 = ((3.0 - 2.0 * r) / 7.0).sqrt();
            let x2 = ((3.0 + 2.0 * r) / 7.0).sqrt();
            let w1 = (18.0 + 30f64.sqrt()) / 36.0;
            let w2 = (18.0 - 30f64.sqrt()) / 36.0;
            (vec![-x2, -x1, x1, x2], vec![w2, w1, w1, w2])
        }
        _ => panic!("Gauss-Legendre rule with {n} points is not tabulated"),
    };
    LineRule {
        points: nodes.iter().map(|x| 0.5 * (x + 1.0)).collect(),
        weights: w.iter().map(|w| 0.5 * w).collect(),
    }
}
