//! The rational Heisenberg group, its embedding into projective 3-space,
//! and the induced left and right translation actions.
//!
//! An element is the upper-triangular matrix
//!
//! ```text
//!         [ 1  x  z ]
//! g(x,z,y)=[ 0  1  y ]
//!         [ 0  0  1 ]
//! ```
//!
//! and the compactification embeds `g(x,z,y)` as the projective point
//! `[1 : x : y : z]`. The boundary hyperplane is `a = 0`. Both translation
//! actions extend to linear maps on the projective coordinates, and the
//! right action fixes the first coordinate, which is what makes it useful
//! for invariance checks on counted points.

use num_traits::Zero;

use crate::arith::{primitive_rep, PrimitivePoint, Rational};
use crate::error::Result;

/// A unipotent upper-triangular 3x3 matrix over the rationals, stored by
/// its three free entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupElement {
    x: Rational,
    z: Rational,
    y: Rational,
}

impl GroupElement {
    /// Entries in matrix order: `x` top-middle, `z` top-right, `y`
    /// middle-right.
    pub fn new(x: Rational, z: Rational, y: Rational) -> Self {
        GroupElement { x, z, y }
    }

    pub fn from_integers(x: i64, z: i64, y: i64) -> Self {
        GroupElement::new(
            Rational::from_integer(x.into()),
            Rational::from_integer(z.into()),
            Rational::from_integer(y.into()),
        )
    }

    pub fn identity() -> Self {
        GroupElement::from_integers(0, 0, 0)
    }

    /// Matrix product `self * other`.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        GroupElement {
            x: &self.x + &other.x,
            z: &self.z + &other.z + &self.x * &other.y,
            y: &self.y + &other.y,
        }
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement {
            x: -&self.x,
            z: &self.x * &self.y - &self.z,
            y: -&self.y,
        }
    }

    /// True when all three entries are integers, i.e. the element lies in
    /// the integral subgroup whose right translations preserve primitive
    /// integer coordinates.
    pub fn is_integral(&self) -> bool {
        use num_traits::One;
        self.x.denom().is_one() && self.z.denom().is_one() && self.y.denom().is_one()
    }

    /// The projective point `[1 : x : y : z]` of the open orbit.
    pub fn embed(&self) -> PrimitivePoint {
        primitive_rep(&[
            Rational::from_integer(1.into()),
            self.x.clone(),
            self.y.clone(),
            self.z.clone(),
        ])
        .expect("first coordinate is 1")
    }

    pub fn x(&self) -> &Rational {
        &self.x
    }

    pub fn z(&self) -> &Rational {
        &self.z
    }

    pub fn y(&self) -> &Rational {
        &self.y
    }
}

impl std::fmt::Display for GroupElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "g({}, {}, {})", self.x, self.z, self.y)
    }
}

/// Inverts `[a : b : c : d]` back to the group element with `b/a, d/a, c/a`
/// as entries; `None` on the boundary `a = 0`.
pub fn point_to_group(point: &PrimitivePoint) -> Option<GroupElement> {
    assert_eq!(point.dim(), 3, "group points live in projective 3-space");
    let co = point.to_rationals();
    if co[0].is_zero() {
        return None;
    }
    Some(GroupElement::new(
        &co[1] / &co[0],
        &co[3] / &co[0],
        &co[2] / &co[0],
    ))
}

/// Left translation by `g` in projective coordinates:
/// `[a : b : c : d] -> [a : ax + b : ay + c : az + d + xc]`.
pub fn left_act(g: &GroupElement, point: &PrimitivePoint) -> Result<PrimitivePoint> {
    assert_eq!(point.dim(), 3, "group actions live in projective 3-space");
    let co = point.to_rationals();
    let (a, b, c, d) = (&co[0], &co[1], &co[2], &co[3]);
    primitive_rep(&[
        a.clone(),
        a * &g.x + b,
        a * &g.y + c,
        a * &g.z + d + &g.x * c,
    ])
}

/// Right translation by `g` in projective coordinates:
/// `[a : b : c : d] -> [a : ax + b : ay + c : az + by + d]`.
///
/// The first coordinate is untouched, and for integral `g` the map is
/// invertible over the integers, so primitive integer coordinates stay
/// primitive with the same `|a|`.
pub fn right_act(point: &PrimitivePoint, g: &GroupElement) -> Result<PrimitivePoint> {
    assert_eq!(point.dim(), 3, "group actions live in projective 3-space");
    let co = point.to_rationals();
    let (a, b, c, d) = (&co[0], &co[1], &co[2], &co[3]);
    primitive_rep(&[
        a.clone(),
        a * &g.x + b,
        a * &g.y + c,
        a * &g.z + b * &g.y + d,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use num_traits::Signed;
    use rand::{Rng, SeedableRng};

    fn random_element(rng: &mut impl Rng, denominators: bool) -> GroupElement {
        let entry = |rng: &mut dyn rand::RngCore| {
            let den = if denominators { rng.gen_range(1..8) } else { 1 };
            rat(rng.gen_range(-30..31), den)
        };
        GroupElement::new(entry(rng), entry(rng), entry(rng))
    }

    #[test]
    fn composition_and_inverse_examples() {
        let g = GroupElement::from_integers(1, 0, 0);
        let h = GroupElement::from_integers(0, 0, 1);
        assert_eq!(g.compose(&h), GroupElement::from_integers(1, 1, 1));
        // the commutator is the central element
        assert_eq!(h.compose(&g), GroupElement::from_integers(1, 0, 1));
        assert_eq!(
            GroupElement::from_integers(2, 3, 5).inverse(),
            GroupElement::from_integers(-2, 7, -5)
        );
    }

    #[test]
    fn group_axioms_hold() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let e = GroupElement::identity();
        for _ in 0..300 {
            let g = random_element(&mut rng, true);
            let h = random_element(&mut rng, true);
            let k = random_element(&mut rng, true);
            assert_eq!(g.compose(&h).compose(&k), g.compose(&h.compose(&k)));
            assert_eq!(g.compose(&e), g);
            assert_eq!(e.compose(&g), g);
            assert_eq!(g.compose(&g.inverse()), e);
            assert_eq!(g.inverse().compose(&g), e);
        }
    }

    #[test]
    fn left_action_example() {
        let g = GroupElement::from_integers(1, 0, 0);
        let p = PrimitivePoint::from_integers(vec![1, 0, 1, 0]).unwrap();
        assert_eq!(
            left_act(&g, &p).unwrap(),
            PrimitivePoint::from_integers(vec![1, 1, 1, 1]).unwrap()
        );
    }

    #[test]
    fn right_action_examples() {
        let p = PrimitivePoint::from_integers(vec![1, 1, 0, 0]).unwrap();
        let g = GroupElement::from_integers(0, 0, 1);
        assert_eq!(
            right_act(&p, &g).unwrap(),
            PrimitivePoint::from_integers(vec![1, 1, 1, 1]).unwrap()
        );
        // on the boundary a = 0 the point [0:1:0:0] picks up only the by
        // term in the last coordinate
        let q = PrimitivePoint::from_integers(vec![0, 1, 0, 0]).unwrap();
        let g = GroupElement::from_integers(4, 9, 7);
        assert_eq!(
            right_act(&q, &g).unwrap(),
            PrimitivePoint::from_integers(vec![0, 1, 0, 7]).unwrap()
        );
    }

    #[test]
    fn embedding_is_equivariant() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(19);
        for _ in 0..300 {
            let g = random_element(&mut rng, true);
            let h = random_element(&mut rng, true);
            let composed = g.compose(&h).embed();
            assert_eq!(left_act(&g, &h.embed()).unwrap(), composed);
            assert_eq!(right_act(&g.embed(), &h).unwrap(), composed);
        }
    }

    #[test]
    fn point_to_group_inverts_embedding() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..200 {
            let g = random_element(&mut rng, true);
            assert_eq!(point_to_group(&g.embed()).unwrap(), g);
        }
        let boundary = PrimitivePoint::from_integers(vec![0, 1, 2, 3]).unwrap();
        assert!(point_to_group(&boundary).is_none());
    }

    #[test]
    fn integral_right_translation_preserves_first_coordinate() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        for _ in 0..500 {
            let p = PrimitivePoint::from_integers(vec![
                rng.gen_range(-40i64..41),
                rng.gen_range(-40i64..41),
                rng.gen_range(-40i64..41),
                rng.gen_range(-40i64..41),
            ]);
            let Ok(p) = p else { continue };
            let g = random_element(&mut rng, false);
            assert!(g.is_integral());
            let moved = right_act(&p, &g).unwrap();
            // primitivity is preserved, so the canonical first coordinates
            // agree up to the sign normalization
            assert_eq!(moved.coords()[0].clone().abs(), p.coords()[0].clone().abs());
            let back = right_act(&moved, &g.inverse()).unwrap();
            assert_eq!(back, p);
        }
    }
}
