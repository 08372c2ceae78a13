use clifford_index::clifford::{Blade, Multivector, QuadraticForm};
use clifford_index::dirac::{build_torus_dirac, index, FluxBundleSpec};
use clifford_index::matrix::ExactMatrix;
use clifford_index::spin::{covering_map, random_unit_vector_product, spin_norm, SpinElement};
use clifford_index::spinor::{graded_irreps, restrict_module, spinor_module, GradedModule};
use clifford_index::symbols::{abs_class, principal_symbol, winding_number, OperatorSpec};
use clifford_index::Scalar;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn form_strategy(max_dim: usize) -> impl Strategy<Value = QuadraticForm> {
    prop::collection::vec(prop_oneof![Just(1i8), Just(-1i8)], 0..=max_dim)
        .prop_map(|signs| QuadraticForm::new(signs).unwrap())
}

fn multivector(form: &QuadraticForm) -> impl Strategy<Value = Multivector> {
    let form = form.clone();
    let blades = form.blade_count() as u32;
    prop::collection::vec((0..blades, -4i64..=4, -4i64..=4), 0..8).prop_map(move |terms| {
        Multivector::from_terms(
            &form,
            terms.into_iter().map(|(m, re, im)| (Blade::from_mask(m), Scalar::gaussian(re, im))),
        )
        .unwrap()
    })
}

fn triple(max_dim: usize) -> impl Strategy<Value = (Multivector, Multivector, Multivector)> {
    form_strategy(max_dim).prop_flat_map(|f| (multivector(&f), multivector(&f), multivector(&f)))
}

fn vector(form: &QuadraticForm) -> impl Strategy<Value = Multivector> {
    let form = form.clone();
    prop::collection::vec((-5i64..=5, 1i64..=3), form.dim())
        .prop_map(move |c| Multivector::vector(&form, &c.iter().map(|&(p, q)| Scalar::ratio(p, q)).collect::<Vec<_>>()).unwrap())
}

fn direct_sum_all(parts: &[GradedModule]) -> GradedModule {
    parts[1..].iter().fold(parts[0].clone(), |acc, m| acc.direct_sum(m).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_is_associative((x, y, z) in triple(5)) {
        prop_assert_eq!(x.multiply(&y).unwrap().multiply(&z).unwrap(), x.multiply(&y.multiply(&z).unwrap()).unwrap());
    }

    #[test]
    fn involutions_respect_products((x, y, _) in triple(5)) {
        let xy = x.multiply(&y).unwrap();
        prop_assert_eq!(xy.grade_involution(), x.grade_involution().multiply(&y.grade_involution()).unwrap());
        prop_assert_eq!(xy.reversal(), y.reversal().multiply(&x.reversal()).unwrap());
        let (even, odd) = x.grade_decompose();
        prop_assert_eq!(even.try_add(&odd).unwrap(), x.clone());
        prop_assert!(even.is_even() && odd.is_odd());
    }

    #[test]
    fn vectors_square_to_minus_form(v in form_strategy(6).prop_flat_map(|f| vector(&f))) {
        let form = v.form().clone();
        let q = v.vector_part().iter().enumerate().fold(Scalar::int(0), |acc, (i, c)| {
            acc + Scalar::int(form.sign(i) as i64) * c.clone() * c.clone()
        });
        prop_assert_eq!(v.multiply(&v).unwrap(), Multivector::scalar(&form, -q));
    }

    #[test]
    fn embedding_is_multiplicative((x, y) in (0usize..=4).prop_flat_map(|n| {
        let f = QuadraticForm::euclidean(n).unwrap();
        (multivector(&f), multivector(&f))
    })) {
        let upper = QuadraticForm::euclidean(x.dim() + 1).unwrap();
        let lhs = x.multiply(&y).unwrap().embed_lower(&upper).unwrap();
        let rhs = x.embed_lower(&upper).unwrap().multiply(&y.embed_lower(&upper).unwrap()).unwrap();
        prop_assert!(lhs.is_even());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn json_round_trip((x, _, _) in triple(4)) {
        let text = serde_json::to_string(&x).unwrap();
        let back: Multivector = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, x);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn covering_is_a_homomorphism(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let form = QuadraticForm::euclidean(n).unwrap();
        let u = SpinElement::new(random_unit_vector_product(&form, 2, &mut rng).unwrap()).unwrap();
        let v = SpinElement::new(random_unit_vector_product(&form, 2, &mut rng).unwrap()).unwrap();
        let lhs = covering_map(&u.multiply(&v).unwrap()).unwrap();
        let rhs = covering_map(&u).unwrap().compose(&covering_map(&v).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn norm_is_multiplicative(seed in any::<u64>(), n in 1usize..=4, a in 1usize..=3, b in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let form = QuadraticForm::euclidean(n).unwrap();
        // Non-unit vectors: scale the rational unit vectors.
        let x = random_unit_vector_product(&form, a, &mut rng).unwrap().scale(&Scalar::ratio(3, 2));
        let y = random_unit_vector_product(&form, b, &mut rng).unwrap().scale(&Scalar::int(-2));
        let nxy = spin_norm(&x.multiply(&y).unwrap()).unwrap();
        prop_assert_eq!(nxy, spin_norm(&x).unwrap() * spin_norm(&y).unwrap());
    }

    #[test]
    fn symbols_are_homogeneous(n in 1usize..=4, p in -6i64..=6, q in 1i64..=4, xs in prop::collection::vec((-5i64..=5, 1i64..=3), 4)) {
        let t = Scalar::ratio(p, q);
        let xi: Vec<Scalar> = xs[..n].iter().map(|&(a, b)| Scalar::ratio(a, b)).collect();
        let scaled: Vec<Scalar> = xi.iter().map(|c| c.clone() * t.clone()).collect();
        let mut ops = vec![OperatorSpec::laplacian(n).unwrap(), OperatorSpec::standard_dirac(n).unwrap()];
        if n >= 2 {
            ops.push(OperatorSpec::dalembertian(n).unwrap());
        }
        for op in ops {
            let s = principal_symbol(&op).unwrap();
            let factor = (0..s.order()).fold(Scalar::int(1), |acc, _| acc * t.clone());
            prop_assert_eq!(s.evaluate(&scaled).unwrap(), s.evaluate(&xi).unwrap().scale(&factor));
        }
    }

    /// A graded Cl₂ module extends to Cl₃ exactly when its class vanishes, and
    /// the winding counts the class.
    #[test]
    fn extension_criterion_at_k2(a in 0usize..=4, b in 0usize..=4, flip in any::<bool>()) {
        prop_assume!(a + b >= 1 && a + b <= 4);
        let s = spinor_module(2).unwrap();
        let s_flip = s.flip_grading();
        let mut parts = vec![s.clone(); a];
        parts.extend(vec![s_flip.clone(); b]);
        let w = direct_sum_all(&parts);
        let wind = winding_number(&abs_class(&w).unwrap()).unwrap().winding;
        let unit = winding_number(&abs_class(&s).unwrap()).unwrap().winding;
        prop_assert_eq!(wind, unit * (a as i64 - b as i64));

        let restricted: Vec<GradedModule> = graded_irreps(3)
            .unwrap()
            .into_iter()
            .map(|(_, m)| restrict_module(&m).unwrap())
            .collect();
        let r = if flip { restricted[0].clone() } else { restricted[restricted.len() - 1].clone() };
        prop_assert_eq!(winding_number(&abs_class(&r).unwrap()).unwrap().winding, 0);
        prop_assert_eq!(wind == 0, a == b);
    }

    #[test]
    fn winding_is_additive(a in 1usize..=3, b in 1usize..=3) {
        let s = abs_class(&spinor_module(2).unwrap()).unwrap();
        let f = abs_class(&spinor_module(2).unwrap().flip_grading()).unwrap();
        let mut x = s.clone();
        for _ in 1..a { x = x.direct_sum(&s).unwrap(); }
        let mut y = f.clone();
        for _ in 1..b { y = y.direct_sum(&f).unwrap(); }
        let sum = winding_number(&x.direct_sum(&y).unwrap()).unwrap().winding;
        prop_assert_eq!(sum, winding_number(&x).unwrap().winding + winding_number(&y).unwrap().winding);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn index_is_stable_in_lattice_size(n in 6usize..=10, d in -2i64..=2) {
        let r = index(&build_torus_dirac(&FluxBundleSpec::new(n, d).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(r.index, d);
        prop_assert_eq!(r.dim_ker_plus as i64 - r.dim_ker_minus as i64, d);
    }
}

#[test]
fn exact_matrix_identity_is_neutral() {
    let m = ExactMatrix::from_gaussian(&[&[(1, 2), (0, -1)], &[(3, 0), (2, 2)]]);
    assert_eq!(m.try_mul(&ExactMatrix::identity(2)).unwrap(), m);
}
