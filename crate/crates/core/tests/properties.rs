use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use proptest::prelude::*;

use pauli_photons::fock::{oracle_density_matrix, MomentumGrid};
use pauli_photons::measures::{concurrence, concurrence_x_state, negativity};
use pauli_photons::overlaps::{
    compute_l, compute_m, overlap_quad, MomentumProfile, OverlapMethod, OverlapQuad, PairProfiles, ProfileShape,
    ProfileTable,
};
use pauli_photons::photon::{assemble_density_matrix, map_to_polarization, SelectionRuleTable};
use pauli_photons::wick::{vacuum_expectation, KroneckerKernel, Label, OpSymbol};
use pauli_photons::Species;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn valid_quad() -> impl Strategy<Value = OverlapQuad> {
    (1e-4..10.0f64, 0.0..=1.0f64, 1e-4..10.0f64, 0.0..=1.0f64)
        .prop_map(|(l, a, lt, b)| OverlapQuad::new(l, a * l, lt, b * lt).unwrap())
}

fn profile(gaussian: bool, width: f64, center: f64) -> MomentumProfile {
    if gaussian {
        MomentumProfile::gaussian(width, center).unwrap()
    } else {
        MomentumProfile::lorentzian(width, center).unwrap()
    }
}

/// `exp(iα) · [[cos θ, -e^{iφ} sin θ], [e^{iχ} sin θ, e^{i(φ+χ)} cos θ]]`
fn su2(t: [f64; 4]) -> Matrix2<Complex64> {
    let [alpha, theta, phi, chi] = t;
    let e = |x: f64| Complex64::from_polar(1.0, x);
    let (s, c) = theta.sin_cos();
    Matrix2::new(c.into(), -e(phi) * s, e(chi) * s, e(phi + chi) * c) * e(alpha)
}

fn kron(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> Matrix4<Complex64> {
    Matrix4::from_fn(|i, j| a[(i >> 1, j >> 1)] * b[(i & 1, j & 1)])
}

fn angles() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-3.2..3.2f64)
}

fn op(create: bool, species: bool, spin: u8, k: i64) -> OpSymbol {
    let species = if species { Species::Electron } else { Species::Hole };
    if create {
        OpSymbol::create(species, spin, Label::Grid(k))
    } else {
        OpSymbol::annihilate(species, spin, Label::Grid(k))
    }
}

fn op_string(len: usize) -> impl Strategy<Value = Vec<OpSymbol>> {
    prop::collection::vec((any::<bool>(), any::<bool>(), 0..2u8, 0..2i64), len)
        .prop_map(|v| v.into_iter().map(|(c, s, spin, k)| op(c, s, spin, k)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn exchange_never_exceeds_direct(
        gaussian in any::<bool>(),
        w in 0.05..20.0f64,
        c1 in -50.0..50.0f64,
        c2 in -50.0..50.0f64,
    ) {
        let (p1, p2) = (profile(gaussian, w, c1), profile(gaussian, w, c2));
        let l = compute_l(&p1, &p2, OverlapMethod::ClosedForm).unwrap();
        let m = compute_m(&p1, &p2, OverlapMethod::ClosedForm).unwrap();
        prop_assert!(m >= 0.0);
        prop_assert!(m <= l * (1.0 + 1e-12));
    }

    #[test]
    fn overlaps_are_translation_invariant(
        gaussian in any::<bool>(),
        w in 0.2..8.0f64,
        d in 0.0..30.0f64,
        shift in -40.0..40.0f64,
    ) {
        let at = |c: f64| profile(gaussian, w, c);
        let m0 = compute_m(&at(0.0), &at(d), OverlapMethod::Quadrature).unwrap();
        let m1 = compute_m(&at(shift), &at(shift + d), OverlapMethod::Quadrature).unwrap();
        prop_assert!(rel(m1, m0) < 1e-7, "{m0} vs {m1}");
    }

    #[test]
    fn quadrature_matches_closed_forms(
        gaussian in any::<bool>(),
        w in 0.2..8.0f64,
        ratio in 0.0..10.0f64,
    ) {
        let d = ratio * w;
        let (p1, p2) = (profile(gaussian, w, -0.5 * d), profile(gaussian, w, 0.5 * d));
        for f in [compute_l, compute_m] {
            let exact = f(&p1, &p2, OverlapMethod::ClosedForm).unwrap();
            let quad = f(&p1, &p2, OverlapMethod::Quadrature).unwrap();
            prop_assert!(rel(quad, exact) < 1e-6, "{quad} vs {exact}");
        }
    }

    #[test]
    fn lorentzian_concurrence_is_scale_invariant(
        delta in 0.1..10.0f64,
        ratio in 0.0..3.0f64,
        scale in 0.1..10.0f64,
    ) {
        let c = |delta: f64, d: f64| {
            let shape = ProfileShape::lorentzian(delta).unwrap();
            let q = overlap_quad(&PairProfiles::symmetric(&shape, &shape, d).unwrap(), OverlapMethod::ClosedForm)
                .unwrap();
            concurrence_x_state(&q).unwrap()
        };
        let base = c(delta, ratio * delta);
        let scaled = c(scale * delta, scale * ratio * delta);
        prop_assert!((base - scaled).abs() < 1e-10, "{base} vs {scaled}");
    }

    #[test]
    fn assembled_state_is_physical(q in valid_quad()) {
        let dm = assemble_density_matrix(&q).unwrap();
        dm.check_physical().unwrap();
        let n = dm.normalize().unwrap();
        prop_assert!((n.trace() - 1.0).abs() < 1e-12);
        prop_assert!(n.min_eigenvalue() >= -1e-12);
    }

    #[test]
    fn concurrence_is_local_unitary_invariant(q in valid_quad(), a in angles(), b in angles()) {
        let dm = assemble_density_matrix(&q).unwrap().normalize().unwrap();
        let u = kron(&su2(a), &su2(b));
        let rotated = dm.transformed(&u);
        let (c0, c1) = (concurrence(&dm).unwrap(), concurrence(&rotated).unwrap());
        prop_assert!((c0 - c1).abs() < 1e-9, "{c0} vs {c1}");
        let (n0, n1) = (negativity(&dm).unwrap(), negativity(&rotated).unwrap());
        prop_assert!((n0 - n1).abs() < 1e-9, "{n0} vs {n1}");
    }

    #[test]
    fn polarization_mapping_preserves_spectrum_and_measures(q in valid_quad(), swapped in any::<bool>()) {
        let spin = assemble_density_matrix(&q).unwrap().normalize().unwrap();
        let rules = if swapped { SelectionRuleTable::swapped() } else { SelectionRuleTable::default() };
        let photon = map_to_polarization(&spin, &rules).unwrap();
        for (a, b) in spin.eigenvalues().iter().zip(photon.eigenvalues()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        prop_assert!((concurrence(&spin).unwrap() - concurrence(&photon).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn electron_hole_exchange_symmetry(q in valid_quad()) {
        let swapped = OverlapQuad::new(q.l_tilde, q.m_tilde, q.l, q.m).unwrap();
        let (a, b) = (concurrence_x_state(&q).unwrap(), concurrence_x_state(&swapped).unwrap());
        prop_assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn swapping_equal_kind_neighbours_flips_sign(ops in op_string(6), at in 0..5usize) {
        prop_assume!(ops[at].kind == ops[at + 1].kind);
        let mut swapped = ops.clone();
        swapped.swap(at, at + 1);
        let a = vacuum_expectation(&ops, &KroneckerKernel);
        let b = vacuum_expectation(&swapped, &KroneckerKernel);
        prop_assert_eq!(a, -b);
    }

    #[test]
    fn reversed_conjugate_string_is_complex_conjugate(ops in op_string(6)) {
        let adjoint: Vec<OpSymbol> = ops.iter().rev().map(OpSymbol::conjugate).collect();
        let a = vacuum_expectation(&ops, &KroneckerKernel);
        let b = vacuum_expectation(&adjoint, &KroneckerKernel);
        prop_assert_eq!(a, b.conj());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tabulated_lorentzian_matches_closed_form(delta in 1.0..4.0f64, ratio in 0.0..3.0f64) {
        let reference = MomentumProfile::lorentzian(delta, 0.0).unwrap();
        let table = ProfileTable::sample(|x| reference.eval(x).unwrap(), -50.0 * delta, 50.0 * delta, 10_001)
            .unwrap();
        let tab = ProfileShape::tabulated(table).unwrap();
        let lor = ProfileShape::lorentzian(delta).unwrap();
        let d = ratio * delta;
        let qt = overlap_quad(&PairProfiles::symmetric(&tab, &tab, d).unwrap(), OverlapMethod::Auto).unwrap();
        let ql = overlap_quad(&PairProfiles::symmetric(&lor, &lor, d).unwrap(), OverlapMethod::ClosedForm).unwrap();
        prop_assert!(rel(qt.l, ql.l) < 1e-4, "L {} vs {}", qt.l, ql.l);
        prop_assert!(rel(qt.m, ql.m) < 1e-4, "M {} vs {}", qt.m, ql.m);
        let (ct, cl) = (concurrence_x_state(&qt).unwrap(), concurrence_x_state(&ql).unwrap());
        prop_assert!((ct - cl).abs() < 1e-4, "C {ct} vs {cl}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn oracle_norm_matches_direct_overlaps(delta in 1.5..3.0f64, ratio in 0.0..1.5f64) {
        let shape = ProfileShape::lorentzian(delta).unwrap();
        let profiles = PairProfiles::symmetric(&shape, &shape, ratio * delta).unwrap();
        let q = overlap_quad(&profiles, OverlapMethod::ClosedForm).unwrap();
        let grid = MomentumGrid::symmetric(40.0, 401).unwrap();
        let oracle = oracle_density_matrix(&profiles, &grid).unwrap();
        // ‖Ψ†_↑(k) Ψ†_↓(k')|0⟩‖² = L L̃
        let norm = oracle.entries()[(1, 1)].re;
        prop_assert!(rel(norm, q.l * q.l_tilde) < 1e-3, "{norm} vs {}", q.l * q.l_tilde);
    }
}
