//! Worked scenarios checked end to end against independent arithmetic.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use qms_core::feasibility::{
    bell_locality_decide, chsh_max_over_tensors, chsh_optimal_settings, ghz_contradiction_check,
    ghz_quantum_expectations, singlet_chsh_joints, BellJoints, LocalityVerdict,
};
use qms_core::linalg::{max_eigenvalue, ComplexMatrix};
use qms_core::majorization::{compute_bound, majorizes};
use qms_core::quantum::{assemblage, joint_distribution, ProbabilityVector, ProjectiveMeasurement};
use qms_core::simplex::{solve_feasibility, FeasibilityOutcome, LinearFeasibilityProblem, Sense};
use qms_core::steering::{
    icosahedron_directions, isotropic_pairs, planar_threshold, scan_family, steering_check, two_way_check,
    werner_pairs, auto_bound, Direction, ScanOptions, StateFamily, SteeringScenario,
};
use qms_core::tensor::{build_from_lhv, LhvModel, TensorShape};
use qms_core::{families, C64};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn two_projector_spectrum() {
    // eigenvalues of P + Q for rank-1 projectors with Tr PQ = c are 1 ± √c
    let y = ProjectiveMeasurement::pauli_y();
    let z = ProjectiveMeasurement::pauli_z();
    let m = &y.projectors()[0] + &z.projectors()[0];
    let overlap = y.projectors()[0].trace_product(&z.projectors()[0]).re;
    let root = 1.0 + overlap.sqrt();
    assert!(close(max_eigenvalue(&m, 1e-12).unwrap(), root, 1e-12));
    assert!(close(root, 1.0 + FRAC_1_SQRT_2, 1e-12));
}

#[test]
fn singlet_assemblage_by_hand() {
    let s = FRAC_1_SQRT_2;
    // |ψ⁻⟩ amplitudes indexed by 2a + b
    let psi = [0.0, s, -s, 0.0];
    let asm = assemblage(&families::singlet(), &ProjectiveMeasurement::pauli_z()).unwrap();
    for (a, member) in asm.members().iter().enumerate() {
        let expected = ComplexMatrix::from_real_fn(2, |b, b2| psi[2 * a + b] * psi[2 * a + b2]);
        assert!(member.max_abs_diff(&expected) < 1e-12);
    }
    let m0 = &asm.members()[0];
    assert!(close(m0[(1, 1)].re, 0.5, 1e-12) && m0[(0, 0)].norm() < 1e-12);
}

#[test]
fn werner_common_axis_rows() {
    for eta in [0.0, 0.35, 1.0] {
        let rho = families::qubit_werner(eta).unwrap();
        for n in [[1.0, 0.0, 0.0], [0.0, 0.6, 0.8]] {
            let m = ProjectiveMeasurement::bloch(n).unwrap();
            let p = joint_distribution(&rho, &[&m, &m]).unwrap();
            for i in 0..2 {
                let mut row = p.row(i);
                row.sort_by(|a, b| b.total_cmp(a));
                assert!(close(row[0], (1.0 + eta) / 4.0, 1e-12));
                assert!(close(row[1], (1.0 - eta) / 4.0, 1e-12));
            }
        }
    }
}

#[test]
fn qutrit_isotropic_entries() {
    let eta = 0.4;
    let rho = families::qutrit_isotropic(eta).unwrap();
    let m = rho.matrix();
    for i in 0..3 {
        for j in 0..3 {
            let d = 3 * i + j;
            let want = if i == j { (1.0 + 2.0 * eta) / 9.0 } else { (1.0 - eta) / 9.0 };
            assert!(close(m[(d, d)].re, want, 1e-12));
        }
        for k in 0..3 {
            if k != i {
                assert!(close(m[(4 * i, 4 * k)].re, eta / 3.0, 1e-12));
            }
        }
    }
}

#[test]
fn bloch_overlap_is_half_angle_cosine() {
    for theta in [0.0, 0.4, 1.3, PI / 2.0, 2.9] {
        let a = ProjectiveMeasurement::bloch([1.0, 0.0, 0.0]).unwrap();
        let b = ProjectiveMeasurement::bloch([theta.cos(), theta.sin(), 0.0]).unwrap();
        let overlap = a.projectors()[0].trace_product(&b.projectors()[0]).re;
        assert!(close(overlap, (theta / 2.0).cos().powi(2), 1e-12));
    }
}

#[test]
fn tiny_linear_systems() {
    let p = LinearFeasibilityProblem::new(vec![vec![1.0, 1.0]], vec![1.0], 2).unwrap();
    let FeasibilityOutcome::Feasible { point } = solve_feasibility(&p).unwrap() else {
        panic!("expected feasible");
    };
    assert!(p.verify_point(&point, 1e-12));
    let q = LinearFeasibilityProblem::new(vec![vec![1.0]], vec![-1.0], 1).unwrap();
    let FeasibilityOutcome::Infeasible { certificate } = solve_feasibility(&q).unwrap() else {
        panic!("expected infeasible");
    };
    assert!(q.verify_certificate(&certificate, 1e-12));
}

#[test]
fn deterministic_chsh_system_is_feasible() {
    let shape = TensorShape::uniform(2, 2, 2);
    let model = LhvModel::deterministic(&shape, &[vec![0, 0], vec![0, 0]]).unwrap();
    let t = build_from_lhv(&model);
    assert!(close(t.chsh_value().unwrap(), 2.0, 1e-15));
    let joints = BellJoints::from_tensor(&t).unwrap();
    assert!(bell_locality_decide(&joints).unwrap().verdict.is_local());
}

#[test]
fn singlet_chsh_is_nonlocal() {
    let joints = singlet_chsh_joints();
    let direct: f64 = {
        // E(a, b) = -a·b for the singlet
        let (a, b) = chsh_optimal_settings();
        let e = |x: usize, y: usize| {
            let u = a[x].bloch_vector(0).unwrap();
            let v = b[y].bloch_vector(0).unwrap();
            -(u[0] * v[0] + u[1] * v[1] + u[2] * v[2])
        };
        e(0, 0) - e(0, 1) + e(1, 0) + e(1, 1)
    };
    assert!(close(direct, 2.0 * 2f64.sqrt(), 1e-12));
    assert!(close(joints.chsh_value().unwrap(), direct, 1e-12));
    let decision = bell_locality_decide(&joints).unwrap();
    let LocalityVerdict::Nonlocal { certificate, gap } = decision.verdict else {
        panic!("singlet joints reported local");
    };
    assert!(gap > 0.0);
    assert!(decision.problem.verify_certificate(&certificate, 1e-8));
}

#[test]
fn product_and_lhv_joints_are_local() {
    let rho = families::product(&[
        families::bloch_state([0.0, 0.6, 0.8]).unwrap(),
        families::bloch_state([1.0, 0.0, 0.0]).unwrap(),
    ])
    .unwrap();
    let (a, b) = chsh_optimal_settings();
    let joints = BellJoints::from_state(&rho, &a, &b).unwrap();
    assert!(bell_locality_decide(&joints).unwrap().verdict.is_local());

    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let shape = TensorShape::uniform(2, 2, 2);
    let t = build_from_lhv(&LhvModel::random(&shape, 5, &mut rng));
    let joints = BellJoints::from_tensor(&t).unwrap();
    let LocalityVerdict::Local { tensor, .. } = bell_locality_decide(&joints).unwrap().verdict else {
        panic!("LHV joints reported nonlocal");
    };
    for x in 0..2 {
        for y in 0..2 {
            let got = tensor.marginal(&[(0, x), (1, y)]).unwrap();
            for (u, v) in got.values().iter().zip(joints.get(x, y).values()) {
                assert!(close(*u, *v, 1e-8));
            }
        }
    }
}

#[test]
fn chsh_range_over_tensors() {
    assert!(close(chsh_max_over_tensors(Sense::Maximize).unwrap(), 2.0, 1e-8));
    assert!(close(chsh_max_over_tensors(Sense::Minimize).unwrap(), -2.0, 1e-8));
}

#[test]
fn ghz_scenarios() {
    let r = ghz_contradiction_check().unwrap();
    let FeasibilityOutcome::Infeasible { certificate } = &r.full else {
        panic!("GHZ system reported feasible");
    };
    assert!(r.full_problem.verify_certificate(certificate, 1e-8));
    assert!(r.relaxed.is_feasible());
    assert!(close(r.forced_xxx.0, -1.0, 1e-8) && close(r.forced_xxx.1, -1.0, 1e-8));
    assert!(r.all_plus.is_feasible());
    let q = ghz_quantum_expectations().unwrap();
    for (got, want) in q.iter().zip([-1.0, -1.0, -1.0, 1.0]) {
        assert!(close(*got, want, 1e-12));
    }
}

#[test]
fn deterministic_pair_violates_xy_bound() {
    let bound = compute_bound(&[ProjectiveMeasurement::pauli_x(), ProjectiveMeasurement::pauli_y()]).unwrap();
    let a = ProbabilityVector::with_total(vec![1.0, 0.0, 1.0, 0.0], 2.0, 1e-12).unwrap();
    let check = majorizes(&a, &bound, 1e-9).unwrap();
    assert!(!check.holds);
    assert_eq!(check.worst_k, 2);
    let uniform = ProbabilityVector::with_total(vec![0.5; 4], 2.0, 1e-12).unwrap();
    assert!(majorizes(&uniform, &bound, 1e-9).unwrap().holds);
}

#[test]
fn single_observable_bound() {
    let b = compute_bound(&[ProjectiveMeasurement::computational(3)]).unwrap();
    assert_eq!(b.s(), &[1.0, 0.0, 0.0]);
}

#[test]
fn werner_xy_steering_examples() {
    let xy = [ProjectiveMeasurement::pauli_x(), ProjectiveMeasurement::pauli_y()];
    for (eta, holds) in [(0.8, false), (0.7, true)] {
        let s = SteeringScenario::new(families::qubit_werner(eta).unwrap(), werner_pairs(&xy), Direction::ASteersB).unwrap();
        let r = steering_check(&s).unwrap();
        assert_eq!(r.holds, holds);
        let expected = [(1.0 + eta) / 2.0, (1.0 + eta) / 2.0, (1.0 - eta) / 2.0, (1.0 - eta) / 2.0];
        for (a, b) in r.lhs_sorted.iter().zip(expected) {
            assert!(close(*a, b, 1e-12));
        }
        if !holds {
            assert_eq!(r.worst_k, 2);
            assert!(close(r.violation, 1.0 + eta - (1.0 + FRAC_1_SQRT_2), 1e-9));
        }
        let (ab, ba) = two_way_check(s.state(), s.pairs()).unwrap();
        assert_eq!((ab.holds, ba.holds), (holds, holds));
    }
}

#[test]
fn qutrit_isotropic_block_maximum() {
    let eta = 0.3;
    let mub = families::mub_family(3).unwrap();
    let s = SteeringScenario::new(families::qutrit_isotropic(eta).unwrap(), isotropic_pairs(&mub), Direction::ASteersB).unwrap();
    let r = steering_check(&s).unwrap();
    for i in 0..4 {
        assert!(close(r.lhs_sorted[i], (1.0 + 2.0 * eta) / 3.0, 1e-12));
    }
}

#[test]
fn icosahedron_geometry() {
    let dirs = icosahedron_directions();
    let want = (3.0 + 5f64.sqrt()) / (5.0 + 5f64.sqrt());
    for d in &dirs {
        assert!(close(d.iter().map(|x| x * x).sum::<f64>(), 1.0, 1e-12));
    }
    for d in &dirs[1..] {
        let c: f64 = dirs[0].iter().zip(d).map(|(a, b)| a * b).sum::<f64>().abs();
        // |cos θ| = 1/√5 for every pair of axes; the acute half-angle overlap
        assert!(close((1.0 + c) / 2.0, want, 1e-12));
    }
}

#[test]
fn small_family_thresholds() {
    let options = ScanOptions::default();
    assert!(close(planar_threshold(2, options).unwrap(), FRAC_1_SQRT_2, 1e-6));
    let mub = families::mub_family(2).unwrap();
    let bound = auto_bound(&mub).unwrap();
    let t = scan_family(&StateFamily::qubit_werner(), &werner_pairs(&mub), &bound, options).unwrap();
    assert!(close(t, 1.0 / 3f64.sqrt(), 1e-6));
}

#[test]
fn pure_state_amplitudes_match_kets() {
    let rho = families::singlet();
    let ket01 = families::ket(4, 1);
    assert!(close(rho.expectation_vector(&ket01), 0.5, 1e-15));
    assert_eq!(ket01[1], C64::new(1.0, 0.0));
}

#[test]
fn quoted_bounds_need_no_flattening() {
    for obs in [
        vec![ProjectiveMeasurement::pauli_x(), ProjectiveMeasurement::pauli_y()],
        families::mub_family(2).unwrap(),
    ] {
        let b = compute_bound(&obs).unwrap();
        assert_eq!(b.raw_partial_sums().len(), b.partial_sums().len());
        for (raw, flat) in b.raw_partial_sums().iter().zip(b.partial_sums()) {
            assert!(close(*raw, *flat, 1e-12), "{raw} vs {flat}");
        }
    }
    // the qutrit pool does need flattening, but not at the quoted indices
    let b = compute_bound(&families::mub_family(3).unwrap()).unwrap();
    for k in [4, 8] {
        assert!(close(b.raw_partial_sums()[k - 1], b.partial_sum(k), 1e-12));
    }
    assert!(b.raw_partial_sums().iter().zip(b.partial_sums()).any(|(r, f)| f - r > 1e-3));
}
