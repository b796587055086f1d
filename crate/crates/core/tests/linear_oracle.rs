//! Linear-mode checks: the solver must reproduce the closed-form free wave
//! exactly on the lattice (transport is an integer shift at dt = dr), and
//! the Green's-theorem flux identities must telescope to rounding.

use radwave_core::{
    dalembert_linear, extract_g, flux_identity_residual, init_state, run, FluxFamily, GridSpec,
    ModelParams, PolygonRegion, ProbeSet, RadiationKind, RadialProfile,
};
use radwave_core::dalembert::linear_outgoing_invariant;
use radwave_core::energy::energy_of_state;
use radwave_core::profile::ProfileShape;
use radwave_core::scattering::exterior_difference;

fn standard_profile() -> RadialProfile {
    RadialProfile::static_data(ProfileShape::gaussian(1.0, 5.0, 1.0).unwrap())
}

fn mixed_profile() -> RadialProfile {
    RadialProfile::new(
        ProfileShape::gaussian(1.0, 5.0, 1.0).unwrap(),
        ProfileShape::gaussian(0.4, 4.0, 0.8).unwrap(),
    )
}

#[test]
fn linear_run_matches_dalembert_at_every_grid_point() {
    let grid = GridSpec::new(2.0f64.powi(-7), 24.0, 6.0).unwrap();
    let params = ModelParams::linear();
    for profile in [standard_profile(), mixed_profile()] {
        let initial = init_state(&profile, &grid).unwrap();
        let probes = ProbeSet {
            snapshot_times: vec![2.0, 6.0],
            ..ProbeSet::none()
        };
        let traj = run(initial, &grid, &params, &probes).unwrap();
        let mut scale: f64 = 0.0;
        let mut worst = (0.0f64, 0.0f64, 0.0f64);
        for state in traj.snapshots.iter().chain([&traj.final_state]) {
            for i in 0..state.len() {
                let exact = dalembert_linear(&profile, grid.radius(i), state.t);
                scale = scale.max(exact.w.abs());
                worst.0 = worst.0.max((state.w[i] - exact.w).abs());
                worst.1 = worst.1.max((state.phi[i] - (exact.w_r + exact.w_t)).abs());
                worst.2 = worst.2.max((state.psi[i] - (exact.w_r - exact.w_t)).abs());
            }
        }
        // Exact transport: rounding only, far below the 1e-8 gate.
        assert!(worst.0 <= 1e-12 * scale.max(1.0), "w error {:?}", worst);
        assert!(worst.1 <= 1e-12, "phi error {:?}", worst);
        assert!(worst.2 <= 1e-12, "psi error {:?}", worst);
    }
}

#[test]
fn invariants_are_pure_shifts_of_initial_values() {
    let grid = GridSpec::new(2.0f64.powi(-6), 24.0, 4.0).unwrap();
    let params = ModelParams::linear();
    let initial = init_state(&standard_profile(), &grid).unwrap();
    let phi0 = initial.phi.clone();
    let psi0 = initial.psi.clone();
    let traj = run(initial, &grid, &params, &ProbeSet::none()).unwrap();
    let n_steps = grid.n_steps();
    let state = &traj.final_state;
    for i in 0..state.len() {
        // φ moved inward by n_steps cells.
        if i + n_steps < phi0.len() {
            assert_eq!(state.phi[i], phi0[i + n_steps]);
        }
        // ψ moved outward; cells fed by the origin reflection carry the φ
        // value that arrived there (ψ(i, n) = φ(0, n−i) = φ₀[n−i]).
        if i >= n_steps {
            assert_eq!(state.psi[i], psi0[i - n_steps]);
        } else {
            assert_eq!(state.psi[i], phi0[n_steps - i]);
        }
    }
}

#[test]
fn rectangle_identity_telescopes_to_rounding() {
    let grid = GridSpec::new(2.0f64.powi(-6), 24.0, 4.0).unwrap();
    let params = ModelParams::linear();
    let initial = init_state(&standard_profile(), &grid).unwrap();
    let energy = energy_of_state(&initial, &params);
    let cells = |x: f64| (x / grid.dr()).round() as i64;
    let away = PolygonRegion::rectangle(cells(2.0), cells(14.0), cells(0.5), cells(3.5)).unwrap();
    let probes = ProbeSet {
        regions: vec![away.clone()],
        ..ProbeSet::none()
    };
    let traj = run(initial, &grid, &params, &probes).unwrap();
    for family in [FluxFamily::Inward, FluxFamily::Outward] {
        let report = flux_identity_residual(&traj, &away, family).unwrap();
        assert!(
            report.residual <= 1e-11 * energy,
            "{family:?} residual {} vs E = {energy}",
            report.residual
        );
    }
}

#[test]
fn characteristic_sided_regions_also_telescope() {
    let grid = GridSpec::new(2.0f64.powi(-6), 24.0, 4.0).unwrap();
    let params = ModelParams::linear();
    let initial = init_state(&standard_profile(), &grid).unwrap();
    let energy = energy_of_state(&initial, &params);
    let cells = |x: f64| (x / grid.dr()).round() as i64;
    // Parallelogram between two incoming cones, away from the axis.
    let para =
        PolygonRegion::incoming_parallelogram(cells(0.5), cells(3.0), cells(8.0)).unwrap();
    // Trapezoid capped by an incoming cone, touching the axis.
    let trap = PolygonRegion::cone_trapezoid(cells(0.5), cells(2.5), cells(12.0)).unwrap();
    let probes = ProbeSet {
        regions: vec![para.clone(), trap.clone()],
        ..ProbeSet::none()
    };
    let traj = run(initial, &grid, &params, &probes).unwrap();
    let dr2 = grid.dr() * grid.dr();
    // The inward family rides the incoming sides (φ constant along them), so
    // its identity telescopes to rounding; the outward integrand varies along
    // those sides and its quadrature is honestly O(dr²).
    let report = flux_identity_residual(&traj, &para, FluxFamily::Inward).unwrap();
    assert!(
        report.residual <= 1e-11 * energy,
        "parallelogram inward residual {}",
        report.residual
    );
    let report = flux_identity_residual(&traj, &para, FluxFamily::Outward).unwrap();
    assert!(
        report.residual <= 100.0 * dr2 * energy,
        "parallelogram outward residual {}",
        report.residual
    );
    // The axis side uses the Richardson origin estimate, which is O(dr²)
    // rather than exact; the trapezoid residual reflects that.
    let dr2 = grid.dr() * grid.dr();
    let report = flux_identity_residual(&traj, &trap, FluxFamily::Inward).unwrap();
    assert!(
        report.residual <= 20.0 * dr2 * energy,
        "trapezoid residual {} vs dr²E = {}",
        report.residual,
        dr2 * energy
    );
}

#[test]
fn extracted_radiation_matches_closed_form() {
    let grid = GridSpec::new(2.0f64.powi(-6), 32.0, 12.0).unwrap();
    let params = ModelParams::linear();
    let profile = standard_profile();
    let initial = init_state(&profile, &grid).unwrap();
    let probes = ProbeSet {
        radiation_board: true,
        snapshot_times: vec![8.0, 12.0],
        ..ProbeSet::none()
    };
    let traj = run(initial, &grid, &params, &probes).unwrap();
    let g = extract_g(&traj, RadiationKind::GPlus, None).unwrap();

    // In linear mode ψ is constant along each outgoing line, so the board
    // holds the exact closed-form invariant W₀'(τ) + W₁(τ).
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (k, &label) in g.labels.iter().enumerate() {
        let exact = linear_outgoing_invariant(&profile, label);
        scale = scale.max(exact.abs());
        worst = worst.max((g.values[k] - exact).abs());
    }
    assert!(worst <= 1e-12 * scale.max(1.0), "g error {worst}");

    // Against the free wave built from g the exterior mismatch is rounding.
    for &t in &[8.0, 12.0] {
        let diff = exterior_difference(&traj, &g, 0.0, t).unwrap();
        assert!(diff <= 1e-10, "exterior difference {diff} at t = {t}");
    }
}

#[test]
fn linear_convergence_study_reports_exact_transport() {
    let spec = radwave_core::StudySpec {
        r_max: 24.0,
        t_end: 2.0,
        checkpoints: vec![(4.0, 2.0), (6.0, 2.0), (8.0, 1.0)],
    };
    let report = radwave_core::convergence_study(
        &standard_profile(),
        &ModelParams::linear(),
        &[0.25, 0.125, 0.0625],
        &spec,
    )
    .unwrap();
    assert!(report.exact_transport, "{report:?}");
}
