use fracture_core::analytic::{brazilian_stress, cube_splitting_strength, eccentricity_strength, strength_ratios};
use fracture_core::engines::{initial_moduli, run_sla, run_ss, SlaConfig, Specimen, SsConfig, StepEvent};
use fracture_core::fem::{reactions, solve, Assembler, RegionNu};
use fracture_core::material::{
    eval_step, sample_field, secant_from_estar, secant_modulus, strain_to_estar, MaterialParams, StepFunction,
};
use fracture_core::mesh::{assign_patches, attach_strip, build_structured_mesh, Region};
use proptest::prelude::*;

fn specimen(nx: usize, ny: usize, strip_w: f64, ecc: f64) -> Specimen {
    let mesh = build_structured_mesh(0.2, 0.3, nx, ny, 0.2).unwrap();
    let mesh = attach_strip(mesh, strip_w, 0.005, ecc, 1).unwrap();
    let mesh = assign_patches(mesh, 0.02, 0.02).unwrap();
    Specimen::from_mesh(mesh).unwrap()
}

fn nu(p: &MaterialParams) -> RegionNu {
    RegionNu {
        casi: p.nu_casi,
        rubber: p.nu_rubber,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mesh_is_a_conforming_partition(
        nx in 2usize..24,
        ny in 2usize..24,
        width in 0.01f64..0.12,
        ecc_frac in -1.0f64..1.0,
        rows in 1usize..3,
        pw in 0.01f64..0.08,
        ph in 0.01f64..0.08,
    ) {
        let mesh = build_structured_mesh(0.2, 0.3, nx, ny, 0.2).unwrap();
        let ecc = ecc_frac * (0.1 - 0.5 * width);
        let mesh = attach_strip(mesh, width, 0.005, ecc, rows).unwrap();
        let mesh = assign_patches(mesh, pw, ph).unwrap();
        mesh.validate().unwrap();

        let strip = mesh.strip.clone().unwrap();
        let total: f64 = (0..mesh.n_elements()).map(|e| mesh.area(e)).sum();
        let expected = 0.2 * 0.3 + strip.width() * 0.005;
        prop_assert!((total - expected).abs() <= 1e-12 * expected);

        let grid = mesh.patches.unwrap();
        prop_assert!(grid.len() <= ((0.2 / pw).ceil() * (0.3 / ph).ceil()) as usize);
        for el in &mesh.elements {
            match el.region {
                Region::Casi => {
                    let fracture_core::mesh::Patch::Block(p) = el.patch else {
                        return Err(TestCaseError::fail("block element without patch"));
                    };
                    prop_assert!(p.col < grid.cols && p.row < grid.rows);
                }
                Region::Rubber => prop_assert_eq!(el.patch, fracture_core::mesh::Patch::Rubber),
            }
        }
    }

    #[test]
    fn step_function_shape(e in 0.0f64..20.0, de in 0.0f64..5.0) {
        let sf = StepFunction::default();
        let a = eval_step(&sf, e).unwrap();
        let b = eval_step(&sf, e + de).unwrap();
        prop_assert!(a > 0.0 && a <= 1.0);
        if e <= 2.0 {
            prop_assert_eq!(a, 1.0);
        }
        if e >= 2.0 {
            prop_assert!(b <= a);
        }
    }

    #[test]
    fn secant_modulus_bounds(patch_e in 1e9f64..2e10, ep1 in -1e-2f64..1e-2) {
        let p = MaterialParams::default();
        let e = secant_modulus(patch_e, ep1, &StepFunction::default(), &p);
        prop_assert!(e >= p.e_floor + 0.028 * patch_e * (1.0 - 1e-15));
        prop_assert!(e <= p.e_floor + patch_e);
    }

    #[test]
    fn random_field_is_pure_and_bounded(seed in any::<u64>(), lo in 1e9f64..8e9, span in 0.0f64..4e9) {
        let grid = fracture_core::mesh::PatchGrid { cols: 7, rows: 9, patch_w: 0.02, patch_h: 0.02 };
        let a = sample_field(seed, &grid, lo, lo + span).unwrap();
        let b = sample_field(seed, &grid, lo, lo + span).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.patch_e.iter().all(|&e| e >= lo && e <= lo + span));
    }

    #[test]
    fn analytic_homogeneity(n in 1.0f64..1e6, a in 0.01f64..1.0, k in 0.1f64..10.0) {
        let b = brazilian_stress(n, a, a).unwrap();
        let c = cube_splitting_strength(n, a).unwrap();
        let rel = |x: f64, y: f64| (x - y).abs() / y.abs();
        prop_assert!(rel(brazilian_stress(k * n, a, a).unwrap(), k * b) < 1e-12);
        prop_assert!(rel(brazilian_stress(n, k * a, k * a).unwrap(), b / (k * k)) < 1e-12);
        prop_assert!(rel(cube_splitting_strength(k * n, a).unwrap(), k * c) < 1e-12);
        prop_assert!(rel(cube_splitting_strength(n, k * a).unwrap(), c / (k * k)) < 1e-12);
    }

    #[test]
    fn analytic_orderings(es in -50.0f64..150.0, d in 0.1f64..20.0, f in 0.0f64..1e6, a in 0.001f64..1.0, r in 0.01f64..1.0) {
        prop_assert!(eccentricity_strength(es + d).strength_mpa < eccentricity_strength(es).strength_mpa);
        let (fw, cs) = strength_ratios(f, a, r * a).unwrap();
        prop_assert!(cs >= fw);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn assembled_system_is_healthy(seed in any::<u64>(), nx in 4usize..12, ny in 4usize..12) {
        let sp = specimen(nx, ny, 0.07, 0.05);
        let p = MaterialParams::default();
        let field = sample_field(seed, &sp.mesh.patches.unwrap(), 6.3e9, 7.7e9).unwrap();
        let young = initial_moduli(&sp.mesh, &field, &p).unwrap();
        let asm = Assembler::new(&sp.mesh, nu(&p)).unwrap();
        let system = asm.assemble(&young, sp.supports.constraints(1e-4)).unwrap();
        prop_assert!(system.stiffness.asymmetry() <= 1e-12);
        let u = solve(&system).unwrap();
        let r = reactions(&system, &u);

        let (sx, sy, total) = r.chunks_exact(2).fold((0.0, 0.0, 0.0), |(x, y, t), c| {
            (x + c[0], y + c[1], t + c[0].abs() + c[1].abs())
        });
        prop_assert!(sx.abs().max(sy.abs()) <= 1e-8 * total);

        let ku = system.stiffness.mul_vec(&u);
        let utku: f64 = u.iter().zip(&ku).map(|(a, b)| a * b).sum();
        let energy: f64 = (0..sp.mesh.n_elements()).map(|e| asm.strain_energy(e, young[e], &u)).sum();
        prop_assert!((utku - 2.0 * energy).abs() <= 1e-8 * utku);

        let fields = asm.recover(&u, &young);
        for e in 0..sp.mesh.n_elements() {
            let c = fracture_core::fem::element::plane_strain_c(young[e], asm.nu(e)).unwrap();
            let s = c.apply(fields.strain[e]);
            let scale = s.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            for i in 0..3 {
                prop_assert!((s[i] - fields.stress[e][i]).abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn sla_invariants(seed in any::<u64>(), c in 0.05f64..20.0) {
        let sp = specimen(5, 5, 0.08, 0.04);
        let p = MaterialParams::default();
        let cfg = SlaConfig { max_steps: 10, ..SlaConfig::default() };
        let field = sample_field(seed, &sp.mesh.patches.unwrap(), 6.3e9, 7.7e9).unwrap();
        let e0 = initial_moduli(&sp.mesh, &field, &p).unwrap();
        let out = run_sla(&sp, &e0, &p, &cfg, 1).unwrap();

        let ids: Vec<usize> = out.trace.records.iter().map(|r| match r.event {
            StepEvent::Degraded { element, .. } => element,
            other => panic!("unexpected event {other:?}"),
        }).collect();
        let mut unique = ids.clone();
        unique.sort_unstable();
        unique.dedup();
        prop_assert_eq!(unique.len(), ids.len());
        for (k, snap) in out.snapshots.iter().enumerate() {
            // exactly the first k + 1 critical elements are degraded afterwards
            let degraded = snap.e_next.iter().zip(&e0).filter(|(a, b)| a < b).count();
            prop_assert_eq!(degraded, k + 1);
            // the scaled state puts the critical element exactly at the strength
            let crit = ids[k];
            prop_assert!((snap.fields.sp1[crit] - p.f_t).abs() <= 1e-9 * p.f_t);
            let r = &out.trace.records[k];
            let StepEvent::Degraded { sp1_unit, .. } = r.event else { unreachable!() };
            prop_assert!((r.prescribed_disp - p.f_t / sp1_unit).abs() <= 1e-12 * r.prescribed_disp);
        }

        // uniform scaling of the moduli leaves the crack sequence unchanged
        let scaled: Vec<f64> = e0.iter().map(|e| c * e).collect();
        let p_scaled = MaterialParams { e_rubber: c * p.e_rubber, ..p.clone() };
        let e_scaled: Vec<f64> = sp.mesh.elements.iter().zip(&scaled).map(|(el, &e)| {
            if el.region == Region::Rubber { p_scaled.e_rubber } else { e }
        }).collect();
        let out2 = run_sla(&sp, &e_scaled, &p_scaled, &cfg, 0).unwrap();
        let ids2: Vec<usize> = out2.trace.records.iter().filter_map(|r| match r.event {
            StepEvent::Degraded { element, .. } => Some(element),
            _ => None,
        }).collect();
        prop_assert_eq!(ids, ids2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn ss_history_is_monotone(seed in any::<u64>()) {
        let sp = specimen(6, 9, 0.07, 0.05);
        let p = MaterialParams::default();
        let sf = StepFunction::default();
        let cfg = SsConfig { n_steps: 40, max_prescribed_disp: 4e-4, ..SsConfig::default() };
        let field = sample_field(seed, &sp.mesh.patches.unwrap(), 6.3e9, 7.7e9).unwrap();
        let e0 = initial_moduli(&sp.mesh, &field, &p).unwrap();
        let out = run_ss(&sp, &e0, &p, &sf, &cfg, 1).unwrap();
        prop_assert_eq!(out.snapshots.len(), 40);

        let mut prev_estar = vec![0.0; e0.len()];
        let mut prev_e = out.e_initial.clone();
        for (snap, rec) in out.snapshots.iter().zip(&out.trace.records[1..]) {
            for e in 0..e0.len() {
                prop_assert!(snap.estar_max[e] >= prev_estar[e]);
                prop_assert!(snap.e_next[e] <= prev_e[e]);
            }
            let StepEvent::Picard { converged, .. } = rec.event else { unreachable!() };
            if converged {
                for (e, el) in sp.mesh.elements.iter().enumerate() {
                    if el.region != Region::Casi {
                        continue;
                    }
                    let estar = prev_estar[e].max(strain_to_estar(snap.fields.ep1[e], &p));
                    let target = secant_from_estar(e0[e], estar, &sf, &p);
                    let used = snap.fields.e_current[e];
                    prop_assert!((target - used).abs() <= cfg.picard_tol * used);
                }
            }
            prev_estar.clone_from(&snap.estar_max);
            prev_e.clone_from(&snap.e_next);
        }
    }
}

#[test]
fn engines_are_deterministic() {
    let sp = specimen(8, 12, 0.07, 0.05);
    let p = MaterialParams::default();
    let field = sample_field(5, &sp.mesh.patches.unwrap(), 6.3e9, 7.7e9).unwrap();
    let e0 = initial_moduli(&sp.mesh, &field, &p).unwrap();
    let cfg = SsConfig {
        n_steps: 30,
        max_prescribed_disp: 5e-4,
        ..SsConfig::default()
    };
    let a = run_ss(&sp, &e0, &p, &StepFunction::default(), &cfg, 0).unwrap();
    let b = run_ss(&sp, &e0, &p, &StepFunction::default(), &cfg, 0).unwrap();
    assert_eq!(serde_json::to_string(&a.trace).unwrap(), serde_json::to_string(&b.trace).unwrap());
    let cfg = SlaConfig {
        max_steps: 15,
        ..SlaConfig::default()
    };
    let a = run_sla(&sp, &e0, &p, &cfg, 0).unwrap();
    let b = run_sla(&sp, &e0, &p, &cfg, 0).unwrap();
    assert_eq!(serde_json::to_string(&a.trace).unwrap(), serde_json::to_string(&b.trace).unwrap());
}
