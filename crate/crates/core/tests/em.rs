use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use scqkit::em::*;

/// Successive over-relaxation on the same node grid, with the capacitance
/// taken from the field energy Σ_edges (ΔV)² rather than from flux sums.
fn sor_energy(layout: &ConductorLayout, volts: &[(usize, f64)]) -> f64 {
    let (nx, ny) = layout.cells();
    let h = layout.grid_spacing;
    let w = nx + 1;
    let mut fixed = vec![None; w * (ny + 1)];
    let mut v = vec![0.0; w * (ny + 1)];
    for j in 0..=ny {
        for i in 0..=nx {
            let (x, y) = (i as f64 * h, j as f64 * h);
            let s = j * w + i;
            if i == 0 || j == 0 || i == nx || j == ny {
                fixed[s] = Some(0.0);
                continue;
            }
            for (k, c) in layout.conductors.iter().enumerate() {
                let r = c.rect;
                let t = 1e-9 * h;
                if x >= r.x0 - t && x <= r.x1 + t && y >= r.y0 - t && y <= r.y1 + t {
                    let volt = volts.iter().find(|(q, _)| *q == k).map_or(0.0, |(_, u)| *u);
                    fixed[s] = Some(volt);
                    break;
                }
            }
        }
    }
    for (s, f) in fixed.iter().enumerate() {
        if let Some(u) = f {
            v[s] = *u;
        }
    }
    let omega = 2.0 / (1.0 + (std::f64::consts::PI / nx.max(ny) as f64).sin());
    for _ in 0..20_000 {
        let mut change: f64 = 0.0;
        for s in 0..v.len() {
            if fixed[s].is_some() {
                continue;
            }
            let avg = 0.25 * (v[s - 1] + v[s + 1] + v[s - w] + v[s + w]);
            let dv = omega * (avg - v[s]);
            v[s] += dv;
            change = change.max(dv.abs());
        }
        if change < 1e-13 {
            break;
        }
    }
    let mut energy = 0.0;
    for j in 0..=ny {
        for i in 0..=nx {
            let s = j * w + i;
            if i < nx {
                energy += (v[s + 1] - v[s]).powi(2);
            }
            if j < ny {
                energy += (v[s + w] - v[s]).powi(2);
            }
        }
    }
    energy * scqkit::units::EPSILON_0 * layout.relative_permittivity * layout.depth * 1e9
}

fn two_pads(gap: f64, spacing: f64) -> ConductorLayout {
    ConductorLayout::new(120.0, 80.0, spacing)
        .with_conductor("a", Rect::new(30.0, 30.0, 55.0, 50.0))
        .with_conductor("b", Rect::new(55.0 + gap, 30.0, 80.0 + gap, 50.0))
}

#[test]
fn flux_extraction_matches_independent_energy_oracle() {
    let layout = two_pads(10.0, 2.5);
    let m = maxwell_capacitance(&layout).unwrap();
    let c_aa = sor_energy(&layout, &[(0, 1.0)]);
    let c_bb = sor_energy(&layout, &[(1, 1.0)]);
    let both = sor_energy(&layout, &[(0, 1.0), (1, 1.0)]);
    let c_ab = 0.5 * (both - c_aa - c_bb);
    assert!((m.get("a", "a").unwrap() / c_aa - 1.0).abs() < 1e-6);
    assert!((m.get("b", "b").unwrap() / c_bb - 1.0).abs() < 1e-6);
    assert!((m.get("a", "b").unwrap() / c_ab - 1.0).abs() < 1e-5);
    assert!(m.asymmetry < 1e-6);
}

#[test]
fn mutual_capacitance_falls_with_gap() {
    let mutual: Vec<f64> = [5.0, 10.0, 15.0, 20.0, 30.0]
        .iter()
        .map(|g| -maxwell_capacitance(&two_pads(*g, 2.5)).unwrap().get("a", "b").unwrap())
        .collect();
    assert!(mutual.windows(2).all(|w| w[1] < w[0]), "{mutual:?}");
}

#[test]
fn grid_refinement_converges() {
    let base = two_pads(10.0, 5.0);
    let c: Vec<f64> =
        [1, 2, 4].iter().map(|f| maxwell_capacitance(&base.refined(*f)).unwrap().get("a", "a").unwrap()).collect();
    let (d1, d2) = ((c[1] - c[0]).abs(), (c[2] - c[1]).abs());
    assert!(d2 < d1, "{c:?}");
    assert!(d2 / c[2] < 0.05);
}

#[test]
fn wide_plates_approach_parallel_plate_limit() {
    // 200 µm plates 4 µm apart: fringing adds a few percent to ε·L/g.
    let layout = ConductorLayout::new(400.0, 200.0, 1.0)
        .with_conductor("top", Rect::new(100.0, 102.0, 300.0, 110.0))
        .with_conductor("bottom", Rect::new(100.0, 90.0, 300.0, 98.0));
    let m = maxwell_capacitance(&layout).unwrap();
    let ideal = scqkit::units::EPSILON_0 * layout.relative_permittivity * 200.0 / 4.0 * 1e9;
    let c = -m.get("top", "bottom").unwrap();
    assert!(c > ideal && c < 1.3 * ideal, "{c} vs {ideal}");
}

#[test]
fn grounded_conductor_is_excluded_and_shields() {
    let open = two_pads(20.0, 2.5);
    let shielded = open.clone().with_grounded("shield", Rect::new(60.0, 20.0, 70.0, 60.0));
    let m_open = maxwell_capacitance(&open).unwrap();
    let m_sh = maxwell_capacitance(&shielded).unwrap();
    assert_eq!(m_sh.labels, vec!["a", "b"]);
    assert!(-m_sh.get("a", "b").unwrap() < -m_open.get("a", "b").unwrap());
}

#[test]
fn layout_text_round_trip() {
    let text = "domain 120 80\nspacing 2.5\n# pads\na 30 30 55 50\nb 65 30 90 50\nshield 5 5 10 10 ground\n";
    let layout: ConductorLayout = text.parse().unwrap();
    assert_eq!(layout.conductors.len(), 3);
    assert!(layout.conductors[2].grounded);
    assert_eq!(layout.signal_labels(), vec!["a", "b"]);
    assert!("domain 10\n".parse::<ConductorLayout>().is_err());
    assert!("domain 10 10\nspacing 1\nx 1 1 2 two\n".parse::<ConductorLayout>().is_err());
}

/// Random Maxwell matrix: negative mutuals, positive capacitance to ground.
fn maxwell_strategy(n: usize) -> impl Strategy<Value = MaxwellCapacitanceMatrix> {
    (prop::collection::vec(0.1f64..50.0, n * (n - 1) / 2), prop::collection::vec(0.1f64..50.0, n)).prop_map(
        move |(mutual, ground)| {
            let mut c = DMatrix::zeros(n, n);
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    c[(i, j)] = -mutual[k];
                    c[(j, i)] = -mutual[k];
                    k += 1;
                }
            }
            for i in 0..n {
                let off: f64 = (0..n).filter(|j| *j != i).map(|j| -c[(i, j)]).sum();
                c[(i, i)] = ground[i] + off;
            }
            let labels = (0..n).map(|i| format!("n{i}")).collect();
            MaxwellCapacitanceMatrix::new(labels, c).unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn schur_reduction_preserves_minimum_energy(
        m in maxwell_strategy(5),
        v in prop::collection::vec(-2.0f64..2.0, 2),
    ) {
        let red = reduce_capacitance(&m, &["n0", "n1"]).unwrap();
        let vk = DVector::from_vec(v);
        let e_red = 0.5 * (vk.transpose() * &red.c * &vk)[(0, 0)];
        // Floating nodes settle where the energy is stationary.
        let c_ee = m.c.view((2, 2), (3, 3)).into_owned();
        let c_ek = m.c.view((2, 0), (3, 2)).into_owned();
        let ve = -c_ee.cholesky().unwrap().solve(&(&c_ek * &vk));
        let full = DVector::from_iterator(5, vk.iter().chain(ve.iter()).copied());
        let e_full = 0.5 * (full.transpose() * &m.c * &full)[(0, 0)];
        prop_assert!((e_red - e_full).abs() <= 1e-9 * e_full.abs().max(1.0));
        prop_assert!(red.check_sign_structure().is_ok());
    }

    #[test]
    fn differential_capacitance_is_bounded_by_mutual_and_series(m in maxwell_strategy(4)) {
        let red = reduce_capacitance(&m, &["n0", "n1"]).unwrap();
        let c = differential_capacitance(&m, "n0", "n1").unwrap();
        prop_assert!(c >= -red.c[(0, 1)] - 1e-12);
        prop_assert!(c > 0.0);
        let e_c = effective_charging_energy(c).unwrap();
        prop_assert!((capacitance_for_charging_energy(e_c).unwrap() / c - 1.0).abs() < 1e-12);
    }

    #[test]
    fn josephson_relations_are_consistent(e_j in 0.5f64..50.0) {
        let b = JunctionBranch::from_e_j(e_j).unwrap();
        prop_assert!(b.inconsistency() < 1e-12);
        let from_ic = JunctionBranch::from_critical_current(b.i_c).unwrap();
        prop_assert!((from_ic.e_j / e_j - 1.0).abs() < 1e-12);
        let from_l = JunctionBranch::from_inductance(b.l_j).unwrap();
        prop_assert!((from_l.e_j / e_j - 1.0).abs() < 1e-12);
    }
}
