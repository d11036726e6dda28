use std::path::Path;

use medax::filtration::{lerp, value_at};
use medax::mesh::validate_closed_surface;
use medax::*;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn fixture(name: &str) -> SurfaceMesh {
    load_mesh_file(&Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)).unwrap()
}

#[test]
fn fixture_statistics() {
    for (name, v, e, f) in [
        ("tetrahedron.off", 4, 6, 4),
        ("icosphere2.obj", 162, 480, 320),
        ("ellipsoid.obj", 162, 480, 320),
        ("torus.off", 128, 384, 256),
    ] {
        let m = fixture(name);
        assert_eq!((m.num_vertices(), m.num_edges(), m.num_triangles()), (v, e, f), "{name}");
        assert!(validate_closed_surface(&m).is_empty(), "{name}");
    }
}

#[test]
fn essential_cells_follow_genus() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (name, expect) in [("icosphere2.obj", [0, 0, 0, 1]), ("torus.off", [0, 0, 2, 1])] {
        let m = fixture(name);
        for _ in 0..5 {
            let x = [0, 1, 2].map(|_| rng.gen_range(-2.0..2.0));
            let p = reduce_from_scratch(&m, build_filter(&m, x)).pairing();
            assert_eq!(p.essential_counts(), expect, "{name} at {x:?}");
        }
    }
}

#[test]
fn torus_sweeps_match_scratch() {
    let m = fixture("torus.off");
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..40 {
        let mut p = || [0, 1, 2].map(|_| rng.gen_range(-2.0..2.0));
        let (x0, x1) = (p(), p());
        let mut dec = reduce_from_scratch(&m, build_filter(&m, x0));
        sweep_segment(&mut dec, x1).unwrap();
        assert_eq!(dec.pairing(), reduce_from_scratch(&m, build_filter(&m, x1)).pairing());
        dec.check_invariants().unwrap();
    }
}

// Crossing the plane y = 0 near the center exchanges the two saddles at the
// poles of the intermediate semi-axis.
#[test]
fn ellipsoid_central_saddles_interchange() {
    const SAMPLES: usize = 400;
    let m = fixture("ellipsoid.obj");
    let (x0, x1) = ([0.013, -0.2, 0.021], [0.013, 0.2, 0.021]);
    let ts: Vec<f64> = (0..SAMPLES).map(|k| k as f64 / (SAMPLES - 1) as f64).collect();
    let pairings: Vec<Pairing> = ts
        .iter()
        .map(|&t| reduce_from_scratch(&m, build_filter(&m, lerp(x0, x1, t))).pairing())
        .collect();

    let mut dec = reduce_from_scratch(&m, build_filter(&m, x0));
    let records = sweep_segment(&mut dec, x1).unwrap();
    let mut found = 0;
    for k in 0..SAMPLES - 1 {
        let changed = pairings[k].changed_cells(&pairings[k + 1]);
        if !changed.iter().any(|c| c.dim == 1) {
            continue;
        }
        for r in &records {
            let tr = &r.transposition;
            if r.t < ts[k] || r.t > ts[k + 1] || classify(tr) != Some(AxisKind::MidSphere) {
                continue;
            }
            assert!(tr.cells.iter().all(|c| changed.contains(c)));
            let radius = value_at(&m, tr.cells[0], x0, x1, r.t).sqrt();
            if (0.54..=0.66).contains(&radius) {
                found += 1;
            }
        }
    }
    assert!(found >= 1, "no central saddle interchange among {} records", records.len());
}
