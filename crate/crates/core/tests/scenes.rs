use lisco::scene::{worst_case_snake, Scenario, SENSOR_HEIGHT};
use lisco::*;

fn stream(frame: &Frame, eps: f64) -> (ClusterResult, Vec<MergeRecord>) {
    let mut e = Engine::new(frame.config().clone(), Params::new(eps, 1).unwrap());
    for s in 0..frame.steps() {
        e.on_step(s, &frame.column(s)).unwrap();
    }
    (e.finalize().unwrap(), e.merge_log().to_vec())
}

#[test]
fn snake_of_eight_merges_two_equal_blocks() {
    // 3 lasers: the outer two fire from step 0, the middle one from step 2
    let f = worst_case_snake(8, 0.4f64).unwrap();
    assert_eq!((f.lasers(), f.nonzero_count()), (3, 8));
    let (r, log) = stream(&f, 0.4);
    assert_eq!(r.clusters.len(), 1);
    // at step 2 laser 1 first joins laser 0's block (3 + 1 points), then
    // bridges to laser 2's block, which holds steps 0 and 1 so far
    assert_eq!(log.len(), 1);
    assert_eq!(
        log[0],
        MergeRecord {
            survivor: 4,
            absorbed: 2
        }
    );
    assert_eq!(r.stats.head_rewrites, 2);
}

#[test]
fn snake_rewrites_stay_under_n_log_n() {
    for n in [1024usize, 4096] {
        let f = worst_case_snake(n, 0.4f64).unwrap();
        let (r, log) = stream(&f, 0.4);
        assert_eq!(r.clusters.len(), 1);
        let bound = n as u64 * (n as f64).log2().ceil() as u64;
        assert!(
            r.stats.head_rewrites <= bound,
            "n={n}: {}",
            r.stats.head_rewrites
        );
        // the schedule is not trivial: many merges, most of them balanced
        assert!(log.len() >= n / 40, "n={n}: {} merges", log.len());
    }
}

#[test]
fn near_scenes_reflect_more_than_far() {
    let cut = -SENSOR_HEIGHT + 0.2;
    for (near, far) in [
        (Scenario::SparseNear, Scenario::SparseFar),
        (Scenario::DenseNear, Scenario::DenseFar),
    ] {
        let count = |sc: Scenario| {
            let f: Frame = sc.spec(3).generate().unwrap();
            let cfg = f.config().clone().with_ground_z(Some(cut));
            f.with_config(cfg).unwrap().remove_ground().nonzero_count()
        };
        let (n, fa) = (count(near), count(far));
        assert!(n > fa, "{} {n} vs {} {fa}", near.name(), far.name());
    }
}

#[test]
fn hdl64_scenarios_have_the_full_raw_grid() {
    let f: Frame = Scenario::Room.spec(0).generate().unwrap();
    assert_eq!(f.ranges().len(), 72000);
    assert!(f.nonzero_count() > 70000);
}
