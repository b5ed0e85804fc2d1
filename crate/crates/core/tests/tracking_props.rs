use proptest::prelude::*;
use rand::{seq::SliceRandom, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tomo_core::lattice::{canonical_direction, Direction, Point, WeightedLatticeSet};
use tomo_core::tracking::{
    markov_track, rolling_horizon, squared_step, straight_line_coupling_bruteforce, LineModel, RollingOutcome, TrackSet,
    WeightModel,
};
use tomo_core::xray::{DataFunction, Instance};

fn pts(v: &[[i64; 2]]) -> Vec<Point> {
    v.iter().map(|&p| Point::from(p)).collect()
}

fn axes() -> Vec<Direction> {
    vec![canonical_direction(&[1, 0]).unwrap(), canonical_direction(&[0, 1]).unwrap()]
}

fn frame_data(frame: &[Point], dirs: &[Direction]) -> Instance {
    let f = WeightedLatticeSet::from_points(2, frame.iter().cloned()).unwrap();
    Instance::from_set(&f, dirs).unwrap()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn step_cost(a: &[Point], b: &[Point]) -> i64 {
    a.iter().zip(b).map(|(p, q)| p.squared_distance(q)).sum()
}

fn acceleration(tracks: &TrackSet) -> i64 {
    tracks
        .tracks
        .iter()
        .flat_map(|tr| tr.windows(3).map(|w| w[2].sub(&w[1]).squared_distance(&w[1].sub(&w[0]))))
        .sum()
}

#[test]
fn markov_examples() {
    let f = pts(&[[0, 0], [4, 4], [8, 1]]);
    let tr = markov_track(&[f.clone(), f.clone()], squared_step).unwrap();
    assert_eq!(tr.frame(1), f);

    // Two far-apart points each move a little; the swap would cross.
    let tr = markov_track(&[pts(&[[0, 0], [10, 0]]), pts(&[[11, 1], [1, 1]])], squared_step).unwrap();
    assert_eq!(tr.tracks, vec![pts(&[[0, 0], [1, 1]]), pts(&[[10, 0], [11, 1]])]);

    let tr = markov_track(&[pts(&[[0, 0]]), pts(&[[5, 5]]), pts(&[[7, 2]])], squared_step).unwrap();
    assert_eq!(tr.tracks, vec![pts(&[[0, 0], [5, 5], [7, 2]])]);
    assert_eq!((tr.n(), tr.t()), (1, 3));

    assert!(markov_track(&[pts(&[[0, 0]]), pts(&[[0, 0], [1, 1]])], squared_step).is_err());
}

#[test]
fn stepwise_optimum_can_miss_the_straight_coupling() {
    let frames = vec![pts(&[[0, 0], [0, 2]]), pts(&[[3, 1], [3, 0]]), pts(&[[6, 2], [6, -2]])];
    let greedy = markov_track(&frames, squared_step).unwrap();
    let straight = straight_line_coupling_bruteforce(&frames, LineModel::ConstantVelocity).unwrap().unwrap();
    assert!(!greedy.is_affine());
    assert!(straight.is_affine());
    assert_eq!(acceleration(&straight), 0);
    assert!(acceleration(&greedy) > 0);
    assert!(greedy.total_cost(squared_step) < straight.total_cost(squared_step));
}

#[test]
fn straight_line_examples() {
    let tracks = [[[0, 0], [1, 2]], [[5, 0], [-1, 1]], [[2, 7], [1, -1]]];
    let frames: Vec<Vec<Point>> = (0..4)
        .map(|t| {
            let mut f: Vec<Point> = tracks.iter().map(|[p, v]| Point::from([p[0] + t * v[0], p[1] + t * v[1]])).collect();
            f.reverse();
            f
        })
        .collect();
    let found = straight_line_coupling_bruteforce(&frames, LineModel::ConstantVelocity).unwrap().unwrap();
    assert!(found.is_affine());

    let bend = vec![pts(&[[0, 0], [0, 5]]), pts(&[[1, 0], [1, 5]]), pts(&[[2, 3], [2, 9]])];
    assert!(straight_line_coupling_bruteforce(&bend, LineModel::Collinear).unwrap().is_none());

    let line = vec![pts(&[[0, 0]]), pts(&[[1, 1]]), pts(&[[5, 5]])];
    assert!(straight_line_coupling_bruteforce(&line, LineModel::Collinear).unwrap().is_some());
    assert!(straight_line_coupling_bruteforce(&line, LineModel::ConstantVelocity).unwrap().is_none());
    let kink = vec![pts(&[[0, 0]]), pts(&[[1, 1]]), pts(&[[2, 1]])];
    assert!(straight_line_coupling_bruteforce(&kink, LineModel::Collinear).unwrap().is_none());
}

#[test]
fn coupling_guards() {
    let big: Vec<Vec<Point>> = (0..2).map(|_| (0..9).map(|i| Point::from([i, 0])).collect()).collect();
    assert!(straight_line_coupling_bruteforce(&big, LineModel::Collinear).is_err());
    let long: Vec<Vec<Point>> = (0..6).map(|t| vec![Point::from([t, 0])]).collect();
    assert!(straight_line_coupling_bruteforce(&long, LineModel::Collinear).is_err());
}

#[test]
fn rolling_single_particle() {
    let truth: Vec<Point> = (0..6).map(|t| Point::from([2 * t, 7 - t])).collect();
    let data: Vec<Instance> = truth[1..].iter().map(|p| frame_data(std::slice::from_ref(p), &axes())).collect();
    match rolling_horizon(&truth[..1], &data, WeightModel::NearestPredecessor).unwrap() {
        RollingOutcome::Solved { tracks, .. } => assert_eq!(tracks.tracks, vec![truth]),
        other => panic!("{other:?}"),
    }
}

#[test]
fn rolling_three_particles() {
    let starts = [[0, 0], [40, 30], [90, 70]];
    let vel = [[2, 1], [1, 2], [-1, 2]];
    let truth: Vec<Vec<Point>> =
        (0..10).map(|t| starts.iter().zip(&vel).map(|(s, v)| Point::from([s[0] + t * v[0], s[1] + t * v[1]])).collect()).collect();
    let data: Vec<Instance> = truth[1..].iter().map(|f| frame_data(f, &axes())).collect();
    for model in [WeightModel::NearestPredecessor, WeightModel::ConstantVelocity] {
        let RollingOutcome::Solved { frames, tracks } = rolling_horizon(&truth[0], &data, model).unwrap() else {
            panic!("infeasible");
        };
        assert_eq!(frames.len(), 9);
        for tau in 0..10 {
            assert_eq!(tracks.frame(tau), truth[tau], "{model:?} frame {tau}");
        }
    }
}

#[test]
fn rolling_reports_the_bad_frame() {
    let f0 = pts(&[[0, 0], [5, 5]]);
    let good = frame_data(&pts(&[[1, 0], [6, 5]]), &axes());
    let short = frame_data(&pts(&[[1, 0]]), &axes());
    let out = rolling_horizon(&f0, &[good.clone(), short], WeightModel::NearestPredecessor).unwrap();
    assert_eq!(out, RollingOutcome::InfeasibleFrame(2));

    // Both units on one row and one column would need a point of weight 2.
    let mut data: Vec<DataFunction> = axes().into_iter().map(DataFunction::new).collect();
    data[0].add_at(&Point::from([0, 5]), 2).unwrap();
    data[1].add_at(&Point::from([6, 0]), 2).unwrap();
    let bad = Instance::new(2, data).unwrap();
    let out = rolling_horizon(&f0, &[good, bad], WeightModel::NearestPredecessor).unwrap();
    assert_eq!(out, RollingOutcome::InfeasibleFrame(2));
}

#[test]
fn ambiguous_frames_still_match_their_data() {
    // A 2x2 switch: either diagonal is consistent with the data.
    let f0 = pts(&[[0, 0], [1, 1]]);
    let data = frame_data(&pts(&[[10, 10], [11, 11]]), &axes());
    let RollingOutcome::Solved { frames, .. } = rolling_horizon(&f0, std::slice::from_ref(&data), WeightModel::NearestPredecessor).unwrap()
    else {
        panic!("infeasible");
    };
    let got = WeightedLatticeSet::from_points(2, frames[0].iter().cloned()).unwrap();
    assert!(data.is_solution(&got).unwrap());
}

#[test]
fn track_json_round_trip() {
    let tr = markov_track(&[pts(&[[0, 0], [3, 3]]), pts(&[[1, 0], [3, 4]])], squared_step).unwrap();
    let text = serde_json::to_string(&tr).unwrap();
    assert_eq!(serde_json::from_str::<TrackSet>(&text).unwrap(), tr);
}

fn frame(n: usize) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::btree_set((0i64..8, 0i64..8), n).prop_map(|s| s.into_iter().map(|(x, y)| Point::from([x, y])).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn two_frame_markov_is_globally_optimal((a, b) in (1usize..=5).prop_flat_map(|n| (frame(n), frame(n)))) {
        let tr = markov_track(&[a.clone(), b.clone()], squared_step).unwrap();
        let best = permutations(a.len())
            .iter()
            .map(|p| step_cost(&a, &p.iter().map(|&j| b[j].clone()).collect::<Vec<_>>()))
            .min()
            .unwrap();
        prop_assert_eq!(tr.total_cost(squared_step) as i64, best);
        prop_assert_eq!(tr.frame(0), a);
    }

    #[test]
    fn markov_total_is_the_sum_of_step_optima(frames in (1usize..=4).prop_flat_map(|n| prop::collection::vec(frame(n), 2..=4))) {
        let tr = markov_track(&frames, squared_step).unwrap();
        let mut total = 0;
        for w in frames.windows(2) {
            let mut best = i64::MAX;
            for p in permutations(w[0].len()) {
                let q: Vec<Point> = p.iter().map(|&j| w[1][j].clone()).collect();
                best = best.min(step_cost(&w[0], &q));
            }
            total += best;
        }
        prop_assert_eq!(tr.total_cost(squared_step) as i64, total);
        for (tau, f) in frames.iter().enumerate() {
            let mut got = tr.frame(tau);
            let mut want = f.clone();
            got.sort();
            want.sort();
            prop_assert_eq!(got, want);
        }
    }
}

#[test]
fn rolling_frames_always_match_their_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let dir_pool = [[1, 0], [0, 1], [1, 1], [1, -1], [1, 2], [2, 1]];
    for _ in 0..100 {
        let n = rng.gen_range(1..=6);
        let mut cells: Vec<(i64, i64)> = (0..8).flat_map(|x| (0..8).map(move |y| (x, y))).collect();
        let mut pick = |rng: &mut ChaCha8Rng| {
            cells.shuffle(rng);
            cells[..n].iter().map(|&(x, y)| Point::from([x, y])).collect::<Vec<_>>()
        };
        let first = pick(&mut rng);
        let mut two: Vec<[i64; 2]> = dir_pool.to_vec();
        two.shuffle(&mut rng);
        let dirs: Vec<Direction> = two[..2].iter().map(|v| canonical_direction(v).unwrap()).collect();
        let truth: Vec<Vec<Point>> = (0..4).map(|_| pick(&mut rng)).collect();
        let data: Vec<Instance> = truth.iter().map(|f| frame_data(f, &dirs)).collect();
        let RollingOutcome::Solved { frames, tracks } = rolling_horizon(&first, &data, WeightModel::ConstantVelocity).unwrap()
        else {
            panic!("consistent data reported infeasible");
        };
        assert_eq!((tracks.n(), tracks.t()), (n, 5));
        for (f, d) in frames.iter().zip(&data) {
            let set = WeightedLatticeSet::from_points(2, f.iter().cloned()).unwrap();
            assert_eq!(set.len(), n);
            assert!(d.is_solution(&set).unwrap());
        }
    }
}
