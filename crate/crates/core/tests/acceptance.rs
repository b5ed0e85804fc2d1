//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails or exceeds its time budget.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tomo_core::grains::{gamma_matrix, gbpd_assign, gbpd_fit, GbpdSpec};
use tomo_core::image::BinaryImage;
use tomo_core::pte::{points_with_multiplicity, project, prouhet_solution, pte2_verify, pte_from_switching, pte_verify, PteOutcome};
use tomo_core::recon2::{count_solutions_bruteforce, gale_ryser_consistent, ryser_reconstruct, unique2};
use tomo_core::superres::{dr_bruteforce, dr_solutions, dr_solve, DrInstance};
use tomo_core::switching::{divisibility_check, good_four_cross_ratio, renyi_uniqueness_check, tomographically_equivalent, zonotope_switching};
use tomo_core::tracking::{rolling_horizon, RollingOutcome, WeightModel};
use tomo_core::{canonical_direction, xray, BoundingBox, Direction, Instance, LineKey, Point, WeightedLatticeSet};

type Outcome = std::result::Result<String, String>;

fn dir(v: &[i64]) -> Direction {
    canonical_direction(v).unwrap()
}

fn axes() -> Vec<Direction> {
    vec![dir(&[0, 1]), dir(&[1, 0])]
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn pte_printed_values() -> Outcome {
    let x = [0, 14, 28, 56, 70, 84];
    let y = [4, 6, 40, 44, 78, 80];
    ensure(pte_verify(&x, &y, 5).unwrap(), || "degree 5 rejected".into())?;
    ensure(!pte_verify(&x, &y, 6).unwrap(), || "degree 6 accepted".into())?;
    let xs = WeightedLatticeSet::from_points(2, [[0, 2], [1, 0], [2, 5], [4, 1], [5, 6], [6, 4]]).unwrap();
    let ys = WeightedLatticeSet::from_points(2, [[0, 1], [1, 4], [2, 0], [4, 6], [5, 2], [6, 5]]).unwrap();
    let px = project(&xs, &[1, 2]).unwrap();
    let py = project(&ys, &[1, 2]).unwrap();
    ensure(px == [1, 4, 6, 12, 14, 17], || format!("projection of X is {px:?}"))?;
    ensure(py == [2, 2, 9, 9, 16, 16], || format!("projection of Y is {py:?}"))?;
    ensure(pte_verify(&px, &py, 5).unwrap(), || "projected pair fails at degree 5".into())?;
    Ok("printed pairs verified".into())
}

fn two_direction_oracle() -> Outcome {
    let mut instances = 0u64;
    for rows in 1..=4usize {
        for cols in 1..=4usize {
            let cells = rows * cols;
            let mut count: HashMap<(Vec<u32>, Vec<u32>), u64> = HashMap::new();
            let mut images = Vec::with_capacity(1 << cells);
            for mask in 0u64..1 << cells {
                let img = BinaryImage::from_mask(rows, cols, mask);
                *count.entry((img.row_sums(), img.col_sums())).or_default() += 1;
                images.push(img);
            }
            // Every pair of sum vectors of the right shape.
            let row_vectors = vectors(rows, cols as u32);
            let col_vectors = vectors(cols, rows as u32);
            for r in &row_vectors {
                for c in &col_vectors {
                    let consistent = count.contains_key(&(r.clone(), c.clone()));
                    ensure(gale_ryser_consistent(r, c) == consistent, || format!("Gale-Ryser wrong for {r:?} {c:?}"))?;
                    match ryser_reconstruct(r, c) {
                        Some(img) => ensure(consistent && img.row_sums() == *r && img.col_sums() == *c, || {
                            format!("Ryser returned a wrong image for {r:?} {c:?}")
                        })?,
                        None => ensure(!consistent, || format!("Ryser missed {r:?} {c:?}"))?,
                    }
                }
            }
            let bbox = BoundingBox::new([0, 0], [rows as i64 - 1, cols as i64 - 1]).unwrap();
            let mut counted = BTreeSet::new();
            for img in &images {
                let f = img.to_lattice_set();
                let key = (img.row_sums(), img.col_sums());
                let n = count[&key];
                ensure(unique2(&f, &axes()).unwrap() == (n == 1), || format!("unique2 wrong for {img:?}"))?;
                if counted.insert(key) {
                    let inst = Instance::from_set(&f, &axes()).unwrap();
                    let c = count_solutions_bruteforce(&inst, &bbox).unwrap();
                    ensure(c == n, || format!("count {c} != {n} for {img:?}"))?;
                }
                instances += 1;
            }
        }
    }
    Ok(format!("{instances} matrices over 16 shapes"))
}

fn vectors(len: usize, max: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=max).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

fn stability_jump() -> Outcome {
    let sets = [
        vec![dir(&[1, 0]), dir(&[0, 1]), dir(&[1, 1])],
        vec![dir(&[1, 0]), dir(&[0, 1]), dir(&[1, -1])],
        vec![dir(&[1, 0]), dir(&[1, 1]), dir(&[1, 2])],
    ];
    let cells = BoundingBox::cube(2, 3).points();
    let mut pairs = 0u64;
    for dirs in &sets {
        let subsets: Vec<WeightedLatticeSet> = (0u32..1 << 9)
            .map(|m| WeightedLatticeSet::from_points(2, cells.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, p)| p.clone())).unwrap())
            .collect();
        let rays: Vec<Vec<_>> = subsets.iter().map(|f| dirs.iter().map(|d| xray(f, d).unwrap()).collect()).collect();
        for a in 0..subsets.len() {
            for b in a + 1..subsets.len() {
                if subsets[a].len() != subsets[b].len() {
                    continue;
                }
                pairs += 1;
                let delta: i64 = rays[a].iter().zip(&rays[b]).map(|(x, y)| x.l1_distance(y).unwrap()).sum();
                ensure(delta == 0 || delta >= 4, || format!("delta {delta} for {:?} / {:?}", subsets[a], subsets[b]))?;
            }
        }
    }
    Ok(format!("{pairs} equal-cardinality pairs, 3 direction sets"))
}

fn random_direction(rng: &mut ChaCha8Rng, max: i64) -> Direction {
    loop {
        let v = [rng.gen_range(-max..=max), rng.gen_range(-max..=max)];
        if let Ok(d) = canonical_direction(&v) {
            return d;
        }
    }
}

fn renyi() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let bbox = BoundingBox::cube(2, 6);
    let cells = bbox.points();
    for trial in 0..1000 {
        let m = rng.gen_range(2..=5);
        let mut dirs: Vec<Direction> = Vec::new();
        while dirs.len() < m {
            let d = random_direction(&mut rng, 3);
            if !dirs.contains(&d) {
                dirs.push(d);
            }
        }
        let k = rng.gen_range(1..m);
        let f = WeightedLatticeSet::from_points(2, cells.choose_multiple(&mut rng, k).cloned()).unwrap();
        let ok = renyi_uniqueness_check(&f, &dirs, &bbox).map_err(|e| format!("trial {trial}: {e}"))?;
        ensure(ok, || format!("trial {trial}: {f:?} not unique for {dirs:?}"))?;
    }
    Ok("1000 trials".into())
}

/// Does `pts` contain every point of `cells` lying in its convex hull?
fn is_lattice_convex(pts: &[Point], cells: &[Point]) -> bool {
    let mut v: Vec<(i64, i64)> = pts.iter().map(|p| (p[0], p[1])).collect();
    v.sort_unstable();
    if v.len() <= 1 {
        return true;
    }
    let cross = |o: (i64, i64), a: (i64, i64), b: (i64, i64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(i64, i64)>> = if pass == 0 { Box::new(v.iter()) } else { Box::new(v.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    let inside = |q: (i64, i64)| -> bool {
        if hull.len() <= 2 {
            let (a, b) = (v[0], v[v.len() - 1]);
            cross(a, b, q) == 0 && (a.0.min(b.0)..=a.0.max(b.0)).contains(&q.0) && (a.1.min(b.1)..=a.1.max(b.1)).contains(&q.1)
        } else {
            (0..hull.len()).all(|i| cross(hull[i], hull[(i + 1) % hull.len()], q) >= 0)
        }
    };
    let members: BTreeSet<(i64, i64)> = v.iter().copied().collect();
    cells.iter().all(|c| members.contains(&(c[0], c[1])) || !inside((c[0], c[1])))
}

fn convex_uniqueness() -> Outcome {
    let dirs = vec![dir(&[1, 0]), dir(&[1, 1]), dir(&[1, 2]), dir(&[1, 5])];
    ensure(good_four_cross_ratio(&dirs).unwrap(), || "direction set reported as bad".into())?;
    let n = 5i64;
    let cells = BoundingBox::cube(2, n).points();
    // Convex lattice sets meet every row in an interval and occupy
    // consecutive rows.
    let intervals: Vec<Option<(i64, i64)>> =
        std::iter::once(None).chain((0..n).flat_map(|a| (a..n).map(move |b| Some((a, b))))).collect();
    let mut signatures: BTreeMap<Vec<Vec<(LineKey, i64)>>, Vec<Point>> = BTreeMap::new();
    let mut convex = 0u64;
    let mut choice = vec![0usize; n as usize];
    loop {
        let rows: Vec<Option<(i64, i64)>> = choice.iter().map(|&c| intervals[c]).collect();
        let occupied: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].is_some()).collect();
        let consecutive = occupied.windows(2).all(|w| w[1] == w[0] + 1);
        if consecutive {
            let pts: Vec<Point> = rows
                .iter()
                .enumerate()
                .flat_map(|(i, r)| r.iter().flat_map(move |&(a, b)| (a..=b).map(move |j| Point::from([i as i64, j]))))
                .collect();
            if is_lattice_convex(&pts, &cells) {
                convex += 1;
                let f = WeightedLatticeSet::from_points(2, pts.iter().cloned()).unwrap();
                let sig: Vec<Vec<(LineKey, i64)>> =
                    dirs.iter().map(|d| xray(&f, d).unwrap().lines().map(|(k, v)| (k.clone(), v)).collect()).collect();
                if let Some(prev) = signatures.insert(sig, pts.clone()) {
                    return Err(format!("{prev:?} and {pts:?} are tomographically equivalent"));
                }
            }
        }
        let mut i = 0;
        loop {
            if i == choice.len() {
                return Ok(format!("{convex} convex sets, all X-ray signatures distinct"));
            }
            choice[i] += 1;
            if choice[i] < intervals.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

fn switching_chain() -> Outcome {
    let pool: Vec<Direction> = {
        let mut v: Vec<Direction> = Vec::new();
        for a in -2..=2 {
            for b in -2..=2 {
                if let Ok(d) = canonical_direction(&[a, b]) {
                    if !v.contains(&d) {
                        v.push(d);
                    }
                }
            }
        }
        v
    };
    let mut checked = 0;
    for mask in 0u32..1 << pool.len() {
        let size = mask.count_ones() as usize;
        if !(2..=6).contains(&size) {
            continue;
        }
        let dirs: Vec<Direction> = pool.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, d)| d.clone()).collect();
        let m = size - 1;
        let pair = zonotope_switching(&dirs, &Point::origin(2)).unwrap();
        ensure(tomographically_equivalent(&pair.plus, &pair.minus, &dirs).unwrap(), || format!("{dirs:?}: not equivalent"))?;
        let want = 1i64 << m;
        ensure(pair.plus.total_weight() == want && pair.minus.total_weight() == want, || {
            format!("{dirs:?}: class weights {} / {}", pair.plus.total_weight(), pair.minus.total_weight())
        })?;
        let xs = points_with_multiplicity(&pair.plus);
        let ys = points_with_multiplicity(&pair.minus);
        ensure(pte2_verify(&xs, &ys, m).unwrap(), || format!("{dirs:?}: mixed moments differ"))?;
        let solution = [[1, 7], [1, 11], [3, 13], [5, 17]].iter().find_map(|c| match pte_from_switching(&pair, c).unwrap() {
            PteOutcome::Solution(s) => Some(s),
            PteOutcome::Degenerate => None,
        });
        let s = solution.ok_or_else(|| format!("{dirs:?}: every projection degenerate"))?;
        ensure(s.degree == m && pte_verify(&s.x, &s.y, m).unwrap(), || format!("{dirs:?}: projection fails"))?;
        checked += 1;
    }
    Ok(format!("{checked} direction sets"))
}

fn random_pair(rng: &mut ChaCha8Rng, dim: usize, v: &Direction, equal: bool) -> (WeightedLatticeSet, WeightedLatticeSet) {
    let mut psi = WeightedLatticeSet::new(dim);
    for _ in 0..rng.gen_range(1..6) {
        let p: Vec<i64> = (0..dim).map(|_| rng.gen_range(0..5)).collect();
        psi.add(Point::from(p), rng.gen_range(-3..=3)).unwrap();
    }
    let mut phi = psi.clone();
    if equal {
        // Slide weight along lines parallel to v, staying in the orthant.
        for _ in 0..rng.gen_range(1..4) {
            let p: Vec<i64> = (0..dim).map(|_| rng.gen_range(0..5)).collect();
            let p = Point::from(p);
            let k = rng.gen_range(-3..=3);
            let q = p.offset(v.components(), k);
            if q.iter().all(|&c| c >= 0) {
                let w = rng.gen_range(1..=3);
                phi.add(p, -w).unwrap();
                phi.add(q, w).unwrap();
            }
        }
    } else {
        let p: Vec<i64> = (0..dim).map(|_| rng.gen_range(0..5)).collect();
        phi.add(Point::from(p), rng.gen_range(-2..=2)).unwrap();
    }
    (psi, phi)
}

fn hajdu_tijdeman() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut equal_rays = 0;
    for trial in 0..1000 {
        let dim = if trial % 4 == 0 { 3 } else { 2 };
        let v = loop {
            let c: Vec<i64> = (0..dim).map(|_| rng.gen_range(-3..=3)).collect();
            if let Ok(d) = canonical_direction(&c) {
                break d;
            }
        };
        let (psi, phi) = random_pair(&mut rng, dim, &v, trial % 2 == 0);
        let same = xray(&psi, &v).unwrap() == xray(&phi, &v).unwrap();
        equal_rays += usize::from(same);
        let div = divisibility_check(&psi, &phi, &v).unwrap();
        ensure(div == same, || format!("trial {trial}: divisible {div}, equal X-rays {same} for {psi:?} / {phi:?} along {v:?}"))?;
    }
    Ok(format!("1000 pairs, {equal_rays} with equal X-rays"))
}

fn dr_round_trip() -> Outcome {
    let mut seen = BTreeSet::new();
    let mut unique = 0;
    let mut infeasible = 0;
    for mask in 0u64..1 << 16 {
        let img = BinaryImage::from_mask(4, 4, mask);
        let inst = DrInstance::from_image(&img, 2).unwrap();
        let mut variants = vec![inst.clone()];
        // A unit of row mass moved between rows keeps the totals but breaks
        // most instances.
        if let (Some(a), Some(b)) = (inst.row_sums.iter().position(|&r| r > 0), inst.row_sums.iter().rposition(|&r| r < 4)) {
            if a != b {
                let mut broken = inst.clone();
                broken.row_sums[a] -= 1;
                broken.row_sums[b] += 1;
                variants.push(broken);
            }
        }
        for inst in variants {
            if !seen.insert((inst.rho.values().to_vec(), inst.row_sums.clone(), inst.col_sums.clone())) {
                continue;
            }
            let all = dr_bruteforce(&inst).unwrap();
            let found = dr_solve(&inst).unwrap();
            ensure(found.as_ref() == all.first(), || format!("dr_solve disagrees with the oracle on {img:?}"))?;
            if let Some(f) = &found {
                ensure(inst.is_solution(f), || format!("invalid solution for {img:?}"))?;
            } else {
                infeasible += 1;
            }
            let two = dr_solutions(&inst, 2).unwrap();
            ensure(two.len() == all.len().min(2), || format!("uniqueness disagrees on {img:?}"))?;
            unique += usize::from(all.len() == 1);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for trial in 0..200 {
        let img = BinaryImage::from_mask(8, 8, rng.gen());
        let inst = DrInstance::from_image(&img, 2).unwrap();
        let f = dr_solve(&inst).unwrap().ok_or_else(|| format!("8x8 trial {trial} reported infeasible"))?;
        ensure(inst.is_solution(&f), || format!("8x8 trial {trial}: constraints violated"))?;
    }
    Ok(format!("{} distinct 4x4-derived instances ({unique} unique, {infeasible} infeasible), 200 8x8", seen.len()))
}

fn tracking_scenes() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for scene in 0..50 {
        let n = rng.gen_range(1..=10usize);
        let t = rng.gen_range(2..=10i64);
        let vmax = 2i64;
        let disp = ((2 * vmax * vmax) as f64).sqrt();
        // Coordinate gaps large enough to survive relative drift over t frames.
        let gap = 2 * vmax * t + (3.0 * disp).ceil() as i64 + 1;
        let mut order: Vec<i64> = (0..n as i64).collect();
        order.shuffle(&mut rng);
        let start: Vec<[i64; 2]> = (0..n).map(|i| [i as i64 * gap + rng.gen_range(0..3), order[i] * gap + rng.gen_range(0..3)]).collect();
        let vel: Vec<[i64; 2]> = (0..n).map(|_| [rng.gen_range(-vmax..=vmax), rng.gen_range(-vmax..=vmax)]).collect();
        let truth: Vec<Vec<Point>> =
            (0..t).map(|tau| (0..n).map(|i| Point::from([start[i][0] + tau * vel[i][0], start[i][1] + tau * vel[i][1]])).collect()).collect();
        let min_sep = (0..t as usize)
            .flat_map(|tau| {
                let f = &truth[tau];
                (0..n).flat_map(move |i| (i + 1..n).map(move |j| (f[i][0] - f[j][0]).abs().min((f[i][1] - f[j][1]).abs())))
            })
            .min()
            .unwrap_or(i64::MAX);
        ensure(min_sep as f64 >= 3.0 * disp, || format!("scene {scene}: generator broke separation"))?;
        let data: Vec<Instance> = truth[1..]
            .iter()
            .map(|f| Instance::from_set(&WeightedLatticeSet::from_points(2, f.iter().cloned()).unwrap(), &axes()).unwrap())
            .collect();
        let model = if scene % 2 == 0 { WeightModel::NearestPredecessor } else { WeightModel::ConstantVelocity };
        let RollingOutcome::Solved { frames, tracks } = rolling_horizon(&truth[0], &data, model).unwrap() else {
            return Err(format!("scene {scene}: reported infeasible"));
        };
        for (k, f) in frames.iter().enumerate() {
            let set = WeightedLatticeSet::from_points(2, f.iter().cloned()).unwrap();
            ensure(data[k].is_solution(&set).unwrap(), || format!("scene {scene}: frame {} misses its X-rays", k + 1))?;
        }
        for i in 0..n {
            let expect: Vec<Point> = truth.iter().map(|f| f[i].clone()).collect();
            ensure(tracks.tracks[i] == expect, || format!("scene {scene}: track {i} differs"))?;
        }
    }
    Ok("50 scenes recovered".into())
}

fn random_spd(rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let theta: f64 = rng.gen_range(0.0..std::f64::consts::PI);
    let (l1, l2): (f64, f64) = (rng.gen_range(0.4..2.5), rng.gen_range(0.4..2.5));
    let (c, s) = (theta.cos(), theta.sin());
    vec![vec![l1 * c * c + l2 * s * s, (l1 - l2) * c * s], vec![(l1 - l2) * c * s, l1 * s * s + l2 * c * c]]
}

fn gbpd_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let domain = BoundingBox::cube(2, 128);
    let pixels = domain.points();
    let mut worst = 1.0f64;
    for trial in 0..20 {
        let l = rng.gen_range(1..=8);
        let sites: Vec<Vec<f64>> = (0..l).map(|_| vec![rng.gen_range(0.0..128.0), rng.gen_range(0.0..128.0)]).collect();
        let matrices: Vec<Vec<Vec<f64>>> = (0..l).map(|_| random_spd(&mut rng)).collect();
        let weights: Vec<f64> = (0..l).map(|_| rng.gen_range(0.0..400.0)).collect();
        let spec = GbpdSpec::new(sites.clone(), matrices.clone(), weights).unwrap();
        let truth = gbpd_assign(&spec, &domain).unwrap();
        let vols = truth.volumes(l);
        let fit = gbpd_fit(&pixels, &sites, &matrices, &vols, &vols).unwrap().ok_or_else(|| format!("trial {trial}: infeasible"))?;
        let map = fit.label_map(&domain, &pixels).unwrap();
        let agree = map.agreement(&truth).unwrap();
        worst = worst.min(agree);
        ensure(agree >= 0.99, || format!("trial {trial}: agreement {agree}"))?;
        ensure(map.volumes(l) == vols, || format!("trial {trial}: volumes differ"))?;
        let gamma = gamma_matrix(&pixels, &sites, &matrices, 2).unwrap();
        let tol = 1.0 / 1024.0;
        for (i, &j) in fit.labels.iter().enumerate() {
            for k in 0..l {
                let lhs = gamma[i][j] - fit.sigma[j];
                let rhs = gamma[i][k] - fit.sigma[k] + tol;
                ensure(lhs <= rhs, || format!("trial {trial}: certificate fails at pixel {i}, {lhs} > {rhs}"))?;
            }
        }
    }
    Ok(format!("20 diagrams, worst agreement {:.4}", worst))
}

fn prouhet() -> Outcome {
    for k in 1..=10 {
        let p = prouhet_solution(k).unwrap();
        ensure(pte_verify(&p.x, &p.y, k).unwrap(), || format!("degree {k} fails"))?;
    }
    let p2 = prouhet_solution(2).unwrap();
    ensure(p2.x == [0, 3, 5, 6] && p2.y == [1, 2, 4, 7], || format!("k = 2 gives {:?} / {:?}", p2.x, p2.y))?;
    Ok("k = 1..10".into())
}

fn main() {
    let criteria: [(&str, u64, fn() -> Outcome); 11] = [
        ("pte printed values", 1, pte_printed_values),
        ("two-direction oracle equivalence", 60, two_direction_oracle),
        ("stability jump", 300, stability_jump),
        ("renyi uniqueness", 120, renyi),
        ("convex uniqueness", 600, convex_uniqueness),
        ("switching and pte chain", 120, switching_chain),
        ("hajdu-tijdeman divisibility", 60, hajdu_tijdeman),
        ("double resolution round trip", 600, dr_round_trip),
        ("rolling horizon tracking", 120, tracking_scenes),
        ("gbpd round trip", 300, gbpd_round_trip),
        ("prouhet construction", 10, prouhet),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed();
        let result = match result {
            Ok(detail) if elapsed > Duration::from_secs(*budget) => Err(format!("{detail}; over the {budget} s budget")),
            r => r,
        };
        match result {
            Ok(detail) => println!("PASS {:>2} {name} ({:.2?}): {detail}", i + 1, elapsed),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({:.2?}): {why}", i + 1, elapsed);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
