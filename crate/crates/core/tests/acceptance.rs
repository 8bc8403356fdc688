//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! fails. Oracles are computed here, independently of the library paths
//! they check, wherever an independent route exists.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hadwiger::cli::{run_cli, Cli};
use hadwiger::complex::{CellId, GridComplex, GridRegion, SimplicialSet};
use hadwiger::function::{ConstructibleFunction, Cut, PLFunction};
use hadwiger::integrals::{
    hadwiger_constructible, hadwiger_pl, hadwiger_pl_euler, prop31_residual, step_integral_pl, verdier_dual, Bound,
    MonteCarlo,
};
use hadwiger::valuation::{
    additivity_residual, decreasing_composition, excursion_difference_form, invariance_residual, translation_residual,
    CoefficientProfile, HadwigerValuation,
};
use hadwiger::volumes::{
    calibrate, mu_crofton, mu_grid_exact, mu_slice_mc, CroftonConstants, CALIBRATION_SEED, DEFAULT_CALIBRATION_SAMPLES,
};

/// Tolerance of every exact comparison.
const EXACT_TOL: f64 = 1e-9;
/// Width of Monte Carlo agreement bands, in standard errors.
const SIGMAS: f64 = 3.0;

type Outcome = Result<String, String>;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= EXACT_TOL * (1.0 + a.abs().max(b.abs()))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn elementary_symmetric(xs: &[f64], k: usize) -> f64 {
    // sum over k-subsets by bitmask; xs has at most 3 entries here
    (0u32..1 << xs.len())
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..xs.len()).filter(|b| m >> b & 1 == 1).map(|b| xs[b]).product::<f64>())
        .sum()
}

fn random_axes<R: Rng>(r: &mut R, n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| {
            let mut x = r.random_range(-3.0..0.0);
            (0..r.random_range(2..5))
                .map(|_| {
                    let v = x;
                    x += r.random_range(0.1..2.0);
                    v
                })
                .collect()
        })
        .collect()
}

fn random_grid_function<R: Rng>(r: &mut R, n: usize) -> ConstructibleFunction {
    let complex = GridComplex::new(random_axes(r, n)).unwrap();
    let palette = [-2.0, -1.25, -0.5, 0.0, 0.0, 0.0, 0.5, 1.0, 1.75, 3.0];
    let values = (0..complex.cell_count()).map(|_| palette[r.random_range(0..palette.len())]).collect();
    ConstructibleFunction::new(complex, values).unwrap()
}

fn random_pl<R: Rng>(r: &mut R, n: usize) -> PLFunction {
    let m = if n == 3 { 1 } else { r.random_range(1..4) };
    let set = SimplicialSet::triangulated_box(&vec![0.0; n], &vec![1.0; n], m).unwrap();
    let values = (0..set.vertices().len()).map(|_| r.random_range(-2.0..2.0)).collect();
    PLFunction::new(set, values).unwrap()
}

fn random_increasing<R: Rng>(r: &mut R) -> CoefficientProfile {
    let mut pts: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    for dir in [1.0, -1.0] {
        let (mut x, mut y) = (0.0, 0.0);
        for _ in 0..r.random_range(1..4) {
            x += dir * r.random_range(0.2..1.5);
            y += dir * if r.random_bool(0.2) { 0.0 } else { r.random_range(0.1..2.0) };
            pts.push((x, y));
        }
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    CoefficientProfile::new(pts).unwrap()
}

fn tent() -> PLFunction {
    let set = SimplicialSet::closed(1, vec![vec![-1.0], vec![0.0], vec![1.0]], &[vec![0, 1], vec![1, 2]]).unwrap();
    PLFunction::new(set, vec![0.0, 1.0, 0.0]).unwrap()
}

/// h(x) = 1 − max(|x0|, |x1|) on [−1, 1]², triangulated through the apex.
fn pyramid() -> PLFunction {
    let mut vertices = Vec::new();
    for y in [-1.0, 0.0, 1.0] {
        for x in [-1.0, 0.0, 1.0] {
            vertices.push(vec![x, y]);
        }
    }
    let tops = [[0, 1, 4], [0, 3, 4], [1, 2, 4], [2, 4, 5], [3, 4, 6], [4, 6, 7], [4, 5, 8], [4, 7, 8]];
    let set = SimplicialSet::closed(2, vertices, &tops.map(|t| t.to_vec())).unwrap();
    PLFunction::sampled(set, |x| 1.0 - x[0].abs().max(x[1].abs())).unwrap()
}

fn unit_square() -> SimplicialSet {
    SimplicialSet::closed(
        2,
        vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]],
        &[vec![0, 1, 2], vec![0, 2, 3]],
    )
    .unwrap()
}

/// Default calibration of c[n][k] for the listed pairs.
fn default_constants(pairs: &[(usize, usize)]) -> CroftonConstants {
    let mut t = CroftonConstants::new();
    for &(n, k) in pairs {
        t.ensure(n, k, DEFAULT_CALIBRATION_SAMPLES, CALIBRATION_SEED).unwrap();
    }
    t
}

fn criterion_1() -> Outcome {
    let mut details = Vec::new();
    for k in 0..=3usize {
        let mut vertices = vec![vec![0.0; 3]];
        for a in 0..k {
            let mut v = vec![0.0; 3];
            v[a] = 1.0 + a as f64;
            vertices.push(v);
        }
        let set = SimplicialSet::new(3, vertices, vec![(0..=k).collect()]).map_err(|e| e.to_string())?;
        let chi = set.euler_characteristic();
        let want = if k % 2 == 0 { 1 } else { -1 };
        ensure(chi == want, || format!("open {k}-simplex: χ = {chi}, want {want}"))?;
        details.push(format!("χ(σ{k}) = {chi}"));
    }
    Ok(details.join(", "))
}

fn criterion_2() -> Outcome {
    let mut r = rng(2);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let (a, b) = (r.random_range(0.1..10.0), r.random_range(0.1..10.0));
        let lo = [r.random_range(-5.0..5.0), r.random_range(-5.0..5.0)];
        let region = GridRegion::full(GridComplex::new(vec![vec![lo[0], lo[0] + a], vec![lo[1], lo[1] + b]]).unwrap());
        for (k, want) in [(0, 1.0), (1, a + b), (2, a * b)] {
            let got = mu_grid_exact(&region, k).unwrap();
            worst = worst.max((got - want).abs());
            ensure(close(got, want), || format!("box {a}×{b}: μ_{k} = {got}, want {want}"))?;
        }
    }
    for i in 0..50 {
        let n = 1 + i % 3;
        let complex = GridComplex::new(random_axes(&mut r, n)).unwrap();
        let mask = (0..complex.cell_count()).map(|_| r.random_bool(0.4)).collect();
        let region = GridRegion::from_mask(complex, mask).unwrap();
        let lambda = r.random_range(0.2..5.0);
        let scaled = region.with_complex(region.complex().scaled(lambda).unwrap()).unwrap();
        for k in 0..=n {
            let (a, b) = (mu_grid_exact(&scaled, k).unwrap(), lambda.powi(k as i32) * mu_grid_exact(&region, k).unwrap());
            ensure(close(a, b), || format!("homogeneity n = {n}, k = {k}, λ = {lambda}: {a} vs {b}"))?;
        }
    }
    Ok(format!("50 boxes, max |error| {worst:.1e}; homogeneity on 50 random regions"))
}

fn criterion_3() -> Outcome {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    pool.install(|| {
        let start = Instant::now();
        let cal = calibrate(2, 1, DEFAULT_CALIBRATION_SAMPLES, CALIBRATION_SEED).map_err(|e| e.to_string())?;
        let cal_time = start.elapsed().as_secs_f64();
        ensure((cal.constant - FRAC_PI_2).abs() <= SIGMAS * cal.stderr, || {
            format!("c[2][1] = {} ± {}, π/2 = {FRAC_PI_2}", cal.constant, cal.stderr)
        })?;
        let mut table = CroftonConstants::new();
        table.insert(cal);
        let square = unit_square();
        let start = Instant::now();
        let crofton = mu_crofton(&square, 1, 10_000, 0, &table).map_err(|e| e.to_string())?;
        let slice = mu_slice_mc(&square, 1, 10_000, 0, &table).map_err(|e| e.to_string())?;
        let est_time = start.elapsed().as_secs_f64();
        for (name, est) in [("projection", crofton), ("slice", slice)] {
            ensure((est.value - 2.0).abs() <= SIGMAS * est.stderr, || {
                format!("{name}: {} ± {}, want 2", est.value, est.stderr)
            })?;
        }
        ensure(est_time < 5.0, || format!("estimators took {est_time:.2} s single-threaded"))?;
        Ok(format!(
            "c[2][1] = {:.5} ± {:.5}; projection {:.4} ± {:.4}; slice {:.4} ± {:.4}; {est_time:.2} s for both (calibration {cal_time:.2} s)",
            cal.constant, cal.stderr, crofton.value, crofton.stderr, slice.value, slice.stderr
        ))
    })
}

fn criterion_4() -> Outcome {
    let mut r = rng(4);
    for i in 0..50 {
        let n = 1 + i % 3;
        let complex = GridComplex::new(
            (0..n).map(|_| {
                let mut x = r.random_range(-2.0..0.0);
                (0..7).map(|_| { let v = x; x += r.random_range(0.1..1.0); v }).collect()
            }).collect(),
        )
        .unwrap();
        // open top cells whose closures are pairwise disjoint: some axis
        // index differs by at least 2
        let mut chosen: Vec<Vec<usize>> = Vec::new();
        for _ in 0..8 {
            let cand: Vec<usize> = (0..n).map(|_| r.random_range(0..6)).collect();
            if chosen.iter().all(|c| c.iter().zip(&cand).any(|(a, b)| a.abs_diff(*b) >= 2)) {
                chosen.push(cand);
            }
        }
        let cells: Vec<CellId> = chosen.iter().map(|c| CellId(c.iter().map(|j| 2 * j + 1).collect())).collect();
        let region = GridRegion::new(complex.clone(), cells.clone()).unwrap();
        let closure = region.closure();
        for k in 0..=n {
            let sign = if (n - k) % 2 == 0 { 1.0 } else { -1.0 };
            let open = mu_grid_exact(&region, k).unwrap();
            let closed = mu_grid_exact(&closure, k).unwrap();
            let oracle: f64 = cells
                .iter()
                .map(|c| {
                    let lengths: Vec<f64> = (0..n)
                        .map(|a| {
                            let j = c.0[a] / 2;
                            complex.breakpoints()[a][j + 1] - complex.breakpoints()[a][j]
                        })
                        .collect();
                    elementary_symmetric(&lengths, k)
                })
                .sum();
            ensure(close(open, sign * closed) && close(closed, oracle), || {
                format!("n = {n}, k = {k}: μ(A) = {open}, μ(Ā) = {closed}, closed-box oracle {oracle}")
            })?;
        }
    }
    Ok("50 unions of open boxes, n ∈ {1, 2, 3}, all k; closures also match the closed-box oracle".into())
}

fn criterion_5() -> Outcome {
    let mut r = rng(5);
    for i in 0..100 {
        let n = 1 + i % 3;
        let h = random_grid_function(&mut r, n);
        let neg = h.map(|v| -v);
        for k in 0..=n {
            let a = hadwiger_constructible(&h, k, Bound::Lower).unwrap().value;
            let b = hadwiger_constructible(&neg, k, Bound::Upper).unwrap().value;
            ensure(close(a, -b), || format!("grid function {i}, k = {k}: {a} vs {}", -b))?;
        }
    }
    let t = tent();
    let table = default_constants(&[(2, 1)]);
    let mc = |seed| MonteCarlo { samples: 10_000, seed, constants: &table };
    let a = hadwiger_pl(&t, 1, Bound::Lower, &mc(0)).unwrap();
    let b = hadwiger_pl(&t.map_values(|v| -v), 1, Bound::Upper, &mc(1)).unwrap();
    ensure(close(a.value, -b.value), || format!("tent k = 1: {} vs {}", a.value, -b.value))?;
    let p = pyramid();
    let a2 = hadwiger_pl(&p, 1, Bound::Lower, &mc(0)).unwrap();
    let b2 = hadwiger_pl(&p.map_values(|v| -v), 1, Bound::Upper, &mc(1)).unwrap();
    let combined = (a2.stderr.powi(2) + b2.stderr.powi(2)).sqrt();
    ensure((a2.value + b2.value).abs() <= SIGMAS * combined, || {
        format!("pyramid k = 1: {} ± {} vs {} ± {}", a2.value, a2.stderr, -b2.value, b2.stderr)
    })?;
    Ok(format!(
        "100 grid functions exact; tent k = 1 (= n) {} = {}; 2D pyramid k = 1: {:.4} vs {:.4} (combined stderr {:.4})",
        a.value, -b.value, a2.value, -b2.value, combined
    ))
}

fn criterion_6() -> Outcome {
    let t = tent();
    let (lo, up) = (hadwiger_pl_euler(&t, Bound::Lower).value, hadwiger_pl_euler(&t, Bound::Upper).value);
    ensure(lo == 1.0 && up == -1.0, || format!("tent: lower {lo}, upper {up}"))?;
    let mut r = rng(6);
    for i in 0..50 {
        let n = 1 + i % 3;
        let h = random_grid_function(&mut r, n);
        // oracle: Σ value × volume over full-dimensional cells
        let c = h.complex();
        let oracle: f64 = c
            .cells()
            .filter(|cell| cell.0.iter().all(|p| p % 2 == 1))
            .map(|cell| {
                let vol: f64 = (0..n)
                    .map(|a| {
                        let j = cell.0[a] / 2;
                        c.breakpoints()[a][j + 1] - c.breakpoints()[a][j]
                    })
                    .product();
                vol * h.value(&cell)
            })
            .sum();
        for bound in [Bound::Lower, Bound::Upper] {
            let v = hadwiger_constructible(&h, n, bound).unwrap().value;
            ensure(close(v, oracle), || format!("grid function {i}: {v} vs Lebesgue {oracle}"))?;
        }
    }
    let table = CroftonConstants::new();
    let mc = MonteCarlo { samples: 2, seed: 0, constants: &table };
    for i in 0..10 {
        let n = 1 + i % 3;
        let h = random_pl(&mut r, n);
        let set = h.set();
        // oracle: Σ simplex volume × mean vertex value (Gram determinant)
        let oracle: f64 = (0..set.cells().len())
            .filter(|&c| set.cell_dim(c) == n)
            .map(|c| {
                let vs = set.cell_vertices(c);
                let edges: Vec<Vec<f64>> = vs[1..].iter().map(|v| v.iter().zip(&vs[0]).map(|(a, b)| a - b).collect()).collect();
                let det = determinant(edges);
                let fact: f64 = (1..=n).map(|x| x as f64).product();
                let vals = h.cell_values(c);
                det.abs() / fact * vals.iter().sum::<f64>() / vals.len() as f64
            })
            .sum();
        for bound in [Bound::Lower, Bound::Upper] {
            let v = hadwiger_pl(&h, n, bound, &mc).unwrap().value;
            ensure(close(v, oracle), || format!("PL fixture {i} (n = {n}): {v} vs Lebesgue {oracle}"))?;
        }
    }
    Ok("tent lower 1, upper −1; k = n matches Lebesgue on 50 grid and 10 PL functions".into())
}

fn determinant(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs())).unwrap();
        if m[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= m[c][c];
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            for j in c..n {
                m[r][j] -= f * m[c][j];
            }
        }
    }
    det
}

fn criterion_7() -> Outcome {
    let mut r = rng(7);
    let mut fixtures = vec![("tent".to_string(), tent())];
    for i in 0..10 {
        fixtures.push((format!("random {i}"), random_pl(&mut r, 1 + i % 2)));
    }
    let table = CroftonConstants::new();
    let mc = MonteCarlo { samples: 2, seed: 0, constants: &table };
    let mut failures = Vec::new();
    let mut worst_ratio = 0.0f64;
    for (name, h) in &fixtures {
        // largest |χ| of any excursion, scanning every constant stretch
        let cv = h.critical_values();
        let mut probes: Vec<f64> = cv.clone();
        probes.extend(cv.windows(2).map(|w| 0.5 * (w[0] + w[1])));
        let max_chi = probes
            .iter()
            .flat_map(|&s| [Cut::Geq, Cut::Gt, Cut::Lt, Cut::Leq].map(|c| h.excursion_chi(c, s).abs()))
            .max()
            .unwrap_or(0) as f64;
        let max_h = h.max_abs();
        for bound in [Bound::Lower, Bound::Upper] {
            let exact = hadwiger_pl_euler(h, bound).value;
            let errors: Vec<f64> = [10, 100, 1000]
                .iter()
                .map(|&m| (step_integral_pl(h, m, 0, bound, &mc).unwrap().value - exact).abs())
                .collect();
            let monotone = errors.windows(2).all(|w| w[1] <= w[0] + EXACT_TOL);
            let within = [10.0, 100.0, 1000.0]
                .iter()
                .zip(&errors)
                .all(|(m, e)| *e <= max_h / m * max_chi + EXACT_TOL);
            for (m, e) in [10.0, 100.0, 1000.0].iter().zip(&errors) {
                if max_h * max_chi > 0.0 {
                    worst_ratio = worst_ratio.max(e * m / (max_h * max_chi));
                }
            }
            if !(monotone && within) {
                failures.push(format!("{name} {bound:?}: errors {errors:?}, bound factor {:.3}", max_h * max_chi));
            }
        }
    }
    ensure(failures.is_empty(), || failures.join("; "))?;
    Ok(format!("11 fixtures × 2 bounds; worst error / bound = {worst_ratio:.3}"))
}

fn criterion_8() -> Outcome {
    let mut r = rng(8);
    for i in 0..100 {
        let h = random_grid_function(&mut r, 1 + i % 3);
        let d = verdier_dual(&h);
        ensure(verdier_dual(&d).values() == h.values(), || format!("D∘D ≠ id on function {i}"))?;
        let (a, b) = (
            hadwiger_constructible(&h, 0, Bound::Lower).unwrap().value,
            hadwiger_constructible(&d, 0, Bound::Lower).unwrap().value,
        );
        ensure(close(a, b), || format!("∫Dh dχ = {b} vs ∫h dχ = {a} on function {i}"))?;
    }
    // mixed dimensions: 1 on an open square, 2 on one of its edges, −1 on a vertex
    let c = GridComplex::new(vec![vec![0.0, 1.0, 2.0], vec![0.0, 1.5]]).unwrap();
    let mut values = vec![0.0; c.cell_count()];
    values[c.index(&CellId(vec![1, 1]))] = 1.0;
    values[c.index(&CellId(vec![2, 1]))] = 2.0;
    values[c.index(&CellId(vec![4, 0]))] = -1.0;
    let h = ConstructibleFunction::new(c, values).unwrap();
    let pairs: Vec<String> = (0..=2)
        .map(|k| {
            let (a, b) = prop31_residual(&h, k).unwrap();
            format!("k={k}: ({a}, {b})")
        })
        .collect();
    Ok(format!("D∘D = id and ∫Dh dχ = ∫h dχ on 100 functions; mixed-dimension pairs {}", pairs.join(", ")))
}

fn criterion_9() -> Outcome {
    let mut r = rng(9);
    for i in 0..100 {
        let n = 1 + i % 3;
        let h = random_grid_function(&mut r, n);
        let bound = if i % 2 == 0 { Bound::Lower } else { Bound::Upper };
        let v = HadwigerValuation::new((0..=n).map(|_| random_increasing(&mut r)).collect(), bound).unwrap();
        let a = v.evaluate_constructible(&h).unwrap().value;
        let b = excursion_difference_form(&v, &h).unwrap();
        // oracle: Σ_k Σ_cells c_k(h(σ)) μ_k(σ), μ_k of an open box from e_k
        let c = h.complex();
        let oracle: f64 = (0..=n)
            .map(|k| {
                c.cells()
                    .map(|cell| {
                        let lengths = c.edge_lengths(&cell);
                        let d = lengths.len();
                        if k > d {
                            return 0.0;
                        }
                        let sign = if (d - k) % 2 == 0 { 1.0 } else { -1.0 };
                        v.profiles[k].eval(h.value(&cell)) * sign * elementary_symmetric(&lengths, k)
                    })
                    .sum::<f64>()
            })
            .sum();
        ensure(close(a, b) && close(a, oracle), || format!("function {i}: evaluate {a}, difference form {b}, cellwise {oracle}"))?;
        let g = random_grid_function(&mut r, n);
        let res = additivity_residual(&v, &h, &g).unwrap();
        ensure(res < EXACT_TOL, || format!("pair {i}: additivity residual {res:e}"))?;
        let zero = ConstructibleFunction::zero(h.complex().clone());
        let z = v.evaluate_constructible(&zero).unwrap().value;
        ensure(z == 0.0, || format!("v(0) = {z}"))?;
    }
    Ok("100 functions: evaluate = difference form = cellwise oracle; 100 additive pairs; v(0) = 0".into())
}

fn criterion_10() -> Outcome {
    let table = CroftonConstants::new();
    let mc = MonteCarlo { samples: 2, seed: 0, constants: &table };
    let rows = decreasing_composition(&tent(), &CoefficientProfile::linear(-1.0), 0, &[10, 100, 1000], &mc)
        .map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for row in rows {
        let tol = 2.0 / row.m as f64;
        ensure(row.gap() <= tol && (row.lhs - 1.0).abs() <= tol && (row.rhs - 1.0).abs() <= tol, || {
            format!("m = {}: lhs {}, rhs {}", row.m, row.lhs, row.rhs)
        })?;
        parts.push(format!("m={}: ({}, {})", row.m, row.lhs, row.rhs));
    }
    Ok(parts.join(", "))
}

fn criterion_11() -> Outcome {
    let mut r = rng(11);
    let mut worst = 0.0f64;
    for i in 0..30 {
        let n = 1 + i % 3;
        let complex = GridComplex::new(random_axes(&mut r, n)).unwrap();
        let values = (0..complex.cell_count()).map(|_| r.random_range(-2.0..2.0)).collect();
        let h = ConstructibleFunction::new(complex, values).unwrap();
        let v = HadwigerValuation::new((0..=n).map(|_| random_increasing(&mut r)).collect(), Bound::Lower).unwrap();
        let shift: Vec<f64> = (0..n).map(|_| r.random_range(-3.0..3.0)).collect();
        let res = translation_residual(&v, &h, &shift).unwrap();
        worst = worst.max(res);
        ensure(res < EXACT_TOL, || format!("grid translation residual {res:e}"))?;
    }
    let table = default_constants(&[(2, 1)]);
    let mc = MonteCarlo { samples: 10_000, seed: 0, constants: &table };
    // exact k ∈ {0, n} terms under translation and rotation of a PL function
    let p = pyramid();
    let a = PI / 6.0;
    let rot = vec![vec![a.cos(), -a.sin()], vec![a.sin(), a.cos()]];
    let mut profiles = vec![random_increasing(&mut r), CoefficientProfile::zero(), random_increasing(&mut r)];
    let exact_v = HadwigerValuation::new(profiles.clone(), Bound::Upper).unwrap();
    let exact = invariance_residual(&exact_v, &p, &rot, &[0.5, -1.5], &mc).unwrap();
    ensure(exact.residual < EXACT_TOL, || format!("exact PL terms residual {:e}", exact.residual))?;
    profiles = vec![CoefficientProfile::zero(), CoefficientProfile::linear(1.0), CoefficientProfile::zero()];
    let v1 = HadwigerValuation::new(profiles, Bound::Lower).unwrap();
    let check = invariance_residual(&v1, &p, &rot, &[0.0, 0.0], &mc).unwrap();
    ensure(check.residual < SIGMAS * check.combined_stderr, || {
        format!("30° rotation, k = 1: residual {} vs combined stderr {}", check.residual, check.combined_stderr)
    })?;
    Ok(format!(
        "grid translations max residual {worst:.1e}; exact PL terms {:.1e}; 30° rotation k = 1: {:.4} < 3 × {:.4}",
        exact.residual, check.residual, check.combined_stderr
    ))
}

fn criterion_12() -> Outcome {
    let f = |name: &str| fixture(name).display().to_string();
    let commands: Vec<Vec<String>> = vec![
        vec!["mu-mc".into(), "--k".into(), "1".into(), "--input".into(), f("unit_square.json")],
        vec!["mu-mc".into(), "--method".into(), "slice".into(), "--k".into(), "1".into(), "--input".into(), f("unit_square.json")],
        vec!["hadwiger-int".into(), "--k".into(), "1".into(), "--input".into(), f("pyramid.json")],
        vec!["step-seq".into(), "--k".into(), "1".into(), "--m-list".into(), "5,20".into(), "--input".into(), f("pyramid.json")],
        vec!["valuation".into(), "--valuation".into(), f("perimeter.json"), "--input".into(), f("pyramid.json")],
        vec![
            "invariance-check".into(),
            "--valuation".into(),
            f("perimeter.json"),
            "--angle-deg".into(),
            "30".into(),
            "--input".into(),
            f("pyramid.json"),
        ],
        vec!["decreasing-exp".into(), "--k".into(), "1".into(), "--m-list".into(), "5".into(), "--input".into(), f("pyramid.json")],
        vec!["calibrate".into(), "--n".into(), "3".into()],
    ];
    let mut checked = 0;
    for cmd in &commands {
        let mut outputs = Vec::new();
        for threads in [None, Some(1), Some(2), Some(4), Some(1)] {
            let mut args = vec!["hadwiger".to_string()];
            args.extend(cmd.iter().cloned());
            args.extend(["--samples".into(), "2000".into(), "--seed".into(), "17".into()]);
            if let Some(t) = threads {
                args.extend(["--threads".into(), t.to_string()]);
            }
            let cli = Cli::try_parse_from(&args).map_err(|e| e.to_string())?;
            outputs.push(run_cli(&cli).map_err(|e| format!("{}: {e}", cmd[0]))?);
        }
        ensure(outputs.windows(2).all(|w| w[0] == w[1]), || format!("{} output depends on thread count", cmd[0]))?;
        checked += 1;
    }
    Ok(format!("{checked} Monte Carlo commands bit-identical across default/1/2/4 threads and reruns"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("χ normalization on open simplices", criterion_1),
        ("exact intrinsic volumes and homogeneity", criterion_2),
        ("Crofton consistency and calibration", criterion_3),
        ("open/closed set duality", criterion_4),
        ("lower/upper duality", criterion_5),
        ("lower ≠ upper; k = n collapse", criterion_6),
        ("step-function convergence", criterion_7),
        ("Verdier dual", criterion_8),
        ("valuation laws", criterion_9),
        ("decreasing-composition experiment", criterion_10),
        ("Euclidean invariance", criterion_11),
        ("reproducibility across thread counts", criterion_12),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS ({name}, {secs:.1} s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL ({name}, {secs:.1} s): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
