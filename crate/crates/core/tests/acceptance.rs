//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::collections::{BTreeMap, HashSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use dpart::data::{BinEdges, Bounds, Column, ColumnBounds, ColumnType, DiscretizedColumn, Schema, Table};
use dpart::dependency::{
    discretize_table, infer_network, kahn_sort, mutual_information, HistogramCache, PredictionMatrix,
};
use dpart::eval::adult::{adult_bounds, adult_reconstruction, ADULT_ROWS, TARGET};
use dpart::eval::{run_sweep, train_test_split, MetricReport, Sweep, DEFAULT_EPSILONS};
use dpart::mechanisms::{exponential_select_index, Laplace};
use dpart::methods::MethodKind;
use dpart::{fit, InstanceKind, ModelSpec};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF, StudentsT};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const DATA_SEED: u64 = 0;
const MASTER_SEEDS: [u64; 5] = [1, 2, 3, 4, 5];

fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

// 1 -----------------------------------------------------------------------------------

fn mechanisms() -> Outcome {
    let start = Instant::now();
    let draws = 1_000_000;
    let mut notes = Vec::new();
    for (i, (sens, eps)) in [(1.0, 1.0), (1.0, 0.1), (2.0, 0.5)].into_iter().enumerate() {
        let lap = Laplace::new(sens, eps).map_err(|e| e.to_string())?;
        let mut r = rng(100 + i as u64);
        let xs: Vec<f64> = (0..draws).map(|_| lap.sample(&mut r)).collect();
        let mean = xs.iter().sum::<f64>() / draws as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
        let expected = 2.0 * (sens / eps) * (sens / eps);
        let rel = (var / expected - 1.0).abs();
        check(rel < 0.05, || {
            format!("laplace ({sens},{eps}): variance {var} vs {expected}")
        })?;
        notes.push(format!("{rel:.4}"));
    }
    let mut r = rng(7);
    let hits = (0..draws)
        .filter(|_| exponential_select_index(&[0.0, 1.0], 1.0, Some(2.0), &mut r).unwrap() == 1)
        .count();
    let p = hits as f64 / draws as f64;
    let closed = std::f64::consts::E / (1.0 + std::f64::consts::E);
    check((p / closed - 1.0).abs() < 0.01, || {
        format!("exponential: {p} vs {closed}")
    })?;
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "laplace relative variance errors [{}], P(high) {p:.4} vs {closed:.4}, {elapsed:.2?}",
        notes.join(", ")
    ))
}

// 2 -----------------------------------------------------------------------------------

fn oracle_mi(target: &[u32], parents: &[&[u32]]) -> f64 {
    let n = target.len() as f64;
    let mut joint: BTreeMap<(Vec<u32>, u32), f64> = BTreeMap::new();
    let mut pa: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
    let mut ta: BTreeMap<u32, f64> = BTreeMap::new();
    for r in 0..target.len() {
        let key: Vec<u32> = parents.iter().map(|p| p[r]).collect();
        *joint.entry((key.clone(), target[r])).or_default() += 1.0;
        *pa.entry(key).or_default() += 1.0;
        *ta.entry(target[r]).or_default() += 1.0;
    }
    joint
        .iter()
        .map(|((k, t), c)| {
            let pxy = c / n;
            pxy * (pxy / ((pa[k] / n) * (ta[t] / n))).log2()
        })
        .sum()
}

fn categorical_column(bins: Vec<u32>, n_bins: usize) -> DiscretizedColumn {
    DiscretizedColumn {
        bins,
        edges: BinEdges::Categorical((0..n_bins).map(|b| format!("v{b}")).collect()),
    }
}

fn mi_oracle_check() -> Result<f64, String> {
    let mut r = rng(21);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let k = r.random_range(2..=5);
        let n = r.random_range(1..=200);
        let cols: Vec<DiscretizedColumn> = (0..k)
            .map(|_| {
                let nb = r.random_range(1..=4);
                categorical_column((0..n).map(|_| r.random_range(0..nb as u32)).collect(), nb)
            })
            .collect();
        let cache = HistogramCache::new(&cols);
        let t = r.random_range(0..k);
        let mut others: Vec<usize> = (0..k).filter(|c| *c != t).collect();
        others.retain(|_| r.random::<bool>());
        if others.is_empty() {
            others.push((t + 1) % k);
        }
        let parents: Vec<&DiscretizedColumn> = others.iter().map(|i| &cols[*i]).collect();
        let bins: Vec<&[u32]> = parents.iter().map(|c| c.bins.as_slice()).collect();
        let expected = oracle_mi(&cols[t].bins, &bins);
        for got in [
            mutual_information(&cols[t], &parents),
            cache.mutual_information(t, &others),
        ] {
            worst = worst.max((got - expected).abs());
        }
    }
    check(worst <= 1e-12, || format!("max |MI − oracle| = {worst:e}"))?;
    Ok(worst)
}

fn conditional_chi_square() -> Result<f64, String> {
    let mut r = rng(22);
    let rows = 500;
    let tl = ["a", "b", "c"];
    let pl = ["x", "y"];
    let parent: Vec<String> = (0..rows)
        .map(|_| pl[usize::from(r.random::<f64>() < 0.35)].to_string())
        .collect();
    let target: Vec<String> = parent
        .iter()
        .map(|p| {
            let u: f64 = r.random();
            let i = if p == "x" {
                (u * u * 3.0) as usize
            } else {
                (u.sqrt() * 3.0) as usize
            };
            tl[i.min(2)].to_string()
        })
        .collect();
    let schema = Schema::from_pairs([("p", ColumnType::Category), ("t", ColumnType::Category)]).unwrap();
    let table = Table::new(
        schema,
        vec![Column::Categorical(parent.clone()), Column::Categorical(target.clone())],
    )
    .unwrap();
    let mut matrix = PredictionMatrix::new();
    matrix.insert("t".into(), vec!["p".into()]);
    matrix.insert("p".into(), vec![]);
    let mut spec = ModelSpec {
        prediction_matrix: Some(matrix),
        ..Default::default()
    };
    spec.methods.insert("t".into(), MethodKind::ConditionalDistribution);
    spec.methods.insert("p".into(), MethodKind::ConditionalDistribution);
    let model = fit(&table, &spec, &mut r).map_err(|e| e.to_string())?.model;
    let synth = model.generate(200_000, &mut r).map_err(|e| e.to_string())?;
    let sp = synth.column("p").unwrap().as_categorical().unwrap();
    let st = synth.column("t").unwrap().as_categorical().unwrap();

    let mut min_p = 1.0f64;
    for given in pl {
        let count = |ps: &[String], ts: &[String]| {
            let mut c = [0.0f64; 3];
            for (p, t) in ps.iter().zip(ts) {
                if p == given {
                    c[tl.iter().position(|l| l == t).unwrap()] += 1.0;
                }
            }
            c
        };
        let empirical = count(&parent, &target);
        let observed = count(sp, st);
        let (ne, no) = (empirical.iter().sum::<f64>(), observed.iter().sum::<f64>());
        let (mut stat, mut cells) = (0.0, 0.0);
        for k in 0..3 {
            let e = empirical[k] / ne * no;
            if e > 0.0 {
                stat += (observed[k] - e).powi(2) / e;
                cells += 1.0;
            } else {
                check(observed[k] == 0.0, || {
                    format!("parent {given}: unseen label {} sampled", tl[k])
                })?;
            }
        }
        if cells > 1.0 {
            let p = 1.0 - ChiSquared::new(cells - 1.0).unwrap().cdf(stat);
            check(p > 0.001, || format!("parent {given}: chi2 {stat:.3}, p {p:e}"))?;
            min_p = min_p.min(p);
        }
    }
    Ok(min_p)
}

fn oracles() -> Outcome {
    let worst = mi_oracle_check()?;
    let p = conditional_chi_square()?;
    Ok(format!(
        "max MI deviation {worst:.1e} over 100 tables, chi-square min p {p:.3}"
    ))
}

// 3 -----------------------------------------------------------------------------------

fn random_table(types: &[u8], n: usize, seed: u64) -> (Table, Bounds) {
    let mut r = rng(seed);
    let mut defs = Vec::new();
    let mut cols = Vec::new();
    let mut bounds = Bounds::new();
    for (i, t) in types.iter().enumerate() {
        let name = format!("c{i}");
        match t % 3 {
            0 => {
                defs.push((name.clone(), ColumnType::Float));
                cols.push(Column::Numeric((0..n).map(|_| r.random_range(0.0..10.0)).collect()));
                bounds.insert(&name, ColumnBounds::numeric(&name, 0.0, 10.0).unwrap());
            }
            1 => {
                defs.push((name.clone(), ColumnType::Integer));
                cols.push(Column::Numeric((0..n).map(|_| r.random_range(0..=20) as f64).collect()));
                bounds.insert(&name, ColumnBounds::numeric(&name, 0.0, 20.0).unwrap());
            }
            _ => {
                let labels = ["p", "q", "r"];
                defs.push((name.clone(), ColumnType::Category));
                cols.push(Column::Categorical(
                    (0..n).map(|_| labels[r.random_range(0..3)].to_string()).collect(),
                ));
                bounds.insert(
                    &name,
                    ColumnBounds::categorical(&name, labels.map(String::from).to_vec()).unwrap(),
                );
            }
        }
    }
    (Table::new(Schema::from_pairs(defs).unwrap(), cols).unwrap(), bounds)
}

fn budget_accounting() -> Outcome {
    let fits = std::cell::Cell::new(0usize);
    let strategy = (prop::collection::vec(0u8..3, 1..=8), any::<u64>());
    runner(16)
        .run(&strategy, |(types, seed)| {
            let (table, bounds) = random_table(&types, 40, seed);
            for kind in InstanceKind::ALL {
                for eps in [0.01, 1.0, 1000.0] {
                    let out = fit(&table, &kind.spec(Some(eps), Some(bounds.clone())), &mut rng(seed))
                        .map_err(|e| TestCaseError::fail(format!("{kind} {eps}: {e}")))?;
                    let ledger = out.model.ledger();
                    prop_assert!(ledger.is_complete(), "{} {}: shares do not sum to one", kind, eps);
                    prop_assert_eq!(ledger.spent(), eps);
                    let summed: f64 = ledger.entries().iter().map(|e| e.epsilon).sum();
                    prop_assert!(
                        (summed - eps).abs() <= 1e-12 * eps,
                        "{} {}: f64 sum {}",
                        kind,
                        eps,
                        summed
                    );
                    fits.set(fits.get() + 1);
                }
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(format!(
        "{} fits over random schemas of 1-8 columns, every ledger exact",
        fits.get()
    ))
}

// 4 -----------------------------------------------------------------------------------

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|c| (0..n).filter(move |p| *p != c).map(move |p| (c, p)))
        .collect()
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

/// Bitmask over `pairs(n)` of the edges an order allows (parent strictly before child).
fn allowed(order: &[usize], edges: &[(usize, usize)]) -> u32 {
    let mut pos = vec![0; order.len()];
    for (i, c) in order.iter().enumerate() {
        pos[*c] = i;
    }
    edges
        .iter()
        .enumerate()
        .filter(|(_, (c, p))| pos[*p] < pos[*c])
        .fold(0, |m, (i, _)| m | (1 << i))
}

fn kahn_exhaustive() -> Result<(usize, usize), String> {
    let (mut dags, mut cyclic) = (0, 0);
    for n in 1..=5 {
        let names: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
        let schema = Schema::from_pairs(names.iter().map(|s| (s.as_str(), ColumnType::Category))).unwrap();
        let edges = pairs(n);
        let masks: Vec<u32> = permutations(n).iter().map(|o| allowed(o, &edges)).collect();
        for g in 0u32..(1 << edges.len()) {
            let acyclic = masks.iter().any(|m| g & !m == 0);
            let mut matrix = PredictionMatrix::new();
            for c in 0..n {
                let ps = edges
                    .iter()
                    .enumerate()
                    .filter(|(i, (cc, _))| *cc == c && g & (1 << i) != 0)
                    .map(|(_, (_, p))| names[*p].clone())
                    .collect();
                matrix.insert(names[c].clone(), ps);
            }
            match (kahn_sort(&matrix, &schema), acyclic) {
                (Ok(order), true) => {
                    let idx: Vec<usize> = order.columns().iter().map(|c| schema.index_of(c).unwrap()).collect();
                    let mut sorted = idx.clone();
                    sorted.sort_unstable();
                    check(sorted == (0..n).collect::<Vec<_>>(), || {
                        format!("graph {g:b}: not a permutation")
                    })?;
                    check(g & !allowed(&idx, &edges) == 0, || {
                        format!("graph {g:b}: order {idx:?} breaks an edge")
                    })?;
                    dags += 1;
                }
                (Err(_), false) => cyclic += 1,
                (Ok(_), false) => return Err(format!("n={n} graph {g:b}: cycle accepted")),
                (Err(e), true) => return Err(format!("n={n} graph {g:b}: DAG rejected: {e}")),
            }
        }
    }
    Ok((dags, cyclic))
}

fn network_structure() -> Result<usize, String> {
    let count = std::cell::Cell::new(0usize);
    let strategy = (2usize..=7, any::<u64>(), 0usize..3);
    runner(48)
        .run(&strategy, |(k, seed, e)| {
            let mut r = rng(seed);
            let names: Vec<String> = (0..k).map(|i| format!("c{i}")).collect();
            let schema = Schema::from_pairs(names.iter().map(|s| (s.as_str(), ColumnType::Category))).unwrap();
            let mut cols: Vec<Vec<u32>> = Vec::new();
            for _ in 0..k {
                let col: Vec<u32> = (0..200)
                    .map(|row| match cols.last() {
                        Some(prev) if r.random::<f64>() < 0.6 => prev[row],
                        _ => r.random_range(0..3),
                    })
                    .collect();
                cols.push(col);
            }
            let labels = ["a", "b", "c"];
            let table = Table::new(
                schema,
                cols.iter()
                    .map(|c| Column::Categorical(c.iter().map(|v| labels[*v as usize].to_string()).collect()))
                    .collect(),
            )
            .unwrap();
            let mut bounds = Bounds::new();
            for n in &names {
                bounds.insert(
                    n,
                    ColumnBounds::categorical(n, labels.map(String::from).to_vec()).unwrap(),
                );
            }
            let eps = [None, Some(0.1), Some(10.0)][e];
            let dep = infer_network(&table, &bounds, eps, 2, &mut r)
                .map_err(|e| TestCaseError::fail(e.to_string()))?
                .dependency;
            let order = dep.visit_order().columns();
            let mut seen: HashSet<&str> = HashSet::new();
            for c in order {
                let ps = dep.parents_of(c);
                prop_assert!(ps.len() <= 2, "{} has {} parents", c, ps.len());
                for p in ps {
                    prop_assert!(seen.contains(p.as_str()), "{} visited before its parent {}", c, p);
                }
                seen.insert(c);
            }
            prop_assert_eq!(seen.len(), k);
            count.set(count.get() + 1);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(count.get())
}

fn structure() -> Outcome {
    let (dags, cyclic) = kahn_exhaustive()?;
    let nets = network_structure()?;
    Ok(format!(
        "kahn_sort agrees with brute force on all {} graphs up to 5 nodes ({dags} DAGs), {nets} inferred networks valid",
        dags + cyclic
    ))
}

// 5 -----------------------------------------------------------------------------------

struct Pooled {
    engine: &'static str,
    similarity: Vec<f64>,
    accuracy: Vec<f64>,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn cell_mean(report: &MetricReport, engine: &str, eps: f64, f: impl Fn(&dpart::eval::MetricRow) -> f64) -> f64 {
    let v: Vec<f64> = report.cell(engine, eps).map(f).collect();
    mean(&v)
}

/// OLS slope of `y` on `x` and its two-sided 95% confidence interval.
fn slope_ci(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let (mx, my) = (mean(x), mean(y));
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let sse: f64 = x.iter().zip(y).map(|(xi, yi)| (yi - a - b * xi).powi(2)).sum();
    let se = (sse / (n - 2.0) / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, n - 2.0).unwrap().inverse_cdf(0.975);
    (b, b - t * se, b + t * se)
}

fn trends() -> Outcome {
    let start = Instant::now();
    let data = adult_reconstruction(ADULT_ROWS, DATA_SEED);
    let bounds = adult_bounds();
    let grid = DEFAULT_EPSILONS;
    let mut reports = Vec::new();
    for seed in MASTER_SEEDS {
        reports.push(run_sweep(&data, &bounds, &Sweep::new(TARGET, seed)).map_err(|e| e.to_string())?);
    }
    let elapsed = start.elapsed();

    let pooled: Vec<Pooled> = InstanceKind::ALL
        .iter()
        .map(|k| Pooled {
            engine: k.name(),
            similarity: grid
                .iter()
                .map(|e| {
                    mean(
                        &reports
                            .iter()
                            .map(|r| cell_mean(r, k.name(), *e, |m| m.similarity))
                            .collect::<Vec<_>>(),
                    )
                })
                .collect(),
            accuracy: grid
                .iter()
                .map(|e| {
                    mean(
                        &reports
                            .iter()
                            .map(|r| cell_mean(r, k.name(), *e, |m| m.accuracy))
                            .collect::<Vec<_>>(),
                    )
                })
                .collect(),
        })
        .collect();
    let baseline = mean(
        &reports
            .iter()
            .map(|r| r.baseline().unwrap().accuracy)
            .collect::<Vec<_>>(),
    );
    for p in &pooled {
        let sims: Vec<String> = p.similarity.iter().map(|s| format!("{s:.3}")).collect();
        let accs: Vec<String> = p.accuracy.iter().map(|s| format!("{s:.3}")).collect();
        println!(
            "    {:12} similarity [{}] accuracy [{}]",
            p.engine,
            sims.join(" "),
            accs.join(" ")
        );
    }
    println!("    real baseline accuracy {baseline:.3}, sweep time {elapsed:.1?}");

    let mut failures = Vec::new();

    // (a)
    for p in &pooled {
        let drops = p.similarity.windows(2).filter(|w| w[1] < w[0]).count();
        if drops > 1 {
            failures.push(format!("(a) {} similarity decreases {drops} times", p.engine));
        }
    }

    // (b)
    let small: Vec<usize> = (0..grid.len()).filter(|i| grid[*i] <= 1.0).collect();
    let wins = reports
        .iter()
        .filter(|r| {
            small.iter().all(|&i| {
                let ind = cell_mean(r, "independent", grid[i], |m| m.similarity);
                ["privbayes", "dp-synthpop"]
                    .iter()
                    .all(|o| ind >= cell_mean(r, o, grid[i], |m| m.similarity))
            })
        })
        .count();
    if wins * 2 <= reports.len() {
        failures.push(format!(
            "(b) independent leads at epsilon <= 1 for only {wins}/{} seeds",
            reports.len()
        ));
    }

    // (c)
    let pb = pooled.iter().find(|p| p.engine == "privbayes").unwrap();
    for (i, e) in grid.iter().enumerate().filter(|(_, e)| **e >= 10.0) {
        let gap = (pb.accuracy[i] - baseline).abs();
        if gap > 0.05 {
            failures.push(format!(
                "(c) privbayes accuracy at epsilon {e} is {gap:.3} from the baseline"
            ));
        }
    }

    // (d) one point per fit (generation mean); fits are the independent units.
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for r in &reports {
        for e in grid {
            let rows: Vec<_> = r.cell("independent", e).collect();
            let mut fits: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
            for m in rows {
                fits.entry(m.fit.unwrap()).or_default().push(m.accuracy);
            }
            for v in fits.values() {
                xs.push(e.log10());
                ys.push(mean(v));
            }
        }
    }
    let (slope, lo, hi) = slope_ci(&xs, &ys);
    if !(lo <= 0.0 && 0.0 <= hi) {
        failures.push(format!(
            "(d) independent accuracy slope {slope:.2e} per decade, CI [{lo:.2e}, {hi:.2e}]"
        ));
    }
    if elapsed > Duration::from_secs(30 * 60) {
        failures.push(format!("sweep took {elapsed:?}"));
    }

    if failures.is_empty() {
        Ok(format!(
            "{} master seeds, (b) {wins}/{} seeds, (d) slope CI [{lo:.1e}, {hi:.1e}], {elapsed:.0?}",
            reports.len(),
            reports.len()
        ))
    } else {
        Err(failures.join("; "))
    }
}

// 6 -----------------------------------------------------------------------------------

fn performance() -> Outcome {
    let data = adult_reconstruction(ADULT_ROWS, DATA_SEED);
    let (train, _) = train_test_split(&data, MASTER_SEEDS[0]).map_err(|e| e.to_string())?;
    let bounds = adult_bounds();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| e.to_string())?;
    let start = Instant::now();
    let inference = pool
        .install(|| infer_network(&train, &bounds, Some(0.5), 2, &mut rng(3)))
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let stats = inference.stats.cache;
    check(elapsed < Duration::from_secs(5), || {
        format!("inference took {elapsed:?}")
    })?;
    check(stats.hits > 0, || format!("no cache hits ({stats:?})"))?;

    let cols = discretize_table(&train, &bounds, 20).map_err(|e| e.to_string())?;
    let cache = HistogramCache::new(&cols);
    cache.mutual_information(1, &[0, 2]);
    let before = cache.stats();
    cache.entropy(&[0, 2]);
    cache.mutual_information(1, &[0, 2]);
    let after = cache.stats();
    check(after.misses == before.misses && after.hits > before.hits, || {
        format!("repeated subsets recomputed: {before:?} -> {after:?}")
    })?;
    Ok(format!(
        "{} rows, {} columns in {elapsed:.2?} on one thread, cache {} hits / {} misses",
        train.n_rows(),
        train.schema().len(),
        stats.hits,
        stats.misses
    ))
}

// 7 -----------------------------------------------------------------------------------

fn determinism() -> Outcome {
    let data = adult_reconstruction(4000, DATA_SEED);
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut artifacts: Vec<Vec<Vec<u8>>> = vec![Vec::new(), Vec::new()];
    for (run, out) in artifacts.iter_mut().enumerate() {
        for kind in InstanceKind::ALL {
            let mut r = rng(11);
            let model = fit(&data, &kind.spec(Some(1.0), Some(adult_bounds())), &mut r)
                .map_err(|e| e.to_string())?
                .model;
            let path = dir.path().join(format!("{kind}-{run}.dpart.json"));
            model.save(&path).map_err(|e| e.to_string())?;
            out.push(std::fs::read(&path).map_err(|e| e.to_string())?);
            let synth = model.generate(2000, &mut r).map_err(|e| e.to_string())?;
            out.push(synth.to_csv_string().map_err(|e| e.to_string())?.into_bytes());
        }
        let sweep = Sweep {
            fits: 2,
            generations: 2,
            ..Sweep::new(TARGET, 17)
        };
        let report = run_sweep(&data, &adult_bounds(), &sweep).map_err(|e| e.to_string())?;
        out.push(report.to_csv_string().map_err(|e| e.to_string())?.into_bytes());
        out.push(report.summary_json().map_err(|e| e.to_string())?.into_bytes());
    }
    let same = artifacts[0].iter().zip(&artifacts[1]).filter(|(a, b)| a == b).count();
    check(same == artifacts[0].len(), || {
        format!("{same}/{} artifacts identical", artifacts[0].len())
    })?;
    Ok(format!(
        "{same} artifacts (models, synthetic CSVs, report, summary) byte-identical across runs"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("mechanism correctness", mechanisms),
        ("oracle equivalence", oracles),
        ("budget accounting", budget_accounting),
        ("structure", structure),
        ("trend reproduction", trends),
        ("performance", performance),
        ("end-to-end determinism", determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        match run() {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
