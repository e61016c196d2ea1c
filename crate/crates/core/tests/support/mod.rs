//! Fuzz builders and brute-force oracles shared by the integration tests
//! and the acceptance runner. Nothing here calls the code it checks.
#![allow(dead_code)]

use catfid_core::agent::FiniteEnv;
use catfid_core::distinguishers::{
    make_compression_distinguisher, make_threshold_family, ThresholdFamilySpec, Thresholds,
};
use catfid_core::{
    Distinguisher, DistinguisherFamily, FeatureExtractor, FeatureSource, Normalizer, Params, Polarity,
    Role, Sample, SampleSet, ScoringFunction,
};
use num_rational::Ratio;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const ALPHABET: u32 = 26;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Values on a coarse grid so ties between and within sets are common.
pub fn grid_values(rng: &mut ChaCha8Rng, n: usize, steps: u32) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0..=steps) as f64 / steps as f64).collect()
}

/// Symbol-sequence samples that also carry a named feature `v`.
pub fn symbol_set(rng: &mut ChaCha8Rng, n: usize, role: Role, tag: &str) -> SampleSet {
    let items = (0..n)
        .map(|i| {
            let len = rng.random_range(0..12);
            let symbols = (0..len).map(|_| rng.random_range(0..ALPHABET)).collect();
            let v = rng.random_range(0..=10) as f64 / 10.0;
            Sample::symbols(format!("{tag}{i}"), symbols).with_feature("v", v).unwrap()
        })
        .collect();
    SampleSet::new(items, role).unwrap()
}

pub fn scalar_set(rng: &mut ChaCha8Rng, n: usize, role: Role, tag: &str) -> SampleSet {
    let items = (0..n)
        .map(|i| {
            let x = rng.random_range(-20..=20) as f64 / 20.0;
            Sample::scalar(format!("{tag}{i}"), x).unwrap()
        })
        .collect();
    SampleSet::new(items, role).unwrap()
}

pub fn random_sigma(rng: &mut ChaCha8Rng) -> ScoringFunction {
    match rng.random_range(0..3) {
        0 => ScoringFunction::Mean,
        1 => ScoringFunction::Max,
        _ => ScoringFunction::quantile(rng.random_range(1..=20) as f64 / 20.0).unwrap(),
    }
}

fn polarity(rng: &mut ChaCha8Rng) -> Polarity {
    if rng.random::<bool>() {
        Polarity::Geq
    } else {
        Polarity::Leq
    }
}

fn symbol_features(rng: &mut ChaCha8Rng) -> FeatureExtractor {
    match rng.random_range(0..4) {
        0 => FeatureExtractor::named("v"),
        1 => FeatureExtractor::new(
            "mean",
            FeatureSource::MeanSymbolValue,
            Normalizer::new(0.0, (ALPHABET - 1) as f64).unwrap(),
        ),
        2 => FeatureExtractor::new("len", FeatureSource::PayloadLength, Normalizer::new(0.0, 12.0).unwrap()),
        _ => {
            let gram = vec![rng.random_range(0..ALPHABET)];
            FeatureExtractor::new("gram", FeatureSource::NgramFrequency { n: 1, gram }, Normalizer::UNIT)
        }
    }
}

fn threshold_family(
    rng: &mut ChaCha8Rng,
    feature: FeatureExtractor,
    s: &SampleSet,
    g: &SampleSet,
) -> DistinguisherFamily {
    let thresholds = match rng.random_range(0..3) {
        0 => Thresholds::Midpoints,
        1 => Thresholds::Grid {
            lo: 0.0,
            hi: 1.0,
            count: rng.random_range(1..15),
        },
        _ => {
            let mut ts: Vec<f64> = (0..rng.random_range(1..6)).map(|_| rng.random_range(0..=40) as f64 / 40.0).collect();
            ts.sort_by(f64::total_cmp);
            ts.dedup();
            Thresholds::Explicit(ts)
        }
    };
    let spec = ThresholdFamilySpec {
        feature,
        thresholds,
        polarity: polarity(rng),
    };
    make_threshold_family(&spec, s, g).unwrap()
}

/// A random family over symbol-sequence samples: thresholds on several
/// features, compression, exact matches, and unions of those.
pub fn symbol_family(rng: &mut ChaCha8Rng, s: &SampleSet, g: &SampleSet) -> DistinguisherFamily {
    let parts = rng.random_range(1..4);
    let families = (0..parts)
        .map(|p| match rng.random_range(0..4) {
            0 | 1 => {
                let f = symbol_features(rng);
                threshold_family(rng, f, s, g)
            }
            2 => DistinguisherFamily::explicit("compression", vec![make_compression_distinguisher()]).unwrap(),
            _ => {
                let pool: Vec<&Sample> = s.items().iter().chain(g.items()).collect();
                let target = pool.choose(rng).unwrap().payload().clone();
                DistinguisherFamily::explicit(
                    format!("exact{p}"),
                    vec![Distinguisher::new(format!("exact{p}"), Params::ExactMatch { target })],
                )
                .unwrap()
            }
        })
        .collect();
    DistinguisherFamily::union(families).unwrap()
}

pub fn scalar_family(rng: &mut ChaCha8Rng, s: &SampleSet, g: &SampleSet) -> DistinguisherFamily {
    let feature = FeatureExtractor::new("x", FeatureSource::ScalarIdentity, Normalizer::new(-10.0, 10.0).unwrap());
    let mut parts = vec![threshold_family(rng, feature, s, g)];
    if rng.random::<bool>() {
        parts.push(DistinguisherFamily::explicit("compression", vec![make_compression_distinguisher()]).unwrap());
    }
    DistinguisherFamily::union(parts).unwrap()
}

/// Two-sample KS statistic by trying every threshold `t` in the data plus
/// one below it: `max |#{a ≥ t}/n − #{b ≥ t}/m|` as an exact fraction.
pub fn brute_ks(a: &[f64], b: &[f64]) -> Ratio<u64> {
    let (n, m) = (a.len() as u64, b.len() as u64);
    let mut cuts: Vec<f64> = a.iter().chain(b).copied().collect();
    cuts.push(f64::NEG_INFINITY);
    let mut best = Ratio::new(0, 1);
    for t in cuts {
        let ca = a.iter().filter(|&&x| x >= t).count() as u64;
        let cb = b.iter().filter(|&&x| x >= t).count() as u64;
        let gap = Ratio::new((ca * m).abs_diff(cb * n), n * m);
        if gap > best {
            best = gap;
        }
    }
    best
}

/// `⌈log₂ x⌉` for x ≥ 1 by doubling.
fn ceil_log2(x: usize) -> u32 {
    let (mut p, mut k) = (1usize, 0);
    while p < x {
        p *= 2;
        k += 1;
    }
    k
}

#[derive(Debug, Clone, PartialEq)]
pub struct Found {
    pub text: String,
    pub continuation: u32,
    pub level: u32,
}

/// Every program of the sequence language with at most `max_ops` ops that
/// reproduces `prefix`, found by running all of them. Written from the
/// language description alone: start symbol, then A/D/M with constant 1..=4
/// applied cyclically mod the alphabet, one step per op application.
/// Every program up to `max_level` that reproduces `prefix`. Only starts equal
/// to `prefix[0]` are tried since a program's first output is its start.
pub fn brute_explanations(prefix: &[u32], alphabet: u32, max_level: u32) -> Vec<Found> {
    let steps = prefix.len() - 1;
    let mut found = Vec::new();
    let ops: Vec<(char, u64)> = ['A', 'D', 'M'].iter().flat_map(|&c| (1..=4).map(move |k| (c, k))).collect();
    for d in 1.. {
        if (1 + d) as u32 + ceil_log2(steps) > max_level {
            break;
        }
        let total = ops.len().pow(d as u32);
        for code in 0..total {
            let mut c = code;
            let prog: Vec<(char, u64)> = (0..d)
                .map(|_| {
                    let op = ops[c % ops.len()];
                    c /= ops.len();
                    op
                })
                .collect();
            for start in prefix[0]..prefix[0] + 1 {
                let a = alphabet as u64;
                let mut reg = start as u64;
                let mut out = vec![reg];
                for i in 0..prefix.len() {
                    let (kind, k) = prog[i % d];
                    reg = match kind {
                        'A' => (reg + k) % a,
                        'D' => (reg + a * 4 - k) % a,
                        _ => (reg * k) % a,
                    };
                    out.push(reg);
                }
                if out[..prefix.len()].iter().zip(prefix).all(|(x, &y)| *x == y as u64) {
                    let mut text = format!("S{start}");
                    for (kind, k) in &prog {
                        text.push_str(&format!(";{kind}{k}"));
                    }
                    found.push(Found {
                        text,
                        continuation: out[prefix.len()] as u32,
                        level: (1 + d) as u32 + ceil_log2(steps),
                    });
                }
            }
        }
    }
    found
}

/// Optimal expected undiscounted return by full expectimax over the tree of
/// (state, time) with no memoization. Rewards per transition.
pub fn brute_optimum(env: &FiniteEnv) -> f64 {
    fn go(env: &FiniteEnv, s: usize, t: usize) -> f64 {
        if t == env.horizon() {
            return 0.0;
        }
        (0..env.actions().len())
            .map(|a| {
                env.transition(s, a)
                    .iter()
                    .enumerate()
                    .filter(|(_, &p)| p > 0.0)
                    .map(|(n, &p)| p * (env.reward(s, a, n) + go(env, n, t + 1)))
                    .sum::<f64>()
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
    go(env, env.initial_state(), 0)
}

/// Best return over every open-loop action sequence of a deterministic env.
pub fn brute_paths(env: &FiniteEnv) -> f64 {
    let na = env.actions().len();
    let h = env.horizon();
    let mut best = f64::NEG_INFINITY;
    for code in 0..na.pow(h as u32) {
        let (mut c, mut s, mut total) = (code, env.initial_state(), 0.0);
        for _ in 0..h {
            let a = c % na;
            c /= na;
            let next = env.transition(s, a).iter().position(|&p| p == 1.0).expect("deterministic");
            total += env.reward(s, a, next);
            s = next;
        }
        best = best.max(total);
    }
    best
}

/// Random env with `ns` states and `na` actions; deterministic when asked.
pub fn random_env(rng: &mut ChaCha8Rng, ns: usize, na: usize, horizon: usize, deterministic: bool) -> FiniteEnv {
    let mut transition = vec![vec![vec![0.0; ns]; na]; ns];
    let mut reward = vec![vec![vec![0.0; ns]; na]; ns];
    for s in 0..ns {
        for a in 0..na {
            if deterministic {
                transition[s][a][rng.random_range(0..ns)] = 1.0;
            } else {
                let w: Vec<f64> = (0..ns).map(|_| rng.random_range(0..4) as f64).collect();
                let total: f64 = w.iter().sum();
                if total == 0.0 {
                    transition[s][a][0] = 1.0;
                } else {
                    for n in 0..ns {
                        transition[s][a][n] = w[n] / total;
                    }
                }
            }
            for n in 0..ns {
                reward[s][a][n] = rng.random_range(0..=10) as f64 / 10.0;
            }
        }
    }
    FiniteEnv::new(
        "random",
        (0..ns).map(|s| format!("s{s}")).collect(),
        (0..na).map(|a| format!("a{a}")).collect(),
        transition,
        reward,
        horizon,
        0,
    )
    .unwrap()
}

