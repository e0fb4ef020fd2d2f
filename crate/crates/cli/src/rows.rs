//! Bench row specs: comma-separated `N:K:FAMILY:SEED` items, e.g.
//! `2-4:1-3:all:0,5:2:table:10-12`.

use std::ops::RangeInclusive;

use ksubmod::instances::Family;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BenchRow {
    pub n: usize,
    pub k: u32,
    pub family: Family,
    pub seed: u64,
}

fn range(field: &str, what: &str) -> Result<RangeInclusive<u64>, String> {
    let parse = |s: &str| {
        s.trim()
            .parse::<u64>()
            .map_err(|_| format!("bad {what} '{field}'"))
    };
    let (lo, hi) = match field.split_once('-') {
        Some((a, b)) => (parse(a)?, parse(b)?),
        None => {
            let v = parse(field)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(format!("empty {what} range '{field}'"));
    }
    Ok(lo..=hi)
}

pub fn parse_rows(spec: &str) -> Result<Vec<BenchRow>, String> {
    let mut rows = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let fields: Vec<&str> = item.split(':').collect();
        let [n, k, family, seed] = fields[..] else {
            return Err(format!("row '{item}' needs N:K:FAMILY:SEED"));
        };
        let ns = range(n, "n")?;
        let ks = range(k, "k")?;
        let seeds = range(seed, "seed")?;
        if *ns.start() == 0 || *ks.start() == 0 {
            return Err(format!("row '{item}': n and k must be positive"));
        }
        let families = match family.trim() {
            "all" => Family::ALL.to_vec(),
            name => vec![name.parse::<Family>().map_err(|e| e.to_string())?],
        };
        for n in ns.clone() {
            for k in ks.clone() {
                for &family in &families {
                    for seed in seeds.clone() {
                        rows.push(BenchRow {
                            n: n as usize,
                            k: k as u32,
                            family,
                            seed,
                        });
                    }
                }
            }
        }
    }
    if rows.is_empty() {
        return Err("no bench rows".into());
    }
    Ok(rows)
}
