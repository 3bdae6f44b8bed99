//! Synthetic connection records in NSL-KDD file format.
//!
//! The generator reproduces the attack-name mix of `KDDTrain+` (125,973 rows:
//! 67,343 normal, 45,927 DoS, 11,656 Probe, 995 R2L, 52 U2R) and draws each
//! record from a hand-written profile of its attack family, so categorical
//! columns, byte counts, error rates and host statistics behave roughly like
//! the real traffic. A small share of attack rows copies the normal profile,
//! which keeps the classes from being trivially separable.
//!
//! It exists so the full pipeline can be exercised without the dataset file;
//! it is not a substitute for measurements on the real data.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::RawRecord;
use crate::seed::rng_from;
use crate::NUM_FEATURES;

/// Attack names and their row counts in `KDDTrain+`.
pub const TRAIN_LABEL_COUNTS: [(&str, usize); 23] = [
    ("normal", 67_343),
    ("neptune", 41_214),
    ("smurf", 2_646),
    ("back", 956),
    ("teardrop", 892),
    ("pod", 201),
    ("land", 18),
    ("satan", 3_633),
    ("ipsweep", 3_599),
    ("portsweep", 2_931),
    ("nmap", 1_493),
    ("warezclient", 890),
    ("guess_passwd", 53),
    ("warezmaster", 20),
    ("imap", 11),
    ("ftp_write", 8),
    ("multihop", 7),
    ("phf", 4),
    ("spy", 2),
    ("buffer_overflow", 30),
    ("rootkit", 10),
    ("loadmodule", 9),
    ("perl", 3),
];

/// Share of attack rows drawn from the normal profile.
pub const STEALTH_SHARE: f64 = 0.03;

/// Generates `n` records with label proportions matching `KDDTrain+`.
pub fn generate(n: usize, seed: u64) -> Vec<RawRecord> {
    let mut rng = rng_from(seed);
    let total: usize = TRAIN_LABEL_COUNTS.iter().map(|(_, c)| c).sum();
    let mut alloc: Vec<usize> = TRAIN_LABEL_COUNTS
        .iter()
        .map(|(_, c)| c * n / total)
        .collect();
    let mut rem: Vec<(usize, usize)> = TRAIN_LABEL_COUNTS
        .iter()
        .enumerate()
        .map(|(i, (_, c))| ((c * n) % total, i))
        .collect();
    rem.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let short = n - alloc.iter().sum::<usize>();
    for &(_, i) in rem.iter().take(short) {
        alloc[i] += 1;
    }
    let mut labels: Vec<&str> = Vec::with_capacity(n);
    for ((name, _), k) in TRAIN_LABEL_COUNTS.iter().zip(alloc) {
        labels.extend(std::iter::repeat_n(*name, k));
    }
    labels.shuffle(&mut rng);
    labels
        .into_iter()
        .map(|label| record(label, &mut rng))
        .collect()
}

/// Renders records as NSL-KDD text, one line per record.
pub fn to_kdd_text(records: &[RawRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&r.to_line());
        out.push('\n');
    }
    out
}

struct Row {
    v: [f64; NUM_FEATURES],
    protocol: &'static str,
    service: &'static str,
    flag: &'static str,
}

fn pick<'a>(rng: &mut ChaCha8Rng, items: &[&'a str]) -> &'a str {
    items[rng.gen_range(0..items.len())]
}

fn weighted<'a>(rng: &mut ChaCha8Rng, items: &[(&'a str, f64)]) -> &'a str {
    let total: f64 = items.iter().map(|(_, w)| w).sum();
    let mut u = rng.gen::<f64>() * total;
    for &(s, w) in items {
        if u < w {
            return s;
        }
        u -= w;
    }
    items[items.len() - 1].0
}

fn int(rng: &mut ChaCha8Rng, lo: u64, hi: u64) -> f64 {
    rng.gen_range(lo..=hi) as f64
}

/// Log-uniform integer in `[lo, hi]`.
fn log_int(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.gen::<f64>() * (hi.ln() - lo.ln()))
        .exp()
        .round()
}

/// Rate in [0,1] rounded to two decimals, as in the dataset files.
fn rate(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    ((lo + rng.gen::<f64>() * (hi - lo)) * 100.0).round() / 100.0
}

fn normal_row(rng: &mut ChaCha8Rng) -> Row {
    let protocol = weighted(rng, &[("tcp", 0.82), ("udp", 0.14), ("icmp", 0.04)]);
    let service = match protocol {
        "tcp" => weighted(
            rng,
            &[
                ("http", 0.55),
                ("smtp", 0.12),
                ("ftp_data", 0.1),
                ("ftp", 0.04),
                ("telnet", 0.02),
                ("pop_3", 0.02),
                ("auth", 0.02),
                ("finger", 0.02),
                ("irc", 0.01),
                ("private", 0.05),
                ("other", 0.05),
            ],
        ),
        "udp" => weighted(
            rng,
            &[
                ("domain_u", 0.6),
                ("private", 0.25),
                ("ntp_u", 0.05),
                ("other", 0.1),
            ],
        ),
        _ => weighted(
            rng,
            &[
                ("eco_i", 0.5),
                ("ecr_i", 0.3),
                ("urp_i", 0.1),
                ("tim_i", 0.1),
            ],
        ),
    };
    let flag = if protocol == "tcp" {
        weighted(
            rng,
            &[
                ("SF", 0.94),
                ("REJ", 0.02),
                ("S1", 0.01),
                ("RSTO", 0.01),
                ("S0", 0.01),
                ("SH", 0.01),
            ],
        )
    } else {
        "SF"
    };
    let mut v = [0.0; NUM_FEATURES];
    v[0] = if rng.gen_bool(0.9) {
        0.0
    } else {
        log_int(rng, 1.0, 20_000.0)
    };
    v[4] = log_int(rng, 20.0, 20_000.0);
    v[5] = if rng.gen_bool(0.85) {
        log_int(rng, 50.0, 60_000.0)
    } else {
        0.0
    };
    v[9] = if rng.gen_bool(0.05) {
        int(rng, 1, 6)
    } else {
        0.0
    };
    v[11] = if protocol == "tcp" && flag == "SF" {
        1.0
    } else {
        0.0
    };
    v[12] = if rng.gen_bool(0.02) { 1.0 } else { 0.0 };
    v[16] = if rng.gen_bool(0.02) {
        int(rng, 1, 3)
    } else {
        0.0
    };
    v[18] = if rng.gen_bool(0.01) { 1.0 } else { 0.0 };
    v[21] = if rng.gen_bool(0.01) { 1.0 } else { 0.0 };
    v[22] = int(rng, 1, 25);
    v[23] = (v[22] + int(rng, 0, 20)).min(511.0);
    let err = rng.gen_bool(0.04);
    v[24] = if err { rate(rng, 0.0, 0.5) } else { 0.0 };
    v[25] = v[24];
    v[26] = if rng.gen_bool(0.05) {
        rate(rng, 0.0, 1.0)
    } else {
        0.0
    };
    v[27] = v[26];
    v[28] = rate(rng, 0.8, 1.0);
    v[29] = rate(rng, 0.0, 0.1);
    v[30] = rate(rng, 0.0, 0.3);
    v[31] = int(rng, 1, 255);
    v[32] = int(rng, 10, 255);
    v[33] = rate(rng, 0.6, 1.0);
    v[34] = rate(rng, 0.0, 0.08);
    v[35] = rate(rng, 0.0, 0.2);
    v[36] = rate(rng, 0.0, 0.1);
    v[37] = if err { rate(rng, 0.0, 0.3) } else { 0.0 };
    v[38] = v[37];
    v[39] = if rng.gen_bool(0.05) {
        rate(rng, 0.0, 0.5)
    } else {
        0.0
    };
    v[40] = v[39];
    Row {
        v,
        protocol,
        service,
        flag,
    }
}

const PRIVATE_SERVICES: [&str; 10] = [
    "private", "other", "telnet", "ftp", "http", "smtp", "finger", "auth", "sunrpc", "uucp",
];

fn attack_row(label: &str, rng: &mut ChaCha8Rng) -> Row {
    let mut r = normal_row(rng);
    let v = &mut r.v;
    match label {
        "neptune" => {
            r.protocol = "tcp";
            r.service = pick(rng, &PRIVATE_SERVICES);
            r.flag = weighted(rng, &[("S0", 0.9), ("REJ", 0.08), ("RSTO", 0.02)]);
            v[0] = 0.0;
            v[4] = 0.0;
            v[5] = 0.0;
            v[11] = 0.0;
            v[22] = int(rng, 80, 510);
            v[23] = int(rng, 1, 30);
            v[24] = rate(rng, 0.9, 1.0);
            v[25] = v[24];
            v[26] = if r.flag == "REJ" { 1.0 } else { 0.0 };
            v[27] = v[26];
            v[28] = rate(rng, 0.0, 0.15);
            v[29] = rate(rng, 0.04, 0.1);
            v[31] = 255.0;
            v[32] = int(rng, 1, 30);
            v[33] = rate(rng, 0.0, 0.12);
            v[34] = rate(rng, 0.04, 0.1);
            v[35] = 0.0;
            v[37] = rate(rng, 0.9, 1.0);
            v[38] = v[37];
        }
        "smurf" | "pod" => {
            r.protocol = "icmp";
            r.service = "ecr_i";
            r.flag = "SF";
            v[4] = if label == "pod" {
                1480.0
            } else {
                *[520.0, 1032.0].choose(rng).unwrap()
            };
            v[5] = 0.0;
            v[7] = if label == "pod" { 1.0 } else { 0.0 };
            v[11] = 0.0;
            v[22] = if label == "pod" {
                int(rng, 1, 5)
            } else {
                int(rng, 300, 511)
            };
            v[23] = v[22];
            v[28] = 1.0;
            v[29] = 0.0;
            v[31] = 255.0;
            v[32] = if label == "pod" {
                int(rng, 1, 20)
            } else {
                255.0
            };
            v[33] = 1.0;
            v[35] = 1.0;
        }
        "back" => {
            r.protocol = "tcp";
            r.service = "http";
            r.flag = weighted(rng, &[("SF", 0.85), ("RSTR", 0.15)]);
            v[4] = 54_540.0;
            v[5] = int(rng, 7_000, 8_400);
            v[9] = 2.0;
            v[11] = 1.0;
            v[12] = 1.0;
            v[22] = int(rng, 1, 10);
            v[31] = int(rng, 50, 255);
            v[32] = int(rng, 50, 255);
        }
        "teardrop" => {
            r.protocol = "udp";
            r.service = "private";
            r.flag = "SF";
            v[4] = 28.0;
            v[5] = 0.0;
            v[7] = 3.0;
            v[11] = 0.0;
            v[22] = int(rng, 1, 100);
            v[23] = v[22];
            v[31] = 255.0;
            v[32] = int(rng, 1, 100);
        }
        "land" => {
            r.protocol = "tcp";
            r.service = pick(rng, &["finger", "telnet", "http", "private"]);
            r.flag = "S0";
            v[4] = 0.0;
            v[5] = 0.0;
            v[6] = 1.0;
            v[11] = 0.0;
            v[24] = 1.0;
            v[25] = 1.0;
            v[37] = 1.0;
            v[38] = 1.0;
        }
        "satan" | "portsweep" | "nmap" => {
            r.protocol = if label == "nmap" {
                weighted(rng, &[("tcp", 0.5), ("icmp", 0.3), ("udp", 0.2)])
            } else {
                "tcp"
            };
            r.service = if r.protocol == "icmp" {
                "eco_i"
            } else {
                pick(rng, &PRIVATE_SERVICES)
            };
            r.flag = if r.protocol == "tcp" {
                weighted(
                    rng,
                    &[
                        ("REJ", 0.45),
                        ("RSTR", 0.2),
                        ("S0", 0.2),
                        ("SF", 0.1),
                        ("RSTOS0", 0.05),
                    ],
                )
            } else {
                "SF"
            };
            v[0] = if label == "portsweep" && rng.gen_bool(0.3) {
                int(rng, 1_000, 40_000)
            } else {
                0.0
            };
            v[4] = if rng.gen_bool(0.8) {
                0.0
            } else {
                int(rng, 1, 300)
            };
            v[5] = if rng.gen_bool(0.9) {
                0.0
            } else {
                int(rng, 1, 500)
            };
            v[11] = 0.0;
            v[22] = int(rng, 1, 200);
            v[23] = int(rng, 1, 20);
            v[26] = rate(rng, 0.5, 1.0);
            v[27] = rate(rng, 0.5, 1.0);
            v[28] = rate(rng, 0.0, 0.3);
            v[29] = rate(rng, 0.3, 1.0);
            v[31] = int(rng, 1, 255);
            v[32] = int(rng, 1, 30);
            v[33] = rate(rng, 0.0, 0.2);
            v[34] = rate(rng, 0.3, 1.0);
            v[35] = if label == "portsweep" {
                rate(rng, 0.8, 1.0)
            } else {
                rate(rng, 0.0, 0.8)
            };
            v[36] = rate(rng, 0.0, 0.5);
            v[39] = rate(rng, 0.4, 1.0);
            v[40] = rate(rng, 0.4, 1.0);
        }
        "ipsweep" => {
            r.protocol = "icmp";
            r.service = weighted(rng, &[("eco_i", 0.9), ("ecr_i", 0.1)]);
            r.flag = "SF";
            v[4] = *[8.0, 18.0, 20.0].choose(rng).unwrap();
            v[5] = 0.0;
            v[11] = 0.0;
            v[22] = int(rng, 1, 10);
            v[23] = int(rng, 1, 60);
            v[30] = rate(rng, 0.5, 1.0);
            v[31] = int(rng, 1, 80);
            v[32] = int(rng, 1, 80);
            v[33] = rate(rng, 0.8, 1.0);
            v[35] = rate(rng, 0.8, 1.0);
            v[36] = rate(rng, 0.3, 1.0);
        }
        "buffer_overflow" | "rootkit" | "loadmodule" | "perl" => {
            r.protocol = "tcp";
            r.service = weighted(rng, &[("telnet", 0.7), ("ftp_data", 0.2), ("other", 0.1)]);
            r.flag = "SF";
            v[0] = int(rng, 20, 1_000);
            v[4] = int(rng, 500, 5_000);
            v[5] = int(rng, 1_000, 30_000);
            v[9] = int(rng, 1, 6);
            v[11] = 1.0;
            v[12] = int(rng, 0, 3);
            v[13] = if rng.gen_bool(0.7) { 1.0 } else { 0.0 };
            v[15] = int(rng, 0, 3);
            v[16] = int(rng, 1, 4);
            v[17] = if rng.gen_bool(0.3) { 1.0 } else { 0.0 };
            v[18] = int(rng, 0, 2);
            v[22] = int(rng, 1, 3);
            v[23] = v[22];
            v[31] = int(rng, 1, 30);
            v[32] = int(rng, 1, 30);
        }
        _ => {
            // remote-to-local family
            r.protocol = "tcp";
            let ftp_like = matches!(label, "warezclient" | "warezmaster" | "ftp_write");
            r.service = if ftp_like {
                weighted(rng, &[("ftp_data", 0.6), ("ftp", 0.4)])
            } else if label == "guess_passwd" {
                "telnet"
            } else if label == "imap" {
                "imap4"
            } else {
                pick(rng, &["telnet", "ftp", "http", "login"])
            };
            r.flag = weighted(rng, &[("SF", 0.85), ("RSTO", 0.1), ("S3", 0.05)]);
            v[0] = int(rng, 10, 15_000);
            v[4] = if ftp_like {
                int(rng, 50_000, 400_000)
            } else {
                int(rng, 100, 2_000)
            };
            v[5] = if label == "warezmaster" {
                int(rng, 1_000_000, 5_000_000)
            } else {
                int(rng, 0, 3_000)
            };
            v[9] = int(rng, 1, 28);
            v[10] = if label == "guess_passwd" { 1.0 } else { 0.0 };
            v[11] = if label == "guess_passwd" { 0.0 } else { 1.0 };
            v[21] = if ftp_like && rng.gen_bool(0.6) {
                1.0
            } else {
                0.0
            };
            v[22] = int(rng, 1, 4);
            v[23] = v[22];
            v[31] = int(rng, 1, 60);
            v[32] = int(rng, 1, 60);
            v[35] = rate(rng, 0.5, 1.0);
        }
    }
    r
}

fn record(label: &str, rng: &mut ChaCha8Rng) -> RawRecord {
    let row = if label == "normal" || rng.gen_bool(STEALTH_SHARE) {
        normal_row(rng)
    } else {
        attack_row(label, rng)
    };
    let fields = row
        .v
        .iter()
        .enumerate()
        .map(|(i, &x)| match i {
            1 => row.protocol.to_string(),
            2 => row.service.to_string(),
            3 => row.flag.to_string(),
            24..=30 | 33..=40 => format!("{x:.2}"),
            _ => format!("{}", x as u64),
        })
        .collect();
    RawRecord {
        fields,
        label: label.to_string(),
        difficulty: Some(rng.gen_range(5..=21)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{map_label, parse_kdd_str, AttackClass};

    #[test]
    fn full_size_matches_training_mix() {
        let total: usize = TRAIN_LABEL_COUNTS.iter().map(|(_, c)| c).sum();
        assert_eq!(total, 125_973);
        let recs = generate(2_000, 1);
        assert_eq!(recs.len(), 2_000);
        let mut per_class = [0usize; 5];
        for r in &recs {
            per_class[map_label(&r.label).unwrap().index()] += 1;
        }
        // 2,000 · 67,343/125,973 ≈ 1,069
        assert!((per_class[AttackClass::Normal.index()] as i64 - 1_069).abs() <= 2);
        assert!(per_class[AttackClass::U2r.index()] <= 2);
    }

    #[test]
    fn text_parses_back() {
        let recs = generate(300, 4);
        let parsed = parse_kdd_str(&to_kdd_text(&recs)).unwrap();
        assert_eq!(parsed, recs);
        assert!(recs.iter().all(|r| r.fields.len() == NUM_FEATURES));
    }

    #[test]
    fn deterministic() {
        assert_eq!(generate(100, 9), generate(100, 9));
        assert_ne!(generate(100, 9), generate(100, 10));
    }
}
