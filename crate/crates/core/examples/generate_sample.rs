//! Writes the synthetic sample dataset shipped in `data/sample`.
//!
//! The numbers are invented. Availability follows the shape of the real
//! panel: some indicators only start in 2019 or 2020, a few stop early,
//! and weaker performers report less.
//!
//! ```text
//! cargo run -p vibrancy-core --example generate_sample -- data/sample
//! ```

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vibrancy_core::ingest::{bundled_metadata, write_observations, write_population, BUNDLED_METADATA, FORMAT_COMMENT};
use vibrancy_core::{CountryCode, ObservationTable, PopulationTable, ScaleMode};

const SEED: u64 = 20_231_231;
const YEARS: std::ops::RangeInclusive<i32> = 2017..=2023;

// (code, population in millions for 2023, latent strength)
const COUNTRIES: [(&str, f64, f64); 36] = [
    ("AUS", 26.6, 0.38),
    ("AUT", 9.1, 0.26),
    ("BEL", 11.8, 0.27),
    ("BRA", 216.4, 0.28),
    ("CAN", 40.1, 0.44),
    ("CHN", 1410.7, 0.82),
    ("DNK", 5.9, 0.30),
    ("EST", 1.4, 0.18),
    ("FIN", 5.6, 0.30),
    ("FRA", 68.2, 0.47),
    ("DEU", 84.5, 0.46),
    ("IND", 1428.6, 0.45),
    ("IRL", 5.3, 0.29),
    ("ISR", 9.8, 0.40),
    ("ITA", 58.8, 0.31),
    ("JPN", 124.5, 0.43),
    ("LUX", 0.7, 0.20),
    ("MYS", 34.3, 0.19),
    ("MEX", 128.5, 0.20),
    ("NLD", 17.9, 0.36),
    ("NZL", 5.2, 0.24),
    ("NOR", 5.5, 0.27),
    ("POL", 36.7, 0.23),
    ("PRT", 10.5, 0.22),
    ("RUS", 143.8, 0.25),
    ("SAU", 36.9, 0.22),
    ("SGP", 5.9, 0.44),
    ("ZAF", 60.4, 0.19),
    ("KOR", 51.7, 0.45),
    ("ESP", 48.4, 0.33),
    ("SWE", 10.6, 0.33),
    ("CHE", 8.8, 0.37),
    ("TUR", 85.3, 0.17),
    ("ARE", 9.5, 0.46),
    ("GBR", 68.4, 0.63),
    ("USA", 334.9, 1.00),
];

#[derive(Clone, Copy)]
enum Shape {
    /// scale * strength^gamma * size^0.35 * growth^t
    Count { scale: f64, gamma: f64, growth: f64 },
    /// lo + (hi - lo) * noisy strength
    Rate { lo: f64, hi: f64 },
    /// adoption year falls with strength
    Binary,
}

struct Profile {
    id: &'static str,
    first_year: i32,
    last_year: i32,
    coverage: f64,
    shape: Shape,
}

const fn count(id: &'static str, first_year: i32, coverage: f64, scale: f64, gamma: f64, growth: f64) -> Profile {
    Profile {
        id,
        first_year,
        last_year: 2023,
        coverage,
        shape: Shape::Count { scale, gamma, growth },
    }
}

const fn rate(id: &'static str, first_year: i32, coverage: f64, lo: f64, hi: f64) -> Profile {
    Profile {
        id,
        first_year,
        last_year: 2023,
        coverage,
        shape: Shape::Rate { lo, hi },
    }
}

fn profiles() -> Vec<Profile> {
    let mut semis = count("semiconductor_parts_exports", 2017, 0.97, 4.0e10, 2.5, 1.04);
    semis.last_year = 2022;
    vec![
        count("ai_journal_publications", 2017, 1.0, 60_000.0, 2.2, 1.08),
        count("ai_journal_citations", 2017, 1.0, 400_000.0, 2.4, 1.10),
        count("ai_conference_publications", 2017, 1.0, 20_000.0, 2.2, 1.06),
        count("ai_conference_citations", 2017, 1.0, 150_000.0, 2.5, 1.07),
        count("ai_patent_grants", 2017, 0.97, 30_000.0, 3.0, 1.15),
        count("notable_ml_models", 2017, 1.0, 60.0, 3.5, 1.05),
        count("foundation_models", 2019, 0.42, 100.0, 4.0, 1.6),
        count("foundation_models_datasets", 2019, 0.42, 60.0, 4.0, 1.5),
        count("foundation_models_applications", 2019, 0.42, 80.0, 4.0, 1.5),
        count("open_access_foundation_models", 2019, 0.36, 40.0, 4.0, 1.6),
        count("ai_github_projects", 2017, 1.0, 400_000.0, 2.0, 1.2),
        count("ai_github_stars", 2017, 1.0, 5.0e6, 2.3, 1.2),
        count("facct_rai_submissions", 2019, 1.0, 120.0, 2.5, 1.15),
        count("neurips_rai_submissions", 2019, 1.0, 400.0, 2.8, 1.2),
        count("icml_rai_submissions", 2019, 1.0, 250.0, 2.8, 1.2),
        count("iclr_rai_submissions", 2019, 1.0, 200.0, 2.8, 1.25),
        count("aies_rai_submissions", 2019, 1.0, 80.0, 2.5, 1.1),
        count("aaai_rai_submissions", 2019, 1.0, 150.0, 2.6, 1.15),
        count("ai_private_investment", 2017, 0.94, 6.7e10, 4.0, 1.1),
        count("ai_merger_acquisition_investment", 2017, 0.94, 2.0e10, 3.5, 1.05),
        count("ai_minority_stake_investment", 2017, 0.94, 1.5e10, 3.5, 1.05),
        count("ai_public_offering_investment", 2017, 0.94, 8.0e9, 3.0, 1.02),
        count("newly_funded_ai_companies", 2017, 0.94, 900.0, 3.5, 1.06),
        rate("ai_hiring_rate_yoy_ratio", 2018, 0.69, 0.8, 1.6),
        rate("relative_ai_skill_penetration", 2017, 0.67, 0.3, 2.6),
        rate("ai_talent_concentration", 2017, 0.69, 0.3, 1.5),
        rate("ai_job_postings_pct", 2017, 0.39, 0.2, 2.2),
        rate("net_migration_ai_skills", 2019, 0.69, -1.0, 2.5),
        count("ai_study_programs_english", 2017, 0.94, 900.0, 1.5, 1.05),
        rate("ai_study_programs_english_penetration", 2017, 0.92, 0.5, 20.0),
        Profile {
            id: "national_ai_strategy",
            first_year: 2017,
            last_year: 2023,
            coverage: 1.0,
            shape: Shape::Binary,
        },
        count("ai_legislation_passed", 2017, 1.0, 6.0, 1.5, 1.1),
        count("ai_legislative_mentions", 2017, 0.89, 300.0, 1.8, 1.25),
        rate("social_media_share_of_voice", 2020, 1.0, 0.1, 30.0),
        count("ai_social_media_posts", 2020, 1.0, 3.0e6, 2.5, 1.3),
        rate("ai_social_media_net_sentiment", 2020, 1.0, -10.0, 40.0),
        semis,
        count("supercomputers", 2017, 0.72, 150.0, 3.0, 1.0),
        count("compute_capacity_rmax", 2017, 0.72, 2000.0, 3.5, 1.35),
        rate("internet_speed", 2020, 0.97, 40.0, 250.0),
    ]
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Countries reporting an indicator: the best `coverage` share by noisy strength.
fn reporters(rng: &mut impl Rng, coverage: f64) -> Vec<bool> {
    let mut keyed: Vec<(f64, usize)> = COUNTRIES
        .iter()
        .enumerate()
        .map(|(i, (_, _, s))| (s + 0.15 * gaussian(rng), i))
        .collect();
    keyed.sort_by(|a, b| b.0.total_cmp(&a.0));
    let n = (coverage * COUNTRIES.len() as f64).round() as usize;
    let mut out = vec![false; COUNTRIES.len()];
    for (_, i) in keyed.into_iter().take(n) {
        out[i] = true;
    }
    out
}

fn round_to(x: f64, decimals: i32) -> f64 {
    let p = 10f64.powi(decimals);
    (x * p).round() / p
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out_dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "data/sample".into()));
    fs::create_dir_all(&out_dir)?;
    let metadata = bundled_metadata();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);

    let codes: Vec<CountryCode> = COUNTRIES.iter().map(|(c, _, _)| c.parse().unwrap()).collect();
    let mut observations = ObservationTable::with_countries(codes.iter().cloned());
    let mut population = PopulationTable::new();
    for (i, (_, pop_2023, _)) in COUNTRIES.iter().enumerate() {
        let growth: f64 = 1.0 + rng.gen_range(-0.002..0.012);
        for year in YEARS {
            let persons = pop_2023 * 1e6 / growth.powi(2023 - year);
            population.insert(codes[i].clone(), year, persons.round() as u64)?;
        }
    }

    for profile in profiles() {
        let def = metadata.indicator(profile.id).expect("profile ids match metadata");
        let shape_is_count = matches!(profile.shape, Shape::Count { .. });
        assert_eq!(def.scale_mode == ScaleMode::Absolute, shape_is_count, "{}", profile.id);
        let reporting = reporters(&mut rng, profile.coverage);
        let adoption: Vec<i32> = COUNTRIES
            .iter()
            .map(|(_, _, s)| 2023 - ((s * 9.0 + gaussian(&mut rng)).round() as i32).clamp(0, 8))
            .collect();
        for year in profile.first_year..=profile.last_year {
            let t = year - 2017;
            for (i, (_, pop, strength)) in COUNTRIES.iter().enumerate() {
                // availability grows over time for late starters
                let late_gap = profile.coverage < 0.5 && rng.gen_bool(0.12 * f64::from(2023 - year) / 6.0);
                if !reporting[i] || late_gap {
                    continue;
                }
                let noisy = (strength * (1.0 + 0.12 * gaussian(&mut rng))).max(0.01);
                let value = match profile.shape {
                    Shape::Count { scale, gamma, growth } => {
                        let size = (pop / 60.0).powf(0.35);
                        round_to(scale * noisy.powf(gamma) * size * growth.powi(t) / growth.powi(6), 0)
                    }
                    Shape::Rate { lo, hi } => round_to(lo + (hi - lo) * noisy.min(1.2) / 1.2, 3),
                    Shape::Binary => f64::from(u8::from(year >= adoption[i])),
                };
                observations.insert(codes[i].clone(), year, profile.id, value)?;
            }
        }
    }

    write_observations(&observations, BufWriter::new(File::create(out_dir.join("observations.csv"))?))?;
    write_population(&population, BufWriter::new(File::create(out_dir.join("population.csv"))?))?;
    fs::write(out_dir.join("metadata.toml"), BUNDLED_METADATA)?;

    // Inputs for the two derived indicators.
    let talent_reporting = reporters(&mut rng, 0.69);
    let counts_reporting = reporters(&mut rng, 0.33);
    let mut models = BufWriter::new(File::create(out_dir.join("model_production.csv"))?);
    let mut talent = BufWriter::new(File::create(out_dir.join("talent_gender.csv"))?);
    writeln!(models, "{FORMAT_COMMENT}\ncountry,year,academia_only,industry_only,total")?;
    writeln!(talent, "{FORMAT_COMMENT}\ncountry,year,female,male")?;
    for year in YEARS {
        for (i, (code, _, strength)) in COUNTRIES.iter().enumerate() {
            if counts_reporting[i] {
                let total = (strength.powi(3) * 60.0 * rng.gen_range(0.6..1.4)).round() as u64 + 1;
                let academia = rng.gen_range(0..=total);
                let industry = rng.gen_range(0..=total - academia);
                writeln!(models, "{code},{year},{academia},{industry},{total}")?;
            }
            if talent_reporting[i] {
                let male = round_to(0.5 + 1.5 * strength * rng.gen_range(0.8..1.2), 4);
                let female = round_to(male * rng.gen_range(0.25..0.85), 4);
                writeln!(talent, "{code},{year},{female},{male}")?;
            }
        }
    }
    models.flush()?;
    talent.flush()?;

    println!("wrote sample dataset to {}", out_dir.display());
    Ok(())
}
