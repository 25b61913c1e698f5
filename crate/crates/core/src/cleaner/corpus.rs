use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::DocumentStore;
use crate::automata::Document;

#[derive(Clone, Copy, PartialEq, Eq)]
enum DateStyle {
    Compact,
    YearFirst(char),
    YearLast(char),
}

#[derive(Clone, Copy)]
struct Date {
    year: u32,
    month: u32,
    day: u32,
}

impl Date {
    fn random(rng: &mut ChaCha8Rng) -> Self {
        Date { year: rng.gen_range(1990..=2012), month: rng.gen_range(1..=12), day: rng.gen_range(1..=28) }
    }

    /// Day arithmetic on a 28-day month calendar; enough for plausible
    /// admission and discharge pairs.
    fn plus_days(self, n: u32) -> Self {
        let total = (self.year * 12 + self.month - 1) * 28 + self.day - 1 + n;
        Date { year: total / (12 * 28), month: total / 28 % 12 + 1, day: total % 28 + 1 }
    }

    fn render(self, style: DateStyle) -> String {
        let Date { year, month, day } = self;
        match style {
            DateStyle::Compact => format!("{year:04}{month:02}{day:02}"),
            DateStyle::YearFirst(sep) => format!("{year:04}{sep}{month:02}{sep}{day:02}"),
            DateStyle::YearLast(sep) => format!("{month:02}{sep}{day:02}{sep}{year:04}"),
        }
    }
}

fn random_style(rng: &mut ChaCha8Rng) -> DateStyle {
    let sep = if rng.gen_bool(0.5) { '/' } else { '-' };
    match rng.gen_range(0..4) {
        0 | 1 => DateStyle::Compact,
        2 => DateStyle::YearFirst(sep),
        _ => DateStyle::YearLast(sep),
    }
}

/// A date in a random format; rarely with a mistyped five-digit year.
fn random_date(rng: &mut ChaCha8Rng, date: Date) -> String {
    if rng.gen_bool(0.03) {
        let Date { year, month, day } = date;
        return format!("{month:02}/{day:02}/{year}{}", rng.gen_range(0..10));
    }
    date.render(random_style(rng))
}

const SITES: [&str; 4] = ["FIH", "BH", "NVH", "OMH"];
const COMPLAINTS: [&str; 5] = ["chest pain", "shortness of breath", "fever", "abdominal pain", "syncope"];
const PROCEDURES: [(&str, &str); 4] = [
    ("CT", "Computed Tomography"),
    ("MRI", "Magnetic Resonance Imaging"),
    ("EKG", "Electrocardiogram"),
    ("ECHO", "Echocardiogram"),
];
const DRUGS: [(&str, u32); 8] = [
    ("Colace", 100),
    ("Lasix", 40),
    ("Aspirin", 81),
    ("Lisinopril", 10),
    ("Metoprolol", 25),
    ("Nexium", 20),
    ("Coumadin", 5),
    ("Zocor", 20),
];
const UNITS: [&str; 3] = ["mg", "mg", "ml"];
const SCHEDULES: [&str; 5] = ["po qd", "po bid", "po tid", "qhs", "po q6h"];

fn medication(rng: &mut ChaCha8Rng) -> String {
    let (name, dose) = *DRUGS.choose(rng).expect("nonempty");
    let schedule = SCHEDULES.choose(rng).expect("nonempty");
    if rng.gen_bool(0.2) {
        format!("{name} {dose} {schedule}")
    } else {
        format!("{name} {dose} {} {schedule}", UNITS.choose(rng).expect("nonempty"))
    }
}

fn record(rng: &mut ChaCha8Rng, id: usize) -> String {
    let mut out = String::new();
    let _ = write!(out, "<RECORD ID=\"{id}\">\n<TEXT>\n");
    let _ = writeln!(out, "{:09}", rng.gen_range(0..1_000_000_000u32));
    let _ = writeln!(out, "{}", SITES.choose(rng).expect("nonempty"));
    let _ = writeln!(out, "{:07}", rng.gen_range(0..10_000_000u32));

    let admitted = Date::random(rng);
    let discharged = admitted.plus_days(rng.gen_range(1..20));
    // The two header dates always differ in format: one compact, one with
    // slashes.
    let slashed = if rng.gen_bool(0.5) { DateStyle::YearLast('/') } else { DateStyle::YearFirst('/') };
    let (adm_style, dis_style) =
        if rng.gen_bool(0.5) { (DateStyle::Compact, slashed) } else { (slashed, DateStyle::Compact) };
    let upper = rng.gen_bool(0.7);
    let (adm_head, dis_head) =
        if upper { ("ADMISSION DATE", "DISCHARGE DATE") } else { ("Admission Date", "Discharge Date") };
    let _ = write!(out, "{adm_head} :\n{}\n", admitted.render(adm_style));
    let discharge_text = discharged.render(dis_style);
    let _ = write!(out, "{dis_head} :\n{discharge_text}\n");

    out.push_str("HISTORY OF PRESENT ILLNESS :\n");
    let age = if rng.gen_bool(0.05) { 168 } else { rng.gen_range(19..95) };
    let sex = if rng.gen_bool(0.5) { "woman" } else { "man" };
    let complaint = COMPLAINTS.choose(rng).expect("nonempty");
    if rng.gen_bool(0.5) {
        let _ = writeln!(out, "The patient is a {age} year old {sex} with a history of {complaint} .");
    } else {
        let _ = writeln!(out, "This {age}-year-old {sex} presented with {complaint} .");
    }

    out.push_str("HOSPITAL COURSE AND TREATMENT :\n");
    let intro = if rng.gen_bool(0.5) { "The patient was admitted" } else { "Patient Admitted on" };
    let _ = writeln!(out, "{intro} {} with {complaint} .", random_date(rng, admitted));
    for _ in 0..rng.gen_range(1..=3) {
        let (abbr, full) = *PROCEDURES.choose(rng).expect("nonempty");
        let name = if rng.gen_bool(0.6) { abbr } else { full };
        let verb = if rng.gen_bool(0.5) { "had" } else { "received" };
        let _ = writeln!(out, "The patient {verb} {name} scan on day {} .", rng.gen_range(1..6));
    }
    if rng.gen_bool(0.5) {
        let _ = writeln!(out, "Given ASA {} mg daily .", [81, 325].choose(rng).expect("nonempty"));
    }

    out.push_str("MEDICATIONS ON DISCHARGE :\n");
    for _ in 0..rng.gen_range(1..=4) {
        if rng.gen_bool(0.25) {
            let sep = if rng.gen_bool(0.7) { " , " } else { " ; " };
            let _ = writeln!(out, "{}{sep}{}", medication(rng), medication(rng));
        } else {
            let _ = writeln!(out, "{}", medication(rng));
        }
    }

    out.push_str("FOLLOW-UP INSTRUCTIONS :\n");
    let _ = writeln!(out, "Follow up with primary care in {} weeks .", rng.gen_range(1..5));

    out.push_str("DD :\n");
    let dd = if rng.gen_bool(0.15) {
        // A dictation date that disagrees with the discharge date.
        let shifted = discharged.plus_days(rng.gen_range(1..5));
        random_date(rng, shifted)
    } else if rng.gen_bool(0.5) {
        discharge_text
    } else {
        random_date(rng, discharged)
    };
    let _ = write!(out, "{dd}\n</TEXT>\n</RECORD>\n");
    out
}

/// `n` discharge-summary records with ids `1..=n`, deterministic per seed.
pub fn gen_synthetic_corpus(seed: u64, n: usize) -> DocumentStore {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut store = DocumentStore::new();
    for id in 1..=n {
        let text = record(&mut rng, id);
        store.insert(Document::new(id.to_string(), text)).expect("ids are distinct");
    }
    store
}
