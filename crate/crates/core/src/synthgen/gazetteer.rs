use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Place vocabulary for one sub-region.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubRegion {
    /// Single-token locality names.
    pub localities: Vec<String>,
    /// Landmark phrases, space separated ("lakshmi temple").
    pub landmarks: Vec<String>,
    pub pincodes: Vec<String>,
}

/// Sub-regions of one delivery zone plus the zone-wide city/state tokens.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gazetteer {
    pub city: String,
    pub state: String,
    pub subregions: BTreeMap<String, SubRegion>,
}

impl Gazetteer {
    pub fn len(&self) -> usize {
        self.subregions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subregions.is_empty()
    }

    /// The first `n` sub-regions in label order.
    pub fn truncated(&self, n: usize) -> Gazetteer {
        Gazetteer {
            city: self.city.clone(),
            state: self.state.clone(),
            subregions: self
                .subregions
                .iter()
                .take(n)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }
}

// Fictional names. Each row: localities; landmarks; pincodes.
const BUILTIN: &[(&[&str], &[&str], &[&str])] = &[
    (&["chandrapura", "kesavanagar", "mallikahalli"], &["lakshmi temple", "sunrise school"], &["560101"]),
    (&["bhuvanapalya", "devarakunte", "ratnapuri"], &["gokul park", "varsha hospital"], &["560101"]),
    (&["sundarabad", "hiranmaya", "tulasiwadi"], &["ganesha temple", "orchid mall"], &["560102"]),
    (&["kamalapete", "shivaramganj", "pushpagiri"], &["mango market", "st mary church"], &["560102"]),
    (&["vasundhara", "narmadapur", "koyilagudi"], &["silver lake", "kaveri hospital"], &["560103"]),
    (&["jaladhipura", "bilvapatna", "somasagara"], &["old fort", "lotus school"], &["560103"]),
    (&["anandavana", "gopikaranya", "mayurapalli"], &["railway colony", "krishna temple"], &["560104"]),
    (&["indukuppam", "parijatham", "rajavalli"], &["bus depot", "noble school"], &["560104"]),
    (&["thamaraikulam", "veenavadi", "chakrapani"], &["water tank", "city hospital"], &["560105"]),
    (&["yamunakere", "hamsapura", "kanakadurga"], &["ring road", "pearl mall"], &["560105"]),
    (&["akashnagar", "bhoomigiri", "taravalli"], &["police station", "green park"], &["560106"]),
    (&["dhruvapalya", "simhapuri", "kokilaban"], &["fire station", "durga temple"], &["560106"]),
    (&["nakshatrapur", "chitravana", "meghamandi"], &["post office", "unity school"], &["560107"]),
    (&["suryodaya", "pankajnagar", "vishalgarh"], &["cricket ground", "saibaba temple"], &["560107"]),
    (&["kalyanpuri", "madhuvana", "utpalabad"], &["flower market", "metro depot"], &["560108"]),
    (&["ambikapura", "nilgirihalli", "sharadavadi"], &["bank colony", "prakash hospital"], &["560108"]),
];

/// The shipped sample gazetteer: sixteen fictional sub-regions in one zone,
/// with pincodes shared between pairs of neighbouring sub-regions.
pub fn builtin_gazetteer() -> Gazetteer {
    let owned = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    Gazetteer {
        city: "shantipur".into(),
        state: "karnataka".into(),
        subregions: BUILTIN
            .iter()
            .enumerate()
            .map(|(i, (loc, land, pin))| {
                (
                    format!("sr{:02}", i + 1),
                    SubRegion {
                        localities: owned(loc),
                        landmarks: owned(land),
                        pincodes: owned(pin),
                    },
                )
            })
            .collect(),
    }
}

/// Building names shared by every sub-region.
pub(crate) const BUILDINGS: &[&str] = &[
    "meenakshi", "srinivasa", "greenwood", "royal", "prestige", "lakeview", "classic", "heritage",
];

pub(crate) const BUILDING_KINDS: &[&str] = &["apartments", "residency", "enclave", "homes"];

pub(crate) const HOUSE_PREFIXES: &[&[&str]] = &[
    &["house", "no"],
    &["flat", "no"],
    &["door", "no"],
    &["plot"],
    &["h", "no"],
    &[],
];

pub(crate) const STREET_KINDS: &[&[&str]] = &[&["main", "road"], &["cross"], &["layout"], &["street"]];

pub(crate) const LANDMARK_LEADS: &[&str] = &["near", "opposite", "behind"];
