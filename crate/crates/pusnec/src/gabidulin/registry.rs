//! Named code presets and the good-code selection table.

use super::{CodecSpec, GabError};

/// One row of the selection table: for a distribution degree n0 and
/// dimension k, the split (k0, μ0) together with the code length n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GoodCode {
    pub n0: usize,
    pub k: usize,
    pub k0: usize,
    pub mu0: usize,
    pub n: usize,
    pub minimal: bool,
}

impl GoodCode {
    /// Key consumption ratio n0 / k0.
    pub fn c_key(&self) -> f64 {
        self.n0 as f64 / self.k0 as f64
    }

    pub fn label(&self) -> &'static str {
        if self.minimal {
            "minimal"
        } else {
            "redundant"
        }
    }

    pub fn w(&self) -> u32 {
        default_w(self.n)
    }

    pub fn spec(&self, l: usize) -> CodecSpec {
        CodecSpec { w: self.w(), n: self.n, k: self.k, n0: self.n0, k0: self.k0, mu0: self.mu0, l }
    }

    pub fn id(&self) -> String {
        format!("gab{}-{}@{}/{}/{}", self.n, self.k, self.n0, self.k0, self.mu0)
    }
}

/// Ground-field width paired with each code length.
pub fn default_w(n: usize) -> u32 {
    match n {
        6 => 5,
        9 | 11 => 8,
        14 => 5,
        _ => 1,
    }
}

const fn gc(n0: usize, k: usize, k0: usize, mu0: usize, n: usize, minimal: bool) -> GoodCode {
    GoodCode { n0, k, k0, mu0, n, minimal }
}

pub const GOOD_CODES: &[GoodCode] = &[
    gc(5, 3, 1, 2, 6, true),
    gc(5, 3, 2, 1, 9, false),
    gc(5, 3, 3, 0, 9, false),
    gc(6, 3, 1, 2, 9, false),
    gc(6, 3, 2, 1, 9, false),
    gc(6, 3, 3, 0, 9, true),
    gc(6, 4, 1, 3, 9, false),
    gc(6, 4, 2, 2, 9, false),
    gc(6, 4, 3, 1, 9, true),
    gc(7, 3, 1, 2, 9, false),
    gc(7, 3, 2, 1, 9, true),
    gc(7, 3, 3, 0, 11, false),
    gc(7, 4, 1, 3, 9, false),
    gc(7, 4, 2, 2, 9, true),
    gc(7, 4, 3, 1, 11, false),
    gc(7, 4, 4, 0, 11, true),
    gc(7, 5, 1, 4, 9, false),
    gc(7, 5, 2, 3, 9, true),
    gc(7, 5, 3, 2, 11, false),
    gc(7, 5, 4, 1, 11, true),
    gc(7, 5, 5, 0, 14, false),
    gc(8, 3, 1, 2, 9, true),
    gc(8, 3, 2, 1, 9, false),
    gc(8, 3, 3, 0, 11, true),
    gc(8, 4, 1, 3, 9, true),
    gc(8, 4, 2, 2, 11, false),
    gc(8, 4, 3, 1, 11, true),
    gc(8, 4, 4, 0, 14, false),
    gc(8, 5, 1, 4, 9, true),
    gc(8, 5, 2, 3, 11, false),
    gc(8, 5, 3, 2, 11, true),
    gc(8, 5, 4, 1, 14, false),
    gc(8, 5, 5, 0, 14, false),
    gc(8, 6, 1, 5, 9, true),
    gc(8, 6, 2, 4, 11, false),
    gc(8, 6, 3, 3, 11, true),
    gc(8, 6, 4, 2, 14, false),
    gc(8, 6, 5, 1, 14, false),
    gc(8, 6, 6, 0, 14, true),
];

/// Default interleaving depth.
pub const DEFAULT_L: usize = 3;

/// Short preset names, each pointing at a selection-table row.
pub const PRESETS: &[(&str, GoodCode)] = &[
    ("gab6-3", gc(5, 3, 1, 2, 6, true)),
    ("gab9-3", gc(5, 3, 3, 0, 9, false)),
    ("gab9-4", gc(6, 4, 3, 1, 9, true)),
    ("gab9-5", gc(7, 5, 2, 3, 9, true)),
    ("gab9-6", gc(8, 6, 1, 5, 9, true)),
    ("gab11-3", gc(8, 3, 3, 0, 11, true)),
    ("gab11-4", gc(7, 4, 4, 0, 11, true)),
    ("gab11-5", gc(7, 5, 4, 1, 11, true)),
    ("gab11-6", gc(8, 6, 3, 3, 11, true)),
];

/// Look a preset up by name. Accepted forms:
/// `gab{n}-{k}` (preset), `gab14-{k}` (six-degree distribution) and
/// `gab{n}-{k}@{n0}/{k0}/{mu0}` (any selection-table row).
pub fn lookup(id: &str) -> Result<(GoodCode, CodecSpec), GabError> {
    let unknown = || GabError::InvalidSpec(format!("unknown spec id '{id}'"));
    if let Some((base, tail)) = id.split_once('@') {
        let (n, k) = parse_base(base).ok_or_else(unknown)?;
        let parts: Vec<usize> = tail.split('/').map(|p| p.parse().map_err(|_| unknown())).collect::<Result<_, _>>()?;
        let [n0, k0, mu0] = parts[..] else {
            return Err(unknown());
        };
        let row = GOOD_CODES
            .iter()
            .find(|g| g.n == n && g.k == k && g.n0 == n0 && g.k0 == k0 && g.mu0 == mu0)
            .copied()
            .ok_or_else(unknown)?;
        return Ok((row, row.spec(DEFAULT_L)));
    }
    if let Some((_, row)) = PRESETS.iter().find(|(name, _)| *name == id) {
        return Ok((*row, row.spec(DEFAULT_L)));
    }
    let (n, k) = parse_base(id).ok_or_else(unknown)?;
    if n == 14 && (3..=6).contains(&k) {
        let row = GoodCode { n0: 6, k, k0: k, mu0: 0, n: 14, minimal: false };
        return Ok((row, row.spec(DEFAULT_L)));
    }
    Err(unknown())
}

fn parse_base(s: &str) -> Option<(usize, usize)> {
    let rest = s.strip_prefix("gab")?;
    let (n, k) = rest.split_once('-')?;
    Some((n.parse().ok()?, k.parse().ok()?))
}

/// All addressable ids: presets first, then every table row.
pub fn all_ids() -> Vec<String> {
    let mut ids: Vec<String> = PRESETS.iter().map(|(n, _)| n.to_string()).collect();
    ids.extend((3..=6).map(|k| format!("gab14-{k}")));
    ids.extend(GOOD_CODES.iter().map(|g| g.id()));
    ids
}
