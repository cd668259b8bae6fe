//! Built-in groups addressable by name: `Z1`..`Z12`, `S3`, `S4`, `D4`, `Q8`.
//!
//! Symmetric groups use permutations of `1..=n` in lexicographic order of
//! one-line notation, composed right to left (`(pq)(x) = p(q(x))`), and
//! are named in cycle notation with `e` for the identity.

use crate::error::{Error, Result};
use crate::group::GroupTable;

pub const MAX_CYCLIC: usize = 12;

/// A catalog group together with display names for its elements.
#[derive(Debug, Clone)]
pub struct NamedGroup {
    pub name: String,
    pub table: GroupTable,
    pub element_names: Vec<String>,
}

impl NamedGroup {
    /// Resolves an element by display name, falling back to a decimal index.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        let trimmed = name.trim();
        if let Some(i) = self.element_names.iter().position(|n| n == trimmed) {
            return Some(i);
        }
        trimmed
            .parse::<usize>()
            .ok()
            .filter(|&i| i < self.table.order())
    }

    pub fn with_index_names(name: impl Into<String>, table: GroupTable) -> Self {
        let element_names = (0..table.order()).map(|i| i.to_string()).collect();
        NamedGroup {
            name: name.into(),
            table,
            element_names,
        }
    }
}

/// Names accepted by [`group`], in listing order.
pub fn group_names() -> Vec<String> {
    let mut names: Vec<String> = (2..=MAX_CYCLIC).map(|n| format!("Z{n}")).collect();
    names.extend(["S3", "S4", "D4", "Q8"].iter().map(|s| s.to_string()));
    names
}

pub fn group(name: &str) -> Result<NamedGroup> {
    let key = name.trim().replace('_', "").to_ascii_uppercase();
    if let Some(n) = key.strip_prefix('Z').and_then(|d| d.parse::<usize>().ok()) {
        if (1..=MAX_CYCLIC).contains(&n) {
            return Ok(cyclic(n));
        }
    }
    match key.as_str() {
        "S3" => Ok(symmetric(3)),
        "S4" => Ok(symmetric(4)),
        "D4" => Ok(dihedral4()),
        "Q8" => Ok(quaternion()),
        _ => Err(Error::UnknownName(name.to_string())),
    }
}

pub fn cyclic(n: usize) -> NamedGroup {
    let table = GroupTable::from_fn(n, |p, q| (p + q) % n).expect("cyclic group table");
    NamedGroup::with_index_names(format!("Z{n}"), table)
}

/// `Z2 × Z2`, used in tests as the smallest group where every element is
/// its own inverse.
pub fn klein_four() -> GroupTable {
    GroupTable::from_fn(4, |p, q| p ^ q).expect("klein four table")
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn cycle_name(perm: &[usize]) -> String {
    let mut seen = vec![false; perm.len()];
    let mut name = String::new();
    for start in 0..perm.len() {
        if seen[start] || perm[start] == start {
            continue;
        }
        name.push('(');
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            name.push_str(&(x + 1).to_string());
            x = perm[x];
        }
        name.push(')');
    }
    if name.is_empty() {
        "e".to_string()
    } else {
        name
    }
}

pub fn symmetric(n: usize) -> NamedGroup {
    let perms = permutations(n);
    let index_of = |p: &[usize]| perms.iter().position(|x| x == p).expect("closed");
    let table = GroupTable::from_fn(perms.len(), |a, b| {
        let composed: Vec<usize> = (0..n).map(|x| perms[a][perms[b][x]]).collect();
        index_of(&composed)
    })
    .expect("symmetric group table");
    NamedGroup {
        name: format!("S{n}"),
        element_names: perms.iter().map(|p| cycle_name(p)).collect(),
        table,
    }
}

/// Dihedral group of order 8: elements `s^a r^b` at index `4a + b`.
pub fn dihedral4() -> NamedGroup {
    let table = GroupTable::from_fn(8, |x, y| {
        let (a, b) = (x / 4, x % 4);
        let (c, d) = (y / 4, y % 4);
        // r^b s^c = s^c r^{±b}
        let b2 = if c == 1 { (4 - b) % 4 } else { b };
        ((a + c) % 2) * 4 + (b2 + d) % 4
    })
    .expect("dihedral table");
    let names = ["e", "r", "r2", "r3", "s", "sr", "sr2", "sr3"];
    NamedGroup {
        name: "D4".into(),
        table,
        element_names: names.iter().map(|s| s.to_string()).collect(),
    }
}

/// Quaternion group: index `2u + n` is `(-1)^n` times unit `u ∈ {1, i, j, k}`.
pub fn quaternion() -> NamedGroup {
    // unit products as (sign flip, unit)
    const UNIT: [[(usize, usize); 4]; 4] = [
        [(0, 0), (0, 1), (0, 2), (0, 3)],
        [(0, 1), (1, 0), (0, 3), (1, 2)],
        [(0, 2), (1, 3), (1, 0), (0, 1)],
        [(0, 3), (0, 2), (1, 1), (1, 0)],
    ];
    let table = GroupTable::from_fn(8, |x, y| {
        let (u, sx) = (x / 2, x % 2);
        let (v, sy) = (y / 2, y % 2);
        let (flip, w) = UNIT[u][v];
        2 * w + (sx + sy + flip) % 2
    })
    .expect("quaternion table");
    let names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"];
    NamedGroup {
        name: "Q8".into(),
        table,
        element_names: names.iter().map(|s| s.to_string()).collect(),
    }
}
