//! Named group families, embedded Mathieu generators and generator files.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::group::GeneratedGroup;
use crate::perm::Permutation;

// Mathieu generators in the conventional 1-based numbering used by GAP's
// MathieuGroup(11/12/24), which follows the ATLAS permutation representations.
const M11_GENERATORS: &[&str] = &["(1,2,3,4,5,6,7,8,9,10,11)", "(3,7,11,8)(4,10,5,6)"];

const M12_GENERATORS: &[&str] = &[
    "(1,2,3,4,5,6,7,8,9,10,11)",
    "(3,7,11,8)(4,10,5,6)",
    "(1,12)(2,11)(3,6)(4,8)(5,9)(7,10)",
];

const M24_GENERATORS: &[&str] = &[
    "(1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16,17,18,19,20,21,22,23)",
    "(3,17,10,7,9)(4,13,14,19,5)(8,18,11,12,23)(15,20,22,21,16)",
    "(1,24)(2,23)(3,12)(4,16)(5,18)(6,10)(7,20)(8,14)(9,21)(11,17)(13,22)(15,19)",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSpec {
    Symmetric(usize),
    Alternating(usize),
    Cyclic(usize),
    Dihedral(usize),
    Mathieu11,
    Mathieu12,
    Mathieu24,
    File(PathBuf),
}

impl GroupSpec {
    /// Specs that are accepted but describe the trivial group.
    pub fn is_degenerate(&self) -> bool {
        matches!(
            self,
            GroupSpec::Symmetric(1) | GroupSpec::Alternating(1 | 2) | GroupSpec::Cyclic(1)
        )
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Symmetric(n) => write!(f, "S:{n}"),
            GroupSpec::Alternating(n) => write!(f, "A:{n}"),
            GroupSpec::Cyclic(n) => write!(f, "C:{n}"),
            GroupSpec::Dihedral(n) => write!(f, "D:{n}"),
            GroupSpec::Mathieu11 => f.write_str("M11"),
            GroupSpec::Mathieu12 => f.write_str("M12"),
            GroupSpec::Mathieu24 => f.write_str("M24"),
            GroupSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

/// Parses `S:N`, `A:N`, `C:N`, `D:N`, `M11`, `M12`, `M24` or `file:PATH`.
pub fn parse_group_spec(text: &str) -> Result<GroupSpec> {
    let text = text.trim();
    match text {
        "M11" => return Ok(GroupSpec::Mathieu11),
        "M12" => return Ok(GroupSpec::Mathieu12),
        "M24" => return Ok(GroupSpec::Mathieu24),
        _ => {}
    }
    if let Some(path) = text.strip_prefix("file:") {
        let path = PathBuf::from(path);
        if !path.is_file() {
            return Err(Error::FileNotFound(path.display().to_string()));
        }
        return Ok(GroupSpec::File(path));
    }
    let (family, param) = text
        .split_once(':')
        .ok_or_else(|| Error::UnknownFamily(text.to_string()))?;
    let make: fn(usize) -> GroupSpec = match family {
        "S" => GroupSpec::Symmetric,
        "A" => GroupSpec::Alternating,
        "C" => GroupSpec::Cyclic,
        "D" => GroupSpec::Dihedral,
        _ => return Err(Error::UnknownFamily(family.to_string())),
    };
    let n: usize = param
        .parse()
        .map_err(|_| Error::BadParameter(format!("`{param}` is not a degree")))?;
    if n == 0 {
        return Err(Error::BadParameter("degree must be at least 1".into()));
    }
    if family == "D" && n < 3 {
        return Err(Error::BadParameter(format!("dihedral group needs N >= 3, got {n}")));
    }
    Ok(make(n))
}

fn cycles_group(label: &str, degree: usize, generators: &[&str]) -> Result<GeneratedGroup> {
    let gens = generators
        .iter()
        .map(|t| Permutation::parse_cycles(t, degree))
        .collect::<Result<Vec<_>>>()?;
    GeneratedGroup::new(label, degree, gens)
}

fn long_cycle(points: impl Iterator<Item = usize>, degree: usize) -> Result<Permutation> {
    Permutation::from_cycles(degree, &[points.collect()])
}

pub fn symmetric(n: usize) -> Result<GeneratedGroup> {
    let label = format!("S{n}");
    if n == 1 {
        return GeneratedGroup::trivial(label, 1);
    }
    let gens = vec![
        Permutation::from_cycles(n, &[vec![0, 1]])?,
        long_cycle(0..n, n)?,
    ];
    GeneratedGroup::new(label, n, gens)
}

/// `A_N` generated by the 3-cycles `(1,2,i)`, `3 <= i <= N`.
pub fn alternating(n: usize) -> Result<GeneratedGroup> {
    let label = format!("A{n}");
    if n < 3 {
        return GeneratedGroup::trivial(label, n);
    }
    let gens = (2..n)
        .map(|i| Permutation::from_cycles(n, &[vec![0, 1, i]]))
        .collect::<Result<Vec<_>>>()?;
    GeneratedGroup::new(label, n, gens)
}

pub fn cyclic(n: usize) -> Result<GeneratedGroup> {
    let label = format!("C{n}");
    if n == 1 {
        return GeneratedGroup::trivial(label, 1);
    }
    GeneratedGroup::new(label, n, vec![long_cycle(0..n, n)?])
}

/// Symmetries of the N-gon: rotation `(1,…,N)` and reflection `i -> N+1-i`.
pub fn dihedral(n: usize) -> Result<GeneratedGroup> {
    let reflection = Permutation::from_images((0..n).rev().collect())?;
    GeneratedGroup::new(format!("D{n}"), n, vec![long_cycle(0..n, n)?, reflection])
}

pub fn mathieu11() -> GeneratedGroup {
    cycles_group("M11", 11, M11_GENERATORS).expect("embedded M11 generators parse")
}

pub fn mathieu12() -> GeneratedGroup {
    cycles_group("M12", 12, M12_GENERATORS).expect("embedded M12 generators parse")
}

pub fn mathieu24() -> GeneratedGroup {
    cycles_group("M24", 24, M24_GENERATORS).expect("embedded M24 generators parse")
}

pub fn realize(spec: &GroupSpec) -> Result<GeneratedGroup> {
    match spec {
        GroupSpec::Symmetric(n) => symmetric(*n),
        GroupSpec::Alternating(n) => alternating(*n),
        GroupSpec::Cyclic(n) => cyclic(*n),
        GroupSpec::Dihedral(n) => dihedral(*n),
        GroupSpec::Mathieu11 => Ok(mathieu11()),
        GroupSpec::Mathieu12 => Ok(mathieu12()),
        GroupSpec::Mathieu24 => Ok(mathieu24()),
        GroupSpec::File(path) => load_generator_file(path),
    }
}

/// On-disk generator file: `{"label": .., "degree": .., "generators": [..]}`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorFile {
    label: String,
    degree: usize,
    generators: Vec<String>,
}

pub fn load_generator_file(path: &Path) -> Result<GeneratedGroup> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::FileNotFound(path.display().to_string())
        } else {
            Error::FileParse(format!("{}: {e}", path.display()))
        }
    })?;
    parse_generator_json(&text)
}

pub fn parse_generator_json(text: &str) -> Result<GeneratedGroup> {
    let file: GeneratorFile = serde_json::from_str(text).map_err(|e| Error::FileParse(e.to_string()))?;
    if file.degree == 0 {
        return Err(Error::FileParse("degree must be at least 1".into()));
    }
    if file.generators.is_empty() {
        return Err(Error::FileParse("no generators".into()));
    }
    let gens = file
        .generators
        .iter()
        .map(|t| Permutation::parse_cycles(t, file.degree))
        .collect::<Result<Vec<_>>>()?;
    GeneratedGroup::new(file.label, file.degree, gens)
}
