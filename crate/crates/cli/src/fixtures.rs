//! The worked examples as structure files. Contents are fixed strings, so
//! writing them is byte-for-byte reproducible.

use std::io;
use std::path::Path;

pub const EXAMPLE_C: &str = "\
# Rank is not anti-monotone: z is below y but has smaller rank.
root nothing
state q
state s
state t
state u
state v
state w
state x
state y
state z
pair w nothing
pair t w
pair x w
pair u x
pair y x
pair v y
pair z y
pair q nothing
pair s q
pair z q
";

pub const EXAMPLE_D: &str = "\
# Arsenic or antimony, and which oxide. Ge sits below ?? and, as drawn,
# directly below nothing as well.
root nothing
state As
state ?O5
state Sb
state ??
state Ge
state As?
state AsO5
state SbO5
state Sb?
pair As nothing
pair ?O5 nothing
pair Sb nothing
pair ?? nothing
pair Ge nothing
pair As? As
pair AsO5 As
pair AsO5 ?O5
pair SbO5 ?O5
pair SbO5 Sb
pair Sb? Sb
pair Sb? ??
pair Ge ??
pair As? ??
tree T1 {
  node nothing As Sb Ge
  edge As nothing
  edge Sb nothing
  edge Ge nothing
}
tree T2 {
  node nothing ?O5 ?? AsO5 SbO5 Sb? Ge As?
  edge ?O5 nothing
  edge ?? nothing
  edge AsO5 ?O5
  edge SbO5 ?O5
  edge Sb? ??
  edge Ge ??
  edge As? ??
}
tree T3 {
  node nothing ?O5 Sb Ge
  edge ?O5 nothing
  edge Sb nothing
  edge Ge nothing
}
";

pub const EXAMPLE_J: &str = "\
# [h,i]: h heads and i tails seen so far, out of at most two tosses.
# [h,i] refines [j,k] iff h >= j and i >= k. No experimentation tree exists.
root [0,0]
state [1,0]
state [0,1]
state [2,0]
state [1,1]
state [0,2]
pair [1,0] [0,0]
pair [0,1] [0,0]
pair [2,0] [1,0]
pair [1,1] [1,0]
pair [1,1] [0,1]
pair [0,2] [0,1]
";

pub const EXAMPLE_R: &str = "\
# Rationalizable, yet not ISD consistent at nothing.
root nothing
state x1
state x2
state x3
state z1
state z2
state z3
state z4
state z5
pair x1 nothing
pair x2 nothing
pair x3 nothing
pair z1 x1
pair z2 x2
pair z3 x3
pair z4 x1
pair z4 x2
pair z4 x3
pair z5 x1
pair z5 x2
pair z5 x3
alts a b
choose nothing a
choose z1 a
choose z2 a
choose z3 a
choose x1 b
choose x2 b
choose x3 b
choose z4 b
choose z5 b
";

pub const EXAMPLE_T: &str = "\
# ISD consistent, yet not rationalizable.
root nothing
state x1
state x2
state z1
state z2
state z3
pair z1 x1
pair z2 x2
pair z3 x1
pair z3 x2
pair x1 nothing
pair x2 nothing
alts a b c
choose nothing a
choose z3 a
choose x1 b
choose z2 b
choose x2 c
choose z1 c
";

/// Counting measure on the five maximal states of example r, with `a`
/// paying on z1–z3 and `b` on z4, z5.
pub const EXAMPLE_R_WITNESS: &str = r#"{
  "weights": ["1/5", "1/5", "1/5", "1/5", "1/5"],
  "utilities": {
    "a": [1, 1, 1, 0, 0],
    "b": [0, 0, 0, 1, 1]
  },
  "events": {
    "nothing": [0, 1, 2, 3, 4],
    "x1": [0, 3, 4],
    "x2": [1, 3, 4],
    "x3": [2, 3, 4],
    "z1": [0],
    "z2": [1],
    "z3": [2],
    "z4": [3],
    "z5": [4]
  }
}
"#;

pub const ALL: [(&str, &str); 6] = [
    ("example_c.est", EXAMPLE_C),
    ("example_d.est", EXAMPLE_D),
    ("example_j.est", EXAMPLE_J),
    ("example_r.est", EXAMPLE_R),
    ("example_t.est", EXAMPLE_T),
    ("example_r_witness.json", EXAMPLE_R_WITNESS),
];

/// Writes every fixture into `dir`, creating it if needed.
pub fn write_all(dir: &Path) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, text) in ALL {
        std::fs::write(dir.join(name), text)?;
    }
    Ok(())
}
