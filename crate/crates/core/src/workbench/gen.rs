//! Benchmark domain generators. Both return domain text.

use std::fmt::Write;

/// `n` rooms in a row. Between rooms `j` and `j + 1` one of two doors is
/// open; `left-open-j` says which. There are `2^(n-1)` initial states.
pub fn gen_rooms(n: usize) -> Result<String, String> {
    if n < 2 {
        return Err(format!("rooms needs at least 2 rooms, got {n}"));
    }
    let mut s = format!("# {n} rooms; the open door of each pair is unknown.\nfact");
    for k in 1..=n {
        write!(s, " at-room-{k}").unwrap();
    }
    for j in 1..n {
        write!(s, " left-open-{j}").unwrap();
    }
    s.push_str("\n\n");
    for j in 1..n {
        let k = j + 1;
        writeln!(s, "operator move-a-{j} pre at-room-{j} left-open-{j} post -at-room-{j} at-room-{k}").unwrap();
        writeln!(s, "operator move-b-{j} pre at-room-{j} -left-open-{j} post -at-room-{j} at-room-{k}").unwrap();
    }
    s.push_str("\ninit (and at-room-1");
    for k in 2..=n {
        write!(s, " (not at-room-{k})").unwrap();
    }
    writeln!(s, ")\ngoal at-room-{n}").unwrap();
    Ok(s)
}

pub const MAX_BLOCKS: usize = 5;

fn block(i: usize) -> char {
    (b'A' + i as u8) as char
}

/// Every legal arrangement of `n` blocks: `below[x]` is the block under
/// `x`, or `None` for the table.
pub fn block_configurations(n: usize) -> Vec<Vec<Option<usize>>> {
    let mut out = Vec::new();
    let mut below = vec![None; n];
    fill(0, n, &mut below, &mut out);
    out
}

fn fill(x: usize, n: usize, below: &mut Vec<Option<usize>>, out: &mut Vec<Vec<Option<usize>>>) {
    if x == n {
        if legal(below) {
            out.push(below.clone());
        }
        return;
    }
    for b in std::iter::once(None).chain((0..n).filter(|&y| y != x).map(Some)) {
        below[x] = b;
        fill(x + 1, n, below, out);
    }
}

fn legal(below: &[Option<usize>]) -> bool {
    let n = below.len();
    // at most one block on each block
    for y in 0..n {
        if below.iter().filter(|&&b| b == Some(y)).count() > 1 {
            return false;
        }
    }
    // every chain reaches the table
    (0..n).all(|x| {
        let mut cur = x;
        for _ in 0..n {
            match below[cur] {
                None => return true,
                Some(y) => cur = y,
            }
        }
        false
    })
}

/// Blocks world with `n` blocks, every arrangement initial, and the goal
/// of stacking A on B on C and so on. `conXY` (onXY and clearX) are the
/// observable facts.
pub fn gen_blocks(n: usize) -> Result<String, String> {
    if !(2..=MAX_BLOCKS).contains(&n) {
        return Err(format!("blocks supports 2 to {MAX_BLOCKS} blocks, got {n}"));
    }
    let bs: Vec<char> = (0..n).map(block).collect();
    let pairs: Vec<(char, char)> = bs.iter().flat_map(|&x| bs.iter().filter(move |&&y| y != x).map(move |&y| (x, y))).collect();
    let mut s = format!("# {n} blocks; every arrangement is a possible initial state.\nfact");
    for &(x, y) in &pairs {
        write!(s, " on{x}{y}").unwrap();
    }
    for &x in &bs {
        write!(s, " ontable{x}").unwrap();
    }
    for &x in &bs {
        write!(s, " clear{x}").unwrap();
    }
    s.push('\n');
    for &(x, y) in &pairs {
        writeln!(s, "defined con{x}{y} (and on{x}{y} clear{x})").unwrap();
    }
    s.push_str("observable");
    for &(x, y) in &pairs {
        write!(s, " con{x}{y}").unwrap();
    }
    s.push_str("\n\n");
    for &(x, y) in &pairs {
        writeln!(s, "operator totable-{x}-{y} pre on{x}{y} clear{x} post -on{x}{y} ontable{x} clear{y}").unwrap();
    }
    for &(x, y) in &pairs {
        for &z in bs.iter().filter(|&&z| z != x && z != y) {
            writeln!(
                s,
                "operator move-{x}-{y}-{z} pre on{x}{y} clear{z} clear{x} post -on{x}{y} -clear{z} on{x}{z} clear{y}"
            )
            .unwrap();
        }
    }
    for &(x, y) in &pairs {
        writeln!(s, "operator fromtable-{x}-{y} pre ontable{x} clear{y} clear{x} post -ontable{x} -clear{y} on{x}{y}").unwrap();
    }

    s.push_str("\ninit (or");
    for below in block_configurations(n) {
        s.push_str("\n  (and");
        for &(x, y) in &pairs {
            let (xi, yi) = (x as usize - 'A' as usize, y as usize - 'A' as usize);
            lit(&mut s, below[xi] == Some(yi), &format!("on{x}{y}"));
        }
        for (xi, &x) in bs.iter().enumerate() {
            lit(&mut s, below[xi].is_none(), &format!("ontable{x}"));
        }
        for (xi, &x) in bs.iter().enumerate() {
            lit(&mut s, !below.contains(&Some(xi)), &format!("clear{x}"));
        }
        s.push(')');
    }
    s.push_str(")\ngoal (and");
    for w in bs.windows(2) {
        write!(s, " on{}{}", w[0], w[1]).unwrap();
    }
    s.push_str(")\n");
    Ok(s)
}

fn lit(s: &mut String, positive: bool, name: &str) {
    if positive {
        write!(s, " {name}").unwrap();
    } else {
        write!(s, " (not {name})").unwrap();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::parse_domain;

    #[test]
    fn configuration_counts() {
        let counts: Vec<usize> = (1..=5).map(|n| block_configurations(n).len()).collect();
        assert_eq!(counts, vec![1, 3, 13, 73, 501]);
    }

    #[test]
    fn blocks_initial_states() {
        for (n, want) in [(2, 3), (3, 13), (4, 73)] {
            let inst = parse_domain(&gen_blocks(n).unwrap()).unwrap();
            assert_eq!(inst.enumerate_initial_states(1000).unwrap().len(), want);
            assert_eq!(inst.observables().len(), n * (n - 1));
        }
        assert!(gen_blocks(1).is_err() && gen_blocks(6).is_err());
    }

    #[test]
    fn three_blocks_operator_count() {
        let inst = parse_domain(&gen_blocks(3).unwrap()).unwrap();
        // 6 to the table, 6 between blocks, 6 from the table
        assert_eq!(inst.operators.len(), 18);
        assert!(inst.operator("move-B-A-C").is_some());
    }

    #[test]
    fn rooms_shape() {
        let inst = parse_domain(&gen_rooms(13).unwrap()).unwrap();
        assert_eq!(inst.facts.len(), 25);
        assert_eq!(inst.operators.len(), 24);
        assert_eq!(inst.enumerate_initial_states(1 << 13).unwrap().len(), 4096);
        let two = parse_domain(&gen_rooms(2).unwrap()).unwrap();
        assert_eq!(two.enumerate_initial_states(10).unwrap().len(), 2);
        assert!(gen_rooms(1).is_err());
    }
}
