use super::{Grid, GridFunction};
use crate::error::{Error, Result};
use std::io::{BufRead, Write};

const MAGIC: &str = "# gridfunction v1";

/// Writes the text format:
///
/// ```text
/// # gridfunction v1
/// n 1
/// box -4 4
/// level 3
/// values
/// 0.5
/// ...
/// ```
///
/// For `n = 2` the box line holds `a1 b1 a2 b2`. Values are in storage order,
/// first axis fastest, printed with round-trip precision.
pub fn write_grid_function(f: &GridFunction, mut out: impl Write) -> Result<()> {
    let g = f.grid();
    writeln!(out, "{MAGIC}")?;
    writeln!(out, "n {}", g.dim())?;
    let bounds: Vec<String> = (0..g.dim()).flat_map(|a| [g.lo(a), g.hi(a)]).map(|v| format!("{v:?}")).collect();
    writeln!(out, "box {}", bounds.join(" "))?;
    writeln!(out, "level {}", g.level())?;
    writeln!(out, "values")?;
    for v in f.values() {
        writeln!(out, "{v:?}")?;
    }
    Ok(())
}

pub fn read_grid_function(input: impl BufRead) -> Result<GridFunction> {
    let bad = |m: &str| Error::InvalidParameter(format!("grid function file: {m}"));
    let mut lines = input.lines();
    let mut next = || -> Result<String> {
        lines.next().ok_or_else(|| bad("unexpected end of file"))?.map_err(Error::from)
    };
    if next()?.trim() != MAGIC {
        return Err(bad("missing header"));
    }
    let field = |line: String, key: &str| -> Result<Vec<String>> {
        let mut parts = line.split_whitespace().map(str::to_string);
        if parts.next().as_deref() != Some(key) {
            return Err(bad(&format!("expected '{key}'")));
        }
        Ok(parts.collect())
    };
    let n: usize = field(next()?, "n")?
        .first()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| bad("bad dimension"))?;
    let nums: Vec<f64> = field(next()?, "box")?
        .iter()
        .map(|s| s.parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| bad("bad box"))?;
    if nums.len() != 2 * n {
        return Err(bad("box needs two endpoints per axis"));
    }
    let level: u32 = field(next()?, "level")?
        .first()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| bad("bad level"))?;
    if next()?.trim() != "values" {
        return Err(bad("expected 'values'"));
    }
    let bounds: Vec<(f64, f64)> = nums.chunks(2).map(|c| (c[0], c[1])).collect();
    let grid = Grid::new(n, &bounds, level)?;
    let mut values = Vec::with_capacity(grid.len());
    for line in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        values.push(t.parse::<f64>().map_err(|_| bad(&format!("bad value '{t}'")))?);
    }
    GridFunction::new(grid, values)
}

/// CSV with header `x,value` (n = 1) or `x1,x2,value` (n = 2), one row per cell center.
pub fn write_grid_function_csv(f: &GridFunction, mut out: impl Write) -> Result<()> {
    let g = f.grid();
    if g.dim() == 1 {
        writeln!(out, "x,value")?;
    } else {
        writeln!(out, "x1,x2,value")?;
    }
    for (i, v) in f.values().iter().enumerate() {
        let c = g.center(i);
        if g.dim() == 1 {
            writeln!(out, "{:?},{v:?}", c[0])?;
        } else {
            writeln!(out, "{:?},{:?},{v:?}", c[0], c[1])?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let g = Grid::new(2, &[(-1.0, 1.0), (0.0, 0.5)], 2).unwrap();
        let f = GridFunction::from_fn(g, |x| x[0] * 0.1 + x[1].exp()).unwrap();
        let mut buf = Vec::new();
        write_grid_function(&f, &mut buf).unwrap();
        let back = read_grid_function(buf.as_slice()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn rejects_wrong_count() {
        let text = "# gridfunction v1\nn 1\nbox 0 1\nlevel 1\nvalues\n1\n";
        assert!(read_grid_function(text.as_bytes()).is_err());
    }

    #[test]
    fn csv_has_centers() {
        let g = Grid::line(0.0, 1.0, 1).unwrap();
        let f = GridFunction::new(g, vec![1.0, 2.0]).unwrap();
        let mut buf = Vec::new();
        write_grid_function_csv(&f, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "x,value\n0.25,1.0\n0.75,2.0\n");
    }
}
