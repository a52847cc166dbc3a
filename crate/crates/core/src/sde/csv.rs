use std::io::{self, Write};

use super::Trajectory;

/// Writes trajectories as `path,t,q,p` rows, plus `J11,J12,J21,J22,detJ`
/// when Jacobians are present. Floats use 17 significant digits.
pub fn write_trajectory_csv<W: Write>(out: &mut W, paths: &[Trajectory]) -> io::Result<()> {
    write_csv_header(out, paths.first().is_some_and(|t| t.jacobians.is_some()))?;
    for (i, traj) in paths.iter().enumerate() {
        write_trajectory_rows(out, i as u64, traj)?;
    }
    Ok(())
}

pub fn write_csv_header<W: Write>(out: &mut W, with_jacobian: bool) -> io::Result<()> {
    write!(out, "path,t,q,p")?;
    if with_jacobian {
        write!(out, ",J11,J12,J21,J22,detJ")?;
    }
    writeln!(out)
}

pub fn write_trajectory_rows<W: Write>(out: &mut W, path: u64, traj: &Trajectory) -> io::Result<()> {
    for (k, (t, x)) in traj.times.iter().zip(&traj.states).enumerate() {
        write!(out, "{path},{},{},{}", sig17(*t), sig17(x[0]), sig17(x[1]))?;
        if let Some(j) = traj.jacobians.as_ref().and_then(|js| js.get(k)) {
            for v in [j[(0, 0)], j[(0, 1)], j[(1, 0)], j[(1, 1)], j.determinant()] {
                write!(out, ",{}", sig17(v))?;
            }
        }
        writeln!(out)?;
    }
    Ok(())
}

fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix2;

    #[test]
    fn header_and_rows() {
        let t = Trajectory {
            times: vec![0.0, 0.5],
            states: vec![[1.0, 0.0], [0.25, -1.0 / 3.0]],
            jacobians: Some(vec![Matrix2::identity(), Matrix2::new(2.0, 0.0, 0.0, 0.5)]),
        };
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &[t]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "path,t,q,p,J11,J12,J21,J22,detJ");
        assert_eq!(lines.len(), 3);
        let row: Vec<f64> = lines[2].split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(row[3], -1.0 / 3.0);
        assert_eq!(row[8], 1.0);
        assert!(lines[2].contains("-3.3333333333333331e-1"));
    }

    #[test]
    fn no_jacobian_columns() {
        let t = Trajectory {
            times: vec![0.0],
            states: vec![[1.0, 2.0]],
            jacobians: None,
        };
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &[t]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "path,t,q,p\n0,0.0000000000000000e0,1.0000000000000000e0,2.0000000000000000e0\n"
        );
    }
}
