use std::fmt;

use canonflow::Matrix2;

/// Plain-text report: free-form lines followed by a `key=value` block.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub title: String,
    pub lines: Vec<String>,
    pub values: Vec<(String, String)>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report {
            title: title.into(),
            ..Default::default()
        }
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    /// Aligned `label  value` line.
    pub fn row(&mut self, label: &str, value: impl Cell) {
        self.lines.push(format!("{label:<34} {}", value.cell()));
    }

    pub fn value(&mut self, key: &str, value: impl Cell) {
        self.values.push((key.into(), value.cell()));
    }

    pub fn matrix_values(&mut self, prefix: &str, m: &Matrix2<f64>) {
        for (suffix, (i, j)) in [("11", (0, 0)), ("12", (0, 1)), ("21", (1, 0)), ("22", (1, 1))] {
            self.value(&format!("{prefix}{suffix}"), m[(i, j)]);
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.title)?;
        writeln!(f, "{}", "=".repeat(self.title.chars().count()))?;
        for l in &self.lines {
            writeln!(f, "{l}")?;
        }
        writeln!(f)?;
        writeln!(f, "[values]")?;
        for (k, v) in &self.values {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

/// Report rendering of a value. Floats use the shortest round-trip form,
/// switching to exponent notation outside `[1e-4, 1e15)`.
pub trait Cell {
    fn cell(&self) -> String;
}

impl Cell for f64 {
    fn cell(&self) -> String {
        let x = *self + 0.0;
        let a = x.abs();
        if a != 0.0 && !(1e-4..1e15).contains(&a) {
            format!("{x:e}")
        } else {
            format!("{x}")
        }
    }
}

macro_rules! display_cell {
    ($($t:ty),*) => {
        $(impl Cell for $t {
            fn cell(&self) -> String {
                self.to_string()
            }
        })*
    };
}

display_cell!(usize, u64, u32, bool, &str, String);

pub fn fmt_matrix(m: &Matrix2<f64>) -> String {
    format!(
        "[[{}, {}], [{}, {}]]",
        m[(0, 0)].cell(),
        m[(0, 1)].cell(),
        m[(1, 0)].cell(),
        m[(1, 1)].cell()
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout() {
        let mut r = Report::new("steady");
        r.row("hurwitz", true);
        r.value("z_star", -0.25);
        r.matrix_values("sigma", &Matrix2::identity());
        let text = r.to_string();
        assert!(text.starts_with("steady\n======\nhurwitz"));
        assert!(text.contains("\n[values]\nz_star=-0.25\nsigma11=1\nsigma12=0\n"));
        assert_eq!(
            fmt_matrix(&Matrix2::new(1.0, -0.25, -0.25, 1.125)),
            "[[1, -0.25], [-0.25, 1.125]]"
        );
        assert_eq!(2.4e-14.cell(), "2.4e-14");
        assert_eq!((-0.0f64).cell(), "0");
        assert_eq!(0.5.cell(), "0.5");
    }
}
