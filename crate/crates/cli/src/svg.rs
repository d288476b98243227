//! Minimal self-contained SVG plotter: axes, tick labels, point and line
//! series, a small legend. No external assets, deterministic output.

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 520.0;
const MARGIN_LEFT: f64 = 78.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 42.0;
const MARGIN_BOTTOM: f64 = 58.0;

pub const PALETTE: [&str; 12] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
];

pub enum Series {
    Points { label: String, color: &'static str, data: Vec<(f64, f64)> },
    Line { label: String, color: &'static str, data: Vec<(f64, f64)> },
}

impl Series {
    fn data(&self) -> &[(f64, f64)] {
        match self {
            Series::Points { data, .. } | Series::Line { data, .. } => data,
        }
    }

    fn label(&self) -> &str {
        match self {
            Series::Points { label, .. } | Series::Line { label, .. } => label,
        }
    }

    fn color(&self) -> &'static str {
        match self {
            Series::Points { color, .. } | Series::Line { color, .. } => color,
        }
    }
}

pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

fn tick_format(value: f64) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    let magnitude = value.abs();
    if magnitude >= 10_000.0 || magnitude < 0.01 {
        format!("{value:.2e}")
    } else if magnitude >= 100.0 {
        format!("{value:.0}")
    } else if magnitude >= 1.0 {
        format!("{value:.2}")
    } else {
        format!("{value:.3}")
    }
}

impl Plot {
    pub fn render(&self) -> String {
        let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
        for series in &self.series {
            for &(x, y) in series.data() {
                x_min = x_min.min(x);
                x_max = x_max.max(x);
                y_min = y_min.min(y);
                y_max = y_max.max(y);
            }
        }
        if !x_min.is_finite() {
            x_min = 0.0;
            x_max = 1.0;
        }
        if !y_min.is_finite() {
            y_min = 0.0;
            y_max = 1.0;
        }
        if x_max == x_min {
            x_max = x_min + 1.0;
        }
        if y_max == y_min {
            y_max = y_min + 1.0;
        }
        // pad the value range a little so points sit inside the frame
        let y_pad = 0.05 * (y_max - y_min);
        y_min -= y_pad;
        y_max += y_pad;

        let plot_width = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        let plot_height = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        let to_x = |x: f64| MARGIN_LEFT + (x - x_min) / (x_max - x_min) * plot_width;
        let to_y = |y: f64| MARGIN_TOP + (1.0 - (y - y_min) / (y_max - y_min)) * plot_height;

        let mut svg = String::new();
        svg.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
             viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
        ));
        svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" \
             text-anchor=\"middle\">{}</text>\n",
            WIDTH / 2.0,
            escape(&self.title)
        ));

        // frame
        svg.push_str(&format!(
            "<rect x=\"{MARGIN_LEFT}\" y=\"{MARGIN_TOP}\" width=\"{plot_width:.1}\" \
             height=\"{plot_height:.1}\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n"
        ));

        // ticks and grid
        let ticks = 6;
        for i in 0..=ticks {
            let fx = i as f64 / ticks as f64;
            let x_value = x_min + fx * (x_max - x_min);
            let x = to_x(x_value);
            svg.push_str(&format!(
                "<line x1=\"{x:.1}\" y1=\"{MARGIN_TOP}\" x2=\"{x:.1}\" y2=\"{:.1}\" \
                 stroke=\"#ddd\" stroke-width=\"0.5\"/>\n",
                MARGIN_TOP + plot_height
            ));
            svg.push_str(&format!(
                "<text x=\"{x:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" \
                 text-anchor=\"middle\">{}</text>\n",
                MARGIN_TOP + plot_height + 18.0,
                tick_format(x_value)
            ));

            let y_value = y_min + fx * (y_max - y_min);
            let y = to_y(y_value);
            svg.push_str(&format!(
                "<line x1=\"{MARGIN_LEFT}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" \
                 stroke=\"#ddd\" stroke-width=\"0.5\"/>\n",
                MARGIN_LEFT + plot_width
            ));
            svg.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" \
                 text-anchor=\"end\">{}</text>\n",
                MARGIN_LEFT - 6.0,
                y + 4.0,
                tick_format(y_value)
            ));
        }

        // axis labels
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\" \
             text-anchor=\"middle\">{}</text>\n",
            MARGIN_LEFT + plot_width / 2.0,
            HEIGHT - 14.0,
            escape(&self.x_label)
        ));
        svg.push_str(&format!(
            "<text x=\"18\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\" \
             text-anchor=\"middle\" transform=\"rotate(-90 18 {:.1})\">{}</text>\n",
            MARGIN_TOP + plot_height / 2.0,
            MARGIN_TOP + plot_height / 2.0,
            escape(&self.y_label)
        ));

        // series
        for series in &self.series {
            match series {
                Series::Points { color, data, .. } => {
                    for &(x, y) in data {
                        svg.push_str(&format!(
                            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"1.8\" fill=\"{color}\" \
                             fill-opacity=\"0.75\"/>\n",
                            to_x(x),
                            to_y(y)
                        ));
                    }
                }
                Series::Line { color, data, .. } => {
                    let mut points = String::new();
                    for &(x, y) in data {
                        points.push_str(&format!("{:.2},{:.2} ", to_x(x), to_y(y)));
                    }
                    svg.push_str(&format!(
                        "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" \
                         stroke-width=\"1.6\"/>\n",
                        points.trim_end()
                    ));
                }
            }
        }

        // legend
        for (i, series) in self.series.iter().enumerate() {
            if series.label().is_empty() {
                continue;
            }
            let y = MARGIN_TOP + 16.0 + 16.0 * i as f64;
            let x = MARGIN_LEFT + plot_width - 150.0;
            svg.push_str(&format!(
                "<rect x=\"{x:.1}\" y=\"{:.1}\" width=\"10\" height=\"10\" fill=\"{}\"/>\n",
                y - 9.0,
                series.color()
            ));
            svg.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{y:.1}\" font-family=\"sans-serif\" \
                 font-size=\"12\">{}</text>\n",
                x + 15.0,
                escape(series.label())
            ));
        }

        svg.push_str("</svg>\n");
        svg
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_self_contained_svg() {
        let plot = Plot {
            title: "demo <plot>".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            series: vec![
                Series::Points {
                    label: "data".into(),
                    color: PALETTE[0],
                    data: vec![(0.0, 1.0), (1.0, 2.0)],
                },
                Series::Line {
                    label: "fit".into(),
                    color: PALETTE[1],
                    data: vec![(0.0, 1.0), (1.0, 2.0)],
                },
            ],
        };
        let svg = plot.render();
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert!(svg.contains("demo &lt;plot&gt;"));
        assert!(!svg.contains("href"));
        // deterministic
        assert_eq!(svg, plot.render());
    }

    #[test]
    fn empty_plot_still_renders() {
        let plot = Plot {
            title: "empty".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            series: vec![],
        };
        assert!(plot.render().contains("</svg>"));
    }
}
