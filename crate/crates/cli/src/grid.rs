//! Parameter grids: `a:b:step`, `a:b:+`, `a:b` and comma lists.

use anyhow::{bail, Context, Result};

/// Step used for `a:b:+` and `a:b` probability grids.
const P0_STEP: f64 = 0.025;

fn split_range(text: &str) -> Option<(&str, &str, Option<&str>)> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts[..] {
        [a, b] => Some((a, b, None)),
        [a, b, s] => Some((a, b, Some(s))),
        _ => None,
    }
}

/// Chain lengths. `a:b:+` (or `a:b`) selects the even squares in `[a, b]`.
pub fn parse_lengths(text: &str) -> Result<Vec<usize>> {
    let text = text.trim();
    let out = if text.contains(':') {
        let (a, b, step) = split_range(text).with_context(|| format!("bad L grid {text:?}"))?;
        let a: usize = a
            .parse()
            .with_context(|| format!("bad L grid start {a:?}"))?;
        let b: usize = b
            .parse()
            .with_context(|| format!("bad L grid stop {b:?}"))?;
        match step {
            None | Some("+") => (1..)
                .map(|k: usize| 4 * k * k)
                .skip_while(|&l| l < a)
                .take_while(|&l| l <= b)
                .collect(),
            Some(s) => {
                let s: usize = s
                    .parse()
                    .with_context(|| format!("bad L grid step {s:?}"))?;
                if s == 0 {
                    bail!("L grid step must be positive");
                }
                (a..=b).step_by(s).collect()
            }
        }
    } else {
        text.split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .with_context(|| format!("bad length {t:?}"))
            })
            .collect::<Result<Vec<_>>>()?
    };
    if out.is_empty() {
        bail!("L grid {text:?} is empty");
    }
    Ok(out)
}

/// Noise strengths. `a:b:+` (or `a:b`) steps by 0.025.
pub fn parse_probs(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    let out = if text.contains(':') {
        let (a, b, step) = split_range(text).with_context(|| format!("bad p0 grid {text:?}"))?;
        let a: f64 = a
            .parse()
            .with_context(|| format!("bad p0 grid start {a:?}"))?;
        let b: f64 = b
            .parse()
            .with_context(|| format!("bad p0 grid stop {b:?}"))?;
        let s = match step {
            None | Some("+") => P0_STEP,
            Some(s) => s
                .parse()
                .with_context(|| format!("bad p0 grid step {s:?}"))?,
        };
        if !(s > 0.0) || !(b >= a) {
            bail!("p0 grid {text:?} needs start <= stop and a positive step");
        }
        let n = ((b - a) / s + 1e-9).floor() as usize;
        // Rounded so that printed values are the decimal grid points.
        (0..=n)
            .map(|i| ((a + i as f64 * s) * 1e12).round() / 1e12)
            .collect()
    } else {
        text.split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .with_context(|| format!("bad probability {t:?}"))
            })
            .collect::<Result<Vec<_>>>()?
    };
    if let Some(p) = out.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        bail!("probability {p} outside [0, 1]");
    }
    Ok(out)
}
