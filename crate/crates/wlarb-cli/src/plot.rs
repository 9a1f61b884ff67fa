//! Optional matplotlib script emission alongside a CSV result.

use std::io;
use std::path::Path;

use crate::commands::Command;

/// Writes `<out>.py` next to the CSV; returns the script path.
pub fn emit(cmd: Command, csv_path: &str) -> io::Result<String> {
    let stem = Path::new(csv_path);
    let script_path = format!("{}.py", stem.display());
    let body = match cmd {
        Command::Shmoo | Command::Breakdown => heatmap(csv_path),
        Command::Mintr => lines(csv_path, "ring_local_nm", "min_tr_nm", Some("dwdm")),
        Command::Ltd => lines(
            csv_path,
            "ring_local_nm",
            "min_tr_nm",
            Some("grid_offset_nm"),
        ),
        Command::Sensitivity => lines(csv_path, "value", "min_tr_nm", None),
        Command::Fsr => lines(csv_path, "fsr_mean_nm", "min_tr_nm", None),
        Command::Sample => scatter(csv_path),
    };
    std::fs::write(&script_path, body)?;
    Ok(script_path)
}

fn heatmap(csv: &str) -> String {
    format!(
        r#"#!/usr/bin/env python3
"""Shmoo heatmap for {csv}. The failure-probability column is the last
float column before `seed` (afp or cafp)."""
import csv
import matplotlib.pyplot as plt

rows = list(csv_reader := csv.DictReader(open({csv:?})))
cols = csv_reader.fieldnames
x_key, y_key = cols[0], cols[1]
val_key = "cafp" if "cafp" in cols else "afp"
xs = sorted({{float(r[x_key]) for r in rows}})
ys = sorted({{float(r[y_key]) for r in rows}})
grid = [[float("nan")] * len(xs) for _ in ys]
for r in rows:
    v = r[val_key]
    grid[ys.index(float(r[y_key]))][xs.index(float(r[x_key]))] = (
        float(v) if v != "" else float("nan")
    )
plt.figure(figsize=(7, 5))
mesh = plt.pcolormesh(xs, ys, grid, shading="nearest", cmap="magma_r", vmin=0.0, vmax=1.0)
plt.colorbar(mesh, label=val_key)
plt.xlabel(x_key)
plt.ylabel(y_key)
plt.title({csv:?})
plt.tight_layout()
plt.savefig({csv:?} + ".png", dpi=150)
print("wrote", {csv:?} + ".png")
"#
    )
}

fn lines(csv: &str, x: &str, y: &str, group: Option<&str>) -> String {
    let group_py = match group {
        Some(g) => format!("{g:?}"),
        None => "None".to_string(),
    };
    format!(
        r#"#!/usr/bin/env python3
"""Line plot for {csv}."""
import csv
import matplotlib.pyplot as plt

rows = list(csv.DictReader(open({csv:?})))
group_key = {group_py}
plt.figure(figsize=(6, 4))
groups = sorted({{r[group_key] for r in rows}}) if group_key else [None]
for g in groups:
    sel = [r for r in rows if group_key is None or r[group_key] == g]
    pts = [(float(r[{x:?}]), float(r[{y:?}])) for r in sel if r[{y:?}] != ""]
    pts.sort()
    plt.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=str(g))
if group_key:
    plt.legend()
plt.xlabel({x:?})
plt.ylabel({y:?})
plt.grid(True, alpha=0.3)
plt.tight_layout()
plt.savefig({csv:?} + ".png", dpi=150)
print("wrote", {csv:?} + ".png")
"#
    )
}

fn scatter(csv: &str) -> String {
    format!(
        r#"#!/usr/bin/env python3
"""Sampled system overview for {csv}: laser lines and ring resonances."""
import csv
import matplotlib.pyplot as plt

rows = list(csv.DictReader(open({csv:?})))
lasers = [float(r["wavelength_nm"]) for r in rows if r["kind"] == "laser"]
rings = [float(r["wavelength_nm"]) for r in rows if r["kind"] == "ring"]
trs = [float(r["tr_nm"]) for r in rows if r["kind"] == "ring"]
plt.figure(figsize=(8, 3))
for w in lasers:
    plt.axvline(w, color="tab:blue", alpha=0.8)
for w, tr in zip(rings, trs):
    plt.axvspan(w, w + tr, color="tab:red", alpha=0.3)
plt.xlabel("wavelength (nm)")
plt.yticks([])
plt.title("lasers (lines) and ring tuning windows (bands)")
plt.tight_layout()
plt.savefig({csv:?} + ".png", dpi=150)
print("wrote", {csv:?} + ".png")
"#
    )
}
