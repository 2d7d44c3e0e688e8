"""Regenerate the bundled synthetic benthic-stack fixture.

The bundled record is a synthetic stand-in for a 3 Myr benthic
oxygen-isotope stack, built so that the standard scalar pipeline
(Q=5, lag=10, step=7, K=7 on the 1 kyr interpolated series) lands inside the
published eigenvalue and period bands it is tested against:

* a monotone secular trend rising toward the present,
* a ~41 kyr obliquity-band oscillation whose amplitude is concentrated
  before 2000 kyr ago and decays across the mid-record transition,
* a ~100 kyr eccentricity-band oscillation confined to the most recent
  ~1100 kyr (generator period 94 kyr: kernel smoothing biases the recovered
  period upward by a few percent, so the generator compensates),
* mild AR(1) noise, which sets the trend eigenvalue's decay.

Sampling is nonuniform on purpose (1 kyr to 600 ka, 2 kyr to 1500 ka,
2.5 kyr to 3000 ka) to exercise the interpolation path.  Deterministic:
regenerating overwrites the committed file byte for byte.

Usage: python tools/make_benthic_fixture.py [output_path]
"""

import pathlib
import sys

import numpy as np

TWO_PI = 2.0 * np.pi

TREND_BASE = 3.15
TREND_SPAN = 0.55
TREND_MID = 1400.0
TREND_WIDTH = 900.0
OBLIQUITY_PERIOD = 40.78
OBLIQUITY_AMP = 0.40
OBLIQUITY_FLOOR = 0.05
OBLIQUITY_MID = 1500.0
OBLIQUITY_WIDTH = 250.0
ECCENTRICITY_PERIOD = 94.0
ECCENTRICITY_AMP = 0.55
ECCENTRICITY_FLOOR = 0.02
ECCENTRICITY_MID = 1100.0
ECCENTRICITY_WIDTH = 150.0
NOISE_SCALE = 0.15
NOISE_AR = 0.7
SEED = 12345


def logistic(z):
    return 1.0 / (1.0 + np.exp(-z))


def build():
    ages = np.concatenate([
        np.arange(0.0, 600.0, 1.0),
        np.arange(600.0, 1500.0, 2.0),
        np.arange(1500.0, 3000.0 + 1e-9, 2.5),
    ])
    trend = TREND_BASE + TREND_SPAN * np.tanh((TREND_MID - ages) / TREND_WIDTH)
    amp41 = OBLIQUITY_AMP * logistic((ages - OBLIQUITY_MID) / OBLIQUITY_WIDTH) + OBLIQUITY_FLOOR
    amp100 = (ECCENTRICITY_AMP * logistic((ECCENTRICITY_MID - ages) / ECCENTRICITY_WIDTH)
              + ECCENTRICITY_FLOOR)
    values = (trend
              + amp41 * np.cos(TWO_PI * ages / OBLIQUITY_PERIOD + 0.7)
              + amp100 * np.cos(TWO_PI * ages / ECCENTRICITY_PERIOD + 2.1))
    rng = np.random.default_rng(SEED)
    noise = np.empty(len(ages))
    e = 0.0
    # AR(1) marched in forward time, i.e. from the oldest sample backwards
    # through the (age-ascending) array
    for i in range(len(ages) - 1, -1, -1):
        e = NOISE_AR * e + rng.normal(0.0, 1.0)
        noise[i] = e
    values = values + NOISE_SCALE * np.sqrt(1.0 - NOISE_AR ** 2) * noise
    errors = 0.02 + 0.01 * rng.random(len(ages))
    return ages, values, errors


def main():
    default = pathlib.Path(__file__).resolve().parent.parent / (
        "src/spectrend/datasets/benthic_stack.txt")
    out = pathlib.Path(sys.argv[1]) if len(sys.argv) > 1 else default
    ages, values, errors = build()
    lines = [
        "# synthetic benthic oxygen-isotope style stack (see tools/make_benthic_fixture.py)",
        "# columns: age_kyr value_permil error_permil",
    ]
    for a, v, e in zip(ages, values, errors):
        lines.append(f"{a:.1f} {v:.5f} {e:.3f}")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(lines) + "\n")
    print(f"wrote {len(ages)} samples to {out}")


if __name__ == "__main__":
    main()
