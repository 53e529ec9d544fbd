#!/usr/bin/env python3
"""Generate data/heart.csv, a deterministic synthetic sample dataset.

The file mimics the column layout and class-conditional statistics of the
public Heart Failure Prediction dataset (918 rows, 11 feature columns plus
a binary HeartDisease target) so that the toolkit can be exercised without
redistributing the original data. Real CSVs with the same header drop in
unchanged.
"""

import argparse
import numpy as np

N_POS = 508
N_NEG = 410

CHEST_PAIN = ["TA", "ATA", "NAP", "ASY"]
RESTING_ECG = ["Normal", "ST", "LVH"]
ST_SLOPE = ["Up", "Flat", "Down"]


def sample_class(rng, n, positive):
    if positive:
        age = rng.normal(54.5, 9.0, n)
        resting_bp = rng.normal(138.0, 18.0, n)
        chol_zero = rng.random(n) < 0.27
        chol = rng.normal(256.0, 62.0, n)
        max_hr = rng.normal(133.0, 24.0, n)
        oldpeak_zero = rng.random(n) < 0.12
        oldpeak = rng.normal(1.8, 1.0, n)
        cp = rng.choice(CHEST_PAIN, n, p=[0.08, 0.17, 0.20, 0.55])
        fasting = (rng.random(n) < 0.40).astype(int)
        ecg = rng.choice(RESTING_ECG, n, p=[0.58, 0.22, 0.20])
        slope = rng.choice(ST_SLOPE, n, p=[0.15, 0.75, 0.10])
        sex = np.where(rng.random(n) < 0.90, "M", "F")
        angina = np.where(rng.random(n) < 0.62, "Y", "N")
    else:
        age = rng.normal(52.0, 9.4, n)
        resting_bp = rng.normal(128.0, 16.0, n)
        chol_zero = rng.random(n) < 0.05
        chol = rng.normal(222.0, 64.0, n)
        max_hr = rng.normal(143.0, 24.0, n)
        oldpeak_zero = rng.random(n) < 0.55
        oldpeak = rng.normal(0.5, 0.6, n)
        cp = rng.choice(CHEST_PAIN, n, p=[0.08, 0.27, 0.27, 0.38])
        fasting = (rng.random(n) < 0.10).astype(int)
        ecg = rng.choice(RESTING_ECG, n, p=[0.64, 0.17, 0.19])
        slope = rng.choice(ST_SLOPE, n, p=[0.78, 0.19, 0.03])
        sex = np.where(rng.random(n) < 0.65, "M", "F")
        angina = np.where(rng.random(n) < 0.14, "Y", "N")

    age = np.clip(np.rint(age), 28, 77).astype(int)
    resting_bp = np.clip(np.rint(resting_bp), 90, 200).astype(int)
    chol = np.clip(np.rint(chol), 85, 603).astype(int)
    chol[chol_zero] = 0
    max_hr = np.clip(np.rint(max_hr), 60, 202).astype(int)
    oldpeak = np.clip(np.round(oldpeak, 1), -2.6, 6.2)
    oldpeak[oldpeak_zero] = 0.0
    oldpeak = oldpeak + 0.0  # normalize -0.0

    rows = []
    label = 1 if positive else 0
    for i in range(n):
        rows.append(
            (
                age[i],
                sex[i],
                cp[i],
                resting_bp[i],
                chol[i],
                fasting[i],
                ecg[i],
                max_hr[i],
                angina[i],
                oldpeak[i],
                slope[i],
                label,
            )
        )
    return rows


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default="data/heart.csv")
    parser.add_argument("--seed", type=int, default=20240615)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    rows = sample_class(rng, N_POS, True) + sample_class(rng, N_NEG, False)
    order = rng.permutation(len(rows))

    header = (
        "Age,Sex,ChestPainType,RestingBP,Cholesterol,FastingBS,"
        "RestingECG,MaxHR,ExerciseAngina,Oldpeak,ST_Slope,HeartDisease"
    )
    with open(args.out, "w") as fh:
        fh.write(header + "\n")
        for idx in order:
            r = rows[idx]
            fh.write(
                f"{r[0]},{r[1]},{r[2]},{r[3]},{r[4]},{r[5]},{r[6]},"
                f"{r[7]},{r[8]},{r[9]:.1f},{r[10]},{r[11]}\n"
            )
    print(f"wrote {len(rows)} rows to {args.out}")


if __name__ == "__main__":
    main()
