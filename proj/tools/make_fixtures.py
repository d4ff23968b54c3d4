#!/usr/bin/env python3
"""Regenerates the synthetic fixtures under data/.

kdd_sample_1000.csv  KDD-Cup-99 formatted records (41 features + label).
                     Synthetic: shaped like the archive, not drawn from it.
blobs.csv(.json)     Two 5-D Gaussian blobs plus uniform outliers, in the
                     numeric dataset format read by `nids`.
"""
import json
import pathlib
import random

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"


def rate(rng, lo=0.0, hi=1.0):
    return round(rng.uniform(lo, hi), 2)


def record(rng, kind):
    # duration, protocol, service, flag, src_bytes, dst_bytes, land,
    # wrong_fragment, urgent, hot, num_failed_logins, logged_in, ...
    f = [0] * 41
    label = kind
    if kind == "normal":
        service = rng.choice(["http", "http", "http", "smtp", "ftp_data", "domain_u", "private"])
        proto = "udp" if service in ("domain_u", "private") else "tcp"
        f[0] = rng.choice([0, 0, 0, rng.randint(1, 300)])
        f[1], f[2], f[3] = proto, service, "SF"
        f[4] = rng.randint(100, 2000)
        f[5] = rng.randint(0, 20000)
        f[11] = 1 if proto == "tcp" else 0
        f[22] = rng.randint(1, 30)
        f[23] = rng.randint(1, 40)
        f[28] = rate(rng, 0.8, 1.0)
        f[29] = rate(rng, 0.0, 0.1)
        f[31] = rng.randint(10, 255)
        f[32] = rng.randint(10, 255)
        f[33] = rate(rng, 0.7, 1.0)
        f[34] = rate(rng, 0.0, 0.05)
        f[35] = rate(rng, 0.0, 0.1)
    elif kind == "smurf":
        f[1], f[2], f[3] = "icmp", "ecr_i", "SF"
        f[4] = rng.choice([520, 1032])
        f[22] = f[23] = 511
        f[28] = 1.0
        f[31] = f[32] = 255
        f[33] = 1.0
        f[35] = 1.0
    elif kind == "neptune":
        f[1], f[2], f[3] = "tcp", rng.choice(["private", "other", "telnet"]), "S0"
        f[22] = rng.randint(100, 250)
        f[23] = rng.randint(5, 20)
        f[24] = f[25] = 1.0
        f[28] = rate(rng, 0.0, 0.1)
        f[29] = rate(rng, 0.05, 0.1)
        f[31] = 255
        f[32] = rng.randint(1, 20)
        f[33] = rate(rng, 0.0, 0.1)
        f[37] = f[38] = 1.0
    elif kind == "ipsweep":
        f[1], f[2], f[3] = "icmp", "eco_i", "SF"
        f[4] = 18
        f[22] = 1
        f[23] = rng.randint(1, 10)
        f[28] = 1.0
        f[30] = 1.0
        f[31] = rng.randint(1, 100)
        f[32] = rng.randint(1, 50)
        f[33] = 1.0
        f[35] = 1.0
        f[36] = rate(rng, 0.3, 0.6)
    elif kind == "portsweep":
        f[0] = rng.choice([0, rng.randint(1, 20000)])
        f[1], f[2], f[3] = "tcp", "private", "REJ"
        f[22] = 1
        f[23] = 1
        f[26] = f[27] = 1.0
        f[28] = 1.0
        f[31] = rng.randint(1, 255)
        f[32] = 1
        f[34] = rate(rng, 0.5, 1.0)
        f[35] = 1.0
        f[39] = f[40] = rate(rng, 0.5, 1.0)
    elif kind == "guess_passwd":
        f[1], f[2], f[3] = "tcp", "telnet", "RSTO"
        f[0] = rng.randint(1, 5)
        f[4] = 125
        f[5] = 179
        f[10] = 1
        f[22] = f[23] = 1
        f[26] = f[27] = 1.0
        f[28] = 1.0
        f[31] = rng.randint(1, 100)
        f[32] = rng.randint(1, 10)
        f[39] = f[40] = rate(rng, 0.5, 1.0)
    elif kind == "warezclient":
        f[1], f[2], f[3] = "tcp", "ftp_data", "SF"
        f[0] = rng.randint(10, 3000)
        f[4] = rng.randint(200000, 2000000)
        f[9] = rng.randint(10, 30)
        f[11] = 1
        f[21] = 1
        f[22] = f[23] = rng.randint(1, 3)
        f[28] = 1.0
        f[31] = rng.randint(1, 50)
        f[32] = rng.randint(1, 50)
        f[33] = 1.0
    elif kind == "buffer_overflow":
        f[1], f[2], f[3] = "tcp", "telnet", "SF"
        f[0] = rng.randint(60, 300)
        f[4] = rng.randint(1500, 2500)
        f[5] = rng.randint(3000, 9000)
        f[9] = rng.randint(1, 3)
        f[11] = 1
        f[12] = rng.randint(1, 3)
        f[13] = 1
        f[16] = rng.randint(0, 2)
        f[17] = 1
        f[22] = f[23] = 1
        f[28] = 1.0
        f[31] = rng.randint(1, 5)
        f[32] = rng.randint(1, 5)
        f[33] = 1.0
    else:
        raise ValueError(kind)
    return ",".join(str(v) for v in f) + "," + label + "."


def kdd_sample():
    rng = random.Random(1999)
    kinds = (["normal"] * 790 + ["smurf"] * 110 + ["neptune"] * 45 + ["ipsweep"] * 15 +
             ["portsweep"] * 15 + ["guess_passwd"] * 8 + ["warezclient"] * 12 +
             ["buffer_overflow"] * 5)
    rng.shuffle(kinds)
    lines = [record(rng, k) for k in kinds]
    (DATA / "kdd_sample_1000.csv").write_text("\n".join(lines) + "\n")


def blobs():
    rng = random.Random(2013)
    rows = []
    # Centres 10 apart along x0; outliers fill the blobs' bounding box padded by 5.
    for center in (0.0, 10.0):
        for _ in range(475):
            rows.append(("normal", "normal",
                         [rng.gauss(center if j == 0 else 0.0, 0.5) for j in range(5)]))
    box = [(-5.0, 15.0)] + [(-5.0, 5.0)] * 4
    for _ in range(50):
        rows.append(("outlier", "probe", [rng.uniform(lo, hi) for lo, hi in box]))
    cols = [f"x{j}" for j in range(5)]
    out = ["row_id,label,category," + ",".join(cols)]
    for i, (label, cat, xs) in enumerate(rows):
        out.append(f"{i},{label},{cat}," + ",".join(repr(x) for x in xs))
    (DATA / "blobs.csv").write_text("\n".join(out) + "\n")
    meta = {
        "format": "nids-numeric-dataset",
        "version": 1,
        "rows": len(rows),
        "cols": len(cols),
        "has_labels": True,
        "columns": [{"name": c, "source": c, "kind": "numeric"} for c in cols],
        "provenance": {"generator": "tools/make_fixtures.py", "seed": 2013},
    }
    (DATA / "blobs.csv.json").write_text(json.dumps(meta, indent=2) + "\n")


if __name__ == "__main__":
    kdd_sample()
    blobs()
