# # The command-line tool
#
# Everything above is also available as batch commands that write JSON
# lines or CSV plus a manifest for replay. This script drives the entry
# point in-process inside a scratch directory.

import json
import tempfile
from pathlib import Path

from truncated_haar.cli import main, replay

with tempfile.TemporaryDirectory() as tmp:
    data = Path(tmp) / "lam2.jsonl"
    main(["sample", "--lambda", "2", "--n", "50", "--samples", "40", "--seed", "11", "--workers", "4",
          "--out", str(data)])
    print("records written:", len(data.read_text().splitlines()))
    print("replay with one worker identical:", replay(str(data) + ".manifest.json", workers=1))

    report = Path(tmp) / "report.json"
    main(["compare", str(data), "--lambda", "2", "--out", str(report)])
    summary = json.loads(report.read_text())
    print("KS:", summary["ks_distance"], " E|z|^2:", summary["abs2_moment"], "vs", summary["abs2_moment_theory"])

    table = Path(tmp) / "mu0.csv"
    main(["equilibrium", "--lambda", "2", "--grid-size", "1024", "--format", "csv", "--out", str(table)])
    main(["rate", str(table), "--lambda", "2"])
    main(["constants", "--lambda", "2", "--n", "250", "500", "1000"])
