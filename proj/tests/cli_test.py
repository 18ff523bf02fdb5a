"""End-to-end checks of the streamplace command line tool.

Driven by two environment variables:
  CLI_BIN   path to the built binary
  DATA_DIR  directory holding example.json
"""

import json
import os
import subprocess
import sys
import tempfile

CLI = os.environ["CLI_BIN"]
DATA = os.environ["DATA_DIR"]
FIXTURE = os.path.join(DATA, "example.json")

failures = []


def check(name, condition, detail=""):
    tag = "ok" if condition else "FAIL"
    print(f"[{tag}] {name}" + (f": {detail}" if detail and not condition else ""))
    if not condition:
        failures.append(name)


def run(*args, **kwargs):
    return subprocess.run([CLI, *args], capture_output=True, text=True,
                          timeout=120, **kwargs)


def near(a, b, tol=1e-9):
    return abs(a - b) <= tol


# --- help and argument errors ---------------------------------------------
r = run("--help")
check("help exits 0", r.returncode == 0)
check("help lists subcommands",
      all(word in r.stdout for word in
          ("evaluate", "optimize", "sweep", "paths", "validate")))

r = run("evaluate", "--input", FIXTURE, "--no-such-flag")
check("unknown flag exits 1", r.returncode == 1)

r = run()
check("missing subcommand exits 1", r.returncode == 1)

r = run("evaluate", "--input", "/nonexistent/bundle.json")
check("missing input exits 1", r.returncode == 1)
check("missing input is named", "cannot open" in r.stderr)

# --- validate ---------------------------------------------------------------
r = run("validate", "--input", FIXTURE)
check("validate accepts the example", r.returncode == 0 and r.stdout.strip() == "ok")

with open(FIXTURE) as fh:
    doc = json.load(fh)
doc["placement"][1] = [0.9, 0.0, 0.0]
del doc["scenario"]
with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
    json.dump(doc, fh)
    broken = fh.name
r = run("validate", "--input", broken)
check("validate flags a bad row sum", r.returncode == 1 and "row-sum" in r.stdout)
r = run("evaluate", "--input", broken)
check("evaluate refuses an invalid bundle",
      r.returncode == 1 and "row-sum" in r.stderr)
os.unlink(broken)

# --- evaluate ---------------------------------------------------------------
r = run("evaluate", "--input", FIXTURE)
check("evaluate exits 0", r.returncode == 0, r.stderr)
check("evaluate prints the edge breakdown",
      "edge 0 -> 1: latency 0.48" in r.stdout and "0.27" in r.stdout)
check("evaluate prints the critical path",
      "critical path: 0 -> 1 -> 2" in r.stdout)
check("evaluate prints the totals",
      "latency: 1.74" in r.stdout and "objective: 1.16" in r.stdout)

r = run("evaluate", "--input", FIXTURE, "--format", "json")
check("evaluate --format json exits 0", r.returncode == 0, r.stderr)
doc = json.loads(r.stdout)
check("json latency", near(doc["latency"], 1.74))
check("json objective", near(doc["objective"], 1.16))
check("json critical path", doc["critical_path"] == [0, 1, 2])
edge01 = next(e for e in doc["edges"] if e["from"] == 0 and e["to"] == 1)
check("json edge breakdown",
      near(edge01["latency"], 0.48)
      and all(near(a, b) for a, b in zip(edge01["per_device_cost"],
                                         [0.48, 0.27, 0.0]))
      and edge01["enabled_links"] == 3)

# --- optimize ---------------------------------------------------------------
outfile = tempfile.NamedTemporaryFile(suffix=".json", delete=False).name
r = run("optimize", "--input", FIXTURE, "--method", "brute",
        "--granularity", "4", "--format", "json", "--out", outfile)
check("optimize exits 0", r.returncode == 0, r.stderr)
doc = json.loads(r.stdout)
check("optimize reports the method", doc["method"] == "brute_force")
check("optimize finds the co-located optimum", doc["objective"] == 0.0)
check("optimize picks the cheaper scenario level",
      doc["level_index"] == 0 and doc["dq_fraction"] == 0.5)
check("optimize placement rows are distributions",
      all(near(sum(row), 1.0) for row in doc["placement"]))
with open(outfile) as fh:
    saved = json.load(fh)
check("optimize --out writes the placement",
      saved.get("placement") == doc["placement"])
os.unlink(outfile)

r = run("optimize", "--input", FIXTURE, "--method", "local", "--seed", "5",
        "--restarts", "4", "--iterations", "100", "--format", "json")
check("local search runs end to end", r.returncode == 0, r.stderr)
doc = json.loads(r.stdout)
check("local search reports its method", doc["method"] == "local_search")
r2 = run("optimize", "--input", FIXTURE, "--method", "local", "--seed", "5",
         "--restarts", "4", "--iterations", "100", "--format", "json")
check("local search is reproducible",
      json.loads(r2.stdout)["placement"] == doc["placement"])

# Oversized exhaustive search must refuse with exit code 2.
big = {
    "operators": [{"id": i, "selectivity": 1.0} for i in range(5)],
    "edges": [[i, i + 1] for i in range(4)],
    "com_cost": [[1.0] * 4 for _ in range(4)],
    "availability": [[True] * 4 for _ in range(5)],
}
with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
    json.dump(big, fh)
    bigfile = fh.name
r = run("optimize", "--input", bigfile, "--method", "brute",
        "--granularity", "10")
check("oversized search exits 2", r.returncode == 2, f"rc={r.returncode}")
check("oversized search explains itself", "candidates" in r.stderr)
os.unlink(bigfile)

# --- sweep ------------------------------------------------------------------
r = run("sweep", "--input", FIXTURE, "--beta", "1,2")
check("sweep exits 0", r.returncode == 0, r.stderr)
lines = r.stdout.strip().splitlines()
check("sweep prints the csv header",
      lines[0] == "beta,dq_fraction,latency,objective,method")
rows = [line.split(",") for line in lines[1:]]
check("sweep emits one row per combination", len(rows) == 4)
wanted = [(1.0, 0.5, 1.16), (1.0, 1.0, 1.185), (2.0, 0.5, 0.87),
          (2.0, 1.0, 0.79)]
ok = all(
    near(float(row[0]), b) and near(float(row[1]), d)
    and near(float(row[3]), f) and row[4] == "fixed"
    for row, (b, d, f) in zip(rows, wanted))
check("sweep reproduces the reference objectives", ok, r.stdout)

csvfile = tempfile.NamedTemporaryFile(suffix=".csv", delete=False).name
r = run("sweep", "--input", FIXTURE, "--beta", "1", "--dq", "0.5",
        "--method", "brute", "--granularity", "4", "--out", csvfile)
check("re-optimizing sweep exits 0", r.returncode == 0, r.stderr)
with open(csvfile) as fh:
    saved = fh.read()
check("sweep --out mirrors stdout", saved == r.stdout)
row = saved.strip().splitlines()[1].split(",")
check("re-optimizing sweep labels its rows", row[4] == "brute_force")
check("re-optimizing sweep beats the fixed placement",
      float(row[3]) <= 1.16 + 1e-9)
os.unlink(csvfile)

r = run("sweep", "--input", FIXTURE, "--beta", "1", "--format", "human")
check("human sweep renders a table",
      r.returncode == 0 and "method" in r.stdout.splitlines()[0])

# --- paths ------------------------------------------------------------------
r = run("paths", "--input", FIXTURE)
check("paths exits 0", r.returncode == 0, r.stderr)
check("paths lists the chain", "path 0 -> 1 -> 2" in r.stdout)
check("paths marks the critical path", "[critical]" in r.stdout)
check("paths counts", "1 path" in r.stdout)

r = run("paths", "--input", FIXTURE, "--format", "json")
doc = json.loads(r.stdout)
check("paths json structure",
      doc["paths"][0]["nodes"] == [0, 1, 2] and doc["paths"][0]["critical"])

print()
if failures:
    print(f"{len(failures)} CLI check(s) failed: {failures}")
    sys.exit(1)
print("all CLI checks passed")
