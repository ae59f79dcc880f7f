# %% [markdown]
# The command line front end. Every command prints versioned JSON; exit codes
# are 0 ok, 2 parse, 3 precondition, 4 undetermined, 5 divergence.

# %%
import json
import subprocess
import sys
import tempfile
from pathlib import Path

from singfol.cli import corpus_dir

C = corpus_dir()


def singfol(*args):
    proc = subprocess.run([sys.executable, "-m", "singfol", *map(str, args)], capture_output=True, text=True)
    return proc.returncode, proc.stdout, proc.stderr


# %%
code, out, _ = singfol("fiber-dim", C / "F1.fol", "--point", "0,0")
print(code, json.loads(out)["fiber_dim"])

# %%
code, out, _ = singfol("report", C / "gl2.fol", "--point", "0,0", "--compare", C / "sl2.fol")
print(json.loads(out)["comparison"])

# %% [markdown]
# Constructions can emit .fol text directly.

# %%
code, out, _ = singfol("push", C / "cylinder_big.fol", "--drop", "th", "--format", "fol")
print(out)

# %% [markdown]
# Errors: a float point where an exact one is needed, and a syntax error.

# %%
print(singfol("fiber-dim", C / "F0.fol", "--point", "0.5,0")[::2])
with tempfile.TemporaryDirectory() as d:
    bad = Path(d) / "bad.fol"
    bad.write_text("vars x y\ngenerator x*dz\n")
    code, out, err = singfol("involutive", bad)
    print(code, json.loads(out)["error"])

# %%
code, out, _ = singfol("corpus", "--jobs", "2")
for e in json.loads(out)["entries"]:
    print(e["file"], {k: v for k, v in e.items() if k in ("fiber_dim_at_origin", "regularity", "passed")})
