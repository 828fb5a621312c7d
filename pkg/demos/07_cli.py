"""
Command line
============

``expanders build`` writes an edge list plus a JSON manifest,
``expanders verify`` prints a spectral certificate and ``expanders info``
prints basic statistics.  Here the entry point is called in-process.
"""

import tempfile
from pathlib import Path

from expanders.cli import main

out = Path(tempfile.mkdtemp()) / "lps_13_17.txt"

# %%
main(["build", "--method", "lps", "--p", "13", "--q", "17", "--out", str(out)])
print(Path(str(out) + ".manifest.json").read_text())

# %%
main(["verify", str(out)])

# %%
main(["info", str(out)])
