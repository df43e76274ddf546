"""Drive the command-line interface from Python: run a config, then build a histogram."""
import tempfile
from pathlib import Path

from balancedbo.cli import main

here = Path(__file__).parent
with tempfile.TemporaryDirectory() as out:
    assert main(["run", "--config", str(here / "toy.json"), "--seeds", "0,1", "--out", out]) == 0
    main(["histogram", "--traces", f"{out}/traces/*.csv", "--out", f"{out}/hist.csv"])
    print(Path(out, "hist.csv").read_text())
    print(Path(out, "summary.json").read_text()[:400])
