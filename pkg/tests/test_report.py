from __future__ import annotations

from pathlib import Path

from gsptorsion.report import render
from gsptorsion.suites import RunConfig, run_suite


def test_render_writes_pngs(tmp_path):
    for name in ("prs", "abel"):
        rep = run_suite(name, RunConfig(seed=3, trials=20))
        paths = render(rep, tmp_path)
        assert paths
        for p in paths:
            data = Path(p).read_bytes()
            assert data[:8] == b"\x89PNG\r\n\x1a\n" and len(data) > 1000
