import glob
import os
import runpy

import pytest

SCRIPTS = sorted(glob.glob(os.path.join(os.path.dirname(__file__), "..", "gallery", "*.py")))


@pytest.mark.parametrize("path", SCRIPTS, ids=[os.path.basename(p) for p in SCRIPTS])
def test_gallery_script_runs(path, capsys):
    runpy.run_path(path, run_name="__main__")
    assert capsys.readouterr().out.strip()
