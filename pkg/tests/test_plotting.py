import xml.etree.ElementTree as ET

import numpy as np
import pytest

from phgrasp.plotting import line_plot, nice_ticks


def test_nice_ticks_cover_range():
    ticks = nice_ticks(0.03, 2.87)
    assert ticks[0] <= 0.03 and ticks[-1] >= 2.87
    steps = np.diff(ticks)
    assert np.allclose(steps, steps[0])
    mant = steps[0] / 10 ** np.floor(np.log10(steps[0]))
    assert round(mant, 9) in (1.0, 2.0, 5.0)


def test_nice_ticks_degenerate_range():
    ticks = nice_ticks(0.2, 0.2)
    assert ticks[0] < 0.2 < ticks[-1]
    with pytest.raises(ValueError):
        nice_ticks(0.0, float("inf"))


def test_line_plot_is_valid_svg():
    t = np.linspace(0, 1, 50)
    svg = line_plot([("a<b", t, t ** 2), ("c", t, np.where(t > 0.5, np.nan, t))],
                    title="T", xlabel="x", ylabel="y", hlines=[("ref", 0.2)])
    root = ET.fromstring(svg)
    ns = "{http://www.w3.org/2000/svg}"
    lines = root.findall(f"{ns}polyline")
    assert len(lines) == 2
    assert len(lines[1].get("points").split()) == 25
    assert "a&lt;b" in svg
    assert any(e.get("stroke-dasharray") for e in root.findall(f"{ns}line"))


def test_line_plot_rejects_empty():
    with pytest.raises(ValueError):
        line_plot([])
    with pytest.raises(ValueError):
        line_plot([("x", [np.nan], [np.nan])])
