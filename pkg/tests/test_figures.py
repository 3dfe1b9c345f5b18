import csv
import io

import numpy as np
import pytest
from shapely.geometry import Point

from smoothsmc.bounds import region
from smoothsmc.figures import envelope_csv, region_csv, region_polygons
from smoothsmc.surface import make_surface


def test_region_inside_box_and_layer():
    reg = region(make_surface(2, 2.0), 0.1)
    polys = region_polygons(reg)
    assert polys["region"].within(polys["box"].buffer(1e-12))
    assert polys["region"].within(polys["layer"].buffer(1e-12))
    rng = np.random.default_rng(0)
    for e0, e1 in rng.uniform(-0.3, 0.3, (300, 2)):
        inside = abs(e0) <= 0.05 and abs(e1) <= 0.2 and abs(2 * e0 + e1) <= 0.1
        assert polys["region"].buffer(1e-12).contains(Point(e0, e1)) == inside


def test_region_requires_second_order():
    with pytest.raises(ValueError, match="n = 2"):
        region_polygons(region(make_surface(3, 1.0), 0.1))


def test_region_csv_rings_closed():
    rows = list(csv.DictReader(io.StringIO(region_csv(region(make_surface(2, 1.0), 0.2)))))
    for shape in ("box", "layer", "region"):
        pts = [(r["e0"], r["e1"]) for r in rows if r["shape"] == shape]
        assert len(pts) >= 4 and pts[0] == pts[-1]


def test_envelope_csv(benchmark_runs):
    sc, log = benchmark_runs[0]
    rows = list(csv.reader(io.StringIO(envelope_csv(log, sc.controller.eta))))
    assert rows[0] == ["t", "abs_s_phi", "envelope"]
    body = np.array(rows[1:], dtype=float)
    np.testing.assert_array_equal(body[:, 1], np.abs(log.s_phi))
    assert body[0, 1] == body[0, 2]
