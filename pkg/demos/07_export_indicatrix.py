"""Export indicatrices as OBJ meshes for inspection in any mesh viewer.

The trifocal body |w + b| + |w| + |w - b| <= c is a smooth strictly convex
body whose gauge is found by a safeguarded Newton iteration along each ray.
"""

import sys
from pathlib import Path

import numpy as np

from finsler_lab import SphericalQuadratureRule, TrifocalMetric, make_metric
from finsler_lab.report import indicatrix_mesh, write_obj

out = Path(sys.argv[1] if len(sys.argv) > 1 else "out")
rule = SphericalQuadratureRule(24, 48)
for name, metric in (("trifocal", TrifocalMetric((0.0, 0.0, 0.8), 3.0)), ("quartic", make_metric("quartic", eps=2.0))):
    verts, faces = indicatrix_mesh(metric, np.zeros(3), rule)
    path = write_obj(verts, faces, out / f"{name}.obj", f"{name} indicatrix at the origin")
    extent = verts.max(axis=0) - verts.min(axis=0)
    print(f"{path}: {len(verts)} vertices, {len(faces)} faces, extent {np.round(extent, 4)}")
