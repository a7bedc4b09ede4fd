"""
gidecomp: cutting triangulated 3-manifolds along normal surfaces into
patterned guts and I-bundles, with the Seifert / JSJ homology arithmetic
needed to run finiteness-style censuses.
"""

__version__ = "0.1.0"

from .triangulation import (Triangulation, ValidationReport,
                            parse_triangulation, validate)
from .normal import (NormalSurfaceVector, SurfaceComplex, build_surface,
                     enumerate_admissible, is_admissible, matching_matrix,
                     parse_surface, strip_vertex_linking, vertex_link)
