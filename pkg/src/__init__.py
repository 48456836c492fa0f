"""
circloyd

Lloyd quantization dynamics on the circle:
- Voronoi cells, centroids and the Lloyd map for uniform and von Mises sources
- Circulant linearization at the equally spaced quantizer
- Flip-bifurcation stability test and critical concentration search
- Lyapunov spectra by QR re-orthonormalization
- Stability-aware Lloyd iteration (SALA)
- Batch experiments with CSV/JSON/SVG output
"""

__version__ = "0.1.0"
