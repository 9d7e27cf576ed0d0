"""rough-resonance - scattering resonances of rough and fractal obstacles."""

__version__ = "0.1.0"
__all__ = ["__version__"]
