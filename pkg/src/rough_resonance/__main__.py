"""Entry point for python -m rough_resonance."""

from rough_resonance.cli import app

if __name__ == "__main__":
    app()
