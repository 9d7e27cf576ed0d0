"""MCP server for rough-resonance - exposes obstacle and resonance tools."""

from typing import Any

import numpy as np
from mcp.server import FastMCP

from rough_resonance.config import load_run_config
from rough_resonance.geometry import ObstacleSpec, membership
from rough_resonance.pipeline import Pipeline, StageError, resonance_record
from rough_resonance.specfun import hankel_zero as _hankel_zero
from rough_resonance.utils.writers import to_jsonable
from rough_resonance.zerofind import HankelEvaluator, Rect, zero_boxes

# Create the MCP server
mcp = FastMCP(name="rough-resonance")


# =============================================================================
# Geometry Tools
# =============================================================================


@mcp.tool()
def obstacle_membership(
    points: list[list[float]],
    kind: str = "disk",
    radius: float = 0.5,
    level: int = 0,
    scale: float = 0.5,
    c_re: float = 0.0,
    c_im: float = 0.0,
) -> dict[str, Any]:
    """
    Test which points lie in the closed obstacle.

    Args:
        points: List of [x, y] pairs
        kind: Obstacle kind ("disk", "koch" or "julia")
        radius: Disk radius
        level: Koch snowflake level
        scale: Koch circumradius or Julia scale factor
        c_re: Real part of the Julia parameter c
        c_im: Imaginary part of the Julia parameter c

    Returns:
        Dictionary with one boolean per point
    """
    spec = ObstacleSpec(
        kind=kind,  # type: ignore[arg-type]
        radius=radius,
        level=level,
        scale=scale,
        c=complex(c_re, c_im),
    )
    inside = membership(spec, np.asarray(points, dtype=float).reshape(-1, 2))
    return {"inside": [bool(v) for v in np.atleast_1d(inside)]}


# =============================================================================
# Special Function Tools
# =============================================================================


@mcp.tool()
def hankel_zero(order: int = 1, guess_re: float = -0.4, guess_im: float = -0.6) -> dict[str, Any]:
    """
    Refine a zero of the Hankel function H^(1)_order by Newton iteration.

    Args:
        order: Hankel order m >= 0
        guess_re: Real part of the starting point
        guess_im: Imaginary part of the starting point (must be < 0)

    Returns:
        Dictionary with the zero as [re, im]
    """
    zero = _hankel_zero(order, complex(guess_re, guess_im))
    return {"order": order, "zero": [zero.real, zero.imag]}


@mcp.tool()
def certify_hankel_zeros(
    n: int = 4,
    order: int = 1,
    radius: float = 0.5,
    rect: list[float] | None = None,
) -> dict[str, Any]:
    """
    Cover the zeros of k -> H^(1)_order(radius * k) by certified boxes.

    Args:
        n: Accuracy level; kept boxes have diameter <= 2^-n
        order: Hankel order
        radius: Disk radius (the zeros are disk resonances)
        rect: Optional [re_min, re_max, im_min, im_max] restriction

    Returns:
        Certified region as a dictionary (boxes, clusters, bounds)
    """
    region = Rect.from_list(rect) if rect is not None else None
    result = zero_boxes(HankelEvaluator(order=order, scale=radius), n, region)
    return to_jsonable(result.to_dict())


# =============================================================================
# Pipeline Tools
# =============================================================================


@mcp.tool()
def find_resonances(config_path: str, out_dir: str | None = None) -> dict[str, Any]:
    """
    Run mesh, model and minimization for a run configuration.

    Args:
        config_path: Path to a .toml or .yaml run configuration
        out_dir: Output directory (defaults to the configured one)

    Returns:
        Dictionary with the resonances found, or the failing stage and error
    """
    pipeline = Pipeline.create(load_run_config(config_path), out_dir)
    try:
        model = pipeline.model(pipeline.mesh())
        found = pipeline.resonances(model)
    except StageError as e:
        return {"success": False, "stage": e.stage, "error": str(e.cause)}
    return {
        "success": True,
        "resonances": to_jsonable([resonance_record(r) for r in found]),
    }


# =============================================================================
# Server Entry Point
# =============================================================================


def main() -> None:
    """Run the MCP server via stdio transport."""
    import asyncio

    asyncio.run(mcp.run_stdio_async())


if __name__ == "__main__":
    main()
