"""
Run stages: obstacle -> mesh -> spectral model -> resonances.

Every command of the CLI is one function here. Stage functions take a
RunConfig and an output directory, write their artifacts and return a
JSON-ready summary. Failures are re-raised as StageError naming the stage.
"""

import time
from collections.abc import Iterator
from contextlib import contextmanager
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any

from rough_resonance.config import ConfigError, RunConfig
from rough_resonance.geometry import ObstacleSpec, ball_polygon, obstacle_polygons
from rough_resonance.logging import get_logger
from rough_resonance.mesh import TriMesh, build_mesh, mesh_quality, save_mesh
from rough_resonance.ntd import SpectralModel, build_model, practical_N, save_model
from rough_resonance.report import convergence_table, quality_report, sweep_table
from rough_resonance.specfun import SpecialFunctionError, hankel_zero
from rough_resonance.utils.cache import ModelCache, model_cache_key
from rough_resonance.utils.parallel import parallel_map
from rough_resonance.utils.writers import write_json
from rough_resonance.zerofind import (
    HankelEvaluator,
    ModelEvaluator,
    RefinementError,
    RefinementLevel,
    ResonanceResult,
    anchored_refinement,
    contour_grid,
    convergence_slope,
    local_minima,
    minimize,
    zero_boxes,
)

logger = get_logger("pipeline")

COMMANDS = ("mesh", "model", "contour", "find", "certify", "converge", "sweep")

# Converged searches closer than this are the same resonance
DUPLICATE_TOLERANCE = 1.0e-6


class StageError(Exception):
    """A failure inside a named pipeline stage; ``cause`` is the original error."""

    def __init__(self, stage: str, cause: Exception) -> None:
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {cause}")


@contextmanager
def stage(name: str) -> Iterator[None]:
    start = time.perf_counter()
    logger.info(f"Stage {name} started")
    try:
        yield
    except StageError:
        raise
    except Exception as e:
        logger.error(f"Stage {name} failed: {e}")
        raise StageError(name, e) from e
    logger.info(f"Stage {name} finished ({time.perf_counter() - start:.2f}s)")


@dataclass
class Pipeline:
    """Shared state of one run: configuration, output directory and model cache."""

    config: RunConfig
    out_dir: Path
    cache: ModelCache

    @classmethod
    def create(cls, config: RunConfig, out_dir: str | Path | None = None) -> "Pipeline":
        runtime = config.runtime
        directory = Path(out_dir) if out_dir is not None else Path(config.output.directory)
        cache = ModelCache(runtime.cache_dir, enabled=runtime.cache)
        return cls(config=config, out_dir=directory, cache=cache)

    @property
    def threads(self) -> int:
        return self.config.runtime.threads

    # -------------------------------------------------------------------------
    # Building blocks
    # -------------------------------------------------------------------------

    def obstacle(self, **overrides: Any) -> ObstacleSpec:
        with stage("obstacle"):
            spec = self.config.obstacle.to_spec(**overrides)
            spec.validate(self.config.geometry.X)
            return spec

    def mesh(self, spec: ObstacleSpec | None = None, h_target: float | None = None) -> TriMesh:
        g = self.config.geometry
        d = self.config.discretization
        h = h_target if h_target is not None else d.h_target
        spec = spec if spec is not None else self.obstacle()
        with stage("mesh"):
            loops = obstacle_polygons(
                spec,
                g.pixel_n,
                g.X,
                max_cells=g.max_cells,
                approximation=g.approximation,
                h_target=h,
            )
            interface = ball_polygon(g.X, g.resolved_m_b(h))
            return build_mesh(loops, interface, h, quality_cap=d.quality_cap)

    def truncation(self, h: float) -> int:
        N = self.config.discretization.N
        return practical_N(h) if N == "auto" else int(N)

    def model(
        self,
        mesh: TriMesh,
        k0: complex | None = None,
        N: int | None = None,
        J: int | None = None,
    ) -> SpectralModel:
        d = self.config.discretization
        k0 = complex(d.k0 if k0 is None else k0)
        N = self.truncation(mesh.h) if N is None else N
        J = min(d.J if J is None else J, mesh.d_n)
        with stage("model"):
            key = model_cache_key(mesh, k0, N, J)
            cached = self.cache.get(key)
            if cached is not None:
                return cached
            model = build_model(mesh, k0, N, J)
            self.cache.put(key, model)
            return model

    def build_level_model(self, mesh: TriMesh, k0: complex, N: int, J: int) -> SpectralModel:
        return self.model(mesh, k0=k0, N=N, J=J)

    def resonances(
        self, model: SpectralModel, threads: int | None = None
    ) -> list[ResonanceResult]:
        """Minimize from the configured seeds, or from the minima of a contour grid."""
        t = self.config.task
        threads = self.threads if threads is None else threads
        seeds = list(t.seeds)
        with stage("find"):
            if not seeds:
                n_re, n_im = t.resolution
                grid = contour_grid(model, t.search_rect, n_re, n_im, threads=threads)
                seeds = local_minima(grid, t.seed_percentile)
                logger.info(f"Seeding {len(seeds)} searches from contour minima")
            results = parallel_map(
                lambda k: minimize(model, k, t.stop, t.max_iter), seeds, threads
            )
        return unique_resonances(results)

    # -------------------------------------------------------------------------
    # Commands
    # -------------------------------------------------------------------------

    def run_mesh(self) -> dict[str, Any]:
        mesh = self.mesh()
        quality = mesh_quality(mesh)
        path = save_mesh(mesh, self.out_dir / "mesh.txt")
        summary = {
            "n_vertices": mesh.n_vertices,
            "n_triangles": mesh.n_triangles,
            "d_n": quality.d_n,
            "h": quality.h,
            "C_theta": quality.C_theta,
            "worst_element": quality.worst_element,
        }
        report = quality_report(**summary)
        (self.out_dir / "mesh_quality.txt").write_text(report, encoding="utf-8")
        return {"mesh": str(path), **summary}

    def run_model(self) -> dict[str, Any]:
        model = self.model(self.mesh())
        path = save_model(model, self.out_dir / "model.json")
        return {"model": str(path), "N": model.N, "J": model.J, "d_n": model.d_n}

    def run_contour(self) -> dict[str, Any]:
        model = self.model(self.mesh())
        t = self.config.task
        n_re, n_im = t.resolution
        with stage("contour"):
            grid = contour_grid(model, t.search_rect, n_re, n_im, threads=self.threads)
            path = grid.to_csv(self.out_dir / "contour.csv")
        return {"contour": str(path), "shape": list(grid.shape), "flagged": grid.n_flagged}

    def run_find(self) -> dict[str, Any]:
        model = self.model(self.mesh())
        found = self.resonances(model)
        document = {
            "resonances": [resonance_record(r) for r in found],
            "model": {"N": model.N, "J": model.J, "k0": model.k0, "d_n": model.d_n},
            "h": model.metadata.get("h"),
        }
        path = write_json(document, self.out_dir / "resonances.json")
        return {"resonances": str(path), "count": len(found)}

    def run_certify(self) -> dict[str, Any]:
        t = self.config.task
        with stage("certify"):
            if t.certify_function == "hankel":
                radius = self.config.obstacle.radius
                evaluator: HankelEvaluator | ModelEvaluator = HankelEvaluator(order=1, scale=radius)
            else:
                evaluator = ModelEvaluator(self.model(self.mesh()))
            region = zero_boxes(evaluator, t.certify_n, t.search_rect, threads=self.threads)
            path = write_json(region.to_dict(), self.out_dir / "certified.json")
        return {
            "certified": str(path),
            "kept": len(region.kept),
            "clusters": len(region.clusters),
            "complete": region.complete,
        }

    def run_converge(self) -> dict[str, Any]:
        t = self.config.task
        d = self.config.discretization
        spec = self.obstacle()
        levels = [
            RefinementLevel(mesh=self.mesh(spec, h), N=self.truncation(h), J=d.J)
            for h in t.h_values
        ]
        try:
            with stage("converge"):
                results = anchored_refinement(
                    levels, d.k0, t.stop, builder=self.build_level_model
                )
        except StageError as e:
            if isinstance(e.cause, RefinementError):
                partial = [resonance_record(r) for r in e.cause.partial]
                document = {"partial": partial, "error": str(e.cause)}
                write_json(document, self.out_dir / "converge.json")
            raise
        reference = disk_reference(spec, results[-1].k) if results else None

        rows = []
        for h, level, result in zip(t.h_values, levels, results, strict=False):
            rows.append(
                {
                    "h_target": h,
                    "h": level.mesh.h,
                    "N": level.N,
                    "J": result.metadata["J"],
                    "k0": result.metadata["k0"],
                    "k": result.k,
                    "error": abs(result.k - reference) if reference is not None else None,
                    "iterations": result.iterations,
                }
            )
        errors = [row["error"] for row in rows]
        slope = None
        if reference is not None and len(rows) >= 2 and all(e and e > 0 for e in errors):
            slope = convergence_slope([row["h"] for row in rows], errors)

        document = {"obstacle": spec.kind, "reference": reference, "rows": rows, "slope": slope}
        path = write_json(document, self.out_dir / "converge.json")
        table = convergence_table(spec.kind, rows, reference, slope)
        (self.out_dir / "converge.txt").write_text(table, encoding="utf-8")
        return {"converge": str(path), "slope": slope, "levels": len(rows)}

    def run_sweep(self) -> dict[str, Any]:
        o = self.config.obstacle
        t = self.config.task
        if o.kind == "julia":
            parameter = "q"
            overrides = [(q, {"c": q * complex(-1.0, 0.2)}) for q in t.q_values]
        elif o.kind == "koch":
            parameter = "level"
            overrides = [(level, {"level": level}) for level in t.koch_levels]
        else:
            cause = ConfigError(
                f"sweep needs a julia or koch obstacle, got {o.kind}", "obstacle.kind"
            )
            raise StageError("sweep", cause)

        def run_entry(item: tuple[Any, dict[str, Any]]) -> dict[str, Any]:
            value, change = item
            spec = self.obstacle(**change)
            model = self.model(self.mesh(spec))
            found = self.resonances(model, threads=1)
            return {
                "value": value,
                "resonances": [r.k for r in found],
                "records": [resonance_record(r) for r in found],
                "N": model.N,
                "h": model.metadata.get("h"),
            }

        entries = parallel_map(run_entry, overrides, self.threads)
        document = {"obstacle": o.kind, "parameter": parameter, "entries": entries}
        path = write_json(document, self.out_dir / "sweep.json")
        (self.out_dir / "sweep.txt").write_text(
            sweep_table(o.kind, parameter, entries), encoding="utf-8"
        )
        return {"sweep": str(path), "entries": len(entries)}

    def run(self, command: str) -> dict[str, Any]:
        """Dispatch one command."""
        if command not in COMMANDS:
            raise StageError("run", ValueError(f"Unknown command: {command}"))
        self.out_dir.mkdir(parents=True, exist_ok=True)
        handler = getattr(self, f"run_{command}")
        result: dict[str, Any] = handler()
        return result


# =============================================================================
# Helpers
# =============================================================================


def resonance_record(result: ResonanceResult) -> dict[str, Any]:
    return {
        "k": result.k,
        "residual": result.residual,
        "log_abs": result.log_abs,
        "iterations": result.iterations,
        "converged": result.converged,
        "multiplicity": result.multiplicity,
        "seed": result.trail[0],
        **({"provenance": result.metadata} if result.metadata else {}),
    }


def unique_resonances(results: list[ResonanceResult]) -> list[ResonanceResult]:
    """Converged results without duplicates, ordered by real then imaginary part."""
    kept: list[ResonanceResult] = []
    for result in results:
        if not result.converged:
            continue
        if any(abs(result.k - other.k) < DUPLICATE_TOLERANCE for other in kept):
            continue
        kept.append(result)
    return sorted(kept, key=lambda r: (round(r.k.real, 12), round(r.k.imag, 12)))


def disk_reference(spec: ObstacleSpec, near: complex, max_order: int = 4) -> complex | None:
    """
    Closest exact resonance of a centred disk: a zero of H^(1)_m(k r) for m <= max_order.

    Returns None for other obstacles or when no zero is found.
    """
    if spec.kind != "disk" or spec.center != (0.0, 0.0):
        return None
    r = spec.radius
    best: complex | None = None
    for m in range(max_order + 1):
        try:
            zero = hankel_zero(m, near * r) / r
        except SpecialFunctionError:
            continue
        if best is None or abs(zero - near) < abs(best - near):
            best = zero
    return best


def with_overrides(config: RunConfig, **runtime: Any) -> RunConfig:
    """Copy of config with runtime fields replaced (CLI flags)."""
    values = {key: value for key, value in runtime.items() if value is not None}
    return replace(config, runtime=replace(config.runtime, **values))
