"""Plain-text tables for convergence studies and parameter sweeps."""

from typing import Any

from jinja2 import BaseLoader, Environment, StrictUndefined, TemplateSyntaxError, UndefinedError

CONVERGENCE_TEMPLATE = """\
# Resonance convergence ({{ obstacle }})
# reference: {{ reference | cnum }}
{{ "%-10s %-5s %-5s %-44s %s" | format("h", "N", "J", "gamma_h", "error") }}
{% set fmt = "%-10s %-5d %-5d %-44s %s" -%}
{% for row in rows -%}
{{ fmt | format(row.h | sig(6), row.N, row.J, row.k | cnum, row.error | sig(6)) }}
{% endfor -%}
{% if slope is not none %}# log-log slope: {{ slope | sig(4) }}
{% endif -%}
"""

SWEEP_TEMPLATE = """\
# Resonance sweep over {{ parameter }} ({{ obstacle }})
{% for entry in entries -%}
{{ parameter }} = {{ entry.value }}
{% for k in entry.resonances %}    {{ k | cnum }}
{% else %}    (none)
{% endfor -%}
{% endfor -%}
"""

QUALITY_TEMPLATE = """\
# Mesh quality
vertices      {{ n_vertices }}
triangles     {{ n_triangles }}
free dofs     {{ d_n }}
h             {{ h | sig(6) }}
C_theta       {{ C_theta | sig(6) }}
worst element {{ worst_element }}
"""


def _sig(value: Any, digits: int = 6) -> str:
    if value is None:
        return "-"
    return f"{float(value):.{digits}g}"


def _cnum(value: Any) -> str:
    if value is None:
        return "-"
    z = complex(value)
    return f"{z.real:.15g}{z.imag:+.15g}i"


def _environment() -> Environment:
    env = Environment(loader=BaseLoader(), autoescape=False, undefined=StrictUndefined)
    env.filters["sig"] = _sig
    env.filters["cnum"] = _cnum
    return env


_env = _environment()


def render(template: str, **context: Any) -> str:
    """
    Render a report template.

    Raises:
        ValueError: If the template is invalid or refers to a missing value.
    """
    try:
        return _env.from_string(template).render(**context)
    except TemplateSyntaxError as e:
        raise ValueError(f"Template syntax error: {e}") from e
    except UndefinedError as e:
        raise ValueError(f"Undefined report value: {e}") from e


def convergence_table(
    obstacle: str,
    rows: list[dict[str, Any]],
    reference: complex | None,
    slope: float | None,
) -> str:
    """Rows carry h, N, J, k and error (None without a reference)."""
    return render(
        CONVERGENCE_TEMPLATE, obstacle=obstacle, rows=rows, reference=reference, slope=slope
    )


def sweep_table(obstacle: str, parameter: str, entries: list[dict[str, Any]]) -> str:
    """Entries carry the swept value and the resonances found for it."""
    return render(SWEEP_TEMPLATE, obstacle=obstacle, parameter=parameter, entries=entries)


def quality_report(**values: Any) -> str:
    return render(QUALITY_TEMPLATE, **values)
