"""Symbolic complexity formulas and comparison tables.

Formulas are stored as strings over a fixed parameter alphabet and evaluated
with every hidden constant set to 1 and natural logarithms throughout.  The
registry carries the query-complexity rows used by the reporting layer, keyed
by author-year tag for published baselines.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from functools import lru_cache

import sympy

from .errors import ConfigError, NonPositiveParameter, UnboundSymbol

FOOTER = "unit constants = 1; log = natural log"

_SYMBOL_NAMES = (
    "m", "n", "s", "kappa", "eps", "Delta", "gamma", "r", "t",
    "normF", "M", "N", "d", "k", "K", "beta", "T_U",
)

_SYMBOLS = {name: sympy.Symbol(name, positive=True) for name in _SYMBOL_NAMES}
_SYMBOLS["E"] = sympy.E
_SYMBOLS["log"] = sympy.log
_SYMBOLS["exp"] = sympy.exp
_SYMBOLS["sqrt"] = sympy.sqrt


@dataclass(frozen=True)
class CostFormula:
    """A named query-complexity expression with its provenance string."""

    name: str
    expression: str
    source: str

    def to_json(self) -> dict:
        return {"name": self.name, "expression": self.expression, "source": self.source}

    @staticmethod
    def from_json(payload: dict) -> "CostFormula":
        return CostFormula(
            name=str(payload["name"]),
            expression=str(payload["expression"]),
            source=str(payload["source"]),
        )


@lru_cache(maxsize=256)
def _parse(expression: str):
    try:
        expr = sympy.sympify(expression, locals=dict(_SYMBOLS), rational=False)
    except (sympy.SympifyError, SyntaxError, TypeError) as exc:
        raise ConfigError(f"cannot parse cost expression {expression!r}: {exc}") from None
    return expr


def evaluate(formula: CostFormula, params: dict) -> float:
    """Evaluate a formula at a positive parameter assignment.

    Every free symbol must be bound; binding extra parameters is allowed.
    """
    expr = _parse(formula.expression)
    free = {str(sym) for sym in expr.free_symbols}
    missing = sorted(free - set(params))
    if missing:
        raise UnboundSymbol(
            f"formula {formula.name!r} needs values for: {', '.join(missing)}"
        )
    subs = {}
    for name in free:
        value = float(params[name])
        if not math.isfinite(value) or value <= 0.0:
            raise NonPositiveParameter(f"parameter {name!r} must be positive, got {value}")
        subs[_SYMBOLS[name]] = sympy.Float(value)
    return float(expr.evalf(subs=subs))


def render_table(rows: list, params: dict) -> dict:
    """Evaluate rows at shared parameters and report ratios against row one."""
    out = []
    first = None
    for row in rows:
        value = evaluate(row, params)
        if first is None:
            first = value
        out.append(
            {
                "name": row.name,
                "source": row.source,
                "symbolic": row.expression,
                "value": value,
                "ratio_to_first": value / first,
            }
        )
    return {"rows": out, "footer": FOOTER}


def table_to_json(table: dict) -> str:
    return json.dumps(table, indent=2, sort_keys=True)


def table_to_csv(table: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["name", "source", "symbolic", "value", "ratio_to_first"])
    for row in table["rows"]:
        writer.writerow(
            [row["name"], row["source"], row["symbolic"],
             repr(row["value"]), repr(row["ratio_to_first"])]
        )
    buf.write(f"# {table['footer']}\n")
    return buf.getvalue()


_OURS = "blockenc"

REGISTRY = {
    f.name: f
    for f in (
        # principal components
        CostFormula(
            "pca-power",
            "log(m*n) * normF * log(n/eps)**r * log(1/eps)**r / (Delta**r * gamma**r)",
            _OURS,
        ),
        CostFormula(
            "pca-power-eigenvalues",
            "log(m*n) * normF * log(n/eps)**r * log(1/eps)**r / (eps * Delta**r * gamma**r)",
            _OURS,
        ),
        CostFormula(
            "pca-power-table",
            "log(m*n) * log(n/eps)**2 * log(1/eps)**2 / Delta**2",
            _OURS,
        ),
        CostFormula("pca-gd", "log(m*n) * log(1/eps)**3 / eps**2", _OURS),
        CostFormula("lloyd2014", "log(m*n) / eps**3", "Lloyd, Mohseni, Rebentrost 2014"),
        CostFormula(
            "nghiem2025new",
            "m * log(n) * log(n/eps)**6 / (eps*Delta)**4",
            "Nghiem 2025 (restricted oracle PCA)",
        ),
        CostFormula("tang2021", "1/eps**6 + log(m*n)/eps**4", "Tang 2021"),
        # linear systems
        CostFormula(
            "solver",
            "normF * kappa**2 * log(s*n) * log(kappa**2/eps)**2 * log(1/eps)**2",
            _OURS,
        ),
        CostFormula(
            "solver-psd",
            "normF * kappa**3 * log(s*n) * log(kappa**(3/2)/eps)**2",
            _OURS,
        ),
        CostFormula("harrow2009", "s * kappa * log(n) / eps", "Harrow, Hassidim, Lloyd 2009"),
        CostFormula(
            "childs2017",
            "s * kappa**2 * log(kappa/eps)**(5/2) * (log(n) + log(kappa/eps)**(5/2))",
            "Childs, Kothari, Somma 2017",
        ),
        CostFormula("clader2013", "s**7 * log(n) / eps", "Clader, Jacobs, Sprouse 2013"),
        CostFormula(
            "wossnig2018",
            "kappa**2 * normF * log(n) / eps",
            "Wossnig, Zhao, Prakash 2018",
        ),
        CostFormula(
            "nghiem2025new2",
            "s**2 * (s**2 + log(n)) * log(s/eps)**(7/2) / eps",
            "Nghiem 2025 (sparse-access solver)",
        ),
        # Hamiltonian dynamics
        CostFormula(
            "simulation",
            "log(s*n) * log(1/eps)**2 * (t*normF + log(1/eps)/log(E + log(1/eps)/t))",
            _OURS,
        ),
        CostFormula("simulation-ode", "t**(2 + 2/K) / eps**(2/K) * log(n)", _OURS),
        # ground state
        CostFormula(
            "ite",
            "(normF/gamma) * sqrt(log(n/(eps*gamma))/Delta) * log(n) * log(1/eps)**(5/2)",
            _OURS,
        ),
        CostFormula(
            "prep-power",
            "log(n) * log(n/eps) * log(1/eps) / (Delta*gamma)",
            _OURS,
        ),
        CostFormula("prep-gd", "log(1/eps) * (4/eps) * log(n)", _OURS),
        CostFormula(
            "prep-ite",
            "(normF/gamma) * sqrt(log(n/(gamma**2*eps))/Delta) * log(n) * log(1/eps)**(7/2)",
            _OURS,
        ),
        CostFormula(
            "energy-power",
            "log(n) * log(1/(eps*gamma)) * log(1/eps) / (Delta*gamma*eps)",
            _OURS,
        ),
        CostFormula("energy-gd", "log(n) * log(1/eps) / eps**2", _OURS),
        CostFormula("dong2022", "T_U / (gamma**2 * eps)", "Dong, Tong, Lin 2022"),
        CostFormula(
            "lin2020",
            "T_U * log(1/eps) * log(1/gamma) / (gamma*eps)",
            "Lin, Tong 2020",
        ),
        CostFormula(
            "motta2020",
            "log(n/(eps*gamma))/Delta * exp(log(2*sqrt(2)*log(n/(eps*gamma))/(Delta*eps)))",
            "Motta et al. 2020",
        ),
        # data fitting
        CostFormula("data-fit", "normF * log(M*N) * kappa**2 * log(1/eps)**2", _OURS),
        CostFormula(
            "data-fit-predict",
            "normF * log(M*N) * kappa**2 * log(1/eps)**2 / eps",
            _OURS,
        ),
        CostFormula("wiebe2012", "kappa**3 * s**6 * log(M*N) / eps", "Wiebe, Braun, Lloyd 2012"),
    )
}


def get_formula(name: str) -> CostFormula:
    try:
        return REGISTRY[name]
    except KeyError:
        known = ", ".join(sorted(REGISTRY))
        raise ConfigError(f"unknown cost formula {name!r}; known: {known}") from None
