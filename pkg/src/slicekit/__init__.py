"""Network-slice allocation toolkit.

Subpackages: :mod:`slicekit.domain` and :mod:`slicekit.scenario` for data,
:mod:`slicekit.ilp` for the exact solver, :mod:`slicekit.llm` and
:mod:`slicekit.similarity` for model-driven assignment and judgments,
:mod:`slicekit.evaluation` for metrics, and :mod:`slicekit.cli` on top.
"""

__version__ = "0.1.0"
