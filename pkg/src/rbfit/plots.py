"""Figure rendering for the report-producing commands.

Each report path can drop PNG figures next to its JSON/CSV output: the
translation sweep gets a condition-number plot (raw vs normalized pipeline)
and the quadratic growth of the largest tail-product entry; single-run
diagnostics get the singular-value spectrum and, for sparse assemblies, the
nonzero pattern of the kernel block.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["save_translation_figures", "save_diagnostics_figures"]


def _finalize(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_translation_figures(records, report_path) -> list[Path]:
    """Render the translation-sweep figures next to the JSON report.

    Returns the written paths (``<stem>_condition.png`` and
    ``<stem>_ptp_growth.png``).
    """
    base = Path(report_path)
    offsets = np.array([r.offset for r in records])
    cond_raw = np.array([r.cond_raw for r in records])
    cond_norm = np.array([r.cond_normalized for r in records])
    max_ptp = np.array([r.max_ptp_entry for r in records])
    written = []

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(offsets, cond_raw, "o-", label="raw assembly")
    ax.plot(offsets, cond_norm, "s--", label="normalized assembly")
    ax.set_xscale("symlog", linthresh=1.0)
    ax.set_yscale("log")
    ax.set_xlabel("translation offset")
    ax.set_ylabel(r"$\kappa_2$ of augmented matrix")
    ax.set_title("Conditioning under rigid translation")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    written.append(_finalize(fig, base.with_name(base.stem + "_condition.png")))

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(offsets, max_ptp, "o-", color="tab:red")
    ax.set_xscale("symlog", linthresh=1.0)
    ax.set_yscale("log")
    ax.set_xlabel("translation offset")
    ax.set_ylabel(r"max $|P^T P|$ entry")
    ax.set_title("Quadratic entry growth of the tail product")
    ax.grid(True, which="both", alpha=0.3)
    written.append(_finalize(fig, base.with_name(base.stem + "_ptp_growth.png")))
    return written


def save_diagnostics_figures(report, report_path, sparse_system=None) -> list[Path]:
    """Render the spectrum figure (and sparsity pattern, if available)."""
    base = Path(report_path)
    written = []

    if report.spectrum is not None and len(report.spectrum):
        fig, ax = plt.subplots(figsize=(6.4, 4.2))
        ax.semilogy(np.arange(1, len(report.spectrum) + 1), report.spectrum, ".-")
        ax.set_xlabel("index")
        ax.set_ylabel("singular value")
        ax.set_title(f"Spectrum of the augmented matrix (n={report.n}, m={report.m})")
        ax.grid(True, which="both", alpha=0.3)
        written.append(_finalize(fig, base.with_name(base.stem + "_spectrum.png")))

    if sparse_system is not None:
        fig, ax = plt.subplots(figsize=(5.2, 5.2))
        ax.spy(sparse_system.B, markersize=max(0.4, 120.0 / sparse_system.n))
        ax.set_title(f"Kernel block nonzeros (nnz={sparse_system.B.nnz})")
        written.append(_finalize(fig, base.with_name(base.stem + "_sparsity.png")))
    return written
