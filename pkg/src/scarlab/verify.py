"""Bundled self-checks behind the `verify` CLI command.

Each check recomputes its reference through a route independent of the code
path it validates (brute-force enumeration, dense embedding, direct
integration), reports one pass/fail line, and never short-circuits the rest.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import ConstrainedBasis, enumerate_basis, is_blockaded, neel_bits, neel_states
from .entanglement import schmidt_entropy
from .evolution import evolve_direct, evolve_similarity, norm_decomposition
from .operators import ModelParams, build_h, check_similarity
from .spectral import eigendecompose_h0, p_nup, right_eigvec, spectrum_of

DEFAULT_LENGTH = 10
DEFAULT_G = (-1.0, 0.0, 1.0)

TOL_SIMILARITY = 1e-12
TOL_SPECTRUM = 1e-6
TOL_IMAG = 1e-8
TOL_PROPAGATOR = 1e-6
TOL_AMP_G_INDEPENDENCE = 1e-10
TOL_NORM_IDENTITY = 1e-10
TOL_REWEIGHTING = 1e-12
TOL_ENTROPY_ORACLE = 1e-9
TOL_ENTROPY_EXACT = 1e-12
TOL_PAIRING = 1e-12


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    threshold: float
    passed: bool
    detail: str = ""


def _brute_force_dimension(length: int) -> int:
    return sum(1 for s in range(1 << length) if is_blockaded(s, length))


def _dense_embedding_entropy(basis: ConstrainedBasis, vector: np.ndarray) -> float:
    """Base-2 entropy via full 2^L embedding and reduced density matrix."""
    length = basis.length
    half = length // 2
    full = np.zeros(1 << length, dtype=complex)
    full[basis.states] = vector
    m = full.reshape(1 << (length - half), 1 << half).T  # m[a, b], a = low-bit half
    rho = m @ m.conj().T
    lam = np.linalg.eigvalsh(rho)
    lam = lam[lam > 1e-14]
    return float(-np.sum(lam * np.log2(lam)))


def run_verification(
    length: int = DEFAULT_LENGTH,
    g_list=DEFAULT_G,
    tol_similarity: float = TOL_SIMILARITY,
) -> list[CheckResult]:
    """Run the invariant suite at desk scale (length <= 12) and collect results."""
    results: list[CheckResult] = []

    def check(name, value, threshold, detail=""):
        results.append(CheckResult(name, float(value), float(threshold), bool(value < threshold), detail))

    def check_flag(name, ok, detail=""):
        results.append(CheckResult(name, 0.0 if ok else 1.0, 1.0, bool(ok), detail))

    basis = enumerate_basis(length)

    # the enumerator against the exhaustive 2^L filter
    brute = _brute_force_dimension(length)
    check_flag("basis-dimension-bruteforce", basis.dim == brute, f"dim={basis.dim} brute={brute}")
    z2, z2bar = neel_bits(length)
    check_flag("neel-states-present", z2 in basis.index and z2bar in basis.index)

    hg_list = {g: build_h(basis, ModelParams(length, float(g))) for g in g_list}

    for g in g_list:
        check(f"similarity-residual g={g:g}", check_similarity(basis, g, h_g=hg_list[g]), tol_similarity)

    # transposed entries of the biased matrix differ by exactly exp(2g)
    for g in g_list:
        coo = hg_list[g].tocoo()
        upper = basis.nup[coo.row] > basis.nup[coo.col]
        partner = hg_list[g].tocsr()
        worst = 0.0
        for r, c, v in zip(coo.row[upper], coo.col[upper], coo.data[upper]):
            worst = max(worst, abs(v - np.exp(2.0 * g) * partner[c, r]))
        check(f"entry-pairing g={g:g}", worst, TOL_PAIRING)

    es = eigendecompose_h0(basis)
    h0 = hg_list.get(0.0, build_h(basis, ModelParams(length, 0.0))).toarray()
    check("eigh-reconstruction", np.max(np.abs(h0 @ es.vectors - es.vectors * es.energies)), 1e-10 * basis.dim)
    check("eigh-orthonormality", np.max(np.abs(es.vectors.T @ es.vectors - np.eye(basis.dim))), 1e-10)

    reference = np.sort(es.energies)
    for g in g_list:
        if g == 0.0:
            continue
        w = spectrum_of(basis, float(g))
        check(f"spectrum-invariance g={g:g}", np.max(np.abs(np.sort(w.real) - reference)), TOL_SPECTRUM)
        check(f"spectrum-imag-parts g={g:g}", np.max(np.abs(w.imag)), TOL_IMAG)

    times = np.linspace(0.0, 10.0, 101)
    z2_idx, z2bar_idx = neel_states(basis)
    traces = {}
    for g in g_list:
        sim = evolve_similarity(basis, float(g), z2bar_idx, times, eigensystem=es)
        traces[g] = sim
        direct = evolve_direct(basis, float(g), z2bar_idx, times, rtol=1e-9, h=hg_list[g])
        check(f"propagator-oracle g={g:g}", np.max(np.abs(sim.p_z2bar - direct.p_z2bar)), TOL_PROPAGATOR)

    # amplitudes onto the Neel states do not depend on g for a Neel start
    if len(traces) > 1:
        gs = sorted(traces)
        dev = 0.0
        for g in gs[1:]:
            dev = max(dev, float(np.max(np.abs(traces[g].amp_z2 - traces[gs[0]].amp_z2))))
            dev = max(dev, float(np.max(np.abs(traces[g].amp_z2bar - traces[gs[0]].amp_z2bar))))
        check("neel-amp-g-independence", dev, TOL_AMP_G_INDEPENDENCE)

    for g in g_list:
        worst = 0.0
        for t in (1.3, 7.7):
            total = norm_decomposition(basis, float(g), t, eigensystem=es).sum()
            sim = evolve_similarity(basis, float(g), z2bar_idx, np.array([t]), eigensystem=es)
            worst = max(worst, abs(total - np.exp(sim.log_norm_sq[0])) / total)
        check(f"norm-identity g={g:g}", worst, TOL_NORM_IDENTITY)

    # tilt identity p * Z = exp(2 g n) p0, two routes
    picks = np.linspace(0, basis.dim - 1, 7).astype(int)
    for g in g_list:
        if g == 0.0:
            continue
        worst = 0.0
        for alpha in picks:
            dist = p_nup(es, basis, float(g), int(alpha))
            p0 = p_nup(es, basis, 0.0, int(alpha)).p
            lhs = dist.p * np.exp(dist.log_z)
            rhs = np.exp(2.0 * g * np.arange(p0.size)) * p0
            scale = np.maximum(np.abs(rhs), 1e-300)
            worst = max(worst, float(np.max(np.abs(lhs - rhs) / scale)))
            vec = right_eigvec(es, basis, float(g), int(alpha))
            regrouped = np.bincount(basis.nup, weights=np.abs(vec) ** 2, minlength=p0.size)
            worst = max(worst, float(np.max(np.abs(regrouped - dist.p))))
        check(f"reweighting-identity g={g:g}", worst, TOL_REWEIGHTING)

    # entanglement: analytic values and the dense-embedding oracle
    ent_basis = enumerate_basis(8) if length > 10 else basis
    ez2, ez2bar = neel_states(ent_basis)
    cat = np.zeros(ent_basis.dim)
    cat[ez2] = cat[ez2bar] = 1.0 / np.sqrt(2.0)
    point = np.zeros(ent_basis.dim)
    point[ez2bar] = 1.0
    check("entropy-product-state", abs(schmidt_entropy(ent_basis, point)), TOL_ENTROPY_EXACT)
    check("entropy-neel-cat", abs(schmidt_entropy(ent_basis, cat) - 1.0), TOL_ENTROPY_EXACT)
    ent_es = es if ent_basis is basis else eigendecompose_h0(ent_basis)
    worst = 0.0
    for alpha in np.linspace(0, ent_basis.dim - 1, 5).astype(int):
        vec = ent_es.vectors[:, int(alpha)]
        worst = max(worst, abs(schmidt_entropy(ent_basis, vec) - _dense_embedding_entropy(ent_basis, vec)))
    check("entropy-dense-oracle", worst, TOL_ENTROPY_ORACLE)

    return results


def format_report(results: list[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = []
    for r in results:
        status = "pass" if r.passed else "FAIL"
        lines.append(f"{status}  {r.name:<{width}}  value={r.value:.3e}  threshold={r.threshold:.3e}")
    failed = sum(not r.passed for r in results)
    lines.append(f"{len(results) - failed}/{len(results)} checks passed")
    return "\n".join(lines)
