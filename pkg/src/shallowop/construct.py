"""The constructive approximation pipeline.

Stage 1 compresses the operator's sampled image to a finite epsilon net and a
subordinate partition of unity, giving a finite-rank map within epsilon/2.
Stage 2 fits each partition coefficient with a random-feature ridge network
to tolerance delta = epsilon / (2 m C), where C is the largest coefficient
seminorm.  The triangle inequality then bounds the assembled network's
uniform error by epsilon whenever every scalar fit met delta.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import CoverageError, ShapeError
from .inputs import CompactEnsemble, FunctionalSpec, ZeroFunctional, random_functional, stack_flat
from .network import Activation, Neuron, ShallowVectorNetwork, make_activation
from .seeding import derive_seed
from .targets import Seminorm, SeminormFamily, TargetElement


@dataclass(frozen=True, eq=False)
class EpsilonNet:
    """Greedy net: centers cover the source values strictly within epsilon."""

    centers: tuple[TargetElement, ...]
    epsilon: float
    rho: Seminorm
    center_indices: tuple[int, ...]

    def __len__(self):
        return len(self.centers)


def build_epsilon_net(values, rho: Seminorm, epsilon: float) -> EpsilonNet:
    """Scan values in order; keep one as a center iff no existing center is
    strictly within epsilon of it.

    Every value ends up strictly covered and centers stay pairwise >= epsilon
    apart, which is exactly the finite-cover step of the compactness argument.
    """
    values = list(values)
    if not values:
        raise ValueError("cannot build an epsilon net from no values")
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    centers: list[TargetElement] = []
    indices: list[int] = []
    for i, t in enumerate(values):
        if all(rho(t - c) >= epsilon for c in centers):
            centers.append(t)
            indices.append(i)
    return EpsilonNet(tuple(centers), float(epsilon), rho, tuple(indices))


@dataclass(frozen=True, eq=False)
class PartitionOfUnity:
    """Normalized hat weights subordinate to the net's epsilon balls.

    weights[i, j] is psi_j at sample i; distances[i, j] is the seminorm
    distance from value i to center j, kept so the convexity bound can be
    re-checked without re-evaluating the operator.
    """

    weights: np.ndarray
    distances: np.ndarray
    epsilon: float
    rho: Seminorm

    @property
    def n_samples(self):
        return self.weights.shape[0]

    @property
    def n_centers(self):
        return self.weights.shape[1]


def build_partition(f_values, net: EpsilonNet, rho: Seminorm) -> PartitionOfUnity:
    """Hats max(0, 1 - dist/epsilon), normalized per sample.

    The cover property makes every normalizer strictly positive; a sample no
    center reaches is reported by index.
    """
    f_values = list(f_values)
    eps = net.epsilon
    dist = np.empty((len(f_values), len(net.centers)))
    for i, t in enumerate(f_values):
        for j, c in enumerate(net.centers):
            dist[i, j] = rho(t - c)
    raw = np.maximum(0.0, 1.0 - dist / eps)
    norms = raw.sum(axis=1)
    dead = np.flatnonzero(norms <= 0.0)
    if dead.size:
        raise CoverageError(
            f"sample {dead[0]} is not within {eps} of any center under {rho.label()}"
        )
    return PartitionOfUnity(raw / norms[:, None], dist, eps, rho)


def finite_rank_apply(pou: PartitionOfUnity, net: EpsilonNet, sample_index: int) -> TargetElement:
    """Convex combination sum_j psi_j(s_i) v_j of the centers.

    Convexity gives rho(F(s_i) - result) <= sum_j psi_j d_ij < epsilon; the
    right-hand bound is re-asserted here from the stored distances.
    """
    if not 0 <= sample_index < pou.n_samples:
        raise IndexError(f"sample index {sample_index} out of range")
    w = pou.weights[sample_index]
    bound = float(np.dot(w, pou.distances[sample_index]))
    assert bound < pou.epsilon * (1.0 + 1e-9), (
        f"convexity bound {bound} reached epsilon {pou.epsilon}"
    )
    out = net.centers[0].zero_like()
    for wj, c in zip(w, net.centers):
        if wj != 0.0:
            out = out + wj * c
    return out


def least_squares_solve(design: np.ndarray, targets: np.ndarray, lam: float) -> np.ndarray:
    """Minimize ||A c - y||^2 + lam ||c||^2.

    Solved as one least-squares problem on the sqrt(lam)-augmented matrix, so
    the conditioning is that of A itself rather than of A^T A.  With lam = 0
    this is the minimum-norm solution; a rank-deficient design then triggers
    a warning because the minimizer is no longer unique.
    """
    design = np.asarray(design, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if design.ndim != 2 or targets.ndim != 1 or design.shape[0] != targets.shape[0]:
        raise ShapeError(
            f"design {design.shape} and targets {targets.shape} are inconsistent"
        )
    if lam < 0:
        raise ValueError(f"regularization must be nonnegative, got {lam}")
    n, k = design.shape
    if lam > 0:
        aug = np.vstack([design, np.sqrt(lam) * np.eye(k)])
        rhs = np.concatenate([targets, np.zeros(k)])
        coeffs, _, _, _ = np.linalg.lstsq(aug, rhs, rcond=None)
        return coeffs
    coeffs, _, rank, _ = np.linalg.lstsq(design, targets, rcond=None)
    if rank < min(n, k):
        warnings.warn(
            f"unregularized design is rank-deficient (rank {rank} < {min(n, k)}); "
            "solution is the minimum-norm minimizer",
            stacklevel=2,
        )
    return coeffs


@dataclass(frozen=True)
class FitConfig:
    """Knobs for one scalar random-feature fit."""

    functional_spec: FunctionalSpec
    width: int = 64
    max_width: int = 512
    activation: object = "tanh"
    theta_range: tuple[float, float] = (-3.0, 3.0)
    lam: float = 1e-10
    seed: int = 0

    def __post_init__(self):
        if self.width < 1:
            raise ValueError(f"width must be at least 1, got {self.width}")
        if self.max_width < self.width:
            raise ValueError("max_width must be at least width")
        if self.lam < 0:
            raise ValueError("regularization must be nonnegative")
        lo, hi = self.theta_range
        if not hi > lo:
            raise ValueError(f"threshold range must be increasing, got {self.theta_range}")
        object.__setattr__(self, "activation", make_activation(self.activation))


@dataclass(frozen=True, eq=False)
class ScalarRidgeNet:
    """Scalar network sum_k c_k eta(l_k(s) - theta_k); feature 0 is the bias."""

    functionals: tuple
    thetas: np.ndarray
    coeffs: np.ndarray
    activation: Activation
    sup_error: float

    @property
    def width(self):
        return len(self.functionals)

    def design_matrix(self, samples) -> np.ndarray:
        return _design_matrix(samples, self.functionals, self.thetas, self.activation)

    def evaluate_many(self, samples) -> np.ndarray:
        return self.design_matrix(samples) @ self.coeffs

    def __call__(self, s) -> float:
        return float(self.evaluate_many([s])[0])


def draw_features(cfg: FitConfig, width: int, signature: tuple):
    """Feature bank for a width: index 0 is the bias, the rest are random.

    Feature k depends only on (cfg.seed, k), so smaller widths are prefixes
    of larger ones and width sweeps compare nested models.
    """
    lo, hi = cfg.theta_range
    functionals = [ZeroFunctional()]
    thetas = np.empty(width)
    thetas[0] = np.random.default_rng(derive_seed(cfg.seed, 0, 1)).uniform(lo, hi)
    for k in range(1, width):
        functionals.append(random_functional(cfg.functional_spec, derive_seed(cfg.seed, k, 0)))
        thetas[k] = np.random.default_rng(derive_seed(cfg.seed, k, 1)).uniform(lo, hi)
    for l in functionals[1:]:
        if l.signature != signature:
            raise ShapeError(
                f"functional spec draws {l.signature} functionals, ensemble is {signature}"
            )
    return tuple(functionals), thetas


def _design_matrix(samples, functionals, thetas, activation):
    samples = list(samples)
    flats = stack_flat(samples)
    mat = np.zeros((len(functionals), flats.shape[1]))
    for k, l in enumerate(functionals):
        if not isinstance(l, ZeroFunctional):
            mat[k] = l.weight_vector()
    return activation(flats @ mat.T - thetas)


def fit_ridge_features(inputs, targets, functionals, thetas, activation,
                       lam: float) -> ScalarRidgeNet:
    """Ridge-solve the coefficients for an explicit feature bank."""
    targets = np.asarray(targets, dtype=float)
    design = _design_matrix(inputs, functionals, thetas, activation)
    if design.shape[0] != targets.shape[0]:
        raise ShapeError("one target per input sample required")
    coeffs = least_squares_solve(design, targets, lam)
    sup_error = float(np.max(np.abs(design @ coeffs - targets))) if len(targets) else 0.0
    return ScalarRidgeNet(tuple(functionals), np.asarray(thetas, dtype=float),
                          coeffs, activation, sup_error)


def fit_scalar_ridge(inputs: CompactEnsemble, targets, cfg: FitConfig) -> ScalarRidgeNet:
    """Draw cfg.width seeded features and ridge-fit the coefficients."""
    functionals, thetas = draw_features(cfg, cfg.width, inputs.signature)
    return fit_ridge_features(inputs, targets, functionals, thetas, cfg.activation, cfg.lam)


@dataclass(frozen=True)
class ErrorBudget:
    """Two-stage error split: epsilon/2 for the net, epsilon/(2mC) per fit."""

    epsilon: float
    m: int
    C: float
    delta: float | None
    degenerate: bool

    @property
    def stage1(self) -> float:
        return self.epsilon / 2.0

    def __post_init__(self):
        if self.degenerate:
            if self.delta is not None:
                raise ValueError("degenerate budget carries no per-coefficient tolerance")
        else:
            if self.delta is None or not self.delta > 0:
                raise ValueError("per-coefficient tolerance must be positive")
            if self.delta * self.m * self.C > self.stage1 * (1.0 + 1e-12):
                raise ValueError("per-coefficient tolerance overruns the stage budget")


@dataclass(frozen=True, eq=False)
class AssemblyReport:
    """What the pipeline actually achieved, stage by stage."""

    stage1_sup: float
    coefficient_errors: np.ndarray
    coefficient_widths: np.ndarray
    converged: bool
    train_sup_error: float


def assemble_vector_network(f_values, ensemble: CompactEnsemble, family: SeminormFamily,
                            rho_index: int, epsilon: float, fit_cfg: FitConfig):
    """Run the full two-stage construction for one target seminorm.

    Returns (network, budget, report).  A scalar stage that cannot reach its
    tolerance at fit_cfg.max_width leaves report.converged False rather than
    raising; whenever it is True, the training uniform error is below epsilon
    by construction and that is asserted.
    """
    f_values = list(f_values)
    if len(f_values) != len(ensemble):
        raise ShapeError("one operator value per ensemble sample required")
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    rho = family[rho_index]
    out_dim = f_values[0].dim
    out_grid = f_values[0].grid

    net1 = build_epsilon_net(f_values, rho, epsilon / 2.0)
    pou = build_partition(f_values, net1, rho)
    stage1_sup = float(np.max(np.sum(pou.weights * pou.distances, axis=1)))
    assert stage1_sup < (epsilon / 2.0) * (1.0 + 1e-9), (
        f"stage-1 error {stage1_sup} reached its budget {epsilon / 2.0}"
    )

    m = len(net1)
    c_max = max(rho(v) for v in net1.centers)
    if c_max == 0.0:
        # every center is rho-null, so the zero network is already within
        # epsilon/2; return it
        network = ShallowVectorNetwork(
            [], fit_cfg.activation, ensemble.signature, out_dim, out_grid
        )
        budget = ErrorBudget(float(epsilon), m, 0.0, None, True)
        train_sup = float(max(rho(t) for t in f_values))
        assert train_sup < (epsilon / 2.0) * (1.0 + 1e-9)
        report = AssemblyReport(stage1_sup, np.zeros(m), np.zeros(m, dtype=int),
                                True, train_sup)
        return network, budget, report

    delta = epsilon / (2.0 * m * c_max)
    budget = ErrorBudget(float(epsilon), m, float(c_max), float(delta), False)

    neurons = []
    errors = np.empty(m)
    widths = np.empty(m, dtype=int)
    for j in range(m):
        cfg_j = replace(fit_cfg, seed=derive_seed(fit_cfg.seed, j))
        fit = _fit_to_tolerance(ensemble, pou.weights[:, j], cfg_j, delta)
        errors[j] = fit.sup_error
        widths[j] = fit.width
        vj = net1.centers[j]
        for l, theta, c in zip(fit.functionals, fit.thetas, fit.coeffs):
            neurons.append(Neuron(l, theta, c * vj))

    network = ShallowVectorNetwork(
        neurons, fit_cfg.activation, ensemble.signature, out_dim, out_grid
    )
    converged = bool(np.all(errors < delta))
    train_sup = float(uniform_error(f_values, network, ensemble,
                                    SeminormFamily((rho,)))[0])
    if converged:
        assert train_sup < epsilon * (1.0 + 1e-9), (
            f"budget violated: uniform error {train_sup} with epsilon {epsilon}"
        )
    report = AssemblyReport(stage1_sup, errors, widths, converged, train_sup)
    return network, budget, report


def _fit_to_tolerance(ensemble, targets, cfg: FitConfig, delta: float) -> ScalarRidgeNet:
    """Double the width until the training sup error drops below delta."""
    width = cfg.width
    while True:
        fit = fit_scalar_ridge(ensemble, targets, replace(cfg, width=width,
                                                          max_width=max(width, cfg.max_width)))
        if fit.sup_error < delta or width >= cfg.max_width:
            return fit
        width = min(2 * width, cfg.max_width)


def uniform_error(f_values, net: ShallowVectorNetwork, ensemble,
                  family: SeminormFamily) -> np.ndarray:
    """Per-seminorm max over samples of rho(F(s) - net(s))."""
    f_values = list(f_values)
    samples = list(ensemble)
    if len(f_values) != len(samples):
        raise ShapeError("one operator value per sample required")
    approx = net.evaluate_many(samples)
    out = np.zeros(len(family))
    for k, rho in enumerate(family):
        worst = 0.0
        for i, t in enumerate(f_values):
            worst = max(worst, rho(t - TargetElement(approx[i], t.grid)))
        out[k] = worst
    return out


def dual_uniform_error(f_values, net: ShallowVectorNetwork, ensemble, duals) -> np.ndarray:
    """Max over samples of |<t', F(s) - net(s)>| for each dual pairing."""
    return uniform_error(f_values, net, ensemble, SeminormFamily(tuple(duals)))
