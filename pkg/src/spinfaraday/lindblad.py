"""Dense Lindblad master-equation engine for one two-level atom coupled to
one cavity mode.

The Hilbert space is atom (ground, excited) tensor Fock(0..cutoff), so the
density matrix has dimension 2*(cutoff+1) <= 26 and the vectorized
Liouvillian stays small enough for direct dense solves.

Conventions: the frame rotates at the drive frequency, so
H = -delta_c a^dag a - delta_a sp sm + g (a^dag sm + a sp) + drive,
with delta_x = omega_drive - omega_x. kappa is the amplitude HWHM of the
cavity line, so the photon-number collapse rate is 2*kappa; atomic decay has
rate gamma. For an atom drive the Hamiltonian term is amp*sp + conj(amp)*sm,
so a resonant Rabi frequency Omega corresponds to amplitude Omega/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import SystemParams

TOP_FOCK_TOLERANCE = 1e-6
HERMITICITY_TOLERANCE = 1e-10
EIGENVALUE_FLOOR = -1e-8


class CutoffError(RuntimeError):
    """Raised when the Fock cutoff is too small for the requested state."""


@dataclass(frozen=True)
class LindbladModel:
    """One atom, one mode, one coherent drive."""

    fock_cutoff: int
    g: float                    # rad/s
    kappa: float                # rad/s, amplitude HWHM
    gamma: float                # rad/s
    drive_amplitude: complex    # rad/s; for an atom drive this is Omega/2
    drive_target: str           # "atom" or "cavity"
    detuning_atom: float = 0.0  # rad/s, drive minus atom
    detuning_cavity: float = 0.0  # rad/s, drive minus cavity

    def __post_init__(self) -> None:
        if not isinstance(self.fock_cutoff, int) or not (2 <= self.fock_cutoff <= 12):
            raise ValueError("fock_cutoff must be an integer in [2, 12]")
        if self.kappa <= 0.0 or self.gamma <= 0.0:
            raise ValueError("kappa and gamma must be strictly positive")
        if self.g < 0.0:
            raise ValueError("g must be non-negative")
        if self.drive_target not in ("atom", "cavity"):
            raise ValueError("drive_target must be 'atom' or 'cavity'")

    @property
    def dimension(self) -> int:
        return 2 * (self.fock_cutoff + 1)


@dataclass(frozen=True)
class SteadyState:
    """Steady-state density matrix with convenience observables."""

    density_matrix: np.ndarray
    fock_cutoff: int

    def _fock_dim(self) -> int:
        return self.fock_cutoff + 1

    def expectation(self, operator: np.ndarray) -> complex:
        return complex(np.trace(self.density_matrix @ operator))

    @property
    def photon_number(self) -> float:
        ops = _operators(self.fock_cutoff)
        return float(self.expectation(ops.number).real)

    @property
    def atom_excitation(self) -> float:
        ops = _operators(self.fock_cutoff)
        return float(self.expectation(ops.sp @ ops.sm).real)

    @property
    def cavity_amplitude(self) -> complex:
        ops = _operators(self.fock_cutoff)
        return self.expectation(ops.a)

    @property
    def top_fock_population(self) -> float:
        nf = self._fock_dim()
        diag = np.real(np.diag(self.density_matrix))
        # Atom index i, Fock index n live at row i*nf + n.
        return float(diag[nf - 1] + diag[2 * nf - 1])


@dataclass(frozen=True)
class _Operators:
    a: np.ndarray
    sp: np.ndarray
    sm: np.ndarray
    number: np.ndarray
    identity: np.ndarray


def _operators(cutoff: int) -> _Operators:
    nf = cutoff + 1
    destroy = np.zeros((nf, nf), dtype=complex)
    for n in range(1, nf):
        destroy[n - 1, n] = math.sqrt(n)
    id_atom = np.eye(2, dtype=complex)
    id_fock = np.eye(nf, dtype=complex)
    # Atom basis order (ground, excited); sm = |g><e|.
    sm_atom = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    a = np.kron(id_atom, destroy)
    sm = np.kron(sm_atom, id_fock)
    sp = sm.conj().T
    number = a.conj().T @ a
    identity = np.eye(2 * nf, dtype=complex)
    return _Operators(a=a, sp=sp, sm=sm, number=number, identity=identity)


def hamiltonian(model: LindbladModel) -> np.ndarray:
    ops = _operators(model.fock_cutoff)
    h = (
        -model.detuning_cavity * ops.number
        - model.detuning_atom * (ops.sp @ ops.sm)
        + model.g * (ops.a.conj().T @ ops.sm + ops.a @ ops.sp)
    )
    amp = complex(model.drive_amplitude)
    if model.drive_target == "cavity":
        h = h + amp * ops.a.conj().T + np.conj(amp) * ops.a
    else:
        h = h + amp * ops.sp + np.conj(amp) * ops.sm
    return h


def _dissipator(c: np.ndarray, rate: float) -> np.ndarray:
    dim = c.shape[0]
    eye = np.eye(dim, dtype=complex)
    cdc = c.conj().T @ c
    return rate * (
        np.kron(c, c.conj())
        - 0.5 * (np.kron(cdc, eye) + np.kron(eye, cdc.T))
    )


def liouvillian(model: LindbladModel) -> np.ndarray:
    """Vectorized generator (row-major vec) of the master equation."""
    ops = _operators(model.fock_cutoff)
    h = hamiltonian(model)
    dim = h.shape[0]
    eye = np.eye(dim, dtype=complex)
    liou = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    liou += _dissipator(ops.a, 2.0 * model.kappa)  # photon loss, HWHM kappa
    liou += _dissipator(ops.sm, model.gamma)       # atomic decay
    return liou


def _trace_row(dim: int) -> np.ndarray:
    row = np.zeros(dim * dim, dtype=complex)
    row[:: dim + 1] = 1.0
    return row


def _solve_steady_vec(liou: np.ndarray, dim: int) -> np.ndarray:
    """Solve L rho = 0 with unit trace by replacing one row."""
    a = liou.copy()
    a[0, :] = _trace_row(dim)
    b = np.zeros(dim * dim, dtype=complex)
    b[0] = 1.0
    try:
        return np.linalg.solve(a, b)
    except np.linalg.LinAlgError:
        stacked = np.vstack([liou, _trace_row(dim)[None, :]])
        rhs = np.zeros(dim * dim + 1, dtype=complex)
        rhs[-1] = 1.0
        solution, *_ = np.linalg.lstsq(stacked, rhs, rcond=None)
        return solution


def steady_state(model: LindbladModel, *, check_cutoff: bool = True) -> SteadyState:
    """Steady state of the master equation via a dense null-space solve.

    Raises CutoffError if the top Fock level holds more than 1e-6
    population, and numpy.linalg.LinAlgError if the Liouvillian solve is
    singular beyond the least-squares fallback.
    """
    dim = model.dimension
    vec = _solve_steady_vec(liouvillian(model), dim)
    rho = vec.reshape(dim, dim)

    deviation = np.max(np.abs(rho - rho.conj().T))
    if deviation > HERMITICITY_TOLERANCE:
        raise np.linalg.LinAlgError(
            f"steady-state solve lost hermiticity: deviation {deviation:.2e}"
        )
    rho = 0.5 * (rho + rho.conj().T)
    trace = float(np.trace(rho).real)
    if abs(trace - 1.0) > 1e-10:
        raise np.linalg.LinAlgError(f"steady-state trace {trace!r} differs from 1")
    min_eig = float(np.linalg.eigvalsh(rho).min())
    if min_eig < EIGENVALUE_FLOOR:
        raise np.linalg.LinAlgError(
            f"steady state not positive semidefinite: min eigenvalue {min_eig:.2e}"
        )

    state = SteadyState(density_matrix=rho, fock_cutoff=model.fock_cutoff)
    if check_cutoff and state.top_fock_population >= TOP_FOCK_TOLERANCE:
        raise CutoffError(
            "top Fock level holds population "
            f"{state.top_fock_population:.2e} >= {TOP_FOCK_TOLERANCE:.0e}; "
            "increase fock_cutoff"
        )
    return state


def transmittance_steady(
    delta: float,
    g: float,
    params: SystemParams,
    cavity_detuning: float | None = None,
    *,
    drive_ratio: float = 3e-5,
    fock_cutoff: int = 4,
) -> complex:
    """Probe transmittance from the master equation in the weak-drive limit.

    Drives the cavity with amplitude drive_ratio*kappa and returns the
    steady-state field amplitude normalized by the empty-cavity amplitude at
    the same drive and cavity detuning. Serves as the independent oracle for
    the analytic transmittance.
    """
    delta_c = 0.0 if cavity_detuning is None else float(cavity_detuning)
    drive = drive_ratio * params.kappa
    common = dict(
        fock_cutoff=fock_cutoff,
        kappa=params.kappa,
        gamma=params.gamma,
        drive_amplitude=drive,
        drive_target="cavity",
        detuning_atom=float(delta),
        detuning_cavity=delta_c,
    )
    coupled = steady_state(LindbladModel(g=float(g), **common)).cavity_amplitude
    empty = steady_state(LindbladModel(g=0.0, **common)).cavity_amplitude
    return coupled / empty


def fluorescence_rate(model: LindbladModel) -> float:
    """Photon rate into the cavity output mirror: kappa * <a^dag a>.

    The total cavity emission rate is 2*kappa*<n>; with symmetric mirrors
    half leaves through the output side. In the weak-drive strong-Purcell
    limit this reproduces kappa*Omega^2/(4 g0^2).
    """
    if model.drive_target != "atom":
        raise ValueError("fluorescence_rate expects an atom-driven model")
    return model.kappa * steady_state(model).photon_number


def purcell_rate_formula(params: SystemParams, rabi: float | None = None) -> float:
    """Output-rate estimate kappa*Omega^2/(4 g0^2) (weak drive, g0^2 >> kappa*gamma)."""
    omega = params.rabi if rabi is None else rabi
    return params.kappa * omega**2 / (4.0 * params.g0**2)


@dataclass(frozen=True)
class Lineshape:
    """Fluorescence versus excitation detuning."""

    detunings: np.ndarray      # rad/s
    normalized: np.ndarray     # peak-normalized curve
    rate: np.ndarray           # photons/s, total scattered rate
    fock_cutoff: int
    failed_points: int


def _batched_steady_observables(
    base_liou: np.ndarray,
    detuning_liou: np.ndarray,
    detunings: np.ndarray,
    dim: int,
    observables: list[np.ndarray],
) -> tuple[np.ndarray, np.ndarray, int]:
    """Solve the steady state on a detuning grid in one stacked call.

    Returns (values, top_fock_populations, n_failed) where values has shape
    (len(observables), len(detunings)). Failed points are NaN.
    """
    n_d = detunings.size
    trace_row = _trace_row(dim)
    stacked = base_liou[None, :, :] + detunings[:, None, None] * detuning_liou[None, :, :]
    stacked[:, 0, :] = trace_row
    rhs = np.zeros((n_d, dim * dim), dtype=complex)
    rhs[:, 0] = 1.0

    failed = 0
    try:
        solution = np.linalg.solve(stacked, rhs[..., None])[..., 0]
    except np.linalg.LinAlgError:
        solution = np.full((n_d, dim * dim), np.nan, dtype=complex)
        for k in range(n_d):
            try:
                solution[k] = _solve_steady_vec(
                    base_liou + detunings[k] * detuning_liou, dim
                )
            except np.linalg.LinAlgError:
                failed += 1

    rho = solution.reshape(n_d, dim, dim)
    rho = 0.5 * (rho + np.conj(np.swapaxes(rho, 1, 2)))
    values = np.empty((len(observables), n_d), dtype=float)
    for i, op in enumerate(observables):
        values[i] = np.real(np.einsum("dij,ji->d", rho, op))
    nf = dim // 2
    diag = np.real(np.einsum("dii->di", rho))
    top_pop = diag[:, nf - 1] + diag[:, 2 * nf - 1]
    return values, top_pop, failed


def fluorescence_lineshape(
    params: SystemParams,
    power_scale: float,
    detuning_grid: np.ndarray,
    *,
    average_positions: bool = True,
    n_samples: int = 1000,
    seed: int = 7,
    excitation_waist: float = 24e-6,
    fock_cutoff: int | None = None,
    max_cutoff: int = 10,
) -> Lineshape:
    """Fluorescence spectrum versus excitation-beam detuning.

    The excitation Rabi frequency scales as the square root of power:
    Omega = params.rabi * sqrt(power_scale), with power_scale = 1 at the
    calibration power. The cavity is held resonant with the atom, so both
    detunings equal the grid value. The reported rate counts all scattered
    photons, 2*kappa*<n> + gamma*<sigma_ee>; the cavity channel dominates by
    the Purcell factor when g^2 >> kappa*gamma, and the curve is normalized
    to its own maximum.

    With average_positions the curve is averaged over random atom positions
    across the intersection of the cavity mode (transverse Gaussian, waist
    params.waist) and the excitation beam (waist excitation_waist along the
    cavity axis): the local coupling picks up the mode envelope and
    standing-wave factor, the local Rabi frequency the beam envelope.

    The Fock cutoff adapts upward (in steps of 2, up to max_cutoff) until
    the top level holds less than 1e-6 population; CutoffError if that never
    happens.
    """
    if power_scale < 0.0:
        raise ValueError("power_scale must be non-negative")
    detunings = np.asarray(detuning_grid, dtype=float)
    if detunings.size == 0:
        raise ValueError("detuning_grid must not be empty")

    omega = params.rabi * math.sqrt(power_scale)
    if average_positions:
        rng = np.random.default_rng(seed)
        x = rng.uniform(-params.waist, params.waist, size=n_samples)
        z = rng.uniform(-excitation_waist, excitation_waist, size=n_samples)
        g_local = params.g0 * np.exp(-(x**2) / params.waist**2) * np.cos(
            2.0 * math.pi * z / params.wavelength
        )
        omega_local = omega * np.exp(-(z**2) / excitation_waist**2)
    else:
        g_local = np.array([params.g0])
        omega_local = np.array([omega])

    cutoff = fock_cutoff if fock_cutoff is not None else 3
    while True:
        ops = _operators(cutoff)
        dim = 2 * (cutoff + 1)
        # H(delta) = H(0) - delta * N with N = a^dag a + sp sm, so the
        # Liouvillian is affine in delta with a fixed coefficient matrix.
        n_op = ops.number + ops.sp @ ops.sm
        eye = np.eye(dim, dtype=complex)
        liou_detuning = 1j * (np.kron(n_op, eye) - np.kron(eye, n_op.T))
        observables = [ops.number, ops.sp @ ops.sm]

        rates = np.empty((g_local.size, detunings.size), dtype=float)
        worst_top = 0.0
        failed = 0
        for s in range(g_local.size):
            model = LindbladModel(
                fock_cutoff=cutoff,
                g=float(abs(g_local[s])),
                kappa=params.kappa,
                gamma=params.gamma,
                drive_amplitude=0.5 * omega_local[s],
                drive_target="atom",
            )
            values, top_pop, n_failed = _batched_steady_observables(
                liouvillian(model), liou_detuning, detunings, dim, observables
            )
            rates[s] = 2.0 * params.kappa * values[0] + params.gamma * values[1]
            if np.any(np.isfinite(top_pop)):
                worst_top = max(worst_top, float(np.nanmax(top_pop)))
            failed += n_failed

        if worst_top < TOP_FOCK_TOLERANCE:
            break
        if fock_cutoff is not None or cutoff + 2 > max_cutoff:
            raise CutoffError(
                f"top Fock population {worst_top:.2e} at cutoff {cutoff}; "
                "increase fock_cutoff"
            )
        cutoff += 2

    mean_rate = np.nanmean(rates, axis=0)
    peak = np.nanmax(mean_rate)
    if not np.isfinite(peak) or peak <= 0.0:
        raise np.linalg.LinAlgError("lineshape solve produced no finite points")
    return Lineshape(
        detunings=detunings,
        normalized=mean_rate / peak,
        rate=mean_rate,
        fock_cutoff=cutoff,
        failed_points=failed,
    )


def curve_fwhm(x: np.ndarray, y: np.ndarray) -> float:
    """Full width at half maximum by linear interpolation of the crossings.

    Requires an interior peak with the curve dropping below half maximum on
    both sides within the grid.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    peak_index = int(np.argmax(y))
    half = 0.5 * y[peak_index]
    if peak_index == 0 or peak_index == y.size - 1:
        raise ValueError("peak lies on the grid boundary")

    def crossing(indices: np.ndarray) -> float:
        for i in indices:
            y0, y1 = y[i], y[i + 1]
            if (y0 - half) * (y1 - half) <= 0.0 and y0 != y1:
                return float(x[i] + (half - y0) * (x[i + 1] - x[i]) / (y1 - y0))
        raise ValueError("curve does not cross half maximum inside the grid")

    left = crossing(np.arange(peak_index - 1, -1, -1))
    right = crossing(np.arange(peak_index, y.size - 1))
    return abs(right - left)
