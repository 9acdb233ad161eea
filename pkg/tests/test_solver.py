"""Energy, residual, minimization, continuation, and the experiments."""

import numpy as np
import pytest

from fracorlicz.nfunctions import power_nfunction, power_sum_nfunction, power_log_nfunction
from fracorlicz.grid import (Mesh, GridFunction, random_fourier, random_positive,
                             seminorm_modular)
from fracorlicz.inequalities import diaz_saa_value
from fracorlicz.solver import (
    ProblemSpec, SolveResult, truncate, energy, weak_residual, minimize_energy,
    solve_singular, solve_general, comparison_experiment, uniqueness_experiment,
    symmetry_experiment, torsion_reference, membership_report,
    discretization_estimate,
)

P2 = power_nfunction(2.0)
P3 = power_nfunction(3.0)
PS = power_sum_nfunction(3.0, 4.0)
PL = power_log_nfunction(3.0)


def _spec(mesh, G=P3, s=0.5, alpha=0.5, beta=0.5, f=1.0, k=1.0,
          eps0=1e-2, eps_min=1e-4, obstacle=None, F=None):
    return ProblemSpec(G=G, s=s, alpha=alpha, beta=beta,
                       f=GridFunction.constant(mesh, f),
                       k=GridFunction.constant(mesh, k),
                       epsilon0=eps0, epsilon_min=eps_min,
                       obstacle=obstacle, F_custom=F)


def _torsion_spec(mesh):
    return ProblemSpec(G=P2, s=0.5, alpha=0.0, beta=0.0,
                       f=GridFunction.zeros(mesh),
                       k=GridFunction.constant(mesh, 1.0),
                       epsilon0=1e-2, epsilon_min=1e-2)


# ---------------------------------------------------------------------------
# spec validation
# ---------------------------------------------------------------------------

def test_problem_spec_rejections():
    mesh = Mesh(0.0, 1.0, 16)
    with pytest.raises(ValueError):
        _spec(mesh, s=1.5)
    with pytest.raises(ValueError):
        _spec(mesh, alpha=-1.0)
    with pytest.raises(ValueError):
        _spec(mesh, f=-1.0)
    with pytest.raises(ValueError):
        _spec(mesh, eps_min=0.0)
    with pytest.raises(ValueError):
        _spec(mesh, eps0=1e-8, eps_min=1e-6)
    with pytest.raises(ValueError):
        ProblemSpec(G=P3, s=0.5, alpha=0.5, beta=0.5,
                    f=GridFunction.constant(mesh, 1.0),
                    k=GridFunction.constant(Mesh(0.0, 2.0, 16), 1.0))
    with pytest.raises(ValueError):
        _spec(mesh, obstacle=GridFunction.constant(mesh, -1.0))


def test_hypothesis_warnings():
    mesh = Mesh(0.0, 1.0, 16)
    clean = _spec(mesh)
    assert clean.hypothesis_warnings() == []
    shady = _spec(mesh, f=0.0, beta=2.5)  # f trivial, beta >= p_minus - 1
    notes = shady.hypothesis_warnings()
    assert any("f == 0" in n for n in notes)
    assert any("uniqueness hypothesis" in n for n in notes)


def test_truncate_utility():
    vals = np.array([-3.0, -0.5, 0.0, 0.5, 3.0])
    assert np.array_equal(truncate(vals, 1.0), [-1.0, -0.5, 0.0, 0.5, 1.0])
    with pytest.raises(ValueError):
        truncate(vals, 0.0)


# ---------------------------------------------------------------------------
# residual and energy
# ---------------------------------------------------------------------------

def test_residual_zero_data():
    mesh = Mesh(0.0, 1.0, 16)
    spec = _spec(mesh, f=0.0, k=0.0, alpha=0.0, beta=0.0)
    r = weak_residual(GridFunction.zeros(mesh), spec, 1e-2)
    assert np.array_equal(r.values, np.zeros(16))


def test_residual_antisymmetry_of_operator_part():
    mesh = Mesh(-1.0, 1.0, 16)
    spec = _spec(mesh, f=0.0, k=0.0, alpha=0.0, beta=0.0)
    rng = np.random.default_rng(0)
    u = random_fourier(rng, mesh)
    plus = weak_residual(u, spec, 1e-2).values
    minus = weak_residual(u.with_values(-u.values), spec, 1e-2).values
    assert np.array_equal(plus, -minus)


def test_residual_torsion_interior_convergence():
    # discrete operator applied to the closed-form profile: the interior
    # residual halves per refinement (rate ~ 1); the boundary sup norm does
    # not decay because the profile has a square-root edge
    sups = []
    for n in (50, 100, 200):
        mesh = Mesh(-1.0, 1.0, n)
        ref = torsion_reference(mesh)
        r = weak_residual(ref, _torsion_spec(mesh), 1e-2).values
        interior = np.abs(mesh.nodes) <= 0.75
        sups.append(np.max(np.abs(r[interior])))
    assert sups[0] > sups[1] > sups[2]
    rate = np.log2(sups[0] / sups[2]) / 2.0
    assert rate == pytest.approx(1.0, abs=0.3)


def test_energy_trivial_and_log_branch():
    mesh = Mesh(0.0, 1.0, 32)
    spec = _spec(mesh)
    assert energy(spec, GridFunction.zeros(mesh), 1e-2) == 0.0
    # alpha = 1 reaction primitive: f * ln((u + eps)/eps); k switched off
    log_spec = _spec(mesh, alpha=1.0, k=0.0, eps0=1.0, eps_min=1.0)
    u = GridFunction.constant(mesh, 1.0)
    reaction = energy(log_spec, u, 1.0) - seminorm_modular(u, P3, 0.5, "full")
    assert reaction == pytest.approx(-np.log(2.0), rel=1e-12)


@pytest.mark.parametrize("G", [P2, P3, PS, PL], ids=lambda g: g.family)
def test_gradient_consistency(G):
    # central differences of the energy against the residual field
    rng = np.random.default_rng(42)
    mesh = Mesh(0.0, 1.0, 24)
    spec = _spec(mesh, G=G)
    eps = 0.5
    for _ in range(10):
        u = random_positive(rng, mesh)
        phi = random_fourier(rng, mesh)
        t = 1e-6
        fd = (energy(spec, u.with_values(u.values + t * phi.values), eps)
              - energy(spec, u.with_values(u.values - t * phi.values), eps)) / (2 * t)
        an = mesh.h * float(np.dot(weak_residual(u, spec, eps).values, phi.values))
        assert abs(fd - an) / (1.0 + abs(an)) < 1e-5


def test_modular_part_convex_along_rays():
    rng = np.random.default_rng(7)
    mesh = Mesh(0.0, 1.0, 16)
    for _ in range(1000):
        u = random_fourier(rng, mesh)
        v = random_fourier(rng, mesh)
        theta = rng.uniform(0.0, 1.0)
        mid = u.with_values((1 - theta) * u.values + theta * v.values)
        chord = ((1 - theta) * seminorm_modular(u, PS, 0.5, "full")
                 + theta * seminorm_modular(v, PS, 0.5, "full"))
        val = seminorm_modular(mid, PS, 0.5, "full")
        assert val <= chord + 1e-10 * (1.0 + abs(chord))


# ---------------------------------------------------------------------------
# minimization
# ---------------------------------------------------------------------------

def test_minimize_trivial_to_zero():
    # without forcing the energy is the nonnegative modular, minimized at 0;
    # a quadratic kernel reaches it to gradient precision, a degenerate one
    # (derivative vanishing quadratically) only to the square root of it
    mesh = Mesh(0.0, 1.0, 24)
    rng = np.random.default_rng(1)
    init = random_fourier(rng, mesh, nonnegative=True)
    quad_spec = _spec(mesh, G=P2, f=0.0, k=0.0, alpha=0.0, beta=0.0)
    res = minimize_energy(quad_spec, 1e-2, init, tol=1e-10)
    assert res.converged
    assert np.max(np.abs(res.u.values)) < 1e-8
    degen_spec = _spec(mesh, G=P3, f=0.0, k=0.0, alpha=0.0, beta=0.0)
    res3 = minimize_energy(degen_spec, 1e-2, init, tol=1e-10)
    assert res3.converged
    assert np.max(np.abs(res3.u.values)) < 1e-4
    assert energy(degen_spec, res3.u, 1e-2) < 1e-14


def test_minimize_energy_descent():
    mesh = Mesh(-1.0, 1.0, 64)
    res = minimize_energy(_torsion_spec(mesh), 1e-2, GridFunction.zeros(mesh))
    energies = [e for _, e in res.energy_trace]
    assert res.converged
    diffs = np.diff(energies)
    assert np.all(diffs <= 1e-12 * (1.0 + np.abs(energies[:-1])))


def test_minimize_torsion_matches_reference():
    mesh = Mesh(-1.0, 1.0, 100)
    res = minimize_energy(_torsion_spec(mesh), 1e-2, GridFunction.zeros(mesh), tol=1e-9)
    ref = torsion_reference(mesh)
    assert res.converged
    assert (res.u - ref).l2_norm() / ref.l2_norm() < 0.05


def test_minimize_obstacle_complementarity():
    # strong forcing against a low ceiling: the solution clamps to the
    # obstacle on an interior set and the residual is nonnegative there
    mesh = Mesh(0.0, 1.0, 48)
    ceiling = GridFunction.constant(mesh, 0.1)
    spec = _spec(mesh, G=P2, alpha=0.0, beta=0.0, f=0.0, k=5.0,
                 eps0=1e-2, eps_min=1e-2, obstacle=ceiling)
    res = minimize_energy(spec, 1e-2, GridFunction.zeros(mesh), tol=1e-10)
    assert res.converged
    assert np.all(res.u.values <= 0.1 + 1e-12)
    active = res.u.values >= 0.1 - 1e-8
    assert active.sum() >= mesh.n // 4  # clamps on an interior set
    r = weak_residual(res.u, spec, 1e-2).values
    # complementarity at the ceiling: the energy pushes against the bound,
    # so the unconstrained gradient is nonpositive there and zero elsewhere
    assert np.all(r[active] <= 1e-8)
    assert np.max(np.abs(r[~active])) < 1e-8


def test_minimize_respects_max_iter():
    mesh = Mesh(-1.0, 1.0, 64)
    res = minimize_energy(_torsion_spec(mesh), 1e-2, GridFunction.zeros(mesh),
                          tol=1e-14, max_iter=3)
    assert not res.converged  # reported, never silent


# ---------------------------------------------------------------------------
# continuation
# ---------------------------------------------------------------------------

def test_solve_singular_positive_and_cauchy():
    mesh = Mesh(0.0, 1.0, 64)
    spec = _spec(mesh, eps0=1e-2, eps_min=1e-5)
    res = solve_singular(spec, tol=1e-9, seed=3)
    assert res.converged
    assert np.all(res.u.values > 0.0)  # interior positivity
    assert len(res.epsilon_trace) == len(res.stage_diffs)
    last = res.stage_diffs[-3:]
    assert last[0] >= last[1] >= last[2]  # Cauchy increments decreasing


def test_solve_singular_interior_floor_baseline():
    # frozen regression: minimum nodal value of the singular solve with a
    # tiny reaction coefficient (positivity floor driven by the forcing)
    mesh = Mesh(0.0, 1.0, 100)
    spec = ProblemSpec(G=P3, s=0.5, alpha=0.5, beta=0.5,
                       f=GridFunction.constant(mesh, 1.0),
                       k=GridFunction.constant(mesh, 1e-6),
                       epsilon0=1e-2, epsilon_min=1e-6)
    res = solve_singular(spec, tol=1e-9, seed=3)
    assert res.converged
    assert res.u.values.min() == pytest.approx(0.05796863354980814, rel=1e-6)


def test_solve_singular_self_convergence():
    # reaction-only problem: doubling the mesh moves the solution by less
    # than the discretization allowance
    def run(n):
        mesh = Mesh(0.0, 1.0, n)
        spec = _spec(mesh, G=P3, alpha=0.0, beta=1.0, f=0.0, k=1.0,
                     eps0=1e-2, eps_min=1e-4)
        return solve_singular(spec, tol=1e-10, seed=1)

    coarse = run(50)
    fine = run(100)
    assert coarse.converged and fine.converged
    on_fine = np.repeat(coarse.u.values, 2)
    gap = np.max(np.abs(on_fine - fine.u.values))
    allowance = discretization_estimate(fine.u.mesh, 0.5,
                                        fine.u.sup_norm()) * 10.0
    assert gap < max(allowance, 0.05 * fine.u.sup_norm())


def test_epsilon_monotonicity_observed():
    # observational regression, not a theorem of the method: as the
    # regularization shrinks, the forcing strengthens, so the solutions
    # u_eps rise nodewise while the shifted fields u_eps + eps fall
    # nodewise (the shifted field is the quantity squeezed from above in
    # the continuation analysis)
    mesh = Mesh(0.0, 1.0, 48)
    spec = _spec(mesh, alpha=0.5, beta=0.0, k=0.0, f=1.0,
                 eps0=1e-2, eps_min=1e-4)
    u = GridFunction.zeros(mesh)
    prev = None
    u_drops = shifted_rises = 0
    for eps in (1e-2, 5e-3, 2.5e-3, 1.25e-3):
        out = minimize_energy(spec, eps, u, tol=1e-10)
        u = out.u
        if prev is not None:
            p_eps, p_vals = prev
            u_drops += int(np.sum(u.values < p_vals - 1e-10))
            shifted_rises += int(np.sum(u.values + eps > p_vals + p_eps + 1e-10))
        prev = (eps, u.values.copy())
    assert u_drops == 0
    assert shifted_rises == 0


def test_solve_determinism():
    mesh = Mesh(0.0, 1.0, 32)
    spec = _spec(mesh, eps0=1e-2, eps_min=1e-4)
    a = solve_singular(spec, tol=1e-9, seed=5)
    b = solve_singular(spec, tol=1e-9, seed=5)
    assert a.serialize() == b.serialize()


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------

def test_comparison_identical_specs():
    mesh = Mesh(0.0, 1.0, 32)
    spec = _spec(mesh)
    out = comparison_experiment(spec, spec, tol=1e-9)
    assert out.ok
    assert np.array_equal(out.low.u.values, out.high.u.values)


def test_comparison_ordered_forcing():
    mesh = Mesh(0.0, 1.0, 64)
    low = _spec(mesh, f=1.0)
    high = _spec(mesh, f=2.0)
    out = comparison_experiment(low, high, tol=1e-9)
    assert out.ok and out.violated_nodes.size == 0
    assert np.all(out.high.u.values >= out.low.u.values)


def test_comparison_reaction_bump():
    mesh = Mesh(0.0, 1.0, 64)
    low = _spec(mesh)
    bump = 1.0 + np.exp(-(mesh.nodes - 0.5) ** 2 / 0.02)
    high = ProblemSpec(G=P3, s=0.5, alpha=0.5, beta=0.5, f=low.f,
                       k=GridFunction(mesh, bump),
                       epsilon0=low.epsilon0, epsilon_min=low.epsilon_min)
    out = comparison_experiment(low, high, tol=1e-9)
    assert out.ok


def test_comparison_precondition_rejection():
    mesh = Mesh(0.0, 1.0, 32)
    with pytest.raises(ValueError):
        comparison_experiment(_spec(mesh, f=2.0), _spec(mesh, f=1.0))
    with pytest.raises(ValueError):
        comparison_experiment(_spec(mesh, alpha=0.5), _spec(mesh, alpha=0.7))


def test_uniqueness_experiment_small():
    mesh = Mesh(0.0, 1.0, 64)
    spec = _spec(mesh, eps0=1e-2, eps_min=1e-5)
    out = uniqueness_experiment(spec, tol=1e-9, seed=11)
    assert out.ok
    assert not out.out_of_hypothesis
    assert out.max_pairwise < 1e-5


def test_uniqueness_needs_three_starts():
    mesh = Mesh(0.0, 1.0, 32)
    with pytest.raises(ValueError):
        uniqueness_experiment(_spec(mesh), inits=[GridFunction.zeros(mesh)])


def test_uniqueness_out_of_hypothesis_flagged():
    mesh = Mesh(0.0, 1.0, 32)
    spec = _spec(mesh, beta=2.5, eps0=1e-2, eps_min=1e-3)  # beta >= p_minus - 1
    out = uniqueness_experiment(spec, tol=1e-8, seed=1)
    assert out.out_of_hypothesis  # runs, but labeled; outcome only reported


def test_symmetry_experiment_asymmetric_init():
    mesh = Mesh(-1.0, 1.0, 64)
    bump = np.exp(-mesh.nodes ** 2 / 0.25)
    spec = ProblemSpec(G=P3, s=0.5, alpha=0.5, beta=0.5,
                       f=GridFunction(mesh, bump),
                       k=GridFunction.constant(mesh, 1.0),
                       epsilon0=1e-2, epsilon_min=1e-4)
    init = GridFunction(mesh, 0.5 + 0.4 * np.sin(3.0 * mesh.nodes))
    out = symmetry_experiment(spec, u_init=init, tol=1e-9)
    assert out.ok and out.symmetric_data
    assert out.asymmetry < 1e-6


def test_symmetry_control_case():
    mesh = Mesh(-1.0, 1.0, 64)
    skew = 1.0 + 0.5 * (mesh.nodes > 0.2)
    spec = ProblemSpec(G=P3, s=0.5, alpha=0.5, beta=0.5,
                       f=GridFunction(mesh, skew),
                       k=GridFunction.constant(mesh, 1.0),
                       epsilon0=1e-2, epsilon_min=1e-3)
    out = symmetry_experiment(spec, tol=1e-9)
    assert not out.symmetric_data
    assert out.asymmetry > 1e-3  # reported, not held against the expectation


def test_symmetry_needs_even_count():
    mesh = Mesh(-1.0, 1.0, 33)
    with pytest.raises(ValueError):
        symmetry_experiment(_spec(mesh))


# ---------------------------------------------------------------------------
# general right-hand side
# ---------------------------------------------------------------------------

def test_general_path_reproduces_singular():
    mesh = Mesh(0.0, 1.0, 32)
    direct = _spec(mesh, eps0=1e-2, eps_min=1e-4)
    F = lambda x, u: 1.0 * u ** (-0.5) + 1.0 * u ** 0.5
    general = _spec(mesh, eps0=1e-2, eps_min=1e-4, F=F)
    a = solve_singular(direct, tol=1e-10, seed=2)
    b = solve_general(general, tol=1e-10, seed=2)
    assert a.converged and b.converged
    assert np.max(np.abs(a.u.values - b.u.values)) < 1e-8


def test_general_path_decreasing_nonlinearity():
    mesh = Mesh(0.0, 1.0, 32)
    F = lambda x, u: 1.0 / (1.0 + u)
    spec = _spec(mesh, f=0.0, k=0.0, alpha=0.0, beta=0.0,
                 eps0=1e-2, eps_min=1e-4, F=F)
    out = uniqueness_experiment(spec, tol=1e-9, seed=4,
                                inits=[GridFunction.constant(mesh, 0.1),
                                       GridFunction.constant(mesh, 1.0),
                                       GridFunction.constant(mesh, 2.0)])
    # route the solves through the general path manually
    results = [solve_general(spec, u0, tol=1e-9, seed=4)
               for u0 in (GridFunction.constant(mesh, 0.1),
                          GridFunction.constant(mesh, 1.0))]
    assert all(r.converged for r in results)
    assert np.max(np.abs(results[0].u.values - results[1].u.values)) < 1e-6


def test_general_path_rejections():
    mesh = Mesh(0.0, 1.0, 32)
    growing = _spec(mesh, F=lambda x, u: u ** 3.0)  # ratio increases
    with pytest.raises(ValueError):
        solve_general(growing)
    with pytest.raises(ValueError):
        solve_general(_spec(mesh))  # no custom right-hand side


# ---------------------------------------------------------------------------
# membership advisories
# ---------------------------------------------------------------------------

def test_membership_report_with_conjugate_available():
    mesh = Mesh(0.0, 1.0, 16)
    spec = _spec(mesh, G=P2, s=0.25, alpha=0.5, beta=0.5)
    notes = membership_report(spec)
    assert any("reaction coefficient" in n for n in notes)
    assert any("singular coefficient" in n for n in notes)


def test_membership_report_skips_when_unavailable():
    mesh = Mesh(0.0, 1.0, 16)
    spec = _spec(mesh, G=P3, s=0.5)
    notes = membership_report(spec)
    assert len(notes) == 1 and "skipped" in notes[0]


def test_diaz_saa_links_converged_solutions():
    # converged positive solutions of two ordered problems satisfy the
    # pairing inequality at the lower index
    mesh = Mesh(0.0, 1.0, 48)
    a = solve_singular(_spec(mesh, f=1.0, eps0=1e-2, eps_min=1e-4), tol=1e-9)
    b = solve_singular(_spec(mesh, f=2.0, eps0=1e-2, eps_min=1e-4), tol=1e-9)
    assert a.converged and b.converged
    val = diaz_saa_value(a.u, b.u, P3, 0.5, P3.p_minus)
    assert val >= -1e-8 * (1.0 + abs(val))
