import numpy as np
import pytest

from vvlab.errors import ResolutionError
from vvlab.fields import (constant_field, gaussian_field, ramp_field,
                          sign_field, sqrt_abs_field)
from vvlab.flows import DriftSpec
from vvlab.grid import Domain1D, GridField, translate_field
from vvlab.mollify import MollifierKernel, mollify
from vvlab.solver import (SolveConfig, envelope_report, interior_window,
                          solve_burgers, solve_parabolic, time_cut_solve)
from vvlab.spaces import holder_seminorm


@pytest.fixture(scope="module")
def dom():
    return Domain1D(4.0, 512)


def _cfg(dom, **kw):
    base = dict(equation="transport", drift=DriftSpec.constant(0.0), m=16.0,
                nu=1e-3, horizon=0.5, gamma=0.5, grid=dom, dt_policy=0.4)
    base.update(kw)
    return SolveConfig(**base)


def test_config_validation(dom):
    with pytest.raises(ValueError):
        _cfg(dom, nu=0.0)
    with pytest.raises(ValueError):
        _cfg(dom, dt_policy=1.5)
    with pytest.raises(ValueError):
        _cfg(dom, n_cut=0)
    with pytest.raises(ValueError):
        SolveConfig(equation="transport", drift=None, grid=dom)


def test_heat_oracle(dom):
    # b = 0, f = 0: u(t) = h_{v0 + 2 nu t} for g = h_{v0} (m large enough
    # that internal mollification is below tolerance)
    cfg = _cfg(dom, m=1024.0, nu=0.1, dt_policy=0.3)
    g = gaussian_field(dom, 0.05)
    run = solve_parabolic(cfg, None, g)
    errs = []
    for j in range(run.n_frames):
        ref = gaussian_field(dom, 0.05 + 1024.0**-2 + 0.2 * run.times[j])
        errs.append(np.max(np.abs(run.values[j] - ref.values)))
    assert max(errs) < 1e-3


def test_sup_bound_under_source(dom):
    g = sqrt_abs_field(dom)
    f = 0.5 * gaussian_field(dom, 0.3)
    cfg = _cfg(dom, drift=DriftSpec.peano(0.5), nu=1e-3)
    run = solve_parabolic(cfg, f, g)
    bound = cfg.horizon * f.sup_norm() + g.sup_norm()
    assert float(np.max(np.abs(run.values))) <= bound + 1e-12


def test_constant_drift_characteristics(dom):
    big = Domain1D(4.0, 1024)
    cfg = _cfg(big, drift=DriftSpec.constant(0.5), nu=1e-4, dt_policy=0.9)
    g = gaussian_field(big, 0.2)
    run = solve_parabolic(cfg, None, g)
    g_m = mollify(g, MollifierKernel("gaussian", cfg.m))
    ref = translate_field(g_m, 0.5 * run.times[-1])
    assert np.max(np.abs(run.values[-1] - ref.values)) < 5e-3


def test_discrete_maximum_principle(dom):
    rng = np.random.default_rng(0)
    g = GridField(dom, rng.uniform(-1, 1, dom.points))
    f = 0.3 * gaussian_field(dom, 0.2)
    cfg = _cfg(dom, drift=DriftSpec.peano(0.5), nu=5e-3)
    run = solve_parabolic(cfg, f, g)
    g_m = mollify(g, MollifierKernel("gaussian", cfg.m))
    f_m_sup = mollify(f, MollifierKernel("gaussian", cfg.m)).sup_norm()
    for j, t in enumerate(run.times):
        lo = g_m.values.min() - t * f_m_sup - 1e-12
        hi = g_m.values.max() + t * f_m_sup + 1e-12
        assert run.values[j].min() >= lo
        assert run.values[j].max() <= hi


def test_conservation_constant_drift(dom):
    # f = 0 and divergence-free (constant) drift: sum(u) dx is conserved
    g = sqrt_abs_field(dom)
    cfg = _cfg(dom, drift=DriftSpec.constant(0.7), nu=1e-3)
    run = solve_parabolic(cfg, None, g)
    masses = run.values.sum(axis=1) * dom.dx
    assert np.max(np.abs(masses - masses[0])) < 1e-10


def test_holder_contraction_heat(dom):
    g = sqrt_abs_field(dom)
    cfg = _cfg(dom, nu=1e-2)
    run = solve_parabolic(cfg, None, g)
    w = interior_window(dom, cfg.m, cfg.nu, cfg.horizon)
    h0 = holder_seminorm(run.frame(0), 0.5, w).value
    hT = holder_seminorm(run.frame(run.n_frames - 1), 0.5, w).value
    assert hT <= h0 + 1e-10


def test_dt_underflow(dom):
    cfg = _cfg(dom, nu=1e-3, dt_override=1e-10)
    with pytest.raises(ResolutionError):
        solve_parabolic(cfg, None, gaussian_field(dom, 0.1))


def test_equation_tag_mismatch(dom):
    cfg = _cfg(dom)
    with pytest.raises(ValueError):
        solve_burgers(cfg, None, constant_field(dom, 1.0))
    with pytest.raises(ValueError):
        solve_parabolic(SolveConfig(equation="burgers", grid=dom), None,
                        constant_field(dom, 1.0))


# -- burgers ------------------------------------------------------------------

def test_burgers_constants_exact(dom):
    cfg = SolveConfig(equation="burgers", m=16.0, nu=1e-3, horizon=0.5,
                      grid=dom)
    run = solve_burgers(cfg, None, constant_field(dom, 0.7))
    assert np.max(np.abs(run.values - 0.7)) == 0.0


def test_burgers_odd_symmetry(dom):
    g = ramp_field(dom, 0.5)
    f = sign_field(dom, 0.25)
    cfg = SolveConfig(equation="burgers", m=16.0, nu=1e-3, horizon=0.5,
                      grid=dom)
    run = solve_burgers(cfg, f, g)
    for j in (0, run.n_frames // 2, run.n_frames - 1):
        u = run.values[j]
        flipped = -np.roll(u[::-1], 1)
        assert np.max(np.abs(u - flipped)) < 1e-10


def test_burgers_sup_bound(dom):
    g = ramp_field(dom, 0.5)
    f = sign_field(dom, 0.25)
    cfg = SolveConfig(equation="burgers", m=16.0, nu=1e-3, horizon=1.0,
                      grid=dom)
    run = solve_burgers(cfg, f, g)
    bound = cfg.horizon * f.sup_norm() + g.sup_norm()
    assert float(np.max(np.abs(run.values))) <= bound + 1e-12


# -- time cutting -------------------------------------------------------------

def test_time_cut_identity_n1(dom):
    cfg = _cfg(dom, drift=DriftSpec.peano(0.5), n_cut=1)
    g = sqrt_abs_field(dom)
    a = solve_parabolic(cfg, None, g)
    b = time_cut_solve(cfg, None, g)
    assert np.array_equal(a.values, b.values)


def test_time_cut_bitwise_agreement(dom):
    g = sqrt_abs_field(dom)
    runs = {}
    for n in (1, 2, 4, 8):
        cfg = _cfg(dom, drift=DriftSpec.peano(0.5), n_cut=n,
                   dt_override=0.5 / 1024)
        runs[n] = time_cut_solve(cfg, None, g)
    final = runs[1].values[-1]
    for n in (2, 4, 8):
        assert np.max(np.abs(runs[n].values[-1] - final)) <= 1e-12
        h1 = holder_seminorm(runs[1].frame(runs[1].n_frames - 1), 0.5).value
        hn = holder_seminorm(runs[n].frame(runs[n].n_frames - 1), 0.5).value
        assert abs(h1 - hn) <= 1e-10


def test_time_cut_snaps_nonaligned_dt(dom):
    # dt that does not divide T/n gets snapped to T/(n*ceil(T/(n*dt)))
    cfg = _cfg(dom, n_cut=3, dt_override=0.013)
    g = gaussian_field(dom, 0.2)
    run = time_cut_solve(cfg, None, g)
    t_cut = cfg.horizon / 3
    steps = int(np.ceil(t_cut / 0.013))
    assert run.times[-1] == pytest.approx(cfg.horizon, abs=1e-12)
    # all stored times are integer multiples of the snapped dt
    dt_snapped = t_cut / steps
    ratios = run.times / dt_snapped
    assert np.max(np.abs(ratios - np.round(ratios))) < 1e-9


# -- derivative envelopes -----------------------------------------------------

def test_envelopes_heat_gradient_contraction(dom):
    # b = 0, f = 0: ||grad u(t)|| <= ||grad g_m|| (heat contraction)
    cfg = _cfg(dom, m=64.0, nu=1e-2)
    g = gaussian_field(dom, 0.1)
    run = solve_parabolic(cfg, None, g)
    from vvlab.grid import spectral_derivative
    g_m = mollify(g, MollifierKernel("gaussian", cfg.m))
    g_m_lip = spectral_derivative(g_m, 1).sup_norm()
    rep = envelope_report(run, cfg, f_holder=0.0,
                          g_seminorm=holder_seminorm(g, 0.5).value,
                          f=None, g=g, drift_norm=0.0)
    assert np.all(rep.grad <= g_m_lip * (1 + 1e-10))
    assert np.all(rep.grad <= rep.env_grad * (1 + 1e-10))


def test_envelope_hessian_growth_in_m(dom):
    # measured log ||grad^2 u(T)|| grows no faster than (2-gamma) log m
    gamma = 0.5
    g = sqrt_abs_field(dom)
    hs = []
    ms = [8.0, 16.0, 32.0]
    for m in ms:
        cfg = _cfg(dom, drift=DriftSpec.peano(0.5), m=m, nu=1e-3, gamma=gamma)
        run = solve_parabolic(cfg, None, g)
        from vvlab.grid import spectral_derivative
        hs.append(spectral_derivative(run.frame(run.n_frames - 1), 2).sup_norm())
    slope = np.polyfit(np.log(ms), np.log(hs), 1)[0]
    assert slope <= (2.0 - gamma) + 0.1
