import pytest
import json

from isoland import __version__
from isoland import cli
from isoland import common
from isoland.optimizers import NoConvergence


@pytest.fixture(autouse=True)
def restore_session():
    workers, verbose = common.workers(), common.verbose()
    yield
    common.set_workers(workers)
    common.set_verbose(verbose)


def _write_config(tmpdir, config, name='run.json'):
    path = str(tmpdir.join(name))
    with open(path, 'w') as f:
        json.dump(config, f)
    return path


def _run(capsys, argv):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_validate(capsys):
    code, out, _ = _run(capsys, ['validate'])
    assert code == cli.EXIT_OK
    payload = json.loads(out)
    assert payload['command'] == 'validate'
    assert payload['version'] == __version__
    assert payload['summary']['overall'] is True
    names = [row['name'] for row in payload['rows']]
    assert 'asmp1' in names and 'pinning' in names


def test_validate_failure_exit_code(capsys, tmpdir):
    path = _write_config(tmpdir, {'correlator': {'name': 'Power', 'gamma': 1.}})
    code, out, _ = _run(capsys, ['validate', '--config', path])
    assert code == cli.EXIT_FAILED
    assert json.loads(out)['summary']['overall'] is False


def test_domain_error_exit_code(capsys, tmpdir):
    # D''(0) = 0 has no conditional Hessian law
    path = _write_config(tmpdir, {'correlator': {'name': 'Power', 'gamma': 1.}})
    code, out, err = _run(capsys, ['verify', '--config', path])
    assert code == cli.EXIT_CONFIG
    assert out == ''
    assert 'domain error' in err


def test_no_convergence_exit_code(capsys, monkeypatch):
    def stalled(cfg):
        raise NoConvergence('coordinate ascent ran out of iterations')

    monkeypatch.setitem(cli.COMMANDS, 'optimize', stalled)
    code, out, err = _run(capsys, ['optimize'])
    assert code == cli.EXIT_FAILED
    assert out == ''
    assert 'no convergence' in err


def test_gap_rows_require_strict_decrease():
    rows = cli._gap_rows([(8, 0.3), (16, 0.2), (32, 0.05)])
    assert all(row.passed for row in rows)
    rows = cli._gap_rows([(8, 0.3), (16, 0.3), (32, 0.05)])
    assert [row.passed for row in rows] == [True, False, True, True]
    rows = cli._gap_rows([(8, 0.3), (16, 0.2), (32, 0.25)])
    assert [row.passed for row in rows] == [True, True, False, False]


def test_verify_fails_on_stalled_gap_sweep(capsys, tmpdir, monkeypatch):
    monkeypatch.setattr(cli, '_kac_rice_sweep',
                        lambda c, cfg, mu, ns, seed: [(n, 0.05) for n in ns])
    path = _write_config(tmpdir, {'verify': {'n': 3, 'samples': 20000, 'schur_draws': 100,
                                             'schur_n': [2], 'n_sweep': [8, 16]}})
    code, out, _ = _run(capsys, ['verify', '--config', path])
    assert code == cli.EXIT_FAILED
    rows = dict((row['name'], row) for row in json.loads(out)['rows'])
    assert rows['kac_rice_gap(n=8)']['passed']
    assert not rows['kac_rice_gap(n=16)']['passed']
    assert rows['kac_rice_gap_final']['passed']


def test_complexity_closed_form_sweep(capsys, tmpdir):
    path = _write_config(tmpdir, {'mu': [0.5, 1., 2.],
                                  'complexity': {'method': 'closed_form'}})
    code, out, _ = _run(capsys, ['complexity', '--config', path])
    assert code == cli.EXIT_OK
    rows = json.loads(out)['rows']
    assert [row['mu'] for row in rows] == [0.5, 1., 2.]
    for row, expected in zip(rows, (0.602221, 0.096574, 0.)):
        assert abs(row['value'] - expected) < 1e-6
        assert row['method'] == 'ClosedForm'
    assert rows[2]['regime'] == 'SupercriticalMu'


def test_complexity_error_rows(capsys, tmpdir):
    path = _write_config(tmpdir, {'mu': [0.], 'complexity': {'method': 'total'}})
    code, out, _ = _run(capsys, ['complexity', '--config', path])
    assert code == cli.EXIT_OK
    row = json.loads(out)['rows'][0]
    assert row['error'] == 'R2 required when mu=0'


def test_complexity_both_methods(capsys, tmpdir):
    path = _write_config(tmpdir, {'mu': 1., 'domain': {'R2': 0.5}})
    code, out, _ = _run(capsys, ['complexity', '--config', path])
    row = json.loads(out)['rows'][0]
    assert abs(row['value'] - row['total']) < 1e-6
    assert row['method'] == 'Variational'
    assert abs(row['rho*'] - 0.5) < 1e-6


def test_csv_output(capsys, tmpdir):
    path = _write_config(tmpdir, {'mu': [0.5, 1.], 'complexity': {'method': 'total'}})
    out_path = str(tmpdir.join('result.csv'))
    code, out, _ = _run(capsys, ['complexity', '--config', path, '--format', 'csv',
                                 '--out', out_path])
    assert code == cli.EXIT_OK
    assert out == ''
    with open(out_path) as f:
        lines = f.read().splitlines()
    assert lines[0] == '# isoland %s complexity' % __version__
    assert lines[1].startswith('# config: {')
    header = lines[2].split(',')
    assert header[:2] == ['mu', 'R1']
    assert len(lines) == 5


def test_config_errors(capsys, tmpdir):
    path = _write_config(tmpdir, {'mu': 1., 'bogus': True})
    code, _, err = _run(capsys, ['complexity', '--config', path])
    assert code == cli.EXIT_CONFIG
    assert 'bogus' in err
    code, _, _ = _run(capsys, ['validate', '--config', str(tmpdir.join('missing.json'))])
    assert code == cli.EXIT_CONFIG
    code, _, _ = _run(capsys, ['validate', '--workers', '0'])
    assert code == cli.EXIT_CONFIG
    with pytest.raises(SystemExit):
        cli.main(['nonsense'])


def test_census_needs_an_atomic_correlator(capsys, tmpdir):
    path = _write_config(tmpdir, {'domain': {'R2': 2.}, 'census': {'nb_fields': 2}})
    code, _, err = _run(capsys, ['census', '--config', path])
    assert code == cli.EXIT_CONFIG
    assert 'unsupported' in err


def test_census(capsys, tmpdir):
    path = _write_config(tmpdir, {'correlator': {'name': 'AtomicMixture', 'atoms': [[1., 1.]]},
                                  'domain': {'R2': 1.},
                                  'census': {'nb_fields': 3, 'm_features': 256,
                                             'grid_density': 8}})
    code, out, _ = _run(capsys, ['census', '--config', path, '--seed', '5'])
    assert code == cli.EXIT_OK
    payload = json.loads(out)
    assert payload['config']['seed'] == 5
    row = payload['rows'][0]
    assert len(row['counts']) == 3
    assert abs(row['mean'] - sum(row['counts']) / 3.) < 1e-12


def test_kacrice_output_independent_of_workers(capsys, tmpdir):
    path = _write_config(tmpdir, {'correlator': {'name': 'AtomicMixture', 'atoms': [[1., 1.]]},
                                  'domain': {'R2': 3.},
                                  'kacrice': {'n': [2, 3], 'goe_samples': 40,
                                              'quad_nodes': 6, 'hermite_nodes': 6}})
    code, one, _ = _run(capsys, ['kacrice', '--config', path, '--workers', '1'])
    assert code == cli.EXIT_OK
    code, two, _ = _run(capsys, ['kacrice', '--config', path, '--workers', '2'])
    assert one == two
    rows = json.loads(one)['rows']
    assert [row['n'] for row in rows] == [2, 3]
    assert all(row['estimate'] > 0 for row in rows)


def test_verify(capsys, tmpdir):
    path = _write_config(tmpdir, {'verify': {'n': 3, 'samples': 100000, 'schur_draws': 300,
                                             'schur_n': [2, 5]}})
    code, out, _ = _run(capsys, ['verify', '--config', path])
    payload = json.loads(out)
    assert code == (cli.EXIT_OK if payload['summary']['overall'] else cli.EXIT_FAILED)
    names = [row['name'] for row in payload['rows']]
    assert 'schur_identity' in names
    assert 'cov(1,1;1,1)' in names


def test_optimize(capsys, tmpdir):
    path = _write_config(tmpdir, {'mu': [1.]})
    code, out, _ = _run(capsys, ['optimize', '--config', path])
    assert code == cli.EXIT_OK
    row = json.loads(out)['rows'][0]
    assert abs(row['rho_star'] - 1.) < 1e-3
    assert row['regime'] == 'SubcriticalMu'


def test_verbose_goes_to_stderr(capsys, tmpdir):
    path = _write_config(tmpdir, {'mu': [1.], 'complexity': {'method': 'total'}})
    code, out, err = _run(capsys, ['complexity', '--config', path, '-v', '1'])
    assert code == cli.EXIT_OK
    assert json.loads(out)['command'] == 'complexity'
    assert 'worker(s)' in err


if __name__ == '__main__':
    pytest.main([__file__])
