import json

from app.routes.commands import CSV_HEADER


def _roundtrip(output):
    return json.dumps(json.loads(output), sort_keys=True, indent=2) == output.rstrip('\n')


def test_classify_command(runner):
    result = runner.invoke(args=['classify', '[[2,1],[1,1]]'])
    assert result.exit_code == 0
    assert 'Hyperbolic(+)' in result.output


def test_decide_mixing_hyperbolic(runner):
    result = runner.invoke(args=['decide-mixing', '[[2,1],[1,1]]'])
    assert result.exit_code == 0
    assert 'resposta: Mixing' in result.output


def test_decide_mixing_json(runner):
    result = runner.invoke(args=['decide-mixing', '--json', '[[1,1],[0,1]]'])
    assert result.exit_code == 0
    assert json.loads(result.output) == {
        'answer': 'NotMixing',
        'witness': [[0, 1], [0, -1]],
        'reasons': ['UnipotentFixedFrequency'],
    }
    assert _roundtrip(result.output)


def test_decide_mixing_family_and_factors(runner):
    family = runner.invoke(args=['decide-mixing', '--json', '--family', '[[n,n-1],[1,1]]'])
    assert json.loads(family.output)['witness'] == [[0, 1], [-1, -1]]
    factors = runner.invoke(args=['decide-mixing', '--factor', '[[1,1],[0,1]]', '-n',
                                  '--factor', '[[1,0],[1,1]]', 'n'])
    assert factors.exit_code == 0
    assert 'resposta: Mixing' in factors.output


def test_decide_joint_command(runner):
    triple = runner.invoke(args=['decide-joint', '--json', '[[2,1],[1,1]]', '[[1,1],[1,2]]',
                                 '[[3,1],[-1,0]]'])
    assert triple.exit_code == 0
    payload = json.loads(triple.output)
    assert payload['answer'] == 'NotJointlyMixing'
    assert 'ThreeSharedModulus' in payload['reasons']
    families = runner.invoke(args=['decide-joint', '--family', '[[n,n^2-1],[1,n]]',
                                   '--family', '[[2*n^2-1,2*n^3-2*n],[2*n,2*n^2-1]]'])
    assert 'NotJointlyMixing' in families.output
    commuting = runner.invoke(args=['decide-joint', '--commuting', '[[2,1],[1,1]]', '[[5,3],[3,2]]'])
    assert 'resposta: JointlyMixing' in commuting.output


def test_decide_relative_command(runner):
    result = runner.invoke(args=['decide-relative', '--json', '-U', '[[1,1],[0,1]]', '-a', 'n',
                                 '-U', '[[1,1],[0,1]]', '-a', 'n+1'])
    assert result.exit_code == 0
    assert json.loads(result.output)['answer'] == 'NotRelativelyJointlyMixing'
    negative = runner.invoke(args=['decide-relative', '--json', '-U', '[[-1,-1],[0,-1]]', '-a', 'n'])
    assert negative.exit_code == 0
    assert json.loads(negative.output)['reasons'] == ['NegativeUnipotentFactor', 'ValidModulo:2']


def test_rokhlin_check_command(runner, tmp_path):
    verdict = runner.invoke(args=['rokhlin-check', '-T', '[[2,1],[1,1]]', '-a', 'n',
                                  '-T', '[[2,1],[1,1]]', '-a', 'n^2'])
    assert 'SufficientConditionHolds' in verdict.output
    path = tmp_path / 'rokhlin.csv'
    report = runner.invoke(args=['rokhlin-check', '--family', '[[n,n^2-1],[1,n]]', '-a', '1', '-a', '2',
                                 '--n', '2..10', '--csv', str(path)])
    assert report.exit_code == 0
    lines = path.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert lines[1] == 'n,log_ratio,gamma'
    assert len(lines) == 2 + 9


def test_witness_triple_command(runner):
    result = runner.invoke(args=['witness-triple', '--json', '[[2,1],[1,1]]', '[[1,1],[1,2]]',
                                 '[[3,1],[-1,0]]'])
    assert result.exit_code == 0
    assert json.loads(result.output)['verified'] is True


def test_witness_triple_pair_is_usage_error(runner):
    result = runner.invoke(args=['witness-triple', '[[2,1],[1,1]]', '[[1,1],[1,2]]'])
    assert result.exit_code == 2


def test_correlate_command(runner):
    result = runner.invoke(args=['correlate', '--json', '--x', '1,0', '--y=-2,-1', '-M', '[[2,1],[1,1]]',
                                 '--n', '1..3'])
    assert result.exit_code == 0
    assert [row['correlation'] for row in json.loads(result.output)] == [1, 0, 0]


def test_estimate_command(runner):
    result = runner.invoke(args=['estimate', '--json', '--rect', '0 1 0 1 @ 1', '--rect', '0 1/2 0 1/2 @ 2',
                                 '-M', '[[2,1],[1,1]]', '--Q', '64'])
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload['estimate'] == '1/4'
    assert payload['Q'] == 64


def test_scan_conjecture_csv(runner, tmp_path):
    path = tmp_path / 'scan.csv'
    result = runner.invoke(args=['scan-conjecture', '--T', '[[1,0],[1,1]]', '--S', '[[2,1],[1,1]]',
                                 '--rect', '0 1/2 0 1/2 @ 2', '--Q', '64', '--n', '1..2',
                                 '--csv', str(path)])
    assert result.exit_code == 0
    assert 'par: unipotent/hyperbolic' in result.output
    lines = path.read_text().splitlines()
    assert lines[:2] == [CSV_HEADER, 'n,estimate,error_bound']
    assert [line.split(',')[0] for line in lines[2:]] == ['1', '2']


def test_scan_conjecture_uses_default_q(runner, app):
    result = runner.invoke(args=['scan-conjecture', '--json', '--T', '[[1,0],[1,1]]', '--S', '[[2,1],[1,1]]',
                                 '--rect', '0 1/2 0 1/2 @ 2', '--n', '1..1'])
    assert json.loads(result.output)['Q'] == app.config['TORUS_DEFAULT_Q']


def test_cesaro_scan_command(runner):
    result = runner.invoke(args=['cesaro-scan', '--json', '--matrix', '[[2,1],[1,1]]',
                                 '--A', '0 1/2 0 1/2 @ 2', '--B', '0 1/2 0 1/2 @ 2', '--N', '2', '--Q', '64'])
    assert result.exit_code == 0
    assert len(json.loads(result.output)['points']) == 2


def test_krengel_command(runner):
    result = runner.invoke(args=['krengel', '--json', '--freq', '1,0', '--freq', '0,1', '-T', '[[2,1],[1,1]]'])
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload['M'] == 1 and payload['B'] == [] and payload['all_zero'] is True


def test_find_unipotent_command(runner):
    found = runner.invoke(args=['find-unipotent', '[[1,1],[0,1]]', '--L', '2'])
    assert 'Found' in found.output
    missing = runner.invoke(args=['find-unipotent', '--json', '[[2,1],[1,1]]', '--L', '3'])
    assert json.loads(missing.output) == {'result': 'NoneUpTo(3)'}


def test_scenarios_filter(runner):
    result = runner.invoke(args=['scenarios', '--json', '--filter', 'joint'])
    assert result.exit_code == 0
    names = [row['name'] for row in json.loads(result.output)]
    assert 'joint-conjugate-triple' in names and 'joint-bounded-eigenvalue' in names
    assert all(row['passed'] for row in json.loads(result.output))


def test_domain_error_exit_code(runner):
    result = runner.invoke(args=['classify', '[[2,0],[0,1]]'])
    assert result.exit_code == 2
    assert 'Erro: NonUnimodular' in result.output


def test_parse_error_exit_code(runner):
    result = runner.invoke(args=['decide-mixing', '--family', '[[n/2,1],[1,1]]'])
    assert result.exit_code == 2
    assert 'Erro: ParseError' in result.output


def test_usage_error_exit_code(runner):
    result = runner.invoke(args=['decide-mixing'])
    assert result.exit_code == 2
