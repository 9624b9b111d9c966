def test_index_lists_endpoints(client):
    response = client.get('/')
    assert response.status_code == 200
    assert 'POST /decide/mixing' in response.get_json()['endpoints']


def test_classify(client):
    response = client.post('/classify', json={'matrix': '[[0,-1],[1,0]]'})
    assert response.status_code == 200
    assert response.get_json()['label'] == 'FiniteOrder(4)'


def test_decide_mixing_matrix(client):
    response = client.post('/decide/mixing', json={'matrix': '[[2,1],[1,1]]'})
    assert response.status_code == 200
    assert response.get_json() == {'answer': 'Mixing', 'witness': None, 'reasons': ['Hyperbolic']}


def test_decide_mixing_family(client):
    response = client.post('/decide/mixing', json={'family': '[[n,n-1],[1,1]]'})
    assert response.get_json()['witness'] == [[0, 1], [-1, -1]]


def test_decide_joint(client):
    response = client.post('/decide/joint', json={
        'matrices': ['[[2,1],[1,1]]', '[[1,1],[1,2]]', '[[3,1],[-1,0]]'],
    })
    assert response.get_json()['answer'] == 'NotJointlyMixing'
    families = client.post('/decide/joint', json={
        'families': ['[[n^2,n^3-1],[1,n]]', '[[n^2,n^3-1],[1,n]]'],
    })
    assert families.get_json()['answer'] == 'NotJointlyMixing'


def test_decide_joint_commuting_rejects_noncommuting(client):
    response = client.post('/decide/joint', json={
        'matrices': ['[[2,1],[1,1]]', '[[1,1],[1,2]]'], 'commuting': True,
    })
    assert response.status_code == 400
    assert response.get_json()['error'] == 'NotCommuting'


def test_decide_relative(client):
    response = client.post('/decide/relative', json={
        'unipotents': ['[[1,1],[0,1]]', '[[1,0],[1,1]]'], 'exponents': ['n', 'n^2'],
    })
    assert response.get_json()['answer'] == 'RelativelyJointlyMixing'


def test_domain_errors_are_400(client):
    response = client.post('/classify', json={'matrix': '[[2,0],[0,1]]'})
    assert response.status_code == 400
    assert response.get_json() == {'error': 'NonUnimodular', 'message': 'det [[2,0],[0,1]] = 2, esperado 1'}
    parse = client.post('/decide/mixing', json={'matrix': 'abc'})
    assert parse.get_json()['error'] == 'ParseError'


def test_bad_requests(client):
    assert client.post('/classify', data='not json').status_code == 400
    missing = client.post('/decide/mixing', json={})
    assert missing.status_code == 400
    assert missing.get_json()['error'] == 'BadRequest'


def test_scenarios_endpoint(client):
    response = client.get('/scenarios?filter=element')
    assert response.status_code == 200
    rows = response.get_json()
    assert [row['name'] for row in rows] == ['element-hyperbolic', 'element-unipotent', 'element-finite-order']
    assert all(row['passed'] for row in rows)


def test_non_string_inputs_are_parse_errors(client):
    response = client.post('/decide/mixing', json={'matrix': 5})
    assert response.status_code == 400
    assert response.get_json()['error'] == 'ParseError'
    nested = client.post('/decide/joint', json={'matrices': [[1, 2]]})
    assert nested.status_code == 400
    assert nested.get_json()['error'] == 'ParseError'
    family = client.post('/decide/mixing', json={'family': {'a': 'n'}})
    assert family.get_json()['error'] == 'ParseError'
    exponent = client.post('/decide/relative', json={
        'unipotents': ['[[1,1],[0,1]]'], 'exponents': [{'n': 1}],
    })
    assert exponent.status_code == 400
    assert exponent.get_json()['error'] == 'ParseError'


def test_family_determinant_error_keeps_its_name(client):
    response = client.post('/decide/mixing', json={'family': '[[[1],[0]],[[0],[2]]]'})
    assert response.status_code == 400
    assert response.get_json()['error'] == 'NonUnimodular'


def test_decide_relative_negative_unipotent(client):
    response = client.post('/decide/relative', json={
        'unipotents': ['[[-1,-1],[0,-1]]'], 'exponents': ['n'],
    })
    assert response.get_json() == {
        'answer': 'NotRelativelyJointlyMixing',
        'witness': [[1], [0, -1]],
        'reasons': ['NegativeUnipotentFactor', 'ValidModulo:2'],
    }
