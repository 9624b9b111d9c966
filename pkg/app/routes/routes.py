from flask import Blueprint, current_app, jsonify, request
from werkzeug.exceptions import BadRequest

from app.models.matrix_models import classify
from app.services.mixing_service import (
    decide_commuting_joint, decide_element_mixing, decide_joint_polyfamilies,
    decide_joint_powers, decide_polyfamily_mixing, decide_relative_joint_unipotent
)
from app.services.scenario_service import run_scenarios
from app.utils.errors import TorusError
from app.utils.parsing import parse_family, parse_matrix, parse_poly

main_bp = Blueprint('main', __name__)


def _body():
    data = request.get_json(silent=True)
    if not isinstance(data, dict):
        raise BadRequest('corpo JSON (objeto) obrigatório')
    return data


def _required(data, key):
    if key not in data:
        raise BadRequest(f'campo faltando na requisição: {key}')
    return data[key]


def _list(data, key):
    value = _required(data, key)
    if not isinstance(value, list) or not value:
        raise BadRequest(f'{key} deve ser uma lista não vazia')
    return value


@main_bp.errorhandler(ValueError)
def handle_domain_error(e):
    name = e.name if isinstance(e, TorusError) else type(e).__name__
    current_app.logger.info('requisição rejeitada: %s: %s', name, e)
    return jsonify({'error': name, 'message': str(e)}), 400


@main_bp.errorhandler(BadRequest)
def handle_bad_request(e):
    return jsonify({'error': 'BadRequest', 'message': e.description}), 400


@main_bp.route('/', methods=['GET'])
def index():
    return jsonify({'endpoints': [
        'GET /',
        'POST /classify',
        'POST /decide/mixing',
        'POST /decide/joint',
        'POST /decide/relative',
        'GET /scenarios',
    ]})


@main_bp.route('/classify', methods=['POST'])
def classify_view():
    matrix = parse_matrix(_required(_body(), 'matrix'))
    return jsonify(classify(matrix).to_dict())


@main_bp.route('/decide/mixing', methods=['POST'])
def decide_mixing_view():
    data = _body()
    if 'matrix' in data:
        verdict = decide_element_mixing(parse_matrix(data['matrix']))
    elif 'family' in data:
        verdict = decide_polyfamily_mixing(parse_family(data['family']))
    else:
        raise BadRequest('informe matrix ou family')
    current_app.logger.info('decide/mixing: %s', verdict.answer.value)
    return jsonify(verdict.to_dict())


@main_bp.route('/decide/joint', methods=['POST'])
def decide_joint_view():
    data = _body()
    if 'matrices' in data:
        matrices = [parse_matrix(m) for m in _list(data, 'matrices')]
        if data.get('commuting'):
            verdict = decide_commuting_joint(matrices)
        else:
            verdict = decide_joint_powers(matrices)
    elif 'families' in data:
        verdict = decide_joint_polyfamilies([parse_family(f) for f in _list(data, 'families')])
    else:
        raise BadRequest('informe matrices ou families')
    current_app.logger.info('decide/joint: %s', verdict.answer.value)
    return jsonify(verdict.to_dict())


@main_bp.route('/decide/relative', methods=['POST'])
def decide_relative_view():
    data = _body()
    unipotents = [parse_matrix(u) for u in _list(data, 'unipotents')]
    exponents = [parse_poly(a) for a in _list(data, 'exponents')]
    verdict = decide_relative_joint_unipotent(unipotents, exponents)
    return jsonify(verdict.to_dict())


@main_bp.route('/scenarios', methods=['GET'])
def scenarios_view():
    results = run_scenarios(request.args.get('filter'),
                            current_app.config['TORUS_WITNESS_CHECK_N'])
    return jsonify([r.to_dict() for r in results])
