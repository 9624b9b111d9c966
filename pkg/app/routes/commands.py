import csv
import functools
import json
import logging

import click
from flask import current_app
from flask.cli import with_appcontext

from app.models.matrix_models import classify
from app.services.mixing_service import (
    check_rokhlin_sufficient, decide_commuting_joint, decide_element_mixing,
    decide_joint_polyfamilies, decide_joint_powers, decide_polyfamily_mixing,
    decide_relative_joint_unipotent, power_sequence, relative_witness_holds,
    verify_family_witness, verify_power_witness, verify_witness,
    witness_same_modulus_triple
)
from app.models.family_models import PowerFamily, expand_unipotent_products, n
from app.services.oracle_service import char_correlation, lattice_correlation
from app.services.recurrence_service import (
    cesaro_scan, conjecture_scan, find_unipotent, krengel_orthogonal, rokhlin_report
)
from app.services.scenario_service import run_scenarios
from app.utils.parsing import (
    parse_family, parse_freq, parse_grid, parse_matrix, parse_poly,
    parse_power_factor, parse_range, parse_trig
)

logger = logging.getLogger(__name__)

CSV_HEADER = '# torus-mixing-csv v1'

EXIT_DISAGREEMENT = 1
EXIT_USAGE = 2


def handle_errors(f):
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except ValueError as e:
            click.echo(f'Erro: {type(e).__name__}: {e}', err=True)
            raise click.exceptions.Exit(EXIT_USAGE)
    return wrapper


def _dumps(payload):
    return json.dumps(payload, sort_keys=True, indent=2)


def _emit(payload, as_json, lines):
    if as_json:
        click.echo(_dumps(payload))
    else:
        for line in lines:
            click.echo(line)


def _write_csv(path, columns, rows):
    with open(path, 'w', newline='', encoding='utf-8') as fh:
        fh.write(CSV_HEADER + '\n')
        writer = csv.writer(fh)
        writer.writerow(columns)
        writer.writerows(rows)


def _verdict_lines(verdict, verified=None):
    lines = [f'resposta: {verdict.answer.value}']
    if verdict.witness is not None:
        lines.append(f'testemunha: {[list(v) for v in verdict.witness]}')
    lines.append(f"razões: {', '.join(verdict.reason_codes()) or '-'}")
    if verified is not None:
        lines.append(f"oráculo: {'confirmado' if verified else 'DISCORDA'}")
    return lines


def _finish_verdict(verdict, as_json, verified=None):
    _emit(verdict.to_dict(), as_json, _verdict_lines(verdict, verified))
    if verified is False:
        logger.error('oráculo discorda do veredito %s', verdict.answer.value)
        raise click.exceptions.Exit(EXIT_DISAGREEMENT)


def _check_range():
    return range(1, current_app.config['TORUS_WITNESS_CHECK_N'] + 1)


def _default_q(Q):
    return Q if Q is not None else current_app.config['TORUS_DEFAULT_Q']


def _workers():
    return current_app.config['TORUS_LATTICE_WORKERS']


json_option = click.option('--json', 'as_json', is_flag=True, help='Saída JSON (chaves ordenadas).')


@click.command('classify')
@click.argument('matrix')
@json_option
@with_appcontext
@handle_errors
def classify_command(matrix, as_json):
    """Classifica uma matriz de SL(2,Z)."""
    cls = classify(parse_matrix(matrix))
    _emit(cls.to_dict(), as_json, [cls.label])


@click.command('decide-mixing')
@click.argument('matrix', required=False)
@click.option('--family', help='Família polinomial [[a(n),b(n)],[c(n),d(n)]].')
@click.option('--factor', 'factors', nargs=2, multiple=True, metavar='BASE EXP',
              help='Fator unipotente BASE^EXP(n); repetir para produtos.')
@json_option
@with_appcontext
@handle_errors
def decide_mixing_command(matrix, family, factors, as_json):
    """Decide se T^n, uma família F(n) ou um produto de potências unipotentes é misturador."""
    if sum(bool(x) for x in (matrix, family, factors)) != 1:
        raise click.UsageError('informe exatamente um de MATRIX, --family ou --factor')
    if matrix:
        T = parse_matrix(matrix)
        verdict = decide_element_mixing(T)
        verified = verify_power_witness([T], verdict, _check_range()) if verdict.is_negative else None
    else:
        if family:
            F = parse_family(family)
        else:
            F = expand_unipotent_products([parse_power_factor(b, e) for b, e in factors])
        verdict = decide_polyfamily_mixing(F)
        verified = verify_family_witness([F], verdict, _check_range()) if verdict.is_negative else None
    _finish_verdict(verdict, as_json, verified)


@click.command('decide-joint')
@click.argument('matrices', nargs=-1)
@click.option('--family', 'families', multiple=True, help='Família polinomial; repetir.')
@click.option('--commuting', is_flag=True, help='Critério para matrizes que comutam.')
@json_option
@with_appcontext
@handle_errors
def decide_joint_command(matrices, families, commuting, as_json):
    """Decide mistura conjunta de (T_1^n, ..., T_k^n) ou de famílias F_1(n), ..., F_k(n)."""
    if bool(matrices) == bool(families):
        raise click.UsageError('informe MATRICES ou --family, não ambos')
    if matrices:
        Ts = [parse_matrix(m) for m in matrices]
        verdict = decide_commuting_joint(Ts) if commuting else decide_joint_powers(Ts)
        verified = verify_power_witness(Ts, verdict, _check_range()) if verdict.is_negative else None
    else:
        Fs = [parse_family(f) for f in families]
        verdict = decide_joint_polyfamilies(Fs)
        verified = verify_family_witness(Fs, verdict, _check_range()) if verdict.is_negative else None
    _finish_verdict(verdict, as_json, verified)


@click.command('decide-relative')
@click.option('-U', 'unipotents', multiple=True, required=True, help='Matriz unipotente; repetir.')
@click.option('-a', 'exponents', multiple=True, required=True, help='Expoente a_i(n); repetir.')
@json_option
@with_appcontext
@handle_errors
def decide_relative_command(unipotents, exponents, as_json):
    """Decide mistura conjunta relativa de U_1^{a_1(n)}, ..., U_k^{a_k(n)}."""
    Us = [parse_matrix(u) for u in unipotents]
    polys = [parse_poly(a) for a in exponents]
    verdict = decide_relative_joint_unipotent(Us, polys)
    verified = None
    if verdict.is_negative:
        verified = relative_witness_holds(Us, polys, verdict, _check_range())
    _finish_verdict(verdict, as_json, verified)


@click.command('rokhlin-check')
@click.option('-T', 'matrices', multiple=True, help='Matriz hiperbólica; repetir.')
@click.option('--family', help='Família T_n para o relatório numérico.')
@click.option('-a', 'exponents', multiple=True, required=True, help='Expoente a_i(n); repetir.')
@click.option('--n', 'n_range', default='2..30', show_default=True, help='Intervalo a..b do relatório.')
@click.option('--csv', 'csv_path', type=click.Path(dir_okay=False), help='Grava n, log_ratio, gamma.')
@json_option
@with_appcontext
@handle_errors
def rokhlin_check_command(matrices, family, exponents, n_range, csv_path, as_json):
    """Condição suficiente de Rokhlin (matrizes fixas) ou relatório ||T_n||/lambda_n^gamma_n (--family)."""
    if bool(matrices) == bool(family):
        raise click.UsageError('informe -T ou --family')
    polys = [parse_poly(a) for a in exponents]
    if matrices:
        verdict = check_rokhlin_sufficient([parse_matrix(m) for m in matrices], polys)
        _finish_verdict(verdict, as_json)
        return
    report = rokhlin_report(parse_family(family), polys, parse_range(n_range))
    lines = [f"n={p['n']} gamma={p['gamma']} log_ratio={p['log_ratio']:.6f}" for p in report.points]
    lines.append(f'tendência: {report.trend} ({report.note})')
    if report.cross_check is not None:
        lines.append(f'decisor: {report.cross_check.answer.value}')
    _emit(report.to_dict(), as_json, lines)
    if csv_path:
        _write_csv(csv_path, ['n', 'log_ratio', 'gamma'], report.csv_rows())


@click.command('witness-triple')
@click.argument('matrices', nargs=3)
@json_option
@with_appcontext
@handle_errors
def witness_triple_command(matrices, as_json):
    """Testemunha (x_1, x_2, x_3) para três matrizes com o mesmo |traço|."""
    Ts = [parse_matrix(m) for m in matrices]
    witness = witness_same_modulus_triple(Ts)
    sequence = power_sequence(Ts)
    ns = range(witness.modulus, 31, witness.modulus)
    verified = verify_witness(sequence, witness.vectors + ((0, 0),), ns)
    payload = {'witness': [list(v) for v in witness.vectors], 'modulus': witness.modulus,
               'reasons': list(witness.reasons), 'verified': verified}
    _emit(payload, as_json, [f'testemunha: {payload["witness"]}',
                             f'módulo: {witness.modulus}', f'verificada (n<=30): {verified}'])
    if not verified:
        raise click.exceptions.Exit(EXIT_DISAGREEMENT)


@click.command('correlate')
@click.option('--x', 'xs', multiple=True, required=True, help='Frequência x_i "a,b"; repetir.')
@click.option('--y', 'y', required=True, help='Frequência y "a,b".')
@click.option('-M', 'matrices', multiple=True, required=True, help='Matriz M_i; repetir.')
@click.option('--n', 'n_range', help='Usa M_i^n para n no intervalo a..b.')
@json_option
@with_appcontext
@handle_errors
def correlate_command(xs, y, matrices, n_range, as_json):
    """Correlação exata de caracteres: 1 sse sum tM_i x_i + y = 0."""
    freqs = [parse_freq(x) for x in xs]
    target = parse_freq(y)
    Ms = [parse_matrix(m) for m in matrices]
    if n_range:
        sequence = power_sequence(Ms)
        rows = [(value, char_correlation(freqs, target, sequence(value))) for value in parse_range(n_range)]
    else:
        rows = [(None, char_correlation(freqs, target, Ms))]
    payload = [{'n': value, 'correlation': c} for value, c in rows]
    _emit(payload, as_json, [f'n={value}: {c}' if value is not None else str(c) for value, c in rows])


@click.command('estimate')
@click.option('--grid', '--rect', 'grids', multiple=True, required=True,
              help='Conjunto "rect x0 x1 y0 y1 @ q", JSON ou arquivo; G_0 primeiro.')
@click.option('-M', 'matrices', multiple=True, help='Matriz M_i; repetir.')
@click.option('--Q', 'Q', type=int, help='Resolução da rede (padrão TORUS_DEFAULT_Q).')
@json_option
@with_appcontext
@handle_errors
def estimate_command(grids, matrices, Q, as_json):
    """Estimativa em rede de mu(G_0 & M_1^-1 G_1 & ...) com cota de erro."""
    Q = _default_q(Q)
    estimate = lattice_correlation([parse_grid(g) for g in grids],
                                   [parse_matrix(m) for m in matrices], Q, workers=_workers())
    payload = {'Q': Q, 'estimate': str(estimate.value), 'estimate_float': float(estimate.value),
               'error_bound': str(estimate.error_bound), 'error_bound_float': float(estimate.error_bound)}
    _emit(payload, as_json, [f'estimativa: {estimate.value} ({float(estimate.value):.6f})',
                             f'cota de erro: {float(estimate.error_bound):.6f} (Q={Q})'])


@click.command('scan-conjecture')
@click.option('--T', 'matrix_t', required=True, help='Matriz T.')
@click.option('--S', 'matrix_s', required=True, help='Matriz S.')
@click.option('--rect', '--grid', 'grid', required=True, help='Conjunto D.')
@click.option('--Q', 'Q', type=int, help='Resolução da rede.')
@click.option('--n', 'n_range', default='1..6', show_default=True, help='Intervalo a..b.')
@click.option('--csv', 'csv_path', type=click.Path(dir_okay=False), help='Grava n, estimate, error_bound.')
@json_option
@with_appcontext
@handle_errors
def scan_conjecture_command(matrix_t, matrix_s, grid, Q, n_range, csv_path, as_json):
    """Estimativas de mu(D & T^n D & S^n D) com o limite teórico aplicável."""
    Q = _default_q(Q)
    report = conjecture_scan(parse_matrix(matrix_t), parse_matrix(matrix_s), parse_grid(grid),
                             parse_range(n_range), Q, workers=_workers())
    lines = [f'par: {report.pair_type}']
    lines += [f'n={p.n}  estimativa={float(p.estimate):.6f}  cota={float(p.error_bound):.6f}'
              for p in report.points]
    lines.append(f'limite teórico: {[str(v) for v in report.theoretical] or "-"}')
    lines.append(f'classificação: {report.classification}')
    _emit(report.to_dict(), as_json, lines)
    if csv_path:
        _write_csv(csv_path, ['n', 'estimate', 'error_bound'], report.csv_rows())


@click.command('cesaro-scan')
@click.option('--family', help='Família F(n).')
@click.option('--matrix', help='Matriz T (sequência T^n).')
@click.option('--A', 'grid_a', required=True, help='Conjunto A.')
@click.option('--B', 'grid_b', required=True, help='Conjunto B.')
@click.option('--N', 'count', type=int, default=10, show_default=True, help='Número de termos.')
@click.option('--Q', 'Q', type=int, help='Resolução da rede.')
@click.option('--csv', 'csv_path', type=click.Path(dir_okay=False), help='Grava n, deviation, error_bound.')
@json_option
@with_appcontext
@handle_errors
def cesaro_scan_command(family, matrix, grid_a, grid_b, count, Q, csv_path, as_json):
    """Médias (1/N) sum |mu(A & F(n)^-1 B) - mu(A) mu(B)|."""
    if bool(family) == bool(matrix):
        raise click.UsageError('informe --family ou --matrix')
    sequence = parse_family(family) if family else PowerFamily(parse_matrix(matrix), n)
    report = cesaro_scan(sequence, parse_grid(grid_a), parse_grid(grid_b), count,
                         _default_q(Q), workers=_workers())
    lines = [f'n={value}  desvio={float(dev):.6f}  cota={float(b):.6f}' for value, dev, b in report.points]
    lines.append(f'média: {float(report.average):.6f} (cota {float(report.average_bound):.6f})')
    _emit(report.to_dict(), as_json, lines)
    if csv_path:
        _write_csv(csv_path, ['n', 'deviation', 'error_bound'], report.csv_rows())


@click.command('krengel')
@click.option('--freq', 'terms', multiple=True, required=True, help='Termo "x1,x2[:c]"; repetir.')
@click.option('-T', 'matrix', required=True, help='Matriz hiperbólica T.')
@json_option
@with_appcontext
@handle_errors
def krengel_command(terms, matrix, as_json):
    """Módulo M tal que f é ortogonal a f o T^k para todo k != 0 múltiplo de M."""
    f = parse_trig(terms)
    certificate = krengel_orthogonal(f, parse_matrix(matrix))
    payload = certificate.to_dict()
    payload['f'] = f.to_dict()
    _emit(payload, as_json, [f'f: {", ".join(f"{k}:{v}" for k, v in f.to_dict().items())}',
                             f'B: {certificate.transport_set}', f'M: {certificate.modulus}',
                             f'correlações nulas (|k|<=50): {certificate.all_zero}'])
    if not certificate.all_zero:
        raise click.exceptions.Exit(EXIT_DISAGREEMENT)


@click.command('find-unipotent')
@click.argument('generators', nargs=-1, required=True)
@click.option('--L', 'max_length', type=int, default=6, show_default=True, help='Comprimento máximo.')
@json_option
@with_appcontext
@handle_errors
def find_unipotent_command(generators, max_length, as_json):
    """Busca em largura por um elemento unipotente no subgrupo gerado."""
    result = find_unipotent([parse_matrix(g) for g in generators], max_length)
    payload = result.to_dict()
    lines = [payload['result']]
    if result.found:
        lines.append(f"palavra: {payload['word']} -> {payload['matrix']}")
    _emit(payload, as_json, lines)


@click.command('scenarios')
@click.option('--filter', 'name_filter', help='Substring do nome do cenário.')
@json_option
@with_appcontext
@handle_errors
def scenarios_command(name_filter, as_json):
    """Executa os cenários de exemplo; código 1 se algum falhar."""
    results = run_scenarios(name_filter, current_app.config['TORUS_WITNESS_CHECK_N'])
    lines = [f"{'ok ' if r.passed else 'FALHOU'} {r.name}: {r.observed}" for r in results]
    _emit([r.to_dict() for r in results], as_json, lines)
    if not all(r.passed for r in results):
        raise click.exceptions.Exit(EXIT_DISAGREEMENT)


COMMANDS = [
    classify_command, decide_mixing_command, decide_joint_command, decide_relative_command,
    rokhlin_check_command, witness_triple_command, correlate_command, estimate_command,
    scan_conjecture_command, cesaro_scan_command, krengel_command, find_unipotent_command,
    scenarios_command,
]


def register_commands(app):
    for command in COMMANDS:
        app.cli.add_command(command)
