import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from mpmath import iv

from app.models.family_models import (
    PolyMatFamily, evaluate, family_power, int_poly, poly_value
)
from app.models.matrix_models import Mat2Z, MatKind, classify, fixed_vector, mat_pow
from app.models.oracle_models import gaussian
from app.services.mixing_service import (
    decide_joint_polyfamilies, decide_joint_powers, verify_power_witness,
    witness_same_modulus_triple
)
from app.services.oracle_service import (
    lattice_correlation, limit_two_unipotents, trig_correlation
)
from app.utils.errors import (
    CommutingInputs, NonHyperbolicSample, NotHyperbolic, NotUnipotent,
    ZeroFrequencyPresent
)

logger = logging.getLogger(__name__)


def _fraction_dict(value):
    if value is None:
        return None
    return {'exact': str(value), 'float': float(value)}


# --- projeção de conjuntos de grade ------------------------------------------

def projection_norm2(D, U):
    """||P_U 1_D||^2 exato, para U unipotente cujo vetor fixo de tU é um eixo."""
    cls = classify(U)
    if cls.kind is not MatKind.UNIPOTENT or cls.sign < 0:
        raise NotUnipotent(f'{U} não é unipotente de traço 2')
    v = fixed_vector(U.transpose())
    if v == (1, 0):
        counts = D.column_counts()
    elif v == (0, 1):
        counts = D.row_counts()
    else:
        raise ValueError(f'vetor fixo {v} não é um eixo coordenado')
    return Fraction(sum(int(c) * int(c) for c in counts), D.q ** 3)


# --- varredura da conjectura de recorrência ----------------------------------

@dataclass
class ScanPoint:
    n: int
    estimate: Fraction
    error_bound: Fraction
    plateau: bool

    def to_dict(self):
        return {'n': self.n, 'estimate': _fraction_dict(self.estimate),
                'error_bound': _fraction_dict(self.error_bound), 'plateau': self.plateau}


@dataclass
class ScanReport:
    pair_type: str
    points: list
    theoretical: list
    classification: str
    comparisons: dict = field(default_factory=dict)
    Q: int = None

    def to_dict(self):
        return {
            'pair_type': self.pair_type,
            'Q': self.Q,
            'points': [p.to_dict() for p in self.points],
            'theoretical': [_fraction_dict(v) if isinstance(v, Fraction) else v for v in self.theoretical],
            'classification': self.classification,
            'comparisons': {k: _fraction_dict(v) for k, v in sorted(self.comparisons.items())},
        }

    def csv_rows(self):
        return [(p.n, float(p.estimate), float(p.error_bound)) for p in self.points]


def _pair_limits(T, S, D):
    """(tipo do par, valores limite teóricos) para mu(D & T^n D & S^n D)."""
    mu = D.measure
    kind_t, kind_s = classify(T).kind, classify(S).kind
    hyperbolic = MatKind.HYPERBOLIC
    if kind_t is hyperbolic and kind_s is hyperbolic:
        if T == S:
            return 'equal', [mu * mu]
        if T == -S:
            cap = D.intersection(D.negated()).measure
            return 'negatives', [mu * mu, cap * mu]
        return 'hyperbolic/hyperbolic', [mu ** 3]
    kinds = {kind_t, kind_s}
    if kinds == {hyperbolic, MatKind.UNIPOTENT}:
        U = T if kind_t is MatKind.UNIPOTENT else S
        try:
            return 'unipotent/hyperbolic', [mu * projection_norm2(D, U)]
        except (ValueError, NotUnipotent):
            return 'unipotent/hyperbolic', []
    if kind_t is MatKind.UNIPOTENT and kind_s is MatKind.UNIPOTENT:
        if T @ S == S @ T:
            # caso em aberto: só estimativas
            return 'unipotent/unipotent commuting', []
        if T.trace == 2 and S.trace == 2:
            series = limit_two_unipotents(D, D, D, T, S, R=200)
            return 'unipotent/unipotent', [series.value.real]
        return 'unipotent/unipotent', []
    return 'other', []


def _within(point, value):
    return abs(float(point.estimate) - float(value)) <= float(point.error_bound)


def _classify_scan(pair_type, points, theoretical):
    plateau = [p for p in points if p.plateau][-3:]
    if not plateau or not theoretical:
        return 'undetermined'
    if pair_type == 'negatives':
        even, odd = theoretical
        ok = all(_within(p, even if p.n % 2 == 0 else odd) for p in plateau)
        return 'two-point' if ok else 'undetermined'
    return 'constant' if all(_within(p, theoretical[0]) for p in plateau) else 'undetermined'


def conjecture_scan(T, S, D, ns, Q, workers=1):
    """Estimativas de mu(D & T^n D & S^n D) = int 1_D(xi) 1_D(T^-n xi) 1_D(S^-n xi)."""
    pair_type, theoretical = _pair_limits(T, S, D)
    points = []
    for value in ns:
        matrices = [mat_pow(T, -value), mat_pow(S, -value)]
        estimate = lattice_correlation([D, D, D], matrices, Q, workers=workers)
        plateau = max(M.norm for M in matrices) * D.q <= Q // 16
        points.append(ScanPoint(value, estimate.value, estimate.error_bound, plateau))
        logger.debug('n=%d estimativa=%s cota=%s', value, estimate.value, estimate.error_bound)
    mu = D.measure
    comparisons = {'mu2': mu * mu, 'mu3': mu ** 3,
                   'mu_cap_neg_mu': D.intersection(D.negated()).measure * mu}
    classification = _classify_scan(pair_type, points, theoretical)
    return ScanReport(pair_type, points, theoretical, classification, comparisons, Q)


# --- médias de Cesàro ---------------------------------------------------------

@dataclass
class CesaroReport:
    points: list
    average: Fraction
    average_bound: Fraction

    def to_dict(self):
        return {'points': [{'n': n, 'deviation': _fraction_dict(dev), 'error_bound': _fraction_dict(b)}
                           for n, dev, b in self.points],
                'average': _fraction_dict(self.average),
                'average_bound': _fraction_dict(self.average_bound)}

    def csv_rows(self):
        return [(n, float(dev), float(b)) for n, dev, b in self.points]


def cesaro_scan(family, A, B, N, Q, workers=1):
    """(1/N) sum_{n<=N} |mu(A & F(n)^-1 B) - mu(A) mu(B)| a partir da rede."""
    product = A.measure * B.measure
    points = []
    for value in range(1, N + 1):
        estimate = lattice_correlation([A, B], [evaluate(family, value)], Q, workers=workers)
        points.append((value, abs(estimate.value - product), estimate.error_bound))
    average = sum((dev for _, dev, _ in points), Fraction(0)) / N
    bound = sum((b for _, _, b in points), Fraction(0)) / N
    return CesaroReport(points, average, bound)


# --- relatório da condição de Rokhlin -----------------------------------------

TO_ZERO = 'to_zero'
BOUNDED = 'bounded'
UNBOUNDED = 'unbounded'
UNDETERMINED = 'undetermined'


@dataclass
class RokhlinReport:
    points: list
    trend: str
    cross_check: object = None
    note: str = 'condição apenas suficiente'

    def to_dict(self):
        return {'points': self.points, 'trend': self.trend, 'note': self.note,
                'cross_check': None if self.cross_check is None else self.cross_check.to_dict()}

    def csv_rows(self):
        return [(p['n'], p['log_ratio'], p['gamma']) for p in self.points]


def _gamma(exponents, value):
    values = [0] + [poly_value(a, value) for a in exponents]
    return min(abs(x - y) for x, y in combinations(values, 2))


def _log_ratio(M, gamma):
    """Intervalo certificado para log ||M|| - gamma log |lambda_M|."""
    t = abs(M.trace)
    lam = (iv.mpf(t) + iv.sqrt(iv.mpf(t * t - 4))) / 2
    return iv.ln(iv.mpf(M.norm)) - gamma * iv.ln(lam)


def _certain(comparison):
    return comparison is True


def _trend(values):
    """Tendência de log(||T_n|| / lambda_n^gamma_n) na segunda metade da amostra.

    Cada critério só vale se for decidido pelos intervalos; comparações indecididas não contam.
    """
    tail = values[len(values) // 2:]
    if len(tail) < 2:
        return UNDETERMINED
    increasing = all(_certain(b > a) for a, b in zip(tail, tail[1:]))
    decreasing = all(_certain(b < a) for a, b in zip(tail, tail[1:]))
    if decreasing and _certain(tail[-1] < -5):
        return TO_ZERO
    if increasing and _certain(tail[-1] - tail[0] >= 0.5):
        return UNBOUNDED
    hi = max((v.b for v in tail), key=float)
    lo = min((v.a for v in tail), key=float)
    if not increasing and _certain(hi - lo < 1):
        return BOUNDED
    return UNDETERMINED


def rokhlin_report(family, exponents, ns):
    """||T_n|| / lambda_n^gamma_n por n, com gamma_n = min |a_i(n) - a_j(n)| (a_0 = 0)."""
    exponents = [int_poly(a) for a in exponents]
    points, values = [], []
    for value in ns:
        M = evaluate(family, value)
        if classify(M).kind is not MatKind.HYPERBOLIC:
            raise NonHyperbolicSample(f'T_{value} = {M} não é hiperbólica')
        gamma = _gamma(exponents, value)
        log_ratio = _log_ratio(M, gamma)
        values.append(log_ratio)
        points.append({'n': value, 'norm': M.norm, 'gamma': gamma,
                       'log_ratio': float(log_ratio.mid),
                       'log_ratio_lo': float(log_ratio.a),
                       'log_ratio_hi': float(log_ratio.b)})
    cross_check = None
    if isinstance(family, PolyMatFamily) and all(a.degree() <= 0 for a in exponents):
        powers = [poly_value(a, 0) for a in exponents]
        if all(p >= 1 for p in powers):
            cross_check = decide_joint_polyfamilies([family_power(family, p) for p in powers])
    return RokhlinReport(points, _trend(values), cross_check)


# --- contraexemplo de ordem 2 --------------------------------------------------

@dataclass
class Order2Counterexample:
    triple: tuple
    witness: tuple
    modulus: int
    verified: bool
    triple_verdict: object
    pair_verdicts: dict

    def to_dict(self):
        return {
            'triple': [str(M) for M in self.triple],
            'witness': [list(v) for v in self.witness],
            'modulus': self.modulus,
            'verified': self.verified,
            'triple_verdict': self.triple_verdict.to_dict(),
            'pair_verdicts': {key: v.to_dict() for key, v in sorted(self.pair_verdicts.items())},
        }


def order2_counterexample(g, h, check_n=30):
    for M in (g, h):
        if classify(M).kind is not MatKind.HYPERBOLIC:
            raise NotHyperbolic(f'{M} não é hiperbólica')
    if g @ h == h @ g:
        raise CommutingInputs(f'{g} e {h} comutam')
    g2 = g @ g
    if g2 @ h == h @ g2:
        raise CommutingInputs('g^2 e h comutam')
    triple = tuple(mat_pow(g, -i) @ h @ mat_pow(g, i) for i in (1, 2, 3))
    witness = witness_same_modulus_triple(triple)
    ns = range(witness.modulus, check_n + 1, witness.modulus)
    verified = verify_power_witness(triple, witness.vectors + ((0, 0),), ns)
    pairs = {f'{i + 1},{j + 1}': decide_joint_powers([triple[i], triple[j]])
             for i, j in combinations(range(3), 2)}
    return Order2Counterexample(triple, witness.vectors, witness.modulus, verified,
                                decide_joint_powers(triple), pairs)


# --- busca de unipotentes --------------------------------------------------------

@dataclass
class UnipotentSearch:
    found: bool
    word: tuple
    matrix: Mat2Z
    max_length: int

    def word_str(self):
        return ' '.join(f'g{i}' if e > 0 else f'g{i}^-1' for i, e in self.word)

    def to_dict(self):
        if not self.found:
            return {'result': f'NoneUpTo({self.max_length})'}
        return {'result': 'Found', 'word': self.word_str(), 'length': len(self.word),
                'matrix': str(self.matrix)}


def _is_unipotent_type(M):
    return classify(M).kind is MatKind.UNIPOTENT


def find_unipotent(generators, L):
    """BFS em palavras reduzidas de comprimento <= L, ordem (comprimento, lexicográfica)."""
    if L < 1:
        raise ValueError('L deve ser >= 1')
    letters = []
    for i, M in enumerate(generators):
        classify(M)
        letters += [((i, 1), M), ((i, -1), M.inverse())]
    seen = {Mat2Z.identity()}
    queue = deque([((), Mat2Z.identity())])
    while queue:
        word, M = queue.popleft()
        if len(word) == L:
            continue
        for letter, A in letters:
            if word and word[-1] == (letter[0], -letter[1]):
                continue
            product = M @ A
            if product in seen:
                continue
            seen.add(product)
            candidate = word + (letter,)
            if _is_unipotent_type(product):
                return UnipotentSearch(True, candidate, product, L)
            queue.append((candidate, product))
    logger.debug('nenhum unipotente até comprimento %d (%d matrizes)', L, len(seen))
    return UnipotentSearch(False, (), None, L)


# --- ortogonalização de Krengel --------------------------------------------------

@dataclass
class KrengelCertificate:
    modulus: int
    transport_set: list
    checked: list
    all_zero: bool

    def to_dict(self):
        return {'M': self.modulus, 'B': self.transport_set,
                'checked': self.checked, 'all_zero': self.all_zero}


def _transport_hits(T, support, direction):
    """k > 0 (no sentido dado) com tT^k x em support, parando quando a norma só cresce."""
    if not support:
        return set()
    step = T.transpose() if direction > 0 else T.inverse().transpose()
    targets = set(support)
    bound = max(max(abs(a), abs(b)) for a, b in support)
    hits = set()
    for x in support:
        previous, current, k = x, step.apply(x), 1
        while True:
            if current in targets:
                hits.add(direction * k)
            size = max(abs(current[0]), abs(current[1]))
            # para |traço| >= 3 a norma máxima cresce para sempre a partir daqui
            if size >= max(abs(previous[0]), abs(previous[1])) and size > bound:
                break
            previous, current, k = current, step.apply(current), k + 1
    return hits


def krengel_orthogonal(f, T, k_max=50):
    if f.mean() != gaussian(0):
        raise ZeroFrequencyPresent('f^(0) != 0: a frequência zero sempre se correlaciona consigo')
    if classify(T).kind is not MatKind.HYPERBOLIC:
        raise NotHyperbolic(f'{T} não é hiperbólica')
    support = f.support()
    hits = _transport_hits(T, support, 1) | _transport_hits(T, support, -1)
    modulus = 1 + max((abs(k) for k in hits), default=0)
    conjugate = f.conjugate()
    checked = [k for k in range(-k_max, k_max + 1) if k and k % modulus == 0]
    all_zero = all(trig_correlation([f, conjugate], [mat_pow(T, k)]) == gaussian(0) for k in checked)
    return KrengelCertificate(modulus, sorted(hits), checked, all_zero)
