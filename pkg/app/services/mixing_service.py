import logging
from dataclasses import dataclass
from itertools import combinations

from mpmath import mp, mpf, workdps
from sympy import Matrix, Rational, igcd, ilcm

from app.models.family_models import (
    FamilyTuple, coefficients, evaluate, int_poly, poly_value
)
from app.models.matrix_models import (
    Mat2Z, MatKind, classify, fixed_vector, mat_pow, positive_first
)
from app.models.models import Answer, Verdict
from app.models.oracle_models import TrigPoly, gaussian
from app.models.quadratic_models import eigen_data
from app.services.oracle_service import char_correlation, trig_correlation, trig_projection
from app.utils.errors import (
    NotCommuting, NotHyperbolic, NotUnipotent, PairwiseNotDistinct,
    SharedModulusPairOnly, TracesDiffer
)

logger = logging.getLogger(__name__)

ZERO = (0, 0)


# --- núcleo racional e escolha da testemunha ---------------------------------

def _integer_vector(column):
    values = [Rational(v) for v in column]
    scale = ilcm(*[v.q for v in values]) if len(values) > 1 else values[0].q
    ints = [int(v * scale) for v in values]
    content = igcd(*ints) if len(ints) > 1 else abs(ints[0])
    return [x // content for x in ints]


def _kernel(rows, unknowns):
    if not rows:
        return [[1 if i == j else 0 for i in range(unknowns)] for j in range(unknowns)]
    basis = Matrix(rows).nullspace()
    logger.debug('núcleo %dx%d de dimensão %d', len(rows), unknowns, len(basis))
    return [_integer_vector(list(v)) for v in basis]


def _split(flat, sizes):
    out, pos = [], 0
    for size in sizes:
        out.append(tuple(flat[pos:pos + size]))
        pos += size
    return tuple(out)


def normalize_family_witness(vectors):
    """Primeira coordenada não nula positiva, varrendo x_k, ..., x_1 e depois y."""
    scan = [x for v in list(vectors[:-1])[::-1] + [vectors[-1]] for x in v]
    lead = next((x for x in scan if x != 0), 0)
    if lead < 0:
        return tuple(tuple(-x for x in v) for v in vectors)
    return tuple(tuple(v) for v in vectors)


def normalize_tuple_witness(vectors):
    flat = positive_first([x for v in vectors for x in v])
    return _split(list(flat), [len(v) for v in vectors])


def _pick(basis, sizes, normalize):
    candidates = [normalize(_split(v, sizes)) for v in basis]
    return min(candidates, key=lambda w: [x for v in w for x in v])


# --- elemento -------------------------------------------------------------------

def decide_element_mixing(T):
    cls = classify(T)
    if cls.kind is MatKind.HYPERBOLIC:
        return Verdict(Answer.MIXING, reasons=('Hyperbolic',))
    if cls.kind is MatKind.UNIPOTENT:
        v = fixed_vector(T.transpose())
        witness = (v, tuple(-x for x in v))
        # tT^n v = (+-1)^n v
        modulus = 1 if cls.sign > 0 else 2
        return Verdict(Answer.NOT_MIXING, witness, ('UnipotentFixedFrequency',), modulus)
    witness = ((1, 0), (-1, 0))
    return Verdict(Answer.NOT_MIXING, witness, (f'FiniteOrder:{cls.order}',), cls.order)


# --- famílias polinomiais -------------------------------------------------------

def _family_kernel(families):
    """Núcleo de sum tF_i(n) x_i + y = 0 identicamente em n, incógnitas (x_1..x_k, y)."""
    k = len(families)
    unknowns = 2 * k + 2
    length = max(F.degree for F in families) + 1
    rows = []
    for r in range(2):
        for power in range(length):
            row = [0] * unknowns
            for i, F in enumerate(families):
                # linha r de tF = coluna r de F
                column = (F.a, F.c) if r == 0 else (F.b, F.d)
                for s in range(2):
                    row[2 * i + s] = coefficients(column[s], length)[power]
            if power == 0:
                row[2 * k + r] = 1
            rows.append(row)
    return _kernel(rows, unknowns)


def _decide_families(families, positive, negative):
    basis = _family_kernel(families)
    if not basis:
        return Verdict(positive, reasons=('TrivialKernel',))
    witness = _pick(basis, [2] * (len(families) + 1), normalize_family_witness)
    logger.debug('testemunha %s escolhida entre %d vetores', witness, len(basis))
    return Verdict(negative, witness, ('KernelWitness',))


def decide_polyfamily_mixing(F):
    return _decide_families([F], Answer.MIXING, Answer.NOT_MIXING)


def decide_joint_polyfamilies(families):
    return _decide_families(list(families), Answer.JOINTLY_MIXING, Answer.NOT_JOINTLY_MIXING)


# --- potências de matrizes fixas ------------------------------------------------

@dataclass(frozen=True)
class SameModulusWitness:
    vectors: tuple
    modulus: int
    reasons: tuple


def witness_same_modulus_triple(matrices):
    matrices = list(matrices)
    if len(matrices) == 2:
        raise SharedModulusPairOnly('duas matrizes com o mesmo módulo são conjuntamente misturadoras')
    if len(matrices) != 3:
        raise ValueError('são necessárias exatamente três matrizes')
    for T in matrices:
        if classify(T).kind is not MatKind.HYPERBOLIC:
            raise NotHyperbolic(f'{T} não é hiperbólica')
    if len({abs(T.trace) for T in matrices}) != 1:
        raise TracesDiffer('os traços diferem em valor absoluto')
    for S, T in combinations(matrices, 2):
        if S == T or S == -T:
            raise PairwiseNotDistinct(f'{S} = +-{T}')

    signs = [1 if T.trace > 0 else -1 for T in matrices]
    normalized = [T if s > 0 else -T for T, s in zip(matrices, signs)]
    projections = [eigen_data(T.transpose()).p_plus for T in normalized]
    # sum P+_i x_i = 0 em Q(sqrt d): partes racional e irracional de cada linha
    rows = []
    for r in range(2):
        for part in ('p', 'q'):
            row = []
            for P in projections:
                entries = (P.a, P.b) if r == 0 else (P.c, P.d)
                row += [Rational(getattr(e, part).numerator, getattr(e, part).denominator) for e in entries]
            rows.append(row)
    basis = _kernel(rows, 6)
    vectors = _pick(basis, [2, 2, 2], normalize_tuple_witness)
    reasons = ['ThreeSharedModulus']
    modulus = 1
    if len(set(signs)) > 1:
        reasons.append('NegativeTraceNormalized')
        modulus = 2
    return SameModulusWitness(vectors, modulus, tuple(reasons))


def _slot_witness(k, placements, y=ZERO):
    slots = [ZERO] * k
    for index, vector in placements.items():
        slots[index] = tuple(vector)
    return tuple(slots) + (tuple(y),)


def decide_joint_powers(matrices):
    matrices = list(matrices)
    k = len(matrices)
    for i, T in enumerate(matrices):
        element = decide_element_mixing(T)
        if element.is_negative:
            x, y = element.witness
            return Verdict(Answer.NOT_JOINTLY_MIXING, _slot_witness(k, {i: x}, y),
                           ('NonHyperbolicFactor',), element.modulus)
    for i, j in combinations(range(k), 2):
        if matrices[i] == matrices[j] or matrices[i] == -matrices[j]:
            modulus = 1 if matrices[i] == matrices[j] else 2
            witness = _slot_witness(k, {i: (1, 0), j: (-1, 0)})
            return Verdict(Answer.NOT_JOINTLY_MIXING, witness, ('EqualUpToSign',), modulus)
    groups = {}
    for i, T in enumerate(matrices):
        groups.setdefault(abs(T.trace), []).append(i)
    for trace, indices in sorted(groups.items()):
        if len(indices) >= 3:
            chosen = indices[:3]
            triple = witness_same_modulus_triple([matrices[i] for i in chosen])
            witness = _slot_witness(k, dict(zip(chosen, triple.vectors)))
            return Verdict(Answer.NOT_JOINTLY_MIXING, witness, triple.reasons, triple.modulus)
    return Verdict(Answer.JOINTLY_MIXING,
                   reasons=('AllHyperbolic', 'DistinctUpToSign', 'AtMostTwoPerModulus'))


def decide_commuting_joint(matrices):
    matrices = list(matrices)
    k = len(matrices)
    for S, T in combinations(matrices, 2):
        if S @ T != T @ S:
            raise NotCommuting(f'{S} e {T} não comutam')
    for i, T in enumerate(matrices):
        element = decide_element_mixing(T)
        if element.is_negative:
            x, y = element.witness
            return Verdict(Answer.NOT_JOINTLY_MIXING, _slot_witness(k, {i: x}, y),
                           ('NonHyperbolicFactor',), element.modulus)
    for i, j in combinations(range(k), 2):
        quotient = matrices[i].inverse() @ matrices[j]
        element = decide_element_mixing(quotient)
        if element.is_negative:
            # tT_i^n y_R + tT_j^n x_R = tT_i^n (tR^n x_R + y_R)
            x, y = element.witness
            witness = _slot_witness(k, {i: y, j: x})
            return Verdict(Answer.NOT_JOINTLY_MIXING, witness,
                           ('NonHyperbolicQuotient',), element.modulus)
    return Verdict(Answer.JOINTLY_MIXING, reasons=('HyperbolicQuotients',))


# --- condição de Rokhlin ---------------------------------------------------------

def _abs_lambda(T):
    data = eigen_data(T)
    return data, abs(data.lam)


def log_abs_lambda(T):
    """log |lambda| na precisão corrente do mpmath."""
    t = abs(T.trace)
    return mp.log((t + mp.sqrt(t * t - 4)) / 2)


def compare_log_weights(S, p, T, q):
    """Sinal de p*log|lambda_S| - q*log|lambda_T|: igualdade decidida algebricamente."""
    if p == 0 and q == 0:
        return 0
    if (p > 0) != (q > 0) or p == 0 or q == 0:
        return (p > 0) - (p < 0) if p else -((q > 0) - (q < 0))
    data_s, lam_s = _abs_lambda(S)
    data_t, lam_t = _abs_lambda(T)
    if data_s.d == data_t.d and lam_s ** p == lam_t ** q:
        return 0
    # valores distintos: dobrar a precisão até a diferença superar a margem de erro
    dps = 30
    while True:
        with workdps(dps):
            diff = p * log_abs_lambda(S) - q * log_abs_lambda(T)
            if abs(diff) > mpf(10) ** (10 - dps):
                return 1 if diff > 0 else -1
        dps *= 2


def _pair_diverges(S, a, T, b):
    length = max(a.degree(), b.degree(), 0) + 1
    ca, cb = coefficients(a, length), coefficients(b, length)
    for m in range(length - 1, 0, -1):
        sign = compare_log_weights(S, ca[m], T, cb[m])
        if sign:
            return True, m, sign
    return False, 0, 0


def check_rokhlin_sufficient(matrices, exponents):
    matrices = list(matrices)
    exponents = [int_poly(a) for a in exponents]
    if len(matrices) != len(exponents):
        raise ValueError('número de matrizes e de expoentes diferente')
    for T in matrices:
        if classify(T).kind is not MatKind.HYPERBOLIC:
            raise NotHyperbolic(f'{T} não é hiperbólica')
    reasons = []
    holds = True
    for i, a in enumerate(exponents, start=1):
        if a.degree() < 1:
            holds = False
            reasons.append(f'BoundedGap:0,{i}')
    for (i, S), (j, T) in combinations(enumerate(matrices, start=1), 2):
        diverges, degree, sign = _pair_diverges(S, exponents[i - 1], T, exponents[j - 1])
        if diverges:
            reasons.append(f"Diverges:{i},{j}:deg{degree}:{'+' if sign > 0 else '-'}")
        else:
            holds = False
            reasons.append(f'BoundedGap:{i},{j}')
    answer = Answer.SUFFICIENT_CONDITION_HOLDS if holds else Answer.UNKNOWN
    return Verdict(answer, reasons=tuple(reasons))


# --- mistura relativa ------------------------------------------------------------

def _negative_unipotent_verdict(k, index, exponent, v):
    """(-U)^a(n) leva chi_v em chi_{+-v}; a projeção nas funções (-U)-invariantes é (chi_v + chi_-v)/2."""
    start, step = poly_value(exponent, 0) % 2, poly_value(exponent, 1) % 2
    sign = -1 if start else 1
    alpha = tuple(1 if i == index else 0 for i in range(k))
    z = (-sign * v[0], -sign * v[1])
    return Verdict(Answer.NOT_RELATIVELY_JOINTLY_MIXING, (alpha, z),
                   ('NegativeUnipotentFactor',), 1 if start == step else 2)


def decide_relative_joint_unipotent(unipotents, exponents):
    unipotents = list(unipotents)
    exponents = [int_poly(a) for a in exponents]
    if len(unipotents) != len(exponents):
        raise ValueError('número de matrizes e de expoentes diferente')
    vectors = []
    for U in unipotents:
        cls = classify(U)
        if cls.kind is not MatKind.UNIPOTENT:
            raise NotUnipotent(f'{U} não é unipotente ({cls.label})')
        vectors.append(fixed_vector(U.transpose()))
    k = len(unipotents)
    for i, U in enumerate(unipotents):
        if U.trace < 0:
            return _negative_unipotent_verdict(k, i, exponents[i], vectors[i])
    length = max(max(a.degree(), 0) for a in exponents) + 1
    rows = []
    for r in range(2):
        for power in range(length):
            row = [coefficients(a, length)[power] * v[r] for a, v in zip(exponents, vectors)]
            row += [1 if (power == 0 and s == r) else 0 for s in range(2)]
            rows.append(row)
    basis = _kernel(rows, k + 2)
    if not basis:
        return Verdict(Answer.RELATIVELY_JOINTLY_MIXING, reasons=('TrivialKernel',))
    witness = _pick(basis, [k, 2], normalize_tuple_witness)
    return Verdict(Answer.NOT_RELATIVELY_JOINTLY_MIXING, witness, ('KernelWitness',))


def _sign_witness_holds(U, exponent, v, z, modulus, ns):
    projected = trig_correlation(
        [trig_projection(TrigPoly.character(v), U), TrigPoly.character(z)], [Mat2Z.identity()])
    if projected == gaussian(1):
        return False
    for value in ns:
        if value % modulus:
            continue
        if char_correlation([v], z, [mat_pow(U, poly_value(exponent, value))]) != 1:
            return False
    return True


def relative_witness_holds(unipotents, exponents, verdict, ns):
    """Reavalia (alpha, z) nos n da progressão do veredito.

    Com um fator -U a testemunha é conferida no oráculo: correlação 1 contra a
    projeção simetrizada. Nos demais casos vale sum alpha_i a_i(n) v_i + z = 0.
    """
    witness = verdict.witness if isinstance(verdict, Verdict) else verdict
    modulus = verdict.modulus if isinstance(verdict, Verdict) else 1
    alpha, z = witness
    unipotents = list(unipotents)
    exponents = [int_poly(a) for a in exponents]
    vectors = [fixed_vector(U.transpose()) for U in unipotents]
    for coefficient, U, a, v in zip(alpha, unipotents, exponents, vectors):
        if coefficient and U.trace < 0:
            return _sign_witness_holds(U, a, v, z, modulus, ns)
    for value in ns:
        if value % modulus:
            continue
        total = list(z)
        for coefficient, a, v in zip(alpha, exponents, vectors):
            scale = coefficient * poly_value(a, value)
            total = [total[r] + scale * v[r] for r in range(2)]
        if total != [0, 0]:
            return False
    return True


# --- verificação pelo oráculo -----------------------------------------------------

def verify_witness(sequence, verdict, ns):
    """Reavalia a testemunha com char_correlation para cada n da progressão do veredito."""
    witness = verdict.witness if isinstance(verdict, Verdict) else verdict
    modulus = verdict.modulus if isinstance(verdict, Verdict) else 1
    xs, y = list(witness[:-1]), witness[-1]
    for value in ns:
        if value % modulus:
            continue
        if char_correlation(xs, y, sequence(value)) != 1:
            logger.warning('testemunha %s falhou em n=%d', witness, value)
            return False
    return True


def power_sequence(matrices):
    matrices = list(matrices)
    return lambda value: [mat_pow(T, value) for T in matrices]


def family_sequence(families):
    return FamilyTuple(families).at


def verify_family_witness(families, verdict, ns):
    return verify_witness(family_sequence(families), verdict, ns)


def verify_power_witness(matrices, verdict, ns):
    return verify_witness(power_sequence(matrices), verdict, ns)

