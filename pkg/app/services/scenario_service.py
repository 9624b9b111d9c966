"""Cenários de exemplo: cada um recalcula o resultado esperado com os decisores e o oráculo."""
import logging
from dataclasses import dataclass

from app.models.family_models import (
    PolyMatFamily, PowerFamily, expand_unipotent_products, family_power, n
)
from app.models.matrix_models import Mat2Z
from app.models.models import Answer
from app.models.oracle_models import TrigPoly
from app.services.mixing_service import (
    check_rokhlin_sufficient, decide_commuting_joint, decide_element_mixing,
    decide_joint_polyfamilies, decide_joint_powers, decide_polyfamily_mixing,
    decide_relative_joint_unipotent, family_sequence, relative_witness_holds,
    verify_family_witness, verify_power_witness
)
from app.services.oracle_service import correlation_stabilization
from app.services.recurrence_service import (
    find_unipotent, krengel_orthogonal, order2_counterexample
)

logger = logging.getLogger(__name__)

CAT = Mat2Z(2, 1, 1, 1)
SHEAR = Mat2Z(1, 1, 0, 1)
LOWER_SHEAR = Mat2Z(1, 0, 1, 1)


@dataclass(frozen=True)
class Scenario:
    name: str
    provenance: str
    expected: str
    runner: object


@dataclass
class ScenarioResult:
    name: str
    provenance: str
    expected: str
    observed: str
    passed: bool

    def to_dict(self):
        return {'name': self.name, 'provenance': self.provenance, 'expected': self.expected,
                'observed': self.observed, 'passed': self.passed}


def _element(T, expected):
    def run(check_n):
        verdict = decide_element_mixing(T)
        ok = verdict.answer is expected
        if verdict.is_negative:
            ok = ok and verify_power_witness([T], verdict, range(1, check_n + 1))
        return verdict.answer.value, ok
    return run


def _family(F, expected):
    def run(check_n):
        verdict = decide_polyfamily_mixing(F)
        ok = verdict.answer is expected
        if verdict.is_negative:
            ok = ok and verify_family_witness([F], verdict, range(1, check_n + 1))
        else:
            ok = ok and correlation_stabilization(family_sequence([F]), n_max=check_n) is not None
        return verdict.answer.value, ok
    return run


def _joint_families(families, expected):
    def run(check_n):
        verdict = decide_joint_polyfamilies(families)
        ok = verdict.answer is expected
        if verdict.is_negative:
            ok = ok and verify_family_witness(families, verdict, range(1, check_n + 1))
        return f'{verdict.answer.value} {verdict.witness}', ok
    return run


def _conjugate_triple(check_n):
    triple = [CAT, SHEAR.inverse() @ CAT @ SHEAR, LOWER_SHEAR.inverse() @ CAT @ LOWER_SHEAR]
    verdict = decide_joint_powers(triple)
    ok = verdict.answer is Answer.NOT_JOINTLY_MIXING and 'ThreeSharedModulus' in verdict.reasons
    ok = ok and verify_power_witness(triple, verdict, range(1, 31))
    pairs = [decide_joint_powers([triple[i], triple[j]]).answer for i, j in ((0, 1), (0, 2), (1, 2))]
    ok = ok and all(answer is Answer.JOINTLY_MIXING for answer in pairs)
    return f'{verdict.answer.value} {verdict.witness}; pares {[a.value for a in pairs]}', ok


def _bounded_eigenvalue(check_n):
    # F(n) = U^-n T U^n: autovalor fixo, norma crescente
    conjugated = (expand_unipotent_products([PowerFamily(SHEAR, -n)])
                  @ PolyMatFamily.constant(CAT)
                  @ expand_unipotent_products([PowerFamily(SHEAR, n)]))
    alone = decide_polyfamily_mixing(conjugated)
    pair = [conjugated, family_power(conjugated, 2)]
    verdict = decide_joint_polyfamilies(pair)
    ok = alone.answer is Answer.MIXING and verdict.answer is Answer.NOT_JOINTLY_MIXING
    ok = ok and verify_family_witness(pair, verdict, range(1, check_n + 1))
    return f'F: {alone.answer.value}; (F, F^2): {verdict.answer.value} {verdict.witness}', ok


def _unipotent_pair(factors, expected):
    def run(check_n):
        F = expand_unipotent_products(factors)
        verdict = decide_polyfamily_mixing(F)
        ok = verdict.answer is expected
        if verdict.is_negative:
            ok = ok and verify_family_witness([F], verdict, range(1, check_n + 1))
        return f'{F}: {verdict.answer.value}', ok
    return run


def _relative(unipotents, exponents, expected):
    def run(check_n):
        verdict = decide_relative_joint_unipotent(unipotents, exponents)
        ok = verdict.answer is expected
        if verdict.is_negative:
            ok = ok and relative_witness_holds(unipotents, exponents, verdict, range(1, check_n + 1))
        return f'{verdict.answer.value} {verdict.witness}', ok
    return run


def _commuting(matrices, expected):
    def run(check_n):
        verdict = decide_commuting_joint(matrices)
        other = decide_joint_powers(matrices)
        ok = verdict.answer is expected and other.answer is expected
        if verdict.is_negative:
            ok = ok and verify_power_witness(matrices, verdict, range(1, check_n + 1))
        return verdict.answer.value, ok
    return run


def _order2(check_n):
    result = order2_counterexample(CAT, Mat2Z(1, 1, 1, 2))
    ok = result.verified and result.triple_verdict.answer is Answer.NOT_JOINTLY_MIXING
    ok = ok and all(v.answer is Answer.JOINTLY_MIXING for v in result.pair_verdicts.values())
    return f'testemunha {result.witness}, verificada={result.verified}', ok


def _krengel(check_n):
    f = TrigPoly.character((1, 0)) + TrigPoly.character((0, 1))
    certificate = krengel_orthogonal(f, CAT)
    return f'M={certificate.modulus} B={certificate.transport_set}', certificate.all_zero


def _rokhlin(check_n):
    gap = check_rokhlin_sufficient([CAT, CAT], [n, n ** 2])
    flat = check_rokhlin_sufficient([CAT, CAT], [n, n + 5])
    ok = gap.answer is Answer.SUFFICIENT_CONDITION_HOLDS and flat.answer is Answer.UNKNOWN
    return f'(n, n^2): {gap.answer.value}; (n, n+5): {flat.answer.value}', ok


def _search(check_n):
    found = find_unipotent([SHEAR], 1)
    missing = find_unipotent([CAT], 6)
    return f'{found.word_str()}; {missing.to_dict()["result"]}', found.found and not missing.found


SCENARIOS = [
    Scenario('element-hyperbolic', 'hiperbólica <=> misturadora', 'Mixing',
             _element(CAT, Answer.MIXING)),
    Scenario('element-unipotent', 'frequência fixa de tT', 'NotMixing',
             _element(SHEAR, Answer.NOT_MIXING)),
    Scenario('element-finite-order', 'autovalores raízes da unidade', 'NotMixing',
             _element(Mat2Z(0, -1, 1, 0), Answer.NOT_MIXING)),
    Scenario('family-affine-not-mixing', 'T_n = [[n,n-1],[1,1]]', 'NotMixing',
             _family(PolyMatFamily(n, n - 1, 1, 1), Answer.NOT_MIXING)),
    Scenario('family-quadratic-mixing', 'T_n = [[n,n^2-1],[1,n]]', 'Mixing',
             _family(PolyMatFamily(n, n ** 2 - 1, 1, n), Answer.MIXING)),
    Scenario('family-square-mixing', 'T_n^2, T_n = [[n,n^2-1],[1,n]]', 'Mixing',
             _family(family_power(PolyMatFamily(n, n ** 2 - 1, 1, n), 2), Answer.MIXING)),
    Scenario('joint-conjugate-triple', 'no máximo duas matrizes por módulo de autovalor',
             'NotJointlyMixing; pares JointlyMixing', _conjugate_triple),
    Scenario('joint-square-not-mixing', 'T_n e T_n^2, T_n = [[n,n^2-1],[1,n]]',
             'NotJointlyMixing', _joint_families(
                 [PolyMatFamily(n, n ** 2 - 1, 1, n),
                  family_power(PolyMatFamily(n, n ** 2 - 1, 1, n), 2)],
                 Answer.NOT_JOINTLY_MIXING)),
    Scenario('joint-square-faster-growth', 'T_n e T_n^2, T_n = [[n^2,n^3-1],[1,n]]',
             'JointlyMixing', _joint_families(
                 [PolyMatFamily(n ** 2, n ** 3 - 1, 1, n),
                  family_power(PolyMatFamily(n ** 2, n ** 3 - 1, 1, n), 2)],
                 Answer.JOINTLY_MIXING)),
    Scenario('joint-bounded-eigenvalue', 'autovalor limitado: T_n^a1, T_n^a2 nunca conjuntamente',
             'F Mixing; (F, F^2) NotJointlyMixing', _bounded_eigenvalue),
    Scenario('unipotent-pair-noncommuting', 'U^-n V^n misturadora sse UV != VU', 'Mixing',
             _unipotent_pair([PowerFamily(SHEAR, -n), PowerFamily(LOWER_SHEAR, n)], Answer.MIXING)),
    Scenario('unipotent-pair-commuting', 'U^-n V^n com UV = VU', 'NotMixing',
             _unipotent_pair([PowerFamily(SHEAR, -n), PowerFamily(Mat2Z(1, 2, 0, 1), n)],
                             Answer.NOT_MIXING)),
    Scenario('relative-transverse-shears', 'sum alpha_i a_i(n) v_i + z = 0', 'RelativelyJointlyMixing',
             _relative([SHEAR, LOWER_SHEAR], [n, n ** 2], Answer.RELATIVELY_JOINTLY_MIXING)),
    Scenario('relative-same-shear', 'sum alpha_i a_i(n) v_i + z = 0', 'NotRelativelyJointlyMixing',
             _relative([SHEAR, SHEAR], [n, n + 1], Answer.NOT_RELATIVELY_JOINTLY_MIXING)),
    Scenario('relative-negative-shear', 'chi_v o (-U)^n = chi_(+-v), projeção (chi_v + chi_-v)/2',
             'NotRelativelyJointlyMixing', _relative([-SHEAR], [n], Answer.NOT_RELATIVELY_JOINTLY_MIXING)),
    Scenario('commuting-powers', 'T_i e T_i^-1 T_j hiperbólicas', 'JointlyMixing',
             _commuting([CAT, CAT @ CAT], Answer.JOINTLY_MIXING)),
    Scenario('commuting-negatives', 'T^-1 (-T) = -I', 'NotJointlyMixing',
             _commuting([CAT, -CAT], Answer.NOT_JOINTLY_MIXING)),
    Scenario('order2-conjugates', 'h_i = g^-i h g^i', 'tripla falha, pares misturam', _order2),
    Scenario('krengel-certificate', 'correlações nulas em <T^M>', 'todas nulas', _krengel),
    Scenario('rokhlin-degree-gap', 'log|l_i| a_i(n) - log|l_j| a_j(n) diverge',
             'SufficientConditionHolds / Unknown', _rokhlin),
    Scenario('search-unipotent', 'subgrupos sem unipotentes', 'encontrado / NoneUpTo', _search),
]


def list_scenarios(name_filter=None):
    return [s for s in SCENARIOS if not name_filter or name_filter in s.name]


def run_scenarios(name_filter=None, check_n=100):
    results = []
    for scenario in list_scenarios(name_filter):
        observed, passed = scenario.runner(check_n)
        logger.info('cenário %s: %s', scenario.name, 'ok' if passed else 'FALHOU')
        results.append(ScenarioResult(scenario.name, scenario.provenance, scenario.expected,
                                      observed, bool(passed)))
    return results
