import json
import os
import re
from fractions import Fraction

from sympy.parsing.sympy_parser import (
    convert_xor, parse_expr, standard_transformations
)

from app.models.family_models import PolyMatFamily, PowerFamily, int_poly, n
from app.models.matrix_models import Mat2Z
from app.models.oracle_models import GridSet, TrigPoly
from app.utils.errors import ParseError, TorusError

_POLY_CHARS = re.compile(r'^[n0-9+\-*^() ]+$')
_FAMILY_RE = re.compile(r'^\[\[([^,\[\]]+),([^,\[\]]+)\],\[([^,\[\]]+),([^,\[\]]+)\]\]$')
_RECT_RE = re.compile(r'^(?:rect\s+)?(\S+)\s+(\S+)\s+(\S+)\s+(\S+)\s*@\s*(\d+)$')
_RANGE_RE = re.compile(r'^(-?\d+)\.\.(-?\d+)$')
_TRANSFORMS = standard_transformations + (convert_xor,)


def _clean(text):
    return text.replace('−', '-').strip()


def _require_text(value, what):
    if not isinstance(value, str):
        raise ParseError(f'{what} deve ser texto: {value!r}')
    return value


def parse_matrix(text):
    return Mat2Z.parse(_require_text(text, 'matriz'))


def parse_poly(text):
    """Polinômio em n: lista de coeficientes "[c0,c1,...]" ou expressão com n, +, -, *, ^."""
    if isinstance(text, (int, list, tuple)):
        return int_poly(text)
    text = _clean(_require_text(text, 'polinômio'))
    if text.startswith('['):
        try:
            coeffs = json.loads(text)
        except json.JSONDecodeError as e:
            raise ParseError(f'lista de coeficientes inválida: {text!r}') from e
        if not isinstance(coeffs, list) or not all(isinstance(c, int) for c in coeffs):
            raise ParseError(f'coeficientes devem ser inteiros: {text!r}')
        return int_poly(coeffs)
    if not text or not _POLY_CHARS.match(text):
        raise ParseError(f'polinômio inválido: {text!r}')
    try:
        return int_poly(parse_expr(text, local_dict={'n': n}, transformations=_TRANSFORMS))
    except Exception as e:
        raise ParseError(f'polinômio inválido: {text!r} ({e})') from e


def parse_family(text):
    """Família [[p_a,p_b],[p_c,p_d]] com entradas polinomiais (expressões ou listas JSON)."""
    text = _clean(_require_text(text, 'família')).replace(' ', '')
    if text.startswith('[[['):
        try:
            rows = json.loads(text)
            return PolyMatFamily.from_rows([[parse_poly(e) for e in row] for row in rows])
        except TorusError:
            raise
        except (json.JSONDecodeError, TypeError, ValueError) as e:
            raise ParseError(f'família inválida: {text!r}') from e
    match = _FAMILY_RE.match(text)
    if match is None:
        raise ParseError(f'família inválida: {text!r} (formato [[a(n),b(n)],[c(n),d(n)]])')
    return PolyMatFamily(*(parse_poly(g) for g in match.groups()))


def parse_power_factor(base, exponent):
    return PowerFamily(parse_matrix(base), parse_poly(exponent))


def parse_range(text):
    match = _RANGE_RE.match(_clean(text))
    if match is None:
        raise ParseError(f'intervalo inválido: {text!r} (formato a..b)')
    start, stop = int(match.group(1)), int(match.group(2))
    if stop < start:
        raise ParseError(f'intervalo vazio: {text!r}')
    return range(start, stop + 1)


def parse_grid(text):
    """Retângulo "[rect] x0 x1 y0 y1 @ q", JSON {q, cells} ou caminho para um arquivo JSON."""
    text = _clean(text)
    match = _RECT_RE.match(text)
    if match:
        try:
            x0, x1, y0, y1 = (Fraction(g) for g in match.groups()[:4])
        except (ValueError, ZeroDivisionError) as e:
            raise ParseError(f'retângulo inválido: {text!r}') from e
        return GridSet.rect(x0, x1, y0, y1, int(match.group(5)))
    if not text.startswith('{'):
        if not os.path.exists(text):
            raise ParseError(f'conjunto inválido: {text!r}')
        with open(text, encoding='utf-8') as fh:
            text = fh.read()
    try:
        return GridSet.from_dict(json.loads(text))
    except json.JSONDecodeError as e:
        raise ParseError(f'JSON de GridSet inválido: {e}') from e


def parse_freq(text):
    try:
        x1, x2 = (int(part) for part in _clean(text).split(','))
    except ValueError as e:
        raise ParseError(f'frequência inválida: {text!r} (formato x1,x2)') from e
    return (x1, x2)


def parse_trig(terms):
    """Termos "x1,x2[:c]" com coeficiente racional c (padrão 1)."""
    coeffs = []
    for term in terms:
        freq, _, coeff = _clean(term).partition(':')
        try:
            value = Fraction(coeff) if coeff else Fraction(1)
        except (ValueError, ZeroDivisionError) as e:
            raise ParseError(f'coeficiente inválido: {term!r}') from e
        coeffs.append((parse_freq(freq), value))
    return TrigPoly.from_terms(coeffs)
