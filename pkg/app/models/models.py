from dataclasses import dataclass, field
from enum import Enum
from math import gcd


class Answer(Enum):
    MIXING = "Mixing"
    NOT_MIXING = "NotMixing"
    JOINTLY_MIXING = "JointlyMixing"
    NOT_JOINTLY_MIXING = "NotJointlyMixing"
    RELATIVELY_JOINTLY_MIXING = "RelativelyJointlyMixing"
    NOT_RELATIVELY_JOINTLY_MIXING = "NotRelativelyJointlyMixing"
    SUFFICIENT_CONDITION_HOLDS = "SufficientConditionHolds"
    UNKNOWN = "Unknown"


NEGATIVE_ANSWERS = (
    Answer.NOT_MIXING,
    Answer.NOT_JOINTLY_MIXING,
    Answer.NOT_RELATIVELY_JOINTLY_MIXING,
)


def witness_content(witness):
    return gcd(*(x for vector in witness for x in vector))


@dataclass(frozen=True)
class Verdict:
    """Resultado de um decisor.

    `witness` é uma tupla de vetores inteiros (x_1, ..., x_k, y); `modulus` é o
    passo da progressão n = 0 mod m em que a testemunha vale (1 = todo n).
    """
    answer: Answer
    witness: tuple = None
    reasons: tuple = field(default_factory=tuple)
    modulus: int = 1

    def __post_init__(self):
        object.__setattr__(self, 'reasons', tuple(self.reasons))
        if self.witness is not None:
            object.__setattr__(self, 'witness', tuple(tuple(int(x) for x in v) for v in self.witness))
        if self.answer in NEGATIVE_ANSWERS:
            if self.witness is None:
                raise ValueError(f'{self.answer.value} exige testemunha')
            if witness_content(self.witness) != 1:
                raise ValueError(f'testemunha não primitiva: {self.witness}')

    @property
    def is_negative(self):
        return self.answer in NEGATIVE_ANSWERS

    def reason_codes(self):
        codes = list(self.reasons)
        if self.modulus > 1:
            codes.append(f'ValidModulo:{self.modulus}')
        return codes

    def to_dict(self):
        return {
            'answer': self.answer.value,
            'witness': None if self.witness is None else [list(v) for v in self.witness],
            'reasons': self.reason_codes(),
        }
