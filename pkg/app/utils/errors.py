class TorusError(ValueError):
    """Erro de domínio. O nome da classe é o código de erro informado pela CLI e pela API HTTP."""

    @property
    def name(self):
        return type(self).__name__


class NonUnimodular(TorusError):
    pass


class NotHyperbolic(TorusError):
    pass


class NotUnipotent(TorusError):
    pass


class IdentityHasNoDistinguishedVector(TorusError):
    pass


class NotPolynomial(TorusError):
    pass


class TracesDiffer(TorusError):
    pass


class SharedModulusPairOnly(TorusError):
    pass


class PairwiseNotDistinct(TorusError):
    pass


class NotCommuting(TorusError):
    pass


class ResolutionMismatch(TorusError):
    pass


class CommutingUnipotents(TorusError):
    pass


class NonHyperbolicSample(TorusError):
    pass


class CommutingInputs(TorusError):
    pass


class ZeroFrequencyPresent(TorusError):
    pass


class ParseError(TorusError):
    pass
