"""Special geometry of Calabi-Yau threefold moduli, executable.

Subpackages cover: exact truncated series (series), formal deformation theory
on finite DGLA models (kuranishi), Frobenius period frames of Picard-Fuchs
operators (picard_fuchs), Weil-Petersson/special geometry samples (geometry),
Hodge frames and the extended period domain (hodge), the flat CHSV connection
family (connections), geometric quantization of linear symplectic spaces
(quantization), and the holomorphic-anomaly master operator (anomaly).
"""

__version__ = "0.1.0"
