"""
Published (Dis, Dim, Com) triples of the multimodal system comparison.

Columns are (feature encoder, fusion strategy, decoder). Scores are on
Train&Val; com was printed to four decimals.
"""

from typing import List, NamedTuple


class ReferenceTriple(NamedTuple):
    features: str
    strategy: str
    decoder: str
    dis: float
    dim: float
    com: float


REFERENCE_TRIPLES: List[ReferenceTriple] = [
    ReferenceTriple('MR+RF', '1', 'baseline', 0.6085, 1.2291, 0.3012),
    ReferenceTriple('MR+RF', '1', 'jdev', 0.6170, 1.1890, 0.3198),
    ReferenceTriple('HL18+HL19+HL20', '1', 'baseline', 0.6995, 0.9568, 0.4603),
    ReferenceTriple('HL18+HL19+HL20', '1', 'jdev', 0.7051, 0.9297, 0.4727),
    ReferenceTriple('HL18+HL19+HL20+MR+RF', '1', 'baseline', 0.7743, 0.6750, 0.6056),
    ReferenceTriple('HL18+HL19+HL20+MR+RF', '1', 'jdev', 0.7811, 0.6176, 0.6267),
    ReferenceTriple('HL18+HL19+HL20+MR+RF', '2', 'baseline', 0.7769, 0.6714, 0.6091),
    ReferenceTriple('HL18+HL19+HL20+MR+RF', '2', 'jdev', 0.7789, 0.6339, 0.6204),
    ReferenceTriple('HL18+HL19+HL20+MR+RF', '3', 'baseline', 0.7735, 0.6659, 0.6070),
    ReferenceTriple('HL18+HL19+HL20+MR+RF', '3', 'jdev', 0.7795, 0.6315, 0.6216),
    # printed com disagrees with dis - 0.25 * dim (0.6274)
    ReferenceTriple('HL18+HL19+HL20+MR+RF', '1+2+3 fused', 'baseline', 0.7865, 0.6364, 0.6247),
    ReferenceTriple('HL18+HL19+HL20+MR+RF', '1+2+3 fused', 'jdev', 0.7936, 0.6138, 0.6402),
]
