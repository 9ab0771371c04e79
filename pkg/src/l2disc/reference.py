"""Published reference values used by the comparison reports.

Root (not squared) discrepancy values in d = 2, transcribed verbatim from
the published tables: per-measure optimized and Sobol values at n = 16,
32, 64, 128, 256, and optimized values at n = 10, 20, ..., 120.  The
centered entry 0.122 at n = 32 breaks its column's monotone trend and
exceeds its own baseline — likely a misprint for 0.0122 — and is kept
verbatim; reports show published and computed side by side without
correcting either.
"""

from __future__ import annotations

__all__ = [
    "TABLE3_NS",
    "TABLE3_ORDER",
    "TABLE3_OPT",
    "TABLE3_SOBOL",
    "TABLE4_NS",
    "TABLE4_ORDER",
    "TABLE4_OPT",
    "SOBOL_STAR_16_D2",
]

#: Anchor value: published root star discrepancy of the first 16 Sobol
#: points in d = 2.
SOBOL_STAR_16_D2 = 0.0478

TABLE3_NS = (16, 32, 64, 128, 256)

#: Row order of the published optimized-vs-Sobol table.
TABLE3_ORDER = ("ctr", "sym", "ext", "per", "asd", "star", "mix")

TABLE3_OPT = {
    "ctr": {16: 0.0216, 32: 0.122, 64: 0.0068, 128: 0.0036, 256: 0.0020},
    "sym": {16: 0.0176, 32: 0.0103, 64: 0.0057, 128: 0.0033, 256: 0.0018},
    "ext": {16: 0.0159, 32: 0.0088, 64: 0.0049, 128: 0.0027, 256: 0.0015},
    "per": {16: 0.0381, 32: 0.0208, 64: 0.0114, 128: 0.0060, 256: 0.0034},
    "asd": {16: 0.0275, 32: 0.0149, 64: 0.0082, 128: 0.0043, 256: 0.0023},
    "star": {16: 0.0253, 32: 0.0136, 64: 0.0075, 128: 0.0041, 256: 0.0022},
    "mix": {16: 0.0413, 32: 0.0218, 64: 0.0120, 128: 0.0062, 256: 0.0034},
}

TABLE3_SOBOL = {
    "ctr": {16: 0.0319, 32: 0.0194, 64: 0.0093, 128: 0.0054, 256: 0.0039},
    "sym": {16: 0.0317, 32: 0.0172, 64: 0.0105, 128: 0.0059, 256: 0.0033},
    "ext": {16: 0.0192, 32: 0.0161, 64: 0.0111, 128: 0.0052, 256: 0.0028},
    "per": {16: 0.0411, 32: 0.0234, 64: 0.0131, 128: 0.0089, 256: 0.0052},
    "asd": {16: 0.0358, 32: 0.0217, 64: 0.0174, 128: 0.0069, 256: 0.0043},
    "star": {16: 0.0478, 32: 0.0212, 64: 0.0101, 128: 0.0059, 256: 0.0045},
    "mix": {16: 0.0511, 32: 0.0289, 64: 0.0139, 128: 0.0084, 256: 0.0057},
}

TABLE4_NS = tuple(range(10, 121, 10))

#: Column order of the published small-n optimized table.
TABLE4_ORDER = ("star", "asd", "mix", "ctr", "per", "sym", "ext")

# The mixture and extreme columns are identical as published.
TABLE4_OPT = {
    "star": dict(zip(TABLE4_NS, (0.0398, 0.0211, 0.0145, 0.0116, 0.0094,
                                 0.0080, 0.0069, 0.0061, 0.0057, 0.0050,
                                 0.0046, 0.0045))),
    "asd": dict(zip(TABLE4_NS, (0.0421, 0.0222, 0.0163, 0.0122, 0.0100,
                                0.0084, 0.0070, 0.0066, 0.0059, 0.0053,
                                0.0047, 0.0045))),
    "mix": dict(zip(TABLE4_NS, (0.0589, 0.0325, 0.0225, 0.0177, 0.0138,
                                0.0116, 0.0099, 0.0092, 0.0084, 0.0074,
                                0.0069, 0.0063))),
    "ctr": dict(zip(TABLE4_NS, (0.0307, 0.0178, 0.0128, 0.0098, 0.0083,
                                0.0069, 0.0062, 0.0055, 0.0049, 0.0044,
                                0.0040, 0.0037))),
    "per": dict(zip(TABLE4_NS, (0.0585, 0.0329, 0.0217, 0.0171, 0.0140,
                                0.0120, 0.0106, 0.0094, 0.0086, 0.0077,
                                0.0071, 0.0066))),
    "sym": dict(zip(TABLE4_NS, (0.0269, 0.0149, 0.0111, 0.0087, 0.0071,
                                0.0061, 0.0054, 0.0048, 0.0044, 0.0040,
                                0.0037, 0.0034))),
    "ext": dict(zip(TABLE4_NS, (0.0589, 0.0325, 0.0225, 0.0177, 0.0138,
                                0.0116, 0.0099, 0.0092, 0.0084, 0.0074,
                                0.0069, 0.0063))),
}
