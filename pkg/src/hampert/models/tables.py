"""Literal transcriptions of the perturbative formulas, one table per object.

Formulas are written in the mini-language of :mod:`hampert.models.transcribe`.
Unit coefficients that a printed formula leaves implicit are written out as
``1`` where the coefficient multiplies an independent term, so that they take
part in mutation sampling.  The jet variable is always spelled ``u``; for the
quasitriviality map it stands for the unperturbed field.
"""

# eps-order -> formula
HF = {
    0: "1 f",
    2: "-1/24 c f''' ux^2",
    4: "1 (1 p f''' + 1/480 c^2 f{4}) uxx^2"
       " - 1 (1/1152 c c'' f{4} + 1/1152 c c' f{5} + 1/3456 c^2 f{6}"
       " + 1/6 p' f{4} + 1/6 p f{5} - s f''') ux^4",
}

RIEM2 = {
    0: "u ux",
    2: "1/24 (2 c uxxx + 4 c' ux uxx + 1 c'' ux^3)",
    4: "2 p ux5 + 2 p' (5 uxx uxxx + 3 ux ux4) + 1 p'' (7 ux uxx^2 + 6 ux^2 uxxx)"
       " + 2 p''' ux^3 uxx",
}

K_GEN = {
    1: "1/24 c ux log(ux)",
    3: "1/5760 c^2 uxx^3 ux^-3 - 1/4 p uxx^2 ux^-1",
}

QUASI = {
    0: "u",
    2: "1/24 Dx(c uxx ux^-1 + 1 c' ux)",
    4: "Dx(c^2 Dx(1/360 uxx^3 ux^-4 - 7/1920 uxx uxxx ux^-3 + 1/1152 ux4 ux^-2)"
       " + c c' (47/5760 uxx^3 ux^-3 - 37/2880 uxx uxxx ux^-2 + 5/1152 ux4 ux^-1)"
       " + c'^2 (1/384 uxxx - 1/5760 uxx^2 ux^-1)"
       " + c c'' (1/144 uxxx - 1/360 uxx^2 ux^-1)"
       " + 1/1152 (7 c' c'' ux uxx + 1 c''^2 ux^3 + 6 c c''' ux uxx + 1 c' c''' ux^3 + 1 c c{4} ux^3)"
       " + p (1/2 uxx^3 ux^-3 - 1 uxx uxxx ux^-2 + 1/2 ux4 ux^-1)"
       " + 1 p' uxxx + 1/2 p'' ux uxx)",
}

P_CONSTRAINT = "1/960 (5 c c' - 1 c^2 q'' q'^-1)"

# (eps-order, power of D_x) -> coefficient.  Du(...) is the u-derivative of a
# coefficient, as in (c q')'.
SECOND_BRACKET = {
    (0, 1): "q",
    (0, 0): "1/2 q' ux",

    (2, 3): "1/8 c q'",
    (2, 2): "3/16 Du(c q') ux",
    (2, 1): "(1/16 c'' q' + 1/6 c' q'' + 5/48 c q''') ux^2 + 1/16 c' q' uxx + 7/48 c q'' uxx",
    (2, 0): "(1/48 c'' q'' + 1/24 c' q''' + 1/48 c q{4}) ux^3 + 1/12 (c' q'' + c q''') ux uxx"
            " + 1/24 c q'' uxxx",

    (4, 5): "1/192 (3 c c' q' + 1 c^2 q'')",
    (4, 4): "5/384 Du(3 c c' q' + 1 c^2 q'') ux",
    (4, 3): "(3/32 c' c'' q' + 1/32 c c''' q' + 3/32 c'^2 q'' + 5/48 c c'' q''"
            " - 1/240 c c' q''^2 q'^-1 + 1/480 c^2 q''^3 q'^-2 + 19/192 c c' q'''"
            " - 3/640 c^2 q'' q''' q'^-1 + 1/64 c^2 q{4}) ux^2"
            " + (3/64 c'^2 q' + 3/64 c c'' q' + 17/192 c c' q'' - 1/480 c^2 q''^2 q'^-1"
            " + 19/960 c^2 q''') uxx",
    (4, 2): "(3/128 c''^2 q' + 1/32 c' c''' q' + 1/128 c c{4} q' + 19/128 c' c'' q''"
            " + 23/384 c c''' q'' + 5/64 c c' q{4} + 7/64 c c'' q''' + 1/96 c^2 q{5}"
            " + 3/32 c'^2 q''' - 1/160 c'^2 q''^2 q'^-1 - 1/160 c c'' q''^2 q'^-1"
            " + 1/80 c c' q''^3 q'^-2 - 1/160 c^2 q''^4 q'^-3 - 17/640 c c' q'' q''' q'^-1"
            " + 21/1280 c^2 q''^2 q''' q'^-2 - 9/1280 c^2 q'''^2 q'^-1"
            " - 9/1280 c^2 q'' q{4} q'^-1) ux^3"
            " + (9/64 c' c'' q' + 3/64 c c''' q' + 11/64 c'^2 q'' + 13/64 c c'' q''"
            " - 3/160 c c' q''^2 q'^-1 + 3/320 c^2 q''^3 q'^-2 + 69/320 c c' q'''"
            " - 13/640 c^2 q'' q''' q'^-1 + 3/80 c^2 q{4}) ux uxx"
            " + (1/32 c'^2 q' + 1/32 c c'' q' + 13/192 c c' q'' - 1/320 c^2 q''^2 q'^-1"
            " + 1/60 c^2 q''') uxxx",
    (4, 1): "(1/48 c''^2 q'' + 1/32 c' c''' q'' + 1/96 c c{4} q'' - 1/160 c' c'' q''^2 q'^-1"
            " - 1/480 c c''' q''^2 q'^-1 + 1/160 c'^2 q''^3 q'^-2 + 1/160 c c'' q''^3 q'^-2"
            " - 1/80 c c' q''^4 q'^-3 + 1/160 c^2 q''^5 q'^-4 + 35/384 c' c'' q'''"
            " + 5/128 c c''' q''' - 9/640 c'^2 q'' q''' q'^-1 - 9/640 c c'' q'' q''' q'^-1"
            " + 11/320 c c' q''^2 q''' q'^-2 - 13/640 c^2 q''^3 q''' q'^-3"
            " - 1/64 c c' q'''^2 q'^-1 + 19/1280 c^2 q'' q'''^2 q'^-2 + 17/384 c'^2 q{4}"
            " + 5/96 c c'' q{4} - 1/64 c c' q'' q{4} q'^-1 + 17/1920 c^2 q''^2 q{4} q'^-2"
            " - 11/1280 c^2 q''' q{4} q'^-1 + 35/1152 c c' q{5} - 11/3840 c^2 q'' q{5} q'^-1"
            " + 1/288 c^2 q{6}) ux^4"
            " + (3/128 c''^2 q' + 1/32 c' c''' q' + 1/128 c c{4} q' + 91/384 c' c'' q''"
            " + 37/384 c c''' q'' - 1/60 c'^2 q''^2 q'^-1 - 1/60 c c'' q''^2 q'^-1"
            " + 1/30 c c' q''^3 q'^-2 - 1/60 c^2 q''^4 q'^-3 + 59/320 c'^2 q'''"
            " + 53/240 c c'' q''' - 47/640 c c' q'' q''' q'^-1 + 173/3840 c^2 q''^2 q''' q'^-2"
            " - 77/3840 c^2 q'''^2 q'^-1 + 169/960 c c' q{4} - 77/3840 c^2 q'' q{4} q'^-1"
            " + 73/2880 c^2 q{5}) ux^2 uxx"
            " + (3/128 c' c'' q' + 1/128 c c''' q' + 5/96 c'^2 q'' + 1/16 c c'' q''"
            " - 1/80 c c' q''^2 q'^-1 + 1/160 c^2 q''^3 q'^-2 + 157/1920 c c' q'''"
            " - 5/384 c^2 q'' q''' q'^-1 + 31/1920 c^2 q{4}) uxx^2"
            " + (3/64 c' c'' q' + 1/64 c c''' q' + 1/12 c'^2 q'' + 3/32 c c'' q''"
            " - 1/60 c c' q''^2 q'^-1 + 1/120 c^2 q''^3 q'^-2 + 19/160 c c' q'''"
            " - 11/640 c^2 q'' q''' q'^-1 + 11/480 c^2 q{4}) ux uxxx"
            " + (1/128 c'^2 q' + 1/128 c c'' q' + 11/384 c c' q'' - 1/320 c^2 q''^2 q'^-1"
            " + 17/1920 c^2 q''') ux4",
    (4, 0): "(1/192 c''^2 q''' + 1/128 c' c''' q''' + 1/384 c c{4} q'''"
            " - 1/640 c' c'' q'' q''' q'^-1 - 1/1920 c c''' q'' q''' q'^-1"
            " + 1/640 c'^2 q''^2 q''' q'^-2 + 1/640 c c'' q''^2 q''' q'^-2"
            " - 1/320 c c' q''^3 q''' q'^-3 + 1/640 c^2 q''^4 q''' q'^-4"
            " - 1/640 c'^2 q'''^2 q'^-1 - 1/640 c c'' q'''^2 q'^-1"
            " + 3/640 c c' q'' q'''^2 q'^-2 - 1/320 c^2 q''^2 q'''^2 q'^-3"
            " + 1/1280 c^2 q'''^3 q'^-2 + 7/384 c' c'' q{4} + 1/128 c c''' q{4}"
            " - 1/640 c'^2 q'' q{4} q'^-1 - 1/640 c c'' q'' q{4} q'^-1"
            " + 1/320 c c' q''^2 q{4} q'^-2 - 1/640 c^2 q''^3 q{4} q'^-3"
            " - 3/640 c c' q''' q{4} q'^-1 + 13/3840 c^2 q'' q''' q{4} q'^-2"
            " - 1/1280 c^2 q{4}^2 q'^-1 + 17/2304 c'^2 q{5} + 5/576 c c'' q{5}"
            " - 1/640 c c' q'' q{5} q'^-1 + 1/1280 c^2 q''^2 q{5} q'^-2"
            " - 1/960 c^2 q''' q{5} q'^-1 + 5/1152 c c' q{6} - 1/3840 c^2 q'' q{6} q'^-1"
            " + 1/2304 c^2 q{7}) ux^5"
            " + (1/64 c''^2 q'' + 1/48 c' c''' q'' + 1/192 c c{4} q''"
            " - 1/160 c' c'' q''^2 q'^-1 - 1/480 c c''' q''^2 q'^-1"
            " + 1/160 c'^2 q''^3 q'^-2 + 1/160 c c'' q''^3 q'^-2 - 1/80 c c' q''^4 q'^-3"
            " + 1/160 c^2 q''^5 q'^-4 + 97/960 c' c'' q''' + 13/320 c c''' q'''"
            " - 1/60 c'^2 q'' q''' q'^-1 - 1/60 c c'' q'' q''' q'^-1"
            " + 19/480 c c' q''^2 q''' q'^-2 - 11/480 c^2 q''^3 q''' q'^-3"
            " - 1/48 c c' q'''^2 q'^-1 + 3/160 c^2 q'' q'''^2 q'^-2 + 19/320 c'^2 q{4}"
            " + 67/960 c c'' q{4} - 1/48 c c' q'' q{4} q'^-1 + 11/960 c^2 q''^2 q{4} q'^-2"
            " - 1/80 c^2 q''' q{4} q'^-1 + 131/2880 c c' q{5} - 1/240 c^2 q'' q{5} q'^-1"
            " + 1/180 c^2 q{6}) ux^3 uxx"
            " + (7/128 c' c'' q'' + 7/384 c c''' q'' - 7/960 c'^2 q''^2 q'^-1"
            " - 7/960 c c'' q''^2 q'^-1 + 7/480 c c' q''^3 q'^-2 - 7/960 c^2 q''^4 q'^-3"
            " + 59/960 c'^2 q''' + 23/320 c c'' q''' - 1/30 c c' q'' q''' q'^-1"
            " + 13/640 c^2 q''^2 q''' q'^-2 - 3/320 c^2 q'''^2 q'^-1 + 131/1920 c c' q{4}"
            " - 3/320 c^2 q'' q{4} q'^-1 + 31/2880 c^2 q{5}) ux uxx^2"
            " + (3/64 c' c'' q'' + 1/64 c c''' q'' - 1/160 c'^2 q''^2 q'^-1"
            " - 1/160 c c'' q''^2 q'^-1 + 1/80 c c' q''^3 q'^-2 - 1/160 c^2 q''^4 q'^-3"
            " + 47/960 c'^2 q''' + 13/240 c c'' q''' - 13/480 c c' q'' q''' q'^-1"
            " + 1/60 c^2 q''^2 q''' q'^-2 - 7/960 c^2 q'''^2 q'^-1 + 49/960 c c' q{4}"
            " - 7/960 c^2 q'' q{4} q'^-1 + 23/2880 c^2 q{5}) ux^2 uxxx"
            " + (5/192 c'^2 q'' + 5/192 c c'' q'' - 1/96 c c' q''^2 q'^-1"
            " + 1/192 c^2 q''^3 q'^-2 + 3/64 c c' q''' - 1/96 c^2 q'' q''' q'^-1"
            " + 1/96 c^2 q{4}) uxx uxxx"
            " + (1/64 c'^2 q'' + 1/64 c c'' q'' - 1/160 c c' q''^2 q'^-1"
            " + 1/320 c^2 q''^3 q'^-2 + 9/320 c c' q''' - 1/160 c^2 q'' q''' q'^-1"
            " + 1/160 c^2 q{4}) ux ux4"
            " + (1/192 c c' q'' - 1/960 c^2 q''^2 q'^-1 + 1/480 c^2 q''') ux5",
}

# x = t a + b + eps^2 (...) + eps^4 (...), with phi^(k) := t a^(k) + b^(k)
STRING = {
    0: "t a + b",
    2: "c0 1/24 (t (2 a'' uxx + 1 a''' ux^2) + (2 b'' uxx + 1 b''' ux^2))",
    4: "(2 p0 (t a'' + b'') + 1/240 c0^2 (t a''' + b''')) ux4"
       " + (4 p0 (t a''' + b''') + 1/120 c0^2 (t a{4} + b{4})) uxxx ux"
       " + (4 p0 (t a{4} + b{4}) + 11/1440 c0^2 (t a{5} + b{5})) uxx ux^2"
       " + (1/2 p0 (t a{5} + b{5}) + 1/1152 c0^2 (t a{6} + b{6})) ux^4",
}
# the term that the printed relation omits; it follows from applying the
# Euler operator to the density h_F with F' = t a + b
STRING_MISSING = {
    4: "(3 p0 (t a''' + b''') + 1/160 c0^2 (t a{4} + b{4})) uxx^2",
}

# Lax pair of the fourth order ODE; u stands for U(X), primes are X-derivatives
LAX_W_PREFACTOR = "-1/120"
LAX_W = {
    (0, 0): "12 u ux + 8 z ux + 1 uxxx",
    (0, 1): "2 (16 z^2 + 8 z u + 6 u^2 + 1 uxx - 60 T)",
    (1, 0): "2 (32 z^3 - 16 z^2 u - 2 z (2 u^2 + 1 uxx + 60 T) + 8 u^3 + 2 uxx u - 1 ux^2 + 120 X)",
    (1, 1): "-12 u ux - 8 z ux - 1 uxxx",
}
LAX_U = {(0, 0): "0", (0, 1): "-1", (1, 0): "2 u - 2 z", (1, 1): "0"}
LAX_V_PREFACTOR = "1/6"
LAX_V = {
    (0, 0): "ux",
    (0, 1): "2 u + 4 z",
    (1, 0): "8 z^2 - 4 z u - 4 u^2 - 1 uxx",
    (1, 1): "-1 ux",
}
# right-hand side of X = T U - [U^3/6 + (U'^2 + 2 U U'')/24 + U''''/240]
P2_ODE = "T u - (1/6 u^3 + 1/24 (ux^2 + 2 u uxx) + 1/240 ux4)"
# U_T = -(U U' + U'''/12)
KDV_FLOW = "-(u ux + 1/12 uxxx)"
