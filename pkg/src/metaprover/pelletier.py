"""Pelletier's problems 1-46, transcribed as sequent goals for LK.

Premise-conclusion problems keep their premises on the left of the
turnstile; pure validities have an empty left side.
"""

PROBLEMS: dict[int, str] = {
    1: "[| |- (P --> Q) <-> (~Q --> ~P) |]",
    2: "[| |- ~~P <-> P |]",
    3: "[| |- ~(P --> Q) --> (Q --> P) |]",
    4: "[| |- (~P --> Q) <-> (~Q --> P) |]",
    5: "[| |- ((P | Q) --> (P | R)) --> (P | (Q --> R)) |]",
    6: "[| |- P | ~P |]",
    7: "[| |- P | ~~~P |]",
    8: "[| |- ((P --> Q) --> P) --> P |]",
    9: "[| |- ((P | Q) & (~P | Q) & (P | ~Q)) --> ~(~P | ~Q) |]",
    10: "[| Q --> R, R --> P & Q, P --> Q | R |- P <-> Q |]",
    11: "[| |- P <-> P |]",
    12: "[| |- ((P <-> Q) <-> R) <-> (P <-> (Q <-> R)) |]",
    13: "[| |- (P | Q & R) <-> ((P | Q) & (P | R)) |]",
    14: "[| |- (P <-> Q) <-> ((Q | ~P) & (~Q | P)) |]",
    15: "[| |- (P --> Q) <-> (~P | Q) |]",
    16: "[| |- (P --> Q) | (Q --> P) |]",
    17: "[| |- ((P & (Q --> R)) --> S) <-> ((~P | Q | S) & (~P | ~R | S)) |]",
    18: "[| |- EXISTS y. ALL x. (F(y) --> F(x)) |]",
    19: "[| |- EXISTS x. ALL y. ALL z. ((P(y) --> Q(z)) --> (P(x) --> Q(x))) |]",
    20: ("[| |- (ALL x. ALL y. EXISTS z. ALL w. (P(x) & Q(y) --> R(z) & S(w)))"
         " --> ((EXISTS x. EXISTS y. P(x) & Q(y)) --> (EXISTS z. R(z))) |]"),
    21: ("[| EXISTS x. (P --> F(x)), EXISTS x. (F(x) --> P)"
         " |- EXISTS x. (P <-> F(x)) |]"),
    22: "[| |- (ALL x. (P <-> F(x))) --> (P <-> (ALL x. F(x))) |]",
    23: "[| |- (ALL x. (P | F(x))) <-> (P | (ALL x. F(x))) |]",
    24: ("[| ~(EXISTS x. S(x) & Q(x)),"
         " ALL x. (P(x) --> Q(x) | R(x)),"
         " ~(EXISTS x. P(x)) --> (EXISTS x. Q(x)),"
         " ALL x. (Q(x) | R(x) --> S(x))"
         " |- EXISTS x. (P(x) & R(x)) |]"),
    25: ("[| EXISTS x. P(x),"
         " ALL x. (F(x) --> ~G(x) & R(x)),"
         " ALL x. (P(x) --> G(x) & F(x)),"
         " (ALL x. (P(x) --> Q(x))) | (EXISTS x. (P(x) & R(x)))"
         " |- EXISTS x. (Q(x) & P(x)) |]"),
    26: ("[| (EXISTS x. P(x)) <-> (EXISTS x. Q(x)),"
         " ALL x. ALL y. (P(x) & Q(y) --> (R(x) <-> S(y)))"
         " |- (ALL x. (P(x) --> R(x))) <-> (ALL x. (Q(x) --> S(x))) |]"),
    27: ("[| EXISTS x. F(x) & ~G(x),"
         " ALL x. (F(x) --> H(x)),"
         " ALL x. (J(x) & I(x) --> F(x)),"
         " (EXISTS x. (H(x) & ~G(x))) --> (ALL x. (I(x) --> ~H(x)))"
         " |- ALL x. (J(x) --> ~I(x)) |]"),
    28: ("[| ALL x. (P(x) --> (ALL x. Q(x))),"
         " (ALL x. (Q(x) | R(x))) --> (EXISTS x. (Q(x) & S(x))),"
         " (EXISTS x. S(x)) --> (ALL x. (F(x) --> G(x)))"
         " |- ALL x. (P(x) & F(x) --> G(x)) |]"),
    29: ("[| EXISTS x. F(x), EXISTS x. G(x)"
         " |- ((ALL x. (F(x) --> H(x))) & (ALL x. (G(x) --> J(x))))"
         " <-> (ALL x. ALL y. (F(x) & G(y) --> H(x) & J(y))) |]"),
    30: ("[| ALL x. (F(x) | G(x) --> ~H(x)),"
         " ALL x. ((G(x) --> ~I(x)) --> F(x) & H(x))"
         " |- ALL x. I(x) |]"),
    31: ("[| ~(EXISTS x. F(x) & (G(x) | H(x))),"
         " EXISTS x. (I(x) & F(x)),"
         " ALL x. (~H(x) --> J(x))"
         " |- EXISTS x. (I(x) & J(x)) |]"),
    32: ("[| ALL x. (F(x) & (G(x) | H(x)) --> I(x)),"
         " ALL x. (I(x) & H(x) --> J(x)),"
         " ALL x. (K(x) --> H(x))"
         " |- ALL x. (F(x) & K(x) --> J(x)) |]"),
    33: ("[| |- (ALL x. (P(a) & (P(x) --> P(b)) --> P(c)))"
         " <-> ((ALL x. (~P(a) | P(x) | P(c)))"
         " & (ALL x. (~P(a) | ~P(b) | P(c)))) |]"),
    34: ("[| |- ((EXISTS x. ALL y. (P(x) <-> P(y)))"
         " <-> ((EXISTS x. Q(x)) <-> (ALL y. Q(y))))"
         " <-> ((EXISTS x. ALL y. (Q(x) <-> Q(y)))"
         " <-> ((EXISTS x. P(x)) <-> (ALL y. P(y)))) |]"),
    35: "[| |- EXISTS x. EXISTS y. (P(x,y) --> (ALL x. ALL y. P(x,y))) |]",
    36: ("[| ALL x. EXISTS y. F(x,y),"
         " ALL x. EXISTS y. G(x,y),"
         " ALL x. ALL y. ((F(x,y) | G(x,y)) --> (ALL z. ((F(y,z) | G(y,z)) --> H(x,z))))"
         " |- ALL x. EXISTS y. H(x,y) |]"),
    37: ("[| ALL z. EXISTS w. ALL x. EXISTS y. ((P(x,z) --> P(y,w)) & P(y,z) &"
         " (P(y,w) --> (EXISTS u. Q(u,w)))),"
         " ALL x. ALL z. (~P(x,z) --> (EXISTS y. Q(y,z))),"
         " (EXISTS x. EXISTS y. Q(x,y)) --> (ALL x. R(x,x))"
         " |- ALL x. EXISTS y. R(x,y) |]"),
    38: ("[| |- (ALL x. ((P(a) & (P(x) --> (EXISTS y. (P(y) & R(x,y)))))"
         " --> (EXISTS z. EXISTS w. (P(z) & R(x,w) & R(w,z)))))"
         " <-> (ALL x. ((~P(a) | P(x) | (EXISTS z. EXISTS w. (P(z) & R(x,w) & R(w,z))))"
         " & (~P(a) | ~(EXISTS y. (P(y) & R(x,y)))"
         " | (EXISTS z. EXISTS w. (P(z) & R(x,w) & R(w,z)))))) |]"),
    39: "[| |- ~(EXISTS x. ALL y. (F(y,x) <-> ~F(y,y))) |]",
    40: ("[| |- (EXISTS y. ALL x. (F(x,y) <-> F(x,x)))"
         " --> ~(ALL x. EXISTS y. ALL z. (F(z,y) <-> ~F(z,x))) |]"),
    41: ("[| ALL z. EXISTS y. ALL x. (F(x,y) <-> (F(x,z) & ~F(x,x)))"
         " |- ~(EXISTS z. ALL x. F(x,z)) |]"),
    42: ("[| |- ~(EXISTS y. ALL x. (F(x,y) <->"
         " ~(EXISTS z. (F(x,z) & F(z,x))))) |]"),
    43: ("[| ALL x. ALL y. (Q(x,y) <-> (ALL z. (F(z,x) <-> F(z,y))))"
         " |- ALL x. ALL y. (Q(x,y) <-> Q(y,x)) |]"),
    44: ("[| ALL x. (F(x) --> ((EXISTS y. (G(y) & H(x,y)))"
         " & (EXISTS y. (G(y) & ~H(x,y))))),"
         " EXISTS x. (J(x) & (ALL y. (G(y) --> H(x,y))))"
         " |- EXISTS x. (J(x) & ~F(x)) |]"),
    45: ("[| ALL x. ((F(x) & (ALL y. (G(y) & H(x,y) --> J(x,y))))"
         " --> (ALL y. (G(y) & H(x,y) --> K(y)))),"
         " ~(EXISTS y. (L(y) & K(y))),"
         " EXISTS x. (F(x) & (ALL y. (H(x,y) --> L(y)))"
         " & (ALL y. (G(y) & H(x,y) --> J(x,y))))"
         " |- EXISTS x. (F(x) & ~(EXISTS y. (G(y) & H(x,y)))) |]"),
    46: ("[| ALL x. ((F(x) & (ALL y. (F(y) & H(y,x) --> G(y)))) --> G(x)),"
         " (EXISTS x. (F(x) & ~G(x))) -->"
         " ((EXISTS x. (F(x) & ~G(x) & (ALL y. (F(y) & ~G(y) --> J(x,y)))))),"
         " ALL x. ALL y. (F(x) & F(y) & H(x,y) --> ~J(y,x))"
         " |- ALL x. (F(x) --> G(x)) |]"),
}

# classically valid goals that bounded intuitionistic search must miss
INTUITIONISTIC_SEPARATION = [
    "P | ~P",
    "~~P --> P",
    "((P --> Q) --> P) --> P",
    "(P --> Q) | (Q --> P)",
    "~~(P | ~P)",   # double negation: provable in NJ too (control case)
]
