"""Reference constants frozen from tests/derive_values.py (mpmath, closed forms).

Regenerate with:  python tests/derive_values.py
"""

H_01 = 0.46899559358928124
F_BSC01_BEC05_HALF = 0.031004406410718761
OBJ_TRIVIAL_MU1_BSC01_BEC05 = 0.56200881282143752
CB_BSC01 = 0.53100440641071876
FMIN_BSC01_BEC04 = -0.075445980140716605
CS_BSC01_BEC04 = 0.006450386551435388
FMIN_BSC01_BEC06 = -0.0080315461456000502
CS_BSC01_BEC06 = 0.13903595255631879
CS_BEC045_BSC01 = 0.046874579506174681
ARGMAX_BEC045_BSC01 = 0.097477885845995623
CS_BEC05_BSC01 = 0.032069142077386314
TANGENT_BEC05_BSC01 = 0.4156635315167628
MUSTAR_BSC01_BEC04 = 0.019891910796390342
MUSTAR_BEC05_BSC01 = 0.062008812821437522
SEC53_C = 0.10666666666666667
SEC53_EPS_STAR = 0.41941770359746197
SEC53_EPS_TOP = 0.42043210231568789
CS_BSC01_BSC02 = 0.25293250129808113
VANDIJK_CB_01_02 = 0.4045381557616782
