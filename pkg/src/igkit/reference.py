"""Published benchmark values for the CCPP dataset (9,568 rows).

Used only to annotate reports with the observed deviation; nothing in the
library is tuned to them.
"""

CORRELATIONS = {
    "T-PE": {"r": -0.948, "t_statistic": -294.32, "ci": [-0.950, -0.946]},
    "V-PE": {"r": -0.421, "t_statistic": -45.23, "ci": [-0.437, -0.405]},
    "AP-PE": {"r": 0.264, "t_statistic": 26.72, "ci": [0.245, 0.283]},
    "RH-PE": {"r": 0.389, "t_statistic": 41.24, "ci": [0.372, 0.406]},
}

KS_STATISTICS = {"ig": 0.2291, "normal": 0.0887, "exponential": 0.2217}

CV_5FOLD = {
    "train": {"mse": 12.34, "mae": 2.87, "r2": 0.934},
    "test": {"mse": 13.21, "mae": 2.95, "r2": 0.928},
}

N_ROWS = 9568
