from fiducial.regression.dataset import (
    DatasetError,
    RegressionDataset,
    load_regression_csv
)
from fiducial.regression.model import (
    REGRESSION_MODELS,
    LinearModel,
    LogisticModel,
    RegressionModel,
    logistic_model
)
from fiducial.regression.fit import (
    FitDivergence,
    FitResult,
    fit_least_squares
)
from fiducial.regression.chain import (
    BootstrapStream,
    RegressionChain,
    bootstrap_covariate_stream,
    run_regression_fiducial,
    sgd_fiducial_step
)
