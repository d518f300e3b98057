"""Input validation for genome matrices and label vectors."""
import numpy as np
from sklearn.utils.validation import check_array, column_or_1d


def check_genomes_labels(X, y=None, n_features=None):
    """Validate an (N, G) non-negative integer symbol matrix and binary labels.

    Returns ``(X, y)`` as ``uint8`` arrays (``y`` stays ``None`` if omitted).
    """
    X = check_array(X, dtype=None, ensure_2d=True)
    if not np.issubdtype(X.dtype, np.integer):
        Xi = X.astype(np.int64)
        if not np.array_equal(Xi, X):
            raise ValueError("genome symbols must be integers")
        X = Xi
    if X.min() < 0 or X.max() > 255:
        raise ValueError("genome symbols must lie in [0, 255]")
    if n_features is not None and X.shape[1] != n_features:
        raise ValueError(f"X has {X.shape[1]} features, expected {n_features}")
    X = X.astype(np.uint8)
    if y is None:
        return X, None
    y = column_or_1d(y)
    if y.shape[0] != X.shape[0]:
        raise ValueError("X and y have inconsistent numbers of samples")
    if not np.isin(y, (0, 1)).all():
        raise ValueError("labels must be binary 0/1")
    return X, y.astype(np.uint8)


def check_dataset(data, params):
    """Check that a dataset agrees with the model parameters."""
    if data.N != params.N or data.G != params.G:
        raise ValueError(f"dataset is {data.N}x{data.G} but params say N={params.N}, G={params.G}")
    if data.N and int(data.genomes.max()) >= params.q:
        raise ValueError(f"genome symbols must be below q={params.q}")
