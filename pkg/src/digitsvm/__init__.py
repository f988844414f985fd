"""Handwritten digit recognition with a from-scratch soft-margin SVM.

Pipeline: Optdigits ingestion (raw 32x32 bitmaps or preprocessed 8x8 block
counts), moment-invariant or block-count features, SMO-trained binary SVMs
lifted one-vs-rest to the ten digits, VC risk bounds, grid search, and an
HTTP classify service with a browser drawing pad.
"""

from .evaluation import (DEFAULT_GRID, GridSearchResult, GridSpec, accuracy,
                         confusion, evaluation_report, grid_search,
                         per_class_rates, stratified_folds)
from .features import (EmptyImageError, MomentFeatures, MomentSet,
                       affine_invariants, extract_moment_features, hu_moments,
                       log_compress, moments, raw_moments, thin)
from .multiclass import (OvrModel, load_model, ovr_predict, ovr_predict_batch,
                         ovr_scores, ovr_scores_batch, ovr_train, save_model)
from .optdigits import (BLOCK64, BlockFeatures, Dataset, FormatError, MOMENT18,
                        RawBitmap, Sample, downsample, parse_preprocessed,
                        parse_raw, scale_features, write_preprocessed)
from .oracle import InseparableError, brute_force_dual, hull_closest_points
from .slt import (BoundInputs, RiskReport, empirical_risk, risk_bound,
                  srm_select, vc_confidence, vc_dim_linear, zero_one_loss)
from .svm import (BinaryModel, ConvergenceError, KernelSpec, TrainParams,
                  decision_value, decision_values, dual_objective, kernel_eval,
                  kernel_matrix, predict_binary, smo_train)

__version__ = "0.1.0"
