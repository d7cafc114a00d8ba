#pragma once

// Umbrella header: k-means on symmetric positive definite matrices under the
// log-Cholesky metric, with autocovariance feature extraction, cluster-count
// selection, and evaluation metrics.

#include "spdkm/errors.hpp"
#include "spdkm/features.hpp"
#include "spdkm/kmeans.hpp"
#include "spdkm/metrics.hpp"
#include "spdkm/model_select.hpp"
#include "spdkm/rng.hpp"
#include "spdkm/spd.hpp"
#include "spdkm/tensor_file.hpp"
#include "spdkm/version.hpp"
