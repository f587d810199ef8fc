#ifndef KFPCA_KFPCA_HPP
#define KFPCA_KFPCA_HPP

#include "kfpca/csv.hpp"
#include "kfpca/eigen_system.hpp"
#include "kfpca/errors.hpp"
#include "kfpca/estimators.hpp"
#include "kfpca/grid.hpp"
#include "kfpca/metrics.hpp"
#include "kfpca/model.hpp"
#include "kfpca/model_io.hpp"
#include "kfpca/rng.hpp"
#include "kfpca/simgen.hpp"
#include "kfpca/simulation.hpp"
#include "kfpca/smoothing.hpp"

#endif  // KFPCA_KFPCA_HPP
