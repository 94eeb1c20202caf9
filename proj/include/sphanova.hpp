#pragma once

#include "sphanova/error.hpp"
#include "sphanova/quadrature.hpp"
#include "sphanova/sphere.hpp"
#include "sphanova/angular_model.hpp"
#include "sphanova/tilde_law.hpp"
#include "sphanova/score.hpp"
#include "sphanova/sampler.hpp"
#include "sphanova/multisample.hpp"
#include "sphanova/estimators.hpp"
#include "sphanova/chi2.hpp"
#include "sphanova/ks.hpp"
#include "sphanova/anova.hpp"
#include "sphanova/efficiency.hpp"
#include "sphanova/experiment.hpp"
#include "sphanova/data_io.hpp"
