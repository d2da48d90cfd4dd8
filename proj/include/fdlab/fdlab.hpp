#pragma once

#include "fdlab/bias_theory.hpp"
#include "fdlab/dataset.hpp"
#include "fdlab/discrete_frontdoor.hpp"
#include "fdlab/documents.hpp"
#include "fdlab/error.hpp"
#include "fdlab/ols.hpp"
#include "fdlab/population.hpp"
#include "fdlab/report.hpp"
#include "fdlab/rng.hpp"
#include "fdlab/scenario.hpp"
