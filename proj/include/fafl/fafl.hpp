#pragma once

#include "fafl/error.hpp"
#include "fafl/matrix_core.hpp"
#include "fafl/rank_selection.hpp"
#include "fafl/projectors.hpp"
#include "fafl/stats.hpp"
#include "fafl/estimator.hpp"
#include "fafl/random.hpp"
#include "fafl/dgp.hpp"
#include "fafl/montecarlo.hpp"
#include "fafl/json_io.hpp"
#include "fafl/report.hpp"
#include "fafl/panel_csv.hpp"
