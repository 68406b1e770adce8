#pragma once

#include "fedadapt/clustering.hpp"
#include "fedadapt/config.hpp"
#include "fedadapt/cost_model.hpp"
#include "fedadapt/errors.hpp"
#include "fedadapt/experiments.hpp"
#include "fedadapt/mlp.hpp"
#include "fedadapt/model_profile.hpp"
#include "fedadapt/presets.hpp"
#include "fedadapt/reports.hpp"
#include "fedadapt/rl_core.hpp"
#include "fedadapt/rng.hpp"
#include "fedadapt/sim_env.hpp"
