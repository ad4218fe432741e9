#pragma once

#include "logitdyn/analysis.hpp"
#include "logitdyn/closed_forms.hpp"
#include "logitdyn/coupling.hpp"
#include "logitdyn/error.hpp"
#include "logitdyn/game.hpp"
#include "logitdyn/games.hpp"
#include "logitdyn/kernel.hpp"
#include "logitdyn/or_path_coupling.hpp"
#include "logitdyn/parallel.hpp"
#include "logitdyn/random.hpp"
#include "logitdyn/stats.hpp"
#include "logitdyn/xor_distance.hpp"
