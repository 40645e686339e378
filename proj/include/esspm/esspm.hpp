#pragma once

#include "esspm/analysis.hpp"
#include "esspm/game.hpp"
#include "esspm/generators.hpp"
#include "esspm/lp.hpp"
#include "esspm/milp.hpp"
#include "esspm/model.hpp"
#include "esspm/pipeline.hpp"
#include "esspm/support_enum.hpp"
