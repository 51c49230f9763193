#pragma once

#include "satdesign/complete_class.hpp"
#include "satdesign/criteria.hpp"
#include "satdesign/design.hpp"
#include "satdesign/design_space.hpp"
#include "satdesign/errors.hpp"
#include "satdesign/linalg.hpp"
#include "satdesign/model.hpp"
#include "satdesign/oracles.hpp"
#include "satdesign/solver.hpp"
