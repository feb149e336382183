#pragma once

#include "kanids/boost.hpp"
#include "kanids/data.hpp"
#include "kanids/kan.hpp"
#include "kanids/metrics.hpp"
#include "kanids/optim.hpp"
#include "kanids/pipeline.hpp"
#include "kanids/splines.hpp"
