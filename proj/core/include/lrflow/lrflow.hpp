#pragma once

// Umbrella header.

#include "lrflow/chaplygin.hpp"
#include "lrflow/classical3d.hpp"
#include "lrflow/coupled.hpp"
#include "lrflow/diagnostics.hpp"
#include "lrflow/error.hpp"
#include "lrflow/integrators.hpp"
#include "lrflow/liecore.hpp"
#include "lrflow/lr.hpp"
#include "lrflow/multipliers.hpp"
#include "lrflow/operators.hpp"
#include "lrflow/phase.hpp"
#include "lrflow/support.hpp"
#include "lrflow/system.hpp"
