#pragma once

#include "mcvar/adf.hpp"
#include "mcvar/common.hpp"
#include "mcvar/design.hpp"
#include "mcvar/estimator.hpp"
#include "mcvar/fit_io.hpp"
#include "mcvar/jgl.hpp"
#include "mcvar/model.hpp"
#include "mcvar/network.hpp"
#include "mcvar/network_io.hpp"
#include "mcvar/panel.hpp"
#include "mcvar/prox.hpp"
#include "mcvar/simulate.hpp"
#include "mcvar/spg.hpp"

namespace mcvar {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace mcvar
