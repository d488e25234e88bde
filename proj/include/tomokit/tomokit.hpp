#pragma once

#include "tomokit/admissibility.hpp"
#include "tomokit/common.hpp"
#include "tomokit/core.hpp"
#include "tomokit/io.hpp"
#include "tomokit/scaling.hpp"
#include "tomokit/tomography.hpp"
#include "tomokit/uncertainty.hpp"
#include "tomokit/weyl.hpp"
