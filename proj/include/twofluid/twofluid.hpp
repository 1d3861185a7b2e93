#pragma once

#include "twofluid/banded.hpp"
#include "twofluid/case_file.hpp"
#include "twofluid/closure.hpp"
#include "twofluid/csv.hpp"
#include "twofluid/driver.hpp"
#include "twofluid/errors.hpp"
#include "twofluid/parallel.hpp"
#include "twofluid/scheme_o1.hpp"
#include "twofluid/scheme_p3.hpp"
#include "twofluid/state.hpp"
#include "twofluid/stencils.hpp"
#include "twofluid/step.hpp"
